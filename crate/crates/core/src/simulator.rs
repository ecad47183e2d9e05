//! Dense complex statevector simulation.
//!
//! States hold all `2^q` amplitudes; gates act in place on a copy.
//! Basis-index convention: qubit 0 is the most significant bit of the
//! basis index, so for an 8-qubit register holding a 16x16 image the
//! pixel `(x, y)` sits at index `16x + y` with the x register on qubits
//! 0-3.
//!
//! Rotation convention: `R_P(theta) = cos(theta/2) I - i sin(theta/2) P`
//! for `P` in `{X, Y, Z, XX, YY, ZZ}` (that is, `exp(-i theta P / 2)`).

use ndarray::Array2;
use num_complex::Complex;

use crate::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulatorError {
    #[error("amplitude vector has norm {0}, expected 1 within 1e-9")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("qubit index {index} invalid for {qubits} qubits")]
    BadQubitIndex { index: usize, qubits: usize },
    #[error("pauli string length {got} does not match {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceed the dense-unitary limit of 10")]
    TooManyQubits(usize),
    #[error("gate references parameter slot {slot} but only {provided} parameters were bound")]
    UnboundParameter { slot: usize, provided: usize },
    #[error("two-qubit gate needs two distinct qubits")]
    DuplicateQubits,
    #[error("unknown pauli letter '{0}'")]
    BadPauliLetter(char),
}

/// A pure state of `q` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    amplitudes: Vec<Complex<T>>,
    qubits: usize,
}

impl<T: Real> QuantumState<T> {
    /// `|0...0>` on `q` qubits.
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        QuantumState { amplitudes, qubits }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<T>()
            .sqrt()
    }
}

/// Build a state from explicit amplitudes. The vector must already be
/// normalized to within 1e-9; it is renormalized to machine precision.
pub fn init_state<T: Real>(amps: Vec<Complex<T>>) -> Result<QuantumState<T>, SimulatorError> {
    if !amps.len().is_power_of_two() || amps.len() < 2 {
        return Err(SimulatorError::BadLength(amps.len()));
    }
    let qubits = amps.len().trailing_zeros() as usize;
    let nrm = amps.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if (nrm - T::one()).abs() > T::from_f64(1e-9).unwrap() {
        return Err(SimulatorError::NotNormalized(nrm.to_f64().unwrap_or(f64::NAN)));
    }
    let inv = Complex::new(T::one() / nrm, T::zero());
    Ok(QuantumState {
        amplitudes: amps.into_iter().map(|c| c * inv).collect(),
        qubits,
    })
}

/// Build a state from real amplitudes (embedding outputs).
pub fn init_state_real<T: Real>(amps: &[T]) -> Result<QuantumState<T>, SimulatorError> {
    init_state(amps.iter().map(|&a| Complex::new(a, T::zero())).collect())
}

/// Gate kinds available to circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    PauliX,
    Cnot,
    RXX,
    RYY,
    RZZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::PauliX => 1,
            GateKind::Cnot | GateKind::RXX | GateKind::RYY | GateKind::RZZ => 2,
        }
    }

    fn takes_angle(self) -> bool {
        !matches!(self, GateKind::PauliX | GateKind::Cnot)
    }
}

/// Where a rotation gate gets its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSpec<T> {
    /// No angle (X, CNOT).
    None,
    /// Fixed angle in radians.
    Fixed(T),
    /// Index into the bound parameter vector.
    Slot(usize),
}

/// One gate in a circuit: kind, target qubit(s), and angle binding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDescriptor<T> {
    pub kind: GateKind,
    pub qubits: [usize; 2],
    pub angle: AngleSpec<T>,
}

impl<T: Real> GateDescriptor<T> {
    pub fn single(kind: GateKind, qubit: usize, angle: AngleSpec<T>) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        GateDescriptor { kind, qubits: [qubit, usize::MAX], angle }
    }

    pub fn two(kind: GateKind, a: usize, b: usize, angle: AngleSpec<T>) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        GateDescriptor { kind, qubits: [a, b], angle }
    }

    fn resolve_angle(&self, params: &[T]) -> Result<T, SimulatorError> {
        match self.angle {
            AngleSpec::None => {
                debug_assert!(!self.kind.takes_angle());
                Ok(T::zero())
            }
            AngleSpec::Fixed(a) => Ok(a),
            AngleSpec::Slot(slot) => params
                .get(slot)
                .copied()
                .ok_or(SimulatorError::UnboundParameter { slot, provided: params.len() }),
        }
    }
}

fn single_qubit_matrix<T: Real>(kind: GateKind, theta: T) -> [Complex<T>; 4] {
    let zero = Complex::new(T::zero(), T::zero());
    let half = theta / T::from_f64(2.0).unwrap();
    let (c, s) = (half.cos(), half.sin());
    match kind {
        GateKind::RX => [
            Complex::new(c, T::zero()),
            Complex::new(T::zero(), -s),
            Complex::new(T::zero(), -s),
            Complex::new(c, T::zero()),
        ],
        GateKind::RY => [
            Complex::new(c, T::zero()),
            Complex::new(-s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(c, T::zero()),
        ],
        GateKind::RZ => [
            Complex::new(c, -s),
            zero,
            zero,
            Complex::new(c, s),
        ],
        GateKind::PauliX => [
            zero,
            Complex::new(T::one(), T::zero()),
            Complex::new(T::one(), T::zero()),
            zero,
        ],
        _ => unreachable!("not a single-qubit gate"),
    }
}

/// 4x4 matrix in the `|b1 b2>` basis of the two listed qubits.
fn two_qubit_matrix<T: Real>(kind: GateKind, theta: T) -> [[Complex<T>; 4]; 4] {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let half = theta / T::from_f64(2.0).unwrap();
    let c = Complex::new(half.cos(), T::zero());
    let mis = Complex::new(T::zero(), -half.sin());
    let pis = Complex::new(T::zero(), half.sin());
    let mut m = [[zero; 4]; 4];
    match kind {
        GateKind::Cnot => {
            m[0][0] = one;
            m[1][1] = one;
            m[2][3] = one;
            m[3][2] = one;
        }
        GateKind::RXX => {
            for i in 0..4 {
                m[i][i] = c;
                m[i][3 - i] = mis;
            }
        }
        GateKind::RYY => {
            // Y(x)Y maps |00> -> -|11>, |01> -> |10>, |10> -> |01>, |11> -> -|00>
            for i in 0..4 {
                m[i][i] = c;
            }
            m[3][0] = pis;
            m[2][1] = mis;
            m[1][2] = mis;
            m[0][3] = pis;
        }
        GateKind::RZZ => {
            m[0][0] = Complex::new(half.cos(), -half.sin());
            m[1][1] = Complex::new(half.cos(), half.sin());
            m[2][2] = Complex::new(half.cos(), half.sin());
            m[3][3] = Complex::new(half.cos(), -half.sin());
        }
        _ => unreachable!("not a two-qubit gate"),
    }
    m
}

/// Apply a gate, returning the new state. Parameter-slot gates read their
/// angle from `params`.
pub fn apply_gate<T: Real>(
    state: &QuantumState<T>,
    gate: &GateDescriptor<T>,
    params: &[T],
) -> Result<QuantumState<T>, SimulatorError> {
    let q = state.qubits;
    let theta = gate.resolve_angle(params)?;
    let mut amps = state.amplitudes.clone();
    match gate.kind.arity() {
        1 => {
            let k = gate.qubits[0];
            if k >= q {
                return Err(SimulatorError::BadQubitIndex { index: k, qubits: q });
            }
            let bit = 1usize << (q - 1 - k);
            let m = single_qubit_matrix(gate.kind, theta);
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | bit];
                    amps[i] = m[0] * a0 + m[1] * a1;
                    amps[i | bit] = m[2] * a0 + m[3] * a1;
                }
            }
        }
        _ => {
            let (k1, k2) = (gate.qubits[0], gate.qubits[1]);
            if k1 >= q {
                return Err(SimulatorError::BadQubitIndex { index: k1, qubits: q });
            }
            if k2 >= q {
                return Err(SimulatorError::BadQubitIndex { index: k2, qubits: q });
            }
            if k1 == k2 {
                return Err(SimulatorError::DuplicateQubits);
            }
            let b1 = 1usize << (q - 1 - k1);
            let b2 = 1usize << (q - 1 - k2);
            let m = two_qubit_matrix(gate.kind, theta);
            for i in 0..amps.len() {
                if i & b1 == 0 && i & b2 == 0 {
                    let idx = [i, i | b2, i | b1, i | b1 | b2];
                    let old = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
                    for (r, &target) in idx.iter().enumerate() {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for c in 0..4 {
                            acc = acc + m[r][c] * old[c];
                        }
                        amps[target] = acc;
                    }
                }
            }
        }
    }
    Ok(QuantumState { amplitudes: amps, qubits: q })
}

/// Apply a list of gates in order.
pub fn apply_circuit<T: Real>(
    state: &QuantumState<T>,
    gates: &[GateDescriptor<T>],
    params: &[T],
) -> Result<QuantumState<T>, SimulatorError> {
    let mut s = state.clone();
    for g in gates {
        s = apply_gate(&s, g, params)?;
    }
    Ok(s)
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A tensor product of Pauli letters, one per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn parse(s: &str) -> Result<Self, SimulatorError> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(SimulatorError::BadPauliLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PauliString)
    }

    /// Single non-identity letter at `qubit`.
    pub fn single(qubit: usize, letter: Pauli, qubits: usize) -> Self {
        let mut v = vec![Pauli::I; qubits];
        v[qubit] = letter;
        PauliString(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact expectation value `<psi| P |psi>`. The imaginary residue is
/// asserted below 1e-10 and discarded.
pub fn expectation<T: Real>(
    state: &QuantumState<T>,
    pauli: &PauliString,
) -> Result<T, SimulatorError> {
    let q = state.qubits;
    if pauli.len() != q {
        return Err(SimulatorError::LengthMismatch { expected: q, got: pauli.len() });
    }
    // P|i> = phase(i) |i ^ xmask>
    let mut xmask = 0usize;
    for (k, p) in pauli.0.iter().enumerate() {
        if matches!(p, Pauli::X | Pauli::Y) {
            xmask |= 1 << (q - 1 - k);
        }
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for (i, &a) in state.amplitudes.iter().enumerate() {
        let mut phase = Complex::new(T::one(), T::zero());
        for (k, p) in pauli.0.iter().enumerate() {
            let bit = (i >> (q - 1 - k)) & 1;
            match p {
                Pauli::I | Pauli::X => {}
                Pauli::Y => {
                    // Y|0> = i|1>, Y|1> = -i|0>
                    phase = phase
                        * if bit == 0 {
                            Complex::new(T::zero(), T::one())
                        } else {
                            Complex::new(T::zero(), -T::one())
                        };
                }
                Pauli::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        acc = acc + state.amplitudes[i ^ xmask].conj() * phase * a;
    }
    debug_assert!(
        acc.im.abs() <= T::from_f64(1e-10).unwrap(),
        "expectation has imaginary residue {:?}",
        acc.im
    );
    Ok(acc.re)
}

/// The full `2^q x 2^q` unitary of a circuit, built column by column.
/// Guarded at `q <= 10` against memory blowup.
pub fn circuit_unitary<T: Real>(
    gates: &[GateDescriptor<T>],
    params: &[T],
    qubits: usize,
) -> Result<Array2<Complex<T>>, SimulatorError> {
    if qubits > 10 {
        return Err(SimulatorError::TooManyQubits(qubits));
    }
    let dim = 1usize << qubits;
    let mut u = Array2::<Complex<T>>::zeros((dim, dim));
    for j in 0..dim {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[j] = Complex::new(T::one(), T::zero());
        let mut state = QuantumState { amplitudes: amps, qubits };
        for g in gates {
            state = apply_gate(&state, g, params)?;
        }
        for i in 0..dim {
            u[[i, j]] = state.amplitudes[i];
        }
    }
    Ok(u)
}
