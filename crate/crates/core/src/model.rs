//! The two 8-qubit ansatz circuits and the classifier forward pass.
//!
//! Hardware-efficient: per-qubit `RY RZ` layers around a descending CNOT
//! chain, measured in `Z` on every qubit. Equivariant: on the flipped
//! half of the register the rotations become `RX` and the CNOTs become
//! fixed `RXX/RYY/RZZ(pi/2)` entanglers, measured in `X` on the flipped
//! qubits and `Z` elsewhere. Every equivariant gate commutes with the
//! flip representation, so does each measured observable, and therefore
//! so does the model's output probability.
//!
//! Readout: the `q` single-qubit expectations are averaged and mapped to
//! a probability by `p = (1 + mean) / 2`, clamped to `[eps, 1 - eps]`.
//! This aggregation is parameter-free and preserves the flip invariance
//! exactly.

use crate::simulator::{
    apply_circuit, expectation, AngleSpec, GateDescriptor, GateKind, Pauli, PauliString,
    QuantumState, SimulatorError,
};
use crate::Real;

/// Probability clamp applied before the cross-entropy loss.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("expected {expected} parameters, got {got}")]
    BadParamCount { expected: usize, got: usize },
    #[error("the equivariant ansatz is defined for 8 qubits, got {0}")]
    UnsupportedQubitCount(usize),
    #[error("ansatz expects {expected} qubits, state has {got}")]
    QubitMismatch { expected: usize, got: usize },
    #[error("parameters must be finite")]
    NonFiniteParams,
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// Which ansatz to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    HardwareEfficient,
    Equivariant,
}

/// A parameterized circuit plus its measurement set.
#[derive(Debug, Clone)]
pub struct AnsatzSpec<T> {
    pub kind: AnsatzKind,
    pub qubits: usize,
    pub gates: Vec<GateDescriptor<T>>,
    pub param_count: usize,
    pub measurements: Vec<PauliString>,
}

/// One repetition of the chosen ansatz. The hardware-efficient layout
/// generalizes to any `q >= 2`; the equivariant layout is the 8-qubit
/// circuit (4 flipped + 4 unflipped qubits).
pub fn build_ansatz<T: Real>(kind: AnsatzKind, q: usize) -> Result<AnsatzSpec<T>, ModelError> {
    match kind {
        AnsatzKind::HardwareEfficient => {
            if q < 2 {
                return Err(ModelError::UnsupportedQubitCount(q));
            }
            let mut gates = Vec::with_capacity(4 * q + (q - 1));
            for i in 0..q {
                gates.push(GateDescriptor::single(GateKind::RY, i, AngleSpec::Slot(2 * i)));
                gates.push(GateDescriptor::single(GateKind::RZ, i, AngleSpec::Slot(2 * i + 1)));
            }
            // CNOT chain, bottom pair first
            for i in (0..q - 1).rev() {
                gates.push(GateDescriptor::two(GateKind::Cnot, i, i + 1, AngleSpec::None));
            }
            for i in 0..q {
                gates.push(GateDescriptor::single(GateKind::RY, i, AngleSpec::Slot(2 * q + 2 * i)));
                gates.push(GateDescriptor::single(
                    GateKind::RZ,
                    i,
                    AngleSpec::Slot(2 * q + 2 * i + 1),
                ));
            }
            let measurements = (0..q).map(|k| PauliString::single(k, Pauli::Z, q)).collect();
            Ok(AnsatzSpec { kind, qubits: q, gates, param_count: 4 * q, measurements })
        }
        AnsatzKind::Equivariant => {
            if q != 8 {
                return Err(ModelError::UnsupportedQubitCount(q));
            }
            let half_pi = AngleSpec::Fixed(T::from_f64(std::f64::consts::FRAC_PI_2).unwrap());
            let mut gates = Vec::with_capacity(39);
            let rotation_layer = |gates: &mut Vec<GateDescriptor<T>>, offset: usize| {
                for i in 0..4 {
                    // the redundant consecutive RX pair matches the published
                    // parameter count
                    gates.push(GateDescriptor::single(
                        GateKind::RX,
                        i,
                        AngleSpec::Slot(offset + 2 * i),
                    ));
                    gates.push(GateDescriptor::single(
                        GateKind::RX,
                        i,
                        AngleSpec::Slot(offset + 2 * i + 1),
                    ));
                }
                for i in 4..8 {
                    gates.push(GateDescriptor::single(
                        GateKind::RY,
                        i,
                        AngleSpec::Slot(offset + 2 * i),
                    ));
                    gates.push(GateDescriptor::single(
                        GateKind::RZ,
                        i,
                        AngleSpec::Slot(offset + 2 * i + 1),
                    ));
                }
            };
            rotation_layer(&mut gates, 0);
            gates.push(GateDescriptor::two(GateKind::Cnot, 6, 7, AngleSpec::None));
            gates.push(GateDescriptor::two(GateKind::Cnot, 5, 6, AngleSpec::None));
            gates.push(GateDescriptor::two(GateKind::Cnot, 4, 5, AngleSpec::None));
            gates.push(GateDescriptor::two(GateKind::RXX, 3, 4, half_pi));
            gates.push(GateDescriptor::two(GateKind::RYY, 2, 3, half_pi));
            gates.push(GateDescriptor::two(GateKind::RZZ, 1, 2, half_pi));
            gates.push(GateDescriptor::two(GateKind::RXX, 0, 1, half_pi));
            rotation_layer(&mut gates, 16);
            let measurements = (0..8)
                .map(|k| {
                    PauliString::single(k, if k < 4 { Pauli::X } else { Pauli::Z }, 8)
                })
                .collect();
            Ok(AnsatzSpec { kind, qubits: q, gates, param_count: 32, measurements })
        }
    }
}

/// Classifier output: the raw expectations, the aggregated probability of
/// class 1 (boot), and the thresholded label.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutput<T> {
    pub expectations: Vec<T>,
    pub probability: T,
    pub predicted_label: u8,
}

/// Run the circuit with bound parameters, measure, and aggregate.
pub fn forward<T: Real>(
    spec: &AnsatzSpec<T>,
    params: &[T],
    input_state: &QuantumState<T>,
) -> Result<ModelOutput<T>, ModelError> {
    if params.len() != spec.param_count {
        return Err(ModelError::BadParamCount { expected: spec.param_count, got: params.len() });
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(ModelError::NonFiniteParams);
    }
    if input_state.qubits() != spec.qubits {
        return Err(ModelError::QubitMismatch {
            expected: spec.qubits,
            got: input_state.qubits(),
        });
    }
    let out = apply_circuit(input_state, &spec.gates, params)?;
    let expectations: Vec<T> = spec
        .measurements
        .iter()
        .map(|p| expectation(&out, p))
        .collect::<Result<_, _>>()?;
    let mean = expectations.iter().copied().sum::<T>()
        / T::from_usize(expectations.len()).unwrap();
    let eps = T::from_f64(PROB_EPS).unwrap();
    let half = T::from_f64(0.5).unwrap();
    let probability = ((T::one() + mean) * half).max(eps).min(T::one() - eps);
    let predicted_label = if probability >= half { 1 } else { 0 };
    Ok(ModelOutput { expectations, probability, predicted_label })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{circuit_unitary, init_state_real};
    use crate::symmetry::{build_flip_representation, is_equivariant_matrix};
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    }

    fn random_state(rng: &mut ChaCha8Rng, q: usize) -> QuantumState<f64> {
        let raw: Vec<Complex<f64>> = (0..1 << q)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nrm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        crate::simulator::init_state(raw.into_iter().map(|c| c / nrm).collect()).unwrap()
    }

    fn apply_flip(state: &QuantumState<f64>) -> QuantumState<f64> {
        let amps = state.amplitudes();
        let flipped: Vec<Complex<f64>> =
            (0..amps.len()).map(|i| amps[i ^ 240]).collect();
        crate::simulator::init_state(flipped).unwrap()
    }

    #[test]
    fn gate_counts_match_figures() {
        let he = build_ansatz::<f64>(AnsatzKind::HardwareEfficient, 8).unwrap();
        assert_eq!(he.gates.len(), 39);
        assert_eq!(he.param_count, 32);

        let eq = build_ansatz::<f64>(AnsatzKind::Equivariant, 8).unwrap();
        assert_eq!(eq.gates.len(), 39);
        assert_eq!(eq.param_count, 32);
        let entanglers: Vec<_> =
            eq.gates.iter().filter(|g| g.kind.arity() == 2).collect();
        assert_eq!(entanglers.len(), 7);
        assert_eq!(
            entanglers.iter().filter(|g| g.kind == GateKind::Cnot).count(),
            3
        );
    }

    #[test]
    fn hardware_efficient_zero_params_is_cnot_chain() {
        let he = build_ansatz::<f64>(AnsatzKind::HardwareEfficient, 4).unwrap();
        let params = vec![0.0; he.param_count];
        let u = circuit_unitary(&he.gates, &params, 4).unwrap();
        let chain: Vec<GateDescriptor<f64>> = (0..3)
            .rev()
            .map(|i| GateDescriptor::two(GateKind::Cnot, i, i + 1, AngleSpec::None))
            .collect();
        let expected = circuit_unitary(&chain, &[], 4).unwrap();
        assert!(crate::symmetry::max_abs_diff(&u, &expected) < 1e-14);
    }

    #[test]
    fn forward_zero_params_zero_state() {
        let he = build_ansatz::<f64>(AnsatzKind::HardwareEfficient, 8).unwrap();
        let state = QuantumState::<f64>::zero(8);
        let out = forward(&he, &vec![0.0; 32], &state).unwrap();
        for e in &out.expectations {
            assert!((e - 1.0).abs() < 1e-12);
        }
        assert!((out.probability - (1.0 - PROB_EPS)).abs() < 1e-12);
        assert_eq!(out.predicted_label, 1);
    }

    #[test]
    fn equivariant_gates_commute_with_flip() {
        let rep = build_flip_representation::<f64>(4, 4);
        let eq = build_ansatz::<f64>(AnsatzKind::Equivariant, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = random_params(&mut rng, 32);
        for gate in &eq.gates {
            let u = circuit_unitary(&[*gate], &params, 8).unwrap();
            assert!(
                is_equivariant_matrix(&rep, &u, 1e-12).unwrap(),
                "gate {gate:?} does not commute with the flip"
            );
        }
    }

    #[test]
    fn equivariant_forward_is_flip_invariant() {
        let eq = build_ansatz::<f64>(AnsatzKind::Equivariant, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let params = random_params(&mut rng, 32);
            let state = random_state(&mut rng, 8);
            let a = forward(&eq, &params, &state).unwrap();
            let b = forward(&eq, &params, &apply_flip(&state)).unwrap();
            assert!((a.probability - b.probability).abs() < 1e-9);
        }
    }

    #[test]
    fn hardware_efficient_has_flip_counterexample() {
        let he = build_ansatz::<f64>(AnsatzKind::HardwareEfficient, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut max_gap = 0.0f64;
        for _ in 0..10 {
            let params = random_params(&mut rng, 32);
            let state = random_state(&mut rng, 8);
            let a = forward(&he, &params, &state).unwrap();
            let b = forward(&he, &params, &apply_flip(&state)).unwrap();
            max_gap = max_gap.max((a.probability - b.probability).abs());
        }
        assert!(max_gap > 1e-3, "expected a flip-sensitivity counterexample, gap {max_gap}");
    }

    #[test]
    fn probability_stays_clamped() {
        let eq = build_ansatz::<f64>(AnsatzKind::Equivariant, 8).unwrap();
        let mut amps = vec![0.0; 256];
        amps[0] = 1.0;
        let state = init_state_real(&amps).unwrap();
        let out = forward(&eq, &vec![0.0; 32], &state).unwrap();
        assert!(out.probability >= PROB_EPS && out.probability <= 1.0 - PROB_EPS);
    }

    #[test]
    fn forward_validates_inputs() {
        let eq = build_ansatz::<f64>(AnsatzKind::Equivariant, 8).unwrap();
        let state = QuantumState::<f64>::zero(8);
        assert!(matches!(
            forward(&eq, &vec![0.0; 31], &state),
            Err(ModelError::BadParamCount { expected: 32, got: 31 })
        ));
        assert!(matches!(
            forward(&eq, &vec![f64::NAN; 32], &state),
            Err(ModelError::NonFiniteParams)
        ));
        let small = QuantumState::<f64>::zero(4);
        assert!(matches!(
            forward(&eq, &vec![0.0; 32], &small),
            Err(ModelError::QubitMismatch { .. })
        ));
        assert!(matches!(
            build_ansatz::<f64>(AnsatzKind::Equivariant, 6),
            Err(ModelError::UnsupportedQubitCount(6))
        ));
    }
}
