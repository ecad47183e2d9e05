//! Finite-group unitary representations, twirling, and equivariance.
//!
//! Groups are held extensionally: a list of unitary matrices, one per
//! element with the identity at index 0, plus the group's product table.
//! All the groups used here are small, and the twirling sum needs the
//! matrices anyway.

use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{embed, EmbeddingConfig};
use crate::projections::{domain_of, Alpha};
use crate::Real;

/// Dense complex matrix used throughout this module.
pub type CMat<T> = Array2<Complex<T>>;

/// Matrices closer than this are considered equal when validating
/// representations.
pub const REP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("element {0} is not unitary (residual {1:e})")]
    NotUnitary(usize, f64),
    #[error("element 0 is not the identity")]
    IdentityNotFirst,
    #[error("representation is not closed under products (elements {0} * {1})")]
    NotClosed(usize, usize),
    #[error("no identity element found")]
    MissingIdentity,
    #[error("product table inconsistent with element list")]
    BadProductTable,
    #[error("representations are over different groups")]
    GroupMismatch,
    #[error("matrix dimension {got} does not match representation dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("representation is not real orthogonal (max imaginary part {0:e})")]
    NotRealOrthogonal(f64),
    #[error("representation has no elements")]
    Empty,
}

/// A finite group presented as unitary matrices indexed by element, with
/// `elements[0]` the identity, plus the `|G| x |G|` product table
/// (`product_table[g][h]` is the index of `g * h`).
#[derive(Debug, Clone)]
pub struct Representation<T> {
    elements: Vec<CMat<T>>,
    product_table: Vec<Vec<usize>>,
}

impl<T: Real> Representation<T> {
    /// Build from an explicit element list and product table, validating
    /// unitarity, closure, and the identity convention.
    pub fn new(
        elements: Vec<CMat<T>>,
        product_table: Vec<Vec<usize>>,
    ) -> Result<Self, SymmetryError> {
        if elements.is_empty() {
            return Err(SymmetryError::Empty);
        }
        let order = elements.len();
        let dim = elements[0].nrows();
        if product_table.len() != order || product_table.iter().any(|r| r.len() != order) {
            return Err(SymmetryError::BadProductTable);
        }
        let tol = T::from_f64(REP_TOL).unwrap();
        let eye = identity::<T>(dim);
        if max_abs_diff(&elements[0], &eye) > tol {
            return Err(SymmetryError::IdentityNotFirst);
        }
        for (i, u) in elements.iter().enumerate() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(SymmetryError::DimensionMismatch { expected: dim, got: u.nrows() });
            }
            let res = max_abs_diff(&u.dot(&adjoint(u)), &eye);
            if res > tol {
                return Err(SymmetryError::NotUnitary(i, res.to_f64().unwrap_or(f64::NAN)));
            }
        }
        for g in 0..order {
            for h in 0..order {
                let prod = elements[g].dot(&elements[h]);
                let k = product_table[g][h];
                if k >= order || max_abs_diff(&prod, &elements[k]) > tol {
                    return Err(SymmetryError::NotClosed(g, h));
                }
            }
        }
        Ok(Representation { elements, product_table })
    }

    /// Build from a matrix list alone, inferring the product table by
    /// matching products against the list. The identity is moved to
    /// index 0 if necessary.
    pub fn from_matrices(mut elements: Vec<CMat<T>>) -> Result<Self, SymmetryError> {
        if elements.is_empty() {
            return Err(SymmetryError::Empty);
        }
        let dim = elements[0].nrows();
        let tol = T::from_f64(REP_TOL).unwrap();
        let eye = identity::<T>(dim);
        let id_pos = elements
            .iter()
            .position(|u| max_abs_diff(u, &eye) <= tol)
            .ok_or(SymmetryError::MissingIdentity)?;
        elements.swap(0, id_pos);
        let order = elements.len();
        let mut table = vec![vec![0usize; order]; order];
        for g in 0..order {
            for h in 0..order {
                let prod = elements[g].dot(&elements[h]);
                let k = elements
                    .iter()
                    .position(|u| max_abs_diff(u, &prod) <= tol)
                    .ok_or(SymmetryError::NotClosed(g, h))?;
                table[g][h] = k;
            }
        }
        Representation::new(elements, table)
    }

    /// The trivial representation of the same group on dimension `dim`.
    pub fn trivial_like(&self, dim: usize) -> Self {
        Representation {
            elements: (0..self.order()).map(|_| identity::<T>(dim)).collect(),
            product_table: self.product_table.clone(),
        }
    }

    /// Z2 representation `{I, u}`; `u` must square to the identity.
    pub fn z2(u: CMat<T>) -> Result<Self, SymmetryError> {
        let eye = identity::<T>(u.nrows());
        Representation::new(vec![eye, u], vec![vec![0, 1], vec![1, 0]])
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn elements(&self) -> &[CMat<T>] {
        &self.elements
    }

    pub fn product_table(&self) -> &[Vec<usize>] {
        &self.product_table
    }

    /// Block-diagonal direct sum with another representation of the same
    /// group.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, SymmetryError> {
        if self.product_table != other.product_table {
            return Err(SymmetryError::GroupMismatch);
        }
        let d1 = self.dim();
        let d2 = other.dim();
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| {
                let mut m = CMat::<T>::zeros((d1 + d2, d1 + d2));
                m.slice_mut(ndarray::s![..d1, ..d1]).assign(a);
                m.slice_mut(ndarray::s![d1.., d1..]).assign(b);
                m
            })
            .collect();
        Representation::new(elements, self.product_table.clone())
    }

    /// Real parts of the elements, after checking the representation is
    /// real orthogonal.
    pub fn real_elements(&self) -> Result<Vec<Array2<T>>, SymmetryError> {
        let tol = T::from_f64(1e-12).unwrap();
        let mut max_im = T::zero();
        for u in &self.elements {
            for c in u.iter() {
                max_im = max_im.max(c.im.abs());
            }
        }
        if max_im > tol {
            return Err(SymmetryError::NotRealOrthogonal(
                max_im.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(self.elements.iter().map(|u| u.mapv(|c| c.re)).collect())
    }
}

/// Twirling projector: `T(U) = (1/|G|) sum_g phi(g) U phi(g)*`.
///
/// The output commutes with every representation matrix, and twirling is
/// idempotent, so this projects onto the commutant.
pub fn twirl<T: Real>(rep: &Representation<T>, u: &CMat<T>) -> Result<CMat<T>, SymmetryError> {
    if u.nrows() != rep.dim() || u.ncols() != rep.dim() {
        return Err(SymmetryError::DimensionMismatch { expected: rep.dim(), got: u.nrows() });
    }
    let mut acc = CMat::<T>::zeros((rep.dim(), rep.dim()));
    // deterministic summation order: element index
    for g in rep.elements() {
        acc = acc + g.dot(u).dot(&adjoint(g));
    }
    let inv_order = Complex::new(
        T::one() / T::from_usize(rep.order()).unwrap(),
        T::zero(),
    );
    Ok(acc.mapv(|c| c * inv_order))
}

/// True iff `u` commutes with every representation matrix to within `tol`
/// in the max-abs norm.
pub fn is_equivariant_matrix<T: Real>(
    rep: &Representation<T>,
    u: &CMat<T>,
    tol: T,
) -> Result<bool, SymmetryError> {
    if u.nrows() != rep.dim() || u.ncols() != rep.dim() {
        return Err(SymmetryError::DimensionMismatch { expected: rep.dim(), got: u.nrows() });
    }
    Ok(rep
        .elements()
        .iter()
        .all(|g| max_abs_diff(&g.dot(u), &u.dot(g)) <= tol))
}

/// Numerically verify the equivariance of `E_alpha`: the max over random
/// samples `x` and all group elements of
/// `|| E_alpha(rho(g) x) - (rho(g) (+) 1) E_alpha(x) ||_inf`.
///
/// `rep_in` must be real orthogonal; samples include points outside
/// `R_alpha` (the clamp commutes with isometries).
pub fn check_embedding_equivariance<T: Real>(
    rep_in: &Representation<T>,
    alpha: Alpha<T>,
    samples: usize,
    seed: u64,
) -> Result<T, SymmetryError> {
    let mats = rep_in.real_elements()?;
    let n = rep_in.dim();
    let cfg = EmbeddingConfig::unscaled(alpha);
    let radius = domain_of(alpha, n)
        .radius
        .map(|r| r.to_f64().unwrap())
        .unwrap_or(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..samples {
        // mixed radii, deliberately reaching past the clamp boundary
        let scale = rng.gen_range(0.0..2.0 * radius);
        let mut x: Vec<T> = (0..n)
            .map(|_| T::from_f64(rng.gen_range(-1.0..1.0)).unwrap())
            .collect();
        let nrm = crate::projections::norm(&x);
        if nrm > T::zero() {
            let k = T::from_f64(scale).unwrap() / nrm;
            x.iter_mut().for_each(|v| *v = *v * k);
        }
        let ex = embed(&cfg, &x).expect("embedding is total on finite inputs");
        for m in &mats {
            let gx: Vec<T> = (0..n)
                .map(|i| (0..n).map(|j| m[[i, j]] * x[j]).sum())
                .collect();
            let e_gx = embed(&cfg, &gx).expect("embedding is total on finite inputs");
            // (rho(g) (+) 1) E(x)
            for i in 0..n {
                let lhs: T = (0..n).map(|j| m[[i, j]] * ex.coords[j]).sum();
                worst = worst.max((e_gx.coords[i] - lhs).abs());
            }
            worst = worst.max((e_gx.coords[n] - ex.coords[n]).abs());
        }
    }
    Ok(worst)
}

/// The Z2 flip representation on `x_qubits + y_qubits` qubits: the
/// nonidentity element permutes basis index `i` to `i XOR mask`, where
/// `mask` complements the x-register bits (qubit 0 is the most
/// significant bit, so the x register occupies the high bits).
///
/// For 4 + 4 qubits the mask is 240.
pub fn build_flip_representation<T: Real>(
    x_qubits: usize,
    y_qubits: usize,
) -> Representation<T> {
    assert!(x_qubits >= 1 && y_qubits >= 1);
    let dim = 1usize << (x_qubits + y_qubits);
    let mask = ((1usize << x_qubits) - 1) << y_qubits;
    let mut flip = CMat::<T>::zeros((dim, dim));
    for i in 0..dim {
        flip[[i ^ mask, i]] = Complex::new(T::one(), T::zero());
    }
    Representation::z2(flip).expect("flip permutation is an involution")
}

/// Identity matrix.
pub fn identity<T: Real>(dim: usize) -> CMat<T> {
    let mut m = CMat::<T>::zeros((dim, dim));
    for i in 0..dim {
        m[[i, i]] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(m: &CMat<T>) -> CMat<T> {
    m.t().mapv(|c| c.conj())
}

/// Entrywise max-abs distance (abs = |re| + |im| would overweight; use
/// the complex modulus).
pub fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).norm())
        .fold(T::zero(), T::max)
}
