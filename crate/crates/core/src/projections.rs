//! Central projections of the unit hypersphere onto its tangent hyperplane.
//!
//! The projection family `P_alpha` sends a point of the unit sphere of
//! `R^{n+1}` to the tangent hyperplane `{ x : x_n = 1 }` along the line
//! through the centre of projection `(0, ..., 0, alpha)`, then drops the
//! final coordinate (which is always 1). The parameter `alpha` ranges over
//! `[-inf, 1)`; the four named members are gnomonic (`alpha = 0`),
//! stereographic (`-1`), twilight (`-1 - sqrt(2)/2`), and orthographic
//! (`-inf`, plain deletion of the last coordinate).
//!
//! Restricted to the spherical cap `S_alpha` and the planar region
//! `R_alpha` described by [`ProjectionDomain`], each `P_alpha` is a
//! bijection; the inverse is implemented in [`crate::embeddings`].

use crate::Real;

/// Tolerance below which a projection direction counts as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjectionError {
    #[error("line through p and x is parallel to the hyperplane")]
    ParallelLine,
    #[error("projection degenerate: x_n is within {0:e} of alpha")]
    DegenerateProjection(f64),
    #[error("input is not on the unit sphere (norm {0})")]
    NotOnSphere(f64),
    #[error("alpha must be < 1, got {0}")]
    AlphaOutOfRange(f64),
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Extended-real projection parameter: a finite value strictly below 1,
/// or negative infinity (the orthographic case, a distinct code path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha<T> {
    Finite(T),
    NegInfinity,
}

impl<T: Real> Alpha<T> {
    /// A finite parameter; rejects values `>= 1`.
    pub fn finite(value: T) -> Result<Self, ProjectionError> {
        if !value.is_finite() || value >= T::one() {
            return Err(ProjectionError::AlphaOutOfRange(
                value.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Alpha::Finite(value))
    }

    /// `alpha = 0`.
    pub fn gnomonic() -> Self {
        Alpha::Finite(T::zero())
    }

    /// `alpha = -1`.
    pub fn stereographic() -> Self {
        Alpha::Finite(-T::one())
    }

    /// `alpha = -1 - sqrt(2)/2`.
    pub fn twilight() -> Self {
        let two = T::from_f64(2.0).unwrap();
        Alpha::Finite(-T::one() - two.sqrt() / two)
    }

    /// `alpha = -inf`.
    pub fn orthographic() -> Self {
        Alpha::NegInfinity
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Alpha::NegInfinity)
    }

    /// The finite value, if any.
    pub fn finite_value(&self) -> Option<T> {
        match self {
            Alpha::Finite(v) => Some(*v),
            Alpha::NegInfinity => None,
        }
    }

    /// The four projections compared in the experiments.
    pub fn named_instances() -> [Self; 4] {
        [
            Self::gnomonic(),
            Self::stereographic(),
            Self::twilight(),
            Self::orthographic(),
        ]
    }
}

/// The hyperplane `W = { x : <a, x> = b }`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneSpec<T> {
    normal: Vec<T>,
    offset: T,
}

impl<T: Real> HyperplaneSpec<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Result<Self, ProjectionError> {
        let norm_sq: T = normal.iter().map(|&a| a * a).sum();
        if norm_sq <= T::zero() {
            return Err(ProjectionError::ZeroNormal);
        }
        Ok(HyperplaneSpec { normal, offset })
    }

    pub fn normal(&self) -> &[T] {
        &self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Signed residual `<a, x> - b`.
    pub fn residual(&self, x: &[T]) -> T {
        dot(&self.normal, x) - self.offset
    }
}

/// How the cap threshold on `x_n` is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapStrictness {
    Strict,
    NonStrict,
}

/// The restricted domain/range pair on which `P_alpha` is a bijection:
/// the spherical cap `S_alpha = { x on the sphere : x_n (>|>=) threshold }`
/// and the planar region `R_alpha` (a ball of the given radius, or all of
/// `R^n` when unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionDomain<T> {
    pub alpha: Alpha<T>,
    pub dim_n: usize,
    /// `None` means `R_alpha = R^n`.
    pub radius: Option<T>,
    pub cap_threshold: T,
    pub cap_strictness: CapStrictness,
}

/// Domain/range data for `P_alpha` on the sphere of `R^{n+1}`.
pub fn domain_of<T: Real>(alpha: Alpha<T>, n: usize) -> ProjectionDomain<T> {
    assert!(n >= 1, "dimension n must be positive");
    match alpha {
        Alpha::Finite(a) if a >= -T::one() => ProjectionDomain {
            alpha,
            dim_n: n,
            radius: None,
            cap_threshold: a,
            cap_strictness: CapStrictness::Strict,
        },
        Alpha::Finite(a) => ProjectionDomain {
            alpha,
            dim_n: n,
            radius: Some(((a - T::one()) / (a + T::one())).sqrt()),
            cap_threshold: T::one() / a,
            cap_strictness: CapStrictness::NonStrict,
        },
        Alpha::NegInfinity => ProjectionDomain {
            alpha,
            dim_n: n,
            radius: Some(T::one()),
            cap_threshold: T::zero(),
            cap_strictness: CapStrictness::NonStrict,
        },
    }
}

/// Central projection from `p` onto the hyperplane `w`: the point
/// `p + lambda (x - p)` with `lambda = (b - <a, p>) / <a, x - p>`.
///
/// Fails with [`ProjectionError::ParallelLine`] when the line through `p`
/// and `x` does not meet `w`.
pub fn project_from_point<T: Real>(
    p: &[T],
    w: &HyperplaneSpec<T>,
    x: &[T],
) -> Result<Vec<T>, ProjectionError> {
    if p.len() != w.normal.len() || x.len() != w.normal.len() {
        return Err(ProjectionError::DimensionMismatch {
            expected: w.normal.len(),
            got: if p.len() != w.normal.len() { p.len() } else { x.len() },
        });
    }
    let direction: Vec<T> = x.iter().zip(p).map(|(&xi, &pi)| xi - pi).collect();
    let denom = dot(w.normal(), &direction);
    if denom.abs() < T::from_f64(DEGENERATE_TOL).unwrap() {
        return Err(ProjectionError::ParallelLine);
    }
    let lambda = (w.offset - dot(w.normal(), p)) / denom;
    Ok(p.iter()
        .zip(&direction)
        .map(|(&pi, &di)| pi + lambda * di)
        .collect())
}

/// `P_alpha x`: project `x in R^{n+1}` from `(0, ..., 0, alpha)` onto
/// `{ x_n = 1 }` and drop the final coordinate. For `alpha = -inf` this is
/// plain deletion of the last coordinate.
///
/// On the unit sphere the closed form is
/// `P_alpha x = ((1 - alpha) / (x_n - alpha)) (x_0, ..., x_{n-1})`.
pub fn p_alpha<T: Real>(alpha: Alpha<T>, x: &[T]) -> Result<Vec<T>, ProjectionError> {
    assert!(x.len() >= 2, "need at least one projected coordinate");
    let last = x[x.len() - 1];
    match alpha {
        Alpha::NegInfinity => Ok(x[..x.len() - 1].to_vec()),
        Alpha::Finite(a) => {
            if (last - a).abs() < T::from_f64(DEGENERATE_TOL).unwrap() {
                return Err(ProjectionError::DegenerateProjection(DEGENERATE_TOL));
            }
            let scale = (T::one() - a) / (last - a);
            Ok(x[..x.len() - 1].iter().map(|&xi| scale * xi).collect())
        }
    }
}

/// Membership of `x in R^n` in the planar region `R_alpha`.
pub fn in_r<T: Real>(alpha: Alpha<T>, x: &[T]) -> bool {
    match domain_of(alpha, x.len()).radius {
        None => true,
        Some(r) => norm(x) <= r,
    }
}

/// Membership of a unit-norm `x in R^{n+1}` in the spherical cap `S_alpha`.
///
/// The norm precondition `||x|| = 1 +- 1e-9` is enforced.
pub fn in_s<T: Real>(alpha: Alpha<T>, x: &[T]) -> Result<bool, ProjectionError> {
    let nrm = norm(x);
    if (nrm - T::one()).abs() > T::from_f64(1e-9).unwrap() {
        return Err(ProjectionError::NotOnSphere(nrm.to_f64().unwrap_or(f64::NAN)));
    }
    let dom = domain_of(alpha, x.len() - 1);
    let last = x[x.len() - 1];
    Ok(match dom.cap_strictness {
        CapStrictness::Strict => last > dom.cap_threshold,
        CapStrictness::NonStrict => last >= dom.cap_threshold,
    })
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&ai, &bi)| ai * bi).sum()
}

pub(crate) fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}
