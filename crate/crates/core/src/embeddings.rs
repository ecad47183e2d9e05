//! Reverse map projections `E_alpha : R^n -> S_{R^{n+1}}`.
//!
//! `E_alpha` inverts the restricted projection `P_alpha` on `R_alpha` and
//! clamps points outside `R_alpha` onto the boundary sphere, so the map is
//! total. The last coordinate has the closed form
//!
//! ```text
//! E_alpha(x)_n = (-B + sqrt(B^2 - 4AC)) / (2A)
//! A = s^2 + (1 - alpha)^2,  B = -2 alpha s^2,  C = s^2 alpha^2 - (1 - alpha)^2
//! ```
//!
//! where `s = ||x||` inside `R_alpha` and `s = radius(alpha)` otherwise.
//! Note the middle coefficient: deriving the quadratic from the defining
//! constraint `t^2 = 1 - ((t - alpha) / (1 - alpha))^2 s^2` gives
//! `B = -2 alpha s^2`. The form `-2 alpha s` sometimes quoted for this
//! family produces a negative discriminant for valid inputs (for example
//! `alpha = -1`, `s = 3`) and is an erratum; see `docs/errata.md`.
//!
//! For `alpha = -inf` the last coordinate is `sqrt(1 - s^2)`, which is `0`
//! for clamped inputs (`s = 1`). The value `1` occasionally quoted for the
//! clamped orthographic case would break the unit-norm invariant and is
//! the second erratum recorded in `docs/errata.md`.

use crate::projections::{domain_of, p_alpha, Alpha, ProjectionError};
use crate::Real;

/// Discriminant values above this (negative) bound are clamped to zero;
/// absorbs floating-point noise at the boundary of `R_alpha` where the
/// true discriminant vanishes.
pub const DISCRIMINANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("effective norm {s} exceeds the domain bound {bound}")]
    OutOfDomain { s: f64, bound: f64 },
    #[error("input contains NaN or infinite entries")]
    InvalidInput,
    #[error("cannot amplitude-embed a (near-)zero vector")]
    ZeroVector,
    #[error("dimension must be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("expected vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("scale divisor M must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Which `E_alpha` to use and the divisor `M` applied to raw data first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig<T> {
    pub alpha: Alpha<T>,
    pub scale_m: T,
}

impl<T: Real> EmbeddingConfig<T> {
    pub fn new(alpha: Alpha<T>, scale_m: T) -> Result<Self, EmbeddingError> {
        if !(scale_m > T::zero()) {
            return Err(EmbeddingError::NonPositiveScale(
                scale_m.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(EmbeddingConfig { alpha, scale_m })
    }

    /// No scaling (`M = 1`).
    pub fn unscaled(alpha: Alpha<T>) -> Self {
        EmbeddingConfig { alpha, scale_m: T::one() }
    }
}

/// A unit vector in `R^{n+1}` produced by an embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedVector<T> {
    pub coords: Vec<T>,
}

impl<T: Real> EmbeddedVector<T> {
    pub fn norm(&self) -> T {
        crate::projections::norm(&self.coords)
    }
}

/// The closed-form last coordinate `E_alpha(x)_n` as a function of the
/// effective norm `s`.
///
/// `s` must not exceed `radius(alpha)` (plus a small slack) when the
/// radius is finite; clamping to the boundary happens in [`embed`], not
/// here.
pub fn last_coordinate<T: Real>(alpha: Alpha<T>, s: T) -> Result<T, EmbeddingError> {
    let slack = T::from_f64(1e-12).unwrap();
    match alpha {
        Alpha::NegInfinity => {
            if s > T::one() + slack {
                return Err(EmbeddingError::OutOfDomain {
                    s: s.to_f64().unwrap_or(f64::NAN),
                    bound: 1.0,
                });
            }
            Ok((T::one() - s * s).max(T::zero()).sqrt())
        }
        Alpha::Finite(a) => {
            if let Some(radius) = domain_of(alpha, 1).radius {
                if s > radius + slack {
                    return Err(EmbeddingError::OutOfDomain {
                        s: s.to_f64().unwrap_or(f64::NAN),
                        bound: radius.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            let one_minus = T::one() - a;
            let s2 = s * s;
            let qa = s2 + one_minus * one_minus;
            let qb = -(a + a) * s2;
            let qc = s2 * a * a - one_minus * one_minus;
            let mut disc = qb * qb - T::from_f64(4.0).unwrap() * qa * qc;
            if disc < T::zero() {
                debug_assert!(disc > -T::from_f64(DISCRIMINANT_TOL).unwrap());
                disc = T::zero();
            }
            Ok((-qb + disc.sqrt()) / (qa + qa))
        }
    }
}

/// Embed `x_raw` onto the unit sphere of `R^{n+1}`.
///
/// The raw vector is first divided by `M`; if the result lies outside
/// `R_alpha` it is scaled onto the boundary sphere before inverting the
/// projection, which makes the map total.
pub fn embed<T: Real>(
    cfg: &EmbeddingConfig<T>,
    x_raw: &[T],
) -> Result<EmbeddedVector<T>, EmbeddingError> {
    if x_raw.is_empty() || x_raw.iter().any(|v| !v.is_finite()) {
        return Err(EmbeddingError::InvalidInput);
    }
    let mut x: Vec<T> = x_raw.iter().map(|&v| v / cfg.scale_m).collect();
    let mut s = crate::projections::norm(&x);
    if let Some(radius) = domain_of(cfg.alpha, x.len()).radius {
        if s > radius {
            // beta-clamp onto the boundary of R_alpha
            let beta = radius / s;
            x.iter_mut().for_each(|v| *v = *v * beta);
            s = radius;
        }
    }
    let t = last_coordinate(cfg.alpha, s)?;
    let mut coords = match cfg.alpha {
        Alpha::NegInfinity => x,
        Alpha::Finite(a) => {
            let scale = (t - a) / (T::one() - a);
            x.iter().map(|&v| scale * v).collect()
        }
    };
    coords.push(t);
    Ok(EmbeddedVector { coords })
}

/// Amplitude embedding: normalize `x_raw` and use the entries directly as
/// amplitudes. Scalar multiples of a data point are identified, so all
/// norm information is lost.
pub fn amplitude_embed<T: Real>(
    x_raw: &[T],
    dim: usize,
) -> Result<EmbeddedVector<T>, EmbeddingError> {
    if !dim.is_power_of_two() {
        return Err(EmbeddingError::NotPowerOfTwo(dim));
    }
    if x_raw.len() != dim {
        return Err(EmbeddingError::LengthMismatch { expected: dim, got: x_raw.len() });
    }
    if x_raw.iter().any(|v| !v.is_finite()) {
        return Err(EmbeddingError::InvalidInput);
    }
    let nrm = crate::projections::norm(x_raw);
    if nrm < T::from_f64(1e-15).unwrap() {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok(EmbeddedVector { coords: x_raw.iter().map(|&v| v / nrm).collect() })
}

/// Max-norm residual of the round trip `P_alpha(E_alpha(x)) - x` with
/// `M = 1`. Validation utility for the bijection.
pub fn round_trip_check<T: Real>(alpha: Alpha<T>, x: &[T]) -> Result<T, EmbeddingError> {
    let embedded = embed(&EmbeddingConfig::unscaled(alpha), x)?;
    let back = p_alpha(alpha, &embedded.coords)?;
    Ok(back
        .iter()
        .zip(x)
        .map(|(&b, &v)| (b - v).abs())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type A = Alpha<f64>;

    /// Independent oracle: intersect the line through `(0, ..., 0, alpha)`
    /// and `(x, 1)` with the unit sphere by bisection on the line
    /// parameter, selecting the solution inside the cap `S_alpha`.
    ///
    /// Works directly from the geometric definition; shares no code with
    /// `last_coordinate`.
    pub(crate) fn last_coordinate_bisection(alpha: f64, s: f64) -> f64 {
        // point on the line: (lambda * s, alpha + lambda * (1 - alpha)),
        // reduced to the 2D plane spanned by x and the axis.
        let radius_sq = |lambda: f64| {
            let u = lambda * s;
            let v = alpha + lambda * (1.0 - alpha);
            u * u + v * v
        };
        // The cap solution is the one with the larger line parameter.
        // Find the parameter of minimal radius, then bisect on the far side.
        // radius_sq is a quadratic in lambda with minimum at lambda_min.
        let qa = s * s + (1.0 - alpha) * (1.0 - alpha);
        let lambda_min = -alpha * (1.0 - alpha) / qa;
        let mut lo = lambda_min;
        let mut hi = lambda_min.max(1.0) + 1.0;
        // expand until the sphere is bracketed
        while radius_sq(hi) < 1.0 {
            hi *= 2.0;
        }
        assert!(
            radius_sq(lo) <= 1.0 + 1e-9,
            "line does not reach the sphere: alpha={alpha} s={s}"
        );
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if radius_sq(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        alpha + lambda * (1.0 - alpha)
    }

    #[test]
    fn last_coordinate_gnomonic_unit_norm() {
        let t = last_coordinate(A::gnomonic(), 1.0).unwrap();
        assert!((t - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn last_coordinate_stereographic_equator() {
        // stereographic closed form (4 - s^2) / (4 + s^2) at s = 2
        let t = last_coordinate(A::stereographic(), 2.0).unwrap();
        assert!(t.abs() < 1e-12);
    }

    #[test]
    fn last_coordinate_orthographic_pythagorean() {
        let t = last_coordinate(A::orthographic(), 0.6).unwrap();
        assert!((t - 0.8).abs() < 1e-12);
    }

    #[test]
    fn last_coordinate_boundary_double_root() {
        // at s = radius(alpha) the discriminant vanishes and t = 1/alpha;
        // sqrt of the near-zero discriminant amplifies rounding, so the
        // tolerance is sqrt-of-epsilon scale rather than epsilon scale
        let t = last_coordinate(A::finite(-2.0).unwrap(), 3.0f64.sqrt()).unwrap();
        assert!((t - (-0.5)).abs() < 1e-6);
    }

    #[test]
    fn last_coordinate_out_of_domain() {
        assert!(matches!(
            last_coordinate(A::finite(-2.0).unwrap(), 2.0),
            Err(EmbeddingError::OutOfDomain { .. })
        ));
        assert!(matches!(
            last_coordinate(A::orthographic(), 1.1),
            Err(EmbeddingError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn last_coordinate_matches_bisection_oracle() {
        let alphas = [0.0, -1.0, -1.0 - 2.0f64.sqrt() / 2.0, -5.0, 0.5, -0.3];
        for &a in &alphas {
            let alpha = A::finite(a).unwrap();
            let bound = domain_of(alpha, 1).radius.map(|r| r * 0.999).unwrap_or(10.0);
            for i in 0..200 {
                let s = bound * i as f64 / 199.0;
                let t = last_coordinate(alpha, s).unwrap();
                let oracle = last_coordinate_bisection(a, s);
                assert!(
                    (t - oracle).abs() < 1e-9,
                    "alpha={a} s={s} t={t} oracle={oracle}"
                );
            }
        }
    }

    #[test]
    fn embed_gnomonic_unit_input() {
        let cfg = EmbeddingConfig::unscaled(A::gnomonic());
        let e = embed(&cfg, &[1.0, 0.0]).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert!((e.coords[0] - r).abs() < 1e-12);
        assert!(e.coords[1].abs() < 1e-12);
        assert!((e.coords[2] - r).abs() < 1e-12);
    }

    #[test]
    fn embed_stereographic_equator_point() {
        let cfg = EmbeddingConfig::unscaled(A::stereographic());
        let e = embed(&cfg, &[2.0, 0.0]).unwrap();
        assert!((e.coords[0] - 1.0).abs() < 1e-12);
        assert!(e.coords[1].abs() < 1e-12);
        assert!(e.coords[2].abs() < 1e-12);
    }

    #[test]
    fn embed_zero_is_north_pole() {
        for alpha in A::named_instances() {
            let e = embed(&EmbeddingConfig::unscaled(alpha), &[0.0, 0.0, 0.0]).unwrap();
            assert!(e.coords[..3].iter().all(|v| v.abs() < 1e-12));
            assert!((e.coords[3] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_orthographic_clamps_to_equator() {
        let cfg = EmbeddingConfig::unscaled(A::orthographic());
        let e = embed(&cfg, &[3.0, 4.0]).unwrap();
        assert!((e.coords[0] - 0.6).abs() < 1e-12);
        assert!((e.coords[1] - 0.8).abs() < 1e-12);
        assert!(e.coords[2].abs() < 1e-12);
        assert!((e.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embed_rejects_non_finite() {
        let cfg = EmbeddingConfig::unscaled(A::gnomonic());
        assert_eq!(embed(&cfg, &[f64::NAN]), Err(EmbeddingError::InvalidInput));
        assert_eq!(embed(&cfg, &[f64::INFINITY]), Err(EmbeddingError::InvalidInput));
    }

    #[test]
    fn clamp_saturation_constant_along_rays() {
        let cfg = EmbeddingConfig::unscaled(A::finite(-3.0).unwrap());
        let base = [1.5, -0.9, 2.2];
        let a = embed(&cfg, &base).unwrap();
        for c in [1.0f64, 2.0, 17.5] {
            let scaled: Vec<f64> = base.iter().map(|v| v * c).collect();
            let b = embed(&cfg, &scaled).unwrap();
            for (u, v) in a.coords.iter().zip(&b.coords) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn amplitude_embed_normalizes() {
        let e = amplitude_embed(&[3.0, 4.0, 0.0, 0.0], 4).unwrap();
        assert_eq!(e.coords, vec![0.6, 0.8, 0.0, 0.0]);
        let unit = amplitude_embed(&[1.0, 0.0], 2).unwrap();
        assert_eq!(unit.coords, vec![1.0, 0.0]);
    }

    #[test]
    fn amplitude_embed_identifies_scalar_multiples() {
        let x = [0.5, -2.0, 1.0, 0.25];
        let a = amplitude_embed(&x, 4).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * 37.0).collect();
        let b = amplitude_embed(&scaled, 4).unwrap();
        for (u, v) in a.coords.iter().zip(&b.coords) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn amplitude_embed_rejects_zero_and_bad_dims() {
        assert_eq!(amplitude_embed(&[0.0, 0.0], 2), Err(EmbeddingError::ZeroVector));
        assert!(matches!(amplitude_embed(&[1.0, 0.0, 0.0], 3), Err(EmbeddingError::NotPowerOfTwo(3))));
        assert!(matches!(
            amplitude_embed(&[1.0], 2),
            Err(EmbeddingError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn round_trip_examples() {
        assert!(round_trip_check(A::stereographic(), &[0.6667]).unwrap() <= 1e-10);
        assert_eq!(round_trip_check(A::gnomonic(), &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn inverse_pair_both_directions() {
        // E then P over R_alpha, and P then E over S_alpha
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for alpha in [A::gnomonic(), A::stereographic(), A::twilight(), A::finite(-5.0).unwrap(), A::orthographic()] {
            let dom = domain_of(alpha, 3);
            let bound = dom.radius.unwrap_or(5.0) * 0.99;
            for _ in 0..100 {
                let dir: Vec<f64> = (0..3).map(|_| next()).collect();
                let nrm = crate::projections::norm(&dir);
                if nrm < 1e-6 {
                    continue;
                }
                let r = bound * (0.5 * (next() + 1.0));
                let x: Vec<f64> = dir.iter().map(|v| v / nrm * r).collect();
                assert!(round_trip_check(alpha, &x).unwrap() <= 1e-9);

                // other direction: y in S_alpha -> embed(p_alpha(y)) = y
                let y = embed(&EmbeddingConfig::unscaled(alpha), &x).unwrap().coords;
                let projected = p_alpha(alpha, &y).unwrap();
                let back = embed(&EmbeddingConfig::unscaled(alpha), &projected).unwrap().coords;
                for (u, v) in y.iter().zip(&back) {
                    assert!((u - v).abs() < 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn unit_norm_for_all_inputs(
            xs in proptest::collection::vec(-1e4f64..1e4, 1..12),
            idx in 0usize..5,
            m in 1e-3f64..1e4,
        ) {
            let alpha = [A::gnomonic(), A::stereographic(), A::twilight(), A::finite(-5.0).unwrap(), A::orthographic()][idx];
            let cfg = EmbeddingConfig::new(alpha, m).unwrap();
            let e = embed(&cfg, &xs).unwrap();
            prop_assert!((e.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn last_coordinate_depends_on_norm_only(
            dir in proptest::collection::vec(-1.0f64..1.0, 2..8),
            r in 0.0f64..0.95,
        ) {
            let nrm = crate::projections::norm(&dir);
            prop_assume!(nrm > 1e-3);
            let x: Vec<f64> = dir.iter().map(|v| v / nrm * r).collect();
            for alpha in A::named_instances() {
                let e = embed(&EmbeddingConfig::unscaled(alpha), &x).unwrap();
                let t = last_coordinate(alpha, r).unwrap();
                prop_assert!((e.coords.last().unwrap() - t).abs() < 1e-10);
            }
        }
    }
}
