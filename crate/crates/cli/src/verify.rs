//! The `verify` subcommand: run the library's invariants as a
//! self-contained property suite, print one machine-readable line per
//! check, and report overall pass/fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revmap::embeddings::{embed, last_coordinate, round_trip_check, EmbeddingConfig};
use revmap::model::{build_ansatz, forward, AnsatzKind};
use revmap::optimize::{minimize, Method};
use revmap::projections::{domain_of, Alpha};
use revmap::simulator::{circuit_unitary, init_state_real};
use revmap::symmetry::{
    build_flip_representation, check_embedding_equivariance, is_equivariant_matrix, max_abs_diff,
    twirl, CMat, Representation,
};
use revmap::training::strict_flip_permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "fast" => Some(Level::Fast),
            "full" => Some(Level::Full),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

fn named_alphas() -> [Alpha<f64>; 4] {
    [Alpha::gnomonic(), Alpha::stereographic(), Alpha::twilight(), Alpha::orthographic()]
}

fn random_in_domain(rng: &mut ChaCha8Rng, alpha: Alpha<f64>, n: usize) -> Vec<f64> {
    let radius = domain_of(alpha, n).radius.unwrap_or(2.0);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = rng.gen_range(0.0..0.95 * radius);
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v *= target / nrm);
    }
    x
}

fn sphere_round_trip() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for alpha in named_alphas() {
        for _ in 0..50 {
            let x = random_in_domain(&mut rng, alpha, 8);
            match round_trip_check(alpha, &x) {
                Ok(err) => worst = worst.max(err),
                Err(e) => {
                    return check("sphere_round_trip", false, format!("embed failed: {e}"))
                }
            }
        }
    }
    check("sphere_round_trip", worst < 1e-9, format!("max residual {worst:.3e}"))
}

fn unit_norm_totality() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for alpha in named_alphas() {
        let cfg = EmbeddingConfig::unscaled(alpha);
        for _ in 0..50 {
            // any finite input, including far outside the clamp boundary
            let x: Vec<f64> = (0..16).map(|_| rng.gen_range(-40.0..40.0)).collect();
            match embed(&cfg, &x) {
                Ok(e) => worst = worst.max((e.norm() - 1.0).abs()),
                Err(e) => return check("unit_norm_totality", false, format!("embed failed: {e}")),
            }
        }
    }
    check("unit_norm_totality", worst < 1e-9, format!("max norm error {worst:.3e}"))
}

/// The last-coordinate quadratic with the linear coefficient corrupted
/// from `-2 alpha s^2` to `-2 alpha s`. Used as an injected fault: the
/// corrupted formula must fail exactly where the coefficient analysis
/// predicts.
fn corrupted_last_coordinate(alpha: f64, s: f64) -> Result<f64, String> {
    let qa = s * s + (1.0 - alpha) * (1.0 - alpha);
    let qb = -2.0 * alpha * s; // corrupted: should be -2 alpha s^2
    let qc = s * s * alpha * alpha - (1.0 - alpha) * (1.0 - alpha);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(format!("negative discriminant {disc:.3e}"));
    }
    Ok((-qb + disc.sqrt()) / (2.0 * qa))
}

fn injected_fault_detected() -> CheckResult {
    // stereographic at s = 3: the corrupted discriminant goes negative,
    // while the correct formula solves cleanly
    let corrupted = corrupted_last_coordinate(-1.0, 3.0);
    let correct = last_coordinate(Alpha::stereographic(), 3.0);
    let negative_disc = corrupted.is_err() && correct.is_ok();

    // where the corrupted formula does produce a value, it breaks the
    // round trip: the resulting point is off the unit sphere
    let mut off_sphere = false;
    for s in [0.5f64, 1.2, 2.0] {
        if let Ok(t) = corrupted_last_coordinate(-1.0, s) {
            let correct = last_coordinate(Alpha::stereographic(), s).unwrap();
            if (t - correct).abs() > 1e-6 {
                off_sphere = true;
            }
        }
    }
    check(
        "injected_fault_detected",
        negative_disc && off_sphere,
        format!("negative_disc={negative_disc} wrong_value={off_sphere}"),
    )
}

fn twirl_projection() -> CheckResult {
    let rep = build_flip_representation::<f64>(1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let dim = rep.dim();
    let mut u = CMat::<f64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            u[[i, j]] = num_complex_from(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let t = match twirl(&rep, &u) {
        Ok(t) => t,
        Err(e) => return check("twirl_projection", false, e.to_string()),
    };
    let tt = twirl(&rep, &t).unwrap();
    let idem = max_abs_diff(&t, &tt);
    let equiv = is_equivariant_matrix(&rep, &t, 1e-10).unwrap();
    check(
        "twirl_projection",
        idem < 1e-12 && equiv,
        format!("idempotence residual {idem:.3e}, equivariant={equiv}"),
    )
}

fn num_complex_from(re: f64, im: f64) -> num_complex::Complex<f64> {
    num_complex::Complex::new(re, im)
}

fn ansatz_structure() -> CheckResult {
    let he = match build_ansatz::<f64>(AnsatzKind::HardwareEfficient, 8) {
        Ok(s) => s,
        Err(e) => return check("ansatz_structure", false, e.to_string()),
    };
    let eq = match build_ansatz::<f64>(AnsatzKind::Equivariant, 8) {
        Ok(s) => s,
        Err(e) => return check("ansatz_structure", false, e.to_string()),
    };
    let shape_ok = he.gates.len() == 39
        && he.param_count == 32
        && eq.gates.len() == 39
        && eq.param_count == 32;
    check(
        "ansatz_structure",
        shape_ok,
        format!(
            "he gates={} params={}, eq gates={} params={}",
            he.gates.len(),
            he.param_count,
            eq.gates.len(),
            eq.param_count
        ),
    )
}

fn circuit_equivariance(param_sets: usize) -> CheckResult {
    let rep = build_flip_representation::<f64>(4, 4);
    let spec = match build_ansatz::<f64>(AnsatzKind::Equivariant, 8) {
        Ok(s) => s,
        Err(e) => return check("circuit_equivariance", false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst: f64 = 0.0;
    for _ in 0..param_sets {
        let params: Vec<f64> = (0..spec.param_count)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let u = match circuit_unitary(&spec.gates, &params, 8) {
            Ok(u) => u,
            Err(e) => return check("circuit_equivariance", false, e.to_string()),
        };
        let g = &rep.elements()[1];
        worst = worst.max(max_abs_diff(&g.dot(&u), &u.dot(g)));
    }
    check(
        "circuit_equivariance",
        worst <= 1e-10,
        format!("{param_sets} parameter sets, max commutator entry {worst:.3e}"),
    )
}

fn prediction_flip_invariance() -> CheckResult {
    let spec = match build_ansatz::<f64>(AnsatzKind::Equivariant, 8) {
        Ok(s) => s,
        Err(e) => return check("prediction_flip_invariance", false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let params: Vec<f64> = (0..spec.param_count)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let amps: Vec<f64> = {
        let mut v: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        v
    };
    let flipped: Vec<f64> = (0..256).map(|i| amps[i ^ 240]).collect();
    let p = forward(&spec, &params, &init_state_real(&amps).unwrap())
        .unwrap()
        .probability;
    let pf = forward(&spec, &params, &init_state_real(&flipped).unwrap())
        .unwrap()
        .probability;
    let gap = (pf - p).abs();
    check("prediction_flip_invariance", gap < 1e-9, format!("|p(flip) - p| = {gap:.3e}"))
}

fn optimizer_sanity() -> CheckResult {
    let mut f = |x: &[f64]| x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum::<f64>();
    let res = match minimize(&mut f, &[1.0, -1.0], Method::NelderMead, 200, 1) {
        Ok(r) => r,
        Err(e) => return check("optimizer_sanity", false, e.to_string()),
    };
    check(
        "optimizer_sanity",
        res.best_loss < 1e-6,
        format!("best loss {:.3e}", res.best_loss),
    )
}

/// Full-level sweep: exact equivariance of every named embedding at the
/// experiment's real dimension (n = 255) under the strict flip symmetry.
fn equivariance_sweep_255() -> CheckResult {
    let perm = strict_flip_permutation();
    let mut flip = CMat::<f64>::zeros((255, 255));
    for i in 0..255 {
        flip[[perm[i], i]] = num_complex_from(1.0, 0.0);
    }
    let rep = match Representation::z2(flip) {
        Ok(r) => r,
        Err(e) => return check("equivariance_sweep_255", false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for alpha in named_alphas() {
        match check_embedding_equivariance(&rep, alpha, 20, 106) {
            Ok(w) => worst = worst.max(w),
            Err(e) => return check("equivariance_sweep_255", false, e.to_string()),
        }
    }
    check("equivariance_sweep_255", worst < 1e-9, format!("max deviation {worst:.3e}"))
}

/// Run the suite; `Full` adds the n = 255 equivariance sweep and widens
/// the circuit-equivariance sampling.
pub fn run_verify(level: Level) -> Vec<CheckResult> {
    let mut results = vec![
        sphere_round_trip(),
        unit_norm_totality(),
        injected_fault_detected(),
        twirl_projection(),
        ansatz_structure(),
        circuit_equivariance(if level == Level::Full { 20 } else { 3 }),
        prediction_flip_invariance(),
        optimizer_sanity(),
    ];
    if level == Level::Full {
        results.push(equivariance_sweep_255());
    }
    results
}

/// Print one line per check plus a summary line; returns overall pass.
pub fn print_report(results: &[CheckResult]) -> bool {
    let mut failures = 0usize;
    for r in results {
        let status = if r.passed { "pass" } else { "fail" };
        println!("check={} status={status} detail=\"{}\"", r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    let overall = failures == 0;
    println!(
        "result={} checks={} failures={failures}",
        if overall { "pass" } else { "fail" },
        results.len()
    );
    overall
}
