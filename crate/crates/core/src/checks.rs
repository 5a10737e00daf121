//! The named machine checks that back each topology relation, and a runner
//! that executes them all with one configuration.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::corpus;
use crate::l2::examples::{verify_example3, verify_example4, verify_example5, DEFAULT_R_GRID};
use crate::l2::squeeze::{
    prescribed_squeeze_families, squeeze_sot_check, squeeze_test_vectors, vigier_check, PRESCRIBED_N_MAX,
    PRESCRIBED_TARGET,
};
use crate::l2::{sot_residual, test_vectors, wot_residual, OperatorFamily};
use crate::numerics::random::{effect, projection, unit_vector, vector};
use crate::numerics::{
    inner, interval_membership, norm, prop6_identity_check, sqrt_psd, Effect, HermitianMatrix, Tolerances,
};
use crate::topology::{
    compare_topologies, interval_topology, order_topology, TopologyComparison, DEFAULT_POWERSET_CAP,
};

pub const FINITE_INTERVAL_ORDER: &str = "finite.interval_weaker_than_order";
pub const EX3_NORM: &str = "ex3.norm_distance";
pub const EX3_GRID: &str = "ex3.contradiction_grid";
pub const EX4_SOT: &str = "ex4.sot_residual";
pub const EX4_WOT: &str = "ex4.wot_residual";
pub const EX4_NORM: &str = "ex4.norm_distance";
pub const EX5_NORM: &str = "ex5.norm_distance";
pub const EX5_GRID: &str = "ex5.lower_bound_grid";
pub const EX5_BOUNDARY: &str = "ex5.boundary";
pub const PROJECTION_IDENTITY: &str = "projection_identity.residual";
pub const VIGIER: &str = "vigier.monotone_convergence";
pub const SQUEEZE: &str = "squeeze.sot_pipeline";
pub const INTERVAL_WOT: &str = "interval_wot.instances";
pub const SOT_WOT: &str = "sot_implies_wot.cauchy_schwarz";

pub const ALL_CHECKS: [&str; 14] = [
    FINITE_INTERVAL_ORDER,
    EX3_NORM,
    EX3_GRID,
    EX4_SOT,
    EX4_WOT,
    EX4_NORM,
    EX5_NORM,
    EX5_GRID,
    EX5_BOUNDARY,
    PROJECTION_IDENTITY,
    VIGIER,
    SQUEEZE,
    INTERVAL_WOT,
    SOT_WOT,
];

pub const PROJECTION_IDENTITY_RESIDUAL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub tol: Tolerances,
    pub seed: u64,
    pub finite_carrier_cap: usize,
    pub ex3_n_max: usize,
    pub ex3_c_steps: usize,
    pub ex4_n_max: usize,
    pub ex5_n_max: usize,
    pub ex5_r_grid: Vec<f64>,
    pub identity_trials: usize,
    pub squeeze_n_max: usize,
    pub squeeze_target: f64,
    pub interval_trials: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            seed: 0,
            finite_carrier_cap: DEFAULT_POWERSET_CAP,
            ex3_n_max: 1000,
            ex3_c_steps: 100,
            ex4_n_max: 10_000,
            ex5_n_max: 1000,
            ex5_r_grid: DEFAULT_R_GRID.to_vec(),
            identity_trials: 1000,
            squeeze_n_max: PRESCRIBED_N_MAX,
            squeeze_target: PRESCRIBED_TARGET,
            interval_trials: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub summary: String,
}

impl CheckOutcome {
    pub fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

/// Outcomes keyed by check id, iterated in id order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CheckResults(pub BTreeMap<String, CheckOutcome>);

impl CheckResults {
    pub fn get(&self, id: &str) -> Option<&CheckOutcome> {
        self.0.get(id)
    }

    pub fn insert(&mut self, id: &str, outcome: CheckOutcome) {
        self.0.insert(id.to_string(), outcome);
    }

    pub fn all_passed(&self) -> bool {
        self.0.values().all(|o| o.passed)
    }

    /// Every check passing, for building reports in tests.
    pub fn all_passing() -> Self {
        let mut r = Self::default();
        for id in ALL_CHECKS {
            r.insert(id, CheckOutcome::new(true, "assumed"));
        }
        r
    }
}

pub fn run_all(cfg: &CheckConfig) -> CheckResults {
    let mut r = CheckResults::default();
    r.insert(FINITE_INTERVAL_ORDER, finite_interval_weaker_than_order(cfg.finite_carrier_cap));
    run_example3(cfg, &mut r);
    run_example4(cfg, &mut r);
    run_example5(cfg, &mut r);
    r.insert(PROJECTION_IDENTITY, projection_identity(cfg.identity_trials, cfg.seed));
    run_squeeze(cfg, &mut r);
    r.insert(INTERVAL_WOT, interval_wot_instances(cfg.interval_trials, cfg.seed, &cfg.tol));
    r.insert(SOT_WOT, sot_implies_wot(cfg.seed));
    r
}

/// Interval closed sets are order closed, and both topologies are discrete,
/// on every corpus algebra whose carrier fits the power-set cap.
pub fn finite_interval_weaker_than_order(cap: usize) -> CheckOutcome {
    let mut tested = 0;
    let mut failures = Vec::new();
    for alg in corpus().into_iter().filter(|a| a.len() <= cap) {
        let name = alg.name().to_string();
        let result = alg.validate().map_err(|e| e.to_string()).and_then(|v| {
            let order = order_topology(&v).map_err(|e| e.to_string())?;
            let interval = interval_topology(&v).map_err(|e| e.to_string())?;
            let cmp = compare_topologies(&order, &interval).map_err(|e| e.to_string())?;
            Ok(interval.is_subfamily_of(&order)
                && matches!(cmp, TopologyComparison::Equal | TopologyComparison::Finer)
                && order.is_discrete()
                && interval.is_discrete())
        });
        tested += 1;
        match result {
            Ok(true) => {}
            Ok(false) => failures.push(name),
            Err(e) => failures.push(format!("{name} ({e})")),
        }
    }
    if failures.is_empty() {
        CheckOutcome::new(
            tested > 0,
            format!("{tested} algebras: interval closed sets are order closed, both discrete"),
        )
    } else {
        CheckOutcome::new(false, format!("failed on {}", failures.join(", ")))
    }
}

fn run_example3(cfg: &CheckConfig, r: &mut CheckResults) {
    match verify_example3(cfg.ex3_n_max, cfg.ex3_c_steps, &cfg.tol) {
        Ok(rep) => {
            r.insert(
                EX3_NORM,
                CheckOutcome::new(
                    rep.norm.passed,
                    format!(
                        "n <= {}: max |norm - sin(1/n)| = {:.3e}, monotone {}",
                        cfg.ex3_n_max, rep.norm.max_error, rep.norm.monotone
                    ),
                ),
            );
            r.insert(
                EX3_GRID,
                CheckOutcome::new(
                    rep.grid_failures.is_empty() && rep.grid_points > 0 && rep.boundary_psd,
                    format!(
                        "{} grid points, {} not contradicted, max determinant error {:.3e}, c = 1 boundary PSD {}",
                        rep.grid_points,
                        rep.grid_failures.len(),
                        rep.max_determinant_error,
                        rep.boundary_psd
                    ),
                ),
            );
        }
        Err(e) => {
            r.insert(EX3_NORM, CheckOutcome::error(&e));
            r.insert(EX3_GRID, CheckOutcome::error(&e));
        }
    }
}

fn run_example4(cfg: &CheckConfig, r: &mut CheckResults) {
    match verify_example4(cfg.ex4_n_max, cfg.seed) {
        Ok(rep) => {
            let n = cfg.ex4_n_max;
            r.insert(
                EX4_SOT,
                CheckOutcome::new(
                    rep.sot_failures.is_empty() && n >= 2,
                    format!("2 <= n <= {n}: ||P_n e1 - P_0 e1|| = 1/2 except at {} points", rep.sot_failures.len()),
                ),
            );
            r.insert(
                EX4_WOT,
                CheckOutcome::new(
                    rep.wot_failures.is_empty() && n >= 2,
                    format!(
                        "{} test vectors: weak residual exactly 0 past the support, {} exceptions",
                        rep.test_vectors,
                        rep.wot_failures.len()
                    ),
                ),
            );
            r.insert(
                EX4_NORM,
                CheckOutcome::new(
                    rep.norm_failures.is_empty() && n >= 2,
                    format!("2 <= n <= {n}: ||P_n - P_0|| >= 1/2 except at {} points", rep.norm_failures.len()),
                ),
            );
        }
        Err(e) => {
            for id in [EX4_SOT, EX4_WOT, EX4_NORM] {
                r.insert(id, CheckOutcome::error(&e));
            }
        }
    }
}

fn run_example5(cfg: &CheckConfig, r: &mut CheckResults) {
    match verify_example5(cfg.ex5_n_max, &cfg.ex5_r_grid, &cfg.tol) {
        Ok(rep) => {
            r.insert(
                EX5_NORM,
                CheckOutcome::new(
                    rep.norm.passed,
                    format!(
                        "n <= {}: max |norm - sin(1/n)| = {:.3e}, monotone {}",
                        cfg.ex5_n_max, rep.norm.max_error, rep.norm.monotone
                    ),
                ),
            );
            r.insert(
                EX5_GRID,
                CheckOutcome::new(
                    rep.grid_failures.is_empty() && rep.grid_points > 0,
                    format!("{} grid points, diag(r, 0) <= P_n held at {}", rep.grid_points, rep.grid_failures.len()),
                ),
            );
            r.insert(
                EX5_BOUNDARY,
                CheckOutcome::new(
                    rep.boundary_holds,
                    format!(
                        "diag(0, 0) <= P_n for n <= {}: {}; |(P_n e1, e1)| = {:.6} at n = {}",
                        cfg.ex5_n_max, rep.boundary_holds, rep.weak_pairing_with_zero, cfg.ex5_n_max
                    ),
                ),
            );
        }
        Err(e) => {
            for id in [EX5_NORM, EX5_GRID, EX5_BOUNDARY] {
                r.insert(id, CheckOutcome::error(&e));
            }
        }
    }
}

/// The projection identity `||(P - Q)x||^2 = (Px,x) - (Px,Qx) - (Qx,Px) + (Qx,x)`
/// on random triples in dimensions 2 to 8.
pub fn projection_identity(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dim = rng.gen_range(2..=8);
        let p = projection(&mut rng, dim);
        let q = projection(&mut rng, dim);
        let x = vector(&mut rng, dim);
        match prop6_identity_check(&p, &q, &x) {
            Ok(res) => worst = worst.max(res),
            Err(e) => return CheckOutcome::error(e),
        }
    }
    CheckOutcome::new(
        trials > 0 && worst <= PROJECTION_IDENTITY_RESIDUAL,
        format!("{trials} random triples, max residual {worst:.3e}"),
    )
}

fn run_squeeze(cfg: &CheckConfig, r: &mut CheckResults) {
    let mut vigier = Vec::new();
    let mut squeeze = Vec::new();
    let mut vigier_ok = true;
    let mut squeeze_ok = true;
    for sf in prescribed_squeeze_families() {
        let vectors = squeeze_test_vectors(sf.dim, cfg.seed);
        match vigier_check(&sf, cfg.squeeze_n_max, &vectors, cfg.squeeze_target, &cfg.tol) {
            Ok(rep) => {
                vigier_ok &= rep.passed;
                let settled: Vec<String> =
                    rep.series.iter().map(|s| format!("{}@{}", s.chain, fmt_opt(s.settled_at))).collect();
                vigier.push(format!("{} {} ({})", sf.name, verdict(rep.passed), settled.join(" ")));
            }
            Err(e) => {
                vigier_ok = false;
                vigier.push(format!("{} error: {e}", sf.name));
            }
        }
        match squeeze_sot_check(&sf, cfg.squeeze_n_max, &vectors, cfg.squeeze_target, &cfg.tol) {
            Ok(rep) => {
                squeeze_ok &= rep.passed;
                let settled: Vec<String> =
                    rep.stages.iter().map(|s| format!("{}@{}", s.stage, fmt_opt(s.settled_at))).collect();
                squeeze.push(format!("{} {} ({})", sf.name, verdict(rep.passed), settled.join(" ")));
            }
            Err(e) => {
                squeeze_ok = false;
                squeeze.push(format!("{} error: {e}", sf.name));
            }
        }
    }
    let head = format!("n <= {}, target {:e}: ", cfg.squeeze_n_max, cfg.squeeze_target);
    r.insert(VIGIER, CheckOutcome::new(vigier_ok, head.clone() + &vigier.join("; ")));
    r.insert(SQUEEZE, CheckOutcome::new(squeeze_ok, head + &squeeze.join("; ")));
}

fn fmt_opt(n: Option<usize>) -> String {
    n.map_or_else(|| "never".to_string(), |n| n.to_string())
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Random intervals `[L, U]` and weakly convergent sequences inside them:
/// every member and the weak limit stay in the interval, and the quadratic
/// forms stay between those of the endpoints.
pub fn interval_wot_instances(trials: usize, seed: u64, tol: &Tolerances) -> CheckOutcome {
    const STEPS: usize = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51_7cc1);
    let mut failures = 0;
    let mut worst_tail: f64 = 0.0;
    for _ in 0..trials {
        let dim = rng.gen_range(1..=5);
        let lo = half(&effect(&mut rng, dim));
        let hi =
            Effect::trusted(lo.as_hermitian().try_add(half(&effect(&mut rng, dim)).as_hermitian()).expect("same dim"));
        let root = match sqrt_psd(&hi.as_hermitian().try_sub(lo.as_hermitian()).expect("same dim"), tol) {
            Ok(r) => r,
            Err(e) => return CheckOutcome::error(e),
        };
        let c = effect(&mut rng, dim);
        let d = effect(&mut rng, dim);
        let inside = |e: &Effect| -> Effect {
            let m = root.as_matrix();
            let s = &(m * e.as_matrix()) * m;
            Effect::trusted(lo.as_hermitian().try_add(&HermitianMatrix::hermitized(s)).expect("same dim"))
        };
        let limit = inside(&c);
        let x = unit_vector(&mut rng, dim);
        let y = unit_vector(&mut rng, dim);
        let mut ok = interval_membership(&limit, &lo, &hi, tol).unwrap_or(false);
        let mut last = 0.0;
        for n in 1..=STEPS {
            let t = 1.0 / n as f64;
            let cn =
                Effect::trusted(c.as_hermitian().scale(1.0 - t).try_add(&d.as_hermitian().scale(t)).expect("same dim"));
            let an = inside(&cn);
            ok &= interval_membership(&an, &lo, &hi, tol).unwrap_or(false);
            let q = an.as_hermitian().quadratic_form(&x);
            ok &= q >= lo.as_hermitian().quadratic_form(&x) - tol.tol_psd
                && q <= hi.as_hermitian().quadratic_form(&x) + tol.tol_psd;
            let diff = an.as_hermitian().try_sub(limit.as_hermitian()).expect("same dim");
            last = inner(&diff.apply(&x), &y).norm() * n as f64;
        }
        // the weak residual decays like 1/n
        worst_tail = worst_tail.max(last);
        ok &= last <= 4.0;
        if !ok {
            failures += 1;
        }
    }
    CheckOutcome::new(
        trials > 0 && failures == 0,
        format!("{trials} random intervals with weakly convergent sequences, {failures} escaped; max n * residual {worst_tail:.3}"),
    )
}

fn half(e: &Effect) -> Effect {
    Effect::trusted(e.as_hermitian().scale(0.5))
}

/// `|((A_n - A)x, y)| <= ||(A_n - A)x|| ||y||` along the norm-convergent
/// families and the squeeze scenarios, with both residuals tending to zero.
pub fn sot_implies_wot(seed: u64) -> CheckOutcome {
    let mut violations = 0;
    let mut pairs = 0;
    let vectors = test_vectors(seed);
    for fam in [OperatorFamily::Example3, OperatorFamily::Example5] {
        for n in (1..=1000).step_by(37) {
            for x in &vectors {
                let s = sot_residual(fam, n, x).unwrap_or(f64::INFINITY);
                for y in &vectors {
                    let w = wot_residual(fam, n, x, y).unwrap_or(f64::INFINITY);
                    pairs += 1;
                    if w > s * y.norm() + 1e-12 {
                        violations += 1;
                    }
                }
            }
        }
    }
    for sf in prescribed_squeeze_families() {
        let vs = squeeze_test_vectors(sf.dim, seed);
        for n in (1..=200).step_by(7) {
            let m = (sf.middle)(n);
            let diff = m.as_hermitian().try_sub(sf.limit.as_hermitian()).expect("same dim");
            for x in &vs {
                let dx = diff.apply(x);
                let s = norm(&dx);
                for y in &vs {
                    pairs += 1;
                    let w: Complex64 = inner(&dx, y);
                    if w.norm() > s * norm(y) + 1e-12 {
                        violations += 1;
                    }
                }
            }
        }
    }
    CheckOutcome::new(violations == 0, format!("{pairs} (n, x, y) triples, {violations} violations"))
}
