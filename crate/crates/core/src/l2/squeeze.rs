//! Sequences of effects squeezed between a rising lower chain and a falling
//! upper chain, with numerical checks of monotone strong convergence and of
//! the squeeze argument that carries it to the middle sequence.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::random::{unit_vector, unitary, with_spectrum};
use crate::numerics::{eig_sym, inner, loewner_leq, norm, Effect, HermitianMatrix, Matrix, NumericsError, Tolerances};

/// Slack allowed when a residual sequence is required to be non-increasing.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Decay exponent of the gap `n^-k` in the prescribed families.
pub const PRESCRIBED_DECAY: i32 = 4;
pub const PRESCRIBED_TARGET: f64 = 1e-6;
pub const PRESCRIBED_N_MAX: usize = 1000;
pub const RANDOM_TEST_VECTORS: usize = 16;

pub type EffectSequence = Arc<dyn Fn(usize) -> Effect + Send + Sync>;

/// `lower(n) <= middle(n) <= upper(n)` with `lower` rising and `upper` falling to `limit`.
///
/// `eigenbasis`, when present, is a unitary that diagonalises every member
/// of both chains and the limit.
#[derive(Clone)]
pub struct SqueezeFamily {
    pub name: String,
    pub dim: usize,
    pub lower: EffectSequence,
    pub upper: EffectSequence,
    pub middle: EffectSequence,
    pub limit: Effect,
    pub eigenbasis: Option<Matrix>,
}

impl std::fmt::Debug for SqueezeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SqueezeFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("limit", &self.limit)
            .field("commuting", &self.eigenbasis.is_some())
            .finish()
    }
}

fn gap(n: usize, decay: i32) -> f64 {
    (n as f64).powi(-decay)
}

impl SqueezeFamily {
    /// The constant family `A, A, A, ...`.
    pub fn constant(name: impl Into<String>, a: Effect) -> Self {
        let dim = a.dim();
        let seq: EffectSequence = {
            let a = a.clone();
            Arc::new(move |_| a.clone())
        };
        Self { name: name.into(), dim, lower: seq.clone(), upper: seq.clone(), middle: seq, limit: a, eigenbasis: None }
    }

    /// With the limit `U diag(d) U*`: `lower(n) = U diag(d (1 - t)) U*` and
    /// `upper(n) = U diag(d + (1 - d) t) U*`, `t = n^-decay`. The middle is their mean.
    pub fn spectral(name: impl Into<String>, u: Matrix, spectrum: Vec<f64>, decay: i32) -> Self {
        assert!(spectrum.iter().all(|d| (0.0..=1.0).contains(d)), "spectrum inside [0, 1]");
        assert_eq!(u.dim(), spectrum.len());
        let dim = u.dim();
        let limit = Effect::trusted(with_spectrum(&u, &spectrum));
        let lower: EffectSequence = {
            let (u, d) = (u.clone(), spectrum.clone());
            Arc::new(move |n| {
                let t = gap(n, decay);
                let vals: Vec<f64> = d.iter().map(|x| x * (1.0 - t)).collect();
                Effect::trusted(with_spectrum(&u, &vals))
            })
        };
        let upper: EffectSequence = {
            let (u, d) = (u.clone(), spectrum.clone());
            Arc::new(move |n| {
                let t = gap(n, decay);
                let vals: Vec<f64> = d.iter().map(|x| x + (1.0 - x) * t).collect();
                Effect::trusted(with_spectrum(&u, &vals))
            })
        };
        let middle: EffectSequence = {
            let (lo, hi) = (lower.clone(), upper.clone());
            Arc::new(move |n| mean(&lo(n), &hi(n)))
        };
        Self { name: name.into(), dim, lower, upper, middle, limit, eigenbasis: Some(u) }
    }

    /// `lower(n) = (1 - t) P`, `upper(n) = P + t (I - P)` for the projection onto `v`.
    pub fn scaled_projection(name: impl Into<String>, v: &[Complex64], decay: i32) -> Self {
        let dim = v.len();
        let mut cols = vec![v.iter().map(|z| z / norm(v)).collect::<Vec<_>>()];
        for k in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[k] = Complex64::new(1.0, 0.0);
            for c in &cols {
                let p = inner(&e, c);
                for (ei, ci) in e.iter_mut().zip(c) {
                    *ei -= p * ci;
                }
            }
            let n = norm(&e);
            if n > 1e-8 && cols.len() < dim {
                cols.push(e.into_iter().map(|z| z / n).collect());
            }
        }
        let mut u = Matrix::zeros(dim);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                u[(i, j)] = c[i];
            }
        }
        let mut spectrum = vec![0.0; dim];
        spectrum[0] = 1.0;
        Self::spectral(name, u, spectrum, decay)
    }

    /// Diagonal chains rising to `diag(limit)`.
    pub fn diagonal(name: impl Into<String>, limit: Vec<f64>, decay: i32) -> Self {
        let dim = limit.len();
        Self::spectral(name, Matrix::identity(dim), limit, decay)
    }

    /// Dimension 4, limit of rank 2 with spectrum `{1, 1/2, 0, 0}` in a seeded random basis.
    pub fn rank2_commuting(name: impl Into<String>, seed: u64, decay: i32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = unitary(&mut rng, 4);
        Self::spectral(name, u, vec![1.0, 0.5, 0.0, 0.0], decay)
    }

    /// An increasing chain read from data: `lower(n)` is the `n`-th member
    /// (the last one repeats), `middle = lower` and `upper` is the limit.
    pub fn from_chain(name: impl Into<String>, chain: Vec<Effect>, limit: Effect) -> Self {
        assert!(!chain.is_empty(), "chain needs at least one member");
        let dim = limit.dim();
        let diagonal = chain.iter().chain(std::iter::once(&limit)).all(|e| e.as_matrix().is_diagonal(0.0));
        let chain = Arc::new(chain);
        let lower: EffectSequence = Arc::new(move |n| chain[(n.max(1) - 1).min(chain.len() - 1)].clone());
        let upper: EffectSequence = {
            let l = limit.clone();
            Arc::new(move |_| l.clone())
        };
        Self {
            name: name.into(),
            dim,
            middle: lower.clone(),
            lower,
            upper,
            limit,
            eigenbasis: diagonal.then(|| Matrix::identity(dim)),
        }
    }

    pub fn with_middle(mut self, middle: EffectSequence) -> Self {
        self.middle = middle;
        self
    }
}

fn mean(a: &Effect, b: &Effect) -> Effect {
    let sum = a.as_hermitian().try_add(b.as_hermitian()).expect("same dimension");
    Effect::trusted(sum.scale(0.5))
}

/// The three scenarios used to exercise monotone convergence.
pub fn prescribed_squeeze_families() -> Vec<SqueezeFamily> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        SqueezeFamily::scaled_projection(
            "scaled-projection",
            &[Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, 0.0)],
            PRESCRIBED_DECAY,
        ),
        SqueezeFamily::diagonal("diagonal", vec![1.0, 0.5], PRESCRIBED_DECAY),
        SqueezeFamily::rank2_commuting("rank2-commuting", 7, PRESCRIBED_DECAY),
    ]
}

/// Basis vectors of `C^dim` followed by seeded random unit vectors.
pub fn squeeze_test_vectors(dim: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> =
        (0..dim).map(|k| (0..dim).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..RANDOM_TEST_VECTORS).map(|_| unit_vector(&mut rng, dim)));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub vector: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantViolation {
    pub relation: &'static str,
    pub n: usize,
    pub min_eigenvalue: f64,
}

/// `||(X(n) - A) x||` over the test vectors for one chain `X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSeries {
    pub chain: &'static str,
    /// Largest residual over the test vectors, for each `n` from 1.
    pub max_residual: Vec<f64>,
    pub monotone_required: bool,
    /// First `(n, vector)` whose residual exceeds the one at `n - 1`.
    pub monotone_violation: Option<Witness>,
    /// Smallest `N` with every residual from `N` on at most the target.
    pub settled_at: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupremumCoordinate {
    pub index: usize,
    pub limit: f64,
    pub sup_lower: f64,
    pub inf_upper: f64,
}

/// For commuting families, the limit read off as the coordinatewise supremum
/// of the lower chain and infimum of the upper chain in the common eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupremumCheck {
    pub diagonal_in_basis: bool,
    pub coordinates: Vec<SupremumCoordinate>,
    /// `max_i max(limit_i - lower_i(n_max), upper_i(n_max) - limit_i)`.
    pub final_gap: f64,
    pub bounds_hold: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VigierReport {
    pub family: String,
    pub dim: usize,
    pub n_max: usize,
    pub target: f64,
    pub test_vectors: usize,
    pub series: Vec<ResidualSeries>,
    pub invariant_violations: Vec<InvariantViolation>,
    pub supremum: Option<SupremumCheck>,
    pub passed: bool,
}

struct Sampled {
    lower: Vec<Effect>,
    upper: Vec<Effect>,
    middle: Vec<Effect>,
}

fn sample(sf: &SqueezeFamily, n_max: usize) -> Sampled {
    let collect = |f: &EffectSequence| (1..=n_max).map(|n| f(n)).collect::<Vec<_>>();
    Sampled { lower: collect(&sf.lower), upper: collect(&sf.upper), middle: collect(&sf.middle) }
}

fn leq_violation(
    relation: &'static str,
    n: usize,
    a: &Effect,
    b: &Effect,
    tol: &Tolerances,
) -> Result<Option<InvariantViolation>, NumericsError> {
    if loewner_leq(a.as_hermitian(), b.as_hermitian(), tol)? {
        return Ok(None);
    }
    let gap = b.as_hermitian().try_sub(a.as_hermitian())?;
    Ok(Some(InvariantViolation { relation, n, min_eigenvalue: gap.min_eigenvalue()? }))
}

fn invariant_violations(
    sf: &SqueezeFamily,
    s: &Sampled,
    tol: &Tolerances,
) -> Result<Vec<InvariantViolation>, NumericsError> {
    let mut out = Vec::new();
    for k in 0..s.lower.len() {
        let n = k + 1;
        let (l, m, u) = (&s.lower[k], &s.middle[k], &s.upper[k]);
        out.extend(leq_violation("lower <= middle", n, l, m, tol)?);
        out.extend(leq_violation("middle <= upper", n, m, u, tol)?);
        out.extend(leq_violation("lower <= limit", n, l, &sf.limit, tol)?);
        out.extend(leq_violation("limit <= upper", n, &sf.limit, u, tol)?);
        if k > 0 {
            out.extend(leq_violation("lower increasing", n, &s.lower[k - 1], l, tol)?);
            out.extend(leq_violation("upper decreasing", n, u, &s.upper[k - 1], tol)?);
        }
    }
    Ok(out)
}

fn residual_matrix(x: &Effect, a: &Effect) -> HermitianMatrix {
    x.as_hermitian().try_sub(a.as_hermitian()).expect("same dimension")
}

/// `values[k][v]` is the value at `n = k + 1` for test vector `v`.
fn settle(values: &[Vec<f64>], target: f64) -> Option<usize> {
    let mut settled = None;
    for (k, row) in values.iter().enumerate().rev() {
        if row.iter().all(|&r| r <= target) {
            settled = Some(k + 1);
        } else {
            break;
        }
    }
    settled
}

fn first_increase(values: &[Vec<f64>]) -> Option<Witness> {
    for k in 1..values.len() {
        for (v, (&now, &before)) in values[k].iter().zip(&values[k - 1]).enumerate() {
            if now > before + MONOTONE_SLACK {
                return Some(Witness { n: k + 1, vector: v, value: now });
            }
        }
    }
    None
}

fn row_max(values: &[Vec<f64>]) -> Vec<f64> {
    values.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect()
}

fn residual_series(
    chain: &'static str,
    members: &[Effect],
    limit: &Effect,
    vectors: &[Vec<Complex64>],
    target: f64,
    monotone_required: bool,
) -> ResidualSeries {
    let values: Vec<Vec<f64>> = members
        .iter()
        .map(|m| {
            let d = residual_matrix(m, limit);
            vectors.iter().map(|x| norm(&d.apply(x))).collect()
        })
        .collect();
    let monotone_violation = first_increase(&values);
    let settled_at = settle(&values, target);
    let passed = settled_at.is_some() && (!monotone_required || monotone_violation.is_none());
    ResidualSeries { chain, max_residual: row_max(&values), monotone_required, monotone_violation, settled_at, passed }
}

fn in_basis(u: &Matrix, a: &Effect) -> Matrix {
    &(&u.adjoint() * a.as_matrix()) * u
}

fn supremum_check(sf: &SqueezeFamily, u: &Matrix, s: &Sampled, target: f64, tol: &Tolerances) -> SupremumCheck {
    let dim = sf.dim;
    let lim = in_basis(u, &sf.limit);
    let diag_tol = |m: &Matrix| tol.tol_herm * m.frobenius_norm().max(1.0);
    let mut diagonal_in_basis = lim.is_diagonal(diag_tol(&lim));
    let mut sup = vec![f64::NEG_INFINITY; dim];
    let mut inf = vec![f64::INFINITY; dim];
    let mut last_lower = vec![0.0; dim];
    let mut last_upper = vec![0.0; dim];
    for (l, h) in s.lower.iter().zip(&s.upper) {
        let (l, h) = (in_basis(u, l), in_basis(u, h));
        diagonal_in_basis &= l.is_diagonal(diag_tol(&l)) && h.is_diagonal(diag_tol(&h));
        for i in 0..dim {
            sup[i] = sup[i].max(l[(i, i)].re);
            inf[i] = inf[i].min(h[(i, i)].re);
            last_lower[i] = l[(i, i)].re;
            last_upper[i] = h[(i, i)].re;
        }
    }
    let coordinates: Vec<SupremumCoordinate> = (0..dim)
        .map(|i| SupremumCoordinate { index: i, limit: lim[(i, i)].re, sup_lower: sup[i], inf_upper: inf[i] })
        .collect();
    let slack = tol.tol_psd * sf.limit.as_hermitian().frobenius_norm().max(1.0);
    let bounds_hold = coordinates.iter().all(|c| c.sup_lower <= c.limit + slack && c.limit <= c.inf_upper + slack);
    let final_gap = (0..dim)
        .map(|i| (coordinates[i].limit - last_lower[i]).max(last_upper[i] - coordinates[i].limit))
        .fold(0.0, f64::max);
    SupremumCheck {
        diagonal_in_basis,
        coordinates,
        final_gap,
        bounds_hold,
        passed: diagonal_in_basis && bounds_hold && final_gap <= target,
    }
}

/// Checks monotone convergence of both chains to the limit.
///
/// Invariant violations are collected into the report, which then fails.
/// Residuals of the lower and upper chains must be non-increasing; the
/// middle only has to settle below `target`.
pub fn vigier_check(
    sf: &SqueezeFamily,
    n_max: usize,
    vectors: &[Vec<Complex64>],
    target: f64,
    tol: &Tolerances,
) -> Result<VigierReport, NumericsError> {
    check_vectors(sf, vectors)?;
    let s = sample(sf, n_max);
    let invariant_violations = invariant_violations(sf, &s, tol)?;
    let series = vec![
        residual_series("lower", &s.lower, &sf.limit, vectors, target, true),
        residual_series("upper", &s.upper, &sf.limit, vectors, target, true),
        residual_series("middle", &s.middle, &sf.limit, vectors, target, false),
    ];
    let supremum = sf.eigenbasis.as_ref().map(|u| supremum_check(sf, u, &s, target, tol));
    let passed = n_max > 0
        && invariant_violations.is_empty()
        && series.iter().all(|r| r.passed)
        && supremum.as_ref().is_none_or(|c| c.passed);
    Ok(VigierReport {
        family: sf.name.clone(),
        dim: sf.dim,
        n_max,
        target,
        test_vectors: vectors.len(),
        series,
        invariant_violations,
        supremum,
        passed,
    })
}

fn check_vectors(sf: &SqueezeFamily, vectors: &[Vec<Complex64>]) -> Result<(), NumericsError> {
    match vectors.iter().find(|x| x.len() != sf.dim) {
        Some(x) => Err(NumericsError::DimensionMismatch { left: sf.dim, right: x.len() }),
        None => Ok(()),
    }
}

/// One step of the squeeze argument: a residual and the bound it must sit under.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub max_residual: Vec<f64>,
    pub max_bound: Vec<f64>,
    /// First `(n, vector)` where the residual exceeds its bound.
    pub bound_violation: Option<Witness>,
    /// First `(n, vector)` where the bound increases.
    pub monotone_violation: Option<Witness>,
    pub settled_at: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezeReport {
    pub family: String,
    pub n_max: usize,
    pub target: f64,
    pub stages: Vec<StageReport>,
    pub invariant_violations: Vec<InvariantViolation>,
    pub passed: bool,
}

impl SqueezeReport {
    /// The first failing stage, with its witness when there is one.
    pub fn first_failure(&self) -> Option<(&'static str, Option<Witness>)> {
        self.stages.iter().find(|s| !s.passed).map(|s| (s.stage, s.bound_violation.or(s.monotone_violation)))
    }
}

fn stage(stage: &'static str, residual: Vec<Vec<f64>>, bound: Vec<Vec<f64>>, target: f64) -> StageReport {
    let mut bound_violation = None;
    'outer: for (k, (r, b)) in residual.iter().zip(&bound).enumerate() {
        for (v, (&r, &b)) in r.iter().zip(b).enumerate() {
            if r > b + MONOTONE_SLACK {
                bound_violation = Some(Witness { n: k + 1, vector: v, value: r });
                break 'outer;
            }
        }
    }
    let monotone_violation = first_increase(&bound);
    let settled_at = settle(&residual, target);
    let passed = bound_violation.is_none() && monotone_violation.is_none() && settled_at.is_some();
    StageReport {
        stage,
        max_residual: row_max(&residual),
        max_bound: row_max(&bound),
        bound_violation,
        monotone_violation,
        settled_at,
        passed,
    }
}

/// Runs the three steps that carry convergence from the chains to the middle:
///
/// * `quadratic_form`: `|((M - A)x, x)| <= max(((A - L)x, x), ((U - A)x, x))`;
/// * `sqrt_gap`: `||sqrt(U - M) x||^2 <= ((U - L)x, x)`;
/// * `strong_residual`: `||(M - A)x|| <= ||sqrt(U - M) x|| + ||(U - A)x||`.
///
/// Each residual must stay under its bound, the bound must be non-increasing
/// in `n`, and the residual must settle below `target`.
pub fn squeeze_sot_check(
    sf: &SqueezeFamily,
    n_max: usize,
    vectors: &[Vec<Complex64>],
    target: f64,
    tol: &Tolerances,
) -> Result<SqueezeReport, NumericsError> {
    check_vectors(sf, vectors)?;
    let s = sample(sf, n_max);
    let invariant_violations = invariant_violations(sf, &s, tol)?;
    let a = sf.limit.as_hermitian();
    let (mut q, mut q_bound) = (Vec::new(), Vec::new());
    let (mut g, mut g_bound) = (Vec::new(), Vec::new());
    let (mut r, mut r_bound) = (Vec::new(), Vec::new());
    for k in 0..n_max {
        let l = s.lower[k].as_hermitian();
        let m = s.middle[k].as_hermitian();
        let u = s.upper[k].as_hermitian();
        let m_a = m.try_sub(a)?;
        let a_l = a.try_sub(l)?;
        let u_a = u.try_sub(a)?;
        let u_l = u.try_sub(l)?;
        let u_m = u.try_sub(m)?;
        // clipped at zero so a violated ordering still yields a residual
        let root = HermitianMatrix::hermitized(eig_sym(&u_m)?.reconstruct_with(|x| x.max(0.0).sqrt()));
        let mut rows = [Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for x in vectors {
            let root_x = norm(&root.apply(x));
            let u_a_x = norm(&u_a.apply(x));
            rows[0].push(m_a.quadratic_form(x).abs());
            rows[1].push(a_l.quadratic_form(x).max(u_a.quadratic_form(x)));
            rows[2].push(root_x * root_x);
            rows[3].push(u_l.quadratic_form(x));
            rows[4].push(norm(&m_a.apply(x)));
            rows[5].push(root_x + u_a_x);
        }
        let [a0, a1, a2, a3, a4, a5] = rows;
        q.push(a0);
        q_bound.push(a1);
        g.push(a2);
        g_bound.push(a3);
        r.push(a4);
        r_bound.push(a5);
    }
    // the gap stage settles on the norm, not its square
    let g_norm: Vec<Vec<f64>> = g.iter().map(|row| row.iter().map(|x| x.sqrt()).collect()).collect();
    let mut sqrt_stage = stage("sqrt_gap", g, g_bound, target * target);
    sqrt_stage.settled_at = settle(&g_norm, target);
    sqrt_stage.passed = sqrt_stage.bound_violation.is_none()
        && sqrt_stage.monotone_violation.is_none()
        && sqrt_stage.settled_at.is_some();
    let stages =
        vec![stage("quadratic_form", q, q_bound, target), sqrt_stage, stage("strong_residual", r, r_bound, target)];
    let passed = n_max > 0 && invariant_violations.is_empty() && stages.iter().all(|s| s.passed);
    Ok(SqueezeReport { family: sf.name.clone(), n_max, target, stages, invariant_violations, passed })
}
