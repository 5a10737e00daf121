//! The matrix inequalities behind the three separating families, and grid
//! verifiers that reproduce each family's convergence behaviour.

use serde::Serialize;

use super::{norm_distance, sot_residual, test_vectors, wot_residual, L2Error, OperatorFamily, SparseVector};
use crate::numerics::{eig_sym, loewner_leq, HermitianMatrix, Matrix, Tolerances};

/// Allowed gap between the numeric and closed-form determinants.
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;

/// Outcome of testing `[[1 - cos^2 t, -sin t cos t], [-sin t cos t, c - sin^2 t]] >= 0`, `t = 1/n`.
///
/// That matrix is `diag(1, c) - P_n` on the span of `e_0, e_1`; it would have
/// to be positive for an upper bound `diag(1, c)` to dominate `P_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContradictionCheck {
    pub n: usize,
    pub c: f64,
    pub min_eigenvalue: f64,
    pub determinant: f64,
    pub analytic_determinant: f64,
}

impl ContradictionCheck {
    /// The matrix has a negative eigenvalue.
    pub fn not_psd(&self) -> bool {
        self.min_eigenvalue < 0.0
    }

    pub fn determinant_matches(&self) -> bool {
        (self.determinant - self.analytic_determinant).abs() <= DETERMINANT_TOLERANCE
    }

    pub fn holds(&self) -> bool {
        self.not_psd() && self.determinant_matches()
    }
}

fn det2(m: &Matrix) -> f64 {
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

/// The block `diag(1, c) - P_n` used by [`example3_contradiction`], without domain checks.
pub fn example3_gap_matrix(n: usize, c: f64) -> Result<HermitianMatrix, L2Error> {
    let pn = OperatorFamily::Example3.operator(n)?;
    Ok(HermitianMatrix::hermitized(&Matrix::from_diagonal(&[1.0, c]) - pn.block()))
}

pub fn example3_contradiction(n: usize, c: f64) -> Result<ContradictionCheck, L2Error> {
    if n == 0 {
        return Err(L2Error::IndexOutOfDomain(n));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(L2Error::ParameterOutOfDomain { name: "c", value: c, domain: "[0, 1)" });
    }
    let m = example3_gap_matrix(n, c)?;
    let theta = 1.0 / n as f64;
    let s2 = theta.sin().powi(2);
    Ok(ContradictionCheck {
        n,
        c,
        min_eigenvalue: eig_sym(&m)?.min(),
        determinant: det2(m.as_matrix()),
        analytic_determinant: s2 * (c - 1.0),
    })
}

/// Outcome of testing `diag(r, 0) <= P_n` for the `Example5` family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBoundCheck {
    pub n: usize,
    pub r: f64,
    /// Smallest eigenvalue of `P_n - diag(r, 0)` on the span of `e_1, e_2`.
    pub min_eigenvalue: f64,
    pub determinant: f64,
    pub analytic_determinant: f64,
}

impl LowerBoundCheck {
    /// `diag(r, 0) <= P_n` fails.
    pub fn holds(&self) -> bool {
        self.min_eigenvalue < 0.0
    }
}

/// `P_n - diag(r, 0)` on the span of `e_1, e_2`.
pub fn example5_gap_matrix(n: usize, r: f64) -> Result<HermitianMatrix, L2Error> {
    let pn = OperatorFamily::Example5.operator(n)?;
    Ok(HermitianMatrix::hermitized(pn.block() - &Matrix::from_diagonal(&[r, 0.0])))
}

/// The sign of the smallest eigenvalue is used directly: near `r = 1e-6`,
/// `n = 1000` it is about `-1e-12`, below any useful relative tolerance.
pub fn example5_lower_bound_check(n: usize, r: f64) -> Result<LowerBoundCheck, L2Error> {
    if n == 0 {
        return Err(L2Error::IndexOutOfDomain(n));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(L2Error::ParameterOutOfDomain { name: "r", value: r, domain: "(0, 1]" });
    }
    let m = example5_gap_matrix(n, r)?;
    let s2 = (1.0 / n as f64).sin().powi(2);
    Ok(LowerBoundCheck {
        n,
        r,
        min_eigenvalue: eig_sym(&m)?.min(),
        determinant: det2(m.as_matrix()),
        analytic_determinant: -r * s2,
    })
}

/// Whether `diag(0, 0) <= P_n` on the `Example5` block, via the tolerant Löwner test.
pub fn example5_zero_bound_holds(n: usize, tol: &Tolerances) -> Result<bool, L2Error> {
    let pn = OperatorFamily::Example5.operator(n)?;
    let p = HermitianMatrix::hermitized(pn.block().clone());
    Ok(loewner_leq(&HermitianMatrix::zeros(2), &p, tol)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormPoint {
    pub n: usize,
    pub norm_distance: f64,
    pub expected: f64,
}

/// Verification of the norm convergence `||P_n - P_0|| = sin(1/n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSeries {
    pub tolerance: f64,
    pub points: Vec<NormPoint>,
    pub max_error: f64,
    pub monotone: bool,
    pub passed: bool,
}

pub const NORM_TOLERANCE: f64 = 1e-10;

fn sine_norm_series(fam: OperatorFamily, n_max: usize) -> Result<NormSeries, L2Error> {
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        points.push(NormPoint { n, norm_distance: norm_distance(fam, n)?, expected: (1.0 / n as f64).sin() });
    }
    let max_error = points.iter().map(|p| (p.norm_distance - p.expected).abs()).fold(0.0, f64::max);
    let monotone = points.windows(2).all(|w| w[1].norm_distance <= w[0].norm_distance + NORM_TOLERANCE);
    Ok(NormSeries {
        tolerance: NORM_TOLERANCE,
        passed: max_error <= NORM_TOLERANCE && monotone,
        points,
        max_error,
        monotone,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example3Report {
    pub family: &'static str,
    pub norm: NormSeries,
    pub grid_points: usize,
    pub grid_failures: Vec<ContradictionCheck>,
    pub max_determinant_error: f64,
    /// `diag(1, 1) - P_n` is PSD: the bound `c < 1` cannot be relaxed.
    pub boundary_psd: bool,
    pub passed: bool,
}

/// `c` runs over `{0, 1/steps, ..., (steps - 1)/steps}`.
pub fn verify_example3(n_max: usize, c_steps: usize, tol: &Tolerances) -> Result<Example3Report, L2Error> {
    let norm = sine_norm_series(OperatorFamily::Example3, n_max)?;
    let mut grid_failures = Vec::new();
    let mut max_determinant_error: f64 = 0.0;
    let mut grid_points = 0;
    for n in 1..=n_max {
        for k in 0..c_steps {
            let c = k as f64 / c_steps as f64;
            let check = example3_contradiction(n, c)?;
            grid_points += 1;
            max_determinant_error = max_determinant_error.max((check.determinant - check.analytic_determinant).abs());
            if !check.holds() {
                grid_failures.push(check);
            }
        }
    }
    let mut boundary_psd = true;
    for n in 1..=n_max {
        boundary_psd &= crate::numerics::is_psd(&example3_gap_matrix(n, 1.0)?, tol)?;
    }
    let passed = norm.passed && grid_failures.is_empty() && grid_points > 0 && boundary_psd;
    Ok(Example3Report {
        family: OperatorFamily::Example3.name(),
        norm,
        grid_points,
        grid_failures,
        max_determinant_error,
        boundary_psd,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example4Point {
    pub n: usize,
    pub sot_residual_e1: f64,
    pub norm_distance: f64,
    pub max_wot_residual_outside_support: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example4Report {
    pub family: &'static str,
    pub n_max: usize,
    pub test_vectors: usize,
    /// Points where `||P_n e_1 - P_0 e_1||` differs from 1/2 by more than 1e-12.
    pub sot_failures: Vec<usize>,
    /// `(n, i, j)` with `n` past the support of both vectors and a non-zero weak residual.
    pub wot_failures: Vec<(usize, usize, usize)>,
    pub norm_failures: Vec<usize>,
    pub table: Vec<Example4Point>,
    pub passed: bool,
}

pub const EXAMPLE4_TOLERANCE: f64 = 1e-12;

/// Table rows are kept for `n` in `2..=min(n_max, 20)` and at powers of ten.
pub fn verify_example4(n_max: usize, seed: u64) -> Result<Example4Report, L2Error> {
    let fam = OperatorFamily::Example4;
    let vectors = test_vectors(seed);
    verify_example4_with(fam, n_max, &vectors)
}

pub fn verify_example4_with(
    fam: OperatorFamily,
    n_max: usize,
    vectors: &[SparseVector],
) -> Result<Example4Report, L2Error> {
    let e1 = SparseVector::basis(1);
    let mut sot_failures = Vec::new();
    let mut wot_failures = Vec::new();
    let mut norm_failures = Vec::new();
    let mut table = Vec::new();
    let supports: Vec<usize> = vectors.iter().map(|v| v.max_coordinate().unwrap_or(0)).collect();
    for n in 2..=n_max {
        let sot = sot_residual(fam, n, &e1)?;
        if (sot - 0.5).abs() > EXAMPLE4_TOLERANCE {
            sot_failures.push(n);
        }
        let dist = norm_distance(fam, n)?;
        if dist < 0.5 - EXAMPLE4_TOLERANCE {
            norm_failures.push(n);
        }
        let mut worst: f64 = 0.0;
        for (i, x) in vectors.iter().enumerate() {
            for (j, y) in vectors.iter().enumerate() {
                if n > supports[i] && n > supports[j] {
                    let r = wot_residual(fam, n, x, y)?;
                    worst = worst.max(r);
                    if r != 0.0 {
                        wot_failures.push((n, i, j));
                    }
                }
            }
        }
        if n <= 20 || is_power_of_ten(n) {
            table.push(Example4Point {
                n,
                sot_residual_e1: sot,
                norm_distance: dist,
                max_wot_residual_outside_support: worst,
            });
        }
    }
    let passed = n_max >= 2 && sot_failures.is_empty() && wot_failures.is_empty() && norm_failures.is_empty();
    Ok(Example4Report {
        family: fam.name(),
        n_max,
        test_vectors: vectors.len(),
        sot_failures,
        wot_failures,
        norm_failures,
        table,
        passed,
    })
}

fn is_power_of_ten(mut n: usize) -> bool {
    while n >= 10 && n.is_multiple_of(10) {
        n /= 10;
    }
    n == 1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example5Report {
    pub family: &'static str,
    pub norm: NormSeries,
    pub r_grid: Vec<f64>,
    pub grid_points: usize,
    pub grid_failures: Vec<LowerBoundCheck>,
    /// `diag(0, 0) <= P_n` for every tested `n`.
    pub boundary_holds: bool,
    /// `|(P_n e_1, e_1)|` at `n_max`; it tends to 1, so `P_n` does not converge weakly to 0.
    pub weak_pairing_with_zero: f64,
    pub passed: bool,
}

pub const DEFAULT_R_GRID: [f64; 6] = [1e-6, 1e-3, 0.01, 0.1, 0.5, 1.0];

/// `steps` values of `r` log-spaced over `[1e-6, 1]`.
pub fn log_r_grid(steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![1.0],
        k => (0..k).map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / (k - 1) as f64)).collect(),
    }
}

pub fn verify_example5(n_max: usize, r_grid: &[f64], tol: &Tolerances) -> Result<Example5Report, L2Error> {
    let fam = OperatorFamily::Example5;
    let norm = sine_norm_series(fam, n_max)?;
    let mut grid_failures = Vec::new();
    let mut grid_points = 0;
    for n in 1..=n_max {
        for &r in r_grid {
            let check = example5_lower_bound_check(n, r)?;
            grid_points += 1;
            if !check.holds() {
                grid_failures.push(check);
            }
        }
    }
    let mut boundary_holds = true;
    for n in 1..=n_max {
        boundary_holds &= example5_zero_bound_holds(n, tol)?;
    }
    let e1 = SparseVector::basis(1);
    let weak_pairing_with_zero = fam.apply(n_max.max(1), &e1)?.inner(&e1).norm();
    let passed = norm.passed && grid_points > 0 && grid_failures.is_empty() && boundary_holds;
    Ok(Example5Report {
        family: fam.name(),
        norm,
        r_grid: r_grid.to_vec(),
        grid_points,
        grid_failures,
        boundary_holds,
        weak_pairing_with_zero,
        passed,
    })
}
