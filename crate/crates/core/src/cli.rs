//! The `qeffects` command line.
//!
//! Exit status is 0 when every requested check passes, 1 when a check fails
//! and 2 for usage, input and parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::algebra::{validate_axioms, EffectAlgebra};
use crate::checks::{run_all, CheckConfig};
use crate::format::load_ea;
use crate::format::scenario::Scenario;
use crate::l2::examples::{log_r_grid, verify_example3, verify_example4, verify_example5, DEFAULT_R_GRID};
use crate::l2::squeeze::{
    prescribed_squeeze_families, squeeze_sot_check, squeeze_test_vectors, vigier_check, SqueezeReport, VigierReport,
    PRESCRIBED_N_MAX, PRESCRIBED_TARGET,
};
use crate::l2::{OperatorFamily, SqueezeFamily};
use crate::numerics::Tolerances;
use crate::relations::{self, build_relation_report, Ambient};
use crate::topology::{compare_topologies, interval_topology, order_topology, TopologyComparison};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TopologyKind {
    Order,
    Interval,
}

#[derive(Debug, Parser)]
#[command(name = "qeffects", version, about = "Finite effect algebras and operator topology checks")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Sets all four numerical tolerances.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the effect algebra axioms for an .ea file.
    Validate { file: PathBuf },
    /// Closed sets of the order or interval topology.
    Topology {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "order")]
        kind: TopologyKind,
        /// Compute both topologies and compare them.
        #[arg(long)]
        compare: bool,
    },
    /// Reproduce one of the separating projection families.
    VerifyExample {
        #[arg(value_parser = ["3", "4", "5"])]
        family: String,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        grid_steps: Option<usize>,
    },
    /// Monotone convergence checks on a JSON chain, or on the built-in scenarios.
    Vigier {
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Run every check and report the topology chain.
    Relations {
        #[arg(long, default_value = "eh")]
        ambient: Ambient,
    },
}

struct Ctx<'a> {
    format: OutputFormat,
    tol: Tolerances,
    seed: u64,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn usage(&mut self, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        EXIT_USAGE
    }

    fn json<T: Serialize>(&mut self, value: &T) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(value).expect("serializable"));
    }

    fn no_dot(&mut self, command: &str) -> Option<i32> {
        (self.format == OutputFormat::Dot).then(|| self.usage(format!("`{command}` has no dot output")))
    }
}

fn status(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs the CLI on `args` (program name first), writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let tol = match cli.tol {
        None => Tolerances::default(),
        Some(t) if t.is_finite() && t > 0.0 => Tolerances::uniform(t),
        Some(t) => {
            let _ = writeln!(err, "error: --tol must be a positive number (got {t})");
            return EXIT_USAGE;
        }
    };
    let mut ctx = Ctx { format: cli.format, tol, seed: cli.seed, out, err };
    match cli.command {
        Command::Validate { file } => validate(&mut ctx, &file),
        Command::Topology { file, kind, compare } => topology(&mut ctx, &file, kind, compare),
        Command::VerifyExample { family, n_max, grid_steps } => {
            let fam: OperatorFamily = family.parse().expect("restricted by clap");
            verify_example(&mut ctx, fam, n_max, grid_steps)
        }
        Command::Vigier { scenario } => vigier(&mut ctx, scenario.as_deref()),
        Command::Relations { ambient } => relations_cmd(&mut ctx, ambient),
    }
}

fn load(ctx: &mut Ctx<'_>, path: &Path) -> Result<EffectAlgebra, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| ctx.usage(format!("cannot read {}: {e}", path.display())))?;
    load_ea(&text).map_err(|diags| {
        for d in diags {
            let _ = writeln!(ctx.err, "{}", d.render(&path.display().to_string()));
        }
        EXIT_USAGE
    })
}

fn validate(ctx: &mut Ctx<'_>, path: &Path) -> i32 {
    let alg = match load(ctx, path) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let report = validate_axioms(&alg);
    match ctx.format {
        OutputFormat::Json => ctx.json(&report),
        OutputFormat::Text => {
            let verdict = if report.is_valid() { "valid" } else { "INVALID" };
            let _ = writeln!(ctx.out, "algebra {}: {} elements, {verdict}", report.algebra, report.carrier_size);
            for v in &report.violations {
                let _ = writeln!(ctx.out, "  {:?} ({}): {}", v.axiom, v.witness_labels.join(", "), v.detail);
            }
        }
        OutputFormat::Dot => {
            if report.is_valid() {
                let v = alg.validate().expect("axioms checked");
                let _ = write!(ctx.out, "{}", v.hasse_record().to_dot());
            } else {
                let _ = writeln!(ctx.err, "algebra {} is not an effect algebra; no order to draw", report.algebra);
            }
        }
    }
    status(report.is_valid())
}

fn topology(ctx: &mut Ctx<'_>, path: &Path, kind: TopologyKind, compare: bool) -> i32 {
    if let Some(code) = ctx.no_dot("topology") {
        return code;
    }
    let alg = match load(ctx, path) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let v = match alg.validate() {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(ctx.err, "{e}");
            return EXIT_FAIL;
        }
    };
    let wanted: Vec<TopologyKind> =
        if compare { vec![TopologyKind::Order, TopologyKind::Interval] } else { vec![kind] };
    let mut families = Vec::new();
    for k in wanted {
        let fam = match k {
            TopologyKind::Order => order_topology(&v),
            TopologyKind::Interval => interval_topology(&v),
        };
        match fam {
            Ok(f) => families.push((k, f)),
            Err(e) => return ctx.usage(e),
        }
    }
    let comparison = if compare {
        match compare_topologies(&families[1].1, &families[0].1) {
            Ok(c) => Some(c),
            Err(e) => return ctx.usage(e),
        }
    } else {
        None
    };
    // interval is coarser than or equal to order on every finite carrier
    let passed = comparison.is_none_or(|c| matches!(c, TopologyComparison::Coarser | TopologyComparison::Equal));
    let name = |k: TopologyKind| match k {
        TopologyKind::Order => "order",
        TopologyKind::Interval => "interval",
    };
    match ctx.format {
        OutputFormat::Json => {
            let fams: Vec<_> = families
                .iter()
                .map(|(k, f)| json!({"kind": name(*k), "discrete": f.is_discrete(), "closed_sets": f.len(), "family": f.to_record()}))
                .collect();
            let doc = json!({"algebra": v.name(), "topologies": fams, "interval_vs_order": comparison});
            ctx.json(&doc);
        }
        _ => {
            for (k, f) in &families {
                let _ = writeln!(
                    ctx.out,
                    "{} topology on {}: {} closed sets{}",
                    name(*k),
                    v.name(),
                    f.len(),
                    if f.is_discrete() { ", discrete" } else { "" }
                );
                let record = f.to_record();
                for set in &record.closed_sets {
                    let _ = writeln!(ctx.out, "  {{{}}}", set.join(", "));
                }
            }
            if let Some(c) = comparison {
                let phrase = match c {
                    TopologyComparison::Finer => "finer than",
                    TopologyComparison::Coarser => "coarser than",
                    TopologyComparison::Equal => "equal to",
                    TopologyComparison::Incomparable => "incomparable with",
                };
                let _ = writeln!(ctx.out, "interval is {phrase} order");
            }
        }
    }
    status(passed)
}

fn verify_example(ctx: &mut Ctx<'_>, fam: OperatorFamily, n_max: Option<usize>, grid_steps: Option<usize>) -> i32 {
    if let Some(code) = ctx.no_dot("verify-example") {
        return code;
    }
    match fam {
        OperatorFamily::Example3 => {
            let n = n_max.unwrap_or(1000);
            let steps = grid_steps.unwrap_or(100);
            if n == 0 || steps == 0 {
                return ctx.usage("--n-max and --grid-steps must be positive");
            }
            let rep = match verify_example3(n, steps, &ctx.tol) {
                Ok(r) => r,
                Err(e) => return ctx.usage(e),
            };
            if ctx.format == OutputFormat::Json {
                ctx.json(&rep);
            } else {
                let _ = writeln!(ctx.out, "{} ({}), n <= {n}", rep.family, fam.limit_label());
                norm_table(ctx, &rep.norm.points);
                let _ = writeln!(
                    ctx.out,
                    "contradiction grid: {} points over c in {{0, 1/{steps}, ..}}, {} failures, max det error {:.3e}",
                    rep.grid_points,
                    rep.grid_failures.len(),
                    rep.max_determinant_error
                );
                let _ = writeln!(ctx.out, "c = 1 boundary PSD: {}", rep.boundary_psd);
                let _ = writeln!(ctx.out, "result: {}", pass_word(rep.passed));
            }
            status(rep.passed)
        }
        OperatorFamily::Example4 => {
            let n = n_max.unwrap_or(10_000);
            if n < 2 {
                return ctx.usage("--n-max must be at least 2 for this family");
            }
            let rep = match verify_example4(n, ctx.seed) {
                Ok(r) => r,
                Err(e) => return ctx.usage(e),
            };
            if ctx.format == OutputFormat::Json {
                ctx.json(&rep);
            } else {
                let _ = writeln!(
                    ctx.out,
                    "{} ({}), 2 <= n <= {n}, {} test vectors",
                    rep.family,
                    fam.limit_label(),
                    rep.test_vectors
                );
                let _ = writeln!(ctx.out, "{:>8} {:>14} {:>14} {:>14}", "n", "sot(e1)", "norm", "max wot");
                for p in &rep.table {
                    let _ = writeln!(
                        ctx.out,
                        "{:>8} {:>14.6e} {:>14.6e} {:>14.6e}",
                        p.n, p.sot_residual_e1, p.norm_distance, p.max_wot_residual_outside_support
                    );
                }
                let _ = writeln!(
                    ctx.out,
                    "failures: sot {}, wot {}, norm {}",
                    rep.sot_failures.len(),
                    rep.wot_failures.len(),
                    rep.norm_failures.len()
                );
                let _ = writeln!(ctx.out, "result: {}", pass_word(rep.passed));
            }
            status(rep.passed)
        }
        OperatorFamily::Example5 => {
            let n = n_max.unwrap_or(1000);
            if n == 0 {
                return ctx.usage("--n-max must be positive");
            }
            let grid = match grid_steps {
                Some(0) => return ctx.usage("--grid-steps must be positive"),
                Some(k) => log_r_grid(k),
                None => DEFAULT_R_GRID.to_vec(),
            };
            let rep = match verify_example5(n, &grid, &ctx.tol) {
                Ok(r) => r,
                Err(e) => return ctx.usage(e),
            };
            if ctx.format == OutputFormat::Json {
                ctx.json(&rep);
            } else {
                let _ = writeln!(ctx.out, "{} ({}), n <= {n}", rep.family, fam.limit_label());
                norm_table(ctx, &rep.norm.points);
                let _ = writeln!(
                    ctx.out,
                    "lower bound grid: {} points over {} values of r, {} failures",
                    rep.grid_points,
                    rep.r_grid.len(),
                    rep.grid_failures.len()
                );
                let _ = writeln!(ctx.out, "r = 0 boundary holds: {}", rep.boundary_holds);
                let _ = writeln!(ctx.out, "|(P_n e1, e1)| at n = {n}: {:.12}", rep.weak_pairing_with_zero);
                let _ = writeln!(ctx.out, "result: {}", pass_word(rep.passed));
            }
            status(rep.passed)
        }
    }
}

fn norm_table(ctx: &mut Ctx<'_>, points: &[crate::l2::examples::NormPoint]) {
    let _ = writeln!(ctx.out, "{:>8} {:>20} {:>20} {:>10}", "n", "||P_n - P_0||", "sin(1/n)", "error");
    for p in points.iter().filter(|p| p.n <= 10 || p.n.to_string().trim_start_matches('1').chars().all(|c| c == '0')) {
        let _ = writeln!(
            ctx.out,
            "{:>8} {:>20.15} {:>20.15} {:>10.2e}",
            p.n,
            p.norm_distance,
            p.expected,
            (p.norm_distance - p.expected).abs()
        );
    }
}

fn pass_word(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct VigierOutput {
    vigier: VigierReport,
    squeeze: SqueezeReport,
    passed: bool,
}

fn vigier(ctx: &mut Ctx<'_>, scenario: Option<&Path>) -> i32 {
    if let Some(code) = ctx.no_dot("vigier") {
        return code;
    }
    let runs: Vec<(SqueezeFamily, usize, f64)> = match scenario {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return ctx.usage(format!("cannot read {}: {e}", path.display())),
            };
            let sc = match Scenario::parse(&text) {
                Ok(s) => s,
                Err(e) => return ctx.usage(format!("{}: {e}", path.display())),
            };
            let name = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
            match sc.to_family(name, &ctx.tol) {
                Ok(f) => vec![(f, sc.chain.len(), ctx.tol.tol_conv)],
                Err(e) => return ctx.usage(format!("{}: {e}", path.display())),
            }
        }
        None => prescribed_squeeze_families().into_iter().map(|f| (f, PRESCRIBED_N_MAX, PRESCRIBED_TARGET)).collect(),
    };
    let mut outputs = Vec::new();
    for (fam, n_max, target) in &runs {
        let vectors = squeeze_test_vectors(fam.dim, ctx.seed);
        let v = vigier_check(fam, *n_max, &vectors, *target, &ctx.tol);
        let s = squeeze_sot_check(fam, *n_max, &vectors, *target, &ctx.tol);
        match (v, s) {
            (Ok(v), Ok(s)) => {
                let passed = v.passed && s.passed;
                outputs.push(VigierOutput { vigier: v, squeeze: s, passed });
            }
            (Err(e), _) | (_, Err(e)) => return ctx.usage(e),
        }
    }
    let all = outputs.iter().all(|o| o.passed);
    if ctx.format == OutputFormat::Json {
        ctx.json(&outputs);
    } else {
        for o in &outputs {
            let v = &o.vigier;
            let _ = writeln!(
                ctx.out,
                "{} (dim {}, n <= {}, target {:e}): {}",
                v.family,
                v.dim,
                v.n_max,
                v.target,
                pass_word(o.passed)
            );
            for s in &v.series {
                let _ = writeln!(
                    ctx.out,
                    "  {:<7} settled at {:<6} final residual {:.3e}{}",
                    s.chain,
                    settled(s.settled_at),
                    s.max_residual.last().copied().unwrap_or(0.0),
                    if s.monotone_violation.is_some() { ", not monotone" } else { "" }
                );
            }
            if let Some(sup) = &v.supremum {
                let _ = writeln!(
                    ctx.out,
                    "  supremum in common eigenbasis: {} (final gap {:.3e})",
                    pass_word(sup.passed),
                    sup.final_gap
                );
            }
            for st in &o.squeeze.stages {
                let _ = writeln!(
                    ctx.out,
                    "  stage {:<16} settled at {:<6} {}",
                    st.stage,
                    settled(st.settled_at),
                    pass_word(st.passed)
                );
            }
            for iv in &v.invariant_violations {
                let _ = writeln!(
                    ctx.out,
                    "  violation: {} at n = {} (min eigenvalue {:.3e})",
                    iv.relation, iv.n, iv.min_eigenvalue
                );
            }
        }
    }
    status(all)
}

fn settled(n: Option<usize>) -> String {
    n.map_or_else(|| "never".into(), |n| n.to_string())
}

fn relations_cmd(ctx: &mut Ctx<'_>, ambient: Ambient) -> i32 {
    let cfg = CheckConfig { tol: ctx.tol, seed: ctx.seed, ..CheckConfig::default() };
    let results = run_all(&cfg);
    let report = match build_relation_report(ambient, &results) {
        Ok(r) => r,
        Err(e) => return ctx.usage(e),
    };
    let format = match ctx.format {
        OutputFormat::Json => relations::Format::Json,
        OutputFormat::Text => relations::Format::Text,
        OutputFormat::Dot => relations::Format::Dot,
    };
    let _ = write!(ctx.out, "{}", relations::render(&report, format));
    status(report.passed())
}
