//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use quantum_effects::algebra::{corpus, validate_axioms};
use quantum_effects::checks::{projection_identity, CheckOutcome, CheckResults, ALL_CHECKS};
use quantum_effects::format::{load_ea, to_ea_string};
use quantum_effects::l2::examples::{
    example3_contradiction, example5_lower_bound_check, example5_zero_bound_holds, DEFAULT_R_GRID,
};
use quantum_effects::l2::squeeze::{
    prescribed_squeeze_families, squeeze_sot_check, squeeze_test_vectors, vigier_check,
};
use quantum_effects::l2::{norm_distance, sot_residual, test_vectors, wot_residual, OperatorFamily, SparseVector};
use quantum_effects::numerics::Tolerances;
use quantum_effects::relations::{build_relation_report, Ambient, RelationReport};
use quantum_effects::topology::{interval_topology, order_converges, order_topology, LassoSequence};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn axiom_suite() -> Outcome {
    let all = corpus();
    ensure(all.len() == 72, || format!("corpus has {} algebras", all.len()))?;
    for alg in &all {
        let r = validate_axioms(alg);
        ensure(r.is_valid(), || format!("{} fails: {:?}", alg.name(), r.violations.first()))?;
    }
    let mutations = common::mutated_corpus();
    ensure(mutations.len() == 10, || "expected 10 mutations".into())?;
    for m in &mutations {
        let r = validate_axioms(&m.algebra);
        ensure(r.violations_of(m.expected).next().is_some(), || format!("{}: no {} violation", m.name, m.expected))?;
        for v in &r.violations {
            ensure(common::witness_breaks_axiom(&m.algebra, v), || format!("{}: bad witness {v:?}", m.name))?;
        }
    }
    Ok(format!("{} algebras valid, {} mutations caught", all.len(), mutations.len()))
}

fn convergence_oracle() -> Outcome {
    let mut sequences = 0usize;
    let mut algebras = 0usize;
    for alg in corpus().into_iter().filter(|a| a.len() <= 6) {
        algebras += 1;
        let oracle = common::OrderOracle::new(&alg);
        let v = alg.clone().validate().map_err(|e| e.to_string())?;
        for (prefix, cycle) in common::all_lassos(alg.len(), 3, 3) {
            let limits = oracle.limits(&prefix, &cycle);
            let seq = LassoSequence::new(prefix.clone(), cycle.clone()).map_err(|e| e.to_string())?;
            for a in alg.elements() {
                let got = order_converges(&v, &seq, a).map_err(|e| e.to_string())?;
                ensure(got == limits.contains(&a), || {
                    format!("{}: prefix {prefix:?} cycle {cycle:?} at {a:?}: library {got}", alg.name())
                })?;
            }
            sequences += 1;
        }
    }
    Ok(format!("{algebras} algebras, {sequences} lassos, 0 disagreements"))
}

fn finite_topologies() -> Outcome {
    let mut count = 0;
    for alg in corpus().into_iter().filter(|a| a.len() <= 16) {
        let v = alg.validate().map_err(|e| e.to_string())?;
        let order = order_topology(&v).map_err(|e| e.to_string())?;
        let interval = interval_topology(&v).map_err(|e| e.to_string())?;
        ensure(interval.is_subfamily_of(&order), || format!("{}: interval not inside order", v.name()))?;
        ensure(order.is_discrete() && interval.is_discrete(), || format!("{}: not discrete", v.name()))?;
        count += 1;
    }
    Ok(format!("{count} algebras, interval within order, both discrete"))
}

fn rotated_norm_series(fam: OperatorFamily) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for n in 1..=1000 {
        let d = norm_distance(fam, n).map_err(|e| e.to_string())?;
        let err = (d - (1.0 / n as f64).sin()).abs();
        ensure(err <= 1e-10, || format!("n = {n}: norm distance off by {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(worst)
}

fn example3() -> Outcome {
    let norm = rotated_norm_series(OperatorFamily::Example3)?;
    let mut worst: f64 = 0.0;
    for n in 1..=1000 {
        let s = (1.0 / n as f64).sin();
        for k in 0..100 {
            let c = k as f64 / 100.0;
            let check = example3_contradiction(n, c).map_err(|e| e.to_string())?;
            ensure(check.holds(), || format!("n = {n}, c = {c}: not contradicted"))?;
            let err = (check.determinant - s * s * (c - 1.0)).abs();
            ensure(err <= 1e-12, || format!("n = {n}, c = {c}: determinant off by {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("max norm error {norm:.1e}, 100000 grid points, max determinant error {worst:.1e}"))
}

fn example4() -> Outcome {
    let fam = OperatorFamily::Example4;
    let e1 = SparseVector::basis(1);
    let vectors = test_vectors(0);
    let supports: Vec<usize> = vectors.iter().map(|v| v.max_coordinate().unwrap_or(0)).collect();
    let mut pairs = 0usize;
    for n in 2..=10_000 {
        let sot = sot_residual(fam, n, &e1).map_err(|e| e.to_string())?;
        ensure((sot - 0.5).abs() <= 1e-12, || format!("n = {n}: SOT residual {sot}"))?;
        let d = norm_distance(fam, n).map_err(|e| e.to_string())?;
        ensure(d >= 0.5 - 1e-12, || format!("n = {n}: norm distance {d}"))?;
        for (i, x) in vectors.iter().enumerate() {
            for (j, y) in vectors.iter().enumerate() {
                if n > supports[i] && n > supports[j] {
                    let w = wot_residual(fam, n, x, y).map_err(|e| e.to_string())?;
                    ensure(w == 0.0, || format!("n = {n}, pair ({i}, {j}): WOT residual {w:e}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("n <= 10000, SOT residual 0.5, {pairs} weak pairings exactly 0"))
}

fn example5() -> Outcome {
    let norm = rotated_norm_series(OperatorFamily::Example5)?;
    let tol = Tolerances::default();
    for n in 1..=1000 {
        for &r in &DEFAULT_R_GRID {
            let check = example5_lower_bound_check(n, r).map_err(|e| e.to_string())?;
            ensure(check.holds(), || format!("n = {n}, r = {r}: lower bound not broken"))?;
        }
        ensure(example5_zero_bound_holds(n, &tol).map_err(|e| e.to_string())?, || format!("n = {n}: 0 <= P_n fails"))?;
    }
    Ok(format!("max norm error {norm:.1e}, {} grid points, r = 0 boundary holds", 1000 * DEFAULT_R_GRID.len()))
}

fn projection_residual_identity() -> Outcome {
    let o = projection_identity(1000, 0);
    if o.passed {
        Ok(o.summary)
    } else {
        Err(o.summary)
    }
}

fn monotone_squeeze() -> Outcome {
    let tol = Tolerances::default();
    let families = prescribed_squeeze_families();
    ensure(families.len() == 3, || "expected 3 scenarios".into())?;
    let mut parts = Vec::new();
    for sf in &families {
        let vectors = squeeze_test_vectors(sf.dim, 0);
        let v = vigier_check(sf, 1000, &vectors, 1e-6, &tol).map_err(|e| e.to_string())?;
        ensure(v.passed && v.invariant_violations.is_empty(), || format!("{}: monotone check failed: {v:?}", sf.name))?;
        let s = squeeze_sot_check(sf, 1000, &vectors, 1e-6, &tol).map_err(|e| e.to_string())?;
        ensure(s.passed && s.stages.len() == 3, || format!("{}: pipeline failed at {:?}", sf.name, s.first_failure()))?;
        // the last residual is independently below target: |(L_n - L) x| for each test vector
        let (ln, limit) = (&(sf.lower)(1000), &sf.limit);
        for x in &vectors {
            let d = (ln.as_matrix() - limit.as_matrix()).mul_vec(x);
            let r = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            ensure(r < 1e-6, || format!("{}: residual {r:e} at n = 1000", sf.name))?;
        }
        parts.push(sf.name.clone());
    }
    Ok(format!("{} pass both checks", parts.join(", ")))
}

fn relations_run(ambient: &str) -> Result<(Vec<u8>, RelationReport), String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qeffects"))
            .args(["--format", "json", "--seed", "0", "relations", "--ambient", ambient])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.stdout == b.stdout, || format!("{ambient}: output differs between runs"))?;
    let report: RelationReport = serde_json::from_slice(&a.stdout).map_err(|e| format!("{ambient}: {e}"))?;
    let expected_code = if report.passed() { 0 } else { 1 };
    ensure(a.status.code() == Some(expected_code), || format!("{ambient}: exit {:?}", a.status.code()))?;
    Ok((a.stdout, report))
}

fn relation_report(prior: bool) -> Outcome {
    for (ambient, chain) in [("eh", "interval ⊊ WOT ⊊ SOT ⊊ order"), ("ph", "interval ⊊ WOT = SOT ⊊ order")] {
        let (_, report) = relations_run(ambient)?;
        ensure(report.chain() == chain, || format!("{ambient}: chain {}", report.chain()))?;
        for e in &report.edges {
            ensure(!e.evidence.is_empty(), || format!("{ambient}: edge without evidence"))?;
        }
        ensure(report.passed() == prior, || {
            format!("{ambient}: summary {:?} but criteria 3-8 gave {prior}", report.summary)
        })?;
    }
    // a single failing check turns the summary to FAIL
    for ambient in [Ambient::Effects, Ambient::Projections] {
        for id in ALL_CHECKS {
            let mut r = CheckResults::all_passing();
            r.insert(id, CheckOutcome::new(false, "forced"));
            let rep = build_relation_report(ambient, &r).map_err(|e| e.to_string())?;
            ensure(!rep.passed(), || format!("{ambient:?}: failing {id} still PASS"))?;
        }
    }
    Ok(format!("both chains as expected, byte-identical reruns, summary tracks criteria 3-8 ({prior})"))
}

fn parser_and_cli() -> Outcome {
    let root = common::fixtures().join("ea");
    let list = |sub: &str| -> Result<Vec<std::path::PathBuf>, String> {
        let mut v: Vec<_> = fs::read_dir(root.join(sub))
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "ea"))
            .collect();
        v.sort();
        Ok(v)
    };
    let exit = |p: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_qeffects")).arg("validate").arg(p).output().map(|o| o.status.code())
    };
    let valid = list("valid")?;
    ensure(valid.len() == 6, || format!("{} valid fixtures", valid.len()))?;
    for p in &valid {
        let src = fs::read_to_string(p).map_err(|e| e.to_string())?;
        let golden = fs::read_to_string(p.with_extension("golden")).map_err(|e| e.to_string())?;
        let alg = load_ea(&src).map_err(|d| format!("{}: {:?}", p.display(), d[0]))?;
        ensure(to_ea_string(&alg) == golden, || format!("{}: golden mismatch", p.display()))?;
        ensure(exit(p).ok().flatten() == Some(0), || format!("{}: exit code", p.display()))?;
    }
    let malformed = list("malformed")?;
    ensure(malformed.len() == 8, || format!("{} malformed fixtures", malformed.len()))?;
    for p in &malformed {
        let src = fs::read_to_string(p).map_err(|e| e.to_string())?;
        let want = common::expected_position(&src).ok_or_else(|| format!("{}: no expect line", p.display()))?;
        let d = load_ea(&src).err().ok_or_else(|| format!("{}: accepted", p.display()))?;
        ensure((d[0].line, d[0].column) == want, || format!("{}: at {}:{}", p.display(), d[0].line, d[0].column))?;
        ensure(exit(p).ok().flatten() == Some(2), || format!("{}: exit code", p.display()))?;
    }
    for p in list("invalid")? {
        ensure(exit(&p).ok().flatten() == Some(1), || format!("{}: exit code", p.display()))?;
    }
    Ok("6 goldens, 8 diagnostics at expected positions, exit codes 0/1/2".into())
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut record = |n: usize, budget: Option<Duration>, f: &dyn Fn() -> Outcome| -> bool {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, budget) {
            if took > b {
                outcome = Err(format!("took {took:.2?}, budget {b:?}"));
            }
        }
        let ok = outcome.is_ok();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n}: {tag} ({took:.2?}) {detail}");
        all_ok &= ok;
        ok
    };
    let secs = |s| Some(Duration::from_secs(s));
    record(1, secs(5), &axiom_suite);
    record(2, secs(60), &convergence_oracle);
    let mut prior = true;
    prior &= record(3, secs(30), &finite_topologies);
    prior &= record(4, secs(10), &example3);
    prior &= record(5, secs(10), &example4);
    prior &= record(6, secs(10), &example5);
    prior &= record(7, None, &projection_residual_identity);
    prior &= record(8, None, &monotone_squeeze);
    record(9, None, &|| relation_report(prior));
    record(10, None, &parser_and_cli);
    if all_ok {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
