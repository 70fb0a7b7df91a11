//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when an outcome differs from the expected one.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use minkpoly::harness::{run_suite, SuiteConfig, VerificationReport};
use minkpoly::polygon::{sample, SampleOptions};

/// Criteria that cannot hold as stated, with the reason. They still print FAIL.
const KNOWN_FAILURES: &[(u32, &str)] =
    &[(3, "three unit-mass time-like edges cannot close, so n = 3 has no outputs")];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: Vec<String>,
}

struct Run<'a> {
    checks: &'a [&'a str],
    n: &'a [usize],
    trials: usize,
    tolerances: &'a [(&'a str, f64)],
}

fn suite(run: Run, polygon_seed: Option<u64>) -> Vec<VerificationReport> {
    let base = SuiteConfig {
        checks: run.checks.iter().map(|s| s.to_string()).collect(),
        trials: run.trials,
        seed: 20240601,
        tolerances: run.tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        ..SuiteConfig::default()
    };
    match polygon_seed {
        None => vec![run_suite(&SuiteConfig { n_range: run.n.to_vec(), ..base }).expect("suite config")],
        Some(seed) => run
            .n
            .iter()
            .map(|&n| {
                let p = sample(n, &vec![1.0; n], seed + n as u64, &SampleOptions::default()).expect("sample");
                let cfg = SuiteConfig { n_range: vec![n], polygon: Some(Arc::new(p)), ..base.clone() };
                run_suite(&cfg).expect("suite config")
            })
            .collect(),
    }
}

fn outcome(id: u32, name: &'static str, reports: &[VerificationReport], extra: Option<(bool, String)>) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for r in reports {
        for c in &r.checks {
            pass &= c.pass;
            let mark = if c.pass { "ok  " } else { "FAIL" };
            detail.push(format!(
                "{mark} {:<34} n={:?} trials={:<4} max {:.3e}  tol {:.1e}",
                c.id, r.config.n_range, c.trials, c.max_residual, c.tolerance
            ));
            if let Some(e) = c.errors.first() {
                detail.push(format!("     trial errors (first {} kept), first: {e}", c.errors.len()));
            }
        }
    }
    if let Some((ok, msg)) = extra {
        pass &= ok;
        detail.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
    }
    Outcome { id, name, pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

const ALL_N: &[usize] = &[4, 5, 6, 7, 8];
/// Truncation constant and smallest step for finite-difference agreement.
const C_FD: f64 = 1e3;
const H_MIN: f64 = 1e-4;

fn criteria() -> Vec<Outcome> {
    let mut out = Vec::new();

    let (r, dt) = timed(|| {
        suite(Run { checks: &["bracket"], n: &[4], trials: 1000, tolerances: &[
            ("bracket.minkowski", 1e-12), ("bracket.sl2", 1e-12), ("bracket.jacobi", 1e-12), ("bracket.degeneracy", 1e-12),
        ] }, None)
    });
    out.push(outcome(1, "bracket algebra", &r, Some((dt < Duration::from_secs(1), format!("runtime {dt:.2?} < 1 s")))));

    let r = suite(Run { checks: &["isometry"], n: &[4], trials: 1000, tolerances: &[
        ("isometry.form", 1e-14), ("isometry.inverse", 1e-15),
    ] }, None);
    out.push(outcome(2, "isometry", &r, None));

    let r = suite(Run { checks: &["sampler"], n: &[3, 4, 5, 6, 7, 8], trials: 100, tolerances: &[
        ("sampler.closure", 1e-12), ("sampler.mass", 1e-13), ("sampler.non-collinear", 0.0), ("sampler.determinism", 0.0),
    ] }, None);
    let mut o = outcome(3, "sampler", &r, None);
    let rest = suite(Run { checks: &["sampler"], n: ALL_N, trials: 100, tolerances: &[] }, None);
    o.detail.push(format!("     n in 4..=8 alone: {}", if rest[0].passed() { "pass" } else { "fail" }));
    out.push(o);

    let r = suite(Run { checks: &["calibration"], n: ALL_N, trials: 100, tolerances: &[
        ("calibration.existence", 1e-11), ("calibration.uniqueness", 1e-10), ("calibration.minimality", 0.0),
    ] }, None);
    out.push(outcome(4, "calibration", &r, None));

    let r = suite(Run { checks: &["l-operator"], n: ALL_N, trials: 100, tolerances: &[
        ("l-operator.self-adjoint", 1e-12), ("l-operator.negative", 0.0), ("l-operator.collinear-singular", 0.0),
    ] }, None);
    out.push(outcome(5, "L operator", &r, None));

    let r = suite(Run { checks: &["dimension"], n: ALL_N, trials: 100, tolerances: &[("dimension.slice", 0.0)] }, None);
    out.push(outcome(6, "slice dimension", &r, None));

    let r = suite(Run { checks: &["complex"], n: ALL_N, trials: 100, tolerances: &[
        ("complex.square", 1e-10), ("complex.calibration", 1e-10),
    ] }, None);
    out.push(outcome(7, "complex structure", &r, None));

    let r = suite(Run { checks: &["omega"], n: ALL_N, trials: 100, tolerances: &[
        ("omega.gauge-invariance", 1e-11), ("omega.antisymmetry", 0.0), ("omega.nondegeneracy", 1e8),
        ("omega.compatibility", 1e-11), ("omega.metric-positive", 0.0),
    ] }, None);
    out.push(outcome(8, "symplectic form", &r, None));

    let r = suite(Run { checks: &["projection"], n: ALL_N, trials: 100, tolerances: &[
        ("projection.orthogonality", 1e-10), ("projection.self-adjoint", 1e-10),
        ("projection.decomposition", 1e-12), ("projection.idempotence", 1e-9),
    ] }, None);
    out.push(outcome(9, "projection", &r, None));

    let r = suite(Run { checks: &["connection.conditions", "connection.position-order"], n: ALL_N, trials: 100, tolerances: &[
        ("connection.conditions", 1e-8), ("connection.position-order", 0.3),
    ] }, None);
    out.push(outcome(10, "connection", &r, None));

    let r = suite(Run { checks: &["mu"], n: ALL_N, trials: 100, tolerances: &[
        ("mu.symmetry", 1e-10), ("mu.skew", 1e-10), ("mu.invariance", 1e-10),
        ("mu.xi", C_FD * H_MIN * H_MIN), ("mu.w", C_FD * H_MIN * H_MIN),
    ] }, None);
    out.push(outcome(11, "mu and the normal components", &r, None));

    let (r, dt) = timed(|| {
        suite(Run { checks: &["nijenhuis.norm", "nijenhuis.order"], n: &[4, 5, 6], trials: 20, tolerances: &[
            ("nijenhuis.norm", 1e-6), ("nijenhuis.order", 0.3),
        ] }, Some(7))
    });
    out.push(outcome(12, "integrability", &r, Some((dt < Duration::from_secs(300), format!("runtime {dt:.2?} < 5 min")))));

    let r = suite(Run { checks: &["closedness"], n: &[4, 5, 6], trials: 20, tolerances: &[
        ("closedness.d-omega", 1e-5), ("closedness.order", 0.3),
    ] }, Some(11));
    out.push(outcome(13, "closedness", &r, None));

    out
}

fn main() -> ExitCode {
    let results = criteria();
    let mut unexpected = Vec::new();
    for o in &results {
        println!("{} {:>2} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name);
        for d in &o.detail {
            println!("        {d}");
        }
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == o.id);
        if let Some((_, why)) = known {
            println!("        known: {why}");
        }
        if o.pass == known.is_some() {
            unexpected.push(o.id);
        }
    }
    let passed = results.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        ExitCode::FAILURE
    }
}
