//! Acceptance gate. Each test prints one `PASS`/`FAIL` line and pins its
//! tolerances locally, so a change to a library constant cannot silently
//! loosen a criterion.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::time::{Duration, Instant};

use unires::channels::random::{density, rng_from_seed};
use unires::divergence::{bures_angle, DivergenceKind};
use unires::dynamics::{
    check_bound_residual, check_fisher_bound, check_purity_bound, integrate, random_generator,
    NonHermitianGenerator, Trajectory, Verdict,
};
use unires::residual::{residual_bures, residual_trace};
use unires::verify::{run_suite, CheckReport, Suite, SuiteConfig, SuiteReport};
use unires::{DensityOperator, HermitianOperator};

const SEED: u64 = 20_240_917;

fn report(index: usize, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "acceptance {index:>2} {verdict} {title}: {detail}").unwrap();
}

fn check<'a>(report: &'a SuiteReport, name: &str) -> &'a CheckReport {
    report
        .check(name)
        .unwrap_or_else(|| panic!("check {name} missing from {} report", report.suite))
}

/// Failures, evaluation count, and worst margin of a check.
fn summary(c: &CheckReport) -> String {
    format!(
        "{} evals, {} failures, worst margin {:.3e}",
        c.evaluations,
        c.failures,
        c.worst_margin.unwrap_or(f64::NAN)
    )
}

fn kinds() -> Vec<DivergenceKind> {
    DivergenceKind::all(2.0)
}

#[test]
fn oracle_agreement() {
    const TOL: f64 = 1e-5;
    const BUDGET: Duration = Duration::from_secs(300);
    let start = Instant::now();
    // 100 pairs per dimension per kind.
    let config = SuiteConfig::new(200, vec![2, 3], SEED).with_kinds(kinds());
    let rep = run_suite(Suite::Oracle, &config).unwrap();
    let elapsed = start.elapsed();
    let mut pass = elapsed < BUDGET;
    let mut details = Vec::new();
    for kind in kinds() {
        let c = check(&rep, &format!("oracle-agreement[{kind}]"));
        assert_eq!(c.tolerance, TOL);
        let worst = -c.worst_margin.unwrap();
        pass &= c.evaluations == 200 && c.failures == 0 && worst < TOL;
        details.push(format!("{kind} max|diff| {worst:.2e}"));
    }
    details.push(format!("{:.1}s", elapsed.as_secs_f64()));
    report(1, "oracle agreement", pass, &details.join(", "));
    assert!(pass);
}

#[test]
fn quotient_inequality() {
    const TOL: f64 = 1e-9;
    let config = SuiteConfig::new(1000, vec![2, 3, 4], SEED).with_kinds(kinds());
    let rep = run_suite(Suite::Inequalities, &config).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for kind in kinds() {
        let c = check(&rep, &format!("quotient-inequality[{kind}]"));
        assert_eq!(c.tolerance, TOL);
        pass &= c.evaluations == 1000 && c.failures == 0;
        details.push(format!("{kind}: {}", summary(c)));
    }
    report(2, "quotient inequality", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn isomorphism() {
    const TOL: f64 = 1e-9;
    let config = SuiteConfig::new(1000, vec![2, 3, 4, 5, 6], SEED);
    let rep = run_suite(Suite::Isomorphism, &config).unwrap();
    let mut pass = rep.passed();
    for c in &rep.checks {
        assert!(c.tolerance <= TOL, "{}", c.name);
        pass &= c.evaluations == 1000;
    }
    let witness = check(&rep, "injectivity-witness");
    let add = check(&rep, "homomorphism-add");
    let scale = check(&rep, "homomorphism-scale");
    let detail = format!(
        "{} checks, {} failures; injectivity {}; add {}; scale {}",
        rep.checks.len(),
        rep.total_failures(),
        summary(witness),
        summary(add),
        summary(scale)
    );
    report(3, "isomorphism", pass, &detail);
    assert!(pass);
}

#[test]
fn monotonicity() {
    const TOL: f64 = 1e-9;
    let config = SuiteConfig::new(1000, vec![2, 3, 4], SEED).with_kinds(kinds());
    let rep = run_suite(Suite::Monotonicity, &config).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for kind in kinds() {
        let c = check(&rep, &format!("residual-monotone[{kind}]"));
        assert_eq!(c.tolerance, TOL);
        pass &= c.evaluations == 1000 && c.failures == 0;
        details.push(format!("{kind}: {} failures", c.failures));
    }
    let diagram = check(&rep, "kraus-commuting-diagram");
    assert_eq!(diagram.tolerance, TOL);
    pass &= diagram.evaluations == 1000 && diagram.failures == 0;
    details.push(format!("kraus diagram: {}", summary(diagram)));
    report(4, "monotonicity", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn convexity() {
    const TOL: f64 = 1e-9;
    let config = SuiteConfig::new(1000, vec![2, 3, 4], SEED).with_kinds(kinds());
    let rep = run_suite(Suite::Convexity, &config).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for kind in [
        DivergenceKind::TraceDistance,
        DivergenceKind::RelativeEntropy,
    ] {
        for prefix in ["residual-convexity", "residual-joint-convexity"] {
            let c = check(&rep, &format!("{prefix}[{kind}]"));
            assert_eq!(c.tolerance, TOL);
            pass &= c.evaluations == 1000 && c.failures == 0;
            details.push(format!("{prefix}[{kind}]: {} failures", c.failures));
        }
    }
    report(5, "convexity", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn matrix_inequalities() {
    const TOL: f64 = 1e-10;
    let config = SuiteConfig::new(1000, vec![2, 3, 4, 5, 6], SEED);
    let rep = run_suite(Suite::Inequalities, &config).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for name in ["von-neumann-trace", "mirsky"] {
        let c = check(&rep, name);
        assert_eq!(c.tolerance, TOL);
        pass &= c.evaluations == 1000 && c.failures == 0 && c.worst_margin.unwrap() >= -TOL;
        details.push(format!("{name}: {}", summary(c)));
    }
    report(6, "matrix inequalities", pass, &details.join("; "));
    assert!(pass);
}

fn analytic(steps: usize) -> (NonHermitianGenerator, Trajectory) {
    let gen = NonHermitianGenerator::dissipative(HermitianOperator::diagonal(&[0.0, 1.0]).unwrap());
    let traj = integrate(&gen, &DensityOperator::maximally_mixed(2), 0.5, steps).unwrap();
    (gen, traj)
}

#[test]
fn analytic_dynamics_regression() {
    const TOL: f64 = 1e-5;
    const MARGIN_CEILING: f64 = 3e-4;
    // Closed forms at t = 1/2: p = e^{-2t} / (1 + e^{-2t}),
    // action = atan(1) - atan(e^{-t}), and the residual Bures angle
    // arccos(sqrt(p_1/2) + sqrt(p_2/2)), which coincides with the action.
    const P2: f64 = 0.268_941_421_369_995;
    const ACTION: f64 = 0.240_190_539_566_865;
    const RESIDUAL_BURES: f64 = 0.240_190_539_566_865;
    const PURITY_GAP: f64 = 0.106_776_133_517_036;

    let (_, traj) = analytic(10_000);
    let p2 = traj.spectra.last().unwrap().values()[0];
    let action = traj.total_action();
    let bound = check_bound_residual(&traj).unwrap();
    let gap = traj.purity.last().unwrap() - traj.purity[0];

    let values_ok = (p2 - P2).abs() < TOL
        && (action - ACTION).abs() < TOL
        && (bound.rhs - RESIDUAL_BURES).abs() < TOL
        && (gap - PURITY_GAP).abs() < TOL;
    let margin_ok = bound.margin > 0.0 && bound.margin < MARGIN_CEILING;
    let detail = format!(
        "p2 {p2:.9}, action {action:.9}, residual bures {:.9}, purity gap {gap:.9}, margin {:.3e}",
        bound.rhs, bound.margin
    );
    report(
        7,
        "analytic dynamics regression",
        values_ok && margin_ok,
        &detail,
    );
    assert!(values_ok, "{detail}");
    assert!(
        margin_ok,
        "residual speed-limit margin must lie in (0, {MARGIN_CEILING}): {detail}"
    );
}

fn random_scenarios(count: usize, seed: u64) -> Vec<(NonHermitianGenerator, Trajectory)> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let dim = 2 + i % 2;
            let gen = random_generator(&mut rng, dim, 1.0, 0.5);
            let rho0 = density(&mut rng, dim, dim).unwrap();
            let traj = integrate(&gen, &rho0, 1.0, 2_000).unwrap();
            (gen, traj)
        })
        .collect()
}

#[test]
fn fisher_equality_condition() {
    const EQUALITY_TOL: f64 = 1e-4;
    const BOUND_TOL: f64 = 1e-4;
    let (_, traj) = analytic(10_000);
    let exact = check_fisher_bound(&traj).unwrap();
    let mut pass = exact.skipped_crossings == 0
        && exact.evaluated == traj.len() - 2
        && exact.max_deviation < EQUALITY_TOL;

    let mut worst = f64::INFINITY;
    let mut skipped = 0;
    for (gen, traj) in random_scenarios(20, SEED) {
        let h = gen.hamiltonian(0.0).unwrap();
        let g = gen.gamma(0.0).unwrap();
        let comm = (h.matrix() * g.matrix() - g.matrix() * h.matrix()).norm();
        assert!(comm > 1e-3, "scenario must be non-commuting");
        let rep = check_fisher_bound(&traj).unwrap();
        pass &= rep.worst_margin >= -BOUND_TOL;
        worst = worst.min(rep.worst_margin);
        skipped += rep.skipped_crossings;
    }
    let detail = format!(
        "analytic max|<<G>> - sqrt(I)/2| {:.2e} over {} points; random worst margin {worst:.2e}, {skipped} crossing points skipped",
        exact.max_deviation, exact.evaluated
    );
    report(8, "fisher equality condition", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn purity_bound() {
    const TOL: f64 = 1e-7;
    let (_, traj) = analytic(10_000);
    let exact = check_purity_bound(&traj);
    let mut pass = exact.verdict == Verdict::Holds && exact.margin >= -TOL;
    let mut worst = f64::INFINITY;
    let mut used = 0;
    for (_, traj) in random_scenarios(60, SEED ^ 0x9e37) {
        if used == 50 {
            break;
        }
        if traj.total_action() >= FRAC_PI_2 {
            continue;
        }
        used += 1;
        let b = check_purity_bound(&traj);
        pass &= b.verdict == Verdict::Holds && b.margin >= -TOL;
        worst = worst.min(b.margin);
    }
    pass &= used == 50;
    let detail = format!(
        "analytic 2sin(action) {:.6} >= {:.6}; {used} random scenarios, worst margin {worst:.3e}",
        exact.lhs, exact.rhs
    );
    report(9, "purity bound", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn unitary_collapse() {
    const RESIDUAL_CEILING: f64 = 1e-7;
    const BURES_FLOOR: f64 = 0.1;
    let mut rng = rng_from_seed(SEED);
    let mut pass = true;
    let mut worst_residual = 0.0f64;
    let mut min_peak = f64::INFINITY;
    for i in 0..6 {
        let dim = 2 + i % 2;
        let gen = random_generator(&mut rng, dim, 1.0, 0.0);
        let rho0 = density(&mut rng, dim, dim).unwrap();
        let traj = integrate(&gen, &rho0, 3.0, 3_000).unwrap();
        let mut peak = 0.0f64;
        for (k, s) in traj.spectra.iter().enumerate() {
            let bures = residual_bures(&traj.spectra[0], s).unwrap();
            let trace = residual_trace(&traj.spectra[0], s).unwrap();
            worst_residual = worst_residual.max(bures).max(trace).max(traj.action[k]);
            peak = peak.max(bures_angle(&traj.states[0], &traj.states[k]).unwrap());
        }
        min_peak = min_peak.min(peak);
    }
    pass &= worst_residual < RESIDUAL_CEILING && min_peak > BURES_FLOOR;
    let detail = format!(
        "max residual quantity {worst_residual:.2e}; smallest peak plain Bures angle {min_peak:.3}"
    );
    report(10, "unitary collapse", pass, &detail);
    assert!(pass, "{detail}");
}
