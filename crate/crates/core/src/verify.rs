//! Randomized property suites.
//!
//! Every trial draws from its own generator seeded by
//! `trial_seed(config.seed, index)`, so a failing trial can be replayed from
//! the seed in its report. Trials run in parallel and are reduced in index
//! order, which keeps reports independent of the thread count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::channels::random::{
    complex_gaussian, density, haar_unitary, hermitian, kraus, permutation, probability_spectrum,
    rng_from_seed, simplex, stochastic, trial_seed, TrialRng,
};
use crate::channels::{apply_cptp, apply_stochastic, kraus_from_stochastic};
use crate::divergence::DivergenceKind;
use crate::error::{Error, Result};
use crate::residual::{assumption_check, minimize_over_unitaries};
use crate::spectral::{
    aligning_unitary, class_add, class_scale, singular_values, sorted_spectrum, DensityOperator,
    HermitianOperator, SortedSpectrum,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Isomorphism,
    MetricAxioms,
    Monotonicity,
    Convexity,
    Oracle,
    Inequalities,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Isomorphism,
        Suite::MetricAxioms,
        Suite::Monotonicity,
        Suite::Convexity,
        Suite::Oracle,
        Suite::Inequalities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Isomorphism => "isomorphism",
            Suite::MetricAxioms => "metric-axioms",
            Suite::Monotonicity => "monotonicity",
            Suite::Convexity => "convexity",
            Suite::Oracle => "oracle",
            Suite::Inequalities => "inequalities",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown suite '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Dimensions cycled through by trial index.
    pub dims: Vec<usize>,
    pub seed: u64,
    /// Divergence kinds for the kind-indexed checks.
    pub kinds: Vec<DivergenceKind>,
}

impl SuiteConfig {
    pub fn new(trials: usize, dims: Vec<usize>, seed: u64) -> Self {
        Self {
            trials,
            dims,
            seed,
            kinds: DivergenceKind::all(DEFAULT_ALPHA),
        }
    }

    pub fn with_kinds(mut self, kinds: Vec<DivergenceKind>) -> Self {
        self.kinds = kinds;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "dims must be a non-empty list of positive sizes".into(),
            ));
        }
        for kind in &self.kinds {
            kind.validate()?;
        }
        Ok(())
    }
}

/// Renyi order used when no order is given.
pub const DEFAULT_ALPHA: f64 = 2.0;

/// Tolerance ladder.
pub const EXACT_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const MATRIX_INEQUALITY_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-5;
pub const CONTINUITY_TOL: f64 = 1e-3;

/// One evaluation: passes when `margin >= -tolerance`.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: String,
    pub tolerance: f64,
    pub margin: f64,
}

impl Sample {
    fn new(name: impl Into<String>, tolerance: f64, margin: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            margin,
        }
    }

    /// `|a - b| <= tol`.
    fn close(name: impl Into<String>, tolerance: f64, a: f64, b: f64) -> Self {
        let margin = if a == b { 0.0 } else { -(a - b).abs() };
        Self::new(
            name,
            tolerance,
            if margin.is_nan() {
                f64::NEG_INFINITY
            } else {
                margin
            },
        )
    }

    /// `small <= big`, with `+inf <= +inf` holding.
    fn le(name: impl Into<String>, tolerance: f64, small: f64, big: f64) -> Self {
        Self::new(name, tolerance, slack(small, big))
    }

    pub fn passed(&self) -> bool {
        self.margin >= -self.tolerance
    }
}

fn slack(small: f64, big: f64) -> f64 {
    if big == f64::INFINITY {
        f64::INFINITY
    } else if small == f64::INFINITY || small.is_nan() || big.is_nan() {
        f64::NEG_INFINITY
    } else {
        big - small
    }
}

/// Writes infinities as the strings `"+inf"` / `"-inf"`.
pub fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        s.serialize_str("+inf")
    } else if *x == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_f64(*x)
    }
}

fn serialize_extended_opt<S: Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_extended(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub tolerance: f64,
    pub evaluations: usize,
    pub passes: usize,
    pub failures: usize,
    /// Smallest margin seen; negative beyond the tolerance means failure.
    #[serde(serialize_with = "serialize_extended_opt")]
    pub worst_margin: Option<f64>,
    /// Trial seed of the first failure.
    pub counterexample_seed: Option<u64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn total_failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let trials: Vec<(u64, Vec<Sample>)> = (0..config.trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(config.seed, index as u64);
            let dim = config.dims[index % config.dims.len()];
            run_trial(suite, dim, seed, config).map(|samples| (seed, samples))
        })
        .collect::<Result<_>>()?;

    let mut checks: Vec<CheckReport> = Vec::new();
    for (seed, samples) in trials {
        for sample in samples {
            let pos = match checks.iter().position(|c| c.name == sample.name) {
                Some(pos) => pos,
                None => {
                    checks.push(CheckReport {
                        name: sample.name.clone(),
                        tolerance: sample.tolerance,
                        evaluations: 0,
                        passes: 0,
                        failures: 0,
                        worst_margin: None,
                        counterexample_seed: None,
                    });
                    checks.len() - 1
                }
            };
            let check = &mut checks[pos];
            check.evaluations += 1;
            if sample.passed() {
                check.passes += 1;
            } else {
                check.failures += 1;
                check.counterexample_seed.get_or_insert(seed);
            }
            check.worst_margin = Some(
                check
                    .worst_margin
                    .map_or(sample.margin, |w| w.min(sample.margin)),
            );
        }
    }
    Ok(SuiteReport {
        suite,
        trials: config.trials,
        dims: config.dims.clone(),
        seed: config.seed,
        checks,
    })
}

/// The samples of one trial; exposed so reported counterexample seeds can be
/// replayed.
pub fn run_trial(suite: Suite, dim: usize, seed: u64, config: &SuiteConfig) -> Result<Vec<Sample>> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    match suite {
        Suite::Isomorphism => isomorphism(&mut rng, dim, &mut out)?,
        Suite::MetricAxioms => metric_axioms(&mut rng, dim, &config.kinds, &mut out)?,
        Suite::Monotonicity => monotonicity(&mut rng, dim, &config.kinds, &mut out)?,
        Suite::Convexity => convexity(&mut rng, dim, &config.kinds, &mut out)?,
        Suite::Oracle => oracle(&mut rng, dim, &config.kinds, &mut out)?,
        Suite::Inequalities => inequalities(&mut rng, dim, &config.kinds, &mut out)?,
    }
    Ok(out)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn within(name: &str, tol: f64, err: f64, out: &mut Vec<Sample>) {
    out.push(Sample::new(
        name,
        tol,
        if err.is_nan() {
            f64::NEG_INFINITY
        } else {
            -err
        },
    ));
}

fn full_rank_pair(rng: &mut TrialRng, dim: usize) -> Result<(DensityOperator, DensityOperator)> {
    Ok((density(rng, dim, dim)?, density(rng, dim, dim)?))
}

fn isomorphism(rng: &mut TrialRng, dim: usize, out: &mut Vec<Sample>) -> Result<()> {
    let a = hermitian(rng, dim);
    let b = hermitian(rng, dim);
    let fa = sorted_spectrum(&a);
    let fb = sorted_spectrum(&b);

    let u = haar_unitary(rng, dim);
    let rotated = sorted_spectrum(&a.conjugate(&u)?);
    within(
        "unitary-invariance",
        IDENTITY_TOL,
        max_diff(rotated.values(), fa.values()),
        out,
    );

    // [A] + [B] through both matrix-side constructions.
    let sum = class_add(&fa, &fb)?;
    let ea = crate::spectral::eigendecompose(&a);
    let combined: Vec<f64> = fa
        .values()
        .iter()
        .zip(fb.values())
        .map(|(x, y)| x + y)
        .collect();
    let side = sorted_spectrum(&HermitianOperator::from_spectral(&combined, &ea.vectors)?);
    within(
        "homomorphism-add",
        IDENTITY_TOL,
        max_diff(side.values(), sum.values()),
        out,
    );
    let w = aligning_unitary(&a, &b)?;
    let aligned_sum = sorted_spectrum(&a.conjugate(&w)?.add(&b)?);
    within(
        "homomorphism-add-aligned",
        IDENTITY_TOL,
        max_diff(aligned_sum.values(), sum.values()),
        out,
    );

    let k = rng.random_range(0.0..3.0);
    let scaled = sorted_spectrum(&a.scale(k));
    within(
        "homomorphism-scale",
        IDENTITY_TOL,
        max_diff(scaled.values(), class_scale(k, &fa)?.values()),
        out,
    );

    // Same spectrum: W A W^dag must reproduce B itself.
    let v = haar_unitary(rng, dim);
    let twin = a.conjugate(&v)?;
    let w = aligning_unitary(&a, &twin)?;
    let err = (a.conjugate(&w)?.matrix() - twin.matrix()).norm();
    within("injectivity-witness", IDENTITY_TOL, err, out);

    // Independent spectra: W A W^dag keeps A's spectrum in B's eigenbasis.
    let w = aligning_unitary(&a, &b)?;
    let moved = a.conjugate(&w)?;
    let comm = moved.matrix() * b.matrix() - b.matrix() * moved.matrix();
    within("aligning-commutes", IDENTITY_TOL, comm.norm(), out);
    within(
        "aligning-spectrum",
        IDENTITY_TOL,
        max_diff(sorted_spectrum(&moved).values(), fa.values()),
        out,
    );

    let c = sorted_spectrum(&hermitian(rng, dim));
    let ab = class_add(&fa, &fb)?;
    let ba = class_add(&fb, &fa)?;
    within(
        "add-commutative",
        0.0,
        max_diff(ab.values(), ba.values()),
        out,
    );
    let left = class_add(&ab, &c)?;
    let right = class_add(&fa, &class_add(&fb, &c)?)?;
    within(
        "add-associative",
        EXACT_TOL,
        max_diff(left.values(), right.values()),
        out,
    );
    Ok(())
}

fn metric_axioms(
    rng: &mut TrialRng,
    dim: usize,
    kinds: &[DivergenceKind],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let (rho, sigma) = full_rank_pair(rng, dim)?;
    let tau = density(rng, dim, dim)?;
    let u = haar_unitary(rng, dim);
    let v = haar_unitary(rng, dim);
    let (p, q, r) = (rho.spectrum(), sigma.spectrum(), tau.spectrum());

    for kind in kinds {
        let d = kind.evaluate(&rho, &sigma)?;
        let moved = kind.evaluate(&rho.conjugate(&u)?, &sigma.conjugate(&u)?)?;
        out.push(Sample::close(
            format!("unitary-invariance[{kind}]"),
            IDENTITY_TOL,
            d,
            moved,
        ));
        let classes = kind.residual_of(&rho.conjugate(&u)?, &sigma.conjugate(&v)?)?;
        out.push(Sample::close(
            format!("class-invariance[{kind}]"),
            IDENTITY_TOL,
            kind.residual(&p, &q)?,
            classes,
        ));
        let same = kind.evaluate(&rho, &rho)?;
        out.push(Sample::close(
            format!("self-distance[{kind}]"),
            IDENTITY_TOL,
            same,
            0.0,
        ));
        if kind.is_metric() {
            let back = kind.evaluate(&sigma, &rho)?;
            out.push(Sample::close(
                format!("symmetry[{kind}]"),
                MATRIX_INEQUALITY_TOL,
                d,
                back,
            ));
            let via = kind.evaluate(&rho, &tau)? + kind.evaluate(&tau, &sigma)?;
            out.push(Sample::le(
                format!("triangle[{kind}]"),
                MATRIX_INEQUALITY_TOL,
                d,
                via,
            ));

            let res = kind.residual(&p, &q)?;
            out.push(Sample::close(
                format!("residual-symmetry[{kind}]"),
                EXACT_TOL,
                res,
                kind.residual(&q, &p)?,
            ));
            let via = kind.residual(&p, &r)? + kind.residual(&r, &q)?;
            out.push(Sample::le(
                format!("residual-triangle[{kind}]"),
                MATRIX_INEQUALITY_TOL,
                res,
                via,
            ));
            // Zero exactly on equal classes.
            let zero = kind.residual(&p, &rho.conjugate(&u)?.spectrum())?;
            out.push(Sample::close(
                format!("residual-zero-on-class[{kind}]"),
                IDENTITY_TOL,
                zero,
                0.0,
            ));
            let distinct = max_diff(p.values(), q.values()) > IDENTITY_TOL;
            let ok = !distinct || res > 0.0;
            out.push(Sample::new(
                format!("residual-positive-off-class[{kind}]"),
                0.0,
                if ok { 0.0 } else { -1.0 },
            ));
        }
    }

    let kl = DivergenceKind::RelativeEntropy.evaluate(&rho, &sigma)?;
    for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
        let renyi = DivergenceKind::PetzRenyi { alpha }.evaluate(&rho, &sigma)?;
        out.push(Sample::close("renyi-continuity", CONTINUITY_TOL, renyi, kl));
    }
    Ok(())
}

/// Classical Renyi divergences are monotone for every order; the matrix
/// Petz form only up to order 2.
fn quantum_monotone(kind: &DivergenceKind) -> bool {
    match kind {
        DivergenceKind::PetzRenyi { alpha } => *alpha <= 2.0,
        _ => true,
    }
}

fn monotonicity(
    rng: &mut TrialRng,
    dim: usize,
    kinds: &[DivergenceKind],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let p = probability_spectrum(rng, dim);
    let q = probability_spectrum(rng, dim);
    let rows = rng.random_range(1..=dim + 1);
    let t = stochastic(rng, rows, dim)?;
    let (tp, tq) = (apply_stochastic(&t, &p)?, apply_stochastic(&t, &q)?);
    for kind in kinds {
        let before = kind.residual(&p, &q)?;
        let after = kind.residual(&tp, &tq)?;
        out.push(Sample::le(
            format!("residual-monotone[{kind}]"),
            IDENTITY_TOL,
            after,
            before,
        ));
    }

    // Commuting representatives through the Kraus lift.
    let in_basis = haar_unitary(rng, dim);
    let out_basis = haar_unitary(rng, rows);
    let lift = kraus_from_stochastic(&t, in_basis.matrix(), out_basis.matrix())?;
    let rep = DensityOperator::in_basis(&p, in_basis.matrix())?;
    let image = apply_cptp(&lift, &rep)?.spectrum();
    within(
        "kraus-commuting-diagram",
        IDENTITY_TOL,
        max_diff(image.values(), tp.values()),
        out,
    );

    // Matrix divergences under a random CPTP map.
    let (rho, sigma) = full_rank_pair(rng, dim)?;
    let out_dim = rng.random_range(1..=dim + 1);
    let min_count = dim.div_ceil(out_dim);
    let count = rng.random_range(min_count..=min_count + 2);
    let channel = kraus(rng, dim, out_dim, count)?;
    let (er, es) = (apply_cptp(&channel, &rho)?, apply_cptp(&channel, &sigma)?);
    for kind in kinds.iter().filter(|k| quantum_monotone(k)) {
        let before = kind.evaluate(&rho, &sigma)?;
        let after = kind.evaluate(&er, &es)?;
        out.push(Sample::le(
            format!("cptp-monotone[{kind}]"),
            IDENTITY_TOL,
            after,
            before,
        ));
    }
    Ok(())
}

fn convex_kind(kind: &DivergenceKind) -> bool {
    matches!(
        kind,
        DivergenceKind::TraceDistance | DivergenceKind::RelativeEntropy
    )
}

fn mixture(weights: &[f64], parts: &[SortedSpectrum]) -> Result<SortedSpectrum> {
    let mut acc = SortedSpectrum::zeros(parts[0].len());
    for (w, part) in weights.iter().zip(parts) {
        acc = class_add(&acc, &class_scale(*w, part)?)?;
    }
    Ok(acc)
}

fn convexity(
    rng: &mut TrialRng,
    dim: usize,
    kinds: &[DivergenceKind],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let m = rng.random_range(2..=4);
    let weights = simplex(rng, m);
    let ps: Vec<SortedSpectrum> = (0..m).map(|_| probability_spectrum(rng, dim)).collect();
    let q = probability_spectrum(rng, dim);
    let mixed = mixture(&weights, &ps)?;

    let lambda: f64 = rng.random_range(0.0..1.0);
    let (p1, p2) = (
        probability_spectrum(rng, dim),
        probability_spectrum(rng, dim),
    );
    let (q1, q2) = (
        probability_spectrum(rng, dim),
        probability_spectrum(rng, dim),
    );
    let pm = mixture(&[lambda, 1.0 - lambda], &[p1.clone(), p2.clone()])?;
    let qm = mixture(&[lambda, 1.0 - lambda], &[q1.clone(), q2.clone()])?;

    let states: Vec<DensityOperator> = (0..m)
        .map(|_| density(rng, dim, dim))
        .collect::<Result<_>>()?;
    let sigma = density(rng, dim, dim)?;
    let mut acc = HermitianOperator::zeros(dim);
    for (w, s) in weights.iter().zip(&states) {
        acc = acc.add(&s.operator().scale(*w))?;
    }
    let mixed_state = DensityOperator::normalized(acc)?;

    for kind in kinds.iter().filter(|k| convex_kind(k)) {
        let mut lhs = 0.0;
        for (w, p) in weights.iter().zip(&ps) {
            lhs += w * kind.residual(p, &q)?;
        }
        let rhs = kind.residual(&mixed, &q)?;
        out.push(Sample::le(
            format!("residual-convexity[{kind}]"),
            IDENTITY_TOL,
            rhs,
            lhs,
        ));

        let lhs = lambda * kind.residual(&p1, &q1)? + (1.0 - lambda) * kind.residual(&p2, &q2)?;
        let rhs = kind.residual(&pm, &qm)?;
        out.push(Sample::le(
            format!("residual-joint-convexity[{kind}]"),
            IDENTITY_TOL,
            rhs,
            lhs,
        ));

        let mut lhs = 0.0;
        for (w, s) in weights.iter().zip(&states) {
            lhs += w * kind.evaluate(s, &sigma)?;
        }
        let rhs = kind.evaluate(&mixed_state, &sigma)?;
        out.push(Sample::le(
            format!("convexity[{kind}]"),
            IDENTITY_TOL,
            rhs,
            lhs,
        ));
    }
    Ok(())
}

fn oracle(
    rng: &mut TrialRng,
    dim: usize,
    kinds: &[DivergenceKind],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let (rho, sigma) = full_rank_pair(rng, dim)?;
    for kind in kinds {
        let closed = kind.residual_of(&rho, &sigma)?;
        let found = minimize_over_unitaries(*kind, &rho, &sigma)?;
        out.push(Sample::close(
            format!("oracle-agreement[{kind}]"),
            ORACLE_TOL,
            found.value,
            closed,
        ));
        out.push(Sample::new(
            format!("oracle-converged[{kind}]"),
            0.0,
            if found.converged { 0.0 } else { -1.0 },
        ));
        let w = aligning_unitary(rho.operator(), sigma.operator())?;
        let at_w = kind.evaluate(&rho.conjugate(&w)?, &sigma)?;
        out.push(Sample::le(
            format!("oracle-below-aligned[{kind}]"),
            ORACLE_TOL,
            found.value,
            at_w,
        ));
    }
    Ok(())
}

fn inequalities(
    rng: &mut TrialRng,
    dim: usize,
    kinds: &[DivergenceKind],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let (rho, sigma) = full_rank_pair(rng, dim)?;
    let (p, q) = (rho.spectrum(), sigma.spectrum());
    for kind in kinds {
        let d = kind.evaluate(&rho, &sigma)?;
        let res = kind.residual(&p, &q)?;
        out.push(Sample::le(
            format!("quotient-inequality[{kind}]"),
            IDENTITY_TOL,
            res,
            d,
        ));
        let check = assumption_check(*kind, &rho, &sigma)?;
        out.push(Sample::new(
            format!("assumption[{kind}]"),
            0.0,
            if check.holds { 0.0 } else { -1.0 },
        ));
    }

    // von Neumann: |Tr[XY]| <= sum' s_i(X) s_i(Y).
    let x = complex_gaussian(rng, dim, dim);
    let y = complex_gaussian(rng, dim, dim);
    let lhs = (&x * &y).trace().norm();
    let rhs: f64 = singular_values(&x)
        .iter()
        .zip(singular_values(&y))
        .map(|(a, b)| a * b)
        .sum();
    out.push(Sample::le(
        "von-neumann-trace",
        MATRIX_INEQUALITY_TOL,
        lhs,
        rhs,
    ));

    // Mirsky: ||A - B||_1 >= sum' |s_i(A) - s_i(B)|.
    let a = hermitian(rng, dim);
    let b = hermitian(rng, dim);
    let trace_norm: f64 = singular_values(&(a.matrix() - b.matrix())).iter().sum();
    let paired: f64 = singular_values(a.matrix())
        .iter()
        .zip(singular_values(b.matrix()))
        .map(|(x, y)| (x - y).abs())
        .sum();
    out.push(Sample::le(
        "mirsky",
        MATRIX_INEQUALITY_TOL,
        paired,
        trace_norm,
    ));

    // Rearrangement: any pairing is below the sorted one.
    let perm = permutation(rng, dim);
    let shuffled: f64 = (0..dim)
        .map(|i| (p.values()[i] * q.values()[perm[i]]).sqrt())
        .sum();
    let sorted: f64 = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    out.push(Sample::le("rearrangement", EXACT_TOL, shuffled, sorted));

    // Tr[g(U rho U^dag) h(sigma)] <= sum' g(p_i) h(q_i) via the doubly
    // stochastic overlap C_ij = |<q_j|U|p_i>|^2.
    let u = haar_unitary(rng, dim);
    let moved = rho.conjugate(&u)?;
    let monotone: [fn(f64) -> f64; 5] =
        [f64::sqrt, |x| x, |x| x * x, |x| (x + 0.01).ln(), f64::exp];
    let g = monotone[rng.random_range(0..monotone.len())];
    let h = monotone[rng.random_range(0..monotone.len())];
    let lhs = crate::spectral::trace_product_re(&moved.apply(g), &sigma.apply(h));
    let rhs: f64 = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(&a, &b)| g(a) * h(b))
        .sum();
    out.push(Sample::le("monotone-trace-bound", IDENTITY_TOL, lhs, rhs));

    let overlap = sigma.eigen().vectors.adjoint() * u.matrix() * &rho.eigen().vectors;
    let c = overlap.map(|z| z.norm_sqr());
    let row_err = (0..dim)
        .map(|i| (c.row(i).sum() - 1.0).abs())
        .fold(0.0, f64::max);
    let col_err = (0..dim)
        .map(|j| (c.column(j).sum() - 1.0).abs())
        .fold(0.0, f64::max);
    within(
        "doubly-stochastic-overlap",
        MATRIX_INEQUALITY_TOL,
        row_err.max(col_err),
        out,
    );
    Ok(())
}
