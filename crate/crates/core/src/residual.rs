//! Unitarily residual measures: divergences between equivalence classes.
//!
//! `d~([rho], [sigma]) = min_U d(U rho U^dag, sigma)`. For the four kinds in
//! [`DivergenceKind`] the minimum has a closed form in the sorted spectra,
//! pairing the i-th smallest eigenvalue of one state with the i-th smallest of
//! the other. [`minimize_over_unitaries`] evaluates the definition directly
//! and is the oracle for those closed forms.

use rayon::prelude::*;

use crate::channels::random::{haar_unitary, rng_from_seed};
use crate::divergence::{DivergenceKind, Prepared};
use crate::error::{Error, Result};
use crate::spectral::{
    aligning_from_bases, check_dims, CMatrix, DensityOperator, SortedSpectrum, UnitaryOperator,
    C64, SUPPORT_TOL,
};

/// Probability check applied to residual-metric inputs.
pub const PROBABILITY_TOL: f64 = 1e-10;
/// Agreement required by [`check_assumption`].
pub const ASSUMPTION_TOL: f64 = 1e-9;
/// Largest dimension accepted by the unitary-group oracle.
pub const ORACLE_MAX_DIM: usize = 8;

fn support(x: f64) -> f64 {
    if x > SUPPORT_TOL {
        x
    } else {
        0.0
    }
}

fn paired<'a>(
    p: &'a SortedSpectrum,
    q: &'a SortedSpectrum,
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    check_dims(p.len(), q.len())?;
    Ok(p.values().iter().copied().zip(q.values().iter().copied()))
}

/// Bhattacharyya angle `arccos(sum' sqrt(p_i q_i))`, evaluated as
/// `2 asin(h / 2)` with `h^2 = sum' (sqrt p_i - sqrt q_i)^2`.
pub fn residual_bures(p: &SortedSpectrum, q: &SortedSpectrum) -> Result<f64> {
    p.require_probability(PROBABILITY_TOL)?;
    q.require_probability(PROBABILITY_TOL)?;
    let h2: f64 = paired(p, q)?
        .map(|(a, b)| {
            let d = a.max(0.0).sqrt() - b.max(0.0).sqrt();
            d * d
        })
        .sum();
    Ok(2.0 * (0.5 * h2.sqrt()).min(1.0).asin())
}

/// Total variation `1/2 sum' |p_i - q_i|`.
pub fn residual_trace(p: &SortedSpectrum, q: &SortedSpectrum) -> Result<f64> {
    p.require_probability(PROBABILITY_TOL)?;
    q.require_probability(PROBABILITY_TOL)?;
    Ok(0.5 * paired(p, q)?.map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Renyi divergence `(alpha - 1)^-1 ln sum' p_i^alpha q_i^(1 - alpha)`.
pub fn residual_renyi(p: &SortedSpectrum, q: &SortedSpectrum, alpha: f64) -> Result<f64> {
    DivergenceKind::petz_renyi(alpha)?;
    let mut total = 0.0;
    for (a, b) in paired(p, q)? {
        let (a, b) = (support(a), support(b));
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        total += a.powf(alpha) * b.powf(1.0 - alpha);
    }
    if !(total > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok((total.ln() / (alpha - 1.0)).max(0.0))
}

/// Kullback-Leibler divergence `sum' p_i ln(p_i / q_i)`.
pub fn residual_kl(p: &SortedSpectrum, q: &SortedSpectrum) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in paired(p, q)? {
        let (a, b) = (support(a), support(b));
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += a * (a / b).ln();
    }
    Ok(total.max(0.0))
}

impl DivergenceKind {
    /// Closed-form residual measure on sorted spectra.
    pub fn residual(&self, p: &SortedSpectrum, q: &SortedSpectrum) -> Result<f64> {
        match *self {
            DivergenceKind::BuresAngle => residual_bures(p, q),
            DivergenceKind::TraceDistance => residual_trace(p, q),
            DivergenceKind::PetzRenyi { alpha } => residual_renyi(p, q, alpha),
            DivergenceKind::RelativeEntropy => residual_kl(p, q),
        }
    }

    /// Closed-form residual measure between the classes of two states.
    pub fn residual_of(&self, rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
        self.residual(&rho.spectrum(), &sigma.spectrum())
    }
}

/// `d` on the commuting representatives `sum' p_i |p_i><p_i|` and
/// `sum' q_i |p_i><p_i|` (the eigenbasis of `rho`), next to the closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssumptionCheck {
    pub closed_form: f64,
    pub commuting: f64,
    pub holds: bool,
}

pub fn assumption_check(
    kind: DivergenceKind,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<AssumptionCheck> {
    check_dims(rho.dim(), sigma.dim())?;
    let p = rho.spectrum();
    let q = sigma.spectrum();
    let closed_form = kind.residual(&p, &q)?;
    let basis = &rho.eigen().vectors;
    let p_rep = DensityOperator::in_basis(&p, basis)?;
    let q_rep = DensityOperator::in_basis(&q, basis)?;
    let commuting = kind.evaluate(&p_rep, &q_rep)?;
    let holds = if closed_form.is_infinite() || commuting.is_infinite() {
        closed_form == commuting
    } else {
        (closed_form - commuting).abs() <= ASSUMPTION_TOL
    };
    Ok(AssumptionCheck {
        closed_form,
        commuting,
        holds,
    })
}

/// True iff the closed-form residual equals `d` on the commuting
/// representatives within [`ASSUMPTION_TOL`].
pub fn check_assumption(
    kind: DivergenceKind,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<bool> {
    Ok(assumption_check(kind, rho, sigma)?.holds)
}

/// Multi-start compass search settings for [`minimize_over_unitaries_with`].
#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Total starts: identity, the aligning unitary, then Haar draws.
    pub restarts: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            initial_step: 0.5,
            min_step: 1e-9,
            max_iterations: 5000,
            seed: 0x05EE_D0F0_AC1E,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    Identity,
    Aligning,
    Haar,
}

#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub start: StartKind,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub value: f64,
    pub minimizer: UnitaryOperator,
    /// At least one restart reached the step-size floor.
    pub converged: bool,
    pub restarts: Vec<RestartOutcome>,
}

impl Minimization {
    /// Best value over the Haar-random starts only.
    pub fn best_random_start(&self) -> Option<f64> {
        self.restarts
            .iter()
            .filter(|r| r.start == StartKind::Haar)
            .map(|r| r.value)
            .min_by(f64::total_cmp)
    }
}

/// `min_U d(U rho U^dag, sigma)` by multi-start local search with default
/// settings.
pub fn minimize_over_unitaries(
    kind: DivergenceKind,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<Minimization> {
    minimize_over_unitaries_with(kind, rho, sigma, &OracleConfig::default())
}

/// Generators of the local moves `U -> exp(i s E) U`, `E` running over the
/// `n^2` Hermitian basis matrices.
#[derive(Clone, Copy, Debug)]
enum Generator {
    /// `|k><k|`
    Phase(usize),
    /// `|j><k| + |k><j|`
    Symmetric(usize, usize),
    /// `-i|j><k| + i|k><j|`
    Antisymmetric(usize, usize),
}

fn generators(n: usize) -> Vec<Generator> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(Generator::Phase(k));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            out.push(Generator::Symmetric(j, k));
            out.push(Generator::Antisymmetric(j, k));
        }
    }
    out
}

/// `exp(i s E) U`; only the rows touched by `E` change.
fn rotate(u: &CMatrix, g: Generator, s: f64) -> CMatrix {
    let mut out = u.clone();
    let (cs, sn) = (s.cos(), s.sin());
    match g {
        Generator::Phase(k) => {
            let phase = C64::from_polar(1.0, s);
            for col in 0..u.ncols() {
                out[(k, col)] = u[(k, col)] * phase;
            }
        }
        Generator::Symmetric(j, k) => {
            // cos s I + i sin s X on (j, k)
            let isn = C64::new(0.0, sn);
            for col in 0..u.ncols() {
                let (a, b) = (u[(j, col)], u[(k, col)]);
                out[(j, col)] = a * cs + b * isn;
                out[(k, col)] = a * isn + b * cs;
            }
        }
        Generator::Antisymmetric(j, k) => {
            // cos s I + i sin s Y = [[cos, sin], [-sin, cos]] on (j, k)
            for col in 0..u.ncols() {
                let (a, b) = (u[(j, col)], u[(k, col)]);
                out[(j, col)] = a * cs + b * sn;
                out[(k, col)] = b * cs - a * sn;
            }
        }
    }
    out
}

fn compass_search(
    objective: &Prepared,
    start: CMatrix,
    config: &OracleConfig,
) -> (CMatrix, f64, usize, bool) {
    let n = start.nrows();
    let dirs = generators(n);
    let mut u = start;
    let mut best = objective.value_rotated(&u);
    let mut step = config.initial_step;
    let mut iterations = 0;
    while step >= config.min_step {
        if iterations >= config.max_iterations {
            return (u, best, iterations, false);
        }
        iterations += 1;
        let mut improved = false;
        for &g in &dirs {
            for s in [step, -step] {
                let cand = rotate(&u, g, s);
                let v = objective.value_rotated(&cand);
                if v < best {
                    best = v;
                    u = cand;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (u, best, iterations, true)
}

pub fn minimize_over_unitaries_with(
    kind: DivergenceKind,
    rho: &DensityOperator,
    sigma: &DensityOperator,
    config: &OracleConfig,
) -> Result<Minimization> {
    check_dims(rho.dim(), sigma.dim())?;
    let n = rho.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "unitary-group oracle supports dim <= {ORACLE_MAX_DIM}, got {n}"
        )));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".into(),
        ));
    }
    let objective = Prepared::new(kind, rho, sigma)?;

    let mut starts = vec![(StartKind::Identity, CMatrix::identity(n, n))];
    if config.restarts > 1 {
        let w = aligning_from_bases(&rho.eigen().vectors, &sigma.eigen().vectors);
        starts.push((StartKind::Aligning, w.matrix().clone()));
    }
    let mut rng = rng_from_seed(config.seed);
    while starts.len() < config.restarts {
        starts.push((StartKind::Haar, haar_unitary(&mut rng, n).matrix().clone()));
    }

    let runs: Vec<(StartKind, CMatrix, f64, usize, bool)> = starts
        .into_par_iter()
        .map(|(kind, start)| {
            let (u, v, it, conv) = compass_search(&objective, start, config);
            (kind, u, v, it, conv)
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .2.total_cmp(&b.1 .2))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let restarts = runs
        .iter()
        .map(|(start, _, value, iterations, converged)| RestartOutcome {
            start: *start,
            value: *value,
            iterations: *iterations,
            converged: *converged,
        })
        .collect::<Vec<_>>();
    let converged = restarts.iter().any(|r| r.converged);
    let (_, u, value, _, _) = runs.into_iter().nth(best).expect("index in range");
    Ok(Minimization {
        value,
        minimizer: UnitaryOperator::from_unchecked(u),
        converged,
        restarts,
    })
}
