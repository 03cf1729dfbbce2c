//! Normalized non-Hermitian evolution `K = H - i Gamma` and the dissipative
//! speed limits it obeys.
//!
//! The state follows `d rho/dt = -i[H, rho] - {Gamma, rho} + 2<Gamma> rho`,
//! which keeps the trace at one. The checks compare the accumulated
//! dissipation `int <<Gamma>> dt` (the standard deviation of `Gamma`) against
//! the Bures angle between interaction-picture states, against the residual
//! Bures angle between spectra, against the Fisher information of the
//! spectrum, and against the change in purity.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::random::{hermitian, rng_from_seed};
use crate::divergence::bures_angle;
use crate::error::{Error, Result};
use crate::residual::residual_bures;
use crate::spectral::{
    c, check_dims, symmetrize, trace_product_re, CMatrix, DensityOperator, HermitianOperator,
    SortedSpectrum, UnitaryOperator, C64,
};
use crate::verify::serialize_extended;

/// Slack for the speed-limit and purity inequalities.
pub const BOUND_TOL: f64 = 1e-7;
/// Slack for the Fisher-information inequality.
pub const FISHER_TOL: f64 = 1e-4;
/// Modes below this weight are dropped from the Fisher sum.
pub const FISHER_FLOOR: f64 = 1e-10;
/// Trace below which an integration step is considered collapsed.
pub const COLLAPSE_TOL: f64 = 1e-12;
/// Eigenvalue gap below which two modes count as degenerate.
pub const GAP_TOL: f64 = 1e-8;
/// Eigenvector overlap below which a sorted label is taken to have swapped.
const CROSSING_OVERLAP: f64 = 0.5;

pub type OperatorFn = Arc<dyn Fn(f64) -> HermitianOperator + Send + Sync>;

/// Time-dependent Hamiltonian `H(t)` and dissipator `Gamma(t)`.
#[derive(Clone)]
pub struct NonHermitianGenerator {
    dim: usize,
    hamiltonian: OperatorFn,
    gamma: OperatorFn,
}

impl std::fmt::Debug for NonHermitianGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonHermitianGenerator")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

/// One piece of a piecewise-constant generator, active from `start` until the
/// next segment begins.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub hamiltonian: HermitianOperator,
    pub gamma: HermitianOperator,
}

impl NonHermitianGenerator {
    pub fn constant(hamiltonian: HermitianOperator, gamma: HermitianOperator) -> Result<Self> {
        check_dims(hamiltonian.dim(), gamma.dim())?;
        let dim = hamiltonian.dim();
        Ok(Self {
            dim,
            hamiltonian: Arc::new(move |_| hamiltonian.clone()),
            gamma: Arc::new(move |_| gamma.clone()),
        })
    }

    /// Dissipation only: `H = 0`.
    pub fn dissipative(gamma: HermitianOperator) -> Self {
        let h = HermitianOperator::zeros(gamma.dim());
        Self::constant(h, gamma).expect("dimensions agree")
    }

    /// Unitary dynamics: `Gamma = 0`.
    pub fn hamiltonian_only(hamiltonian: HermitianOperator) -> Self {
        let g = HermitianOperator::zeros(hamiltonian.dim());
        Self::constant(hamiltonian, g).expect("dimensions agree")
    }

    /// Segments must start at 0 with strictly increasing start times.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidArgument("piecewise generator needs a segment".into()))?;
        if first.start != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "first segment must start at 0, got {}",
                first.start
            )));
        }
        let dim = first.hamiltonian.dim();
        for pair in segments.windows(2) {
            if !(pair[1].start > pair[0].start) {
                return Err(Error::InvalidArgument(format!(
                    "segment starts must increase: {} then {}",
                    pair[0].start, pair[1].start
                )));
            }
        }
        for s in &segments {
            check_dims(dim, s.hamiltonian.dim())?;
            check_dims(dim, s.gamma.dim())?;
        }
        let segments = Arc::new(segments);
        let pick =
            |segs: &[Segment], t: f64| segs.partition_point(|s| s.start <= t).saturating_sub(1);
        let hs = Arc::clone(&segments);
        let gs = Arc::clone(&segments);
        Ok(Self {
            dim,
            hamiltonian: Arc::new(move |t| hs[pick(&hs, t)].hamiltonian.clone()),
            gamma: Arc::new(move |t| gs[pick(&gs, t)].gamma.clone()),
        })
    }

    /// Arbitrary time dependence. Both closures must return `dim x dim`
    /// operators; this is checked at every sampled time.
    pub fn from_fns<H, G>(dim: usize, hamiltonian: H, gamma: G) -> Self
    where
        H: Fn(f64) -> HermitianOperator + Send + Sync + 'static,
        G: Fn(f64) -> HermitianOperator + Send + Sync + 'static,
    {
        Self {
            dim,
            hamiltonian: Arc::new(hamiltonian),
            gamma: Arc::new(gamma),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self, t: f64) -> Result<HermitianOperator> {
        let h = (self.hamiltonian)(t);
        check_dims(self.dim, h.dim())?;
        Ok(h)
    }

    pub fn gamma(&self, t: f64) -> Result<HermitianOperator> {
        let g = (self.gamma)(t);
        check_dims(self.dim, g.dim())?;
        Ok(g)
    }
}

/// Random constant generator with `H` and `Gamma` drawn from the Gaussian
/// unitary ensemble and scaled by the given factors.
pub fn random_generator<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    h_scale: f64,
    gamma_scale: f64,
) -> NonHermitianGenerator {
    let h = hermitian(rng, dim).scale(h_scale);
    let g = hermitian(rng, dim).scale(gamma_scale);
    NonHermitianGenerator::constant(h, g).expect("dimensions agree")
}

/// Sampled solution on a uniform grid `t_k = k t_end / steps`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    pub spectra: Vec<SortedSpectrum>,
    /// `<Gamma>` per grid point.
    pub gamma_mean: Vec<f64>,
    /// `<<Gamma>>`, the standard deviation of `Gamma`, per grid point.
    pub gamma_std: Vec<f64>,
    /// Cumulative trapezoid integral of `gamma_std`.
    pub action: Vec<f64>,
    pub purity: Vec<f64>,
    /// `sum_i p_i (d_t ln p_i)^2`; central differences inside, one-sided
    /// three-point differences at the ends.
    pub fisher: Vec<f64>,
    /// `crossings[k]` flags a sorted-label swap between `t_k` and `t_{k+1}`.
    pub crossings: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    pub fn initial(&self) -> &DensityOperator {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityOperator {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn total_action(&self) -> f64 {
        *self.action.last().expect("non-empty trajectory")
    }

    /// Whether either grid interval adjacent to `k` contains a crossing.
    pub fn near_crossing(&self, k: usize) -> bool {
        (k > 0 && self.crossings[k - 1]) || self.crossings.get(k).copied().unwrap_or(false)
    }
}

fn commutator_rhs(h: &CMatrix, g: &CMatrix, rho: &CMatrix) -> CMatrix {
    let hr = h * rho;
    let rh = rho * h;
    let gr = g * rho;
    let rg = rho * g;
    let mean = trace_product_re(g, rho);
    let i = C64::new(0.0, 1.0);
    (rh - hr) * i - gr - rg + rho * c(2.0 * mean)
}

/// Fixed-step fourth-order Runge-Kutta on the normalized equation, with the
/// trace restored to one after every step.
pub fn integrate(
    gen: &NonHermitianGenerator,
    rho0: &DensityOperator,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_dims(gen.dim(), rho0.dim())?;
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let dt = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(rho0.clone());

    let eval = |t: f64| -> Result<(CMatrix, CMatrix)> {
        Ok((
            gen.hamiltonian(t)?.into_matrix(),
            gen.gamma(t)?.into_matrix(),
        ))
    };
    let (mut h0, mut g0) = eval(0.0)?;
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        let (hm, gm) = eval(t + 0.5 * dt)?;
        let (h1, g1) = eval(t + dt)?;
        let rho = states.last().expect("initial state").matrix();
        let half = c(0.5 * dt);
        let k1 = commutator_rhs(&h0, &g0, rho);
        let k2 = commutator_rhs(&hm, &gm, &(rho + &k1 * half));
        let k3 = commutator_rhs(&hm, &gm, &(rho + &k2 * half));
        let k4 = commutator_rhs(&h1, &g1, &(rho + &k3 * c(dt)));
        let next = rho + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
        let next = symmetrize(&next);
        let trace: f64 = (0..next.nrows()).map(|i| next[(i, i)].re).sum();
        if !(trace >= COLLAPSE_TOL)
            || !trace.is_finite()
            || next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::TraceCollapse { step, trace });
        }
        let state = DensityOperator::normalized(HermitianOperator::from_symmetrized(next))?;
        times.push(step as f64 * dt);
        states.push(state);
        h0 = h1;
        g0 = g1;
    }
    // Pin the last grid point exactly.
    *times.last_mut().expect("non-empty") = t_end;
    observe(gen, times, states)
}

fn observe(
    gen: &NonHermitianGenerator,
    times: Vec<f64>,
    states: Vec<DensityOperator>,
) -> Result<Trajectory> {
    let n = states.len();
    let spectra: Vec<SortedSpectrum> = states.iter().map(|s| s.spectrum()).collect();
    let mut gamma_mean = Vec::with_capacity(n);
    let mut gamma_std = Vec::with_capacity(n);
    for (t, s) in times.iter().zip(&states) {
        let g = gen.gamma(*t)?.into_matrix();
        let mean = s.expectation(&g);
        let second = s.expectation(&(&g * &g));
        gamma_mean.push(mean);
        gamma_std.push((second - mean * mean).max(0.0).sqrt());
    }
    let mut action = Vec::with_capacity(n);
    action.push(0.0);
    for k in 1..n {
        let dt = times[k] - times[k - 1];
        action.push(action[k - 1] + 0.5 * dt * (gamma_std[k] + gamma_std[k - 1]));
    }
    let purity = states.iter().map(|s| s.purity()).collect();
    let crossings = (0..n - 1)
        .map(|k| crossing_between(&states[k], &states[k + 1]))
        .collect();
    let mut traj = Trajectory {
        times,
        states,
        spectra,
        gamma_mean,
        gamma_std,
        action,
        purity,
        fisher: Vec::new(),
        crossings,
    };
    traj.fisher = (0..n).map(|k| fisher_at(&traj, k).0).collect();
    Ok(traj)
}

/// Non-degenerate modes of `spectrum`: gaps to both neighbours above
/// [`GAP_TOL`].
fn isolated(values: &[f64], i: usize) -> bool {
    let left = i == 0 || values[i] - values[i - 1] > GAP_TOL;
    let right = i + 1 == values.len() || values[i + 1] - values[i] > GAP_TOL;
    left && right
}

fn crossing_between(a: &DensityOperator, b: &DensityOperator) -> bool {
    let (ea, eb) = (a.eigen(), b.eigen());
    (0..a.dim()).any(|i| {
        if !isolated(&ea.values, i) || !isolated(&eb.values, i) {
            return false;
        }
        let overlap = ea.vectors.column(i).dotc(&eb.vectors.column(i)).norm();
        overlap < CROSSING_OVERLAP
    })
}

/// Finite-difference Fisher information and the mass of dropped modes.
fn fisher_at(traj: &Trajectory, k: usize) -> (f64, f64) {
    let n = traj.len();
    let dt = traj.dt();
    let (stencil, weights): ([usize; 3], [f64; 3]) = if k == 0 {
        ([0, 1, 2], [-1.5, 2.0, -0.5])
    } else if k + 1 == n {
        ([n - 3, n - 2, n - 1], [0.5, -2.0, 1.5])
    } else {
        ([k - 1, k, k + 1], [-0.5, 0.0, 0.5])
    };
    let p = traj.spectra[k].values();
    let mut total = 0.0;
    let mut dropped = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        let samples = stencil.map(|j| traj.spectra[j].values()[i]);
        if samples.iter().any(|&x| x < FISHER_FLOOR) {
            dropped += pi.max(0.0);
            continue;
        }
        let d: f64 = samples
            .iter()
            .zip(weights)
            .map(|(x, w)| w * x.ln())
            .sum::<f64>()
            / dt;
        total += pi * d * d;
    }
    (total, dropped)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FisherSample {
    pub value: f64,
    pub dropped_mass: f64,
    /// A sorted-label swap occurs in an adjacent grid interval.
    pub crossing: bool,
}

/// Central-difference Fisher information at an interior grid point.
pub fn fisher_information(traj: &Trajectory, k: usize) -> Result<FisherSample> {
    if k == 0 || k + 1 >= traj.len() {
        return Err(Error::NotInterior {
            index: k,
            len: traj.len(),
        });
    }
    let (value, dropped_mass) = fisher_at(traj, k);
    Ok(FisherSample {
        value,
        dropped_mass,
        crossing: traj.near_crossing(k),
    })
}

/// Time-ordered product of midpoint exponentials `exp(-i H(t_mid) dt)`,
/// later factors on the left.
pub fn interaction_unitary(
    gen: &NonHermitianGenerator,
    t: f64,
    steps: usize,
) -> Result<UnitaryOperator> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let dt = t / steps as f64;
    let mut v = UnitaryOperator::identity(gen.dim());
    for k in 0..steps {
        let mid = (k as f64 + 0.5) * dt;
        let step = gen.hamiltonian(mid)?.exp_i(-dt);
        v = step.compose(&v)?;
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Violated
    }
}

/// `lhs >= rhs` up to a tolerance; `margin = lhs - rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64, tol: f64, applicable: bool) -> Self {
        let verdict = if !applicable {
            Verdict::NotApplicable
        } else if lhs >= rhs - tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        Self {
            lhs,
            rhs,
            margin: lhs - rhs,
            verdict,
        }
    }
}

/// Action against the Bures angle between `V rho(0) V^dag` and `rho(tau)`,
/// with `V` the interaction-picture unitary on the trajectory grid.
pub fn check_bound_state(traj: &Trajectory, gen: &NonHermitianGenerator) -> Result<BoundCheck> {
    let v = interaction_unitary(gen, traj.t_end(), traj.len() - 1)?;
    let moved = traj.initial().conjugate(&v)?;
    let rhs = bures_angle(&moved, traj.last())?;
    let lhs = traj.total_action();
    Ok(BoundCheck::new(lhs, rhs, BOUND_TOL, lhs <= FRAC_PI_2))
}

/// Action over `[t_i, t_j]` against the residual Bures angle between the
/// spectra at its ends.
pub fn check_bound_residual_between(traj: &Trajectory, i: usize, j: usize) -> Result<BoundCheck> {
    if i > j || j >= traj.len() {
        return Err(Error::InvalidArgument(format!(
            "sub-interval [{i}, {j}] outside grid of {} points",
            traj.len()
        )));
    }
    let lhs = traj.action[j] - traj.action[i];
    let rhs = residual_bures(&traj.spectra[i], &traj.spectra[j])?;
    Ok(BoundCheck::new(lhs, rhs, BOUND_TOL, lhs <= FRAC_PI_2))
}

/// Residual bound over the whole trajectory.
pub fn check_bound_residual(traj: &Trajectory) -> Result<BoundCheck> {
    check_bound_residual_between(traj, 0, traj.len() - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalReport {
    pub evaluated: usize,
    pub not_applicable: usize,
    pub violations: usize,
    #[serde(serialize_with = "serialize_extended")]
    pub worst_margin: f64,
}

impl IntervalReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Residual bound on `count` random grid sub-intervals.
pub fn check_bound_residual_sampled(
    traj: &Trajectory,
    count: usize,
    seed: u64,
) -> Result<IntervalReport> {
    let mut rng = rng_from_seed(seed);
    let pairs: Vec<(usize, usize)> = (0..count)
        .map(|_| {
            let picked = sample(&mut rng, traj.len(), 2);
            let (a, b) = (picked.index(0), picked.index(1));
            (a.min(b), a.max(b))
        })
        .collect();
    let checks = pairs
        .par_iter()
        .map(|&(i, j)| check_bound_residual_between(traj, i, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalReport {
        evaluated: checks
            .iter()
            .filter(|c| c.verdict != Verdict::NotApplicable)
            .count(),
        not_applicable: checks
            .iter()
            .filter(|c| c.verdict == Verdict::NotApplicable)
            .count(),
        violations: checks
            .iter()
            .filter(|c| c.verdict == Verdict::Violated)
            .count(),
        worst_margin: checks
            .iter()
            .filter(|c| c.verdict != Verdict::NotApplicable)
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min),
    })
}

/// `2 sin(action)` against `|P(tau) - P(0)|`.
pub fn check_purity_bound(traj: &Trajectory) -> BoundCheck {
    let action = traj.total_action();
    let lhs = 2.0 * action.sin();
    let rhs = (traj.purity[traj.len() - 1] - traj.purity[0]).abs();
    BoundCheck::new(lhs, rhs, BOUND_TOL, action < FRAC_PI_2)
}

/// `<<Gamma>> >= sqrt(I) / 2` over interior grid points away from crossings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FisherReport {
    pub evaluated: usize,
    pub skipped_crossings: usize,
    pub violations: usize,
    /// Smallest `<<Gamma>> - sqrt(I)/2`.
    #[serde(serialize_with = "serialize_extended")]
    pub worst_margin: f64,
    /// Largest `|<<Gamma>> - sqrt(I)/2|`.
    pub max_deviation: f64,
}

impl FisherReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn check_fisher_bound(traj: &Trajectory) -> Result<FisherReport> {
    let mut report = FisherReport {
        evaluated: 0,
        skipped_crossings: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        max_deviation: 0.0,
    };
    for k in 1..traj.len() - 1 {
        let sample = fisher_information(traj, k)?;
        if sample.crossing {
            report.skipped_crossings += 1;
            continue;
        }
        let margin = traj.gamma_std[k] - 0.5 * sample.value.sqrt();
        report.evaluated += 1;
        if margin < -FISHER_TOL {
            report.violations += 1;
        }
        report.worst_margin = report.worst_margin.min(margin);
        report.max_deviation = report.max_deviation.max(margin.abs());
    }
    Ok(report)
}

/// Integrates `d_t p_i = -2 p_i <p_i|Gamma - <Gamma>|p_i>` along the
/// trajectory's eigenvectors and returns the largest deviation from the
/// integrated spectra. Degenerate clusters share their mean rate; each
/// crossing restarts the comparison from the trajectory.
pub fn eigenvalue_ode_deviation(traj: &Trajectory, gen: &NonHermitianGenerator) -> Result<f64> {
    let n = traj.dim();
    let rates = |k: usize| -> Result<Vec<f64>> {
        let g = gen.gamma(traj.times[k])?.into_matrix();
        let eig = traj.states[k].eigen();
        let mut r: Vec<f64> = (0..n)
            .map(|i| {
                let v = eig.vectors.column(i);
                (v.dotc(&(&g * v))).re - traj.gamma_mean[k]
            })
            .collect();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && eig.values[end] - eig.values[end - 1] <= GAP_TOL {
                end += 1;
            }
            let mean = r[start..end].iter().sum::<f64>() / (end - start) as f64;
            r[start..end].iter_mut().for_each(|x| *x = mean);
            start = end;
        }
        Ok(r)
    };
    let mut log_growth = vec![0.0; n];
    let mut anchor = 0;
    let mut prev = rates(0)?;
    let mut worst = 0.0f64;
    for k in 1..traj.len() {
        let cur = rates(k)?;
        if traj.crossings[k - 1] {
            anchor = k;
            log_growth.iter_mut().for_each(|x| *x = 0.0);
        } else {
            let dt = traj.times[k] - traj.times[k - 1];
            for i in 0..n {
                log_growth[i] -= dt * (prev[i] + cur[i]);
            }
            let base = traj.spectra[anchor].values();
            let actual = traj.spectra[k].values();
            for i in 0..n {
                worst = worst.max((base[i] * log_growth[i].exp() - actual[i]).abs());
            }
        }
        prev = cur;
    }
    Ok(worst)
}

/// Generator part of a scenario file: either constant operators or a list of
/// piecewise-constant segments.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Piecewise {
        segments: Vec<Segment>,
    },
    Constant {
        #[serde(default)]
        hamiltonian: Option<HermitianOperator>,
        #[serde(default)]
        gamma: Option<HermitianOperator>,
    },
}

/// Scenario file:
/// `{"rho0": op, "t_end": x, "steps": n, "hamiltonian": op, "gamma": op}` or
/// with `"segments": [{"start": t, "hamiltonian": op, "gamma": op}, ..]`.
/// A missing `hamiltonian` or `gamma` is zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub rho0: DensityOperator,
    pub t_end: f64,
    pub steps: usize,
    #[serde(flatten)]
    pub generator: GeneratorSpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn generator(&self) -> Result<NonHermitianGenerator> {
        let dim = self.rho0.dim();
        match &self.generator {
            GeneratorSpec::Piecewise { segments } => {
                NonHermitianGenerator::piecewise(segments.clone())
            }
            GeneratorSpec::Constant { hamiltonian, gamma } => {
                let h = hamiltonian
                    .clone()
                    .unwrap_or_else(|| HermitianOperator::zeros(dim));
                let g = gamma
                    .clone()
                    .unwrap_or_else(|| HermitianOperator::zeros(dim));
                NonHermitianGenerator::constant(h, g)
            }
        }
    }

    pub fn run(&self) -> Result<(NonHermitianGenerator, Trajectory)> {
        let gen = self.generator()?;
        let traj = integrate(&gen, &self.rho0, self.t_end, self.steps)?;
        Ok((gen, traj))
    }
}

/// All bound checks for one trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub t_end: f64,
    pub steps: usize,
    pub initial_spectrum: Vec<f64>,
    pub final_spectrum: Vec<f64>,
    pub action: f64,
    pub purity_initial: f64,
    pub purity_final: f64,
    pub state_bound: BoundCheck,
    pub residual_bound: BoundCheck,
    pub residual_subintervals: IntervalReport,
    pub fisher: FisherReport,
    pub purity_bound: BoundCheck,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.state_bound.verdict.passed()
            && self.residual_bound.verdict.passed()
            && self.residual_subintervals.passed()
            && self.fisher.passed()
            && self.purity_bound.verdict.passed()
    }
}

/// Number of random sub-intervals checked by [`summarize`].
pub const SUBINTERVAL_SAMPLES: usize = 100;

pub fn summarize(traj: &Trajectory, gen: &NonHermitianGenerator, seed: u64) -> Result<Summary> {
    Ok(Summary {
        t_end: traj.t_end(),
        steps: traj.len() - 1,
        initial_spectrum: traj.spectra[0].values().to_vec(),
        final_spectrum: traj.spectra[traj.len() - 1].values().to_vec(),
        action: traj.total_action(),
        purity_initial: traj.purity[0],
        purity_final: traj.purity[traj.len() - 1],
        state_bound: check_bound_state(traj, gen)?,
        residual_bound: check_bound_residual(traj)?,
        residual_subintervals: check_bound_residual_sampled(traj, SUBINTERVAL_SAMPLES, seed)?,
        fisher: check_fisher_bound(traj)?,
        purity_bound: check_purity_bound(traj),
    })
}

/// CSV header for a trajectory of dimension `dim`.
pub fn csv_header(dim: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=dim).map(|i| format!("p_{i}")));
    for name in [
        "gamma_mean",
        "gamma_std",
        "action",
        "purity",
        "fisher",
        "bound_lhs",
        "bound_rhs",
    ] {
        cols.push(name.to_string());
    }
    cols
}

/// One row per grid point. `bound_lhs`/`bound_rhs` are the residual speed
/// limit on `[0, t]`: the action so far and the residual Bures angle from
/// the initial spectrum.
pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(traj.dim()))?;
    for k in 0..traj.len() {
        let mut row = vec![traj.times[k]];
        row.extend_from_slice(traj.spectra[k].values());
        row.extend([
            traj.gamma_mean[k],
            traj.gamma_std[k],
            traj.action[k],
            traj.purity[k],
            traj.fisher[k],
            traj.action[k],
            residual_bures(&traj.spectra[0], &traj.spectra[k])?,
        ]);
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random;
    use std::f64::consts::PI;

    fn pauli_x() -> HermitianOperator {
        HermitianOperator::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> HermitianOperator {
        HermitianOperator::diagonal(&[1.0, -1.0]).unwrap()
    }

    fn analytic(steps: usize) -> (NonHermitianGenerator, Trajectory) {
        let gen =
            NonHermitianGenerator::dissipative(HermitianOperator::diagonal(&[0.0, 1.0]).unwrap());
        let traj = integrate(&gen, &DensityOperator::maximally_mixed(2), 0.5, steps).unwrap();
        (gen, traj)
    }

    fn p2_exact(t: f64) -> f64 {
        let e = (-2.0 * t).exp();
        e / (1.0 + e)
    }

    #[test]
    fn diagonal_decay_matches_closed_form() {
        let (_, traj) = analytic(1000);
        let p = traj.spectra.last().unwrap().values();
        assert!((p[0] - p2_exact(0.5)).abs() < 1e-10);
        assert!((p[0] - 0.268_941_421_369_995).abs() < 1e-10);
    }

    #[test]
    fn step_halving_orders() {
        let err = |steps| {
            let (_, traj) = analytic(steps);
            let p = traj.spectra.last().unwrap().values()[0];
            let action_exact = 1f64.atan() - (-0.5f64).exp().atan();
            (
                (p - p2_exact(0.5)).abs(),
                (traj.total_action() - action_exact).abs(),
            )
        };
        let (s1, a1) = err(10);
        let (s2, a2) = err(20);
        let spectral_ratio = s1 / s2;
        let action_ratio = a1 / a2;
        assert!((12.0..20.0).contains(&spectral_ratio), "{spectral_ratio}");
        assert!((3.5..4.5).contains(&action_ratio), "{action_ratio}");
    }

    #[test]
    fn action_is_monotone_and_trace_is_one() {
        let mut rng = random::rng_from_seed(3);
        let gen = random_generator(&mut rng, 3, 1.0, 0.5);
        let rho0 = random::density(&mut rng, 3, 3).unwrap();
        let traj = integrate(&gen, &rho0, 1.0, 500).unwrap();
        for w in traj.action.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for (s, &p) in traj.states.iter().zip(&traj.purity) {
            assert!((s.operator().trace() - 1.0).abs() < 1e-10);
            assert!((1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn pure_states_stay_pure() {
        let mut rng = random::rng_from_seed(8);
        let gen = random_generator(&mut rng, 3, 1.0, 1.0);
        let rho0 = random::density(&mut rng, 3, 1).unwrap();
        let traj = integrate(&gen, &rho0, 1.0, 1000).unwrap();
        for &p in &traj.purity {
            assert!((p - 1.0).abs() < 1e-8, "{p}");
        }
    }

    #[test]
    fn unitary_flow_keeps_the_spectrum() {
        let rho0 = random::random_density(2, 2, 4).unwrap();
        let gen = NonHermitianGenerator::hamiltonian_only(pauli_z().add(&pauli_x()).unwrap());
        let traj = integrate(&gen, &rho0, 10.0, 2000).unwrap();
        let p0 = traj.spectra[0].values();
        for s in &traj.spectra {
            for (a, b) in s.values().iter().zip(p0) {
                assert!((a - b).abs() < 1e-8);
            }
        }
        assert!(traj.total_action() < 1e-12);
        let state = check_bound_state(&traj, &gen).unwrap();
        assert!(
            state.lhs.abs() < 1e-8 && state.rhs.abs() < 1e-8,
            "{state:?}"
        );
    }

    #[test]
    fn interaction_unitary_cases() {
        let zero = NonHermitianGenerator::hamiltonian_only(HermitianOperator::zeros(2));
        let v = interaction_unitary(&zero, 1.0, 10).unwrap();
        assert!((v.matrix() - CMatrix::identity(2, 2)).norm() < 1e-15);

        let x = NonHermitianGenerator::hamiltonian_only(pauli_x());
        let v = interaction_unitary(&x, PI, 7).unwrap();
        assert!((v.matrix() + CMatrix::identity(2, 2)).norm() < 1e-9);

        // H(t) = cos(t) Z; exp(-i Z sin(t)).
        let gen = NonHermitianGenerator::from_fns(
            2,
            |t| pauli_z().scale(t.cos()),
            |_| HermitianOperator::zeros(2),
        );
        let t = 1.3;
        let v = interaction_unitary(&gen, t, 20_000).unwrap();
        let want = pauli_z().exp_i(-t.sin());
        assert!((v.matrix() - want.matrix()).norm() < 1e-8);
        assert!(v.unitarity_defect() < 1e-9);
        assert!(interaction_unitary(&gen, t, 0).is_err());
    }

    #[test]
    fn analytic_fisher_equality() {
        let (_, traj) = analytic(2000);
        let start = fisher_information(&traj, 1).unwrap();
        assert!((0.5 * start.value.sqrt() - 0.5).abs() < 1e-4);
        let report = check_fisher_bound(&traj).unwrap();
        assert_eq!(report.skipped_crossings, 0);
        assert!(report.max_deviation < 1e-4, "{report:?}");
        assert!(fisher_information(&traj, 0).is_err());
        assert!(fisher_information(&traj, traj.len() - 1).is_err());
    }

    #[test]
    fn eigenvalue_ode_matches_spectra() {
        let mut rng = random::rng_from_seed(21);
        let gen = random_generator(&mut rng, 3, 1.0, 0.7);
        let rho0 = random::density(&mut rng, 3, 3).unwrap();
        let traj = integrate(&gen, &rho0, 1.0, 2000).unwrap();
        assert!(eigenvalue_ode_deviation(&traj, &gen).unwrap() < 1e-5);
    }

    #[test]
    fn random_bounds_hold() {
        let mut rng = random::rng_from_seed(99);
        let gen = random_generator(&mut rng, 2, 1.0, 0.5);
        let rho0 = random::density(&mut rng, 2, 2).unwrap();
        let traj = integrate(&gen, &rho0, 0.5, 1000).unwrap();
        let summary = summarize(&traj, &gen, 1).unwrap();
        assert!(summary.passed(), "{summary:#?}");
        assert_eq!(summary.state_bound.verdict, Verdict::Holds);
    }

    #[test]
    fn long_horizons_are_not_applicable() {
        // K = 10 X - i Z/2 has a real spectrum, so the state keeps rotating
        // and the action grows without bound.
        let gen =
            NonHermitianGenerator::constant(pauli_x().scale(10.0), pauli_z().scale(0.5)).unwrap();
        let traj = integrate(
            &gen,
            &DensityOperator::diagonal(&[1.0, 0.0]).unwrap(),
            10.0,
            5000,
        )
        .unwrap();
        assert!(traj.total_action() > FRAC_PI_2);
        assert_eq!(check_purity_bound(&traj).verdict, Verdict::NotApplicable);
        assert_eq!(
            check_bound_residual(&traj).unwrap().verdict,
            Verdict::NotApplicable
        );
        assert_eq!(
            check_bound_state(&traj, &gen).unwrap().verdict,
            Verdict::NotApplicable
        );
    }

    #[test]
    fn piecewise_generator_switches() {
        let seg = |start: f64, g: f64| Segment {
            start,
            hamiltonian: HermitianOperator::zeros(2),
            gamma: HermitianOperator::diagonal(&[0.0, g]).unwrap(),
        };
        let gen = NonHermitianGenerator::piecewise(vec![seg(0.0, 1.0), seg(1.0, 0.0)]).unwrap();
        assert_eq!(gen.gamma(0.5).unwrap().matrix()[(1, 1)].re, 1.0);
        assert_eq!(gen.gamma(1.0).unwrap().matrix()[(1, 1)].re, 0.0);
        assert!(NonHermitianGenerator::piecewise(vec![seg(0.5, 1.0)]).is_err());
        assert!(NonHermitianGenerator::piecewise(vec![seg(0.0, 1.0), seg(0.0, 1.0)]).is_err());
        assert!(NonHermitianGenerator::piecewise(Vec::new()).is_err());
    }

    #[test]
    fn integrate_rejects_bad_input() {
        let (gen, _) = analytic(2);
        let rho = DensityOperator::maximally_mixed(2);
        assert!(integrate(&gen, &rho, 1.0, 1).is_err());
        assert!(integrate(&gen, &rho, 0.0, 10).is_err());
        assert!(matches!(
            integrate(&gen, &DensityOperator::maximally_mixed(3), 1.0, 10),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unstable_steps_abort_with_index() {
        let gen =
            NonHermitianGenerator::dissipative(HermitianOperator::diagonal(&[0.0, 1e4]).unwrap());
        let err = integrate(&gen, &DensityOperator::maximally_mixed(2), 10.0, 10).unwrap_err();
        assert!(
            matches!(
                err,
                Error::TraceCollapse { step: 1, .. } | Error::NotPositive(_)
            ),
            "{err:?}"
        );
    }

    #[test]
    fn scenario_json_and_csv() {
        let text = r#"{
            "rho0": {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]]},
            "t_end": 0.5,
            "steps": 2000,
            "gamma": {"dim": 2, "re": [[0.0, 0.0], [0.0, 1.0]]}
        }"#;
        let scenario = Scenario::from_json(text).unwrap();
        let (gen, traj) = scenario.run().unwrap();
        assert!((traj.spectra[2000].values()[0] - p2_exact(0.5)).abs() < 1e-8);
        let mut buf = Vec::new();
        write_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,p_1,p_2,gamma_mean,gamma_std,action,purity,fisher,bound_lhs,bound_rhs"
        );
        assert_eq!(lines.count(), 2001);
        // The residual bound is saturated here; the trapezoid action sits
        // O(dt^2) below the exact value, which needs a fine grid to stay
        // inside the tolerance.
        let summary = summarize(&traj, &gen, 0).unwrap();
        assert!(summary.passed(), "{summary:#?}");

        let piecewise = r#"{
            "rho0": {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]]},
            "t_end": 1.0,
            "steps": 100,
            "segments": [
                {"start": 0.0, "hamiltonian": {"dim": 2, "re": [[1.0, 0.0], [0.0, -1.0]]},
                 "gamma": {"dim": 2, "re": [[0.0, 0.0], [0.0, 1.0]]}},
                {"start": 0.5, "hamiltonian": {"dim": 2, "re": [[0.0, 1.0], [1.0, 0.0]]},
                 "gamma": {"dim": 2, "re": [[0.0, 0.0], [0.0, 0.0]]}}
            ]
        }"#;
        let scenario = Scenario::from_json(piecewise).unwrap();
        assert!(matches!(
            scenario.generator,
            GeneratorSpec::Piecewise { .. }
        ));
        scenario.run().unwrap();
        assert!(Scenario::from_json("{").is_err());
    }
}
