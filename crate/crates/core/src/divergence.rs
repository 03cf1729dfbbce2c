//! Unitarily invariant quantum divergences on density operators.
//!
//! Matrix functions act on the clamped spectrum; logarithms and negative
//! powers only see the support (eigenvalues above [`SUPPORT_TOL`]). A support
//! violation yields `f64::INFINITY`, which is a value and not an error.

use std::fmt;

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    check_dims, symmetrize, trace_product_re, CMatrix, DensityOperator, SUPPORT_TOL,
};

/// The divergences exposed behind one contract.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DivergenceKind {
    BuresAngle,
    TraceDistance,
    PetzRenyi { alpha: f64 },
    RelativeEntropy,
}

impl DivergenceKind {
    /// Validated Petz-Renyi order.
    pub fn petz_renyi(alpha: f64) -> Result<Self> {
        let kind = DivergenceKind::PetzRenyi { alpha };
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        if let DivergenceKind::PetzRenyi { alpha } = *self {
            if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
                return Err(Error::InvalidAlpha(alpha));
            }
        }
        Ok(())
    }

    /// The four kinds, with the given Renyi order.
    pub fn all(alpha: f64) -> Vec<Self> {
        vec![
            DivergenceKind::BuresAngle,
            DivergenceKind::TraceDistance,
            DivergenceKind::PetzRenyi { alpha },
            DivergenceKind::RelativeEntropy,
        ]
    }

    /// Symmetric and satisfies the triangle inequality.
    pub fn is_metric(&self) -> bool {
        matches!(
            self,
            DivergenceKind::BuresAngle | DivergenceKind::TraceDistance
        )
    }

    pub fn evaluate(&self, rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
        Ok(Prepared::new(*self, rho, sigma)?.value())
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceKind::BuresAngle => write!(f, "bures-angle"),
            DivergenceKind::TraceDistance => write!(f, "trace-distance"),
            DivergenceKind::PetzRenyi { alpha } => write!(f, "petz-renyi(alpha={alpha})"),
            DivergenceKind::RelativeEntropy => write!(f, "relative-entropy"),
        }
    }
}

/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, evaluated as the squared sum of
/// singular values of `sqrt(rho) sqrt(sigma)`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let root = root_fidelity(&rho.sqrt(), &sigma.sqrt());
    Ok((root * root).min(1.0))
}

/// `arccos(sqrt(Fid))` in `[0, pi/2]`.
pub fn bures_angle(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    DivergenceKind::BuresAngle.evaluate(rho, sigma)
}

/// `1/2 ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    DivergenceKind::TraceDistance.evaluate(rho, sigma)
}

/// `(alpha - 1)^-1 ln Tr[rho^alpha sigma^(1-alpha)]`.
///
/// For `alpha > 1` the value is infinite unless `supp(rho)` lies in
/// `supp(sigma)`. For `alpha < 1` it is infinite only when the trace vanishes
/// (orthogonal supports); that convention is the classical one.
pub fn petz_renyi(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> Result<f64> {
    DivergenceKind::petz_renyi(alpha)?.evaluate(rho, sigma)
}

/// `Tr[rho ln rho - rho ln sigma]`, infinite when `supp(rho)` is not inside
/// `supp(sigma)`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    DivergenceKind::RelativeEntropy.evaluate(rho, sigma)
}

fn root_fidelity(sqrt_rho: &CMatrix, sqrt_sigma: &CMatrix) -> f64 {
    let svd = SVD::new(sqrt_rho * sqrt_sigma, false, false);
    svd.singular_values.iter().sum()
}

// 2 asin(D/2) with D = min_U ||sqrt(rho) U - sqrt(sigma)||_F. Equal to
// arccos(sqrt(Fid)) for unit-trace arguments; the norm form has no
// cancellation when the states are close.
fn bures_from_roots(sqrt_rho: &CMatrix, sqrt_sigma: &CMatrix) -> f64 {
    let svd = SVD::new(sqrt_rho * sqrt_sigma, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD requested with both factors"),
    };
    let polar = u * v_t;
    let diff = sqrt_rho * polar - sqrt_sigma;
    let d = diff.norm();
    2.0 * (0.5 * d).min(1.0).asin()
}

fn trace_from_difference(diff: &CMatrix) -> f64 {
    let values = symmetrize(diff).symmetric_eigenvalues();
    0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
}

fn support_mass(value: f64) -> f64 {
    if value > SUPPORT_TOL {
        value
    } else {
        0.0
    }
}

/// sigma-side pieces of a divergence, computed once.
#[derive(Clone, Debug)]
enum SigmaSide {
    Bures {
        sqrt: CMatrix,
    },
    Trace {
        matrix: CMatrix,
    },
    /// `sigma^(1-alpha)` on the support plus the kernel projector, which is
    /// only needed when `alpha > 1`.
    Renyi {
        alpha: f64,
        power: CMatrix,
        kernel: Option<CMatrix>,
    },
    Relative {
        log: CMatrix,
        kernel: Option<CMatrix>,
    },
}

/// rho-side pieces; every one transforms as `X -> U X U^dag` under `rho ->
/// U rho U^dag`.
#[derive(Clone, Debug)]
enum RhoSide {
    Bures { sqrt: CMatrix },
    Trace { matrix: CMatrix },
    Renyi { power: CMatrix, matrix: CMatrix },
    Relative { matrix: CMatrix, neg_entropy: f64 },
}

/// A divergence with both arguments preprocessed, so that `d(U rho U^dag,
/// sigma)` costs a few small matrix products per evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    rho: RhoSide,
    sigma: SigmaSide,
}

fn kernel_projector(sigma: &DensityOperator) -> Option<CMatrix> {
    let eig = sigma.eigen();
    if eig.values.iter().all(|&q| q > SUPPORT_TOL) {
        return None;
    }
    Some(eig.apply(|q| if q > SUPPORT_TOL { 0.0 } else { 1.0 }))
}

impl Prepared {
    pub(crate) fn new(
        kind: DivergenceKind,
        rho: &DensityOperator,
        sigma: &DensityOperator,
    ) -> Result<Self> {
        check_dims(rho.dim(), sigma.dim())?;
        kind.validate()?;
        let (r, s) = match kind {
            DivergenceKind::BuresAngle => (
                RhoSide::Bures { sqrt: rho.sqrt() },
                SigmaSide::Bures { sqrt: sigma.sqrt() },
            ),
            DivergenceKind::TraceDistance => (
                RhoSide::Trace {
                    matrix: rho.matrix().clone(),
                },
                SigmaSide::Trace {
                    matrix: sigma.matrix().clone(),
                },
            ),
            DivergenceKind::PetzRenyi { alpha } => {
                let power = rho.apply(|p| support_mass(p).powf(alpha));
                let sigma_power = sigma.apply(|q| {
                    let q = support_mass(q);
                    if q > 0.0 {
                        q.powf(1.0 - alpha)
                    } else {
                        0.0
                    }
                });
                let kernel = if alpha > 1.0 {
                    kernel_projector(sigma)
                } else {
                    None
                };
                (
                    RhoSide::Renyi {
                        power,
                        matrix: rho.matrix().clone(),
                    },
                    SigmaSide::Renyi {
                        alpha,
                        power: sigma_power,
                        kernel,
                    },
                )
            }
            DivergenceKind::RelativeEntropy => {
                let neg_entropy = rho
                    .eigen()
                    .values
                    .iter()
                    .map(|&p| {
                        let p = support_mass(p);
                        if p > 0.0 {
                            p * p.ln()
                        } else {
                            0.0
                        }
                    })
                    .sum();
                let log = sigma.apply(|q| {
                    let q = support_mass(q);
                    if q > 0.0 {
                        q.ln()
                    } else {
                        0.0
                    }
                });
                (
                    RhoSide::Relative {
                        matrix: rho.matrix().clone(),
                        neg_entropy,
                    },
                    SigmaSide::Relative {
                        log,
                        kernel: kernel_projector(sigma),
                    },
                )
            }
        };
        Ok(Self { rho: r, sigma: s })
    }

    pub(crate) fn value(&self) -> f64 {
        self.evaluate(None)
    }

    /// `d(U rho U^dag, sigma)`.
    pub(crate) fn value_rotated(&self, u: &CMatrix) -> f64 {
        self.evaluate(Some(u))
    }

    fn evaluate(&self, u: Option<&CMatrix>) -> f64 {
        let rot = |x: &CMatrix| -> CMatrix {
            match u {
                Some(u) => u * x * u.adjoint(),
                None => x.clone(),
            }
        };
        match (&self.rho, &self.sigma) {
            (RhoSide::Bures { sqrt }, SigmaSide::Bures { sqrt: s }) => {
                bures_from_roots(&rot(sqrt), s)
            }
            (RhoSide::Trace { matrix }, SigmaSide::Trace { matrix: s }) => {
                trace_from_difference(&(rot(matrix) - s))
            }
            (
                RhoSide::Renyi { power, matrix },
                SigmaSide::Renyi {
                    alpha,
                    power: s,
                    kernel,
                },
            ) => {
                if let Some(k) = kernel {
                    if trace_product_re(&rot(matrix), k) > SUPPORT_TOL {
                        return f64::INFINITY;
                    }
                }
                let t = trace_product_re(&rot(power), s);
                if !(t > 0.0) {
                    return f64::INFINITY;
                }
                (t.ln() / (alpha - 1.0)).max(0.0)
            }
            (
                RhoSide::Relative {
                    matrix,
                    neg_entropy,
                },
                SigmaSide::Relative { log, kernel },
            ) => {
                let m = rot(matrix);
                if let Some(k) = kernel {
                    if trace_product_re(&m, k) > SUPPORT_TOL {
                        return f64::INFINITY;
                    }
                }
                (neg_entropy - trace_product_re(&m, log)).max(0.0)
            }
            _ => unreachable!("rho and sigma sides are built together"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::C64;
    use std::f64::consts::FRAC_PI_2;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(p).unwrap()
    }

    #[test]
    fn identical_states() {
        let rho = diag(&[0.3, 0.7]);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-14);
        assert!(bures_angle(&rho, &rho).unwrap() < 1e-12);
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-15);
        assert!(petz_renyi(&rho, &rho, 2.0).unwrap() < 1e-14);
        assert!(relative_entropy(&rho, &rho).unwrap() < 1e-14);
    }

    #[test]
    fn commuting_pair_closed_forms() {
        // Frozen from the commuting-case scalar formulas, evaluated at 30
        // digits.
        let rho = diag(&[0.3, 0.7]);
        let sigma = diag(&[0.5, 0.5]);
        assert!((fidelity(&rho, &sigma).unwrap() - 0.958_257_569_495_584).abs() < 1e-12);
        assert!((bures_angle(&rho, &sigma).unwrap() - 0.205_758_423_033_744).abs() < 1e-12);
        assert!((trace_distance(&rho, &sigma).unwrap() - 0.2).abs() < 1e-14);
        assert!((petz_renyi(&sigma, &rho, 2.0).unwrap() - 0.174_353_387_144_778).abs() < 1e-12);
        assert!((relative_entropy(&sigma, &rho).unwrap() - 0.087_176_693_572_389).abs() < 1e-12);
    }

    #[test]
    fn pure_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DensityOperator::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let phi = DensityOperator::pure(&[C64::new(s, 0.0), C64::new(0.0, s)]).unwrap();
        let perp = DensityOperator::pure(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!((fidelity(&psi, &phi).unwrap() - 0.5).abs() < 1e-12);
        assert!((bures_angle(&psi, &perp).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!((trace_distance(&psi, &perp).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn support_rules() {
        let pure = diag(&[1.0, 0.0]);
        let full = diag(&[0.4, 0.6]);
        let other = diag(&[0.0, 1.0]);
        assert!(relative_entropy(&pure, &full).unwrap().is_finite());
        assert_eq!(relative_entropy(&pure, &other).unwrap(), f64::INFINITY);
        assert_eq!(relative_entropy(&full, &pure).unwrap(), f64::INFINITY);
        assert_eq!(petz_renyi(&full, &pure, 2.0).unwrap(), f64::INFINITY);
        // alpha < 1: finite unless the supports are orthogonal.
        assert!(petz_renyi(&full, &pure, 0.5).unwrap().is_finite());
        assert_eq!(petz_renyi(&pure, &other, 0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn alpha_validation() {
        let rho = diag(&[0.3, 0.7]);
        assert!(matches!(
            petz_renyi(&rho, &rho, 1.0),
            Err(Error::InvalidAlpha(_))
        ));
        assert!(matches!(
            petz_renyi(&rho, &rho, 0.0),
            Err(Error::InvalidAlpha(_))
        ));
        assert!(matches!(
            petz_renyi(&rho, &rho, -2.0),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let a = diag(&[0.3, 0.7]);
        let b = diag(&[0.2, 0.3, 0.5]);
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fidelity(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn renyi_approaches_relative_entropy() {
        let rho = diag(&[0.2, 0.3, 0.5]);
        let sigma = DensityOperator::from_matrix(CMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(0.4, 0.0),
                C64::new(0.1, 0.05),
                C64::new(0.0, 0.0),
                C64::new(0.1, -0.05),
                C64::new(0.35, 0.0),
                C64::new(0.02, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.02, 0.0),
                C64::new(0.25, 0.0),
            ],
        ))
        .unwrap();
        let d = relative_entropy(&rho, &sigma).unwrap();
        for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((petz_renyi(&rho, &sigma, alpha).unwrap() - d).abs() < 1e-3);
        }
    }

    #[test]
    fn rotated_evaluation_matches_direct() {
        let rho = diag(&[0.1, 0.3, 0.6]);
        let sigma = diag(&[0.2, 0.2, 0.6]);
        let h = crate::spectral::HermitianOperator::from_real(&[
            vec![0.3, 1.0, 0.0],
            vec![1.0, -0.2, 0.4],
            vec![0.0, 0.4, 0.9],
        ])
        .unwrap();
        let u = h.exp_i(0.7);
        let rotated = rho.conjugate(&u).unwrap();
        for kind in DivergenceKind::all(0.5)
            .into_iter()
            .chain([DivergenceKind::PetzRenyi { alpha: 2.0 }])
        {
            let direct = kind.evaluate(&rotated, &sigma).unwrap();
            let prepared = Prepared::new(kind, &rho, &sigma)
                .unwrap()
                .value_rotated(u.matrix());
            assert!(
                (direct - prepared).abs() < 1e-12,
                "{kind}: {direct} vs {prepared}"
            );
        }
    }
}
