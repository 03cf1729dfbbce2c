use serde::{Serialize, Serializer};
use unires::dynamics::{BoundCheck, Summary};
use unires::verify::{serialize_extended, SuiteReport};
use unires::DivergenceKind;

/// Slack allowed on `d - d~ >= 0`.
const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct DivergenceRecord {
    pub kind: String,
    #[serde(serialize_with = "serialize_extended")]
    pub divergence: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub residual: f64,
    /// `d - d~`; `null` when both sides are infinite.
    #[serde(serialize_with = "serialize_gap")]
    pub gap: Option<f64>,
}

fn serialize_gap<S: Serializer>(gap: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match gap {
        Some(g) => serialize_extended(g, s),
        None => s.serialize_none(),
    }
}

impl DivergenceRecord {
    pub fn new(kind: DivergenceKind, divergence: f64, residual: f64) -> Self {
        let gap = if divergence.is_infinite() && residual.is_infinite() {
            None
        } else {
            Some(divergence - residual)
        };
        Self {
            kind: kind.to_string(),
            divergence,
            residual,
            gap,
        }
    }

    fn passed(&self) -> bool {
        self.gap.is_none_or(|g| g >= -GAP_TOL)
    }
}

pub enum Output {
    Divergence {
        dim: usize,
        results: Vec<DivergenceRecord>,
    },
    Verify(SuiteReport),
    Simulate(Box<Summary>),
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    passed: bool,
}

#[derive(Serialize)]
struct DivergenceBody<'a> {
    dim: usize,
    results: &'a [DivergenceRecord],
}

fn fmt(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.10}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), fmt)
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Divergence { results, .. } => results.iter().all(DivergenceRecord::passed),
            Output::Verify(report) => report.passed(),
            Output::Simulate(summary) => summary.passed(),
        }
    }

    pub fn print(&self, pretty: bool) {
        if pretty {
            print!("{}", self.table());
            return;
        }
        let passed = self.passed();
        let json = match self {
            Output::Divergence { dim, results } => serde_json::to_string(&Tagged {
                body: &DivergenceBody { dim: *dim, results },
                passed,
            }),
            Output::Verify(report) => serde_json::to_string(&Tagged {
                body: report,
                passed,
            }),
            Output::Simulate(summary) => serde_json::to_string(&Tagged {
                body: summary.as_ref(),
                passed,
            }),
        };
        println!("{}", json.expect("reports serialize"));
    }

    fn table(&self) -> String {
        let mut out = String::new();
        match self {
            Output::Divergence { dim, results } => {
                out += &format!("dim {dim}\n");
                out += &format!(
                    "{:<28} {:>16} {:>16} {:>16}\n",
                    "kind", "d", "residual", "gap"
                );
                for r in results {
                    out += &format!(
                        "{:<28} {:>16} {:>16} {:>16}\n",
                        r.kind,
                        fmt(r.divergence),
                        fmt(r.residual),
                        fmt_opt(r.gap)
                    );
                }
            }
            Output::Verify(report) => {
                out += &format!(
                    "suite {} | trials {} | dims {:?} | seed {}\n",
                    report.suite, report.trials, report.dims, report.seed
                );
                out += &format!(
                    "{:<44} {:>7} {:>7} {:>14} {:>9} {:>20}\n",
                    "check", "evals", "fails", "worst margin", "tol", "counterexample"
                );
                for c in &report.checks {
                    out += &format!(
                        "{:<44} {:>7} {:>7} {:>14} {:>9.0e} {:>20}\n",
                        c.name,
                        c.evaluations,
                        c.failures,
                        c.worst_margin
                            .map_or_else(|| "-".into(), |m| format!("{m:.3e}")),
                        c.tolerance,
                        c.counterexample_seed
                            .map_or_else(|| "-".into(), |s| s.to_string())
                    );
                }
            }
            Output::Simulate(s) => {
                out += &format!(
                    "t_end {} | steps {} | action {:.9}\n",
                    s.t_end, s.steps, s.action
                );
                out += &format!(
                    "spectrum {:?} -> {:?}\n",
                    s.initial_spectrum, s.final_spectrum
                );
                out += &format!("purity {:.9} -> {:.9}\n", s.purity_initial, s.purity_final);
                let row = |name: &str, b: &BoundCheck| {
                    format!(
                        "{:<34} lhs {:>14.9} rhs {:>14.9} margin {:>11.3e} {:?}\n",
                        name, b.lhs, b.rhs, b.margin, b.verdict
                    )
                };
                out += &row("state bound (bures angle)", &s.state_bound);
                out += &row("residual bound (spectra)", &s.residual_bound);
                let sub = &s.residual_subintervals;
                out += &format!(
                    "{:<34} {} evaluated, {} not applicable, {} violations, worst margin {:.3e}\n",
                    "residual bound (sub-intervals)",
                    sub.evaluated,
                    sub.not_applicable,
                    sub.violations,
                    sub.worst_margin
                );
                let f = &s.fisher;
                out += &format!(
                    "{:<34} {} evaluated, {} skipped at crossings, {} violations, worst margin {:.3e}\n",
                    "fisher bound", f.evaluated, f.skipped_crossings, f.violations, f.worst_margin
                );
                out += &row("purity bound", &s.purity_bound);
            }
        }
        out += if self.passed() {
            "result: pass\n"
        } else {
            "result: FAIL\n"
        };
        out
    }
}
