//! JSON result documents. The printed summary and the invariant checks are
//! derived from the document alone, so `report` reproduces them exactly.

use serde::{Deserialize, Serialize};

use npspectra::export::{BoundaryResidualRow, SweepJson};
use npspectra::npcore::{containment_defect, nontrivial, pairing_defect};
use npspectra::sweep::OUTSIDE_THRESHOLD;
use npspectra::{Shape, SpectrumMethod, SpectrumResult};

/// Eigenvalues must pair as `±λ` within this bound.
pub const PAIRING_TOLERANCE: f64 = 1e-5;
/// Eigenvalues must lie in `[-1/2 - tol, 1/2 + tol]`.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub spectrum: SpectrumResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeRow {
    pub lambda: f64,
    pub r: f64,
    pub xi0: f64,
    pub half_norm: f64,
    /// Absent below R = 4.
    pub residual_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeDoc {
    pub rows: Vec<QuasimodeRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidualDoc {
    pub rows: Vec<BoundaryResidualRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseDoc {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    /// Closed-form values, descending.
    pub oracle: Vec<f64>,
    /// The same number of largest-magnitude computed values, descending.
    pub nystrom: Vec<f64>,
    pub spectrum: SpectrumResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub x: f64,
    pub n: u64,
    /// 0-based index into `r_list`.
    pub j: usize,
    pub t: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDoc {
    pub r_list: Vec<f64>,
    pub epsilon: f64,
    pub witnesses: Vec<WitnessRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Document {
    Spectrum(SpectrumDoc),
    Sweep(SweepJson),
    Quasimode(QuasimodeDoc),
    BoundaryResidual(BoundaryResidualDoc),
    Ellipse(EllipseDoc),
    Density(DensityDoc),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn spectrum_checks(label: &str, eigenvalues: &[f64]) -> Vec<Check> {
    let c = containment_defect(eigenvalues);
    let p = pairing_defect(eigenvalues);
    vec![
        Check {
            name: format!("{label}containment"),
            passed: c <= CONTAINMENT_TOLERANCE,
            detail: format!("defect {c:.3e}, tolerance {CONTAINMENT_TOLERANCE:e}"),
        },
        Check {
            name: format!("{label}symmetry"),
            passed: p <= PAIRING_TOLERANCE,
            detail: format!("defect {p:.3e}, tolerance {PAIRING_TOLERANCE:e}"),
        },
    ]
}

fn shape_label(shape: &Shape) -> String {
    match shape {
        Shape::Stadium { half_length } => format!("stadium R={half_length}"),
        Shape::Ellipse { a, b } => format!("ellipse a={a} b={b}"),
        Shape::Circle { .. } => "circle".into(),
    }
}

fn outside(eigenvalues: &[f64]) -> usize {
    nontrivial(eigenvalues)
        .iter()
        .filter(|l| l.abs() > OUTSIDE_THRESHOLD)
        .count()
}

fn list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.9}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Document {
    pub fn command(&self) -> &'static str {
        match self {
            Document::Spectrum(_) => "spectrum",
            Document::Sweep(_) => "sweep",
            Document::Quasimode(_) => "quasimode",
            Document::BoundaryResidual(_) => "boundary-residual",
            Document::Ellipse(_) => "ellipse",
            Document::Density(_) => "density",
        }
    }

    pub fn checks(&self) -> Vec<Check> {
        match self {
            Document::Spectrum(d) => spectrum_checks("", &d.spectrum.eigenvalues),
            Document::Ellipse(d) => spectrum_checks("", &d.spectrum.eigenvalues),
            Document::Sweep(d) => {
                let mut v: Vec<Check> = d
                    .r_list
                    .iter()
                    .zip(&d.eigenvalues)
                    .flat_map(|(r, ev)| spectrum_checks(&format!("R={r} "), ev))
                    .collect();
                v.push(Check {
                    name: "fill monotone".into(),
                    passed: d.fill_distances.windows(2).all(|w| w[1] <= w[0]),
                    detail: "fill distances nonincreasing".into(),
                });
                v
            }
            Document::Density(d) => d
                .witnesses
                .iter()
                .map(|w| Check {
                    name: format!("witness x={}", w.x),
                    passed: w.error < d.epsilon,
                    detail: format!("|n t_j - x| = {:.3e}", w.error),
                })
                .collect(),
            Document::Quasimode(_) | Document::BoundaryResidual(_) => Vec::new(),
        }
    }

    /// Deterministic human-readable summary, checks included.
    pub fn summary(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            Document::Spectrum(d) => {
                let s = &d.spectrum;
                let method = match s.method {
                    SpectrumMethod::Symmetrized => "symmetrized",
                    SpectrumMethod::Plain => "plain",
                };
                out.push(format!(
                    "spectrum: {}, n={}, method={method}",
                    shape_label(&s.curve_descriptor.shape),
                    s.n_nodes
                ));
                let top: Vec<f64> = s.eigenvalues.iter().take(6).copied().collect();
                out.push(format!("largest eigenvalues: {}", list(&top)));
                let bottom: Vec<f64> = s.eigenvalues.iter().rev().take(5).copied().collect();
                out.push(format!("smallest eigenvalues: {}", list(&bottom)));
                out.push(format!(
                    "outside [-1/4, 1/4] (1/2 excluded): {}",
                    outside(&s.eigenvalues)
                ));
                out.push(format!("asymmetry diagnostic: {:.3e}", s.asymmetry));
            }
            Document::Sweep(d) => {
                out.push(format!(
                    "sweep: stadium, {} aspect ratios, grid {}:{}:{}",
                    d.r_list.len(),
                    d.grid.lower,
                    d.grid.upper,
                    d.grid.step
                ));
                for i in 0..d.r_list.len() {
                    out.push(format!(
                        "R={} n={} fill={:.6} outside={}",
                        d.r_list[i], d.n_nodes[i], d.fill_distances[i], d.outside_counts[i]
                    ));
                }
            }
            Document::Quasimode(d) => {
                out.push(format!("quasimode: {} runs", d.rows.len()));
                for r in &d.rows {
                    let ratio = r
                        .residual_ratio
                        .map(|v| format!("{v:.6e}"))
                        .unwrap_or_else(|| "n/a (R < 4)".into());
                    out.push(format!(
                        "lambda={} R={} xi0={:.9} norm/sqrt(R)={:.6} residual={ratio}",
                        r.lambda,
                        r.r,
                        r.xi0,
                        r.half_norm / r.r.sqrt()
                    ));
                }
            }
            Document::BoundaryResidual(d) => {
                out.push(format!("boundary residual: {} runs", d.rows.len()));
                for r in &d.rows {
                    out.push(format!(
                        "lambda={} R={} n={} ratio={:.6e}",
                        r.lambda, r.r, r.n_nodes, r.ratio
                    ));
                }
            }
            Document::Ellipse(d) => {
                out.push(format!(
                    "ellipse: a={} b={} r={:.9} n={}",
                    d.a, d.b, d.ratio, d.spectrum.n_nodes
                ));
                let mut worst: f64 = 0.0;
                for (o, c) in d.oracle.iter().zip(&d.nystrom) {
                    worst = worst.max((o - c).abs());
                    out.push(format!(
                        "oracle {o:+.12} computed {c:+.12} error {:.3e}",
                        (o - c).abs()
                    ));
                }
                out.push(format!("max oracle error: {worst:.3e}"));
            }
            Document::Density(d) => {
                out.push(format!("density: r_list={:?} eps={}", d.r_list, d.epsilon));
                for w in &d.witnesses {
                    out.push(format!(
                        "x={} n={} j={} n*t_j={:.9} error={:.3e}",
                        w.x,
                        w.n,
                        w.j,
                        w.n as f64 * w.t,
                        w.error
                    ));
                }
            }
        }
        for c in self.checks() {
            out.push(format!(
                "check {}: {} ({})",
                c.name,
                if c.passed { "ok" } else { "FAILED" },
                c.detail
            ));
        }
        out
    }
}
