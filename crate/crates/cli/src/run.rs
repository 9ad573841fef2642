//! Executes a [`RunConfig`]: computes the document, writes outputs, reports checks.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use npspectra::boundary_residual::default_node_count;
use npspectra::export::{
    write_boundary_residual_csv, write_quasimode_csv, write_residual_csv, write_spectrum_csv,
    write_sweep_csv, BoundaryResidualRow, ResidualRow, SweepJson,
};
use npspectra::{
    assemble_np, assemble_single_layer, boundary_residual_ratio, build_ellipse, build_quasimode,
    build_stadium, density_witness, ellipse_oracle, plain_spectrum, residual_ratio, run_sweep,
    sobolev_half_norm, spectrum, xi0_of_lambda, BoundaryCurve, LineGrid, SpectrumMethod,
    SpectrumResult,
};

use crate::config::{Params, RunConfig, ShapeSpec};
use crate::document::*;
use crate::error::CliError;
use crate::svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Csv,
    Json,
    Svg,
}

/// An output file before naming: the final name is `{stem}_{hash}.{ext}`.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub stem: String,
    pub kind: Kind,
    pub bytes: Vec<u8>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub summary: Vec<String>,
    pub written: Vec<PathBuf>,
    pub failed_checks: Vec<String>,
    pub hash: Option<String>,
}

fn bytes<T>(f: impl FnOnce(&mut Vec<u8>) -> npspectra::Result<T>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json(doc: &Document) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(doc).expect("documents serialize");
    v.push(b'\n');
    v
}

fn solve(curve: &BoundaryCurve, method: SpectrumMethod) -> Result<SpectrumResult, CliError> {
    Ok(match method {
        SpectrumMethod::Symmetrized => {
            spectrum(&assemble_np(curve)?, &assemble_single_layer(curve)?)?
        }
        SpectrumMethod::Plain => plain_spectrum(&assemble_np(curve)?)?,
    })
}

fn svg_artifact(stem: &str, title: &str, columns: &[(String, Vec<f64>)]) -> Artifact {
    Artifact {
        stem: stem.to_string(),
        kind: Kind::Svg,
        bytes: svg::scatter(title, columns).into_bytes(),
    }
}

/// Computes the result document and every artifact it can produce.
pub fn compute(params: &Params) -> Result<(Document, Vec<Artifact>), CliError> {
    let mut artifacts = Vec::new();
    let doc = match params {
        Params::Spectrum { shape, n, method } => {
            let (curve, stem) = match shape {
                ShapeSpec::Stadium { r } => (
                    build_stadium(*r, *n)?,
                    format!("spectrum_stadium_R{r}_n{n}"),
                ),
                ShapeSpec::Ellipse { a, b } => (
                    build_ellipse(*a, *b, *n)?,
                    format!("spectrum_ellipse_a{a}_b{b}_n{n}"),
                ),
                ShapeSpec::Circle => (
                    build_ellipse(1.0, 1.0, *n)?,
                    format!("spectrum_circle_n{n}"),
                ),
            };
            let spec = solve(&curve, *method)?;
            artifacts.push(Artifact {
                stem: stem.clone(),
                kind: Kind::Csv,
                bytes: bytes(|b| write_spectrum_csv(&spec, b))?,
            });
            artifacts.push(svg_artifact(
                &stem,
                &stem,
                &[(format!("n={n}"), spec.eigenvalues.clone())],
            ));
            let doc = Document::Spectrum(SpectrumDoc { spectrum: spec });
            artifacts.push(Artifact {
                stem,
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::Sweep {
            r_list,
            policy,
            grid,
        } => {
            let report = run_sweep(r_list, *policy, *grid)?;
            for (r, s) in report.r_list.iter().zip(&report.spectra) {
                artifacts.push(Artifact {
                    stem: format!("sweep_stadium_R{r}_n{}", s.n_nodes),
                    kind: Kind::Csv,
                    bytes: bytes(|b| write_spectrum_csv(s, b))?,
                });
            }
            artifacts.push(Artifact {
                stem: "sweep_stadium".into(),
                kind: Kind::Csv,
                bytes: bytes(|b| write_sweep_csv(&report, b))?,
            });
            let columns: Vec<(String, Vec<f64>)> = report
                .r_list
                .iter()
                .zip(&report.spectra)
                .map(|(r, s)| (format!("R={r}"), s.eigenvalues.clone()))
                .collect();
            artifacts.push(svg_artifact(
                "sweep_stadium",
                "eigenvalues against R",
                &columns,
            ));
            let doc = Document::Sweep(SweepJson::from(&report));
            artifacts.push(Artifact {
                stem: "sweep_stadium".into(),
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::Quasimode { lambdas, r_list } => {
            let pairs: Vec<(f64, f64)> = lambdas
                .iter()
                .flat_map(|&l| r_list.iter().map(move |&r| (l, r)))
                .collect();
            let computed = pairs
                .par_iter()
                .map(|&(lambda, r)| -> Result<_, CliError> {
                    let qm = build_quasimode(lambda, r, LineGrid::for_aspect(r)?)?;
                    let half_norm = sobolev_half_norm(&qm.sampled());
                    let ratio = if r >= 4.0 {
                        Some(residual_ratio(lambda, r)?)
                    } else {
                        None
                    };
                    let csv = bytes(|b| write_quasimode_csv(&qm, b))?;
                    Ok((
                        QuasimodeRow {
                            lambda,
                            r,
                            xi0: xi0_of_lambda(lambda)?,
                            half_norm,
                            residual_ratio: ratio,
                        },
                        csv,
                    ))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for (row, csv) in computed {
                artifacts.push(Artifact {
                    stem: format!("quasimode_line_R{}_lambda{}", row.r, row.lambda),
                    kind: Kind::Csv,
                    bytes: csv,
                });
                rows.push(row);
            }
            let residuals: Vec<ResidualRow> = rows
                .iter()
                .filter_map(|r| {
                    r.residual_ratio.map(|ratio| ResidualRow {
                        lambda: r.lambda,
                        r: r.r,
                        ratio,
                    })
                })
                .collect();
            artifacts.push(Artifact {
                stem: "quasimode_residual".into(),
                kind: Kind::Csv,
                bytes: bytes(|b| write_residual_csv(&residuals, b))?,
            });
            let doc = Document::Quasimode(QuasimodeDoc { rows });
            artifacts.push(Artifact {
                stem: "quasimode".into(),
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::BoundaryResidual { lambdas, r_list, n } => {
            let mut rows = Vec::new();
            for &lambda in lambdas {
                for &r in r_list {
                    let n_nodes = n.unwrap_or_else(|| default_node_count(r));
                    let ratio = boundary_residual_ratio(lambda, r, n_nodes)?;
                    rows.push(BoundaryResidualRow {
                        lambda,
                        r,
                        n_nodes,
                        ratio,
                    });
                }
            }
            artifacts.push(Artifact {
                stem: "boundary-residual_stadium".into(),
                kind: Kind::Csv,
                bytes: bytes(|b| write_boundary_residual_csv(&rows, b))?,
            });
            let doc = Document::BoundaryResidual(BoundaryResidualDoc { rows });
            artifacts.push(Artifact {
                stem: "boundary-residual_stadium".into(),
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::Ellipse {
            a,
            b,
            n,
            n_max,
            method,
        } => {
            let oracle = ellipse_oracle(*a, *b, *n_max)?;
            let spec = solve(&build_ellipse(*a, *b, *n)?, *method)?;
            let mut by_magnitude = spec.nontrivial();
            by_magnitude.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
            let mut nystrom = by_magnitude[..oracle.len()].to_vec();
            nystrom.sort_by(|x, y| y.total_cmp(x));
            let stem = format!("ellipse_a{a}_b{b}_n{n}");
            let mut csv = String::from("k,oracle,nystrom,error\n");
            for (k, (o, c)) in oracle.iter().zip(&nystrom).enumerate() {
                csv.push_str(&format!("{k},{o},{c},{}\n", (o - c).abs()));
            }
            artifacts.push(Artifact {
                stem: stem.clone(),
                kind: Kind::Csv,
                bytes: csv.into_bytes(),
            });
            artifacts.push(Artifact {
                stem: format!("{stem}_spectrum"),
                kind: Kind::Csv,
                bytes: bytes(|b| write_spectrum_csv(&spec, b))?,
            });
            artifacts.push(svg_artifact(
                &stem,
                &stem,
                &[
                    ("oracle".into(), oracle.clone()),
                    ("computed".into(), spec.eigenvalues.clone()),
                ],
            ));
            let doc = Document::Ellipse(EllipseDoc {
                a: *a,
                b: *b,
                ratio: (a - b) / (a + b),
                oracle,
                nystrom,
                spectrum: spec,
            });
            artifacts.push(Artifact {
                stem,
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::Density { xs, r_list, eps } => {
            let mut witnesses = Vec::new();
            let mut csv = String::from("x,n,j,t,error\n");
            for &x in xs {
                let (n, j) = density_witness(x, r_list, *eps)?;
                let t = -r_list[j].ln();
                let error = (n as f64 * t - x).abs();
                csv.push_str(&format!("{x},{n},{j},{t},{error}\n"));
                witnesses.push(WitnessRow { x, n, j, t, error });
            }
            artifacts.push(Artifact {
                stem: "density".into(),
                kind: Kind::Csv,
                bytes: csv.into_bytes(),
            });
            let doc = Document::Density(DensityDoc {
                r_list: r_list.clone(),
                epsilon: *eps,
                witnesses,
            });
            artifacts.push(Artifact {
                stem: "density".into(),
                kind: Kind::Json,
                bytes: json(&doc),
            });
            doc
        }
        Params::Report { .. } => unreachable!("report reads a document instead"),
    };
    Ok((doc, artifacts))
}

/// First 12 hex digits of SHA-256 over the canonical config and every CSV/JSON artifact.
pub fn content_hash(canonical: &str, artifacts: &[Artifact]) -> String {
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    for a in artifacts.iter().filter(|a| a.kind != Kind::Svg) {
        h.update(a.stem.as_bytes());
        h.update((a.bytes.len() as u64).to_le_bytes());
        h.update(&a.bytes);
    }
    h.finalize()
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_slice(&text).map_err(|source| CliError::Document {
        path: path.to_path_buf(),
        source,
    })
}

fn finish(doc: &Document) -> (Vec<String>, Vec<String>) {
    let failed = doc
        .checks()
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    (doc.summary(), failed)
}

/// Runs the configured command. Check failures are returned in the outcome,
/// not as an error; see [`RunOutcome::into_result`].
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if let Params::Report { input } = &cfg.params {
        let doc = read_document(input)?;
        let (summary, failed_checks) = finish(&doc);
        return Ok(RunOutcome {
            summary,
            written: Vec::new(),
            failed_checks,
            hash: None,
        });
    }
    let (doc, artifacts) = compute(&cfg.params)?;
    let canonical = cfg.canonical();
    let hash = content_hash(&canonical, &artifacts);
    fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    for a in &artifacts {
        let (wanted, ext) = match a.kind {
            Kind::Csv => (cfg.formats.csv, "csv"),
            Kind::Json => (cfg.formats.json, "json"),
            Kind::Svg => (cfg.formats.svg, "svg"),
        };
        if wanted {
            let path = cfg.out_dir.join(format!("{}_{hash}.{ext}", a.stem));
            write_file(&path, &a.bytes)?;
            written.push(path);
        }
    }
    let stem = artifacts
        .iter()
        .find(|a| a.kind == Kind::Json)
        .map(|a| a.stem.as_str())
        .unwrap_or(cfg.command.as_str());
    let echo = cfg.out_dir.join(format!("{stem}_{hash}.config"));
    write_file(&echo, cfg.echo().as_bytes())?;
    written.push(echo);
    let (summary, failed_checks) = finish(&doc);
    Ok(RunOutcome {
        summary,
        written,
        failed_checks,
        hash: Some(hash),
    })
}

impl RunOutcome {
    /// `Err(Checks)` when a check failed and checks are enforced.
    pub fn into_result(self, enforce: bool) -> Result<Self, CliError> {
        if enforce && !self.failed_checks.is_empty() {
            return Err(CliError::Checks(self.failed_checks));
        }
        Ok(self)
    }
}
