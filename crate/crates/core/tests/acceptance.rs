//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Criterion 10 reruns criteria 1-9 and compares the serialized outputs byte
//! for byte.

use std::fmt::Write as _;
use std::io::Write as _;
use std::time::{Duration, Instant};

use npspectra::boundary_residual::default_node_count;
use npspectra::export::{
    write_boundary_residual_csv, write_residual_csv, write_spectrum_csv, write_sweep_csv,
    write_sweep_json, BoundaryResidualRow, ResidualRow,
};
use npspectra::fourier::LineGrid;
use npspectra::npcore::curve_spectrum;
use npspectra::*;

type Artifacts = Vec<(String, Vec<u8>)>;

struct Outcome {
    pass: bool,
    detail: String,
    artifacts: Artifacts,
}

fn csv<T>(f: impl FnOnce(&mut Vec<u8>) -> Result<T>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("in-memory write");
    buf
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn disk_oracle() -> Result<Outcome> {
    let start = Instant::now();
    let curve = build_ellipse(1.0, 1.0, 128)?;
    let spec = curve_spectrum(&curve)?;
    let elapsed = start.elapsed();
    let err = spec
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| (l - if i == 0 { 0.5 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let radius = curve.points()[0].norm();
    Ok(Outcome {
        pass: err <= 1e-9 && (radius - 0.25).abs() < 1e-15 && within(elapsed, 1.0),
        detail: format!("max error {err:.2e}, {elapsed:.2?}"),
        artifacts: vec![("disk.csv".into(), csv(|b| write_spectrum_csv(&spec, b)))],
    })
}

fn ellipse_oracle_check() -> Result<Outcome> {
    let start = Instant::now();
    let spec = curve_spectrum(&build_ellipse(2.0, 1.0, 256)?)?;
    let elapsed = start.elapsed();
    let mut nontrivial = spec.nontrivial();
    nontrivial.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut top = nontrivial[..6].to_vec();
    top.sort_by(|a, b| b.total_cmp(a));
    let err = top
        .iter()
        .zip(ellipse_oracle(2.0, 1.0, 3)?)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        pass: err <= 1e-6 && within(elapsed, 10.0),
        detail: format!("max error {err:.2e}, {elapsed:.2?}"),
        artifacts: vec![("ellipse.csv".into(), csv(|b| write_spectrum_csv(&spec, b)))],
    })
}

fn symmetry_containment() -> Result<Outcome> {
    let policy = NodePolicy::default();
    let mut pass = true;
    let mut detail = String::new();
    let mut artifacts = Vec::new();
    for r in [2.0, 8.0] {
        let n = policy.nodes_for(r);
        let spec = curve_spectrum(&build_stadium(r, n)?)?;
        let (p, c) = (spec.pairing_defect(), spec.containment_defect());
        pass &= p <= 1e-5 && c <= 1e-6;
        write!(detail, "R={r} n={n}: pairing {p:.1e} containment {c:.1e}; ").unwrap();
        artifacts.push((
            format!("stadium_{r}.csv"),
            csv(|b| write_spectrum_csv(&spec, b)),
        ));
    }
    Ok(Outcome {
        pass,
        detail: detail.trim_end_matches("; ").into(),
        artifacts,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

const QUASIMODE_RS: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];

fn quasimode_decay() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    let mut rows = Vec::new();
    for lambda in [0.1, 0.25, 0.5] {
        let ratios = QUASIMODE_RS
            .iter()
            .map(|&r| residual_ratio(lambda, r))
            .collect::<Result<Vec<_>>>()?;
        let halving = ratios[..5].windows(2).all(|w| w[1] <= 0.75 * w[0]);
        let slope = loglog_slope(&QUASIMODE_RS, &ratios);
        pass &= halving && slope <= -0.7;
        write!(detail, "λ={lambda}: slope {slope:.3}; ").unwrap();
        rows.extend(
            QUASIMODE_RS
                .iter()
                .zip(&ratios)
                .map(|(&r, &ratio)| ResidualRow { lambda, r, ratio }),
        );
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 30.0);
    write!(detail, "{elapsed:.2?}").unwrap();
    Ok(Outcome {
        pass,
        detail,
        artifacts: vec![(
            "quasimode_decay.csv".into(),
            csv(|b| write_residual_csv(&rows, b)),
        )],
    })
}

fn quasimode_lower_bound() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = String::new();
    let mut out = String::from("lambda,R,normalized_norm\n");
    for lambda in [0.1, 0.25, 0.5] {
        let mut values = Vec::new();
        for r in QUASIMODE_RS {
            let qm = build_quasimode(lambda, r, LineGrid::for_aspect(r)?)?;
            let v = sobolev_half_norm(&qm.sampled()) / r.sqrt();
            writeln!(out, "{lambda},{r},{v}").unwrap();
            values.push(v);
        }
        let hi = values.iter().cloned().fold(f64::MIN, f64::max);
        let lo = values.iter().cloned().fold(f64::MAX, f64::min);
        pass &= lo > 0.0 && hi / lo <= 2.0;
        write!(detail, "λ={lambda}: band {:.3}; ", hi / lo).unwrap();
    }
    Ok(Outcome {
        pass,
        detail: detail.trim_end_matches("; ").into(),
        artifacts: vec![("quasimode_norm.csv".into(), out.into_bytes())],
    })
}

fn boundary_decay() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    let mut rows = Vec::new();
    for lambda in [0.3, 0.5] {
        let mut ratios = Vec::new();
        for r in [4.0, 8.0, 16.0] {
            let n = default_node_count(r);
            let ratio = boundary_residual_ratio(lambda, r, n)?;
            rows.push(BoundaryResidualRow {
                lambda,
                r,
                n_nodes: n,
                ratio,
            });
            ratios.push(ratio);
        }
        pass &= ratios.windows(2).all(|w| w[1] < w[0]);
        write!(detail, "λ={lambda}: {ratios:.3?}; ").unwrap();
    }
    let elapsed = start.elapsed();
    pass &= within(elapsed, 300.0);
    write!(detail, "{elapsed:.2?}").unwrap();
    Ok(Outcome {
        pass,
        detail,
        artifacts: vec![(
            "boundary_residual.csv".into(),
            csv(|b| write_boundary_residual_csv(&rows, b)),
        )],
    })
}

fn fill_trend() -> Result<Outcome> {
    let grid = ProbeGrid::new(-0.45, 0.45, 0.01)?;
    let report = run_sweep(&[2.0, 4.0, 8.0, 16.0], NodePolicy::default(), grid)?;
    let fills = &report.fill_distances;
    let counts = &report.outside_counts;
    let hard = fills.windows(2).all(|w| w[1] <= w[0]);
    let soft_fill = *fills.last().unwrap() <= 0.1;
    let soft_counts = counts.windows(2).all(|w| w[1] >= w[0]);
    Ok(Outcome {
        pass: hard && soft_fill && soft_counts,
        detail: format!("fill {fills:.3?}, outside {counts:?}"),
        artifacts: vec![
            ("sweep.json".into(), csv(|b| write_sweep_json(&report, b))),
            ("sweep.csv".into(), csv(|b| write_sweep_csv(&report, b))),
        ],
    })
}

fn flats_poisson() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = String::new();
    let mut out = String::from("lambda,n_nodes,deviation\n");
    for lambda in [0.3, 0.5] {
        let mut devs = Vec::new();
        for n in [144, 288, 576, 1152] {
            let d = flat_poisson_deviation(lambda, 8.0, n)?;
            writeln!(out, "{lambda},{n},{d}").unwrap();
            devs.push(d);
        }
        pass &= devs.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = devs.iter().map(|d| format!("{d:.1e}")).collect();
        write!(detail, "λ={lambda}: [{}]; ", shown.join(", ")).unwrap();
    }
    Ok(Outcome {
        pass,
        detail: detail.trim_end_matches("; ").into(),
        artifacts: vec![("flats_poisson.csv".into(), out.into_bytes())],
    })
}

fn witnesses() -> Result<Outcome> {
    let r_list = [0.9, 0.99, 0.999];
    let eps = 0.01;
    let mut pass = true;
    let mut out = String::from("x,n,j,error\n");
    let mut detail = Vec::new();
    for x in [0.1, 0.5, 1.0, 3.0] {
        match density_witness(x, &r_list, eps) {
            Ok((n, j)) => {
                let err = (n as f64 * -r_list[j].ln() - x).abs();
                pass &= err < eps;
                writeln!(out, "{x},{n},{j},{err}").unwrap();
                detail.push(format!("x={x}: n={n} j={j} err {err:.1e}"));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("x={x}: {e}"));
            }
        }
    }
    Ok(Outcome {
        pass,
        detail: detail.join("; "),
        artifacts: vec![("witness.csv".into(), out.into_bytes())],
    })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 9] = [
    ("disk oracle", disk_oracle),
    ("ellipse oracle", ellipse_oracle_check),
    ("spectrum symmetry and containment", symmetry_containment),
    ("Fourier-side residual decay", quasimode_decay),
    ("quasimode norm lower bound", quasimode_lower_bound),
    ("boundary residual decay", boundary_decay),
    ("fill distance trend", fill_trend),
    ("flats match Poisson smoothing", flats_poisson),
    ("density witnesses", witnesses),
];

fn run_all(report: bool) -> (bool, Artifacts) {
    let mut all = true;
    let mut artifacts = Vec::new();
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => {
                artifacts.extend(o.artifacts);
                (o.pass, o.detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        if report {
            println!(
                "{} {:>2} {name}: {detail}",
                if pass { "PASS" } else { "FAIL" },
                i + 1
            );
        }
    }
    (all, artifacts)
}

fn main() {
    let (mut all, first) = run_all(true);
    let (_, second) = run_all(false);
    let identical = first == second;
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    all &= identical;
    println!(
        "{} 10 determinism: {} artifacts{}",
        if identical { "PASS" } else { "FAIL" },
        first.len(),
        if differing.is_empty() {
            " byte-identical".to_string()
        } else {
            format!(", differing: {differing:?}")
        }
    );
    std::io::stdout().flush().unwrap();
    if !all {
        std::process::exit(1);
    }
}
