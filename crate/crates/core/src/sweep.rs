//! Aspect-ratio sweeps and the ellipse closed forms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::build_stadium;
use crate::npcore::{curve_spectrum, SpectrumResult};

/// Probe points must stay inside `[-PROBE_LIMIT, PROBE_LIMIT]`.
pub const PROBE_LIMIT: f64 = 0.49;

/// Threshold separating the "outside" eigenvalues in sweep reports.
pub const OUTSIDE_THRESHOLD: f64 = 0.25;

/// Node count as a function of the aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum NodePolicy {
    /// `min(per_unit * (R + 1), cap)`, rounded up to even.
    Linear {
        per_unit: usize,
        cap: usize,
    },
    Fixed {
        n_nodes: usize,
    },
}

impl Default for NodePolicy {
    fn default() -> Self {
        NodePolicy::Linear {
            per_unit: 64,
            cap: 4096,
        }
    }
}

impl NodePolicy {
    pub fn nodes_for(&self, r: f64) -> usize {
        match *self {
            NodePolicy::Linear { per_unit, cap } => {
                let n = ((per_unit as f64 * (r + 1.0)).ceil() as usize).min(cap);
                n + n % 2
            }
            NodePolicy::Fixed { n_nodes } => n_nodes,
        }
    }
}

/// Uniform probe grid `lower, lower + step, …, upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl ProbeGrid {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        let g = Self { lower, upper, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step.is_nan()
            || self.step <= 0.0
            || self.lower.is_nan()
            || self.upper.is_nan()
            || self.lower > self.upper
        {
            return Err(Error::InvalidSweep(format!(
                "probe grid {}:{}:{} is empty",
                self.lower, self.upper, self.step
            )));
        }
        if self.lower < -PROBE_LIMIT - 1e-12 || self.upper > PROBE_LIMIT + 1e-12 {
            return Err(Error::InvalidSweep(format!(
                "probe grid must lie within [-{PROBE_LIMIT}, {PROBE_LIMIT}]"
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.upper - self.lower) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| self.lower + k as f64 * self.step)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub r_list: Vec<f64>,
    pub spectra: Vec<SpectrumResult>,
    /// Entry `j` is the fill distance of the union of the first `j + 1` spectra.
    pub fill_distances: Vec<f64>,
    /// Eigenvalues with `|λ| > 1/4`, the trivial 1/2 excluded.
    pub outside_counts: Vec<usize>,
    pub lambda_grid: ProbeGrid,
    pub node_policy: NodePolicy,
}

/// Largest distance from a probe point to the nearest value in `sorted`.
pub fn fill_distance(grid: &[f64], sorted: &[f64]) -> f64 {
    grid.iter()
        .map(|&p| {
            let idx = sorted.partition_point(|&v| v < p);
            let above = sorted.get(idx).map(|v| v - p);
            let below = idx.checked_sub(1).map(|i| p - sorted[i]);
            match (above, below) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

pub fn run_sweep(r_list: &[f64], policy: NodePolicy, grid: ProbeGrid) -> Result<SweepReport> {
    if r_list.is_empty() {
        return Err(Error::InvalidSweep("empty R list".into()));
    }
    if r_list
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidSweep(
            "R list must be strictly increasing".into(),
        ));
    }
    grid.validate()?;

    let spectra = r_list
        .par_iter()
        .map(|&r| curve_spectrum(&build_stadium(r, policy.nodes_for(r))?))
        .collect::<Result<Vec<_>>>()?;

    let probes = grid.points();
    let mut union: Vec<f64> = Vec::new();
    let mut fill_distances = Vec::with_capacity(spectra.len());
    for s in &spectra {
        union.extend_from_slice(&s.eigenvalues);
        union.sort_by(f64::total_cmp);
        fill_distances.push(fill_distance(&probes, &union));
    }
    let outside_counts = spectra
        .iter()
        .map(|s| count_outside(s, OUTSIDE_THRESHOLD, true))
        .collect();
    Ok(SweepReport {
        r_list: r_list.to_vec(),
        spectra,
        fill_distances,
        outside_counts,
        lambda_grid: grid,
        node_policy: policy,
    })
}

/// `r = (a - b)/(a + b)` for an ellipse with semi-axes `a > b > 0`.
pub fn ellipse_ratio(a: f64, b: f64) -> Result<f64> {
    if b.is_nan() || b <= 0.0 || a <= b || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "ellipse oracle needs a > b > 0",
        });
    }
    Ok((a - b) / (a + b))
}

/// `{±½ rⁿ : n = 1..=n_max}` sorted descending.
pub fn ellipse_oracle(a: f64, b: f64, n_max: usize) -> Result<Vec<f64>> {
    let r = ellipse_ratio(a, b)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: 0.0,
            reason: "n_max must be at least 1",
        });
    }
    let mut v: Vec<f64> = (1..=n_max as i32)
        .flat_map(|n| {
            let l = 0.5 * r.powi(n);
            [l, -l]
        })
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Finds `(n, j)` with `|n·t_j - x| < epsilon`, `t_j = -ln r_list[j]`.
///
/// Scans `j` from the end of the list (the finest `t_j` when `r_list`
/// increases towards 1) and tries `n = round(x / t_j)`. `j` is a 0-based index.
pub fn density_witness(x: f64, r_list: &[f64], epsilon: f64) -> Result<(u64, usize)> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "witness target must be finite and nonnegative",
        });
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "epsilon must be positive",
        });
    }
    if let Some(&bad) = r_list.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: bad,
            reason: "ratios must lie in (0, 1)",
        });
    }
    for (j, r) in r_list.iter().enumerate().rev() {
        let t = -r.ln();
        let n = (x / t).round();
        if (n * t - x).abs() < epsilon {
            return Ok((n as u64, j));
        }
    }
    Err(Error::NoWitness { x, epsilon })
}

/// Number of eigenvalues with `|λ| > threshold`; optionally skips the one
/// closest to 1/2.
pub fn count_outside(spec: &SpectrumResult, threshold: f64, exclude_trivial: bool) -> usize {
    let values = if exclude_trivial {
        spec.nontrivial()
    } else {
        spec.eigenvalues.clone()
    };
    values.iter().filter(|l| l.abs() > threshold).count()
}
