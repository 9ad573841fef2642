//! Quasimodes transported onto the stadium boundary.
//!
//! `φ_R` equals `f_R(x₁)` on both flats and vanishes on the caps. On the
//! flats the NP operator maps it to `½ P₂ * f_R`, so `φ_R` inherits the
//! quasimode property of `f_R` up to cap effects that stay bounded in `R`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{build_quasimode, poisson_convolve, LineGrid, QuasiMode};
use crate::geometry::{build_stadium, BoundaryCurve, CurveDescriptor, Shape};
use crate::npcore::assemble_np;

/// Complex nodal values of a density on a boundary curve.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDensity {
    pub values: Vec<Complex64>,
    pub curve_descriptor: CurveDescriptor,
}

impl BoundaryDensity {
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            curve_descriptor: self.curve_descriptor,
        }
    }
}

/// Evaluates `f_R` at the unscaled `x₁` of every flat node; caps get 0.
pub fn lift_to_boundary(qm: &QuasiMode, curve: &BoundaryCurve) -> Result<BoundaryDensity> {
    let descriptor = curve.descriptor();
    match descriptor.shape {
        Shape::Stadium { half_length } if half_length == qm.r => {}
        Shape::Stadium { half_length } => {
            return Err(Error::CurveMismatch(format!(
                "stadium half-length {half_length} differs from quasimode R {}",
                qm.r
            )))
        }
        other => {
            return Err(Error::CurveMismatch(format!(
                "quasimodes lift onto stadiums only, got {}",
                other.tag()
            )))
        }
    }
    let values = curve
        .segments()
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            if seg.is_flat() {
                qm.value_at(curve.unscaled_point(i).x)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(BoundaryDensity {
        values,
        curve_descriptor: descriptor,
    })
}

/// Discrete `H^{1/2}` norm from the double-integral characterization:
/// `‖h‖² = Σ_i |h_i|² w_i + Σ_{i≠j} |h_i - h_j|² / |x_i - x_j|² w_i w_j`.
pub fn gagliardo_half_norm(d: &BoundaryDensity, curve: &BoundaryCurve) -> f64 {
    let w = curve.weights();
    let pts = curve.points();
    let h = &d.values;
    let l2: f64 = h.iter().zip(&w).map(|(v, w)| v.norm_sqr() * w).sum();
    let seminorm: f64 = (0..h.len())
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            for j in 0..h.len() {
                if i != j {
                    let diff = (h[i] - h[j]).norm_sqr();
                    if diff > 0.0 {
                        row += diff / (pts[i] - pts[j]).norm_squared() * w[j];
                    }
                }
            }
            row * w[i]
        })
        .sum();
    (l2 + seminorm).sqrt()
}

/// `(λI - K) φ` on the nodes.
pub fn apply_shifted(
    lambda: f64,
    k: &crate::npcore::OperatorMatrix,
    phi: &BoundaryDensity,
) -> BoundaryDensity {
    let kphi = k.apply_complex(&phi.values);
    BoundaryDensity {
        values: phi
            .values
            .iter()
            .zip(kphi)
            .map(|(p, kp)| p * lambda - kp)
            .collect(),
        curve_descriptor: phi.curve_descriptor,
    }
}

/// Node budget keeping the per-unit-length resolution fixed: `64 (R + 1)`,
/// rounded up to an even count.
pub fn default_node_count(r: f64) -> usize {
    let n = (64.0 * (r + 1.0)).ceil() as usize;
    n + n % 2
}

/// `‖(λI - K_R) φ_R‖ / ‖φ_R‖` in the discrete Gagliardo norm.
pub fn boundary_residual_ratio(lambda: f64, r: f64, n_nodes: usize) -> Result<f64> {
    if r < 2.0 || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r,
            reason: "boundary residual needs R >= 2",
        });
    }
    let qm = build_quasimode(lambda, r, LineGrid::for_aspect(r)?)?;
    let curve = build_stadium(r, n_nodes)?;
    let k = assemble_np(&curve)?;
    let phi = lift_to_boundary(&qm, &curve)?;
    let residual = apply_shifted(lambda, &k, &phi);
    Ok(gagliardo_half_norm(&residual, &curve) / gagliardo_half_norm(&phi, &curve))
}

/// Largest `|(Kφ_R)(x) - ½ (P₂ * f_R)(x₁)|` over flat nodes with `|x₁| ≤ R/2`.
///
/// The Poisson side is the whole-line convolution on the quasimode grid,
/// interpolated to the node abscissae.
pub fn flat_poisson_deviation(lambda: f64, r: f64, n_nodes: usize) -> Result<f64> {
    let qm = build_quasimode(lambda, r, LineGrid::for_aspect(r)?)?;
    let curve = build_stadium(r, n_nodes)?;
    let k = assemble_np(&curve)?;
    let phi = lift_to_boundary(&qm, &curve)?;
    let kphi = k.apply_complex(&phi.values);
    let smoothed = poisson_convolve(&qm.sampled(), 2.0)?;
    Ok((0..curve.n_nodes())
        .filter(|&i| curve.segments()[i].is_flat())
        .map(|i| (i, curve.unscaled_point(i).x))
        .filter(|(_, x)| x.abs() <= 0.5 * r)
        .map(|(i, x)| (kphi[i] - smoothed.interpolate(x) * 0.5).norm())
        .fold(0.0, f64::max))
}
