//! Nyström discretization of the Neumann-Poincaré and single layer operators.
//!
//! The NP operator is not self-adjoint in `L^2`, but `K S = S K*` makes
//! `K S` symmetric. With `S` positive definite (guaranteed once the curve
//! diameter is below 1), the spectrum of `K` is the spectrum of the
//! symmetric-definite pencil `(K S, S)`, which is solved through a Cholesky
//! reduction of `S`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveDescriptor, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    NpKernel,
    SingleLayer,
}

/// Dense operator acting on nodal values of a density.
///
/// `entries[(i, j)]` already contains the quadrature weight of node `j`, so
/// `entries * v` is the discrete operator applied to the samples `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub kind: OperatorKind,
    pub curve_descriptor: CurveDescriptor,
}

impl OperatorMatrix {
    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    /// `W^{1/2} A W^{-1/2}`: the operator in the `L^2`-orthonormal nodal basis.
    /// For the single layer this is symmetric.
    pub fn weight_symmetrized(&self) -> DMatrix<f64> {
        weight_conjugate(&self.entries, &self.weights)
    }

    /// Applies the operator to complex nodal values.
    pub fn apply_complex(&self, v: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let re = DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
        let im = DVector::from_iterator(v.len(), v.iter().map(|z| z.im));
        let a = &self.entries * re;
        let b = &self.entries * im;
        a.iter()
            .zip(b.iter())
            .map(|(&x, &y)| num_complex::Complex64::new(x, y))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Symmetrized,
    Plain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    pub n_nodes: usize,
    pub curve_descriptor: CurveDescriptor,
    pub method: SpectrumMethod,
    /// Relative Frobenius asymmetry of the weighted `K S` before averaging
    /// (symmetrized method), or the largest discarded imaginary part (plain).
    pub asymmetry: f64,
}

impl SpectrumResult {
    /// Eigenvalues with the one closest to 1/2 removed.
    pub fn nontrivial(&self) -> Vec<f64> {
        nontrivial(&self.eigenvalues)
    }

    pub fn pairing_defect(&self) -> f64 {
        pairing_defect(&self.eigenvalues)
    }

    pub fn containment_defect(&self) -> f64 {
        containment_defect(&self.eigenvalues)
    }
}

/// Drops the eigenvalue closest to 1/2 from a descending list.
pub fn nontrivial(eigenvalues: &[f64]) -> Vec<f64> {
    let mut ev = eigenvalues.to_vec();
    if let Some((idx, _)) = ev
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()))
    {
        ev.remove(idx);
    }
    ev
}

/// Largest `|λ_k + λ_{n-1-k}|` over the nontrivial eigenvalues of a
/// descending list, i.e. the deviation from a spectrum symmetric about 0.
pub fn pairing_defect(eigenvalues: &[f64]) -> f64 {
    let ev = nontrivial(eigenvalues);
    let n = ev.len();
    (0..n)
        .map(|k| (ev[k] + ev[n - 1 - k]).abs())
        .fold(0.0, f64::max)
}

/// Largest distance of an eigenvalue outside `[-1/2, 1/2]`.
pub fn containment_defect(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|l| (l.abs() - 0.5).max(0.0))
        .fold(0.0, f64::max)
}

/// `(1/2π) <y - x, ν_y> / |x - y|^2`.
pub fn np_kernel_value(x: &Point, y: &Point, normal_y: &Point) -> Result<f64> {
    let d = y - x;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(d.dot(normal_y) / (2.0 * PI * r2))
}

/// Limit of the NP kernel on the diagonal of a C² curve.
pub fn np_kernel_diagonal(curvature: f64) -> f64 {
    curvature / (4.0 * PI)
}

fn check_separated(curve: &BoundaryCurve) -> Result<()> {
    let pts = curve.points();
    let n = pts.len();
    let tol = 1e-14 * curve.perimeter();
    for i in 0..n {
        let j = (i + 1) % n;
        if (pts[i] - pts[j]).norm() <= tol {
            return Err(Error::DegenerateCurve(i, j));
        }
    }
    Ok(())
}

/// Nyström matrix of the NP operator with the periodic trapezoid rule.
pub fn assemble_np(curve: &BoundaryCurve) -> Result<OperatorMatrix> {
    check_separated(curve)?;
    let n = curve.n_nodes();
    let pts = curve.points();
    let normals = curve.normals();
    let curv = curve.curvatures();
    let weights = curve.weights();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = if i == j {
                        np_kernel_diagonal(curv[i])
                    } else {
                        let d = pts[j] - pts[i];
                        let r2 = d.norm_squared();
                        if r2 == 0.0 {
                            return f64::NAN;
                        }
                        d.dot(&normals[j]) / (2.0 * PI * r2)
                    };
                    k * weights[j]
                })
                .collect()
        })
        .collect();
    if let Some((i, j)) = find_nan(&rows) {
        return Err(Error::DegenerateCurve(i, j));
    }
    Ok(OperatorMatrix {
        entries: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        weights,
        kind: OperatorKind::NpKernel,
        curve_descriptor: curve.descriptor(),
    })
}

fn find_nan(rows: &[Vec<f64>]) -> Option<(usize, usize)> {
    rows.iter()
        .enumerate()
        .find_map(|(i, row)| row.iter().position(|v| v.is_nan()).map(|j| (i, j)))
}

/// Weights `R_k` of the log-corrected product rule:
/// `∫_0^{2π} log(4 sin²((t_i - τ)/2)) φ(τ) dτ ≈ Σ_j R_{(i-j) mod n} φ(t_j)`,
/// exact for trigonometric polynomials of degree below `n/2`.
pub fn log_quadrature_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let d = 2.0 * PI * k as f64 / nf;
            let series: f64 = (1..half).map(|m| (m as f64 * d).cos() / m as f64).sum();
            -4.0 * PI / nf * series - 4.0 * PI / (nf * nf) * (half as f64 * d).cos()
        })
        .collect()
}

/// Single layer `-(1/2π) log|x - y|` with the logarithmic singularity split
/// off and integrated exactly against the periodic interpolant.
pub fn assemble_single_layer(curve: &BoundaryCurve) -> Result<OperatorMatrix> {
    let diam = curve.diameter();
    if diam.is_nan() || diam >= 1.0 {
        return Err(Error::DiameterTooLarge(diam));
    }
    check_separated(curve)?;
    let n = curve.n_nodes();
    let pts = curve.points();
    let t = curve.params();
    let speeds = curve.speeds();
    let weights = curve.weights();
    let dt = curve.node_spacing();
    let log_w = log_quadrature_weights(n);

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let smooth = if i == j {
                        (speeds[i] * speeds[i]).ln()
                    } else {
                        let r2 = (pts[i] - pts[j]).norm_squared();
                        if r2 == 0.0 {
                            return f64::NAN;
                        }
                        let s = (0.5 * (t[i] - t[j])).sin();
                        (r2 / (4.0 * s * s)).ln()
                    };
                    let singular = log_w[(i + n - j) % n];
                    -(singular + dt * smooth) * speeds[j] / (4.0 * PI)
                })
                .collect()
        })
        .collect();
    if let Some((i, j)) = find_nan(&rows) {
        return Err(Error::DegenerateCurve(i, j));
    }
    Ok(OperatorMatrix {
        entries: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        weights,
        kind: OperatorKind::SingleLayer,
        curve_descriptor: curve.descriptor(),
    })
}

fn weight_conjugate(m: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| sq[i] * m[(i, j)] / sq[j])
}

fn symmetric_part(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let mt = m.transpose();
    let asym = (m - &mt).norm() / m.norm().max(f64::MIN_POSITIVE);
    ((m + mt) * 0.5, asym)
}

fn sort_descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Spectrum of the NP operator from the pencil `(K S, S)`.
pub fn spectrum(k: &OperatorMatrix, s: &OperatorMatrix) -> Result<SpectrumResult> {
    if k.kind != OperatorKind::NpKernel {
        return Err(Error::KindMismatch {
            expected: "np_kernel",
        });
    }
    if s.kind != OperatorKind::SingleLayer {
        return Err(Error::KindMismatch {
            expected: "single_layer",
        });
    }
    if k.n_nodes() != s.n_nodes() {
        return Err(Error::DimensionMismatch {
            left: k.n_nodes(),
            right: s.n_nodes(),
        });
    }
    let ks = &k.entries * &s.entries;
    let (ks_sym, asymmetry) = symmetric_part(&weight_conjugate(&ks, &k.weights));
    let (s_sym, _) = symmetric_part(&s.weight_symmetrized());

    let chol = s_sym.cholesky().ok_or(Error::CholeskyFailed)?;
    let l = chol.l();
    // C = L^{-1} H L^{-T}
    let half = l
        .solve_lower_triangular(&ks_sym)
        .ok_or(Error::CholeskyFailed)?;
    let reduced = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(Error::CholeskyFailed)?;
    let (reduced, _) = symmetric_part(&reduced);
    let eig = reduced.symmetric_eigenvalues();
    Ok(SpectrumResult {
        eigenvalues: sort_descending(eig.iter().copied().collect()),
        n_nodes: k.n_nodes(),
        curve_descriptor: k.curve_descriptor,
        method: SpectrumMethod::Symmetrized,
        asymmetry,
    })
}

/// Real parts of the eigenvalues of `K` itself (general real eigensolver).
/// Only meant as a cross-check of [`spectrum`].
pub fn plain_spectrum(k: &OperatorMatrix) -> Result<SpectrumResult> {
    if k.kind != OperatorKind::NpKernel {
        return Err(Error::KindMismatch {
            expected: "np_kernel",
        });
    }
    let eig = k.entries.complex_eigenvalues();
    let max_imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(SpectrumResult {
        eigenvalues: sort_descending(eig.iter().map(|z| z.re).collect()),
        n_nodes: k.n_nodes(),
        curve_descriptor: k.curve_descriptor,
        method: SpectrumMethod::Plain,
        asymmetry: max_imag,
    })
}

/// Builds both operators for `curve` and returns the symmetrized spectrum.
pub fn curve_spectrum(curve: &BoundaryCurve) -> Result<SpectrumResult> {
    let k = assemble_np(curve)?;
    let s = assemble_single_layer(curve)?;
    spectrum(&k, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_ellipse, build_stadium, rescale};
    use approx::assert_relative_eq;

    #[test]
    fn kernel_examples() {
        let o = Point::new(0.0, 0.0);
        let y = Point::new(1.0, 0.0);
        assert_eq!(np_kernel_value(&o, &y, &Point::new(0.0, 1.0)).unwrap(), 0.0);
        assert_relative_eq!(
            np_kernel_value(&o, &y, &Point::new(1.0, 0.0)).unwrap(),
            1.0 / (2.0 * PI)
        );
        assert!(matches!(
            np_kernel_value(&y, &y, &Point::new(1.0, 0.0)),
            Err(Error::CoincidentPoints)
        ));
        assert_eq!(np_kernel_diagonal(0.0), 0.0);
        assert_relative_eq!(np_kernel_diagonal(1.0 / 0.3), 1.0 / (4.0 * PI * 0.3));
    }

    #[test]
    fn kernel_on_circle_is_constant() {
        let a = 0.7;
        for &(s, t) in &[(0.1, 2.0), (1.0, 4.5), (3.0, 3.3)] {
            let x = Point::new(a * f64::cos(s), a * f64::sin(s));
            let y = Point::new(a * f64::cos(t), a * f64::sin(t));
            let ny = y / a;
            assert_relative_eq!(
                np_kernel_value(&x, &y, &ny).unwrap(),
                1.0 / (4.0 * PI * a),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn circle_matrix_is_rank_one() {
        let c = build_ellipse(1.0, 1.0, 64).unwrap();
        let a = 0.25;
        let k = assemble_np(&c).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert_relative_eq!(
                    k.entries[(i, j)],
                    k.weights[j] / (4.0 * PI * a),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn log_weights_integrate_cosines() {
        // ∫ log(4 sin²(τ/2)) cos(mτ) dτ = -2π/m, and 0 for m = 0
        let n = 32;
        let w = log_quadrature_weights(n);
        for m in 0..n / 2 {
            let approx: f64 = (0..n)
                .map(|j| {
                    let tj = 2.0 * PI * j as f64 / n as f64;
                    w[(n - j) % n] * (m as f64 * tj).cos()
                })
                .sum();
            let exact = if m == 0 { 0.0 } else { -2.0 * PI / m as f64 };
            assert_relative_eq!(approx, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_layer_rejects_large_curves() {
        let c = build_ellipse(1.0, 1.0, 64).unwrap();
        let big = rescale(&c, 4.0).unwrap();
        assert!(matches!(
            assemble_single_layer(&big),
            Err(Error::DiameterTooLarge(_))
        ));
    }

    #[test]
    fn spectrum_checks_inputs() {
        let c = build_ellipse(2.0, 1.0, 64).unwrap();
        let d = build_ellipse(2.0, 1.0, 66).unwrap();
        let k = assemble_np(&c).unwrap();
        let s = assemble_single_layer(&c).unwrap();
        let s2 = assemble_single_layer(&d).unwrap();
        assert!(matches!(
            spectrum(&k, &s2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(spectrum(&s, &k), Err(Error::KindMismatch { .. })));
        assert!(plain_spectrum(&s).is_err());
    }

    #[test]
    fn degenerate_curve_rejected() {
        let c = build_stadium(2.0, 64).unwrap();
        let mut pts: Vec<Point> = c.points().to_vec();
        pts[3] = pts[2];
        let bad = crate::geometry::tests_support::with_points(&c, pts);
        assert!(matches!(assemble_np(&bad), Err(Error::DegenerateCurve(..))));
    }
}
