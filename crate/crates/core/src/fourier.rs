//! One-dimensional Fourier machinery on a uniform line grid.
//!
//! Transform convention: `f̂(ξ) = ∫ f(x) e^{-2πiξx} dx`. On a grid with
//! half-width `L` and `n` samples at `x_j = -L + j·2L/n`, the discrete
//! transform is sampled at `ξ_k = k/(2L)` for `k ∈ [-n/2, n/2)` and stored in
//! ascending frequency order.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes of the trapezoid rule used to invert the bump transform.
const BUMP_INVERSION_NODES: usize = 512;

/// Gauss-Legendre order for the cumulative bump integral.
const CUMULATIVE_ORDER: usize = 48;

/// Uniform grid on `[-L, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub half_width: f64,
    pub n_samples: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, n_samples: usize) -> Result<Self> {
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: half_width,
                reason: "grid half-width must be positive and finite",
            });
        }
        if n_samples < 2 || !n_samples.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n_samples",
                value: n_samples as f64,
                reason: "sample count must be a power of two",
            });
        }
        Ok(Self {
            half_width,
            n_samples,
        })
    }

    /// Grid used for a quasimode at aspect ratio `r`: `L = 2R`,
    /// `n = 2^ceil(log2(64 R))`.
    pub fn for_aspect(r: f64) -> Result<Self> {
        let n = ((64.0 * r).ceil() as usize).max(2).next_power_of_two();
        Self::new(2.0 * r, n)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_samples as f64
    }

    pub fn frequency_spacing(&self) -> f64 {
        0.5 / self.half_width
    }

    pub fn abscissa(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn abscissae(&self) -> Vec<f64> {
        (0..self.n_samples).map(|j| self.abscissa(j)).collect()
    }

    /// Frequencies in ascending order, matching [`SampledLine::transform`].
    pub fn frequencies(&self) -> Vec<f64> {
        let half = (self.n_samples / 2) as isize;
        let dxi = self.frequency_spacing();
        (-half..half).map(|k| k as f64 * dxi).collect()
    }
}

/// Complex samples of a function on a [`LineGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledLine {
    pub grid: LineGrid,
    pub values: Vec<Complex64>,
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft(n, direction)
}

impl SampledLine {
    pub fn new(grid: LineGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_samples {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.n_samples,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LineGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.abscissae().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: LineGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Continuous transform sampled at [`LineGrid::frequencies`].
    pub fn transform(&self) -> Vec<Complex64> {
        let n = self.grid.n_samples;
        let mut buf = self.values.clone();
        plan(n, FftDirection::Forward).process(&mut buf);
        let dx = self.grid.spacing();
        let half = n / 2;
        // f̂(ξ_k) = dx · (-1)^k · FFT[k mod n]
        (0..n)
            .map(|i| {
                let k = i as isize - half as isize;
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[(k.rem_euclid(n as isize)) as usize] * (sign * dx)
            })
            .collect()
    }

    /// Inverse of [`SampledLine::transform`].
    pub fn from_transform(grid: LineGrid, spectrum: &[Complex64]) -> Result<Self> {
        let n = grid.n_samples;
        if spectrum.len() != n {
            return Err(Error::DimensionMismatch {
                left: spectrum.len(),
                right: n,
            });
        }
        let half = n / 2;
        let dx = grid.spacing();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, z) in spectrum.iter().enumerate() {
            let k = i as isize - half as isize;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[k.rem_euclid(n as isize) as usize] = z * sign;
        }
        plan(n, FftDirection::Inverse).process(&mut buf);
        let scale = 1.0 / (n as f64 * dx);
        for z in buf.iter_mut() {
            *z *= scale;
        }
        Ok(Self { grid, values: buf })
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// Local Lagrange interpolation through the 8 nearest samples.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        const STENCIL: usize = 8;
        let n = self.grid.n_samples;
        let h = self.grid.spacing();
        let pos = (x + self.grid.half_width) / h;
        let first = (pos.floor() as isize - (STENCIL as isize / 2 - 1))
            .clamp(0, (n - STENCIL) as isize) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in first..first + STENCIL {
            let mut basis = 1.0;
            for b in first..first + STENCIL {
                if a != b {
                    basis *= (pos - b as f64) / (a as f64 - b as f64);
                }
            }
            acc += self.values[a] * basis;
        }
        acc
    }
}

/// `ξ₀ = log(1/(2λ)) / (4π)`, the nonnegative root of `λ = ½ e^{-4π|ξ₀|}`.
pub fn xi0_of_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "lambda must lie in (0, 1/2]",
        });
    }
    Ok((0.5 / lambda).ln().max(0.0) / (4.0 * PI))
}

fn raw_bump(xi: f64) -> f64 {
    let s = 1.0 - xi * xi;
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

struct BumpTables {
    normalization: f64,
    /// Trapezoid nodes and weighted bump values for the inverse transform.
    nodes: Vec<f64>,
    weighted: Vec<f64>,
    gauss_nodes: Vec<f64>,
    gauss_weights: Vec<f64>,
    /// Gauss-Legendre value of `∫_{-1}^0 ψ̂`, so the cumulative is exactly 1/2 at 0.
    half_mass: f64,
}

fn bump_tables() -> &'static BumpTables {
    static TABLES: OnceLock<BumpTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let m = BUMP_INVERSION_NODES;
        let h = 2.0 / m as f64;
        // endpoints contribute 0; the bump is flat to all orders there
        let nodes: Vec<f64> = (1..m).map(|i| -1.0 + i as f64 * h).collect();
        let raw: Vec<f64> = nodes.iter().map(|&x| raw_bump(x) * h).collect();
        let normalization = 1.0 / raw.iter().sum::<f64>();
        let weighted = raw.iter().map(|v| v * normalization).collect();
        let (gauss_nodes, gauss_weights) = gauss_legendre(CUMULATIVE_ORDER);
        let half_mass = left_integral(&gauss_nodes, &gauss_weights, 0.0) * normalization;
        BumpTables {
            normalization,
            nodes,
            weighted,
            gauss_nodes,
            gauss_weights,
            half_mass,
        }
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `ψ̂(ξ) = c·exp(-1/(1-ξ²))` on `(-1, 1)`, zero elsewhere, with `∫ψ̂ = 1`.
pub fn bump_psi_hat(xi: f64) -> f64 {
    raw_bump(xi) * bump_tables().normalization
}

/// `ψ(x) = ∫ ψ̂(ξ) e^{2πiξx} dξ`, real and even since `ψ̂` is.
pub fn bump_psi(x: f64) -> f64 {
    let t = bump_tables();
    t.nodes
        .iter()
        .zip(&t.weighted)
        .map(|(xi, w)| w * (2.0 * PI * xi * x).cos())
        .sum()
}

/// `∫_{-1}^{y} ψ̂`, rising smoothly from 0 to 1.
fn bump_cumulative(y: f64) -> f64 {
    if y <= -1.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    if y > 0.0 {
        return 1.0 - bump_cumulative(-y);
    }
    let t = bump_tables();
    0.5 * left_integral(&t.gauss_nodes, &t.gauss_weights, y) * t.normalization / t.half_mass
}

/// `∫_{-1}^{y} exp(-1/(1-ξ²)) dξ` by Gauss-Legendre.
fn left_integral(nodes: &[f64], weights: &[f64], y: f64) -> f64 {
    let half = 0.5 * (y + 1.0);
    nodes
        .iter()
        .zip(weights)
        .map(|(s, w)| w * raw_bump(-1.0 + half * (s + 1.0)))
        .sum::<f64>()
        * half
}

/// Smooth cutoff: 1 on `[-1/4, 1/4]`, 0 outside `(-1/2, 1/2)`.
pub fn cutoff_chi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.25 {
        1.0
    } else if a >= 0.5 {
        0.0
    } else {
        // u in (0, 1) across the transition band
        let u = 4.0 * (a - 0.25);
        1.0 - bump_cumulative(2.0 * u - 1.0)
    }
}

/// `f_R(x) = e^{2πiξ₀x} (χψ)(x/R)`, sampled with its transform.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiMode {
    pub lambda: f64,
    pub xi0: f64,
    pub r: f64,
    pub grid: LineGrid,
    pub samples: Vec<Complex64>,
    pub spectrum_samples: Vec<Complex64>,
}

impl QuasiMode {
    /// `f_R` at an arbitrary point.
    pub fn value_at(&self, x: f64) -> Complex64 {
        quasimode_value(self.xi0, self.r, x)
    }

    pub fn sampled(&self) -> SampledLine {
        SampledLine {
            grid: self.grid,
            values: self.samples.clone(),
        }
    }
}

fn quasimode_value(xi0: f64, r: f64, x: f64) -> Complex64 {
    let u = x / r;
    let chi = cutoff_chi(u);
    if chi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(chi * bump_psi(u), 2.0 * PI * xi0 * x)
}

pub fn build_quasimode(lambda: f64, r: f64, grid: LineGrid) -> Result<QuasiMode> {
    let xi0 = xi0_of_lambda(lambda)?;
    if r < 1.0 || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r,
            reason: "aspect ratio must be finite and at least 1",
        });
    }
    // support [-R/2, R/2] plus a margin of R/2
    if grid.half_width < r {
        return Err(Error::GridTooNarrow {
            support: 0.5 * r,
            required: r,
            half_width: grid.half_width,
        });
    }
    let line = SampledLine::from_fn(grid, |x| quasimode_value(xi0, r, x));
    let spectrum_samples = line.transform();
    Ok(QuasiMode {
        lambda,
        xi0,
        r,
        grid,
        samples: line.values,
        spectrum_samples,
    })
}

fn check_time(t: f64) -> Result<()> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "Poisson parameter must be positive and finite",
        });
    }
    Ok(())
}

/// Multiplies the transform by `e^{-2πt|ξ|}` and inverts. On the periodic
/// grid this is convolution with the Poisson kernel periodized over `2L`.
pub fn poisson_multiplier(f: &SampledLine, t: f64) -> Result<SampledLine> {
    check_time(t)?;
    let freqs = f.grid.frequencies();
    let spec: Vec<Complex64> = f
        .transform()
        .into_iter()
        .zip(freqs)
        .map(|(z, xi)| z * (-2.0 * PI * t * xi.abs()).exp())
        .collect();
    SampledLine::from_transform(f.grid, &spec)
}

/// `P_t(x) = (1/π) t/(x² + t²)`.
pub fn poisson_kernel(x: f64, t: f64) -> f64 {
    t / (PI * (x * x + t * t))
}

/// `Σ_m P_t(x + mT)` in closed form.
pub fn periodized_poisson_kernel(x: f64, t: f64, period: f64) -> f64 {
    let a = 2.0 * PI * t / period;
    let theta = 2.0 * PI * x / period;
    a.sinh() / (period * (a.cosh() - theta.cos()))
}

/// `P_t * f` on the whole line, sampled on the grid of `f`.
///
/// Applies [`poisson_multiplier`], then removes the contributions of the
/// periodic images, `Σ_{m≠0} P_t(· + 2Lm) * f`, by quadrature against the
/// smooth kernel `P_t - P_t^{per}`. `f` must vanish near the grid edges.
pub fn poisson_convolve(f: &SampledLine, t: f64) -> Result<SampledLine> {
    let periodic = poisson_multiplier(f, t)?;
    let grid = f.grid;
    let period = 2.0 * grid.half_width;
    let dx = grid.spacing();
    let support: Vec<(f64, Complex64)> = grid
        .abscissae()
        .into_iter()
        .zip(f.values.iter().copied())
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .collect();
    let values = grid
        .abscissae()
        .into_iter()
        .zip(periodic.values)
        .map(|(x, p)| {
            let correction: Complex64 = support
                .iter()
                .map(|&(y, v)| {
                    let u = x - y;
                    v * (poisson_kernel(u, t) - periodized_poisson_kernel(u, t, period))
                })
                .sum();
            p + correction * dx
        })
        .collect();
    Ok(SampledLine { grid, values })
}

/// `(Σ (1 + |ξ_k|) |f̂(ξ_k)|² Δξ)^{1/2}`.
pub fn sobolev_half_norm(f: &SampledLine) -> f64 {
    weighted_half_norm(&f.grid, &f.transform())
}

fn weighted_half_norm(grid: &LineGrid, spectrum: &[Complex64]) -> f64 {
    let dxi = grid.frequency_spacing();
    grid.frequencies()
        .iter()
        .zip(spectrum)
        .map(|(xi, z)| (1.0 + xi.abs()) * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        * dxi.sqrt()
}

/// `‖λ f_R - ½ P₂ * f_R‖_{1/2} / ‖f_R‖_{1/2}` on the automatic grid.
///
/// The Poisson step is the exact multiplier on the sampled transform, so the
/// numerator is a Riemann sum of `(λ - ½e^{-4π|ξ|}) f̂_R(ξ)` in `H^{1/2}`.
pub fn residual_ratio(lambda: f64, r: f64) -> Result<f64> {
    if r < 4.0 || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r,
            reason: "residual ratio needs R >= 4",
        });
    }
    let grid = LineGrid::for_aspect(r)?;
    let qm = build_quasimode(lambda, r, grid)?;
    let f = qm.sampled();
    let smoothed = poisson_multiplier(&f, 2.0)?;
    let residual = SampledLine {
        grid,
        values: f
            .values
            .iter()
            .zip(&smoothed.values)
            .map(|(a, b)| a * lambda - b * 0.5)
            .collect(),
    };
    Ok(sobolev_half_norm(&residual) / weighted_half_norm(&grid, &qm.spectrum_samples))
}
