//! Numerical spectra of the Neumann-Poincaré operator on thin planar domains.
//!
//! The crate discretizes the double layer (NP) operator on stadium-shaped
//! domains and ellipses with a Nyström scheme, symmetrizes it against the
//! single layer operator, and computes real spectra. Alongside the operator
//! machinery it provides the one-dimensional Fourier quasimodes that explain
//! why the spectra fill `[-1/2, 1/2]` as the domains get thinner, the
//! boundary-side residual of those quasimodes, and aspect-ratio sweeps.
//!
//! Modules:
//! - [`geometry`]: sampled boundary curves (stadium, ellipse, circle).
//! - [`npcore`]: operator assembly and the symmetric-definite eigensolve.
//! - [`fourier`]: bump functions, quasimodes, Poisson multipliers, `H^{1/2}` norms.
//! - [`boundary_residual`]: quasimodes lifted onto the stadium boundary.
//! - [`sweep`]: aspect-ratio sweeps, ellipse closed forms, density witnesses.
//! - [`export`]: CSV, JSON and binary writers for every result type.

pub mod boundary_residual;
pub mod error;
pub mod export;
pub mod fourier;
pub mod geometry;
pub mod npcore;
pub mod sweep;

pub use boundary_residual::{
    boundary_residual_ratio, flat_poisson_deviation, gagliardo_half_norm, lift_to_boundary,
    BoundaryDensity,
};
pub use error::{Error, Result};
pub use fourier::{
    build_quasimode, bump_psi_hat, cutoff_chi, poisson_convolve, poisson_multiplier,
    residual_ratio, sobolev_half_norm, xi0_of_lambda, LineGrid, QuasiMode, SampledLine,
};
pub use geometry::{
    build_ellipse, build_stadium, rescale, BoundaryCurve, CurveDescriptor, Segment, Shape,
};
pub use npcore::{
    assemble_np, assemble_single_layer, np_kernel_diagonal, np_kernel_value, plain_spectrum,
    spectrum, OperatorKind, OperatorMatrix, SpectrumMethod, SpectrumResult,
};
pub use sweep::{
    count_outside, density_witness, ellipse_oracle, run_sweep, NodePolicy, ProbeGrid, SweepReport,
};
