//! Spectral analysis of raw point clouds.
//!
//! The pipeline estimates a sampling scale, builds a discrete Laplace-Beltrami
//! operator from PCA tangent planes and projected Voronoi areas, solves for a
//! B-orthonormal harmonic basis and raises the resulting Fourier matrix to
//! arbitrary real powers:
//!
//! ```no_run
//! use fracharm_core::*;
//!
//! # fn main() -> fracharm_core::Result<()> {
//! let cloud = downsample(&read_ply("bunny.ply")?, 300, 0)?;
//! let index = build_index(&cloud);
//! let eps = estimate_epsilon(&index)?.epsilon;
//! let weights = all_area_weights(&cloud, &index, 10.0 * eps, 10.0 * eps)?;
//! let t = default_t(eps, DEFAULT_EXPONENT_MARGIN)?;
//! let pair = assemble_lbo(&cloud, &index, &weights, t, 10.0 * eps)?;
//! let basis = solve_harmonic_basis(&pair)?;
//! let op = FractionalOperator::from_basis(&basis)?;
//! let spectrum = pmfht_forward(&op, &cloud.coordinate_channels(), 0.5)?;
//! # let _ = spectrum;
//! # Ok(())
//! # }
//! ```
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom of this module fix the scalar for convenience.
//! Tolerances throughout assume `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod cloud;
mod error;
pub mod export;
mod filtering;
mod fractional;
mod harmonic_spectral;
mod lbo_assembly;
pub mod linalg;
mod ply_io;
mod scalar;
mod spatial_index;
mod tangent_voronoi;

pub use cloud::PointCloud;
pub use error::{Error, PlyPosition, Result};
pub use filtering::{apply_filter, smoothness_energy, FilterKind, FilterOutput, FilterSpec};
pub use fractional::{
    decompose_fourier_matrix, decompose_fourier_matrix_with_limit, fractional_matrix,
    pmfht_forward, pmfht_inverse, FractionalOperator, Reconstruction, BRANCH_CUT_MARGIN,
    DEFAULT_CONDITION_LIMIT, IMAGINARY_RESIDUE_TOL, RECONSTRUCTION_TOL,
};
pub use harmonic_spectral::{
    manifold_fourier_matrix, pmht_forward, pmht_inverse, solve_harmonic_basis,
    solve_harmonic_basis_with_limit, BasisId, HarmonicBasis, SpectralSignal, DEFAULT_DENSE_LIMIT,
    SEMIDEFINITE_TOL,
};
pub use lbo_assembly::{apply_lbo, assemble_lbo, default_t, LboPair, DEFAULT_EXPONENT_MARGIN};
pub use ply_io::{downsample, parse_ply, read_ply, write_ply, write_ply_to, PlyFormat};
pub use scalar::Real;
pub use spatial_index::{build_index, estimate_epsilon, NeighborIndex, SamplingEstimate};
pub use tangent_voronoi::{
    all_area_weights, all_area_weights_clipped, estimate_tangent_plane, voronoi_cell_area,
    voronoi_cell_area_clipped, AreaWeights, TangentFrame,
};

pub type PointCloudF64 = PointCloud<f64>;
pub type PointCloudF32 = PointCloud<f32>;
pub type LboPairF64 = LboPair<f64>;
pub type LboPairF32 = LboPair<f32>;
pub type HarmonicBasisF64 = HarmonicBasis<f64>;
pub type HarmonicBasisF32 = HarmonicBasis<f32>;
pub type FractionalOperatorF64 = FractionalOperator<f64>;
pub type FractionalOperatorF32 = FractionalOperator<f32>;
pub type SpectralSignalF64 = SpectralSignal<f64>;
pub type SpectralSignalF32 = SpectralSignal<f32>;
