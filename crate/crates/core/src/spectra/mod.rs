//! Dense diagonalization, unfolding, spacing statistics, random-matrix
//! ensembles and eigenstate-overlap analysis.

mod eigen;
mod overlap;
mod rmt;
mod statistics;

pub use eigen::{eigh, eigh_dense, eigh_with_limit, Eigenvectors, Spectrum, DEFAULT_DENSE_LIMIT};
pub use overlap::{
    averaged_profile, breit_wigner, breit_wigner_fit, central_window, fit_profile, overlap_matrix, BreitWignerFit,
    OverlapMatrix, ProfilePoint,
};
pub use rmt::{ensemble_coefficient, sample_rmt};
pub use statistics::{
    fit_density, histogram_l1, integrated_distribution, ks_distance, reference_cdf, reference_pdf, unfold,
    DensityModel, EmpiricalCdf, LevelDensity, ReferenceKind, UniformDensity, UnfoldedSpacings,
};
