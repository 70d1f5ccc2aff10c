//! Numerical and algebraic toolkit for Dirac operators with singular
//! delta-shell interactions: exact Dirac-matrix algebra and strength
//! classification, the complete closed-form spectral theory of the
//! one-dimensional point interaction, spectrally accurate Nystrom
//! discretization of the boundary integral operators on smooth closed planar
//! curves, and a Birman-Schwinger eigenvalue solver in the spectral gap
//! with Krein resolvent-correction evaluation.

pub mod algebra;
pub mod bem;
pub mod cli;
pub mod confinement;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod one_dim;
pub mod special;
pub mod spectral;

pub use algebra::{
    build_dirac_matrices, classify_strengths, coupling_matrix, fundamental_solution,
    fundamental_solution_residual, spectral_parameters, symbol_factorization_check,
    verify_anticommutation, DiracRepresentation, InteractionStrengths, Regime, SpectralParameters,
    StrengthClassification,
};
pub use bem::{
    assemble_c, assemble_d_alpha, assemble_riesz, check_selfadjointness_conditions, cinv_residual,
    evaluate_layer_potential, jump_relation_residual, omega_bounds, riesz_square_residual,
    DiscretizedOperator, OmegaBounds,
};
pub use confinement::{transmission_data, zigzag_kernel_check, TransmissionData};
pub use error::{Result, ShellError};
pub use geometry::{build_grid, builtin_curve, parse_curve, ClosedCurve, CurveKind, QuadratureGrid};
pub use one_dim::{
    bs_residual_1d, discrete_spectrum_1d_closed_form, discrete_spectrum_1d_numeric,
    gamma_field_1d, green_identity_residual_1d, resolvent_correction_1d, resolvent_kernel_1d,
    weyl_1d, Eigenvalue1D, PiecewiseFunction1D, Quadrature1D, WeylValue1D,
};
pub use spectral::{
    bs_scan, find_eigenvalues, reconstruct_eigenfunction, resolvent_correction_kernel,
    EigenpairReport, ScanResult, SolveOptions,
};

#[cfg(test)]
#[path = "/tmp/dbg.rs"]
mod dbg_cinv;
