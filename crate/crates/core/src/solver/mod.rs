//! Monotone sub/super-solution iteration on annuli.

mod barrier;
mod convolution_matrix;
mod grid;
mod iterate;
mod linear;
mod mass;
mod pipeline;

pub use barrier::{build_subsuper, k_window, sigma_window, Barrier, BarrierTerm, SubSuperPair, SubSuperParams};
pub use convolution_matrix::ConvolutionMatrix;
pub use grid::RadialGrid;
pub use iterate::{
    monotone_iterate, AnnulusProblem, Discretization, GateReport, IterationConfig, IterationRecord, IterationState,
};
pub use linear::{linear_bvp_solve, RadialOperator};
pub use mass::{extract_singular_mass, SingularMass};
pub use pipeline::{calibrate, continuation_shrink, solve, Calibration, ContinuationStep, SolveReport, SolverConfig};
