//! Dunkl harmonic analysis on the reflection group Z2^d: kernels, the
//! generalized Hermite spectral basis, free and oscillator propagators,
//! Schatten-class operators and orthonormal Strichartz estimates.

pub mod config;
pub mod dunkl;
pub mod error;
pub mod free;
pub mod hartree;
pub mod hermite;
pub mod hls;
pub mod operators;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod strichartz;

pub use config::HarnessConfig;
pub use dunkl::{dunkl_kernel_1d, dunkl_operator_matrix, DunklStructure, KernelRoute};
pub use error::{DunklError, Result};
pub use hermite::{HermiteBasis, StateVector};
pub use operators::{OperatorMatrix, OrthonormalSystem, Profile, Propagator};
pub use quadrature::{build_rule, QuadratureRule1D, TensorGrid, TimeRule};
pub use strichartz::{ExponentPair, StrichartzReport};
