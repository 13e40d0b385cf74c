//! Geometric (Berry) phases of parameterized two- and three-level Hamiltonians,
//! the Berry-corrected semiclassical quantization rule, and the line broadening
//! produced by smearing the internal parameter over a patch of size `l`.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: small complex Hermitian eigensolver, closed-loop quadrature,
//!   scalar root finding and log-log line fits.
//! * [`models`]: the two-level and SU(3) internal Hamiltonians and the
//!   collective Hamiltonian `H0(P)`.
//! * [`berry`]: closed-form phases and the overlap-product (Wilson loop) engine.
//! * [`quantize`]: quantized levels from `P = (m - Γ/2π)ħ`.
//! * [`broadening`]: patch sweeps, scaling fits and the linear Mead bound.
//! * [`cli`]: the `berryline` command-line front end.

pub mod berry;
pub mod broadening;
pub mod cli;
pub mod error;
pub mod models;
pub mod numerics;
pub mod quantize;

pub use berry::{
    analytic_su3_phase, analytic_two_level_phase, connection_integral_su3, overlap_phase,
    wilson_loop_phase, BerryPhaseResult, Branch, LoopKind, LoopPhase, ParameterLoop, WilsonOptions,
};
pub use broadening::{
    compare_with_mead, mead_bound, mead_scaling, scaling_study, sweep_patch, sweep_patch_su3,
    BroadeningReport, MeadBound, MeadComparison, PatchConfig, PatchSample, ScalingModel,
    ScalingStudy,
};
pub use error::{Error, Result};
pub use models::{
    collective_derivative, collective_energy, three_level_hamiltonian, three_level_spectrum,
    three_level_state, two_level_hamiltonian, CollectiveKind, CollectiveModel, ThreeLevelModel,
    TwoLevelModel,
};
pub use numerics::{
    eig_hermitian, fit_loglog, integrate_closed, solve_scalar, ComplexMatrix, EigenSystem,
    FitResult,
};
pub use quantize::{quantize_level, spectrum, QuantizedLevel};
