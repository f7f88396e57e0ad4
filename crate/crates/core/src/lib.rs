//! Radial finite-difference solvers for the space-dependently damped wave
//! equation `u_tt - Δu + a(x) u_t = 0` and the degenerate heat equation
//! `v_t = a(x)^{-1} Δv` on the exterior of a ball, together with the weighted
//! energy functionals and log-log decay fits used to measure their asymptotics.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All transcendental functions go through `libm`, so results are
//! bit-identical across both configurations.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod math;

pub mod coefficients;
pub mod comparison;
pub mod decay;
pub mod energetics;
pub mod error;
pub mod grid;
pub mod heat;
pub mod quadrature;
pub mod tridiag;
pub mod wave;

pub use coefficients::{DampingProfile, PotentialA, ProfileKind, WeightDerivatives, WeightParams};
pub use comparison::{optimality_experiment, ComparisonProfile, OptimalityReport};
pub use decay::{
    expected_exponents, fit_slope, verdict, DecaySeries, ExpectedExponents, FitWindow, RateVerdict,
    SlopeFit, VerdictMode,
};
pub use energetics::{
    critical_exponent, diffusion_difference, embedding_check, energy_record, hardy_check,
    EnergyRecord,
};
pub use error::{Error, Result};
pub use grid::{norm_dmu, radial_laplacian, weighted_integral, Field, RadialGrid};
pub use heat::{
    contraction_check, norm_series, semigroup_apply, submarkov_check, ContractionReport, HeatRun, HeatSolver,
    HeatState, StepSchedule, SubMarkovReport, Theta,
};
pub use wave::{run_wave, CauchyData, SupportMonitor, WaveRun, WaveSample, WaveSolver, WaveState};
