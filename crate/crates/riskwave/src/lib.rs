//! Surface-like waves of macro financial variables on a two-dimensional
//! risk space.
//!
//! The model treats Investment and Profits as interacting fluids over a
//! rectangle of risk coordinates. This crate provides:
//!
//! - [`model`]: parameters, constraint validation and the linear steady
//!   state ("more risks - more Profits");
//! - [`kinetic`]: aggregation of agent ensembles into density, impulse and
//!   velocity fields;
//! - [`quartic`] and [`dispersion`]: the border-mode analysis, from the
//!   incompressible square-root dispersion law to the compressible quartic
//!   with its three depth-profile regimes and amplification diagnostics;
//! - [`wavefield`]: reconstruction of potentials, border shape, field
//!   perturbations, border-aggregated Investment and circulation orbits;
//! - [`fdsim`]: a staggered leapfrog time-domain integrator used to
//!   cross-check the analytic modes;
//! - [`config`], [`output`], [`cli`]: the `riskwave` command-line driver
//!   with deterministic CSV emission.

pub mod cli;
pub mod config;
pub mod dispersion;
pub mod fdsim;
pub mod kinetic;
pub mod model;
pub mod output;
pub mod quartic;
pub mod wavefield;

pub use dispersion::{
    classify_and_weights, incompressible_mode, inward_growth_rates, quartic_coefficients,
    IncompressibleMode, Regime, WaveMode, WeightPolicy,
};
pub use kinetic::{deposit_fields, field_velocity, DepositMode, EParticle, GridSpec};
pub use model::{
    corner_values, incompressible_amplitudes, steady_fields, validate_params, ModelParams,
    SteadyPoint,
};
pub use quartic::{solve_quartic, QuarticCoeffs};
