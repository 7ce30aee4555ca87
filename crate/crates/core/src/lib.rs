//! Numerical laboratory for the one-dimensional cubic NLS with
//! time-dependent coefficients that governs perturbations of self-similar
//! vortex filaments, and for the binormal-flow curves it encodes.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: periodic grids, fields, unitary transforms, weighted norms;
//! * [`modes`]: the per-frequency ODE system and its asymptotics;
//! * [`linprop`]: the linear propagator, Duhamel integrals, linear scattering;
//! * [`nlsolve`]: split-step solver, conservation laws, nonlinear scattering;
//! * [`transforms`]: filament function, pseudo-conformal map;
//! * [`geometry`]: Frenet integration, self-similar curves, corners;
//! * [`waveops`]: linear and nonlinear wave operators;
//! * [`harness`]: configs, initial data, reports and experiment dispatch.

pub mod error;
pub mod field;
pub mod fit;
pub mod geometry;
pub mod harness;
pub mod linprop;
pub mod modes;
pub mod nlsolve;
pub mod ode;
pub mod params;
pub mod quad;
pub mod transforms;
pub mod waveops;

pub use error::{Error, Result};
pub use field::{Grid, Repr, SpectralField};
pub use params::{Params, Sign};
