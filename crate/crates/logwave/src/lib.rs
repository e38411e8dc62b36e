//! Simulation and certification toolkit for the spherically symmetric
//! defocusing wave equation with a logarithmically supercritical power
//! nonlinearity,
//!
//! ```text
//!     -∂ₜₜu + Δu = σ·u⁵·log(2 + u²),        u: I × ℝ³ → ℝ  (radial)
//! ```
//!
//! The crate evolves compactly supported radial data with an explicit
//! leapfrog scheme in the reduced variable `v = r·u`, evaluates the a priori
//! quantities that control such solutions (conserved energy, Morawetz flux,
//! the weighted spacetime integral `A`, the spacetime norm `B`, the data
//! norm `D`, radial Sobolev and Strichartz ratios) and mechanically executes
//! the interval-subdivision bootstrap that turns the Morawetz bound into a
//! double-exponential bound on `B`.
//!
//! Modules follow the pipeline:
//!
//! * [`nonlinearity`] — the family `σ·u^p·log(2+u²)^c` and its derived
//!   scalar functions `f`, `g`, `F`, `G`.
//! * [`field`] — radial mesh, the evolved pair `(v, ∂ₜv)`, initial-data
//!   profiles and reconstruction of `u` and its derivatives.
//! * [`solver`] — leapfrog time integration with CFL control, light-cone
//!   safety and blow-up detection.
//! * [`diagnostics`] — discrete versions of every continuum quantity.
//! * [`certifier`] — the greedy time subdivision, per-interval smallness
//!   checks and the closed-form interval-count and double-exponential bounds.
//! * [`config`] — run configuration (TOML) with load-time validation.
//! * [`formats`] — trajectory dumps, diagnostics CSV and certificate files.

pub mod certifier;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod formats;
pub mod nonlinearity;
pub mod solver;

pub use certifier::{CertifierConstants, CertifierMargins, SubdivisionCertificate, Verdict};
pub use config::RunConfig;
pub use diagnostics::{DiagnosticsReport, NormSnapshot};
pub use error::Error;
pub use field::{FieldState, InitialData, Profile, RadialGrid};
pub use nonlinearity::NonlinearitySpec;
pub use solver::{RunStatus, SolveConfig, Trajectory};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
