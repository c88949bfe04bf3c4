//! Numerical operator algebra for the momentum and angular momentum of
//! quasi-paraxial light beams.
//!
//! The crate builds truncated mode-space matrices for the per-unit-length
//! linear momentum `P` and angular momentum `J = S + L` of a beam expanded
//! over Hermite-Gauss modes with two transverse polarizations, verifies
//! their commutation table, and evaluates expectation values on coherent
//! and single-photon states. A brute-force oracle integrates the momentum
//! and angular-momentum densities of the classical analytic-signal fields
//! over a transverse grid so that every analytic matrix element can be
//! checked against the underlying electromagnetic fields.
//!
//! Conventions used throughout:
//!
//! * `lambda_bar` is the reduced wavelength `c/omega0 = lambda/(2*pi)`.
//! * `theta0 = 2*lambda_bar/w0` is the far-field divergence half-angle of a
//!   Gaussian beam of waist `w0`.
//! * All momenta are reported in units of `hbar*omega0/(c^2*T)`, the common
//!   prefactor shared by the operator and field-quadrature routes; it is
//!   never multiplied into stored numbers.
//! * Operator matrices carry their `theta0` / `lambda_bar` / `w0/2` scale
//!   factors numerically; a [`UnitsTag`](operators::UnitsTag) records which
//!   factor class each canonical operator belongs to.

pub mod beam;
pub mod error;
pub mod geometry;
pub mod modes;
pub mod operators;
pub mod oracle;
pub mod quad;
pub mod states;

pub use beam::BeamParams;
pub use error::Error;
pub use geometry::{LocalFrame, WaveVector};
pub use modes::{ModeIndex, ModeSpace};
pub use operators::{JOperators, POperators, QuadraticOperator, UnitsTag};
pub use states::{BeamState, Polarization};

/// Speed of light in vacuum [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;

/// Result alias for fallible crate operations.
pub type Result<T> = std::result::Result<T, Error>;
