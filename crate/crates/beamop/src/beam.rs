//! Beam parameters and derived scales.

use crate::error::Error;
use crate::Result;

/// Central frequency, waist and the derived scales every formula uses.
///
/// `lambda_bar` is the *reduced* wavelength `c/omega0 = lambda/(2π)`, and
/// `theta0 = 2 lambda_bar / w0 = lambda/(π w0)` is the far-field divergence
/// half-angle of a Gaussian beam of waist `w0`. This pairing is what makes
/// the analytic ladder matrix elements of the momentum operators exact for
/// Hermite-Gauss modes of waist `w0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    omega0: f64,
    w0: f64,
    c: f64,
}

/// Angular spread above which the first-order (quasi-paraxial) description
/// starts to lose accuracy.
pub const PARAXIALITY_LIMIT: f64 = 0.3;

impl BeamParams {
    /// Beam with central angular frequency `omega0` [rad/s] and waist `w0`
    /// [m] in vacuum.
    pub fn new(omega0: f64, w0: f64) -> Result<Self> {
        Self::with_light_speed(omega0, w0, crate::C_LIGHT)
    }

    /// Beam described against an explicit light speed; useful for scaled
    /// unit systems in numerical studies.
    pub fn with_light_speed(omega0: f64, w0: f64, c: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(omega0) || !positive(w0) || !positive(c) {
            return Err(Error::InvalidArgument(format!(
                "beam parameters must be positive, got omega0={omega0}, w0={w0}, c={c}"
            )));
        }
        Ok(BeamParams { omega0, w0, c })
    }

    /// Beam specified by vacuum wavelength `lambda` [m] instead of `omega0`.
    pub fn from_wavelength(lambda: f64, w0: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "wavelength must be positive, got {lambda}"
            )));
        }
        Self::new(2.0 * std::f64::consts::PI * crate::C_LIGHT / lambda, w0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn light_speed(&self) -> f64 {
        self.c
    }

    /// Wavenumber `k = omega0/c`.
    pub fn k(&self) -> f64 {
        self.omega0 / self.c
    }

    /// Vacuum wavelength `2π c / omega0`.
    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.c / self.omega0
    }

    /// Reduced wavelength `c/omega0 = lambda/(2π)`.
    pub fn lambda_bar(&self) -> f64 {
        self.c / self.omega0
    }

    /// Beam angular spread `2 lambda_bar / w0`.
    pub fn theta0(&self) -> f64 {
        2.0 * self.lambda_bar() / self.w0
    }

    /// True when `theta0` exceeds [`PARAXIALITY_LIMIT`]; results should then
    /// be treated as qualitative only.
    pub fn paraxiality_warning(&self) -> bool {
        self.theta0() >= PARAXIALITY_LIMIT
    }

    /// Rayleigh range `omega0 w0² / (2c) = w0/theta0`.
    pub fn rayleigh_range(&self) -> f64 {
        self.omega0 * self.w0 * self.w0 / (2.0 * self.c)
    }

    /// Beam radius `w(z) = w0 sqrt(1 + (z/zR)²)`.
    pub fn beam_radius(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.w0 * (1.0 + (z / zr) * (z / zr)).sqrt()
    }

    /// Gouy phase `atan(z/zR)` accumulated by the fundamental mode per
    /// transverse degree of freedom (times 1/2).
    pub fn gouy(&self, z: f64) -> f64 {
        (z / self.rayleigh_range()).atan()
    }

    /// Inverse radius of wavefront curvature `z/(z² + zR²)`; regular at the
    /// waist where the wavefront is flat.
    pub fn inverse_curvature_radius(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        z / (z * z + zr * zr)
    }
}
