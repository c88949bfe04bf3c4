//! Polarization geometry of a single plane-wave component.
//!
//! Each wave vector `k` carries a local right-handed frame
//! `{e1, e2, k/|k|}` obtained by rotating the lab frame `{x, y, z}` around
//! `n = z × k / |z × k|` by the polar angle `θ = arcsin(k_perp c / ω)`.
//! The exact frame uses the Rodrigues rotation matrix; the paraxial frame
//! keeps the rotation to first order in `θ`, which leaves `e1`, `e2`
//! un-normalized by O(θ²) terms:
//!
//! ```text
//! e1 ≈ x - z kx/k,   e2 ≈ y - z ky/k.
//! ```

use crate::error::Error;
use crate::Result;
use nalgebra::{Matrix3, Vector3};

/// A forward-propagating plane-wave label `(kx, ky, ω)`.
///
/// Only waves with `k_perp <= ω/c` are representable; evanescent components
/// are rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    kx: f64,
    ky: f64,
    omega: f64,
}

impl WaveVector {
    pub fn new(kx: f64, ky: f64, omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 || !kx.is_finite() || !ky.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wave vector components must be finite with omega > 0, got ({kx}, {ky}, {omega})"
            )));
        }
        let k_perp = kx.hypot(ky);
        let k_max = omega / crate::C_LIGHT;
        if k_perp > k_max {
            return Err(Error::EvanescentWave { k_perp, k_max });
        }
        Ok(WaveVector { kx, ky, omega })
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// |k| = ω/c.
    pub fn k(&self) -> f64 {
        self.omega / crate::C_LIGHT
    }

    pub fn k_perp(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    /// Longitudinal component `kz/k = sqrt(1 - (k_perp c/ω)²)`.
    pub fn kappa_z(&self) -> f64 {
        let s = self.k_perp() / self.k();
        (1.0 - s * s).max(0.0).sqrt()
    }

    /// Second-order expansion of [`Self::kappa_z`]: `1 - (k_perp c/ω)²/2`.
    pub fn kappa_z_paraxial(&self) -> f64 {
        let s = self.k_perp() / self.k();
        1.0 - 0.5 * s * s
    }

    /// Polar angle between `k` and the beam axis, in `[0, π/2]`.
    pub fn theta(&self) -> f64 {
        (self.k_perp() / self.k()).clamp(0.0, 1.0).asin()
    }

    /// Full wave vector as a 3-vector.
    pub fn to_vector(&self) -> Vector3<f64> {
        let kz = self.kappa_z() * self.k();
        Vector3::new(self.kx, self.ky, kz)
    }
}

/// Local polarization basis attached to one wave vector.
///
/// Stored as three plain 3-vectors rather than a rotation matrix so the
/// first-order (non-orthonormal) paraxial basis is representable too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub e3: Vector3<f64>,
}

impl LocalFrame {
    pub fn identity() -> Self {
        LocalFrame {
            e1: Vector3::x(),
            e2: Vector3::y(),
            e3: Vector3::z(),
        }
    }

    /// Worst deviation from a right-handed orthonormal triple: the largest
    /// of |ei·ej - δij| and the components of `e1 × e2 - e3`.
    pub fn orthonormality_error(&self) -> f64 {
        let vs = [self.e1, self.e2, self.e3];
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((vs[i].dot(&vs[j]) - target).abs());
            }
        }
        let handed = self.e1.cross(&self.e2) - self.e3;
        err.max(handed.amax())
    }

    /// Largest absolute component difference against another frame.
    pub fn max_component_deviation(&self, other: &LocalFrame) -> f64 {
        (self.e1 - other.e1)
            .amax()
            .max((self.e2 - other.e2).amax())
            .max((self.e3 - other.e3).amax())
    }
}

/// Cross-product matrix `E` with `E v = axis × v`.
fn cross_matrix(axis: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -axis.z, axis.y, //
        axis.z, 0.0, -axis.x, //
        -axis.y, axis.x, 0.0,
    )
}

/// Rotation by `theta` around a unit `axis` via the Rodrigues formula
/// `R = I + E sinθ + E²(1 - cosθ)`.
///
/// Fails if `axis` is not unit length to 1e-12.
pub fn rodrigues_rotation(theta: f64, axis: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let norm = axis.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "rotation axis must be a unit vector, |axis| = {norm}"
        )));
    }
    let e = cross_matrix(axis);
    Ok(Matrix3::identity() + e * theta.sin() + e * e * (1.0 - theta.cos()))
}

/// Exact local frame `{R x, R y, k/|k|}` of a wave vector.
///
/// For `k_perp = 0` the rotation axis is undefined and the continuous limit
/// is the identity frame.
pub fn local_frame_exact(k: &WaveVector) -> LocalFrame {
    let k_perp = k.k_perp();
    if k_perp == 0.0 {
        return LocalFrame::identity();
    }
    // n = z × k / |z × k| = (-ky, kx, 0)/k_perp
    let axis = Vector3::new(-k.ky() / k_perp, k.kx() / k_perp, 0.0);
    let rot = rodrigues_rotation(k.theta(), &axis).expect("axis is unit by construction");
    LocalFrame {
        e1: rot * Vector3::x(),
        e2: rot * Vector3::y(),
        e3: k.to_vector() / k.k(),
    }
}

/// First-order frame `e1 = x - z kx/k`, `e2 = y - z ky/k`, `e3 = k/|k|`.
///
/// The transverse vectors are intentionally not renormalized; their norm
/// deviates from one at O(θ²).
pub fn local_frame_paraxial(k: &WaveVector) -> LocalFrame {
    let kk = k.k();
    LocalFrame {
        e1: Vector3::new(1.0, 0.0, -k.kx() / kk),
        e2: Vector3::new(0.0, 1.0, -k.ky() / kk),
        e3: k.to_vector() / kk,
    }
}
