//! Hermite-Gauss mode functions and the truncated mode space.
//!
//! The transverse basis is the separable Hermite-Gauss family
//! `ψ_nm(x, y, z) = u_n(x, z) u_m(y, z)` of waist `w0`, normalized so that
//! `∫ |ψ_nm|² d²x = 1` at every plane. The 1D factor is
//!
//! ```text
//! u_n(x,z) = (2/π)^{1/4} (2^n n! w(z))^{-1/2} H_n(√2 x/w(z))
//!            · exp(-x²/w(z)² + i k x²/(2R(z)) - i(n + 1/2) ζ(z))
//! ```
//!
//! with `ζ = atan(z/zR)` and `1/R = z/(z² + zR²)`. The Gouy sign is tied to
//! the angular-spectrum propagator `exp(-i z k_perp² c / (2ω))`, which
//! [`propagate_kernel_check`] verifies numerically against an FFT transport
//! of the waist-plane profile.
//!
//! In k-space the modes reproduce themselves with the waist swapped to
//! `2/w0` and a phase `(-i)^(n+m)` ([`hg_fourier`]).

use crate::beam::BeamParams;
use crate::error::Error;
use crate::quad::{pairwise_sum, simpson_weights, uniform_nodes, GaussHermite};
use crate::Result;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Number of Gauss-Hermite nodes used for waist-plane overlaps.
pub const GH_NODES: usize = 64;

/// Points per axis for Simpson quadratures away from the waist.
pub const SIMPSON_POINTS: usize = 513;

/// Grid half-extent in units of the local beam radius `w(z)`.
pub const EXTENT_FACTOR: f64 = 8.0;

/* Mode labels ****************************************************************/

/// Cumulative mode label `(μ, n, m)`: polarization axis `μ ∈ {1, 2}` and
/// transverse excitation numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub mu: u8,
    pub n: usize,
    pub m: usize,
}

impl ModeIndex {
    pub fn new(mu: u8, n: usize, m: usize) -> Result<Self> {
        if mu != 1 && mu != 2 {
            return Err(Error::InvalidArgument(format!(
                "polarization index must be 1 or 2, got {mu}"
            )));
        }
        Ok(ModeIndex { mu, n, m })
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.mu, self.n, self.m)
    }
}

/// Square truncation of the mode sum: all `(μ, n, m)` with `n, m <= ncut`.
///
/// Enumeration is deterministic with `μ` major, then `n`, then `m`, so the
/// flat index is `((μ-1)(ncut+1) + n)(ncut+1) + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeSpace {
    ncut: usize,
}

impl ModeSpace {
    pub fn new(ncut: usize) -> Self {
        ModeSpace { ncut }
    }

    pub fn ncut(&self) -> usize {
        self.ncut
    }

    /// Total dimension `2 (ncut+1)²`.
    pub fn dim(&self) -> usize {
        2 * (self.ncut + 1) * (self.ncut + 1)
    }

    /// Flat index of a mode label.
    pub fn index_of(&self, mode: ModeIndex) -> Result<usize> {
        if mode.mu != 1 && mode.mu != 2 {
            return Err(Error::InvalidArgument(format!(
                "polarization index must be 1 or 2, got {}",
                mode.mu
            )));
        }
        if mode.n > self.ncut || mode.m > self.ncut {
            return Err(Error::InvalidArgument(format!(
                "mode {mode} outside truncation ncut = {}",
                self.ncut
            )));
        }
        let side = self.ncut + 1;
        Ok(((mode.mu as usize - 1) * side + mode.n) * side + mode.m)
    }

    /// Mode label at a flat index. Panics if out of range.
    pub fn mode_at(&self, index: usize) -> ModeIndex {
        assert!(index < self.dim(), "mode index {index} out of range");
        let side = self.ncut + 1;
        let m = index % side;
        let n = (index / side) % side;
        let mu = (index / (side * side)) as u8 + 1;
        ModeIndex { mu, n, m }
    }

    /// All labels in enumeration order.
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..self.dim()).map(move |i| self.mode_at(i))
    }

    /// True when a mode sits at least `margin` steps below the cutoff in
    /// both transverse indices. Ladder products are truncation-free there.
    pub fn is_interior(&self, mode: ModeIndex, margin: usize) -> bool {
        self.ncut >= margin && mode.n + margin <= self.ncut && mode.m + margin <= self.ncut
    }
}

/* Hermite evaluation *********************************************************/

/// Normalized Hermite values `ĥ_n(t) = H_n(t)/sqrt(2^n n!)` for `n <= nmax`.
///
/// The normalized recurrence keeps every entry O(1) and never forms the
/// factorial, so arbitrary orders are safe.
pub(crate) fn hermite_normalized(nmax: usize, t: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(nmax + 1);
    h.push(1.0);
    if nmax == 0 {
        return h;
    }
    h.push(std::f64::consts::SQRT_2 * t);
    for n in 1..nmax {
        let next = (2.0 / (n as f64 + 1.0)).sqrt() * t * h[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// `(2/π)^{1/4}`.
fn amp_norm() -> f64 {
    (2.0 / std::f64::consts::PI).powf(0.25)
}

/// Waist-plane 1D mode of waist `w`: real valued.
fn hg1d_waist(n: usize, x: f64, w: f64) -> f64 {
    let t = std::f64::consts::SQRT_2 * x / w;
    let h = hermite_normalized(n, t);
    amp_norm() / w.sqrt() * h[n] * (-x * x / (w * w)).exp()
}

/// 1D Hermite-Gauss mode `u_n(x, z)` [m^{-1/2}].
pub fn hg1d(n: usize, x: f64, z: f64, params: &BeamParams) -> Complex64 {
    let w = params.beam_radius(z);
    let zeta = params.gouy(z);
    let inv_r = params.inverse_curvature_radius(z);
    let t = std::f64::consts::SQRT_2 * x / w;
    let h = hermite_normalized(n, t);
    let envelope = amp_norm() / w.sqrt() * h[n] * (-x * x / (w * w)).exp();
    let phase = 0.5 * params.k() * x * x * inv_r - (n as f64 + 0.5) * zeta;
    envelope * Complex64::new(0.0, phase).exp()
}

/// Transverse derivative `∂x u_n(x, z)`, evaluated through the Hermite
/// recurrence rather than finite differences:
///
/// ```text
/// ∂x u_n = (i k x / R - 2x/w²) u_n + (2√n / w) e^{-iζ} u_{n-1}.
/// ```
pub fn hg1d_dx(n: usize, x: f64, z: f64, params: &BeamParams) -> Complex64 {
    let w = params.beam_radius(z);
    let zeta = params.gouy(z);
    let inv_r = params.inverse_curvature_radius(z);
    let log_deriv = Complex64::new(-2.0 * x / (w * w), params.k() * x * inv_r);
    let mut out = log_deriv * hg1d(n, x, z, params);
    if n > 0 {
        let lower = hg1d(n - 1, x, z, params);
        out += 2.0 * (n as f64).sqrt() / w * Complex64::new(0.0, -zeta).exp() * lower;
    }
    out
}

/// 2D Hermite-Gauss mode `ψ_nm(x, y, z) = u_n(x, z) u_m(y, z)` [m^{-1}].
pub fn hg2d(n: usize, m: usize, x: f64, y: f64, z: f64, params: &BeamParams) -> Complex64 {
    hg1d(n, x, z, params) * hg1d(m, y, z, params)
}

/// Closed-form Fourier transform of the waist-plane mode,
/// `ψ̃_nm(k) = (2π)^{-1} ∫ ψ_nm(x, 0) e^{-i k·x} d²x` [m].
///
/// Hermite-Gauss functions are eigenfunctions of the transform: the result
/// is the same mode shape with waist `2/w0` in k-space and a phase
/// `(-i)^{n+m}`.
pub fn hg_fourier(n: usize, m: usize, kx: f64, ky: f64, params: &BeamParams) -> Complex64 {
    let wk = 2.0 / params.w0();
    let magnitude = hg1d_waist(n, kx, wk) * hg1d_waist(m, ky, wk);
    let phase = Complex64::new(0.0, -1.0).powu((n + m) as u32);
    phase * magnitude
}

/* Overlaps *******************************************************************/

/// 1D overlap `∫ u_n1*(x, z) u_n2(x, z) dx`.
///
/// At the waist a Gauss-Hermite rule in the scaled coordinate is exact; off
/// the waist a Simpson grid with extent [`EXTENT_FACTOR`]`·w(z)` is used.
/// Wavefront-curvature phases cancel in the product, so the integrand stays
/// well behaved at every plane.
pub fn overlap1d(n1: usize, n2: usize, z: f64, params: &BeamParams) -> Complex64 {
    if z == 0.0 {
        let gh = GaussHermite::new(GH_NODES);
        let nmax = n1.max(n2);
        let terms: Vec<f64> = gh
            .nodes
            .iter()
            .zip(&gh.weights)
            .map(|(&t, &wt)| {
                let h = hermite_normalized(nmax, t);
                wt * h[n1] * h[n2]
            })
            .collect();
        Complex64::new(pairwise_sum(&terms) / std::f64::consts::PI.sqrt(), 0.0)
    } else {
        let half = EXTENT_FACTOR * params.beam_radius(z);
        let (xs, h) = uniform_nodes(SIMPSON_POINTS, half);
        let w = simpson_weights(SIMPSON_POINTS, h);
        let terms: Vec<Complex64> = xs
            .iter()
            .zip(&w)
            .map(|(&x, &wt)| wt * hg1d(n1, x, z, params).conj() * hg1d(n2, x, z, params))
            .collect();
        let re: Vec<f64> = terms.iter().map(|c| c.re).collect();
        let im: Vec<f64> = terms.iter().map(|c| c.im).collect();
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }
}

/// 2D overlap `∫ ψ_n1m1* ψ_n2m2 d²x`, factorized over the separable axes.
pub fn overlap(
    n1: usize,
    m1: usize,
    n2: usize,
    m2: usize,
    z: f64,
    params: &BeamParams,
) -> Complex64 {
    overlap1d(n1, n2, z, params) * overlap1d(m1, m2, z, params)
}

/* Ladder matrix elements *****************************************************/

/// Position and derivative matrix elements between waist-plane 1D modes:
///
/// ```text
/// X[n][n'] = ∫ u_n x u_n' dx  = (w0/2) (√n' δ_{n',n+1} + √n δ_{n,n'+1})
/// D[n][n'] = ∫ u_n ∂x u_n' dx = (1/w0) (√n' δ_{n',n+1} - √n δ_{n,n'+1})
/// ```
///
/// `X` scales with `w0` and `D` with `1/w0`. On the truncated space
/// `[X, D]` is `-1` on the diagonal except for the last entry, where the
/// cutoff bites.
pub fn ladder_matrix_elements(
    ncut: usize,
    w0: f64,
) -> (nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>) {
    let side = ncut + 1;
    let mut x = nalgebra::DMatrix::<f64>::zeros(side, side);
    let mut d = nalgebra::DMatrix::<f64>::zeros(side, side);
    for n in 0..ncut {
        let root = ((n + 1) as f64).sqrt();
        x[(n, n + 1)] = 0.5 * w0 * root;
        x[(n + 1, n)] = 0.5 * w0 * root;
        d[(n, n + 1)] = root / w0;
        d[(n + 1, n)] = -root / w0;
    }
    (x, d)
}

/* Propagation kernel check ***************************************************/

/// Angular-spectrum FFT transport of waist samples to plane `z`.
///
/// Returns `(xs, propagated)` where `propagated[l] ≈ u_n(xs[l], z)`.
fn fft_propagate_1d(
    n: usize,
    z: f64,
    params: &BeamParams,
    len: usize,
    half_extent: f64,
) -> (Vec<f64>, Vec<Complex64>) {
    let (xs, dx) = uniform_nodes(len, half_extent);
    let mut field: Vec<Complex64> = xs.iter().map(|&x| hg1d(n, x, 0.0, params)).collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut field);

    let c_over_2w = 0.5 * params.light_speed() / params.omega0();
    for (j, value) in field.iter_mut().enumerate() {
        let freq = if j < len / 2 {
            j as f64
        } else {
            j as f64 - len as f64
        };
        let k = std::f64::consts::TAU * freq / (len as f64 * dx);
        *value *= Complex64::new(0.0, -z * k * k * c_over_2w).exp();
    }

    planner.plan_fft_inverse(len).process(&mut field);
    for value in field.iter_mut() {
        *value /= len as f64;
    }
    (xs, field)
}

/// Propagation consistency residual for mode `(n, m)` at plane `z`.
///
/// The waist profile is transported with the angular-spectrum propagator
/// `exp(-i z k_perp² c/(2ω))` applied in FFT space and compared pointwise
/// with the closed form; the returned value is `max|Δψ| / max|ψ|` over a
/// 2D sample grid. This is the check that pins the Gouy-phase sign.
pub fn propagate_kernel_check(n: usize, m: usize, z: f64, params: &BeamParams) -> f64 {
    let len = 2048;
    let scale = ((n.max(m) + 1) as f64).sqrt();
    let half_extent = EXTENT_FACTOR * scale * params.w0().max(params.beam_radius(z));
    let (xs, ux) = fft_propagate_1d(n, z, params, len, half_extent);
    let (ys, uy) = fft_propagate_1d(m, z, params, len, half_extent);

    // 2D comparison on a strided subgrid
    let stride = 16;
    let mut max_err: f64 = 0.0;
    let mut max_amp: f64 = 0.0;
    for i in (0..len).step_by(stride) {
        let closed_x = hg1d(n, xs[i], z, params);
        for j in (0..len).step_by(stride) {
            let closed = closed_x * hg1d(m, ys[j], z, params);
            let transported = ux[i] * uy[j];
            max_err = max_err.max((closed - transported).norm());
            max_amp = max_amp.max(closed.norm());
        }
    }
    max_err / max_amp
}
