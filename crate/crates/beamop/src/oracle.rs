//! Brute-force field oracle: sample the classical analytic-signal fields of
//! a coherent state, form momentum and angular-momentum densities, and
//! integrate them over a transverse plane for comparison with the operator
//! expectations.
//!
//! The monochromatic analytic signals, with the common amplitude factor
//! `(hbar ω0 Δω / 2 ε0 c)^{1/2}` stripped, are
//!
//! ```text
//! E+ = i e^{-iω0(t - z/c)} Σ_A α_A ( x̂_μ ψ_nm + i ẑ (c/ω0) ∂_{x_μ} ψ_nm )
//! B+ = (i/c) e^{-iω0(t - z/c)} Σ_A α_A ( ẑ×x̂_μ ψ_nm + i (c/ω0) x̂_μ×∇⊥ ψ_nm )
//! ```
//!
//! The first-order gradient terms give the fields their longitudinal
//! components; without them the momentum density is purely longitudinal
//! and the beam carries no spin along the axis at all.
//!
//! Time averaging is analytic by default: the counter-rotating terms of the
//! normal-ordered density `ε0 E×B` average to zero exactly for a
//! monochromatic beam, leaving `<P> = Re[F_E* × F_B]` per unit
//! `hbar ω0/(c² T)`. A sampled average over one optical period is kept as a
//! self-check.

use crate::beam::BeamParams;
use crate::error::Error;
use crate::modes::{hg1d, hg1d_dx};
use crate::operators::{build_j, build_p};
use crate::quad::{pairwise_sum, simpson_weights, uniform_nodes};
use crate::states::{BeamState, StateKind};
use crate::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Minimum grid extent, in local beam radii, below which coverage is
/// considered insufficient.
pub const COVERAGE_RADII: f64 = 6.0;

/// Minimum points per axis for oracle-grade integration.
pub const ORACLE_GRADE_POINTS: usize = 128;

/// Transverse grid request: `n` points per axis spanning
/// `± extent_factor · w(z)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub extent_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 512,
            extent_factor: 8.0,
        }
    }
}

/// A sampled complex 3-vector field on a uniform transverse grid at fixed
/// `z`. Row-major over `(ix, iy)`.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the grid per axis [m].
    pub extent: f64,
    pub z: f64,
    pub values: Vec<[Complex64; 3]>,
}

impl FieldGrid {
    pub fn value(&self, ix: usize, iy: usize) -> [Complex64; 3] {
        self.values[ix * self.ny + iy]
    }
}

/// Whether the first-order `(c/ω0) ∇⊥` field terms are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientTerms {
    Included,
    Omitted,
}

/// One integrated moment against its operator value.
#[derive(Debug, Clone, Serialize)]
pub struct MomentComparison {
    pub quantity: &'static str,
    pub operator_value: f64,
    pub quadrature_value: f64,
    /// `|op - quad| / max(|op|, 1e-12)`.
    pub rel_error: f64,
}

/// Result of [`integrate_moments`].
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub comparisons: Vec<MomentComparison>,
    pub warnings: Vec<String>,
    /// Unit bookkeeping shared by both routes.
    pub units_note: &'static str,
    pub grid_points: usize,
    pub grid_extent: f64,
    pub z: f64,
}

impl MomentReport {
    pub fn max_rel_error(&self) -> f64 {
        self.comparisons
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.rel_error))
    }
}

/// Plain quadrature moments of one plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureMoments {
    pub p: [f64; 3],
    pub j: [f64; 3],
    /// `∫ p_z dx dy`, the beam intensity in flux units.
    pub intensity: f64,
    /// Intensity-weighted transverse centroid `(⟨x⟩, ⟨y⟩)` [m].
    pub centroid: (f64, f64),
}

const UNITS_NOTE: &str =
    "all momenta in units of hbar*omega0/(c^2*T); fields stripped of (hbar*omega0*d_omega/(2*eps0*c))^(1/2)";

/* Single-point fields ********************************************************/

fn coherent_amplitudes(state: &BeamState) -> Result<Vec<(usize, usize, Complex64, Complex64)>> {
    if state.kind() != StateKind::Coherent {
        return Err(Error::NotCoherent);
    }
    let space = state.space();
    let mut list = Vec::new();
    for n in 0..=space.ncut() {
        for m in 0..=space.ncut() {
            let a1 = state
                .amplitude(crate::modes::ModeIndex { mu: 1, n, m })
                .expect("in range");
            let a2 = state
                .amplitude(crate::modes::ModeIndex { mu: 2, n, m })
                .expect("in range");
            if a1 != Complex64::default() || a2 != Complex64::default() {
                list.push((n, m, a1, a2));
            }
        }
    }
    Ok(list)
}

/// Envelope sums `F_E`, `F_B` (no carrier phase, no `1/c`).
fn field_envelopes(
    amps: &[(usize, usize, Complex64, Complex64)],
    x: f64,
    y: f64,
    z: f64,
    params: &BeamParams,
    gradient: GradientTerms,
) -> ([Complex64; 3], [Complex64; 3]) {
    let grad_scale = params.light_speed() / params.omega0();
    let mut e = [Complex64::default(); 3];
    let mut b = [Complex64::default(); 3];
    for &(n, m, a1, a2) in amps {
        let un = hg1d(n, x, z, params);
        let vm = hg1d(m, y, z, params);
        let psi = un * vm;
        e[0] += a1 * psi;
        e[1] += a2 * psi;
        b[0] -= a2 * psi;
        b[1] += a1 * psi;
        if gradient == GradientTerms::Included {
            let dpsi_dx = hg1d_dx(n, x, z, params) * vm;
            let dpsi_dy = un * hg1d_dx(m, y, z, params);
            let iscale = Complex64::new(0.0, grad_scale);
            e[2] += iscale * (a1 * dpsi_dx + a2 * dpsi_dy);
            b[2] += iscale * (a1 * dpsi_dy - a2 * dpsi_dx);
        }
    }
    (e, b)
}

fn carrier(params: &BeamParams, z: f64, t: f64) -> Complex64 {
    let phase = -params.omega0() * (t - z / params.light_speed());
    Complex64::i() * Complex64::new(0.0, phase).exp()
}

/// Analytic-signal electric field of a coherent state at one point, with
/// the common amplitude prefactor stripped (units 1/m).
///
/// Single-photon states have no classical eigenvalue field and are
/// rejected.
pub fn classical_e_plus(
    state: &BeamState,
    r: [f64; 3],
    t: f64,
    params: &BeamParams,
) -> Result<[Complex64; 3]> {
    let amps = coherent_amplitudes(state)?;
    let (e, _) = field_envelopes(&amps, r[0], r[1], r[2], params, GradientTerms::Included);
    let phase = carrier(params, r[2], t);
    Ok([e[0] * phase, e[1] * phase, e[2] * phase])
}

/// Analytic-signal magnetic field, carrying the extra `1/c` relative to the
/// electric one (units s/m²·... i.e. `E/c` scaling).
pub fn classical_b_plus(
    state: &BeamState,
    r: [f64; 3],
    t: f64,
    params: &BeamParams,
) -> Result<[Complex64; 3]> {
    let amps = coherent_amplitudes(state)?;
    let (_, b) = field_envelopes(&amps, r[0], r[1], r[2], params, GradientTerms::Included);
    let phase = carrier(params, r[2], t) / params.light_speed();
    Ok([b[0] * phase, b[1] * phase, b[2] * phase])
}

fn density_from_envelopes(e: &[Complex64; 3], b: &[Complex64; 3]) -> [f64; 3] {
    [
        (e[1].conj() * b[2] - e[2].conj() * b[1]).re,
        (e[2].conj() * b[0] - e[0].conj() * b[2]).re,
        (e[0].conj() * b[1] - e[1].conj() * b[0]).re,
    ]
}

/// Time-averaged momentum density `<ε0 E×B>` at one point, in units of
/// `hbar ω0/(c² T)` per m². Exact for a monochromatic beam: the averaging
/// is done analytically.
pub fn time_averaged_momentum_density(
    state: &BeamState,
    x: f64,
    y: f64,
    z: f64,
    params: &BeamParams,
) -> Result<[f64; 3]> {
    let amps = coherent_amplitudes(state)?;
    let (e, b) = field_envelopes(&amps, x, y, z, params, GradientTerms::Included);
    Ok(density_from_envelopes(&e, &b))
}

/// Numeric cross-check of [`time_averaged_momentum_density`]: average the
/// instantaneous real-field product over `samples >= 3` points of one
/// optical period. Agrees with the analytic route to roundoff.
pub fn time_averaged_momentum_density_sampled(
    state: &BeamState,
    x: f64,
    y: f64,
    z: f64,
    params: &BeamParams,
    samples: usize,
) -> Result<[f64; 3]> {
    if samples < 3 {
        return Err(Error::InvalidArgument(
            "period sampling needs at least 3 samples".into(),
        ));
    }
    let period = std::f64::consts::TAU / params.omega0();
    let mut acc = [0.0; 3];
    for s in 0..samples {
        let t = period * s as f64 / samples as f64;
        let ep = classical_e_plus(state, [x, y, z], t, params)?;
        let bp = classical_b_plus(state, [x, y, z], t, params)?;
        // real fields, with the 1/c of B undone to match the envelope units
        let er: Vec<f64> = ep.iter().map(|c| 2.0 * c.re).collect();
        let br: Vec<f64> = bp
            .iter()
            .map(|c| 2.0 * c.re * params.light_speed())
            .collect();
        acc[0] += er[1] * br[2] - er[2] * br[1];
        acc[1] += er[2] * br[0] - er[0] * br[2];
        acc[2] += er[0] * br[1] - er[1] * br[0];
    }
    // <Re(a)Re(b)> carries 1/2 relative to the analytic envelope product
    Ok([
        acc[0] / (2.0 * samples as f64),
        acc[1] / (2.0 * samples as f64),
        acc[2] / (2.0 * samples as f64),
    ])
}

/* Grid machinery *************************************************************/

fn coverage_warnings(spec: &GridSpec, extent: f64, w_z: f64) -> Vec<String> {
    let mut warnings = Vec::new();
    if extent < COVERAGE_RADII * w_z {
        warnings.push(format!(
            "grid extent {extent:.3e} m is below {COVERAGE_RADII} beam radii ({:.3e} m)",
            COVERAGE_RADII * w_z
        ));
    }
    if spec.n < ORACLE_GRADE_POINTS {
        warnings.push(format!(
            "{} points per axis is below the oracle-grade minimum of {ORACLE_GRADE_POINTS}",
            spec.n
        ));
    }
    warnings
}

struct AxisTable {
    values: Vec<Vec<Complex64>>,
    derivs: Vec<Vec<Complex64>>,
}

fn axis_table(ncut: usize, xs: &[f64], z: f64, params: &BeamParams) -> AxisTable {
    AxisTable {
        values: (0..=ncut)
            .map(|n| xs.iter().map(|&x| hg1d(n, x, z, params)).collect())
            .collect(),
        derivs: (0..=ncut)
            .map(|n| xs.iter().map(|&x| hg1d_dx(n, x, z, params)).collect())
            .collect(),
    }
}

/// Sample a classical field on a grid at time `t`.
pub fn sample_field_grid(
    state: &BeamState,
    params: &BeamParams,
    spec: &GridSpec,
    z: f64,
    t: f64,
    magnetic: bool,
) -> Result<FieldGrid> {
    let amps = coherent_amplitudes(state)?;
    let extent = spec.extent_factor * params.beam_radius(z);
    let (xs, _) = uniform_nodes(spec.n, extent);
    let phase = if magnetic {
        carrier(params, z, t) / params.light_speed()
    } else {
        carrier(params, z, t)
    };
    let mut values = Vec::with_capacity(spec.n * spec.n);
    for &x in &xs {
        for &y in &xs {
            let (e, b) = field_envelopes(&amps, x, y, z, params, GradientTerms::Included);
            let f = if magnetic { b } else { e };
            values.push([f[0] * phase, f[1] * phase, f[2] * phase]);
        }
    }
    Ok(FieldGrid {
        nx: spec.n,
        ny: spec.n,
        extent,
        z,
        values,
    })
}

/// Integrate the time-averaged momentum and angular-momentum densities over
/// the plane at `z` with `r = (x, y, z)` in the moment arm.
///
/// Rows are processed in parallel; the final reduction is a fixed pairwise
/// tree, so results are bit-reproducible for a given grid.
pub fn quadrature_moments(
    state: &BeamState,
    params: &BeamParams,
    spec: &GridSpec,
    z: f64,
    gradient: GradientTerms,
) -> Result<(QuadratureMoments, Vec<String>)> {
    if spec.n < 4 {
        return Err(Error::GridCoverage(format!(
            "{} points per axis cannot support a composite quadrature",
            spec.n
        )));
    }
    let amps = coherent_amplitudes(state)?;
    let w_z = params.beam_radius(z);
    let extent = spec.extent_factor * w_z;
    let warnings = coverage_warnings(spec, extent, w_z);

    let (xs, h) = uniform_nodes(spec.n, extent);
    let weights = simpson_weights(spec.n, h);
    let table = axis_table(state.space().ncut(), &xs, z, params);
    let grad_scale = params.light_speed() / params.omega0();
    let iscale = Complex64::new(0.0, grad_scale);
    let include_grad = gradient == GradientTerms::Included;

    // per-row partial sums of (p, j, x*pz, y*pz)
    let rows: Vec<[f64; 8]> = (0..spec.n)
        .into_par_iter()
        .map(|i| {
            let x = xs[i];
            let wx = weights[i];
            let mut acc = [0.0_f64; 8];
            for j in 0..spec.n {
                let y = xs[j];
                let w = wx * weights[j];
                let mut e = [Complex64::default(); 3];
                let mut b = [Complex64::default(); 3];
                for &(n, m, a1, a2) in &amps {
                    let un = table.values[n][i];
                    let vm = table.values[m][j];
                    let psi = un * vm;
                    e[0] += a1 * psi;
                    e[1] += a2 * psi;
                    b[0] -= a2 * psi;
                    b[1] += a1 * psi;
                    if include_grad {
                        let dx = table.derivs[n][i] * vm;
                        let dy = un * table.derivs[m][j];
                        e[2] += iscale * (a1 * dx + a2 * dy);
                        b[2] += iscale * (a1 * dy - a2 * dx);
                    }
                }
                let p = density_from_envelopes(&e, &b);
                acc[0] += w * p[0];
                acc[1] += w * p[1];
                acc[2] += w * p[2];
                acc[3] += w * (y * p[2] - z * p[1]);
                acc[4] += w * (z * p[0] - x * p[2]);
                acc[5] += w * (x * p[1] - y * p[0]);
                acc[6] += w * x * p[2];
                acc[7] += w * y * p[2];
            }
            acc
        })
        .collect();

    let component = |k: usize| -> f64 {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        pairwise_sum(&col)
    };
    let p = [component(0), component(1), component(2)];
    let j = [component(3), component(4), component(5)];
    let intensity = p[2];
    let centroid = if intensity != 0.0 {
        (component(6) / intensity, component(7) / intensity)
    } else {
        (0.0, 0.0)
    };
    Ok((
        QuadratureMoments {
            p,
            j,
            intensity,
            centroid,
        },
        warnings,
    ))
}

/// Compare the six integrated moments with the operator expectations.
pub fn integrate_moments(
    state: &BeamState,
    params: &BeamParams,
    spec: &GridSpec,
    z: f64,
) -> Result<MomentReport> {
    let (quad, warnings) = quadrature_moments(state, params, spec, z, GradientTerms::Included)?;

    let space = *state.space();
    let p_ops = build_p(&space, params);
    let j_ops = build_j(&space, params);
    let op_values = [
        state.expectation(&p_ops.px)?.re,
        state.expectation(&p_ops.py)?.re,
        state.expectation(&p_ops.pz)?.re,
        state.expectation(&j_ops.jx)?.re,
        state.expectation(&j_ops.jy)?.re,
        state.expectation(&j_ops.jz)?.re,
    ];
    let quad_values = [
        quad.p[0], quad.p[1], quad.p[2], quad.j[0], quad.j[1], quad.j[2],
    ];
    let names = ["Px", "Py", "Pz", "Jx", "Jy", "Jz"];
    let comparisons = names
        .iter()
        .zip(op_values.iter().zip(quad_values.iter()))
        .map(|(&quantity, (&op, &qd))| MomentComparison {
            quantity,
            operator_value: op,
            quadrature_value: qd,
            rel_error: (op - qd).abs() / op.abs().max(1e-12),
        })
        .collect();
    Ok(MomentReport {
        comparisons,
        warnings,
        units_note: UNITS_NOTE,
        grid_points: spec.n,
        grid_extent: spec.extent_factor * params.beam_radius(z),
        z,
    })
}

/// Intensity-weighted transverse centroid of the beam at plane `z`.
pub fn intensity_centroid(
    state: &BeamState,
    params: &BeamParams,
    spec: &GridSpec,
    z: f64,
) -> Result<(f64, f64)> {
    let (quad, _) = quadrature_moments(state, params, spec, z, GradientTerms::Included)?;
    Ok(quad.centroid)
}

/// Density map as CSV `x,y,px,py,pz,jx,jy,jz` for plotting.
pub fn density_map_csv(
    state: &BeamState,
    params: &BeamParams,
    spec: &GridSpec,
    z: f64,
) -> Result<String> {
    let amps = coherent_amplitudes(state)?;
    let extent = spec.extent_factor * params.beam_radius(z);
    let (xs, _) = uniform_nodes(spec.n, extent);
    let mut out = String::from("x,y,px,py,pz,jx,jy,jz\n");
    for &x in &xs {
        for &y in &xs {
            let (e, b) = field_envelopes(&amps, x, y, z, params, GradientTerms::Included);
            let p = density_from_envelopes(&e, &b);
            let jx = y * p[2] - z * p[1];
            let jy = z * p[0] - x * p[2];
            let jz = x * p[1] - y * p[0];
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                x, y, p[0], p[1], p[2], jx, jy, jz
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::ModeSpace;
    use crate::states::{six_mode_state, BeamState, Polarization};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DVector;

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn setup() -> (ModeSpace, BeamParams) {
        (
            ModeSpace::new(2),
            BeamParams::from_wavelength(1.064e-6, 1.0e-3).unwrap(),
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian_x(space: ModeSpace) -> BeamState {
        six_mode_state(
            space,
            &Polarization::linear_x(),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_fields_vanish() {
        let (space, params) = setup();
        let vac = BeamState::vacuum(space);
        let e = classical_e_plus(&vac, [1e-4, -2e-4, 0.3], 1e-15, &params).unwrap();
        assert!(e.iter().all(|c| c.norm() == 0.0));
        let d = time_averaged_momentum_density(&vac, 0.0, 0.0, 0.0, &params).unwrap();
        assert_eq!(d, [0.0; 3]);
    }

    #[test]
    fn single_photon_has_no_classical_field() {
        let (space, params) = setup();
        let mut amps = DVector::from_element(space.dim(), Complex64::default());
        amps[0] = c(1.0, 0.0);
        let photon = BeamState::single_photon(space, amps).unwrap();
        assert!(matches!(
            classical_e_plus(&photon, [0.0; 3], 0.0, &params),
            Err(Error::NotCoherent)
        ));
    }

    #[test]
    fn gaussian_longitudinal_field_ratio() {
        // Ez/Ex = i (c/ω0) ∂x ψ00 / ψ00 = -i (c/ω0) 2x/w0²
        let (space, params) = setup();
        let state = gaussian_x(space);
        let w0 = params.w0();
        let on_axis = classical_e_plus(&state, [0.0, 0.0, 0.0], 0.0, &params).unwrap();
        assert_eq!(on_axis[2], Complex64::default());
        assert!(on_axis[1].norm() == 0.0);
        let off = classical_e_plus(&state, [0.5 * w0, 0.0, 0.0], 0.0, &params).unwrap();
        let ratio = off[2] / off[0];
        let expected = -params.light_speed() / params.omega0() / w0;
        assert_abs_diff_eq!(ratio.re, 0.0, epsilon = 1e-18);
        assert_relative_eq!(ratio.im, expected, max_relative = 1e-13);
    }

    #[test]
    fn gaussian_magnetic_field_structure() {
        // x-polarized Gaussian: B is along y with Bz/By = -i(c/ω0)/w0 at y = w0/2
        let (space, params) = setup();
        let state = gaussian_x(space);
        let w0 = params.w0();
        let b = classical_b_plus(&state, [0.0, 0.25 * w0, 0.0], 0.0, &params).unwrap();
        assert_eq!(b[0], Complex64::default());
        assert!(b[1].norm() > 0.0);
        let b2 = classical_b_plus(&state, [0.0, 0.5 * w0, 0.0], 0.0, &params).unwrap();
        let ratio = b2[2] / b2[1];
        assert_relative_eq!(
            ratio.im,
            -params.light_speed() / params.omega0() / w0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn on_axis_density_is_longitudinal() {
        let (space, params) = setup();
        let state = gaussian_x(space);
        let d = time_averaged_momentum_density(&state, 0.0, 0.0, 0.0, &params).unwrap();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 0.0);
        assert!(d[2] > 0.0);
    }

    #[test]
    fn sampled_time_average_matches_analytic() {
        let (space, params) = setup();
        let state = six_mode_state(
            space,
            &Polarization::circular(1),
            c(0.5, 0.1),
            c(0.2, 0.6),
            c((1.0_f64 - 0.26 - 0.4).sqrt(), 0.0),
        )
        .unwrap();
        let (x, y, z) = (0.3e-3, -0.2e-3, 0.1);
        let analytic = time_averaged_momentum_density(&state, x, y, z, &params).unwrap();
        let sampled = time_averaged_momentum_density_sampled(&state, x, y, z, &params, 32).unwrap();
        let scale = analytic.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for k in 0..3 {
            assert!(
                (analytic[k] - sampled[k]).abs() <= 1e-10 * scale,
                "component {k}: {} vs {}",
                analytic[k],
                sampled[k]
            );
        }
    }

    #[test]
    fn gaussian_moments_are_pure_flux() {
        let (space, params) = setup();
        let state = gaussian_x(space);
        let report = integrate_moments(&state, &params, &GridSpec::default(), 0.0).unwrap();
        assert!(report.warnings.is_empty());
        let by_name = |n: &str| report.comparisons.iter().find(|c| c.quantity == n).unwrap();
        assert_relative_eq!(by_name("Pz").quadrature_value, 1.0, epsilon = 1e-4);
        for name in ["Px", "Py", "Jx", "Jy", "Jz"] {
            assert!(
                by_name(name).quadrature_value.abs() < 1e-6,
                "{name}: {}",
                by_name(name).quadrature_value
            );
        }
    }

    #[test]
    fn tilted_state_oracle_matches_operator() {
        let (space, params) = setup();
        let state = six_mode_state(
            space,
            &Polarization::linear_x(),
            c(INV_SQRT2, 0.0),
            c(0.0, INV_SQRT2),
            c(0.0, 0.0),
        )
        .unwrap();
        let report = integrate_moments(&state, &params, &GridSpec::default(), 0.0).unwrap();
        let px = report
            .comparisons
            .iter()
            .find(|c| c.quantity == "Px")
            .unwrap();
        assert_relative_eq!(
            px.operator_value,
            0.5 * params.theta0(),
            max_relative = 1e-13
        );
        assert!(px.rel_error < 1e-3, "rel_error {}", px.rel_error);
        // off-axis x-density is genuinely nonzero for this superposition
        let d =
            time_averaged_momentum_density(&state, 0.2 * params.w0(), 0.0, 0.0, &params).unwrap();
        assert!(d[0].abs() > 0.0);
    }

    #[test]
    fn circular_lg_oracle_recovers_two_units() {
        let (space, params) = setup();
        let state = six_mode_state(
            space,
            &Polarization::circular(1),
            c(0.0, 0.0),
            c(INV_SQRT2, 0.0),
            c(0.0, INV_SQRT2),
        )
        .unwrap();
        let report = integrate_moments(&state, &params, &GridSpec::default(), 0.0).unwrap();
        let jz = report
            .comparisons
            .iter()
            .find(|c| c.quantity == "Jz")
            .unwrap();
        assert_relative_eq!(
            jz.quadrature_value,
            2.0 * params.lambda_bar(),
            max_relative = 1e-3
        );
    }

    #[test]
    fn coarse_grid_raises_coverage_warnings() {
        let (space, params) = setup();
        let state = gaussian_x(space);
        let spec = GridSpec {
            n: 64,
            extent_factor: 4.0,
        };
        let report = integrate_moments(&state, &params, &spec, 0.0).unwrap();
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn omitting_gradient_kills_longitudinal_spin() {
        let (space, params) = setup();
        let state = six_mode_state(
            space,
            &Polarization::circular(1),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        )
        .unwrap();
        let spec = GridSpec::default();
        let (full, _) =
            quadrature_moments(&state, &params, &spec, 0.0, GradientTerms::Included).unwrap();
        let (bare, _) =
            quadrature_moments(&state, &params, &spec, 0.0, GradientTerms::Omitted).unwrap();
        assert_relative_eq!(full.j[2], params.lambda_bar(), max_relative = 1e-3);
        assert!(bare.j[2].abs() < 0.05 * full.j[2].abs());
    }

    #[test]
    fn field_grid_sampling() {
        let (space, params) = setup();
        let state = gaussian_x(space);
        let spec = GridSpec {
            n: 9,
            extent_factor: 8.0,
        };
        let grid = sample_field_grid(&state, &params, &spec, 0.0, 0.0, false).unwrap();
        assert_eq!(grid.values.len(), 81);
        // center node is the peak
        let center = grid.value(4, 4);
        let direct = classical_e_plus(&state, [0.0, 0.0, 0.0], 0.0, &params).unwrap();
        assert_eq!(center, direct);
    }
}
