//! Coherent and single-photon states over the mode space, and expectation
//! values of quadratic operators.
//!
//! Both state kinds reduce to the same bilinear form: for a multi-mode
//! coherent state with amplitude vector `α` and any number-conserving
//! quadratic observable `Û = Σ a† U a`,
//!
//! ```text
//! <Û> = (α, U α)        (in units of hbar*omega0/(c² T)),
//! ```
//!
//! and a single photon distributed over the modes with unit-norm amplitude
//! vector `c` gives `(c, U c)`. The single-photon case follows from the
//! ladder commutation rules alone and is provided as a convenience; it is
//! not a separate physical input.

use crate::beam::BeamParams;
use crate::error::Error;
use crate::modes::{ModeIndex, ModeSpace};
use crate::operators::{POperators, QuadraticOperator};
use crate::Result;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Transverse polarization `u = ξ x + η y` with `|ξ|² + |η|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    xi: Complex64,
    eta: Complex64,
}

impl Polarization {
    pub fn new(xi: Complex64, eta: Complex64) -> Result<Self> {
        let norm = xi.norm_sqr() + eta.norm_sqr();
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Polarization { xi, eta })
    }

    pub fn linear_x() -> Self {
        Polarization {
            xi: Complex64::new(1.0, 0.0),
            eta: Complex64::default(),
        }
    }

    pub fn linear_y() -> Self {
        Polarization {
            xi: Complex64::default(),
            eta: Complex64::new(1.0, 0.0),
        }
    }

    /// Circular polarization `(x ± i y)/√2` with helicity `±1`.
    pub fn circular(sign: i8) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Polarization {
            xi: Complex64::new(s, 0.0),
            eta: Complex64::new(0.0, s * sign.signum() as f64),
        }
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    /// Helicity `σ = i(ξ η* - ξ* η)`: ±1 for circular, 0 for linear.
    #[doc(alias = "elicity")]
    pub fn helicity(&self) -> f64 {
        (Complex64::i() * (self.xi * self.eta.conj() - self.xi.conj() * self.eta)).re
    }

    /// Alias for [`Self::helicity`], matching the alternate spelling.
    pub fn elicity(&self) -> f64 {
        self.helicity()
    }
}

/// Physical interpretation of an amplitude vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Multi-mode coherent state; `|α_A|²` is the mean photon number in
    /// mode `A` (no normalization constraint).
    Coherent,
    /// One photon distributed over the modes; the amplitude vector is
    /// normalized to one.
    SinglePhoton,
}

/// An excitation of the beam: an amplitude per mode of a [`ModeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    space: ModeSpace,
    kind: StateKind,
    amplitudes: DVector<Complex64>,
}

impl BeamState {
    /// Coherent state from a full amplitude vector over the space.
    pub fn coherent(space: ModeSpace, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "coherent amplitudes must be finite".into(),
            ));
        }
        Ok(BeamState {
            space,
            kind: StateKind::Coherent,
            amplitudes,
        })
    }

    /// Coherent state with the given mode amplitudes, zero elsewhere.
    pub fn coherent_from_modes(space: ModeSpace, modes: &[(ModeIndex, Complex64)]) -> Result<Self> {
        let mut amplitudes = DVector::from_element(space.dim(), Complex64::default());
        for &(mode, amp) in modes {
            amplitudes[space.index_of(mode)?] = amp;
        }
        Self::coherent(space, amplitudes)
    }

    /// Single photon with normalized mode amplitudes (`‖c‖ = 1` to 1e-12).
    pub fn single_photon(space: ModeSpace, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(BeamState {
            space,
            kind: StateKind::SinglePhoton,
            amplitudes,
        })
    }

    /// The vacuum (all amplitudes zero), as a coherent state.
    pub fn vacuum(space: ModeSpace) -> Self {
        BeamState {
            space,
            kind: StateKind::Coherent,
            amplitudes: DVector::from_element(space.dim(), Complex64::default()),
        }
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, mode: ModeIndex) -> Result<Complex64> {
        Ok(self.amplitudes[self.space.index_of(mode)?])
    }

    /// Expectation value `(v, U v)` of a quadratic operator, in units of
    /// `hbar*omega0/(c² T)`. Real up to roundoff for Hermitian operators.
    pub fn expectation(&self, op: &QuadraticOperator) -> Result<Complex64> {
        if op.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: op.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)))
    }
}

/// Coherent state for a uniformly polarized field
/// `u (a00 ψ00 + a10 ψ10 + a01 ψ01)`: six populated mode amplitudes
/// `α_{1,nm} = ξ a_nm`, `α_{2,nm} = η a_nm`.
///
/// The spatial triple must be normalized, `Σ |a_nm|² = 1` to 1e-12.
pub fn six_mode_state(
    space: ModeSpace,
    pol: &Polarization,
    a00: Complex64,
    a10: Complex64,
    a01: Complex64,
) -> Result<BeamState> {
    let norm = a00.norm_sqr() + a10.norm_sqr() + a01.norm_sqr();
    let deviation = (norm - 1.0).abs();
    if deviation > 1e-12 {
        return Err(Error::NotNormalized { deviation });
    }
    let mut modes = Vec::with_capacity(6);
    for (nm, amp) in [((0, 0), a00), ((1, 0), a10), ((0, 1), a01)] {
        modes.push((
            ModeIndex {
                mu: 1,
                n: nm.0,
                m: nm.1,
            },
            pol.xi() * amp,
        ));
        modes.push((
            ModeIndex {
                mu: 2,
                n: nm.0,
                m: nm.1,
            },
            pol.eta() * amp,
        ));
    }
    BeamState::coherent_from_modes(space, &modes)
}

/// Beam tilt angles `θ_x = atan(<Px>/<Pz>)`, `θ_y = atan(<Py>/<Pz>)`.
pub fn tilt_angles(state: &BeamState, p: &POperators) -> Result<(f64, f64)> {
    let pz = state.expectation(&p.pz)?.re;
    if pz == 0.0 {
        return Err(Error::UndefinedTilt);
    }
    let px = state.expectation(&p.px)?.re;
    let py = state.expectation(&p.py)?.re;
    Ok(((px / pz).atan(), (py / pz).atan()))
}

/// Orbital angular momentum per photon along the axis, in units of `λ̄`
/// (equivalently, in units of `hbar` per photon): `<Lz> / (<Pz> λ̄)`.
pub fn per_photon_oam(
    state: &BeamState,
    lz: &QuadraticOperator,
    pz: &QuadraticOperator,
    params: &BeamParams,
) -> Result<f64> {
    let flux = state.expectation(pz)?.re;
    if flux <= 0.0 {
        return Err(Error::ZeroPhotonFlux(flux));
    }
    Ok(state.expectation(lz)?.re / (flux * params.lambda_bar()))
}

/* State files ****************************************************************/

/// One amplitude record in a state file. `mu` is present exactly when the
/// file does *not* carry a global polarization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<u8>,
    pub n: usize,
    pub m: usize,
    pub re: f64,
    pub im: f64,
}

/// JSON state-file schema.
///
/// Two layouts are accepted:
/// * with `"polarization": [Re ξ, Im ξ, Re η, Im η]`, the amplitude entries
///   are spatial-only and are expanded as `α_{1,nm} = ξ a_nm`,
///   `α_{2,nm} = η a_nm`;
/// * without it, every entry carries its own `mu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<[f64; 4]>,
    pub amplitudes: Vec<AmplitudeEntry>,
}

fn default_schema_version() -> u32 {
    1
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    /// Snapshot of an in-memory state (explicit `mu` layout).
    pub fn from_state(state: &BeamState) -> Self {
        let amplitudes = state
            .space()
            .modes()
            .enumerate()
            .filter_map(|(i, mode)| {
                let a = state.amplitudes()[i];
                (a != Complex64::default()).then_some(AmplitudeEntry {
                    mu: Some(mode.mu),
                    n: mode.n,
                    m: mode.m,
                    re: a.re,
                    im: a.im,
                })
            })
            .collect();
        StateFile {
            schema_version: default_schema_version(),
            kind: state.kind(),
            polarization: None,
            amplitudes,
        }
    }

    /// Materialize over a mode space. Mode labels outside the truncation
    /// are an error, as is mixing the two amplitude layouts.
    pub fn build(&self, space: ModeSpace) -> Result<(BeamState, Option<Polarization>)> {
        let mut amplitudes = DVector::from_element(space.dim(), Complex64::default());
        let pol = match self.polarization {
            Some([xr, xi, er, ei]) => Some(Polarization::new(
                Complex64::new(xr, xi),
                Complex64::new(er, ei),
            )?),
            None => None,
        };
        for (idx, entry) in self.amplitudes.iter().enumerate() {
            let value = Complex64::new(entry.re, entry.im);
            match (&pol, entry.mu) {
                (Some(p), None) => {
                    let i1 = space.index_of(ModeIndex {
                        mu: 1,
                        n: entry.n,
                        m: entry.m,
                    })?;
                    let i2 = space.index_of(ModeIndex {
                        mu: 2,
                        n: entry.n,
                        m: entry.m,
                    })?;
                    amplitudes[i1] += p.xi() * value;
                    amplitudes[i2] += p.eta() * value;
                }
                (None, Some(mu)) => {
                    let i = space.index_of(ModeIndex::new(mu, entry.n, entry.m)?)?;
                    amplitudes[i] += value;
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Parse(format!(
                        "amplitude entry {idx}: \"mu\" not allowed together with a global polarization"
                    )));
                }
                (None, None) => {
                    return Err(Error::Parse(format!(
                        "amplitude entry {idx}: \"mu\" required when no polarization is given"
                    )));
                }
            }
        }
        let state = match self.kind {
            StateKind::Coherent => BeamState::coherent(space, amplitudes)?,
            StateKind::SinglePhoton => BeamState::single_photon(space, amplitudes)?,
        };
        Ok((state, pol))
    }
}
