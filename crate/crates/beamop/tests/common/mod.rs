//! Shared helpers for the integration suites.

use beamop::states::{six_mode_state, BeamState, Polarization};
use beamop::ModeSpace;
use num_complex::Complex64;
use rand::Rng;

/// Random point on the unit sphere of C³ plus a random polarization.
pub fn random_six_mode(
    rng: &mut impl Rng,
    space: ModeSpace,
) -> (BeamState, Polarization, [Complex64; 3]) {
    let mut triple = [Complex64::default(); 3];
    loop {
        for a in triple.iter_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let norm = triple.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for a in triple.iter_mut() {
                *a /= norm;
            }
            break;
        }
    }
    let pol = random_polarization(rng);
    let state = six_mode_state(space, &pol, triple[0], triple[1], triple[2])
        .expect("normalized by construction");
    (state, pol, triple)
}

pub fn random_polarization(rng: &mut impl Rng) -> Polarization {
    loop {
        let xi = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let eta = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let norm = (xi.norm_sqr() + eta.norm_sqr()).sqrt();
        if norm > 1e-3 {
            return Polarization::new(xi / norm, eta / norm).expect("normalized");
        }
    }
}
