//! Quadrature primitives shared by the mode, operator and field oracles.
//!
//! Gauss-Hermite rules integrate `exp(-t^2) * f(t)` over the real line and
//! are exact for polynomial `f` of degree `2n - 1`; they are the workhorse
//! for waist-plane matrix elements. Uniform Simpson grids handle integrands
//! away from the waist. All summations go through [`pairwise_sum`] so that
//! results are independent of thread count and accumulation order.

use nalgebra::{DMatrix, SymmetricEigen};

/// A Gauss-Hermite rule: nodes and weights for `∫ e^{-t²} f(t) dt`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch construction: eigendecompose the Jacobi matrix of the
    /// Hermite recurrence (off-diagonal `sqrt(k/2)`). Nodes are eigenvalues,
    /// weights `sqrt(pi)` times the squared first eigenvector components.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let node = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                (node, std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Integrate `e^{-t²} f(t)` over the real line.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Composite Simpson weights for `n` equally spaced points with spacing `h`.
///
/// For an even interval count the classic 1/3 rule applies; an odd interval
/// count closes with one 3/8 panel so fourth-order accuracy is retained.
/// Panics for `n < 4` since no composite rule fits.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 4, "Simpson weights need at least 4 points");
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let (simpson_end, tail38) = if intervals.is_multiple_of(2) {
        (n - 1, false)
    } else {
        (n - 4, true)
    };
    // 1/3 panels over [0, simpson_end]
    if simpson_end >= 2 {
        w[0] += h / 3.0;
        w[simpson_end] += h / 3.0;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_end).skip(1) {
            *wi += if i.is_multiple_of(2) {
                2.0 * h / 3.0
            } else {
                4.0 * h / 3.0
            };
        }
    }
    if tail38 {
        let start = n - 4;
        w[start] += 3.0 * h / 8.0;
        w[start + 1] += 9.0 * h / 8.0;
        w[start + 2] += 9.0 * h / 8.0;
        w[start + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Uniformly spaced samples covering `[-half_extent, half_extent]`.
pub fn uniform_nodes(n: usize, half_extent: f64) -> (Vec<f64>, f64) {
    assert!(n >= 2);
    let h = 2.0 * half_extent / (n - 1) as f64;
    let xs = (0..n).map(|i| -half_extent + i as f64 * h).collect();
    (xs, h)
}

/// Sum with a fixed pairwise (binary tree) order.
///
/// Deterministic for a given input slice regardless of how the terms were
/// produced, and with error growth O(log n) rather than O(n).
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    match terms.len() {
        0 => 0.0,
        1 => terms[0],
        2 => terms[0] + terms[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
        }
    }
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
///
/// Used by the convergence-order checks (paraxial frame error, kappa_z
/// expansion residual).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gauss_hermite_moments() {
        let gh = GaussHermite::new(64);
        // ∫ e^{-t²} dt = √π, ∫ t² e^{-t²} = √π/2, ∫ t⁴ e^{-t²} = 3√π/4
        assert_relative_eq!(gh.integrate(|_| 1.0), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            gh.integrate(|t| t * t),
            PI.sqrt() / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gh.integrate(|t| t.powi(4)),
            3.0 * PI.sqrt() / 4.0,
            max_relative = 1e-13
        );
        // odd moments vanish
        assert!(gh.integrate(|t| t.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn gauss_hermite_weights_positive() {
        for n in [4, 17, 48, 64] {
            let gh = GaussHermite::new(n);
            assert!(gh.weights.iter().all(|&w| w > 0.0));
            let total: f64 = gh.weights.iter().sum();
            assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        for n in [513, 512] {
            let (xs, h) = uniform_nodes(n, PI);
            let w = simpson_weights(n, h);
            let integral: f64 = xs.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
            // ∫_{-π}^{π} cos = 0
            assert!(integral.abs() < 1e-9, "n={n}: {integral}");
        }
        // a decayed Gaussian: ∫_{-6}^{6} e^{-x²} ≈ √π to well below 1e-10
        for n in [513, 512] {
            let (xs, h) = uniform_nodes(n, 6.0);
            let w = simpson_weights(n, h);
            let gauss: f64 = xs.iter().zip(&w).map(|(x, w)| w * (-x * x).exp()).sum();
            assert_relative_eq!(gauss, PI.sqrt(), max_relative = 1e-10);
        }
    }

    #[test]
    fn simpson_weight_total_matches_span() {
        for n in [4, 5, 128, 513] {
            let w = simpson_weights(n, 0.25);
            let total: f64 = w.iter().sum();
            assert_relative_eq!(total, 0.25 * (n - 1) as f64, max_relative = 1e-13);
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_benign_input() {
        let terms: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = terms.iter().sum();
        assert_relative_eq!(pairwise_sum(&terms), naive, max_relative = 1e-12);
    }

    #[test]
    fn log_log_slope_recovers_power() {
        let xs: Vec<f64> = (1..=20).map(|i| 1e-3 * 1.5_f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powi(3)).collect();
        assert_relative_eq!(log_log_slope(&xs, &ys), 3.0, epsilon = 1e-12);
    }
}
