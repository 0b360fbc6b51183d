//! The harmonic oscillator `−d²/dx² + x²` with eigenvalues `2n + 1` and the
//! cyclic vector whose Hermite coefficients are `1/√n!`.
//!
//! The default model keeps those raw coefficients, so `‖μ‖² = Σ 1/n!`
//! tends to `e`; pass `normalized = true` to rescale to a unit vector.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{SpectralModel, EXCLUSION_FACTOR};
use crate::quadrature::{gauss_hermite, gauss_legendre};
use crate::sum::{ComplexSum, KahanSum};

/// Relative disagreement between a rule and its half-size companion above
/// which quadrature is reported as unconverged.
const REFINEMENT_TOL: f64 = 1e-10;

pub fn oscillator_model(levels: usize, normalized: bool) -> Result<SpectralModel> {
    if levels < 2 {
        return Err(Error::TooSmall(levels));
    }
    let eigenvalues = (0..levels).map(|n| 2.0 * n as f64 + 1.0).collect();
    let mut weights = Vec::with_capacity(levels);
    let mut inv_factorial = 1.0;
    for n in 0..levels {
        if n > 0 {
            inv_factorial /= n as f64;
        }
        weights.push(inv_factorial);
    }
    let model = SpectralModel::new(eigenvalues, weights)?;
    Ok(if normalized { model.normalize() } else { model })
}

/// A truncated series and a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `Σ_{n<terms} 1/(n!·(2n + 1 − z))`.
pub fn osc_f_series(z: Complex64, terms: usize) -> Result<SeriesValue> {
    if terms == 0 {
        return Err(Error::TooSmall(0));
    }
    let radius = EXCLUSION_FACTOR * (2.0 * (terms as f64 - 1.0)).max(1.0);
    let mut acc = ComplexSum::new();
    let mut inv_factorial = 1.0;
    for n in 0..terms {
        if n > 0 {
            inv_factorial /= n as f64;
        }
        let d = Complex64::new(2.0 * n as f64 + 1.0, 0.0) - z;
        if d.norm() < radius {
            return Err(Error::pole_at(z));
        }
        acc.add(d.inv() * inv_factorial);
    }
    // Σ_{n≥T} 1/n! ≤ 2/T!, divided by the distance to the omitted poles.
    let inv_t_factorial = inv_factorial / terms as f64;
    let nearest = ((z.re - 1.0) / 2.0).round().max(terms as f64) as usize;
    let dist = [nearest.saturating_sub(1).max(terms), nearest, nearest + 1]
        .iter()
        .map(|&n| (Complex64::new(2.0 * n as f64 + 1.0, 0.0) - z).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(SeriesValue {
        value: acc.value(),
        tail_bound: 2.0 * inv_t_factorial / dist,
    })
}

fn contour_integral(z: Complex64, points: usize) -> Complex64 {
    let rule = gauss_legendre(points).scaled(-PI, PI);
    let a = (Complex64::new(1.0, 0.0) - z) * 0.5;
    let mut acc = ComplexSum::new();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        // e^{−cos t − i sin t} e^{i(1−z)t/2} = exp(−e^{it} + i a t)
        let e = Complex64::new(0.0, t).exp();
        let i_at = Complex64::new(0.0, t) * a;
        acc.add((i_at - e).exp() * w);
    }
    acc.value()
}

/// Integral representation
/// `F(z) = (1/(4cos(πz/2)))·∫_{−π}^{π} e^{−cos θ − i sin θ}·e^{i(1−z)θ/2} dθ`,
/// evaluated with Gauss–Legendre and checked against a half-size rule.
pub fn osc_f_integral(z: Complex64, quad_points: usize) -> Result<Complex64> {
    if quad_points < 2 {
        return Err(Error::TooSmall(quad_points));
    }
    let cos = (z * (PI / 2.0)).cos();
    if cos.norm() < EXCLUSION_FACTOR {
        return Err(Error::pole_at(z));
    }
    let fine = contour_integral(z, quad_points) / (cos * 4.0);
    let coarse = contour_integral(z, quad_points / 2) / (cos * 4.0);
    let diff = (fine - coarse).norm();
    if diff > REFINEMENT_TOL * fine.norm().max(1.0) {
        return Err(Error::QuadratureNonConvergence(diff));
    }
    Ok(fine)
}

/// `μ(x) = π^{−1/4}·exp(−(x² − 2√2·x + 1)/2)`.
pub fn mu_pointwise(x: f64) -> f64 {
    PI.powf(-0.25) * (-(x * x - 2.0 * SQRT_2 * x + 1.0) / 2.0).exp()
}

/// Normalized Hermite polynomials `ψ_0..ψ_n` at `x`, so that the Hermite
/// functions are `φ_k(x) = e^{−x²/2}ψ_k(x)`.
fn normalized_hermite(n: usize, x: f64) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n + 1);
    psi.push(PI.powf(-0.25));
    if n >= 1 {
        psi.push(SQRT_2 * x * psi[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * psi[k] - (kf / (kf + 1.0)).sqrt() * psi[k - 1];
        psi.push(next);
    }
    psi
}

/// Hermite function `φ_n(x)` by the normalized three-term recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    (-0.5 * x * x).exp() * normalized_hermite(n, x)[n]
}

fn overlap_with_rule(n: usize, points: usize) -> f64 {
    let rule = gauss_hermite(points);
    let mut acc = KahanSum::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        // φ_n μ = e^{−x²}·ψ_n(x)·π^{−1/4}e^{√2x − 1/2}
        let g = normalized_hermite(n, x)[n] * PI.powf(-0.25) * (SQRT_2 * x - 0.5).exp();
        acc.add(w * g);
    }
    acc.value()
}

/// `⟨φ_n, μ⟩` by Gauss–Hermite quadrature; equals `1/√n!`.
pub fn hermite_overlap(n: usize, quad_points: usize) -> Result<f64> {
    if quad_points < 2 {
        return Err(Error::TooSmall(quad_points));
    }
    let fine = overlap_with_rule(n, 2 * quad_points);
    let coarse = overlap_with_rule(n, quad_points);
    let diff = (fine - coarse).abs();
    if diff > REFINEMENT_TOL * fine.abs().max(1.0) {
        return Err(Error::QuadratureNonConvergence(diff));
    }
    Ok(fine)
}
