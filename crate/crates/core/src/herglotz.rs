//! The Weyl function `F(z) = ⟨μ, (A − z)⁻¹μ⟩ = Σ_j w_j / (λ_j − z)`, its
//! perturbed family and the normalized resolvent vector `ξ(z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{SpectralModel, StateVector};
use crate::sum::ComplexSum;

/// `F(z)` together with `F'(z) = Σ_j w_j / (λ_j − z)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weyl {
    pub f: Complex64,
    pub f_prime: Complex64,
}

/// Quantities of the perturbed family at one point.
///
/// `f_h = F / (1 + hF)` is infinite exactly on the spectrum of `A_h`;
/// `g_h = h + 1/F` and `g_h_prime = −F'/F²` are finite there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedWeyl {
    pub f_h: Complex64,
    pub g_h: Complex64,
    pub g_h_prime: Complex64,
}

/// `ξ(z) = (A − z̄)⁻¹μ / F(z̄)` in the eigenbasis of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiVector {
    pub at: Complex64,
    pub coords: Vec<Complex64>,
}

impl XiVector {
    pub fn norm_sq(&self) -> f64 {
        crate::sum::sum_real(self.coords.iter().map(|c| c.norm_sqr()))
    }

    pub fn as_state(&self) -> StateVector {
        StateVector(self.coords.clone())
    }
}

/// Evaluates `F` and `F'` with no proximity checks.
pub(crate) fn weyl_raw(model: &SpectralModel, z: Complex64) -> Weyl {
    let mut f = ComplexSum::new();
    let mut fp = ComplexSum::new();
    for (&lambda, &w) in model.eigenvalues().iter().zip(model.weights()) {
        let r = (Complex64::new(lambda, 0.0) - z).inv();
        f.add(r * w);
        fp.add(r * r * w);
    }
    Weyl {
        f: f.value(),
        f_prime: fp.value(),
    }
}

pub(crate) fn check_poles(poles: &[f64], radius: f64, z: Complex64) -> Result<()> {
    if poles
        .iter()
        .any(|&p| (Complex64::new(p, 0.0) - z).norm() < radius)
    {
        return Err(Error::pole_at(z));
    }
    Ok(())
}

/// A zero of an analytic function lies within roughly `|g/g'|` of `z`.
pub(crate) fn near_zero(g: Complex64, g_prime: Complex64, radius: f64) -> bool {
    g == Complex64::new(0.0, 0.0) || g.norm() <= radius * g_prime.norm()
}

pub fn weyl(model: &SpectralModel, z: Complex64) -> Result<Weyl> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    check_poles(model.eigenvalues(), model.exclusion_radius(), z)?;
    Ok(weyl_raw(model, z))
}

fn weyl_away_from_zeros(model: &SpectralModel, z: Complex64) -> Result<Weyl> {
    let w = weyl(model, z)?;
    if near_zero(w.f, w.f_prime, model.exclusion_radius()) {
        return Err(Error::zero_at(z));
    }
    Ok(w)
}

/// Aronszajn–Krein: `F_h = F / (1 + hF)`, `G_h = 1/F_h = h + 1/F`.
pub fn weyl_h(model: &SpectralModel, h: f64, z: Complex64) -> Result<PerturbedWeyl> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let Weyl { f, f_prime } = weyl_away_from_zeros(model, z)?;
    let denom = f * h + 1.0;
    let f_h = if denom == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        f / denom
    };
    let inv_f = f.inv();
    Ok(PerturbedWeyl {
        f_h,
        g_h: inv_f + h,
        g_h_prime: -f_prime * inv_f * inv_f,
    })
}

/// Coordinates `√w_j / ((λ_j − z̄)·F(z̄))`, written via `F(z̄) = conj F(z)`.
pub(crate) fn xi_coords_raw(model: &SpectralModel, z: Complex64, f: Complex64) -> Vec<Complex64> {
    model
        .eigenvalues()
        .iter()
        .zip(model.weights())
        .map(|(&lambda, &w)| (((Complex64::new(lambda, 0.0) - z) * f).conj()).inv() * w.sqrt())
        .collect()
}

/// `ξ(x)` at a real point, resolving the removable singularity at an
/// eigenvalue of `A`: `ξ(λ_k) = e_k / √w_k`.
pub(crate) fn xi_real_removable(model: &SpectralModel, x: f64) -> Vec<Complex64> {
    if let Some(k) = model.eigenvalues().iter().position(|&l| l == x) {
        let mut coords = vec![Complex64::new(0.0, 0.0); model.dim()];
        coords[k] = Complex64::new(model.weights()[k].sqrt().recip(), 0.0);
        return coords;
    }
    let z = Complex64::new(x, 0.0);
    let w = weyl_raw(model, z);
    xi_coords_raw(model, z, w.f)
}

pub fn xi(model: &SpectralModel, z: Complex64) -> Result<XiVector> {
    let w = weyl_away_from_zeros(model, z)?;
    Ok(XiVector {
        at: z,
        coords: xi_coords_raw(model, z, w.f),
    })
}

/// `‖ξ(x)‖² = F'(x) / F(x)²` for real `x`; reciprocal of the spectral mass
/// of `A_h` at `x` when `x ∈ Sp(A_h)`.
pub fn xi_norm_sq(model: &SpectralModel, x: f64) -> Result<f64> {
    let w = weyl_away_from_zeros(model, Complex64::new(x, 0.0))?;
    Ok(w.f_prime.re / (w.f.re * w.f.re))
}

/// The unique finite coupling that puts `x` in the spectrum of `A_h`,
/// `h = −1/F(x)`.
pub fn coupling_for(model: &SpectralModel, x: f64) -> Result<f64> {
    let w = weyl_away_from_zeros(model, Complex64::new(x, 0.0))?;
    Ok(-1.0 / w.f.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> SpectralModel {
        SpectralModel::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn weyl_examples() {
        // 0.5/(0 − i) + 0.5/(2 − i) = 0.5i + 0.5(2 + i)/5
        let w = weyl(&m2(), c(0.0, 1.0)).unwrap();
        assert!(close(w.f, c(0.2, 0.6), 1e-15));
        assert!(close(w.f_prime, c(-0.44, 0.08), 1e-15));

        let w = weyl(&m2(), c(1.0, 0.0)).unwrap();
        assert!(close(w.f, c(0.0, 0.0), 1e-16));
        assert!(close(w.f_prime, c(1.0, 0.0), 1e-15));

        assert!(matches!(
            weyl(&m2(), c(2.0 + 1e-15, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn weyl_h_examples() {
        let p = weyl_h(&m2(), 1.0, c(0.0, 1.0)).unwrap();
        assert!(close(p.f_h, c(1.0 / 3.0, 1.0 / 3.0), 1e-15));
        assert!(close(p.g_h, c(1.5, -1.5), 1e-14));
        assert!(close(p.f_h * p.g_h, c(1.0, 0.0), 1e-12));

        let p = weyl_h(&m2(), 0.0, c(0.0, 1.0)).unwrap();
        assert!(close(p.f_h, c(0.2, 0.6), 1e-15));

        assert!(matches!(
            weyl_h(&m2(), 1.0, c(1.0, 0.0)),
            Err(Error::ZeroOfF { .. })
        ));
    }

    #[test]
    fn xi_examples() {
        let x = (3.0 - 5f64.sqrt()) / 2.0;
        let v = xi(&m2(), c(x, 0.0)).unwrap();
        // F(x) = −1 and F'(x) = 0.5/x² + 0.5/(2 − x)²
        let expected = 0.5 / (x * x) + 0.5 / ((2.0 - x) * (2.0 - x));
        assert!((v.norm_sq() - expected).abs() < 1e-12);
        assert!((v.norm_sq() - 3.618033988749895).abs() < 1e-12);
        assert!((xi_norm_sq(&m2(), x).unwrap() - 3.618033988749895).abs() < 1e-12);
        let y = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((xi_norm_sq(&m2(), y).unwrap() - 1.381966011250105).abs() < 1e-12);

        assert!(matches!(xi(&m2(), c(1.0, 0.0)), Err(Error::ZeroOfF { .. })));
        assert!(matches!(xi_norm_sq(&m2(), 1.0), Err(Error::ZeroOfF { .. })));
    }

    #[test]
    fn xi_is_an_eigenvector_of_the_matching_perturbation() {
        let m = m2();
        let x = 0.5;
        let h = coupling_for(&m, x).unwrap();
        let v = xi(&m, c(x, 0.0)).unwrap();
        // Brute force: build A_h as a dense matrix in the eigenbasis.
        let s = m.mu_coords();
        let n = m.dim();
        let mut residual = 0.0;
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let a = if i == j { m.eigenvalues()[i] } else { 0.0 } + h * s[i] * s[j];
                row += v.coords[j] * a;
            }
            residual += (row - v.coords[i] * x).norm_sqr();
        }
        assert!(residual.sqrt() <= 1e-9 * (1.0 + x) * v.norm_sq().sqrt());
    }

    #[test]
    fn removable_xi_at_eigenvalue() {
        let coords = xi_real_removable(&m2(), 0.0);
        assert!(close(coords[0], c(2f64.sqrt(), 0.0), 1e-15));
        assert_eq!(coords[1], c(0.0, 0.0));
        // Just off the eigenvalue the generic formula agrees.
        let near = xi_real_removable(&m2(), 1e-9);
        assert!(close(near[0], coords[0], 1e-8));
    }
}
