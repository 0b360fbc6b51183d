//! The transform `Φ_μ φ = ⟨ξ(·), φ⟩` and reconstruction of its image from
//! samples on the spectrum of any `A_h`.
//!
//! In eigen-coordinates `f(z) = (1/F(z))·Σ_j √w_j·φ_j / (λ_j − z)`. Poles of
//! `f` lie on the zeros of `F`; the spectrum of every finite coupling avoids
//! them, and at the eigenvalues of `A` the singularity is removable with
//! `f(λ_k) = φ_k / √w_k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::herglotz::{check_poles, near_zero, weyl, weyl_raw, xi, xi_real_removable};
use crate::model::{Coupling, MeromorphicRep, SampleSet, SpectralModel, StateVector};
use crate::perturbation::{node_weights, perturbed_spectrum, zeros_of_weyl};
use crate::sum::{sum_complex, sum_real, ComplexSum};

/// Tolerance for matching representation poles against the zeros of `F`.
const POLE_MATCH_TOL: f64 = 1e-9;
/// `|f(w)| ≤ ZERO_TOL·‖ξ(w)‖·‖φ‖` counts as a zero for the Blaschke swap.
const ZERO_TOL: f64 = 1e-9;

fn resolvent_numerator(model: &SpectralModel, phi: &StateVector, z: Complex64) -> Complex64 {
    sum_complex(
        model
            .eigenvalues()
            .iter()
            .zip(model.weights())
            .zip(phi.coords())
            .map(|((&l, &w), &p)| p * w.sqrt() / (Complex64::new(l, 0.0) - z)),
    )
}

/// `(Φ_μ φ)(z)`.
pub fn transform(model: &SpectralModel, phi: &StateVector, z: Complex64) -> Result<Complex64> {
    phi.check_dim(model)?;
    let w = weyl(model, z)?;
    if near_zero(w.f, w.f_prime, model.exclusion_radius()) {
        return Err(Error::zero_at(z));
    }
    Ok(resolvent_numerator(model, phi, z) / w.f)
}

/// Value at a real point of a finite-coupling spectrum; no proximity checks.
fn value_at_node(model: &SpectralModel, phi: &StateVector, x: f64) -> Complex64 {
    if let Some(k) = model.eigenvalues().iter().position(|&l| l == x) {
        return phi.coords()[k] / model.weights()[k].sqrt();
    }
    let z = Complex64::new(x, 0.0);
    resolvent_numerator(model, phi, z) / weyl_raw(model, z).f
}

/// Samples of `Φ_μ φ` on the spectrum of `A_h`.
pub fn sample(model: &SpectralModel, phi: &StateVector, coupling: Coupling) -> Result<SampleSet> {
    sample_with(model, phi, coupling, Exec::default())
}

pub fn sample_with(
    model: &SpectralModel,
    phi: &StateVector,
    coupling: Coupling,
    exec: Exec,
) -> Result<SampleSet> {
    let h = coupling.as_finite().ok_or(Error::InfiniteCoupling)?;
    phi.check_dim(model)?;
    let nodes = perturbed_spectrum(model, coupling)?;
    let weights = node_weights(model, h, &nodes)?;
    let values = map_slice(exec, &nodes, |&x| value_at_node(model, phi, x));
    SampleSet::new(h, nodes, weights, values)
}

fn node_radius(samples: &SampleSet) -> f64 {
    let nodes = samples.nodes();
    let spread = nodes[nodes.len() - 1] - nodes[0];
    crate::model::EXCLUSION_FACTOR * spread.max(1.0)
}

/// `F_h(z) = Σ_j m_j / (x_j − z)` and its derivative, from sample data only.
fn sampled_weyl(samples: &SampleSet, z: Complex64) -> (Complex64, Complex64) {
    let mut f = ComplexSum::new();
    let mut fp = ComplexSum::new();
    for (&x, &m) in samples.nodes().iter().zip(samples.node_weights()) {
        let r = (Complex64::new(x, 0.0) - z).inv();
        f.add(r * m);
        fp.add(r * r * m);
    }
    (f.value(), fp.value())
}

fn check_reconstruction_point(samples: &SampleSet, z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    let radius = node_radius(samples);
    check_poles(samples.nodes(), radius, z)?;
    let (f_h, f_h_prime) = sampled_weyl(samples, z);
    // Zeros of F_h are poles of G_h, hence of the reconstructed function.
    if near_zero(f_h, f_h_prime, radius) {
        return Err(Error::pole_at(z));
    }
    Ok(f_h)
}

/// Lagrange basis `G_h(z) / ((z − x_j)·G_h'(x_j))` with `G_h = 1/F_h` and
/// `G_h'(x_j) = −1/m_j`.
pub fn lagrange_basis(samples: &SampleSet, z: Complex64) -> Result<Vec<Complex64>> {
    let f_h = check_reconstruction_point(samples, z)?;
    let g_h = f_h.inv();
    Ok(samples
        .nodes()
        .iter()
        .zip(samples.node_weights())
        .map(|(&x, &m)| g_h * m / (Complex64::new(x, 0.0) - z))
        .collect())
}

/// Lagrange interpolation series, computed from the samples alone.
pub fn reconstruct(samples: &SampleSet, z: Complex64) -> Result<Complex64> {
    let f_h = check_reconstruction_point(samples, z)?;
    let num = sum_complex(
        samples
            .nodes()
            .iter()
            .zip(samples.node_weights())
            .zip(samples.values())
            .map(|((&x, &m), &v)| v * m / (Complex64::new(x, 0.0) - z)),
    );
    Ok(num / f_h)
}

/// [`reconstruct`] over a grid; results in input order.
pub fn reconstruct_grid(
    samples: &SampleSet,
    points: &[Complex64],
    exec: Exec,
) -> Vec<Result<Complex64>> {
    map_slice(exec, points, |&z| reconstruct(samples, z))
}

/// Orthogonal (Kramer-type) series `Σ_j ⟨ξ(z), ξ(x_j)⟩·f(x_j) / ‖ξ(x_j)‖²`
/// using explicit `ξ` vectors of the model.
pub fn kramer_reconstruct(
    model: &SpectralModel,
    samples: &SampleSet,
    z: Complex64,
) -> Result<Complex64> {
    if samples.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: samples.len(),
        });
    }
    check_poles(samples.nodes(), node_radius(samples), z)?;
    let xz = xi(model, z)?;
    let terms = samples
        .nodes()
        .iter()
        .zip(samples.values())
        .map(|(&x, &v)| {
            let xj = xi_real_removable(model, x);
            let inner = sum_complex(xz.coords.iter().zip(&xj).map(|(a, b)| a.conj() * b));
            let norm_sq = sum_real(xj.iter().map(|c| c.norm_sqr()));
            inner * v / norm_sq
        });
    Ok(sum_complex(terms))
}

/// `c = ⟨μ, φ⟩`, poles at the zeros of `F`, `c_n = ⟨ω(x_n), φ⟩ / F'(x_n)`.
pub fn to_partial_fractions(model: &SpectralModel, phi: &StateVector) -> Result<MeromorphicRep> {
    if !model.is_normalized() {
        return Err(Error::NormalizationRequired(model.mu_norm_sq()));
    }
    phi.check_dim(model)?;
    let s = model.mu_coords();
    let constant = sum_complex(s.iter().zip(phi.coords()).map(|(si, p)| p * *si));
    let poles = zeros_of_weyl(model)?;
    let coefficients = poles
        .iter()
        .map(|&x| {
            // ‖ω(x_n)‖² = F'(x_n)
            let mut dot = ComplexSum::new();
            let mut norm_sq = crate::sum::KahanSum::new();
            for ((&l, &sj), &p) in model.eigenvalues().iter().zip(&s).zip(phi.coords()) {
                let o = sj / (l - x);
                dot.add(p * o);
                norm_sq.add(o * o);
            }
            dot.value() / norm_sq.value()
        })
        .collect();
    MeromorphicRep::new(constant, poles, coefficients)
}

/// Preimage `cμ + Σ_n c_n ω(x_n)` of a partial-fraction representation.
pub fn from_partial_fractions(model: &SpectralModel, rep: &MeromorphicRep) -> Result<StateVector> {
    let zeros = zeros_of_weyl(model)?;
    if rep.poles().len() != zeros.len() {
        return Err(Error::DimensionMismatch {
            expected: zeros.len(),
            found: rep.poles().len(),
        });
    }
    for (index, (p, z)) in rep.poles().iter().zip(&zeros).enumerate() {
        if !((p - z).abs() <= POLE_MATCH_TOL * z.abs().max(1.0)) {
            return Err(Error::PoleMismatch { index });
        }
    }
    let coords = model
        .eigenvalues()
        .iter()
        .zip(model.weights())
        .map(|(&l, &w)| {
            let s = w.sqrt();
            let mut acc = ComplexSum::new();
            acc.add(rep.constant() * s);
            for (&x, &c) in rep.poles().iter().zip(rep.coefficients()) {
                acc.add(c * (s / (l - x)));
            }
            acc.value()
        })
        .collect();
    Ok(StateVector(coords))
}

/// `c + Σ_n c_n / (z − x_n)`.
pub fn evaluate_rep(rep: &MeromorphicRep, z: Complex64) -> Result<Complex64> {
    let poles = rep.poles();
    if !poles.is_empty() {
        let spread = poles[poles.len() - 1] - poles[0];
        check_poles(poles, crate::model::EXCLUSION_FACTOR * spread.max(1.0), z)?;
    }
    let mut acc = ComplexSum::new();
    acc.add(rep.constant());
    for (&x, &c) in poles.iter().zip(rep.coefficients()) {
        acc.add(c / (z - x));
    }
    Ok(acc.value())
}

/// `|c|² + Σ_n |c_n|²·F'(x_n)`, which equals `‖φ‖²` for the image of `φ`.
pub fn rep_norm_sq(model: &SpectralModel, rep: &MeromorphicRep) -> f64 {
    let mut acc = crate::sum::KahanSum::new();
    acc.add(rep.constant().norm_sqr() * model.mu_norm_sq());
    for (&x, &c) in rep.poles().iter().zip(rep.coefficients()) {
        let fp = weyl_raw(model, Complex64::new(x, 0.0)).f_prime.re;
        acc.add(c.norm_sqr() * fp);
    }
    acc.value()
}

/// Inner product of `Φ_μ φ` and `Φ_μ ψ` in `L²(ℝ, dm_h)`.
pub fn inner_h(
    model: &SpectralModel,
    h: f64,
    phi: &StateVector,
    psi: &StateVector,
) -> Result<Complex64> {
    let coupling = Coupling::finite(h).map_err(|_| Error::InfiniteCoupling)?;
    let a = sample(model, phi, coupling)?;
    let b = sample(model, psi, coupling)?;
    Ok(sum_complex(
        a.values()
            .iter()
            .zip(b.values())
            .zip(a.node_weights())
            .map(|((f, g), &m)| f.conj() * g * m),
    ))
}

/// Complex conjugation in eigen-coordinates; `A` and `μ` are real for it.
pub fn conjugate_state(phi: &StateVector) -> StateVector {
    StateVector(phi.coords().iter().map(|c| c.conj()).collect())
}

/// `η = (A − w̄)(A − w)⁻¹φ`, whose image is `((z − w̄)/(z − w))·f(z)` when
/// `f(w) = 0`.
pub fn blaschke_swap(
    model: &SpectralModel,
    phi: &StateVector,
    w: Complex64,
) -> Result<StateVector> {
    if w.im == 0.0 {
        return Err(Error::RealPoint);
    }
    phi.check_dim(model)?;
    let fw = transform(model, phi, w)?;
    let xi_norm = xi(model, w)?.norm_sq().sqrt();
    if fw.norm() > ZERO_TOL * xi_norm * phi.norm() {
        return Err(Error::NotAZero(fw.norm()));
    }
    Ok(StateVector(
        model
            .eigenvalues()
            .iter()
            .zip(phi.coords())
            .map(|(&l, &p)| {
                let l = Complex64::new(l, 0.0);
                p * (l - w.conj()) / (l - w)
            })
            .collect(),
    ))
}

/// `(A_h φ)_j = λ_j φ_j + h·√w_j·⟨μ, φ⟩`.
pub fn apply_perturbed(model: &SpectralModel, h: f64, phi: &StateVector) -> Result<StateVector> {
    phi.check_dim(model)?;
    let s = model.mu_coords();
    let mu_phi = sum_complex(s.iter().zip(phi.coords()).map(|(si, p)| p * *si));
    Ok(StateVector(
        model
            .eigenvalues()
            .iter()
            .zip(&s)
            .zip(phi.coords())
            .map(|((&l, &si), &p)| p * l + mu_phi * (h * si))
            .collect(),
    ))
}

/// `⟨μ, φ⟩`.
pub fn mu_inner(model: &SpectralModel, phi: &StateVector) -> Complex64 {
    let s = model.mu_coords();
    sum_complex(s.iter().zip(phi.coords()).map(|(si, p)| p * *si))
}
