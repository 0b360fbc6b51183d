//! Spectra and spectral measures of `A_h = A + h⟨μ,·⟩μ`.
//!
//! Eigenvalues of `A_h` are the roots of the secular equation
//! `1 + hF(x) = 0`; the infinite coupling has the zeros of `F` as spectrum.
//! On every gap `(λ_j, λ_{j+1})` the function `F` increases from `−∞` to
//! `+∞`, so each gap brackets exactly one root. The root is searched in a
//! coordinate centred on the closer pole, which keeps the distances
//! `λ_k − x` accurate when a root sits very close to an eigenvalue.

use num_complex::Complex64;

use crate::dense::SymMatrix;
use crate::error::{Error, Result};
use crate::exec::{try_map_range, Exec};
use crate::herglotz::weyl_raw;
use crate::model::{Coupling, SpectralModel, StateVector};
use crate::sum::{sum_complex, KahanSum};

/// Maximum Newton polishing steps after bisection.
const NEWTON_STEPS: usize = 5;
/// Secular residual above which nodes are considered to belong to another
/// coupling.
const NODE_CONSISTENCY_TOL: f64 = 1e-8;

/// Secular function in shifted coordinates `x = origin + τ`.
struct Secular<'a> {
    weights: &'a [f64],
    /// `λ_k − origin`.
    deltas: Vec<f64>,
    /// `None` is the infinite coupling (plain `F`).
    h: Option<f64>,
}

impl<'a> Secular<'a> {
    fn new(model: &'a SpectralModel, origin: f64, h: Option<f64>) -> Self {
        Self {
            weights: model.weights(),
            deltas: model.eigenvalues().iter().map(|l| l - origin).collect(),
            h,
        }
    }

    /// Value and derivative at `τ`.
    fn eval(&self, tau: f64) -> (f64, f64) {
        let mut f = KahanSum::new();
        let mut fp = KahanSum::new();
        for (&d, &w) in self.deltas.iter().zip(self.weights) {
            let r = (d - tau).recip();
            f.add(w * r);
            fp.add(w * r * r);
        }
        match self.h {
            Some(h) => (1.0 + h * f.value(), h * fp.value()),
            None => (f.value(), fp.value()),
        }
    }

    /// Finds the root in `[lo, hi]` given that `sign·g < 0` at `lo` and
    /// `sign·g > 0` at `hi` (endpoints may be poles and are never evaluated).
    fn solve(&self, mut lo: f64, mut hi: f64, sign: f64, bracket: usize) -> Result<f64> {
        let (lo0, hi0) = (lo, hi);
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            let (g, _) = self.eval(mid);
            if g.is_nan() {
                return Err(Error::BracketFailure { bracket });
            }
            if g == 0.0 {
                return Ok(mid);
            }
            if sign * g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut tau = 0.5 * (lo + hi);
        let (mut g, mut gp) = self.eval(tau);
        if !g.is_finite() {
            return Err(Error::BracketFailure { bracket });
        }
        for _ in 0..NEWTON_STEPS {
            if g == 0.0 || gp == 0.0 || !gp.is_finite() {
                break;
            }
            let next = tau - g / gp;
            if !(next >= lo0 && next <= hi0) || next == tau {
                break;
            }
            let (gn, gpn) = self.eval(next);
            if !(gn.abs() < g.abs()) {
                break;
            }
            tau = next;
            g = gn;
            gp = gpn;
        }
        Ok(tau)
    }
}

/// Root of the secular function (finite `h ≠ 0`, or `None` for `F` itself)
/// inside the gap `(λ_j, λ_{j+1})`.
fn gap_root(model: &SpectralModel, h: Option<f64>, j: usize) -> Result<f64> {
    let lambda = model.eigenvalues();
    let (left, right) = (lambda[j], lambda[j + 1]);
    let half = 0.5 * (right - left);
    // Increasing for h > 0 and for F; decreasing for h < 0.
    let sign = match h {
        Some(h) if h < 0.0 => -1.0,
        _ => 1.0,
    };
    let probe = Secular::new(model, left, h);
    let (g_mid, _) = probe.eval(half);
    if g_mid.is_nan() {
        return Err(Error::BracketFailure { bracket: j });
    }
    if g_mid == 0.0 {
        return Ok(left + half);
    }
    if sign * g_mid > 0.0 {
        let tau = probe.solve(0.0, half, sign, j)?;
        Ok(left + tau)
    } else {
        let sec = Secular::new(model, right, h);
        let tau = sec.solve(-(right - left) + half, 0.0, sign, j)?;
        Ok(right + tau)
    }
}

/// The root of `1 + hF` outside `[λ_1, λ_N]`, enclosed by `|shift| ≤ |h|·‖μ‖²`.
fn exterior_root(model: &SpectralModel, h: f64) -> Result<f64> {
    let lambda = model.eigenvalues();
    let n = model.dim();
    let bound = h.abs() * model.mu_norm_sq();
    if h > 0.0 {
        let sec = Secular::new(model, lambda[n - 1], Some(h));
        Ok(lambda[n - 1] + sec.solve(0.0, bound, 1.0, n - 1)?)
    } else {
        let sec = Secular::new(model, lambda[0], Some(h));
        Ok(lambda[0] + sec.solve(-bound, 0.0, -1.0, n - 1)?)
    }
}

/// Spectrum of `A_h`, in increasing order.
pub fn perturbed_spectrum(model: &SpectralModel, coupling: Coupling) -> Result<Vec<f64>> {
    perturbed_spectrum_with(model, coupling, Exec::default())
}

pub fn perturbed_spectrum_with(
    model: &SpectralModel,
    coupling: Coupling,
    exec: Exec,
) -> Result<Vec<f64>> {
    let n = model.dim();
    match coupling {
        Coupling::Finite(h) if !h.is_finite() => Err(Error::NonFinite),
        Coupling::Finite(0.0) => Ok(model.eigenvalues().to_vec()),
        Coupling::Finite(h) => {
            let mut roots = try_map_range(exec, n - 1, |j| gap_root(model, Some(h), j))?;
            let outer = exterior_root(model, h)?;
            if h > 0.0 {
                roots.push(outer);
            } else {
                roots.insert(0, outer);
            }
            Ok(roots)
        }
        Coupling::Infinite => try_map_range(exec, n - 1, |j| gap_root(model, None, j)),
    }
}

/// Zeros of `F`: the spectrum of the infinite coupling.
pub fn zeros_of_weyl(model: &SpectralModel) -> Result<Vec<f64>> {
    perturbed_spectrum(model, Coupling::Infinite)
}

/// `|1 + hF(x)|` at a real point.
pub fn secular_residual(model: &SpectralModel, h: f64, x: f64) -> f64 {
    let f = weyl_raw(model, Complex64::new(x, 0.0)).f.re;
    (1.0 + h * f).abs()
}

/// Point masses `m_h({x_j}) = ‖ξ(x_j)‖⁻² = F(x_j)² / F'(x_j)` of the spectral
/// measure of `A_h`.
pub fn node_weights(model: &SpectralModel, h: f64, nodes: &[f64]) -> Result<Vec<f64>> {
    if !h.is_finite() {
        return Err(Error::InfiniteCoupling);
    }
    if nodes.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: nodes.len(),
        });
    }
    if h == 0.0 {
        for (index, (x, l)) in nodes.iter().zip(model.eigenvalues()).enumerate() {
            if x != l {
                return Err(Error::InconsistentNodes {
                    h,
                    index,
                    residual: (x - l).abs(),
                });
            }
        }
        return Ok(model.weights().to_vec());
    }
    nodes
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            let w = weyl_raw(model, Complex64::new(x, 0.0));
            let (f, fp) = (w.f.re, w.f_prime.re);
            let residual = (1.0 + h * f).abs();
            if !(residual <= NODE_CONSISTENCY_TOL) {
                return Err(Error::InconsistentNodes { h, index, residual });
            }
            Ok(f * f / fp)
        })
        .collect()
}

/// Spectral model of `A_h` with respect to the same cyclic vector.
pub fn perturbed_model(model: &SpectralModel, h: f64) -> Result<SpectralModel> {
    if h == 0.0 {
        return Ok(model.clone());
    }
    let nodes = perturbed_spectrum(model, Coupling::finite(h)?)?;
    let weights = node_weights(model, h, &nodes)?;
    SpectralModel::new(nodes, weights)
}

/// `ω(x)_j = √w_j / (λ_j − x)`, the coordinates of `(A − x)⁻¹μ`.
pub fn omega(model: &SpectralModel, x: f64) -> StateVector {
    StateVector(
        model
            .eigenvalues()
            .iter()
            .zip(model.weights())
            .map(|(&l, &w)| Complex64::new(w.sqrt() / (l - x), 0.0))
            .collect(),
    )
}

/// Orthonormal basis of `μ^⊥` (as `N − 1` columns of length `N`) from the
/// Householder reflection that maps the first axis to `−μ/‖μ‖`.
pub fn complement_basis(model: &SpectralModel) -> Vec<Vec<f64>> {
    let n = model.dim();
    let norm = model.mu_norm_sq().sqrt();
    let u: Vec<f64> = model.mu_coords().iter().map(|c| c / norm).collect();
    // v = e_1 + u; u_1 > 0 so there is no cancellation.
    let mut v = u.clone();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    (1..n)
        .map(|col| {
            (0..n)
                .map(|row| {
                    let id = if row == col { 1.0 } else { 0.0 };
                    id - 2.0 * v[row] * v[col] / vv
                })
                .collect()
        })
        .collect()
}

/// The `(N−1)×(N−1)` compression of `A` onto `μ^⊥`.
pub fn compression_matrix(model: &SpectralModel) -> SymMatrix {
    let basis = complement_basis(model);
    let lambda = model.eigenvalues();
    let m = basis.len();
    let mut c = SymMatrix::zeros(m);
    for a in 0..m {
        for b in a..m {
            let mut s = KahanSum::new();
            for k in 0..lambda.len() {
                s.add(basis[a][k] * lambda[k] * basis[b][k]);
            }
            c.set(a, b, s.value());
        }
    }
    c
}

/// Eigenvalues of `A` compressed to the orthogonal complement of `μ`.
pub fn compression_spectrum(model: &SpectralModel) -> Vec<f64> {
    compression_matrix(model).eigenvalues()
}

/// `P⊥ A P⊥ φ` in coordinates, `P⊥ = I − μμ*/‖μ‖²`.
pub fn compress_apply(model: &SpectralModel, phi: &StateVector) -> Result<StateVector> {
    phi.check_dim(model)?;
    let s = model.mu_coords();
    let norm_sq = model.mu_norm_sq();
    let project = |v: Vec<Complex64>| -> Vec<Complex64> {
        let a = sum_complex(s.iter().zip(&v).map(|(si, vi)| vi * *si)) / norm_sq;
        v.iter().zip(&s).map(|(vi, si)| vi - a * *si).collect()
    };
    let p = project(phi.coords().to_vec());
    let ap: Vec<Complex64> = p
        .iter()
        .zip(model.eigenvalues())
        .map(|(c, l)| c * *l)
        .collect();
    Ok(StateVector(project(ap)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> SpectralModel {
        SpectralModel::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn m2_spectra() {
        let s = perturbed_spectrum(&m2(), Coupling::Finite(1.0)).unwrap();
        // z² − 3z + 1 = 0
        assert!((s[0] - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((s[1] - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);

        assert_eq!(
            perturbed_spectrum(&m2(), Coupling::Finite(0.0)).unwrap(),
            vec![0.0, 2.0]
        );
        let inf = perturbed_spectrum(&m2(), Coupling::Infinite).unwrap();
        assert_eq!(inf.len(), 1);
        assert!((inf[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_coupling_exterior_root() {
        // 1 − F(x) = 0 ⇒ z² − z − 1 = 0 (roots (1 ± √5)/2)
        let s = perturbed_spectrum(&m2(), Coupling::Finite(-1.0)).unwrap();
        assert!((s[0] - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((s[1] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn m2_node_weights() {
        let nodes = perturbed_spectrum(&m2(), Coupling::Finite(1.0)).unwrap();
        let w = node_weights(&m2(), 1.0, &nodes).unwrap();
        assert!((w[0] - 0.276393202250021).abs() < 1e-12);
        assert!((w[1] - 0.723606797749979).abs() < 1e-12);
        assert!((w[0] + w[1] - 1.0).abs() < 1e-14);

        assert_eq!(
            node_weights(&m2(), 0.0, &[0.0, 2.0]).unwrap(),
            vec![0.5, 0.5]
        );

        let wrong = perturbed_spectrum(&m2(), Coupling::Finite(2.0)).unwrap();
        assert!(matches!(
            node_weights(&m2(), 1.0, &wrong),
            Err(Error::InconsistentNodes { .. })
        ));
        assert!(node_weights(&m2(), 0.0, &[0.1, 2.0]).is_err());
    }

    #[test]
    fn perturbed_model_round_trip() {
        assert_eq!(perturbed_model(&m2(), 0.0).unwrap(), m2());
        let p = perturbed_model(&m2(), 1.0).unwrap();
        assert!((p.weights()[0] - 0.276393202250021).abs() < 1e-12);
        let back = perturbed_model(&p, -1.0).unwrap();
        for (a, b) in back.eigenvalues().iter().zip(m2().eigenvalues()) {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in back.weights().iter().zip(m2().weights()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn compression_examples() {
        let c = compression_spectrum(&m2());
        assert_eq!(c.len(), 1);
        assert!((c[0] - 1.0).abs() < 1e-14);

        let m = SpectralModel::new(vec![1.0, 3.0, 5.0], vec![0.4, 0.4, 0.2]).unwrap();
        let c = compression_spectrum(&m);
        assert!(c[0] > 1.0 && c[0] < 3.0);
        assert!(c[1] > 3.0 && c[1] < 5.0);
        // Independent 2×2 route: trace and determinant of the compression.
        let z = zeros_of_weyl(&m).unwrap();
        for (a, b) in c.iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_orthogonal_to_mu() {
        let m = SpectralModel::new(vec![-1.0, 0.5, 3.0, 7.0], vec![0.1, 0.6, 0.2, 0.1]).unwrap();
        let b = complement_basis(&m);
        let s = m.mu_coords();
        for (i, bi) in b.iter().enumerate() {
            let dot_mu: f64 = bi.iter().zip(&s).map(|(x, y)| x * y).sum();
            assert!(dot_mu.abs() < 1e-15);
            for (j, bj) in b.iter().enumerate() {
                let d: f64 = bi.iter().zip(bj).map(|(x, y)| x * y).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn omega_is_an_eigenvector_of_the_compression() {
        let m = SpectralModel::new(vec![-1.0, 0.5, 3.0, 7.0], vec![0.1, 0.6, 0.2, 0.1]).unwrap();
        for x in zeros_of_weyl(&m).unwrap() {
            let w = omega(&m, x);
            let mu_dot = m.mu_state().inner(&w);
            assert!(mu_dot.norm() < 1e-12 * w.norm());
            let cw = compress_apply(&m, &w).unwrap();
            let err: f64 = cw
                .coords()
                .iter()
                .zip(w.coords())
                .map(|(a, b)| (a - b * x).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-9 * x.abs().max(1.0) * w.norm());
        }
    }

    #[test]
    fn tiny_coupling_roots_hug_the_eigenvalues() {
        let m = SpectralModel::new(vec![0.0, 1.0, 2.0], vec![0.3, 0.3, 0.4]).unwrap();
        let h = 1e-12;
        let s = perturbed_spectrum(&m, Coupling::Finite(h)).unwrap();
        for (x, l) in s.iter().zip(m.eigenvalues()) {
            assert!(x > l && x - l < 1e-11);
        }
        let h = 1e-3;
        for x in perturbed_spectrum(&m, Coupling::Finite(h)).unwrap() {
            assert!(secular_residual(&m, h, x) <= 1e-10);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let m = SpectralModel::new(
            (0..40).map(|i| i as f64 * 0.7).collect(),
            (0..40).map(|i| 1.0 + (i % 5) as f64).collect(),
        )
        .unwrap();
        let a = perturbed_spectrum_with(&m, Coupling::Finite(-2.5), Exec::Sequential).unwrap();
        let b = perturbed_spectrum_with(&m, Coupling::Finite(-2.5), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
