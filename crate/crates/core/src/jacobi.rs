//! Semi-infinite Jacobi matrices with cyclic vector `δ_1`.
//!
//! Polynomials of the first kind `P_k` and of the second kind `Q_k` solve the
//! three-term recurrence `b_{k−1}f_{k−1} + q_k f_k + b_k f_{k+1} = z f_k` with
//! `P_0 = 1, P_1 = (z − q_1)/b_1` and `Q_0 = 0, Q_1 = 1/b_1`. The Weyl
//! function of the `n×n` truncation is `−Q_n/P_n`. The last coefficient `b_n`
//! cancels from that ratio and from the zeros of `P_n`; when it is not
//! supplied it defaults to 1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_range, map_slice, Exec};
use crate::herglotz::near_zero;
use crate::model::{Coupling, SampleSet, SpectralModel, StateVector, EXCLUSION_FACTOR};
use crate::sampling::{reconstruct, sample};
use crate::sum::{sum_complex, sum_real, KahanSum};

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParams {
    q: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiParams {
    pub fn new(q: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if q.iter().any(|x| !x.is_finite()) || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(i) = b.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveOffDiagonal { index: i + 1 });
        }
        Ok(Self { q, b })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Parameters of the matrix with its first row and column removed.
    pub fn drop_first(&self) -> Result<Self> {
        if self.q.is_empty() {
            return Err(Error::InsufficientCoefficients {
                which: "q",
                needed: 1,
                available: 0,
            });
        }
        Ok(Self {
            q: self.q[1..].to_vec(),
            b: self.b.get(1..).map(<[f64]>::to_vec).unwrap_or_default(),
        })
    }

    fn require(&self, n: usize) -> Result<()> {
        if self.q.len() < n {
            return Err(Error::InsufficientCoefficients {
                which: "q",
                needed: n,
                available: self.q.len(),
            });
        }
        if self.b.len() + 1 < n {
            return Err(Error::InsufficientCoefficients {
                which: "b",
                needed: n - 1,
                available: self.b.len(),
            });
        }
        Ok(())
    }

    /// `b_k` (1-based) with the trailing default.
    fn b_at(&self, k: usize) -> f64 {
        self.b.get(k - 1).copied().unwrap_or(1.0)
    }

    /// Gershgorin enclosure of the spectrum of the `n×n` truncation.
    fn gershgorin(&self, n: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let left = if k > 0 { self.b[k - 1] } else { 0.0 };
            let right = if k + 1 < n { self.b[k] } else { 0.0 };
            lo = lo.min(self.q[k] - left - right);
            hi = hi.max(self.q[k] + left + right);
        }
        (lo, hi)
    }

    fn exclusion_radius(&self, n: usize) -> f64 {
        let (lo, hi) = self.gershgorin(n);
        EXCLUSION_FACTOR * (hi - lo).max(1.0)
    }
}

/// `P_0..P_n`, `Q_0..Q_n` and their derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialEval {
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
    pub p_prime: Vec<Complex64>,
    pub q_prime: Vec<Complex64>,
}

impl PolynomialEval {
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    /// `w_n = P_n/Q_n`.
    pub fn w(&self) -> Complex64 {
        let n = self.degree();
        self.p[n] / self.q[n]
    }

    /// `w_n' = (P_n'Q_n − P_nQ_n')/Q_n²`.
    pub fn w_prime(&self) -> Complex64 {
        let n = self.degree();
        (self.p_prime[n] * self.q[n] - self.p[n] * self.q_prime[n]) / (self.q[n] * self.q[n])
    }
}

pub fn polys(params: &JacobiParams, z: Complex64, n: usize) -> Result<PolynomialEval> {
    let n = n.max(1);
    params.require(n)?;
    let zero = Complex64::new(0.0, 0.0);
    let b1 = params.b_at(1);
    let mut p = vec![Complex64::new(1.0, 0.0), (z - params.q[0]) / b1];
    let mut q = vec![zero, Complex64::new(1.0 / b1, 0.0)];
    let mut dp = vec![zero, Complex64::new(1.0 / b1, 0.0)];
    let mut dq = vec![zero, zero];
    for k in 2..=n {
        let bk = params.b_at(k);
        let bkm = params.b_at(k - 1);
        let s = z - params.q[k - 1];
        let (p1, p2) = (p[k - 1], p[k - 2]);
        let (q1, q2) = (q[k - 1], q[k - 2]);
        dp.push((p1 + s * dp[k - 1] - dp[k - 2] * bkm) / bk);
        dq.push((q1 + s * dq[k - 1] - dq[k - 2] * bkm) / bk);
        p.push((s * p1 - p2 * bkm) / bk);
        q.push((s * q1 - q2 * bkm) / bk);
    }
    Ok(PolynomialEval {
        p,
        q,
        p_prime: dp,
        q_prime: dq,
    })
}

/// Number of eigenvalues of the `n×n` truncation strictly below `t`
/// (negative pivots of `J_n − t = LDLᵀ`).
pub fn sturm_count(params: &JacobiParams, n: usize, t: f64) -> Result<usize> {
    params.require(n)?;
    let bmax = params.b[..n.saturating_sub(1)]
        .iter()
        .fold(1.0f64, |a, &x| a.max(x * x));
    let pivmin = f64::MIN_POSITIVE * bmax;
    let mut count = 0;
    let mut d = params.q[0] - t;
    for k in 0..n {
        if k > 0 {
            let b = params.b[k - 1];
            d = (params.q[k] - t) - b * b / d;
        }
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Eigenvalues of the `n×n` truncation by Sturm bisection, polished with
/// Newton steps on `P_n`.
pub fn truncation_eigenvalues(params: &JacobiParams, n: usize, exec: Exec) -> Result<Vec<f64>> {
    params.require(n)?;
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let (glo, ghi) = params.gershgorin(n);
    let pad = f64::EPSILON * glo.abs().max(ghi.abs()).max(1.0) * 4.0;
    let (glo, ghi) = (glo - pad, ghi + pad);
    let eig = |k: usize| -> f64 {
        let (mut lo, mut hi) = (glo, ghi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            // require() already passed, the count cannot fail.
            let c = sturm_count(params, n, mid).unwrap_or(0);
            if c > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        let value =
            |x: f64| polys(params, Complex64::new(x, 0.0), n).map(|e| (e.p[n].re, e.p_prime[n].re));
        if let Ok((mut f, mut fp)) = value(x) {
            for _ in 0..3 {
                if f == 0.0 || fp == 0.0 {
                    break;
                }
                let next = x - f / fp;
                if !(next >= lo && next <= hi) {
                    break;
                }
                match value(next) {
                    Ok((fnext, fpnext)) if fnext.abs() < f.abs() => {
                        x = next;
                        f = fnext;
                        fp = fpnext;
                    }
                    _ => break,
                }
            }
        }
        x
    };
    Ok(map_range(exec, n, eig))
}

/// Spectral model of the `n×n` leading truncation with cyclic vector `δ_1`.
/// Weights are `1/Σ_{k<n} P_k(λ)²`, the squared first components of the
/// normalized eigenvectors.
pub fn truncate(params: &JacobiParams, n: usize) -> Result<SpectralModel> {
    truncate_with(params, n, Exec::default())
}

pub fn truncate_with(params: &JacobiParams, n: usize, exec: Exec) -> Result<SpectralModel> {
    let eigenvalues = truncation_eigenvalues(params, n, exec)?;
    let weights = map_slice(exec, &eigenvalues, |&x| first_component_sq(params, n, x));
    SpectralModel::new(eigenvalues, weights)
}

/// `1/Σ_{k<n} P_k(x)²`, with the recurrence rescaled by powers of two so the
/// sum cannot overflow. Weights below the double range come out as zero.
fn first_component_sq(params: &JacobiParams, n: usize, x: f64) -> f64 {
    const BIG: f64 = 1e150;
    let shrink = 2f64.powi(-500);
    let mut exp2: i32 = 0;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = KahanSum::new();
    sum.add(1.0);
    for k in 1..n {
        let bk = params.b_at(k);
        let back = if k >= 2 {
            params.b_at(k - 1) * prev
        } else {
            0.0
        };
        let next = ((x - params.q[k - 1]) * cur - back) / bk;
        prev = cur;
        cur = next;
        sum.add(cur * cur);
        if cur.abs() > BIG {
            prev *= shrink;
            cur *= shrink;
            let rescaled = sum.value() * shrink * shrink;
            sum = KahanSum::new();
            sum.add(rescaled);
            exp2 += 500;
        }
    }
    // 2^(−2·exp2) applied in steps to stay clear of intermediate underflow.
    let mut w = 1.0 / sum.value();
    for _ in 0..exp2 / 500 {
        w *= shrink * shrink;
    }
    w
}

/// Rational approximant `−Q_n(z)/P_n(z)` of the Weyl function.
pub fn weyl_approx(params: &JacobiParams, z: Complex64, n: usize) -> Result<Complex64> {
    let e = polys(params, z, n)?;
    let n = e.degree();
    if near_zero(e.p[n], e.p_prime[n], params.exclusion_radius(n)) {
        return Err(Error::pole_at(z));
    }
    Ok(-e.q[n] / e.p[n])
}

/// Polynomial-form interpolation
/// `Σ_j (h − w_n(z))·f(x_j) / ((x_j − z)·w_n'(x_j))`, `w_n = P_n/Q_n`.
///
/// Exact when `n` equals the size of the truncation that produced the
/// samples; for smaller `n` it is the finite stage of a limit.
pub fn jm_reconstruct(
    params: &JacobiParams,
    n: usize,
    samples: &SampleSet,
    z: Complex64,
) -> Result<Complex64> {
    let nodes = samples.nodes();
    let spread = nodes[nodes.len() - 1] - nodes[0];
    crate::herglotz::check_poles(nodes, EXCLUSION_FACTOR * spread.max(1.0), z)?;
    let radius = params.exclusion_radius(n.max(1));
    let at_z = polys(params, z, n)?;
    let deg = at_z.degree();
    if near_zero(at_z.q[deg], at_z.q_prime[deg], radius) {
        return Err(Error::QZero { re: z.re, im: z.im });
    }
    let g = Complex64::new(samples.h(), 0.0) - at_z.w();
    let terms = nodes
        .iter()
        .zip(samples.values())
        .map(|(&x, &v)| {
            let e = polys(params, Complex64::new(x, 0.0), n)?;
            if near_zero(e.q[deg], e.q_prime[deg], radius) {
                return Err(Error::QZero { re: x, im: 0.0 });
            }
            Ok(g * v / ((Complex64::new(x, 0.0) - z) * e.w_prime()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_complex(terms))
}

/// Spectral coordinates, in the `n`-truncation, of a vector given in the
/// site basis `δ_1, δ_2, …`: `φ̂_j = √w_j · Σ_k φ_k P_k(λ_j)`.
pub fn site_state(
    params: &JacobiParams,
    model: &SpectralModel,
    site: &[f64],
) -> Result<StateVector> {
    let n = model.dim();
    if site.len() > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: site.len(),
        });
    }
    let coords = model
        .eigenvalues()
        .iter()
        .zip(model.weights())
        .map(|(&x, &w)| {
            let e = polys(params, Complex64::new(x, 0.0), n.max(2) - 1)?;
            let s = sum_real(site.iter().zip(&e.p).map(|(a, p)| a * p.re));
            Ok(Complex64::new(w.sqrt() * s, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateVector(coords))
}

/// One row of a convergence study: the largest relative discrepancy between
/// `jm_reconstruct` at order `n` and the exact reconstruction over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub discrepancy: f64,
}

/// Samples the `size`-truncation at coupling `h` and compares the order-`n`
/// interpolation series against exact reconstruction for each `n` in `orders`.
pub fn convergence_study(
    params: &JacobiParams,
    size: usize,
    h: f64,
    site: &[f64],
    grid: &[Complex64],
    orders: &[usize],
) -> Result<Vec<StudyRow>> {
    let model = truncate(params, size)?;
    let phi = site_state(params, &model, site)?;
    let samples = sample(&model, &phi, Coupling::Finite(h))?;
    let exact = grid
        .iter()
        .map(|&z| reconstruct(&samples, z))
        .collect::<Result<Vec<_>>>()?;
    orders
        .iter()
        .map(|&n| {
            let mut worst: f64 = 0.0;
            for (&z, &e) in grid.iter().zip(&exact) {
                let d = (jm_reconstruct(params, n, &samples, z)? - e).norm();
                worst = worst.max(if e.norm() > 0.0 { d / e.norm() } else { d });
            }
            Ok(StudyRow {
                n,
                discrepancy: worst,
            })
        })
        .collect()
}
