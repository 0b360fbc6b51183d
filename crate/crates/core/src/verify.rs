//! Seeded invariant suite run against one model.
//!
//! Each group draws its random inputs from a generator seeded by the caller,
//! so a report is reproducible byte for byte.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exec::{map_range, Exec};
use crate::herglotz::{weyl, weyl_h, weyl_raw};
use crate::jacobi::{truncate, weyl_approx, JacobiParams};
use crate::model::{Coupling, SpectralModel, StateVector};
use crate::perturbation::{
    compression_spectrum, perturbed_spectrum, secular_residual, zeros_of_weyl,
};
use crate::sampling::{
    apply_perturbed, evaluate_rep, from_partial_fractions, inner_h, kramer_reconstruct, mu_inner,
    reconstruct, rep_norm_sq, sample, to_partial_fractions, transform,
};

pub mod tol {
    pub const SECULAR: f64 = 1e-10;
    pub const RECONSTRUCTION: f64 = 1e-9;
    pub const KRAMER: f64 = 1e-9;
    pub const PARSEVAL: f64 = 1e-10;
    pub const PARTIAL_FRACTIONS: f64 = 1e-10;
    pub const QUASI_MULTIPLICATION: f64 = 1e-9;
    pub const COMPRESSION: f64 = 1e-9;
    pub const JACOBI_RATIONAL: f64 = 1e-8;
    pub const JACOBI_REMOVED_ROW: f64 = 1e-8;
}

/// Minimum distance of test points from nodes and poles.
pub const TEST_POINT_CLEARANCE: f64 = 0.1;

/// Random inputs for property checks.
pub mod gen {
    use super::*;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Normalized model with `2 ≤ N ≤ max_n`, eigenvalues spread over at most
    /// `max_spread` with gaps of at least `max_spread / (20 N)`.
    pub fn model(rng: &mut impl Rng, max_n: usize, max_spread: f64) -> SpectralModel {
        let n = rng.gen_range(2..=max_n);
        let spread = rng.gen_range(0.2 * max_spread..=max_spread);
        let min_gap = spread / (20.0 * n as f64);
        let offset = rng.gen_range(-0.5 * spread..0.5 * spread);
        loop {
            let mut ev: Vec<f64> = (0..n)
                .map(|_| offset + rng.gen_range(-0.5 * spread..0.5 * spread))
                .collect();
            ev.sort_by(f64::total_cmp);
            if ev.windows(2).all(|p| p[1] - p[0] >= min_gap) {
                let w = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                return SpectralModel::new(ev, w)
                    .expect("generated model is valid")
                    .normalize();
            }
        }
    }

    pub fn state(rng: &mut impl Rng, n: usize) -> StateVector {
        StateVector(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    /// Nonzero coupling scaled to the model: `|h|·‖μ‖²` between 0.05 and 5
    /// times the eigenvalue spread.
    pub fn coupling(rng: &mut impl Rng, model: &SpectralModel) -> f64 {
        let scale = model.spread().max(1.0) / model.mu_norm_sq();
        let mag = 10f64.powf(rng.gen_range(-1.3..0.7)) * scale;
        if rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        }
    }

    /// Test points at least `clearance` away from every real point in
    /// `avoid`; about a quarter of them lie on the real axis.
    pub fn test_points(
        rng: &mut impl Rng,
        avoid: &[f64],
        count: usize,
        clearance: f64,
    ) -> Vec<Complex64> {
        let lo = avoid.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
        let hi = avoid.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
        let height = (hi - lo).max(1.0);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = rng.gen_range(lo..hi);
            let y = if rng.gen_bool(0.25) {
                0.0
            } else {
                let y = rng.gen_range(clearance..0.5 * height);
                if rng.gen_bool(0.5) {
                    y
                } else {
                    -y
                }
            };
            let z = Complex64::new(x, y);
            if avoid
                .iter()
                .all(|&p| (z - Complex64::new(p, 0.0)).norm() >= clearance)
            {
                out.push(z);
            }
        }
        out
    }

    pub fn jacobi_params(rng: &mut impl Rng, n: usize) -> JacobiParams {
        let q = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let b = (0..n).map(|_| rng.gen_range(0.3..2.0)).collect();
        JacobiParams::new(q, b).expect("positive off-diagonal")
    }
}

/// `|a − b| / |b|`, or the absolute error when `b = 0`.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 0.0 {
        d / b.norm()
    } else {
        d
    }
}

/// True when the two sorted lists strictly alternate once merged.
pub fn strictly_interlace(a: &[f64], b: &[f64]) -> bool {
    let mut merged: Vec<(f64, u8)> = a
        .iter()
        .map(|&x| (x, 0))
        .chain(b.iter().map(|&x| (x, 1)))
        .collect();
    merged.sort_by(|p, q| p.0.total_cmp(&q.0));
    merged
        .windows(2)
        .all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0)
}

/// Tolerance for `|F(x)|` at a computed zero: `1e−12·max w / min gap`.
pub fn zero_tolerance(model: &SpectralModel) -> f64 {
    let wmax = model.weights().iter().copied().fold(0.0, f64::max);
    let gap = model
        .eigenvalues()
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(f64::INFINITY, f64::min);
    1e-12 * wmax / gap
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error (or violation count for combinatorial checks).
    pub worst: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    fn bound(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Check {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
            note: String::new(),
        }
    }

    fn failed(name: &'static str, note: String) -> Self {
        Check {
            name,
            passed: false,
            worst: f64::INFINITY,
            tolerance: 0.0,
            note,
        }
    }

    fn from_result(name: &'static str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(worst) => Check::bound(name, worst, tolerance),
            Err(e) => Check::failed(name, e.to_string()),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<26} worst={:.3e} tol={:.1e}",
            self.name, self.worst, self.tolerance
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Spectra of random coupling pairs strictly interlace, and the infinite
/// coupling interlaces with `A`. Returns the number of violations.
pub fn interlacing_violations(model: &SpectralModel, couplings: &[(f64, f64)]) -> Result<usize> {
    let mut bad = 0;
    for &(h1, h2) in couplings {
        let a = perturbed_spectrum(model, Coupling::Finite(h1))?;
        let b = perturbed_spectrum(model, Coupling::Finite(h2))?;
        if !strictly_interlace(&a, &b) {
            bad += 1;
        }
        // Monotone in the coupling.
        let (lo, hi) = if h1 < h2 { (&a, &b) } else { (&b, &a) };
        if lo.iter().zip(hi.iter()).any(|(x, y)| x > y) {
            bad += 1;
        }
    }
    let inf = zeros_of_weyl(model)?;
    if !strictly_interlace(model.eigenvalues(), &inf) {
        bad += 1;
    }
    Ok(bad)
}

/// Worst secular residual relative to its tolerance (≤ 1 passes), together
/// with the floor set by rounding the roots to doubles: `ε·|x|·|hF'(x)|`
/// (or `ε·|x|·|F'(x)|`) on the same scale. A ratio near the floor means the
/// roots are as accurate as double precision allows.
pub fn secular_ratio(model: &SpectralModel, couplings: &[f64]) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut floor: f64 = 0.0;
    for &h in couplings {
        for x in perturbed_spectrum(model, Coupling::Finite(h))? {
            worst = worst.max(secular_residual(model, h, x) / tol::SECULAR);
            let fp = weyl_raw(model, Complex64::new(x, 0.0)).f_prime.re;
            floor = floor.max(f64::EPSILON * x.abs() * (h * fp).abs() / tol::SECULAR);
        }
    }
    let ztol = zero_tolerance(model);
    for x in zeros_of_weyl(model)? {
        let w = weyl_raw(model, Complex64::new(x, 0.0));
        worst = worst.max(w.f.norm() / ztol);
        floor = floor.max(f64::EPSILON * x.abs() * w.f_prime.norm() / ztol);
    }
    Ok((worst, floor))
}

/// Worst relative error of Lagrange reconstruction against the transform,
/// and of the Kramer series against Lagrange.
pub fn reconstruction_errors(
    model: &SpectralModel,
    phi: &StateVector,
    h: f64,
    points: &[Complex64],
) -> Result<(f64, f64)> {
    let samples = sample(model, phi, Coupling::Finite(h))?;
    let mut lagrange: f64 = 0.0;
    let mut kramer: f64 = 0.0;
    for &z in points {
        let direct = transform(model, phi, z)?;
        let r = reconstruct(&samples, z)?;
        let k = kramer_reconstruct(model, &samples, z)?;
        lagrange = lagrange.max(rel_err(r, direct));
        kramer = kramer.max(rel_err(k, r));
    }
    Ok((lagrange, kramer))
}

/// `|inner_h − ⟨φ, ψ⟩| / (‖φ‖‖ψ‖)`.
pub fn parseval_error(
    model: &SpectralModel,
    h: f64,
    phi: &StateVector,
    psi: &StateVector,
) -> Result<f64> {
    let lhs = inner_h(model, h, phi, psi)?;
    let rhs = phi.inner(psi);
    Ok((lhs - rhs).norm() / (phi.norm() * psi.norm()))
}

/// Round trip, norm identity, `Φ_μ μ ≡ 1` and `Φ_μ ω(x_n) = 1/(z − x_n)` on a
/// normalized model.
pub fn partial_fraction_error(
    model: &SpectralModel,
    phi: &StateVector,
    points: &[Complex64],
) -> Result<f64> {
    let rep = to_partial_fractions(model, phi)?;
    let back = from_partial_fractions(model, &rep)?;
    let scale = phi.norm();
    let mut worst = max_of(
        back.coords()
            .iter()
            .zip(phi.coords())
            .map(|(a, b)| (a - b).norm() / scale),
    );
    worst = worst.max((rep_norm_sq(model, &rep) - phi.norm_sq()).abs() / phi.norm_sq());
    let mu = model.mu_state();
    for &z in points {
        let direct = transform(model, phi, z)?;
        worst = worst.max(rel_err(evaluate_rep(&rep, z)?, direct));
        worst = worst.max((transform(model, &mu, z)? - 1.0).norm());
        for &x in rep.poles() {
            let w = crate::perturbation::omega(model, x);
            let expected = (z - x).inv();
            worst = worst.max(rel_err(transform(model, &w, z)?, expected));
        }
    }
    Ok(worst)
}

/// `Φ(A_h φ)(z) = G_h(z)·⟨μ, φ⟩ + z·Φφ(z)`.
pub fn quasi_multiplication_error(
    model: &SpectralModel,
    h: f64,
    phi: &StateVector,
    z: Complex64,
) -> Result<f64> {
    let lhs = transform(model, &apply_perturbed(model, h, phi)?, z)?;
    let g = weyl_h(model, h, z)?.g_h;
    let rhs = g * mu_inner(model, phi) + z * transform(model, phi, z)?;
    // Scale by the size of the two terms so cancellation does not count.
    let scale = (g * mu_inner(model, phi)).norm() + (z * transform(model, phi, z)?).norm();
    Ok((lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE))
}

/// Zeros of `F` against the compression eigenvalues, per entry.
pub fn compression_gap(model: &SpectralModel) -> Result<f64> {
    let zeros = zeros_of_weyl(model)?;
    let comp = compression_spectrum(model);
    Ok(max_of(zeros.iter().zip(&comp).map(|(a, b)| (a - b).abs())))
}

/// Removed first row and column: compression spectrum of the `n`-truncation
/// against the `(n−1)`-truncation of the shifted coefficients.
pub fn removed_row_gap(params: &JacobiParams, n: usize) -> Result<f64> {
    let model = truncate(params, n)?;
    let shifted = params.drop_first()?;
    let comp = compression_spectrum(&model);
    let zeros = zeros_of_weyl(&model)?;
    let inner = if n > 2 {
        truncate(&shifted, n - 1)?.eigenvalues().to_vec()
    } else {
        vec![shifted.q()[0]]
    };
    Ok(max_of(
        comp.iter()
            .zip(&inner)
            .zip(&zeros)
            .map(|((a, b), c)| (a - b).abs().max((c - b).abs())),
    ))
}

fn seed_for(seed: u64, group: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (group << 32) ^ trial
}

/// Runs all invariant groups for `model`, plus the Jacobi-specific ones when
/// coefficients are supplied.
pub fn verify(model: &SpectralModel, jacobi: Option<&(JacobiParams, usize)>, seed: u64) -> Report {
    verify_with(model, jacobi, seed, Exec::default())
}

pub fn verify_with(
    model: &SpectralModel,
    jacobi: Option<&(JacobiParams, usize)>,
    seed: u64,
    exec: Exec,
) -> Report {
    const TRIALS: usize = 5;
    const POINTS: usize = 20;
    let n = model.dim();
    let mut rng = gen::rng(seed_for(seed, 0, 0));
    let couplings: Vec<f64> = (0..TRIALS)
        .map(|_| gen::coupling(&mut rng, model))
        .collect();
    let pairs: Vec<(f64, f64)> = (0..TRIALS)
        .map(|_| {
            (
                gen::coupling(&mut rng, model),
                gen::coupling(&mut rng, model),
            )
        })
        .filter(|(a, b)| a != b)
        .collect();

    let mut checks = Vec::new();

    checks.push(match interlacing_violations(model, &pairs) {
        Ok(v) => Check::bound("interlacing", v as f64, 0.0),
        Err(e) => Check::failed("interlacing", e.to_string()),
    });
    let secular = match secular_ratio(model, &couplings) {
        Ok((worst, floor)) => {
            let mut c = Check::bound("secular residuals", worst, 1.0);
            c.note = format!("ratio to per-root tolerance; rounding floor {floor:.1e}");
            c
        }
        Err(e) => Check::failed("secular residuals", e.to_string()),
    };
    checks.push(secular);

    let recon = map_range(exec, TRIALS, |t| -> Result<(f64, f64)> {
        let mut rng = gen::rng(seed_for(seed, 1, t as u64));
        let phi = gen::state(&mut rng, n);
        let h = couplings[t];
        let mut avoid = perturbed_spectrum(model, Coupling::Finite(h))?;
        avoid.extend(zeros_of_weyl(model)?);
        avoid.extend_from_slice(model.eigenvalues());
        let points = gen::test_points(&mut rng, &avoid, POINTS, TEST_POINT_CLEARANCE);
        reconstruction_errors(model, &phi, h, &points)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>();
    match recon {
        Ok(v) => {
            checks.push(Check::bound(
                "reconstruction",
                max_of(v.iter().map(|p| p.0)),
                tol::RECONSTRUCTION,
            ));
            checks.push(Check::bound(
                "kramer agreement",
                max_of(v.iter().map(|p| p.1)),
                tol::KRAMER,
            ));
        }
        Err(e) => {
            checks.push(Check::failed("reconstruction", e.to_string()));
            checks.push(Check::failed("kramer agreement", e.to_string()));
        }
    }

    let parseval = (0..TRIALS)
        .map(|t| {
            let mut rng = gen::rng(seed_for(seed, 2, t as u64));
            let phi = gen::state(&mut rng, n);
            let psi = gen::state(&mut rng, n);
            parseval_error(model, couplings[t], &phi, &psi)
        })
        .collect::<Result<Vec<_>>>()
        .map(max_of);
    checks.push(Check::from_result("parseval", tol::PARSEVAL, parseval));

    let normalized = model.normalize();
    let pf = (0..TRIALS)
        .map(|t| {
            let mut rng = gen::rng(seed_for(seed, 3, t as u64));
            let phi = gen::state(&mut rng, n);
            let mut avoid = zeros_of_weyl(&normalized)?;
            avoid.extend_from_slice(normalized.eigenvalues());
            let points = gen::test_points(&mut rng, &avoid, POINTS, TEST_POINT_CLEARANCE);
            partial_fraction_error(&normalized, &phi, &points)
        })
        .collect::<Result<Vec<_>>>()
        .map(max_of);
    checks.push(Check::from_result(
        "partial fractions",
        tol::PARTIAL_FRACTIONS,
        pf,
    ));

    let qm = (0..TRIALS)
        .map(|t| {
            let mut rng = gen::rng(seed_for(seed, 4, t as u64));
            let phi = gen::state(&mut rng, n);
            let mut avoid = zeros_of_weyl(model)?;
            avoid.extend_from_slice(model.eigenvalues());
            let points = gen::test_points(&mut rng, &avoid, POINTS, TEST_POINT_CLEARANCE);
            let errs = points
                .iter()
                .map(|&z| quasi_multiplication_error(model, couplings[t], &phi, z))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(errs))
        })
        .collect::<Result<Vec<_>>>()
        .map(max_of);
    checks.push(Check::from_result(
        "quasi-multiplication",
        tol::QUASI_MULTIPLICATION,
        qm,
    ));

    checks.push(Check::from_result(
        "compression/zeros",
        tol::COMPRESSION,
        compression_gap(model),
    ));

    if let Some((params, size)) = jacobi {
        let mut rng = gen::rng(seed_for(seed, 5, 0));
        let rational = (|| -> Result<f64> {
            let mut worst: f64 = 0.0;
            let mut avoid = model.eigenvalues().to_vec();
            avoid.extend(zeros_of_weyl(model)?);
            for z in gen::test_points(&mut rng, &avoid, POINTS, TEST_POINT_CLEARANCE) {
                let a = weyl_approx(params, z, *size)?;
                let b = weyl(model, z)?.f;
                worst = worst.max(rel_err(a, b));
            }
            Ok(worst)
        })();
        checks.push(Check::from_result(
            "jacobi rational identity",
            tol::JACOBI_RATIONAL,
            rational,
        ));
        checks.push(Check::from_result(
            "jacobi removed row",
            tol::JACOBI_REMOVED_ROW,
            removed_row_gap(params, *size),
        ));
    }

    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interlace_helper() {
        assert!(strictly_interlace(&[0.0, 2.0], &[1.0, 3.0]));
        assert!(strictly_interlace(&[0.0, 2.0], &[1.0]));
        assert!(!strictly_interlace(&[0.0, 1.0], &[2.0, 3.0]));
        assert!(!strictly_interlace(&[0.0, 2.0], &[2.0, 3.0]));
    }

    #[test]
    fn reference_model_passes() {
        let m2 = SpectralModel::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        let report = verify(&m2, None, 42);
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn deterministic_across_strategies() {
        let mut rng = gen::rng(3);
        let m = gen::model(&mut rng, 10, 50.0);
        let a = verify_with(&m, None, 9, Exec::Sequential);
        let b = verify_with(&m, None, 9, Exec::Parallel);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }
}
