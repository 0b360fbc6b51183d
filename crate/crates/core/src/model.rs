//! Finite spectral data shared by every other module.
//!
//! A [`SpectralModel`] stands for a self-adjoint operator `A` with simple
//! spectrum `λ_1 < … < λ_N` together with a cyclic vector `μ`, stored through
//! the weights `w_j = |⟨φ_j, μ⟩|²` in the eigenbasis of `A`. Everything else
//! (the Weyl function, the perturbed family, the transform) is derived from
//! these two sequences.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::sum_real;

/// Weights below this are treated as zero: the vector would not be cyclic.
pub const MIN_WEIGHT: f64 = 1e-300;

/// Relative size of the pole- and zero-exclusion disks.
pub const EXCLUSION_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
    mu_norm_sq: f64,
}

pub(crate) fn check_increasing(xs: &[f64]) -> Result<()> {
    for (i, x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::UnsortedEigenvalues { index: i });
        }
        if i > 0 && xs[i - 1] >= *x {
            return Err(Error::UnsortedEigenvalues { index: i });
        }
    }
    Ok(())
}

impl SpectralModel {
    pub fn new(eigenvalues: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: eigenvalues.len(),
                found: weights.len(),
            });
        }
        if eigenvalues.len() < 2 {
            return Err(Error::TooSmall(eigenvalues.len()));
        }
        check_increasing(&eigenvalues)?;
        for (index, &value) in weights.iter().enumerate() {
            // NaN fails the comparison as well.
            if !(value >= MIN_WEIGHT) || !value.is_finite() {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        let mu_norm_sq = sum_real(weights.iter().copied());
        Ok(Self {
            eigenvalues,
            weights,
            mu_norm_sq,
        })
    }

    /// Rescales the weights so that `‖μ‖ = 1`.
    pub fn normalize(&self) -> Self {
        if self.mu_norm_sq == 1.0 {
            return self.clone();
        }
        let scale = self.mu_norm_sq;
        let weights: Vec<f64> = self.weights.iter().map(|w| w / scale).collect();
        let mu_norm_sq = sum_real(weights.iter().copied());
        Self {
            eigenvalues: self.eigenvalues.clone(),
            weights,
            mu_norm_sq,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mu_norm_sq(&self) -> f64 {
        self.mu_norm_sq
    }

    pub fn is_normalized(&self) -> bool {
        (self.mu_norm_sq - 1.0).abs() <= 1e-12
    }

    /// `λ_N − λ_1`.
    pub fn spread(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }

    /// Radius of the disks around eigenvalues and zeros of `F` inside which
    /// evaluation is refused.
    pub fn exclusion_radius(&self) -> f64 {
        EXCLUSION_FACTOR * self.spread().max(1.0)
    }

    /// Coordinates of `μ` in the eigenbasis, `√w_j`.
    pub fn mu_coords(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `μ` as a state vector.
    pub fn mu_state(&self) -> StateVector {
        StateVector(
            self.mu_coords()
                .into_iter()
                .map(|c| Complex64::new(c, 0.0))
                .collect(),
        )
    }
}

/// Coupling constant of `A_h = A + h⟨μ,·⟩μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn finite(h: f64) -> Result<Self> {
        if h.is_finite() {
            Ok(Coupling::Finite(h))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            Coupling::Finite(h) => Some(h),
            Coupling::Infinite => None,
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Finite(h) => write!(f, "{h}"),
            Coupling::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Coupling {
    type Err = String;

    /// Decimal literal or the token `inf`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Coupling::Infinite);
        }
        let h: f64 = s
            .parse()
            .map_err(|_| format!("invalid coupling {s:?}: expected a decimal number or \"inf\""))?;
        if !h.is_finite() {
            return Err(format!("invalid coupling {s:?}: use the token \"inf\""));
        }
        Ok(Coupling::Finite(h))
    }
}

/// A vector expressed in the eigenbasis of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub Vec<Complex64>);

impl StateVector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn from_real(coords: &[f64]) -> Self {
        Self(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_dim(&self, model: &SpectralModel) -> Result<()> {
        if self.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: self.len(),
            });
        }
        Ok(())
    }

    /// `⟨self, other⟩`, anti-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        crate::sum::sum_complex(self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b))
    }

    pub fn norm_sq(&self) -> f64 {
        crate::sum::sum_real(self.0.iter().map(|c| c.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

/// Samples of a function on the spectrum of `A_h`, with the point masses of
/// the spectral measure `m_h`. Self-contained input for reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    h: f64,
    nodes: Vec<f64>,
    node_weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampleSet {
    pub fn new(
        h: f64,
        nodes: Vec<f64>,
        node_weights: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InfiniteCoupling);
        }
        if node_weights.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: node_weights.len(),
            });
        }
        if values.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: values.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::TooSmall(0));
        }
        check_increasing(&nodes)?;
        for (index, &value) in node_weights.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            h,
            nodes,
            node_weights,
            values,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        sum_real(self.node_weights.iter().copied())
    }
}

/// `f(z) = c + Σ_n c_n / (z − x_n)` with poles on the infinite-coupling
/// spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicRep {
    constant: Complex64,
    poles: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl MeromorphicRep {
    pub fn new(constant: Complex64, poles: Vec<f64>, coefficients: Vec<Complex64>) -> Result<Self> {
        if poles.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: poles.len(),
                found: coefficients.len(),
            });
        }
        check_increasing(&poles)?;
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        if !finite(&constant) || !coefficients.iter().all(finite) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            constant,
            poles,
            coefficients,
        })
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_model() {
        let m = SpectralModel::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.mu_norm_sq(), 1.0);
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn stores_unnormalized_norm() {
        let m = SpectralModel::new(vec![1.0, 3.0, 5.0], vec![1.0, 1.0, 0.5]).unwrap();
        assert_eq!(m.mu_norm_sq(), 2.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            SpectralModel::new(vec![2.0, 0.0], vec![0.5, 0.5]),
            Err(Error::UnsortedEigenvalues { index: 1 })
        );
        assert_eq!(
            SpectralModel::new(vec![0.0, 0.0], vec![0.5, 0.5]),
            Err(Error::UnsortedEigenvalues { index: 1 })
        );
        assert!(matches!(
            SpectralModel::new(vec![0.0, 1.0], vec![0.5, 0.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            SpectralModel::new(vec![0.0, 1.0], vec![0.5, 1e-301]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            SpectralModel::new(vec![0.0, 1.0], vec![0.5, f64::NAN]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert_eq!(
            SpectralModel::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.5]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
        assert_eq!(
            SpectralModel::new(vec![0.0], vec![1.0]),
            Err(Error::TooSmall(1))
        );
        assert!(SpectralModel::new(vec![0.0, f64::INFINITY], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let m2 = SpectralModel::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(m2.normalize(), m2);

        let m = SpectralModel::new(vec![1.0, 3.0, 5.0], vec![1.0, 1.0, 0.5]).unwrap();
        let n = m.normalize();
        assert_eq!(n.weights(), &[0.4, 0.4, 0.2]);
        assert_eq!(n.mu_norm_sq(), 1.0);

        let m = SpectralModel::new(vec![0.0, 1.0], vec![2.0, 2.0]).unwrap();
        assert_eq!(m.normalize().weights(), &[0.5, 0.5]);
    }

    #[test]
    fn coupling_grammar() {
        assert_eq!("inf".parse::<Coupling>(), Ok(Coupling::Infinite));
        assert_eq!("-1.5".parse::<Coupling>(), Ok(Coupling::Finite(-1.5)));
        assert_eq!("1e3".parse::<Coupling>(), Ok(Coupling::Finite(1000.0)));
        assert!("NaN".parse::<Coupling>().is_err());
        assert!("infinity".parse::<Coupling>().is_err());
        assert!("abc".parse::<Coupling>().is_err());
    }

    #[test]
    fn sample_set_validation() {
        let ok = SampleSet::new(
            1.0,
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![Complex64::new(1.0, 0.0); 2],
        );
        assert!(ok.is_ok());
        assert!(SampleSet::new(
            1.0,
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![Complex64::new(1.0, 0.0); 2]
        )
        .is_err());
        assert!(SampleSet::new(
            1.0,
            vec![0.0, 1.0],
            vec![0.5, -0.5],
            vec![Complex64::new(1.0, 0.0); 2]
        )
        .is_err());
        assert!(SampleSet::new(
            f64::INFINITY,
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![Complex64::new(1.0, 0.0); 2]
        )
        .is_err());
    }
}
