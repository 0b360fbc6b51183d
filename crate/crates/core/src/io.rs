//! JSON encodings of models, states, sample sets, partial-fraction
//! representations and evaluation grids. Complex numbers are `[re, im]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jacobi::{truncate, JacobiParams};
use crate::model::{MeromorphicRep, SampleSet, SpectralModel, StateVector};
use crate::oscillator::oscillator_model;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error("invalid content")]
    Invalid(#[from] crate::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelFile {
    Explicit {
        eigenvalues: Vec<f64>,
        weights: Vec<f64>,
    },
    Jacobi {
        q: Vec<f64>,
        b: Vec<f64>,
        truncation: usize,
    },
    Oscillator {
        levels: usize,
        #[serde(default)]
        normalized: bool,
    },
}

/// A model file resolved to spectral data.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: SpectralModel,
    /// Jacobi coefficients and truncation size, for `kind = "jacobi"`.
    pub jacobi: Option<(JacobiParams, usize)>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(&self) -> Result<LoadedModel, FormatError> {
        Ok(match self {
            ModelFile::Explicit {
                eigenvalues,
                weights,
            } => LoadedModel {
                model: SpectralModel::new(eigenvalues.clone(), weights.clone())?,
                jacobi: None,
            },
            ModelFile::Jacobi { q, b, truncation } => {
                let params = JacobiParams::new(q.clone(), b.clone())?;
                LoadedModel {
                    model: truncate(&params, *truncation)?,
                    jacobi: Some((params, *truncation)),
                }
            }
            ModelFile::Oscillator { levels, normalized } => LoadedModel {
                model: oscillator_model(*levels, *normalized)?,
                jacobi: None,
            },
        })
    }

    pub fn from_model(model: &SpectralModel) -> Self {
        ModelFile::Explicit {
            eigenvalues: model.eigenvalues().to_vec(),
            weights: model.weights().to_vec(),
        }
    }
}

pub fn parse_model(text: &str) -> Result<LoadedModel, FormatError> {
    ModelFile::parse(text)?.load()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub coords: Vec<Complex64>,
}

impl StateFile {
    pub fn parse(text: &str) -> Result<StateVector, FormatError> {
        let file: StateFile = serde_json::from_str(text)?;
        Ok(StateVector::new(file.coords)?)
    }
}

impl From<&StateVector> for StateFile {
    fn from(s: &StateVector) -> Self {
        StateFile {
            coords: s.coords().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSetFile {
    pub h: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl From<&SampleSet> for SampleSetFile {
    fn from(s: &SampleSet) -> Self {
        SampleSetFile {
            h: s.h(),
            nodes: s.nodes().to_vec(),
            weights: s.node_weights().to_vec(),
            values: s.values().to_vec(),
        }
    }
}

impl SampleSetFile {
    pub fn parse(text: &str) -> Result<SampleSet, FormatError> {
        let f: SampleSetFile = serde_json::from_str(text)?;
        Ok(SampleSet::new(f.h, f.nodes, f.weights, f.values)?)
    }

    pub fn to_json(samples: &SampleSet) -> String {
        serde_json::to_string(&SampleSetFile::from(samples)).expect("finite samples serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    pub c: Complex64,
    pub poles: Vec<f64>,
    pub coeffs: Vec<Complex64>,
}

impl From<&MeromorphicRep> for RepFile {
    fn from(r: &MeromorphicRep) -> Self {
        RepFile {
            c: r.constant(),
            poles: r.poles().to_vec(),
            coeffs: r.coefficients().to_vec(),
        }
    }
}

impl RepFile {
    pub fn parse(text: &str) -> Result<MeromorphicRep, FormatError> {
        let f: RepFile = serde_json::from_str(text)?;
        Ok(MeromorphicRep::new(f.c, f.poles, f.coeffs)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub points: Vec<Complex64>,
}

impl GridFile {
    pub fn parse(text: &str) -> Result<Vec<Complex64>, FormatError> {
        let f: GridFile = serde_json::from_str(text)?;
        if f.points
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(crate::Error::NonFinite.into());
        }
        Ok(f.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_kinds() {
        let m =
            parse_model(r#"{"kind":"explicit","eigenvalues":[0,2],"weights":[0.5,0.5]}"#).unwrap();
        assert_eq!(m.model.eigenvalues(), &[0.0, 2.0]);
        assert!(m.jacobi.is_none());

        let m = parse_model(r#"{"kind":"jacobi","q":[1,2],"b":[1],"truncation":2}"#).unwrap();
        assert_eq!(m.model.dim(), 2);
        assert!(m.jacobi.is_some());

        let m = parse_model(r#"{"kind":"oscillator","levels":3,"normalized":false}"#).unwrap();
        assert_eq!(m.model.weights(), &[1.0, 1.0, 0.5]);
        let m = parse_model(r#"{"kind":"oscillator","levels":3}"#).unwrap();
        assert_eq!(m.model.mu_norm_sq(), 2.5);
    }

    #[test]
    fn malformed_models() {
        assert!(matches!(
            parse_model(r#"{"kind":"jacobi","q":[1,2],"b":[0],"truncation":2}"#),
            Err(FormatError::Invalid(crate::Error::NonPositiveOffDiagonal {
                index: 1
            }))
        ));
        assert!(matches!(
            parse_model(r#"{"kind":"spline"}"#),
            Err(FormatError::Json(_))
        ));
        assert!(matches!(
            parse_model(r#"{"kind":"explicit","eigenvalues":[2,0],"weights":[0.5,0.5]}"#),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn complex_values_are_pairs() {
        let s = StateFile::parse(r#"{"coords":[[1,0],[0,-1.5]]}"#).unwrap();
        assert_eq!(s.coords()[1], Complex64::new(0.0, -1.5));
        let text = serde_json::to_string(&StateFile::from(&s)).unwrap();
        assert_eq!(text, r#"{"coords":[[1.0,0.0],[0.0,-1.5]]}"#);
        assert!(StateFile::parse(r#"{"coords":[1,0]}"#).is_err());
    }

    #[test]
    fn sample_set_json_round_trip() {
        let text =
            r#"{"h":1.0,"nodes":[0.25,2.5],"weights":[0.25,0.75],"values":[[1.0,0.0],[0.5,-2.0]]}"#;
        let s = SampleSetFile::parse(text).unwrap();
        assert_eq!(SampleSetFile::to_json(&s), text);
    }

    #[test]
    fn rep_json() {
        let r = RepFile::parse(r#"{"c":[0.5,0],"poles":[1],"coeffs":[[-0.5,0]]}"#).unwrap();
        assert_eq!(r.poles(), &[1.0]);
        assert!(RepFile::parse(r#"{"c":[0.5,0],"poles":[1,2],"coeffs":[[-0.5,0]]}"#).is_err());
    }
}
