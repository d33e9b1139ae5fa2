//! JSON file formats. Complex matrices are stored as separate row-major real
//! and imaginary arrays; values round-trip bit-exactly.

use std::fs;
use std::path::Path;

use qmcap_core::covariant::UcmSpec;
use qmcap_core::encode::Ensemble;
use qmcap_core::measure::Measurement;
use qmcap_core::{ComplexMatrix, DensityOperator, ProbVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(#[from] qmcap_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            re: m.real_part(),
            im: m.imag_part(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        Ok(ComplexMatrix::from_parts(&self.re, &self.im)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub dim: usize,
    pub operators: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl MeasurementJson {
    pub fn from_measurement(m: &Measurement) -> Self {
        Self {
            dim: m.dim(),
            operators: m.operators().iter().map(MatrixJson::from_matrix).collect(),
            labels: Some(m.labels().to_vec()),
        }
    }

    /// Shape-checked only; completeness is left to the caller.
    pub fn to_measurement(&self) -> Result<Measurement, IoError> {
        let ops = self
            .operators
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(op) = ops.iter().find(|o| o.dim() != self.dim) {
            return Err(qmcap_core::Error::DimMismatch {
                expected: self.dim,
                got: op.dim(),
            }
            .into());
        }
        Ok(Measurement::unchecked(ops, self.labels.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub priors: Vec<f64>,
    pub states: Vec<MatrixJson>,
}

impl EnsembleJson {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            priors: e.priors().values().to_vec(),
            states: e.states().iter().map(|s| MatrixJson::from_matrix(s.matrix())).collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<Ensemble, IoError> {
        let states = self
            .states
            .iter()
            .map(|m| Ok(DensityOperator::new(m.to_matrix()?)?))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Ensemble::new(ProbVector::new(self.priors.clone())?, states)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    #[serde(rename = "E")]
    pub effect: MatrixJson,
    pub p: f64,
}

/// Weighted generator effects; used for covariant measurements and for
/// permutation-symmetric generator lists alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentsJson {
    pub dim: usize,
    pub components: Vec<ComponentJson>,
}

impl ComponentsJson {
    pub fn from_pairs(dim: usize, pairs: &[(ComplexMatrix, f64)]) -> Self {
        Self {
            dim,
            components: pairs
                .iter()
                .map(|(e, p)| ComponentJson {
                    effect: MatrixJson::from_matrix(e),
                    p: *p,
                })
                .collect(),
        }
    }

    pub fn to_pairs(&self) -> Result<Vec<(ComplexMatrix, f64)>, IoError> {
        self.components
            .iter()
            .map(|c| {
                let m = c.effect.to_matrix()?;
                if m.dim() != self.dim {
                    return Err(qmcap_core::Error::DimMismatch {
                        expected: self.dim,
                        got: m.dim(),
                    }
                    .into());
                }
                Ok((m, c.p))
            })
            .collect()
    }

    pub fn to_ucm(&self) -> Result<UcmSpec, IoError> {
        Ok(UcmSpec::new(self.to_pairs()?)?)
    }
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: name.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse { path: name, source })
}

pub fn load_measurement(path: &Path) -> Result<Measurement, IoError> {
    read::<MeasurementJson>(path)?.to_measurement()
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble, IoError> {
    read::<EnsembleJson>(path)?.to_ensemble()
}

pub fn load_state(path: &Path) -> Result<DensityOperator, IoError> {
    Ok(DensityOperator::new(read::<MatrixJson>(path)?.to_matrix()?)?)
}

pub fn load_components(path: &Path) -> Result<ComponentsJson, IoError> {
    read(path)
}

/// Parses "0.75,0.25" style lists.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect()
}
