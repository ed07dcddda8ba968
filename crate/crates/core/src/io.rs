//! Model files.
//!
//! A model is a JSON object with `n`, `delta`, and either a dense `beta`
//! matrix or a 1-based `edges` list with optional `beta_diag`:
//!
//! ```json
//! {"n": 2, "delta": [0.5, 0.5], "edges": [{"i": 1, "j": 2, "w": 1.0}]}
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::model::{validate_model, NetworkModel, RawModel};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub delta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_diag: Option<Vec<f64>>,
}

impl ModelFile {
    pub fn into_raw(self) -> Result<RawModel, ModelFileError> {
        let n = self.n;
        let beta = match (self.beta, self.edges) {
            (Some(_), Some(_)) => {
                return Err(ModelFileError::Format(
                    "give either \"beta\" or \"edges\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(ModelFileError::Format(
                    "model needs \"beta\" or \"edges\"".into(),
                ))
            }
            (Some(beta), None) => {
                if self.beta_diag.is_some() {
                    return Err(ModelFileError::Format(
                        "\"beta_diag\" only applies to the \"edges\" form".into(),
                    ));
                }
                beta
            }
            (None, Some(edges)) => dense_from_edges(n, &edges, self.beta_diag.as_deref())?,
        };
        Ok(RawModel {
            n,
            beta,
            delta: self.delta,
        })
    }

    /// Dense form of a validated model.
    pub fn from_model(model: &NetworkModel) -> Self {
        let raw = model.to_raw();
        ModelFile {
            n: raw.n,
            delta: raw.delta,
            beta: Some(raw.beta),
            edges: None,
            beta_diag: None,
        }
    }
}

fn dense_from_edges(
    n: usize,
    edges: &[EdgeSpec],
    diag: Option<&[f64]>,
) -> Result<Vec<Vec<f64>>, ModelFileError> {
    let mut beta = vec![vec![0.0; n]; n];
    let mut seen = vec![vec![false; n]; n];
    for e in edges {
        if e.i == 0 || e.j == 0 || e.i > n || e.j > n {
            return Err(Error::NodeOutOfRange {
                node: if e.i == 0 || e.i > n { e.i } else { e.j },
                n,
            }
            .into());
        }
        let (a, b) = (e.i - 1, e.j - 1);
        if a == b {
            return Err(ModelFileError::Format(format!(
                "edge ({}, {}) is a self-loop; use \"beta_diag\"",
                e.i, e.j
            )));
        }
        if seen[a][b] {
            return Err(Error::DuplicateEdge(e.i, e.j).into());
        }
        seen[a][b] = true;
        seen[b][a] = true;
        beta[a][b] = e.w;
        beta[b][a] = e.w;
    }
    if let Some(diag) = diag {
        if diag.len() != n {
            return Err(Error::Dimension(format!(
                "beta_diag has {} entries, expected {n}",
                diag.len()
            ))
            .into());
        }
        for (k, &w) in diag.iter().enumerate() {
            beta[k][k] = w;
        }
    }
    Ok(beta)
}

pub fn parse_model(json: &str) -> Result<NetworkModel, ModelFileError> {
    let file: ModelFile = serde_json::from_str(json)?;
    Ok(validate_model(&file.into_raw()?)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NetworkModel, ModelFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}
