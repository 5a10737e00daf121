//! JSON scenarios describing an increasing chain of effects and its limit.
//!
//! ```json
//! {"dim": 1, "matrices": {"a": [[[0.5, 0]]], "p": [[[1, 0]]]}, "chain": ["a", "p"], "limit": "p"}
//! ```
//!
//! Entries are `[re, im]` pairs, rows in order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::l2::SqueezeFamily;
use crate::numerics::{Effect, HermitianMatrix, Matrix, NumericsError, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dim: usize,
    pub matrices: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    pub chain: Vec<String>,
    pub limit: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON: {0}")]
    Json(String),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("matrix `{name}` is not {dim} x {dim}")]
    Shape { name: String, dim: usize },
    #[error("unknown matrix `{0}`")]
    UnknownMatrix(String),
    #[error("chain is empty")]
    EmptyChain,
    #[error("matrix `{name}`: {source}")]
    Matrix { name: String, source: NumericsError },
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))
    }

    pub fn matrix(&self, name: &str) -> Result<Matrix, ScenarioError> {
        let rows = self.matrices.get(name).ok_or_else(|| ScenarioError::UnknownMatrix(name.to_string()))?;
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return Err(ScenarioError::Shape { name: name.to_string(), dim: self.dim });
        }
        let rows = rows.iter().map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
        Matrix::from_rows(rows).map_err(|source| ScenarioError::Matrix { name: name.to_string(), source })
    }

    pub fn effect(&self, name: &str, tol: &Tolerances) -> Result<Effect, ScenarioError> {
        let wrap = |source| ScenarioError::Matrix { name: name.to_string(), source };
        let h = HermitianMatrix::new(self.matrix(name)?, tol).map_err(wrap)?;
        Effect::new(h, tol).map_err(wrap)
    }

    /// Checks every matrix and builds the chain family.
    pub fn to_family(&self, name: impl Into<String>, tol: &Tolerances) -> Result<SqueezeFamily, ScenarioError> {
        if self.dim == 0 {
            return Err(ScenarioError::ZeroDimension);
        }
        if self.chain.is_empty() {
            return Err(ScenarioError::EmptyChain);
        }
        for m in self.matrices.keys() {
            self.effect(m, tol)?;
        }
        let chain = self.chain.iter().map(|c| self.effect(c, tol)).collect::<Result<Vec<_>, _>>()?;
        let limit = self.effect(&self.limit, tol)?;
        Ok(SqueezeFamily::from_chain(name, chain, limit))
    }
}
