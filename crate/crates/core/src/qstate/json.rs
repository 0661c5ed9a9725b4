//! JSON state files: `{"matrix": [[{"re","im"}; 4]; 4]}` or `{"bloch": {"p", "s", "pi"}}`.

use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{assemble, decompose, BlochDecomposition, ComplexMatrix4, DensityOperator};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochRepr {
    pub p: [f64; 3],
    pub s: [f64; 3],
    pub pi: [[f64; 3]; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRepr {
    Matrix { matrix: [[ComplexEntry; 4]; 4] },
    Bloch { bloch: BlochRepr },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(flatten)]
    pub state: StateRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl StateRepr {
    pub fn from_matrix(m: &ComplexMatrix4) -> Self {
        let matrix = std::array::from_fn(|r| {
            std::array::from_fn(|c| ComplexEntry { re: m[(r, c)].re, im: m[(r, c)].im })
        });
        StateRepr::Matrix { matrix }
    }

    pub fn from_bloch(b: &BlochDecomposition) -> Self {
        StateRepr::Bloch {
            bloch: BlochRepr {
                p: [b.p.x, b.p.y, b.p.z],
                s: [b.s.x, b.s.y, b.s.z],
                pi: std::array::from_fn(|i| std::array::from_fn(|j| b.pi[(i, j)])),
            },
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        match self {
            StateRepr::Matrix { matrix } => {
                let m = Matrix4::from_fn(|r, c| Complex64::new(matrix[r][c].re, matrix[r][c].im));
                DensityOperator::new(m)
            }
            StateRepr::Bloch { bloch } => assemble(&bloch.to_decomposition()),
        }
    }
}

impl BlochRepr {
    pub fn to_decomposition(&self) -> BlochDecomposition {
        BlochDecomposition {
            p: Vector3::from(self.p),
            s: Vector3::from(self.s),
            pi: Matrix3::from_fn(|i, j| self.pi[i][j]),
        }
    }
}

impl From<&DensityOperator> for StateRepr {
    fn from(rho: &DensityOperator) -> Self {
        StateRepr::from_matrix(rho.matrix())
    }
}

impl StateFile {
    pub fn new(rho: &DensityOperator) -> Self {
        Self { state: rho.into(), provenance: None }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        self.state.to_density()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Convenience: Bloch-form file for a state.
pub fn bloch_file(rho: &DensityOperator) -> StateFile {
    StateFile { state: StateRepr::from_bloch(&decompose(rho)), provenance: None }
}
