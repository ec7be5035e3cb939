//! JSON state files: a row-major matrix of `[re, im]` pairs plus metadata.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cohpure::linalg::ComplexMatrix;
use cohpure::states::validate;
use cohpure::{DensityMatrix, Dims};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub schema_version: String,
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Subsystem dimensions for bipartite commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, label: Option<String>, dims: Option<Dims>) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        StateFile {
            schema_version: SCHEMA_VERSION.into(),
            dim: rho.dim(),
            matrix,
            label,
            dims: dims.map(|Dims(a, b)| [a, b]),
        }
    }

    /// Checks the schema and validates the matrix as a density matrix.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version '{}', expected '{SCHEMA_VERSION}'", self.schema_version);
        }
        if self.matrix.len() != self.dim {
            bail!("dim is {} but the matrix has {} rows", self.dim, self.matrix.len());
        }
        if let Some((i, row)) = self.matrix.iter().enumerate().find(|(_, r)| r.len() != self.dim) {
            bail!("row {i} has {} entries, expected {}", row.len(), self.dim);
        }
        if let Some([a, b]) = self.dims {
            if a * b != self.dim {
                bail!("dims {a}x{b} do not multiply to dim {}", self.dim);
            }
        }
        let rows: Vec<Vec<C64>> =
            self.matrix.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
        let m = ComplexMatrix::from_rows(&rows).context("malformed matrix")?;
        validate(&m).context("not a valid density matrix")
    }

    pub fn bipartite_dims(&self) -> Option<Dims> {
        self.dims.map(|[a, b]| Dims(a, b))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a state file", path.display()))
    }

    pub fn load(path: &Path) -> Result<(Self, DensityMatrix)> {
        let file = Self::read(path)?;
        let rho = file.to_state().with_context(|| format!("invalid state in {}", path.display()))?;
        Ok((file, rho))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cohpure::linalg::RandomStream;
    use cohpure::states::random_density;

    #[test]
    fn round_trip_is_bit_identical() {
        let mut rng = RandomStream::new(1);
        for d in 2..6 {
            let rho = random_density(d, d, &mut rng).unwrap();
            let f = StateFile::from_state(&rho, Some("x".into()), None);
            let text = serde_json::to_string(&f).unwrap();
            let back: StateFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_state().unwrap().matrix(), rho.matrix());
        }
    }

    #[test]
    fn rejects_bad_files() {
        let rho = cohpure::states::maximally_mixed(2);
        let mut f = StateFile::from_state(&rho, None, None);
        f.matrix[0][1] = [0.3, 0.0];
        assert!(f.to_state().unwrap_err().root_cause().to_string().contains("hermiticity"));
        let mut f = StateFile::from_state(&rho, None, None);
        f.dim = 3;
        assert!(f.to_state().is_err());
        let mut f = StateFile::from_state(&rho, None, Some(Dims(2, 2)));
        assert!(f.to_state().is_err());
        f.dims = None;
        f.schema_version = "0".into();
        assert!(f.to_state().is_err());
    }
}
