//! Bipartite tensor structure. Subsystem A is the most significant factor:
//! composite index `i_A * d_B + i_B`.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Local dimensions `(d_A, d_B)` of a bipartite system.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Dims(pub usize, pub usize);

impl Dims {
    pub fn total(self) -> usize {
        self.0 * self.1
    }

    pub(crate) fn check(self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if self.total() != m.rows() {
            return Err(Error::DimensionMismatch { expected: self.total(), found: m.rows() });
        }
        Ok(())
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Reduced operator on `keep`, tracing out the other factor.
pub fn partial_trace(rho: &ComplexMatrix, keep: Subsystem, dims: Dims) -> Result<ComplexMatrix> {
    dims.check(rho)?;
    let Dims(da, db) = dims;
    Ok(match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    out[(i, j)] = (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum();
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for k in 0..db {
                for l in 0..db {
                    out[(k, l)] = (0..da).map(|i| rho[(i * db + k, i * db + l)]).sum();
                }
            }
            out
        }
    })
}

/// Transpose on subsystem `sub` only.
pub fn partial_transpose(rho: &ComplexMatrix, sub: Subsystem, dims: Dims) -> Result<ComplexMatrix> {
    dims.check(rho)?;
    let Dims(da, db) = dims;
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    let (r, c) = match sub {
                        Subsystem::A => (j * db + k, i * db + l),
                        Subsystem::B => (i * db + l, j * db + k),
                    };
                    out[(r, c)] = rho[(i * db + k, j * db + l)];
                }
            }
        }
    }
    Ok(out)
}
