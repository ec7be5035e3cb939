//! Output helpers shared by the commands.

use std::io::Write;

use anyhow::Result;
use cohpure::linalg::ComplexMatrix;
use serde::Serialize;

/// Row-major `[re, im]` pairs, the same layout as state files.
pub fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// `"inf"` for infinite orders, the shortest decimal form otherwise.
pub fn alpha_label(alpha: f64) -> String {
    if alpha.is_infinite() {
        "inf".into()
    } else {
        alpha.to_string()
    }
}

pub fn emit_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `(k, from, to)` prefix sums of a majorization check.
#[derive(Debug, Serialize)]
pub struct PrefixSum {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn prefix_json(sums: &[(usize, f64, f64)]) -> Vec<PrefixSum> {
    sums.iter().map(|&(k, lhs, rhs)| PrefixSum { k, lhs, rhs }).collect()
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub feasible: bool,
    pub m: u32,
    pub d1: u64,
    pub d2: u64,
    pub prefix_sums: Vec<PrefixSum>,
}

impl From<&cohpure::majorization::ConversionCertificate> for CertificateJson {
    fn from(c: &cohpure::majorization::ConversionCertificate) -> Self {
        CertificateJson { feasible: c.feasible, m: c.m, d1: c.d1, d2: c.d2, prefix_sums: prefix_json(&c.checked_prefix_sums) }
    }
}
