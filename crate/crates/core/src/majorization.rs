//! Majorization order, unital convertibility and single-shot purity
//! distillation and cost.
//!
//! Conversions embed the state with ancillas: distilling `m` pure qubits
//! checks `rho (x) 1/d2 > psi^(x)m (x) 1/d1` and forming the state from `m`
//! pure qubits checks `psi^(x)m (x) 1/d1 > rho (x) 1/d2`, always with
//! `d * d2 = 2^m * d1`.

use crate::error::{Error, Result};
use crate::states::{DensityMatrix, TRACE_TOL};

/// Slack on every prefix-sum comparison.
pub const PREFIX_SLACK: f64 = 1e-12;
/// Default cap on `d1 * d2` for the exhaustive ancilla scan.
pub const SCAN_CAP: u64 = 1 << 20;

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty list".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -1e-10) {
        return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDistribution(format!("sum is {total}, expected 1")));
    }
    Ok(())
}

fn sorted_desc(p: &[f64], len: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(len, 0.0);
    v
}

/// Prefix sums `(k, sum_{i<=k} p_i, sum_{i<=k} q_i)` of the descending,
/// zero-padded vectors, `k` counted from 1.
pub fn prefix_sums(p: &[f64], q: &[f64]) -> Vec<(usize, f64, f64)> {
    let n = p.len().max(q.len());
    let (p, q) = (sorted_desc(p, n), sorted_desc(q, n));
    let (mut a, mut b) = (0.0, 0.0);
    (0..n)
        .map(|k| {
            a += p[k];
            b += q[k];
            (k + 1, a, b)
        })
        .collect()
}

/// `p > q`: every descending prefix sum of `p` dominates that of `q`.
pub fn majorizes(p: &[f64], q: &[f64]) -> Result<bool> {
    check_distribution(p)?;
    check_distribution(q)?;
    Ok(prefix_sums(p, q).iter().all(|&(_, a, b)| a >= b - PREFIX_SLACK))
}

/// Whether a unital channel maps `rho` to `sigma`.
pub fn convertible_unital(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<bool> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    majorizes(rho.spectrum().values(), sigma.spectrum().values())
}

/// Eigenvalues above the numeric-rank threshold, renormalized.
fn effective_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    let s = rho.spectrum().support();
    let total: f64 = s.iter().sum();
    s.iter().map(|x| x / total).collect()
}

/// Largest `m` with `2^m * r <= d`, i.e. `floor(log2(d/r))` when that is
/// at least one and 0 otherwise.
pub fn distillable_purity_1shot(rho: &DensityMatrix) -> u32 {
    let (d, r) = (rho.dim() as u64, rho.spectrum().rank() as u64);
    let mut m = 0;
    while (r << (m + 1)) <= d {
        m += 1;
    }
    m
}

/// `ceil(log2(d * lambda_max))`, never negative.
pub fn purity_cost_1shot(rho: &DensityMatrix) -> u32 {
    let x = rho.dim() as f64 * rho.spectrum().max();
    let m = (x.log2() - PREFIX_SLACK).ceil();
    if m <= 0.0 {
        0
    } else {
        m as u32
    }
}

/// Outcome of a single conversion check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConversionCertificate {
    pub feasible: bool,
    pub m: u32,
    pub d1: u64,
    pub d2: u64,
    /// `(k, lhs, rhs)`; the conversion needs `lhs >= rhs` at every `k`.
    pub checked_prefix_sums: Vec<(usize, f64, f64)>,
}

fn uniform_padded(d1: usize, len: usize) -> Vec<f64> {
    let mut v = vec![1.0 / d1 as f64; d1];
    v.resize(len, 0.0);
    v
}

fn diluted(p: &[f64], d2: usize) -> Vec<f64> {
    p.iter().flat_map(|&x| std::iter::repeat_n(x / d2 as f64, d2)).collect()
}

/// Explicit distillation check with `d1 = d`, `d2 = 2^m`.
pub fn brute_force_distill(rho: &DensityMatrix, m: u32) -> ConversionCertificate {
    let d = rho.dim();
    let d2 = 1usize << m;
    let lhs = diluted(&effective_spectrum(rho), d2);
    let rhs = uniform_padded(d, d * d2);
    let sums = prefix_sums(&lhs, &rhs);
    let feasible = sums.iter().all(|&(_, a, b)| a >= b - PREFIX_SLACK);
    ConversionCertificate { feasible, m, d1: d as u64, d2: d2 as u64, checked_prefix_sums: sums }
}

/// Cost check with `d1 = d`, `d2 = 2^m`: feasible iff `lambda_max / d2 <= 1/d1`.
/// The full majorization check is recorded alongside and must agree.
pub fn brute_force_cost(rho: &DensityMatrix, m: u32) -> ConversionCertificate {
    let d = rho.dim();
    let d2 = 1usize << m;
    let lam_max = rho.spectrum().max();
    let feasible = lam_max * d as f64 <= d2 as f64 * (1.0 + PREFIX_SLACK);
    let lhs = uniform_padded(d, d * d2);
    let rhs = diluted(&effective_spectrum(rho), d2);
    let sums = prefix_sums(&lhs, &rhs);
    ConversionCertificate { feasible, m, d1: d as u64, d2: d2 as u64, checked_prefix_sums: sums }
}

impl ConversionCertificate {
    /// Whether the recorded prefix sums alone certify the conversion.
    pub fn prefix_sums_hold(&self) -> bool {
        self.checked_prefix_sums.iter().all(|&(_, a, b)| a >= b - PREFIX_SLACK)
    }
}

/// Descending run-length encoded distribution: `(value, multiplicity)`.
type Blocks = Vec<(f64, u64)>;

fn prefix_at(blocks: &[(f64, u64)], k: u64) -> f64 {
    let mut left = k;
    let mut s = 0.0;
    for &(v, n) in blocks {
        let take = left.min(n);
        s += v * take as f64;
        left -= take;
        if left == 0 {
            break;
        }
    }
    s
}

/// Majorization of run-length encoded vectors. Prefix sums are piecewise
/// linear between block ends, so checking the union of block ends is exact.
fn majorizes_blocks(p: &[(f64, u64)], q: &[(f64, u64)]) -> Vec<(usize, f64, f64)> {
    let mut ends = Vec::new();
    for blocks in [p, q] {
        let mut acc = 0;
        for &(_, n) in blocks {
            acc += n;
            ends.push(acc);
        }
    }
    ends.sort_unstable();
    ends.dedup();
    ends.into_iter().map(|k| (k as usize, prefix_at(p, k), prefix_at(q, k))).collect()
}

fn diluted_blocks(p: &[f64], d2: u64) -> Blocks {
    p.iter().map(|&x| (x / d2 as f64, d2)).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Conversion {
    Distill,
    Cost,
}

/// Block-compressed conversion check for arbitrary ancillas with
/// `d * d2 = 2^m * d1`.
pub fn check_with_ancillas(rho: &DensityMatrix, m: u32, d1: u64, d2: u64, kind: Conversion) -> Result<ConversionCertificate> {
    let d = rho.dim() as u64;
    if d1 == 0 || d2 == 0 || d.checked_mul(d2) != (1u64 << m).checked_mul(d1) {
        return Err(Error::Domain(format!("ancillas d1={d1}, d2={d2} do not satisfy d*d2 = 2^m*d1 for d={d}, m={m}")));
    }
    let state = diluted_blocks(&effective_spectrum(rho), d2);
    let pure = vec![(1.0 / d1 as f64, d1)];
    let sums = match kind {
        Conversion::Distill => majorizes_blocks(&state, &pure),
        Conversion::Cost => majorizes_blocks(&pure, &state),
    };
    let feasible = sums.iter().all(|&(_, a, b)| a >= b - PREFIX_SLACK);
    Ok(ConversionCertificate { feasible, m, d1, d2, checked_prefix_sums: sums })
}

/// Summary of an exhaustive scan over admissible ancilla pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub m: u32,
    pub pairs_checked: usize,
    pub feasible_pairs: Vec<(u64, u64)>,
}

/// Every `(d1, d2)` with `d * d2 = 2^m * d1` and `d1 * d2 <= cap`.
/// Admissible `d2` are exactly the multiples of `2^m / gcd(d, 2^m)`.
pub fn ancilla_pairs(d: u64, m: u32, cap: u64) -> Vec<(u64, u64)> {
    let pm = 1u64 << m;
    let step = pm / gcd(d, pm);
    let mut out = Vec::new();
    let mut d2 = step;
    loop {
        let d1 = d * d2 / pm;
        if d1.saturating_mul(d2) > cap {
            break;
        }
        out.push((d1, d2));
        d2 += step;
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn exhaustive_scan(rho: &DensityMatrix, m: u32, kind: Conversion, cap: u64) -> ScanReport {
    let pairs = ancilla_pairs(rho.dim() as u64, m, cap);
    let feasible_pairs = pairs
        .iter()
        .filter(|&&(d1, d2)| check_with_ancillas(rho, m, d1, d2, kind).map(|c| c.feasible).unwrap_or(false))
        .copied()
        .collect();
    ScanReport { m, pairs_checked: pairs.len(), feasible_pairs }
}

/// Largest `m` whose scan finds a feasible pair (0 is always feasible).
pub fn distill_by_scan(rho: &DensityMatrix, cap: u64) -> u32 {
    let mut best = 0;
    for m in 1..=cap.ilog2() {
        if !exhaustive_scan(rho, m, Conversion::Distill, cap).feasible_pairs.is_empty() {
            best = m;
        }
    }
    best
}

/// Smallest `m` whose scan finds a feasible pair.
pub fn cost_by_scan(rho: &DensityMatrix, cap: u64) -> Option<u32> {
    (0..=cap.ilog2()).find(|&m| !exhaustive_scan(rho, m, Conversion::Cost, cap).feasible_pairs.is_empty())
}
