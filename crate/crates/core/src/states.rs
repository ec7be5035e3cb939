//! Validated density matrices, their spectra and entropies.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    haar_unitary, hermitian_eig, kron, partial_trace, ComplexMatrix, Dims, EigenSystem, RandomStream, Subsystem,
    DEFAULT_TOL, HERMITIAN_TOL, NEG_CLIP,
};

/// Trace tolerance for states and probability vectors.
pub const TRACE_TOL: f64 = 1e-9;
/// Relative numeric-rank threshold: values above `RANK_REL_TOL * max` count.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Descending eigenvalue list, clipped to `[0, 1]` and summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    rank: usize,
}

impl Spectrum {
    /// Accepts any ordering; entries may carry round-off down to `-1e-10`.
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty list".into()));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite entry {bad}")));
        }
        if let Some(neg) = values.iter().find(|&&x| x < -NEG_CLIP) {
            return Err(Error::InvalidDistribution(format!("negative entry {neg:e}")));
        }
        let mut v: Vec<f64> = values.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = v.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDistribution(format!("sum is {total}, expected 1")));
        }
        if total != 1.0 {
            for x in v.iter_mut() {
                *x /= total;
            }
        }
        let tol = RANK_REL_TOL * v[0];
        let rank = v.iter().filter(|&&x| x > tol).count();
        Ok(Self { values: v, rank })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    /// Zero-padded (or truncated-if-zero) copy of length `d`.
    pub fn padded(&self, d: usize) -> Result<Vec<f64>> {
        if self.values.len() > d && self.values[d..].iter().any(|&x| x > 0.0) {
            return Err(Error::DimensionMismatch { expected: d, found: self.values.len() });
        }
        let mut v = self.values.clone();
        v.resize(d, 0.0);
        Ok(v)
    }

    /// The `rank` values above the rank threshold; the rest is round-off.
    pub fn support(&self) -> &[f64] {
        &self.values[..self.rank]
    }

    pub fn von_neumann(&self) -> f64 {
        -self.support().iter().map(|&x| x * x.log2()).sum::<f64>()
    }

    /// Renyi entropy with the limits wired in: `0` gives log rank, `1` the
    /// von Neumann entropy and `f64::INFINITY` the min-entropy.
    pub fn renyi(&self, alpha: f64) -> Result<f64> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::Domain(format!("Renyi order must be >= 0, got {alpha}")));
        }
        Ok(if alpha == 0.0 {
            (self.rank as f64).log2()
        } else if alpha == 1.0 {
            self.von_neumann()
        } else if alpha.is_infinite() {
            -self.max().log2()
        } else {
            let s: f64 = self.support().iter().map(|&x| x.powf(alpha)).sum();
            s.log2() / (1.0 - alpha)
        })
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix. The eigensystem and
/// spectrum are computed once on demand.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    eig: OnceLock<EigenSystem>,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

/// Checks the state invariants and returns the validated state.
pub fn validate(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let mat = m.hermitian_part();
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::Trace { trace, deficit: (trace - 1.0).abs() });
    }
    let es = hermitian_eig(&mat, DEFAULT_TOL)?;
    let min = es.values.first().copied().unwrap_or(0.0);
    if min < -NEG_CLIP {
        return Err(Error::NotPositive(min));
    }
    let eig = OnceLock::new();
    let _ = eig.set(es);
    Ok(DensityMatrix { mat, eig, spectrum: OnceLock::new() })
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigen(&self) -> &EigenSystem {
        self.eig.get_or_init(|| hermitian_eig(&self.mat, DEFAULT_TOL).expect("validated states are Hermitian"))
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum
            .get_or_init(|| Spectrum::new(&self.eigen().values).expect("validated states have a valid spectrum"))
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        validate(&self.mat.conjugate_by(u))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        validate(&kron(&self.mat, &other.mat)).expect("product of states is a state")
    }

    pub fn reduce(&self, keep: Subsystem, dims: Dims) -> Result<DensityMatrix> {
        validate(&partial_trace(&self.mat, keep, dims)?)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diag_real()
    }
}

pub fn pure(v: &[C64]) -> Result<DensityMatrix> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let u: Vec<C64> = v.iter().map(|z| z / norm).collect();
    validate(&ComplexMatrix::outer(&u, &u))
}

pub fn maximally_mixed(d: usize) -> DensityMatrix {
    assert!(d >= 1, "dimension must be positive");
    diagonal(&vec![1.0 / d as f64; d]).expect("uniform distribution")
}

/// Incoherent state `sum_i p_i |i><i|`.
pub fn diagonal(p: &[f64]) -> Result<DensityMatrix> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty list".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDistribution(format!("sum is {total}, expected 1")));
    }
    validate(&ComplexMatrix::from_diag(p))
}

/// Qubit state `(I + r . sigma) / 2`.
pub fn from_bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !len.is_finite() || len > 1.0 + 1e-9 {
        return Err(Error::Domain(format!("Bloch vector length {len} exceeds 1")));
    }
    let [x, y, z] = r;
    let m = ComplexMatrix::new(
        2,
        2,
        vec![C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0), C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    )?;
    validate(&m)
}

/// `|Phi+> = (|00> + |11>)/sqrt(2)`.
pub fn bell_phi_plus() -> DensityMatrix {
    let s = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    pure(&[s, z, z, s]).expect("nonzero vector")
}

/// State `U diag(p) U^dagger` with Haar-random `U`.
pub fn from_spectrum_and_unitary(p: &[f64], u: &ComplexMatrix) -> Result<DensityMatrix> {
    diagonal(p)?.conjugate_by(u)
}

/// Haar eigenvectors with a uniform (Dirichlet(1)) spectrum on `rank`
/// nonzero eigenvalues. The numeric rank always matches `rank`.
pub fn random_density(d: usize, rank: usize, rng: &mut RandomStream) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::Domain(format!("rank {rank} out of range 1..={d}")));
    }
    loop {
        let mut p = rng.dirichlet(rank);
        let max = p.iter().cloned().fold(0.0, f64::max);
        // Values this small would be indistinguishable from round-off.
        if p.iter().any(|&x| x <= 1e-6 * max) {
            continue;
        }
        p.resize(d, 0.0);
        let u = haar_unitary(d, rng);
        let rho = from_spectrum_and_unitary(&p, &u)?;
        if rho.spectrum().rank() == rank {
            return Ok(rho);
        }
    }
}

pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    rho.spectrum().von_neumann().clamp(0.0, (rho.dim() as f64).log2())
}

pub fn renyi_entropy(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    Ok(rho.spectrum().renyi(alpha)?.clamp(0.0, (rho.dim() as f64).log2()))
}

/// `I(A:B) = S(rho_A) + S(rho_B) - S(rho_AB)`.
pub fn mutual_information(rho: &DensityMatrix, dims: Dims) -> Result<f64> {
    let a = rho.reduce(Subsystem::A, dims)?;
    let b = rho.reduce(Subsystem::B, dims)?;
    Ok((von_neumann(&a) + von_neumann(&b) - von_neumann(rho)).max(0.0))
}
