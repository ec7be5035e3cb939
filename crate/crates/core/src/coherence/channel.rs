//! Kraus channels, the Fourier mutually unbiased basis and the explicit
//! maximally incoherent constructions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, ComplexMatrix, RandomStream};
use crate::states::{validate, DensityMatrix, TRACE_TOL};

/// Trace-preservation and unitarity tolerance for channel constructors.
pub const CHANNEL_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map `rho -> sum_i K_i rho K_i^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Domain("channel needs at least one Kraus operator".into()))?;
        let (rows, cols) = (first.rows(), first.cols());
        if let Some(k) = kraus.iter().find(|k| k.rows() != rows || k.cols() != cols) {
            return Err(Error::DimensionMismatch { expected: rows, found: k.rows() });
        }
        let ch = Self { kraus };
        let residual = ch.tp_residual();
        if residual > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(ch)
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// `max |sum_i K_i^dagger K_i - I|`.
    pub fn tp_residual(&self) -> f64 {
        let n = self.input_dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(n))
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: vec![ComplexMatrix::identity(d)] }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        check_unitary(u)?;
        Ok(Self { kraus: vec![u.clone()] })
    }

    /// Complete dephasing in the incoherent basis, Kraus `{|i><i|}`.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, i)] = C64::new(1.0, 0.0);
                k
            })
            .collect();
        Self { kraus }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let defect = u.unitarity_defect();
    if defect > CHANNEL_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

pub fn apply_channel(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: ch.input_dim(), found: rho.dim() });
    }
    let n = ch.output_dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in &ch.kraus {
        out = &out + &(&(k * rho.matrix()) * &k.adjoint());
    }
    validate(&out)
}

/// Orthonormal basis whose vectors all have overlap `1/d` with every
/// incoherent basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MubBasis {
    vectors: ComplexMatrix,
}

impl MubBasis {
    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    /// Basis vectors as columns.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, n: usize) -> Vec<C64> {
        self.vectors.column(n)
    }

    /// `|n+><n+|`.
    pub fn projector(&self, n: usize) -> ComplexMatrix {
        let v = self.vector(n);
        ComplexMatrix::outer(&v, &v)
    }
}

/// `<i|n+> = omega^(i n) / sqrt(d)` with `omega = exp(2 pi i / d)`.
pub fn fourier_basis(d: usize) -> MubBasis {
    assert!(d >= 1, "dimension must be positive");
    let norm = 1.0 / (d as f64).sqrt();
    let mut f = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for n in 0..d {
            // Reduce the exponent first so the phase is exact on the unit circle.
            let k = (i * n) % d;
            f[(i, n)] = C64::from_polar(norm, 2.0 * PI * k as f64 / d as f64);
        }
    }
    MubBasis { vectors: f }
}

/// Kraus operators `K_n = U |n+><n+|`: every incoherent state goes to
/// `1/d`, and a state diagonal in the Fourier basis is rotated by `U`.
pub fn mio_channel_from_unitary(u: &ComplexMatrix) -> Result<Channel> {
    mio_channel_from_mixture(&[1.0], std::slice::from_ref(u))
}

/// Kraus operators `K_{i,n} = sqrt(q_i) U_i |n+><n+|`.
pub fn mio_channel_from_mixture(weights: &[f64], unitaries: &[ComplexMatrix]) -> Result<Channel> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} unitaries",
            weights.len(),
            unitaries.len()
        )));
    }
    if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidDistribution(format!("weight {bad} is not a probability")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    let d = unitaries[0].rows();
    for u in unitaries {
        check_unitary(u)?;
        if u.rows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: u.rows() });
        }
    }
    let basis = fourier_basis(d);
    let projectors: Vec<ComplexMatrix> = (0..d).map(|n| basis.projector(n)).collect();
    let mut kraus = Vec::with_capacity(d * unitaries.len());
    for (w, u) in weights.iter().zip(unitaries) {
        if *w == 0.0 {
            continue;
        }
        let scaled = u.scale(w.sqrt());
        for p in &projectors {
            kraus.push(&scaled * p);
        }
    }
    Channel::new(kraus)
}

/// Families of channels that are free by construction.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FreeChannelKind {
    /// Permutation times diagonal phases: a single incoherent Kraus operator.
    IncoherentUnitary,
    /// `rho -> W[(1-w) rho + w Delta[rho]] W^dagger` with incoherent unitary `W`.
    DephasingMixture,
    /// Mixture of Fourier-basis measure-and-rotate channels (maximally incoherent).
    MioConstruction,
}

impl FreeChannelKind {
    pub const ALL: [FreeChannelKind; 3] =
        [FreeChannelKind::IncoherentUnitary, FreeChannelKind::DephasingMixture, FreeChannelKind::MioConstruction];

    /// Whether the channel admits incoherent Kraus operators.
    pub fn is_incoherent_operation(self) -> bool {
        !matches!(self, FreeChannelKind::MioConstruction)
    }
}

fn incoherent_unitary(d: usize, rng: &mut RandomStream) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        perm.swap(i, rng.below(i + 1));
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (col, &row) in perm.iter().enumerate() {
        u[(row, col)] = C64::from_polar(1.0, 2.0 * PI * rng.uniform());
    }
    u
}

pub fn random_free_channel(kind: FreeChannelKind, d: usize, rng: &mut RandomStream) -> Result<Channel> {
    if d < 2 {
        return Err(Error::Domain(format!("free channels need d >= 2, got {d}")));
    }
    match kind {
        FreeChannelKind::IncoherentUnitary => Channel::unitary(&incoherent_unitary(d, rng)),
        FreeChannelKind::DephasingMixture => {
            let w = rng.uniform();
            let pre = incoherent_unitary(d, rng);
            let mut kraus = vec![pre.scale((1.0 - w).sqrt())];
            for k in Channel::dephasing(d).kraus {
                kraus.push(&pre * &k.scale(w.sqrt()));
            }
            Channel::new(kraus)
        }
        FreeChannelKind::MioConstruction => {
            let k = 1 + rng.below(3);
            let weights = rng.dirichlet(k);
            let us: Vec<ComplexMatrix> = (0..k).map(|_| haar_unitary(d, rng)).collect();
            mio_channel_from_mixture(&weights, &us)
        }
    }
}
