//! Coherence quantifiers in the computational (incoherent) basis, the
//! maximally coherent mixed state and its optimal unitary.

mod channel;
mod simplex;

use std::fmt;
use std::str::FromStr;

pub use channel::{
    apply_channel, fourier_basis, mio_channel_from_mixture, mio_channel_from_unitary, random_free_channel, Channel,
    FreeChannelKind, MubBasis, CHANNEL_TOL,
};
pub use simplex::{grid_minimize, simplex_minimize, SimplexObjective, SimplexOptConfig, SimplexResult};

use crate::error::{Error, Result};
use crate::linalg::{
    fidelity, hermitian_eig, mat_func_eig, rel_entropy, schatten_norm, sqrt_psd, ComplexMatrix, DEFAULT_TOL,
    SUPPORT_TOL,
};
use crate::states::{diagonal, maximally_mixed, validate, von_neumann, DensityMatrix, Spectrum};

const LN2: f64 = std::f64::consts::LN_2;

/// Contractive distances available for distance-based quantifiers.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Distance {
    RelEntropy,
    TraceNorm,
    /// Schatten `p`-norm of the difference, `p >= 1` (`f64::INFINITY` allowed).
    Schatten(f64),
    OneMinusFidelity,
}

impl Distance {
    /// The menu used by the verification suites.
    pub const MENU: [Distance; 4] =
        [Distance::RelEntropy, Distance::TraceNorm, Distance::Schatten(2.0), Distance::OneMinusFidelity];

    fn check(self) -> Result<Self> {
        match self {
            Distance::Schatten(p) if p.is_nan() || p < 1.0 => {
                Err(Error::Domain(format!("Schatten exponent must be >= 1, got {p}")))
            }
            other => Ok(other),
        }
    }

    /// `D(rho, sigma)`.
    pub fn eval(self, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
        }
        match self.check()? {
            Distance::RelEntropy => rel_entropy(rho, sigma),
            Distance::TraceNorm => schatten_norm(&(rho.matrix() - sigma.matrix()), 1.0),
            Distance::Schatten(p) => schatten_norm(&(rho.matrix() - sigma.matrix()), p),
            Distance::OneMinusFidelity => Ok(1.0 - fidelity(rho, sigma)?),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::RelEntropy => write!(f, "rel_entropy"),
            Distance::TraceNorm => write!(f, "trace_norm"),
            Distance::Schatten(p) if p.is_infinite() => write!(f, "schatten_inf"),
            Distance::Schatten(p) => write!(f, "schatten_{p}"),
            Distance::OneMinusFidelity => write!(f, "one_minus_fidelity"),
        }
    }
}

impl FromStr for Distance {
    type Err = Error;

    /// Accepts `rel_entropy`, `trace_norm`, `one_minus_fidelity` and
    /// `schatten_<p>` (for example `schatten_2`, `schatten_inf`).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rel_entropy" => Ok(Distance::RelEntropy),
            "trace_norm" => Ok(Distance::TraceNorm),
            "one_minus_fidelity" => Ok(Distance::OneMinusFidelity),
            _ => {
                let p = s
                    .strip_prefix("schatten_")
                    .and_then(|p| if p == "inf" { Some(f64::INFINITY) } else { p.parse::<f64>().ok() })
                    .ok_or_else(|| Error::Domain(format!("unknown distance '{s}'")))?;
                Distance::Schatten(p).check()
            }
        }
    }
}

/// `Delta[rho]`: the diagonal part of `rho`.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    diagonal(&rho.populations().iter().map(|x| x.max(0.0)).collect::<Vec<_>>()).expect("populations of a state")
}

/// `C_r(rho) = S(Delta[rho]) - S(rho)`.
pub fn c_rel_entropy(rho: &DensityMatrix) -> f64 {
    (von_neumann(&dephase(rho)) - von_neumann(rho)).max(0.0)
}

/// Sum of the moduli of the off-diagonal entries.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

/// Simplex starts shared by every quantifier: uniform, then `Delta[rho]`.
fn default_starts(rho: &DensityMatrix) -> Vec<Vec<f64>> {
    let d = rho.dim();
    vec![vec![1.0 / d as f64; d], rho.populations().iter().map(|x| x.max(0.0)).collect()]
}

fn diag_state(q: &[f64]) -> Result<DensityMatrix> {
    let total: f64 = q.iter().sum();
    diagonal(&q.iter().map(|x| x.max(0.0) / total).collect::<Vec<_>>())
}

/// Objective `q -> D(rho, diag q)` with its gradient. For the fidelity
/// distance the objective is `-sqrt(F)`, which is convex and shares the
/// minimizer of `1 - F`.
pub fn distance_objective(rho: &DensityMatrix, distance: Distance) -> Result<Box<dyn SimplexObjective + '_>> {
    let d = rho.dim();
    Ok(match distance.check()? {
        Distance::RelEntropy => {
            let s = von_neumann(rho);
            let pops = rho.populations();
            Box::new(move |q: &[f64]| -> Result<(f64, Vec<f64>)> {
                let mut f = -s;
                let mut g = vec![0.0; d];
                for i in 0..d {
                    if pops[i] > SUPPORT_TOL {
                        if q[i] <= 0.0 {
                            return Ok((f64::INFINITY, g));
                        }
                        f -= pops[i] * q[i].log2();
                        g[i] = -pops[i] / (q[i] * LN2);
                    }
                }
                Ok((f, g))
            })
        }
        Distance::TraceNorm => schatten_objective(rho, 1.0),
        Distance::Schatten(p) => schatten_objective(rho, p),
        Distance::OneMinusFidelity => {
            let root = sqrt_psd(rho);
            Box::new(move |q: &[f64]| -> Result<(f64, Vec<f64>)> {
                let mut scaled = root.clone();
                for i in 0..d {
                    for j in 0..d {
                        scaled[(i, j)] *= q[i].sqrt();
                    }
                }
                // A = sqrt(rho) diag(q) sqrt(rho) = B^dagger B with B = diag(sqrt q) sqrt(rho).
                let a = (&scaled.adjoint() * &scaled).hermitian_part();
                let es = hermitian_eig(&a, DEFAULT_TOL)?;
                let top = es.values.last().copied().unwrap_or(0.0).max(0.0);
                let root_f: f64 = es.values.iter().map(|x| x.max(0.0).sqrt()).sum();
                let inv_root = mat_func_eig(&es, |x| if x > 1e-14 * top.max(1e-300) { 1.0 / x.sqrt() } else { 0.0 }, false)?;
                let h = &(&root * &inv_root) * &root;
                let g = (0..d).map(|i| -0.5 * h[(i, i)].re).collect();
                Ok((-root_f, g))
            })
        }
    })
}

fn schatten_objective(rho: &DensityMatrix, p: f64) -> Box<dyn SimplexObjective + '_> {
    let d = rho.dim();
    Box::new(move |q: &[f64]| -> Result<(f64, Vec<f64>)> {
        let mut m = rho.matrix().clone();
        for i in 0..d {
            m[(i, i)].re -= q[i];
        }
        let es = hermitian_eig(&m.hermitian_part(), DEFAULT_TOL)?;
        let abs: Vec<f64> = es.values.iter().map(|x| x.abs()).collect();
        let top = abs.iter().cloned().fold(0.0, f64::max);
        let mut g = vec![0.0; d];
        if top == 0.0 {
            return Ok((0.0, g));
        }
        let f = if p.is_infinite() {
            top
        } else {
            top * abs.iter().map(|&s| (s / top).powf(p)).sum::<f64>().powf(1.0 / p)
        };
        // d f / d m_k = sgn(m_k) (|m_k| / f)^(p-1); d m_k / d q_i = -|V_ik|^2.
        let weights: Vec<f64> = if p.is_infinite() {
            let k = abs.iter().position(|&s| s == top).unwrap();
            (0..d).map(|j| if j == k { es.values[k].signum() } else { 0.0 }).collect()
        } else if p == 1.0 {
            es.values.iter().map(|&x| if x == 0.0 { 0.0 } else { x.signum() }).collect()
        } else {
            es.values.iter().map(|&x| x.signum() * (x.abs() / f).powf(p - 1.0)).collect()
        };
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = -(0..d).map(|k| weights[k] * es.weight(i, k)).sum::<f64>();
        }
        Ok((f, g))
    })
}

/// `C_D(rho) = inf over incoherent sigma of D(rho, sigma)`. The relative
/// entropy uses its closed-form minimizer `Delta[rho]`; the other distances
/// are minimized numerically and the value is an upper bound on the infimum.
pub fn c_distance(rho: &DensityMatrix, distance: Distance, opt: &SimplexOptConfig) -> Result<SimplexResult> {
    let distance = distance.check()?;
    if distance == Distance::RelEntropy {
        return Ok(SimplexResult {
            value: c_rel_entropy(rho),
            minimizer: rho.populations(),
            converged: true,
            iterations: 0,
            evals: 0,
        });
    }
    let obj = distance_objective(rho, distance)?;
    let mut r = simplex_minimize(rho.dim(), obj.as_ref(), &default_starts(rho), opt)?;
    r.value = distance.eval(rho, &diag_state(&r.minimizer)?)?.max(0.0);
    Ok(r)
}

/// Renyi coherence: the Petz divergence for `alpha in (0,1)`, the sandwiched
/// divergence for `alpha > 1`, and `C_r` at `alpha = 1`.
pub fn c_alpha(rho: &DensityMatrix, alpha: f64, opt: &SimplexOptConfig) -> Result<SimplexResult> {
    if alpha == 1.0 {
        return c_distance(rho, Distance::RelEntropy, opt);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("Renyi coherence needs alpha in (0,1) or (1,inf), got {alpha}")));
    }
    let d = rho.dim();
    let mut starts = default_starts(rho);
    let obj: Box<dyn SimplexObjective> = if alpha < 1.0 {
        let a = petz_weights(rho, alpha)?;
        // The Petz problem has the closed-form minimizer q_i ~ a_i^(1/alpha).
        let closed: Vec<f64> = a.iter().map(|x| x.max(0.0).powf(1.0 / alpha)).collect();
        let total: f64 = closed.iter().sum();
        starts.insert(0, closed.iter().map(|x| x / total).collect());
        Box::new(move |q: &[f64]| -> Result<(f64, Vec<f64>)> {
            let t: f64 = (0..d).map(|i| if a[i] > 0.0 && q[i] > 0.0 { a[i] * q[i].powf(1.0 - alpha) } else { 0.0 }).sum();
            if t <= 0.0 {
                return Ok((f64::INFINITY, vec![0.0; d]));
            }
            let g = (0..d)
                .map(|i| if a[i] > 0.0 && q[i] > 0.0 { -a[i] * q[i].powf(-alpha) / (t * LN2) } else { 0.0 })
                .collect();
            Ok((t.log2() / (alpha - 1.0), g))
        })
    } else {
        sandwiched_objective(rho, alpha)
    };
    let mut r = simplex_minimize(d, obj.as_ref(), &starts, opt)?;
    r.value = r.value.max(0.0);
    Ok(r)
}

/// `a_i = (rho^alpha)_ii`.
fn petz_weights(rho: &DensityMatrix, alpha: f64) -> Result<Vec<f64>> {
    let pow = mat_func_eig(rho.eigen(), |x| if x > SUPPORT_TOL { x.powf(alpha) } else { 0.0 }, false)?;
    Ok(pow.diag_real())
}

/// Closed form of the Petz-Renyi coherence for `alpha in (0,1)`:
/// `alpha/(alpha-1) * log2 sum_i a_i^(1/alpha)`.
pub fn c_alpha_petz_closed(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("closed form holds for alpha in (0,1), got {alpha}")));
    }
    let s: f64 = petz_weights(rho, alpha)?.iter().map(|a| a.max(0.0).powf(1.0 / alpha)).sum();
    Ok((alpha / (alpha - 1.0) * s.log2()).max(0.0))
}

fn sandwiched_objective(rho: &DensityMatrix, alpha: f64) -> Box<dyn SimplexObjective + '_> {
    let d = rho.dim();
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let pops = rho.populations();
    Box::new(move |q: &[f64]| -> Result<(f64, Vec<f64>)> {
        // Support: a population outside supp(sigma) makes the divergence infinite.
        if (0..d).any(|i| q[i] <= SUPPORT_TOL && pops[i] > SUPPORT_TOL) {
            return Ok((f64::INFINITY, vec![0.0; d]));
        }
        let s: Vec<f64> = q.iter().map(|&x| if x > SUPPORT_TOL { x.powf(gamma) } else { 0.0 }).collect();
        let mut x = rho.matrix().clone();
        for i in 0..d {
            for j in 0..d {
                x[(i, j)] *= s[i] * s[j];
            }
        }
        let es = hermitian_eig(&x.hermitian_part(), DEFAULT_TOL)?;
        let xa = mat_func_eig(&es, |v| if v > SUPPORT_TOL { v.powf(alpha) } else { 0.0 }, false)?;
        let t = xa.trace().re;
        if t <= 0.0 {
            return Ok((f64::INFINITY, vec![0.0; d]));
        }
        let g = (0..d).map(|k| if q[k] > SUPPORT_TOL { -xa[(k, k)].re / (q[k] * t * LN2) } else { 0.0 }).collect();
        Ok((t.log2() / (alpha - 1.0), g))
    })
}

/// `C_g(rho) = 1 - max over incoherent sigma of F(rho, sigma)`.
pub fn c_geometric(rho: &DensityMatrix, opt: &SimplexOptConfig) -> Result<SimplexResult> {
    c_distance(rho, Distance::OneMinusFidelity, opt)
}

/// `rho_max = sum_n p_n |n+><n+|` over the Fourier basis.
pub fn mcms(spectrum: &Spectrum, d: usize) -> Result<DensityMatrix> {
    let p = spectrum.padded(d)?;
    let f = fourier_basis(d);
    validate(&ComplexMatrix::from_diag(&p).conjugate_by(f.matrix()))
}

/// `V = sum_n |n+><psi_n|` with the eigenvectors of `rho` in descending
/// eigenvalue order, so that `V rho V^dagger = rho_max`.
pub fn optimal_unitary(rho: &DensityMatrix) -> ComplexMatrix {
    let d = rho.dim();
    let vecs = &rho.eigen().vectors;
    let mut desc = ComplexMatrix::zeros(d, d);
    for n in 0..d {
        for i in 0..d {
            desc[(i, n)] = vecs[(i, d - 1 - n)];
        }
    }
    fourier_basis(d).matrix() * &desc.adjoint()
}

/// `C_max(rho) = D(rho, 1/d)`.
pub fn c_max_closed(rho: &DensityMatrix, distance: Distance) -> Result<f64> {
    distance.eval(rho, &maximally_mixed(rho.dim()))
}

#[cfg(test)]
mod tests;
