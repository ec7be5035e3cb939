//! Spectral matrix functions, Schatten norms, fidelity and quantum
//! divergences. All logarithms are base 2.
//!
//! Divergences return `f64::INFINITY` when the support condition fails;
//! that is a legitimate value, not an error. Logarithms of zero eigenvalues
//! never enter a matrix: trace expressions are evaluated spectrally, where a
//! zero eigenvalue only ever meets zero weight.

use num_complex::Complex64 as C64;

use super::eig::{hermitian_eig, EigenSystem, DEFAULT_TOL, SWEEP_CAP};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::states::DensityMatrix;

/// Eigenvalues in `[-NEG_CLIP, 0)` are treated as round-off and clipped.
pub const NEG_CLIP: f64 = 1e-10;
/// Eigenvalues at or below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `V diag(f(lambda)) V^dagger`.
///
/// With `clip_negative`, eigenvalues in `[-1e-10, 0)` become 0 before `f` is
/// applied and anything more negative is a domain error. `f` must map the
/// (clipped) spectrum to finite values.
pub fn mat_func(m: &ComplexMatrix, f: impl Fn(f64) -> f64, clip_negative: bool) -> Result<ComplexMatrix> {
    let es = hermitian_eig(m, DEFAULT_TOL)?;
    mat_func_eig(&es, f, clip_negative)
}

pub fn mat_func_eig(es: &EigenSystem, f: impl Fn(f64) -> f64, clip_negative: bool) -> Result<ComplexMatrix> {
    let mut mapped = Vec::with_capacity(es.dim());
    for &x in &es.values {
        let x = if clip_negative {
            if x < -NEG_CLIP {
                return Err(Error::Domain(format!("eigenvalue {x:e} below -{NEG_CLIP:e}")));
            }
            x.max(0.0)
        } else {
            x
        };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!("function is not finite at eigenvalue {x:e}")));
        }
        mapped.push(y);
    }
    Ok(es.reconstruct_from(&mapped))
}

/// Singular values, descending.
///
/// Hermitian input uses the eigensolver; anything else goes through
/// one-sided Jacobi, which keeps zero singular values at round-off level
/// instead of the square root of round-off that `sqrt(eig(M^dagger M))` gives.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> = if m.is_square() && m.hermitian_defect() <= 1e-14 * m.max_abs().max(1.0) {
        hermitian_eig(m, DEFAULT_TOL)?.values.iter().map(|x| x.abs()).collect()
    } else {
        one_sided_jacobi(m)?
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn one_sided_jacobi(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    // Columns below this squared norm only move singular values by round-off.
    let negligible = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = false;
    let mut residual = 0.0;
    for _ in 0..SWEEP_CAP {
        residual = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                let a: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let b: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let g: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let gabs = g.norm();
                let denom = a.sqrt() * b.sqrt();
                if a <= negligible || b <= negligible || gabs <= f64::EPSILON * denom {
                    continue;
                }
                residual = residual.max(gabs / denom);
                let phase = g.conj() / gabs;
                let zeta = (b - a) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (xp, yq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (x, y) = (*xp, *yq * phase);
                    *xp = x * c - y * s;
                    *yq = x * s + y * c;
                }
            }
        }
        if residual <= 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { sweeps: SWEEP_CAP, residual });
    }
    Ok(cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect())
}

/// `(sum_i s_i^p)^(1/p)` over singular values. `p = f64::INFINITY` gives
/// the largest singular value.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("Schatten exponent must be >= 1, got {p}")));
    }
    let sv = singular_values(m)?;
    Ok(schatten_from_singular(&sv, p))
}

pub(crate) fn schatten_from_singular(sv: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return sv.iter().fold(0.0, |a, &b| a.max(b));
    }
    if p == 1.0 {
        return sv.iter().sum();
    }
    let top = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if top == 0.0 {
        return 0.0;
    }
    // Scaled to avoid overflow for large p.
    top * sv.iter().map(|&s| (s / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// `x^a` on the support: eigenvalues at or below `SUPPORT_TOL` map to 0.
/// Fractional powers would otherwise inflate round-off (`(1e-17)^0.5 ~ 3e-9`).
#[inline]
pub(crate) fn support_pow(x: f64, a: f64) -> f64 {
    if x > SUPPORT_TOL {
        x.powf(a)
    } else {
        0.0
    }
}

/// Square root of a density matrix, restricted to its support.
pub fn sqrt_psd(rho: &DensityMatrix) -> ComplexMatrix {
    rho.eigen().reconstruct_with(|x| support_pow(x, 0.5))
}

/// Uhlmann fidelity in the squared convention, `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`,
/// evaluated as the squared trace norm of `sqrt(sigma) sqrt(rho)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let prod = &sqrt_psd(sigma) * &sqrt_psd(rho);
    let root_trace: f64 = one_sided_jacobi(&prod)?.iter().sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `W_ij = <i_rho | j_sigma>` between the two eigenbases.
fn cross_overlaps(rho: &DensityMatrix, sigma: &DensityMatrix) -> ComplexMatrix {
    &rho.eigen().vectors.adjoint() * &sigma.eigen().vectors
}

/// `<j|rho|j>` for every eigenvector `|j>` of sigma.
fn rho_weights_on_sigma_basis(rho: &DensityMatrix, sigma: &DensityMatrix) -> (Vec<f64>, ComplexMatrix) {
    let w = cross_overlaps(rho, sigma);
    let lam = &rho.eigen().values;
    let n = rho.dim();
    let weights = (0..n).map(|j| (0..n).map(|i| lam[i].max(0.0) * w[(i, j)].norm_sqr()).sum()).collect();
    (weights, w)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `S(rho||sigma) = Tr[rho log rho] - Tr[rho log sigma]`, `+inf` when the
/// support of rho is not contained in the support of sigma.
pub fn rel_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (weights, _) = rho_weights_on_sigma_basis(rho, sigma);
    let mu = &sigma.eigen().values;
    let mut cross = 0.0;
    for (j, &wj) in weights.iter().enumerate() {
        if mu[j] <= SUPPORT_TOL {
            if wj > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += wj * mu[j].log2();
    }
    let neg_entropy: f64 = rho.eigen().values.iter().map(|&x| xlog2x(x)).sum();
    Ok((neg_entropy - cross).max(0.0))
}

/// Petz-Renyi divergence `log Tr[rho^a sigma^(1-a)] / (a-1)` for
/// `a in (0,1) U (1,2]`; `a = 1` is the relative entropy.
pub fn renyi_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_dims(rho, sigma)?;
    if alpha == 1.0 {
        return rel_entropy(rho, sigma);
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!("Renyi divergence is contractive for alpha in (0,2]; got {alpha}")));
    }
    let (weights, w) = rho_weights_on_sigma_basis(rho, sigma);
    let lam = &rho.eigen().values;
    let mu = &sigma.eigen().values;
    let n = rho.dim();
    let mut total = 0.0;
    for j in 0..n {
        if mu[j] <= SUPPORT_TOL {
            if alpha > 1.0 {
                if weights[j] > SUPPORT_TOL {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            continue;
        }
        let mj = mu[j].powf(1.0 - alpha);
        for i in 0..n {
            let li = support_pow(lam[i], alpha);
            if li > 0.0 {
                total += li * mj * w[(i, j)].norm_sqr();
            }
        }
    }
    if total <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(total.log2() / (alpha - 1.0))
}

/// Sandwiched Renyi divergence
/// `log Tr[(sigma^g rho sigma^g)^a] / (a-1)`, `g = (1-a)/(2a)`, for
/// `a in [1/2,1) U (1,inf)`; `a = 1` is the relative entropy.
pub fn sandwiched_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_dims(rho, sigma)?;
    if alpha == 1.0 {
        return rel_entropy(rho, sigma);
    }
    if !(alpha >= 0.5 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "sandwiched Renyi divergence is contractive for alpha in [1/2,inf); got {alpha}"
        )));
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let mu = &sigma.eigen().values;
    if gamma < 0.0 {
        let (weights, _) = rho_weights_on_sigma_basis(rho, sigma);
        if mu.iter().zip(&weights).any(|(&m, &wj)| m <= SUPPORT_TOL && wj > SUPPORT_TOL) {
            return Ok(f64::INFINITY);
        }
    }
    let power = sigma.eigen().reconstruct_with(|m| support_pow(m, gamma));
    let x = (&(&power * rho.matrix()) * &power).hermitian_part();
    let total: f64 = hermitian_eig(&x, DEFAULT_TOL)?.values.iter().map(|&v| support_pow(v, alpha)).sum();
    if total <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(total.log2() / (alpha - 1.0))
}

/// `Tr[rho^alpha]` computed from the cached spectrum.
pub fn trace_power(rho: &DensityMatrix, alpha: f64) -> f64 {
    rho.eigen().values.iter().map(|&x| support_pow(x, alpha)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_unitary, random_hermitian, RandomStream};
    use crate::states::{diagonal, maximally_mixed, pure, random_density};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn mat_func_examples() {
        let m = ComplexMatrix::from_diag(&[4.0, 9.0]);
        let r = mat_func(&m, f64::sqrt, true).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 3.0])) < 1e-14);
        let x = ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sq = mat_func(&x, |v| v * v, false).unwrap();
        assert!(sq.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let rho = ComplexMatrix::from_diag(&[0.9, 0.1]);
        let tr = mat_func(&rho, |v| v.powf(0.5), true).unwrap().trace().re;
        assert!((tr - (0.9f64.sqrt() + 0.1f64.sqrt())).abs() < 1e-14);
        assert!((tr - 1.264911).abs() < 1e-6);
    }

    #[test]
    fn mat_func_domain() {
        let m = ComplexMatrix::from_diag(&[1.0, -1e-11]);
        assert!(mat_func(&m, f64::sqrt, true).is_ok());
        let m = ComplexMatrix::from_diag(&[1.0, -1e-9]);
        assert!(matches!(mat_func(&m, f64::sqrt, true), Err(Error::Domain(_))));
        let m = ComplexMatrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(mat_func(&m, f64::log2, true), Err(Error::Domain(_))));
    }

    #[test]
    fn schatten_examples() {
        assert!((schatten_norm(&ComplexMatrix::from_diag(&[1.0, -1.0]), 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((schatten_norm(&ComplexMatrix::from_diag(&[3.0, 4.0]), 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&ComplexMatrix::from_diag(&[3.0, -4.0]), f64::INFINITY).unwrap() - 4.0).abs() < 1e-14);
        let bell = pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let diff = bell.matrix() - maximally_mixed(4).matrix();
        assert!((schatten_norm(&diff, 1.0).unwrap() - 1.5).abs() < 1e-12);
        assert!(matches!(schatten_norm(&diff, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn schatten_non_hermitian_uses_singular_values() {
        // [[0,2],[0,0]] has singular values {2, 0}.
        let m = ComplexMatrix::from_real(2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((schatten_norm(&m, 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((schatten_norm(&m, 3.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn schatten_is_a_norm() {
        let mut rng = RandomStream::new(1000);
        for _ in 0..1000 {
            let d = 2 + rng.below(4);
            let a = random_hermitian(d, &mut rng);
            let b = crate::linalg::random::ginibre(d, d, &mut rng);
            let p = [1.0, 1.5, 2.0, 3.0, f64::INFINITY][rng.below(5)];
            let na = schatten_norm(&a, p).unwrap();
            let nb = schatten_norm(&b, p).unwrap();
            let nab = schatten_norm(&(&a + &b), p).unwrap();
            assert!(nab <= na + nb + 1e-9);
            let s = rng.normal() * 3.0;
            assert!((schatten_norm(&a.scale(s), p).unwrap() - s.abs() * na).abs() <= 1e-9 * (1.0 + na));
        }
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = RandomStream::new(4);
        let rho = random_density(3, 3, &mut rng).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let z0 = diagonal(&[1.0, 0.0]).unwrap();
        let z1 = diagonal(&[0.0, 1.0]).unwrap();
        assert!(fidelity(&z0, &z1).unwrap().abs() < 1e-14);
        let r = diagonal(&[0.9, 0.1]).unwrap();
        let f = fidelity(&r, &maximally_mixed(2)).unwrap();
        assert!((f - (0.9f64.sqrt() + 0.1f64.sqrt()).powi(2) / 2.0).abs() < 1e-12);
        assert!((f - 0.8).abs() < 1e-12);
        assert!(fidelity(&r, &maximally_mixed(3)).is_err());
    }

    #[test]
    fn fidelity_symmetric_and_unitarily_invariant() {
        let mut rng = RandomStream::new(77);
        for _ in 0..50 {
            let d = 2 + rng.below(3);
            let r1 = 1 + rng.below(d);
            let r2 = 1 + rng.below(d);
            let rho = random_density(d, r1, &mut rng).unwrap();
            let sigma = random_density(d, r2, &mut rng).unwrap();
            let f = fidelity(&rho, &sigma).unwrap();
            assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
            let u = haar_unitary(d, &mut rng);
            let fu = fidelity(&rho.conjugate_by(&u).unwrap(), &sigma.conjugate_by(&u).unwrap()).unwrap();
            assert!((f - fu).abs() < 1e-9);
        }
    }

    #[test]
    fn rel_entropy_examples() {
        let mut rng = RandomStream::new(8);
        let rho = random_density(3, 2, &mut rng).unwrap();
        assert!(rel_entropy(&rho, &rho).unwrap().abs() < 1e-9);
        let plus = pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((rel_entropy(&plus, &maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-12);
        let z0 = diagonal(&[1.0, 0.0]).unwrap();
        let z1 = diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(rel_entropy(&z0, &z1).unwrap(), f64::INFINITY);
        let r = diagonal(&[0.9, 0.1]).unwrap();
        assert!((rel_entropy(&r, &maximally_mixed(2)).unwrap() - (1.0 - h2(0.9))).abs() < 1e-12);
    }

    #[test]
    fn renyi_examples() {
        let mut rng = RandomStream::new(12);
        let rho = random_density(3, 3, &mut rng).unwrap();
        assert!(renyi_divergence(&rho, &rho, 0.5).unwrap().abs() < 1e-9);
        let r = diagonal(&[0.9, 0.1]).unwrap();
        let d2 = renyi_divergence(&r, &maximally_mixed(2), 2.0).unwrap();
        assert!((d2 - (2.0f64 * 0.82).log2()).abs() < 1e-12);
        assert!((d2 - 0.713695).abs() < 1e-6);
        assert!(renyi_divergence(&r, &r, 2.5).is_err());
        assert!(renyi_divergence(&r, &r, 0.0).is_err());
        assert!(sandwiched_renyi(&r, &r, 0.4).is_err());
        // alpha = 1 routes to the relative entropy.
        let mm = maximally_mixed(2);
        assert_eq!(renyi_divergence(&r, &mm, 1.0).unwrap(), rel_entropy(&r, &mm).unwrap());
        assert_eq!(sandwiched_renyi(&r, &mm, 1.0).unwrap(), rel_entropy(&r, &mm).unwrap());
    }

    #[test]
    fn sandwiched_against_maximally_mixed() {
        // D^q_alpha(rho || 1/d) = log d - S_alpha(rho).
        let mut rng = RandomStream::new(3);
        let rho = random_density(2, 2, &mut rng).unwrap();
        let alpha = 3.0;
        let lhs = sandwiched_renyi(&rho, &maximally_mixed(2), alpha).unwrap();
        let s_alpha = trace_power(&rho, alpha).log2() / (1.0 - alpha);
        assert!((lhs - (1.0 - s_alpha)).abs() < 1e-10);
    }

    #[test]
    fn support_violations() {
        let z0 = diagonal(&[1.0, 0.0]).unwrap();
        let z1 = diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(renyi_divergence(&z0, &z1, 0.5).unwrap(), f64::INFINITY);
        assert_eq!(renyi_divergence(&z0, &z1, 1.5).unwrap(), f64::INFINITY);
        assert_eq!(sandwiched_renyi(&z0, &z1, 0.7).unwrap(), f64::INFINITY);
        assert_eq!(sandwiched_renyi(&z0, &z1, 2.0).unwrap(), f64::INFINITY);
        // Support of rho inside support of sigma stays finite.
        let mixed = diagonal(&[0.5, 0.5]).unwrap();
        assert!(sandwiched_renyi(&z0, &mixed, 2.0).unwrap().is_finite());
        assert!(rel_entropy(&z0, &mixed).unwrap().is_finite());
    }

    #[test]
    fn relative_entropy_contracts_under_dephasing() {
        let mut rng = RandomStream::new(31);
        for _ in 0..100 {
            let d = 2 + rng.below(3);
            let rho = random_density(d, 1 + rng.below(d), &mut rng).unwrap();
            let sigma = random_density(d, d, &mut rng).unwrap();
            // Random dephasing channel: dephase in a Haar-random basis.
            let u = haar_unitary(d, &mut rng);
            let deph = |s: &DensityMatrix| {
                let rotated = s.conjugate_by(&u.adjoint()).unwrap();
                diagonal(&rotated.matrix().diag_real()).unwrap().conjugate_by(&u).unwrap()
            };
            let before = rel_entropy(&rho, &sigma).unwrap();
            let after = rel_entropy(&deph(&rho), &deph(&sigma)).unwrap();
            assert!(after <= before + 1e-9, "{after} > {before}");
        }
    }
}
