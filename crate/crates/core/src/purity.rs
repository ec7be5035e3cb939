//! Purity monotones under unital operations, the axiom checks they are
//! expected to satisfy, and the random unital channels used to test them.

use rayon::prelude::*;

use crate::coherence::{c_max_closed, mcms, Channel, Distance};
use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, ComplexMatrix, RandomStream};
use crate::majorization::{distillable_purity_1shot, purity_cost_1shot};
use crate::states::{maximally_mixed, pure, random_density, renyi_entropy, validate, DensityMatrix};

/// Orders used in purity reports: rank, collision-free, von Neumann,
/// collision and min-entropy.
pub const REPORT_ALPHAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];
/// Slack for every axiom comparison.
pub const AXIOM_SLACK: f64 = 1e-9;

/// `P_alpha(rho) = log2 d - S_alpha(rho)`.
pub fn p_alpha(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    let log_d = (rho.dim() as f64).log2();
    Ok((log_d - renyi_entropy(rho, alpha)?).clamp(0.0, log_d))
}

/// `P_r(rho) = log2 d - S(rho)`.
pub fn p_rel_entropy(rho: &DensityMatrix) -> f64 {
    p_alpha(rho, 1.0).expect("alpha = 1 is in range")
}

/// `Tr rho^2`.
pub fn p_linear(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho.spectrum().values().iter().map(|x| x * x).sum();
    s.clamp(1.0 / rho.dim() as f64, 1.0)
}

/// `P_2(rho) = log2(d Tr rho^2)`.
pub fn p_2(rho: &DensityMatrix) -> f64 {
    let log_d = (rho.dim() as f64).log2();
    (rho.dim() as f64 * p_linear(rho)).log2().clamp(0.0, log_d)
}

/// `P_g(rho) = 1 - (Tr sqrt(rho))^2 / d`, the infidelity to `1/d`.
pub fn p_geometric(rho: &DensityMatrix) -> f64 {
    let d = rho.dim() as f64;
    let t: f64 = rho.spectrum().support().iter().map(|x| x.sqrt()).sum();
    (1.0 - t * t / d).clamp(0.0, 1.0 - 1.0 / d)
}

/// `P_D(rho) = D(rho, 1/d)`.
pub fn p_distance(rho: &DensityMatrix, distance: Distance) -> Result<f64> {
    c_max_closed(rho, distance)
}

/// `P_C(rho) = C(rho_max)`: the quantifier evaluated on the maximally
/// coherent mixed state with the spectrum of `rho`.
pub fn p_coherence_based(rho: &DensityMatrix, quantifier: &Quantifier<'_>) -> Result<f64> {
    quantifier(&mcms(rho.spectrum(), rho.dim())?)
}

/// Outcome of checking `P_C(rho)` against the quantifier on sampled unital
/// images of `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherencePurityCertificate {
    pub value: f64,
    /// Largest quantifier value over the sampled `Lambda_U[rho]`.
    pub max_sampled: f64,
    pub samples: usize,
    pub holds: bool,
}

/// Evaluates `P_C(rho)` and confirms it dominates the quantifier on
/// `samples` random unital images of `rho`, up to `slack`.
pub fn certify_coherence_based(
    rho: &DensityMatrix,
    quantifier: &Quantifier<'_>,
    samples: usize,
    slack: f64,
    rng: &mut RandomStream,
) -> Result<CoherencePurityCertificate> {
    let value = p_coherence_based(rho, quantifier)?;
    let base = rng.split();
    let d = rho.dim();
    let sampled: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut r = base.child(t as u64);
            let k = 1 + r.below(4);
            quantifier(&random_unital(d, k, &mut r)?.apply(rho)?)
        })
        .collect::<Result<_>>()?;
    let max_sampled = sampled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(CoherencePurityCertificate { value, max_sampled, samples, holds: sampled.iter().all(|&v| v <= value + slack) })
}

/// A mixture of `k` Haar unitaries with Dirichlet weights, Kraus operators
/// `sqrt(p_i) U_i`.
pub fn random_unital(d: usize, k: usize, rng: &mut RandomStream) -> Result<Channel> {
    if k == 0 {
        return Err(Error::Domain("a unital mixture needs at least one unitary".into()));
    }
    let weights = rng.dirichlet(k);
    let kraus = weights.iter().map(|&p| haar_unitary(d, rng).scale(p.sqrt())).collect();
    Channel::new(kraus)
}

/// Purity values at the report orders plus the single-shot conversion rates.
#[derive(Clone, Debug, PartialEq)]
pub struct PurityReport {
    /// `(alpha, P_alpha)` for each of [`REPORT_ALPHAS`].
    pub p_alpha: Vec<(f64, f64)>,
    pub p_geometric: f64,
    pub p_linear: f64,
    pub distillable_1shot: u32,
    pub cost_1shot: u32,
}

pub fn purity_report(rho: &DensityMatrix) -> PurityReport {
    let p_alpha = REPORT_ALPHAS.iter().map(|&a| (a, p_alpha(rho, a).expect("report orders are valid"))).collect();
    PurityReport {
        p_alpha,
        p_geometric: p_geometric(rho),
        p_linear: p_linear(rho),
        distillable_1shot: distillable_purity_1shot(rho),
        cost_1shot: purity_cost_1shot(rho),
    }
}

/// A real-valued function of states under test.
pub type Quantifier<'a> = dyn Fn(&DensityMatrix) -> Result<f64> + Sync + 'a;

/// Result of one axiom over all its trials.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomOutcome {
    pub passed: bool,
    pub checked: usize,
    /// Largest amount by which the tested relation was broken; nonpositive
    /// when it always held strictly.
    pub worst_violation: f64,
    /// The first state (lowest trial index) that broke the relation.
    pub counterexample: Option<ComplexMatrix>,
}

impl AxiomOutcome {
    fn from_trials(trials: Vec<(f64, ComplexMatrix)>) -> Self {
        let checked = trials.len();
        let worst_violation = trials.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let counterexample = trials.into_iter().find(|t| t.0 > AXIOM_SLACK).map(|t| t.1);
        AxiomOutcome { passed: counterexample.is_none(), checked, worst_violation, counterexample }
    }
}

/// Per-axiom results: P1 nonnegativity with zero at `1/d`, P2 monotonicity
/// under unital channels, P3 additivity on products, P4 normalization on
/// pure states, and convexity under mixing.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub d: usize,
    pub trials: usize,
    pub p1: AxiomOutcome,
    pub p2: AxiomOutcome,
    pub p3: AxiomOutcome,
    pub p4: AxiomOutcome,
    pub convexity: AxiomOutcome,
}

impl AxiomReport {
    /// True when P1 through P4 all hold. Convexity is reported separately
    /// since only some quantifiers are expected to be convex.
    pub fn axioms_pass(&self) -> bool {
        self.p1.passed && self.p2.passed && self.p3.passed && self.p4.passed
    }
}

/// Runs every axiom check `trials` times in dimension `d`. Each trial draws
/// from its own child stream, so results do not depend on thread count.
pub fn axiom_suite(quantifier: &Quantifier<'_>, d: usize, trials: usize, rng: &mut RandomStream) -> Result<AxiomReport> {
    if d < 2 {
        return Err(Error::Domain(format!("axiom suite needs d >= 2, got {d}")));
    }
    let log_d = (d as f64).log2();
    let streams: Vec<RandomStream> = (0..5).map(|_| rng.split()).collect();
    let run = |k: usize, f: &(dyn Fn(&mut RandomStream) -> Result<(f64, ComplexMatrix)> + Sync)| -> Result<AxiomOutcome> {
        let trials: Vec<_> =
            (0..trials).into_par_iter().map(|t| f(&mut streams[k].child(t as u64))).collect::<Result<_>>()?;
        Ok(AxiomOutcome::from_trials(trials))
    };
    let random_state = |r: &mut RandomStream, dim: usize| -> Result<DensityMatrix> {
        let rank = 1 + r.below(dim);
        random_density(dim, rank, r)
    };

    let mixed = maximally_mixed(d);
    let at_mixed = quantifier(&mixed)?.abs();
    let mut p1 = run(0, &|r| {
        let rho = random_state(r, d)?;
        Ok((-quantifier(&rho)?, rho.into_matrix()))
    })?;
    p1.checked += 1;
    p1.worst_violation = p1.worst_violation.max(at_mixed);
    if at_mixed > AXIOM_SLACK {
        p1.passed = false;
        p1.counterexample.get_or_insert_with(|| mixed.matrix().clone());
    }

    let p2 = run(1, &|r| {
        let rho = random_state(r, d)?;
        let k = 1 + r.below(4);
        let out = random_unital(d, k, r)?.apply(&rho)?;
        Ok((quantifier(&out)? - quantifier(&rho)?, rho.into_matrix()))
    })?;

    let p3 = run(2, &|r| {
        let rho = random_state(r, d)?;
        let other_dim = 2 + r.below((16 / d).max(2) - 1);
        let sigma = random_state(r, other_dim)?;
        let joint = rho.tensor(&sigma);
        let gap = (quantifier(&joint)? - quantifier(&rho)? - quantifier(&sigma)?).abs();
        Ok((gap, joint.into_matrix()))
    })?;

    let p4 = run(3, &|r| {
        let v: Vec<_> = (0..d).map(|_| r.complex_normal()).collect();
        let psi = pure(&v)?;
        Ok(((quantifier(&psi)? - log_d).abs(), psi.into_matrix()))
    })?;

    let convexity = run(4, &|r| {
        let rho = random_state(r, d)?;
        let sigma = random_state(r, d)?;
        let lambda = r.uniform();
        let mix = validate(&(&rho.matrix().scale(lambda) + &sigma.matrix().scale(1.0 - lambda)))?;
        let bound = lambda * quantifier(&rho)? + (1.0 - lambda) * quantifier(&sigma)?;
        Ok((quantifier(&mix)? - bound, mix.into_matrix()))
    })?;

    Ok(AxiomReport { d, trials, p1, p2, p3, p4, convexity })
}
