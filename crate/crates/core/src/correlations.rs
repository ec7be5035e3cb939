//! Bipartite quantities: negativity, CNOT activation, multipartite coherence,
//! discord upper bounds and the purity/coherence/discord hierarchies, plus a
//! search over the unitary group used by all of them.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::coherence::{c_distance, c_l1, optimal_unitary, Distance, SimplexOptConfig, SimplexResult};
use crate::error::{Error, Result};
use crate::linalg::{
    haar_unitary, hermitian_eig, kron, partial_transpose, ComplexMatrix, Dims, EigenSystem, RandomStream, Subsystem,
    DEFAULT_TOL,
};
use crate::purity::{p_distance, p_geometric, p_rel_entropy};
use crate::states::{mutual_information, DensityMatrix};

/// Slack for the hierarchy comparisons, applied once per link.
pub const CHAIN_SLACK: f64 = 1e-9;
const EPS_START: f64 = 0.3;
const EPS_STOP: f64 = 1e-6;

/// Search budget: random candidates and refinement sweeps.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub restarts: usize,
    /// Maximum number of sweeps over the generator basis.
    pub refine_iters: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { restarts: 64, refine_iters: 200 }
    }
}

/// Which unitaries are searched.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Global,
    /// `U_A (x) U_B` with the given subsystem dimensions.
    Product(Dims),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Best unitary found by [`unitary_optimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    /// Objective at `best_unitary rho best_unitary^dagger`.
    pub best_value: f64,
    pub best_unitary: ComplexMatrix,
    pub restarts: usize,
    pub evals: usize,
    /// Gain of the refinement phase over the best initial candidate.
    pub improved_by_refinement: f64,
}

/// A real-valued function of states.
pub type StateObjective<'a> = dyn Fn(&DensityMatrix) -> Result<f64> + Sync + 'a;

/// Orthonormal Hermitian basis `E_jj`, `(E_jk + E_kj)/sqrt 2`,
/// `i(E_jk - E_kj)/sqrt 2` of `d x d` matrices.
pub fn generator_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut h = ComplexMatrix::zeros(d, d);
        h[(j, j)] = C64::new(1.0, 0.0);
        out.push(h);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(j, k)] = C64::new(s, 0.0);
            re[(k, j)] = C64::new(s, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(j, k)] = C64::new(0.0, s);
            im[(k, j)] = C64::new(0.0, -s);
            out.push(im);
        }
    }
    out
}

/// Generators of the searched group, with eigensystems for fast `exp(i eps H)`.
fn generators(structure: Structure, d: usize) -> Result<Vec<EigenSystem>> {
    let hs = match structure {
        Structure::Global => generator_basis(d),
        Structure::Product(Dims(a, b)) => {
            let ia = ComplexMatrix::identity(a);
            let ib = ComplexMatrix::identity(b);
            let mut hs: Vec<_> = generator_basis(a).iter().map(|h| kron(h, &ib)).collect();
            hs.extend(generator_basis(b).iter().map(|h| kron(&ia, h)));
            hs
        }
    };
    hs.iter().map(|h| hermitian_eig(h, DEFAULT_TOL)).collect()
}

fn exp_i(es: &EigenSystem, eps: f64) -> ComplexMatrix {
    let d = es.dim();
    let v = &es.vectors;
    let mut out = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let ph = C64::from_polar(1.0, eps * es.values[k]);
        for i in 0..d {
            let vik = v[(i, k)] * ph;
            for j in 0..d {
                out[(i, j)] += vik * v[(j, k)].conj();
            }
        }
    }
    out
}

fn draw(structure: Structure, d: usize, rng: &mut RandomStream) -> ComplexMatrix {
    match structure {
        Structure::Global => haar_unitary(d, rng),
        Structure::Product(Dims(a, b)) => {
            let ua = haar_unitary(a, rng);
            kron(&ua, &haar_unitary(b, rng))
        }
    }
}

/// Optimizes `objective(U rho U^dagger)` over unitaries. Candidates are the
/// identity, then `seeds`, then `budget.restarts` Haar draws (product draws
/// for [`Structure::Product`]), each from its own child stream. The best
/// candidate (lowest index on ties) is refined by coordinate hill climbing
/// `U -> U exp(+-i eps H_k)`, halving `eps` from 0.3 after every sweep without
/// progress until it drops below 1e-6.
pub fn unitary_optimize(
    objective: &StateObjective<'_>,
    rho: &DensityMatrix,
    budget: Budget,
    rng: &mut RandomStream,
    structure: Structure,
    sense: Sense,
    seeds: &[ComplexMatrix],
) -> Result<OptResult> {
    if budget.restarts == 0 {
        return Err(Error::ZeroBudget);
    }
    let d = rho.dim();
    if let Structure::Product(dims) = structure {
        dims.check(rho.matrix())?;
    }
    for s in seeds {
        if s.rows() != d || s.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.rows() });
        }
    }
    let better = |a: f64, b: f64| match sense {
        Sense::Maximize => a > b,
        Sense::Minimize => a < b,
    };
    let eval = |u: &ComplexMatrix| -> Result<f64> { objective(&rho.conjugate_by(u)?) };

    let base = rng.split();
    let candidates: Vec<ComplexMatrix> = std::iter::once(ComplexMatrix::identity(d))
        .chain(seeds.iter().cloned())
        .chain((0..budget.restarts).map(|i| draw(structure, d, &mut base.child(i as u64))))
        .collect();
    let values: Vec<f64> = candidates.par_iter().map(eval).collect::<Result<_>>()?;
    let mut evals = values.len();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = i;
        }
    }
    let mut u = candidates[best].clone();
    let mut f = values[best];
    let initial = f;

    let gens = generators(structure, d)?;
    let mut eps = EPS_START;
    for _ in 0..budget.refine_iters {
        if eps < EPS_STOP {
            break;
        }
        let mut moved = false;
        for g in &gens {
            for sign in [1.0, -1.0] {
                let trial = &u * &exp_i(g, sign * eps);
                let v = eval(&trial)?;
                evals += 1;
                if better(v, f) {
                    u = trial;
                    f = v;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            eps *= 0.5;
        }
    }
    Ok(OptResult {
        best_value: f,
        best_unitary: u,
        restarts: budget.restarts,
        evals,
        improved_by_refinement: (f - initial).abs(),
    })
}

/// `sup_U objective(U rho U^dagger)`, certified from below.
pub fn unitary_maximize(
    objective: &StateObjective<'_>,
    rho: &DensityMatrix,
    budget: Budget,
    rng: &mut RandomStream,
    structure: Structure,
) -> Result<OptResult> {
    unitary_optimize(objective, rho, budget, rng, structure, Sense::Maximize, &[])
}

/// `inf_U objective(U rho U^dagger)`, certified from above.
pub fn unitary_minimize(
    objective: &StateObjective<'_>,
    rho: &DensityMatrix,
    budget: Budget,
    rng: &mut RandomStream,
    structure: Structure,
) -> Result<OptResult> {
    unitary_optimize(objective, rho, budget, rng, structure, Sense::Minimize, &[])
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix, dims: Dims) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), Subsystem::B, dims)?;
    let es = hermitian_eig(&pt, DEFAULT_TOL)?;
    Ok(es.values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum())
}

/// The controlled-NOT on two qubits, control first.
pub fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct Activation {
    pub rho_out: DensityMatrix,
    pub negativity: f64,
    pub c_l1_over_2: f64,
}

/// Applies a CNOT to `rho_A (x) |0><0|` with the qubit as control.
pub fn cnot_activation(rho_a: &DensityMatrix) -> Result<Activation> {
    if rho_a.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho_a.dim() });
    }
    let zero = crate::states::diagonal(&[1.0, 0.0])?;
    let rho_out = rho_a.tensor(&zero).conjugate_by(&cnot())?;
    let negativity = negativity(&rho_out, Dims(2, 2))?;
    Ok(Activation { rho_out, negativity, c_l1_over_2: c_l1(rho_a) / 2.0 })
}

/// The bound `N(rho_out) <= sqrt(1 - (1 - 2 P_g)^2)` for a qubit control.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `C_l1(rho_A)`, which meets `rhs` when the eigenbasis is maximally coherent.
    pub c_l1: f64,
}

pub fn negativity_purity_bound(rho_a: &DensityMatrix) -> Result<NegativityBound> {
    let act = cnot_activation(rho_a)?;
    let x = 1.0 - 2.0 * p_geometric(rho_a);
    let rhs = (1.0 - x * x).max(0.0).sqrt();
    Ok(NegativityBound { lhs: act.negativity, rhs, holds: act.negativity <= rhs + 1e-10, c_l1: c_l1(rho_a) })
}

/// `C_N(rho)`: distance-based coherence in the product computational basis.
pub fn c_n(rho: &DensityMatrix, dims: Dims, distance: Distance, opt: &SimplexOptConfig) -> Result<SimplexResult> {
    dims.check(rho.matrix())?;
    c_distance(rho, distance, opt)
}

/// Upper bound on the distance-based discord: `min over product U` of
/// `C_N(U rho U^dagger)`, identity included.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscordBound {
    pub value: f64,
    pub unitary: ComplexMatrix,
    pub evals: usize,
}

pub fn discord_upper(
    rho: &DensityMatrix,
    dims: Dims,
    distance: Distance,
    budget: Budget,
    opt: &SimplexOptConfig,
    rng: &mut RandomStream,
) -> Result<DiscordBound> {
    let obj = |s: &DensityMatrix| Ok(c_n(s, dims, distance, opt)?.value);
    let r = unitary_minimize(&obj, rho, budget, rng, Structure::Product(dims))?;
    Ok(DiscordBound { value: r.best_value, unitary: r.best_unitary, evals: r.evals })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IMaxCheck {
    pub i_max_lower: f64,
    pub p_r: f64,
    pub gap: f64,
    pub unitary: ComplexMatrix,
}

/// Compares `max_U I(A:B)` found by search with `P_r`, which bounds it.
pub fn i_max_check(rho: &DensityMatrix, dims: Dims, budget: Budget, rng: &mut RandomStream) -> Result<IMaxCheck> {
    if dims.0 != dims.1 {
        return Err(Error::DimensionMismatch { expected: dims.0, found: dims.1 });
    }
    dims.check(rho.matrix())?;
    let obj = |s: &DensityMatrix| mutual_information(s, dims);
    let r = unitary_maximize(&obj, rho, budget, rng, Structure::Global)?;
    let p_r = p_rel_entropy(rho);
    Ok(IMaxCheck { i_max_lower: r.best_value, p_r, gap: p_r - r.best_value, unitary: r.best_unitary })
}

/// The chain `P >= C_N >= D` with its witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyReport {
    pub distance: Distance,
    /// `D(rho, 1/d)`, witnessed by the maximally mixed state.
    pub purity: f64,
    pub coherence_n: f64,
    /// Diagonal of the closest incoherent state found.
    pub coherence_witness: Vec<f64>,
    pub discord_upper: f64,
    /// Product unitary achieving `discord_upper`.
    pub discord_witness: ComplexMatrix,
}

impl HierarchyReport {
    pub fn chain_holds(&self) -> bool {
        self.purity >= self.coherence_n - CHAIN_SLACK && self.coherence_n - CHAIN_SLACK >= self.discord_upper - 2.0 * CHAIN_SLACK
    }
}

pub fn hierarchy_report(
    rho: &DensityMatrix,
    dims: Dims,
    distance: Distance,
    budget: Budget,
    opt: &SimplexOptConfig,
    rng: &mut RandomStream,
) -> Result<HierarchyReport> {
    let purity = p_distance(rho, distance)?;
    let cn = c_n(rho, dims, distance, opt)?;
    let disc = discord_upper(rho, dims, distance, budget, opt, rng)?;
    Ok(HierarchyReport {
        distance,
        purity,
        coherence_n: cn.value,
        coherence_witness: cn.minimizer,
        discord_upper: disc.value,
        discord_witness: disc.unitary,
    })
}

/// The chain `P = C_max >= D_max` checked with search lower bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxHierarchyReport {
    pub distance: Distance,
    pub purity: f64,
    pub c_max_lower: f64,
    pub c_max_unitary: ComplexMatrix,
    pub d_max_lower: f64,
    pub d_max_unitary: ComplexMatrix,
    /// `P - C_max_lower`, the shortfall of the search.
    pub optimizer_gap: f64,
}

impl MaxHierarchyReport {
    pub fn holds(&self) -> bool {
        self.c_max_lower <= self.purity + CHAIN_SLACK && self.d_max_lower <= self.purity + CHAIN_SLACK
    }
}

/// `outer` drives the global searches; `inner` drives the product-unitary
/// minimization inside every discord evaluation.
pub fn max_hierarchy_check(
    rho: &DensityMatrix,
    dims: Dims,
    distance: Distance,
    outer: Budget,
    inner: Budget,
    opt: &SimplexOptConfig,
    rng: &mut RandomStream,
) -> Result<MaxHierarchyReport> {
    dims.check(rho.matrix())?;
    let purity = p_distance(rho, distance)?;
    let cn = |s: &DensityMatrix| Ok(c_n(s, dims, distance, opt)?.value);
    let c_max = unitary_maximize(&cn, rho, outer, &mut rng.split(), Structure::Global)?;
    let inner_root = rng.split();
    let disc = |s: &DensityMatrix| Ok(discord_upper(s, dims, distance, inner, opt, &mut inner_root.clone())?.value);
    let d_max = unitary_maximize(&disc, rho, outer, &mut rng.split(), Structure::Global)?;
    Ok(MaxHierarchyReport {
        distance,
        purity,
        c_max_lower: c_max.best_value,
        c_max_unitary: c_max.best_unitary,
        d_max_lower: d_max.best_value,
        d_max_unitary: d_max.best_unitary,
        optimizer_gap: purity - c_max.best_value,
    })
}

/// Search seeded with the composite `optimal_unitary`, which reaches the
/// closed-form ceiling at its first candidates.
pub fn unitary_maximize_seeded(
    objective: &StateObjective<'_>,
    rho: &DensityMatrix,
    budget: Budget,
    rng: &mut RandomStream,
) -> Result<OptResult> {
    unitary_optimize(objective, rho, budget, rng, Structure::Global, Sense::Maximize, &[optimal_unitary(rho)])
}
