//! Verification suites run by `cohpure verify`. Each suite checks a list of
//! properties over seeded random trials and reports the worst deviation and
//! the first counterexample for each.

use anyhow::Result;
use serde::Serialize;

use cohpure::coherence::{
    c_alpha, c_distance, c_geometric, c_l1, c_max_closed, c_rel_entropy, dephase, mcms, mio_channel_from_mixture,
    mio_channel_from_unitary, optimal_unitary, Distance, SimplexOptConfig,
};
use cohpure::correlations::{cnot_activation, negativity_purity_bound, unitary_maximize, Budget, Structure};
use cohpure::linalg::{haar_unitary, ComplexMatrix};
use cohpure::majorization::{
    brute_force_cost, brute_force_distill, convertible_unital, cost_by_scan, distill_by_scan, distillable_purity_1shot,
    purity_cost_1shot,
};
use cohpure::purity::{axiom_suite, p_alpha, p_geometric, p_linear, random_unital, AxiomOutcome, Quantifier, REPORT_ALPHAS};
use cohpure::states::{diagonal, maximally_mixed, random_density};
use cohpure::{DensityMatrix, RandomStream, Spectrum};

use crate::report::{alpha_label, matrix_json};
use crate::Suite;

/// Tolerance where a closed form is compared.
const CLOSED_TOL: f64 = 1e-9;
/// Tolerance where the simplex optimizer is in the loop.
const OPT_TOL: f64 = 1e-4;
/// Cap on `d1 * d2` for the exhaustive ancilla scan.
const SCAN_CAP: u64 = 1 << 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// A known-negative property that failed as expected.
    ExpectedFail,
}

#[derive(Debug, Serialize)]
pub struct Property {
    pub name: String,
    /// Whether the property is expected to hold.
    pub expected: bool,
    pub status: Status,
    pub checked: usize,
    pub tolerance: f64,
    /// Largest deviation seen; the property holds when it stays within tolerance.
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: &'static str,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<Property>,
    pub all_pass: bool,
}

/// Accumulates deviations for one property.
struct Check {
    name: String,
    expected: bool,
    tolerance: f64,
    checked: usize,
    worst: f64,
    counterexample: Option<ComplexMatrix>,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Check { name: name.into(), expected: true, tolerance, checked: 0, worst: 0.0, counterexample: None }
    }

    fn record(&mut self, deviation: f64, state: &DensityMatrix) {
        self.checked += 1;
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.worst = self.worst.max(deviation);
        if deviation > self.tolerance && self.counterexample.is_none() {
            self.counterexample = Some(state.matrix().clone());
        }
    }

    fn finish(self) -> Property {
        let held = self.counterexample.is_none();
        let status = match (held, self.expected) {
            (true, true) => Status::Pass,
            (false, false) => Status::ExpectedFail,
            _ => Status::Fail,
        };
        Property {
            name: self.name,
            expected: self.expected,
            status,
            checked: self.checked,
            tolerance: self.tolerance,
            worst: self.worst,
            counterexample: self.counterexample.as_ref().map(matrix_json),
        }
    }
}

fn from_outcome(name: String, expected: bool, o: &AxiomOutcome) -> Property {
    let c = Check {
        name,
        expected,
        tolerance: cohpure::purity::AXIOM_SLACK,
        checked: o.checked,
        worst: o.worst_violation.max(0.0),
        counterexample: o.counterexample.clone(),
    };
    c.finish()
}

pub fn run(suite: Suite, seed: u64, trials: usize) -> Result<SuiteReport> {
    let root = RandomStream::new(seed);
    let (name, properties) = match suite {
        Suite::Theorem1 => ("theorem1", theorem1(&root, trials)?),
        Suite::Theorem2 => ("theorem2", theorem2(&root, trials)?),
        Suite::Axioms => ("axioms", axioms(&root, trials)?),
        Suite::Majorization => ("majorization", majorization(&root, trials)?),
        Suite::AppendixG => ("appendixG", appendix_g(&root, trials)?),
    };
    let all_pass = properties.iter().all(|p| p.status != Status::Fail);
    Ok(SuiteReport { schema_version: crate::statefile::SCHEMA_VERSION, suite: name.into(), seed, trials, properties, all_pass })
}

fn random_state(rng: &mut RandomStream, d: usize) -> Result<DensityMatrix> {
    let rank = 1 + rng.below(d);
    Ok(random_density(d, rank, rng)?)
}

/// Quantifier values never exceed their value at `rho_max`, and the MIO
/// Kraus constructions behave as claimed.
fn theorem1(root: &RandomStream, trials: usize) -> Result<Vec<Property>> {
    let opt = SimplexOptConfig::light(0);
    let mut cr = Check::new("c_rel_entropy(U rho_max U^dagger) <= c_rel_entropy(rho_max)", CLOSED_TOL);
    let mut ca: Vec<(f64, Check)> = [0.5, 2.0]
        .iter()
        .map(|&a| (a, Check::new(format!("c_alpha[{}](U rho_max U^dagger) <= at rho_max", alpha_label(a)), OPT_TOL)))
        .collect();
    let mut cd: Vec<(Distance, Check)> = Distance::MENU
        .iter()
        .map(|&d| {
            let tol = if d == Distance::RelEntropy { CLOSED_TOL } else { OPT_TOL };
            (d, Check::new(format!("c_distance[{d}](U rho_max U^dagger) <= at rho_max"), tol))
        })
        .collect();
    let mut to_mixed = Check::new("MIO Kraus map incoherent states to 1/d", CLOSED_TOL);
    let mut reproduce = Check::new("MIO Kraus map rho_max to U rho_max U^dagger", CLOSED_TOL);
    let mut mixture = Check::new("MIO mixture maps rho_max to the unitary mixture", CLOSED_TOL);

    for t in 0..trials {
        let mut rng = root.child(t as u64);
        let d = 2 + rng.below(4);
        let k = 1 + rng.below(d);
        let spectrum = Spectrum::new(&rng.dirichlet(k))?;
        let rho_max = mcms(&spectrum, d)?;
        let u = haar_unitary(d, &mut rng);
        let rotated = rho_max.conjugate_by(&u)?;

        cr.record(c_rel_entropy(&rotated) - c_rel_entropy(&rho_max), &rotated);
        for (a, c) in ca.iter_mut() {
            let top = c_alpha(&rho_max, *a, &opt)?.value;
            c.record(c_alpha(&rotated, *a, &opt)?.value - top, &rotated);
        }
        for (dist, c) in cd.iter_mut() {
            let top = c_distance(&rho_max, *dist, &opt)?.value;
            c.record(c_distance(&rotated, *dist, &opt)?.value - top, &rotated);
        }

        let ch = mio_channel_from_unitary(&u)?;
        let incoherent = dephase(&random_state(&mut rng, d)?);
        to_mixed.record(ch.apply(&incoherent)?.matrix().max_abs_diff(maximally_mixed(d).matrix()), &incoherent);
        reproduce.record(ch.apply(&rho_max)?.matrix().max_abs_diff(rotated.matrix()), &rho_max);

        let n = 1 + rng.below(3);
        let weights = rng.dirichlet(n);
        let us: Vec<ComplexMatrix> = (0..n).map(|_| haar_unitary(d, &mut rng)).collect();
        let mut expect = ComplexMatrix::zeros(d, d);
        for (w, ui) in weights.iter().zip(&us) {
            expect = &expect + &rho_max.matrix().conjugate_by(ui).scale(*w);
        }
        let mix = mio_channel_from_mixture(&weights, &us)?;
        mixture.record(mix.apply(&rho_max)?.matrix().max_abs_diff(&expect), &rho_max);
        to_mixed.record(mix.apply(&incoherent)?.matrix().max_abs_diff(maximally_mixed(d).matrix()), &incoherent);
    }
    let mut out = vec![cr.finish()];
    out.extend(ca.into_iter().map(|(_, c)| c.finish()));
    out.extend(cd.into_iter().map(|(_, c)| c.finish()));
    out.extend([to_mixed.finish(), reproduce.finish(), mixture.finish()]);
    Ok(out)
}

/// The optimal unitary attains `D(rho, 1/d)` and unitary search never
/// exceeds it.
fn theorem2(root: &RandomStream, trials: usize) -> Result<Vec<Property>> {
    let opt = SimplexOptConfig::light(0);
    let mut unitary = Check::new("optimal_unitary is unitary", CLOSED_TOL);
    let mut maps = Check::new("optimal_unitary maps rho to rho_max", CLOSED_TOL);
    let mut attained: Vec<(Distance, Check)> = Distance::MENU
        .iter()
        .map(|&d| {
            let tol = if d == Distance::RelEntropy { 1e-6 } else { OPT_TOL };
            (d, Check::new(format!("C[{d}](V rho V^dagger) = D(rho, 1/d)"), tol))
        })
        .collect();
    let mut ceiling: Vec<(Distance, Check)> =
        Distance::MENU.iter().map(|&d| (d, Check::new(format!("sup_U C[{d}](U rho U^dagger) <= D(rho, 1/d)"), CLOSED_TOL))).collect();

    for t in 0..trials {
        let mut rng = root.child(t as u64);
        let d = 2 + rng.below(5);
        let rho = random_state(&mut rng, d)?;
        let v = optimal_unitary(&rho);
        unitary.record(v.unitarity_defect(), &rho);
        let rv = rho.conjugate_by(&v)?;
        maps.record(rv.matrix().max_abs_diff(mcms(rho.spectrum(), d)?.matrix()), &rho);
        for ((dist, a), (_, c)) in attained.iter_mut().zip(ceiling.iter_mut()) {
            let top = c_max_closed(&rho, *dist)?;
            a.record((c_distance(&rv, *dist, &opt)?.value - top).abs(), &rho);
            let budget = if *dist == Distance::RelEntropy {
                Budget { restarts: 8, refine_iters: 5 }
            } else {
                Budget { restarts: 2, refine_iters: 1 }
            };
            let obj = |s: &DensityMatrix| Ok(c_distance(s, *dist, &opt)?.value);
            let best = unitary_maximize(&obj, &rho, budget, &mut rng.split(), Structure::Global)?;
            c.record(best.best_value - top, &rho);
        }
    }
    let mut out = vec![unitary.finish(), maps.finish()];
    out.extend(attained.into_iter().map(|(_, c)| c.finish()));
    out.extend(ceiling.into_iter().map(|(_, c)| c.finish()));
    Ok(out)
}

/// Axioms for the Renyi purities, plus the known failures of the linear
/// and geometric purities.
fn axioms(root: &RandomStream, trials: usize) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    let mut stream = root.clone();
    for d in 2..=4 {
        for &alpha in &REPORT_ALPHAS {
            let q = move |s: &DensityMatrix| p_alpha(s, alpha);
            let rep = axiom_suite(&q, d, trials, &mut stream)?;
            let tag = format!("p_alpha[{}] d={d}", alpha_label(alpha));
            for (ax, o) in [("P1", &rep.p1), ("P2", &rep.p2), ("P3", &rep.p3), ("P4", &rep.p4)] {
                out.push(from_outcome(format!("{tag} {ax}"), true, o));
            }
            if alpha <= 1.0 {
                out.push(from_outcome(format!("{tag} convexity"), true, &rep.convexity));
            }
        }
        let linear: &Quantifier = &|s| Ok(p_linear(s));
        let rep = axiom_suite(linear, d, trials, &mut stream)?;
        // Tr rho^2 = 1 = log2 d for pure qubits, so normalization fails only from d = 3.
        for (ax, expected, o) in
            [("P1", false, &rep.p1), ("P2", true, &rep.p2), ("P3", false, &rep.p3), ("P4", d == 2, &rep.p4)]
        {
            out.push(from_outcome(format!("p_linear d={d} {ax}"), expected, o));
        }
        let geometric: &Quantifier = &|s| Ok(p_geometric(s));
        let rep = axiom_suite(geometric, d, trials, &mut stream)?;
        for (ax, expected, o) in
            [("P1", true, &rep.p1), ("P2", true, &rep.p2), ("P3", false, &rep.p3), ("P4", false, &rep.p4)]
        {
            out.push(from_outcome(format!("p_geometric d={d} {ax}"), expected, o));
        }
    }
    Ok(out)
}

/// Closed-form single-shot rates against explicit majorization checks.
fn majorization(root: &RandomStream, trials: usize) -> Result<Vec<Property>> {
    let mut distill = Check::new("distillable purity formula = explicit check", 0.0);
    let mut cost = Check::new("purity cost formula = explicit check", 0.0);
    let mut distill_scan = Check::new("distillable purity formula = ancilla scan", 0.0);
    let mut cost_scan = Check::new("purity cost formula = ancilla scan", 0.0);
    let mut order = Check::new("distillable purity <= purity cost", 0.0);
    let mut reachable = Check::new("rho converts to its unital images", 0.0);
    for t in 0..trials {
        let mut rng = root.child(t as u64);
        let d = 2 + rng.below(15);
        let rho = random_state(&mut rng, d)?;
        let m = distillable_purity_1shot(&rho);
        let c = purity_cost_1shot(&rho);
        let max_m = d.ilog2() + 1;
        let oracle_m = (0..=max_m).filter(|&k| brute_force_distill(&rho, k).feasible).max().unwrap_or(0);
        let oracle_c = (0..=max_m).find(|&k| brute_force_cost(&rho, k).feasible).unwrap_or(u32::MAX);
        distill.record((m as f64 - oracle_m as f64).abs(), &rho);
        cost.record((c as f64 - oracle_c as f64).abs(), &rho);
        distill_scan.record((m as f64 - distill_by_scan(&rho, SCAN_CAP) as f64).abs(), &rho);
        let scanned = cost_by_scan(&rho, SCAN_CAP).map_or(f64::INFINITY, |s| (c as f64 - s as f64).abs());
        cost_scan.record(scanned, &rho);
        order.record(if m <= c { 0.0 } else { 1.0 }, &rho);
        let k = 1 + rng.below(4);
        let image = random_unital(d, k, &mut rng)?.apply(&rho)?;
        reachable.record(if convertible_unital(&rho, &image)? { 0.0 } else { 1.0 }, &rho);
    }
    Ok(vec![distill.finish(), cost.finish(), distill_scan.finish(), cost_scan.finish(), order.finish(), reachable.finish()])
}

/// CNOT activation identity and the negativity bounds for qubits.
fn appendix_g(root: &RandomStream, trials: usize) -> Result<Vec<Property>> {
    let opt = SimplexOptConfig::light(0);
    let mut identity = Check::new("N(CNOT(rho (x) |0><0|)) = C_l1(rho)/2", 1e-10);
    let mut bound = Check::new("N <= sqrt(1 - (1 - 2 P_g)^2)", 1e-10);
    let mut equality = Check::new("C_l1 = sqrt(1 - (1 - 2 P_g)^2) for eigenbasis |+>, |->", CLOSED_TOL);
    let mut qubit = Check::new("C_l1 = sqrt(1 - (1 - 2 C_g)^2) for qubits", OPT_TOL);
    let plus_basis = cohpure::coherence::fourier_basis(2);
    for t in 0..trials {
        let mut rng = root.child(t as u64);
        let rho = random_state(&mut rng, 2)?;
        let act = cnot_activation(&rho)?;
        identity.record((act.negativity - act.c_l1_over_2).abs(), &rho);
        let b = negativity_purity_bound(&rho)?;
        bound.record(b.lhs - b.rhs, &rho);
        let cg = c_geometric(&rho, &opt)?.value;
        let x = 1.0 - 2.0 * cg;
        qubit.record((c_l1(&rho) - (1.0 - x * x).max(0.0).sqrt()).abs(), &rho);

        let p = rng.uniform();
        let pm = diagonal(&[p, 1.0 - p])?.conjugate_by(plus_basis.matrix())?;
        let b = negativity_purity_bound(&pm)?;
        equality.record((b.c_l1 - b.rhs).abs(), &pm);
    }
    Ok(vec![identity.finish(), bound.finish(), equality.finish(), qubit.finish()])
}
