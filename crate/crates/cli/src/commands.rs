//! One function per subcommand. Each returns the process exit code; errors
//! returned from here are reported as input errors.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use cohpure::coherence::{c_alpha, c_distance, c_l1, c_max_closed, c_rel_entropy, mcms as build_mcms, Distance, SimplexOptConfig};
use cohpure::correlations::{hierarchy_report, max_hierarchy_check, Budget};
use cohpure::majorization::{
    brute_force_cost, brute_force_distill, convertible_unital, distillable_purity_1shot, prefix_sums, purity_cost_1shot,
};
use cohpure::purity::{p_2, p_distance, p_rel_entropy, purity_report};
use cohpure::states::{from_bloch, random_density};
use cohpure::{RandomStream, Spectrum};

use crate::report::{alpha_label, emit_json, matrix_json, prefix_json, CertificateJson, PrefixSum};
use crate::statefile::{write_atomic, StateFile, SCHEMA_VERSION};
use crate::{
    BlochArgs, ConvertArgs, Format, HierarchyArgs, McmsArgs, QuantifyArgs, RandomArgs, StateArg, VerifyArgs, EXIT_INVARIANT,
    EXIT_OK, EXIT_OPTIMIZER,
};

#[derive(Debug, Serialize)]
struct Valued {
    parameter: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

#[derive(Debug, Serialize)]
struct PurityJson {
    p_alpha: Vec<Valued>,
    p_rel_entropy: f64,
    p_linear: f64,
    p_2: f64,
    p_geometric: f64,
    p_distance: Vec<Valued>,
    distillable_1shot: u32,
    cost_1shot: u32,
}

#[derive(Debug, Serialize)]
struct CoherenceJson {
    c_rel_entropy: f64,
    c_l1: f64,
    c_alpha: Vec<Valued>,
    c_distance: Vec<Valued>,
    c_max: Vec<Valued>,
}

#[derive(Debug, Serialize)]
struct QuantifyJson {
    schema_version: &'static str,
    command: &'static str,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    purity: PurityJson,
    coherence: CoherenceJson,
    optimizer_converged: bool,
}

pub fn quantify(a: &QuantifyArgs) -> Result<i32> {
    let (file, rho) = StateFile::load(&a.state)?;
    let opt = SimplexOptConfig { restarts: a.restarts, max_iters: a.max_iters, tol: 1e-10, seed: a.seed };
    let distances = if a.distances.is_empty() { Distance::MENU.to_vec() } else { a.distances.clone() };
    let rep = purity_report(&rho);
    let mut converged = true;

    let mut c_alphas = Vec::new();
    for &alpha in &a.alpha {
        let r = c_alpha(&rho, alpha, &opt).with_context(|| format!("c_alpha at alpha = {alpha}"))?;
        converged &= r.converged;
        c_alphas.push(Valued { parameter: alpha_label(alpha), value: r.value, converged: Some(r.converged) });
    }
    let mut c_dist = Vec::new();
    let mut c_max = Vec::new();
    let mut p_dist = Vec::new();
    for &dist in &distances {
        let r = c_distance(&rho, dist, &opt)?;
        converged &= r.converged;
        c_dist.push(Valued { parameter: dist.to_string(), value: r.value, converged: Some(r.converged) });
        c_max.push(Valued { parameter: dist.to_string(), value: c_max_closed(&rho, dist)?, converged: None });
        p_dist.push(Valued { parameter: dist.to_string(), value: p_distance(&rho, dist)?, converged: None });
    }
    let report = QuantifyJson {
        schema_version: SCHEMA_VERSION,
        command: "quantify",
        dim: rho.dim(),
        label: file.label,
        purity: PurityJson {
            p_alpha: rep
                .p_alpha
                .iter()
                .map(|&(al, v)| Valued { parameter: alpha_label(al), value: v, converged: None })
                .collect(),
            p_rel_entropy: p_rel_entropy(&rho),
            p_linear: rep.p_linear,
            p_2: p_2(&rho),
            p_geometric: rep.p_geometric,
            p_distance: p_dist,
            distillable_1shot: rep.distillable_1shot,
            cost_1shot: rep.cost_1shot,
        },
        coherence: CoherenceJson { c_rel_entropy: c_rel_entropy(&rho), c_l1: c_l1(&rho), c_alpha: c_alphas, c_distance: c_dist, c_max },
        optimizer_converged: converged,
    };
    match a.format {
        Format::Json => emit_json(&report)?,
        Format::Csv => write_quantify_csv(&report)?,
    }
    Ok(if converged { EXIT_OK } else { EXIT_OPTIMIZER })
}

fn write_quantify_csv(r: &QuantifyJson) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["group", "quantity", "parameter", "value", "converged"])?;
    let mut row = |group: &str, q: &str, p: &str, v: f64, c: Option<bool>| {
        let c = c.map(|c| c.to_string()).unwrap_or_default();
        w.write_record([group, q, p, &v.to_string(), &c])
    };
    let p = &r.purity;
    for v in &p.p_alpha {
        row("purity", "p_alpha", &v.parameter, v.value, None)?;
    }
    row("purity", "p_rel_entropy", "", p.p_rel_entropy, None)?;
    row("purity", "p_linear", "", p.p_linear, None)?;
    row("purity", "p_2", "", p.p_2, None)?;
    row("purity", "p_geometric", "", p.p_geometric, None)?;
    for v in &p.p_distance {
        row("purity", "p_distance", &v.parameter, v.value, None)?;
    }
    row("purity", "distillable_1shot", "", p.distillable_1shot as f64, None)?;
    row("purity", "cost_1shot", "", p.cost_1shot as f64, None)?;
    let c = &r.coherence;
    row("coherence", "c_rel_entropy", "", c.c_rel_entropy, None)?;
    row("coherence", "c_l1", "", c.c_l1, None)?;
    for v in &c.c_alpha {
        row("coherence", "c_alpha", &v.parameter, v.value, v.converged)?;
    }
    for v in &c.c_distance {
        row("coherence", "c_distance", &v.parameter, v.value, v.converged)?;
    }
    for v in &c.c_max {
        row("coherence", "c_max", &v.parameter, v.value, None)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct McmsJson {
    schema_version: &'static str,
    command: &'static str,
    dim: usize,
    spectrum: Vec<f64>,
    c_rel_entropy: f64,
    p_rel_entropy: f64,
    difference: f64,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
}

pub fn mcms(a: &McmsArgs) -> Result<i32> {
    let spectrum = Spectrum::new(&a.spectrum).context("invalid spectrum")?;
    let rho = build_mcms(&spectrum, a.dim).context("invalid spectrum for this dimension")?;
    if let Some(out) = &a.out {
        StateFile::from_state(&rho, a.label.clone(), None).write(out)?;
    }
    let c_r = c_rel_entropy(&rho);
    let p_r = p_rel_entropy(&rho);
    let difference = (c_r - p_r).abs();
    let agree = difference <= 1e-9;
    emit_json(&McmsJson {
        schema_version: SCHEMA_VERSION,
        command: "mcms",
        dim: a.dim,
        spectrum: spectrum.padded(a.dim)?,
        c_rel_entropy: c_r,
        p_rel_entropy: p_r,
        difference,
        agree,
        out: a.out.as_ref().map(|p| p.display().to_string()),
    })?;
    Ok(if agree { EXIT_OK } else { EXIT_INVARIANT })
}

#[derive(Debug, Serialize)]
struct ConvertJson {
    schema_version: &'static str,
    command: &'static str,
    dim: usize,
    convertible: bool,
    prefix_sums: Vec<PrefixSum>,
}

pub fn convert(a: &ConvertArgs) -> Result<i32> {
    let (_, from) = StateFile::load(&a.from)?;
    let (_, to) = StateFile::load(&a.to)?;
    if from.dim() != to.dim() {
        bail!("states have different dimensions: {} and {}", from.dim(), to.dim());
    }
    let d = from.dim();
    let convertible = convertible_unital(&from, &to)?;
    let sums = prefix_sums(&from.spectrum().padded(d)?, &to.spectrum().padded(d)?);
    emit_json(&ConvertJson { schema_version: SCHEMA_VERSION, command: "convert", dim: d, convertible, prefix_sums: prefix_json(&sums) })?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct RateJson {
    schema_version: &'static str,
    command: &'static str,
    dim: usize,
    value: u32,
    /// The explicit check at `value`, which must be feasible.
    certificate: CertificateJson,
    /// The explicit check one step beyond `value`, which must be infeasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    beyond: Option<CertificateJson>,
}

pub fn distill(a: &StateArg) -> Result<i32> {
    let (_, rho) = StateFile::load(&a.state)?;
    let m = distillable_purity_1shot(&rho);
    let at = brute_force_distill(&rho, m);
    let beyond = brute_force_distill(&rho, m + 1);
    let ok = at.feasible && !beyond.feasible;
    emit_json(&RateJson {
        schema_version: SCHEMA_VERSION,
        command: "distill",
        dim: rho.dim(),
        value: m,
        certificate: (&at).into(),
        beyond: Some((&beyond).into()),
    })?;
    Ok(if ok { EXIT_OK } else { EXIT_INVARIANT })
}

pub fn cost(a: &StateArg) -> Result<i32> {
    let (_, rho) = StateFile::load(&a.state)?;
    let m = purity_cost_1shot(&rho);
    let at = brute_force_cost(&rho, m);
    let below = m.checked_sub(1).map(|k| brute_force_cost(&rho, k));
    let ok = at.feasible && at.prefix_sums_hold() && below.as_ref().is_none_or(|b| !b.feasible);
    emit_json(&RateJson {
        schema_version: SCHEMA_VERSION,
        command: "cost",
        dim: rho.dim(),
        value: m,
        certificate: (&at).into(),
        beyond: below.as_ref().map(Into::into),
    })?;
    Ok(if ok { EXIT_OK } else { EXIT_INVARIANT })
}

#[derive(Debug, Serialize)]
struct HierarchyJson {
    purity: f64,
    coherence_n: f64,
    discord_upper: f64,
    coherence_witness: Vec<f64>,
    discord_witness: Vec<Vec<[f64; 2]>>,
    chain_holds: bool,
}

#[derive(Debug, Serialize)]
struct MaxHierarchyJson {
    purity: f64,
    c_max_lower: f64,
    d_max_lower: f64,
    optimizer_gap: f64,
    c_max_unitary: Vec<Vec<[f64; 2]>>,
    d_max_unitary: Vec<Vec<[f64; 2]>>,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct HierarchyReportJson {
    schema_version: &'static str,
    command: &'static str,
    distance: String,
    dims: [usize; 2],
    seed: u64,
    hierarchy: HierarchyJson,
    max_hierarchy: MaxHierarchyJson,
    all_hold: bool,
}

pub fn hierarchy(a: &HierarchyArgs) -> Result<i32> {
    let (file, rho) = StateFile::load(&a.state)?;
    let dims = a.dims.or(file.bipartite_dims()).context("no subsystem dimensions: pass --dims or set dims in the file")?;
    if dims.total() != rho.dim() {
        bail!("dims {}x{} do not match state dimension {}", dims.0, dims.1, rho.dim());
    }
    let outer = Budget { restarts: a.restarts, refine_iters: a.refine };
    let inner = Budget { restarts: a.inner_restarts, refine_iters: a.inner_refine };
    let opt = SimplexOptConfig::light(a.seed);
    let mut rng = RandomStream::new(a.seed);
    let h = hierarchy_report(&rho, dims, a.distance, outer, &opt, &mut rng.split())?;
    let m = max_hierarchy_check(&rho, dims, a.distance, outer, inner, &opt, &mut rng.split())?;
    let all_hold = h.chain_holds() && m.holds();
    emit_json(&HierarchyReportJson {
        schema_version: SCHEMA_VERSION,
        command: "hierarchy",
        distance: a.distance.to_string(),
        dims: [dims.0, dims.1],
        seed: a.seed,
        hierarchy: HierarchyJson {
            purity: h.purity,
            coherence_n: h.coherence_n,
            discord_upper: h.discord_upper,
            coherence_witness: h.coherence_witness.clone(),
            discord_witness: matrix_json(&h.discord_witness),
            chain_holds: h.chain_holds(),
        },
        max_hierarchy: MaxHierarchyJson {
            purity: m.purity,
            c_max_lower: m.c_max_lower,
            d_max_lower: m.d_max_lower,
            optimizer_gap: m.optimizer_gap,
            c_max_unitary: matrix_json(&m.c_max_unitary),
            d_max_unitary: matrix_json(&m.d_max_unitary),
            holds: m.holds(),
        },
        all_hold,
    })?;
    Ok(if all_hold { EXIT_OK } else { EXIT_INVARIANT })
}

pub fn verify(a: &VerifyArgs) -> Result<i32> {
    let report = crate::suites::run(a.suite, a.seed, a.trials)?;
    emit_json(&report)?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_INVARIANT })
}

/// Quantifiers available for Bloch-ball export.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum BlochQuantifier {
    L1,
    Coherence(Distance),
    Purity(Distance),
}

impl std::str::FromStr for BlochQuantifier {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "c_l1" {
            return Ok(BlochQuantifier::L1);
        }
        if let Some(d) = s.strip_prefix("c_") {
            return Ok(BlochQuantifier::Coherence(d.parse()?));
        }
        if let Some(d) = s.strip_prefix("p_") {
            return Ok(BlochQuantifier::Purity(d.parse()?));
        }
        bail!("unknown quantifier '{s}': expected c_l1, c_<distance> or p_<distance>")
    }
}

impl BlochQuantifier {
    pub fn eval(self, r: [f64; 3]) -> Result<f64> {
        let rho = from_bloch(r)?;
        Ok(match self {
            BlochQuantifier::L1 => c_l1(&rho),
            BlochQuantifier::Coherence(d) => c_distance(&rho, d, &SimplexOptConfig::light(0))?.value,
            BlochQuantifier::Purity(d) => p_distance(&rho, d)?,
        })
    }
}

/// Grid points `-1 + 2i/(n-1)` per axis that lie in the unit ball.
pub fn bloch_grid(n: usize) -> Vec<[f64; 3]> {
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = [coord(i), coord(j), coord(k)];
                if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
                    pts.push(p);
                }
            }
        }
    }
    pts
}

#[derive(Debug, Serialize)]
struct BlochJson {
    schema_version: &'static str,
    command: &'static str,
    quantifier: String,
    grid: usize,
    points: usize,
    out: String,
}

pub fn bloch(a: &BlochArgs) -> Result<i32> {
    if a.grid < 2 {
        bail!("--grid must be at least 2, got {}", a.grid);
    }
    let q: BlochQuantifier = a.quantifier.parse()?;
    let pts = bloch_grid(a.grid);
    let values: Vec<f64> = pts.par_iter().map(|&p| q.eval(p)).collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "z", "value"])?;
    for (p, v) in pts.iter().zip(&values) {
        w.write_record([p[0].to_string(), p[1].to_string(), p[2].to_string(), v.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_atomic(&a.out, &bytes)?;
    emit_json(&BlochJson {
        schema_version: SCHEMA_VERSION,
        command: "bloch",
        quantifier: a.quantifier.clone(),
        grid: a.grid,
        points: pts.len(),
        out: a.out.display().to_string(),
    })?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct RandomJson {
    schema_version: &'static str,
    command: &'static str,
    dim: usize,
    rank: usize,
    seed: u64,
    out: String,
}

pub fn random(a: &RandomArgs) -> Result<i32> {
    if a.rank == 0 || a.rank > a.dim {
        bail!("rank must be between 1 and dim = {}, got {}", a.dim, a.rank);
    }
    let rho = random_density(a.dim, a.rank, &mut RandomStream::new(a.seed))?;
    let label = a.label.clone().unwrap_or_else(|| format!("random d={} rank={} seed={}", a.dim, a.rank, a.seed));
    StateFile::from_state(&rho, Some(label), None).write(&a.out)?;
    emit_json(&RandomJson {
        schema_version: SCHEMA_VERSION,
        command: "random",
        dim: a.dim,
        rank: rho.spectrum().rank(),
        seed: a.seed,
        out: a.out.display().to_string(),
    })?;
    Ok(EXIT_OK)
}
