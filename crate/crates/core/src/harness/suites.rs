//! One function per check: turn a cell and a sample seed into a [`SampleRecord`].

use rand::Rng;

use super::config::{CampaignConfig, Check};
use super::record::{Cell, SampleRecord, Status};
use crate::bounds::{
    bound_high, bound_high_beyond_unit, bound_hmin, bound_jabbour_datta, bound_low,
    bound_low_classical, leditzky_gap,
};
use crate::channel::Channel;
use crate::distance::fidelity;
use crate::entropy::{
    complementary_state, conditional_entropy_up, hmin, sandwiched_divergence, EntropyResult,
    EntropySummary, RenyiOrder, SolverConfig,
};
use crate::error::{Error, Result};
use crate::operator::{CMatrix, PsdOperator};
use crate::state::{
    derive_seed, haar_unitary, perturb_within, random_bipartite_classical, random_psd,
    rng_from_seed, sample_random_state, BipartiteState, ClassicalStructure, PerturbationMode,
    PerturbationSpec, Perturbed,
};

/// An entropy value with its convergence status; errors become unconverged entries.
pub(crate) struct Solved {
    pub summary: Option<EntropySummary>,
    pub value: f64,
    pub converged: bool,
    pub note: Option<String>,
}

impl From<Result<EntropyResult>> for Solved {
    fn from(res: Result<EntropyResult>) -> Self {
        match res {
            Ok(r) => Solved {
                summary: Some(r.summary()),
                value: r.value,
                converged: r.converged,
                note: None,
            },
            Err(Error::NotConverged { best, .. }) => Solved {
                summary: Some(best.summary()),
                value: best.value,
                converged: false,
                note: Some("solver did not certify its value".into()),
            },
            Err(e) => Solved {
                summary: None,
                value: f64::NAN,
                converged: false,
                note: Some(e.to_string()),
            },
        }
    }
}

pub(crate) fn solve(rho: &BipartiteState, order: RenyiOrder, solver: &SolverConfig) -> Solved {
    conditional_entropy_up(rho, order, solver).into()
}

fn uncertain(mut rec: SampleRecord, err: Error) -> SampleRecord {
    rec.status = Status::SolverUncertain;
    rec.note = Some(err.to_string());
    rec
}

fn join_notes(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(x), Some(y)) => Some(format!("rho: {x}; sigma: {y}")),
        (Some(x), None) => Some(format!("rho: {x}")),
        (None, Some(y)) => Some(format!("sigma: {y}")),
        (None, None) => None,
    }
}

/// Fills the entropy fields of a pair record and scores `bound - |H_sigma - H_rho|`.
fn score_pair(
    mut rec: SampleRecord,
    h_rho: Solved,
    h_sigma: Solved,
    bound: f64,
    tolerance: f64,
) -> SampleRecord {
    let converged = h_rho.converged && h_sigma.converged;
    rec.value_rho = h_rho.value;
    rec.value_sigma = h_sigma.value;
    rec.observed = (h_sigma.value - h_rho.value).abs();
    rec.bound = bound;
    rec.margin = bound - rec.observed;
    rec.status = Status::judge(rec.margin, tolerance, converged);
    rec.note = join_notes(h_rho.note, h_sigma.note);
    rec.h_rho = h_rho.summary;
    rec.h_sigma = h_sigma.summary;
    rec
}

fn sample_pair(
    config: &CampaignConfig,
    cell: &Cell,
    seed: u64,
    mode: PerturbationMode,
) -> Result<(BipartiteState, Perturbed)> {
    let rho = if mode == PerturbationMode::ClassicalOnly {
        let mut rng = rng_from_seed(seed);
        random_bipartite_classical(cell.d_a, cell.d_b, ClassicalStructure::Both, &mut rng)?
    } else {
        sample_random_state(cell.d_a, cell.d_b, config.ensemble, seed)?
    };
    let eps = cell.epsilon.unwrap_or(0.0);
    let spec = PerturbationSpec::new(eps, mode, derive_seed(seed, 1))?;
    let perturbed = perturb_within(&rho, &spec)?;
    Ok((rho, perturbed))
}

pub(crate) fn run_sample(config: &CampaignConfig, cell: &Cell, sample: usize) -> SampleRecord {
    let seed = derive_seed(cell.seed, sample as u64);
    let rec = SampleRecord::blank(cell, sample, seed);
    let out = match cell.check {
        Check::Thm1 | Check::Cor1 | Check::Thm3Hmin => continuity(config, cell, rec.clone()),
        Check::Thm1Classical | Check::JabbourCompare => classical(config, cell, rec.clone()),
        Check::Leditzky => leditzky(config, cell, rec.clone()),
        Check::Duality => duality(config, cell, rec.clone()),
        Check::Dpi => dpi(config, cell, rec.clone()),
        Check::Mccarthy => mccarthy(config, cell, rec.clone()),
    };
    out.unwrap_or_else(|e| uncertain(rec, e))
}

fn realized(p: &Perturbed) -> f64 {
    p.realized.clamp(0.0, 1.0)
}

fn continuity(config: &CampaignConfig, cell: &Cell, mut rec: SampleRecord) -> Result<SampleRecord> {
    let (rho, p) = sample_pair(config, cell, rec.seed, config.perturbation)?;
    let eps = realized(&p);
    rec.realized_epsilon = Some(p.realized);
    let (h_rho, h_sigma, bound): (Solved, Solved, f64) = match cell.check {
        Check::Thm3Hmin => (
            hmin(&rho).into(),
            hmin(&p.sigma).into(),
            bound_hmin(eps, cell.d_a)?,
        ),
        _ => {
            let order = cell.order.expect("order cell");
            let bound = if order.below_one() {
                bound_low(eps, cell.d_a, order)?
            } else {
                bound_high(eps, cell.d_a, order)?
            };
            (
                solve(&rho, order, &config.solver),
                solve(&p.sigma, order, &config.solver),
                bound,
            )
        }
    };
    let mut rec = score_pair(rec, h_rho, h_sigma, bound, config.violation_tolerance);
    if cell.check == Check::Cor1 && bound_high_beyond_unit(eps) {
        rec.note = Some(rec.note.map_or_else(
            || "sqrt(2 eps) >= 1".to_string(),
            |n| format!("sqrt(2 eps) >= 1; {n}"),
        ));
    }
    Ok(rec)
}

fn classical(config: &CampaignConfig, cell: &Cell, rec: SampleRecord) -> Result<SampleRecord> {
    let (rho, p) = sample_pair(config, cell, rec.seed, PerturbationMode::ClassicalOnly)?;
    let eps = realized(&p);
    let order = cell.order.expect("order cell");
    let h_rho = solve(&rho, order, &config.solver);
    let h_sigma = solve(&p.sigma, order, &config.solver);
    let cl = bound_low_classical(eps, cell.d_a, order)?;
    let jd = bound_jabbour_datta(eps, cell.d_a, order)?;
    let primary = if config.checks.contains(&Check::Thm1Classical) {
        cl
    } else {
        f64::INFINITY
    };
    let mut rec = score_pair(rec, h_rho, h_sigma, primary, config.violation_tolerance);
    if primary.is_infinite() {
        rec.bound = cl;
        rec.margin = cl - rec.observed;
    }
    rec.realized_epsilon = Some(p.realized);
    rec.general_bound = Some(bound_low(eps, cell.d_a, order)?);
    rec.jabbour_datta = Some(jd);
    rec.jabbour_datta_in_range = Some(cell.d_a > 1 && eps <= 1.0 - 1.0 / cell.d_a as f64);
    Ok(rec)
}

fn leditzky(config: &CampaignConfig, cell: &Cell, mut rec: SampleRecord) -> Result<SampleRecord> {
    let (rho, p) = sample_pair(config, cell, rec.seed, config.perturbation)?;
    let order = cell.order.expect("order cell");
    rec.realized_epsilon = Some(p.realized);
    let h_rho = solve(&rho, order, &config.solver);
    let h_sigma = solve(&p.sigma, order.dual(), &config.solver);
    let f = fidelity(rho.psd(), p.sigma.psd())?.min(1.0);
    let gap = leditzky_gap(f, order)?;
    rec.value_rho = h_rho.value;
    rec.value_sigma = h_sigma.value;
    rec.observed = h_rho.value - h_sigma.value;
    rec.bound = gap;
    rec.margin = rec.observed - gap;
    rec.status = Status::judge(
        rec.margin,
        config.violation_tolerance,
        h_rho.converged && h_sigma.converged,
    );
    rec.note = join_notes(h_rho.note, h_sigma.note);
    rec.h_rho = h_rho.summary;
    rec.h_sigma = h_sigma.summary;
    Ok(rec)
}

fn duality(config: &CampaignConfig, cell: &Cell, mut rec: SampleRecord) -> Result<SampleRecord> {
    let rho = sample_random_state(cell.d_a, cell.d_b, config.ensemble, rec.seed)?;
    let order = cell.order.expect("order cell");
    let ac = complementary_state(&rho)?;
    let h_ab = solve(&rho, order, &config.solver);
    let h_ac = solve(&ac, order.dual(), &config.solver);
    rec.value_rho = h_ab.value;
    rec.value_sigma = h_ac.value;
    rec.observed = (h_ab.value + h_ac.value).abs();
    rec.bound = config.duality_worst_tolerance;
    rec.margin = rec.bound - rec.observed;
    rec.status = Status::judge(rec.margin, 0.0, h_ab.converged && h_ac.converged);
    rec.note = join_notes(h_ab.note, h_ac.note);
    rec.h_rho = h_ab.summary;
    rec.h_sigma = h_ac.summary;
    Ok(rec)
}

fn normalized(p: PsdOperator) -> PsdOperator {
    let tr = p.trace();
    PsdOperator::from_matrix_unchecked(p.matrix() / num_complex::Complex64::new(tr, 0.0))
}

fn dpi(config: &CampaignConfig, cell: &Cell, mut rec: SampleRecord) -> Result<SampleRecord> {
    let mut rng = rng_from_seed(rec.seed);
    let n = cell.d_a * cell.d_b;
    let rank = rng.random_range(1..=n);
    let p = normalized(random_psd(n, rank, &mut rng)?);
    let q = normalized(random_psd(n, n, &mut rng)?);
    let family = cell.channel.expect("channel cell");
    let channel = Channel::sample(family, cell.d_a, cell.d_b, &mut rng)?;
    let order = cell.order.expect("order cell");
    let before = sandwiched_divergence(&p, &q, order)?;
    let after = sandwiched_divergence(&channel.apply(&p)?, &channel.apply(&q)?, order)?;
    rec.value_rho = before;
    rec.value_sigma = after;
    rec.observed = after - before;
    rec.bound = 0.0;
    rec.margin = before - after;
    let finite = before.is_finite() && after.is_finite();
    rec.status = Status::judge(rec.margin, config.dpi_tolerance, finite);
    if !finite {
        rec.note = Some("divergence is infinite".into());
    }
    Ok(rec)
}

/// `tr X^a` on the support; `a = 0` gives the rank.
fn trace_power(x: &PsdOperator, a: f64) -> Result<f64> {
    let eig = x.eigen()?;
    let cut = eig.cutoff();
    Ok(eig
        .values
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| if a == 0.0 { 1.0 } else { l.powf(a) })
        .sum())
}

/// Orthogonal PSD pair spanning the whole space: `rank(P) + rank(Q) = n = rank(P + Q)`.
fn complementary_pair(n: usize, rng: &mut crate::state::StateRng) -> (PsdOperator, PsdOperator) {
    let u = haar_unitary(n, rng);
    let k = rng.random_range(1..n);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let part = |range: std::ops::Range<usize>| {
        let mut d = CMatrix::zeros(n, n);
        for i in range {
            d[(i, i)] = num_complex::Complex64::new(weights[i], 0.0);
        }
        let m = &u * d * u.adjoint();
        normalized(PsdOperator::from_matrix_unchecked(m))
    };
    (part(0..k), part(k..n))
}

fn mccarthy(config: &CampaignConfig, cell: &Cell, mut rec: SampleRecord) -> Result<SampleRecord> {
    let mut rng = rng_from_seed(rec.seed);
    let a = cell.exponent.expect("exponent cell");
    let n = 2 + rec.sample % 5;
    let complementary = a == 0.0 && rec.sample % 2 == 1;
    let (p, q) = if complementary {
        complementary_pair(n, &mut rng)
    } else {
        let rp = rng.random_range(1..=n);
        let rq = rng.random_range(1..=n);
        (
            normalized(random_psd(n, rp, &mut rng)?),
            normalized(random_psd(n, rq, &mut rng)?),
        )
    };
    let sum = PsdOperator::from_matrix_unchecked(p.matrix() + q.matrix());
    let lhs = trace_power(&sum, a)?;
    let rhs = trace_power(&p, a)? + trace_power(&q, a)?;
    rec.d_a = n;
    rec.d_b = 1;
    rec.value_rho = lhs;
    rec.value_sigma = rhs;
    rec.observed = lhs - rhs;
    rec.bound = 0.0;
    rec.margin = rhs - lhs;
    let equality = a == 1.0 || complementary;
    rec.status = if equality {
        rec.note = Some("equality case".into());
        Status::judge(config.equality_tolerance - rec.margin.abs(), 0.0, true)
    } else {
        Status::judge(rec.margin, config.mccarthy_tolerance, true)
    };
    Ok(rec)
}
