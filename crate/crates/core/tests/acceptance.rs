//! Acceptance run: one `[PASS]` or `[FAIL]` line per criterion.
//!
//! `cargo test --release --test acceptance -- C3 C9` runs a subset.

use std::time::{Duration, Instant};

use rand::Rng;

use renyi_core::bounds::{afw_von_neumann, bound_low};
use renyi_core::entropy::{
    classical_hmin, conditional_entropy_up, hmin, renyi_entropy, von_neumann_conditional,
    EntropyResult, RenyiOrder, SolverConfig, SolverKind,
};
use renyi_core::harness::{
    run_campaign, run_classical_campaign, CampaignConfig, CampaignReport, Check, SampleRecord,
    Status,
};
use renyi_core::state::{
    derive_seed, make_cq_state, product, random_density, rng_from_seed, sample_random_state,
    Ensemble, PerturbationMode,
};
use renyi_core::{Error, Result};

const MASTER_SEED: u64 = 20240607;

struct Outcome {
    pass: bool,
    detail: String,
}

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).expect("valid order")
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn min_margin(records: &[SampleRecord]) -> f64 {
    records
        .iter()
        .filter(|r| r.converged())
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min)
}

fn count(report: &CampaignReport, status: Status) -> usize {
    report.records.iter().filter(|r| r.status == status).count()
}

fn campaign_line(report: &CampaignReport, elapsed: Duration) -> String {
    format!(
        "{} records, {} violations, {} uncertain ({:.3}%), min margin {:.3e}, {:.1} s",
        report.records.len(),
        count(report, Status::Violation),
        count(report, Status::SolverUncertain),
        100.0 * report.totals.uncertain_rate,
        min_margin(&report.records),
        elapsed.as_secs_f64()
    )
}

fn c1() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Thm1],
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let violations = count(&report, Status::Violation);
    let rate = report.totals.uncertain_rate;
    Ok(Outcome {
        pass: violations == 0 && rate <= 0.02 && elapsed <= Duration::from_secs(600),
        detail: format!(
            "alpha < 1 campaign on {} threads: {} (limits: 0 violations, <= 2% uncertain, <= 600 s)",
            config.jobs,
            campaign_line(&report, elapsed)
        ),
    })
}

fn c2() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Thm1Classical, Check::JabbourCompare],
        perturbation: PerturbationMode::ClassicalOnly,
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_classical_campaign(&config)?;
    let elapsed = start.elapsed();
    let violations = count(&report, Status::Violation);
    let above_general = report
        .records
        .iter()
        .filter(|r| !(r.bound <= r.general_bound.unwrap_or(f64::NAN) + 1e-10))
        .count();
    let jd_in_range = report
        .records
        .iter()
        .filter(|r| r.jabbour_datta_in_range == Some(true))
        .count();
    let jd_violations = report
        .records
        .iter()
        .filter(|r| r.jabbour_datta_violated(config.violation_tolerance))
        .count();
    Ok(Outcome {
        pass: violations == 0 && above_general == 0,
        detail: format!(
            "classical campaign: {}; classical bound above general on {above_general} records; \
             earlier classical bound violated on {jd_violations} of {jd_in_range} in-range records",
            campaign_line(&report, elapsed)
        ),
    })
}

fn c3() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Cor1],
        orders: [1.01, 1.5, 2.0, 5.0, f64::INFINITY].map(order).to_vec(),
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let violations = count(&report, Status::Violation);
    let infinite: Vec<&SampleRecord> = report
        .records
        .iter()
        .filter(|r| r.order.is_some_and(|o| o.is_infinite()))
        .collect();
    let non_sdp = infinite
        .iter()
        .filter(|r| {
            [r.h_rho, r.h_sigma]
                .iter()
                .any(|h| h.is_none_or(|h| h.solver != SolverKind::Sdp))
        })
        .count();
    Ok(Outcome {
        pass: violations == 0 && !infinite.is_empty() && non_sdp == 0,
        detail: format!(
            "alpha > 1 campaign: {}; {} alpha = inf records, {non_sdp} not solved by the SDP",
            campaign_line(&report, elapsed),
            infinite.len()
        ),
    })
}

fn c4() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Thm3Hmin],
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let violations = count(&report, Status::Violation);
    let mut worst_feasibility = 0.0f64;
    let mut missing = 0;
    for r in &report.records {
        for h in [r.h_rho, r.h_sigma] {
            match h.and_then(|h| h.certificate) {
                Some(c) => worst_feasibility = worst_feasibility.max(c.feasibility_violation),
                None => missing += 1,
            }
        }
    }
    Ok(Outcome {
        pass: violations == 0 && missing == 0 && worst_feasibility <= 1e-8,
        detail: format!(
            "min-entropy campaign: {}; worst feasibility residual {worst_feasibility:.2e} (limit 1e-8), \
             {missing} solves without certificate",
            campaign_line(&report, elapsed)
        ),
    })
}

fn c5() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Duality],
        dims: vec![(2, 2), (2, 3)],
        orders: [0.5, 0.6, 2.0, 5.0].map(order).to_vec(),
        samples_per_cell: 500,
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let residuals: Vec<f64> = report
        .records
        .iter()
        .filter(|r| r.converged())
        .map(|r| r.observed)
        .collect();
    let within = residuals.iter().filter(|&&x| x <= 1e-5).count();
    let fraction = within as f64 / residuals.len().max(1) as f64;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(Outcome {
        pass: !residuals.is_empty() && fraction >= 0.99 && worst <= 1e-4,
        detail: format!(
            "{} states over 8 cells, {} converged: {:.2}% with residual <= 1e-5 (need 99%), worst {worst:.2e} (limit 1e-4), {:.1} s",
            report.records.len(),
            residuals.len(),
            100.0 * fraction,
            elapsed.as_secs_f64()
        ),
    })
}

fn c6() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Mccarthy],
        mccarthy_exponents: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        samples_per_cell: 1000,
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let violations = count(&report, Status::Violation);
    let uncertain = count(&report, Status::SolverUncertain);
    let equality = report
        .records
        .iter()
        .filter(|r| r.note.as_deref().is_some_and(|n| n.contains("equality")))
        .count();
    Ok(Outcome {
        pass: violations == 0 && uncertain == 0,
        detail: format!(
            "{} pairs x 5 exponents: {violations} violations, {equality} equality cases checked at 1e-10, {:.1} s",
            config.samples_per_cell,
            elapsed.as_secs_f64()
        ),
    })
}

fn c7() -> Result<Outcome> {
    let config = CampaignConfig {
        checks: vec![Check::Dpi],
        // 4 dims x 10 orders x 13 samples = 520 triples per family.
        samples_per_cell: 13,
        seed: MASTER_SEED,
        jobs: jobs(),
        ..CampaignConfig::default()
    };
    let start = Instant::now();
    let report = run_campaign(&config)?;
    let elapsed = start.elapsed();
    let mut per_family = std::collections::BTreeMap::new();
    for cell in &report.cells {
        let family = cell
            .cell
            .channel
            .expect("dpi cells carry a channel")
            .to_string();
        let entry = per_family.entry(family).or_insert((0usize, 0usize));
        entry.0 += cell.samples;
        entry.1 += cell.violations;
    }
    let violations = count(&report, Status::Violation);
    let uncertain = count(&report, Status::SolverUncertain);
    let enough = per_family.values().all(|(n, _)| *n >= 500);
    let listing: Vec<String> = per_family
        .iter()
        .map(|(k, (n, v))| format!("{k} {n}/{v}"))
        .collect();
    Ok(Outcome {
        pass: violations == 0 && uncertain == 0 && enough && per_family.len() == 4,
        detail: format!(
            "triples/violations per family: {}; largest increase {:.2e} (limit 1e-7), {:.1} s",
            listing.join(", "),
            -min_margin(&report.records),
            elapsed.as_secs_f64()
        ),
    })
}

fn c8() -> Result<Outcome> {
    let near_one = order(0.9999);
    let mut worst_entropy = 0.0f64;
    for i in 0..100 {
        let rho = sample_random_state(
            2,
            2,
            Ensemble::HilbertSchmidt,
            derive_seed(MASTER_SEED, 8000 + i),
        )?;
        let h = conditional_entropy_up(&rho, near_one, &SolverConfig::default())?.value;
        worst_entropy = worst_entropy.max((h - von_neumann_conditional(&rho)?).abs());
    }
    let limit = order(1.0 - 1e-6);
    let mut worst_bound = 0.0f64;
    for i in 1..=20 {
        let eps = i as f64 / 20.0;
        for d in 2..=5 {
            worst_bound =
                worst_bound.max((bound_low(eps, d, limit)? - afw_von_neumann(eps, d)?).abs());
        }
    }
    Ok(Outcome {
        pass: worst_entropy <= 5e-3 && worst_bound <= 1e-4,
        detail: format!(
            "order 0.9999 vs von Neumann on 100 two-qubit states: worst {worst_entropy:.2e} (limit 5e-3); \
             bound at 1 - 1e-6 vs von Neumann bound on 20 x 4 grid: worst {worst_bound:.2e} (limit 1e-4)"
        ),
    })
}

/// The value of a result, including the best candidate of an uncertified one.
fn candidate(r: Result<EntropyResult>) -> Result<f64> {
    match r {
        Ok(r) => Ok(r.value),
        Err(Error::NotConverged { value, .. }) => Ok(value),
        Err(e) => Err(e),
    }
}

fn c9() -> Result<Outcome> {
    let alphas = [0.5, 0.75, 2.0].map(order);
    let (mut grid_gap, mut search_gap, mut product_gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for i in 0..200u64 {
        let seed = derive_seed(MASTER_SEED, 9000 + i);
        let d_a = 2;
        let rho = sample_random_state(d_a, 2, Ensemble::HilbertSchmidt, seed)?;
        let mut rng = rng_from_seed(derive_seed(seed, 1));
        let rho_a = random_density(d_a, Ensemble::HilbertSchmidt, &mut rng)?;
        let rho_b = random_density(2, Ensemble::HilbertSchmidt, &mut rng)?;
        let prod = product(&rho_a, &rho_b)?;
        for &a in &alphas {
            let fixed = match conditional_entropy_up(&rho, a, &SolverConfig::fixed_point_only()) {
                Ok(r) => r.value,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let grid = candidate(conditional_entropy_up(&rho, a, &SolverConfig::grid_only()))?;
            let search_config = SolverConfig {
                seed,
                ..SolverConfig::direct_search_only()
            };
            let search = candidate(conditional_entropy_up(&rho, a, &search_config))?;
            grid_gap = grid_gap.max((fixed - grid).abs());
            search_gap = search_gap.max((fixed - search).abs());
            let h_prod = conditional_entropy_up(&prod, a, &SolverConfig::default())?.value;
            product_gap = product_gap.max((h_prod - renyi_entropy(&rho_a, a)?).abs());
        }
    }
    Ok(Outcome {
        pass: failures == 0 && grid_gap <= 1e-3 && search_gap <= 1e-5 && product_gap <= 1e-6,
        detail: format!(
            "200 two-qubit states: fixed point vs grid {grid_gap:.2e} (limit 1e-3), vs direct search \
             {search_gap:.2e} (limit 1e-5), product states {product_gap:.2e} (limit 1e-6), \
             {failures} fixed-point failures"
        ),
    })
}

fn c10() -> Result<Outcome> {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, 10_000));
    let mut worst = 0.0f64;
    let mut uncertain = 0;
    for _ in 0..100 {
        let d_a = rng.random_range(1..=4);
        let d_b = rng.random_range(1..=4);
        let mut table: Vec<Vec<f64>> = (0..d_a)
            .map(|_| {
                (0..d_b)
                    .map(|_| {
                        if rng.random_bool(0.15) {
                            0.0
                        } else {
                            -rng.random::<f64>().ln()
                        }
                    })
                    .collect()
            })
            .collect();
        let total: f64 = table.iter().flatten().sum();
        if total == 0.0 {
            table[0][0] = 1.0;
        } else {
            table.iter_mut().flatten().for_each(|p| *p /= total);
        }
        let state = make_cq_state(&table)?;
        let value = match hmin(&state) {
            Ok(r) => r.value,
            Err(Error::NotConverged { value, .. }) => {
                uncertain += 1;
                value
            }
            Err(e) => return Err(e),
        };
        worst = worst.max((value - classical_hmin(&table)).abs());
    }
    Ok(Outcome {
        pass: worst <= 1e-7,
        detail: format!(
            "100 cq tables with d_A, d_B <= 4: worst SDP deviation from the closed form {worst:.2e} \
             (limit 1e-7), {uncertain} uncertified solves"
        ),
    })
}

type Criterion = (&'static str, &'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 10] = [
    ("C1", "alpha < 1 continuity bound", c1),
    ("C2", "classical strengthening", c2),
    ("C3", "alpha > 1 continuity bound", c3),
    ("C4", "min-entropy continuity bound", c4),
    ("C5", "duality", c5),
    ("C6", "McCarthy inequality", c6),
    ("C7", "data processing", c7),
    ("C8", "alpha -> 1 consistency", c8),
    ("C9", "solver oracle equivalence", c9),
    ("C10", "min-entropy closed form", c10),
];

fn main() {
    let wanted: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| a.starts_with('C') || a.starts_with('c'))
        .map(|a| a.to_ascii_uppercase())
        .collect();
    let mut failed = 0;
    for (id, name, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.iter().any(|w| w == id) {
            continue;
        }
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {id} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
