//! Randomized verification campaigns.
//!
//! A campaign expands its config into cells (check × dims × order × epsilon, or the
//! check's own parameter), draws `samples_per_cell` seeded instances per cell and scores
//! each one. Cell seeds depend only on the master seed, the check and the cell's position
//! within that check, so a check run alone reproduces its records from a larger campaign.

mod config;
mod probe;
mod record;
mod suites;

pub use config::{
    CampaignConfig, Check, DEFAULT_DIMS, DEFAULT_EPSILONS, DEFAULT_HIGH_ORDERS, DEFAULT_LOW_ORDERS,
};
pub use probe::{run_extremal_probe, ProbeConfig, ProbeOutcome};
pub use record::{
    CampaignReport, Cell, CellSummary, SampleRecord, Status, Totals, Verdict, SCHEMA_VERSION,
};

use rayon::prelude::*;

use crate::bounds::{bound_jabbour_datta, bound_low_classical};
use crate::error::{invalid, Error, Result};
use crate::state::{derive_seed, PerturbationMode};

fn check_seed(master: u64, check: Check) -> u64 {
    let ordinal = Check::ALL
        .iter()
        .position(|&c| c == check)
        .expect("listed check");
    derive_seed(master, 1000 + ordinal as u64)
}

/// Expands the config into cells, in check order then dims, order, epsilon or parameter.
pub fn cells(config: &CampaignConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    let mut seen_classical = false;
    for check in Check::ALL {
        if !config.checks.contains(&check) {
            continue;
        }
        if check.is_classical() {
            // Both classical checks score the same samples.
            if seen_classical {
                continue;
            }
            seen_classical = true;
        }
        let base = check_seed(config.seed, check);
        let mut local = 0u64;
        let mut push = |out: &mut Vec<Cell>, mut cell: Cell| {
            cell.index = out.len();
            cell.seed = derive_seed(base, local);
            local += 1;
            out.push(cell);
        };
        let blank = |d_a, d_b| Cell {
            index: 0,
            check,
            d_a,
            d_b,
            order: None,
            epsilon: None,
            channel: None,
            exponent: None,
            seed: 0,
        };
        if check == Check::Mccarthy {
            for &a in &config.mccarthy_exponents {
                push(
                    &mut out,
                    Cell {
                        exponent: Some(a),
                        ..blank(1, 1)
                    },
                );
            }
            continue;
        }
        for &(d_a, d_b) in &config.dims {
            match check {
                Check::Thm3Hmin => {
                    for &e in &config.epsilons {
                        push(
                            &mut out,
                            Cell {
                                epsilon: Some(e),
                                ..blank(d_a, d_b)
                            },
                        );
                    }
                }
                Check::Duality => {
                    for o in config.orders_for(check) {
                        push(
                            &mut out,
                            Cell {
                                order: Some(o),
                                ..blank(d_a, d_b)
                            },
                        );
                    }
                }
                Check::Dpi => {
                    for o in config.orders_for(check) {
                        for &ch in &config.channels {
                            push(
                                &mut out,
                                Cell {
                                    order: Some(o),
                                    channel: Some(ch),
                                    ..blank(d_a, d_b)
                                },
                            );
                        }
                    }
                }
                _ => {
                    for o in config.orders_for(check) {
                        for &e in &config.epsilons {
                            push(
                                &mut out,
                                Cell {
                                    order: Some(o),
                                    epsilon: Some(e),
                                    ..blank(d_a, d_b)
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

fn execute(config: &CampaignConfig, cells: &[Cell]) -> Result<Vec<SampleRecord>> {
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.samples_per_cell).map(move |s| (c, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, s)| suites::run_sample(config, &cells[c], s))
            .collect()
    }))
}

fn tighter(cell: &Cell) -> Option<String> {
    if !cell.check.is_classical() {
        return None;
    }
    let (e, o) = (cell.epsilon?, cell.order?);
    let cl = bound_low_classical(e, cell.d_a, o).ok()?;
    let jd = bound_jabbour_datta(e, cell.d_a, o).ok()?;
    Some(
        if (cl - jd).abs() <= 1e-12 {
            "equal"
        } else if cl < jd {
            "thm1-classical"
        } else {
            "jabbour-datta"
        }
        .to_string(),
    )
}

/// Runs every check in the config and aggregates the records.
///
/// Solver failures never abort the campaign; they become solver-uncertain records.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let cells = cells(config);
    let records = execute(config, &cells)?;
    Ok(record::summarize(
        "campaign", config, &cells, records, tighter,
    ))
}

/// Classical-A campaign: the classical strengthening and the Jabbour–Datta bound on
/// states diagonal in the product basis.
///
/// Requires `perturbation = classical-only`. Runs the classical checks listed in the
/// config, or both of them when none is listed.
pub fn run_classical_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    if config.perturbation != PerturbationMode::ClassicalOnly {
        return Err(Error::Validation(
            "the classical campaign needs perturbation = classical-only".into(),
        ));
    }
    let mut config = config.clone();
    config.checks.retain(|c| c.is_classical());
    if config.checks.is_empty() {
        config.checks = vec![Check::Thm1Classical, Check::JabbourCompare];
    }
    config.validate()?;
    let cells = cells(&config);
    let records = execute(&config, &cells)?;
    Ok(record::summarize(
        "classical-campaign",
        &config,
        &cells,
        records,
        tighter,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::RenyiOrder;

    fn small(checks: Vec<Check>) -> CampaignConfig {
        CampaignConfig {
            dims: vec![(2, 2)],
            orders: vec![
                RenyiOrder::new(0.75).unwrap(),
                RenyiOrder::new(2.0).unwrap(),
            ],
            epsilons: vec![0.2],
            samples_per_cell: 4,
            checks,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn zero_epsilon_margins_equal_bounds() {
        let mut c = small(vec![Check::Thm1, Check::Cor1, Check::Thm3Hmin]);
        c.epsilons = vec![0.0];
        let r = run_campaign(&c).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        for rec in &r.records {
            assert_eq!(rec.bound, 0.0);
            assert_eq!(rec.margin, rec.bound);
        }
    }

    #[test]
    fn every_check_runs_and_passes() {
        let c = small(Check::ALL.to_vec());
        let r = run_campaign(&c).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let checks: std::collections::BTreeSet<Check> = r.records.iter().map(|x| x.check).collect();
        assert_eq!(checks.len(), 8);
        for rec in &r.records {
            if rec.status == Status::Pass && rec.h_rho.is_some() {
                assert!(rec.h_rho.unwrap().converged);
            }
            if let Some(e) = rec.realized_epsilon {
                assert!(e <= rec.epsilon.unwrap() + 1e-10);
            }
        }
    }

    #[test]
    fn reports_are_deterministic_and_thread_independent() {
        let mut c = small(vec![Check::Thm1, Check::Duality, Check::Mccarthy]);
        let a = run_campaign(&c).unwrap();
        c.jobs = 3;
        let mut b = run_campaign(&c).unwrap();
        b.config.jobs = 1;
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert!(a.to_json().unwrap().contains("\"schema\": 1"));
    }

    #[test]
    fn single_check_reproduces_its_records() {
        let both = run_campaign(&small(vec![Check::Thm1, Check::Mccarthy])).unwrap();
        let alone = run_campaign(&small(vec![Check::Mccarthy])).unwrap();
        let from_both: Vec<_> = both
            .records
            .iter()
            .filter(|r| r.check == Check::Mccarthy)
            .collect();
        assert_eq!(from_both.len(), alone.records.len());
        for (x, y) in from_both.iter().zip(&alone.records) {
            assert_eq!(
                (x.seed, x.value_rho, x.value_sigma),
                (y.seed, y.value_rho, y.value_sigma)
            );
        }
    }

    #[test]
    fn classical_campaign_needs_classical_mode() {
        let c = small(vec![Check::Thm1Classical]);
        assert!(run_classical_campaign(&c).is_err());
        let c = CampaignConfig {
            perturbation: PerturbationMode::ClassicalOnly,
            ..c
        };
        let r = run_classical_campaign(&c).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        for rec in &r.records {
            assert!(rec.bound <= rec.general_bound.unwrap() + 1e-10);
            assert!(rec.jabbour_datta.is_some());
        }
        assert_eq!(r.cells[0].tighter.as_deref(), Some("jabbour-datta"));
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let r = run_campaign(&small(vec![Check::Dpi])).unwrap();
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), r.records.len() + 1);
        assert!(csv.starts_with(
            "cell,sample,check,seed,d_a,d_b,order,epsilon,realized_epsilon,h_rho,h_sigma"
        ));
    }
}
