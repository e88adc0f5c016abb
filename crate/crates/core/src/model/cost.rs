use serde::{Deserialize, Serialize};

use super::{ModelError, Scenario, Solution};
use crate::money::Money;

/// The five cost terms of the objective and their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub fixed: Money,
    pub operational: Money,
    pub penalty: Money,
    pub migration: Money,
    pub hardware: Money,
    pub total: Money,
}

impl CostBreakdown {
    pub fn from_terms(fixed: Money, operational: Money, penalty: Money, migration: Money, hardware: Money) -> Self {
        CostBreakdown {
            fixed,
            operational,
            penalty,
            migration,
            hardware,
            total: fixed + operational + penalty + migration + hardware,
        }
    }
}

/// Migrated resource units per data center for one (cluster, service) pair
/// between two consecutive slots.
///
/// If the aggregate assignment does not shrink, every per-DC decrease is a
/// migration; if it shrinks, every per-DC increase is. `prev = None` marks the
/// first slot, where nothing migrates.
pub fn compute_migrations(prev: Option<&[u32]>, curr: &[u32]) -> Result<Vec<u32>, ModelError> {
    let Some(prev) = prev else {
        return Ok(vec![0; curr.len()]);
    };
    if prev.len() != curr.len() {
        return Err(ModelError::InvalidReference(format!(
            "migration slices cover {} and {} data centers",
            prev.len(),
            curr.len()
        )));
    }
    let before: u64 = prev.iter().map(|&v| v as u64).sum();
    let after: u64 = curr.iter().map(|&v| v as u64).sum();
    let out = prev
        .iter()
        .zip(curr)
        .map(|(&p, &c)| if after >= before { p.saturating_sub(c) } else { c.saturating_sub(p) })
        .collect();
    Ok(out)
}

/// Objective value of `solution`. Feasibility is not checked.
pub fn evaluate_cost(scenario: &Scenario, solution: &Solution) -> Result<CostBreakdown, ModelError> {
    solution.check_dims(scenario)?;
    let dcs = scenario.data_centers();
    let services = scenario.services();
    let n_t = scenario.horizon();

    let fixed = dcs
        .iter()
        .zip(&solution.x)
        .filter(|(_, &open)| open)
        .map(|(dc, _)| dc.c_fix)
        .sum();
    let hardware = dcs.iter().zip(&solution.z).map(|(dc, &z)| dc.c_hw.times(z as u64)).sum();

    let mut operational = Money::ZERO;
    for (d, dc) in dcs.iter().enumerate() {
        for per_u in &solution.y[d] {
            for per_s in per_u {
                for (t, &units) in per_s.iter().enumerate() {
                    operational += dc.c_op[t].times(units as u64);
                }
            }
        }
    }

    let mut penalty = Money::ZERO;
    for (u, per_u) in solution.y_pen.iter().enumerate() {
        for (s, per_s) in per_u.iter().enumerate() {
            let units: u64 = per_s.iter().map(|&v| v as u64).sum();
            penalty += scenario.penalty_cost(u, s).times(units);
        }
    }

    let mut migration = Money::ZERO;
    let mut prev = vec![0u32; dcs.len()];
    let mut curr = vec![0u32; dcs.len()];
    for u in 0..scenario.n_clusters() {
        for (s, svc) in services.iter().enumerate() {
            for t in 1..n_t {
                for d in 0..dcs.len() {
                    prev[d] = solution.y[d][u][s][t - 1];
                    curr[d] = solution.y[d][u][s][t];
                }
                let moved: u64 = compute_migrations(Some(&prev), &curr)?.iter().map(|&v| v as u64).sum();
                migration += svc.c_mig.times(moved);
            }
        }
    }

    Ok(CostBreakdown::from_terms(fixed, operational, penalty, migration, hardware))
}
