//! Exhaustive enumeration for tiny instances.
//!
//! Enumerates every integer assignment `y` that respects eligibility, per-DC
//! capacity and LAN/MAN bandwidth in each slot. `x`, `z` and `y_pen` are then
//! fixed at their cheapest values: x = any load, z = the peak load (at least
//! `k_min`), y_pen = the shortfall. Assignments above demand are enumerated
//! too, since over-serving can change which way migrations are counted.

use std::time::Instant;

use thiserror::Error;

use super::bnb::{SolveReport, SolveStatus};
use crate::model::{compute_migrations, evaluate_cost, Scenario, Solution};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceGuard {
    /// Largest number of complete assignments to score.
    pub max_points: u64,
}

impl Default for BruteForceGuard {
    fn default() -> Self {
        BruteForceGuard { max_points: 20_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("search space of about {estimate} points exceeds the guard of {limit}")]
    TooLarge { estimate: u128, limit: u64 },
}

/// Per-slot lattice size ignoring bandwidth: per DC, the number of ways to put
/// at most `k_max` units on its eligible cells.
pub fn lattice_estimate(scenario: &Scenario) -> u128 {
    let per_slot = (0..scenario.n_dcs()).fold(1u128, |acc, d| {
        let cells = eligible_cells(scenario, d).len() as u128;
        let k = scenario.data_centers()[d].k_max as u128;
        acc.saturating_mul(binomial(cells + k, cells))
    });
    (0..scenario.horizon()).fold(1u128, |acc, _| acc.saturating_mul(per_slot))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn eligible_cells(scenario: &Scenario, d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..scenario.n_clusters() {
        for s in 0..scenario.n_services() {
            if scenario.is_eligible(d, u, s) {
                out.push((u, s));
            }
        }
    }
    out
}

/// One feasible single-slot assignment.
struct Point {
    /// `y` in `[u][s][d]` order so each (u, s) slice is contiguous.
    y: Vec<u32>,
    load: Vec<u32>,
    /// Operational plus penalty cost of the slot, milli-units.
    cost: i64,
}

struct Dims {
    n_d: usize,
    n_s: usize,
}

impl Dims {
    fn at(&self, d: usize, u: usize, s: usize) -> usize {
        (u * self.n_s + s) * self.n_d + d
    }
}

/// All vectors of `len` non-negative entries summing to at most `cap`.
fn bounded_vectors(len: usize, cap: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cap {
            cur.push(v);
            rec(len, cap - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, cap, &mut Vec::with_capacity(len), &mut out);
    out
}

fn bandwidth_ok(scenario: &Scenario, dims: &Dims, y: &[u32]) -> bool {
    let services = scenario.services();
    for (u, uc) in scenario.user_clusters().iter().enumerate() {
        let local = scenario.local_cloudlet(u);
        let (mut lan_d, mut lan_u, mut man_d, mut man_u) = (0u64, 0u64, 0u64, 0u64);
        for (s, svc) in services.iter().enumerate() {
            for d in 0..dims.n_d {
                let v = y[dims.at(d, u, s)] as u64;
                lan_d += v * svc.l_down as u64;
                lan_u += v * svc.l_up as u64;
                if Some(d) != local {
                    man_d += v * svc.l_down as u64;
                    man_u += v * svc.l_up as u64;
                }
            }
            // Traffic of other clusters served by this cluster's cloudlet.
            if let Some(c) = local {
                for other in (0..scenario.n_clusters()).filter(|&o| o != u) {
                    let v = y[dims.at(c, other, s)] as u64;
                    man_d += v * svc.l_up as u64;
                    man_u += v * svc.l_down as u64;
                }
            }
        }
        if lan_d > uc.lan_down as u64 || lan_u > uc.lan_up as u64 || man_d > uc.man_down as u64 || man_u > uc.man_up as u64 {
            return false;
        }
    }
    true
}

fn slot_points(scenario: &Scenario, dims: &Dims, t: usize) -> Vec<Point> {
    let n_u = scenario.n_clusters();
    let per_dc: Vec<(Vec<(usize, usize)>, Vec<Vec<u32>>)> = (0..dims.n_d)
        .map(|d| {
            let cells = eligible_cells(scenario, d);
            let vecs = bounded_vectors(cells.len(), scenario.data_centers()[d].k_max);
            (cells, vecs)
        })
        .collect();
    let mut pick = vec![0usize; dims.n_d];
    let mut out = Vec::new();
    loop {
        let mut y = vec![0u32; dims.n_d * n_u * dims.n_s];
        let mut load = vec![0u32; dims.n_d];
        for d in 0..dims.n_d {
            let (cells, vecs) = &per_dc[d];
            for (&(u, s), &v) in cells.iter().zip(&vecs[pick[d]]) {
                y[dims.at(d, u, s)] = v;
                load[d] += v;
            }
        }
        if bandwidth_ok(scenario, dims, &y) {
            let mut cost = 0i64;
            for u in 0..n_u {
                for s in 0..dims.n_s {
                    let mut served = 0u32;
                    for d in 0..dims.n_d {
                        let v = y[dims.at(d, u, s)];
                        served += v;
                        cost += scenario.data_centers()[d].c_op[t].millis() * v as i64;
                    }
                    let short = scenario.demand(u, s, t).saturating_sub(served);
                    cost += scenario.penalty_cost(u, s).millis() * short as i64;
                }
            }
            out.push(Point { y, load, cost });
        }
        // Odometer over the per-DC choices.
        let mut d = 0;
        loop {
            if d == dims.n_d {
                return out;
            }
            pick[d] += 1;
            if pick[d] < per_dc[d].1.len() {
                break;
            }
            pick[d] = 0;
            d += 1;
        }
    }
}

struct Enumeration<'a> {
    scenario: &'a Scenario,
    dims: Dims,
    slots: Vec<Vec<Point>>,
    chosen: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
    scored: u64,
}

impl Enumeration<'_> {
    fn migration(&self, prev: &Point, curr: &Point) -> i64 {
        let n_d = self.dims.n_d;
        let mut total = 0i64;
        for (s, svc) in self.scenario.services().iter().enumerate() {
            for u in 0..self.scenario.n_clusters() {
                let at = self.dims.at(0, u, s);
                let moved: u32 = compute_migrations(Some(&prev.y[at..at + n_d]), &curr.y[at..at + n_d])
                    .expect("equal slices")
                    .iter()
                    .sum();
                total += svc.c_mig.millis() * moved as i64;
            }
        }
        total
    }

    fn walk(&mut self, t: usize, cost: i64, peak: &mut [u32]) {
        if t == self.slots.len() {
            self.scored += 1;
            let mut total = cost;
            for (d, dc) in self.scenario.data_centers().iter().enumerate() {
                if peak[d] > 0 {
                    total += dc.c_fix.millis() + dc.c_hw.millis() * peak[d].max(dc.k_min) as i64;
                }
            }
            if self.best.as_ref().is_none_or(|b| total < b.0) {
                self.best = Some((total, self.chosen.clone()));
            }
            return;
        }
        for i in 0..self.slots[t].len() {
            let point = &self.slots[t][i];
            let mut step = point.cost;
            if t > 0 {
                step += self.migration(&self.slots[t - 1][self.chosen[t - 1]], point);
            }
            let saved = peak.to_vec();
            for (p, &l) in peak.iter_mut().zip(&point.load) {
                *p = (*p).max(l);
            }
            self.chosen.push(i);
            self.walk(t + 1, cost + step, peak);
            self.chosen.pop();
            peak.copy_from_slice(&saved);
        }
    }
}

/// Minimum-cost solution by exhaustive search.
pub fn brute_force(scenario: &Scenario, guard: &BruteForceGuard) -> Result<SolveReport, BruteForceError> {
    let started = Instant::now();
    let estimate = lattice_estimate(scenario);
    let per_slot_estimate = if scenario.horizon() == 0 {
        1
    } else {
        (0..scenario.n_dcs()).fold(1u128, |acc, d| {
            let cells = eligible_cells(scenario, d).len() as u128;
            acc.saturating_mul(binomial(cells + scenario.data_centers()[d].k_max as u128, cells))
        })
    };
    if per_slot_estimate > guard.max_points as u128 {
        return Err(BruteForceError::TooLarge {
            estimate,
            limit: guard.max_points,
        });
    }
    let dims = Dims {
        n_d: scenario.n_dcs(),
        n_s: scenario.n_services(),
    };
    let slots: Vec<Vec<Point>> = (0..scenario.horizon()).map(|t| slot_points(scenario, &dims, t)).collect();
    let points = slots.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if points > guard.max_points as u128 {
        return Err(BruteForceError::TooLarge {
            estimate: points,
            limit: guard.max_points,
        });
    }

    let mut e = Enumeration {
        scenario,
        dims,
        slots,
        chosen: Vec::new(),
        best: None,
        scored: 0,
    };
    let mut peak = vec![0u32; scenario.n_dcs()];
    e.walk(0, 0, &mut peak);
    let (best, chosen) = e.best.clone().expect("the empty assignment is always feasible");

    let mut y = Solution::zeros(scenario).y;
    for (t, &i) in chosen.iter().enumerate() {
        let point = &e.slots[t][i];
        for (d, per_d) in y.iter_mut().enumerate() {
            for (u, per_u) in per_d.iter_mut().enumerate() {
                for (s, per_s) in per_u.iter_mut().enumerate() {
                    per_s[t] = point.y[e.dims.at(d, u, s)];
                }
            }
        }
    }
    let solution = Solution::complete_from_assignment(scenario, y);
    let cost = evaluate_cost(scenario, &solution).expect("dimensions match");
    assert_eq!(cost.total.millis(), best, "enumeration score disagrees with evaluate_cost");

    Ok(SolveReport {
        solution: Some(solution),
        values: None,
        objective: Some(cost.total),
        status: SolveStatus::Optimal,
        nodes: e.scored,
        wall_time: started.elapsed(),
        best_bound: Money(best),
    })
}
