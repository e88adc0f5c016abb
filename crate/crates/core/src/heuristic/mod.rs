//! Greedy multi-period assignment (HEU1 / HEU2).
//!
//! Each slot starts from fresh residual lists, first re-uses the previous
//! slot's placements of the two strictest service classes, then assigns open
//! demand one lot at a time: most urgent (cluster, service) pair first, to
//! the data center with the least estimated marginal cost per unit.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{evaluate_cost, CostBreakdown, QosDirection, Scenario, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum Strategy {
    /// Use every resource the constraints allow.
    Heu1,
    /// Cap cloudlet units per slot at `rho` times the mean aggregate demand.
    Heu2 { rho: f64 },
}

impl Strategy {
    pub const DEFAULT_RHO: f64 = 0.8;

    pub fn heu2() -> Self {
        Strategy::Heu2 { rho: Self::DEFAULT_RHO }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Heu1 => "heu1",
            Strategy::Heu2 { .. } => "heu2",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HeuristicError {
    #[error("cloudlet cap fraction must lie in (0, 1], got {0}")]
    InvalidRho(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub solution: Solution,
    pub cost: CostBreakdown,
}

/// Cloudlet units allowed per slot under HEU2.
pub fn heu2_cap(scenario: &Scenario, rho: f64) -> Result<u32, HeuristicError> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(HeuristicError::InvalidRho(rho));
    }
    let n_t = scenario.horizon();
    let total: u64 = (0..n_t).map(|t| scenario.aggregate_demand(t)).sum();
    let mean = total as f64 / n_t as f64;
    Ok((rho * mean - 1e-9).ceil().max(0.0) as u32)
}

/// Residual bandwidth of one cluster, Mbps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Network {
    pub lan_down: u64,
    pub lan_up: u64,
    pub man_down: u64,
    pub man_up: u64,
}

fn lots(residual: u64, per_unit: u32) -> u64 {
    if per_unit == 0 {
        u64::MAX
    } else {
        residual / per_unit as u64
    }
}

/// Working lists of one slot, plus the assignments of all slots so far.
#[derive(Debug, Clone)]
pub struct HeuristicState<'a> {
    scenario: &'a Scenario,
    pub slot: usize,
    /// Permitted data centers per `[u][s]`.
    pub permitted: Vec<Vec<Vec<usize>>>,
    /// Residual demand per `[u][s]`.
    pub residual_demand: Vec<Vec<u32>>,
    /// Assigned units per `[d][u][s][t]`.
    pub assigned: Vec<Vec<Vec<Vec<u32>>>>,
    /// Residual capacity per data center in this slot.
    pub residual_capacity: Vec<u32>,
    pub network: Vec<Network>,
    /// Data centers used in any slot so far.
    pub open: Vec<bool>,
    /// Pending (u, s) pairs.
    pub pending: Vec<(usize, usize)>,
    /// Cloudlet units assigned in this slot, and the cap (HEU2 only).
    pub cloudlet_count: u32,
    pub cloudlet_cap: Option<u32>,
    /// Operating cost per data center summed over the remaining slots.
    op_ahead: Vec<i64>,
}

impl<'a> HeuristicState<'a> {
    pub fn new(scenario: &'a Scenario, cloudlet_cap: Option<u32>) -> Self {
        let (n_d, n_u, n_s, n_t) = (
            scenario.n_dcs(),
            scenario.n_clusters(),
            scenario.n_services(),
            scenario.horizon(),
        );
        let mut state = HeuristicState {
            scenario,
            slot: 0,
            permitted: vec![vec![Vec::new(); n_s]; n_u],
            residual_demand: vec![vec![0; n_s]; n_u],
            assigned: vec![vec![vec![vec![0; n_t]; n_s]; n_u]; n_d],
            residual_capacity: vec![0; n_d],
            network: Vec::new(),
            open: vec![false; n_d],
            pending: Vec::new(),
            cloudlet_count: 0,
            cloudlet_cap,
            op_ahead: vec![0; n_d],
        };
        state.start_slot(0);
        state
    }

    /// Re-initializes the per-slot lists for slot `t`.
    pub fn start_slot(&mut self, t: usize) {
        let sc = self.scenario;
        self.slot = t;
        for u in 0..sc.n_clusters() {
            for s in 0..sc.n_services() {
                self.permitted[u][s] = (0..sc.n_dcs())
                    .filter(|&d| sc.is_eligible(d, u, s) && sc.data_centers()[d].k_max > 0)
                    .collect();
                self.residual_demand[u][s] = sc.demand(u, s, t);
            }
        }
        self.residual_capacity = sc.data_centers().iter().map(|d| d.k_max).collect();
        self.op_ahead = sc.data_centers().iter().map(|d| d.c_op[t..].iter().map(|m| m.millis()).sum()).collect();
        self.network = sc
            .user_clusters()
            .iter()
            .map(|c| Network {
                lan_down: c.lan_down as u64,
                lan_up: c.lan_up as u64,
                man_down: c.man_down as u64,
                man_up: c.man_up as u64,
            })
            .collect();
        self.cloudlet_count = 0;
        self.pending.clear();
    }

    fn refresh_pending(&mut self) {
        self.pending.clear();
        for u in 0..self.scenario.n_clusters() {
            for s in 0..self.scenario.n_services() {
                if self.residual_demand[u][s] > 0 && !self.permitted[u][s].is_empty() {
                    self.pending.push((u, s));
                }
            }
        }
    }

    fn is_cloudlet(&self, d: usize) -> bool {
        self.scenario.data_centers()[d].is_cloudlet()
    }

    fn cap_left(&self) -> Option<u32> {
        self.cloudlet_cap.map(|c| c.saturating_sub(self.cloudlet_count))
    }

    /// LAN lots of `u` for one more unit of `s`.
    pub fn lan_lots(&self, u: usize, s: usize) -> u64 {
        let svc = &self.scenario.services()[s];
        let n = &self.network[u];
        lots(n.lan_down, svc.l_down).min(lots(n.lan_up, svc.l_up))
    }

    /// MAN lots of `u` for traffic from a non-local data center.
    pub fn man_lots(&self, u: usize, s: usize) -> u64 {
        let svc = &self.scenario.services()[s];
        let n = &self.network[u];
        lots(n.man_down, svc.l_down).min(lots(n.man_up, svc.l_up))
    }

    /// Units of `s` that `d` can serve to `u` right now.
    pub fn calc_lot_size(&self, d: usize, u: usize, s: usize) -> u32 {
        let sc = self.scenario;
        let svc = &sc.services()[s];
        let mut lot = (self.residual_demand[u][s].min(self.residual_capacity[d]) as u64).min(self.lan_lots(u, s));
        if sc.local_cloudlet(u) != Some(d) {
            lot = lot.min(self.man_lots(u, s));
            // A foreign cloudlet also sends the flow out over its home MAN.
            if let Some(h) = sc.home_cluster(d) {
                let n = &self.network[h];
                lot = lot.min(lots(n.man_down, svc.l_up)).min(lots(n.man_up, svc.l_down));
            }
        }
        if self.is_cloudlet(d) {
            if let Some(left) = self.cap_left() {
                lot = lot.min(left as u64);
            }
        }
        lot as u32
    }

    /// Most urgent pending pair: strictest service class, then largest
    /// residual demand, then lowest cluster index.
    pub fn select_service_demand(&self) -> Option<(usize, usize)> {
        self.pending
            .iter()
            .copied()
            .min_by(|&(u1, s1), &(u2, s2)| {
                s1.cmp(&s2)
                    .then(self.residual_demand[u2][s2].cmp(&self.residual_demand[u1][s1]))
                    .then(u1.cmp(&u2))
            })
    }

    /// Estimated marginal cost per unit of serving `lot` units from `d`, as
    /// a fraction (numerator, denominator) in milli-units.
    fn unit_cost(&self, d: usize, lot: u32) -> (i128, i128) {
        let dc = &self.scenario.data_centers()[d];
        let remaining = (self.scenario.horizon() - self.slot) as i128;
        let op = self.op_ahead[d] as i128;
        let e = lot as i128;
        let activation = if self.open[d] {
            0
        } else {
            dc.c_fix.millis() as i128 + dc.c_hw.millis() as i128 * e
        };
        (op * e + remaining * activation, remaining * e)
    }

    fn latency(&self, d: usize, u: usize) -> f64 {
        let attrs = self.scenario.qos_attributes();
        attrs
            .iter()
            .position(|a| a.id == "latency" && a.direction == QosDirection::LowerIsBetter)
            .map_or(0.0, |q| self.scenario.qos_guarantee(d, u, q))
    }

    /// Candidate data center for `(u, s)`, or `None` for "no supply".
    ///
    /// With MAN headroom every permitted data center competes; without it
    /// only the local cloudlet can serve.
    pub fn select_data_center(&self, u: usize, s: usize) -> Option<usize> {
        let local = self.scenario.local_cloudlet(u);
        let man_ok = self.man_lots(u, s) >= 1;
        let mut best: Option<(usize, u32)> = None;
        for &d in &self.permitted[u][s] {
            if self.residual_capacity[d] == 0 || (!man_ok && Some(d) != local) {
                continue;
            }
            if self.is_cloudlet(d) && self.cap_left() == Some(0) {
                continue;
            }
            let lot = self.calc_lot_size(d, u, s);
            if lot == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, blot)) => {
                    let (n1, d1) = self.unit_cost(d, lot);
                    let (n2, d2) = self.unit_cost(b, blot);
                    match (n1 * d2).cmp(&(n2 * d1)) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let local_first = (Some(b) != local).cmp(&(Some(d) != local));
                            match local_first {
                                Ordering::Greater => true,
                                Ordering::Less => false,
                                Ordering::Equal => self.latency(d, u) < self.latency(b, u),
                            }
                        }
                    }
                }
            };
            if better {
                best = Some((d, lot));
            }
        }
        best.map(|b| b.0)
    }

    /// Records `units` of `(d, u, s)` in the current slot and charges every
    /// residual.
    pub fn assign(&mut self, d: usize, u: usize, s: usize, units: u32) {
        if units == 0 {
            return;
        }
        let sc = self.scenario;
        let svc = &sc.services()[s];
        let t = self.slot;
        self.assigned[d][u][s][t] += units;
        self.residual_demand[u][s] -= units;
        self.residual_capacity[d] -= units;
        let (down, up) = (units as u64 * svc.l_down as u64, units as u64 * svc.l_up as u64);
        let n = &mut self.network[u];
        n.lan_down -= down;
        n.lan_up -= up;
        if sc.local_cloudlet(u) != Some(d) {
            n.man_down -= down;
            n.man_up -= up;
            if let Some(h) = sc.home_cluster(d) {
                let n = &mut self.network[h];
                n.man_down -= up;
                n.man_up -= down;
            }
        }
        if self.is_cloudlet(d) {
            self.cloudlet_count += units;
        }
        self.open[d] = true;
        if self.residual_capacity[d] == 0 {
            for per_u in &mut self.permitted {
                for per_s in per_u {
                    per_s.retain(|&x| x != d);
                }
            }
        }
    }

    /// Re-uses the previous slot's placements of services 1 and 2, truncated
    /// to what the current residuals allow.
    pub fn transfer_previous(&mut self) {
        let t = self.slot;
        if t == 0 {
            return;
        }
        let sc = self.scenario;
        for s in 0..sc.n_services().min(2) {
            for u in 0..sc.n_clusters() {
                for d in 0..sc.n_dcs() {
                    let prev = self.assigned[d][u][s][t - 1];
                    if prev == 0 {
                        continue;
                    }
                    let units = prev.min(self.calc_lot_size(d, u, s));
                    self.assign(d, u, s, units);
                }
            }
        }
    }

    /// Assigns open demand until no pending pair remains.
    pub fn assign_open_demand(&mut self) {
        self.refresh_pending();
        while let Some((u, s)) = self.select_service_demand() {
            let lan_ok = self.lan_lots(u, s) >= 1;
            let chosen = if lan_ok { self.select_data_center(u, s) } else { None };
            match chosen {
                Some(d) => {
                    let lot = self.calc_lot_size(d, u, s);
                    self.assign(d, u, s, lot);
                    if self.residual_demand[u][s] == 0 || self.permitted[u][s].is_empty() {
                        self.pending.retain(|&p| p != (u, s));
                    }
                }
                None => self.pending.retain(|&p| p != (u, s)),
            }
        }
    }
}

/// Runs the greedy over every slot and completes the solution.
pub fn solve(scenario: &Scenario, strategy: &Strategy) -> Result<HeuristicOutcome, HeuristicError> {
    let cap = match *strategy {
        Strategy::Heu1 => None,
        Strategy::Heu2 { rho } => Some(heu2_cap(scenario, rho)?),
    };
    Ok(solve_with_cap(scenario, cap))
}

/// The greedy with an explicit per-slot cloudlet cap (`None`: uncapped).
pub fn solve_with_cap(scenario: &Scenario, cap: Option<u32>) -> HeuristicOutcome {
    let mut state = HeuristicState::new(scenario, cap);
    for t in 0..scenario.horizon() {
        if t > 0 {
            state.start_slot(t);
        }
        state.transfer_previous();
        state.assign_open_demand();
    }
    let solution = Solution::complete_from_assignment(scenario, state.assigned);
    let cost = evaluate_cost(scenario, &solution).expect("dimensions match");
    HeuristicOutcome { solution, cost }
}
