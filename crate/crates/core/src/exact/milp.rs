use serde::{Deserialize, Serialize};

use crate::model::{ConstraintTag, Scenario, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilpVar {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    /// `None` for an unbounded variable.
    pub upper: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilpConstraint {
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
    pub tag: ConstraintTag,
}

impl MilpConstraint {
    pub fn activity(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Position of each variable family in the flat variable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarLayout {
    pub n_dcs: usize,
    pub n_clusters: usize,
    pub n_services: usize,
    pub horizon: usize,
    x0: usize,
    z0: usize,
    y0: usize,
    pen0: usize,
    mig0: usize,
    delta0: usize,
    total: usize,
}

impl VarLayout {
    pub fn new(n_dcs: usize, n_clusters: usize, n_services: usize, horizon: usize) -> Self {
        let n_y = n_dcs * n_clusters * n_services * horizon;
        let x0 = 0;
        let z0 = x0 + n_dcs;
        let y0 = z0 + n_dcs;
        let pen0 = y0 + n_y;
        let mig0 = pen0 + n_clusters * n_services * horizon;
        let mig_slots = horizon - 1;
        let delta0 = mig0 + n_dcs * n_clusters * n_services * mig_slots;
        let total = delta0 + n_clusters * n_services * mig_slots;
        VarLayout {
            n_dcs,
            n_clusters,
            n_services,
            horizon,
            x0,
            z0,
            y0,
            pen0,
            mig0,
            delta0,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn x(&self, d: usize) -> usize {
        self.x0 + d
    }

    pub fn z(&self, d: usize) -> usize {
        self.z0 + d
    }

    pub fn y(&self, d: usize, u: usize, s: usize, t: usize) -> usize {
        self.y0 + ((d * self.n_clusters + u) * self.n_services + s) * self.horizon + t
    }

    pub fn pen(&self, u: usize, s: usize, t: usize) -> usize {
        self.pen0 + (u * self.n_services + s) * self.horizon + t
    }

    /// Migration variable for slot `t >= 1`.
    pub fn mig(&self, d: usize, u: usize, s: usize, t: usize) -> usize {
        debug_assert!(t >= 1);
        self.mig0 + ((d * self.n_clusters + u) * self.n_services + s) * (self.horizon - 1) + t - 1
    }

    /// Direction indicator for slot `t >= 1`; 1 means the aggregate did not shrink.
    pub fn delta(&self, u: usize, s: usize, t: usize) -> usize {
        debug_assert!(t >= 1);
        self.delta0 + (u * self.n_services + s) * (self.horizon - 1) + t - 1
    }

    /// Branching priority of variable `j`: placement first, then server
    /// counts, assignments, the migration direction, and last the penalty
    /// and migration counts (integral for free once the rest is).
    pub fn priority(&self, j: usize) -> u8 {
        if j < self.z0 {
            0
        } else if j >= self.delta0 {
            3
        } else if j < self.y0 {
            1
        } else if j < self.pen0 {
            2
        } else {
            4
        }
    }

    /// Variable counts per family: (x, z, y, y_pen, y_mig, delta).
    pub fn family_sizes(&self) -> (usize, usize, usize, usize, usize, usize) {
        (
            self.z0 - self.x0,
            self.y0 - self.z0,
            self.pen0 - self.y0,
            self.mig0 - self.pen0,
            self.delta0 - self.mig0,
            self.total - self.delta0,
        )
    }
}

/// Linearized placement MILP. Minimization; objective coefficients are milli-money.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilpModel {
    pub variables: Vec<MilpVar>,
    pub constraints: Vec<MilpConstraint>,
    pub objective: Vec<i64>,
    pub layout: VarLayout,
    /// Big-M used by the migration linearization.
    pub big_m: i64,
    /// Demand per `pen` slot, in layout order.
    pub demand: Vec<i64>,
    pub k_min: Vec<i64>,
}

impl MilpModel {
    pub fn objective_value(&self, values: &[i64]) -> i64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Maps a scenario solution onto the variable vector, setting the
    /// migration variables to their tight values.
    pub fn encode(&self, solution: &Solution) -> Vec<i64> {
        let l = &self.layout;
        let mut v = vec![0i64; l.len()];
        for d in 0..l.n_dcs {
            v[l.x(d)] = solution.x[d] as i64;
            v[l.z(d)] = solution.z[d] as i64;
        }
        for u in 0..l.n_clusters {
            for s in 0..l.n_services {
                for t in 0..l.horizon {
                    v[l.pen(u, s, t)] = solution.y_pen[u][s][t] as i64;
                    for d in 0..l.n_dcs {
                        v[l.y(d, u, s, t)] = solution.y[d][u][s][t] as i64;
                    }
                    if t == 0 {
                        continue;
                    }
                    let before: i64 = (0..l.n_dcs).map(|d| solution.y[d][u][s][t - 1] as i64).sum();
                    let after: i64 = (0..l.n_dcs).map(|d| solution.y[d][u][s][t] as i64).sum();
                    let grows = after >= before;
                    v[l.delta(u, s, t)] = grows as i64;
                    for d in 0..l.n_dcs {
                        let diff = solution.y[d][u][s][t] as i64 - solution.y[d][u][s][t - 1] as i64;
                        v[l.mig(d, u, s, t)] = if grows { (-diff).max(0) } else { diff.max(0) };
                    }
                }
            }
        }
        v
    }

    /// Given the `y` entries of `values`, sets every other variable to the
    /// cheapest value compatible with them: x and z from the peak load,
    /// penalties from the shortfall, migrations tight.
    pub fn complete(&self, values: &mut [i64]) {
        let l = &self.layout;
        for d in 0..l.n_dcs {
            let mut peak = 0;
            for t in 0..l.horizon {
                let mut load = 0;
                for u in 0..l.n_clusters {
                    for s in 0..l.n_services {
                        load += values[l.y(d, u, s, t)];
                    }
                }
                peak = peak.max(load);
            }
            values[l.x(d)] = (peak > 0) as i64;
            values[l.z(d)] = if peak > 0 { peak.max(self.k_min[d]) } else { 0 };
        }
        for u in 0..l.n_clusters {
            for s in 0..l.n_services {
                let mut before = 0;
                for t in 0..l.horizon {
                    let after: i64 = (0..l.n_dcs).map(|d| values[l.y(d, u, s, t)]).sum();
                    let j = l.pen(u, s, t);
                    values[j] = (self.demand[j - l.pen0] - after).max(0);
                    if t > 0 {
                        let grows = after >= before;
                        values[l.delta(u, s, t)] = grows as i64;
                        for d in 0..l.n_dcs {
                            let diff = values[l.y(d, u, s, t)] - values[l.y(d, u, s, t - 1)];
                            values[l.mig(d, u, s, t)] = if grows { (-diff).max(0) } else { diff.max(0) };
                        }
                    }
                    before = after;
                }
            }
        }
    }

    /// Whether `j` is a `y` variable.
    pub fn is_assignment(&self, j: usize) -> bool {
        (self.layout.y0..self.layout.pen0).contains(&j)
    }

    /// Reads the scenario solution out of a variable vector.
    pub fn decode(&self, values: &[i64]) -> Solution {
        let l = &self.layout;
        let to_u32 = |v: i64| u32::try_from(v).expect("non-negative integral value");
        Solution {
            x: (0..l.n_dcs).map(|d| values[l.x(d)] != 0).collect(),
            z: (0..l.n_dcs).map(|d| to_u32(values[l.z(d)])).collect(),
            y: (0..l.n_dcs)
                .map(|d| {
                    (0..l.n_clusters)
                        .map(|u| {
                            (0..l.n_services)
                                .map(|s| (0..l.horizon).map(|t| to_u32(values[l.y(d, u, s, t)])).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            y_pen: (0..l.n_clusters)
                .map(|u| {
                    (0..l.n_services)
                        .map(|s| (0..l.horizon).map(|t| to_u32(values[l.pen(u, s, t)])).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Migration variable values per `[d][u][s][t]`, zero at `t = 0`.
    pub fn migrations(&self, values: &[i64]) -> Vec<Vec<Vec<Vec<i64>>>> {
        let l = &self.layout;
        (0..l.n_dcs)
            .map(|d| {
                (0..l.n_clusters)
                    .map(|u| {
                        (0..l.n_services)
                            .map(|s| {
                                (0..l.horizon)
                                    .map(|t| if t == 0 { 0 } else { values[l.mig(d, u, s, t)] })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether `values` respects every bound and constraint.
    pub fn is_feasible(&self, values: &[i64]) -> bool {
        values.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(values)
                .all(|(v, &x)| x >= v.lower && v.upper.is_none_or(|u| x <= u))
            && self.constraints.iter().all(|c| c.is_satisfied(values))
    }
}

/// Builds the linearized model of `scenario`.
///
/// Eligibility enters as data: each `y` gets `y <= p * k_max`. The migration
/// case split uses one binary per (u, s, t >= 2) and `M = sum_d k_max`.
pub fn build_milp(scenario: &Scenario) -> MilpModel {
    let (n_d, n_u, n_s, n_t) = (
        scenario.n_dcs(),
        scenario.n_clusters(),
        scenario.n_services(),
        scenario.horizon(),
    );
    let l = VarLayout::new(n_d, n_u, n_s, n_t);
    let dcs = scenario.data_centers();
    let clusters = scenario.user_clusters();
    let services = scenario.services();
    let big_m: i64 = dcs.iter().map(|d| d.k_max as i64).sum();

    let mut variables = vec![
        MilpVar {
            name: String::new(),
            kind: VarKind::Integer,
            lower: 0,
            upper: None,
        };
        l.len()
    ];
    let mut objective = vec![0i64; l.len()];
    let mut set = |j: usize, name: String, kind: VarKind, upper: Option<i64>, cost: i64| {
        variables[j] = MilpVar {
            name,
            kind,
            lower: 0,
            upper,
        };
        objective[j] = cost;
    };

    for (d, dc) in dcs.iter().enumerate() {
        set(l.x(d), format!("x[{}]", dc.id), VarKind::Binary, Some(1), dc.c_fix.millis());
        set(l.z(d), format!("z[{}]", dc.id), VarKind::Integer, Some(dc.k_max as i64), dc.c_hw.millis());
    }
    for (d, dc) in dcs.iter().enumerate() {
        for (u, uc) in clusters.iter().enumerate() {
            for (s, svc) in services.iter().enumerate() {
                for t in 0..n_t {
                    let tag = format!("{},{},{},t{}", dc.id, uc.id, svc.id, t + 1);
                    set(l.y(d, u, s, t), format!("y[{tag}]"), VarKind::Integer, None, dc.c_op[t].millis());
                    if t > 0 {
                        set(l.mig(d, u, s, t), format!("ymig[{tag}]"), VarKind::Integer, None, svc.c_mig.millis());
                    }
                }
            }
        }
    }
    for (u, uc) in clusters.iter().enumerate() {
        for (s, svc) in services.iter().enumerate() {
            for t in 0..n_t {
                let tag = format!("{},{},t{}", uc.id, svc.id, t + 1);
                let pen = scenario.penalty_cost(u, s).millis();
                set(l.pen(u, s, t), format!("ypen[{tag}]"), VarKind::Integer, None, pen);
                if t > 0 {
                    set(l.delta(u, s, t), format!("delta[{tag}]"), VarKind::Binary, Some(1), 0);
                }
            }
        }
    }

    let mut constraints = Vec::new();
    let mut add = |terms: Vec<(usize, i64)>, relation, rhs, tag| {
        constraints.push(MilpConstraint {
            terms,
            relation,
            rhs,
            tag,
        })
    };

    for u in 0..n_u {
        for s in 0..n_s {
            for t in 0..n_t {
                let mut terms: Vec<_> = (0..n_d).map(|d| (l.y(d, u, s, t), 1)).collect();
                terms.push((l.pen(u, s, t), 1));
                add(terms, Relation::Ge, scenario.demand(u, s, t) as i64, ConstraintTag::DemandCoverage);
            }
        }
    }

    for (d, dc) in dcs.iter().enumerate() {
        for t in 0..n_t {
            let mut terms = Vec::with_capacity(n_u * n_s + 1);
            for u in 0..n_u {
                for s in 0..n_s {
                    terms.push((l.y(d, u, s, t), 1));
                }
            }
            terms.push((l.z(d), -1));
            add(terms, Relation::Le, 0, ConstraintTag::CapacityLink);
        }
        add(
            vec![(l.z(d), 1), (l.x(d), -(dc.k_max as i64))],
            Relation::Le,
            0,
            ConstraintTag::CapacityUpper,
        );
        add(
            vec![(l.z(d), 1), (l.x(d), -(dc.k_min as i64))],
            Relation::Ge,
            0,
            ConstraintTag::CapacityLower,
        );
        for u in 0..n_u {
            for s in 0..n_s {
                let cap = if scenario.is_eligible(d, u, s) { dc.k_max as i64 } else { 0 };
                for t in 0..n_t {
                    add(vec![(l.y(d, u, s, t), 1)], Relation::Le, cap, ConstraintTag::QosEligibility);
                }
            }
        }
    }

    for (u, uc) in clusters.iter().enumerate() {
        let local = scenario.local_cloudlet(u);
        for t in 0..n_t {
            let mut lan_down = Vec::new();
            let mut lan_up = Vec::new();
            let mut man_down = Vec::new();
            let mut man_up = Vec::new();
            for d in 0..n_d {
                for (s, svc) in services.iter().enumerate() {
                    let j = l.y(d, u, s, t);
                    lan_down.push((j, svc.l_down as i64));
                    lan_up.push((j, svc.l_up as i64));
                    if Some(d) != local {
                        man_down.push((j, svc.l_down as i64));
                        man_up.push((j, svc.l_up as i64));
                    }
                }
            }
            if let Some(c) = local {
                for other in (0..n_u).filter(|&o| o != u) {
                    for (s, svc) in services.iter().enumerate() {
                        let j = l.y(c, other, s, t);
                        man_down.push((j, svc.l_up as i64));
                        man_up.push((j, svc.l_down as i64));
                    }
                }
            }
            let strip = |v: Vec<(usize, i64)>| v.into_iter().filter(|&(_, a)| a != 0).collect::<Vec<_>>();
            add(strip(lan_down), Relation::Le, uc.lan_down as i64, ConstraintTag::LanDown);
            add(strip(lan_up), Relation::Le, uc.lan_up as i64, ConstraintTag::LanUp);
            add(strip(man_down), Relation::Le, uc.man_down as i64, ConstraintTag::ManDown);
            add(strip(man_up), Relation::Le, uc.man_up as i64, ConstraintTag::ManUp);
        }
    }

    for u in 0..n_u {
        for s in 0..n_s {
            for t in 1..n_t {
                let delta = l.delta(u, s, t);
                // A_t - A_{t-1} - M delta <= 0
                let mut grow: Vec<_> = (0..n_d)
                    .flat_map(|d| [(l.y(d, u, s, t), 1), (l.y(d, u, s, t - 1), -1)])
                    .collect();
                grow.push((delta, -big_m));
                add(grow, Relation::Le, 0, ConstraintTag::MigrationDirectionUp);
                // A_{t-1} - A_t + M delta <= M
                let mut shrink: Vec<_> = (0..n_d)
                    .flat_map(|d| [(l.y(d, u, s, t - 1), 1), (l.y(d, u, s, t), -1)])
                    .collect();
                shrink.push((delta, big_m));
                add(shrink, Relation::Le, big_m, ConstraintTag::MigrationDirectionDown);
                for d in 0..n_d {
                    let (mig, prev, curr) = (l.mig(d, u, s, t), l.y(d, u, s, t - 1), l.y(d, u, s, t));
                    // ymig >= prev - curr - M (1 - delta)
                    add(
                        vec![(mig, 1), (prev, -1), (curr, 1), (delta, -big_m)],
                        Relation::Ge,
                        -big_m,
                        ConstraintTag::MigrationDecrease,
                    );
                    // ymig >= curr - prev - M delta
                    add(
                        vec![(mig, 1), (curr, -1), (prev, 1), (delta, big_m)],
                        Relation::Ge,
                        0,
                        ConstraintTag::MigrationIncrease,
                    );
                }
            }
        }
    }

    let mut demand = vec![0; n_u * n_s * n_t];
    for u in 0..n_u {
        for s in 0..n_s {
            for t in 0..n_t {
                demand[l.pen(u, s, t) - l.pen0] = scenario.demand(u, s, t) as i64;
            }
        }
    }
    MilpModel {
        variables,
        constraints,
        objective,
        layout: l,
        big_m,
        demand,
        k_min: dcs.iter().map(|d| d.k_min as i64).collect(),
    }
}
