use serde::{Deserialize, Serialize};

use super::{ModelError, Scenario, Solution};

/// Constraint families of the placement model.
///
/// The first nine are checked by [`validate`]; the migration tags only occur
/// in the linearized MILP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintTag {
    /// Served plus unserved demand covers the demand, per (u, s, t).
    DemandCoverage,
    /// Per-slot load of a data center fits its servers, per (d, t).
    CapacityLink,
    /// Servers at most `x * k_max`, per d.
    CapacityUpper,
    /// Servers at least `x * k_min`, per d.
    CapacityLower,
    /// No load on (d, u, s) unless QoS guarantees meet the requirements.
    QosEligibility,
    /// Downstream traffic into a cluster's LAN, per (u, t).
    LanDown,
    LanUp,
    /// MAN traffic of a cluster: inflow from foreign data centers plus
    /// outflow of its own cloudlet to other clusters, per (u, t).
    ManDown,
    ManUp,
    /// Aggregate growth forces the direction indicator up.
    MigrationDirectionUp,
    /// Aggregate shrinkage forces the direction indicator down.
    MigrationDirectionDown,
    /// Migration at least the per-DC decrease when the aggregate does not shrink.
    MigrationDecrease,
    /// Migration at least the per-DC increase when the aggregate shrinks.
    MigrationIncrease,
}

impl ConstraintTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintTag::DemandCoverage => "demand-coverage",
            ConstraintTag::CapacityLink => "capacity-link",
            ConstraintTag::CapacityUpper => "capacity-upper",
            ConstraintTag::CapacityLower => "capacity-lower",
            ConstraintTag::QosEligibility => "qos-eligibility",
            ConstraintTag::LanDown => "lan-down",
            ConstraintTag::LanUp => "lan-up",
            ConstraintTag::ManDown => "man-down",
            ConstraintTag::ManUp => "man-up",
            ConstraintTag::MigrationDirectionUp => "migration-direction-up",
            ConstraintTag::MigrationDirectionDown => "migration-direction-down",
            ConstraintTag::MigrationDecrease => "migration-decrease",
            ConstraintTag::MigrationIncrease => "migration-increase",
        }
    }
}

impl std::fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A violated constraint. `slack` is the amount by which it is exceeded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: ConstraintTag,
    pub indices: Vec<usize>,
    pub slack: i64,
}

/// Traffic a cluster's MAN link carries in slot `t`, as (down, up) Mbps.
pub(crate) fn man_load(scenario: &Scenario, y: &[Vec<Vec<Vec<u32>>>], u: usize, t: usize) -> (u64, u64) {
    let services = scenario.services();
    let local = scenario.local_cloudlet(u);
    let (mut down, mut up) = (0u64, 0u64);
    for (d, per_d) in y.iter().enumerate() {
        if Some(d) == local {
            continue;
        }
        for (s, svc) in services.iter().enumerate() {
            let units = per_d[u][s][t] as u64;
            down += units * svc.l_down as u64;
            up += units * svc.l_up as u64;
        }
    }
    if let Some(l) = local {
        for (other, per_u) in y[l].iter().enumerate() {
            if other == u {
                continue;
            }
            for (s, svc) in services.iter().enumerate() {
                let units = per_u[s][t] as u64;
                // Remote users' uploads arrive on our downlink and vice versa.
                down += units * svc.l_up as u64;
                up += units * svc.l_down as u64;
            }
        }
    }
    (down, up)
}

/// Every constraint `solution` violates. Empty iff the solution is feasible.
///
/// Integrality and non-negativity hold by construction of [`Solution`].
pub fn validate(scenario: &Scenario, solution: &Solution) -> Result<Vec<Violation>, ModelError> {
    solution.check_dims(scenario)?;
    let mut out = Vec::new();
    let mut push = |tag, indices: Vec<usize>, lhs: i64, rhs: i64| {
        if lhs > rhs {
            out.push(Violation {
                tag,
                indices,
                slack: lhs - rhs,
            });
        }
    };
    let n_t = scenario.horizon();
    let services = scenario.services();

    for u in 0..scenario.n_clusters() {
        for s in 0..scenario.n_services() {
            for t in 0..n_t {
                let served: i64 = solution.y.iter().map(|per_d| per_d[u][s][t] as i64).sum();
                let covered = served + solution.y_pen[u][s][t] as i64;
                push(ConstraintTag::DemandCoverage, vec![u, s, t], scenario.demand(u, s, t) as i64, covered);
            }
        }
    }

    for (d, dc) in scenario.data_centers().iter().enumerate() {
        let z = solution.z[d] as i64;
        for t in 0..n_t {
            let load: i64 = solution.y[d]
                .iter()
                .flat_map(|per_u| per_u.iter().map(|per_s| per_s[t] as i64))
                .sum();
            push(ConstraintTag::CapacityLink, vec![d, t], load, z);
        }
        let open = solution.x[d] as i64;
        push(ConstraintTag::CapacityUpper, vec![d], z, open * dc.k_max as i64);
        push(ConstraintTag::CapacityLower, vec![d], open * dc.k_min as i64, z);
        for u in 0..scenario.n_clusters() {
            for s in 0..scenario.n_services() {
                if scenario.is_eligible(d, u, s) {
                    continue;
                }
                for t in 0..n_t {
                    push(ConstraintTag::QosEligibility, vec![d, u, s, t], solution.y[d][u][s][t] as i64, 0);
                }
            }
        }
    }

    for (u, uc) in scenario.user_clusters().iter().enumerate() {
        for t in 0..n_t {
            let (mut down, mut up) = (0i64, 0i64);
            for per_d in &solution.y {
                for (s, svc) in services.iter().enumerate() {
                    let units = per_d[u][s][t] as i64;
                    down += units * svc.l_down as i64;
                    up += units * svc.l_up as i64;
                }
            }
            push(ConstraintTag::LanDown, vec![u, t], down, uc.lan_down as i64);
            push(ConstraintTag::LanUp, vec![u, t], up, uc.lan_up as i64);
            let (man_down, man_up) = man_load(scenario, &solution.y, u, t);
            push(ConstraintTag::ManDown, vec![u, t], man_down as i64, uc.man_down as i64);
            push(ConstraintTag::ManUp, vec![u, t], man_up as i64, uc.man_up as i64);
        }
    }

    Ok(out)
}
