//! Domain model of the dynamic cloudlet placement and selection problem.
//!
//! A [`Scenario`] is an immutable instance: data centers (one or more remote
//! clouds plus candidate cloudlets), user clusters, services, QoS data, a
//! demand tensor and the cost coefficients. A [`Solution`] holds placement
//! decisions, server counts, the per-slot assignment tensor and unserved
//! demand. [`evaluate_cost`] and [`validate`] are the shared oracle every
//! solver is checked against.

mod cost;
mod validate;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Money;

pub use cost::{compute_migrations, evaluate_cost, CostBreakdown};
pub use validate::{validate, ConstraintTag, Violation};

/// Upper bound on the server capacity of a single cloudlet (one rack).
pub const MAX_CLOUDLET_CAPACITY: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid reference: {0}")]
    InvalidReference(String),
    #[error("dimension mismatch in `{field}`: expected {expected}, found {found}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid value in `{field}`: {reason}")]
    InvalidValue { field: String, reason: String },
}

impl ModelError {
    fn value(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidValue {
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn dims(field: impl Into<String>, expected: usize, found: usize) -> Self {
        ModelError::DimensionMismatch {
            field: field.into(),
            expected,
            found,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QosDirection {
    HigherIsBetter,
    LowerIsBetter,
}

impl QosDirection {
    /// Whether `guarantee` meets `requirement` under this polarity. Boundary equality passes.
    pub fn satisfies(self, guarantee: f64, requirement: f64) -> bool {
        match self {
            QosDirection::HigherIsBetter => guarantee >= requirement,
            QosDirection::LowerIsBetter => guarantee <= requirement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosAttribute {
    pub id: String,
    pub direction: QosDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataCenterKind {
    RemoteCloud,
    Cloudlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataCenter {
    pub id: String,
    pub kind: DataCenterKind,
    /// Minimum number of servers once the data center is in use.
    pub k_min: u32,
    /// Maximum number of servers.
    pub k_max: u32,
    /// Fixed cost of using the site, charged once per horizon.
    pub c_fix: Money,
    /// Cost per installed server, charged once per horizon.
    pub c_hw: Money,
    /// Operating cost per resource unit and slot, one entry per slot.
    pub c_op: Vec<Money>,
    /// User cluster the cloudlet is co-located with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home_cluster: Option<String>,
}

impl DataCenter {
    pub fn is_cloudlet(&self) -> bool {
        self.kind == DataCenterKind::Cloudlet
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserCluster {
    pub id: String,
    /// Bandwidth caps in Mbps.
    pub lan_down: u32,
    pub lan_up: u32,
    pub man_down: u32,
    pub man_up: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_cloudlet: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Service {
    pub id: String,
    /// Downstream bandwidth per resource unit, Mbps.
    pub l_down: u32,
    /// Upstream bandwidth per resource unit, Mbps.
    pub l_up: u32,
    /// Cost per migrated resource unit.
    pub c_mig: Money,
    /// Required value per QoS attribute id.
    pub qos_req: BTreeMap<String, f64>,
}

/// Raw scenario data. Turned into a checked [`Scenario`] by [`Scenario::new`].
///
/// Tensor layouts: `demand[u][s][t]`, `qos_guarantees[d][u][q]`,
/// `penalty_costs[u][s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParts {
    pub horizon: usize,
    pub qos_attributes: Vec<QosAttribute>,
    pub data_centers: Vec<DataCenter>,
    pub user_clusters: Vec<UserCluster>,
    pub services: Vec<Service>,
    pub demand: Vec<Vec<Vec<u32>>>,
    pub qos_guarantees: Vec<Vec<Vec<f64>>>,
    pub penalty_costs: Vec<Vec<Money>>,
}

/// A checked, immutable problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    parts: ScenarioParts,
    local_cloudlet: Vec<Option<usize>>,
    home_cluster: Vec<Option<usize>>,
    // eligible[d][u][s]
    eligible: Vec<Vec<Vec<bool>>>,
}

fn index_of<'a>(ids: impl Iterator<Item = &'a str>) -> Result<HashMap<&'a str, usize>, String> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id, i).is_some() {
            return Err(id.to_string());
        }
    }
    Ok(map)
}

impl Scenario {
    pub fn new(parts: ScenarioParts) -> Result<Self, ModelError> {
        let horizon = parts.horizon;
        if horizon == 0 {
            return Err(ModelError::value("horizon", "must be at least 1"));
        }
        let n_d = parts.data_centers.len();
        let n_u = parts.user_clusters.len();
        let n_s = parts.services.len();
        let n_q = parts.qos_attributes.len();

        let dup = |field: &str, id: String| ModelError::value(field, format!("duplicate id `{id}`"));
        let attr_idx = index_of(parts.qos_attributes.iter().map(|q| q.id.as_str()))
            .map_err(|id| dup("qos_attributes", id))?;
        let dc_idx = index_of(parts.data_centers.iter().map(|d| d.id.as_str()))
            .map_err(|id| dup("data_centers", id))?;
        let uc_idx = index_of(parts.user_clusters.iter().map(|u| u.id.as_str()))
            .map_err(|id| dup("user_clusters", id))?;
        index_of(parts.services.iter().map(|s| s.id.as_str())).map_err(|id| dup("services", id))?;

        let mut home_cluster = vec![None; n_d];
        for (d, dc) in parts.data_centers.iter().enumerate() {
            let field = |name: &str| format!("data_centers[{d}].{name}");
            if dc.k_min > dc.k_max {
                return Err(ModelError::value(field("k_min"), "exceeds k_max"));
            }
            if dc.c_op.len() != horizon {
                return Err(ModelError::dims(field("c_op"), horizon, dc.c_op.len()));
            }
            for (name, m) in [("c_fix", dc.c_fix), ("c_hw", dc.c_hw)]
                .into_iter()
                .chain(dc.c_op.iter().map(|&m| ("c_op", m)))
            {
                if m < Money::ZERO {
                    return Err(ModelError::value(field(name), "must be non-negative"));
                }
            }
            match dc.kind {
                DataCenterKind::RemoteCloud => {
                    if dc.k_min != 0 {
                        return Err(ModelError::value(field("k_min"), "remote cloud must have k_min = 0"));
                    }
                    if dc.home_cluster.is_some() {
                        return Err(ModelError::value(
                            field("home_cluster"),
                            "remote cloud cannot have a home cluster",
                        ));
                    }
                }
                DataCenterKind::Cloudlet => {
                    if dc.k_max < 1 || dc.k_max > MAX_CLOUDLET_CAPACITY {
                        return Err(ModelError::value(
                            field("k_max"),
                            format!("cloudlet capacity must lie in [1, {MAX_CLOUDLET_CAPACITY}]"),
                        ));
                    }
                    if let Some(h) = &dc.home_cluster {
                        let u = *uc_idx.get(h.as_str()).ok_or_else(|| {
                            ModelError::InvalidReference(format!("{}: unknown user cluster `{h}`", field("home_cluster")))
                        })?;
                        home_cluster[d] = Some(u);
                    }
                }
            }
        }

        let mut local_cloudlet = vec![None; n_u];
        for (u, uc) in parts.user_clusters.iter().enumerate() {
            if let Some(l) = &uc.local_cloudlet {
                let field = format!("user_clusters[{u}].local_cloudlet");
                let d = *dc_idx
                    .get(l.as_str())
                    .ok_or_else(|| ModelError::InvalidReference(format!("{field}: unknown data center `{l}`")))?;
                if home_cluster[d] != Some(u) {
                    return Err(ModelError::InvalidReference(format!(
                        "{field}: `{l}` does not name this cluster as its home"
                    )));
                }
                local_cloudlet[u] = Some(d);
            }
        }
        for (d, h) in home_cluster.iter().enumerate() {
            if let Some(u) = *h {
                if local_cloudlet[u] != Some(d) {
                    return Err(ModelError::InvalidReference(format!(
                        "data_centers[{d}].home_cluster: cluster `{}` does not list it as local cloudlet",
                        parts.user_clusters[u].id
                    )));
                }
            }
        }

        for (s, svc) in parts.services.iter().enumerate() {
            if svc.c_mig < Money::ZERO {
                return Err(ModelError::value(format!("services[{s}].c_mig"), "must be non-negative"));
            }
            for (attr, value) in &svc.qos_req {
                if !attr_idx.contains_key(attr.as_str()) {
                    return Err(ModelError::InvalidReference(format!(
                        "services[{s}].qos_req: unknown attribute `{attr}`"
                    )));
                }
                if !value.is_finite() {
                    return Err(ModelError::value(format!("services[{s}].qos_req"), "must be finite"));
                }
            }
        }

        if parts.demand.len() != n_u {
            return Err(ModelError::dims("demand", n_u, parts.demand.len()));
        }
        for (u, per_u) in parts.demand.iter().enumerate() {
            if per_u.len() != n_s {
                return Err(ModelError::dims(format!("demand[{u}]"), n_s, per_u.len()));
            }
            for (s, per_s) in per_u.iter().enumerate() {
                if per_s.len() != horizon {
                    return Err(ModelError::dims(format!("demand[{u}][{s}]"), horizon, per_s.len()));
                }
            }
        }
        if parts.qos_guarantees.len() != n_d {
            return Err(ModelError::dims("qos_guarantees", n_d, parts.qos_guarantees.len()));
        }
        for (d, per_d) in parts.qos_guarantees.iter().enumerate() {
            if per_d.len() != n_u {
                return Err(ModelError::dims(format!("qos_guarantees[{d}]"), n_u, per_d.len()));
            }
            for (u, per_u) in per_d.iter().enumerate() {
                if per_u.len() != n_q {
                    return Err(ModelError::dims(format!("qos_guarantees[{d}][{u}]"), n_q, per_u.len()));
                }
                if per_u.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(ModelError::value(
                        format!("qos_guarantees[{d}][{u}]"),
                        "must be finite and non-negative",
                    ));
                }
            }
        }
        if parts.penalty_costs.len() != n_u {
            return Err(ModelError::dims("penalty_costs", n_u, parts.penalty_costs.len()));
        }
        for (u, per_u) in parts.penalty_costs.iter().enumerate() {
            if per_u.len() != n_s {
                return Err(ModelError::dims(format!("penalty_costs[{u}]"), n_s, per_u.len()));
            }
            if per_u.iter().any(|m| *m < Money::ZERO) {
                return Err(ModelError::value(format!("penalty_costs[{u}]"), "must be non-negative"));
            }
        }

        let requirements: Vec<Vec<(usize, f64)>> = parts
            .services
            .iter()
            .map(|svc| svc.qos_req.iter().map(|(a, v)| (attr_idx[a.as_str()], *v)).collect())
            .collect();
        let eligible = (0..n_d)
            .map(|d| {
                (0..n_u)
                    .map(|u| {
                        requirements
                            .iter()
                            .map(|reqs| {
                                reqs.iter().all(|&(q, req)| {
                                    parts.qos_attributes[q]
                                        .direction
                                        .satisfies(parts.qos_guarantees[d][u][q], req)
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        Ok(Scenario {
            parts,
            local_cloudlet,
            home_cluster,
            eligible,
        })
    }

    pub fn parts(&self) -> &ScenarioParts {
        &self.parts
    }

    pub fn into_parts(self) -> ScenarioParts {
        self.parts
    }

    pub fn horizon(&self) -> usize {
        self.parts.horizon
    }

    pub fn data_centers(&self) -> &[DataCenter] {
        &self.parts.data_centers
    }

    pub fn user_clusters(&self) -> &[UserCluster] {
        &self.parts.user_clusters
    }

    pub fn services(&self) -> &[Service] {
        &self.parts.services
    }

    pub fn qos_attributes(&self) -> &[QosAttribute] {
        &self.parts.qos_attributes
    }

    pub fn n_dcs(&self) -> usize {
        self.parts.data_centers.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.parts.user_clusters.len()
    }

    pub fn n_services(&self) -> usize {
        self.parts.services.len()
    }

    pub fn demand(&self, u: usize, s: usize, t: usize) -> u32 {
        self.parts.demand[u][s][t]
    }

    pub fn penalty_cost(&self, u: usize, s: usize) -> Money {
        self.parts.penalty_costs[u][s]
    }

    pub fn qos_guarantee(&self, d: usize, u: usize, q: usize) -> f64 {
        self.parts.qos_guarantees[d][u][q]
    }

    /// Index of the cloudlet co-located with cluster `u`.
    pub fn local_cloudlet(&self, u: usize) -> Option<usize> {
        self.local_cloudlet[u]
    }

    /// Index of the cluster hosting cloudlet `d`.
    pub fn home_cluster(&self, d: usize) -> Option<usize> {
        self.home_cluster[d]
    }

    /// Precomputed eligibility `p[d][u][s]`. Indices must be in range.
    pub fn is_eligible(&self, d: usize, u: usize, s: usize) -> bool {
        self.eligible[d][u][s]
    }

    pub fn dc_index(&self, id: &str) -> Option<usize> {
        self.parts.data_centers.iter().position(|d| d.id == id)
    }

    pub fn cluster_index(&self, id: &str) -> Option<usize> {
        self.parts.user_clusters.iter().position(|u| u.id == id)
    }

    pub fn service_index(&self, id: &str) -> Option<usize> {
        self.parts.services.iter().position(|s| s.id == id)
    }

    /// Total demand over all clusters and services in slot `t`.
    pub fn aggregate_demand(&self, t: usize) -> u64 {
        self.parts
            .demand
            .iter()
            .flat_map(|per_u| per_u.iter().map(|per_s| per_s[t] as u64))
            .sum()
    }
}

/// Whether data center `d` may serve service `s` to cluster `u`.
pub fn eligibility(scenario: &Scenario, d: usize, u: usize, s: usize) -> Result<bool, ModelError> {
    if d >= scenario.n_dcs() {
        return Err(ModelError::InvalidReference(format!("data center index {d}")));
    }
    if u >= scenario.n_clusters() {
        return Err(ModelError::InvalidReference(format!("user cluster index {u}")));
    }
    if s >= scenario.n_services() {
        return Err(ModelError::InvalidReference(format!("service index {s}")));
    }
    Ok(scenario.is_eligible(d, u, s))
}

/// Placement, sizing and assignment decisions for a scenario.
///
/// Layouts: `y[d][u][s][t]`, `y_pen[u][s][t]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<bool>,
    pub z: Vec<u32>,
    pub y: Vec<Vec<Vec<Vec<u32>>>>,
    pub y_pen: Vec<Vec<Vec<u32>>>,
}

impl Solution {
    /// No data center used, nothing assigned, no penalty recorded.
    pub fn zeros(scenario: &Scenario) -> Self {
        let (n_d, n_u, n_s, n_t) = (
            scenario.n_dcs(),
            scenario.n_clusters(),
            scenario.n_services(),
            scenario.horizon(),
        );
        Solution {
            x: vec![false; n_d],
            z: vec![0; n_d],
            y: vec![vec![vec![vec![0; n_t]; n_s]; n_u]; n_d],
            y_pen: vec![vec![vec![0; n_t]; n_s]; n_u],
        }
    }

    /// Every unit of demand left unserved.
    pub fn all_penalty(scenario: &Scenario) -> Self {
        let mut sol = Self::zeros(scenario);
        sol.y_pen = scenario.parts().demand.clone();
        sol
    }

    /// Sets `y_pen` to exactly the uncovered demand and derives the
    /// cheapest consistent `x`/`z` (peak per-slot load, raised to `k_min`).
    pub fn complete_from_assignment(scenario: &Scenario, y: Vec<Vec<Vec<Vec<u32>>>>) -> Self {
        let mut sol = Self::zeros(scenario);
        for (d, dc) in scenario.data_centers().iter().enumerate() {
            let peak = (0..scenario.horizon())
                .map(|t| y[d].iter().flat_map(|per_u| per_u.iter().map(|per_s| per_s[t])).sum::<u32>())
                .max()
                .unwrap_or(0);
            if peak > 0 {
                sol.x[d] = true;
                sol.z[d] = peak.max(dc.k_min);
            }
        }
        for u in 0..scenario.n_clusters() {
            for s in 0..scenario.n_services() {
                for t in 0..scenario.horizon() {
                    let served: u32 = (0..scenario.n_dcs()).map(|d| y[d][u][s][t]).sum();
                    sol.y_pen[u][s][t] = scenario.demand(u, s, t).saturating_sub(served);
                }
            }
        }
        sol.y = y;
        sol
    }

    pub(crate) fn check_dims(&self, scenario: &Scenario) -> Result<(), ModelError> {
        let (n_d, n_u, n_s, n_t) = (
            scenario.n_dcs(),
            scenario.n_clusters(),
            scenario.n_services(),
            scenario.horizon(),
        );
        let check = |field: &str, expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(ModelError::dims(field, expected, found))
            }
        };
        check("x", n_d, self.x.len())?;
        check("z", n_d, self.z.len())?;
        check("y", n_d, self.y.len())?;
        for per_d in &self.y {
            check("y[d]", n_u, per_d.len())?;
            for per_u in per_d {
                check("y[d][u]", n_s, per_u.len())?;
                for per_s in per_u {
                    check("y[d][u][s]", n_t, per_s.len())?;
                }
            }
        }
        check("y_pen", n_u, self.y_pen.len())?;
        for per_u in &self.y_pen {
            check("y_pen[u]", n_s, per_u.len())?;
            for per_s in per_u {
                check("y_pen[u][s]", n_t, per_s.len())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn latency() -> QosAttribute {
        QosAttribute {
            id: "latency".into(),
            direction: QosDirection::LowerIsBetter,
        }
    }

    pub fn cloudlet(id: &str, home: &str, k_max: u32, c_fix: i64, c_hw: i64, c_op: &[i64]) -> DataCenter {
        DataCenter {
            id: id.into(),
            kind: DataCenterKind::Cloudlet,
            k_min: 0,
            k_max,
            c_fix: Money(c_fix),
            c_hw: Money(c_hw),
            c_op: c_op.iter().map(|&m| Money(m)).collect(),
            home_cluster: Some(home.into()),
        }
    }

    pub fn remote(id: &str, k_max: u32, c_op: &[i64]) -> DataCenter {
        DataCenter {
            id: id.into(),
            kind: DataCenterKind::RemoteCloud,
            k_min: 0,
            k_max,
            c_fix: Money::ZERO,
            c_hw: Money::ZERO,
            c_op: c_op.iter().map(|&m| Money(m)).collect(),
            home_cluster: None,
        }
    }

    pub fn cluster(id: &str, local: Option<&str>, lan: u32, man: u32) -> UserCluster {
        UserCluster {
            id: id.into(),
            lan_down: lan,
            lan_up: lan,
            man_down: man,
            man_up: man,
            local_cloudlet: local.map(Into::into),
        }
    }

    pub fn service(id: &str, l_down: u32, l_up: u32, c_mig: i64, latency_req: f64) -> Service {
        Service {
            id: id.into(),
            l_down,
            l_up,
            c_mig: Money(c_mig),
            qos_req: [("latency".to_string(), latency_req)].into_iter().collect(),
        }
    }
}
