//! Seeded instance generation and the scenario/solution file formats.
//!
//! Generated instances model a metropolitan area: every location is a user
//! cluster that can host a cloudlet, plus (optionally) one remote cloud with
//! effectively unlimited capacity. Service classes, bandwidths and cost
//! ratios follow the evaluation setup the toolkit targets; magnitudes that are
//! not given there are knobs on [`GeneratorParams`].

mod io;
mod tiny;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    DataCenter, DataCenterKind, ModelError, QosAttribute, QosDirection, Scenario, ScenarioParts, Service,
    UserCluster, MAX_CLOUDLET_CAPACITY,
};
use crate::money::Money;

pub use tiny::{tiny_scenario, TinyLimits};
pub use io::{read_scenario, read_solution, write_scenario, write_solution, FormatError, FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator parameter `{0}`: {1}")]
    InvalidParams(&'static str, String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-class service characteristics: download Mbps, upload Mbps, latency
/// requirement (ms), migration cost multiplier, penalty multiplier.
pub const SERVICE_CLASSES: [(u32, u32, f64, f64, f64); 3] = [
    (40, 10, 50.0, 1.00, 1.20),
    (40, 10, 100.0, 0.75, 1.00),
    (20, 20, 250.0, 0.50, 1.00),
];

/// Latency (ms) of a cloudlet towards its own cluster.
pub const LATENCY_LOCAL_MS: f64 = 10.0;
/// Latency (ms) of a cloudlet towards any other cluster (one MAN hop).
pub const LATENCY_FOREIGN_MS: f64 = 60.0;
/// Latency (ms) of the remote cloud towards any cluster.
pub const LATENCY_REMOTE_MS: f64 = 150.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    /// Number of locations; each is a user cluster with a candidate cloudlet.
    pub n_locations: usize,
    pub include_remote_cloud: bool,
    /// The remote cloud takes the place of the last location's cloudlet, so
    /// that the instance has as many data centers as user clusters.
    pub remote_replaces_cloudlet: bool,
    /// Number of services, taken in class order (at most three).
    pub n_services: usize,
    pub horizon: usize,
    /// QoS attributes; the first is latency, further ones are synthetic
    /// higher-is-better attributes that every data center satisfies.
    pub qos_attr_count: usize,
    pub seed: u64,
    /// Hardware cost per server and horizon.
    pub hardware_cost: Money,
    /// Cloudlet fixed cost as a share of `hardware_cost * k_max`.
    pub fixed_cost_share: f64,
    /// Cloudlet operating cost per unit-slot as a share of `hardware_cost / horizon`.
    pub operating_cost_share: f64,
    /// Relative per-slot jitter of cloudlet operating costs.
    pub operating_cost_jitter: f64,
    /// Remote operating cost as a multiple of the mean cloudlet operating cost.
    pub remote_cost_factor: f64,
    /// Base penalty as a multiple of the most expensive marginal serving cost.
    pub penalty_factor: f64,
    /// Migration cost per unit before the per-class multiplier.
    pub migration_base_cost: Money,
    pub cloudlet_capacity: (u32, u32),
    pub routers: (u32, u32),
    pub router_mbps: u32,
    pub man_mbps: u32,
    /// Base demand per (cluster, service) is uniform in `[0, k_max + demand_slack]`.
    pub demand_slack: u32,
    pub max_amplitude: f64,
    /// Standard deviation of the per-slot demand noise, relative to the base.
    pub noise_fraction: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n_locations: 20,
            include_remote_cloud: true,
            remote_replaces_cloudlet: false,
            n_services: 3,
            horizon: 3,
            qos_attr_count: 1,
            seed: 0,
            hardware_cost: Money::from_units(100),
            fixed_cost_share: 0.5,
            operating_cost_share: 0.5,
            operating_cost_jitter: 0.2,
            remote_cost_factor: 2.0,
            penalty_factor: 3.0,
            migration_base_cost: Money::from_units(10),
            cloudlet_capacity: (1, MAX_CLOUDLET_CAPACITY),
            routers: (2, 6),
            router_mbps: 500,
            man_mbps: 1000,
            demand_slack: 5,
            max_amplitude: 0.5,
            noise_fraction: 0.1,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |name, why: &str| Err(GenerateError::InvalidParams(name, why.to_string()));
        if self.n_locations == 0 {
            return bad("n_locations", "must be at least 1");
        }
        if self.remote_replaces_cloudlet && !self.include_remote_cloud {
            return bad("remote_replaces_cloudlet", "requires include_remote_cloud");
        }
        if !(1..=SERVICE_CLASSES.len()).contains(&self.n_services) {
            return bad("n_services", "must be between 1 and 3");
        }
        if self.horizon == 0 {
            return bad("horizon", "must be at least 1");
        }
        if self.qos_attr_count == 0 {
            return bad("qos_attr_count", "must be at least 1");
        }
        let (lo, hi) = self.cloudlet_capacity;
        if lo < 1 || lo > hi || hi > MAX_CLOUDLET_CAPACITY {
            return bad("cloudlet_capacity", "must satisfy 1 <= lo <= hi <= 20");
        }
        if self.routers.0 > self.routers.1 {
            return bad("routers", "lower bound exceeds upper bound");
        }
        if self.hardware_cost < Money::ZERO || self.migration_base_cost < Money::ZERO {
            return bad("hardware_cost", "costs must be non-negative");
        }
        for (name, v) in [
            ("fixed_cost_share", self.fixed_cost_share),
            ("operating_cost_share", self.operating_cost_share),
            ("remote_cost_factor", self.remote_cost_factor),
            ("penalty_factor", self.penalty_factor),
            ("noise_fraction", self.noise_fraction),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(name, "must be finite and non-negative");
            }
        }
        if !(0.0..1.0).contains(&self.operating_cost_jitter) {
            return bad("operating_cost_jitter", "must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.max_amplitude) {
            return bad("max_amplitude", "must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Sinusoidal demand fluctuation of one (cluster, service) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandProfile {
    pub amplitude: f64,
    pub phase: f64,
    pub noise_fraction: f64,
}

impl DemandProfile {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, max_amplitude: f64, noise_fraction: f64) -> Self {
        DemandProfile {
            amplitude: rng.random_range(0.0..=max_amplitude),
            phase: rng.random_range(0.0..2.0 * PI),
            noise_fraction,
        }
    }

    /// Demand in slot `t` (0-based) of a `horizon`-slot plan.
    ///
    /// `round(base * (1 + a * sin(2 pi t / horizon + phase)) + noise)`, clamped at zero,
    /// with noise drawn from `N(0, (noise_fraction * base)^2)`.
    pub fn value<R: Rng + ?Sized>(&self, base: u32, t: usize, horizon: usize, rng: &mut R) -> u32 {
        let angle = 2.0 * PI * t as f64 / horizon as f64 + self.phase;
        let mut v = base as f64 * (1.0 + self.amplitude * angle.sin());
        let sd = self.noise_fraction * base as f64;
        if sd > 0.0 {
            v += Normal::new(0.0, sd).expect("positive sd").sample(rng);
        }
        v.round().max(0.0) as u32
    }
}

/// Demand value of a profile without a generator stream; `noise_fraction` must be zero.
pub fn demand_profile(base: u32, t: usize, horizon: usize, amplitude: f64, phase: f64) -> u32 {
    let profile = DemandProfile {
        amplitude,
        phase,
        noise_fraction: 0.0,
    };
    profile.value(base, t, horizon, &mut ChaCha8Rng::seed_from_u64(0))
}

/// Builds a seeded instance. Equal parameters give equal scenarios.
pub fn generate(params: &GeneratorParams) -> Result<Scenario, GenerateError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_loc = params.n_locations;
    let n_t = params.horizon;
    let n_cloudlets = if params.remote_replaces_cloudlet { n_loc - 1 } else { n_loc };

    let cluster_id = |u: usize| format!("u{u}");
    let cloudlet_id = |u: usize| format!("c{u}");

    // Cloudlet capacities; a location without a cloudlet still draws one to size its demand.
    let capacities: Vec<u32> = (0..n_loc)
        .map(|_| rng.random_range(params.cloudlet_capacity.0..=params.cloudlet_capacity.1))
        .collect();
    let routers: Vec<u32> = (0..n_loc)
        .map(|_| rng.random_range(params.routers.0..=params.routers.1))
        .collect();

    let hw = params.hardware_cost;
    let base_op = hw.scale(params.operating_cost_share / n_t as f64);
    let jitter = params.operating_cost_jitter;
    let mut data_centers: Vec<DataCenter> = (0..n_cloudlets)
        .map(|u| {
            let c_op = (0..n_t)
                .map(|_| {
                    let j = if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
                    base_op.scale(1.0 + j)
                })
                .collect();
            DataCenter {
                id: cloudlet_id(u),
                kind: DataCenterKind::Cloudlet,
                k_min: 0,
                k_max: capacities[u],
                c_fix: hw.scale(params.fixed_cost_share * capacities[u] as f64),
                c_hw: hw,
                c_op,
                home_cluster: Some(cluster_id(u)),
            }
        })
        .collect();

    let user_clusters: Vec<UserCluster> = (0..n_loc)
        .map(|u| UserCluster {
            id: cluster_id(u),
            lan_down: routers[u] * params.router_mbps,
            lan_up: routers[u] * params.router_mbps,
            man_down: params.man_mbps,
            man_up: params.man_mbps,
            local_cloudlet: (u < n_cloudlets).then(|| cloudlet_id(u)),
        })
        .collect();

    let mut qos_attributes = vec![QosAttribute {
        id: "latency".into(),
        direction: QosDirection::LowerIsBetter,
    }];
    qos_attributes.extend((1..params.qos_attr_count).map(|q| QosAttribute {
        id: format!("synthetic-{q}"),
        direction: QosDirection::HigherIsBetter,
    }));

    let services: Vec<Service> = SERVICE_CLASSES[..params.n_services]
        .iter()
        .enumerate()
        .map(|(s, &(l_down, l_up, latency, mig, _))| {
            let mut qos_req = BTreeMap::new();
            qos_req.insert("latency".to_string(), latency);
            for attr in &qos_attributes[1..] {
                qos_req.insert(attr.id.clone(), rng.random_range(0..=50) as f64);
            }
            Service {
                id: format!("s{}", s + 1),
                l_down,
                l_up,
                c_mig: params.migration_base_cost.scale(mig),
                qos_req,
            }
        })
        .collect();

    let mut demand = vec![vec![vec![0u32; n_t]; params.n_services]; n_loc];
    for (u, per_u) in demand.iter_mut().enumerate() {
        for per_s in per_u.iter_mut() {
            let base = rng.random_range(0..=capacities[u] + params.demand_slack);
            let profile = DemandProfile::draw(&mut rng, params.max_amplitude, params.noise_fraction);
            for (t, v) in per_s.iter_mut().enumerate() {
                *v = profile.value(base, t, n_t, &mut rng);
            }
        }
    }

    if params.include_remote_cloud {
        let peak = (0..n_t)
            .map(|t| demand.iter().flat_map(|per_u| per_u.iter().map(|per_s| per_s[t])).sum::<u32>())
            .max()
            .unwrap_or(0);
        let op_values: Vec<i64> = data_centers.iter().flat_map(|d| d.c_op.iter().map(|m| m.millis())).collect();
        let mean_op = if op_values.is_empty() {
            base_op.millis() as f64
        } else {
            op_values.iter().sum::<i64>() as f64 / op_values.len() as f64
        };
        let remote_op = Money((mean_op * params.remote_cost_factor).round() as i64);
        data_centers.push(DataCenter {
            id: "remote".into(),
            kind: DataCenterKind::RemoteCloud,
            k_min: 0,
            k_max: peak.max(1),
            c_fix: Money::ZERO,
            c_hw: Money::ZERO,
            c_op: vec![remote_op; n_t],
            home_cluster: None,
        });
    }

    let qos_guarantees: Vec<Vec<Vec<f64>>> = data_centers
        .iter()
        .map(|dc| {
            (0..n_loc)
                .map(|u| {
                    let latency = match dc.kind {
                        DataCenterKind::RemoteCloud => LATENCY_REMOTE_MS,
                        DataCenterKind::Cloudlet if dc.home_cluster.as_deref() == Some(&cluster_id(u)) => {
                            LATENCY_LOCAL_MS
                        }
                        DataCenterKind::Cloudlet => LATENCY_FOREIGN_MS,
                    };
                    let mut row = vec![latency];
                    row.extend((1..params.qos_attr_count).map(|_| rng.random_range(50..=100) as f64));
                    row
                })
                .collect()
        })
        .collect();

    // Dearest unit-slot: operating cost plus a whole server plus the site's fixed cost per server.
    let dearest = data_centers
        .iter()
        .flat_map(|dc| {
            let activation = dc.c_hw.millis() as f64 + dc.c_fix.millis() as f64 / dc.k_max as f64;
            dc.c_op.iter().map(move |op| op.millis() as f64 + activation)
        })
        .fold(0.0f64, f64::max);
    let base_penalty = dearest * params.penalty_factor;
    let penalty_row: Vec<Money> = SERVICE_CLASSES[..params.n_services]
        .iter()
        .map(|c| Money((base_penalty * c.4).round() as i64))
        .collect();

    Ok(Scenario::new(ScenarioParts {
        horizon: n_t,
        qos_attributes,
        data_centers,
        user_clusters,
        services,
        demand,
        qos_guarantees,
        penalty_costs: vec![penalty_row; n_loc],
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, Solution};

    fn params(n: usize, t: usize, seed: u64) -> GeneratorParams {
        GeneratorParams {
            n_locations: n,
            horizon: t,
            seed,
            ..GeneratorParams::default()
        }
    }

    #[test]
    fn profile_zero_base_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = DemandProfile::draw(&mut rng, 0.5, 0.3);
        for t in 0..6 {
            assert_eq!(p.value(0, t, 6, &mut rng), 0);
        }
    }

    #[test]
    fn profile_flat_without_amplitude_or_noise() {
        for t in 0..5 {
            assert_eq!(demand_profile(7, t, 5, 0.0, 1.3), 7);
        }
    }

    #[test]
    fn profile_quarter_steps() {
        let v: Vec<u32> = (0..4).map(|t| demand_profile(10, t, 4, 0.5, 0.0)).collect();
        assert_eq!(v, vec![10, 15, 10, 5]);
    }

    #[test]
    fn counts_and_remote_cloud() {
        let sc = generate(&params(19, 5, 42)).unwrap();
        assert_eq!(sc.n_dcs(), 20);
        assert_eq!(sc.n_clusters(), 19);
        assert_eq!(sc.n_services(), 3);
        let remote = sc.data_centers().last().unwrap();
        assert_eq!(remote.kind, DataCenterKind::RemoteCloud);
        assert_eq!(remote.k_min, 0);
        assert_eq!(remote.c_fix, Money::ZERO);
        let peak = (0..5).map(|t| sc.aggregate_demand(t)).max().unwrap();
        assert!(remote.k_max as u64 >= peak);
    }

    #[test]
    fn replacing_knob_matches_paper_style_counts() {
        let p = GeneratorParams {
            remote_replaces_cloudlet: true,
            ..params(20, 5, 1)
        };
        let sc = generate(&p).unwrap();
        assert_eq!(sc.n_dcs(), 20);
        assert_eq!(sc.n_clusters(), 20);
        assert_eq!(sc.local_cloudlet(19), None);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate(&params(8, 3, 7)).unwrap();
        let b = generate(&params(8, 3, 7)).unwrap();
        assert_eq!(write_scenario(&a), write_scenario(&b));
        let c = generate(&params(8, 3, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn network_and_capacity_ranges() {
        let sc = generate(&params(30, 2, 5)).unwrap();
        for dc in sc.data_centers().iter().filter(|d| d.is_cloudlet()) {
            assert!((1..=20).contains(&dc.k_max));
            assert_eq!(dc.k_min, 0);
            assert_eq!(dc.c_fix.millis() * 2, dc.c_hw.millis() * dc.k_max as i64);
        }
        for uc in sc.user_clusters() {
            assert!(uc.lan_down % 500 == 0 && (1000..=3000).contains(&uc.lan_down));
            assert_eq!(uc.lan_down, uc.lan_up);
            assert_eq!((uc.man_down, uc.man_up), (1000, 1000));
        }
    }

    #[test]
    fn eligibility_tiers() {
        let sc = generate(&GeneratorParams {
            qos_attr_count: 3,
            ..params(6, 2, 11)
        })
        .unwrap();
        for d in 0..sc.n_dcs() {
            for u in 0..sc.n_clusters() {
                let local = sc.local_cloudlet(u) == Some(d);
                let cloudlet = sc.data_centers()[d].is_cloudlet();
                assert_eq!(sc.is_eligible(d, u, 0), local);
                assert_eq!(sc.is_eligible(d, u, 1), cloudlet);
                assert!(sc.is_eligible(d, u, 2));
            }
        }
    }

    #[test]
    fn all_penalty_feasible_on_generated() {
        for seed in 0..5 {
            let sc = generate(&params(5, 3, seed)).unwrap();
            assert!(validate(&sc, &Solution::all_penalty(&sc)).unwrap().is_empty());
        }
    }

    #[test]
    fn penalty_dominates_serving_cost() {
        let sc = generate(&params(5, 3, 2)).unwrap();
        let pen = sc.penalty_cost(0, 2);
        for dc in sc.data_centers() {
            let per_unit_fix = dc.c_fix.millis() / dc.k_max as i64;
            for op in &dc.c_op {
                assert!(pen.millis() > op.millis() + dc.c_hw.millis() + per_unit_fix);
            }
        }
        assert!(sc.penalty_cost(0, 0) > sc.penalty_cost(0, 1));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            generate(&params(0, 3, 0)),
            Err(GenerateError::InvalidParams("n_locations", _))
        ));
        assert!(generate(&GeneratorParams {
            n_services: 4,
            ..params(3, 3, 0)
        })
        .is_err());
        assert!(generate(&params(3, 0, 0)).is_err());
    }
}
