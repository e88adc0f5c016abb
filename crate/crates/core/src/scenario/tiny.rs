//! Small random instances for oracle checks.
//!
//! Unlike [`generate`](super::generate) these ignore the metropolitan setup:
//! every size, cost, bandwidth and QoS value is drawn from a narrow range so
//! that exhaustive search stays cheap while all constraint families can bind.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    DataCenter, DataCenterKind, QosAttribute, QosDirection, Scenario, ScenarioParts, Service, UserCluster,
};
use crate::money::Money;

/// Size limits of [`tiny_scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyLimits {
    pub max_dcs: usize,
    pub max_clusters: usize,
    pub max_services: usize,
    pub max_horizon: usize,
    pub max_capacity: u32,
    pub max_demand: u32,
}

impl Default for TinyLimits {
    fn default() -> Self {
        TinyLimits {
            max_dcs: 3,
            max_clusters: 3,
            max_services: 2,
            max_horizon: 2,
            max_capacity: 3,
            max_demand: 4,
        }
    }
}

pub fn tiny_scenario(seed: u64, limits: &TinyLimits) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_u = rng.random_range(1..=limits.max_clusters);
    let n_s = rng.random_range(1..=limits.max_services);
    let n_t = rng.random_range(1..=limits.max_horizon);

    let mut homes: Vec<usize> = (0..n_u).filter(|_| rng.random_bool(0.7)).collect();
    homes.truncate(limits.max_dcs);
    let with_remote = homes.is_empty() || (homes.len() < limits.max_dcs && rng.random_bool(0.6));

    let latencies = [10.0, 60.0, 150.0];
    let requirements = [50.0, 100.0, 250.0];
    let draw_c_op = |rng: &mut ChaCha8Rng| (0..n_t).map(|_| Money(rng.random_range(100..=3_000))).collect();

    let mut data_centers = Vec::new();
    for &h in &homes {
        let k_max = rng.random_range(1..=limits.max_capacity);
        data_centers.push(DataCenter {
            id: format!("c{h}"),
            kind: DataCenterKind::Cloudlet,
            k_min: rng.random_range(0..=k_max.min(1)),
            k_max,
            c_fix: Money(rng.random_range(0..=6_000)),
            c_hw: Money(rng.random_range(0..=3_000)),
            c_op: draw_c_op(&mut rng),
            home_cluster: Some(format!("u{h}")),
        });
    }
    if with_remote {
        data_centers.push(DataCenter {
            id: "remote".into(),
            kind: DataCenterKind::RemoteCloud,
            k_min: 0,
            k_max: rng.random_range(1..=limits.max_capacity),
            c_fix: Money(rng.random_range(0..=1_000)),
            c_hw: Money(rng.random_range(0..=500)),
            c_op: draw_c_op(&mut rng),
            home_cluster: None,
        });
    }

    let bandwidth = |rng: &mut ChaCha8Rng| rng.random_range(0..=200u32);
    let user_clusters = (0..n_u)
        .map(|u| UserCluster {
            id: format!("u{u}"),
            lan_down: bandwidth(&mut rng),
            lan_up: bandwidth(&mut rng),
            man_down: bandwidth(&mut rng),
            man_up: bandwidth(&mut rng),
            local_cloudlet: homes.contains(&u).then(|| format!("c{u}")),
        })
        .collect();
    let rates = [0u32, 10, 20, 40];
    let services = (0..n_s)
        .map(|s| Service {
            id: format!("s{}", s + 1),
            l_down: *rates.choose(&mut rng).unwrap(),
            l_up: *rates.choose(&mut rng).unwrap(),
            c_mig: Money(rng.random_range(1..=2_000)),
            qos_req: [("latency".to_string(), *requirements.choose(&mut rng).unwrap())]
                .into_iter()
                .collect(),
        })
        .collect();

    let demand = (0..n_u)
        .map(|_| {
            (0..n_s)
                .map(|_| (0..n_t).map(|_| rng.random_range(0..=limits.max_demand)).collect())
                .collect()
        })
        .collect();
    let qos_guarantees = data_centers
        .iter()
        .map(|dc| {
            (0..n_u)
                .map(|u| {
                    let g = match &dc.home_cluster {
                        Some(h) if *h == format!("u{u}") => 10.0,
                        _ => *latencies.choose(&mut rng).unwrap(),
                    };
                    vec![g]
                })
                .collect()
        })
        .collect();
    let penalty_costs = (0..n_u)
        .map(|_| (0..n_s).map(|_| Money(rng.random_range(500..=8_000))).collect())
        .collect();

    Scenario::new(ScenarioParts {
        horizon: n_t,
        qos_attributes: vec![QosAttribute {
            id: "latency".into(),
            direction: QosDirection::LowerIsBetter,
        }],
        data_centers,
        user_clusters,
        services,
        demand,
        qos_guarantees,
        penalty_costs,
    })
    .expect("tiny scenarios are valid by construction")
}
