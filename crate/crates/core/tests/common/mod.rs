//! Hand-built instances shared by the integration tests.
#![allow(dead_code)]

use dcpsp_core::model::{DataCenter, DataCenterKind, QosAttribute, QosDirection, Scenario, ScenarioParts, Service, UserCluster};
use dcpsp_core::Money;

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

/// Two clusters with a cloudlet each plus a remote cloud; s0 needs the
/// local cloudlet (50 ms), s1 accepts anything (250 ms). One slot.
///
/// Data centers: c0, c1, r. Demand u0 = [3, 2], u1 = [1, 4].
pub fn two_site() -> Scenario {
    Scenario::new(ScenarioParts {
        horizon: 1,
        qos_attributes: vec![latency()],
        data_centers: vec![
            cloudlet("c0", "u0", 6, 1_000, 500, &[100]),
            cloudlet("c1", "u1", 6, 1_000, 500, &[100]),
            remote("r", 20, &[200]),
        ],
        user_clusters: vec![cluster("u0", Some("c0"), 200, 100), cluster("u1", Some("c1"), 200, 100)],
        services: vec![service("s0", 40, 10, 0, 50.0), service("s1", 20, 20, 0, 250.0)],
        demand: vec![vec![vec![3], vec![2]], vec![vec![1], vec![4]]],
        qos_guarantees: vec![
            vec![vec![10.0], vec![60.0]],
            vec![vec![60.0], vec![10.0]],
            vec![vec![150.0], vec![150.0]],
        ],
        penalty_costs: vec![vec![Money(5_000); 2]; 2],
    })
    .unwrap()
}

pub fn with_demand(sc: &Scenario, demand: Vec<Vec<Vec<u32>>>) -> Scenario {
    let mut parts = sc.parts().clone();
    parts.demand = demand;
    Scenario::new(parts).unwrap()
}
