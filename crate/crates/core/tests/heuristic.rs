mod common;

use common::*;
use dcpsp_core::exact::{brute_force, BruteForceGuard};
use dcpsp_core::heuristic::{heu2_cap, solve, solve_with_cap, HeuristicError, HeuristicState, Strategy};
use dcpsp_core::model::{validate, Scenario, ScenarioParts};
use dcpsp_core::scenario::{generate, tiny_scenario, GeneratorParams, TinyLimits};
use dcpsp_core::Money;

fn zero_demand(sc: &Scenario) -> Scenario {
    with_demand(sc, vec![vec![vec![0; sc.horizon()]; sc.n_services()]; sc.n_clusters()])
}

/// `two_site` with a third, relaxed service class.
fn three_services(demand: Vec<Vec<Vec<u32>>>) -> Scenario {
    let mut parts = two_site().into_parts();
    parts.services.push(service("s2", 10, 10, 0, 500.0));
    parts.penalty_costs = vec![vec![Money(5_000); 3]; 2];
    parts.demand = demand;
    Scenario::new(parts).unwrap()
}

#[test]
fn zero_demand_costs_nothing() {
    let sc = zero_demand(&two_site());
    for strategy in [Strategy::Heu1, Strategy::heu2()] {
        let out = solve(&sc, &strategy).unwrap();
        assert_eq!(out.cost.total, Money::ZERO);
        assert!(out.solution.x.iter().all(|&x| !x));
    }
}

#[test]
fn cap_zero_serves_only_from_remote() {
    let sc = two_site();
    let out = solve_with_cap(&sc, Some(0));
    assert!(validate(&sc, &out.solution).unwrap().is_empty());
    for d in 0..2 {
        assert!(out.solution.y[d].iter().flatten().flatten().all(|&v| v == 0), "cloudlet {d} used");
    }
    // s0 is cloudlet-only; s1 fits the remote cloud through both MANs.
    assert_eq!(out.solution.y_pen[0][0][0], 3);
    assert_eq!(out.solution.y_pen[1][0][0], 1);
    assert_eq!(out.solution.y[2][0][1][0], 2);
    assert_eq!(out.solution.y[2][1][1][0], 4);
}

#[test]
fn cap_formula() {
    // Aggregate demand 100 in both slots.
    let mut parts = two_site().into_parts();
    parts.horizon = 2;
    for dc in &mut parts.data_centers {
        let c = dc.c_op[0];
        dc.c_op = vec![c; 2];
    }
    parts.demand = vec![vec![vec![50, 50], vec![0, 0]], vec![vec![0, 0], vec![50, 50]]];
    let sc = Scenario::new(parts).unwrap();
    assert_eq!(heu2_cap(&sc, 0.8), Ok(80));
    assert_eq!(heu2_cap(&sc, 1.0), Ok(100));
    assert_eq!(heu2_cap(&zero_demand(&sc), 0.8), Ok(0));
    assert_eq!(heu2_cap(&sc, 0.0), Err(HeuristicError::InvalidRho(0.0)));
    assert!(matches!(solve(&sc, &Strategy::Heu2 { rho: 1.5 }), Err(HeuristicError::InvalidRho(_))));
}

#[test]
fn strictest_class_is_served_first() {
    let sc = three_services(vec![vec![vec![0], vec![0], vec![10]], vec![vec![1], vec![0], vec![0]]]);
    let mut st = HeuristicState::new(&sc, None);
    st.pending = vec![(0, 2), (1, 0)];
    assert_eq!(st.select_service_demand(), Some((1, 0)));
    st.pending = vec![(0, 2)];
    assert_eq!(st.select_service_demand(), Some((0, 2)));
    st.pending.clear();
    assert_eq!(st.select_service_demand(), None);
}

#[test]
fn equal_class_and_demand_prefers_lowest_cluster() {
    let sc = three_services(vec![vec![vec![0], vec![2], vec![0]], vec![vec![0], vec![2], vec![0]]]);
    let mut st = HeuristicState::new(&sc, None);
    st.pending = vec![(1, 1), (0, 1)];
    assert_eq!(st.select_service_demand(), Some((0, 1)));
    // Larger residual wins within a class.
    st.residual_demand[1][1] = 3;
    assert_eq!(st.select_service_demand(), Some((1, 1)));
}

#[test]
fn open_cheap_data_center_beats_closed_cloudlet() {
    let sc = two_site();
    let mut st = HeuristicState::new(&sc, None);
    // u1/s1, lot 4: closed c1 costs (4*100 + 1000 + 4*500)/4 = 850 per unit,
    // the open remote cloud 200.
    st.open[2] = true;
    assert_eq!(st.select_data_center(1, 1), Some(2));
    st.open[1] = true;
    assert_eq!(st.select_data_center(1, 1), Some(1));
}

#[test]
fn cloudlet_only_service_goes_local() {
    let sc = two_site();
    let st = HeuristicState::new(&sc, None);
    assert_eq!(st.select_data_center(0, 0), Some(0));
    assert_eq!(st.select_data_center(1, 0), Some(1));
}

#[test]
fn no_man_and_no_local_cloudlet_means_no_supply() {
    let sc = Scenario::new(ScenarioParts {
        horizon: 1,
        qos_attributes: vec![latency()],
        data_centers: vec![remote("r", 10, &[100])],
        user_clusters: vec![cluster("u0", None, 1000, 0)],
        services: vec![service("s0", 10, 10, 0, 250.0)],
        demand: vec![vec![vec![3]]],
        qos_guarantees: vec![vec![vec![150.0]]],
        penalty_costs: vec![vec![Money(5_000)]],
    })
    .unwrap();
    let st = HeuristicState::new(&sc, None);
    assert_eq!(st.select_data_center(0, 0), None);
    let out = solve(&sc, &Strategy::Heu1).unwrap();
    assert_eq!(out.solution.y_pen[0][0][0], 3);
}

#[test]
fn lot_size_bound_by_capacity() {
    let sc = two_site();
    let mut st = HeuristicState::new(&sc, None);
    st.residual_demand[0][1] = 10;
    st.residual_capacity[2] = 4;
    for n in &mut st.network {
        n.lan_down = 10_000;
        n.lan_up = 10_000;
        n.man_down = 10_000;
        n.man_up = 10_000;
    }
    assert_eq!(st.calc_lot_size(2, 0, 1), 4);
}

#[test]
fn local_lot_ignores_exhausted_man() {
    let sc = two_site();
    let mut st = HeuristicState::new(&sc, None);
    st.network[0].man_down = 0;
    st.network[0].man_up = 0;
    // min(demand 3, capacity 6, LAN 200/40 = 5)
    assert_eq!(st.calc_lot_size(0, 0, 0), 3);
    assert_eq!(st.calc_lot_size(2, 0, 0), 0);
}

#[test]
fn remote_lot_bound_by_man() {
    let sc = two_site();
    let st = HeuristicState::new(&sc, None);
    // man_down 100 with l_down 40: two units.
    assert_eq!(st.calc_lot_size(2, 0, 0), 2);
}

#[test]
fn constant_demand_keeps_placements() {
    let mut parts = two_site().into_parts();
    parts.horizon = 3;
    for dc in &mut parts.data_centers {
        let c = dc.c_op[0].0;
        dc.c_op = vec![Money(c), Money(c * 2), Money(c / 2)];
    }
    for per_u in &mut parts.demand {
        for per_s in per_u {
            *per_s = vec![per_s[0]; 3];
        }
    }
    for s in &mut parts.services {
        s.c_mig = Money(1_000);
    }
    let sc = Scenario::new(parts).unwrap();
    let out = solve(&sc, &Strategy::Heu1).unwrap();
    assert_eq!(out.cost.migration, Money::ZERO);
    for d in 0..sc.n_dcs() {
        for u in 0..2 {
            for s in 0..2 {
                let y = &out.solution.y[d][u][s];
                assert!(y.iter().all(|&v| v == y[0]), "{d}/{u}/{s}: {y:?}");
            }
        }
    }
}

#[test]
fn deterministic() {
    let sc = generate(&GeneratorParams {
        n_locations: 10,
        seed: 4,
        ..GeneratorParams::default()
    })
    .unwrap();
    for strategy in [Strategy::Heu1, Strategy::heu2()] {
        assert_eq!(solve(&sc, &strategy).unwrap(), solve(&sc, &strategy).unwrap());
    }
}

#[test]
fn generated_solutions_are_feasible() {
    for seed in 0..20 {
        let sc = generate(&GeneratorParams {
            n_locations: 12,
            horizon: 4,
            seed,
            ..GeneratorParams::default()
        })
        .unwrap();
        for strategy in [Strategy::Heu1, Strategy::heu2()] {
            let out = solve(&sc, &strategy).unwrap();
            assert_eq!(validate(&sc, &out.solution).unwrap(), vec![], "seed {seed} {}", strategy.name());
        }
    }
}

#[test]
fn never_beats_exhaustive_optimum() {
    let limits = TinyLimits::default();
    for seed in 0..60 {
        let sc = tiny_scenario(seed, &limits);
        let best = brute_force(&sc, &BruteForceGuard::default()).unwrap().objective.unwrap();
        for strategy in [Strategy::Heu1, Strategy::heu2()] {
            let out = solve(&sc, &strategy).unwrap();
            assert!(out.cost.total >= best, "seed {seed}: {} < {best}", out.cost.total);
        }
    }
}
