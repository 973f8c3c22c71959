use floodwall_core::recourse::{dispatch_violations, feasibility_witness, loss_of, loss_upper_bound};
use floodwall_core::*;
use proptest::prelude::*;

fn two_bus() -> GridNetwork {
    let bus = |id: &str, sub: &str, load, gen, r| Bus {
        id: id.into(),
        substation: sub.into(),
        p_load: load,
        p_gen_min: 0.0,
        p_gen_max: gen,
        is_reference: r,
    };
    GridNetwork::new(NetworkData {
        buses: vec![bus("A", "SA", 0.0, 2.0, true), bus("B", "SB", 1.0, 0.0, false)],
        branches: vec![Branch { id: "AB".into(), from_bus: "A".into(), to_bus: "B".into(), susceptance: -10.0, flow_limit: 1.5 }],
        substations: vec![
            Substation { id: "SA".into(), voltage_class: VoltageClass::V115_161, lon: None, lat: None },
            Substation { id: "SB".into(), voltage_class: VoltageClass::V115_161, lon: None, lat: None },
        ],
        angle_limits: AngleLimits::default(),
        base_mva: None,
    })
    .unwrap()
}

fn scenario(levels: Vec<u32>) -> FloodScenario {
    FloodScenario { id: "s".into(), probability: 1.0, levels }
}

fn plan(levels: &[u32]) -> MitigationPlan {
    MitigationPlan::from_levels(levels, 4).unwrap()
}

#[test]
fn cost_schedule_examples() {
    let sched = CostSchedule::new(vec![1, 2, 3]).unwrap();
    assert_eq!(plan_cost(&plan(&[0, 0, 0]), &sched).unwrap(), 0);
    assert_eq!(plan_cost(&plan(&[2, 0, 0]), &sched).unwrap(), 3);
    assert_eq!(plan_cost(&plan(&[1, 1, 0]), &sched).unwrap(), 3);
    assert_eq!(plan_cost(&plan(&[0, 0, 2]), &sched).unwrap(), 9);
    assert!(!is_feasible(&plan(&[0, 0, 2]), &sched, 8, 3).unwrap());
    assert!(is_feasible(&plan(&[0, 0, 2]), &sched, 9, 3).unwrap());
    assert!(!is_feasible(&plan(&[0, 0, 3]), &sched, 100, 3).unwrap());
    assert!(is_feasible(&plan(&[0, 0, 0]), &sched, 0, 3).unwrap());
    assert!(CostSchedule::new(vec![0]).is_err());
    assert!(plan_cost(&plan(&[1]), &sched).is_err());

    let gap = MitigationPlan::from_matrix(vec![vec![false, true, false, false]]);
    assert!(gap.is_err() || !is_feasible(&gap.unwrap(), &CostSchedule::new(vec![1]).unwrap(), 10, 3).unwrap());

    let from_net = CostSchedule::from_network(&make_fixture("star8").unwrap().network);
    assert_eq!((0..4).map(|k| from_net.base_units(k)).collect::<Vec<_>>(), vec![3, 2, 1, 2]);
}

#[test]
fn max_useful_budget_examples() {
    let sched = CostSchedule::new(vec![1]).unwrap();
    let set = |levels: Vec<u32>| FloodScenarioSet::new(4, 3, vec![scenario(levels)], 1).unwrap();
    assert_eq!(max_useful_budget(&set(vec![0]), &sched, 3), 0);
    assert_eq!(max_useful_budget(&set(vec![2]), &sched, 3), 3);
    assert_eq!(max_useful_budget(&set(vec![3]), &sched, 3), 0);
    assert_eq!(max_useful_budget(&set(vec![3]), &sched, 4), 6);
}

fn recursive_count(sched: &CostSchedule, k: usize, subs: usize, budget: u64, rhat: u32) -> usize {
    if k == subs {
        return 1;
    }
    (0..rhat)
        .filter(|&l| sched.cost_to_level(k, l) <= budget)
        .map(|l| recursive_count(sched, k + 1, subs, budget - sched.cost_to_level(k, l), rhat))
        .sum()
}

#[test]
fn enumeration_examples() {
    let one = CostSchedule::new(vec![1]).unwrap();
    let levels: Vec<u32> = enumerate_plans(&one, 3, 3, 4, &[0]).unwrap().map(|p| p.level(0)).collect();
    assert_eq!(levels, vec![0, 1, 2]);

    let two = CostSchedule::new(vec![1, 1]).unwrap();
    let plans: Vec<Vec<u32>> = enumerate_plans(&two, 1, 3, 4, &[0, 1]).unwrap().map(|p| p.levels()).collect();
    assert_eq!(plans.len(), 3);
    assert!(plans.contains(&vec![0, 0]) && plans.contains(&vec![1, 0]) && plans.contains(&vec![0, 1]));

    let zero: Vec<_> = enumerate_plans(&two, 0, 3, 4, &[0, 1]).unwrap().collect();
    assert_eq!(zero, vec![MitigationPlan::zeros(2, 4)]);

    let many = CostSchedule::new(vec![1; 30]).unwrap();
    let all: Vec<usize> = (0..30).collect();
    assert!(matches!(enumerate_plans(&many, 100, 3, 4, &all), Err(CoreError::EnumerationTooLarge(_))));
    assert!(enumerate_plans(&two, 1, 5, 4, &[0]).is_err());
}

proptest! {
    #[test]
    fn enumeration_matches_recursive_oracle(
        base in proptest::collection::vec(1u32..=3, 1..=4),
        budget in 0u64..25,
        rhat in 1u32..=4,
    ) {
        let sched = CostSchedule::new(base.clone()).unwrap();
        let subset: Vec<usize> = (0..base.len()).collect();
        let plans: Vec<MitigationPlan> = enumerate_plans(&sched, budget, rhat, 4, &subset).unwrap().collect();
        prop_assert_eq!(plans.len(), recursive_count(&sched, 0, base.len(), budget, rhat));
        let mut uniq = plans.clone();
        uniq.sort();
        uniq.dedup();
        prop_assert_eq!(uniq.len(), plans.len());
        for p in &plans {
            prop_assert!(is_feasible(p, &sched, budget, rhat).unwrap());
        }
    }

    #[test]
    fn feasibility_is_monotone_in_budget(
        levels in proptest::collection::vec(0u32..4, 1..=5),
        base in proptest::collection::vec(1u32..=3, 5),
        budget in 0u64..40,
        rhat in 1u32..=4,
    ) {
        let sched = CostSchedule::new(base[..levels.len()].to_vec()).unwrap();
        let p = plan(&levels);
        if is_feasible(&p, &sched, budget, rhat).unwrap() {
            prop_assert!(is_feasible(&p, &sched, budget + 1, rhat).unwrap());
        }
    }
}

#[test]
fn two_bus_recourse() {
    let net = two_bus();
    let w = LossWeights::default();
    let sol = solve_recourse_lp(&net, &StatusVector::all_up(&net), &w).unwrap();
    assert!(sol.loss.abs() < 1e-9);
    assert!((sol.dispatch.p_flow[0] - 1.0).abs() < 1e-9);
    assert!((sol.dispatch.delta[1] - 1.0).abs() < 1e-9);
    // p_flow = -b (theta_A - theta_B) with theta_A = 0.
    assert!((sol.dispatch.theta[1] + 0.1).abs() < 1e-9);
    assert!(sol.duality_gap.abs() <= 1e-6);

    let down = status_closure(&net, &plan(&[0, 0]), &scenario(vec![0, 1])).unwrap();
    assert_eq!(down.alpha, vec![true, false]);
    assert_eq!(down.beta, vec![false]);
    let shed = solve_recourse_lp(&net, &down, &w).unwrap();
    assert!((shed.loss - 1.0).abs() < 1e-9);
    assert_eq!(shed.dispatch.delta[1], 0.0);
    assert!(LossWeights { lambda_shed: 0.0, lambda_over: 0.0 }.validate().is_err());
}

#[test]
fn status_closure_examples() {
    let fx = make_fixture("star8").unwrap();
    let net = &fx.network;
    let a = net.substation_index("A").unwrap();
    let mut levels = vec![0; 4];
    levels[a] = 1;
    let s = status_closure(net, &plan(&[0, 0, 0, 0]), &scenario(levels.clone())).unwrap();
    for n in net.substation_buses(a) {
        assert!(!s.alpha[*n]);
        for &e in net.incident(*n) {
            assert!(!s.beta[e]);
        }
    }
    levels[a] = 2;
    let mut lv = vec![0; 4];
    lv[a] = 2;
    let s = status_closure(net, &plan(&lv), &scenario(levels.clone())).unwrap();
    assert!(s.alpha.iter().all(|&x| x));
    levels[a] = 3;
    lv[a] = 3;
    let s = status_closure(net, &plan(&lv), &scenario(levels)).unwrap();
    assert!(net.substation_buses(a).iter().all(|&n| s.alpha[n]), "level-3 plan only exists when r-hat is 4");
    let inexorable = scenario(vec![3, 0, 0, 0]);
    let s = status_closure(net, &plan(&[2, 2, 2, 2]), &inexorable).unwrap();
    assert!(net.substation_buses(0).iter().all(|&n| !s.alpha[n]));
    assert!(status_closure(net, &plan(&[0, 0]), &inexorable).is_err());
}

#[test]
fn islands_without_generation_serve_nothing() {
    let fx = make_fixture("star8").unwrap();
    let net = &fx.network;
    let status = status_closure(net, &plan(&[0, 0, 0, 0]), &scenario(vec![1, 0, 0, 0])).unwrap();
    let sol = solve_recourse_lp(net, &status, &LossWeights::default()).unwrap();
    for id in ["b1", "b2", "c1", "c2"] {
        let n = net.bus_index(id).unwrap();
        assert!(status.alpha[n]);
        assert!(sol.dispatch.delta[n].abs() < 1e-9, "{id}");
    }
    // The A island keeps its own 1.0 unit of generation against 1.5 of load.
    let served: f64 = ["a1", "a2"].iter().map(|id| {
        let n = net.bus_index(id).unwrap();
        net.buses()[n].p_load * sol.dispatch.delta[n]
    }).sum();
    assert!((served - 1.0).abs() < 1e-9);
    for (e, &b) in status.beta.iter().enumerate() {
        if !b {
            assert!(sol.dispatch.p_flow[e].abs() < 1e-9);
        }
    }
}

#[test]
fn all_branches_down_sheds_everything() {
    let fx = make_fixture("tiny3").unwrap();
    let net = &fx.network;
    let mut status = StatusVector::all_up(net);
    status.beta.iter_mut().for_each(|b| *b = false);
    let w = LossWeights::default();
    let sol = solve_recourse_lp(net, &status, &w).unwrap();
    assert!((sol.loss - net.total_load()).abs() < 1e-9);
    assert!(sol.dispatch.p_flow.iter().chain(&sol.dispatch.p_hat).all(|v| v.abs() < 1e-9));
}

#[test]
fn witness_is_feasible_everywhere() {
    for name in FIXTURE_NAMES {
        let fx = make_fixture(name).unwrap();
        let net = &fx.network;
        for s in &fx.scenarios.scenarios {
            let status = status_closure(net, &MitigationPlan::zeros(net.num_substations(), 4), s).unwrap();
            let wit = feasibility_witness(net, &status);
            assert!(dispatch_violations(net, &status, &wit, 1e-12).is_empty(), "{name} {}", s.id);
            let w = LossWeights::default();
            assert!(loss_of(net, &wit, &w) <= loss_upper_bound(net, &w) + 1e-12);
        }
    }
}

#[test]
fn evaluate_plan_examples() {
    let fx = make_fixture("star8").unwrap();
    let net = &fx.network;
    let w = LossWeights::default();
    let zero = MitigationPlan::zeros(4, 4);
    let intact = solve_recourse_lp(net, &StatusVector::all_up(net), &w).unwrap().loss;
    let dry = FloodScenarioSet::new(4, 3, vec![scenario(vec![0; 4])], 4).unwrap();
    assert!((evaluate_plan(net, &zero, &dry, &w).unwrap().expected_loss - intact).abs() < 1e-12);

    let single_s = fx.scenarios.scenarios[2].clone();
    let single = FloodScenarioSet::new(4, 3, vec![FloodScenario { probability: 1.0, ..single_s.clone() }], 4).unwrap();
    let direct = solve_recourse_lp(net, &status_closure(net, &zero, &single_s).unwrap(), &w).unwrap().loss;
    assert!((evaluate_plan(net, &zero, &single, &w).unwrap().expected_loss - direct).abs() < 1e-12);

    // C floods to level 3 in one scenario, which nothing below r-hat = 3 prevents.
    let full = plan(&[2, 2, 2, 1]);
    let best = evaluate_plan(net, &full, &fx.scenarios, &w).unwrap().expected_loss;
    assert!(best > 0.0);
    let c_load: f64 = ["c1", "c2"].iter().map(|id| net.buses()[net.bus_index(id).unwrap()].p_load).sum();
    assert!(best >= 0.2 * c_load - 1e-9);

    let eval = evaluate_plan(net, &zero, &fx.scenarios, &w).unwrap();
    let sum: f64 = eval.scenarios.iter().map(|s| s.probability * s.loss).sum();
    assert!((eval.expected_loss - sum).abs() < 1e-12);
}

fn star8_levels() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..4, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statuses_and_loss_are_monotone_in_the_plan(
        lo in star8_levels(),
        bump in star8_levels(),
        flood in proptest::collection::vec(0u32..5, 4),
    ) {
        // Radial with zero minimum generation: restoring a component can never hurt.
        let fx = make_fixture("star8").unwrap();
        let net = &fx.network;
        let hi: Vec<u32> = lo.iter().zip(&bump).map(|(a, b)| (*a + *b).min(3)).collect();
        let (x, x2) = (plan(&lo), plan(&hi));
        prop_assert!(x2.dominates(&x));
        let s = scenario(flood);
        let (a, b) = (status_closure(net, &x, &s).unwrap(), status_closure(net, &x2, &s).unwrap());
        prop_assert!(b.dominates(&a));
        for (e, &up) in a.beta.iter().enumerate() {
            let (n, m) = net.branch_ends(e);
            prop_assert_eq!(up, a.alpha[n] && a.alpha[m]);
        }
        let w = LossWeights::default();
        let (la, lb) = (solve_recourse_lp(net, &a, &w).unwrap(), solve_recourse_lp(net, &b, &w).unwrap());
        prop_assert!(lb.loss <= la.loss + 1e-6);
        for sol in [&la, &lb] {
            prop_assert!(sol.loss <= loss_upper_bound(net, &w) + 1e-9);
            prop_assert!(sol.loss >= -1e-9);
        }
        for (e, &up) in a.beta.iter().enumerate() {
            if !up {
                prop_assert!(la.dispatch.p_flow[e].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn recourse_is_always_feasible_on_ring12(
        levels in proptest::collection::vec(0u32..4, 4),
        flood in proptest::collection::vec(0u32..5, 4),
        pmin in -0.5f64..3.0,
    ) {
        let fx = make_fixture("ring12").unwrap();
        let mut data = fx.network.data().clone();
        let y1 = data.buses.iter().position(|b| b.id == "y1").unwrap();
        data.buses[y1].p_gen_min = pmin;
        let net = GridNetwork::new(data).unwrap();
        let status = status_closure(&net, &plan(&levels), &scenario(flood)).unwrap();
        let sol = solve_recourse_lp(&net, &status, &LossWeights::default()).unwrap();
        prop_assert!(dispatch_violations(&net, &status, &sol.dispatch, 1e-7).is_empty());
        prop_assert!(sol.duality_gap.abs() <= 1e-6);
    }
}
