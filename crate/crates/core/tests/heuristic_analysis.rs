mod common;

use floodwall_core::analysis::{reduced_options, uniqueness, Direction};
use floodwall_core::heuristic::{operational_attributes, ETA_FLOW_GRID};
use floodwall_core::*;
use floodwall_milp::BnbConfig;
use proptest::prelude::*;

fn scenarios(k: usize, rows: &[(f64, &[(usize, u32)])]) -> FloodScenarioSet {
    let s = rows
        .iter()
        .enumerate()
        .map(|(i, (p, floods))| {
            let mut levels = vec![0; k];
            for &(j, l) in *floods {
                levels[j] = l;
            }
            FloodScenario { id: format!("w{}", i + 1), probability: *p, levels }
        })
        .collect();
    FloodScenarioSet::new(4, 3, s, k).unwrap()
}

/// Generator hub `G` feeding two identical load substations, listed as `B` before `A`.
fn twin() -> GridNetwork {
    let bus = |id: &str, sub: &str, load, gen, r| Bus {
        id: id.into(),
        substation: sub.into(),
        p_load: load,
        p_gen_min: 0.0,
        p_gen_max: gen,
        is_reference: r,
    };
    let line = |a: &str, b: &str| Branch { id: format!("{a}-{b}"), from_bus: a.into(), to_bus: b.into(), susceptance: -10.0, flow_limit: 2.0 };
    let sub = |id: &str| Substation { id: id.into(), voltage_class: VoltageClass::V115_161, lon: None, lat: None };
    GridNetwork::new(NetworkData {
        buses: vec![bus("g", "G", 0.0, 5.0, true), bus("b", "B", 1.0, 0.0, false), bus("a", "A", 1.0, 0.0, false)],
        branches: vec![line("g", "b"), line("g", "a")],
        substations: vec![sub("G"), sub("B"), sub("A")],
        angle_limits: AngleLimits::default(),
        base_mva: None,
    })
    .unwrap()
}

fn plan(levels: &[u32]) -> MitigationPlan {
    MitigationPlan::from_levels(levels, 4).unwrap()
}

#[test]
fn benefit_examples() {
    let net = make_fixture("tiny3").unwrap().network;
    let load_only = AttributeWeights::new(1.0, 0.0, 0.0).unwrap();
    let set = scenarios(2, &[(0.25, &[(1, 1)]), (0.25, &[(1, 1)]), (0.25, &[]), (0.25, &[])]);
    let zero = plan(&[0, 0]);
    assert_eq!(benefit(&zero, &zero, &load_only, &net, &set).unwrap(), 0.0);
    assert_eq!(benefit(&zero, &plan(&[1, 0]), &load_only, &net, &set).unwrap(), 0.0);
    assert!((benefit(&zero, &plan(&[0, 1]), &load_only, &net, &set).unwrap() - 0.5).abs() < 1e-15);
    assert!(benefit(&plan(&[0, 1]), &zero, &load_only, &net, &set).is_err());
    assert!(AttributeWeights::new(0.0, 0.0, 0.0).is_err());
    assert!(AttributeWeights::new(-1.0, 1.0, 0.0).is_err());
}

#[test]
fn greedy_examples() {
    let fx = make_fixture("tiny3").unwrap();
    let sched = CostSchedule::from_network(&fx.network);
    let w = AttributeWeights::with_flow(0.05).unwrap();
    let g = greedy(&w, 0, &fx.network, &fx.scenarios, &sched, 3).unwrap();
    assert!(g.plan.is_zero() && g.steps.is_empty());

    let dry = scenarios(2, &[(1.0, &[])]);
    assert!(greedy(&w, 10, &fx.network, &dry, &sched, 3).unwrap().plan.is_zero());
    let inexorable = scenarios(2, &[(1.0, &[(0, 3), (1, 3)])]);
    assert!(greedy(&w, 10, &fx.network, &inexorable, &sched, 3).unwrap().plan.is_zero());

    // Only S2 floods, to level 2 in both scenarios: protect it to 2 (cost 1 + 2) and stop.
    let s2 = scenarios(2, &[(0.5, &[(1, 2)]), (0.5, &[(1, 2)])]);
    let g = greedy(&w, 10, &fx.network, &s2, &sched, 3).unwrap();
    assert_eq!(g.plan.levels(), vec![0, 2]);
    assert_eq!(g.cost, 3);
    assert_eq!(g.steps.len(), 1);
    assert_eq!((g.steps[0].from_level, g.steps[0].to_level), (0, 2));
}

#[test]
fn greedy_ties_follow_substation_id() {
    let net = twin();
    let sched = CostSchedule::from_network(&net);
    let set = scenarios(3, &[(0.5, &[(1, 1)]), (0.5, &[(2, 1)])]);
    let load = AttributeWeights::new(1.0, 0.0, 0.0).unwrap();
    let g = greedy(&load, 1, &net, &set, &sched, 3).unwrap();
    assert_eq!(g.steps.len(), 1);
    assert_eq!(g.steps[0].substation, "A");
    assert_eq!(g.plan.levels(), vec![0, 0, 1]);
}

#[test]
fn portfolio_examples() {
    let fx = make_fixture("tiny3").unwrap();
    let sched = CostSchedule::from_network(&fx.network);
    let s2 = scenarios(2, &[(1.0, &[(1, 1)])]);
    let one = portfolio(5, &fx.network, &s2, &sched, 3).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].eta_flow, ETA_FLOW_GRID.to_vec());
    assert_eq!(ETA_FLOW_GRID.len(), 7);

    for name in ["star8", "ring12", "coastal40"] {
        let fx = make_fixture(name).unwrap();
        let sched = CostSchedule::from_network(&fx.network);
        for f in [0, 4, 9, 15] {
            let p = portfolio(f, &fx.network, &fx.scenarios, &sched, 3).unwrap();
            assert!(!p.is_empty() && p.len() <= 7);
            let etas: usize = p.iter().map(|e| e.eta_flow.len()).sum();
            assert_eq!(etas, 7);
            for e in &p {
                assert!(is_feasible(&e.plan, &sched, f, 3).unwrap(), "{name} {f}");
            }
            assert_eq!(p, portfolio(f, &fx.network, &fx.scenarios, &sched, 3).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greedy_invariants(f in 0u64..30, eta in 0.0f64..0.2, pick in 0usize..3) {
        let name = ["tiny3", "star8", "ring12"][pick];
        let fx = make_fixture(name).unwrap();
        let sched = CostSchedule::from_network(&fx.network);
        let w = AttributeWeights::with_flow(eta).unwrap();
        let g = greedy(&w, f, &fx.network, &fx.scenarios, &sched, 3).unwrap();
        prop_assert!(is_feasible(&g.plan, &sched, f, 3).unwrap());
        prop_assert_eq!(g.cost, plan_cost(&g.plan, &sched).unwrap());
        prop_assert!(g.cost <= f);
        let mut x = MitigationPlan::zeros(fx.network.num_substations(), 4);
        for step in &g.steps {
            let k = fx.network.substation_index(&step.substation).unwrap();
            prop_assert!(step.to_level > step.from_level);
            prop_assert_eq!(x.level(k), step.from_level);
            prop_assert!(step.benefit > 0.0);
            let next = x.with_level(k, step.to_level);
            prop_assert!(next.dominates(&x));
            let touched = (0..x.num_substations()).filter(|&j| next.level(j) != x.level(j)).count();
            prop_assert_eq!(touched, 1);
            x = next;
        }
        prop_assert_eq!(&x, &g.plan);
        prop_assert_eq!(&g, &greedy(&w, f, &fx.network, &fx.scenarios, &sched, 3).unwrap());
    }

    #[test]
    fn benefit_is_nonnegative_for_supersets(
        lo in proptest::collection::vec(0u32..3, 4),
        bump in proptest::collection::vec(0u32..3, 4),
        eta in 0.0f64..1.0,
    ) {
        let fx = make_fixture("ring12").unwrap();
        let hi: Vec<u32> = lo.iter().zip(&bump).map(|(a, b)| (a + b).min(2)).collect();
        let w = AttributeWeights::new(1.0, 0.3, eta).unwrap();
        prop_assert!(benefit(&plan(&lo), &plan(&hi), &w, &fx.network, &fx.scenarios).unwrap() >= 0.0);
    }
}

#[test]
fn spared_capacity_examples() {
    let fx = make_fixture("tiny3").unwrap();
    let net = &fx.network;
    let zero = spared_capacity(&plan(&[0, 0]), net, &fx.scenarios).unwrap();
    assert_eq!([zero.load, zero.generation, zero.transmission], [0.0; 3]);

    // Two load substations of equal load, both flooded; protect one.
    let twin = twin();
    let both = scenarios(3, &[(1.0, &[(1, 1), (2, 1)])]);
    let half = spared_capacity(&plan(&[0, 1, 0]), &twin, &both).unwrap();
    assert!((half.load - 0.5).abs() < 1e-15);
    assert!((half.load_abs - 1.0).abs() < 1e-15);

    // Every scenario loses all three attributes and all of it is preventable.
    let star = make_fixture("star8").unwrap();
    let hub = scenarios(4, &[(0.6, &[(0, 1)]), (0.4, &[(0, 2), (1, 1)])]);
    let full = spared_capacity(&plan(&[2, 1, 0, 0]), &star.network, &hub).unwrap();
    assert_eq!([full.load, full.generation, full.transmission], [1.0; 3]);
}

fn spared_oracle(p: &MitigationPlan, net: &GridNetwork, set: &FloodScenarioSet) -> [f64; 3] {
    let zero = MitigationPlan::zeros(net.num_substations(), 4);
    let mut out = [0.0; 3];
    for s in &set.scenarios {
        let (a0, a1) = (status_closure(net, &zero, s).unwrap(), status_closure(net, p, s).unwrap());
        let mut lost = [0.0; 3];
        let mut spared = [0.0; 3];
        for (n, b) in net.buses().iter().enumerate() {
            let (was, now) = (a0.alpha[n] as u8 as f64, a1.alpha[n] as u8 as f64);
            lost[0] += b.p_load * (1.0 - was);
            spared[0] += b.p_load * (now - was);
            lost[1] += b.p_gen_max * (1.0 - was);
            spared[1] += b.p_gen_max * (now - was);
        }
        for (e, br) in net.branches().iter().enumerate() {
            let (was, now) = (a0.beta[e] as u8 as f64, a1.beta[e] as u8 as f64);
            lost[2] += br.flow_limit * (1.0 - was);
            spared[2] += br.flow_limit * (now - was);
        }
        for i in 0..3 {
            if lost[i] > 0.0 {
                out[i] += s.probability * spared[i] / lost[i];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spared_capacity_matches_oracle(levels in proptest::collection::vec(0u32..3, 4), pick in 0usize..3) {
        let name = ["star8", "ring12", "tiny3"][pick];
        let fx = make_fixture(name).unwrap();
        let k = fx.network.num_substations();
        let p = plan(&levels[..k]);
        let got = spared_capacity(&p, &fx.network, &fx.scenarios).unwrap();
        let want = spared_oracle(&p, &fx.network, &fx.scenarios);
        for (g, w) in [got.load, got.generation, got.transmission].iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(g));
        }
    }
}

#[test]
fn operational_attributes_of_intact_network() {
    let net = make_fixture("star8").unwrap().network;
    let a = operational_attributes(&net, &StatusVector::all_up(&net));
    assert!((a[0] - net.total_load()).abs() < 1e-12);
    assert!((a[1] - net.total_capacity()).abs() < 1e-12);
    let flow: f64 = net.branches().iter().map(|b| b.flow_limit).sum();
    assert!((a[2] - flow).abs() < 1e-12);
}

#[test]
fn sweep_examples() {
    let fx = make_fixture("star8").unwrap();
    let sched = CostSchedule::from_network(&fx.network);
    let w = LossWeights::default();
    let cfg0 = SweepConfig { max_budget: Some(0), ..SweepConfig::default() };
    let r = sweep(&fx.network, &fx.scenarios, &sched, 3, &w, &cfg0).unwrap();
    assert_eq!(r.rows.len(), 1);
    let sol = r.rows[0].solution.as_ref().unwrap();
    assert!(sol.plan.is_zero());
    let none = evaluate_plan(&fx.network, &plan(&[0; 4]), &fx.scenarios, &w).unwrap().expected_loss;
    assert!((sol.objective - none).abs() < 1e-6);

    let full = sweep(&fx.network, &fx.scenarios, &sched, 3, &w, &SweepConfig::default()).unwrap();
    let top = max_useful_budget(&fx.scenarios, &sched, 3);
    assert_eq!(full.rows.len() as u64, top + 1);
    let best = evaluate_plan(&fx.network, &full.rows.last().unwrap().solution.as_ref().unwrap().plan, &fx.scenarios, &w)
        .unwrap()
        .expected_loss;
    let envelope = evaluate_plan(&fx.network, &plan(&[2, 2, 2, 2]), &fx.scenarios, &w).unwrap().expected_loss;
    assert!((best - envelope).abs() < 1e-6);
    let obj = full.objectives();
    assert!(obj.windows(2).all(|p| p[1].1 <= p[0].1 + 1e-6));
    assert!(full.rows.iter().all(|r| r.spared.is_some() && r.error.is_none()));
    for t in &full.transitions {
        assert_ne!(t.from_level, t.to_level);
        assert_eq!(t.direction == Direction::Up, t.to_level > t.from_level);
    }
    for row in &full.rows {
        let (oracle, _) = common::brute_force_optimum(&fx, row.budget, 3, &w);
        assert!((row.solution.as_ref().unwrap().objective - oracle).abs() < 1e-6);
    }
}

#[test]
fn nestedness_examples() {
    let names: Vec<String> = ["w1", "w2", "w3"].iter().map(|s| s.to_string()).collect();
    let flip = nestedness_of(&[(7, vec![1, 0, 1]), (8, vec![0, 1, 0])], &names);
    assert_eq!(flip.violations, vec![(7, 8)]);
    assert_eq!(flip.changes.values().copied().collect::<Vec<_>>(), vec![1, 1, 1]);

    let nested = nestedness_of(&[(0, vec![0, 0, 0]), (1, vec![1, 0, 0]), (2, vec![2, 0, 0]), (3, vec![2, 0, 1])], &names);
    assert!(nested.violations.is_empty());
    let w1: Vec<_> = nested.intervals.iter().filter(|i| i.substation == "w1").collect();
    assert_eq!(w1.len(), 2);
    assert_eq!((w1[0].level, w1[0].first_budget, w1[0].last_budget), (1, 1, 1));
    assert_eq!((w1[1].level, w1[1].first_budget), (2, 2));

    let back_and_forth =
        nestedness_of(&[(0, vec![0, 0, 0]), (1, vec![1, 0, 0]), (2, vec![0, 1, 0]), (3, vec![1, 1, 0])], &names);
    assert_eq!(back_and_forth.changes["w1"], 3);
    let i = back_and_forth.intervals.iter().find(|i| i.substation == "w1" && i.level == 1).unwrap();
    assert_eq!((i.first_budget, i.last_budget), (1, 3));

    let fx = make_fixture("ring12").unwrap();
    let sched = CostSchedule::from_network(&fx.network);
    let rep = sweep(&fx.network, &fx.scenarios, &sched, 3, &LossWeights::default(), &SweepConfig::default()).unwrap();
    let n = nestedness(&rep);
    assert_eq!(n.changes.len(), 4);
}

#[test]
fn rhat_comparison_examples() {
    let fx = make_fixture("star8").unwrap();
    let sched = CostSchedule::from_network(&fx.network);
    let w = LossWeights::default();
    let cfg = BnbConfig::default();
    let shallow = scenarios(4, &[(0.5, &[(1, 1), (2, 1)]), (0.5, &[(3, 1)])]);
    let c = compare_rhat(&fx.network, &shallow, &sched, &w, 6, &[2, 3], &reduced_options(), &cfg).unwrap();
    assert!((c.entries[0].objective - c.entries[1].objective).abs() < 1e-6);
    assert!(c.ordered);

    let small = compare_rhat(&fx.network, &fx.scenarios, &sched, &w, 1, &[3, 4], &reduced_options(), &cfg).unwrap();
    assert!(small.differing.is_empty());
    assert_eq!(small.entries[0].plan, small.entries[1].plan);

    let ring = make_fixture("ring12").unwrap();
    let rs = CostSchedule::from_network(&ring.network);
    let strict = compare_rhat(&ring.network, &ring.scenarios, &rs, &w, 7, &[4, 3], &reduced_options(), &cfg).unwrap();
    assert_eq!(strict.entries[0].unattainable_level, 3);
    assert!(strict.entries[1].objective < strict.entries[0].objective - 1e-6);
    assert!(strict.ordered && !strict.differing.is_empty());
    let (b3, _) = common::brute_force_optimum(&ring, 7, 3, &w);
    let (b4, _) = common::brute_force_optimum(&ring, 7, 4, &w);
    assert!((strict.entries[0].objective - b3).abs() < 1e-6 && (strict.entries[1].objective - b4).abs() < 1e-6);

    assert!(compare_rhat(&fx.network, &fx.scenarios, &sched, &w, 1, &[1, 3], &reduced_options(), &cfg).is_err());
}

fn solve_ef(fx: &Fixture, sets: &FloodScenarioSet, f: u64) -> (ExtensiveForm, Vec<f64>) {
    let sched = CostSchedule::from_network(&fx.network);
    let ef = ExtensiveForm::build(&fx.network, sets, &sched, f, 3, &LossWeights::default(), &BuildOptions::default()).unwrap();
    let x = ef.solve(&BnbConfig::default()).unwrap().milp.x.unwrap();
    (ef, x)
}

#[test]
fn uniqueness_examples() {
    let fx = make_fixture("tiny3").unwrap();
    let (ef, x) = solve_ef(&fx, &fx.scenarios, 0);
    let u = uniqueness(&ef, &x, &BnbConfig::default()).unwrap();
    assert!(u.unique && u.unique_exact && !u.subsets_cut);

    // Only S2 floods, at level 1; raising it to level 2 with the spare units changes nothing.
    let s2 = scenarios(2, &[(1.0, &[(1, 1)])]);
    let (ef, x) = solve_ef(&fx, &s2, 3);
    let u = uniqueness(&ef, &x, &BnbConfig::default()).unwrap();
    assert!(!u.unique_exact);
    let alt = u.exact_witness.clone().unwrap();
    assert_eq!(alt.level(1), 1);
    assert_ne!(alt, ef.plan_from_solution(&x));

    // Budget 1 buys exactly S2 to level 1, and nothing else is as good.
    let (ef, x) = solve_ef(&fx, &s2, 1);
    let u = uniqueness(&ef, &x, &BnbConfig::default()).unwrap();
    assert!(u.unique && u.unique_exact && u.subsets_cut);
}
