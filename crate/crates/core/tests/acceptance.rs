//! Acceptance criteria, one pass/fail line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use floodwall_core::analysis::{reduced_options, SweepConfig};
use floodwall_core::extensive_form::{branch_rows_hold, status_rows_hold};
use floodwall_core::geo_remap::{remap, GeoPoint};
use floodwall_core::heuristic::portfolio;
use floodwall_core::recourse::{dispatch_violations, loss_upper_bound};
use floodwall_core::scenario_gen::{sample_landfalls, stratified_landfalls, Coastline, LandfallDistribution, KM_PER_NMI};
use floodwall_core::*;
use floodwall_milp::{lp_audit, solve_milp, BnbConfig, MilpProblem, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn knapsack(cap: f64) -> MilpProblem {
    let mut p = MilpProblem::new("knapsack");
    let w: Vec<usize> = [3.0, 5.0, 1.0].iter().enumerate().map(|(i, &v)| p.add_binary(format!("w{i}"), -v)).collect();
    p.add_constraint("cap", vec![(w[0], 4.0), (w[1], 8.0), (w[2], 3.0)], Sense::Le, cap).unwrap();
    p
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut out = Vec::new();
    for (cap, want_x, want_v) in [(7.0, [1.0, 0.0, 1.0], 4.0), (8.0, [0.0, 1.0, 0.0], 5.0)] {
        let s = solve_milp(&knapsack(cap), &BnbConfig::default()).map_err(|e| e.to_string())?;
        let x = s.x.ok_or("no incumbent")?;
        ensure(x == want_x && -s.objective == want_v, format!("capacity {cap}: got {x:?} value {}", -s.objective))?;
        out.push(format!("C={cap} -> {x:?} value {}", -s.objective));
    }
    ensure(start.elapsed() < Duration::from_secs(1), "slower than 1 s")?;
    Ok(out.join("; "))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let w = LossWeights::default();
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for name in ["tiny3", "star8", "ring12"] {
        let fx = make_fixture(name).map_err(|e| e.to_string())?;
        let sched = CostSchedule::from_network(&fx.network);
        for rhat in [3, 4] {
            for f in 0..=max_useful_budget(&fx.scenarios, &sched, rhat) {
                let (brute, _) = common::brute_force_optimum(&fx, f, rhat, &w);
                let s = solve_budget(&fx.network, &fx.scenarios, &sched, f, rhat, &w, &BuildOptions::default(), &BnbConfig::default(), &[])
                    .map_err(|e| e.to_string())?;
                let d = (s.objective - brute).abs();
                worst = worst.max(d);
                ensure(d <= 1e-6, format!("{name} rhat {rhat} f {f}: extensive {} vs brute force {brute}", s.objective))?;
                cases += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), format!("took {t:?}"))?;
    Ok(format!("{cases} (fixture, r-hat, budget) cases, max |diff| {worst:.1e}, {:.1} s", t.as_secs_f64()))
}

fn criterion_3() -> Check {
    let bits = |v: u32, n: usize| -> Vec<bool> { (0..n).map(|i| v >> i & 1 == 1).collect() };
    let mut checked = 0;
    for xn in 0..8 {
        for sn in 0..8 {
            let (xi_n, x_n) = (bits(sn, 3), bits(xn, 3));
            let true_n = xi_n.iter().zip(&x_n).all(|(&s, &x)| !s || x);
            for xm in 0..8 {
                for sm in 0..8 {
                    let (xi_m, x_m) = (bits(sm, 3), bits(xm, 3));
                    let true_m = xi_m.iter().zip(&x_m).all(|(&s, &x)| !s || x);
                    for a in 0..8u32 {
                        let (an, am, b) = (a & 1 == 1, a & 2 == 2, a & 4 == 4);
                        let linear = status_rows_hold(&xi_n, &x_n, an)
                            && status_rows_hold(&xi_m, &x_m, am)
                            && branch_rows_hold(an, am, b);
                        let product = an == true_n && am == true_m && b == (an && am);
                        ensure(linear == product, format!("mismatch at xi {xi_n:?}/{xi_m:?} x {x_n:?}/{x_m:?}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} assignments agree"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fixtures: Vec<Fixture> = FIXTURE_NAMES.iter().map(|n| make_fixture(n).unwrap()).collect();
    let w = LossWeights { lambda_shed: 1.0, lambda_over: 0.5 };
    let mut failures = 0;
    for _ in 0..1000 {
        let fx = &fixtures[rng.random_range(0..fixtures.len())];
        let mut data = fx.network.data().clone();
        for b in &mut data.buses {
            b.p_load *= rng.random_range(0.5..2.0);
            if b.p_gen_max > 0.0 {
                b.p_gen_min = rng.random_range(-0.5..b.p_gen_max);
            }
        }
        let net = GridNetwork::new(data).map_err(|e| e.to_string())?;
        let k = net.num_substations();
        let rhat = rng.random_range(3..=4);
        let levels: Vec<u32> = (0..k).map(|_| rng.random_range(0..rhat)).collect();
        let plan = MitigationPlan::from_levels(&levels, 4).unwrap();
        let scenario = FloodScenario {
            id: "s".into(),
            probability: 1.0,
            levels: (0..k).map(|_| if rng.random_bool(0.4) { rng.random_range(1..=5) } else { 0 }).collect(),
        };
        let status = status_closure(&net, &plan, &scenario).map_err(|e| e.to_string())?;
        match solve_recourse_lp(&net, &status, &w) {
            Ok(sol) if dispatch_violations(&net, &status, &sol.dispatch, 1e-7).is_empty()
                && sol.loss <= loss_upper_bound(&net, &w) + 1e-6 => {}
            _ => failures += 1,
        }
    }
    ensure(failures == 0, format!("{failures} infeasible or invalid recourse solves"))?;
    Ok("1000 random (network, plan, scenario) triples feasible".into())
}

fn monotone(objs: &[(u64, f64)]) -> Option<(u64, f64)> {
    objs.windows(2).find(|w| w[1].1 > w[0].1 + 1e-6).map(|w| (w[1].0, w[1].1 - w[0].1))
}

fn criterion_5() -> Check {
    let mut out = Vec::new();
    for name in ["star8", "coastal40"] {
        let start = Instant::now();
        let fx = make_fixture(name).map_err(|e| e.to_string())?;
        let sched = CostSchedule::from_network(&fx.network);
        let rep = sweep(&fx.network, &fx.scenarios, &sched, 3, &LossWeights::default(), &SweepConfig::default())
            .map_err(|e| e.to_string())?;
        if let Some(r) = rep.rows.iter().find(|r| r.error.is_some()) {
            return Err(format!("{name} budget {}: {}", r.budget, r.error.as_deref().unwrap_or("")));
        }
        let objs = rep.objectives();
        if let Some((f, d)) = monotone(&objs) {
            return Err(format!("{name}: objective rises by {d:e} at budget {f}"));
        }
        out.push(format!("{name} {} budgets in {:.1} s", objs.len(), start.elapsed().as_secs_f64()));
    }
    Ok(out.join("; "))
}

fn criterion_6() -> Check {
    let fx = make_fixture("ring12").map_err(|e| e.to_string())?;
    ensure(fx.scenarios.scenarios.iter().any(|s| s.levels.contains(&3)), "fixture has no level-3 flood")?;
    let sched = CostSchedule::from_network(&fx.network);
    let w = LossWeights::default();
    let top = max_useful_budget(&fx.scenarios, &sched, 4);
    let cfg = SweepConfig { max_budget: Some(top), ..SweepConfig::default() };
    let r3 = sweep(&fx.network, &fx.scenarios, &sched, 3, &w, &cfg).map_err(|e| e.to_string())?.objectives();
    let r4 = sweep(&fx.network, &fx.scenarios, &sched, 4, &w, &cfg).map_err(|e| e.to_string())?.objectives();
    ensure(r3.len() == r4.len() && r3.len() as u64 == top + 1, "sweeps incomplete")?;
    let mut strict = Vec::new();
    for (a, b) in r3.iter().zip(&r4) {
        ensure(b.1 <= a.1 + 1e-6, format!("budget {}: r-hat 4 {} > r-hat 3 {}", a.0, b.1, a.1))?;
        if b.1 < a.1 - 1e-6 {
            strict.push(a.0);
        }
    }
    ensure(!strict.is_empty(), "no strict improvement")?;
    Ok(format!("ordered on budgets 0..={top}; strictly better at {} budgets (first {})", strict.len(), strict[0]))
}

fn criterion_7() -> Check {
    let w = LossWeights::default();
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut within = 0;
    let mut cases = 0;
    for name in ["tiny3", "star8", "ring12"] {
        let fx = make_fixture(name).map_err(|e| e.to_string())?;
        let sched = CostSchedule::from_network(&fx.network);
        for rhat in [3, 4] {
            for f in 0..=max_useful_budget(&fx.scenarios, &sched, rhat) {
                let (opt, _) = common::brute_force_optimum(&fx, f, rhat, &w);
                let mut best = f64::INFINITY;
                for e in portfolio(f, &fx.network, &fx.scenarios, &sched, rhat).map_err(|e| e.to_string())? {
                    ensure(is_feasible(&e.plan, &sched, f, rhat).unwrap(), format!("{name} f {f}: infeasible heuristic plan"))?;
                    best = best.min(evaluate_plan(&fx.network, &e.plan, &fx.scenarios, &w).unwrap().expected_loss);
                }
                let gap = if opt > 1e-9 { (best - opt) / opt } else { best - opt };
                ensure(gap.is_finite() && gap >= -1e-9, format!("{name} f {f}: gap {gap}"))?;
                if gap > worst {
                    worst = gap;
                    worst_at = format!("{name} r-hat {rhat} f {f}: {best:.4} vs {opt:.4}");
                }
                within += usize::from(gap <= 0.05);
                cases += 1;
            }
        }
    }
    let holds = if worst <= 0.05 { "holds" } else { "does not hold" };
    Ok(format!(
        "{cases} cases, {within} within 5%, worst relative gap {:.2}% at {worst_at} (5% bound {holds} everywhere)",
        100.0 * worst
    ))
}

fn criterion_8() -> Check {
    let coast = Coastline::new(vec![[-100.0, 0.0], [-80.0, 0.0]]).map_err(|e| e.to_string())?;
    let mean = coast.length_km() / 2.0;
    let dist = LandfallDistribution::new(coast, mean, 89.0).map_err(|e| e.to_string())?;
    let samples = sample_landfalls(&dist, 10_000, 8);
    let radius = 89.0 * KM_PER_NMI;
    let frac = samples.iter().filter(|&&s| (s - mean).abs() <= radius).count() as f64 / 10_000.0;
    ensure((frac - 2.0 / 3.0).abs() <= 0.02, format!("fraction within the cone {frac}"))?;
    let sigma = dist.sigma_km();
    for seed in 0..20 {
        let s = stratified_landfalls(&dist, 25, seed).map_err(|e| e.to_string())?;
        let mut counts = [0usize; 25];
        for &p in &s {
            let u = common::normal_cdf(((p - mean) / sigma).abs()) ;
            let u = if p >= mean { u } else { 1.0 - u };
            counts[((u * 25.0).floor() as usize).min(24)] += 1;
        }
        ensure(counts.iter().all(|&c| c == 1), format!("seed {seed}: strata counts {counts:?}"))?;
    }
    Ok(format!("within-cone fraction {frac:.4}; 20 stratified sets of 25 hit every stratum once"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_integrality: f64 = 0.0;
    for (na, nb) in [(3, 4), (5, 8)] {
        for _ in 0..100 {
            let mut pts = |n: usize, tag: &str| -> Vec<GeoPoint> {
                (0..n)
                    .map(|i| GeoPoint { id: format!("{tag}{i}"), lon: rng.random_range(-99.0..-94.0), lat: rng.random_range(26.0..31.0) })
                    .collect()
            };
            let a = pts(na, "a");
            let b = pts(nb, "b");
            let m = remap(&a, &b).map_err(|e| e.to_string())?;
            worst_integrality = worst_integrality.max(m.integrality_error);
            let cost: Vec<Vec<f64>> =
                a.iter().map(|p| b.iter().map(|q| common::haversine_km((p.lon, p.lat), (q.lon, q.lat))).collect()).collect();
            let brute = common::brute_force_assignment(&cost);
            ensure((m.total_km - brute).abs() <= 1e-6 * brute.max(1.0), format!("{na}x{nb}: LP {} vs brute force {brute}", m.total_km))?;
            let mut used = m.targets.clone();
            used.sort_unstable();
            used.dedup();
            ensure(used.len() == na, "target used twice")?;
        }
    }
    ensure(worst_integrality <= 1e-9, format!("integrality error {worst_integrality:e}"))?;
    Ok(format!("200 instances optimal, max integrality error {worst_integrality:.1e}"))
}

fn criterion_10() -> Check {
    let fx = make_fixture("tiny3").map_err(|e| e.to_string())?;
    let cases = [
        (vec![0, 0], [0.0, 0.0, 0.0]),
        (vec![0, 1], [0.5, 0.0, 0.5]),
        (vec![1, 2], [1.0, 0.5, 1.0]),
    ];
    for (levels, want) in cases {
        let plan = MitigationPlan::from_levels(&levels, 4).unwrap();
        let s = spared_capacity(&plan, &fx.network, &fx.scenarios).map_err(|e| e.to_string())?;
        let got = [s.load, s.generation, s.transmission];
        ensure(got == want, format!("plan {levels:?}: got {got:?}, want {want:?}"))?;
    }
    Ok("zero plan (0,0,0); S2 to 1 (0.5,0,0.5); full plan (1,0.5,1)".into())
}

fn criterion_11() -> Check {
    // Exercise a reduced-form solve as well, then read the process-wide audit.
    let fx = make_fixture("star8").map_err(|e| e.to_string())?;
    let sched = CostSchedule::from_network(&fx.network);
    solve_budget(&fx.network, &fx.scenarios, &sched, 6, 3, &LossWeights::default(), &reduced_options(), &BnbConfig::default(), &[])
        .map_err(|e| e.to_string())?;
    let (optimal, failures) = lp_audit();
    ensure(optimal > 0, "no LP solves audited")?;
    ensure(failures == 0, format!("{failures} optimal solves broke the duality tolerance"))?;
    Ok(format!("{optimal} optimal LP solves, all within 1e-6 duality gap"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("toy knapsack flip", criterion_1),
        ("extensive form equals enumeration oracle", criterion_2),
        ("linearization truth table", criterion_3),
        ("relatively complete recourse", criterion_4),
        ("objective monotone in budget", criterion_5),
        ("r-hat sensitivity ordering", criterion_6),
        ("heuristic quality", criterion_7),
        ("landfall calibration and stratification", criterion_8),
        ("assignment integrality and oracle", criterion_9),
        ("spared-capacity metrics", criterion_10),
        ("LP duality", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
