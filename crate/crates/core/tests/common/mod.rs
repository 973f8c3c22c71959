#![allow(dead_code)]

use floodwall_core::{enumerate_plans, evaluate_plan, CostSchedule, Fixture, LossWeights, MitigationPlan};

/// Standard normal CDF by composite Simpson integration of the density from 0.
pub fn normal_cdf(z: f64) -> f64 {
    let n = 4000;
    let h = z / n as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(0.0) + pdf(z);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(i as f64 * h);
    }
    0.5 + s * h / 3.0
}

/// Inverse standard normal CDF on (0.5, 1) by bisection.
pub fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum expected loss over every feasible plan, with an argmin.
pub fn brute_force_optimum(fx: &Fixture, budget: u64, rhat: u32, weights: &LossWeights) -> (f64, MitigationPlan) {
    let sched = CostSchedule::from_network(&fx.network);
    let subset: Vec<usize> = (0..fx.network.num_substations()).collect();
    let mut best = (f64::INFINITY, MitigationPlan::zeros(subset.len(), fx.scenarios.level_count));
    for plan in enumerate_plans(&sched, budget, rhat, fx.scenarios.level_count, &subset).unwrap() {
        let v = evaluate_plan(&fx.network, &plan, &fx.scenarios, weights).unwrap().expected_loss;
        if v < best.0 {
            best = (v, plan);
        }
    }
    best
}

/// Minimum total cost over all injections of rows into columns.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], i: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if i == cost.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                go(cost, i + 1, used, acc + cost[i][j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let cols = cost.first().map_or(0, |r| r.len());
    go(cost, 0, &mut vec![false; cols], 0.0, &mut best);
    best
}

/// Haversine distance written out independently of the library.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let r = 6371.0;
    let (p1, p2) = (a.1.to_radians(), b.1.to_radians());
    let dp = p2 - p1;
    let dl = (b.0 - a.0).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * r * h.sqrt().atan2((1.0 - h).sqrt())
}
