use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use floodwall_core::analysis::{reduced_options, solve_form, uniqueness, BudgetSolution, SweepConfig, UniquenessReport};
use floodwall_core::fixtures::coastal40_kernel;
use floodwall_core::grid_model::validate;
use floodwall_core::io::{load_network, read_csv, read_json, read_plan_levels, write_csv, write_json};
use floodwall_core::scenario_model::load_scenarios;
use floodwall_core::*;
use floodwall_milp::{BnbConfig, Branching};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// What a subcommand produced.
pub struct Outcome {
    pub outputs: Value,
    /// Envelope destination when `--report` is absent; stdout otherwise.
    pub default_report: Option<PathBuf>,
    /// Set when the command ran but found the input unacceptable.
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(outputs: Value) -> Self {
        Outcome { outputs, default_report: None, failure: None }
    }
}

pub fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Validate(a) => run_validate(a),
        Command::GenScenarios(a) => run_gen(a),
        Command::Heuristic(a) => run_heuristic(a),
        Command::Solve(a) => run_solve(a),
        Command::Sweep(a) => {
            let max = match a.max_budget.as_str() {
                "auto" => None,
                s => Some(s.parse::<u64>().with_context(|| format!("--max-budget `{s}` is neither auto nor an integer"))?),
            };
            run_sweep(&a.instance, &a.solver, max, a.check_unique, &a.out)
        }
        Command::Eval(a) => run_eval(a),
        Command::Remap(a) => run_remap(a),
        Command::CheckUnique(a) => run_check_unique(a),
        Command::Fixture(a) => run_fixture(a),
    }
}

struct Instance {
    network: GridNetwork,
    scenarios: FloodScenarioSet,
    schedule: CostSchedule,
    rhat: u32,
    weights: LossWeights,
}

fn load_instance(a: &InstanceArgs) -> Result<Instance> {
    let network = load_network(&a.network)?;
    let mut scenarios = load_scenarios(&a.scenarios, &network, a.normalize)?;
    if let Some(r) = a.rhat {
        scenarios = scenarios.with_unattainable_level(r)?;
    }
    let weights = LossWeights { lambda_shed: a.lambda_shed, lambda_over: a.lambda_over };
    weights.validate()?;
    let schedule = CostSchedule::from_network(&network);
    let rhat = scenarios.unattainable_level;
    Ok(Instance { network, scenarios, schedule, rhat, weights })
}

fn bnb_config(s: &SolverArgs) -> Result<BnbConfig> {
    let time_limit = match s.time_limit {
        Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
        Some(t) => bail!("--time-limit must be positive, got {t}"),
        None => None,
    };
    let cfg = BnbConfig {
        abs_gap: s.abs_gap,
        rel_gap: s.rel_gap,
        node_limit: s.node_limit,
        time_limit,
        branching: match s.branching {
            BranchingRule::MostFractional => Branching::MostFractional,
            BranchingRule::PseudoCost => Branching::PseudoCost,
        },
        ..BnbConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn build_options(s: &SolverArgs) -> Result<BuildOptions> {
    let mut opts = if s.literal { BuildOptions::default() } else { reduced_options() };
    for spec in &s.service_levels {
        let (bus, value) = spec.split_once('=').with_context(|| format!("--service-level `{spec}` is not BUS=FRACTION"))?;
        let v: f64 = value.parse().with_context(|| format!("--service-level `{spec}` has a bad fraction"))?;
        opts.service_levels.insert(bus.to_string(), v);
    }
    if !opts.service_levels.is_empty() {
        opts.fold_constant = false;
    }
    Ok(opts)
}

fn warm_plans(inst: &Instance, budget: u64, enabled: bool) -> Result<Vec<MitigationPlan>> {
    if !enabled {
        return Ok(Vec::new());
    }
    Ok(portfolio(budget, &inst.network, &inst.scenarios, &inst.schedule, inst.rhat)?.into_iter().map(|e| e.plan).collect())
}

fn levels(plan: &MitigationPlan, network: &GridNetwork) -> BTreeMap<String, u32> {
    plan.to_level_map(network)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn run_validate(a: &ValidateArgs) -> Result<Outcome> {
    let data: NetworkData = read_json(&a.network)?;
    let violations = validate(&data);
    let mut failure = (!violations.is_empty()).then(|| format!("{} network violation(s)", violations.len()));
    let scenarios = match (&a.scenarios, violations.is_empty()) {
        (Some(path), true) => {
            let network = GridNetwork::new(data.clone())?;
            match load_scenarios(path, &network, a.normalize) {
                Ok(set) => json!({
                    "count": set.len(),
                    "level_count": set.level_count,
                    "unattainable_level": set.unattainable_level,
                    "total_probability": set.total_probability(),
                }),
                Err(e) => {
                    failure = Some(format!("scenario file rejected: {e}"));
                    json!({ "error": e.to_string() })
                }
            }
        }
        _ => Value::Null,
    };
    Ok(Outcome {
        outputs: json!({
            "buses": data.buses.len(),
            "branches": data.branches.len(),
            "substations": data.substations.len(),
            "violations": violations,
            "scenarios": scenarios,
        }),
        default_report: None,
        failure,
    })
}

#[derive(Serialize)]
struct LandfallRow {
    id: String,
    arc_km: f64,
    lon: f64,
    lat: f64,
    flooded_substations: usize,
}

fn run_gen(a: &GenArgs) -> Result<Outcome> {
    let network = load_network(&a.network)?;
    let coastline: Coastline = read_json(&a.coastline)?;
    coastline.validate()?;
    let mean_km = a.mean_km.unwrap_or(coastline.length_km() / 2.0);
    let coast_km = coastline.length_km();
    let dist = LandfallDistribution::new(coastline, mean_km, a.cone_nmi)?;
    let kernel =
        InundationKernel { peak_depth: a.peak_depth, decay_km: a.decay_km, track_bearing_deg: a.bearing, dry_depth: a.dry_depth };
    let thresholds = match &a.thresholds {
        Some(t) => DepthThresholds::new(t.clone())?,
        None => DepthThresholds::barrier_stack(),
    };
    let set = generate_scenarios(&network, &dist, &kernel, &thresholds, a.count, a.seed, a.rhat)?;
    write_json(&a.out, &set.to_file(&network))?;
    let landfalls: Vec<LandfallRow> = stratified_landfalls(&dist, a.count, a.seed)?
        .into_iter()
        .zip(&set.scenarios)
        .map(|(s, sc)| {
            let (lon, lat) = dist.coastline.point_at(s);
            let flooded = sc.levels.iter().filter(|&&l| l > 0).count();
            LandfallRow { id: sc.id.clone(), arc_km: s, lon, lat, flooded_substations: flooded }
        })
        .collect();
    Ok(Outcome::ok(json!({
        "scenario_file": a.out,
        "count": set.len(),
        "level_count": set.level_count,
        "unattainable_level": set.unattainable_level,
        "coastline_km": coast_km,
        "mean_km": mean_km,
        "sigma_km": dist.sigma_km(),
        "landfalls": landfalls,
    })))
}

#[derive(Serialize)]
struct RankingRow {
    rank: usize,
    file: String,
    expected_loss: f64,
    cost: u64,
    eta_flow: String,
}

fn run_heuristic(a: &HeuristicArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let (net, sc, sched) = (&inst.network, &inst.scenarios, &inst.schedule);
    if !a.portfolio && a.eta_flow.len() <= 1 {
        let eta_flow = a.eta_flow.first().copied().unwrap_or(0.0);
        let weights = AttributeWeights::new(a.eta_load, a.eta_gen, eta_flow)?;
        let res = greedy(&weights, a.budget, net, sc, sched, inst.rhat)?;
        let eval = evaluate_plan(net, &res.plan, sc, &inst.weights)?;
        write_json(&a.out, &levels(&res.plan, net))?;
        return Ok(Outcome::ok(json!({
            "budget": a.budget,
            "weights": weights,
            "plan_file": a.out,
            "plan": levels(&res.plan, net),
            "cost": res.cost,
            "steps": res.steps,
            "expected_loss": eval.expected_loss,
        })));
    }

    let entries: Vec<(MitigationPlan, Vec<f64>)> = if a.portfolio {
        portfolio(a.budget, net, sc, sched, inst.rhat)?.into_iter().map(|e| (e.plan, e.eta_flow)).collect()
    } else {
        let mut out: Vec<(MitigationPlan, Vec<f64>)> = Vec::new();
        for &eta in &a.eta_flow {
            let w = AttributeWeights::new(a.eta_load, a.eta_gen, eta)?;
            let plan = greedy(&w, a.budget, net, sc, sched, inst.rhat)?.plan;
            match out.iter_mut().find(|(p, _)| *p == plan) {
                Some((_, etas)) => etas.push(eta),
                None => out.push((plan, vec![eta])),
            }
        }
        out
    };
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut scored = Vec::new();
    for (i, (plan, etas)) in entries.iter().enumerate() {
        let file = format!("plan_{:02}.json", i + 1);
        write_json(&a.out.join(&file), &levels(plan, net))?;
        let loss = evaluate_plan(net, plan, sc, &inst.weights)?.expected_loss;
        scored.push((loss, file, plan_cost(plan, sched)?, etas, plan));
    }
    scored.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let ranking: Vec<RankingRow> = scored
        .iter()
        .enumerate()
        .map(|(i, (loss, file, cost, etas, _))| RankingRow {
            rank: i + 1,
            file: file.clone(),
            expected_loss: *loss,
            cost: *cost,
            eta_flow: etas.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"),
        })
        .collect();
    write_csv(&a.out.join("ranking.csv"), &ranking)?;
    let plans: Vec<Value> = scored
        .iter()
        .map(|(loss, file, cost, etas, plan)| {
            json!({ "file": file, "expected_loss": loss, "cost": cost, "eta_flow": etas, "plan": levels(plan, net) })
        })
        .collect();
    Ok(Outcome::ok(json!({ "budget": a.budget, "plan_dir": a.out, "plans": plans })))
}

fn uniqueness_value(u: &UniquenessReport, net: &GridNetwork) -> Value {
    json!({
        "unique": u.unique,
        "unique_exact": u.unique_exact,
        "subsets_cut": u.subsets_cut,
        "optimum": u.optimum,
        "cut_objective": u.cut_objective,
        "witness": u.witness.as_ref().map(|p| levels(p, net)),
        "exact_witness": u.exact_witness.as_ref().map(|p| levels(p, net)),
    })
}

fn solution_value(sol: &BudgetSolution, net: &GridNetwork) -> Value {
    json!({
        "budget": sol.budget,
        "status": sol.status,
        "objective": sol.objective,
        "bound": sol.bound,
        "plan": levels(&sol.plan, net),
        "plan_cost": sol.plan_cost,
        "nodes": sol.nodes,
        "lp_iterations": sol.lp_iterations,
        "warm_start_objective": sol.warm_start_objective,
        "elapsed_ms": sol.elapsed_ms,
    })
}

fn run_solve(a: &SolveArgs) -> Result<Outcome> {
    let Some(budget) = a.budget else {
        let out = a.out.as_ref().context("--sweep needs --out for the report directory")?;
        return run_sweep(&a.instance, &a.solver, a.max_budget, a.check_unique, out);
    };
    let inst = load_instance(&a.instance)?;
    let cfg = bnb_config(&a.solver)?;
    let ef = ExtensiveForm::build(
        &inst.network,
        &inst.scenarios,
        &inst.schedule,
        budget,
        inst.rhat,
        &inst.weights,
        &build_options(&a.solver)?,
    )?;
    if let Some(path) = &a.lp_out {
        std::fs::write(path, ef.to_lp_string()).with_context(|| format!("writing {}", path.display()))?;
    }
    let warm = warm_plans(&inst, budget, !a.solver.no_warm_start)?;
    let (sol, x) = solve_form(&ef, &inst.schedule, budget, &cfg, &warm)?;
    let spared = spared_capacity(&sol.plan, &inst.network, &inst.scenarios)?;
    let unique = if a.check_unique { Some(uniqueness(&ef, &x, &cfg)?) } else { None };
    if let Some(path) = &a.out {
        write_json(path, &levels(&sol.plan, &inst.network))?;
    }
    let mut outputs = solution_value(&sol, &inst.network);
    outputs["unattainable_level"] = json!(inst.rhat);
    outputs["model"] = to_value(&ef.stats())?;
    outputs["spared"] = to_value(&spared)?;
    outputs["uniqueness"] = unique.map_or(Value::Null, |u| uniqueness_value(&u, &inst.network));
    Ok(Outcome::ok(outputs))
}

#[derive(Serialize)]
struct SweepCsvRow {
    budget: u64,
    status: String,
    objective: Option<f64>,
    bound: Option<f64>,
    plan_cost: Option<u64>,
    nodes: Option<usize>,
    lp_iterations: Option<usize>,
    spared_load: Option<f64>,
    spared_generation: Option<f64>,
    spared_transmission: Option<f64>,
    spared_load_abs: Option<f64>,
    spared_generation_abs: Option<f64>,
    spared_transmission_abs: Option<f64>,
    unique: Option<bool>,
    unique_exact: Option<bool>,
    error: Option<String>,
}

#[derive(Serialize)]
struct PlanCsvRow<'a> {
    budget: u64,
    substation: &'a str,
    level: u32,
}

fn write_table<S: Serialize>(path: &Path, header: &str, rows: &[S]) -> Result<()> {
    if rows.is_empty() {
        std::fs::write(path, format!("{header}\n")).with_context(|| format!("writing {}", path.display()))?;
    } else {
        write_csv(path, rows)?;
    }
    Ok(())
}

fn run_sweep(inst_args: &InstanceArgs, solver: &SolverArgs, max_budget: Option<u64>, check_unique: bool, out: &Path) -> Result<Outcome> {
    let inst = load_instance(inst_args)?;
    let config = SweepConfig {
        max_budget,
        bnb: bnb_config(solver)?,
        build: build_options(solver)?,
        check_unique,
        heuristic_warm_starts: !solver.no_warm_start,
    };
    let report = sweep(&inst.network, &inst.scenarios, &inst.schedule, inst.rhat, &inst.weights, &config)?;
    let nest = nestedness(&report);
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let table: Vec<SweepCsvRow> = report
        .rows
        .iter()
        .map(|r| {
            let s = r.solution.as_ref();
            let sp = r.spared.as_ref();
            let u = r.uniqueness.as_ref();
            SweepCsvRow {
                budget: r.budget,
                status: s.map_or("Error".to_string(), |s| s.status.clone()),
                objective: s.map(|s| s.objective),
                bound: s.map(|s| s.bound),
                plan_cost: s.map(|s| s.plan_cost),
                nodes: s.map(|s| s.nodes),
                lp_iterations: s.map(|s| s.lp_iterations),
                spared_load: sp.map(|c| c.load),
                spared_generation: sp.map(|c| c.generation),
                spared_transmission: sp.map(|c| c.transmission),
                spared_load_abs: sp.map(|c| c.load_abs),
                spared_generation_abs: sp.map(|c| c.generation_abs),
                spared_transmission_abs: sp.map(|c| c.transmission_abs),
                unique: u.map(|u| u.unique),
                unique_exact: u.map(|u| u.unique_exact),
                error: r.error.clone(),
            }
        })
        .collect();
    write_csv(&out.join("sweep.csv"), &table)?;

    let mut plans = Vec::new();
    for r in &report.rows {
        if let Some(s) = &r.solution {
            for (k, id) in report.substations.iter().enumerate() {
                plans.push(PlanCsvRow { budget: r.budget, substation: id, level: s.plan.level(k) });
            }
        }
    }
    write_table(&out.join("plans.csv"), "budget,substation,level", &plans)?;
    write_table(&out.join("transitions.csv"), "substation,from_level,to_level,budget,direction", &report.transitions)?;
    write_table(&out.join("intervals.csv"), "substation,level,first_budget,last_budget", &nest.intervals)?;

    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "budget": r.budget,
                "solution": r.solution.as_ref().map(|s| solution_value(s, &inst.network)),
                "spared": r.spared,
                "uniqueness": r.uniqueness.as_ref().map(|u| uniqueness_value(u, &inst.network)),
                "error": r.error,
            })
        })
        .collect();
    Ok(Outcome {
        outputs: json!({
            "unattainable_level": report.unattainable_level,
            "substations": report.substations,
            "rows": rows,
            "transitions": report.transitions,
            "nestedness": nest,
            "tables": ["sweep.csv", "plans.csv", "transitions.csv", "intervals.csv"],
        }),
        default_report: Some(out.join("report.json")),
        failure: None,
    })
}

#[derive(Serialize)]
struct ScenarioReport {
    id: String,
    probability: f64,
    loss: f64,
    served_load: f64,
    buses_down: Vec<String>,
    branches_down: Vec<String>,
}

fn run_eval(a: &EvalArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let net = &inst.network;
    let map = read_plan_levels(&a.plan)?;
    let plan = MitigationPlan::from_level_map(&map, net, inst.scenarios.level_count)?;
    let eval = evaluate_plan(net, &plan, &inst.scenarios, &inst.weights)?;
    let mut per = Vec::new();
    for (s, o) in inst.scenarios.scenarios.iter().zip(&eval.scenarios) {
        let st = status_closure(net, &plan, s)?;
        per.push(ScenarioReport {
            id: o.id.clone(),
            probability: o.probability,
            loss: o.loss,
            served_load: o.served_load,
            buses_down: net.buses().iter().zip(&st.alpha).filter(|(_, &up)| !up).map(|(b, _)| b.id.clone()).collect(),
            branches_down: net.branches().iter().zip(&st.beta).filter(|(_, &up)| !up).map(|(b, _)| b.id.clone()).collect(),
        });
    }
    let cost = plan_cost(&plan, &inst.schedule)?;
    let within_rhat = (0..plan.num_substations()).all(|k| plan.level(k) < inst.rhat);
    let fits_budget = match a.budget {
        Some(f) => Some(is_feasible(&plan, &inst.schedule, f, inst.rhat)?),
        None => None,
    };
    Ok(Outcome::ok(json!({
        "plan": levels(&plan, net),
        "plan_cost": cost,
        "within_unattainable_level": within_rhat,
        "fits_budget": fits_budget,
        "expected_loss": eval.expected_loss,
        "spared": spared_capacity(&plan, net, &inst.scenarios)?,
        "scenarios": per,
    })))
}

fn run_remap(a: &RemapArgs) -> Result<Outcome> {
    let from: Vec<GeoPoint> = read_csv(&a.from)?;
    let to: Vec<GeoPoint> = read_csv(&a.to)?;
    let m = remap(&from, &to)?;
    write_csv(&a.out, &m.pairs)?;
    Ok(Outcome::ok(json!({
        "mapping_file": a.out,
        "pairs": m.pairs.len(),
        "total_km": m.total_km,
        "integrality_error": m.integrality_error,
    })))
}

fn run_check_unique(a: &CheckUniqueArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let cfg = bnb_config(&a.solver)?;
    let ef = ExtensiveForm::build(
        &inst.network,
        &inst.scenarios,
        &inst.schedule,
        a.budget,
        inst.rhat,
        &inst.weights,
        &build_options(&a.solver)?,
    )?;
    let warm = warm_plans(&inst, a.budget, !a.solver.no_warm_start)?;
    let (sol, x) = solve_form(&ef, &inst.schedule, a.budget, &cfg, &warm)?;
    let u = uniqueness(&ef, &x, &cfg)?;
    let mut outputs = solution_value(&sol, &inst.network);
    outputs["uniqueness"] = uniqueness_value(&u, &inst.network);
    Ok(Outcome::ok(outputs))
}

fn run_fixture(a: &FixtureArgs) -> Result<Outcome> {
    let fx = make_fixture(&a.name)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut files = vec!["network.json", "scenarios.json"];
    write_json(&a.out.join("network.json"), fx.network.data())?;
    write_json(&a.out.join("scenarios.json"), &fx.scenarios.to_file(&fx.network))?;
    if let Some(c) = &fx.coastline {
        write_json(&a.out.join("coastline.json"), c)?;
        write_json(&a.out.join("kernel.json"), &coastal40_kernel())?;
        files.extend(["coastline.json", "kernel.json"]);
    }
    Ok(Outcome::ok(json!({
        "name": fx.name,
        "dir": a.out,
        "files": files,
        "buses": fx.network.num_buses(),
        "substations": fx.network.num_substations(),
        "scenarios": fx.scenarios.len(),
    })))
}
