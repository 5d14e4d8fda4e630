use crate::csvout::{f, i, s, Csv, CsvCell};
use crate::pool;
use crate::{AnalyzeArgs, BenchArgs, PlanArgs, TrainArgs};
use pearl::analysis::{critical_points, ExtremumKind, RestrictedValueParams};
use pearl::config::{
    run_training, InitialConditionsFile, TaskConfig, WeightsFile, WeightsMeta,
};
use pearl::linalg::fit_line;
use pearl::{
    plan_trajectory, trial_rng, Controller, Error, GaussianDisturbance, PolicyConfig,
    PreyKind, PreyTrajectory, PursuitWorld, RendezvousWorld, Result, State, StateLayout, Task,
    Trajectory, WeightVector,
};
use std::path::Path;

pub fn train(args: TrainArgs) -> Result<()> {
    let mut cfg = TaskConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let mut tcfg = cfg.training_config();
    if let Some(trials) = args.trials {
        tcfg.n_mc = trials;
    }
    let report = run_training(&cfg, &tcfg)?;
    let best = &report.candidates[report.fittest_trial];
    let weights = WeightsFile {
        task: cfg.task.clone(),
        theta: report.fittest.theta.clone(),
        seed: cfg.seed,
        meta: WeightsMeta {
            n_mc: tcfg.n_mc,
            fittest_trial: report.fittest_trial,
            success_rate: best.success_rate,
            mean_duration: if best.mean_duration.is_finite() {
                best.mean_duration
            } else {
                -1.0
            },
            intercept: report.traces[report.fittest_trial].intercept,
            iteration_norms: report.traces[report.fittest_trial].iteration_norms.clone(),
        },
    };
    std::fs::write(&args.out, weights.to_toml_string()?)?;
    println!(
        "trained {}: fittest trial {} of {}, success rate {:.2}, weights {:?}",
        cfg.task, report.fittest_trial, tcfg.n_mc, best.success_rate, report.fittest.theta
    );
    Ok(())
}

fn controller_from_flag(cfg: &TaskConfig, flag: Option<&str>, alpha: f64) -> Result<Controller> {
    match flag {
        None => Ok(Controller::Value(cfg.policy()?)),
        Some("boids") | Some("apf") => Ok(Controller::Baseline {
            name: flag.unwrap().to_string(),
            param: alpha,
        }),
        Some(method) => {
            let mut policy = cfg.policy()?;
            let parsed = pearl::config::parse_method(method)?;
            if parsed != policy.method {
                policy.method = parsed;
                // Method-appropriate defaults when the config section did
                // not pin them.
                if cfg.policy.is_none() {
                    match parsed {
                        pearl::PolicyMethod::Das => policy.samples_per_axis = 3,
                        pearl::PolicyMethod::Lsapa => {
                            policy.samples_per_axis = policy.samples_per_axis.max(100)
                        }
                        pearl::PolicyMethod::HootGrid => {}
                    }
                }
            }
            Ok(Controller::Value(policy))
        }
    }
}

pub struct TrialResult {
    pub trial: usize,
    pub trajectory: Trajectory,
    pub final_metric: f64,
}

/// Run one batch of closed-loop trials for a config. Library-level so the
/// CLI and tests share it.
pub fn run_plan_batch(
    cfg: &TaskConfig,
    theta: &WeightVector,
    controller: &Controller,
    trials: usize,
    horizon: f64,
    initial: Option<&[State]>,
) -> Result<Vec<TrialResult>> {
    let results = pool::run_trials(trials, |k| -> Result<TrialResult> {
        let mut task = cfg.build_task()?;
        let dist = cfg.disturbance(task.dynamics().action_dim())?;
        let mut rng = trial_rng(cfg.seed, k as u64);
        let s0 = match initial {
            Some(states) => states
                .get(k)
                .cloned()
                .ok_or_else(|| Error::InvalidArgument {
                    message: format!("initial-conditions file has no entry {k}"),
                })?,
            None => task.reset(&mut rng),
        };
        let trajectory = plan_trajectory(
            task.as_mut(),
            &s0,
            theta,
            controller,
            dist.as_ref(),
            horizon,
            &mut rng,
        )?;
        let t_end = trajectory.duration;
        let final_metric = task.goal_metric(&trajectory.final_state, t_end);
        Ok(TrialResult {
            trial: k,
            trajectory,
            final_metric,
        })
    });
    results.into_iter().collect()
}

fn write_trajectory_csv(path: &Path, traj: &Trajectory, d_s2: usize, d_a: usize) -> Result<()> {
    let mut columns: Vec<String> = vec!["t".into()];
    for k in 0..d_s2 {
        columns.push(format!("s{k}"));
    }
    for k in 0..d_a {
        columns.push(format!("a{k}"));
    }
    columns.push("v".into());
    columns.push("plan_ms".into());
    for k in 0..d_a {
        columns.push(format!("xi{k}"));
    }
    let mut csv = Csv::new(columns);
    for step in &traj.steps {
        let mut row: Vec<CsvCell> = Vec::with_capacity(3 + d_s2 + 2 * d_a);
        row.push(f(step.t));
        row.extend(step.state.iter().map(|&v| f(v)));
        row.extend(step.action.iter().map(|&v| f(v)));
        row.push(f(step.value));
        row.push(f(step.planning_ms));
        row.extend(step.xi.iter().map(|&v| f(v)));
        csv.row(&row);
    }
    std::fs::write(path, csv.finish())?;
    Ok(())
}

pub fn plan(args: PlanArgs) -> Result<()> {
    let mut cfg = TaskConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let theta = match &args.weights {
        Some(path) => {
            let wf = WeightsFile::from_path(path)?;
            wf.weight_vector()
        }
        None => cfg.weights(),
    };
    let controller = controller_from_flag(&cfg, args.policy.as_deref(), args.alpha)?;
    let horizon = args.horizon.unwrap_or_else(|| cfg.horizon());
    if horizon < 0.0 {
        return Err(Error::Config {
            field: "horizon".into(),
            message: "must be non-negative".into(),
        });
    }
    let initial = match &args.initial_conditions {
        Some(path) => {
            let file = InitialConditionsFile::from_path(path)?;
            Some(
                file.states
                    .into_iter()
                    .map(|spec| State::new(spec.coords))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        None => None,
    };
    let trials = match &initial {
        Some(states) => states.len().min(args.trials.max(1)).max(1),
        None => args.trials.max(1),
    };

    std::fs::create_dir_all(&args.out)?;
    let probe = cfg.build_task()?;
    let d_s2 = probe.dynamics().state_dim();
    let d_a = probe.dynamics().action_dim();
    drop(probe);

    let results = run_plan_batch(
        &cfg,
        &theta,
        &controller,
        trials,
        horizon,
        initial.as_deref(),
    )?;

    let mut summary = Csv::new(vec![
        "trial",
        "outcome",
        "success",
        "duration_s",
        "final_goal_metric",
        "steps",
        "mean_plan_ms",
    ]);
    let mut successes = 0usize;
    for r in &results {
        if r.trajectory.outcome.is_success() {
            successes += 1;
        }
        write_trajectory_csv(
            &args.out.join(format!("traj_{:03}.csv", r.trial)),
            &r.trajectory,
            d_s2,
            d_a,
        )?;
        summary.row(&[
            i(r.trial as i64),
            s(r.trajectory.outcome.label()),
            i(r.trajectory.outcome.is_success() as i64),
            f(r.trajectory.duration),
            f(r.final_metric),
            i(r.trajectory.steps.len() as i64),
            f(r.trajectory.mean_planning_ms()),
        ]);
    }
    std::fs::write(args.out.join("summary.csv"), summary.finish())?;
    println!(
        "planned {} trial(s): {} success(es), outputs in {}",
        results.len(),
        successes,
        args.out.display()
    );
    Ok(())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    if values.is_empty() {
        return f64::NAN;
    }
    values[values.len() / 2]
}

fn pursuit_step_times(agents: usize, steps: usize) -> Result<Vec<f64>> {
    let prey = PreyTrajectory::new(PreyKind::Spiral, 0.02, 0, steps as f64 * 0.02 + 5.0);
    let mut world = PursuitWorld::new(agents, 0.02, prey)?;
    let theta = world.published_weights();
    let mut rng = trial_rng(11, agents as u64);
    let s0 = world.reset(&mut rng);
    let controller = Controller::Value(PolicyConfig::das().with_lookahead(100));
    let traj = plan_trajectory(
        &mut world,
        &s0,
        &theta,
        &controller,
        None,
        steps as f64 * 0.02,
        &mut rng,
    )?;
    Ok(traj.steps.iter().skip(10).map(|st| st.planning_ms).collect())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let text = match args.suite.as_str() {
        "pursuit-scaling" => {
            let mut csv = Csv::new(vec!["row", "agents", "median_step_ms", "exponent", "r2"]);
            let sizes = [5usize, 10, 15, 20, 25];
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &agents in &sizes {
                let times = pursuit_step_times(agents, 200)?;
                let med = median(times);
                xs.push((agents as f64).ln());
                ys.push(med.ln());
                csv.row(&[
                    s("sample"),
                    i(agents as i64),
                    f(med),
                    CsvCell::Empty,
                    CsvCell::Empty,
                ]);
            }
            let (slope, _icpt, r2) = fit_line(&xs, &ys);
            csv.row(&[s("fit"), CsvCell::Empty, CsvCell::Empty, f(slope), f(r2)]);
            println!("pursuit-scaling: exponent {slope:.3}, r2 {r2:.3}");
            csv.finish()
        }
        "policy-timing" => {
            let mut csv = Csv::new(vec!["policy", "median_step_ms"]);
            let dist = GaussianDisturbance::uniform_axes(5, 1.0, 1.0)
                .map_err(|e| Error::NumericFailure {
                    message: e.to_string(),
                })?;
            for (name, controller) in [
                ("das", Controller::Value(PolicyConfig::das())),
                ("lsapa", Controller::Value(PolicyConfig::lsapa(100))),
                ("hoot-grid", Controller::Value(PolicyConfig::hoot())),
            ] {
                let mut world = RendezvousWorld::new(0.02)?;
                let theta = world.published_weights();
                let mut rng = trial_rng(13, 0);
                let s0 = world.reset(&mut rng);
                let traj = plan_trajectory(
                    &mut world,
                    &s0,
                    &theta,
                    &controller,
                    Some(&dist),
                    0.6,
                    &mut rng,
                )?;
                let med = median(traj.steps.iter().map(|st| st.planning_ms).collect());
                println!("policy-timing rendezvous {name}: {med:.3} ms/step");
                csv.row(&[s(name), f(med)]);
            }
            csv.finish()
        }
        "feature-scaling" => {
            let mut csv = Csv::new(vec!["row", "pos_dims", "median_eval_us", "exponent", "r2"]);
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &agents in &[5usize, 50, 500] {
                let prey = PreyTrajectory::new(PreyKind::Static, 0.02, 0, 1.0);
                let world = PursuitWorld::new(agents, 0.02, prey)?;
                let layout = StateLayout::homogeneous(agents, 2);
                let state = vec![0.25; layout.state_len()];
                let refs = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
                let reps = 2000usize / agents.min(100) + 5;
                let mut times = Vec::with_capacity(reps);
                let mut sink = 0.0;
                for _ in 0..reps {
                    let start = std::time::Instant::now();
                    let f_vec = world.features().features(&state, &refs);
                    sink += f_vec[0];
                    times.push(start.elapsed().as_secs_f64() * 1e6);
                }
                std::hint::black_box(sink);
                let med = median(times);
                let d_s = 2 * agents;
                xs.push((d_s as f64).ln());
                ys.push(med.ln());
                csv.row(&[
                    s("sample"),
                    i(d_s as i64),
                    f(med),
                    CsvCell::Empty,
                    CsvCell::Empty,
                ]);
            }
            let (slope, _icpt, r2) = fit_line(&xs, &ys);
            csv.row(&[s("fit"), CsvCell::Empty, CsvCell::Empty, f(slope), f(r2)]);
            println!("feature-scaling: exponent {slope:.3}, r2 {r2:.3}");
            csv.finish()
        }
        other => {
            return Err(Error::UnknownKind {
                what: "bench suite",
                got: other.to_string(),
            })
        }
    };
    std::fs::write(&args.out, text)?;
    Ok(())
}

fn parse_range(text: &str, field: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let err = |msg: &str| Error::Config {
        field: field.to_string(),
        message: msg.to_string(),
    };
    if parts.len() != 3 {
        return Err(err("expected lo:hi:count"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| err("bad lower bound"))?;
    let hi: f64 = parts[1].parse().map_err(|_| err("bad upper bound"))?;
    let count: usize = parts[2].parse().map_err(|_| err("bad count"))?;
    if count == 0 || hi < lo || lo < 0.0 {
        return Err(err("need 0 <= lo <= hi and count >= 1"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect())
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let cs = parse_range(&args.c_range, "c-range")?;
    let ds = parse_range(&args.d_range, "d-range")?;
    let mut csv = Csv::new(vec![
        "c",
        "d",
        "n_critical",
        "n_minima",
        "index",
        "x0",
        "kind",
    ]);
    for &c in &cs {
        for &d in &ds {
            let params = RestrictedValueParams::new(c, d)?;
            let points = critical_points(&params, (-10.0, 10.0));
            let n_minima = points
                .iter()
                .filter(|(_, k)| *k == ExtremumKind::Minimum)
                .count();
            for (index, (x0, kind)) in points.iter().enumerate() {
                let kind_name = match kind {
                    ExtremumKind::Minimum => "min",
                    ExtremumKind::Maximum => "max",
                    ExtremumKind::Inflection => "inflection",
                };
                csv.row(&[
                    f(c),
                    f(d),
                    i(points.len() as i64),
                    i(n_minima as i64),
                    i(index as i64),
                    f(*x0),
                    s(kind_name),
                ]);
            }
        }
    }
    std::fs::write(&args.out, csv.finish())?;
    Ok(())
}
