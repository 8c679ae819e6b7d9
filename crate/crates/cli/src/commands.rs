use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;

use swapfl_core::generators::{
    gen_gabriel, gen_grid_city, verify_scaling_law, CbdCount, GabrielParams, GridCityParams,
};
use swapfl_core::instance::{exact_solve_with, export_ilp, io, ExactConfig};
use swapfl_core::pmp::{
    density_init, greedy_addition, kmeans_baseline, maranzana, optimality_gap, random_init,
    solve_pmp,
};
use swapfl_core::rlenv::{record_expert_to_file, serve_stdio, EnvServer};
use swapfl_core::rng::derive_seed;
use swapfl_core::swap::{GreedySwapAgent, PolicyAgent, RandomSwapAgent, VscaAgent};
use swapfl_core::{
    objective, swap_relocate, Initializer, Instance, InstanceError, PmpResult, RelocationPlan,
    SwapAgent,
};

use crate::report::{BenchReport, BenchRow, Metric};
use crate::{Command, Format, InitKind, Kind, PolicyArgs, RelocMethod, SolveMethod, Task};

const SCALING_BAND: (f64, f64) = (0.5, 0.85);

pub(crate) fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate {
            kind,
            width,
            n,
            cbds,
            knn,
            count,
            seed,
            out: dir,
        } => generate(kind, width, n, cbds, knn, count, seed, &dir, out),
        Command::Relocate {
            instance,
            p,
            f0,
            k,
            method,
            trials,
            seed,
            policy,
            format,
        } => {
            let inst = load(&instance)?;
            let f0 = match (f0, p) {
                (Some(f0), _) => f0,
                (None, Some(p)) => density_init(&inst, p, seed)?,
                (None, None) => bail!("either --p or --f0 is required"),
            };
            let k = k.unwrap_or((f0.len() / 2).max(1));
            let mut agent = reloc_agent(method, seed, &policy)?;
            let start = Instant::now();
            let plan = swap_relocate(&inst, &f0, k, &mut agent, trials, seed)?;
            let runtime = start.elapsed().as_secs_f64();
            print_plan(&plan, runtime, format, out)
        }
        Command::Solve {
            instance,
            p,
            method,
            trials,
            swaps,
            init,
            seed,
            cap,
            policy,
            format,
        } => {
            let inst = load(&instance)?;
            let opts = SolveOpts {
                trials,
                swaps,
                init,
                cap,
                policy,
            };
            let mut result = solve(&inst, p, method, seed, &opts)?;
            if result.gap.is_none() {
                if let Ok(opt) = exact_solve_with(
                    &inst,
                    p,
                    &ExactConfig {
                        max_combinations: cap,
                    },
                ) {
                    result = result.with_gap(opt.objective);
                }
            }
            print_result(&result, format, out)
        }
        Command::Bench {
            corpus,
            task,
            methods,
            p,
            k,
            trials,
            swaps,
            seed,
            cap,
            policy,
            format,
            out: path,
        } => {
            let instances = load_corpus(&corpus)?;
            let opts = SolveOpts {
                trials,
                swaps,
                init: InitKind::Density,
                cap,
                policy,
            };
            let report = bench(&instances, task, methods, p, k, seed, &opts)?;
            if let Some(path) = path {
                fs::write(&path, report.to_rows())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                Format::Table => write!(out, "{}", report.to_table())?,
                Format::Rows => write!(out, "{}", report.to_rows())?,
            }
            Ok(())
        }
        Command::ExportIlp {
            instance,
            p,
            out: path,
        } => {
            let inst = load(&instance)?;
            export_ilp(&inst, p, &path)?;
            writeln!(out, "wrote {} (n = {}, p = {p})", path.display(), inst.n())?;
            Ok(())
        }
        Command::RecordExpert {
            corpus,
            p,
            k,
            seed,
            out: path,
        } => {
            let instances = load_corpus(&corpus)?;
            let k = k.unwrap_or((p / 2).max(1));
            let steps = record_expert_to_file(&instances, p, k, seed, &path)?;
            writeln!(
                out,
                "wrote {} trajectories ({steps} steps) to {}",
                instances.len(),
                path.display()
            )?;
            Ok(())
        }
        Command::Serve { listen, stdio } => {
            if stdio {
                serve_stdio()?;
            } else {
                let server = EnvServer::bind(listen.as_str())
                    .with_context(|| format!("binding {listen}"))?;
                eprintln!("swapfl env server listening on {}", server.local_addr());
                server.wait();
            }
            Ok(())
        }
        Command::VerifyScaling {
            instance,
            p,
            method,
            trials,
            seed,
            policy,
        } => {
            let inst = load(&instance)?;
            let opts = SolveOpts {
                trials,
                swaps: None,
                init: InitKind::Density,
                cap: 0,
                policy,
            };
            let result = solve(&inst, p, method, seed, &opts)?;
            let fit = verify_scaling_law(&inst, &result.facilities)?;
            let pass = (SCALING_BAND.0..=SCALING_BAND.1).contains(&fit.slope);
            writeln!(out, "method     {}", result.method)?;
            writeln!(out, "cells      {}", fit.cells)?;
            writeln!(out, "slope      {:.4}", fit.slope)?;
            writeln!(out, "intercept  {:.4}", fit.intercept)?;
            writeln!(out, "r2         {:.4}", fit.r2)?;
            writeln!(
                out,
                "{} slope {} [{}, {}] (theory 2/3)",
                if pass { "PASS" } else { "FAIL" },
                if pass { "within" } else { "outside" },
                SCALING_BAND.0,
                SCALING_BAND.1
            )?;
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: Kind,
    width: usize,
    n: usize,
    cbds: Option<u8>,
    knn: usize,
    count: usize,
    seed: u64,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    ensure!(count > 0, "--count must be at least 1");
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for i in 0..count as u64 {
        let s = seed + i;
        let inst = match kind {
            Kind::Grid => gen_grid_city(&GridCityParams {
                width,
                n_cbds: cbds.map_or(CbdCount::Random, CbdCount::Fixed),
                seed: s,
                ..Default::default()
            })?,
            Kind::Gabriel => gen_gabriel(&GabrielParams {
                n,
                knn,
                seed: s,
                ..Default::default()
            })?,
        };
        let name = match kind {
            Kind::Grid => format!("grid_{}_{s:06}.swapfl", inst.n()),
            Kind::Gabriel => format!("gabriel_{}_{s:06}.swapfl", inst.n()),
        };
        let path = dir.join(name);
        io::save(&inst, &path)?;
        writeln!(
            out,
            "{}\tn={}\tedges={}\tseed={s}",
            path.display(),
            inst.n(),
            inst.graph().edges().len()
        )?;
    }
    Ok(())
}

fn load(path: &Path) -> Result<Instance> {
    io::load(path).with_context(|| format!("loading instance {}", path.display()))
}

/// Loads every `*.swapfl` file of `dir` in name order.
fn load_corpus(dir: &Path) -> Result<Vec<Instance>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading corpus {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "swapfl"))
        .collect();
    paths.sort();
    ensure!(
        !paths.is_empty(),
        "corpus {} contains no .swapfl files",
        dir.display()
    );
    paths.iter().map(|p| load(p)).collect()
}

fn connect_policy(policy: &PolicyArgs) -> Result<Box<dyn SwapAgent + Send>> {
    let endpoint = policy
        .endpoint
        .as_deref()
        .ok_or(swapfl_core::SwapError::Connect {
            endpoint: "<unset>".into(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("no endpoint given and {} is unset", crate::ENDPOINT_ENV),
            ),
        })?;
    let timeout = Duration::from_secs_f64(policy.timeout.max(0.001));
    Ok(Box::new(PolicyAgent::connect(endpoint, timeout)?))
}

fn reloc_agent(
    method: RelocMethod,
    seed: u64,
    policy: &PolicyArgs,
) -> Result<Box<dyn SwapAgent + Send>> {
    Ok(match method {
        RelocMethod::Greedy => Box::new(GreedySwapAgent),
        RelocMethod::Vsca => Box::new(VscaAgent),
        RelocMethod::Random => Box::new(RandomSwapAgent::new(seed)),
        RelocMethod::Policy => connect_policy(policy)?,
    })
}

pub(crate) struct SolveOpts {
    trials: usize,
    swaps: Option<usize>,
    init: InitKind,
    cap: u64,
    policy: PolicyArgs,
}

fn solve(
    inst: &Instance,
    p: usize,
    method: SolveMethod,
    seed: u64,
    opts: &SolveOpts,
) -> Result<PmpResult> {
    let init = match opts.init {
        InitKind::Density => Initializer::Density,
        InitKind::Random => Initializer::Random,
    };
    let swap_with = |mut agent: Box<dyn SwapAgent + Send>| -> Result<PmpResult> {
        Ok(solve_pmp(
            inst,
            p,
            &mut agent,
            opts.trials,
            opts.swaps,
            init,
            seed,
        )?)
    };
    Ok(match method {
        SolveMethod::Exact => {
            let start = Instant::now();
            let sol = exact_solve_with(
                inst,
                p,
                &ExactConfig {
                    max_combinations: opts.cap,
                },
            )?;
            PmpResult {
                facilities: sol.facilities,
                objective: sol.objective,
                gap: Some(0.0),
                runtime: start.elapsed().as_secs_f64(),
                method: "exact".into(),
                trials: 1,
            }
        }
        SolveMethod::GreedySwap => swap_with(Box::new(GreedySwapAgent))?,
        SolveMethod::Vsca => swap_with(Box::new(VscaAgent))?,
        SolveMethod::RandomSwap => swap_with(Box::new(RandomSwapAgent::new(seed)))?,
        SolveMethod::Policy => swap_with(connect_policy(&opts.policy)?)?,
        SolveMethod::GreedyAddition => greedy_addition(inst, p)?,
        SolveMethod::KMeans => kmeans_baseline(inst, p, seed)?,
        SolveMethod::Maranzana => maranzana(inst, &density_init(inst, p, seed)?)?,
        SolveMethod::Random => {
            let start = Instant::now();
            let f = random_init(inst, p, seed)?;
            let objective = objective(inst, &f)?;
            PmpResult {
                facilities: f,
                objective,
                gap: None,
                runtime: start.elapsed().as_secs_f64(),
                method: "random".into(),
                trials: 1,
            }
        }
    })
}

fn solve_method_name(m: SolveMethod) -> &'static str {
    match m {
        SolveMethod::Exact => "exact",
        SolveMethod::GreedySwap => "greedy-swap",
        SolveMethod::Vsca => "vsca",
        SolveMethod::RandomSwap => "random-swap",
        SolveMethod::Policy => "policy",
        SolveMethod::GreedyAddition => "greedy-addition",
        SolveMethod::KMeans => "k-means",
        SolveMethod::Maranzana => "maranzana",
        SolveMethod::Random => "random",
    }
}

fn reloc_method_name(m: RelocMethod) -> &'static str {
    match m {
        RelocMethod::Greedy => "greedy-swap",
        RelocMethod::Vsca => "vsca",
        RelocMethod::Random => "random-swap",
        RelocMethod::Policy => "policy",
    }
}

fn dataset_name(instances: &[Instance]) -> String {
    let first = &instances[0];
    let family = match first.meta().generator.as_str() {
        "grid" => "Grid",
        "gabriel" => "Gabriel",
        "" => "Custom",
        other => other,
    };
    let same_n = instances.iter().all(|i| i.n() == first.n());
    if same_n {
        format!("{family}_{}", first.n())
    } else {
        format!("{family}_mixed")
    }
}

fn bench(
    instances: &[Instance],
    task: Task,
    methods: Option<Vec<String>>,
    p: usize,
    k: Option<usize>,
    seed: u64,
    opts: &SolveOpts,
) -> Result<BenchReport> {
    use clap::ValueEnum;
    let dataset = dataset_name(instances);
    let n = instances[0].n();
    let mut rows = Vec::new();
    match task {
        Task::Pmp => {
            let methods: Vec<SolveMethod> = match methods {
                Some(names) => names
                    .iter()
                    .map(|m| {
                        SolveMethod::from_str(m, true)
                            .map_err(|e| anyhow::anyhow!("unknown method {m:?}: {e}"))
                    })
                    .collect::<Result<_>>()?,
                None => SolveMethod::value_variants()
                    .iter()
                    .copied()
                    .filter(|m| !matches!(m, SolveMethod::Policy | SolveMethod::Exact))
                    .collect(),
            };
            // The oracle is excluded from the timings.
            let config = ExactConfig {
                max_combinations: opts.cap,
            };
            let optima: Vec<Option<f64>> = instances
                .par_iter()
                .map(|inst| match exact_solve_with(inst, p, &config) {
                    Ok(sol) => Ok(Some(sol.objective)),
                    Err(InstanceError::CombinationCap { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_, _>>()?;
            for method in methods {
                let results: Vec<PmpResult> = instances
                    .par_iter()
                    .enumerate()
                    .map(|(i, inst)| solve(inst, p, method, derive_seed(seed, i as u64), opts))
                    .collect::<Result<_>>()?;
                let gaps: Option<Vec<f64>> = results
                    .iter()
                    .zip(&optima)
                    .map(|(r, o)| o.map(|o| optimality_gap(r.objective, o)))
                    .collect();
                rows.push(BenchRow {
                    dataset: dataset.clone(),
                    n,
                    p,
                    method: solve_method_name(method).into(),
                    metric: Metric::Gap,
                    value: gaps.map(|g| 100.0 * mean(&g)),
                    mean_objective: mean(&results.iter().map(|r| r.objective).collect::<Vec<_>>()),
                    runtime: mean(&results.iter().map(|r| r.runtime).collect::<Vec<_>>()),
                    instances: instances.len(),
                    seed,
                });
            }
        }
        Task::Frp => {
            let methods: Vec<RelocMethod> = match methods {
                Some(names) => names
                    .iter()
                    .map(|m| {
                        RelocMethod::from_str(m, true)
                            .map_err(|e| anyhow::anyhow!("unknown method {m:?}: {e}"))
                    })
                    .collect::<Result<_>>()?,
                None => vec![RelocMethod::Random, RelocMethod::Greedy, RelocMethod::Vsca],
            };
            let k = k.unwrap_or((p / 2).max(1));
            for method in methods {
                let runs: Vec<(RelocationPlan, f64)> = instances
                    .par_iter()
                    .enumerate()
                    .map(|(i, inst)| {
                        let s = derive_seed(seed, i as u64);
                        let f0 = density_init(inst, p, s)?;
                        let mut agent = reloc_agent(method, s, &opts.policy)?;
                        let start = Instant::now();
                        let plan = swap_relocate(inst, &f0, k, &mut agent, opts.trials, s)?;
                        Ok((plan, start.elapsed().as_secs_f64()))
                    })
                    .collect::<Result<_>>()?;
                rows.push(BenchRow {
                    dataset: dataset.clone(),
                    n,
                    p,
                    method: reloc_method_name(method).into(),
                    metric: Metric::Q,
                    value: Some(
                        100.0
                            * mean(
                                &runs
                                    .iter()
                                    .map(|r| r.0.improvement_ratio)
                                    .collect::<Vec<_>>(),
                            ),
                    ),
                    mean_objective: mean(
                        &runs.iter().map(|r| r.0.final_objective).collect::<Vec<_>>(),
                    ),
                    runtime: mean(&runs.iter().map(|r| r.1).collect::<Vec<_>>()),
                    instances: instances.len(),
                    seed,
                });
            }
        }
    }
    Ok(BenchReport { rows })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn join(ids: &[usize]) -> String {
    if ids.is_empty() {
        return "-".into();
    }
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn print_plan(
    plan: &RelocationPlan,
    runtime: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    if format == Format::Rows {
        let mut v = serde_json::to_value(plan)?;
        v["runtime"] = serde_json::json!(runtime);
        writeln!(out, "{v}")?;
        return Ok(());
    }
    writeln!(out, "method      {}", plan.method)?;
    writeln!(out, "F0          {}", join(&plan.base_facilities))?;
    writeln!(out, "removed     {}", join(&plan.removed))?;
    writeln!(out, "inserted    {}", join(&plan.inserted))?;
    writeln!(out, "facilities  {}", join(&plan.facilities))?;
    writeln!(
        out,
        "objective   {:.6} -> {:.6}",
        plan.base_objective, plan.final_objective
    )?;
    writeln!(out, "Q           {:.4}%", 100.0 * plan.improvement_ratio)?;
    writeln!(out, "budget      k = {}, T = {}", plan.budget, plan.trials)?;
    writeln!(out, "runtime     {runtime:.4}s")?;
    if plan.removed.is_empty() {
        let stopped = plan.log.iter().any(|s| s.swap.is_none());
        writeln!(
            out,
            "{}",
            if stopped {
                "no move possible"
            } else {
                "no improving relocation found"
            }
        )?;
    }
    writeln!(out, "restart  step  u1  u2  delta  accepted")?;
    for s in &plan.log {
        match s.swap {
            Some((u1, u2)) => writeln!(
                out,
                "{:>7}  {:>4}  {u1}  {u2}  {:.6}  {}",
                s.restart, s.step, s.delta, s.accepted
            )?,
            None => writeln!(out, "{:>7}  {:>4}  stop", s.restart, s.step)?,
        }
    }
    Ok(())
}

fn print_result(result: &PmpResult, format: Format, out: &mut dyn Write) -> Result<()> {
    if format == Format::Rows {
        writeln!(out, "{}", serde_json::to_string(result)?)?;
        return Ok(());
    }
    writeln!(out, "method      {}", result.method)?;
    writeln!(out, "facilities  {}", join(&result.facilities))?;
    writeln!(out, "objective   {:.6}", result.objective)?;
    match result.gap {
        Some(g) => writeln!(out, "gap         {:.4}%", 100.0 * g)?,
        None => writeln!(
            out,
            "gap         n/a (exact oracle over the combination cap)"
        )?,
    }
    writeln!(out, "trials      {}", result.trials)?;
    writeln!(out, "runtime     {:.4}s", result.runtime)?;
    Ok(())
}
