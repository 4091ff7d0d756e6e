use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use tim_core::agent::{rollout_best_of, train, Checkpoint, TrainConfig};
use tim_core::coloring::{is_proper, sli_greedy, tabucol};
use tim_core::env::{Env, EnvConfig};
use tim_core::graph::UndirectedGraph;
use tim_core::io::{read_json, write_json};

use crate::args::{Cli, EnvArgs, EvalArgs, InputArgs, TrainArgs};
use crate::data::{load_sources, manifest_chi};
use crate::error::{CliError, CliResult};

struct ColoringSet {
    graphs: Vec<UndirectedGraph>,
    chi: Option<usize>,
}

fn load_graphs(input: &InputArgs) -> CliResult<ColoringSet> {
    let mut graphs = Vec::new();
    let mut chi = None;
    for source in load_sources(&input.inputs)? {
        if let Some(c) = manifest_chi(&source) {
            if chi.is_some_and(|x| x != c) {
                return Err(CliError::Usage("inputs mix chromatic numbers".into()));
            }
            chi = Some(c);
        }
        for (name, inst) in source.instances {
            let g = inst
                .and_then(|i| i.conflict_graph())
                .map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
            graphs.push(g.underlying_undirected());
        }
    }
    if graphs.is_empty() {
        return Err(CliError::Usage("no graphs in the inputs".into()));
    }
    Ok(ColoringSet { graphs, chi })
}

fn palette(env: &EnvArgs, set: &ColoringSet) -> CliResult<usize> {
    env.colors
        .or(set.chi)
        .ok_or_else(|| CliError::Usage("pass --colors: the inputs record no chromatic number".into()))
}

fn env_config(env: &EnvArgs) -> EnvConfig {
    EnvConfig {
        limit: env.limit,
        beta: env.beta,
    }
}

fn envs(set: &ColoringSet, s: usize, cfg: EnvConfig) -> CliResult<Vec<Env>> {
    Ok(set
        .graphs
        .iter()
        .map(|u| Env::coloring(u, s, cfg))
        .collect::<tim_core::Result<_>>()?)
}

pub fn run_train(args: &TrainArgs, cli: &Cli) -> CliResult<()> {
    let set = load_graphs(&args.input)?;
    let s = palette(&args.env, &set)?;
    let envs = envs(&set, s, env_config(&args.env))?;
    let cfg = TrainConfig {
        iterations: args.iterations,
        episodes_per_iteration: args.episodes,
        hidden: args.hidden,
        seed: cli.seed,
        ..TrainConfig::default()
    };
    eprintln!("{}", serde_json::json!({ "config": cli, "train": cfg, "colors": s }));
    let start = Instant::now();
    let (params, log) = train(&envs, &cfg)?;
    let mut checkpoint = params.to_checkpoint();
    checkpoint.config = Some(cfg);
    write_json(&args.checkpoint, &checkpoint)?;
    if let Some(path) = &args.log {
        let mut w = csv::Writer::from_path(path)?;
        for row in &log {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let last = log.last().map_or(0.0, |r| r.mean_return);
    eprintln!(
        "trained {} iterations on {} graphs in {:.1}s; last mean return {last:.3}",
        log.len(),
        envs.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: &'static str,
    /// Share of graphs colored with the palette size.
    pub ratio: f64,
    /// Summed per-graph wall time.
    pub time_s: f64,
}

#[derive(Serialize)]
struct EvalReport<'a> {
    config: &'a Cli,
    graphs: usize,
    nodes: usize,
    colors: usize,
    results: Vec<MethodResult>,
}

pub fn run_eval(args: &EvalArgs, cli: &Cli) -> CliResult<()> {
    let set = load_graphs(&args.input)?;
    let checkpoint: Checkpoint = read_json(&args.checkpoint)?;
    let s = args.env.colors.or(set.chi).unwrap_or(checkpoint.palette);
    if s != checkpoint.palette {
        return Err(CliError::Usage(format!(
            "checkpoint palette {} does not match {s} colors",
            checkpoint.palette
        )));
    }
    let params = checkpoint.into_params()?;
    let envs = envs(&set, s, env_config(&args.env))?;
    if args.rollouts == 0 {
        return Err(CliError::Usage("--rollouts must be positive".into()));
    }

    // (solved, seconds) for LCG, SLI and TabuCol on each graph.
    let per_graph: Vec<[(bool, f64); 3]> = envs
        .par_iter()
        .zip(&set.graphs)
        .enumerate()
        .map(|(i, (env, u))| {
            let seed = cli.seed.wrapping_add(i as u64);
            let t = Instant::now();
            let lcg = rollout_best_of(env, &params, args.rollouts, seed)?;
            let lcg_ok = lcg.best.is_some_and(|(_, st)| is_proper(u, &st.node_state));
            let lcg_t = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let sli_ok = sli_greedy(u, seed).distinct_colors() <= s;
            let sli_t = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let tabu_ok = tabucol(u, s, args.tabu_iters, seed).is_some();
            let tabu_t = t.elapsed().as_secs_f64();
            Ok([(lcg_ok, lcg_t), (sli_ok, sli_t), (tabu_ok, tabu_t)])
        })
        .collect::<tim_core::Result<_>>()?;

    let n = per_graph.len() as f64;
    let results: Vec<MethodResult> = ["LCG", "SLI", "TabuCol"]
        .into_iter()
        .enumerate()
        .map(|(m, method)| MethodResult {
            method,
            ratio: per_graph.iter().filter(|r| r[m].0).count() as f64 / n,
            time_s: per_graph.iter().map(|r| r[m].1).sum(),
        })
        .collect();
    let nodes = set.graphs[0].node_count();
    let report = EvalReport {
        config: cli,
        graphs: per_graph.len(),
        nodes,
        colors: s,
        results,
    };

    print!("{:>6} {:>4}", "|V|", "S");
    for r in &report.results {
        print!(" {:>13} {:>9}", format!("{} ratio", r.method), "time (s)");
    }
    println!();
    print!("{nodes:>6} {s:>4}");
    for r in &report.results {
        print!(" {:>13.2} {:>9.2}", r.ratio, r.time_s);
    }
    println!();
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(())
}
