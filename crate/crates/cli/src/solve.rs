use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use tim_core::bounds::mais;
use tim_core::ia::{best_scheme, LadderConfig, Method, MethodSet, StageRecord};
use tim_core::io::{InstanceFile, SchemeFile};
use tim_core::Dof;

use crate::args::{Cli, InputArgs, LadderMethod, SolveArgs};
use crate::data::{is_stdout, json_line, load_sources, output};
use crate::error::CliResult;

#[derive(Serialize)]
struct BoundRecord {
    instance: String,
    mais_size: usize,
    #[serde(with = "tim_core::dof_serde")]
    bound: Dof,
    /// 1-based nodes inducing an acyclic subgraph of the complement.
    witness: Vec<usize>,
}

#[derive(Serialize)]
struct ErrorRecord {
    instance: String,
    error: String,
}

pub fn bound(args: &InputArgs) -> CliResult<()> {
    let mut out = output("-".as_ref())?;
    for source in load_sources(&args.inputs)? {
        for (instance, inst) in source.instances {
            let result = inst.and_then(|i| i.conflict_graph()).and_then(|g| mais(&g));
            match result {
                Ok(b) => json_line(
                    &mut out,
                    &BoundRecord {
                        instance,
                        mais_size: b.mais_size,
                        bound: b.bound(),
                        witness: b.witness.iter().map(|v| v + 1).collect(),
                    },
                )?,
                Err(e) => json_line(
                    &mut out,
                    &ErrorRecord {
                        instance,
                        error: e.to_string(),
                    },
                )?,
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveRecord {
    instance: String,
    k: usize,
    n: usize,
    #[serde(with = "tim_core::dof_serde")]
    dof: Dof,
    method: Method,
    #[serde(with = "tim_core::dof_serde")]
    bound: Dof,
    optimal: bool,
    stages: Vec<StageRecord>,
    scheme: SchemeFile,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Record {
    Solved(Box<SolveRecord>),
    Failed(ErrorRecord),
}

pub fn ladder_config(args: &SolveArgs, seed: u64) -> LadderConfig {
    let has = |m| args.methods.contains(&m);
    LadderConfig {
        max_b: args.max_b,
        methods: MethodSet {
            osia: has(LadderMethod::Osia),
            ovia: has(LadderMethod::Ovia),
            ssia: has(LadderMethod::Ssia),
            svia: has(LadderMethod::Svia),
            simo_vector: has(LadderMethod::SimoVector),
        },
        budget: (args.budget > 0).then_some(args.budget),
        trials: args.trials,
        seed,
    }
}

fn solve_one(
    instance: String,
    inst: tim_core::Result<InstanceFile>,
    n: Option<usize>,
    cfg: &LadderConfig,
) -> Record {
    let run = || -> tim_core::Result<SolveRecord> {
        let inst = inst?;
        let g = inst.conflict_graph()?;
        let n = n.or(inst.antennas()).unwrap_or(1);
        let r = best_scheme(&g, n, cfg)?;
        Ok(SolveRecord {
            instance: instance.clone(),
            k: g.node_count(),
            n,
            dof: r.dof,
            method: r.method(),
            bound: r.bound.bound(),
            optimal: r.reaches_bound(),
            scheme: SchemeFile::from(&r.scheme),
            stages: r.stages,
        })
    };
    match run() {
        Ok(rec) => Record::Solved(Box::new(rec)),
        Err(e) => Record::Failed(ErrorRecord {
            instance,
            error: e.to_string(),
        }),
    }
}

/// One row of the proportions table: a source and its attribution shares.
struct Row {
    source: String,
    instances: usize,
    errors: usize,
    methods: Vec<Method>,
    reach: usize,
}

pub fn solve(args: &SolveArgs, cli: &Cli) -> CliResult<()> {
    let cfg = ladder_config(args, cli.seed);
    let sources = load_sources(&args.input.inputs)?;
    let mut out = output(&args.out)?;
    json_line(&mut out, &serde_json::json!({ "config": cli, "ladder": cfg }))?;

    let mut rows = Vec::new();
    let mut columns = BTreeSet::from([Method::Tdma]);
    for source in sources {
        let records: Vec<Record> = source
            .instances
            .into_par_iter()
            .map(|(name, inst)| solve_one(name, inst, args.n, &cfg))
            .collect();
        let mut row = Row {
            source: source.path.display().to_string(),
            instances: records.len(),
            errors: 0,
            methods: Vec::new(),
            reach: 0,
        };
        for rec in &records {
            json_line(&mut out, rec)?;
            match rec {
                Record::Solved(s) => {
                    columns.extend(s.stages.iter().map(|st| st.method));
                    row.methods.push(s.method);
                    row.reach += usize::from(s.optimal);
                }
                Record::Failed(_) => row.errors += 1,
            }
        }
        if row.instances > 0 {
            rows.push(row);
        }
    }
    out.flush()?;
    drop(out);

    let columns: Vec<Method> = columns.into_iter().collect();
    let table = render_table(&rows, &columns);
    if is_stdout(&args.out) {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    if let Some(path) = &args.table {
        write_table_csv(path, &rows, &columns)?;
    }
    Ok(())
}

fn share(row: &Row, m: Method) -> f64 {
    let solved = row.methods.len();
    if solved == 0 {
        return 0.0;
    }
    100.0 * row.methods.iter().filter(|&&x| x == m).count() as f64 / solved as f64
}

fn reach_share(row: &Row) -> f64 {
    if row.methods.is_empty() {
        0.0
    } else {
        100.0 * row.reach as f64 / row.methods.len() as f64
    }
}

fn render_table(rows: &[Row], columns: &[Method]) -> String {
    let mut s = format!("{:<32} {:>9} {:>6}", "source", "instances", "errors");
    for m in columns {
        s.push_str(&format!(" {:>11}", m.as_str()));
    }
    s.push_str(&format!(" {:>11}\n", "reach-bound"));
    for row in rows {
        s.push_str(&format!("{:<32} {:>9} {:>6}", row.source, row.instances, row.errors));
        for &m in columns {
            s.push_str(&format!(" {:>10.1}%", share(row, m)));
        }
        s.push_str(&format!(" {:>10.1}%\n", reach_share(row)));
    }
    s
}

fn write_table_csv(path: &std::path::Path, rows: &[Row], columns: &[Method]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["source".to_string(), "instances".into(), "errors".into()];
    header.extend(columns.iter().map(|m| m.as_str().to_string()));
    header.push("reach_bound".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.source.clone(), row.instances.to_string(), row.errors.to_string()];
        rec.extend(columns.iter().map(|&m| format!("{:.4}", share(row, m) / 100.0)));
        rec.push(format!("{:.4}", reach_share(row) / 100.0));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
