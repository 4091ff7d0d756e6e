use std::io::Write;

use serde::Serialize;
use tim_core::ia::verify;
use tim_core::io::{
    load_instance, read_json, to_dot, to_dot_labeled, write_json, ColoringFile, InstanceFile,
    SchemeFile,
};

use crate::args::{ExportArgs, VerifyArgs};
use crate::data::{json_line, output};
use crate::error::{CliError, CliResult};

pub fn run_verify(args: &VerifyArgs, seed: u64) -> CliResult<()> {
    let g = load_instance(&args.instance)?;
    let file: SchemeFile = read_json(&args.scheme)?;
    let scheme = file.into_scheme(g.node_count())?;
    let report = verify(&g, &scheme, args.trials, seed)?;
    json_line(&mut output("-".as_ref())?, &report)?;
    if report.valid {
        Ok(())
    } else {
        let nodes: Vec<String> = report
            .violations(scheme.b)
            .iter()
            .map(usize::to_string)
            .collect();
        Err(CliError::Invalid(format!(
            "invalid scheme: rank condition fails at node(s) {}",
            nodes.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct Export {
    instance: InstanceFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    scheme: Option<SchemeFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring: Option<ColoringFile>,
}

pub fn run_export(args: &ExportArgs) -> CliResult<()> {
    let g = load_instance(&args.instance)?;
    let k = g.node_count();
    let scheme_file: Option<SchemeFile> = args.scheme.as_ref().map(read_json).transpose()?;
    let coloring: Option<ColoringFile> = args.coloring.as_ref().map(read_json).transpose()?;
    let dot = match (&scheme_file, &coloring) {
        (Some(file), _) => to_dot(&g, Some(&file.clone().into_scheme(k)?)),
        (None, Some(c)) => {
            let labels = (1..=k)
                .map(|v| {
                    c.colors
                        .get(&v)
                        .map(|x| format!("color {x}"))
                        .ok_or(tim_core::Error::Unassigned(v))
                })
                .collect::<tim_core::Result<Vec<_>>>()?;
            to_dot_labeled(&g, Some(&labels))
        }
        (None, None) => to_dot(&g, None),
    };
    let mut out = output(&args.out)?;
    out.write_all(dot.as_bytes())?;
    out.flush()?;
    if let Some(path) = &args.json {
        let export = Export {
            instance: InstanceFile::from_graph(&g),
            scheme: scheme_file,
            coloring,
        };
        write_json(path, &export)?;
    }
    Ok(())
}
