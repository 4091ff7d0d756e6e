//! Command inputs: dataset directories and single instance files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tim_core::datasets::{read_dataset, Manifest, MANIFEST};
use tim_core::io::{read_json, InstanceFile};

use crate::error::{CliError, CliResult};

/// One command-line input: a dataset directory or a lone instance file.
pub struct Source {
    pub path: PathBuf,
    pub manifest: Option<Manifest>,
    /// Display name and parsed contents of each instance, in order.
    pub instances: Vec<(String, tim_core::Result<InstanceFile>)>,
}

pub fn load_sources(paths: &[PathBuf]) -> CliResult<Vec<Source>> {
    paths.iter().map(|p| load_source(p)).collect()
}

fn load_source(path: &Path) -> CliResult<Source> {
    if path.is_dir() {
        if !path.join(MANIFEST).is_file() {
            return Err(CliError::Usage(format!("{}: no {MANIFEST}", path.display())));
        }
        let (manifest, instances) = read_dataset(path)?;
        let instances = instances
            .into_iter()
            .map(|(name, inst)| (path.join(name).display().to_string(), inst))
            .collect();
        Ok(Source {
            path: path.to_path_buf(),
            manifest: Some(manifest),
            instances,
        })
    } else if path.is_file() {
        Ok(Source {
            path: path.to_path_buf(),
            manifest: None,
            instances: vec![(path.display().to_string(), read_json(path))],
        })
    } else {
        Err(CliError::Usage(format!("{}: no such file or directory", path.display())))
    }
}

/// The chromatic number a dataset was generated for, if recorded.
pub fn manifest_chi(source: &Source) -> Option<usize> {
    source
        .manifest
        .as_ref()?
        .params
        .get("chi")?
        .as_u64()
        .map(|c| c as usize)
}

/// A file, or stdout for `-`.
pub fn output(path: &Path) -> CliResult<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

pub fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer(&mut *out, value).map_err(tim_core::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}
