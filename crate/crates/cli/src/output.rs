use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::args::Format;

/// Parameters, seed, version, outputs and timing of one run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub subcommand: &'a str,
    pub parameters: &'a P,
    pub master_seed: u64,
    pub tool_version: &'static str,
    pub outputs: Vec<PathBuf>,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest<P: Serialize>(path: &Path, manifest: &RunManifest<'_, P>) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(f), manifest)?;
    Ok(())
}

/// Destination of the main output.
pub struct Sink {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Sink {
    pub fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    /// Rows as CSV, or `doc` as pretty JSON.
    pub fn emit<R: Serialize, D: Serialize>(&self, rows: &[R], doc: &D) -> Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => {
                let mut c = csv::Writer::from_writer(&mut w);
                for r in rows {
                    c.serialize(r)?;
                }
                c.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, doc)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
