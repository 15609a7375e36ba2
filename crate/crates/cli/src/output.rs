//! CSV artifacts and the JSON run summary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use bh_core::io::{write_csv, Cell};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Command, Params};
use crate::error::CliError;

/// Bumped whenever a CSV header or column meaning changes.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Run {
    command: Command,
    out: Option<PathBuf>,
    artifacts: Map<String, Value>,
    results: Map<String, Value>,
    start: Instant,
}

impl Run {
    pub fn new(command: Command, out: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(dir) = &out {
            fs::create_dir_all(dir)?;
        }
        Ok(Self { command, out, artifacts: Map::new(), results: Map::new(), start: Instant::now() })
    }

    fn file_name(&self, part: &str, ext: &str) -> String {
        if part.is_empty() {
            format!("{}.{ext}", self.command.name())
        } else {
            format!("{}.{part}.{ext}", self.command.name())
        }
    }

    /// Write `<command>[.part].csv` into the output directory, if there is one.
    pub fn csv<R: AsRef<[Cell]>>(
        &mut self,
        part: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = R>,
    ) -> Result<(), CliError> {
        let name = self.file_name(part, "csv");
        if let Some(dir) = &self.out {
            let path = dir.join(&name);
            write_csv(BufWriter::new(File::create(&path)?), header, rows)?;
            println!("wrote {}", path.display());
        }
        self.artifacts.insert(name, Value::String(header.join(",")));
        Ok(())
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Write `<command>.summary.json` (or print it without an output
    /// directory). `params` must hold the resolved configuration.
    pub fn finish(self, params: &Params) -> Result<Value, CliError> {
        let mut config = serde_json::to_value(params)?;
        if let Value::Object(m) = &mut config {
            m.insert("command".into(), Value::String(self.command.name().into()));
        }
        let summary = json!({
            "command": self.command.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "seed": params.seed,
            "threads": rayon::current_num_threads(),
            "wall_time_s": self.start.elapsed().as_secs_f64(),
            "artifacts": self.artifacts,
            "results": self.results,
        });
        let text = serde_json::to_string_pretty(&summary)?;
        match &self.out {
            Some(dir) => {
                let path = dir.join(self.file_name("summary", "json"));
                fs::write(&path, text + "\n")?;
                println!("wrote {}", path.display());
            }
            None => println!("{text}"),
        }
        Ok(summary)
    }
}
