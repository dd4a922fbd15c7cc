//! CSV tables, density-matrix snapshots and run manifests.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use surfnoise::lindblad::Trajectory;

use crate::config::Config;
use crate::error::CliError;
use crate::validity::ValidityReport;

/// Scientific notation with 12 significant digits.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Every state of `traj` as a block headed `# t = <time>`, one matrix row per
/// line, entries `re,im` separated by single spaces.
pub fn snapshots(traj: &Trajectory) -> String {
    let mut out = String::new();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        out.push_str(&format!("# t = {}\n", num(*t)));
        let m = s.matrix();
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{},{}", num(m[(i, j)].re), num(m[(i, j)].im))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Files and scalar results of one command.
#[derive(Debug, Default)]
pub struct Output {
    pub tables: Vec<(String, Table)>,
    pub texts: Vec<(String, String)>,
    pub results: Map<String, Value>,
    /// Relaxation or decoherence rate used in the Markov check.
    pub relaxation_rate: Option<f64>,
    pub notes: Vec<String>,
}

impl Output {
    pub fn result(&mut self, key: &str, v: f64) {
        self.results.insert(key.into(), json!(v));
    }

    pub fn file_names(&self) -> Vec<String> {
        self.tables.iter().map(|(n, _)| n.clone()).chain(self.texts.iter().map(|(n, _)| n.clone())).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        for (name, t) in &self.tables {
            fs::write(dir.join(name), t.to_csv()?)?;
        }
        for (name, text) in &self.texts {
            fs::write(dir.join(name), text)?;
        }
        Ok(())
    }
}

/// Run manifest: the normalised config plus constants, validity and results.
/// It parses back as a config reproducing the run.
pub fn manifest(command: &str, config: &Config, validity: &ValidityReport, output: &Output) -> Value {
    let constants: Map<String, Value> = surfnoise::constants::table().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "manifest": {
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "constants": constants,
            "validity": validity,
            "results": output.results,
            "outputs": output.file_names(),
            "notes": output.notes,
        },
        "config": config,
    })
}
