//! Output directory bookkeeping and the JSON metadata sidecar.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use wiretap_core::analytic::ErrorRateCurve;
use wiretap_core::sim::StopRule;

use crate::{CliError, Outcome};

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    command: &'a str,
    tool_version: &'a str,
    config_sha256: String,
    seed: Option<u64>,
    stop_rule: Option<StopRule>,
    low_confidence: bool,
    outputs: &'a [String],
}

pub struct OutputDir {
    dir: PathBuf,
    command: &'static str,
    config_sha256: String,
    seed: Option<u64>,
    stop_rule: Option<StopRule>,
    outputs: Vec<String>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl OutputDir {
    pub fn create(dir: &Path, command: &'static str, config_text: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            command,
            config_sha256: format!("{:x}", Sha256::digest(config_text.as_bytes())),
            seed: None,
            stop_rule: None,
            outputs: Vec::new(),
        })
    }

    /// Records the randomness that produced the data files.
    pub fn simulated(&mut self, seed: u64, stop: StopRule) {
        self.seed = Some(seed);
        self.stop_rule = Some(stop);
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(io(&path))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn curve(&mut self, name: &str, curve: &ErrorRateCurve) -> Result<(), CliError> {
        let w = self.file(name)?;
        curve
            .write_csv(w)
            .map_err(|e| CliError::Run(format!("writing {name}: {e}")))
    }

    pub fn rows<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.file(name)?);
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Run(format!("writing {name}: {e}")))?;
        }
        w.flush().map_err(io(&self.dir.join(name)))
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Run(format!("writing {name}: {e}")))?;
        std::io::Write::write_all(&mut w, b"\n").map_err(io(&path))
    }

    pub fn finish(self, outcome: Outcome) -> Result<(), CliError> {
        let meta = Metadata {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config_sha256: self.config_sha256.clone(),
            seed: self.seed,
            stop_rule: self.stop_rule,
            low_confidence: outcome == Outcome::LowConfidence,
            outputs: &self.outputs,
        };
        let path = self.dir.join("meta.json");
        let f = File::create(&path).map_err(io(&path))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, &meta).map_err(|e| CliError::Run(format!("writing meta.json: {e}")))?;
        std::io::Write::write_all(&mut w, b"\n").map_err(io(&path))
    }
}
