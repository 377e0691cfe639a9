use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DiscreteSolution, Formulation};
use crate::error::Result;

/// JSON sidecar written next to a solution CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionMetadata {
    pub h1: f64,
    pub h2: f64,
    pub t_end: f64,
    pub n_intervals: usize,
    pub truncation: usize,
    pub formulation: Formulation,
    pub residual_norm: f64,
    pub rhs_norm: f64,
    pub integral: f64,
    pub theoretical_variance: f64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    /// Caller-supplied context, typically the effective run configuration.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
}

impl DiscreteSolution {
    pub fn metadata(&self) -> SolutionMetadata {
        let integral = self.integral();
        SolutionMetadata {
            h1: self.hurst.h1(),
            h2: self.hurst.h2(),
            t_end: self.grid.horizon(),
            n_intervals: self.grid.intervals(),
            truncation: self.config.truncation(),
            formulation: self.config.formulation,
            residual_norm: self.residual_norm,
            rhs_norm: self.rhs_norm,
            integral,
            theoretical_variance: 1.0 / integral,
            assembly_seconds: self.assembly_seconds,
            solve_seconds: self.solve_seconds,
            config: serde_json::Value::Null,
        }
    }

    /// Writes columns `t,h`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "h"])?;
        for (t, h) in self.grid.nodes().into_iter().zip(&self.values) {
            w.serialize((t, h))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json`; `config` is echoed into the
    /// sidecar.
    pub fn save(&self, csv_path: &Path, config: serde_json::Value) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(csv_path)?))?;
        let mut meta = self.metadata();
        meta.config = config;
        let file = BufWriter::new(File::create(csv_path.with_extension("json"))?);
        serde_json::to_writer_pretty(file, &meta)?;
        Ok(())
    }
}
