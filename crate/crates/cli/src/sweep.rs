use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use wcg_core::registry::RunConfig;
use wcg_core::transcript::Transcript;

pub const ROW_SCHEMA: u32 = 1;

/// One line of a results table.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub strategy: String,
    pub client: String,
    pub n: usize,
    pub b: u32,
    pub seed: u64,
    pub real_rounds: usize,
    pub fake_rounds: usize,
    pub certificate_valid: bool,
    pub probes_failed: u64,
    pub bound: Option<f64>,
    pub error: Option<String>,
}

impl Row {
    fn new(config: &RunConfig, t: &Transcript) -> Row {
        Row {
            strategy: t.strategies.waiter.clone(),
            client: t.strategies.client.clone(),
            n: t.n,
            b: t.bias,
            seed: t.seed,
            real_rounds: t.real_rounds,
            fake_rounds: t.fake_rounds,
            certificate_valid: t.certificate_valid,
            probes_failed: t.probes_failed(),
            bound: config.round_bound(),
            error: t.error.clone(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.error.is_none() && self.certificate_valid && self.probes_failed == 0
    }
}

#[derive(Serialize)]
struct Table<'a> {
    schema: u32,
    rows: &'a [Row],
}

/// Plays every config in parallel; rows come back sorted by `(n, seed)`.
pub fn run_all(configs: &[RunConfig], transcripts: Option<&Path>) -> Result<Vec<Row>> {
    if let Some(dir) = transcripts {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut rows = configs
        .par_iter()
        .map(|c| {
            let t = c.run().with_context(|| format!("{} at n={}", c.strategy, c.n))?;
            if let Some(dir) = transcripts {
                let path = transcript_path(dir, c);
                std::fs::write(&path, t.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(Row::new(c, &t))
        })
        .collect::<Result<Vec<Row>>>()?;
    rows.sort_by_key(|a| (a.n, a.seed));
    Ok(rows)
}

fn transcript_path(dir: &Path, c: &RunConfig) -> PathBuf {
    let name = format!("{}_{}_n{}_b{}_s{}.json", c.strategy, c.client, c.n, c.bias, c.seed).replace(':', "-");
    dir.join(name)
}

pub fn write_csv(rows: &[Row], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema", "strategy", "client", "n", "b", "seed", "real_rounds", "fake_rounds", "certificate_valid", "probes_failed",
        "bound", "error",
    ])?;
    for r in rows {
        w.write_record([
            ROW_SCHEMA.to_string(),
            r.strategy.clone(),
            r.client.clone(),
            r.n.to_string(),
            r.b.to_string(),
            r.seed.to_string(),
            r.real_rounds.to_string(),
            r.fake_rounds.to_string(),
            r.certificate_valid.to_string(),
            r.probes_failed.to_string(),
            r.bound.map(|b| b.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(rows: &[Row], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &Table { schema: ROW_SCHEMA, rows })?;
    writeln!(out)?;
    Ok(())
}
