use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use polarfc::sim::parse_p_grid;
use polarfc::{CrcKind, DecoderKind, SimConfig};
use serde::Deserialize;

pub const DEFAULT_N: u32 = 6;
pub const DEFAULT_K: usize = 32;
const DEFAULT_IMAX: usize = 5;
const DEFAULT_LIST_SIZE: usize = 32;
const DEFAULT_GRID: &str = "0.35:0.5:0.05";
const DEFAULT_TRIALS: u64 = 10_000;
const DEFAULT_SEED: u64 = 1;

/// Simulation flags; every one of them may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct SimArgs {
    /// log2 of the code length
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of information bits
    #[arg(long)]
    pub k: Option<usize>,
    /// Outer code: nr11 or none
    #[arg(long)]
    pub crc: Option<String>,
    /// sc, scc, bpscc, bpscc-sbj or scl
    #[arg(long)]
    pub decoder: Option<String>,
    /// Maximum BP sweeps per hypothesis check
    #[arg(long)]
    pub imax: Option<usize>,
    #[arg(long)]
    pub list_size: Option<usize>,
    /// Erasure probabilities as start:stop:step or a single value
    #[arg(long)]
    pub p_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Stop a point after this many block errors
    #[arg(long)]
    pub max_errors: Option<u64>,
    /// Give up on a block after this many node visits
    #[arg(long)]
    pub max_visits: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; a JSON sidecar is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    n: Option<u32>,
    k: Option<usize>,
    crc: Option<String>,
    decoder: Option<String>,
    imax: Option<usize>,
    list_size: Option<usize>,
    p_grid: Option<String>,
    trials: Option<u64>,
    max_errors: Option<u64>,
    max_visits: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl SimArgs {
    /// Flags over file values over defaults.
    pub fn resolve(&self) -> Result<SimConfig> {
        let file = match &self.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let crc = self
            .crc
            .clone()
            .or(file.crc)
            .unwrap_or_else(|| "nr11".into());
        let decoder = self
            .decoder
            .clone()
            .or(file.decoder)
            .unwrap_or_else(|| "bpscc-sbj".into());
        let i_max = self.imax.or(file.imax).unwrap_or(DEFAULT_IMAX);
        let list_size = self
            .list_size
            .or(file.list_size)
            .unwrap_or(DEFAULT_LIST_SIZE);
        let grid = self
            .p_grid
            .clone()
            .or(file.p_grid)
            .unwrap_or_else(|| DEFAULT_GRID.into());
        let config = SimConfig {
            n: self.n.or(file.n).unwrap_or(DEFAULT_N),
            k: self.k.or(file.k).unwrap_or(DEFAULT_K),
            crc: CrcKind::parse(&crc)?,
            decoder: DecoderKind::parse(&decoder, i_max, list_size)?,
            p_grid: parse_p_grid(&grid)?,
            trials: self.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            max_errors: self.max_errors.or(file.max_errors),
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            max_visits: self.max_visits.or(file.max_visits),
            out: self.out.clone().or(file.out),
        };
        config.validate()?;
        Ok(config)
    }
}
