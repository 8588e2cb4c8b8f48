//! Monte-Carlo harness: channel sampling, reproducible trials, aggregation
//! and result files.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{CodeSpec, OuterCode, ReliabilityProfile};
use crate::error::{Error, Result};
use crate::fc::ConstraintCache;
use crate::gf2::BitVector;
use crate::scl::decode_scl;
use crate::search::{decode_sc, decode_with_fc, DecodeOutcome, Engine, SearchOptions};
use crate::symbol::ErasureSymbol;

/// Trials decoded in parallel before the stop rule is consulted.
const BATCH: u64 = 512;

const MESSAGE_STREAM: u64 = 0;
const CHANNEL_STREAM: u64 = 1;
const DECODER_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrcKind {
    Nr11,
    None,
}

impl CrcKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "nr11" => Ok(Self::Nr11),
            "none" => Ok(Self::None),
            other => Err(Error::Config(format!(
                "unknown crc `{other}` (expected nr11 or none)"
            ))),
        }
    }

    pub fn outer_code(self) -> OuterCode {
        match self {
            Self::Nr11 => OuterCode::nr_crc11(),
            Self::None => OuterCode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecoderKind {
    Sc,
    Scc,
    Bpscc { i_max: usize },
    BpsccSbj { i_max: usize },
    Scl { list_size: usize },
}

impl DecoderKind {
    /// Decoder from its command-line name; `i_max` and `list_size` are used
    /// by the decoders that take them.
    pub fn parse(name: &str, i_max: usize, list_size: usize) -> Result<Self> {
        let kind = match name {
            "sc" => Self::Sc,
            "scc" => Self::Scc,
            "bpscc" => Self::Bpscc { i_max },
            "bpscc-sbj" => Self::BpsccSbj { i_max },
            "scl" => Self::Scl { list_size },
            other => {
                return Err(Error::Config(format!(
                    "unknown decoder `{other}` (expected sc, scc, bpscc, bpscc-sbj or scl)"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Sc => "sc".into(),
            Self::Scc => "scc".into(),
            Self::Bpscc { i_max } => format!("bpscc(imax={i_max})"),
            Self::BpsccSbj { i_max } => format!("bpscc-sbj(imax={i_max})"),
            Self::Scl { list_size } => format!("scl(L={list_size})"),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Bpscc { i_max: 0 } | Self::BpsccSbj { i_max: 0 } => {
                Err(Error::Config("imax must be at least 1".into()))
            }
            Self::Scl { list_size: 0 } => Err(Error::Config("list size must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// Decodes one observation.
    pub fn decode<R: Rng + ?Sized>(
        &self,
        spec: &CodeSpec,
        cache: &ConstraintCache,
        y: &[ErasureSymbol],
        max_visits: Option<u64>,
        rng: &mut R,
    ) -> Result<DecodeOutcome> {
        let fc = |engine, sbj| SearchOptions {
            engine,
            sbj,
            max_visits,
        };
        match *self {
            Self::Sc => decode_sc(spec, y, rng),
            Self::Scc => decode_with_fc(spec, cache, y, fc(Engine::Scc, false), rng),
            Self::Bpscc { i_max } => {
                decode_with_fc(spec, cache, y, fc(Engine::BpScc { i_max }, false), rng)
            }
            Self::BpsccSbj { i_max } => {
                decode_with_fc(spec, cache, y, fc(Engine::BpScc { i_max }, true), rng)
            }
            Self::Scl { list_size } => decode_scl(spec, y, list_size, rng),
        }
    }
}

/// Everything needed to reproduce a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u32,
    pub k: usize,
    pub crc: CrcKind,
    pub decoder: DecoderKind,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    /// Stop a point early once this many block errors were seen.
    pub max_errors: Option<u64>,
    pub seed: u64,
    pub max_visits: Option<u64>,
    pub out: Option<PathBuf>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!(
                "erasure probability {p} outside [0, 1]"
            )));
        }
        if self.max_errors == Some(0) {
            return Err(Error::Config("max errors must be at least 1".into()));
        }
        self.decoder.validate()
    }

    pub fn build_code(&self) -> Result<CodeSpec> {
        CodeSpec::nr(
            self.n,
            self.k,
            &ReliabilityProfile::nr(),
            self.crc.outer_code(),
        )
    }
}

/// Parses `start:stop:step` (or a single value) into an inclusive grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number `{s}` in grid `{text}`")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(Error::Config(format!(
                    "grid `{text}` needs start <= stop and step > 0"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count)
                .map(|j| ((start + j as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(Error::Config(format!(
            "grid `{text}` is not start:stop:step"
        ))),
    }
}

/// [`parse_grid`] restricted to erasure probabilities.
pub fn parse_p_grid(text: &str) -> Result<Vec<f64>> {
    let grid = parse_grid(text)?;
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Config(format!(
            "erasure probability {p} outside [0, 1]"
        )));
    }
    Ok(grid)
}

/// Passes each bit of `x` through a BEC with erasure probability `p`.
pub fn sample_bec<R: Rng + ?Sized>(x: &BitVector, p: f64, rng: &mut R) -> Vec<ErasureSymbol> {
    x.iter()
        .map(|b| {
            if rng.random::<f64>() < p {
                ErasureSymbol::Erasure
            } else {
                ErasureSymbol::from_bit(b)
            }
        })
        .collect()
}

/// Keyed on the pair so that nearby base seeds give unrelated trials.
pub(crate) fn stream(seed: u64, index: u64, id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(id);
    rng
}

/// Message, codeword and channel output of trial `index`; identical for
/// every decoder and, up to the erasure threshold, for every `p`.
pub fn trial_input(
    spec: &CodeSpec,
    p: f64,
    seed: u64,
    index: u64,
) -> Result<(BitVector, BitVector, Vec<ErasureSymbol>)> {
    let mut msg_rng = stream(seed, index, MESSAGE_STREAM);
    let a = BitVector::from(
        (0..spec.dimension())
            .map(|_| msg_rng.random_range(0..2u8))
            .collect::<Vec<_>>(),
    );
    let (_, x) = spec.encode(&a)?;
    let y = sample_bec(&x, p, &mut stream(seed, index, CHANNEL_STREAM));
    Ok((a, x, y))
}

/// Random stream handed to the decoder of trial `index`.
pub fn decoder_rng(seed: u64, index: u64) -> ChaCha8Rng {
    stream(seed, index, DECODER_STREAM)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCause {
    /// Every path was refuted by a conflict.
    DeadEnd,
    /// A valid-looking decision taken by a coin was wrong.
    WrongGuess,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub failure: Option<FailureCause>,
    pub visited_nodes: u64,
    pub iterations: u64,
    pub backjumps: u64,
}

impl TrialRecord {
    pub fn is_error(&self) -> bool {
        self.failure.is_some()
    }
}

/// Runs trial `index` of `decoder` at erasure probability `p`.
pub fn run_trial(
    spec: &CodeSpec,
    cache: &ConstraintCache,
    decoder: &DecoderKind,
    p: f64,
    seed: u64,
    index: u64,
    max_visits: Option<u64>,
) -> Result<TrialRecord> {
    let (a, _, y) = trial_input(spec, p, seed, index)?;
    let out = decoder.decode(spec, cache, &y, max_visits, &mut decoder_rng(seed, index))?;
    let failure = if !out.is_success() {
        Some(FailureCause::DeadEnd)
    } else if !out.matches(spec, &a) {
        Some(FailureCause::WrongGuess)
    } else {
        None
    };
    Ok(TrialRecord {
        index,
        failure,
        visited_nodes: out.visited_nodes,
        iterations: out.iterations,
        backjumps: out.backjumps,
    })
}

/// Aggregated result of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub p: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub stderr: f64,
    pub avg_visits: f64,
    pub avg_iters: f64,
    pub avg_backjumps: f64,
    pub dead_ends: u64,
    pub wrong_guesses: u64,
}

impl PointSummary {
    pub fn from_records(p: f64, records: &[TrialRecord]) -> Self {
        let trials = records.len() as u64;
        let errors = records.iter().filter(|r| r.is_error()).count() as u64;
        let dead_ends = records
            .iter()
            .filter(|r| r.failure == Some(FailureCause::DeadEnd))
            .count() as u64;
        let denom = trials.max(1) as f64;
        let bler = errors as f64 / denom;
        let mean =
            |f: fn(&TrialRecord) -> u64| records.iter().map(|r| f(r) as f64).sum::<f64>() / denom;
        Self {
            p,
            trials,
            errors,
            bler,
            stderr: (bler * (1.0 - bler) / denom).sqrt(),
            avg_visits: mean(|r| r.visited_nodes),
            avg_iters: mean(|r| r.iterations),
            avg_backjumps: mean(|r| r.backjumps),
            dead_ends,
            wrong_guesses: errors - dead_ends,
        }
    }
}

/// Runs one grid point. Trials run in parallel batches; the stop rule cuts
/// at the exact trial that reaches the error target, so the summary does
/// not depend on the thread count.
pub fn run_point(
    spec: &CodeSpec,
    cache: &ConstraintCache,
    config: &SimConfig,
    p: f64,
) -> Result<PointSummary> {
    config.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!(
            "erasure probability {p} outside [0, 1]"
        )));
    }
    let mut records: Vec<TrialRecord> = Vec::new();
    let mut errors = 0u64;
    let mut next = 0u64;
    'outer: while next < config.trials {
        let end = (next + BATCH).min(config.trials);
        let batch: Vec<TrialRecord> = (next..end)
            .into_par_iter()
            .map(|index| {
                run_trial(
                    spec,
                    cache,
                    &config.decoder,
                    p,
                    config.seed,
                    index,
                    config.max_visits,
                )
            })
            .collect::<Result<_>>()?;
        for record in batch {
            errors += record.is_error() as u64;
            records.push(record);
            if config.max_errors.is_some_and(|m| errors >= m) {
                break 'outer;
            }
        }
        next = end;
    }
    Ok(PointSummary::from_records(p, &records))
}

/// Runs every grid point of `config`.
pub fn run_sweep(config: &SimConfig) -> Result<(CodeSpec, Vec<PointSummary>)> {
    config.validate()?;
    let spec = config.build_code()?;
    let cache = ConstraintCache::new(&spec);
    let summaries = config
        .p_grid
        .iter()
        .map(|&p| run_point(&spec, &cache, config, p))
        .collect::<Result<_>>()?;
    Ok((spec, summaries))
}

/// Several decoders on the same trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSummary {
    pub p: f64,
    pub decoders: Vec<DecoderKind>,
    pub summaries: Vec<PointSummary>,
    /// `violations[a][b]`: trials where decoder `a` succeeded and `b` failed.
    pub violations: Vec<Vec<u64>>,
}

/// Runs all `decoders` on trials `0..trials` with matched seeds and records
/// per-trial dominance.
pub fn run_paired(
    spec: &CodeSpec,
    cache: &ConstraintCache,
    decoders: &[DecoderKind],
    p: f64,
    trials: u64,
    seed: u64,
    max_visits: Option<u64>,
) -> Result<PairedSummary> {
    let rows: Vec<Vec<TrialRecord>> = (0..trials)
        .into_par_iter()
        .map(|index| {
            decoders
                .iter()
                .map(|d| run_trial(spec, cache, d, p, seed, index, max_visits))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let m = decoders.len();
    let mut violations = vec![vec![0u64; m]; m];
    for row in &rows {
        for a in 0..m {
            for b in 0..m {
                violations[a][b] += (!row[a].is_error() && row[b].is_error()) as u64;
            }
        }
    }
    let summaries = (0..m)
        .map(|d| {
            let records: Vec<TrialRecord> = rows.iter().map(|r| r[d].clone()).collect();
            PointSummary::from_records(p, &records)
        })
        .collect();
    Ok(PairedSummary {
        p,
        decoders: decoders.to_vec(),
        summaries,
        violations,
    })
}

pub const CSV_HEADER: [&str; 7] = [
    "p",
    "bler",
    "stderr",
    "avg_visits",
    "avg_iters",
    "trials",
    "errors",
];

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub p: f64,
    pub bler: f64,
    pub stderr: f64,
    pub avg_visits: f64,
    pub avg_iters: f64,
    pub trials: u64,
    pub errors: u64,
}

impl From<&PointSummary> for ResultRow {
    fn from(s: &PointSummary) -> Self {
        Self {
            p: s.p,
            bler: s.bler,
            stderr: s.stderr,
            avg_visits: s.avg_visits,
            avg_iters: s.avg_iters,
            trials: s.trials,
            errors: s.errors,
        }
    }
}

/// Reproduction record stored next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: SimConfig,
    pub seed: u64,
    pub code_hash: String,
    pub version: String,
    pub points: Vec<PointSummary>,
}

pub fn results_csv(summaries: &[PointSummary]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| Error::Parse(e.to_string()))?;
    for s in summaries {
        writer
            .serialize(ResultRow::from(s))
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse("empty results file".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    records
        .map(|r| {
            r.and_then(|r| r.deserialize(None))
                .map_err(|e| Error::Parse(e.to_string()))
        })
        .collect()
}

/// Path of the JSON sidecar for a CSV path.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV to `path` and the metadata sidecar next to it.
pub fn emit_results(
    summaries: &[PointSummary],
    config: &SimConfig,
    spec: &CodeSpec,
    path: &Path,
) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::write(path, results_csv(summaries)?).map_err(io)?;
    let meta = RunMetadata {
        config: config.clone(),
        seed: config.seed,
        code_hash: spec.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        points: summaries.to_vec(),
    };
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&side, json).map_err(|source| Error::Io { path: side, source })
}
