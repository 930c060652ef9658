//! Staged survey: starting from a KS hypergraph, repeatedly remove one edge
//! from every survivor of the previous stage and pass the children through
//! connectivity, exact dedupe, isomorphism dedupe and colorability, keeping
//! the critical sets found along the way.
//!
//! Each stage with `b` edges is checkpointed in the output directory as
//! `edges-b.mmp` (KS survivors), `edges-b.criticals.mmp` and `edges-b.json`
//! (a [`StageResult`] and its [`SurveyRecord`]). A rerun skips every stage
//! whose three files exist and resumes from the first missing one.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form, IsoFilter};
use crate::coloring::{has_parity_proof, is_critical, is_ks};
use crate::geometry::build_600cell;
use crate::loops::{biggest_loop, LoopError};
use crate::mmp::{
    is_connected, parse_mmp_lines, renormalize, serialize_mmp, Hypergraph, MmpError, ParseOptions,
};
use crate::stats::{binomial, coupon_mle, real_int, CouponEstimate, StatsError, SurveyRecord};
use crate::strip::{SamplerSeed, SelectionMode, StripError, StripPlan};

pub const DEFAULT_TARGET: usize = 50_000;
pub const DEFAULT_PILOT: usize = 100;
const ESTIMATE_DIGITS: usize = 40;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} line {line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: MmpError,
    },
    #[error("{path}: {reason}")]
    BadCheckpoint { path: PathBuf, reason: String },
    #[error(transparent)]
    Strip(#[from] StripError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

impl SurveyError {
    /// Exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SurveyError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SurveyError + '_ {
    move |source| SurveyError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IncrementPolicy {
    /// Estimated per stage from a pilot run; see [`calibrate_increment`].
    Auto,
    Fixed(f64),
}

/// Survey settings, read from a TOML key-value file:
///
/// ```text
/// output = "run1"          # required
/// min_edges = 70           # required; last stage
/// start = "parent.mmp"     # default: the 600-cell hypergraph
/// target = 50000           # children kept per stage
/// increment = "auto"       # or a number >= 1; 1 is exhaustive
/// pilot = 100              # inputs examined when calibrating
/// mode = "uniform"         # or "random"
/// seed = 7                 # default: drawn from entropy and saved
/// workers = 0              # 0 uses every core
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SurveyConfig {
    pub start: Option<PathBuf>,
    pub target: usize,
    pub min_edges: usize,
    pub increment: IncrementPolicy,
    pub pilot: usize,
    pub mode: SelectionMode,
    pub seed: Option<u64>,
    pub workers: usize,
    pub output: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output: PathBuf,
    min_edges: usize,
    start: Option<PathBuf>,
    target: Option<usize>,
    increment: Option<toml::Value>,
    pilot: Option<usize>,
    mode: Option<String>,
    seed: Option<u64>,
    workers: Option<usize>,
}

impl SurveyConfig {
    pub fn new(output: impl Into<PathBuf>, min_edges: usize) -> Self {
        SurveyConfig {
            start: None,
            target: DEFAULT_TARGET,
            min_edges,
            increment: IncrementPolicy::Auto,
            pilot: DEFAULT_PILOT,
            mode: SelectionMode::Uniform,
            seed: None,
            workers: 0,
            output: output.into(),
        }
    }

    /// Parses the config text. Relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, SurveyError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| SurveyError::Config(e.to_string()))?;
        let mut cfg = SurveyConfig::new(base.join(raw.output), raw.min_edges);
        cfg.start = raw.start.map(|p| base.join(p));
        if let Some(t) = raw.target {
            cfg.target = t;
        }
        if let Some(p) = raw.pilot {
            cfg.pilot = p;
        }
        cfg.seed = raw.seed;
        cfg.workers = raw.workers.unwrap_or(0);
        cfg.increment = match raw.increment {
            None => IncrementPolicy::Auto,
            Some(toml::Value::String(s)) if s == "auto" => IncrementPolicy::Auto,
            Some(toml::Value::Integer(i)) => IncrementPolicy::Fixed(i as f64),
            Some(toml::Value::Float(f)) => IncrementPolicy::Fixed(f),
            Some(other) => {
                return Err(SurveyError::Config(format!(
                    "increment must be \"auto\" or a number, got {other}"
                )))
            }
        };
        cfg.mode = match raw.mode.as_deref() {
            None | Some("uniform") => SelectionMode::Uniform,
            Some("random") => SelectionMode::Randomized,
            Some(m) => {
                return Err(SurveyError::Config(format!(
                    "mode must be \"uniform\" or \"random\", got {m:?}"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SurveyError> {
        let text = fs::read_to_string(path)
            .map_err(|e| SurveyError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), SurveyError> {
        if self.target == 0 {
            return Err(SurveyError::Config("target must be at least 1".into()));
        }
        if self.pilot == 0 {
            return Err(SurveyError::Config("pilot must be at least 1".into()));
        }
        if self.min_edges > 75 {
            return Err(SurveyError::Config("min_edges must lie in 0..=75".into()));
        }
        if let IncrementPolicy::Fixed(i) = self.increment {
            if !(i.is_finite() && i >= 1.0) {
                return Err(SurveyError::Config(format!(
                    "increment must be >= 1, got {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Counts for one stage. Each filter count is at most the one before it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub edges: usize,
    pub inputs: usize,
    pub increment: f64,
    /// Children kept by the thinning step.
    pub candidates: usize,
    pub connected: usize,
    pub exact_unique: usize,
    pub iso_unique: usize,
    pub ks: usize,
    pub criticals_odd: usize,
    pub criticals_even: usize,
    pub seconds: f64,
}

impl StageResult {
    pub fn criticals(&self) -> usize {
        self.criticals_odd + self.criticals_even
    }

    pub fn is_monotone(&self) -> bool {
        self.candidates >= self.connected
            && self.connected >= self.exact_unique
            && self.exact_unique >= self.iso_unique
            && self.iso_unique >= self.ks
            && self.ks >= self.criticals()
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    stage: StageResult,
    record: SurveyRecord,
}

#[derive(Clone, Debug)]
pub struct SurveyOutcome {
    pub seed: u64,
    pub stages: Vec<StageResult>,
    pub records: Vec<SurveyRecord>,
    /// Critical sets of every stage run or reloaded, in stage order.
    pub criticals: Vec<CriticalFinding>,
}

/// Expected children over the target, scaled by the fraction of pilot
/// children that survive connectivity, exact dedupe and colorability.
/// `population` is the number of inputs the stage will process. A pilot
/// where nothing survives yields 1.
pub fn calibrate_increment(sample: &[Hypergraph], population: usize, target: usize) -> f64 {
    let children: usize = sample.iter().map(Hypergraph::num_edges).sum();
    if sample.is_empty() || children == 0 || target == 0 {
        log::warn!("empty pilot sample, using increment 1");
        return 1.0;
    }
    let mut seen = HashSet::new();
    let survivors = sample
        .iter()
        .flat_map(|h| (0..h.num_edges()).map(move |i| h.without_edge(i)))
        .filter(is_connected)
        .map(|c| renormalize(&c))
        .filter(|c| seen.insert(serialize_mmp(c)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(is_ks)
        .count();
    if survivors == 0 {
        log::warn!("no pilot child survived the filters, using increment 1");
        return 1.0;
    }
    let per_input = children as f64 / sample.len() as f64;
    let survival = survivors as f64 / children as f64;
    (population as f64 * per_input * survival / target as f64).max(1.0)
}

/// Whether a (vertices, edges) kind was seen among the critical sets of the
/// reference survey, and how many distinct sets of it were tallied there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownKind {
    /// Tallied with this many sets.
    Counted(u32),
    /// Known to exist from parity-proof constructions but not tallied.
    Exists,
    New,
}

pub fn known_kind(vertices: usize, edges: usize) -> KnownKind {
    TABLE1
        .iter()
        .find(|&&(v, e, _)| v as usize == vertices && e as usize == edges)
        .map_or(KnownKind::New, |&(_, _, n)| match n {
            Some(n) => KnownKind::Counted(n),
            None => KnownKind::Exists,
        })
}

/// Number of distinct critical sets per edge count in the reference tally.
pub fn reference_criticals(edges: usize) -> u32 {
    TABLE1
        .iter()
        .filter(|&&(_, e, _)| e as usize == edges)
        .filter_map(|&(_, _, n)| n)
        .sum()
}

#[derive(Clone, Debug)]
pub struct CriticalFinding {
    pub hypergraph: Hypergraph,
    pub parity: bool,
    pub loop_size: usize,
    pub kind: KnownKind,
}

/// The critical members of `hs`, one per isomorphism class, each annotated
/// with its parity verdict, biggest loop and reference kind. Kinds outside
/// the reference table are logged as warnings.
pub fn find_criticals<I>(hs: I) -> Result<Vec<CriticalFinding>, LoopError>
where
    I: IntoIterator<Item = Hypergraph>,
{
    let mut seen = IsoFilter::new();
    let mut out = Vec::new();
    for h in hs {
        if !is_critical(&h) || !seen.insert(canonical_form(&h)) {
            continue;
        }
        out.push(annotate_critical(h)?);
    }
    Ok(out)
}

fn annotate_critical(h: Hypergraph) -> Result<CriticalFinding, LoopError> {
    let (loop_size, _) = biggest_loop(&h)?;
    let kind = known_kind(h.num_vertices(), h.num_edges());
    if kind == KnownKind::New {
        log::warn!(
            "critical set of a new kind {}-{}: {}",
            h.num_vertices(),
            h.num_edges(),
            serialize_mmp(&h)
        );
    }
    Ok(CriticalFinding {
        parity: has_parity_proof(&h),
        loop_size,
        kind,
        hypergraph: h,
    })
}

fn stage_paths(dir: &Path, edges: usize) -> [PathBuf; 3] {
    [
        dir.join(format!("edges-{edges:02}.mmp")),
        dir.join(format!("edges-{edges:02}.criticals.mmp")),
        dir.join(format!("edges-{edges:02}.json")),
    ]
}

fn read_mmp_file(path: &Path) -> Result<Vec<Hypergraph>, SurveyError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_mmp_lines(&text, ParseOptions::strict()).map_err(|(line, source)| SurveyError::Corrupt {
        path: path.to_path_buf(),
        line,
        source,
    })
}

fn write_mmp_file(path: &Path, hs: &[Hypergraph]) -> Result<(), SurveyError> {
    let mut text = String::new();
    for h in hs {
        text.push_str(&serialize_mmp(h));
        text.push('\n');
    }
    write_atomic(path, &text)
}

/// Writes through a temporary file so an interrupted run never leaves a
/// truncated checkpoint behind.
fn write_atomic(path: &Path, text: &str) -> Result<(), SurveyError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn load_start(cfg: &SurveyConfig) -> Result<Hypergraph, SurveyError> {
    match &cfg.start {
        None => Ok(build_600cell()
            .map_err(|e| SurveyError::Config(format!("building the 600-cell: {e}")))?
            .hypergraph),
        Some(path) => {
            let mut hs = read_mmp_file(path).map_err(|e| SurveyError::Config(e.to_string()))?;
            if hs.len() != 1 {
                return Err(SurveyError::Config(format!(
                    "{}: expected one hypergraph, found {}",
                    path.display(),
                    hs.len()
                )));
            }
            Ok(renormalize(&hs.remove(0)))
        }
    }
}

/// Seed from the config, else the one saved by an earlier run in the same
/// directory, else fresh entropy (saved for later resumes).
fn resolve_seed(cfg: &SurveyConfig) -> Result<u64, SurveyError> {
    let path = cfg.output.join("seed");
    if let Some(s) = cfg.seed {
        return Ok(s);
    }
    if let Ok(text) = fs::read_to_string(&path) {
        return text.trim().parse().map_err(|_| SurveyError::BadCheckpoint {
            path,
            reason: "not an integer".into(),
        });
    }
    let seed = SamplerSeed::from_entropy().seed;
    write_atomic(&path, &format!("{seed}\n"))?;
    Ok(seed)
}

/// Runs (or resumes) the survey described by `cfg`, writing checkpoints and
/// a `records.jsonl` summary into `cfg.output`.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyOutcome, SurveyError> {
    cfg.validate()?;
    let start = load_start(cfg)?;
    let parent_edges = start.num_edges();
    if cfg.min_edges > parent_edges {
        return Err(SurveyError::Config(format!(
            "min_edges {} exceeds the {} edges of the start hypergraph",
            cfg.min_edges, parent_edges
        )));
    }
    if !is_ks(&start) {
        return Err(SurveyError::Config("start hypergraph is colorable".into()));
    }
    fs::create_dir_all(&cfg.output).map_err(io_err(&cfg.output))?;
    let seed = resolve_seed(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SurveyError::Config(e.to_string()))?;

    let mut outcome = SurveyOutcome {
        seed,
        stages: Vec::new(),
        records: Vec::new(),
        criticals: Vec::new(),
    };
    let mut current = vec![start];
    let first = {
        let mut rec = SurveyRecord::new(parent_edges as u32, parent_edges as u32);
        rec.noniso = Some(real_int(1u8, ESTIMATE_DIGITS));
        rec.ks = Some(real_int(1u8, ESTIMATE_DIGITS));
        rec.ks_sample = Some(1);
        rec.criticals = is_critical(&current[0]) as u64;
        if rec.criticals == 0 {
            rec.min_crit = Some(real_int(0u8, ESTIMATE_DIGITS));
            rec.max_crit = rec.min_crit.clone();
        }
        rec
    };
    outcome.records.push(first);

    for edges in (cfg.min_edges..parent_edges).rev() {
        let [survivors_path, criticals_path, json_path] = stage_paths(&cfg.output, edges);
        if survivors_path.exists() && criticals_path.exists() && json_path.exists() {
            let text = fs::read_to_string(&json_path).map_err(io_err(&json_path))?;
            let cp: Checkpoint =
                serde_json::from_str(&text).map_err(|e| SurveyError::BadCheckpoint {
                    path: json_path.clone(),
                    reason: e.to_string(),
                })?;
            current = read_mmp_file(&survivors_path)?;
            if current.len() != cp.stage.ks {
                return Err(SurveyError::BadCheckpoint {
                    path: survivors_path,
                    reason: format!("{} sets, record says {}", current.len(), cp.stage.ks),
                });
            }
            for h in read_mmp_file(&criticals_path)? {
                outcome.criticals.push(annotate_critical(h)?);
            }
            log::info!("{edges} edges: resumed from checkpoint");
            outcome.stages.push(cp.stage);
            outcome.records.push(cp.record);
            continue;
        }
        if current.is_empty() {
            log::info!("no KS sets left above {edges} edges, stopping");
            break;
        }
        let (stage, record, survivors, criticals) =
            pool.install(|| run_stage(cfg, &current, edges, parent_edges, seed))?;
        write_mmp_file(&survivors_path, &survivors)?;
        let crit_graphs: Vec<Hypergraph> = criticals.iter().map(|c| c.hypergraph.clone()).collect();
        write_mmp_file(&criticals_path, &crit_graphs)?;
        let cp = Checkpoint { stage, record };
        let json = serde_json::to_string_pretty(&cp).expect("checkpoint serializes");
        write_atomic(&json_path, &json)?;
        log::info!(
            "{edges} edges: {} inputs, {} candidates, {} classes, {} KS, {} critical in {:.1}s",
            cp.stage.inputs,
            cp.stage.candidates,
            cp.stage.iso_unique,
            cp.stage.ks,
            cp.stage.criticals(),
            cp.stage.seconds
        );
        outcome.stages.push(cp.stage);
        outcome.records.push(cp.record);
        outcome.criticals.extend(criticals);
        current = survivors;
    }

    let mut lines = String::new();
    for r in &outcome.records {
        lines.push_str(&serde_json::to_string(r).expect("record serializes"));
        lines.push('\n');
    }
    write_atomic(&cfg.output.join("records.jsonl"), &lines)?;
    Ok(outcome)
}

type StageOutput = (
    StageResult,
    SurveyRecord,
    Vec<Hypergraph>,
    Vec<CriticalFinding>,
);

fn run_stage(
    cfg: &SurveyConfig,
    inputs: &[Hypergraph],
    edges: usize,
    parent_edges: usize,
    seed: u64,
) -> Result<StageOutput, SurveyError> {
    let clock = Instant::now();
    let increment = match cfg.increment {
        IncrementPolicy::Fixed(i) => i,
        IncrementPolicy::Auto => {
            let stride = (inputs.len() / cfg.pilot).max(1);
            let sample: Vec<Hypergraph> = inputs
                .iter()
                .step_by(stride)
                .take(cfg.pilot)
                .cloned()
                .collect();
            calibrate_increment(&sample, inputs.len(), cfg.target)
        }
    };
    let plan = StripPlan::remove(1)
        .increment(increment, cfg.mode)
        .seed(SamplerSeed::user(seed ^ edges as u64));
    let mut thinner = plan.thinner()?;
    let picks: Vec<(usize, usize)> = inputs
        .iter()
        .enumerate()
        .flat_map(|(h, g)| (0..g.num_edges()).map(move |e| (h, e)))
        .filter(|_| thinner.keep())
        .collect();

    let connected: Vec<(String, Hypergraph)> = picks
        .par_iter()
        .filter_map(|&(h, e)| {
            let child = inputs[h].without_edge(e);
            is_connected(&child).then(|| {
                let child = renormalize(&child);
                (serialize_mmp(&child), child)
            })
        })
        .collect();
    let n_connected = connected.len();

    let mut seen = HashSet::with_capacity(connected.len());
    let exact: Vec<Hypergraph> = connected
        .into_iter()
        .filter_map(|(line, h)| seen.insert(line).then_some(h))
        .collect();
    drop(seen);
    let n_exact = exact.len();

    let forms: Vec<_> = exact.par_iter().map(canonical_form).collect();
    let mut classes = IsoFilter::new();
    let unique: Vec<Hypergraph> = exact
        .into_iter()
        .zip(forms)
        .filter_map(|(h, f)| classes.insert(f).then_some(h))
        .collect();
    let n_unique = unique.len();

    let ks: Vec<Hypergraph> = unique.into_par_iter().filter(is_ks).collect();
    let critical: Vec<Hypergraph> = ks.par_iter().filter(|h| is_critical(h)).cloned().collect();
    let criticals = critical
        .into_iter()
        .map(annotate_critical)
        .collect::<Result<Vec<_>, _>>()?;
    let n_crit = criticals.len();

    let stage = StageResult {
        edges,
        inputs: inputs.len(),
        increment,
        candidates: picks.len(),
        connected: n_connected,
        exact_unique: n_exact,
        iso_unique: n_unique,
        ks: ks.len(),
        criticals_odd: if edges % 2 == 1 { n_crit } else { 0 },
        criticals_even: if edges.is_multiple_of(2) { n_crit } else { 0 },
        seconds: clock.elapsed().as_secs_f64(),
    };
    let record = stage_record(&stage, parent_edges)?;
    Ok((stage, record, ks, criticals))
}

/// Estimates for one stage. An exhaustive stage (increment 1) reports its
/// class count as is; a thinned stage feeds the connected children and the
/// classes among them to the coupon estimator. The KS population is the
/// total scaled by the connected fraction and by the KS fraction among
/// classes. An exhaustive stage without criticals pins both bounds to zero.
fn stage_record(stage: &StageResult, parent_edges: usize) -> Result<SurveyRecord, SurveyError> {
    let d = ESTIMATE_DIGITS;
    let mut rec = SurveyRecord::new(stage.edges as u32, parent_edges as u32);
    rec.criticals = stage.criticals() as u64;
    rec.ks_sample = Some(stage.ks as u64);
    if stage.candidates == 0 || stage.iso_unique == 0 {
        return Ok(rec);
    }
    let total = real_int(binomial(parent_edges as u64, stage.edges as u64)?, d);
    let connected_frac = real_int(stage.connected, d) / real_int(stage.candidates, d);
    rec.unconnected = Some(&total - &total * &connected_frac);
    if stage.increment == 1.0 && stage.criticals() == 0 {
        // Nothing was missed, so there is nothing to bound.
        rec.min_crit = Some(real_int(0u8, d));
        rec.max_crit = rec.min_crit.clone();
    }
    rec.noniso = if stage.increment == 1.0 {
        Some(real_int(stage.iso_unique, d))
    } else {
        match coupon_mle(stage.connected as u64, stage.iso_unique as u64, 100)? {
            CouponEstimate::Finite(j) => Some(real_int(j, d)),
            CouponEstimate::Unbounded { cap } => {
                log::warn!("{} edges: class estimate exceeds {cap}", stage.edges);
                None
            }
        }
    };
    let ks_frac = real_int(stage.ks, d) / real_int(stage.iso_unique, d);
    rec.ks = Some(total * connected_frac * ks_frac);
    Ok(rec)
}

/// Every (vertices, edges) kind in the reference tally of critical sets,
/// with the number of distinct sets found, or `None` where a set is known
/// to exist but was not tallied.
const TABLE1: &[(u32, u32, Option<u32>)] = &[
    (26, 13, Some(1)),
    (30, 15, Some(3)),
    (32, 17, Some(1)),
    (33, 17, Some(2)),
    (34, 17, Some(5)),
    (36, 19, Some(11)),
    (37, 19, Some(9)),
    (38, 19, Some(6)),
    (38, 21, Some(10)),
    (39, 21, Some(30)),
    (40, 21, Some(38)),
    (41, 21, Some(22)),
    (42, 21, Some(6)),
    (40, 23, Some(10)),
    (41, 23, Some(5)),
    (42, 23, Some(16)),
    (43, 23, Some(22)),
    (44, 23, Some(14)),
    (45, 23, Some(3)),
    (46, 23, Some(1)),
    (42, 24, Some(1)),
    (42, 25, Some(3)),
    (43, 25, Some(38)),
    (44, 25, Some(16)),
    (45, 25, Some(5)),
    (46, 25, Some(3)),
    (47, 25, Some(1)),
    (48, 25, Some(2)),
    (49, 25, None),
    (50, 25, Some(1)),
    (45, 26, Some(2)),
    (44, 27, None),
    (45, 27, Some(32)),
    (46, 27, Some(130)),
    (47, 27, Some(74)),
    (48, 27, Some(19)),
    (49, 27, None),
    (50, 27, None),
    (51, 27, None),
    (52, 27, None),
    (53, 27, None),
    (54, 27, None),
    (46, 28, Some(3)),
    (47, 28, Some(6)),
    (48, 28, Some(11)),
    (49, 28, Some(3)),
    (46, 29, None),
    (47, 29, None),
    (48, 29, Some(9)),
    (49, 29, Some(11)),
    (50, 29, Some(7)),
    (51, 29, Some(1)),
    (52, 29, None),
    (53, 29, None),
    (54, 29, None),
    (55, 29, None),
    (56, 29, None),
    (49, 30, Some(9)),
    (50, 30, Some(39)),
    (51, 30, Some(19)),
    (52, 30, Some(4)),
    (53, 30, Some(1)),
    (48, 31, None),
    (49, 31, Some(1)),
    (50, 31, Some(13)),
    (51, 31, Some(33)),
    (52, 31, Some(37)),
    (53, 31, Some(11)),
    (54, 31, None),
    (55, 31, Some(1)),
    (56, 31, None),
    (57, 31, None),
    (58, 31, None),
    (51, 32, Some(18)),
    (52, 32, Some(69)),
    (53, 32, Some(73)),
    (54, 32, Some(26)),
    (55, 32, Some(5)),
    (51, 33, None),
    (52, 33, Some(33)),
    (53, 33, Some(114)),
    (54, 33, Some(153)),
    (55, 33, Some(56)),
    (56, 33, Some(21)),
    (57, 33, Some(1)),
    (58, 33, None),
    (59, 33, None),
    (60, 33, None),
    (53, 34, Some(45)),
    (54, 34, Some(275)),
    (55, 34, Some(339)),
    (56, 34, Some(136)),
    (57, 34, Some(54)),
    (58, 34, Some(2)),
    (59, 34, Some(1)),
    (53, 35, None),
    (54, 35, Some(16)),
    (55, 35, Some(158)),
    (56, 35, Some(241)),
    (57, 35, Some(133)),
    (58, 35, Some(30)),
    (59, 35, Some(2)),
    (60, 35, None),
    (55, 36, Some(25)),
    (56, 36, Some(262)),
    (57, 36, Some(448)),
    (58, 36, Some(256)),
    (59, 36, Some(55)),
    (60, 36, Some(5)),
    (55, 37, None),
    (56, 37, Some(28)),
    (57, 37, Some(378)),
    (58, 37, Some(678)),
    (59, 37, Some(308)),
    (60, 37, Some(48)),
    (57, 38, Some(45)),
    (58, 38, Some(493)),
    (59, 38, Some(864)),
    (60, 38, Some(316)),
    (58, 39, Some(27)),
    (59, 39, Some(381)),
    (60, 39, Some(562)),
    (59, 40, Some(16)),
    (60, 40, Some(145)),
    (60, 41, Some(1)),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmp::parse_mmp;

    #[test]
    fn config_round_trip() {
        let cfg = SurveyConfig::parse(
            "output = \"out\"\nmin_edges = 72\nincrement = 3\nmode = \"random\"\nseed = 5\n",
            Path::new("/tmp/x"),
        )
        .unwrap();
        assert_eq!(cfg.output, Path::new("/tmp/x/out"));
        assert_eq!(cfg.increment, IncrementPolicy::Fixed(3.0));
        assert_eq!(cfg.mode, SelectionMode::Randomized);
        assert_eq!(cfg.target, DEFAULT_TARGET);
    }

    #[test]
    fn config_errors() {
        let base = Path::new(".");
        for bad in [
            "min_edges = 3\n",
            "output = \"o\"\nmin_edges = 80\n",
            "output = \"o\"\nmin_edges = 3\nincrement = 0.5\n",
            "output = \"o\"\nmin_edges = 3\nmode = \"sideways\"\n",
            "output = \"o\"\nmin_edges = 3\ntarget = 0\n",
            "output = \"o\"\nmin_edges = 3\ncolour = 1\n",
        ] {
            let err = SurveyConfig::parse(bad, base).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{bad}");
        }
    }

    #[test]
    fn reference_table() {
        assert_eq!(known_kind(26, 13), KnownKind::Counted(1));
        assert_eq!(known_kind(44, 27), KnownKind::Exists);
        assert_eq!(known_kind(27, 13), KnownKind::New);
        assert_eq!(reference_criticals(35), 580);
        assert_eq!(reference_criticals(24), 1);
    }

    #[test]
    fn calibration() {
        let h = parse_mmp("1234,4567,789A,ABC1.", ParseOptions::strict()).unwrap();
        // A colorable pilot has no survivors.
        assert_eq!(calibrate_increment(&[h], 10, 5), 1.0);
        assert_eq!(calibrate_increment(&[], 10, 5), 1.0);
        let cell = build_600cell().unwrap().hypergraph;
        let sample = vec![cell; 2];
        // The second copy's children repeat the first's, halving survival.
        assert!((calibrate_increment(&sample, 2, 75) - 1.0).abs() < 1e-12);
        assert!((calibrate_increment(&sample[..1], 100, 10) - 750.0).abs() < 1e-9);
    }
}
