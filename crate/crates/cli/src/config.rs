//! Argument and config-file handling.
//!
//! Every value flag can also come from a flat `key = value` config file
//! (`--config run.cfg`); command-line flags win over file entries, unknown
//! file keys are hard errors, and `--print-config` echoes the fully
//! resolved configuration without running anything.  Lists are written
//! `a,b,c` and arithmetic ranges `start:stop:step` (inclusive of `stop`
//! when it lands on the grid).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "rieszcap",
    version,
    about = "Capacity solvers and inequality experiments for convex bodies",
    after_help = "CSV files start with a schema line; report.json embeds the \
resolved configuration, seeds and error bars needed to reproduce a run."
)]
pub struct Cli {
    #[command(flatten)]
    pub globals: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` config file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for report.json and the data files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the randomized samplers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Direction count of the support-function grid.
    #[arg(long, global = true)]
    pub directions: Option<usize>,
    /// Echo the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    /// Omit the timestamp from report.json (for byte-identical reruns).
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium-measure capacity of one body (single grid or ladder).
    Capacity(CapacityArgs),
    /// Resolution ladder with Richardson extrapolation and stability.
    Convergence(ConvergenceArgs),
    /// Capacity inequality sweep over Minkowski combinations of two bodies.
    Bm(BmArgs),
    /// Concavity index of the body's capacitary potential.
    Concavity(ConcavityArgs),
    /// Super-level set extraction: convexity, nesting, scaling, homothety.
    Levelsets(LevelsetsArgs),
    /// Half-space harmonic extension solver and its level bodies.
    Extension(ExtensionArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacity(_) => "capacity",
            Command::Convergence(_) => "convergence",
            Command::Bm(_) => "bm",
            Command::Concavity(_) => "concavity",
            Command::Levelsets(_) => "levelsets",
            Command::Extension(_) => "extension",
        }
    }
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Body description file.
    #[arg(long, value_name = "FILE")]
    pub body: Option<PathBuf>,
    /// Cell size of the quadrature lattice.
    #[arg(long, value_name = "H")]
    pub cell_size: Option<f64>,
    /// Decreasing cell sizes; adds a convergence table and extrapolation.
    #[arg(long, value_name = "H1,H2,H3")]
    pub ladder: Option<String>,
    /// Kernel: half-fractional (s = n-1) or newtonian (3D only, s = 1).
    #[arg(long, value_name = "NAME")]
    pub kernel: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Body description file.
    #[arg(long, value_name = "FILE")]
    pub body: Option<PathBuf>,
    /// Decreasing cell sizes, at least three.
    #[arg(long, value_name = "H1,H2,H3")]
    pub ladder: Option<String>,
}

#[derive(Debug, Args)]
pub struct BmArgs {
    /// First body file.
    #[arg(long, value_name = "FILE")]
    pub body1: Option<PathBuf>,
    /// Second body file.
    #[arg(long, value_name = "FILE")]
    pub body2: Option<PathBuf>,
    /// Combination weights in (0,1), e.g. `0.1:0.9:0.1`.
    #[arg(long, value_name = "LIST")]
    pub lambdas: Option<String>,
    /// Base cell size; the refinement ladder scales from it.
    #[arg(long, value_name = "H")]
    pub cell_size: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConcavityArgs {
    /// Body description file.
    #[arg(long, value_name = "FILE")]
    pub body: Option<PathBuf>,
    /// Cell size for the equilibrium solve.
    #[arg(long, value_name = "H")]
    pub cell_size: Option<f64>,
    /// Sampling annulus, inner and outer radius as circumradius multiples.
    #[arg(long, value_name = "LO,HI")]
    pub shell: Option<String>,
    /// Search bracket for the concavity exponent.
    #[arg(long, value_name = "LO,HI")]
    pub bracket: Option<String>,
    /// Random segments drawn in the annulus.
    #[arg(long, value_name = "N")]
    pub segments: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LevelsetsArgs {
    /// Body description file.
    #[arg(long, value_name = "FILE")]
    pub body: Option<PathBuf>,
    /// Cell size for the base equilibrium solve.
    #[arg(long, value_name = "H")]
    pub cell_size: Option<f64>,
    /// Potential levels in (0, 0.6], e.g. `0.2,0.3,0.5`.
    #[arg(long, value_name = "LIST")]
    pub levels: Option<String>,
    /// Convexity score below which the run counts as a finding.
    #[arg(long, value_name = "S")]
    pub score_floor: Option<f64>,
    /// Two levels `r,s` with r < s: test whether the level bodies are
    /// homothetic (radial potentials force this).
    #[arg(long, value_name = "R,S")]
    pub pair: Option<String>,
    /// Levels and weight `r,s,lambda` with s < r: test the three-level
    /// Minkowski inclusion at the interpolated level.
    #[arg(long, value_name = "R,S,L")]
    pub triple: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExtensionArgs {
    /// Body description file (planar bodies only).
    #[arg(long, value_name = "FILE")]
    pub body: Option<PathBuf>,
    /// Grid cells across the body inradius.
    #[arg(long, value_name = "N")]
    pub cells: Option<f64>,
    /// Box half-width as a multiple of the circumradius.
    #[arg(long, value_name = "F")]
    pub box_factor: Option<f64>,
    /// Field levels in (0,1): coarsen each super-level region into a body
    /// and compare its Newtonian capacity against the reciprocal law.
    #[arg(long, value_name = "LIST")]
    pub levels: Option<String>,
    /// Planar cell size for a kernel-solver cross-check of the capacity.
    #[arg(long, value_name = "H")]
    pub compare_cell_size: Option<f64>,
}

/// Resolved global options, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Globals {
    pub out: PathBuf,
    pub seed: u64,
    pub directions: usize,
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    HalfFractional,
    Newtonian,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityConfig {
    pub body: PathBuf,
    pub cell_size: f64,
    pub ladder: Option<Vec<f64>>,
    pub kernel: KernelChoice,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceConfig {
    pub body: PathBuf,
    pub ladder: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BmConfig {
    pub body1: PathBuf,
    pub body2: PathBuf,
    pub lambdas: Vec<f64>,
    pub cell_size: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityConfig {
    pub body: PathBuf,
    pub cell_size: f64,
    pub shell: (f64, f64),
    pub bracket: (f64, f64),
    pub segments: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelsetsConfig {
    pub body: PathBuf,
    pub cell_size: f64,
    pub levels: Vec<f64>,
    pub score_floor: f64,
    pub pair: Option<(f64, f64)>,
    pub triple: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionConfig {
    pub body: PathBuf,
    pub cells: f64,
    pub box_factor: f64,
    pub levels: Vec<f64>,
    pub compare_cell_size: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ResolvedCommand {
    Capacity(CapacityConfig),
    Convergence(ConvergenceConfig),
    Bm(BmConfig),
    Concavity(ConcavityConfig),
    Levelsets(LevelsetsConfig),
    Extension(ExtensionConfig),
}

/// Key-value entries of a config file; resolution consumes entries and
/// whatever is left over at the end is an unknown key.
pub struct KvFile {
    entries: BTreeMap<String, String>,
}

impl KvFile {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn parse(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    idx + 1
                ))
            })?;
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "{}:{}: duplicate key `{key}`",
                    path.display(),
                    idx + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Error on leftover keys, naming them and the accepted set.
    pub fn finish(self, accepted: &[&str]) -> Result<(), CliError> {
        if let Some(key) = self.entries.keys().next() {
            return Err(CliError::Config(format!(
                "unknown config key `{key}`; accepted keys: {}",
                accepted.join(", ")
            )));
        }
        Ok(())
    }
}

pub fn parse_f64(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: `{raw}` is not a finite number")))
}

pub fn parse_usize(key: &str, raw: &str) -> Result<usize, CliError> {
    raw.trim()
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("{key}: `{raw}` is not a nonnegative integer")))
}

pub fn parse_u64(key: &str, raw: &str) -> Result<u64, CliError> {
    raw.trim()
        .parse::<u64>()
        .map_err(|_| CliError::Config(format!("{key}: `{raw}` is not a nonnegative integer")))
}

pub fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Config(format!(
            "{key}: `{raw}` is not `true` or `false`"
        ))),
    }
}

/// Comma list `a,b,c` or inclusive range `start:stop:step`.
pub fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    let raw = raw.trim();
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "{key}: range syntax is start:stop:step, got `{raw}`"
            )));
        }
        let start = parse_f64(key, parts[0])?;
        let stop = parse_f64(key, parts[1])?;
        let step = parse_f64(key, parts[2])?;
        if !(step > 0.0) || stop < start {
            return Err(CliError::Config(format!(
                "{key}: range `{raw}` needs stop >= start and step > 0"
            )));
        }
        let mut values = Vec::new();
        let n = ((stop - start) / step + 0.5 * 1e-9).floor() as usize;
        for k in 0..=n {
            let v = start + k as f64 * step;
            if v <= stop + 1e-9 * step {
                values.push(v);
            }
        }
        return Ok(values);
    }
    raw.split(',')
        .map(|chunk| parse_f64(key, chunk))
        .collect()
}

pub fn parse_pair(key: &str, raw: &str) -> Result<(f64, f64), CliError> {
    let v = parse_list(key, raw)?;
    if v.len() != 2 {
        return Err(CliError::Config(format!(
            "{key}: expected two comma-separated numbers, got `{raw}`"
        )));
    }
    Ok((v[0], v[1]))
}

pub fn parse_triple(key: &str, raw: &str) -> Result<(f64, f64, f64), CliError> {
    let v = parse_list(key, raw)?;
    if v.len() != 3 {
        return Err(CliError::Config(format!(
            "{key}: expected three comma-separated numbers, got `{raw}`"
        )));
    }
    Ok((v[0], v[1], v[2]))
}

fn require<T>(key: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required value `{key}`")))
}

fn existing(key: &str, path: PathBuf) -> Result<PathBuf, CliError> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::Config(format!(
            "{key}: `{}` does not exist",
            path.display()
        )))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key}: {v} must be positive")))
    }
}

/// Decreasing positive cell sizes, at least `min_len` of them.
fn ladder_list(key: &str, v: Vec<f64>, min_len: usize) -> Result<Vec<f64>, CliError> {
    if v.len() < min_len {
        return Err(CliError::Config(format!(
            "{key}: need at least {min_len} cell sizes"
        )));
    }
    for &h in &v {
        positive(key, h)?;
    }
    if v.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config(format!(
            "{key}: cell sizes must be strictly decreasing"
        )));
    }
    Ok(v)
}

const GLOBAL_KEYS: [&str; 4] = ["out", "seed", "directions", "no-timestamp"];

pub fn resolve_globals(args: &GlobalArgs, file: &mut KvFile) -> Result<Globals, CliError> {
    let out = match (&args.out, file.take("out")) {
        (Some(p), _) => p.clone(),
        (None, Some(s)) => PathBuf::from(s),
        (None, None) => PathBuf::from("out"),
    };
    let seed = match (args.seed, file.take("seed")) {
        (Some(s), _) => s,
        (None, Some(raw)) => parse_u64("seed", &raw)?,
        (None, None) => 0,
    };
    let directions = match (args.directions, file.take("directions")) {
        (Some(d), _) => d,
        (None, Some(raw)) => parse_usize("directions", &raw)?,
        (None, None) => 256,
    };
    let no_timestamp = match (args.no_timestamp, file.take("no-timestamp")) {
        (true, _) => true,
        (false, Some(raw)) => parse_bool("no-timestamp", &raw)?,
        (false, None) => false,
    };
    if directions < 64 || directions % 2 != 0 {
        return Err(CliError::Config(format!(
            "directions: {directions} must be even and at least 64"
        )));
    }
    Ok(Globals {
        out,
        seed,
        directions,
        no_timestamp,
    })
}

macro_rules! merged {
    ($file:ident, $key:literal, $flag:expr, $parse:expr) => {
        match ($flag, $file.take($key)) {
            (Some(v), _) => Some($parse($key, &v)?),
            (None, Some(raw)) => Some($parse($key, &raw)?),
            (None, None) => None,
        }
    };
}

fn id_string(_key: &str, raw: &String) -> Result<String, CliError> {
    Ok(raw.clone())
}

fn path_of(_key: &str, raw: &String) -> Result<PathBuf, CliError> {
    Ok(PathBuf::from(raw))
}

/// Merge flags over file entries and validate; consumes the file's keys so
/// leftovers can be rejected by name.
pub fn resolve_command(
    command: &Command,
    file: &mut KvFile,
) -> Result<ResolvedCommand, CliError> {
    match command {
        Command::Capacity(a) => {
            let body_flag = a.body.as_ref().map(|p| p.display().to_string());
            let body = existing(
                "body",
                require("body", merged!(file, "body", &body_flag, path_of))?,
            )?;
            let cell_size = positive(
                "cell-size",
                merged!(file, "cell-size", a.cell_size.map(|v| v.to_string()), |k,
                 r: &String| {
                    parse_f64(k, r)
                })
                .unwrap_or(0.04),
            )?;
            let ladder = merged!(file, "ladder", a.ladder.clone(), |k, r: &String| {
                parse_list(k, r)
            });
            let ladder = match ladder {
                Some(v) => Some(ladder_list("ladder", v, 3)?),
                None => None,
            };
            let kernel_raw =
                merged!(file, "kernel", a.kernel.clone(), id_string).unwrap_or_default();
            let kernel = match kernel_raw.as_str() {
                "" | "half-fractional" => KernelChoice::HalfFractional,
                "newtonian" => KernelChoice::Newtonian,
                other => {
                    return Err(CliError::Config(format!(
                        "kernel: `{other}` is not `half-fractional` or `newtonian`"
                    )))
                }
            };
            Ok(ResolvedCommand::Capacity(CapacityConfig {
                body,
                cell_size,
                ladder,
                kernel,
            }))
        }
        Command::Convergence(a) => {
            let body_flag = a.body.as_ref().map(|p| p.display().to_string());
            let body = existing(
                "body",
                require("body", merged!(file, "body", &body_flag, path_of))?,
            )?;
            let ladder = require(
                "ladder",
                merged!(file, "ladder", a.ladder.clone(), |k, r: &String| {
                    parse_list(k, r)
                }),
            )?;
            let ladder = ladder_list("ladder", ladder, 3)?;
            Ok(ResolvedCommand::Convergence(ConvergenceConfig {
                body,
                ladder,
            }))
        }
        Command::Bm(a) => {
            let b1 = a.body1.as_ref().map(|p| p.display().to_string());
            let b2 = a.body2.as_ref().map(|p| p.display().to_string());
            let body1 = existing(
                "body1",
                require("body1", merged!(file, "body1", &b1, path_of))?,
            )?;
            let body2 = existing(
                "body2",
                require("body2", merged!(file, "body2", &b2, path_of))?,
            )?;
            let lambdas = merged!(file, "lambdas", a.lambdas.clone(), |k, r: &String| {
                parse_list(k, r)
            })
            .unwrap_or_else(|| (1..=9).map(|k| k as f64 / 10.0).collect());
            let cell_size = positive(
                "cell-size",
                merged!(file, "cell-size", a.cell_size.map(|v| v.to_string()), |k,
                 r: &String| {
                    parse_f64(k, r)
                })
                .unwrap_or(0.04),
            )?;
            Ok(ResolvedCommand::Bm(BmConfig {
                body1,
                body2,
                lambdas,
                cell_size,
            }))
        }
        Command::Concavity(a) => {
            let body_flag = a.body.as_ref().map(|p| p.display().to_string());
            let body = existing(
                "body",
                require("body", merged!(file, "body", &body_flag, path_of))?,
            )?;
            let cell_size = positive(
                "cell-size",
                merged!(file, "cell-size", a.cell_size.map(|v| v.to_string()), |k,
                 r: &String| {
                    parse_f64(k, r)
                })
                .unwrap_or(0.04),
            )?;
            let shell = merged!(file, "shell", a.shell.clone(), |k, r: &String| {
                parse_pair(k, r)
            })
            .unwrap_or((3.0, 8.0));
            let bracket = merged!(file, "bracket", a.bracket.clone(), |k, r: &String| {
                parse_pair(k, r)
            })
            .unwrap_or((-8.0, 1.0));
            let segments = merged!(
                file,
                "segments",
                a.segments.map(|v| v.to_string()),
                |k, r: &String| { parse_usize(k, r) }
            )
            .unwrap_or(2000);
            if !(shell.0 > 1.0 && shell.1 > shell.0) {
                return Err(CliError::Config(format!(
                    "shell: ({}, {}) must satisfy 1 < lo < hi",
                    shell.0, shell.1
                )));
            }
            if !(bracket.0 < bracket.1 && bracket.1 <= 1.0) {
                return Err(CliError::Config(format!(
                    "bracket: ({}, {}) must satisfy lo < hi <= 1",
                    bracket.0, bracket.1
                )));
            }
            if segments == 0 {
                return Err(CliError::Config("segments: must be positive".into()));
            }
            Ok(ResolvedCommand::Concavity(ConcavityConfig {
                body,
                cell_size,
                shell,
                bracket,
                segments,
            }))
        }
        Command::Levelsets(a) => {
            let body_flag = a.body.as_ref().map(|p| p.display().to_string());
            let body = existing(
                "body",
                require("body", merged!(file, "body", &body_flag, path_of))?,
            )?;
            let cell_size = positive(
                "cell-size",
                merged!(file, "cell-size", a.cell_size.map(|v| v.to_string()), |k,
                 r: &String| {
                    parse_f64(k, r)
                })
                .unwrap_or(0.05),
            )?;
            let levels = merged!(file, "levels", a.levels.clone(), |k, r: &String| {
                parse_list(k, r)
            })
            .unwrap_or_else(|| vec![0.2, 0.3, 0.5]);
            for &t in &levels {
                if !(t > 0.0 && t <= 0.6) {
                    return Err(CliError::Config(format!(
                        "levels: {t} is outside (0, 0.6]"
                    )));
                }
            }
            let score_floor = merged!(
                file,
                "score-floor",
                a.score_floor.map(|v| v.to_string()),
                |k, r: &String| { parse_f64(k, r) }
            )
            .unwrap_or(0.98);
            let pair = merged!(file, "pair", a.pair.clone(), |k, r: &String| {
                parse_pair(k, r)
            });
            if let Some((r, s)) = pair {
                if !(0.0 < r && r < s && s <= 0.6) {
                    return Err(CliError::Config(format!(
                        "pair: ({r}, {s}) must satisfy 0 < r < s <= 0.6"
                    )));
                }
            }
            let triple = merged!(file, "triple", a.triple.clone(), |k, r: &String| {
                parse_triple(k, r)
            });
            if let Some((r, s, lambda)) = triple {
                if !(0.0 < s && s < r && r <= 0.6) {
                    return Err(CliError::Config(format!(
                        "triple: levels ({r}, {s}) must satisfy 0 < s < r <= 0.6"
                    )));
                }
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(CliError::Config(format!(
                        "triple: weight {lambda} must lie in (0, 1)"
                    )));
                }
            }
            Ok(ResolvedCommand::Levelsets(LevelsetsConfig {
                body,
                cell_size,
                levels,
                score_floor,
                pair,
                triple,
            }))
        }
        Command::Extension(a) => {
            let body_flag = a.body.as_ref().map(|p| p.display().to_string());
            let body = existing(
                "body",
                require("body", merged!(file, "body", &body_flag, path_of))?,
            )?;
            let cells = merged!(file, "cells", a.cells.map(|v| v.to_string()), |k,
             r: &String| {
                parse_f64(k, r)
            })
            .unwrap_or(12.0);
            let box_factor = merged!(
                file,
                "box-factor",
                a.box_factor.map(|v| v.to_string()),
                |k, r: &String| { parse_f64(k, r) }
            )
            .unwrap_or(4.0);
            let levels = merged!(file, "levels", a.levels.clone(), |k, r: &String| {
                parse_list(k, r)
            })
            .unwrap_or_default();
            for &r in &levels {
                if !(r > 0.0 && r < 1.0) {
                    return Err(CliError::Config(format!(
                        "levels: {r} is outside (0, 1)"
                    )));
                }
            }
            let compare_cell_size = merged!(
                file,
                "compare-cell-size",
                a.compare_cell_size.map(|v| v.to_string()),
                |k, r: &String| { parse_f64(k, r) }
            );
            if let Some(h) = compare_cell_size {
                positive("compare-cell-size", h)?;
            }
            Ok(ResolvedCommand::Extension(ExtensionConfig {
                body,
                cells,
                box_factor,
                levels,
                compare_cell_size,
            }))
        }
    }
}

/// Accepted config-file keys for one command, for the unknown-key message.
pub fn accepted_keys(command: &Command) -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = GLOBAL_KEYS.to_vec();
    keys.extend(match command {
        Command::Capacity(_) => vec!["body", "cell-size", "ladder", "kernel"],
        Command::Convergence(_) => vec!["body", "ladder"],
        Command::Bm(_) => vec!["body1", "body2", "lambdas", "cell-size"],
        Command::Concavity(_) => {
            vec!["body", "cell-size", "shell", "bracket", "segments"]
        }
        Command::Levelsets(_) => vec![
            "body",
            "cell-size",
            "levels",
            "score-floor",
            "pair",
            "triple",
        ],
        Command::Extension(_) => vec![
            "body",
            "cells",
            "box-factor",
            "levels",
            "compare-cell-size",
        ],
    });
    keys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_syntax_covers_ranges_and_commas() {
        let r = parse_list("lambdas", "0.1:0.9:0.1").unwrap();
        assert_eq!(r.len(), 9);
        assert!((r[0] - 0.1).abs() < 1e-12);
        assert!((r[8] - 0.9).abs() < 1e-12);
        let l = parse_list("ladder", "0.08,0.04,0.02").unwrap();
        assert_eq!(l, vec![0.08, 0.04, 0.02]);
        assert!(parse_list("x", "0.5:0.1:0.1").is_err());
    }

    #[test]
    fn range_includes_stop_despite_rounding() {
        let r = parse_list("t", "0.2:0.5:0.15").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2] - 0.5).abs() < 1e-12);
    }
}
