//! Run configuration: `key = value` files, the environment fallback and
//! command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use monopole_core::model::PARAM_NAMES;
use monopole_core::{ModelParams, Preset};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "MONOPOLE_SPECTRA_CONFIG";

pub const DEFAULT_PRESET: Preset = Preset::HartmannTaubNut;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::Usage(format!("unknown format `{s}` (csv|json)"))),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Named parameter set (see `presets`).
    #[arg(long)]
    pub preset: Option<String>,

    /// Explicit couplings, `a=..,b=..,c0=..,c1=..,c2=..,c3=..,c4=..,d=..`.
    #[arg(long)]
    pub params: Option<String>,

    /// Override single couplings, `name=value` (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,

    /// Comma-separated ν1 values.
    #[arg(long, allow_hyphen_values = true)]
    pub nu1: Option<String>,

    /// Comma-separated ν2 values.
    #[arg(long, allow_hyphen_values = true)]
    pub nu2: Option<String>,

    /// Largest principal number n
    #[arg(long)]
    pub nmax: Option<u32>,

    /// Representation level p (dimension p+1)
    #[arg(long)]
    pub p: Option<u32>,

    /// Finest finite-difference grid size.
    #[arg(long)]
    pub grid: Option<usize>,

    /// Radial cutoff; chosen from the decay constant when absent.
    #[arg(long)]
    pub rmax: Option<f64>,

    /// Relative tolerance for oracle comparisons.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Seed for random draws
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Output format (default csv)
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output path (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// `key = value` config file; falls back to $MONOPOLE_SPECTRA_CONFIG.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamSource {
    Preset(Preset),
    Explicit,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ParamSource,
    pub params: ModelParams,
    /// `None` means every integer ν1 the command enumerates.
    pub nu1: Option<Vec<f64>>,
    pub nu2: Vec<f64>,
    pub nmax: u32,
    pub p: u32,
    pub grid: usize,
    pub rmax: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn nu1_or(&self, default: &[f64]) -> Vec<f64> {
        self.nu1.clone().unwrap_or_else(|| default.to_vec())
    }

    /// `(key, value)` pairs describing the run, for report metadata.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let source = match &self.source {
            ParamSource::Preset(p) => p.name().to_string(),
            ParamSource::Explicit => "explicit".into(),
        };
        let params = PARAM_NAMES
            .iter()
            .zip(self.params.values())
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("source", source),
            ("params", params),
            (
                "nu1",
                self.nu1
                    .as_deref()
                    .map(list)
                    .unwrap_or_else(|| "all".into()),
            ),
            ("nu2", list(&self.nu2)),
            ("nmax", self.nmax.to_string()),
            ("p", self.p.to_string()),
            ("grid", self.grid.to_string()),
            (
                "rmax",
                self.rmax
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "auto".into()),
            ),
            ("tol", self.tol.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }
}

const FILE_KEYS: [&str; 14] = [
    "preset", "params", "set", "nu1", "nu2", "nmax", "p", "grid", "rmax", "tol", "seed", "jobs",
    "format", "out",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

/// Parses a config file into the same shape as the flags.
fn parse_file(text: &str, path: &Path) -> Result<CommonArgs, CliError> {
    let mut args = CommonArgs::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                i + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim().to_string());
        match key {
            "preset" => args.preset = Some(value),
            "params" => args.params = Some(value),
            "set" => args
                .set
                .extend(value.split(',').map(|s| s.trim().to_string())),
            "nu1" => args.nu1 = Some(value),
            "nu2" => args.nu2 = Some(value),
            "nmax" => args.nmax = Some(parse_value(key, &value)?),
            "p" => args.p = Some(parse_value(key, &value)?),
            "grid" => args.grid = Some(parse_value(key, &value)?),
            "rmax" => args.rmax = Some(parse_value(key, &value)?),
            "tol" => args.tol = Some(parse_value(key, &value)?),
            "seed" => args.seed = Some(parse_value(key, &value)?),
            "jobs" => args.jobs = Some(parse_value(key, &value)?),
            "format" => args.format = Some(value.parse()?),
            "out" => args.out = Some(PathBuf::from(value)),
            _ => {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown config key `{key}` (expected one of {})",
                    path.display(),
                    i + 1,
                    FILE_KEYS.join(", ")
                )))
            }
        }
    }
    Ok(args)
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn parse_assignment(text: &str) -> Result<(String, f64), CliError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected `name=value`, got `{text}`")))?;
    let k = k.trim();
    if !PARAM_NAMES.contains(&k) {
        return Err(CliError::Usage(format!(
            "unknown coupling `{k}` (expected one of {})",
            PARAM_NAMES.join(", ")
        )));
    }
    Ok((k.to_string(), parse_value(k, v.trim())?))
}

fn explicit_params(text: &str) -> Result<ModelParams, CliError> {
    let mut params = ModelParams::zero();
    let mut seen = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = parse_assignment(item)?;
        params = params.with(&k, v)?;
        seen.push(k);
    }
    let missing: Vec<_> = PARAM_NAMES
        .iter()
        .filter(|n| !seen.iter().any(|s| s == *n))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "--params is missing {}",
            missing.join(", ")
        )));
    }
    Ok(params)
}

fn load_file(flags: &CommonArgs) -> Result<Option<CommonArgs>, CliError> {
    let path = match &flags.config {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from),
    };
    let Some(path) = path else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_file(&text, &path).map(Some)
}

fn check_single_source(args: &CommonArgs, origin: &str) -> Result<(), CliError> {
    if args.preset.is_some() && args.params.is_some() {
        return Err(CliError::Usage(format!(
            "{origin} gives both a preset and explicit params; choose one"
        )));
    }
    Ok(())
}

/// Resolves flags on top of the config file on top of defaults.
pub fn resolve(flags: &CommonArgs) -> Result<RunConfig, CliError> {
    check_single_source(flags, "the command line")?;
    let file = load_file(flags)?.unwrap_or_default();
    check_single_source(&file, "the config file")?;

    let flag_source = flags.preset.is_some() || flags.params.is_some();
    let (preset, params_text) = if flag_source {
        (flags.preset.clone(), flags.params.clone())
    } else {
        (file.preset.clone(), file.params.clone())
    };
    let (source, mut params) = match (preset, params_text) {
        (_, Some(text)) => (ParamSource::Explicit, explicit_params(&text)?),
        (Some(name), None) => {
            let p: Preset = name.parse()?;
            (ParamSource::Preset(p), p.params())
        }
        (None, None) => (ParamSource::Preset(DEFAULT_PRESET), DEFAULT_PRESET.params()),
    };
    for item in file.set.iter().chain(&flags.set) {
        for part in item.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = parse_assignment(part)?;
            params = params.with(&k, v)?;
        }
    }
    if params.values().iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("couplings must be finite".into()));
    }

    let pick = |f: &Option<String>, g: &Option<String>| f.clone().or_else(|| g.clone());
    let nu1 = pick(&flags.nu1, &file.nu1)
        .map(|s| parse_list("nu1", &s))
        .transpose()?;
    let nu2 = match pick(&flags.nu2, &file.nu2) {
        Some(s) => parse_list("nu2", &s)?,
        None => vec![0.5],
    };
    let tol = flags.tol.or(file.tol).unwrap_or(1e-5);
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let grid = flags.grid.or(file.grid).unwrap_or(4000);
    if grid < 64 {
        return Err(CliError::Usage(format!(
            "grid must be at least 64, got {grid}"
        )));
    }
    let rmax = flags.rmax.or(file.rmax);
    if rmax.is_some_and(|r| r.is_nan() || r <= 0.0) {
        return Err(CliError::Usage("rmax must be positive".into()));
    }
    let jobs = flags.jobs.or(file.jobs);
    if jobs == Some(0) {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    Ok(RunConfig {
        source,
        params,
        nu1,
        nu2,
        nmax: flags.nmax.or(file.nmax).unwrap_or(3),
        p: flags.p.or(file.p).unwrap_or(3),
        grid,
        rmax,
        tol,
        seed: flags.seed.or(file.seed).unwrap_or(0),
        jobs,
        format: flags.format.or(file.format).unwrap_or_default(),
        out: flags.out.clone().or(file.out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let text = "# run\npreset = micz\nset = c0=-8\nnu2 = 0.5, 1\nnmax = 2 # inline\n";
        let f = parse_file(text, Path::new("x.conf")).unwrap();
        assert_eq!(f.preset.as_deref(), Some("micz"));
        assert_eq!(f.set, vec!["c0=-8"]);
        assert_eq!(f.nmax, Some(2));
        let err = parse_file("bogus = 1\n", Path::new("x.conf")).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn explicit_params_need_all_couplings() {
        assert!(explicit_params("a=1,b=1").is_err());
        let p = explicit_params("a=1,b=2,c0=-8,c1=0,c2=0,c3=0,c4=0,d=1").unwrap();
        assert_eq!(p.b, 2.0);
        assert!(explicit_params("a=1,q=2")
            .unwrap_err()
            .to_string()
            .contains("`q`"));
    }

    #[test]
    fn both_sources_rejected() {
        let args = CommonArgs {
            preset: Some("micz".into()),
            params: Some("a=1".into()),
            ..Default::default()
        };
        assert!(matches!(resolve(&args), Err(CliError::Usage(_))));
    }
}
