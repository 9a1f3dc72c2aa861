//! Run configuration from flags and flat `key = value` files.
//!
//! File keys mirror the long flag names (`fundamental-hz`, `mbar`, ...);
//! underscores are accepted in place of hyphens. `#` starts a comment. Flags
//! take precedence over the file. The output directory is taken from `--out`,
//! then `PWM_LAB_OUT`, then the file's `out` key.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pwm_lab::spectrum::DEFAULT_HARMONIC_LIMIT;
use pwm_lab::synth::DEFAULT_SAMPLES_PER_PERIOD;
use pwm_lab::{mean_modulation_order, solve_a_m, AnalysisConfig, CarrierSpec, Sampling, Strategy};
use thiserror::Error;

/// Environment variable naming the output directory.
pub const OUT_DIR_ENV: &str = "PWM_LAB_OUT";

/// Relative tolerance when both `mbar` and `am` are given.
pub const CONSISTENCY_TOL: f64 = 1e-6;

pub const DEFAULT_K: f64 = 0.5;
pub const DEFAULT_ORDER: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Spwm,
    Hispwm,
    Fmtc3,
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("{key} = `{value}` is not a valid {expected}")]
    Value {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("{key} = {value} is outside {allowed}")]
    Range {
        key: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("mbar = {m_bar} and am = {a_m} disagree: at K = {k}, am = {a_m} gives a mean order of {implied}")]
    Conflict {
        m_bar: f64,
        a_m: f64,
        k: f64,
        implied: f64,
    },
    #[error("waveform-core: {0}")]
    Model(#[from] pwm_lab::Error),
}

/// Every setting a run accepts; `None` means not given.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Settings {
    /// Modulation strategy [default: fmtc3]
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    /// Truncation level K in [0, 0.9] [default: 0.5]
    #[arg(long)]
    pub k: Option<f64>,
    /// Mean modulation order (pulses per period) [default: 15]
    #[arg(long)]
    pub mbar: Option<f64>,
    /// Peak carrier scale A_M; solved from K and mbar when omitted
    #[arg(long)]
    pub am: Option<f64>,
    /// Fixed carrier order for spwm and hispwm [default: 15]
    #[arg(long)]
    pub m: Option<u32>,
    /// Modulating frequency in Hz [default: 50]
    #[arg(long)]
    pub fundamental_hz: Option<f64>,
    /// DC-link voltage E [default: 1]
    #[arg(long)]
    pub dc_link: Option<f64>,
    /// Samples per fundamental period, even [default: 24576]
    #[arg(long)]
    pub samples_per_period: Option<usize>,
    /// Number of fundamental periods synthesized [default: 1]
    #[arg(long)]
    pub n_periods: Option<usize>,
    /// Highest harmonic order counted in THD and DF [default: 100]
    #[arg(long)]
    pub harmonic_limit: Option<usize>,
    /// Scale of the modulating wave [default: 1]
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Output directory; overrides PWM_LAB_OUT [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, expected: &'static str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        expected,
    })
}

impl Settings {
    pub fn parse_file_contents(text: &str) -> Result<Settings, ConfigError> {
        let mut s = Settings::default();
        let mut seen: Vec<String> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            if seen.contains(&key) {
                return Err(ConfigError::Duplicate { line, key });
            }
            match key.as_str() {
                "strategy" => s.strategy = Some(parse(&key, value, "strategy (spwm, hispwm, fmtc3)")?),
                "k" => s.k = Some(parse(&key, value, "number")?),
                "mbar" => s.mbar = Some(parse(&key, value, "number")?),
                "am" => s.am = Some(parse(&key, value, "number")?),
                "m" => s.m = Some(parse(&key, value, "positive integer")?),
                "fundamental-hz" => s.fundamental_hz = Some(parse(&key, value, "number")?),
                "dc-link" => s.dc_link = Some(parse(&key, value, "number")?),
                "samples-per-period" => s.samples_per_period = Some(parse(&key, value, "positive integer")?),
                "n-periods" => s.n_periods = Some(parse(&key, value, "positive integer")?),
                "harmonic-limit" => s.harmonic_limit = Some(parse(&key, value, "positive integer")?),
                "amplitude" => s.amplitude = Some(parse(&key, value, "number")?),
                "out" => s.out = Some(PathBuf::from(value)),
                _ => return Err(ConfigError::UnknownKey { line, key }),
            }
            seen.push(key);
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Settings, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_file_contents(&text)
    }

    /// `self` with every value present in `top` replaced.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            strategy: top.strategy.or(self.strategy),
            k: top.k.or(self.k),
            mbar: top.mbar.or(self.mbar),
            am: top.am.or(self.am),
            m: top.m.or(self.m),
            fundamental_hz: top.fundamental_hz.or(self.fundamental_hz),
            dc_link: top.dc_link.or(self.dc_link),
            samples_per_period: top.samples_per_period.or(self.samples_per_period),
            n_periods: top.n_periods.or(self.n_periods),
            harmonic_limit: top.harmonic_limit.or(self.harmonic_limit),
            amplitude: top.amplitude.or(self.amplitude),
            out: top.out.or(self.out),
        }
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub strategy: Strategy,
    /// Resolved `A_M` for the truncated carrier.
    pub a_m: Option<f64>,
    pub analysis: AnalysisConfig,
    pub out_dir: PathBuf,
}

fn positive(key: &'static str, value: f64) -> Result<f64, ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::Range {
            key,
            value,
            allowed: "(0, ∞)",
        })
    }
}

impl RunConfig {
    pub fn resolve(settings: Settings) -> Result<RunConfig, ConfigError> {
        let fundamental_hz = positive("fundamental-hz", settings.fundamental_hz.unwrap_or(50.0))?;
        let dc_link = positive("dc-link", settings.dc_link.unwrap_or(1.0))?;
        let amplitude_index = settings.amplitude.unwrap_or(1.0);
        if !(amplitude_index > 0.0 && amplitude_index <= 1.2) {
            return Err(ConfigError::Range {
                key: "amplitude",
                value: amplitude_index,
                allowed: "(0, 1.2]",
            });
        }
        let samples_per_period = settings.samples_per_period.unwrap_or(DEFAULT_SAMPLES_PER_PERIOD);
        if samples_per_period < 4 || !samples_per_period.is_multiple_of(2) {
            return Err(ConfigError::Range {
                key: "samples-per-period",
                value: samples_per_period as f64,
                allowed: "even integers ≥ 4",
            });
        }
        let n_periods = settings.n_periods.unwrap_or(1);
        if n_periods == 0 {
            return Err(ConfigError::Range {
                key: "n-periods",
                value: 0.0,
                allowed: "integers ≥ 1",
            });
        }
        let harmonic_limit = settings.harmonic_limit.unwrap_or(DEFAULT_HARMONIC_LIMIT);
        if harmonic_limit < 2 || 2 * harmonic_limit >= samples_per_period {
            return Err(ConfigError::Range {
                key: "harmonic-limit",
                value: harmonic_limit as f64,
                allowed: "[2, samples-per-period / 2)",
            });
        }

        let omega_m = std::f64::consts::TAU * fundamental_hz;
        let (strategy, a_m) = match settings.strategy.unwrap_or(StrategyKind::Fmtc3) {
            kind @ (StrategyKind::Spwm | StrategyKind::Hispwm) => {
                let m = settings.m.unwrap_or(DEFAULT_ORDER);
                if m == 0 {
                    return Err(ConfigError::Range {
                        key: "m",
                        value: 0.0,
                        allowed: "integers ≥ 1",
                    });
                }
                let s = if kind == StrategyKind::Spwm {
                    Strategy::Spwm { m }
                } else {
                    Strategy::Hispwm { m }
                };
                (s, None)
            }
            StrategyKind::Fmtc3 => {
                let k = settings.k.unwrap_or(DEFAULT_K);
                if !(0.0..=0.9).contains(&k) {
                    return Err(ConfigError::Range {
                        key: "k",
                        value: k,
                        allowed: "[0, 0.9]",
                    });
                }
                let (m_bar, a_m) = match (settings.mbar, settings.am) {
                    (Some(m_bar), Some(a_m)) => {
                        let spec = CarrierSpec::truncated(positive("am", a_m)?, k, omega_m)?;
                        let implied = mean_modulation_order(&spec);
                        if (implied - m_bar).abs() > CONSISTENCY_TOL * m_bar.abs() {
                            return Err(ConfigError::Conflict {
                                m_bar,
                                a_m,
                                k,
                                implied,
                            });
                        }
                        (m_bar, a_m)
                    }
                    (None, Some(a_m)) => {
                        let spec = CarrierSpec::truncated(positive("am", a_m)?, k, omega_m)?;
                        (mean_modulation_order(&spec), a_m)
                    }
                    (m_bar, None) => {
                        let m_bar = positive("mbar", m_bar.unwrap_or(f64::from(DEFAULT_ORDER)))?;
                        (m_bar, solve_a_m(k, m_bar)?)
                    }
                };
                (Strategy::Fmtc3 { k, m_bar }, Some(a_m))
            }
        };

        let out_dir = settings.out.unwrap_or_else(|| PathBuf::from("."));
        Ok(RunConfig {
            strategy,
            a_m,
            analysis: AnalysisConfig {
                fundamental_hz,
                dc_link,
                sampling: Sampling::new(samples_per_period, n_periods),
                harmonic_limit,
                amplitude_index,
                ..AnalysisConfig::default()
            },
            out_dir,
        })
    }
}

/// Combines file, flag and environment sources by precedence.
pub fn merge_sources(file: Settings, flags: Settings, env_out: Option<PathBuf>) -> Settings {
    let out = flags.out.clone().or(env_out).or(file.out.clone());
    Settings {
        out,
        ..file.overlay(flags)
    }
}

/// Reads the optional config file, overlays `flags` and validates.
pub fn load_config(path: Option<&Path>, flags: Settings) -> Result<RunConfig, ConfigError> {
    let file = match path {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    RunConfig::resolve(merge_sources(file, flags, env_out))
}
