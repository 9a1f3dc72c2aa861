use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use pwm_lab::spectrum::COMPAT_HARMONIC_LIMIT;
use pwm_lab::sweep::coarse_grid;
use pwm_lab::{
    analyze, carrier_signal, harmonic_spectrum, optimize_k, sensitivity_score,
    solve_a_m, sweep_k, thd, Analysis, DistortionReport, MotorSensitivityProfile, Objective,
    Strategy,
};

use crate::config::RunConfig;
use crate::export::{
    format_number, report_row, spectrum_rows, waveform_rows, write_csv, REPORT_COLUMNS,
    SPECTRUM_COLUMNS, TRACE_COLUMNS, WAVEFORM_COLUMNS,
};

pub const WAVEFORM_FILE: &str = "waveform.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const TRACE_FILE: &str = "optimize_trace.csv";
pub const COMPARE_FILE: &str = "compare.csv";

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated K values [default: 0.2 to 0.7 in steps of 0.05]
    #[arg(long, value_delimiter = ',')]
    pub k_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Thd,
    Df,
    Sensitivity,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value = "thd")]
    pub objective: ObjectiveKind,
    #[arg(long, default_value_t = 0.2)]
    pub k_min: f64,
    #[arg(long, default_value_t = 0.7)]
    pub k_max: f64,
    /// Width of the final golden-section bracket
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 30)]
    pub rotor_bars: u32,
    #[arg(long, default_value_t = 2)]
    pub pole_pairs: u32,
    #[arg(long, default_value_t = 0.0)]
    pub slip: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Comma-separated list of `spwm:M`, `hispwm:M` or `fmtc3:K:MBAR`
    /// [default: spwm:15,hispwm:15 and the configured strategy]
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<String>>,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// Some points failed although artifacts were written.
    pub partial: bool,
}

fn prepare(cfg: &RunConfig, name: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create output directory {}", cfg.out_dir.display()))?;
    Ok(cfg.out_dir.join(name))
}

fn write(
    cfg: &RunConfig,
    outcome: &mut Outcome,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> anyhow::Result<()> {
    let path = prepare(cfg, name)?;
    write_csv(&path, header, rows).with_context(|| format!("cannot write {}", path.display()))?;
    outcome.files.push(path);
    Ok(())
}

fn strategy_k(strategy: Strategy) -> Option<f64> {
    match strategy {
        Strategy::Fmtc3 { k, .. } => Some(k),
        _ => None,
    }
}

fn strategy_a_m(strategy: Strategy) -> Option<f64> {
    match strategy {
        Strategy::Fmtc3 { k, m_bar } => solve_a_m(k, m_bar).ok(),
        _ => None,
    }
}

fn fmtc3_order(cfg: &RunConfig, command: &str) -> anyhow::Result<f64> {
    match cfg.strategy {
        Strategy::Fmtc3 { m_bar, .. } => Ok(m_bar),
        other => bail!("{command} varies K and needs --strategy fmtc3, not {}", other.name()),
    }
}

fn analysis(cfg: &RunConfig) -> anyhow::Result<Analysis> {
    analyze(cfg.strategy, &cfg.analysis)
        .with_context(|| format!("waveform-core: cannot synthesize {}", cfg.strategy))
}

pub fn synth(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let a = analysis(cfg)?;
    let w = &a.waveforms.poles[0];
    let omega = a.carrier.omega_m;
    let carrier: Vec<f64> = w.times().map(|t| carrier_signal(t, &a.carrier)).collect();
    let modulator: Vec<f64> = w.times().map(|t| a.modulator.value_at_time(t, omega)).collect();
    let mut outcome = Outcome::default();
    write(
        cfg,
        &mut outcome,
        WAVEFORM_FILE,
        &WAVEFORM_COLUMNS,
        waveform_rows(&a.waveforms, &carrier, &modulator),
    )?;
    outcome.summary = format!(
        "{}: {} samples, {} switching edges per period in V_A\n",
        cfg.strategy,
        w.len(),
        w.edge_count() / w.n_periods()
    );
    Ok(outcome)
}

fn describe(strategy: Strategy, a_m: Option<f64>, r: &DistortionReport, full_band: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "strategy        {strategy}");
    if let Some(a_m) = a_m {
        let _ = writeln!(s, "A_M             {}", format_number(a_m));
    }
    let _ = writeln!(s, "V1 (pu)         {:.4}", r.fundamental_pu);
    let _ = writeln!(
        s,
        "THD (%)         {:.2} (orders ≤ {}), {:.2} (≤ {}), {:.2} (full band)",
        r.thd_percent, r.harmonic_limit, r.thd_compat_percent, COMPAT_HARMONIC_LIMIT, full_band
    );
    let _ = writeln!(
        s,
        "DF (%)          {:.4} (orders ≤ {}), {:.4} (≤ {})",
        r.df_percent, r.harmonic_limit, r.df_compat_percent, COMPAT_HARMONIC_LIMIT
    );
    let loh = r.loh_order.map_or("none".to_string(), |n| n.to_string());
    let _ = writeln!(s, "LOH             {loh}");
    let cluster = r
        .central_cluster_order
        .map_or("none".to_string(), |c| format!("{c:.2}"));
    let _ = writeln!(s, "cluster order   {cluster}");
    s
}

pub fn spectrum(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let a = analysis(cfg)?;
    let top = cfg.analysis.sampling.samples_per_period / 2 - 1;
    let full = harmonic_spectrum(a.waveforms.v_ab(), top)?;
    let full_band = thd(&full, top)?;
    let mut outcome = Outcome::default();
    write(
        cfg,
        &mut outcome,
        SPECTRUM_FILE,
        &SPECTRUM_COLUMNS,
        spectrum_rows(&a.line_to_line, cfg.analysis.dc_link, cfg.analysis.harmonic_limit),
    )?;
    let a_m = cfg.a_m;
    write(
        cfg,
        &mut outcome,
        REPORT_FILE,
        &REPORT_COLUMNS,
        [report_row(strategy_k(cfg.strategy), a_m, &a.report)],
    )?;
    outcome.summary = describe(cfg.strategy, a_m, &a.report, full_band);
    Ok(outcome)
}

pub fn sweep(cfg: &RunConfig, args: &SweepArgs) -> anyhow::Result<Outcome> {
    let m_bar = fmtc3_order(cfg, "sweep")?;
    let ks = args.k_values.clone().unwrap_or_else(|| coarse_grid(0.2, 0.7));
    let result = sweep_k(&ks, m_bar, &cfg.analysis);
    let mut outcome = Outcome::default();
    write(
        cfg,
        &mut outcome,
        SWEEP_FILE,
        &REPORT_COLUMNS,
        result
            .entries
            .iter()
            .map(|e| report_row(Some(e.k), Some(e.a_m), &e.report)),
    )?;
    let mut s = format!("{:>6} {:>12} {:>8} {:>8} {:>8}\n", "K", "A_M", "V1_pu", "THD_%", "DF_%");
    for e in &result.entries {
        let _ = writeln!(
            s,
            "{:>6.3} {:>12.4} {:>8.4} {:>8.2} {:>8.4}",
            e.k, e.a_m, e.report.fundamental_pu, e.report.thd_percent, e.report.df_percent
        );
    }
    for (k, err) in &result.failures {
        let _ = writeln!(s, "K = {k}: {err}");
    }
    outcome.partial = !result.failures.is_empty();
    outcome.summary = s;
    Ok(outcome)
}

pub fn optimize(cfg: &RunConfig, args: &OptimizeArgs) -> anyhow::Result<Outcome> {
    let m_bar = fmtc3_order(cfg, "optimize")?;
    let objective = match args.objective {
        ObjectiveKind::Thd => Objective::Thd,
        ObjectiveKind::Df => Objective::Df,
        ObjectiveKind::Sensitivity => Objective::Sensitivity(MotorSensitivityProfile::new(
            args.rotor_bars,
            args.pole_pairs,
            args.slip,
            cfg.analysis.fundamental_hz,
        )?),
    };
    let found = optimize_k(
        &objective,
        m_bar,
        (args.k_min, args.k_max),
        args.tolerance,
        &cfg.analysis,
    )
    .context("sweep-and-score: optimization failed")?;
    let mut outcome = Outcome::default();
    write(
        cfg,
        &mut outcome,
        TRACE_FILE,
        &TRACE_COLUMNS,
        found
            .trace
            .iter()
            .map(|&(k, v)| vec![format_number(k), format_number(v)]),
    )?;
    outcome.summary = format!(
        "objective {}\nK* {}\nvalue {}\n{}",
        objective.name(),
        format_number(found.k),
        format_number(found.value),
        if found.grid_only {
            "grid-only: refinement bracket is not unimodal\n"
        } else {
            ""
        }
    );
    Ok(outcome)
}

/// Parses `spwm:15`, `hispwm:15` or `fmtc3:0.5:15`.
pub fn parse_strategy(text: &str) -> anyhow::Result<Strategy> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let order = |s: &str| -> anyhow::Result<u32> {
        s.parse().with_context(|| format!("`{s}` is not a carrier order"))
    };
    Ok(match parts.as_slice() {
        ["spwm", m] => Strategy::Spwm { m: order(m)? },
        ["hispwm", m] => Strategy::Hispwm { m: order(m)? },
        ["fmtc3", k, m_bar] => Strategy::Fmtc3 {
            k: k.parse().with_context(|| format!("`{k}` is not a K value"))?,
            m_bar: m_bar.parse().with_context(|| format!("`{m_bar}` is not a mean order"))?,
        },
        _ => bail!("cannot parse strategy `{text}`; expected spwm:M, hispwm:M or fmtc3:K:MBAR"),
    })
}

pub fn compare(cfg: &RunConfig, args: &CompareArgs) -> anyhow::Result<Outcome> {
    let strategies = match &args.strategies {
        Some(list) => list
            .iter()
            .map(|s| parse_strategy(s))
            .collect::<anyhow::Result<Vec<_>>>()?,
        None => {
            let mut v = vec![Strategy::Spwm { m: 15 }, Strategy::Hispwm { m: 15 }];
            if !v.contains(&cfg.strategy) {
                v.push(cfg.strategy);
            }
            v
        }
    };
    let analyses = strategies
        .iter()
        .map(|&st| analyze(st, &cfg.analysis).with_context(|| format!("cannot analyze {st}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut header = vec!["strategy"];
    header.extend(REPORT_COLUMNS);
    header.extend(["THD50_pct", "DF50_pct", "sensitivity"]);
    let motor = MotorSensitivityProfile::paper_motor();
    let mut table = Vec::new();
    let mut s = format!(
        "{:<30} {:>8} {:>8} {:>8} {:>6} {:>8} {:>11}\n",
        "strategy", "V1_pu", "THD_%", "DF_%", "LOH", "cluster", "sensitivity"
    );
    for row in &analyses {
        let score = sensitivity_score(&row.line_to_line, &motor)?;
        let r = &row.report;
        let mut record = vec![row.strategy.to_string()];
        record.extend(report_row(strategy_k(row.strategy), strategy_a_m(row.strategy), r));
        record.extend([
            format_number(r.thd_compat_percent),
            format_number(r.df_compat_percent),
            format_number(score),
        ]);
        table.push(record);
        let _ = writeln!(
            s,
            "{:<30} {:>8.4} {:>8.2} {:>8.4} {:>6} {:>8} {:>11.4}",
            row.strategy.to_string(),
            r.fundamental_pu,
            r.thd_percent,
            r.df_percent,
            r.loh_order.map_or("-".into(), |n| n.to_string()),
            r.central_cluster_order.map_or("-".into(), |c| format!("{c:.2}")),
            score
        );
    }
    let mut outcome = Outcome::default();
    write(cfg, &mut outcome, COMPARE_FILE, &header, table)?;
    outcome.summary = s;
    Ok(outcome)
}
