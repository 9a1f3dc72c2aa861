//! Strategy analysis, truncation-level sweeps and the K optimizer.

use std::f64::consts::TAU;
use std::fmt;

use rayon::prelude::*;

use crate::carrier::{solve_a_m, CarrierSpec};
use crate::error::{domain, Error, Result};
use crate::modulation::ModulatingWave;
use crate::motor::{sensitivity_score, MotorSensitivityProfile};
use crate::spectrum::{
    df, harmonic_spectrum, thd, DistortionReport, HarmonicSpectrum, COMPAT_HARMONIC_LIMIT,
    DEFAULT_HARMONIC_LIMIT, DEFAULT_LOH_THRESHOLD,
};
use crate::synth::{synthesize_three_phase, Sampling, ThreePhase};

/// Truncation levels accepted by sweeps and the optimizer.
pub const K_RANGE: (f64, f64) = (0.0, 0.9);

/// Spacing of the optimizer's coarse grid.
pub const COARSE_STEP: f64 = 0.05;

/// Spectra are always resolved at least up to this order.
const MIN_ANALYSIS_ORDER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Sinusoidal modulator, fixed carrier of order `m`.
    Spwm { m: u32 },
    /// Harmonic-injection modulator, fixed carrier of order `m`.
    Hispwm { m: u32 },
    /// Harmonic-injection modulator, truncated cos² carrier.
    Fmtc3 { k: f64, m_bar: f64 },
}

impl Strategy {
    pub fn carrier(&self, omega_m: f64) -> Result<CarrierSpec> {
        match *self {
            Strategy::Spwm { m } | Strategy::Hispwm { m } => CarrierSpec::fixed(m, omega_m),
            Strategy::Fmtc3 { k, m_bar } => CarrierSpec::for_mean_order(k, m_bar, omega_m),
        }
    }

    pub fn modulator(&self, amplitude_index: f64) -> ModulatingWave {
        match self {
            Strategy::Spwm { .. } => ModulatingWave::sinusoidal(amplitude_index),
            _ => ModulatingWave::harmonic_injection(amplitude_index),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Spwm { .. } => "spwm",
            Strategy::Hispwm { .. } => "hispwm",
            Strategy::Fmtc3 { .. } => "fmtc3",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Spwm { m } => write!(f, "SPWM(M={m})"),
            Strategy::Hispwm { m } => write!(f, "HISPWM(M={m})"),
            Strategy::Fmtc3 { k, m_bar } => write!(f, "HIPWM-FMTC3(K={k}, M={m_bar})"),
        }
    }
}

/// Settings shared by every analyzed operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub fundamental_hz: f64,
    pub dc_link: f64,
    pub sampling: Sampling,
    pub harmonic_limit: usize,
    pub loh_threshold: f64,
    pub amplitude_index: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            fundamental_hz: 50.0,
            dc_link: 1.0,
            sampling: Sampling::default(),
            harmonic_limit: DEFAULT_HARMONIC_LIMIT,
            loh_threshold: DEFAULT_LOH_THRESHOLD,
            amplitude_index: 1.0,
        }
    }
}

impl AnalysisConfig {
    pub fn omega_m(&self) -> f64 {
        TAU * self.fundamental_hz
    }

    fn analysis_order(&self) -> usize {
        self.harmonic_limit
            .max(COMPAT_HARMONIC_LIMIT)
            .max(MIN_ANALYSIS_ORDER)
            .min(self.sampling.samples_per_period / 2 - 1)
    }
}

/// Waveforms, spectra and report for one strategy.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub strategy: Strategy,
    pub carrier: CarrierSpec,
    pub modulator: ModulatingWave,
    pub waveforms: ThreePhase,
    /// Spectrum of `V_AB`.
    pub line_to_line: HarmonicSpectrum,
    /// Spectrum of `V_A`.
    pub pole: HarmonicSpectrum,
    pub report: DistortionReport,
}

pub fn analyze(strategy: Strategy, cfg: &AnalysisConfig) -> Result<Analysis> {
    let carrier = strategy.carrier(cfg.omega_m())?;
    let modulator = strategy.modulator(cfg.amplitude_index);
    let waveforms = synthesize_three_phase(&modulator, &carrier, cfg.dc_link, cfg.sampling)?;
    let order = cfg.analysis_order();
    let line_to_line = harmonic_spectrum(waveforms.v_ab(), order)?;
    let pole = harmonic_spectrum(&waveforms.poles[0], order)?;
    let report = DistortionReport::from_spectra(
        &line_to_line,
        &pole,
        cfg.dc_link,
        carrier.pulse_count()?,
        cfg.harmonic_limit,
        cfg.loh_threshold,
    )?;
    Ok(Analysis {
        strategy,
        carrier,
        modulator,
        waveforms,
        line_to_line,
        pole,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub k: f64,
    pub a_m: f64,
    pub report: DistortionReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub m_bar: f64,
    /// Successful points in increasing K.
    pub entries: Vec<SweepEntry>,
    /// Points that could not be analyzed, with the offending K.
    pub failures: Vec<(f64, Error)>,
}

fn check_k(k: f64) -> Result<()> {
    if (K_RANGE.0..=K_RANGE.1).contains(&k) {
        Ok(())
    } else {
        Err(domain("K", k, "[0, 0.9]"))
    }
}

fn sweep_point(k: f64, m_bar: f64, cfg: &AnalysisConfig) -> Result<SweepEntry> {
    check_k(k)?;
    let a_m = solve_a_m(k, m_bar)?;
    let analysis = analyze(Strategy::Fmtc3 { k, m_bar }, cfg)?;
    Ok(SweepEntry {
        k,
        a_m,
        report: analysis.report,
    })
}

/// Analyzes the truncated-carrier strategy at every K in `k_values`.
///
/// Points run in parallel; results are ordered by K regardless of scheduling.
pub fn sweep_k(k_values: &[f64], m_bar: f64, cfg: &AnalysisConfig) -> SweepResult {
    let mut points: Vec<(f64, Result<SweepEntry>)> = k_values
        .par_iter()
        .map(|&k| (k, sweep_point(k, m_bar, cfg)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (k, point) in points {
        match point {
            Ok(entry) => entries.push(entry),
            Err(e) => {
                log::warn!("sweep point K = {k} failed: {e}");
                failures.push((k, e));
            }
        }
    }
    SweepResult {
        m_bar,
        entries,
        failures,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Thd,
    Df,
    Sensitivity(MotorSensitivityProfile),
}

impl Objective {
    /// Objective value of the truncated-carrier strategy at `(k, m_bar)`.
    pub fn evaluate(&self, k: f64, m_bar: f64, cfg: &AnalysisConfig) -> Result<f64> {
        check_k(k)?;
        let a = analyze(Strategy::Fmtc3 { k, m_bar }, cfg)?;
        match self {
            Objective::Thd => thd(&a.line_to_line, cfg.harmonic_limit),
            Objective::Df => df(&a.line_to_line, cfg.harmonic_limit),
            Objective::Sensitivity(profile) => sensitivity_score(&a.line_to_line, profile),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Thd => "thd",
            Objective::Df => "df",
            Objective::Sensitivity(_) => "sensitivity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub k: f64,
    pub value: f64,
    /// Refinement was abandoned because the bracket is not unimodal.
    pub grid_only: bool,
    /// Every evaluated `(K, value)` in evaluation order.
    pub trace: Vec<(f64, f64)>,
}

/// Coarse grid points from `lo` to `hi` (both included) at [`COARSE_STEP`].
pub fn coarse_grid(lo: f64, hi: f64) -> Vec<f64> {
    let steps = ((hi - lo) / COARSE_STEP - 1e-9).ceil().max(0.0) as usize;
    (0..=steps)
        .map(|i| (lo + i as f64 * COARSE_STEP).min(hi))
        .collect()
}

/// True when values sorted by K fall and then rise, allowing `slack`.
fn is_unimodal(points: &[(f64, f64)], slack: f64) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let best = sorted
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map_or(0, |(i, _)| i);
    let falling = sorted[..=best].windows(2).all(|w| w[1].1 <= w[0].1 + slack);
    let rising = sorted[best..].windows(2).all(|w| w[1].1 + slack >= w[0].1);
    falling && rising
}

/// Minimizes `objective` over K in `bounds`.
///
/// A coarse grid locates the best point; golden-section search then refines
/// within one grid step on either side until the bracket is narrower than
/// `tolerance`.
pub fn optimize_k(
    objective: &Objective,
    m_bar: f64,
    bounds: (f64, f64),
    tolerance: f64,
    cfg: &AnalysisConfig,
) -> Result<Optimum> {
    let (lo, hi) = bounds;
    check_k(lo)?;
    check_k(hi)?;
    if lo > hi {
        return Err(domain("bounds.0", lo, "values ≤ the upper bound"));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(domain("tolerance", tolerance, "(0, ∞)"));
    }

    let grid = coarse_grid(lo, hi);
    let values = grid
        .par_iter()
        .map(|&k| objective.evaluate(k, m_bar, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let mut trace: Vec<(f64, f64)> = grid.iter().copied().zip(values).collect();
    let best_index = trace
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("grid has at least one point");
    let (grid_k, grid_value) = trace[best_index];
    if hi - lo < tolerance || grid.len() == 1 {
        return Ok(Optimum {
            k: grid_k,
            value: grid_value,
            grid_only: false,
            trace,
        });
    }

    let mut a = grid[best_index.saturating_sub(1)];
    let mut b = grid[(best_index + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective.evaluate(x1, m_bar, cfg)?;
    let mut f2 = objective.evaluate(x2, m_bar, cfg)?;
    trace.push((x1, f1));
    trace.push((x2, f2));
    while b - a >= tolerance {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective.evaluate(x1, m_bar, cfg)?;
            trace.push((x1, f1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective.evaluate(x2, m_bar, cfg)?;
            trace.push((x2, f2));
        }
    }
    let (refined_k, refined_value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    let bracket = (
        grid[best_index.saturating_sub(1)],
        grid[(best_index + 1).min(grid.len() - 1)],
    );
    let inside: Vec<(f64, f64)> = trace
        .iter()
        .copied()
        .filter(|&(k, _)| k >= bracket.0 && k <= bracket.1)
        .collect();
    let slack = 1e-9 * grid_value.abs().max(1e-300);
    if !is_unimodal(&inside, slack) {
        log::info!("objective is not unimodal on [{}, {}]; keeping the grid point", bracket.0, bracket.1);
        return Ok(Optimum {
            k: grid_k,
            value: grid_value,
            grid_only: true,
            trace,
        });
    }
    let (k, value) = if refined_value < grid_value {
        (refined_k, refined_value)
    } else {
        (grid_k, grid_value)
    };
    Ok(Optimum {
        k,
        value,
        grid_only: false,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub strategy: Strategy,
    pub report: DistortionReport,
}

/// One report per strategy under the same settings.
pub fn compare_strategies(
    strategies: &[Strategy],
    cfg: &AnalysisConfig,
) -> Result<Vec<ComparisonRow>> {
    strategies
        .iter()
        .map(|&strategy| {
            analyze(strategy, cfg).map(|a| ComparisonRow {
                strategy,
                report: a.report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> AnalysisConfig {
        AnalysisConfig {
            sampling: Sampling::new(6144, 1),
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn grid_covers_bounds() {
        let g = coarse_grid(0.2, 0.7);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.2);
        assert_eq!(*g.last().unwrap(), 0.7);
        assert_eq!(coarse_grid(0.3, 0.3), vec![0.3]);
        assert_eq!(coarse_grid(0.0, 0.12).len(), 4);
    }

    #[test]
    fn unimodality() {
        assert!(is_unimodal(&[(0.0, 3.0), (1.0, 1.0), (2.0, 2.0)], 0.0));
        assert!(is_unimodal(&[(0.0, 1.0), (1.0, 2.0)], 0.0));
        assert!(!is_unimodal(&[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0), (3.0, 4.0)], 0.0));
    }

    #[test]
    fn sweep_orders_by_k_and_keeps_failures() {
        let r = sweep_k(&[0.5, 0.95, 0.2], 15.0, &quick());
        assert_eq!(r.entries.len(), 2);
        assert_eq!(r.entries[0].k, 0.2);
        assert_eq!(r.entries[1].k, 0.5);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, 0.95);
    }

    #[test]
    fn untruncated_point() {
        let r = sweep_k(&[0.0], 15.0, &quick());
        assert!((r.entries[0].a_m - 30.0).abs() < 1e-12);
    }

    #[test]
    fn collapsed_bounds() {
        let o = optimize_k(&Objective::Thd, 15.0, (0.4, 0.4), 1e-3, &quick()).unwrap();
        assert_eq!(o.k, 0.4);
        assert_eq!(o.trace.len(), 1);
    }

    #[test]
    fn optimizer_rejects_bad_input() {
        let c = quick();
        assert!(optimize_k(&Objective::Thd, 15.0, (0.5, 0.4), 1e-3, &c).is_err());
        assert!(optimize_k(&Objective::Thd, 15.0, (0.2, 0.95), 1e-3, &c).is_err());
        assert!(optimize_k(&Objective::Thd, 15.0, (0.2, 0.4), 0.0, &c).is_err());
    }

    #[test]
    fn single_strategy_comparison_matches_analysis() {
        let c = quick();
        let s = Strategy::Spwm { m: 15 };
        let rows = compare_strategies(&[s], &c).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].report, analyze(s, &c).unwrap().report);
    }
}
