//! Harmonic spectra and distortion measures.
//!
//! Spectra hold peak amplitudes at integer multiples of the fundamental, so a
//! component `A cos(nωt + φ)` appears as `amplitudes[n] = A`, `phases[n] = φ`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};
use crate::synth::SampledWaveform;

/// Harmonic limit used for THD and DF unless configured otherwise.
pub const DEFAULT_HARMONIC_LIMIT: usize = 100;
/// Limit matching a 50-harmonic power analyzer.
pub const COMPAT_HARMONIC_LIMIT: usize = 50;
/// Relative level above which a harmonic counts as relevant.
pub const DEFAULT_LOH_THRESHOLD: f64 = 0.02;
/// Members of the dominant cluster stay within this fraction of its peak (−6 dB).
pub const CLUSTER_MEMBER_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub fundamental_hz: f64,
    /// Peak amplitude per harmonic order; index 0 is the DC term.
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl HarmonicSpectrum {
    pub fn from_amplitudes(fundamental_hz: f64, amplitudes: Vec<f64>) -> Self {
        let phases = vec![0.0; amplitudes.len()];
        HarmonicSpectrum {
            fundamental_hz,
            amplitudes,
            phases,
        }
    }

    pub fn max_order(&self) -> usize {
        self.amplitudes.len().saturating_sub(1)
    }

    pub fn amplitude(&self, order: usize) -> f64 {
        self.amplitudes.get(order).copied().unwrap_or(0.0)
    }

    pub fn fundamental(&self) -> f64 {
        self.amplitude(1)
    }

    /// Orders `0..=max_order` only.
    pub fn truncated(&self, max_order: usize) -> HarmonicSpectrum {
        let n = (max_order + 1).min(self.amplitudes.len());
        HarmonicSpectrum {
            fundamental_hz: self.fundamental_hz,
            amplitudes: self.amplitudes[..n].to_vec(),
            phases: self.phases[..n].to_vec(),
        }
    }

    /// `V₀² + Σ Vₙ²/2`, the mean square of the represented signal.
    pub fn mean_square(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| if n == 0 { a * a } else { a * a / 2.0 })
            .sum()
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
        self
    }
}

/// Spectrum of `w` up to `max_order` by FFT over the whole record.
pub fn harmonic_spectrum(w: &SampledWaveform, max_order: usize) -> Result<HarmonicSpectrum> {
    let per_period = w.samples_per_period();
    let nyquist = per_period / 2;
    if max_order > nyquist {
        return Err(domain("max_order", max_order as f64, "orders up to Nyquist"));
    }
    let n = w.len();
    let mut buf: Vec<Complex<f64>> = w.samples().iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let periods = w.n_periods();
    let mut amplitudes = Vec::with_capacity(max_order + 1);
    let mut phases = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let x = buf[order * periods];
        // DC and Nyquist bins are not mirrored
        let scale = if order == 0 || order == nyquist { 1.0 } else { 2.0 };
        let (amp, phase) = if order == 0 || order == nyquist {
            let re = x.re * scale / n as f64;
            (re.abs(), if re < 0.0 { PI } else { 0.0 })
        } else {
            (x.norm() * scale / n as f64, x.im.atan2(x.re))
        };
        amplitudes.push(amp);
        phases.push(phase);
    }
    Ok(HarmonicSpectrum {
        fundamental_hz: w.fundamental_hz(),
        amplitudes,
        phases,
    })
}

fn check_fundamental(spec: &HarmonicSpectrum, what: &'static str) -> Result<f64> {
    let v1 = spec.fundamental();
    if v1 > 0.0 {
        Ok(v1)
    } else {
        Err(Error::UndefinedMeasure(what))
    }
}

/// Total harmonic distortion over orders `2..=harmonic_limit`, in percent.
pub fn thd(spec: &HarmonicSpectrum, harmonic_limit: usize) -> Result<f64> {
    let v1 = check_fundamental(spec, "THD")?;
    let sum: f64 = (2..=harmonic_limit.min(spec.max_order()))
        .map(|n| spec.amplitudes[n].powi(2))
        .sum();
    Ok(100.0 * sum.sqrt() / v1)
}

/// Distortion factor: THD with each harmonic attenuated by `1/n²`, in percent.
pub fn df(spec: &HarmonicSpectrum, harmonic_limit: usize) -> Result<f64> {
    let v1 = check_fundamental(spec, "DF")?;
    let sum: f64 = (2..=harmonic_limit.min(spec.max_order()))
        .map(|n| (spec.amplitudes[n] / (n * n) as f64).powi(2))
        .sum();
    Ok(100.0 * sum.sqrt() / v1)
}

/// Smallest order `n ≥ 2` whose amplitude reaches `threshold_pu · V₁`.
pub fn lowest_order_harmonic(spec: &HarmonicSpectrum, threshold_pu: f64) -> Option<usize> {
    let v1 = spec.fundamental();
    if v1 <= 0.0 {
        return None;
    }
    (2..=spec.max_order()).find(|&n| spec.amplitudes[n] >= threshold_pu * v1)
}

/// Amplitude-weighted centroid of the strongest sideband cluster at or above
/// order `pulse_count`.
///
/// The cluster grows outward from the largest harmonic at order ≥ `pulse_count`
/// while neighbouring harmonics (skipping at most one order, for the
/// vanishing even orders) stay above [`CLUSTER_MEMBER_FRACTION`] of the peak.
/// It may reach down to `pulse_count / 2`, below which the modulator's own
/// harmonics live.
pub fn central_cluster_order(spec: &HarmonicSpectrum, pulse_count: u32) -> Option<f64> {
    let a = &spec.amplitudes;
    let start = pulse_count.max(2) as usize;
    if start > spec.max_order() {
        return None;
    }
    let floor = ((pulse_count as usize).div_ceil(2)).max(2);
    let (peak_order, peak) = (start..a.len())
        .map(|n| (n, a[n]))
        .fold((start, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    if peak == 0.0 || peak <= 1e-9 * spec.fundamental() {
        return None;
    }
    let member = |n: usize| a[n] >= CLUSTER_MEMBER_FRACTION * peak;
    let mut hi = peak_order;
    while let Some(next) = (hi + 1..=(hi + 2).min(a.len() - 1)).find(|&n| member(n)) {
        hi = next;
    }
    let mut lo = peak_order;
    while let Some(next) = (lo.saturating_sub(2).max(floor)..lo).rev().find(|&n| member(n)) {
        lo = next;
    }
    let (weighted, total) = (lo..=hi).fold((0.0, 0.0), |(w, t), n| (w + n as f64 * a[n], t + a[n]));
    Some(weighted / total)
}

/// Figures of merit for one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    /// Fundamental amplitude in per-unit of the DC link.
    pub fundamental_pu: f64,
    pub thd_percent: f64,
    pub df_percent: f64,
    pub loh_order: Option<usize>,
    pub central_cluster_order: Option<f64>,
    pub harmonic_limit: usize,
    /// THD at [`COMPAT_HARMONIC_LIMIT`].
    pub thd_compat_percent: f64,
    /// DF at [`COMPAT_HARMONIC_LIMIT`].
    pub df_compat_percent: f64,
}

impl DistortionReport {
    /// Builds a report from the line-to-line spectrum (fundamental, THD, DF,
    /// LOH) and the pole spectrum (cluster location).
    pub fn from_spectra(
        line_to_line: &HarmonicSpectrum,
        pole: &HarmonicSpectrum,
        dc_link: f64,
        pulse_count: u32,
        harmonic_limit: usize,
        loh_threshold: f64,
    ) -> Result<Self> {
        let limited = line_to_line.truncated(harmonic_limit);
        Ok(DistortionReport {
            fundamental_pu: line_to_line.fundamental() / dc_link,
            thd_percent: thd(line_to_line, harmonic_limit)?,
            df_percent: df(line_to_line, harmonic_limit)?,
            loh_order: lowest_order_harmonic(&limited, loh_threshold),
            central_cluster_order: central_cluster_order(pole, pulse_count),
            harmonic_limit,
            thd_compat_percent: thd(line_to_line, COMPAT_HARMONIC_LIMIT)?,
            df_compat_percent: df(line_to_line, COMPAT_HARMONIC_LIMIT)?,
        })
    }
}

/// Spectrum normalized to per-unit of `dc_link`.
pub fn per_unit(spec: HarmonicSpectrum, dc_link: f64) -> HarmonicSpectrum {
    spec.scaled(1.0 / dc_link)
}
