//! Closed-form Fourier description of the pole voltage, and a direct-projection
//! Fourier oracle for sampled waveforms.
//!
//! Over one carrier cycle the leg output is `+E/2` for carrier angles within
//! `±α` of the cycle centre and `−E/2` elsewhere. Its Fourier series in the
//! carrier angle has
//!
//! ```text
//! a₀/2 = (E/2)(2α/π − 1),   aₙ = (2E/πn) sin(nα),   bₙ = 0
//! ```
//!
//! and the comparator fixes `α = π/2 (1 + H)`, so `a₀/2 = (E/2) H`. Evaluating
//! the carrier angle with the frequency-modulated phase `θ(t)` gives the pole
//! voltage in the active windows; in frozen windows it is clamped to `±E/2`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::carrier::{carrier_phase, CarrierSpec};
use crate::error::{domain, Result};
use crate::modulation::ModulatingWave;
use crate::spectrum::HarmonicSpectrum;
use crate::synth::{SampledWaveform, Sampling};

/// Commutation half-angle `α = π/2 (1 + H(phase))`.
pub fn commutation_angle_alpha(modulator: &ModulatingWave, phase: f64) -> f64 {
    FRAC_PI_2 * (1.0 + modulator.value(phase))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticVoltageParams {
    pub spec: CarrierSpec,
    pub modulator: ModulatingWave,
    pub dc_link: f64,
    /// Highest carrier harmonic kept in the series; 0 keeps only `(E/2)·H`.
    pub n_max: u32,
}

/// Pole voltage from the truncated Fourier series at time `t`.
pub fn analytic_pole_voltage(t: f64, p: &AnalyticVoltageParams) -> f64 {
    let half = p.dc_link / 2.0;
    if let Some(w) = p.spec.windows() {
        if !w.is_active(t) {
            let tr = t.rem_euclid(w.period);
            return if tr >= w.t2 && tr <= w.t3 { -half } else { half };
        }
    }
    let phase = p.spec.omega_m * t + FRAC_PI_2;
    let envelope = p.modulator.value(phase);
    let alpha = FRAC_PI_2 * (1.0 + envelope);
    let theta = carrier_phase(t, &p.spec);
    let series: f64 = (1..=p.n_max)
        .map(|n| {
            let n = f64::from(n);
            (n * alpha).sin() * (n * theta).cos() / n
        })
        .sum();
    half * envelope + 4.0 / PI * half * series
}

/// [`analytic_pole_voltage`] on a synthesis grid.
pub fn analytic_pole_waveform(
    p: &AnalyticVoltageParams,
    sampling: Sampling,
) -> Result<SampledWaveform> {
    let f = p.spec.omega_m / TAU;
    let fs = f * sampling.samples_per_period as f64;
    let samples = (0..sampling.len())
        .map(|k| analytic_pole_voltage(k as f64 / fs, p))
        .collect();
    SampledWaveform::new(samples, fs, f, sampling.n_periods)
}

/// Fourier coefficients by direct projection onto `cos`/`sin` of each order.
///
/// Uniform weights on the periodic grid (the trapezoidal rule). Angles are
/// reduced with integer arithmetic before evaluation.
pub fn fourier_coefficients_numeric(
    w: &SampledWaveform,
    max_order: usize,
) -> Result<HarmonicSpectrum> {
    let per_period = w.samples_per_period();
    if 2 * max_order >= per_period {
        return Err(domain(
            "max_order",
            max_order as f64,
            "orders below the Nyquist order",
        ));
    }
    let n = w.len() as f64;
    let step = TAU / per_period as f64;
    let mut amplitudes = Vec::with_capacity(max_order + 1);
    let mut phases = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let (mut c, mut s) = (0.0, 0.0);
        for (j, &x) in w.samples().iter().enumerate() {
            let angle = step * ((order * j) % per_period) as f64;
            c += x * angle.cos();
            s += x * angle.sin();
        }
        if order == 0 {
            let mean = c / n;
            amplitudes.push(mean.abs());
            phases.push(if mean < 0.0 { PI } else { 0.0 });
        } else {
            let (a, b) = (2.0 * c / n, 2.0 * s / n);
            amplitudes.push(a.hypot(b));
            phases.push((-b).atan2(a));
        }
    }
    Ok(HarmonicSpectrum {
        fundamental_hz: w.fundamental_hz(),
        amplitudes,
        phases,
    })
}
