//! Comparator synthesis of inverter leg (pole) voltages.
//!
//! Each sample compares the modulating wave against the triangular carrier and
//! outputs `+E/2` when the modulator is above, `−E/2` when below. The triangle
//! sits at its trough whenever `θ ≡ 0 (mod 2π)`, so every carrier cycle centres
//! a positive pulse of half-width `α = π/2·(1 + H)` on `θ = 0`. During frozen
//! windows the carrier is parked at `±1`, which clamps the output to the sign
//! of the modulator.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::carrier::{carrier_phase, carrier_value, CarrierLaw, CarrierSpec};
use crate::error::{Error, Result};
use crate::modulation::ModulatingWave;

/// Default number of samples per fundamental period: `3·2¹³`.
///
/// Divisible by 3 so that the 120° phase delay is a whole number of samples.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 24_576;

/// Uniformly sampled periodic signal covering whole fundamental periods.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    samples: Vec<f64>,
    sample_rate: f64,
    fundamental_hz: f64,
    n_periods: usize,
}

impl SampledWaveform {
    /// Wraps `samples`, checking that they hold exactly `n_periods` periods
    /// at an even number of samples per period.
    pub fn new(
        samples: Vec<f64>,
        sample_rate: f64,
        fundamental_hz: f64,
        n_periods: usize,
    ) -> Result<Self> {
        if !(fundamental_hz > 0.0 && sample_rate > 0.0) || n_periods == 0 {
            return Err(Error::Config(format!(
                "sample rate {sample_rate} Hz, fundamental {fundamental_hz} Hz and \
                 {n_periods} periods must all be positive"
            )));
        }
        let ratio = sample_rate / fundamental_hz;
        let per_period = ratio.round();
        if (ratio - per_period).abs() > 1e-9 * ratio || !(per_period as usize).is_multiple_of(2) {
            return Err(Error::Config(format!(
                "sample rate / fundamental = {ratio} is not an even integer"
            )));
        }
        let expected = per_period as usize * n_periods;
        if samples.len() != expected {
            return Err(Error::Config(format!(
                "{} samples given, {expected} needed for {n_periods} periods",
                samples.len()
            )));
        }
        Ok(SampledWaveform {
            samples,
            sample_rate,
            fundamental_hz,
            n_periods,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn fundamental_hz(&self) -> f64 {
        self.fundamental_hz
    }

    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples.len() / self.n_periods
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|i| self.time(i))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    /// Number of level changes, counting the wrap from the last sample to the first.
    pub fn edge_count(&self) -> usize {
        let n = self.samples.len();
        (0..n)
            .filter(|&i| self.samples[i] != self.samples[(i + 1) % n])
            .count()
    }

    /// Pointwise `self − other` on the same grid.
    pub fn difference(&self, other: &SampledWaveform) -> Result<SampledWaveform> {
        if self.samples.len() != other.samples.len() || self.sample_rate != other.sample_rate {
            return Err(Error::Config("waveforms are on different grids".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SampledWaveform {
            samples,
            ..*self
        })
    }

    /// Copy with the samples circularly delayed by `shift` (positive = later).
    fn delayed(&self, shift: usize) -> SampledWaveform {
        let mut samples = self.samples.clone();
        samples.rotate_right(shift % self.samples.len());
        SampledWaveform {
            samples,
            ..*self
        }
    }
}

/// Sampling grid for synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples_per_period: usize,
    pub n_periods: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            n_periods: 1,
        }
    }
}

impl Sampling {
    pub fn new(samples_per_period: usize, n_periods: usize) -> Self {
        Sampling {
            samples_per_period,
            n_periods,
        }
    }

    fn check(&self) -> Result<()> {
        if self.samples_per_period < 2 || !self.samples_per_period.is_multiple_of(2) || self.n_periods == 0
        {
            return Err(Error::Config(format!(
                "{} samples per period over {} periods: need an even count ≥ 2 and ≥ 1 period",
                self.samples_per_period, self.n_periods
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples_per_period * self.n_periods
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Triangle carrier level at time `t`: trough whenever `θ(t) ≡ 0`.
pub fn carrier_signal(t: f64, spec: &CarrierSpec) -> f64 {
    carrier_value(carrier_phase(t, spec) - FRAC_PI_2)
}

fn check_synchronous(spec: &CarrierSpec) -> Result<()> {
    if let CarrierLaw::TruncatedCosSquared { .. } = spec.law {
        spec.pulse_count()?;
    }
    Ok(())
}

/// Modulator and carrier closer than this are a tie; the output holds its state.
///
/// Zero crossings of the modulator can coincide with carrier zero crossings.
/// Those ties must resolve the same way in both half-waves.
const TIE_TOLERANCE: f64 = 1e-9;

/// Compares `modulator` against the carrier at times `(k − delay)/fs`.
fn compare(
    modulator: &ModulatingWave,
    spec: &CarrierSpec,
    dc_link: f64,
    sampling: Sampling,
    carrier_delay: f64,
) -> Vec<f64> {
    let fs = sampling.samples_per_period as f64 * spec.omega_m / TAU;
    let half = dc_link / 2.0;
    let mut state = None;
    (0..sampling.len())
        .map(|k| {
            let t = k as f64 / fs;
            let m = modulator.value_at_time(t, spec.omega_m);
            let c = carrier_signal(t - carrier_delay, spec);
            let high = if m - c > TIE_TOLERANCE {
                true
            } else if c - m > TIE_TOLERANCE {
                false
            } else {
                state.unwrap_or(m >= 0.0)
            };
            state = Some(high);
            if high {
                half
            } else {
                -half
            }
        })
        .collect()
}

pub fn synthesize_pole_voltage(
    modulator: &ModulatingWave,
    spec: &CarrierSpec,
    dc_link: f64,
    sampling: Sampling,
) -> Result<SampledWaveform> {
    sampling.check()?;
    check_synchronous(spec)?;
    let samples = compare(modulator, spec, dc_link, sampling, 0.0);
    let f = spec.omega_m / TAU;
    SampledWaveform::new(
        samples,
        f * sampling.samples_per_period as f64,
        f,
        sampling.n_periods,
    )
}

/// Pole and line-to-line voltages of a three-leg inverter.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhase {
    /// `V_A`, `V_B`, `V_C`.
    pub poles: [SampledWaveform; 3],
    /// `V_AB`, `V_BC`, `V_CA`.
    pub line_to_line: [SampledWaveform; 3],
    /// Whether the pulse count is an odd multiple of 3.
    pub balanced_order: bool,
}

impl ThreePhase {
    pub fn v_ab(&self) -> &SampledWaveform {
        &self.line_to_line[0]
    }
}

/// Synthesizes phases A, B and C from `modulator` (offsets 0, −2π/3, +2π/3).
///
/// A fixed-frequency carrier is shared by the three legs. A truncated law is
/// synchronized with each leg's own modulator, so legs B and C are legs A
/// delayed by one and two thirds of a period.
pub fn synthesize_three_phase(
    modulator: &ModulatingWave,
    spec: &CarrierSpec,
    dc_link: f64,
    sampling: Sampling,
) -> Result<ThreePhase> {
    sampling.check()?;
    check_synchronous(spec)?;
    let order = spec.mean_order().round() as u64;
    let balanced_order = order % 2 == 1 && order.is_multiple_of(3);
    if !balanced_order {
        log::warn!(
            "pulse count {} is not an odd multiple of 3; expect even and triplen line-to-line harmonics",
            spec.mean_order()
        );
    }

    let f = spec.omega_m / TAU;
    let fs = f * sampling.samples_per_period as f64;
    let wrap = |samples| SampledWaveform::new(samples, fs, f, sampling.n_periods);
    let legs = modulator.three_phase();
    let poles: [SampledWaveform; 3] = match spec.law {
        CarrierLaw::FixedFrequency { .. } => {
            let [a, b, c] = legs.map(|leg| compare(&leg, spec, dc_link, sampling, 0.0));
            [wrap(a)?, wrap(b)?, wrap(c)?]
        }
        CarrierLaw::TruncatedCosSquared { .. } => {
            let base = ModulatingWave {
                phase_offset_rad: 0.0,
                ..*modulator
            };
            let a = wrap(compare(&base, spec, dc_link, sampling, 0.0))?;
            let period = spec.period();
            let per_period = sampling.samples_per_period;
            let mut delayed = legs[1..].iter().map(|leg| {
                // a lagging offset −φ delays the leg by φ/2π of a period
                let delay = (-leg.phase_offset_rad / TAU).rem_euclid(1.0);
                let shift = delay * per_period as f64;
                if (shift - shift.round()).abs() < 1e-9 {
                    Ok(a.delayed(shift.round() as usize))
                } else {
                    let m = ModulatingWave {
                        phase_offset_rad: leg.phase_offset_rad,
                        ..*modulator
                    };
                    wrap(compare(&m, spec, dc_link, sampling, delay * period))
                }
            });
            let b = delayed.next().expect("three legs")?;
            let c = delayed.next().expect("three legs")?;
            [a, b, c]
        }
    };
    let line_to_line = [
        poles[0].difference(&poles[1])?,
        poles[1].difference(&poles[2])?,
        poles[2].difference(&poles[0])?,
    ];
    Ok(ThreePhase {
        poles,
        line_to_line,
        balanced_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::switching_windows;
    use std::f64::consts::PI;

    const W: f64 = 100.0 * PI;

    fn fmtc3(k: f64) -> CarrierSpec {
        CarrierSpec::for_mean_order(k, 15.0, W).unwrap()
    }

    #[test]
    fn waveform_rejects_odd_or_fractional_rates() {
        assert!(SampledWaveform::new(vec![0.0; 9], 450.0, 50.0, 1).is_err());
        assert!(SampledWaveform::new(vec![0.0; 10], 510.0, 50.0, 1).is_err());
        assert!(SampledWaveform::new(vec![0.0; 10], 500.0, 50.0, 2).is_err());
        assert!(SampledWaveform::new(vec![0.0; 20], 500.0, 50.0, 2).is_ok());
    }

    #[test]
    fn synthesis_rejects_bad_sampling() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let s = fmtc3(0.5);
        assert!(synthesize_pole_voltage(&m, &s, 1.0, Sampling::new(1001, 1)).is_err());
        assert!(synthesize_pole_voltage(&m, &s, 1.0, Sampling::new(1000, 0)).is_err());
        let fractional = CarrierSpec::truncated(90.0, 0.5, W).unwrap();
        assert!(matches!(
            synthesize_pole_voltage(&m, &fractional, 1.0, Sampling::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn negative_peak_window_is_clamped_low() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let v = synthesize_pole_voltage(&m, &fmtc3(0.5), 1.0, Sampling::default()).unwrap();
        for (t, x) in v.times().zip(v.samples()) {
            if t > 7.5e-3 + 1e-9 && t < 12.5e-3 - 1e-9 {
                assert_eq!(*x, -0.5, "t = {t}");
            }
        }
    }

    #[test]
    fn thirty_edges_at_fifteen_pulses() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let v = synthesize_pole_voltage(&m, &fmtc3(0.5), 1.0, Sampling::default()).unwrap();
        assert_eq!(v.edge_count(), 30);
    }

    #[test]
    fn frozen_windows_follow_modulator_sign() {
        let m = ModulatingWave::harmonic_injection(1.0);
        for k in [0.2, 0.6, 0.8] {
            let v = synthesize_pole_voltage(&m, &fmtc3(k), 2.0, Sampling::default()).unwrap();
            let w = switching_windows(k, W).unwrap();
            for (t, x) in v.times().zip(v.samples()) {
                if !w.is_active(t) {
                    let want = if m.value_at_time(t, W) >= 0.0 { 1.0 } else { -1.0 };
                    assert_eq!(*x, want, "K = {k}, t = {t}");
                }
            }
        }
    }

    #[test]
    fn half_wave_symmetry_of_pole_voltage() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let v = synthesize_pole_voltage(&m, &fmtc3(0.4), 1.0, Sampling::default()).unwrap();
        let n = v.len();
        let s = v.samples();
        for i in 0..n / 2 {
            assert_eq!(s[i], -s[i + n / 2], "sample {i}");
        }
    }

    #[test]
    fn line_to_line_is_pointwise_difference() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let tp = synthesize_three_phase(&m, &fmtc3(0.5), 1.0, Sampling::default()).unwrap();
        assert!(tp.balanced_order);
        for i in 0..tp.poles[0].len() {
            let want = tp.poles[0].samples()[i] - tp.poles[1].samples()[i];
            assert_eq!(tp.v_ab().samples()[i], want);
        }
    }

    #[test]
    fn spwm_line_to_line_has_three_levels() {
        let m = ModulatingWave::sinusoidal(1.0);
        let s = CarrierSpec::fixed(15, W).unwrap();
        let tp = synthesize_three_phase(&m, &s, 1.0, Sampling::default()).unwrap();
        let mut levels: Vec<f64> = tp.v_ab().samples().to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        assert_eq!(levels, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn legs_are_delayed_copies_for_the_truncated_law() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let tp = synthesize_three_phase(&m, &fmtc3(0.3), 1.0, Sampling::new(600, 1)).unwrap();
        let a = tp.poles[0].samples();
        let b = tp.poles[1].samples();
        for i in 0..600 {
            assert_eq!(b[(i + 200) % 600], a[i]);
        }
    }

    #[test]
    fn fractional_delay_matches_direct_evaluation() {
        // 512 samples per period: the T/3 delay is not a whole sample
        let m = ModulatingWave::harmonic_injection(1.0);
        let spec = fmtc3(0.5);
        let tp = synthesize_three_phase(&m, &spec, 1.0, Sampling::new(512, 1)).unwrap();
        let period = spec.period();
        let b = tp.poles[1].samples();
        for (i, x) in b.iter().enumerate() {
            let t = i as f64 * period / 512.0;
            let mv = m.value_at_time(t - period / 3.0, W);
            let c = carrier_signal(t - period / 3.0, &spec);
            if (mv - c).abs() > 1e-9 {
                assert_eq!(*x, if mv > c { 0.5 } else { -0.5 });
            }
        }
    }

    #[test]
    fn unbalanced_order_is_flagged() {
        let m = ModulatingWave::harmonic_injection(1.0);
        let s = CarrierSpec::for_mean_order(0.5, 14.0, W).unwrap();
        let tp = synthesize_three_phase(&m, &s, 1.0, Sampling::new(1200, 1)).unwrap();
        assert!(!tp.balanced_order);
    }

    #[test]
    fn zero_crossing_ties_keep_half_wave_symmetry() {
        let m = ModulatingWave::harmonic_injection(1.0);
        for k in [0.15, 0.55, 0.8, 0.9] {
            let w = synthesize_pole_voltage(&m, &fmtc3(k), 1.0, Sampling::default()).unwrap();
            let x = w.samples();
            let half = x.len() / 2;
            assert!((0..half).all(|i| x[i] == -x[i + half]), "K = {k}");
            assert_eq!(w.mean(), 0.0);
        }
    }
}
