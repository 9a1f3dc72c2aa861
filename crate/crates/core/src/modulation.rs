//! Modulating waves.
//!
//! Phases are expressed in the sine convention: a phase of zero is the rising
//! zero crossing and `π/2` is the positive peak. The harmonic-injection wave
//!
//! ```text
//! H(x) = 1.15 sin x + 0.27 sin 3x − 0.029 sin 9x
//! ```
//!
//! is the cosine form `1.15 cos y − 0.27 cos 3y − 0.029 cos 9y` shifted so that
//! `y = x − π/2`. Both forms contain only odd harmonics, so `H(x + π) = −H(x)`.

use std::f64::consts::{FRAC_PI_2, PI};

/// Coefficients of the harmonic-injection wave for orders 1, 3 and 9.
pub const INJECTION_COEFFS: [(u32, f64); 3] = [(1, 1.15), (3, 0.27), (9, -0.029)];

/// Phase offsets of phases A, B and C.
pub const PHASE_OFFSETS: [f64; 3] = [0.0, -2.0 * PI / 3.0, 2.0 * PI / 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulatorKind {
    Sinusoidal,
    HarmonicInjection,
}

/// A modulating (reference) wave for one inverter leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatingWave {
    pub kind: ModulatorKind,
    /// Dimensionless scale applied to the whole wave.
    pub amplitude_index: f64,
    pub phase_offset_rad: f64,
}

impl ModulatingWave {
    pub fn new(kind: ModulatorKind, amplitude_index: f64) -> Self {
        ModulatingWave {
            kind,
            amplitude_index,
            phase_offset_rad: 0.0,
        }
    }

    pub fn sinusoidal(amplitude_index: f64) -> Self {
        Self::new(ModulatorKind::Sinusoidal, amplitude_index)
    }

    pub fn harmonic_injection(amplitude_index: f64) -> Self {
        Self::new(ModulatorKind::HarmonicInjection, amplitude_index)
    }

    /// The same wave shifted by `offset` radians.
    pub fn with_phase_offset(self, offset: f64) -> Self {
        ModulatingWave {
            phase_offset_rad: offset,
            ..self
        }
    }

    /// The three phase-shifted copies of this wave (A, B, C).
    pub fn three_phase(self) -> [ModulatingWave; 3] {
        PHASE_OFFSETS.map(|offset| self.with_phase_offset(offset))
    }

    /// Value at `phase` (sine convention, before the per-phase offset).
    pub fn value(&self, phase: f64) -> f64 {
        modulator_value(self, phase)
    }

    /// Value at time `t` measured from the positive peak of phase A.
    pub fn value_at_time(&self, t: f64, omega_m: f64) -> f64 {
        modulator_value(self, omega_m * t + FRAC_PI_2)
    }
}

pub fn modulator_value(wave: &ModulatingWave, phase: f64) -> f64 {
    let x = phase + wave.phase_offset_rad;
    let shape = match wave.kind {
        ModulatorKind::Sinusoidal => x.sin(),
        ModulatorKind::HarmonicInjection => INJECTION_COEFFS
            .iter()
            .map(|&(order, coeff)| coeff * (f64::from(order) * x).sin())
            .sum(),
    };
    wave.amplitude_index * shape
}
