//! Synthesis and harmonic analysis of three-phase PWM inverter voltages.
//!
//! The crate models a two-level inverter driven either by a fixed-frequency
//! triangular carrier (SPWM, HISPWM) or by a carrier whose instantaneous
//! frequency follows a truncated squared-sine law synchronized with the
//! modulating wave. Switching then concentrates around the modulator zero
//! crossings and stops near its peaks.
//!
//! ```
//! use pwm_lab::{analyze, AnalysisConfig, Strategy};
//!
//! let cfg = AnalysisConfig::default();
//! let report = analyze(Strategy::Fmtc3 { k: 0.5, m_bar: 15.0 }, &cfg)?.report;
//! assert!(report.thd_percent > 0.0);
//! # Ok::<(), pwm_lab::Error>(())
//! ```

pub mod carrier;
pub mod error;
pub mod modulation;
pub mod motor;
pub mod series;
pub mod spectrum;
pub mod sweep;
pub mod synth;

pub use carrier::{
    carrier_phase, carrier_value, instantaneous_order, mean_modulation_order, solve_a_m,
    switching_windows, CarrierLaw, CarrierSpec, SwitchingWindows,
};
pub use error::{Error, Result};
pub use modulation::{modulator_value, ModulatingWave, ModulatorKind};
pub use motor::{derive_sensitive_orders, sensitivity_score, MotorSensitivityProfile};
pub use series::{
    analytic_pole_voltage, analytic_pole_waveform, commutation_angle_alpha,
    fourier_coefficients_numeric, AnalyticVoltageParams,
};
pub use spectrum::{
    central_cluster_order, df, harmonic_spectrum, lowest_order_harmonic, thd, DistortionReport,
    HarmonicSpectrum,
};
pub use sweep::{
    analyze, compare_strategies, optimize_k, sweep_k, Analysis, AnalysisConfig, Objective,
    Optimum, Strategy, SweepResult,
};
pub use synth::{
    carrier_signal, synthesize_pole_voltage, synthesize_three_phase, SampledWaveform, Sampling,
    ThreePhase,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/carrier.md")]
    mod carrier {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/motor.md")]
    mod motor {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
