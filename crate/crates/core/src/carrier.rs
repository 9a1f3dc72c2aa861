//! Triangular carriers with fixed or frequency-modulated pulsation.
//!
//! Time is measured from the positive peak of the phase-A modulator. The
//! truncated law sets the instantaneous carrier pulsation to
//!
//! ```text
//! ω_i(t) = A_M · ω_m · max(0, sin²(ω_m t) − K)
//! ```
//!
//! which peaks at the modulator zero crossings (`ω_m t = π/2, 3π/2`) and is held
//! at zero around the modulator extremes. The mean of `ω_i / ω_m` over a period
//! is the pulse count `M̄`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{domain, Error, Result};

/// Largest distance from an integer tolerated when `M̄` must be whole.
pub const INTEGER_ORDER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierLaw {
    /// Constant carrier at `order` times the modulating frequency.
    FixedFrequency { order: u32 },
    /// Truncated squared-sinusoid frequency law.
    TruncatedCosSquared { a_m: f64, k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierSpec {
    pub law: CarrierLaw,
    /// Modulating pulsation in rad/s.
    pub omega_m: f64,
}

impl CarrierSpec {
    pub fn fixed(order: u32, omega_m: f64) -> Result<Self> {
        if order == 0 {
            return Err(domain("M", 0.0, "positive integers"));
        }
        check_omega(omega_m)?;
        Ok(CarrierSpec {
            law: CarrierLaw::FixedFrequency { order },
            omega_m,
        })
    }

    pub fn truncated(a_m: f64, k: f64, omega_m: f64) -> Result<Self> {
        check_k(k)?;
        if !(a_m > 0.0 && a_m.is_finite()) {
            return Err(domain("A_M", a_m, "(0, ∞)"));
        }
        check_omega(omega_m)?;
        Ok(CarrierSpec {
            law: CarrierLaw::TruncatedCosSquared { a_m, k },
            omega_m,
        })
    }

    /// Truncated law with `A_M` solved so the period holds `m_bar` pulses.
    pub fn for_mean_order(k: f64, m_bar: f64, omega_m: f64) -> Result<Self> {
        let a_m = solve_a_m(k, m_bar)?;
        Self::truncated(a_m, k, omega_m)
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega_m
    }

    pub fn mean_order(&self) -> f64 {
        mean_modulation_order(self)
    }

    /// `M̄` as an integer, or a configuration error when it is not whole.
    pub fn pulse_count(&self) -> Result<u32> {
        let m = self.mean_order();
        let rounded = m.round();
        if rounded < 1.0 || (m - rounded).abs() > INTEGER_ORDER_TOL {
            return Err(Error::Config(format!(
                "mean modulation order {m} is not a positive integer"
            )));
        }
        Ok(rounded as u32)
    }

    /// Peak instantaneous modulation order, `A_M (1 − K)` for the truncated law.
    pub fn peak_order(&self) -> f64 {
        match self.law {
            CarrierLaw::FixedFrequency { order } => f64::from(order),
            CarrierLaw::TruncatedCosSquared { a_m, k } => a_m * (1.0 - k),
        }
    }

    pub fn windows(&self) -> Option<SwitchingWindows> {
        match self.law {
            CarrierLaw::FixedFrequency { .. } => None,
            CarrierLaw::TruncatedCosSquared { k, .. } => Some(window_bounds(k, self.omega_m)),
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if (0.0..1.0).contains(&k) {
        Ok(())
    } else {
        Err(domain("K", k, "[0, 1)"))
    }
}

fn check_omega(omega_m: f64) -> Result<()> {
    if omega_m > 0.0 && omega_m.is_finite() {
        Ok(())
    } else {
        Err(domain("ω_m", omega_m, "(0, ∞)"))
    }
}

/// Phase accrued over one active window per unit `A_M`:
/// `sin(2θ₁)/2 + (1 − 2K)θ₁` with `θ₁ = arccos √K`.
fn window_area(k: f64) -> f64 {
    let theta1 = k.sqrt().acos();
    (2.0 * theta1).sin() / 2.0 + (1.0 - 2.0 * k) * theta1
}

/// Closed-form `A_M` giving `m_bar` pulses per period at truncation level `k`.
pub fn solve_a_m(k: f64, m_bar: f64) -> Result<f64> {
    check_k(k)?;
    if !(m_bar > 0.0 && m_bar.is_finite()) {
        return Err(domain("M̄", m_bar, "(0, ∞)"));
    }
    Ok(PI * m_bar / window_area(k))
}

/// Average of the instantaneous modulation order over one modulating period.
pub fn mean_modulation_order(spec: &CarrierSpec) -> f64 {
    match spec.law {
        CarrierLaw::FixedFrequency { order } => f64::from(order),
        CarrierLaw::TruncatedCosSquared { a_m, k } => a_m / PI * window_area(k),
    }
}

/// Instantaneous modulation order `ω_i / ω_m` at time `t` (clipped at zero).
pub fn instantaneous_order(t: f64, spec: &CarrierSpec) -> f64 {
    match spec.law {
        CarrierLaw::FixedFrequency { order } => f64::from(order),
        CarrierLaw::TruncatedCosSquared { a_m, k } => {
            let s = (spec.omega_m * t).sin();
            (a_m * (s * s - k)).max(0.0)
        }
    }
}

/// Boundaries of the two active (switching) windows within one period.
///
/// Switching is allowed on `(t1, t2)` and `(t3, t4)`; the carrier is frozen on
/// `[0, t1]`, `[t2, t3]` and `[t4, T]`, which are centred on the modulator
/// extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingWindows {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    /// `arccos √K`: half the angular width of an active window.
    pub active_halfwidth_rad: f64,
    /// `arcsin √K`: half the angular width of a frozen window.
    pub frozen_halfwidth_rad: f64,
    pub period: f64,
}

impl SwitchingWindows {
    /// Whether `t` (any period) falls strictly inside an active window.
    pub fn is_active(&self, t: f64) -> bool {
        let tr = t.rem_euclid(self.period);
        (tr > self.t1 && tr < self.t2) || (tr > self.t3 && tr < self.t4)
    }

    pub fn active_halfwidth_s(&self) -> f64 {
        self.active_halfwidth_rad * self.period / TAU
    }

    /// Frozen intervals within `[0, T]`, in time order.
    pub fn frozen_intervals(&self) -> [(f64, f64); 3] {
        [(0.0, self.t1), (self.t2, self.t3), (self.t4, self.period)]
    }
}

pub fn switching_windows(k: f64, omega_m: f64) -> Result<SwitchingWindows> {
    check_k(k)?;
    check_omega(omega_m)?;
    Ok(window_bounds(k, omega_m))
}

fn window_bounds(k: f64, omega_m: f64) -> SwitchingWindows {
    let active = k.sqrt().acos();
    let frozen = k.sqrt().asin();
    SwitchingWindows {
        t1: (FRAC_PI_2 - active) / omega_m,
        t2: (FRAC_PI_2 + active) / omega_m,
        t3: (3.0 * FRAC_PI_2 - active) / omega_m,
        t4: (3.0 * FRAC_PI_2 + active) / omega_m,
        active_halfwidth_rad: active,
        frozen_halfwidth_rad: frozen,
        period: TAU / omega_m,
    }
}

/// Carrier phase `θ(t) = ∫₀ᵗ ω_i dτ`, with `θ(0) = 0`.
///
/// Continuous and nondecreasing; constant across frozen windows; gains
/// `2π·M̄` per modulating period.
pub fn carrier_phase(t: f64, spec: &CarrierSpec) -> f64 {
    let x = spec.omega_m * t;
    match spec.law {
        CarrierLaw::FixedFrequency { order } => f64::from(order) * x,
        CarrierLaw::TruncatedCosSquared { a_m, k } => {
            let active = k.sqrt().acos();
            // antiderivative of A_M (sin² x − K) in x
            let prim = |x: f64| a_m * ((0.5 - k) * x - (2.0 * x).sin() / 4.0);
            let per_window = a_m * window_area(k);
            let periods = (x / TAU).floor();
            let xr = x - periods * TAU;
            let mut theta = periods * 2.0 * per_window;
            for centre in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
                let (lo, hi) = (centre - active, centre + active);
                if xr >= hi {
                    theta += per_window;
                } else {
                    if xr > lo {
                        theta += prim(xr) - prim(lo);
                    }
                    break;
                }
            }
            theta
        }
    }
}

/// Unit triangle of period `2π`: zero and rising at `θ = 0`, `+1` at `π/2`.
pub fn carrier_value(theta: f64) -> f64 {
    2.0 / PI * theta.sin().asin()
}
