//! Induction-motor slot-harmonic sensitivity.
//!
//! Supply harmonics at orders that coincide with rotor slot harmonics, or with
//! products of the rotor MMF, excite radial forces in the air gap. The score
//! aggregates the relative amplitude of the supply voltage at those orders. It
//! is a spectral proxy for vibration intensity and is not calibrated against
//! any acoustic measurement.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{domain, Error, Result};
use crate::spectrum::HarmonicSpectrum;

/// Highest order considered by [`derive_sensitive_orders`].
pub const MAX_SENSITIVE_ORDER: u32 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct MotorSensitivityProfile {
    pub rotor_bars: u32,
    pub pole_pairs: u32,
    /// Per-unit slip, in `[0, 0.1]`.
    pub slip: f64,
    pub supply_hz: f64,
    /// Series index `n` up to which slot and MMF families are generated.
    pub n_max: u32,
    /// Orders above this are dropped from the profile.
    pub order_ceiling: u32,
    /// Per-order weights; orders not listed weigh 1.
    pub weights: BTreeMap<u32, f64>,
}

impl MotorSensitivityProfile {
    pub fn new(rotor_bars: u32, pole_pairs: u32, slip: f64, supply_hz: f64) -> Result<Self> {
        if rotor_bars == 0 {
            return Err(domain("rotor_bars", 0.0, "integers ≥ 1"));
        }
        if pole_pairs == 0 {
            return Err(domain("pole_pairs", 0.0, "integers ≥ 1"));
        }
        if !(0.0..=0.1).contains(&slip) {
            return Err(domain("slip", slip, "[0, 0.1]"));
        }
        Ok(MotorSensitivityProfile {
            rotor_bars,
            pole_pairs,
            slip,
            supply_hz,
            n_max: 2,
            order_ceiling: 50,
            weights: BTreeMap::new(),
        })
    }

    /// 30 rotor bars, 2 pole pairs, no slip, 50 Hz supply, orders up to 50.
    pub fn paper_motor() -> Self {
        Self::new(30, 2, 0.0, 50.0).expect("valid constants")
    }

    pub fn with_weight(mut self, order: u32, weight: f64) -> Self {
        self.weights.insert(order, weight);
        self
    }

    pub fn weight(&self, order: u32) -> f64 {
        self.weights.get(&order).copied().unwrap_or(1.0)
    }

    /// Orders generated up to `n_max`, capped at `order_ceiling`.
    pub fn sensitive_orders(&self) -> BTreeSet<u32> {
        derive_sensitive_orders(self, self.n_max)
            .into_iter()
            .filter(|&n| n <= self.order_ceiling)
            .collect()
    }
}

/// Slot orders `round(n·Z/p·(1−s))` with sidebands `±2`, and MMF product
/// orders `2·(n·Z/p ± 1)`, for `n = 1..=n_max`.
///
/// Only orders in `2..=100` are kept.
pub fn derive_sensitive_orders(profile: &MotorSensitivityProfile, n_max: u32) -> BTreeSet<u32> {
    let ratio = f64::from(profile.rotor_bars) / f64::from(profile.pole_pairs);
    let mut orders = BTreeSet::new();
    for n in 1..=n_max {
        let slot = (f64::from(n) * ratio * (1.0 - profile.slip)).round();
        let mmf = f64::from(n) * ratio;
        let candidates = [
            slot - 2.0,
            slot,
            slot + 2.0,
            2.0 * (mmf - 1.0),
            2.0 * (mmf + 1.0),
        ];
        for c in candidates {
            if c >= 2.0 && c <= f64::from(MAX_SENSITIVE_ORDER) && c.fract() == 0.0 {
                orders.insert(c as u32);
            }
        }
    }
    orders
}

/// `sqrt(Σ (w_n·V_n/V₁)²)` over the profile's sensitive orders.
pub fn sensitivity_score(spec: &HarmonicSpectrum, profile: &MotorSensitivityProfile) -> Result<f64> {
    let v1 = spec.fundamental();
    if v1 == 0.0 {
        return Err(Error::UndefinedMeasure("sensitivity score"));
    }
    let sum: f64 = profile
        .sensitive_orders()
        .into_iter()
        .map(|n| {
            let r = profile.weight(n) * spec.amplitude(n as usize) / v1;
            r * r
        })
        .sum();
    Ok(sum.sqrt())
}
