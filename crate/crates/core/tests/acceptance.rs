//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Run with `cargo test -p pwm-lab --test acceptance -- --nocapture` to see
//! the lines and the convention table.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use pwm_lab::spectrum::{COMPAT_HARMONIC_LIMIT, DEFAULT_HARMONIC_LIMIT};
use pwm_lab::sweep::coarse_grid;
use pwm_lab::{
    analytic_pole_waveform, analyze, carrier_phase, derive_sensitive_orders,
    fourier_coefficients_numeric, harmonic_spectrum, instantaneous_order, optimize_k,
    sensitivity_score, solve_a_m, switching_windows, synthesize_pole_voltage,
    AnalysisConfig, AnalyticVoltageParams, CarrierSpec, ModulatingWave,
    MotorSensitivityProfile, Objective, SampledWaveform, Sampling, Strategy,
};

const F_M: f64 = 50.0;
const OMEGA: f64 = TAU * F_M;
const M_BAR: f64 = 15.0;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {tag}  {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// K = 0, 0.05, ..., 0.9.
fn k_grid() -> Vec<f64> {
    (0..=18).map(|i| i as f64 * 0.05).collect()
}

/// Simpson integral of the instantaneous frequency over one period.
fn phase_accrual_by_quadrature(spec: &CarrierSpec) -> f64 {
    let n = 200_000;
    let h = spec.period() / n as f64;
    let f = |t: f64| OMEGA * instantaneous_order(t, spec);
    let mut sum = f(0.0) + f(spec.period());
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn criterion_01_table_i() {
    // K, A_M, active half-width t1 in ms, A_M(1 − K)
    let table = [
        (0.2, 44.277, 3.524, 35.422),
        (0.3, 55.134, 3.155, 38.594),
        (0.4, 70.638, 2.820, 42.383),
        (0.5, 30.0 * PI, 2.5, 47.124),
        (0.6, 133.513, 2.180, 53.405),
        (0.7, 208.142, 1.845, 62.443),
        (0.8, 386.859, 1.476, 77.372),
    ];
    let tol = 1e-3;
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut exact = true;
    for &(k, a_m, t1_ms, central) in &table {
        let solved = solve_a_m(k, M_BAR).unwrap();
        let windows = switching_windows(k, OMEGA).unwrap();
        worst.0 = worst.0.max((solved - a_m).abs());
        worst.1 = worst.1.max((1e3 * windows.active_halfwidth_s() - t1_ms).abs());
        worst.2 = worst.2.max((solved * (1.0 - k) - central).abs());
        if k == 0.5 {
            exact = (solved - 30.0 * PI).abs() <= 4.0 * f64::EPSILON * 30.0 * PI;
        }
    }
    let elapsed = start.elapsed();
    let pass = worst.0 <= tol
        && worst.1 <= tol
        && worst.2 <= tol
        && exact
        && elapsed < Duration::from_secs(1);
    verdict(
        1,
        pass,
        &format!(
            "max |ΔA_M| = {:.2e}, max |Δt1| = {:.2e} ms, max |ΔA_M(1−K)| = {:.2e} (tol 1e-3), \
             K=0.5 exactly 30π: {exact}, {elapsed:?} (limit 1 s)",
            worst.0, worst.1, worst.2
        ),
    );
}

#[test]
fn criterion_02_pulse_count() {
    let start = Instant::now();
    let modulator = ModulatingWave::harmonic_injection(1.0);
    let mut failures = Vec::new();
    let mut worst_phase = 0.0f64;
    for k in k_grid() {
        let spec = CarrierSpec::for_mean_order(k, M_BAR, OMEGA).unwrap();
        let w = synthesize_pole_voltage(&modulator, &spec, 1.0, Sampling::default()).unwrap();
        let edges = w.edge_count();
        if edges != 30 {
            failures.push(format!("K={k:.2}: {edges} edges"));
        }
        let target = TAU * M_BAR;
        let closed = carrier_phase(spec.period(), &spec) - carrier_phase(0.0, &spec);
        let quad = phase_accrual_by_quadrature(&spec);
        worst_phase = worst_phase
            .max((closed - target).abs() / target)
            .max((quad - target).abs() / target);
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && worst_phase <= 1e-6 && elapsed < Duration::from_secs(10);
    verdict(
        2,
        pass,
        &format!(
            "edges per period = 30 for K in 0..0.9 step 0.05 {failures:?}, \
             max relative phase error {worst_phase:.2e} (tol 1e-6), {elapsed:?} (limit 10 s)"
        ),
    );
}

#[test]
fn criterion_03_frozen_clamp() {
    let spec = CarrierSpec::truncated(30.0 * PI, 0.5, OMEGA).unwrap();
    let modulator = ModulatingWave::harmonic_injection(1.0);
    let w = synthesize_pole_voltage(&modulator, &spec, 1.0, Sampling::default()).unwrap();
    let win = spec.windows().unwrap();
    let (mut checked, mut wrong) = (0, 0);
    for (i, &v) in w.samples().iter().enumerate() {
        let t = w.time(i);
        let expected = if t > win.t2 && t < win.t3 {
            Some(-0.5)
        } else if t < win.t1 || t > win.t4 {
            Some(0.5)
        } else {
            None
        };
        if let Some(e) = expected {
            checked += 1;
            if v != e {
                wrong += 1;
            }
        }
    }
    let bounds_ok = (win.t2 - 7.5e-3).abs() < 1e-12 && (win.t3 - 12.5e-3).abs() < 1e-12;
    verdict(
        3,
        wrong == 0 && bounds_ok && checked > 0,
        &format!("{wrong} of {checked} frozen-window samples off the clamp, (t2, t3) = (7.5, 12.5) ms: {bounds_ok}"),
    );
}

#[test]
fn criterion_04_cluster_location() {
    let cfg = AnalysisConfig::default();
    let centroid = |s| analyze(s, &cfg).unwrap().report.central_cluster_order.unwrap();
    let k05 = centroid(Strategy::Fmtc3 { k: 0.5, m_bar: M_BAR });
    let k03 = centroid(Strategy::Fmtc3 { k: 0.3, m_bar: M_BAR });
    let spwm = centroid(Strategy::Spwm { m: 15 });
    let checks = [
        (k05 - 47.0).abs() <= 1.0,
        (k03 - 38.6).abs() <= 1.5,
        (spwm - 15.0).abs() <= 0.5,
    ];
    verdict(
        4,
        checks.iter().all(|&c| c),
        &format!(
            "centroid K=0.5: {k05:.3} (47 ± 1) {}, K=0.3: {k03:.3} (38.6 ± 1.5) {}, SPWM: {spwm:.3} (15 ± 0.5) {}",
            checks[0], checks[1], checks[2]
        ),
    );
}

#[test]
fn criterion_05_table_ii() {
    // strategy, printed THD in percent, in the printed rank order
    let rows = [
        (Strategy::Fmtc3 { k: 0.2, m_bar: M_BAR }, 40.75),
        (Strategy::Fmtc3 { k: 0.3, m_bar: M_BAR }, 52.94),
        (Strategy::Fmtc3 { k: 0.5, m_bar: M_BAR }, 54.03),
        (Strategy::Fmtc3 { k: 0.7, m_bar: M_BAR }, 54.83),
        (Strategy::Fmtc3 { k: 0.6, m_bar: M_BAR }, 57.81),
        (Strategy::Spwm { m: 15 }, 70.23),
    ];
    let cfg = AnalysisConfig::default();
    let reports: Vec<_> = rows
        .iter()
        .map(|(s, _)| analyze(*s, &cfg).unwrap().report)
        .collect();

    println!("THD convention table (percent)");
    println!("{:<28} {:>8} {:>10} {:>10}", "strategy", "printed", "limit 50", "limit 100");
    for ((s, printed), r) in rows.iter().zip(&reports) {
        println!(
            "{:<28} {:>8.2} {:>10.2} {:>10.2}",
            s.to_string(),
            printed,
            r.thd_compat_percent,
            r.thd_percent
        );
    }

    let ranked = |values: Vec<f64>| values.windows(2).all(|w| w[0] < w[1]);
    let within = |values: Vec<f64>| {
        values
            .iter()
            .zip(&rows)
            .all(|(v, (_, printed))| (v - printed).abs() <= 6.0)
    };
    let at_50: Vec<f64> = reports.iter().map(|r| r.thd_compat_percent).collect();
    let at_100: Vec<f64> = reports.iter().map(|r| r.thd_percent).collect();
    assert_eq!(reports[0].harmonic_limit, DEFAULT_HARMONIC_LIMIT);
    assert_eq!(COMPAT_HARMONIC_LIMIT, 50);
    let rank_50 = ranked(at_50.clone());
    let rank_100 = ranked(at_100.clone());
    let abs_ok = within(at_50) || within(at_100);
    verdict(
        5,
        rank_50 && rank_100 && abs_ok,
        &format!(
            "rank order at limit 50: {rank_50}, at limit 100: {rank_100}, \
             all within ±6 points under one limit: {abs_ok}"
        ),
    );
}

#[test]
fn criterion_06_fundamental_ratio() {
    let cfg = AnalysisConfig::default();
    let v1 = |s| analyze(s, &cfg).unwrap().line_to_line.fundamental();
    let ratio = v1(Strategy::Fmtc3 { k: 0.5, m_bar: M_BAR }) / v1(Strategy::Spwm { m: 15 });
    verdict(6, ratio >= 1.10, &format!("V1(FMTC3 K=0.5)/V1(SPWM 15) = {ratio:.4} (≥ 1.10)"));
}

#[test]
fn criterion_07_oracle_equivalence() {
    let cfg = AnalysisConfig::default();
    let mut strategies = vec![Strategy::Spwm { m: 15 }, Strategy::Hispwm { m: 15 }];
    strategies.extend([0.0, 0.2, 0.3, 0.5, 0.6, 0.7, 0.8].map(|k| Strategy::Fmtc3 { k, m_bar: M_BAR }));
    let mut worst = 0.0f64;
    let mut count = 0;
    for s in strategies {
        let a = analyze(s, &cfg).unwrap();
        let waves: Vec<&SampledWaveform> = a
            .waveforms
            .poles
            .iter()
            .chain(a.waveforms.line_to_line.iter())
            .collect();
        for w in waves {
            let fft = harmonic_spectrum(w, 100).unwrap();
            let direct = fourier_coefficients_numeric(w, 100).unwrap();
            for n in 0..=100 {
                worst = worst.max((fft.amplitude(n) - direct.amplitude(n)).abs());
            }
            count += 1;
        }
    }

    let spec = CarrierSpec::truncated(30.0 * PI, 0.5, OMEGA).unwrap();
    let modulator = ModulatingWave::harmonic_injection(1.0);
    let synth = synthesize_pole_voltage(&modulator, &spec, 1.0, Sampling::default()).unwrap();
    let params = AnalyticVoltageParams {
        spec,
        modulator,
        dc_link: 1.0,
        n_max: 200,
    };
    let series = analytic_pole_waveform(&params, Sampling::default()).unwrap();
    let l2 = (series
        .samples()
        .iter()
        .zip(synth.samples())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / synth.len() as f64)
        .sqrt();

    verdict(
        7,
        worst <= 1e-8 && l2 < 0.05,
        &format!(
            "FFT vs projection max |Δ| = {worst:.2e} over {count} waveforms (tol 1e-8), \
             series vs comparator L² = {l2:.4} E (limit 0.05 E)"
        ),
    );
}

#[test]
fn criterion_08_symmetry() {
    let cfg = AnalysisConfig::default();
    let mut strategies = vec![Strategy::Spwm { m: 15 }, Strategy::Hispwm { m: 15 }];
    strategies.extend(k_grid().into_iter().map(|k| Strategy::Fmtc3 { k, m_bar: M_BAR }));
    let (mut dc, mut even, mut triplen) = (0.0f64, 0.0f64, 0.0f64);
    for s in strategies {
        let a = analyze(s, &cfg).unwrap();
        for w in a.waveforms.poles.iter().chain(a.waveforms.line_to_line.iter()) {
            dc = dc.max(w.mean().abs());
        }
        for ll in &a.waveforms.line_to_line {
            let spec = harmonic_spectrum(ll, 100).unwrap();
            for n in 2..=100 {
                if n % 2 == 0 {
                    even = even.max(spec.amplitude(n));
                }
                if n % 3 == 0 {
                    triplen = triplen.max(spec.amplitude(n));
                }
            }
        }
    }
    verdict(
        8,
        dc < 1e-6 && even < 1e-3 && triplen < 1e-3,
        &format!(
            "max DC {dc:.2e} E (< 1e-6), max even {even:.2e} pu, max triplen {triplen:.2e} pu (< 1e-3)"
        ),
    );
}

#[test]
fn criterion_09_sensitivity_proxy() {
    let cfg = AnalysisConfig::default();
    let motor = MotorSensitivityProfile::paper_motor();
    let score = |s| sensitivity_score(&analyze(s, &cfg).unwrap().line_to_line, &motor).unwrap();
    let spwm = score(Strategy::Spwm { m: 15 });
    let mut worst = (0.0, 0.0f64);
    for k in coarse_grid(0.3, 0.7) {
        let s = score(Strategy::Fmtc3 { k, m_bar: M_BAR });
        if s > worst.1 {
            worst = (k, s);
        }
    }
    let n1: Vec<u32> = derive_sensitive_orders(&motor, 1).into_iter().collect();
    let n2: Vec<u32> = derive_sensitive_orders(&motor, 2).into_iter().collect();
    let orders_ok = n1 == [13, 15, 17, 28, 32] && n2 == [13, 15, 17, 28, 30, 32, 58, 62];
    verdict(
        9,
        worst.1 < spwm && orders_ok,
        &format!(
            "max FMTC3 score {:.4} at K={:.2} vs SPWM {spwm:.4}, orders n=1 {n1:?}, n=2 {n2:?}",
            worst.1, worst.0
        ),
    );
}

#[test]
fn criterion_10_optimizer_soundness() {
    let cfg = AnalysisConfig::default();
    let bounds = (0.2, 0.7);
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for objective in [
        Objective::Thd,
        Objective::Sensitivity(MotorSensitivityProfile::paper_motor()),
    ] {
        let found = optimize_k(&objective, M_BAR, bounds, 1e-3, &cfg).unwrap();
        let fine: Vec<(f64, f64)> = (0..=50)
            .map(|i| {
                let k = bounds.0 + 0.01 * i as f64;
                (k, objective.evaluate(k, M_BAR, &cfg).unwrap())
            })
            .collect();
        let oracle = fine
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let coarse_best = fine
            .iter()
            .step_by(5)
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min);
        let near = (found.k - oracle.0).abs() <= 0.01 + 1e-9;
        let sound = found.value <= coarse_best;
        pass &= near && sound;
        details.push(format!(
            "{}: K* = {:.4} ({:.4}{}), oracle K = {:.2} ({:.4}), |ΔK| ≤ 0.01: {near}, ≤ coarse best: {sound}",
            objective.name(),
            found.k,
            found.value,
            if found.grid_only { ", grid-only" } else { "" },
            oracle.0,
            oracle.1
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    verdict(10, pass, &format!("{}; {elapsed:?} (limit 5 min)", details.join("; ")));
}
