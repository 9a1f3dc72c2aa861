//! CSV artifacts.
//!
//! Files have a header row, `.` decimals, LF line endings and numbers printed
//! with 12 significant digits, so identical runs give identical bytes.

use std::path::Path;

use pwm_lab::{DistortionReport, HarmonicSpectrum, SampledWaveform, ThreePhase};

/// Column order of a distortion report row.
pub const REPORT_COLUMNS: [&str; 7] = ["K", "A_M", "V1_pu", "THD_pct", "DF_pct", "LOH", "cluster_order"];

pub const WAVEFORM_COLUMNS: [&str; 7] = ["t", "V_A", "V_B", "V_C", "V_AB", "carrier", "modulator"];

pub const SPECTRUM_COLUMNS: [&str; 3] = ["order", "amplitude_pu", "phase"];

pub const TRACE_COLUMNS: [&str; 2] = ["K", "objective"];

const SIGNIFICANT_DIGITS: usize = 12;

/// Magnitudes below this are written as `0`.
const SNAP_TO_ZERO: f64 = 1e-12;

/// `%.12g`-style rendering: shortest of fixed or scientific, trailing zeros
/// removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x.abs() < SNAP_TO_ZERO {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= SIGNIFICANT_DIGITS as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> csv::Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_row(k: Option<f64>, a_m: Option<f64>, report: &DistortionReport) -> Vec<String> {
    vec![
        optional(k),
        optional(a_m),
        format_number(report.fundamental_pu),
        format_number(report.thd_percent),
        format_number(report.df_percent),
        report.loh_order.map(|n| n.to_string()).unwrap_or_default(),
        optional(report.central_cluster_order),
    ]
}

/// Rows of `t, V_A, V_B, V_C, V_AB, carrier, modulator`.
pub fn waveform_rows<'a>(
    waves: &'a ThreePhase,
    carrier: &'a [f64],
    modulator: &'a [f64],
) -> impl Iterator<Item = Vec<String>> + 'a {
    let [a, b, c] = &waves.poles;
    let ab = waves.v_ab();
    (0..a.len()).map(move |i| {
        vec![
            format_number(a.time(i)),
            format_number(a.samples()[i]),
            format_number(b.samples()[i]),
            format_number(c.samples()[i]),
            format_number(ab.samples()[i]),
            format_number(carrier[i]),
            format_number(modulator[i]),
        ]
    })
}

/// Rows of `order, amplitude_pu, phase` up to `max_order`.
///
/// Phases of orders with a snapped amplitude are written as `0`.
pub fn spectrum_rows(
    spec: &HarmonicSpectrum,
    dc_link: f64,
    max_order: usize,
) -> impl Iterator<Item = Vec<String>> + '_ {
    (0..=max_order.min(spec.max_order())).map(move |n| {
        let amplitude = spec.amplitude(n) / dc_link;
        let phase = if amplitude.abs() < SNAP_TO_ZERO {
            0.0
        } else {
            spec.phases[n]
        };
        vec![n.to_string(), format_number(amplitude), format_number(phase)]
    })
}

/// Reads one column of a waveform CSV back into a synchronous waveform.
pub fn read_waveform(
    path: &Path,
    column: &str,
    fundamental_hz: f64,
    n_periods: usize,
) -> anyhow::Result<SampledWaveform> {
    let mut r = csv::ReaderBuilder::new().from_path(path)?;
    let index = r
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| anyhow::anyhow!("{}: no column `{column}`", path.display()))?;
    let mut samples = Vec::new();
    for record in r.records() {
        let record = record?;
        samples.push(record[index].parse::<f64>()?);
    }
    let sample_rate = samples.len() as f64 / n_periods as f64 * fundamental_hz;
    Ok(SampledWaveform::new(samples, sample_rate, fundamental_hz, n_periods)?)
}
