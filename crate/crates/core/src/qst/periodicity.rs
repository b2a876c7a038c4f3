use std::f64::consts::PI;

use serde::Serialize;

use super::{snap_rational, MAX_DENOMINATOR, SNAP_TOL};
use crate::dynamics::amplitudes_closed_form;
use crate::entanglement::{gap, single_excitation_concurrence, Pair};
use crate::error::{Error, Result};

const SAMPLES_PER_PI: usize = 256;
const PEAK_FLOOR: f64 = 0.9;
const FLAT_TOL: f64 = 1e-12;
const EXACT_CHECK_TOL: f64 = 1e-10;
const MAX_SUBDIVISION: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodEstimate {
    /// `None` when no autocorrelation peak clears the floor
    pub period: Option<f64>,
    pub peak_correlation: f64,
    /// signal range below 1e-12
    pub degenerate: bool,
}

/// Fundamental period of a uniformly sampled signal from the first
/// autocorrelation peak above 0.9, refined by a parabola through the peak.
pub fn estimate_period(samples: &[f64], dt: f64) -> PeriodEstimate {
    let n = samples.len();
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if n < 4 || !(hi - lo >= FLAT_TOL) {
        return PeriodEstimate {
            period: None,
            peak_correlation: 0.0,
            degenerate: true,
        };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let r = |k: usize| {
        let m = n - k;
        let msd = (0..m).map(|i| (samples[i] - samples[i + k]).powi(2)).sum::<f64>() / m as f64;
        1.0 - msd / (2.0 * var)
    };
    let max_lag = n / 2;
    let rs: Vec<f64> = (0..=max_lag + 1).map(r).collect();
    for k in 1..=max_lag {
        if rs[k] > PEAK_FLOOR && rs[k] >= rs[k - 1] && rs[k] >= rs[k + 1] {
            let (a, b, c) = (rs[k - 1], rs[k], rs[k + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            return PeriodEstimate {
                period: Some((k as f64 + shift.clamp(-0.5, 0.5)) * dt),
                peak_correlation: b,
                degenerate: false,
            };
        }
    }
    PeriodEstimate {
        period: None,
        peak_correlation: rs[1..=max_lag].iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        degenerate: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignalPeriod {
    pub signal: String,
    pub estimate: PeriodEstimate,
    /// exact period at rational J
    pub exact: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicityReport {
    pub j: f64,
    pub t_max: f64,
    pub signals: Vec<SignalPeriod>,
}

fn signal_value(name: &str, t: f64, j: f64) -> f64 {
    let pair = match name {
        "C12" => Pair::P12,
        "C34" => Pair::P34,
        "C13" => Pair::P13,
        _ => return gap(t, j),
    };
    single_excitation_concurrence(&amplitudes_closed_form(t, j), pair).value
}

/// Every closed-form signal repeats after `4πq` at `J = p/q`; the exact
/// period is the shortest `4πq / n` (n ≤ 64) that survives a sample check.
fn exact_period(name: &str, j: f64) -> Option<f64> {
    let q = *snap_rational(j, MAX_DENOMINATOR, SNAP_TOL)?.denom();
    let base = 4.0 * PI * q as f64;
    let probes: Vec<f64> = (0..97).map(|k| 0.137 + k as f64 * base / 97.0).collect();
    let is_period = |p: f64| {
        probes
            .iter()
            .all(|&t| (signal_value(name, t + p, j) - signal_value(name, t, j)).abs() < EXACT_CHECK_TOL)
    };
    (1..=MAX_SUBDIVISION)
        .rev()
        .map(|n| base / n as f64)
        .find(|&p| is_period(p))
}

/// Period estimates for C12, C34, C13 (true concurrences) and the gap at
/// fixed J over `[0, t_max]`.
pub fn periodicity_report(j: f64, t_max: f64) -> Result<PeriodicityReport> {
    if !(t_max > 0.0 && t_max.is_finite() && j.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "periodicity window t_max = {t_max}, J = {j}"
        )));
    }
    let n = (t_max / PI * SAMPLES_PER_PI as f64).ceil() as usize + 1;
    let dt = t_max / (n - 1) as f64;
    let signals = ["C12", "C34", "C13", "GAP"]
        .iter()
        .map(|&name| {
            let samples: Vec<f64> = (0..n).map(|k| signal_value(name, k as f64 * dt, j)).collect();
            let estimate = estimate_period(&samples, dt);
            let exact = if estimate.degenerate { None } else { exact_period(name, j) };
            SignalPeriod {
                signal: name.to_string(),
                estimate,
                exact,
            }
        })
        .collect();
    Ok(PeriodicityReport { j, t_max, signals })
}
