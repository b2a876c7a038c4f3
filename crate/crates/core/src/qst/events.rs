use std::f64::consts::PI;

use serde::Serialize;

use super::optimize::golden_section_max;
use super::{format_rational, rational_to_f64, snap_rational, Rational, MAX_DENOMINATOR, QST_TOL, SNAP_TOL};
use crate::dynamics::Propagator;
use crate::entanglement::{gap, pair_concurrence, Pair};
use crate::error::{Error, Result};
use crate::spin::PlaquetteGeometry;

/// Grid samples per π used by [`forbidden_j_scan`].
const FORBIDDEN_POINTS_PER_PI: usize = 256;
/// Grid maxima below this are not refined by [`locate_events_2d`].
const CANDIDATE_FLOOR: f64 = 0.5;
/// Refined maxima below `1 − PEAK_ACCEPT` are not transfer events.
const PEAK_ACCEPT: f64 = 1e-4;
const REFINE_TOL: f64 = 1e-10;
const REFINE_MAX_ITER: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForbiddenRecord {
    pub j: f64,
    pub sup_gap: f64,
    pub t_at_sup: f64,
    /// `1 − sup_gap`
    pub margin: f64,
    /// `margin > QST_TOL`: no transfer anywhere in the scanned window
    pub forbidden: bool,
}

/// Supremum of G(t, J) over `[0, t_max]`: dense grid, then golden-section
/// refinement around every grid-local maximum.
pub fn forbidden_j_scan(j_values: &[f64], t_max: f64) -> Result<Vec<ForbiddenRecord>> {
    if !(t_max >= 2.0 * PI) {
        return Err(Error::InvalidArgument(format!(
            "t_max = {t_max} must be at least 2π"
        )));
    }
    let n = (t_max / PI * FORBIDDEN_POINTS_PER_PI as f64).ceil() as usize + 1;
    let h = t_max / (n - 1) as f64;
    let ts: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
    let mut out = Vec::with_capacity(j_values.len());
    for &j in j_values {
        let g: Vec<f64> = ts.iter().map(|&t| gap(t, j)).collect();
        let mut best = (ts[0], g[0]);
        for k in 0..n {
            let left = if k == 0 { f64::NEG_INFINITY } else { g[k - 1] };
            let right = if k + 1 == n { f64::NEG_INFINITY } else { g[k + 1] };
            if g[k] >= left && g[k] >= right {
                let lo = ts[k.saturating_sub(1)];
                let hi = ts[(k + 1).min(n - 1)];
                let (t, v, _) = golden_section_max(|t| gap(t, j), lo, hi, 1e-13, 200);
                if v > best.1 {
                    best = (t, v);
                }
            }
        }
        let margin = 1.0 - best.1;
        out.push(ForbiddenRecord {
            j,
            sup_gap: best.1,
            t_at_sup: best.0,
            margin,
            forbidden: margin > QST_TOL,
        });
    }
    Ok(out)
}

/// (∂G/∂t, ∂G/∂J) of the printed gap.
pub fn gap_gradient(t: f64, j: f64) -> (f64, f64) {
    let (a, b, c) = (t * (j - 3.0), t * j, t * (j + 3.0));
    let gt = (a.sin() * (j - 3.0)
        + 6.0 * t.sin() * b.cos()
        + 6.0 * j * t.cos() * b.sin()
        + c.sin() * (j + 3.0))
        / 8.0;
    let gj = t * (a.sin() + 6.0 * t.cos() * b.sin() + c.sin()) / 8.0;
    (gt, gj)
}

/// `[[G_tt, G_tJ], [G_tJ, G_JJ]]` of the printed gap.
pub fn gap_hessian(t: f64, j: f64) -> [[f64; 2]; 2] {
    let (a, b, c) = (t * (j - 3.0), t * j, t * (j + 3.0));
    let (st, ct) = t.sin_cos();
    let gtt = (a.cos() * (j - 3.0).powi(2) + 6.0 * (1.0 + j * j) * ct * b.cos()
        - 12.0 * j * st * b.sin()
        + c.cos() * (j + 3.0).powi(2))
        / 8.0;
    let gjj = t * t * (a.cos() + 6.0 * ct * b.cos() + c.cos()) / 8.0;
    let gtj = (a.cos() * t * (j - 3.0) + a.sin() - 6.0 * t * st * b.sin()
        + 6.0 * ct * b.sin()
        + 6.0 * j * t * ct * b.cos()
        + c.cos() * t * (j + 3.0)
        + c.sin())
        / 8.0;
    [[gtt, gtj], [gtj, gjj]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventStatus {
    /// refined to |G − 1| < 1e-10 and Wootters-verified
    Confirmed,
    /// refinement did not reach tolerance
    Unconfirmed,
    /// refined, but the Wootters check failed
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QstEvent {
    /// nearest integer to t/π
    pub m: i64,
    pub t: f64,
    /// snapped `p/q`, or `None` when no fraction with q ≤ 64 is within 1e-8
    #[serde(serialize_with = "ser_rational")]
    pub j: Option<Rational>,
    pub j_value: f64,
    pub on_transfer_line: bool,
    pub gap_value: f64,
    pub c12: f64,
    pub c34: f64,
    pub status: EventStatus,
}

fn ser_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_str("UNRATIONALIZED"),
    }
}

impl QstEvent {
    pub fn is_confirmed(&self) -> bool {
        self.status == EventStatus::Confirmed
    }
}

struct Window {
    t_min: f64,
    t_max: f64,
    j_min: f64,
    j_max: f64,
}

impl Window {
    fn clamp_t(&self, t: f64) -> f64 {
        t.clamp(self.t_min, self.t_max)
    }
    fn clamp_j(&self, j: f64) -> f64 {
        j.clamp(self.j_min, self.j_max)
    }
}

/// Coordinate-wise golden-section ascent from a grid maximum, then a few
/// Newton steps on ∇G = 0 so the argmax is resolved well below √ε.
fn refine_peak(w: &Window, t0: f64, j0: f64, ht: f64, hj: f64) -> (f64, f64, bool) {
    let (mut t, mut j) = (t0, j0);
    let mut converged = false;
    for _ in 0..REFINE_MAX_ITER {
        let (t_prev, j_prev) = (t, j);
        t = golden_section_max(|x| gap(x, j), w.clamp_t(t - ht), w.clamp_t(t + ht), 1e-14, 200).0;
        if w.j_max > w.j_min {
            j = golden_section_max(|y| gap(t, y), w.clamp_j(j - hj), w.clamp_j(j + hj), 1e-14, 200).0;
        }
        let moved = (t - t_prev).abs().max((j - j_prev).abs());
        if (gap(t, j) - 1.0).abs() < REFINE_TOL && moved < 1e-7 {
            converged = true;
            break;
        }
        if moved == 0.0 {
            break;
        }
    }

    for _ in 0..8 {
        let (gt, gj) = gap_gradient(t, j);
        let [[a, b], [_, d]] = gap_hessian(t, j);
        let (dt, dj) = if w.j_max > w.j_min {
            let det = a * d - b * b;
            if !(det > 0.0 && a < 0.0) {
                break;
            }
            ((-d * gt + b * gj) / det, (b * gt - a * gj) / det)
        } else {
            if !(a < 0.0) {
                break;
            }
            (-gt / a, 0.0)
        };
        if dt.abs() > ht || dj.abs() > hj {
            break;
        }
        let (nt, nj) = (w.clamp_t(t + dt), w.clamp_j(j + dj));
        if gap(nt, nj) < gap(t, j) - 1e-15 {
            break;
        }
        (t, j) = (nt, nj);
        if dt.abs().max(dj.abs()) < 1e-16 {
            break;
        }
    }
    let converged = converged || (gap(t, j) - 1.0).abs() < REFINE_TOL;
    (t, j, converged)
}

/// Scans G(t, J) on a grid with `resolution` points per π in t (and per unit
/// in J), refines every grid-local maximum, snaps to (mπ, p/q) and checks
/// each candidate with Wootters concurrences of the numerically evolved state.
///
/// The t window is half-open `[t_min, t_max)`; the J window is closed and may
/// be a single value. Results are ordered by t, then J.
pub fn locate_events_2d(
    geometry: &PlaquetteGeometry,
    t_range: (f64, f64),
    j_range: (f64, f64),
    resolution: usize,
) -> Result<Vec<QstEvent>> {
    let (t_min, t_max) = t_range;
    let (j_min, j_max) = j_range;
    if !(t_min < t_max) || !(j_min <= j_max) {
        return Err(Error::InvalidArgument(format!(
            "empty window t ∈ [{t_min}, {t_max}), J ∈ [{j_min}, {j_max}]"
        )));
    }
    if resolution < 64 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below 64 points per π"
        )));
    }
    let w = Window {
        t_min,
        t_max,
        j_min,
        j_max,
    };
    let ht = PI / resolution as f64;
    let nt = ((t_max - t_min) / ht * (1.0 - 1e-12)).floor() as usize + 1;
    let ts: Vec<f64> = (0..nt).map(|k| t_min + k as f64 * ht).collect();
    let nj = if j_max > j_min {
        ((j_max - j_min) * resolution as f64).ceil() as usize + 1
    } else {
        1
    };
    let hj = if nj > 1 { (j_max - j_min) / (nj - 1) as f64 } else { 0.0 };
    let js: Vec<f64> = (0..nj).map(|k| j_min + k as f64 * hj).collect();

    let g = |it: usize, ij: usize| gap(ts[it], js[ij]);
    let mut peaks: Vec<(f64, f64, bool)> = Vec::new();
    for it in 0..nt {
        for ij in 0..nj {
            let v = g(it, ij);
            if v < CANDIDATE_FLOOR {
                continue;
            }
            let mut is_max = true;
            'nb: for dt in -1i64..=1 {
                for dj in -1i64..=1 {
                    if dt == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = (it as i64 + dt, ij as i64 + dj);
                    if a < 0 || b < 0 || a >= nt as i64 || b >= nj as i64 {
                        continue;
                    }
                    if g(a as usize, b as usize) > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if !is_max {
                continue;
            }
            let (t, j, ok) = refine_peak(&w, ts[it], js[ij], ht, hj.max(1e-300));
            if gap(t, j) < 1.0 - PEAK_ACCEPT {
                continue;
            }
            if peaks
                .iter()
                .any(|&(pt, pj, _)| (pt - t).abs() < 1e-6 && (pj - j).abs() < 1e-6)
            {
                continue;
            }
            peaks.push((t, j, ok));
        }
    }

    let mut events = Vec::new();
    for (t, j, converged) in peaks {
        let m = (t / PI).round() as i64;
        let on_line = (t - m as f64 * PI).abs() < SNAP_TOL;
        let t = if on_line { m as f64 * PI } else { t };
        let snapped = snap_rational(j, MAX_DENOMINATOR, SNAP_TOL);
        let j_value = snapped.as_ref().map_or(j, rational_to_f64);
        if t >= t_max || t < t_min {
            continue;
        }
        let psi = Propagator::new(&geometry.with_couplings(1.0, j_value))?.evolve_initial(t)?;
        let c12 = pair_concurrence(&psi, Pair::P12)?;
        let c34 = pair_concurrence(&psi, Pair::P34)?;
        let gap_value = gap(t, j_value);
        let status = if !converged {
            EventStatus::Unconfirmed
        } else if c12 <= QST_TOL && c34 >= 1.0 - QST_TOL && gap_value >= 1.0 - QST_TOL {
            EventStatus::Confirmed
        } else {
            EventStatus::Rejected
        };
        events.push(QstEvent {
            m,
            t,
            j: snapped,
            j_value,
            on_transfer_line: on_line,
            gap_value,
            c12,
            c34,
            status,
        });
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.j_value.total_cmp(&b.j_value)));
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn geom() -> PlaquetteGeometry {
        PlaquetteGeometry::paper_default(1.0, 0.0)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for (t, j) in [(1.3, 0.4), (7.0, 1.7), (3.0 * PI + 0.1, 0.66), (0.2, 0.0)] {
            let (gt, gj) = gap_gradient(t, j);
            let fd_t = (gap(t + h, j) - gap(t - h, j)) / (2.0 * h);
            let fd_j = (gap(t, j + h) - gap(t, j - h)) / (2.0 * h);
            assert_abs_diff_eq!(gt, fd_t, epsilon = 1e-8);
            assert_abs_diff_eq!(gj, fd_j, epsilon = 1e-8);
            let hs = gap_hessian(t, j);
            let fd_tt = (gap_gradient(t + h, j).0 - gap_gradient(t - h, j).0) / (2.0 * h);
            let fd_jj = (gap_gradient(t, j + h).1 - gap_gradient(t, j - h).1) / (2.0 * h);
            let fd_tj = (gap_gradient(t, j + h).0 - gap_gradient(t, j - h).0) / (2.0 * h);
            assert_relative_eq!(hs[0][0], fd_tt, epsilon = 1e-7, max_relative = 1e-7);
            assert_relative_eq!(hs[1][1], fd_jj, epsilon = 1e-7, max_relative = 1e-7);
            assert_relative_eq!(hs[0][1], fd_tj, epsilon = 1e-7, max_relative = 1e-7);
        }
    }

    #[test]
    fn forbidden_examples() {
        let r = forbidden_j_scan(&[1.0, 3.0, 0.0], 20.0 * PI).unwrap();
        assert!(r[0].forbidden && r[0].sup_gap < 1.0 && r[0].margin > 0.5);
        assert!(r[1].forbidden && r[1].margin > 0.5);
        assert!(!r[2].forbidden);
        assert_abs_diff_eq!(r[2].sup_gap, 1.0, epsilon = 1e-12);
        let short = forbidden_j_scan(&[0.0], 2.0 * PI).unwrap();
        assert_abs_diff_eq!(short[0].sup_gap, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(short[0].t_at_sup, PI, epsilon = 1e-6);
        assert!(forbidden_j_scan(&[1.0], PI).is_err());
    }

    #[test]
    fn events_up_to_four_pi() {
        let ev = locate_events_2d(&geom(), (0.0, 4.0 * PI), (0.0, 2.0), 64).unwrap();
        let got: Vec<(i64, String)> = ev
            .iter()
            .map(|e| (e.m, format_rational(e.j.as_ref().unwrap())))
            .collect();
        let want: Vec<(i64, String)> = [
            (1, "0"),
            (1, "2"),
            (2, "1/2"),
            (2, "3/2"),
            (3, "0"),
            (3, "2/3"),
            (3, "4/3"),
            (3, "2"),
        ]
        .iter()
        .map(|&(m, s)| (m, s.to_string()))
        .collect();
        assert_eq!(got, want);
        for e in &ev {
            assert!(e.is_confirmed(), "{e:?}");
            assert!(e.on_transfer_line);
            assert!(e.c12 <= 1e-8 && e.c34 >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn no_events_before_pi() {
        assert!(locate_events_2d(&geom(), (0.0, PI / 2.0), (0.0, 2.0), 64)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn no_events_at_forbidden_coupling() {
        for j in [1.0, 3.0] {
            assert!(locate_events_2d(&geom(), (0.0, 20.0 * PI), (j, j), 64)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn pinned_allowed_coupling_finds_its_times() {
        // J = 1/2: (−1)^{m+1} cos(mπ/2) = 1 only for m ≡ 2 (mod 4)
        let ev = locate_events_2d(&geom(), (0.0, 12.0 * PI), (0.5, 0.5), 64).unwrap();
        let ms: Vec<i64> = ev.iter().map(|e| e.m).collect();
        assert_eq!(ms, vec![2, 6, 10]);
    }

    #[test]
    fn bad_windows() {
        assert!(locate_events_2d(&geom(), (1.0, 1.0), (0.0, 2.0), 64).is_err());
        assert!(locate_events_2d(&geom(), (0.0, 1.0), (2.0, 0.0), 64).is_err());
        assert!(locate_events_2d(&geom(), (0.0, 1.0), (0.0, 2.0), 32).is_err());
    }
}
