//! Quantum-state-transfer analysis: where and when the Bell pair on sites
//! (1,2) reappears on (3,4).
//!
//! Everything here works in units of `D` (t in ħ/D, J in D).

mod events;
mod optimize;
mod periodicity;
mod sequences;
mod wstate;

use std::f64::consts::PI;

use num_rational::Ratio;

pub use events::{
    forbidden_j_scan, gap_gradient, gap_hessian, locate_events_2d, EventStatus, ForbiddenRecord,
    QstEvent,
};
pub use optimize::golden_section_max;
pub use periodicity::{estimate_period, periodicity_report, PeriodEstimate, PeriodicityReport, SignalPeriod};
pub use sequences::{find_qst_j, sequence_table, sequence_table_extended, Family, SequenceEntry};
pub use wstate::{wstate_candidate, wstate_scan, WStateCandidate, W_PAIRS};

pub type Rational = Ratio<i64>;

/// Event tolerance on C₁₂, 1 − C₃₄ and 1 − G.
pub const QST_TOL: f64 = 1e-8;
/// Largest denominator tried when snapping a refined J.
pub const MAX_DENOMINATOR: i64 = 64;
/// Snap distance for t → mπ and J → p/q.
pub const SNAP_TOL: f64 = 1e-8;

/// The gap on the lines t = mπ: `(−1)^{m+1} cos(mπJ)`.
pub fn gap_at_transfer_times(m: u32, j: f64) -> f64 {
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * (m as f64 * PI * j).cos()
}

/// Smallest-denominator fraction `p/q` (q ≤ `max_den`) within `tol` of `x`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() < tol).then(|| Rational::new(p as i64, q))
    })
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::gap;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reduction_examples() {
        assert_abs_diff_eq!(gap_at_transfer_times(1, 0.0), 1.0);
        assert_abs_diff_eq!(gap_at_transfer_times(1, 1.0), -1.0);
        assert_abs_diff_eq!(gap_at_transfer_times(4, 0.25), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reduction_matches_gap() {
        for m in 1..=10u32 {
            for i in 0..=200 {
                let j = i as f64 / 100.0;
                let t = m as f64 * PI;
                assert_abs_diff_eq!(gap_at_transfer_times(m, j), gap(t, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(0.75 + 1e-10, 64, 1e-8), Some(Rational::new(3, 4)));
        assert_eq!(snap_rational(2.0 / 7.0, 64, 1e-8), Some(Rational::new(2, 7)));
        assert_eq!(snap_rational(-1e-12, 64, 1e-8), Some(Rational::new(0, 1)));
        assert_eq!(snap_rational(std::f64::consts::FRAC_1_SQRT_2, 64, 1e-8), None);
        assert_eq!(format_rational(&Rational::new(6, 3)), "2");
        assert_eq!(format_rational(&Rational::new(3, 6)), "1/2");
    }
}
