use serde::Serialize;

use crate::dynamics::Propagator;
use crate::entanglement::{pair_concurrence, Pair};
use crate::error::{Error, Result};
use crate::spin::{PlaquetteGeometry, PureState};

/// Pairs inspected by the W witness.
pub const W_PAIRS: [Pair; 4] = [Pair::P12, Pair::P34, Pair::P13, Pair::P24];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WStateCandidate {
    pub t: f64,
    pub j: f64,
    /// Wootters concurrences in [`W_PAIRS`] order
    pub concurrences: [f64; 4],
    pub max_deviation_from_half: f64,
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold {threshold} must be positive"
        )))
    }
}

/// `Some` when every concurrence in [`W_PAIRS`] lies strictly within
/// `threshold` of ½.
pub fn wstate_candidate(psi: &PureState, t: f64, j: f64, threshold: f64) -> Result<Option<WStateCandidate>> {
    check_threshold(threshold)?;
    let mut concurrences = [0.0; 4];
    for (c, &pair) in concurrences.iter_mut().zip(W_PAIRS.iter()) {
        *c = pair_concurrence(psi, pair)?;
    }
    let dev = concurrences
        .iter()
        .map(|c| (c - 0.5).abs())
        .fold(0.0, f64::max);
    Ok((dev < threshold).then_some(WStateCandidate {
        t,
        j,
        concurrences,
        max_deviation_from_half: dev,
    }))
}

/// Evolves the Bell-pair state over the grid (D taken from `geometry`, J
/// overridden per column) and collects W-like points in J-major order.
pub fn wstate_scan(
    geometry: &PlaquetteGeometry,
    t_grid: &[f64],
    j_grid: &[f64],
    threshold: f64,
) -> Result<Vec<WStateCandidate>> {
    check_threshold(threshold)?;
    let mut out = Vec::new();
    for &j in j_grid {
        let prop = Propagator::new(&geometry.with_j(j))?;
        for &t in t_grid {
            let psi = prop.evolve_initial(t)?;
            if let Some(c) = wstate_candidate(&psi, t, j, threshold)? {
                out.push(c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn injected_w_is_reported_exactly() {
        let c = wstate_candidate(&PureState::w_state(), 0.0, 0.0, 1e-3)
            .unwrap()
            .unwrap();
        assert!(c.max_deviation_from_half < 1e-15);
    }

    #[test]
    fn bell_pair_is_not_w() {
        assert!(wstate_candidate(&PureState::bell_pair_initial(), 0.0, 0.0, 1e-3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn loose_threshold_catches_generic_points() {
        let g = PlaquetteGeometry::paper_default(1.0, 0.0);
        let hits = wstate_scan(&g, &grid(0.0, 4.0 * PI, 33), &grid(0.0, 2.0, 9), 0.5).unwrap();
        assert!(!hits.is_empty());
    }

    #[test]
    fn quarter_period_at_unit_coupling_is_w_like() {
        // J = 1, t = π/2: all four site amplitudes have modulus ½
        let g = PlaquetteGeometry::paper_default(1.0, 0.0);
        let hits = wstate_scan(&g, &[PI / 2.0], &[1.0], 1e-3).unwrap();
        assert_eq!(hits.len(), 1);
    }

    #[test]
    fn rejects_nonpositive_threshold() {
        assert!(wstate_candidate(&PureState::w_state(), 0.0, 0.0, 0.0).is_err());
    }
}
