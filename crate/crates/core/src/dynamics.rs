//! Time evolution of the Bell-pair initial state.
//!
//! Two independent routes: the closed-form single-excitation amplitudes, and
//! a spectral propagator built from a Jacobi diagonalization of the full
//! 16×16 Hamiltonian. [`oracle_equivalence_report`] certifies that they agree.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigh;
use crate::spin::{
    build_hamiltonian, embed_single_excitation, Operator, PlaquetteGeometry, PureState,
    StateVector, DIM,
};

/// (η, ξ, α, β): amplitudes on |0001⟩, |0010⟩, |0100⟩, |1000⟩, i.e. on the
/// up spin sitting at site 4, 3, 2, 1 respectively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleExcitationAmplitudes {
    pub eta: Complex64,
    pub xi: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub t: f64,
    pub j: f64,
    pub d: f64,
}

impl SingleExcitationAmplitudes {
    pub fn from_components(eta: Complex64, xi: Complex64, alpha: Complex64, beta: Complex64) -> Self {
        Self {
            eta,
            xi,
            alpha,
            beta,
            t: 0.0,
            j: 0.0,
            d: 1.0,
        }
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.eta, self.xi, self.alpha, self.beta]
    }

    pub fn norm_squared(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Amplitude of the excitation sitting on `site` (1..=4).
    pub fn at_site(&self, site: usize) -> Complex64 {
        match site {
            1 => self.beta,
            2 => self.alpha,
            3 => self.xi,
            4 => self.eta,
            _ => panic!("site {site} outside 1..=4"),
        }
    }

    /// Reads the single-excitation components of a register state.
    pub fn from_state(psi: &PureState, t: f64, j: f64, d: f64) -> Self {
        let [s1, s2, s3, s4] = psi.single_excitation_by_site();
        Self {
            eta: s4,
            xi: s3,
            alpha: s2,
            beta: s1,
            t,
            j,
            d,
        }
    }
}

/// Closed-form amplitudes at `D = 1`.
pub fn amplitudes_closed_form(t: f64, j: f64) -> SingleExcitationAmplitudes {
    amplitudes_closed_form_with_d(t, j, 1.0)
}

/// Closed-form amplitudes with an explicit DM strength; the formulas depend
/// on `Jt/2` and `Dt`, so this equals the `D = 1` form at `(tD, J/D)`.
pub fn amplitudes_closed_form_with_d(t: f64, j: f64, d: f64) -> SingleExcitationAmplitudes {
    let (sj, cj) = (j * t / 2.0).sin_cos();
    let (sd, cd) = (d * t).sin_cos();
    let k = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    let z = |re: f64, im: f64| Complex64::new(k * re, k * im);
    SingleExcitationAmplitudes {
        eta: z(cj * (sd - cd + 1.0), -sj * (-sd + cd + 1.0)),
        xi: z(cj * (-sd - cd + 1.0), -sj * (sd + cd + 1.0)),
        alpha: z(cj * (-sd + cd + 1.0), sj * (-sd + cd - 1.0)),
        beta: z(cj * (sd + cd + 1.0), sj * (sd + cd - 1.0)),
        t,
        j,
        d,
    }
}

/// Closed-form amplitudes embedded in the full register.
pub fn closed_form_state(t: f64, j: f64, d: f64) -> PureState {
    embed_single_excitation(&amplitudes_closed_form_with_d(t, j, d))
        .expect("closed-form amplitudes are normalized")
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: [f64; DIM],
    pub eigenvectors: Operator,
}

impl EigenDecomposition {
    pub fn residual(&self, h: &Operator) -> f64 {
        let diag = Operator::from_diagonal(&StateVector::from_fn(|i, _| {
            Complex64::new(self.eigenvalues[i], 0.0)
        }));
        (h * self.eigenvectors - self.eigenvectors * diag).camax()
    }

    /// `V · diag(e^{−iE_k t}) · V† · ψ₀`.
    pub fn evolve(&self, psi0: &PureState, t: f64) -> Result<PureState> {
        if t == 0.0 {
            return Ok(psi0.clone());
        }
        let v = &self.eigenvectors;
        let mut coeffs = v.adjoint() * psi0.amplitudes();
        for (c, &e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = v * coeffs;
        let drift = (out.norm() - 1.0).abs();
        if drift > 1e-8 {
            return Err(Error::NumericalHealth(format!(
                "propagation changed the norm by {drift:e} at t = {t}"
            )));
        }
        Ok(PureState::from_unchecked(out))
    }
}

pub fn hermitian_eigendecompose(h: &Operator) -> Result<EigenDecomposition> {
    let e = jacobi_eigh(h)?;
    let mut eigenvalues = [0.0; DIM];
    eigenvalues.copy_from_slice(e.eigenvalues.as_slice());
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: e.eigenvectors,
    })
}

pub fn evolve_numeric(h: &Operator, psi0: &PureState, t: f64) -> Result<PureState> {
    hermitian_eigendecompose(h)?.evolve(psi0, t)
}

/// A diagonalized Hamiltonian for one geometry, ready for repeated t-sweeps.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub geometry: PlaquetteGeometry,
    pub hamiltonian: Operator,
    pub spectrum: EigenDecomposition,
}

impl Propagator {
    pub fn new(geometry: &PlaquetteGeometry) -> Result<Self> {
        let hamiltonian = build_hamiltonian(geometry)?;
        let spectrum = hermitian_eigendecompose(&hamiltonian)?;
        Ok(Self {
            geometry: geometry.clone(),
            hamiltonian,
            spectrum,
        })
    }

    pub fn evolve(&self, psi0: &PureState, t: f64) -> Result<PureState> {
        self.spectrum.evolve(psi0, t)
    }

    pub fn evolve_initial(&self, t: f64) -> Result<PureState> {
        self.evolve(&PureState::bell_pair_initial(), t)
    }
}

/// `min_φ ‖a − e^{iφ} b‖₂`. The minimizing phase is that of `⟨b|a⟩`.
pub fn phase_quotiented_distance(a: &StateVector, b: &StateVector) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// Removes the global phase by making the largest-magnitude amplitude real
/// and positive.
pub fn canonical_phase(v: &StateVector) -> StateVector {
    let mut lead = 0;
    for k in 1..v.len() {
        if v[k].norm() > v[lead].norm() * (1.0 + 1e-12) {
            lead = k;
        }
    }
    let z = v[lead];
    if z.norm() == 0.0 {
        return *v;
    }
    v * (z.conj() / z.norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub max_deviation: f64,
    pub argmax_t: f64,
    pub argmax_j: f64,
    pub points: usize,
}

/// Maximum phase-quotiented distance between the numeric propagator for
/// `geometry` (with `J` taken from `j_grid`) and the closed-form amplitudes.
pub fn oracle_equivalence_report(
    geometry: &PlaquetteGeometry,
    j_grid: &[f64],
    t_grid: &[f64],
) -> Result<EquivalenceReport> {
    if j_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let psi0 = PureState::bell_pair_initial();
    let mut report = EquivalenceReport {
        max_deviation: 0.0,
        argmax_t: t_grid[0],
        argmax_j: j_grid[0],
        points: 0,
    };
    for &j in j_grid {
        let prop = Propagator::new(&geometry.with_j(j))?;
        for &t in t_grid {
            let numeric = prop.evolve(&psi0, t)?;
            let closed = closed_form_state(t, j, geometry.d);
            let dev = phase_quotiented_distance(numeric.amplitudes(), closed.amplitudes());
            report.points += 1;
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.argmax_t = t;
                report.argmax_j = j;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn mags(a: &SingleExcitationAmplitudes) -> [f64; 4] {
        a.as_array().map(|z| z.norm())
    }

    #[test]
    fn closed_form_at_t0_is_initial_state() {
        for j in [0.0, 0.5, 1.0, 3.7] {
            let a = amplitudes_closed_form(0.0, j);
            let want = [0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2];
            for (z, w) in a.as_array().iter().zip(want) {
                assert_abs_diff_eq!(z.re, w, epsilon = 1e-15);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_quarter_period_at_j0() {
        let a = amplitudes_closed_form(PI / 2.0, 0.0);
        let want = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (z, w) in a.as_array().iter().zip(want) {
            assert_abs_diff_eq!(z.re, w, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_form_transfer_at_pi() {
        // the whole excitation sits on sites 3, 4 with equal weight
        let a = amplitudes_closed_form(PI, 0.0);
        let m = mags(&a);
        assert_abs_diff_eq!(m[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[3], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_is_normalized() {
        for i in 0..50 {
            for j in [-1.0, 0.0, 0.3, 1.0, 2.0, 5.5] {
                let a = amplitudes_closed_form(0.37 * i as f64, j);
                assert_abs_diff_eq!(a.norm_squared(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn decomposition_invariants() {
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, 0.5)).unwrap();
        let e = hermitian_eigendecompose(&h).unwrap();
        assert!(e.residual(&h) < 1e-10);
        let gram = e.eigenvectors.adjoint() * e.eigenvectors - Operator::identity();
        assert!(gram.camax() < 1e-10);
        let again = hermitian_eigendecompose(&h).unwrap();
        assert_eq!(e.eigenvalues, again.eigenvalues);
        assert_eq!(e.eigenvectors, again.eigenvectors);
    }

    #[test]
    fn single_excitation_sector_spectrum_at_j0() {
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, 0.0)).unwrap();
        let e = hermitian_eigendecompose(&h).unwrap();
        // eigenvectors supported on the one-up-spin sector
        let mut sector: Vec<f64> = (0..DIM)
            .filter(|&k| {
                (0..DIM)
                    .filter(|i| i.count_ones() == 1)
                    .map(|i| e.eigenvectors[(i, k)].norm_sqr())
                    .sum::<f64>()
                    > 0.5
            })
            .map(|k| e.eigenvalues[k])
            .collect();
        sector.sort_by(f64::total_cmp);
        assert_eq!(sector.len(), 4);
        for (g, w) in sector.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn trivial_evolutions() {
        let psi0 = PureState::bell_pair_initial();
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, 0.7)).unwrap();
        let at0 = evolve_numeric(&h, &psi0, 0.0).unwrap();
        assert!((at0.amplitudes() - psi0.amplitudes()).norm() < 1e-14);
        let still = evolve_numeric(&Operator::zeros(), &psi0, 123.4).unwrap();
        assert_eq!(still, psi0);
    }

    #[test]
    fn numeric_matches_closed_form_at_two_pi() {
        let prop = Propagator::new(&PlaquetteGeometry::paper_default(1.0, 0.5)).unwrap();
        let t = 2.0 * PI;
        let numeric = canonical_phase(prop.evolve_initial(t).unwrap().amplitudes());
        let closed = canonical_phase(closed_form_state(t, 0.5, 1.0).amplitudes());
        for (a, b) in numeric.iter().zip(closed.iter()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn equivalence_and_negative_control() {
        let j_grid = [0.0, 0.5, 1.0, 2.0];
        let t_grid: Vec<f64> = (0..=512).map(|k| k as f64 * PI / 64.0).collect();
        let good =
            oracle_equivalence_report(&PlaquetteGeometry::paper_default(1.0, 0.0), &j_grid, &t_grid)
                .unwrap();
        assert!(good.max_deviation < 1e-9, "{good:?}");
        let bad =
            oracle_equivalence_report(&PlaquetteGeometry::swapped_control(1.0, 0.0), &j_grid, &t_grid)
                .unwrap();
        assert!(bad.max_deviation > 0.5, "{bad:?}");
        let trivial =
            oracle_equivalence_report(&PlaquetteGeometry::paper_default(1.0, 0.0), &[0.0], &[0.0])
                .unwrap();
        assert!(trivial.max_deviation < 1e-15);
    }

    #[test]
    fn general_d_rescales() {
        let d = 2.5;
        let j = 0.8;
        let prop = Propagator::new(&PlaquetteGeometry::paper_default(d, j)).unwrap();
        for t in [0.3, 1.9, 7.25] {
            let numeric = prop.evolve_initial(t).unwrap();
            let rescaled = closed_form_state(t * d, j / d, 1.0);
            let direct = closed_form_state(t, j, d);
            assert!(phase_quotiented_distance(numeric.amplitudes(), rescaled.amplitudes()) < 1e-9);
            assert!((rescaled.amplitudes() - direct.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn conservation_and_composition() {
        let prop = Propagator::new(&PlaquetteGeometry::paper_default(1.0, 2.0 / 3.0)).unwrap();
        let psi0 = PureState::bell_pair_initial();
        for k in 0..40 {
            let t1 = 0.41 * k as f64;
            let t2 = 1.3;
            let a = prop.evolve(&psi0, t1 + t2).unwrap();
            let b = prop.evolve(&prop.evolve(&psi0, t1).unwrap(), t2).unwrap();
            assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-9);
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-10);
            assert!(a.leakage_outside_single_excitation() < 1e-12);
        }
    }

    #[test]
    fn recurrence_at_half() {
        // J = 1/2: Jt/2 and t are both multiples of 2π after 8π.
        for k in 0..64 {
            let t = 0.19 * k as f64;
            let a = mags(&amplitudes_closed_form(t, 0.5));
            let b = mags(&amplitudes_closed_form(t + 8.0 * PI, 0.5));
            for (x, y) in a.iter().zip(b) {
                assert_abs_diff_eq!(*x, y, epsilon = 1e-10);
            }
        }
    }
}
