//! Two-qubit reduced states and concurrence.
//!
//! Three routes to the pair concurrence: the full Wootters recipe on the
//! reduced density matrix, the printed trigonometric closed forms, and the
//! single-excitation shortcut `2|a_m||a_n|`.

use std::fmt;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{Propagator, SingleExcitationAmplitudes};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_violation, jacobi_eigh};
use crate::spin::{check_site, site_mask, PlaquetteGeometry, PureState, DIM, N_SITES};

pub type Matrix2q = Matrix4<Complex64>;

/// An ordered pair of distinct sites `m < n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pair {
    pub m: usize,
    pub n: usize,
}

impl Pair {
    pub const P12: Pair = Pair { m: 1, n: 2 };
    pub const P13: Pair = Pair { m: 1, n: 3 };
    pub const P14: Pair = Pair { m: 1, n: 4 };
    pub const P23: Pair = Pair { m: 2, n: 3 };
    pub const P24: Pair = Pair { m: 2, n: 4 };
    pub const P34: Pair = Pair { m: 3, n: 4 };
    pub const ALL: [Pair; 6] = [
        Pair::P12,
        Pair::P13,
        Pair::P14,
        Pair::P23,
        Pair::P24,
        Pair::P34,
    ];

    pub fn new(m: usize, n: usize) -> Result<Self> {
        check_site(m)?;
        check_site(n)?;
        if m >= n {
            return Err(Error::InvalidArgument(format!(
                "pair ({m}, {n}) must satisfy m < n"
            )));
        }
        Ok(Self { m, n })
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// ρ over (|00⟩, |01⟩, |10⟩, |11⟩) of the pair, qubit `m` most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    entries: Matrix2q,
    pair: Pair,
}

impl ReducedDensityMatrix {
    pub fn new(entries: Matrix2q, pair: Pair) -> Result<Self> {
        let asym = hermitian_violation(&entries);
        if asym > 1e-12 {
            return Err(Error::ContractViolation(format!(
                "density matrix not Hermitian ({asym:e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::ContractViolation(format!("density matrix trace {tr}")));
        }
        let min_ev = jacobi_eigh(&entries)?.eigenvalues[0];
        if min_ev < -1e-10 {
            return Err(Error::ContractViolation(format!(
                "density matrix has negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self { entries, pair })
    }

    pub fn entries(&self) -> &Matrix2q {
        &self.entries
    }

    pub fn pair(&self) -> Pair {
        self.pair
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConcurrenceMethod {
    Wootters,
    ClosedForm,
    SingleExcitation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcurrenceRecord {
    pub pair: Pair,
    pub value: f64,
    pub method: ConcurrenceMethod,
}

pub fn partial_trace_pair(psi: &PureState, pair: Pair) -> Result<ReducedDensityMatrix> {
    let pair = Pair::new(pair.m, pair.n)?;
    let (mm, mn) = (site_mask(pair.m), site_mask(pair.n));
    let keep = mm | mn;
    let local = |b: usize| 2 * usize::from(b & mm != 0) + usize::from(b & mn != 0);
    let amps = psi.amplitudes();
    let mut rho = Matrix2q::zeros();
    for r in 0..DIM {
        if amps[r].norm_sqr() == 0.0 {
            continue;
        }
        for c in 0..DIM {
            if (r & !keep) == (c & !keep) {
                rho[(local(r), local(c))] += amps[r] * amps[c].conj();
            }
        }
    }
    ReducedDensityMatrix::new(rho, pair)
}

/// σ_y ⊗ σ_y, real and anti-diagonal.
fn spin_flip() -> Matrix2q {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    Matrix2q::new(
        z, z, z, -p, //
        z, z, p, z, //
        z, p, z, z, //
        -p, z, z, z,
    )
}

/// Spin-flipped state ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
pub fn spin_flipped(rho: &Matrix2q) -> Matrix2q {
    let tau = spin_flip();
    tau * rho.conjugate() * tau
}

/// Relative floor below which eigenvalues of ρ count as numerically zero.
pub const RANK_FLOOR: f64 = 1e-14;

/// Square roots γ₁ ≥ … ≥ γ₄ of the eigenvalues of R = ρ ρ̃.
///
/// With ρ = W W† (W = eigenvectors scaled by √λ, numerically-zero λ dropped)
/// the nonzero spectrum of R equals that of M†M for the complex-symmetric
/// M = Wᵀ τ W, so the γᵢ are the singular values of M. Dropping the null
/// space of ρ before taking square roots keeps roundoff in ρ's zero
/// eigenvalues from leaking into the γᵢ at the √ε level.
pub fn wootters_gammas(rho: &ReducedDensityMatrix) -> Result<[f64; 4]> {
    let e = jacobi_eigh(rho.entries())?;
    let top = e.eigenvalues[3].max(0.0);
    let mut w = Matrix2q::zeros();
    for k in 0..4 {
        let lambda = e.eigenvalues[k];
        if lambda > RANK_FLOOR * top {
            w.set_column(k, &(e.eigenvectors.column(k) * Complex64::new(lambda.sqrt(), 0.0)));
        }
    }
    let m = w.transpose() * spin_flip() * w;
    let mtm = m.adjoint() * m;
    let mtm = (mtm + mtm.adjoint()) * Complex64::new(0.5, 0.0);
    let lambdas = jacobi_eigh(&mtm)?.eigenvalues;
    if lambdas[0] < -1e-9 {
        return Err(Error::NumericalHealth(format!(
            "R has eigenvalue {:e} below zero",
            lambdas[0]
        )));
    }
    let mut g = [0.0; 4];
    for (k, dst) in g.iter_mut().enumerate() {
        *dst = lambdas[3 - k].max(0.0).sqrt();
    }
    Ok(g)
}

/// C = max{2γ₁ − Σγᵢ, 0}.
pub fn wootters_concurrence(rho: &ReducedDensityMatrix) -> Result<ConcurrenceRecord> {
    let g = wootters_gammas(rho)?;
    let value = (2.0 * g[0] - g.iter().sum::<f64>()).max(0.0);
    Ok(ConcurrenceRecord {
        pair: rho.pair(),
        value,
        method: ConcurrenceMethod::Wootters,
    })
}

/// Partial trace followed by the Wootters recipe.
pub fn pair_concurrence(psi: &PureState, pair: Pair) -> Result<f64> {
    Ok(wootters_concurrence(&partial_trace_pair(psi, pair)?)?.value)
}

/// `2|a_m||a_n|`, exact for states confined to the one-up-spin sector.
pub fn single_excitation_concurrence(a: &SingleExcitationAmplitudes, pair: Pair) -> ConcurrenceRecord {
    ConcurrenceRecord {
        pair,
        value: 2.0 * a.at_site(pair.m).norm() * a.at_site(pair.n).norm(),
        method: ConcurrenceMethod::SingleExcitation,
    }
}

/// Printed closed form for pair (1,2).
pub fn closed_form_c12(t: f64, j: f64) -> f64 {
    (2.0 * (t * (j - 3.0)).cos()
        + 2.0 * (2.0 * t * (j - 1.0)).cos()
        + 12.0 * t.cos() * (t * j).cos()
        + 2.0 * (2.0 * t * (j + 1.0)).cos()
        + 2.0 * (t * (j + 3.0)).cos()
        + 4.0 * (2.0 * t).cos()
        + (4.0 * t).cos()
        + 7.0)
        / 32.0
}

/// Printed closed form for pair (3,4).
pub fn closed_form_c34(t: f64, j: f64) -> f64 {
    (-2.0 * (t * (j - 3.0)).cos()
        + 2.0 * (2.0 * t * (j - 1.0)).cos()
        - 12.0 * t.cos() * (t * j).cos()
        + 2.0 * (2.0 * t * (j + 1.0)).cos()
        - 2.0 * (t * (j + 3.0)).cos()
        + 4.0 * (2.0 * t).cos()
        + (4.0 * t).cos()
        + 7.0)
        / 32.0
}

/// Printed closed form for pair (1,3). Reference only: it does not vanish at
/// `t = 0` and goes negative, so it is never used as a concurrence.
pub fn closed_form_c13(t: f64, j: f64) -> f64 {
    (-2.0 * (2.0 * t * (j + 1.0)).sin() - 2.0 * (2.0 * t * (1.0 - j)).sin() - 4.0 * (2.0 * t).sin()
        - (4.0 * t).cos()
        + 5.0)
        / 32.0
}

pub fn closed_form(pair: Pair, t: f64, j: f64) -> Option<ConcurrenceRecord> {
    let value = match (pair.m, pair.n) {
        (1, 2) => closed_form_c12(t, j),
        (3, 4) => closed_form_c34(t, j),
        (1, 3) => closed_form_c13(t, j),
        _ => return None,
    };
    Some(ConcurrenceRecord {
        pair,
        value,
        method: ConcurrenceMethod::ClosedForm,
    })
}

/// Transfer gap `G = (1/8)(−cos(t(J−3)) − 6 cos t cos(tJ) − cos(t(3+J)))`.
pub fn gap(t: f64, j: f64) -> f64 {
    (-(t * (j - 3.0)).cos() - 6.0 * t.cos() * (t * j).cos() - (t * (3.0 + j)).cos()) / 8.0
}

/// `C₃₄ − C₁₂` from Wootters concurrences of an actual state.
pub fn gap_from_states(psi: &PureState) -> Result<f64> {
    Ok(pair_concurrence(psi, Pair::P34)? - pair_concurrence(psi, Pair::P12)?)
}

/// `Σ_{n≠site} C²_{site,n}` via Wootters.
pub fn monogamy_sum(psi: &PureState, site: usize) -> Result<f64> {
    check_site(site)?;
    let mut s = 0.0;
    for other in (1..=N_SITES).filter(|&o| o != site) {
        let pair = Pair::new(site.min(other), site.max(other))?;
        s += pair_concurrence(psi, pair)?.powi(2);
    }
    Ok(s)
}

/// How a printed closed form compares with the Wootters concurrence along
/// the actual trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaDiscrepancy {
    pub pair: Pair,
    /// `max |printed − C|`
    pub max_abs_vs_concurrence: f64,
    pub argmax_t: f64,
    pub argmax_j: f64,
    /// `max |printed − C²|`
    pub max_abs_vs_squared: f64,
    pub printed_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub formulas: Vec<FormulaDiscrepancy>,
    /// `max |C₁₃ − C₂₄|` (both Wootters)
    pub max_c13_minus_c24: f64,
    pub points: usize,
}

impl DiscrepancyReport {
    pub fn formula(&self, pair: Pair) -> Option<&FormulaDiscrepancy> {
        self.formulas.iter().find(|f| f.pair == pair)
    }
}

/// Compares the printed (1,2), (3,4), (1,3) forms against Wootters
/// concurrences of numerically evolved states.
pub fn discrepancy_report(
    geometry: &PlaquetteGeometry,
    t_grid: &[f64],
    j_grid: &[f64],
) -> Result<DiscrepancyReport> {
    let pairs = [Pair::P12, Pair::P34, Pair::P13];
    let mut formulas: Vec<FormulaDiscrepancy> = pairs
        .iter()
        .map(|&pair| FormulaDiscrepancy {
            pair,
            max_abs_vs_concurrence: 0.0,
            argmax_t: f64::NAN,
            argmax_j: f64::NAN,
            max_abs_vs_squared: 0.0,
            printed_min: f64::INFINITY,
        })
        .collect();
    let mut max_c13_minus_c24: f64 = 0.0;
    let mut points = 0;
    for &j in j_grid {
        let prop = Propagator::new(&geometry.with_j(j))?;
        for &t in t_grid {
            let psi = prop.evolve_initial(t)?;
            points += 1;
            for f in formulas.iter_mut() {
                let c = pair_concurrence(&psi, f.pair)?;
                let printed = closed_form(f.pair, t, j).expect("printed pair").value;
                let err = (printed - c).abs();
                if err > f.max_abs_vs_concurrence || f.argmax_t.is_nan() {
                    f.max_abs_vs_concurrence = err;
                    f.argmax_t = t;
                    f.argmax_j = j;
                }
                f.max_abs_vs_squared = f.max_abs_vs_squared.max((printed - c * c).abs());
                f.printed_min = f.printed_min.min(printed);
            }
            let d = (pair_concurrence(&psi, Pair::P13)? - pair_concurrence(&psi, Pair::P24)?).abs();
            max_c13_minus_c24 = max_c13_minus_c24.max(d);
        }
    }
    Ok(DiscrepancyReport {
        formulas,
        max_c13_minus_c24,
        points,
    })
}
