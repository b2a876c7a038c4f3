//! Spin-½ operators on the four-site register and the plaquette Hamiltonian.
//!
//! Basis index `b` in `0..16` encodes `|q1 q2 q3 q4⟩` with qubit 1 as the most
//! significant bit. Bit value 1 is spin up (`|1⟩`), 0 is spin down.

use std::fmt;

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::dynamics::SingleExcitationAmplitudes;
use crate::error::{Error, Result};

pub const N_SITES: usize = 4;
pub const DIM: usize = 1 << N_SITES;

pub type Operator = SMatrix<Complex64, DIM, DIM>;
pub type StateVector = SVector<Complex64, DIM>;
pub type Block4 = Matrix4<Complex64>;

/// Basis indices of the single-excitation sector in amplitude order
/// (η, ξ, α, β) = (|0001⟩, |0010⟩, |0100⟩, |1000⟩).
pub const SINGLE_EXCITATION_INDICES: [usize; 4] = [0b0001, 0b0010, 0b0100, 0b1000];

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Bit mask of `site` (1-based) inside a basis index.
#[inline]
pub fn site_mask(site: usize) -> usize {
    1 << (N_SITES - site)
}

/// Basis index of the state with a single up spin at `site`.
#[inline]
pub fn excitation_index(site: usize) -> usize {
    site_mask(site)
}

pub(crate) fn check_site(site: usize) -> Result<()> {
    if (1..=N_SITES).contains(&site) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "site index {site} outside 1..={N_SITES}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// Single-site spin matrix in the local `(|0⟩, |1⟩)` = (down, up) order.
    fn local(self) -> Matrix2<Complex64> {
        let h = 0.5;
        match self {
            Axis::X => Matrix2::new(C0, C1 * h, C1 * h, C0),
            // S^y = (S⁺ − S⁻)/2i with S⁺|0⟩ = |1⟩.
            Axis::Y => Matrix2::new(
                C0,
                Complex64::new(0.0, h),
                Complex64::new(0.0, -h),
                C0,
            ),
            Axis::Z => Matrix2::new(C1 * -h, C0, C0, C1 * h),
        }
    }
}

/// A unit-norm state of the four-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: StateVector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: StateVector) -> Result<Self> {
        let deficit = 1.0 - amplitudes.norm_squared();
        if deficit.abs() > Self::NORM_TOL {
            return Err(Error::Normalization { deficit });
        }
        Ok(Self { amplitudes })
    }

    /// Wraps a vector whose norm the caller has already checked.
    pub(crate) fn from_unchecked(amplitudes: StateVector) -> Self {
        Self { amplitudes }
    }

    pub fn basis(index: usize) -> Result<Self> {
        if index >= DIM {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} outside 0..{DIM}"
            )));
        }
        let mut v = StateVector::zeros();
        v[index] = C1;
        Ok(Self { amplitudes: v })
    }

    /// `(|10⟩ + |01⟩)₁₂ |00⟩₃₄ / √2`: a Bell pair on qubits 1,2 and both
    /// remaining spins down.
    pub fn bell_pair_initial() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = StateVector::zeros();
        v[0b1000] = a;
        v[0b0100] = a;
        Self { amplitudes: v }
    }

    /// The four-qubit W state, uniform over the single-excitation sector.
    pub fn w_state() -> Self {
        let mut v = StateVector::zeros();
        for &i in &SINGLE_EXCITATION_INDICES {
            v[i] = Complex64::new(0.5, 0.0);
        }
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> &StateVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Largest |amplitude| outside the single-excitation sector.
    pub fn leakage_outside_single_excitation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i.count_ones() != 1)
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max)
    }

    /// Amplitudes of the single-up-spin states, indexed by site 1..=4.
    pub fn single_excitation_by_site(&self) -> [Complex64; 4] {
        [1, 2, 3, 4].map(|s| self.amplitudes[excitation_index(s)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BondKind {
    /// `D ẑ · (S_i × S_j)` on a directed bond.
    DmZ,
    /// Isotropic `J S_i · S_j`.
    HeisenbergIso,
}

impl BondKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BondKind::DmZ => "DM_Z",
            BondKind::HeisenbergIso => "HEISENBERG_ISO",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DM_Z" | "DM" => Some(BondKind::DmZ),
            "HEISENBERG_ISO" | "HEISENBERG" => Some(BondKind::HeisenbergIso),
            _ => None,
        }
    }
}

impl fmt::Display for BondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One coupling term. `strength` multiplies the geometry-wide `D` (for
/// [`BondKind::DmZ`]) or `J` (for [`BondKind::HeisenbergIso`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub kind: BondKind,
    pub from: usize,
    pub to: usize,
    pub strength: f64,
}

impl Bond {
    pub fn new(kind: BondKind, from: usize, to: usize, strength: f64) -> Self {
        Self {
            kind,
            from,
            to,
            strength,
        }
    }

    pub fn dm(from: usize, to: usize) -> Self {
        Self::new(BondKind::DmZ, from, to, 1.0)
    }

    pub fn heisenberg(a: usize, b: usize) -> Self {
        Self::new(BondKind::HeisenbergIso, a, b, 1.0)
    }

    fn unordered(&self) -> (usize, usize) {
        (self.from.min(self.to), self.from.max(self.to))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaquetteGeometry {
    pub bonds: Vec<Bond>,
    pub d: f64,
    pub j: f64,
}

impl PlaquetteGeometry {
    pub const DEFAULT_NAME: &'static str = "paper-default";

    pub fn new(bonds: Vec<Bond>, d: f64, j: f64) -> Result<Self> {
        let g = Self { bonds, d, j };
        g.validate()?;
        Ok(g)
    }

    /// DM on the directed ring 1→2→3→4→1, Heisenberg on the diagonals
    /// (1,3) and (2,4).
    pub fn paper_default(d: f64, j: f64) -> Self {
        Self {
            bonds: vec![
                Bond::dm(1, 2),
                Bond::dm(2, 3),
                Bond::dm(3, 4),
                Bond::dm(4, 1),
                Bond::heisenberg(1, 3),
                Bond::heisenberg(2, 4),
            ],
            d,
            j,
        }
    }

    /// Negative control with the couplings swapped: Heisenberg on the ring,
    /// DM on the directed diagonals 1→3, 2→4.
    pub fn swapped_control(d: f64, j: f64) -> Self {
        Self {
            bonds: vec![
                Bond::heisenberg(1, 2),
                Bond::heisenberg(2, 3),
                Bond::heisenberg(3, 4),
                Bond::heisenberg(4, 1),
                Bond::dm(1, 3),
                Bond::dm(2, 4),
            ],
            d,
            j,
        }
    }

    pub fn with_j(&self, j: f64) -> Self {
        Self { j, ..self.clone() }
    }

    pub fn with_couplings(&self, d: f64, j: f64) -> Self {
        Self {
            d,
            j,
            bonds: self.bonds.clone(),
        }
    }

    /// Same geometry with every DM bond direction flipped.
    pub fn reversed_dm(&self) -> Self {
        let bonds = self
            .bonds
            .iter()
            .map(|b| match b.kind {
                BondKind::DmZ => Bond {
                    from: b.to,
                    to: b.from,
                    ..*b
                },
                BondKind::HeisenbergIso => *b,
            })
            .collect();
        Self {
            bonds,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bonds.is_empty() {
            return Err(Error::Config("geometry has no bonds".into()));
        }
        if !self.d.is_finite() || !self.j.is_finite() {
            return Err(Error::Config(format!(
                "couplings must be finite (D = {}, J = {})",
                self.d, self.j
            )));
        }
        for (i, b) in self.bonds.iter().enumerate() {
            check_site(b.from).and(check_site(b.to)).map_err(|_| {
                Error::Config(format!(
                    "bond {i}: site indices ({}, {}) outside 1..=4",
                    b.from, b.to
                ))
            })?;
            if b.from == b.to {
                return Err(Error::Config(format!(
                    "bond {i}: self-coupling on site {}",
                    b.from
                )));
            }
            if !b.strength.is_finite() {
                return Err(Error::Config(format!("bond {i}: non-finite strength")));
            }
            if let Some(k) = self.bonds[..i]
                .iter()
                .position(|o| o.kind == b.kind && o.unordered() == b.unordered())
            {
                return Err(Error::Config(format!(
                    "bond {i} duplicates bond {k} ({} on {:?})",
                    b.kind,
                    b.unordered()
                )));
            }
        }
        Ok(())
    }
}

/// `½ σ^axis` acting on `site` (1-based), identity elsewhere.
pub fn spin_operator_at(site: usize, axis: Axis) -> Result<Operator> {
    check_site(site)?;
    let local = axis.local();
    let mask = site_mask(site);
    Ok(Operator::from_fn(|r, c| {
        // Identity on all other sites.
        if (r & !mask) != (c & !mask) {
            return C0;
        }
        let rb = usize::from(r & mask != 0);
        let cb = usize::from(c & mask != 0);
        local[(rb, cb)]
    }))
}

fn spin_ops() -> [[Operator; 3]; N_SITES] {
    let mut ops = [[Operator::zeros(); 3]; N_SITES];
    for (s, row) in ops.iter_mut().enumerate() {
        for (a, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
            row[a] = spin_operator_at(s + 1, axis).expect("site in range");
        }
    }
    ops
}

/// Assembles the 16×16 Hamiltonian
/// `Σ_{DM i→j} D·s·(S^x_i S^y_j − S^y_i S^x_j) + Σ_{Heis (i,j)} J·s·S_i·S_j`.
pub fn build_hamiltonian(geom: &PlaquetteGeometry) -> Result<Operator> {
    geom.validate()?;
    let ops = spin_ops();
    let mut h = Operator::zeros();
    for b in &geom.bonds {
        let (i, j) = (b.from - 1, b.to - 1);
        let [xi, yi, zi] = &ops[i];
        let [xj, yj, zj] = &ops[j];
        match b.kind {
            BondKind::DmZ => {
                let w = geom.d * b.strength;
                h += (xi * yj - yi * xj) * Complex64::new(w, 0.0);
            }
            BondKind::HeisenbergIso => {
                let w = geom.j * b.strength;
                h += (xi * xj + yi * yj + zi * zj) * Complex64::new(w, 0.0);
            }
        }
    }
    Ok(h)
}

/// Total `S^z` of the register.
pub fn total_sz() -> Operator {
    Operator::from_diagonal(&StateVector::from_fn(|b, _| {
        let ups = b.count_ones() as f64;
        Complex64::new(ups - 0.5 * N_SITES as f64, 0.0)
    }))
}

/// `max |H_ab|` over pairs with different magnetization.
pub fn magnetization_violation(h: &Operator) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..DIM {
        for c in 0..DIM {
            if (r as u32).count_ones() != (c as u32).count_ones() {
                worst = worst.max(h[(r, c)].norm());
            }
        }
    }
    worst
}

/// `max |H − H†|`.
pub fn hermiticity_violation(h: &Operator) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Restriction of `h` to the ordered basis (|0001⟩, |0010⟩, |0100⟩, |1000⟩).
pub fn single_excitation_block(h: &Operator) -> Result<Block4> {
    let leak = magnetization_violation(h);
    if leak > 1e-12 {
        return Err(Error::ContractViolation(format!(
            "operator mixes magnetization sectors (max off-sector element {leak:e})"
        )));
    }
    let idx = SINGLE_EXCITATION_INDICES;
    Ok(Block4::from_fn(|r, c| h[(idx[r], idx[c])]))
}

/// Places (η, ξ, α, β) on |0001⟩, |0010⟩, |0100⟩, |1000⟩.
pub fn embed_single_excitation(a: &SingleExcitationAmplitudes) -> Result<PureState> {
    let deficit = 1.0 - a.norm_squared();
    if deficit.abs() > 1e-10 {
        return Err(Error::Normalization { deficit });
    }
    let mut v = StateVector::zeros();
    for (&i, z) in SINGLE_EXCITATION_INDICES.iter().zip(a.as_array()) {
        v[i] = z;
    }
    Ok(PureState::from_unchecked(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn apply(op: &Operator, index: usize) -> StateVector {
        op * PureState::basis(index).unwrap().amplitudes()
    }

    #[test]
    fn sz_on_up_and_down_spins() {
        let v = apply(&spin_operator_at(1, Axis::Z).unwrap(), 0b1000);
        assert_eq!(v[0b1000], Complex64::new(0.5, 0.0));
        let v = apply(&spin_operator_at(3, Axis::Z).unwrap(), 0b1000);
        assert_eq!(v[0b1000], Complex64::new(-0.5, 0.0));
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn sx_flips_one_spin() {
        let v = apply(&spin_operator_at(2, Axis::X).unwrap(), 0b0000);
        assert_eq!(v[0b0100], Complex64::new(0.5, 0.0));
        assert_abs_diff_eq!(v.norm(), 0.5);
    }

    #[test]
    fn spin_algebra_on_each_site() {
        // [S^x, S^y] = i S^z
        for s in 1..=4 {
            let x = spin_operator_at(s, Axis::X).unwrap();
            let y = spin_operator_at(s, Axis::Y).unwrap();
            let z = spin_operator_at(s, Axis::Z).unwrap();
            let comm = x * y - y * x - z * Complex64::i();
            assert!(comm.norm() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        assert!(matches!(
            spin_operator_at(0, Axis::X),
            Err(Error::InvalidArgument(_))
        ));
        assert!(spin_operator_at(5, Axis::Z).is_err());
    }

    #[test]
    fn ring_block_spectrum() {
        // (i/2)(P − P†) for the cyclic shift P has eigenvalues −sin(2πk/4).
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, 0.0)).unwrap();
        let b = single_excitation_block(&h).unwrap();
        let mut ev: Vec<f64> = b.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn dm_block_has_imaginary_ring_hopping() {
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, 0.0)).unwrap();
        let b = single_excitation_block(&h).unwrap();
        let row = |site: usize| 4 - site; // block order is site 4, 3, 2, 1
        for (i, j) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            assert_abs_diff_eq!(b[(row(i), row(j))].im, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(b[(row(i), row(j))].re, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(b[(row(j), row(i))].im, -0.5, epsilon = 1e-15);
        }
        for k in 0..4 {
            assert_eq!(b[(k, k)].norm(), 0.0);
        }
        // diagonals carry no DM hopping
        assert_eq!(b[(row(1), row(3))].norm(), 0.0);
    }

    #[test]
    fn heisenberg_block_on_legs() {
        let h = build_hamiltonian(&PlaquetteGeometry::paper_default(0.0, 1.0)).unwrap();
        let b = single_excitation_block(&h).unwrap();
        let row = |site: usize| 4 - site;
        assert_abs_diff_eq!(b[(row(1), row(3))].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b[(row(2), row(4))].re, 0.5, epsilon = 1e-15);
        assert_eq!(b[(row(1), row(2))].norm(), 0.0);
        for k in 0..4 {
            assert_abs_diff_eq!(b[(k, k)].norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn leg_matrix_element_is_half_j() {
        for j in [-1.3, 0.0, 0.5, 2.0] {
            let h = build_hamiltonian(&PlaquetteGeometry::paper_default(1.0, j)).unwrap();
            assert_abs_diff_eq!(h[(0b1000, 0b0010)].re, j / 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(h[(0b1000, 0b0010)].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_hamiltonian_block() {
        assert_eq!(single_excitation_block(&Operator::zeros()).unwrap(), Block4::zeros());
    }

    #[test]
    fn sector_mixing_operator_is_rejected() {
        let x = spin_operator_at(1, Axis::X).unwrap();
        assert!(matches!(
            single_excitation_block(&x),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn geometry_errors() {
        assert!(matches!(
            build_hamiltonian(&PlaquetteGeometry {
                bonds: vec![],
                d: 1.0,
                j: 0.0
            }),
            Err(Error::Config(_))
        ));
        let dup = PlaquetteGeometry {
            bonds: vec![Bond::heisenberg(1, 3), Bond::heisenberg(3, 1)],
            d: 1.0,
            j: 1.0,
        };
        assert!(matches!(build_hamiltonian(&dup), Err(Error::Config(_))));
        // same pair, different kind is fine
        let mixed = PlaquetteGeometry::new(vec![Bond::heisenberg(1, 3), Bond::dm(3, 1)], 1.0, 1.0);
        assert!(mixed.is_ok());
        assert!(PlaquetteGeometry::new(vec![Bond::dm(2, 2)], 1.0, 0.0).is_err());
        assert!(PlaquetteGeometry::new(vec![Bond::dm(0, 2)], 1.0, 0.0).is_err());
    }

    #[test]
    fn hermitian_and_conserves_sz() {
        let sz = total_sz();
        for (d, j) in [(1.0, 0.0), (1.0, 0.5), (0.7, -2.0), (0.0, 1.0)] {
            for geom in [
                PlaquetteGeometry::paper_default(d, j),
                PlaquetteGeometry::swapped_control(d, j),
            ] {
                let h = build_hamiltonian(&geom).unwrap();
                assert_eq!(hermiticity_violation(&h), 0.0);
                assert!((h * sz - sz * h).norm() < 1e-12);
                assert!(magnetization_violation(&h) < 1e-12);
            }
        }
    }

    #[test]
    fn reversing_dm_negates_dm_part() {
        let fwd = PlaquetteGeometry::paper_default(1.0, 0.0);
        let rev = build_hamiltonian(&fwd.reversed_dm()).unwrap();
        let neg = build_hamiltonian(&fwd.with_couplings(-1.0, 0.0)).unwrap();
        assert!((rev - neg).norm() < 1e-15);
    }

    #[test]
    fn block_is_linear_in_couplings() {
        let block = |d, j| {
            single_excitation_block(
                &build_hamiltonian(&PlaquetteGeometry::paper_default(d, j)).unwrap(),
            )
            .unwrap()
        };
        let (bd, bj) = (block(1.0, 0.0), block(0.0, 1.0));
        for (d, j) in [(0.3, 1.7), (2.0, -0.5), (1.0, 1.0)] {
            let lin = bd * Complex64::new(d, 0.0) + bj * Complex64::new(j, 0.0);
            assert!((block(d, j) - lin).norm() < 1e-14);
        }
    }

    #[test]
    fn embedding_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        let amps = SingleExcitationAmplitudes::from_components(c(0.0), c(0.0), c(s), c(s));
        assert_eq!(embed_single_excitation(&amps).unwrap(), PureState::bell_pair_initial());

        let amps = SingleExcitationAmplitudes::from_components(c(1.0), c(0.0), c(0.0), c(0.0));
        assert_eq!(embed_single_excitation(&amps).unwrap(), PureState::basis(0b0001).unwrap());

        let amps = SingleExcitationAmplitudes::from_components(c(0.5), c(0.5), c(0.5), c(0.5));
        assert_eq!(embed_single_excitation(&amps).unwrap(), PureState::w_state());

        let bad = SingleExcitationAmplitudes::from_components(c(0.5), c(0.0), c(0.0), c(0.0));
        match embed_single_excitation(&bad) {
            Err(Error::Normalization { deficit }) => assert_abs_diff_eq!(deficit, 0.75),
            other => panic!("expected normalization error, got {other:?}"),
        }
    }

    #[test]
    fn pure_state_rejects_unnormalized() {
        let mut v = StateVector::zeros();
        v[3] = Complex64::new(0.9, 0.0);
        assert!(matches!(PureState::new(v), Err(Error::Normalization { .. })));
        v[3] = Complex64::new(0.0, 1.0);
        assert!(PureState::new(v).is_ok());
    }
}
