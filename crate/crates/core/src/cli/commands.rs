use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::dynamics::{amplitudes_closed_form_with_d, closed_form_state, phase_quotiented_distance, Propagator};
use crate::entanglement::{closed_form, gap, pair_concurrence, Pair};
use crate::error::{Error, Result};
use crate::qst::{
    format_rational, forbidden_j_scan, locate_events_2d, rational_to_f64, sequence_table, wstate_scan, EventStatus,
    Rational, SequenceEntry, QST_TOL, W_PAIRS,
};
use crate::spin::PlaquetteGeometry;

use super::config::SweepConfig;
use super::output::Table;

/// Default events resolution, points per π.
pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Signal {
    C12,
    C34,
    C13,
    C24,
    Gap,
}

impl Signal {
    pub const ALL: [Signal; 5] = [Signal::C12, Signal::C34, Signal::C13, Signal::C24, Signal::Gap];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C12" => Ok(Signal::C12),
            "C34" => Ok(Signal::C34),
            "C13" => Ok(Signal::C13),
            "C24" => Ok(Signal::C24),
            "GAP" | "G" => Ok(Signal::Gap),
            other => Err(Error::Config(format!("unknown signal '{other}'"))),
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let set: BTreeSet<Signal> = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(Signal::parse)
            .collect::<Result<_>>()?;
        if set.is_empty() {
            return Err(Error::Config("at least one signal is required".into()));
        }
        Ok(set.into_iter().collect())
    }

    pub fn name(self) -> &'static str {
        match self {
            Signal::C12 => "C12",
            Signal::C34 => "C34",
            Signal::C13 => "C13",
            Signal::C24 => "C24",
            Signal::Gap => "GAP",
        }
    }

    fn pair(self) -> Option<Pair> {
        match self {
            Signal::C12 => Some(Pair::P12),
            Signal::C34 => Some(Pair::P34),
            Signal::C13 => Some(Pair::P13),
            Signal::C24 => Some(Pair::P24),
            Signal::Gap => None,
        }
    }

    fn has_closed_form(self) -> bool {
        self != Signal::C24
    }
}

/// One propagator per J of the grid, with `D` from the geometry.
fn propagators(geometry: &PlaquetteGeometry, js: &[f64]) -> Result<Vec<Propagator>> {
    js.iter().map(|&j| Propagator::new(&geometry.with_j(j))).collect()
}

fn j_axis(cfg: &SweepConfig, pinned_j: Option<f64>) -> Result<Vec<f64>> {
    match pinned_j {
        Some(j) if j.is_finite() => Ok(vec![j]),
        Some(j) => Err(Error::Config(format!("J = {j} is not finite"))),
        None => Ok(cfg.j_grid()),
    }
}

pub const EVOLVE_COLUMNS: [&str; 16] = [
    "t", "J", "re_eta", "im_eta", "re_xi", "im_xi", "re_alpha", "im_alpha", "re_beta", "im_beta", "abs_eta",
    "abs_xi", "abs_alpha", "abs_beta", "norm", "deviation",
];

/// Closed-form trajectory rows (t-major) with the phase-quotiented distance
/// to the numerically evolved state of the configured geometry.
pub fn cmd_evolve(cfg: &SweepConfig, pinned_j: Option<f64>) -> Result<Table> {
    cfg.validate()?;
    let geometry = cfg.load_geometry()?;
    let js = j_axis(cfg, pinned_j)?;
    let props = propagators(&geometry, &js)?;
    let mut table = Table::new(EVOLVE_COLUMNS);
    for t in cfg.t_grid() {
        for (&j, prop) in js.iter().zip(&props) {
            let a = amplitudes_closed_form_with_d(t, j, cfg.d);
            let numeric = prop.evolve_initial(t)?;
            let reference = closed_form_state(t, j, cfg.d);
            let dev = phase_quotiented_distance(numeric.amplitudes(), reference.amplitudes());
            let amps = a.as_array();
            let mut row = vec![t.into(), j.into()];
            for z in amps {
                row.push(z.re.into());
                row.push(z.im.into());
            }
            for z in amps {
                row.push(z.norm().into());
            }
            row.push(a.norm_squared().sqrt().into());
            row.push(dev.into());
            table.push(row);
        }
    }
    Ok(table)
}

/// Requested signal surfaces, t-major. Each pair gets a `_WOOTTERS` column
/// from the numeric state and, when a printed form exists, a `_CLOSED_FORM`
/// column; the gap gets the printed form and `C34 − C12` of the state.
pub fn cmd_surface(cfg: &SweepConfig, signals: &[Signal], pinned_j: Option<f64>) -> Result<Table> {
    cfg.validate()?;
    if signals.is_empty() {
        return Err(Error::Config("at least one signal is required".into()));
    }
    let geometry = cfg.load_geometry()?;
    let js = j_axis(cfg, pinned_j)?;
    let props = propagators(&geometry, &js)?;
    let mut columns = vec!["t".to_string(), "J".to_string()];
    for s in signals {
        columns.push(format!("{}_WOOTTERS", s.name()));
        if s.has_closed_form() {
            columns.push(format!("{}_CLOSED_FORM", s.name()));
        }
    }
    let mut table = Table::new(columns);
    let d = cfg.d;
    for t in cfg.t_grid() {
        for (&j, prop) in js.iter().zip(&props) {
            let psi = prop.evolve_initial(t)?;
            let (tu, ju) = (t * d, j / d);
            let mut row = vec![t.into(), j.into()];
            for &s in signals {
                match s.pair() {
                    Some(pair) => {
                        row.push(pair_concurrence(&psi, pair)?.into());
                        if let Some(rec) = closed_form(pair, tu, ju) {
                            row.push(rec.value.into());
                        }
                    }
                    None => {
                        let w = pair_concurrence(&psi, Pair::P34)? - pair_concurrence(&psi, Pair::P12)?;
                        row.push(w.into());
                        row.push(gap(tu, ju).into());
                    }
                }
            }
            table.push(row);
        }
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Cell {
    pub entry: SequenceEntry,
    pub j: Rational,
    pub t: f64,
    pub gap: f64,
    pub c12: f64,
    pub c34: f64,
    pub gap_ok: bool,
    pub transfer_ok: bool,
}

/// Every printed cell of the sequence table, verified by the printed gap
/// (to 1e-12) and by Wootters concurrences of the evolved state.
pub fn table1_cells(geometry: &PlaquetteGeometry, max_m: u32) -> Result<Vec<Table1Cell>> {
    if max_m == 0 {
        return Err(Error::Config("max_m must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for entry in sequence_table(max_m) {
        let t = entry.m as f64 * PI;
        for j in [entry.values.0, entry.values.1] {
            let jv = rational_to_f64(&j);
            let psi = Propagator::new(&geometry.with_couplings(1.0, jv))?.evolve_initial(t)?;
            let c12 = pair_concurrence(&psi, Pair::P12)?;
            let c34 = pair_concurrence(&psi, Pair::P34)?;
            let g = gap(t, jv);
            cells.push(Table1Cell {
                entry: entry.clone(),
                j,
                t,
                gap: g,
                c12,
                c34,
                gap_ok: (g - 1.0).abs() < 1e-12,
                transfer_ok: c12 <= QST_TOL && c34 >= 1.0 - QST_TOL,
            });
        }
    }
    Ok(cells)
}

/// `(cells, distinct J values, distinct J values strictly inside (0, 2))`
pub fn table1_counts(cells: &[Table1Cell]) -> (usize, usize, usize) {
    let distinct: BTreeSet<Rational> = cells.iter().map(|c| c.j).collect();
    let (zero, two) = (Rational::from_integer(0), Rational::from_integer(2));
    let interior = distinct.iter().filter(|&&j| j > zero && j < two).count();
    (cells.len(), distinct.len(), interior)
}

pub fn cmd_table1(cfg: &SweepConfig) -> Result<Table> {
    if cfg.max_m == 0 {
        return Err(Error::Config("max_m must be at least 1".into()));
    }
    let geometry = cfg.load_geometry()?;
    let cells = table1_cells(&geometry, cfg.max_m)?;
    let mut table = Table::new([
        "family", "k", "m", "t", "J", "J_value", "gap", "c12", "c34", "gap_ok", "transfer_ok",
    ]);
    for c in cells {
        table.push(vec![
            c.entry.family.label().into(),
            c.entry.family.k().into(),
            c.entry.m.into(),
            c.t.into(),
            format_rational(&c.j).into(),
            rational_to_f64(&c.j).into(),
            c.gap.into(),
            c.c12.into(),
            c.c34.into(),
            c.gap_ok.into(),
            c.transfer_ok.into(),
        ]);
    }
    Ok(table)
}

fn status_name(s: EventStatus) -> &'static str {
    match s {
        EventStatus::Confirmed => "CONFIRMED",
        EventStatus::Unconfirmed => "UNCONFIRMED",
        EventStatus::Rejected => "REJECTED",
    }
}

/// Transfer events in the configured window (t half-open, J closed).
pub fn cmd_events(cfg: &SweepConfig, resolution: usize) -> Result<Table> {
    cfg.validate()?;
    let geometry = cfg.load_geometry()?;
    let events = locate_events_2d(&geometry, (cfg.t_min, cfg.t_max), (cfg.j_min, cfg.j_max), resolution)?;
    let mut table = Table::new([
        "m", "t", "J", "J_value", "on_transfer_line", "gap", "c12", "c34", "status",
    ]);
    for e in events {
        table.push(vec![
            e.m.into(),
            e.t.into(),
            e.j.as_ref().map_or_else(|| "UNRATIONALIZED".to_string(), format_rational).into(),
            e.j_value.into(),
            e.on_transfer_line.into(),
            e.gap_value.into(),
            e.c12.into(),
            e.c34.into(),
            status_name(e.status).into(),
        ]);
    }
    Ok(table)
}

pub fn parse_j_values(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(super::config::parse_scalar)
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::Config("no J values given".into()));
    }
    Ok(v)
}

/// Gap supremum over `[0, t_max]` for each J.
pub fn cmd_forbidden(cfg: &SweepConfig, j_values: &[f64]) -> Result<Table> {
    if !(cfg.t_max >= 2.0 * PI) {
        return Err(Error::Config(format!("t_max = {} must be at least 2π", cfg.t_max)));
    }
    let records = forbidden_j_scan(j_values, cfg.t_max)?;
    let mut table = Table::new(["J", "sup_gap", "t_at_sup", "margin", "forbidden"]);
    for r in records {
        table.push(vec![
            r.j.into(),
            r.sup_gap.into(),
            r.t_at_sup.into(),
            r.margin.into(),
            r.forbidden.into(),
        ]);
    }
    Ok(table)
}

/// Grid points where all watched pair concurrences sit within `threshold`
/// of ½.
pub fn cmd_wstate(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let geometry = cfg.load_geometry()?;
    let hits = wstate_scan(&geometry, &cfg.t_grid(), &cfg.j_grid(), cfg.threshold)?;
    let mut columns = vec!["t".to_string(), "J".to_string()];
    columns.extend(W_PAIRS.iter().map(|p| format!("C{}{}", p.m, p.n)));
    columns.push("max_deviation_from_half".into());
    let mut table = Table::new(columns);
    for h in hits {
        let mut row = vec![h.t.into(), h.j.into()];
        row.extend(h.concurrences.iter().map(|&c| c.into()));
        row.push(h.max_deviation_from_half.into());
        table.push(row);
    }
    Ok(table)
}
