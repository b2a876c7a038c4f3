use serde::Serialize;

use super::{format_rational, Rational};

/// A curve `J = 1 ± k/m` of transfer couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    /// k = 1
    JStar,
    /// k = 3
    J2Star,
    /// k = 5
    J3Star,
    /// k = 7, 9, …
    Extended(u32),
}

impl Family {
    pub fn from_k(k: u32) -> Self {
        match k {
            1 => Family::JStar,
            3 => Family::J2Star,
            5 => Family::J3Star,
            k => Family::Extended(k),
        }
    }

    pub fn k(self) -> u32 {
        match self {
            Family::JStar => 1,
            Family::J2Star => 3,
            Family::J3Star => 5,
            Family::Extended(k) => k,
        }
    }

    pub fn label(self) -> String {
        match self {
            Family::JStar => "J*".into(),
            Family::J2Star => "J**".into(),
            Family::J3Star => "J***".into(),
            Family::Extended(k) => format!("J(k={k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceEntry {
    pub family: Family,
    pub m: u32,
    /// `(1 − k/m, 1 + k/m)`
    #[serde(serialize_with = "ser_pair")]
    pub values: (Rational, Rational),
}

fn ser_pair<S: serde::Serializer>(v: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&format_rational(&v.0))?;
    t.serialize_element(&format_rational(&v.1))?;
    t.end()
}

/// Exact solutions of `(−1)^{m+1} cos(mπJ) = 1` on `[0, 2]`: `J = n/m` with
/// `n ≡ m + 1 (mod 2)`, reduced and ascending.
pub fn find_qst_j(m: u32) -> Vec<Rational> {
    if m == 0 {
        return Vec::new();
    }
    let m = i64::from(m);
    let start = (m + 1) % 2;
    (start..=2 * m)
        .step_by(2)
        .map(|n| Rational::new(n, m))
        .collect()
}

fn entries(max_m: u32, ks: impl Fn(u32) -> Vec<u32>) -> Vec<SequenceEntry> {
    let mut out = Vec::new();
    for k in ks(max_m) {
        for m in k.max(1)..=max_m {
            let ratio = Rational::new(i64::from(k), i64::from(m));
            let one = Rational::from_integer(1);
            out.push(SequenceEntry {
                family: Family::from_k(k),
                m,
                values: (one - ratio, one + ratio),
            });
        }
    }
    out.sort_by(|a, b| a.m.cmp(&b.m).then(a.family.k().cmp(&b.family.k())));
    out
}

/// The three tabulated families k = 1, 3, 5, each populated for `m ≥ k`.
pub fn sequence_table(max_m: u32) -> Vec<SequenceEntry> {
    entries(max_m, |_| vec![1, 3, 5])
}

/// Every odd k ≤ `max_m`; the union over families at row m equals
/// [`find_qst_j`]`(m)`.
pub fn sequence_table_extended(max_m: u32) -> Vec<SequenceEntry> {
    entries(max_m, |max_m| (1..=max_m).step_by(2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn root_sets() {
        assert_eq!(find_qst_j(1), vec![r(0, 1), r(2, 1)]);
        assert_eq!(find_qst_j(2), vec![r(1, 2), r(3, 2)]);
        assert_eq!(
            find_qst_j(5),
            vec![r(0, 1), r(2, 5), r(4, 5), r(6, 5), r(8, 5), r(2, 1)]
        );
        assert!(find_qst_j(0).is_empty());
    }

    #[test]
    fn table_cells() {
        let t = sequence_table(7);
        let find = |fam: Family, m: u32| t.iter().find(|e| e.family == fam && e.m == m).cloned();
        assert_eq!(find(Family::JStar, 7).unwrap().values, (r(6, 7), r(8, 7)));
        assert_eq!(find(Family::J2Star, 3).unwrap().values, (r(0, 1), r(2, 1)));
        assert_eq!(find(Family::J3Star, 6).unwrap().values, (r(1, 6), r(11, 6)));
        assert!(find(Family::J2Star, 2).is_none());
        assert!(find(Family::J3Star, 4).is_none());
        assert_eq!(t.len(), 7 + 5 + 3);
    }

    #[test]
    fn families_cover_the_root_sets() {
        for max_m in 1..=12 {
            let ext = sequence_table_extended(max_m);
            for m in 1..=max_m {
                let from_families: BTreeSet<Rational> = ext
                    .iter()
                    .filter(|e| e.m == m)
                    .flat_map(|e| [e.values.0, e.values.1])
                    .collect();
                let roots: BTreeSet<Rational> = find_qst_j(m).into_iter().collect();
                assert_eq!(from_families, roots, "m = {m}");
            }
        }
        for e in sequence_table(9) {
            let roots = find_qst_j(e.m);
            assert!(roots.contains(&e.values.0) && roots.contains(&e.values.1));
        }
    }
}
