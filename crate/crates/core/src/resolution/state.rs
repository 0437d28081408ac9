use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par;

pub type DivisorId = u32;
pub type StratumId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Klass {
    E,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Initial,
    Exceptional { step: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorRec {
    pub id: DivisorId,
    pub klass: Klass,
    pub mult: u32,
    pub origin: Origin,
}

impl DivisorRec {
    pub fn label(&self) -> String {
        match (self.klass, self.origin) {
            (Klass::E, Origin::Initial) => format!("E{}", self.id),
            (Klass::F, _) => format!("F{}", self.id),
            (Klass::E, Origin::Exceptional { step }) => format!("X{step}"),
        }
    }
}

/// A nonempty intersection of divisors contained in `X`. Only strata along which `X` is not
/// transversal to the divisors are tracked; everything else is smooth and transversal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub id: StratumId,
    /// Sorted divisor ids.
    pub divisors: Vec<DivisorId>,
    pub dim: usize,
    pub in_x: bool,
    pub alive: bool,
}

/// `(g_1, g_2, n)` ordered lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FValue {
    pub g1: u32,
    pub g2: u32,
    pub ncomp: u32,
}

impl FValue {
    pub const ZERO: FValue = FValue {
        g1: 0,
        g2: 0,
        ncomp: 0,
    };

    pub fn is_zero(&self) -> bool {
        *self == FValue::ZERO
    }
}

impl fmt::Display for FValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.g1, self.g2, self.ncomp)
    }
}

impl Serialize for FValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.g1)?;
        t.serialize_element(&self.g2)?;
        t.serialize_element(&self.ncomp)?;
        t.end()
    }
}

/// Deliberate rule corruptions used to check that the oracle and the invariants have teeth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Also spawn `{E_new, E, F} ∪ T`.
    SpawnCenterPair,
    /// Never spawn `{E_new, F} ∪ T`.
    SkipChartASpawn,
    /// Give the exceptional divisor the multiplicity of `E` instead of one less.
    KeepExceptionalMult,
    /// Let E-class divisors of multiplicity zero participate.
    ParticipateZeroMult,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::SpawnCenterPair,
        Mutation::SkipChartASpawn,
        Mutation::KeepExceptionalMult,
        Mutation::ParticipateZeroMult,
    ];
}

/// Which maximal stratum and which pair on it is blown up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest stratum id, then lowest E id, then lowest F id.
    #[default]
    LowestIds,
    /// Highest stratum id, then highest E id, then highest F id.
    HighestIds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupRecord {
    pub step: u32,
    pub center: (DivisorId, DivisorId),
    pub center_mult: u32,
    pub new_divisor: DivisorId,
    pub new_mult: u32,
    pub killed: Vec<StratumId>,
    pub spawned: Vec<StratumId>,
    pub discrepancy_delta: i64,
    /// Components of the singular locus of codimension two in `X` lying in the center.
    pub divisorial_singular_in_center: u32,
    /// All minimal singular components lying in the center.
    pub singular_in_center: u32,
}

/// Level sets of `g` over alive strata, keyed by `(g_1, g_2)`, valued by the distinct
/// participating supports at that level.
pub type FTable = BTreeMap<(u32, u32), BTreeSet<Vec<DivisorId>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialState {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    pub ambient_dim: usize,
    pub divisors: Vec<DivisorRec>,
    pub strata: Vec<Stratum>,
    pub step: u32,
    pub discrepancy: i64,
    pub history: Vec<BlowupRecord>,
    pub tie_break: TieBreak,
    pub mutation: Option<Mutation>,
    #[serde(skip)]
    alive: BTreeMap<Vec<DivisorId>, StratumId>,
    #[serde(skip)]
    alive_ids: BTreeSet<StratumId>,
}

/// The r-fold cyclic cover `s^r = ∏ ℓ_j` of projective n-space branched along `m` hyperplanes
/// in general position, seen inside the total space of a line bundle: one E-class divisor (the
/// zero section, multiplicity `r`) and `m` F-class divisors (pullbacks of the hyperplanes).
pub fn init_cyclic_cover(n: usize, m: usize, r: u32) -> Result<BinomialState> {
    let bad = |reason: &str| Error::InvalidTuple {
        n,
        m,
        r,
        reason: reason.to_string(),
    };
    if n < 1 || r < 2 {
        return Err(bad("need n ≥ 1 and r ≥ 2"));
    }
    if !m.is_multiple_of(r as usize) {
        return Err(bad("r must divide m"));
    }
    if m != n + 1 + m / r as usize {
        return Err(bad("m ≠ n + 1 + m/r"));
    }
    let mut divisors = vec![DivisorRec {
        id: 0,
        klass: Klass::E,
        mult: r,
        origin: Origin::Initial,
    }];
    divisors.extend((1..=m as u32).map(|id| DivisorRec {
        id,
        klass: Klass::F,
        mult: 1,
        origin: Origin::Initial,
    }));
    let mut state = BinomialState {
        n,
        m,
        r,
        ambient_dim: n + 1,
        divisors,
        strata: Vec::new(),
        step: 0,
        discrepancy: 0,
        history: Vec::new(),
        tie_break: TieBreak::LowestIds,
        mutation: None,
        alive: BTreeMap::new(),
        alive_ids: BTreeSet::new(),
    };
    for k in 1..=n {
        for s in (1..=m as u32).combinations(k) {
            let mut divisors = vec![0];
            divisors.extend(s);
            state.push_stratum(divisors);
        }
    }
    Ok(state)
}

impl BinomialState {
    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    fn push_stratum(&mut self, divisors: Vec<DivisorId>) -> StratumId {
        let id = self.strata.len() as StratumId;
        self.alive.insert(divisors.clone(), id);
        self.alive_ids.insert(id);
        self.strata.push(Stratum {
            id,
            dim: self.ambient_dim.saturating_sub(divisors.len()),
            divisors,
            in_x: true,
            alive: true,
        });
        id
    }

    pub fn divisor(&self, id: DivisorId) -> &DivisorRec {
        &self.divisors[id as usize]
    }

    pub fn stratum(&self, id: StratumId) -> &Stratum {
        &self.strata[id as usize]
    }

    /// Alive strata in id order.
    pub fn alive_strata(&self) -> impl Iterator<Item = &Stratum> {
        self.alive_ids.iter().map(|&id| &self.strata[id as usize])
    }

    pub fn alive_count(&self) -> usize {
        self.alive.len()
    }

    /// Alive stratum with exactly this (sorted) divisor set.
    pub fn find_alive(&self, divisors: &[DivisorId]) -> Option<StratumId> {
        self.alive.get(divisors).copied()
    }

    /// Whether the local coordinate of `id` occurs in the binomial equation.
    pub fn participates(&self, id: DivisorId) -> bool {
        let d = self.divisor(id);
        match d.klass {
            Klass::F => d.mult > 0,
            Klass::E => d.mult > 0 || self.mutation == Some(Mutation::ParticipateZeroMult),
        }
    }

    pub fn support(&self, divisors: &[DivisorId]) -> Vec<DivisorId> {
        divisors
            .iter()
            .copied()
            .filter(|&d| self.participates(d))
            .collect()
    }

    /// `V(D) ⊂ X` iff some E and some F of `D` participate.
    pub fn in_x(&self, divisors: &[DivisorId]) -> bool {
        let has = |k: Klass| {
            divisors
                .iter()
                .any(|&d| self.divisor(d).klass == k && self.participates(d))
        };
        has(Klass::E) && has(Klass::F)
    }

    pub fn g_value(&self, divisors: &[DivisorId]) -> (u32, u32) {
        divisors
            .iter()
            .filter(|&&d| self.participates(d))
            .fold((0, 0), |(g1, g2), &d| {
                let rec = self.divisor(d);
                match rec.klass {
                    Klass::F => (g1 + rec.mult, g2),
                    Klass::E => (g1, g2 + rec.mult),
                }
            })
    }

    pub fn f_table(&self) -> FTable {
        let mut table = FTable::new();
        for s in self.alive_strata() {
            let g = self.g_value(&s.divisors);
            if g != (0, 0) {
                table
                    .entry(g)
                    .or_default()
                    .insert(self.support(&s.divisors));
            }
        }
        table
    }

    pub fn f_value(&self, id: StratumId) -> Result<FValue> {
        let s = self
            .strata
            .get(id as usize)
            .filter(|s| s.alive)
            .ok_or(Error::DeadStratum(id))?;
        let (g1, g2) = self.g_value(&s.divisors);
        if (g1, g2) == (0, 0) {
            return Ok(FValue::ZERO);
        }
        let ncomp = self.f_table().get(&(g1, g2)).map_or(0, |c| c.len()) as u32;
        Ok(FValue { g1, g2, ncomp })
    }

    fn alive_vec(&self) -> Vec<&Stratum> {
        self.alive_strata().collect()
    }

    /// Max f needs the component count of the top level of `g` only.
    pub fn max_f(&self) -> FValue {
        let alive = self.alive_vec();
        let g = par::map(&alive, |s| self.g_value(&s.divisors));
        let Some(&top) = g.iter().max() else {
            return FValue::ZERO;
        };
        if top == (0, 0) {
            return FValue::ZERO;
        }
        let comps: HashSet<Vec<DivisorId>> = alive
            .iter()
            .zip(&g)
            .filter(|(_, &gs)| gs == top)
            .map(|(s, _)| self.support(&s.divisors))
            .collect();
        FValue {
            g1: top.0,
            g2: top.1,
            ncomp: comps.len() as u32,
        }
    }

    /// Singular along `V(D)`: at least two participating F's and participating E-weight ≥ 2.
    pub fn is_singular(&self, divisors: &[DivisorId]) -> bool {
        let (g1, g2) = self.g_value(divisors);
        g1 >= 2 && g2 >= 2
    }

    /// Minimal alive singular strata (by inclusion of divisor sets), in id order.
    pub fn singular_locus(&self) -> Vec<StratumId> {
        let singular: Vec<&Stratum> = self
            .alive_strata()
            .filter(|s| self.is_singular(&s.divisors))
            .collect();
        singular
            .iter()
            .filter(|s| {
                !singular.iter().any(|t| {
                    t.divisors.len() < s.divisors.len() && is_subset(&t.divisors, &s.divisors)
                })
            })
            .map(|s| s.id)
            .collect()
    }

    /// Irreducible components of the singular locus: distinct participating supports of
    /// minimal singular strata.
    pub fn singular_components(&self) -> BTreeSet<Vec<DivisorId>> {
        let supports = self.singular_supports();
        supports
            .iter()
            .filter(|s| is_minimal(s, &supports))
            .cloned()
            .collect()
    }

    fn singular_supports(&self) -> HashSet<Vec<DivisorId>> {
        par::filter_map(&self.alive_vec(), |s| {
            self.is_singular(&s.divisors)
                .then(|| self.support(&s.divisors))
        })
        .into_iter()
        .collect()
    }

    pub fn select_center(&self) -> Result<(DivisorId, DivisorId)> {
        let max = self.max_f();
        if max.is_zero() {
            return Err(Error::AlreadyResolved);
        }
        let at_max = self
            .alive_strata()
            .filter(|s| self.g_value(&s.divisors) == (max.g1, max.g2));
        let stratum = match self.tie_break {
            TieBreak::LowestIds => at_max.min_by_key(|s| s.id),
            TieBreak::HighestIds => at_max.max_by_key(|s| s.id),
        }
        .expect("max f is attained on an alive stratum");
        let pick = |k: Klass| {
            let mut ids = stratum
                .divisors
                .iter()
                .copied()
                .filter(|&d| self.divisor(d).klass == k && self.participates(d));
            match self.tie_break {
                TieBreak::LowestIds => ids.next(),
                TieBreak::HighestIds => ids.next_back(),
            }
        };
        match (pick(Klass::E), pick(Klass::F)) {
            (Some(e), Some(f)) => Ok((e, f)),
            _ => Err(Error::InvalidCenter(format!(
                "stratum {} attains max f but has no E/F pair",
                stratum.id
            ))),
        }
    }

    /// Blows up `E ∩ F`, killing every stratum through both and spawning its three images.
    pub fn blow_up(&mut self, e: DivisorId, f: DivisorId) -> Result<&BlowupRecord> {
        let valid = |id: DivisorId, k: Klass| {
            (id as usize) < self.divisors.len()
                && self.divisor(id).klass == k
                && self.participates(id)
        };
        if !valid(e, Klass::E) || !valid(f, Klass::F) {
            return Err(Error::InvalidCenter(format!(
                "({e}, {f}) is not a participating E/F pair"
            )));
        }
        let killed: Vec<StratumId> = par::filter_map(&self.alive_vec(), |s| {
            (s.divisors.contains(&e) && s.divisors.contains(&f)).then_some(s.id)
        });
        if killed.is_empty() {
            return Err(Error::InvalidCenter(format!(
                "E{e} ∩ F{f} meets no alive stratum"
            )));
        }

        let supports = self.singular_supports();
        let in_center: Vec<&Vec<DivisorId>> = supports
            .iter()
            .filter(|c| c.contains(&e) && c.contains(&f) && is_minimal(c, &supports))
            .collect();
        let singular_in_center = in_center.len() as u32;
        let divisorial_singular_in_center =
            in_center.iter().filter(|c| c.len() == 3).count() as u32;

        self.step += 1;
        let center_mult = self.divisor(e).mult;
        let new_mult = match self.mutation {
            Some(Mutation::KeepExceptionalMult) => center_mult,
            _ => center_mult.saturating_sub(1),
        };
        let new_id = self.divisors.len() as DivisorId;
        self.divisors.push(DivisorRec {
            id: new_id,
            klass: Klass::E,
            mult: new_mult,
            origin: Origin::Exceptional { step: self.step },
        });
        // codim 2, and X has order min(mult E, mult F) = 1 along the center
        let order = center_mult.min(self.divisor(f).mult) as i64;
        let discrepancy_delta = 2 - order - 1;
        self.discrepancy += discrepancy_delta;

        let mut spawned_sets: BTreeSet<Vec<DivisorId>> = BTreeSet::new();
        for &id in &killed {
            let s = &mut self.strata[id as usize];
            s.alive = false;
            self.alive.remove(&s.divisors);
            self.alive_ids.remove(&id);
            let rest: Vec<DivisorId> = s
                .divisors
                .iter()
                .copied()
                .filter(|&d| d != e && d != f)
                .collect();
            let mut candidates = vec![vec![new_id], vec![new_id, e]];
            if self.mutation != Some(Mutation::SkipChartASpawn) {
                candidates.push(vec![new_id, f]);
            }
            if self.mutation == Some(Mutation::SpawnCenterPair) {
                candidates.push(vec![new_id, e, f]);
            }
            for extra in candidates {
                let mut set: Vec<DivisorId> = rest.iter().copied().chain(extra).collect();
                set.sort_unstable();
                if self.in_x(&set) {
                    spawned_sets.insert(set);
                }
            }
        }
        let mut spawned = Vec::with_capacity(spawned_sets.len());
        for set in spawned_sets {
            if let Some(existing) = self.find_alive(&set) {
                return Err(Error::InvalidCenter(format!(
                    "spawned stratum {set:?} already exists as {existing}"
                )));
            }
            spawned.push(self.push_stratum(set));
        }
        self.history.push(BlowupRecord {
            step: self.step,
            center: (e, f),
            center_mult,
            new_divisor: new_id,
            new_mult,
            killed,
            spawned,
            discrepancy_delta,
            divisorial_singular_in_center,
            singular_in_center,
        });
        Ok(self.history.last().expect("just pushed"))
    }

    pub fn is_resolved(&self) -> bool {
        self.max_f().is_zero()
    }

    pub fn divisor_label(&self, id: DivisorId) -> String {
        self.divisor(id).label()
    }

    /// The alive strata and their covering relations, as a DOT digraph.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph step_{} {{\n  rankdir=BT;\n", self.step);
        let alive: Vec<&Stratum> = self.alive_strata().collect();
        for s in &alive {
            let names = s.divisors.iter().map(|&d| self.divisor_label(d)).join(",");
            let shape = if self.is_singular(&s.divisors) {
                "box"
            } else {
                "ellipse"
            };
            let f = self.g_value(&s.divisors);
            out.push_str(&format!(
                "  s{} [label=\"{{{}}}\\ng=({},{})\" shape={}];\n",
                s.id, names, f.0, f.1, shape
            ));
        }
        for s in &alive {
            for t in &alive {
                if t.divisors.len() == s.divisors.len() + 1 && is_subset(&s.divisors, &t.divisors) {
                    out.push_str(&format!("  s{} -> s{};\n", t.id, s.id));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn max_of(table: &FTable) -> FValue {
    table
        .iter()
        .map(|(&(g1, g2), comps)| FValue {
            g1,
            g2,
            ncomp: comps.len() as u32,
        })
        .max()
        .unwrap_or(FValue::ZERO)
}

/// No proper subset of `s` is in `all`.
fn is_minimal(s: &[DivisorId], all: &HashSet<Vec<DivisorId>>) -> bool {
    let k = s.len();
    (0u32..(1 << k) - 1).all(|mask| {
        let sub: Vec<DivisorId> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| s[i])
            .collect();
        !all.contains(&sub)
    })
}

/// `a ⊆ b` for sorted slices.
pub fn is_subset(a: &[DivisorId], b: &[DivisorId]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_counts() {
        let s = init_cyclic_cover(3, 6, 3).unwrap();
        assert_eq!(s.divisors.len(), 7);
        assert_eq!(s.alive_count(), 41);
        assert_eq!(s.ambient_dim, 4);
        assert!(s.alive_strata().all(|t| t.dim == 4 - t.divisors.len()));
        let s5 = init_cyclic_cover(5, 8, 4).unwrap();
        assert_eq!(s5.divisors.len(), 9);
        assert_eq!(s5.alive_count(), 218);
        assert!(matches!(
            init_cyclic_cover(3, 6, 2),
            Err(Error::InvalidTuple { .. })
        ));
        assert!(matches!(
            init_cyclic_cover(3, 7, 3),
            Err(Error::InvalidTuple { .. })
        ));
    }

    #[test]
    fn initial_f_values() {
        let s = init_cyclic_cover(3, 6, 3).unwrap();
        let pair = s.find_alive(&[0, 1]).unwrap();
        assert_eq!(
            s.f_value(pair).unwrap(),
            FValue {
                g1: 1,
                g2: 3,
                ncomp: 6
            }
        );
        let triple = s.find_alive(&[0, 1, 2, 3]).unwrap();
        assert_eq!(
            s.f_value(triple).unwrap(),
            FValue {
                g1: 3,
                g2: 3,
                ncomp: 20
            }
        );
        assert_eq!(
            s.max_f(),
            FValue {
                g1: 3,
                g2: 3,
                ncomp: 20
            }
        );
        assert_eq!(s.select_center().unwrap(), (0, 1));
    }

    #[test]
    fn initial_singular_locus() {
        let s = init_cyclic_cover(3, 6, 3).unwrap();
        let sing = s.singular_locus();
        assert_eq!(sing.len(), 15);
        assert!(sing.iter().all(|&id| s.stratum(id).divisors.len() == 3));
    }

    #[test]
    fn first_blow_up() {
        let mut s = init_cyclic_cover(3, 6, 3).unwrap();
        let rec = s.blow_up(0, 1).unwrap().clone();
        assert_eq!(rec.new_mult, 2);
        assert_eq!(rec.discrepancy_delta, 0);
        // {E0,F1}, 5 × {E0,F1,Fj}, 10 × {E0,F1,Fj,Fk}
        assert_eq!(rec.killed.len(), 16);
        let x = rec.new_divisor;
        assert!(s.find_alive(&[0, 1]).is_none());
        assert!(s.find_alive(&[1, x]).is_some());
        assert!(s.find_alive(&[0, 2, x]).is_some());
        assert!(s.find_alive(&[1, 2, x]).is_some());
        assert!(s.find_alive(&[0, 1, x]).is_none());
        assert!(s
            .alive_strata()
            .all(|t| !(t.divisors.contains(&0) && t.divisors.contains(&1))));
        assert_eq!(s.discrepancy, 0);
        assert!(matches!(
            s.f_value(rec.killed[0]),
            Err(Error::DeadStratum(_))
        ));
    }

    #[test]
    fn unit_multiplicity_center() {
        let mut s = init_cyclic_cover(2, 6, 2).unwrap();
        let x1 = s.blow_up(0, 1).unwrap().new_divisor;
        assert_eq!(s.divisor(x1).mult, 1);
        let x2 = s.blow_up(x1, 2).unwrap().new_divisor;
        assert_eq!(s.divisor(x2).mult, 0);
        assert!(!s.participates(x2));
        // strata through the exceptional divisor survive only via another participating E
        assert!(s
            .alive_strata()
            .filter(|t| t.divisors.contains(&x2))
            .all(|t| s
                .support(&t.divisors)
                .iter()
                .any(|&d| s.divisor(d).klass == Klass::E)));
        assert!(matches!(s.blow_up(x2, 3), Err(Error::InvalidCenter(_))));
    }

    #[test]
    fn subset_helper() {
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_subset(&[], &[1]));
    }
}
