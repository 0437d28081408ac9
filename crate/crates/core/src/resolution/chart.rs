//! Local-chart oracle.
//!
//! Each chart is an affine coordinate system in which `X` reads `∏ v^α − ∏ v^β = 0`, with every
//! coordinate hyperplane tagged by the divisor it cuts out. A blow-up of `E ∩ F` replaces every
//! chart carrying both coordinates by the two standard charts
//!
//! - A: `x_F = y_E · x'`, where `y_E` now cuts out the exceptional divisor and `x'` the strict
//!   transform of `F`;
//! - B: `y_E = x_F · y'`, where `x_F` now cuts out the exceptional divisor and `y'` the strict
//!   transform of `E`;
//!
//! followed by division by the largest power of the exceptional coordinate. Containment in `X`,
//! participation and singularity of a coordinate stratum are decided by evaluating the equation
//! and its partial derivatives at a point where the stratum's coordinates vanish and the others
//! are distinct primes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use super::state::{BinomialState, DivisorId, Klass};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

const PRIMES: [i64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A coordinate of a chart: the divisor it cuts out and its exponents in the two monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChartVar {
    pub tag: DivisorId,
    pub alpha: u32,
    pub beta: u32,
}

/// Coordinates sorted by tag. Two charts with equal coordinates evolve identically, so the
/// complex stores them once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Chart {
    pub vars: Vec<ChartVar>,
}

/// What a chart says about one of its coordinate strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceInfo {
    pub tags: Vec<DivisorId>,
    pub in_x: bool,
    pub participating: Vec<DivisorId>,
    pub singular: bool,
}

impl Chart {
    fn position(&self, tag: DivisorId) -> Option<usize> {
        self.vars.iter().position(|v| v.tag == tag)
    }

    /// Has a coordinate stratum inside `X` now or after further blow-ups.
    fn is_relevant(&self) -> bool {
        self.vars.iter().any(|v| v.alpha > 0) && self.vars.iter().any(|v| v.beta > 0)
    }

    fn sorted(mut self) -> Chart {
        self.vars.sort();
        self
    }

    /// The two standard charts of the blow-up of `{v_e = v_f = 0}`.
    fn blow_up(&self, e: DivisorId, f: DivisorId, new_tag: DivisorId) -> Option<[Chart; 2]> {
        let ie = self.position(e)?;
        let jf = self.position(f)?;
        let substitute =
            |keep: usize, absorb: usize, exceptional_at: usize, strict_tag: DivisorId| {
                // v_absorb = v_keep · v', so v_keep picks up the exponents of v_absorb
                let mut vars = self.vars.clone();
                let (a, b) = (vars[absorb].alpha, vars[absorb].beta);
                vars[keep].alpha += a;
                vars[keep].beta += b;
                let d = vars[keep].alpha.min(vars[keep].beta);
                vars[keep].alpha -= d;
                vars[keep].beta -= d;
                vars[exceptional_at].tag = new_tag;
                vars[absorb].tag = strict_tag;
                Chart { vars }.sorted()
            };
        // chart A: x_F = y_E x'; y_E becomes exceptional, x' keeps F
        let a = substitute(ie, jf, ie, f);
        // chart B: y_E = x_F y'; x_F becomes exceptional, y' keeps E
        let b = substitute(jf, ie, jf, e);
        Some([a, b])
    }

    /// Verdicts for every nonempty coordinate stratum, indexed by bitmask over coordinates.
    fn evaluate(&self) -> Vec<FaceVerdict> {
        let k = self.vars.len();
        assert!(
            k <= PRIMES.len(),
            "chart with {k} coordinates exceeds the prime table"
        );
        let alpha: Vec<u32> = self.vars.iter().map(|v| v.alpha).collect();
        let beta: Vec<u32> = self.vars.iter().map(|v| v.beta).collect();
        (1u32..1 << k)
            .map(|mask| {
                let point: Vec<i64> = (0..k)
                    .map(|i| if mask >> i & 1 == 1 { 0 } else { PRIMES[i] })
                    .collect();
                let in_x = eval_binomial(&alpha, &beta, &point, None);
                let singular =
                    in_x && (0..k).all(|i| eval_binomial(&alpha, &beta, &point, Some(i)));
                FaceVerdict {
                    mask,
                    in_x,
                    singular,
                }
            })
            .collect()
    }

    fn tags_of(&self, mask: u32) -> Vec<DivisorId> {
        (0..self.vars.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.vars[i].tag)
            .collect()
    }

    fn info(&self, v: &FaceVerdict) -> FaceInfo {
        let idx = (0..self.vars.len()).filter(|i| v.mask >> i & 1 == 1);
        FaceInfo {
            tags: self.tags_of(v.mask),
            in_x: v.in_x,
            participating: idx
                .filter(|&i| self.vars[i].alpha + self.vars[i].beta > 0)
                .map(|i| self.vars[i].tag)
                .collect(),
            singular: v.singular,
        }
    }

    /// Every nonempty coordinate stratum of the chart, with its verdicts.
    pub fn faces(&self) -> Vec<FaceInfo> {
        self.evaluate().iter().map(|v| self.info(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct FaceVerdict {
    mask: u32,
    in_x: bool,
    singular: bool,
}

/// `x^e` (or `∂_i x^e` when `d = Some(i)`) at an integer point; `None` on `i128` overflow.
fn monomial_i128(exps: &[u32], point: &[i64], d: Option<usize>) -> Option<i128> {
    let mut acc: i128 = 1;
    for (j, (&k, &x)) in exps.iter().zip(point).enumerate() {
        let k = if d == Some(j) {
            if k == 0 {
                return Some(0);
            }
            acc = acc.checked_mul(k as i128)?;
            k - 1
        } else {
            k
        };
        acc = acc.checked_mul((x as i128).checked_pow(k)?)?;
    }
    Some(acc)
}

fn monomial_big(exps: &[u32], point: &[i64], d: Option<usize>) -> BigInt {
    let mut acc = BigInt::one();
    for (j, (&k, &x)) in exps.iter().zip(point).enumerate() {
        let k = if d == Some(j) {
            if k == 0 {
                return BigInt::zero();
            }
            acc *= k;
            k - 1
        } else {
            k
        };
        acc *= BigInt::from(x).pow(k);
    }
    acc
}

/// Whether `G = x^α − x^β` (or its `i`-th partial) vanishes at `point`, in exact arithmetic.
fn eval_binomial(alpha: &[u32], beta: &[u32], point: &[i64], d: Option<usize>) -> bool {
    match (
        monomial_i128(alpha, point, d),
        monomial_i128(beta, point, d),
    ) {
        (Some(a), Some(b)) => a == b,
        _ => monomial_big(alpha, point, d) == monomial_big(beta, point, d),
    }
}

/// All charts of the current model, with the number of charts covering each coordinate stratum
/// contained in `X`.
#[derive(Clone, Debug, Default)]
pub struct ChartComplex {
    /// Each chart with the verdicts of its coordinate strata inside `X`.
    charts: BTreeMap<Chart, Vec<FaceVerdict>>,
    pub center_history: Vec<(DivisorId, DivisorId, DivisorId)>,
    coverage: HashMap<Vec<DivisorId>, u32>,
    /// Charts created since the last comparison.
    fresh: Vec<Chart>,
}

impl ChartComplex {
    /// One chart per point `E_0 ∩ F_S`, `|S| = n`, where `X` reads `y^r − ∏_{j∈S} x_j`.
    pub fn initial(state: &BinomialState) -> ChartComplex {
        let mut cx = ChartComplex::default();
        let e0 = state
            .divisors
            .iter()
            .find(|d| d.klass == Klass::E)
            .expect("one E divisor");
        let fs: Vec<DivisorId> = state
            .divisors
            .iter()
            .filter(|d| d.klass == Klass::F)
            .map(|d| d.id)
            .collect();
        for s in fs.into_iter().combinations(state.n) {
            let mut vars = vec![ChartVar {
                tag: e0.id,
                alpha: e0.mult,
                beta: 0,
            }];
            vars.extend(s.into_iter().map(|tag| ChartVar {
                tag,
                alpha: 0,
                beta: 1,
            }));
            cx.insert(Chart { vars }.sorted());
        }
        cx
    }

    pub fn charts(&self) -> impl Iterator<Item = &Chart> {
        self.charts.keys()
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    fn insert(&mut self, chart: Chart) {
        if !chart.is_relevant() || self.charts.contains_key(&chart) {
            return;
        }
        let verdicts: Vec<FaceVerdict> = chart.evaluate().into_iter().filter(|v| v.in_x).collect();
        for v in &verdicts {
            *self.coverage.entry(chart.tags_of(v.mask)).or_default() += 1;
        }
        self.fresh.push(chart.clone());
        self.charts.insert(chart, verdicts);
    }

    fn remove(&mut self, chart: &Chart) {
        let Some(verdicts) = self.charts.remove(chart) else {
            return;
        };
        for v in verdicts {
            let face = chart.tags_of(v.mask);
            if let Some(c) = self.coverage.get_mut(&face) {
                *c -= 1;
                if *c == 0 {
                    self.coverage.remove(&face);
                }
            }
        }
    }

    pub fn blow_up(&mut self, e: DivisorId, f: DivisorId, new_tag: DivisorId) {
        let hit: Vec<Chart> = self
            .charts
            .keys()
            .filter(|c| c.position(e).is_some() && c.position(f).is_some())
            .cloned()
            .collect();
        for chart in &hit {
            self.remove(chart);
        }
        for chart in &hit {
            if let Some([a, b]) = chart.blow_up(e, f, new_tag) {
                self.insert(a);
                self.insert(b);
            }
        }
        self.center_history.push((e, f, new_tag));
    }

    /// Coordinate strata inside `X`, over all charts.
    pub fn strata_in_x(&self) -> BTreeSet<Vec<DivisorId>> {
        self.coverage.keys().cloned().collect()
    }

    /// Compares the global model with the charts: the strata inside `X`, and for every chart
    /// created since the last call the multiplicities of its coordinates and the participation
    /// and singularity of its strata.
    pub fn compare(&mut self, state: &BinomialState) -> Result<()> {
        let mismatch = |detail: String| Error::OracleMismatch {
            step: state.step,
            detail,
        };
        let label = |set: &[DivisorId]| set.iter().map(|&d| state.divisor_label(d)).join(",");
        if let Some(extra) = state
            .alive_strata()
            .find(|s| !self.coverage.contains_key(&s.divisors))
        {
            return Err(mismatch(format!(
                "model stratum {{{}}} is not a stratum of X in any chart",
                label(&extra.divisors)
            )));
        }
        if self.coverage.len() != state.alive_count() {
            let missing = self
                .strata_in_x()
                .into_iter()
                .find(|face| state.find_alive(face).is_none())
                .unwrap_or_default();
            return Err(mismatch(format!(
                "chart stratum {{{}}} lies in X but is missing from the model",
                label(&missing)
            )));
        }
        for chart in std::mem::take(&mut self.fresh) {
            let Some(verdicts) = self.charts.get(&chart) else {
                continue;
            };
            for v in &chart.vars {
                let d = state.divisors.get(v.tag as usize).ok_or_else(|| {
                    mismatch(format!(
                        "chart coordinate tagged with unknown divisor {}",
                        v.tag
                    ))
                })?;
                let (own, other) = match d.klass {
                    Klass::E => (v.alpha, v.beta),
                    Klass::F => (v.beta, v.alpha),
                };
                if own != d.mult || other != 0 {
                    return Err(mismatch(format!(
                        "{} has multiplicity {} in the model but exponents (α={}, β={}) in a chart",
                        d.label(),
                        d.mult,
                        v.alpha,
                        v.beta
                    )));
                }
            }
            for face in verdicts.iter().map(|v| chart.info(v)) {
                let support = state.support(&face.tags);
                if support != face.participating {
                    return Err(mismatch(format!(
                        "participation at {{{}}}: model {{{}}}, chart {{{}}}",
                        label(&face.tags),
                        label(&support),
                        label(&face.participating)
                    )));
                }
                if state.is_singular(&face.tags) != face.singular {
                    return Err(mismatch(format!(
                        "singularity at {{{}}}: model {}, chart {}",
                        label(&face.tags),
                        state.is_singular(&face.tags),
                        face.singular
                    )));
                }
            }
        }
        Ok(())
    }

    /// How many charts cover each coordinate stratum inside `X`.
    pub fn coverage(&self) -> BTreeMap<Vec<DivisorId>, u32> {
        self.coverage.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::state::init_cyclic_cover;

    fn var(tag: DivisorId, alpha: u32, beta: u32) -> ChartVar {
        ChartVar { tag, alpha, beta }
    }

    #[test]
    fn normal_form_faces() {
        // y^3 − x1 x2 x3
        let c = Chart {
            vars: vec![var(0, 3, 0), var(1, 0, 1), var(2, 0, 1), var(3, 0, 1)],
        };
        let faces = c.faces();
        let get = |tags: &[DivisorId]| faces.iter().find(|f| f.tags == tags).unwrap().clone();
        assert!(get(&[0, 1]).in_x);
        assert!(!get(&[0, 1]).singular);
        assert!(get(&[0, 1, 2]).singular);
        assert!(!get(&[1, 2]).in_x);
        assert!(!get(&[0]).in_x);
        assert_eq!(get(&[0, 1, 2]).participating, vec![0, 1, 2]);
    }

    #[test]
    fn chart_substitution() {
        // y^3 − x1 x2: blow up (y, x1), exceptional tag 9
        let c = Chart {
            vars: vec![var(0, 3, 0), var(1, 0, 1), var(2, 0, 1)],
        };
        let [a, b] = c.blow_up(0, 1, 9).unwrap();
        // A: y^3 − y x' x2 → y^2 − x' x2 with y tagged 9, x' tagged F1
        assert_eq!(a.vars, vec![var(1, 0, 1), var(2, 0, 1), var(9, 2, 0)]);
        // B: (x y')^3 − x x2 → x^2 y'^3 − x2 with x tagged 9, y' tagged E0
        assert_eq!(b.vars, vec![var(0, 3, 0), var(2, 0, 1), var(9, 2, 0)]);
        assert!(c.blow_up(0, 5, 9).is_none());
    }

    #[test]
    fn initial_agreement() {
        let s = init_cyclic_cover(3, 6, 3).unwrap();
        let mut cx = ChartComplex::initial(&s);
        assert_eq!(cx.chart_count(), 20);
        assert_eq!(cx.strata_in_x().len(), 41);
        cx.compare(&s).unwrap();
        // every edge stratum {E0, Fj} lies in C(5,2) charts
        assert_eq!(cx.coverage()[&vec![0, 1]], 10);
    }

    #[test]
    fn first_step_agreement() {
        let mut s = init_cyclic_cover(3, 6, 3).unwrap();
        let mut cx = ChartComplex::initial(&s);
        cx.compare(&s).unwrap();
        let new = s.blow_up(0, 1).unwrap().new_divisor;
        cx.blow_up(0, 1, new);
        cx.compare(&s).unwrap();
    }
}
