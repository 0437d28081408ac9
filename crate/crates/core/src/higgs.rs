//! Graded Higgs skeleton of the middle cohomology and the length of the Yukawa coupling.
//!
//! Only ranks and qualitative labels of the Higgs field blocks are modeled. The bundle splits as a
//! direct sum of eigen-summands and the Higgs field never maps one summand into another.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hodge::{binomial, cover_degree, HodgeRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockLabel {
    Zero,
    Iso,
    Injective,
    Surjective,
    NonzeroUnknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub hodge_p: usize,
    pub rank: u64,
}

/// A block `E^{p} → E^{p−1}` inside one summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockMap {
    pub from_p: usize,
    pub to_p: usize,
    pub label: BlockLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HiggsSummand {
    pub eigen_index: usize,
    pub pieces: Vec<Piece>,
    pub maps: Vec<BlockMap>,
}

impl HiggsSummand {
    pub fn rank_at(&self, p: usize) -> u64 {
        self.pieces
            .iter()
            .filter(|x| x.hodge_p == p)
            .map(|x| x.rank)
            .sum()
    }

    pub fn label_from(&self, p: usize) -> BlockLabel {
        self.maps
            .iter()
            .find(|b| b.from_p == p)
            .map_or(BlockLabel::Zero, |b| b.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedHiggs {
    pub n: usize,
    pub dim_base: usize,
    pub summands: Vec<HiggsSummand>,
    /// Statements imported without verification.
    pub assumptions: Vec<String>,
}

pub const TOP_EIGEN_ISO_ASSUMPTION: &str =
    "the Higgs field of the top eigen-summand F_{r-1} is an isomorphism (imported, not verified)";

impl GradedHiggs {
    /// Checks that every block lowers the Hodge degree by one and joins pieces of positive rank.
    pub fn new(n: usize, dim_base: usize, summands: Vec<HiggsSummand>) -> Result<Self> {
        for s in &summands {
            if let Some(p) = s.pieces.iter().find(|x| x.hodge_p > n || x.rank == 0) {
                return Err(Error::ShapeMismatch(format!(
                    "summand {}: piece {:?} out of range",
                    s.eigen_index, p
                )));
            }
            for b in &s.maps {
                if b.from_p == 0 || b.to_p + 1 != b.from_p {
                    return Err(Error::ShapeMismatch(format!(
                        "summand {}: block {}->{} does not lower degree by one",
                        s.eigen_index, b.from_p, b.to_p
                    )));
                }
                if s.rank_at(b.from_p) == 0 || s.rank_at(b.to_p) == 0 {
                    return Err(Error::ShapeMismatch(format!(
                        "summand {}: block {}->{} touches an empty piece",
                        s.eigen_index, b.from_p, b.to_p
                    )));
                }
            }
        }
        Ok(GradedHiggs {
            n,
            dim_base,
            summands,
            assumptions: Vec::new(),
        })
    }

    pub fn rank_at(&self, p: usize) -> u64 {
        self.summands.iter().map(|s| s.rank_at(p)).sum()
    }

    /// The block of `θ` from summand `from.0` in degree `from.1` to summand `to.0` in degree
    /// `to.1`. Blocks between different summands are zero.
    pub fn block(&self, from: (usize, usize), to: (usize, usize)) -> BlockLabel {
        if from.0 != to.0 || to.1 + 1 != from.1 {
            return BlockLabel::Zero;
        }
        self.summands[from.0].label_from(from.1)
    }

    /// The unique top-to-next block, if exactly one summand carries `E^{n,0}`.
    fn top_label(&self) -> Option<BlockLabel> {
        let mut tops = self.summands.iter().filter(|s| s.rank_at(self.n) > 0);
        let top = tops.next()?;
        tops.next().is_none().then(|| top.label_from(self.n))
    }
}

/// Pieces `(p, C(rank_10, p) · C(rank_01, n − p))` of `∧^n` of a two-step bundle, highest `p`
/// first, omitting rank zero.
pub fn wedge_ranks(rank_10: usize, rank_01: usize, n: usize) -> Result<Vec<Piece>> {
    if rank_10 + rank_01 != n + 1 {
        return Err(Error::ShapeMismatch(format!(
            "ranks {rank_10} + {rank_01} != n + 1 = {}",
            n + 1
        )));
    }
    Ok((0..=n)
        .rev()
        .map(|p| Piece {
            hodge_p: p,
            rank: binomial(rank_10 as u64, p as u64) * binomial(rank_01 as u64, (n - p) as u64),
        })
        .filter(|x| x.rank > 0)
        .collect())
}

/// The eigen-decomposition of the middle-degree Higgs bundle over the `n`-dimensional moduli
/// space: summand `i` is `∧^n` of a bundle with ranks `(2i − 1, n + 2 − 2i)`.
pub fn build_eigen_higgs(n: usize) -> Result<GradedHiggs> {
    let r = cover_degree(n)?;
    let mut summands = Vec::with_capacity(r - 1);
    for i in 1..r {
        let pieces = wedge_ranks(2 * i - 1, n + 2 - 2 * i, n)?;
        let label = if i == r - 1 {
            BlockLabel::Iso
        } else {
            BlockLabel::NonzeroUnknown
        };
        let maps = pieces
            .windows(2)
            .map(|w| BlockMap {
                from_p: w[0].hodge_p,
                to_p: w[1].hodge_p,
                label,
            })
            .collect();
        summands.push(HiggsSummand {
            eigen_index: i,
            pieces,
            maps,
        });
    }
    let mut h = GradedHiggs::new(n, n, summands)?;
    h.assumptions.push(TOP_EIGEN_ISO_ASSUMPTION.to_string());
    Ok(h)
}

/// What is known about a composite of blocks starting from a nonzero piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chain {
    Zero,
    Iso,
    Injective,
    Surjective,
    /// Known nonzero without further structure.
    Nonzero,
    Unknown,
}

impl Chain {
    fn then(self, label: BlockLabel) -> Chain {
        use BlockLabel as L;
        match (self, label) {
            (Chain::Zero, _) | (_, L::Zero) => Chain::Zero,
            (Chain::Unknown, _) | (_, L::NonzeroUnknown) => Chain::Unknown,
            (Chain::Iso, L::Iso) => Chain::Iso,
            (Chain::Iso | Chain::Injective, L::Iso | L::Injective) => Chain::Injective,
            (Chain::Iso | Chain::Surjective, L::Iso | L::Surjective) => Chain::Surjective,
            // a surjection onto a nonzero space followed by an injection stays nonzero
            (Chain::Surjective | Chain::Nonzero, L::Injective | L::Iso) => Chain::Nonzero,
            // an injection can land inside the kernel of the next surjection
            (Chain::Injective | Chain::Nonzero, L::Surjective) => Chain::Unknown,
        }
    }

    fn is_known_nonzero(self) -> bool {
        !matches!(self, Chain::Zero | Chain::Unknown)
    }
}

/// `ς = min{i ≥ 1 : θ^i = 0} − 1` for the iterated Higgs field starting at `E^{n,0}`.
///
/// A block labeled `nonzero_unknown` on a chain that is not cut by a zero block makes the verdict
/// [`Error::Indeterminate`].
pub fn yukawa_length(h: &GradedHiggs) -> Result<usize> {
    let n = h.n;
    if h.rank_at(n) == 0 {
        return Err(Error::ShapeMismatch("no (n,0) piece".into()));
    }
    let mut chains: Vec<(usize, Chain)> = h
        .summands
        .iter()
        .enumerate()
        .filter(|(_, s)| s.rank_at(n) > 0)
        .map(|(k, _)| (k, Chain::Iso))
        .collect();
    for step in 1..=n {
        let p = n + 1 - step;
        let mut first_unknown = None;
        for (k, chain) in chains.iter_mut() {
            let label = h.summands[*k].label_from(p);
            *chain = chain.then(label);
            if *chain == Chain::Unknown && first_unknown.is_none() {
                let s = &h.summands[*k];
                let bad = (s.maps.iter())
                    .filter(|b| b.from_p > p - 1 && b.from_p <= n)
                    .find(|b| b.label == BlockLabel::NonzeroUnknown)
                    .copied()
                    .unwrap_or(BlockMap {
                        from_p: p,
                        to_p: p - 1,
                        label,
                    });
                first_unknown = Some((s.eigen_index, bad));
            }
        }
        if chains.iter().any(|(_, c)| c.is_known_nonzero()) {
            continue;
        }
        if let Some((summand, bad)) = first_unknown {
            return Err(Error::Indeterminate {
                summand: summand as u32,
                from_p: bad.from_p as u32,
                to_p: bad.to_p as u32,
            });
        }
        return Ok(step - 1);
    }
    Ok(n)
}

/// `E^{n,0}` has rank one, `E^{n−1,1}` has rank `dim_base`, and the block between them is an
/// isomorphism.
pub fn check_maximality(h: &GradedHiggs) -> bool {
    h.n >= 1
        && h.rank_at(h.n) == 1
        && h.rank_at(h.n - 1) == h.dim_base as u64
        && h.top_label() == Some(BlockLabel::Iso)
}

pub fn hodge_from_higgs(h: &GradedHiggs) -> HodgeRow {
    let mut by_p: BTreeMap<usize, u64> = BTreeMap::new();
    for s in &h.summands {
        for piece in &s.pieces {
            *by_p.entry(piece.hodge_p).or_default() += piece.rank;
        }
    }
    HodgeRow {
        n: h.n,
        values: (0..=h.n)
            .rev()
            .map(|p| by_p.get(&p).copied().unwrap_or(0))
            .collect(),
    }
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BlockLabel::Zero => "zero",
            BlockLabel::Iso => "iso",
            BlockLabel::Injective => "injective",
            BlockLabel::Surjective => "surjective",
            BlockLabel::NonzeroUnknown => "nonzero_unknown",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge::hodge_middle;
    use crate::linalg::RationalMatrix;
    use crate::sample::Sampler;

    fn chain_of(ranks: &[u64], labels: &[BlockLabel]) -> GradedHiggs {
        let n = ranks.len() - 1;
        let pieces = ranks
            .iter()
            .enumerate()
            .map(|(q, &rank)| Piece {
                hodge_p: n - q,
                rank,
            })
            .collect();
        let maps = labels
            .iter()
            .enumerate()
            .map(|(q, &label)| BlockMap {
                from_p: n - q,
                to_p: n - q - 1,
                label,
            })
            .collect();
        GradedHiggs::new(
            n,
            ranks[1] as usize,
            vec![HiggsSummand {
                eigen_index: 1,
                pieces,
                maps,
            }],
        )
        .unwrap()
    }

    #[test]
    fn wedge_examples() {
        let w = |a, b, n| -> Vec<(usize, u64)> {
            wedge_ranks(a, b, n)
                .unwrap()
                .into_iter()
                .map(|x| (x.hodge_p, x.rank))
                .collect()
        };
        assert_eq!(w(5, 1, 5), vec![(5, 1), (4, 5)]);
        assert_eq!(w(1, 7, 7), vec![(1, 7), (0, 1)]);
        assert_eq!(w(3, 3, 5), vec![(3, 3), (2, 3)]);
        assert!(wedge_ranks(3, 3, 3).is_err());
    }

    #[test]
    fn n3_skeleton() {
        let h = build_eigen_higgs(3).unwrap();
        assert_eq!(h.summands.len(), 2);
        let pieces = |i: usize| -> Vec<(usize, u64)> {
            let mut v: Vec<_> = h.summands[i]
                .pieces
                .iter()
                .map(|x| (x.hodge_p, x.rank))
                .collect();
            v.sort();
            v
        };
        assert_eq!(pieces(0), vec![(0, 1), (1, 3)]);
        assert_eq!(pieces(1), vec![(2, 3), (3, 1)]);
        assert_eq!(hodge_from_higgs(&h).values, vec![1, 3, 3, 1]);
        assert_eq!(yukawa_length(&h).unwrap(), 1);
        assert!(check_maximality(&h));
        assert_eq!(h.assumptions.len(), 1);
    }

    #[test]
    fn family_range() {
        for n in (3..=21).step_by(2) {
            let h = build_eigen_higgs(n).unwrap();
            assert_eq!(h.summands.len(), (n + 3) / 2 - 1);
            assert_eq!(hodge_from_higgs(&h), hodge_middle(n).unwrap());
            assert_eq!(yukawa_length(&h).unwrap(), 1);
            assert!(check_maximality(&h));
            assert_eq!(h.rank_at(n - 1), n as u64);
        }
        assert_eq!(build_eigen_higgs(6), Err(Error::InvalidN(6)));
    }

    #[test]
    fn cross_summand_blocks_are_zero() {
        let h = build_eigen_higgs(5).unwrap();
        for (a, sa) in h.summands.iter().enumerate() {
            for (b, sb) in h.summands.iter().enumerate() {
                for pa in &sa.pieces {
                    for pb in &sb.pieces {
                        if a != b {
                            assert_eq!(h.block((a, pa.hodge_p), (b, pb.hodge_p)), BlockLabel::Zero);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hand_built_chains() {
        use BlockLabel::*;
        assert_eq!(
            yukawa_length(&chain_of(&[1, 3, 3, 1], &[Iso, Iso, Iso])).unwrap(),
            3
        );
        assert_eq!(
            yukawa_length(&chain_of(&[1, 3, 3, 1], &[Zero, Zero, Zero])).unwrap(),
            0
        );
        assert_eq!(
            yukawa_length(&chain_of(&[1, 3, 3, 1], &[Injective, Zero, Iso])).unwrap(),
            1
        );
        let err = yukawa_length(&chain_of(&[1, 3, 3, 1], &[Iso, NonzeroUnknown, Iso])).unwrap_err();
        assert_eq!(
            err,
            Error::Indeterminate {
                summand: 1,
                from_p: 2,
                to_p: 1
            }
        );
        // the unknown block is cut off by an earlier zero
        assert_eq!(
            yukawa_length(&chain_of(&[1, 3, 3, 1], &[Zero, NonzeroUnknown, Iso])).unwrap(),
            0
        );
        let wrong_base = chain_of(&[1, 2, 2, 1], &[Iso, Iso, Iso]);
        let mut h = wrong_base.clone();
        h.dim_base = 3;
        assert!(!check_maximality(&h));
        assert!(check_maximality(&wrong_base));
    }

    #[test]
    fn rejects_malformed() {
        let bad = HiggsSummand {
            eigen_index: 1,
            pieces: vec![
                Piece {
                    hodge_p: 1,
                    rank: 1,
                },
                Piece {
                    hodge_p: 0,
                    rank: 1,
                },
            ],
            maps: vec![BlockMap {
                from_p: 1,
                to_p: 1,
                label: BlockLabel::Iso,
            }],
        };
        assert!(GradedHiggs::new(1, 1, vec![bad]).is_err());
    }

    fn label_of(m: &RationalMatrix) -> BlockLabel {
        let rank = m.rank();
        if rank == 0 {
            BlockLabel::Zero
        } else if rank == m.rows() && rank == m.cols() {
            BlockLabel::Iso
        } else if rank == m.cols() {
            BlockLabel::Injective
        } else if rank == m.rows() {
            BlockLabel::Surjective
        } else {
            BlockLabel::NonzeroUnknown
        }
    }

    #[test]
    fn label_semantics_are_sound() {
        let mut sampler = Sampler::new(21);
        for _ in 0..300 {
            let n = sampler.int(1, 4) as usize;
            let dims: Vec<usize> = (0..=n).map(|_| sampler.int(1, 3) as usize).collect();
            let mut dims = dims;
            dims[0] = 1;
            let mats: Vec<RationalMatrix> = (0..n)
                .map(|k| {
                    let mut m = sampler.int_matrix(dims[k + 1], dims[k]);
                    // sparse low-rank blocks make zero products reachable
                    if sampler.coin() {
                        let keep = sampler.int(0, dims[k].min(dims[k + 1]) as i64) as usize;
                        for i in 0..m.rows() {
                            for j in 0..m.cols() {
                                if i >= keep || j >= keep {
                                    m[(i, j)] = crate::linalg::q(0);
                                }
                            }
                        }
                    }
                    m
                })
                .collect();
            let labels: Vec<BlockLabel> = mats.iter().map(label_of).collect();
            let ranks: Vec<u64> = dims.iter().map(|&d| d as u64).collect();
            let h = chain_of(&ranks, &labels);
            let mut product = RationalMatrix::identity(1);
            let mut true_len = n;
            for (k, m) in mats.iter().enumerate() {
                product = m.mul(&product).unwrap();
                if product.is_zero() {
                    true_len = k;
                    break;
                }
            }
            match yukawa_length(&h) {
                Ok(len) => assert_eq!(len, true_len, "labels {labels:?}"),
                Err(Error::Indeterminate { .. }) => {}
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }
}
