//! Hodge numbers of the middle cohomology, eigenspaces of the curve cover and the Galois-orbit
//! criterion for the uniformizing sub-variation.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// The cover degree `r = (n+3)/2` for odd `n ≥ 3`.
pub fn cover_degree(n: usize) -> Result<usize> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidN(n));
    }
    Ok((n + 3) / 2)
}

/// `h^{n,0}, h^{n−1,1}, …, h^{0,n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeRow {
    pub n: usize,
    pub values: Vec<u64>,
}

impl HodgeRow {
    pub fn is_palindromic(&self) -> bool {
        self.values.iter().eq(self.values.iter().rev())
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

/// `h^{n−q,q} = q + 1` for even `q` and `n + 1 − q` for odd `q`.
pub fn hodge_middle(n: usize) -> Result<HodgeRow> {
    cover_degree(n)?;
    let values = (0..=n)
        .map(|q| if q % 2 == 0 { q + 1 } else { n + 1 - q } as u64)
        .collect();
    Ok(HodgeRow { n, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Eigenspace {
    pub i: usize,
    pub dim_10: usize,
    pub dim_01: usize,
}

/// Dimensions of the `ζ_r^i` eigenspaces `V_i^{1,0}`, `V_i^{0,1}` for `1 ≤ i ≤ r−1`.
/// The invariant part `V_0` is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenData {
    pub r: usize,
    pub dim_v0: usize,
    pub spaces: Vec<Eigenspace>,
}

impl EigenData {
    pub fn total(&self) -> usize {
        self.dim_v0
            + self
                .spaces
                .iter()
                .map(|e| e.dim_10 + e.dim_01)
                .sum::<usize>()
    }
}

pub fn eigenspace_dims(r: usize) -> Result<EigenData> {
    if r < 2 {
        return Err(Error::InvalidTuple {
            n: 0,
            m: 2 * r,
            r: r as u32,
            reason: "eigenspaces need r ≥ 2".into(),
        });
    }
    let spaces = (1..r)
        .map(|i| Eigenspace {
            i,
            dim_10: 2 * i - 1,
            dim_01: 2 * (r - i) - 1,
        })
        .collect();
    Ok(EigenData {
        r,
        dim_v0: 0,
        spaces,
    })
}

/// Genus of the `r`-fold cyclic cover of the line totally ramified over `m` points, from
/// `2g − 2 = −2r + m(r − 1)`.
pub fn riemann_hurwitz_genus(r: usize, m: usize) -> Result<usize> {
    let twice = (m * (r - 1) + 2)
        .checked_sub(2 * r)
        .filter(|t| t % 2 == 0)
        .ok_or_else(|| Error::InvalidTuple {
            n: 0,
            m,
            r: r as u32,
            reason: "Riemann–Hurwitz gives no integral genus".into(),
        })?;
    Ok(twice / 2)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Euler's totient by brute force over `1..r`.
pub fn unit_group_order(r: usize) -> usize {
    if r == 1 {
        return 1;
    }
    (1..r).filter(|&u| gcd(u, r) == 1).count()
}

/// `{ u·i mod r : u a unit of Z/r }`.
pub fn galois_orbit(r: usize, i: usize) -> BTreeSet<usize> {
    (1..r)
        .filter(|&u| gcd(u, r) == 1)
        .map(|u| (u * i) % r)
        .collect()
}

/// Whether the sub-variation generated by `∧^n V_1` and its conjugate is a single orbit of size
/// two, which happens exactly when `r ∈ {3, 4, 6}`.
pub fn w_unif_exists(n: usize) -> Result<bool> {
    let r = cover_degree(n)?;
    Ok(unit_group_order(r) == 2)
}

/// `Σ_{i=1}^{r−1} dim ∧^n V_i` with `dim V_i = n + 1`.
pub fn kunneth_middle_dim(n: usize) -> Result<u64> {
    let r = cover_degree(n)?;
    let eig = eigenspace_dims(r)?;
    let mut total = 0u64;
    for e in &eig.spaces {
        let dim_v = e.dim_10 + e.dim_01;
        debug_assert_eq!(dim_v, n + 1);
        total += binomial(dim_v as u64, n as u64);
    }
    Ok(total)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows() {
        assert_eq!(hodge_middle(3).unwrap().values, vec![1, 3, 3, 1]);
        let r5 = hodge_middle(5).unwrap();
        assert_eq!(r5.values, vec![1, 5, 3, 3, 5, 1]);
        assert_eq!(r5.total(), 18);
        let r9 = hodge_middle(9).unwrap();
        assert_eq!(r9.values, vec![1, 9, 3, 7, 5, 5, 7, 3, 9, 1]);
        assert_eq!(r9.total(), 50);
        assert_eq!(hodge_middle(4), Err(Error::InvalidN(4)));
        assert_eq!(hodge_middle(1), Err(Error::InvalidN(1)));
    }

    #[test]
    fn sum_rule_and_palindrome() {
        for n in (3..=21).step_by(2) {
            let r = (n + 3) / 2;
            let row = hodge_middle(n).unwrap();
            assert!(row.is_palindromic());
            let expected = 2 * ((r - 1) * (r - 1)) as u64;
            assert_eq!(row.total(), expected);
            assert_eq!(kunneth_middle_dim(n).unwrap(), expected);
        }
    }

    #[test]
    fn eigenspaces() {
        let e3 = eigenspace_dims(3).unwrap();
        let pairs: Vec<_> = e3.spaces.iter().map(|e| (e.dim_10, e.dim_01)).collect();
        assert_eq!(pairs, vec![(1, 3), (3, 1)]);
        assert_eq!(e3.total(), 8);
        assert_eq!(riemann_hurwitz_genus(3, 6).unwrap(), 4);
        let e4 = eigenspace_dims(4).unwrap();
        let pairs: Vec<_> = e4.spaces.iter().map(|e| (e.dim_10, e.dim_01)).collect();
        assert_eq!(pairs, vec![(1, 5), (3, 3), (5, 1)]);
        assert_eq!(riemann_hurwitz_genus(4, 8).unwrap(), 9);
        for r in 2..=12 {
            let e = eigenspace_dims(r).unwrap();
            for s in &e.spaces {
                assert_eq!(s.dim_01, e.spaces[r - 1 - s.i].dim_10);
            }
            assert_eq!(e.total(), 2 * riemann_hurwitz_genus(r, 2 * r).unwrap());
        }
    }

    #[test]
    fn units_and_orbits() {
        assert_eq!([3, 4, 5, 6, 7].map(unit_group_order), [2, 2, 4, 2, 6]);
        assert_eq!(galois_orbit(3, 1), BTreeSet::from([1, 2]));
        assert_eq!(galois_orbit(5, 1), BTreeSet::from([1, 2, 3, 4]));
        assert_eq!(galois_orbit(6, 1), BTreeSet::from([1, 5]));
    }

    #[test]
    fn uniformization_criterion() {
        for n in [3, 5, 9] {
            assert!(w_unif_exists(n).unwrap());
        }
        assert!(!w_unif_exists(7).unwrap());
        assert!(!w_unif_exists(11).unwrap());
        assert!(w_unif_exists(2).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(10, 0), 1);
    }
}
