//! The Kummer cover attached to an arrangement of `m = n+3` hyperplanes.
//!
//! With `A_map` the `m×(n+1)` transpose of the arrangement matrix, a `2×m` matrix `B` whose rows
//! span the left kernel of `A_map` gives the complete intersection
//! `Σ_j b_{ij} z_{j−1}^r = 0`, `i = 1, 2` in `P^{m−1}`.

use itertools::Itertools;
use serde::Serialize;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};

/// One Fermat-type equation `Σ_j coefficients[j] · z_j^exponent = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FermatEquation {
    pub coefficients: Vec<Rational>,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerData {
    pub r: u32,
    pub a_map: RationalMatrix,
    pub b: RationalMatrix,
    pub equations: [FermatEquation; 2],
}

/// Orders of `G_1 = (Z/r)^m / Δ(Z/r)` and of `N_1`, the kernel of `a ↦ Σ a_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverGroups {
    pub r: u32,
    pub m: u32,
    pub order_g1: u128,
    pub order_n1: u128,
    /// The sum map only descends to the quotient by the diagonal when `r | m`.
    pub sum_map_well_defined: bool,
}

/// Builds `B` and the two equations from an arrangement.
///
/// Degenerate arrangements are accepted as long as the coefficient matrix has full rank, so that
/// [`is_smooth_y`] can be compared against [`Arrangement::is_general_position`]. Fails with
/// `NotGeneralPosition` when the left kernel is not two-dimensional.
pub fn gale_dual(a: &Arrangement, r: u32) -> Result<KummerData> {
    if a.m() != a.n() + 3 {
        return Err(Error::InvalidArrangement(format!(
            "expected m = n+3 hyperplanes, got n={} m={}",
            a.n(),
            a.m()
        )));
    }
    if r < 2 {
        return Err(Error::InvalidArrangement(format!("cover degree {r} < 2")));
    }
    let a_map = a.matrix().transpose();
    let b = a_map.left_kernel_basis();
    if b.rows() != 2 {
        return Err(Error::NotGeneralPosition);
    }
    let equations = [0, 1].map(|i| FermatEquation {
        coefficients: b.row(i).to_vec(),
        exponent: r,
    });
    Ok(KummerData {
        r,
        a_map,
        b,
        equations,
    })
}

/// Smoothness certificate for `Y`: every `2×2` minor of `B` is nonzero.
pub fn is_smooth_y(k: &KummerData) -> bool {
    k.b.rows() == 2 && k.b.all_minors_nonzero(2)
}

/// The `2×2` minor of `B` on the columns not in `subset` (`|subset| = m − 2`).
pub fn complementary_minor(b: &RationalMatrix, subset: &[usize]) -> Result<Rational> {
    let rest: Vec<usize> = (0..b.cols()).filter(|j| !subset.contains(j)).collect();
    if rest.len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "complement of {subset:?} has {} columns, expected 2",
            rest.len()
        )));
    }
    b.minor(&[0, 1], &rest)
}

/// For every `(n+1)`-subset of hyperplanes: whether it is dependent, and whether the
/// complementary minor of `B` vanishes. The two flags agree for a Gale pair.
pub fn subset_correspondence(
    a: &Arrangement,
    k: &KummerData,
) -> Result<Vec<(Vec<usize>, bool, bool)>> {
    let n1 = a.n() + 1;
    let rows: Vec<usize> = (0..n1).collect();
    (0..a.m())
        .combinations(n1)
        .map(|subset| {
            let dependent = a.matrix().minor(&rows, &subset)?.is_zero();
            let vanishes = complementary_minor(&k.b, &subset)?.is_zero();
            Ok((subset, dependent, vanishes))
        })
        .collect()
}

pub fn group_data(r: u32, m: u32) -> Result<CoverGroups> {
    if r < 2 || m < 3 {
        return Err(Error::InvalidTuple {
            n: m.saturating_sub(3) as usize,
            m: m as usize,
            r,
            reason: "group data needs r ≥ 2 and m ≥ 3".into(),
        });
    }
    let pow = |e: u32| {
        (r as u128)
            .checked_pow(e)
            .ok_or_else(|| Error::Overflow(format!("{r}^{e} does not fit in 128 bits")))
    };
    Ok(CoverGroups {
        r,
        m,
        order_g1: pow(m - 1)?,
        order_n1: pow(m - 2)?,
        sum_map_well_defined: m.is_multiple_of(r),
    })
}
