//! The isomorphism between ordered `n+3` points on the line and ordered `n+3` hyperplanes in
//! general position in projective n-space.
//!
//! A point `p` on the line determines the hyperplane of degree-`n` binary forms vanishing at `p`.
//! In affine coordinates the map is computed both by a closed formula ([`gamma_moduli`]) and by
//! explicitly normalizing the Vandermonde-type arrangement ([`gamma_via_normalization`]).

use serde::Serialize;

use crate::arrangement::{Arrangement, ModuliPointP1, ModuliPointPn};
use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};

/// A point `(a : b)` of the projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePoint1 {
    a: Rational,
    b: Rational,
}

impl ProjectivePoint1 {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidModuliPoint("(0 : 0) is not a point".into()));
        }
        Ok(ProjectivePoint1 { a, b })
    }

    /// The finite point `t = (t : 1)`.
    pub fn finite(t: Rational) -> Self {
        ProjectivePoint1 {
            a: t,
            b: Rational::one(),
        }
    }

    pub fn infinity() -> Self {
        ProjectivePoint1 {
            a: Rational::one(),
            b: Rational::zero(),
        }
    }

    pub fn coords(&self) -> (&Rational, &Rational) {
        (&self.a, &self.b)
    }
}

/// Evaluation functional `(b^n, a b^{n−1}, …, a^n)` on degree-`n` forms: the coefficient column of
/// the hyperplane of divisors containing `p`.
pub fn point_to_hyperplane(p: &ProjectivePoint1, n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|k| p.a.pow(k as u32) * p.b.pow((n - k) as u32))
        .collect()
}

/// The ordered points `(0, t_1, …, t_{n−1}, ∞, 1, t_n)`.
pub fn configuration(t: &ModuliPointP1) -> Vec<ProjectivePoint1> {
    let c = t.coords();
    let n = c.len();
    let mut pts = Vec::with_capacity(n + 3);
    pts.push(ProjectivePoint1::finite(Rational::zero()));
    pts.extend(c[..n - 1].iter().cloned().map(ProjectivePoint1::finite));
    pts.push(ProjectivePoint1::infinity());
    pts.push(ProjectivePoint1::finite(Rational::one()));
    pts.push(ProjectivePoint1::finite(c[n - 1].clone()));
    pts
}

/// Vandermonde-type `(n+1)×(n+3)` arrangement of the configuration attached to `t`.
pub fn gamma_arrangement(t: &ModuliPointP1) -> Result<Arrangement> {
    let t = ModuliPointP1::new(t.coords().to_vec())?;
    let n = t.n();
    let cols: Vec<Vec<Rational>> = configuration(&t)
        .iter()
        .map(|p| point_to_hyperplane(p, n))
        .collect();
    Arrangement::from_columns(&cols)
}

/// Closed form: `s_i = t_n(t_i − 1)/(t_i − t_n)` for `i < n` and `s_n = t_n`.
pub fn gamma_moduli(t: &ModuliPointP1) -> Result<ModuliPointPn> {
    let t = ModuliPointP1::new(t.coords().to_vec())?;
    let c = t.coords();
    let n = c.len();
    let tn = &c[n - 1];
    let mut s: Vec<Rational> = c[..n - 1]
        .iter()
        .map(|ti| {
            let den = (ti - tn)
                .recip()
                .ok_or_else(|| Error::InvalidModuliPoint("t_i = t_n".into()))?;
            Ok(tn * &(ti - &Rational::one()) * den)
        })
        .collect::<Result<_>>()?;
    s.push(tn.clone());
    ModuliPointPn::new(s)
}

/// Intermediate data of the explicit normalization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationTrace {
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    pub lambda: Vec<Rational>,
    pub mu: Vec<Rational>,
    pub p: RationalMatrix,
    pub pa: RationalMatrix,
    pub s: ModuliPointPn,
}

/// Normalizes the Vandermonde-type arrangement directly.
///
/// `λ = B⁻¹(1, …, 1)` and `μ = B⁻¹(1, t_n, …, t_n^n)` come from Cramer's rule on the square block
/// `B` of the first `n+1` columns; then `P = λ_1 μ_1⁻¹ diag(λ)⁻¹ B⁻¹` and `s` is read from the
/// last column of `P·A`.
pub fn gamma_via_normalization(t: &ModuliPointP1) -> Result<ModuliPointPn> {
    Ok(normalization_trace(t)?.s)
}

pub fn normalization_trace(t: &ModuliPointP1) -> Result<NormalizationTrace> {
    let arrangement = gamma_arrangement(t)?;
    let a = arrangement.matrix().clone();
    let n = arrangement.n();
    let frame: Vec<usize> = (0..=n).collect();
    let b = a.select_columns(&frame);
    let lambda = b.solve_cramer(&a.column(n + 1))?;
    let mu = b.solve_cramer(&a.column(n + 2))?;
    let lambda_inv: Vec<Rational> = lambda
        .iter()
        .map(|l| l.recip().ok_or(Error::NotGeneralPosition))
        .collect::<Result<_>>()?;
    let mu0_inv = mu[0].recip().ok_or(Error::NotGeneralPosition)?;
    let p = RationalMatrix::diag(&lambda_inv)
        .mul(&b.invert()?)?
        .scale(&(&lambda[0] * &mu0_inv));
    let pa = p.mul(&a)?;
    // the last column is (1, s_1, …, s_n) on the nose; rescale anyway so a stray factor cannot hide
    let last = pa.column(n + 2);
    let lead = last[0].recip().ok_or(Error::NotGeneralPosition)?;
    let s = ModuliPointPn::new(last[1..].iter().map(|x| x * &lead).collect())?;
    Ok(NormalizationTrace {
        a,
        b,
        lambda,
        mu,
        p,
        pa,
        s,
    })
}

/// Inverse map: `t_n = s_n` and `t_i = s_n(s_i − 1)/(s_i − s_n)`.
pub fn gamma_inverse(s: &ModuliPointPn) -> Result<ModuliPointP1> {
    let s = ModuliPointPn::new(s.coords().to_vec())?;
    let c = s.coords();
    let n = c.len();
    let sn = &c[n - 1];
    let mut t: Vec<Rational> = c[..n - 1]
        .iter()
        .map(|si| {
            let den = (si - sn)
                .recip()
                .ok_or_else(|| Error::InvalidModuliPoint("s_i = s_n".into()))?;
            Ok(sn * &(si - &Rational::one()) * den)
        })
        .collect::<Result<_>>()?;
    t.push(sn.clone());
    ModuliPointP1::new(t)
}
