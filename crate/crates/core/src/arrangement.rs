//! Ordered hyperplane arrangements in projective n-space.
//!
//! An arrangement of `m` hyperplanes is stored as an `(n+1)×m` matrix whose column `j` holds the
//! coefficients of the `j`-th linear form. Column order matters; rescaling a column does not.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    n: usize,
    matrix: RationalMatrix,
}

/// Affine coordinates `(s_1, …, s_n)` of an ordered arrangement of `n+3` hyperplanes in general
/// position, i.e. the last column of the normal form `[I | 1 | (1, s)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuliPointPn {
    s: Vec<Rational>,
}

/// Affine coordinates of `n+3` ordered points `(0, t_1, …, t_{n−1}, ∞, 1, t_n)` on the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuliPointP1 {
    t: Vec<Rational>,
}

/// Rejects coordinates on the hyperplanes `x_i = 0`, `x_i = 1`, `x_i = x_j`.
fn check_affine_chart(coords: &[Rational], name: &str) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::InvalidModuliPoint(format!("{name} is empty")));
    }
    for (i, x) in coords.iter().enumerate() {
        if x.is_zero() || x.is_one() {
            return Err(Error::InvalidModuliPoint(format!(
                "{name}_{} = {x} lies on a forbidden hyperplane",
                i + 1
            )));
        }
        if let Some(j) = coords[..i].iter().position(|y| y == x) {
            return Err(Error::InvalidModuliPoint(format!(
                "{name}_{} = {name}_{} = {x}",
                j + 1,
                i + 1
            )));
        }
    }
    Ok(())
}

impl ModuliPointPn {
    pub fn new(s: Vec<Rational>) -> Result<Self> {
        check_affine_chart(&s, "s")?;
        Ok(ModuliPointPn { s })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.s
    }
}

impl ModuliPointP1 {
    pub fn new(t: Vec<Rational>) -> Result<Self> {
        check_affine_chart(&t, "t")?;
        Ok(ModuliPointP1 { t })
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.t
    }
}

/// Output of [`Arrangement::to_standard_form`]: `P · A · diag(scalings) = from_moduli(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardForm {
    pub p: RationalMatrix,
    pub scalings: Vec<Rational>,
    pub s: ModuliPointPn,
}

impl Arrangement {
    /// Wraps an `(n+1)×m` coefficient matrix. Every column must be nonzero.
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        if matrix.rows() == 0 {
            return Err(Error::InvalidArrangement("matrix has no rows".into()));
        }
        if let Some(j) =
            (0..matrix.cols()).find(|&j| matrix.column(j).iter().all(Rational::is_zero))
        {
            return Err(Error::InvalidArrangement(format!("column {j} is zero")));
        }
        Ok(Arrangement {
            n: matrix.rows() - 1,
            matrix,
        })
    }

    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        Self::new(RationalMatrix::from_columns(columns)?)
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of hyperplanes.
    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    /// No `n+1` of the hyperplanes share a point, i.e. every maximal minor is nonzero.
    pub fn is_general_position(&self) -> bool {
        self.matrix.all_minors_nonzero(self.n + 1)
    }

    /// The normal form `[I_{n+1} | 1 | (1, s_1, …, s_n)]`.
    pub fn from_moduli(s: &ModuliPointPn) -> Result<Arrangement> {
        // re-validate: the point may have been deserialized
        check_affine_chart(s.coords(), "s")?;
        let n = s.n();
        let mut m = RationalMatrix::zeros(n + 1, n + 3);
        for i in 0..=n {
            m[(i, i)] = Rational::one();
            m[(i, n + 1)] = Rational::one();
        }
        m[(0, n + 2)] = Rational::one();
        for (i, si) in s.coords().iter().enumerate() {
            m[(i + 1, n + 2)] = si.clone();
        }
        Arrangement::new(m)
    }

    /// Brings an ordered arrangement of `n+3` hyperplanes in general position to its normal form.
    ///
    /// With `B` the first `n+1` columns, `λ = B⁻¹·a_{n+2}` and `μ = B⁻¹·a_{n+3}`, the projective
    /// change of coordinates is `P = λ_1 μ_1⁻¹ diag(λ)⁻¹ B⁻¹`. Column scalings then turn the
    /// first `n+2` columns into the identity-plus-ones frame exactly.
    pub fn to_standard_form(&self) -> Result<StandardForm> {
        let n = self.n;
        if self.m() != n + 3 || !self.is_general_position() {
            return Err(Error::NotGeneralPosition);
        }
        let frame: Vec<usize> = (0..=n).collect();
        let b = self.matrix.select_columns(&frame);
        let b_inv = b.invert().map_err(|_| Error::NotGeneralPosition)?;
        let lambda = b_inv.mul_vec(&self.matrix.column(n + 1))?;
        let mu = b_inv.mul_vec(&self.matrix.column(n + 2))?;
        if lambda.iter().chain(&mu).any(Rational::is_zero) {
            return Err(Error::NotGeneralPosition);
        }
        let lead = &lambda[0] / &mu[0];
        let d_inv = RationalMatrix::diag(
            &lambda
                .iter()
                .map(|l| l.recip().expect("nonzero"))
                .collect::<Vec<_>>(),
        );
        let p = d_inv.mul(&b_inv)?.scale(&lead);

        let inv_lead = lead.recip().expect("nonzero");
        let mut scalings: Vec<Rational> = lambda.iter().map(|l| l * &inv_lead).collect();
        scalings.push(inv_lead);
        scalings.push(Rational::one());

        let s: Vec<Rational> = (1..=n).map(|i| &lead * &(&mu[i] / &lambda[i])).collect();
        let s = ModuliPointPn::new(s).map_err(|_| Error::NotGeneralPosition)?;
        Ok(StandardForm { p, scalings, s })
    }

    /// Columns rescaled so that the first nonzero entry of each is one.
    pub fn normalized_columns(&self) -> Vec<Vec<Rational>> {
        self.matrix
            .columns()
            .into_iter()
            .map(|col| {
                let lead = col
                    .iter()
                    .find(|x| !x.is_zero())
                    .and_then(Rational::recip)
                    .expect("columns are nonzero");
                col.iter().map(|x| x * &lead).collect()
            })
            .collect()
    }

    pub fn to_file(&self) -> ArrangementFile {
        ArrangementFile {
            n: self.n,
            m: self.m(),
            columns: self.normalized_columns(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Arrangement> {
        let file: ArrangementFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_arrangement()
    }
}

/// On-disk arrangement: `{ "n": int, "m": int, "columns": [["a/b", ...], ...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementFile {
    pub n: usize,
    pub m: usize,
    pub columns: Vec<Vec<Rational>>,
}

impl ArrangementFile {
    pub fn into_arrangement(self) -> Result<Arrangement> {
        if self.columns.len() != self.m {
            return Err(Error::InvalidArrangement(format!(
                "m = {} but {} columns given",
                self.m,
                self.columns.len()
            )));
        }
        if let Some(bad) = self.columns.iter().position(|c| c.len() != self.n + 1) {
            return Err(Error::InvalidArrangement(format!(
                "column {bad} has length {} (expected n+1 = {})",
                self.columns[bad].len(),
                self.n + 1
            )));
        }
        Arrangement::from_columns(&self.columns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qq};
    use itertools::Itertools;

    fn standard(s: &[Rational]) -> Arrangement {
        Arrangement::from_moduli(&ModuliPointPn::new(s.to_vec()).unwrap()).unwrap()
    }

    /// Counts vanishing (n+1)-minors by explicit enumeration of column subsets.
    fn count_vanishing_minors(a: &Arrangement) -> usize {
        let rows: Vec<usize> = (0..=a.n()).collect();
        (0..a.m())
            .combinations(a.n() + 1)
            .filter(|cols| a.matrix().minor(&rows, cols).unwrap().is_zero())
            .count()
    }

    #[test]
    fn general_position_examples() {
        let cols: Vec<Vec<Rational>> = vec![
            vec![q(1), q(0), q(0), q(0)],
            vec![q(0), q(1), q(0), q(0)],
            vec![q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
            vec![q(1), q(1), q(1), q(1)],
            vec![q(1), q(2), q(3), q(4)],
        ];
        let a = Arrangement::from_columns(&cols).unwrap();
        assert_eq!(count_vanishing_minors(&a), 0);
        assert!(a.is_general_position());

        let mut rep = cols.clone();
        rep[5] = rep[4].clone();
        let a = Arrangement::from_columns(&rep).unwrap();
        assert!(!a.is_general_position());

        assert!(standard(&[q(2), q(3), q(5)]).is_general_position());
    }

    #[test]
    fn from_moduli_matrix() {
        let a = standard(&[q(2), q(3), q(5)]);
        let expected = RationalMatrix::from_i64(&[
            &[1, 0, 0, 0, 1, 1],
            &[0, 1, 0, 0, 1, 2],
            &[0, 0, 1, 0, 1, 3],
            &[0, 0, 0, 1, 1, 5],
        ]);
        assert_eq!(a.matrix(), &expected);

        assert!(matches!(
            ModuliPointPn::new(vec![q(1), q(3), q(5)]),
            Err(Error::InvalidModuliPoint(_))
        ));
        let a = standard(&[qq(-5, 3), q(-5), q(5)]);
        assert_eq!(count_vanishing_minors(&a), 0);
        assert!(a.is_general_position());
    }

    #[test]
    fn standard_form_fixed_point() {
        let a = standard(&[q(2), q(3), q(5)]);
        let sf = a.to_standard_form().unwrap();
        assert_eq!(sf.p, RationalMatrix::identity(4));
        assert_eq!(sf.s.coords(), &[q(2), q(3), q(5)]);
    }

    #[test]
    fn standard_form_after_projective_change() {
        let a = standard(&[q(2), q(3), qq(5, 2)]);
        let change = RationalMatrix::from_i64(&[
            &[2, 1, 0, 3],
            &[0, -1, 4, 1],
            &[5, 0, 1, -2],
            &[1, 1, 1, 7],
        ]);
        let moved = Arrangement::new(change.mul(a.matrix()).unwrap()).unwrap();
        let scaled = Arrangement::new(
            moved
                .matrix()
                .scale_columns(&[q(3), qq(-1, 2), q(7), q(1), q(-4), qq(2, 9)])
                .unwrap(),
        )
        .unwrap();
        let sf = scaled.to_standard_form().unwrap();
        assert_eq!(sf.s.coords(), &[q(2), q(3), qq(5, 2)]);
        let reproduced =
            sf.p.mul(scaled.matrix())
                .unwrap()
                .scale_columns(&sf.scalings)
                .unwrap();
        assert_eq!(&reproduced, a.matrix());
    }

    #[test]
    fn standard_form_rejects_degenerate() {
        let mut cols = standard(&[q(2), q(3), q(5)]).matrix().columns();
        cols[5] = vec![q(1), q(1), q(0), q(0)];
        let a = Arrangement::from_columns(&cols).unwrap();
        assert_eq!(a.to_standard_form(), Err(Error::NotGeneralPosition));
        let short = Arrangement::new(RationalMatrix::identity(4)).unwrap();
        assert_eq!(short.to_standard_form(), Err(Error::NotGeneralPosition));
    }

    #[test]
    fn json_round_trip_normalizes_columns() {
        let a = Arrangement::new(
            standard(&[q(2), q(3), q(5)])
                .matrix()
                .scale_columns(&[q(2), q(1), q(1), q(1), q(3), qq(1, 2)])
                .unwrap(),
        )
        .unwrap();
        let text = a.to_json();
        assert!(text.contains("\"n\": 3"));
        let back = Arrangement::from_json(&text).unwrap();
        assert_eq!(back, standard(&[q(2), q(3), q(5)]));
    }

    #[test]
    fn json_errors() {
        assert!(
            Arrangement::from_json(r#"{"n":1,"m":3,"columns":[["1","0"],["0","1"]]}"#).is_err()
        );
        assert!(Arrangement::from_json(r#"{"n":1,"m":1,"columns":[["1"]]}"#).is_err());
        assert!(matches!(
            Arrangement::from_json(r#"{"n":1,"m":1,"columns":[["0","0"]]}"#),
            Err(Error::InvalidArrangement(_))
        ));
    }
}
