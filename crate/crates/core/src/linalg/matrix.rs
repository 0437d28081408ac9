use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};
use crate::par;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let nrows = rows.len();
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from columns; all columns must have equal length.
    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        let nrows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != nrows) {
            return Err(Error::ShapeMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    /// Integer fixture helper.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular fixture")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, c: &Rational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies column `j` by `scalings[j]`, i.e. `self · diag(scalings)`.
    pub fn scale_columns(&self, scalings: &[Rational]) -> Result<RationalMatrix> {
        if scalings.len() != self.cols {
            return Err(Error::ShapeMismatch("scaling vector length".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, c) in scalings.iter().enumerate() {
                out[(i, j)] *= c;
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> RationalMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> RationalMatrix {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            entries.extend_from_slice(self.row(i));
        }
        RationalMatrix {
            rows: rows.len(),
            cols: self.cols,
            entries,
        }
    }

    /// Reduced row-echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip().expect("pivot is nonzero");
            for j in col..m.cols {
                m[(row, j)] *= &inv;
            }
            for i in 0..m.rows {
                if i == row || m[(i, col)].is_zero() {
                    continue;
                }
                let factor = m[(i, col)].clone();
                for j in col..m.cols {
                    let delta = &factor * &m[(row, j)];
                    m[(i, j)] -= &delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !m[(i, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            let inv = pivot.recip().expect("pivot is nonzero");
            for i in col + 1..n {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let factor = &m[(i, col)] * &inv;
                for j in col..n {
                    let delta = &factor * &m[(col, j)];
                    m[(i, j)] -= &delta;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse via Gauss-Jordan elimination on `[M | I]`.
    pub fn invert(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "cannot invert a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Solves `M x = b` by Cramer's rule.
    pub fn solve_cramer(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if !self.is_square() || b.len() != self.rows {
            return Err(Error::ShapeMismatch(
                "Cramer's rule needs a square system".into(),
            ));
        }
        let det = self.det()?;
        let inv_det = det.recip().ok_or(Error::SingularMatrix)?;
        (0..self.cols)
            .map(|j| {
                let mut replaced = self.clone();
                for (i, v) in b.iter().enumerate() {
                    replaced[(i, j)] = v.clone();
                }
                Ok(replaced.det()? * &inv_det)
            })
            .collect()
    }

    /// Basis of `{ v : v·M = 0 }` as the rows of the result, in reduced row-echelon form.
    ///
    /// The result has `rows(M) - rank(M)` rows and `rows(M)` columns.
    pub fn left_kernel_basis(&self) -> RationalMatrix {
        let t = self.transpose();
        let (red, pivots) = t.rref();
        let nvars = self.rows;
        let free: Vec<usize> = (0..nvars).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); nvars];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&red[(r, f)];
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return Self::zeros(0, nvars);
        }
        let m = Self::from_rows(basis).expect("uniform rows");
        m.rref().0
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Rational> {
        self.select_rows(rows).select_columns(cols).det()
    }

    /// True iff every k×k minor is nonzero. Vacuously true when `k` exceeds either dimension.
    pub fn all_minors_nonzero(&self, k: usize) -> bool {
        if k > self.rows || k > self.cols {
            return true;
        }
        let row_sets: Vec<Vec<usize>> = (0..self.rows).combinations(k).collect();
        let col_sets: Vec<Vec<usize>> = (0..self.cols).combinations(k).collect();
        let pairs: Vec<(usize, usize)> = (0..row_sets.len())
            .cartesian_product(0..col_sets.len())
            .collect();
        par::all(&pairs, |&(ri, ci)| {
            !self
                .minor(&row_sets[ri], &col_sets[ci])
                .expect("square minor")
                .is_zero()
        })
    }

    /// Square Vandermonde matrix with row `i` equal to `points^i`.
    pub fn vandermonde(points: &[Rational]) -> RationalMatrix {
        let n = points.len();
        let mut m = Self::zeros(n, n);
        for (j, p) in points.iter().enumerate() {
            let mut acc = Rational::one();
            for i in 0..n {
                m[(i, j)] = acc.clone();
                acc *= p;
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// `∏_{i<j} (p_j − p_i)`.
pub fn vandermonde_det(points: &[Rational]) -> Rational {
    let mut acc = Rational::one();
    for j in 0..points.len() {
        for i in 0..j {
            acc *= &(&points[j] - &points[i]);
        }
    }
    acc
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{q, qq};
    use proptest::prelude::*;

    /// Cofactor expansion along the first row; independent of the elimination path.
    fn cofactor_det(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let sub = m.select_rows(&rows).select_columns(&cols);
            let term = &m[(0, j)] * &cofactor_det(&sub);
            if j % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(-9i64..=9, rows * cols).prop_map(move |v| {
            RationalMatrix::new(rows, cols, v.into_iter().map(q).collect()).unwrap()
        })
    }

    #[test]
    fn invert_identity_and_unipotent() {
        let id = RationalMatrix::identity(3);
        assert_eq!(id.invert().unwrap(), id);
        let u = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            u.invert().unwrap(),
            RationalMatrix::from_i64(&[&[1, -1], &[0, 1]])
        );
    }

    #[test]
    fn invert_errors() {
        let s = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.invert(), Err(Error::SingularMatrix));
        let r = RationalMatrix::from_i64(&[&[1, 2, 3]]);
        assert!(matches!(r.invert(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn invert_five_by_five_multiply_back() {
        let m = RationalMatrix::from_i64(&[
            &[3, -9, 4, 0, 7],
            &[1, 2, -5, 8, -3],
            &[0, 6, 1, -2, 9],
            &[-7, 0, 2, 5, 1],
            &[4, -1, -8, 3, 2],
        ]);
        assert!(!m.det().unwrap().is_zero());
        let inv = m.invert().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RationalMatrix::identity(5));
        assert_eq!(inv.mul(&m).unwrap(), RationalMatrix::identity(5));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_det(&[q(7)]), q(1));
        let pts = [q(1), q(2), q(3)];
        assert_eq!(vandermonde_det(&pts), q(2));
        assert_eq!(cofactor_det(&RationalMatrix::vandermonde(&pts)), q(2));
        let t = qq(5, 7);
        assert!(vandermonde_det(&[t.clone(), t]).is_zero());
    }

    #[test]
    fn left_kernel_examples() {
        let k = RationalMatrix::identity(3).left_kernel_basis();
        assert_eq!((k.rows(), k.cols()), (0, 3));
        let col = RationalMatrix::from_i64(&[&[1], &[1]]);
        let k = col.left_kernel_basis();
        assert_eq!(k, RationalMatrix::from_i64(&[&[1, -1]]));
    }

    #[test]
    fn minors_examples() {
        assert!(RationalMatrix::identity(2).all_minors_nonzero(2));
        let zero_col = RationalMatrix::from_i64(&[&[1, 0, 2], &[3, 0, 4]]);
        assert!(!zero_col.all_minors_nonzero(1));
    }

    #[test]
    fn cramer_matches_inverse() {
        let m = RationalMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let b = vec![q(1), qq(1, 2), q(-3)];
        let x = m.solve_cramer(&b).unwrap();
        assert_eq!(x, m.invert().unwrap().mul_vec(&b).unwrap());
        assert_eq!(m.mul_vec(&x).unwrap(), b);
    }

    proptest! {
        #[test]
        fn inverse_is_involutive(m in small_matrix(4, 4)) {
            prop_assume!(!m.det().unwrap().is_zero());
            let inv = m.invert().unwrap();
            prop_assert_eq!(m.mul(&inv).unwrap(), RationalMatrix::identity(4));
            prop_assert_eq!(inv.invert().unwrap(), m);
        }

        #[test]
        fn vandermonde_det_matches_cofactor(pts in proptest::collection::vec(-6i64..=6, 1..=8)) {
            let pts: Vec<Rational> = pts.into_iter().map(q).collect();
            prop_assert_eq!(vandermonde_det(&pts), cofactor_det(&RationalMatrix::vandermonde(&pts)));
        }

        #[test]
        fn elimination_det_matches_cofactor(m in small_matrix(5, 5)) {
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m));
        }

        #[test]
        fn left_kernel_annihilates(rows in 1usize..=8, cols in 1usize..=8, seed in proptest::collection::vec(-3i64..=3, 64)) {
            let m = RationalMatrix::new(rows, cols, seed[..rows * cols].iter().map(|&v| q(v)).collect()).unwrap();
            let k = m.left_kernel_basis();
            prop_assert_eq!(k.rows(), rows - m.rank());
            prop_assert_eq!(k.cols(), rows);
            if k.rows() > 0 {
                prop_assert!(k.mul(&m).unwrap().is_zero());
                prop_assert_eq!(k.rank() + m.rank(), rows);
                // already reduced
                prop_assert_eq!(k.rref().0, k);
            }
        }
    }
}
