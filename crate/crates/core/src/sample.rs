//! Seeded generators for property tests, the self-test suite and benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{Arrangement, ModuliPointP1, ModuliPointPn};
use crate::linalg::{Rational, RationalMatrix};

/// Bound on numerators and denominators of sampled rationals.
const BOUND: i64 = 12;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn rational(&mut self) -> Rational {
        let num = self.int(-BOUND, BOUND);
        let den = self.int(1, BOUND);
        Rational::new(num, den).expect("positive denominator")
    }

    /// `n` distinct rationals outside `{0, 1}`.
    fn chart_coords(&mut self, n: usize) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        while out.len() < n {
            let x = self.rational();
            if !x.is_zero() && !x.is_one() && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    pub fn moduli_point_p1(&mut self, n: usize) -> ModuliPointP1 {
        ModuliPointP1::new(self.chart_coords(n)).expect("sampled off the forbidden locus")
    }

    pub fn moduli_point_pn(&mut self, n: usize) -> ModuliPointPn {
        ModuliPointPn::new(self.chart_coords(n)).expect("sampled off the forbidden locus")
    }

    pub fn int_matrix(&mut self, rows: usize, cols: usize) -> RationalMatrix {
        let entries = (0..rows * cols)
            .map(|_| Rational::from_int(self.int(-9, 9)))
            .collect();
        RationalMatrix::new(rows, cols, entries).expect("entry count matches shape")
    }

    pub fn invertible_matrix(&mut self, k: usize) -> RationalMatrix {
        loop {
            let m = self.int_matrix(k, k);
            if m.rank() == k {
                return m;
            }
        }
    }

    /// Nonzero rational column scalings.
    pub fn scalings(&mut self, m: usize) -> Vec<Rational> {
        (0..m)
            .map(|_| loop {
                let x = self.rational();
                if !x.is_zero() {
                    break x;
                }
            })
            .collect()
    }

    pub fn general_arrangement(&mut self, n: usize, m: usize) -> Arrangement {
        loop {
            if let Ok(a) = Arrangement::new(self.int_matrix(n + 1, m)) {
                if a.is_general_position() {
                    return a;
                }
            }
        }
    }

    /// An arrangement of `n+3` hyperplanes where the returned `n+1` hyperplanes are concurrent
    /// while the matrix keeps full rank.
    pub fn degenerate_arrangement(&mut self, n: usize) -> (Arrangement, Vec<usize>) {
        let m = n + 3;
        loop {
            let base = self.general_arrangement(n, m);
            let mut subset: Vec<usize> = (0..m).collect();
            while subset.len() > n + 1 {
                let drop = self.rng.random_range(0..subset.len());
                subset.remove(drop);
            }
            // replace the last column of the subset by a combination of the other n
            let target = subset[n];
            let mut cols = base.matrix().columns();
            let mut combo = vec![Rational::zero(); n + 1];
            for &j in &subset[..n] {
                let c = Rational::from_int(self.int(-3, 3));
                for (acc, x) in combo.iter_mut().zip(&cols[j]) {
                    *acc += &(&c * x);
                }
            }
            cols[target] = combo;
            if let Ok(a) = Arrangement::from_columns(&cols) {
                if a.matrix().rank() == n + 1 {
                    return (a, subset);
                }
            }
        }
    }
}
