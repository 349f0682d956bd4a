//! Sparse exact matrices and rank computation.
//!
//! Matrices are stored column-major as sorted `(row, coefficient)` lists with
//! rational entries.  Rank is computed exactly, either over ℚ by
//! fraction-free (Bareiss-style) elimination on denominator-cleared integer
//! rows, or over a prime field after reduction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{FpCtx, Q, ScalarError};

/// A sparse matrix over ℚ with explicit dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, Q)>>,
}

impl SparseMat {
    /// The zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, columns: alloc::vec![Vec::new(); cols] }
    }

    /// The identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = SparseMat::zero(n, n);
        for i in 0..n {
            m.add_entry(i, i, crate::scalar::q_int(1));
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Adds `value` to the entry at `(row, col)`.
    pub fn add_entry(&mut self, row: usize, col: usize, value: Q) {
        assert!(row < self.rows && col < self.cols, "entry ({row},{col}) out of bounds");
        if value.is_zero() {
            return;
        }
        let column = &mut self.columns[col];
        match column.binary_search_by_key(&row, |e| e.0) {
            Ok(i) => {
                let sum = &column[i].1 + value;
                if sum.is_zero() {
                    column.remove(i);
                } else {
                    column[i].1 = sum;
                }
            }
            Err(i) => column.insert(i, (row, value)),
        }
    }

    /// The entry at `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> Q {
        self.columns[col]
            .binary_search_by_key(&row, |e| e.0)
            .map(|i| self.columns[col][i].1.clone())
            .unwrap_or_else(|_| Q::zero())
    }

    /// The nonzero entries of one column, sorted by row.
    pub fn column(&self, col: usize) -> &[(usize, Q)] {
        &self.columns[col]
    }

    /// All nonzero entries as `(row, col, value)`, sorted by `(row, col)`.
    pub fn triplets(&self) -> Vec<(usize, usize, Q)> {
        let mut out = Vec::new();
        for (c, column) in self.columns.iter().enumerate() {
            for (r, v) in column {
                out.push((*r, c, v.clone()));
            }
        }
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    /// Builds a matrix from triplets, summing duplicates.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Q)>,
    ) -> Self {
        let mut m = SparseMat::zero(rows, cols);
        for (r, c, v) in entries {
            m.add_entry(r, c, v);
        }
        m
    }

    /// Whether every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// First nonzero entry `(row, col)` in column-major order, if any.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.columns
            .iter()
            .enumerate()
            .find_map(|(c, col)| col.first().map(|(r, _)| (*r, c)))
    }

    /// Applies the matrix to a sparse vector (column of coefficients).
    pub fn apply(&self, vec: &[(usize, Q)]) -> Vec<(usize, Q)> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, coeff) in vec {
            for (r, v) in &self.columns[*i] {
                let entry = acc.entry(*r).or_insert_with(Q::zero);
                *entry += coeff * v;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = SparseMat::zero(self.rows, other.cols);
        for c in 0..other.cols {
            out.columns[c] = self.apply(&other.columns[c]);
        }
        out
    }

    /// Entry-wise sum `self + other`.
    pub fn add(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (c, column) in other.columns.iter().enumerate() {
            for (r, v) in column {
                out.add_entry(*r, c, v.clone());
            }
        }
        out
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (c, column) in other.columns.iter().enumerate() {
            for (r, v) in column {
                out.add_entry(*r, c, -v.clone());
            }
        }
        out
    }

    /// Scales every entry.
    pub fn scale(&mut self, factor: &Q) {
        if factor.is_zero() {
            for column in &mut self.columns {
                column.clear();
            }
            return;
        }
        for column in &mut self.columns {
            for (_, v) in column.iter_mut() {
                *v *= factor;
            }
        }
    }

    /// Rank over ℚ by fraction-free elimination.
    ///
    /// Each row is first scaled to integers (rank-preserving); the
    /// elimination then keeps all entries integral, dividing by the previous
    /// pivot at each step (Bareiss), which is exact.
    pub fn rank_q(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, BigInt>> = Vec::new();
        let mut row_entries: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
        for (c, column) in self.columns.iter().enumerate() {
            for (r, v) in column {
                row_entries.entry(*r).or_default().insert(c, v.clone());
            }
        }
        for (_, entries) in row_entries {
            let lcm = entries
                .values()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let row: BTreeMap<usize, BigInt> = entries
                .into_iter()
                .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
                .collect();
            rows.push(row);
        }

        let mut rank = 0;
        let mut prev = BigInt::one();
        while !rows.is_empty() {
            // Pivot: the row whose leading column is smallest (ties: first).
            let pivot_idx = {
                let mut best = 0;
                for i in 1..rows.len() {
                    let ci = rows[i].keys().next().expect("rows are nonempty");
                    let cb = rows[best].keys().next().expect("rows are nonempty");
                    if ci < cb {
                        best = i;
                    }
                }
                best
            };
            let pivot_row = rows.swap_remove(pivot_idx);
            let pivot_col = *pivot_row.keys().next().expect("rows are nonempty");
            let pivot_val = pivot_row[&pivot_col].clone();
            rank += 1;

            let mut next_rows = Vec::with_capacity(rows.len());
            for row in rows {
                let factor = row.get(&pivot_col).cloned().unwrap_or_else(BigInt::zero);
                let mut updated: BTreeMap<usize, BigInt> = BTreeMap::new();
                let keys: alloc::collections::BTreeSet<usize> = row
                    .keys()
                    .chain(pivot_row.keys())
                    .copied()
                    .collect();
                for c in keys {
                    if c == pivot_col {
                        continue; // eliminated exactly
                    }
                    let a = row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                    let b = pivot_row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                    let num = &pivot_val * a - &factor * b;
                    if num.is_zero() {
                        continue;
                    }
                    let (quot, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                    updated.insert(c, quot);
                }
                if !updated.is_empty() {
                    next_rows.push(updated);
                }
            }
            rows = next_rows;
            prev = pivot_val;
        }
        rank
    }

    /// Rank over `F_p`; errors if any denominator vanishes mod `p`.
    pub fn rank_fp(&self, field: &FpCtx) -> Result<usize, ScalarError> {
        let mut row_entries: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
        for (c, column) in self.columns.iter().enumerate() {
            for (r, v) in column {
                let reduced = field.reduce(v)?;
                if reduced != 0 {
                    row_entries.entry(*r).or_default().insert(c, reduced);
                }
            }
        }
        let mut rows: Vec<BTreeMap<usize, u64>> =
            row_entries.into_values().filter(|r| !r.is_empty()).collect();
        let mut rank = 0;
        while !rows.is_empty() {
            let pivot_idx = (0..rows.len())
                .min_by_key(|&i| *rows[i].keys().next().expect("nonempty"))
                .expect("nonempty row list");
            let pivot_row = rows.swap_remove(pivot_idx);
            let pivot_col = *pivot_row.keys().next().expect("nonempty");
            let pivot_inv = field.inv(pivot_row[&pivot_col]);
            rank += 1;

            let mut next_rows = Vec::with_capacity(rows.len());
            for mut row in rows {
                if let Some(&factor) = row.get(&pivot_col) {
                    let scale = field.mul(factor, pivot_inv);
                    for (c, b) in &pivot_row {
                        let a = row.get(c).copied().unwrap_or(0);
                        let v = field.sub(a, field.mul(scale, *b));
                        if v == 0 {
                            row.remove(c);
                        } else {
                            row.insert(*c, v);
                        }
                    }
                }
                if !row.is_empty() {
                    next_rows.push(row);
                }
            }
            rows = next_rows;
        }
        Ok(rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_q, q_int};

    fn mat(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> SparseMat {
        SparseMat::from_triplets(
            rows,
            cols,
            entries.iter().map(|&(r, c, v)| (r, c, q_int(v))),
        )
    }

    #[test]
    fn entry_arithmetic_and_cancellation() {
        let mut m = SparseMat::zero(2, 2);
        m.add_entry(0, 0, q_int(2));
        m.add_entry(0, 0, q_int(-2));
        assert!(m.is_zero());
        m.add_entry(1, 0, q_int(3));
        assert_eq!(m.entry(1, 0), q_int(3));
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.first_nonzero(), Some((1, 0)));
    }

    #[test]
    fn product_matches_hand_computation() {
        // [[1,2],[0,1]] * [[1,0],[3,1]] = [[7,2],[3,1]]
        let a = mat(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 1, 1)]);
        let b = mat(2, 2, &[(0, 0, 1), (1, 0, 3), (1, 1, 1)]);
        let c = a.mul(&b);
        assert_eq!(c.entry(0, 0), q_int(7));
        assert_eq!(c.entry(0, 1), q_int(2));
        assert_eq!(c.entry(1, 0), q_int(3));
        assert_eq!(c.entry(1, 1), q_int(1));
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(SparseMat::zero(3, 4).rank_q(), 0);
        let id = mat(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        assert_eq!(id.rank_q(), 3);
        // Rank-1 outer product.
        let m = mat(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        assert_eq!(m.rank_q(), 1);
        // Two independent rows plus their sum.
        let m = mat(
            3,
            3,
            &[(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1), (2, 0, 1), (2, 1, 2), (2, 2, 1)],
        );
        assert_eq!(m.rank_q(), 2);
    }

    #[test]
    fn rank_with_rational_entries() {
        // (3/2, 1) = 3 · (1/2, 1/3): proportional rows, rank 1.
        let mut m = SparseMat::zero(2, 3);
        m.add_entry(0, 0, parse_q("1/2").unwrap());
        m.add_entry(0, 1, parse_q("1/3").unwrap());
        m.add_entry(1, 0, parse_q("3/2").unwrap());
        m.add_entry(1, 1, parse_q("1").unwrap());
        assert_eq!(m.rank_q(), 1);
        let f = FpCtx::new(101).unwrap();
        assert_eq!(m.rank_fp(&f).unwrap(), 1);
        // Perturbing one entry restores full rank.
        let mut m2 = m.clone();
        m2.add_entry(1, 1, parse_q("-4/5").unwrap());
        assert_eq!(m2.rank_q(), 2);
        assert_eq!(m2.rank_fp(&f).unwrap(), 2);
    }

    #[test]
    fn rank_fp_agrees_with_rank_q_generically() {
        let f = FpCtx::new(101).unwrap();
        let m = mat(
            4,
            5,
            &[
                (0, 0, 1),
                (0, 2, -1),
                (1, 1, 2),
                (1, 2, 4),
                (2, 0, 1),
                (2, 1, 1),
                (2, 2, 1),
                (3, 4, 7),
            ],
        );
        assert_eq!(m.rank_q(), m.rank_fp(&f).unwrap());
    }

    #[test]
    fn rank_fp_detects_vanishing_denominator() {
        let f = FpCtx::new(101).unwrap();
        let mut m = SparseMat::zero(1, 1);
        m.add_entry(0, 0, parse_q("1/101").unwrap());
        assert!(m.rank_fp(&f).is_err());
    }

    #[test]
    fn characteristic_can_change_rank() {
        // [[2]] has rank 1 over Q but rank 0 over F_2.
        let m = mat(1, 1, &[(0, 0, 2)]);
        assert_eq!(m.rank_q(), 1);
        let f2 = FpCtx::new(2).unwrap();
        assert_eq!(m.rank_fp(&f2).unwrap(), 0);
    }

    #[test]
    fn triplets_round_trip_sorted() {
        let m = mat(3, 3, &[(2, 0, 5), (0, 1, 1), (1, 1, -2)]);
        let t = m.triplets();
        assert_eq!(
            t,
            alloc::vec![
                (0usize, 1usize, q_int(1)),
                (1, 1, q_int(-2)),
                (2, 0, q_int(5)),
            ]
        );
        let m2 = SparseMat::from_triplets(3, 3, t);
        assert_eq!(m, m2);
    }

    #[test]
    fn sub_and_apply() {
        let a = mat(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let b = mat(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        assert!(a.sub(&b).is_zero());
        let v = alloc::vec![(0usize, q_int(2)), (1usize, q_int(-1))];
        let image = a.apply(&v);
        assert_eq!(image, alloc::vec![(0usize, q_int(2)), (1usize, q_int(-1))]);
    }
}
