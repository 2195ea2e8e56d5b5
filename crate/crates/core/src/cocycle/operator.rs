//! Operators on `ℓ²` of the vertex set that differ from the identity on
//! finitely many columns.

use std::collections::HashMap;

use num_complex::Complex64;

use super::scalar::{Magnitude, Scalar};
use crate::complex::VertexId;

/// Sparse column of an operator: `(row, value)` sorted by row, no zeros.
pub type Column<T> = Vec<(VertexId, T)>;

/// Columns listed in `cols` are stored in full; every other column `b` is `δ_b`.
#[derive(Debug, Clone)]
pub struct SparseOperator<T> {
    n: usize,
    cols: Vec<(VertexId, Column<T>)>,
}

impl<T: Scalar> PartialEq for SparseOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.first_difference(other).is_none()
    }
}

impl<T: Scalar> SparseOperator<T> {
    pub fn identity(n: usize) -> Self {
        Self { n, cols: Vec::new() }
    }

    /// Builds from explicit columns; columns equal to `δ_b` are dropped.
    pub fn from_columns(n: usize, cols: impl IntoIterator<Item = (VertexId, Column<T>)>) -> Self {
        let mut cols: Vec<_> = cols
            .into_iter()
            .map(|(b, mut c)| {
                c.retain(|(_, v)| !v.is_zero());
                c.sort_by_key(|e| e.0);
                (b, c)
            })
            .filter(|(b, c)| !is_unit_column(*b, c))
            .collect();
        cols.sort_by_key(|e| e.0);
        Self { n, cols }
    }

    /// Permutation operator `δ_v ↦ δ_{perm[v]}`.
    pub fn permutation(perm: &[VertexId]) -> Self {
        let cols = perm
            .iter()
            .enumerate()
            .filter(|(v, &g)| *v != g)
            .map(|(v, &g)| (v, vec![(g, T::one())]))
            .collect();
        Self { n: perm.len(), cols }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Stored columns, sorted by column index.
    pub fn stored_columns(&self) -> &[(VertexId, Column<T>)] {
        &self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.cols.is_empty()
    }

    fn stored(&self, b: VertexId) -> Option<&Column<T>> {
        self.cols.binary_search_by_key(&b, |e| e.0).ok().map(|i| &self.cols[i].1)
    }

    /// Column `b` in full.
    pub fn column(&self, b: VertexId) -> Column<T> {
        match self.stored(b) {
            Some(c) => c.clone(),
            None => vec![(b, T::one())],
        }
    }

    /// `⟨A δ_b, δ_a⟩`.
    pub fn entry(&self, a: VertexId, b: VertexId) -> T {
        match self.stored(b) {
            Some(c) => c
                .binary_search_by_key(&a, |e| e.0)
                .map(|i| c[i].1.clone())
                .unwrap_or_else(|_| T::zero()),
            None if a == b => T::one(),
            None => T::zero(),
        }
    }

    /// Vertices outside of which the operator is the identity: stored
    /// columns and the rows they reach, sorted.
    pub fn support(&self) -> Vec<VertexId> {
        let mut s: Vec<VertexId> = self
            .cols
            .iter()
            .flat_map(|(b, c)| std::iter::once(*b).chain(c.iter().map(|e| e.0)))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Every nonzero entry `(a, b, value)` including the implicit identity
    /// on `support_cols` that are not stored.
    pub fn stored_entries(&self) -> impl Iterator<Item = (VertexId, VertexId, &T)> + '_ {
        self.cols
            .iter()
            .flat_map(|(b, c)| c.iter().map(move |(a, v)| (*a, *b, v)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.1.len()).sum::<usize>() + self.n - self.cols.len()
    }

    /// Applies the operator to a sparse vector.
    pub fn apply(&self, v: &[(VertexId, T)]) -> Column<T> {
        let mut acc: HashMap<VertexId, T> = HashMap::new();
        for (j, x) in v {
            if x.is_zero() {
                continue;
            }
            match self.stored(*j) {
                Some(col) => {
                    for (i, a) in col {
                        let t = a.times(x);
                        acc.entry(*i)
                            .and_modify(|e| *e = e.plus(&t))
                            .or_insert(t);
                    }
                }
                None => {
                    acc.entry(*j)
                        .and_modify(|e| *e = e.plus(x))
                        .or_insert_with(|| x.clone());
                }
            }
        }
        let mut out: Column<T> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut cols = Vec::with_capacity(self.cols.len() + other.cols.len());
        let (mut i, mut j) = (0, 0);
        while i < self.cols.len() || j < other.cols.len() {
            let bi = self.cols.get(i).map(|c| c.0).unwrap_or(usize::MAX);
            let bj = other.cols.get(j).map(|c| c.0).unwrap_or(usize::MAX);
            if bj <= bi {
                cols.push((bj, self.apply(&other.cols[j].1)));
                j += 1;
                if bi == bj {
                    i += 1;
                }
            } else {
                // other has δ_bi in this column
                cols.push((bi, self.cols[i].1.clone()));
                i += 1;
            }
        }
        Self::from_columns(self.n, cols)
    }

    pub fn transpose(&self) -> Self {
        self.transpose_with(|v| v.clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose_with(|v| v.conj())
    }

    fn transpose_with(&self, f: impl Fn(&T) -> T) -> Self {
        // Stored columns together with the rows they reach span a reducing
        // block; every other diagonal entry is 1.
        let support = self.support();
        let mut rows: HashMap<VertexId, Column<T>> = HashMap::new();
        for &s in &support {
            if self.stored(s).is_none() {
                rows.entry(s).or_default().push((s, T::one()));
            }
        }
        for (b, col) in &self.cols {
            for (a, v) in col {
                rows.entry(*a).or_default().push((*b, f(v)));
            }
        }
        Self::from_columns(self.n, rows)
    }

    /// `P A P⁻¹` for the permutation `δ_v ↦ δ_{perm[v]}`.
    pub fn conjugate_by(&self, perm: &[VertexId]) -> Self {
        assert_eq!(perm.len(), self.n, "dimension mismatch");
        Self::from_columns(
            self.n,
            self.cols.iter().map(|(b, col)| {
                (perm[*b], col.iter().map(|(a, v)| (perm[*a], v.clone())).collect())
            }),
        )
    }

    /// `A P` for the permutation `δ_v ↦ δ_{perm[v]}`: column `v` of the
    /// result is column `perm[v]` of `A`.
    pub fn then_permute(&self, perm: &[VertexId]) -> Self {
        assert_eq!(perm.len(), self.n, "dimension mismatch");
        Self::from_columns(
            self.n,
            (0..self.n)
                .filter(|&v| perm[v] != v || self.stored(v).is_some())
                .map(|v| (v, self.column(perm[v]))),
        )
    }

    /// First `(a, b)` where the two operators differ.
    pub fn first_difference(&self, other: &Self) -> Option<(VertexId, VertexId)> {
        let mut cols: Vec<VertexId> = self.cols.iter().map(|c| c.0).chain(other.cols.iter().map(|c| c.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        for b in cols {
            let (p, q) = (self.column(b), other.column(b));
            let (mut i, mut j) = (0, 0);
            while i < p.len() || j < q.len() {
                let ri = p.get(i).map(|e| e.0).unwrap_or(usize::MAX);
                let rj = q.get(j).map(|e| e.0).unwrap_or(usize::MAX);
                if ri == rj {
                    if p[i].1 != q[j].1 {
                        return Some((ri, b));
                    }
                    i += 1;
                    j += 1;
                } else if ri < rj {
                    return Some((ri, b));
                } else {
                    return Some((rj, b));
                }
            }
        }
        None
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseOperator<U> {
        SparseOperator::from_columns(
            self.n,
            self.cols
                .iter()
                .map(|(b, c)| (*b, c.iter().map(|(a, v)| (*a, f(v))).collect())),
        )
    }

    pub fn overflowed(&self) -> bool {
        self.cols.iter().any(|(_, c)| c.iter().any(|(_, v)| v.overflowed()))
    }

    /// Dense column-major block on `support()`, with that index list.
    pub fn dense_block(&self) -> (Vec<VertexId>, Vec<T>) {
        let support = self.support();
        let m = support.len();
        let pos = |v: VertexId| support.binary_search(&v).unwrap();
        let mut block = vec![T::zero(); m * m];
        for (j, &b) in support.iter().enumerate() {
            match self.stored(b) {
                Some(col) => {
                    for (a, v) in col {
                        block[j * m + pos(*a)] = v.clone();
                    }
                }
                None => block[j * m + j] = T::one(),
            }
        }
        (support, block)
    }
}

impl<T: Scalar + Magnitude> SparseOperator<T> {
    /// Largest entrywise `|A_ab - B_ab|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut cols: Vec<VertexId> = self.cols.iter().map(|c| c.0).chain(other.cols.iter().map(|c| c.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let mut worst = 0.0f64;
        for b in cols {
            let mut diff: HashMap<VertexId, T> = HashMap::new();
            for (a, v) in self.column(b) {
                diff.insert(a, v);
            }
            for (a, v) in other.column(b) {
                let d = match diff.remove(&a) {
                    Some(x) => x.minus(&v),
                    None => v.negated(),
                };
                worst = worst.max(d.magnitude());
            }
            for v in diff.values() {
                worst = worst.max(v.magnitude());
            }
        }
        worst
    }
}

impl SparseOperator<Complex64> {
    /// `‖A* A - I‖` in the Frobenius norm.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul(self);
        let mut sum = 0.0;
        for (b, col) in prod.stored_columns() {
            for (a, v) in col {
                let d = if a == b { v - 1.0 } else { *v };
                sum += d.norm_sqr();
            }
            if col.binary_search_by_key(b, |e| e.0).is_err() {
                sum += 1.0;
            }
        }
        sum.sqrt()
    }
}

fn is_unit_column<T: Scalar>(b: VertexId, c: &Column<T>) -> bool {
    c.len() == 1 && c[0].0 == b && c[0].1.is_one()
}
