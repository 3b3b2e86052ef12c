use std::collections::BTreeMap;

use ibig::IBig;
use num_traits::Zero;

use super::Int;

/// Sparse integer vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Int)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Int)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Int> = BTreeMap::new();
        for (i, v) in pairs {
            *acc.entry(i).or_default() += v;
        }
        Self::from_map(acc)
    }

    pub fn from_map(map: BTreeMap<usize, Int>) -> Self {
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Int]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, IBig::from(1))] }
    }

    pub fn entries(&self) -> &[(usize, Int)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Int)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn lead(&self) -> Option<(usize, &Int)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, i: usize) -> Int {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => IBig::from(0),
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Int> {
        let mut out = vec![IBig::from(0); dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn to_map(&self) -> BTreeMap<usize, Int> {
        self.entries.iter().cloned().collect()
    }

    pub fn scale(&self, c: &Int) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &Int, other: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = other.entries.get(b).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(self.entries[a].clone());
                a += 1;
            } else if ib < ia {
                out.push((ib, c * &other.entries[b].1));
                b += 1;
            } else {
                let v = &self.entries[a].1 + c * &other.entries[b].1;
                if !v.is_zero() {
                    out.push((ia, v));
                }
                a += 1;
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&IBig::from(1), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&IBig::from(-1), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Int {
        let mut acc = IBig::from(0);
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, ib) = (self.entries[a].0, other.entries[b].0);
            if ia < ib {
                a += 1;
            } else if ib < ia {
                b += 1;
            } else {
                acc += &self.entries[a].1 * &other.entries[b].1;
                a += 1;
                b += 1;
            }
        }
        acc
    }

    /// Reindexes entries through `map`, dropping entries mapped to `None`.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))),
        )
    }
}

/// Column-major sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.max_index().map_or(true, |m| m < nrows)));
        SparseMatrix { nrows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|j| SparseVec::from_pairs((0..nrows).map(|i| (i, IBig::from(rows[i][j])))))
            .collect();
        SparseMatrix { nrows, cols }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { nrows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Int {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Int> = BTreeMap::new();
        for (j, xj) in x.iter() {
            for (i, a) in self.cols[j].iter() {
                *acc.entry(i).or_default() += a * xj;
            }
        }
        SparseVec::from_map(acc)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows(), "matrix product dimension mismatch");
        SparseMatrix {
            nrows: self.nrows,
            cols: other.cols.iter().map(|c| self.mul_vec(c)).collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<Vec<(usize, Int)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.iter() {
                rows[i].push((j, v.clone()));
            }
        }
        SparseMatrix {
            nrows: self.cols.len(),
            cols: rows.into_iter().map(SparseVec::from_pairs).collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        SparseMatrix {
            nrows: self.nrows,
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        SparseMatrix {
            nrows: self.nrows,
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![IBig::from(0); self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.iter() {
                out[i][j] = v.clone();
            }
        }
        out
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> SparseMatrix {
        SparseMatrix { nrows: self.nrows, cols: keep.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    pub fn max_abs_entry(&self) -> Int {
        use ibig::ops::Abs;
        self.cols
            .iter()
            .flat_map(|c| c.iter().map(|(_, v)| v.abs()))
            .max()
            .unwrap_or_default()
    }
}
