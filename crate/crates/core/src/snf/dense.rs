use ibig::ops::Abs;
use ibig::IBig;
use num_traits::Zero;

use super::{Int, SparseMatrix, SparseVec};

/// Row-major dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Int>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![IBig::from(0); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = IBig::from(1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = IBig::from(x);
            }
        }
        m
    }

    pub fn from_sparse(m: &SparseMatrix) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for (i, v) in m.col(j).iter() {
                out[(i, j)] = v.clone();
            }
        }
        out
    }

    pub fn from_columns(nrows: usize, cols: &[SparseVec]) -> Self {
        let mut out = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter() {
                out[(i, j)] = v.clone();
            }
        }
        out
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.nrows, (0..self.ncols).map(|j| self.column(j)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> SparseVec {
        SparseVec::from_pairs((0..self.nrows).map(|i| (i, self[(i, j)].clone())))
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix product dimension mismatch");
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(self.ncols, x.len());
        (0..self.nrows)
            .map(|i| (0..self.ncols).fold(Int::from(0), |acc, j| acc + &self[(i, j)] * &x[j]))
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.nrows).all(|i| (0..self.ncols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.ncols {
                self.data.swap(a * self.ncols + j, b * self.ncols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.nrows {
                self.data.swap(i * self.ncols + a, i * self.ncols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &Int) {
        for j in 0..self.ncols {
            let v = &self[(src, j)] * c;
            if !v.is_zero() {
                self[(dst, j)] += v;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &Int) {
        for i in 0..self.nrows {
            let v = &self[(i, src)] * c;
            if !v.is_zero() {
                self[(i, dst)] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.ncols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.nrows {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return IBig::from(1);
        }
        let mut a = self.clone();
        let mut sign = IBig::from(1);
        let mut prev = IBig::from(1);
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return IBig::from(0);
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.ncols + j]
    }
}

/// `u · m · v = d` with `d` diagonal, nonnegative, and each diagonal entry
/// dividing the next. `u_inv` is the inverse of `u`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: DenseMatrix,
    pub u_inv: DenseMatrix,
    pub v: DenseMatrix,
    pub d: DenseMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.nrows.min(self.d.ncols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Re-multiplies and checks the defining identities.
    pub fn verify(&self, m: &DenseMatrix) -> bool {
        let diag = self.diagonal();
        let chain = diag.windows(2).all(|w| {
            if w[1].is_zero() {
                true
            } else {
                !w[0].is_zero() && (&w[1] % &w[0]).is_zero()
            }
        });
        self.u.mul(m).mul(&self.v) == self.d
            && self.d.is_diagonal()
            && diag.iter().all(|x| *x >= IBig::from(0))
            && chain
            && self.u.mul(&self.u_inv) == DenseMatrix::identity(self.u.nrows)
            && self.u.determinant().abs() == IBig::from(1)
            && self.v.determinant().abs() == IBig::from(1)
    }
}

/// Smith normal form with a deterministic pivot rule: smallest absolute
/// value, ties broken by the fewest nonzeros in the pivot's row and column,
/// then by position.
pub fn smith_normal_form(m: &DenseMatrix) -> SnfResult {
    let (r, c) = (m.nrows, m.ncols);
    let mut a = m.clone();
    let mut u = DenseMatrix::identity(r);
    let mut u_inv = DenseMatrix::identity(r);
    let mut v = DenseMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = choose_pivot(&a, t) else {
                return SnfResult { u, u_inv, v, d: a };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = &a[(i, t)] / &a[(t, t)];
                if !q.is_zero() {
                    let nq = -&q;
                    a.add_row(i, t, &nq);
                    u.add_row(i, t, &nq);
                    u_inv.add_col(t, i, &q);
                }
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = &a[(t, j)] / &a[(t, t)];
                if !q.is_zero() {
                    let nq = -&q;
                    a.add_col(j, t, &nq);
                    v.add_col(j, t, &nq);
                }
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = a[(t, t)].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(&a[(i, j)] % &piv).is_zero()));
            if let Some(i) = bad {
                let one = IBig::from(1);
                a.add_row(t, i, &one);
                u.add_row(t, i, &one);
                u_inv.add_col(i, t, &IBig::from(-1));
                continue;
            }
            break;
        }
        if a[(t, t)] < IBig::from(0) {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SnfResult { u, u_inv, v, d: a }
}

fn choose_pivot(a: &DenseMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(Int, usize, usize, usize)> = None;
    for i in t..a.nrows {
        for j in t..a.ncols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let mag = x.abs();
            let better = match &best {
                None => true,
                Some((bm, ..)) if mag < *bm => true,
                Some((bm, bcount, ..)) if mag == *bm => {
                    let count = line_count(a, t, i, j);
                    count < *bcount
                }
                _ => false,
            };
            if better {
                let count = line_count(a, t, i, j);
                best = Some((mag, count, i, j));
            }
        }
    }
    best.map(|(_, _, i, j)| (i, j))
}

fn line_count(a: &DenseMatrix, t: usize, i: usize, j: usize) -> usize {
    let row = (t..a.ncols).filter(|&jj| !a[(i, jj)].is_zero()).count();
    let col = (t..a.nrows).filter(|&ii| !a[(ii, j)].is_zero()).count();
    row + col
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_2_3_becomes_1_6() {
        let m = DenseMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m);
        assert!(s.verify(&m));
        assert_eq!(s.diagonal(), vec![IBig::from(1), IBig::from(6)]);
    }

    #[test]
    fn zero_and_identity() {
        let z = DenseMatrix::zeros(3, 2);
        let s = smith_normal_form(&z);
        assert!(s.verify(&z));
        assert_eq!(s.u, DenseMatrix::identity(3));
        assert_eq!(s.v, DenseMatrix::identity(2));
        assert_eq!(s.d, z);

        let id = DenseMatrix::identity(4);
        let s = smith_normal_form(&id);
        assert!(s.verify(&id));
        assert_eq!(s.d, id);
    }

    #[test]
    fn bareiss_determinant() {
        let m = DenseMatrix::from_rows(&[vec![2, -1, 0], vec![1, 3, 2], vec![0, 5, 1]]);
        // 2*(3-10) - (-1)*(1-0) + 0 = -14 + 1 = -13
        assert_eq!(m.determinant(), IBig::from(-13));
        let sing = DenseMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(sing.determinant(), IBig::from(0));
    }

    #[test]
    fn non_square_with_torsion() {
        let m = DenseMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert!(s.verify(&m));
        assert_eq!(s.diagonal(), vec![IBig::from(2), IBig::from(6), IBig::from(12)]);
    }
}
