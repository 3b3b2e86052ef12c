//! Incremental echelon bases of integer lattices.
//!
//! Every basis vector has a distinct leading (smallest) index. Insertion keeps
//! the lattice spanned by everything inserted so far, using extended gcd steps
//! when a leading coefficient does not divide the incoming one. With tracking
//! enabled each basis vector carries its expression in the inserted inputs,
//! which yields integer kernels as a by-product.

use std::collections::{BTreeMap, HashMap};
use std::ops::Bound;

use ibig::ops::{Abs, DivRemEuclid};
use ibig::IBig;
use num_traits::Zero;

use super::{Int, SparseVec};

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    aux: SparseVec,
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivot_of: HashMap<usize, usize>,
}

/// Outcome of inserting a vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// The lattice grew; index of the affected basis row.
    Added(usize),
    /// The vector was already in the rational span; carries the integer
    /// relation among inputs that reduced it to zero.
    Dependent(SparseVec),
}

fn axpy_map(work: &mut BTreeMap<usize, Int>, c: &Int, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (i, x) in v.iter() {
        let e = work.entry(i).or_default();
        *e += c * x;
        if e.is_zero() {
            work.remove(&i);
        }
    }
}

fn is_unit(x: &Int) -> bool {
    x.abs() == IBig::from(1)
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Self {
        let mut e = Echelon::new();
        for v in vs {
            e.insert(v.clone(), SparseVec::new());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.iter().map(|r| &r.vec)
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i].vec
    }

    pub fn aux(&self, i: usize) -> &SparseVec {
        &self.rows[i].aux
    }

    pub fn pivot(&self, i: usize) -> usize {
        self.rows[i].vec.lead().expect("basis rows are nonzero").0
    }

    pub fn lead_value(&self, i: usize) -> &Int {
        self.rows[i].vec.lead().expect("basis rows are nonzero").1
    }

    pub fn row_at_pivot(&self, p: usize) -> Option<usize> {
        self.pivot_of.get(&p).copied()
    }

    pub fn is_unit_row(&self, i: usize) -> bool {
        is_unit(self.lead_value(i))
    }

    /// True when every leading coefficient is ±1.
    pub fn all_units(&self) -> bool {
        (0..self.rows.len()).all(|i| self.is_unit_row(i))
    }

    pub fn insert(&mut self, v: SparseVec, aux: SparseVec) -> Insert {
        let mut w = v.to_map();
        let mut a = aux.to_map();
        loop {
            let Some((&p, c)) = w.iter().next() else {
                return Insert::Dependent(SparseVec::from_map(a));
            };
            let c = c.clone();
            let Some(&ri) = self.pivot_of.get(&p) else {
                let idx = self.rows.len();
                self.rows.push(Row { vec: SparseVec::from_map(w), aux: SparseVec::from_map(a) });
                self.pivot_of.insert(p, idx);
                return Insert::Added(idx);
            };
            let lead = self.rows[ri].vec.lead().unwrap().1.clone();
            let (q, r) = (&c).div_rem_euclid(&lead);
            if r.is_zero() {
                let neg = -q;
                axpy_map(&mut w, &neg, &self.rows[ri].vec);
                axpy_map(&mut a, &neg, &self.rows[ri].aux);
                continue;
            }
            // gcd step: new row = s*row + t*w (lead g), w' = (lead/g) w - (c/g) row
            let (g, s, t) = lead.extended_gcd(&c);
            let wv = SparseVec::from_map(std::mem::take(&mut w));
            let av = SparseVec::from_map(std::mem::take(&mut a));
            let row = &self.rows[ri];
            let new_vec = row.vec.scale(&s).axpy(&t, &wv);
            let new_aux = row.aux.scale(&s).axpy(&t, &av);
            let lg = &lead / &g;
            let cg = &c / &g;
            let rest_vec = wv.scale(&lg).axpy(&-cg.clone(), &row.vec);
            let rest_aux = av.scale(&lg).axpy(&-cg, &row.aux);
            self.rows[ri] = Row { vec: new_vec, aux: new_aux };
            w = rest_vec.to_map();
            a = rest_aux.to_map();
        }
    }

    /// Canonical representative of `v` modulo the lattice: at each pivot the
    /// coordinate is reduced into `[0, |lead|)`.
    pub fn reduce_canonical(&self, v: &SparseVec) -> SparseVec {
        let mut w = v.to_map();
        let mut cursor: Option<usize> = None;
        loop {
            let next = match cursor {
                None => w.iter().next().map(|(k, x)| (*k, x.clone())),
                Some(p) => w.range((Bound::Excluded(p), Bound::Unbounded)).next().map(|(k, x)| (*k, x.clone())),
            };
            let Some((p, c)) = next else { break };
            if let Some(&ri) = self.pivot_of.get(&p) {
                let lead = self.rows[ri].vec.lead().unwrap().1.clone();
                let m = (&lead).abs();
                let (_, r) = (&c).div_rem_euclid(&m);
                let q = (&c - &r) / &lead;
                axpy_map(&mut w, &-q, &self.rows[ri].vec);
            }
            cursor = Some(p);
        }
        SparseVec::from_map(w)
    }

    /// Eliminates every coordinate sitting at a unit pivot. Linear in `v`.
    pub fn reduce_units(&self, v: &SparseVec) -> SparseVec {
        let mut w = v.to_map();
        let mut cursor: Option<usize> = None;
        loop {
            let next = match cursor {
                None => w.iter().next().map(|(k, x)| (*k, x.clone())),
                Some(p) => w.range((Bound::Excluded(p), Bound::Unbounded)).next().map(|(k, x)| (*k, x.clone())),
            };
            let Some((p, c)) = next else { break };
            if let Some(&ri) = self.pivot_of.get(&p) {
                let lead = self.rows[ri].vec.lead().unwrap().1;
                if is_unit(lead) {
                    let q = &c * lead;
                    axpy_map(&mut w, &-q, &self.rows[ri].vec);
                }
            }
            cursor = Some(p);
        }
        SparseVec::from_map(w)
    }

    /// Expresses `v` as an integer combination of basis rows, or `None` when
    /// `v` is not in the lattice. Returned vector is indexed by row.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut w = v.to_map();
        let mut coeffs: BTreeMap<usize, Int> = BTreeMap::new();
        while let Some((&p, c)) = w.iter().next() {
            let ri = *self.pivot_of.get(&p)?;
            let lead = self.rows[ri].vec.lead().unwrap().1;
            let (q, r) = c.div_rem_euclid(lead);
            if !r.is_zero() {
                return None;
            }
            axpy_map(&mut w, &-q.clone(), &self.rows[ri].vec);
            *coeffs.entry(ri).or_default() += q;
        }
        Some(SparseVec::from_map(coeffs))
    }

    /// Like [`Echelon::solve`], but returns the combination of tracked inputs.
    pub fn solve_tracked(&self, v: &SparseVec) -> Option<SparseVec> {
        let coeffs = self.solve(v)?;
        let mut acc = SparseVec::new();
        for (ri, c) in coeffs.iter() {
            acc = acc.axpy(c, &self.rows[ri].aux);
        }
        Some(acc)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.solve(v).is_some()
    }
}

/// Integer basis of `{x : M x = 0}` for the matrix with the given columns.
pub fn kernel_basis(cols: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    let mut kernel = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        if let Insert::Dependent(rel) = e.insert(c.clone(), SparseVec::unit(j)) {
            kernel.push(rel);
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| IBig::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn gcd_step_keeps_lattice() {
        let mut e = Echelon::new();
        e.insert(sv(&[4, 1]), SparseVec::new());
        e.insert(sv(&[6, 0]), SparseVec::new());
        // lattice spanned by (4,1),(6,0) has index |det| = 6
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&sv(&[4, 1])));
        assert!(e.contains(&sv(&[6, 0])));
        assert!(e.contains(&sv(&[2, 2])));
        assert!(!e.contains(&sv(&[1, 0])));
        assert!(!e.contains(&sv(&[0, 1])));
    }

    #[test]
    fn kernel_of_rank_one() {
        let cols = vec![sv(&[1, 2]), sv(&[2, 4]), sv(&[3, 6])];
        let k = kernel_basis(&cols);
        assert_eq!(k.len(), 2);
        for x in &k {
            let mut acc = SparseVec::new();
            for (j, c) in x.iter() {
                acc = acc.axpy(c, &cols[j]);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn canonical_remainder_is_coset_invariant() {
        let e = Echelon::from_vectors(&[sv(&[3, 1, 0]), sv(&[0, 2, 5])]);
        let v = sv(&[7, -4, 2]);
        let shifted = v.axpy(&IBig::from(5), &sv(&[3, 1, 0])).axpy(&IBig::from(-2), &sv(&[0, 2, 5]));
        assert_eq!(e.reduce_canonical(&v), e.reduce_canonical(&shifted));
    }
}
