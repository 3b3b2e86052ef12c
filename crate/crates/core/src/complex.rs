//! Controlled simplices and the integer cochain complexes built on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ibig::IBig;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::{Echelon, Int, SparseMatrix, SparseVec};
use crate::space::{mask_subset, SpaceMap, Window};

pub const DEFAULT_DEGREE_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Tuples without consecutive repeats; cochains vanish on degenerate tuples.
    OrderedNormalized,
    /// Strictly increasing vertex lists; cochains are alternating.
    Alternating,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::OrderedNormalized => "ordered",
            Backend::Alternating => "alternating",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "ordered" | "ordered_normalized" => Ok(Backend::OrderedNormalized),
            "alternating" => Ok(Backend::Alternating),
            _ => Err(Error::InvalidArgument(format!("unknown backend {s:?}"))),
        }
    }
}

/// Vertex tuple, as indices into a window.
pub type Simplex = Vec<usize>;

/// Brings an arbitrary tuple to the basis form of `backend`: returns the
/// basis simplex and the sign of the cochain value, or `None` when every
/// cochain vanishes on the tuple.
pub fn canonical(backend: Backend, tuple: &[usize]) -> Option<(Simplex, i32)> {
    match backend {
        Backend::OrderedNormalized => {
            if tuple.windows(2).any(|p| p[0] == p[1]) {
                None
            } else {
                Some((tuple.to_vec(), 1))
            }
        }
        Backend::Alternating => {
            let mut s = tuple.to_vec();
            let mut sign = 1;
            for i in 1..s.len() {
                let mut j = i;
                while j > 0 && s[j - 1] > s[j] {
                    s.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            if s.windows(2).any(|p| p[0] == p[1]) {
                None
            } else {
                Some((s, sign))
            }
        }
    }
}

/// Ordered list of the `k`-controlled simplices of one degree inside a region.
#[derive(Clone, Debug)]
pub struct CochainBasis {
    window: Arc<Window>,
    degree: usize,
    scale: u32,
    backend: Backend,
    region: Vec<bool>,
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
}

fn extend_simplices(
    w: &Window,
    k: u32,
    backend: Backend,
    region: &[bool],
    adj: &[Vec<usize>],
    prefix: &mut Vec<usize>,
    len: usize,
    out: &mut Vec<Simplex>,
) {
    if prefix.len() == len {
        out.push(prefix.clone());
        return;
    }
    let first = prefix[0];
    let last = *prefix.last().unwrap();
    for &c in &adj[first] {
        let ok = match backend {
            Backend::Alternating => c > last,
            Backend::OrderedNormalized => c != last,
        };
        if ok && region[c] && prefix.iter().all(|&p| w.within(p, c, k)) {
            prefix.push(c);
            extend_simplices(w, k, backend, region, adj, prefix, len, out);
            prefix.pop();
        }
    }
}

impl CochainBasis {
    pub fn enumerate(w: &Arc<Window>, k: u32, n: usize, region: &[bool], backend: Backend) -> Result<CochainBasis> {
        Self::enumerate_capped(w, k, n, region, backend, DEFAULT_DEGREE_CAP)
    }

    pub fn enumerate_capped(
        w: &Arc<Window>,
        k: u32,
        n: usize,
        region: &[bool],
        backend: Backend,
        cap: usize,
    ) -> Result<CochainBasis> {
        if n > cap {
            return Err(Error::DegreeCap { degree: n, cap });
        }
        if region.len() != w.len() {
            return Err(Error::Dimension(format!("region mask of length {} for {} points", region.len(), w.len())));
        }
        let adj = w.neighbors(k, region);
        let simplices: Vec<Simplex> = (0..w.len())
            .into_par_iter()
            .filter(|&v| region[v])
            .map(|v| {
                let mut out = Vec::new();
                let mut prefix = vec![v];
                extend_simplices(w, k, backend, region, &adj, &mut prefix, n + 1, &mut out);
                out
            })
            .flatten_iter()
            .collect();
        Ok(Self::from_simplices(w.clone(), n, k, backend, region.to_vec(), simplices))
    }

    fn from_simplices(
        window: Arc<Window>,
        degree: usize,
        scale: u32,
        backend: Backend,
        region: Vec<bool>,
        simplices: Vec<Simplex>,
    ) -> CochainBasis {
        let index = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        CochainBasis { window, degree, scale, backend, region, simplices, index }
    }

    /// Keeps the simplices satisfying `keep`, preserving order.
    pub fn filter(&self, keep: impl Fn(&[usize]) -> bool) -> CochainBasis {
        let simplices = self.simplices.iter().filter(|s| keep(s)).cloned().collect();
        Self::from_simplices(self.window.clone(), self.degree, self.scale, self.backend, self.region.clone(), simplices)
    }

    /// Reorders the basis: simplices with `first(s)` true come first, each
    /// group keeping its order.
    pub fn partitioned(&self, first: impl Fn(&[usize]) -> bool) -> CochainBasis {
        let (mut a, b): (Vec<Simplex>, Vec<Simplex>) = self.simplices.iter().cloned().partition(|s| first(s));
        a.extend(b);
        Self::from_simplices(self.window.clone(), self.degree, self.scale, self.backend, self.region.clone(), a)
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn region(&self) -> &[bool] {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Basis index and sign for an arbitrary tuple (see [`canonical`]).
    pub fn locate(&self, tuple: &[usize]) -> Option<(usize, i32)> {
        let (s, sign) = canonical(self.backend, tuple)?;
        self.index_of(&s).map(|i| (i, sign))
    }
}

/// Free-function form of [`CochainBasis::enumerate`].
pub fn enumerate_controlled_simplices(
    w: &Arc<Window>,
    k: u32,
    n: usize,
    region: &[bool],
    backend: Backend,
) -> Result<CochainBasis> {
    CochainBasis::enumerate(w, k, n, region, backend)
}

/// Controlled simplices in `region` not contained in `y`: a basis of the
/// cochains vanishing on `y`.
pub fn relative_basis(
    w: &Arc<Window>,
    k: u32,
    n: usize,
    region: &[bool],
    y: &[bool],
    backend: Backend,
) -> Result<CochainBasis> {
    Ok(CochainBasis::enumerate(w, k, n, region, backend)?.filter(|s| !s.iter().all(|&v| y[v])))
}

fn check_compatible(b_n: &CochainBasis, b_next: &CochainBasis) -> Result<()> {
    if !Arc::ptr_eq(&b_n.window, &b_next.window) {
        return Err(Error::Incompatible("bases live on different windows".into()));
    }
    if b_n.backend != b_next.backend || b_n.scale != b_next.scale {
        return Err(Error::Incompatible("bases differ in backend or scale".into()));
    }
    if b_next.degree != b_n.degree + 1 {
        return Err(Error::Incompatible(format!("degrees {} and {}", b_n.degree, b_next.degree)));
    }
    Ok(())
}

/// Matrix of `d = Σ(-1)^i d_i` from cochains on `b_n` (extended by zero) to
/// their values on the simplices of `b_next`, with no completeness check.
pub fn coboundary_eval(b_n: &CochainBasis, b_next: &CochainBasis) -> Result<SparseMatrix> {
    check_compatible(b_n, b_next)?;
    let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); b_n.len()];
    let mut face = Vec::with_capacity(b_next.degree + 1);
    for (row, tau) in b_next.simplices.iter().enumerate() {
        for i in 0..tau.len() {
            face.clear();
            face.extend(tau.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            if let Some((c, sign)) = b_n.locate(&face) {
                let s = if i % 2 == 0 { sign } else { -sign };
                cols[c].push((row, IBig::from(s)));
            }
        }
    }
    let cols = cols.into_iter().map(SparseVec::from_pairs).collect();
    Ok(SparseMatrix::from_columns(b_next.len(), cols))
}

/// Matrix of the coboundary, requiring `b_next` to cover every coface of
/// the simplices of `b_n` that lies in the window.
pub fn coboundary_matrix(b_n: &CochainBasis, b_next: &CochainBasis) -> Result<SparseMatrix> {
    check_compatible(b_n, b_next)?;
    let need = b_n.window.thicken(&b_n.region, b_n.scale);
    if !mask_subset(&need, &b_next.region) {
        let missing = (0..need.len()).filter(|&i| need[i] && !b_next.region[i]).count();
        return Err(Error::WindowTooSmall(format!(
            "the target region must contain the {}-thickening of the source region ({missing} points missing)",
            b_n.scale
        )));
    }
    coboundary_eval(b_n, b_next)
}

/// Matrix of the pullback `m*` from cochains on `b_cod` to cochains on
/// `b_dom`. Images outside the codomain basis count as zero; uncontrolled
/// images are an error.
pub fn pullback_matrix(m: &SpaceMap, b_cod: &CochainBasis, b_dom: &CochainBasis) -> Result<SparseMatrix> {
    if !Arc::ptr_eq(m.domain(), &b_dom.window) || !Arc::ptr_eq(m.codomain(), &b_cod.window) {
        return Err(Error::Incompatible("map and bases live on different windows".into()));
    }
    if b_cod.degree != b_dom.degree || b_cod.backend != b_dom.backend {
        return Err(Error::Incompatible("pullback between different degrees or backends".into()));
    }
    let spec = m.codomain().spec();
    let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); b_cod.len()];
    for (row, sigma) in b_dom.simplices.iter().enumerate() {
        let pts: Vec<_> = sigma.iter().map(|&v| m.image(v)).collect();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                if pts[a] != pts[b] && !spec.dist(pts[a], pts[b]).is_some_and(|d| d <= b_cod.scale) {
                    return Err(Error::ScaleTooSmall(format!(
                        "image of {sigma:?} is not {}-controlled",
                        b_cod.scale
                    )));
                }
            }
        }
        let Some(tuple) = sigma.iter().map(|&v| m.target(v)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if let Some((c, sign)) = b_cod.locate(&tuple) {
            cols[c].push((row, IBig::from(sign)));
        }
    }
    let cols = cols.into_iter().map(SparseVec::from_pairs).collect();
    Ok(SparseMatrix::from_columns(b_dom.len(), cols))
}

/// Restriction from a coarser scale to a finer one on the same region:
/// forgets the simplices that are not controlled at the smaller scale.
pub fn restriction_matrix(b_big: &CochainBasis, b_small: &CochainBasis) -> Result<SparseMatrix> {
    if b_small.scale > b_big.scale || b_small.degree != b_big.degree || b_small.backend != b_big.backend {
        return Err(Error::Incompatible("restriction needs a smaller scale in the same degree".into()));
    }
    let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); b_big.len()];
    for (row, s) in b_small.simplices.iter().enumerate() {
        match b_big.index_of(s) {
            Some(c) => cols[c].push((row, IBig::from(1))),
            None => return Err(Error::Incompatible(format!("{s:?} missing from the larger-scale basis"))),
        }
    }
    let cols = cols.into_iter().map(SparseVec::from_pairs).collect();
    Ok(SparseMatrix::from_columns(b_small.len(), cols))
}

/// Surjectivity of an integer matrix: the column lattice is all of `Z^rows`.
pub fn is_surjective(m: &SparseMatrix) -> bool {
    let e = Echelon::from_vectors(m.columns());
    e.rank() == m.nrows() && e.all_units()
}

/// A finitely supported cochain keyed by simplices of one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseCochain {
    pub degree: usize,
    pub scale: u32,
    pub backend: Backend,
    pub values: BTreeMap<Simplex, Int>,
}

impl SparseCochain {
    pub fn zero(degree: usize, scale: u32, backend: Backend) -> Self {
        SparseCochain { degree, scale, backend, values: BTreeMap::new() }
    }

    pub fn from_basis(b: &CochainBasis, v: &SparseVec) -> Self {
        SparseCochain {
            degree: b.degree,
            scale: b.scale,
            backend: b.backend,
            values: v.iter().map(|(i, c)| (b.simplices[i].clone(), c.clone())).collect(),
        }
    }

    /// Coordinates on `b`; fails when the support leaves the basis.
    pub fn to_basis(&self, b: &CochainBasis) -> Result<SparseVec> {
        let mut pairs = Vec::with_capacity(self.values.len());
        for (s, c) in &self.values {
            let i = b
                .index_of(s)
                .ok_or_else(|| Error::Incompatible(format!("simplex {s:?} is not in the basis")))?;
            pairs.push((i, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    /// Value on an arbitrary tuple.
    pub fn eval(&self, tuple: &[usize]) -> Int {
        match canonical(self.backend, tuple) {
            Some((s, sign)) => self.values.get(&s).map_or_else(|| IBig::from(0), |c| c * IBig::from(sign)),
            None => IBig::from(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|c| c.is_zero())
    }

    /// Points carrying a nonzero value.
    pub fn support(&self, npoints: usize) -> Vec<bool> {
        let mut mask = vec![false; npoints];
        for (s, c) in &self.values {
            if !c.is_zero() {
                for &v in s {
                    mask[v] = true;
                }
            }
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, AmbientSpec};

    fn line(core: u32, pad: u32) -> Arc<Window> {
        Arc::new(make_window(&AmbientSpec::grid(1), core, pad).unwrap())
    }

    #[test]
    fn point_counts() {
        let w = Arc::new(make_window(&AmbientSpec::point(), 0, 0).unwrap());
        let all = w.full_mask();
        for b in [Backend::OrderedNormalized, Backend::Alternating] {
            assert_eq!(CochainBasis::enumerate(&w, 3, 0, &all, b).unwrap().len(), 1);
            assert_eq!(CochainBasis::enumerate(&w, 3, 2, &all, b).unwrap().len(), 0);
        }
    }

    #[test]
    fn edges_of_short_interval() {
        let w = line(2, 0);
        let all = w.full_mask();
        assert_eq!(CochainBasis::enumerate(&w, 1, 1, &all, Backend::Alternating).unwrap().len(), 4);
        assert_eq!(CochainBasis::enumerate(&w, 1, 1, &all, Backend::OrderedNormalized).unwrap().len(), 8);
        assert_eq!(CochainBasis::enumerate(&w, 1, 2, &all, Backend::Alternating).unwrap().len(), 0);
        assert!(matches!(
            CochainBasis::enumerate(&w, 1, 4, &all, Backend::Alternating),
            Err(Error::DegreeCap { degree: 4, cap: 3 })
        ));
    }

    #[test]
    fn two_point_coboundary() {
        let w = Arc::new(make_window(&AmbientSpec::finite(vec![vec![0, 1], vec![1, 0]]), 1, 0).unwrap());
        let all = w.full_mask();
        let b0 = CochainBasis::enumerate(&w, 1, 0, &all, Backend::Alternating).unwrap();
        let b1 = CochainBasis::enumerate(&w, 1, 1, &all, Backend::Alternating).unwrap();
        let d = coboundary_matrix(&b0, &b1).unwrap();
        assert_eq!(d, SparseMatrix::from_dense(&[vec![-1, 1]]));
        let e0 = CochainBasis::enumerate(&w, 0, 0, &all, Backend::Alternating).unwrap();
        let e1 = CochainBasis::enumerate(&w, 0, 1, &all, Backend::Alternating).unwrap();
        assert!(coboundary_matrix(&e0, &e1).unwrap().is_zero());
    }

    #[test]
    fn relative_edges() {
        let w = line(3, 0);
        let all = w.full_mask();
        let y = w.mask(|p| p[0] >= 0);
        let b = relative_basis(&w, 1, 1, &all, &y, Backend::Alternating).unwrap();
        let named: Vec<Vec<i64>> = b.simplices().iter().map(|s| s.iter().map(|&v| w.point(v)[0]).collect()).collect();
        assert_eq!(named, vec![vec![-3, -2], vec![-2, -1], vec![-1, 0]]);
        assert!(relative_basis(&w, 1, 1, &all, &all, Backend::Alternating).unwrap().is_empty());
    }

    #[test]
    fn padding_is_enforced() {
        let w = line(3, 2);
        let core = w.core().to_vec();
        let b0 = CochainBasis::enumerate(&w, 1, 0, &core, Backend::Alternating).unwrap();
        let b1 = CochainBasis::enumerate(&w, 1, 1, &core, Backend::Alternating).unwrap();
        assert!(matches!(coboundary_matrix(&b0, &b1), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn canonical_signs() {
        assert_eq!(canonical(Backend::Alternating, &[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(canonical(Backend::Alternating, &[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(canonical(Backend::Alternating, &[1, 0, 1]), None);
        assert_eq!(canonical(Backend::OrderedNormalized, &[1, 0, 1]), Some((vec![1, 0, 1], 1)));
        assert_eq!(canonical(Backend::OrderedNormalized, &[1, 1]), None);
    }
}
