use std::sync::Arc;

use ibig::IBig;

use crate::complex::{coboundary_eval, pullback_matrix, Backend, CochainBasis};
use crate::error::{Error, Result};
use crate::snf::{Int, SparseMatrix, SparseVec};
use crate::space::{check_close, SpaceMap};

/// Matrix of `h = Σ(-1)^i h_i^*` from cochains on `b_cod` (degree `n + 1`)
/// to cochains on `b_dom` (degree `n`), where
/// `h_i(x_0..x_n) = (f x_0, …, f x_i, g x_i, …, g x_n)`.
pub fn prism_homotopy(f: &SpaceMap, g: &SpaceMap, b_cod: &CochainBasis, b_dom: &CochainBasis) -> Result<SparseMatrix> {
    if b_cod.degree() != b_dom.degree() + 1 {
        return Err(Error::Incompatible("prism operator lowers the degree by one".into()));
    }
    if !Arc::ptr_eq(f.codomain(), b_cod.window()) || !Arc::ptr_eq(f.domain(), b_dom.window()) {
        return Err(Error::Incompatible("bases do not live on the maps' windows".into()));
    }
    let spec = f.codomain().spec();
    let k = b_cod.scale();
    let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); b_cod.len()];
    let mut tuple = Vec::with_capacity(b_cod.degree() + 1);
    for (row, sigma) in b_dom.simplices().iter().enumerate() {
        for i in 0..sigma.len() {
            tuple.clear();
            let mut pts = Vec::with_capacity(sigma.len() + 1);
            for &v in &sigma[..=i] {
                pts.push(f.image(v));
            }
            for &v in &sigma[i..] {
                pts.push(g.image(v));
            }
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    if pts[a] != pts[b] && !spec.dist(pts[a], pts[b]).is_some_and(|d| d <= k) {
                        return Err(Error::ScaleTooSmall(format!(
                            "prism tuple over {sigma:?} is not {k}-controlled"
                        )));
                    }
                }
            }
            let mut outside = false;
            for (pos, &v) in sigma.iter().enumerate() {
                if pos <= i {
                    match f.target(v) {
                        Some(t) => tuple.push(t),
                        None => outside = true,
                    }
                }
            }
            for &v in &sigma[i..] {
                match g.target(v) {
                    Some(t) => tuple.push(t),
                    None => outside = true,
                }
            }
            if outside {
                return Err(Error::WindowTooSmall(format!("prism tuple over {sigma:?} leaves the codomain window")));
            }
            if let Some((c, sign)) = b_cod.locate(&tuple) {
                let s = if i % 2 == 0 { sign } else { -sign };
                cols[c].push((row, IBig::from(s)));
            }
        }
    }
    let cols = cols.into_iter().map(SparseVec::from_pairs).collect();
    Ok(SparseMatrix::from_columns(b_dom.len(), cols))
}

/// Outcome of checking `d∘h + h∘d = g* − f*` in one degree.
#[derive(Clone, Debug)]
pub struct PrismCheck {
    pub degree: usize,
    pub domain_scale: u32,
    pub codomain_scale: u32,
    pub closeness: u32,
    pub holds: bool,
    /// Number of matrix entries where the two sides differ.
    pub mismatches: usize,
    pub lhs: SparseMatrix,
    pub rhs: SparseMatrix,
}

/// Builds every matrix of the identity in degree `n` with domain cochains on
/// `region` at scale `k` and codomain cochains on the whole codomain window
/// at scale `k_cod`, then compares both sides entrywise.
pub fn check_prism_identity(
    f: &SpaceMap,
    g: &SpaceMap,
    region: &[bool],
    k: u32,
    k_cod: u32,
    n: usize,
    backend: Backend,
) -> Result<PrismCheck> {
    let closeness = check_close(f, g)
        .ok_or_else(|| Error::NotControlled("the maps send some point to different components".into()))?;
    let dom = f.domain();
    let cod = f.codomain();
    let all = cod.full_mask();
    let cap = n + 1;
    let c_n = CochainBasis::enumerate_capped(cod, k_cod, n, &all, backend, cap)?;
    let c_up = CochainBasis::enumerate_capped(cod, k_cod, n + 1, &all, backend, cap)?;
    let d_n = CochainBasis::enumerate_capped(dom, k, n, region, backend, cap)?;

    let g_star = pullback_matrix(g, &c_n, &d_n)?;
    let f_star = pullback_matrix(f, &c_n, &d_n)?;
    let rhs = g_star.sub(&f_star);

    let h_up = prism_homotopy(f, g, &c_up, &d_n)?;
    let d_cod = coboundary_eval(&c_n, &c_up)?;
    let mut lhs = h_up.mul(&d_cod);
    if n > 0 {
        let d_low = CochainBasis::enumerate_capped(dom, k, n - 1, region, backend, cap)?;
        let h_n = prism_homotopy(f, g, &c_n, &d_low)?;
        let d_dom = coboundary_eval(&d_low, &d_n)?;
        lhs = lhs.add(&d_dom.mul(&h_n));
    }
    let diff = lhs.sub(&rhs);
    let mismatches = diff.nnz();
    Ok(PrismCheck {
        degree: n,
        domain_scale: k,
        codomain_scale: k_cod,
        closeness,
        holds: mismatches == 0,
        mismatches,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, AmbientSpec};

    #[test]
    fn identity_against_shift() {
        let w = Arc::new(make_window(&AmbientSpec::grid(1), 6, 4).unwrap());
        let id = SpaceMap::identity(w.clone());
        let s = SpaceMap::shift(w.clone(), vec![1]).unwrap();
        for n in 0..3 {
            let c = check_prism_identity(&id, &s, w.core(), 1, 2, n, Backend::Alternating).unwrap();
            assert!(c.holds, "degree {n}: {} mismatches", c.mismatches);
            let c = check_prism_identity(&id, &id, w.core(), 1, 1, n, Backend::OrderedNormalized).unwrap();
            assert!(c.holds && c.rhs.is_zero());
        }
    }

    #[test]
    fn scale_too_small_is_reported() {
        let w = Arc::new(make_window(&AmbientSpec::grid(1), 6, 4).unwrap());
        let id = SpaceMap::identity(w.clone());
        let s = SpaceMap::shift(w.clone(), vec![3]).unwrap();
        assert!(matches!(
            check_prism_identity(&id, &s, w.core(), 1, 1, 1, Backend::Alternating),
            Err(Error::ScaleTooSmall(_))
        ));
    }
}
