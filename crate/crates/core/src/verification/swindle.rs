use std::sync::Arc;

use ibig::IBig;

use crate::complex::{Backend, CochainBasis, SparseCochain};
use crate::error::{Error, Result};
use crate::snf::Int;
use crate::space::{FlasquenessWitness, Point, Window};

/// `S(φ) = Σ_{n<n0} (fⁿ)*φ` on the controlled simplices of the window,
/// together with the pointwise check `f*S(φ) + r(φ) = S(φ)`.
#[derive(Clone, Debug)]
pub struct SwindleResult {
    pub sum: SparseCochain,
    pub pulled_back: SparseCochain,
    pub restricted: SparseCochain,
    /// Number of summands needed before `φ` vanishes on every orbit.
    pub terms: usize,
    pub holds: bool,
    pub checked: usize,
}

/// Runs the swindle for `phi` at target scale `k_target`. `phi` must sit at
/// a scale covering the witness envelope and be supported in the core.
pub fn swindle_apply(
    w: &Arc<Window>,
    witness: &FlasquenessWitness,
    phi: &SparseCochain,
    k_target: u32,
) -> Result<SwindleResult> {
    let rule = witness
        .map
        .rule()
        .ok_or_else(|| Error::InvalidArgument("the witness map has no ambient rule".into()))?
        .clone();
    let envelope = witness
        .envelope_at(k_target)
        .ok_or_else(|| Error::ScaleTooSmall(format!("the witness has no control envelope at scale {k_target}")))?;
    if phi.scale < envelope {
        return Err(Error::ScaleTooSmall(format!(
            "cochain scale {} is below the iterate envelope {envelope}",
            phi.scale
        )));
    }
    let support = phi.support(w.len());
    let depth = (0..w.len()).filter(|&i| support[i]).map(|i| w.depth(i)).max();
    if (0..w.len()).any(|i| support[i] && !w.core()[i]) {
        return Err(Error::InvalidArgument("the cochain is not supported in the core".into()));
    }
    let terms = match depth {
        None => 0,
        Some(r) => witness
            .escape_time(r)
            .ok_or_else(|| Error::Verification(format!("no escape time recorded for radius {r}")))?,
    };

    let orbits: Vec<Vec<Option<usize>>> = w
        .points()
        .iter()
        .map(|p| {
            let mut q: Point = p.clone();
            let mut out = Vec::with_capacity(terms + 2);
            out.push(w.index_of(&q));
            for _ in 0..=terms {
                q = rule(&q);
                out.push(w.index_of(&q));
            }
            out
        })
        .collect();
    let value_at = |sigma: &[usize], m: usize| -> Int {
        let tuple: Option<Vec<usize>> = sigma.iter().map(|&v| orbits[v][m]).collect();
        tuple.map_or_else(|| IBig::from(0), |t| phi.eval(&t))
    };

    let basis = CochainBasis::enumerate_capped(w, k_target, phi.degree, &w.full_mask(), phi.backend, phi.degree + 1)?;
    let mut sum = SparseCochain::zero(phi.degree, k_target, phi.backend);
    let mut pulled_back = SparseCochain::zero(phi.degree, k_target, phi.backend);
    let mut restricted = SparseCochain::zero(phi.degree, k_target, phi.backend);
    let mut holds = true;
    for sigma in basis.simplices() {
        let mut s = IBig::from(0);
        let mut fs = IBig::from(0);
        for m in 0..terms {
            s += value_at(sigma, m);
            fs += value_at(sigma, m + 1);
        }
        let r = phi.eval(sigma);
        if &fs + &r != s {
            holds = false;
        }
        for (target, v) in [(&mut sum, s), (&mut pulled_back, fs), (&mut restricted, r)] {
            if v != IBig::from(0) {
                target.values.insert(sigma.clone(), v);
            }
        }
    }
    Ok(SwindleResult { sum, pulled_back, restricted, terms, holds, checked: basis.len() })
}

/// A cochain on `b` with the given coordinates.
pub fn cochain_from_values(b: &CochainBasis, values: impl IntoIterator<Item = (usize, i64)>) -> SparseCochain {
    let mut c = SparseCochain::zero(b.degree(), b.scale(), b.backend());
    for (i, v) in values {
        if v != 0 {
            c.values.insert(b.simplex(i).clone(), IBig::from(v));
        }
    }
    c
}

/// Degree-0 indicator cochain of one window point.
pub fn delta(w: &Window, p: &[i64], scale: u32, backend: Backend) -> Result<SparseCochain> {
    let i = w.index_of(p).ok_or_else(|| Error::UnknownPoint(format!("{p:?}")))?;
    let mut c = SparseCochain::zero(0, scale, backend);
    c.values.insert(vec![i], IBig::from(1));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{certify_flasqueness, make_window, AmbientSpec, SpaceMap};

    fn ray() -> (Arc<Window>, FlasquenessWitness) {
        let w = Arc::new(make_window(&AmbientSpec::Halfline, 8, 4).unwrap());
        let f = SpaceMap::shift(w.clone(), vec![1]).unwrap();
        let wit = certify_flasqueness(&w, &f).unwrap();
        (w, wit)
    }

    fn indicator(w: &Window, c: &SparseCochain) -> Vec<i64> {
        let mut out: Vec<(i64, i64)> = c
            .values
            .iter()
            .map(|(s, v)| (w.point(s[0])[0], i64::try_from(v.clone()).unwrap()))
            .collect();
        out.sort();
        out.into_iter().map(|(x, v)| x * 10 + v).collect()
    }

    #[test]
    fn delta_five_sums_to_interval() {
        let (w, wit) = ray();
        let phi = delta(&w, &[5], 1, Backend::Alternating).unwrap();
        let r = swindle_apply(&w, &wit, &phi, 1).unwrap();
        assert!(r.holds);
        let expect: Vec<i64> = (0..=5).map(|x| x * 10 + 1).collect();
        assert_eq!(indicator(&w, &r.sum), expect);
        let expect: Vec<i64> = (0..=4).map(|x| x * 10 + 1).collect();
        assert_eq!(indicator(&w, &r.pulled_back), expect);
    }

    #[test]
    fn delta_zero_and_zero_cochain() {
        let (w, wit) = ray();
        let phi = delta(&w, &[0], 1, Backend::Alternating).unwrap();
        let r = swindle_apply(&w, &wit, &phi, 1).unwrap();
        assert!(r.holds && r.pulled_back.is_zero());
        assert_eq!(r.sum, r.restricted);
        let r = swindle_apply(&w, &wit, &SparseCochain::zero(1, 1, Backend::Alternating), 1).unwrap();
        assert!(r.holds && r.sum.is_zero());
    }
}
