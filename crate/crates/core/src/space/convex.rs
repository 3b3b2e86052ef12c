use std::collections::VecDeque;

use super::window::{mask_and, mask_or, mask_subset, Window};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Convexity {
    /// `kappa[n - 1]` is the least `m` with `(U_k^n)|_Y ⊆ (U_k ∩ Y×Y)^m`.
    Convex(Vec<u32>),
    /// `a` and `b` are joined by `n` steps of size `k` but by no path in `Y`.
    Fails { n: u32, a: usize, b: usize },
}

impl Convexity {
    pub fn is_convex(&self) -> bool {
        matches!(self, Convexity::Convex(_))
    }
}

fn hops(w: &Window, k: u32, allowed: &[bool], from: usize) -> Vec<Option<u32>> {
    let mut out = vec![None; w.len()];
    if !allowed[from] {
        return out;
    }
    out[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        let h = out[x].unwrap();
        for y in 0..w.len() {
            if allowed[y] && out[y].is_none() && w.within(x, y, k) {
                out[y] = Some(h + 1);
                queue.push_back(y);
            }
        }
    }
    out
}

/// Compares `k`-step paths in the window with `k`-step paths inside `y`,
/// for starting points in the core and path lengths `n` with `n·k` within
/// the faithfulness radius.
pub fn check_u_convex(w: &Window, y: &[bool], k: u32) -> Convexity {
    let nmax = if k == 0 { 0 } else { w.faithful_radius() / k };
    let mut kappa = vec![0u32; nmax as usize];
    let full = w.full_mask();
    let mut worst: Option<(u32, usize, usize)> = None;
    for a in (0..w.len()).filter(|&a| y[a] && w.core()[a]) {
        let hx = hops(w, k, &full, a);
        let hy = hops(w, k, y, a);
        for b in (0..w.len()).filter(|&b| y[b]) {
            let Some(n) = hx[b] else { continue };
            if n == 0 || n > nmax {
                continue;
            }
            match hy[b] {
                Some(m) => {
                    for slot in kappa.iter_mut().skip(n as usize - 1) {
                        *slot = (*slot).max(m);
                    }
                }
                None => {
                    if worst.map_or(true, |(wn, wa, wb)| (n, a, b) < (wn, wa, wb)) {
                        worst = Some((n, a, b));
                    }
                }
            }
        }
    }
    match worst {
        Some((n, a, b)) => Convexity::Fails { n, a, b },
        None => Convexity::Convex(kappa),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub index: usize,
    /// `Z ∪ Y_i` is the whole window.
    pub covers: bool,
    pub y_convex: bool,
    /// `Z ∩ Y_i` is convex inside the sub-window `Z`.
    pub z_convex: bool,
}

impl PairVerdict {
    pub fn is_convex_pair(&self) -> bool {
        self.covers && self.y_convex && self.z_convex
    }
}

pub fn check_convex_pair(w: &Window, z: &[bool], family: &[Vec<bool>], k: u32) -> Result<Vec<PairVerdict>> {
    if family.windows(2).any(|p| !mask_subset(&p[0], &p[1])) {
        return Err(Error::InvalidArgument("family is not increasing".into()));
    }
    let (zw, zmap) = w.restrict(z);
    Ok(family
        .iter()
        .enumerate()
        .map(|(index, yi)| {
            let covers = mask_or(z, yi).iter().all(|x| *x);
            let y_convex = check_u_convex(w, yi, k).is_convex();
            let cap = mask_and(z, yi);
            let cap_in_z: Vec<bool> = zmap.iter().map(|&i| cap[i]).collect();
            let z_convex = check_u_convex(&zw, &cap_in_z, k).is_convex();
            PairVerdict { index, covers, y_convex, z_convex }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::ambient::AmbientSpec;
    use super::super::window::make_window;
    use super::*;

    #[test]
    fn ray_is_convex() {
        let w = make_window(&AmbientSpec::grid(1), 8, 6).unwrap();
        let y = w.mask(|p| p[0] >= 0);
        assert_eq!(check_u_convex(&w, &y, 1), Convexity::Convex((1..=6).collect()));
    }

    #[test]
    fn even_integers_are_not() {
        let w = make_window(&AmbientSpec::grid(1), 8, 6).unwrap();
        let y = w.mask(|p| p[0] % 2 == 0);
        match check_u_convex(&w, &y, 1) {
            Convexity::Fails { n, a, b } => {
                assert_eq!(n, 2);
                assert_eq!(w.point(a)[0].abs_diff(w.point(b)[0]), 2);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn line_pair() {
        let w = make_window(&AmbientSpec::grid(1), 6, 4).unwrap();
        let z = w.mask(|p| p[0] >= 0);
        let fam: Vec<Vec<bool>> = (0..4).map(|i| w.mask(|p| p[0] <= i)).collect();
        let v = check_convex_pair(&w, &z, &fam, 1).unwrap();
        assert!(v.iter().all(|p| p.is_convex_pair()));
        let evens = w.mask(|p| p[0] % 2 == 0);
        let odd_free: Vec<Vec<bool>> = (0..2).map(|i| w.mask(|p| p[0] <= -5 + i)).collect();
        assert!(check_convex_pair(&w, &evens, &odd_free, 1).unwrap().iter().all(|p| !p.covers));
    }
}
