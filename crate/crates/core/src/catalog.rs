//! Named test spaces and random instance generators.

use std::sync::Arc;

use ibig::IBig;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{CochainBasis, SparseCochain};
use crate::error::{Error, Result};
use crate::space::{AmbientSpec, SpaceMap, Window};

/// The standard spaces with their names.
pub fn catalog() -> Vec<(&'static str, AmbientSpec)> {
    vec![
        ("point", AmbientSpec::point()),
        ("z", AmbientSpec::grid(1)),
        ("z2", AmbientSpec::grid(2)),
        ("zplus", AmbientSpec::Halfline),
        ("z_sqcup_z", AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::grid(1)])),
        ("z_sqcup_zplus", AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::Halfline])),
        ("z_times_zplus", AmbientSpec::Product(Box::new(AmbientSpec::grid(1)), Box::new(AmbientSpec::Halfline))),
        ("square", AmbientSpec::finite(vec![vec![0, 1, 2, 1], vec![1, 0, 1, 2], vec![2, 1, 0, 1], vec![1, 2, 1, 0]])),
    ]
}

pub fn by_name(name: &str) -> Option<AmbientSpec> {
    catalog().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

/// Core radius small enough for exhaustive checks on each catalog space.
pub fn small_core(spec: &AmbientSpec) -> u32 {
    match spec {
        AmbientSpec::Finite { .. } => 0,
        AmbientSpec::Grid { d } if *d >= 2 => 2,
        AmbientSpec::Product(..) => 2,
        _ => 5,
    }
}

/// Random cochain on `b` with about `density` of the coordinates set to
/// nonzero values in `-range..=range`.
pub fn random_cochain<R: Rng>(b: &CochainBasis, rng: &mut R, density: f64, range: i64) -> SparseCochain {
    let mut c = SparseCochain::zero(b.degree(), b.scale(), b.backend());
    for s in b.simplices() {
        if rng.gen_bool(density.clamp(0.0, 1.0)) {
            let v = rng.gen_range(-range..=range);
            if v != 0 {
                c.values.insert(s.clone(), IBig::from(v));
            }
        }
    }
    c
}

/// Endomap of the window moving each point to a random point of the window
/// within `jitter` of it.
pub fn random_jitter<R: Rng>(w: &Arc<Window>, rng: &mut R, jitter: u32) -> Result<SpaceMap> {
    let assignment = (0..w.len())
        .map(|i| {
            let near: Vec<usize> = (0..w.len()).filter(|&j| w.within(i, j, jitter)).collect();
            *near.choose(rng).expect("a point is near itself")
        })
        .collect();
    SpaceMap::from_assignment(w.clone(), w.clone(), assignment)
}

/// Two endomaps of the window, each within `jitter` of the identity, so the
/// pair is `2·jitter`-close and both maps send `U_k` into `U_{k+2·jitter}`.
pub fn random_close_pair<R: Rng>(w: &Arc<Window>, rng: &mut R, jitter: u32) -> Result<(SpaceMap, SpaceMap)> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    Ok((random_jitter(w, rng, jitter)?, random_jitter(w, rng, jitter)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Backend;
    use crate::space::{check_close, make_window};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_resolve_and_validate() {
        for (name, spec) in catalog() {
            assert_eq!(by_name(name), Some(spec.clone()));
            spec.validate().unwrap();
            make_window(&spec, small_core(&spec), 2).unwrap();
        }
        assert!(by_name("nowhere").is_none());
    }

    #[test]
    fn generators_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = Arc::new(make_window(&AmbientSpec::grid(1), 5, 3).unwrap());
        let (f, g) = random_close_pair(&w, &mut rng, 1).unwrap();
        assert!(check_close(&f, &g).unwrap() <= 2);
        let b = CochainBasis::enumerate(&w, 1, 1, &w.full_mask(), Backend::Alternating).unwrap();
        let c = random_cochain(&b, &mut rng, 0.5, 3);
        assert!(c.values.keys().all(|s| b.index_of(s).is_some()));
    }
}
