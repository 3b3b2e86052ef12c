use serde::Serialize;

use crate::cohomology::{hax, WindowSchedule, Workspace};
use crate::complex::SparseCochain;
use crate::error::{Error, Result};
use crate::snf::{AbelianGroup, GroupHom, Int};
use crate::space::AmbientSpec;

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityDegree {
    pub degree: usize,
    pub union: AbelianGroup,
    pub summands: Vec<AbelianGroup>,
    pub sum: AbelianGroup,
    pub groups_agree: bool,
    /// The map to the summands given by restricting representatives to each
    /// component is an isomorphism at every tested scale.
    pub projections_iso: bool,
    pub window_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityReport {
    pub space: String,
    pub degrees: Vec<AdditivityDegree>,
    pub all_stabilized: bool,
}

impl AdditivityReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.groups_agree && d.projections_iso)
    }
}

/// Compares the cohomology of a free union with the direct sum over its
/// summands, and checks that restriction to the components induces the
/// isomorphism on window groups.
pub fn additivity_check(
    specs: &[AmbientSpec],
    degrees: &[usize],
    scales: &[u32],
    schedule: &WindowSchedule,
) -> Result<AdditivityReport> {
    if specs.len() < 2 {
        return Err(Error::InvalidArgument("additivity needs at least two summands".into()));
    }
    let union = AmbientSpec::FreeUnion(specs.to_vec());
    let whole = hax(&union, degrees, scales, schedule)?;
    let parts = specs.iter().map(|s| hax(s, degrees, scales, schedule)).collect::<Result<Vec<_>>>()?;

    let ws = Workspace::new(&union, schedule.clone())?;
    let part_ws = specs.iter().map(|s| Workspace::new(s, schedule.clone())).collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for (idx, &n) in degrees.iter().enumerate() {
        let rep = &whole.degrees[idx];
        let summands: Vec<AbelianGroup> = parts.iter().map(|p| p.degrees[idx].group.clone()).collect();
        let sum = summands.iter().fold(AbelianGroup::trivial(), |acc, g| acc.direct_sum(g));
        let j = rep.window_index.unwrap_or(0);
        let mut iso = true;
        for &k in scales {
            iso &= projections_are_iso(&ws, &part_ws, k, n, j)?;
        }
        out.push(AdditivityDegree {
            degree: n,
            union: rep.group.clone(),
            groups_agree: rep.group == sum,
            summands,
            sum,
            projections_iso: iso,
            window_index: j,
        });
    }
    let all_stabilized = whole.all_stabilized() && parts.iter().all(|p| p.all_stabilized());
    Ok(AdditivityReport { space: union.describe(), degrees: out, all_stabilized })
}

fn projections_are_iso(ws: &Workspace, parts: &[Workspace], k: u32, n: usize, j: usize) -> Result<bool> {
    let m = ws.schedule().margin;
    let whole = ws.entry(k, n, j, m)?;
    let pieces = parts.iter().map(|p| p.entry(k, n, j, m)).collect::<Result<Vec<_>>>()?;
    let w = ws.window();

    // The target presents ⊕ summands with all torsion generators first.
    let torsion: Vec<Int> = pieces.iter().flat_map(|p| p.quotient.group().torsion.iter().cloned()).collect();
    let rank = pieces.iter().map(|p| p.quotient.group().rank).sum();
    let target = AbelianGroup { rank, torsion };
    let ntors = target.torsion.len();

    let mut images = Vec::new();
    for gen in whole.generators() {
        let mut img = vec![Int::from(0u8); target.ngens()];
        let mut tors_at = 0;
        let mut free_at = ntors;
        for (c, piece) in pieces.iter().enumerate() {
            let pw = piece.basis.window();
            let mut local = SparseCochain::zero(gen.degree, gen.scale, gen.backend);
            for (s, v) in &gen.values {
                if s.iter().all(|&x| w.point(x)[0] == c as i64) {
                    let t: Option<Vec<usize>> = s.iter().map(|&x| pw.index_of(&w.point(x)[1..])).collect();
                    let t = t.ok_or_else(|| Error::Verification("component window misses a union point".into()))?;
                    local.values.insert(t, v.clone());
                }
            }
            let coords = piece.coords_of(&local)?;
            let g = piece.quotient.group();
            let nt = g.torsion.len();
            for (i, x) in coords.into_iter().enumerate() {
                if i < nt {
                    img[tors_at + i] = x;
                } else {
                    img[free_at + i - nt] = x;
                }
            }
            tors_at += nt;
            free_at += g.rank;
        }
        images.push(img);
    }
    let hom = GroupHom::from_images(whole.quotient.group().clone(), target, &images);
    Ok(hom.is_well_defined() && hom.is_isomorphism())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let sched = WindowSchedule::arithmetic(1, 1, 4, 1);
        let r = additivity_check(&[AmbientSpec::point(), AmbientSpec::point()], &[0, 1], &[1], &sched).unwrap();
        assert!(r.passed());
        assert_eq!(r.degrees[0].union, AbelianGroup::free(2));
    }
}
