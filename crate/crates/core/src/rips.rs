//! Rips complexes of windows and the cohomology of the pair
//! `(P_k(W), P_k(W ∖ B))` as `B` grows and `k` varies.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{stable_images_agree, transfer, Confidence, Direction, Lim1, Tower, TowerEntry, WindowedGroup};
use crate::complex::{coboundary_eval, Backend, CochainBasis, Simplex};
use crate::error::{Error, Result};
use crate::snf::{cohomology_at, AbelianGroup, SparseMatrix};
use crate::space::{make_window, AmbientSpec, Window};

pub const DEFAULT_DIM_CAP: usize = 3;
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Flag complex of a window at scale `k`: vertex lists, increasing in the
/// window's point order, of pairwise distance at most `k`.
#[derive(Clone, Debug)]
pub struct RipsComplex {
    window: Arc<Window>,
    scale: u32,
    dim_cap: usize,
    levels: Vec<CochainBasis>,
}

/// Enumerates every simplex up to `dim_cap`, failing once the total count
/// exceeds `budget`.
pub fn build_rips(w: &Arc<Window>, k: u32, dim_cap: usize, budget: usize) -> Result<RipsComplex> {
    let all = w.full_mask();
    let mut levels = Vec::with_capacity(dim_cap + 1);
    let mut count = 0;
    for n in 0..=dim_cap {
        let b = CochainBasis::enumerate_capped(w, k, n, &all, Backend::Alternating, dim_cap)?;
        count += b.len();
        if count > budget {
            return Err(Error::Budget { count, budget });
        }
        let empty = b.is_empty();
        levels.push(b);
        if empty {
            break;
        }
    }
    Ok(RipsComplex { window: w.clone(), scale: k, dim_cap, levels })
}

impl RipsComplex {
    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Simplices of dimension `n` (empty beyond the top nonempty level).
    pub fn simplices(&self, n: usize) -> &[Simplex] {
        self.levels.get(n).map_or(&[], |b| b.simplices())
    }

    pub fn count(&self) -> usize {
        self.levels.iter().map(|b| b.len()).sum()
    }

    /// Number of simplices by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self.levels.iter().map(|b| b.len()).collect();
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len() >= 1 && self.levels.get(s.len() - 1).is_some_and(|b| b.index_of(s).is_some())
    }

    /// Simplices of the relative complex `(P(region), P(region ∖ b))` in
    /// dimension `n`: those inside `region` that meet `b`.
    fn relative(&self, n: usize, region: &[bool], b: &[bool]) -> Result<CochainBasis> {
        let level = match self.levels.get(n) {
            Some(level) => level,
            None if n <= self.dim_cap => self.levels.last().expect("at least the vertex level"),
            None => return Err(Error::DegreeCap { degree: n, cap: self.dim_cap }),
        };
        if n >= self.levels.len() {
            return Ok(level.filter(|_| false));
        }
        Ok(level.filter(|s| s.iter().all(|&v| region[v]) && s.iter().any(|&v| b[v])))
    }

    fn pair_group(&self, n: usize, region: &[bool], b: &[bool]) -> Result<WindowedGroup> {
        if n + 1 > self.dim_cap {
            return Err(Error::DegreeCap { degree: n + 1, cap: self.dim_cap });
        }
        let b_n = self.relative(n, region, b)?;
        let b_up = self.relative(n + 1, region, b)?;
        let d_out = if b_up.is_empty() { SparseMatrix::zeros(0, b_n.len()) } else { coboundary_eval(&b_n, &b_up)? };
        let d_in = if n == 0 {
            SparseMatrix::zeros(b_n.len(), 0)
        } else {
            let b_low = self.relative(n - 1, region, b)?;
            if b_n.is_empty() {
                SparseMatrix::zeros(0, b_low.len())
            } else {
                coboundary_eval(&b_low, &b_n)?
            }
        };
        let quotient = cohomology_at(&d_in, &d_out)?;
        Ok(WindowedGroup { basis: b_n, quotient })
    }
}

/// Relative cohomology of `(P_k(W), P_k(W ∖ B))` in each requested degree.
pub fn rips_pair_cohomology(
    w: &Arc<Window>,
    k: u32,
    b: &[bool],
    degrees: &[usize],
    budget: usize,
) -> Result<Vec<AbelianGroup>> {
    if b.len() != w.len() {
        return Err(Error::Dimension("B mask has the wrong length".into()));
    }
    if (0..w.len()).any(|i| b[i] && !w.core()[i]) {
        return Err(Error::InvalidArgument("B must lie in the window core".into()));
    }
    let cap = degrees.iter().copied().max().unwrap_or(0) + 1;
    let p = build_rips(w, k, cap.max(1), budget)?;
    let all = w.full_mask();
    degrees.iter().map(|&n| Ok(p.pair_group(n, &all, b)?.quotient.group().clone())).collect()
}

/// Parameters of a shadow computation.
#[derive(Clone, Debug, Serialize)]
pub struct ShadowSchedule {
    /// Strictly increasing radii of the balls `B`.
    pub radii: Vec<u32>,
    /// Distance from the largest `B` to the window edge.
    pub padding: u32,
    pub dim_cap: usize,
    pub budget: usize,
}

impl ShadowSchedule {
    pub fn new(radii: Vec<u32>, padding: u32) -> Self {
        ShadowSchedule { radii, padding, dim_cap: DEFAULT_DIM_CAP, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_dim_cap(mut self, dim_cap: usize) -> Self {
        self.dim_cap = dim_cap;
        self
    }

    /// Radius of the inner window used for the edge check.
    fn inner_radius(&self) -> u32 {
        self.radii.last().copied().unwrap_or(0) + self.padding / 2
    }

    fn validate(&self, k_max: u32) -> Result<()> {
        if self.radii.len() < 2 || self.radii.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidArgument("B radii must increase strictly, with at least two".into()));
        }
        if self.padding / 2 < 2 * k_max {
            return Err(Error::WindowTooSmall(format!(
                "padding {} leaves less than {} between B and the inner window edge",
                self.padding,
                2 * k_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowDegree {
    pub degree: usize,
    pub group: AbelianGroup,
    pub stabilized: bool,
    pub radius: Option<u32>,
    pub scale: Option<u32>,
    pub mittag_leffler: bool,
    pub lim1: Lim1,
    pub confidence: Confidence,
    pub radius_towers: Vec<Tower>,
    pub scale_tower: Option<Tower>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowReport {
    pub space: String,
    pub scales: Vec<u32>,
    pub schedule: ShadowSchedule,
    pub simplex_counts: Vec<(u32, usize)>,
    pub degrees: Vec<ShadowDegree>,
}

impl ShadowReport {
    pub fn group(&self, n: usize) -> Option<&AbelianGroup> {
        self.degrees.iter().find(|d| d.degree == n).map(|d| &d.group)
    }

    pub fn all_stabilized(&self) -> bool {
        self.degrees.iter().all(|d| d.stabilized)
    }
}

struct ShadowSpace {
    window: Arc<Window>,
    balls: Vec<Vec<bool>>,
    inner: Vec<bool>,
    complexes: Vec<RipsComplex>,
}

impl ShadowSpace {
    fn tower(&self, ki: usize, n: usize) -> Result<Tower> {
        let p = &self.complexes[ki];
        let all = self.window.full_mask();
        let groups: Vec<WindowedGroup> =
            self.balls.par_iter().map(|b| p.pair_group(n, &all, b)).collect::<Result<_>>()?;
        let mut entries = Vec::with_capacity(groups.len());
        for (j, g) in groups.iter().enumerate() {
            let inner = p.pair_group(n, &self.inner, &self.balls[j])?;
            entries.push(TowerEntry {
                window_index: j,
                core_radius: self.radius(j),
                scale: p.scale(),
                group: g.quotient.group().clone(),
                generators: g.generators(),
                margin_stable: Some(transfer(g, &inner)?.is_isomorphism()),
            });
        }
        let maps = groups.windows(2).map(|w| transfer(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
        Ok(Tower::new(n, Direction::Colimit, entries, maps))
    }

    fn radius(&self, j: usize) -> u32 {
        let b = &self.balls[j];
        (0..self.window.len()).filter(|&i| b[i]).map(|i| self.window.depth(i)).max().unwrap_or(0)
    }
}

/// Stabilized `lim_k colim_B` of the pair cohomology over the schedule.
pub fn q_shadow(
    spec: &AmbientSpec,
    degrees: &[usize],
    scales: &[u32],
    schedule: &ShadowSchedule,
) -> Result<ShadowReport> {
    let k_max = scales.iter().copied().max().ok_or_else(|| Error::InvalidArgument("empty scale range".into()))?;
    schedule.validate(k_max)?;
    if let Some(&n) = degrees.iter().find(|&&n| n + 1 > schedule.dim_cap) {
        return Err(Error::DegreeCap { degree: n + 1, cap: schedule.dim_cap });
    }
    let max_b = *schedule.radii.last().expect("validated");
    let window = Arc::new(make_window(spec, max_b, schedule.padding)?);
    let balls: Vec<Vec<bool>> = schedule.radii.iter().map(|&r| window.ball_mask(r)).collect();
    let inner = window.ball_mask(schedule.inner_radius());
    let complexes = scales
        .par_iter()
        .map(|&k| build_rips(&window, k, schedule.dim_cap, schedule.budget))
        .collect::<Result<Vec<_>>>()?;
    let simplex_counts = complexes.iter().map(|p| (p.scale(), p.count())).collect();
    let space = ShadowSpace { window, balls, inner, complexes };

    let reports = degrees.iter().map(|&n| shadow_degree(&space, n, scales)).collect::<Result<Vec<_>>>()?;
    Ok(ShadowReport {
        space: spec.describe(),
        scales: scales.to_vec(),
        schedule: schedule.clone(),
        simplex_counts,
        degrees: reports,
    })
}

fn shadow_degree(space: &ShadowSpace, n: usize, scales: &[u32]) -> Result<ShadowDegree> {
    let towers: Vec<Tower> = (0..scales.len()).map(|ki| space.tower(ki, n)).collect::<Result<_>>()?;
    let count = towers.first().map_or(0, |t| t.map_is_iso.len());
    let common = (0..count).find(|&j| {
        towers.iter().all(|t| t.map_is_iso[j] && t.entries[j].margin_stable == Some(true))
    });
    let Some(j) = common else {
        let group = towers.last().and_then(|t| t.entries.last()).map(|e| e.group.clone()).unwrap_or_default();
        return Ok(ShadowDegree {
            degree: n,
            group,
            stabilized: false,
            radius: None,
            scale: None,
            mittag_leffler: false,
            lim1: Lim1::Undetermined,
            confidence: Confidence::Heuristic,
            radius_towers: towers,
            scale_tower: None,
            note: Some(format!("degree {n}: no common stable B radius over scales {scales:?}")),
        });
    };
    let all = space.window.full_mask();
    let groups: Vec<WindowedGroup> = space
        .complexes
        .iter()
        .map(|p| p.pair_group(n, &all, &space.balls[j]))
        .collect::<Result<_>>()?;
    let maps = groups.windows(2).map(|p| transfer(&p[1], &p[0])).collect::<Result<Vec<_>>>()?;
    let entries = groups
        .iter()
        .zip(scales)
        .map(|(g, &k)| TowerEntry {
            window_index: j,
            core_radius: space.radius(j),
            scale: k,
            group: g.quotient.group().clone(),
            generators: g.generators(),
            margin_stable: Some(true),
        })
        .collect();
    let st = Tower::new(n, Direction::Limit, entries, maps);
    let all_iso = st.is_constant();
    let group = if all_iso {
        st.entries[0].group.clone()
    } else {
        let composite = st.maps.iter().skip(1).fold(st.maps.first().cloned(), |acc, m| acc.map(|a| a.compose(m)));
        composite.map_or_else(|| st.entries[0].group.clone(), |c| c.image_group())
    };
    Ok(ShadowDegree {
        degree: n,
        group,
        stabilized: all_iso,
        radius: Some(space.radius(j)),
        scale: st.stabilized_at.map(|i| st.entries[i].scale),
        mittag_leffler: stable_images_agree(&st),
        lim1: if st.maps.iter().all(|m| m.is_surjective()) { Lim1::Zero } else { Lim1::Undetermined },
        confidence: if all_iso { Confidence::ExactOnWindow } else { Confidence::Heuristic },
        radius_towers: towers,
        scale_tower: Some(st),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(spec: &AmbientSpec, core: u32, pad: u32) -> Arc<Window> {
        Arc::new(make_window(spec, core, pad).unwrap())
    }

    #[test]
    fn counts_on_a_line() {
        let w = window(&AmbientSpec::grid(1), 3, 0);
        let p = build_rips(&w, 1, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.f_vector(), vec![7, 6]);
        let p = build_rips(&w, 2, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.f_vector(), vec![7, 11, 5]);
        let pt = build_rips(&window(&AmbientSpec::point(), 0, 0), 5, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(pt.f_vector(), vec![1]);
    }

    #[test]
    fn budget_is_enforced() {
        let w = window(&AmbientSpec::grid(2), 3, 0);
        assert!(matches!(build_rips(&w, 2, 3, 100), Err(Error::Budget { .. })));
    }

    #[test]
    fn pair_groups() {
        let w = window(&AmbientSpec::grid(1), 1, 5);
        let b = w.ball_mask(1);
        let g = rips_pair_cohomology(&w, 1, &b, &[0, 1], DEFAULT_BUDGET).unwrap();
        assert_eq!(g, vec![AbelianGroup::trivial(), AbelianGroup::free(1)]);
        let w = window(&AmbientSpec::point(), 0, 0);
        let g = rips_pair_cohomology(&w, 1, &w.full_mask(), &[0, 1], DEFAULT_BUDGET).unwrap();
        assert_eq!(g, vec![AbelianGroup::free(1), AbelianGroup::trivial()]);
    }

    #[test]
    fn shadow_of_line_and_ray() {
        let sched = ShadowSchedule::new(vec![1, 2, 3, 4], 8);
        let r = q_shadow(&AmbientSpec::grid(1), &[0, 1, 2], &[1, 2], &sched).unwrap();
        assert!(r.all_stabilized());
        assert_eq!(r.group(1), Some(&AbelianGroup::free(1)));
        assert_eq!(r.group(0), Some(&AbelianGroup::trivial()));
        let r = q_shadow(&AmbientSpec::Halfline, &[0, 1, 2], &[1, 2], &sched).unwrap();
        assert!(r.degrees.iter().all(|d| d.group.is_trivial()));
    }
}
