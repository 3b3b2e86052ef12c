//! Coarse cohomology of a symbolic space via growing windows and scales.
//!
//! For a scale `k` and a core radius `c_j`, entry `j` of the window tower is
//! the group of cocycles supported in the core modulo coboundaries of
//! cochains supported `margin` steps further out. Entries are compared along
//! the window index (colimit over bounded supports) and along the scale
//! (limit over entourages).

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{coboundary_matrix, Backend, CochainBasis, SparseCochain, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};
use crate::snf::{kernel_basis, AbelianGroup, Echelon, GroupHom, Quotient};
use crate::space::{make_window, AmbientSpec, Window};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowSchedule {
    /// Strictly increasing core radii.
    pub cores: Vec<u32>,
    pub padding: u32,
    /// Coboundaries are searched `margin` schedule steps beyond the core.
    pub margin: usize,
    pub backend: Backend,
    pub degree_cap: usize,
}

impl WindowSchedule {
    pub fn new(cores: Vec<u32>, padding: u32) -> Self {
        WindowSchedule { cores, padding, margin: 2, backend: Backend::Alternating, degree_cap: DEFAULT_DEGREE_CAP }
    }

    /// Cores `start, start+step, …` (`count` of them) with the least padding
    /// valid up to scale `k_max`.
    pub fn arithmetic(start: u32, step: u32, count: usize, k_max: u32) -> Self {
        let cores = (0..count as u32).map(|i| start + i * step).collect();
        Self::new(cores, k_max * (DEFAULT_DEGREE_CAP as u32 + 2))
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        if self.cores.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidArgument("core radii must increase strictly".into()));
        }
        if self.cores.len() < self.margin + 2 {
            return Err(Error::InvalidArgument(format!(
                "{} cores leave fewer than two tower entries at margin {}",
                self.cores.len(),
                self.margin
            )));
        }
        let need = k * (self.degree_cap as u32 + 2);
        if self.padding < need {
            return Err(Error::WindowTooSmall(format!("padding {} < {need} required at scale {k}", self.padding)));
        }
        Ok(())
    }

    pub fn entries(&self) -> usize {
        self.cores.len().saturating_sub(self.margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Indexed by window; maps go from smaller to larger cores.
    Colimit,
    /// Indexed by scale; maps go from larger to smaller scales.
    Limit,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerEntry {
    pub window_index: usize,
    pub core_radius: u32,
    pub scale: u32,
    pub group: AbelianGroup,
    #[serde(skip)]
    pub generators: Vec<SparseCochain>,
    /// Whether enlarging the coboundary margin by one step changes nothing.
    pub margin_stable: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    pub degree: usize,
    pub direction: Direction,
    pub entries: Vec<TowerEntry>,
    /// `maps[i]` joins `entries[i]` and `entries[i + 1]` in the tower's
    /// direction.
    #[serde(skip)]
    pub maps: Vec<GroupHom>,
    pub map_is_iso: Vec<bool>,
    /// First index `i` with entries `i`, `i + 1` isomorphic via the
    /// structure map (and margin-stable, for window towers).
    pub stabilized_at: Option<usize>,
}

impl Tower {
    pub(crate) fn new(degree: usize, direction: Direction, entries: Vec<TowerEntry>, maps: Vec<GroupHom>) -> Tower {
        let map_is_iso: Vec<bool> = maps.iter().map(|m| m.is_isomorphism()).collect();
        let stabilized_at = (0..map_is_iso.len()).find(|&i| {
            map_is_iso[i]
                && entries[i].margin_stable != Some(false)
                && (direction == Direction::Limit || entries[i].margin_stable.is_some())
        });
        Tower { degree, direction, entries, maps, map_is_iso, stabilized_at }
    }

    pub fn stable_group(&self) -> Option<&AbelianGroup> {
        self.stabilized_at.map(|i| &self.entries[i].group)
    }

    pub fn is_constant(&self) -> bool {
        self.map_is_iso.iter().all(|x| *x)
    }
}

/// One window shared by every scale and degree of a computation.
#[derive(Clone, Debug)]
pub struct Workspace {
    window: Arc<Window>,
    schedule: WindowSchedule,
    cores: Vec<Vec<bool>>,
}

/// A single tower entry with its bases.
#[derive(Clone, Debug)]
pub struct WindowedGroup {
    pub basis: CochainBasis,
    pub quotient: Quotient,
}

impl WindowedGroup {
    pub fn generators(&self) -> Vec<SparseCochain> {
        self.quotient.generators().iter().map(|g| SparseCochain::from_basis(&self.basis, g)).collect()
    }

    /// Class of a cochain on this entry's generators.
    pub fn coords_of(&self, c: &SparseCochain) -> Result<Vec<crate::snf::Int>> {
        let v = c.to_basis(&self.basis)?;
        self.quotient
            .coords(&v)
            .ok_or_else(|| Error::NotCocycle(format!("degree {} cochain is not a cocycle", c.degree)))
    }
}

impl Workspace {
    pub fn new(spec: &AmbientSpec, schedule: WindowSchedule) -> Result<Workspace> {
        let max_core = *schedule
            .cores
            .last()
            .ok_or_else(|| Error::InvalidArgument("empty core schedule".into()))?;
        let window = Arc::new(make_window(spec, max_core, schedule.padding)?);
        Ok(Self::on_window(window, schedule))
    }

    pub fn on_window(window: Arc<Window>, schedule: WindowSchedule) -> Workspace {
        let cores = schedule.cores.iter().map(|&c| window.ball_mask(c)).collect();
        Workspace { window, schedule, cores }
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn schedule(&self) -> &WindowSchedule {
        &self.schedule
    }

    pub fn core(&self, j: usize) -> &[bool] {
        &self.cores[j]
    }

    /// Cocycles supported in core `j` modulo coboundaries of cochains
    /// supported in core `j + margin`.
    pub fn entry(&self, k: u32, n: usize, j: usize, margin: usize) -> Result<WindowedGroup> {
        let w = &self.window;
        let backend = self.schedule.backend;
        let cap = self.schedule.degree_cap;
        let core = &self.cores[j];
        let b_n = CochainBasis::enumerate_capped(w, k, n, core, backend, cap)?;
        let b_up = CochainBasis::enumerate_capped(w, k, n + 1, &w.thicken(core, k), backend, cap)?;
        let d = coboundary_matrix(&b_n, &b_up)?;
        let z = kernel_basis(d.columns());

        let mut g = Vec::new();
        if n > 0 {
            let outer = self
                .cores
                .get(j + margin)
                .ok_or_else(|| Error::InvalidArgument(format!("no core {} steps beyond index {j}", margin)))?;
            let b_low = CochainBasis::enumerate_capped(w, k, n - 1, outer, backend, cap)?;
            let inside = |s: &[usize]| s.iter().all(|&v| core[v]);
            let b_mid = CochainBasis::enumerate_capped(w, k, n, &w.thicken(outer, k), backend, cap)?
                .partitioned(|s| !inside(s));
            let outside = b_mid.simplices().iter().filter(|s| !inside(s)).count();
            let dd = coboundary_matrix(&b_low, &b_mid)?;
            let e = Echelon::from_vectors(dd.columns());
            for r in 0..e.rank() {
                if e.pivot(r) >= outside {
                    g.push(e.row(r).reindex(|i| b_n.index_of(b_mid.simplex(i))));
                }
            }
        }
        let quotient = Quotient::new_unchecked(b_n.len(), z, g);
        for gen in quotient.generators() {
            if !d.mul_vec(gen).is_zero() {
                return Err(Error::Verification("reported representative is not a cocycle".into()));
            }
        }
        Ok(WindowedGroup { basis: b_n, quotient })
    }

    /// The tower over window indices at scale `k` in degree `n`.
    pub fn tower(&self, k: u32, n: usize) -> Result<Tower> {
        self.schedule.validate(k)?;
        let m = self.schedule.margin;
        let count = self.schedule.entries();
        let groups: Vec<WindowedGroup> =
            (0..count).into_par_iter().map(|j| self.entry(k, n, j, m)).collect::<Result<_>>()?;
        let margin_groups: Vec<Option<WindowedGroup>> = (0..count)
            .into_par_iter()
            .map(|j| (j + m + 1 < self.cores.len()).then(|| self.entry(k, n, j, m + 1)).transpose())
            .collect::<Result<_>>()?;

        let mut entries = Vec::with_capacity(count);
        for (j, grp) in groups.iter().enumerate() {
            let margin_stable = match &margin_groups[j] {
                Some(wider) => Some(transfer(grp, wider)?.is_isomorphism()),
                None => None,
            };
            entries.push(TowerEntry {
                window_index: j,
                core_radius: self.schedule.cores[j],
                scale: k,
                group: grp.quotient.group().clone(),
                generators: grp.generators(),
                margin_stable,
            });
        }
        let maps = groups.windows(2).map(|p| transfer(&p[0], &p[1])).collect::<Result<Vec<_>>>()?;
        Ok(Tower::new(n, Direction::Colimit, entries, maps))
    }
}

/// Map induced on classes by sending each generator of `from` to its class
/// in `to` (after forgetting simplices absent from `to`'s basis).
pub fn transfer(from: &WindowedGroup, to: &WindowedGroup) -> Result<GroupHom> {
    let images = from
        .generators()
        .into_iter()
        .map(|mut c| {
            c.values.retain(|s, _| to.basis.index_of(s).is_some());
            c.scale = to.basis.scale();
            to.coords_of(&c)
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = GroupHom::from_images(from.quotient.group().clone(), to.quotient.group().clone(), &images);
    if !hom.is_well_defined() {
        return Err(Error::Verification("structure map does not respect relations".into()));
    }
    Ok(hom)
}

/// Window tower at scale `k` in degree `n`.
pub fn windowed_cohomology(spec: &AmbientSpec, k: u32, n: usize, schedule: &WindowSchedule) -> Result<Tower> {
    schedule.validate(k)?;
    Workspace::new(spec, schedule.clone())?.tower(k, n)
}

/// Scale tower in degree `n` over `k_range`, evaluated at the first window
/// index where every scale's window tower has stabilized.
pub fn scale_tower_in(ws: &Workspace, n: usize, scales: &[u32]) -> Result<(Tower, Vec<Tower>)> {
    let towers: Vec<Tower> = scales.par_iter().map(|&k| ws.tower(k, n)).collect::<Result<_>>()?;
    let count = towers.first().map_or(0, |t| t.map_is_iso.len());
    let j = (0..count)
        .find(|&j| {
            towers.iter().all(|t| {
                t.map_is_iso[j] && t.entries[j].margin_stable != Some(false) && t.entries[j].margin_stable.is_some()
            })
        })
        .ok_or_else(|| Error::Unstabilized(format!("degree {n}: no common stable window index over scales {scales:?}")))?;
    let m = ws.schedule.margin;
    let groups: Vec<WindowedGroup> = scales.par_iter().map(|&k| ws.entry(k, n, j, m)).collect::<Result<_>>()?;
    let maps = groups.windows(2).map(|p| transfer(&p[1], &p[0])).collect::<Result<Vec<_>>>()?;
    let entries = groups
        .iter()
        .zip(scales)
        .map(|(g, &k)| TowerEntry {
            window_index: j,
            core_radius: ws.schedule.cores[j],
            scale: k,
            group: g.quotient.group().clone(),
            generators: g.generators(),
            margin_stable: Some(true),
        })
        .collect();
    Ok((Tower::new(n, Direction::Limit, entries, maps), towers))
}

pub fn scale_tower(spec: &AmbientSpec, n: usize, scales: &[u32], schedule: &WindowSchedule) -> Result<Tower> {
    let kmax = scales.iter().copied().max().unwrap_or(0);
    schedule.validate(kmax)?;
    let ws = Workspace::new(spec, schedule.clone())?;
    Ok(scale_tower_in(&ws, n, scales)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    ExactOnWindow,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lim1 {
    Zero,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub group: AbelianGroup,
    pub stabilized: bool,
    pub window_index: Option<usize>,
    pub core_radius: Option<u32>,
    pub scale: Option<u32>,
    pub mittag_leffler: bool,
    pub lim1: Lim1,
    pub confidence: Confidence,
    pub window_towers: Vec<Tower>,
    pub scale_tower: Option<Tower>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub space: String,
    pub scales: Vec<u32>,
    pub schedule: WindowSchedule,
    pub degrees: Vec<DegreeReport>,
}

impl StabilizationReport {
    pub fn group(&self, n: usize) -> Option<&AbelianGroup> {
        self.degrees.iter().find(|d| d.degree == n).map(|d| &d.group)
    }

    pub fn all_stabilized(&self) -> bool {
        self.degrees.iter().all(|d| d.stabilized)
    }
}

fn degree_report(ws: &Workspace, n: usize, scales: &[u32]) -> Result<DegreeReport> {
    match scale_tower_in(ws, n, scales) {
        Ok((st, towers)) => {
            let all_iso = st.is_constant();
            let surjective = st.maps.iter().all(|m| m.is_surjective());
            let stable_images = stable_images_agree(&st);
            let (group, confidence) = if all_iso {
                (st.entries[0].group.clone(), Confidence::ExactOnWindow)
            } else {
                let composite = st.maps.iter().skip(1).fold(st.maps.first().cloned(), |acc, m| {
                    acc.map(|a| a.compose(m))
                });
                let g = composite.map_or_else(|| st.entries[0].group.clone(), |c| c.image_group());
                (g, Confidence::Heuristic)
            };
            let stabilized = all_iso && st.entries.len() >= 2;
            Ok(DegreeReport {
                degree: n,
                group,
                stabilized,
                window_index: Some(st.entries[0].window_index),
                core_radius: Some(st.entries[0].core_radius),
                scale: st.stabilized_at.map(|i| st.entries[i].scale),
                mittag_leffler: stable_images,
                lim1: if surjective { Lim1::Zero } else { Lim1::Undetermined },
                confidence,
                window_towers: towers,
                scale_tower: Some(st),
                note: None,
            })
        }
        Err(Error::Unstabilized(msg)) => {
            let towers: Vec<Tower> = scales.iter().map(|&k| ws.tower(k, n)).collect::<Result<_>>()?;
            let group = towers
                .last()
                .and_then(|t| t.entries.last())
                .map(|e| e.group.clone())
                .unwrap_or_default();
            Ok(DegreeReport {
                degree: n,
                group,
                stabilized: false,
                window_index: None,
                core_radius: None,
                scale: None,
                mittag_leffler: false,
                lim1: Lim1::Undetermined,
                confidence: Confidence::Heuristic,
                window_towers: towers,
                scale_tower: None,
                note: Some(msg),
            })
        }
        Err(e) => Err(e),
    }
}

// Images in each group of the two longest composites from the top agree.
pub(crate) fn stable_images_agree(st: &Tower) -> bool {
    let n = st.entries.len();
    if n < 3 {
        return st.is_constant();
    }
    // maps[i]: entries[i+1] -> entries[i]
    (0..n - 2).all(|i| {
        let chain = |top: usize| {
            let mut acc = st.maps[top - 1].clone();
            for m in st.maps[i..top - 1].iter().rev() {
                acc = m.compose(&acc);
            }
            acc
        };
        let a = chain(n - 1).image_lattice();
        let b = chain(n - 2).image_lattice();
        crate::snf::same_lattice(&a, &b)
    })
}

/// Coarse cohomology in each requested degree.
pub fn hax(spec: &AmbientSpec, degrees: &[usize], scales: &[u32], schedule: &WindowSchedule) -> Result<StabilizationReport> {
    let kmax = scales.iter().copied().max().ok_or_else(|| Error::InvalidArgument("empty scale range".into()))?;
    schedule.validate(kmax)?;
    let ws = Workspace::new(spec, schedule.clone())?;
    let reports = degrees.iter().map(|&n| degree_report(&ws, n, scales)).collect::<Result<Vec<_>>>()?;
    Ok(StabilizationReport {
        space: spec.describe(),
        scales: scales.to_vec(),
        schedule: schedule.clone(),
        degrees: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_is_constant_z() {
        let sched = WindowSchedule::arithmetic(1, 1, 4, 2);
        let t = windowed_cohomology(&AmbientSpec::point(), 1, 0, &sched).unwrap();
        assert!(t.entries.iter().all(|e| e.group == AbelianGroup::free(1)));
        assert!(t.is_constant());
    }

    #[test]
    fn line_degree_one() {
        let sched = WindowSchedule::arithmetic(3, 2, 5, 1);
        let t = windowed_cohomology(&AmbientSpec::grid(1), 1, 1, &sched).unwrap();
        assert_eq!(t.stable_group(), Some(&AbelianGroup::free(1)));
        let t0 = windowed_cohomology(&AmbientSpec::grid(1), 1, 0, &sched).unwrap();
        assert_eq!(t0.stable_group(), Some(&AbelianGroup::trivial()));
    }
}
