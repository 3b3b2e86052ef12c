use std::collections::HashMap;
use std::sync::Arc;

use super::ambient::{AmbientSpec, Point};
use crate::error::{Error, Result};

/// A finite, metrically faithful piece of an ambient space.
///
/// Points are sorted lexicographically by coordinates; that order is the
/// global vertex order used for orientations. Subsets of a window are
/// boolean masks indexed by point.
#[derive(Clone, Debug)]
pub struct Window {
    spec: Arc<AmbientSpec>,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    core: Vec<bool>,
    core_radius: u32,
    faithful_radius: u32,
    labels: Vec<usize>,
    basepoint: usize,
}

/// All ambient points within `core_radius + padding` of the basepoint(s);
/// the core is the ball of radius `core_radius`.
pub fn make_window(spec: &AmbientSpec, core_radius: u32, padding: u32) -> Result<Window> {
    spec.validate()?;
    let points = spec.ball(core_radius + padding);
    let core = points.iter().map(|p| spec.depth(p) <= core_radius).collect();
    Window::from_parts(Arc::new(spec.clone()), points, core, core_radius, padding)
}

impl Window {
    /// Builds a window from explicit points (sorted here). The caller vouches
    /// for the faithfulness radius.
    pub fn from_parts(
        spec: Arc<AmbientSpec>,
        points: Vec<Point>,
        core: Vec<bool>,
        core_radius: u32,
        faithful_radius: u32,
    ) -> Result<Window> {
        if points.len() != core.len() {
            return Err(Error::Dimension(format!("{} points but {} core flags", points.len(), core.len())));
        }
        if let Some(p) = points.iter().find(|p| !spec.contains(p)) {
            return Err(Error::InvalidSpec(format!("{p:?} is not a point of {}", spec.describe())));
        }
        let mut paired: Vec<(Point, bool)> = points.into_iter().zip(core).collect();
        paired.sort();
        paired.dedup_by(|a, b| a.0 == b.0);
        let (points, core): (Vec<Point>, Vec<bool>) = paired.into_iter().unzip();
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();

        let mut keys: Vec<Vec<i64>> = Vec::new();
        let labels = points
            .iter()
            .map(|p| {
                let key = spec.component_key(p);
                match keys.iter().position(|k| *k == key) {
                    Some(i) => i,
                    None => {
                        keys.push(key);
                        keys.len() - 1
                    }
                }
            })
            .collect();
        let basepoint = (0..points.len())
            .filter(|&i| core[i])
            .min_by_key(|&i| (spec.depth(&points[i]), i))
            .unwrap_or(0);
        Ok(Window { spec, points, index, core, core_radius, faithful_radius, labels, basepoint })
    }

    /// Sub-window on the masked points, with the inherited metric. Returns
    /// the map from sub-window indices to indices here.
    pub fn restrict(&self, mask: &[bool]) -> (Window, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| mask[i]).collect();
        let points = keep.iter().map(|&i| self.points[i].clone()).collect();
        let core = keep.iter().map(|&i| self.core[i]).collect();
        let w = Window::from_parts(self.spec.clone(), points, core, self.core_radius, self.faithful_radius)
            .expect("points of a window are ambient points");
        (w, keep)
    }

    /// Same points with a different core.
    pub fn with_core(&self, core: Vec<bool>) -> Window {
        assert_eq!(core.len(), self.len());
        let mut w = self.clone();
        w.core = core;
        w
    }

    pub fn spec(&self) -> &AmbientSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<AmbientSpec> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn core(&self) -> &[bool] {
        &self.core
    }

    pub fn core_radius(&self) -> u32 {
        self.core_radius
    }

    pub fn faithful_radius(&self) -> u32 {
        self.faithful_radius
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn component_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn depth(&self, i: usize) -> u32 {
        self.spec.depth(&self.points[i])
    }

    pub fn dist(&self, i: usize, j: usize) -> Option<u32> {
        self.spec.dist(&self.points[i], &self.points[j])
    }

    pub fn within(&self, i: usize, j: usize, k: u32) -> bool {
        self.dist(i, j).is_some_and(|d| d <= k)
    }

    /// Mask of points satisfying an ambient predicate.
    pub fn mask(&self, pred: impl Fn(&[i64]) -> bool) -> Vec<bool> {
        self.points.iter().map(|p| pred(p)).collect()
    }

    pub fn full_mask(&self) -> Vec<bool> {
        vec![true; self.len()]
    }

    /// Mask of points at depth at most `r`.
    pub fn ball_mask(&self, r: u32) -> Vec<bool> {
        (0..self.len()).map(|i| self.depth(i) <= r).collect()
    }

    /// For each point, the points of `region` within `k`, in index order
    /// (including the point itself when it lies in `region`).
    pub fn neighbors(&self, k: u32, region: &[bool]) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| (0..self.len()).filter(|&j| region[j] && self.within(i, j, k)).collect())
            .collect()
    }

    /// `U_k[mask]`: points within `k` of the mask.
    pub fn thicken(&self, mask: &[bool], k: u32) -> Vec<bool> {
        let members: Vec<usize> = (0..self.len()).filter(|&i| mask[i]).collect();
        (0..self.len()).map(|i| members.iter().any(|&j| self.within(i, j, k))).collect()
    }

    /// Checks the ambient faithfulness claim: every ambient point within the
    /// faithfulness radius of the core is listed.
    pub fn check_faithful(&self) -> Result<()> {
        let reach = self.core_radius + self.faithful_radius;
        for p in self.spec.ball(reach) {
            if self.index_of(&p).is_some() {
                continue;
            }
            let near_core = (0..self.len())
                .filter(|&i| self.core[i])
                .any(|i| self.spec.dist(&self.points[i], &p).is_some_and(|d| d <= self.faithful_radius));
            if near_core {
                return Err(Error::WindowTooSmall(format!("ambient point {p:?} near the core is missing")));
            }
        }
        Ok(())
    }
}

pub fn mask_and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

pub fn mask_or(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

pub fn mask_not(a: &[bool]) -> Vec<bool> {
    a.iter().map(|x| !x).collect()
}

pub fn mask_subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(x, y)| !x || *y)
}

pub fn mask_count(a: &[bool]) -> usize {
    a.iter().filter(|x| **x).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_counts() {
        let w = make_window(&AmbientSpec::grid(1), 10, 4).unwrap();
        assert_eq!(w.len(), 29);
        assert_eq!(mask_count(w.core()), 21);
        assert_eq!(w.faithful_radius(), 4);
        assert_eq!(w.point(w.basepoint()), &vec![0]);
        w.check_faithful().unwrap();
    }

    #[test]
    fn point_space() {
        let w = make_window(&AmbientSpec::point(), 5, 5).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.core()[0]);
    }

    #[test]
    fn free_union_components_unrelated() {
        let spec = AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::grid(1)]);
        let w = make_window(&spec, 3, 1).unwrap();
        assert_eq!(w.component_count(), 2);
        assert_eq!((0..w.len()).filter(|&i| w.label(i) == 0).count(), 9);
        assert_eq!((0..w.len()).filter(|&i| w.label(i) == 1).count(), 9);
        for i in 0..w.len() {
            for j in 0..w.len() {
                if w.label(i) != w.label(j) {
                    assert_eq!(w.dist(i, j), None);
                }
            }
        }
    }

    #[test]
    fn finite_table_violation() {
        let spec = AmbientSpec::finite(vec![vec![0, 1], vec![2, 0]]);
        assert!(matches!(make_window(&spec, 1, 1), Err(Error::MetricViolation(_))));
    }
}
