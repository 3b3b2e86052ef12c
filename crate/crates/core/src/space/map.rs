use std::fmt;
use std::sync::Arc;

use super::ambient::Point;
use super::window::Window;
use crate::error::{Error, Result};

/// A map given on ambient coordinates, evaluable beyond any window.
pub type Rule = Arc<dyn Fn(&[i64]) -> Point + Send + Sync>;

/// A map between windows. Images are ambient points of the codomain space
/// and may fall outside the codomain window when the map comes from a rule.
#[derive(Clone)]
pub struct SpaceMap {
    domain: Arc<Window>,
    codomain: Arc<Window>,
    images: Vec<Point>,
    targets: Vec<Option<usize>>,
    rule: Option<Rule>,
    declared: Vec<(u32, u32)>,
}

impl fmt::Debug for SpaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceMap")
            .field("domain_points", &self.domain.len())
            .field("codomain_points", &self.codomain.len())
            .field("has_rule", &self.rule.is_some())
            .field("declared", &self.declared)
            .finish()
    }
}

impl SpaceMap {
    pub fn from_rule(domain: Arc<Window>, codomain: Arc<Window>, rule: Rule) -> Result<SpaceMap> {
        let images: Vec<Point> = domain.points().iter().map(|p| rule(p)).collect();
        if let Some(q) = images.iter().find(|q| !codomain.spec().contains(q)) {
            return Err(Error::UnknownPoint(format!("{q:?} (image under the rule)")));
        }
        let targets = images.iter().map(|q| codomain.index_of(q)).collect();
        Ok(SpaceMap { domain, codomain, images, targets, rule: Some(rule), declared: Vec::new() })
    }

    /// A map known only on the window, by target indices.
    pub fn from_assignment(domain: Arc<Window>, codomain: Arc<Window>, assignment: Vec<usize>) -> Result<SpaceMap> {
        if assignment.len() != domain.len() {
            return Err(Error::Dimension(format!(
                "assignment has {} entries for {} points",
                assignment.len(),
                domain.len()
            )));
        }
        if let Some(&t) = assignment.iter().find(|&&t| t >= codomain.len()) {
            return Err(Error::UnknownPoint(format!("codomain index {t}")));
        }
        let images = assignment.iter().map(|&t| codomain.point(t).clone()).collect();
        let targets = assignment.into_iter().map(Some).collect();
        Ok(SpaceMap { domain, codomain, images, targets, rule: None, declared: Vec::new() })
    }

    pub fn identity(w: Arc<Window>) -> SpaceMap {
        let rule: Rule = Arc::new(|p: &[i64]| p.to_vec());
        SpaceMap::from_rule(w.clone(), w, rule).expect("identity images are points")
    }

    /// Translation of a grid-like space by a fixed vector on the last
    /// coordinates.
    pub fn shift(w: Arc<Window>, by: Vec<i64>) -> Result<SpaceMap> {
        let rule: Rule = Arc::new(move |p: &[i64]| {
            let mut q = p.to_vec();
            let off = q.len() - by.len();
            for (x, b) in q[off..].iter_mut().zip(&by) {
                *x += b;
            }
            q
        });
        SpaceMap::from_rule(w.clone(), w, rule)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SpaceMap) -> Result<SpaceMap> {
        if let (Some(a), Some(b)) = (&first.rule, &self.rule) {
            let (a, b) = (a.clone(), b.clone());
            let rule: Rule = Arc::new(move |p: &[i64]| b(&a(p)));
            return SpaceMap::from_rule(first.domain.clone(), self.codomain.clone(), rule);
        }
        let assignment = (0..first.domain.len())
            .map(|i| {
                let mid = first.targets[i]
                    .and_then(|t| self.domain.index_of(first.codomain.point(t)))
                    .ok_or_else(|| Error::UnknownPoint(format!("{:?}", first.images[i])))?;
                self.targets[mid].ok_or_else(|| Error::UnknownPoint(format!("{:?}", self.images[mid])))
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceMap::from_assignment(first.domain.clone(), self.codomain.clone(), assignment)
    }

    pub fn with_declared(mut self, k_in: u32, k_out: u32) -> SpaceMap {
        self.declared.push((k_in, k_out));
        self
    }

    pub fn declared(&self) -> &[(u32, u32)] {
        &self.declared
    }

    pub fn domain(&self) -> &Arc<Window> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Window> {
        &self.codomain
    }

    pub fn image(&self, i: usize) -> &Point {
        &self.images[i]
    }

    /// Index of the image in the codomain window, if listed there.
    pub fn target(&self, i: usize) -> Option<usize> {
        self.targets[i]
    }

    pub fn rule(&self) -> Option<&Rule> {
        self.rule.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Properness {
    /// Decided from the ambient rule on a probe region twice the window.
    Proper,
    Improper { witness: Point },
    /// Only the window was available; not conclusive for the infinite space.
    WindowProper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlReport {
    pub k_out: u32,
    pub properness: Properness,
}

/// Least `k_out` with `(f×f)(U_{k_in}) ⊆ U_{k_out}` on the window, together
/// with a properness verdict.
pub fn check_controlled_proper(m: &SpaceMap, k_in: u32) -> Result<ControlReport> {
    let dom = &m.domain;
    let cod = m.codomain.spec();
    let mut k_out = 0;
    for i in 0..dom.len() {
        for j in i + 1..dom.len() {
            if !dom.within(i, j, k_in) {
                continue;
            }
            match cod.dist(&m.images[i], &m.images[j]) {
                Some(d) => k_out = k_out.max(d),
                None => {
                    return Err(Error::NotControlled(format!(
                        "{:?} and {:?} are {k_in}-close but their images lie in different components",
                        dom.point(i),
                        dom.point(j)
                    )))
                }
            }
        }
    }
    for &(ki, ko) in &m.declared {
        if ki == k_in && ko < k_out {
            return Err(Error::NotControlled(format!("declared bound {ki} -> {ko}, observed {k_out}")));
        }
    }
    let properness = match &m.rule {
        None => Properness::WindowProper,
        Some(rule) => probe_properness(m, rule),
    };
    Ok(ControlReport { k_out, properness })
}

// Preimages of the codomain core must not reach the far shell of a probe
// region twice the size of the domain window.
fn probe_properness(m: &SpaceMap, rule: &Rule) -> Properness {
    let dom = &m.domain;
    let cod = &m.codomain;
    let reach = dom.core_radius() + dom.faithful_radius();
    for p in dom.spec().ball(2 * reach + 2) {
        if dom.spec().depth(&p) <= reach {
            continue;
        }
        let q = rule(&p);
        if cod.index_of(&q).is_some_and(|t| cod.core()[t]) {
            return Properness::Improper { witness: p };
        }
    }
    Properness::Proper
}

/// Least `k` with `(f(x), g(x)) ∈ U_k` for all domain points, or `None` when
/// some pair of images lies in different components.
pub fn check_close(f: &SpaceMap, g: &SpaceMap) -> Option<u32> {
    assert_eq!(f.domain.len(), g.domain.len(), "maps must share a domain");
    let spec = f.codomain.spec();
    let mut k = 0;
    for i in 0..f.domain.len() {
        k = k.max(spec.dist(&f.images[i], &g.images[i])?);
    }
    Some(k)
}

/// Certificate that an endomap implements flasqueness on the window.
#[derive(Clone, Debug)]
pub struct FlasquenessWitness {
    pub map: SpaceMap,
    pub closeness: u32,
    /// `(r, n0)`: iterates `f^n` with `n ≥ n0` avoid the ball of radius `r`.
    pub escape: Vec<(u32, usize)>,
    /// `(k, k')`: all iterates map `U_k` into `U_{k'}`.
    pub envelope: Vec<(u32, u32)>,
    pub horizon: usize,
}

impl FlasquenessWitness {
    /// Iterations after which every point of the window has left the ball of
    /// radius `r`.
    pub fn escape_time(&self, r: u32) -> Option<usize> {
        self.escape.iter().find(|(rr, _)| *rr >= r).map(|(_, n)| *n)
    }

    pub fn envelope_at(&self, k: u32) -> Option<u32> {
        self.envelope.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v)
    }
}

fn not_flasque(condition: &'static str, detail: String) -> Error {
    Error::NotFlasque { condition, detail }
}

/// Verifies the three flasqueness conditions for an endomap given by an
/// ambient rule: closeness to the identity, uniform escape of bounded sets,
/// and a uniform control envelope for all iterates.
pub fn certify_flasqueness(w: &Window, f: &SpaceMap) -> Result<FlasquenessWitness> {
    let rule = f
        .rule
        .clone()
        .ok_or_else(|| Error::InvalidArgument("flasqueness needs a map given by an ambient rule".into()))?;
    let spec = w.spec();
    let closeness = (0..w.len())
        .map(|i| spec.dist(w.point(i), &rule(w.point(i))))
        .try_fold(0u32, |acc, d| d.map(|d| acc.max(d)))
        .ok_or_else(|| not_flasque("close to identity", "some point changes component".into()))?;

    let reach = w.core_radius() + w.faithful_radius();
    let horizon = 4 * (2 * reach as usize + 2) + 4;
    let orbits = |radius: u32| -> Vec<Vec<Point>> {
        spec.ball(radius)
            .into_iter()
            .map(|p| {
                let mut orbit = Vec::with_capacity(horizon + 1);
                orbit.push(p);
                for n in 0..horizon {
                    let next = rule(&orbit[n]);
                    orbit.push(next);
                }
                orbit
            })
            .collect()
    };
    let near = orbits(reach);
    let far = orbits(2 * reach + 2);

    let escape_time = |orbs: &[Vec<Point>], r: u32| -> Option<usize> {
        let mut n0 = 0;
        for orbit in orbs {
            if spec.depth(&orbit[horizon]) <= r {
                return None;
            }
            if let Some(last) = orbit.iter().rposition(|q| spec.depth(q) <= r) {
                n0 = n0.max(last + 1);
            }
        }
        Some(n0)
    };
    let mut escape = Vec::new();
    for r in 0..=w.core_radius() {
        let n_near = escape_time(&near, r)
            .ok_or_else(|| not_flasque("escape", format!("the ball of radius {r} is never left")))?;
        let n_far = escape_time(&far, r)
            .ok_or_else(|| not_flasque("escape", format!("the ball of radius {r} is never left")))?;
        if n_far > n_near {
            return Err(not_flasque(
                "escape",
                format!("escape time from radius {r} grows with the region ({n_near} -> {n_far})"),
            ));
        }
        escape.push((r, n_near));
    }

    let kmax = w.faithful_radius().clamp(1, 4);
    let mut envelope = Vec::new();
    for k in 1..=kmax {
        let mut first_half = 0;
        let mut full = 0;
        for a in 0..near.len() {
            for b in a + 1..near.len() {
                if !spec.dist(&near[a][0], &near[b][0]).is_some_and(|d| d <= k) {
                    continue;
                }
                for n in 0..=horizon {
                    let d = spec.dist(&near[a][n], &near[b][n]).ok_or_else(|| {
                        not_flasque("uniform control", format!("iterates of {:?} separate components", near[a][0]))
                    })?;
                    full = full.max(d);
                    if n <= horizon / 2 {
                        first_half = first_half.max(d);
                    }
                }
            }
        }
        if full > first_half {
            return Err(not_flasque(
                "uniform control",
                format!("spread of U_{k} under iterates keeps growing ({first_half} -> {full})"),
            ));
        }
        envelope.push((k, full));
    }
    Ok(FlasquenessWitness { map: f.clone(), closeness, escape, envelope, horizon })
}

#[cfg(test)]
mod tests {
    use super::super::ambient::AmbientSpec;
    use super::super::window::make_window;
    use super::*;

    fn line(core: u32, pad: u32) -> Arc<Window> {
        Arc::new(make_window(&AmbientSpec::grid(1), core, pad).unwrap())
    }

    #[test]
    fn identity_and_dilation() {
        let w = line(6, 6);
        let id = SpaceMap::identity(w.clone());
        assert_eq!(check_controlled_proper(&id, 3).unwrap().k_out, 3);
        let big = Arc::new(make_window(&AmbientSpec::grid(1), 24, 4).unwrap());
        let double = SpaceMap::from_rule(w, big, Arc::new(|p: &[i64]| vec![2 * p[0]])).unwrap();
        let rep = check_controlled_proper(&double, 1).unwrap();
        assert_eq!(rep.k_out, 2);
        assert_eq!(rep.properness, Properness::Proper);
    }

    #[test]
    fn parity_map_is_not_proper() {
        let w = line(6, 2);
        let two = Arc::new(make_window(&AmbientSpec::finite(vec![vec![0, 1], vec![1, 0]]), 1, 0).unwrap());
        let parity = SpaceMap::from_rule(w, two, Arc::new(|p: &[i64]| vec![p[0].rem_euclid(2)])).unwrap();
        let rep = check_controlled_proper(&parity, 1).unwrap();
        assert_eq!(rep.k_out, 1);
        assert!(matches!(rep.properness, Properness::Improper { .. }));
    }

    #[test]
    fn closeness() {
        let w = line(5, 5);
        let id = SpaceMap::identity(w.clone());
        let s = SpaceMap::shift(w, vec![1]).unwrap();
        assert_eq!(check_close(&id, &id), Some(0));
        assert_eq!(check_close(&id, &s), Some(1));
        assert_eq!(check_close(&s, &id), Some(1));
    }

    #[test]
    fn flasque_ray_but_not_line() {
        let ray = Arc::new(make_window(&AmbientSpec::Halfline, 4, 4).unwrap());
        let f = SpaceMap::shift(ray.clone(), vec![1]).unwrap();
        let wit = certify_flasqueness(&ray, &f).unwrap();
        assert_eq!(wit.closeness, 1);
        assert_eq!(wit.envelope_at(1), Some(1));
        assert_eq!(wit.escape_time(0), Some(1));

        let w = line(4, 4);
        let g = SpaceMap::shift(w.clone(), vec![1]).unwrap();
        match certify_flasqueness(&w, &g) {
            Err(Error::NotFlasque { condition, .. }) => assert_eq!(condition, "escape"),
            other => panic!("unexpected {other:?}"),
        }

        let pt = Arc::new(make_window(&AmbientSpec::point(), 0, 0).unwrap());
        let id = SpaceMap::identity(pt.clone());
        assert!(matches!(certify_flasqueness(&pt, &id), Err(Error::NotFlasque { condition: "escape", .. })));
    }
}
