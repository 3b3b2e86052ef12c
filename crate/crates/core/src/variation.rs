//! Variation functionals of functions on windows and the extension of
//! functions with vanishing variation at infinity from a convex subset.

use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{check_u_convex, Window};

/// Slack for every floating comparison.
pub const TOLERANCE: f64 = 1e-9;

/// A function on part of a window with complex values.
#[derive(Clone, Debug)]
pub struct VariationFunction {
    window: Arc<Window>,
    domain: Vec<bool>,
    values: Vec<Complex64>,
}

impl VariationFunction {
    /// Values outside `domain` are ignored.
    pub fn new(window: Arc<Window>, domain: Vec<bool>, values: Vec<Complex64>) -> Result<Self> {
        if domain.len() != window.len() || values.len() != window.len() {
            return Err(Error::Dimension("function data does not match the window".into()));
        }
        if values.iter().zip(&domain).any(|(v, &d)| d && !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("function values must be finite".into()));
        }
        Ok(VariationFunction { window, domain, values })
    }

    /// Real-valued function of the ambient point on `domain`.
    pub fn from_fn(window: Arc<Window>, domain: Vec<bool>, f: impl Fn(&[i64]) -> f64) -> Result<Self> {
        let values = window.points().iter().map(|p| Complex64::new(f(p), 0.0)).collect();
        Self::new(window, domain, values)
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn domain(&self) -> &[bool] {
        &self.domain
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Word metric of the `U_k`-graph of a window, by breadth-first search.
#[derive(Clone, Debug)]
pub struct PathMetric {
    scale: u32,
    adj: Vec<Vec<usize>>,
}

impl PathMetric {
    pub fn new(w: &Window, k: u32) -> Self {
        let adj = w
            .neighbors(k, &w.full_mask())
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.into_iter().filter(|&j| j != i).collect())
            .collect();
        PathMetric { scale: k, adj }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Distances from the sources, `None` where unreachable.
    pub fn from_sources(&self, sources: impl IntoIterator<Item = usize>) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance") + 1;
            for &u in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Points within `r` of `x`.
    pub fn ball(&self, x: usize, r: u32) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = vec![x];
        seen[x] = true;
        let mut frontier = vec![x];
        for _ in 0..r {
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(&next);
            frontier = next;
        }
        out
    }

    /// Connected components as labels.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.adj.len()];
        let mut next = 0;
        for s in 0..self.adj.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if label[u] == usize::MAX {
                        label[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// `sup ‖f(x) − f(y)‖` over pairs of `y_set ∩ domain` at distance at most `k`.
pub fn u_variation(f: &VariationFunction, y_set: &[bool], k: u32) -> f64 {
    let w = &f.window;
    let pts: Vec<usize> = (0..w.len()).filter(|&i| y_set[i] && f.domain[i]).collect();
    let mut best: f64 = 0.0;
    for (a, &x) in pts.iter().enumerate() {
        for &y in &pts[a + 1..] {
            if w.within(x, y, k) {
                best = best.max((f.values[x] - f.values[y]).norm());
            }
        }
    }
    best
}

/// Variation over pairs joined by a path of at most `steps` edges of the
/// metric's graph, i.e. for the composite entourage `U^steps`.
pub fn composite_variation(f: &VariationFunction, metric: &PathMetric, y_set: &[bool], steps: u32) -> f64 {
    let w = &f.window;
    let mut best: f64 = 0.0;
    for x in (0..w.len()).filter(|&i| y_set[i] && f.domain[i]) {
        for y in metric.ball(x, steps) {
            if y_set[y] && f.domain[y] {
                best = best.max((f.values[x] - f.values[y]).norm());
            }
        }
    }
    best
}

/// `U^steps[b]` for the metric's graph.
pub fn thicken_steps(metric: &PathMetric, b: &[bool], steps: u32) -> Vec<bool> {
    let d = metric.from_sources((0..b.len()).filter(|&i| b[i]));
    d.into_iter().map(|x| x.is_some_and(|x| x <= steps)).collect()
}

/// `(∇_R f)(x) = sup ‖f(x) − f(y)‖` over `y` in the domain within `R` of `x`.
pub fn nabla(f: &VariationFunction, metric: &PathMetric, r: u32, x: usize) -> f64 {
    if !f.domain[x] {
        return 0.0;
    }
    metric
        .ball(x, r)
        .into_iter()
        .filter(|&y| f.domain[y])
        .map(|y| (f.values[x] - f.values[y]).norm())
        .fold(0.0, f64::max)
}

/// A monotone subadditive function on `0..=T`, stored in half-units so that
/// `ρ(t) = half_units[t] / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoTable {
    pub half_units: Vec<u64>,
    /// Positions where `ρ̃` vanished and `ρ` was raised to one half-unit.
    pub floored: Vec<usize>,
}

impl RhoTable {
    pub fn value(&self, t: usize) -> f64 {
        let i = t.min(self.half_units.len() - 1);
        self.half_units[i] as f64 / 2.0
    }

    pub fn is_subadditive(&self) -> bool {
        let h = &self.half_units;
        (0..h.len()).all(|t| (1..t).all(|a| h[t] <= h[a] + h[t - a]))
    }

    pub fn is_monotone(&self) -> bool {
        self.half_units.windows(2).all(|p| p[0] <= p[1])
    }
}

/// Largest monotone subadditive `ρ` with `ρ ≤ ρ̃/2` and `ρ(t) > 0` for
/// `t > 0`. Where `ρ̃` vanishes the bound is relaxed to one half-unit.
/// Fails when `ρ̃` vanishes at every positive sample.
pub fn rho_construct(rho_tilde: &[u64]) -> Result<RhoTable> {
    if rho_tilde.first().is_some_and(|&x| x != 0) {
        return Err(Error::InvalidArgument("the sampled function must vanish at 0".into()));
    }
    if rho_tilde.windows(2).any(|p| p[0] > p[1]) {
        return Err(Error::InvalidArgument("the sampled function must be monotone".into()));
    }
    if rho_tilde.len() > 1 && rho_tilde[1..].iter().all(|&x| x == 0) {
        return Err(Error::InvalidArgument(
            "degenerate geometry: the sampled function vanishes at every positive argument".into(),
        ));
    }
    Ok(rho_hull(rho_tilde))
}

fn rho_hull(rho_tilde: &[u64]) -> RhoTable {
    let mut h = vec![0u64; rho_tilde.len()];
    let mut floored = Vec::new();
    for t in 1..rho_tilde.len() {
        let mut best = if rho_tilde[t] == 0 {
            floored.push(t);
            1
        } else {
            rho_tilde[t]
        };
        for a in 1..t {
            best = best.min(h[a] + h[t - a]);
        }
        h[t] = best;
    }
    RhoTable { half_units: h, floored }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    General,
    CoarseEquivalence,
    BoundedY,
    EmptyComponent,
}

/// Intermediate data of the general construction on one component.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralArtifacts {
    pub base: usize,
    /// Radii `r_n` of the exhaustion `Y_n = Y ∩ B(y₀, r_n)`.
    pub exhaustion: Vec<u32>,
    /// `v(y)` for points of `Y` (by window index; `None` off `Y`).
    pub v: Vec<Option<u32>>,
    pub rho_tilde: Vec<u64>,
    pub rho: RhoTable,
    pub f_set: Vec<bool>,
    /// The `y` with `x ∈ V_y`, for `x ∈ F`.
    pub partition: Vec<Option<usize>>,
    pub psi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentBranch {
    pub component: usize,
    pub branch: Branch,
    pub artifacts: Option<GeneralArtifacts>,
}

/// Maximum of `∇_R f̃` outside growing balls, for one `R`.
#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub radius: u32,
    pub balls: Vec<u32>,
    pub values: Vec<f64>,
    pub strict_decreases: usize,
    pub non_increasing: bool,
    /// Largest ball radius after which the profile stops decreasing.
    pub flagged: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCertificate {
    pub scale: u32,
    pub epsilon: f64,
    #[serde(skip)]
    pub extension: Vec<Complex64>,
    pub restriction_error: f64,
    pub branches: Vec<ComponentBranch>,
    pub profiles: Vec<Profile>,
    #[serde(skip)]
    source: Option<VariationFunction>,
    #[serde(skip)]
    metric: Option<PathMetric>,
}

impl ExtensionCertificate {
    /// Branch of the first component meeting `Y`.
    pub fn branch(&self) -> Branch {
        self.branches
            .iter()
            .map(|b| b.branch)
            .find(|b| *b != Branch::EmptyComponent)
            .unwrap_or(Branch::EmptyComponent)
    }

    pub fn general(&self) -> Option<&GeneralArtifacts> {
        self.branches.iter().find_map(|b| b.artifacts.as_ref())
    }
}

/// Extends `f` (given on `Y`) to the whole window with restriction error at
/// most `epsilon`, following the branch dictated by the geometry of `Y`.
pub fn extend_function(w: &Arc<Window>, y: &[bool], k: u32, f: &VariationFunction, epsilon: f64) -> Result<ExtensionCertificate> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !Arc::ptr_eq(w, &f.window) || y.len() != w.len() {
        return Err(Error::Incompatible("function, subset and window do not match".into()));
    }
    if (0..w.len()).any(|i| y[i] && !f.domain[i]) {
        return Err(Error::InvalidArgument("the function must be defined on all of Y".into()));
    }
    let convexity = check_u_convex(w, y, k);
    if !convexity.is_convex() {
        return Err(Error::NotConvex(format!("Y is not convex at scale {k}: {convexity:?}")));
    }
    let metric = PathMetric::new(w, k);
    let labels = metric.components();
    let ncomp = labels.iter().copied().max().map_or(0, |m| m + 1);
    let half = w.core_radius() / 2;
    let meets = |r: u32| -> usize {
        let mut seen = vec![false; ncomp];
        for i in 0..w.len() {
            if y[i] && w.depth(i) <= r {
                seen[labels[i]] = true;
            }
        }
        seen.into_iter().filter(|s| *s).count()
    };
    if meets(half) != meets(w.core_radius()) {
        return Err(Error::InvalidArgument(
            "the number of coarse components meeting Y grows with the window".into(),
        ));
    }

    let mut ext = vec![Complex64::new(0.0, 0.0); w.len()];
    let mut branches = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let comp: Vec<bool> = labels.iter().map(|&l| l == c).collect();
        let yc: Vec<usize> = (0..w.len()).filter(|&i| comp[i] && y[i]).collect();
        if yc.is_empty() {
            branches.push(ComponentBranch { component: c, branch: Branch::EmptyComponent, artifacts: None });
            continue;
        }
        let base = *yc.iter().min_by_key(|&&i| (w.depth(i), i)).expect("nonempty");
        let y_dist = metric.from_sources(yc.iter().copied());
        if yc.iter().all(|&i| w.depth(i) <= w.core_radius()) && bounded_in_core(w, &comp, &yc) {
            for i in (0..w.len()).filter(|&i| comp[i]) {
                ext[i] = if y[i] { f.values[i] } else { f.values[base] };
            }
            branches.push(ComponentBranch { component: c, branch: Branch::BoundedY, artifacts: None });
            continue;
        }
        let far = |r: u32| {
            (0..w.len())
                .filter(|&i| comp[i] && w.depth(i) <= r)
                .filter_map(|i| y_dist[i])
                .max()
                .unwrap_or(0)
        };
        if far(half) == far(w.core_radius()) {
            for i in (0..w.len()).filter(|&i| comp[i]) {
                let dy = metric.from_sources([i]);
                let j = yc
                    .iter()
                    .copied()
                    .min_by_key(|&q| (dy[q].unwrap_or(u32::MAX), q))
                    .expect("nonempty");
                ext[i] = f.values[j];
            }
            branches.push(ComponentBranch { component: c, branch: Branch::CoarseEquivalence, artifacts: None });
            continue;
        }
        let art = general_branch(w, &metric, &comp, y, &yc, base, &y_dist, f, epsilon)?;
        let offset = f.values[base];
        for i in (0..w.len()).filter(|&i| comp[i]) {
            let inner = match art.partition[i] {
                Some(yy) if art.f_set[i] => (f.values[yy] - offset) * art.psi[i],
                _ => Complex64::new(0.0, 0.0),
            };
            ext[i] = inner + offset;
        }
        branches.push(ComponentBranch { component: c, branch: Branch::General, artifacts: Some(art) });
    }

    let restriction_error = (0..w.len())
        .filter(|&i| y[i])
        .map(|i| (ext[i] - f.values[i]).norm())
        .fold(0.0, f64::max);
    if restriction_error > epsilon + TOLERANCE {
        return Err(Error::Verification(format!(
            "restriction error {restriction_error} exceeds epsilon {epsilon}"
        )));
    }
    let mut cert = ExtensionCertificate {
        scale: k,
        epsilon,
        extension: ext,
        restriction_error,
        branches,
        profiles: Vec::new(),
        source: Some(f.clone()),
        metric: Some(metric),
    };
    cert.profiles = profiles(&cert, w, &[1, 2, 4])?;
    Ok(cert)
}

fn bounded_in_core(w: &Window, comp: &[bool], yc: &[usize]) -> bool {
    // Unbounded subsets reach past the core of any window that contains them.
    let reach = w.core_radius();
    comp.iter().enumerate().filter(|(_, &c)| c).any(|(i, _)| w.depth(i) > reach)
        || yc.iter().all(|&i| w.depth(i) < reach)
}

#[allow(clippy::too_many_arguments)]
fn general_branch(
    w: &Window,
    metric: &PathMetric,
    comp: &[bool],
    y: &[bool],
    yc: &[usize],
    base: usize,
    y_dist: &[Option<u32>],
    f: &VariationFunction,
    epsilon: f64,
) -> Result<GeneralArtifacts> {
    let n = w.len();
    let k = metric.scale();
    let limit = w.core_radius() + w.faithful_radius();
    let reliable = |i: usize, r: u32| w.depth(i) + r * k <= limit;
    let d0 = metric.from_sources([base]);
    let on_y = VariationFunction {
        window: f.window.clone(),
        domain: y.to_vec(),
        values: f.values.iter().map(|v| v - f.values[base]).collect(),
    };

    let mut exhaustion: Vec<u32> = Vec::new();
    for step in 0.. {
        let r = 1u32 << (step + 1).min(30);
        let threshold = epsilon / f64::from(r);
        // Points whose R-ball leaves the window are not audited; they fall
        // into the last layer.
        let bad = yc
            .iter()
            .copied()
            .filter(|&i| reliable(i, r) && nabla(&on_y, metric, r, i) > threshold)
            .filter_map(|i| d0[i])
            .max()
            .unwrap_or(0);
        let radius = bad.max(exhaustion.last().copied().unwrap_or(0));
        let audited_outside = yc.iter().any(|&i| d0[i].is_some_and(|d| d > radius) && reliable(i, r));
        if !audited_outside {
            break;
        }
        exhaustion.push(radius);
    }
    if exhaustion.is_empty() {
        return Err(Error::WindowTooSmall(format!("window too small for epsilon {epsilon}")));
    }
    let steps = exhaustion.len() as u32;
    let mut v = vec![None; n];
    for &i in yc {
        let d = d0[i].expect("same component");
        v[i] = Some(exhaustion.iter().position(|&r| d <= r).map_or(steps, |p| p as u32));
    }

    // U_y = B(y, ⌊√v(y)⌋); membership[x] lists the y with x ∈ U_y.
    let mut cover: Vec<Option<usize>> = vec![None; n];
    let mut covered = vec![false; n];
    for &yy in yc {
        let r = (f64::from(v[yy].expect("set on Y"))).sqrt().floor() as u32;
        for x in metric.ball(yy, r) {
            covered[x] = true;
            if cover[x].is_none_or(|c| w.point(yy) < w.point(c)) {
                cover[x] = Some(yy);
            }
        }
    }

    let t_max = (0..n).filter(|&i| comp[i]).filter_map(|i| d0[i]).max().unwrap_or(0) as usize;
    let mut rho_tilde = vec![0u64; t_max + 1];
    for x in (0..n).filter(|&i| comp[i] && covered[i]) {
        let t = d0[x].expect("same component") as usize;
        rho_tilde[t] = rho_tilde[t].max(u64::from(y_dist[x].expect("same component")));
    }
    for t in 1..=t_max {
        rho_tilde[t] = rho_tilde[t].max(rho_tilde[t - 1]);
    }
    let rho = rho_hull(&rho_tilde);
    if !rho.is_subadditive() || !rho.is_monotone() {
        return Err(Error::Verification("constructed rho is not monotone and subadditive".into()));
    }

    let mut f_set = vec![false; n];
    let mut psi = vec![0.0; n];
    for x in (0..n).filter(|&i| comp[i]) {
        let t = d0[x].expect("same component") as usize;
        let dy = f64::from(y_dist[x].expect("same component"));
        let r = rho.value(t);
        f_set[x] = y[x] || (t > 0 && dy <= r);
        psi[x] = if t == 0 || y[x] {
            if y[x] { 1.0 } else { 0.0 }
        } else {
            ((r - dy) / r).max(0.0)
        };
        if f_set[x] && !covered[x] {
            return Err(Error::Verification(format!("point {:?} of F is not covered by any U_y", w.point(x))));
        }
    }
    let partition = (0..n).map(|x| if f_set[x] { cover[x] } else { None }).collect();
    Ok(GeneralArtifacts { base, exhaustion, v, rho_tilde, rho, f_set, partition, psi })
}

fn profiles(cert: &ExtensionCertificate, w: &Window, radii: &[u32]) -> Result<Vec<Profile>> {
    let metric = cert.metric.as_ref().ok_or_else(|| Error::InvalidArgument("certificate without metric".into()))?;
    let ext = VariationFunction {
        window: cert.source.as_ref().expect("set with metric").window.clone(),
        domain: w.full_mask(),
        values: cert.extension.clone(),
    };
    let k = metric.scale();
    let limit = w.core_radius() + w.faithful_radius();
    Ok(radii
        .iter()
        .map(|&r| {
            let grad: Vec<Option<f64>> = (0..w.len())
                .map(|i| (w.depth(i) + r * k <= limit).then(|| nabla(&ext, metric, r, i)))
                .collect();
            let mut balls = Vec::new();
            let mut values = Vec::new();
            let mut b = 1;
            loop {
                let outside: Vec<f64> = (0..w.len()).filter(|&i| w.depth(i) > b).filter_map(|i| grad[i]).collect();
                if outside.is_empty() {
                    break;
                }
                balls.push(b);
                values.push(outside.into_iter().fold(0.0, f64::max));
                b *= 2;
            }
            profile_summary(r, balls, values)
        })
        .collect())
}

fn profile_summary(radius: u32, balls: Vec<u32>, values: Vec<f64>) -> Profile {
    let strict_decreases = values.windows(2).filter(|p| p[1] < p[0] - TOLERANCE).count();
    let non_increasing = values.windows(2).all(|p| p[1] <= p[0] + TOLERANCE);
    let flagged = values
        .windows(2)
        .enumerate()
        .filter(|(_, p)| p[0] > TOLERANCE && p[1] >= p[0] - TOLERANCE)
        .map(|(i, _)| balls[i])
        .last();
    Profile { radius, balls, values, strict_decreases, non_increasing, flagged }
}

/// Audit of a certificate.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionAudit {
    pub restriction_error: f64,
    pub epsilon: f64,
    pub profiles: Vec<Profile>,
}

impl ExtensionAudit {
    pub fn profile(&self, r: u32) -> Option<&Profile> {
        self.profiles.iter().find(|p| p.radius == r)
    }
}

/// Re-checks the restriction error and recomputes the decay profiles.
pub fn verify_extension(cert: &ExtensionCertificate, radii: &[u32], epsilon: f64) -> Result<ExtensionAudit> {
    let f = cert.source.as_ref().ok_or_else(|| Error::InvalidArgument("certificate without source".into()))?;
    let w = f.window.clone();
    let err = (0..w.len())
        .filter(|&i| f.domain[i])
        .map(|i| (cert.extension[i] - f.values[i]).norm())
        .fold(0.0, f64::max);
    if err > epsilon + TOLERANCE {
        return Err(Error::Verification(format!("restriction error {err} exceeds epsilon {epsilon}")));
    }
    Ok(ExtensionAudit { restriction_error: err, epsilon, profiles: profiles(cert, &w, radii)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, AmbientSpec};

    fn line(core: u32, pad: u32) -> Arc<Window> {
        Arc::new(make_window(&AmbientSpec::grid(1), core, pad).unwrap())
    }

    #[test]
    fn variation_basics() {
        let w = line(6, 0);
        let all = w.full_mask();
        let id = VariationFunction::from_fn(w.clone(), all.clone(), |p| p[0] as f64).unwrap();
        assert_eq!(u_variation(&id, &all, 3), 3.0);
        let c = VariationFunction::from_fn(w.clone(), all.clone(), |_| 2.0).unwrap();
        assert_eq!(u_variation(&c, &all, 3), 0.0);
        let m = PathMetric::new(&w, 1);
        let x = w.index_of(&[0]).unwrap();
        assert_eq!(nabla(&id, &m, 2, x), 2.0);
        assert_eq!(nabla(&c, &m, 4, x), 0.0);
    }

    #[test]
    fn composite_inequality() {
        let w = line(10, 4);
        let all = w.full_mask();
        let f = VariationFunction::from_fn(w.clone(), all.clone(), |p| p[0].min(5) as f64).unwrap();
        let m = PathMetric::new(&w, 1);
        let b = w.mask(|p| (0..=2).contains(&p[0]));
        let outside_b: Vec<bool> = b.iter().map(|x| !x).collect();
        let thick: Vec<bool> = thicken_steps(&m, &b, 3).iter().map(|x| !x).collect();
        let lhs = composite_variation(&f, &m, &thick, 3);
        let rhs = composite_variation(&f, &m, &outside_b, 1);
        assert!(lhs <= 3.0 * rhs);
        assert_eq!(lhs, 3.0);
    }

    #[test]
    fn rho_examples() {
        let lin: Vec<u64> = (0..12).collect();
        let r = rho_construct(&lin).unwrap();
        assert!((0..12).all(|t| r.value(t) == t as f64 / 2.0));
        assert!(rho_construct(&[0, 0, 0, 0]).is_err());
        let mut g = vec![0, 2, 2, 8, 8, 8, 9, 9, 12];
        g.extend([12; 8]);
        let r = rho_construct(&g).unwrap();
        assert!(r.is_subadditive() && r.is_monotone());
        assert!(r.half_units.iter().zip(&g).all(|(h, g)| h <= g));
        assert_eq!(r.half_units[3], 4);
    }

    #[test]
    fn ray_in_line() {
        let w = line(120, 8);
        let y = w.mask(|p| p[0] >= 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |p| 1.0 / (1.0 + p[0] as f64)).unwrap();
        for eps in [0.1, 0.01] {
            let cert = extend_function(&w, &y, 1, &f, eps).unwrap();
            assert_eq!(cert.branch(), Branch::General);
            assert!(cert.restriction_error <= eps + TOLERANCE);
            let art = cert.general().unwrap();
            assert!(art.exhaustion.len() >= 2, "{:?}", art.exhaustion);
            let audit = verify_extension(&cert, &[1], eps).unwrap();
            let p = audit.profile(1).unwrap();
            assert!(p.non_increasing && p.strict_decreases >= 3, "{p:?}");
        }
    }

    #[test]
    fn bounded_and_constant() {
        let w = line(10, 4);
        let y = w.mask(|p| p[0] == 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |_| 3.5).unwrap();
        let cert = extend_function(&w, &y, 1, &f, 0.01).unwrap();
        assert_eq!(cert.branch(), Branch::BoundedY);
        assert_eq!(cert.restriction_error, 0.0);
        assert!(cert.extension.iter().all(|v| *v == Complex64::new(3.5, 0.0)));

        let y = w.mask(|p| p[0] >= 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |_| -1.0).unwrap();
        let cert = extend_function(&w, &y, 1, &f, 0.01).unwrap();
        assert_eq!(cert.restriction_error, 0.0);
        let audit = verify_extension(&cert, &[1, 2], 0.01).unwrap();
        assert!(audit.profiles.iter().all(|p| p.values.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn dense_subset_and_other_components() {
        let w = line(16, 4);
        let y = w.mask(|p| p[0] % 2 == 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |p| 1.0 / (1.0 + p[0].abs() as f64)).unwrap();
        let cert = extend_function(&w, &y, 2, &f, 0.1).unwrap();
        assert_eq!(cert.branch(), Branch::CoarseEquivalence);
        assert_eq!(cert.restriction_error, 0.0);

        let spec = AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::grid(1)]);
        let w = Arc::new(make_window(&spec, 12, 4).unwrap());
        let y = w.mask(|p| p[0] == 0 && p[1] >= 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |p| 1.0 / (1.0 + p[1] as f64)).unwrap();
        let cert = extend_function(&w, &y, 1, &f, 0.1).unwrap();
        let kinds: Vec<Branch> = cert.branches.iter().map(|b| b.branch).collect();
        assert_eq!(kinds, [Branch::General, Branch::EmptyComponent]);
        assert!((0..w.len()).filter(|&i| w.point(i)[0] == 1).all(|i| cert.extension[i] == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn rejects_bad_input() {
        let w = line(10, 4);
        let y = w.mask(|p| p[0] % 2 == 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |_| 0.0).unwrap();
        assert!(matches!(extend_function(&w, &y, 1, &f, 0.1), Err(Error::NotConvex(_))));
        let y = w.mask(|p| p[0] >= 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |_| 0.0).unwrap();
        assert!(extend_function(&w, &y, 1, &f, 0.0).is_err());
    }
}
