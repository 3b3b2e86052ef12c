use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Ambient coordinates. Layout depends on the [`AmbientSpec`]: grids use `d`
/// integers, the half-line and finite spaces one, free unions prepend the
/// component index, products concatenate the factors.
pub type Point = Vec<i64>;

/// Symbolic description of a (possibly infinite) metric space with integer
/// distances. Grids carry the sup metric on `Z^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AmbientSpec {
    Grid { d: usize },
    Halfline,
    Finite {
        #[serde(default)]
        points: Vec<Value>,
        dist: Vec<Vec<u32>>,
    },
    FreeUnion(Vec<AmbientSpec>),
    Product(Box<AmbientSpec>, Box<AmbientSpec>),
}

impl AmbientSpec {
    pub fn point() -> Self {
        AmbientSpec::Finite { points: Vec::new(), dist: vec![vec![0]] }
    }

    pub fn finite(dist: Vec<Vec<u32>>) -> Self {
        AmbientSpec::Finite { points: Vec::new(), dist }
    }

    pub fn grid(d: usize) -> Self {
        AmbientSpec::Grid { d }
    }

    /// Checks parameters and, for finite tables, the metric axioms.
    pub fn validate(&self) -> Result<()> {
        match self {
            AmbientSpec::Grid { d } if *d == 0 => Err(Error::InvalidSpec("grid dimension must be positive".into())),
            AmbientSpec::Grid { .. } | AmbientSpec::Halfline => Ok(()),
            AmbientSpec::Finite { points, dist } => validate_table(points, dist),
            AmbientSpec::FreeUnion(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidSpec("free union needs at least one part".into()));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            AmbientSpec::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    /// Number of leading coordinates of `p` that belong to this space.
    pub fn point_len(&self, p: &[i64]) -> usize {
        match self {
            AmbientSpec::Grid { d } => *d,
            AmbientSpec::Halfline | AmbientSpec::Finite { .. } => 1,
            AmbientSpec::FreeUnion(parts) => 1 + parts[p[0] as usize].point_len(&p[1..]),
            AmbientSpec::Product(a, b) => {
                let l = a.point_len(p);
                l + b.point_len(&p[l..])
            }
        }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.contains_prefix(p) == Some(p.len())
    }

    fn contains_prefix(&self, p: &[i64]) -> Option<usize> {
        match self {
            AmbientSpec::Grid { d } => (p.len() >= *d).then_some(*d),
            AmbientSpec::Halfline => (p.first()? >= &0).then_some(1),
            AmbientSpec::Finite { dist, .. } => {
                let i = *p.first()?;
                (i >= 0 && (i as usize) < dist.len()).then_some(1)
            }
            AmbientSpec::FreeUnion(parts) => {
                let c = *p.first()?;
                let part = parts.get(usize::try_from(c).ok()?)?;
                Some(1 + part.contains_prefix(&p[1..])?)
            }
            AmbientSpec::Product(a, b) => {
                let l = a.contains_prefix(p)?;
                Some(l + b.contains_prefix(&p[l..])?)
            }
        }
    }

    /// Distance, or `None` for points in different coarse components.
    pub fn dist(&self, p: &[i64], q: &[i64]) -> Option<u32> {
        match self {
            AmbientSpec::Grid { d } => Some(
                p[..*d]
                    .iter()
                    .zip(&q[..*d])
                    .map(|(a, b)| a.abs_diff(*b) as u32)
                    .max()
                    .unwrap_or(0),
            ),
            AmbientSpec::Halfline => Some(p[0].abs_diff(q[0]) as u32),
            AmbientSpec::Finite { dist, .. } => Some(dist[p[0] as usize][q[0] as usize]),
            AmbientSpec::FreeUnion(parts) => {
                if p[0] != q[0] {
                    return None;
                }
                parts[p[0] as usize].dist(&p[1..], &q[1..])
            }
            AmbientSpec::Product(a, b) => {
                let (lp, lq) = (a.point_len(p), a.point_len(q));
                let da = a.dist(&p[..lp], &q[..lq])?;
                let db = b.dist(&p[lp..], &q[lq..])?;
                Some(da.max(db))
            }
        }
    }

    /// Distance from `p` to the basepoint of its component.
    pub fn depth(&self, p: &[i64]) -> u32 {
        match self {
            AmbientSpec::Grid { d } => p[..*d].iter().map(|x| x.unsigned_abs() as u32).max().unwrap_or(0),
            AmbientSpec::Halfline => p[0] as u32,
            AmbientSpec::Finite { dist, .. } => dist[0][p[0] as usize],
            AmbientSpec::FreeUnion(parts) => parts[p[0] as usize].depth(&p[1..]),
            AmbientSpec::Product(a, b) => {
                let l = a.point_len(p);
                a.depth(&p[..l]).max(b.depth(&p[l..]))
            }
        }
    }

    /// Identifies the coarse component of `p`: the free-union tags along
    /// its coordinates.
    pub fn component_key(&self, p: &[i64]) -> Vec<i64> {
        match self {
            AmbientSpec::Grid { .. } | AmbientSpec::Halfline | AmbientSpec::Finite { .. } => Vec::new(),
            AmbientSpec::FreeUnion(parts) => {
                let mut key = vec![p[0]];
                key.extend(parts[p[0] as usize].component_key(&p[1..]));
                key
            }
            AmbientSpec::Product(a, b) => {
                let l = a.point_len(p);
                let mut key = a.component_key(&p[..l]);
                key.push(-1);
                key.extend(b.component_key(&p[l..]));
                key
            }
        }
    }

    /// All points within `r` of their component basepoint, sorted
    /// lexicographically.
    pub fn ball(&self, r: u32) -> Vec<Point> {
        let mut out = self.ball_unsorted(r);
        out.sort();
        out
    }

    fn ball_unsorted(&self, r: u32) -> Vec<Point> {
        let r = r as i64;
        match self {
            AmbientSpec::Grid { d } => {
                let mut out: Vec<Point> = vec![Vec::new()];
                for _ in 0..*d {
                    out = out
                        .into_iter()
                        .flat_map(|p| {
                            (-r..=r).map(move |x| {
                                let mut q = p.clone();
                                q.push(x);
                                q
                            })
                        })
                        .collect();
                }
                out
            }
            AmbientSpec::Halfline => (0..=r).map(|x| vec![x]).collect(),
            AmbientSpec::Finite { dist, .. } => (0..dist.len())
                .filter(|&i| dist[0][i] as i64 <= r)
                .map(|i| vec![i as i64])
                .collect(),
            AmbientSpec::FreeUnion(parts) => parts
                .iter()
                .enumerate()
                .flat_map(|(c, part)| {
                    part.ball_unsorted(r as u32).into_iter().map(move |p| {
                        let mut q = vec![c as i64];
                        q.extend(p);
                        q
                    })
                })
                .collect(),
            AmbientSpec::Product(a, b) => {
                let bb = b.ball_unsorted(r as u32);
                a.ball_unsorted(r as u32)
                    .into_iter()
                    .flat_map(|p| {
                        bb.iter().map(move |q| {
                            let mut x = p.clone();
                            x.extend(q);
                            x
                        })
                    })
                    .collect()
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            AmbientSpec::Grid { d } if *d == 1 => "Z".into(),
            AmbientSpec::Grid { d } => format!("Z^{d}"),
            AmbientSpec::Halfline => "Z+".into(),
            AmbientSpec::Finite { dist, .. } if dist.len() == 1 => "pt".into(),
            AmbientSpec::Finite { dist, .. } => format!("finite({})", dist.len()),
            AmbientSpec::FreeUnion(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("({})", names.join(" | "))
            }
            AmbientSpec::Product(a, b) => format!("{} x {}", a.describe(), b.describe()),
        }
    }
}

fn validate_table(points: &[Value], dist: &[Vec<u32>]) -> Result<()> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::InvalidSpec("finite space needs at least one point".into()));
    }
    if !points.is_empty() && points.len() != n {
        return Err(Error::InvalidSpec(format!("{} point labels for a {n}x{n} distance table", points.len())));
    }
    if let Some(i) = dist.iter().position(|row| row.len() != n) {
        return Err(Error::InvalidSpec(format!("distance row {i} has length {}, expected {n}", dist[i].len())));
    }
    for i in 0..n {
        for j in 0..n {
            if (dist[i][j] == 0) != (i == j) {
                return Err(Error::MetricViolation(format!("d({i},{j}) = {} breaks definiteness", dist[i][j])));
            }
            if dist[i][j] != dist[j][i] {
                return Err(Error::MetricViolation(format!("d({i},{j}) != d({j},{i})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if dist[i][l] > dist[i][j] + dist[j][l] {
                    return Err(Error::MetricViolation(format!(
                        "triangle ({i},{j},{l}): d({i},{l}) = {} > {} + {}",
                        dist[i][l], dist[i][j], dist[j][l]
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let spec = AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::Halfline]);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"free_union","params":[{"kind":"grid","params":{"d":1}},{"kind":"halfline"}]}"#);
        let back: AmbientSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn triangle_violation_is_named() {
        let spec = AmbientSpec::finite(vec![vec![0, 1, 3], vec![1, 0, 1], vec![3, 1, 0]]);
        match spec.validate() {
            Err(Error::MetricViolation(msg)) => assert!(msg.contains("triangle (0,1,2)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn product_metric_is_max() {
        let spec = AmbientSpec::Product(Box::new(AmbientSpec::grid(1)), Box::new(AmbientSpec::Halfline));
        assert_eq!(spec.dist(&[0, 0], &[2, 5]), Some(5));
        assert_eq!(spec.ball(1).len(), 6);
    }
}
