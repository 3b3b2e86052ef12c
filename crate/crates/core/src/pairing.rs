//! Controlled chains on windows and their Kronecker pairing with cochains.

use std::collections::BTreeMap;
use std::sync::Arc;

use ibig::IBig;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{canonical, coboundary_eval, Backend, CochainBasis, Simplex, SparseCochain};
use crate::error::{Error, Result};
use crate::snf::{Int, SparseMatrix, SparseVec};
use crate::space::{Point, SpaceMap, Window};

/// Coefficient of an ambient simplex, given by its vertices in basis order.
pub type ChainRule = Arc<dyn Fn(&[Point]) -> i64 + Send + Sync>;

/// Window fragment of a locally finite controlled chain. When the chain
/// comes from an ambient rule, the rule is kept so the fragment can be
/// re-cut on a larger window.
#[derive(Clone)]
pub struct SparseChain {
    pub degree: usize,
    pub scale: u32,
    pub backend: Backend,
    pub values: BTreeMap<Simplex, Int>,
    pub rule: Option<ChainRule>,
}

impl std::fmt::Debug for SparseChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseChain")
            .field("degree", &self.degree)
            .field("scale", &self.scale)
            .field("backend", &self.backend)
            .field("values", &self.values)
            .field("has_rule", &self.rule.is_some())
            .finish()
    }
}

impl SparseChain {
    pub fn zero(degree: usize, scale: u32, backend: Backend) -> Self {
        SparseChain { degree, scale, backend, values: BTreeMap::new(), rule: None }
    }

    pub fn from_basis(b: &CochainBasis, v: &SparseVec) -> Self {
        SparseChain {
            degree: b.degree(),
            scale: b.scale(),
            backend: b.backend(),
            values: v.iter().map(|(i, c)| (b.simplex(i).clone(), c.clone())).collect(),
            rule: None,
        }
    }

    /// The fragment of a rule-defined chain on the simplices of `b`.
    pub fn from_rule(b: &CochainBasis, rule: ChainRule) -> Self {
        let w = b.window();
        let mut values = BTreeMap::new();
        for s in b.simplices() {
            let pts: Vec<Point> = s.iter().map(|&v| w.point(v).clone()).collect();
            let c = rule(&pts);
            if c != 0 {
                values.insert(s.clone(), IBig::from(c));
            }
        }
        SparseChain { degree: b.degree(), scale: b.scale(), backend: b.backend(), values, rule: Some(rule) }
    }

    pub fn to_basis(&self, b: &CochainBasis) -> Result<SparseVec> {
        let mut pairs = Vec::with_capacity(self.values.len());
        for (s, c) in &self.values {
            let i = b
                .index_of(s)
                .ok_or_else(|| Error::Incompatible(format!("simplex {s:?} is not in the basis")))?;
            pairs.push((i, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|c| c.is_zero())
    }
}

/// Matrix of `∂ = Σ(-1)^i ∂_i` from chains on `b_n` to chains on `b_prev`.
/// Faces outside `b_prev` are dropped.
pub fn boundary_matrix(b_n: &CochainBasis, b_prev: &CochainBasis) -> Result<SparseMatrix> {
    if b_n.degree() != b_prev.degree() + 1 || b_n.backend() != b_prev.backend() || b_n.scale() != b_prev.scale() {
        return Err(Error::Incompatible("boundary needs consecutive degrees at one scale and backend".into()));
    }
    let mut cols = Vec::with_capacity(b_n.len());
    for s in b_n.simplices() {
        let mut acc: BTreeMap<usize, Int> = BTreeMap::new();
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            if let Some((row, sign)) = b_prev.locate(&face) {
                let s = if i % 2 == 0 { sign } else { -sign };
                *acc.entry(row).or_default() += IBig::from(s);
            }
        }
        cols.push(SparseVec::from_map(acc));
    }
    Ok(SparseMatrix::from_columns(b_prev.len(), cols))
}

/// `Σ_σ c(σ)·φ(σ)`.
pub fn kronecker_pair(phi: &SparseCochain, c: &SparseChain) -> Result<Int> {
    if phi.degree != c.degree {
        return Err(Error::Incompatible(format!("cochain of degree {} against chain of degree {}", phi.degree, c.degree)));
    }
    if phi.backend != c.backend {
        return Err(Error::Incompatible("cochain and chain use different backends".into()));
    }
    let mut total = IBig::from(0);
    let (small, large) = (&phi.values, &c.values);
    if small.len() <= large.len() {
        for (s, v) in small {
            if let Some(x) = large.get(s) {
                total += v * x;
            }
        }
    } else {
        for (s, x) in large {
            if let Some(v) = small.get(s) {
                total += v * x;
            }
        }
    }
    Ok(total)
}

/// Pushforward `m_* c` onto the simplices of `b_cod`. Degenerate images
/// vanish; simplices with an image outside the codomain window are an
/// error.
pub fn pushforward(m: &SpaceMap, c: &SparseChain, b_cod: &CochainBasis) -> Result<SparseChain> {
    let mut values: BTreeMap<Simplex, Int> = BTreeMap::new();
    for (s, v) in &c.values {
        let tuple: Vec<usize> = s
            .iter()
            .map(|&x| m.target(x).ok_or_else(|| Error::WindowTooSmall(format!("image of {s:?} leaves the window"))))
            .collect::<Result<_>>()?;
        if let Some((t, sign)) = canonical(c.backend, &tuple) {
            if b_cod.index_of(&t).is_none() {
                return Err(Error::ScaleTooSmall(format!("image of {s:?} is not {}-controlled", b_cod.scale())));
            }
            *values.entry(t).or_default() += v * IBig::from(sign);
        }
    }
    values.retain(|_, v| !v.is_zero());
    Ok(SparseChain { degree: c.degree, scale: b_cod.scale(), backend: c.backend, values, rule: None })
}

/// Result of pairing a class with a cycle, with the perturbation audit.
#[derive(Clone, Debug)]
pub struct PairingOutcome {
    pub value: Int,
    /// Values after each random perturbation of the two representatives.
    pub audited: Vec<Int>,
}

/// Pairs a cocycle supported in the core with a locally finite cycle whose
/// fragment lives on the whole window, then re-pairs after adding random
/// coboundaries (supported in the core) and boundaries (on the window).
pub fn pair_classes(
    w: &Arc<Window>,
    phi: &SparseCochain,
    c: &SparseChain,
    rounds: usize,
    seed: u64,
) -> Result<PairingOutcome> {
    let n = phi.degree;
    let (k, backend) = (phi.scale, phi.backend);
    if c.degree != n || c.scale != k || c.backend != backend {
        return Err(Error::Incompatible("representatives differ in degree, scale or backend".into()));
    }
    let all = w.full_mask();
    let core = w.core().to_vec();
    let cap = n + 1;
    let b_n = CochainBasis::enumerate_capped(w, k, n, &all, backend, cap)?;
    let b_up = CochainBasis::enumerate_capped(w, k, n + 1, &all, backend, cap)?;

    let d = coboundary_eval(&b_n, &b_up)?;
    if !d.mul_vec(&phi.to_basis(&b_n)?).is_zero() {
        return Err(Error::NotCocycle("the cochain representative is not a cocycle".into()));
    }
    let b_low = if n > 0 { Some(CochainBasis::enumerate_capped(w, k, n - 1, &core, backend, cap)?) } else { None };
    if let Some(b_low) = &b_low {
        let b_low_all = CochainBasis::enumerate_capped(w, k, n - 1, &all, backend, cap)?;
        let dc = boundary_matrix(&b_n, &b_low_all)?.mul_vec(&c.to_basis(&b_n)?);
        if dc.iter().any(|(i, _)| b_low.index_of(b_low_all.simplex(i)).is_some()) {
            return Err(Error::Verification("the chain representative has boundary inside the core".into()));
        }
    }

    let value = kronecker_pair(phi, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary_up = boundary_matrix(&b_up, &b_n)?;
    let mut audited = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut phi2 = phi.clone();
        if let Some(b_low) = &b_low {
            let d_low = coboundary_eval(b_low, &b_n)?;
            let psi = random_vec(&mut rng, b_low.len());
            let extra = SparseCochain::from_basis(&b_n, &d_low.mul_vec(&psi));
            for (s, v) in extra.values {
                *phi2.values.entry(s).or_default() += v;
            }
        }
        let mut c2 = c.clone();
        let b = random_vec(&mut rng, b_up.len());
        let extra = SparseChain::from_basis(&b_n, &boundary_up.mul_vec(&b));
        for (s, v) in extra.values {
            *c2.values.entry(s).or_default() += v;
        }
        let v = kronecker_pair(&phi2, &c2)?;
        if v != value {
            return Err(Error::Verification(format!(
                "pairing changed from {value} to {v} under perturbation; enlarge the window or the scale"
            )));
        }
        audited.push(v);
    }
    Ok(PairingOutcome { value, audited })
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> SparseVec {
    SparseVec::from_pairs((0..len).filter_map(|i| {
        let x: i64 = rng.gen_range(-3..=3);
        (x != 0 && rng.gen_bool(0.3)).then(|| (i, IBig::from(x)))
    }))
}

/// The locally finite chain `Σ_x (x, x+1)` on a one-dimensional grid or
/// half-line.
pub fn fundamental_chain_line(b: &CochainBasis) -> SparseChain {
    let rule: ChainRule = Arc::new(|pts: &[Point]| match pts {
        [a, c] if a.len() == 1 && c[0] == a[0] + 1 => 1,
        _ => 0,
    });
    SparseChain::from_rule(b, rule)
}

/// The 1-cocycle dual to the edge `(x, x+1)`; in the ordered backend it is
/// antisymmetric so that it stays a cocycle.
pub fn crossing_cochain(w: &Window, x: i64, scale: u32, backend: Backend) -> Result<SparseCochain> {
    let a = w.index_of(&[x]).ok_or_else(|| Error::UnknownPoint(format!("[{x}]")))?;
    let b = w.index_of(&[x + 1]).ok_or_else(|| Error::UnknownPoint(format!("[{}]", x + 1)))?;
    let mut c = SparseCochain::zero(1, scale, backend);
    for (tuple, value) in [([a, b], 1), ([b, a], -1)] {
        let (s, sign) = canonical(backend, &tuple).expect("distinct points");
        c.values.insert(s, IBig::from(sign * value));
    }
    Ok(c)
}
