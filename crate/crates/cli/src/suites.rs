use std::sync::Arc;

use ibig::IBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roelab::catalog::{catalog, random_close_pair, random_cochain, small_core};
use roelab::cohomology::{hax, WindowSchedule};
use roelab::complex::{coboundary_matrix, Backend, CochainBasis, SparseCochain};
use roelab::pairing::{boundary_matrix, crossing_cochain, fundamental_chain_line, kronecker_pair, pair_classes, SparseChain};
use roelab::snf::{AbelianGroup, SparseVec};
use roelab::space::{certify_flasqueness, make_window, AmbientSpec, SpaceMap};
use roelab::variation::{extend_function, verify_extension, Branch, VariationFunction};
use roelab::verification::{additivity_check, check_prism_identity, mv_check, swindle_apply, ComplementaryPair};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Suite;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub stabilized: bool,
    pub summary: String,
    pub detail: Value,
}

pub struct Context {
    pub seed: u64,
    pub backends: Vec<Backend>,
}

type Outcome = Result<Check, String>;

fn err(e: impl ToString) -> String {
    e.to_string()
}

pub fn run(suite: Suite, ctx: &Context) -> Result<Vec<Check>, String> {
    let all: Vec<fn(&Context) -> Outcome> = match suite {
        Suite::Prism => vec![prism],
        Suite::Mv => vec![mv],
        Suite::Flasque => vec![flasque],
        Suite::Additivity => vec![additivity],
        Suite::Pairing => vec![pairing],
        Suite::Extension => vec![extension],
        Suite::Axioms => vec![prism, mv, flasque, additivity, pairing, extension],
    };
    all.into_iter().map(|f| f(ctx)).collect()
}

fn random_vec<R: Rng>(rng: &mut R, len: usize) -> SparseVec {
    let pairs: Vec<(usize, IBig)> = (0..len)
        .filter_map(|i| rng.gen_bool(0.3).then(|| (i, IBig::from(rng.gen_range(-3i64..=3)))))
        .collect();
    SparseVec::from_pairs(pairs)
}

/// Homotopy formula on random pairs of close maps across the catalog.
fn prism(ctx: &Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let spaces = catalog();
    let (mut passed, mut total) = (0, 0);
    for i in 0..100 {
        let (_, spec) = &spaces[i % spaces.len()];
        let flat = matches!(spec, AmbientSpec::Grid { d: 1 } | AmbientSpec::Halfline | AmbientSpec::Finite { .. } | AmbientSpec::FreeUnion(_));
        let (core, n) = if flat { (small_core(spec), i % 3) } else { (1, i % 2) };
        let w = Arc::new(make_window(spec, core, 3).map_err(err)?);
        let (f, g) = random_close_pair(&w, &mut rng, 1).map_err(err)?;
        let backend = ctx.backends[i % ctx.backends.len()];
        let c = check_prism_identity(&f, &g, w.core(), 1, 3, n, backend).map_err(err)?;
        let v = random_vec(&mut rng, c.lhs.ncols());
        total += 1;
        if c.holds && c.lhs.mul_vec(&v) == c.rhs.mul_vec(&v) {
            passed += 1;
        }
    }
    Ok(Check {
        name: "prism",
        passed: passed == total,
        stabilized: true,
        summary: format!("d∘h + h∘d = g* − f* on {passed}/{total} random instances"),
        detail: json!({ "instances": total, "passed": passed }),
    })
}

/// Mayer-Vietoris for the line split into two half-lines.
fn mv(ctx: &Context) -> Outcome {
    let w = Arc::new(make_window(&AmbientSpec::grid(1), 6, 6).map_err(err)?);
    let pair = ComplementaryPair::half_spaces(w, 8, 3).map_err(err)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for &b in &ctx.backends {
        let r = mv_check(&pair, 1, &[0, 1, 2], b).map_err(err)?;
        let connecting = r.connecting.first().is_some_and(|m| m.is_isomorphism());
        let h1 = r.groups.get(1).is_some_and(|g| g.x == AbelianGroup::free(1));
        ok &= r.passed() && connecting && h1;
        detail.push(json!({ "backend": b.to_string(), "exact": r.is_exact(), "pro_inverse": r.pro_inverse_holds(), "connecting_iso": connecting }));
    }
    Ok(Check {
        name: "mv",
        passed: ok,
        stabilized: true,
        summary: "exact sequence, pro-inverses and connecting map for Z = Z+ ∪ Z-".into(),
        detail: Value::Array(detail),
    })
}

/// Vanishing on the half-line and the swindle identity on random cochains.
fn flasque(ctx: &Context) -> Outcome {
    let sched = WindowSchedule::arithmetic(6, 3, 4, 2).with_backend(ctx.backends[0]);
    let r = hax(&AmbientSpec::Halfline, &[0, 1, 2], &[1, 2], &sched).map_err(err)?;
    let vanishes = r.degrees.iter().all(|d| d.group.is_trivial());

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed);
    let w = Arc::new(make_window(&AmbientSpec::Halfline, 8, 4).map_err(err)?);
    let f = SpaceMap::shift(w.clone(), vec![1]).map_err(err)?;
    let wit = certify_flasqueness(&w, &f).map_err(err)?;
    let env = wit.envelope_at(1).ok_or("no envelope at scale 1")?;
    let mut swindles = 0;
    for i in 0..50 {
        let b = CochainBasis::enumerate(&w, env, i % 2, w.core(), ctx.backends[i % ctx.backends.len()]).map_err(err)?;
        let phi = random_cochain(&b, &mut rng, 0.3, 4);
        if swindle_apply(&w, &wit, &phi, 1).map_err(err)?.holds {
            swindles += 1;
        }
    }
    Ok(Check {
        name: "flasque",
        passed: vanishes && swindles == 50,
        stabilized: r.all_stabilized(),
        summary: format!("H*(Z+) = 0 in degrees 0..2: {vanishes}; swindle holds on {swindles}/50"),
        detail: json!({ "groups": r.degrees.iter().map(|d| d.group.to_string()).collect::<Vec<_>>(), "swindles": swindles }),
    })
}

fn additivity(ctx: &Context) -> Outcome {
    let sched = WindowSchedule::arithmetic(3, 2, 5, 2).with_backend(ctx.backends[0]);
    let r = additivity_check(&[AmbientSpec::grid(1), AmbientSpec::grid(1)], &[0, 1], &[1, 2], &sched).map_err(err)?;
    let h1 = r.degrees.iter().find(|d| d.degree == 1).is_some_and(|d| d.union == AbelianGroup::free(2));
    Ok(Check {
        name: "additivity",
        passed: r.passed() && h1,
        stabilized: r.all_stabilized,
        summary: format!(
            "H*(Z ⊔ Z) = {}",
            r.degrees.iter().map(|d| format!("H^{}: {}", d.degree, d.union)).collect::<Vec<_>>().join(", ")
        ),
        detail: serde_json::to_value(&r).map_err(err)?,
    })
}

/// Adjointness of boundary and coboundary, and the crossing pairing on the line.
fn pairing(ctx: &Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0xface);
    let spaces = [AmbientSpec::grid(1), AmbientSpec::Halfline, AmbientSpec::grid(2), AmbientSpec::point()];
    let mut adjoint = 0;
    for i in 0..200 {
        let spec = &spaces[i % spaces.len()];
        let core = if *spec == AmbientSpec::grid(2) { 1 } else { 3 };
        let w = Arc::new(make_window(spec, core, 1).map_err(err)?);
        let backend = ctx.backends[i % ctx.backends.len()];
        let n = i % 2;
        let all = w.full_mask();
        let bn = CochainBasis::enumerate(&w, 1, n, &all, backend).map_err(err)?;
        let bu = CochainBasis::enumerate(&w, 1, n + 1, &all, backend).map_err(err)?;
        let phi = random_cochain(&bn, &mut rng, 0.5, 5);
        let c = SparseChain::from_basis(&bu, &random_vec(&mut rng, bu.len()));
        let dphi = SparseCochain::from_basis(&bu, &coboundary_matrix(&bn, &bu).map_err(err)?.mul_vec(&phi.to_basis(&bn).map_err(err)?));
        let dc = SparseChain::from_basis(&bn, &boundary_matrix(&bu, &bn).map_err(err)?.mul_vec(&c.to_basis(&bu).map_err(err)?));
        if kronecker_pair(&dphi, &c).map_err(err)? == kronecker_pair(&phi, &dc).map_err(err)? {
            adjoint += 1;
        }
    }
    let w = Arc::new(make_window(&AmbientSpec::grid(1), 4, 4).map_err(err)?);
    let mut crossing = true;
    for &b in &ctx.backends {
        let b1 = CochainBasis::enumerate(&w, 1, 1, &w.full_mask(), b).map_err(err)?;
        let phi = crossing_cochain(&w, 0, 1, b).map_err(err)?;
        let out = pair_classes(&w, &phi, &fundamental_chain_line(&b1), 20, ctx.seed).map_err(err)?;
        crossing &= out.value == IBig::from(1) && out.audited.iter().all(|v| *v == out.value);
    }
    Ok(Check {
        name: "pairing",
        passed: adjoint == 200 && crossing,
        stabilized: true,
        summary: format!("adjointness on {adjoint}/200 random pairs; crossing × fundamental = 1: {crossing}"),
        detail: json!({ "adjoint": adjoint, "crossing": crossing }),
    })
}

fn extension(_: &Context) -> Outcome {
    let w = Arc::new(make_window(&AmbientSpec::grid(1), 120, 8).map_err(err)?);
    let y = w.mask(|p| p[0] >= 0);
    let f = VariationFunction::from_fn(w.clone(), y.clone(), |p| 1.0 / (1.0 + p[0] as f64)).map_err(err)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for eps in [0.1, 0.01] {
        let cert = extend_function(&w, &y, 1, &f, eps).map_err(err)?;
        let audit = verify_extension(&cert, &[1], eps).map_err(err)?;
        let p = audit.profile(1).ok_or("missing profile")?;
        ok &= cert.branch() == Branch::General && p.strict_decreases >= 3 && p.non_increasing;
        detail.push(json!({ "epsilon": eps, "restriction_error": cert.restriction_error, "profile": p.values, "strict_decreases": p.strict_decreases }));
    }
    Ok(Check {
        name: "extension",
        passed: ok,
        stabilized: true,
        summary: "extension of 1/(1+y) from Z+ to Z at epsilon 0.1 and 0.01".into(),
        detail: Value::Array(detail),
    })
}
