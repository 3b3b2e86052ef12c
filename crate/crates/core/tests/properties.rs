mod common;

use std::sync::Arc;

use ibig::IBig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roelab::catalog::{random_close_pair, random_cochain};
use roelab::complex::{coboundary_matrix, pullback_matrix, restriction_matrix, Backend, CochainBasis, SparseCochain};
use roelab::pairing::{boundary_matrix, kronecker_pair, pushforward, SparseChain};
use roelab::rips::build_rips;
use roelab::snf::{cohomology_at, image_membership, smith_normal_form, DenseMatrix, SparseMatrix, SparseVec};
use roelab::space::{check_close, make_window, AmbientSpec, SpaceMap, Window};
use roelab::variation::{
    composite_variation, extend_function, rho_construct, u_variation, PathMetric, VariationFunction,
};

use common::invariant_factors;

const BACKENDS: [Backend; 2] = [Backend::OrderedNormalized, Backend::Alternating];

fn spaces() -> Vec<(AmbientSpec, u32)> {
    vec![
        (AmbientSpec::grid(1), 4),
        (AmbientSpec::Halfline, 4),
        (AmbientSpec::grid(2), 1),
        (AmbientSpec::point(), 0),
        (AmbientSpec::FreeUnion(vec![AmbientSpec::grid(1), AmbientSpec::Halfline]), 3),
    ]
}

fn space() -> impl Strategy<Value = (AmbientSpec, u32)> {
    (0..spaces().len()).prop_map(|i| spaces().swap_remove(i))
}

fn window(spec: &AmbientSpec, core: u32, padding: u32) -> Arc<Window> {
    Arc::new(make_window(spec, core, padding).unwrap())
}

/// Shortest-path closure of random positive edge weights.
fn finite_metric() -> impl Strategy<Value = Vec<Vec<u32>>> {
    (2usize..6).prop_flat_map(|n| {
        proptest::collection::vec(1u32..=3, n * (n - 1) / 2).prop_map(move |w| {
            let mut d = vec![vec![0u32; n]; n];
            let mut it = w.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let x = it.next().unwrap();
                    d[i][j] = x;
                    d[j][i] = x;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
            d
        })
    })
}

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r))
}

fn wide(rows: &[Vec<i64>]) -> Vec<Vec<i128>> {
    rows.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect()
}

fn to_i128(x: &IBig) -> i128 {
    i128::try_from(x).unwrap()
}

/// Cohomology groups of the full window at one scale, as (rank, torsion).
fn full_cohomology(w: &Arc<Window>, k: u32, degrees: usize, backend: Backend) -> Vec<(usize, Vec<i128>)> {
    let all = w.full_mask();
    let bases: Vec<CochainBasis> =
        (0..=degrees + 1).map(|n| CochainBasis::enumerate(w, k, n, &all, backend).unwrap()).collect();
    let d: Vec<SparseMatrix> = bases.windows(2).map(|p| coboundary_matrix(&p[0], &p[1]).unwrap()).collect();
    (0..=degrees)
        .map(|n| {
            let d_in = if n == 0 { SparseMatrix::zeros(bases[0].len(), 0) } else { d[n - 1].clone() };
            let g = cohomology_at(&d_in, &d[n]).unwrap().group().clone();
            (g.rank, g.torsion.iter().map(to_i128).collect())
        })
        .collect()
}

/// Unimodular matrix and its inverse from random elementary row operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut q = p.clone();
    for &(a, b, c) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            continue;
        }
        // p ← E p with E adding c·row b to row a; q ← q E⁻¹.
        for j in 0..n {
            p[a][j] += c * p[b][j];
        }
        for i in 0..n {
            q[i][b] -= c * q[i][a];
        }
    }
    (p, q)
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|t| r[t] * b[t][j]).sum()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn window_distance_is_a_metric((spec, core) in space(), padding in 0u32..3) {
        let w = window(&spec, core, padding);
        prop_assert!(w.check_faithful().is_ok());
        let n = w.len();
        for i in 0..n {
            prop_assert_eq!(w.dist(i, i), Some(0));
            for j in 0..n {
                prop_assert_eq!(w.dist(i, j), w.dist(j, i));
                if i != j {
                    prop_assert_ne!(w.dist(i, j), Some(0));
                }
                for l in 0..n {
                    if let (Some(a), Some(b), Some(c)) = (w.dist(i, j), w.dist(j, l), w.dist(i, l)) {
                        prop_assert!(c <= a + b);
                    }
                }
            }
        }
    }

    #[test]
    fn closeness_is_symmetric((spec, core) in space(), seed in any::<u64>(), jitter in 0u32..3) {
        let w = window(&spec, core, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = random_close_pair(&w, &mut rng, jitter).unwrap();
        prop_assert_eq!(check_close(&f, &f), Some(0));
        prop_assert_eq!(check_close(&f, &g), check_close(&g, &f));
        let id = SpaceMap::identity(w.clone());
        prop_assert_eq!(check_close(&id, &id), Some(0));
    }

    #[test]
    fn coboundary_squares_to_zero((spec, core) in space(), k in 1u32..=4, n in 0usize..=1, b in 0usize..2) {
        let core = core.min(2);
        let w = window(&spec, core, 0);
        let all = w.full_mask();
        let bs: Vec<CochainBasis> =
            (n..n + 3).map(|m| CochainBasis::enumerate(&w, k, m, &all, BACKENDS[b]).unwrap()).collect();
        let d0 = coboundary_matrix(&bs[0], &bs[1]).unwrap();
        let d1 = coboundary_matrix(&bs[1], &bs[2]).unwrap();
        prop_assert!(d1.mul(&d0).is_zero());
        let b0 = boundary_matrix(&bs[1], &bs[0]).unwrap();
        let b1 = boundary_matrix(&bs[2], &bs[1]).unwrap();
        prop_assert!(b0.mul(&b1).is_zero());
    }

    #[test]
    fn backends_agree_on_finite_metrics(dist in finite_metric(), k in 1u32..=3) {
        let w = window(&AmbientSpec::finite(dist), 10, 0);
        let ordered = full_cohomology(&w, k, 2, Backend::OrderedNormalized);
        let alternating = full_cohomology(&w, k, 2, Backend::Alternating);
        prop_assert_eq!(ordered, alternating);
    }

    #[test]
    fn restriction_is_surjective((spec, core) in space(), k in 1u32..=2, n in 0usize..=2, b in 0usize..2) {
        let w = window(&spec, core.min(2), 0);
        let all = w.full_mask();
        let small = CochainBasis::enumerate(&w, k, n, &all, BACKENDS[b]).unwrap();
        let big = CochainBasis::enumerate(&w, k + 1, n, &all, BACKENDS[b]).unwrap();
        let r = restriction_matrix(&big, &small).unwrap();
        for i in 0..small.len() {
            let e = SparseVec::unit(i);
            prop_assert!(image_membership(&r, &e, None).is_some());
        }
    }

    #[test]
    fn pullback_is_a_chain_map((spec, core) in space(), seed in any::<u64>(), n in 0usize..=1, b in 0usize..2) {
        let w = window(&spec, core.min(2), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, _) = random_close_pair(&w, &mut rng, 1).unwrap();
        let all = w.full_mask();
        let (k, kc) = (1, 3);
        let dom = |m| CochainBasis::enumerate(&w, k, m, &all, BACKENDS[b]).unwrap();
        let cod = |m| CochainBasis::enumerate(&w, kc, m, &all, BACKENDS[b]).unwrap();
        let (dom0, dom1, cod0, cod1) = (dom(n), dom(n + 1), cod(n), cod(n + 1));
        let p0 = pullback_matrix(&f, &cod0, &dom0).unwrap();
        let p1 = pullback_matrix(&f, &cod1, &dom1).unwrap();
        let lhs = coboundary_matrix(&dom0, &dom1).unwrap().mul(&p0);
        let rhs = p1.mul(&coboundary_matrix(&cod0, &cod1).unwrap());
        prop_assert_eq!(lhs.to_dense(), rhs.to_dense());

        // ⟨f*φ, c⟩ = ⟨φ, f_* c⟩.
        let phi = random_cochain(&cod0, &mut rng, 0.5, 4);
        let pulled = SparseCochain::from_basis(&dom0, &p0.mul_vec(&phi.to_basis(&cod0).unwrap()));
        let c = SparseChain::from_basis(&dom0, &phi_free_vec(&mut rng, dom0.len()));
        let pushed = pushforward(&f, &c, &cod0).unwrap();
        prop_assert_eq!(kronecker_pair(&pulled, &c).unwrap(), kronecker_pair(&phi, &pushed).unwrap());
    }

    #[test]
    fn boundary_is_adjoint_to_coboundary((spec, core) in space(), seed in any::<u64>(), n in 0usize..=1, b in 0usize..2) {
        let w = window(&spec, core.min(2), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = w.full_mask();
        let bn = CochainBasis::enumerate(&w, 1, n, &all, BACKENDS[b]).unwrap();
        let bu = CochainBasis::enumerate(&w, 1, n + 1, &all, BACKENDS[b]).unwrap();
        let phi = random_cochain(&bn, &mut rng, 0.5, 5);
        let c = SparseChain::from_basis(&bu, &phi_free_vec(&mut rng, bu.len()));
        let d = coboundary_matrix(&bn, &bu).unwrap();
        let dphi = SparseCochain::from_basis(&bu, &d.mul_vec(&phi.to_basis(&bn).unwrap()));
        let dc = SparseChain::from_basis(&bn, &boundary_matrix(&bu, &bn).unwrap().mul_vec(&c.to_basis(&bu).unwrap()));
        prop_assert_eq!(kronecker_pair(&dphi, &c).unwrap(), kronecker_pair(&phi, &dc).unwrap());
    }

    #[test]
    fn smith_form_reconstructs(rows in small_matrix(6, 6)) {
        let m = DenseMatrix::from_rows(&rows);
        let snf = smith_normal_form(&m);
        prop_assert!(snf.verify(&m));
        let diag: Vec<i128> = snf.diagonal().iter().map(to_i128).filter(|&x| x != 0).collect();
        prop_assert_eq!(diag, invariant_factors(wide(&rows)));
    }

    #[test]
    fn quotient_matches_brute_force(
        n in 1usize..=6,
        r in 0usize..=6,
        ops in proptest::collection::vec((0usize..6, 0usize..6, -2i64..=2), 0..12),
        seed_a in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 6),
        seed_b in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 6), 4),
    ) {
        // In the basis given by p, d_in lands in the first r coordinates and
        // d_out kills them, so d_out·d_in = 0.
        let r = r.min(n);
        let (p, q) = unimodular(n, &ops);
        let a0: Vec<Vec<i64>> = (0..n).map(|i| if i < r { seed_a[i].clone() } else { vec![0; 4] }).collect();
        let b0: Vec<Vec<i64>> = seed_b.iter().map(|row| (0..n).map(|j| if j < r { 0 } else { row[j] }).collect()).collect();
        let a = matmul(&p, &a0);
        let b = matmul(&b0, &q);
        let d_in = SparseMatrix::from_dense(&a);
        let d_out = SparseMatrix::from_dense(&b);
        let g = cohomology_at(&d_in, &d_out).unwrap().group().clone();

        let fa = invariant_factors(wide(&a));
        let fb = invariant_factors(wide(&b));
        prop_assert_eq!(g.rank, n - fb.len() - fa.len());
        let torsion: Vec<i128> = fa.into_iter().filter(|&x| x > 1).collect();
        prop_assert_eq!(g.torsion.iter().map(to_i128).collect::<Vec<_>>(), torsion);
    }

    #[test]
    fn image_membership_solves(rows in small_matrix(5, 5), x in proptest::collection::vec(-3i64..=3, 5), mask_bits in any::<u8>()) {
        let m = SparseMatrix::from_dense(&rows);
        let cols = m.ncols();
        let mask: Vec<bool> = (0..cols).map(|j| mask_bits >> j & 1 == 1).collect();
        let xv = SparseVec::from_pairs((0..cols).filter(|&j| mask[j]).map(|j| (j, IBig::from(x[j]))));
        let b = m.mul_vec(&xv);
        let sol = image_membership(&m, &b, Some(&mask));
        prop_assert!(sol.is_some());
        let sol = sol.unwrap();
        prop_assert_eq!(m.mul_vec(&sol), b);
        prop_assert!(sol.iter().all(|(j, _)| mask[j]));
    }

    #[test]
    fn rips_is_monotone_in_scale((spec, core) in space(), k in 1u32..=2, picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..=3)) {
        let w = window(&spec, core.min(2), 0);
        let small = build_rips(&w, k, 2, 1_000_000).unwrap();
        let big = build_rips(&w, k + 1, 2, 1_000_000).unwrap();
        let mut s: Vec<usize> = picks.iter().map(|i| i.index(w.len())).collect();
        s.sort_unstable();
        s.dedup();
        let pairwise = s.iter().all(|&a| s.iter().all(|&b| w.within(a, b, k)));
        prop_assert_eq!(small.contains(&s), pairwise);
        if small.contains(&s) {
            prop_assert!(big.contains(&s));
        }
    }

    #[test]
    fn rho_is_monotone_subadditive_and_below(steps in proptest::collection::vec(0u64..4, 1..24)) {
        let mut samples = vec![0u64];
        let mut acc = 0;
        for s in steps {
            acc += s;
            samples.push(acc);
        }
        match rho_construct(&samples) {
            Ok(rho) => {
                prop_assert!(rho.is_monotone());
                prop_assert!(rho.is_subadditive());
                prop_assert_eq!(rho.half_units[0], 0);
                for t in 1..samples.len() {
                    prop_assert!(rho.half_units[t] > 0);
                    if samples[t] > 0 {
                        prop_assert!(rho.half_units[t] <= samples[t]);
                    }
                }
            }
            Err(_) => prop_assert!(samples.iter().all(|&x| x == 0)),
        }
    }

    #[test]
    fn composite_variation_is_bounded(values in proptest::collection::vec(-5.0f64..5.0, 41), k in 1u32..=2, steps in 1u32..=4) {
        let w = window(&AmbientSpec::grid(1), 20, 0);
        let f = VariationFunction::from_fn(w.clone(), w.full_mask(), |p| values[(p[0] + 20) as usize]).unwrap();
        let all = w.full_mask();
        let metric = PathMetric::new(&w, k);
        let single = u_variation(&f, &all, k);
        prop_assert!(composite_variation(&f, &metric, &all, steps) <= f64::from(steps) * single + 1e-9);
    }
}

fn phi_free_vec(rng: &mut ChaCha8Rng, len: usize) -> SparseVec {
    use rand::Rng;
    SparseVec::from_pairs((0..len).filter_map(|i| rng.gen_bool(0.4).then(|| (i, IBig::from(rng.gen_range(-3i64..=3))))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn extension_artifacts_are_consistent(shift in 0.0f64..3.0, eps_exp in 1i32..=2) {
        let w = window(&AmbientSpec::grid(1), 60, 8);
        let y = w.mask(|p| p[0] >= 0);
        let f = VariationFunction::from_fn(w.clone(), y.clone(), |p| shift + 1.0 / (1.0 + p[0] as f64)).unwrap();
        let eps = 10f64.powi(-eps_exp);
        let cert = extend_function(&w, &y, 1, &f, eps).unwrap();
        prop_assert!(cert.restriction_error <= eps + 1e-9);
        let art = cert.general().unwrap();
        let metric = PathMetric::new(&w, 1);
        for x in 0..w.len() {
            prop_assert!((0.0..=1.0).contains(&art.psi[x]));
            if y[x] {
                prop_assert_eq!(art.psi[x], 1.0);
                prop_assert!(art.f_set[x]);
            }
            if let Some(owner) = art.partition[x] {
                let v = art.v[owner].unwrap();
                let r = f64::from(v).sqrt().floor() as u32;
                prop_assert!(metric.ball(owner, r).contains(&x));
            }
            prop_assert_eq!(art.partition[x].is_some(), art.f_set[x]);
        }
    }
}
