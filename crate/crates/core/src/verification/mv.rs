use std::sync::Arc;

use serde::Serialize;

use crate::complex::{coboundary_eval, Backend, CochainBasis};
use crate::error::{Error, Result};
use crate::snf::{cohomology_at, is_exact_at, AbelianGroup, GroupHom, Quotient, SparseMatrix, SparseVec};
use crate::space::{mask_and, mask_subset, Window};

/// Increasing subsets `Y_0 ⊆ Y_1 ⊆ …` of a window with a thickening
/// certificate `U_k[Y_i] ⊆ Y_{j(i,k)}` checked on the window.
#[derive(Clone, Debug)]
pub struct BigFamily {
    window: Arc<Window>,
    sets: Vec<Vec<bool>>,
    certificate: Vec<Vec<Option<usize>>>,
}

impl BigFamily {
    /// Certifies thickenings for scales `1..=k_max`.
    pub fn new(window: Arc<Window>, sets: Vec<Vec<bool>>, k_max: u32) -> Result<BigFamily> {
        if sets.is_empty() {
            return Err(Error::InvalidArgument("a big family needs at least one member".into()));
        }
        if sets.iter().any(|s| s.len() != window.len()) {
            return Err(Error::Dimension("family member mask has the wrong length".into()));
        }
        if sets.windows(2).any(|p| !mask_subset(&p[0], &p[1])) {
            return Err(Error::InvalidArgument("family is not increasing".into()));
        }
        let certificate = sets
            .iter()
            .map(|y| {
                (1..=k_max)
                    .map(|k| {
                        let t = window.thicken(y, k);
                        sets.iter().position(|s| mask_subset(&t, s))
                    })
                    .collect()
            })
            .collect();
        Ok(BigFamily { window, sets, certificate })
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn member(&self, i: usize) -> &[bool] {
        &self.sets[i]
    }

    /// `j(i,k)`: least index with `U_k[Y_i] ⊆ Y_j` on the window.
    pub fn thickening_index(&self, i: usize, k: u32) -> Option<usize> {
        let k = usize::try_from(k).ok()?.checked_sub(1)?;
        self.certificate.get(i)?.get(k).copied().flatten()
    }
}

/// A subset `Z` together with a big family that covers the window with it.
#[derive(Clone, Debug)]
pub struct ComplementaryPair {
    pub family: BigFamily,
    pub z: Vec<bool>,
}

impl ComplementaryPair {
    pub fn new(family: BigFamily, z: Vec<bool>) -> Result<ComplementaryPair> {
        if z.len() != family.window.len() {
            return Err(Error::Dimension("Z mask has the wrong length".into()));
        }
        Ok(ComplementaryPair { family, z })
    }

    /// `Z = {t ≥ 0}` and `Y_i = {t ≤ i}` for `i < count`, where `t` is the
    /// last coordinate.
    pub fn half_spaces(window: Arc<Window>, count: usize, k_max: u32) -> Result<ComplementaryPair> {
        let z = window.mask(|p| p.last().is_some_and(|&t| t >= 0));
        let sets = (0..count as i64)
            .map(|i| window.mask(|p| p.last().is_some_and(|&t| t <= i)))
            .collect();
        ComplementaryPair::new(BigFamily::new(window, sets, k_max)?, z)
    }

    /// Least `i` such that every pair of points within `k` lies in `Y_i` or
    /// in `Z`.
    pub fn covering_index(&self, k: u32) -> Option<usize> {
        let w = &self.family.window;
        let adj = w.neighbors(k, &w.full_mask());
        (0..self.family.len()).find(|&i| {
            let y = &self.family.sets[i];
            (0..w.len()).all(|a| adj[a].iter().all(|&b| (y[a] && y[b]) || (self.z[a] && self.z[b])))
        })
    }
}

/// Cochain complex given by its differentials.
struct Complex {
    dims: Vec<usize>,
    d: Vec<SparseMatrix>,
}

impl Complex {
    fn from_bases(bases: &[CochainBasis]) -> Result<Complex> {
        let d = bases.windows(2).map(|p| coboundary_eval(&p[0], &p[1])).collect::<Result<Vec<_>>>()?;
        Ok(Complex { dims: bases.iter().map(|b| b.len()).collect(), d })
    }

    fn direct_sum(a: &Complex, b: &Complex) -> Complex {
        let d = a.d.iter().zip(&b.d).map(|(x, y)| block_diagonal(x, y)).collect();
        Complex { dims: a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect(), d }
    }

    fn cohomology(&self, n: usize) -> Result<Quotient> {
        let d_in = if n == 0 { SparseMatrix::zeros(self.dims[0], 0) } else { self.d[n - 1].clone() };
        cohomology_at(&d_in, &self.d[n])
    }
}

fn block_diagonal(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let shift = a.nrows();
    let mut cols: Vec<SparseVec> = a.columns().to_vec();
    cols.extend(b.columns().iter().map(|c| c.reindex(|i| Some(i + shift))));
    SparseMatrix::from_columns(a.nrows() + b.nrows(), cols)
}

fn stack_rows(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let shift = a.nrows();
    let cols = a.columns().iter().zip(b.columns()).map(|(x, y)| x.add(&y.reindex(|i| Some(i + shift)))).collect();
    SparseMatrix::from_columns(a.nrows() + b.nrows(), cols)
}

fn join_columns(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let mut cols = a.columns().to_vec();
    cols.extend(b.columns().iter().cloned());
    SparseMatrix::from_columns(a.nrows(), cols)
}

/// Matrix sending each simplex of `from` to the same simplex of `to`.
fn inclusion(from: &CochainBasis, to: &CochainBasis) -> Result<SparseMatrix> {
    let cols = from
        .simplices()
        .iter()
        .map(|s| {
            to.index_of(s)
                .map(SparseVec::unit)
                .ok_or_else(|| Error::Verification(format!("simplex {s:?} is missing from the target basis")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(to.len(), cols))
}

fn induced(src: &Quotient, dst: &Quotient, m: &SparseMatrix) -> Result<GroupHom> {
    let images = src
        .generators()
        .iter()
        .map(|g| {
            dst.coords(&m.mul_vec(g))
                .ok_or_else(|| Error::Verification("a cochain map sends a cocycle to a non-cocycle".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let hom = GroupHom::from_images(src.group().clone(), dst.group().clone(), &images);
    if !hom.is_well_defined() {
        return Err(Error::Verification("induced map does not respect relations".into()));
    }
    Ok(hom)
}

/// Matrix identities between the relative complexes `C(X, Y_i)` and
/// `C(Z, Z ∩ Y_i)` in one degree.
#[derive(Clone, Debug, Serialize)]
pub struct ProInverseCheck {
    pub degree: usize,
    pub index: usize,
    pub certificate_index: usize,
    /// Restricting an extension by zero gives back the cochain.
    pub restrict_extend: bool,
    /// Extending a restriction by zero is the structure map `C(X,Y_j) → C(X,Y_i)`.
    pub extend_restrict: bool,
    pub extension_is_chain_map: bool,
    pub restriction_is_chain_map: bool,
}

impl ProInverseCheck {
    pub fn holds(&self) -> bool {
        self.restrict_extend && self.extend_restrict && self.extension_is_chain_map && self.restriction_is_chain_map
    }
}

/// Exactness of the long exact sequence at one group.
#[derive(Clone, Debug, Serialize)]
pub struct LesSpot {
    pub degree: usize,
    /// `"X"`, `"Y+Z"` or `"YZ"`.
    pub position: &'static str,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MvGroups {
    pub degree: usize,
    pub x: AbelianGroup,
    pub y: AbelianGroup,
    pub z: AbelianGroup,
    pub yz: AbelianGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct MvReport {
    pub scale: u32,
    pub covering_index: usize,
    pub certificate_index: usize,
    pub groups: Vec<MvGroups>,
    pub spots: Vec<LesSpot>,
    pub pro_inverse: Vec<ProInverseCheck>,
    /// Connecting maps `H^n(Y∩Z) → H^{n+1}(X)` by degree.
    #[serde(skip)]
    pub connecting: Vec<GroupHom>,
}

impl MvReport {
    pub fn is_exact(&self) -> bool {
        self.spots.iter().all(|s| s.exact)
    }

    pub fn pro_inverse_holds(&self) -> bool {
        self.pro_inverse.iter().all(ProInverseCheck::holds)
    }

    pub fn passed(&self) -> bool {
        self.is_exact() && self.pro_inverse_holds()
    }
}

/// Checks excision for a complementary pair at scale `k`.
///
/// The Mayer–Vietoris sequence is formed for the cover `(Y_i, Z)` at the
/// covering index, using cochains on the controlled simplices of each piece
/// that meet the window core (cohomology relative to the part outside the
/// core). The difference map is `(a, b) ↦ a|YZ − b|YZ`; the connecting map
/// extends a cocycle of `Y∩Z` by zero to `Y` and takes its coboundary.
pub fn mv_check(pair: &ComplementaryPair, k: u32, degrees: &[usize], backend: Backend) -> Result<MvReport> {
    let w = pair.family.window.clone();
    let i = pair.covering_index(k).ok_or_else(|| {
        Error::InvalidArgument(format!("no member of the family covers the window with Z at scale {k}"))
    })?;
    let j = pair
        .family
        .thickening_index(i, k)
        .ok_or_else(|| Error::InvalidArgument(format!("no family member contains the {k}-thickening of member {i}")))?;
    let top = degrees.iter().copied().max().unwrap_or(0) + 2;
    let core = w.core().to_vec();
    let y = pair.family.sets[i].clone();
    let z = pair.z.clone();
    let yz = mask_and(&y, &z);
    let all = w.full_mask();

    let near_core = |region: &[bool]| -> Result<Vec<CochainBasis>> {
        (0..=top)
            .map(|n| {
                Ok(CochainBasis::enumerate_capped(&w, k, n, region, backend, top)?
                    .filter(|s| s.iter().any(|&v| core[v])))
            })
            .collect()
    };
    let bx = near_core(&all)?;
    let by = near_core(&y)?;
    let bz = near_core(&z)?;
    let byz = near_core(&yz)?;
    let cx = Complex::from_bases(&bx)?;
    let cy = Complex::from_bases(&by)?;
    let cz = Complex::from_bases(&bz)?;
    let cyz = Complex::from_bases(&byz)?;
    let csum = Complex::direct_sum(&cy, &cz);

    let restrict = |big: &CochainBasis, small: &CochainBasis| inclusion(small, big).map(|m| m.transpose());
    let mut restr = Vec::new();
    let mut diff = Vec::new();
    let mut conn = Vec::new();
    for n in 0..top {
        restr.push(stack_rows(&restrict(&bx[n], &by[n])?, &restrict(&bx[n], &bz[n])?));
        let to_yz_from_z = restrict(&bz[n], &byz[n])?;
        let neg = SparseMatrix::zeros(to_yz_from_z.nrows(), to_yz_from_z.ncols()).sub(&to_yz_from_z);
        diff.push(join_columns(&restrict(&by[n], &byz[n])?, &neg));
        if n + 1 < top {
            let lift = inclusion(&byz[n], &by[n])?;
            let push = inclusion(&by[n + 1], &bx[n + 1])?;
            conn.push(push.mul(&cy.d[n].mul(&lift)));
        }
    }

    let hx: Vec<Quotient> = (0..top).map(|n| cx.cohomology(n)).collect::<Result<_>>()?;
    let hsum: Vec<Quotient> = (0..top).map(|n| csum.cohomology(n)).collect::<Result<_>>()?;
    let hyz: Vec<Quotient> = (0..top).map(|n| cyz.cohomology(n)).collect::<Result<_>>()?;
    let restr_h: Vec<GroupHom> = (0..top).map(|n| induced(&hx[n], &hsum[n], &restr[n])).collect::<Result<_>>()?;
    let diff_h: Vec<GroupHom> = (0..top).map(|n| induced(&hsum[n], &hyz[n], &diff[n])).collect::<Result<_>>()?;
    let conn_h: Vec<GroupHom> =
        (0..top - 1).map(|n| induced(&hyz[n], &hx[n + 1], &conn[n])).collect::<Result<_>>()?;

    let mut spots = Vec::new();
    let mut groups = Vec::new();
    for &n in degrees {
        let into_x = if n == 0 {
            GroupHom::zero(AbelianGroup::trivial(), hx[0].group().clone())
        } else {
            conn_h[n - 1].clone()
        };
        spots.push(LesSpot { degree: n, position: "X", exact: is_exact_at(&into_x, &restr_h[n]) });
        spots.push(LesSpot { degree: n, position: "Y+Z", exact: is_exact_at(&restr_h[n], &diff_h[n]) });
        spots.push(LesSpot { degree: n, position: "YZ", exact: is_exact_at(&diff_h[n], &conn_h[n]) });
        groups.push(MvGroups {
            degree: n,
            x: hx[n].group().clone(),
            y: cy.cohomology(n)?.group().clone(),
            z: cz.cohomology(n)?.group().clone(),
            yz: hyz[n].group().clone(),
        });
    }

    let mut pro_inverse = Vec::new();
    for n in 0..top {
        pro_inverse.push(pro_inverse_check(&w, &pair.family, &pair.z, i, j, k, n, backend)?);
    }
    Ok(MvReport { scale: k, covering_index: i, certificate_index: j, groups, spots, pro_inverse, connecting: conn_h })
}

#[allow(clippy::too_many_arguments)]
fn pro_inverse_check(
    w: &Arc<Window>,
    family: &BigFamily,
    z: &[bool],
    i: usize,
    j: usize,
    k: u32,
    n: usize,
    backend: Backend,
) -> Result<ProInverseCheck> {
    let all = w.full_mask();
    let cap = n + 1;
    let rel_x = |m: usize, deg: usize| relative_basis_capped(w, k, deg, &all, family.member(m), backend, cap);
    let rel_z = |m: usize, deg: usize| relative_basis_capped(w, k, deg, z, family.member(m), backend, cap);
    let (xi, xj, zi, zj) = (rel_x(i, n)?, rel_x(j, n)?, rel_z(i, n)?, rel_z(j, n)?);
    let (xi1, zi1, zj1) = (rel_x(i, n + 1)?, rel_z(i, n + 1)?, rel_z(j, n + 1)?);

    let extend = |from: &CochainBasis, to: &CochainBasis| inclusion(from, to);
    let restrict = |big: &CochainBasis, small: &CochainBasis| inclusion(small, big).map(|m| m.transpose());
    let s = extend(&zj, &xi)?;
    let s1 = extend(&zj1, &xi1)?;
    let r_i = restrict(&xi, &zi)?;
    let r_i1 = restrict(&xi1, &zi1)?;
    let r_j = restrict(&xj, &zj)?;
    let iota_z = extend(&zj, &zi)?;
    let iota_x = extend(&xj, &xi)?;

    let equal = |a: &SparseMatrix, b: &SparseMatrix| a.nrows() == b.nrows() && a.ncols() == b.ncols() && a.sub(b).is_zero();
    let dxi = coboundary_eval(&xi, &xi1)?;
    let dzi = coboundary_eval(&zi, &zi1)?;
    let dzj = coboundary_eval(&zj, &zj1)?;
    Ok(ProInverseCheck {
        degree: n,
        index: i,
        certificate_index: j,
        restrict_extend: equal(&r_i.mul(&s), &iota_z),
        extend_restrict: equal(&s.mul(&r_j), &iota_x),
        extension_is_chain_map: equal(&dxi.mul(&s), &s1.mul(&dzj)),
        restriction_is_chain_map: equal(&dzi.mul(&r_i), &r_i1.mul(&dxi)),
    })
}

fn relative_basis_capped(
    w: &Arc<Window>,
    k: u32,
    n: usize,
    region: &[bool],
    y: &[bool],
    backend: Backend,
    cap: usize,
) -> Result<CochainBasis> {
    Ok(CochainBasis::enumerate_capped(w, k, n, region, backend, cap)?.filter(|s| !s.iter().all(|&v| y[v])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_window, AmbientSpec};

    #[test]
    fn line_connecting_map_is_iso() {
        let w = Arc::new(make_window(&AmbientSpec::grid(1), 6, 6).unwrap());
        let pair = ComplementaryPair::half_spaces(w, 8, 3).unwrap();
        assert_eq!(pair.covering_index(1), Some(0));
        assert_eq!(pair.covering_index(3), Some(2));
        assert_eq!(pair.family.thickening_index(0, 2), Some(2));
        let r = mv_check(&pair, 1, &[0, 1, 2], Backend::Alternating).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.groups[0].yz, AbelianGroup::free(1));
        assert_eq!(r.groups[1].x, AbelianGroup::free(1));
        assert!(r.connecting[0].is_isomorphism());
    }

    #[test]
    fn trivial_pair() {
        let w = Arc::new(make_window(&AmbientSpec::grid(1), 4, 3).unwrap());
        let all = w.full_mask();
        let fam = BigFamily::new(w.clone(), vec![all.clone(); 3], 2).unwrap();
        let pair = ComplementaryPair::new(fam, all).unwrap();
        let r = mv_check(&pair, 1, &[0, 1], Backend::OrderedNormalized).unwrap();
        assert!(r.passed());
    }
}
