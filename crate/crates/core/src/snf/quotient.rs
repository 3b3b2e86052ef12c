//! Subquotients `Z / G` of integer lattices.
//!
//! Unit pivots of `G` are eliminated linearly first, so the Smith form only
//! sees the small residual relation matrix.

use ibig::IBig;
use num_traits::Zero;

use super::echelon::{kernel_basis, Echelon};
use super::group::AbelianGroup;
use super::{smith_normal_form, DenseMatrix, Int, SparseMatrix, SparseVec};
use crate::error::{Error, Result};

/// A computed subquotient with explicit generators and a coordinate map.
#[derive(Clone, Debug)]
pub struct Quotient {
    dim: usize,
    group: AbelianGroup,
    generators: Vec<SparseVec>,
    units: Echelon,
    residual: Echelon,
    // maps residual-row coordinates to Smith coordinates
    u: DenseMatrix,
    // Smith coordinate index of each group generator
    slots: Vec<usize>,
}

impl Quotient {
    /// `Z / G` for lattices given by generators in `Z^dim`. Every element of
    /// `g_gens` must lie in the span of `z_gens`.
    pub fn new(dim: usize, z_gens: Vec<SparseVec>, g_gens: Vec<SparseVec>) -> Result<Quotient> {
        let z = Echelon::from_vectors(&z_gens);
        if let Some(g) = g_gens.iter().find(|g| !z.contains(g)) {
            return Err(Error::Incompatible(format!(
                "relation with support {:?} is not in the subgroup",
                g.iter().map(|(i, _)| i).collect::<Vec<_>>()
            )));
        }
        Ok(Self::new_unchecked(dim, z_gens, g_gens))
    }

    pub(crate) fn new_unchecked(dim: usize, z_gens: Vec<SparseVec>, g_gens: Vec<SparseVec>) -> Quotient {
        let g = Echelon::from_vectors(&g_gens);
        let mut units = Echelon::new();
        let mut nonunit = Vec::new();
        for i in 0..g.rank() {
            if g.is_unit_row(i) {
                units.insert(g.row(i).clone(), SparseVec::new());
            } else {
                nonunit.push(g.row(i).clone());
            }
        }

        let mut residual = Echelon::new();
        for (i, zv) in z_gens.iter().enumerate() {
            let r = units.reduce_units(zv);
            if !r.is_zero() {
                residual.insert(r, SparseVec::unit(i));
            }
        }
        let s = residual.rank();

        let rel_cols: Vec<SparseVec> = nonunit
            .iter()
            .map(|v| {
                residual
                    .solve(&units.reduce_units(v))
                    .expect("relations lie in the subgroup")
            })
            .collect();
        let rel = DenseMatrix::from_columns(s, &rel_cols);
        let snf = smith_normal_form(&rel);
        let diag = snf.diagonal();

        let one = IBig::from(1);
        let mut torsion = Vec::new();
        let mut slots = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if *d != one {
                torsion.push(d.clone());
                slots.push(i);
            }
        }
        let nz = diag.len();
        slots.extend(nz..s);
        let group = AbelianGroup { rank: s - nz, torsion };

        let generators = slots
            .iter()
            .map(|&slot| {
                let mut combo = SparseVec::new();
                for row in 0..s {
                    let c = &snf.u_inv[(row, slot)];
                    if !c.is_zero() {
                        combo = combo.axpy(c, residual.aux(row));
                    }
                }
                let mut v = SparseVec::new();
                for (i, c) in combo.iter() {
                    v = v.axpy(c, &z_gens[i]);
                }
                v
            })
            .collect();

        Quotient { dim, group, generators, units, residual, u: snf.u, slots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Elements of `Z` whose classes are the canonical generators.
    pub fn generators(&self) -> &[SparseVec] {
        &self.generators
    }

    /// Coordinates of the class of `v ∈ Z` on the canonical generators, with
    /// torsion entries reduced. `None` when `v` is not in `Z`.
    pub fn coords(&self, v: &SparseVec) -> Option<Vec<Int>> {
        let a = self.residual.solve(&self.units.reduce_units(v))?;
        let dense = a.to_dense(self.residual.rank());
        let full = self.u.mul_vec(&dense);
        let mut out: Vec<Int> = self.slots.iter().map(|&s| full[s].clone()).collect();
        self.group.normalize(&mut out);
        Some(out)
    }

    /// True when `v ∈ G`, for `v ∈ Z`.
    pub fn is_trivial_class(&self, v: &SparseVec) -> bool {
        self.coords(v).is_some_and(|c| c.iter().all(|x| x.is_zero()))
    }
}

/// `ker(d_out) / im(d_in)` for consecutive differentials.
pub fn cohomology_at(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<Quotient> {
    if d_in.nrows() != d_out.ncols() {
        return Err(Error::Dimension(format!(
            "differentials do not compose: {} rows vs {} columns",
            d_in.nrows(),
            d_out.ncols()
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::Incompatible("composite of differentials is nonzero".into()));
    }
    let dim = d_out.ncols();
    let z = kernel_basis(d_out.columns());
    let g: Vec<SparseVec> = d_in.columns().iter().filter(|c| !c.is_zero()).cloned().collect();
    Ok(Quotient::new_unchecked(dim, z, g))
}

/// Integer solution of `M x = b` using only the columns allowed by `mask`,
/// or `None` when no such solution exists.
pub fn image_membership(m: &SparseMatrix, b: &SparseVec, mask: Option<&[bool]>) -> Option<SparseVec> {
    let mut e = Echelon::new();
    for (j, c) in m.columns().iter().enumerate() {
        if mask.map_or(true, |mk| mk[j]) {
            e.insert(c.clone(), SparseVec::unit(j));
        }
    }
    let x = e.solve_tracked(b)?;
    debug_assert_eq!(&m.mul_vec(&x), b);
    Some(x)
}
