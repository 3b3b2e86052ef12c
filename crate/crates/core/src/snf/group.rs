use std::fmt;

use ibig::ops::DivRemEuclid;
use ibig::IBig;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::echelon::{kernel_basis, Echelon};
use super::quotient::Quotient;
use super::{DenseMatrix, Int, SparseVec};

/// Finitely generated abelian group `Z^rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_t` with
/// `d_1 | d_2 | … | d_t` and every `d_i ≥ 2`.
///
/// Generators are ordered torsion first, then free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn cyclic(order: i64) -> Self {
        match order {
            0 => Self::free(1),
            1 | -1 => Self::trivial(),
            d => AbelianGroup { rank: 0, torsion: vec![IBig::from(d.abs())] },
        }
    }

    /// Canonical form of `Z^extra_free ⊕ ⊕ Z/d` for arbitrary orders `d`
    /// (zeros count as free summands, units are dropped).
    pub fn from_invariants(orders: &[Int], extra_free: usize) -> Self {
        let n = orders.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, d) in orders.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        let diag = super::smith_normal_form(&m).diagonal();
        let one = IBig::from(1);
        AbelianGroup {
            rank: extra_free + diag.iter().filter(|d| d.is_zero()).count(),
            torsion: diag.into_iter().filter(|d| !d.is_zero() && *d != one).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.rank
    }

    /// Order of generator `i`; `None` for free generators.
    pub fn order(&self, i: usize) -> Option<&Int> {
        self.torsion.get(i)
    }

    /// Reduces torsion coordinates into `[0, d)`.
    pub fn normalize(&self, coords: &mut [Int]) {
        for (c, d) in coords.iter_mut().zip(&self.torsion) {
            let (_, r) = (&*c).div_rem_euclid(d);
            *c = r;
        }
    }

    /// Relation lattice generators in `Z^ngens`.
    pub fn relations(&self) -> Vec<SparseVec> {
        self.torsion
            .iter()
            .enumerate()
            .map(|(i, d)| SparseVec::from_pairs([(i, d.clone())]))
            .collect()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        AbelianGroup::from_invariants(&orders, self.rank + other.rank)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AbelianGroup", 2)?;
        st.serialize_field("rank", &self.rank)?;
        let tors: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        st.serialize_field("torsion", &tors)?;
        st.end()
    }
}

/// Homomorphism between canonical groups, as a matrix taking source
/// generator coordinates to target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub source: AbelianGroup,
    pub target: AbelianGroup,
    pub matrix: DenseMatrix,
}

impl GroupHom {
    pub fn new(source: AbelianGroup, target: AbelianGroup, mut matrix: DenseMatrix) -> Self {
        assert_eq!(matrix.nrows(), target.ngens());
        assert_eq!(matrix.ncols(), source.ngens());
        for (i, d) in target.torsion.iter().enumerate() {
            for j in 0..matrix.ncols() {
                let (_, r) = (&matrix[(i, j)]).div_rem_euclid(d);
                matrix[(i, j)] = r;
            }
        }
        GroupHom { source, target, matrix }
    }

    /// Builds a hom from the images of the source generators.
    pub fn from_images(source: AbelianGroup, target: AbelianGroup, images: &[Vec<Int>]) -> Self {
        let mut m = DenseMatrix::zeros(target.ngens(), source.ngens());
        for (j, img) in images.iter().enumerate() {
            for (i, x) in img.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        GroupHom::new(source, target, m)
    }

    /// Relations of the source map into relations of the target.
    pub fn is_well_defined(&self) -> bool {
        let rel = Echelon::from_vectors(&self.target.relations());
        self.source
            .torsion
            .iter()
            .enumerate()
            .all(|(j, d)| rel.contains(&self.matrix.column(j).scale(d)))
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        GroupHom::new(g.clone(), g.clone(), DenseMatrix::identity(g.ngens()))
    }

    pub fn zero(source: AbelianGroup, target: AbelianGroup) -> Self {
        let m = DenseMatrix::zeros(target.ngens(), source.ngens());
        GroupHom::new(source, target, m)
    }

    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        assert_eq!(first.target, self.source, "composition of incompatible homs");
        GroupHom::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        let mut y = self.matrix.mul_vec(x);
        self.target.normalize(&mut y);
        y
    }

    /// Lattice in `Z^target_gens`, containing the target relations, whose
    /// image in the target group is the image of the hom.
    pub fn image_lattice(&self) -> Echelon {
        let mut cols: Vec<SparseVec> = (0..self.matrix.ncols()).map(|j| self.matrix.column(j)).collect();
        cols.extend(self.target.relations());
        Echelon::from_vectors(&cols)
    }

    /// Lattice in `Z^source_gens` whose image in the source group is the kernel.
    pub fn kernel_lattice(&self) -> Echelon {
        let ns = self.source.ngens();
        let mut cols: Vec<SparseVec> = (0..ns).map(|j| self.matrix.column(j)).collect();
        cols.extend(self.target.relations());
        let mut gens: Vec<SparseVec> = kernel_basis(&cols)
            .into_iter()
            .map(|k| k.reindex(|i| (i < ns).then_some(i)))
            .collect();
        gens.extend(self.source.relations());
        Echelon::from_vectors(&gens)
    }

    pub fn is_zero(&self) -> bool {
        let rel = Echelon::from_vectors(&self.target.relations());
        (0..self.matrix.ncols()).all(|j| rel.contains(&self.matrix.column(j)))
    }

    pub fn is_surjective(&self) -> bool {
        let img = self.image_lattice();
        (0..self.target.ngens()).all(|i| img.contains(&SparseVec::unit(i)))
    }

    pub fn is_injective(&self) -> bool {
        let k = self.kernel_lattice();
        let rel = Echelon::from_vectors(&self.source.relations());
        let ok = k.basis().all(|v| rel.contains(v));
        ok
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }

    /// The image as an abstract group.
    pub fn image_group(&self) -> AbelianGroup {
        let img = self.image_lattice();
        let basis: Vec<SparseVec> = img.basis().cloned().collect();
        Quotient::new(self.target.ngens(), basis, self.target.relations())
            .expect("relations lie in the image lattice")
            .group()
            .clone()
    }
}

/// Lattice equality of two echelon bases.
pub fn same_lattice(a: &Echelon, b: &Echelon) -> bool {
    a.basis().all(|v| b.contains(v)) && b.basis().all(|v| a.contains(v))
}

/// Exactness of `A --f--> B --g--> C` at `B`: `im f = ker g` as subgroups.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> bool {
    assert_eq!(f.target, g.source);
    same_lattice(&f.image_lattice(), &g.kernel_lattice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_invariants() {
        let g = AbelianGroup::from_invariants(&[IBig::from(2), IBig::from(3), IBig::from(0)], 1);
        assert_eq!(g, AbelianGroup { rank: 2, torsion: vec![IBig::from(6)] });
        assert_eq!(g.to_string(), "Z^2 + Z/6");
    }

    #[test]
    fn doubling_on_z() {
        let z = AbelianGroup::free(1);
        let two = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_rows(&[vec![2]]));
        assert!(two.is_injective());
        assert!(!two.is_surjective());
        assert!(!two.is_isomorphism());
        assert_eq!(two.image_group(), z);
        let neg = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_rows(&[vec![-1]]));
        assert!(neg.is_isomorphism());
    }

    #[test]
    fn exact_short_sequence() {
        // 0 -> Z --2--> Z --> Z/2 -> 0
        let z = AbelianGroup::free(1);
        let z2 = AbelianGroup::cyclic(2);
        let f = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_rows(&[vec![2]]));
        let g = GroupHom::new(z.clone(), z2.clone(), DenseMatrix::from_rows(&[vec![1]]));
        assert!(is_exact_at(&f, &g));
        assert!(g.is_surjective());
        assert!(g.compose(&f).is_zero());
        let bad = GroupHom::new(z.clone(), z.clone(), DenseMatrix::from_rows(&[vec![4]]));
        assert!(!is_exact_at(&bad, &g));
    }
}
