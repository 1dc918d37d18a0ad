//! Evolution algebras given by a structural matrix in a natural basis.

use crate::error::{Error, Result};
use crate::linalg::{row_reduce, Element, LinearMap};
use crate::numeric::{Field, FieldTag};

/// An `n`-dimensional evolution algebra: `e_i · e_j = 0` for `i != j` and
/// `e_i · e_i = Σ_k a_ik e_k`, so row `i` of the structural matrix holds the
/// coordinates of `e_i²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionAlgebra<F> {
    structure: LinearMap<F>,
}

/// A subspace stored as its reduced row echelon basis. Two subspaces are equal
/// iff their canonical bases are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<F> {
    basis: Vec<Vec<F>>,
    ambient: usize,
}

impl<F: Field> Subspace<F> {
    pub fn from_spanning(ambient: usize, mut vectors: Vec<Vec<F>>) -> Self {
        row_reduce(&mut vectors);
        Self {
            basis: vectors,
            ambient,
        }
    }

    pub fn whole(ambient: usize) -> Self {
        Self {
            basis: (0..ambient)
                .map(|i| Element::<F>::basis(ambient, i).into_coords())
                .collect(),
            ambient,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
}

impl<F: Field> EvolutionAlgebra<F> {
    pub fn new(structure: LinearMap<F>) -> Result<Self> {
        if structure.dim() < 1 {
            return Err(Error::Domain(
                "an evolution algebra needs dimension at least 1".into(),
            ));
        }
        Ok(Self { structure })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        Self::new(LinearMap::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn field_tag(&self) -> FieldTag {
        F::TAG
    }

    pub fn structure(&self) -> &LinearMap<F> {
        &self.structure
    }

    /// `a_ij` with 0-based indices.
    pub fn a(&self, i: usize, j: usize) -> &F {
        &self.structure[(i, j)]
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G) -> EvolutionAlgebra<G> {
        EvolutionAlgebra {
            structure: self.structure.map(f),
        }
    }

    /// `x · y = Σ_j (Σ_i a_ij x_i y_i) e_j`.
    pub fn multiply(&self, x: &Element<F>, y: &Element<F>) -> Result<Element<F>> {
        let n = self.dim();
        for v in [x, y] {
            if v.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.dim(),
                });
            }
        }
        Ok(Element::new(self.product_coords(x.coords(), y.coords())))
    }

    fn product_coords(&self, x: &[F], y: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for i in 0..n {
            let w = x[i].clone() * y[i].clone();
            if w.is_negligible(0.0, 0.0) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = o.clone() + self.structure[(i, j)].clone() * w.clone();
            }
        }
        out
    }

    /// `U · V = span{u · v}` over spanning vectors.
    pub fn subspace_product(&self, u: &Subspace<F>, v: &Subspace<F>) -> Subspace<F> {
        let mut span = Vec::with_capacity(u.dim() * v.dim());
        for a in u.basis() {
            for b in v.basis() {
                span.push(self.product_coords(a, b));
            }
        }
        Subspace::from_spanning(self.dim(), span)
    }

    /// `[E^1, ..., E^{k_max}]` with `E^1 = E` and
    /// `E^k = Σ_{i=1}^{⌊k/2⌋} E^i E^{k-i}`.
    pub fn power_subspaces(&self, k_max: usize) -> Result<Vec<Subspace<F>>> {
        if k_max < 1 {
            return Err(Error::Domain("k_max must be at least 1".into()));
        }
        let n = self.dim();
        let mut powers = vec![Subspace::whole(n)];
        for k in 2..=k_max {
            powers.push(self.next_power(&powers, k));
        }
        Ok(powers)
    }

    fn next_power(&self, powers: &[Subspace<F>], k: usize) -> Subspace<F> {
        let mut span = Vec::new();
        for i in 1..=k / 2 {
            let prod = self.subspace_product(&powers[i - 1], &powers[k - i - 1]);
            span.extend(prod.basis);
        }
        Subspace::from_spanning(self.dim(), span)
    }

    /// Smallest `m` with `E^m = 0`, searched up to the maximal possible index
    /// `2^{n-1} + 1`; `None` if the algebra is not nilpotent.
    pub fn nilpotency_index(&self) -> Option<u64> {
        let n = self.dim();
        let bound = max_nilpotency_index(n);
        let mut powers = vec![Subspace::whole(n)];
        for k in 2..=bound as usize {
            let next = self.next_power(&powers, k);
            if next.is_zero() {
                return Some(k as u64);
            }
            powers.push(next);
        }
        None
    }

    /// Strictly upper triangular with every `a_{i,i+1}` nonzero.
    pub fn is_canonical_maximal(&self) -> bool {
        let n = self.dim();
        if n < 2 {
            return false;
        }
        let lower_zero = (0..n).all(|i| (0..=i).all(|j| self.a(i, j).is_structurally_zero()));
        let super_nonzero = (0..n - 1).all(|i| !self.a(i, i + 1).is_structurally_zero());
        lower_zero && super_nonzero
    }

    pub fn rank_structural(&self) -> usize {
        self.structure.rank()
    }

    pub fn max_entry_magnitude(&self) -> f64 {
        self.structure.max_magnitude()
    }
}

/// `2^{n-1} + 1`.
pub fn max_nilpotency_index(n: usize) -> u64 {
    (1u64 << (n - 1)) + 1
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::numeric::Rational;
    use num_rational::BigRational;

    pub fn q(p: i64) -> Rational {
        BigRational::from_integer(p.into())
    }

    pub fn qr(p: i64, d: i64) -> Rational {
        BigRational::new(p.into(), d.into())
    }

    pub fn alg(rows: &[&[i64]]) -> EvolutionAlgebra<Rational> {
        EvolutionAlgebra::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// n = 3, a12 = a13 = a23 = 1.
    pub fn e3() -> EvolutionAlgebra<Rational> {
        alg(&[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]])
    }

    /// n = 4, superdiagonal ones, a13 = 1, a14 = a24 = 0.
    pub fn e4() -> EvolutionAlgebra<Rational> {
        alg(&[&[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]])
    }

    pub fn e4_empty() -> EvolutionAlgebra<Rational> {
        alg(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]])
    }

    pub fn el(v: &[i64]) -> Element<Rational> {
        Element::new(v.iter().map(|&x| q(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::numeric::Rational;
    use proptest::prelude::*;

    #[test]
    fn basis_products() {
        let e = e3();
        let b = |i| Element::<Rational>::basis(3, i);
        assert_eq!(e.multiply(&b(0), &b(1)).unwrap(), el(&[0, 0, 0]));
        assert_eq!(e.multiply(&b(0), &b(0)).unwrap(), el(&[0, 1, 1]));
        assert_eq!(e.multiply(&b(1), &b(1)).unwrap(), el(&[0, 0, 1]));
        assert_eq!(
            e.multiply(&el(&[1, 1, 0]), &el(&[1, 1, 0])).unwrap(),
            el(&[0, 1, 2])
        );
    }

    #[test]
    fn multiply_rejects_dimension_mismatch() {
        let r = e3().multiply(&el(&[1, 0]), &el(&[1, 0, 0]));
        assert_eq!(
            r,
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn power_subspace_dims() {
        let dims = |e: &EvolutionAlgebra<Rational>, k| {
            e.power_subspaces(k)
                .unwrap()
                .iter()
                .map(Subspace::dim)
                .collect::<Vec<_>>()
        };
        assert_eq!(dims(&e3(), 5), vec![3, 2, 1, 1, 0]);
        assert_eq!(dims(&alg(&[&[0, 1], &[0, 0]]), 3), vec![2, 1, 0]);
        assert_eq!(dims(&alg(&[&[0, 0], &[0, 0]]), 2), vec![2, 0]);
        let e3_powers = e3().power_subspaces(4).unwrap();
        assert_eq!(
            e3_powers[1],
            Subspace::from_spanning(
                3,
                vec![el(&[0, 1, 0]).into_coords(), el(&[0, 0, 1]).into_coords()]
            )
        );
        assert_eq!(e3_powers[2], e3_powers[3]);
        assert!(e3().power_subspaces(0).is_err());
    }

    #[test]
    fn nilpotency_examples() {
        assert_eq!(
            alg(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]).nilpotency_index(),
            Some(2)
        );
        assert_eq!(e3().nilpotency_index(), Some(5));
        assert_eq!(alg(&[&[1, 0], &[0, 0]]).nilpotency_index(), None);
        assert_eq!(e4().nilpotency_index(), Some(9));
    }

    #[test]
    fn canonical_form_examples() {
        assert!(e3().is_canonical_maximal());
        assert!(!alg(&[&[0, 1, 1], &[0, 0, 0], &[0, 0, 0]]).is_canonical_maximal());
        assert!(!alg(&[&[0, 1, 1], &[1, 0, 1], &[0, 0, 0]]).is_canonical_maximal());
        assert!(!alg(&[&[1, 1, 1], &[0, 0, 1], &[0, 0, 0]]).is_canonical_maximal());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(e3().rank_structural(), 2);
        assert_eq!(alg(&[&[0, 0], &[0, 0]]).rank_structural(), 0);
        assert_eq!(
            alg(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]).rank_structural(),
            3
        );
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(p, d)| qr(p, d))
    }

    fn random_algebra(max_n: usize) -> impl Strategy<Value = EvolutionAlgebra<Rational>> {
        (2..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(prop_oneof![2 => Just(q(0)), 3 => small_rational()], n * n)
                .prop_map(move |v| {
                    EvolutionAlgebra::from_rows(v.chunks(n).map(<[_]>::to_vec).collect()).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multiplication_commutes(e in random_algebra(5), seed in proptest::collection::vec(small_rational(), 10)) {
            let n = e.dim();
            let x = Element::new(seed[..n].to_vec());
            let y = Element::new(seed[5..5 + n].to_vec());
            prop_assert_eq!(e.multiply(&x, &y).unwrap(), e.multiply(&y, &x).unwrap());
        }

        #[test]
        fn rank_equals_dim_of_square(e in random_algebra(6)) {
            let powers = e.power_subspaces(2).unwrap();
            prop_assert_eq!(e.rank_structural(), powers[1].dim());
        }

        #[test]
        fn canonical_form_is_idempotent(e in random_algebra(5)) {
            let s = Subspace::from_spanning(e.dim(), e.structure().rows());
            let again = Subspace::from_spanning(e.dim(), s.basis().to_vec());
            prop_assert_eq!(s, again);
        }
    }
}
