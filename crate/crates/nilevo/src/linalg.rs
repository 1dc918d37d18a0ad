//! Dense square matrices, coordinate vectors and row reduction over any [`Field`].
//!
//! A [`LinearMap`] follows the structural-matrix convention: row `i` holds the
//! coordinates of the image of `e_i`, so `apply(x) = x · M` for a row vector
//! of coordinates. [`LinearMap::mul_vec`] is the plain matrix-vector product.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{Field, PIVOT_REL_TOL};

/// A coordinate vector `x = Σ x_i e_i` in the natural basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<F> {
    coords: Vec<F>,
}

impl<F: Field> Element<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            coords: vec![F::zero(); n],
        }
    }

    /// The natural basis vector `e_i` (0-based index).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.coords[i] = F::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        ))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coords.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        let scale = self.max_magnitude().max(1.0);
        self.coords
            .iter()
            .all(|x| x.is_negligible(PIVOT_REL_TOL, scale))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coords.iter().map(Field::magnitude).fold(0.0, f64::max)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// An `n × n` matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct LinearMap<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for LinearMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.chunks(self.n.max(1)))
            .finish()
    }
}

impl<F: Field> LinearMap<F> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            data: vec![F::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Single-entry matrix `E_{ij}` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m[(i, j)] = F::one();
        m
    }

    pub fn diagonal(diag: Vec<F>) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for (i, d) in diag.into_iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[F]>::to_vec)
            .collect()
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> impl Iterator<Item = &F> {
        self.data.iter()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> LinearMap<G> {
        LinearMap {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_negligible(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let t = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + t;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, m: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..m {
            acc = acc.mul(self).expect("same size");
        }
        acc
    }

    /// Image of `x` under the map: `Σ_i x_i · row_i`.
    pub fn apply(&self, x: &Element<F>) -> Result<Element<F>> {
        check_dim(self.n, x.dim())?;
        let mut out = vec![F::zero(); self.n];
        for (i, xi) in x.coords().iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o = o.clone() + xi.clone() * self[(i, j)].clone();
            }
        }
        Ok(Element::new(out))
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &[F]) -> Result<Vec<F>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Gauss-Jordan inverse. Only an exactly zero pivot column is singular:
    /// automorphism diagonals such as `α^(2^(n-1))` are legitimately tiny.
    pub fn invert(&self) -> Result<Self> {
        let n = self.n;
        let mut aug: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| aug[a][col].magnitude().total_cmp(&aug[b][col].magnitude()))
                .filter(|&r| !aug[r][col].is_negligible(0.0, 0.0))
                .ok_or(Error::Singular)?;
            aug.swap(col, pivot);
            let inv = F::one() / aug[col][col].clone();
            for x in aug[col].iter_mut() {
                *x = x.clone() * inv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = aug[r][col].clone();
                if f.is_negligible(0.0, 0.0) {
                    continue;
                }
                let pivot_row = aug[col].clone();
                for (x, p) in aug[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Self::from_rows(rows)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows();
        row_reduce(&mut rows)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    /// `max_ij |a_ij - b_ij| / max(1, |a_ij|, |b_ij|)`.
    pub fn mixed_residual(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                (a.clone() - b.clone()).magnitude() / 1f64.max(a.magnitude()).max(b.magnitude())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        let scale = self.max_magnitude().max(1.0);
        self.data
            .iter()
            .all(|x| x.is_negligible(PIVOT_REL_TOL, scale))
    }
}

impl<F> std::ops::Index<(usize, usize)> for LinearMap<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.n + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for LinearMap<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.n + j]
    }
}

/// Reduces `rows` in place to reduced row echelon form (pivots normalised to
/// one, zero rows removed) and returns the rank.
///
/// Rational entries are reduced exactly. Float entries use partial pivoting
/// and treat anything below `PIVOT_REL_TOL * max|entry|` as zero.
pub fn row_reduce<F: Field>(rows: &mut Vec<Vec<F>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let scale = rows
        .iter()
        .flatten()
        .map(Field::magnitude)
        .fold(0.0, f64::max);
    let mut rank = 0;
    for col in 0..width {
        if rank == rows.len() {
            break;
        }
        let candidate = (rank..rows.len())
            .filter(|&r| !rows[r][col].is_negligible(PIVOT_REL_TOL, scale))
            .max_by(|&a, &b| {
                rows[a][col]
                    .magnitude()
                    .total_cmp(&rows[b][col].magnitude())
            });
        let Some(p) = candidate else { continue };
        rows.swap(rank, p);
        let inv = F::one() / rows[rank][col].clone();
        for x in rows[rank].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        rows[rank][col] = F::one();
        for r in 0..rows.len() {
            if r == rank {
                continue;
            }
            let f = rows[r][col].clone();
            if f.is_negligible(0.0, 0.0) {
                continue;
            }
            let pivot_row = rows[rank][..width].to_vec();
            for (x, p) in rows[r].iter_mut().zip(pivot_row) {
                *x = x.clone() - f.clone() * p;
            }
            rows[r][col] = F::zero();
        }
        rank += 1;
    }
    rows.truncate(rank);
    // Float reduction can leave sub-tolerance dust off the pivots.
    if !F::is_exact() {
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                if x.is_negligible(PIVOT_REL_TOL, scale.max(1.0)) {
                    *x = F::zero();
                }
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;
    use num_rational::BigRational;

    fn q(p: i64) -> Rational {
        BigRational::from_integer(p.into())
    }

    fn qm(rows: &[&[i64]]) -> LinearMap<Rational> {
        LinearMap::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn invert_round_trip() {
        let m = qm(&[&[2, 0, 5], &[0, 4, -12], &[0, 0, 16]]);
        let inv = m.invert().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), LinearMap::identity(3));
        assert_eq!(inv.mul(&m).unwrap(), LinearMap::identity(3));
    }

    #[test]
    fn singular_is_rejected() {
        let m = qm(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.invert(), Err(Error::Singular));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn apply_uses_rows_as_images() {
        let m = qm(&[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]]);
        let e1 = Element::basis(3, 0);
        assert_eq!(m.apply(&e1).unwrap().coords(), &[q(0), q(1), q(1)]);
        assert_eq!(
            m.mul_vec(&[q(0), q(0), q(1)]).unwrap(),
            vec![q(1), q(1), q(0)]
        );
    }

    #[test]
    fn row_reduce_is_idempotent() {
        let mut rows = vec![
            vec![q(2), q(4), q(6)],
            vec![q(1), q(1), q(1)],
            vec![q(3), q(5), q(7)],
        ];
        let r = row_reduce(&mut rows);
        assert_eq!(r, 2);
        let mut again = rows.clone();
        assert_eq!(row_reduce(&mut again), 2);
        assert_eq!(again, rows);
    }

    #[test]
    fn float_row_reduce_drops_near_dependent_rows() {
        let mut rows = vec![vec![1.0, 2.0], vec![1.0, 2.0 + 1e-14]];
        assert_eq!(row_reduce(&mut rows), 1);
    }
}
