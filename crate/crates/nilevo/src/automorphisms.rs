//! Automorphisms of canonical maximal-nilpotency evolution algebras.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::algebra::EvolutionAlgebra;
use crate::derivations::{classify_case, index_set, Case};
use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::numeric::{
    gcd_int, pow_int, pow_two_power, two_pow, Field, FieldTag, Scalar, CHECK_TOL,
};

/// `η = gcd{2^{j-1} - 2^i : (i, j) ∈ I_A}`. Always even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Eta(u64);

impl Eta {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::Domain("eta must be positive".into()));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

pub fn eta<F: Field>(e: &EvolutionAlgebra<F>) -> Result<Eta> {
    let ia = index_set(e);
    if ia.is_empty() {
        return Err(Error::NotApplicable(
            "eta is only defined when I_A is nonempty".into(),
        ));
    }
    let diffs: Vec<BigInt> = ia
        .pairs()
        .iter()
        .map(|&(i, j)| two_pow(j as u32 - 1) - two_pow(i as u32))
        .collect();
    let g = gcd_int(&diffs)?;
    Eta::new(
        g.to_u64()
            .ok_or_else(|| Error::Domain("eta does not fit in 64 bits".into()))?,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismParams<F> {
    alpha: F,
    beta: F,
    case: Case,
}

impl<F: Field> AutomorphismParams<F> {
    /// Rejects `α = 0`. The `α^η = 1` constraint needs the algebra; see
    /// [`Self::for_algebra`] and [`build_automorphism`].
    pub fn new(alpha: F, beta: F, case: Case) -> Result<Self> {
        if alpha.is_negligible(0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "automorphism alpha must be nonzero".into(),
            ));
        }
        Ok(Self { alpha, beta, case })
    }

    /// Classifies `e` and checks every constraint on `α`.
    pub fn for_algebra(e: &EvolutionAlgebra<F>, alpha: F, beta: F) -> Result<Self> {
        let case = classify_case(e)?;
        if case == Case::NonemptyIa {
            check_root_of_unity(&alpha, eta(e)?)?;
        }
        Self::new(alpha, beta, case)
    }

    pub fn alpha(&self) -> &F {
        &self.alpha
    }

    pub fn beta(&self) -> &F {
        &self.beta
    }

    pub fn case(&self) -> Case {
        self.case
    }
}

/// Last-column entries `(φ_{2,n}, ..., φ_{n-1,n})` from the recurrence, solved
/// from the bottom row up:
///
/// `a_{r,r+1} φ_{r+1,n} = a_{r,n}(α^{2^r} - α^{2^{n-1}}) - Σ_{j=r+2}^{n-1} a_{r,j} φ_{j,n}`.
pub fn phi_entries<F: Field>(e: &EvolutionAlgebra<F>, alpha: &F) -> Result<Vec<F>> {
    if !e.is_canonical_maximal() {
        return Err(Error::NotClassified(
            "phi recurrence needs the canonical maximal form".into(),
        ));
    }
    if alpha.is_negligible(0.0, 0.0) {
        return Err(Error::InvalidParameter(
            "automorphism alpha must be nonzero".into(),
        ));
    }
    let n = e.dim();
    let top = pow_two_power(alpha, n as u32 - 1);
    // phi[j] holds φ_{j,n} for 1-based j in 2..=n-1.
    let mut phi = vec![F::zero(); n];
    for r in (1..=n.saturating_sub(2)).rev() {
        let base = e.a(r - 1, n - 1).clone() * (pow_two_power(alpha, r as u32) - top.clone());
        let rhs = ((r + 2)..n).fold(base, |acc, j| {
            acc - e.a(r - 1, j - 1).clone() * phi[j].clone()
        });
        phi[r + 1] = rhs / e.a(r - 1, r).clone();
    }
    Ok(phi.into_iter().skip(2).take(n.saturating_sub(2)).collect())
}

fn check_root_of_unity<F: Field>(alpha: &F, eta: Eta) -> Result<()> {
    let p = pow_int(alpha, eta.value());
    if p.approx_eq(&F::one(), CHECK_TOL, 1.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha = {} is not an eta-th root of unity (eta = {})",
            alpha.encode(),
            eta.value()
        )))
    }
}

/// The classified automorphism: diagonal `α^{2^{k-1}}`, top-right `β`, and
/// last column from [`phi_entries`] (case `I_A ≠ ∅`) or the closed form
/// `a_{k-1,n}(α^{2^{k-1}} - α^{2^{n-1}}) / a_{k-1,k}` (case `I_A = ∅`).
pub fn build_automorphism<F: Field>(
    e: &EvolutionAlgebra<F>,
    params: &AutomorphismParams<F>,
) -> Result<LinearMap<F>> {
    let case = classify_case(e)?;
    if case != params.case {
        return Err(Error::InvalidParameter(format!(
            "parameters tagged {} but the algebra is in case {}",
            params.case.as_str(),
            case.as_str()
        )));
    }
    let alpha = &params.alpha;
    if alpha.is_negligible(0.0, 0.0) {
        return Err(Error::InvalidParameter(
            "automorphism alpha must be nonzero".into(),
        ));
    }
    let n = e.dim();
    let mut m = LinearMap::zero(n);
    for k in 1..=n {
        m[(k - 1, k - 1)] = pow_two_power(alpha, k as u32 - 1);
    }
    match case {
        Case::NonemptyIa => {
            check_root_of_unity(alpha, eta(e)?)?;
            for (offset, v) in phi_entries(e, alpha)?.into_iter().enumerate() {
                m[(offset + 1, n - 1)] = v;
            }
        }
        Case::EmptyIa => {
            let top = m[(n - 1, n - 1)].clone();
            for k in 2..n {
                let diff = m[(k - 1, k - 1)].clone() - top.clone();
                m[(k - 1, n - 1)] = e.a(k - 2, n - 1).clone() * diff / e.a(k - 2, k - 1).clone();
            }
        }
    }
    m[(0, n - 1)] = params.beta.clone();
    Ok(m)
}

/// Invertible and `M(e_i e_j) = M(e_i) M(e_j)` for all `i ≤ j`, with `M(e_i)`
/// the `i`-th row. Float backends compare each coordinate within `1e-10` of
/// the magnitude of the terms entering it.
pub fn is_automorphism<F: Field>(e: &EvolutionAlgebra<F>, m: &LinearMap<F>) -> bool {
    let n = e.dim();
    if m.dim() != n || m.invert().is_err() {
        return false;
    }
    for i in 0..n {
        for j in i..n {
            for c in 0..n {
                // (M(e_i) M(e_j))_c = Σ_k a_kc M_ik M_jk
                let mut diff = F::zero();
                let mut scale = 0.0;
                for k in 0..n {
                    let t = m[(i, k)].clone() * m[(j, k)].clone();
                    scale += t.magnitude() * e.a(k, c).magnitude();
                    diff = diff + e.a(k, c).clone() * t;
                }
                if i == j {
                    for k in 0..n {
                        scale += e.a(i, k).magnitude() * m[(k, c)].magnitude();
                        diff = diff - e.a(i, k).clone() * m[(k, c)].clone();
                    }
                }
                if !diff.is_negligible(CHECK_TOL, scale.max(1.0)) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn compose<F: Field>(m1: &LinearMap<F>, m2: &LinearMap<F>) -> Result<LinearMap<F>> {
    m1.mul(m2)
}

pub fn invert<F: Field>(m: &LinearMap<F>) -> Result<LinearMap<F>> {
    m.invert()
}

/// The `η`-th roots of unity in the given field: `{1, -1}` over the
/// rationals and reals (η is even), all `η` of them over the complexes.
pub fn roots_of_unity(eta: Eta, field: FieldTag) -> Vec<Scalar> {
    use num_complex::Complex64;
    match field {
        FieldTag::Rational => vec![
            Scalar::Rational(Field::one()),
            Scalar::Rational(-<crate::numeric::Rational as Field>::one()),
        ],
        FieldTag::Real => {
            if eta.value().is_multiple_of(2) {
                vec![Scalar::Real(1.0), Scalar::Real(-1.0)]
            } else {
                vec![Scalar::Real(1.0)]
            }
        }
        FieldTag::Complex => (0..eta.value())
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / eta.value() as f64;
                Scalar::Complex(snap(Complex64::from_polar(1.0, theta)))
            })
            .collect(),
    }
}

// cos/sin of multiples of π/2 leave ~1e-16 residue.
fn snap(z: num_complex::Complex64) -> num_complex::Complex64 {
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    num_complex::Complex64::new(clean(z.re), clean(z.im))
}
