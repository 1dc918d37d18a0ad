//! Exponentials of derivations and the structure of `exp(Der(E))` inside
//! `Aut(E)`: membership, closure under products and conjugation, the
//! quotient `Aut(E)/exp(Der(E))`, and the 2×2 corner isomorphism.

use serde::Serialize;

use crate::algebra::EvolutionAlgebra;
use crate::automorphisms::{build_automorphism, compose, eta, invert, AutomorphismParams};
use crate::derivations::{
    build_derivation, classify_case, last_column_coupling, Case, DerivationParams,
};
use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::norm::{max_row_sum, GammaNorm};
use crate::numeric::{pow_int, two_pow, Field, FieldTag, Modulus, Transcendental};

/// Terms allowed in the truncated exponential series.
pub const SERIES_TERM_CAP: usize = 500;
/// Default residual for `exp(Der(E))` membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Below this `|α|` the divided difference in `β′` is evaluated by Taylor series.
pub const SMALL_ALPHA: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpMethod {
    Series,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpResult<F> {
    pub matrix: LinearMap<F>,
    pub method: ExpMethod,
    /// Series only: terms summed for the scaled argument.
    pub terms_used: Option<usize>,
    /// Series only: number of squarings undoing the scaling.
    pub squarings: u32,
    pub params: Option<DerivationParams<F>>,
}

/// `e^M` by scaling and squaring a truncated power series.
///
/// `M` is scaled by `2^{-s}` until its operator norm is at most one; terms of
/// the scaled series are added while the operator norm of the next term is at
/// least `tol`, and the partial sum is squared `s` times.
pub fn exp_series<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    m: &LinearMap<T>,
    tol: f64,
) -> Result<ExpResult<T>> {
    GammaNorm::new(e)?;
    let n = m.dim();
    let norm = max_row_sum(m).to_f64();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 1.0 {
        squarings += 1;
    }
    let scaled = m.scale(&T::from_f64(2f64.powi(-(squarings as i32))));
    let mut sum = LinearMap::identity(n);
    let mut term = LinearMap::identity(n);
    let mut terms_used = 1;
    loop {
        term = term
            .mul(&scaled)?
            .scale(&(T::one() / T::from_i64(terms_used as i64)));
        if max_row_sum(&term).to_f64() < tol {
            break;
        }
        if terms_used >= SERIES_TERM_CAP {
            return Err(Error::SeriesCap(SERIES_TERM_CAP));
        }
        sum = sum.add(&term)?;
        terms_used += 1;
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum)?;
    }
    Ok(ExpResult {
        matrix: sum,
        method: ExpMethod::Series,
        terms_used: Some(terms_used),
        squarings,
        params: None,
    })
}

fn require_empty_case<F: Field>(
    e: &EvolutionAlgebra<F>,
    params: &DerivationParams<F>,
) -> Result<()> {
    let case = classify_case(e)?;
    if case != Case::EmptyIa || params.case() != Case::EmptyIa {
        return Err(Error::NotApplicable(
            "closed powers are stated for the case I_A = ∅".into(),
        ));
    }
    Ok(())
}

/// Bound on the log-spread of diagonals in float membership sweeps: the
/// direct products behind closure and normality cancel terms as large as
/// `e^{spread}`, so `MEMBERSHIP_TOL` is resolvable in double precision only
/// while the spread stays near this value.
pub const FLOAT_LOG_SPREAD: f64 = 8.0;

/// Largest `|α|` (capped at 1) with `2^{n-1}|α| <= FLOAT_LOG_SPREAD`.
pub fn conditioned_alpha_bound(n: usize) -> f64 {
    (FLOAT_LOG_SPREAD / (1u64 << (n - 1)) as f64).min(1.0)
}

/// Largest `|ln|α||` (capped at `ln 2`) for an automorphism diagonal with
/// `(2^{n-1} - 1)|ln|α|| <= FLOAT_LOG_SPREAD`, i.e. `κ(φ) <= e^8`.
pub fn conditioned_log_scale_bound(n: usize) -> f64 {
    let spread = ((1u64 << (n - 1)) - 1).max(1) as f64;
    (FLOAT_LOG_SPREAD / spread).min(std::f64::consts::LN_2)
}

/// `d^m` in closed form: diagonal `2^{m(k-1)} α^m`, row-`k` last column
/// `(2^{m(k-1)} - 2^{m(n-1)}) α^m a_{k-1,n}/a_{k-1,k}`, top-right
/// `(2^{m(n-1)} - 1)/(2^{n-1} - 1) · α^{m-1} β`.
pub fn derivation_power_closed<F: Field>(
    e: &EvolutionAlgebra<F>,
    params: &DerivationParams<F>,
    m: u32,
) -> Result<LinearMap<F>> {
    require_empty_case(e, params)?;
    if m < 1 {
        return Err(Error::Domain("power m must be at least 1".into()));
    }
    if m == 1 {
        return build_derivation(e, params);
    }
    let n = e.dim() as u32;
    let alpha_m = pow_int(params.alpha(), m as u64);
    let pow2 = |k: u32| F::from_bigint(&two_pow(m * (k - 1)));
    let mut out = LinearMap::zero(n as usize);
    for k in 1..=n {
        out[(k as usize - 1, k as usize - 1)] = pow2(k) * alpha_m.clone();
    }
    for k in 2..n {
        let coef = pow2(k) - pow2(n);
        out[(k as usize - 1, n as usize - 1)] =
            coef * alpha_m.clone() * last_column_coupling(e, k as usize);
    }
    let ratio =
        F::from_bigint(&(two_pow(m * (n - 1)) - 1u8)) / F::from_bigint(&(two_pow(n - 1) - 1u8));
    out[(0, n as usize - 1)] =
        ratio * pow_int(params.alpha(), m as u64 - 1) * params.beta().clone();
    Ok(out)
}

/// `(e^{Nα} - e^{α}) / ((N - 1) α)` with `N = 2^{n-1}`, equal to 1 at `α = 0`.
pub fn beta_prime_factor<T: Transcendental>(n: usize, alpha: &T) -> T {
    let big_n = T::from_bigint(&two_pow(n as u32 - 1));
    if alpha.magnitude() < SMALL_ALPHA {
        // Σ_{k≥1} (N^k - 1) α^{k-1} / (k! (N - 1)) = Σ (N^{k-1} + ... + 1) α^{k-1} / k!
        let mut acc = T::zero();
        let mut geometric = T::zero();
        let mut n_pow = T::one();
        let mut factorial = 1i64;
        for k in 1..=4 {
            geometric = geometric + n_pow.clone();
            n_pow = n_pow * big_n.clone();
            factorial *= k;
            acc = acc + geometric.clone() * pow_int(alpha, k as u64 - 1) / T::from_i64(factorial);
        }
        return acc;
    }
    let num = (big_n.clone() * alpha.clone()).exp() - alpha.exp();
    num / ((big_n - T::one()) * alpha.clone())
}

/// `e^d` in closed form. Case `I_A ≠ ∅`: `I + β E_{1n}`. Case `I_A = ∅`:
/// diagonal `e^{2^{k-1}α}`, row-`k` last column
/// `(e^{2^{k-1}α} - e^{2^{n-1}α}) a_{k-1,n}/a_{k-1,k}`, top-right `β′`.
pub fn exp_derivation_closed<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    params: &DerivationParams<T>,
) -> Result<ExpResult<T>> {
    // Validates case agreement and the α = 0 constraint.
    build_derivation(e, params)?;
    let n = e.dim();
    let mut out = LinearMap::identity(n);
    match params.case() {
        Case::NonemptyIa => {
            out[(0, n - 1)] = params.beta().clone();
        }
        Case::EmptyIa => {
            let alpha = params.alpha();
            let diag: Vec<T> = (1..=n)
                .map(|k| (T::from_bigint(&two_pow(k as u32 - 1)) * alpha.clone()).exp())
                .collect();
            for k in 1..=n {
                out[(k - 1, k - 1)] = diag[k - 1].clone();
            }
            for k in 2..n {
                out[(k - 1, n - 1)] =
                    (diag[k - 1].clone() - diag[n - 1].clone()) * last_column_coupling(e, k);
            }
            out[(0, n - 1)] = params.beta().clone() * beta_prime_factor(n, alpha);
        }
    }
    Ok(ExpResult {
        matrix: out,
        method: ExpMethod::ClosedForm,
        terms_used: None,
        squarings: 0,
        params: Some(params.clone()),
    })
}

/// A recovered preimage under `exp` together with the residual
/// `max_ij |M_ij - C_ij| / max(1, |M_ij|, |C_ij|)` against the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership<F> {
    pub params: DerivationParams<F>,
    pub residual: f64,
}

/// Recovers `(α, β)` from `M` (one logarithm of `M_11`, the rest read back
/// through the closed form) and reports the residual. `None` when no
/// candidate exists, e.g. a nonpositive leading entry over the reals.
pub fn recover_exp_parameters<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    m: &LinearMap<T>,
) -> Result<Option<Membership<T>>> {
    let case = classify_case(e)?;
    let n = e.dim();
    if m.dim() != n {
        return Ok(None);
    }
    let (alpha, beta) = match case {
        Case::NonemptyIa => (T::zero(), m[(0, n - 1)].clone()),
        Case::EmptyIa => {
            let Ok(alpha) = m[(0, 0)].ln() else {
                return Ok(None);
            };
            let factor = beta_prime_factor(n, &alpha);
            if factor.is_negligible(0.0, 0.0) {
                return Ok(None);
            }
            let beta = m[(0, n - 1)].clone() / factor;
            (alpha, beta)
        }
    };
    let params = DerivationParams::new(alpha, beta, case)?;
    let candidate = exp_derivation_closed(e, &params)?.matrix;
    Ok(Some(Membership {
        params,
        residual: m.mixed_residual(&candidate),
    }))
}

/// `Some((α, β))` when `M = e^d` for the classified derivation `d(α, β)`
/// within `tol`.
pub fn membership_exp_der<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    m: &LinearMap<T>,
    tol: f64,
) -> Result<Option<DerivationParams<T>>> {
    Ok(recover_exp_parameters(e, m)?
        .filter(|r| r.residual <= tol)
        .map(|r| r.params))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCheck<T> {
    pub product: LinearMap<T>,
    pub member: bool,
    pub recovered: Option<DerivationParams<T>>,
    pub residual: f64,
    /// Rows `k + 1` of the last column equal `ν_k a_{k,n} / a_{k,k+1}`.
    pub nu_matches: bool,
    /// The printed `λ` formula against the actual `(1, n)` entry; `None` in
    /// case `I_A ≠ ∅`, where no `λ` is stated.
    pub paper_lambda_matches: Option<bool>,
    pub lambda_printed: Option<T>,
    pub lambda_actual: T,
}

/// `(e^{Nα} - e^{2α}) / (3α)` with `N = 2^{n-1}`, limit `(N - 2)/3` at 0.
fn printed_lambda_factor<T: Transcendental>(n: usize, alpha: &T) -> T {
    let big_n = T::from_bigint(&two_pow(n as u32 - 1));
    let three = T::from_i64(3);
    if alpha.magnitude() < SMALL_ALPHA {
        let mut acc = T::zero();
        let mut factorial = 1i64;
        let mut n_pow = T::one();
        let mut two_pow_k = T::one();
        for k in 1..=4 {
            n_pow = n_pow * big_n.clone();
            two_pow_k = two_pow_k * T::from_i64(2);
            factorial *= k;
            acc = acc
                + (n_pow.clone() - two_pow_k.clone()) * pow_int(alpha, k as u64 - 1)
                    / T::from_i64(factorial);
        }
        return acc / three;
    }
    ((big_n * alpha.clone()).exp() - (T::from_i64(2) * alpha.clone()).exp())
        / (three * alpha.clone())
}

/// The printed product coefficient
/// `λ = e^{Nα₂}(e^{Nα₁} - e^{2α₁})/(3α₁) β₁ + e^{Nα₁}(e^{Nα₂} - e^{2α₂})/(3α₂) β₂`.
pub fn printed_lambda<T: Transcendental>(
    n: usize,
    p1: &DerivationParams<T>,
    p2: &DerivationParams<T>,
) -> T {
    let big_n = T::from_bigint(&two_pow(n as u32 - 1));
    let e_n = |a: &T| (big_n.clone() * a.clone()).exp();
    e_n(p2.alpha()) * printed_lambda_factor(n, p1.alpha()) * p1.beta().clone()
        + e_n(p1.alpha()) * printed_lambda_factor(n, p2.alpha()) * p2.beta().clone()
}

/// Multiplies two closed-form exponentials, checks that the product is again
/// in `exp(Der(E))`, compares the `ν_k` entries, and audits the printed `λ`.
pub fn exp_product_check<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    p1: &DerivationParams<T>,
    p2: &DerivationParams<T>,
) -> Result<ProductCheck<T>> {
    let n = e.dim();
    let x1 = exp_derivation_closed(e, p1)?.matrix;
    let x2 = exp_derivation_closed(e, p2)?.matrix;
    let product = compose(&x1, &x2)?;
    let recovered = recover_exp_parameters(e, &product)?;
    let residual = recovered.as_ref().map_or(f64::INFINITY, |r| r.residual);
    let member = residual <= MEMBERSHIP_TOL;

    let alpha = p1.alpha().clone() + p2.alpha().clone();
    let big = (T::from_bigint(&two_pow(n as u32 - 1)) * alpha.clone()).exp();
    let nu_matches = (1..n.saturating_sub(1)).all(|k| {
        let nu = (T::from_bigint(&two_pow(k as u32)) * alpha.clone()).exp() - big.clone();
        let expected = nu * e.a(k - 1, n - 1).clone() / e.a(k - 1, k).clone();
        let got = &product[(k, n - 1)];
        let scale = 1f64.max(expected.magnitude()).max(got.magnitude());
        got.approx_eq(&expected, 1e-10, scale)
    });

    let lambda_actual = product[(0, n - 1)].clone();
    let (lambda_printed, paper_lambda_matches) = match p1.case() {
        Case::NonemptyIa => (None, None),
        Case::EmptyIa => {
            let printed = printed_lambda(n, p1, p2);
            let scale = 1f64.max(printed.magnitude()).max(lambda_actual.magnitude());
            let ok = printed.approx_eq(&lambda_actual, MEMBERSHIP_TOL, scale);
            (Some(printed), Some(ok))
        }
    };

    Ok(ProductCheck {
        product,
        member,
        recovered: recovered.map(|r| r.params),
        residual,
        nu_matches,
        paper_lambda_matches,
        lambda_printed,
        lambda_actual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationCheck<T> {
    pub conjugate: LinearMap<T>,
    pub recovered: Option<DerivationParams<T>>,
    pub residual: f64,
}

/// `φ e^d φ^{-1}` and its recovered preimage.
pub fn conjugate_exp<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    aut: &AutomorphismParams<T>,
    der: &DerivationParams<T>,
) -> Result<ConjugationCheck<T>> {
    let phi = build_automorphism(e, aut)?;
    let x = exp_derivation_closed(e, der)?.matrix;
    let conjugate = compose(&compose(&phi, &x)?, &invert(&phi)?)?;
    let recovered = recover_exp_parameters(e, &conjugate)?;
    Ok(ConjugationCheck {
        residual: recovered.as_ref().map_or(f64::INFINITY, |r| r.residual),
        recovered: recovered.map(|r| r.params),
        conjugate,
    })
}

/// Whether `φ e^d φ^{-1}` lies in `exp(Der(E))` within `tol`.
pub fn conjugation_check<T: Transcendental>(
    e: &EvolutionAlgebra<T>,
    aut: &AutomorphismParams<T>,
    der: &DerivationParams<T>,
    tol: f64,
) -> Result<bool> {
    Ok(conjugate_exp(e, aut, der)?.residual <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientIndex {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientReport {
    pub case: Case,
    pub field: FieldTag,
    pub eta: Option<u64>,
    pub quotient_description: String,
    pub index: QuotientIndex,
}

/// `Aut(E)/exp(Der(E))`: the `η`-th roots of unity of the field when
/// `I_A ≠ ∅`, and `K*/exp(K)` when `I_A = ∅`.
pub fn quotient_report<F: Field>(
    e: &EvolutionAlgebra<F>,
    field: FieldTag,
) -> Result<QuotientReport> {
    let case = classify_case(e)?;
    let report = match case {
        Case::NonemptyIa => {
            let eta = eta(e)?.value();
            let (count, desc) = match field {
                FieldTag::Complex => (
                    eta,
                    format!("group of the {eta} complex {eta}-th roots of unity"),
                ),
                _ if eta % 2 == 0 => (
                    2,
                    format!("{{1, -1}}: the {eta}-th roots of unity in the {field} field"),
                ),
                _ => (
                    1,
                    format!("{{1}}: the {eta}-th roots of unity in the {field} field"),
                ),
            };
            QuotientReport {
                case,
                field,
                eta: Some(eta),
                quotient_description: desc,
                index: QuotientIndex::Finite(count),
            }
        }
        Case::EmptyIa => {
            let (index, desc) = match field {
                FieldTag::Real => (
                    QuotientIndex::Finite(2),
                    "R*/exp(R) = R*/R_{>0}, cosets represented by alpha = 1 and alpha = -1".to_string(),
                ),
                FieldTag::Complex => (QuotientIndex::Finite(1), "C*/exp(C) is trivial since exp(C) = C*".to_string()),
                FieldTag::Rational => (
                    QuotientIndex::Infinite,
                    "Q*/exp(Q): exp is not rational-valued off 0, so exp(Der(E)) meets Aut(E) only in alpha = 1; infinitely many cosets"
                        .to_string(),
                ),
            };
            QuotientReport {
                case,
                field,
                eta: None,
                quotient_description: desc,
                index,
            }
        }
    };
    Ok(report)
}

/// The `(α, β)` corner of an `Aut(E)`-shaped matrix: entries `(1, 1)` and `(1, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerParams<T> {
    pub a: T,
    pub b: T,
}

impl<T: Field> CornerParams<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if a.is_negligible(0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "corner entry a must be nonzero".into(),
            ));
        }
        Ok(Self { a, b })
    }

    /// `[[a, b], [0, a²]]`.
    pub fn h2_matrix(&self) -> LinearMap<T> {
        let mut m = LinearMap::zero(2);
        m[(0, 0)] = self.a.clone();
        m[(0, 1)] = self.b.clone();
        m[(1, 1)] = self.a.clone() * self.a.clone();
        m
    }

    /// Product in `H₂`: `(a₁a₂, a₁b₂ + b₁a₂²)`.
    pub fn h2_mul(&self, other: &Self) -> Self {
        Self {
            a: self.a.clone() * other.a.clone(),
            b: self.a.clone() * other.b.clone()
                + self.b.clone() * other.a.clone() * other.a.clone(),
        }
    }
}

pub fn corner_projection<T: Field>(m: &LinearMap<T>) -> Result<CornerParams<T>> {
    let n = m.dim();
    if n < 2 {
        return Err(Error::Domain("corner projection needs n >= 2".into()));
    }
    CornerParams::new(m[(0, 0)].clone(), m[(0, n - 1)].clone())
}

/// `μ_n = 1 / (2^{n-1} - 1)`.
pub fn mu(n: usize) -> f64 {
    1.0 / ((1u64 << (n - 1)) as f64 - 1.0)
}

/// `(a, b) ↦ [[a^μ, a^{μ-1} b + ½a^{μ+1} - ½a^μ], [0, a^{μ+1}]]` from `H₂`
/// into `H₃ = {[[x, y], [0, x^{2^{n-1}}]]}`. Principal powers; a
/// nonpositive real `a` is a branch error.
pub fn iso_h2_to_h3<T: Transcendental>(c: &CornerParams<T>, n: usize) -> Result<LinearMap<T>> {
    if n <= 2 {
        return Err(Error::Domain(
            "the H2 -> H3 isomorphism is stated for n > 2".into(),
        ));
    }
    let mu = mu(n);
    let a_mu = c.a.powf(mu)?;
    let a_mu_minus = c.a.powf(mu - 1.0)?;
    let a_mu_plus = c.a.powf(mu + 1.0)?;
    let half = T::one() / T::from_i64(2);
    let mut m = LinearMap::zero(2);
    m[(0, 1)] = a_mu_minus * c.b.clone() + half.clone() * a_mu_plus.clone() - half * a_mu.clone();
    m[(0, 0)] = a_mu;
    m[(1, 1)] = a_mu_plus;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::automorphisms::is_automorphism;
    use crate::numeric::Rational;
    use num_complex::Complex64;
    use num_traits::ToPrimitive;

    fn real(e: &EvolutionAlgebra<Rational>) -> EvolutionAlgebra<f64> {
        e.map_field(|x| ToPrimitive::to_f64(x).unwrap())
    }

    fn dp(e: &EvolutionAlgebra<f64>, a: f64, b: f64) -> DerivationParams<f64> {
        DerivationParams::for_algebra(e, a, b).unwrap()
    }

    fn close(a: &LinearMap<f64>, b: &LinearMap<f64>, tol: f64) -> bool {
        a.mixed_residual(b) <= tol
    }

    #[test]
    fn series_examples() {
        let e = real(&e3());
        let r = exp_series(&e, &LinearMap::zero(3), 1e-14).unwrap();
        assert_eq!(r.matrix, LinearMap::identity(3));
        assert_eq!(r.terms_used, Some(1));

        let top = LinearMap::unit(3, 0, 2);
        let r = exp_series(&e, &top, 1e-14).unwrap();
        assert_eq!(r.matrix, LinearMap::identity(3).add(&top).unwrap());

        let d = build_derivation(&e, &dp(&e, 2f64.ln(), 0.0)).unwrap();
        let r = exp_series(&e, &d, 1e-14).unwrap();
        let expected = LinearMap::from_rows(vec![
            vec![2.0, 0.0, 0.0],
            vec![0.0, 4.0, -12.0],
            vec![0.0, 0.0, 16.0],
        ])
        .unwrap();
        assert!(close(&r.matrix, &expected, 1e-10), "{:?}", r.matrix);
        assert!(r.squarings > 0);
    }

    #[test]
    fn series_rejects_zero_algebra() {
        let z = real(&alg(&[&[0, 0], &[0, 0]]));
        assert_eq!(
            exp_series(&z, &LinearMap::identity(2), 1e-14),
            Err(Error::DegenerateNorm)
        );
    }

    #[test]
    fn series_cap_is_enforced() {
        let e = real(&e3());
        assert_eq!(
            exp_series(&e, &LinearMap::identity(3), 0.0),
            Err(Error::SeriesCap(SERIES_TERM_CAP))
        );
    }

    #[test]
    fn closed_power_examples() {
        let e = e3();
        let p = DerivationParams::for_algebra(&e, q(1), q(1)).unwrap();
        assert_eq!(
            derivation_power_closed(&e, &p, 1).unwrap(),
            build_derivation(&e, &p).unwrap()
        );
        let d3 = derivation_power_closed(&e, &p, 3).unwrap();
        assert_eq!(d3[(0, 0)], q(1));
        assert_eq!(d3[(1, 1)], q(8));
        assert_eq!(d3[(2, 2)], q(64));
        assert_eq!(d3[(1, 2)], q(-56));
        assert_eq!(d3[(0, 2)], q(21));
        assert_eq!(d3, build_derivation(&e, &p).unwrap().pow(3));

        let p0 = DerivationParams::for_algebra(&e, q(0), q(5)).unwrap();
        assert_eq!(
            derivation_power_closed(&e, &p0, 2).unwrap(),
            LinearMap::zero(3)
        );
        assert!(matches!(
            derivation_power_closed(&e, &p, 0),
            Err(Error::Domain(_))
        ));

        let e4 = e4();
        let p4 = DerivationParams::for_algebra(&e4, q(0), q(1)).unwrap();
        assert!(matches!(
            derivation_power_closed(&e4, &p4, 2),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn closed_exp_examples() {
        let e = real(&e3());
        let r = exp_derivation_closed(&e, &dp(&e, 0.0, 1.0)).unwrap();
        assert_eq!(
            r.matrix,
            LinearMap::identity(3)
                .add(&LinearMap::unit(3, 0, 2))
                .unwrap()
        );

        let r = exp_derivation_closed(&e, &dp(&e, 2f64.ln(), 0.0)).unwrap();
        let series = exp_series(
            &e,
            &build_derivation(&e, &dp(&e, 2f64.ln(), 0.0)).unwrap(),
            1e-14,
        )
        .unwrap();
        assert!(close(&r.matrix, &series.matrix, 1e-12));
        assert!((r.matrix[(1, 2)] + 12.0).abs() < 1e-12);

        let e4 = real(&e4());
        let r = exp_derivation_closed(&e4, &dp(&e4, 0.0, -2.5)).unwrap();
        assert_eq!(
            r.matrix,
            LinearMap::identity(4)
                .add(&LinearMap::unit(4, 0, 3).scale(&-2.5))
                .unwrap()
        );
    }

    #[test]
    fn beta_prime_is_continuous_at_zero() {
        for n in 2..=6 {
            assert_eq!(beta_prime_factor(n, &0.0), 1.0);
            let below = beta_prime_factor(n, &(0.99 * SMALL_ALPHA));
            let above = beta_prime_factor(n, &(1.01 * SMALL_ALPHA));
            assert!((below - above).abs() < 1e-7, "n={n}: {below} vs {above}");
        }
    }

    #[test]
    fn membership_examples() {
        let e = real(&e3());
        let id = membership_exp_der(&e, &LinearMap::identity(3), 1e-10)
            .unwrap()
            .unwrap();
        assert_eq!((*id.alpha(), *id.beta()), (0.0, 0.0));

        let x = exp_derivation_closed(&e, &dp(&e, 1.0, 2.0)).unwrap().matrix;
        let p = membership_exp_der(&e, &x, 1e-10).unwrap().unwrap();
        assert!((p.alpha() - 1.0).abs() < 1e-10 && (p.beta() - 2.0).abs() < 1e-10);

        let phi = build_automorphism(&e, &AutomorphismParams::for_algebra(&e, -2.0, 0.0).unwrap())
            .unwrap();
        assert!(is_automorphism(&e, &phi));
        assert_eq!(membership_exp_der(&e, &phi, 1e-9).unwrap(), None);

        let mut off = x.clone();
        off[(1, 1)] *= 1.01;
        assert_eq!(membership_exp_der(&e, &off, 1e-9).unwrap(), None);
    }

    #[test]
    fn product_check_examples() {
        let e = real(&e3());
        let r = exp_product_check(&e, &dp(&e, 0.0, 0.0), &dp(&e, 0.0, 0.0)).unwrap();
        assert!(r.member);
        let rec = r.recovered.unwrap();
        assert_eq!((*rec.alpha(), *rec.beta()), (0.0, 0.0));

        let r = exp_product_check(&e, &dp(&e, 0.0, 1.5), &dp(&e, 0.0, -4.0)).unwrap();
        assert!(r.member);
        assert!((r.recovered.unwrap().beta() + 2.5).abs() < 1e-12);

        let r = exp_product_check(&e, &dp(&e, 1.0, 1.0), &dp(&e, -1.0, 2.0)).unwrap();
        assert!(r.member && r.nu_matches);
        assert!(r.recovered.unwrap().alpha().abs() < 1e-12);
        // the printed λ disagrees with the actual (1,3) entry here
        assert_eq!(r.paper_lambda_matches, Some(false));

        let e4 = real(&e4());
        let r = exp_product_check(&e4, &dp(&e4, 0.0, 1.0), &dp(&e4, 0.0, 2.0)).unwrap();
        assert!(r.member);
        assert_eq!(r.paper_lambda_matches, None);
    }

    #[test]
    fn printed_lambda_matches_when_betas_vanish() {
        let e = real(&e3());
        let r = exp_product_check(&e, &dp(&e, 0.7, 0.0), &dp(&e, -0.2, 0.0)).unwrap();
        assert_eq!(r.paper_lambda_matches, Some(true));
    }

    #[test]
    fn conjugation_examples() {
        let e = real(&e3());
        let id = AutomorphismParams::for_algebra(&e, 1.0, 0.0).unwrap();
        assert!(conjugation_check(&e, &id, &dp(&e, 0.4, -1.0), 1e-12).unwrap());

        let e4 = real(&e4());
        let phi = AutomorphismParams::for_algebra(&e4, -1.0, 3.0).unwrap();
        let c = conjugate_exp(&e4, &phi, &dp(&e4, 0.0, 2.0)).unwrap();
        let expected = LinearMap::identity(4)
            .sub(&LinearMap::unit(4, 0, 3).scale(&2.0))
            .unwrap();
        assert!(close(&c.conjugate, &expected, 1e-14));
        assert!((c.recovered.unwrap().beta() + 2.0).abs() < 1e-14);

        let phi = AutomorphismParams::for_algebra(&e, 1.7, -0.3).unwrap();
        assert!(conjugation_check(&e, &phi, &dp(&e, -0.6, 2.2), 1e-9).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let r = quotient_report(&real(&e3()), FieldTag::Real).unwrap();
        assert_eq!(r.index, QuotientIndex::Finite(2));
        let r = quotient_report(&e3(), FieldTag::Complex).unwrap();
        assert_eq!(r.index, QuotientIndex::Finite(1));
        let r = quotient_report(&e3(), FieldTag::Rational).unwrap();
        assert_eq!(r.index, QuotientIndex::Infinite);
        let r = quotient_report(&e4(), FieldTag::Rational).unwrap();
        assert_eq!((r.index, r.eta), (QuotientIndex::Finite(2), Some(2)));
        let r = quotient_report(&e4(), FieldTag::Complex).unwrap();
        assert_eq!(r.index, QuotientIndex::Finite(2));
    }

    #[test]
    fn corner_and_iso_examples() {
        let id = iso_h2_to_h3(&CornerParams::new(1.0, 0.0).unwrap(), 3).unwrap();
        assert!(close(&id, &LinearMap::identity(2), 1e-15));

        let c1 = CornerParams::new(2.0, 0.0).unwrap();
        let c2 = CornerParams::new(3.0, 1.0).unwrap();
        let lhs = iso_h2_to_h3(&c1.h2_mul(&c2), 3).unwrap();
        let rhs = iso_h2_to_h3(&c1, 3)
            .unwrap()
            .mul(&iso_h2_to_h3(&c2, 3).unwrap())
            .unwrap();
        assert!(close(&lhs, &rhs, 1e-10));
        assert_eq!(
            c1.h2_mul(&c2).h2_matrix(),
            c1.h2_matrix().mul(&c2.h2_matrix()).unwrap()
        );

        assert!(matches!(
            iso_h2_to_h3(&CornerParams::new(-2.0, 0.0).unwrap(), 3),
            Err(Error::Branch(_))
        ));
        let z = CornerParams::new(Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!(iso_h2_to_h3(&z, 4).is_ok());

        let e = real(&e3());
        let phi = build_automorphism(&e, &AutomorphismParams::for_algebra(&e, 2.0, 5.0).unwrap())
            .unwrap();
        assert_eq!(
            corner_projection(&phi).unwrap(),
            CornerParams { a: 2.0, b: 5.0 }
        );
        assert!(CornerParams::new(0.0, 1.0).is_err());
    }
}
