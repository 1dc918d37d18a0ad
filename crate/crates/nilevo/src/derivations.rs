//! Derivations of canonical maximal-nilpotency evolution algebras.
//!
//! Every such algebra has `Der(E)` spanned by `E_{1n}` alone when the
//! interior index set `I_A` is nonempty, and by `E_{1n}` together with a
//! diagonal-plus-last-column map `D_α` when `I_A` is empty.

use serde::Serialize;

use crate::algebra::EvolutionAlgebra;
use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::numeric::{two_pow, Field, CHECK_TOL};

/// Which branch of the classification applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    #[serde(rename = "nonempty_IA")]
    NonemptyIa,
    #[serde(rename = "empty_IA")]
    EmptyIa,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::NonemptyIa => "nonempty_IA",
            Case::EmptyIa => "empty_IA",
        }
    }
}

/// `I_A = {(i, j) : i + 1 < j < n, a_ij != 0}` with 1-based pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IndexSet {
    pairs: Vec<(usize, usize)>,
}

impl IndexSet {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn case(&self) -> Case {
        if self.is_empty() {
            Case::EmptyIa
        } else {
            Case::NonemptyIa
        }
    }
}

pub fn index_set<F: Field>(e: &EvolutionAlgebra<F>) -> IndexSet {
    let n = e.dim();
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in (i + 2)..n {
            if !e.a(i - 1, j - 1).is_structurally_zero() {
                pairs.push((i, j));
            }
        }
    }
    IndexSet { pairs }
}

/// Checks the classification preconditions (canonical maximal form and
/// `rank A = n - 1`) and returns the applicable case.
pub fn classify_case<F: Field>(e: &EvolutionAlgebra<F>) -> Result<Case> {
    let n = e.dim();
    if !e.is_canonical_maximal() {
        return Err(Error::NotClassified(
            "structural matrix is not strictly upper triangular with nonzero superdiagonal".into(),
        ));
    }
    let rank = e.rank_structural();
    if rank + 1 != n {
        return Err(Error::NotClassified(format!(
            "rank A = {rank}, expected {}",
            n - 1
        )));
    }
    Ok(index_set(e).case())
}

/// The `(α, β)` coordinates of a classified derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationParams<F> {
    alpha: F,
    beta: F,
    case: Case,
}

impl<F: Field> DerivationParams<F> {
    pub fn new(alpha: F, beta: F, case: Case) -> Result<Self> {
        if case == Case::NonemptyIa && !alpha.is_structurally_zero() {
            return Err(Error::InvalidParameter(
                "alpha must be 0 when I_A is nonempty".into(),
            ));
        }
        Ok(Self { alpha, beta, case })
    }

    /// Parameters for `e`, with the case read off the algebra.
    pub fn for_algebra(e: &EvolutionAlgebra<F>, alpha: F, beta: F) -> Result<Self> {
        Self::new(alpha, beta, classify_case(e)?)
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

    pub fn scaled(&self, t: &F) -> Self {
        Self {
            alpha: self.alpha.clone() * t.clone(),
            beta: self.beta.clone() * t.clone(),
            case: self.case,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationSpace<F> {
    pub case: Case,
    pub dimension: usize,
    pub basis: Vec<LinearMap<F>>,
}

/// `a_{k-1,n} / a_{k-1,k}` for 1-based row `k` in `2..=n-1`: the coupling of
/// row `k`'s last-column entry to the structure constants.
pub(crate) fn last_column_coupling<F: Field>(e: &EvolutionAlgebra<F>, k: usize) -> F {
    let n = e.dim();
    e.a(k - 2, n - 1).clone() / e.a(k - 2, k - 1).clone()
}

pub fn derivation_space<F: Field>(e: &EvolutionAlgebra<F>) -> Result<DerivationSpace<F>> {
    let case = classify_case(e)?;
    let n = e.dim();
    let top_right = LinearMap::unit(n, 0, n - 1);
    let basis = match case {
        Case::NonemptyIa => vec![top_right],
        Case::EmptyIa => vec![
            build_derivation(e, &DerivationParams::new(F::one(), F::zero(), case)?)?,
            top_right,
        ],
    };
    Ok(DerivationSpace {
        case,
        dimension: basis.len(),
        basis,
    })
}

/// The classified derivation with parameters `(α, β)`: diagonal
/// `2^{k-1} α`, top-right `β`, and row `k` (`2 ≤ k ≤ n-1`) last-column entry
/// `(2^{k-1} - 2^{n-1}) α a_{k-1,n} / a_{k-1,k}`.
pub fn build_derivation<F: Field>(
    e: &EvolutionAlgebra<F>,
    params: &DerivationParams<F>,
) -> Result<LinearMap<F>> {
    let case = classify_case(e)?;
    if case != params.case {
        return Err(Error::InvalidParameter(format!(
            "parameters tagged {} but the algebra is in case {}",
            params.case.as_str(),
            case.as_str()
        )));
    }
    if case == Case::NonemptyIa && !params.alpha.is_structurally_zero() {
        return Err(Error::InvalidParameter(
            "alpha must be 0 when I_A is nonempty".into(),
        ));
    }
    let n = e.dim();
    let alpha = &params.alpha;
    let mut d = LinearMap::zero(n);
    for k in 1..=n {
        d[(k - 1, k - 1)] = F::from_bigint(&two_pow(k as u32 - 1)) * alpha.clone();
    }
    let top = F::from_bigint(&two_pow(n as u32 - 1));
    for k in 2..n {
        let coef = F::from_bigint(&two_pow(k as u32 - 1)) - top.clone();
        d[(k - 1, n - 1)] = coef * alpha.clone() * last_column_coupling(e, k);
    }
    d[(0, n - 1)] = params.beta.clone() + d[(0, n - 1)].clone();
    Ok(d)
}

/// `D(e_i e_j) = D(e_i) e_j + e_i D(e_j)` for all `i ≤ j`, with `D(e_i)` the
/// `i`-th row of `d`. Exact for rationals; float backends compare each
/// coordinate within `1e-10` of the magnitude of the terms entering it.
pub fn is_derivation<F: Field>(e: &EvolutionAlgebra<F>, d: &LinearMap<F>) -> bool {
    let n = e.dim();
    if d.dim() != n {
        return false;
    }
    for i in 0..n {
        for j in i..n {
            for c in 0..n {
                // (x · e_j)_c = x_j a_jc
                let mut rhs =
                    d[(i, j)].clone() * e.a(j, c).clone() + d[(j, i)].clone() * e.a(i, c).clone();
                let mut scale = d[(i, j)].magnitude() * e.a(j, c).magnitude()
                    + d[(j, i)].magnitude() * e.a(i, c).magnitude();
                let mut lhs = F::zero();
                if i == j {
                    for k in 0..n {
                        lhs = lhs + e.a(i, k).clone() * d[(k, c)].clone();
                        scale += e.a(i, k).magnitude() * d[(k, c)].magnitude();
                    }
                }
                rhs = rhs - lhs;
                if !rhs.is_negligible(CHECK_TOL, scale.max(1.0)) {
                    return false;
                }
            }
        }
    }
    true
}

/// `[D1, D2] = D1 D2 - D2 D1`.
pub fn lie_bracket<F: Field>(d1: &LinearMap<F>, d2: &LinearMap<F>) -> Result<LinearMap<F>> {
    d1.mul(d2)?.sub(&d2.mul(d1)?)
}
