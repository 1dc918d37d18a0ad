//! The γ constant and the γ-norm `‖x‖_γ = γ · max_i |x_i|`, which makes any
//! finite-dimensional evolution algebra a Banach algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::EvolutionAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{Element, LinearMap};
use crate::numeric::{Field, Modulus};

/// Slack allowed in `‖xy‖ ≤ ‖x‖‖y‖` for floating-point samples.
pub const SUBMULT_SLACK: f64 = 1e-12;

/// `γ = max_j Σ_i |a_ij|`, the largest absolute column sum.
pub fn gamma<F: Field>(e: &EvolutionAlgebra<F>) -> F::Modulus {
    let n = e.dim();
    (0..n)
        .map(|j| (0..n).fold(F::Modulus::zero(), |acc, i| acc + e.a(i, j).modulus()))
        .fold(
            F::Modulus::zero(),
            |best, s| if s > best { s } else { best },
        )
}

/// γ together with the algebra it was computed from; only constructible
/// when γ > 0.
#[derive(Debug, Clone)]
pub struct GammaNorm<'a, F: Field> {
    gamma: F::Modulus,
    algebra: &'a EvolutionAlgebra<F>,
}

impl<'a, F: Field> GammaNorm<'a, F> {
    pub fn new(algebra: &'a EvolutionAlgebra<F>) -> Result<Self> {
        let gamma = gamma(algebra);
        if gamma <= F::Modulus::zero() {
            return Err(Error::DegenerateNorm);
        }
        Ok(Self { gamma, algebra })
    }

    pub fn gamma(&self) -> &F::Modulus {
        &self.gamma
    }

    pub fn algebra(&self) -> &EvolutionAlgebra<F> {
        self.algebra
    }

    pub fn norm(&self, x: &Element<F>) -> F::Modulus {
        let max = x
            .coords()
            .iter()
            .map(Field::modulus)
            .fold(
                F::Modulus::zero(),
                |best, m| if m > best { m } else { best },
            );
        self.gamma.clone() * max
    }
}

pub fn norm_gamma<F: Field>(e: &EvolutionAlgebra<F>, x: &Element<F>) -> Result<F::Modulus> {
    if x.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: x.dim(),
        });
    }
    Ok(GammaNorm::new(e)?.norm(x))
}

/// Operator norm induced by `‖·‖_γ` on the matrix-vector action `x ↦ Mx`.
/// γ cancels, leaving the maximum absolute row sum.
pub fn operator_norm<F: Field>(e: &EvolutionAlgebra<F>, m: &LinearMap<F>) -> Result<F::Modulus> {
    GammaNorm::new(e)?;
    Ok(max_row_sum(m))
}

pub(crate) fn max_row_sum<F: Field>(m: &LinearMap<F>) -> F::Modulus {
    (0..m.dim())
        .map(|i| {
            m.row(i)
                .iter()
                .fold(F::Modulus::zero(), |acc, x| acc + x.modulus())
        })
        .fold(
            F::Modulus::zero(),
            |best, s| if s > best { s } else { best },
        )
}

/// `‖xy‖_γ / (‖x‖_γ ‖y‖_γ)`, or 0 when either factor is zero.
pub fn product_ratio<F: Field>(
    e: &EvolutionAlgebra<F>,
    x: &Element<F>,
    y: &Element<F>,
) -> Result<f64> {
    let norm = GammaNorm::new(e)?;
    let denom = (norm.norm(x) * norm.norm(y)).to_f64();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(norm.norm(&e.multiply(x, y)?).to_f64() / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmultiplicativityReport {
    pub samples: usize,
    pub violations: usize,
    pub worst_ratio: f64,
}

/// Samples `sample_count` pairs with coordinates uniform in `[-1, 1]` and
/// counts violations of `‖xy‖_γ ≤ ‖x‖_γ‖y‖_γ + 1e-12`.
pub fn check_submultiplicative<F: Field>(
    e: &EvolutionAlgebra<F>,
    sample_count: usize,
    seed: u64,
) -> Result<SubmultiplicativityReport> {
    let norm = GammaNorm::new(e)?;
    let n = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| {
        Element::new(
            (0..n)
                .map(|_| F::from_f64(rng.random_range(-1.0..=1.0)))
                .collect(),
        )
    };
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..sample_count {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let lhs = norm.norm(&e.multiply(&x, &y)?).to_f64();
        let rhs = (norm.norm(&x) * norm.norm(&y)).to_f64();
        if lhs > rhs + SUBMULT_SLACK {
            violations += 1;
        }
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(SubmultiplicativityReport {
        samples: sample_count,
        violations,
        worst_ratio: worst,
    })
}
