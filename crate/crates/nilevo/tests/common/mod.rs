//! Oracles written independently of the library's algorithms: a brute-force
//! Leibniz solver, naive matrix products, direct multiplicativity residuals and
//! random canonical algebras.

#![allow(dead_code)]

use nilevo::{Case, EvolutionAlgebra, LinearMap, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(p: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

pub fn to_real(e: &EvolutionAlgebra<Rational>) -> EvolutionAlgebra<f64> {
    e.map_field(|x| x.to_f64().unwrap())
}

/// Nonzero rational `p/d` with `1 <= |p| <= 9`, `1 <= d <= 4`.
pub fn nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    let p: i64 = rng.random_range(1..=9);
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    q(sign * p, rng.random_range(1..=4))
}

/// Rational in `[-bound, bound]` with denominator at most 6, zero allowed.
pub fn small_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let d: i64 = rng.random_range(1..=6);
    q(rng.random_range(-bound * d..=bound * d), d)
}

/// Random canonical maximal algebra: nonzero superdiagonal, arbitrary last
/// column above it, and interior entries chosen to realize `case`.
/// `Case::NonemptyIa` needs `n >= 4`.
pub fn random_canonical(rng: &mut ChaCha8Rng, n: usize, case: Case) -> EvolutionAlgebra<Rational> {
    assert!(case == Case::EmptyIa || n >= 4, "I_A is empty for n < 4");
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for i in 0..n - 1 {
        rows[i][i + 1] = nonzero_rational(rng);
    }
    for row in rows.iter_mut().take(n.saturating_sub(2)) {
        if rng.random_bool(0.6) {
            row[n - 1] = nonzero_rational(rng);
        }
    }
    if case == Case::NonemptyIa {
        let interior: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 2)..n - 1).map(move |j| (i, j)))
            .collect();
        let forced = interior[rng.random_range(0..interior.len())];
        for &(i, j) in &interior {
            if (i, j) == forced || rng.random_bool(0.3) {
                rows[i][j] = nonzero_rational(rng);
            }
        }
    }
    EvolutionAlgebra::from_rows(rows).unwrap()
}

pub fn random_case(rng: &mut ChaCha8Rng, n: usize) -> Case {
    if n >= 4 && rng.random_bool(0.5) {
        Case::NonemptyIa
    } else {
        Case::EmptyIa
    }
}

/// Rank of a rational matrix by plain Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone() / pivot.clone();
                let pivot_row = rows[rank][c..].to_vec();
                for (x, p) in rows[r][c..].iter_mut().zip(pivot_row) {
                    *x -= f.clone() * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Linear equations on the `n²` unknowns `d_ij` (row `i` = image of `e_i`)
/// expressing `D(e_i e_j) = D(e_i) e_j + e_i D(e_j)` for all basis pairs.
pub fn leibniz_system(e: &EvolutionAlgebra<Rational>) -> Vec<Vec<Rational>> {
    let n = e.dim();
    let var = |i: usize, j: usize| i * n + j;
    let mut eqs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                if i == j {
                    // Σ_l a_il d_lk - 2 d_ii a_ik = 0
                    for l in 0..n {
                        row[var(l, k)] += e.a(i, l).clone();
                    }
                    row[var(i, i)] -= e.a(i, k).clone() * q(2, 1);
                } else {
                    // d_ij a_jk + d_ji a_ik = 0
                    row[var(i, j)] += e.a(j, k).clone();
                    row[var(j, i)] += e.a(i, k).clone();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    eqs.push(row);
                }
            }
        }
    }
    eqs
}

/// `dim Der(E)` as the nullity of the Leibniz system.
pub fn brute_force_der_dimension(e: &EvolutionAlgebra<Rational>) -> usize {
    let n = e.dim();
    n * n - rank(leibniz_system(e))
}

/// Whether the matrix satisfies every Leibniz equation exactly.
pub fn satisfies_leibniz(e: &EvolutionAlgebra<Rational>, d: &LinearMap<Rational>) -> bool {
    let n = e.dim();
    leibniz_system(e).iter().all(|eq| {
        let mut s = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                s += eq[i * n + j].clone() * d[(i, j)].clone();
            }
        }
        s.is_zero()
    })
}

pub fn naive_mul<F: nilevo::Field>(a: &LinearMap<F>, b: &LinearMap<F>) -> Vec<Vec<F>> {
    let n = a.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(F::zero(), |acc, k| {
                        acc + a[(i, k)].clone() * b[(k, j)].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// `M^m` by `m - 1` naive products.
pub fn naive_pow(m: &LinearMap<Rational>, k: u32) -> LinearMap<Rational> {
    let mut acc = m.clone();
    for _ in 1..k {
        acc = LinearMap::from_rows(naive_mul(&acc, m)).unwrap();
    }
    acc
}

/// `max |φ(e_i²) - φ(e_i)²| / scale` over coordinates, where the scale is the
/// sum of magnitudes of the contributing terms, and cross terms
/// `φ(e_i)φ(e_j)`, `i != j`, likewise measured against zero.
pub fn multiplicativity_residual(e: &EvolutionAlgebra<f64>, phi: &LinearMap<f64>) -> f64 {
    let n = e.dim();
    let mut worst: f64 = 0.0;
    // product of row vectors x, y: Σ_l x_l y_l A_l
    let prod = |x: &[f64], y: &[f64], k: usize| -> (f64, f64) {
        (0..n).fold((0.0, 0.0), |(s, m), l| {
            let t = x[l] * y[l] * e.a(l, k);
            (s + t, m + t.abs())
        })
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (rhs, rhs_scale) = prod(phi.row(i), phi.row(j), k);
                let (lhs, lhs_scale) = if i == j {
                    (0..n).fold((0.0, 0.0), |(s, m), l| {
                        let t = e.a(i, l) * phi[(l, k)];
                        (s + t, m + t.abs())
                    })
                } else {
                    (0.0, 0.0)
                };
                let scale = (lhs_scale + rhs_scale).max(f64::MIN_POSITIVE);
                let r = (lhs - rhs).abs();
                if r > 0.0 {
                    worst = worst.max(r / scale);
                }
            }
        }
    }
    worst
}

/// Exact multiplicativity: `φ(e_i e_j) = φ(e_i) φ(e_j)` for all pairs.
pub fn is_multiplicative_exact(e: &EvolutionAlgebra<Rational>, phi: &LinearMap<Rational>) -> bool {
    let n = e.dim();
    (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|k| {
                let rhs = (0..n).fold(Rational::zero(), |s, l| {
                    s + phi[(i, l)].clone() * phi[(j, l)].clone() * e.a(l, k).clone()
                });
                let lhs = if i == j {
                    (0..n).fold(Rational::zero(), |s, l| {
                        s + e.a(i, l).clone() * phi[(l, k)].clone()
                    })
                } else {
                    Rational::zero()
                };
                lhs == rhs
            })
        })
    }) && rank(phi.rows()) == n
}
