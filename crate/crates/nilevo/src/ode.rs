//! The linear system `ẋ = Dx` for a derivation `D`, solved in closed form as
//! `x(t) = e^{tD} x(0)` and, independently, by classical RK4.

use std::fmt::Write as _;

use crate::algebra::EvolutionAlgebra;
use crate::derivations::DerivationParams;
use crate::error::{Error, Result};
use crate::exp_group::exp_derivation_closed;
use crate::linalg::{Element, LinearMap};

/// Sampled solution; `times` is strictly increasing and aligned with `states`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Element<f64>>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Element<f64>>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: states.len(),
            });
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Element<f64>] {
        &self.states
    }

    pub fn last(&self) -> Option<&Element<f64>> {
        self.states.last()
    }

    /// Header `t,x1,...,xn` followed by one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Element::dim);
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for c in x.coords() {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

/// `e^{tD} x0`, through the closed exponential of `d(tα, tβ)`.
pub fn solve_closed(
    e: &EvolutionAlgebra<f64>,
    params: &DerivationParams<f64>,
    x0: &Element<f64>,
    t: f64,
) -> Result<Element<f64>> {
    if x0.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: x0.dim(),
        });
    }
    let flow = exp_derivation_closed(e, &params.scaled(&t))?.matrix;
    Ok(Element::new(flow.mul_vec(x0.coords())?))
}

/// Fixed-step RK4 for `ẋ = Dx` on `[0, t_end]`, recording every step.
pub fn solve_numeric(
    e: &EvolutionAlgebra<f64>,
    d: &LinearMap<f64>,
    x0: &Element<f64>,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps < 1 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain("t_end must be positive and finite".into()));
    }
    let n = e.dim();
    if d.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.dim(),
        });
    }
    if x0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.dim(),
        });
    }
    let h = t_end / steps as f64;
    let field = |x: &[f64]| d.mul_vec(x);
    let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.coords().to_vec();
    times.push(0.0);
    states.push(x0.clone());
    for step in 1..=steps {
        let k1 = field(&x)?;
        let k2 = field(&axpy(&x, &k1, h / 2.0))?;
        let k3 = field(&axpy(&x, &k2, h / 2.0))?;
        let k4 = field(&axpy(&x, &k3, h))?;
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push(if step == steps {
            t_end
        } else {
            step as f64 * h
        });
        states.push(Element::new(x.clone()));
    }
    Trajectory::new(times, states)
}

/// `max_i |a_i - b_i| / max(1, |b_i|)`.
pub fn relative_error(a: &Element<f64>, b: &Element<f64>) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs() / 1f64.max(y.abs()))
        .fold(0.0, f64::max)
}

/// `log2(err(h) / err(h/2))` against the closed form at `t_end`.
pub fn observed_order(
    e: &EvolutionAlgebra<f64>,
    params: &DerivationParams<f64>,
    x0: &Element<f64>,
    t_end: f64,
    steps: usize,
) -> Result<f64> {
    let d = crate::derivations::build_derivation(e, params)?;
    let exact = solve_closed(e, params, x0, t_end)?;
    let err = |s: usize| -> Result<f64> {
        let traj = solve_numeric(e, &d, x0, t_end, s)?;
        Ok(relative_error(
            traj.last().expect("nonempty trajectory"),
            &exact,
        ))
    };
    Ok((err(steps)? / err(2 * steps)?).log2())
}
