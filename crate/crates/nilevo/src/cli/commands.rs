use serde_json::{json, Value};

use super::{matrix_json, promote, CliError, CliResult, Context, ExpAlgebra};
use crate::algebra::{max_nilpotency_index, EvolutionAlgebra};
use crate::automorphisms::{
    build_automorphism, eta, is_automorphism, roots_of_unity, AutomorphismParams,
};
use crate::derivations::{
    build_derivation, classify_case, derivation_space, index_set, is_derivation, Case,
    DerivationParams,
};
use crate::error::Error;
use crate::exp_group::{
    corner_projection, derivation_power_closed, exp_derivation_closed, exp_series, quotient_report,
    recover_exp_parameters, MEMBERSHIP_TOL,
};
use crate::linalg::Element;
use crate::norm::gamma;
use crate::numeric::{Field, FieldTag, FromScalar, Modulus, Transcendental};
use crate::ode::{relative_error, solve_closed, solve_numeric};

use super::document::AnyAlgebra;

/// Default tolerance for the truncated exponential series.
pub const SERIES_TOL: f64 = 1e-14;

macro_rules! dispatch {
    ($any:expr, $e:ident => $body:expr) => {
        match $any {
            AnyAlgebra::Rational($e) => $body,
            AnyAlgebra::Real($e) => $body,
            AnyAlgebra::Complex($e) => $body,
        }
    };
}

pub(crate) use dispatch;

pub fn classify(any: &AnyAlgebra) -> Value {
    dispatch!(any, e => classify_typed(e))
}

fn classify_typed<F: Field>(e: &EvolutionAlgebra<F>) -> Value {
    let n = e.dim();
    let index = e.nilpotency_index();
    let case = classify_case(e);
    let eta = match case {
        Ok(Case::NonemptyIa) => eta(e).ok().map(|h| h.value()),
        _ => None,
    };
    let pairs: Vec<[usize; 2]> = index_set(e).pairs().iter().map(|&(i, j)| [i, j]).collect();
    json!({
        "canonical": e.is_canonical_maximal(),
        "rank": e.rank_structural(),
        "nilpotency_index": index,
        "max_nilpotency_index": max_nilpotency_index(n),
        "maximal_nilpotency": index == Some(max_nilpotency_index(n)),
        "I_A": pairs,
        "eta": eta,
        "case": case.as_ref().ok().map(|c| c.as_str()),
        "classification_error": case.err().map(|e| e.to_string()),
        "gamma": gamma(e).to_f64(),
    })
}

pub fn derive(ctx: &mut Context<'_>, any: &AnyAlgebra) -> CliResult<Value> {
    dispatch!(any, e => derive_typed(ctx, e))
}

fn derive_typed<F: FromScalar>(ctx: &Context<'_>, e: &EvolutionAlgebra<F>) -> CliResult<Value> {
    let space = derivation_space(e)?;
    let mut out = json!({
        "case": space.case.as_str(),
        "der_dimension": space.dimension,
        "basis": space.basis.iter().map(matrix_json).collect::<Vec<_>>(),
        "basis_leibniz": space.basis.iter().map(|d| is_derivation(e, d)).collect::<Vec<_>>(),
    });
    let opts = ctx.options;
    if opts.alpha.is_none() && opts.beta.is_none() && opts.m.is_none() {
        return Ok(out);
    }
    let alpha: F = ctx.param(opts.alpha.as_deref(), 0)?;
    let beta: F = ctx.param(opts.beta.as_deref(), 1)?;
    let params = DerivationParams::new(alpha, beta, space.case)?;
    let d = build_derivation(e, &params)?;
    out["derivation"] = json!({
        "alpha": params.alpha().encode(),
        "beta": params.beta().encode(),
        "matrix": matrix_json(&d),
        "leibniz": is_derivation(e, &d),
    });
    if let Some(m) = opts.m {
        let closed = derivation_power_closed(e, &params, m)?;
        let residual = closed.mixed_residual(&d.pow(m));
        out["power"] = json!({
            "m": m,
            "matrix": matrix_json(&closed),
            "residual_vs_repeated_product": residual,
        });
    }
    Ok(out)
}

pub fn aut(ctx: &mut Context<'_>, any: &AnyAlgebra) -> CliResult<Value> {
    dispatch!(any, e => aut_typed(ctx, e))
}

fn aut_typed<F: FromScalar>(ctx: &Context<'_>, e: &EvolutionAlgebra<F>) -> CliResult<Value> {
    let case = classify_case(e)?;
    let quotient = quotient_report(e, F::TAG)?;
    let (eta_value, constraint, roots) = match case {
        Case::NonemptyIa => {
            let h = eta(e)?;
            let roots: Vec<String> = roots_of_unity(h, F::TAG)
                .iter()
                .map(|r| r.encode())
                .collect();
            (
                Some(h.value()),
                format!("alpha^{} = 1", h.value()),
                Some(roots),
            )
        }
        Case::EmptyIa => (None, "alpha != 0".to_string(), None),
    };
    let alpha: F = ctx.param(ctx.options.alpha.as_deref(), 1)?;
    let beta: F = ctx.param(ctx.options.beta.as_deref(), 0)?;
    let params = AutomorphismParams::for_algebra(e, alpha, beta)?;
    let phi = build_automorphism(e, &params)?;
    let corner = corner_projection(&phi)?;
    Ok(json!({
        "case": case.as_str(),
        "eta": eta_value,
        "alpha_constraint": constraint,
        "admissible_alpha": roots,
        "quotient": quotient,
        "automorphism": {
            "alpha": params.alpha().encode(),
            "beta": params.beta().encode(),
            "matrix": matrix_json(&phi),
            "multiplicative": is_automorphism(e, &phi),
            "corner": [corner.a.encode(), corner.b.encode()],
        },
    }))
}

pub fn exp(ctx: &mut Context<'_>, any: &AnyAlgebra) -> CliResult<Value> {
    match promote(ctx, any, "exponentials") {
        ExpAlgebra::Real(e) => exp_typed(ctx, &e),
        ExpAlgebra::Complex(e) => exp_typed(ctx, &e),
    }
}

fn exp_typed<T: Transcendental + FromScalar>(
    ctx: &Context<'_>,
    e: &EvolutionAlgebra<T>,
) -> CliResult<Value> {
    let tol = ctx.options.tol.unwrap_or(SERIES_TOL);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be a nonnegative finite number, got {tol}"
        )));
    }
    let alpha: T = ctx.param(ctx.options.alpha.as_deref(), 0)?;
    let beta: T = ctx.param(ctx.options.beta.as_deref(), 1)?;
    let params = DerivationParams::for_algebra(e, alpha, beta)?;
    let d = build_derivation(e, &params)?;
    let closed = exp_derivation_closed(e, &params)?;
    let series = exp_series(e, &d, tol)?;
    let diff = closed.matrix.mixed_residual(&series.matrix);
    let recovered = recover_exp_parameters(e, &closed.matrix)?.map(|r| {
        json!({
            "alpha": r.params.alpha().encode(),
            "beta": r.params.beta().encode(),
            "residual": r.residual,
        })
    });
    Ok(json!({
        "case": params.case().as_str(),
        "alpha": params.alpha().encode(),
        "beta": params.beta().encode(),
        "derivation": matrix_json(&d),
        "matrix": matrix_json(&closed.matrix),
        "series": {
            "matrix": matrix_json(&series.matrix),
            "tol": tol,
            "terms_used": series.terms_used,
            "squarings": series.squarings,
        },
        "series_closed_diff": diff,
        "agreement_tol": MEMBERSHIP_TOL,
        "agree": diff <= MEMBERSHIP_TOL,
        "recovered_parameters": recovered,
    }))
}

pub const DEFAULT_ODE_STEPS: usize = 100;

pub fn ode(ctx: &mut Context<'_>, any: &AnyAlgebra) -> CliResult<(String, Value)> {
    let e = match promote(ctx, any, "the ODE") {
        ExpAlgebra::Real(e) => e,
        ExpAlgebra::Complex(_) => {
            return Err(CliError::Domain(Error::UnsupportedBackend(
                FieldTag::Complex,
            )))
        }
    };
    let n = e.dim();
    let opts = ctx.options;
    let alpha: f64 = ctx.param(opts.alpha.as_deref(), 0)?;
    let beta: f64 = ctx.param(opts.beta.as_deref(), 1)?;
    let t = opts.t.unwrap_or(1.0);
    let steps = opts.steps.unwrap_or(DEFAULT_ODE_STEPS);
    let x0 = match &opts.x0 {
        None => Element::new(vec![1.0; n]),
        Some(text) => {
            let coords = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("--x0: invalid real {s:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if coords.len() != n {
                return Err(CliError::Usage(format!(
                    "--x0 has {} coordinates, algebra has dimension {n}",
                    coords.len()
                )));
            }
            Element::new(coords)
        }
    };
    let params = DerivationParams::for_algebra(&e, alpha, beta)?;
    let d = build_derivation(&e, &params)?;
    let trajectory = solve_numeric(&e, &d, &x0, t, steps)?;
    let closed = solve_closed(&e, &params, &x0, t)?;
    let numeric = trajectory.last().expect("trajectory has the initial state");
    let summary = json!({
        "case": params.case().as_str(),
        "alpha": alpha,
        "beta": beta,
        "t": t,
        "steps": steps,
        "x0": x0.coords(),
        "numeric_final": numeric.coords(),
        "closed_final": closed.coords(),
        "relative_error": relative_error(numeric, &closed),
    });
    Ok((trajectory.to_csv(), summary))
}
