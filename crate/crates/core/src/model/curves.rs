//! Model-agnostic wave-curve routines. The concrete models override them with
//! closed forms where available; these stay public so tests can compare.

use super::{FieldKind, HyperbolicModel};
use crate::error::{Error, Result};
use crate::numerics::{newton_fd, NewtonOptions};
use crate::state::State;

fn direction<M: HyperbolicModel + ?Sized>(model: &M, family: usize, u: &State) -> Result<State> {
    model.check(u)?;
    let r = model.right_eigenvector(family, u);
    match model.field_kind(family) {
        FieldKind::LinearlyDegenerate => Ok(r),
        FieldKind::GenuinelyNonlinear => {
            let d = model.lambda_gradient(family, u).dot(&r);
            if d.abs() < 1e-12 {
                return Err(Error::Degenerate(format!("field {family} not genuinely nonlinear at {u:?}")));
            }
            Ok(r * (1.0 / d))
        }
    }
}

/// Integral curve of the normalized eigenvector field by classical RK4 with at
/// least `min_steps` steps (more for long curves).
pub fn generic_rarefaction<M: HyperbolicModel + ?Sized>(
    model: &M,
    family: usize,
    s: f64,
    u: &State,
    min_steps: usize,
) -> Result<State> {
    if s == 0.0 {
        return Ok(*u);
    }
    let steps = min_steps.max((s.abs() / 5e-3).ceil() as usize);
    let h = s / steps as f64;
    let mut w = *u;
    for _ in 0..steps {
        let k1 = direction(model, family, &w)?;
        let k2 = direction(model, family, &(w + k1 * (0.5 * h)))?;
        let k3 = direction(model, family, &(w + k2 * (0.5 * h)))?;
        let k4 = direction(model, family, &(w + k3 * h))?;
        w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    model.check(&w).map_err(|e| Error::Range(e.to_string()))?;
    Ok(w)
}

/// Hugoniot point with `λ_i(w) = λ_i(u) + σ` and its Rankine-Hugoniot speed,
/// by Newton on `(w, s)` started from the rarefaction point.
pub fn generic_hugoniot<M: HyperbolicModel + ?Sized>(
    model: &M,
    family: usize,
    sigma: f64,
    u: &State,
) -> Result<(State, f64)> {
    model.check(u)?;
    let lam0 = model.lambda(family, u);
    if model.field_kind(family) == FieldKind::LinearlyDegenerate {
        let w = generic_rarefaction(model, family, sigma, u, 32)?;
        return Ok((w, lam0));
    }
    if sigma.abs() < 1e-6 {
        let w = generic_rarefaction(model, family, sigma, u, 8)?;
        return Ok((w, lam0 + 0.5 * sigma));
    }
    let n = model.dim();
    let fu = model.flux(u)?;
    let guess = generic_rarefaction(model, family, sigma, u, 32)
        .unwrap_or_else(|_| *u + model.right_eigenvector(family, u) * sigma);
    let mut x0: Vec<f64> = guess.as_slice().to_vec();
    x0.push(lam0 + 0.5 * sigma);
    let scale = u.norm().max(1.0);
    let residual = |x: &[f64]| -> Option<Vec<f64>> {
        let w = State::new(&x[..n]);
        model.check(&w).ok()?;
        let s = x[n];
        let rh = model.flux_unchecked(&w) - fu - (w - *u) * s;
        let mut out: Vec<f64> = rh.as_slice().iter().map(|v| v / scale).collect();
        out.push(model.lambda(family, &w) - lam0 - sigma);
        Some(out)
    };
    let opts = NewtonOptions { tolerance: 1e-13, max_iterations: 60, ..NewtonOptions::default() };
    let out = newton_fd(residual, &x0, opts).map_err(|e| Error::Range(format!("Hugoniot solve: {e}")))?;
    let w = State::new(&out.x[..n]);
    if w.dist(u) < 1e-3 * sigma.abs() {
        return Err(Error::Range("Hugoniot solve collapsed onto the base state".into()));
    }
    Ok((w, out.x[n]))
}
