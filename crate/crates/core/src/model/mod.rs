//! Strictly hyperbolic systems and their wave curves.
//!
//! Lax curves `H_i(σ)(u)` are parametrized so that on genuinely nonlinear
//! fields `σ` is the change of `λ_i`: along the integral curve of `r_i` for
//! `σ > 0`, along the Hugoniot locus for `σ < 0`. Both branches agree to
//! second order at `σ = 0`. Linearly degenerate fields are parametrized by
//! arclength along the (straight or curved) contact locus.

mod curves;
mod euler;
mod neighborhood;
mod pressure;
mod psystem;

pub use curves::{generic_hugoniot, generic_rarefaction};
pub use euler::{Euler, IdealGas};
pub use neighborhood::Neighborhood;
pub use pressure::GammaLaw;
pub use psystem::PSystem;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::State;

/// Default vacuum guard on the density.
pub const DEFAULT_VACUUM_FLOOR: f64 = 1e-6;

/// Minimal eigenvalue gap accepted as strictly hyperbolic.
pub const HYPERBOLICITY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    GenuinelyNonlinear,
    LinearlyDegenerate,
}

/// A strictly hyperbolic system `u_t + f(u)_x = 0` with fields that are either
/// genuinely nonlinear or linearly degenerate. Families are 0-based.
pub trait HyperbolicModel: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Number of families with negative speed in the non-characteristic set.
    fn split_index(&self) -> usize;

    fn field_kind(&self, family: usize) -> FieldKind;

    fn component_names(&self) -> &'static [&'static str];

    /// Rejects non-finite states, vacuum and other points outside `Ω`.
    fn check(&self, u: &State) -> Result<()>;

    /// Flux without the domain check; callers must have validated `u`.
    fn flux_unchecked(&self, u: &State) -> State;

    fn flux(&self, u: &State) -> Result<State> {
        self.check(u)?;
        Ok(self.flux_unchecked(u))
    }

    /// Row-major `Df(u)`.
    fn jacobian(&self, u: &State) -> Vec<Vec<f64>>;

    /// Characteristic speeds in increasing order.
    fn eigenvalues(&self, u: &State) -> State;

    /// Unit right eigenvector, oriented so that `∇λ_i · r_i > 0` on genuinely
    /// nonlinear fields.
    fn right_eigenvector(&self, family: usize, u: &State) -> State;

    /// Scaled coordinates around a reference state; the validated neighborhood
    /// is a max-norm ball in these coordinates.
    fn scaled_coordinates(&self, u: &State, reference: &State) -> State;

    fn from_scaled_coordinates(&self, w: &State, reference: &State) -> State;

    fn lambda(&self, family: usize, u: &State) -> f64 {
        self.eigenvalues(u)[family]
    }

    /// `∇λ_i(u)` by central differences.
    fn lambda_gradient(&self, family: usize, u: &State) -> State {
        let n = self.dim();
        let mut g = State::zeros(n);
        for k in 0..n {
            let h = 1e-6 * u[k].abs().max(1e-2);
            let mut up = *u;
            let mut um = *u;
            up[k] += h;
            um[k] -= h;
            g[k] = (self.lambda(family, &up) - self.lambda(family, &um)) / (2.0 * h);
        }
        g
    }

    /// Eigenvalues and unit right eigenvectors with the hyperbolicity check.
    fn eigen(&self, u: &State) -> Result<Vec<(f64, State)>> {
        self.check(u)?;
        let lam = self.eigenvalues(u);
        for k in 1..self.dim() {
            if lam[k] - lam[k - 1] < HYPERBOLICITY_GAP {
                return Err(Error::Degenerate(format!(
                    "eigenvalues {} and {} coincide at {u:?}",
                    lam[k - 1],
                    lam[k]
                )));
            }
        }
        Ok((0..self.dim()).map(|i| (lam[i], self.right_eigenvector(i, u))).collect())
    }

    /// Point at parameter `s` on the integral curve of `r_i` through `u`
    /// (either sign of `s`).
    fn rarefaction_curve(&self, family: usize, s: f64, u: &State) -> Result<State> {
        generic_rarefaction(self, family, s, u, 32)
    }

    /// Point on the `i`-Hugoniot locus with parameter `σ` and its shock speed.
    fn hugoniot_curve(&self, family: usize, sigma: f64, u: &State) -> Result<(State, f64)> {
        generic_hugoniot(self, family, sigma, u)
    }

    /// `H_i(σ)(u)`.
    fn lax_curve(&self, family: usize, sigma: f64, u: &State) -> Result<State> {
        if sigma == 0.0 {
            return Ok(*u);
        }
        match self.field_kind(family) {
            FieldKind::GenuinelyNonlinear if sigma < 0.0 => Ok(self.hugoniot_curve(family, sigma, u)?.0),
            _ => self.rarefaction_curve(family, sigma, u),
        }
    }

    /// Least-squares Rankine-Hugoniot speed between two states.
    fn shock_speed(&self, family: usize, left: &State, right: &State) -> Result<f64> {
        let du = *right - *left;
        let scale = left.norm().max(1.0);
        if du.norm() <= 1e-13 * scale {
            return Ok(self.lambda(family, left));
        }
        let df = self.flux(right)? - self.flux(left)?;
        let s = df.dot(&du) / du.dot(&du);
        let residual = (df - du * s).norm();
        if residual > 1e-9 * du.norm().max(1e-300) && residual > 1e-12 {
            return Err(Error::Inconsistent { residual });
        }
        Ok(s)
    }

    /// True iff `λ_{i0}(u) < 0 < λ_{i0+1}(u)`.
    fn in_noncharacteristic_set(&self, u: &State) -> Result<bool> {
        self.check(u)?;
        let lam = self.eigenvalues(u);
        let i0 = self.split_index();
        Ok(lam[i0 - 1] < 0.0 && 0.0 < lam[i0])
    }
}
