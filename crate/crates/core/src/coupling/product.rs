use std::fmt;
use std::sync::Arc;

use super::{CouplingCondition, Param, Smoothness};
use crate::error::{Error, Result};
use crate::state::State;

type GFn = dyn Fn(&Param, &State) -> State + Send + Sync;

/// The function `G(z, u)` of a non-conservative product `D_z G(ζ, u) · Dζ`.
#[derive(Clone)]
pub enum ProductLaw {
    /// `G(z, u) = z₀ (b + M u)` with a scalar parameter.
    Linear { b: State, m: Vec<Vec<f64>> },
    Custom { g: Arc<GFn>, parameter_dim: usize },
}

impl fmt::Debug for ProductLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductLaw::Linear { b, m } => f.debug_struct("Linear").field("b", b).field("m", m).finish(),
            ProductLaw::Custom { parameter_dim, .. } => {
                f.debug_struct("Custom").field("parameter_dim", parameter_dim).finish_non_exhaustive()
            }
        }
    }
}

/// `Ξ(z⁺, z⁻, u) = G(z⁺, u) − G(z⁻, u)`.
#[derive(Debug, Clone)]
pub struct ProductCondition {
    law: ProductLaw,
}

impl ProductCondition {
    pub fn new(law: ProductLaw) -> Result<Self> {
        if let ProductLaw::Linear { b, m } = &law {
            if m.len() != b.dim() || m.iter().any(|row| row.len() != b.dim() || row.iter().any(|x| !x.is_finite())) {
                return Err(Error::InvalidCondition("product matrix must be square and match b".into()));
            }
        }
        Ok(Self { law })
    }

    /// `G(z, u) = z b`: the source is the derivative of a fixed flux, so the
    /// problem is conservative in `f(u) − G(ζ)`.
    pub fn conservative(b: State) -> Self {
        let n = b.dim();
        Self { law: ProductLaw::Linear { b, m: vec![vec![0.0; n]; n] } }
    }

    pub fn g(&self, z: &Param, u: &State) -> State {
        match &self.law {
            ProductLaw::Linear { b, m } => {
                let mut out = *b;
                for i in 0..b.dim() {
                    out[i] += (0..b.dim()).map(|j| m[i][j] * u[j]).sum::<f64>();
                }
                out * z[0]
            }
            ProductLaw::Custom { g, .. } => g(z, u),
        }
    }

    /// True when `G` does not depend on `u`.
    pub fn is_state_independent(&self) -> bool {
        match &self.law {
            ProductLaw::Linear { m, .. } => m.iter().flatten().all(|x| *x == 0.0),
            ProductLaw::Custom { .. } => false,
        }
    }
}

impl CouplingCondition for ProductCondition {
    fn name(&self) -> String {
        "product".into()
    }

    fn parameter_dim(&self) -> usize {
        match &self.law {
            ProductLaw::Linear { .. } => 1,
            ProductLaw::Custom { parameter_dim, .. } => *parameter_dim,
        }
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Differentiable
    }

    fn validate_parameter(&self, z: &Param) -> Result<()> {
        if z.dim() != self.parameter_dim() || !z.is_finite() {
            return Err(Error::Geometry(format!("parameter {z:?} has the wrong dimension")));
        }
        Ok(())
    }

    fn evaluate(&self, z_plus: &Param, z_minus: &Param, u: &State) -> Result<State> {
        self.validate_parameter(z_plus)?;
        self.validate_parameter(z_minus)?;
        if z_plus == z_minus {
            return Ok(State::zeros(u.dim()));
        }
        Ok(self.g(z_plus, u) - self.g(z_minus, u))
    }

    fn dini(&self, z: &Param, v: &Param, u: &State) -> Result<State> {
        self.validate_parameter(z)?;
        match &self.law {
            ProductLaw::Linear { .. } => Ok(self.g(&State::new(&[v[0]]), u)),
            ProductLaw::Custom { g, .. } => {
                let h = 1e-6;
                Ok((g(&(*z + *v * h), u) - g(&(*z - *v * h), u)) * (0.5 / h))
            }
        }
    }
}
