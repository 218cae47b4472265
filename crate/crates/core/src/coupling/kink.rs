use std::fmt;
use std::sync::Arc;

use super::{CouplingCondition, Param, Smoothness};
use crate::error::{Error, Result};
use crate::state::State;

/// Scalar momentum defect `K(θ, u)` where `θ = ‖z⁺ − z⁻‖`.
#[derive(Clone)]
pub enum KinkLaw {
    /// `K = −α θ q`: momentum loss proportional to the angle gap.
    Drag { alpha: f64 },
    /// User-supplied `K`; its `θ`-derivative at 0 is taken numerically.
    Custom(Arc<dyn Fn(f64, &State) -> f64 + Send + Sync>),
}

impl fmt::Debug for KinkLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinkLaw::Drag { alpha } => f.debug_struct("Drag").field("alpha", alpha).finish(),
            KinkLaw::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl KinkLaw {
    fn eval(&self, theta: f64, u: &State) -> f64 {
        match self {
            KinkLaw::Drag { alpha } => -alpha * theta * u[1],
            KinkLaw::Custom(k) => k(theta, u),
        }
    }

    /// `∂_θ K(0, u)`.
    fn slope_at_zero(&self, u: &State) -> f64 {
        match self {
            KinkLaw::Drag { alpha } => -alpha * u[1],
            KinkLaw::Custom(k) => {
                // second-order one-sided difference
                let t = 1e-5;
                (4.0 * k(0.5 * t, u) - k(t, u) - 3.0 * k(0.0, u)) / t
            }
        }
    }
}

/// Pipe kink: the flux defect only touches the momentum component,
/// `Ξ = (0, K(‖z⁺ − z⁻‖, u), 0…)`, with `z` the unit tangent of the pipe.
#[derive(Debug, Clone)]
pub struct KinkCondition {
    law: KinkLaw,
}

impl KinkCondition {
    pub fn drag(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidCondition(format!("drag coefficient {alpha}")));
        }
        Ok(Self { law: KinkLaw::Drag { alpha } })
    }

    /// Wraps a custom `K`; rejects it when `K(0, u) ≠ 0` on any probe state.
    pub fn custom(k: Arc<dyn Fn(f64, &State) -> f64 + Send + Sync>, probes: &[State]) -> Result<Self> {
        for u in probes {
            let k0 = k(0.0, u);
            if k0.abs() > 1e-14 {
                return Err(Error::InvalidCondition(format!("K(0, {u:?}) = {k0:e} is not zero")));
            }
        }
        Ok(Self { law: KinkLaw::Custom(k) })
    }

    pub fn law(&self) -> &KinkLaw {
        &self.law
    }
}

impl CouplingCondition for KinkCondition {
    fn name(&self) -> String {
        match &self.law {
            KinkLaw::Drag { alpha } => format!("kink(alpha={alpha})"),
            KinkLaw::Custom(_) => "kink(custom)".into(),
        }
    }

    fn parameter_dim(&self) -> usize {
        2
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::DiniOnly
    }

    fn validate_parameter(&self, z: &Param) -> Result<()> {
        if z.dim() != 2 || !z.is_finite() || (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Geometry(format!("pipe tangent {z:?} is not a unit vector")));
        }
        Ok(())
    }

    fn evaluate(&self, z_plus: &Param, z_minus: &Param, u: &State) -> Result<State> {
        let mut xi = State::zeros(u.dim());
        let theta = z_plus.dist(z_minus);
        if theta > 0.0 {
            xi[1] = self.law.eval(theta, u);
        }
        Ok(xi)
    }

    fn dini(&self, _z: &Param, v: &Param, u: &State) -> Result<State> {
        let mut d = State::zeros(u.dim());
        d[1] = self.law.slope_at_zero(u) * v.norm();
        Ok(d)
    }
}
