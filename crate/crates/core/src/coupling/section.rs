use serde::{Deserialize, Serialize};

use super::profile::{profile_with_integral, SectionGas, PROFILE_BASE_STEPS, PROFILE_TOLERANCE};
use super::{CouplingCondition, Param, Smoothness};
use crate::error::{Error, Result};
use crate::model::Euler;
use crate::state::State;

/// Momentum rule across a change of section. Mass (and energy, for Euler)
/// always follows `a⁺ f(u⁺) = a⁻ f(u⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectionVariant {
    /// `a·P` conserved: linear momentum.
    L,
    /// `a²·q²/ρ`-type rule: `Ξ₂ = ((a⁻/a⁺)² − 1) q²/ρ`.
    #[serde(rename = "p")]
    Dynamic,
    /// Momentum flux continuous: `Ξ₂ = 0`.
    P,
    /// Smooth-limit rule: the states are joined by the stationary profile.
    S,
}

impl SectionVariant {
    pub const ALL: [SectionVariant; 4] = [SectionVariant::L, SectionVariant::Dynamic, SectionVariant::P, SectionVariant::S];

    pub fn label(&self) -> &'static str {
        match self {
            SectionVariant::L => "L",
            SectionVariant::Dynamic => "p",
            SectionVariant::P => "P",
            SectionVariant::S => "S",
        }
    }

    /// `∂₁Ξ₂(a, a, (ρ, q))` in closed form for the isentropic model.
    pub fn momentum_derivative(&self, a: f64, rho: f64, q: f64, pressure: f64) -> f64 {
        match self {
            SectionVariant::L => -(q * q / rho + pressure) / a,
            SectionVariant::Dynamic => -2.0 * q * q / (a * rho),
            SectionVariant::P => 0.0,
            SectionVariant::S => -q * q / (a * rho),
        }
    }
}

/// Junction between pipe segments of cross-sections `a⁻` and `a⁺`, `z = (a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionCondition {
    pub variant: SectionVariant,
    pub gas: SectionGas,
    /// Smallest admissible section.
    pub section_floor: f64,
    /// Step-doubling tolerance for the stationary profile used by `S`.
    pub profile_tolerance: f64,
}

impl SectionCondition {
    pub fn new(variant: SectionVariant, gas: SectionGas) -> Self {
        Self { variant, gas, section_floor: 1e-6, profile_tolerance: PROFILE_TOLERANCE }
    }

    fn sections(&self, z_plus: &Param, z_minus: &Param) -> Result<(f64, f64)> {
        self.validate_parameter(z_plus)?;
        self.validate_parameter(z_minus)?;
        Ok((z_plus[0], z_minus[0]))
    }

    fn smooth_limit_momentum(&self, a_plus: f64, a_minus: f64, u: &State) -> Result<f64> {
        // refine until ∫p stabilizes; the defect is P(a⁺) − P(a⁻) on the profile
        let mut steps = PROFILE_BASE_STEPS;
        let mut prev = profile_with_integral(&self.gas, a_minus, a_plus, u, steps)?;
        loop {
            steps *= 2;
            let next = profile_with_integral(&self.gas, a_minus, a_plus, u, steps)?;
            if (next.1 - prev.1).abs() < self.profile_tolerance || steps >= 1 << 14 {
                let p_minus = self.gas.momentum_flux(u);
                return Ok((a_minus / a_plus - 1.0) * p_minus + next.1 / a_plus);
            }
            prev = next;
        }
    }
}

impl CouplingCondition for SectionCondition {
    fn name(&self) -> String {
        format!("section[{}]", self.variant.label())
    }

    fn parameter_dim(&self) -> usize {
        1
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::Differentiable
    }

    fn validate_parameter(&self, z: &Param) -> Result<()> {
        if z.dim() != 1 || !z.is_finite() || z[0] < self.section_floor {
            return Err(Error::Geometry(format!("section {z:?} below floor {}", self.section_floor)));
        }
        Ok(())
    }

    fn evaluate(&self, z_plus: &Param, z_minus: &Param, u: &State) -> Result<State> {
        let (a_plus, a_minus) = self.sections(z_plus, z_minus)?;
        if u.dim() != self.gas.dim() {
            return Err(Error::Domain(format!("state {u:?} does not match the section gas")));
        }
        let mut xi = State::zeros(u.dim());
        if a_plus == a_minus {
            return Ok(xi);
        }
        let r = a_minus / a_plus;
        let (rho, q) = (u[0], u[1]);
        xi[0] = (r - 1.0) * q;
        xi[1] = match self.variant {
            SectionVariant::L => (r - 1.0) * self.gas.momentum_flux(u),
            SectionVariant::Dynamic => (r * r - 1.0) * q * q / rho,
            SectionVariant::P => 0.0,
            SectionVariant::S => self.smooth_limit_momentum(a_plus, a_minus, u)?,
        };
        if let SectionGas::Ideal(gas) = self.gas {
            let e = Euler { gas, vacuum_floor: 0.0 };
            xi[2] = (r - 1.0) * Euler::velocity(u) * (u[2] + e.pressure(u));
        }
        Ok(xi)
    }

    fn dini(&self, z: &Param, v: &Param, u: &State) -> Result<State> {
        self.validate_parameter(z)?;
        let a = z[0];
        let dv = v[0];
        let (rho, q) = (u[0], u[1]);
        let mut d = State::zeros(u.dim());
        d[0] = -q / a * dv;
        d[1] = self.variant.momentum_derivative(a, rho, q, self.gas.pressure(u)) * dv;
        if let SectionGas::Ideal(gas) = self.gas {
            let e = Euler { gas, vacuum_floor: 0.0 };
            d[2] = -Euler::velocity(u) * (u[2] + e.pressure(u)) / a * dv;
        }
        Ok(d)
    }
}
