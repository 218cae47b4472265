use super::{CouplingCondition, Param};
use crate::error::{Error, Result};
use crate::model::HyperbolicModel;
use crate::numerics::solve_dense;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionOptions {
    /// Largest accepted `‖z⁺ − z⁻‖`.
    pub z_radius: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for JunctionOptions {
    fn default() -> Self {
        Self { z_radius: 0.5, tolerance: 1e-12, max_iterations: 50 }
    }
}

/// `T(z⁺, z⁻, u⁻)`: the state `u⁺` with `f(u⁺) = f(u⁻) + Ξ(z⁺, z⁻, u⁻)`,
/// found by damped Newton from `u⁻` so that the local (subsonic) inverse of
/// `f` is selected.
pub fn junction_map(
    model: &dyn HyperbolicModel,
    cond: &dyn CouplingCondition,
    z_plus: &Param,
    z_minus: &Param,
    u_minus: &State,
    opts: &JunctionOptions,
) -> Result<State> {
    cond.validate_parameter(z_plus)?;
    cond.validate_parameter(z_minus)?;
    let gap = z_plus.dist(z_minus);
    if gap > opts.z_radius {
        return Err(Error::JunctionSolvability(format!(
            "parameter jump {gap} exceeds radius {}",
            opts.z_radius
        )));
    }
    if !model.in_noncharacteristic_set(u_minus)? {
        return Err(Error::JunctionSolvability(format!("{u_minus:?} is not in the non-characteristic set")));
    }
    if z_plus == z_minus {
        return Ok(*u_minus);
    }
    let xi = cond.evaluate(z_plus, z_minus, u_minus)?;
    let target = model.flux_unchecked(u_minus) + xi;
    let mut u = *u_minus;
    let mut res = (model.flux_unchecked(&u) - target).norm();
    let n = model.dim();
    for _ in 0..opts.max_iterations {
        if res <= opts.tolerance {
            break;
        }
        let rhs: Vec<f64> = (target - model.flux_unchecked(&u)).as_slice().to_vec();
        let du = solve_dense(&model.jacobian(&u), &rhs)
            .ok_or_else(|| Error::JunctionSolvability(format!("singular flux Jacobian at {u:?}")))?;
        let du = State::new(&du[..n]);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = u + du * step;
            if model.check(&trial).is_ok() {
                let r = (model.flux_unchecked(&trial) - target).norm();
                if r < res {
                    u = trial;
                    res = r;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res > opts.tolerance {
        return Err(Error::JunctionSolvability(format!("Newton stalled at residual {res:e}")));
    }
    if !model.in_noncharacteristic_set(&u)? {
        return Err(Error::JunctionSolvability(format!("root {u:?} left the non-characteristic set")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{KinkCondition, SectionCondition, SectionGas, SectionVariant};
    use crate::model::{GammaLaw, PSystem};
    use approx::assert_relative_eq;

    #[test]
    fn hand_solution_for_flux_continuous_section() {
        let model = PSystem::new(GammaLaw::default());
        let cond = SectionCondition::new(SectionVariant::P, SectionGas::Isentropic(GammaLaw::default()));
        let u = PSystem::state(1.0, 0.2);
        // the doubling of the section is beyond the default radius
        let opts = JunctionOptions { z_radius: 1.0, ..JunctionOptions::default() };
        let w = junction_map(&model, &cond, &State::new(&[2.0]), &State::new(&[1.0]), &u, &opts).unwrap();
        assert_relative_eq!(w[1], 0.1, epsilon = 1e-14);
        // ρ² + 0.01/ρ = 1.04, subsonic root
        assert_relative_eq!(w[0] * w[0] + 0.01 / w[0], 1.04, epsilon = 1e-12);
        assert!((w[0] - 1.0150).abs() < 1e-4);
    }

    #[test]
    fn identity_for_equal_parameters() {
        let model = PSystem::new(GammaLaw::default());
        let cond = KinkCondition::drag(0.3).unwrap();
        let u = PSystem::state(0.9, -0.1);
        let z = State::new(&[0.6, 0.8]);
        assert_eq!(junction_map(&model, &cond, &z, &z, &u, &JunctionOptions::default()).unwrap(), u);
    }

    #[test]
    fn large_jumps_and_supersonic_states_rejected() {
        let model = PSystem::new(GammaLaw::default());
        let cond = KinkCondition::drag(0.3).unwrap();
        let opts = JunctionOptions::default();
        let e1 = State::new(&[1.0, 0.0]);
        let e2 = State::new(&[0.0, 1.0]);
        let err = junction_map(&model, &cond, &e2, &e1, &PSystem::state(1.0, 0.1), &opts).unwrap_err();
        assert!(matches!(err, Error::JunctionSolvability(_)));
        let z = State::new(&[0.8, 0.6]);
        let err = junction_map(&model, &cond, &z, &e1, &PSystem::state(1.0, 2.0), &opts).unwrap_err();
        assert!(matches!(err, Error::JunctionSolvability(_)));
    }
}
