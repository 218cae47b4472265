//! Stationary flow through a smoothly varying section `a`.
//!
//! The production integrator works in flux variables: `a·q` (mass) and, for
//! Euler, the total enthalpy are constant, while `M = a·P` obeys
//! `dM/da = p`. The state is recovered from `(a, M)` on the subsonic branch.
//! Because `∫ p da = M(a⁺) − M(a⁻)` holds by construction, junction states
//! produced this way satisfy the smooth-limit condition exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Euler, GammaLaw, HyperbolicModel, IdealGas, PSystem};
use crate::numerics::{bracketed_root, solve_dense};
use crate::state::State;

pub const PROFILE_BASE_STEPS: usize = 64;
pub const PROFILE_TOLERANCE: f64 = 1e-10;

/// Thermodynamics of the gas flowing through the section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SectionGas {
    Isentropic(GammaLaw),
    Ideal(IdealGas),
}

impl SectionGas {
    pub fn dim(&self) -> usize {
        match self {
            SectionGas::Isentropic(_) => 2,
            SectionGas::Ideal(_) => 3,
        }
    }

    /// Momentum flux `q²/ρ + p`.
    pub(crate) fn momentum_flux(&self, u: &State) -> f64 {
        match self {
            SectionGas::Isentropic(law) => u[1] * u[1] / u[0] + law.pressure(u[0]),
            SectionGas::Ideal(gas) => {
                let e = Euler { gas: *gas, vacuum_floor: 0.0 };
                u[1] * u[1] / u[0] + e.pressure(u)
            }
        }
    }

    pub(crate) fn pressure(&self, u: &State) -> f64 {
        match self {
            SectionGas::Isentropic(law) => law.pressure(u[0]),
            SectionGas::Ideal(gas) => Euler { gas: *gas, vacuum_floor: 0.0 }.pressure(u),
        }
    }

    fn check_subsonic(&self, u: &State) -> Result<()> {
        let ok = match self {
            SectionGas::Isentropic(law) => {
                let m = PSystem::new(*law);
                m.in_noncharacteristic_set(u)?
            }
            SectionGas::Ideal(gas) => {
                let m = Euler::new(*gas)?;
                m.in_noncharacteristic_set(u)?
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SonicTransition(format!("state {u:?} is not subsonic")))
        }
    }
}

/// Invariants of one profile: what stays fixed while `M` evolves.
struct Recovery {
    gas: SectionGas,
    /// `a·q`
    mass: f64,
    /// total enthalpy (Euler only)
    enthalpy: f64,
}

impl Recovery {
    fn new(gas: SectionGas, a: f64, u: &State) -> Self {
        let enthalpy = match gas {
            SectionGas::Ideal(g) => Euler { gas: g, vacuum_floor: 0.0 }.enthalpy(u),
            SectionGas::Isentropic(_) => 0.0,
        };
        Self { gas, mass: a * u[1], enthalpy }
    }

    /// Subsonic state at section `a` with `a·P = big_m`.
    fn state(&self, a: f64, big_m: f64, hint: f64) -> Result<State> {
        let q = self.mass / a;
        let p_total = big_m / a;
        match self.gas {
            SectionGas::Isentropic(law) => {
                let g = |rho: f64| q * q / rho + law.pressure(rho) - p_total;
                let sonic = (q * q / (law.kappa * law.gamma)).powf(1.0 / (law.gamma + 1.0));
                // Newton from the previous density, safeguarded below
                let mut rho = hint;
                for _ in 0..30 {
                    let d = -q * q / (rho * rho) + law.derivative(rho);
                    let step = g(rho) / d;
                    let next = rho - step;
                    if !(next > sonic) || !next.is_finite() {
                        break;
                    }
                    rho = next;
                    if step.abs() <= 1e-15 * rho {
                        if g(rho).abs() <= 1e-13 * p_total.abs().max(1.0) {
                            return Ok(PSystem::state(rho, q / rho));
                        }
                        break;
                    }
                }
                let lo = sonic * (1.0 + 1e-12);
                if g(lo) > 0.0 {
                    return Err(Error::SonicTransition(format!("no subsonic state at section {a}")));
                }
                let mut hi = lo.max(hint).max(1e-3) * 2.0;
                while g(hi) < 0.0 {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::SonicTransition(format!("profile density diverged at section {a}")));
                    }
                }
                let rho = bracketed_root(g, lo, hi, 1e-16)
                    .ok_or_else(|| Error::SonicTransition(format!("density recovery failed at section {a}")))?;
                Ok(PSystem::state(rho, q / rho))
            }
            SectionGas::Ideal(gas) => {
                let k = gas.gamma / (gas.gamma - 1.0);
                let h = self.enthalpy;
                let disc = k * k * p_total * p_total - 4.0 * (k - 0.5) * h * q * q;
                if disc < 0.0 {
                    return Err(Error::SonicTransition(format!("no subsonic state at section {a}")));
                }
                // smaller-magnitude root of (k − ½)v² − k(P/m)v + H = 0, written stably
                let v = 2.0 * h * q / (k * p_total + disc.sqrt());
                let p = p_total - q * v;
                let rho = k * p / (h - 0.5 * v * v);
                if !(rho > 0.0 && p > 0.0) {
                    return Err(Error::SonicTransition(format!("non-physical recovery at section {a}")));
                }
                let e = Euler { gas, vacuum_floor: 0.0 };
                Ok(e.state(rho, v, p))
            }
        }
    }
}

/// State at section `a_end` on the stationary profile through `(a_start,
/// start)`, with `steps` RK4 steps on `M = a·P`.
pub fn stationary_profile(
    gas: &SectionGas,
    a_start: f64,
    a_end: f64,
    start: &State,
    steps: usize,
) -> Result<State> {
    Ok(profile_with_integral(gas, a_start, a_end, start, steps)?.0)
}

/// Returns the end state and `∫ p da` along the profile.
pub(crate) fn profile_with_integral(
    gas: &SectionGas,
    a_start: f64,
    a_end: f64,
    start: &State,
    steps: usize,
) -> Result<(State, f64)> {
    if !(a_start > 0.0 && a_end > 0.0) {
        return Err(Error::Domain(format!("sections must be positive, got {a_start}, {a_end}")));
    }
    if start.dim() != gas.dim() {
        return Err(Error::Domain(format!("state {start:?} does not match the gas model")));
    }
    gas.check_subsonic(start)?;
    if a_end == a_start {
        return Ok((*start, 0.0));
    }
    let rec = Recovery::new(*gas, a_start, start);
    let m0 = a_start * gas.momentum_flux(start);
    let steps = steps.max(1);
    let h = (a_end - a_start) / steps as f64;
    let mut big_m = m0;
    let mut a = a_start;
    let mut hint = start[0];
    let rhs = |a: f64, big_m: f64, hint: &mut f64| -> Result<f64> {
        let u = rec.state(a, big_m, *hint)?;
        *hint = u[0];
        Ok(gas.pressure(&u))
    };
    for _ in 0..steps {
        let k1 = rhs(a, big_m, &mut hint)?;
        let k2 = rhs(a + 0.5 * h, big_m + 0.5 * h * k1, &mut hint)?;
        let k3 = rhs(a + 0.5 * h, big_m + 0.5 * h * k2, &mut hint)?;
        let k4 = rhs(a + h, big_m + h * k3, &mut hint)?;
        big_m += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        a += h;
    }
    let end = rec.state(a_end, big_m, hint)?;
    gas.check_subsonic(&end)?;
    Ok((end, big_m - m0))
}

/// Doubles the step count from [`PROFILE_BASE_STEPS`] until the end state
/// changes by less than `tolerance`.
pub fn stationary_profile_refined(
    gas: &SectionGas,
    a_start: f64,
    a_end: f64,
    start: &State,
    tolerance: f64,
) -> Result<State> {
    let mut steps = PROFILE_BASE_STEPS;
    let mut prev = stationary_profile(gas, a_start, a_end, start, steps)?;
    loop {
        steps *= 2;
        let next = stationary_profile(gas, a_start, a_end, start, steps)?;
        if next.dist(&prev) < tolerance || steps >= 1 << 16 {
            return Ok(next);
        }
        prev = next;
    }
}

/// Direct RK4 integration of the stationary equations in primitive
/// variables. Kept as an independent cross-check of the flux-variable route;
/// nothing is conserved exactly here.
pub fn stationary_profile_primitive(
    gas: &SectionGas,
    a_start: f64,
    a_end: f64,
    start: &State,
    steps: usize,
) -> Result<State> {
    gas.check_subsonic(start)?;
    let h = (a_end - a_start) / steps.max(1) as f64;
    match *gas {
        SectionGas::Isentropic(law) => {
            // w = (ρ, q)
            let f = |a: f64, w: [f64; 2]| -> Result<[f64; 2]> {
                let (rho, q) = (w[0], w[1]);
                let denom = law.derivative(rho) - q * q / (rho * rho);
                if denom <= 0.0 {
                    return Err(Error::SonicTransition(format!("sonic point at section {a}")));
                }
                Ok([q * q / (a * rho) / denom, -q / a])
            };
            let mut w = [start[0], start[1]];
            let mut a = a_start;
            for _ in 0..steps.max(1) {
                let k1 = f(a, w)?;
                let k2 = f(a + 0.5 * h, [w[0] + 0.5 * h * k1[0], w[1] + 0.5 * h * k1[1]])?;
                let k3 = f(a + 0.5 * h, [w[0] + 0.5 * h * k2[0], w[1] + 0.5 * h * k2[1]])?;
                let k4 = f(a + h, [w[0] + h * k3[0], w[1] + h * k3[1]])?;
                for j in 0..2 {
                    w[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0;
                }
                a += h;
            }
            Ok(State::new(&w))
        }
        SectionGas::Ideal(gas_law) => {
            let e = Euler { gas: gas_law, vacuum_floor: 0.0 };
            let k = gas_law.gamma / (gas_law.gamma - 1.0);
            // w = (ρ, v, p); the three balance equations are linear in w'
            let f = |a: f64, w: [f64; 3]| -> Result<[f64; 3]> {
                let (rho, v, p) = (w[0], w[1], w[2]);
                let ep = k * p + 0.5 * rho * v * v;
                let mat = vec![
                    vec![a * v, a * rho, 0.0],
                    vec![a * v * v, 2.0 * a * rho * v, a],
                    vec![a * v * 0.5 * v * v, a * (ep + rho * v * v), a * v * k],
                ];
                let rhs = [-rho * v, -rho * v * v, -v * ep];
                let d = solve_dense(&mat, &rhs)
                    .ok_or_else(|| Error::SonicTransition(format!("singular profile system at section {a}")))?;
                Ok([d[0], d[1], d[2]])
            };
            let mut w = [start[0], Euler::velocity(start), e.pressure(start)];
            let mut a = a_start;
            let add = |w: [f64; 3], k: [f64; 3], s: f64| [w[0] + s * k[0], w[1] + s * k[1], w[2] + s * k[2]];
            for _ in 0..steps.max(1) {
                let k1 = f(a, w)?;
                let k2 = f(a + 0.5 * h, add(w, k1, 0.5 * h))?;
                let k3 = f(a + 0.5 * h, add(w, k2, 0.5 * h))?;
                let k4 = f(a + h, add(w, k3, h))?;
                for j in 0..3 {
                    w[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0;
                }
                a += h;
            }
            Ok(e.state(w[0], w[1], w[2]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn isentropic() -> SectionGas {
        SectionGas::Isentropic(GammaLaw::default())
    }

    #[test]
    fn empty_integration_is_identity() {
        let u = PSystem::state(1.0, 0.2);
        assert_eq!(stationary_profile(&isentropic(), 1.0, 1.0, &u, 64).unwrap(), u);
    }

    #[test]
    fn mass_flux_is_exact() {
        let u = State::new(&[1.0, 0.2]);
        let w = stationary_profile(&isentropic(), 1.0, 2.0, &u, 64).unwrap();
        assert_relative_eq!(w[1], 0.1, epsilon = 1e-15);
    }

    #[test]
    fn flux_route_matches_primitive_route() {
        let u = State::new(&[1.0, 0.3]);
        let a = stationary_profile_refined(&isentropic(), 1.0, 1.7, &u, 1e-12).unwrap();
        let b = stationary_profile_primitive(&isentropic(), 1.0, 1.7, &u, 2000).unwrap();
        assert!(a.dist(&b) < 1e-10, "{a:?} vs {b:?}");

        let gas = SectionGas::Ideal(IdealGas::default());
        let e = Euler::new(IdealGas::default()).unwrap();
        let u = e.state(1.0, 0.25, 1.0);
        let a = stationary_profile_refined(&gas, 1.0, 0.6, &u, 1e-12).unwrap();
        let b = stationary_profile_primitive(&gas, 1.0, 0.6, &u, 2000).unwrap();
        assert!(a.dist(&b) < 1e-9, "{a:?} vs {b:?}");
    }

    #[test]
    fn contraction_into_sonic_point_is_reported() {
        let u = State::new(&[1.0, 1.0]);
        let err = stationary_profile(&isentropic(), 1.0, 0.3, &u, 64).unwrap_err();
        assert!(matches!(err, Error::SonicTransition(_)));
    }

    #[test]
    fn momentum_balance_closes() {
        let u = State::new(&[1.2, 0.4]);
        let (w, integral) = profile_with_integral(&isentropic(), 1.0, 1.5, &u, 256).unwrap();
        let lhs = 1.5 * isentropic().momentum_flux(&w) - isentropic().momentum_flux(&u);
        assert_relative_eq!(lhs, integral, epsilon = 1e-12);
    }
}
