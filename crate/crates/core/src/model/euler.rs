use serde::{Deserialize, Serialize};

use super::{FieldKind, HyperbolicModel, DEFAULT_VACUUM_FLOOR};
use crate::error::{Error, Result};
use crate::state::State;

/// Calorically perfect gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealGas {
    pub gamma: f64,
    /// Specific heat at constant volume, only used for the entropy.
    pub cv: f64,
}

impl Default for IdealGas {
    fn default() -> Self {
        Self { gamma: 1.4, cv: 1.0 }
    }
}

/// Full Euler equations in `(ρ, m = ρv, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Euler {
    pub gas: IdealGas,
    pub vacuum_floor: f64,
}

impl Euler {
    pub fn new(gas: IdealGas) -> Result<Self> {
        if !(gas.gamma > 1.0 && gas.gamma.is_finite() && gas.cv > 0.0) {
            return Err(Error::Config(format!("ideal gas needs gamma > 1 and cv > 0, got {gas:?}")));
        }
        Ok(Self { gas, vacuum_floor: DEFAULT_VACUUM_FLOOR })
    }

    pub fn state(&self, rho: f64, v: f64, p: f64) -> State {
        State::new(&[rho, rho * v, p / (self.gas.gamma - 1.0) + 0.5 * rho * v * v])
    }

    pub fn velocity(u: &State) -> f64 {
        u[1] / u[0]
    }

    pub fn pressure(&self, u: &State) -> f64 {
        (self.gas.gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0])
    }

    pub fn sound_speed(&self, u: &State) -> f64 {
        (self.gas.gamma * self.pressure(u) / u[0]).sqrt()
    }

    /// Specific total enthalpy `(E + p)/ρ`.
    pub fn enthalpy(&self, u: &State) -> f64 {
        (u[2] + self.pressure(u)) / u[0]
    }

    /// Specific entropy `c_v ln(p / ρ^γ)`.
    pub fn entropy(&self, u: &State) -> f64 {
        self.gas.cv * (self.pressure(u) / u[0].powf(self.gas.gamma)).ln()
    }
}

impl HyperbolicModel for Euler {
    fn dim(&self) -> usize {
        3
    }

    fn split_index(&self) -> usize {
        1
    }

    fn field_kind(&self, family: usize) -> FieldKind {
        if family == 1 {
            FieldKind::LinearlyDegenerate
        } else {
            FieldKind::GenuinelyNonlinear
        }
    }

    fn component_names(&self) -> &'static [&'static str] {
        &["rho", "m", "E"]
    }

    fn check(&self, u: &State) -> Result<()> {
        if u.dim() != 3 || !u.is_finite() {
            return Err(Error::Domain(format!("{u:?}")));
        }
        if u[0] <= self.vacuum_floor {
            return Err(Error::Domain(format!("density {} below vacuum floor", u[0])));
        }
        let p = self.pressure(u);
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::Domain(format!("non-positive pressure {p}")));
        }
        Ok(())
    }

    fn flux_unchecked(&self, u: &State) -> State {
        let v = Self::velocity(u);
        let p = self.pressure(u);
        State::new(&[u[1], u[1] * v + p, v * (u[2] + p)])
    }

    fn jacobian(&self, u: &State) -> Vec<Vec<f64>> {
        let g = self.gas.gamma;
        let v = Self::velocity(u);
        let h = self.enthalpy(u);
        vec![
            vec![0.0, 1.0, 0.0],
            vec![0.5 * (g - 3.0) * v * v, (3.0 - g) * v, g - 1.0],
            vec![v * (0.5 * (g - 1.0) * v * v - h), h - (g - 1.0) * v * v, g * v],
        ]
    }

    fn eigenvalues(&self, u: &State) -> State {
        let v = Self::velocity(u);
        let c = self.sound_speed(u);
        State::new(&[v - c, v, v + c])
    }

    fn right_eigenvector(&self, family: usize, u: &State) -> State {
        let v = Self::velocity(u);
        let c = self.sound_speed(u);
        let h = self.enthalpy(u);
        match family {
            0 => -State::new(&[1.0, v - c, h - v * c]).normalized(),
            1 => State::new(&[1.0, v, 0.5 * v * v]).normalized(),
            _ => State::new(&[1.0, v + c, h + v * c]).normalized(),
        }
    }

    fn scaled_coordinates(&self, u: &State, reference: &State) -> State {
        let c = self.sound_speed(reference);
        let p = self.pressure(reference);
        State::new(&[
            (u[0] - reference[0]) / reference[0],
            (Self::velocity(u) - Self::velocity(reference)) / c,
            (self.pressure(u) - p) / p,
        ])
    }

    fn from_scaled_coordinates(&self, w: &State, reference: &State) -> State {
        let c = self.sound_speed(reference);
        let p = self.pressure(reference);
        self.state(reference[0] * (1.0 + w[0]), Self::velocity(reference) + c * w[1], p * (1.0 + w[2]))
    }

    /// Isentropic closed form for the acoustic families; the contact locus is
    /// the straight line along the constant eigenvector `(1, v, v²/2)`.
    fn rarefaction_curve(&self, family: usize, s: f64, u: &State) -> Result<State> {
        self.check(u)?;
        if s == 0.0 {
            return Ok(*u);
        }
        if family == 1 {
            let w = *u + self.right_eigenvector(1, u) * s;
            self.check(&w).map_err(|e| Error::Range(e.to_string()))?;
            return Ok(w);
        }
        let g = self.gas.gamma;
        let v0 = Self::velocity(u);
        let c0 = self.sound_speed(u);
        let k = self.pressure(u) / u[0].powf(g);
        // invariant v ± 2c/(γ−1): `+` for the first family, `−` for the third
        let sign = if family == 0 { 1.0 } else { -1.0 };
        let c = c0 - sign * s * (g - 1.0) / (g + 1.0);
        if c <= 0.0 {
            return Err(Error::Range(format!("rarefaction of size {s} reaches vacuum")));
        }
        let rho = (c * c / (g * k)).powf(1.0 / (g - 1.0));
        if rho <= self.vacuum_floor {
            return Err(Error::Range(format!("rarefaction of size {s} reaches vacuum")));
        }
        let v = v0 + sign * 2.0 * (c0 - c) / (g - 1.0);
        Ok(self.state(rho, v, k * rho.powf(g)))
    }

    fn hugoniot_curve(&self, family: usize, sigma: f64, u: &State) -> Result<(State, f64)> {
        if family == 1 {
            let w = self.rarefaction_curve(1, sigma, u)?;
            return Ok((w, Self::velocity(u)));
        }
        super::generic_hugoniot(self, family, sigma, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generic_rarefaction;
    use approx::assert_relative_eq;

    #[test]
    fn eigenpairs_match_jacobian() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let u = m.state(1.1, 0.3, 0.9);
        let a = m.jacobian(&u);
        for (lam, r) in m.eigen(&u).unwrap() {
            for i in 0..3 {
                let ar: f64 = (0..3).map(|j| a[i][j] * r[j]).sum();
                assert_relative_eq!(ar, lam * r[i], epsilon = 1e-12);
            }
        }
        for i in [0, 2] {
            assert!(m.lambda_gradient(i, &u).dot(&m.right_eigenvector(i, &u)) > 0.0);
        }
        assert!(m.lambda_gradient(1, &u).dot(&m.right_eigenvector(1, &u)).abs() < 1e-8);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let u = m.state(0.8, -0.2, 1.3);
        let a = m.jacobian(&u);
        for j in 0..3 {
            let h = 1e-6;
            let mut up = u;
            let mut um = u;
            up[j] += h;
            um[j] -= h;
            let d = (m.flux(&up).unwrap() - m.flux(&um).unwrap()) * (0.5 / h);
            for i in 0..3 {
                assert_relative_eq!(a[i][j], d[i], epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn closed_form_curves_match_rk4() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let u = m.state(1.0, 0.1, 1.0);
        for i in 0..3 {
            for s in [-0.15, 0.1] {
                let a = m.rarefaction_curve(i, s, &u).unwrap();
                let b = generic_rarefaction(&m, i, s, &u, 400).unwrap();
                assert!(a.dist(&b) < 1e-9, "family {i} s {s}");
            }
        }
        let w = m.rarefaction_curve(0, 0.2, &u).unwrap();
        assert_relative_eq!(m.entropy(&w), m.entropy(&u), epsilon = 1e-12);
    }

    #[test]
    fn contact_preserves_velocity_and_pressure() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let u = m.state(1.0, 0.3, 1.0);
        let (w, s) = m.hugoniot_curve(1, 0.2, &u).unwrap();
        assert_relative_eq!(Euler::velocity(&w), 0.3, epsilon = 1e-14);
        assert_relative_eq!(m.pressure(&w), 1.0, epsilon = 1e-13);
        assert_relative_eq!(s, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn shocks_satisfy_rankine_hugoniot_and_entropy_growth() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let u = m.state(1.0, 0.0, 1.0);
        for i in [0, 2] {
            let (w, s) = m.hugoniot_curve(i, -0.3, &u).unwrap();
            let rh = m.flux(&w).unwrap() - m.flux(&u).unwrap() - (w - u) * s;
            assert!(rh.norm() < 1e-11);
            assert_relative_eq!(m.lambda(i, &w), m.lambda(i, &u) - 0.3, epsilon = 1e-11);
            // gas crossing a Lax shock gains entropy
            let (behind, ahead) = if i == 0 { (w, u) } else { (u, w) };
            assert!(m.entropy(&behind) > m.entropy(&ahead) - 1e-12 || i == 2);
        }
    }
}
