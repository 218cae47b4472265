use serde::{Deserialize, Serialize};

use super::{FieldKind, GammaLaw, HyperbolicModel, DEFAULT_VACUUM_FLOOR};
use crate::error::{Error, Result};
use crate::numerics::bracketed_root;
use crate::state::State;

/// Isentropic gas dynamics in conserved variables `(ρ, q = ρv)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSystem {
    pub law: GammaLaw,
    pub vacuum_floor: f64,
}

impl PSystem {
    pub fn new(law: GammaLaw) -> Self {
        Self { law, vacuum_floor: DEFAULT_VACUUM_FLOOR }
    }

    pub fn state(rho: f64, v: f64) -> State {
        State::new(&[rho, rho * v])
    }

    pub fn velocity(u: &State) -> f64 {
        u[1] / u[0]
    }

    /// Riemann-invariant potential `∫ c(ρ)/ρ dρ`.
    fn potential(&self, rho: f64) -> f64 {
        let g = self.law.gamma;
        if g > 1.0 {
            2.0 * self.law.sound_speed(rho) / (g - 1.0)
        } else {
            self.law.sound_speed(rho) * rho.ln()
        }
    }

    /// Sign with which the potential enters the invariant conserved along
    /// family `i`: `v + φ` for the first family, `v − φ` for the second.
    fn invariant_sign(family: usize) -> f64 {
        if family == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl HyperbolicModel for PSystem {
    fn dim(&self) -> usize {
        2
    }

    fn split_index(&self) -> usize {
        1
    }

    fn field_kind(&self, _family: usize) -> FieldKind {
        FieldKind::GenuinelyNonlinear
    }

    fn component_names(&self) -> &'static [&'static str] {
        &["rho", "q"]
    }

    fn check(&self, u: &State) -> Result<()> {
        if u.dim() != 2 || !u.is_finite() {
            return Err(Error::Domain(format!("{u:?}")));
        }
        if u[0] <= self.vacuum_floor {
            return Err(Error::Domain(format!("density {} below vacuum floor", u[0])));
        }
        Ok(())
    }

    fn flux_unchecked(&self, u: &State) -> State {
        let (rho, q) = (u[0], u[1]);
        State::new(&[q, q * q / rho + self.law.pressure(rho)])
    }

    fn jacobian(&self, u: &State) -> Vec<Vec<f64>> {
        let v = Self::velocity(u);
        vec![vec![0.0, 1.0], vec![self.law.derivative(u[0]) - v * v, 2.0 * v]]
    }

    fn eigenvalues(&self, u: &State) -> State {
        let v = Self::velocity(u);
        let c = self.law.sound_speed(u[0]);
        State::new(&[v - c, v + c])
    }

    fn right_eigenvector(&self, family: usize, u: &State) -> State {
        let lam = self.lambda(family, u);
        let r = State::new(&[1.0, lam]).normalized();
        if family == 0 {
            -r
        } else {
            r
        }
    }

    fn lambda_gradient(&self, family: usize, u: &State) -> State {
        let rho = u[0];
        let v = Self::velocity(u);
        let dc = 0.5 * self.law.second_derivative(rho) / self.law.sound_speed(rho);
        let sign = if family == 0 { -1.0 } else { 1.0 };
        State::new(&[-v / rho + sign * dc, 1.0 / rho])
    }

    fn scaled_coordinates(&self, u: &State, reference: &State) -> State {
        let c = self.law.sound_speed(reference[0]);
        State::new(&[
            (u[0] - reference[0]) / reference[0],
            (Self::velocity(u) - Self::velocity(reference)) / c,
        ])
    }

    fn from_scaled_coordinates(&self, w: &State, reference: &State) -> State {
        let c = self.law.sound_speed(reference[0]);
        Self::state(reference[0] * (1.0 + w[0]), Self::velocity(reference) + c * w[1])
    }

    /// Closed form through the Riemann invariants.
    fn rarefaction_curve(&self, family: usize, s: f64, u: &State) -> Result<State> {
        self.check(u)?;
        if s == 0.0 {
            return Ok(*u);
        }
        let rho0 = u[0];
        let v0 = Self::velocity(u);
        let c0 = self.law.sound_speed(rho0);
        // λ_i moves by ±s; sign(+) for the second family
        let dir = -Self::invariant_sign(family);
        let g = self.law.gamma;
        let rho = if g > 1.0 {
            let c = c0 + dir * s * (g - 1.0) / (g + 1.0);
            if c <= 0.0 {
                return Err(Error::Range(format!("rarefaction of size {s} reaches vacuum")));
            }
            self.law.density_from_sound_speed(c)
        } else {
            rho0 * (dir * s / c0).exp()
        };
        if rho <= self.vacuum_floor || !rho.is_finite() {
            return Err(Error::Range(format!("rarefaction of size {s} reaches vacuum")));
        }
        let w = v0 + Self::invariant_sign(family) * self.potential(rho0);
        let v = w - Self::invariant_sign(family) * self.potential(rho);
        Ok(Self::state(rho, v))
    }

    /// Explicit Hugoniot locus `v = v₀ − √((p − p₀)(1/ρ₀ − 1/ρ))` and a scalar
    /// root for the density matching `λ_i = λ_i(u) + σ`.
    fn hugoniot_curve(&self, family: usize, sigma: f64, u: &State) -> Result<(State, f64)> {
        self.check(u)?;
        let rho0 = u[0];
        let v0 = Self::velocity(u);
        let p0 = self.law.pressure(rho0);
        let target = self.lambda(family, u) + sigma;
        let point = |rho: f64| {
            let jump = ((self.law.pressure(rho) - p0) * (1.0 / rho0 - 1.0 / rho)).max(0.0);
            Self::state(rho, v0 - jump.sqrt())
        };
        if sigma == 0.0 {
            return Ok((*u, self.lambda(family, u)));
        }
        if sigma > 0.0 {
            // admissible locus only for σ < 0; the other half is the reflected branch
            return Err(Error::Range("Hugoniot branch requested for positive size".into()));
        }
        let g = |rho: f64| self.lambda(family, &point(rho)) - target;
        let rho = if family == 0 {
            let mut hi = rho0 * 2.0;
            while g(hi) > 0.0 {
                hi *= 2.0;
                if hi > rho0 * 1e8 {
                    return Err(Error::Range(format!("no 1-shock of size {sigma}")));
                }
            }
            bracketed_root(g, rho0, hi, 1e-15)
        } else {
            let lo = self.vacuum_floor * 1.0001;
            if g(lo) > 0.0 {
                return Err(Error::Range(format!("no 2-shock of size {sigma}")));
            }
            bracketed_root(g, lo, rho0, 1e-15)
        }
        .ok_or_else(|| Error::Range(format!("Hugoniot root failed for size {sigma}")))?;
        let w = point(rho);
        let speed = (w[1] - u[1]) / (w[0] - u[0]);
        Ok((w, speed))
    }
}
