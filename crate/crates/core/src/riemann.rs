//! Classical Lax Riemann solver, the junction (generalized) solver and
//! rarefaction splitting.

use serde::Serialize;

use crate::coupling::{junction_map, CouplingCondition, JunctionOptions, Param};
use crate::error::{Error, Result};
use crate::model::{FieldKind, HyperbolicModel};
use crate::numerics::{newton_fd, solve_dense, NewtonOptions};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannOptions {
    /// Largest `‖u_r − u_l‖` attempted.
    pub data_radius: f64,
    /// Target residual of the Lax-curve composition.
    pub tolerance: f64,
    pub junction: JunctionOptions,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        Self { data_radius: 1.0, tolerance: 1e-13, junction: JunctionOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub family: usize,
    pub size: f64,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    /// Speed of the trailing edge (equal to `speed_right` for shocks and contacts).
    pub speed_left: f64,
    pub speed_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionJump {
    pub z_plus: Param,
    pub z_minus: Param,
    pub left: State,
    pub right: State,
    /// `‖z⁺ − z⁻‖`
    pub strength: f64,
}

/// Solution of a (generalized) Riemann problem as a chain of states.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveDecomposition {
    pub waves: Vec<Wave>,
    pub junction: Option<JunctionJump>,
    /// `w₀ … w_{n}` (classical) or `w₀ … w_{n+1}` with the junction jump
    /// between `w_{i0}` and `w_{i0+1}`.
    pub states: Vec<State>,
    pub residual: f64,
}

impl WaveDecomposition {
    pub fn sizes(&self) -> Vec<f64> {
        self.waves.iter().map(|w| w.size).collect()
    }

    /// Self-similar profile at `ξ = x/t`, left-continuous in `ξ`.
    pub fn sample(&self, model: &dyn HyperbolicModel, xi: f64) -> Result<State> {
        let mut current = self.states[0];
        let split = self.junction.map(|_| model.split_index());
        for (k, w) in self.waves.iter().enumerate() {
            if split == Some(k) && xi > 0.0 {
                current = self.junction.unwrap().right;
            }
            if w.size == 0.0 {
                continue;
            }
            if xi <= w.speed_left {
                return Ok(current);
            }
            if w.kind == WaveKind::Rarefaction && xi < w.speed_right {
                // σ measures the change of λ, so the fan is explicit
                let s = xi - model.lambda(w.family, &w.left);
                return model.rarefaction_curve(w.family, s, &w.left);
            }
            current = w.right;
        }
        if split == Some(self.waves.len()) && xi > 0.0 {
            current = self.junction.unwrap().right;
        }
        Ok(current)
    }
}

/// Composes `H_{last} ∘ … ∘ H_{first}` applied to `u`.
fn compose(model: &dyn HyperbolicModel, families: std::ops::Range<usize>, sigma: &[f64], u: &State) -> Result<Vec<State>> {
    let mut out = Vec::with_capacity(families.len() + 1);
    let mut w = *u;
    out.push(w);
    for i in families {
        w = model.lax_curve(i, sigma[i], &w)?;
        out.push(w);
    }
    Ok(out)
}

/// Linearized sizes: `Δu = Σ σᵢ rᵢ / (∇λᵢ·rᵢ)` on GNL fields, `Σ σᵢ rᵢ` on LD ones.
fn linear_guess(model: &dyn HyperbolicModel, base: &State, du: &State) -> Vec<f64> {
    let n = model.dim();
    let eig = match model.eigen(base) {
        Ok(e) => e,
        Err(_) => return vec![0.0; n],
    };
    let mut mat = vec![vec![0.0; n]; n];
    for (j, (_, r)) in eig.iter().enumerate() {
        let scale = match model.field_kind(j) {
            FieldKind::GenuinelyNonlinear => 1.0 / model.lambda_gradient(j, base).dot(r),
            FieldKind::LinearlyDegenerate => 1.0,
        };
        for i in 0..n {
            mat[i][j] = r[i] * scale;
        }
    }
    solve_dense(&mat, du.as_slice()).unwrap_or_else(|| vec![0.0; n])
}

fn build_waves(model: &dyn HyperbolicModel, sigma: &[f64], chain: &[(usize, State, State)]) -> Result<Vec<Wave>> {
    chain
        .iter()
        .map(|&(i, l, r)| {
            let size = sigma[i];
            let (kind, sl, sr) = match model.field_kind(i) {
                FieldKind::LinearlyDegenerate => {
                    let s = model.lambda(i, &l);
                    (WaveKind::Contact, s, s)
                }
                FieldKind::GenuinelyNonlinear if size < 0.0 => {
                    let s = model.shock_speed(i, &l, &r)?;
                    (WaveKind::Shock, s, s)
                }
                FieldKind::GenuinelyNonlinear => {
                    (WaveKind::Rarefaction, model.lambda(i, &l), model.lambda(i, &r))
                }
            };
            Ok(Wave { family: i, size, kind, left: l, right: r, speed_left: sl, speed_right: sr })
        })
        .collect()
}

fn newton_sizes<F>(residual: F, guess: Vec<f64>, tolerance: f64) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let opts = NewtonOptions { tolerance, max_iterations: 60, ..NewtonOptions::default() };
    let out = newton_fd(residual, &guess, opts).map_err(Error::LargeData)?;
    Ok((out.x, out.residual))
}

/// Lax solution of the Riemann problem `(u_l, u_r)`.
pub fn solve_riemann(
    model: &dyn HyperbolicModel,
    u_left: &State,
    u_right: &State,
    opts: &RiemannOptions,
) -> Result<WaveDecomposition> {
    model.check(u_left)?;
    model.check(u_right)?;
    let n = model.dim();
    let jump = *u_right - *u_left;
    if jump.norm() > opts.data_radius {
        return Err(Error::LargeData(format!("jump {} exceeds radius {}", jump.norm(), opts.data_radius)));
    }
    let (sigma, residual) = if u_left == u_right {
        (vec![0.0; n], 0.0)
    } else {
        let guess = linear_guess(model, u_left, &jump);
        newton_sizes(
            |s| {
                let w = compose(model, 0..n, s, u_left).ok()?;
                Some((w[n] - *u_right).as_slice().to_vec())
            },
            guess,
            opts.tolerance,
        )?
    };
    let states = compose(model, 0..n, &sigma, u_left)?;
    let chain: Vec<_> = (0..n).map(|i| (i, states[i], states[i + 1])).collect();
    let waves = build_waves(model, &sigma, &chain)?;
    let residual = residual.max(states[n].dist(u_right));
    let mut states = states;
    states[n] = *u_right;
    let mut waves = waves;
    waves[n - 1].right = *u_right;
    Ok(WaveDecomposition { waves, junction: None, states, residual })
}

/// Riemann problem at a junction: families `1…i0` leave to the left, then the
/// junction map `T`, then families `i0+1…n` to the right.
pub fn solve_generalized_riemann(
    model: &dyn HyperbolicModel,
    cond: &dyn CouplingCondition,
    z_plus: &Param,
    z_minus: &Param,
    u_left: &State,
    u_right: &State,
    opts: &RiemannOptions,
) -> Result<WaveDecomposition> {
    if z_plus == z_minus {
        return solve_riemann(model, u_left, u_right, opts);
    }
    model.check(u_left)?;
    model.check(u_right)?;
    let n = model.dim();
    let i0 = model.split_index();
    let t_left = junction_map(model, cond, z_plus, z_minus, u_left, &opts.junction)?;
    let gap = *u_right - t_left;
    if gap.norm() > opts.data_radius {
        return Err(Error::LargeData(format!("jump {} exceeds radius {}", gap.norm(), opts.data_radius)));
    }
    let full = |s: &[f64]| -> Result<(Vec<State>, State, Vec<State>)> {
        let left = compose(model, 0..i0, s, u_left)?;
        let t = junction_map(model, cond, z_plus, z_minus, &left[i0], &opts.junction)?;
        let right = compose(model, i0..n, s, &t)?;
        Ok((left, t, right))
    };
    let (sigma, residual) = if gap.norm() == 0.0 {
        (vec![0.0; n], 0.0)
    } else {
        let guess = linear_guess(model, &t_left, &gap);
        newton_sizes(
            |s| {
                let (_, _, right) = full(s).ok()?;
                Some((right[n - i0] - *u_right).as_slice().to_vec())
            },
            guess,
            opts.tolerance,
        )?
    };
    let (left, t, right) = full(&sigma)?;
    let mut chain = Vec::with_capacity(n);
    for i in 0..i0 {
        chain.push((i, left[i], left[i + 1]));
    }
    for i in i0..n {
        chain.push((i, right[i - i0], right[i - i0 + 1]));
    }
    let mut waves = build_waves(model, &sigma, &chain)?;
    waves[n - 1].right = *u_right;
    let residual = residual.max(right[n - i0].dist(u_right));
    for w in &waves {
        let crosses = if w.family < i0 { w.speed_right >= 0.0 } else { w.speed_left <= 0.0 };
        if w.size != 0.0 && crosses {
            return Err(Error::JunctionSolvability(format!(
                "wave of family {} has speed of the wrong sign at the junction",
                w.family
            )));
        }
    }
    let mut states: Vec<State> = left.clone();
    states.extend(right.iter().copied());
    let last = states.len() - 1;
    states[last] = *u_right;
    let strength = z_plus.dist(z_minus);
    let junction = JunctionJump { z_plus: *z_plus, z_minus: *z_minus, left: left[i0], right: t, strength };
    Ok(WaveDecomposition { waves, junction: Some(junction), states, residual })
}

/// Splits a rarefaction of size `σ > 0` into `⌊σ/δ_R⌋ + 1` equal wavelets.
pub fn discretize_rarefaction(sigma: f64, delta_r: f64) -> Vec<f64> {
    assert!(sigma > 0.0 && delta_r > 0.0, "rarefaction splitting needs positive sizes");
    let m = (sigma / delta_r).floor() as usize + 1;
    let piece = sigma / m as f64;
    let mut out = vec![piece; m];
    // absorb rounding in the last wavelet so the sizes add up to σ
    let head: f64 = out[..m - 1].iter().sum();
    out[m - 1] = sigma - head;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{SectionCondition, SectionGas, SectionVariant};
    use crate::model::{Euler, GammaLaw, IdealGas, PSystem};
    use approx::assert_relative_eq;

    fn psys() -> PSystem {
        PSystem::new(GammaLaw::default())
    }

    #[test]
    fn trivial_problem_has_no_waves() {
        let u = PSystem::state(1.0, 0.2);
        let d = solve_riemann(&psys(), &u, &u, &RiemannOptions::default()).unwrap();
        assert_eq!(d.sizes(), vec![0.0, 0.0]);
    }

    #[test]
    fn recovers_single_wave() {
        let m = psys();
        let ul = PSystem::state(1.0, 0.2);
        let ur = m.lax_curve(1, 0.05, &ul).unwrap();
        let d = solve_riemann(&m, &ul, &ur, &RiemannOptions::default()).unwrap();
        assert!(d.sizes()[0].abs() < 1e-9);
        assert_relative_eq!(d.sizes()[1], 0.05, epsilon = 1e-9);
        assert!(d.residual <= 1e-11);
    }

    #[test]
    fn euler_contact_and_shock() {
        let m = Euler::new(IdealGas::default()).unwrap();
        let ul = m.state(1.0, 0.0, 1.0);
        let ur = m.state(0.8, 0.0, 1.0);
        let d = solve_riemann(&m, &ul, &ur, &RiemannOptions::default()).unwrap();
        assert!(d.sizes()[0].abs() < 1e-9 && d.sizes()[2].abs() < 1e-9);
        assert_eq!(d.waves[1].kind, WaveKind::Contact);
        assert!(d.waves[1].speed_left.abs() < 1e-12);
    }

    #[test]
    fn pure_zero_wave() {
        let m = psys();
        let c = SectionCondition::new(SectionVariant::L, SectionGas::Isentropic(GammaLaw::default()));
        let (zp, zm) = (State::new(&[1.3]), State::new(&[1.0]));
        let ul = PSystem::state(1.0, 0.2);
        let ur = junction_map(&m, &c, &zp, &zm, &ul, &JunctionOptions::default()).unwrap();
        let d = solve_generalized_riemann(&m, &c, &zp, &zm, &ul, &ur, &RiemannOptions::default()).unwrap();
        assert_eq!(d.sizes(), vec![0.0, 0.0]);
    }

    #[test]
    fn junction_defect_and_reconstruction() {
        let m = psys();
        let c = SectionCondition::new(SectionVariant::P, SectionGas::Isentropic(GammaLaw::default()));
        let (zp, zm) = (State::new(&[2.0]), State::new(&[1.0]));
        let u = PSystem::state(1.0, 0.2);
        let opts = RiemannOptions { junction: JunctionOptions { z_radius: 1.0, ..Default::default() }, ..Default::default() };
        let d = solve_generalized_riemann(&m, &c, &zp, &zm, &u, &u, &opts).unwrap();
        assert!(d.sizes().iter().any(|s| s.abs() > 1e-3));
        assert!(d.residual <= 1e-11);
        let j = d.junction.unwrap();
        let xi = c.evaluate(&zp, &zm, &j.left).unwrap();
        let defect = m.flux(&j.right).unwrap() - m.flux(&j.left).unwrap() - xi;
        assert!(defect.norm() <= 1e-11);
        assert!(d.waves[0].speed_right < 0.0 && d.waves[1].speed_left > 0.0);
    }

    #[test]
    fn self_similar_sampling() {
        let m = psys();
        let ul = PSystem::state(1.2, 0.1);
        let ur = PSystem::state(0.9, 0.05);
        let d = solve_riemann(&m, &ul, &ur, &RiemannOptions::default()).unwrap();
        for xi in [-2.0, -1.3, -0.5, 0.0, 0.7, 1.5, 3.0] {
            let a = d.sample(&m, xi).unwrap();
            assert!(m.check(&a).is_ok());
        }
        assert_eq!(d.sample(&m, -10.0).unwrap(), ul);
        assert_eq!(d.sample(&m, 10.0).unwrap(), ur);
    }

    #[test]
    fn rarefaction_split_sizes() {
        let s = discretize_rarefaction(0.25, 0.1);
        assert_eq!(s.len(), 3);
        assert_relative_eq!(s[0], 0.25 / 3.0, epsilon = 1e-16);
        assert!((s.iter().sum::<f64>() - 0.25).abs() <= 1e-15);
        assert_eq!(discretize_rarefaction(0.05, 0.1), vec![0.05]);
    }
}
