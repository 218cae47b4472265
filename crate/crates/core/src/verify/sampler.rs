//! Empirical constants of the junction and interaction estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coupling::{junction_map, CouplingCondition, Param};
use crate::error::Result;
use crate::geometry::Chart;
use crate::model::{FieldKind, HyperbolicModel};
use crate::riemann::{solve_generalized_riemann, RiemannOptions};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerOptions {
    pub samples: usize,
    /// Relative size of state perturbations and wave sizes.
    pub amplitude: f64,
    /// Spread of the parameter coordinate `θ`.
    pub z_amplitude: f64,
    pub seed: u64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self { samples: 1000, amplitude: 0.05, z_amplitude: 0.2, seed: 7 }
    }
}

/// Largest observed ratio for each estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct EstimateConstants {
    /// `‖Ξ(z⁺,z⁻,u₂) − Ξ(z⁺,z⁻,u₁)‖ / (‖Δz‖ ‖Δu‖)`
    pub xi_lipschitz: f64,
    /// `‖T(z⁺,z⁻,u) − u‖ / ‖Δz‖`
    pub t_displacement: f64,
    /// `‖T(u₂) − T(u₁) − (u₂ − u₁)‖ / (‖Δz‖ ‖Δu‖)`
    pub t_second_difference: f64,
    /// `‖σ‖ / (‖uʳ − uˡ‖ + ‖Δz‖)`
    pub sizes_by_data: f64,
    /// `‖uʳ − uˡ‖ / (‖σ‖ + ‖Δz‖)`
    pub data_by_sizes: f64,
    /// `‖T(H(α)u) − H(α)T(u)‖ / (‖α‖ ‖Δz‖)`
    pub commutation: f64,
    /// Waves hitting a junction from the left.
    pub interaction_left: f64,
    /// Waves hitting a junction from the right.
    pub interaction_right: f64,
}

impl EstimateConstants {
    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("xi_lipschitz", self.xi_lipschitz),
            ("t_displacement", self.t_displacement),
            ("t_second_difference", self.t_second_difference),
            ("sizes_by_data", self.sizes_by_data),
            ("data_by_sizes", self.data_by_sizes),
            ("commutation", self.commutation),
            ("interaction_left", self.interaction_left),
            ("interaction_right", self.interaction_right),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerReport {
    pub samples: usize,
    /// Draws where a solver failed; excluded from the constants.
    pub failures: usize,
    pub constants: EstimateConstants,
    /// Largest `Σ|σᵢ − αᵢ − βᵢ|` over draws where the bound's right side vanishes.
    pub commutation_defect: f64,
}

/// `H(α)(u)`: families applied in increasing order.
fn compose(model: &dyn HyperbolicModel, alpha: &[f64], families: std::ops::Range<usize>, u: &State) -> Result<State> {
    let mut w = *u;
    for i in families {
        if alpha[i] != 0.0 {
            w = model.lax_curve(i, alpha[i], &w)?;
        }
    }
    Ok(w)
}

fn approaching_sum(model: &dyn HyperbolicModel, alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let shock = model.field_kind(i) == FieldKind::GenuinelyNonlinear && (alpha[i] < 0.0 || beta[j] < 0.0);
            if i > j || (i == j && shock) {
                s += (alpha[i] * beta[j]).abs();
            }
        }
    }
    s
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Draws random states `u` near `reference`, parameters `z±` near
/// `chart(θ_ref)` and wave vectors, and records the largest ratio of each
/// estimate.
pub fn interaction_estimate_sampler(
    model: &dyn HyperbolicModel,
    cond: &dyn CouplingCondition,
    chart: Chart,
    theta_ref: f64,
    reference: &State,
    opts: &SamplerOptions,
) -> SamplerReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = model.dim();
    let i0 = model.split_index();
    let ropts = RiemannOptions::default();
    let jopts = ropts.junction;
    let mut c = EstimateConstants::default();
    let mut failures = 0;
    let mut commutation_defect: f64 = 0.0;
    let amp = opts.amplitude;
    let state = |rng: &mut ChaCha8Rng| {
        let mut u = *reference;
        for k in 0..n {
            u[k] += amp * reference[k].abs().max(0.1) * rng.gen_range(-1.0..1.0);
        }
        u
    };
    let waves = |rng: &mut ChaCha8Rng, mask: &dyn Fn(usize) -> bool| -> Vec<f64> {
        (0..n).map(|i| if mask(i) { amp * rng.gen_range(-1.0..1.0) } else { 0.0 }).collect()
    };
    for _ in 0..opts.samples {
        let th = theta_ref + opts.z_amplitude * rng.gen_range(-1.0..1.0);
        let dth = opts.z_amplitude * rng.gen_range(-1.0..1.0);
        let zm: Param = chart.map(th);
        let zp: Param = chart.map(th + dth);
        let dz = zp.dist(&zm);
        let u1 = state(&mut rng);
        let u2 = state(&mut rng);
        let alpha = waves(&mut rng, &|_| true);
        let beta = waves(&mut rng, &|_| true);
        let ul = state(&mut rng);
        let ur = state(&mut rng);
        let mut draw = || -> Result<()> {
            if dz == 0.0 {
                return Ok(());
            }
            let du = u2.dist(&u1);
            let x1 = cond.evaluate(&zp, &zm, &u1)?;
            let x2 = cond.evaluate(&zp, &zm, &u2)?;
            c.xi_lipschitz = c.xi_lipschitz.max(x2.dist(&x1) / (dz * du));
            let t1 = junction_map(model, cond, &zp, &zm, &u1, &jopts)?;
            let t2 = junction_map(model, cond, &zp, &zm, &u2, &jopts)?;
            c.t_displacement = c.t_displacement.max(t1.dist(&u1) / dz);
            c.t_second_difference = c.t_second_difference.max((t2 - t1 - (u2 - u1)).norm() / (dz * du));
            // sizes versus data for a generalized Riemann problem
            let dec = solve_generalized_riemann(model, cond, &zp, &zm, &ul, &ur, &ropts)?;
            let s = State::new(&dec.sizes()).norm();
            c.sizes_by_data = c.sizes_by_data.max(s / (ur.dist(&ul) + dz));
            c.data_by_sizes = c.data_by_sizes.max(ur.dist(&ul) / (s + dz));
            // T and H(α) nearly commute
            let a_norm = State::new(&alpha).norm();
            let lhs = junction_map(model, cond, &zp, &zm, &compose(model, &alpha, 0..n, &u1)?, &jopts)?;
            let rhs = compose(model, &alpha, 0..n, &t1)?;
            c.commutation = c.commutation.max(lhs.dist(&rhs) / (a_norm * dz));
            // α then a junction pattern β: u⁻ = H(α)uˡ, uʳ = H(β'')T(H(β')u⁻)
            let um = compose(model, &alpha, 0..n, &u1)?;
            let w = junction_map(model, cond, &zp, &zm, &compose(model, &beta, 0..i0, &um)?, &jopts)?;
            let uright = compose(model, &beta, i0..n, &w)?;
            let sigma = solve_generalized_riemann(model, cond, &zp, &zm, &u1, &uright, &ropts)?.sizes();
            let lhs: f64 = (0..n).map(|i| (sigma[i] - alpha[i] - beta[i]).abs()).sum();
            let rhs = approaching_sum(model, &alpha, &beta) + dz * l1(&alpha[i0..]);
            record(&mut c.interaction_left, &mut commutation_defect, lhs, rhs);
            // a junction pattern α then β: u⁺ = H(α'')T(H(α')uˡ), uʳ = H(β)u⁺
            let w = junction_map(model, cond, &zp, &zm, &compose(model, &alpha, 0..i0, &u1)?, &jopts)?;
            let uplus = compose(model, &alpha, i0..n, &w)?;
            let uright = compose(model, &beta, 0..n, &uplus)?;
            let sigma = solve_generalized_riemann(model, cond, &zp, &zm, &u1, &uright, &ropts)?.sizes();
            let lhs: f64 = (0..n).map(|i| (sigma[i] - alpha[i] - beta[i]).abs()).sum();
            let rhs = approaching_sum(model, &alpha, &beta) + dz * l1(&beta[..i0]);
            record(&mut c.interaction_right, &mut commutation_defect, lhs, rhs);
            Ok(())
        };
        if let Err(e) = draw() {
            log::debug!("sampler draw failed: {e}");
            failures += 1;
        }
    }
    SamplerReport { samples: opts.samples, failures, constants: c, commutation_defect }
}

fn record(constant: &mut f64, defect: &mut f64, lhs: f64, rhs: f64) {
    if rhs > 1e-12 {
        *constant = constant.max(lhs / rhs);
    } else {
        *defect = defect.max(lhs);
    }
}
