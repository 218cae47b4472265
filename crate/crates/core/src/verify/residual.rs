//! Weak-form residual of an approximate solution against the true geometry.

use serde::Serialize;

use crate::coupling::CouplingCondition;
use crate::engine::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::ZetaGeometry;
use crate::model::HyperbolicModel;
use crate::state::State;

const GAUSS4_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GAUSS4_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Tensor bump `φ(t, x) = b((t − t_c)/s_t) · b((x − x_c)/s_x)` with
/// `b(s) = (1 − s²)³` on `|s| < 1`, which is `C²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub t_center: f64,
    pub x_center: f64,
    pub t_scale: f64,
    pub x_scale: f64,
}

fn b(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - s * s;
        w * w * w
    }
}

fn db(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - s * s;
        -6.0 * s * w * w
    }
}

impl Bump {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        b((t - self.t_center) / self.t_scale) * b((x - self.x_center) / self.x_scale)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        db((t - self.t_center) / self.t_scale) / self.t_scale * b((x - self.x_center) / self.x_scale)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        b((t - self.t_center) / self.t_scale) * db((x - self.x_center) / self.x_scale) / self.x_scale
    }

    pub fn t_support(&self) -> (f64, f64) {
        (self.t_center - self.t_scale, self.t_center + self.t_scale)
    }

    pub fn x_support(&self) -> (f64, f64) {
        (self.x_center - self.x_scale, self.x_center + self.x_scale)
    }
}

/// Twelve bumps: four over junctions, four over smooth-density regions and
/// four over pure transport, with `x`-scales in `[0.2, 1]` and `t`-scales in
/// `[0.1, 0.5]` (clipped so that supports stay inside `]0, horizon[`).
pub fn default_battery(zeta: &ZetaGeometry, horizon: f64) -> Vec<Bump> {
    let dec = zeta.decomposition();
    let (lo, hi) = zeta.extent().unwrap_or((-1.0, 1.0));
    let mut junction: Vec<f64> = dec.atoms.iter().map(|a| a.x).collect();
    let mut smooth: Vec<f64> = dec
        .smooth
        .iter()
        .flat_map(|p| [0.2, 0.4, 0.6, 0.8].map(|s| p.a + s * (p.b - p.a)))
        .collect();
    let transport = vec![lo - 1.5, hi + 1.5, lo - 2.5, hi + 2.5];
    // geometries without atoms (or without smooth parts) reuse the other sites
    if junction.is_empty() {
        junction = if smooth.is_empty() { transport.clone() } else { smooth.clone() };
    }
    if smooth.is_empty() {
        smooth = junction.clone();
    }
    let x_scales: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 1.0, 0.3];
    let t_scales: [f64; 6] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.15];
    let t_max = 0.49 * horizon;
    let mut out = Vec::with_capacity(12);
    for (group, sites) in [junction, smooth, transport].into_iter().enumerate() {
        for k in 0..4 {
            let idx = group * 4 + k;
            let st = t_scales[idx % t_scales.len()].min(t_max);
            // centre late enough that waves from the datum have reached the site
            let tc = (horizon - st * 1.01).max(st * 1.01);
            out.push(Bump { t_center: tc, x_center: sites[k % sites.len()], t_scale: st, x_scale: x_scales[idx % x_scales.len()] });
        }
    }
    out
}

/// Quadrature resolution for [`weak_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualQuadrature {
    /// Gauss panels over each bump's time support.
    pub time_panels: usize,
    /// Longest Gauss panel for the smooth-density term in `x`.
    pub max_dx: f64,
}

impl Default for ResidualQuadrature {
    fn default() -> Self {
        Self { time_panels: 64, max_dx: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Largest residual norm over the battery.
    pub max: f64,
    /// `‖lhs − atomic − density‖` per bump.
    pub per_test: Vec<f64>,
}

/// Evaluates
/// `−∬ (u φ_t + f(u) φ_x) − Σ_{x∈𝓘} ∫ Ξ(ζ(x+), ζ(x), u(t,x)) φ dt − ∬ D⁺_v Ξ(ζ, ζ, u) φ d|μ| dt`
/// for each bump, using the true geometry `zeta`.
pub fn weak_residual(
    trajectory: &Trajectory,
    model: &dyn HyperbolicModel,
    zeta: &ZetaGeometry,
    cond: &dyn CouplingCondition,
    tests: &[Bump],
    quad: &ResidualQuadrature,
) -> Result<ResidualReport> {
    let dec = zeta.decomposition();
    let mut per_test = Vec::with_capacity(tests.len());
    for bump in tests {
        let (t0, t1) = bump.t_support();
        if !(t0 > 0.0 && t1 <= trajectory.horizon) {
            return Err(Error::OutsideTrajectory { t: if t0 <= 0.0 { t0 } else { t1 }, end: trajectory.horizon });
        }
        let (xa, xb) = bump.x_support();
        let n = model.dim();
        let mut total = State::zeros(n);
        let dt = (t1 - t0) / quad.time_panels as f64;
        for p in 0..quad.time_panels {
            let ta = t0 + dt * p as f64;
            for (node, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                let t = ta + 0.5 * dt * (1.0 + node);
                let wt = 0.5 * dt * w;
                let pieces = trajectory.profile_on(t, xa, xb)?;
                let mut slice = State::zeros(n);
                for &(a, c, u) in &pieces {
                    let fu = model.flux(&u)?;
                    // φ is a degree-6 polynomial in x: 4 Gauss points are exact
                    let (mut it, mut ix) = (0.0, 0.0);
                    for (nx, wx) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                        let x = a + 0.5 * (c - a) * (1.0 + nx);
                        it += 0.5 * (c - a) * wx * bump.dt(t, x);
                        ix += 0.5 * (c - a) * wx * bump.dx(t, x);
                    }
                    slice -= u * it + fu * ix;
                    // D⁺Ξ term over the smooth parts
                    for part in &dec.smooth {
                        let lo = a.max(part.a);
                        let hi = c.min(part.b);
                        if hi <= lo {
                            continue;
                        }
                        let m = ((hi - lo) / quad.max_dx).ceil().max(1.0) as usize;
                        let h = (hi - lo) / m as f64;
                        for k in 0..m {
                            let xa_k = lo + h * k as f64;
                            for (nx, wx) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                                let x = xa_k + 0.5 * h * (1.0 + nx);
                                let (v, rate) = zeta.density(x);
                                if rate == 0.0 {
                                    continue;
                                }
                                let d = cond.dini(&zeta.evaluate(x), &v, &u)?;
                                slice -= d * (0.5 * h * wx * rate * bump.value(t, x));
                            }
                        }
                    }
                }
                for atom in dec.atoms.iter().filter(|a| a.x > xa && a.x < xb) {
                    let k = pieces.partition_point(|p| p.1 < atom.x);
                    let u = pieces[k.min(pieces.len() - 1)].2;
                    let xi = cond.evaluate(&atom.right, &atom.left, &u)?;
                    slice -= xi * bump.value(t, atom.x);
                }
                total += slice * wt;
            }
        }
        per_test.push(total.norm());
    }
    let max = per_test.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport { max, per_test })
}
