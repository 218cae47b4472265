//! Declarative scenario descriptions (TOML) and the standard suite.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingCondition, KinkCondition, ProductCondition, ProductLaw, SectionCondition, SectionGas, SectionVariant};
use crate::engine::{ApproximateSolution, EngineParams, InitialData, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{
    build_zeta_h, curved_pipe_geometry, section_ramp, section_steps, Chart, Piece, PipeSegment, PiecewiseConstantZeta, Profile,
    ZetaGeometry,
};
use crate::model::{Euler, GammaLaw, HyperbolicModel, IdealGas, PSystem};
use crate::riemann::RiemannOptions;
use crate::state::State;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    PSystem {
        #[serde(default = "one")]
        kappa: f64,
        #[serde(default = "two")]
        gamma: f64,
    },
    Euler {
        #[serde(default = "gamma_air")]
        gamma: f64,
        #[serde(default = "one")]
        cv: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn gamma_air() -> f64 {
    1.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Kink { alpha: f64 },
    Section { variant: SectionVariant },
    /// `G(z, u) = z (b + M u)`; `M = 0` when omitted.
    Product { b: Vec<f64>, m: Option<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Constant { chart: Chart, value: f64 },
    Pipe { start: f64, heading: f64, segments: Vec<PipeSegment> },
    SectionSteps { a0: f64, steps: Vec<(f64, f64)> },
    SectionRamp { a0: f64, a1: f64, x0: f64, x1: f64, profile: Profile },
    Pieces { chart: Chart, theta_start: f64, pieces: Vec<Piece> },
}

/// Adds `delta` to the datum on `(a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Patch {
    pub a: f64,
    pub b: f64,
    pub delta: Vec<f64>,
}

/// Replaces the datum on `(−∞, x]` by `state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Incoming {
    pub x: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Constant {
        state: Vec<f64>,
    },
    Riemann {
        x: f64,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    Steps {
        breakpoints: Vec<f64>,
        states: Vec<Vec<f64>>,
    },
    /// Discrete stationary flow through `ζʰ` entering with `state`, plus
    /// optional disturbances.
    Stationary {
        state: Vec<f64>,
        incoming: Option<Incoming>,
        #[serde(default)]
        patches: Vec<Patch>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub h: f64,
    /// Defaults to `h²`.
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub h_list: Vec<f64>,
    pub horizon: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_snapshot_points")]
    pub snapshot_points: usize,
    /// Output and distance window; defaults to `[−1/h_max, 1/h_max]`.
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_cap")]
    pub interaction_cap: usize,
    #[serde(default = "default_budget")]
    pub bv_budget: f64,
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_oracle_cells")]
    pub oracle_cells: usize,
}

fn default_snapshot_points() -> usize {
    401
}
fn default_cap() -> usize {
    1_000_000
}
fn default_budget() -> f64 {
    2.0
}
fn default_oracle_cells() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub model: ModelSpec,
    pub coupling: CouplingSpec,
    pub geometry: GeometrySpec,
    pub initial: InitialSpec,
    pub numerics: Numerics,
}

/// Resolved objects of a scenario.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: Arc<dyn HyperbolicModel>,
    pub cond: Arc<dyn CouplingCondition>,
    pub zeta: ZetaGeometry,
}

fn state(v: &[f64], n: usize, what: &str) -> Result<State> {
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{what}: expected {n} finite components, got {v:?}")));
    }
    Ok(State::new(v))
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = &self.numerics;
        let positive = [n.h, n.horizon, n.bv_budget].into_iter().chain(n.epsilon).chain(n.h_list.iter().copied());
        if positive.clone().any(|v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Config("h, epsilon, h_list, horizon and bv_budget must be positive".into()));
        }
        if n.snapshot_times.iter().any(|t| !(0.0..=n.horizon).contains(t)) {
            return Err(Error::Config("snapshot times must lie in [0, horizon]".into()));
        }
        if let Some((a, b)) = n.window {
            if !(a < b) {
                return Err(Error::Config(format!("empty window ({a}, {b})")));
            }
        }
        if n.snapshot_points < 2 || n.oracle_cells < 2 {
            return Err(Error::Config("snapshot_points and oracle_cells must be at least 2".into()));
        }
        let setup = self.setup()?;
        // the datum must resolve on the coarsest approximation
        let zh = build_zeta_h(&setup.zeta, self.h_max())?;
        self.initial_data(&setup, &zh)?;
        Ok(())
    }

    pub fn h_max(&self) -> f64 {
        self.numerics.h_list.iter().copied().fold(self.numerics.h, f64::max)
    }

    pub fn window(&self) -> (f64, f64) {
        self.numerics.window.unwrap_or_else(|| {
            let r = 1.0 / self.h_max();
            (-r, r)
        })
    }

    pub fn epsilon_for(&self, h: f64) -> f64 {
        if h == self.numerics.h {
            self.numerics.epsilon.unwrap_or(h * h)
        } else {
            h * h
        }
    }

    pub fn setup(&self) -> Result<Setup> {
        let (model, gas): (Arc<dyn HyperbolicModel>, SectionGas) = match self.model {
            ModelSpec::PSystem { kappa, gamma } => {
                let law = GammaLaw::new(kappa, gamma)?;
                (Arc::new(PSystem::new(law)), SectionGas::Isentropic(law))
            }
            ModelSpec::Euler { gamma, cv } => {
                let gas = IdealGas { gamma, cv };
                (Arc::new(Euler::new(gas)?), SectionGas::Ideal(gas))
            }
        };
        let n = model.dim();
        let cond: Arc<dyn CouplingCondition> = match &self.coupling {
            CouplingSpec::Kink { alpha } => Arc::new(KinkCondition::drag(*alpha)?),
            CouplingSpec::Section { variant } => Arc::new(SectionCondition::new(*variant, gas)),
            CouplingSpec::Product { b, m } => {
                let b = state(b, n, "product vector b")?;
                let m = m.clone().unwrap_or_else(|| vec![vec![0.0; n]; n]);
                Arc::new(ProductCondition::new(ProductLaw::Linear { b, m })?)
            }
        };
        let zeta = match &self.geometry {
            GeometrySpec::Constant { chart, value } => ZetaGeometry::constant(*chart, *value),
            GeometrySpec::Pipe { start, heading, segments } => curved_pipe_geometry(*start, *heading, segments)?,
            GeometrySpec::SectionSteps { a0, steps } => section_steps(*a0, steps)?,
            GeometrySpec::SectionRamp { a0, a1, x0, x1, profile } => section_ramp(*a0, *a1, *x0, *x1, *profile)?,
            GeometrySpec::Pieces { chart, theta_start, pieces } => ZetaGeometry::new(*chart, *theta_start, pieces.clone())?,
        };
        if zeta.parameter_dim() != cond.parameter_dim() {
            return Err(Error::Config(format!(
                "geometry has {} parameters but the coupling expects {}",
                zeta.parameter_dim(),
                cond.parameter_dim()
            )));
        }
        cond.validate_parameter(&zeta.value_at_minus_infinity())?;
        Ok(Setup { model, cond, zeta })
    }

    /// The datum for a given `ζʰ`. Only stationary data depend on `ζʰ`.
    pub fn initial_data(&self, setup: &Setup, zh: &PiecewiseConstantZeta) -> Result<InitialData> {
        let n = setup.model.dim();
        let u0 = match &self.initial {
            InitialSpec::Constant { state: s } => InitialData::constant(state(s, n, "constant state")?),
            InitialSpec::Riemann { x, left, right } => {
                InitialData::riemann(*x, state(left, n, "left state")?, state(right, n, "right state")?)
            }
            InitialSpec::Steps { breakpoints, states } => {
                let st = states.iter().map(|s| state(s, n, "step state")).collect::<Result<Vec<_>>>()?;
                InitialData::steps(breakpoints.clone(), st)?
            }
            InitialSpec::Stationary { state: s, incoming, patches } => {
                let u = state(s, n, "stationary state")?;
                let mut d = InitialData::stationary(setup.model.as_ref(), setup.cond.as_ref(), zh, u, &RiemannOptions::default())?;
                if let Some(inc) = incoming {
                    d = d.prepend(inc.x, state(&inc.state, n, "incoming state")?)?;
                }
                for p in patches {
                    d = apply_patch(d, p.a, p.b, &state(&p.delta, n, "patch delta")?)?;
                }
                d
            }
        };
        for s in &u0.states {
            setup.model.check(s)?;
        }
        Ok(u0)
    }

    pub fn engine_params(&self, h: f64) -> EngineParams {
        let n = &self.numerics;
        EngineParams {
            interaction_cap: n.interaction_cap,
            bv_budget: n.bv_budget,
            jitter: n.jitter,
            seed: n.seed,
            ..EngineParams::new(self.epsilon_for(h))
        }
    }

    /// Builds `ζʰ`, the datum and the engine, and runs to the horizon.
    pub fn run(&self, setup: &Setup, h: f64) -> Result<(PiecewiseConstantZeta, Trajectory)> {
        let zh = build_zeta_h(&setup.zeta, h)?;
        let u0 = self.initial_data(setup, &zh)?;
        let sol = ApproximateSolution::initialize(setup.model.clone(), setup.cond.clone(), zh.clone(), &u0, self.engine_params(h))?;
        Ok((zh, sol.run(self.numerics.horizon)?))
    }
}

/// Adds `delta` to a piecewise-constant datum on `(a, b]`.
pub fn apply_patch(d: InitialData, a: f64, b: f64, delta: &State) -> Result<InitialData> {
    if !(a < b) {
        return Err(Error::Config(format!("empty patch ({a}, {b}]")));
    }
    let mut bp = d.breakpoints.clone();
    for x in [a, b] {
        if !bp.contains(&x) {
            let k = bp.partition_point(|&y| y < x);
            bp.insert(k, x);
        }
    }
    let states = (0..=bp.len())
        .map(|k| {
            // state on (bp[k−1], bp[k]], sampled at its right end or beyond
            let probe = if k < bp.len() { bp[k] } else { bp[k - 1] + 1.0 };
            let base = d.evaluate(probe);
            let inside = k > 0 && k < bp.len() && bp[k - 1] >= a && bp[k] <= b;
            if inside {
                base + *delta
            } else {
                base
            }
        })
        .collect();
    InitialData::steps(bp, states)
}

fn base(name: &str, model: ModelSpec, coupling: CouplingSpec, geometry: GeometrySpec, initial: InitialSpec) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        model,
        coupling,
        geometry,
        initial,
        numerics: Numerics {
            h: 0.1,
            epsilon: None,
            h_list: Vec::new(),
            horizon: 1.0,
            snapshot_times: vec![0.0, 0.5, 1.0],
            snapshot_points: default_snapshot_points(),
            window: Some((-5.0, 5.0)),
            interaction_cap: default_cap(),
            bv_budget: default_budget(),
            jitter: 0.0,
            seed: 0,
            oracle_cells: default_oracle_cells(),
        },
    }
}

const PSYS: ModelSpec = ModelSpec::PSystem { kappa: 1.0, gamma: 2.0 };

/// Rarefaction-and-shock pulse entering the geometry from the left.
fn pulse(state: Vec<f64>) -> InitialSpec {
    InitialSpec::Stationary { state, incoming: None, patches: vec![Patch { a: -1.4, b: -1.0, delta: vec![0.03, 0.05] }] }
}

pub fn kink_pipe() -> Scenario {
    base(
        "kink_pipe",
        PSYS,
        CouplingSpec::Kink { alpha: 0.5 },
        GeometrySpec::Pipe {
            start: 0.0,
            heading: 0.0,
            segments: vec![PipeSegment::Kink { angle: 0.3 }, PipeSegment::Straight { length: 1.0 }, PipeSegment::Kink { angle: -0.2 }],
        },
        pulse(vec![1.0, 0.2]),
    )
}

pub fn arc_pipe() -> Scenario {
    base(
        "arc_pipe",
        PSYS,
        CouplingSpec::Kink { alpha: 0.5 },
        GeometrySpec::Pipe { start: -0.5, heading: 0.0, segments: vec![PipeSegment::Arc { radius: 2.0, angle: 0.4 }] },
        pulse(vec![1.0, 0.2]),
    )
}

pub fn section_step(variant: SectionVariant) -> Scenario {
    base(
        &format!("section_steps_{}", variant.label()),
        PSYS,
        CouplingSpec::Section { variant },
        GeometrySpec::SectionSteps { a0: 1.0, steps: vec![(0.0, 1.2), (1.0, 0.9)] },
        pulse(vec![1.0, 0.2]),
    )
}

pub fn conservative_product() -> Scenario {
    base(
        "conservative_product",
        PSYS,
        CouplingSpec::Product { b: vec![0.0, 0.2], m: None },
        GeometrySpec::Pieces {
            chart: Chart::Scalar,
            theta_start: 0.0,
            pieces: vec![Piece::Smooth { a: -0.5, b: 0.5, dtheta: 0.3, profile: Profile::CosineRamp }],
        },
        pulse(vec![1.0, 0.2]),
    )
}

pub fn smooth_section() -> Scenario {
    base(
        "smooth_section_S",
        PSYS,
        CouplingSpec::Section { variant: SectionVariant::S },
        GeometrySpec::SectionRamp { a0: 1.0, a1: 1.3, x0: -0.5, x1: 0.5, profile: Profile::CosineRamp },
        pulse(vec![1.0, 0.2]),
    )
}

/// The smooth `[S]` section at horizon 0.5 with a pulse ten times smaller,
/// so that the geometry error dominates the first-order reference's own
/// smearing of the pulse.
pub fn smooth_section_study() -> Scenario {
    let mut sc = smooth_section();
    sc.name = "smooth_section_S_study".into();
    sc.numerics.horizon = 0.5;
    sc.numerics.snapshot_times = vec![0.0, 0.5];
    sc.numerics.h_list = vec![0.2, 0.1, 0.05, 0.025];
    if let InitialSpec::Stationary { patches, .. } = &mut sc.initial {
        for p in patches.iter_mut() {
            p.delta = vec![0.003, 0.005];
        }
    }
    sc
}

/// Kink pipe, arc pipe, section steps under each momentum rule, the
/// conservative product and the smooth `[S]` section.
pub fn standard_suite() -> Vec<Scenario> {
    let mut out = vec![kink_pipe(), arc_pipe()];
    out.extend(SectionVariant::ALL.iter().map(|v| section_step(*v)));
    out.push(conservative_product());
    out.push(smooth_section());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_round_trips_through_toml() {
        for sc in standard_suite() {
            let back = Scenario::from_toml(&sc.to_toml()).unwrap();
            assert_eq!(back, sc);
        }
    }

    #[test]
    fn patch_adds_on_half_open_interval() {
        let d = InitialData::riemann(0.0, State::new(&[1.0]), State::new(&[2.0]));
        let p = apply_patch(d, -1.0, 1.0, &State::new(&[0.5])).unwrap();
        assert_eq!(p.breakpoints, vec![-1.0, 0.0, 1.0]);
        assert_eq!(p.evaluate(-1.0)[0], 1.0);
        assert_eq!(p.evaluate(-0.5)[0], 1.5);
        assert_eq!(p.evaluate(1.0)[0], 2.5);
        assert_eq!(p.evaluate(1.5)[0], 2.0);
    }

    #[test]
    fn version_and_unknown_fields_rejected() {
        let mut sc = kink_pipe();
        sc.schema_version = 7;
        assert!(Scenario::from_toml(&sc.to_toml()).is_err());
        let text = kink_pipe().to_toml().replace("name = ", "nmae = ");
        assert!(Scenario::from_toml(&text).is_err());
    }
}
