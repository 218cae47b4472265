//! ε-approximate wave-front tracking with zero-waves standing at the jumps of
//! the piecewise-constant geometry `ζʰ`.

mod constants;
mod front;
mod trajectory;

pub use constants::presample_interaction_constant;
pub use front::{Front, FrontKind};
pub use trajectory::{l1_distance, EventRecord, FrontSegment, FrontSummary, FunctionalSample, RunStats, Trajectory};

use std::sync::Arc;

use serde::Serialize;

use crate::coupling::{junction_map, CouplingCondition};
use crate::error::{Error, Result};
use crate::geometry::{PiecewiseConstantZeta, ZetaJump};
use crate::model::{FieldKind, HyperbolicModel, Neighborhood};
use crate::riemann::{discretize_rarefaction, solve_generalized_riemann, solve_riemann, RiemannOptions, WaveDecomposition};
use crate::state::State;
use front::{physical_speed, unit_hash};

/// Outgoing waves whose state jump is below this are dropped.
pub const TINY_JUMP: f64 = 1e-14;

/// Tolerance on `Υ(τ+) − Υ(τ−)`.
pub const UPSILON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineParams {
    pub epsilon: f64,
    /// Largest rarefaction wavelet.
    pub delta_r: f64,
    /// Interactions with `|σσ′|` below this use the simplified solvers.
    pub threshold: f64,
    /// Speed of non-physical fronts; `None` derives it from the state box.
    pub lambda_hat: Option<f64>,
    /// Weight of `Q` in `Υ`; `None` presamples it.
    pub glimm_c: Option<f64>,
    pub interaction_cap: usize,
    /// Speed perturbation of physical fronts, as a fraction of `ε` (at most 0.1).
    pub jitter: f64,
    pub seed: u64,
    /// Budget for `TV(u₀) + TV(ζʰ)`.
    pub bv_budget: f64,
    /// Radius of the validated state box, in scaled coordinates.
    pub state_radius: f64,
    pub record_history: bool,
    #[serde(skip)]
    pub riemann: RiemannOptions,
}

impl EngineParams {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            delta_r: epsilon,
            threshold: epsilon * epsilon,
            lambda_hat: None,
            glimm_c: None,
            interaction_cap: 1_000_000,
            jitter: 0.0,
            seed: 0,
            bv_budget: 2.0,
            state_radius: 0.3,
            record_history: true,
            riemann: RiemannOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [self.epsilon, self.delta_r, self.threshold, self.bv_budget, self.state_radius];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("engine parameters must be positive: {self:?}")));
        }
        if !(0.0..=0.1).contains(&self.jitter) {
            return Err(Error::Config(format!("jitter {} outside [0, 0.1]", self.jitter)));
        }
        Ok(())
    }
}

/// Piecewise-constant datum: `states[k]` holds on `(breakpoints[k−1], breakpoints[k]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub breakpoints: Vec<f64>,
    pub states: Vec<State>,
}

impl InitialData {
    pub fn constant(u: State) -> Self {
        Self { breakpoints: Vec::new(), states: vec![u] }
    }

    pub fn riemann(x: f64, left: State, right: State) -> Self {
        Self { breakpoints: vec![x], states: vec![left, right] }
    }

    pub fn steps(breakpoints: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if states.len() != breakpoints.len() + 1 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("step datum needs increasing breakpoints and one more state".into()));
        }
        Ok(Self { breakpoints, states })
    }

    /// Cell-average-free sampling of `f` at the midpoints of `cells` equal
    /// cells on `[a, b]`, constant outside.
    pub fn sampled(f: impl Fn(f64) -> State, a: f64, b: f64, cells: usize) -> Self {
        let dx = (b - a) / cells as f64;
        let breakpoints: Vec<f64> = (0..=cells).map(|k| a + dx * k as f64).collect();
        let mut states = vec![f(a)];
        states.extend((0..cells).map(|k| f(a + dx * (k as f64 + 0.5))));
        states.push(f(b));
        let mut out = Self { breakpoints, states };
        out.merge_equal();
        out
    }

    /// Discrete stationary datum: `u_left` at `−∞`, then `T` applied across
    /// every jump of `ζʰ` in turn, so no wave leaves any junction at `t = 0`.
    pub fn stationary(
        model: &dyn HyperbolicModel,
        cond: &dyn CouplingCondition,
        zeta: &PiecewiseConstantZeta,
        u_left: State,
        opts: &RiemannOptions,
    ) -> Result<Self> {
        let mut breakpoints = Vec::new();
        let mut states = vec![u_left];
        for j in zeta.jumps() {
            let u = junction_map(model, cond, &j.z_plus, &j.z_minus, states.last().unwrap(), &opts.junction)?;
            breakpoints.push(j.x);
            states.push(u);
        }
        Ok(Self { breakpoints, states })
    }

    /// Replaces the datum on `(−∞, x]` by `u`; `x` must lie left of every
    /// existing breakpoint.
    pub fn prepend(mut self, x: f64, u: State) -> Result<Self> {
        if self.breakpoints.first().is_some_and(|&b| b <= x) {
            return Err(Error::Config(format!("prepended jump at {x} is not left of the datum")));
        }
        self.breakpoints.insert(0, x);
        self.states.insert(0, u);
        Ok(self)
    }

    fn merge_equal(&mut self) {
        let mut bp = Vec::new();
        let mut st = vec![self.states[0]];
        for (k, &x) in self.breakpoints.iter().enumerate() {
            if self.states[k + 1] != *st.last().unwrap() {
                bp.push(x);
                st.push(self.states[k + 1]);
            }
        }
        self.breakpoints = bp;
        self.states = st;
    }

    pub fn evaluate(&self, x: f64) -> State {
        self.states[self.breakpoints.partition_point(|&b| b < x)]
    }

    pub fn right_limit(&self, x: f64) -> State {
        self.states[self.breakpoints.partition_point(|&b| b <= x)]
    }

    pub fn total_variation(&self) -> f64 {
        self.states.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlimmFunctionals {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Upsilon")]
    pub upsilon: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// A collision between the fronts at `index` and `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub position: f64,
    pub index: usize,
}

/// The evolving piecewise-constant approximation.
#[derive(Debug, Clone)]
pub struct ApproximateSolution {
    model: Arc<dyn HyperbolicModel>,
    cond: Arc<dyn CouplingCondition>,
    pub zeta: PiecewiseConstantZeta,
    pub junctions: Vec<ZetaJump>,
    pub params: EngineParams,
    pub lambda_hat: f64,
    pub glimm_c: f64,
    pub time: f64,
    pub far_left: State,
    pub fronts: Vec<Front>,
    /// `collision[k]`: meeting time of fronts `k` and `k + 1`.
    collision: Vec<f64>,
    neighborhood: Neighborhood,
    next_id: u64,
    pub interactions: usize,
    pub accurate: usize,
    pub simplified: usize,
    pub initial_tv: f64,
    max_defect: f64,
    /// Segments of fronts that have already been replaced.
    history: Vec<FrontSegment>,
}

impl ApproximateSolution {
    pub fn initialize(
        model: Arc<dyn HyperbolicModel>,
        cond: Arc<dyn CouplingCondition>,
        zeta: PiecewiseConstantZeta,
        u0: &InitialData,
        params: EngineParams,
    ) -> Result<Self> {
        params.validate()?;
        for u in &u0.states {
            model.check(u)?;
        }
        let bv = u0.total_variation() + zeta.total_variation();
        if bv > params.bv_budget {
            return Err(Error::SmallBv(format!(
                "TV(u0) + TV(zeta_h) = {bv} exceeds the budget {}",
                params.bv_budget
            )));
        }
        let far_left = u0.states[0];
        let neighborhood = Neighborhood::new(model.as_ref(), far_left, params.state_radius)?;
        let lambda_hat = match params.lambda_hat {
            Some(l) => l,
            None => neighborhood.lambda_hat(model.as_ref()),
        };
        let junctions = zeta.jumps();
        let glimm_c = match params.glimm_c {
            Some(c) => c,
            None => {
                let pairs: Vec<_> = junctions.iter().map(|j| (j.z_plus, j.z_minus)).collect();
                let amplitude = (u0.total_variation() + zeta.total_variation()).clamp(1e-3, 0.05);
                let c_int = presample_interaction_constant(
                    model.as_ref(),
                    cond.as_ref(),
                    &pairs,
                    &far_left,
                    amplitude,
                    200,
                    params.seed,
                    &params.riemann,
                );
                (2.0 * c_int).max(1.0)
            }
        };
        let mut sol = Self {
            model,
            cond,
            zeta,
            junctions,
            params,
            lambda_hat,
            glimm_c,
            time: 0.0,
            far_left,
            fronts: Vec::new(),
            collision: Vec::new(),
            neighborhood,
            next_id: 0,
            interactions: 0,
            accurate: 0,
            simplified: 0,
            initial_tv: u0.total_variation(),
            max_defect: 0.0,
            history: Vec::new(),
        };

        let mut points: Vec<f64> = u0.breakpoints.clone();
        points.extend(sol.junctions.iter().map(|j| j.x));
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut fronts = Vec::new();
        let mut running = far_left;
        for x in points {
            let ul = running;
            let ur = u0.right_limit(x);
            let junction = sol.junctions.iter().position(|j| j.x == x);
            let dec = match junction {
                Some(k) => {
                    let j = sol.junctions[k];
                    solve_generalized_riemann(sol.model.as_ref(), sol.cond.as_ref(), &j.z_plus, &j.z_minus, &ul, &ur, &sol.params.riemann)?
                }
                None => solve_riemann(sol.model.as_ref(), &ul, &ur, &sol.params.riemann)?,
            };
            let out = sol.emit_decomposition(&dec, junction, x, 0.0, &ul, &ur);
            fronts.extend(out);
            running = ur;
        }
        sol.fronts = fronts;
        for k in 0..sol.fronts.len() {
            sol.check_front(k)?;
        }
        sol.collision = (0..sol.fronts.len().saturating_sub(1)).map(|k| sol.pair_time(k)).collect();
        Ok(sol)
    }

    /// Replaces the front list (kept sorted by the caller) and recomputes
    /// all collision times.
    pub fn set_fronts(&mut self, fronts: Vec<Front>) {
        self.fronts = fronts;
        self.collision = (0..self.fronts.len().saturating_sub(1)).map(|k| self.pair_time(k)).collect();
    }

    /// Positions ordered and states chained from `far_left`.
    pub fn check_consistency(&self) -> Result<()> {
        let mut running = self.far_left;
        let mut last = f64::NEG_INFINITY;
        for f in &self.fronts {
            if f.left != running {
                return Err(Error::Internal(format!("front {} does not continue its left neighbour", f.id)));
            }
            let p = f.position(self.time);
            if p < last - 1e-9 {
                return Err(Error::Internal(format!("front {} out of order at {p}", f.id)));
            }
            last = p;
            running = f.right;
        }
        Ok(())
    }

    pub fn model(&self) -> &dyn HyperbolicModel {
        self.model.as_ref()
    }

    pub fn condition(&self) -> &dyn CouplingCondition {
        self.cond.as_ref()
    }

    fn fresh_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    fn physical(&mut self, family: usize, size: f64, left: State, right: State, x: f64, t: f64) -> Front {
        let kind = FrontKind::of_wave(self.model.as_ref(), family, size);
        let id = self.fresh_id();
        Front { kind, family: Some(family), x0: x, t0: t, speed: 0.0, left, right, size, junction: None, id }
    }

    fn nonphysical(&mut self, left: State, right: State, x: f64, t: f64) -> Front {
        let id = self.fresh_id();
        let size = left.dist(&right);
        Front { kind: FrontKind::NonPhysical, family: None, x0: x, t0: t, speed: self.lambda_hat, left, right, size, junction: None, id }
    }

    fn zero_wave(&mut self, junction: usize, left: State, right: State, t: f64) -> Front {
        let j = self.junctions[junction];
        let id = self.fresh_id();
        Front {
            kind: FrontKind::ZeroWave,
            family: None,
            x0: j.x,
            t0: t,
            speed: 0.0,
            left,
            right,
            size: j.z_plus.dist(&j.z_minus),
            junction: Some(junction),
            id,
        }
    }

    /// Fronts of a (generalized) Riemann solution, rarefactions split into
    /// wavelets of size at most `δ_R`.
    fn emit_decomposition(&mut self, dec: &WaveDecomposition, junction: Option<usize>, x: f64, t: f64, ul: &State, ur: &State) -> Vec<Front> {
        let model = Arc::clone(&self.model);
        let i0 = model.split_index();
        let mut out = Vec::new();
        for (k, w) in dec.waves.iter().enumerate() {
            if junction.is_some() && k == i0 {
                let jj = dec.junction.expect("junction jump present");
                out.push(self.zero_wave(junction.unwrap(), jj.left, jj.right, t));
            }
            if w.size == 0.0 {
                continue;
            }
            let rarefaction = model.field_kind(w.family) == FieldKind::GenuinelyNonlinear && w.size > self.params.delta_r;
            if rarefaction {
                let pieces = discretize_rarefaction(w.size, self.params.delta_r);
                let mut left = w.left;
                for (m, s) in pieces.iter().enumerate() {
                    let right = if m + 1 == pieces.len() {
                        w.right
                    } else {
                        model.rarefaction_curve(w.family, *s, &left).unwrap_or(w.right)
                    };
                    out.push(self.physical(w.family, *s, left, right, x, t));
                    left = right;
                }
            } else {
                out.push(self.physical(w.family, w.size, w.left, w.right, x, t));
            }
        }
        if junction.is_some() && dec.waves.len() == i0 {
            let jj = dec.junction.expect("junction jump present");
            out.push(self.zero_wave(junction.unwrap(), jj.left, jj.right, t));
        }
        self.finalize(out, ul, ur)
    }

    /// Drops negligible physical fronts, re-chains the states exactly from
    /// `ul` to `ur` and assigns speeds.
    fn finalize(&mut self, list: Vec<Front>, ul: &State, ur: &State) -> Vec<Front> {
        let mut kept: Vec<Front> = list
            .into_iter()
            .filter(|f| f.kind == FrontKind::ZeroWave || f.jump() >= TINY_JUMP)
            .collect();
        let mut running = *ul;
        for f in kept.iter_mut() {
            f.left = running;
            running = f.right;
        }
        if let Some(last) = kept.last_mut() {
            last.right = *ur;
        }
        let eps = self.params.epsilon;
        for f in kept.iter_mut() {
            match f.kind {
                FrontKind::ZeroWave => f.speed = 0.0,
                FrontKind::NonPhysical => {
                    f.speed = self.lambda_hat;
                    f.size = f.jump();
                }
                kind => {
                    let s = physical_speed(self.model.as_ref(), kind, f.family.unwrap(), &f.left, &f.right);
                    f.speed = s + self.params.jitter * eps * unit_hash(self.params.seed, f.id);
                }
            }
        }
        kept
    }

    /// Validates a freshly created front: states in the box, speeds below `λ̂`
    /// and the junction condition at zero-waves.
    fn check_front(&mut self, k: usize) -> Result<()> {
        let f = self.fronts[k];
        for u in [f.left, f.right] {
            if !self.neighborhood.contains(self.model.as_ref(), &u) {
                return Err(Error::SmallBv(format!("state {u:?} left the validated neighbourhood")));
            }
        }
        if f.kind.is_physical() && f.speed.abs() >= self.lambda_hat {
            return Err(Error::SmallBv(format!("front speed {} reaches the non-physical speed", f.speed)));
        }
        if let (FrontKind::ZeroWave, Some(j)) = (f.kind, f.junction) {
            let jj = self.junctions[j];
            let xi = self.cond.evaluate(&jj.z_plus, &jj.z_minus, &f.left)?;
            let defect = (self.model.flux(&f.right)? - self.model.flux(&f.left)? - xi).norm();
            self.max_defect = self.max_defect.max(defect);
        }
        Ok(())
    }

    fn pair_time(&self, k: usize) -> f64 {
        let a = &self.fronts[k];
        let b = &self.fronts[k + 1];
        if a.speed <= b.speed {
            return f64::INFINITY;
        }
        let gap = (b.position(self.time) - a.position(self.time)).max(0.0);
        self.time + gap / (a.speed - b.speed)
    }

    /// Earliest collision, leftmost first on ties.
    pub fn next_interaction(&self) -> Option<Event> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &t) in self.collision.iter().enumerate() {
            if t.is_finite() && best.is_none_or(|(_, bt)| t < bt) {
                best = Some((k, t));
            }
        }
        best.map(|(index, time)| {
            let a = &self.fronts[index];
            let b = &self.fronts[index + 1];
            let position = match (a.kind, b.kind) {
                (FrontKind::ZeroWave, _) => a.x0,
                (_, FrontKind::ZeroWave) => b.x0,
                _ => a.position(time),
            };
            Event { time, position, index }
        })
    }

    /// Replaces the colliding pair by the outgoing fronts of the accurate or
    /// simplified solver. Returns the incoming and outgoing fronts.
    pub fn resolve_interaction(&mut self, ev: Event) -> Result<(Vec<Front>, Vec<Front>)> {
        let k = ev.index;
        if k + 1 >= self.fronts.len() {
            return Err(Error::Internal(format!("no front pair at index {k}")));
        }
        self.time = ev.time;
        let a = self.fronts[k];
        let b = self.fronts[k + 1];
        if a.right != b.left {
            return Err(Error::Internal(format!("inconsistent states between fronts {} and {}", a.id, b.id)));
        }
        let outgoing = self.interact(&a, &b, ev.position, ev.time)?;
        self.interactions += 1;
        if self.params.record_history {
            for f in [a, b] {
                self.history.push(FrontSegment { front: f, t1: ev.time });
            }
        }
        let n_old = self.fronts.len();
        let m = outgoing.len();
        self.fronts.splice(k..k + 2, outgoing.iter().copied());
        let n_new = self.fronts.len();
        if m == 0 && k < n_new {
            // everything cancelled: keep the chain of states exact
            let left = if k == 0 { self.far_left } else { self.fronts[k - 1].right };
            self.fronts[k].left = left;
        }
        let old_lo = k.saturating_sub(1);
        let old_hi = (k + 2).min(n_old - 1);
        let new_lo = k.saturating_sub(1);
        let new_hi = (k + m).min(n_new.saturating_sub(1));
        let placeholders = vec![f64::INFINITY; new_hi.saturating_sub(new_lo)];
        self.collision.splice(old_lo..old_hi.max(old_lo), placeholders);
        for p in new_lo..new_hi {
            self.collision[p] = self.pair_time(p);
        }
        debug_assert_eq!(self.collision.len(), n_new.saturating_sub(1));
        for j in k..k + m {
            self.check_front(j)?;
        }
        Ok((vec![a, b], outgoing))
    }

    fn junction_t(&self, junction: usize, u: &State) -> Result<State> {
        let j = self.junctions[junction];
        junction_map(self.model.as_ref(), self.cond.as_ref(), &j.z_plus, &j.z_minus, u, &self.params.riemann.junction)
    }

    fn interact(&mut self, a: &Front, b: &Front, x: f64, t: f64) -> Result<Vec<Front>> {
        use FrontKind::*;
        let model = Arc::clone(&self.model);
        let (ul, ur) = (a.left, b.right);
        let rho = self.params.threshold;
        let out = match (a.kind, b.kind) {
            (NonPhysical, ZeroWave) => {
                let j = b.junction.unwrap();
                let w = self.junction_t(j, &ul)?;
                self.simplified += 1;
                vec![self.zero_wave(j, ul, w, t), self.nonphysical(w, ur, x, t)]
            }
            (NonPhysical, kb) if kb.is_physical() => {
                let fam = b.family.unwrap();
                let w = model.lax_curve(fam, b.size, &ul)?;
                self.simplified += 1;
                vec![self.physical(fam, b.size, ul, w, x, t), self.nonphysical(w, ur, x, t)]
            }
            (ka, ZeroWave) if ka.is_physical() => {
                let j = b.junction.unwrap();
                if (a.size * b.size).abs() >= rho {
                    self.accurate += 1;
                    return self.accurate_junction(j, &ul, &ur, x, t);
                }
                let fam = a.family.unwrap();
                let wm = self.junction_t(j, &ul)?;
                let wr = model.lax_curve(fam, a.size, &wm)?;
                self.simplified += 1;
                vec![self.zero_wave(j, ul, wm, t), self.physical(fam, a.size, wm, wr, x, t), self.nonphysical(wr, ur, x, t)]
            }
            (ZeroWave, kb) if kb.is_physical() => {
                let j = a.junction.unwrap();
                if (a.size * b.size).abs() >= rho {
                    self.accurate += 1;
                    return self.accurate_junction(j, &ul, &ur, x, t);
                }
                let fam = b.family.unwrap();
                let w = model.lax_curve(fam, b.size, &ul)?;
                let wm = self.junction_t(j, &w)?;
                self.simplified += 1;
                vec![self.physical(fam, b.size, ul, w, x, t), self.zero_wave(j, w, wm, t), self.nonphysical(wm, ur, x, t)]
            }
            (ka, kb) if ka.is_physical() && kb.is_physical() => {
                let (i, j) = (a.family.unwrap(), b.family.unwrap());
                if (a.size * b.size).abs() >= rho || i < j {
                    self.accurate += 1;
                    let dec = solve_riemann(model.as_ref(), &ul, &ur, &self.params.riemann)?;
                    return Ok(self.emit_decomposition(&dec, None, x, t, &ul, &ur));
                }
                self.simplified += 1;
                if i > j {
                    let w1 = model.lax_curve(j, b.size, &ul)?;
                    let w2 = model.lax_curve(i, a.size, &w1)?;
                    vec![self.physical(j, b.size, ul, w1, x, t), self.physical(i, a.size, w1, w2, x, t), self.nonphysical(w2, ur, x, t)]
                } else {
                    let s = a.size + b.size;
                    let w = model.lax_curve(i, s, &ul)?;
                    vec![self.physical(i, s, ul, w, x, t), self.nonphysical(w, ur, x, t)]
                }
            }
            _ => {
                return Err(Error::Internal(format!(
                    "fronts {:?} and {:?} cannot approach each other",
                    a.kind, b.kind
                )))
            }
        };
        Ok(self.finalize(out, &ul, &ur))
    }

    fn accurate_junction(&mut self, j: usize, ul: &State, ur: &State, x: f64, t: f64) -> Result<Vec<Front>> {
        let jj = self.junctions[j];
        let dec = solve_generalized_riemann(self.model.as_ref(), self.cond.as_ref(), &jj.z_plus, &jj.z_minus, ul, ur, &self.params.riemann)?;
        Ok(self.emit_decomposition(&dec, Some(j), x, t, ul, ur))
    }

    /// `V`, `Q` and `Υ = V + C Q`. Non-physical fronts count as an extra
    /// family faster than all physical ones.
    pub fn glimm_functionals(&self) -> GlimmFunctionals {
        let model = self.model.as_ref();
        let n = model.dim();
        let i0 = model.split_index();
        let gnl: Vec<bool> = (0..n).map(|i| model.field_kind(i) == FieldKind::GenuinelyNonlinear).collect();
        let mut fam = vec![0.0; n];
        let mut neg = vec![0.0; n];
        let (mut np, mut zw) = (0.0, 0.0);
        let (mut v, mut q) = (0.0, 0.0);
        for f in &self.fronts {
            let w = f.strength();
            v += w;
            match f.kind {
                FrontKind::NonPhysical => np += w,
                FrontKind::ZeroWave => {
                    q += w * (fam[i0..].iter().sum::<f64>() + np);
                    zw += w;
                }
                _ => {
                    let j = f.family.unwrap();
                    let mut partner = np + fam[j + 1..].iter().sum::<f64>();
                    if gnl[j] {
                        partner += if f.size < 0.0 { fam[j] } else { neg[j] };
                    }
                    if j < i0 {
                        partner += zw;
                    }
                    q += w * partner;
                    fam[j] += w;
                    if f.size < 0.0 {
                        neg[j] += w;
                    }
                }
            }
        }
        GlimmFunctionals { v, q, upsilon: v + self.glimm_c * q, c: self.glimm_c }
    }

    pub fn total_variation(&self) -> f64 {
        self.fronts.iter().map(|f| f.jump()).fold(0.0, |a, b| a + b)
    }

    pub fn nonphysical_strength(&self) -> f64 {
        self.fronts.iter().filter(|f| f.kind == FrontKind::NonPhysical).map(|f| f.jump()).fold(0.0, |a, b| a + b)
    }

    /// Runs to `horizon`, logging every interaction.
    pub fn run(mut self, horizon: f64) -> Result<Trajectory> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Config(format!("horizon {horizon} must be positive")));
        }
        let mut g = self.glimm_functionals();
        let mut series = vec![FunctionalSample { time: 0.0, v: g.v, q: g.q, upsilon: g.upsilon }];
        let mut events = Vec::new();
        let mut max_tv = self.total_variation();
        let mut max_np = self.nonphysical_strength();
        let mut max_increase = f64::NEG_INFINITY;
        let mut max_fronts = self.fronts.len();
        while let Some(ev) = self.next_interaction() {
            if ev.time > horizon {
                break;
            }
            if self.interactions >= self.params.interaction_cap {
                return Err(Error::InteractionCap(self.params.interaction_cap));
            }
            let (incoming, outgoing) = self.resolve_interaction(ev)?;
            let after = self.glimm_functionals();
            max_increase = max_increase.max(after.upsilon - g.upsilon);
            g = after;
            max_tv = max_tv.max(self.total_variation());
            max_np = max_np.max(self.nonphysical_strength());
            max_fronts = max_fronts.max(self.fronts.len());
            series.push(FunctionalSample { time: ev.time, v: g.v, q: g.q, upsilon: g.upsilon });
            events.push(EventRecord {
                time: ev.time,
                position: ev.position,
                incoming: incoming.iter().map(FrontSummary::from).collect(),
                outgoing: outgoing.iter().map(FrontSummary::from).collect(),
                v: g.v,
                q: g.q,
                upsilon: g.upsilon,
            });
        }
        self.time = horizon;
        let mut segments = std::mem::take(&mut self.history);
        if self.params.record_history {
            segments.extend(self.fronts.iter().map(|f| FrontSegment { front: *f, t1: horizon }));
        }
        let stats = RunStats {
            interactions: self.interactions,
            accurate: self.accurate,
            simplified: self.simplified,
            initial_tv: self.initial_tv,
            zeta_tv: self.zeta.total_variation(),
            max_tv,
            max_nonphysical: max_np,
            max_upsilon_increase: if events.is_empty() { 0.0 } else { max_increase },
            upsilon_monotone: events.is_empty() || max_increase <= UPSILON_SLACK,
            max_junction_defect: self.max_defect,
            max_fronts,
            glimm_c: self.glimm_c,
            lambda_hat: self.lambda_hat,
        };
        Ok(Trajectory { horizon, far_left: self.far_left, segments, final_fronts: self.fronts, events, series, stats })
    }
}
