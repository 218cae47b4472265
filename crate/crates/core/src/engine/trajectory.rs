use serde::Serialize;

use super::front::{Front, FrontKind};
use crate::error::{Error, Result};
use crate::geometry::PiecewiseConstantZeta;
use crate::state::State;

/// A front over its lifetime `[t0, t1)` (closed at the horizon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontSegment {
    pub front: Front,
    pub t1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSummary {
    pub kind: FrontKind,
    pub family: Option<usize>,
    pub size: f64,
    pub speed: f64,
}

impl From<&Front> for FrontSummary {
    fn from(f: &Front) -> Self {
        Self { kind: f.kind, family: f.family, size: f.size, speed: f.speed }
    }
}

/// One line of the front log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub position: f64,
    pub incoming: Vec<FrontSummary>,
    pub outgoing: Vec<FrontSummary>,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Upsilon")]
    pub upsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalSample {
    pub time: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Upsilon")]
    pub upsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub interactions: usize,
    pub accurate: usize,
    pub simplified: usize,
    pub initial_tv: f64,
    pub zeta_tv: f64,
    pub max_tv: f64,
    /// Largest total non-physical strength seen.
    pub max_nonphysical: f64,
    /// Largest `Υ(τ+) − Υ(τ−)` over all interactions (negative when strictly decreasing).
    pub max_upsilon_increase: f64,
    pub upsilon_monotone: bool,
    pub max_junction_defect: f64,
    pub max_fronts: usize,
    pub glimm_c: f64,
    pub lambda_hat: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub horizon: f64,
    pub far_left: State,
    /// Full front history; empty when history recording was disabled.
    pub segments: Vec<FrontSegment>,
    pub final_fronts: Vec<Front>,
    pub events: Vec<EventRecord>,
    pub series: Vec<FunctionalSample>,
    pub stats: RunStats,
}

impl Trajectory {
    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::OutsideTrajectory { t, end: self.horizon });
        }
        Ok(())
    }

    /// Fronts alive at `t`, ordered left to right.
    pub fn fronts_at(&self, t: f64) -> Result<Vec<(f64, Front)>> {
        self.check_time(t)?;
        if self.segments.is_empty() {
            if t == self.horizon || self.final_fronts.is_empty() {
                return Ok(self.final_fronts.iter().map(|f| (f.position(t), *f)).collect());
            }
            return Err(Error::Config("trajectory was run without history".into()));
        }
        let mut alive: Vec<(f64, Front)> = self
            .segments
            .iter()
            .filter(|s| s.front.t0 <= t && (t < s.t1 || (s.t1 == self.horizon && t == self.horizon)))
            .map(|s| (s.front.position(t), s.front))
            .collect();
        alive.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.speed.total_cmp(&b.1.speed)));
        Ok(alive)
    }

    /// Left-continuous evaluation of the approximate solution at time `t`.
    pub fn sample(&self, t: f64, xs: &[f64]) -> Result<Vec<State>> {
        let alive = self.fronts_at(t)?;
        Ok(xs
            .iter()
            .map(|&x| {
                let k = alive.partition_point(|(p, _)| *p < x);
                if k == 0 {
                    self.far_left
                } else {
                    alive[k - 1].1.right
                }
            })
            .collect())
    }

    /// Exact `∫_a^b w(x) u_c(t, x) dx` for the piecewise-constant profile,
    /// with an optional piecewise-constant weight taken from the first
    /// component of `ζʰ`.
    pub fn integrate(&self, t: f64, a: f64, b: f64, component: usize, weight: Option<&PiecewiseConstantZeta>) -> Result<f64> {
        let alive = self.fronts_at(t)?;
        let mut cuts: Vec<f64> = alive.iter().map(|(p, _)| *p).filter(|p| *p > a && *p < b).collect();
        if let Some(w) = weight {
            cuts.extend(w.breakpoints.iter().copied().filter(|p| *p > a && *p < b));
        }
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for c in cuts.windows(2) {
            let mid = 0.5 * (c[0] + c[1]);
            let k = alive.partition_point(|(p, _)| *p < mid);
            let u = if k == 0 { self.far_left } else { alive[k - 1].1.right };
            let wt = weight.map(|w| w.evaluate(mid)[0]).unwrap_or(1.0);
            total += wt * u[component] * (c[1] - c[0]);
        }
        Ok(total)
    }

    /// Restriction of `u(t)` to `[a, b]` as `(x_start, x_end, state)` pieces.
    /// Cheaper than [`Self::fronts_at`] when the window is small.
    pub fn profile_on(&self, t: f64, a: f64, b: f64) -> Result<Vec<(f64, f64, State)>> {
        self.check_time(t)?;
        let alive = |s: &FrontSegment| s.front.t0 <= t && (t < s.t1 || (s.t1 == self.horizon && t == self.horizon));
        let iter: Box<dyn Iterator<Item = Front>> = if self.segments.is_empty() {
            if t != self.horizon && !self.final_fronts.is_empty() {
                return Err(Error::Config("trajectory was run without history".into()));
            }
            Box::new(self.final_fronts.iter().copied())
        } else {
            Box::new(self.segments.iter().filter(|s| alive(s)).map(|s| s.front))
        };
        let mut left: Option<(f64, f64, State)> = None;
        let mut inside: Vec<(f64, f64, State)> = Vec::new();
        for f in iter {
            let p = f.position(t);
            if p < a {
                if left.map_or(true, |(q, s, _)| (p, f.speed) > (q, s)) {
                    left = Some((p, f.speed, f.right));
                }
            } else if p < b {
                inside.push((p, f.speed, f.right));
            }
        }
        inside.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out = Vec::with_capacity(inside.len() + 1);
        let mut start = a;
        let mut state = left.map_or(self.far_left, |l| l.2);
        for (p, _, r) in inside {
            if p > start {
                out.push((start, p, state));
                start = p;
            }
            state = r;
        }
        out.push((start, b, state));
        Ok(out)
    }

    /// `Σ ‖Δu‖` over the fronts alive at `t`.
    pub fn total_variation(&self, t: f64) -> Result<f64> {
        Ok(self.fronts_at(t)?.iter().map(|(_, f)| f.jump()).fold(0.0, |a, b| a + b))
    }

    /// `∫_a^b ‖u(t,x) − u(s,x)‖ dx`.
    pub fn l1_distance_in_time(&self, t: f64, s: f64, a: f64, b: f64) -> Result<f64> {
        let ft = self.fronts_at(t)?;
        let fs = self.fronts_at(s)?;
        let mut cuts: Vec<f64> = ft.iter().chain(fs.iter()).map(|(p, _)| *p).filter(|p| *p > a && *p < b).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let eval = |alive: &[(f64, Front)], x: f64| {
            let k = alive.partition_point(|(p, _)| *p < x);
            if k == 0 {
                self.far_left
            } else {
                alive[k - 1].1.right
            }
        };
        Ok(cuts
            .windows(2)
            .map(|c| {
                let mid = 0.5 * (c[0] + c[1]);
                eval(&ft, mid).dist(&eval(&fs, mid)) * (c[1] - c[0])
            })
            .sum())
    }
}

/// `∫_a^b ‖u(x) − w(x)‖ dx` between two final profiles.
pub fn l1_distance(u: &Trajectory, w: &Trajectory, t: f64, a: f64, b: f64) -> Result<f64> {
    let fu = u.fronts_at(t)?;
    let fw = w.fronts_at(t)?;
    let mut cuts: Vec<f64> = fu.iter().chain(fw.iter()).map(|(p, _)| *p).filter(|p| *p > a && *p < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let eval = |alive: &[(f64, Front)], far: State, x: f64| {
        let k = alive.partition_point(|(p, _)| *p < x);
        if k == 0 {
            far
        } else {
            alive[k - 1].1.right
        }
    };
    Ok(cuts
        .windows(2)
        .map(|c| {
            let mid = 0.5 * (c[0] + c[1]);
            eval(&fu, u.far_left, mid).dist(&eval(&fw, w.far_left, mid)) * (c[1] - c[0])
        })
        .sum())
}
