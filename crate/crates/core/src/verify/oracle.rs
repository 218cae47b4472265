//! First-order finite-volume reference for smooth geometries.

use serde::Serialize;

use crate::coupling::CouplingCondition;
use crate::engine::{InitialData, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{PiecewiseConstantZeta, ZetaGeometry};
use crate::model::HyperbolicModel;
use crate::state::State;

pub const MAX_CFL: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FvGrid {
    pub a: f64,
    pub b: f64,
    pub cells: usize,
}

impl FvGrid {
    pub fn dx(&self) -> f64 {
        (self.b - self.a) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.a + self.dx() * (i as f64 + 0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FvSolution {
    pub grid: FvGrid,
    pub time: f64,
    pub steps: usize,
    pub cells: Vec<State>,
}

/// Cell averages of a piecewise-constant datum.
pub fn cell_averages(u0: &InitialData, grid: &FvGrid) -> Vec<State> {
    let dx = grid.dx();
    (0..grid.cells)
        .map(|i| {
            let lo = grid.a + dx * i as f64;
            let hi = lo + dx;
            let k0 = u0.breakpoints.partition_point(|&b| b <= lo);
            let k1 = u0.breakpoints.partition_point(|&b| b < hi);
            let mut acc = State::zeros(u0.states[0].dim());
            let mut start = lo;
            for k in k0..k1 {
                let end = u0.breakpoints[k];
                acc += u0.states[k] * (end - start);
                start = end;
            }
            acc += u0.states[k1] * (hi - start);
            acc * (1.0 / dx)
        })
        .collect()
}

/// The geometry sampled at cell centres, as a piecewise-constant `ζ` with
/// jumps on the cell edges. Used to build well-prepared oracle data.
pub fn cell_sampled_zeta(zeta: &ZetaGeometry, grid: &FvGrid) -> PiecewiseConstantZeta {
    let dx = grid.dx();
    let mut breakpoints = Vec::new();
    let mut values = vec![zeta.evaluate(grid.a)];
    for i in 0..grid.cells {
        let z = zeta.evaluate(grid.center(i));
        if z != *values.last().unwrap() {
            breakpoints.push(grid.a + dx * i as f64);
            values.push(z);
        }
    }
    let z = zeta.evaluate(grid.b + 1.0);
    if z != *values.last().unwrap() {
        breakpoints.push(grid.b);
        values.push(z);
    }
    PiecewiseConstantZeta { h: dx, chart: zeta.chart, breakpoints, values, retained: Vec::new() }
}

/// Local Lax–Friedrichs with the centred source `D⁺_v Ξ(ζ, ζ, u) · |μ|'` and
/// transmissive boundaries. Atoms of `ζ` are rejected.
pub fn fv_oracle(
    model: &dyn HyperbolicModel,
    cond: &dyn CouplingCondition,
    zeta: &ZetaGeometry,
    u0: &InitialData,
    grid: FvGrid,
    cfl: f64,
    horizon: f64,
) -> Result<FvSolution> {
    if !(cfl > 0.0 && cfl <= MAX_CFL) {
        return Err(Error::FiniteVolume(format!("CFL {cfl} outside ]0, {MAX_CFL}]")));
    }
    if !(grid.cells >= 2 && grid.b > grid.a && horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::FiniteVolume(format!("bad grid {grid:?} or horizon {horizon}")));
    }
    if !zeta.decomposition().atoms.is_empty() {
        return Err(Error::FiniteVolume("the oracle needs a geometry without jumps".into()));
    }
    let dx = grid.dx();
    let n = grid.cells;
    // source coefficients are time-independent: cache direction and density
    let geometry: Vec<(State, State, f64)> = (0..n)
        .map(|i| {
            let x = grid.center(i);
            let (v, rate) = zeta.density(x);
            (zeta.evaluate(x), v, rate)
        })
        .collect();
    let mut u = cell_averages(u0, &grid);
    let mut t = 0.0;
    let mut steps = 0;
    let mut flux = vec![State::zeros(u[0].dim()); n + 1];
    while t < horizon {
        let mut speed: f64 = 0.0;
        let mut f = Vec::with_capacity(n);
        for (i, ui) in u.iter().enumerate() {
            model.check(ui).map_err(|e| Error::FiniteVolume(format!("cell {i} at t = {t}: {e}")))?;
            let lam = model.eigenvalues(ui);
            speed = speed.max(lam.iter().fold(0.0f64, |m, l| m.max(l.abs())));
            f.push(model.flux_unchecked(ui));
        }
        let mut dt = cfl * dx / speed.max(1e-12);
        if t + dt > horizon {
            dt = horizon - t;
        }
        for k in 0..=n {
            let (l, r) = (k.saturating_sub(1), k.min(n - 1));
            let a = model.eigenvalues(&u[l]).iter().chain(model.eigenvalues(&u[r]).iter()).fold(0.0f64, |m, x| m.max(x.abs()));
            flux[k] = (f[l] + f[r]) * 0.5 - (u[r] - u[l]) * (0.5 * a);
        }
        let mut next = u.clone();
        for i in 0..n {
            next[i] -= (flux[i + 1] - flux[i]) * (dt / dx);
            let (z, v, rate) = &geometry[i];
            if *rate != 0.0 {
                next[i] += cond.dini(z, v, &u[i])? * (dt * rate);
            }
        }
        u = next;
        t += dt;
        steps += 1;
    }
    Ok(FvSolution { grid, time: t, steps, cells: u })
}

impl FvSolution {
    /// Cell containing `x`, clamped to the grid.
    pub fn evaluate(&self, x: f64) -> State {
        let i = ((x - self.grid.a) / self.grid.dx()).floor();
        self.cells[(i.max(0.0) as usize).min(self.grid.cells - 1)]
    }

    /// `∫_a^b ‖u_tr(t) − u_fv‖ dx` with exact splitting at fronts and cell edges.
    pub fn l1_distance_to(&self, tr: &Trajectory, t: f64, a: f64, b: f64) -> Result<f64> {
        let pieces = tr.profile_on(t, a, b)?;
        let dx = self.grid.dx();
        let mut total = 0.0;
        for (pa, pb, u) in pieces {
            let mut x = pa;
            while x < pb {
                let i = ((x - self.grid.a) / dx).floor();
                let edge = if i < 0.0 {
                    self.grid.a
                } else if i >= self.grid.cells as f64 {
                    f64::INFINITY
                } else {
                    self.grid.a + dx * (i + 1.0)
                };
                // guard against rounding that would stall on an edge
                let end = if edge <= x { x + dx } else { edge }.min(pb);
                total += u.dist(&self.evaluate(0.5 * (x + end))) * (end - x);
                x = end;
            }
        }
        Ok(total)
    }

    /// `∫_a^b ‖u − w‖ dx` against another solution on any grid, midpoint-sampled on the finer one.
    pub fn l1_distance(&self, other: &FvSolution, a: f64, b: f64) -> f64 {
        let dx = self.grid.dx().min(other.grid.dx());
        let m = ((b - a) / dx).ceil() as usize;
        let h = (b - a) / m as f64;
        (0..m).map(|k| {
            let x = a + h * (k as f64 + 0.5);
            self.evaluate(x).dist(&other.evaluate(x)) * h
        }).sum()
    }
}
