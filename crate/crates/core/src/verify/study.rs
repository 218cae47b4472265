//! Refinement studies: successive distances `‖u^{hᵢ}(T) − u^{hᵢ₊₁}(T)‖`
//! or distances to the finite-volume reference.

use rayon::prelude::*;
use serde::Serialize;

use super::oracle::{cell_sampled_zeta, fv_oracle, FvGrid, FvSolution, MAX_CFL};
use crate::engine::{l1_distance, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{build_zeta_h, PiecewiseConstantZeta};
use crate::scenario::{InitialSpec, Scenario, Setup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Distance to the next finer level.
    Successive,
    /// Distance to the finite-volume reference.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub h: f64,
    pub epsilon: f64,
    /// `None` for the finest level of a successive study.
    pub distance: Option<f64>,
    pub tv_max: f64,
    pub upsilon_final: f64,
    pub junction_defect_max: f64,
    pub interactions: usize,
    pub max_nonphysical: f64,
    pub upsilon_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub scenario: String,
    pub reference: Reference,
    pub time: f64,
    pub window: (f64, f64),
    pub rows: Vec<StudyRow>,
    /// Every available distance is below the previous one.
    pub monotone: bool,
    /// last distance / first distance.
    pub ratio: f64,
}

impl StudyReport {
    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.distance).collect()
    }

    /// `h,epsilon,distance,tv_max,upsilon_final,junction_defect_max`, with an
    /// empty distance cell where none applies.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,epsilon,distance,tv_max,upsilon_final,junction_defect_max\n");
        for r in &self.rows {
            let d = r.distance.map(|d| format!("{d:.16e}")).unwrap_or_default();
            s.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}\n",
                r.h, r.epsilon, d, r.tv_max, r.upsilon_final, r.junction_defect_max
            ));
        }
        s
    }
}

/// Reference solution started from the scenario datum on the cell-sampled
/// geometry. The grid covers the active region (geometry, disturbances and
/// their domain of influence up to the horizon) inside the window; outside
/// it the solution is constant and cells are extended by clamping.
pub fn scenario_oracle(scenario: &Scenario, setup: &Setup) -> Result<FvSolution> {
    let (wa, wb) = scenario.window();
    let (a, b) = active_region(scenario, setup)?;
    let grid = FvGrid { a: a.max(wa - 1.0), b: b.min(wb + 1.0), cells: scenario.numerics.oracle_cells };
    let zc = cell_sampled_zeta(&setup.zeta, &grid);
    let u0 = scenario.initial_data(setup, &zc)?;
    fv_oracle(setup.model.as_ref(), setup.cond.as_ref(), &setup.zeta, &u0, grid, MAX_CFL, scenario.numerics.horizon)
}

fn active_region(scenario: &Scenario, setup: &Setup) -> Result<(f64, f64)> {
    let mut marks: Vec<f64> = setup.zeta.extent().map(|(a, b)| vec![a, b]).unwrap_or_default();
    match &scenario.initial {
        InitialSpec::Constant { .. } => {}
        InitialSpec::Riemann { x, .. } => marks.push(*x),
        InitialSpec::Steps { breakpoints, .. } => marks.extend(breakpoints),
        InitialSpec::Stationary { incoming, patches, .. } => {
            marks.extend(incoming.iter().map(|i| i.x));
            marks.extend(patches.iter().flat_map(|p| [p.a, p.b]));
        }
    }
    if marks.is_empty() {
        marks.push(0.0);
    }
    let zh = build_zeta_h(&setup.zeta, scenario.h_max())?;
    let u0 = scenario.initial_data(setup, &zh)?;
    let speed = u0
        .states
        .iter()
        .flat_map(|u| setup.model.eigenvalues(u).iter().copied().collect::<Vec<_>>())
        .fold(0.0f64, |m, l| m.max(l.abs()));
    let margin = 1.5 * speed * scenario.numerics.horizon + 0.5;
    let lo = marks.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = marks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo - margin, hi + margin))
}

fn row(h: f64, epsilon: f64, tr: &Trajectory) -> StudyRow {
    StudyRow {
        h,
        epsilon,
        distance: None,
        tv_max: tr.stats.max_tv,
        upsilon_final: tr.series.last().map_or(0.0, |s| s.upsilon),
        junction_defect_max: tr.stats.max_junction_defect,
        interactions: tr.stats.interactions,
        max_nonphysical: tr.stats.max_nonphysical,
        upsilon_monotone: tr.stats.upsilon_monotone,
    }
}

/// Runs every level concurrently (`ε = h²` unless the scenario fixes it for
/// its own `h`) and measures the distances at the horizon.
pub fn convergence_study(scenario: &Scenario, h_list: &[f64], reference: Reference) -> Result<StudyReport> {
    if h_list.is_empty() || h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Config("h list must be non-empty and positive".into()));
    }
    if reference == Reference::Successive && h_list.len() < 2 {
        return Err(Error::Config("a successive study needs at least two levels".into()));
    }
    let setup = scenario.setup()?;
    let runs: Vec<(PiecewiseConstantZeta, Trajectory)> =
        h_list.par_iter().map(|&h| scenario.run(&setup, h)).collect::<Result<Vec<_>>>()?;
    let t = scenario.numerics.horizon;
    let window = scenario.window();
    let mut rows: Vec<StudyRow> =
        h_list.iter().zip(&runs).map(|(&h, (_, tr))| row(h, scenario.epsilon_for(h), tr)).collect();
    match reference {
        Reference::Successive => {
            for k in 0..runs.len() - 1 {
                rows[k].distance = Some(l1_distance(&runs[k].1, &runs[k + 1].1, t, window.0, window.1)?);
            }
        }
        Reference::Oracle => {
            let fv = scenario_oracle(scenario, &setup)?;
            for (r, (_, tr)) in rows.iter_mut().zip(&runs) {
                r.distance = Some(fv.l1_distance_to(tr, t, window.0, window.1)?);
            }
        }
    }
    let d: Vec<f64> = rows.iter().filter_map(|r| r.distance).collect();
    let monotone = d.windows(2).all(|w| w[1] < w[0]);
    let ratio = match (d.first(), d.last()) {
        (Some(&f), Some(&l)) if f > 0.0 => l / f,
        _ => 0.0,
    };
    if !monotone {
        log::warn!("{}: distances {:?} are not monotone", scenario.name, d);
    }
    Ok(StudyReport { scenario: scenario.name.clone(), reference, time: t, window, rows, monotone, ratio })
}
