//! Scenario ingestion and artifact writing for the `pipeflow` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use pipeflow::coupling::check_table_a;
use pipeflow::engine::{EventRecord, FrontSummary, FunctionalSample, Trajectory};
use pipeflow::geometry::build_zeta_h;
use pipeflow::model::{GammaLaw, HyperbolicModel};
use pipeflow::riemann::{solve_generalized_riemann, RiemannOptions};
use pipeflow::scenario::{InitialSpec, ModelSpec, Scenario};
use pipeflow::verify::{convergence_study, scenario_oracle, FvSolution, Reference};
use pipeflow::{ErrorClass, State};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pipeflow::Error),
    #[error("output directory {0} already exists (use --force to replace it)")]
    OutputExists(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 configuration, 3 small-BV violation, 4 solver failure, 5 interaction cap, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::SmallBv => 3,
                ErrorClass::Solver => 4,
                ErrorClass::Cap => 5,
            },
            CliError::OutputExists(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Reads and validates a scenario; `seed` overrides the configured one.
pub fn load_scenario(path: &Path, seed: Option<u64>) -> CliResult<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        // a missing config is a configuration error, not an I/O fault
        std::io::ErrorKind::NotFound => CliError::Core(pipeflow::Error::Config(format!("{}: not found", path.display()))),
        _ => CliError::Io { path: path.to_path_buf(), source: e },
    })?;
    let mut sc = Scenario::from_toml(&text)?;
    if let Some(s) = seed {
        sc.numerics.seed = s;
    }
    Ok(sc)
}

/// Artifacts are collected in memory and written only once the run has
/// succeeded, so failures never leave partial output.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn write(&self, dir: &Path, force: bool) -> CliResult<()> {
        if dir.exists() {
            if !force {
                return Err(CliError::OutputExists(dir.to_path_buf()));
            }
            fs::remove_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (name, body) in &self.files {
            let p = dir.join(name);
            fs::write(&p, body).map_err(io_err(&p))?;
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(x: f64, u: &State) -> String {
    let mut s = num(x);
    for v in u.iter() {
        s.push(',');
        s.push_str(&num(*v));
    }
    s.push('\n');
    s
}

fn header(first: &str, model: &dyn HyperbolicModel) -> String {
    format!("{first},{}\n", model.component_names().join(","))
}

/// Per-run summary shared by `simulate` and the levels of `converge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub h: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub horizon: f64,
    pub tv_max: f64,
    pub upsilon_monotone: bool,
    pub junction_defect_max: f64,
    pub max_nonphysical: f64,
    pub interactions: usize,
    // not tracked per level by refinement studies
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_upsilon_increase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_fronts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunSummary {
    pub fn new(sc: &Scenario, h: f64, tr: &Trajectory, wall_time_s: f64) -> Self {
        let s = &tr.stats;
        Self {
            scenario: sc.name.clone(),
            h,
            epsilon: sc.epsilon_for(h),
            seed: sc.numerics.seed,
            horizon: tr.horizon,
            tv_max: s.max_tv,
            upsilon_monotone: s.upsilon_monotone,
            junction_defect_max: s.max_junction_defect,
            max_nonphysical: s.max_nonphysical,
            interactions: s.interactions,
            max_upsilon_increase: Some(s.max_upsilon_increase),
            final_fronts: Some(tr.final_fronts.len()),
            wall_time_s: Some(wall_time_s),
        }
    }
}

fn window_points(sc: &Scenario) -> Vec<f64> {
    let (a, b) = sc.window();
    let n = sc.numerics.snapshot_points;
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// JSON-lines front log. The first lines have `time = 0` and no incoming
/// fronts: one per initial breakpoint, listing the fronts it emits. Every
/// further line is one interaction.
pub fn front_log(tr: &Trajectory) -> CliResult<String> {
    let mut births: Vec<EventRecord> = Vec::new();
    let g = tr.series.first().copied().unwrap_or(FunctionalSample { time: 0.0, v: 0.0, q: 0.0, upsilon: 0.0 });
    for (x, f) in tr.fronts_at(0.0)? {
        match births.last_mut() {
            Some(b) if b.position == x => b.outgoing.push(FrontSummary::from(&f)),
            _ => births.push(EventRecord {
                time: 0.0,
                position: x,
                incoming: Vec::new(),
                outgoing: vec![FrontSummary::from(&f)],
                v: g.v,
                q: g.q,
                upsilon: g.upsilon,
            }),
        }
    }
    let mut s = String::new();
    for e in births.iter().chain(&tr.events) {
        s.push_str(&serde_json::to_string(e).expect("events serialize"));
        s.push('\n');
    }
    Ok(s)
}

pub fn functional_series(tr: &Trajectory) -> String {
    let mut s = String::from("time,V,Q,Upsilon\n");
    for f in &tr.series {
        let _ = writeln!(s, "{},{},{},{}", num(f.time), num(f.v), num(f.q), num(f.upsilon));
    }
    s
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("summaries serialize");
    s.push('\n');
    s
}

pub fn simulate(sc: &Scenario) -> CliResult<Artifacts> {
    let start = Instant::now();
    let setup = sc.setup()?;
    let h = sc.numerics.h;
    let (_, tr) = sc.run(&setup, h)?;
    let xs = window_points(sc);
    let mut out = Artifacts::default();
    let mut snapshots = Vec::new();
    for (k, &t) in sc.numerics.snapshot_times.iter().enumerate() {
        let mut body = header("x", setup.model.as_ref());
        for (x, u) in xs.iter().zip(tr.sample(t, &xs)?) {
            body.push_str(&csv_row(*x, &u));
        }
        let name = format!("snapshot_{k:03}.csv");
        snapshots.push(json!({ "time": t, "file": name }));
        out.add(name, body);
    }
    out.add("fronts.jsonl", front_log(&tr)?);
    out.add("functionals.csv", functional_series(&tr));
    let summary = RunSummary::new(sc, h, &tr, start.elapsed().as_secs_f64());
    let mut value = serde_json::to_value(&summary).expect("summary serializes");
    value["snapshots"] = json!(snapshots);
    out.add("summary.json", to_json(&value));
    Ok(out)
}

/// Solves the generalized Riemann problem of a `riemann` datum at its
/// breakpoint, with the geometry's one-sided values there.
pub fn riemann(sc: &Scenario) -> CliResult<Artifacts> {
    let InitialSpec::Riemann { x, left, right } = &sc.initial else {
        return Err(pipeflow::Error::Config("the riemann command needs an initial datum of type \"riemann\"".into()).into());
    };
    let setup = sc.setup()?;
    let m = setup.model.as_ref();
    let (ul, ur) = (State::new(left), State::new(right));
    let (zm, zp) = (setup.zeta.evaluate(*x), setup.zeta.right_limit(*x));
    let dec = solve_generalized_riemann(m, setup.cond.as_ref(), &zp, &zm, &ul, &ur, &RiemannOptions::default())?;
    let waves: Vec<_> = dec
        .waves
        .iter()
        .map(|w| {
            json!({
                "family": w.family, "kind": w.kind, "size": w.size,
                "left": w.left.as_slice(), "right": w.right.as_slice(),
                "speed_left": w.speed_left, "speed_right": w.speed_right,
            })
        })
        .collect();
    let junction = dec.junction.map(|j| {
        json!({ "z_minus": j.z_minus.as_slice(), "z_plus": j.z_plus.as_slice(), "left": j.left.as_slice(), "right": j.right.as_slice() })
    });
    let report = json!({
        "scenario": sc.name, "x": x, "waves": waves, "junction": junction,
        "states": dec.states.iter().map(|s| s.as_slice().to_vec()).collect::<Vec<_>>(),
        "residual": dec.residual,
    });
    // self-similar profile u(ξ) on a fan-covering range of ξ = (x − x₀)/t
    let reach = dec.waves.iter().flat_map(|w| [w.speed_left.abs(), w.speed_right.abs()]).fold(0.0f64, f64::max);
    let span = 1.5 * reach.max(1e-3);
    let n = sc.numerics.snapshot_points;
    let mut body = header("xi", m);
    for k in 0..n {
        let xi = -span + 2.0 * span * k as f64 / (n - 1) as f64;
        body.push_str(&csv_row(xi, &dec.sample(m, xi)?));
    }
    let mut out = Artifacts::default();
    out.add("riemann.json", to_json(&report));
    out.add("profile.csv", body);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub scenario: String,
    pub reference: String,
    pub time: f64,
    pub window: (f64, f64),
    pub distances: Vec<f64>,
    pub monotone: bool,
    pub ratio: f64,
    pub levels: Vec<RunSummary>,
}

pub fn converge(sc: &Scenario, reference: Reference) -> CliResult<Artifacts> {
    let h_list = if sc.numerics.h_list.is_empty() { vec![sc.numerics.h, 0.5 * sc.numerics.h] } else { sc.numerics.h_list.clone() };
    let rep = convergence_study(sc, &h_list, reference)?;
    let levels = rep
        .rows
        .iter()
        .map(|r| RunSummary {
            scenario: sc.name.clone(),
            h: r.h,
            epsilon: r.epsilon,
            seed: sc.numerics.seed,
            horizon: rep.time,
            tv_max: r.tv_max,
            upsilon_monotone: r.upsilon_monotone,
            junction_defect_max: r.junction_defect_max,
            max_nonphysical: r.max_nonphysical,
            interactions: r.interactions,
            max_upsilon_increase: None,
            final_fronts: None,
            wall_time_s: None,
        })
        .collect();
    let summary = StudySummary {
        scenario: sc.name.clone(),
        reference: serde_json::to_value(reference).expect("enum serializes").as_str().unwrap_or_default().to_string(),
        time: rep.time,
        window: rep.window,
        distances: rep.distances(),
        monotone: rep.monotone,
        ratio: rep.ratio,
        levels,
    };
    let mut out = Artifacts::default();
    out.add("study.csv", rep.to_csv());
    out.add("summary.json", to_json(&summary));
    Ok(out)
}

/// Reads the `summary.json` of any `simulate` run directory.
pub fn read_run_summary(dir: &Path) -> CliResult<RunSummary> {
    let p = dir.join("summary.json");
    let text = fs::read_to_string(&p).map_err(io_err(&p))?;
    serde_json::from_str(&text).map_err(|e| pipeflow::Error::Config(format!("{}: {e}", p.display())).into())
}

pub fn table_a(samples: usize, seed: u64) -> CliResult<Artifacts> {
    let rows = check_table_a(GammaLaw::default(), samples, seed)?;
    let mut body = String::from("variant,a,rho,q,finite_difference,formula,relative_error\n");
    for r in &rows {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{}",
            r.variant.label(),
            num(r.a),
            num(r.rho),
            num(r.q),
            num(r.finite_difference),
            num(r.formula),
            num(r.relative_error)
        );
    }
    let worst = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    let summary = json!({ "samples": samples, "seed": seed, "rows": rows.len(), "max_relative_error": worst, "pass": worst <= 1e-6 });
    let mut out = Artifacts::default();
    out.add("table_a.csv", body);
    out.add("summary.json", to_json(&summary));
    Ok(out)
}

/// Finite-volume reference at the horizon, and its L¹ distance to front
/// tracking at the scenario's `h`.
pub fn oracle(sc: &Scenario) -> CliResult<Artifacts> {
    let setup = sc.setup()?;
    let fv: FvSolution = scenario_oracle(sc, &setup)?;
    let (_, tr) = sc.run(&setup, sc.numerics.h)?;
    let (a, b) = sc.window();
    let distance = fv.l1_distance_to(&tr, sc.numerics.horizon, a, b)?;
    let mut body = header("x", setup.model.as_ref());
    for (i, u) in fv.cells.iter().enumerate() {
        body.push_str(&csv_row(fv.grid.center(i), u));
    }
    let summary = json!({
        "scenario": sc.name, "time": fv.time, "steps": fv.steps, "grid": fv.grid,
        "h": sc.numerics.h, "epsilon": sc.epsilon_for(sc.numerics.h), "l1_distance": distance, "window": [a, b],
    });
    let mut out = Artifacts::default();
    out.add("oracle.csv", body);
    out.add("summary.json", to_json(&summary));
    Ok(out)
}

/// Checks that a config resolves without running anything heavy.
pub fn describe(sc: &Scenario) -> CliResult<String> {
    let setup = sc.setup()?;
    let zh = build_zeta_h(&setup.zeta, sc.numerics.h)?;
    let model = match sc.model {
        ModelSpec::PSystem { .. } => "p-system",
        ModelSpec::Euler { .. } => "euler",
    };
    Ok(format!("{}: {model}, {}, {} junctions at h = {}", sc.name, setup.cond.name(), zh.jumps().len(), sc.numerics.h))
}
