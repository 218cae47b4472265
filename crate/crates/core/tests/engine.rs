use std::sync::Arc;

use approx::assert_relative_eq;
use pipeflow::coupling::{CouplingCondition, KinkCondition, SectionCondition, SectionGas, SectionVariant};
use pipeflow::engine::{ApproximateSolution, EngineParams, Front, FrontKind, InitialData};
use pipeflow::geometry::{build_zeta_h, curved_pipe_geometry, section_steps, Chart, PipeSegment, ZetaGeometry};
use pipeflow::model::{GammaLaw, HyperbolicModel, PSystem};
use pipeflow::riemann::{solve_generalized_riemann, solve_riemann, RiemannOptions};
use pipeflow::State;
use proptest::prelude::*;

fn psys() -> Arc<dyn HyperbolicModel> {
    Arc::new(PSystem::new(GammaLaw::default()))
}

fn drag() -> Arc<dyn CouplingCondition> {
    Arc::new(KinkCondition::drag(0.5).unwrap())
}

fn flat(h: f64) -> pipeflow::geometry::PiecewiseConstantZeta {
    build_zeta_h(&ZetaGeometry::constant(Chart::UnitTangent, 0.0), h).unwrap()
}

fn params(eps: f64) -> EngineParams {
    EngineParams { glimm_c: Some(2.0), ..EngineParams::new(eps) }
}

#[test]
fn constant_data_has_no_fronts() {
    let u = PSystem::state(1.0, 0.2);
    let sol = ApproximateSolution::initialize(psys(), drag(), flat(0.2), &InitialData::constant(u), params(0.01)).unwrap();
    assert!(sol.fronts.is_empty());
    let tr = sol.run(1.0).unwrap();
    assert!(tr.events.is_empty());
    assert_eq!(tr.series.len(), 1);
    assert_eq!(tr.sample(0.5, &[-3.0, 0.0, 3.0]).unwrap(), vec![u; 3]);
}

#[test]
fn riemann_datum_gives_classical_fan() {
    let model = psys();
    let ul = PSystem::state(1.0, 0.2);
    let ur = PSystem::state(0.95, 0.1);
    let sol = ApproximateSolution::initialize(model.clone(), drag(), flat(0.2), &InitialData::riemann(0.0, ul, ur), params(0.01)).unwrap();
    let dec = solve_riemann(model.as_ref(), &ul, &ur, &RiemannOptions::default()).unwrap();
    let physical: f64 = sol.fronts.iter().map(|f| f.size).sum();
    assert_relative_eq!(physical, dec.sizes().iter().sum::<f64>(), epsilon = 1e-12);
    for f in &sol.fronts {
        assert!(f.kind.is_physical());
        if f.kind == FrontKind::Rarefaction {
            assert!(f.size > 0.0 && f.size <= 0.01 + 1e-15);
        }
    }
    sol.check_consistency().unwrap();
    // a single fan never interacts with itself
    let tr = sol.run(1.0).unwrap();
    assert_eq!(tr.stats.interactions, 0);
}

#[test]
fn single_junction_installs_zero_wave() {
    let model = psys();
    let cond = drag();
    let geom = curved_pipe_geometry(0.0, 0.0, &[PipeSegment::Kink { angle: 0.3 }]).unwrap();
    let zh = build_zeta_h(&geom, 0.1).unwrap();
    let u = PSystem::state(1.0, 0.2);
    let sol = ApproximateSolution::initialize(model.clone(), cond.clone(), zh.clone(), &InitialData::constant(u), params(0.01)).unwrap();
    let zw: Vec<&Front> = sol.fronts.iter().filter(|f| f.kind == FrontKind::ZeroWave).collect();
    assert_eq!(zw.len(), 1);
    assert_eq!(zw[0].speed, 0.0);
    assert_eq!(zw[0].x0, 0.0);
    let j = zh.jumps()[0];
    let dec = solve_generalized_riemann(model.as_ref(), cond.as_ref(), &j.z_plus, &j.z_minus, &u, &u, &RiemannOptions::default()).unwrap();
    let total: f64 = sol.fronts.iter().filter(|f| f.kind.is_physical()).map(|f| f.size).sum();
    assert_relative_eq!(total, dec.sizes().iter().sum::<f64>(), epsilon = 1e-12);
    for f in &sol.fronts {
        if f.kind.is_physical() {
            assert_eq!(f.speed < 0.0, f.family == Some(0));
        }
    }
}

#[test]
fn collision_time_of_two_shocks() {
    let model = psys();
    let u = PSystem::state(1.0, 0.0);
    let mut sol = ApproximateSolution::initialize(model.clone(), drag(), flat(0.2), &InitialData::constant(u), params(0.01)).unwrap();
    let w1 = model.lax_curve(1, -0.05, &u).unwrap();
    let w2 = model.lax_curve(1, -0.05, &w1).unwrap();
    let s1 = model.shock_speed(1, &u, &w1).unwrap();
    let s2 = model.shock_speed(1, &w1, &w2).unwrap();
    assert!(s1 > s2);
    let mk = |x0: f64, left: State, right: State, speed: f64, id| Front {
        kind: FrontKind::Shock,
        family: Some(1),
        x0,
        t0: 0.0,
        speed,
        left,
        right,
        size: -0.05,
        junction: None,
        id,
    };
    sol.set_fronts(vec![mk(0.0, u, w1, s1, 1), mk(0.3, w1, w2, s2, 2)]);
    let ev = sol.next_interaction().unwrap();
    assert_relative_eq!(ev.time, 0.3 / (s1 - s2), epsilon = 1e-14);
    assert_eq!(ev.index, 0);
    // approaching same-family shocks: Q is the product of the strengths
    let g = sol.glimm_functionals();
    assert_relative_eq!(g.q, 0.05 * 0.05, epsilon = 1e-16);
    assert_relative_eq!(g.v, 0.1, epsilon = 1e-16);
    // diverging fronts never meet
    let r = model.lax_curve(1, 0.005, &w2).unwrap();
    let sr = model.lambda(1, &r);
    sol.set_fronts(vec![mk(0.0, u, w1, s1, 1), Front { kind: FrontKind::Rarefaction, size: 0.005, speed: sr.max(s1 + 0.1), ..mk(0.3, w1, r, 0.0, 2) }]);
    assert!(sol.next_interaction().is_none());
}

#[test]
fn nonphysical_fronts_never_meet() {
    let u = PSystem::state(1.0, 0.0);
    let mut sol = ApproximateSolution::initialize(psys(), drag(), flat(0.2), &InitialData::constant(u), params(0.01)).unwrap();
    let lh = sol.lambda_hat;
    let a = PSystem::state(1.001, 0.0);
    let b = PSystem::state(1.002, 0.0);
    let np = |x0: f64, left: State, right: State, id| Front {
        kind: FrontKind::NonPhysical,
        family: None,
        x0,
        t0: 0.0,
        speed: lh,
        left,
        right,
        size: left.dist(&right),
        junction: None,
        id,
    };
    sol.set_fronts(vec![np(0.0, u, a, 1), np(1.0, a, b, 2)]);
    assert!(sol.next_interaction().is_none());
}

#[test]
fn glimm_total_strength_includes_zero_waves() {
    let model = psys();
    let geom = curved_pipe_geometry(0.0, 0.0, &[PipeSegment::Kink { angle: 0.3 }]).unwrap();
    let zh = build_zeta_h(&geom, 0.1).unwrap();
    let u = PSystem::state(1.0, 0.0);
    let mut sol = ApproximateSolution::initialize(model, drag(), zh, &InitialData::constant(u), params(0.01)).unwrap();
    let base = Front {
        kind: FrontKind::Shock,
        family: Some(0),
        x0: -1.0,
        t0: 0.0,
        speed: -1.0,
        left: u,
        right: u,
        size: -0.1,
        junction: None,
        id: 1,
    };
    let zw = Front { kind: FrontKind::ZeroWave, family: None, x0: 0.0, speed: 0.0, size: 0.2, junction: Some(0), id: 2, ..base };
    let r = Front { kind: FrontKind::Rarefaction, family: Some(1), x0: 1.0, speed: 1.0, size: 0.05, id: 3, ..base };
    sol.set_fronts(vec![base, zw, r]);
    let g = sol.glimm_functionals();
    assert_relative_eq!(g.v, 0.35, epsilon = 1e-15);
    // both physical fronts move away from the junction
    assert_eq!(g.q, 0.0);
}

#[test]
fn wave_reaches_junction_exactly_there() {
    let model = psys();
    let cond = drag();
    let geom = curved_pipe_geometry(0.0, 0.0, &[PipeSegment::Kink { angle: 0.2 }]).unwrap();
    let zh = build_zeta_h(&geom, 0.1).unwrap();
    let u = PSystem::state(1.0, 0.2);
    let ul = model.lax_curve(1, -0.05, &u).unwrap();
    let opts = RiemannOptions::default();
    let u0 = InitialData::stationary(model.as_ref(), cond.as_ref(), &zh, u, &opts).unwrap().prepend(-0.7, ul).unwrap();
    let sol = ApproximateSolution::initialize(model, cond, zh, &u0, params(0.01)).unwrap();
    let ev = sol.next_interaction().unwrap();
    assert_eq!(ev.position, 0.0);
    let tr = sol.run(2.0).unwrap();
    assert!(tr.stats.upsilon_monotone);
    assert!(tr.stats.max_junction_defect < 1e-10);
    assert!(tr.events.iter().all(|e| e.time > 0.0));
}

#[test]
fn sampling_is_left_continuous() {
    let model = psys();
    let ul = PSystem::state(1.0, 0.3);
    let ur = PSystem::state(1.0, 0.0);
    let sol = ApproximateSolution::initialize(model, drag(), flat(0.2), &InitialData::riemann(0.0, ul, ur), params(0.01)).unwrap();
    let tr = sol.run(0.5).unwrap();
    let fronts = tr.fronts_at(0.5).unwrap();
    let (p, f) = fronts.last().unwrap();
    assert_eq!(tr.sample(0.5, &[*p]).unwrap()[0], f.left);
    assert_eq!(tr.sample(0.5, &[*p + 1e-9]).unwrap()[0], f.right);
    assert!(tr.sample(0.6, &[0.0]).is_err());
}

#[test]
fn small_bv_budget_is_enforced() {
    let ul = PSystem::state(1.0, 0.0);
    let ur = PSystem::state(1.5, 0.0);
    let p = EngineParams { bv_budget: 0.1, ..params(0.01) };
    let err = ApproximateSolution::initialize(psys(), drag(), flat(0.2), &InitialData::riemann(0.0, ul, ur), p).unwrap_err();
    assert_eq!(err.class(), pipeflow::ErrorClass::SmallBv);
}

#[test]
fn section_steps_keep_mass_flux_at_junctions() {
    let model = psys();
    let cond: Arc<dyn CouplingCondition> = Arc::new(SectionCondition::new(SectionVariant::P, SectionGas::Isentropic(GammaLaw::default())));
    let geom = section_steps(1.0, &[(0.0, 1.2), (0.5, 1.0)]).unwrap();
    let zh = build_zeta_h(&geom, 0.1).unwrap();
    let u = PSystem::state(1.0, 0.2);
    let ul = model.lax_curve(1, -0.04, &u).unwrap();
    let opts = RiemannOptions::default();
    let u0 = InitialData::stationary(model.as_ref(), cond.as_ref(), &zh, u, &opts).unwrap().prepend(-0.5, ul).unwrap();
    let sol = ApproximateSolution::initialize(model, cond, zh.clone(), &u0, params(0.01)).unwrap();
    let tr = sol.run(1.5).unwrap();
    for f in tr.final_fronts.iter().filter(|f| f.kind == FrontKind::ZeroWave) {
        let j = zh.jumps()[f.junction.unwrap()];
        assert_relative_eq!(j.z_plus[0] * f.right[1], j.z_minus[0] * f.left[1], epsilon = 1e-12);
    }
    assert!(tr.stats.upsilon_monotone, "{:?}", tr.stats);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_small_data_stay_consistent(
        rho in 0.9f64..1.1, v in -0.2f64..0.2, drho in -0.05f64..0.05, dv in -0.05f64..0.05, angle in -0.3f64..0.3,
    ) {
        let model = psys();
        let cond = drag();
        let geom = curved_pipe_geometry(0.3, 0.0, &[PipeSegment::Kink { angle }]).unwrap();
        let zh = build_zeta_h(&geom, 0.1).unwrap();
        let ul = PSystem::state(rho + drho, v + dv);
        let ur = PSystem::state(rho, v);
        let sol = ApproximateSolution::initialize(model, cond, zh, &InitialData::riemann(0.0, ul, ur), params(0.02)).unwrap();
        sol.check_consistency().unwrap();
        let tr = sol.run(1.0).unwrap();
        prop_assert!(tr.stats.upsilon_monotone, "{:?}", tr.stats);
        prop_assert!(tr.stats.max_junction_defect < 1e-10);
        // far-field states never change
        let far = tr.sample(1.0, &[-10.0, 10.0]).unwrap();
        prop_assert_eq!(far[0], ul);
        prop_assert!(far[1].dist(&pipeflow::engine::InitialData::riemann(0.0, ul, ur).states[1]) < 1.0);
    }
}
