use proptest::prelude::*;
use rmm::bench::{cell_pseudo_dt, egm_trajectory_deviation, quartic_moment_deviation};
use rmm::boundary::{BoundaryKind, BoundarySpec};
use rmm::driver::random_rezone;
use rmm::driver::rng::Rng;
use rmm::equations::{primitive_to_conserved, Cons, PhysicsModel};
use rmm::geometry::{exact_moments, CellGeometry, Point};
use rmm::grid::{Domain, Grid, Mesh};
use rmm::reconstruction::GeometryMode;
use rmm::remap::{estimate_levels, pseudo_dt, remap, FieldState, RemapConfig, RemapContext};
use rmm::time::ssprk3_step;

const EULER: PhysicsModel = PhysicsModel::Euler { gamma: 1.4 };

fn periodic_ctx(model: PhysicsModel) -> RemapContext<'static> {
    RemapContext {
        model,
        boundary: BoundarySpec::all(BoundaryKind::Periodic),
        exact: None,
        time: 0.0,
    }
}

fn perturbed(n: usize, c_r: f64, seed: u64) -> (Mesh, Vec<Point>) {
    let mesh = Mesh::uniform(Grid::new(n, n), Domain::unit());
    let mut rng = Rng::new(seed);
    let start = random_rezone(&mesh, &Domain::unit(), 0.0, c_r, [0.0, 0.0], &mut rng).unwrap();
    let target = random_rezone(&mesh, &Domain::unit(), 0.0, c_r, [0.0, 0.0], &mut rng).unwrap();
    (
        Mesh {
            grid: mesh.grid,
            vertices: start,
        },
        target,
    )
}

fn state_of(mesh: &Mesh, f: impl Fn(Point) -> Cons) -> FieldState {
    let moments = mesh.exact_moments();
    let avgs: Vec<Cons> = moments.iter().map(|m| f(m.centroid())).collect();
    FieldState::from_averages(mesh.clone(), &avgs, moments)
}

fn config(mode: GeometryMode, cfl: f64) -> RemapConfig {
    RemapConfig {
        cfl,
        mode,
        tau_final: 1.0,
        levels: None,
    }
}

fn smooth_density(p: Point) -> Cons {
    let rho = 1.0 + 0.5 * (2.0 * std::f64::consts::PI * (p[0] + 2.0 * p[1])).sin();
    primitive_to_conserved(1.4, [rho, 0.3, -0.2, 1.0]).unwrap()
}

#[test]
fn free_stream_is_kept_by_tpe2_and_gcl_only() {
    let (mesh, target) = perturbed(10, 0.45, 7);
    let u = primitive_to_conserved(1.4, [1.3, 0.4, -0.2, 0.9]).unwrap();
    let mut nongcl_dev: f64 = 0.0;
    for mode in [GeometryMode::Tpe2, GeometryMode::Gcl, GeometryMode::NonGcl] {
        let (out, _) = remap(state_of(&mesh, |_| u), &target, &config(mode, 0.6), &periodic_ctx(EULER)).unwrap();
        let dev = out
            .averages()
            .iter()
            .flat_map(|a| (0..4).map(move |c| (a[c] - u[c]).abs()))
            .fold(0.0, f64::max);
        match mode {
            GeometryMode::NonGcl => nongcl_dev = dev,
            _ => assert!(dev < 1e-13, "{:?} deviates by {:e}", mode, dev),
        }
    }
    assert!(nongcl_dev > 1e-8, "NonGCL deviation {:e}", nongcl_dev);
}

#[test]
fn evolved_moments_land_on_the_target_moments() {
    let (mesh, target) = perturbed(8, 0.5, 11);
    let (out, report) = remap(state_of(&mesh, smooth_density), &target, &config(GeometryMode::Tpe2, 0.25), &periodic_ctx(EULER)).unwrap();
    assert!(report.levels >= 1);
    assert_eq!(out.mesh.vertices, target);
    for (m, e) in out.egm.iter().zip(out.mesh.exact_moments()) {
        let (a, b) = (m.to_array(), e.to_array());
        for k in 0..6 {
            assert!((a[k] - b[k]).abs() <= 1e-13 * b[0], "{:?} vs {:?}", a, b);
        }
    }
}

#[test]
fn forced_levels_are_used() {
    let (mesh, target) = perturbed(6, 0.3, 3);
    let mut cfg = config(GeometryMode::Tpe2, 0.25);
    cfg.levels = Some(5);
    let (_, report) = remap(state_of(&mesh, smooth_density), &target, &cfg, &periodic_ctx(EULER)).unwrap();
    assert_eq!(report.levels, 5);
}

#[test]
fn static_target_is_a_no_op() {
    let (mesh, _) = perturbed(6, 0.3, 5);
    let s = state_of(&mesh, smooth_density);
    let (out, report) = remap(s.clone(), &mesh.vertices, &config(GeometryMode::Tpe2, 0.25), &periodic_ctx(EULER)).unwrap();
    assert_eq!(out.v, s.v);
    assert_eq!(out.egm, s.egm);
    assert_eq!(report.boundary_outflow, [0.0; 4]);
}

#[test]
fn pseudo_dt_examples() {
    let mesh = Mesh::uniform(Grid::new(4, 4), Domain::unit());
    let n = mesh.vertices.len();
    assert_eq!(pseudo_dt(&mesh, &vec![[0.0, 0.0]; n], 0.25), f64::INFINITY);
    // |w·n*| = 1 · h on every edge: Δτ = C h² / h
    let dt = pseudo_dt(&mesh, &vec![[1.0, 0.0]; n], 0.25);
    assert!((dt - 0.25 * 0.25).abs() < 1e-15);
    let levels = estimate_levels(&vec![[0.25, 0.0]; n], &mesh, 0.25);
    assert_eq!(levels, 4);
}

#[test]
fn ssprk3_is_simpson_for_time_dependent_rates() {
    let mut rng = Rng::new(99);
    for _ in 0..20 {
        let d = rng.uniform(0.0, 2.0);
        let y = ssprk3_step::<1, ()>(&[[0.0]], 0.0, d, |_, t, _| Ok(vec![[t * t * t]])).unwrap()[0][0];
        assert!((y - d.powi(4) / 4.0).abs() <= 1e-15 * d.powi(4).max(1.0));
        let y = ssprk3_step::<1, ()>(&[[0.0]], 0.0, d, |_, t, _| Ok(vec![[t * t]])).unwrap()[0][0];
        assert!((y - d.powi(3) / 3.0).abs() <= 1e-15 * d.powi(3).max(1.0));
    }
}

#[test]
fn quartic_second_moment_over_a_large_step() {
    assert!(quartic_moment_deviation(1.5) < 1e-13);
    assert!(quartic_moment_deviation(3.0) < 1e-13);
}

#[test]
fn single_cell_pseudo_dt() {
    let sq = CellGeometry::new([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
    let dt = cell_pseudo_dt(&sq, &[[1.0, 0.0]; 4], 0.25);
    assert!((dt - 0.25 * 4.0 / 2.0).abs() < 1e-15);
}

fn motion() -> impl Strategy<Value = (u64, f64)> {
    (any::<u64>(), 0.05f64..0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conservation_and_positivity_at_quarter_cfl((seed, c_r) in motion()) {
        let (mesh, target) = perturbed(8, c_r, seed);
        let s = state_of(&mesh, smooth_density);
        let before = s.total();
        let (out, _) = remap(s, &target, &config(GeometryMode::Tpe2, 0.25), &periodic_ctx(EULER)).unwrap();
        let after = out.total();
        let scale: f64 = out.v.iter().map(|v| v[3].abs()).sum();
        for c in 0..4 {
            prop_assert!((after[c] - before[c]).abs() <= 1e-12 * scale);
        }
        for (m, u) in out.egm.iter().zip(out.averages()) {
            prop_assert!(m.m00 > 0.0);
            prop_assert!(u[0] > 0.0);
        }
    }

    #[test]
    fn egm_follow_exact_moments(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let cell = rmm::bench::random_quad(&mut rng);
        let w = rmm::bench::random_velocities(&mut rng);
        if let Some(d) = egm_trajectory_deviation(&cell, &w, 4) {
            prop_assert!(d <= 1e-12, "deviation {:e}", d);
        }
        let _ = exact_moments(&cell);
    }
}
