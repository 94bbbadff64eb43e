use proptest::prelude::*;
use rmm::boundary::{BoundaryKind, BoundarySpec, ExactSolution};
use rmm::driver::problems::SineWave;
use rmm::driver::rng::Rng;
use rmm::driver::{random_rezone, Problem, Quadratic};
use rmm::equations::{primitive_to_conserved, Cons, PhysicsModel};
use rmm::evolve::{evolve_step, fixed_geometry, physical_dt, EvolveContext};
use rmm::grid::{Domain, Grid, Mesh};
use rmm::reconstruction::GeometryMode;

fn perturbed_mesh(n: usize, c_r: f64, seed: u64) -> Mesh {
    let base = Mesh::uniform(Grid::new(n, n), Domain::unit());
    let mut rng = Rng::new(seed);
    let v = random_rezone(&base, &Domain::unit(), 0.0, c_r, [0.0, 0.0], &mut rng).unwrap();
    Mesh { grid: base.grid, vertices: v }
}

fn exact_averages(mesh: &Mesh, exact: &dyn ExactSolution, t: f64) -> Vec<Cons> {
    let g = mesh.grid;
    let moments = mesh.exact_moments();
    (0..g.num_cells())
        .map(|k| exact.cell_average(&mesh.cell(k % g.nx, k / g.nx), &moments[k], t))
        .collect()
}

#[test]
fn physical_dt_on_a_uniform_mesh() {
    let mesh = Mesh::uniform(Grid::new(10, 10), Domain::unit());
    let m = mesh.exact_moments();
    let geo = fixed_geometry(GeometryMode::Tpe2, &m, &m);
    let model = PhysicsModel::Advection { a: [1.0, 1.0] };
    let dt = physical_dt(&mesh, &geo, &vec![[1.0, 0.0, 0.0, 0.0]; 100], &model, 0.25).unwrap();
    assert!((dt - 0.25 * 0.1).abs() < 1e-15, "{}", dt);
}

#[test]
fn constant_state_is_preserved_on_a_distorted_periodic_mesh() {
    let mesh = perturbed_mesh(12, 0.5, 4);
    let m = mesh.exact_moments();
    let geo = fixed_geometry(GeometryMode::Tpe2, &m, &m);
    let u = primitive_to_conserved(1.4, [0.8, -0.3, 0.6, 1.7]).unwrap();
    let ctx = EvolveContext {
        model: PhysicsModel::Euler { gamma: 1.4 },
        boundary: BoundarySpec::all(BoundaryKind::Periodic),
        exact: None,
    };
    let (out, outflow) = evolve_step(&mesh, &geo, &vec![u; 144], 0.0, 0.01, &ctx).unwrap();
    for a in &out {
        for c in 0..4 {
            assert!((a[c] - u[c]).abs() < 1e-14);
        }
    }
    assert_eq!(outflow, [0.0; 4]);
}

#[test]
fn smooth_wave_is_third_order_in_one_step() {
    // one step with dt ∝ h: local error O(h^4) relative to dt·h^3
    let err = |n: usize| {
        let mesh = Mesh::uniform(Grid::new(n, n), Domain::unit());
        let m = mesh.exact_moments();
        let geo = fixed_geometry(GeometryMode::Tpe2, &m, &m);
        let ctx = EvolveContext {
            model: PhysicsModel::Euler { gamma: 1.4 },
            boundary: BoundarySpec::all(BoundaryKind::Periodic),
            exact: Some(&SineWave),
        };
        let dt = 0.5 / n as f64;
        let u0 = exact_averages(&mesh, &SineWave, 0.0);
        let (u1, _) = evolve_step(&mesh, &geo, &u0, 0.0, dt, &ctx).unwrap();
        let ex = exact_averages(&mesh, &SineWave, dt);
        u1.iter().zip(&ex).map(|(a, b)| (a[0] - b[0]).abs()).fold(0.0, f64::max)
    };
    let ratio = err(20) / err(40);
    assert!(ratio > 10.0, "error ratio {}", ratio);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadratics_are_advected_exactly_on_fixed_meshes(seed in any::<u64>(), c_r in 0.0f64..0.5) {
        let mesh = perturbed_mesh(8, c_r, seed);
        let m = mesh.exact_moments();
        let geo = fixed_geometry(GeometryMode::Tpe2, &m, &m);
        let mut rng = Rng::new(seed ^ 0x9e37);
        let q = Quadratic::random(&mut rng, 2, [1.0, 1.0]);
        let problem = Problem::Quadratic(q);
        let exact = problem.exact_solution().unwrap();
        let ctx = EvolveContext {
            model: problem.model(),
            boundary: BoundarySpec::all(BoundaryKind::Exact),
            exact: Some(exact),
        };
        let u0 = exact_averages(&mesh, exact, 0.0);
        let dt = physical_dt(&mesh, &geo, &u0, &ctx.model, 0.25).unwrap();
        let (u1, _) = evolve_step(&mesh, &geo, &u0, 0.0, dt, &ctx).unwrap();
        let ex = exact_averages(&mesh, exact, dt);
        for (a, b) in u1.iter().zip(&ex) {
            prop_assert!((a[0] - b[0]).abs() < 1e-12, "{} vs {}", a[0], b[0]);
        }
    }
}
