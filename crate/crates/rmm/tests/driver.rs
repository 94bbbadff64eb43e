use proptest::prelude::*;
use rmm::driver::output::{vtk_string, write_csv, ErrorRow};
use rmm::driver::rng::Rng;
use rmm::driver::{lagrangian_smooth_rezone, lipschitz_estimate, random_rezone, run_config, ProblemKind, RezonerSpec, RunConfig, Simulation};
use rmm::grid::{Domain, Grid, Mesh};
use rmm::reconstruction::GeometryMode;
use std::path::PathBuf;

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("rmm-driver-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn config_file_run_writes_tables_and_snapshots() {
    let dir = scratch_dir("run");
    let text = format!(
        r#"
[problem]
kind = "quadratic"
seed = 3

[mesh]
nx = 12
ny = 12

[time]
final_time = 0.02

[rezone]
kind = "random"
c_r = 0.5
b = [-0.6, -0.8]

[output]
errors_csv = "{d}/errors.csv"
diagnostics_csv = "{d}/diag.csv"
snapshot_every = 2
snapshot_dir = "{d}/vtk"
"#,
        d = dir.display()
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    let cfg = RunConfig::load(&path).unwrap();
    let (sim, summary) = run_config(&cfg).unwrap();
    assert!((sim.t - 0.02).abs() < 1e-15);
    let (l1, linf) = summary.errors.unwrap();
    assert!(l1 < 1e-12 && linf < 1e-11, "{} {}", l1, linf);

    let errors = std::fs::read_to_string(dir.join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(lines.next().unwrap(), "mesh,Nx,Ny,L1,Linf,order_L1,order_Linf,N_levels_avg,Lw_max,runtime_s");
    assert!(lines.next().unwrap().starts_with("12x12,12,12,"));

    let diag = std::fs::read_to_string(dir.join("diag.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next().unwrap(), "step,t,dt,N_levels,min_volume,conservation_residual");
    assert_eq!(lines.count(), summary.steps);

    let snaps = std::fs::read_dir(dir.join("vtk")).unwrap().count();
    assert_eq!(snaps, 1 + summary.steps / 2 + usize::from(summary.steps % 2 != 0));
    let first = std::fs::read_to_string(dir.join("vtk").join("snapshot_000000.vtk")).unwrap();
    assert!(first.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(first.contains("CELL_TYPES 144"));
}

#[test]
fn identical_configs_give_identical_snapshots() {
    let mut cfg = RunConfig::new(ProblemKind::Sine, 10, 10);
    cfg.time.final_time = Some(0.01);
    cfg.rezone = RezonerSpec::Random { c_r: 0.4, b: [0.1, 0.0] };
    let (a, _) = run_config(&cfg).unwrap();
    let (b, _) = run_config(&cfg).unwrap();
    let model = a.model();
    assert_eq!(
        vtk_string(a.mesh(), &a.averages(), &model, "x"),
        vtk_string(b.mesh(), &b.averages(), &model, "x")
    );
    cfg.problem.seed = 1;
    let (c, _) = run_config(&cfg).unwrap();
    assert_ne!(a.mesh().vertices, c.mesh().vertices);
}

#[test]
fn error_table_round_trips_through_csv() {
    let dir = scratch_dir("csv");
    let row = ErrorRow {
        mesh: "8x8".into(),
        nx: 8,
        ny: 8,
        l1: 1.5e-3,
        linf: 2.0e-3,
        order_l1: Some(2.9),
        order_linf: None,
        n_levels_avg: 2.0,
        lw_max: 12.5,
        runtime_s: 0.25,
    };
    write_csv(&dir.join("t.csv"), &[row]).unwrap();
    let mut r = csv::Reader::from_path(dir.join("t.csv")).unwrap();
    let rec = r.records().next().unwrap().unwrap();
    assert_eq!(rec.get(3).unwrap().parse::<f64>().unwrap(), 1.5e-3);
    assert_eq!(rec.get(5).unwrap(), "2.9");
    assert_eq!(rec.get(6).unwrap(), "");
}

#[test]
fn lagrangian_rezone_keeps_the_blast_mesh_regular() {
    let mut cfg = RunConfig::new(ProblemKind::Blast, 60, 4);
    cfg.rezone = RezonerSpec::LagrangianSmooth { passes: 2 };
    cfg.time.final_time = Some(0.004);
    let mut sim = Simulation::from_config(&cfg).unwrap();
    let diags = sim.run().unwrap();
    assert!(sim.mesh().check_regular().is_ok());
    assert!(diags.iter().all(|d| d.min_volume > 0.0 && d.conservation_residual < 1e-12));
    let x0 = sim.mesh().vertex(0, 0)[0];
    assert_eq!(x0, 0.0);
}

#[test]
fn lipschitz_grows_like_inverse_mesh_size() {
    let lw = |n: usize| {
        let mesh = Mesh::uniform(Grid::new(n, n), Domain::unit());
        let mut rng = Rng::new(8);
        let t = random_rezone(&mesh, &Domain::unit(), 0.0, 0.5, [0.0, 0.0], &mut rng).unwrap();
        // Δt ∝ h
        let dt = 1.0 / n as f64;
        let w: Vec<[f64; 2]> = t.iter().zip(&mesh.vertices).map(|(p, q)| [(p[0] - q[0]) / dt, (p[1] - q[1]) / dt]).collect();
        lipschitz_estimate(&mesh, &w)
    };
    let ratio = lw(80) / lw(20);
    assert!(ratio > 3.0 && ratio < 5.0, "ratio {}", ratio);
}

#[test]
fn smoothing_at_rest_is_identity() {
    let mesh = Mesh::uniform(Grid::new(5, 5), Domain::unit());
    let model = rmm::equations::PhysicsModel::Euler { gamma: 1.4 };
    let v = lagrangian_smooth_rezone(&mesh, &vec![[1.0, 0.0, 0.0, 2.5]; 25], &[0.04; 25], &model, 0.1, 3).unwrap();
    for (p, q) in v.iter().zip(&mesh.vertices) {
        assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_rezoning_is_regular_and_keeps_boundaries(seed in any::<u64>(), c_r in -0.5f64..0.5, t in 0.0f64..0.2, n in 3usize..16) {
        let dom = Domain::unit();
        let mesh = Mesh::uniform(Grid::new(n, n), dom);
        let mut rng = Rng::new(seed);
        let b = [-0.6, -0.8];
        let v = random_rezone(&mesh, &dom, t, c_r, b, &mut rng).unwrap();
        let g = mesh.grid;
        for i in 0..=n {
            prop_assert!((v[g.vertex(i, 0)][1] - b[1] * t).abs() < 1e-14);
            prop_assert!((v[g.vertex(i, n)][1] - 1.0 - b[1] * t).abs() < 1e-14);
            prop_assert!((v[g.vertex(0, i)][0] - b[0] * t).abs() < 1e-14);
        }
        for j in 1..n {
            for i in 1..n {
                let d = (v[g.vertex(i, j)][0] - mesh.vertex(i, j)[0] - b[0] * t).abs();
                prop_assert!(d <= c_r.abs() * 0.5 / n as f64 + 1e-15);
            }
        }
    }

    #[test]
    fn runs_are_seed_deterministic(seed in 0u64..1000) {
        let mut cfg = RunConfig::new(ProblemKind::Quadratic, 6, 6);
        cfg.problem.seed = seed;
        cfg.time.final_time = Some(0.01);
        cfg.scheme.mode = GeometryMode::Gcl;
        cfg.rezone = RezonerSpec::Random { c_r: 0.5, b: [0.0, 0.0] };
        let (a, _) = run_config(&cfg).unwrap();
        let (b, _) = run_config(&cfg).unwrap();
        prop_assert_eq!(a.averages(), b.averages());
    }
}
