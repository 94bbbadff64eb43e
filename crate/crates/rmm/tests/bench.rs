use rmm::bench::{combined_hash, consistency_suite, sine_config, sine_meshes, shock_cases, tpe_config, BenchOptions, Manifest, Scale};
use rmm::reconstruction::GeometryMode;

#[test]
fn consistency_suite_writes_csv_and_manifest() {
    let dir = std::env::temp_dir().join(format!("rmm-bench-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let opts = BenchOptions {
        out: Some(dir.clone()),
        ..Default::default()
    };
    let mut manifest = Manifest::default();
    let report = consistency_suite(&opts, &mut manifest).unwrap();
    assert!(report.deviation("simpson_cubic").unwrap() <= 1e-15);
    assert!(report.deviation("egm_random_quads").unwrap() <= 1e-12);
    assert!(report.deviation("quartic_m20").unwrap() <= 1e-13);
    manifest.write(&dir).unwrap();

    let csv = std::fs::read_to_string(dir.join("consistency.csv")).unwrap();
    assert!(csv.starts_with("check,samples,max_deviation,runtime_s\n"));
    assert_eq!(csv.lines().count(), 4);
    let man = std::fs::read_to_string(dir.join("manifest.csv")).unwrap();
    let mut lines = man.lines();
    assert_eq!(lines.next().unwrap(), "artifact,suite,scale,seed,config_hash");
    let row = lines.next().unwrap();
    assert!(row.starts_with("consistency.csv,consistency,desk,0,"));
    assert_eq!(row.rsplit(',').next().unwrap().len(), 64);
}

#[test]
fn suite_configurations() {
    let c = tpe_config(GeometryMode::Gcl, 1, 9);
    assert_eq!((c.mesh.nx, c.mesh.ny, c.final_time()), (40, 40, 0.1));
    assert_eq!(c.problem.degree, 1);
    assert_ne!(c.hash(), tpe_config(GeometryMode::Gcl, 1, 10).hash());
    assert_eq!(sine_meshes(Scale::Desk), vec![40, 80, 160]);
    assert_eq!(sine_meshes(Scale::Paper).last(), Some(&320));
    assert_eq!(sine_config(GeometryMode::Tpe2, 80, 0).final_time(), 0.1);

    let cases = shock_cases(Scale::Desk, false, 0);
    let names: Vec<&str> = cases.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["blast", "shu_osher", "riemann2d_levels2", "riemann2d_levels6"]);
    assert_eq!(cases[0].config.final_time(), 0.038);
    assert_eq!(cases[1].config.final_time(), 1.8);
    assert_eq!(cases[2].config.final_time(), 0.25);
    assert_eq!((cases[2].config.mesh.nx, cases[2].config.mesh.ny), (100, 100));
    assert_eq!(shock_cases(Scale::Desk, true, 0).len(), 5);

    let cfgs: Vec<_> = cases.iter().map(|c| c.config.clone()).collect();
    assert_eq!(combined_hash(&cfgs), combined_hash(&cfgs));
    assert_ne!(combined_hash(&cfgs), combined_hash(&cfgs[..2]));
}
