use std::process::Command;

fn solver() -> Command {
    Command::new(env!("CARGO_BIN_EXE_solver"))
}

fn scratch(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("solver-cli-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn run_with_seed_and_csv_overrides() {
    let dir = scratch("run");
    let cfg = dir.join("q.toml");
    std::fs::write(
        &cfg,
        "[problem]\nkind = \"quadratic\"\n\n[mesh]\nnx = 8\nny = 8\n\n[time]\nfinal_time = 0.01\n\n[rezone]\nkind = \"random\"\nc_r = 0.5\nb = [0.0, 0.0]\n",
    )
    .unwrap();
    let csv = dir.join("err.csv");
    let out = solver()
        .args(["--threads", "1", "--seed", "5", "--csv"])
        .arg(&csv)
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("L1"));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("mesh,Nx,Ny,L1,Linf,order_L1,order_Linf,N_levels_avg,Lw_max,runtime_s\n8x8,8,8,"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = scratch("bad");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[problem]\nkind = \"sine\"\nflux = \"hll\"\n\n[mesh]\nnx = 8\nny = 8\n").unwrap();
    let out = solver().arg("run").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = solver().args(["bench", "nonsense"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn consistency_bench_writes_manifest() {
    let dir = scratch("bench");
    let out = solver()
        .args(["bench", "consistency", "--scale", "desk", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("check,samples,max_deviation,runtime_s"));
    let manifest = std::fs::read_to_string(dir.join("manifest.csv")).unwrap();
    assert!(manifest.lines().any(|l| l.starts_with("consistency.csv,")));
    assert!(dir.join("consistency.csv").exists());
}
