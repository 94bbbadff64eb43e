//! Benchmark suites: polynomial exactness, smooth convergence, shock
//! sanity runs and single-cell geometric consistency.

use crate::driver::output::{fill_orders, write_csv, write_vtk, ErrorRow};
use crate::driver::problems::ProblemKind;
use crate::driver::rezone::RezonerSpec;
use crate::driver::rng::Rng;
use crate::driver::run::{error_norms, run_config, RunSummary, Simulation};
use crate::driver::RunConfig;
use crate::equations::{is_admissible, pressure, PhysicsModel};
use crate::error::{Error, Result};
use crate::geometry::{cell_at, exact_moments, CellGeometry, Point, EXPONENTS};
use crate::reconstruction::GeometryMode;
use crate::remap::moment_rhs;
use crate::time::ssprk3_step;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

/// Pseudo-time CFL cap of the single-cell consistency check.
pub const CONSISTENCY_CFL: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(Error::Config(format!("unknown scale '{}' (desk or paper)", s))),
        }
    }
}

impl Scale {
    pub fn name(&self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub scale: Scale,
    pub seed: u64,
    /// Directory for CSV/VTK artifacts and the manifest; nothing is written when absent.
    pub out: Option<PathBuf>,
    pub include_dmr: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            scale: Scale::Desk,
            seed: 0,
            out: None,
            include_dmr: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestRow {
    pub artifact: String,
    pub suite: String,
    pub scale: String,
    pub seed: u64,
    pub config_hash: String,
}

/// Record of every artifact written by a bench invocation.
#[derive(Clone, Debug, Default)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn add(&mut self, artifact: &str, suite: &str, opts: &BenchOptions, config_hash: String) {
        self.rows.push(ManifestRow {
            artifact: artifact.to_string(),
            suite: suite.to_string(),
            scale: opts.scale.name().to_string(),
            seed: opts.seed,
            config_hash,
        });
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("manifest.csv"), &self.rows)
    }
}

/// Hash of a list of configurations (hex SHA-256 over their hashes).
pub fn combined_hash(configs: &[RunConfig]) -> String {
    let mut h = Sha256::new();
    for c in configs {
        h.update(c.hash().as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{:02x}", b)).collect()
}

fn write_artifact<T: Serialize>(opts: &BenchOptions, manifest: &mut Manifest, suite: &str, name: &str, rows: &[T], hash: String) -> Result<()> {
    if let Some(dir) = &opts.out {
        write_csv(&dir.join(name), rows)?;
        manifest.add(name, suite, opts, hash);
    }
    Ok(())
}

// ---------------------------------------------------------------- TPE

pub fn tpe_config(mode: GeometryMode, degree: usize, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(ProblemKind::Quadratic, 40, 40);
    cfg.problem.seed = seed;
    cfg.problem.degree = degree;
    cfg.time.final_time = Some(0.1);
    cfg.scheme.mode = mode;
    cfg.rezone = RezonerSpec::Random { c_r: 0.5, b: [-0.6, -0.8] };
    cfg
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TpeRow {
    pub mode: String,
    pub degree: usize,
    pub trials: usize,
    #[serde(rename = "L1_max")]
    pub l1_max: f64,
    #[serde(rename = "Linf_max")]
    pub linf_max: f64,
    #[serde(rename = "N_levels_avg")]
    pub n_levels_avg: f64,
    pub residual_max: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TpeTrialRow {
    pub mode: String,
    pub degree: usize,
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "Linf")]
    pub linf: f64,
    #[serde(rename = "N_levels_avg")]
    pub n_levels_avg: f64,
    pub residual_max: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug)]
pub struct TpeReport {
    pub rows: Vec<TpeRow>,
    pub trials: Vec<TpeTrialRow>,
    pub configs: Vec<RunConfig>,
}

impl TpeReport {
    pub fn row(&self, mode: GeometryMode, degree: usize) -> Option<&TpeRow> {
        self.rows.iter().find(|r| r.mode == mode.name() && r.degree == degree)
    }
}

pub fn tpe_trials(scale: Scale) -> usize {
    match scale {
        Scale::Desk => 5,
        Scale::Paper => 20,
    }
}

/// Random quadratics advected on randomly rezoned 40² meshes, one row per
/// (mode, degree) with the worst error over the trials.
pub fn tpe_suite(opts: &BenchOptions, modes: &[GeometryMode], degrees: &[usize]) -> Result<TpeReport> {
    let trials = tpe_trials(opts.scale);
    let mut rows = Vec::new();
    let mut trial_rows = Vec::new();
    let mut configs = Vec::new();
    for &mode in modes {
        for &degree in degrees {
            let start = Instant::now();
            let mut row = TpeRow {
                mode: mode.name().to_string(),
                degree,
                trials,
                l1_max: 0.0,
                linf_max: 0.0,
                n_levels_avg: 0.0,
                residual_max: 0.0,
                runtime_s: 0.0,
            };
            for trial in 0..trials {
                let seed = opts.seed.wrapping_add(trial as u64);
                let cfg = tpe_config(mode, degree, seed);
                let (_, s) = run_config(&cfg)?;
                let (l1, linf) = s.errors.expect("quadratic problems have exact solutions");
                trial_rows.push(TpeTrialRow {
                    mode: mode.name().to_string(),
                    degree,
                    trial,
                    seed,
                    l1,
                    linf,
                    n_levels_avg: s.mean_levels,
                    residual_max: s.max_residual,
                    runtime_s: s.runtime_s,
                });
                row.l1_max = row.l1_max.max(l1);
                row.linf_max = row.linf_max.max(linf);
                row.n_levels_avg += s.mean_levels / trials as f64;
                row.residual_max = row.residual_max.max(s.max_residual);
                configs.push(cfg);
            }
            row.runtime_s = start.elapsed().as_secs_f64();
            rows.push(row);
        }
    }
    Ok(TpeReport {
        rows,
        trials: trial_rows,
        configs,
    })
}

// --------------------------------------------------------------- sine

pub fn sine_config(mode: GeometryMode, n: usize, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(ProblemKind::Sine, n, n);
    cfg.problem.seed = seed;
    cfg.scheme.mode = mode;
    cfg.rezone = RezonerSpec::Random { c_r: 0.5, b: [-0.6, -0.8] };
    cfg
}

pub fn sine_meshes(scale: Scale) -> Vec<usize> {
    match scale {
        Scale::Desk => vec![40, 80, 160],
        Scale::Paper => vec![40, 80, 160, 320],
    }
}

#[derive(Clone, Debug)]
pub struct SineReport {
    pub mode: GeometryMode,
    pub rows: Vec<ErrorRow>,
    pub summaries: Vec<RunSummary>,
    pub configs: Vec<RunConfig>,
}

impl SineReport {
    pub fn max_residual(&self) -> f64 {
        self.summaries.iter().map(|s| s.max_residual).fold(0.0, f64::max)
    }

    pub fn total_runtime(&self) -> f64 {
        self.summaries.iter().map(|s| s.runtime_s).sum()
    }
}

/// Density-wave convergence study on randomly rezoned meshes.
pub fn sine_convergence(opts: &BenchOptions, mode: GeometryMode) -> Result<SineReport> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut configs = Vec::new();
    for n in sine_meshes(opts.scale) {
        let cfg = sine_config(mode, n, opts.seed);
        let (_, s) = run_config(&cfg)?;
        let (l1, linf) = s.errors.expect("the density wave has an exact solution");
        rows.push(ErrorRow {
            mesh: format!("{}x{}", n, n),
            nx: n,
            ny: n,
            l1,
            linf,
            order_l1: None,
            order_linf: None,
            n_levels_avg: s.mean_levels,
            lw_max: s.max_lipschitz,
            runtime_s: s.runtime_s,
        });
        summaries.push(s);
        configs.push(cfg);
    }
    fill_orders(&mut rows);
    Ok(SineReport {
        mode,
        rows,
        summaries,
        configs,
    })
}

// -------------------------------------------------------------- shocks

#[derive(Clone, Debug)]
pub struct ShockCase {
    pub name: String,
    pub config: RunConfig,
}

/// The shock configurations of a scale: blast wave, Shu–Osher, the 2D
/// Riemann problem with 2 and 6 forced levels, and optionally the double
/// Mach reflection.
pub fn shock_cases(scale: Scale, include_dmr: bool, seed: u64) -> Vec<ShockCase> {
    let f = match scale {
        Scale::Desk => 1,
        Scale::Paper => 2,
    };
    let mut out = Vec::new();
    let mut blast = RunConfig::new(ProblemKind::Blast, 200 * f, 10);
    blast.rezone = RezonerSpec::LagrangianSmooth { passes: 2 };
    out.push(ShockCase {
        name: "blast".into(),
        config: blast,
    });
    let mut shu = RunConfig::new(ProblemKind::ShuOsher, 200 * f, 10);
    shu.rezone = RezonerSpec::LagrangianSmooth { passes: 2 };
    out.push(ShockCase {
        name: "shu_osher".into(),
        config: shu,
    });
    for levels in [2, 6] {
        let mut rp = RunConfig::new(ProblemKind::Riemann2d, 100 * f, 100 * f);
        rp.problem.seed = seed;
        rp.rezone = RezonerSpec::Random { c_r: 0.5, b: [0.0, 0.0] };
        rp.scheme.levels = Some(levels);
        out.push(ShockCase {
            name: format!("riemann2d_levels{}", levels),
            config: rp,
        });
    }
    if include_dmr {
        let mut dmr = RunConfig::new(ProblemKind::DoubleMach, 480 * f, 120 * f);
        dmr.rezone = RezonerSpec::LagrangianSmooth { passes: 2 };
        out.push(ShockCase {
            name: "double_mach".into(),
            config: dmr,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShockRow {
    pub name: String,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    pub steps: usize,
    pub final_time: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub p_min: f64,
    pub nan_count: usize,
    pub admissible: bool,
    #[serde(rename = "N_levels_avg")]
    pub n_levels_avg: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug)]
pub struct ShockReport {
    pub rows: Vec<ShockRow>,
    /// Volume-weighted L¹ distance of the 2- and 6-level Riemann densities
    /// relative to the density range.
    pub riemann_level_gap: Option<f64>,
    /// (centroid x, density) along the middle row of cells of every run.
    pub profiles: Vec<(String, Vec<Point>)>,
    pub configs: Vec<RunConfig>,
}

impl ShockReport {
    pub fn row(&self, name: &str) -> Option<&ShockRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn profile(&self, name: &str) -> Option<&[Point]> {
        self.profiles.iter().find(|(n, _)| n == name).map(|(_, p)| p.as_slice())
    }
}

fn shock_row(name: &str, sim: &Simulation, steps: usize, levels: f64, runtime_s: f64) -> ShockRow {
    let model = sim.model();
    let gamma = match model {
        PhysicsModel::Euler { gamma } => gamma,
        PhysicsModel::Advection { .. } => unreachable!("shock problems are Euler problems"),
    };
    let avgs = sim.averages();
    let mut row = ShockRow {
        name: name.to_string(),
        nx: sim.mesh().grid.nx,
        ny: sim.mesh().grid.ny,
        steps,
        final_time: sim.t,
        rho_min: f64::INFINITY,
        rho_max: f64::NEG_INFINITY,
        p_min: f64::INFINITY,
        nan_count: 0,
        admissible: true,
        n_levels_avg: levels,
        runtime_s,
    };
    for u in &avgs {
        if u.iter().take(model.m()).any(|x| !x.is_finite()) {
            row.nan_count += 1;
            continue;
        }
        row.rho_min = row.rho_min.min(u[0]);
        row.rho_max = row.rho_max.max(u[0]);
        row.p_min = row.p_min.min(pressure(gamma, u));
        row.admissible &= is_admissible(&model, u);
    }
    row.admissible &= row.nan_count == 0;
    row
}

/// (centroid x, density) along the middle row of cells.
pub fn middle_row_density(sim: &Simulation) -> Vec<Point> {
    let g = sim.mesh().grid;
    let avgs = sim.averages();
    let j = g.ny / 2;
    (0..g.nx)
        .map(|i| {
            let k = g.cell(i, j);
            [sim.state.egm[k].centroid()[0], avgs[k][0]]
        })
        .collect()
}

/// Number of strict local maxima with abscissa in [x0, x1] that exceed
/// their neighbours by more than `tol`.
pub fn count_local_maxima(profile: &[Point], x0: f64, x1: f64, tol: f64) -> usize {
    (1..profile.len().saturating_sub(1))
        .filter(|&i| {
            let v = |k: usize| profile[k][1];
            (x0..=x1).contains(&profile[i][0]) && v(i) > v(i - 1) + tol && v(i) > v(i + 1) + tol
        })
        .count()
}

/// Run the shock cases. The two Riemann runs share the step sequence of
/// the first one so that their final meshes coincide.
pub fn shock_suite(opts: &BenchOptions, manifest: &mut Manifest) -> Result<ShockReport> {
    let cases = shock_cases(opts.scale, opts.include_dmr, opts.seed);
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    let mut riemann: Vec<Simulation> = Vec::new();
    let mut riemann_dts: Vec<f64> = Vec::new();
    for case in &cases {
        let start = Instant::now();
        let mut sim = Simulation::from_config(&case.config)?;
        let diags = if case.name.starts_with("riemann2d") && !riemann_dts.is_empty() {
            let mut d = Vec::with_capacity(riemann_dts.len());
            for &dt in &riemann_dts {
                d.push(sim.rmm_step(dt)?);
            }
            d
        } else {
            sim.run()?
        };
        if case.name.starts_with("riemann2d") && riemann_dts.is_empty() {
            riemann_dts = diags.iter().map(|d| d.dt).collect();
        }
        let levels = diags.iter().map(|d| d.levels as f64).sum::<f64>() / diags.len().max(1) as f64;
        rows.push(shock_row(&case.name, &sim, diags.len(), levels, start.elapsed().as_secs_f64()));
        profiles.push((case.name.clone(), middle_row_density(&sim)));
        if let Some(dir) = &opts.out {
            let name = format!("{}.vtk", case.name);
            write_vtk(&dir.join(&name), sim.mesh(), &sim.averages(), &sim.model(), &case.name)?;
            manifest.add(&name, "shock", opts, case.config.hash());
        }
        if case.name.starts_with("riemann2d") {
            riemann.push(sim);
        }
    }
    let riemann_level_gap = if riemann.len() == 2 {
        let a: Vec<f64> = riemann[0].averages().iter().map(|u| u[0]).collect();
        let b: Vec<f64> = riemann[1].averages().iter().map(|u| u[0]).collect();
        let (l1, _) = error_norms(&a, &riemann[1].volumes(), &b);
        let lo = b.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(l1 / (hi - lo))
    } else {
        None
    };
    let configs: Vec<RunConfig> = cases.iter().map(|c| c.config.clone()).collect();
    write_artifact(opts, manifest, "shock", "shock_sanity.csv", &rows, combined_hash(&configs))?;
    Ok(ShockReport {
        rows,
        riemann_level_gap,
        profiles,
        configs,
    })
}

// --------------------------------------------------------- consistency

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub check: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub runtime_s: f64,
}

/// Relative deviation of SSPRK3 applied to dy/dτ = τ³ from Δτ⁴/4.
pub fn simpson_deviation(rng: &mut Rng, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let dtau = rng.uniform(0.0, 2.0);
        let y = ssprk3_step::<1, ()>(&[[0.0]], 0.0, dtau, |_, tau, _| Ok(vec![[tau.powi(3)]])).unwrap()[0][0];
        let exact = dtau.powi(4) / 4.0;
        worst = worst.max((y - exact).abs() / exact.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Perturbed unit square around the origin.
pub fn random_quad(rng: &mut Rng) -> CellGeometry {
    let corners = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
    let v = corners.map(|c: Point| [c[0] + 0.4 * rng.centered(), c[1] + 0.4 * rng.centered()]);
    CellGeometry::new(v)
}

/// Vertex velocities with |w| ≤ 1.
pub fn random_velocities(rng: &mut Rng) -> [Point; 4] {
    std::array::from_fn(|_| {
        let w = [2.0 * rng.centered(), 2.0 * rng.centered()];
        let n = (w[0] * w[0] + w[1] * w[1]).sqrt();
        if n > 1.0 {
            [w[0] / n, w[1] / n]
        } else {
            w
        }
    })
}

/// Pseudo-time step of a single cell at CFL number `cfl`.
pub fn cell_pseudo_dt(cell: &CellGeometry, w: &[Point; 4], cfl: f64) -> f64 {
    let mut rate: f64 = 0.0;
    for e in 0..4 {
        let p0 = cell.vertices[e];
        let p1 = cell.vertices[(e + 1) % 4];
        let ns = [p1[1] - p0[1], -(p1[0] - p0[0])];
        for v in [w[e], w[(e + 1) % 4]] {
            rate = rate.max((v[0] * ns[0] + v[1] * ns[1]).abs());
        }
    }
    cfl * cell.signed_area() / rate
}

/// Evolve the moments of one moving cell with `steps` SSPRK3 steps at the
/// CFL cap. Returns the largest deviation from the exact moments of the
/// moved cell, each scaled by m00 · R^(s+r) with R the largest vertex
/// distance from the origin, or `None` if the cell degenerates.
pub fn egm_trajectory_deviation(cell0: &CellGeometry, w: &[Point; 4], steps: usize) -> Option<f64> {
    let mut m = exact_moments(cell0).to_array();
    let mut tau = 0.0;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let cell = cell_at(cell0, w, tau).ok()?;
        let dtau = cell_pseudo_dt(&cell, w, CONSISTENCY_CFL);
        for off in [0.5, 1.0] {
            cell_at(cell0, w, tau + off * dtau).ok()?;
        }
        m = ssprk3_step::<6, Error>(&[m], tau, dtau, |_, s, _| {
            let c = cell_at(cell0, w, s)?;
            Ok(vec![moment_rhs(&c, w).to_array()])
        })
        .ok()?[0];
        tau += dtau;
        let cell = cell_at(cell0, w, tau).ok()?;
        let exact = exact_moments(&cell).to_array();
        let r = cell.vertices.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        for (k, (s, t)) in EXPONENTS.iter().enumerate() {
            let scale = exact[0] * r.powi((s + t) as i32);
            worst = worst.max((m[k] - exact[k]).abs() / scale);
        }
    }
    Some(worst)
}

/// Worst EGM deviation over `samples` random cells and motions; motions
/// that fold the cell within the trajectory are redrawn.
pub fn egm_consistency(rng: &mut Rng, samples: usize, steps: usize) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut redrawn = 0;
    let mut done = 0;
    while done < samples {
        let cell = random_quad(rng);
        let w = random_velocities(rng);
        match egm_trajectory_deviation(&cell, &w, steps) {
            Some(d) => {
                worst = worst.max(d);
                done += 1;
            }
            None => redrawn += 1,
        }
    }
    (worst, redrawn)
}

/// One large pseudo-time step of a stretching, translating cell: the
/// quartic-in-τ second moment must come out exactly.
pub fn quartic_moment_deviation(dtau: f64) -> f64 {
    let cell0 = CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [1.2, 1.0], [-0.1, 0.9]]);
    let w = [[0.3, 0.1], [0.9, -0.2], [1.1, 0.8], [0.2, 0.6]];
    let m0 = exact_moments(&cell0).to_array();
    let m = ssprk3_step::<6, ()>(&[m0], 0.0, dtau, |_, s, _| {
        let c = crate::geometry::cell_at_unchecked(&cell0, &w, s);
        Ok(vec![moment_rhs(&c, &w).to_array()])
    })
    .unwrap()[0];
    let exact = exact_moments(&crate::geometry::cell_at_unchecked(&cell0, &w, dtau)).to_array();
    (m[3] - exact[3]).abs() / exact[3].abs()
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    pub egm_redrawn: usize,
}

impl ConsistencyReport {
    pub fn deviation(&self, check: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.check == check).map(|r| r.max_deviation)
    }
}

pub fn consistency_suite(opts: &BenchOptions, manifest: &mut Manifest) -> Result<ConsistencyReport> {
    let mut rng = Rng::new(opts.seed);
    let mut rows = Vec::new();
    let start = Instant::now();
    let d = simpson_deviation(&mut rng, 20);
    rows.push(ConsistencyRow {
        check: "simpson_cubic".into(),
        samples: 20,
        max_deviation: d,
        runtime_s: start.elapsed().as_secs_f64(),
    });
    let samples = match opts.scale {
        Scale::Desk => 1000,
        Scale::Paper => 10000,
    };
    let start = Instant::now();
    let (d, redrawn) = egm_consistency(&mut rng, samples, 10);
    rows.push(ConsistencyRow {
        check: "egm_random_quads".into(),
        samples,
        max_deviation: d,
        runtime_s: start.elapsed().as_secs_f64(),
    });
    let start = Instant::now();
    rows.push(ConsistencyRow {
        check: "quartic_m20".into(),
        samples: 1,
        max_deviation: quartic_moment_deviation(1.5),
        runtime_s: start.elapsed().as_secs_f64(),
    });
    let hash: String = Sha256::digest(format!("consistency {} {}", opts.scale.name(), opts.seed).as_bytes())
        .iter()
        .map(|b| format!("{:02x}", b))
        .collect();
    write_artifact(opts, manifest, "consistency", "consistency.csv", &rows, hash)?;
    Ok(ConsistencyReport {
        rows,
        egm_redrawn: redrawn,
    })
}

// ------------------------------------------------------------ writers

pub fn write_tpe(opts: &BenchOptions, manifest: &mut Manifest, report: &TpeReport) -> Result<()> {
    let hash = combined_hash(&report.configs);
    write_artifact(opts, manifest, "tpe", "tpe.csv", &report.rows, hash.clone())?;
    write_artifact(opts, manifest, "tpe", "tpe_trials.csv", &report.trials, hash)
}

pub fn write_sine(opts: &BenchOptions, manifest: &mut Manifest, report: &SineReport) -> Result<()> {
    let name = format!("sine_{}.csv", report.mode.name());
    write_artifact(opts, manifest, "sine", &name, &report.rows, combined_hash(&report.configs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_names() {
        assert_eq!("desk".parse::<Scale>().unwrap(), Scale::Desk);
        assert_eq!("paper".parse::<Scale>().unwrap(), Scale::Paper);
        assert!("huge".parse::<Scale>().is_err());
    }

    #[test]
    fn local_maxima() {
        let p = |v: &[f64]| -> Vec<Point> { v.iter().enumerate().map(|(i, y)| [i as f64, *y]).collect() };
        assert_eq!(count_local_maxima(&p(&[0.0, 1.0, 0.0, 2.0, 0.0]), 0.0, 4.0, 0.0), 2);
        assert_eq!(count_local_maxima(&p(&[0.0, 1.0, 0.0, 2.0, 0.0]), 2.0, 4.0, 0.0), 1);
        assert_eq!(count_local_maxima(&p(&[0.0, 1.0, 1.0, 0.0]), 0.0, 3.0, 0.0), 0);
        assert_eq!(count_local_maxima(&p(&[0.0, 1e-9, 0.0]), 0.0, 2.0, 1e-6), 0);
    }
}
