//! The rezoning moving-mesh time loop: evolve on the fixed mesh, rezone,
//! remap.

use super::config::RunConfig;
use super::output::{write_csv, write_vtk, DiagnosticsRow};
use super::problems::Problem;
use super::rezone::{lipschitz_estimate, Rezoner, RezonerSpec};
use crate::boundary::BoundarySpec;
use crate::equations::{Cons, PhysicsModel, MAX_VARS};
use crate::error::{Location, Result};
use crate::evolve::{evolve_step, fixed_geometry, physical_dt, EvolveContext};
use crate::geometry::{MomentSet, Point};
use crate::grid::{Domain, Grid, Mesh};
use crate::reconstruction::{GeometryMode, ReconGeometry};
use crate::remap::{remap, FieldState, RemapConfig, RemapContext};
use std::path::Path;
use std::time::Instant;

/// Scheme parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub final_time: f64,
    pub cfl: f64,
    pub mode: GeometryMode,
    pub pseudo_cfl: f64,
    pub levels: Option<usize>,
    pub tau_final: Option<f64>,
    pub relax_iters: usize,
    pub boundary: BoundarySpec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub levels: usize,
    pub min_volume: f64,
    pub conservation_residual: f64,
    pub lipschitz: f64,
}

impl StepDiagnostics {
    pub fn row(&self) -> DiagnosticsRow {
        DiagnosticsRow {
            step: self.step,
            t: self.t,
            dt: self.dt,
            n_levels: self.levels,
            min_volume: self.min_volume,
            conservation_residual: self.conservation_residual,
        }
    }
}

/// Volume-weighted L¹ and maximum norm of the difference of two scalar fields.
pub fn error_norms(values: &[f64], volumes: &[f64], exact: &[f64]) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut vol = 0.0;
    let mut linf: f64 = 0.0;
    for ((u, v), e) in values.iter().zip(volumes).zip(exact) {
        let d = (u - e).abs();
        l1 += d * v;
        vol += v;
        linf = linf.max(d);
    }
    (l1 / vol, linf)
}

fn sum_abs(v: &[Cons]) -> Cons {
    let mut s = [0.0; MAX_VARS];
    for u in v {
        for c in 0..MAX_VARS {
            s[c] += u[c].abs();
        }
    }
    s
}

pub struct Simulation {
    pub problem: Problem,
    pub settings: Settings,
    pub state: FieldState,
    pub t: f64,
    pub step: usize,
    rezoner: Rezoner,
}

impl Simulation {
    pub fn new(problem: Problem, grid: Grid, domain: Domain, settings: Settings, rezone: RezonerSpec, rezone_seed: u64) -> Result<Self> {
        settings.boundary.validate()?;
        rezone.validate()?;
        let mesh = Mesh::uniform(grid, domain);
        let moments = mesh.exact_moments();
        let averages = problem.initial_averages(&mesh, &moments)?;
        let rezoner = Rezoner::new(rezone, mesh.clone(), domain, rezone_seed);
        Ok(Self {
            problem,
            settings,
            state: FieldState::from_averages(mesh, &averages, moments),
            t: 0.0,
            step: 0,
            rezoner,
        })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let settings = Settings {
            final_time: cfg.final_time(),
            cfl: cfg.time.cfl,
            mode: cfg.scheme.mode,
            pseudo_cfl: cfg.scheme.pseudo_cfl,
            levels: cfg.scheme.levels,
            tau_final: cfg.scheme.tau_final,
            relax_iters: cfg.scheme.relax_iters,
            boundary: cfg.boundary(),
        };
        Self::new(
            cfg.build_problem(),
            Grid::new(cfg.mesh.nx, cfg.mesh.ny),
            cfg.domain(),
            settings,
            cfg.rezone,
            cfg.rezone_seed(),
        )
    }

    pub fn model(&self) -> PhysicsModel {
        self.problem.model()
    }

    pub fn mesh(&self) -> &Mesh {
        &self.state.mesh
    }

    pub fn averages(&self) -> Vec<Cons> {
        self.state.averages()
    }

    pub fn volumes(&self) -> Vec<f64> {
        self.state.egm.iter().map(|m| m.m00).collect()
    }

    /// Reconstruction geometry of the current (fixed) mesh.
    pub fn geometry(&self) -> Vec<ReconGeometry> {
        let exact: Vec<MomentSet> = match self.settings.mode {
            GeometryMode::Tpe2 => self.state.egm.clone(),
            _ => self.state.mesh.exact_moments(),
        };
        fixed_geometry(self.settings.mode, &self.state.egm, &exact)
    }

    pub fn stable_dt(&self) -> Result<f64> {
        physical_dt(self.mesh(), &self.geometry(), &self.averages(), &self.model(), self.settings.cfl)
    }

    fn located(&self, dt: Option<f64>) -> Location {
        Location {
            step: Some(self.step),
            time: Some(self.t + dt.unwrap_or(0.0)),
            ..Default::default()
        }
    }

    /// Advance by `dt`: evolve on the current mesh, rezone, remap.
    pub fn rmm_step(&mut self, dt: f64) -> Result<StepDiagnostics> {
        let at = self.located(None);
        let model = self.model();
        let exact = self.problem.exact_solution();
        let geometry = self.geometry();
        let v_old = self.state.total();
        let scale = sum_abs(&self.state.v);
        let ectx = EvolveContext {
            model,
            boundary: self.settings.boundary,
            exact,
        };
        let (averages, mut outflow) =
            evolve_step(self.mesh(), &geometry, &self.averages(), self.t, dt, &ectx).map_err(|e| e.within(&at))?;
        for (v, (u, g)) in self.state.v.iter_mut().zip(averages.iter().zip(&geometry)) {
            *v = u.map(|x| x * g.volume);
        }
        let t_next = self.t + dt;
        let at = self.located(Some(dt));
        let rctx = RemapContext {
            model,
            boundary: self.settings.boundary,
            exact,
            time: t_next,
        };
        let config = RemapConfig {
            cfl: self.settings.pseudo_cfl,
            mode: self.settings.mode,
            tau_final: self.settings.tau_final.unwrap_or(dt),
            levels: self.settings.levels,
        };
        let mut levels = 0;
        let mut lipschitz: f64 = 0.0;
        for _ in 0..=self.settings.relax_iters {
            let averages = self.state.averages();
            let volumes = self.volumes();
            let target = self
                .rezoner
                .plan(&self.state.mesh, &averages, &volumes, &model, t_next, dt)
                .map_err(|e| e.within(&at))?;
            let w: Vec<Point> = target
                .iter()
                .zip(&self.state.mesh.vertices)
                .map(|(p, q)| [(p[0] - q[0]) / dt, (p[1] - q[1]) / dt])
                .collect();
            lipschitz = lipschitz.max(lipschitz_estimate(&self.state.mesh, &w));
            let (state, report) = remap(self.state.clone(), &target, &config, &rctx).map_err(|e| e.within(&at))?;
            self.state = state;
            levels += report.levels;
            for c in 0..MAX_VARS {
                outflow[c] += report.boundary_outflow[c];
            }
        }
        let v_new = self.state.total();
        let mut residual: f64 = 0.0;
        for c in 0..model.m() {
            if scale[c] > 0.0 {
                residual = residual.max((v_new[c] - v_old[c] + outflow[c]).abs() / scale[c]);
            }
        }
        self.t = t_next;
        self.step += 1;
        Ok(StepDiagnostics {
            step: self.step,
            t: self.t,
            dt,
            levels,
            min_volume: self.volumes().into_iter().fold(f64::INFINITY, f64::min),
            conservation_residual: residual,
            lipschitz,
        })
    }

    /// Run to the final time, calling `observe` after every step.
    pub fn run_with(&mut self, mut observe: impl FnMut(&Simulation, &StepDiagnostics) -> Result<()>) -> Result<Vec<StepDiagnostics>> {
        let tf = self.settings.final_time;
        let mut out = Vec::new();
        while self.t < tf {
            let stable = self.stable_dt().map_err(|e| e.within(&self.located(None)))?;
            // Spread the remaining time evenly so the last step is not tiny.
            let remaining = tf - self.t;
            let n = (remaining / stable * (1.0 - 1e-12)).ceil().max(1.0);
            let dt = if n <= 1.0 { remaining } else { remaining / n };
            let d = self.rmm_step(dt)?;
            if n <= 1.0 {
                self.t = tf;
            }
            observe(self, &d)?;
            out.push(d);
        }
        Ok(out)
    }

    pub fn run(&mut self) -> Result<Vec<StepDiagnostics>> {
        self.run_with(|_, _| Ok(()))
    }

    /// Exact cell averages of the first component at the current time.
    pub fn exact_first_component(&self) -> Option<Vec<f64>> {
        let exact = self.problem.exact_solution()?;
        let mesh = self.mesh();
        let moments = mesh.exact_moments();
        let g = mesh.grid;
        Some(
            (0..g.num_cells())
                .map(|k| exact.cell_average(&mesh.cell(k % g.nx, k / g.nx), &moments[k], self.t)[0])
                .collect(),
        )
    }

    /// (L¹, L∞) error of the first component against the exact solution.
    pub fn error_norms(&self) -> Option<(f64, f64)> {
        let exact = self.exact_first_component()?;
        let values: Vec<f64> = self.averages().iter().map(|u| u[0]).collect();
        Some(error_norms(&values, &self.volumes(), &exact))
    }
}

/// Summary of a configured run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub mean_levels: f64,
    pub max_residual: f64,
    pub max_lipschitz: f64,
    pub errors: Option<(f64, f64)>,
    pub runtime_s: f64,
}

/// Run a configuration and write the outputs it requests.
pub fn run_config(cfg: &RunConfig) -> Result<(Simulation, RunSummary)> {
    let start = Instant::now();
    let mut sim = Simulation::from_config(cfg)?;
    let snapshot_dir = cfg.output.snapshot_dir.clone();
    let every = cfg.output.snapshot_every;
    let model = sim.model();
    let snap = |sim: &Simulation, dir: &str| {
        let path = Path::new(dir).join(format!("snapshot_{:06}.vtk", sim.step));
        write_vtk(&path, sim.mesh(), &sim.averages(), &model, &format!("step {} t {:e}", sim.step, sim.t))
    };
    if let (Some(dir), true) = (&snapshot_dir, every > 0) {
        snap(&sim, dir)?;
    }
    let diags = sim.run_with(|s, _| {
        if let (Some(dir), true) = (&snapshot_dir, every > 0 && s.step % every.max(1) == 0) {
            snap(s, dir)?;
        }
        Ok(())
    })?;
    if let Some(dir) = &snapshot_dir {
        if every == 0 || sim.step % every != 0 {
            snap(&sim, dir)?;
        }
    }
    if let Some(path) = &cfg.output.diagnostics_csv {
        let rows: Vec<DiagnosticsRow> = diags.iter().map(|d| d.row()).collect();
        write_csv(Path::new(path), &rows)?;
    }
    let errors = sim.error_norms();
    let summary = RunSummary {
        steps: diags.len(),
        final_time: sim.t,
        mean_levels: if diags.is_empty() {
            0.0
        } else {
            diags.iter().map(|d| d.levels as f64).sum::<f64>() / diags.len() as f64
        },
        max_residual: diags.iter().map(|d| d.conservation_residual).fold(0.0, f64::max),
        max_lipschitz: diags.iter().map(|d| d.lipschitz).fold(0.0, f64::max),
        errors,
        runtime_s: start.elapsed().as_secs_f64(),
    };
    if let (Some(path), Some((l1, linf))) = (&cfg.output.errors_csv, errors) {
        let row = super::output::ErrorRow {
            mesh: format!("{}x{}", cfg.mesh.nx, cfg.mesh.ny),
            nx: cfg.mesh.nx,
            ny: cfg.mesh.ny,
            l1,
            linf,
            order_l1: None,
            order_linf: None,
            n_levels_avg: summary.mean_levels,
            lw_max: summary.max_lipschitz,
            runtime_s: summary.runtime_s,
        };
        write_csv(Path::new(path), &[row])?;
    }
    Ok((sim, summary))
}
