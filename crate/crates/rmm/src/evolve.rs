//! Fixed-mesh physical evolution: LLF fluxes on reconstructed traces and
//! SSPRK3 in physical time.

use crate::boundary::{fill_ghosts, BoundarySpec, ExactSolution, ExtGeometry, GhostContext};
use crate::equations::{flux_and_speed, is_admissible, max_wavespeed, Cons, PhysicsModel, MAX_VARS};
use crate::error::{Error, Location, Result};
use crate::geometry::{MomentSet, GL_WEIGHTS};
use crate::grid::{accumulate, active_edges, compute_edge_fluxes, Edge, EdgeRef, Grid, Mesh};
use crate::reconstruction::{reconstruct_field, FieldInput, GeometryMode, IndicatorVelocity, ReconGeometry};
use crate::time::{ssprk3_step, STAGE_OFFSETS, STAGE_WEIGHTS};
use rayon::prelude::*;

/// Everything the fixed-mesh operator needs besides the data.
#[derive(Clone, Copy)]
pub struct EvolveContext<'a> {
    pub model: PhysicsModel,
    pub boundary: BoundarySpec,
    pub exact: Option<&'a dyn ExactSolution>,
}

/// ½[F(U_int)·n + F(U_ext)·n − ã (U_ext − U_int)].
#[inline]
pub fn llf_physical_flux(model: &PhysicsModel, u_int: &Cons, u_ext: &Cons, n: [f64; 2], a_max: f64) -> Result<Cons> {
    let (fi, _) = flux_and_speed(model, u_int, n)?;
    let (fe, _) = flux_and_speed(model, u_ext, n)?;
    Ok(std::array::from_fn(|c| 0.5 * (fi[c] + fe[c] - a_max * (u_ext[c] - u_int[c]))))
}

/// Per-cell reconstruction geometry on a fixed mesh for the given mode.
pub fn fixed_geometry(mode: GeometryMode, egm: &[MomentSet], exact: &[MomentSet]) -> Vec<ReconGeometry> {
    egm.iter()
        .zip(exact)
        .map(|(e, x)| ReconGeometry::for_mode(mode, e, x))
        .collect()
}

/// C · min over cells of volume / max_k (ã_k |l_k|), with ã from the cell average.
pub fn physical_dt(mesh: &Mesh, geometry: &[ReconGeometry], averages: &[Cons], model: &PhysicsModel, cfl: f64) -> Result<f64> {
    let g = mesh.grid;
    let ratios = (0..g.num_cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % g.nx, k / g.nx);
            let cell = mesh.cell(i, j);
            let mut rate: f64 = 0.0;
            for e in 0..4 {
                let edge = Edge::new(cell.vertices[e], cell.vertices[(e + 1) % 4]);
                let a = max_wavespeed(model, &averages[k], edge.normal).map_err(|err| err.at_cell(i, j))?;
                rate = rate.max(a * edge.length);
            }
            Ok(if rate > 0.0 { geometry[k].volume / rate } else { f64::INFINITY })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(cfl * ratios.into_iter().fold(f64::INFINITY, f64::min))
}

/// When ghost data are taken from the exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GhostTime {
    /// Exact solution at this time.
    At(f64),
    /// Exact solution advanced by the same SSPRK3 stage as the interior
    /// (stage 0, 1 or 2 of the step from `t0` of size `dt`).
    Stage { t0: f64, dt: f64, stage: usize },
}

/// Stage-consistent ghost data: with G(s) = exact data at t0 + s·dt, the
/// SSPRK3 stages of a solution quadratic in time are G(0),
/// G(0) + G'(0) = -2G(0) + 4G(1/2) - G(1), and G(0) + G'(0)/2 + G''(0)/4 =
/// (G(0) + G(1))/2.
const STAGE_GHOST_COMBINATIONS: [[(f64, f64); 3]; 3] = [
    [(0.0, 1.0), (0.5, 0.0), (1.0, 0.0)],
    [(0.0, -2.0), (0.5, 4.0), (1.0, -1.0)],
    [(0.0, 0.5), (0.5, 0.0), (1.0, 0.5)],
];

fn ghost_averages(grid: &Grid, ext: &ExtGeometry, averages: &[Cons], when: GhostTime, ctx: &EvolveContext) -> Result<Vec<Cons>> {
    let fill = |time: f64| {
        fill_ghosts(
            grid,
            ext,
            averages,
            &GhostContext {
                model: ctx.model,
                spec: ctx.boundary,
                exact: ctx.exact,
                time,
            },
        )
    };
    match when {
        GhostTime::At(t) => fill(t),
        GhostTime::Stage { t0, stage: 0, .. } => fill(t0),
        GhostTime::Stage { t0, dt, stage } if ctx.boundary.needs_exact() => {
            let mut out = vec![[0.0; MAX_VARS]; grid.num_ext_cells()];
            for &(s, c) in &STAGE_GHOST_COMBINATIONS[stage] {
                if c == 0.0 {
                    continue;
                }
                for (o, g) in out.iter_mut().zip(fill(t0 + s * dt)?) {
                    for k in 0..MAX_VARS {
                        o[k] += c * g[k];
                    }
                }
            }
            Ok(out)
        }
        GhostTime::Stage { t0, dt, stage } => fill(t0 + STAGE_OFFSETS[stage] * dt),
    }
}

/// Semi-discrete right-hand side dŪ/dt and the net boundary outflow rate.
pub fn physical_rhs(
    mesh: &Mesh,
    geometry: &[ReconGeometry],
    averages: &[Cons],
    when: GhostTime,
    edges: &[EdgeRef],
    ctx: &EvolveContext,
) -> Result<(Vec<Cons>, Cons)> {
    let grid = mesh.grid;
    let periodic = ctx.boundary.periodic();
    let ext = ExtGeometry::build(&grid, &mesh.vertices, geometry, &ctx.boundary);
    let ext_avgs = ghost_averages(&grid, &ext, averages, when, ctx)?;
    let velocity = match ctx.model {
        PhysicsModel::Advection { a } => IndicatorVelocity::Uniform(a),
        PhysicsModel::Euler { .. } => IndicatorVelocity::CellAverage,
    };
    let rec = reconstruct_field(&FieldInput {
        grid,
        vertices: &ext.vertices,
        geometry: &ext.recon,
        averages: &ext_avgs,
        model: ctx.model,
        periodic,
        velocity,
    })?;
    let model = ctx.model;
    let fluxes = compute_edge_fluxes::<MAX_VARS, _>(&grid, edges, |e| {
        let (a, b) = e.endpoints;
        let edge = Edge::new(mesh.vertices[a], mesh.vertices[b]);
        let (ti, te) = rec.edge_traces(e, &edge);
        let cell = if e.outer.0 < grid.nx as isize && e.outer.1 < grid.ny as isize {
            e.outer
        } else {
            e.inner
        };
        let located = |err: Error| err.at_cell(cell.0.max(0) as usize, cell.1.max(0) as usize);
        let mut a_max: f64 = 0.0;
        for g in 0..3 {
            a_max = a_max
                .max(max_wavespeed(&model, &ti[g], edge.normal).map_err(located)?)
                .max(max_wavespeed(&model, &te[g], edge.normal).map_err(located)?);
        }
        let mut out = [0.0; MAX_VARS];
        for g in 0..3 {
            let f = llf_physical_flux(&model, &ti[g], &te[g], edge.normal, a_max).map_err(located)?;
            for c in 0..MAX_VARS {
                out[c] += edge.length * GL_WEIGHTS[g] * f[c];
            }
        }
        Ok(out)
    })?;
    let (net, boundary) = accumulate(&grid, &fluxes, periodic);
    let rhs = net
        .iter()
        .zip(geometry)
        .map(|(n, geo)| n.map(|x| -x / geo.volume))
        .collect();
    Ok((rhs, boundary))
}

/// One SSPRK3 step on the fixed mesh. Returns the new averages and the
/// time-integrated net boundary outflow of the conserved variables.
pub fn evolve_step(
    mesh: &Mesh,
    geometry: &[ReconGeometry],
    averages: &[Cons],
    t: f64,
    dt: f64,
    ctx: &EvolveContext,
) -> Result<(Vec<Cons>, Cons)> {
    let edges = active_edges(&mesh.grid, ctx.boundary.periodic());
    let mut stage_boundary = [[0.0; MAX_VARS]; 3];
    let out = ssprk3_step(averages, t, dt, |stage, ts, u| {
        let at = Location {
            stage: Some(stage),
            time: Some(ts),
            ..Default::default()
        };
        if ctx.model.is_euler() {
            let nx = mesh.grid.nx;
            if let Some(k) = u.iter().position(|s| !is_admissible(&ctx.model, s)) {
                return Err(Error::State {
                    reason: "stage average is not physical".into(),
                    at: Location {
                        cell: Some((k % nx, k / nx)),
                        ..at
                    },
                });
            }
        }
        let when = GhostTime::Stage { t0: t, dt, stage };
        let (rhs, b) = physical_rhs(mesh, geometry, u, when, &edges, ctx).map_err(|e| e.within(&at))?;
        stage_boundary[stage] = b;
        Ok::<_, Error>(rhs)
    })?;
    let nx = mesh.grid.nx;
    for (k, u) in out.iter().enumerate() {
        if !is_admissible(&ctx.model, u) {
            return Err(Error::State {
                reason: "updated average is not physical".into(),
                at: Location {
                    cell: Some((k % nx, k / nx)),
                    time: Some(t + dt),
                    ..Default::default()
                },
            });
        }
    }
    let mut boundary = [0.0; MAX_VARS];
    for s in 0..3 {
        for c in 0..MAX_VARS {
            boundary[c] += dt * STAGE_WEIGHTS[s] * stage_boundary[s][c];
        }
    }
    Ok((out, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llf_examples() {
        let m = PhysicsModel::Advection { a: [1.0, 0.0] };
        let f = llf_physical_flux(&m, &[1.0, 0.0, 0.0, 0.0], &[3.0, 0.0, 0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        assert_eq!(f[0], 1.0);
        let f = llf_physical_flux(&m, &[2.0, 0.0, 0.0, 0.0], &[2.0, 0.0, 0.0, 0.0], [0.6, 0.8], 0.6).unwrap();
        assert!((f[0] - 1.2).abs() < 1e-15);
    }
}
