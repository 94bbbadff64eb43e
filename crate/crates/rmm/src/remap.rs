//! Pseudo-time remapping: the integrated conserved variables and the evolved
//! geometric moments are transported together with LLF fluxes and SSPRK3
//! while the vertices move on straight lines.

use crate::boundary::{extend_vertices, fill_ghosts, BoundarySpec, ExactSolution, ExtGeometry, Extension, GhostContext};
use crate::equations::{is_admissible, Cons, PhysicsModel, MAX_VARS};
use crate::error::{Error, Location, Result};
use crate::geometry::{midpoint, CellGeometry, MomentSet, Point, GL_WEIGHTS};
use crate::grid::{accumulate, active_edges, compute_edge_fluxes, Edge, EdgeRef, Mesh};
use crate::reconstruction::{reconstruct_field, FieldInput, GeometryMode, IndicatorVelocity, ReconGeometry};
use crate::time::{ssprk3_step, STAGE_OFFSETS, STAGE_WEIGHTS};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemapConfig {
    pub cfl: f64,
    pub mode: GeometryMode,
    pub tau_final: f64,
    /// Fixed number of uniform pseudo-time levels instead of the CFL rule.
    pub levels: Option<usize>,
}

impl RemapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("pseudo-time CFL {} outside (0, 1]", self.cfl)));
        }
        if !(self.tau_final > 0.0) {
            return Err(Error::Config("tau_final must be positive".into()));
        }
        if self.levels == Some(0) {
            return Err(Error::Config("forced level count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Integrated conserved variables and evolved moments on a mesh. In every
/// mode `egm[k].m00` is the volume that turns V into a cell average.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub mesh: Mesh,
    pub v: Vec<Cons>,
    pub egm: Vec<MomentSet>,
    pub tau: f64,
}

impl FieldState {
    pub fn from_averages(mesh: Mesh, averages: &[Cons], egm: Vec<MomentSet>) -> Self {
        let v = averages
            .iter()
            .zip(&egm)
            .map(|(u, m)| u.map(|x| x * m.m00))
            .collect();
        Self { mesh, v, egm, tau: 0.0 }
    }

    pub fn averages(&self) -> Vec<Cons> {
        self.v
            .iter()
            .zip(&self.egm)
            .map(|(v, m)| v.map(|x| x / m.m00))
            .collect()
    }

    pub fn total(&self) -> Cons {
        let mut s = [0.0; MAX_VARS];
        for v in &self.v {
            for c in 0..MAX_VARS {
                s[c] += v[c];
            }
        }
        s
    }
}

/// What the remap needs to know about the problem for ghost cells.
#[derive(Clone, Copy)]
pub struct RemapContext<'a> {
    pub model: PhysicsModel,
    pub boundary: BoundarySpec,
    pub exact: Option<&'a dyn ExactSolution>,
    /// Physical time at which exact ghost data are evaluated.
    pub time: f64,
}

/// Σ_g ω_g x^s y^r (w_g · n*) on the edge p0 → p1, where n* is the edge
/// vector rotated by -π/2 and w is linear along the edge.
#[inline]
pub fn edge_moment_flux(p0: Point, p1: Point, w0: Point, w1: Point) -> [f64; 6] {
    let ns = [p1[1] - p0[1], -(p1[0] - p0[0])];
    let pts = [p0, midpoint(p0, p1), p1];
    let ws = [w0, midpoint(w0, w1), w1];
    let mut out = [0.0; 6];
    for g in 0..3 {
        let [x, y] = pts[g];
        let f = GL_WEIGHTS[g] * (ws[g][0] * ns[0] + ws[g][1] * ns[1]);
        out[0] += f;
        out[1] += f * x;
        out[2] += f * y;
        out[3] += f * x * x;
        out[4] += f * x * y;
        out[5] += f * y * y;
    }
    out
}

/// d/dτ of the six moments of a single moving cell.
pub fn moment_rhs(cell: &CellGeometry, velocities: &[Point; 4]) -> MomentSet {
    let mut out = [0.0; 6];
    for k in 0..4 {
        let f = edge_moment_flux(
            cell.vertices[k],
            cell.vertices[(k + 1) % 4],
            velocities[k],
            velocities[(k + 1) % 4],
        );
        for (o, v) in out.iter_mut().zip(f) {
            *o += v;
        }
    }
    MomentSet::from_array(out)
}

/// ½[G(U_int)·n + G(U_ext)·n − a_max (U_ext − U_int)] with G(U) = −U ⊗ w.
#[inline]
pub fn llf_remap_flux(u_int: &Cons, u_ext: &Cons, wn: f64, a_max: f64) -> Cons {
    std::array::from_fn(|c| 0.5 * (-(u_int[c] + u_ext[c]) * wn - a_max * (u_ext[c] - u_int[c])))
}

/// C · min over cells of m00 / max_k (a_max,k |l_k|); infinite for a static mesh.
pub fn pseudo_dt(mesh: &Mesh, velocities: &[Point], cfl: f64) -> f64 {
    let g = mesh.grid;
    let ratio = (0..g.num_cells())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % g.nx, k / g.nx);
            let cell = mesh.cell(i, j);
            let ids = [g.vertex(i, j), g.vertex(i + 1, j), g.vertex(i + 1, j + 1), g.vertex(i, j + 1)];
            let mut rate: f64 = 0.0;
            for e in 0..4 {
                let p0 = cell.vertices[e];
                let p1 = cell.vertices[(e + 1) % 4];
                let ns = [p1[1] - p0[1], -(p1[0] - p0[0])];
                for id in [ids[e], ids[(e + 1) % 4]] {
                    let w = velocities[id];
                    rate = rate.max((w[0] * ns[0] + w[1] * ns[1]).abs());
                }
            }
            if rate > 0.0 {
                cell.signed_area() / rate
            } else {
                f64::INFINITY
            }
        })
        .reduce(|| f64::INFINITY, f64::min);
    cfl * ratio
}

/// Lower bound on the number of pseudo-time levels for a given displacement.
pub fn estimate_levels(displacements: &[Point], mesh: &Mesh, cfl: f64) -> usize {
    let g = mesh.grid;
    let mut worst: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let cell = mesh.cell(i, j);
            let ids = [g.vertex(i, j), g.vertex(i + 1, j), g.vertex(i + 1, j + 1), g.vertex(i, j + 1)];
            let dmax = ids
                .iter()
                .map(|&id| (displacements[id][0].powi(2) + displacements[id][1].powi(2)).sqrt())
                .fold(0.0, f64::max);
            let lmax = (0..4)
                .map(|e| crate::geometry::dist(cell.vertices[e], cell.vertices[(e + 1) % 4]))
                .fold(0.0, f64::max);
            worst = worst.max(dmax * lmax / (cfl * cell.signed_area()));
        }
    }
    (worst.ceil() as usize).max(1)
}

const PACK: usize = 10;

fn pack(state: &FieldState) -> Vec<[f64; PACK]> {
    state
        .v
        .iter()
        .zip(&state.egm)
        .map(|(v, m)| {
            let a = m.to_array();
            [v[0], v[1], v[2], v[3], a[0], a[1], a[2], a[3], a[4], a[5]]
        })
        .collect()
}

fn unpack_moments(u: &[f64; PACK]) -> MomentSet {
    MomentSet::from_array([u[4], u[5], u[6], u[7], u[8], u[9]])
}

fn unpack_v(u: &[f64; PACK]) -> Cons {
    [u[0], u[1], u[2], u[3]]
}

/// Right-hand side of the packed (V, M̃) system on one stage geometry.
fn stage_rhs(
    mesh: &Mesh,
    u: &[[f64; PACK]],
    w: &[Point],
    w_ext: &[Point],
    edges: &[EdgeRef],
    mode: GeometryMode,
    ctx: &RemapContext,
) -> Result<(Vec<[f64; PACK]>, Cons)> {
    let grid = mesh.grid;
    let periodic = ctx.boundary.periodic();
    let exact = if mode == GeometryMode::Tpe2 {
        Vec::new()
    } else {
        mesh.exact_moments()
    };
    let mut geos = Vec::with_capacity(u.len());
    let mut avgs = Vec::with_capacity(u.len());
    for (k, uk) in u.iter().enumerate() {
        let egm = unpack_moments(uk);
        let geo = match mode {
            GeometryMode::Tpe2 => ReconGeometry::for_mode(mode, &egm, &egm),
            _ => ReconGeometry::for_mode(mode, &egm, &exact[k]),
        };
        if !(geo.volume > 0.0) {
            return Err(Error::NegativeVolume {
                volume: geo.volume,
                at: Location {
                    cell: Some((k % grid.nx, k / grid.nx)),
                    ..Default::default()
                },
            });
        }
        let v = unpack_v(uk);
        avgs.push(v.map(|x| x / geo.volume));
        geos.push(geo);
    }
    let ext = ExtGeometry::build(&grid, &mesh.vertices, &geos, &ctx.boundary);
    let ghost_ctx = GhostContext {
        model: ctx.model,
        spec: ctx.boundary,
        exact: ctx.exact,
        time: ctx.time,
    };
    let ext_avgs = fill_ghosts(&grid, &ext, &avgs, &ghost_ctx)?;
    let rec = reconstruct_field(&FieldInput {
        grid,
        vertices: &ext.vertices,
        geometry: &ext.recon,
        averages: &ext_avgs,
        model: ctx.model,
        periodic,
        velocity: IndicatorVelocity::MeshMotion(w_ext),
    })?;
    let m = ctx.model.m();
    let fluxes = compute_edge_fluxes::<MAX_VARS, _>(&grid, edges, |e| {
        let (a, b) = e.endpoints;
        let edge = Edge::new(mesh.vertices[a], mesh.vertices[b]);
        let ws = [w[a], midpoint(w[a], w[b]), w[b]];
        let wn = ws.map(|v| v[0] * edge.nstar[0] + v[1] * edge.nstar[1]);
        let a_max = wn.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let (ti, te) = rec.edge_traces(e, &edge);
        let mut out = [0.0; MAX_VARS];
        for g in 0..3 {
            let f = llf_remap_flux(&ti[g], &te[g], wn[g], a_max);
            for c in 0..m {
                out[c] += GL_WEIGHTS[g] * f[c];
            }
        }
        Ok(out)
    })?;
    let (net, boundary) = accumulate(&grid, &fluxes, periodic);
    // Moment rates use each cell's own edges: with periodic sides the aliased
    // edge sits one period away and x^s y^r is not translation invariant.
    let rhs = net
        .into_par_iter()
        .enumerate()
        .map(|(k, n)| {
            let (i, j) = (k % grid.nx, k / grid.nx);
            let ids = [grid.vertex(i, j), grid.vertex(i + 1, j), grid.vertex(i + 1, j + 1), grid.vertex(i, j + 1)];
            let dm = moment_rhs(&mesh.cell(i, j), &ids.map(|id| w[id])).to_array();
            [-n[0], -n[1], -n[2], -n[3], dm[0], dm[1], dm[2], dm[3], dm[4], dm[5]]
        })
        .collect();
    Ok((rhs, boundary))
}

/// Result of one pseudo-time step: the new state and the time-integrated net
/// outflow of V through non-periodic boundaries.
pub fn remap_step(
    state: &FieldState,
    velocities: &[Point],
    dtau: f64,
    mode: GeometryMode,
    ctx: &RemapContext,
) -> Result<(FieldState, Cons)> {
    if velocities.iter().all(|w| w[0] == 0.0 && w[1] == 0.0) {
        let mut out = state.clone();
        out.tau += dtau;
        return Ok((out, [0.0; MAX_VARS]));
    }
    let grid = state.mesh.grid;
    let w_ext = extend_vertices(&grid, velocities, &ctx.boundary, Extension::Velocities);
    let edges = active_edges(&grid, ctx.boundary.periodic());
    let u0 = pack(state);
    let mut stage_boundary = [[0.0; MAX_VARS]; 3];
    let u = ssprk3_step(&u0, 0.0, dtau, |stage, t, u| {
        let at = Location {
            stage: Some(stage),
            tau: Some(state.tau + t),
            ..Default::default()
        };
        let mesh = state.mesh.moved(velocities, t);
        mesh.check_regular().map_err(|e| e.within(&at))?;
        let (rhs, b) = stage_rhs(&mesh, u, velocities, &w_ext, &edges, mode, ctx).map_err(|e| e.within(&at))?;
        stage_boundary[stage] = b;
        Ok::<_, Error>(rhs)
    })?;
    let mesh = state.mesh.moved(velocities, dtau);
    let mut out = FieldState {
        mesh,
        v: u.iter().map(unpack_v).collect(),
        egm: u.iter().map(unpack_moments).collect(),
        tau: state.tau + dtau,
    };
    finalize_moments(&mut out, mode);
    check_volumes(&out, Some(out.tau))?;
    let mut boundary = [0.0; MAX_VARS];
    for s in 0..3 {
        for c in 0..MAX_VARS {
            boundary[c] += dtau * STAGE_WEIGHTS[s] * stage_boundary[s][c];
        }
    }
    let _ = STAGE_OFFSETS;
    Ok((out, boundary))
}

/// Replace the moments a mode does not evolve by exact ones.
fn finalize_moments(state: &mut FieldState, mode: GeometryMode) {
    match mode {
        GeometryMode::Tpe2 => {}
        GeometryMode::Gcl => {
            let exact = state.mesh.exact_moments();
            for (e, x) in state.egm.iter_mut().zip(exact) {
                *e = MomentSet { m00: e.m00, ..x };
            }
        }
        GeometryMode::NonGcl => state.egm = state.mesh.exact_moments(),
    }
}

fn check_volumes(state: &FieldState, tau: Option<f64>) -> Result<()> {
    let nx = state.mesh.grid.nx;
    for (k, m) in state.egm.iter().enumerate() {
        if !(m.m00 > 0.0) {
            return Err(Error::NegativeVolume {
                volume: m.m00,
                at: Location {
                    cell: Some((k % nx, k / nx)),
                    tau,
                    ..Default::default()
                },
            });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemapReport {
    pub levels: usize,
    /// Time-integrated net outflow of V through non-periodic boundaries.
    pub boundary_outflow: Cons,
}

/// Transfer `state` to the mesh with vertices `target`.
pub fn remap(state: FieldState, target: &[Point], config: &RemapConfig, ctx: &RemapContext) -> Result<(FieldState, RemapReport)> {
    config.validate()?;
    let displacement: Vec<Point> = target
        .iter()
        .zip(&state.mesh.vertices)
        .map(|(t, s)| [t[0] - s[0], t[1] - s[1]])
        .collect();
    let mut report = RemapReport {
        levels: 1,
        boundary_outflow: [0.0; MAX_VARS],
    };
    if displacement.iter().all(|d| d[0] == 0.0 && d[1] == 0.0) {
        let mut out = state;
        out.tau = 0.0;
        return Ok((out, report));
    }
    let tf = config.tau_final;
    let w: Vec<Point> = displacement.iter().map(|d| [d[0] / tf, d[1] / tf]).collect();
    let mut s = state;
    s.tau = 0.0;
    report.levels = 0;
    loop {
        let mut dtau = match config.levels {
            Some(n) => tf / n as f64,
            None => pseudo_dt(&s.mesh, &w, config.cfl),
        };
        let last = s.tau + dtau >= tf * (1.0 - 1e-12);
        if last {
            dtau = tf - s.tau;
        }
        let (next, b) = remap_step(&s, &w, dtau, config.mode, ctx)?;
        s = next;
        report.levels += 1;
        for c in 0..MAX_VARS {
            report.boundary_outflow[c] += b[c];
        }
        if last {
            break;
        }
    }
    s.mesh.vertices = target.to_vec();
    s.tau = tf;
    if ctx.model.is_euler() {
        let nx = s.mesh.grid.nx;
        for (k, u) in s.averages().iter().enumerate() {
            if !is_admissible(&ctx.model, u) {
                return Err(Error::State {
                    reason: "remapped average is not physical".into(),
                    at: Location {
                        cell: Some((k % nx, k / nx)),
                        ..Default::default()
                    },
                });
            }
        }
    }
    Ok((s, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llf_remap_flux_examples() {
        let f = llf_remap_flux(&[1.0, 0.0, 0.0, 0.0], &[3.0, 0.0, 0.0, 0.0], 2.0, 2.0);
        assert_eq!(f[0], -6.0);
        let f = llf_remap_flux(&[2.5, 0.0, 0.0, 0.0], &[2.5, 0.0, 0.0, 0.0], 0.7, 1.0);
        assert!((f[0] + 2.5 * 0.7).abs() < 1e-15);
        let f = llf_remap_flux(&[1.0, 0.0, 0.0, 0.0], &[-4.0, 0.0, 0.0, 0.0], 0.0, 0.0);
        assert_eq!(f[0], 0.0);
    }

    #[test]
    fn moment_rhs_examples() {
        let sq = CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let r = moment_rhs(&sq, &[[0.0, 0.0]; 4]);
        assert_eq!(r.to_array(), [0.0; 6]);
        let r = moment_rhs(&sq, &[[1.0, 0.0]; 4]);
        assert!(r.m00.abs() < 1e-15 && (r.m10 - 1.0).abs() < 1e-15);
        let r = moment_rhs(&sq, &sq.vertices);
        assert!((r.m00 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn level_estimate_example() {
        let mesh = Mesh::uniform(crate::grid::Grid::new(1, 1), crate::grid::Domain::unit());
        let d = vec![[0.1, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]];
        assert_eq!(estimate_levels(&d, &mesh, 0.25), 1);
        assert_eq!(estimate_levels(&[[0.0; 2]; 4], &mesh, 0.25), 1);
        let w = vec![[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]];
        let mesh2 = Mesh::uniform(crate::grid::Grid::new(1, 1), crate::grid::Domain::unit());
        assert!((pseudo_dt(&mesh2, &w, 0.25) - 0.25).abs() < 1e-15);
        assert_eq!(pseudo_dt(&mesh2, &[[0.0; 2]; 4], 0.25), f64::INFINITY);
    }
}
