//! Rezoning strategies that produce the target mesh of each step.

use super::rng::Rng;
use crate::equations::{transport_velocity, Cons, PhysicsModel};
use crate::error::{Error, Location, Result};
use crate::geometry::{dist, Point};
use crate::grid::{Domain, Grid, Mesh};
use serde::{Deserialize, Serialize};

pub const MAX_SMOOTHING_PASSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RezonerSpec {
    None,
    /// Perturb the uniform mesh by c_r (U₁ h_x, U₂ h_y) and translate by b t.
    Random { c_r: f64, b: [f64; 2] },
    /// Follow the flow, then smooth with Jacobi sweeps.
    LagrangianSmooth { passes: usize },
}

impl RezonerSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RezonerSpec::Random { c_r, .. } if !(c_r.abs() <= 0.5) => {
                Err(Error::Config(format!("|c_r| = {} exceeds 0.5", c_r.abs())))
            }
            RezonerSpec::LagrangianSmooth { passes } if passes > MAX_SMOOTHING_PASSES => Err(Error::Config(format!(
                "at most {} smoothing passes are supported",
                MAX_SMOOTHING_PASSES
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, RezonerSpec::None)
    }
}

/// Stateful rezoner: keeps the initial mesh and the random stream.
#[derive(Clone, Debug)]
pub struct Rezoner {
    pub spec: RezonerSpec,
    base: Mesh,
    domain: Domain,
    rng: Rng,
}

impl Rezoner {
    pub fn new(spec: RezonerSpec, base: Mesh, domain: Domain, seed: u64) -> Self {
        Self {
            spec,
            base,
            domain,
            rng: Rng::new(seed),
        }
    }

    /// Target vertices for the mesh at time `t_next`.
    pub fn plan(&mut self, mesh: &Mesh, averages: &[Cons], volumes: &[f64], model: &PhysicsModel, t_next: f64, dt: f64) -> Result<Vec<Point>> {
        match self.spec {
            RezonerSpec::None => Ok(mesh.vertices.clone()),
            RezonerSpec::Random { c_r, b } => random_rezone(&self.base, &self.domain, t_next, c_r, b, &mut self.rng),
            RezonerSpec::LagrangianSmooth { passes } => lagrangian_smooth_rezone(mesh, averages, volumes, model, dt, passes),
        }
    }
}

fn regular(grid: Grid, vertices: &[Point]) -> Result<()> {
    Mesh {
        grid,
        vertices: vertices.to_vec(),
    }
    .check_regular()
}

/// Random perturbation of the uniform mesh; boundary vertices only translate.
pub fn random_rezone(base: &Mesh, domain: &Domain, t: f64, c_r: f64, b: [f64; 2], rng: &mut Rng) -> Result<Vec<Point>> {
    let g = base.grid;
    let hx = (domain.x1 - domain.x0) / g.nx as f64;
    let hy = (domain.y1 - domain.y0) / g.ny as f64;
    let mut out = Vec::with_capacity(base.vertices.len());
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let p = base.vertex(i, j);
            let interior = i > 0 && i < g.nx && j > 0 && j < g.ny;
            let (dx, dy) = if interior {
                let u1 = rng.centered();
                let u2 = rng.centered();
                (c_r * u1 * hx, c_r * u2 * hy)
            } else {
                (0.0, 0.0)
            };
            out.push([p[0] + dx + b[0] * t, p[1] + dy + b[1] * t]);
        }
    }
    regular(g, &out).map_err(|e| e.within(&Location { time: Some(t), ..Default::default() }))?;
    Ok(out)
}

/// Volume-weighted average of the transport velocities of the cells around each vertex.
pub fn nodal_velocities(grid: &Grid, averages: &[Cons], volumes: &[f64], model: &PhysicsModel) -> Vec<Point> {
    let mut out = vec![[0.0; 2]; grid.num_vertices()];
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let mut sum = [0.0; 2];
            let mut wsum = 0.0;
            for cj in j.saturating_sub(1)..(j + 1).min(grid.ny) {
                for ci in i.saturating_sub(1)..(i + 1).min(grid.nx) {
                    let k = grid.cell(ci, cj);
                    let v = transport_velocity(model, &averages[k]);
                    sum[0] += volumes[k] * v[0];
                    sum[1] += volumes[k] * v[1];
                    wsum += volumes[k];
                }
            }
            out[grid.vertex(i, j)] = [sum[0] / wsum, sum[1] / wsum];
        }
    }
    out
}

/// Which coordinates of a vertex may move: boundary vertices slide along
/// their side and corners stay put.
fn freedom(grid: &Grid, i: usize, j: usize) -> [bool; 2] {
    let xside = i == 0 || i == grid.nx;
    let yside = j == 0 || j == grid.ny;
    [!xside, !yside]
}

fn jacobi_pass(grid: &Grid, v: &[Point]) -> Vec<Point> {
    let mut out = v.to_vec();
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let free = freedom(grid, i, j);
            let p = v[grid.vertex(i, j)];
            let q = &mut out[grid.vertex(i, j)];
            for d in 0..2 {
                if !free[d] {
                    continue;
                }
                let mut s = 0.0;
                let mut n = 0.0;
                let interior_dir = |dd: usize| if dd == 0 { i > 0 && i < grid.nx } else { j > 0 && j < grid.ny };
                // Sliding vertices only average along their side.
                let both = free[0] && free[1];
                if both || d == 0 {
                    if interior_dir(0) {
                        s += v[grid.vertex(i - 1, j)][d] + v[grid.vertex(i + 1, j)][d];
                        n += 2.0;
                    }
                }
                if both || d == 1 {
                    if interior_dir(1) {
                        s += v[grid.vertex(i, j - 1)][d] + v[grid.vertex(i, j + 1)][d];
                        n += 2.0;
                    }
                }
                q[d] = if n > 0.0 { s / n } else { p[d] };
            }
        }
    }
    out
}

/// Lagrangian displacement by Δt times the nodal flow velocity followed by
/// Jacobi smoothing; passes are added until the mesh is regular.
pub fn lagrangian_smooth_rezone(
    mesh: &Mesh,
    averages: &[Cons],
    volumes: &[f64],
    model: &PhysicsModel,
    dt: f64,
    passes: usize,
) -> Result<Vec<Point>> {
    let grid = mesh.grid;
    let vel = nodal_velocities(&grid, averages, volumes, model);
    let mut moved = mesh.vertices.clone();
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let k = grid.vertex(i, j);
            let free = freedom(&grid, i, j);
            for d in 0..2 {
                if free[d] {
                    moved[k][d] += dt * vel[k][d];
                }
            }
        }
    }
    let mut last = None;
    for n in passes..=MAX_SMOOTHING_PASSES {
        let mut v = moved.clone();
        for _ in 0..n {
            v = jacobi_pass(&grid, &v);
        }
        match regular(grid, &v) {
            Ok(()) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Config("no smoothing pass count tried".into())))
}

/// Largest one-sided difference quotient of the mesh velocity between
/// index-adjacent vertices.
pub fn lipschitz_estimate(mesh: &Mesh, w: &[Point]) -> f64 {
    let g = mesh.grid;
    let mut out: f64 = 0.0;
    let mut pair = |a: usize, b: usize| {
        let l = dist(mesh.vertices[a], mesh.vertices[b]);
        let d = (w[a][0] - w[b][0]).abs().max((w[a][1] - w[b][1]).abs());
        out = out.max(d / l);
    };
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            if i < g.nx {
                pair(g.vertex(i, j), g.vertex(i + 1, j));
            }
            if j < g.ny {
                pair(g.vertex(i, j), g.vertex(i, j + 1));
            }
        }
    }
    out
}
