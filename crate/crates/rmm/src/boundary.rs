//! Boundary conditions and the two ghost layers around the mesh.
//!
//! Ghost vertices are filled in two passes: the left and right sides first
//! for every real row, then the bottom and top sides for every column of the
//! partly extended array (which takes care of the corners). Periodic sides
//! copy vertices shifted by the domain period; every other side mirrors them
//! across the (axis-aligned) side line. Ghost cell data follow the same two
//! passes.

use crate::equations::{primitive_to_conserved, Cons, PhysicsModel};
use crate::error::{Error, Result};
use crate::geometry::{exact_moments, CellGeometry, MomentSet, Point};
use crate::grid::{ext_cell_geometry, Grid};
use crate::reconstruction::ReconGeometry;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    /// Ghost averages of the analytic solution at the stage time.
    Exact,
    Reflective,
    Outflow,
    /// Double Mach reflection inflow, wall and moving-shock conditions.
    DmrSpecial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub bottom: BoundaryKind,
    pub top: BoundaryKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundarySpec {
    pub fn all(kind: BoundaryKind) -> Self {
        Self {
            left: kind,
            right: kind,
            bottom: kind,
            top: kind,
        }
    }

    pub fn side(&self, side: Side) -> BoundaryKind {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }

    pub fn periodic(&self) -> [bool; 2] {
        [
            self.left == BoundaryKind::Periodic,
            self.bottom == BoundaryKind::Periodic,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let pair = |a: BoundaryKind, b: BoundaryKind, name: &str| {
            if (a == BoundaryKind::Periodic) != (b == BoundaryKind::Periodic) {
                Err(Error::Config(format!("periodic {} sides must come in pairs", name)))
            } else {
                Ok(())
            }
        };
        pair(self.left, self.right, "x")?;
        pair(self.bottom, self.top, "y")
    }

    pub fn needs_exact(&self) -> bool {
        [self.left, self.right, self.bottom, self.top].contains(&BoundaryKind::Exact)
    }
}

/// Analytic cell averages used by exact boundary conditions and error norms.
pub trait ExactSolution: Sync {
    fn cell_average(&self, cell: &CellGeometry, moments: &MomentSet, t: f64) -> Cons;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Positions,
    /// Vertex velocities: mirrored sides flip the normal component.
    Velocities,
}

/// Index of the cell whose data a ghost at `i` copies or mirrors.
fn source_index(n: usize, i: isize, kind: BoundaryKind) -> isize {
    let n = n as isize;
    if i < 0 {
        match kind {
            BoundaryKind::Periodic => i + n,
            BoundaryKind::Outflow => 0,
            _ => -1 - i,
        }
    } else if i >= n {
        match kind {
            BoundaryKind::Periodic => i - n,
            BoundaryKind::Outflow => n - 1,
            _ => 2 * n - 1 - i,
        }
    } else {
        i
    }
}

pub fn extend_vertices(grid: &Grid, real: &[Point], spec: &BoundarySpec, what: Extension) -> Vec<Point> {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let mut out = vec![[f64::NAN; 2]; grid.num_ext_vertices()];
    for j in 0..=ny {
        for i in 0..=nx {
            out[grid.ext_vertex(i, j)] = real[grid.vertex(i as usize, j as usize)];
        }
    }
    let vel = what == Extension::Velocities;
    for j in 0..=ny {
        let p0 = out[grid.ext_vertex(0, j)];
        let p1 = out[grid.ext_vertex(nx, j)];
        let period = [p1[0] - p0[0], p1[1] - p0[1]];
        for k in 1..=2isize {
            out[grid.ext_vertex(-k, j)] = if spec.left == BoundaryKind::Periodic {
                let s = out[grid.ext_vertex(nx - k, j)];
                if vel {
                    s
                } else {
                    [s[0] - period[0], s[1] - period[1]]
                }
            } else {
                let s = out[grid.ext_vertex(k, j)];
                if vel {
                    [-s[0], s[1]]
                } else {
                    [2.0 * p0[0] - s[0], s[1]]
                }
            };
            out[grid.ext_vertex(nx + k, j)] = if spec.right == BoundaryKind::Periodic {
                let s = out[grid.ext_vertex(k, j)];
                if vel {
                    s
                } else {
                    [s[0] + period[0], s[1] + period[1]]
                }
            } else {
                let s = out[grid.ext_vertex(nx - k, j)];
                if vel {
                    [-s[0], s[1]]
                } else {
                    [2.0 * p1[0] - s[0], s[1]]
                }
            };
        }
    }
    for i in -2..=nx + 2 {
        let p0 = out[grid.ext_vertex(i, 0)];
        let p1 = out[grid.ext_vertex(i, ny)];
        let period = [p1[0] - p0[0], p1[1] - p0[1]];
        for k in 1..=2isize {
            out[grid.ext_vertex(i, -k)] = if spec.bottom == BoundaryKind::Periodic {
                let s = out[grid.ext_vertex(i, ny - k)];
                if vel {
                    s
                } else {
                    [s[0] - period[0], s[1] - period[1]]
                }
            } else {
                let s = out[grid.ext_vertex(i, k)];
                if vel {
                    [s[0], -s[1]]
                } else {
                    [s[0], 2.0 * p0[1] - s[1]]
                }
            };
            out[grid.ext_vertex(i, ny + k)] = if spec.top == BoundaryKind::Periodic {
                let s = out[grid.ext_vertex(i, k)];
                if vel {
                    s
                } else {
                    [s[0] + period[0], s[1] + period[1]]
                }
            } else {
                let s = out[grid.ext_vertex(i, ny - k)];
                if vel {
                    [s[0], -s[1]]
                } else {
                    [s[0], 2.0 * p1[1] - s[1]]
                }
            };
        }
    }
    out
}

/// Ghost cells of the first pass (left/right) followed by the second
/// (bottom/top), each with its source cell and side.
fn ghost_order(grid: &Grid, spec: &BoundarySpec) -> Vec<((isize, isize), (isize, isize), Side)> {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let mut out = Vec::with_capacity(4 * (grid.nx + grid.ny + 8));
    for j in 0..ny {
        for i in [-2, -1, nx, nx + 1] {
            let (side, kind) = if i < 0 {
                (Side::Left, spec.left)
            } else {
                (Side::Right, spec.right)
            };
            out.push(((i, j), (source_index(grid.nx, i, kind), j), side));
        }
    }
    for j in [-2, -1, ny, ny + 1] {
        for i in -2..nx + 2 {
            let (side, kind) = if j < 0 {
                (Side::Bottom, spec.bottom)
            } else {
                (Side::Top, spec.top)
            };
            out.push(((i, j), (i, source_index(grid.ny, j, kind)), side));
        }
    }
    out
}

/// Ghost-extended vertices and per-cell reconstruction geometry.
#[derive(Clone, Debug)]
pub struct ExtGeometry {
    pub vertices: Vec<Point>,
    pub recon: Vec<ReconGeometry>,
}

impl ExtGeometry {
    pub fn build(grid: &Grid, real_vertices: &[Point], interior: &[ReconGeometry], spec: &BoundarySpec) -> Self {
        let vertices = extend_vertices(grid, real_vertices, spec, Extension::Positions);
        let placeholder = interior[0];
        let mut recon = vec![placeholder; grid.num_ext_cells()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                recon[grid.ext_cell(i as isize, j as isize)] = interior[grid.cell(i, j)];
            }
        }
        for ((i, j), (si, sj), side) in ghost_order(grid, spec) {
            let cell = ext_cell_geometry(grid, &vertices, i, j);
            recon[grid.ext_cell(i, j)] = if spec.side(side) == BoundaryKind::Periodic {
                let src = ext_cell_geometry(grid, &vertices, si, sj);
                let d = [
                    cell.vertices[0][0] - src.vertices[0][0],
                    cell.vertices[0][1] - src.vertices[0][1],
                ];
                recon[grid.ext_cell(si, sj)].translated(d[0], d[1])
            } else {
                ReconGeometry::exact(&exact_moments(&cell))
            };
        }
        Self { vertices, recon }
    }
}

/// Primitive states of the double Mach reflection setup (γ = 1.4).
pub const DMR_PRE_SHOCK: [f64; 4] = [1.4, 0.0, 0.0, 1.0];

pub fn dmr_post_shock() -> [f64; 4] {
    let c = (std::f64::consts::PI / 6.0).cos();
    let s = (std::f64::consts::PI / 6.0).sin();
    [8.0, 8.25 * c, -8.25 * s, 116.5]
}

/// x position of the incident shock along y = `y` at time t.
pub fn dmr_shock_x(y: f64, t: f64) -> f64 {
    1.0 / 6.0 + (y + 20.0 * t) / 3f64.sqrt()
}

pub struct GhostContext<'a> {
    pub model: PhysicsModel,
    pub spec: BoundarySpec,
    pub exact: Option<&'a dyn ExactSolution>,
    pub time: f64,
}

/// Ghost-extended averages from interior averages.
pub fn fill_ghosts(grid: &Grid, geo: &ExtGeometry, interior: &[Cons], ctx: &GhostContext) -> Result<Vec<Cons>> {
    let mut out = vec![[0.0; 4]; grid.num_ext_cells()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            out[grid.ext_cell(i as isize, j as isize)] = interior[grid.cell(i, j)];
        }
    }
    let euler = ctx.model.is_euler();
    let gamma = match ctx.model {
        PhysicsModel::Euler { gamma } => gamma,
        _ => 1.4,
    };
    for ((i, j), (si, sj), side) in ghost_order(grid, &ctx.spec) {
        let src = out[grid.ext_cell(si, sj)];
        let normal_comp = match side {
            Side::Left | Side::Right => 1,
            Side::Bottom | Side::Top => 2,
        };
        let reflect = |mut u: Cons| {
            if euler {
                u[normal_comp] = -u[normal_comp];
            }
            u
        };
        let k = grid.ext_cell(i, j);
        let value = match ctx.spec.side(side) {
            BoundaryKind::Periodic | BoundaryKind::Outflow => src,
            BoundaryKind::Reflective => reflect(src),
            BoundaryKind::Exact => {
                let exact = ctx
                    .exact
                    .ok_or_else(|| Error::Config("exact boundary without an analytic solution".into()))?;
                let cell = ext_cell_geometry(grid, &geo.vertices, i, j);
                exact.cell_average(&cell, &geo.recon[k].moments, ctx.time)
            }
            BoundaryKind::DmrSpecial => {
                let post = primitive_to_conserved(gamma, dmr_post_shock())?;
                let pre = primitive_to_conserved(gamma, DMR_PRE_SHOCK)?;
                let c = geo.recon[k].centroid;
                match side {
                    Side::Left => post,
                    Side::Right => out[grid.ext_cell(grid.nx as isize - 1, sj)],
                    Side::Bottom => {
                        if c[0] < 1.0 / 6.0 {
                            post
                        } else {
                            reflect(src)
                        }
                    }
                    Side::Top => {
                        if c[0] < dmr_shock_x(c[1], ctx.time) {
                            post
                        } else {
                            pre
                        }
                    }
                }
            }
        };
        out[k] = value;
    }
    Ok(out)
}
