//! Logically rectangular quadrilateral meshes, the two-layer ghost indexing
//! and the canonical edge numbering used for flux assembly.
//!
//! Cell (i, j) has vertices A = (i, j), B = (i+1, j), C = (i+1, j+1) and
//! D = (i, j+1). A vertical edge runs from vertex (i, j) to (i, j+1) and its
//! normal points to +x; a horizontal edge runs from (i+1, j) to (i, j) and its
//! normal points to +y. Each edge flux is computed once, from the "inner" cell
//! (left or below) to the "outer" cell.

use crate::error::{Error, Location, Result};
use crate::geometry::{dist, exact_moments, midpoint, regularity_check, CellGeometry, MomentSet, Point};
use rayon::prelude::*;

pub const NG: isize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn num_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i + j * self.nx
    }

    #[inline]
    pub fn vertex(&self, i: usize, j: usize) -> usize {
        i + j * (self.nx + 1)
    }

    /// Width of the ghost-extended cell array.
    #[inline]
    pub fn ext_nx(&self) -> usize {
        self.nx + 4
    }

    pub fn num_ext_cells(&self) -> usize {
        (self.nx + 4) * (self.ny + 4)
    }

    #[inline]
    pub fn ext_cell(&self, i: isize, j: isize) -> usize {
        ((i + NG) + (j + NG) * (self.nx as isize + 4)) as usize
    }

    #[inline]
    pub fn ext_cell_coords(&self, k: usize) -> (isize, isize) {
        let w = self.nx + 4;
        ((k % w) as isize - NG, (k / w) as isize - NG)
    }

    pub fn num_ext_vertices(&self) -> usize {
        (self.nx + 5) * (self.ny + 5)
    }

    #[inline]
    pub fn ext_vertex(&self, i: isize, j: isize) -> usize {
        ((i + NG) + (j + NG) * (self.nx as isize + 5)) as usize
    }

    /// Cells within one layer of the interior, including the ring corners.
    pub fn num_ring_cells(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    #[inline]
    pub fn ring_cell(&self, i: isize, j: isize) -> usize {
        ((i + 1) + (j + 1) * (self.nx as isize + 2)) as usize
    }

    #[inline]
    pub fn ring_cell_coords(&self, k: usize) -> (isize, isize) {
        let w = self.nx + 2;
        ((k % w) as isize - 1, (k / w) as isize - 1)
    }

    pub fn is_interior(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny
    }

    pub fn num_vertical_edges(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn num_horizontal_edges(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    #[inline]
    pub fn vertical_edge(&self, i: usize, j: usize) -> usize {
        i + j * (self.nx + 1)
    }

    #[inline]
    pub fn horizontal_edge(&self, i: usize, j: usize) -> usize {
        i + j * self.nx
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Domain {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub grid: Grid,
    pub vertices: Vec<Point>,
}

impl Mesh {
    pub fn uniform(grid: Grid, domain: Domain) -> Self {
        let hx = (domain.x1 - domain.x0) / grid.nx as f64;
        let hy = (domain.y1 - domain.y0) / grid.ny as f64;
        let mut vertices = Vec::with_capacity(grid.num_vertices());
        for j in 0..=grid.ny {
            for i in 0..=grid.nx {
                vertices.push([domain.x0 + i as f64 * hx, domain.y0 + j as f64 * hy]);
            }
        }
        Self { grid, vertices }
    }

    #[inline]
    pub fn vertex(&self, i: usize, j: usize) -> Point {
        self.vertices[self.grid.vertex(i, j)]
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> CellGeometry {
        CellGeometry::new([
            self.vertex(i, j),
            self.vertex(i + 1, j),
            self.vertex(i + 1, j + 1),
            self.vertex(i, j + 1),
        ])
    }

    pub fn cells(&self) -> Vec<CellGeometry> {
        let g = self.grid;
        (0..g.num_cells()).map(|k| self.cell(k % g.nx, k / g.nx)).collect()
    }

    pub fn exact_moments(&self) -> Vec<MomentSet> {
        let g = self.grid;
        (0..g.num_cells())
            .into_par_iter()
            .map(|k| exact_moments(&self.cell(k % g.nx, k / g.nx)))
            .collect()
    }

    pub fn check_regular(&self) -> Result<()> {
        let g = self.grid;
        for j in 0..g.ny {
            for i in 0..g.nx {
                if let Err(v) = regularity_check(&self.cell(i, j)) {
                    return Err(Error::Regularity {
                        reason: v.to_string(),
                        at: Location {
                            cell: Some((i, j)),
                            ..Default::default()
                        },
                    });
                }
            }
        }
        Ok(())
    }

    /// Vertices displaced by `tau * w`.
    pub fn moved(&self, velocities: &[Point], tau: f64) -> Mesh {
        let vertices = self
            .vertices
            .iter()
            .zip(velocities)
            .map(|(p, w)| [p[0] + tau * w[0], p[1] + tau * w[1]])
            .collect();
        Mesh {
            grid: self.grid,
            vertices,
        }
    }

    pub fn min_edge_length(&self) -> f64 {
        let g = self.grid;
        let mut h = f64::INFINITY;
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                if i < g.nx {
                    h = h.min(dist(self.vertex(i, j), self.vertex(i + 1, j)));
                }
                if j < g.ny {
                    h = h.min(dist(self.vertex(i, j), self.vertex(i, j + 1)));
                }
            }
        }
        h
    }
}

/// Cell of the ghost-extended vertex array.
#[inline]
pub fn ext_cell_geometry(grid: &Grid, verts: &[Point], i: isize, j: isize) -> CellGeometry {
    CellGeometry::new([
        verts[grid.ext_vertex(i, j)],
        verts[grid.ext_vertex(i + 1, j)],
        verts[grid.ext_vertex(i + 1, j + 1)],
        verts[grid.ext_vertex(i, j + 1)],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub points: [Point; 3],
    /// Edge vector rotated by -π/2; its length is the edge length.
    pub nstar: [f64; 2],
    pub length: f64,
    pub normal: [f64; 2],
}

impl Edge {
    #[inline]
    pub fn new(p0: Point, p1: Point) -> Self {
        let nstar = [p1[1] - p0[1], -(p1[0] - p0[0])];
        let length = (nstar[0] * nstar[0] + nstar[1] * nstar[1]).sqrt();
        Self {
            points: [p0, midpoint(p0, p1), p1],
            nstar,
            length,
            normal: [nstar[0] / length, nstar[1] / length],
        }
    }
}

/// The two families of canonical edges touching interior cells.
#[derive(Clone, Debug)]
pub struct EdgeSet {
    pub vertical: Vec<Edge>,
    pub horizontal: Vec<Edge>,
}

impl EdgeSet {
    pub fn new(mesh: &Mesh) -> Self {
        let g = mesh.grid;
        let mut vertical = Vec::with_capacity(g.num_vertical_edges());
        for j in 0..g.ny {
            for i in 0..=g.nx {
                vertical.push(Edge::new(mesh.vertex(i, j), mesh.vertex(i, j + 1)));
            }
        }
        let mut horizontal = Vec::with_capacity(g.num_horizontal_edges());
        for j in 0..=g.ny {
            for i in 0..g.nx {
                horizontal.push(Edge::new(mesh.vertex(i + 1, j), mesh.vertex(i, j)));
            }
        }
        Self { vertical, horizontal }
    }
}

/// Identifies one canonical edge and the ring cells on either side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub vertical: bool,
    pub index: usize,
    pub inner: (isize, isize),
    pub outer: (isize, isize),
    /// Vertex indices (in the real mesh) of the edge endpoints, in canonical order.
    pub endpoints: (usize, usize),
}

/// Edges whose flux must be computed. With periodic sides the duplicate
/// boundary edge (i = nx or j = ny) is skipped and aliased in `accumulate`.
pub fn active_edges(grid: &Grid, periodic: [bool; 2]) -> Vec<EdgeRef> {
    let mut out = Vec::with_capacity(grid.num_vertical_edges() + grid.num_horizontal_edges());
    let imax = if periodic[0] { grid.nx - 1 } else { grid.nx };
    for j in 0..grid.ny {
        for i in 0..=imax {
            out.push(EdgeRef {
                vertical: true,
                index: grid.vertical_edge(i, j),
                inner: (i as isize - 1, j as isize),
                outer: (i as isize, j as isize),
                endpoints: (grid.vertex(i, j), grid.vertex(i, j + 1)),
            });
        }
    }
    let jmax = if periodic[1] { grid.ny - 1 } else { grid.ny };
    for j in 0..=jmax {
        for i in 0..grid.nx {
            out.push(EdgeRef {
                vertical: false,
                index: grid.horizontal_edge(i, j),
                inner: (i as isize, j as isize - 1),
                outer: (i as isize, j as isize),
                endpoints: (grid.vertex(i + 1, j), grid.vertex(i, j)),
            });
        }
    }
    out
}

/// Integrated edge quantities (|l| Σ ω F̂ and friends) stored by canonical edge.
#[derive(Clone, Debug)]
pub struct EdgeValues<const N: usize> {
    pub vertical: Vec<[f64; N]>,
    pub horizontal: Vec<[f64; N]>,
}

impl<const N: usize> EdgeValues<N> {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            vertical: vec![[0.0; N]; grid.num_vertical_edges()],
            horizontal: vec![[0.0; N]; grid.num_horizontal_edges()],
        }
    }
}

/// Evaluate `flux` on every active edge (parallel map, stored by edge).
pub fn compute_edge_fluxes<const N: usize, F>(grid: &Grid, edges: &[EdgeRef], flux: F) -> Result<EdgeValues<N>>
where
    F: Fn(&EdgeRef) -> Result<[f64; N]> + Sync,
{
    let values: Vec<[f64; N]> = edges.par_iter().map(&flux).collect::<Result<Vec<_>>>()?;
    let mut out = EdgeValues::zeros(grid);
    for (e, v) in edges.iter().zip(values) {
        if e.vertical {
            out.vertical[e.index] = v;
        } else {
            out.horizontal[e.index] = v;
        }
    }
    Ok(out)
}

/// Net outward flux of every interior cell, gathered in the fixed order
/// bottom, right, top, left. Also returns the net outflow through the
/// non-periodic boundary.
pub fn accumulate<const N: usize>(grid: &Grid, fluxes: &EdgeValues<N>, periodic: [bool; 2]) -> (Vec<[f64; N]>, [f64; N]) {
    let nx = grid.nx;
    let ny = grid.ny;
    let vidx = |i: usize, j: usize| {
        let i = if periodic[0] && i == nx { 0 } else { i };
        grid.vertical_edge(i, j)
    };
    let hidx = |i: usize, j: usize| {
        let j = if periodic[1] && j == ny { 0 } else { j };
        grid.horizontal_edge(i, j)
    };
    let net: Vec<[f64; N]> = (0..grid.num_cells())
        .into_par_iter()
        .map(|k| {
            let i = k % nx;
            let j = k / nx;
            let b = &fluxes.horizontal[hidx(i, j)];
            let r = &fluxes.vertical[vidx(i + 1, j)];
            let t = &fluxes.horizontal[hidx(i, j + 1)];
            let l = &fluxes.vertical[vidx(i, j)];
            std::array::from_fn(|c| -b[c] + r[c] + t[c] - l[c])
        })
        .collect();
    let mut boundary = [0.0; N];
    if !periodic[0] {
        for j in 0..ny {
            let l = &fluxes.vertical[grid.vertical_edge(0, j)];
            let r = &fluxes.vertical[grid.vertical_edge(nx, j)];
            for c in 0..N {
                boundary[c] += r[c] - l[c];
            }
        }
    }
    if !periodic[1] {
        for i in 0..nx {
            let b = &fluxes.horizontal[grid.horizontal_edge(i, 0)];
            let t = &fluxes.horizontal[grid.horizontal_edge(i, ny)];
            for c in 0..N {
                boundary[c] += t[c] - b[c];
            }
        }
    }
    (net, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_normals_point_from_inner_to_outer() {
        let mesh = Mesh::uniform(Grid::new(3, 2), Domain::unit());
        let edges = EdgeSet::new(&mesh);
        let v = edges.vertical[mesh.grid.vertical_edge(1, 1)];
        assert_eq!(v.normal, [1.0, 0.0]);
        let h = edges.horizontal[mesh.grid.horizontal_edge(2, 1)];
        assert_eq!(h.normal, [0.0, 1.0]);
        assert!((h.length - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_edges_are_aliased() {
        let g = Grid::new(4, 3);
        let all = active_edges(&g, [false, false]);
        assert_eq!(all.len(), g.num_vertical_edges() + g.num_horizontal_edges());
        let per = active_edges(&g, [true, true]);
        assert_eq!(per.len(), 2 * g.num_cells());
    }

    #[test]
    fn constant_flux_cancels() {
        let g = Grid::new(5, 4);
        let edges = active_edges(&g, [true, true]);
        let f = compute_edge_fluxes(&g, &edges, |_| Ok([1.5, 0.0])).unwrap();
        let (net, boundary) = accumulate(&g, &f, [true, true]);
        assert!(net.iter().all(|n| n[0] == 0.0));
        assert_eq!(boundary[0], 0.0);
    }
}
