//! Hybrid 2-exact reconstruction on the 3×3 stencil: a least-squares quadratic
//! with exact conservation on the target cell, a WENO-ZQ style fallback for
//! troubled cells, and the KXRCF indicator that chooses between them.

use crate::equations::{is_admissible, transport_velocity, Cons, PhysicsModel, MAX_VARS};
use crate::error::{Error, Location, Result};
use crate::geometry::{basis_integrals, BasisFrame, MomentSet, Point, GL_WEIGHTS};
use crate::grid::{ext_cell_geometry, Edge, EdgeRef, Grid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryMode {
    Tpe2,
    Gcl,
    NonGcl,
}

impl GeometryMode {
    pub fn name(&self) -> &'static str {
        match self {
            GeometryMode::Tpe2 => "tpe2",
            GeometryMode::Gcl => "gcl",
            GeometryMode::NonGcl => "nongcl",
        }
    }
}

/// The moments a cell exposes to the reconstruction: `moments` supplies the
/// basis integrals of degree ≥ 1, `volume` the zeroth one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconGeometry {
    pub moments: MomentSet,
    pub volume: f64,
    pub centroid: Point,
}

impl ReconGeometry {
    pub fn for_mode(mode: GeometryMode, egm: &MomentSet, exact: &MomentSet) -> Self {
        match mode {
            GeometryMode::Tpe2 => Self {
                moments: *egm,
                volume: egm.m00,
                centroid: egm.centroid(),
            },
            GeometryMode::Gcl => Self {
                moments: *exact,
                volume: egm.m00,
                centroid: [exact.m10 / egm.m00, exact.m01 / egm.m00],
            },
            GeometryMode::NonGcl => Self::exact(exact),
        }
    }

    pub fn exact(m: &MomentSet) -> Self {
        Self {
            moments: *m,
            volume: m.m00,
            centroid: m.centroid(),
        }
    }

    pub fn frame(&self) -> BasisFrame {
        BasisFrame::new(self.centroid, self.volume)
    }

    /// Cell averages of the six basis functions of `frame` over this cell.
    #[inline]
    pub fn row(&self, frame: &BasisFrame) -> [f64; 6] {
        let b = basis_integrals(&self.moments, frame);
        let inv = 1.0 / self.volume;
        [1.0, b[1] * inv, b[2] * inv, b[3] * inv, b[4] * inv, b[5] * inv]
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            moments: self.moments.translated(dx, dy),
            volume: self.volume,
            centroid: [self.centroid[0] + dx, self.centroid[1] + dy],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconPoly {
    pub frame: BasisFrame,
    /// coeffs[α][component] in the order of `geometry::EXPONENTS`.
    pub coeffs: [Cons; 6],
}

impl ReconPoly {
    pub fn constant(frame: BasisFrame, u: Cons) -> Self {
        let mut coeffs = [[0.0; MAX_VARS]; 6];
        coeffs[0] = u;
        Self { frame, coeffs }
    }

    #[inline]
    pub fn eval(&self, p: Point) -> Cons {
        let b = self.frame.basis(p);
        let mut out = [0.0; MAX_VARS];
        for (a, c) in b.iter().zip(self.coeffs.iter()) {
            for k in 0..MAX_VARS {
                out[k] += a * c[k];
            }
        }
        out
    }

    #[inline]
    pub fn eval_component(&self, p: Point, k: usize) -> f64 {
        let b = self.frame.basis(p);
        b.iter().zip(self.coeffs.iter()).map(|(a, c)| a * c[k]).sum()
    }

    /// Mean of the polynomial over a cell described by `g`.
    pub fn mean_over(&self, g: &ReconGeometry) -> Cons {
        let row = g.row(&self.frame);
        let mut out = [0.0; MAX_VARS];
        for (a, c) in row.iter().zip(self.coeffs.iter()) {
            for k in 0..MAX_VARS {
                out[k] += a * c[k];
            }
        }
        out
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            frame: BasisFrame {
                xc: self.frame.xc + dx,
                yc: self.frame.yc + dy,
                h: self.frame.h,
            },
            coeffs: self.coeffs,
        }
    }
}

/// Nine members in row-major order from the south-west corner; member 4 is
/// the target.
#[derive(Clone, Debug)]
pub struct Stencil {
    pub members: [ReconGeometry; 9],
    pub averages: [Cons; 9],
    pub m: usize,
}

pub const TARGET: usize = 4;

/// Sub-stencils of the linear WENO candidates: the four 2×2 blocks that
/// contain the target (SW, SE, NE, NW).
pub const QUADRANTS: [[usize; 3]; 4] = [[3, 1, 0], [5, 1, 2], [5, 7, 8], [3, 7, 6]];

pub const LINEAR_WEIGHTS: [f64; 5] = [0.96, 0.01, 0.01, 0.01, 0.01];
pub const WENO_EPSILON: f64 = 1e-20;
pub const VARIANCE_FLOOR: f64 = 1e-40;
pub const KXRCF_THRESHOLD: f64 = 1.0;

const RANK_TOL: f64 = 1e-12;

/// R⁻¹Qᵀ of a tall matrix by Householder QR, or None if rank deficient.
fn lsq_pinv<const R: usize, const C: usize>(a: [[f64; C]; R]) -> Option<[[f64; R]; C]> {
    let mut a = a;
    let mut qt = [[0.0; R]; R];
    for (i, row) in qt.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for k in 0..C {
        let norm = (k..R).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v = [0.0; R];
        for i in k..R {
            v[i] = a[i][k];
        }
        v[k] -= alpha;
        let vv: f64 = (k..R).map(|i| v[i] * v[i]).sum();
        if vv > 0.0 {
            let s = 2.0 / vv;
            for col in k..C {
                let d: f64 = (k..R).map(|i| v[i] * a[i][col]).sum::<f64>() * s;
                for i in k..R {
                    a[i][col] -= d * v[i];
                }
            }
            for col in 0..R {
                let d: f64 = (k..R).map(|i| v[i] * qt[i][col]).sum::<f64>() * s;
                for i in k..R {
                    qt[i][col] -= d * v[i];
                }
            }
        }
    }
    let rmax = (0..C).map(|k| a[k][k].abs()).fold(0.0, f64::max);
    if (0..C).any(|k| !(a[k][k].abs() > RANK_TOL * rmax)) {
        return None;
    }
    let mut p = [[0.0; R]; C];
    for col in 0..R {
        for k in (0..C).rev() {
            let mut s = qt[k][col];
            for l in k + 1..C {
                s -= a[k][l] * p[l][col];
            }
            p[k][col] = s / a[k][k];
        }
    }
    Some(p)
}

/// The geometric part of the quadratic fit, reusable for every component.
#[derive(Clone, Debug)]
pub struct FitOperator {
    pub frame: BasisFrame,
    /// Basis-function averages of each member in the target frame.
    pub rows: [[f64; 6]; 9],
    pinv: [[f64; 8]; 5],
}

impl FitOperator {
    pub fn new(members: &[ReconGeometry; 9]) -> Result<Self> {
        let target = &members[TARGET];
        if !(target.volume > 0.0) {
            return Err(Error::NegativeVolume {
                volume: target.volume,
                at: Location::default(),
            });
        }
        let frame = target.frame();
        let mut rows = [[0.0; 6]; 9];
        for (r, g) in rows.iter_mut().zip(members.iter()) {
            *r = g.row(&frame);
        }
        let mut a = [[0.0; 5]; 8];
        for (n, j) in (0..9).filter(|&j| j != TARGET).enumerate() {
            for k in 0..5 {
                a[n][k] = rows[j][k + 1] - rows[TARGET][k + 1];
            }
        }
        let pinv = lsq_pinv(a).ok_or(Error::SingularStencil {
            at: Location::default(),
        })?;
        Ok(Self { frame, rows, pinv })
    }

    pub fn fit(&self, averages: &[Cons; 9], m: usize) -> ReconPoly {
        let mut coeffs = [[0.0; MAX_VARS]; 6];
        let t = &averages[TARGET];
        for c in 0..m {
            let mut d = [0.0; 8];
            for (n, j) in (0..9).filter(|&j| j != TARGET).enumerate() {
                d[n] = averages[j][c] - t[c];
            }
            let mut mean = 0.0;
            for k in 0..5 {
                let v: f64 = self.pinv[k].iter().zip(d.iter()).map(|(p, q)| p * q).sum();
                coeffs[k + 1][c] = v;
                mean += v * self.rows[TARGET][k + 1];
            }
            coeffs[0][c] = t[c] - mean;
        }
        ReconPoly {
            frame: self.frame,
            coeffs,
        }
    }

    fn linear_pinvs(&self) -> Result<[[[f64; 3]; 2]; 4]> {
        let mut out = [[[0.0; 3]; 2]; 4];
        for (q, quad) in QUADRANTS.iter().enumerate() {
            let mut a = [[0.0; 2]; 3];
            for (n, &j) in quad.iter().enumerate() {
                a[n][0] = self.rows[j][1] - self.rows[TARGET][1];
                a[n][1] = self.rows[j][2] - self.rows[TARGET][2];
            }
            out[q] = lsq_pinv(a).ok_or(Error::SingularStencil {
                at: Location::default(),
            })?;
        }
        Ok(out)
    }

    /// WENO recombination of `quad` (the quadratic fit) with the four linear
    /// candidates.
    pub fn weno(&self, averages: &[Cons; 9], m: usize, quad: &ReconPoly) -> Result<WenoResult> {
        let lin = self.linear_pinvs()?;
        let rt = &self.rows[TARGET];
        let mut coeffs = [[0.0; MAX_VARS]; 6];
        let mut weights = [[0.0; 5]; MAX_VARS];
        for c in 0..m {
            let t = averages[TARGET][c];
            let mean = averages.iter().map(|u| u[c]).sum::<f64>() / 9.0;
            let var = averages.iter().map(|u| (u[c] - mean).powi(2)).sum::<f64>() / 9.0;
            let qc: [f64; 6] = std::array::from_fn(|a| quad.coeffs[a][c]);
            if var == 0.0 {
                for a in 0..6 {
                    coeffs[a][c] = qc[a];
                }
                weights[c] = LINEAR_WEIGHTS;
                continue;
            }
            let mut cand = [[0.0; 3]; 4];
            for (q, quadrant) in QUADRANTS.iter().enumerate() {
                let mut s = [0.0; 2];
                for k in 0..2 {
                    s[k] = (0..3).map(|n| lin[q][k][n] * (averages[quadrant[n]][c] - t)).sum();
                }
                cand[q] = [t - s[0] * rt[1] - s[1] * rt[2], s[0], s[1]];
            }
            let scale = 1.0 / (var + VARIANCE_FLOOR);
            let mut beta = [0.0; 5];
            beta[0] = quadratic_smoothness(&qc, rt) * scale;
            for q in 0..4 {
                beta[q + 1] = (cand[q][1] * cand[q][1] + cand[q][2] * cand[q][2]) * scale;
            }
            let tau = ((1..5).map(|q| (beta[0] - beta[q]).abs()).sum::<f64>() / 4.0).powi(2);
            let mut w = [0.0; 5];
            for q in 0..5 {
                w[q] = LINEAR_WEIGHTS[q] * (1.0 + tau / (beta[q] + WENO_EPSILON));
            }
            let total: f64 = w.iter().sum();
            for x in w.iter_mut() {
                *x /= total;
            }
            let g0 = LINEAR_WEIGHTS[0];
            for a in 0..6 {
                let mut v = w[0] / g0 * qc[a];
                for q in 0..4 {
                    let l = if a < 3 { cand[q][a] } else { 0.0 };
                    v += (w[q + 1] - w[0] * LINEAR_WEIGHTS[q + 1] / g0) * l;
                }
                coeffs[a][c] = v;
            }
            weights[c] = w;
        }
        Ok(WenoResult {
            poly: ReconPoly {
                frame: self.frame,
                coeffs,
            },
            weights,
        })
    }
}

/// Σ over derivative orders 1..2 of ĥ^{2|α|-2} ∫ (D^α p)², in the normalized
/// frame, for coefficients `c` and target basis averages `rt`.
fn quadratic_smoothness(c: &[f64; 6], rt: &[f64; 6]) -> f64 {
    let [_, c10, c01, c20, c11, c02] = *c;
    let (a10, a01, a20, a11, a02) = (rt[1], rt[2], rt[3], rt[4], rt[5]);
    let dx = c10 * c10
        + 4.0 * c20 * c20 * a20
        + c11 * c11 * a02
        + 4.0 * c10 * c20 * a10
        + 2.0 * c10 * c11 * a01
        + 4.0 * c20 * c11 * a11;
    let dy = c01 * c01
        + c11 * c11 * a20
        + 4.0 * c02 * c02 * a02
        + 2.0 * c01 * c11 * a10
        + 4.0 * c01 * c02 * a01
        + 4.0 * c11 * c02 * a11;
    dx + dy + 4.0 * c20 * c20 + c11 * c11 + 4.0 * c02 * c02
}

#[derive(Clone, Copy, Debug)]
pub struct WenoResult {
    pub poly: ReconPoly,
    /// Normalized nonlinear weights per component (quadratic first).
    pub weights: [[f64; 5]; MAX_VARS],
}

pub fn quadratic_fit(stencil: &Stencil) -> Result<ReconPoly> {
    Ok(FitOperator::new(&stencil.members)?.fit(&stencil.averages, stencil.m))
}

pub fn weno_fallback(stencil: &Stencil) -> Result<ReconPoly> {
    Ok(weno_with_weights(stencil)?.poly)
}

pub fn weno_with_weights(stencil: &Stencil) -> Result<WenoResult> {
    let op = FitOperator::new(&stencil.members)?;
    let quad = op.fit(&stencil.averages, stencil.m);
    op.weno(&stencil.averages, stencil.m, &quad)
}

/// Traces of the indicator variable on one edge of the target cell.
#[derive(Clone, Copy, Debug)]
pub struct KxrcfEdge {
    pub length: f64,
    /// Transport velocity dotted with the outward normal; inflow if negative.
    pub normal_velocity: f64,
    pub interior: [f64; 3],
    /// None when the neighbour has no reconstruction (outside the ghost ring).
    pub exterior: Option<[f64; 3]>,
}

/// KXRCF troubled-cell test with exponent 3/2 and threshold 1.
pub fn kxrcf_flag(edges: &[KxrcfEdge], diameter: f64, norm: f64) -> bool {
    let mut jump = 0.0;
    let mut inflow_length = 0.0;
    for e in edges {
        if !(e.normal_velocity < 0.0) {
            continue;
        }
        let Some(ext) = e.exterior else { continue };
        let s: f64 = (0..3).map(|g| GL_WEIGHTS[g] * (e.interior[g] - ext[g])).sum();
        jump += e.length * s;
        inflow_length += e.length;
    }
    let denom = diameter.powf(1.5) * inflow_length * norm;
    if jump == 0.0 || !(denom > 0.0) {
        return false;
    }
    jump.abs() / denom > KXRCF_THRESHOLD
}

/// Velocity used to classify inflow edges in the indicator.
#[derive(Clone, Copy, Debug)]
pub enum IndicatorVelocity<'a> {
    Uniform([f64; 2]),
    /// Transport velocity of the target cell's average.
    CellAverage,
    /// Vertex velocities of the moving mesh (extended array); material moves
    /// at -w relative to the edges.
    MeshMotion(&'a [Point]),
}

pub struct FieldInput<'a> {
    pub grid: Grid,
    /// Ghost-extended vertices.
    pub vertices: &'a [Point],
    /// Ghost-extended cell geometry.
    pub geometry: &'a [ReconGeometry],
    /// Ghost-extended cell averages.
    pub averages: &'a [Cons],
    pub model: PhysicsModel,
    pub periodic: [bool; 2],
    pub velocity: IndicatorVelocity<'a>,
}

/// Polynomials and troubled-cell flags on the interior plus one ghost layer.
#[derive(Clone, Debug)]
pub struct FieldReconstruction {
    pub grid: Grid,
    pub polys: Vec<ReconPoly>,
    pub flags: Vec<bool>,
}

impl FieldReconstruction {
    #[inline]
    pub fn poly(&self, i: isize, j: isize) -> &ReconPoly {
        &self.polys[self.grid.ring_cell(i, j)]
    }

    pub fn flag(&self, i: isize, j: isize) -> bool {
        self.flags[self.grid.ring_cell(i, j)]
    }

    /// (interior, exterior) traces at the three points of a canonical edge.
    #[inline]
    pub fn edge_traces(&self, e: &EdgeRef, edge: &Edge) -> ([Cons; 3], [Cons; 3]) {
        let pi = self.poly(e.inner.0, e.inner.1);
        let po = self.poly(e.outer.0, e.outer.1);
        (edge.points.map(|p| pi.eval(p)), edge.points.map(|p| po.eval(p)))
    }

    pub fn num_flagged_interior(&self) -> usize {
        let g = self.grid;
        let mut n = 0;
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                n += self.flag(i, j) as usize;
            }
        }
        n
    }
}

pub fn indicator_components(model: &PhysicsModel) -> &'static [usize] {
    match model {
        PhysicsModel::Advection { .. } => &[0],
        PhysicsModel::Euler { .. } => &[0, 3],
    }
}

fn wrap(i: isize, n: usize) -> isize {
    i.rem_euclid(n as isize)
}

pub fn reconstruct_field(input: &FieldInput) -> Result<FieldReconstruction> {
    let g = input.grid;
    let m = input.model.m();
    let nring = g.num_ring_cells();
    let (nx, ny) = (g.nx, g.ny);
    let copy_source = |i: isize, j: isize| -> Option<(isize, isize)> {
        let wx = input.periodic[0] && (i < 0 || i >= nx as isize);
        let wy = input.periodic[1] && (j < 0 || j >= ny as isize);
        if !wx && !wy {
            return None;
        }
        let si = if wx { wrap(i, nx) } else { i };
        let sj = if wy { wrap(j, ny) } else { j };
        Some((si, sj))
    };
    let v = input.vertices;
    let shift_x = [
        v[g.ext_vertex(nx as isize, 0)][0] - v[g.ext_vertex(0, 0)][0],
        v[g.ext_vertex(nx as isize, 0)][1] - v[g.ext_vertex(0, 0)][1],
    ];
    let shift_y = [
        v[g.ext_vertex(0, ny as isize)][0] - v[g.ext_vertex(0, 0)][0],
        v[g.ext_vertex(0, ny as isize)][1] - v[g.ext_vertex(0, 0)][1],
    ];
    let offset = |i: isize, j: isize, si: isize, sj: isize| -> [f64; 2] {
        let kx = ((i - si) / nx as isize) as f64;
        let ky = ((j - sj) / ny as isize) as f64;
        [
            kx * shift_x[0] + ky * shift_y[0],
            kx * shift_x[1] + ky * shift_y[1],
        ]
    };
    let stencil_of = |i: isize, j: isize| -> ([ReconGeometry; 9], [Cons; 9]) {
        let mut geo = [input.geometry[g.ext_cell(i, j)]; 9];
        let mut avg = [[0.0; MAX_VARS]; 9];
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let n = ((di + 1) + 3 * (dj + 1)) as usize;
                let k = g.ext_cell(i + di, j + dj);
                geo[n] = input.geometry[k];
                avg[n] = input.averages[k];
            }
        }
        (geo, avg)
    };
    let located = |e: Error, i: isize, j: isize| {
        e.within(&Location {
            cell: Some((i.max(0) as usize, j.max(0) as usize)),
            ..Default::default()
        })
    };

    // optimal (quadratic) polynomials
    let fits: Vec<Option<(FitOperator, ReconPoly)>> = (0..nring)
        .into_par_iter()
        .map(|k| {
            let (i, j) = g.ring_cell_coords(k);
            if copy_source(i, j).is_some() {
                return Ok(None);
            }
            let (geo, avg) = stencil_of(i, j);
            let op = FitOperator::new(&geo).map_err(|e| located(e, i, j))?;
            let p = op.fit(&avg, m);
            Ok(Some((op, p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut popt: Vec<ReconPoly> = Vec::with_capacity(nring);
    for k in 0..nring {
        let (i, j) = g.ring_cell_coords(k);
        match copy_source(i, j) {
            None => popt.push(fits[k].as_ref().unwrap().1),
            Some((si, sj)) => {
                let src = fits[g.ring_cell(si, sj)].as_ref().unwrap().1;
                let d = offset(i, j, si, sj);
                popt.push(src.translated(d[0], d[1]));
            }
        }
    }

    // troubled-cell flags
    let in_ring = |i: isize, j: isize| i >= -1 && j >= -1 && i <= nx as isize && j <= ny as isize;
    let comps = indicator_components(&input.model);
    let flags_direct: Vec<bool> = (0..nring)
        .into_par_iter()
        .map(|k| {
            let (i, j) = g.ring_cell_coords(k);
            if copy_source(i, j).is_some() {
                return false;
            }
            let cell = ext_cell_geometry(&g, v, i, j);
            let neighbours = [(i, j - 1), (i + 1, j), (i, j + 1), (i - 1, j)];
            let corner_ids = [
                [(i, j), (i + 1, j)],
                [(i + 1, j), (i + 1, j + 1)],
                [(i + 1, j + 1), (i, j + 1)],
                [(i, j + 1), (i, j)],
            ];
            let target = &popt[k];
            let avg_t = input.averages[g.ext_cell(i, j)];
            let mut edges = [Edge::new([0.0, 0.0], [1.0, 0.0]); 4];
            let mut vn = [0.0; 4];
            for e in 0..4 {
                let p0 = cell.vertices[e];
                let p1 = cell.vertices[(e + 1) % 4];
                edges[e] = Edge::new(p0, p1);
                let n = edges[e].normal;
                vn[e] = match input.velocity {
                    IndicatorVelocity::Uniform(a) => a[0] * n[0] + a[1] * n[1],
                    IndicatorVelocity::CellAverage => {
                        let u = transport_velocity(&input.model, &avg_t);
                        u[0] * n[0] + u[1] * n[1]
                    }
                    IndicatorVelocity::MeshMotion(w) => {
                        let [a, b] = corner_ids[e];
                        let w0 = w[g.ext_vertex(a.0, a.1)];
                        let w1 = w[g.ext_vertex(b.0, b.1)];
                        -0.5 * ((w0[0] + w1[0]) * n[0] + (w0[1] + w1[1]) * n[1])
                    }
                };
            }
            if input.model.is_euler() {
                for e in &edges {
                    for p in &e.points {
                        if !is_admissible(&input.model, &target.eval(*p)) {
                            return true;
                        }
                    }
                }
            }
            let diameter = cell.diameter();
            for &c in comps {
                let mut norm: f64 = 0.0;
                for dj in -1..=1 {
                    for di in -1..=1 {
                        norm = norm.max(input.averages[g.ext_cell(i + di, j + dj)][c].abs());
                    }
                }
                let mut kx = [KxrcfEdge {
                    length: 0.0,
                    normal_velocity: 0.0,
                    interior: [0.0; 3],
                    exterior: None,
                }; 4];
                for e in 0..4 {
                    let (ni, nj) = neighbours[e];
                    let pts = edges[e].points;
                    kx[e] = KxrcfEdge {
                        length: edges[e].length,
                        normal_velocity: vn[e],
                        interior: pts.map(|p| target.eval_component(p, c)),
                        exterior: if in_ring(ni, nj) {
                            let pn = &popt[g.ring_cell(ni, nj)];
                            Some(pts.map(|p| pn.eval_component(p, c)))
                        } else {
                            None
                        },
                    };
                }
                if kxrcf_flag(&kx, diameter, norm) {
                    return true;
                }
            }
            false
        })
        .collect();

    // fallback on troubled cells
    let finals: Vec<ReconPoly> = (0..nring)
        .into_par_iter()
        .map(|k| {
            if !flags_direct[k] {
                return Ok(popt[k]);
            }
            let (i, j) = g.ring_cell_coords(k);
            let (op, quad) = fits[k].as_ref().unwrap();
            let (_, avg) = stencil_of(i, j);
            let p = op.weno(&avg, m, quad).map_err(|e| located(e, i, j))?.poly;
            // first-order fallback when even the WENO traces are unphysical
            if input.model.is_euler() {
                let cell = ext_cell_geometry(&g, v, i, j);
                for e in 0..4 {
                    let edge = Edge::new(cell.vertices[e], cell.vertices[(e + 1) % 4]);
                    if edge.points.iter().any(|q| !is_admissible(&input.model, &p.eval(*q))) {
                        return Ok(ReconPoly::constant(p.frame, avg[TARGET]));
                    }
                }
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut polys = Vec::with_capacity(nring);
    let mut flags = Vec::with_capacity(nring);
    for k in 0..nring {
        let (i, j) = g.ring_cell_coords(k);
        match copy_source(i, j) {
            None => {
                polys.push(finals[k]);
                flags.push(flags_direct[k]);
            }
            Some((si, sj)) => {
                let s = g.ring_cell(si, sj);
                let d = offset(i, j, si, sj);
                polys.push(finals[s].translated(d[0], d[1]));
                flags.push(flags_direct[s]);
            }
        }
    }
    Ok(FieldReconstruction { grid: g, polys, flags })
}
