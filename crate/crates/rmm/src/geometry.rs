//! Quadrilateral cell geometry: the bilinear reference map, exact moments by
//! 3×3 Gauss–Lobatto quadrature, edge quadrature, vertex trajectories and
//! basis integrals in the normalized cell-centred frame.

use crate::error::{Error, Location, Result};
use std::fmt;

pub type Point = [f64; 2];

/// Gauss–Lobatto nodes on [-1/2, 1/2] and weights.
pub const GL_NODES: [f64; 3] = [-0.5, 0.0, 0.5];
pub const GL_WEIGHTS: [f64; 3] = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];

/// Exponent pairs (s, r) in storage order for moments, basis functions and
/// polynomial coefficients.
pub const EXPONENTS: [(usize, usize); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    /// A, B, C, D counterclockwise.
    pub vertices: [Point; 4],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapCoefficients {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentSet {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m11: f64,
    pub m02: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeQuadrature {
    /// 1-based edge index: AB, BC, CD, DA.
    pub k: usize,
    pub length: f64,
    pub normal: [f64; 2],
    pub points: [Point; 3],
    pub weights: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisFrame {
    pub xc: f64,
    pub yc: f64,
    pub h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    Degenerate,
    Orientation,
    NonConvex,
    NonFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::Degenerate => "coincident vertices",
            Violation::Orientation => "clockwise orientation",
            Violation::NonConvex => "non-convex or self-intersecting",
            Violation::NonFinite => "non-finite coordinates",
        };
        write!(f, "{}", s)
    }
}

impl MomentSet {
    pub fn from_array(m: [f64; 6]) -> Self {
        Self {
            m00: m[0],
            m10: m[1],
            m01: m[2],
            m20: m[3],
            m11: m[4],
            m02: m[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.m00, self.m10, self.m01, self.m20, self.m11, self.m02]
    }

    pub fn centroid(&self) -> Point {
        [self.m10 / self.m00, self.m01 / self.m00]
    }

    /// Moments of the same cell after translating it by (dx, dy).
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            m00: self.m00,
            m10: self.m10 + dx * self.m00,
            m01: self.m01 + dy * self.m00,
            m20: self.m20 + 2.0 * dx * self.m10 + dx * dx * self.m00,
            m11: self.m11 + dx * self.m01 + dy * self.m10 + dx * dy * self.m00,
            m02: self.m02 + 2.0 * dy * self.m01 + dy * dy * self.m00,
        }
    }

    /// Moments of the mirror image across the vertical line x = x0.
    pub fn mirrored_x(&self, x0: f64) -> Self {
        let m = MomentSet {
            m10: -self.m10,
            m11: -self.m11,
            ..*self
        };
        m.translated(2.0 * x0, 0.0)
    }

    /// Moments of the mirror image across the horizontal line y = y0.
    pub fn mirrored_y(&self, y0: f64) -> Self {
        let m = MomentSet {
            m01: -self.m01,
            m11: -self.m11,
            ..*self
        };
        m.translated(0.0, 2.0 * y0)
    }
}

impl CellGeometry {
    pub fn new(vertices: [Point; 4]) -> Self {
        Self { vertices }
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let mut a = 0.0;
        for k in 0..4 {
            let p = v[k];
            let q = v[(k + 1) % 4];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                d = d.max(dist(v[a], v[b]));
            }
        }
        d
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut v = self.vertices;
        for p in v.iter_mut() {
            p[0] += dx;
            p[1] += dy;
        }
        Self { vertices: v }
    }
}

pub fn dist(p: Point, q: Point) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Verdict on the convex, counterclockwise, nondegenerate invariants.
pub fn regularity_check(cell: &CellGeometry) -> std::result::Result<(), Violation> {
    let v = &cell.vertices;
    if v.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Violation::NonFinite);
    }
    let diam = cell.diameter();
    let mut dmin = f64::INFINITY;
    for a in 0..4 {
        for b in a + 1..4 {
            dmin = dmin.min(dist(v[a], v[b]));
        }
    }
    if !(dmin > 0.0) {
        return Err(Violation::Degenerate);
    }
    let tol = 1e-12 * diam * diam;
    let mut n_pos = 0;
    let mut n_neg = 0;
    for k in 0..4 {
        let p = v[k];
        let q = v[(k + 1) % 4];
        let r = v[(k + 2) % 4];
        let e1 = [q[0] - p[0], q[1] - p[1]];
        let e2 = [r[0] - q[0], r[1] - q[1]];
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        if cross > tol {
            n_pos += 1;
        } else if cross < -tol {
            n_neg += 1;
        }
    }
    if n_neg == 4 {
        return Err(Violation::Orientation);
    }
    if n_pos != 4 {
        return Err(Violation::NonConvex);
    }
    if !(cell.signed_area() > 0.0) {
        return Err(Violation::Orientation);
    }
    Ok(())
}

pub fn check_regular(cell: &CellGeometry) -> Result<()> {
    regularity_check(cell).map_err(|v| Error::Regularity {
        reason: v.to_string(),
        at: Location::default(),
    })
}

pub fn bilinear_coefficients(cell: &CellGeometry) -> Result<MapCoefficients> {
    check_regular(cell)?;
    Ok(bilinear_coefficients_unchecked(cell))
}

/// Coefficients of x = a0 + a1 ξ + a2 η + a3 ξη (same for y with b) on the
/// reference square [-1/2, 1/2]², with A, B, C, D at the corners
/// (-,-), (+,-), (+,+), (-,+).
pub fn bilinear_coefficients_unchecked(cell: &CellGeometry) -> MapCoefficients {
    let [a, b, c, d] = cell.vertices;
    let coef = |k: usize| {
        [
            0.25 * (a[k] + b[k] + c[k] + d[k]),
            0.5 * (-a[k] + b[k] + c[k] - d[k]),
            0.5 * (-a[k] - b[k] + c[k] + d[k]),
            a[k] - b[k] + c[k] - d[k],
        ]
    };
    MapCoefficients { a: coef(0), b: coef(1) }
}

impl MapCoefficients {
    pub fn map(&self, xi: f64, eta: f64) -> Point {
        let a = &self.a;
        let b = &self.b;
        [
            a[0] + a[1] * xi + a[2] * eta + a[3] * xi * eta,
            b[0] + b[1] * xi + b[2] * eta + b[3] * xi * eta,
        ]
    }

    pub fn jacobian(&self, xi: f64, eta: f64) -> f64 {
        let a = &self.a;
        let b = &self.b;
        let x_xi = a[1] + a[3] * eta;
        let x_eta = a[2] + a[3] * xi;
        let y_xi = b[1] + b[3] * eta;
        let y_eta = b[2] + b[3] * xi;
        x_xi * y_eta - x_eta * y_xi
    }
}

/// Six moments via the tensor-product Gauss–Lobatto rule. The caller is
/// responsible for regularity.
pub fn exact_moments(cell: &CellGeometry) -> MomentSet {
    let map = bilinear_coefficients_unchecked(cell);
    let mut m = [0.0; 6];
    for (l, &xi) in GL_NODES.iter().enumerate() {
        for (k, &eta) in GL_NODES.iter().enumerate() {
            let w = GL_WEIGHTS[l] * GL_WEIGHTS[k] * map.jacobian(xi, eta).abs();
            let [x, y] = map.map(xi, eta);
            m[0] += w;
            m[1] += w * x;
            m[2] += w * y;
            m[3] += w * x * x;
            m[4] += w * x * y;
            m[5] += w * y * y;
        }
    }
    MomentSet::from_array(m)
}

/// Endpoints and midpoint of edge `k` (1-based) with the outward normal.
pub fn edge_quadrature(cell: &CellGeometry, k: usize) -> Result<EdgeQuadrature> {
    assert!((1..=4).contains(&k), "edge index must be in 1..=4");
    let p0 = cell.vertices[k - 1];
    let p1 = cell.vertices[k % 4];
    let dx = p1[0] - p0[0];
    let dy = p1[1] - p0[1];
    let length = (dx * dx + dy * dy).sqrt();
    if !(length > 0.0) {
        return Err(Error::Regularity {
            reason: format!("zero-length edge {}", k),
            at: Location::default(),
        });
    }
    Ok(EdgeQuadrature {
        k,
        length,
        normal: [dy / length, -dx / length],
        points: [p0, midpoint(p0, p1), p1],
        weights: GL_WEIGHTS,
    })
}

pub fn midpoint(p: Point, q: Point) -> Point {
    [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
}

pub fn cell_at(cell0: &CellGeometry, velocities: &[Point; 4], tau: f64) -> Result<CellGeometry> {
    let cell = cell_at_unchecked(cell0, velocities, tau);
    regularity_check(&cell).map_err(|v| Error::Regularity {
        reason: v.to_string(),
        at: Location {
            tau: Some(tau),
            ..Default::default()
        },
    })?;
    Ok(cell)
}

pub fn cell_at_unchecked(cell0: &CellGeometry, velocities: &[Point; 4], tau: f64) -> CellGeometry {
    let mut v = cell0.vertices;
    for (p, w) in v.iter_mut().zip(velocities) {
        p[0] += tau * w[0];
        p[1] += tau * w[1];
    }
    CellGeometry { vertices: v }
}

impl BasisFrame {
    pub fn new(centroid: Point, volume: f64) -> Self {
        Self {
            xc: centroid[0],
            yc: centroid[1],
            h: volume.sqrt(),
        }
    }

    /// Values of the six normalized basis functions at a point.
    #[inline]
    pub fn basis(&self, p: Point) -> [f64; 6] {
        let xi = (p[0] - self.xc) / self.h;
        let eta = (p[1] - self.yc) / self.h;
        [1.0, xi, eta, xi * xi, xi * eta, eta * eta]
    }
}

pub fn basis_integral(moments: &MomentSet, frame: &BasisFrame, s: usize, r: usize) -> Result<f64> {
    if s + r > 2 {
        return Err(Error::UnsupportedDegree { s, r });
    }
    let idx = EXPONENTS.iter().position(|&e| e == (s, r)).unwrap();
    Ok(basis_integrals(moments, frame)[idx])
}

/// All six ∫ψ_{s,r} in storage order. The first entry is m00 unchanged.
#[inline]
pub fn basis_integrals(m: &MomentSet, f: &BasisFrame) -> [f64; 6] {
    let dx = -f.xc;
    let dy = -f.yc;
    let ih = 1.0 / f.h;
    let ih2 = ih * ih;
    [
        m.m00,
        (m.m10 + dx * m.m00) * ih,
        (m.m01 + dy * m.m00) * ih,
        (m.m20 + 2.0 * dx * m.m10 + dx * dx * m.m00) * ih2,
        (m.m11 + dx * m.m01 + dy * m.m10 + dx * dy * m.m00) * ih2,
        (m.m02 + 2.0 * dy * m.m01 + dy * dy * m.m00) * ih2,
    ]
}
