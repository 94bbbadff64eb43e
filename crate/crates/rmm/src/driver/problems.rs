//! Initial data, exact solutions and default setups of the test problems.

use super::rng::Rng;
use crate::boundary::{dmr_post_shock, dmr_shock_x, BoundaryKind, BoundarySpec, ExactSolution, DMR_PRE_SHOCK};
use crate::equations::{primitive_to_conserved, Cons, PhysicsModel};
use crate::error::Result;
use crate::geometry::{bilinear_coefficients_unchecked, CellGeometry, MomentSet, Point, EXPONENTS};
use crate::grid::{Domain, Mesh};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const GAMMA: f64 = 1.4;

/// Five-point Gauss–Legendre rule on [-1/2, 1/2].
const GAUSS5_NODES: [f64; 5] = [
    -0.453_089_922_969_332_2,
    -0.269_234_655_052_841_4,
    0.0,
    0.269_234_655_052_841_4,
    0.453_089_922_969_332_2,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];

/// Cell average of a pointwise function by 5×5 Gauss quadrature on the
/// bilinear map.
pub fn gauss_average(cell: &CellGeometry, f: impl Fn(Point) -> Cons) -> Cons {
    let map = bilinear_coefficients_unchecked(cell);
    let mut sum = [0.0; 4];
    let mut area = 0.0;
    for (a, wa) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS) {
        for (b, wb) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS) {
            let w = wa * wb * map.jacobian(*a, *b);
            let v = f(map.map(*a, *b));
            for c in 0..4 {
                sum[c] += w * v[c];
            }
            area += w;
        }
    }
    sum.map(|s| s / area)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Quadratic,
    Sine,
    Blast,
    ShuOsher,
    Riemann2d,
    DoubleMach,
}

/// A quadratic p(x, y) = Σ c_{s,r} x^s y^r transported with velocity `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub coeffs: [f64; 6],
    pub a: [f64; 2],
}

impl Quadratic {
    /// Coefficients uniform on (-5, 5); those of total degree above `degree` are zero.
    pub fn random(rng: &mut Rng, degree: usize, a: [f64; 2]) -> Self {
        let mut coeffs = [0.0; 6];
        for (c, &(s, r)) in coeffs.iter_mut().zip(&EXPONENTS) {
            let u = rng.uniform(-5.0, 5.0);
            if s + r <= degree {
                *c = u;
            }
        }
        Self { coeffs, a }
    }

    pub fn value(&self, p: Point, t: f64) -> f64 {
        let x = p[0] - self.a[0] * t;
        let y = p[1] - self.a[1] * t;
        EXPONENTS
            .iter()
            .zip(&self.coeffs)
            .map(|(&(s, r), c)| c * x.powi(s as i32) * y.powi(r as i32))
            .sum()
    }
}

/// C(n, k) for n ≤ 2.
fn binomial(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k == n => 1.0,
        _ => n as f64,
    }
}

/// Exact cell average of the transported quadratic, from the cell's moments
/// by the binomial shift.
pub fn exact_advected_averages(coeffs: &[f64; 6], a: [f64; 2], t: f64, m: &MomentSet) -> f64 {
    let moments = m.to_array();
    let moment = |k: usize, l: usize| moments[EXPONENTS.iter().position(|&e| e == (k, l)).unwrap()];
    let (sx, sy) = (-a[0] * t, -a[1] * t);
    let mut total = 0.0;
    for (&(s, r), c) in EXPONENTS.iter().zip(coeffs) {
        if *c == 0.0 {
            continue;
        }
        for k in 0..=s {
            for l in 0..=r {
                total += c
                    * binomial(s, k)
                    * binomial(r, l)
                    * sx.powi((s - k) as i32)
                    * sy.powi((r - l) as i32)
                    * moment(k, l);
            }
        }
    }
    total / m.m00
}

impl ExactSolution for Quadratic {
    fn cell_average(&self, _cell: &CellGeometry, moments: &MomentSet, t: f64) -> Cons {
        [exact_advected_averages(&self.coeffs, self.a, t, moments), 0.0, 0.0, 0.0]
    }
}

/// Density wave 1 + 0.2 sin(2π(x + y)) carried by v = (1, 1) at p = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineWave;

impl SineWave {
    pub fn density(p: Point, t: f64) -> f64 {
        1.0 + 0.2 * (2.0 * std::f64::consts::PI * (p[0] + p[1] - 2.0 * t)).sin()
    }

    pub fn conserved(p: Point, t: f64) -> Cons {
        let rho = Self::density(p, t);
        [rho, rho, rho, 1.0 / (GAMMA - 1.0) + rho]
    }
}

impl ExactSolution for SineWave {
    fn cell_average(&self, cell: &CellGeometry, _moments: &MomentSet, t: f64) -> Cons {
        gauss_average(cell, |p| Self::conserved(p, t))
    }
}

fn cons(w: [f64; 4]) -> Cons {
    primitive_to_conserved(GAMMA, w).expect("tabulated states are physical")
}

/// A fully specified initial-value problem.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Quadratic(Quadratic),
    Sine,
    Blast,
    ShuOsher,
    Riemann2d,
    DoubleMach,
}

impl Problem {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Quadratic(_) => ProblemKind::Quadratic,
            Problem::Sine => ProblemKind::Sine,
            Problem::Blast => ProblemKind::Blast,
            Problem::ShuOsher => ProblemKind::ShuOsher,
            Problem::Riemann2d => ProblemKind::Riemann2d,
            Problem::DoubleMach => ProblemKind::DoubleMach,
        }
    }

    pub fn model(&self) -> PhysicsModel {
        match self {
            Problem::Quadratic(q) => PhysicsModel::Advection { a: q.a },
            _ => PhysicsModel::Euler { gamma: GAMMA },
        }
    }

    /// Default domain; the quasi one-dimensional problems are 10 cells tall.
    pub fn default_domain(&self, nx: usize, ny: usize) -> Domain {
        let strip = |x0: f64, x1: f64| {
            let h = (x1 - x0) / nx as f64;
            let half = 0.5 * ny as f64 * h;
            Domain::new(x0, x1, -half, half)
        };
        match self {
            Problem::Quadratic(_) | Problem::Sine | Problem::Riemann2d => Domain::unit(),
            Problem::Blast => strip(0.0, 1.0),
            Problem::ShuOsher => strip(-5.0, 5.0),
            Problem::DoubleMach => Domain::new(0.0, 4.0, 0.0, 1.0),
        }
    }

    pub fn default_boundary(&self) -> BoundarySpec {
        use BoundaryKind::*;
        match self {
            Problem::Quadratic(_) => BoundarySpec::all(Exact),
            Problem::Sine => BoundarySpec::all(Periodic),
            Problem::Blast => BoundarySpec::all(Reflective),
            Problem::ShuOsher => BoundarySpec {
                left: Outflow,
                right: Outflow,
                bottom: Reflective,
                top: Reflective,
            },
            Problem::Riemann2d => BoundarySpec::all(Outflow),
            Problem::DoubleMach => BoundarySpec::all(DmrSpecial),
        }
    }

    pub fn default_final_time(&self) -> f64 {
        match self {
            Problem::Quadratic(_) | Problem::Sine => 0.1,
            Problem::Blast => 0.038,
            Problem::ShuOsher => 1.8,
            Problem::Riemann2d => 0.25,
            Problem::DoubleMach => 0.2,
        }
    }

    pub fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        match self {
            Problem::Quadratic(q) => Some(q),
            Problem::Sine => Some(&SineWave),
            _ => None,
        }
    }

    /// Conserved state of the initial data at a point.
    pub fn initial_point(&self, p: Point) -> Cons {
        let [x, y] = p;
        match self {
            Problem::Quadratic(q) => [q.value(p, 0.0), 0.0, 0.0, 0.0],
            Problem::Sine => SineWave::conserved(p, 0.0),
            Problem::Blast => {
                let pr = if x < 0.1 {
                    1e3
                } else if x < 0.9 {
                    1e-2
                } else {
                    1e2
                };
                cons([1.0, 0.0, 0.0, pr])
            }
            Problem::ShuOsher => {
                if x < -4.0 {
                    cons([3.857143, 2.629369, 0.0, 10.33333])
                } else {
                    cons([1.0 + 0.2 * (5.0 * x).sin(), 0.0, 0.0, 1.0])
                }
            }
            Problem::Riemann2d => match (x < 0.5, y < 0.5) {
                (true, true) => cons([0.8, 0.0, 0.0, 1.0]),
                (true, false) => cons([1.0, 0.7276, 0.0, 1.0]),
                (false, true) => cons([1.0, 0.0, 0.7276, 1.0]),
                (false, false) => cons([0.5313, 0.0, 0.0, 0.4]),
            },
            Problem::DoubleMach => {
                if x < dmr_shock_x(y, 0.0) {
                    cons(dmr_post_shock())
                } else {
                    cons(DMR_PRE_SHOCK)
                }
            }
        }
    }

    /// Initial cell averages: exact for the quadratic, 5×5 Gauss otherwise.
    pub fn initial_averages(&self, mesh: &Mesh, moments: &[MomentSet]) -> Result<Vec<Cons>> {
        let g = mesh.grid;
        Ok((0..g.num_cells())
            .into_par_iter()
            .map(|k| {
                let cell = mesh.cell(k % g.nx, k / g.nx);
                match self {
                    Problem::Quadratic(q) => q.cell_average(&cell, &moments[k], 0.0),
                    _ => gauss_average(&cell, |p| self.initial_point(p)),
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::exact_moments;

    #[test]
    fn advected_average_examples() {
        let cell = CellGeometry::new([[0.1, 0.2], [0.5, 0.25], [0.55, 0.7], [0.05, 0.6]]);
        let m = exact_moments(&cell);
        let x = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let v = exact_advected_averages(&x, [1.0, 0.0], 0.1, &m);
        assert!((v - (m.m10 / m.m00 - 0.1)).abs() < 1e-15);
        let xx = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let v = exact_advected_averages(&xx, [1.0, 0.0], 0.1, &m);
        assert!((v - (m.m20 - 0.2 * m.m10 + 0.01 * m.m00) / m.m00).abs() < 1e-15);
        let c = [1.0, 2.0, -3.0, 0.5, 4.0, -1.0];
        let t0 = exact_advected_averages(&c, [1.0, 1.0], 0.0, &m);
        let proj = (c[0] * m.m00 + c[1] * m.m10 + c[2] * m.m01 + c[3] * m.m20 + c[4] * m.m11 + c[5] * m.m02) / m.m00;
        assert!((t0 - proj).abs() < 1e-14);
    }

    #[test]
    fn gauss_average_matches_moments() {
        let cell = CellGeometry::new([[0.1, 0.2], [0.5, 0.25], [0.55, 0.7], [0.05, 0.6]]);
        let m = exact_moments(&cell);
        let q = Quadratic {
            coeffs: [1.0, 2.0, -3.0, 0.5, 4.0, -1.0],
            a: [1.0, 1.0],
        };
        let g = gauss_average(&cell, |p| [q.value(p, 0.3), 0.0, 0.0, 0.0]);
        assert!((g[0] - q.cell_average(&cell, &m, 0.3)[0]).abs() < 1e-13);
    }

    #[test]
    fn random_coefficients_respect_degree() {
        let mut rng = Rng::new(3);
        let q = Quadratic::random(&mut rng, 1, [1.0, 1.0]);
        assert_eq!(&q.coeffs[3..], &[0.0; 3]);
        assert!(q.coeffs[..3].iter().all(|c| c.abs() < 5.0 && *c != 0.0));
    }
}
