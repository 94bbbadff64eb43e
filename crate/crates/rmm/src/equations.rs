//! Scalar linear advection and the 2D compressible Euler equations.

use crate::error::{Error, Location, Result};

pub const MAX_VARS: usize = 4;

/// Conserved variables; only the first `model.m()` entries are meaningful.
pub type Cons = [f64; MAX_VARS];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhysicsModel {
    Advection { a: [f64; 2] },
    Euler { gamma: f64 },
}

impl PhysicsModel {
    pub fn m(&self) -> usize {
        match self {
            PhysicsModel::Advection { .. } => 1,
            PhysicsModel::Euler { .. } => 4,
        }
    }

    pub fn is_euler(&self) -> bool {
        matches!(self, PhysicsModel::Euler { .. })
    }
}

fn state_error(reason: String) -> Error {
    Error::State {
        reason,
        at: Location::default(),
    }
}

/// Primitive (ρ, vx, vy, p) to conserved (ρ, ρvx, ρvy, E).
pub fn primitive_to_conserved(gamma: f64, w: [f64; 4]) -> Result<Cons> {
    let [rho, vx, vy, p] = w;
    if !(rho > 0.0) || !(p > 0.0) {
        return Err(state_error(format!("rho = {:.4e}, p = {:.4e}", rho, p)));
    }
    Ok([
        rho,
        rho * vx,
        rho * vy,
        p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy),
    ])
}

pub fn conserved_to_primitive(gamma: f64, u: &Cons) -> Result<[f64; 4]> {
    let rho = u[0];
    if !(rho > 0.0) {
        return Err(state_error(format!("rho = {:.4e}", rho)));
    }
    let vx = u[1] / rho;
    let vy = u[2] / rho;
    let p = (gamma - 1.0) * (u[3] - 0.5 * rho * (vx * vx + vy * vy));
    if !(p > 0.0) {
        return Err(state_error(format!("p = {:.4e}", p)));
    }
    Ok([rho, vx, vy, p])
}

/// Pressure without validation.
#[inline]
pub fn pressure(gamma: f64, u: &Cons) -> f64 {
    (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0])
}

pub fn is_admissible(model: &PhysicsModel, u: &Cons) -> bool {
    match *model {
        PhysicsModel::Advection { .. } => u[0].is_finite(),
        PhysicsModel::Euler { gamma } => u[0] > 0.0 && pressure(gamma, u) > 0.0 && u[3].is_finite(),
    }
}

/// F(U)·n.
#[inline]
pub fn physical_flux(model: &PhysicsModel, u: &Cons, n: [f64; 2]) -> Result<Cons> {
    match *model {
        PhysicsModel::Advection { a } => Ok([u[0] * (a[0] * n[0] + a[1] * n[1]), 0.0, 0.0, 0.0]),
        PhysicsModel::Euler { gamma } => {
            let [rho, vx, vy, p] = conserved_to_primitive(gamma, u)?;
            let vn = vx * n[0] + vy * n[1];
            Ok([
                rho * vn,
                u[1] * vn + p * n[0],
                u[2] * vn + p * n[1],
                (u[3] + p) * vn,
            ])
        }
    }
}

#[inline]
pub fn max_wavespeed(model: &PhysicsModel, u: &Cons, n: [f64; 2]) -> Result<f64> {
    match *model {
        PhysicsModel::Advection { a } => Ok((a[0] * n[0] + a[1] * n[1]).abs()),
        PhysicsModel::Euler { gamma } => {
            let [rho, vx, vy, p] = conserved_to_primitive(gamma, u)?;
            Ok((vx * n[0] + vy * n[1]).abs() + (gamma * p / rho).sqrt())
        }
    }
}

/// Flux and wavespeed in one pass.
#[inline]
pub fn flux_and_speed(model: &PhysicsModel, u: &Cons, n: [f64; 2]) -> Result<(Cons, f64)> {
    match *model {
        PhysicsModel::Advection { a } => {
            let an = a[0] * n[0] + a[1] * n[1];
            Ok(([u[0] * an, 0.0, 0.0, 0.0], an.abs()))
        }
        PhysicsModel::Euler { gamma } => {
            let [rho, vx, vy, p] = conserved_to_primitive(gamma, u)?;
            let vn = vx * n[0] + vy * n[1];
            Ok((
                [
                    rho * vn,
                    u[1] * vn + p * n[0],
                    u[2] * vn + p * n[1],
                    (u[3] + p) * vn,
                ],
                vn.abs() + (gamma * p / rho).sqrt(),
            ))
        }
    }
}

/// Velocity carried by a state (the advection speed for scalar advection).
pub fn transport_velocity(model: &PhysicsModel, u: &Cons) -> [f64; 2] {
    match *model {
        PhysicsModel::Advection { a } => a,
        PhysicsModel::Euler { .. } => {
            if u[0] > 0.0 {
                [u[1] / u[0], u[2] / u[0]]
            } else {
                [0.0, 0.0]
            }
        }
    }
}
