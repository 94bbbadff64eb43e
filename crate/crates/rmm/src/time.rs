//! Three-stage SSP Runge–Kutta driver shared by the physical evolution and
//! the pseudo-time remap.

/// Stage times relative to the step start, in units of the step size.
pub const STAGE_OFFSETS: [f64; 3] = [0.0, 1.0, 0.5];

/// Weights of the stage right-hand sides in the full update.
pub const STAGE_WEIGHTS: [f64; 3] = [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0];

/// One SSPRK3 step. `rhs(stage, stage_time, u)` returns the right-hand side
/// evaluated at `u`, which lives on the stage geometry at `stage_time`.
pub fn ssprk3_step<const N: usize, E>(
    u0: &[[f64; N]],
    t: f64,
    dt: f64,
    mut rhs: impl FnMut(usize, f64, &[[f64; N]]) -> Result<Vec<[f64; N]>, E>,
) -> Result<Vec<[f64; N]>, E> {
    let r = rhs(0, t + STAGE_OFFSETS[0] * dt, u0)?;
    let u1: Vec<[f64; N]> = u0
        .iter()
        .zip(&r)
        .map(|(a, b)| std::array::from_fn(|k| a[k] + dt * b[k]))
        .collect();
    let r = rhs(1, t + STAGE_OFFSETS[1] * dt, &u1)?;
    let u2: Vec<[f64; N]> = u0
        .iter()
        .zip(u1.iter().zip(&r))
        .map(|(a, (b, c))| std::array::from_fn(|k| 0.75 * a[k] + 0.25 * (b[k] + dt * c[k])))
        .collect();
    let r = rhs(2, t + STAGE_OFFSETS[2] * dt, &u2)?;
    Ok(u0
        .iter()
        .zip(u2.iter().zip(&r))
        .map(|(a, (b, c))| std::array::from_fn(|k| a[k] / 3.0 + 2.0 / 3.0 * (b[k] + dt * c[k])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_decay_is_third_order() {
        let step = |dt: f64| {
            let mut u = vec![[1.0]];
            let n = (1.0 / dt).round() as usize;
            for s in 0..n {
                u = ssprk3_step::<1, ()>(&u, s as f64 * dt, dt, |_, _, v| Ok(vec![[-v[0][0]]])).unwrap();
            }
            (u[0][0] - (-1.0f64).exp()).abs()
        };
        let ratio = step(0.1) / step(0.05);
        assert!(ratio > 7.0 && ratio < 9.0, "ratio {}", ratio);
    }
}
