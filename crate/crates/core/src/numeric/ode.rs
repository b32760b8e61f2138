//! Dormand–Prince 5(4) with step control, exact landing on requested output
//! times and a per-step admissibility check.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps shorter than this abort with [`Error::StepFailure`].
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_min: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    k1: [f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y_new = *y;
    let mut err = [0.0; N];
    for i in 0..N {
        for s in 0..6 {
            y_new[i] += h * A[6][s] * k[s][i];
        }
        for s in 0..7 {
            err[i] += h * E[s] * k[s][i];
        }
    }
    (y_new, err, k[6])
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each of
/// `outputs`, which must be monotone and lie on one side of `t0`.
/// `check` is called on every accepted state and aborts the run on error.
pub fn solve<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    opts: &OdeOptions,
    mut check: impl FnMut(f64, &[f64; N]) -> Result<()>,
) -> Result<Vec<[f64; N]>> {
    let Some(&last) = outputs.last() else {
        return Ok(Vec::new());
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    if outputs
        .windows(2)
        .any(|w| dir * (w[1] - w[0]) < 0.0)
        || dir * (outputs[0] - t0) < 0.0
    {
        return Err(Error::InvalidArgument(
            "output times must be monotone away from the initial time".into(),
        ));
    }
    check(t0, &y0)?;

    let mut result = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let span = (last - t0).abs();
    let mut h = (span * 1e-3).clamp(opts.h_min * 10.0, opts.h_max.min(1e-2).max(opts.h_min * 10.0));
    let mut steps = 0usize;

    for &target in outputs {
        while dir * (target - t) > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepFailure { t, h });
            }
            let remaining = (target - t).abs();
            let landing = h >= remaining;
            let hs = if landing { remaining } else { h };
            let (y_new, err, k7) = step(&f, t, &y, k1, dir * hs);
            let mut norm = 0.0;
            for i in 0..N {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                norm += (err[i] / sc).powi(2);
            }
            let norm = (norm / N as f64).sqrt();
            if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h = hs * 0.2;
                if h < opts.h_min {
                    return Err(Error::StepFailure { t, h });
                }
                continue;
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if norm <= 1.0 {
                t = if landing { target } else { t + dir * hs };
                y = y_new;
                k1 = k7;
                check(t, &y)?;
                // keep the proposed size when the step was shortened only to land
                if !landing {
                    h = (hs * factor).min(opts.h_max);
                } else {
                    h = h.max(hs * factor).min(opts.h_max);
                }
            } else {
                h = hs * factor;
                if h < opts.h_min {
                    return Err(Error::StepFailure { t, h });
                }
            }
        }
        result.push(y);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
        let ys = solve(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], &ts, &OdeOptions::default(), |_, _| Ok(()))
            .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let ts = [-1.0, -2.0, -3.0];
        let ys = solve(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            &ts,
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-9);
            assert!((y[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn blow_up_reports_step_failure() {
        // y' = y^2 from y(0) = 1 blows up at t = 1
        let err = solve(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            &[2.0],
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepFailure { .. }));
    }

    #[test]
    fn check_aborts_integration() {
        let err = solve(
            |_, _y: &[f64; 1]| [-1.0],
            0.0,
            [1.0],
            &[2.0],
            &OdeOptions::default(),
            |t, y| {
                if y[0] < 0.5 {
                    Err(Error::RadiusCollapse { t, r: y[0] })
                } else {
                    Ok(())
                }
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::RadiusCollapse { .. }));
    }

    #[test]
    fn non_monotone_outputs_are_rejected() {
        let r = solve(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[1.0, 0.5], &OdeOptions::default(), |_, _| Ok(()));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
