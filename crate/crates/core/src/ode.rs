//! Dormand–Prince 5(4) with step-size control, reporting the solution at
//! requested output times.

use crate::error::{Result, StaError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 10_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrates y' = f(t, y) from (t0, y0) and returns y at each of
/// `outputs` (ascending, ≥ t0). Steps are clipped to land on each output.
/// `f` may return an error to abort (e.g. leaving the physical domain).
pub fn integrate<const D: usize, F>(f: F, t0: f64, y0: [f64; D], outputs: &[f64], opts: &OdeOptions) -> Result<Vec<[f64; D]>>
where
    F: Fn(f64, &[f64; D]) -> Result<[f64; D]>,
{
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(outputs.len());
    let t_end = outputs.last().copied().unwrap_or(t0);
    let mut h = 1e-3 * (t_end - t0).abs().max(1e-12);
    let mut k1 = f(t, &y)?;
    let mut steps = 0usize;

    for &target in outputs {
        if target < t {
            return Err(StaError::invalid("outputs", "output times must be ascending and >= t0"));
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(StaError::SolverFailure { t, reason: "step budget exhausted".into() });
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };

            let k2 = f(t + C2 * step, &axpy(&y, &[(step * A21, &k1)]))?;
            let k3 = f(t + C3 * step, &axpy(&y, &[(step * A31, &k1), (step * A32, &k2)]))?;
            let k4 = f(t + C4 * step, &axpy(&y, &[(step * A41, &k1), (step * A42, &k2), (step * A43, &k3)]))?;
            let k5 = f(
                t + C5 * step,
                &axpy(&y, &[(step * A51, &k1), (step * A52, &k2), (step * A53, &k3), (step * A54, &k4)]),
            )?;
            let k6 = f(
                t + step,
                &axpy(
                    &y,
                    &[(step * A61, &k1), (step * A62, &k2), (step * A63, &k3), (step * A64, &k4), (step * A65, &k5)],
                ),
            )?;
            let y_new = axpy(&y, &[(step * B1, &k1), (step * B3, &k3), (step * B4, &k4), (step * B5, &k5), (step * B6, &k6)]);
            let k7 = f(t + step, &y_new)?;

            let mut err = 0.0f64;
            for i in 0..D {
                let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / scale).abs());
            }
            steps += 1;
            if !err.is_finite() {
                return Err(StaError::SolverFailure { t, reason: "non-finite error estimate".into() });
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // keep the proposed step when only the output clipping shortened it
            if !(last && err <= 1.0) {
                h = step * factor;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(StaError::SolverFailure { t, reason: "step size underflow".into() });
            }
        }
        out.push(y);
    }
    Ok(out)
}
