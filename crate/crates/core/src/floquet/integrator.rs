//! Adaptive Dormand–Prince 5(4) integration of complex matrix ODEs `X′ = F(y, X)`.

use num_complex::Complex64;

use crate::linalg::CMat;

use super::FloquetError;

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
/// Fifth-order weights (equal to the last stage row: first same as last).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integration {
    pub value: CMat,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub err_estimate: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates from `y0` to `y1` with mixed relative/absolute tolerance `tol` per step.
pub fn dopri5(
    f: impl Fn(f64, &CMat) -> CMat,
    y0: f64,
    y1: f64,
    x0: CMat,
    tol: f64,
) -> Result<Integration, FloquetError> {
    const MAX_STEPS: usize = 2_000_000;
    let span = y1 - y0;
    let h_min = span.abs() * 1e-13;
    let mut h = span / 64.0;
    let mut y = y0;
    let mut x = x0;
    let mut k1 = f(y, &x);
    let mut out = Integration { value: CMat::zeros(0, 0), err_estimate: 0.0, accepted: 0, rejected: 0 };
    while (y1 - y) * span.signum() > 0.0 {
        if out.accepted + out.rejected > MAX_STEPS {
            return Err(FloquetError::IntegratorFailure { y, step: h });
        }
        if (y + h - y1) * span.signum() > 0.0 {
            h = y1 - y;
        }
        let mut ks: Vec<CMat> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for s in 1..7 {
            let mut xs = x.clone();
            for (j, kj) in ks.iter().enumerate() {
                if A[s][j] != 0.0 {
                    xs = xs.axpy(Complex64::new(h * A[s][j], 0.0), kj);
                }
            }
            ks.push(f(y + C[s] * h, &xs));
        }
        let mut x_new = x.clone();
        let mut err = CMat::zeros(x.rows(), x.cols());
        for s in 0..7 {
            if B5[s] != 0.0 {
                x_new = x_new.axpy(Complex64::new(h * B5[s], 0.0), &ks[s]);
            }
            let e = B5[s] - B4[s];
            if e != 0.0 {
                err = err.axpy(Complex64::new(h * e, 0.0), &ks[s]);
            }
        }
        let mut ratio: f64 = 0.0;
        for ((e, a), b) in err.as_slice().iter().zip(x.as_slice()).zip(x_new.as_slice()) {
            let scale = tol * (1.0 + a.norm().max(b.norm()));
            ratio = ratio.max(e.norm() / scale);
        }
        if !ratio.is_finite() {
            if !x_new.is_finite() {
                return Err(FloquetError::IntegratorFailure { y, step: h });
            }
            ratio = 1e10;
        }
        if ratio <= 1.0 {
            y += h;
            x = x_new;
            k1 = ks.pop().expect("seven stages");
            out.accepted += 1;
            out.err_estimate += err.max_abs();
        } else {
            out.rejected += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < h_min && (y1 - y).abs() > h_min {
            return Err(FloquetError::IntegratorFailure { y, step: h });
        }
    }
    out.value = x;
    Ok(out)
}
