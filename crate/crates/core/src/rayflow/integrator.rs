//! Dormand–Prince 5(4) stepping of the time-parametrized bicharacteristic flow.
//!
//! The state is `(x1, x2, xi1, xi2)`; `tau` is a constant of motion and enters
//! as a parameter. With time as the independent variable the field is
//! `dx/dt = -A xi / tau`, `dxi/dt = (xi^T dA/dx_k xi) / (2 tau)`.

use crate::geometry::{MetricField, Vec2};
use crate::symbols::PhasePoint;

pub(crate) type State = [f64; 4];

pub(crate) fn pack(p: &PhasePoint) -> State {
    [p.x.x, p.x.y, p.xi.x, p.xi.y]
}

pub(crate) fn unpack(y: &State, t: f64, tau: f64) -> PhasePoint {
    PhasePoint::new(t, Vec2::new(y[0], y[1]), tau, Vec2::new(y[2], y[3]))
}

pub(crate) fn field(metric: &MetricField, tau: f64, y: &State) -> State {
    let x = Vec2::new(y[0], y[1]);
    let xi = Vec2::new(y[2], y[3]);
    let v = -(metric.a(x) * xi) / tau;
    let g = metric.grad(x);
    let c = 0.5 / tau;
    [v.x, v.y, c * xi.dot(&(g[0] * xi)), c * xi.dot(&(g[1] * xi))]
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step of size `h`. Returns the fifth-order solution and
/// the embedded error estimate. The field is autonomous, so stage times drop out.
pub(crate) fn dp_step(metric: &MetricField, tau: f64, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 4]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..4 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = field(metric, tau, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; 4];
    for s in 0..7 {
        for i in 0..4 {
            y5[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (y5, err)
}

/// Mixed absolute/relative error norm of an embedded estimate.
pub(crate) fn error_norm(y: &State, y_new: &State, err: &State, tol: f64) -> f64 {
    (0..4)
        .map(|i| {
            let scale = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            (err[i] / scale).abs()
        })
        .fold(0.0, f64::max)
}

/// Step size proposal after a step with error norm `e`.
pub(crate) fn next_step(h: f64, e: f64) -> f64 {
    let factor = if e == 0.0 {
        5.0
    } else {
        (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
    };
    h * factor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifth_order_convergence_on_curved_metric() {
        let m = MetricField::DiagonalAffine {
            base: [1.0, 1.0],
            slope: [[0.3, 0.0], [0.0, 0.0]],
            power: 2,
        };
        let tau = 1.0;
        let y0 = [0.0, 0.0, -0.6, -0.8 / 1.0];
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = y0;
            for _ in 0..n {
                y = dp_step(&m, tau, &y, h).0;
            }
            y
        };
        let reference = run(2048);
        let e1 = (run(16)[0] - reference[0]).abs();
        let e2 = (run(32)[0] - reference[0]).abs();
        let order = (e1 / e2).log2();
        assert!(order > 4.5, "observed order {order}");
    }
}
