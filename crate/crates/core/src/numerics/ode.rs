//! Fixed-step classical Runge-Kutta integration for small autonomous-in-form
//! systems. Deterministic by construction: no adaptivity, no heuristics.

/// Integrate `y' = f(t, y)` from `t0` to `t1` in `n_steps` RK4 steps,
/// invoking `record(step, t, y)` at the initial state and after every step
/// (`n_steps + 1` calls in total).
pub fn rk4<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    n_steps: usize,
    mut record: impl FnMut(usize, f64, &[f64; N]),
) -> [f64; N] {
    assert!(n_steps > 0);
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0;
    record(0, t0, &y);
    for step in 0..n_steps {
        let t = t0 + h * step as f64;
        let k1 = f(t, &y);
        let mut y2 = y;
        for i in 0..N {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = y;
        for i in 0..N {
            y3[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = y;
        for i in 0..N {
            y4[i] = y[i] + h * k3[i];
        }
        let k4 = f(t + h, &y4);
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        record(step + 1, t0 + h * (step as f64 + 1.0), &y);
    }
    y
}
