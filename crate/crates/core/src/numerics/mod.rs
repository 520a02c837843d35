//! Small numerical kernels used across the solver: quadrature, safeguarded
//! root finding, tridiagonal eigenvalues, banded LU, fixed-step RK4.

pub mod banded;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod tridiag;

/// Composite Simpson rule on a uniform grid of `values` with spacing `h`.
/// Requires an even number of intervals, i.e. an odd number of samples.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd sample count");
    let mut sum = values[0] + values[n - 1];
    for (j, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        sum += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * h / 3.0
}
