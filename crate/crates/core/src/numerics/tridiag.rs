//! Symmetric tridiagonal eigenproblems: implicit QL for the full spectrum,
//! inverse iteration for a selected eigenvector.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Multiply `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// All eigenvalues, ascending, by the implicit QL iteration with shifts.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                // Look for a negligible off-diagonal entry to split at.
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 64 {
                    return Err(Error::NonConvergence(
                        "implicit QL: eigenvalue sweep did not deflate".into(),
                    ));
                }
                // Shifted QL sweep from m down to l.
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c) = (1.0, 1.0);
                let mut p = 0.0;
                let mut clean = true;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        clean = false;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if clean {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(d)
    }

    /// Eigenvector for an eigenvalue `lambda` already known to machine
    /// accuracy, by inverse iteration from a constant start vector.
    /// Returned with unit sup-norm.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(1.0);
        let mut x = vec![1.0; n];
        let mut last_residual = f64::INFINITY;
        for _ in 0..8 {
            solve_shifted(&self.diag, &self.off, lambda, &mut x, scale)?;
            let norm = x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Discretization(
                    "inverse iteration produced a degenerate vector".into(),
                ));
            }
            for v in &mut x {
                *v /= norm;
            }
            let t = self.apply(&x);
            let residual = t
                .iter()
                .zip(&x)
                .fold(0.0f64, |m, (&ti, &xi)| m.max((ti - lambda * xi).abs()));
            if residual <= 1e-12 * scale {
                break;
            }
            if residual >= last_residual {
                break; // stagnated at roundoff level
            }
            last_residual = residual;
        }
        // Fix the overall sign by the largest component.
        let (mut imax, mut vmax) = (0, 0.0f64);
        for (i, &v) in x.iter().enumerate() {
            if v.abs() > vmax {
                vmax = v.abs();
                imax = i;
            }
        }
        if x[imax] < 0.0 {
            for v in &mut x {
                *v = -*v;
            }
        }
        Ok(x)
    }
}

/// Solve `(T - shift I) x = b` in place by Gaussian elimination with partial
/// pivoting (one superdiagonal of fill-in). Near-singular pivots are nudged,
/// which is exactly what inverse iteration wants.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &mut [f64], scale: f64) -> Result<()> {
    let n = diag.len();
    let tiny = f64::EPSILON * scale;
    let mut d: Vec<f64> = diag.iter().map(|&v| v - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    let dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny.copysign(d[i]);
            }
            let m = dl[i] / d[i];
            d[i + 1] -= m * du[i];
            b[i + 1] -= m * b[i];
            if i + 2 < n {
                du2[i] = 0.0;
            }
        } else {
            let m = d[i] / dl[i];
            d[i] = dl[i];
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - m * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -m;
            }
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
        }
    }
    if d[n - 1].abs() < tiny {
        d[n - 1] = tiny.copysign(d[n - 1]);
    }
    b[n - 1] /= d[n - 1];
    if n >= 2 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    Ok(())
}
