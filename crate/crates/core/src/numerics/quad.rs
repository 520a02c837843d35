//! Gauss-Legendre quadrature nodes and weights.

/// Gauss-Legendre rule on `[a, b]` with `n` nodes. Nodes are roots of the
/// Legendre polynomial `P_n`, found by Newton iteration from the Chebyshev
/// initial guess; exact for polynomials of degree `2n - 1`.
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2, "need at least two quadrature nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let (xm, xl) = (0.5 * (b + a), 0.5 * (b - a));
        for i in 0..m {
            // Chebyshev-like first guess for the i-th root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
                let (mut p0, mut p1) = (1.0, 0.0);
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j as f64 + 1.0) * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
                }
                pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
                let dx = p0 / pp;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
            nodes[i] = xm - xl * x;
            nodes[n - 1 - i] = xm + xl * x;
            let w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 8, 64] {
            let gl = GaussLegendre::new(n, -1.0, 3.0);
            let total: f64 = gl.weights.iter().sum();
            assert!((total - 4.0).abs() < 1e-12, "n={n} total={total}");
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let gl = GaussLegendre::new(8, 0.0, 1.0);
        // x^15 is degree 2*8 - 1, still exact.
        let val = gl.integrate(|x| x.powi(15));
        assert!((val - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn sixty_four_nodes_nails_smooth_integrands() {
        let gl = GaussLegendre::new(64, 0.0, std::f64::consts::PI / 2.0);
        let val = gl.integrate(|t| 1.0 / (t.sin().powi(2) + 2.0 * t.cos().powi(2)));
        let exact = std::f64::consts::PI / (2.0 * 2.0f64.sqrt());
        assert!((val - exact).abs() < 1e-13);
    }
}
