//! Transversal spectra: the linearized operator at a limiting state, its
//! principal eigenvalue, and the shooting certificate for kernel triviality.
//!
//! Linearizing the transversal equation at a state `U` gives the
//! Sturm-Liouville operator
//!
//! ```text
//!   L' psi = ( a(y) psi' )' - b_kappa(U, lambda) psi,
//!   a(y)   = W'(U_y^2) + 2 U_y^2 W''(U_y^2) > 0,
//! ```
//!
//! with Dirichlet conditions at the walls. Its spectrum is real and bounded
//! above; the principal eigenvalue `sigma0` carries a positive eigenfunction.
//! At the nontrivial conjugate states `sigma0 < 0` (with `sigma0 ~ -eps^2`
//! near onset), while the trivial state at load `lambda > 0` has
//! `sigma0 = lambda > 0`.
//!
//! The kernel test integrates the variational equation of the wall-shooting
//! problem: `Phi(y; mu)` solves the nonlinear transversal ODE with
//! `Phi(-pi/2) = 0`, `Phi_y(-pi/2) = mu`, and `PhiDot = d Phi / d mu`
//! satisfies `L' PhiDot = 0` with `PhiDot(-pi/2) = 0`, `PhiDot'(-pi/2) = 1`.
//! The operator has a kernel exactly when `PhiDot(pi/2) = 0`. By Sturm
//! oscillation theory the sign of `PhiDot(pi/2)` encodes the parity of the
//! number of Dirichlet eigenvalues above zero: at a conjugate state all
//! eigenvalues are negative, so the certificate of a trivial kernel is
//! `PhiDot(pi/2) > 0` strictly. (Differentiating the return-map identity
//! `Phi(-pi/2 + P(H(0,mu)); mu) = 0` gives
//! `PhiDot(pi/2) = -U_y(pi/2) P_c H_V(0, mu) = V0 P_c H_V > 0`
//! from period monotonicity and `V H_V > 0`.)

use crate::conjugate::{resample_level, TransversalProfile};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::numerics::ode::rk4;
use crate::numerics::tridiag::SymTridiag;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Discretized transversal linearized operator on a uniform `y`-grid.
///
/// `a_values` and `v_values` hold the ellipticity coefficient `a(y)` and the
/// potential `-b_kappa(U(y), lambda)` at the nodes; the conservative
/// difference stencil additionally uses `a` at the half-nodes, obtained by
/// sampling the profile at doubled resolution rather than by averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct TransversalOperator {
    pub lambda: f64,
    pub y_grid: Vec<f64>,
    pub a_values: Vec<f64>,
    pub v_values: Vec<f64>,
    a_half: Vec<f64>,
}

/// Principal eigenvalue and its positive eigenfunction (wall zeros included).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub sigma0: f64,
    pub phi: Vec<f64>,
}

/// Build the operator at the state carried by `profile`, re-integrated on a
/// uniform grid of `n` nodes (odd, >= 33) so half-node coefficients are exact
/// samples.
pub fn assemble_operator(
    model: &MaterialModel,
    profile: &TransversalProfile,
    n: usize,
) -> Result<TransversalOperator> {
    if n < 33 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "operator grid wants an odd node count >= 33, got {n}"
        )));
    }
    let fine = resample_level(model, profile.c, profile.lambda, 2 * n - 1)?;
    // resample_level returns the positive orbit; restore the input's sign.
    // The coefficients below are even in U, so this only matters for
    // faithfulness of the sampled state, not for the assembled operator.
    let sign = if profile.u_at_center() < 0.0 { -1.0 } else { 1.0 };
    let mut y_grid = Vec::with_capacity(n);
    let mut a_values = Vec::with_capacity(n);
    let mut v_values = Vec::with_capacity(n);
    let mut a_half = Vec::with_capacity(n - 1);
    for k in 0..2 * n - 1 {
        let v = sign * fine.v_values[k];
        let a = model.gradient_coeff(v * v);
        if a <= 0.0 {
            return Err(Error::Ellipticity(format!(
                "coefficient a = {a} <= 0 at y = {}",
                fine.y_grid[k]
            )));
        }
        if k % 2 == 0 {
            let u = sign * fine.u_values[k];
            y_grid.push(fine.y_grid[k]);
            a_values.push(a);
            v_values.push(-model.body_force_unchecked(u, profile.lambda).b_kappa);
        } else {
            a_half.push(a);
        }
    }
    Ok(TransversalOperator {
        lambda: profile.lambda,
        y_grid,
        a_values,
        v_values,
        a_half,
    })
}

impl TransversalOperator {
    pub fn n(&self) -> usize {
        self.y_grid.len()
    }

    /// Symmetric tridiagonal matrix over the interior nodes: conservative
    /// fluxes with half-node coefficients, Dirichlet rows eliminated.
    pub fn matrix(&self) -> SymTridiag {
        let n = self.n();
        let h = self.y_grid[1] - self.y_grid[0];
        let h2 = h * h;
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for k in 0..m {
            let j = k + 1; // node index
            diag[k] = -(self.a_half[j - 1] + self.a_half[j]) / h2 + self.v_values[j];
            if k + 1 < m {
                off[k] = self.a_half[j] / h2;
            }
        }
        SymTridiag::new(diag, off).expect("interior size >= 1 by construction")
    }
}

/// Largest eigenvalue of the discretized operator with its eigenfunction,
/// sup-normalized positive and padded with the wall zeros.
pub fn principal_eigenvalue(op: &TransversalOperator) -> Result<EigenResult> {
    let m = op.matrix();
    let eigs = m.eigenvalues()?;
    let sigma0 = *eigs.last().expect("nonempty spectrum");
    let mut interior = m.eigenvector(sigma0)?;
    // Principal eigenvector of a Jacobi matrix with positive off-diagonal
    // entries is strictly one-signed; anything else means the iteration
    // locked onto the wrong eigenvalue or the discretization is broken.
    let flip = interior.iter().fold(0.0f64, |s, &x| s + x) < 0.0;
    if flip {
        for x in &mut interior {
            *x = -*x;
        }
    }
    if interior.iter().any(|&x| x <= 0.0) {
        return Err(Error::Discretization(
            "principal eigenfunction changes sign".into(),
        ));
    }
    let sup = interior.iter().fold(0.0f64, |m, &x| m.max(x));
    let mut phi = Vec::with_capacity(op.n());
    phi.push(0.0);
    phi.extend(interior.iter().map(|&x| x / sup));
    phi.push(0.0);
    Ok(EigenResult { sigma0, phi })
}

/// Shooting certificate for kernel triviality of the transversal linearized
/// operator at the state carried by `profile`.
///
/// Integrates the augmented system for `(U, V, PhiDot, a PhiDot')` so the
/// variational coefficients ride on the exact orbit rather than interpolated
/// samples. Returns `PhiDot(pi/2)`: zero means a kernel (as at the trivial
/// state for `lambda = 0`, where the kernel is `cos y`); strictly positive
/// certifies triviality at a conjugate state (see module docs for the sign).
pub fn kernel_test_shooting(
    model: &MaterialModel,
    profile: &TransversalProfile,
    n_steps: usize,
) -> Result<f64> {
    if n_steps < 64 {
        return Err(Error::InvalidInput(format!(
            "kernel shooting needs at least 64 steps, got {n_steps}"
        )));
    }
    let lambda = profile.lambda;
    let mu = profile.v_values[0];
    let a0 = model.gradient_coeff(mu * mu);
    if a0 <= 0.0 {
        return Err(Error::Ellipticity(format!(
            "coefficient a = {a0} <= 0 at the bottom wall"
        )));
    }
    let rhs = |_y: f64, s: &[f64; 4]| {
        let f = model.gradient_coeff(s[1] * s[1]);
        let bf = model.body_force_unchecked(s[0], lambda);
        [s[1], bf.b / f, s[3] / f, bf.b_kappa * s[2]]
    };
    let end = rk4(rhs, [0.0, mu, 0.0, a0], -HALF_PI, HALF_PI, n_steps, |_, _, _| {});
    Ok(end[2])
}

/// Principal eigenvalue along the small-amplitude branch: for each `eps`
/// the state is `U+(eps^2)` and the discretization uses `n_nodes` points.
/// Returns `(eps, sigma0)` pairs; `eps = 0` is the trivial state at zero
/// load, whose exact `sigma0` is 0.
pub fn sigma0_curve(
    model: &MaterialModel,
    eps_list: &[f64],
    n_nodes: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps < 0.0 {
            return Err(Error::Domain(format!("eps = {eps} < 0")));
        }
        let profile = crate::conjugate::profile_on_grid(model, eps * eps, n_nodes)?;
        let op = assemble_operator(model, &profile, n_nodes)?;
        let res = principal_eigenvalue(&op)?;
        out.push((eps, res.sigma0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate::u_plus;

    fn model() -> MaterialModel {
        MaterialModel::linear(1.0)
    }

    #[test]
    fn trivial_operator_at_zero_load_is_dy2_plus_one() {
        let m = model();
        let zero = TransversalProfile::zero(0.0, 129);
        let op = assemble_operator(&m, &zero, 129).unwrap();
        assert!(op.a_values.iter().all(|&a| a == 1.0));
        assert!(op.v_values.iter().all(|&v| v == 1.0));
        let res = principal_eigenvalue(&op).unwrap();
        // Discrete spectrum of psi'' + psi: sigma0 = 1 - (4/h^2) sin^2(h/2)
        // = h^2/12 + O(h^4); the continuum value is exactly 0.
        let h = std::f64::consts::PI / 128.0;
        assert!(
            (res.sigma0 - h * h / 12.0).abs() < 1e-7,
            "sigma0 = {}",
            res.sigma0
        );
        // eigenfunction is cos y, already sup-normalized at the center
        for (j, &y) in op.y_grid.iter().enumerate() {
            assert!((res.phi[j] - y.cos()).abs() < 1e-4, "y = {y}");
        }
    }

    #[test]
    fn trivial_operator_at_unit_load_shifts_by_the_load() {
        let m = model();
        let zero = TransversalProfile::zero(1.0, 129);
        let op = assemble_operator(&m, &zero, 129).unwrap();
        assert!(op.v_values.iter().all(|&v| v == 2.0));
        let res = principal_eigenvalue(&op).unwrap();
        assert!((res.sigma0 - 1.0).abs() < 1e-3, "sigma0 = {}", res.sigma0);
    }

    #[test]
    fn conjugate_pair_yields_the_identical_operator() {
        let m = model();
        let plus = u_plus(&m, 1.0).unwrap();
        let minus = plus.negated();
        let op_plus = assemble_operator(&m, &plus, 65).unwrap();
        let op_minus = assemble_operator(&m, &minus, 65).unwrap();
        // a is even in V and b_kappa even in U, exactly as evaluated.
        assert_eq!(op_plus, op_minus);
    }

    #[test]
    fn sigma0_converges_at_second_order() {
        let m = model();
        let plus = u_plus(&m, 1.0).unwrap();
        let s: Vec<f64> = [65usize, 129, 257]
            .iter()
            .map(|&n| {
                let op = assemble_operator(&m, &plus, n).unwrap();
                principal_eigenvalue(&op).unwrap().sigma0
            })
            .collect();
        let ratio = (s[0] - s[1]) / (s[1] - s[2]);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
        assert!(s[2] < 0.0, "sigma0 = {} should be negative", s[2]);
    }

    #[test]
    fn sigma0_scales_like_minus_two_eps_squared_near_onset() {
        // Perturbation theory at the conjugate state U+ = a1 eps cos y +
        // O(eps^3) with lambda = eps^2: the load shifts the potential by
        // +eps^2, the coefficient correction contributes
        // -6 w1 a1^2 <sin^4> and the potential correction -3 b2 a1^2 <cos^4>
        // (both 3/4 after normalizing by <cos^2>), so
        //   sigma0 = eps^2 [ 1 - (9/4) a1^2 (b2 + 2 w1) ] + O(eps^4)
        //          = -2 eps^2 + O(eps^4)
        // for every admissible material, since a1^2 = 4/(3 (b2 + 2 w1)).
        let m = model();
        let curve = sigma0_curve(&m, &[0.05, 0.1, 0.2], 513).unwrap();
        for &(eps, s) in &curve {
            let scaled = s / (eps * eps);
            assert!(
                scaled > -2.2 && scaled < -1.8,
                "eps = {eps}: sigma0/eps^2 = {scaled}"
            );
        }
        // Even remainder: Richardson over an eps-halving converges to -2.
        let s01 = curve[1].1 / (0.1f64 * 0.1);
        let s005 = curve[0].1 / (0.05f64 * 0.05);
        let extrap = s005 + (s005 - s01) / 3.0;
        assert!((extrap + 2.0).abs() < 0.1, "extrapolated {extrap}");
        // The tanh-family constant is the same: material dependence cancels.
        let mt = MaterialModel::tanh(0.8);
        let curve_t = sigma0_curve(&mt, &[0.05], 513).unwrap();
        let scaled_t = curve_t[0].1 / (0.05f64 * 0.05);
        assert!(
            scaled_t > -2.2 && scaled_t < -1.8,
            "tanh family: sigma0/eps^2 = {scaled_t}"
        );
    }

    #[test]
    fn kernel_shooting_vanishes_exactly_at_the_bifurcation_point() {
        let m = model();
        let zero = TransversalProfile::zero(0.0, 65);
        let end = kernel_test_shooting(&m, &zero, 2048).unwrap();
        // PhiDot = sin(y + pi/2), so the wall value is sin(pi) = 0.
        assert!(end.abs() < 1e-8, "PhiDot(pi/2) = {end}");
    }

    #[test]
    fn kernel_shooting_sign_tracks_eigenvalue_parity() {
        let m = model();
        // Trivial state at lambda = 1: exactly one eigenvalue above zero
        // (sigma0 = 1), so the shooting solution crosses once and ends
        // negative: sin(sqrt(2) pi)/sqrt(2).
        let zero = TransversalProfile::zero(1.0, 65);
        let end = kernel_test_shooting(&m, &zero, 2048).unwrap();
        let exact = (std::f64::consts::SQRT_2 * std::f64::consts::PI).sin()
            / std::f64::consts::SQRT_2;
        assert!((end - exact).abs() < 1e-9, "{end} vs {exact}");
        assert!(end < 0.0);
        // Conjugate state: all eigenvalues negative, certificate positive.
        for lambda in [0.25, 1.0, 4.0] {
            let plus = u_plus(&m, lambda).unwrap();
            let end = kernel_test_shooting(&m, &plus, 2048).unwrap();
            let op = assemble_operator(&m, &plus, 257).unwrap();
            let sigma0 = principal_eigenvalue(&op).unwrap().sigma0;
            assert!(sigma0 < 0.0, "lambda = {lambda}: sigma0 = {sigma0}");
            assert!(end > 0.0, "lambda = {lambda}: PhiDot(pi/2) = {end}");
        }
    }

    #[test]
    fn eigenfunction_is_positive_inside_and_zero_at_walls() {
        let m = model();
        for lambda in [0.25, 2.0] {
            let plus = u_plus(&m, lambda).unwrap();
            let op = assemble_operator(&m, &plus, 129).unwrap();
            let res = principal_eigenvalue(&op).unwrap();
            assert_eq!(res.phi[0], 0.0);
            assert_eq!(res.phi[128], 0.0);
            for j in 1..128 {
                assert!(res.phi[j] > 0.0, "phi[{j}] = {}", res.phi[j]);
            }
        }
    }

    #[test]
    fn operator_grid_validation() {
        let m = model();
        let zero = TransversalProfile::zero(0.0, 65);
        assert!(assemble_operator(&m, &zero, 32).is_err());
        assert!(assemble_operator(&m, &zero, 64).is_err());
        assert!(kernel_test_shooting(&m, &zero, 32).is_err());
    }
}
