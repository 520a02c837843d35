//! Transversal (one-dimensional) equilibria and the conjugate-flow structure
//! that selects a front's far-field states.
//!
//! A `y`-dependent state `U` on `(-pi/2, pi/2)` satisfies the planar system
//!
//! ```text
//!   U' = V,     V' = b(U, lambda) / (W'(V^2) + 2 V^2 W''(V^2)),
//! ```
//!
//! which conserves
//!
//! ```text
//!   H(U, V) = W'(V^2) V^2 - W(V^2)/2 - B(U, lambda) >= 0.
//! ```
//!
//! Orbits on the level `H = c` crossing `U = 0` with slope `V0(c)` return to
//! `U = 0` after a `y`-distance `P(c, lambda)` (the period map, written in
//! polar coordinates so the `c -> 0` limit is manifest). The nontrivial state
//! `U+` vanishing at both walls and positive inside exists exactly when
//! `P(c, lambda) = pi` has a root `c1(lambda)`; `U- = -U+`. The flow force
//!
//! ```text
//!   S(U) = integral of ( W(U'^2)/2 + B(U, lambda) ) dy
//! ```
//!
//! is equal on `U+` and `U-` (they are conjugate) and strictly decreasing in
//! the load.

use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::numerics::ode::rk4;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::roots::{bisect, newton_bisect};
use crate::numerics::simpson;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
const PI: f64 = std::f64::consts::PI;

/// Default fine resolution for profile integration; grid-matched profiles
/// are integrated at a multiple of the target node count at least this fine.
const PROFILE_STEPS: usize = 2048;

/// A transversal state sampled on a uniform `y`-grid spanning the strip.
#[derive(Debug, Clone)]
pub struct TransversalProfile {
    pub lambda: f64,
    /// Conserved level of the planar system along the orbit.
    pub c: f64,
    pub y_grid: Vec<f64>,
    pub u_values: Vec<f64>,
    pub v_values: Vec<f64>,
}

impl TransversalProfile {
    /// Rest state `U = 0` on `n_nodes` points.
    pub fn zero(lambda: f64, n_nodes: usize) -> Self {
        let y_grid = (0..n_nodes)
            .map(|j| -HALF_PI + PI * j as f64 / (n_nodes - 1) as f64)
            .collect();
        TransversalProfile {
            lambda,
            c: 0.0,
            y_grid,
            u_values: vec![0.0; n_nodes],
            v_values: vec![0.0; n_nodes],
        }
    }

    pub fn len(&self) -> usize {
        self.y_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_grid.is_empty()
    }

    /// Pointwise negation; conjugate to `self` by the oddness of `b`.
    pub fn negated(&self) -> Self {
        TransversalProfile {
            lambda: self.lambda,
            c: self.c,
            y_grid: self.y_grid.clone(),
            u_values: self.u_values.iter().map(|u| -u).collect(),
            v_values: self.v_values.iter().map(|v| -v).collect(),
        }
    }

    /// Value at the centerline `y = 0`.
    pub fn u_at_center(&self) -> f64 {
        self.u_values[self.len() / 2]
    }

    /// Sup norm of the slope; attained at the walls where `B = 0`.
    pub fn v_max(&self) -> f64 {
        self.v_values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Conserved quantity of the planar system.
pub fn hamiltonian(model: &MaterialModel, u: f64, v: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("load lambda = {lambda} < 0")));
    }
    Ok(hamiltonian_unchecked(model, u, v, lambda))
}

#[inline]
fn hamiltonian_unchecked(model: &MaterialModel, u: f64, v: f64, lambda: f64) -> f64 {
    let q = v * v;
    let s = model.strain_unchecked(q);
    let b = model.body_force_unchecked(u, lambda);
    s.d1 * q - 0.5 * s.value - b.primitive
}

/// Radius `r > 0` with `H(r cos(theta), r sin(theta), lambda) = c` for
/// `theta in [0, pi/2]` and level `c > 0`. `H` is strictly increasing along
/// rays into the first quadrant, so the radius is unique.
pub fn radius_on_level(model: &MaterialModel, theta: f64, c: f64, lambda: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("level c = {c} must be positive")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("load lambda = {lambda} < 0")));
    }
    let (sin_t, cos_t) = theta.sin_cos();
    let g = |r: f64| -> (f64, f64) {
        let u = r * cos_t;
        let v = r * sin_t;
        let q = v * v;
        let s = model.strain_unchecked(q);
        let b = model.body_force_unchecked(u, lambda);
        let val = s.d1 * q - 0.5 * s.value - b.primitive - c;
        // d/dr H(r cos, r sin) = r sin^2 (W' + 2qW'') - b cos
        let deriv = r * sin_t * sin_t * (s.d1 + 2.0 * q * s.d2) - b.b * cos_t;
        (val, deriv)
    };
    let mut hi = 1.0;
    let mut doublings = 0;
    while g(hi).0 < 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Divergence(format!(
                "radius bracket for level c = {c} ran past r = {hi}"
            )));
        }
    }
    let ftol = 1e-13 * c.max(1.0);
    newton_bisect(g, 0.0, hi, 1e-16 * hi, ftol)
}

/// Small-amplitude period limit `pi / sqrt(-b_kappa(0, lambda))`.
pub fn period_limit(model: &MaterialModel, lambda: f64) -> Result<f64> {
    let slope = model.eval_body_force(0.0, lambda)?.b_kappa;
    if slope >= 0.0 {
        return Err(Error::Domain(
            "body force must be restoring at the origin".into(),
        ));
    }
    Ok(PI / (-slope).sqrt())
}

/// Return `y`-distance between the two `U = 0` crossings of the orbit on
/// level `c > 0`, by Gauss-Legendre quadrature in the polar angle:
///
/// ```text
///   P(c, lambda) = 2 * integral over (0, pi/2) of
///       f / ( f sin^2(theta) - (b(kappa)/kappa) cos^2(theta) ) dtheta,
/// ```
///
/// with `kappa = r cos(theta)`, `q = r^2 sin^2(theta)` and
/// `f = W'(q) + 2 q W''(q)` evaluated on the level radius. Writing the body
/// force through `b/kappa` keeps the integrand finite as `c -> 0`.
pub fn period_map(model: &MaterialModel, c: f64, lambda: f64, n_quad: usize) -> Result<f64> {
    if n_quad < 8 {
        return Err(Error::InvalidInput(format!(
            "period quadrature needs at least 8 nodes, got {n_quad}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("level c = {c} must be positive")));
    }
    let gl = GaussLegendre::new(n_quad, 0.0, HALF_PI);
    let mut total = 0.0;
    for (&theta, &w) in gl.nodes.iter().zip(&gl.weights) {
        let r = radius_on_level(model, theta, c, lambda)?;
        let (sin_t, cos_t) = theta.sin_cos();
        let q = (r * sin_t) * (r * sin_t);
        let f = model.gradient_coeff(q);
        if f <= 0.0 {
            return Err(Error::Ellipticity(format!(
                "gradient coefficient {f} <= 0 at q = {q}"
            )));
        }
        let ratio = model.body_force_ratio(r * cos_t, lambda);
        let denom = f * sin_t * sin_t - ratio * cos_t * cos_t;
        if denom <= 0.0 {
            return Err(Error::Ellipticity(format!(
                "period integrand denominator {denom} <= 0 at theta = {theta}"
            )));
        }
        total += w * f / denom;
    }
    Ok(2.0 * total)
}

/// Level `c1(lambda)` at which the period equals the strip width `pi`,
/// i.e. the level carrying the nontrivial transversal states. Monotonicity
/// of the period map in `c` makes bisection (in `log c`) reliable.
pub fn solve_c1(model: &MaterialModel, lambda: f64, tol: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(
            "nontrivial conjugate states require lambda > 0".into(),
        ));
    }
    let n_quad = 64;
    let p = |c: f64| period_map(model, c, lambda, n_quad);
    let mut lo = 1e-6;
    // The period increases from pi/sqrt(1+lambda) < pi; make sure the lower
    // end really sits below the target (tiny loads need tiny levels).
    let mut guard = 0;
    while p(lo)? >= PI {
        lo *= 0.5;
        guard += 1;
        if guard > 900 {
            return Err(Error::Divergence(format!(
                "period stays above pi down to c = {lo} at lambda = {lambda}"
            )));
        }
    }
    let mut hi = lo;
    guard = 0;
    while p(hi)? <= PI {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Divergence(format!(
                "period never reaches pi up to c = {hi} at lambda = {lambda}"
            )));
        }
    }
    let x = bisect(
        |x: f64| p(x.exp()).map(|v| v - PI).unwrap_or(f64::NAN),
        lo.ln(),
        hi.ln(),
        1e-15,
        tol,
        300,
    )?;
    let c1 = x.exp();
    let achieved = (p(c1)? - PI).abs();
    if achieved > tol.max(1e-12) {
        return Err(Error::NonConvergence(format!(
            "period residual {achieved} above tolerance {tol} at c1 = {c1}"
        )));
    }
    Ok(c1)
}

/// Integrate the planar system across the strip from `(0, V0(c))` at the
/// bottom wall, sampling every step. Postconditions enforce that the orbit
/// really is the wall-to-wall connection: `|U(pi/2)| <= 1e-8` and the
/// Hamiltonian drifts no more than `1e-10 * max(1, c)`.
pub fn integrate_profile(
    model: &MaterialModel,
    c: f64,
    lambda: f64,
    n_steps: usize,
) -> Result<TransversalProfile> {
    if n_steps < 64 || n_steps % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "profile integration needs an even step count >= 64, got {n_steps}"
        )));
    }
    if !(c >= 0.0) {
        return Err(Error::Domain(format!("level c = {c} must be nonnegative")));
    }
    if c == 0.0 {
        return Ok(TransversalProfile::zero(lambda, n_steps + 1));
    }
    let v0 = radius_on_level(model, HALF_PI, c, lambda)?;
    // |V| <= V0 along the orbit, so ellipticity on [0, V0^2] suffices.
    for i in 0..=32 {
        let q = v0 * v0 * i as f64 / 32.0;
        if model.gradient_coeff(q) <= 0.0 {
            return Err(Error::Ellipticity(format!(
                "gradient coefficient nonpositive at q = {q}"
            )));
        }
    }
    let n = n_steps + 1;
    let mut y_grid = vec![0.0; n];
    let mut u_values = vec![0.0; n];
    let mut v_values = vec![0.0; n];
    let rhs = |_y: f64, s: &[f64; 2]| {
        let q = s[1] * s[1];
        let f = model.gradient_coeff(q);
        [s[1], model.body_force_unchecked(s[0], lambda).b / f]
    };
    rk4(rhs, [0.0, v0], -HALF_PI, HALF_PI, n_steps, |j, y, s| {
        y_grid[j] = y;
        u_values[j] = s[0];
        v_values[j] = s[1];
    });
    let end = u_values[n - 1].abs();
    if end > 1e-8 {
        return Err(Error::StepCount(format!(
            "endpoint residual |U(pi/2)| = {end:.3e}; raise n_steps or loosen the level"
        )));
    }
    let mut drift = 0.0f64;
    for j in 0..n {
        let h = hamiltonian_unchecked(model, u_values[j], v_values[j], lambda);
        drift = drift.max((h - c).abs());
    }
    if drift > 1e-10 * c.max(1.0) {
        return Err(Error::StepCount(format!(
            "Hamiltonian drift {drift:.3e} exceeds tolerance; raise n_steps"
        )));
    }
    Ok(TransversalProfile {
        lambda,
        c,
        y_grid,
        u_values,
        v_values,
    })
}

/// The positive conjugate state `U+(lambda)` at default resolution, doubling
/// the step count until the orbit meets the endpoint and drift guards (steep
/// orbits at large loads need more than the default).
pub fn u_plus(model: &MaterialModel, lambda: f64) -> Result<TransversalProfile> {
    let c1 = solve_c1(model, lambda, 1e-11)?;
    let mut n_steps = PROFILE_STEPS;
    loop {
        match integrate_profile(model, c1, lambda, n_steps) {
            Err(Error::StepCount(_)) if n_steps < 65536 => n_steps *= 2,
            other => return other,
        }
    }
}

/// The negative conjugate state `U-(lambda) = -U+(lambda)`.
pub fn u_minus(model: &MaterialModel, lambda: f64) -> Result<TransversalProfile> {
    Ok(u_plus(model, lambda)?.negated())
}

/// `U+(lambda)` sampled exactly on a uniform grid with `n_nodes` points
/// (odd, so the centerline is a node): integrate at a fine multiple of the
/// grid and decimate. `lambda = 0` yields the rest state.
pub fn profile_on_grid(model: &MaterialModel, lambda: f64, n_nodes: usize) -> Result<TransversalProfile> {
    if n_nodes < 5 || n_nodes % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "profile grid wants an odd node count >= 5, got {n_nodes}"
        )));
    }
    if lambda == 0.0 {
        return Ok(TransversalProfile::zero(0.0, n_nodes));
    }
    let c1 = solve_c1(model, lambda, 1e-11)?;
    resample_level(model, c1, lambda, n_nodes)
}

/// Integrate the orbit on level `c` and hand back exactly `n_nodes` samples.
pub fn resample_level(
    model: &MaterialModel,
    c: f64,
    lambda: f64,
    n_nodes: usize,
) -> Result<TransversalProfile> {
    if n_nodes < 5 || n_nodes % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "profile grid wants an odd node count >= 5, got {n_nodes}"
        )));
    }
    if c == 0.0 {
        return Ok(TransversalProfile::zero(lambda, n_nodes));
    }
    let intervals = n_nodes - 1;
    let k = PROFILE_STEPS.div_ceil(intervals);
    let fine = integrate_profile(model, c, lambda, k * intervals)?;
    let mut y_grid = Vec::with_capacity(n_nodes);
    let mut u_values = Vec::with_capacity(n_nodes);
    let mut v_values = Vec::with_capacity(n_nodes);
    for j in 0..n_nodes {
        let idx = j * k;
        y_grid.push(fine.y_grid[idx]);
        u_values.push(fine.u_values[idx]);
        v_values.push(fine.v_values[idx]);
    }
    Ok(TransversalProfile {
        lambda,
        c,
        y_grid,
        u_values,
        v_values,
    })
}

/// Flow force of a transversal state: for `x`-independent `u`,
/// `S = integral of ( W(U'^2)/2 + B(U, lambda) ) dy` by composite Simpson.
pub fn flow_force_1d(model: &MaterialModel, profile: &TransversalProfile) -> Result<f64> {
    let n = profile.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "flow force needs an odd sample count >= 3, got {n}"
        )));
    }
    let h = profile.y_grid[1] - profile.y_grid[0];
    let vals: Vec<f64> = (0..n)
        .map(|j| {
            let q = profile.v_values[j] * profile.v_values[j];
            let s = model.strain_unchecked(q);
            let b = model.body_force_unchecked(profile.u_values[j], profile.lambda);
            0.5 * s.value + b.primitive
        })
        .collect();
    Ok(simpson(&vals, h))
}

/// `d/dlambda` of the flow force along `U+`, through the explicit load
/// dependence only: `integral of B_lambda(U, lambda) dy`. Matches the full
/// derivative because the profile term drops out on solutions.
pub fn flow_force_load_rate(model: &MaterialModel, profile: &TransversalProfile) -> Result<f64> {
    let n = profile.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "flow force rate needs an odd sample count >= 3, got {n}"
        )));
    }
    let h = profile.y_grid[1] - profile.y_grid[0];
    // B = -(1+lambda) G(kappa) for both families, so B_lambda = B/(1+lambda).
    let vals: Vec<f64> = (0..n)
        .map(|j| {
            let b = model.body_force_unchecked(profile.u_values[j], profile.lambda);
            b.primitive / (1.0 + profile.lambda)
        })
        .collect();
    Ok(simpson(&vals, h))
}

/// Largest deviation of a sampled profile from being an orbit of the planar
/// system on its stored level: wall values plus Hamiltonian drift, scale-free.
pub fn profile_residual(model: &MaterialModel, profile: &TransversalProfile) -> f64 {
    let n = profile.len();
    let scale = profile.c.abs().max(1.0);
    let mut r = profile.u_values[0].abs().max(profile.u_values[n - 1].abs());
    for j in 0..n {
        let h = hamiltonian_unchecked(model, profile.u_values[j], profile.v_values[j], profile.lambda);
        r = r.max((h - profile.c).abs() / scale);
    }
    r
}

/// Two states are conjugate when both solve the transversal problem and
/// carry the same flow force.
pub fn check_conjugate(
    model: &MaterialModel,
    p1: &TransversalProfile,
    p2: &TransversalProfile,
    tol: f64,
) -> Result<bool> {
    let r1 = profile_residual(model, p1);
    let r2 = profile_residual(model, p2);
    let s1 = flow_force_1d(model, p1)?;
    let s2 = flow_force_1d(model, p2)?;
    Ok(r1 <= tol && r2 <= tol && (s1 - s2).abs() <= tol)
}
