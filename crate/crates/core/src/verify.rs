//! Executable acceptance sweep.
//!
//! Eleven end-to-end checks gate a build of this workspace. Each one pins a
//! quantitative anchor for a piece of the theory — period-map limits,
//! conjugate-flow uniqueness, flow-force monotonicity, spectral asymptotics,
//! the kernel certificate, small-amplitude front accuracy, flow-force
//! constancy in `x`, the nodal pattern along a continued branch, the gradient
//! bound, and plain grid convergence. Where two independent routes to the
//! same number exist (quadrature vs. shooting, eigenvalue vs. asymptotics,
//! difference quotient vs. load-rate integral) the check compares them rather
//! than trusting either alone.
//!
//! Every criterion returns a [`CriterionReport`]; [`run_all`] executes the
//! suite in order. The integration-test target and the command-line
//! `verify all` both dispatch here so there is exactly one definition of
//! "passing".

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;
use std::time::Instant;

use crate::conjugate::{
    flow_force_1d, flow_force_load_rate, period_map, radius_on_level, solve_c1, u_minus, u_plus,
    TransversalProfile,
};
use crate::continuation::{continue_branch, Branch, ContinuationControls, TerminationTag};
use crate::error::Result;
use crate::front::{
    asymptotic_seed, flow_force_2d, max_principle_check, newton_solve, resample_to, FarFieldBc,
    FrontState, Grid2D,
};
use crate::material::MaterialModel;
use crate::numerics::ode::rk4;
use crate::spectrum::{kernel_test_shooting, sigma0_curve};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    /// One-line verdict, the format both runners print.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:02} {} ({:.2}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

/// The number of acceptance criteria.
pub const N_CRITERIA: usize = 11;

/// Run one criterion by its 1-based id; `None` if the id is out of range.
pub fn criterion(id: usize) -> Option<CriterionReport> {
    let (name, f): (&'static str, fn() -> Result<(bool, String)>) = match id {
        1 => ("period-map-limit", c01_period_limit),
        2 => ("period-map-monotonicity", c02_period_monotone),
        3 => ("conjugate-shooting-oracle", c03_shooting_oracle),
        4 => ("flow-force-structure", c04_flow_force_structure),
        5 => ("spectral-asymptotics", c05_spectral_asymptotics),
        6 => ("kernel-certificate", c06_kernel_certificate),
        7 => ("small-amplitude-front", c07_seed_accuracy),
        8 => ("flow-force-constancy", c08_flow_force_constancy),
        9 => ("branch-nodal-pattern", c09_branch_nodal),
        10 => ("gradient-bound-and-growth", c10_gradient_bound_growth),
        11 => ("grid-convergence", c11_grid_convergence),
        _ => return None,
    };
    let t0 = Instant::now();
    let (pass, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionReport {
        id,
        name,
        pass,
        detail,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

/// Run the whole suite in order.
pub fn run_all() -> Vec<CriterionReport> {
    (1..=N_CRITERIA)
        .map(|id| criterion(id).expect("id in range"))
        .collect()
}

/// The suite's reference material: quadratic stored energy with the linear
/// restoring force.
fn model() -> MaterialModel {
    MaterialModel::linear(1.0)
}

fn c01_period_limit() -> Result<(bool, String)> {
    let m = model();
    let mut worst = 0.0f64;
    for &lambda in &[0.0, 1.0, 3.0] {
        let p = period_map(&m, 1e-8, lambda, 96)?;
        let limit = PI / (1.0 + lambda).sqrt();
        worst = worst.max(((p - limit) / limit).abs());
    }
    Ok((
        worst <= 1e-4,
        format!("P(1e-8, lambda) vs pi/sqrt(1+lambda) for lambda in {{0,1,3}}: worst rel {worst:.2e} (tol 1e-4)"),
    ))
}

fn c02_period_monotone() -> Result<(bool, String)> {
    let m = model();
    let mut prev = f64::NEG_INFINITY;
    let mut min_step = f64::INFINITY;
    let mut ok = true;
    for k in 0..20 {
        let c = 10f64.powf(-6.0 + 7.0 * k as f64 / 19.0);
        let p = period_map(&m, c, 1.0, 96)?;
        if k > 0 {
            min_step = min_step.min(p - prev);
            ok &= p > prev;
        }
        prev = p;
    }
    Ok((
        ok,
        format!("P(c, 1) over 20 log-spaced c in [1e-6, 10]: strictly increasing = {ok}, smallest step {min_step:.3e}"),
    ))
}

/// End-wall displacement of the transversal equilibrium shot from the bottom
/// wall with slope `mu`.
fn shoot_end(m: &MaterialModel, lambda: f64, mu: f64) -> f64 {
    let rhs = |_y: f64, s: &[f64; 2]| {
        let g = m.gradient_coeff(s[1] * s[1]);
        [s[1], m.body_force_unchecked(s[0], lambda).b / g]
    };
    rk4(rhs, [0.0, mu], -FRAC_PI_2, FRAC_PI_2, 2048, |_, _, _| {})[0]
}

/// Independent conjugate-state oracle: scan ten thousand initial slopes for
/// sign changes of the end-wall displacement and bisect the last bracket.
/// The largest root is the single-arch state; smaller roots (present once the
/// load admits multi-arch fits) are sign-changing and not conjugate states.
fn dense_shooting_slope(m: &MaterialModel, lambda: f64) -> Option<f64> {
    let n = 10_000usize;
    let (lo, hi) = (1e-3f64, 8.0f64);
    let mut bracket = None;
    let mut prev_mu = lo;
    let mut prev_f = shoot_end(m, lambda, lo);
    for k in 1..=n {
        let mu = lo + (hi - lo) * k as f64 / n as f64;
        let f = shoot_end(m, lambda, mu);
        if prev_f.signum() != f.signum() {
            bracket = Some((prev_mu, prev_f, mu, f));
        }
        prev_mu = mu;
        prev_f = f;
    }
    let (mut a, mut fa, mut b, _) = bracket?;
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = shoot_end(m, lambda, mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fa.signum() != fm.signum() {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

fn c03_shooting_oracle() -> Result<(bool, String)> {
    let m = model();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for &lambda in &[0.25, 1.0, 4.0] {
        let c1 = solve_c1(&m, lambda, 1e-12)?;
        let v_route = radius_on_level(&m, FRAC_PI_2, c1, lambda)?;
        let Some(v_oracle) = dense_shooting_slope(&m, lambda) else {
            return Ok((false, format!("oracle found no root at lambda = {lambda}")));
        };
        let diff = (v_route - v_oracle).abs();
        worst = worst.max(diff);
        parts.push(format!("lambda={lambda}: |{v_route:.9} - {v_oracle:.9}| = {diff:.2e}"));
    }
    Ok((
        worst <= 1e-6,
        format!("period-map route vs dense shooting (tol 1e-6): {}", parts.join("; ")),
    ))
}

fn c04_flow_force_structure() -> Result<(bool, String)> {
    let m = model();
    let mut max_pair_gap = 0.0f64;
    let mut prev_s = f64::INFINITY;
    let mut decreasing = true;
    let mut nonzero = true;
    let mut worst_rate = 0.0f64;
    for k in 0..10 {
        let lambda = 0.1 + 3.9 * k as f64 / 9.0;
        let up = u_plus(&m, lambda)?;
        let um = u_minus(&m, lambda)?;
        let sp = flow_force_1d(&m, &up)?;
        let sm = flow_force_1d(&m, &um)?;
        max_pair_gap = max_pair_gap.max((sp - sm).abs());
        nonzero &= sp != 0.0;
        decreasing &= sp < prev_s;
        prev_s = sp;
        // Load derivative two ways: difference quotient across the branch of
        // limit states vs the load-rate integral at the state itself.
        let h = 1e-3;
        let s_hi = flow_force_1d(&m, &u_plus(&m, lambda + h)?)?;
        let s_lo = flow_force_1d(&m, &u_plus(&m, lambda - h)?)?;
        let fd = (s_hi - s_lo) / (2.0 * h);
        let rate = flow_force_load_rate(&m, &up)?;
        worst_rate = worst_rate.max(((fd - rate) / rate).abs());
    }
    let pass = max_pair_gap <= 1e-12 && nonzero && decreasing && worst_rate <= 1e-4;
    Ok((
        pass,
        format!(
            "|S(U+)-S(U-)| <= {max_pair_gap:.2e} (tol 1e-12); S nonzero = {nonzero}, strictly \
             decreasing over 10 loads in [0.1, 4] = {decreasing}; dS/dlambda vs load-rate \
             integral worst rel {worst_rate:.2e} (tol 1e-4)"
        ),
    ))
}

fn c05_spectral_asymptotics() -> Result<(bool, String)> {
    let m = model();
    // The trivial-state eigenvalue is exactly 0 in the continuum; its
    // discrete value is the scheme's own bias, subtracted so the ratio
    // isolates the load dependence.
    let curve = sigma0_curve(&m, &[0.0, 0.2, 0.1, 0.05], 513)?;
    let offset = curve[0].1;
    let r: Vec<f64> = curve[1..]
        .iter()
        .map(|&(eps, s)| (s - offset) / (eps * eps))
        .collect();
    let window = r[2] >= -2.3 && r[2] <= -1.7;
    let richardson = (4.0 * r[2] - r[1]) / 3.0;
    let rich_ok = (richardson - (-2.0)).abs() <= 0.05 * 2.0;
    Ok((
        window && rich_ok,
        format!(
            "sigma0(U+(eps^2))/eps^2 = {:.4} at eps=0.05 (window [-2.3, -1.7]); Richardson over \
             eps in {{0.2, 0.1, 0.05}} = {richardson:.5} (within 5% of -2)",
            r[2]
        ),
    ))
}

fn c06_kernel_certificate() -> Result<(bool, String)> {
    let m = model();
    let mut min_pos = f64::INFINITY;
    let mut all_positive = true;
    for k in 1..=10 {
        let lambda = 0.5 * k as f64;
        let profile = u_plus(&m, lambda)?;
        let d = kernel_test_shooting(&m, &profile, 16384)?;
        all_positive &= d > 0.0;
        min_pos = min_pos.min(d);
    }
    let trivial = kernel_test_shooting(&m, &TransversalProfile::zero(0.0, 65), 16384)?;
    let trivial_ok = trivial.abs() <= 1e-8;
    Ok((
        all_positive && trivial_ok,
        format!(
            "shooting certificate at U+(lambda) for 10 loads in (0, 5]: all > 0 = {all_positive} \
             (smallest {min_pos:.3e}); trivial state at zero load: |{trivial:.2e}| <= 1e-8"
        ),
    ))
}

fn c07_seed_accuracy() -> Result<(bool, String)> {
    let m = model();
    let a1 = m.leading_amplitude()?;
    let mut gaps = Vec::new();
    for &eps in &[0.2f64, 0.1, 0.05] {
        let grid = Grid2D::for_load(eps * eps, 65)?;
        let seed = asymptotic_seed(&m, eps, &grid)?;
        let (front, _) = newton_solve(&m, &seed, FarFieldBc::Dirichlet, 1e-10, 30)?;
        let gap = front
            .u
            .iter()
            .zip(&seed.u)
            .fold(0.0f64, |g, (a, b)| g.max((a - b).abs()));
        gaps.push((eps, gap));
    }
    // The leading-order remainder is cubic in the amplitude (odd symmetry
    // kills the quadratic term), and at fixed n_y = 65 the transversal
    // consistency error rides the near-critical mode with gain ~ 1/(2 lambda),
    // adding an h^2/eps floor. No single power of eps fits both regimes, so
    // the check pins the uniform second-order bound, demands genuine decay
    // across the resolved runs, and bounds the defect relative to the leading
    // amplitude.
    let bounded = gaps.iter().all(|&(eps, gap)| gap / (eps * eps) <= 1.0);
    let decays = gaps[1].1 < gaps[0].1;
    let relative = gaps.iter().all(|&(eps, gap)| gap <= 0.06 * a1 * eps);
    let constants: Vec<String> = gaps
        .iter()
        .map(|&(eps, gap)| format!("C({eps}) = {:.3}", gap / (eps * eps)))
        .collect();
    Ok((
        bounded && decays && relative,
        format!(
            "sup|u - a1 eps tanh(eps x / sqrt 2) cos y| / eps^2: {} (each <= 1.0); defect decays \
             from eps=0.2 to 0.1 = {decays}; defect <= 6% of leading amplitude = {relative}",
            constants.join(", ")
        ),
    ))
}

/// Largest deviation of the discrete flow force from its centre-column value.
fn flow_force_spread(m: &MaterialModel, front: &FrontState) -> Result<f64> {
    let g = &front.grid;
    let center = flow_force_2d(m, front, g.i_center())?;
    let mut dev = 0.0f64;
    for i in 0..g.n_x {
        dev = dev.max((flow_force_2d(m, front, i)? - center).abs());
    }
    Ok(dev)
}

fn c08_flow_force_constancy() -> Result<(bool, String)> {
    let m = model();
    let eps = 0.1;
    let grid = Grid2D::for_load(eps * eps, 65)?;
    let seed = asymptotic_seed(&m, eps, &grid)?;
    let (front, _) = newton_solve(&m, &seed, FarFieldBc::Dirichlet, 1e-10, 30)?;
    let dev = flow_force_spread(&m, &front)?;
    let h = grid.h_x.max(grid.h_y);
    let bound = 10.0 * h * h;

    let fine = Grid2D::new(grid.l, 2 * (grid.n_x - 1) + 1, 2 * (grid.n_y - 1) + 1)?;
    let init = resample_to(&front, &fine);
    let (front_fine, _) = newton_solve(&m, &init, FarFieldBc::Dirichlet, 1e-10, 30)?;
    let dev_fine = flow_force_spread(&m, &front_fine)?;
    let ratio = dev / dev_fine;

    Ok((
        dev <= bound && ratio >= 3.0,
        format!(
            "column flow-force spread {dev:.3e} <= 10 h^2 = {bound:.3e}; halving both spacings \
             shrinks it to {dev_fine:.3e} (factor {ratio:.2}, needs >= 3)"
        ),
    ))
}

/// The 40-step branch from the small-amplitude seed shared by criteria 9
/// and 10.
fn branch_from_seed() -> std::result::Result<&'static Branch, String> {
    static BRANCH: OnceLock<std::result::Result<Branch, String>> = OnceLock::new();
    BRANCH
        .get_or_init(|| {
            let m = model();
            let eps = 0.05;
            let grid = Grid2D::for_load(eps * eps, 65).map_err(|e| e.to_string())?;
            let seed = asymptotic_seed(&m, eps, &grid).map_err(|e| e.to_string())?;
            continue_branch(&m, &seed, 0.02, 40, &ContinuationControls::default())
                .map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(Clone::clone)
}

fn c09_branch_nodal() -> Result<(bool, String)> {
    let branch = match branch_from_seed() {
        Ok(b) => b,
        Err(e) => return Ok((false, format!("continuation failed: {e}"))),
    };
    let n = branch.points.len();
    let all_nodal = branch.points.iter().all(|p| p.nodal.pass());
    let all_positive = branch.points.iter().all(|p| p.lambda() > 0.0);
    // A full step budget or a legitimate ceiling stop both count as a
    // complete run; a mid-branch certificate failure does not.
    let complete = n == 41 || (branch.tag == TerminationTag::Blowup && n >= 20);
    let last = branch.points.last().map(|p| p.lambda()).unwrap_or(0.0);
    Ok((
        all_nodal && all_positive && complete,
        format!(
            "{n} accepted points to lambda = {last:.3} ({}), every point passes the strict \
             sign pattern = {all_nodal}",
            branch.tag.as_str()
        ),
    ))
}

fn c10_gradient_bound_growth() -> Result<(bool, String)> {
    let m = model();
    let branch = match branch_from_seed() {
        Ok(b) => b,
        Err(e) => return Ok((false, format!("continuation failed: {e}"))),
    };
    let mut grad_ok = true;
    for p in &branch.points {
        grad_ok &= max_principle_check(&m, &p.front).pass();
    }
    let mut vmax = Vec::new();
    for k in 0..10 {
        let lambda = 0.1 + 3.9 * k as f64 / 9.0;
        let profile = u_plus(&m, lambda)?;
        let v = profile
            .v_values
            .iter()
            .fold(0.0f64, |mx, &x| mx.max(x.abs()));
        vmax.push(v);
    }
    let increasing = vmax.windows(2).all(|w| w[1] > w[0]);
    let doubles = vmax[9] > 2.0 * vmax[0];
    Ok((
        grad_ok && increasing && doubles,
        format!(
            "max|grad u|^2 <= max P at all {} branch points = {grad_ok}; sup|V+| strictly \
             increasing over [0.1, 4] = {increasing}, growth factor {:.2} (needs > 2)",
            branch.points.len(),
            vmax[9] / vmax[0]
        ),
    ))
}

fn c11_grid_convergence() -> Result<(bool, String)> {
    let m = model();
    let eps = 0.1;
    let g0 = Grid2D::for_load(eps * eps, 65)?;
    let g1 = Grid2D::new(g0.l, 2 * (g0.n_x - 1) + 1, 2 * (g0.n_y - 1) + 1)?;
    let g2 = Grid2D::new(g0.l, 2 * (g1.n_x - 1) + 1, 2 * (g1.n_y - 1) + 1)?;
    let seed = asymptotic_seed(&m, eps, &g0)?;
    let (u0, _) = newton_solve(&m, &seed, FarFieldBc::Dirichlet, 1e-11, 30)?;
    let (u1, _) = newton_solve(&m, &resample_to(&u0, &g1), FarFieldBc::Dirichlet, 1e-11, 30)?;
    let (u2, _) = newton_solve(&m, &resample_to(&u1, &g2), FarFieldBc::Dirichlet, 1e-11, 30)?;
    // Max-norm differences at shared nodes (every coarse node is a fine one).
    let diff_shared = |coarse: &FrontState, fine: &FrontState| -> f64 {
        let gc = &coarse.grid;
        let mut d = 0.0f64;
        for i in 0..gc.n_x {
            for j in 0..gc.n_y {
                d = d.max((coarse.at(i, j) - fine.at(2 * i, 2 * j)).abs());
            }
        }
        d
    };
    let d01 = diff_shared(&u0, &u1);
    let d12 = diff_shared(&u1, &u2);
    let ratio = d01 / d12;
    Ok((
        (3.5..=4.5).contains(&ratio),
        format!(
            "|u_h - u_h/2| = {d01:.3e}, |u_h/2 - u_h/4| = {d12:.3e}, ratio {ratio:.2} \
             (window [3.5, 4.5])"
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_ids_cover_the_suite() {
        assert!(criterion(0).is_none());
        assert!(criterion(N_CRITERIA + 1).is_none());
        // The cheap leading criteria run end to end here; the expensive tail
        // is exercised by the acceptance target.
        let r = criterion(1).unwrap();
        assert!(r.pass, "{}", r.line());
        assert!(r.line().starts_with("[PASS] criterion 01"));
        let r = criterion(2).unwrap();
        assert!(r.pass, "{}", r.line());
    }
}
