//! Constitutive data: strain-energy density and live body force.
//!
//! The strain energy is a generalized neo-Hookean polynomial in the gradient
//! invariant `q = |grad u|^2`,
//!
//! ```text
//!   W(q) = q + w1 q^2 (+ optional cubic and quartic terms),
//! ```
//!
//! normalized so `W(0) = 0`, `W'(0) = 1`. The body force `b(kappa, lambda)`
//! is odd in the displacement `kappa`, strictly decreasing and convex on
//! `kappa > 0`, and strengthens without bound in the load `lambda`. Two
//! built-in families:
//!
//! * `Linear`: `b = -(1 + lambda) kappa`, cubic coefficient `b2 = 0`;
//! * `Tanh`: `b = -(1 + lambda) tanh(kappa)`, which saturates at large
//!   displacement and has `b2 = 1/3`.
//!
//! Everything downstream (planar reduction, period map, front solver) only
//! touches the material through this module.

use serde::Serialize;

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Built-in body-force families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BodyForceFamily {
    Linear,
    Tanh,
}

/// Strain energy and its first three derivatives at one invariant value.
#[derive(Debug, Clone, Copy)]
pub struct StrainEval {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Body force, its partials, and the primitive `B(kappa, lambda) =
/// integral of b from 0 to kappa`.
#[derive(Debug, Clone, Copy)]
pub struct BodyForceEval {
    pub b: f64,
    pub b_kappa: f64,
    pub b_lambda: f64,
    pub primitive: f64,
}

#[derive(Debug, Clone)]
pub struct MaterialModel {
    family: BodyForceFamily,
    /// Polynomial coefficients of `W` for `q, q^2, q^3, q^4`; the first is
    /// pinned to 1 by the normalization.
    w_coeffs: Vec<f64>,
}

impl MaterialModel {
    /// `W(q) = q + w1 q^2` with the linear body-force family.
    pub fn linear(w1: f64) -> Self {
        MaterialModel {
            family: BodyForceFamily::Linear,
            w_coeffs: vec![1.0, w1],
        }
    }

    /// `W(q) = q + w1 q^2` with the saturating body-force family.
    pub fn tanh(w1: f64) -> Self {
        MaterialModel {
            family: BodyForceFamily::Tanh,
            w_coeffs: vec![1.0, w1],
        }
    }

    /// General constructor: full coefficient list for `W`, degree at most 4
    /// in `q`, leading (linear-in-`q`) coefficient exactly 1.
    pub fn new(family: BodyForceFamily, w_coeffs: Vec<f64>) -> Result<Self> {
        if w_coeffs.is_empty() || w_coeffs.len() > 4 {
            return Err(Error::InvalidInput(format!(
                "strain energy takes 1..=4 coefficients, got {}",
                w_coeffs.len()
            )));
        }
        if w_coeffs[0] != 1.0 {
            return Err(Error::InvalidInput(
                "normalization requires W'(0) = 1, so the first coefficient must be 1".into(),
            ));
        }
        if w_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite strain coefficient".into()));
        }
        Ok(MaterialModel { family, w_coeffs })
    }

    pub fn family(&self) -> BodyForceFamily {
        self.family
    }

    pub fn w_coeffs(&self) -> &[f64] {
        &self.w_coeffs
    }

    /// Quadratic strain coefficient `w1`.
    pub fn w1(&self) -> f64 {
        self.w_coeffs.get(1).copied().unwrap_or(0.0)
    }

    /// Cubic coefficient of the body force's Taylor expansion in `kappa`.
    pub fn b2(&self) -> f64 {
        match self.family {
            BodyForceFamily::Linear => 0.0,
            BodyForceFamily::Tanh => 1.0 / 3.0,
        }
    }

    /// `W` and derivatives at invariant `q >= 0`.
    pub fn eval_strain(&self, q: f64) -> Result<StrainEval> {
        if !(q >= 0.0) {
            return Err(Error::Domain(format!("strain invariant q = {q} < 0")));
        }
        Ok(self.strain_unchecked(q))
    }

    #[inline]
    pub(crate) fn strain_unchecked(&self, q: f64) -> StrainEval {
        let c = &self.w_coeffs;
        let mut value = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let mut d3 = 0.0;
        // Horner on W(q) = q (c0 + c1 q + c2 q^2 + c3 q^3) and its derivatives.
        for (k, &ck) in c.iter().enumerate().rev() {
            let p = (k + 1) as f64;
            value = value * q + ck;
            d1 = d1 * q + p * ck;
            if k >= 1 {
                d2 = d2 * q + p * (p - 1.0) * ck;
            }
            if k >= 2 {
                d3 = d3 * q + p * (p - 1.0) * (p - 2.0) * ck;
            }
        }
        StrainEval {
            value: value * q,
            d1,
            d2,
            d3,
        }
    }

    /// The gradient coefficient `W'(q) + 2 q W''(q)` that multiplies the
    /// normal second derivative in the quasilinear operator; must stay
    /// positive for ellipticity.
    #[inline]
    pub fn gradient_coeff(&self, q: f64) -> f64 {
        let s = self.strain_unchecked(q);
        s.d1 + 2.0 * q * s.d2
    }

    /// Enhanced ellipticity combination `3 W''(q) + 2 q W'''(q)`.
    #[inline]
    pub fn enhanced_coeff(&self, q: f64) -> f64 {
        let s = self.strain_unchecked(q);
        3.0 * s.d2 + 2.0 * q * s.d3
    }

    /// Body force and partials at displacement `kappa`, load `lambda >= 0`.
    /// Oddness in `kappa` and evenness of the primitive are exact in floating
    /// point: evaluation goes through `|kappa|`.
    pub fn eval_body_force(&self, kappa: f64, lambda: f64) -> Result<BodyForceEval> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("load lambda = {lambda} < 0")));
        }
        Ok(self.body_force_unchecked(kappa, lambda))
    }

    #[inline]
    pub(crate) fn body_force_unchecked(&self, kappa: f64, lambda: f64) -> BodyForceEval {
        let load = 1.0 + lambda;
        let mag = kappa.abs();
        let sign = if kappa < 0.0 { -1.0 } else { 1.0 };
        match self.family {
            BodyForceFamily::Linear => BodyForceEval {
                b: -load * kappa,
                b_kappa: -load,
                b_lambda: -kappa,
                primitive: -load * 0.5 * kappa * kappa,
            },
            BodyForceFamily::Tanh => {
                let t = mag.tanh();
                BodyForceEval {
                    b: -load * sign * t,
                    b_kappa: -load * sech_sq(mag),
                    b_lambda: -sign * t,
                    primitive: -load * ln_cosh(mag),
                }
            }
        }
    }

    /// `b(kappa, lambda) / kappa`, continued analytically through
    /// `kappa = 0` where it equals `b_kappa(0, lambda) = -(1 + lambda)`.
    #[inline]
    pub fn body_force_ratio(&self, kappa: f64, lambda: f64) -> f64 {
        if kappa.abs() < 1e-8 {
            return -(1.0 + lambda);
        }
        self.body_force_unchecked(kappa, lambda).b / kappa
    }

    /// The quantity `P = 2 q W'(q) - W(q) - 2 B(kappa, lambda)` whose
    /// far-field maximum bounds `|grad u|^2` for monotone fronts.
    pub fn coercivity_potential(&self, kappa: f64, q: f64, lambda: f64) -> f64 {
        let s = self.strain_unchecked(q);
        let bf = self.body_force_unchecked(kappa, lambda);
        2.0 * q * s.d1 - s.value - 2.0 * bf.primitive
    }

    /// Amplitude of the leading-order front profile at onset,
    /// `a1 = 2 / sqrt(3 (b2 + 2 w1))`.
    pub fn leading_amplitude(&self) -> Result<f64> {
        let denom = 3.0 * (self.b2() + 2.0 * self.w1());
        if denom <= 0.0 {
            return Err(Error::Domain(format!(
                "b2 + 2 w1 = {} must be positive for a front to bifurcate",
                self.b2() + 2.0 * self.w1()
            )));
        }
        Ok(2.0 / denom.sqrt())
    }

    /// Sampled verification of every structural condition the solver relies
    /// on, over `q in (0, q_max]`, `kappa in (0, kappa_max]`,
    /// `lambda in (0, lambda_max]` with `n` samples per axis.
    pub fn check_structural_conditions(
        &self,
        q_max: f64,
        kappa_max: f64,
        lambda_max: f64,
        n: usize,
    ) -> ConditionReport {
        let n = n.max(8);
        let qs: Vec<f64> = (1..=n).map(|i| q_max * i as f64 / n as f64).collect();
        let ks: Vec<f64> = (1..=n).map(|i| kappa_max * i as f64 / n as f64).collect();
        let ls: Vec<f64> = (1..=n).map(|i| lambda_max * i as f64 / n as f64).collect();
        let mut checks = Vec::new();

        // b(-kappa) + b(kappa) must vanish identically.
        let mut odd_residual = 0.0f64;
        for &k in &ks {
            for &l in &ls {
                let plus = self.body_force_unchecked(k, l).b;
                let minus = self.body_force_unchecked(-k, l).b;
                odd_residual = odd_residual.max((plus + minus).abs());
            }
        }
        checks.push(ConditionCheck::residual(
            "body_force_odd",
            odd_residual,
            1e-13 * (1.0 + lambda_max),
            "max |b(-k) + b(k)|",
        ));

        // Ellipticity chain: W' > 0, W' + 2qW'' > 0, 3W'' + 2qW''' > 0.
        let mut wp_min = f64::INFINITY;
        let mut grad_min = f64::INFINITY;
        let mut enh_min = f64::INFINITY;
        for &q in &qs {
            let s = self.strain_unchecked(q);
            wp_min = wp_min.min(s.d1);
            grad_min = grad_min.min(self.gradient_coeff(q));
            enh_min = enh_min.min(self.enhanced_coeff(q));
        }
        checks.push(ConditionCheck::positive(
            "ellipticity_w_prime",
            wp_min,
            "min W'(q)",
        ));
        checks.push(ConditionCheck::positive(
            "ellipticity_gradient",
            grad_min,
            "min W'(q) + 2q W''(q)",
        ));
        checks.push(ConditionCheck::positive(
            "ellipticity_enhanced",
            enh_min,
            "min 3W''(q) + 2q W'''(q)",
        ));

        // 2qW' - W > q, the integrated form used by the gradient bound.
        let mut integ_min = f64::INFINITY;
        for &q in &qs {
            let s = self.strain_unchecked(q);
            integ_min = integ_min.min(2.0 * q * s.d1 - s.value - q);
        }
        checks.push(ConditionCheck::positive(
            "integrated_ellipticity",
            integ_min,
            "min 2q W'(q) - W(q) - q",
        ));

        // b strictly decreasing and convex in kappa on (0, kappa_max].
        let mut slope_max = f64::NEG_INFINITY;
        let mut convex_min = f64::INFINITY;
        for &l in &ls {
            for w in ks.windows(2) {
                let b0 = self.body_force_unchecked(w[0], l);
                let b1 = self.body_force_unchecked(w[1], l);
                slope_max = slope_max.max(b0.b_kappa).max(b1.b_kappa);
                // convexity via the derivative being nondecreasing
                convex_min = convex_min.min(b1.b_kappa - b0.b_kappa);
            }
        }
        checks.push(ConditionCheck::positive(
            "body_force_decreasing",
            -slope_max,
            "min -b_kappa over kappa > 0",
        ));
        checks.push(ConditionCheck {
            name: "body_force_convex".into(),
            passed: convex_min >= -1e-12 * (1.0 + lambda_max),
            margin: convex_min,
            detail: "min increment of b_kappa along kappa (>= 0 up to roundoff)".into(),
        });

        // Strictly stronger with load, without bound.
        let mut load_slope_max = f64::NEG_INFINITY;
        for &k in &ks {
            load_slope_max = load_slope_max.max(self.body_force_unchecked(k, ls[0]).b_lambda);
        }
        let growth = ks
            .iter()
            .map(|&k| {
                let half = self.body_force_unchecked(k, 0.5 * lambda_max).b.abs();
                let full = self.body_force_unchecked(k, lambda_max).b.abs();
                full - half
            })
            .fold(f64::INFINITY, f64::min);
        checks.push(ConditionCheck::positive(
            "body_force_load_decreasing",
            -load_slope_max,
            "min -b_lambda over kappa > 0",
        ));
        checks.push(ConditionCheck::positive(
            "body_force_load_unbounded",
            growth,
            "growth of |b| from lambda_max/2 to lambda_max",
        ));

        // b_kappa(0, lambda) < -1 for lambda > 0.
        let origin_margin = ls
            .iter()
            .map(|&l| -self.body_force_unchecked(0.0, l).b_kappa - 1.0)
            .fold(f64::INFINITY, f64::min);
        checks.push(ConditionCheck::positive(
            "origin_slope_supercritical",
            origin_margin,
            "min -b_kappa(0, lambda) - 1 over lambda > 0",
        ));

        // Cubic balance that sets the bifurcation amplitude.
        checks.push(ConditionCheck::positive(
            "cubic_coefficient",
            self.b2() + 2.0 * self.w1(),
            "b2 + 2 w1",
        ));

        ConditionReport { checks }
    }
}

/// Numerically stable `ln(cosh(x))` for `x >= 0`.
fn ln_cosh(x: f64) -> f64 {
    if x > 20.0 {
        x - LN_2 + (-2.0 * x).exp().ln_1p()
    } else {
        x.cosh().ln()
    }
}

/// Numerically stable `sech(x)^2` for `x >= 0`.
fn sech_sq(x: f64) -> f64 {
    if x > 20.0 {
        let e = (-x).exp();
        let s = 2.0 * e / (1.0 + e * e);
        s * s
    } else {
        let c = x.cosh();
        1.0 / (c * c)
    }
}

/// One structural condition with its worst sampled margin.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Extremal value of the tested quantity; positive means satisfied with
    /// room for the inequality checks.
    pub margin: f64,
    pub detail: String,
}

impl ConditionCheck {
    fn positive(name: &str, margin: f64, detail: &str) -> Self {
        ConditionCheck {
            name: name.into(),
            passed: margin > 0.0,
            margin,
            detail: detail.into(),
        }
    }

    fn residual(name: &str, residual: f64, tol: f64, detail: &str) -> Self {
        ConditionCheck {
            name: name.into(),
            passed: residual <= tol,
            margin: tol - residual,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}
