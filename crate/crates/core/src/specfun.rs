//! Gamma-family helpers and the three-parameter Mittag-Leffler function
//!
//! ```text
//! E^g_{a,b}(x) = 1/Gamma(g) * sum_{j>=0} Gamma(j+g) x^j / (j! Gamma(j a + b))
//! ```
//!
//! The power series is summed in log-space with a running estimate of the
//! rounding error it accumulates. When cancellation makes the series unable
//! to meet the requested absolute tolerance (large negative arguments), and
//! `a <= 1`, the value is obtained instead by inverting its Laplace transform
//! `s^(a g - b) / (s^a - x)^g` with the trapezoidal rule on a parabolic
//! Hankel contour. Anything else is reported as [`Error::NonConvergence`].

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::sum::CompensatedSum;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_TERMS: usize = 10_000;

/// Arguments of `E^gamma_{alpha,beta}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlArgs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub x: f64,
}

impl MlArgs {
    pub fn new(alpha: f64, beta: f64, gamma: f64, x: f64) -> Result<Self> {
        let args = Self {
            alpha,
            beta,
            gamma,
            x,
        };
        args.validate()?;
        Ok(args)
    }

    /// Two-parameter function `E_{alpha,beta}(x)`.
    pub fn two_param(alpha: f64, beta: f64, x: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, x)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("Mittag-Leffler parameter {name} must be positive and finite, got {v}"));
            }
        }
        if !self.x.is_finite() {
            return domain(format!("Mittag-Leffler argument must be finite, got {}", self.x));
        }
        Ok(())
    }
}

pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("log_gamma requires a positive finite argument, got {x}"));
    }
    Ok(libm::lgamma(x))
}

pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("gamma requires a positive finite argument, got {x}"));
    }
    Ok(libm::tgamma(x))
}

pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// `ln C(a + j - 1, j)` for real `a > 0`, i.e. the log of the generalized
/// binomial coefficient appearing in negative-binomial weights.
pub(crate) fn ln_rising_binomial(a: f64, j: usize) -> f64 {
    let j = j as f64;
    libm::lgamma(a + j) - libm::lgamma(j + 1.0) - libm::lgamma(a)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `E^gamma_{alpha,beta}(x)` with absolute error at most `tol`.
pub fn ml3(args: &MlArgs, tol: f64) -> Result<f64> {
    ml3_scaled(args, 0.0, tol)
}

/// `exp(log_scale) * E^gamma_{alpha,beta}(x)` with absolute error at most
/// `tol` on the scaled value. Used wherever the function is multiplied by
/// a large or tiny prefactor (e.g. `(L t^b)^k E^{k+1}_{b,kb+1}(-L t^b)`).
pub fn ml3_scaled(args: &MlArgs, log_scale: f64, tol: f64) -> Result<f64> {
    args.validate()?;
    if !(tol > 0.0 && tol <= 1e-6) {
        return domain(format!("Mittag-Leffler tolerance must lie in (0, 1e-6], got {tol}"));
    }
    if !log_scale.is_finite() {
        return domain("Mittag-Leffler log-scale must be finite");
    }
    match series(args, log_scale, tol) {
        Ok(v) => Ok(v),
        Err(estimate) if args.x < 0.0 && args.alpha <= 1.0 => contour(args, log_scale, tol, estimate),
        Err(estimate) => Err(non_convergence(args, estimate)),
    }
}

fn non_convergence(args: &MlArgs, estimate: f64) -> Error {
    Error::NonConvergence {
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        x: args.x,
        estimate,
    }
}

/// Power series; `Err` carries the error estimate when `tol` is not met.
fn series(args: &MlArgs, log_scale: f64, tol: f64) -> std::result::Result<f64, f64> {
    let MlArgs {
        alpha,
        beta,
        gamma,
        x,
    } = *args;
    let lg_gamma = libm::lgamma(gamma);
    if x == 0.0 {
        return Ok((log_scale - libm::lgamma(beta)).exp());
    }
    let ln_abs_x = x.abs().ln();
    let mut acc = CompensatedSum::new();
    let mut rounding = 0.0;
    for j in 0..MAX_TERMS {
        let jf = j as f64;
        let a = libm::lgamma(jf + gamma);
        let b = libm::lgamma(jf + 1.0);
        let c = libm::lgamma(jf * alpha + beta);
        let d = jf * ln_abs_x;
        let ln_mag = log_scale + a - b - lg_gamma - c + d;
        let mag = ln_mag.exp();
        let term = if x < 0.0 && j % 2 == 1 { -mag } else { mag };
        acc.add(term);
        // lgamma values carry an error proportional to their magnitude;
        // exp() turns it into a relative error of the term.
        rounding += mag
            * f64::EPSILON
            * (4.0 + a.abs() + b.abs() + lg_gamma.abs() + c.abs() + d.abs() + log_scale.abs());

        // For j >= J every later term ratio is bounded by
        // |x| max(1, (J+g)/(J+1)) Gamma(J a + b) / Gamma(J a + a + b),
        // since Gamma(z)/Gamma(z + a) decreases in z.
        let growth = ((jf + gamma) / (jf + 1.0)).max(1.0);
        let ratio = (ln_abs_x + growth.ln() + c - libm::lgamma(jf * alpha + alpha + beta)).exp();
        if ratio < 1.0 {
            let tail = mag * ratio / (1.0 - ratio);
            if tail <= 1e-2 * tol {
                let estimate = rounding + tail;
                return if estimate <= tol {
                    Ok(acc.value())
                } else {
                    Err(estimate)
                };
            }
        }
        if !mag.is_finite() {
            return Err(f64::INFINITY);
        }
    }
    Err(f64::INFINITY)
}

/// Trapezoidal rule on `s(u) = mu (1 + i u)^2` for the Bromwich integral of
/// `e^s s^(a g - b) / (s^a - x)^g` (value of `t^(b-1) E(x t^a)` at t = 1).
/// Valid for `x < 0`, `a <= 1`: every singularity then lies on the closed
/// negative real axis, which the parabola encloses.
fn contour_sum(args: &MlArgs, log_scale: f64, nodes: usize) -> f64 {
    let n = nodes as f64;
    let h = 3.0 / n;
    let mu = std::f64::consts::PI * n / 24.0;
    let expo = args.alpha * args.gamma - args.beta;
    let mut acc = CompensatedSum::new();
    for k in 0..=nodes {
        let u = k as f64 * h;
        let w = Complex64::new(1.0, u);
        let s = mu * w * w;
        let ln_s = s.ln();
        let s_alpha = (args.alpha * ln_s).exp();
        let ln_f = expo * ln_s - args.gamma * (s_alpha - args.x).ln();
        let val = (s + ln_f + log_scale).exp() * w;
        let weight = if k == 0 { 1.0 } else { 2.0 };
        acc.add(weight * val.re);
    }
    acc.value() * h * mu / std::f64::consts::PI
}

const CONTOUR_NODES: [usize; 4] = [24, 28, 32, 36];

fn contour(args: &MlArgs, log_scale: f64, tol: f64, series_estimate: f64) -> Result<f64> {
    let mut prev = contour_sum(args, log_scale, CONTOUR_NODES[0]);
    let mut best = series_estimate;
    for &nodes in &CONTOUR_NODES[1..] {
        let v = contour_sum(args, log_scale, nodes);
        let diff = (v - prev).abs();
        if diff <= 0.5 * tol {
            return Ok(v);
        }
        best = best.min(diff);
        prev = v;
    }
    Err(non_convergence(args, best))
}
