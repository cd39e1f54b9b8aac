//! The `beta`-stable subordinator `D` and its inverse (first-passage) process `Y`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{beta_fn, gamma_fn};

/// Relative resolution of the internal subordinator grid used for paths.
pub const PATH_REL_STEP: f64 = 0.005;

/// A realization of `Y` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_stable_order(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        domain(format!("stable index beta must lie in (0, 1), got {beta}"))
    }
}

fn check_order(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        domain(format!("beta must lie in (0, 1], got {beta}"))
    }
}

/// `ln S` for a standard positive stable `S` with `E exp(-s S) = exp(-s^beta)`
/// (Kanter's representation).
pub(crate) fn ln_standard_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u: f64 = rng.gen();
        if u > 1e-300 && u < 1.0 - 1e-16 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let a = (beta * PI * u).sin().ln();
    let b = (PI * u).sin().ln();
    let c = ((1.0 - beta) * PI * u).sin().ln();
    a - b / beta + (1.0 - beta) / beta * (c - e.ln())
}

/// One draw of `D(t)`, equal in law to `t^{1/beta} S`.
pub fn sample_stable<R: Rng + ?Sized>(beta: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_stable_order(beta)?;
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    Ok((t.ln() / beta + ln_standard_stable(beta, rng)).exp())
}

/// One draw of `Y(t)` through `Y(t) = (t / D(1))^beta` in law.
pub fn sample_inverse_at<R: Rng + ?Sized>(beta: f64, t: f64, rng: &mut R) -> Result<f64> {
    check_stable_order(beta)?;
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((beta * (t.ln() - ln_standard_stable(beta, rng))).exp())
}

/// One realization of `Y` on `times`, the right-continuous inverse of a `D`
/// path simulated on an adaptive grid `x_{i+1} = x_i + max(h, rel_step * x_i)`.
/// `h` is `rel_step` times the mean of `Y` at the smallest positive grid time,
/// so every grid value is resolved to roughly `rel_step` relative accuracy.
/// The `D` path is extended until it passes the last grid time.
pub fn sample_inverse_path<R: Rng + ?Sized>(beta: f64, times: &[f64], rng: &mut R) -> Result<PathGrid> {
    sample_inverse_path_with(beta, times, PATH_REL_STEP, rng)
}

pub fn sample_inverse_path_with<R: Rng + ?Sized>(
    beta: f64,
    times: &[f64],
    rel_step: f64,
    rng: &mut R,
) -> Result<PathGrid> {
    check_stable_order(beta)?;
    check_grid(times)?;
    if !(rel_step > 0.0 && rel_step < 1.0) {
        return domain(format!("rel_step must lie in (0, 1), got {rel_step}"));
    }
    let mut values = vec![0.0; times.len()];
    let Some(first) = times.iter().position(|&t| t > 0.0) else {
        return Ok(PathGrid { times: times.to_vec(), values });
    };
    let h = rel_step * y_mean(beta, times[first])?;
    let (mut x, mut d) = (0.0f64, 0.0f64);
    let mut idx = first;
    while idx < times.len() {
        let dx = h.max(rel_step * x);
        d += (dx.ln() / beta + ln_standard_stable(beta, rng)).exp();
        x += dx;
        while idx < times.len() && d > times[idx] {
            values[idx] = x;
            idx += 1;
        }
    }
    Ok(PathGrid { times: times.to_vec(), values })
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return domain("time grid must not be empty");
    }
    if !(times[0] >= 0.0) || times.iter().any(|t| !t.is_finite()) {
        return domain("time grid must be finite and start at a non-negative time");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return domain("time grid must be strictly increasing");
    }
    Ok(())
}

/// `E Y(t) = t^beta / Gamma(beta + 1)`.
pub fn y_mean(beta: f64, t: f64) -> Result<f64> {
    check_order(beta)?;
    if !(t >= 0.0) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    Ok(t.powf(beta) / gamma_fn(beta + 1.0)?)
}

/// `Var Y(t) = (2/Gamma(2 beta + 1) - 1/Gamma(beta + 1)^2) t^{2 beta}`.
pub fn y_var(beta: f64, t: f64) -> Result<f64> {
    check_order(beta)?;
    if !(t >= 0.0) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if beta == 1.0 {
        return Ok(0.0);
    }
    let g = gamma_fn(beta + 1.0)?;
    Ok((2.0 / gamma_fn(2.0 * beta + 1.0)? - 1.0 / (g * g)) * t.powf(2.0 * beta))
}

/// Large-`t` approximation of `Cov(Y(s), Y(t))` for fixed `s`:
/// `(beta s^{2 beta} B(beta, beta+1) - beta^2 s^{beta+1} / ((beta+1) t^{1-beta})) / Gamma(beta+1)^2`.
/// Only meaningful for `t >> s`; exactly zero at `beta = 1`.
pub fn y_cov_asymptotic(beta: f64, s: f64, t: f64) -> Result<f64> {
    check_order(beta)?;
    if !(s >= 0.0 && s <= t) {
        return domain(format!("need 0 <= s <= t, got s={s}, t={t}"));
    }
    if beta == 1.0 {
        return Ok(0.0);
    }
    let g = gamma_fn(beta + 1.0)?;
    let lead = beta * s.powf(2.0 * beta) * beta_fn(beta, beta + 1.0)?;
    let corr = beta * beta * s.powf(beta + 1.0) / ((beta + 1.0) * t.powf(1.0 - beta));
    Ok((lead - corr) / (g * g))
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::specfun::{ml3, MlArgs, DEFAULT_TOL};
    use crate::stats::{ks_two_sample, mean, variance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn closed_form_examples() {
        assert!((y_mean(0.5, 1.0).unwrap() - 1.128379).abs() < 1e-6);
        assert_eq!(y_var(1.0, 3.0).unwrap(), 0.0);
        assert!(y_var(0.999999, 1.0).unwrap().abs() < 1e-5);
        assert!((y_cov_asymptotic(0.5, 1.0, 1e4).unwrap() - 0.997878).abs() < 1e-6);
        assert_eq!(y_cov_asymptotic(1.0, 2.0, 5.0).unwrap(), 0.0);
        assert!(y_cov_asymptotic(0.5, 2.0, 1.0).is_err());
        for beta in [0.05, 0.3, 0.5, 0.7, 0.95, 0.999] {
            assert!(y_var(beta, 1.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        let mut r = rng(0);
        assert!(sample_stable(1.0, 1.0, &mut r).is_err());
        assert!(sample_stable(0.5, 0.0, &mut r).is_err());
        assert!(sample_inverse_at(0.0, 1.0, &mut r).is_err());
        assert_eq!(sample_inverse_at(0.5, 0.0, &mut r).unwrap(), 0.0);
        assert!(sample_inverse_path(0.5, &[1.0, 1.0], &mut r).is_err());
    }

    #[test]
    fn stable_laplace_transform() {
        let mut r = rng(11);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| (-sample_stable(0.5, 1.0, &mut r).unwrap()).exp())
            .collect();
        assert!(xs.iter().all(|&x| x < 1.0));
        assert!(mean(&xs).within((-1.0f64).exp(), 3.0));
    }

    #[test]
    fn stable_self_similarity() {
        let mut r = rng(12);
        let a: Vec<f64> = (0..10_000).map(|_| sample_stable(0.6, 2.0, &mut r).unwrap()).collect();
        let b: Vec<f64> = (0..10_000)
            .map(|_| 2f64.powf(1.0 / 0.6) * sample_stable(0.6, 1.0, &mut r).unwrap())
            .collect();
        assert!(ks_two_sample(&a, &b).p_value > 0.01);
    }

    #[test]
    fn inverse_moments_and_laplace() {
        let mut r = rng(13);
        let ys: Vec<f64> = (0..100_000).map(|_| sample_inverse_at(0.5, 1.0, &mut r).unwrap()).collect();
        assert!(mean(&ys).within(1.128379, 3.0));
        assert!(variance(&ys).within(y_var(0.5, 1.0).unwrap(), 3.0));
        let ys: Vec<f64> = (0..100_000)
            .map(|_| (-sample_inverse_at(0.7, 1.0, &mut r).unwrap()).exp())
            .collect();
        let target = ml3(&MlArgs::two_param(0.7, 1.0, -1.0).unwrap(), DEFAULT_TOL).unwrap();
        assert!(mean(&ys).within(target, 3.0));
    }

    #[test]
    fn path_is_monotone_and_matches_marginal() {
        let mut r = rng(14);
        let times = [0.0, 0.5, 1.0, 3.0, 10.0];
        let mut at_three = Vec::new();
        for _ in 0..10_000 {
            let path = sample_inverse_path(0.7, &times, &mut r).unwrap();
            assert_eq!(path.values[0], 0.0);
            assert!(path.values.windows(2).all(|w| w[0] <= w[1]));
            at_three.push(path.values[3]);
        }
        let direct: Vec<f64> = (0..10_000).map(|_| sample_inverse_at(0.7, 3.0, &mut r).unwrap()).collect();
        assert!(ks_two_sample(&at_three, &direct).p_value > 0.01);
    }
}
