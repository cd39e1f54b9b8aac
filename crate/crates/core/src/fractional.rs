//! Fractional versions of the counting processes: the classical process
//! evaluated at an independent inverse stable subordinator, `M(Y(t))`.

use serde::{Deserialize, Serialize};

use crate::combinat::enum_compositions;
use crate::error::{domain, Error, Result};
use crate::processes::{
    check_time, classical_pgf, classical_pmf, mixture_pmf, poisson_kernel, Moments, PmfMethod, PmfTable,
    ProcessParams, N_ENUM_CAP,
};
use crate::specfun::{beta_fn, gamma_fn, ln_factorial, ml3, ml3_scaled, MlArgs};
use crate::subordinator::{y_cov_asymptotic, y_mean, y_var};
use crate::sum::CompensatedSum;

/// Minimum `t / s` accepted by the asymptotic covariance.
pub const COV_THRESHOLD: f64 = 100.0;

/// Tolerance used for every Mittag-Leffler evaluation in this module.
pub const ML_TOL: f64 = 1e-13;

const TAIL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracProcess {
    pub params: ProcessParams,
    pub beta: f64,
}

impl FracProcess {
    pub fn new(params: ProcessParams, beta: f64) -> Result<Self> {
        params.validate()?;
        if matches!(params, ProcessParams::GeneralizedCounting { .. }) {
            return domain("fractional processes are defined for btp, plp and gpap only");
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return domain(format!("beta must lie in (0, 1], got {beta}"));
        }
        Ok(Self { params, beta })
    }

    pub fn is_classical(&self) -> bool {
        self.beta == 1.0
    }

    /// `Lambda t^beta`, the mean number of jump epochs up to the subordinated time scale.
    fn scaled_rate(&self, t: f64) -> f64 {
        self.params.total_rate() * t.powf(self.beta)
    }
}

/// `Pr{N(t) = n}` for the time-fractional Poisson process of rate `total_rate`:
/// `(L t^beta)^n E^{n+1}_{beta, n beta + 1}(-L t^beta)`.
pub fn tfpp_pmf(total_rate: f64, beta: f64, n: usize, t: f64) -> Result<f64> {
    Ok(tfpp_kernel(total_rate, beta, t, n)?[n])
}

/// `Pr{N(t) = k}` for `k = 0..=n_max`.
pub fn tfpp_kernel(total_rate: f64, beta: f64, t: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(total_rate > 0.0 && total_rate.is_finite()) {
        return domain(format!("total rate must be positive, got {total_rate}"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("beta must lie in (0, 1], got {beta}"));
    }
    check_time(t)?;
    let x = total_rate * t.powf(beta);
    if beta == 1.0 || x == 0.0 {
        return Ok(poisson_kernel(x, n_max));
    }
    (0..=n_max)
        .map(|k| {
            let kf = k as f64;
            let args = MlArgs::new(beta, kf * beta + 1.0, kf + 1.0, -x)?;
            Ok(ml3_scaled(&args, kf * x.ln(), ML_TOL)?.clamp(0.0, 1.0))
        })
        .collect()
}

/// Pmf table of the fractional process. Every method except `Recurrence`
/// (classical only) is a different expansion of the same probabilities.
pub fn frac_pmf(proc: &FracProcess, t: f64, n_max: usize, method: PmfMethod) -> Result<PmfTable> {
    check_time(t)?;
    if proc.is_classical() {
        return classical_pmf(&proc.params, t, n_max, method);
    }
    if method == PmfMethod::Recurrence {
        return Err(Error::MethodUnavailable {
            method: method.name(),
            process: "fractional",
        });
    }
    crate::processes::check_method(&proc.params, n_max, method)?;
    let kernel = tfpp_kernel(proc.params.total_rate(), proc.beta, t, n_max)?;
    let probs = mixture_pmf(&proc.params, &kernel, method)?;
    Ok(PmfTable::new(t, probs, method))
}

/// `E u^{M(Y(t))} = E_{beta,1}(-psi(u) t^beta)`, `|u| <= 1`.
pub fn frac_pgf(proc: &FracProcess, u: f64, t: f64) -> Result<f64> {
    if proc.is_classical() {
        return classical_pgf(&proc.params, u, t);
    }
    check_time(t)?;
    if !(-1.0..=1.0).contains(&u) {
        return domain(format!("pgf argument must lie in [-1, 1], got {u}"));
    }
    let x = -proc.params.laplace_exponent(u) * t.powf(proc.beta);
    ml3(&MlArgs::two_param(proc.beta, 1.0, x)?, ML_TOL)
}

/// Chernoff bound on `Pr{M(Y(t)) > n}`: `min_{u > 1} G(u) / u^{n+1}`, with the
/// pgf continued to `u > 1` where the jump pgf converges.
pub fn certified_tail(proc: &FracProcess, t: f64, n: usize) -> Result<f64> {
    check_time(t)?;
    let u_max = match proc.params {
        ProcessParams::PoissonLogarithmic { p, .. } => 1.0 / (1.0 - p),
        ProcessParams::GeneralizedPolyaAeppli { rho, .. } => 1.0 / rho,
        _ => 64.0,
    };
    let mut best = 1.0f64;
    let steps = 400;
    for i in 1..steps {
        let u = (u_max.ln() * i as f64 / steps as f64).exp();
        let x = -proc.params.laplace_exponent(u) * t.powf(proc.beta);
        if !x.is_finite() {
            continue;
        }
        let ln_shift = -(n as f64 + 1.0) * u.ln();
        let bound = if proc.is_classical() {
            (x + ln_shift).exp()
        } else {
            // absolute error on the scaled value, added back to stay an upper bound
            match ml3_scaled(&MlArgs::two_param(proc.beta, 1.0, x)?, ln_shift, TAIL_TOL) {
                Ok(g) => g + TAIL_TOL,
                Err(_) => continue,
            }
        };
        best = best.min(bound);
    }
    Ok(best)
}

/// Smallest `n` whose certified tail is below `eps`.
pub fn support_for_tail(proc: &FracProcess, t: f64, eps: f64) -> Result<usize> {
    // the bound is nonincreasing in n: gallop, then bisect
    let reaches = |n: usize| -> Result<bool> { Ok(certified_tail(proc, t, n)? < eps) };
    if reaches(0)? {
        return Ok(0);
    }
    let (mut lo, mut hi) = (0usize, 1usize);
    while !reaches(hi)? {
        lo = hi;
        hi *= 2;
        if hi > 1 << 17 {
            return domain("tail bound does not reach the requested level");
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn frac_moments(proc: &FracProcess, t: f64) -> Result<Moments> {
    check_time(t)?;
    let (m1, m2) = proc.params.moment_coefficients();
    let ey = y_mean(proc.beta, t)?;
    Ok(Moments {
        mean: m1 * ey,
        variance: m2 * ey + m1 * m1 * y_var(proc.beta, t)?,
    })
}

fn check_threshold(s: f64, t: f64) -> Result<()> {
    if !(s > 0.0) {
        return domain(format!("s must be positive, got {s}"));
    }
    let ratio = t / s;
    if !(ratio >= COV_THRESHOLD) {
        return Err(Error::AsymptoticThreshold {
            threshold: COV_THRESHOLD,
            ratio,
        });
    }
    Ok(())
}

/// `Cov(M(Y(s)), M(Y(t)))` in the regime `t / s >= COV_THRESHOLD`, using
/// the large-`t` form of the subordinator covariance.
pub fn frac_cov(proc: &FracProcess, s: f64, t: f64) -> Result<f64> {
    check_threshold(s, t)?;
    let (m1, m2) = proc.params.moment_coefficients();
    Ok(m2 * y_mean(proc.beta, s)? + m1 * m1 * y_cov_asymptotic(proc.beta, s, t)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub s: f64,
    pub t_grid: Vec<f64>,
    pub corr: Vec<f64>,
    /// Least-squares slope of `ln corr` against `ln t`.
    pub fitted_exponent: f64,
    /// Constant in `corr ~ c0 t^{-beta}`; `sqrt(s)` in the classical case,
    /// where the decay is `sqrt(s/t)`.
    pub c0: f64,
}

pub fn correlation_decay(proc: &FracProcess, s: f64, t_grid: &[f64]) -> Result<CorrelationReport> {
    if t_grid.len() < 2 {
        return domain("correlation decay needs at least two grid times");
    }
    crate::subordinator::check_grid(t_grid)?;
    check_threshold(s, t_grid[0])?;
    let var_s = frac_moments(proc, s)?.variance;
    let corr = t_grid
        .iter()
        .map(|&t| Ok(frac_cov(proc, s, t)? / (var_s * frac_moments(proc, t)?.variance).sqrt()))
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = corr.iter().map(|c| c.ln()).collect();
    Ok(CorrelationReport {
        s,
        t_grid: t_grid.to_vec(),
        fitted_exponent: slope(&xs, &ys),
        c0: lrd_constant(proc, s)?,
        corr,
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn lrd_constant(proc: &FracProcess, s: f64) -> Result<f64> {
    let beta = proc.beta;
    if proc.is_classical() {
        return Ok(s.sqrt());
    }
    let (m1, m2) = proc.params.moment_coefficients();
    let g2 = gamma_fn(beta + 1.0)?.powi(2);
    let num = m2 / m1 * g2 * y_mean(beta, s)? + m1 * beta * s.powf(2.0 * beta) * beta_fn(beta, beta + 1.0)?;
    let spread = (2.0 / gamma_fn(2.0 * beta + 1.0)? - 1.0 / g2).sqrt();
    Ok(num / (g2 * frac_moments(proc, s)?.variance.sqrt() * spread))
}

/// `E[M(M-1)...(M-r+1)]` of the fractional Bell-Touchard process at time `t`.
pub fn factorial_moment_fbtp(alpha: f64, theta: f64, beta: f64, r: usize, t: f64) -> Result<f64> {
    FracProcess::new(ProcessParams::bell_touchard(alpha, theta)?, beta)?;
    check_time(t)?;
    if r == 0 {
        return domain("factorial moment order must be at least 1");
    }
    if r > N_ENUM_CAP {
        return Err(Error::EnumerationCap {
            method: "factorial_moment",
            cap: N_ENUM_CAP,
            requested: r,
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let ln_rate = alpha.ln() + theta + beta * t.ln();
    let mut acc = CompensatedSum::new();
    for n in 1..=r {
        let inner: f64 = enum_compositions(r, n)?
            .map(|c| {
                c.parts()
                    .iter()
                    .map(|&m| m as f64 * theta.ln() - ln_factorial(m))
                    .sum::<f64>()
                    .exp()
            })
            .sum();
        let ln_outer = n as f64 * ln_rate - crate::specfun::log_gamma(n as f64 * beta + 1.0)?;
        acc.add(ln_outer.exp() * inner);
    }
    Ok((ln_factorial(r)).exp() * acc.value())
}

/// `Pr{W_1 > t} = Pr{M(Y(t)) = 0} = E_{beta,1}(-L t^beta)` for the first jump epoch.
pub fn waiting_time_survival(proc: &FracProcess, t: f64) -> Result<f64> {
    check_time(t)?;
    let x = proc.scaled_rate(t);
    if proc.is_classical() {
        return Ok((-x).exp());
    }
    ml3(&MlArgs::two_param(proc.beta, 1.0, -x)?, ML_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn fbtp(beta: f64) -> FracProcess {
        FracProcess::new(ProcessParams::bell_touchard(1.0, 1.0).unwrap(), beta).unwrap()
    }
    fn fplp(beta: f64) -> FracProcess {
        FracProcess::new(ProcessParams::poisson_logarithmic(1.0, 0.5).unwrap(), beta).unwrap()
    }
    fn fgpap(beta: f64, r: f64) -> FracProcess {
        FracProcess::new(ProcessParams::polya_aeppli(1.0, 0.4, r).unwrap(), beta).unwrap()
    }
    fn ml(alpha: f64, beta: f64, x: f64) -> f64 {
        ml3(&MlArgs::two_param(alpha, beta, x).unwrap(), 1e-14).unwrap()
    }

    #[test]
    fn construction() {
        assert!(FracProcess::new(ProcessParams::generalized_counting(vec![1.0]).unwrap(), 0.5).is_err());
        assert!(FracProcess::new(ProcessParams::bell_touchard(1.0, 1.0).unwrap(), 0.0).is_err());
        assert!(FracProcess::new(ProcessParams::bell_touchard(1.0, 1.0).unwrap(), 1.2).is_err());
    }

    #[test]
    fn tfpp_examples() {
        assert_abs_diff_eq!(tfpp_pmf(2.0, 1.0, 3, 1.0).unwrap(), 0.180447, epsilon = 1e-6);
        assert_abs_diff_eq!(tfpp_pmf(2.0, 1.0, 3, 1.0).unwrap(), (-2f64).exp() * 8.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tfpp_pmf(1.3, 0.6, 0, 2.0).unwrap(), ml(0.6, 1.0, -1.3 * 2f64.powf(0.6)), epsilon = 1e-13);
        let total: f64 = tfpp_kernel(1.0, 0.5, 1.0, 60).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_mass_and_waiting_time() {
        let p = fbtp(0.7);
        let table = frac_pmf(&p, 1.0, 4, PmfMethod::Convolution).unwrap();
        let expected = ml(0.7, 1.0, -(E - 1.0));
        assert_abs_diff_eq!(table.probs[0], expected, epsilon = 1e-13);
        assert_abs_diff_eq!(waiting_time_survival(&p, 1.0).unwrap(), expected, epsilon = 1e-13);
        assert_eq!(waiting_time_survival(&p, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(waiting_time_survival(&fbtp(1.0), 2.0).unwrap(), (-2.0 * (E - 1.0)).exp(), epsilon = 1e-15);
        let mut last = 1.0;
        for i in 1..40 {
            let s = waiting_time_survival(&p, i as f64 * 0.25).unwrap();
            assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn t_zero_is_point_mass() {
        let table = frac_pmf(&fplp(0.4), 0.0, 5, PmfMethod::Partition).unwrap();
        assert_eq!(table.probs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_form_rejected_for_non_gpap_and_recurrence_for_fractional() {
        assert!(matches!(
            frac_pmf(&fbtp(0.5), 1.0, 5, PmfMethod::ClosedForm),
            Err(Error::MethodUnavailable { .. })
        ));
        assert!(frac_pmf(&fbtp(0.5), 1.0, 5, PmfMethod::Recurrence).is_err());
        assert!(matches!(
            frac_pmf(&fbtp(0.5), 1.0, 23, PmfMethod::Theta),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn gpap_first_probability_by_hand() {
        let p = fgpap(0.6, 2.0);
        let x = 1.0f64;
        let d = 0.6f64.powi(-2) - 1.0;
        // rho * (lambda t^b / D) * C(2, 1) * E^2_{b, b+1}(-lambda t^b)
        let e2 = ml3(&MlArgs::new(0.6, 1.6, 2.0, -x).unwrap(), 1e-14).unwrap();
        let by_hand = 0.4 * x / d * 2.0 * e2;
        for method in [PmfMethod::ClosedForm, PmfMethod::Convolution] {
            let table = frac_pmf(&p, 1.0, 1, method).unwrap();
            assert_abs_diff_eq!(table.probs[1], by_hand, epsilon = 1e-12);
        }
    }

    #[test]
    fn pgf_examples() {
        assert_eq!(frac_pgf(&fbtp(0.5), 1.0, 2.0).unwrap(), 1.0);
        let t0 = frac_pmf(&fbtp(0.5), 1.5, 0, PmfMethod::Convolution).unwrap().probs[0];
        assert_abs_diff_eq!(frac_pgf(&fbtp(0.5), 0.0, 1.5).unwrap(), t0, epsilon = 1e-13);
        let exponent = 1.0 - 0.75f64.ln() / 0.5f64.ln();
        assert_abs_diff_eq!(frac_pgf(&fplp(0.5), 0.5, 1.0).unwrap(), ml(0.5, 1.0, -exponent), epsilon = 1e-13);
        // E_{1/2,1}(-x) = exp(x^2) erfc(x)
        let erfc_form = (exponent * exponent).exp() * libm::erfc(exponent);
        assert_abs_diff_eq!(frac_pgf(&fplp(0.5), 0.5, 1.0).unwrap(), erfc_form, epsilon = 1e-12);
    }

    #[test]
    fn pgf_matches_pmf_sum() {
        for p in [fbtp(0.6), fplp(0.8), fgpap(0.4, 2.0)] {
            let table = frac_pmf(&p, 1.0, 150, PmfMethod::Convolution).unwrap();
            for u in [-0.5, 0.5] {
                assert!((table.partial_pgf(u) - frac_pgf(&p, u, 1.0).unwrap()).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn normalization_with_certified_tail() {
        for p in [fbtp(0.6), fplp(0.3), fgpap(0.9, 0.5), fgpap(1.0, 2.0)] {
            for t in [0.5, 2.0] {
                let n = support_for_tail(&p, t, 1e-9).unwrap();
                let table = frac_pmf(&p, t, n, PmfMethod::Convolution).unwrap();
                let tail = certified_tail(&p, t, n).unwrap();
                assert!((table.total() + tail - 1.0).abs() < 1e-8, "{p:?} t={t} n={n}");
                assert!(table.tail_bound <= tail + 1e-12);
            }
        }
    }

    #[test]
    fn moments_examples() {
        let g = libm::tgamma(1.5);
        assert_abs_diff_eq!(frac_moments(&fbtp(0.5), 1.0).unwrap().mean, E / g, epsilon = 1e-14);
        assert_abs_diff_eq!(frac_moments(&fbtp(0.5), 1.0).unwrap().mean, 3.067253, epsilon = 1e-6);
        assert_abs_diff_eq!(frac_moments(&fgpap(0.5, 1.0), 1.0).unwrap().mean, 5.0 / 3.0 / g, epsilon = 1e-14);
        assert_abs_diff_eq!(frac_moments(&fgpap(0.5, 1.0), 1.0).unwrap().mean, 1.880632, epsilon = 1e-6);
        let classical = frac_moments(&fbtp(1.0), 2.0).unwrap();
        assert_abs_diff_eq!(classical.variance, 2.0 * 2.0 * E, epsilon = 1e-12);
    }

    #[test]
    fn moments_match_pmf_table() {
        for p in [fbtp(0.6), fplp(0.5), fgpap(0.8, 2.0)] {
            let table = frac_pmf(&p, 1.0, 250, PmfMethod::Convolution).unwrap();
            let m = frac_moments(&p, 1.0).unwrap();
            let mean = table.factorial_moment(1);
            let var = table.factorial_moment(2) + mean - mean * mean;
            assert!((mean - m.mean).abs() < 1e-7, "{p:?}");
            assert!((var - m.variance).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn factorial_moments() {
        for beta in [0.3, 0.7, 1.0] {
            let p = FracProcess::new(ProcessParams::bell_touchard(0.8, 1.3).unwrap(), beta).unwrap();
            let first = factorial_moment_fbtp(0.8, 1.3, beta, 1, 2.0).unwrap();
            assert_abs_diff_eq!(first, frac_moments(&p, 2.0).unwrap().mean, epsilon = 1e-12);
            let table = frac_pmf(&p, 2.0, 250, PmfMethod::Convolution).unwrap();
            for r in 2..=4 {
                let f = factorial_moment_fbtp(0.8, 1.3, beta, r, 2.0).unwrap();
                assert!((f - table.factorial_moment(r)).abs() < 1e-6 * f.max(1.0), "beta={beta} r={r}");
            }
        }
        assert_eq!(factorial_moment_fbtp(1.0, 1.0, 0.5, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn covariance_threshold_and_classical_correlation() {
        assert!(matches!(frac_cov(&fbtp(0.5), 1.0, 50.0), Err(Error::AsymptoticThreshold { .. })));
        let report = correlation_decay(&fbtp(1.0), 1.0, &[100.0, 400.0]).unwrap();
        assert_abs_diff_eq!(report.corr[0], 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(report.corr[1], 0.05, epsilon = 1e-14);
        assert_abs_diff_eq!(report.fitted_exponent, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn correlation_decays_like_power_law() {
        let grid: Vec<f64> = (0..7).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect();
        for p in [fbtp(0.5), fplp(0.5), fgpap(0.5, 2.0)] {
            let r = correlation_decay(&p, 1.0, &grid).unwrap();
            assert!(r.corr.windows(2).all(|w| w[1] < w[0]));
            assert!(r.corr.iter().all(|&c| c > 0.0 && c <= 1.0));
            assert!((r.fitted_exponent + 0.5).abs() <= 0.02, "{}", r.fitted_exponent);
            let last = *r.corr.last().unwrap() * grid.last().unwrap().powf(0.5);
            assert!((last / r.c0 - 1.0).abs() < 0.05, "{last} vs {}", r.c0);
        }
    }
}
