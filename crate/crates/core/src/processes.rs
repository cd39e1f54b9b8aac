//! Classical compound Poisson counting processes: Bell-Touchard (BTP),
//! Poisson-logarithmic (PLP), generalized Pólya-Aeppli (GPAP) and the
//! finite-jump generalized counting process (GCP).
//!
//! Each is `M(t) = X_1 + ... + X_{N(t)}` with `N` a Poisson process of rate
//! [`ProcessParams::total_rate`] and iid jumps `Pr{X = j} = c_j`, `j >= 1`;
//! equivalently `sum_j j N_j(t)` with independent Poisson processes of rates
//! `lambda_j = total_rate * c_j` (the Lévy weights).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinat::{enum_compositions, enum_lambda, enum_omega, enum_theta, ConvolutionPowers};
use crate::error::{domain, Error, Result};
use crate::specfun::{ln_factorial, ln_rising_binomial};
use crate::sum::{compensated_sum, CompensatedSum};

/// Largest `n_max` accepted by the enumeration-based pmf forms.
pub const N_ENUM_CAP: usize = 22;

/// Default truncation tail for infinite jump supports.
pub const JUMP_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ProcessParams {
    /// Jumps `c_j = theta^j / (j! (e^theta - 1))` at rate `alpha (e^theta - 1)`.
    BellTouchard { alpha: f64, theta: f64 },
    /// Logarithmic-series jumps `c_j = -(1-p)^j / (j ln p)` at rate `lambda`.
    PoissonLogarithmic { lambda: f64, p: f64 },
    /// Zero-truncated negative-binomial jumps at rate `lambda`.
    GeneralizedPolyaAeppli { lambda: f64, rho: f64, r: f64 },
    /// Jumps of size `1..=k` at rates `rates[0..k]`.
    GeneralizedCounting { rates: Vec<f64> },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} must lie in (0, 1), got {v}"))
    }
}

impl ProcessParams {
    pub fn bell_touchard(alpha: f64, theta: f64) -> Result<Self> {
        let p = Self::BellTouchard { alpha, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn poisson_logarithmic(lambda: f64, p: f64) -> Result<Self> {
        let params = Self::PoissonLogarithmic { lambda, p };
        params.validate()?;
        Ok(params)
    }

    pub fn polya_aeppli(lambda: f64, rho: f64, r: f64) -> Result<Self> {
        let p = Self::GeneralizedPolyaAeppli { lambda, rho, r };
        p.validate()?;
        Ok(p)
    }

    pub fn generalized_counting(rates: Vec<f64>) -> Result<Self> {
        let p = Self::GeneralizedCounting { rates };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::BellTouchard { alpha, theta } => {
                positive("alpha", alpha)?;
                positive("theta", theta)
            }
            Self::PoissonLogarithmic { lambda, p } => {
                positive("lambda", lambda)?;
                unit_open("p", p)
            }
            Self::GeneralizedPolyaAeppli { lambda, rho, r } => {
                positive("lambda", lambda)?;
                unit_open("rho", rho)?;
                positive("r", r)
            }
            Self::GeneralizedCounting { ref rates } => {
                if rates.is_empty() {
                    return domain("rates must contain at least one entry");
                }
                if rates.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
                    return domain("rates must be non-negative and finite");
                }
                if rates.iter().all(|&l| l == 0.0) {
                    return domain("rates must not all be zero");
                }
                Ok(())
            }
        }
    }

    /// Short lowercase tag: `btp`, `plp`, `gpap` or `gcp`.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::BellTouchard { .. } => "btp",
            Self::PoissonLogarithmic { .. } => "plp",
            Self::GeneralizedPolyaAeppli { .. } => "gpap",
            Self::GeneralizedCounting { .. } => "gcp",
        }
    }

    /// `(1 - rho)^{-r} - 1`
    fn gpap_denominator(rho: f64, r: f64) -> f64 {
        (-r * (-rho).ln_1p()).exp_m1()
    }

    pub fn total_rate(&self) -> f64 {
        match self {
            Self::BellTouchard { alpha, theta } => alpha * theta.exp_m1(),
            Self::PoissonLogarithmic { lambda, .. } | Self::GeneralizedPolyaAeppli { lambda, .. } => *lambda,
            Self::GeneralizedCounting { rates } => rates.iter().sum(),
        }
    }

    /// `ln c_j` (`-inf` where `c_j = 0`).
    pub fn ln_jump_pmf(&self, j: usize) -> f64 {
        if j == 0 {
            return f64::NEG_INFINITY;
        }
        let jf = j as f64;
        match *self {
            Self::BellTouchard { theta, .. } => jf * theta.ln() - ln_factorial(j) - theta.exp_m1().ln(),
            Self::PoissonLogarithmic { p, .. } => jf * (-p).ln_1p() - jf.ln() - (-p.ln()).ln(),
            Self::GeneralizedPolyaAeppli { rho, r, .. } => {
                ln_rising_binomial(r, j) + jf * rho.ln() - Self::gpap_denominator(rho, r).ln()
            }
            Self::GeneralizedCounting { ref rates } => match rates.get(j - 1) {
                Some(&l) if l > 0.0 => (l / self.total_rate()).ln(),
                _ => f64::NEG_INFINITY,
            },
        }
    }

    /// Jump distribution `c_j = Pr{X_1 = j}`; zero for `j = 0`.
    pub fn jump_pmf(&self, j: usize) -> f64 {
        self.ln_jump_pmf(j).exp()
    }

    /// Dirac weight `lambda_j` of the Lévy measure at `j`.
    pub fn levy_weight(&self, j: usize) -> f64 {
        match *self {
            Self::BellTouchard { alpha, theta } if j >= 1 => {
                alpha * (j as f64 * theta.ln() - ln_factorial(j)).exp()
            }
            Self::GeneralizedCounting { ref rates } => {
                if j >= 1 { rates.get(j - 1).copied().unwrap_or(0.0) } else { 0.0 }
            }
            _ => self.total_rate() * self.jump_pmf(j),
        }
    }

    /// Upper bound on `c_{i+1} / c_i` valid for every `i >= j`.
    fn jump_ratio_bound(&self, j: usize) -> f64 {
        let jf = j as f64;
        match *self {
            Self::BellTouchard { theta, .. } => theta / (jf + 1.0),
            Self::PoissonLogarithmic { p, .. } => 1.0 - p,
            Self::GeneralizedPolyaAeppli { rho, r, .. } => {
                if r >= 1.0 {
                    rho * (r + jf) / (jf + 1.0)
                } else {
                    rho
                }
            }
            Self::GeneralizedCounting { .. } => 0.0,
        }
    }

    /// Certified upper bound on `sum_{j > n} c_j`.
    pub fn jump_tail(&self, n: usize) -> f64 {
        if let Self::GeneralizedCounting { rates } = self {
            let total = self.total_rate();
            return rates.iter().skip(n).sum::<f64>() / total;
        }
        let mut acc = CompensatedSum::new();
        let mut j = n + 1;
        loop {
            let c = self.jump_pmf(j);
            acc.add(c);
            let ratio = self.jump_ratio_bound(j);
            if ratio <= 0.9 || j > n + 100_000 {
                let rest = if ratio < 1.0 { c * ratio / (1.0 - ratio) } else { f64::INFINITY };
                acc.add(rest);
                return acc.value();
            }
            j += 1;
        }
    }

    /// Smallest `N` with `sum_{j > N} c_j < tail`.
    pub fn jump_support(&self, tail: f64) -> usize {
        if let Self::GeneralizedCounting { rates } = self {
            let last = rates.iter().rposition(|&l| l > 0.0).unwrap_or(0);
            return last + 1;
        }
        let mut n = 1;
        while self.jump_tail(n) >= tail {
            n += 1;
        }
        n
    }

    /// `Lambda (1 - phi(u))` where `phi` is the jump pgf, so that the pgf of
    /// the classical process is `exp(-t * laplace_exponent(u))`. Finite for
    /// `|u| <= 1` and, where the jump pgf converges, for some `u > 1`.
    pub fn laplace_exponent(&self, u: f64) -> f64 {
        match *self {
            Self::BellTouchard { alpha, theta } => alpha * (theta.exp() - (theta * u).exp()),
            Self::PoissonLogarithmic { lambda, p } => {
                let inner = 1.0 - (1.0 - p) * u;
                if inner <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                lambda * (1.0 - inner.ln() / p.ln())
            }
            Self::GeneralizedPolyaAeppli { lambda, rho, r } => {
                let inner = 1.0 - rho * u;
                if inner <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                lambda * (1.0 - (-r * inner.ln()).exp_m1() / Self::gpap_denominator(rho, r))
            }
            Self::GeneralizedCounting { ref rates } => rates
                .iter()
                .enumerate()
                .map(|(i, &l)| l * (1.0 - u.powi(i as i32 + 1)))
                .sum(),
        }
    }

    /// Per-unit-time mean and variance `(m1, m2)`: `E M(t) = m1 t`, `Var M(t) = m2 t`.
    pub fn moment_coefficients(&self) -> (f64, f64) {
        match *self {
            Self::BellTouchard { alpha, theta } => {
                let m1 = alpha * theta * theta.exp();
                (m1, m1 * (theta + 1.0))
            }
            Self::PoissonLogarithmic { lambda, p } => {
                let m1 = lambda * (p - 1.0) / (p * p.ln());
                (m1, m1 / p)
            }
            Self::GeneralizedPolyaAeppli { lambda, rho, r } => {
                // 1 - (1 - rho)^r
                let trunc = -(r * (-rho).ln_1p()).exp_m1();
                let m1 = r * rho * lambda / ((1.0 - rho) * trunc);
                (m1, m1 * (1.0 + r * rho) / (1.0 - rho))
            }
            Self::GeneralizedCounting { ref rates } => rates.iter().enumerate().fold((0.0, 0.0), |(a, b), (i, &l)| {
                let j = (i + 1) as f64;
                (a + j * l, b + j * j * l)
            }),
        }
    }
}

impl fmt::Display for ProcessParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BellTouchard { alpha, theta } => write!(f, "BTP(alpha={alpha}, theta={theta})"),
            Self::PoissonLogarithmic { lambda, p } => write!(f, "PLP(lambda={lambda}, p={p})"),
            Self::GeneralizedPolyaAeppli { lambda, rho, r } => {
                write!(f, "GPAP(lambda={lambda}, rho={rho}, r={r})")
            }
            Self::GeneralizedCounting { rates } => write!(f, "GCP(rates={rates:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfMethod {
    /// `q(n) = (t/n) sum_j j lambda_j q(n-j)` (classical only).
    Recurrence,
    /// Sum over multiplicity vectors of partitions of `n`.
    Partition,
    /// Sum over compositions of `n` into `k` parts.
    Composition,
    /// `sum_k Pr{X_1+...+X_k = n} Pr{N(t) = k}` with DP convolution powers.
    Convolution,
    /// Partitions grouped by part count `k`.
    Theta,
    /// As `Theta`, with vectors truncated to length `n - k + 1`.
    Lambda,
    /// Alternating double sum for the generalized Pólya-Aeppli process.
    ClosedForm,
}

impl PmfMethod {
    pub const ALL: [PmfMethod; 7] = [
        PmfMethod::Recurrence,
        PmfMethod::Partition,
        PmfMethod::Composition,
        PmfMethod::Convolution,
        PmfMethod::Theta,
        PmfMethod::Lambda,
        PmfMethod::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PmfMethod::Recurrence => "recurrence",
            PmfMethod::Partition => "partition",
            PmfMethod::Composition => "composition",
            PmfMethod::Convolution => "convolution",
            PmfMethod::Theta => "theta",
            PmfMethod::Lambda => "lambda",
            PmfMethod::ClosedForm => "closed_form",
        }
    }

    pub fn is_enumerative(self) -> bool {
        matches!(
            self,
            PmfMethod::Partition | PmfMethod::Composition | PmfMethod::Theta | PmfMethod::Lambda
        )
    }
}

impl fmt::Display for PmfMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PmfMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PmfMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown pmf method `{s}`")))
    }
}

/// Probabilities `q(0,t) ..= q(n_max,t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    pub t: f64,
    pub n_max: usize,
    pub probs: Vec<f64>,
    pub method: PmfMethod,
    /// `1 - sum(probs)`, clamped at zero.
    pub tail_bound: f64,
}

impl PmfTable {
    pub(crate) fn new(t: f64, probs: Vec<f64>, method: PmfMethod) -> Self {
        let total = compensated_sum(probs.iter().copied());
        Self {
            t,
            n_max: probs.len() - 1,
            probs,
            method,
            tail_bound: (1.0 - total).max(0.0),
        }
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }

    /// `sum_n q(n) u^n`, truncated at `n_max`.
    pub fn partial_pgf(&self, u: f64) -> f64 {
        compensated_sum(self.probs.iter().enumerate().map(|(n, &q)| q * u.powi(n as i32)))
    }

    /// `sum_n n(n-1)...(n-r+1) q(n)`, truncated at `n_max`.
    pub fn factorial_moment(&self, r: usize) -> f64 {
        compensated_sum(self.probs.iter().enumerate().map(|(n, &q)| {
            let falling: f64 = (0..r).map(|i| n as f64 - i as f64).product();
            falling * q
        }))
    }
}

pub(crate) fn check_method(params: &ProcessParams, n_max: usize, method: PmfMethod) -> Result<()> {
    if method.is_enumerative() && n_max > N_ENUM_CAP {
        return Err(Error::EnumerationCap {
            method: method.name(),
            cap: N_ENUM_CAP,
            requested: n_max,
        });
    }
    if method == PmfMethod::ClosedForm && !matches!(params, ProcessParams::GeneralizedPolyaAeppli { .. }) {
        return Err(Error::MethodUnavailable {
            method: method.name(),
            process: params.tag(),
        });
    }
    Ok(())
}

/// Probabilities of `X_1 + ... + X_N` for `n = 0..kernel.len()`, where
/// `kernel[k] = Pr{N = k}` and the `X_i` follow the jump law of `params`.
/// `method` selects the expansion; `Recurrence` is not a mixture form.
pub fn mixture_pmf(params: &ProcessParams, kernel: &[f64], method: PmfMethod) -> Result<Vec<f64>> {
    let n_max = kernel.len() - 1;
    check_method(params, n_max, method)?;
    let ln_c: Vec<f64> = (0..=n_max).map(|j| params.ln_jump_pmf(j)).collect();
    let mut probs = vec![0.0; n_max + 1];
    probs[0] = kernel[0];

    // Weight of a multiplicity vector inside the k-grouped forms:
    // k! prod_j c_j^{x_j} / x_j!
    let multinomial = |v: &crate::combinat::MultiplicityVector| -> f64 {
        let mut ln_w = ln_factorial(v.part_count());
        for (j, x) in v.nonzero() {
            ln_w += x as f64 * ln_c[j] - ln_factorial(x);
        }
        ln_w.exp()
    };

    match method {
        PmfMethod::Recurrence => {
            return domain("the recurrence form needs the classical time parameter; use classical_pmf");
        }
        PmfMethod::Partition => {
            for (n, slot) in probs.iter_mut().enumerate().skip(1) {
                *slot = compensated_sum(enum_omega(n)?.map(|v| multinomial(&v) * kernel[v.part_count()]));
            }
        }
        PmfMethod::Composition => {
            for (n, slot) in probs.iter_mut().enumerate().skip(1) {
                let mut acc = CompensatedSum::new();
                for k in 1..=n {
                    let inner =
                        compensated_sum(enum_compositions(n, k)?.map(|c| c.parts().iter().map(|&m| ln_c[m]).sum::<f64>().exp()));
                    acc.add(inner * kernel[k]);
                }
                *slot = acc.value();
            }
        }
        PmfMethod::Theta | PmfMethod::Lambda => {
            for (n, slot) in probs.iter_mut().enumerate().skip(1) {
                let mut acc = CompensatedSum::new();
                for k in 1..=n {
                    let inner = if method == PmfMethod::Theta {
                        compensated_sum(enum_theta(n, k)?.map(|v| multinomial(&v)))
                    } else {
                        compensated_sum(enum_lambda(n, k)?.map(|v| multinomial(&v)))
                    };
                    acc.add(inner * kernel[k]);
                }
                *slot = acc.value();
            }
        }
        PmfMethod::Convolution => {
            let jump: Vec<f64> = ln_c.iter().map(|l| l.exp()).collect();
            let powers = ConvolutionPowers::new(&jump, n_max, n_max);
            for (n, slot) in probs.iter_mut().enumerate().skip(1) {
                *slot = compensated_sum((1..=n).map(|k| powers.mass(k, n) * kernel[k]));
            }
        }
        PmfMethod::ClosedForm => {
            let ProcessParams::GeneralizedPolyaAeppli { rho, r, .. } = *params else {
                unreachable!("checked above")
            };
            let denom = ProcessParams::gpap_denominator(rho, r);
            for (n, slot) in probs.iter_mut().enumerate().skip(1) {
                let mut acc = CompensatedSum::new();
                for j in 1..=n {
                    // Pr{X_1 + ... + X_j = n} as the j-th finite difference
                    // rho^n / D^j sum_m (-1)^(j-m) C(j,m) C(r m + n - 1, n)
                    let mut inner = CompensatedSum::new();
                    let mut binom_jm = 1.0;
                    for m in 1..=j {
                        binom_jm = binom_jm * (j + 1 - m) as f64 / m as f64;
                        let rm = r * m as f64;
                        let binom_n: f64 = (1..=n).map(|i| (rm + i as f64 - 1.0) / i as f64).product();
                        let sign = if (j - m) % 2 == 0 { 1.0 } else { -1.0 };
                        inner.add(sign * binom_jm * binom_n);
                    }
                    let prefactor = (n as f64 * rho.ln() - j as f64 * denom.ln()).exp();
                    acc.add(prefactor * inner.value() * kernel[j]);
                }
                *slot = acc.value();
            }
        }
    }
    Ok(probs)
}

/// Poisson(`mean`) probabilities for `k = 0..=n_max`.
pub(crate) fn poisson_kernel(mean: f64, n_max: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    (0..=n_max)
        .map(|k| (k as f64 * mean.ln() - mean - ln_factorial(k)).exp())
        .collect()
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be non-negative and finite, got {t}"))
    }
}

/// Exact pmf table of the classical process at time `t`.
pub fn classical_pmf(params: &ProcessParams, t: f64, n_max: usize, method: PmfMethod) -> Result<PmfTable> {
    params.validate()?;
    check_time(t)?;
    check_method(params, n_max, method)?;
    let probs = if method == PmfMethod::Recurrence {
        let mut q = vec![0.0; n_max + 1];
        q[0] = (-params.total_rate() * t).exp();
        let weights: Vec<f64> = (0..=n_max).map(|j| j as f64 * params.levy_weight(j)).collect();
        for n in 1..=n_max {
            let s = compensated_sum((1..=n).map(|j| weights[j] * q[n - j]));
            q[n] = t * s / n as f64;
        }
        q
    } else {
        let kernel = poisson_kernel(params.total_rate() * t, n_max);
        mixture_pmf(params, &kernel, method)?
    };
    Ok(PmfTable::new(t, probs, method))
}

/// Probability generating function `E u^{M(t)}`, `|u| <= 1`.
pub fn classical_pgf(params: &ProcessParams, u: f64, t: f64) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    if !(-1.0..=1.0).contains(&u) {
        return domain(format!("pgf argument must lie in [-1, 1], got {u}"));
    }
    Ok((-params.laplace_exponent(u) * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

pub fn classical_moments(params: &ProcessParams, t: f64) -> Result<Moments> {
    params.validate()?;
    check_time(t)?;
    let (m1, m2) = params.moment_coefficients();
    Ok(Moments {
        mean: m1 * t,
        variance: m2 * t,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyWeights {
    /// `weights[j - 1] = lambda_j`
    pub weights: Vec<f64>,
    /// Upper bound on the omitted mass `sum_{j > j_max} lambda_j`.
    pub tail_bound: f64,
}

pub fn levy_weights(params: &ProcessParams, j_max: usize) -> Result<LevyWeights> {
    params.validate()?;
    if j_max == 0 {
        return domain("levy_weights requires j_max >= 1");
    }
    Ok(LevyWeights {
        weights: (1..=j_max).map(|j| params.levy_weight(j)).collect(),
        tail_bound: params.total_rate() * params.jump_tail(j_max),
    })
}
