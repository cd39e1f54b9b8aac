//! Exact simulation of the classical and fractional processes and
//! goodness-of-fit comparison against analytic pmf tables.
//!
//! Draws are produced in fixed-size chunks. Chunk `i` uses a ChaCha8 stream
//! seeded with `SimConfig::seed` and stream id `i`, so results depend only on
//! the seed and sample count, never on thread scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fractional::FracProcess;
use crate::processes::{check_time, PmfTable, ProcessParams, JUMP_TAIL};
use crate::stats::{chi_square_sf, mean, variance, Estimate};
use crate::subordinator::{check_grid, sample_inverse_at, sample_inverse_path};

/// Draws per RNG stream.
pub const CHUNK: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Jump laws with infinite support are truncated where the remaining
    /// mass drops below this level.
    pub jump_truncation_tail: f64,
    /// Observation time for single-time simulations.
    pub horizon: f64,
    pub max_abs_z: f64,
    pub min_p_value: f64,
}

impl SimConfig {
    pub fn new(n_samples: usize, seed: u64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            n_samples,
            seed,
            jump_truncation_tail: JUMP_TAIL,
            horizon,
            max_abs_z: 4.0,
            min_p_value: 1e-3,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return domain("n_samples must be at least 1");
        }
        if !(self.jump_truncation_tail > 0.0 && self.jump_truncation_tail <= 1e-6) {
            return domain("jump_truncation_tail must lie in (0, 1e-6]");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return domain("horizon must be positive");
        }
        Ok(())
    }
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `n` draws of `draw` across chunks in parallel; output order is fixed.
pub fn par_draws<T, F>(n: usize, seed: u64, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalMethod {
    /// Poisson number of jumps, each drawn by inverse CDF.
    CompoundJumps,
    /// Independent Poisson counts per jump size, `sum_j j N_j`.
    Superposition,
}

/// Sampler for the classical process with precomputed jump tables.
#[derive(Debug, Clone)]
pub struct ClassicalSampler {
    total_rate: f64,
    cdf: Vec<f64>,
    rates: Vec<f64>,
    method: ClassicalMethod,
}

impl ClassicalSampler {
    pub fn new(params: &ProcessParams, tail: f64, method: ClassicalMethod) -> Result<Self> {
        params.validate()?;
        let support = params.jump_support(tail);
        let mut cdf = Vec::with_capacity(support);
        let mut acc = 0.0;
        for j in 1..=support {
            acc += params.jump_pmf(j);
            cdf.push(acc);
        }
        Ok(Self {
            total_rate: params.total_rate(),
            rates: (1..=support).map(|j| params.levy_weight(j)).collect(),
            cdf,
            method,
        })
    }

    pub fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u) as u64 + 1
    }

    /// One draw of `M(t)`.
    pub fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> u64 {
        match self.method {
            ClassicalMethod::CompoundJumps => {
                let n = poisson(self.total_rate * t, rng);
                (0..n).map(|_| self.jump(rng)).sum()
            }
            ClassicalMethod::Superposition => self
                .rates
                .iter()
                .enumerate()
                .map(|(i, &l)| (i as u64 + 1) * poisson(l * t, rng))
                .sum(),
        }
    }
}

impl ClassicalSampler {
    /// One trajectory evaluated at `times`, built from independent increments.
    pub fn sample_path<R: Rng + ?Sized>(&self, times: &[f64], rng: &mut R) -> Result<SamplePath> {
        check_grid(times)?;
        let mut values = Vec::with_capacity(times.len());
        let (mut prev, mut m) = (0.0, 0u64);
        for &t in times {
            m += self.sample(t - prev, rng);
            prev = t;
            values.push(m);
        }
        Ok(SamplePath {
            times: times.to_vec(),
            values,
        })
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// One draw of the classical process at time `t` by compound jumps.
pub fn sample_classical<R: Rng + ?Sized>(params: &ProcessParams, t: f64, rng: &mut R) -> Result<u64> {
    check_time(t)?;
    Ok(ClassicalSampler::new(params, JUMP_TAIL, ClassicalMethod::CompoundJumps)?.sample(t, rng))
}

/// Sampler for `M(Y(t))`.
#[derive(Debug, Clone)]
pub struct FractionalSampler {
    beta: f64,
    inner: ClassicalSampler,
}

/// A trajectory evaluated on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<u64>,
}

impl FractionalSampler {
    pub fn new(proc: &FracProcess, tail: f64) -> Result<Self> {
        Ok(Self {
            beta: proc.beta,
            inner: ClassicalSampler::new(&proc.params, tail, ClassicalMethod::CompoundJumps)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<u64> {
        check_time(t)?;
        let y = if self.beta == 1.0 { t } else { sample_inverse_at(self.beta, t, rng)? };
        Ok(self.inner.sample(y, rng))
    }

    /// One trajectory: an inverse-subordinator path, then a single classical
    /// path read off at the time-changed instants.
    pub fn sample_path<R: Rng + ?Sized>(&self, times: &[f64], rng: &mut R) -> Result<SamplePath> {
        check_grid(times)?;
        let ys = if self.beta == 1.0 {
            times.to_vec()
        } else {
            sample_inverse_path(self.beta, times, rng)?.values
        };
        let mut values = Vec::with_capacity(ys.len());
        let (mut prev_y, mut m) = (0.0, 0u64);
        for y in ys {
            m += self.inner.sample(y - prev_y, rng);
            prev_y = y;
            values.push(m);
        }
        Ok(SamplePath {
            times: times.to_vec(),
            values,
        })
    }

    /// One draw of `M(|B(t)|)` with `B` a Brownian motion of variance `2t`,
    /// which has the law of the `beta = 1/2` process at time `t`.
    pub fn sample_brownian_time<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<u64> {
        check_time(t)?;
        let z: f64 = rng.sample(StandardNormal);
        Ok(self.inner.sample(z.abs() * (2.0 * t).sqrt(), rng))
    }
}

pub fn sample_fractional<R: Rng + ?Sized>(proc: &FracProcess, t: f64, rng: &mut R) -> Result<u64> {
    FractionalSampler::new(proc, JUMP_TAIL)?.sample(t, rng)
}

pub fn sample_fractional_path<R: Rng + ?Sized>(proc: &FracProcess, times: &[f64], rng: &mut R) -> Result<SamplePath> {
    FractionalSampler::new(proc, JUMP_TAIL)?.sample_path(times, rng)
}

/// `config.n_samples` draws of the fractional process at `config.horizon`.
pub fn simulate_fractional(proc: &FracProcess, config: &SimConfig) -> Result<Vec<u64>> {
    config.validate()?;
    let sampler = FractionalSampler::new(proc, config.jump_truncation_tail)?;
    par_draws(config.n_samples, config.seed, |rng| sampler.sample(config.horizon, rng))
}

/// `config.n_samples` draws of the classical process at `config.horizon`.
pub fn simulate_classical(params: &ProcessParams, method: ClassicalMethod, config: &SimConfig) -> Result<Vec<u64>> {
    config.validate()?;
    let sampler = ClassicalSampler::new(params, config.jump_truncation_tail, method)?;
    par_draws(config.n_samples, config.seed, |rng| Ok(sampler.sample(config.horizon, rng)))
}

pub fn simulate_paths(proc: &FracProcess, times: &[f64], config: &SimConfig) -> Result<Vec<SamplePath>> {
    config.validate()?;
    let sampler = FractionalSampler::new(proc, config.jump_truncation_tail)?;
    par_draws(config.n_samples, config.seed, |rng| sampler.sample_path(times, rng))
}

/// `counts[n]` = number of draws equal to `n`.
pub fn histogram(draws: &[u64]) -> Vec<u64> {
    let len = draws.iter().max().map_or(0, |&m| m as usize + 1);
    let mut counts = vec![0; len];
    for &d in draws {
        counts[d as usize] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    /// `None` for the pooled bin of all low-probability outcomes.
    pub n: Option<usize>,
    pub empirical: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bins: Vec<BinComparison>,
    pub max_abs_z: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pass: bool,
}

/// Compare observed counts with an analytic table using the default
/// thresholds (`|z| <= 4`, chi-square p-value `>= 0.001`).
pub fn compare_pmf(counts: &[u64], analytic: &PmfTable, n_samples: usize) -> Result<ComparisonReport> {
    compare_pmf_with(counts, analytic, n_samples, 4.0, 1e-3)
}

/// Bins with analytic probability below `10 / n_samples`, together with
/// everything beyond the table, are pooled into one bin.
pub fn compare_pmf_with(
    counts: &[u64],
    analytic: &PmfTable,
    n_samples: usize,
    max_abs_z: f64,
    min_p_value: f64,
) -> Result<ComparisonReport> {
    let total: u64 = counts.iter().sum();
    if n_samples == 0 || total != n_samples as u64 {
        return domain(format!("counts sum to {total}, expected {n_samples}"));
    }
    let n = n_samples as f64;
    let cut = 10.0 / n;
    let mut cells: Vec<(Option<usize>, f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_p) = (0.0, 0.0);
    for (i, &p) in analytic.probs.iter().enumerate() {
        let obs = counts.get(i).copied().unwrap_or(0) as f64;
        if p < cut {
            pooled_obs += obs;
            pooled_p += p;
        } else {
            cells.push((Some(i), obs, p));
        }
    }
    pooled_obs += counts.iter().skip(analytic.probs.len()).sum::<u64>() as f64;
    pooled_p += (1.0 - analytic.probs.iter().sum::<f64>()).max(0.0);
    if pooled_obs > 0.0 || pooled_p > 0.0 {
        cells.push((None, pooled_obs, pooled_p));
    }
    if cells.len() < 2 {
        return Err(Error::DegreesOfFreedom(0));
    }
    let mut chi = 0.0;
    let mut bins = Vec::with_capacity(cells.len());
    for (label, obs, p) in cells {
        let expected = n * p;
        let se = (p * (1.0 - p) / n).sqrt();
        let emp = obs / n;
        let z = if se > 0.0 {
            (emp - p) / se
        } else if obs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        chi += if expected > 0.0 {
            (obs - expected).powi(2) / expected
        } else if obs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        bins.push(BinComparison {
            n: label,
            empirical: emp,
            analytic: p,
            std_error: se,
            z,
        });
    }
    let dof = bins.len() - 1;
    let p_value = if chi.is_finite() { chi_square_sf(chi, dof)? } else { 0.0 };
    let max_z = bins.iter().map(|b| b.z.abs()).fold(0.0, f64::max);
    Ok(ComparisonReport {
        pass: max_z <= max_abs_z && p_value >= min_p_value,
        bins,
        max_abs_z: max_z,
        chi_square: chi,
        dof,
        p_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityTest {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square test that two samples of counts share one law. Values whose
/// combined count is below 20 are pooled into a single cell.
pub fn homogeneity_test(a: &[u64], b: &[u64]) -> Result<HomogeneityTest> {
    let ha = histogram(a);
    let hb = histogram(b);
    let len = ha.len().max(hb.len());
    let get = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    let mut cells = Vec::new();
    let (mut ra, mut rb) = (0.0, 0.0);
    for i in 0..len {
        let (x, y) = (get(&ha, i), get(&hb, i));
        if x + y < 20.0 {
            ra += x;
            rb += y;
        } else {
            cells.push((x, y));
        }
    }
    if ra + rb > 0.0 {
        cells.push((ra, rb));
    }
    if cells.len() < 2 {
        return Err(Error::DegreesOfFreedom(0));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let chi: f64 = cells
        .iter()
        .map(|&(x, y)| {
            let pooled = (x + y) / (na + nb);
            let (ea, eb) = (pooled * na, pooled * nb);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    let dof = cells.len() - 1;
    Ok(HomogeneityTest {
        chi_square: chi,
        dof,
        p_value: chi_square_sf(chi, dof)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub mean: Estimate,
    pub variance: Estimate,
    pub mean_z: f64,
    pub variance_z: f64,
}

impl MomentCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        self.mean_z.abs() <= sigmas && self.variance_z.abs() <= sigmas
    }
}

/// Sample mean and variance against analytic values, in standard errors.
pub fn check_moments(draws: &[u64], mean_target: f64, variance_target: f64) -> MomentCheck {
    let xs: Vec<f64> = draws.iter().map(|&d| d as f64).collect();
    let m = mean(&xs);
    let v = variance(&xs);
    MomentCheck {
        mean_z: m.z_score(mean_target),
        variance_z: v.z_score(variance_target),
        mean: m,
        variance: v,
    }
}
