//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! non-zero status if any criterion fails.

use std::time::{Duration, Instant};

use cfpp::fractional::{
    certified_tail, correlation_decay, frac_moments, frac_pmf, support_for_tail, FracProcess,
};
use cfpp::montecarlo::{
    compare_pmf, histogram, par_draws, simulate_classical, simulate_fractional, simulate_paths, ClassicalMethod,
    FractionalSampler, SimConfig,
};
use cfpp::processes::{classical_moments, classical_pmf, mixture_pmf, PmfMethod, ProcessParams};
use cfpp::specfun::{ml3, ml3_scaled, MlArgs};
use cfpp::stats::{correlation, mean, variance};
use cfpp::subordinator::{sample_inverse_at, y_mean, y_var};

struct Outcome {
    pass: bool,
    detail: String,
}

fn settings() -> Vec<(&'static str, [ProcessParams; 2])> {
    vec![
        (
            "btp",
            [
                ProcessParams::bell_touchard(1.0, 1.0).unwrap(),
                ProcessParams::bell_touchard(0.5, 2.0).unwrap(),
            ],
        ),
        (
            "plp",
            [
                ProcessParams::poisson_logarithmic(1.0, 0.5).unwrap(),
                ProcessParams::poisson_logarithmic(2.0, 0.2).unwrap(),
            ],
        ),
        (
            "gpap",
            [
                ProcessParams::polya_aeppli(1.0, 0.4, 2.0).unwrap(),
                ProcessParams::polya_aeppli(1.5, 0.6, 0.5).unwrap(),
            ],
        ),
    ]
}

fn all_params() -> Vec<ProcessParams> {
    settings().into_iter().flat_map(|(_, ps)| ps).collect()
}

fn methods_for(p: &ProcessParams) -> Vec<PmfMethod> {
    let mut m = vec![
        PmfMethod::Partition,
        PmfMethod::Composition,
        PmfMethod::Convolution,
        PmfMethod::Theta,
        PmfMethod::Lambda,
    ];
    if p.tag() == "gpap" {
        m.push(PmfMethod::ClosedForm);
    }
    m
}

fn cross_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in all_params() {
        for beta in [0.3, 0.6, 0.9] {
            let proc = FracProcess::new(p.clone(), beta).unwrap();
            for t in [0.5, 1.0, 2.0] {
                let tables: Vec<Vec<f64>> = methods_for(&p)
                    .into_iter()
                    .map(|m| frac_pmf(&proc, t, 10, m).unwrap().probs)
                    .collect();
                for a in &tables {
                    for b in &tables {
                        for (x, y) in a.iter().zip(b) {
                            worst = worst.max((x - y).abs());
                        }
                    }
                }
                cases += 1;
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("{cases} (process, beta, t) cases, max pairwise gap {worst:.2e} (bound 1e-9)"),
    }
}

fn classical_reduction() -> Outcome {
    let mut worst = 0.0f64;
    for p in all_params() {
        for t in [0.5, 1.0, 2.0] {
            let reference = classical_pmf(&p, t, 20, PmfMethod::Recurrence).unwrap().probs;
            // The fractional counting kernel evaluated at beta = 1 through the
            // three-parameter Mittag-Leffler function, not the Poisson shortcut.
            let x = p.total_rate() * t;
            let kernel: Vec<f64> = (0..=20)
                .map(|k| {
                    let kf = k as f64;
                    let args = MlArgs::new(1.0, kf + 1.0, kf + 1.0, -x).unwrap();
                    ml3_scaled(&args, kf * x.ln(), 1e-13).unwrap()
                })
                .collect();
            let mut candidates = vec![frac_pmf(&FracProcess::new(p.clone(), 1.0).unwrap(), t, 20, PmfMethod::Convolution)
                .unwrap()
                .probs];
            for m in methods_for(&p) {
                candidates.push(mixture_pmf(&p, &kernel, m).unwrap());
            }
            for c in candidates {
                for (a, b) in c.iter().zip(&reference) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("beta = 1 tables vs recurrence, n <= 20, max gap {worst:.2e} (bound 1e-9)"),
    }
}

fn normalization() -> Outcome {
    let mut worst = 0.0f64;
    let mut tables = 0;
    for p in all_params() {
        for beta in [0.3, 0.6, 0.9, 1.0] {
            let proc = FracProcess::new(p.clone(), beta).unwrap();
            for t in [0.5, 1.0, 2.0] {
                let n = support_for_tail(&proc, t, 1e-9).unwrap();
                let table = frac_pmf(&proc, t, n, PmfMethod::Convolution).unwrap();
                let tail = certified_tail(&proc, t, n).unwrap();
                worst = worst.max((table.total() + tail - 1.0).abs());
                tables += 1;
            }
        }
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("{tables} tables, max |sum + certified tail - 1| = {worst:.2e} (bound 1e-8)"),
    }
}

fn subordinator_laws() -> Outcome {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (i, beta) in [0.3, 0.5, 0.7, 0.9].into_iter().enumerate() {
        let t = 1.5;
        let ys = par_draws(100_000, 400 + i as u64, |rng| sample_inverse_at(beta, t, rng)).unwrap();
        let mut z = vec![
            mean(&ys).z_score(y_mean(beta, t).unwrap()),
            variance(&ys).z_score(y_var(beta, t).unwrap()),
        ];
        for s in [0.5, 1.0, 2.0] {
            let e: Vec<f64> = ys.iter().map(|y| (-s * y).exp()).collect();
            let target = ml3(&MlArgs::two_param(beta, 1.0, -s * t.powf(beta)).unwrap(), 1e-13).unwrap();
            z.push(mean(&e).z_score(target));
        }
        checks += z.len();
        worst = z.iter().fold(worst, |w, v| w.max(v.abs()));
    }
    Outcome {
        pass: worst <= 3.0,
        detail: format!("{checks} Laplace/mean/variance checks, max |z| = {worst:.2} (bound 3)"),
    }
}

/// The draws shared by the distribution and moment criteria.
struct McRun {
    label: String,
    proc: FracProcess,
    t: f64,
    draws: Vec<u64>,
}

fn mc_runs() -> Vec<McRun> {
    let mut runs = Vec::new();
    let mut seed = 1000;
    for p in all_params() {
        for beta in [0.6, 1.0] {
            let proc = FracProcess::new(p.clone(), beta).unwrap();
            for t in [0.5, 2.0] {
                seed += 1;
                let cfg = SimConfig::new(100_000, seed, t).unwrap();
                let draws = if beta == 1.0 {
                    simulate_classical(&p, ClassicalMethod::CompoundJumps, &cfg).unwrap()
                } else {
                    simulate_fractional(&proc, &cfg).unwrap()
                };
                runs.push(McRun {
                    label: format!("{p} beta={beta} t={t}"),
                    proc: proc.clone(),
                    t,
                    draws,
                });
            }
        }
    }
    runs
}

fn analytic_table(proc: &FracProcess, t: f64) -> cfpp::processes::PmfTable {
    let n = support_for_tail(proc, t, 1e-10).unwrap();
    frac_pmf(proc, t, n, PmfMethod::Convolution).unwrap()
}

fn distribution_match(runs: &[McRun]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst_z = 0.0f64;
    let mut min_p = 1.0f64;
    let mut power_ok = true;
    for run in runs {
        let counts = histogram(&run.draws);
        let report = compare_pmf(&counts, &analytic_table(&run.proc, run.t), run.draws.len()).unwrap();
        worst_z = worst_z.max(report.max_abs_z);
        min_p = min_p.min(report.p_value);
        if !report.pass {
            failures.push(run.label.clone());
        }
        let shifted = if run.proc.beta == 1.0 { 0.7 } else { 0.3 };
        let wrong = FracProcess::new(run.proc.params.clone(), shifted).unwrap();
        let mismatch = compare_pmf(&counts, &analytic_table(&wrong, run.t), run.draws.len()).unwrap();
        power_ok &= !mismatch.pass;
    }
    Outcome {
        pass: failures.is_empty() && power_ok,
        detail: format!(
            "{} runs of 1e5 draws, max |z| = {worst_z:.2}, min p = {min_p:.3}, beta-shift 0.3 rejected in every run: {power_ok}{}",
            runs.len(),
            if failures.is_empty() { String::new() } else { format!("; failed: {failures:?}") }
        ),
    }
}

fn moments(runs: &[McRun]) -> Outcome {
    let mut worst = 0.0f64;
    for run in runs {
        let m = frac_moments(&run.proc, run.t).unwrap();
        if run.proc.beta == 1.0 {
            let c = classical_moments(&run.proc.params, run.t).unwrap();
            assert!((c.mean - m.mean).abs() < 1e-12 && (c.variance - m.variance).abs() < 1e-12);
        }
        let check = cfpp::montecarlo::check_moments(&run.draws, m.mean, m.variance);
        worst = worst.max(check.mean_z.abs()).max(check.variance_z.abs());
    }
    let mut overdispersed = true;
    let mut grid_points = 0;
    for p in all_params() {
        for beta in [0.1, 0.3, 0.5, 0.6, 0.7, 0.9, 1.0] {
            let proc = FracProcess::new(p.clone(), beta).unwrap();
            for t in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e4] {
                let m = frac_moments(&proc, t).unwrap();
                overdispersed &= m.variance - m.mean > 0.0;
                grid_points += 1;
            }
        }
    }
    let gcp = ProcessParams::generalized_counting(vec![0.5, 1.0, 0.25]).unwrap();
    for t in [0.1, 1.0, 10.0] {
        let m = classical_moments(&gcp, t).unwrap();
        overdispersed &= m.variance - m.mean > 0.0;
        grid_points += 1;
    }
    Outcome {
        pass: worst <= 3.0 && overdispersed,
        detail: format!(
            "{} mean/variance pairs, max |z| = {worst:.2} (bound 3); Var - E > 0 at all {grid_points} grid points: {overdispersed}",
            runs.len()
        ),
    }
}

fn lrd() -> (Outcome, Duration) {
    let start = Instant::now();
    let grid: Vec<f64> = (0..7).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect();
    let mut worst = 0.0f64;
    let mut info = 0.0f64;
    for p in all_params() {
        for beta in [0.4, 0.5, 0.6, 0.7, 0.8] {
            let r = correlation_decay(&FracProcess::new(p.clone(), beta).unwrap(), 1.0, &grid).unwrap();
            worst = worst.max((r.fitted_exponent + beta).abs());
        }
        for beta in [0.2, 0.3, 0.9] {
            let r = correlation_decay(&FracProcess::new(p.clone(), beta).unwrap(), 1.0, &grid).unwrap();
            info = info.max((r.fitted_exponent + beta).abs());
        }
    }
    let analytic_time = start.elapsed();

    let proc = FracProcess::new(ProcessParams::bell_touchard(1.0, 1.0).unwrap(), 0.6).unwrap();
    let cfg = SimConfig::new(100_000, 77, 1.0).unwrap();
    let paths = simulate_paths(&proc, &[1.0, 100.0, 1000.0], &cfg).unwrap();
    let column = |i: usize| paths.iter().map(|s| s.values[i] as f64).collect::<Vec<f64>>();
    let (m1, m100, m1000) = (column(0), column(1), column(2));
    let mc_slope = (correlation(&m1, &m1000) / correlation(&m1, &m100)).ln() / 10f64.ln();
    let total = start.elapsed();
    (
        Outcome {
            pass: worst <= 0.02 && (mc_slope + 0.6).abs() <= 0.1 && analytic_time < Duration::from_secs(1),
            detail: format!(
                "analytic slope gap {worst:.4} over beta in [0.4, 0.8] (bound 0.02, computed in {analytic_time:.2?}); \
                 MC path slope {mc_slope:.3} at beta = 0.6 (bound -0.6 +/- 0.1); \
                 info: gap at beta in {{0.2, 0.3, 0.9}} is {info:.4}"
            ),
        },
        total,
    )
}

/// Integral of `f` over `(0, inf)` by exp-sinh quadrature.
fn integrate_half_line(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    for k in -448..=320 {
        let tau = k as f64 * h;
        let t = (half_pi * tau.sinh()).exp();
        if t == 0.0 || !t.is_finite() {
            continue;
        }
        let w = t * half_pi * tau.cosh();
        sum += f(t) * w;
    }
    sum * h
}

fn special_functions() -> Outcome {
    let mut erfc_gap = 0.0f64;
    for i in 0..=500 {
        let x = -5.0 + i as f64 * 0.01;
        let v = ml3(&MlArgs::two_param(0.5, 1.0, x).unwrap(), 1e-12).unwrap();
        let oracle = (x * x).exp() * libm::erfc(-x);
        erfc_gap = erfc_gap.max((v - oracle).abs());
    }
    let (mut exp_gap, mut exp_rel) = (0.0f64, 0.0f64);
    for i in 0..=3500 {
        let x = -30.0 + i as f64 * 0.01;
        let v = ml3(&MlArgs::new(1.0, 1.0, 1.0, x).unwrap(), 1e-12).unwrap();
        exp_gap = exp_gap.max((v - x.exp()).abs());
        exp_rel = exp_rel.max(((v - x.exp()) / x.exp()).abs());
    }
    // (alpha, beta, gamma, x, s) with s > |x|^(1/alpha)
    let grid = [
        (0.5, 1.0, 1.0, -1.0, 1.5),
        (0.5, 0.5, 1.0, -2.0, 1.0),
        (0.5, 1.5, 2.0, -1.0, 2.0),
        (0.7, 1.0, 1.0, -0.5, 1.0),
        (0.7, 1.7, 3.0, -1.0, 2.0),
        (0.8, 0.8, 2.0, 0.5, 2.0),
        (0.9, 1.0, 1.0, -3.0, 4.0),
        (1.0, 1.0, 1.0, -1.0, 1.5),
        (1.0, 2.0, 2.0, 0.5, 1.0),
        (0.3, 1.0, 1.0, -1.0, 1.5),
        (0.6, 2.2, 1.5, -2.0, 3.5),
        (0.95, 1.3, 0.5, -1.5, 2.0),
    ];
    let mut laplace_gap = 0.0f64;
    for (alpha, beta, gamma, x, s) in grid {
        // e^{-st} t^{beta-1} E(x t^alpha), with the prefactor folded into the scaled evaluation
        let lhs = integrate_half_line(|t| {
            let args = MlArgs::new(alpha, beta, gamma, x * t.powf(alpha)).unwrap();
            ml3_scaled(&args, -s * t + (beta - 1.0) * t.ln(), 1e-13).unwrap_or(f64::NAN)
        });
        let rhs = s.powf(alpha * gamma - beta) / (s.powf(alpha) - x).powf(gamma);
        laplace_gap = laplace_gap.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Outcome {
        pass: erfc_gap <= 1e-9 && exp_gap <= 1e-12 && laplace_gap <= 1e-6,
        detail: format!(
            "erfc identity gap {erfc_gap:.2e} (bound 1e-9); exp gap {exp_gap:.2e} (bound 1e-12, relative {exp_rel:.1e}); \
             Laplace pair gap {laplace_gap:.2e} over {} points (bound 1e-6)",
            grid.len()
        ),
    }
}

fn brownian_time() -> Outcome {
    let proc = FracProcess::new(ProcessParams::bell_touchard(1.0, 1.0).unwrap(), 0.5).unwrap();
    let sampler = FractionalSampler::new(&proc, 1e-12).unwrap();
    let t = 1.0;
    let draws = par_draws(100_000, 9, |rng| sampler.sample_brownian_time(t, rng)).unwrap();
    let table = analytic_table(&proc, t);
    let report = compare_pmf(&histogram(&draws), &table, draws.len()).unwrap();
    // Unit-variance Brownian clock, for contrast.
    let classical = FracProcess::new(proc.params.clone(), 1.0).unwrap();
    let unit = FractionalSampler::new(&classical, 1e-12).unwrap();
    let unit_draws = par_draws(100_000, 10, |rng| {
        use rand::Rng;
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        unit.sample(z.abs() * t.sqrt(), rng)
    })
    .unwrap();
    let unit_report = compare_pmf(&histogram(&unit_draws), &table, unit_draws.len()).unwrap();
    Outcome {
        pass: report.pass,
        detail: format!(
            "M(|B(t)|) with Var B(t) = 2t: chi-square p = {:.3}, max |z| = {:.2}; info: Var B(t) = t gives p = {:.1e}",
            report.p_value, report.max_abs_z, unit_report.p_value
        ),
    }
}

fn main() {
    let mut all_pass = true;
    let mut report = |id: u32, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> (Outcome, Duration)| {
        let (outcome, elapsed) = f();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = outcome.pass && in_time;
        all_pass &= pass;
        let limit_text = limit.map_or(String::new(), |l| format!(" / limit {l:.0?}"));
        println!(
            "ACCEPTANCE {id} {name}: {} ({}; {elapsed:.2?}{limit_text})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        (o, start.elapsed())
    };

    report(1, "cross-form pmf equivalence", Some(Duration::from_secs(60)), &mut || timed(&cross_form));
    report(2, "classical reduction", Some(Duration::from_secs(5)), &mut || timed(&classical_reduction));
    report(3, "normalization", None, &mut || timed(&normalization));
    report(4, "subordinator laws", Some(Duration::from_secs(30)), &mut || timed(&subordinator_laws));
    let start = Instant::now();
    let runs = mc_runs();
    let sampling = start.elapsed();
    report(5, "Monte Carlo distribution match", Some(Duration::from_secs(120)), &mut || {
        let (o, d) = timed(&|| distribution_match(&runs));
        (o, d + sampling)
    });
    report(6, "moments and overdispersion", None, &mut || timed(&|| moments(&runs)));
    report(7, "LRD slope", Some(Duration::from_secs(301)), &mut lrd);
    report(8, "special-function oracle", None, &mut || timed(&special_functions));
    report(9, "Brownian-time check", None, &mut || timed(&brownian_time));

    if !all_pass {
        std::process::exit(1);
    }
}
