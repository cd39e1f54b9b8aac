//! Monte Carlo draws checked against the analytic pmf and moments.

use cfpp::fractional::{frac_moments, frac_pmf, support_for_tail, FracProcess};
use cfpp::montecarlo::{
    check_moments, compare_pmf, histogram, homogeneity_test, simulate_classical, simulate_fractional,
    simulate_paths, ClassicalMethod, SimConfig,
};
use cfpp::processes::{PmfMethod, ProcessParams};

fn main() -> cfpp::Result<()> {
    let params = ProcessParams::poisson_logarithmic(1.0, 0.5)?;
    let proc = FracProcess::new(params.clone(), 0.6)?;
    let config = SimConfig::new(100_000, 42, 1.0)?;

    let draws = simulate_fractional(&proc, &config)?;
    let n = support_for_tail(&proc, config.horizon, 1e-9)?;
    let table = frac_pmf(&proc, config.horizon, n, PmfMethod::Convolution)?;
    let report = compare_pmf(&histogram(&draws), &table, draws.len())?;
    println!("{:>6} {:>10} {:>10} {:>7}", "n", "empirical", "analytic", "z");
    for bin in &report.bins {
        let label = bin.n.map_or("rest".to_string(), |n| n.to_string());
        println!("{label:>6} {:>10.5} {:>10.5} {:>7.2}", bin.empirical, bin.analytic, bin.z);
    }
    println!(
        "max |z| = {:.2}, chi-square = {:.2} on {} dof, p = {:.3}, pass = {}",
        report.max_abs_z, report.chi_square, report.dof, report.p_value, report.pass
    );

    let m = frac_moments(&proc, config.horizon)?;
    let check = check_moments(&draws, m.mean, m.variance);
    println!("moments: mean z = {:.2}, variance z = {:.2}", check.mean_z, check.variance_z);

    // The two classical samplers produce the same law.
    let a = simulate_classical(&params, ClassicalMethod::CompoundJumps, &config)?;
    let b = simulate_classical(&params, ClassicalMethod::Superposition, &SimConfig::new(100_000, 43, 1.0)?)?;
    let h = homogeneity_test(&a, &b)?;
    println!("classical samplers: chi-square {:.2} on {} dof, p = {:.3}", h.chi_square, h.dof, h.p_value);

    let paths = simulate_paths(&proc, &[1.0, 10.0, 100.0], &SimConfig::new(3, 7, 100.0)?)?;
    for p in paths {
        println!("path: {:?}", p.values);
    }
    Ok(())
}
