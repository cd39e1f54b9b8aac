//! Mean, variance and factorial moments; overdispersion in the fractional case.

use cfpp::fractional::{factorial_moment_fbtp, frac_moments, frac_pmf, FracProcess};
use cfpp::processes::{PmfMethod, ProcessParams};

fn main() -> cfpp::Result<()> {
    let params = ProcessParams::bell_touchard(1.0, 1.0)?;
    println!("{:>5} {:>6} {:>14} {:>14} {:>10}", "beta", "t", "mean", "variance", "Fano");
    for beta in [1.0, 0.7, 0.4] {
        let proc = FracProcess::new(params.clone(), beta)?;
        for t in [0.5, 2.0, 10.0] {
            let m = frac_moments(&proc, t)?;
            println!("{beta:>5} {t:>6} {:>14.6} {:>14.6} {:>10.4}", m.mean, m.variance, m.variance / m.mean);
        }
    }

    // Factorial moments from the closed form against a long pmf table.
    let (beta, t) = (0.6, 1.0);
    let proc = FracProcess::new(params, beta)?;
    let table = frac_pmf(&proc, t, 120, PmfMethod::Convolution)?;
    println!("\nfactorial moments at beta = {beta}, t = {t}:");
    for r in 1..=4 {
        println!(
            "  r = {r}: closed form {:.10}, from table {:.10}",
            factorial_moment_fbtp(1.0, 1.0, beta, r, t)?,
            table.factorial_moment(r)
        );
    }
    Ok(())
}
