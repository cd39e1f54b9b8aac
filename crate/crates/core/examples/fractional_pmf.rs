//! Distributions of the time-fractional processes, with certified truncation.

use cfpp::fractional::{certified_tail, frac_pgf, frac_pmf, support_for_tail, waiting_time_survival, FracProcess};
use cfpp::processes::{PmfMethod, ProcessParams};

fn main() -> cfpp::Result<()> {
    let params = ProcessParams::poisson_logarithmic(2.0, 0.2)?;
    let t = 1.5;
    for beta in [1.0, 0.8, 0.5, 0.3] {
        let proc = FracProcess::new(params.clone(), beta)?;
        let n = support_for_tail(&proc, t, 1e-10)?;
        let table = frac_pmf(&proc, t, n, PmfMethod::Convolution)?;
        println!(
            "beta = {beta}: N = {n:>3}, sum = {:.12}, certified tail {:.1e}, q(0) = {:.6}, G(0.5) = {:.6}",
            table.total(),
            certified_tail(&proc, t, n)?,
            table.probs[0],
            frac_pgf(&proc, 0.5, t)?
        );
    }

    // Enumerative and closed forms agree on small n.
    let proc = FracProcess::new(ProcessParams::polya_aeppli(1.0, 0.4, 2.0)?, 0.6)?;
    println!("\nfractional Polya-Aeppli, beta = 0.6, t = 1:");
    for method in [PmfMethod::ClosedForm, PmfMethod::Partition, PmfMethod::Composition, PmfMethod::Convolution] {
        let table = frac_pmf(&proc, 1.0, 6, method)?;
        println!("  {:<12} {:.10?}", method.name(), table.probs);
    }

    println!("\nPr{{no jump by t}}:");
    for t in [0.1, 1.0, 10.0, 100.0] {
        println!("  t = {t:>5}: {:.6e}", waiting_time_survival(&proc, t)?);
    }
    Ok(())
}
