//! Distributions of the classical compound counting processes.

use cfpp::processes::{classical_moments, classical_pgf, classical_pmf, PmfMethod, ProcessParams};

fn main() -> cfpp::Result<()> {
    let processes = [
        ProcessParams::bell_touchard(1.0, 1.0)?,
        ProcessParams::poisson_logarithmic(1.0, 0.5)?,
        ProcessParams::polya_aeppli(1.0, 0.4, 2.0)?,
        ProcessParams::generalized_counting(vec![0.5, 0.3, 0.2])?,
    ];
    let t = 1.0;
    for params in &processes {
        println!("{params}");
        let reference = classical_pmf(params, t, 8, PmfMethod::Recurrence)?;
        for method in PmfMethod::ALL {
            let Ok(table) = classical_pmf(params, t, 8, method) else { continue };
            let gap = table.probs.iter().zip(&reference.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            println!("  {:<12} q(0..3) = {:.8?}  max gap to recurrence {gap:.1e}", method.name(), &table.probs[..4]);
        }
        let m = classical_moments(params, t)?;
        println!(
            "  mean {:.6}, variance {:.6}, G(0.5) = {:.8}, tail beyond n = 8: {:.2e}\n",
            m.mean,
            m.variance,
            classical_pgf(params, 0.5, t)?,
            reference.tail_bound
        );
    }
    Ok(())
}
