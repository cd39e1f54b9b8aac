//! Power-law decay of Corr(M(s), M(t)) in t for the fractional processes.

use cfpp::fractional::{correlation_decay, FracProcess};
use cfpp::processes::ProcessParams;

fn main() -> cfpp::Result<()> {
    let s = 1.0;
    let grid: Vec<f64> = (0..7).map(|i| 100.0 * 10f64.powf(i as f64 * 0.5)).collect();
    let processes = [
        ProcessParams::bell_touchard(1.0, 1.0)?,
        ProcessParams::poisson_logarithmic(1.0, 0.5)?,
        ProcessParams::polya_aeppli(1.0, 0.4, 2.0)?,
    ];
    for params in processes {
        for beta in [0.4, 0.6, 0.8, 1.0] {
            let report = correlation_decay(&FracProcess::new(params.clone(), beta)?, s, &grid)?;
            println!(
                "{params:<40} beta = {beta}: fitted exponent {:+.4}, c0 = {:.4}, corr at t = 1e5: {:.3e}",
                report.fitted_exponent,
                report.c0,
                report.corr.last().unwrap()
            );
        }
    }
    Ok(())
}
