//! Stable subordinator and its inverse: draws, paths and moments.

use cfpp::stats::{mean, variance};
use cfpp::subordinator::{sample_inverse_at, sample_inverse_path, sample_stable, y_mean, y_var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cfpp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (beta, t) = (0.6, 2.0);

    // Laplace transform of the stable law: E exp(-s D(t)) = exp(-t s^beta).
    let d: Vec<f64> = (0..50_000).map(|_| sample_stable(beta, t, &mut rng)).collect::<Result<_, _>>()?;
    let lt = mean(&d.iter().map(|x| (-x).exp()).collect::<Vec<_>>());
    println!("E exp(-D(t)) = {:.4} +/- {:.4}, exact {:.4}", lt.value, lt.std_error, (-t).exp());

    let y: Vec<f64> = (0..50_000).map(|_| sample_inverse_at(beta, t, &mut rng)).collect::<Result<_, _>>()?;
    let (m, v) = (mean(&y), variance(&y));
    println!("E Y(t)   = {:.4} +/- {:.4}, exact {:.4}", m.value, m.std_error, y_mean(beta, t)?);
    println!("Var Y(t) = {:.4} +/- {:.4}, exact {:.4}", v.value, v.std_error, y_var(beta, t)?);

    let times = [0.5, 1.0, 2.0, 4.0, 8.0];
    let path = sample_inverse_path(beta, &times, &mut rng)?;
    println!("\none path of Y:");
    for (t, y) in path.times.iter().zip(&path.values) {
        println!("  Y({t}) = {y:.5}");
    }
    Ok(())
}
