//! Evaluating the three-parameter Mittag-Leffler function.

use cfpp::specfun::{gamma_fn, ml3, ml3_scaled, MlArgs, DEFAULT_TOL};

fn main() -> cfpp::Result<()> {
    println!("E_{{1,1}}(x) against exp(x), absolute error:");
    for x in [-20.0, -1.0, 0.5, 3.0] {
        let v = ml3(&MlArgs::new(1.0, 1.0, 1.0, x)?, DEFAULT_TOL)?;
        println!("  x = {x:>4}: {v:.12e}  error {:.1e}", (v - f64::exp(x)).abs());
    }

    // Relaxation curves E_beta(-t^beta) for a few orders.
    println!("\nE_beta(-t^beta):");
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "beta=0.3", "beta=0.6", "beta=0.9");
    for t in [0.1, 1.0, 10.0, 100.0, 1e4] {
        let row: Vec<String> = [0.3, 0.6, 0.9]
            .iter()
            .map(|&b| {
                let v = ml3(&MlArgs::two_param(b, 1.0, -f64::powf(t, b)).unwrap(), DEFAULT_TOL).unwrap();
                format!("{v:>12.6e}")
            })
            .collect();
        println!("{t:>6} {}", row.join(" "));
    }

    // Far out on the negative axis the function decays algebraically.
    let (beta, x) = (0.5, -1e6);
    let v = ml3(&MlArgs::two_param(beta, 1.0, x)?, DEFAULT_TOL)?;
    println!("\nE_0.5(-1e6) = {v:.6e}, leading asymptote -1/(x Gamma(1-beta)) = {:.6e}", -1.0 / (x * gamma_fn(1.0 - beta)?));

    // Values too large for an absolute error bound can be scaled in log space.
    let args = MlArgs::new(0.8, 0.8, 2.0, 40.0)?;
    match ml3(&args, DEFAULT_TOL) {
        Ok(v) => println!("E^2_{{0.8,0.8}}(40) = {v:e}"),
        Err(e) => println!("unscaled: {e}"),
    }
    let scaled = ml3_scaled(&args, -120.0, DEFAULT_TOL)?;
    println!("e^-120 E^2_{{0.8,0.8}}(40) = {scaled:.6e}");
    Ok(())
}
