//! Index sets behind the pmf sums: partitions, compositions and convolution powers.

use cfpp::combinat::{conv_power, enum_compositions, enum_lambda, enum_omega, enum_theta, ConvolutionPowers};

fn main() -> cfpp::Result<()> {
    let n = 6;
    println!("partitions of {n} as multiplicity vectors (x_1, ..., x_n):");
    for v in enum_omega(n)? {
        println!("  {:?}  parts = {}", v.counts(), v.part_count());
    }

    println!("\ncounts by number of parts k:");
    for k in 1..=n {
        let theta = enum_theta(n, k)?.count();
        let lambda: Vec<_> = enum_lambda(n, k)?.map(|v| v.counts().to_vec()).collect();
        let comps = enum_compositions(n, k)?.count();
        println!("  k = {k}: partitions {theta}, compositions {comps}, truncated vectors {lambda:?}");
    }

    // Law of X_1 + X_2 + X_3 for a geometric jump law.
    let p: f64 = 0.4;
    let c = |j: usize| if j == 0 { 0.0 } else { (1.0 - p) * p.powi(j as i32 - 1) };
    println!("\nPr{{X_1 + X_2 + X_3 = n}} for geometric jumps:");
    for n in 3..=8 {
        println!("  n = {n}: {:.10}", conv_power(c, 3, n)?);
    }

    // The table form shares work across all k and n.
    let jump: Vec<f64> = (0..=30).map(c).collect();
    let powers = ConvolutionPowers::new(&jump, 5, 30);
    let mass: f64 = (5..=30).map(|n| powers.mass(5, n)).sum();
    println!("mass of the fivefold convolution on n <= 30: {mass:.12}");
    Ok(())
}
