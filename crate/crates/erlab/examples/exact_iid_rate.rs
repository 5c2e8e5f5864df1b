//! Exact rate function of the fair +-1 coin three ways: the tilt minimizer,
//! the binary-entropy closed form, and the Legendre transform of the exact
//! SCGF. The three agree to ~1e-13, and the reciprocal of the rate sets the
//! critical window length k(n) = floor(ln n / I(alpha)).
//!
//! Run: cargo run -p erlab --example exact_iid_rate

use erlab::large_deviations::rademacher_rate_closed_form;
use erlab::{exact_scgf_table, legendre_transform, solve_t_alpha, DiscreteDistribution};

fn main() {
    let coin = DiscreteDistribution::rademacher();
    let t_grid: Vec<f64> = (-12_000..=12_000).map(|i| i as f64 * 1e-4).collect();
    let table = exact_scgf_table(&coin, &t_grid);

    println!(
        "{:>5} {:>12} {:>14} {:>14} {:>14} {:>10}",
        "alpha", "t_alpha", "c_alpha", "entropy form", "legendre", "k(1e6)"
    );
    for k in 1..=7 {
        let alpha = k as f64 / 10.0;
        let exact = solve_t_alpha(&coin, alpha).unwrap();
        let entropy = rademacher_rate_closed_form(alpha);
        let legendre = legendre_transform(&table, alpha).unwrap();
        let window = ((1e6f64).ln() / exact.c_alpha).floor();
        println!(
            "{alpha:>5} {:>12.7} {:>14.10} {:>14.10} {:>14.10} {window:>10}",
            exact.t_alpha, exact.c_alpha, entropy, legendre
        );
    }

    // outside the support there is no interior minimizer
    match solve_t_alpha(&coin, 1.0) {
        Err(e) => println!("\nalpha = 1.0 -> {e}"),
        Ok(_) => unreachable!(),
    }
}
