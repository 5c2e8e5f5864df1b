//! Crude Monte Carlo exceedance regression: -ln P(S_n >= n alpha) against n
//! has slope ~ I(alpha) in the exponential regime. No importance sampling:
//! bins the replica budget cannot resolve stay visible as errors.
//!
//! Run: cargo run --release -p erlab --example tail_regression

use erlab::large_deviations::rademacher_rate_closed_form;
use erlab::{tail_fit, DiscreteDistribution, ProcessSpec, TailModel};

fn main() {
    let spec = ProcessSpec::rademacher(0xE21B4);
    let alpha = 0.5;
    let grid = [8u64, 16, 24, 32, 40, 48];
    let fit = tail_fit(&spec, alpha, &grid, 200_000, TailModel::Exponential).unwrap();

    println!("{:>5} {:>12}", "n", "p_hat");
    for (n, p) in fit.n_grid.iter().zip(&fit.p_hat) {
        println!("{n:>5} {p:>12.6}");
    }
    let exact = rademacher_rate_closed_form(alpha);
    println!(
        "\nslope = {:.5} vs I({alpha}) = {exact:.5} ({:+.1}%), rms residual {:.3}",
        fit.slope,
        100.0 * (fit.slope / exact - 1.0),
        fit.residual
    );

    // a process that never exceeds the level errors instead of fitting noise
    let constant = ProcessSpec::iid(DiscreteDistribution::constant(0.0).unwrap(), 1);
    match tail_fit(&constant, alpha, &grid[..5], 1000, TailModel::Exponential) {
        Err(e) => println!("constant-zero process -> {e}"),
        Ok(_) => unreachable!(),
    }
}
