//! The window law live: at the critical logarithmic window k(n) =
//! floor(ln n / I(alpha)) the maximal window average theta(n,k)/k tends to
//! alpha; the DDL statistic (theta k - alpha k)/ln k stays within
//! +-1/(2 t_alpha) asymptotically.
//!
//! Run: cargo run --release -p erlab --example er_scan_iid

use erlab::{er_scan, solve_t_alpha, DiscreteDistribution, ProcessSpec, WindowSchedule};

fn main() {
    let alpha = 0.5;
    let exact = solve_t_alpha(&DiscreteDistribution::rademacher(), alpha).unwrap();
    let spec = ProcessSpec::rademacher(0xE21B4);
    let grid: Vec<u64> = (3..=7).map(|p| 10u64.pow(p)).collect();
    let scan = er_scan(
        &spec,
        WindowSchedule::Logarithmic {
            i_alpha: exact.c_alpha,
        },
        alpha,
        &grid,
        Some(exact.t_alpha),
    )
    .unwrap();

    println!(
        "logarithmic windows at alpha = {alpha}: I = {:.7}, DDL reference 1/(2t) = {:.4}",
        exact.c_alpha,
        scan.ddl_reference.unwrap()
    );
    println!("{:>10} {:>6} {:>10} {:>12} {:>10}", "n", "k", "theta*k", "theta/k", "ddl");
    for r in &scan.rows {
        println!(
            "{:>10} {:>6} {:>10} {:>12.5} {:>10.4}",
            r.n,
            r.k,
            r.theta,
            r.theta_over_k,
            r.ddl_stat.unwrap()
        );
    }
}
