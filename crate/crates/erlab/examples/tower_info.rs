//! Build the example tower (base masses i^-(beta+2), heights 2i) and inspect
//! its measure tables: normalizers, per-column masses, the return-time tail
//! and its log-log slope, which recovers -beta.
//!
//! Run: cargo run -p erlab --example tower_info

use erlab::YoungTower;

fn main() {
    let beta = 2.0;
    let tower = YoungTower::build_example(beta, 0.0, false, 1e-12).unwrap();

    println!(
        "beta = {beta}: {} columns tabulated, Zbar = {:.12}, Zdelta = {:.12}",
        tower.i_max(),
        tower.zbar(),
        tower.zdelta()
    );
    println!("mean return time = {:.6}", tower.mean_return_time());
    println!("\n{:>3} {:>12} {:>5} {:>12} {:>12}", "i", "m_i", "R_i", "nu_bar", "nu_delta");
    for i in 1..=10 {
        println!(
            "{i:>3} {:>12.4e} {:>5} {:>12.8} {:>12.8}",
            tower.mass(i),
            tower.height(i),
            tower.nu_bar(i),
            tower.nu_delta_column(i)
        );
    }

    let grid: Vec<u64> = (4..=14).map(|p| 1u64 << p).collect();
    println!("\n{:>6} {:>14}", "n", "nu(R > n)");
    for &n in &grid {
        println!("{n:>6} {:>14.6e}", tower.tail_probability(n));
    }
    println!(
        "log-log slope over the grid = {:.4} (tail exponent -beta = {})",
        tower.tail_loglog_slope(&grid),
        -beta
    );

    // the mixing modification flips column 3 to height 3
    let modified = YoungTower::build_example(beta, 0.01, true, 1e-12).unwrap();
    println!(
        "\nmodified tower: R_3 = {}, Zdelta' = {:.12}",
        modified.height(3),
        modified.zdelta()
    );
}
