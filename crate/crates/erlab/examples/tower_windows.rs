//! Polynomial windows on the heavy-tailed tower: the phase diagram in tau.
//! Windows n^tau vanish when tau exceeds 1/(beta+1) (here 1/3) and persist at
//! the level alpha when tau is below 1/(beta+2) (here 1/4) — short windows
//! keep landing inside single long +1 runs.
//!
//! Run: cargo run --release -p erlab --example tower_windows

use erlab::processes::example_tower_process;
use erlab::tower::Variant;
use erlab::{er_scan, geometric_grid, WindowSchedule};

fn main() {
    let spec = example_tower_process(2.0, 0.01, true, Variant::Perturbed, 1e-12, 0xE21B4).unwrap();
    let grid = geometric_grid(4_000_000, 4.0, 10_000);

    for tau in [0.5, 0.4, 0.15] {
        let scan = er_scan(
            &spec,
            WindowSchedule::Polynomial { tau },
            0.5,
            &grid,
            None,
        )
        .unwrap();
        println!("tau = {tau}:");
        println!("{:>10} {:>6} {:>10}", "n", "k", "theta/k");
        for r in &scan.rows {
            println!("{:>10} {:>6} {:>10.4}", r.n, r.k, r.theta_over_k);
        }
        println!();
    }
}
