//! Autocorrelation diagnostics: i.i.d. increments sit inside the CLT noise
//! envelope at every positive lag, while the tower observable carries
//! structure, with both decay-model fits reported.
//!
//! Run: cargo run --release -p erlab --example autocorr

use erlab::experiments::autocorrelation;
use erlab::processes::example_tower_process;
use erlab::tower::Variant;
use erlab::ProcessSpec;

fn main() {
    let lags: Vec<u64> = vec![0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];

    let coin = ProcessSpec::rademacher(0xE21B4);
    let t1 = autocorrelation(&coin, 500_000, &lags).unwrap();
    println!("fair coin: variance = {:.4}", t1.variance);
    for (l, c) in t1.lags.iter().zip(&t1.values) {
        println!("  C({l:>2}) = {c:+.6}");
    }

    let tower =
        example_tower_process(2.0, 0.01, true, Variant::Perturbed, 1e-12, 0xE21B4).unwrap();
    let t2 = autocorrelation(&tower, 500_000, &lags).unwrap();
    println!("\ntower observable: variance = {:.4}", t2.variance);
    for (l, c) in t2.lags.iter().zip(&t2.values) {
        println!("  C({l:>2}) = {c:+.6}");
    }
    println!(
        "decay fits: semilog slope {:.4} (rms {:.3}), loglog slope {:.4} (rms {:.3})",
        t2.semilog.0, t2.semilog.1, t2.loglog.0, t2.loglog.1
    );
}
