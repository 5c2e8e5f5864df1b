//! The doubling map x -> 2x mod 1 via its exact Bernoulli bit coding.
//! Floating-point iteration shifts the mantissa out in ~53 steps and
//! collapses to 0; the sliding 64-bit window keeps the dynamics exact
//! forever by feeding fresh tape bits.
//!
//! Run: cargo run -p erlab --example doubling_coding

use erlab::{doubling_orbit_point, generate_series, ProcessSpec};

fn main() {
    // the coded point of a one-bit tape: x = 0.5, phi = cos(pi) = -1
    let mut bits = [false; 64];
    bits[0] = true;
    let x = doubling_orbit_point(&bits);
    println!("tape 100...0 codes x = {x}, cos(2 pi x) = {}", (2.0 * std::f64::consts::PI * x).cos());

    // naive f64 iteration dies; count the steps until it hits 0 exactly
    let mut y = 0.6243667384; // any finite binary expansion
    let mut steps = 0;
    while y != 0.0 && steps < 200 {
        y = (2.0 * y) % 1.0;
        steps += 1;
    }
    println!("naive f64 doubling reached exactly 0 after {steps} steps");

    // the coded orbit keeps fluctuating: sample means of cos(2 pi x_t)
    let spec = ProcessSpec::doubling(0xE21B4);
    for length in [1000, 100_000, 1_000_000] {
        let p = generate_series(&spec, length).unwrap();
        println!(
            "coded orbit: mean of cos over {length:>8} samples = {:+.6}",
            p.total() / length as f64
        );
    }
}
