//! Stationary, seeded, reproducible observable series.
//!
//! Three source families are exposed uniformly as bounded real increment
//! streams with prefix sums: bounded discrete i.i.d. draws, the doubling map
//! under its exact Bernoulli bit coding with the observable cos(2 pi x), and
//! Young-tower observables started from the exact stationary law.
//!
//! Determinism contract: a [`ProcessSpec`] (kind + 64-bit seed) pins every
//! emitted sample. Streams consume randomness in a fixed per-sample order,
//! so a longer run re-emits any shorter run as a prefix.

use std::sync::Arc;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::seeding::{stream_for, unit_f64, Stream};
pub use crate::seeding::{domain_seed, split_seed};
use crate::tower::{TowerObservable, Variant, YoungTower};

/// Default master seed for published tables; replica streams are split off it.
pub const DEFAULT_MASTER_SEED: u64 = 0xE21B4;

/// A bounded discrete distribution given by atoms and probabilities.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    cum: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates: equal nonempty lengths, finite values, probabilities
    /// nonnegative and summing to 1 within 1e-12.
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty value list".into()));
        }
        if values.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite value".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cum.push(acc);
        }
        Ok(Self { values, probs, cum })
    }

    /// Fair +-1 coin.
    pub fn rademacher() -> Self {
        Self::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    /// Point mass at `v`.
    pub fn constant(v: f64) -> Result<Self> {
        Self::new(vec![v], vec![1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }

    /// Largest atom with positive probability.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// sup |X| over the support.
    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// At least two distinct atoms carry positive probability.
    pub fn is_non_degenerate(&self) -> bool {
        let mut first: Option<f64> = None;
        for (&v, &p) in self.values.iter().zip(&self.probs) {
            if p > 0.0 {
                match first {
                    None => first = Some(v),
                    Some(f) if f != v => return true,
                    _ => {}
                }
            }
        }
        false
    }

    /// Inverse-CDF draw using one uniform.
    pub fn sample(&self, rng: &mut impl RngCore) -> f64 {
        let u = unit_f64(rng);
        let idx = self.cum.partition_point(|&c| c <= u);
        self.values[idx.min(self.values.len() - 1)]
    }
}

/// The source family of a series.
#[derive(Debug, Clone)]
pub enum ProcessKind {
    /// i.i.d. draws from a bounded discrete distribution.
    Iid(DiscreteDistribution),
    /// Doubling map x -> 2x mod 1 via its 64-bit Bernoulli coding, observable
    /// cos(2 pi x).
    DoublingCos,
    /// Young-tower observable from the exact stationary start.
    Tower(TowerObservable),
}

/// A fully seeded series source.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub seed: u64,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn iid(dist: DiscreteDistribution, seed: u64) -> Self {
        Self::new(ProcessKind::Iid(dist), seed)
    }

    pub fn rademacher(seed: u64) -> Self {
        Self::iid(DiscreteDistribution::rademacher(), seed)
    }

    pub fn doubling(seed: u64) -> Self {
        Self::new(ProcessKind::DoublingCos, seed)
    }

    pub fn tower(obs: TowerObservable, seed: u64) -> Self {
        Self::new(ProcessKind::Tower(obs), seed)
    }

    /// Same source, fresh seed (cheap: tower tables are shared).
    pub fn reseeded(&self, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed,
        }
    }

    /// Bound on |increment|.
    pub fn sup_abs(&self) -> f64 {
        match &self.kind {
            ProcessKind::Iid(d) => d.sup_abs(),
            ProcessKind::DoublingCos => 1.0,
            ProcessKind::Tower(obs) => obs.sup_abs(),
        }
    }

    /// The infinite increment stream for this spec.
    pub fn stream(&self) -> SeriesStream {
        let rng = stream_for(self.seed);
        match &self.kind {
            ProcessKind::Iid(d) => SeriesStream::Iid(IidStream {
                dist: d.clone(),
                rng,
            }),
            ProcessKind::DoublingCos => SeriesStream::Doubling(DoublingStream::new(rng)),
            ProcessKind::Tower(obs) => SeriesStream::Tower(TowerStream::new(obs.clone(), rng)),
        }
    }
}

/// Cumulative Birkhoff sums P[0..=n] with P[0] = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSums {
    p: Vec<f64>,
}

impl PrefixSums {
    pub fn from_increments<I: IntoIterator<Item = f64>>(increments: I) -> Self {
        let it = increments.into_iter();
        let mut p = Vec::with_capacity(it.size_hint().0 + 1);
        p.push(0.0);
        let mut s = 0.0;
        for x in it {
            s += x;
            p.push(s);
        }
        Self { p }
    }

    /// Number of increments.
    pub fn n(&self) -> usize {
        self.p.len() - 1
    }

    /// The prefix array P[0..=n].
    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// Increment j (0-based): P[j+1] - P[j].
    pub fn increment(&self, j: usize) -> f64 {
        self.p[j + 1] - self.p[j]
    }

    /// Window sum S_{j+k} - S_j.
    pub fn window_sum(&self, j: usize, k: usize) -> f64 {
        self.p[j + k] - self.p[j]
    }

    /// S_n, the full sum.
    pub fn total(&self) -> f64 {
        *self.p.last().unwrap()
    }
}

/// Draw a length-`length` realization of the process as prefix sums.
///
/// Deterministic in (spec, length); a longer run extends a shorter one
/// sample-for-sample.
pub fn generate_series(spec: &ProcessSpec, length: usize) -> Result<PrefixSums> {
    if length == 0 {
        return Err(Error::Argument("series length must be >= 1".into()));
    }
    Ok(PrefixSums::from_increments(spec.stream().take(length)))
}

/// The point of [0, 1) coded by 64 fair bits: x = sum b_m 2^-m.
///
/// The return value is the 53-bit truncation of the 64-bit fraction, so it
/// always lies in [0, 1) and is within 2^-53 of the exact dyadic sum.
pub fn doubling_orbit_point(bits: &[bool; 64]) -> f64 {
    let mut w: u64 = 0;
    for &b in bits {
        w = (w << 1) | u64::from(b);
    }
    window_to_unit(w)
}

#[inline]
fn window_to_unit(w: u64) -> f64 {
    (w >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Infinite increment stream of a process.
pub enum SeriesStream {
    Iid(IidStream),
    Doubling(DoublingStream),
    Tower(TowerStream),
}

impl Iterator for SeriesStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(match self {
            SeriesStream::Iid(s) => s.dist.sample(&mut s.rng),
            SeriesStream::Doubling(s) => s.step(),
            SeriesStream::Tower(s) => s.step(),
        })
    }
}

pub struct IidStream {
    dist: DiscreteDistribution,
    rng: Stream,
}

/// Sliding 64-bit window over an i.i.d. fair bit tape. One step shifts in
/// one tape bit, which realizes x -> 2x mod 1 exactly on the bit coding;
/// naive floating-point iteration would collapse to 0 after ~53 steps.
pub struct DoublingStream {
    window: u64,
    buf: u64,
    bits_left: u8,
    rng: Stream,
}

impl DoublingStream {
    fn new(mut rng: Stream) -> Self {
        let window = rng.next_u64();
        Self {
            window,
            buf: 0,
            bits_left: 0,
            rng,
        }
    }

    #[inline]
    fn next_bit(&mut self) -> u64 {
        if self.bits_left == 0 {
            self.buf = self.rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.buf >> 63;
        self.buf <<= 1;
        self.bits_left -= 1;
        bit
    }

    #[inline]
    fn step(&mut self) -> f64 {
        let x = window_to_unit(self.window);
        self.window = (self.window << 1) | self.next_bit();
        (2.0 * std::f64::consts::PI * x).cos()
    }

    /// Current 64-bit window (exposed for the coding/doubling cross-check).
    pub fn window(&self) -> u64 {
        self.window
    }
}

/// Tower orbit from the exact stationary start; the hot loop tracks only
/// (column, level) and draws one uniform per base return.
pub struct TowerStream {
    obs: TowerObservable,
    column: u32,
    level: u32,
    rng: Stream,
}

impl TowerStream {
    fn new(obs: TowerObservable, mut rng: Stream) -> Self {
        let start = obs.tower().sample_stationary(&mut rng);
        Self {
            column: start.column(),
            level: start.level(),
            obs,
            rng,
        }
    }

    #[inline]
    fn step(&mut self) -> f64 {
        let v = self.obs.value(self.column, self.level);
        let h = self.obs.tower().height(self.column);
        if self.level + 1 < h {
            self.level += 1;
        } else {
            self.column = self.obs.tower().sample_base_column(&mut self.rng);
            self.level = 0;
        }
        v
    }
}

/// Convenience constructor for the example-tower process.
pub fn example_tower_process(
    beta: f64,
    kappa: f64,
    modified: bool,
    variant: Variant,
    tol: f64,
    seed: u64,
) -> Result<ProcessSpec> {
    let tower = Arc::new(YoungTower::build_example(beta, kappa, modified, tol)?);
    let obs = TowerObservable::new(tower, variant)?;
    Ok(ProcessSpec::tower(obs, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::DEFAULT_TOWER_TOL;

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            DiscreteDistribution::new(vec![], vec![]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(vec![1.0], vec![0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(vec![1.0], vec![-1.0]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            DiscreteDistribution::new(vec![f64::NAN], vec![1.0]),
            Err(Error::InvalidDistribution(_))
        ));
        let d = DiscreteDistribution::rademacher();
        assert!(d.is_non_degenerate());
        assert_eq!(d.mean(), 0.0);
        assert_eq!(d.max_value(), 1.0);
        assert_eq!(d.sup_abs(), 1.0);
        assert!(!DiscreteDistribution::constant(0.0).unwrap().is_non_degenerate());
    }

    #[test]
    fn sup_abs_ignores_zero_probability_atoms() {
        let d = DiscreteDistribution::new(vec![0.0, 5.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(d.sup_abs(), 0.0);
        assert_eq!(d.max_value(), 0.0);
    }

    #[test]
    fn degenerate_constant_series() {
        let spec = ProcessSpec::iid(DiscreteDistribution::constant(0.0).unwrap(), 7);
        let p = generate_series(&spec, 5).unwrap();
        assert_eq!(p.values(), &[0.0; 6]);
    }

    #[test]
    fn rademacher_parity_forced() {
        let spec = ProcessSpec::rademacher(0xFEED);
        let p = generate_series(&spec, 257).unwrap();
        for j in 0..p.n() {
            let x = p.increment(j);
            assert!(x == 1.0 || x == -1.0);
        }
        // P[n] = n mod 2 parity: sums of n +-1 terms have the parity of n
        let total = p.total() as i64;
        assert_eq!(total.rem_euclid(2), 257 % 2);
    }

    #[test]
    fn zero_length_rejected() {
        let spec = ProcessSpec::rademacher(1);
        assert!(matches!(generate_series(&spec, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn reproducible_and_prefix_stable() {
        for spec in [
            ProcessSpec::rademacher(42),
            ProcessSpec::doubling(42),
            example_tower_process(2.0, 0.01, true, Variant::Perturbed, DEFAULT_TOWER_TOL, 42)
                .unwrap(),
        ] {
            let a = generate_series(&spec, 500).unwrap();
            let b = generate_series(&spec, 500).unwrap();
            assert_eq!(a.values(), b.values(), "two runs differ");
            let longer = generate_series(&spec, 800).unwrap();
            assert_eq!(&longer.values()[..501], a.values(), "prefix violated");
        }
    }

    #[test]
    fn increments_bounded_by_sup() {
        for spec in [
            ProcessSpec::rademacher(3),
            ProcessSpec::doubling(3),
            example_tower_process(2.0, 0.01, true, Variant::Perturbed, DEFAULT_TOWER_TOL, 3)
                .unwrap(),
        ] {
            let bound = spec.sup_abs();
            let p = generate_series(&spec, 2000).unwrap();
            for j in 0..p.n() {
                assert!(p.increment(j).abs() <= bound + 1e-15);
            }
        }
    }

    #[test]
    fn doubling_point_examples() {
        let zeros = [false; 64];
        assert_eq!(doubling_orbit_point(&zeros), 0.0);
        let mut half = [false; 64];
        half[0] = true;
        assert_eq!(doubling_orbit_point(&half), 0.5);
        let x = doubling_orbit_point(&half);
        assert_eq!((2.0 * std::f64::consts::PI * x).cos(), -1.0);
    }

    #[test]
    fn sliding_window_equals_arithmetic_doubling() {
        // Oracle: on the same bit tape, the next window is exactly
        // (window << 1) | new_bit, i.e. doubling mod 1 up to the appended
        // 2^-64 bit. The check is integer-exact over 50 steps.
        let spec = ProcessSpec::doubling(0xB17);
        let mut s = match spec.stream() {
            SeriesStream::Doubling(d) => d,
            _ => unreachable!(),
        };
        for _ in 0..50 {
            let w = s.window();
            s.step();
            let w2 = s.window();
            assert_eq!(w2 & !1u64, w << 1, "window slide is not arithmetic doubling");
        }
    }

    #[test]
    fn doubling_mean_within_five_standard_errors() {
        let spec = ProcessSpec::doubling(0x5EED);
        let p = generate_series(&spec, 1_000_000).unwrap();
        let n = p.n() as f64;
        let mean = p.total() / n;
        let mut var = 0.0;
        for j in 0..p.n() {
            var += (p.increment(j) - mean).powi(2);
        }
        var /= n - 1.0;
        let se = (var / n).sqrt();
        assert!(mean.abs() < 5.0 * se, "mean = {mean}, se = {se}");
    }

    #[test]
    fn tower_mean_within_four_sigma() {
        // nu_delta(phi2) = 0 by construction; oracle is the exact column-sum
        // integral in the tower module.
        let spec =
            example_tower_process(2.0, 0.01, true, Variant::Perturbed, DEFAULT_TOWER_TOL, 0xAB)
                .unwrap();
        let p = generate_series(&spec, 1_000_000).unwrap();
        let n = p.n() as f64;
        let mean = p.total() / n;
        let mut var = 0.0;
        for j in 0..p.n() {
            var += (p.increment(j) - mean).powi(2);
        }
        var /= n - 1.0;
        let se = (var / n).sqrt();
        assert!(mean.abs() < 4.0 * se, "mean = {mean}, 4se = {}", 4.0 * se);
    }

    #[test]
    fn tower_stream_agrees_with_tower_map_orbit() {
        // The stream is the (column, level) orbit of the tower map from the
        // stationary start, draw for draw.
        let spec =
            example_tower_process(2.0, 0.01, true, Variant::Perturbed, DEFAULT_TOWER_TOL, 99)
                .unwrap();
        let obs = match &spec.kind {
            ProcessKind::Tower(o) => o.clone(),
            _ => unreachable!(),
        };
        let streamed: Vec<f64> = spec.stream().take(300).collect();
        let mut rng = stream_for(spec.seed);
        let mut p = obs.tower().sample_stationary(&mut rng);
        for (j, &x) in streamed.iter().enumerate() {
            assert_eq!(x, obs.at(&p), "step {j}");
            p = obs.tower().tower_map(p, &mut rng);
        }
    }

    #[test]
    fn split_seed_reexported() {
        assert_eq!(split_seed(1, 2), crate::seeding::split_seed(1, 2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn iid_prefix_stream(seed in any::<u64>(), short in 1usize..300, extra in 1usize..300) {
                let spec = ProcessSpec::rademacher(seed);
                let a = generate_series(&spec, short).unwrap();
                let b = generate_series(&spec, short + extra).unwrap();
                prop_assert_eq!(&b.values()[..=short], a.values());
            }

            #[test]
            fn doubling_prefix_stream(seed in any::<u64>(), short in 1usize..200, extra in 1usize..200) {
                let spec = ProcessSpec::doubling(seed);
                let a = generate_series(&spec, short).unwrap();
                let b = generate_series(&spec, short + extra).unwrap();
                prop_assert_eq!(&b.values()[..=short], a.values());
            }
        }
    }
}
