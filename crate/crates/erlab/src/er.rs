//! Erdős–Rényi window functionals and convergence scans.
//!
//! theta(n, k) is the best time-average over length-k windows among the
//! first n samples of an orbit; the window schedules are the three regimes
//! whose limits the window laws separate: logarithmic windows scaled by a
//! rate value (nontrivial limit), polynomial windows (limit 0 in the
//! exponential regime), and fixed windows (limit sup of the observable).
//!
//! Scans evaluate one orbit at nested n over a geometric grid, as the
//! almost-sure statements require, and stream the orbit instead of holding
//! it: a 10^8-sample scan needs memory proportional to the largest window,
//! not to the orbit.

use crate::error::{Error, Result};
use crate::processes::{PrefixSums, ProcessSpec};
use crate::util::gauss_bracket;

/// Window-length schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSchedule {
    /// k(n) = floor(ln n / i_alpha): the critical scale for rate value i_alpha.
    Logarithmic { i_alpha: f64 },
    /// k(n) = floor(n^tau) with tau in (0, 1).
    Polynomial { tau: f64 },
    /// Constant window.
    Fixed { k: u64 },
}

impl WindowSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WindowSchedule::Logarithmic { i_alpha } => {
                if !(i_alpha > 0.0) || !i_alpha.is_finite() {
                    return Err(Error::Argument(format!(
                        "logarithmic schedule needs i_alpha > 0, got {i_alpha}"
                    )));
                }
            }
            WindowSchedule::Polynomial { tau } => {
                if !(tau > 0.0 && tau < 1.0) {
                    return Err(Error::Argument(format!(
                        "polynomial schedule needs tau in (0, 1), got {tau}"
                    )));
                }
            }
            WindowSchedule::Fixed { k } => {
                if k < 1 {
                    return Err(Error::Argument("fixed schedule needs k >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Window length at horizon n. Out-of-range lengths are an error, never a
    /// silent clamp: k < 1 means n is too small for the rate, k > n/2 means
    /// the window would dominate the sample.
    pub fn window_length(&self, n: u64) -> Result<u64> {
        if n < 3 {
            return Err(Error::Argument(format!("scan horizon n = {n} below 3")));
        }
        self.validate()?;
        let k = match *self {
            WindowSchedule::Logarithmic { i_alpha } => gauss_bracket((n as f64).ln() / i_alpha),
            WindowSchedule::Polynomial { tau } => gauss_bracket((n as f64).powf(tau)),
            WindowSchedule::Fixed { k } => k as i64,
        };
        if k < 1 || 2 * (k as u128) > n as u128 {
            return Err(Error::ScheduleWindow { n, k });
        }
        Ok(k as u64)
    }

    pub fn describe(&self) -> String {
        match *self {
            WindowSchedule::Logarithmic { i_alpha } => format!("log(i_alpha={i_alpha})"),
            WindowSchedule::Polynomial { tau } => format!("poly(tau={tau})"),
            WindowSchedule::Fixed { k } => format!("fixed(k={k})"),
        }
    }
}

/// Maximal window average theta(n, k) = max_j (S_{j+k} - S_j) / k over
/// 0 <= j <= n - k, by a single linear pass over the prefix sums.
pub fn theta(p: &PrefixSums, n: usize, k: usize) -> Result<f64> {
    window_extremum(p, n, k).map(|(max, _)| max)
}

/// Minimal window average, the companion functional.
pub fn theta_min(p: &PrefixSums, n: usize, k: usize) -> Result<f64> {
    window_extremum(p, n, k).map(|(_, min)| min)
}

fn window_extremum(p: &PrefixSums, n: usize, k: usize) -> Result<(f64, f64)> {
    if k < 1 || k > n {
        return Err(Error::Argument(format!(
            "window length k = {k} outside [1, n = {n}]"
        )));
    }
    if n > p.n() {
        return Err(Error::Argument(format!(
            "horizon n = {n} exceeds series length {}",
            p.n()
        )));
    }
    let s = p.values();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for j in 0..=(n - k) {
        let w = s[j + k] - s[j];
        if w > hi {
            hi = w;
        }
        if w < lo {
            lo = w;
        }
    }
    Ok((hi / k as f64, lo / k as f64))
}

/// One row of a scan: `theta` is the maximal window sum theta(n,k) * k, and
/// `theta_over_k` the maximal window average (the quantity with the
/// almost-sure limit). The DDL statistic (theta - alpha k) / ln k is filled
/// when a reference tilt was supplied and k >= 2.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub n: u64,
    pub k: u64,
    pub theta: f64,
    pub theta_over_k: f64,
    pub ddl_stat: Option<f64>,
}

/// Scan of one orbit across a nested geometric grid.
#[derive(Debug, Clone)]
pub struct ErScanResult {
    pub alpha: f64,
    pub schedule: WindowSchedule,
    /// 1 / (2 t_alpha) when the exact tilt was supplied: the predicted
    /// limsup of the DDL statistic in the i.i.d. regime.
    pub ddl_reference: Option<f64>,
    pub rows: Vec<ScanRow>,
}

/// Running max/min of window sums of a fixed length over a streamed orbit.
///
/// Feed `observe(t, prefix_t)` for t = 1, 2, ...; the ring holds the last k
/// prefix values so each step costs O(1) and memory is O(k).
#[derive(Debug, Clone)]
pub struct WindowTracker {
    k: u64,
    ring: Vec<f64>,
    best: f64,
    worst: f64,
}

impl WindowTracker {
    pub fn new(k: u64) -> Self {
        assert!(k >= 1);
        Self {
            k,
            ring: vec![0.0; k as usize],
            best: f64::NEG_INFINITY,
            worst: f64::INFINITY,
        }
    }

    #[inline]
    pub fn observe(&mut self, t: u64, prefix: f64) {
        let slot = (t % self.k) as usize;
        if t >= self.k {
            let w = prefix - self.ring[slot];
            if w > self.best {
                self.best = w;
            }
            if w < self.worst {
                self.worst = w;
            }
        }
        self.ring[slot] = prefix;
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Maximal window sum seen so far.
    pub fn max_sum(&self) -> f64 {
        self.best
    }

    pub fn min_sum(&self) -> f64 {
        self.worst
    }
}

/// Geometric horizon grid ending exactly at `n_max`: n_max, n_max/ratio, ...
/// down to (and not below) `n_min`, returned ascending.
pub fn geometric_grid(n_max: u64, ratio: f64, n_min: u64) -> Vec<u64> {
    assert!(ratio > 1.0 && n_min >= 1 && n_max >= n_min);
    let mut grid = Vec::new();
    let mut x = n_max as f64;
    while x >= n_min as f64 {
        let n = x.round() as u64;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        x /= ratio;
    }
    grid.reverse();
    grid
}

/// Evaluate theta over one orbit at every grid horizon with the scheduled
/// window, streaming the realization once.
///
/// `t_alpha`: the exact tilt of the i.i.d. branch, when known; it switches on
/// the DDL statistic column. Schedule errors at any grid point propagate
/// before the orbit is generated.
pub fn er_scan(
    spec: &ProcessSpec,
    schedule: WindowSchedule,
    alpha: f64,
    n_grid: &[u64],
    t_alpha: Option<f64>,
) -> Result<ErScanResult> {
    if n_grid.is_empty() {
        return Err(Error::Argument("empty scan grid".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("scan grid must be strictly increasing".into()));
    }
    let ks: Vec<u64> = n_grid
        .iter()
        .map(|&n| schedule.window_length(n))
        .collect::<Result<_>>()?;

    let mut trackers: Vec<WindowTracker> = ks.iter().map(|&k| WindowTracker::new(k)).collect();
    let n_max = *n_grid.last().unwrap();
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut done = 0usize;
    let mut prefix = 0.0f64;
    let mut stream = spec.stream();
    for t in 1..=n_max {
        let x = stream.next().expect("streams are infinite");
        prefix += x;
        for tr in trackers.iter_mut().skip(done) {
            tr.observe(t, prefix);
        }
        while done < n_grid.len() && n_grid[done] == t {
            let k = ks[done];
            let sum = trackers[done].max_sum();
            rows.push(make_row(n_grid[done], k, sum, alpha, t_alpha.is_some()));
            done += 1;
        }
    }

    Ok(ErScanResult {
        alpha,
        schedule,
        ddl_reference: t_alpha.map(|t| 1.0 / (2.0 * t)),
        rows,
    })
}

fn make_row(n: u64, k: u64, sum: f64, alpha: f64, with_ddl: bool) -> ScanRow {
    let ddl_stat = if with_ddl && k >= 2 {
        Some((sum - alpha * k as f64) / (k as f64).ln())
    } else {
        None
    };
    ScanRow {
        n,
        k,
        theta: sum,
        theta_over_k: sum / k as f64,
        ddl_stat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{generate_series, DiscreteDistribution, ProcessSpec};
    use crate::seeding::stream_for;
    use rand_core::RngCore;

    fn prefix_of(increments: &[f64]) -> PrefixSums {
        PrefixSums::from_increments(increments.iter().copied())
    }

    /// Brute-force oracle: recompute every window sum by direct summation.
    fn theta_brute(incr: &[f64], n: usize, k: usize) -> (f64, f64) {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for j in 0..=(n - k) {
            let s: f64 = incr[j..j + k].iter().sum();
            hi = hi.max(s);
            lo = lo.min(s);
        }
        (hi / k as f64, lo / k as f64)
    }

    #[test]
    fn window_length_examples() {
        let log = WindowSchedule::Logarithmic { i_alpha: 0.1308122 };
        assert_eq!(log.window_length(1_000_000).unwrap(), 105);
        let poly = WindowSchedule::Polynomial { tau: 0.5 };
        assert_eq!(poly.window_length(10_000).unwrap(), 100);
        let fixed = WindowSchedule::Fixed { k: 1 };
        assert_eq!(fixed.window_length(10).unwrap(), 1);
    }

    #[test]
    fn window_length_errors_not_clamps() {
        // n too small for the rate: k = floor(ln 20 / 3) = 0
        let log = WindowSchedule::Logarithmic { i_alpha: 3.0 };
        assert!(matches!(
            log.window_length(20),
            Err(Error::ScheduleWindow { k: 0, .. })
        ));
        // window dominates the sample
        let fixed = WindowSchedule::Fixed { k: 8 };
        assert!(matches!(
            fixed.window_length(10),
            Err(Error::ScheduleWindow { .. })
        ));
        // invalid schedules
        assert!(WindowSchedule::Polynomial { tau: 1.0 }.validate().is_err());
        assert!(WindowSchedule::Logarithmic { i_alpha: 0.0 }.validate().is_err());
        assert!(WindowSchedule::Fixed { k: 0 }.validate().is_err());
        // horizon below 3
        assert!(WindowSchedule::Fixed { k: 1 }.window_length(2).is_err());
    }

    #[test]
    fn theta_examples() {
        let p = prefix_of(&[1.0, -1.0, 1.0, 1.0]);
        assert_eq!(theta(&p, 4, 2).unwrap(), 1.0);
        assert_eq!(theta_min(&p, 4, 2).unwrap(), 0.0);
        // k = n: the single full window
        assert_eq!(theta(&p, 4, 4).unwrap(), p.total() / 4.0);
        // constant increments
        let c = prefix_of(&[0.25; 10]);
        for k in 1..=10 {
            assert!((theta(&c, 10, k).unwrap() - 0.25).abs() < 1e-15);
            assert!((theta_min(&c, 10, k).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_argument_errors() {
        let p = prefix_of(&[1.0, 2.0]);
        assert!(theta(&p, 2, 3).is_err());
        assert!(theta(&p, 2, 0).is_err());
        assert!(theta(&p, 5, 1).is_err());
    }

    #[test]
    fn theta_matches_brute_force() {
        let mut rng = stream_for(0x0A);
        for case in 0..200 {
            let n = 2 + (rng.next_u64() % 60) as usize;
            let incr: Vec<f64> = (0..n)
                .map(|_| ((rng.next_u64() % 9) as f64) - 4.0)
                .collect();
            let p = prefix_of(&incr);
            for k in 1..=n {
                let (bh, bl) = theta_brute(&incr, n, k);
                assert_eq!(theta(&p, n, k).unwrap(), bh, "case {case} k {k}");
                assert_eq!(theta_min(&p, n, k).unwrap(), bl, "case {case} k {k}");
            }
        }
    }

    #[test]
    fn theta_bounds_and_order() {
        let spec = ProcessSpec::rademacher(0xBEE);
        let p = generate_series(&spec, 500).unwrap();
        for k in [1usize, 3, 10, 50] {
            let hi = theta(&p, 500, k).unwrap();
            let lo = theta_min(&p, 500, k).unwrap();
            let avg = p.total() / 500.0;
            assert!(lo <= avg + 1e-12 && avg <= hi + 1e-12);
            assert!(lo >= -1.0 && hi <= 1.0);
            assert!(lo <= hi);
        }
    }

    #[test]
    fn theta_monotone_under_extension() {
        let spec = ProcessSpec::rademacher(0xCAB);
        let p = generate_series(&spec, 400).unwrap();
        for k in [2usize, 7, 20] {
            let a = theta(&p, 300, k).unwrap();
            let b = theta(&p, 400, k).unwrap();
            assert!(b >= a, "appending samples decreased theta");
        }
    }

    #[test]
    fn theta_translation_equivariance_exact_on_integers() {
        // integer increments and shift keep every sum exact in f64
        let mut rng = stream_for(0x7E);
        for _ in 0..50 {
            let n = 3 + (rng.next_u64() % 40) as usize;
            let incr: Vec<f64> = (0..n)
                .map(|_| ((rng.next_u64() % 7) as f64) - 3.0)
                .collect();
            let c = ((rng.next_u64() % 5) as f64) - 2.0;
            let shifted: Vec<f64> = incr.iter().map(|x| x + c).collect();
            let p = prefix_of(&incr);
            let q = prefix_of(&shifted);
            for k in 1..=n {
                let lhs = theta(&q, n, k).unwrap();
                let rhs = theta(&p, n, k).unwrap() + c;
                if k.is_power_of_two() {
                    // window sums are integers and /2^m is exact, so the
                    // shift identity holds bitwise
                    assert_eq!(lhs, rhs, "shift broke equivariance at k = {k}");
                } else {
                    assert!((lhs - rhs).abs() < 1e-12, "k = {k}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn geometric_grid_shapes() {
        assert_eq!(geometric_grid(10_000_000, 10.0, 5000), vec![10_000, 100_000, 1_000_000, 10_000_000]);
        let g = geometric_grid(100_000_000, 2.0, 10_000);
        assert_eq!(*g.last().unwrap(), 100_000_000);
        assert_eq!(g[0], 12_207);
        assert_eq!(g.len(), 14);
    }

    #[test]
    fn scan_matches_theta_on_the_same_realization() {
        let spec = ProcessSpec::rademacher(0x11AB);
        let grid = [64, 256, 1024];
        let schedule = WindowSchedule::Polynomial { tau: 0.5 };
        let scan = er_scan(&spec, schedule, 0.5, &grid, None).unwrap();
        let series = generate_series(&spec, 1024).unwrap();
        for row in &scan.rows {
            let direct = theta(&series, row.n as usize, row.k as usize).unwrap();
            assert_eq!(row.theta_over_k, direct, "n = {}", row.n);
            assert_eq!(row.theta, direct * row.k as f64);
        }
    }

    #[test]
    fn scan_rows_and_ddl() {
        let spec = ProcessSpec::rademacher(0x44);
        let grid = [100, 1000];
        let t_alpha = 0.5f64.atanh();
        let scan = er_scan(
            &spec,
            WindowSchedule::Logarithmic { i_alpha: 0.130812035941137 },
            0.5,
            &grid,
            Some(t_alpha),
        )
        .unwrap();
        assert_eq!(scan.rows.len(), 2);
        let reference = scan.ddl_reference.unwrap();
        assert!((reference - 1.0 / (2.0 * t_alpha)).abs() < 1e-15);
        for row in &scan.rows {
            assert!(1 <= row.k && row.k <= row.n / 2);
            assert!(row.theta_over_k.abs() <= 1.0);
            let ddl = row.ddl_stat.unwrap();
            let expect = (row.theta - 0.5 * row.k as f64) / (row.k as f64).ln();
            assert_eq!(ddl, expect);
        }
    }

    #[test]
    fn poly_windows_trend_toward_zero() {
        // windows longer than the logarithmic scale kill the average; the
        // trend is monotone across a decade grid at this seed
        let spec = ProcessSpec::rademacher(0xE21B4);
        let grid = [1_000u64, 10_000, 100_000, 1_000_000];
        let scan =
            er_scan(&spec, WindowSchedule::Polynomial { tau: 0.5 }, 0.5, &grid, None).unwrap();
        for w in scan.rows.windows(2) {
            assert!(
                w[1].theta_over_k < w[0].theta_over_k,
                "trend broke: {} -> {}",
                w[0].theta_over_k,
                w[1].theta_over_k
            );
        }
        assert!(scan.rows.last().unwrap().theta_over_k < 0.2);
    }

    #[test]
    fn log_window_average_lands_near_alpha() {
        let exact = crate::large_deviations::solve_t_alpha(
            &DiscreteDistribution::rademacher(),
            0.5,
        )
        .unwrap();
        let spec = ProcessSpec::rademacher(0xE21B4);
        let scan = er_scan(
            &spec,
            WindowSchedule::Logarithmic { i_alpha: exact.c_alpha },
            0.5,
            &[10_000_000],
            Some(exact.t_alpha),
        )
        .unwrap();
        let avg = scan.rows[0].theta_over_k;
        assert!((0.40..=0.62).contains(&avg), "theta/k = {avg}");
    }

    #[test]
    fn fixed_one_window_has_no_ddl() {
        let spec = ProcessSpec::rademacher(0x77);
        let scan = er_scan(&spec, WindowSchedule::Fixed { k: 1 }, 0.5, &[100], Some(1.0)).unwrap();
        assert_eq!(scan.rows[0].ddl_stat, None);
        // a.s. some +1 appears: max single increment = sup |X|
        assert_eq!(scan.rows[0].theta_over_k, 1.0);
    }

    #[test]
    fn scan_determinism() {
        let spec = ProcessSpec::rademacher(0x99);
        let grid = [50, 500, 5000];
        let schedule = WindowSchedule::Polynomial { tau: 0.4 };
        let a = er_scan(&spec, schedule, 0.3, &grid, None).unwrap();
        let b = er_scan(&spec, schedule, 0.3, &grid, None).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.theta, y.theta);
            assert_eq!(x.k, y.k);
        }
    }

    #[test]
    fn scan_propagates_schedule_errors() {
        let spec = ProcessSpec::rademacher(0x21);
        let schedule = WindowSchedule::Fixed { k: 60 };
        // 60 > 100/2 at the first grid point
        assert!(matches!(
            er_scan(&spec, schedule, 0.5, &[100, 1000], None),
            Err(Error::ScheduleWindow { .. })
        ));
        assert!(er_scan(&spec, schedule, 0.5, &[], None).is_err());
        assert!(er_scan(&spec, schedule, 0.5, &[100, 100], None).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            // integer increments keep both routes exact, so equality is bitwise
            #[test]
            fn theta_equals_brute_force(
                incr in prop::collection::vec(-5i32..=5, 2..80),
                k_pick in 0usize..1000,
            ) {
                let incr: Vec<f64> = incr.into_iter().map(f64::from).collect();
                let n = incr.len();
                let k = 1 + k_pick % n;
                let p = prefix_of(&incr);
                let (bh, bl) = theta_brute(&incr, n, k);
                prop_assert_eq!(theta(&p, n, k).unwrap(), bh);
                prop_assert_eq!(theta_min(&p, n, k).unwrap(), bl);
            }

            #[test]
            fn theta_respects_bounds(
                incr in prop::collection::vec(-1.0f64..=1.0, 2..60),
                k_pick in 0usize..1000,
            ) {
                let n = incr.len();
                let k = 1 + k_pick % n;
                let p = prefix_of(&incr);
                let hi = theta(&p, n, k).unwrap();
                let lo = theta_min(&p, n, k).unwrap();
                prop_assert!(lo <= hi);
                prop_assert!(hi <= 1.0 + 1e-9);
                prop_assert!(lo >= -1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn tracker_agrees_with_direct_window_sums() {
        let spec = ProcessSpec::rademacher(0x31);
        let series = generate_series(&spec, 300).unwrap();
        let mut tr = WindowTracker::new(7);
        for t in 1..=300u64 {
            tr.observe(t, series.values()[t as usize]);
        }
        let direct_max = theta(&series, 300, 7).unwrap() * 7.0;
        let direct_min = theta_min(&series, 300, 7).unwrap() * 7.0;
        assert_eq!(tr.max_sum(), direct_max);
        assert_eq!(tr.min_sum(), direct_min);
    }
}
