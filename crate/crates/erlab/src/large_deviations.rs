//! Rate functions three ways: exact minimization for bounded discrete i.i.d.
//! sources, Monte Carlo scaled-cumulant-generating-function estimation with a
//! Legendre-Fenchel transform, and exceedance-tail regression.
//!
//! The exact branch solves phi'(t)/phi(t) = alpha for the tilt t_alpha and
//! returns c_alpha = alpha t_alpha - ln phi(t_alpha); for the fair coin this
//! reduces to the binary-entropy closed form, which the tests use as an
//! independent oracle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::processes::{DiscreteDistribution, ProcessSpec};
use crate::seeding::domain_seed;
use crate::util::linear_fit;

/// Seed-domain tags keeping estimator streams disjoint.
const DOMAIN_SCGF: u64 = 0x5347;
const DOMAIN_TAIL: u64 = 0x5441_0000;

/// Moment generating function E[e^{tX}], max-shifted so intermediate
/// exponentials cannot overflow for bounded supports.
pub fn mgf(dist: &DiscreteDistribution, t: f64) -> f64 {
    log_mgf(dist, t).exp()
}

/// ln E[e^{tX}] with the same shift.
pub fn log_mgf(dist: &DiscreteDistribution, t: f64) -> f64 {
    let (lm, _, _) = tilted_moments(dist, t);
    lm
}

/// (ln mgf, tilted mean, tilted variance) at tilt t.
fn tilted_moments(dist: &DiscreteDistribution, t: f64) -> (f64, f64, f64) {
    let shift = dist
        .values()
        .iter()
        .zip(dist.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(&v, _)| t * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (&v, &p) in dist.values().iter().zip(dist.probs()) {
        if p > 0.0 {
            let w = p * (t * v - shift).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
    }
    let mean = s1 / s0;
    let var = (s2 / s0 - mean * mean).max(0.0);
    (shift + s0.ln(), mean, var)
}

/// Exact i.i.d. rate at one level: the tilt and the rate value.
#[derive(Debug, Clone)]
pub struct IidExactRate {
    pub dist: DiscreteDistribution,
    pub alpha: f64,
    pub t_alpha: f64,
    pub c_alpha: f64,
}

/// Solve phi'(t)/phi(t) = alpha by bisection-guarded Newton to a residual
/// below 1e-12, and return c_alpha = alpha t_alpha - ln phi(t_alpha).
///
/// Handles levels strictly between the mean and the top of the support;
/// levels at or below the mean belong to the mirrored branch, and levels at
/// or beyond the top have no interior minimizer.
pub fn solve_t_alpha(dist: &DiscreteDistribution, alpha: f64) -> Result<IidExactRate> {
    let mean = dist.mean();
    if !(alpha > mean) {
        return Err(Error::UseSymmetricBranch { alpha, mean });
    }
    let max_value = dist.max_value();
    if alpha >= max_value {
        return Err(Error::OutsideRateDomain { alpha, max_value });
    }

    // bracket: tilted mean is increasing in t and tends to max_value
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    loop {
        let (_, m, _) = tilted_moments(dist, hi);
        if m > alpha {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Argument(format!(
                "tilt bracket for alpha = {alpha} exceeded 1e9"
            )));
        }
    }

    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (_, m, var) = tilted_moments(dist, t);
        let g = m - alpha;
        if g.abs() < 1e-12 {
            break;
        }
        if g > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - g / var;
        t = if var > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }

    let (lm, m, _) = tilted_moments(dist, t);
    debug_assert!((m - alpha).abs() < 1e-10);
    let c_alpha = alpha * t - lm;
    Ok(IidExactRate {
        dist: dist.clone(),
        alpha,
        t_alpha: t,
        c_alpha,
    })
}

/// One tabulated point of a scaled-cumulant-generating-function estimate.
#[derive(Debug, Clone, Copy)]
pub struct ScgfPoint {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    /// Effective sample size after the exponential tilt.
    pub ess: f64,
    /// False when ess < 10; the value is reported but flagged unreliable.
    pub reliable: bool,
}

/// Tabulated SCGF estimate Lambda_n(t) on a t-grid.
#[derive(Debug, Clone)]
pub struct ScgfTable {
    pub block_len: usize,
    pub replicas: usize,
    pub points: Vec<ScgfPoint>,
}

/// Monte Carlo SCGF: Lambda_n(t) = (1/n) log mean_m exp(t S_n^(m)) over
/// independent stationary blocks, log-sum-exp throughout, delta-method
/// standard errors per t. Replica block sums are computed in parallel but
/// reduced in replica order, so the result is bit-stable.
pub fn empirical_scgf(
    spec: &ProcessSpec,
    block_len: usize,
    replicas: usize,
    t_grid: &[f64],
) -> Result<ScgfTable> {
    if block_len == 0 {
        return Err(Error::Argument("block length must be >= 1".into()));
    }
    if replicas < 100 {
        return Err(Error::Argument(format!(
            "need at least 100 replicas, got {replicas}"
        )));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Argument("t grid must be nonempty and finite".into()));
    }

    let sums: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|m| {
            let s = spec.reseeded(domain_seed(spec.seed, DOMAIN_SCGF, m as u64));
            s.stream().take(block_len).sum::<f64>()
        })
        .collect();

    let n = block_len as f64;
    let m_count = replicas as f64;
    let points = t_grid
        .iter()
        .map(|&t| {
            let shift = sums.iter().map(|&s| t * s).fold(f64::NEG_INFINITY, f64::max);
            let mut sw = 0.0;
            let mut sw2 = 0.0;
            for &s in &sums {
                let w = (t * s - shift).exp();
                sw += w;
                sw2 += w * w;
            }
            let mean_w = sw / m_count;
            let value = (shift + mean_w.ln()) / n;
            let sample_var = ((sw2 - sw * sw / m_count) / (m_count - 1.0)).max(0.0);
            let stderr = sample_var.sqrt() / m_count.sqrt() / (n * mean_w);
            let ess = sw * sw / sw2;
            ScgfPoint {
                t,
                value,
                stderr,
                ess,
                reliable: ess >= 10.0,
            }
        })
        .collect();

    Ok(ScgfTable {
        block_len,
        replicas,
        points,
    })
}

/// The exact SCGF ln phi(t) of a discrete distribution on a grid (block
/// length 1, zero error). Feeding this to the Legendre transform closes the
/// duality loop with `solve_t_alpha`.
pub fn exact_scgf_table(dist: &DiscreteDistribution, t_grid: &[f64]) -> ScgfTable {
    let points = t_grid
        .iter()
        .map(|&t| ScgfPoint {
            t,
            value: log_mgf(dist, t),
            stderr: 0.0,
            ess: f64::INFINITY,
            reliable: true,
        })
        .collect();
    ScgfTable {
        block_len: 1,
        replicas: 0,
        points,
    }
}

/// Legendre-Fenchel value sup_t (alpha t - Lambda(t)) from a tabulated SCGF.
///
/// Golden-section search on the piecewise-linear interpolant locates the
/// maximizing knot; a local quadratic fit through the three surrounding
/// knots recovers the smooth maximum between knots. Errors if the maximizer
/// sits on the grid boundary (alpha outside the estimable range).
pub fn legendre_transform(table: &ScgfTable, alpha: f64) -> Result<f64> {
    legendre_with_knot(table, alpha).map(|(v, _)| v)
}

pub(crate) fn legendre_with_knot(table: &ScgfTable, alpha: f64) -> Result<(f64, usize)> {
    let pts = &table.points;
    if pts.len() < 3 {
        return Err(Error::Argument("need at least 3 SCGF grid points".into()));
    }
    let g: Vec<f64> = pts.iter().map(|p| alpha * p.t - p.value).collect();
    let mut best = 0usize;
    for (i, &gi) in g.iter().enumerate() {
        if gi > g[best] {
            best = i;
        }
    }
    if best == 0 || best == pts.len() - 1 {
        return Err(Error::ExtendTGrid { alpha });
    }

    // golden-section on the piecewise-linear interpolant over the bracket;
    // its maximum is the knot, so this pins the bracket to tolerance in t
    let (ts, gs): (Vec<f64>, Vec<f64>) = (pts.iter().map(|p| p.t).collect(), g.clone());
    let interp = |x: f64| -> f64 {
        let j = ts.partition_point(|&t| t <= x).clamp(1, ts.len() - 1);
        let (t0, t1) = (ts[j - 1], ts[j]);
        let w = if t1 > t0 { (x - t0) / (t1 - t0) } else { 0.0 };
        gs[j - 1] * (1.0 - w) + gs[j] * w
    };
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (ts[best - 1], ts[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (interp(c), interp(d));
    for _ in 0..200 {
        if b - a <= 1e-10 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = interp(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = interp(d);
        }
    }
    let linear_max = g[best].max(fc).max(fd);

    // quadratic through the three knots around the maximizer
    let (t0, t1, t2) = (ts[best - 1], ts[best], ts[best + 1]);
    let (y0, y1, y2) = (g[best - 1], g[best], g[best + 1]);
    let d01 = (y1 - y0) / (t1 - t0);
    let d12 = (y2 - y1) / (t2 - t1);
    let second = (d12 - d01) / (t2 - t0);
    let mut refined = linear_max;
    if second < 0.0 {
        let vertex = 0.5 * (t0 + t1) - d01 / (2.0 * second);
        if vertex > t0 && vertex < t2 {
            let value = y0 + d01 * (vertex - t0) + second * (vertex - t0) * (vertex - t1);
            refined = refined.max(value);
        }
    }
    Ok((refined, best))
}

/// Exceedance model fitted by `tail_fit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    /// -ln p_n ~ I(alpha) n: slope estimates the rate.
    Exponential,
    /// ln p_n ~ -gamma ln n: slope estimates the negative tail exponent.
    Polynomial,
}

/// Result of an exceedance-probability regression.
#[derive(Debug, Clone)]
pub struct TailFit {
    pub model: TailModel,
    pub n_grid: Vec<u64>,
    pub p_hat: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Exceedance counts over independent stationary blocks, one bin per grid n.
fn tail_counts(spec: &ProcessSpec, alpha: f64, n_grid: &[u64], replicas: u64) -> Vec<u64> {
    n_grid
        .iter()
        .enumerate()
        .map(|(gi, &n)| {
            (0..replicas)
                .into_par_iter()
                .filter(|&m| {
                    let s = spec.reseeded(domain_seed(
                        spec.seed,
                        DOMAIN_TAIL.wrapping_add(gi as u64),
                        m,
                    ));
                    let sum: f64 = s.stream().take(n as usize).sum();
                    sum >= n as f64 * alpha
                })
                .count() as u64
        })
        .collect()
}

/// Crude Monte Carlo tail regression: p_n = P(S_n >= n alpha) estimated over
/// fresh stationary blocks per grid point, then a least-squares fit of the
/// chosen model. Any empty bin is an error; there is no importance sampling
/// here by design, so the estimator stays auditable.
pub fn tail_fit(
    spec: &ProcessSpec,
    alpha: f64,
    n_grid: &[u64],
    replicas: u64,
    model: TailModel,
) -> Result<TailFit> {
    validate_tail_grid(n_grid)?;
    if replicas == 0 {
        return Err(Error::Argument("need at least one replica".into()));
    }
    let counts = tail_counts(spec, alpha, n_grid, replicas);
    for (&n, &c) in n_grid.iter().zip(&counts) {
        if c == 0 {
            return Err(Error::EmptyTailBin { n });
        }
    }
    Ok(fit_counts(model, n_grid, &counts, replicas))
}

/// Like [`tail_fit`] but drops grid points whose exceedance count falls below
/// `min_count` (reporting them) and fits the remaining points; at least three
/// must survive. This is the orchestrator-facing variant: an experiment
/// reports infeasible grid points and continues on the rest.
pub fn tail_fit_with_min_count(
    spec: &ProcessSpec,
    alpha: f64,
    n_grid: &[u64],
    replicas: u64,
    model: TailModel,
    min_count: u64,
) -> Result<(TailFit, Vec<u64>)> {
    validate_tail_grid(n_grid)?;
    let counts = tail_counts(spec, alpha, n_grid, replicas);
    let mut keep_n = Vec::new();
    let mut keep_c = Vec::new();
    let mut dropped = Vec::new();
    for (&n, &c) in n_grid.iter().zip(&counts) {
        if c >= min_count.max(1) {
            keep_n.push(n);
            keep_c.push(c);
        } else {
            dropped.push(n);
        }
    }
    if keep_n.len() < 3 {
        return Err(Error::Argument(format!(
            "only {} feasible grid points (need 3): increase replicas or lower n",
            keep_n.len()
        )));
    }
    Ok((fit_counts(model, &keep_n, &keep_c, replicas), dropped))
}

fn validate_tail_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.len() < 5 {
        return Err(Error::Argument(format!(
            "tail grid needs >= 5 points, got {}",
            n_grid.len()
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::Argument("tail grid must be strictly increasing and positive".into()));
    }
    Ok(())
}

fn fit_counts(model: TailModel, n_grid: &[u64], counts: &[u64], replicas: u64) -> TailFit {
    let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / replicas as f64).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = match model {
        TailModel::Exponential => (
            n_grid.iter().map(|&n| n as f64).collect(),
            p_hat.iter().map(|&p| -p.ln()).collect(),
        ),
        TailModel::Polynomial => (
            n_grid.iter().map(|&n| (n as f64).ln()).collect(),
            p_hat.iter().map(|&p| p.ln()).collect(),
        ),
    };
    let (slope, intercept, residual) = linear_fit(&x, &y);
    TailFit {
        model,
        n_grid: n_grid.to_vec(),
        p_hat,
        slope,
        intercept,
        residual,
    }
}

/// How a rate-function grid was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    ExactIid,
    ScgfLegendre,
    TailRegression,
}

impl RateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateMethod::ExactIid => "exact-iid",
            RateMethod::ScgfLegendre => "scgf-legendre",
            RateMethod::TailRegression => "tail-regression",
        }
    }
}

/// A rate function on a level grid with method diagnostics.
#[derive(Debug, Clone)]
pub struct RateFunction {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub method: RateMethod,
    pub block_len: usize,
    pub replicas: usize,
}

/// Exact branch over a level grid; alpha = 0 maps to 0 by the mean-zero
/// convention, positive levels go through the minimizer.
pub fn rate_function_exact(dist: &DiscreteDistribution, alphas: &[f64]) -> Result<RateFunction> {
    let mut values = Vec::with_capacity(alphas.len());
    for &a in alphas {
        if a == 0.0 {
            values.push(0.0);
        } else {
            values.push(solve_t_alpha(dist, a)?.c_alpha);
        }
    }
    Ok(RateFunction {
        alphas: alphas.to_vec(),
        values,
        stderr: vec![0.0; alphas.len()],
        method: RateMethod::ExactIid,
        block_len: 1,
        replicas: 0,
    })
}

/// Monte Carlo SCGF + Legendre transform over a level grid. One SCGF table
/// is estimated and transformed at every level, so the grid inherits the
/// convexity of the transform.
pub fn rate_function_scgf(
    spec: &ProcessSpec,
    alphas: &[f64],
    block_len: usize,
    replicas: usize,
    t_grid: &[f64],
) -> Result<RateFunction> {
    let table = empirical_scgf(spec, block_len, replicas, t_grid)?;
    let mut values = Vec::with_capacity(alphas.len());
    let mut stderr = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let (v, knot) = legendre_with_knot(&table, a)?;
        values.push(v);
        stderr.push(table.points[knot].stderr);
    }
    Ok(RateFunction {
        alphas: alphas.to_vec(),
        values,
        stderr,
        method: RateMethod::ScgfLegendre,
        block_len,
        replicas,
    })
}

/// Tail-regression rate estimates: one exponential-model fit per level.
pub fn rate_function_tail(
    spec: &ProcessSpec,
    alphas: &[f64],
    n_grid: &[u64],
    replicas: u64,
) -> Result<RateFunction> {
    let mut values = Vec::with_capacity(alphas.len());
    let mut stderr = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let fit = tail_fit(spec, a, n_grid, replicas, TailModel::Exponential)?;
        values.push(fit.slope);
        stderr.push(fit.residual);
    }
    Ok(RateFunction {
        alphas: alphas.to_vec(),
        values,
        stderr,
        method: RateMethod::TailRegression,
        block_len: 0,
        replicas: replicas as usize,
    })
}

/// Binary-entropy closed form of the fair-coin rate: the oracle for the
/// Rademacher exact branch.
pub fn rademacher_rate_closed_form(alpha: f64) -> f64 {
    0.5 * (1.0 + alpha) * (1.0 + alpha).ln() + 0.5 * (1.0 - alpha) * (1.0 - alpha).ln()
}
