//! Abstract Young towers with polynomially decaying return times.
//!
//! The tower family built here has base columns i = 1, 2, ... with
//! unnormalized base masses m_i = i^-(beta+2) and heights R_i = 2i, plus an
//! optional mixing modification that changes column 3 to height 3 (so the
//! represented heights have gcd 1). The base map is realized as a full-branch
//! Gibbs-Markov map sending each base cell onto the whole base, so successive
//! return columns are i.i.d. with law m_i / Zbar and the simulator is an
//! exact renewal process. The infinite column family is truncated at a
//! relative mass tolerance; the normalizers carry a midpoint integral
//! estimate of the truncated tail.
//!
//! Two observables live on the tower: the plain +-1 column profile (-1 on the
//! lower half of a column, +1 on the upper half, so every unmodified column
//! sums to zero), and a mean-zero perturbation of it that pays kappa on the
//! three levels of the modified column 3 and subtracts a compensating shift
//! on all levels of column 2. The perturbed observable has a nonzero sum
//! along the period-3 loop through column 3, which certifies that it is not
//! a coboundary; the plain observable is one, with an explicit transfer
//! function checked pointwise in the tests.

use std::collections::VecDeque;
use std::sync::Arc;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::seeding::{uniform_index, unit_f64};
use crate::util::{linear_fit, Kahan};

/// Default relative truncation tolerance for the column family.
pub const DEFAULT_TOWER_TOL: f64 = 1e-12;

/// Largest number of tabulated columns before construction refuses.
const MAX_COLUMNS: usize = 8_388_608;

/// A truncated tower with exact (to tolerance) measure tables.
#[derive(Debug, Clone)]
pub struct YoungTower {
    beta: f64,
    kappa: f64,
    modified: bool,
    tol: f64,
    i_max: u32,
    /// cum_base[i] = sum_{j<=i} m_j (cum_base[0] = 0).
    cum_base: Vec<f64>,
    /// cum_delta[i] = sum_{j<=i} R_j m_j.
    cum_delta: Vec<f64>,
    /// Base normalizer: tabulated mass plus integral tail estimate.
    zbar: f64,
    /// Tower normalizer: level-weighted mass plus integral tail estimate.
    zdelta: f64,
}

impl YoungTower {
    /// Build the example tower: masses i^-(beta+2), heights 2i, with column 3
    /// changed to height 3 when `modified` is set.
    ///
    /// `tol` is the relative truncated-tail tolerance, required in (0, 1e-6].
    /// Construction rejects beta <= 1 (the level-weighted mass sum diverges)
    /// and tolerances that would need more than [`MAX_COLUMNS`] columns.
    pub fn build_example(beta: f64, kappa: f64, modified: bool, tol: f64) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::TowerConstruction(format!(
                "beta = {beta} must exceed 1; the tower normalizer diverges otherwise"
            )));
        }
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(Error::Argument(format!(
                "truncation tolerance {tol} outside (0, 1e-6]"
            )));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Argument(format!("kappa = {kappa} must be >= 0")));
        }

        // First guess from tail/Zdelta <= tail/2 = N^-beta / beta, then grow
        // until the measured relative tail clears the tolerance.
        let guess = (1.0 / (beta * tol)).powf(1.0 / beta) * 1.1;
        let mut n_cols = if guess.is_finite() && guess > 0.0 {
            (guess.ceil() as usize).clamp(16, MAX_COLUMNS)
        } else {
            MAX_COLUMNS
        };

        loop {
            let tower = Self::tabulate(beta, kappa, modified, tol, n_cols);
            let rel_tail = (tower.zdelta - tower.cum_delta[n_cols]) / tower.zdelta;
            if rel_tail < tol {
                return Ok(tower);
            }
            if n_cols >= MAX_COLUMNS {
                return Err(Error::TowerConstruction(format!(
                    "tolerance {tol} needs more than {MAX_COLUMNS} columns at beta = {beta}; \
                     increase tol"
                )));
            }
            n_cols = (n_cols * 2).min(MAX_COLUMNS);
        }
    }

    fn tabulate(beta: f64, kappa: f64, modified: bool, tol: f64, n_cols: usize) -> Self {
        let mut cum_base = Vec::with_capacity(n_cols + 1);
        let mut cum_delta = Vec::with_capacity(n_cols + 1);
        cum_base.push(0.0);
        cum_delta.push(0.0);
        let mut kb = Kahan::default();
        let mut kd = Kahan::default();
        for i in 1..=n_cols {
            let m = column_mass(beta, i as u32);
            let r = if modified && i == 3 { 3 } else { 2 * i };
            kb.add(m);
            kd.add(r as f64 * m);
            cum_base.push(kb.value());
            cum_delta.push(kd.value());
        }
        // Midpoint integral estimates of the truncated tails:
        //   sum_{i>N} i^-(beta+2)      ~ (N+1/2)^-(beta+1) / (beta+1)
        //   sum_{i>N} 2i * i^-(beta+2) ~ 2 (N+1/2)^-beta / beta
        let edge = n_cols as f64 + 0.5;
        let tail_base = edge.powf(-(beta + 1.0)) / (beta + 1.0);
        let tail_delta = 2.0 * edge.powf(-beta) / beta;
        let zbar = cum_base[n_cols] + tail_base;
        let zdelta = cum_delta[n_cols] + tail_delta;

        let tower = Self {
            beta,
            kappa,
            modified,
            tol,
            i_max: n_cols as u32,
            cum_base,
            cum_delta,
            zbar,
            zdelta,
        };
        if modified {
            debug_assert_eq!(tower.represented_height_gcd(), 1);
        }
        tower
    }

    /// gcd of the represented return times (2, 4, 3, 8, ... when modified).
    fn represented_height_gcd(&self) -> u32 {
        let mut g = 0u32;
        for i in 1..=self.i_max.min(4) {
            g = gcd(g, self.height(i));
        }
        g
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn modified(&self) -> bool {
        self.modified
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Truncation index: columns 1..=i_max are tabulated.
    pub fn i_max(&self) -> u32 {
        self.i_max
    }

    /// Base normalizer Zbar = sum m_i (with tail estimate).
    pub fn zbar(&self) -> f64 {
        self.zbar
    }

    /// Tower normalizer Zdelta = sum R_i m_i (with tail estimate).
    pub fn zdelta(&self) -> f64 {
        self.zdelta
    }

    /// Unnormalized base mass of column i.
    pub fn mass(&self, i: u32) -> f64 {
        column_mass(self.beta, i)
    }

    /// Return time of column i.
    pub fn height(&self, i: u32) -> u32 {
        if self.modified && i == 3 {
            3
        } else {
            2 * i
        }
    }

    /// Base measure of column i: m_i / Zbar.
    pub fn nu_bar(&self, i: u32) -> f64 {
        self.mass(i) / self.zbar
    }

    /// Tower measure of the full column above base cell i: R_i m_i / Zdelta.
    pub fn nu_delta_column(&self, i: u32) -> f64 {
        (self.height(i) as f64) * self.mass(i) / self.zdelta
    }

    /// Mean return time Zdelta / Zbar (expected steps between base visits).
    pub fn mean_return_time(&self) -> f64 {
        self.zdelta / self.zbar
    }

    /// Exact (to truncation) tower measure of {R > n}.
    ///
    /// Total on n >= 0; n = 0 returns the whole mass 1.
    pub fn tail_probability(&self, n: u64) -> f64 {
        // Homogeneous heights R_i = 2i put {R > n} = {i > n/2}; the modified
        // column 3 (R = 3 instead of 6) is patched in by hand.
        let j = ((n / 2) as usize).min(self.i_max as usize);
        let mut mass = self.zdelta - self.cum_delta[j];
        if self.modified {
            let homogeneous_has_3 = j < 3;
            let actual_has_3 = 3 > n;
            if homogeneous_has_3 && !actual_has_3 {
                mass -= 3.0 * self.mass(3);
            }
        }
        (mass / self.zdelta).clamp(0.0, 1.0)
    }

    /// Log-log regression slope of the exact tail over a grid of n values.
    pub fn tail_loglog_slope(&self, n_grid: &[u64]) -> f64 {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in n_grid {
            let p = self.tail_probability(n);
            if p > 0.0 && n > 0 {
                xs.push((n as f64).ln());
                ys.push(p.ln());
            }
        }
        let (slope, _, _) = linear_fit(&xs, &ys);
        slope
    }

    /// Validated tower point.
    pub fn point(&self, column: u32, level: u32) -> Result<TowerPoint> {
        if column < 1 || column > self.i_max {
            return Err(Error::Argument(format!(
                "column {column} outside [1, {}]",
                self.i_max
            )));
        }
        if level >= self.height(column) {
            return Err(Error::Argument(format!(
                "level {level} >= height {} of column {column}",
                self.height(column)
            )));
        }
        Ok(TowerPoint {
            column,
            level,
            future: VecDeque::new(),
        })
    }

    /// Draw a base column with law m_i / Zbar (the i.i.d. return law).
    pub fn sample_base_column(&self, rng: &mut impl RngCore) -> u32 {
        let target = unit_f64(rng) * self.cum_base[self.i_max as usize];
        search_cum(&self.cum_base, target)
    }

    /// Draw a stationary point: column with law R_i m_i / Zdelta, level
    /// uniform on {0, .., R_i - 1}.
    pub fn sample_stationary(&self, rng: &mut impl RngCore) -> TowerPoint {
        let target = unit_f64(rng) * self.cum_delta[self.i_max as usize];
        let column = search_cum(&self.cum_delta, target);
        let level = uniform_index(rng, self.height(column) as u64) as u32;
        TowerPoint {
            column,
            level,
            future: VecDeque::new(),
        }
    }

    /// One step of the tower map: climb a level, or return to the base in a
    /// freshly drawn column. A pre-extended itinerary is consumed before the
    /// rng is touched, so symbolic futures stay consistent under iteration.
    pub fn tower_map(&self, mut p: TowerPoint, rng: &mut impl RngCore) -> TowerPoint {
        debug_assert!(p.level < self.height(p.column));
        if p.level + 1 < self.height(p.column) {
            p.level += 1;
        } else {
            p.column = p
                .future
                .pop_front()
                .unwrap_or_else(|| self.sample_base_column(rng));
            p.level = 0;
        }
        p
    }
}

/// m_i = i^-(beta+2), via integer powers when beta is integral.
fn column_mass(beta: f64, i: u32) -> f64 {
    let e = beta + 2.0;
    if e.fract() == 0.0 && e <= 64.0 {
        (i as f64).powi(-(e as i32))
    } else {
        (i as f64).powf(-e)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First index with cum[idx] > target; a short head scan covers the bulk of
/// the mass (column 1 alone carries >80% of both laws at beta = 2).
fn search_cum(cum: &[f64], target: f64) -> u32 {
    let head_end = 8.min(cum.len() - 1);
    for (i, &c) in cum.iter().enumerate().take(head_end + 1).skip(1) {
        if c > target {
            return i as u32;
        }
    }
    let idx = cum.partition_point(|&c| c <= target);
    idx.clamp(1, cum.len() - 1) as u32
}

/// A point (column, level) of the tower, optionally carrying a pre-drawn
/// future column itinerary for symbolic (separation-time) queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerPoint {
    column: u32,
    level: u32,
    future: VecDeque<u32>,
}

impl TowerPoint {
    pub fn column(&self) -> u32 {
        self.column
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Column itinerary starting at the current column: entry t is the column
    /// after t base returns.
    pub fn itinerary(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.column).chain(self.future.iter().copied())
    }

    pub fn itinerary_len(&self) -> usize {
        1 + self.future.len()
    }

    /// Draw i.i.d. future return columns until the itinerary covers `len`.
    pub fn extend_itinerary(&mut self, tower: &YoungTower, rng: &mut impl RngCore, len: usize) {
        while self.itinerary_len() < len {
            self.future.push_back(tower.sample_base_column(rng));
        }
    }
}

/// Which observable lives on the tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// The +-1 column profile (phi of the example construction).
    Plain,
    /// The mean-zero perturbed profile (phi_2): kappa on the modified column
    /// 3, the profile minus a compensating shift on column 2.
    Perturbed,
}

/// A tower together with one of its observables; cheap to clone and share.
#[derive(Debug, Clone)]
pub struct TowerObservable {
    tower: Arc<YoungTower>,
    variant: Variant,
    /// c2: the shift subtracted on every level of column 2 (zero for Plain).
    column2_shift: f64,
    /// 3 kappa m_3: the unnormalized integral of the raw perturbation.
    perturbation_mass: f64,
}

impl TowerObservable {
    pub fn new(tower: Arc<YoungTower>, variant: Variant) -> Result<Self> {
        let (column2_shift, perturbation_mass) = match variant {
            Variant::Plain => (0.0, 0.0),
            Variant::Perturbed => {
                if !tower.modified() {
                    return Err(Error::PerturbedNeedsModified);
                }
                // r1 = kappa * nu_delta(column 3) integrates the perturbation;
                // dividing by nu_delta(column 2) spreads it over the R_2 levels
                // of column 2. The normalizer cancels, so only the unnormalized
                // masses appear.
                let mass = 3.0 * tower.kappa() * tower.mass(3);
                let shift = mass / column2_level_mass(&tower);
                (shift, mass)
            }
        };
        Ok(Self {
            tower,
            variant,
            column2_shift,
            perturbation_mass,
        })
    }

    pub fn tower(&self) -> &Arc<YoungTower> {
        &self.tower
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The column-2 shift c2 (zero for the plain variant).
    pub fn column2_shift(&self) -> f64 {
        self.column2_shift
    }

    /// r1: the tower integral of the raw perturbation, kappa * nu_delta(col 3).
    pub fn perturbation_integral(&self) -> f64 {
        self.perturbation_mass / self.tower.zdelta()
    }

    /// Observable value at (column, level).
    #[inline]
    pub fn value(&self, column: u32, level: u32) -> f64 {
        match self.variant {
            Variant::Plain => profile(column, level),
            Variant::Perturbed => {
                if column == 3 {
                    self.tower.kappa()
                } else if column == 2 {
                    profile(column, level) - self.column2_shift
                } else {
                    profile(column, level)
                }
            }
        }
    }

    pub fn at(&self, p: &TowerPoint) -> f64 {
        self.value(p.column(), p.level())
    }

    pub fn sup_abs(&self) -> f64 {
        match self.variant {
            Variant::Plain => 1.0,
            Variant::Perturbed => (1.0 + self.column2_shift.abs()).max(self.tower.kappa()),
        }
    }

    /// Exact tower integral, computed from per-column closed forms.
    ///
    /// Every unmodified column's profile telescopes to zero, so only the
    /// special columns contribute. For the perturbed variant the column-2
    /// contribution is the defining counterweight of the column-3 mass, and
    /// the two cancel exactly (bitwise at integer beta, to an ulp otherwise).
    pub fn mean(&self) -> f64 {
        match self.variant {
            Variant::Plain => {
                if self.tower.modified() {
                    // column 3 has height 3 and the profile is -1 on all of it
                    -3.0 * self.tower.mass(3) / self.tower.zdelta()
                } else {
                    0.0
                }
            }
            Variant::Perturbed => {
                let col2 = self.column2_shift * column2_level_mass(&self.tower);
                (self.perturbation_mass - col2) / self.tower.zdelta()
            }
        }
    }

    /// Sum of the perturbed observable along the period-3 loop through the
    /// modified column 3 (= 3 kappa). A nonzero value certifies, via the
    /// periodic-orbit obstruction, that the observable is not a coboundary.
    pub fn coboundary_obstruction(&self) -> Result<f64> {
        if self.variant != Variant::Perturbed {
            return Err(Error::Argument(
                "coboundary obstruction is defined for the perturbed observable".into(),
            ));
        }
        Ok(self.value(3, 0) + self.value(3, 1) + self.value(3, 2))
    }
}

/// R_2 * m_2: the level mass of column 2, shared by the shift definition and
/// the integral so that their quotient-and-product round-trips.
fn column2_level_mass(tower: &YoungTower) -> f64 {
    (tower.height(2) as f64) * tower.mass(2)
}

/// The +-1 column profile: -1 on levels below the column index, +1 above.
#[inline]
fn profile(column: u32, level: u32) -> f64 {
    if level < column {
        -1.0
    } else {
        1.0
    }
}

/// Transfer function that exhibits the plain profile on the unmodified tower
/// as a coboundary: profile = psi(F p) - psi(p) pointwise, with
/// psi(i, j) = -j for j <= i and j - 2i above. (The value at the base is 0
/// for every column, so the identity holds surely across returns.)
pub fn coboundary_transfer(column: u32, level: u32) -> f64 {
    let i = i64::from(column);
    let j = i64::from(level);
    if j <= i {
        -j as f64
    } else {
        (j - 2 * i) as f64
    }
}

/// Separation time between two tower points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    /// Itineraries first differ at this index (0-based from the base).
    At(usize),
    /// No difference within the horizon.
    AtLeast(usize),
}

/// Symbolic separation time of two points.
///
/// Points on equal levels compare their base itineraries and separate at the
/// first differing return column; points on different levels separate at 1 by
/// the quotient-tower convention. Saturates at `horizon`, and requires both
/// itineraries to cover the horizon when a scan is needed.
pub fn separation_time(p: &TowerPoint, q: &TowerPoint, horizon: usize) -> Result<Separation> {
    if p.level() != q.level() {
        return Ok(Separation::At(1));
    }
    if p.itinerary_len() < horizon || q.itinerary_len() < horizon {
        return Err(Error::Argument(format!(
            "both itineraries must cover the horizon {horizon} (have {} and {})",
            p.itinerary_len(),
            q.itinerary_len()
        )));
    }
    for (idx, (a, b)) in p.itinerary().zip(q.itinerary()).take(horizon).enumerate() {
        if a != b {
            return Ok(Separation::At(idx));
        }
    }
    Ok(Separation::AtLeast(horizon))
}

/// Symbolic metric d_{beta1} = beta1^s for beta1 in (0, 1). For a saturated
/// separation this is the upper bound beta1^horizon.
pub fn symbolic_distance(sep: Separation, beta1: f64) -> Result<f64> {
    if !(beta1 > 0.0 && beta1 < 1.0) {
        return Err(Error::Argument(format!("beta1 = {beta1} outside (0, 1)")));
    }
    let s = match sep {
        Separation::At(s) => s,
        Separation::AtLeast(s) => s,
    };
    Ok(beta1.powi(s as i32))
}
