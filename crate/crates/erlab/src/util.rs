//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator. Used where a plain left-to-right sum of
/// ~10^6 terms could lose the last couple of digits the tests require.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Least-squares line fit. Returns (slope, intercept, rms_residual).
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points for a line");
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - xm) * (xi - xm);
        sxy += (xi - xm) * (yi - ym);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut ss = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - (slope * xi + intercept);
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

/// Median of an unsorted slice (mean of the middle pair for even lengths).
pub(crate) fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// The Gauss bracket of a positive quantity that was computed in floating
/// point. A relative guard band absorbs the one-ulp wobble of `powf`/`ln`
/// so that values whose exact counterpart is an integer (e.g. (10^4)^0.5)
/// floor to that integer.
pub(crate) fn gauss_bracket(x: f64) -> i64 {
    (x + x.abs() * 1e-12 + 1e-12).floor() as i64
}
