//! Monotone piecewise-cubic Hermite interpolation (PCHIP) with closed-form
//! integration.
//!
//! Slopes follow Fritsch–Carlson with the Fritsch–Butland weighted harmonic
//! mean at interior knots and the one-sided three-point formula at the ends,
//! the same construction as SciPy's `PchipInterpolator`. For monotone data the
//! interpolant is monotone and never overshoots the samples.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A monotone cubic Hermite interpolant through `(x, y)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// Builds the interpolant. Needs at least two points, finite values and
    /// strictly increasing `x`.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidCurve("x and y lengths differ".into()));
        }
        if x.len() < 2 {
            return Err(Error::InvalidCurve("need at least two points".into()));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("x must be strictly increasing".into()));
        }
        let slopes = slopes(x, y);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        })
    }

    /// Knot abscissae.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Knot derivatives.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Domain `[x_first, x_last]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, at: f64) -> usize {
        // index i such that x[i] <= at < x[i+1], clamped to the valid range
        let n = self.x.len();
        match self.x.partition_point(|&k| k <= at) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Evaluates the interpolant. Outside the domain the end cubics are
    /// extended.
    pub fn eval(&self, at: f64) -> f64 {
        let i = self.segment(at);
        let h = self.x[i + 1] - self.x[i];
        let t = (at - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i]
            + h10 * h * self.slopes[i]
            + h01 * self.y[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    /// Integral over `[x[i], x[i] + s*h]` of segment `i`, `s` in [0, 1].
    fn segment_integral(&self, i: usize, s: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        // antiderivatives of the Hermite basis functions
        let a00 = s - s3 + 0.5 * s4;
        let a10 = 0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2;
        let a01 = s3 - 0.5 * s4;
        let a11 = 0.25 * s4 - s3 / 3.0;
        h * (a00 * self.y[i]
            + a10 * h * self.slopes[i]
            + a01 * self.y[i + 1]
            + a11 * h * self.slopes[i + 1])
    }

    /// Exact integral from the first knot to `at` (`at` inside the domain).
    fn primitive(&self, at: f64) -> f64 {
        let i = self.segment(at);
        let full: f64 = (0..i)
            .map(|k| {
                let h = self.x[k + 1] - self.x[k];
                h * 0.5 * (self.y[k] + self.y[k + 1])
                    + h * h * (self.slopes[k] - self.slopes[k + 1]) / 12.0
            })
            .sum();
        let s = (at - self.x[i]) / (self.x[i + 1] - self.x[i]);
        full + self.segment_integral(i, s)
    }

    /// Exact integral over `[lo, hi]`, both inside the domain.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        let (a, b) = self.domain();
        if !(lo >= a && hi <= b && lo <= hi) {
            return Err(Error::InvalidCurve(alloc::format!(
                "integration bounds [{lo}, {hi}] outside domain [{a}, {b}]"
            )));
        }
        Ok(self.primitive(hi) - self.primitive(lo))
    }
}

fn slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return alloc::vec![m[0], m[0]];
    }
    let mut d = alloc::vec![0.0; n];
    for k in 1..n - 1 {
        let (m0, m1) = (m[k - 1], m[k]);
        if m0 == 0.0 || m1 == 0.0 || (m0 > 0.0) != (m1 > 0.0) {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / m0 + w2 / m1);
        }
    }
    d[0] = end_slope(h[0], h[1], m[0], m[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
    d
}

/// One-sided three-point end derivative, limited to keep monotonicity.
fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if sign(d) != sign(m0) {
        0.0
    } else if sign(m0) != sign(m1) && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
