//! Reference implementations used only by tests. Nothing here calls into the
//! crate's selection or integration code.

#![allow(dead_code)]

/// Smallest framerate whose quality gap to the best is within `threshold`,
/// by scanning every candidate.
pub fn min_feasible_framerate(q: &[(u32, f64)], threshold: f64) -> u32 {
    let best = q.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    q.iter()
        .filter(|p| best - p.1 <= threshold)
        .map(|p| p.0)
        .min()
        .expect("argmax is always feasible")
}

/// Framerate whose quality is closest to `best - threshold` from above;
/// argmax when `threshold == 0`. Ties go to the smaller framerate.
pub fn closest_above_target(q: &[(u32, f64)], threshold: f64) -> u32 {
    let best = q.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut sorted = q.to_vec();
    sorted.sort_by_key(|p| p.0);
    if threshold == 0.0 {
        return sorted.iter().find(|p| p.1 == best).unwrap().0;
    }
    let target = best - threshold;
    let mut pick: Option<(u32, f64)> = None;
    for &(f, v) in &sorted {
        if v >= target {
            let d = (v - target).abs();
            if pick.is_none_or(|(_, pd)| d < pd) {
                pick = Some((f, d));
            }
        }
    }
    pick.unwrap().0
}

/// Fritsch–Butland PCHIP slopes, written independently of the crate.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        return vec![del[0]; 2];
    }
    for i in 1..n - 1 {
        if del[i - 1] * del[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() || s == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], del[0], del[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

/// Evaluates a cubic Hermite spline at `t` (inside the knot range).
pub fn hermite_eval(x: &[f64], y: &[f64], d: &[f64], t: f64) -> f64 {
    let mut i = 0;
    while i + 2 < x.len() && t > x[i + 1] {
        i += 1;
    }
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let a = y[i];
    let b = y[i + 1];
    // de Casteljau on the Bézier form of the segment
    let p1 = a + d[i] * h / 3.0;
    let p2 = b - d[i + 1] * h / 3.0;
    let u = 1.0 - s;
    u * u * u * a + 3.0 * u * u * s * p1 + 3.0 * u * s * s * p2 + s * s * s * b
}

/// Trapezoid rule on `samples + 1` equally spaced points.
pub fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> f64 {
    let h = (hi - lo) / samples as f64;
    let mut sum = 0.5 * (f(lo) + f(hi));
    for k in 1..samples {
        sum += f(lo + h * k as f64);
    }
    sum * h
}

/// BD-quality by dense trapezoid integration of independently built
/// interpolants over log10(rate).
pub fn bd_quality_trapezoid(reference: &[(f64, f64)], test: &[(f64, f64)], samples: usize) -> f64 {
    let prep = |c: &[(f64, f64)]| {
        let x: Vec<f64> = c.iter().map(|p| p.0.log10()).collect();
        let y: Vec<f64> = c.iter().map(|p| p.1).collect();
        let d = pchip_slopes(&x, &y);
        (x, y, d)
    };
    let (rx, ry, rd) = prep(reference);
    let (tx, ty, td) = prep(test);
    let lo = rx[0].max(tx[0]);
    let hi = rx[rx.len() - 1].min(tx[tx.len() - 1]);
    let diff = |u: f64| hermite_eval(&tx, &ty, &td, u) - hermite_eval(&rx, &ry, &rd, u);
    trapezoid(diff, lo, hi, samples) / (hi - lo)
}

/// BDDE by dense trapezoid integration of log10(energy) over quality.
pub fn bdde_trapezoid(reference: &[(f64, f64)], test: &[(f64, f64)], samples: usize) -> f64 {
    let prep = |c: &[(f64, f64)]| {
        let x: Vec<f64> = c.iter().map(|p| p.1).collect();
        let y: Vec<f64> = c.iter().map(|p| p.0.log10()).collect();
        let d = pchip_slopes(&x, &y);
        (x, y, d)
    };
    let (rx, ry, rd) = prep(reference);
    let (tx, ty, td) = prep(test);
    let lo = rx[0].max(tx[0]);
    let hi = rx[rx.len() - 1].min(tx[tx.len() - 1]);
    let diff = |v: f64| hermite_eval(&tx, &ty, &td, v) - hermite_eval(&rx, &ry, &rd, v);
    let g = trapezoid(diff, lo, hi, samples) / (hi - lo);
    100.0 * (10f64.powf(g) - 1.0)
}
