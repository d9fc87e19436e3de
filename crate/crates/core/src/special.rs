//! Small special functions: `x ln y` conventions, binary KL, log-sum-exp,
//! the lower branch of the Lambert W function, Clopper-Pearson intervals.

use crate::error::{domain, Result};

/// `x * ln(y)` with the convention `0 * ln(0) = 0`.
#[inline]
pub fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `x * ln(x / y)` with `0 * ln(0 / y) = 0`.
#[inline]
pub fn xlogx_over_y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// Binary KL divergence `kl(q, p) = KL(Bern(q) || Bern(p))`.
///
/// Infinite when `p` is at an endpoint that `q` is not.
pub fn binary_kl(q: f64, p: f64) -> f64 {
    let v = xlogx_over_y(q, p) + xlogx_over_y(1.0 - q, 1.0 - p);
    v.max(0.0)
}

/// `ln Σ exp(x_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Table of `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

pub use statrs::function::gamma::ln_gamma;

/// Lower real branch `W₋₁(z)` for `z ∈ [-1/e, 0)`.
pub fn lambert_w_m1(z: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if !(z >= branch - 1e-16 && z < 0.0) {
        return domain(format!("W_-1 is defined on [-1/e, 0), got {z}"));
    }
    Ok(lambert_w_m1_ln((-z).ln()))
}

/// `W₋₁(-e^ell)` for `ell <= -1`, without forming `e^ell`.
///
/// Solves `w + ln(-w) = ell` with `w <= -1` by Halley iteration, seeded by
/// the branch-point series near `ell = -1` and by the asymptotic expansion
/// `ell - ln(-ell) + ln(-ell)/ell` elsewhere.
pub fn lambert_w_m1_ln(ell: f64) -> f64 {
    if ell >= -1.0 {
        return -1.0;
    }
    // 1 + e z with z = -e^ell
    let gap = -(1.0 + ell).exp_m1();
    let mut w = if gap < 0.25 {
        let p = -(2.0 * gap).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = ell;
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    if w > -1.0 {
        w = -1.0 - f64::EPSILON;
    }
    for _ in 0..64 {
        let g = w + (-w).ln() - ell;
        let g1 = (w + 1.0) / w;
        let g2 = -1.0 / (w * w);
        let denom = 2.0 * g1 * g1 - g * g2;
        if denom == 0.0 {
            break;
        }
        let step = 2.0 * g * g1 / denom;
        let next = (w - step).min(-1.0);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * w.abs();
        w = next;
        if done {
            break;
        }
    }
    w
}

/// Two-sided Clopper-Pearson interval for `k` successes in `n` trials at
/// coverage `1 - alpha`.
pub fn clopper_pearson(k: u64, n: u64, alpha: f64) -> (f64, f64) {
    use statrs::function::beta::beta_reg;
    assert!(n > 0 && k <= n);
    let (kf, nf) = (k as f64, n as f64);
    let half = alpha / 2.0;
    // P(X >= k; p) = I_p(k, n-k+1) is increasing in p
    let lo = if k == 0 {
        0.0
    } else {
        bisect_increasing(|p| beta_reg(kf, nf - kf + 1.0, p), half)
    };
    // P(X <= k; p) = 1 - I_p(k+1, n-k) is decreasing in p
    let hi = if k == n {
        1.0
    } else {
        bisect_increasing(|p| beta_reg(kf + 1.0, nf - kf, p), 1.0 - half)
    };
    (lo, hi)
}

fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
