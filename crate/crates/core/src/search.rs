//! One-dimensional search helpers shared by the conjugate, inversion and
//! upsilon modules.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns the best `(x, f(x))` seen, which for a concave objective is also
/// the constrained maximum when it sits on an endpoint.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, max_iter: usize) -> (f64, f64) {
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if fc.is_nan() || fd.is_nan() {
            break;
        }
        if fc >= fd {
            if fc > best.1 {
                best = (c, fc);
            }
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            if fd > best.1 {
                best = (d, fd);
            }
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if fc > best.1 {
        best = (c, fc);
    }
    if fd > best.1 {
        best = (d, fd);
    }
    best
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, max_iter: usize) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b, max_iter);
    (x, -v)
}

/// `count` points from `lo` to `hi` inclusive, evenly spaced.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive (`0 < lo < hi`).
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), count)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                x.exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_interior_max() {
        let (x, v) = golden_max(|t| -(t - 0.3).powi(2) + 2.0, -5.0, 5.0, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn golden_constrained_max_at_endpoint() {
        let (x, v) = golden_max(|t| t, 0.0, 1.0, 200);
        assert_eq!(x, 1.0);
        assert_eq!(v, 1.0);
        let (x, _) = golden_min(|t| t * t, 2.0, 3.0, 200);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn spacing() {
        let l = linspace(0.0, 1.0, 5);
        assert_eq!(l, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = logspace(1e-3, 10.0, 5);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[4], 10.0);
        assert!((g[2] - 0.1).abs() < 1e-15);
    }
}
