//! Numeric convex conjugation of one-dimensional CGFs.
//!
//! `numeric_conjugate` computes `sup_{t ∈ T} { t q − Ψ(t) }` for a convex
//! `Ψ` with `Ψ(0) = 0` on an interval `T ∋ 0`. The objective is concave, so
//! each half-line from `t = 0` is searched by bracket doubling followed by
//! golden-section refinement.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{Family, Sidedness, TDomain};
use crate::rng::CounterRng;
use crate::search::golden_max;

/// Number of doublings after which a still-increasing objective with a
/// non-negligible last increment is declared divergent.
const DIVERGENCE_DOUBLINGS: usize = 64;
/// Hard cap on doublings toward an infinite endpoint (2^1000 is still finite).
const MAX_DOUBLINGS: usize = 1000;
/// Halvings of the gap to a finite endpoint.
const MAX_HALVINGS: usize = 40;
const GOLDEN_ITERS: usize = 200;

type CgfFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A CGF together with the interval it is considered on.
#[derive(Clone)]
pub struct CgfHandle {
    eval: Arc<CgfFn>,
    domain: TDomain,
}

impl fmt::Debug for CgfHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CgfHandle").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl CgfHandle {
    /// Wraps an arbitrary CGF. The domain must contain `0` and `eval(0)`
    /// must vanish.
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: TDomain) -> Result<Self> {
        if !(domain.lower < domain.upper) || !domain.contains(0.0) {
            return crate::error::domain(format!("t-domain ({}, {}) must contain 0", domain.lower, domain.upper));
        }
        let at_zero = eval(0.0);
        if at_zero.abs() > 1e-12 {
            return crate::error::domain(format!("CGF at t = 0 is {at_zero}, expected 0"));
        }
        Ok(Self {
            eval: Arc::new(eval),
            domain,
        })
    }

    /// `Ψ_p` of a bounding family, on the full or nonnegative t-domain.
    pub fn of_family(family: Family, p: f64, sided: Sidedness) -> Result<Self> {
        let dom = family.t_domain_sided(p, sided)?;
        Self::new(move |t| family.cgf_unchecked(p, t), dom)
    }

    pub fn domain(&self) -> TDomain {
        self.domain
    }

    /// `Ψ(t)`; `+inf` outside the domain.
    pub fn eval(&self, t: f64) -> f64 {
        if self.domain.contains(t) {
            (self.eval)(t)
        } else {
            f64::INFINITY
        }
    }

    /// Midpoint-convexity spot check on `trials` random triples inside the
    /// domain (clipped to `[-clip, clip]`).
    pub fn spot_check_convexity(&self, trials: usize, clip: f64, seed: u64) -> bool {
        let lo = self.domain.lower.max(-clip);
        let hi = self.domain.upper.min(clip);
        let mut rng = CounterRng::new(seed, 0);
        (0..trials).all(|_| {
            let a = lo + (hi - lo) * rng.open_uniform();
            let b = lo + (hi - lo) * rng.open_uniform();
            let (fa, fb, fm) = (self.eval(a), self.eval(b), self.eval(0.5 * (a + b)));
            !(fa.is_finite() && fb.is_finite()) || fm <= 0.5 * (fa + fb) + 1e-12 * (1.0 + fa.abs() + fb.abs())
        })
    }
}

/// Result of a numeric conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateValue {
    pub value: f64,
    /// Maximizer; for suprema approached at an endpoint, that endpoint.
    pub t_star: f64,
    /// The supremum is approached (not attained) at an open or infinite
    /// endpoint of the domain.
    pub at_boundary: bool,
}

/// One side of the search: `t = dir * s` for `s` in `[0, limit]`.
struct HalfLine<'a> {
    psi: &'a CgfHandle,
    q: f64,
    dir: f64,
    limit: f64,
    closed: bool,
}

impl HalfLine<'_> {
    fn objective(&self, s: f64) -> f64 {
        let t = self.dir * s;
        let v = t * self.q - self.psi.eval(t);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    fn next(&self, s: f64) -> f64 {
        if self.limit.is_infinite() {
            2.0 * s
        } else {
            (2.0 * s).min(s + 0.5 * (self.limit - s))
        }
    }

    fn maximize(&self, tol: f64) -> Result<(f64, f64, bool)> {
        if self.limit <= 0.0 {
            return Ok((0.0, 0.0, false));
        }
        let start = if self.limit.is_infinite() { 1.0 } else { 1.0f64.min(0.5 * self.limit) };
        let (mut prev, mut cur) = (0.0, start);
        let mut f_cur = self.objective(cur);
        if f_cur <= 0.0 {
            return Ok(self.refine(0.0, cur));
        }
        let mut steps = 0usize;
        loop {
            let nxt = self.next(cur);
            let near_end = self.limit.is_finite() && (self.limit - nxt) <= 1e-12 * self.limit.max(1.0);
            let f_nxt = self.objective(nxt);
            if f_nxt <= f_cur {
                return Ok(self.refine(prev, nxt));
            }
            steps += 1;
            if near_end || (self.limit.is_finite() && steps >= MAX_HALVINGS + 64) {
                return Ok(self.endpoint(cur, nxt, f_nxt));
            }
            if self.limit.is_infinite() {
                let incr = f_nxt - f_cur;
                if steps == DIVERGENCE_DOUBLINGS && incr > tol.sqrt() {
                    return Err(Error::Divergent { q: self.q });
                }
                if steps >= MAX_DOUBLINGS || !f_nxt.is_finite() {
                    if f_nxt.is_infinite() {
                        return Err(Error::Divergent { q: self.q });
                    }
                    return Ok((nxt, f_nxt, true));
                }
            }
            prev = cur;
            cur = nxt;
            f_cur = f_nxt;
        }
    }

    fn refine(&self, a: f64, b: f64) -> (f64, f64, bool) {
        let (s, v) = golden_max(|s| self.objective(s), a, b, GOLDEN_ITERS);
        (s, v, false)
    }

    /// The objective still increases as `s` approaches a finite endpoint.
    fn endpoint(&self, s0: f64, s1: f64, f1: f64) -> (f64, f64, bool) {
        if self.closed {
            let f_end = self.objective(self.limit);
            if f_end >= f1 {
                return (self.limit, f_end, false);
            }
            return self.refine(s0, self.limit);
        }
        // Values at limit - h and limit - 2h with h = limit - s1; linear
        // Richardson extrapolation of the limit at h -> 0.
        let h = self.limit - s1;
        let f2h = self.objective(self.limit - 2.0 * h);
        let extrapolated = 2.0 * f1 - f2h;
        let v = if extrapolated.is_finite() { extrapolated.max(f1) } else { f1 };
        (self.limit, v, true)
    }
}

/// `sup_{t ∈ domain} { t q − Ψ(t) }`.
///
/// `tol` controls the divergence test; the maximizer itself is located to
/// machine precision.
pub fn numeric_conjugate(psi: &CgfHandle, q: f64, tol: f64) -> Result<ConjugateValue> {
    if !(tol > 0.0) {
        return domain("conjugate tolerance must be positive");
    }
    if !q.is_finite() {
        return domain(format!("conjugate argument must be finite, got {q}"));
    }
    let dom = psi.domain;
    let right = HalfLine {
        psi,
        q,
        dir: 1.0,
        limit: dom.upper,
        closed: dom.upper_closed,
    };
    let left = HalfLine {
        psi,
        q,
        dir: -1.0,
        limit: -dom.lower,
        closed: dom.lower_closed,
    };
    let (sr, vr, br) = right.maximize(tol)?;
    let (sl, vl, bl) = left.maximize(tol)?;
    let (t_star, value, at_boundary) = if vr >= vl { (sr, vr, br) } else { (-sl, vl, bl) };
    let (t_star, value, at_boundary) = if value <= 0.0 { (0.0, 0.0, false) } else { (t_star, value, at_boundary) };
    Ok(ConjugateValue {
        value,
        t_star,
        at_boundary,
    })
}

/// The un-optimized exponent `t q − Ψ(t)`.
pub fn parametric_value(psi: &CgfHandle, q: f64, t: f64) -> Result<f64> {
    if !psi.domain.contains(t) {
        return domain(format!(
            "t = {t} outside ({}, {})",
            psi.domain.lower, psi.domain.upper
        ));
    }
    Ok(t * q - (psi.eval)(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binary_kl;

    fn handle(f: Family, p: f64) -> CgfHandle {
        CgfHandle::of_family(f, p, Sidedness::Full).unwrap()
    }

    #[test]
    fn gaussian_example() {
        let c = numeric_conjugate(&handle(Family::gaussian(1.0).unwrap(), 0.0), 1.0, 1e-10).unwrap();
        assert!((c.value - 0.5).abs() < 1e-12);
        assert!((c.t_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn at_own_mean_is_zero() {
        for f in Family::all_kinds() {
            let p = 0.4;
            let c = numeric_conjugate(&handle(f, p), p, 1e-10).unwrap();
            assert!(c.value.abs() < 1e-12, "{f}: {}", c.value);
        }
    }

    #[test]
    fn bernoulli_matches_kl() {
        let c = numeric_conjugate(&handle(Family::Bernoulli, 0.3), 0.7, 1e-10).unwrap();
        assert!((c.value - binary_kl(0.7, 0.3)).abs() < 1e-10);
        assert!((c.value - 0.338_919_144).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_supremum_at_support_edge() {
        // q = 0 for Poisson: sup is p, approached as t -> -inf
        let c = numeric_conjugate(&handle(Family::Poisson, 2.5), 0.0, 1e-10).unwrap();
        assert!((c.value - 2.5).abs() < 1e-9);
        let c = numeric_conjugate(&handle(Family::Bernoulli, 0.25), 1.0, 1e-10).unwrap();
        assert!((c.value - 4f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn outside_support_diverges() {
        let r = numeric_conjugate(&handle(Family::Poisson, 1.0), -0.5, 1e-10);
        assert!(matches!(r, Err(Error::Divergent { .. })));
        let r = numeric_conjugate(&handle(Family::gamma(2.0).unwrap(), 1.0), 0.0, 1e-10);
        assert!(matches!(r, Err(Error::Divergent { .. })));
    }

    #[test]
    fn open_endpoint_is_extrapolated() {
        // Ψ(t) = t^2 on (-1, 1): for q = 4 the sup 4t - t^2 is approached at t = 1
        let psi = CgfHandle::new(|t| t * t, TDomain::open(-1.0, 1.0)).unwrap();
        let c = numeric_conjugate(&psi, 4.0, 1e-10).unwrap();
        assert!(c.at_boundary);
        assert!((c.value - 3.0).abs() < 1e-9, "{}", c.value);
        assert_eq!(c.t_star, 1.0);
    }

    #[test]
    fn closed_endpoint_is_attained() {
        let dom = TDomain {
            upper_closed: true,
            ..TDomain::open(-1.0, 1.0)
        };
        let psi = CgfHandle::new(|t| t * t, dom).unwrap();
        let c = numeric_conjugate(&psi, 4.0, 1e-10).unwrap();
        assert!(!c.at_boundary);
        assert_eq!(c.value, 3.0);
    }

    #[test]
    fn one_sided_domain() {
        // Gamma with q < p: the two-sided sup sits at t < 0; on [0, k/p) it is 0
        let g = Family::gamma(5.0).unwrap();
        let one = CgfHandle::of_family(g, 1.0, Sidedness::NonnegOnly).unwrap();
        assert_eq!(numeric_conjugate(&one, 0.5, 1e-10).unwrap().value, 0.0);
        let two = handle(g, 1.0);
        let v = numeric_conjugate(&two, 0.5, 1e-10).unwrap().value;
        assert!((v - g.cramer(0.5, 1.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn parametric_examples() {
        let pois = handle(Family::Poisson, 1.0);
        let v = parametric_value(&pois, 1.0, 1.0).unwrap();
        assert!((v - (2.0 - std::f64::consts::E)).abs() < 1e-15);
        assert_eq!(parametric_value(&pois, 0.3, 0.0).unwrap(), 0.0);
        let (p, q, g) = (0.4, 0.1, -2.0f64);
        let bern = handle(Family::Bernoulli, p);
        let catoni = g * q - (1.0 - p + p * g.exp()).ln();
        assert!((parametric_value(&bern, q, g).unwrap() - catoni).abs() < 1e-15);
        assert!(parametric_value(&handle(Family::laplace(1.0).unwrap(), 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn handle_validation() {
        assert!(CgfHandle::new(|t| t + 1.0, TDomain::real_line()).is_err());
        assert!(CgfHandle::new(|t| t * t, TDomain::open(0.5, 1.0)).is_err());
        assert!(handle(Family::laplace(1.0).unwrap(), 0.3).spot_check_convexity(200, 10.0, 1));
    }
}
