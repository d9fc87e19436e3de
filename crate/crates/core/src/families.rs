//! Mean-parameterized bounding families.
//!
//! Each family `{P_r}` is indexed by its mean `r` and carries at most one
//! fixed nuisance parameter. For every family we expose the CGF
//! `Ψ_p(t) = ln E[e^{tX}]` under `P_p`, the interval of `t` on which it is
//! finite, the closed-form Cramér function `Ψ_p^*(q)`, and samplers.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand_distr::{Binomial, Distribution, Gamma, InverseGaussian, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::CounterRng;
use crate::special::{binary_kl, xlogx_over_y};

/// Relative distance below which the Laplace Cramér function switches to
/// its series expansion.
const LAPLACE_SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Bernoulli,
    /// Known variance `sigma2`.
    Gaussian { sigma2: f64 },
    Poisson,
    /// `Γ(k, p/k)`: shape `k`, scale `p/k`.
    Gamma { shape: f64 },
    /// Laplace with scale `b`.
    Laplace { scale: f64 },
    /// Inverse Gaussian with shape `λ`.
    InverseGaussian { lambda: f64 },
    /// Failures before the `r`-th success, success probability `r/(r+p)`.
    NegativeBinomial { r: f64 },
}

/// Interval of admissible means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanDomain {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl MeanDomain {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn contains_closure(&self, x: f64) -> bool {
        !x.is_nan() && x >= self.lo && x <= self.hi
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Whether a t-domain is the full finiteness interval of the CGF or only its
/// nonnegative part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    Full,
    NonnegOnly,
}

/// Set of `t` over which a CGF bound is assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TDomain {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
    pub sided: Sidedness,
}

impl TDomain {
    pub fn real_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
            sided: Sidedness::Full,
        }
    }

    pub fn open(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            lower_closed: false,
            upper_closed: false,
            sided: Sidedness::Full,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lower_closed { t >= self.lower } else { t > self.lower };
        let below = if self.upper_closed { t <= self.upper } else { t < self.upper };
        above && below
    }

    /// Restrict to `t >= 0`.
    pub fn nonneg(self) -> Self {
        Self {
            lower: 0.0,
            lower_closed: true,
            sided: Sidedness::NonnegOnly,
            ..self
        }
    }
}

impl Family {
    pub fn gaussian(sigma2: f64) -> Result<Self> {
        Self::Gaussian { sigma2 }.validated()
    }

    pub fn gamma(shape: f64) -> Result<Self> {
        Self::Gamma { shape }.validated()
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Self::Laplace { scale }.validated()
    }

    pub fn inverse_gaussian(lambda: f64) -> Result<Self> {
        Self::InverseGaussian { lambda }.validated()
    }

    pub fn negative_binomial(r: f64) -> Result<Self> {
        Self::NegativeBinomial { r }.validated()
    }

    /// Checks that the nuisance parameter, if any, is finite and positive.
    pub fn validated(self) -> Result<Self> {
        match self.nuisance() {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                domain(format!("{} requires a positive nuisance parameter, got {v}", self.name()))
            }
            _ => Ok(self),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::Gaussian { .. } => "gaussian",
            Family::Poisson => "poisson",
            Family::Gamma { .. } => "gamma",
            Family::Laplace { .. } => "laplace",
            Family::InverseGaussian { .. } => "invgauss",
            Family::NegativeBinomial { .. } => "negbin",
        }
    }

    pub fn nuisance(&self) -> Option<f64> {
        match *self {
            Family::Bernoulli | Family::Poisson => None,
            Family::Gaussian { sigma2 } => Some(sigma2),
            Family::Gamma { shape } => Some(shape),
            Family::Laplace { scale } => Some(scale),
            Family::InverseGaussian { lambda } => Some(lambda),
            Family::NegativeBinomial { r } => Some(r),
        }
    }

    pub fn all_kinds() -> [Family; 7] {
        [
            Family::Bernoulli,
            Family::Gaussian { sigma2: 1.0 },
            Family::Poisson,
            Family::Gamma { shape: 5.0 },
            Family::Laplace { scale: 1.0 },
            Family::InverseGaussian { lambda: 1.0 },
            Family::NegativeBinomial { r: 3.0 },
        ]
    }

    pub fn mean_domain(&self) -> MeanDomain {
        match self {
            Family::Bernoulli => MeanDomain {
                lo: 0.0,
                hi: 1.0,
                lo_closed: true,
                hi_closed: true,
            },
            Family::Gaussian { .. } | Family::Laplace { .. } => MeanDomain {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
            },
            Family::Poisson | Family::NegativeBinomial { .. } => MeanDomain {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_closed: true,
                hi_closed: false,
            },
            Family::Gamma { .. } | Family::InverseGaussian { .. } => MeanDomain {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
            },
        }
    }

    /// Whether the family is discrete with support in the nonnegative integers
    /// (after the `n`-fold sum).
    pub fn is_lattice(&self) -> bool {
        matches!(self, Family::Bernoulli | Family::Poisson | Family::NegativeBinomial { .. })
    }

    /// Whether `Υ` of the family's own Cramér function is finite for every
    /// `n`. Only the finitely supported Bernoulli family qualifies; for the
    /// others `E exp(n Ψ*(x̄))` diverges.
    pub fn cramer_upsilon_finite(&self) -> bool {
        matches!(self, Family::Bernoulli)
    }

    fn check_mean(&self, p: f64) -> Result<()> {
        if self.mean_domain().contains(p) {
            Ok(())
        } else {
            domain(format!("mean {p} outside the {} mean domain", self.name()))
        }
    }

    /// Interval on which `Ψ_p` is finite.
    pub fn t_domain(&self, p: f64) -> Result<TDomain> {
        self.check_mean(p)?;
        Ok(match *self {
            Family::Bernoulli | Family::Gaussian { .. } | Family::Poisson => TDomain::real_line(),
            Family::Gamma { shape } => TDomain::open(f64::NEG_INFINITY, shape / p),
            Family::Laplace { scale } => TDomain::open(-1.0 / scale, 1.0 / scale),
            Family::InverseGaussian { lambda } => TDomain {
                upper_closed: true,
                ..TDomain::open(f64::NEG_INFINITY, lambda / (2.0 * p * p))
            },
            Family::NegativeBinomial { r } => {
                if p == 0.0 {
                    TDomain::real_line()
                } else {
                    TDomain::open(f64::NEG_INFINITY, (r / p).ln_1p())
                }
            }
        })
    }

    /// The t-domain as stated for the sub-family assumption: the full
    /// finiteness interval, or its nonnegative half.
    pub fn t_domain_sided(&self, p: f64, sided: Sidedness) -> Result<TDomain> {
        let full = self.t_domain(p)?;
        Ok(match sided {
            Sidedness::Full => full,
            Sidedness::NonnegOnly => full.nonneg(),
        })
    }

    /// `Ψ_p(t)`.
    pub fn cgf(&self, p: f64, t: f64) -> Result<f64> {
        let dom = self.t_domain(p)?;
        if !dom.contains(t) {
            return domain(format!("t = {t} outside the {} CGF domain at mean {p}", self.name()));
        }
        Ok(self.cgf_unchecked(p, t))
    }

    /// `Ψ_p(t)` without domain checks; `+inf` or NaN outside the domain.
    pub fn cgf_unchecked(&self, p: f64, t: f64) -> f64 {
        match *self {
            Family::Bernoulli => {
                if t > 0.0 {
                    t + ((1.0 - p) * (-t).exp_m1()).ln_1p()
                } else {
                    (p * t.exp_m1()).ln_1p()
                }
            }
            Family::Gaussian { sigma2 } => t * p + 0.5 * sigma2 * t * t,
            Family::Poisson => p * t.exp_m1(),
            Family::Gamma { shape } => {
                let a = t * p / shape;
                if a >= 1.0 {
                    f64::INFINITY
                } else {
                    -shape * (-a).ln_1p()
                }
            }
            Family::Laplace { scale } => {
                let bt2 = (scale * t).powi(2);
                if bt2 >= 1.0 {
                    f64::INFINITY
                } else {
                    t * p - (-bt2).ln_1p()
                }
            }
            Family::InverseGaussian { lambda } => {
                let s = 1.0 - 2.0 * p * p * t / lambda;
                if s < 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * p * t / (1.0 + s.sqrt())
                }
            }
            Family::NegativeBinomial { r } => {
                let inner = -(p / r) * t.exp_m1();
                if inner <= -1.0 {
                    f64::INFINITY
                } else {
                    -r * inner.ln_1p()
                }
            }
        }
    }

    /// Closed-form Cramér function `Ψ_p^*(q)` over the full finiteness
    /// interval of `Ψ_p`. Infinite where `q` lies outside the closed support
    /// envelope (for instance `q = 0` for gamma), zero at `q = p`.
    pub fn cramer(&self, q: f64, p: f64) -> Result<f64> {
        let dom = self.mean_domain();
        if !dom.contains_closure(q) || !dom.contains_closure(p) || q.is_infinite() || p.is_infinite() {
            return domain(format!("({q}, {p}) outside the {} Cramér domain", self.name()));
        }
        if q == p {
            return Ok(0.0);
        }
        let v = match *self {
            Family::Bernoulli => binary_kl(q, p),
            Family::Gaussian { sigma2 } => (q - p).powi(2) / (2.0 * sigma2),
            Family::Poisson => {
                if p == 0.0 {
                    f64::INFINITY
                } else if q == 0.0 {
                    p
                } else {
                    // Logs of q and p avoid d rounding to −1 when q ≪ p.
                    let r = q / p;
                    let d = r - 1.0;
                    if d.abs() > 0.5 {
                        q * (q.ln() - p.ln()) + (p - q)
                    } else {
                        p * ((1.0 + d) * d.ln_1p() - d)
                    }
                }
            }
            Family::Gamma { shape } => {
                if q == 0.0 || p == 0.0 {
                    f64::INFINITY
                } else {
                    let r = q / p;
                    let d = r - 1.0;
                    if d.abs() > 0.5 {
                        shape * (d - (q.ln() - p.ln()))
                    } else {
                        shape * (d - d.ln_1p())
                    }
                }
            }
            Family::Laplace { scale } => laplace_cramer(q - p, scale),
            Family::InverseGaussian { lambda } => {
                if q == 0.0 || p == 0.0 {
                    f64::INFINITY
                } else {
                    lambda * (q - p).powi(2) / (2.0 * p * p * q)
                }
            }
            Family::NegativeBinomial { r } => {
                if p == 0.0 {
                    f64::INFINITY
                } else {
                    r * ((p + r) / (q + r)).ln() + xlogx_over_y(q, p) + q * ((p + r) / (q + r)).ln()
                }
            }
        };
        Ok(v.max(0.0))
    }

    /// One draw from `P_p`.
    pub fn draw(&self, p: f64, rng: &mut CounterRng) -> f64 {
        self.draw_sum(p, 1, rng)
    }

    /// The sum of `m` i.i.d. draws from `P_p`, drawn directly from the law of
    /// the sum where the family is closed under convolution.
    pub fn draw_sum(&self, p: f64, m: u64, rng: &mut CounterRng) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let mf = m as f64;
        match *self {
            Family::Bernoulli => {
                if m == 1 {
                    if rng.uniform() < p {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    Binomial::new(m, p.clamp(0.0, 1.0))
                        .expect("validated Bernoulli mean")
                        .sample(rng) as f64
                }
            }
            Family::Gaussian { sigma2 } => Normal::new(mf * p, (mf * sigma2).sqrt())
                .expect("validated variance")
                .sample(rng),
            Family::Poisson => poisson(mf * p, rng),
            Family::Gamma { shape } => Gamma::new(mf * shape, p / shape)
                .expect("validated gamma parameters")
                .sample(rng),
            Family::Laplace { scale } => (0..m).map(|_| laplace_inverse_cdf(p, scale, rng)).sum(),
            Family::InverseGaussian { lambda } => InverseGaussian::new(mf * p, mf * mf * lambda)
                .expect("validated inverse Gaussian parameters")
                .sample(rng),
            Family::NegativeBinomial { r } => {
                if p == 0.0 {
                    return 0.0;
                }
                let rate = Gamma::new(mf * r, p / r)
                    .expect("validated negative binomial parameters")
                    .sample(rng);
                poisson(rate, rng)
            }
        }
    }

    /// `count` i.i.d. draws from `P_p`, reproducible for a fixed `seed`.
    pub fn sample(&self, p: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
        self.validated()?;
        self.check_mean(p)?;
        let mut rng = CounterRng::new(seed, 0);
        Ok((0..count).map(|_| self.draw(p, &mut rng)).collect())
    }

    /// Draws `count` sample means of `n` observations each.
    pub fn sample_means(&self, p: f64, n: u64, count: usize, rng: &mut CounterRng) -> Vec<f64> {
        let nf = n as f64;
        (0..count).map(|_| self.draw_sum(p, n, rng) / nf).collect()
    }

    /// Variance of `P_p`.
    pub fn variance(&self, p: f64) -> f64 {
        match *self {
            Family::Bernoulli => p * (1.0 - p),
            Family::Gaussian { sigma2 } => sigma2,
            Family::Poisson => p,
            Family::Gamma { shape } => p * p / shape,
            Family::Laplace { scale } => 2.0 * scale * scale,
            Family::InverseGaussian { lambda } => p.powi(3) / lambda,
            Family::NegativeBinomial { r } => p + p * p / r,
        }
    }
}

fn poisson(rate: f64, rng: &mut impl RngCore) -> f64 {
    if rate <= 0.0 {
        0.0
    } else {
        Poisson::new(rate).expect("finite Poisson rate").sample(rng)
    }
}

fn laplace_inverse_cdf(mean: f64, scale: f64, rng: &mut CounterRng) -> f64 {
    let u = rng.open_uniform() - 0.5;
    mean - scale * u.signum() * (-2.0 * u.abs()).ln_1p()
}

/// Laplace Cramér function as a function of `d = q - p`.
fn laplace_cramer(d: f64, scale: f64) -> f64 {
    let x = (d / scale).powi(2);
    if d.abs() < LAPLACE_SERIES_CUTOFF * scale {
        x / 4.0 - x * x / 32.0
    } else {
        // u = sqrt(1 + x) - 1; the closed form equals u - ln(1 + u/2)
        let u = x / (1.0 + (1.0 + x).sqrt());
        u - (0.5 * u).ln_1p()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Bernoulli => write!(f, "bernoulli"),
            Family::Gaussian { sigma2 } => write!(f, "gaussian:sigma2={sigma2}"),
            Family::Poisson => write!(f, "poisson"),
            Family::Gamma { shape } => write!(f, "gamma:k={shape}"),
            Family::Laplace { scale } => write!(f, "laplace:b={scale}"),
            Family::InverseGaussian { lambda } => write!(f, "invgauss:lambda={lambda}"),
            Family::NegativeBinomial { r } => write!(f, "negbin:r={r}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `bernoulli`, `gaussian:sigma2=<v>`, `poisson`, `gamma:k=<v>`,
    /// `laplace:b=<v>`, `invgauss:lambda=<v>`, `negbin:r=<v>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let param = |key: &str| -> Result<f64> {
            let arg = arg.ok_or_else(|| Error::Config(format!("family `{name}` requires `{key}=<value>`")))?;
            let (k, v) = arg
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected `{key}=<value>`, got `{arg}`")))?;
            if k.trim() != key {
                return Err(Error::Config(format!("family `{name}` takes `{key}`, got `{}`", k.trim())));
            }
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))
        };
        let no_param = |fam: Family| -> Result<Family> {
            match arg {
                None => Ok(fam),
                Some(a) => Err(Error::Config(format!("family `{name}` takes no parameter, got `{a}`"))),
            }
        };
        let fam = match name {
            "bernoulli" => no_param(Family::Bernoulli)?,
            "poisson" => no_param(Family::Poisson)?,
            "gaussian" => Family::Gaussian { sigma2: param("sigma2")? },
            "gamma" => Family::Gamma { shape: param("k")? },
            "laplace" => Family::Laplace { scale: param("b")? },
            "invgauss" => Family::InverseGaussian { lambda: param("lambda")? },
            "negbin" => Family::NegativeBinomial { r: param("r")? },
            other => return Err(Error::Config(format!("unknown family `{other}`"))),
        };
        fam.validated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cgf_examples() {
        let g = Family::gaussian(1.0).unwrap();
        assert_eq!(g.cgf(0.0, 2.0).unwrap(), 2.0);
        assert_eq!(Family::Bernoulli.cgf(0.5, 0.0).unwrap(), 0.0);
        let lap = Family::laplace(1.0).unwrap();
        let v = lap.cgf(1.0, 0.5).unwrap();
        assert!((v - (0.5 - 0.75f64.ln())).abs() < 1e-15);
        assert!((v - 0.78768).abs() < 1e-5);
    }

    #[test]
    fn laplace_cgf_matches_density_quadrature() {
        // E exp(tX) for X ~ Laplace(1, 1), midpoint rule on [-60, 60]
        let (p, b, t) = (1.0f64, 1.0f64, 0.5f64);
        let h = 1e-3;
        let mut acc = 0.0f64;
        let mut x: f64 = -60.0 + h / 2.0;
        while x < 60.0 {
            acc += (t * x).exp() * (-(x - p).abs() / b).exp() / (2.0 * b) * h;
            x += h;
        }
        let lap = Family::laplace(b).unwrap();
        assert!((acc.ln() - lap.cgf(p, t).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn cgf_domain_errors() {
        assert!(Family::laplace(1.0).unwrap().cgf(0.0, 1.0).is_err());
        assert!(Family::gamma(2.0).unwrap().cgf(1.0, 2.0).is_err());
        assert!(Family::gamma(2.0).unwrap().cgf(1.0, 1.9).is_ok());
        assert!(Family::Bernoulli.cgf(1.5, 0.1).is_err());
        assert!(Family::Poisson.cgf(-1.0, 0.1).is_err());
        assert!(Family::gamma(2.0).unwrap().cgf(0.0, 0.1).is_err());
        let ig = Family::inverse_gaussian(1.0).unwrap();
        assert!(ig.cgf(1.0, 0.5).is_ok());
        assert!(ig.cgf(1.0, 0.5 + 1e-12).is_err());
    }

    #[test]
    fn cramer_examples() {
        let g = Family::gaussian(1.0).unwrap();
        assert_eq!(g.cramer(0.0, 1.0).unwrap(), 0.5);
        for fam in Family::all_kinds() {
            assert_eq!(fam.cramer(0.7, 0.7).unwrap(), 0.0);
        }
        let lap = Family::laplace(1.0).unwrap();
        let s10 = 10f64.sqrt();
        let expected = s10 - 1.0 + (2.0 * (s10 - 1.0) / 9.0).ln();
        assert!((lap.cramer(0.0, 3.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.429_362_402).abs() < 1e-9);
    }

    #[test]
    fn cramer_zero_training_loss_conventions() {
        assert_eq!(Family::Poisson.cramer(0.0, 2.5).unwrap(), 2.5);
        let nb = Family::negative_binomial(3.0).unwrap();
        assert!((nb.cramer(0.0, 2.0).unwrap() - 3.0 * (5.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((Family::Bernoulli.cramer(0.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(Family::gamma(5.0).unwrap().cramer(0.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn laplace_series_is_continuous() {
        let lap = Family::laplace(2.0).unwrap();
        let d = LAPLACE_SERIES_CUTOFF * 2.0;
        let below = lap.cramer(1.0 + d * (1.0 - 1e-9), 1.0).unwrap();
        let above = lap.cramer(1.0 + d * (1.0 + 1e-9), 1.0).unwrap();
        assert!((below / above - 1.0).abs() < 1e-8, "{below} {above}");
        // leading term is d^2 / (4 b^2)
        let tiny = lap.cramer(1.0 + 1e-6, 1.0).unwrap();
        assert!((tiny / (1e-12 / 16.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cramer_domain_errors() {
        assert!(Family::Bernoulli.cramer(1.2, 0.5).is_err());
        assert!(Family::Poisson.cramer(-0.1, 0.5).is_err());
        assert!(Family::gamma(1.0).unwrap().cramer(1.0, -1.0).is_err());
        assert!(Family::gaussian(1.0).unwrap().cramer(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn nuisance_validation() {
        assert!(Family::gaussian(0.0).is_err());
        assert!(Family::gamma(-1.0).is_err());
        assert!(Family::laplace(f64::NAN).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "bernoulli",
            "gaussian:sigma2=0.25",
            "poisson",
            "gamma:k=5",
            "laplace:b=1",
            "invgauss:lambda=1",
            "negbin:r=3",
        ] {
            let fam: Family = s.parse().unwrap();
            assert_eq!(fam.to_string(), s);
        }
        assert!("gamma".parse::<Family>().is_err());
        assert!("gamma:b=2".parse::<Family>().is_err());
        assert!("gaussian:sigma2=-1".parse::<Family>().is_err());
        assert!("poisson:x=1".parse::<Family>().is_err());
        assert!("cauchy".parse::<Family>().is_err());
    }

    #[test]
    fn sample_degenerate_bernoulli() {
        let xs = Family::Bernoulli.sample(1.0, 5, 11).unwrap();
        assert_eq!(xs, vec![1.0; 5]);
        assert!(Family::Bernoulli.sample(1.5, 5, 11).is_err());
    }

    #[test]
    fn sample_is_reproducible() {
        let g = Family::gamma(5.0).unwrap();
        assert_eq!(g.sample(1.0, 100, 3).unwrap(), g.sample(1.0, 100, 3).unwrap());
        assert_ne!(g.sample(1.0, 100, 3).unwrap(), g.sample(1.0, 100, 4).unwrap());
    }

    #[test]
    fn poisson_sample_mean() {
        let n = 1_000_000;
        let xs = Family::Poisson.sample(2.0, n, 5).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        // 3 sigma / sqrt(N) = 0.0042
        assert!((mean - 2.0).abs() < 0.01);
        assert!(xs.iter().all(|x| x.fract() == 0.0 && *x >= 0.0));
    }

    #[test]
    fn gamma_sample_variance() {
        let n = 1_000_000;
        let xs = Family::gamma(5.0).unwrap().sample(1.0, n, 6).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var / 0.2 - 1.0).abs() < 0.02, "var = {var}");
    }

    #[test]
    fn sample_moments_all_families() {
        let n = 200_000;
        for fam in Family::all_kinds() {
            let p = if fam == Family::Bernoulli { 0.3 } else { 1.5 };
            let xs = fam.sample(p, n, 17).unwrap();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let sd = fam.variance(p).sqrt();
            assert!((mean - p).abs() < 5.0 * sd / (n as f64).sqrt(), "{fam}: mean {mean}");
            assert!((var / fam.variance(p) - 1.0).abs() < 0.05, "{fam}: var {var}");
        }
    }

    #[test]
    fn draw_sum_matches_sum_of_draws() {
        // law of the n-fold sum vs explicit summation, first two moments
        let m = 7;
        let count = 100_000;
        for fam in Family::all_kinds() {
            let p = if fam == Family::Bernoulli { 0.4 } else { 0.8 };
            let mut rng = CounterRng::new(99, 1);
            let sums: Vec<f64> = (0..count).map(|_| fam.draw_sum(p, m, &mut rng)).collect();
            let mean = sums.iter().sum::<f64>() / count as f64;
            let var = sums.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
            let (em, ev) = (m as f64 * p, m as f64 * fam.variance(p));
            assert!((mean - em).abs() < 5.0 * (ev / count as f64).sqrt(), "{fam}");
            assert!((var / ev - 1.0).abs() < 0.05, "{fam}: {var} vs {ev}");
        }
    }

    #[test]
    fn tiny_ratio_stays_finite() {
        let p = 1e40;
        let v = Family::Poisson.cramer(1e-300, p).unwrap();
        assert!((v - p).abs() / p < 1e-12, "{v}");
        let g = Family::gamma(2.0).unwrap().cramer(1e-300, 1e30).unwrap();
        assert!(g.is_finite() && g > 2.0 * 600.0, "{g}");
    }
}
