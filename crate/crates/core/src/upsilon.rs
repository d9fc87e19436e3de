//! The moment quantity `Υ_Δ(n) = sup_r E_{x ∼ P_r^n} exp(n Δ(x̄, r))`.
//!
//! Everything is computed in the log domain. Four evaluators are provided:
//! the exact binomial sum for Bernoulli, truncated series for the
//! integer-valued Poisson and negative-binomial families, windowed
//! quadrature for gaussian, gamma and inverse-Gaussian, and Monte Carlo for
//! any family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::Family;
use crate::inversion::Comparator;
use crate::rng::CounterRng;
use crate::search::{golden_max, linspace};
use crate::special::{ln_factorials, ln_gamma, log_sum_exp, xlogy, LogSumExp};

pub use crate::inversion::{correction_two_e_ceil, correction_xi};

/// Consecutive sub-geometric terms past the peak that signal divergence.
const RAABE_RUN: usize = 10_000;
const MAX_SERIES_TERMS: usize = 1_000_000;
const BOOTSTRAP_RESAMPLES: usize = 500;
const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpsilonMode {
    Exact,
    Truncated,
    MonteCarlo,
    Divergent,
}

/// A value of `ln Υ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonEstimate {
    pub mode: UpsilonMode,
    /// `ln Υ`; `+inf` (serialized as `null`) when divergent.
    pub ln_upsilon: f64,
    pub r_star: Option<f64>,
    /// 95% interval for `ln Υ` (Monte Carlo only).
    pub ci: Option<(f64, f64)>,
    /// Bound on the truncation error of `ln Υ`.
    pub tail_error: Option<f64>,
    /// Monte Carlo estimate dominated by a few extreme samples.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub divergent_suspect: bool,
    /// The maximizing mean sits at the end of a capped grid.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub r_capped: bool,
}

impl UpsilonEstimate {
    fn divergent(r: Option<f64>) -> Self {
        Self {
            mode: UpsilonMode::Divergent,
            ln_upsilon: f64::INFINITY,
            r_star: r,
            ci: None,
            tail_error: None,
            divergent_suspect: false,
            r_capped: false,
        }
    }

    pub fn is_divergent(&self) -> bool {
        self.mode == UpsilonMode::Divergent
    }
}

/// Grid of means over which the supremum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl RGrid {
    /// 2001 points over the mean range, kept `1e-6` inside finite ends and
    /// capped at 50 for unbounded ranges.
    pub fn default_for(family: Family) -> Self {
        let dom = family.mean_domain();
        let lo = if dom.lo.is_finite() { dom.lo + 1e-6 } else { -50.0 };
        let hi = if dom.hi.is_finite() { dom.hi - 1e-6 } else { 50.0 };
        Self { lo, hi, points: 2001 }
    }

    pub fn with_points(self, points: usize) -> Self {
        Self { points, ..self }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.points.max(2))
    }
}

/// Maximizes a per-`r` log value over a grid and refines the peak.
fn sup_over_grid(values: &[f64], lnv: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64, usize) {
    let (i, _) = lnv
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let a = values[i.saturating_sub(1)];
    let b = values[(i + 1).min(values.len() - 1)];
    let (r, v) = golden_max(&f, a, b, GOLDEN_ITERS);
    if v >= lnv[i] {
        (r, v, i)
    } else {
        (values[i], lnv[i], i)
    }
}

/// Exact `ln Υ` for the Bernoulli family by summing over the binomial law.
///
/// The sup over `r ∈ [0, 1]` uses a grid of `r_grid` points including both
/// ends, refined by golden-section search around the best point.
pub fn upsilon_bernoulli_exact(comp: &Comparator, n: u64, r_grid: usize) -> Result<UpsilonEstimate> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let nn = n as usize;
    let lf = ln_factorials(nn);
    let nf = n as f64;
    let ln_sum = |r: f64| -> Result<f64> {
        let mut acc = LogSumExp::new();
        for k in 0..=nn {
            let kf = k as f64;
            let w = lf[nn] - lf[k] - lf[nn - k] + xlogy(kf, r) + xlogy(nf - kf, 1.0 - r);
            if w == f64::NEG_INFINITY {
                continue;
            }
            let d = comp.eval(kf / nf, r);
            if !d.is_finite() {
                return Err(Error::NonFinite { q: kf / nf, p: r });
            }
            acc.add(w + nf * d);
        }
        Ok(acc.value())
    };
    let rs = linspace(0.0, 1.0, r_grid.max(2));
    let lnv: Vec<f64> = rs.par_iter().map(|&r| ln_sum(r)).collect::<Result<_>>()?;
    let (r_star, v, _) = sup_over_grid(&rs, &lnv, |r| ln_sum(r).unwrap_or(f64::NEG_INFINITY));
    Ok(UpsilonEstimate {
        mode: UpsilonMode::Exact,
        ln_upsilon: v,
        r_star: Some(r_star),
        ci: None,
        tail_error: None,
        divergent_suspect: false,
        r_capped: false,
    })
}

enum SeriesOutcome {
    Converged { ln_sum: f64, tail: f64 },
    Truncated { ln_sum: f64, tail: f64 },
    Divergent,
}

/// `ln P(S = k)` for the `n`-fold sum of an integer-valued family at mean `r`.
fn lattice_log_pmf(family: Family, r: f64, n: u64) -> Result<impl Fn(u64) -> f64> {
    let nf = n as f64;
    let (a, b, shape) = match family {
        // Poisson(n r)
        Family::Poisson => (nf * r, 0.0, 0.0),
        // NB(n r_nb, p_succ = r_nb / (r_nb + r))
        Family::NegativeBinomial { r: rn } => (r / (rn + r), rn / (rn + r), nf * rn),
        _ => return domain(format!("series mode needs an integer-valued family, got {family}")),
    };
    let is_poisson = matches!(family, Family::Poisson);
    let lg_shape = if is_poisson { 0.0 } else { ln_gamma(shape) };
    Ok(move |k: u64| {
        let kf = k as f64;
        if is_poisson {
            xlogy(kf, a) - a - ln_gamma(kf + 1.0)
        } else {
            ln_gamma(kf + shape) - lg_shape - ln_gamma(kf + 1.0) + xlogy(kf, a) + shape * b.ln()
        }
    })
}

fn series_at(comp: &Comparator, family: Family, r: f64, n: u64, eps: f64) -> Result<SeriesOutcome> {
    let log_pmf = lattice_log_pmf(family, r, n)?;
    let nf = n as f64;
    let term = |k: u64| -> Result<f64> {
        let w = log_pmf(k);
        if w == f64::NEG_INFINITY {
            return Ok(w);
        }
        let d = comp.eval(k as f64 / nf, r);
        if d.is_nan() || d == f64::INFINITY {
            return Err(Error::NonFinite { q: k as f64 / nf, p: r });
        }
        Ok(w + nf * d)
    };
    let mut acc = LogSumExp::new();
    let mut prev = term(0)?;
    acc.add(prev);
    let mut past_peak = false;
    let mut last_ratio = f64::INFINITY;
    let mut slow_run = 0usize;
    let mut k: u64 = 1;
    loop {
        let cur = term(k)?;
        acc.add(cur);
        let step = cur - prev;
        if step < 0.0 {
            past_peak = true;
        }
        if past_peak {
            // ratio a_k / a_{k-1}; tail after k bounded by a_k ρ / (1 − ρ)
            // while the ratios keep decreasing
            let ratio = step.exp();
            let ratios_falling = ratio <= last_ratio;
            last_ratio = ratio;
            if ratio < 1.0 && ratios_falling {
                let ln_tail = cur + ratio.ln() - (-ratio).ln_1p();
                let rel = (ln_tail - acc.value()).exp();
                if rel < eps && cur < prev {
                    return Ok(SeriesOutcome::Converged {
                        ln_sum: acc.value(),
                        tail: rel,
                    });
                }
            }
            // Raabe statistic k (a_{k-1} / a_k − 1)
            let raabe = k as f64 * (-step).exp_m1();
            if raabe <= 1.0 {
                slow_run += 1;
                if slow_run >= RAABE_RUN {
                    return Ok(SeriesOutcome::Divergent);
                }
            } else {
                slow_run = 0;
            }
        } else if step == f64::INFINITY || cur == f64::INFINITY {
            return Ok(SeriesOutcome::Divergent);
        }
        if k as usize >= MAX_SERIES_TERMS {
            if !past_peak {
                return Ok(SeriesOutcome::Divergent);
            }
            let raabe = k as f64 * (-step).exp_m1();
            let ln_tail = cur + (k as f64).ln() - (raabe - 1.0).max(1e-300).ln();
            return Ok(SeriesOutcome::Truncated {
                ln_sum: acc.value(),
                tail: (ln_tail - acc.value()).exp(),
            });
        }
        prev = cur;
        k += 1;
    }
}

/// `ln Υ` for Poisson or negative-binomial data by truncated series.
pub fn upsilon_series(comp: &Comparator, family: Family, n: u64, eps: f64, grid: RGrid) -> Result<UpsilonEstimate> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if !(eps > 0.0) {
        return domain("series tolerance must be positive");
    }
    let rs = grid.values();
    let outcomes: Vec<SeriesOutcome> = rs
        .par_iter()
        .map(|&r| series_at(comp, family, r, n, eps))
        .collect::<Result<_>>()?;
    if let Some(i) = outcomes.iter().position(|o| matches!(o, SeriesOutcome::Divergent)) {
        return Ok(UpsilonEstimate::divergent(Some(rs[i])));
    }
    let mut tail_max: f64 = 0.0;
    let lnv: Vec<f64> = outcomes
        .iter()
        .map(|o| match *o {
            SeriesOutcome::Converged { ln_sum, tail } => {
                tail_max = tail_max.max(tail);
                ln_sum
            }
            SeriesOutcome::Truncated { ln_sum, tail } => {
                tail_max = tail_max.max(tail);
                ln_sum
            }
            SeriesOutcome::Divergent => unreachable!(),
        })
        .collect();
    let at = |r: f64| match series_at(comp, family, r, n, eps) {
        Ok(SeriesOutcome::Converged { ln_sum, .. }) | Ok(SeriesOutcome::Truncated { ln_sum, .. }) => ln_sum,
        _ => f64::NEG_INFINITY,
    };
    let (r_star, v, i) = sup_over_grid(&rs, &lnv, at);
    Ok(UpsilonEstimate {
        mode: UpsilonMode::Truncated,
        ln_upsilon: v,
        r_star: Some(r_star),
        ci: None,
        tail_error: Some(tail_max.ln_1p()),
        divergent_suspect: false,
        r_capped: i + 1 == rs.len() && family.mean_domain().hi.is_infinite(),
    })
}

/// [`upsilon_series`] over the Poisson family with the default grid.
pub fn upsilon_poisson_series(comp: &Comparator, n: u64, eps: f64) -> Result<UpsilonEstimate> {
    upsilon_series(comp, Family::Poisson, n, eps, RGrid::default_for(Family::Poisson))
}

/// Log-density of `x̄` under `P_r^n` in the integration coordinate `s`
/// (`x = s` for gaussian, `x = e^s` otherwise), including the Jacobian.
fn xbar_log_density(family: Family, r: f64, n: u64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    match family {
        Family::Gaussian { sigma2 } => {
            let var = sigma2 / nf;
            (s, -0.5 * (s - r).powi(2) / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln())
        }
        Family::Gamma { shape } => {
            // x̄ ∼ Γ(n k, r / (n k)); density in s = ln x
            let a = nf * shape;
            let x = s.exp();
            (x, a * (a / r).ln() + a * s - a * x / r - ln_gamma(a))
        }
        Family::InverseGaussian { lambda } => {
            // x̄ ∼ IG(r, n λ)
            let l = nf * lambda;
            let x = s.exp();
            let ld = 0.5 * (l / (2.0 * std::f64::consts::PI)).ln() - 1.5 * s - l * (x - r).powi(2) / (2.0 * r * r * x);
            (x, ld + s)
        }
        _ => (f64::NAN, f64::NAN),
    }
}

fn quadrature_at(comp: &Comparator, family: Family, r: f64, n: u64, eps: f64) -> Result<Option<f64>> {
    let nf = n as f64;
    let (center, scale) = match family {
        Family::Gaussian { sigma2 } => (r, (sigma2 / nf).sqrt()),
        Family::Gamma { shape } => (r.ln(), 1.0 / (nf * shape).sqrt()),
        Family::InverseGaussian { lambda } => (r.ln(), (r / (nf * lambda)).sqrt()),
        _ => return domain(format!("quadrature mode supports gaussian, gamma and invgauss, got {family}")),
    };
    let integrand = |s: f64| -> Result<f64> {
        let (x, ld) = xbar_log_density(family, r, n, s);
        if ld == f64::NEG_INFINITY {
            return Ok(ld);
        }
        let d = comp.eval(x, r);
        if d.is_nan() {
            return Err(Error::NonFinite { q: x, p: r });
        }
        Ok(ld + nf * d)
    };
    let h = scale / 64.0;
    // in log coordinates e^s must stay finite and nonzero
    let max_half = match family {
        Family::Gaussian { .. } => 8.0 * scale * 2f64.powi(11),
        _ => (8.0 * scale * 2f64.powi(11)).min(600.0),
    };
    let mut prev: Option<f64> = None;
    let mut half_width = (8.0 * scale).min(max_half);
    loop {
        let m = (half_width / h).ceil() as usize;
        let mut vals = Vec::with_capacity(2 * m + 1);
        for j in 0..=2 * m {
            vals.push(integrand(center - half_width + j as f64 * h)?);
        }
        // Simpson weights in log domain
        let mut acc = LogSumExp::new();
        for (j, v) in vals.iter().enumerate() {
            let w = if j == 0 || j == 2 * m {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc.add(v + (w * h / 3.0f64).ln());
        }
        let total = acc.value();
        let edge = vals[0].max(vals[2 * m]) + (half_width).ln();
        if edge - total < eps.ln() {
            if let Some(p) = prev {
                if (total - p).abs() < eps {
                    return Ok(Some(total));
                }
            }
            prev = Some(total);
        } else {
            prev = None;
        }
        if half_width >= max_half {
            return Ok(None);
        }
        half_width = (2.0 * half_width).min(max_half);
    }
}

/// `ln Υ` by quadrature against the exact law of `x̄` (gaussian, gamma and
/// inverse-Gaussian families). Reports divergence when the integrand does
/// not decay within `2^12` scale widths.
pub fn upsilon_quadrature(comp: &Comparator, family: Family, n: u64, eps: f64, grid: RGrid) -> Result<UpsilonEstimate> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let rs = grid.values();
    let vals: Vec<Option<f64>> = rs
        .par_iter()
        .map(|&r| quadrature_at(comp, family, r, n, eps))
        .collect::<Result<_>>()?;
    if let Some(i) = vals.iter().position(Option::is_none) {
        return Ok(UpsilonEstimate::divergent(Some(rs[i])));
    }
    let lnv: Vec<f64> = vals.into_iter().map(Option::unwrap).collect();
    let at = |r: f64| quadrature_at(comp, family, r, n, eps).ok().flatten().unwrap_or(f64::NEG_INFINITY);
    let (r_star, v, i) = sup_over_grid(&rs, &lnv, at);
    Ok(UpsilonEstimate {
        mode: UpsilonMode::Truncated,
        ln_upsilon: v,
        r_star: Some(r_star),
        ci: None,
        tail_error: Some(eps),
        divergent_suspect: false,
        r_capped: (i + 1 == rs.len() && family.mean_domain().hi.is_infinite()) || (i == 0 && family.mean_domain().lo.is_infinite()),
    })
}

fn log_mean_exp(xs: &[f64]) -> f64 {
    log_sum_exp(xs) - (xs.len() as f64).ln()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Monte Carlo `ln Υ`: for each `r` in `r_grid`, the log-mean-exp of
/// `n Δ(x̄, r)` over `samples` draws, maximized over the grid, with a
/// percentile-bootstrap 95% interval at the maximizing `r`.
///
/// Each grid point owns the random stream `(seed, index)`.
pub fn upsilon_monte_carlo(
    comp: &Comparator,
    family: Family,
    n: u64,
    r_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<UpsilonEstimate> {
    if n == 0 || samples == 0 || r_grid.is_empty() {
        return domain("n, samples and the r-grid must be nonempty");
    }
    let dom = family.mean_domain();
    if let Some(r) = r_grid.iter().find(|r| !dom.contains(**r)) {
        return domain(format!("r = {r} outside the {} mean domain", family.name()));
    }
    let nf = n as f64;
    let draws = |i: usize, r: f64| -> Result<Vec<f64>> {
        let mut rng = CounterRng::new(seed, i as u64);
        (0..samples)
            .map(|_| {
                let x = family.draw_sum(r, n, &mut rng) / nf;
                let d = comp.eval(x, r);
                if d.is_nan() {
                    Err(Error::NonFinite { q: x, p: r })
                } else {
                    Ok(nf * d)
                }
            })
            .collect()
    };
    let per_r: Vec<f64> = r_grid
        .par_iter()
        .enumerate()
        .map(|(i, &r)| draws(i, r).map(|v| log_mean_exp(&v)))
        .collect::<Result<_>>()?;
    let (i_best, v) = per_r
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let vals = draws(i_best, r_grid[i_best])?;

    let mut boot_rng = CounterRng::new(seed, u64::MAX).derive(i_best as u64);
    let mut boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let mut acc = LogSumExp::new();
            for _ in 0..samples {
                let j = (boot_rng.uniform() * samples as f64) as usize;
                acc.add(vals[j.min(samples - 1)]);
            }
            acc.value() - (samples as f64).ln()
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let ci = (percentile(&boots, 0.025).min(v), percentile(&boots, 0.975).max(v));

    // share of the top 1% of samples in the total, and growth of the
    // estimate along prefixes
    let mut sorted = vals.clone();
    sorted.sort_by(f64::total_cmp);
    let top = (samples / 100).max(1);
    let top_share = (log_sum_exp(&sorted[samples - top..]) - log_sum_exp(&sorted)).exp();
    let prefixes = [samples / 4, samples / 2, samples];
    let growing = prefixes
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| log_sum_exp(&vals[..m]) - (m as f64).ln())
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1] > w[0]);
    Ok(UpsilonEstimate {
        mode: UpsilonMode::MonteCarlo,
        ln_upsilon: v,
        r_star: Some(r_grid[i_best]),
        ci: Some(ci),
        tail_error: None,
        divergent_suspect: growing && top_share > 0.5,
        r_capped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_upsilon_kl_enumerated(n: u64) -> f64 {
        // r-independent closed sum  Σ C(n,k) (k/n)^k (1 − k/n)^{n−k}
        let lf = ln_factorials(n as usize);
        let nf = n as f64;
        let terms: Vec<f64> = (0..=n as usize)
            .map(|k| {
                let kf = k as f64;
                lf[n as usize] - lf[k] - lf[n as usize - k] + xlogy(kf, kf / nf) + xlogy(nf - kf, 1.0 - kf / nf)
            })
            .collect();
        log_sum_exp(&terms)
    }

    #[test]
    fn kl_at_n1_is_ln2() {
        let u = upsilon_bernoulli_exact(&Comparator::BinaryKl, 1, 2001).unwrap();
        assert!((u.ln_upsilon - 2f64.ln()).abs() < 1e-12);
        assert_eq!(u.mode, UpsilonMode::Exact);
    }

    #[test]
    fn kl_matches_enumeration() {
        for n in [2, 7, 30, 100] {
            let u = upsilon_bernoulli_exact(&Comparator::BinaryKl, n, 101).unwrap();
            assert!((u.ln_upsilon - ln_upsilon_kl_enumerated(n)).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn zero_comparator_gives_zero() {
        let z = Comparator::ScaledDiff { t: 0.0 };
        assert!(upsilon_bernoulli_exact(&z, 13, 201).unwrap().ln_upsilon.abs() < 1e-12);
        assert!(upsilon_poisson_series(&z, 4, 1e-12).unwrap().ln_upsilon.abs() < 1e-9);
        let mc = upsilon_monte_carlo(&z, Family::gamma(2.0).unwrap(), 5, &[0.5, 1.0], 1000, 3).unwrap();
        assert_eq!(mc.ln_upsilon, 0.0);
    }

    #[test]
    fn catoni_is_exponential_identity() {
        let c = Comparator::Catoni { gamma: -1.3 };
        let u = upsilon_bernoulli_exact(&c, 25, 201).unwrap();
        assert!(u.ln_upsilon.abs() < 1e-10, "{}", u.ln_upsilon);
    }

    #[test]
    fn poisson_cramer_diverges() {
        let grid = RGrid::default_for(Family::Poisson).with_points(11);
        let u = upsilon_series(&Comparator::Cramer(Family::Poisson), Family::Poisson, 10, 1e-10, grid).unwrap();
        assert!(u.is_divergent());
    }

    #[test]
    fn poisson_diff_has_unit_upsilon() {
        let grid = RGrid::default_for(Family::Poisson).with_points(41);
        let u = upsilon_series(&Comparator::PoissonDiff { t: 1.0 }, Family::Poisson, 5, 1e-12, grid).unwrap();
        assert!(u.ln_upsilon.abs() < 1e-9, "{}", u.ln_upsilon);
        assert_eq!(u.mode, UpsilonMode::Truncated);
    }

    #[test]
    fn negbin_parametric_has_unit_upsilon() {
        let nb = Family::negative_binomial(3.0).unwrap();
        let grid = RGrid { lo: 0.1, hi: 5.0, points: 11 };
        let c = Comparator::Parametric { family: nb, t: -0.8 };
        let u = upsilon_series(&c, nb, 4, 1e-12, grid).unwrap();
        assert!(u.ln_upsilon.abs() < 1e-9, "{}", u.ln_upsilon);
    }

    #[test]
    fn gaussian_quadrature() {
        let data = Family::gaussian(1.0).unwrap();
        let grid = RGrid { lo: -1.0, hi: 1.0, points: 5 };
        // comparator variance 2 over unit-variance data: Υ = √2
        let wide = Comparator::Cramer(Family::gaussian(2.0).unwrap());
        let u = upsilon_quadrature(&wide, data, 5, 1e-10, grid).unwrap();
        assert!((u.ln_upsilon - 0.5 * 2f64.ln()).abs() < 1e-8, "{}", u.ln_upsilon);
        let u = upsilon_quadrature(&Comparator::Cramer(data), data, 5, 1e-10, grid).unwrap();
        assert!(u.is_divergent());
    }

    #[test]
    fn gamma_cramer_diverges_by_quadrature() {
        let g = Family::gamma(5.0).unwrap();
        let grid = RGrid { lo: 0.5, hi: 2.0, points: 3 };
        let u = upsilon_quadrature(&Comparator::Cramer(g), g, 3, 1e-10, grid).unwrap();
        assert!(u.is_divergent());
        let c = Comparator::Parametric { family: g, t: -2.0 };
        let u = upsilon_quadrature(&c, g, 3, 1e-10, grid).unwrap();
        assert!(u.ln_upsilon.abs() < 1e-8, "{}", u.ln_upsilon);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_brackets() {
        let g = Family::gaussian(1.0).unwrap();
        let c = Comparator::Cramer(Family::gaussian(2.0).unwrap());
        let a = upsilon_monte_carlo(&c, g, 5, &[0.0, 1.0], 20_000, 9).unwrap();
        let b = upsilon_monte_carlo(&c, g, 5, &[0.0, 1.0], 20_000, 9).unwrap();
        assert_eq!(a, b);
        let (lo, hi) = a.ci.unwrap();
        assert!(lo <= a.ln_upsilon && a.ln_upsilon <= hi);
        assert!((a.ln_upsilon - 0.5 * 2f64.ln()).abs() < 0.05);
    }

    #[test]
    fn json_shape() {
        let u = upsilon_bernoulli_exact(&Comparator::BinaryKl, 1, 11).unwrap();
        let v: serde_json::Value = serde_json::to_value(u).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 5, "{keys:?}");
        for k in ["mode", "ln_upsilon", "r_star", "ci", "tail_error"] {
            assert!(v.get(k).is_some());
        }
        assert_eq!(v["mode"], "exact");
    }
}
