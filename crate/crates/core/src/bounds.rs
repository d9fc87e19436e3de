//! Named bounds: average and PAC-Bayesian Cramér bounds, their union-bound
//! corrections, parametric infima, the samplewise bound and comparison
//! surfaces over `(α, β/n)` grids.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::Family;
use crate::inversion::{
    infimum_over_parameter, invert, BoundQuery, BoundResult, Comparator, Iota, ParamRange,
};
use crate::INVERSION_TOL;

/// Union-bound correction of a PAC bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Correction {
    One,
    /// `ln Υ` supplied by the caller.
    Chernoff { ln_upsilon: f64 },
    Xi,
    TwoECeil { u: f64 },
}

impl Correction {
    fn iota(self, family: Family) -> Result<Iota> {
        Ok(match self {
            Correction::One => Iota::One,
            Correction::Chernoff { ln_upsilon } => {
                if !family.cramer_upsilon_finite() {
                    return Err(Error::CorrectionDivergent(format!(
                        "Υ of the {} Cramér function is unbounded; use xi or 2eceil",
                        family.name()
                    )));
                }
                Iota::Explicit { ln: ln_upsilon }
            }
            Correction::Xi => Iota::Xi,
            Correction::TwoECeil { u } => Iota::TwoECeil { u },
        })
    }
}

impl FromStr for Correction {
    type Err = Error;

    /// `one`, `xi`, `2eceil`, `2eceil=<u>`, `chernoff=<ln_upsilon>`.
    /// A bare `2eceil` leaves `u` at NaN, meaning "use n".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once('=') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let num = |v: &str| v.parse::<f64>().map_err(|e| Error::Config(format!("bad correction value `{v}`: {e}")));
        match (name, arg) {
            ("one", None) => Ok(Correction::One),
            ("xi", None) => Ok(Correction::Xi),
            ("2eceil", None) => Ok(Correction::TwoECeil { u: f64::NAN }),
            ("2eceil", Some(v)) => Ok(Correction::TwoECeil { u: num(v)? }),
            ("chernoff", Some(v)) => Ok(Correction::Chernoff { ln_upsilon: num(v)? }),
            _ => Err(Error::Config(format!("unknown correction `{s}`"))),
        }
    }
}

/// Parametric difference comparators whose CGF term is mean-independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiffKind {
    Poisson,
    Laplace { b: f64 },
    Gaussian { sigma2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    AverageCramer,
    PacCramerChernoff,
    PacCramerXi,
    PacCramerTwoECeil,
    CatoniInf,
    Mls,
    PoissonDiffInf,
    LaplaceDiffInf,
    SubgaussianDiffInf,
    SamplewiseAverage,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        BoundKind::AverageCramer,
        BoundKind::PacCramerChernoff,
        BoundKind::PacCramerXi,
        BoundKind::PacCramerTwoECeil,
        BoundKind::CatoniInf,
        BoundKind::Mls,
        BoundKind::PoissonDiffInf,
        BoundKind::LaplaceDiffInf,
        BoundKind::SubgaussianDiffInf,
        BoundKind::SamplewiseAverage,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::AverageCramer => "average_cramer",
            BoundKind::PacCramerChernoff => "pac_cramer_chernoff",
            BoundKind::PacCramerXi => "pac_cramer_xi",
            BoundKind::PacCramerTwoECeil => "pac_cramer_two_e_ceil",
            BoundKind::CatoniInf => "catoni_inf",
            BoundKind::Mls => "mls",
            BoundKind::PoissonDiffInf => "poisson_diff_inf",
            BoundKind::LaplaceDiffInf => "laplace_diff_inf",
            BoundKind::SubgaussianDiffInf => "subgaussian_diff_inf",
            BoundKind::SamplewiseAverage => "samplewise_average",
        }
    }

    /// Average (in-expectation) bounds take no confidence level.
    pub fn is_average(&self) -> bool {
        matches!(
            self,
            BoundKind::AverageCramer
                | BoundKind::PoissonDiffInf
                | BoundKind::LaplaceDiffInf
                | BoundKind::SubgaussianDiffInf
                | BoundKind::SamplewiseAverage
        )
    }

    /// Bounds that only serve as a reference envelope.
    pub fn is_reference_only(&self) -> bool {
        matches!(self, BoundKind::CatoniInf)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown bound kind `{s}`")))
    }
}

/// Parameter ranges of the parametric infima.
fn catoni_range() -> ParamRange {
    ParamRange::log(1e-3, 50.0)
}

fn poisson_diff_range() -> ParamRange {
    ParamRange::log(1e-10, 60.0)
}

fn laplace_diff_range(b: f64) -> ParamRange {
    ParamRange::log(1e-9 / b, (1.0 - 1e-12) / b)
}

fn gaussian_diff_range() -> ParamRange {
    ParamRange::log(1e-12, 1e12)
}

fn check_alpha(family: Family, alpha: f64) -> Result<()> {
    if family.mean_domain().contains_closure(alpha) && alpha.is_finite() {
        Ok(())
    } else {
        domain(format!("alpha = {alpha} outside the {} loss range", family.name()))
    }
}

/// Optimal average bound: `B̂` of the family's Cramér function with `ι = 1`.
pub fn average_bound(family: Family, alpha: f64, beta: f64, n: u64) -> Result<BoundResult> {
    check_alpha(family, alpha)?;
    invert(&Comparator::Cramer(family), &BoundQuery::average(alpha, beta, n), INVERSION_TOL)
}

/// PAC-Bayesian Cramér bound with budget `(β + ln(ι/δ)) / n`.
pub fn pac_bound(family: Family, alpha: f64, beta: f64, n: u64, delta: f64, correction: Correction) -> Result<BoundResult> {
    check_alpha(family, alpha)?;
    let correction = match correction {
        Correction::TwoECeil { u } if u.is_nan() => Correction::TwoECeil { u: n as f64 },
        c => c,
    };
    let q = BoundQuery::average(alpha, beta, n)
        .with_delta(delta)
        .with_iota(correction.iota(family)?);
    invert(&Comparator::Cramer(family), &q, INVERSION_TOL)
}

/// The `ι = 1` Cramér envelope (`B` when `δ` is given, `B̂` otherwise).
/// Never a certified bound; always flagged `reference_only`.
pub fn optimistic_reference(family: Family, alpha: f64, beta: f64, n: u64, delta: Option<f64>) -> Result<BoundResult> {
    check_alpha(family, alpha)?;
    let mut q = BoundQuery::average(alpha, beta, n);
    q.delta = delta;
    let mut r = invert(&Comparator::Cramer(family), &q, INVERSION_TOL)?;
    r.reference_only = true;
    Ok(r)
}

/// `inf_γ` of the Catoni bound with `ι = 1`.
pub fn catoni_inf_bound(alpha: f64, beta: f64, n: u64, delta: Option<f64>) -> Result<BoundResult> {
    check_alpha(Family::Bernoulli, alpha)?;
    let mut q = BoundQuery::average(alpha, beta, n);
    q.delta = delta;
    let mut r = infimum_over_parameter(|g| Comparator::Catoni { gamma: -g }, &q, catoni_range(), INVERSION_TOL)?.result;
    r.reference_only = true;
    Ok(r)
}

/// Binary-KL bound with the `2√n` correction.
pub fn mls_bound(alpha: f64, beta: f64, n: u64, delta: f64) -> Result<BoundResult> {
    check_alpha(Family::Bernoulli, alpha)?;
    let q = BoundQuery::average(alpha, beta, n)
        .with_delta(delta)
        .with_iota(Iota::MlsSqrt);
    invert(&Comparator::BinaryKl, &q, INVERSION_TOL)
}

/// Average bound from the difference comparator `Δ^{-t}` of a family whose
/// CGF offset does not depend on the mean, minimized over `t > 0`.
pub fn diff_based_bound(kind: DiffKind, alpha: f64, beta: f64, n: u64) -> Result<BoundResult> {
    diff_based_bound_tol(kind, alpha, beta, n, INVERSION_TOL)
}

pub fn diff_based_bound_tol(kind: DiffKind, alpha: f64, beta: f64, n: u64, tol: f64) -> Result<BoundResult> {
    let q = BoundQuery::average(alpha, beta, n);
    let opt = match kind {
        DiffKind::Poisson => {
            check_alpha(Family::Poisson, alpha)?;
            infimum_over_parameter(|t| Comparator::PoissonDiff { t }, &q, poisson_diff_range(), tol)?
        }
        DiffKind::Laplace { b } => {
            let fam = Family::laplace(b)?;
            check_alpha(fam, alpha)?;
            infimum_over_parameter(|t| Comparator::LaplaceDiff { t, b }, &q, laplace_diff_range(b), tol)?
        }
        DiffKind::Gaussian { sigma2 } => {
            let family = Family::gaussian(sigma2)?;
            infimum_over_parameter(|t| Comparator::Parametric { family, t: -t }, &q, gaussian_diff_range(), tol)?
        }
    };
    Ok(opt.result)
}

/// Mean over samples of the single-sample Cramér bounds `B̂_1(α_i, β_i)`.
pub fn samplewise_bound(family: Family, per_sample: &[(f64, f64)]) -> Result<f64> {
    if per_sample.is_empty() {
        return domain("samplewise bound needs at least one sample");
    }
    let mut total = 0.0;
    for &(a, b) in per_sample {
        total += average_bound(family, a, b, 1)?.rho;
    }
    Ok(total / per_sample.len() as f64)
}

/// A fully specified bound, evaluated at `(α, β, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub kind: BoundKind,
    pub family: Family,
    pub delta: Option<f64>,
    /// `ln Υ` for the Chernoff correction; defaults to `ln(2√n)` for
    /// Bernoulli.
    pub ln_upsilon: Option<f64>,
    /// `u` of the `2e⌈u⌉` correction; defaults to `n`.
    pub u: Option<f64>,
    /// Variance proxy of the sub-Gaussian difference bound; defaults to the
    /// Gaussian family's variance.
    pub sigma2: Option<f64>,
}

impl BoundSpec {
    pub fn new(kind: BoundKind, family: Family) -> Self {
        Self {
            kind,
            family,
            delta: None,
            ln_upsilon: None,
            u: None,
            sigma2: None,
        }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self {
            delta: Some(delta),
            ..self
        }
    }

    /// Checks the `δ` plumbing and family requirements of the kind.
    pub fn validate(&self) -> Result<()> {
        self.family.validated()?;
        if self.kind.is_average() && self.delta.is_some() {
            return Err(Error::Config(format!("{} is an average bound and takes no delta", self.kind)));
        }
        let needs_delta = matches!(
            self.kind,
            BoundKind::PacCramerChernoff | BoundKind::PacCramerXi | BoundKind::PacCramerTwoECeil | BoundKind::Mls
        );
        if needs_delta && self.delta.is_none() {
            return Err(Error::Config(format!("{} requires delta", self.kind)));
        }
        let bernoulli_only = matches!(self.kind, BoundKind::CatoniInf | BoundKind::Mls);
        if bernoulli_only && self.family != Family::Bernoulli {
            return Err(Error::Config(format!("{} applies to bounded (bernoulli) losses only", self.kind)));
        }
        match self.kind {
            BoundKind::PoissonDiffInf if self.family != Family::Poisson => {
                Err(Error::Config("poisson_diff_inf needs the poisson family".into()))
            }
            BoundKind::LaplaceDiffInf if !matches!(self.family, Family::Laplace { .. }) => {
                Err(Error::Config("laplace_diff_inf needs a laplace family".into()))
            }
            BoundKind::SubgaussianDiffInf
                if self.sigma2.is_none() && !matches!(self.family, Family::Gaussian { .. }) =>
            {
                Err(Error::Config("subgaussian_diff_inf needs sigma2 or a gaussian family".into()))
            }
            BoundKind::PacCramerChernoff if self.ln_upsilon.is_none() && self.family != Family::Bernoulli => {
                if self.family.cramer_upsilon_finite() {
                    Err(Error::Config("pac_cramer_chernoff needs ln_upsilon".into()))
                } else {
                    Err(Error::CorrectionDivergent(format!(
                        "Υ of the {} Cramér function is unbounded",
                        self.family.name()
                    )))
                }
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, alpha: f64, beta: f64, n: u64) -> Result<BoundResult> {
        self.validate()?;
        let fam = self.family;
        let delta = || self.delta.ok_or_else(|| Error::Config(format!("{} requires delta", self.kind)));
        match self.kind {
            BoundKind::AverageCramer => average_bound(fam, alpha, beta, n),
            BoundKind::PacCramerChernoff => {
                let ln_upsilon = self.ln_upsilon.unwrap_or_else(|| (2.0 * (n as f64).sqrt()).ln());
                pac_bound(fam, alpha, beta, n, delta()?, Correction::Chernoff { ln_upsilon })
            }
            BoundKind::PacCramerXi => pac_bound(fam, alpha, beta, n, delta()?, Correction::Xi),
            BoundKind::PacCramerTwoECeil => {
                let u = self.u.unwrap_or(n as f64);
                pac_bound(fam, alpha, beta, n, delta()?, Correction::TwoECeil { u })
            }
            BoundKind::CatoniInf => catoni_inf_bound(alpha, beta, n, self.delta),
            BoundKind::Mls => mls_bound(alpha, beta, n, delta()?),
            BoundKind::PoissonDiffInf => diff_based_bound(DiffKind::Poisson, alpha, beta, n),
            BoundKind::LaplaceDiffInf => match fam {
                Family::Laplace { scale } => diff_based_bound(DiffKind::Laplace { b: scale }, alpha, beta, n),
                _ => unreachable!("validated"),
            },
            BoundKind::SubgaussianDiffInf => {
                let sigma2 = match (self.sigma2, fam) {
                    (Some(s), _) => s,
                    (None, Family::Gaussian { sigma2 }) => sigma2,
                    _ => unreachable!("validated"),
                };
                diff_based_bound(DiffKind::Gaussian { sigma2 }, alpha, beta, n)
            }
            BoundKind::SamplewiseAverage => Ok(average_bound(fam, alpha, beta, 1)?),
        }
    }
}

/// Grid of a comparison surface. `β = (β/n) · n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub alphas: Vec<f64>,
    pub beta_over_n: Vec<f64>,
    pub n: u64,
    /// Apply `min{1, ·}` to both bounds.
    pub clamp: bool,
}

/// Values of two bounds and their difference on a grid, in row-major
/// order (alpha outer, beta/n inner). Failed cells hold NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub alphas: Vec<f64>,
    pub beta_over_n: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub diff: Vec<f64>,
}

impl Surface {
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i * self.beta_over_n.len() + j
    }
}

/// Evaluates any number of bounds on the grid; returns one column per spec
/// in row-major cell order. Cells without a finite bound hold `+inf` (1 when
/// clamped); other failures become NaN.
pub fn evaluate_grid(specs: &[BoundSpec], grid: &SurfaceGrid) -> Vec<Vec<f64>> {
    let cells: Vec<(f64, f64)> = grid
        .alphas
        .iter()
        .flat_map(|&a| grid.beta_over_n.iter().map(move |&b| (a, b)))
        .collect();
    let nf = grid.n as f64;
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(a, bn)| {
            specs
                .iter()
                .map(|s| match s.evaluate(a, bn * nf, grid.n) {
                    Ok(r) if grid.clamp => r.rho.min(1.0),
                    Ok(r) => r.rho,
                    Err(Error::NoFiniteBound(_)) if grid.clamp => 1.0,
                    Err(Error::NoFiniteBound(_)) => f64::INFINITY,
                    Err(_) => f64::NAN,
                })
                .collect()
        })
        .collect();
    (0..specs.len()).map(|k| rows.iter().map(|r| r[k]).collect()).collect()
}

/// `kind_a − kind_b` on the grid.
pub fn comparison_surface(a: &BoundSpec, b: &BoundSpec, grid: &SurfaceGrid) -> Surface {
    let cols = evaluate_grid(&[*a, *b], grid);
    let diff = cols[0].iter().zip(&cols[1]).map(|(x, y)| x - y).collect();
    let mut it = cols.into_iter();
    Surface {
        alphas: grid.alphas.clone(),
        beta_over_n: grid.beta_over_n.clone(),
        a: it.next().unwrap_or_default(),
        b: it.next().unwrap_or_default(),
        diff,
    }
}

/// `points` log-spaced sample sizes from `nmin` to `nmax`, rounded and
/// deduplicated.
pub fn ndep_sizes(nmin: u64, nmax: u64, points: usize) -> Result<Vec<u64>> {
    if nmin == 0 || nmax < nmin || points == 0 {
        return Err(Error::Config(format!("need 1 ≤ nmin ≤ nmax and points ≥ 1 (got {nmin}, {nmax}, {points})")));
    }
    if points == 1 || nmin == nmax {
        return Ok(vec![nmin]);
    }
    let mut ns: Vec<u64> = crate::search::logspace(nmin as f64, nmax as f64, points)
        .into_iter()
        .map(|x| (x.round() as u64).clamp(nmin, nmax))
        .collect();
    ns.dedup();
    Ok(ns)
}

/// The bound at fixed `(α, β)` for each sample size; `+inf` where no finite
/// bound exists.
pub fn n_dependence(spec: &BoundSpec, alpha: f64, beta: f64, ns: &[u64]) -> Result<Vec<(u64, f64)>> {
    ns.par_iter()
        .map(|&n| match spec.evaluate(alpha, beta, n) {
            Ok(r) => Ok((n, r.rho)),
            Err(Error::NoFiniteBound(_)) => Ok((n, f64::INFINITY)),
            Err(e) => Err(e),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::linspace;

    #[test]
    fn average_examples() {
        assert_eq!(average_bound(Family::Bernoulli, 0.3, 0.0, 10).unwrap().rho, 0.3);
        let g = average_bound(Family::gaussian(1.0).unwrap(), 0.3, 2.0, 100).unwrap();
        assert!((g.rho - 0.5).abs() < 1e-8);
    }

    #[test]
    fn gamma_average_matches_scalar_root() {
        // k (α/ρ − 1 − ln(α/ρ)) = 1 with k = 5, α = 1
        let r = average_bound(Family::gamma(5.0).unwrap(), 1.0, 1000.0, 1000).unwrap().rho;
        let x = 1.0 / r;
        assert!((5.0 * (x - 1.0 - x.ln()) - 1.0).abs() < 1e-7);
        assert!((r - 2.0274).abs() < 1e-3);
    }

    #[test]
    fn mls_is_chernoff_with_2_sqrt_n() {
        let (a, b, n, d) = (0.1, 3.0, 200, 0.05);
        let ln_u = (2.0 * (n as f64).sqrt()).ln();
        let pac = pac_bound(Family::Bernoulli, a, b, n, d, Correction::Chernoff { ln_upsilon: ln_u }).unwrap();
        let mls = mls_bound(a, b, n, d).unwrap();
        assert!((pac.rho - mls.rho).abs() < 1e-9);
        let opt = optimistic_reference(Family::Bernoulli, a, b, n, Some(d)).unwrap();
        assert!(opt.reference_only);
        assert!(opt.rho <= mls.rho);
    }

    #[test]
    fn chernoff_rejected_for_divergent_families() {
        let r = pac_bound(Family::Poisson, 1.0, 1.0, 10, 0.05, Correction::Chernoff { ln_upsilon: 1.0 });
        assert!(matches!(r, Err(Error::CorrectionDivergent(_))));
        let spec = BoundSpec::new(BoundKind::PacCramerChernoff, Family::gamma(2.0).unwrap()).with_delta(0.05);
        assert!(matches!(spec.evaluate(1.0, 1.0, 10), Err(Error::CorrectionDivergent(_))));
    }

    #[test]
    fn delta_plumbing() {
        assert!(BoundSpec::new(BoundKind::AverageCramer, Family::Poisson)
            .with_delta(0.1)
            .evaluate(1.0, 1.0, 10)
            .is_err());
        assert!(BoundSpec::new(BoundKind::PacCramerXi, Family::Poisson).evaluate(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn pac_vanishes_with_n() {
        // the gap closes like sqrt(budget): ~1.4e-4 at n = 1e8, ~1.4e-8 at 1e16
        for fam in [Family::Bernoulli, Family::Poisson, Family::gamma(3.0).unwrap()] {
            let r = pac_bound(fam, 0.4, 0.0, 100_000_000, 0.05, Correction::Xi).unwrap();
            assert!((r.rho - 0.4).abs() < 5e-4, "{fam}: {}", r.rho);
            let r = pac_bound(fam, 0.4, 0.0, 10_000_000_000_000_000, 0.05, Correction::Xi).unwrap();
            assert!((r.rho - 0.4).abs() < 1e-6, "{fam}: {}", r.rho);
        }
    }

    #[test]
    fn diff_bounds() {
        let g = diff_based_bound(DiffKind::Gaussian { sigma2: 1.0 }, 0.2, 3.0, 50).unwrap();
        assert!((g.rho - (0.2 + (6.0f64 / 50.0).sqrt())).abs() < 1e-7, "{}", g.rho);
        let p = diff_based_bound(DiffKind::Poisson, 0.7, 0.0, 10).unwrap();
        assert!((p.rho - 0.7).abs() < 1e-8);
        let l = diff_based_bound(DiffKind::Laplace { b: 1.0 }, 0.5, 2.0, 10).unwrap();
        let c = average_bound(Family::laplace(1.0).unwrap(), 0.5, 2.0, 10).unwrap();
        assert!((l.rho - c.rho).abs() < 1e-6);
    }

    #[test]
    fn samplewise_compositions() {
        let fam = Family::Bernoulli;
        let same = samplewise_bound(fam, &[(0.2, 0.5); 4]).unwrap();
        assert!((same - average_bound(fam, 0.2, 0.5, 1).unwrap().rho).abs() < 1e-15);
        let two = samplewise_bound(fam, &[(0.2, 0.0), (0.2, 0.5)]).unwrap();
        let expected = 0.5 * (0.2 + average_bound(fam, 0.2, 0.5, 1).unwrap().rho);
        assert!((two - expected).abs() < 1e-15);
    }

    #[test]
    fn surface_zero_beta_row() {
        let grid = SurfaceGrid {
            alphas: linspace(0.0, 1.0, 5),
            beta_over_n: vec![0.0],
            n: 100,
            clamp: true,
        };
        let a = BoundSpec::new(BoundKind::SubgaussianDiffInf, Family::Bernoulli);
        let a = BoundSpec { sigma2: Some(0.25), ..a };
        let b = BoundSpec::new(BoundKind::AverageCramer, Family::Bernoulli);
        let s = comparison_surface(&a, &b, &grid);
        assert!(s.diff.iter().all(|d| d.abs() < 1e-9), "{:?}", s.diff);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(k.name().parse::<BoundKind>().unwrap(), k);
            assert_eq!(serde_json::to_value(k).unwrap(), k.name());
        }
        assert_eq!("2eceil=5".parse::<Correction>().unwrap(), Correction::TwoECeil { u: 5.0 });
        assert!("bogus".parse::<Correction>().is_err());
    }
}
