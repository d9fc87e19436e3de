//! Monte-Carlo validity harness.
//!
//! A synthetic problem has `M` hypotheses whose losses are drawn i.i.d. from
//! `P_{μ_h}`. Each trial draws `n` losses per hypothesis, forms the Gibbs
//! posterior `Q_n(h) ∝ Q_0(h) exp(−c n L̂(h))`, and checks the bound on the
//! exact population loss `Σ_h Q_n(h) μ_h`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{average_bound, BoundKind, BoundSpec};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::rng::CounterRng;
use crate::special::{clopper_pearson, LogSumExp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticProblem {
    pub hypothesis_means: Vec<f64>,
    pub prior_weights: Vec<f64>,
    pub family: Family,
    pub gibbs_temperature: f64,
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
}

/// Interval the hypothesis means are drawn from.
pub fn default_mean_interval(family: Family) -> (f64, f64) {
    match family {
        Family::Bernoulli => (0.05, 0.95),
        Family::Gaussian { .. } | Family::Laplace { .. } => (0.0, 1.0),
        Family::Poisson => (0.5, 3.0),
        _ => (0.5, 2.0),
    }
}

impl SyntheticProblem {
    pub fn new(
        family: Family,
        hypothesis_means: Vec<f64>,
        prior_weights: Vec<f64>,
        gibbs_temperature: f64,
        n: u64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let p = Self {
            hypothesis_means,
            prior_weights,
            family,
            gibbs_temperature,
            n,
            trials,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    /// `m` means drawn uniformly from [`default_mean_interval`], uniform prior.
    pub fn random(family: Family, m: usize, n: u64, c: f64, trials: usize, seed: u64) -> Result<Self> {
        let (lo, hi) = default_mean_interval(family);
        let mut rng = CounterRng::new(seed, u64::MAX - 1);
        let means = (0..m).map(|_| lo + (hi - lo) * rng.uniform()).collect();
        Self::new(family, means, vec![1.0 / m as f64; m], c, n, trials, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.hypothesis_means.len();
        if m < 2 {
            return Err(Error::Config("need at least two hypotheses".into()));
        }
        if self.prior_weights.len() != m {
            return Err(Error::Config("one prior weight per hypothesis".into()));
        }
        if self.prior_weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Config("prior weights must be nonnegative".into()));
        }
        let total: f64 = self.prior_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("prior weights sum to {total}, not 1")));
        }
        let dom = self.family.validated()?.mean_domain();
        if let Some(mu) = self.hypothesis_means.iter().find(|m| !dom.contains(**m)) {
            return Err(Error::Config(format!("hypothesis mean {mu} outside the {} domain", self.family.name())));
        }
        if !(self.gibbs_temperature >= 0.0) {
            return Err(Error::Config("gibbs temperature must be nonnegative".into()));
        }
        if self.n == 0 || self.trials == 0 {
            return Err(Error::Config("n and trials must be positive".into()));
        }
        Ok(())
    }

    /// Gibbs posterior for empirical losses `emp`.
    fn gibbs(&self, emp: &[f64]) -> Vec<f64> {
        let scale = self.gibbs_temperature * self.n as f64;
        let logw: Vec<f64> = self
            .prior_weights
            .iter()
            .zip(emp)
            .map(|(&w, &l)| if w > 0.0 { w.ln() - scale * l } else { f64::NEG_INFINITY })
            .collect();
        let mut acc = LogSumExp::new();
        logw.iter().for_each(|&v| acc.add(v));
        let z = acc.value();
        logw.iter().map(|&v| (v - z).exp()).collect()
    }
}

fn kl_discrete(q: &[f64], p: &[f64]) -> f64 {
    q.iter()
        .zip(p)
        .filter(|(qi, _)| **qi > 0.0)
        .map(|(&qi, &pi)| qi * (qi / pi).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Posterior statistics of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Draw {
    train: f64,
    pop: f64,
    kl: f64,
}

fn simulate(problem: &SyntheticProblem) -> Vec<Draw> {
    let n = problem.n;
    (0..problem.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = CounterRng::new(problem.seed, t as u64);
            let emp: Vec<f64> = problem
                .hypothesis_means
                .iter()
                .map(|&mu| problem.family.draw_sum(mu, n, &mut rng) / n as f64)
                .collect();
            let q = problem.gibbs(&emp);
            Draw {
                train: q.iter().zip(&emp).map(|(a, b)| a * b).sum(),
                pop: q.iter().zip(&problem.hypothesis_means).map(|(a, b)| a * b).sum(),
                kl: kl_discrete(&q, &problem.prior_weights),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub train_loss: f64,
    pub pop_loss: f64,
    pub kl: f64,
    pub per_sample_kls: Option<Vec<f64>>,
    pub bound_value: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub kind: BoundKind,
    pub family: String,
    pub m: usize,
    pub n: u64,
    pub gibbs_temperature: f64,
    pub seed: u64,
    pub delta: Option<f64>,
    pub trials: usize,
    pub violations: usize,
    pub rate: f64,
    /// Clopper-Pearson 95% interval of the violation rate.
    pub ci: (f64, f64),
    pub reference_only: bool,
    /// `ci.1 ≤ δ`, or always true for reference-only bounds.
    pub passed: bool,
}

fn summarize(problem: &SyntheticProblem, spec: &BoundSpec, records: &[TrialRecord]) -> TrialSummary {
    let violations = records.iter().filter(|r| r.violated).count();
    let trials = records.len();
    let ci = clopper_pearson(violations as u64, trials as u64, 0.05);
    let reference_only = spec.kind.is_reference_only();
    let passed = reference_only || spec.delta.is_none_or(|d| ci.1 <= d);
    TrialSummary {
        kind: spec.kind,
        family: problem.family.to_string(),
        m: problem.hypothesis_means.len(),
        n: problem.n,
        gibbs_temperature: problem.gibbs_temperature,
        seed: problem.seed,
        delta: spec.delta,
        trials,
        violations,
        rate: violations as f64 / trials as f64,
        ci,
        reference_only,
        passed,
    }
}

/// Runs every bound in `specs` on the same simulated trials.
pub fn run_trials_multi(problem: &SyntheticProblem, specs: &[BoundSpec]) -> Result<Vec<(Vec<TrialRecord>, TrialSummary)>> {
    problem.validate()?;
    for s in specs {
        s.validate()?;
        if s.family != problem.family {
            return Err(Error::Config(format!("bound family {} differs from problem family {}", s.family, problem.family)));
        }
    }
    let draws = simulate(problem);
    specs
        .iter()
        .map(|spec| {
            let records: Vec<TrialRecord> = draws
                .par_iter()
                .map(|d| {
                    let b = spec.evaluate(d.train, d.kl, problem.n)?.rho;
                    Ok(TrialRecord {
                        train_loss: d.train,
                        pop_loss: d.pop,
                        kl: d.kl,
                        per_sample_kls: None,
                        bound_value: b,
                        violated: d.pop > b,
                    })
                })
                .collect::<Result<_>>()?;
            let summary = summarize(problem, spec, &records);
            Ok((records, summary))
        })
        .collect()
}

/// Per-trial records and the violation summary of one bound.
pub fn run_trials(problem: &SyntheticProblem, spec: &BoundSpec) -> Result<(Vec<TrialRecord>, TrialSummary)> {
    Ok(run_trials_multi(problem, std::slice::from_ref(spec))?.remove(0))
}

/// PAC bounds with a finite correction for the family, at confidence `delta`.
pub fn certified_kinds(family: Family, delta: f64) -> Vec<BoundSpec> {
    let kinds: &[BoundKind] = if family == Family::Bernoulli {
        &[
            BoundKind::Mls,
            BoundKind::PacCramerChernoff,
            BoundKind::PacCramerXi,
            BoundKind::PacCramerTwoECeil,
        ]
    } else {
        &[BoundKind::PacCramerXi, BoundKind::PacCramerTwoECeil]
    };
    kinds.iter().map(|&k| BoundSpec::new(k, family).with_delta(delta)).collect()
}

/// The standard grid of problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub families: Vec<Family>,
    pub hypotheses: Vec<usize>,
    pub sample_sizes: Vec<u64>,
    pub temperatures: Vec<f64>,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub delta: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Bernoulli, Family::Gaussian { sigma2: 1.0 }, Family::Poisson],
            hypotheses: vec![2, 10],
            sample_sizes: vec![10, 100],
            temperatures: vec![0.0, 1.0, 5.0],
            trials: 2000,
            seeds: vec![1, 2, 3],
            delta: 0.05,
        }
    }
}

/// Runs every certified kind on every problem of the suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TrialSummary>> {
    let mut out = Vec::new();
    for (fi, &family) in cfg.families.iter().enumerate() {
        for &m in &cfg.hypotheses {
            for &n in &cfg.sample_sizes {
                for (ci, &c) in cfg.temperatures.iter().enumerate() {
                    for &seed in &cfg.seeds {
                        let key = seed
                            .wrapping_mul(1_000_003)
                            .wrapping_add((fi as u64) << 40 | (m as u64) << 24 | n << 4 | ci as u64);
                        let problem = SyntheticProblem::random(family, m, n, c, cfg.trials, key)?;
                        let specs = certified_kinds(family, cfg.delta);
                        for (_, s) in run_trials_multi(&problem, &specs)? {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / k;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    (m, (var / k).sqrt())
}

/// Standard error of `f(α, β)` by central differences.
fn propagate(f: impl Fn(f64, f64) -> Result<f64>, a: f64, sa: f64, b: f64, sb: f64) -> Result<f64> {
    let ha = 1e-6 * a.abs().max(1e-3);
    let hb = 1e-6 * b.abs().max(1e-3);
    let da = (f(a + ha, b)? - f(a - ha, b)?) / (2.0 * ha);
    let db = if b > hb {
        (f(a, b + hb)? - f(a, b - hb)?) / (2.0 * hb)
    } else {
        (f(a, b + hb)? - f(a, b)?) / hb
    };
    Ok(((da * sa).powi(2) + (db * sb).powi(2)).sqrt())
}

/// Exact-expectation check of the average bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageCheck {
    pub mean_pop: f64,
    pub mean_train: f64,
    pub mean_kl: f64,
    pub bound: f64,
    pub se: f64,
    /// `bound − mean_pop`.
    pub slack: f64,
    pub passed: bool,
}

/// Compares the mean population loss with the average Cramér bound at the
/// mean training loss and mean KL, within two standard errors.
pub fn average_check(problem: &SyntheticProblem) -> Result<AverageCheck> {
    problem.validate()?;
    let draws = simulate(problem);
    let col = |f: fn(&Draw) -> f64| draws.iter().map(f).collect::<Vec<_>>();
    let (pop, se_pop) = mean_se(&col(|d| d.pop));
    let (train, se_train) = mean_se(&col(|d| d.train));
    let (kl, se_kl) = mean_se(&col(|d| d.kl));
    let fam = problem.family;
    let n = problem.n;
    let bound_at = |a: f64, b: f64| average_bound(fam, a, b.max(0.0), n).map(|r| r.rho);
    let bound = bound_at(train, kl)?;
    let se_bound = propagate(bound_at, train, se_train, kl, se_kl)?;
    let se = (se_pop.powi(2) + se_bound.powi(2)).sqrt();
    let slack = bound - pop;
    Ok(AverageCheck {
        mean_pop: pop,
        mean_train: train,
        mean_kl: kl,
        bound,
        se,
        slack,
        passed: slack >= -2.0 * se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplewiseComparison {
    pub samplewise: f64,
    pub full: f64,
    pub se_samplewise: f64,
    pub se_full: f64,
    /// Per-sample training loss and mutual information `I(h; z_i)`.
    pub alpha_i: f64,
    pub beta_i: f64,
    /// Full-sample training loss and `I(h; z)`.
    pub alpha: f64,
    pub beta: f64,
    pub warning: Option<String>,
}

impl SamplewiseComparison {
    /// `samplewise ≤ full` within two combined standard errors.
    pub fn dominates(&self) -> bool {
        self.samplewise <= self.full + 2.0 * (self.se_samplewise.powi(2) + self.se_full.powi(2)).sqrt()
    }
}

/// Samplewise versus full-sample average bound with the marginal prior.
///
/// Uses `outer` draws of the first sample and, for each, `inner` draws of
/// the remaining `n − 1` samples to marginalize the posterior. Samples are
/// exchangeable, so the per-sample term of sample 1 stands for all of them.
pub fn run_samplewise_comparison(problem: &SyntheticProblem, outer: usize, inner: usize) -> Result<SamplewiseComparison> {
    problem.validate()?;
    if outer < 2 || inner == 0 {
        return Err(Error::Config("need outer ≥ 2 and inner ≥ 1 draws".into()));
    }
    let n = problem.n;
    let inner = if n == 1 { 1 } else { inner };
    let fam = problem.family;
    let m = problem.hypothesis_means.len();
    struct Outer {
        q_i: Vec<f64>,
        q_full: Vec<f64>,
        alpha_i: f64,
        alpha_full: f64,
    }
    let outers: Vec<Outer> = (0..outer)
        .into_par_iter()
        .map(|j| {
            let mut rng = CounterRng::new(problem.seed, j as u64).derive(0x5a);
            let first: Vec<f64> = problem.hypothesis_means.iter().map(|&mu| fam.draw(mu, &mut rng)).collect();
            let mut q_sum = vec![0.0; m];
            let mut q_full = Vec::new();
            let mut alpha_full = 0.0;
            for k in 0..inner {
                let emp: Vec<f64> = problem
                    .hypothesis_means
                    .iter()
                    .zip(&first)
                    .map(|(&mu, &x)| (x + fam.draw_sum(mu, n - 1, &mut rng)) / n as f64)
                    .collect();
                let q = problem.gibbs(&emp);
                q_sum.iter_mut().zip(&q).for_each(|(s, v)| *s += v);
                if k == 0 {
                    alpha_full = q.iter().zip(&emp).map(|(a, b)| a * b).sum();
                    q_full = q;
                }
            }
            let q_i: Vec<f64> = q_sum.iter().map(|s| s / inner as f64).collect();
            let alpha_i = q_i.iter().zip(&first).map(|(a, b)| a * b).sum();
            Outer {
                q_i,
                q_full,
                alpha_i,
                alpha_full,
            }
        })
        .collect();
    let mut marg = vec![0.0; m];
    for o in &outers {
        marg.iter_mut().zip(&o.q_i).for_each(|(s, v)| *s += v / outer as f64);
    }
    let kl_i: Vec<f64> = outers.iter().map(|o| kl_discrete(&o.q_i, &marg)).collect();
    let kl_full: Vec<f64> = outers.iter().map(|o| kl_discrete(&o.q_full, &marg)).collect();
    let (alpha_i, se_ai) = mean_se(&outers.iter().map(|o| o.alpha_i).collect::<Vec<_>>());
    let (alpha, se_a) = mean_se(&outers.iter().map(|o| o.alpha_full).collect::<Vec<_>>());
    let (beta_i, se_bi) = mean_se(&kl_i);
    let (beta, se_b) = mean_se(&kl_full);

    let sw = |a: f64, b: f64| average_bound(fam, a, b.max(0.0), 1).map(|r| r.rho);
    let full_at = |a: f64, b: f64| average_bound(fam, a, b.max(0.0), n).map(|r| r.rho);
    let samplewise = sw(alpha_i, beta_i)?;
    let full = full_at(alpha, beta)?;
    let se_samplewise = propagate(sw, alpha_i, se_ai, beta_i, se_bi)?;
    let se_full = propagate(full_at, alpha, se_a, beta, se_b)?;
    let combined = (se_samplewise.powi(2) + se_full.powi(2)).sqrt();
    let warning = (combined > 0.5 * (full - samplewise).abs() && n > 1)
        .then(|| format!("Monte Carlo error {combined:.3e} is comparable to the gap {:.3e}", full - samplewise));
    Ok(SamplewiseComparison {
        samplewise,
        full,
        se_samplewise,
        se_full,
        alpha_i,
        beta_i,
        alpha,
        beta,
        warning,
    })
}

/// Outcome of one deterministic identity suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cells: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, errors: &[f64], tolerance: f64) -> Self {
        // A NaN error (failed evaluation) counts as infinite.
        let max_error = errors.iter().fold(0.0_f64, |m, &e| if e.is_nan() { f64::INFINITY } else { m.max(e) });
        Self {
            name: name.into(),
            cells: errors.len(),
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

/// Interior mean range used by the conjugate grid.
pub fn interior_range(family: Family) -> (f64, f64) {
    match family {
        Family::Bernoulli => (0.02, 0.98),
        Family::Gaussian { .. } | Family::Laplace { .. } => (-3.0, 3.0),
        _ => (0.1, 5.0),
    }
}

/// Closed-form Cramér function against the numeric conjugate of the
/// two-sided CGF on a `points × points` grid of `(q, p)`.
pub fn conjugate_check(family: Family, points: usize) -> IdentityCheck {
    let (lo, hi) = interior_range(family);
    let grid = crate::search::linspace(lo, hi, points);
    let pairs: Vec<(f64, f64)> = grid.iter().flat_map(|&q| grid.iter().map(move |&p| (q, p))).collect();
    let errors: Vec<f64> = pairs
        .par_iter()
        .map(|&(q, p)| {
            let closed = family.cramer(q, p);
            let numeric = crate::conjugate::CgfHandle::of_family(family, p, crate::families::Sidedness::Full)
                .and_then(|h| crate::conjugate::numeric_conjugate(&h, q, crate::CONJUGATE_TOL));
            match (closed, numeric) {
                (Ok(c), Ok(v)) => (c - v.value).abs(),
                _ => f64::NAN,
            }
        })
        .collect();
    IdentityCheck::new(format!("conjugate {family}"), &errors, 1e-7)
}

/// `inf_γ` of the Catoni bound against the binary-KL bound.
pub fn catoni_kl_check(points: usize, n: u64) -> IdentityCheck {
    let alphas = crate::search::linspace(0.01, 0.95, points);
    let bns = crate::search::logspace(1e-3, 1.0, points);
    let errors = grid_errors(&alphas, &bns, |a, bn| {
        let beta = bn * n as f64;
        let c = crate::bounds::catoni_inf_bound(a, beta, n, None)?.rho;
        let k = crate::inversion::invert(
            &crate::inversion::Comparator::BinaryKl,
            &crate::inversion::BoundQuery::average(a, beta, n),
            crate::INVERSION_TOL,
        )?
        .rho;
        Ok((c - k).abs())
    });
    IdentityCheck::new("catoni infimum = kl", &errors, 1e-6)
}

/// Difference-comparator infimum against the Cramér bound for Laplace data.
pub fn laplace_check(points: usize, b: f64, n: u64) -> IdentityCheck {
    let alphas = crate::search::linspace(0.0, 5.0, points);
    let bns = crate::search::logspace(1e-3, 10.0, points);
    let errors = grid_errors(&alphas, &bns, |a, bn| {
        let beta = bn * n as f64;
        let d = crate::bounds::diff_based_bound(crate::bounds::DiffKind::Laplace { b }, a, beta, n)?.rho;
        let c = average_bound(Family::laplace(b)?, a, beta, n)?.rho;
        Ok((d - c).abs() / c.abs().max(1.0))
    });
    IdentityCheck::new(format!("laplace diff infimum = cramer (b = {b})"), &errors, 1e-6)
}

fn grid_errors(alphas: &[f64], bns: &[f64], f: impl Fn(f64, f64) -> Result<f64> + Sync) -> Vec<f64> {
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| bns.iter().map(move |&b| (a, b))).collect();
    cells.par_iter().map(|&(a, b)| f(a, b).unwrap_or(f64::NAN)).collect()
}

/// The identity suites run by `selfcheck`.
pub fn identity_suites() -> Vec<IdentityCheck> {
    let mut out: Vec<IdentityCheck> = Family::all_kinds().into_iter().map(|f| conjugate_check(f, 20)).collect();
    out.push(catoni_kl_check(30, 100));
    out.push(laplace_check(30, 1.0, 100));
    out
}
