use cgf_bounds::bounds::{average_bound, diff_based_bound, pac_bound, Correction, DiffKind};
use cgf_bounds::inversion::{invert, BoundQuery, BoundStatus, Comparator};
use cgf_bounds::upsilon::{upsilon_bernoulli_exact, upsilon_monte_carlo};
use cgf_bounds::verify::{run_samplewise_comparison, run_trials, SyntheticProblem};
use cgf_bounds::{BoundKind, BoundSpec, Family};
use proptest::prelude::*;

fn families() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Bernoulli),
        (0.1f64..4.0).prop_map(|s| Family::gaussian(s).unwrap()),
        Just(Family::Poisson),
        (0.5f64..10.0).prop_map(|k| Family::gamma(k).unwrap()),
        (0.2f64..3.0).prop_map(|b| Family::laplace(b).unwrap()),
        (0.2f64..5.0).prop_map(|l| Family::inverse_gaussian(l).unwrap()),
        (0.5f64..10.0).prop_map(|r| Family::negative_binomial(r).unwrap()),
    ]
}

/// Maps a unit draw into the interior of the family's mean range.
fn mean_in(f: Family, u: f64) -> f64 {
    match f {
        Family::Bernoulli => 0.01 + 0.98 * u,
        Family::Gaussian { .. } | Family::Laplace { .. } => -4.0 + 8.0 * u,
        _ => 0.05 + 5.0 * u,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cramer_vanishes_at_the_mean_and_is_nonnegative(f in families(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (q, p) = (mean_in(f, u), mean_in(f, v));
        prop_assert_eq!(f.cramer(p, p).unwrap(), 0.0);
        prop_assert!(f.cramer(q, p).unwrap() >= 0.0);
    }

    #[test]
    fn cramer_increases_away_from_q(f in families(), u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
        let q = mean_in(f, u);
        let (a, b) = (mean_in(f, v), mean_in(f, w));
        let (p1, p2) = if a < b { (a, b) } else { (b, a) };
        if p1 >= q {
            prop_assert!(f.cramer(q, p1).unwrap() <= f.cramer(q, p2).unwrap() * (1.0 + 1e-12) + 1e-15);
        }
        if p2 <= q {
            prop_assert!(f.cramer(q, p2).unwrap() <= f.cramer(q, p1).unwrap() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn fenchel_young(f in families(), u in 0.0f64..1.0, v in 0.0f64..1.0, s in -1.0f64..1.0) {
        let (q, p) = (mean_in(f, u), mean_in(f, v));
        let dom = f.t_domain(p).unwrap();
        let lo = dom.lower.max(-20.0);
        let hi = dom.upper.min(20.0);
        let t = 0.5 * (lo + hi) + 0.5 * s * (hi - lo) * 0.999;
        let psi = f.cgf(p, t).unwrap();
        let c = f.cramer(q, p).unwrap();
        prop_assert!(t * q - psi <= c + 1e-9 * (1.0 + c.abs()), "t = {t}: {} > {c}", t * q - psi);
    }

    #[test]
    fn pinsker(q in 0.0f64..1.0, p in 0.001f64..0.999) {
        let k = Family::Bernoulli.cramer(q, p).unwrap();
        prop_assert!(k >= 2.0 * (q - p).powi(2) - 1e-15);
    }

    #[test]
    fn inversion_feasible_and_maximal(f in families(), u in 0.0f64..1.0, bn in 1e-4f64..2.0) {
        let alpha = mean_in(f, u);
        let n = 50;
        let r = match average_bound(f, alpha, bn * n as f64, n) {
            Ok(r) => r,
            Err(cgf_bounds::Error::NoFiniteBound(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(r.rho >= alpha);
        prop_assert!(f.cramer(alpha, r.rho).unwrap() <= r.budget * (1.0 + 1e-12) + 1e-15);
        if r.status == BoundStatus::Converged {
            let step = 1e-8 * r.rho.abs().max(1.0);
            let above = r.rho + step;
            if f.mean_domain().contains(above) {
                prop_assert!(f.cramer(alpha, above).unwrap() > r.budget);
            }
        }
    }

    #[test]
    fn bound_grows_with_budget(f in families(), u in 0.0f64..1.0, b1 in 0.0f64..1.0, b2 in 0.0f64..1.0) {
        let alpha = mean_in(f, u);
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        let n = 20;
        if let (Ok(a), Ok(b)) = (average_bound(f, alpha, lo * 20.0, n), average_bound(f, alpha, hi * 20.0, n)) {
            prop_assert!(a.rho <= b.rho + 1e-9 * b.rho.abs().max(1.0));
        }
    }

    #[test]
    fn pac_bound_shrinks_with_delta_and_n(u in 0.0f64..1.0, beta in 0.0f64..20.0, d1 in 0.001f64..0.5, d2 in 0.001f64..0.5, n in 5u64..500) {
        let alpha = 0.01 + 0.9 * u;
        let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = pac_bound(Family::Bernoulli, alpha, beta, n, small, Correction::Xi).unwrap().rho;
        let b = pac_bound(Family::Bernoulli, alpha, beta, n, large, Correction::Xi).unwrap().rho;
        prop_assert!(b <= a + 1e-9);
        let m = average_bound(Family::Bernoulli, alpha, beta, n).unwrap().rho;
        let m2 = average_bound(Family::Bernoulli, alpha, beta, 2 * n).unwrap().rho;
        prop_assert!(m2 <= m + 1e-9);
    }

    #[test]
    fn cramer_is_lower_envelope(u in 0.0f64..1.0, bn in 1e-3f64..2.0) {
        let n = 100;
        let alpha = 5.0 * u;
        let c = average_bound(Family::Poisson, alpha, bn * n as f64, n).unwrap().rho;
        let d = diff_based_bound(DiffKind::Poisson, alpha, bn * n as f64, n).unwrap().rho;
        prop_assert!(c <= d + 1e-9 * d.max(1.0));
        for t in [0.1, 1.0, 4.0] {
            let fixed = invert(&Comparator::PoissonDiff { t }, &BoundQuery::average(alpha, bn * n as f64, n), 1e-12).unwrap().rho;
            prop_assert!(d <= fixed + 1e-9 * fixed.max(1.0));
        }
        let g = Family::gaussian(1.0).unwrap();
        let cg = average_bound(g, alpha, bn * n as f64, n).unwrap().rho;
        let dg = diff_based_bound(DiffKind::Gaussian { sigma2: 1.0 }, alpha, bn * n as f64, n).unwrap().rho;
        prop_assert!((cg - dg).abs() <= 1e-7 * cg.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trials_invariants(seed in 0u64..1000, c in 0.0f64..5.0) {
        let p = SyntheticProblem::random(Family::Poisson, 4, 15, c, 100, seed).unwrap();
        let spec = BoundSpec::new(BoundKind::PacCramerXi, Family::Poisson).with_delta(0.05);
        let (records, summary) = run_trials(&p, &spec).unwrap();
        prop_assert_eq!(records.len(), 100);
        for r in &records {
            prop_assert!(r.kl >= 0.0);
            prop_assert_eq!(r.violated, r.pop_loss > r.bound_value);
        }
        prop_assert_eq!(summary.violations, records.iter().filter(|r| r.violated).count());
    }
}

#[test]
fn trials_independent_of_thread_count() {
    let p = SyntheticProblem::random(Family::Bernoulli, 10, 30, 2.0, 500, 99).unwrap();
    let spec = BoundSpec::new(BoundKind::Mls, Family::Bernoulli).with_delta(0.05);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_trials(&p, &spec).unwrap());
    let b = four.install(|| run_trials(&p, &spec).unwrap());
    assert_eq!(a, b);
}

#[test]
fn samplewise_coincides_at_n1() {
    for seed in 0..5 {
        let p = SyntheticProblem::random(Family::Bernoulli, 5, 1, 4.0, 1, seed).unwrap();
        let c = run_samplewise_comparison(&p, 300, 1000).unwrap();
        assert_eq!(c.samplewise, c.full);
    }
}

/// `ln E exp(n kl(x̄, r))` at one `r` by enumeration.
fn enumerate_kl(n: u64, r: f64) -> f64 {
    let nf = n as f64;
    let mut ln_binom = 0.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let q = k as f64 / nf;
        let ln_pmf = ln_binom + k as f64 * r.ln() + (nf - k as f64) * (1.0 - r).ln();
        total += (ln_pmf + nf * Family::Bernoulli.cramer(q, r).unwrap()).exp();
    }
    total.ln()
}

fn mc_covers(n: u64, r: f64) {
    let at_r = enumerate_kl(n, r);
    let mc = upsilon_monte_carlo(&Comparator::BinaryKl, Family::Bernoulli, n, &[r], 200_000, 11).unwrap();
    let (lo, hi) = mc.ci.unwrap();
    assert!(lo <= at_r && at_r <= hi, "n = {n}, r = {r}: [{lo}, {hi}] misses {at_r}");
}

#[test]
fn monte_carlo_covers_enumeration_at_interior_means() {
    for r in [0.2, 0.5, 0.7] {
        mc_covers(5, r);
    }
}

/// The supremum sits at a mean so close to 0 or 1 that the dominant outcome
/// is almost never drawn; Monte Carlo coverage there is not reliable.
#[test]
#[ignore]
fn monte_carlo_covers_exact_upsilon_n20() {
    let exact = upsilon_bernoulli_exact(&Comparator::BinaryKl, 20, 2001).unwrap();
    let r = exact.r_star.unwrap();
    assert!((enumerate_kl(20, r) - exact.ln_upsilon).abs() < 1e-9);
    mc_covers(20, r);
}
