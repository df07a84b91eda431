//! Property tests for the distribution contract, ranking identities, and
//! the discrete simulator's conservation laws.

use feederlab::sim::{self, SimConfig};
use feederlab::voucher::{self, DebiasInterval, VoucherBudget};
use feederlab::{Distribution, Group, MarketParams};
use proptest::prelude::*;

fn pareto_market(alpha: f64, beta: f64, p: f64) -> MarketParams {
    MarketParams::new(Distribution::pareto(alpha).unwrap(), beta, p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_ccdf_complement(
        alpha in 0.5f64..6.0,
        mean in -50.0f64..2000.0,
        sd in 0.5f64..400.0,
        q in 1e-3f64..0.999,
    ) {
        for dist in [
            Distribution::pareto(alpha).unwrap(),
            Distribution::normal(mean, sd).unwrap(),
            Distribution::truncated_normal(mean, sd, mean - 3.0 * sd, mean + 2.5 * sd).unwrap(),
        ] {
            let x = dist.inv_ccdf(q).unwrap();
            prop_assert!((dist.cdf(x) + dist.ccdf(x) - 1.0).abs() <= 1e-12);
            prop_assert!((dist.ccdf(x) - q).abs() <= 1e-8, "roundtrip {} at q={q}", dist.ccdf(x));
        }
    }

    #[test]
    fn cdf_is_monotone(
        alpha in 0.5f64..6.0,
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
    ) {
        let dist = Distribution::pareto(alpha).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = (1.0 + lo.exp(), 1.0 + hi.exp());
        prop_assert!(dist.cdf(x.min(y)) <= dist.cdf(x.max(y)));
        prop_assert!(dist.pdf(x) >= 0.0);
    }

    #[test]
    fn displacement_signs_and_closed_form(
        alpha in 1.0f64..5.0,
        beta in 0.2f64..1.0,
        p in 0.0f64..1.0,
        q in 1e-4f64..0.9999,
    ) {
        let m = pareto_market(alpha, beta, p);
        let z = m.dist().inv_ccdf(q).unwrap();
        let d1 = m.displacement(z, Group::G1);
        let d2 = m.displacement(z, Group::G2);
        prop_assert!(d1 <= 1e-14, "G1 displacement positive: {d1}");
        prop_assert!(d2 >= -1e-14, "G2 displacement negative: {d2}");
        prop_assert!((d1 - m.displacement_closed_form(z, Group::G1).unwrap()).abs() <= 1e-12);
        prop_assert!((d2 - m.displacement_closed_form(z, Group::G2).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_bands_are_budget_exact(
        beta in 0.45f64..0.95,
        p in 0.01f64..0.35,
        c in 0.01f64..0.95,
    ) {
        let m = pareto_market(3.0, beta, p);
        let budget = VoucherBudget::new(c).unwrap();
        for opt in [
            voucher::optimal_interval_mm(&m, budget).unwrap(),
            voucher::optimal_interval_pauc(&m, budget).unwrap(),
        ] {
            let used = voucher::budget_of_interval(&m, &opt.interval);
            prop_assert!((used - c).abs() <= 1e-6, "budget {used} for c={c}");
        }
    }

    #[test]
    fn post_voucher_rank_stays_in_unit_interval(
        beta in 0.3f64..1.0,
        p in 0.0f64..1.0,
        q in 1e-4f64..0.9999,
        z1 in 1.0f64..3.0,
        width in 0.01f64..2.0,
    ) {
        let m = pareto_market(3.0, beta, p);
        let band = DebiasInterval::new(z1, z1 + width).unwrap();
        let z = m.dist().inv_ccdf(q).unwrap();
        for group in [Group::G1, Group::G2] {
            let r = voucher::rank_post_voucher(&m, &band, z, group);
            prop_assert!((0.0..=1.0).contains(&r), "rank {r} out of range");
        }
        prop_assert!(voucher::pauc(&m, &band) <= voucher::mistreatment_max(&m, &band) + 1e-12);
    }

    #[test]
    fn pauc_case_formulas_match_quadrature(
        beta in 0.45f64..0.95,
        p in 0.02f64..0.6,
        z1_off in 0.001f64..1.5,
        width in 0.005f64..2.0,
    ) {
        let m = pareto_market(3.0, beta, p);
        let z1 = 1.0 + z1_off;
        let band = DebiasInterval::new(z1, z1 + width).unwrap();
        let closed = voucher::pauc(&m, &band);
        let quad = voucher::pauc_numeric(&m, &band);
        prop_assert!(
            (closed - quad).abs() <= 1e-6,
            "pauc mismatch on [{z1}, {}]: closed {closed} vs quadrature {quad}",
            z1 + width
        );
    }

    #[test]
    fn mistreatment_boundary_eval_matches_grid(
        beta in 0.45f64..0.95,
        p in 0.02f64..0.6,
        z1_off in 0.001f64..1.5,
        width in 0.005f64..2.0,
    ) {
        let m = pareto_market(3.0, beta, p);
        let z1 = 1.0 + z1_off;
        let band = DebiasInterval::new(z1, z1 + width).unwrap();
        let exact = voucher::mistreatment_max(&m, &band);
        let gridded = voucher::mistreatment_max_numeric(&m, &band);
        prop_assert!(
            (exact - gridded).abs() <= 1e-6,
            "mm mismatch on [{z1}, {}]: {exact} vs {gridded}",
            z1 + width
        );
    }

    #[test]
    fn untouched_outside_affected_region(
        beta in 0.3f64..0.95,
        p in 0.0f64..1.0,
        z1 in 1.0f64..3.0,
        width in 0.01f64..2.0,
        q in 1e-4f64..0.9999,
    ) {
        let m = pareto_market(3.0, beta, p);
        let z2 = z1 + width;
        let band = DebiasInterval::new(z1, z2).unwrap();
        let z = m.dist().inv_ccdf(q).unwrap();
        prop_assume!(z < z1 || z > z2 / beta);
        prop_assert_eq!(
            voucher::rank_post_voucher(&m, &band, z, Group::G2),
            m.rank_biased(z, Group::G2)
        );
    }
}

proptest! {
    // The simulator cases build whole markets; keep the case count small.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulator_conservation_laws(
        seed in 0u64..1000,
        beta in 0.4f64..0.95,
        p in 0.05f64..0.95,
        epsilon in 0.0f64..0.2,
        take_up in 0.3f64..1.0,
    ) {
        prop_assume!(beta - epsilon > 0.0);
        let params = MarketParams::new(Distribution::pareto(3.0).unwrap(), beta, p).unwrap();
        let config =
            SimConfig::new(120, 6, 20, params, epsilon, take_up, 1, seed).unwrap();
        let market = sim::build_market(&config, seed);
        let unbiased = market.assignment(false);
        let biased = market.assignment(true);

        // Every school filled to capacity in both assignments.
        for assignment in [&unbiased, &biased] {
            let mut counts = vec![0usize; config.n_schools];
            for &s in assignment.iter() {
                counts[s as usize] += 1;
            }
            prop_assert!(counts.iter().all(|&c| c == config.capacity));
        }

        // Seats are a fixed permutation: displacements sum to zero.
        let total: i64 = biased.iter().zip(&unbiased).map(|(&b, &u)| b as i64 - u as i64).sum();
        prop_assert_eq!(total, 0);

        // Vouchers never push a G1 student outside [biased, unbiased] seats.
        let band = DebiasInterval::new(1.05, 1.8).unwrap();
        let treated = sim::apply_vouchers(&market, &band, take_up, seed);
        let post = treated.assignment(true);
        for (i, s) in market.students.iter().enumerate() {
            if s.group == Group::G1 {
                prop_assert!(post[i] >= biased[i] && post[i] <= unbiased[i]);
            }
        }
    }
}
