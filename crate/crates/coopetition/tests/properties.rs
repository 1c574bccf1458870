//! Randomized invariants over the economics stack and the sampler.

use proptest::prelude::*;

use coopetition::economics;
use coopetition::equilibrium;
use coopetition::model::{GameInstance, MechanismParams, StrategyProfile};
use coopetition::presets;
use coopetition::sample::{sample_instance, GammaRegime, SamplingSpec, UniformRange};

fn mech(xi: f64) -> MechanismParams {
    MechanismParams { xi, epsilon0: 1.0, varrho: 6.0, c0: 1.0, d_min: 0, d_max: 6000 }
}

fn instance(seed: u64, gamma_hi: f64, xi: f64) -> GameInstance {
    let law = presets::law_preset("medium-0.5").unwrap();
    let spec = SamplingSpec::table2(
        seed,
        GammaRegime::Custom(UniformRange::new(0.0, gamma_hi)),
        law,
    );
    sample_instance(&spec, 6, mech(xi)).unwrap()
}

fn profile_strategy() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..=6000, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ledger_antisymmetric_zero_sum(seed in 0u64..500, d in profile_strategy()) {
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        let ledger = economics::settle(&g, &s).unwrap();
        for i in 0..g.n() {
            prop_assert_eq!(ledger.transfer(i, i), 0.0);
            for j in 0..g.n() {
                prop_assert_eq!(ledger.transfer(i, j), -ledger.transfer(j, i));
            }
        }
        prop_assert!(ledger.total_net().abs() <= 1e-12);
    }

    #[test]
    fn uniform_rate_cancels_transfer_channel(seed in 0u64..500, d in profile_strategy()) {
        // xi == phi for every organization: receipts equal losses exactly
        let mut g = instance(seed, 1.0, 90.0);
        for o in &mut g.orgs {
            o.phi = 300.0;
        }
        g.mech.xi = 300.0;
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        for n in 0..g.n() {
            let receipts = economics::redistribution_receipts(&g, &s, n).unwrap();
            let loss = economics::competition_loss(&g, &s, n).unwrap();
            prop_assert_eq!(receipts, loss);
            let b = economics::utility(&g, &s, n).unwrap();
            prop_assert_eq!(b.redistribution, b.competition_loss);
        }
    }

    #[test]
    fn breakdown_recomputes_bit_for_bit(seed in 0u64..500, d in profile_strategy()) {
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        for n in 0..g.n() {
            let b = economics::utility(&g, &s, n).unwrap();
            let again = b.gain + b.redistribution - b.competition_loss - b.compute_cost - b.server_fee;
            prop_assert_eq!(again, b.utility);
        }
    }

    #[test]
    fn global_error_strictly_decreases(seed in 0u64..500, d in profile_strategy(), n in 0usize..6) {
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        let before = economics::global_error(&g, &s).unwrap();
        let bumped = s.with_entry(n, s.d_gen[n] + 1.0);
        let after = economics::global_error(&g, &bumped).unwrap();
        prop_assert!(after < before);
        // cooperation gain weakly increases for every organization
        for m in 0..g.n() {
            let g_before = economics::cooperation_gain(&g, &s, m).unwrap();
            let g_after = economics::cooperation_gain(&g, &bumped, m).unwrap();
            prop_assert!(g_after >= g_before);
        }
    }

    #[test]
    fn contribution_nonnegative_zero_iff_idle(seed in 0u64..500, d in profile_strategy(), n in 0usize..6) {
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        let dhat = economics::marginal_contribution(&g, &s, n).unwrap();
        prop_assert!(dhat >= 0.0);
        if s.d_gen[n] == 0.0 {
            prop_assert_eq!(dhat, 0.0);
        } else {
            prop_assert!(dhat > 0.0);
        }
    }

    #[test]
    fn settlement_leaves_welfare_unchanged(seed in 0u64..500, d in profile_strategy()) {
        // sum of net transfers is zero, so post-settlement welfare equals
        // pre-settlement welfare exactly up to 1e-12
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        let welfare = economics::social_welfare(&g, &s).unwrap();
        let ledger = economics::settle(&g, &s).unwrap();
        let post: f64 = economics::utilities(&g, &s)
            .unwrap()
            .iter()
            .zip(&ledger.net)
            .map(|(b, net)| b.utility + net)
            .sum();
        prop_assert!((post - welfare).abs() <= 1e-12);
    }

    #[test]
    fn deviation_identity_random(seed in 0u64..300, d in profile_strategy(), n in 0usize..6, to in 0u64..=6000) {
        let g = instance(seed, 1.0, 90.0);
        let s = StrategyProfile::new(d.iter().map(|&x| x as f64).collect());
        let s_dev = s.with_entry(n, to as f64);
        let resid = equilibrium::check_potential_identity(&g, &s, &s_dev, n).unwrap();
        let scale = equilibrium::potential(&g, &s).unwrap().abs().max(1.0);
        prop_assert!(resid.abs() <= 1e-9 * scale);
    }

    #[test]
    fn sampling_is_pure(seed in 0u64..2000) {
        let law = presets::law_preset("medium-0.1").unwrap();
        let spec = SamplingSpec::table2(seed, GammaRegime::Moderate, law);
        let a = sample_instance(&spec, 5, mech(90.0)).unwrap();
        let b = sample_instance(&spec, 5, mech(90.0)).unwrap();
        prop_assert_eq!(&a, &b);
        // validator soundness: re-assert the key invariants directly
        prop_assert!(a.comp.is_symmetric());
        for i in 0..a.n() {
            prop_assert_eq!(a.comp.get(i, i), 0.0);
            prop_assert!(equilibrium::weight_z(&a, i) < 0.0);
            prop_assert!(a.orgs[i].psi >= 0.0 && a.orgs[i].phi >= a.mech.xi);
        }
    }

    #[test]
    fn solver_profile_feasible_integral(seed in 0u64..150) {
        let g = instance(seed, 1.0, 90.0);
        let (s, diag) = equilibrium::solve(&g, &Default::default()).unwrap();
        prop_assert!(s.in_bounds(&g.mech));
        prop_assert!(s.is_integral());
        prop_assert!(diag.converged);
        prop_assert!(diag.budget_residual <= 1e-12);
    }
}
