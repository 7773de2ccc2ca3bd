//! Property tests: deterministic replay and structural invariants over
//! randomized parameters.

use proptest::prelude::*;

use levy_noise::levy_measure::{Atom, LevyMeasure, LevyTriplet};
use levy_noise::pairing::{pair_noise, FieldRef};
use levy_noise::path_sim::{simulate_path, SimConfig};
use levy_noise::schwartz;

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// Identical (seed, triplet, config) replays bit-for-bit.
    #[test]
    fn simulation_replay_is_bit_identical(
        seed in any::<u64>(),
        gamma in -2.0f64..2.0,
        sigma in 0.0f64..2.0,
        mass in 0.1f64..3.0,
        pos in 1.5f64..5.0,
    ) {
        let nu = LevyMeasure::FiniteAtomic(vec![Atom { position: pos, mass }]);
        let triplet = LevyTriplet::new(gamma, sigma, nu).unwrap();
        let cfg = SimConfig::new(2.0, 0.01, 2f64.powi(-6)).unwrap();
        let a = simulate_path(&triplet, &cfg, seed).unwrap();
        let b = simulate_path(&triplet, &cfg, seed).unwrap();
        prop_assert_eq!(a.jumps.len(), b.jumps.len());
        for (x, y) in a.jumps.iter().zip(&b.jumps) {
            prop_assert_eq!(x.time.to_bits(), y.time.to_bits());
            prop_assert_eq!(x.size.to_bits(), y.size.to_bits());
        }
        prop_assert!(a.brownian.iter().zip(&b.brownian).all(|(x, y)| x.to_bits() == y.to_bits()));
        for &t in &[0.3, 1.1, 1.9] {
            prop_assert_eq!(
                a.evaluate(t).unwrap().to_bits(),
                b.evaluate(t).unwrap().to_bits()
            );
        }
    }

    /// Localized bumps keep unit mass and exact support under rescaling.
    #[test]
    fn bump_mass_and_support_under_rescaling(
        s in 0.5f64..20.0,
        k in 1u32..4,
    ) {
        let bump = schwartz::bump_family_1d(s, k, &schwartz::mollifier(1)).unwrap();
        prop_assert!((bump.integral() - 1.0).abs() < 1e-9);
        let supp = bump.support_box()[0];
        prop_assert!((supp.lo - s).abs() < 1e-9);
        prop_assert!((supp.hi - (s + s.powi(-(k as i32)))).abs() < 1e-7);
        prop_assert_eq!(bump.eval(&[supp.lo - 1e-6]), 0.0);
        prop_assert_eq!(bump.eval(&[supp.hi + 1e-6]), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// The noise pairing is linear in the test function.
    #[test]
    fn noise_pairing_linearity(
        seed in any::<u64>(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let nu = LevyMeasure::FiniteAtomic(vec![Atom { position: 2.0, mass: 1.0 }]);
        let triplet = LevyTriplet::new(0.5, 1.0, nu).unwrap();
        let cfg = SimConfig::new(2.0, 0.005, 1.0).unwrap();
        let path = simulate_path(&triplet, &cfg, seed).unwrap();
        let field = FieldRef::Path(&path);
        let phi = schwartz::mollifier_on(0.0, 1.2, 1).unwrap();
        let psi = schwartz::mollifier_on(0.6, 1.9, 1).unwrap();
        let combo = schwartz::TestFunction::linear_combination(&[(a, &phi), (b, &psi)]).unwrap();
        let lhs = pair_noise(&field, &combo).unwrap().value;
        let rhs = a * pair_noise(&field, &phi).unwrap().value
            + b * pair_noise(&field, &psi).unwrap().value;
        let scale = lhs.abs().max(rhs.abs()).max(1e-12);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }
}
