mod common;

use common::*;
use disclab::discrepancy::{beck_fiala_color, disc_of};
use disclab::h2_moments::{expected_count, ExactRational};
use disclab::hypergraph::{from_json, from_text, generate_h1, generate_h2, to_json, to_text};
use disclab::partial_coloring::{lovett_meka, numeric_slack, ConstraintSet, PartialVector, WalkConfig};
use disclab::{Coloring, RandomSource};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn h1_is_t_regular_with_sorted_edges(n in 1usize..80, m in 1usize..40, t in 1usize..6, seed: u64) {
        prop_assume!(t <= m);
        let h = generate_h1(n, m, t, &RandomSource::new(seed)).unwrap();
        prop_assert_eq!(h.m(), m);
        prop_assert!(h.degrees().iter().all(|&d| d == t));
        prop_assert!(h.edges().iter().all(|e| e.windows(2).all(|w| w[0] < w[1])));
        prop_assert_eq!(&h, &generate_h1(n, m, t, &RandomSource::new(seed)).unwrap());
    }

    #[test]
    fn serialization_round_trips(n in 1usize..50, m in 1usize..30, p in 0.05f64..0.95, seed: u64) {
        let h = generate_h2(n, m, p, &RandomSource::new(seed)).unwrap();
        prop_assert_eq!(&from_text(&to_text(&h)).unwrap(), &h);
        prop_assert_eq!(&from_json(&to_json(&h)).unwrap(), &h);
    }

    #[test]
    fn disc_invariant_under_negation_and_relabeling(n in 2usize..40, m in 1usize..20, seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = generate_h2(n, m, 0.3, &RandomSource::new(seed)).unwrap();
        let vals: Vec<i8> = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
        let chi = Coloring::new(vals.clone()).unwrap();
        let d = disc_of(&h, &chi).unwrap().disc;
        prop_assert_eq!(d, disc(h.edges(), &vals));
        prop_assert_eq!(disc_of(&h, &chi.negated()).unwrap().disc, d);

        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut r);
        let mut moved = vec![0i8; n];
        for v in 0..n {
            moved[perm[v] as usize] = vals[v];
        }
        let hp = h.relabel(&perm).unwrap();
        prop_assert_eq!(disc_of(&hp, &Coloring::new(moved).unwrap()).unwrap().disc, d);
    }

    #[test]
    fn beck_fiala_respects_degree_bound(n in 2usize..60, m in 1usize..40, p in 0.05f64..0.6, seed: u64) {
        let h = generate_h2(n, m, p, &RandomSource::new(seed)).unwrap();
        let t = h.max_degree() as u64;
        let d = disc(h.edges(), beck_fiala_color(&h).values());
        prop_assert!(t == 0 || d < 2 * t, "t {t} disc {d}");
    }

    #[test]
    fn expected_count_identity(k in 1usize..20, m in 0usize..8) {
        let n = 2 * k;
        let e = expected_count(n, m).unwrap();
        let scaled = e.0 * BigInt::from(2u32).pow((m * (n - 1)) as u32);
        let want = BigInt::from(binomial(n as u64, k as u64)).pow(m as u32 + 1);
        prop_assert!(scaled.is_integer());
        prop_assert_eq!(scaled.to_integer(), want);
    }

    #[test]
    fn exact_rational_string_round_trip(a in -10_000i64..10_000, b in 1i64..10_000) {
        let q = ExactRational::new(BigInt::from(a), BigInt::from(b)).unwrap();
        let back: ExactRational = q.to_string().parse().unwrap();
        prop_assert_eq!(back, q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walk_meets_its_postconditions(n in 16usize..64, t in 2usize..6, frozen_frac in 0.0f64..0.5, seed: u64) {
        let src = RandomSource::new(seed);
        let h = generate_h1(n, n, t, &src).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let delta = 1.0 / n as f64;
        let mut x0 = vec![0.0; n];
        let mut frozen0 = vec![false; n];
        for j in 0..n {
            if r.random::<f64>() < frozen_frac {
                x0[j] = if r.random::<bool>() { 1.0 } else { -1.0 };
                frozen0[j] = true;
            } else {
                x0[j] = r.random_range(-0.5..0.5);
            }
        }
        let coeffs: Vec<f64> = (0..n).map(|i| if i % 7 == 0 { 0.0 } else { 8.0 }).collect();
        let sets = h.edges().to_vec();
        let cs = ConstraintSet::new(n, sets.clone(), coeffs.clone()).unwrap();
        let start = PartialVector { x: x0.clone(), frozen: frozen0.clone(), delta };
        let cfg = WalkConfig { require_feasible: false, ..WalkConfig::default() };
        if let Ok(out) = lovett_meka(&cs, &start, delta, &src, &cfg) {
            let res = check_walk_output(&sets, &coeffs, &x0, &frozen0, &out.vector.x, delta, numeric_slack(n));
            prop_assert!(res.is_ok(), "{:?}", res);
        }
    }
}
