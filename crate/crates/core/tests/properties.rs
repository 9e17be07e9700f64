//! Cross-module invariants checked on random inputs.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wiretap_core::analytic::{
    concat_real_scrambling, concat_real_scrambling_closed, grid, harq_system_fer, scrambled_unitary_ber,
    security_gap, uncoded_rates, BoundedDistance, CurvePoint, ErrorRateCurve, ExactHarqIntegrand, HarqSpec,
    OddSelection, Provenance, SecurityGapQuery,
};
use wiretap_core::codes::alist::{parse_alist, write_alist};
use wiretap_core::codes::bch::dimension_table;
use wiretap_core::codes::{BchCode, CodeSpec, DegreeProfile, LdpcCode};
use wiretap_core::gf2::{BitVec, Gf2Matrix};
use wiretap_core::scrambler::{ScramblerPair, ScramblerSpec};
use wiretap_core::sim::{run_point, Scenario, Scrambling, StopOn, StopRule};

fn table(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<u8>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..2)).collect()).collect()
}

fn matrix(t: &[Vec<u8>]) -> Gf2Matrix {
    let refs: Vec<&[u8]> = t.iter().map(Vec::as_slice).collect();
    Gf2Matrix::from_table(&refs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn row_vector_product_matches_schoolbook(rows in 1usize..90, cols in 1usize..90, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = table(&mut rng, rows, cols);
        let v: Vec<u8> = (0..rows).map(|_| rng.random_range(0..2)).collect();
        let m = matrix(&t);
        let bv = BitVec::from_bits(&v);
        let dense = m.mat_vec(&bv).unwrap();
        let sparse = m.to_sparse().mat_vec(&bv).unwrap();
        for j in 0..cols {
            let want = (0..rows).fold(0u8, |a, i| a ^ (t[i][j] & v[i])) == 1;
            prop_assert_eq!(dense.get(j), want);
            prop_assert_eq!(sparse.get(j), want);
        }
    }

    #[test]
    fn product_matches_schoolbook(a in 1usize..40, b in 1usize..40, c in 1usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (table(&mut rng, a, b), table(&mut rng, b, c));
        let p = matrix(&x).mul(&matrix(&y)).unwrap();
        for i in 0..a {
            for j in 0..c {
                let want = (0..b).fold(0u8, |s, l| s ^ (x[i][l] & y[l][j])) == 1;
                prop_assert_eq!(p.get(i, j), want);
            }
        }
    }

    #[test]
    fn inverse_is_two_sided(k in 1usize..48, w in 1usize..6, seed in any::<u64>()) {
        let m = Gf2Matrix::random_regular(k, w.min(k), seed).unwrap();
        match m.invert().unwrap() {
            Some(inv) => {
                prop_assert!(m.mul(&inv).unwrap().is_identity());
                prop_assert!(inv.mul(&m).unwrap().is_identity());
                prop_assert_eq!(m.rank(), k);
            }
            None => prop_assert!(m.rank() < k),
        }
    }

    #[test]
    fn transpose_and_text_round_trips(rows in 1usize..30, cols in 1usize..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = matrix(&table(&mut rng, rows, cols));
        prop_assert_eq!(&m.transpose().transpose(), &m);
        prop_assert_eq!(&Gf2Matrix::from_hex(&m.to_hex()).unwrap(), &m);
    }

    #[test]
    fn scrambler_round_trip(k in 2usize..40, l in 1usize..4, wf in 0.0f64..1.0, seed in any::<u64>()) {
        let w = 1 + ((k - 1) as f64 * wf) as usize;
        let pair = ScramblerPair::build(&ScramblerSpec::block(k, l, w, seed)).unwrap();
        prop_assert!(pair.forward().mul(pair.inverse()).unwrap().is_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x = BitVec::random(k * l, &mut rng);
        let y = pair.scramble(&x).unwrap();
        prop_assert_eq!(pair.descramble(&y).unwrap(), x);
        let off = pair.inverse_column_weights().iter().filter(|&&c| c != w * l).count();
        prop_assert!(off <= pair.repair_count());
    }

    #[test]
    fn bch_corrects_up_to_t(m in 4u32..9, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let dims = dimension_table(m);
        let (_, k) = dims[pick.index(dims.len())];
        // several radii can share a dimension; the code achieves the largest
        let t = dims.iter().filter(|d| d.1 == k).map(|d| d.0).max().unwrap();
        let code = BchCode::build(m, k).unwrap();
        prop_assert_eq!(code.t(), t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = BitVec::random(k, &mut rng);
        let c = code.encode(&u).unwrap();
        prop_assert!(code.is_codeword(&c));
        let mut r = c.clone();
        let errors = rng.random_range(0..=t);
        for p in rand::seq::index::sample(&mut rng, code.n(), errors) {
            r.flip(p);
        }
        let out = code.decode(&r).unwrap();
        prop_assert!(out.success);
        prop_assert_eq!(out.corrected, errors);
        prop_assert_eq!(out.message, u);
    }

    #[test]
    fn ldpc_codewords_have_zero_syndrome(k in 8usize..64, extra in 8usize..64, seed in any::<u64>()) {
        let n = k + extra;
        let code = LdpcCode::peg(n, k, &DegreeProfile::regular(n, k, 3).unwrap(), seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = code.encode(&BitVec::random(k, &mut rng)).unwrap();
        prop_assert!(code.syndrome_is_zero(&c));
        let h = code.parity_check();
        prop_assert_eq!(&parse_alist(&write_alist(h)).unwrap(), h);
    }

    #[test]
    fn single_column_descrambler_keeps_ber(db in -3.0f64..10.0, k in 2usize..300) {
        let pe = uncoded_rates(db, k).0;
        let got = scrambled_unitary_ber(db, &OddSelection::new(k, 1));
        prop_assert!((got / pe - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_column_descrambler_is_frame_parity(db in -3.0f64..10.0, k in 2usize..300) {
        let pe = uncoded_rates(db, k).0;
        let got = scrambled_unitary_ber(db, &OddSelection::new(k, k));
        let want = 0.5 * (1.0 - (1.0 - 2.0 * pe).powi(k as i32));
        prop_assert!((got / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn concatenated_parity_closed_form(p in 0.0f64..0.5, l in 1usize..200) {
        let (a, b) = (concat_real_scrambling(p, l), concat_real_scrambling_closed(p, l));
        prop_assert!((a - b).abs() <= 1e-9 * b + 1e-15);
    }

    #[test]
    fn joint_outcomes_sum_to_one(db in -5.0f64..12.0, rate in 0.1f64..1.0) {
        let ig = ExactHarqIntegrand::new(db, rate).unwrap();
        prop_assert!((ig.total() - 1.0).abs() < 1e-8);
        prop_assert!(ig.p1 >= 0.0 && ig.p2 >= 0.0 && ig.p3 >= 0.0 && ig.p4 >= 0.0);
    }

    #[test]
    fn harq_never_hurts_bob(db in -4.0f64..10.0, q_max in 1usize..5) {
        let code = BoundedDistance::new(511, 385, 14).unwrap();
        let pf_q = |x: f64, q: usize| code.pf(x + 10.0 * (q as f64).log10());
        let (bob, _) = harq_system_fer(&HarqSpec { q_max, sg_db: 0.0 }, pf_q, db);
        prop_assert!(bob <= code.pf(db) + 1e-15);
    }

    #[test]
    fn harq_failures_match_success_recursion(f in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..6)) {
        let pf_q = |x: f64, q: usize| if x == 0.0 { f[q - 1].0 } else { f[q - 1].1 };
        let (bob, eve) = harq_system_fer(&HarqSpec { q_max: f.len(), sg_db: 1.0 }, pf_q, 0.0);
        let (mut reach_b, mut reach_e, mut ok_b, mut ok_e) = (1.0, 1.0, 0.0, 0.0);
        for &(fb, fe) in &f {
            ok_b += reach_b * (1.0 - fb);
            ok_e += reach_e * (1.0 - fe);
            reach_b *= fb;
            reach_e *= fb * fe;
        }
        prop_assert!((bob - (1.0 - ok_b)).abs() < 1e-12);
        prop_assert!((eve - (1.0 - ok_e)).abs() < 1e-12);
    }

    #[test]
    fn gap_shrinks_with_eve_threshold(eve_lo in 0.05f64..0.2, eve_hi in 0.25f64..0.45) {
        let code = BoundedDistance::new(511, 385, 14).unwrap();
        let c = ErrorRateCurve::from_fn(&grid(-2.0, 12.0, 0.1), |x| (code.perfect_scrambling(x), code.pf(x))).unwrap();
        let gap = |eve| security_gap(&c, &c, &SecurityGapQuery { bob_threshold: 1e-5, eve_threshold: eve }).unwrap().gap_db;
        prop_assert!(gap(eve_lo) < gap(eve_hi));
    }

    #[test]
    fn curve_csv_round_trip(n in 1usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<CurvePoint> = (0..n)
            .map(|i| CurvePoint {
                ebn0_db: i as f64 * 0.25 - 1.0,
                pe: rng.random::<f64>() * 0.5,
                pf: rng.random::<f64>(),
                provenance: if i % 2 == 0 { Provenance::Simulated } else { Provenance::ModelAdjusted },
                trials: Some(rng.random_range(1..1_000_000)),
                errors: if i % 3 == 0 { None } else { Some(rng.random_range(0..100)) },
            })
            .collect();
        let c = ErrorRateCurve::new(points).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        prop_assert_eq!(ErrorRateCurve::read_csv(&buf[..]).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reruns_do_not_depend_on_worker_count(seed in any::<u64>(), db in 1.0f64..4.0) {
        let code = CodeSpec::Bch(BchCode::build(5, 16).unwrap());
        let pair = ScramblerPair::build(&ScramblerSpec::block(16, 3, 5, seed)).unwrap();
        let s = Scenario::new(code, db)
            .with_scrambling(Scrambling::Real(Arc::new(pair)))
            .with_harq(HarqSpec { q_max: 2, sg_db: -1.0 });
        let stop = StopRule { min_errors: 50, max_frames: 6000, min_frames: 0, on: StopOn::Both };
        let a = run_point(&s, &stop, seed, 1).unwrap();
        prop_assert_eq!(&run_point(&s, &stop, seed, 4).unwrap(), &a);
        prop_assert_eq!(&run_point(&s, &stop, seed, 16).unwrap(), &a);
    }
}
