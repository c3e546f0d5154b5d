mod common;

use heegaard::harness::{rng, sample_word};
use heegaard::invariants::{betti_number, homology, lens_matrix_oracle, smith_normal_form, PresentationMatrix};
use heegaard::slp::{cyclic_reduce, is_cyclically_reduced, Letter};
use heegaard::street::{HeegaardDiagram, DEFAULT_GUARD};
use heegaard::word::{parse_word, HeegaardWord};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn slp_operations_match_expansion(seed in any::<u64>(), max_len in 1u64..=2000) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_program(&mut r, 5, max_len);
        prop_assert_eq!(common::check_slp(&mut r, &a, 5), Ok(()));
    }

    #[test]
    fn smith_form_matches_divisors(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_matrix(&mut r);
        let k = PresentationMatrix::from_i64(&m);
        let s = smith_normal_form(&k, false);
        let nonzero: Vec<BigInt> = s.diagonal.iter().filter(|x| !x.is_zero()).cloned().collect();
        prop_assert_eq!(&nonzero, &common::invariant_factors(&common::to_big(&m), k.cols));
        prop_assert_eq!(betti_number(&k), k.cols - nonzero.len());
    }

    #[test]
    fn cyclic_reduction_is_idempotent(codes in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..40)) {
        let w: Vec<Letter> = codes.iter().map(|&c| Letter::from_code(c).unwrap()).collect();
        let once = cyclic_reduce(&w);
        prop_assert!(is_cyclically_reduced(&once));
        prop_assert_eq!(cyclic_reduce(&once), once);
    }

    #[test]
    fn words_print_and_parse(g in 1u32..=4, seed in any::<u64>(), n in 0usize..40) {
        let w = sample_word(g, n, &mut rng(seed));
        prop_assert_eq!(parse_word(g, &w.to_string()).unwrap(), w);
    }

    #[test]
    fn torus_pipeline_matches_oracle(seed in any::<u64>(), n in 1usize..60) {
        let w = sample_word(1, n, &mut rng(seed));
        let d = HeegaardDiagram::from_word(&w, true).unwrap();
        let h = homology(&d, DEFAULT_GUARD).unwrap();
        prop_assert!(h.same_group(&lens_matrix_oracle(&w).unwrap()), "{}", w);
    }
}

#[test]
fn sampler_letter_frequencies_are_uniform() {
    // Chi-square on 10^5 draws of single letters at genus 2 (ten signed
    // generators, nine degrees of freedom). 27.88 is the 0.999 quantile.
    let mut r = rng(77);
    let mut counts = [0u32; 10];
    for _ in 0..100_000 {
        let w: HeegaardWord = sample_word(2, 1, &mut r);
        let (s, k) = &w.factors[0];
        counts[2 * s + usize::from(*k < BigInt::zero())] += 1;
    }
    let expected = 10_000.0;
    let chi2: f64 = counts.iter().map(|&c| (f64::from(c) - expected).powi(2) / expected).sum();
    assert!(chi2 < 27.88, "chi-square {chi2} for {counts:?}");
}

#[test]
fn unrefined_and_refined_pipelines_agree() {
    let mut r = rng(3);
    for g in 2..=3 {
        for _ in 0..10 {
            let n = r.gen_range(1..=25);
            let w = sample_word(g, n, &mut r);
            let a = homology(&HeegaardDiagram::from_word(&w, false).unwrap(), DEFAULT_GUARD).unwrap();
            let b = homology(&HeegaardDiagram::from_word(&w, true).unwrap(), DEFAULT_GUARD).unwrap();
            assert!(a.same_group(&b), "{w}: {a} vs {b}");
        }
    }
}
