//! Property tests for the algebraic invariants the pipeline relies on.

use num_bigint::BigInt;
use proptest::prelude::*;

use expsum_core::charsum::{char_sum, histogram_over, histogram_with_chunks, CharacterChoice, CycInt};
use expsum_core::exec::ExecConfig;
use expsum_core::ff::{build_field, Field, FiniteField, GaloisField, ZechField};
use expsum_core::mpoly::{parse, MultiPoly};
use expsum_core::singular::analyze_germ;
use expsum_core::verify::{
    dimension_via_chi, elementary_from_power_sums, predicted_dimension, recover_eigenvalues, recurrence_holds,
    RecoveryStatus,
};

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn cycint(p: u64) -> impl Strategy<Value = CycInt> {
    prop::collection::vec(-50i64..50, p as usize)
        .prop_map(move |c| CycInt::from_coeffs(p, c.into_iter().map(BigInt::from).collect()))
}

fn small_poly(k: &GaloisField, n: usize, terms: &[(Vec<u16>, u64)]) -> MultiPoly<GaloisField> {
    MultiPoly::from_terms(k, n, terms.iter().map(|(e, c)| (e.clone(), k.element_at(c % k.order()))))
}

fn terms(n: usize, max_exp: u16) -> impl Strategy<Value = Vec<(Vec<u16>, u64)>> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), 0u64..1000), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cycint_ring_laws(a in cycint(7), b in cycint(7), c in cycint(7)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn conjugation_is_a_ring_map(a in cycint(5), b in cycint(5), g in 1u64..5) {
        prop_assert_eq!(a.mul(&b).conjugate(g), a.conjugate(g).mul(&b.conjugate(g)));
        let direct = a.numeric_value(g);
        let via = a.conjugate(g).numeric_value(1);
        prop_assert!((direct - via).norm() < 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn cycint_json_round_trip(a in cycint(11)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<CycInt>(&text).unwrap(), a);
    }

    #[test]
    fn field_axioms(pi in 0usize..5, s in 1usize..4, x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
        let k = build_field(PRIMES[pi], s).unwrap();
        let q = k.order();
        let (a, b, c) = (k.element_at(x % q), k.element_at(y % q), k.element_at(z % q));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        prop_assert_eq!(k.pow(&a, q), a.clone());
        if !k.is_zero(&a) {
            prop_assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
        }
        // Zech tables agree with polynomial arithmetic
        let zf = ZechField::new(&k).unwrap();
        let (za, zb) = (zf.from_coeffs(&k.to_coeffs(&a)), zf.from_coeffs(&k.to_coeffs(&b)));
        prop_assert_eq!(zf.to_coeffs(&zf.mul(&za, &zb)), k.to_coeffs(&k.mul(&a, &b)));
        prop_assert_eq!(zf.to_coeffs(&zf.add(&za, &zb)), k.to_coeffs(&k.add(&a, &b)));
        prop_assert_eq!(zf.trace_to_prime(&za), k.trace_to_prime(&a));
    }

    #[test]
    fn histogram_independent_of_partition(pi in 1usize..4, t in terms(2, 4), chunks in 1usize..40) {
        let k = build_field(PRIMES[pi], 1).unwrap();
        let f = small_poly(&k, 2, &t);
        let seq = ExecConfig::sequential();
        let base = histogram_over(&f, &k, &seq).unwrap();
        let split = histogram_with_chunks(&f, &k, chunks, &ExecConfig::default()).unwrap();
        prop_assert_eq!(&base.counts, &split.counts);
        prop_assert_eq!(base.total(), (k.order() as u128).pow(2));
    }

    #[test]
    fn galois_action_permutes_characters(t in terms(2, 3), b in 1u64..7) {
        let k = build_field(7, 1).unwrap();
        let f = small_poly(&k, 2, &t);
        let h = histogram_over(&f, &k, &ExecConfig::sequential()).unwrap();
        let s1 = char_sum(&h, CharacterChoice::new(7, 1).unwrap());
        let sb = char_sum(&h, CharacterChoice::new(7, b).unwrap());
        prop_assert_eq!(s1.conjugate(b), sb);
    }

    #[test]
    fn display_parse_round_trip(pi in 0usize..5, t in terms(3, 5)) {
        let k = build_field(PRIMES[pi], 1).unwrap();
        let f = small_poly(&k, 3, &t);
        prop_assert_eq!(parse(&f.to_string(), 3, &k).unwrap(), f);
    }

    #[test]
    fn chain_matches_closed_form(d in 2u32..=6, n in 1usize..=4, frac in 0.0f64..1.0) {
        let top = (d as u64 - 1).pow(n as u32);
        let mu = ((top as f64) * frac) as u64 % top.max(1);
        let chain = dimension_via_chi(d, n, mu).unwrap();
        prop_assert_eq!(Some(chain.dimension), predicted_dimension(d, n, mu).ok());
    }

    #[test]
    fn newton_round_trip(roots in prop::collection::vec(prop::sample::select(vec![-3i64, 3]), 1..7), extra in 1usize..4) {
        // integer eigenvalues ±3: pure of modulus 3 = 9^(1/2)
        let dim = roots.len();
        let sums: Vec<CycInt> = (1..=dim + extra)
            .map(|m| {
                let pm: i64 = roots.iter().map(|r| r.pow(m as u32)).sum();
                CycInt::from_int(5, -pm)
            })
            .collect();
        let power: Vec<CycInt> = sums.iter().map(CycInt::neg).collect();
        let (e, exact) = elementary_from_power_sums(&power, dim);
        prop_assert!(exact);
        prop_assert!(recurrence_holds(&power, &e));
        let rec = recover_eigenvalues(&sums, dim, 9, 1);
        prop_assert_eq!(rec.status, RecoveryStatus::Verified);
    }

    #[test]
    fn brieskorn_pham_milnor(a in 2u32..6, b in 2u32..6) {
        let k = build_field(31, 1).unwrap();
        let g = parse(&format!("x1^{a} + x2^{b}"), 2, &k).unwrap();
        let data = analyze_germ(&g).unwrap();
        prop_assert_eq!(data.milnor, Some(((a - 1) * (b - 1)) as u64));
        prop_assert_eq!(data.milnor_orlik_agrees, Some(true));
    }
}
