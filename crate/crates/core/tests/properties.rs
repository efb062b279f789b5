use proptest::prelude::*;

use quadbct_core::family::{
    classify, classify_verdict, eval_f, eval_with_k, even_k_reduce, Coeffs, StructureCache,
    Thetas, Verdict,
};
use quadbct_core::machinery::{
    compute_tau_vector, compute_vi, lemma_core_criteria, lemma_core_oracle, vi_properties,
};
use quadbct_core::sbox::{self, build_table, random_permutation, BctMethod};
use quadbct_core::{Elem, Field};

fn gf64() -> Field {
    Field::new(3, 1).unwrap()
}

fn gf1024() -> Field {
    Field::new(5, 3).unwrap()
}

fn elem(bits: u32) -> impl Strategy<Value = Elem> {
    (0u32..1 << bits).prop_map(Elem)
}

fn tuple(bits: u32) -> impl Strategy<Value = Coeffs> {
    [elem(bits), elem(bits), elem(bits), elem(bits)].prop_map(Coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(x in elem(10), y in elem(10), z in elem(10)) {
        let f = gf1024();
        prop_assert_eq!(f.mul(x, y), f.mul_reference(x, y));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, y + z), f.mul(x, y) + f.mul(x, z));
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), Elem::ONE);
        }
    }

    #[test]
    fn frobenius_and_conjugation(x in elem(10), y in elem(10), j in 0u32..10) {
        let f = gf1024();
        prop_assert_eq!(f.frob(f.mul(x, y), j), f.mul(f.frob(x, j), f.frob(y, j)));
        prop_assert_eq!(f.conj(f.conj(x)), x);
        prop_assert!(f.in_subfield(f.norm(x)));
        prop_assert!(f.in_subfield(x + f.conj(x)));
        prop_assert_eq!(f.abs_trace(x), f.subfield_trace(x + f.conj(x)).unwrap());
    }

    #[test]
    fn artin_schreier_roots(a in elem(10)) {
        let f = gf1024();
        let roots = f.solve_artin_schreier(a, f.k()).unwrap();
        prop_assert_eq!(roots.len(), if f.abs_trace(a) == 0 { 2 } else { 0 });
        for r in roots {
            prop_assert_eq!(f.frob_k(r) + r, a);
        }
    }

    #[test]
    fn norm_balance_any_tuple(c in tuple(10)) {
        prop_assert!(Thetas::compute(&gf1024(), &c).norm_balance_holds(&gf1024()));
    }

    #[test]
    fn classify_depends_only_on_thetas(c in tuple(6), u in 1u32..64) {
        // scaling by a subfield element of norm 1 keeps every theta
        let f = gf64();
        let u = Elem(u);
        let unit = f.div(u, f.conj(u));
        let d = Coeffs(c.0.map(|x| f.mul(x, unit)));
        let (t, s) = (Thetas::compute(&f, &c), Thetas::compute(&f, &d));
        if t == s {
            prop_assert_eq!(classify(&f, &c), classify(&f, &d));
        }
    }

    #[test]
    fn tuple_text_roundtrip(c in tuple(10)) {
        let s = c.to_string();
        prop_assert_eq!(s.parse::<Coeffs>().unwrap(), c);
        prop_assert_eq!(Coeffs::decode(c.encode(10), 10), c);
    }

    #[test]
    fn family_is_quadratic(c in tuple(10), x in elem(10), y in elem(10)) {
        // f(x + y) + f(x) + f(y) is bilinear, so f(0) = 0 and the second
        // derivative vanishes along a third direction
        let f = gf1024();
        let d = |a: Elem, b: Elem| eval_f(&f, &c, a + b) + eval_f(&f, &c, a) + eval_f(&f, &c, b);
        prop_assert_eq!(eval_f(&f, &c, Elem::ZERO), Elem::ZERO);
        let z = Elem(0x155);
        prop_assert_eq!(d(x + z, y), d(x, y) + d(z, y));
    }

    #[test]
    fn small_equation_criteria_match_brute_force(tau in elem(10), nu in elem(10)) {
        let f = gf1024();
        let oracle = lemma_core_oracle(&f, tau, nu);
        prop_assert!(matches!(oracle.count, 0 | 2 | 4));
        prop_assert_eq!(lemma_core_criteria(&f, tau, nu).unwrap().count, oracle.count);
    }

    #[test]
    fn closed_forms_and_relations(c in tuple(10), a in 1u32..1024, b in elem(10)) {
        let f = gf1024();
        let a = Elem(a);
        let tv = compute_tau_vector(&f, &c, a, b).unwrap();
        let vi = compute_vi(&f, &c, a, b, &tv).unwrap();
        for chk in vi_properties(&f, &c, a, b, &tv, &vi) {
            prop_assert!(chk.pass, "{}", chk.tag);
        }
    }

    #[test]
    fn even_k_reduction_contract(c in tuple(10), x in elem(10)) {
        let f = gf1024();
        let (d, kp) = even_k_reduce(&f, &c, 2).unwrap();
        prop_assert_eq!(kp % 2, 1);
        prop_assert_eq!(f.frob(eval_with_k(&f, &c, 2, x), kp), eval_with_k(&f, &d, kp, x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bct_methods_agree_on_random_permutations(seed in any::<u64>(), n in 2u32..7) {
        let t = random_permutation(n, seed);
        prop_assert_eq!(
            sbox::bct_rows(&t, BctMethod::Definitional).unwrap(),
            sbox::bct_rows(&t, BctMethod::Lqsl).unwrap()
        );
        let delta = sbox::differential_uniformity(t.table());
        let beta = sbox::bct(&t, BctMethod::Lqsl, false).unwrap().uniformity;
        prop_assert!(beta >= delta);
    }

    #[test]
    fn ddt_rows_sum_to_field_size(c in tuple(6)) {
        let f = gf64();
        let ddt = sbox::ddt(&build_table(&f, &c), true).unwrap();
        for row in ddt.full_table.unwrap() {
            prop_assert_eq!(row.iter().sum::<u32>(), 64);
            prop_assert!(row.iter().all(|v| v % 2 == 0));
        }
    }

    #[test]
    fn gamma0_orbit_structure(c in tuple(6)) {
        let f = gf64();
        if classify_verdict(&f, &c) == Verdict::Gamma0 {
            let cache = StructureCache::new(&f, &c).unwrap();
            for a in f.nonzero_elements() {
                let e = |x| cache.eta(&f, x);
                prop_assert_eq!(e(e(e(a))), a);
                let m = cache.big_m(&f, a);
                prop_assert!(!m.is_zero());
                prop_assert_eq!(cache.big_m(&f, e(a)), m);
                let sum = eval_f(&f, &c, a) + eval_f(&f, &c, e(a)) + eval_f(&f, &c, e(e(a)));
                prop_assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn gamma_members_are_permutations(c in tuple(6)) {
        let f = gf64();
        if classify_verdict(&f, &c).is_gamma() {
            prop_assert!(build_table(&f, &c).is_permutation());
        }
    }
}
