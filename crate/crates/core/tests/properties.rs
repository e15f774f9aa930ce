//! Property-based invariants of the exact arithmetic layers.

use num_bigint::BigInt;
use proptest::prelude::*;

use logmat_core::cyclotomic::CycloElement;
use logmat_core::iwasawa::{weierstrass_valuation_check, Character, IwasawaSeries};
use logmat_core::logmat::{build_cvn, FrobeniusBlock, FrobeniusData};
use logmat_core::matrix::Matrix;
use logmat_core::padic::PadicNumber;
use logmat_core::sampling;
use logmat_core::valuation::{Rat, Valuation};
use logmat_core::{iwasawa, PadicMatrix};

const N: u32 = 14;

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(3u64), Just(5), Just(7)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws_hold_at_precision(p in prime(), a in -100_000i64..100_000, b in -100_000i64..100_000, c in -100_000i64..100_000) {
        let x = PadicNumber::from_i64(p, a, N).unwrap();
        let y = PadicNumber::from_i64(p, b, N).unwrap();
        let z = PadicNumber::from_i64(p, c, N).unwrap();
        let assoc_l = (&x + &y).add_ref(&z);
        let assoc_r = x.add_ref(&(&y + &z));
        prop_assert!(assoc_l.congruent(&assoc_r));
        let dist_l = x.mul_ref(&(&y + &z));
        let dist_r = (&x * &y).add_ref(&(&x * &z));
        prop_assert!(dist_l.congruent(&dist_r));
        // Against the integer oracle.
        let oracle = PadicNumber::from_bigint(p, &BigInt::from(a as i128 * b as i128 + a as i128 * c as i128), N).unwrap();
        prop_assert!(dist_l.congruent(&oracle));
    }

    #[test]
    fn valuation_is_additive(p in prime(), a in -100_000i64..100_000, b in -100_000i64..100_000) {
        let x = PadicNumber::from_i64(p, a, N).unwrap();
        let y = PadicNumber::from_i64(p, b, N).unwrap();
        if let (Valuation::Exact(va), Valuation::Exact(vb)) = (x.valuation(), y.valuation()) {
            prop_assert_eq!(x.mul_ref(&y).valuation(), Valuation::Exact(va + vb));
        }
    }

    #[test]
    fn invert_unit_is_an_involution(p in prime(), a in 1i64..100_000) {
        let x = PadicNumber::from_i64(p, a, N).unwrap();
        if x.valuation() == Valuation::exact_int(0) {
            let back = x.invert_unit().unwrap().invert_unit().unwrap();
            prop_assert!(back.congruent(&x));
            prop_assert_eq!(back, x);
        }
    }

    #[test]
    fn cyclo_valuation_is_multiplicative(p in prime(), a in 1i64..10_000, i in 0usize..4, b in 1i64..10_000, j in 0usize..4) {
        let level = 2u32;
        let mk = |c: i64, idx: usize| {
            let mut coeffs = vec![PadicNumber::exact_zero(p); idx + 1];
            coeffs[idx] = PadicNumber::from_i64(p, c, N).unwrap();
            CycloElement::from_coeffs(p, level, coeffs).unwrap()
        };
        let x = mk(a, i);
        let y = mk(b, j);
        let (vx, vy) = (x.valuation(), y.valuation());
        if let (Valuation::Exact(rx), Valuation::Exact(ry)) = (vx, vy) {
            prop_assert_eq!(x.mul_ref(&y).valuation(), Valuation::Exact(rx + ry));
        }
    }

    #[test]
    fn lifting_preserves_valuation(p in prop_oneof![Just(3u64), Just(5)], a in 1i64..5_000, i in 0usize..3) {
        let mut coeffs = vec![PadicNumber::exact_zero(p); i + 1];
        coeffs[i] = PadicNumber::from_i64(p, a, N).unwrap();
        let x = CycloElement::from_coeffs(p, 1, coeffs).unwrap();
        let lifted = x.lift_to_level(2).unwrap();
        prop_assert_eq!(lifted.valuation(), x.valuation());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in prop_oneof![Just(3u64), Just(5)],
                                          f in prop::collection::vec(-200i64..200, 1..5),
                                          g in prop::collection::vec(-200i64..200, 1..5)) {
        let mk = |v: &[i64]| IwasawaSeries::from_integer_coeffs(
            p,
            &v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(),
            N,
        ).unwrap();
        let (f, g) = (mk(&f), mk(&g));
        let theta = Character::new(p, 3).unwrap();
        let lhs = f.mul_ref(&g).eval_at_character(&theta).unwrap().value;
        let rhs = f.eval_at_character(&theta).unwrap().value
            .mul_ref(&g.eval_at_character(&theta).unwrap().value);
        let diff = lhs.sub_ref(&rhs);
        prop_assert!(!diff.is_provably_nonzero(), "difference valuation {:?}", diff.valuation());
    }

    #[test]
    fn newton_invariants_stable_under_unit_series(p in prop_oneof![Just(3u64), Just(5)],
                                                   seed in 0u64..1000,
                                                   mu in 0u32..2, lambda in 0u32..4,
                                                   unit_tail in prop::collection::vec(-100i64..100, 0..4)) {
        let mut rng = sampling::rng_from_seed(seed);
        let f = sampling::synthetic_coleman_series(&mut rng, p, mu, lambda, 6, N).unwrap();
        // A unit series: unit constant term, arbitrary tail.
        let mut coeffs = vec![BigInt::from(1)];
        coeffs.extend(unit_tail.iter().map(|&x| BigInt::from(x)));
        let u = IwasawaSeries::from_integer_coeffs(p, &coeffs, N).unwrap();
        let before = f.newton_invariants().unwrap();
        let after = f.mul_ref(&u).newton_invariants().unwrap();
        prop_assert_eq!(before.mu, after.mu);
        prop_assert_eq!(before.lambda, after.lambda);
    }

    #[test]
    fn weierstrass_identity_randomized(p in prop_oneof![Just(3u64), Just(5)],
                                        seed in 0u64..500, mu in 0u32..2, lambda in 0u32..4) {
        let mut rng = sampling::rng_from_seed(seed);
        let f = sampling::synthetic_coleman_series(&mut rng, p, mu, lambda, 7, N).unwrap();
        for n in 1..=3u32 {
            match weierstrass_valuation_check(&f, n) {
                Ok(report) => prop_assert!(report.matches, "n={n}: {:?}", report),
                Err(logmat_core::ArithError::NTooSmall { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
    }

    #[test]
    fn bottom_rows_divisible_by_phi(seed in 0u64..200, n in 1u32..4) {
        let mut rng = sampling::rng_from_seed(seed);
        let c: PadicMatrix = sampling::random_unit_matrix(&mut rng, 3, 2, N);
        let data = FrobeniusData::new(
            3,
            1,
            N,
            vec![FrobeniusBlock { label: "v".into(), f: 1, c }],
        ).unwrap();
        let cvn = build_cvn(&data, 0, n).unwrap();
        let phi = iwasawa::phi_series(3, n, N).unwrap();
        for j in 0..2 {
            prop_assert!(cvn.at(1, j).divisible_by(&phi).unwrap());
        }
    }

    #[test]
    fn determinant_routes_agree(seed in 0u64..500, size in 1usize..4) {
        let mut rng = sampling::rng_from_seed(seed);
        let m: Matrix<PadicNumber> = sampling::random_matrix(&mut rng, 5, size, N);
        let bareiss = logmat_core::matrix::det_bareiss(&m).unwrap();
        let expansion = logmat_core::matrix::det_expansion(&m);
        prop_assert!(bareiss.congruent(&expansion),
                     "bareiss {bareiss} vs expansion {expansion}");
    }
}

#[test]
fn epsilon_valuation_ladder() {
    // ord(eps_n) = 1/(p^(n-1)(p-1)) across levels and primes.
    for p in [3u64, 5] {
        for n in 1..=4u32 {
            let eps = CycloElement::epsilon(p, n, N).unwrap();
            let d = (p as i64).pow(n - 1) * (p as i64 - 1);
            assert_eq!(eps.valuation(), Valuation::Exact(Rat::new(1, d)));
        }
    }
}

#[test]
fn minors_vanish_for_every_non_filtration_row_tuple() {
    // Rows below gf_v of H_{v,n}(eps_n) vanish, so a minor with any row
    // tuple other than I_0 is exactly zero. Enumerated exhaustively on
    // desk-scale shapes.
    use logmat_core::criterion::{enumerate_index_tuples, i0_tuple};
    use logmat_core::logmat::{assemble_hn_at_epsilon, minor_at};
    let mut rng = sampling::rng_from_seed(99);
    for trial in 0..3 {
        let c = sampling::random_unit_matrix(&mut rng, 3, 4, N);
        let data = FrobeniusData::new(
            3,
            2,
            N,
            vec![FrobeniusBlock {
                label: "v".into(),
                f: 1,
                c,
            }],
        )
        .unwrap();
        let i0 = i0_tuple(&data);
        let tuples = enumerate_index_tuples(&data);
        for n in 1..=2u32 {
            let hn = assemble_hn_at_epsilon(&data, n).unwrap();
            for rows in &tuples {
                if *rows == i0 {
                    continue;
                }
                for cols in &tuples {
                    let m = minor_at(&hn, rows, cols).unwrap();
                    assert!(
                        m.is_exactly_zero(),
                        "trial {trial} n={n} I={rows} J={cols}: valuation {:?}",
                        m.valuation()
                    );
                }
            }
        }
    }
}

#[test]
fn symbolic_and_evaluated_routes_agree_on_random_gl4() {
    // Coefficient-wise evaluation of the symbolic product must agree with
    // the product of the evaluated factors; this exercises the modular
    // reduction paths on 4x4 blocks.
    use logmat_core::logmat::{build_hvn, hvn_at_epsilon};
    let mut rng = sampling::rng_from_seed(123);
    for _ in 0..3 {
        let c = sampling::random_unit_matrix(&mut rng, 3, 4, N);
        let data = FrobeniusData::new(
            3,
            2,
            N,
            vec![FrobeniusBlock {
                label: "v".into(),
                f: 1,
                c,
            }],
        )
        .unwrap();
        for n in 1..=3u32 {
            let symbolic = build_hvn(&data, 0, n).unwrap();
            let evaluated = hvn_at_epsilon(&data, 0, n).unwrap();
            let theta = Character::of_level(3, n).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let via_series = symbolic.at(i, j).eval_at_character(&theta).unwrap().value;
                    let diff = via_series.sub_ref(evaluated.at(i, j));
                    assert!(
                        !diff.is_provably_nonzero(),
                        "entry ({i},{j}) n={n}: {:?}",
                        diff.valuation()
                    );
                }
            }
        }
    }
}

#[test]
fn cvn_shape_for_blocked_antidiagonal_cv() {
    // For block anti-diagonal C_v the matrix C_{v,n} has the shape
    // [[0, B1], [Phi * B2, 0]] with unit blocks B1, B2.
    use logmat_core::logmat::build_cvn;
    let mut rng = sampling::rng_from_seed(31);
    let c = sampling::random_antidiagonal_c(&mut rng, 3, 2, N);
    let data = FrobeniusData::new(
        3,
        2,
        N,
        vec![FrobeniusBlock {
            label: "v".into(),
            f: 1,
            c,
        }],
    )
    .unwrap();
    for n in 1..=2u32 {
        let cvn = build_cvn(&data, 0, n).unwrap();
        let phi = iwasawa::phi_series(3, n, N).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(cvn.at(i, j).is_exactly_zero(), "top-left must vanish");
                assert!(
                    cvn.at(2 + i, 2 + j).is_exactly_zero(),
                    "bottom-right must vanish"
                );
                // Top-right: constants (degree 0); bottom-left: divisible by Phi.
                assert!(cvn.at(i, 2 + j).degree().unwrap_or(0) == 0);
                assert!(cvn.at(2 + i, j).divisible_by(&phi).unwrap());
            }
        }
    }
}

#[test]
fn block_factored_minors_match_dense_determinants() {
    // minor_at factors through the per-prime blocks; the dense determinant
    // of the assembled submatrix is the independent oracle.
    use logmat_core::criterion::{enumerate_index_tuples, i0_tuple};
    use logmat_core::logmat::{assemble_hn_at_epsilon, minor_at};
    use logmat_core::matrix::det_expansion;
    let mut rng = sampling::rng_from_seed(77);
    let c1 = sampling::random_unit_matrix(&mut rng, 3, 2, N);
    let c2 = sampling::random_unit_matrix(&mut rng, 3, 2, N);
    let data = FrobeniusData::new(
        3,
        1,
        N,
        vec![
            FrobeniusBlock {
                label: "v1".into(),
                f: 1,
                c: c1,
            },
            FrobeniusBlock {
                label: "v2".into(),
                f: 1,
                c: c2,
            },
        ],
    )
    .unwrap();
    let i0 = i0_tuple(&data);
    for n in 1..=2u32 {
        let hn = assemble_hn_at_epsilon(&data, n).unwrap();
        let dense = hn.to_dense();
        // Global indices of I_0 in the assembled matrix: per-block offsets.
        let offsets = [0usize, 2];
        let rows: Vec<usize> = i0
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(v, part)| part.iter().map(move |&i| offsets[v] + i - 1))
            .collect();
        for j in enumerate_index_tuples(&data) {
            let cols: Vec<usize> = j
                .parts()
                .iter()
                .enumerate()
                .flat_map(|(v, part)| part.iter().map(move |&i| offsets[v] + i - 1))
                .collect();
            let via_blocks = minor_at(&hn, &i0, &j).unwrap();
            let via_dense = det_expansion(&dense.submatrix(&rows, &cols));
            let diff = via_blocks.sub_ref(&via_dense);
            assert!(
                !diff.is_provably_nonzero(),
                "n={n} J={j}: block route {:?} vs dense {:?}",
                via_blocks.valuation(),
                via_dense.valuation()
            );
        }
    }
}

#[test]
fn key_sum_rejects_mismatched_family() {
    use logmat_core::criterion::{key_sum, ColemanFamily, Provenance};
    let mut rng = sampling::rng_from_seed(55);
    let mk = |c| {
        FrobeniusData::new(
            3,
            1,
            N,
            vec![FrobeniusBlock {
                label: "v".into(),
                f: 1,
                c,
            }],
        )
        .unwrap()
    };
    let data_a = mk(sampling::random_unit_matrix(&mut rng, 3, 2, N));
    let data_b = FrobeniusData::new(
        3,
        2,
        N,
        vec![FrobeniusBlock {
            label: "v".into(),
            f: 1,
            c: sampling::random_unit_matrix(&mut rng, 3, 4, N),
        }],
    )
    .unwrap();
    let family_b =
        ColemanFamily::from_entries(&data_b, Vec::new(), Provenance::UserSupplied).unwrap();
    assert!(key_sum(&data_a, &family_b, 1).is_err());
}
