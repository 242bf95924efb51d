mod common;

use chern_gap::algebra::{self, groebner, PolyVec, TermOrder, XYPoly};
use chern_gap::laurent::{BiLaurentPoly, ZUMonomial};
use chern_gap::linalg::{self, rat, Rat, SparseRatMatrix};
use common::dense_rank;
use num_traits::Zero;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| linalg::ratio(n, d))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<Rat>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(
            prop::collection::vec(prop_oneof![3 => Just(rat(0)), 2 => small_rat()], c),
            r,
        )
    })
}

fn laurent() -> impl Strategy<Value = BiLaurentPoly> {
    prop::collection::vec(((-3i64..=3), (0u32..=3), small_rat()), 0..5).prop_map(|terms| {
        BiLaurentPoly::from_terms(
            terms
                .into_iter()
                .map(|(k, i, c)| (ZUMonomial::new(k, i), c)),
        )
    })
}

fn xy() -> impl Strategy<Value = XYPoly> {
    prop::collection::vec(((0u32..=2), (0u32..=2), (-3i64..=3)), 0..4).prop_map(|terms| {
        XYPoly::from_terms(
            terms
                .into_iter()
                .map(|(a, b, c)| ((a, b), Rat::from_integer(c.into()))),
        )
    })
}

fn columns(rank: usize) -> impl Strategy<Value = Vec<PolyVec>> {
    prop::collection::vec(prop::collection::vec(xy(), rank), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_matches_dense_oracle(rows in matrix()) {
        let m = SparseRatMatrix::from_dense(&rows);
        prop_assert_eq!(linalg::rank(&m), dense_rank(rows.clone()));
        prop_assert_eq!(linalg::rank(&m), linalg::rank(&m.transpose()));
    }

    #[test]
    fn kernel_is_annihilated_and_complementary(rows in matrix()) {
        let m = SparseRatMatrix::from_dense(&rows);
        let kernel = linalg::kernel_basis(&m);
        prop_assert_eq!(kernel.len() + linalg::rank(&m), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(dense_rank(kernel.clone()), kernel.len());
    }

    #[test]
    fn solve_recovers_consistent_right_hand_sides(rows in matrix(), seed in prop::collection::vec(small_rat(), 6)) {
        let m = SparseRatMatrix::from_dense(&rows);
        let x: Vec<Rat> = seed.into_iter().take(m.cols()).chain(std::iter::repeat(rat(0))).take(m.cols()).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = linalg::solve(&m, &b).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
    }

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &BiLaurentPoly::one(), a.clone());
    }

    #[test]
    fn chart_change_is_a_ring_involution(a in laurent(), b in laurent()) {
        prop_assert_eq!(a.to_v_chart().to_v_chart(), a.clone());
        prop_assert_eq!((&a * &b).to_v_chart(), &a.to_v_chart() * &b.to_v_chart());
        prop_assert_eq!((&a + &b).to_v_chart(), &a.to_v_chart() + &b.to_v_chart());
        prop_assert_eq!(a.is_v_holomorphic(), a.to_v_chart().is_u_holomorphic());
    }

    #[test]
    fn frame_changes_are_inverse(a in laurent(), b in laurent()) {
        let bundle = common::bundle(3, "u - 2*z*u^2 + z^2*u^4");
        let (va, vb) = bundle.to_v_frame(&a, &b);
        prop_assert_eq!(bundle.to_u_frame(&va, &vb), (a.clone(), b.clone()));
    }

    #[test]
    fn parse_display_round_trip(a in laurent()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<BiLaurentPoly>().unwrap(), a);
    }

    #[test]
    fn xy_zu_round_trip(f in xy(), g in xy()) {
        prop_assert_eq!(XYPoly::from_zu(&f.to_zu()), Some(f.clone()));
        prop_assert_eq!((&f * &g).to_zu(), &f.to_zu() * &g.to_zu());
    }

    #[test]
    fn gcd_divides_and_is_greatest(f in xy(), g in xy(), h in xy()) {
        prop_assume!(!h.is_zero());
        let (fh, gh) = (&f * &h, &g * &h);
        let d = algebra::gcd(&fh, &gh);
        if d.is_zero() {
            prop_assert!(fh.is_zero() && gh.is_zero());
        } else {
            let q = algebra::exact_quotient(&fh, &d).expect("gcd divides f·h");
            prop_assert_eq!(&q * &d, fh.clone());
            prop_assert!(algebra::exact_quotient(&gh, &d).is_some());
            prop_assert!(algebra::exact_quotient(&d, &h).is_some());
        }
    }

    #[test]
    fn groebner_basis_is_closed_under_s_pairs(cols in columns(2)) {
        for order in [TermOrder::POT_GREVLEX, TermOrder::TOP_LEX] {
            let gb = groebner(2, &cols, order);
            prop_assert!(gb.s_pairs_reduce_to_zero());
            for c in &cols {
                prop_assert!(gb.contains(c));
            }
            for e in gb.elements() {
                prop_assert!(algebra::is_zero_vec(&gb.reduce(&e)));
            }
        }
    }

    #[test]
    fn syzygies_annihilate_columns(cols in columns(2)) {
        for s in algebra::syzygies(2, &cols) {
            prop_assert!(algebra::is_zero_vec(&algebra::combine(2, &cols, &s)));
        }
    }

    #[test]
    fn lift_reconstructs_members(cols in columns(2), coeffs in prop::collection::vec(xy(), 3)) {
        let coeffs: Vec<XYPoly> = coeffs.into_iter().take(cols.len()).collect();
        let v = algebra::combine(2, &cols, &coeffs);
        let lifted = algebra::lift(2, &cols, &v).expect("member lifts");
        prop_assert_eq!(algebra::combine(2, &cols, &lifted), v);
    }
}

#[test]
fn double_dual_of_free_is_free() {
    for g in 1..=3 {
        let free = algebra::Presentation::free(g);
        let rho = algebra::double_dual_map(&free).unwrap();
        assert_eq!(rho.target.gens(), g);
        assert!(rho.is_compatible());
        let coker = rho.cokernel();
        assert_eq!(algebra::colength_at_origin(&coker).unwrap().value, 0);
        assert_eq!(algebra::l_of_Q(&free).unwrap().value, 0);
    }
}
