mod common;

use common::{field, homogeneous, poly};
use num_traits::Zero;
use proptest::prelude::*;
use quadcurl::polycore::{
    curl_scalar, curl_vec, div, grad, integrate_cell, koszul, poincare, rat, CellGeometry, Polynomial, Rational,
};

#[test]
fn null_homotopy_on_every_monomial_to_degree_ten() {
    for d in 0..=10u32 {
        for a in 0..=d {
            let m = Polynomial::monomial(a, d - a, Rational::from_integer(1.into()));
            let pm = poincare(&m);
            assert_eq!(curl_vec(&pm), m, "x^{a} y^{}", d - a);
            assert_eq!(pm.degree(), Some(d + 1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn null_homotopy_is_linear(p in poly(10)) {
        prop_assert_eq!(curl_vec(&poincare(&p)), p);
    }

    #[test]
    fn poincare_raises_degree_by_one(p in poly(8)) {
        prop_assume!(!p.is_zero());
        prop_assert_eq!(poincare(&p).degree(), p.degree().map(|d| d + 1));
    }

    #[test]
    fn curl_of_grad_and_div_of_curl_vanish(p in poly(8)) {
        prop_assert!(curl_vec(&grad(&p)).is_zero());
        prop_assert!(div(&curl_scalar(&p)).is_zero());
    }

    #[test]
    fn koszul_scales_homogeneous_pieces((d, u) in (0u32..7).prop_flat_map(|d| (Just(d), homogeneous(d)))) {
        prop_assert_eq!(curl_vec(&koszul(&u)), u.scale(&rat(d as i64 + 2, 1)));
    }

    #[test]
    fn cell_integral_is_translation_covariant(
        p in poly(5),
        cx in (-7i64..7, 1i64..5),
        cy in (-7i64..7, 1i64..5),
        rect in any::<bool>(),
    ) {
        let c = [rat(cx.0, cx.1), rat(cy.0, cy.1)];
        let cell = if rect {
            CellGeometry::rectangle(rat(-1, 3), rat(2, 1), rat(0, 1), rat(1, 2)).unwrap()
        } else {
            CellGeometry::triangle([[rat(0, 1), rat(0, 1)], [rat(3, 2), rat(1, 4)], [rat(1, 3), rat(1, 1)]]).unwrap()
        };
        let shifted = cell.translate(&c);
        let moved = p.translate(&[-c[0].clone(), -c[1].clone()]);
        prop_assert_eq!(integrate_cell(&p, &cell), integrate_cell(&moved, &shifted));
    }

    #[test]
    fn cell_integral_is_linear(p in poly(5), q in poly(5), s in (-5i64..5, 1i64..4)) {
        let cell = CellGeometry::reference_triangle();
        let s = rat(s.0, s.1);
        let lhs = integrate_cell(&(&p + &q.scale(&s)), &cell);
        prop_assert_eq!(lhs, integrate_cell(&p, &cell) + s * integrate_cell(&q, &cell));
    }

    #[test]
    fn float_derivatives_match_central_differences(
        p in poly(6),
        x in 0.05f64..0.95,
        y in 0.05f64..0.95,
    ) {
        let h = 1e-5;
        let fd = [
            (p.eval_f64(x + h, y) - p.eval_f64(x - h, y)) / (2.0 * h),
            (p.eval_f64(x, y + h) - p.eval_f64(x, y - h)) / (2.0 * h),
        ];
        let g = grad(&p).eval_f64(x, y);
        let c = curl_scalar(&p).eval_f64(x, y);
        let scale = 1.0 + g[0].abs().max(g[1].abs());
        for i in 0..2 {
            prop_assert!((g[i] - fd[i]).abs() <= 1e-7 * scale, "grad {i}: {} vs {}", g[i], fd[i]);
        }
        prop_assert!((c[0] - fd[1]).abs() <= 1e-7 * scale);
        prop_assert!((c[1] + fd[0]).abs() <= 1e-7 * scale);
    }

    #[test]
    fn curl_vec_matches_central_differences(v in field(6), x in 0.05f64..0.95, y in 0.05f64..0.95) {
        let h = 1e-5;
        let fd = (v.c2.eval_f64(x + h, y) - v.c2.eval_f64(x - h, y)) / (2.0 * h)
            - (v.c1.eval_f64(x, y + h) - v.c1.eval_f64(x, y - h)) / (2.0 * h);
        let exact = curl_vec(&v).eval_f64(x, y);
        prop_assert!((exact - fd).abs() <= 1e-7 * (1.0 + exact.abs()));
    }
}

#[test]
fn zero_polynomial_has_no_degree() {
    assert_eq!(Polynomial::zero().degree(), None);
    assert!(Rational::zero().is_zero());
}
