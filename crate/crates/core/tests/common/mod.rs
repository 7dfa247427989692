#![allow(dead_code)]

use proptest::prelude::*;
use quadcurl::polycore::{rat, Polynomial, VectorField};

/// Polynomials of total degree at most `deg` with small rational coefficients.
pub fn poly(deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0..=deg, 0..=deg, -6i64..=6, 1i64..=5), 0..8).prop_map(move |terms| {
        let mut p = Polynomial::zero();
        for (a, b, n, d) in terms {
            if a + b <= deg {
                p.add_term(a, b, rat(n, d));
            }
        }
        p
    })
}

pub fn field(deg: u32) -> impl Strategy<Value = VectorField> {
    (poly(deg), poly(deg)).prop_map(|(a, b)| VectorField::new(a, b))
}

/// Homogeneous polynomial of degree `d`.
pub fn homogeneous(d: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-6i64..=6, 1i64..=5), (d + 1) as usize).prop_map(move |c| {
        let mut p = Polynomial::zero();
        for (a, (n, den)) in c.into_iter().enumerate() {
            p.add_term(a as u32, d - a as u32, rat(n, den));
        }
        p
    })
}
