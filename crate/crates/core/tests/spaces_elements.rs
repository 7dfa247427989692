mod common;

use proptest::prelude::*;
use quadcurl::derham_check::{random_cell, reference_frame};
use quadcurl::elements::{interpolate_local, Attachment, ElementTriple, FiniteElement};
use quadcurl::polycore::{curl_vec, grad, rat, Polynomial, Rational, Shape, VectorField};
use quadcurl::spaces::{
    curls, modified_poincare, scalar_span_contains, supported_combinations, vector_span_contains, v_space_for,
    w_space, Family, LocalFrame,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frames(shape: Shape, random: usize, seed: u64) -> Vec<LocalFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![reference_frame(shape)];
    out.extend((0..random).map(|_| LocalFrame::standard(random_cell(&mut rng, shape))));
    out
}

/// Vector monomials of total degree at most `d`.
fn bold_p(d: u32) -> Vec<VectorField> {
    let mut out = Vec::new();
    for t in 0..=d {
        for a in 0..=t {
            let m = Polynomial::monomial(a, t - a, Rational::from_integer(1.into()));
            out.push(VectorField::new(m.clone(), Polynomial::zero()));
            out.push(VectorField::new(Polynomial::zero(), m));
        }
    }
    out
}

#[test]
fn v_contains_full_polynomials_of_degree_r_minus_one() {
    for (family, shape, k) in supported_combinations() {
        for frame in frames(shape, 2, 11) {
            let v = v_space_for(family, k, &frame).unwrap();
            let r = family.r(k);
            assert!(vector_span_contains(v.vectors(), &bold_p(r - 1)), "{family} {shape} k={k}");
        }
    }
}

#[test]
fn curls_span_w_and_members_are_independent() {
    for (family, shape, k) in supported_combinations() {
        for frame in frames(shape, 1, 12) {
            let v = v_space_for(family, k, &frame).unwrap();
            assert_eq!(v.rank(), v.dim());
            let w = w_space(k, &frame).unwrap();
            let c = curls(&v);
            assert!(scalar_span_contains(&c, w.scalars()), "{family} {shape} k={k}");
            assert!(scalar_span_contains(w.scalars(), &c), "{family} {shape} k={k}");
        }
    }
}

#[test]
fn modified_members_have_constant_tangential_traces() {
    for (family, shape, k) in supported_combinations() {
        for frame in frames(shape, 2, 13) {
            let v = v_space_for(family, k, &frame).unwrap();
            if !v.modified {
                continue;
            }
            let cell = frame.local_cell();
            for m in &v.vectors()[v.gradient_count..] {
                for e in 0..cell.num_edges() {
                    let t = m.dot_const(&cell.edge_vector(e)).restrict_to_segment(cell.edge_start(e), &cell.edge_vector(e));
                    assert!(t.degree().unwrap_or(0) == 0, "{family} {shape} k={k} edge {e}");
                }
            }
        }
    }
}

#[test]
fn unisolvent_and_biorthogonal_on_random_cells() {
    for (family, shape, k) in supported_combinations() {
        for frame in frames(shape, 10, 14) {
            let el = FiniteElement::new(family, k, &frame).unwrap_or_else(|e| panic!("{family} {shape} k={k}: {e}"));
            for (j, d) in el.dual_basis.iter().enumerate() {
                let vals = el.dof_values(d);
                for (i, v) in vals.iter().enumerate() {
                    let want = if i == j { rat(1, 1) } else { rat(0, 1) };
                    assert_eq!(*v, want, "{family} {shape} k={k} dof {i} on dual {j}");
                }
            }
        }
    }
}

/// Zeroing the DOFs of an edge and its endpoints kills both traces on it.
#[test]
fn edge_traces_are_controlled_by_edge_dofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (family, shape, k) in supported_combinations() {
        let frame = LocalFrame::standard(random_cell(&mut rng, shape));
        let el = FiniteElement::new(family, k, &frame).unwrap();
        let cell = frame.local_cell();
        let nv = cell.num_edges();
        for e in 0..nv {
            let on_edge = |a: &Attachment| match *a {
                Attachment::Edge(i) => i == e,
                Attachment::Vertex(v) => v == e || v == (e + 1) % nv,
                Attachment::Cell => false,
            };
            let mut v = VectorField::zero();
            for (i, (d, f)) in el.dofs.dofs.iter().zip(&el.dual_basis).enumerate() {
                if !on_edge(&d.attachment) {
                    v = &v + &f.scale(&rat(i as i64 % 7 - 3, 1 + i as i64 % 3));
                }
            }
            let (a, dir) = (cell.edge_start(e), cell.edge_vector(e));
            assert!(v.dot_const(&dir).restrict_to_segment(a, &dir).is_zero(), "{family} {shape} k={k} edge {e}");
            assert!(curl_vec(&v).restrict_to_segment(a, &dir).is_zero(), "{family} {shape} k={k} edge {e}");
        }
    }
}

#[test]
fn bubble_potentials_give_bubble_curls() {
    for shape in [Shape::Triangle, Shape::Rectangle] {
        let frame = reference_frame(shape);
        let b = quadcurl::spaces::bubble(&frame);
        let d = quadcurl::spaces::shape_degree(shape, &b).unwrap();
        let pb = modified_poincare(&b, &frame, d).unwrap();
        assert_eq!(curl_vec(&pb), b);
    }
}

fn triple_strategy() -> impl Strategy<Value = (Family, Shape, u32)> {
    prop::sample::select(supported_combinations())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_gradient_leg_commutes((family, shape, k) in triple_strategy(), p in common::poly(4)) {
        let frame = reference_frame(shape);
        let t = ElementTriple::new(family, k, &frame).unwrap();
        prop_assert_eq!(interpolate_local(&t.v, &grad(&p)), grad(&t.sigma.interpolate(&p)));
    }

    #[test]
    fn local_curl_leg_commutes((family, shape, k) in triple_strategy(), v in common::field(4)) {
        let frame = reference_frame(shape);
        let t = ElementTriple::new(family, k, &frame).unwrap();
        prop_assert_eq!(curl_vec(&interpolate_local(&t.v, &v)), t.w.interpolate(&curl_vec(&v)));
    }

    #[test]
    fn interpolation_reproduces_the_space((family, shape, k) in triple_strategy(), c in prop::collection::vec(-4i64..4, 40)) {
        let frame = reference_frame(shape);
        let el = FiniteElement::new(family, k, &frame).unwrap();
        let mut v = VectorField::zero();
        for (m, ci) in el.space.vectors().iter().zip(&c) {
            v = &v + &m.scale(&rat(*ci, 1));
        }
        prop_assert_eq!(interpolate_local(&el, &v), v);
    }
}
