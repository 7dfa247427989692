use quadcurl::analysis::{divergence_consistency, exact_fields, load, rate, solve_level, RunConfig};
use quadcurl::derham_check::interpolation_error;
use quadcurl::mesh::uniform_mesh;
use quadcurl::polycore::{integrate_cell, Polynomial, Rational, Shape};
use quadcurl::solver::{apply_bc, assemble, solve, Discretization, Form, SolverKind};
use quadcurl::spaces::Family;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn meshes_satisfy_euler_and_boundary_counts() {
    for shape in [Shape::Triangle, Shape::Rectangle] {
        for n in 1..=6 {
            let m = uniform_mesh(shape, n).unwrap();
            let euler = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_cells() as i64;
            assert_eq!(euler, 1, "{shape} n={n}");
            assert_eq!(m.boundary_edge.iter().filter(|b| **b).count(), 4 * n);
            let mut incidence = vec![Vec::new(); m.num_edges()];
            for c in 0..m.num_cells() {
                for &(e, s) in &m.cell_edges[c] {
                    incidence[e].push(s);
                }
            }
            for (e, signs) in incidence.iter().enumerate() {
                if m.boundary_edge[e] {
                    assert_eq!(signs.len(), 1);
                } else {
                    assert_eq!(signs.len(), 2);
                    assert_eq!(signs[0], -signs[1], "interior edge {e} must be seen with opposite signs");
                }
            }
            let area: Rational = (0..m.num_cells()).map(|c| integrate_cell(&Polynomial::one(), &m.cell_geometry(c))).sum();
            assert_eq!(area, Rational::from_integer(1.into()));
            assert!(m.num_classes() <= if shape == Shape::Triangle { 2 } else { 1 });
        }
    }
}

/// Five-point central difference; the three-point stencil's `h^2` term
/// alone is about 1e-2 here since `|f|` reaches 4e4.
fn central(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

#[test]
fn load_is_divergence_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-4;
    for _ in 0..50 {
        let (x, y): (f64, f64) = (rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98));
        let d = central(&|s| load(s, y)[0], x, h) + central(&|s| load(x, s)[1], y, h);
        assert!(d.abs() <= 1e-4, "div f = {d} at ({x}, {y})");
    }
}

/// Differences `curl^4 u + u` from the second curl-curl by nested central
/// differences and compares with the analytic load.
#[test]
fn load_matches_finite_difference_oracle() {
    let h = 1e-3;
    let cc = |x: f64, y: f64| exact_fields(x, y).curlcurl;
    let curl_of = |f: &dyn Fn(f64, f64) -> [f64; 2], x: f64, y: f64| {
        (f(x + h, y)[1] - f(x - h, y)[1]) / (2.0 * h) - (f(x, y + h)[0] - f(x, y - h)[0]) / (2.0 * h)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (x, y): (f64, f64) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
        let c = |x: f64, y: f64| curl_of(&cc, x, y);
        let quad = [(c(x, y + h) - c(x, y - h)) / (2.0 * h), -(c(x + h, y) - c(x - h, y)) / (2.0 * h)];
        let e = exact_fields(x, y);
        let scale = e.f[0].abs().max(e.f[1].abs()).max(1.0);
        for i in 0..2 {
            let fd = quad[i] + e.u[i];
            assert!((fd - e.f[i]).abs() <= 1e-4 * scale, "component {i}: {fd} vs {}", e.f[i]);
        }
    }
}

#[test]
fn exact_solution_satisfies_boundary_conditions() {
    for i in 0..=20 {
        let t = i as f64 / 20.0;
        for (p, n) in [([t, 0.0], [0.0, -1.0]), ([t, 1.0], [0.0, 1.0]), ([0.0, t], [-1.0, 0.0]), ([1.0, t], [1.0, 0.0])] {
            let e = exact_fields(p[0], p[1]);
            assert!((e.u[0] * n[1] - e.u[1] * n[0]).abs() < 1e-13);
            assert!(e.curl.abs() < 1e-12);
        }
    }
    let h = 1e-5;
    for &(x, y) in &[(0.2, 0.3), (0.61, 0.47), (0.9, 0.15)] {
        let d = (exact_fields(x + h, y).u[0] - exact_fields(x - h, y).u[0]) / (2.0 * h)
            + (exact_fields(x, y + h).u[1] - exact_fields(x, y - h).u[1]) / (2.0 * h);
        assert!(d.abs() < 1e-7);
    }
}

#[test]
fn assembled_system_is_symmetric_and_spd_after_constraints() {
    for (family, shape) in [(Family::New, Shape::Triangle), (Family::High, Shape::Rectangle)] {
        let disc = Discretization::new(uniform_mesh(shape, 3).unwrap(), family, 2, None).unwrap();
        let sys = assemble(&disc, &load, Form::QuadCurl);
        let entries = sys.lower_entries();
        let maxabs = entries.iter().map(|e| e.2.abs()).fold(0.0, f64::max);
        assert!(maxabs > 0.0);
        let constrained = apply_bc(&sys, &disc.dof_map);
        let out = solve(&constrained, SolverKind::Direct, 1e-10).expect("Cholesky succeeds on an SPD system");
        assert!(out.relative_residual <= 1e-10);
        let cg = solve(&constrained, SolverKind::Cg, 1e-10).unwrap();
        let diff = out.x.iter().zip(&cg.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let norm = out.x.iter().map(|a| a.abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-6 * norm, "{diff}");
    }
}

#[test]
fn solve_is_deterministic_and_divergence_consistent() {
    let cfg = RunConfig::new(Family::Mid, Shape::Rectangle, 2, vec![6]);
    let a = solve_level(&cfg, 6).unwrap();
    let b = solve_level(&cfg, 6).unwrap();
    assert_eq!(a.x, b.x);
    assert!(a.residual <= 1e-10);
    let d = divergence_consistency(&a.disc, &a.x).unwrap();
    assert!(d <= 1e-8, "{d}");
}

#[test]
fn interpolation_error_decays_at_least_at_order_r_minus_one() {
    let u = |p: [f64; 2]| exact_fields(p[0], p[1]).u;
    let curl = |p: [f64; 2]| exact_fields(p[0], p[1]).curl;
    for (family, shape, k) in [
        (Family::New, Shape::Triangle, 2),
        (Family::Mid, Shape::Rectangle, 2),
        (Family::High, Shape::Triangle, 3),
    ] {
        let errs: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| interpolation_error(&uniform_mesh(shape, n).unwrap(), family, k, &u, &curl, 8).unwrap())
            .collect();
        let r = family.r(k) as f64;
        for w in errs.windows(2) {
            let observed = rate(w[0], w[1]);
            assert!(observed >= r - 1.0 - 0.2, "{family} {shape} k={k}: rate {observed}, errors {errs:?}");
        }
    }
}
