//! Gauss rules: tensor Gauss-Legendre on rectangles and a collapsed
//! (Duffy) Gauss-Legendre product rule on triangles.

use gauss_quad::GaussLegendre;

use crate::polycore::{to_f64, CellGeometry, Shape};

/// `n`-point Gauss-Legendre nodes and weights on `[0, 1]`; exact to degree `2n - 1`.
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let rule = GaussLegendre::new(n.try_into().expect("n >= 1"));
    let mut pts: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

/// Points and weights on a cell with floating-point vertices. With `n` points
/// per direction the rule is exact for per-variable degree `2n - 1` on
/// rectangles and total degree `2n - 2` on triangles.
pub fn rule_f64(shape: Shape, vertices: &[[f64; 2]], n: usize) -> Vec<([f64; 2], f64)> {
    let g = gauss_legendre_01(n);
    let mut out = Vec::with_capacity(g.len() * g.len());
    match shape {
        Shape::Rectangle => {
            let (x0, y0) = (vertices[0][0], vertices[0][1]);
            let (hx, hy) = (vertices[2][0] - x0, vertices[2][1] - y0);
            for &(s, ws) in &g {
                for &(t, wt) in &g {
                    out.push(([x0 + s * hx, y0 + t * hy], ws * wt * hx * hy));
                }
            }
        }
        Shape::Triangle => {
            let [a, b, c] = [vertices[0], vertices[1], vertices[2]];
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - a[0], c[1] - a[1]];
            let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
            for &(u, wu) in &g {
                for &(v, wv) in &g {
                    let (xi, eta) = (u, (1.0 - u) * v);
                    let p = [a[0] + xi * e1[0] + eta * e2[0], a[1] + xi * e1[1] + eta * e2[1]];
                    out.push((p, wu * wv * (1.0 - u) * jac));
                }
            }
        }
    }
    out
}

pub fn cell_rule(cell: &CellGeometry, n: usize) -> Vec<([f64; 2], f64)> {
    let v: Vec<[f64; 2]> = cell.vertices().iter().map(|p| [to_f64(&p[0]), to_f64(&p[1])]).collect();
    rule_f64(cell.shape(), &v, n)
}

/// Smallest `n` integrating polynomials of the given degree exactly.
pub fn points_for_degree(shape: Shape, degree: u32) -> usize {
    match shape {
        Shape::Rectangle => (degree as usize + 2) / 2,
        Shape::Triangle => (degree as usize + 3) / 2,
    }
    .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{integrate_cell, ipoint, Polynomial};

    #[test]
    fn exact_on_monomials() {
        let tri = CellGeometry::triangle([ipoint(0, 0), ipoint(2, 1), ipoint(1, 3)]).unwrap();
        let rect = CellGeometry::reference_rectangle();
        for (cell, deg) in [(&tri, 8u32), (&rect, 9u32)] {
            let n = points_for_degree(cell.shape(), deg);
            let rule = cell_rule(cell, n);
            for a in 0..=deg {
                for b in 0..=deg {
                    if cell.shape() == Shape::Triangle && a + b > deg {
                        continue;
                    }
                    let p = Polynomial::monomial(a, b, crate::polycore::int(1));
                    let exact = to_f64(&integrate_cell(&p, cell));
                    let q: f64 = rule.iter().map(|(x, w)| w * p.eval_f64(x[0], x[1])).sum();
                    assert!((q - exact).abs() <= 1e-11 * exact.abs().max(1.0), "{a} {b}: {q} vs {exact}");
                }
            }
        }
    }
}
