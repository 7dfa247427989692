//! Degrees of freedom, dualization and local interpolation for the vector
//! elements and their scalar companions (Lagrange `Sigma^r` and `W^{k-1}`).
//!
//! Edge moments integrate against shifted Legendre polynomials in the edge
//! parameter `s in [0, 1]`, with the unnormalized tangent `b - a`. Tangential
//! moments then equal the arclength moments `int_e u . tau q ds` exactly;
//! curl and scalar edge moments are the arclength moments divided by `|e|`,
//! which keeps every functional rational.

use num_traits::Zero;

use crate::error::Error;
use crate::exact::QMatrix;
use crate::polycore::{
    curl_scalar, curl_vec, grad, integrate_cell, CellGeometry, Point, Polynomial, Rational, Shape,
    Univariate, VectorField,
};
use crate::quadrature;
use crate::spaces::{
    has_bubble, monomials, sigma_space, supported, v_space_for, w_space, Family, LocalFrame,
    SpaceBasis,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DofKind {
    VertexCurl,
    EdgeTangentMoment,
    EdgeCurlMoment,
    InteriorMoment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attachment {
    Vertex(usize),
    Edge(usize),
    Cell,
}

/// Geometric data a functional needs, in local coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Point(Point),
    Segment { start: Point, dir: Point },
    Cell(CellGeometry),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofFunctional {
    pub kind: DofKind,
    pub attachment: Attachment,
    /// Position within the block of DOFs sharing this attachment.
    pub index: usize,
    /// Edge weight `q(s)`, a shifted Legendre polynomial.
    pub weight: Option<Univariate>,
    pub moment_degree: usize,
    pub test_field: Option<VectorField>,
    /// Multiplier relating this functional to the global one.
    pub orientation_sign: i32,
    pub support: Support,
}

impl DofFunctional {
    /// Reversing the edge multiplies the functional by `(-1)^flip_exponent`.
    pub fn flip_exponent(&self) -> u32 {
        match self.kind {
            DofKind::EdgeTangentMoment => self.moment_degree as u32 + 1,
            DofKind::EdgeCurlMoment => self.moment_degree as u32,
            _ => 0,
        }
    }

    /// Copy oriented against an edge traversed with sign `edge_sign`.
    pub fn oriented(&self, edge_sign: i32) -> Self {
        let mut d = self.clone();
        if matches!(self.attachment, Attachment::Edge(_)) && edge_sign < 0 && self.flip_exponent() % 2 == 1 {
            d.orientation_sign = -d.orientation_sign;
        }
        d
    }
}

/// Structural description of a local DOF used to build global numberings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalDof {
    pub attachment: Attachment,
    pub index: usize,
    pub flip_exponent: u32,
}

/// Applies a functional to a polynomial field given in local coordinates.
pub fn apply_dof(d: &DofFunctional, v: &VectorField) -> Rational {
    let raw = match (&d.kind, &d.support) {
        (DofKind::VertexCurl, Support::Point(p)) => curl_vec(v).eval(p),
        (DofKind::EdgeTangentMoment, Support::Segment { start, dir }) => {
            let t = v.dot_const(dir).restrict_to_segment(start, dir);
            t.mul(d.weight.as_ref().expect("edge weight")).integrate_unit()
        }
        (DofKind::EdgeCurlMoment, Support::Segment { start, dir }) => {
            let c = curl_vec(v).restrict_to_segment(start, dir);
            c.mul(d.weight.as_ref().expect("edge weight")).integrate_unit()
        }
        (DofKind::InteriorMoment, Support::Cell(cell)) => {
            integrate_cell(&v.dot(d.test_field.as_ref().expect("test field")), cell)
        }
        _ => unreachable!("functional kind and support disagree"),
    };
    if d.orientation_sign < 0 {
        -raw
    } else {
        raw
    }
}

/// Floating-point evaluation of a functional on a smooth field whose curl is
/// supplied separately. Points passed to the closures are local coordinates.
pub fn apply_dof_numeric(
    d: &DofFunctional,
    u: &dyn Fn([f64; 2]) -> [f64; 2],
    curl: &dyn Fn([f64; 2]) -> f64,
    points: usize,
) -> f64 {
    let f = |r: &Rational| crate::polycore::to_f64(r);
    let raw = match (&d.kind, &d.support) {
        (DofKind::VertexCurl, Support::Point(p)) => curl([f(&p[0]), f(&p[1])]),
        (DofKind::EdgeTangentMoment, Support::Segment { start, dir })
        | (DofKind::EdgeCurlMoment, Support::Segment { start, dir }) => {
            let (a, t) = ([f(&start[0]), f(&start[1])], [f(&dir[0]), f(&dir[1])]);
            let w = d.weight.as_ref().expect("edge weight");
            quadrature::gauss_legendre_01(points)
                .iter()
                .map(|&(s, ws)| {
                    let x = [a[0] + s * t[0], a[1] + s * t[1]];
                    let val = if d.kind == DofKind::EdgeTangentMoment {
                        let uv = u(x);
                        uv[0] * t[0] + uv[1] * t[1]
                    } else {
                        curl(x)
                    };
                    ws * val * w.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + f(c))
                })
                .sum()
        }
        (DofKind::InteriorMoment, Support::Cell(cell)) => {
            let q = d.test_field.as_ref().expect("test field");
            let rule = quadrature::cell_rule(cell, points);
            rule.iter()
                .map(|&(x, w)| {
                    let uv = u(x);
                    let qv = q.eval_f64(x[0], x[1]);
                    w * (uv[0] * qv[0] + uv[1] * qv[1])
                })
                .sum()
        }
        _ => unreachable!("functional kind and support disagree"),
    };
    raw * d.orientation_sign as f64
}

#[derive(Clone, Debug)]
pub struct DofSet {
    pub family: Family,
    pub k: u32,
    pub shape: Shape,
    pub dofs: Vec<DofFunctional>,
}

impl DofSet {
    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    pub fn count(&self, kind: DofKind) -> usize {
        self.dofs.iter().filter(|d| d.kind == kind).count()
    }
}

/// Highest Legendre degree of the tangential edge moments, `r - 1`.
pub fn tangent_moment_degree(family: Family, k: u32) -> u32 {
    family.r(k) - 1
}

/// Number of curl moments per edge, `dim P_{k-3}`.
pub fn curl_moments_per_edge(k: u32) -> usize {
    k.saturating_sub(2) as usize
}

/// Interior test fields (`D` on triangles, `G1 + G2` on rectangles).
pub fn interior_test_fields(family: Family, k: u32, shape: Shape) -> Vec<VectorField> {
    let x = VectorField::position();
    let mono = |a: u32, b: u32| Polynomial::monomial(a, b, Rational::from_integer(1.into()));
    let times_x = |exps: Vec<(u32, u32)>| -> Vec<VectorField> {
        exps.into_iter().map(|(a, b)| x.mul_scalar(&mono(a, b))).collect()
    };
    let homogeneous = |d: u32| -> Vec<(u32, u32)> { (0..=d).map(|b| (d - b, b)).collect() };
    let upto = |shape: Shape, d: i64| -> Vec<(u32, u32)> {
        if d < 0 {
            Vec::new()
        } else {
            monomials(shape, d as u32)
        }
    };
    let k = k as i64;
    match shape {
        Shape::Triangle => match family {
            Family::New => {
                let mut out = Vec::new();
                for (a, b) in upto(Shape::Triangle, k - 5) {
                    out.push(VectorField::new(mono(a, b), Polynomial::zero()));
                    out.push(VectorField::new(Polynomial::zero(), mono(a, b)));
                }
                if k >= 5 {
                    out.extend(times_x(homogeneous((k - 5) as u32)));
                }
                if k >= 4 {
                    out.extend(times_x(homogeneous((k - 4) as u32)));
                }
                out
            }
            Family::Mid => times_x(upto(Shape::Triangle, k - 3)),
            Family::High => times_x(upto(Shape::Triangle, k - 2)),
        },
        Shape::Rectangle => {
            let j = match family {
                Family::New => k - 3,
                Family::Mid => k - 2,
                Family::High => k - 1,
            };
            let mut out = times_x(upto(Shape::Rectangle, j));
            for (a, b) in upto(Shape::Rectangle, k - 3) {
                if (a, b) != (0, 0) {
                    out.push(curl_scalar(&mono(a, b)));
                }
            }
            out
        }
    }
}

fn edge_support(cell: &CellGeometry, e: usize) -> Support {
    Support::Segment { start: cell.edge_start(e).clone(), dir: cell.edge_vector(e) }
}

pub fn build_dofs(family: Family, k: u32, frame: &LocalFrame) -> Result<DofSet, Error> {
    let shape = frame.shape();
    if !supported(shape, k) {
        return Err(Error::Unsupported(format!("{family} family, k = {k} on {shape}")));
    }
    let cell = frame.local_cell();
    let mut dofs = Vec::new();
    for (i, v) in cell.vertices().iter().enumerate() {
        dofs.push(DofFunctional {
            kind: DofKind::VertexCurl,
            attachment: Attachment::Vertex(i),
            index: 0,
            weight: None,
            moment_degree: 0,
            test_field: None,
            orientation_sign: 1,
            support: Support::Point(v.clone()),
        });
    }
    let mt = tangent_moment_degree(family, k) as usize;
    let mc = curl_moments_per_edge(k);
    for e in 0..cell.num_edges() {
        for j in 0..=mt {
            dofs.push(DofFunctional {
                kind: DofKind::EdgeTangentMoment,
                attachment: Attachment::Edge(e),
                index: j,
                weight: Some(Univariate::legendre01(j)),
                moment_degree: j,
                test_field: None,
                orientation_sign: 1,
                support: edge_support(cell, e),
            });
        }
        for j in 0..mc {
            dofs.push(DofFunctional {
                kind: DofKind::EdgeCurlMoment,
                attachment: Attachment::Edge(e),
                index: mt + 1 + j,
                weight: Some(Univariate::legendre01(j)),
                moment_degree: j,
                test_field: None,
                orientation_sign: 1,
                support: edge_support(cell, e),
            });
        }
    }
    for (i, q) in interior_test_fields(family, k, shape).into_iter().enumerate() {
        dofs.push(DofFunctional {
            kind: DofKind::InteriorMoment,
            attachment: Attachment::Cell,
            index: i,
            weight: None,
            moment_degree: 0,
            test_field: Some(q),
            orientation_sign: 1,
            support: Support::Cell(cell.clone()),
        });
    }
    let set = DofSet { family, k, shape, dofs };
    let sigma = sigma_space(family.r(k), frame)?.dim();
    let w = w_space(k, frame)?.dim();
    if set.len() != sigma - 1 + w {
        return Err(Error::Unsupported(format!(
            "{family} family, k = {k} on {shape}: {} dofs for a space of dimension {}",
            set.len(),
            sigma - 1 + w
        )));
    }
    Ok(set)
}

/// Local element: space, DOFs and the biorthogonal dual basis.
#[derive(Clone, Debug)]
pub struct FiniteElement {
    pub family: Family,
    pub k: u32,
    pub frame: LocalFrame,
    pub space: SpaceBasis,
    pub dofs: DofSet,
    pub dual_basis: Vec<VectorField>,
}

impl FiniteElement {
    pub fn new(family: Family, k: u32, frame: &LocalFrame) -> Result<Self, Error> {
        let space = v_space_for(family, k, frame)?;
        let dofs = build_dofs(family, k, frame)?;
        dualize(&space, &dofs)
    }

    pub fn dim(&self) -> usize {
        self.dual_basis.len()
    }

    pub fn shape(&self) -> Shape {
        self.frame.shape()
    }

    pub fn dof_values(&self, v: &VectorField) -> Vec<Rational> {
        self.dofs.dofs.iter().map(|d| apply_dof(d, v)).collect()
    }

    pub fn layout(&self) -> Vec<LocalDof> {
        self.dofs
            .dofs
            .iter()
            .map(|d| LocalDof { attachment: d.attachment, index: d.index, flip_exponent: d.flip_exponent() })
            .collect()
    }

    pub fn vandermonde(&self) -> QMatrix {
        generalized_vandermonde(self.space.vectors(), &self.dofs.dofs)
    }
}

fn generalized_vandermonde(basis: &[VectorField], dofs: &[DofFunctional]) -> QMatrix {
    QMatrix::from_fn(dofs.len(), basis.len(), |i, j| apply_dof(&dofs[i], &basis[j]))
}

fn combine<T: Clone>(basis: &[T], coeffs: &QMatrix, zero: T, axpy: impl Fn(&T, &Rational, &T) -> T) -> Vec<T> {
    (0..coeffs.cols())
        .map(|j| {
            (0..basis.len()).fold(zero.clone(), |acc, l| {
                let c = coeffs.get(l, j);
                if c.is_zero() {
                    acc
                } else {
                    axpy(&acc, c, &basis[l])
                }
            })
        })
        .collect()
}

/// Solves `M C = I` with `M_ij = dof_i(basis_j)`; the dual basis is `basis C`.
pub fn dualize(space: &SpaceBasis, dofs: &DofSet) -> Result<FiniteElement, Error> {
    let label = || format!("{} family, k = {} on {}", dofs.family, dofs.k, dofs.shape);
    if dofs.len() != space.dim() {
        return Err(Error::UnisolvenceFailure(format!("{}: {} dofs, dim {}", label(), dofs.len(), space.dim())));
    }
    let m = generalized_vandermonde(space.vectors(), &dofs.dofs);
    let inv = m.inverse().ok_or_else(|| Error::UnisolvenceFailure(label()))?;
    let dual = combine(space.vectors(), &inv, VectorField::zero(), |acc, c, b| acc + &b.scale(c));
    Ok(FiniteElement {
        family: dofs.family,
        k: dofs.k,
        frame: space.frame.clone(),
        space: space.clone(),
        dofs: dofs.clone(),
        dual_basis: dual,
    })
}

/// `Pi_K u = sum_i dof_i(u) phi_i` for a polynomial field in local coordinates.
pub fn interpolate_local(el: &FiniteElement, u: &VectorField) -> VectorField {
    el.dofs
        .dofs
        .iter()
        .zip(&el.dual_basis)
        .fold(VectorField::zero(), |acc, (d, phi)| {
            let c = apply_dof(d, u);
            if c.is_zero() {
                acc
            } else {
                &acc + &phi.scale(&c)
            }
        })
}

/// DOF values of a smooth field; `curl` must be the analytic curl of `u`.
/// Closures receive local coordinates.
pub fn interpolate_numeric(
    el: &FiniteElement,
    u: &dyn Fn([f64; 2]) -> [f64; 2],
    curl: Option<&dyn Fn([f64; 2]) -> f64>,
    points: usize,
) -> Result<Vec<f64>, Error> {
    let curl = curl.ok_or_else(|| Error::Config("interpolation needs the analytic curl".into()))?;
    Ok(el.dofs.dofs.iter().map(|d| apply_dof_numeric(d, u, curl, points)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    /// Lagrange element for `Sigma^r`, parameterized by `r`.
    Sigma,
    /// Element for `W^{k-1}`, parameterized by `k`.
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarDofKind {
    VertexValue,
    EdgeMoment,
    InteriorMoment,
    CellIntegral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarDof {
    pub kind: ScalarDofKind,
    pub attachment: Attachment,
    pub index: usize,
    pub weight: Option<Univariate>,
    pub moment_degree: usize,
    pub test_function: Option<Polynomial>,
    pub orientation_sign: i32,
    pub support: Support,
}

impl ScalarDof {
    pub fn flip_exponent(&self) -> u32 {
        match self.kind {
            ScalarDofKind::EdgeMoment => self.moment_degree as u32,
            _ => 0,
        }
    }
}

pub fn apply_scalar_dof(d: &ScalarDof, p: &Polynomial) -> Rational {
    let raw = match (&d.kind, &d.support) {
        (ScalarDofKind::VertexValue, Support::Point(x)) => p.eval(x),
        (ScalarDofKind::EdgeMoment, Support::Segment { start, dir }) => p
            .restrict_to_segment(start, dir)
            .mul(d.weight.as_ref().expect("edge weight"))
            .integrate_unit(),
        (ScalarDofKind::InteriorMoment, Support::Cell(cell)) => {
            integrate_cell(&(p * d.test_function.as_ref().expect("test function")), cell)
        }
        (ScalarDofKind::CellIntegral, Support::Cell(cell)) => integrate_cell(p, cell),
        _ => unreachable!("functional kind and support disagree"),
    };
    if d.orientation_sign < 0 {
        -raw
    } else {
        raw
    }
}

#[derive(Clone, Debug)]
pub struct ScalarElement {
    pub kind: ScalarKind,
    pub order: u32,
    pub frame: LocalFrame,
    pub space: SpaceBasis,
    pub dofs: Vec<ScalarDof>,
    pub dual_basis: Vec<Polynomial>,
}

impl ScalarElement {
    pub fn dim(&self) -> usize {
        self.dual_basis.len()
    }

    pub fn dof_values(&self, p: &Polynomial) -> Vec<Rational> {
        self.dofs.iter().map(|d| apply_scalar_dof(d, p)).collect()
    }

    pub fn layout(&self) -> Vec<LocalDof> {
        self.dofs
            .iter()
            .map(|d| LocalDof { attachment: d.attachment, index: d.index, flip_exponent: d.flip_exponent() })
            .collect()
    }

    pub fn interpolate(&self, p: &Polynomial) -> Polynomial {
        self.dofs.iter().zip(&self.dual_basis).fold(Polynomial::zero(), |acc, (d, phi)| {
            let c = apply_scalar_dof(d, p);
            if c.is_zero() {
                acc
            } else {
                &acc + &phi.scale(&c)
            }
        })
    }
}

/// Lagrange DOFs of order `m`: vertex values, `m - 1` edge moments, and
/// interior moments against `P_{m-3}` or `Q_{m-2}`.
fn lagrange_dofs(cell: &CellGeometry, m: u32) -> Vec<ScalarDof> {
    let mut dofs = Vec::new();
    for (i, v) in cell.vertices().iter().enumerate() {
        dofs.push(ScalarDof {
            kind: ScalarDofKind::VertexValue,
            attachment: Attachment::Vertex(i),
            index: 0,
            weight: None,
            moment_degree: 0,
            test_function: None,
            orientation_sign: 1,
            support: Support::Point(v.clone()),
        });
    }
    for e in 0..cell.num_edges() {
        for j in 0..m.saturating_sub(1) as usize {
            dofs.push(ScalarDof {
                kind: ScalarDofKind::EdgeMoment,
                attachment: Attachment::Edge(e),
                index: j,
                weight: Some(Univariate::legendre01(j)),
                moment_degree: j,
                test_function: None,
                orientation_sign: 1,
                support: edge_support(cell, e),
            });
        }
    }
    let interior = match cell.shape() {
        Shape::Triangle if m >= 3 => monomials(Shape::Triangle, m - 3),
        Shape::Rectangle if m >= 2 => monomials(Shape::Rectangle, m - 2),
        _ => Vec::new(),
    };
    for (i, (a, b)) in interior.into_iter().enumerate() {
        dofs.push(ScalarDof {
            kind: ScalarDofKind::InteriorMoment,
            attachment: Attachment::Cell,
            index: i,
            weight: None,
            moment_degree: 0,
            test_function: Some(Polynomial::monomial(a, b, Rational::from_integer(1.into()))),
            orientation_sign: 1,
            support: Support::Cell(cell.clone()),
        });
    }
    dofs
}

pub fn scalar_elements(order: u32, frame: &LocalFrame, kind: ScalarKind) -> Result<ScalarElement, Error> {
    let cell = frame.local_cell();
    let (space, mut dofs) = match kind {
        ScalarKind::Sigma => (sigma_space(order, frame)?, lagrange_dofs(cell, order)),
        ScalarKind::W => (w_space(order, frame)?, lagrange_dofs(cell, order - 1)),
    };
    if kind == ScalarKind::W && has_bubble(frame.shape(), order) {
        let index = dofs.iter().filter(|d| d.attachment == Attachment::Cell).count();
        dofs.push(ScalarDof {
            kind: ScalarDofKind::CellIntegral,
            attachment: Attachment::Cell,
            index,
            weight: None,
            moment_degree: 0,
            test_function: None,
            orientation_sign: 1,
            support: Support::Cell(cell.clone()),
        });
    }
    let label = || format!("{kind:?} element of order {order} on {}", frame.shape());
    if dofs.len() != space.dim() {
        return Err(Error::UnisolvenceFailure(label()));
    }
    let basis = space.scalars();
    let m = QMatrix::from_fn(dofs.len(), basis.len(), |i, j| apply_scalar_dof(&dofs[i], &basis[j]));
    let inv = m.inverse().ok_or_else(|| Error::UnisolvenceFailure(label()))?;
    let dual = combine(basis, &inv, Polynomial::zero(), |acc, c, b| acc + &b.scale(c));
    Ok(ScalarElement { kind, order, frame: frame.clone(), space, dofs, dual_basis: dual })
}

/// Bundle of the three elements forming the local complex.
#[derive(Clone, Debug)]
pub struct ElementTriple {
    pub sigma: ScalarElement,
    pub v: FiniteElement,
    pub w: ScalarElement,
}

impl ElementTriple {
    pub fn new(family: Family, k: u32, frame: &LocalFrame) -> Result<Self, Error> {
        Ok(Self {
            sigma: scalar_elements(family.r(k), frame, ScalarKind::Sigma)?,
            v: FiniteElement::new(family, k, frame)?,
            w: scalar_elements(k, frame, ScalarKind::W)?,
        })
    }
}

/// Gradient of a `Sigma` dual function, for use with `spaces` helpers.
pub fn sigma_gradients(el: &ScalarElement) -> Vec<VectorField> {
    el.dual_basis.iter().map(grad).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{int, rat};

    fn tri() -> LocalFrame {
        LocalFrame::standard(CellGeometry::reference_triangle())
    }

    fn rect() -> LocalFrame {
        LocalFrame::standard(CellGeometry::reference_rectangle())
    }

    #[test]
    fn dof_counts_equal_dimensions() {
        let expect = [
            (Family::New, Shape::Triangle, [6, 12, 19]),
            (Family::Mid, Shape::Triangle, [9, 16, 24]),
            (Family::High, Shape::Triangle, [13, 21, 30]),
        ];
        for (family, _, counts) in expect {
            for (i, &c) in counts.iter().enumerate() {
                assert_eq!(build_dofs(family, i as u32 + 2, &tri()).unwrap().len(), c);
            }
        }
        let expect = [(Family::New, [8, 17]), (Family::Mid, [13, 24]), (Family::High, [20, 33])];
        for (family, counts) in expect {
            for (i, &c) in counts.iter().enumerate() {
                assert_eq!(build_dofs(family, i as u32 + 2, &rect()).unwrap().len(), c);
            }
        }
        assert!(build_dofs(Family::New, 4, &rect()).is_err());
    }

    #[test]
    fn new_triangle_k2_dof_split() {
        let d = build_dofs(Family::New, 2, &tri()).unwrap();
        assert_eq!(d.count(DofKind::VertexCurl), 3);
        assert_eq!(d.count(DofKind::EdgeTangentMoment), 3);
        let d = build_dofs(Family::Mid, 2, &rect()).unwrap();
        assert_eq!(d.count(DofKind::InteriorMoment), 1);
    }

    #[test]
    fn dof_examples() {
        let t = tri();
        let d = build_dofs(Family::High, 2, &t).unwrap();
        assert_eq!(apply_dof(&d.dofs[0], &VectorField::x_perp()), int(2));
        let edge0 = d.dofs.iter().find(|f| f.kind == DofKind::EdgeTangentMoment).unwrap();
        // edge 0 runs (0,0) -> (1,0)
        assert_eq!(apply_dof(edge0, &VectorField::constant(int(1), int(0))), int(1));
        let interior = d.dofs.iter().find(|f| f.kind == DofKind::InteriorMoment).unwrap();
        let bt = crate::spaces::bubble(&t);
        assert_eq!(apply_dof(interior, &grad(&bt)), rat(-1, 60));
    }

    #[test]
    fn dual_basis_is_biorthogonal() {
        let el = FiniteElement::new(Family::New, 2, &tri()).unwrap();
        for (i, d) in el.dofs.dofs.iter().enumerate() {
            for (j, phi) in el.dual_basis.iter().enumerate() {
                assert_eq!(apply_dof(d, phi), int((i == j) as i64));
            }
        }
    }

    #[test]
    fn scalar_element_examples() {
        let s = scalar_elements(1, &tri(), ScalarKind::Sigma).unwrap();
        let lam = CellGeometry::reference_triangle().barycentric().unwrap();
        assert_eq!(s.dual_basis, lam.to_vec());
        assert_eq!(scalar_elements(2, &tri(), ScalarKind::W).unwrap().dim(), 4);
        assert_eq!(scalar_elements(4, &tri(), ScalarKind::W).unwrap().dim(), 10);
        assert_eq!(scalar_elements(2, &rect(), ScalarKind::W).unwrap().dim(), 5);
    }

    #[test]
    fn orientation_flip_parity() {
        let d = build_dofs(Family::High, 3, &tri()).unwrap();
        let tangents: Vec<_> = d.dofs.iter().filter(|f| f.kind == DofKind::EdgeTangentMoment).take(4).collect();
        let signs: Vec<i32> = tangents.iter().map(|f| f.oriented(-1).orientation_sign).collect();
        assert_eq!(signs, vec![-1, 1, -1, 1]);
    }
}

#[cfg(test)]
mod unisolvence {
    use super::*;
    use crate::spaces::supported_combinations;

    #[test]
    fn reference_cells_are_unisolvent() {
        for (family, shape, k) in supported_combinations() {
            let cell = match shape {
                Shape::Triangle => CellGeometry::reference_triangle(),
                Shape::Rectangle => CellGeometry::reference_rectangle(),
            };
            let frame = LocalFrame::standard(cell);
            let t = std::time::Instant::now();
            let el = ElementTriple::new(family, k, &frame);
            assert!(el.is_ok(), "{family} {shape} {k}: {:?}", el.err());
            eprintln!("{family} {shape} k={k}: {:?}", t.elapsed());
        }
    }
}

