//! Local shape-function spaces: the scalar spaces `Sigma^r` and `W^{k-1}`
//! and the vector space `V^{r-1,k} = grad Sigma^r + p W^{k-1}` (or the
//! modified-Poincaré variant), all as explicit spanning sets in a local frame.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::exact::QMatrix;
use crate::polycore::{
    curl_vec, grad, int, poincare, CellGeometry, Point, Polynomial, Rational, Shape, VectorField,
};

/// The three element families, distinguished by `r` relative to `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `r = k - 1`
    New,
    /// `r = k`
    Mid,
    /// `r = k + 1`
    High,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::New, Family::Mid, Family::High];

    pub fn r(self, k: u32) -> u32 {
        match self {
            Family::New => k - 1,
            Family::Mid => k,
            Family::High => k + 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::New => "new",
            Family::Mid => "mid",
            Family::High => "high",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "new" => Some(Family::New),
            "mid" => Some(Family::Mid),
            "high" => Some(Family::High),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Orders with certified DOF sets.
pub fn supported(shape: Shape, k: u32) -> bool {
    match shape {
        Shape::Triangle => (2..=4).contains(&k),
        Shape::Rectangle => (2..=3).contains(&k),
    }
}

pub fn supported_combinations() -> Vec<(Family, Shape, u32)> {
    let mut out = Vec::new();
    for shape in [Shape::Triangle, Shape::Rectangle] {
        for family in Family::ALL {
            for k in 2..=4 {
                if supported(shape, k) {
                    out.push((family, shape, k));
                }
            }
        }
    }
    out
}

/// A cell together with the base point of the Poincaré operator. All spaces
/// are expressed in coordinates relative to `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalFrame {
    cell: CellGeometry,
    origin: Point,
    local: CellGeometry,
}

impl LocalFrame {
    pub fn with_origin(cell: CellGeometry, origin: Point) -> Self {
        let neg = [-origin[0].clone(), -origin[1].clone()];
        let local = cell.translate(&neg);
        Self { cell, origin, local }
    }

    /// Global origin on the two reference cells, barycenter otherwise.
    pub fn standard(cell: CellGeometry) -> Self {
        let reference = cell == CellGeometry::reference_triangle()
            || cell == CellGeometry::reference_rectangle();
        let origin = if reference {
            [Rational::zero(), Rational::zero()]
        } else {
            cell.barycenter()
        };
        Self::with_origin(cell, origin)
    }

    pub fn cell(&self) -> &CellGeometry {
        &self.cell
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    /// The cell expressed in local coordinates.
    pub fn local_cell(&self) -> &CellGeometry {
        &self.local
    }

    pub fn shape(&self) -> Shape {
        self.cell.shape()
    }

    /// Re-expresses a polynomial given in global coordinates locally.
    pub fn localize(&self, p: &Polynomial) -> Polynomial {
        p.translate(&self.origin)
    }

    pub fn localize_field(&self, v: &VectorField) -> VectorField {
        v.translate(&self.origin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Sigma,
    W,
    V,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Members {
    Scalar(Vec<Polynomial>),
    Vector(Vec<VectorField>),
}

#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub kind: SpaceKind,
    pub r: Option<u32>,
    pub k: Option<u32>,
    pub members: Members,
    pub frame: LocalFrame,
    /// Leading members of a `V` basis that are gradients.
    pub gradient_count: usize,
    /// Whether the `V` basis uses the modified Poincaré operator.
    pub modified: bool,
}

impl SpaceBasis {
    pub fn dim(&self) -> usize {
        match &self.members {
            Members::Scalar(m) => m.len(),
            Members::Vector(m) => m.len(),
        }
    }

    pub fn scalars(&self) -> &[Polynomial] {
        match &self.members {
            Members::Scalar(m) => m,
            Members::Vector(_) => &[],
        }
    }

    pub fn vectors(&self) -> &[VectorField] {
        match &self.members {
            Members::Vector(m) => m,
            Members::Scalar(_) => &[],
        }
    }

    pub fn shape(&self) -> Shape {
        self.frame.shape()
    }

    /// Rank of the coefficient matrix of the members.
    pub fn rank(&self) -> usize {
        match &self.members {
            Members::Scalar(m) => scalar_coefficients(m).rank(),
            Members::Vector(m) => vector_coefficients(m).rank(),
        }
    }
}

/// Monomial exponents of `P_r` (triangle) or `Q_r` (rectangle), by degree.
pub fn monomials(shape: Shape, r: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    match shape {
        Shape::Triangle => {
            for d in 0..=r {
                for b in 0..=d {
                    out.push((d - b, b));
                }
            }
        }
        Shape::Rectangle => {
            for d in 0..=r {
                for b in 0..=d {
                    out.push((d, b));
                }
                for a in 0..d {
                    out.push((a, d));
                }
            }
        }
    }
    out
}

fn monomial_basis(shape: Shape, r: u32) -> Vec<Polynomial> {
    monomials(shape, r)
        .into_iter()
        .map(|(a, b)| Polynomial::monomial(a, b, Rational::one()))
        .collect()
}

/// Degree measured the way the cell's space family measures it.
pub fn shape_degree(shape: Shape, p: &Polynomial) -> Option<u32> {
    match shape {
        Shape::Triangle => p.degree(),
        Shape::Rectangle => p.max_partial_degree(),
    }
}

pub fn sigma_space(r: u32, frame: &LocalFrame) -> Result<SpaceBasis, Error> {
    if r < 1 {
        return Err(Error::Unsupported(format!("Sigma^{r} needs r >= 1")));
    }
    Ok(SpaceBasis {
        kind: SpaceKind::Sigma,
        r: Some(r),
        k: None,
        members: Members::Scalar(monomial_basis(frame.shape(), r)),
        frame: frame.clone(),
        gradient_count: 0,
        modified: false,
    })
}

/// Whether `W^{k-1}` carries the interior bubble.
pub fn has_bubble(shape: Shape, k: u32) -> bool {
    match shape {
        Shape::Triangle => k == 2 || k == 3,
        Shape::Rectangle => k == 2,
    }
}

/// `lambda_1 lambda_2 lambda_3` on triangles,
/// `(x - xl)(x - xr)(y - yd)(y - yu) / (hx^2 hy^2)` on rectangles.
pub fn bubble(frame: &LocalFrame) -> Polynomial {
    let cell = frame.local_cell();
    match cell.shape() {
        Shape::Triangle => {
            let [l1, l2, l3] = cell.barycentric().expect("triangle");
            &(&l1 * &l2) * &l3
        }
        Shape::Rectangle => {
            let [xl, xr, yd, yu] = cell.bounds().expect("rectangle");
            let hx = &xr - &xl;
            let hy = &yu - &yd;
            let one = Rational::one();
            let z = Rational::zero();
            let fx = &Polynomial::affine(-xl, one.clone(), z.clone())
                * &Polynomial::affine(-xr, one.clone(), z.clone());
            let fy = &Polynomial::affine(-yd, z.clone(), one.clone())
                * &Polynomial::affine(-yu, z, one);
            (&fx * &fy).scale(&(&hx * &hx * &hy * &hy).recip())
        }
    }
}

pub fn w_space(k: u32, frame: &LocalFrame) -> Result<SpaceBasis, Error> {
    if k < 2 {
        return Err(Error::Unsupported(format!("W^{{k-1}} needs k >= 2, got {k}")));
    }
    let mut members = monomial_basis(frame.shape(), k - 1);
    if has_bubble(frame.shape(), k) {
        members.push(bubble(frame));
    }
    Ok(SpaceBasis {
        kind: SpaceKind::W,
        r: None,
        k: Some(k),
        members: Members::Scalar(members),
        frame: frame.clone(),
        gradient_count: 0,
        modified: false,
    })
}

/// Nodes of the `P_m` (triangle) or `Q_m` (rectangle) Lagrange element on
/// the local cell: vertices, equispaced edge nodes, lattice interior nodes.
pub fn lagrange_nodes(cell: &CellGeometry, m: u32) -> Vec<Point> {
    let v = cell.vertices();
    let mi = int(m as i64);
    let mut out = Vec::new();
    match cell.shape() {
        Shape::Triangle => {
            for i in 0..=m {
                for j in 0..=(m - i) {
                    let l = m - i - j;
                    let (wi, wj, wl) = (int(i as i64), int(j as i64), int(l as i64));
                    let x = (&wi * &v[0][0] + &wj * &v[1][0] + &wl * &v[2][0]) / &mi;
                    let y = (&wi * &v[0][1] + &wj * &v[1][1] + &wl * &v[2][1]) / &mi;
                    out.push([x, y]);
                }
            }
        }
        Shape::Rectangle => {
            let [xl, xr, yd, yu] = cell.bounds().expect("rectangle");
            for i in 0..=m {
                for j in 0..=m {
                    let x = &xl + (&xr - &xl) * int(i as i64) / &mi;
                    let y = &yd + (&yu - &yd) * int(j as i64) / &mi;
                    out.push([x, y]);
                }
            }
        }
    }
    out
}

/// Parameter `s` with `p = a + s (b - a)` if `p` lies on edge `e`.
fn edge_parameter(cell: &CellGeometry, e: usize, p: &Point) -> Option<Rational> {
    let a = cell.edge_start(e);
    let d = cell.edge_vector(e);
    let w = [&p[0] - &a[0], &p[1] - &a[1]];
    let cross = &w[0] * &d[1] - &w[1] * &d[0];
    if !cross.is_zero() {
        return None;
    }
    let s = (&w[0] * &d[0] + &w[1] * &d[1]) / cell.edge_length_sq(e);
    (s >= Rational::zero() && s <= Rational::one()).then_some(s)
}

/// Interpolant in `P_m`/`Q_m` of the given nodal values.
fn lagrange_interpolant(cell: &CellGeometry, m: u32, nodes: &[Point], values: &[Rational]) -> Polynomial {
    let exps = monomials(cell.shape(), m);
    let vander = QMatrix::from_fn(nodes.len(), exps.len(), |i, j| {
        Polynomial::monomial(exps[j].0, exps[j].1, Rational::one()).eval(&nodes[i])
    });
    let rhs = QMatrix::from_fn(values.len(), 1, |i, _| values[i].clone());
    let c = vander.solve(&rhs).expect("Lagrange nodes are unisolvent");
    Polynomial::from_terms(exps.iter().enumerate().map(|(j, &e)| (e, c.get(j, 0).clone())))
}

/// The gradient correction `phi_u` with `(p u - grad phi_u) . t` constant on
/// every edge. `phi_u` lies in `P_{k+1}`/`Q_{k+1}`, vanishes at the vertices
/// and at the interior Lagrange nodes, and matches the integrated zero-mean
/// tangential trace at the edge nodes.
pub fn poincare_correction(u: &Polynomial, frame: &LocalFrame, k: u32) -> Result<Polynomial, Error> {
    let cell = frame.local_cell();
    if let Some(d) = shape_degree(cell.shape(), u) {
        if d > k {
            return Err(Error::Unsupported(format!("degree {d} exceeds k = {k}")));
        }
    }
    let pu = poincare(u);
    let traces: Vec<_> = (0..cell.num_edges())
        .map(|e| {
            let g = pu
                .dot_const(&cell.edge_vector(e))
                .restrict_to_segment(cell.edge_start(e), &cell.edge_vector(e));
            let mean = g.integrate_unit();
            let zero_mean = g.add(&crate::polycore::Univariate::new(vec![-mean]));
            zero_mean.integral()
        })
        .collect();
    let nodes = lagrange_nodes(cell, k + 1);
    let values: Vec<Rational> = nodes
        .iter()
        .map(|p| {
            (0..cell.num_edges())
                .find_map(|e| edge_parameter(cell, e, p).map(|s| traces[e].eval(&s)))
                .unwrap_or_else(Rational::zero)
        })
        .collect();
    Ok(lagrange_interpolant(cell, k + 1, &nodes, &values))
}

/// `p~ u = p u - grad phi_u`.
pub fn modified_poincare(u: &Polynomial, frame: &LocalFrame, k: u32) -> Result<VectorField, Error> {
    let phi = poincare_correction(u, frame, k)?;
    Ok(&poincare(u) - &grad(&phi))
}

/// Whether `V^{r-1,k}` is built with the modified operator.
pub fn uses_modified(r: u32, k: u32) -> bool {
    (r == k && (k == 2 || k == 3)) || r + 1 == k
}

pub fn v_space(r: u32, k: u32, frame: &LocalFrame) -> Result<SpaceBasis, Error> {
    if k < 2 || !(r + 1 == k || r == k || r == k + 1) {
        return Err(Error::Unsupported(format!("(r, k) = ({r}, {k})")));
    }
    let sigma = sigma_space(r, frame)?;
    let w = w_space(k, frame)?;
    let modified = uses_modified(r, k);
    let shape = frame.shape();
    let mut members: Vec<VectorField> = sigma
        .scalars()
        .iter()
        .filter(|p| p.degree() != Some(0))
        .map(grad)
        .collect();
    let gradient_count = members.len();
    for m in w.scalars() {
        if modified {
            let d = shape_degree(shape, m).unwrap_or(0);
            members.push(modified_poincare(m, frame, d)?);
        } else {
            members.push(poincare(m));
        }
    }
    let basis = SpaceBasis {
        kind: SpaceKind::V,
        r: Some(r),
        k: Some(k),
        members: Members::Vector(members),
        frame: frame.clone(),
        gradient_count,
        modified,
    };
    let expected = sigma.dim() - 1 + w.dim();
    if basis.rank() != expected {
        return Err(Error::Unsupported(format!(
            "V^{{{},{k}}} on {shape}: spanning set is not a direct sum",
            r - 1
        )));
    }
    Ok(basis)
}

pub fn v_space_for(family: Family, k: u32, frame: &LocalFrame) -> Result<SpaceBasis, Error> {
    v_space(family.r(k), k, frame)
}

/// Columns are members, rows are monomials.
pub fn scalar_coefficients(members: &[Polynomial]) -> QMatrix {
    let mut keys: Vec<(u32, u32)> = members.iter().flat_map(|p| p.terms().map(|(k, _)| *k)).collect();
    keys.sort();
    keys.dedup();
    QMatrix::from_fn(keys.len(), members.len(), |i, j| members[j].coeff(keys[i].0, keys[i].1))
}

/// Columns are members, rows are (component, monomial) pairs.
pub fn vector_coefficients(members: &[VectorField]) -> QMatrix {
    let mut keys: Vec<(u8, u32, u32)> = members
        .iter()
        .flat_map(|v| {
            v.c1.terms()
                .map(|(&(a, b), _)| (0u8, a, b))
                .chain(v.c2.terms().map(|(&(a, b), _)| (1u8, a, b)))
        })
        .collect();
    keys.sort();
    keys.dedup();
    QMatrix::from_fn(keys.len(), members.len(), |i, j| {
        let (c, a, b) = keys[i];
        if c == 0 {
            members[j].c1.coeff(a, b)
        } else {
            members[j].c2.coeff(a, b)
        }
    })
}

/// Whether every target lies in the span of `basis`.
pub fn vector_span_contains(basis: &[VectorField], targets: &[VectorField]) -> bool {
    let all: Vec<VectorField> = basis.iter().chain(targets).cloned().collect();
    vector_coefficients(&all).rank() == vector_coefficients(basis).rank()
}

pub fn scalar_span_contains(basis: &[Polynomial], targets: &[Polynomial]) -> bool {
    let all: Vec<Polynomial> = basis.iter().chain(targets).cloned().collect();
    scalar_coefficients(&all).rank() == scalar_coefficients(basis).rank()
}

/// Curls of a `V` basis, in order.
pub fn curls(v: &SpaceBasis) -> Vec<Polynomial> {
    v.vectors().iter().map(curl_vec).collect()
}
