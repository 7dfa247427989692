//! Global numbering, assembly of `a(u, v) = (curl curl u, curl curl v) + (u, v)`,
//! essential boundary conditions and the sparse symmetric solve.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::elements::{build_dofs, Attachment, FiniteElement, LocalDof};
use crate::error::Error;
use crate::mesh::Mesh;
use crate::polycore::{curl_scalar, curl_vec, to_f64, Polynomial, Shape, VectorField};
use crate::quadrature::{points_for_degree, rule_f64};
use crate::spaces::{shape_degree, Family, LocalFrame};

/// Block layout of global DOFs: all vertex blocks, then edges, then cells.
#[derive(Clone, Debug)]
pub struct GlobalDofMap {
    pub per_vertex: usize,
    pub per_edge: usize,
    pub per_cell: usize,
    pub total: usize,
    /// Global index and orientation sign of every local DOF of every cell.
    pub cell_dofs: Vec<Vec<(usize, i8)>>,
    pub boundary: Vec<bool>,
}

impl GlobalDofMap {
    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }

    pub fn num_free(&self) -> usize {
        self.total - self.num_boundary()
    }
}

pub fn build_dof_map_from_layout(mesh: &Mesh, layout: &[LocalDof]) -> GlobalDofMap {
    let count = |f: &dyn Fn(&Attachment) -> bool| layout.iter().filter(|d| f(&d.attachment)).count();
    let per_vertex = count(&|a| *a == Attachment::Vertex(0));
    let per_edge = count(&|a| *a == Attachment::Edge(0));
    let per_cell = count(&|a| *a == Attachment::Cell);
    let (nv, ne, nc) = (mesh.num_vertices(), mesh.num_edges(), mesh.num_cells());
    let edge_base = nv * per_vertex;
    let cell_base = edge_base + ne * per_edge;
    let total = cell_base + nc * per_cell;
    let mut boundary = vec![false; total];
    for v in 0..nv {
        if mesh.boundary_vertex[v] {
            boundary[v * per_vertex..(v + 1) * per_vertex].fill(true);
        }
    }
    for e in 0..ne {
        if mesh.boundary_edge[e] {
            boundary[edge_base + e * per_edge..edge_base + (e + 1) * per_edge].fill(true);
        }
    }
    let cell_dofs = (0..nc)
        .map(|c| {
            layout
                .iter()
                .map(|d| match d.attachment {
                    Attachment::Vertex(i) => (mesh.cells[c][i] * per_vertex + d.index, 1),
                    Attachment::Edge(e) => {
                        let (g, s) = mesh.cell_edges[c][e];
                        let sign = if s < 0 && d.flip_exponent % 2 == 1 { -1 } else { 1 };
                        (edge_base + g * per_edge + d.index, sign)
                    }
                    Attachment::Cell => (cell_base + c * per_cell + d.index, 1),
                })
                .collect()
        })
        .collect();
    GlobalDofMap { per_vertex, per_edge, per_cell, total, cell_dofs, boundary }
}

/// Numbering of the vector space `V_h` for a family and order.
pub fn build_dof_map(mesh: &Mesh, family: Family, k: u32) -> Result<GlobalDofMap, Error> {
    let rep = mesh.class_representatives()[0];
    let frame = LocalFrame::standard(mesh.cell_geometry(rep));
    let dofs = build_dofs(family, k, &frame)?;
    let layout: Vec<LocalDof> = dofs
        .dofs
        .iter()
        .map(|d| LocalDof { attachment: d.attachment, index: d.index, flip_exponent: d.flip_exponent() })
        .collect();
    Ok(build_dof_map_from_layout(mesh, &layout))
}

/// Polynomial with `f64` coefficients for fast evaluation.
#[derive(Clone, Debug, Default)]
pub struct FloatPoly {
    terms: Vec<(i32, i32, f64)>,
}

impl FloatPoly {
    pub fn from_exact(p: &Polynomial) -> Self {
        Self { terms: p.terms().map(|(&(a, b), c)| (a as i32, b as i32, to_f64(c))).collect() }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(a, b, c)| c * x.powi(a) * y.powi(b)).sum()
    }
}

/// Floating-point copies of a dual-basis function and its derivatives.
#[derive(Clone, Debug)]
pub struct FloatShape {
    pub u: [FloatPoly; 2],
    pub curl: FloatPoly,
    pub curlcurl: [FloatPoly; 2],
}

impl FloatShape {
    pub fn new(v: &VectorField) -> Self {
        let c = curl_vec(v);
        let cc = curl_scalar(&c);
        Self {
            u: [FloatPoly::from_exact(&v.c1), FloatPoly::from_exact(&v.c2)],
            curl: FloatPoly::from_exact(&c),
            curlcurl: [FloatPoly::from_exact(&cc.c1), FloatPoly::from_exact(&cc.c2)],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> ShapeValues {
        ShapeValues {
            u: [self.u[0].eval(x, y), self.u[1].eval(x, y)],
            curl: self.curl.eval(x, y),
            curlcurl: [self.curlcurl[0].eval(x, y), self.curlcurl[1].eval(x, y)],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShapeValues {
    pub u: [f64; 2],
    pub curl: f64,
    pub curlcurl: [f64; 2],
}

/// Per-congruence-class data: the exact element, its tabulation at the
/// quadrature points and the element matrices.
#[derive(Clone, Debug)]
pub struct ClassTables {
    pub element: FiniteElement,
    pub shapes: Vec<FloatShape>,
    /// Quadrature points relative to the cell's frame origin.
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// `values[q * n + i]`.
    pub values: Vec<ShapeValues>,
    /// Row-major `n x n` blocks.
    pub stiffness: Vec<f64>,
    pub mass: Vec<f64>,
}

impl ClassTables {
    pub fn dim(&self) -> usize {
        self.shapes.len()
    }

    pub fn tabulate(&self, x: f64, y: f64) -> Vec<ShapeValues> {
        self.shapes.iter().map(|s| s.eval(x, y)).collect()
    }
}

/// Degree of the stiffness integrand, measured per shape.
pub fn stiffness_degree(el: &FiniteElement) -> u32 {
    let shape = el.shape();
    let deg = |p: &Polynomial| shape_degree(shape, p).unwrap_or(0);
    let mut d = 0;
    for v in &el.dual_basis {
        let cc = curl_scalar(&curl_vec(v));
        d = d.max(deg(&v.c1)).max(deg(&v.c2)).max(deg(&cc.c1)).max(deg(&cc.c2));
    }
    2 * d
}

/// Minimum load-rule degree used for the smooth right-hand side.
pub const LOAD_DEGREE: u32 = 10;

/// Everything needed to assemble and post-process on one mesh.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub family: Family,
    pub k: u32,
    pub quad_points: usize,
    pub classes: Vec<ClassTables>,
    pub dof_map: GlobalDofMap,
    /// Frame origin of every cell.
    pub origins: Vec<[f64; 2]>,
}

impl Discretization {
    /// `quad_points` is the number of Gauss points per direction; `None`
    /// picks the smallest rule that is exact for the stiffness integrand and
    /// of degree at least [`LOAD_DEGREE`].
    pub fn new(mesh: Mesh, family: Family, k: u32, quad_points: Option<usize>) -> Result<Self, Error> {
        let reps = mesh.class_representatives();
        let elements: Vec<(FiniteElement, LocalFrame)> = reps
            .iter()
            .map(|&c| {
                let frame = LocalFrame::standard(mesh.cell_geometry(c));
                FiniteElement::new(family, k, &frame).map(|el| (el, frame))
            })
            .collect::<Result<_, _>>()?;
        let shape = mesh.shape;
        let needed = elements.iter().map(|(el, _)| points_for_degree(shape, stiffness_degree(el))).max().unwrap_or(1);
        let quad = match quad_points {
            Some(q) if q < needed => {
                return Err(Error::Config(format!(
                    "{q} quadrature points per direction cannot integrate the stiffness integrand; need at least {needed}"
                )))
            }
            Some(q) => q,
            None => needed.max(points_for_degree(shape, LOAD_DEGREE)),
        };
        let classes: Vec<ClassTables> = elements.into_iter().map(|(el, _)| tabulate_class(el, shape, quad)).collect();
        let dof_map = build_dof_map_from_layout(&mesh, &reps_layout(&classes));
        let origins = (0..mesh.num_cells()).map(|c| mesh.barycenter_f64(c)).collect();
        Ok(Self { mesh, family, k, quad_points: quad, classes, dof_map, origins })
    }

    pub fn class_of(&self, c: usize) -> &ClassTables {
        &self.classes[self.mesh.cell_class[c]]
    }

    /// Values of `u_h` (coefficients `x`) at the cell's quadrature points.
    pub fn cell_solution(&self, c: usize, x: &[f64]) -> Vec<ShapeValues> {
        let t = self.class_of(c);
        let n = t.dim();
        let coef: Vec<f64> = self.dof_map.cell_dofs[c].iter().map(|&(g, s)| s as f64 * x[g]).collect();
        (0..t.points.len())
            .map(|q| combine_values(&t.values[q * n..(q + 1) * n], &coef))
            .collect()
    }

    /// Values of `u_h` at an arbitrary local point of cell `c`.
    pub fn eval_local(&self, c: usize, x: &[f64], p: [f64; 2]) -> ShapeValues {
        let t = self.class_of(c);
        let coef: Vec<f64> = self.dof_map.cell_dofs[c].iter().map(|&(g, s)| s as f64 * x[g]).collect();
        combine_values(&t.tabulate(p[0], p[1]), &coef)
    }
}

fn reps_layout(classes: &[ClassTables]) -> Vec<LocalDof> {
    classes[0].element.layout()
}

pub fn combine_values(vals: &[ShapeValues], coef: &[f64]) -> ShapeValues {
    let mut out = ShapeValues::default();
    for (v, &c) in vals.iter().zip(coef) {
        out.u[0] += c * v.u[0];
        out.u[1] += c * v.u[1];
        out.curl += c * v.curl;
        out.curlcurl[0] += c * v.curlcurl[0];
        out.curlcurl[1] += c * v.curlcurl[1];
    }
    out
}

fn tabulate_class(element: FiniteElement, shape: Shape, quad: usize) -> ClassTables {
    let local: Vec<[f64; 2]> = element
        .frame
        .local_cell()
        .vertices()
        .iter()
        .map(|p| [to_f64(&p[0]), to_f64(&p[1])])
        .collect();
    let rule = rule_f64(shape, &local, quad);
    let shapes: Vec<FloatShape> = element.dual_basis.iter().map(FloatShape::new).collect();
    let n = shapes.len();
    let points: Vec<[f64; 2]> = rule.iter().map(|r| r.0).collect();
    let weights: Vec<f64> = rule.iter().map(|r| r.1).collect();
    let values: Vec<ShapeValues> = points.iter().flat_map(|p| shapes.iter().map(move |s| s.eval(p[0], p[1]))).collect();
    let mut stiffness = vec![0.0; n * n];
    let mut mass = vec![0.0; n * n];
    for (q, w) in weights.iter().enumerate() {
        let vq = &values[q * n..(q + 1) * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&vq[i], &vq[j]);
                stiffness[i * n + j] += w * (a.curlcurl[0] * b.curlcurl[0] + a.curlcurl[1] * b.curlcurl[1]);
                mass[i * n + j] += w * (a.u[0] * b.u[0] + a.u[1] * b.u[1]);
            }
        }
    }
    ClassTables { element, shapes, points, weights, values, stiffness, mass }
}

/// Symmetric system stored as its lower triangle (diagonal included).
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub lower: SparseColMat<usize, f64>,
    pub b: Vec<f64>,
    pub boundary: Vec<bool>,
}

impl SparseSystem {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn from_lower_triplets(n: usize, t: &[Triplet<usize, usize, f64>], b: Vec<f64>, boundary: Vec<bool>) -> Self {
        let lower = SparseColMat::try_new_from_triplets(n, n, t).expect("valid triplets");
        Self { lower, b, boundary }
    }

    /// `y = A x` using the stored lower triangle.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        sym_lower_matvec(&self.lower, x)
    }

    /// `||A x - b|| / ||b||`, with `b - A x` accumulated in double-double.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        self.relative_residual_split(x, None)
    }

    pub fn relative_residual_split(&self, hi: &[f64], lo: Option<&[f64]>) -> f64 {
        let r = self.residual_split(hi, lo);
        let nb = norm(&self.b);
        if nb == 0.0 {
            norm(&r)
        } else {
            norm(&r) / nb
        }
    }

    /// `b - A x` with compensated products and sums, rounded once at the end.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.residual_split(x, None)
    }

    /// `b - A (hi + lo)` for a solution carried as an unevaluated sum.
    pub fn residual_split(&self, hi: &[f64], lo: Option<&[f64]>) -> Vec<f64> {
        let x = hi;
        let m = self.lower.as_ref();
        let (cp, ri, v) = (m.col_ptr(), m.row_idx(), m.val());
        let mut acc: Vec<DoubleDouble> = self.b.iter().map(|&b| DoubleDouble::from(b)).collect();
        for j in 0..x.len() {
            for p in cp[j]..cp[j + 1] {
                let i = ri[p];
                acc[i].sub_product(v[p], x[j]);
                if i != j {
                    acc[j].sub_product(v[p], x[i]);
                }
                if let Some(lo) = lo {
                    acc[i].sub_product(v[p], lo[j]);
                    if i != j {
                        acc[j].sub_product(v[p], lo[i]);
                    }
                }
            }
        }
        acc.iter().map(|d| d.hi + d.lo).collect()
    }

    /// Entries `(i, j, v)` of the stored lower triangle.
    pub fn lower_entries(&self) -> Vec<(usize, usize, f64)> {
        let m = self.lower.as_ref();
        let (cp, ri, v) = (m.col_ptr(), m.row_idx(), m.val());
        let mut out = Vec::with_capacity(v.len());
        for j in 0..self.n() {
            for p in cp[j]..cp[j + 1] {
                out.push((ri[p], j, v[p]));
            }
        }
        out
    }

    /// Coordinate text, one `i j value` line per stored entry of the full matrix.
    pub fn export_coo(&self) -> String {
        let mut s = String::new();
        for (i, j, v) in self.lower_entries() {
            s.push_str(&format!("{i} {j} {v:e}\n"));
            if i != j {
                s.push_str(&format!("{j} {i} {v:e}\n"));
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl DoubleDouble {
    /// `self -= a * b`.
    fn sub_product(&mut self, a: f64, b: f64) {
        let p = -a * b;
        let pe = (-a).mul_add(b, -p);
        let s = self.hi + p;
        let bb = s - self.hi;
        let se = (self.hi - (s - bb)) + (p - bb);
        self.hi = s;
        self.lo += se + pe;
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sym_lower_matvec(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let m = a.as_ref();
    let (cp, ri, v) = (m.col_ptr(), m.row_idx(), m.val());
    let mut y = vec![0.0; x.len()];
    for j in 0..x.len() {
        for p in cp[j]..cp[j + 1] {
            let i = ri[p];
            y[i] += v[p] * x[j];
            if i != j {
                y[j] += v[p] * x[i];
            }
        }
    }
    y
}

/// Which bilinear-form pieces to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `(curl curl u, curl curl v) + (u, v)`
    QuadCurl,
    /// `(u, v)`
    Mass,
}

/// Assembles the global system; `f` receives physical coordinates.
pub fn assemble(disc: &Discretization, f: &dyn Fn(f64, f64) -> [f64; 2], form: Form) -> SparseSystem {
    let map = &disc.dof_map;
    let mut triplets = Vec::new();
    let mut b = vec![0.0; map.total];
    for c in 0..disc.mesh.num_cells() {
        let t = disc.class_of(c);
        let n = t.dim();
        let dofs = &map.cell_dofs[c];
        let o = disc.origins[c];
        for (i, &(gi, si)) in dofs.iter().enumerate() {
            for (j, &(gj, sj)) in dofs.iter().enumerate() {
                if gj > gi {
                    continue;
                }
                let local = match form {
                    Form::QuadCurl => t.stiffness[i * n + j] + t.mass[i * n + j],
                    Form::Mass => t.mass[i * n + j],
                };
                triplets.push(Triplet::new(gi, gj, (si * sj) as f64 * local));
            }
        }
        for (q, p) in t.points.iter().enumerate() {
            let fv = f(o[0] + p[0], o[1] + p[1]);
            let w = t.weights[q];
            for (i, &(gi, si)) in dofs.iter().enumerate() {
                let v = &t.values[q * n + i];
                b[gi] += si as f64 * w * (fv[0] * v.u[0] + fv[1] * v.u[1]);
            }
        }
    }
    SparseSystem::from_lower_triplets(map.total, &triplets, b, map.boundary.clone())
}

/// Replaces boundary rows and columns by the identity and zeroes their load.
pub fn apply_bc(system: &SparseSystem, map: &GlobalDofMap) -> SparseSystem {
    let n = system.n();
    let mut t: Vec<Triplet<usize, usize, f64>> = system
        .lower_entries()
        .into_iter()
        .filter(|&(i, j, _)| !map.boundary[i] && !map.boundary[j])
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    for i in 0..n {
        if map.boundary[i] {
            t.push(Triplet::new(i, i, 1.0));
        }
    }
    let b = system.b.iter().zip(&map.boundary).map(|(v, bd)| if *bd { 0.0 } else { *v }).collect();
    SparseSystem::from_lower_triplets(n, &t, b, map.boundary.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Cg,
}

impl SolverKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Self::Direct),
            "cg" => Some(Self::Cg),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    /// Low-order part of the solution left over by refinement; the solution
    /// is `x + x_lo` and `relative_residual` refers to that sum.
    pub x_lo: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Cap on iterative refinement sweeps after the direct factorization.
const REFINEMENT_STEPS: usize = 10;

pub fn solve(system: &SparseSystem, kind: SolverKind, tol: f64) -> Result<SolveOutcome, Error> {
    let n = system.n();
    if system.b.iter().all(|v| *v == 0.0) {
        return Ok(SolveOutcome { x: vec![0.0; n], x_lo: vec![0.0; n], relative_residual: 0.0, iterations: 0 });
    }
    match kind {
        SolverKind::Direct => solve_direct(system, tol),
        SolverKind::Cg => solve_cg(system, tol, 20 * n + 1000),
    }
}

fn solve_direct(system: &SparseSystem, tol: f64) -> Result<SolveOutcome, Error> {
    let n = system.n();
    let llt = system
        .lower
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Solver(format!("Cholesky factorization failed: {e:?}")))?;
    let solve_vec = |r: &[f64]| -> Vec<f64> {
        let rhs = Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
        let x = llt.solve(&rhs);
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut x = solve_vec(&system.b);
    let mut lo = vec![0.0; n];
    let mut res = system.relative_residual(&x);
    let mut steps = 0;
    while res > tol * 1e-2 && steps < REFINEMENT_STEPS {
        let dx = solve_vec(&system.residual_split(&x, Some(&lo)));
        let (mut hi2, mut lo2) = (x.clone(), lo.clone());
        for i in 0..n {
            // two-sum of hi and the correction, folding the error into lo
            let s = hi2[i] + dx[i];
            let bb = s - hi2[i];
            let e = (hi2[i] - (s - bb)) + (dx[i] - bb);
            let t = s + (lo2[i] + e);
            lo2[i] = (lo2[i] + e) - (t - s);
            hi2[i] = t;
        }
        let cres = system.relative_residual_split(&hi2, Some(&lo2));
        steps += 1;
        if cres >= res {
            break;
        }
        let stalled = cres > 0.5 * res;
        x = hi2;
        lo = lo2;
        res = cres;
        if stalled {
            break;
        }
    }
    Ok(SolveOutcome { x, x_lo: lo, relative_residual: res, iterations: steps })
}

fn solve_cg(system: &SparseSystem, tol: f64, max_iter: usize) -> Result<SolveOutcome, Error> {
    let n = system.n();
    let mut diag = vec![0.0; n];
    for (i, j, v) in system.lower_entries() {
        if i == j {
            diag[i] = v;
        }
    }
    if diag.iter().any(|d| *d <= 0.0) {
        return Err(Error::Solver("matrix has a nonpositive diagonal entry".into()));
    }
    let nb = norm(&system.b);
    let mut x = vec![0.0; n];
    let mut r = system.b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iter {
        let ap = system.apply(&p);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= tol * nb {
            let res = system.relative_residual(&x);
            if res <= tol {
                return Ok(SolveOutcome { x_lo: vec![0.0; n], x, relative_residual: res, iterations: it });
            }
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver(format!(
        "conjugate gradients did not converge in {max_iter} iterations (relative residual {:.3e})",
        system.relative_residual(&x)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{uniform_rect_mesh, uniform_tri_mesh};
    use crate::polycore::integrate_cell;

    #[test]
    fn dof_map_counts() {
        let m = uniform_tri_mesh(1).unwrap();
        assert_eq!(build_dof_map(&m, Family::New, 2).unwrap().total, 9);
        let m = uniform_rect_mesh(2).unwrap();
        let map = build_dof_map(&m, Family::New, 2).unwrap();
        assert_eq!(map.total, 21);
        assert_eq!(map.num_free(), 5);
        let m = uniform_rect_mesh(1).unwrap();
        assert_eq!(build_dof_map(&m, Family::High, 2).unwrap().total, 20);
    }

    #[test]
    fn gather_arrays_are_injective() {
        let m = uniform_tri_mesh(3).unwrap();
        let map = build_dof_map(&m, Family::High, 3).unwrap();
        for dofs in &map.cell_dofs {
            let mut g: Vec<usize> = dofs.iter().map(|d| d.0).collect();
            g.sort();
            g.dedup();
            assert_eq!(g.len(), dofs.len());
        }
        let expected = m.num_vertices() * map.per_vertex + m.num_edges() * map.per_edge + m.num_cells() * map.per_cell;
        assert_eq!(map.total, expected);
    }

    #[test]
    fn boundary_mask_cardinality() {
        for n in 1..4 {
            let m = uniform_rect_mesh(n).unwrap();
            let map = build_dof_map(&m, Family::Mid, 2).unwrap();
            assert_eq!(map.num_boundary(), 4 * n * map.per_edge + 4 * n * map.per_vertex);
        }
        // the diagonal of the single square is an interior edge
        let m = uniform_tri_mesh(1).unwrap();
        assert_eq!(build_dof_map(&m, Family::New, 2).unwrap().num_free(), 1);
    }

    #[test]
    fn element_matrices_match_exact_integrals() {
        let m = uniform_tri_mesh(2).unwrap();
        let d = Discretization::new(m, Family::Mid, 3, None).unwrap();
        for t in &d.classes {
            let n = t.dim();
            let cell = t.element.frame.local_cell();
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (&t.element.dual_basis[i], &t.element.dual_basis[j]);
                    let cca = curl_scalar(&curl_vec(a));
                    let ccb = curl_scalar(&curl_vec(b));
                    let exact = to_f64(&integrate_cell(&(&cca.dot(&ccb) + &a.dot(b)), cell));
                    let q = t.stiffness[i * n + j] + t.mass[i * n + j];
                    assert!((q - exact).abs() <= 1e-9 * exact.abs().max(1.0), "{i} {j}: {q} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn under_integration_is_rejected() {
        let m = uniform_rect_mesh(2).unwrap();
        assert!(matches!(Discretization::new(m, Family::New, 2, Some(1)), Err(Error::Config(_))));
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let m = uniform_rect_mesh(3).unwrap();
        let d = Discretization::new(m, Family::New, 2, None).unwrap();
        let s = apply_bc(&assemble(&d, &|_, _| [0.0, 0.0], Form::QuadCurl), &d.dof_map);
        assert!(s.b.iter().all(|v| *v == 0.0));
        let out = solve(&s, SolverKind::Direct, 1e-10).unwrap();
        assert!(out.x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn one_cell_rect_system_is_spd() {
        let m = uniform_rect_mesh(1).unwrap();
        let d = Discretization::new(m, Family::New, 2, None).unwrap();
        let s = assemble(&d, &|_, _| [0.0, 0.0], Form::QuadCurl);
        assert_eq!(s.n(), 8);
        let mut dense = faer::Mat::<f64>::zeros(8, 8);
        for (i, j, v) in s.lower_entries() {
            dense[(i, j)] = v;
            dense[(j, i)] = v;
        }
        let eig = dense.self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert!(eig.iter().all(|l| *l > 0.0), "{eig:?}");
    }

    #[test]
    fn identity_and_random_spd() {
        let n = 50;
        let t: Vec<_> = (0..n).map(|i| Triplet::new(i, i, 1.0)).collect();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 7.0).collect();
        let s = SparseSystem::from_lower_triplets(n, &t, b.clone(), vec![false; n]);
        assert_eq!(solve(&s, SolverKind::Direct, 1e-10).unwrap().x, b);

        // A = B^T B + I with a deterministic dense B
        let bm = Mat::<f64>::from_fn(n, n, |i, j| (((i * 31 + j * 17) % 13) as f64 - 6.0) / 7.0);
        let a = bm.transpose() * &bm + Mat::<f64>::identity(n, n);
        let mut t = Vec::new();
        for j in 0..n {
            for i in j..n {
                t.push(Triplet::new(i, j, a[(i, j)]));
            }
        }
        let s = SparseSystem::from_lower_triplets(n, &t, b, vec![false; n]);
        for kind in [SolverKind::Direct, SolverKind::Cg] {
            let out = solve(&s, kind, 1e-10).unwrap();
            assert!(out.relative_residual <= 1e-10, "{kind:?}: {}", out.relative_residual);
        }
    }
}
