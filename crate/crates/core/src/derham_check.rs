//! Exactness and commuting-diagram checks for the discrete complex
//! `R -> Sigma_h -> V_h -> W_h -> 0`, local and global, in exact arithmetic.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::Zero;
use rand::Rng;

use crate::elements::{apply_scalar_dof, interpolate_numeric, ElementTriple, ScalarElement};
use crate::error::Error;
use crate::exact::SparseEchelon;
use crate::mesh::Mesh;
use crate::polycore::{curl_vec, grad, rat, CellGeometry, Point, Polynomial, Rational, Shape, VectorField};
use crate::quadrature::rule_f64;
use crate::solver::{build_dof_map_from_layout, GlobalDofMap, FloatShape};
use crate::spaces::{curls, scalar_span_contains, sigma_space, v_space_for, vector_span_contains, w_space, Family, LocalFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Local,
    Global,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Local => "local",
            Level::Global => "global",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub position: String,
    pub ok: bool,
    pub detail: String,
}

impl Verdict {
    fn new(position: &str, ok: bool, detail: String) -> Self {
        Self { position: position.to_string(), ok, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub level: Level,
    pub family: Family,
    pub k: u32,
    pub shape: Shape,
    /// `(dim Sigma, dim V, dim W)`.
    pub dims: (usize, usize, usize),
    pub grad_rank: usize,
    pub curl_rank: usize,
    pub verdicts: Vec<Verdict>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} exactness: {} family, k = {}, {}\n  dims (Sigma, V, W) = ({}, {}, {})\n  rank grad = {}, rank curl = {}\n",
            self.level, self.family, self.k, self.shape, self.dims.0, self.dims.1, self.dims.2, self.grad_rank, self.curl_rank
        );
        for v in &self.verdicts {
            let _ = writeln!(s, "  [{}] {}: {}", if v.ok { "ok" } else { "FAIL" }, v.position, v.detail);
        }
        let _ = writeln!(s, "  verdict: {}", if self.is_exact() { "exact" } else { "not exact" });
        s
    }

    /// One `key=value` record per line.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "level={}", self.level);
        let _ = writeln!(s, "family={}", self.family.name());
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "shape={}", self.shape);
        let _ = writeln!(s, "dim_sigma={}", self.dims.0);
        let _ = writeln!(s, "dim_v={}", self.dims.1);
        let _ = writeln!(s, "dim_w={}", self.dims.2);
        let _ = writeln!(s, "grad_rank={}", self.grad_rank);
        let _ = writeln!(s, "curl_rank={}", self.curl_rank);
        for v in &self.verdicts {
            let _ = writeln!(s, "{}={}", v.position, if v.ok { "ok" } else { "fail" });
        }
        let _ = writeln!(s, "exact={}", self.is_exact());
        s
    }
}

fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    let mut ech = SparseEchelon::new();
    for v in vectors {
        let row: BTreeMap<usize, Rational> = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
        ech.insert(&row);
    }
    ech.rank()
}

pub fn check_local(family: Family, k: u32, frame: &LocalFrame) -> Result<ExactnessReport, Error> {
    let sigma = sigma_space(family.r(k), frame)?;
    let v = v_space_for(family, k, frame)?;
    let w = w_space(k, frame)?;
    let grads: Vec<VectorField> = sigma.scalars().iter().map(grad).collect();
    let cv = curls(&v);
    let coeffs = |fields: &[VectorField]| -> Vec<Vec<Rational>> {
        let m = crate::spaces::vector_coefficients(fields);
        (0..m.cols()).map(|j| (0..m.rows()).map(|i| m.get(i, j).clone()).collect()).collect()
    };
    let grad_rank = rank_of(&coeffs(&grads));
    let curl_rank = {
        let m = crate::spaces::scalar_coefficients(&cv);
        rank_of(&(0..m.cols()).map(|j| (0..m.rows()).map(|i| m.get(i, j).clone()).collect()).collect::<Vec<_>>())
    };
    let (ds, dv, dw) = (sigma.dim(), v.dim(), w.dim());
    let verdicts = vec![
        Verdict::new("grad_into_v", vector_span_contains(v.vectors(), &grads), "grad Sigma is contained in V".into()),
        Verdict::new(
            "curl_onto_w",
            curl_rank == dw && scalar_span_contains(w.scalars(), &cv),
            format!("curl V lies in W with rank {curl_rank} of {dw}"),
        ),
        Verdict::new(
            "kernel_curl",
            dv - curl_rank == grad_rank,
            format!("dim ker curl = {} and rank grad = {grad_rank}", dv - curl_rank),
        ),
        Verdict::new("kernel_grad", ds - grad_rank == 1, format!("dim ker grad = {}", ds - grad_rank)),
        Verdict::new("dimension", dv + 1 == ds + dw, format!("{dv} = {ds} + {dw} - 1")),
    ];
    Ok(ExactnessReport {
        level: Level::Local,
        family,
        k,
        shape: frame.shape(),
        dims: (ds, dv, dw),
        grad_rank,
        curl_rank,
        verdicts,
    })
}

/// Sparse rational matrix keyed by `(row, col)`.
pub type SparseQ = BTreeMap<(usize, usize), Rational>;

/// Global operators and DOF maps of the complex on a mesh.
#[derive(Clone, Debug)]
pub struct GlobalComplex {
    pub family: Family,
    pub k: u32,
    pub triples: Vec<ElementTriple>,
    pub frames: Vec<LocalFrame>,
    pub sigma_map: GlobalDofMap,
    pub v_map: GlobalDofMap,
    pub w_map: GlobalDofMap,
    /// `V`-DOFs of the gradients of the global `Sigma_h` basis.
    pub grad: SparseQ,
    /// `W`-DOFs of the curls of the global `V_h` basis.
    pub curl: SparseQ,
    /// Entries on which two cells disagreed, per operator.
    pub grad_conflicts: usize,
    pub curl_conflicts: usize,
}

fn insert_checked(m: &mut SparseQ, key: (usize, usize), v: Rational, conflicts: &mut usize) {
    match m.get(&key) {
        Some(old) if *old != v => *conflicts += 1,
        Some(_) => {}
        None => {
            m.insert(key, v);
        }
    }
}

impl GlobalComplex {
    pub fn new(mesh: &Mesh, family: Family, k: u32) -> Result<Self, Error> {
        let reps = mesh.class_representatives();
        let frames: Vec<LocalFrame> = reps.iter().map(|&c| LocalFrame::standard(mesh.cell_geometry(c))).collect();
        let triples: Vec<ElementTriple> = frames.iter().map(|f| ElementTriple::new(family, k, f)).collect::<Result<_, _>>()?;
        let t0 = &triples[0];
        let sigma_map = build_dof_map_from_layout(mesh, &t0.sigma.layout());
        let v_map = build_dof_map_from_layout(mesh, &t0.v.layout());
        let w_map = build_dof_map_from_layout(mesh, &t0.w.layout());
        // local matrices per class
        let local_grad: Vec<Vec<Vec<Rational>>> = triples
            .iter()
            .map(|t| t.sigma.dual_basis.iter().map(|p| t.v.dof_values(&grad(p))).collect())
            .collect();
        let local_curl: Vec<Vec<Vec<Rational>>> = triples
            .iter()
            .map(|t| t.v.dual_basis.iter().map(|u| t.w.dof_values(&curl_vec(u))).collect())
            .collect();
        let (mut gm, mut cm) = (SparseQ::new(), SparseQ::new());
        let (mut gc, mut cc) = (0, 0);
        for c in 0..mesh.num_cells() {
            let class = mesh.cell_class[c];
            for (i, &(gi, si)) in sigma_map.cell_dofs[c].iter().enumerate() {
                for (l, &(gl, sl)) in v_map.cell_dofs[c].iter().enumerate() {
                    let v = &local_grad[class][i][l] * Rational::from_integer((si * sl).into());
                    insert_checked(&mut gm, (gl, gi), v, &mut gc);
                }
            }
            for (i, &(gi, si)) in v_map.cell_dofs[c].iter().enumerate() {
                for (l, &(gl, sl)) in w_map.cell_dofs[c].iter().enumerate() {
                    let v = &local_curl[class][i][l] * Rational::from_integer((si * sl).into());
                    insert_checked(&mut cm, (gl, gi), v, &mut cc);
                }
            }
        }
        gm.retain(|_, v| !v.is_zero());
        cm.retain(|_, v| !v.is_zero());
        Ok(Self {
            family,
            k,
            triples,
            frames,
            sigma_map,
            v_map,
            w_map,
            grad: gm,
            curl: cm,
            grad_conflicts: gc,
            curl_conflicts: cc,
        })
    }

    fn class_triple(&self, mesh: &Mesh, c: usize) -> &ElementTriple {
        &self.triples[mesh.cell_class[c]]
    }
}

fn sparse_rank(m: &SparseQ) -> usize {
    let mut rows: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (&(i, j), v) in m {
        rows.entry(i).or_default().insert(j, v.clone());
    }
    let mut ech = SparseEchelon::new();
    for r in rows.values() {
        ech.insert(r);
    }
    ech.rank()
}

/// `a * b` for sparse rational matrices.
pub fn sparse_product(a: &SparseQ, b: &SparseQ) -> SparseQ {
    let mut b_rows: BTreeMap<usize, Vec<(usize, &Rational)>> = BTreeMap::new();
    for (&(i, j), v) in b {
        b_rows.entry(i).or_default().push((j, v));
    }
    let mut out = SparseQ::new();
    for (&(i, l), av) in a {
        if let Some(row) = b_rows.get(&l) {
            for &(j, bv) in row {
                let e = out.entry((i, j)).or_insert_with(Rational::zero);
                *e += av * bv;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn matvec(m: &SparseQ, x: &[Rational], rows: usize) -> Vec<Rational> {
    let mut y = vec![Rational::zero(); rows];
    for (&(i, j), v) in m {
        y[i] += v * &x[j];
    }
    y
}

pub fn check_global(mesh: &Mesh, family: Family, k: u32) -> Result<ExactnessReport, Error> {
    let gc = GlobalComplex::new(mesh, family, k)?;
    let (ds, dv, dw) = (gc.sigma_map.total, gc.v_map.total, gc.w_map.total);
    let grad_rank = sparse_rank(&gc.grad);
    let curl_rank = sparse_rank(&gc.curl);
    let product = sparse_product(&gc.curl, &gc.grad);
    let verdicts = vec![
        Verdict::new(
            "conformity",
            gc.grad_conflicts == 0 && gc.curl_conflicts == 0,
            format!("{} gradient and {} curl entries disagree across cells", gc.grad_conflicts, gc.curl_conflicts),
        ),
        Verdict::new("complex", product.is_empty(), format!("curl * grad has {} nonzero entries", product.len())),
        Verdict::new("kernel_grad", grad_rank + 1 == ds, format!("rank grad = {grad_rank}, dim Sigma_h = {ds}")),
        Verdict::new("curl_onto_w", curl_rank == dw, format!("rank curl = {curl_rank}, dim W_h = {dw}")),
        Verdict::new(
            "kernel_curl",
            grad_rank + curl_rank == dv,
            format!("rank grad + rank curl = {}, dim V_h = {dv}", grad_rank + curl_rank),
        ),
        Verdict::new("dimension", dv + 1 == ds + dw, format!("{dv} = {ds} + {dw} - 1")),
    ];
    Ok(ExactnessReport {
        level: Level::Global,
        family,
        k,
        shape: mesh.shape,
        dims: (ds, dv, dw),
        grad_rank,
        curl_rank,
        verdicts,
    })
}

/// Random polynomial of total degree `degree` with small rational coefficients.
pub fn random_polynomial(rng: &mut impl Rng, degree: u32) -> Polynomial {
    let mut terms = Vec::new();
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            let num: i64 = rng.gen_range(-9..=9);
            let den: i64 = rng.gen_range(1..=5);
            terms.push(((a, b), rat(num, den)));
        }
    }
    Polynomial::from_terms(terms)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingReport {
    pub family: Family,
    pub k: u32,
    pub shape: Shape,
    pub samples: usize,
    /// Samples whose gradient leg `grad pi_h u = Pi_h grad u` failed.
    pub grad_failures: usize,
    /// Samples whose curl leg `curl Pi_h v = pi~_h curl v` failed.
    pub curl_failures: usize,
    /// Global interpolants that were not single-valued across cells.
    pub conformity_failures: usize,
}

impl CommutingReport {
    pub fn passed(&self) -> bool {
        self.grad_failures == 0 && self.curl_failures == 0 && self.conformity_failures == 0
    }

    pub fn to_text(&self) -> String {
        format!(
            "commuting diagrams: {} family, k = {}, {}: {} samples, gradient leg failures {}, curl leg failures {}, conformity failures {}: {}\n",
            self.family,
            self.k,
            self.shape,
            self.samples,
            self.grad_failures,
            self.curl_failures,
            self.conformity_failures,
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// Global DOF vector of a field given cellwise in local coordinates;
/// `None` if two cells disagree on a shared DOF.
fn global_dofs(
    mesh: &Mesh,
    map: &GlobalDofMap,
    local: impl Fn(usize, &Point) -> Vec<Rational>,
) -> Option<Vec<Rational>> {
    let mut out: Vec<Option<Rational>> = vec![None; map.total];
    for c in 0..mesh.num_cells() {
        let o = mesh.cell_geometry(c).barycenter();
        let vals = local(c, &o);
        for (l, &(g, s)) in map.cell_dofs[c].iter().enumerate() {
            let v = if s < 0 { -vals[l].clone() } else { vals[l].clone() };
            match &out[g] {
                Some(old) if *old != v => return None,
                Some(_) => {}
                None => out[g] = Some(v),
            }
        }
    }
    out.into_iter().collect()
}

fn scalar_local(el: &ScalarElement, p: &Polynomial) -> Vec<Rational> {
    el.dofs.iter().map(|d| apply_scalar_dof(d, p)).collect()
}

/// Checks both commuting legs on global polynomial samples. Cell frames
/// are centered at the barycenter, so samples are translated per cell.
pub fn check_commuting_global(
    mesh: &Mesh,
    family: Family,
    k: u32,
    scalar_samples: &[Polynomial],
    vector_samples: &[VectorField],
) -> Result<CommutingReport, Error> {
    let gc = GlobalComplex::new(mesh, family, k)?;
    let mut report = CommutingReport {
        family,
        k,
        shape: mesh.shape,
        samples: scalar_samples.len().max(vector_samples.len()),
        grad_failures: 0,
        curl_failures: 0,
        conformity_failures: 0,
    };
    for u in scalar_samples {
        let sigma = global_dofs(mesh, &gc.sigma_map, |c, o| {
            scalar_local(&gc.class_triple(mesh, c).sigma, &u.translate(o))
        });
        let grad_u = grad(u);
        let pi_grad = global_dofs(mesh, &gc.v_map, |c, o| {
            gc.class_triple(mesh, c).v.dof_values(&grad_u.translate(o))
        });
        match (sigma, pi_grad) {
            (Some(s), Some(g)) => {
                if matvec(&gc.grad, &s, gc.v_map.total) != g {
                    report.grad_failures += 1;
                }
            }
            _ => report.conformity_failures += 1,
        }
    }
    for v in vector_samples {
        let vd = global_dofs(mesh, &gc.v_map, |c, o| gc.class_triple(mesh, c).v.dof_values(&v.translate(o)));
        let cv = curl_vec(v);
        let wd = global_dofs(mesh, &gc.w_map, |c, o| {
            scalar_local(&gc.class_triple(mesh, c).w, &cv.translate(o))
        });
        match (vd, wd) {
            (Some(a), Some(b)) => {
                if matvec(&gc.curl, &a, gc.w_map.total) != b {
                    report.curl_failures += 1;
                }
            }
            _ => report.conformity_failures += 1,
        }
    }
    Ok(report)
}

/// `||u - Pi_h u||` in `L^2` for a smooth field given in physical
/// coordinates, with `curl` its analytic curl.
pub fn interpolation_error(
    mesh: &Mesh,
    family: Family,
    k: u32,
    u: &dyn Fn([f64; 2]) -> [f64; 2],
    curl: &dyn Fn([f64; 2]) -> f64,
    quad_points: usize,
) -> Result<f64, Error> {
    let reps = mesh.class_representatives();
    let elements: Vec<_> = reps
        .iter()
        .map(|&c| crate::elements::FiniteElement::new(family, k, &LocalFrame::standard(mesh.cell_geometry(c))))
        .collect::<Result<_, _>>()?;
    let shapes: Vec<Vec<FloatShape>> = elements.iter().map(|el| el.dual_basis.iter().map(FloatShape::new).collect()).collect();
    let mut acc = 0.0;
    for c in 0..mesh.num_cells() {
        let class = mesh.cell_class[c];
        let el = &elements[class];
        let o = mesh.barycenter_f64(c);
        let ul = |p: [f64; 2]| u([p[0] + o[0], p[1] + o[1]]);
        let cl = |p: [f64; 2]| curl([p[0] + o[0], p[1] + o[1]]);
        let dofs = interpolate_numeric(el, &ul, Some(&cl), quad_points)?;
        let local: Vec<[f64; 2]> = el.frame.local_cell().vertices().iter().map(|p| [crate::polycore::to_f64(&p[0]), crate::polycore::to_f64(&p[1])]).collect();
        for (p, w) in rule_f64(mesh.shape, &local, quad_points) {
            let mut ih = [0.0; 2];
            for (d, s) in dofs.iter().zip(&shapes[class]) {
                let v = s.eval(p[0], p[1]);
                ih[0] += d * v.u[0];
                ih[1] += d * v.u[1];
            }
            let e = ul(p);
            acc += w * ((e[0] - ih[0]).powi(2) + (e[1] - ih[1]).powi(2));
        }
    }
    Ok(acc.sqrt())
}

/// Random nondegenerate cell with small rational coordinates; triangles are
/// counterclockwise, rectangles axis-aligned.
pub fn random_cell(rng: &mut impl Rng, shape: Shape) -> CellGeometry {
    let mut coord = || rat(rng.gen_range(-20..=20), rng.gen_range(1..=7));
    match shape {
        Shape::Triangle => loop {
            let p: Vec<Point> = (0..3).map(|_| [coord(), coord()]).collect();
            let area2 = (&p[1][0] - &p[0][0]) * (&p[2][1] - &p[0][1]) - (&p[2][0] - &p[0][0]) * (&p[1][1] - &p[0][1]);
            if area2.is_zero() {
                continue;
            }
            let [a, b, c] = [p[0].clone(), p[1].clone(), p[2].clone()];
            let verts = if area2 > Rational::zero() { [a, b, c] } else { [a, c, b] };
            return CellGeometry::triangle(verts).expect("positive area");
        },
        Shape::Rectangle => loop {
            let (x0, x1, y0, y1) = (coord(), coord(), coord(), coord());
            if x0 == x1 || y0 == y1 {
                continue;
            }
            let (xl, xr) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
            let (yd, yu) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            return CellGeometry::rectangle(xl, xr, yd, yu).expect("positive area");
        },
    }
}

/// Reference cells for local checks.
pub fn reference_frame(shape: Shape) -> LocalFrame {
    LocalFrame::standard(match shape {
        Shape::Triangle => CellGeometry::reference_triangle(),
        Shape::Rectangle => CellGeometry::reference_rectangle(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{uniform_rect_mesh, uniform_tri_mesh};
    use crate::polycore::{int, poincare};
    use crate::spaces::supported_combinations;

    #[test]
    fn local_examples() {
        let r = check_local(Family::New, 2, &reference_frame(Shape::Triangle)).unwrap();
        assert!(r.is_exact(), "{}", r.to_text());
        assert_eq!(r.dims, (3, 6, 4));
        let r = check_local(Family::Mid, 3, &reference_frame(Shape::Triangle)).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.dims.1, 16);
    }

    #[test]
    fn local_exactness_all_combinations() {
        for (family, shape, k) in supported_combinations() {
            let r = check_local(family, k, &reference_frame(shape)).unwrap();
            assert!(r.is_exact(), "{}", r.to_text());
        }
    }

    #[test]
    fn global_examples() {
        let r = check_global(&uniform_tri_mesh(1).unwrap(), Family::New, 2).unwrap();
        assert_eq!(r.dims, (4, 9, 6));
        assert!(r.is_exact(), "{}", r.to_text());
        let r = check_global(&uniform_rect_mesh(2).unwrap(), Family::New, 2).unwrap();
        assert_eq!(r.dims, (9, 21, 13));
        assert!(r.is_exact(), "{}", r.to_text());
        assert!(r.to_records().contains("exact=true"));
    }

    #[test]
    fn commuting_examples() {
        let mesh = uniform_tri_mesh(2).unwrap();
        let x = Polynomial::x();
        let y = Polynomial::y();
        let u = &(&x * &x) * &y;
        let c = Polynomial::constant(int(3));
        let v = poincare(&(&x * &y));
        let r = check_commuting_global(&mesh, Family::New, 3, &[u, c], &[v]).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}
