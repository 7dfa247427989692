//! Manufactured solution, error norms, convergence studies and report output.
//!
//! The exact solution is `u = curl psi` with `psi = g(x) g(y)` and
//! `g(t) = sin^3(pi t) = (3 sin(pi t) - sin(3 pi t)) / 4`, so every
//! derivative is closed form and `f = curl(Delta^2 psi + psi)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::Error;
use crate::mesh::{uniform_mesh, Mesh};
use crate::polycore::Shape;
use crate::quadrature::gauss_legendre_01;
use crate::elements::{scalar_elements, ScalarKind};
use crate::solver::{apply_bc, assemble, build_dof_map_from_layout, solve, Discretization, FloatPoly, Form, SolverKind};
use crate::spaces::{supported, Family};

/// `g^(n)(t)` for `n = 0..=5`.
pub fn g_derivative(n: usize, t: f64) -> f64 {
    let (a, b) = (PI * t, 3.0 * PI * t);
    let p = PI.powi(n as i32);
    let three_n = 3f64.powi(n as i32);
    // d^n/dt^n sin(c t) = c^n sin(c t + n pi / 2)
    let s = |x: f64| (x + n as f64 * PI / 2.0).sin();
    p * (3.0 * s(a) - three_n * s(b)) / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactFields {
    pub u: [f64; 2],
    pub curl: f64,
    pub curlcurl: [f64; 2],
    pub f: [f64; 2],
}

pub fn exact_fields(x: f64, y: f64) -> ExactFields {
    let gx: Vec<f64> = (0..6).map(|n| g_derivative(n, x)).collect();
    let gy: Vec<f64> = (0..6).map(|n| g_derivative(n, y)).collect();
    let u = [gx[0] * gy[1], -gx[1] * gy[0]];
    let curl = -(gx[2] * gy[0] + gx[0] * gy[2]);
    let curlcurl = [-(gx[2] * gy[1] + gx[0] * gy[3]), gx[3] * gy[0] + gx[1] * gy[2]];
    // Phi = Delta^2 psi + psi, f = (d_y Phi, -d_x Phi)
    let phi_y = gx[4] * gy[1] + 2.0 * gx[2] * gy[3] + gx[0] * gy[5] + gx[0] * gy[1];
    let phi_x = gx[5] * gy[0] + 2.0 * gx[3] * gy[2] + gx[1] * gy[4] + gx[1] * gy[0];
    ExactFields { u, curl, curlcurl, f: [phi_y, -phi_x] }
}

pub fn load(x: f64, y: f64) -> [f64; 2] {
    exact_fields(x, y).f
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub curl: f64,
    pub curl2: f64,
}

/// `||u - u_h||`, `||curl(u - u_h)||`, `||curl^2(u - u_h)||` by cell quadrature.
pub fn error_norms(disc: &Discretization, x: &[f64]) -> ErrorNorms {
    let mut acc = [0.0; 3];
    for c in 0..disc.mesh.num_cells() {
        let t = disc.class_of(c);
        let o = disc.origins[c];
        let uh = disc.cell_solution(c, x);
        for (q, p) in t.points.iter().enumerate() {
            let e = exact_fields(o[0] + p[0], o[1] + p[1]);
            let w = t.weights[q];
            let v = &uh[q];
            acc[0] += w * ((e.u[0] - v.u[0]).powi(2) + (e.u[1] - v.u[1]).powi(2));
            acc[1] += w * (e.curl - v.curl).powi(2);
            acc[2] += w * ((e.curlcurl[0] - v.curlcurl[0]).powi(2) + (e.curlcurl[1] - v.curlcurl[1]).powi(2));
        }
    }
    ErrorNorms { l2: acc[0].sqrt(), curl: acc[1].sqrt(), curl2: acc[2].sqrt() }
}

/// Points per mid-line in the discrete `V` norm.
pub const MIDLINE_POINTS: usize = 8;

/// `(|||u|||_V, |||v|||_W)` on a rectangular mesh for fields given cellwise:
/// `u(c, p)` and `v(c, p)` receive the cell and a physical point.
pub fn discrete_norms(
    mesh: &Mesh,
    u: &dyn Fn(usize, [f64; 2]) -> [f64; 2],
    v: &dyn Fn(usize, [f64; 2]) -> [f64; 2],
) -> Result<(f64, f64), Error> {
    if mesh.shape != Shape::Rectangle {
        return Err(Error::Config("discrete norms need a rectangular mesh".into()));
    }
    let g = gauss_legendre_01(MIDLINE_POINTS);
    let (mut nv, mut nw) = (0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let vs = mesh.cell_vertices_f64(c);
        let (x0, y0, x1, y1) = (vs[0][0], vs[0][1], vs[2][0], vs[2][1]);
        let (xc, yc) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let (hx, hy) = (0.5 * (x1 - x0), 0.5 * (y1 - y0));
        let mut i1 = 0.0;
        let mut i2 = 0.0;
        for &(s, w) in &g {
            let y = y0 + s * (y1 - y0);
            i1 += w * (y1 - y0) * u(c, [xc, y])[0].powi(2);
            let x = x0 + s * (x1 - x0);
            i2 += w * (x1 - x0) * u(c, [x, yc])[1].powi(2);
        }
        nv += 2.0 * hx * i1 + 2.0 * hy * i2;
        let vc = v(c, [xc, yc]);
        nw += 4.0 * hx * hy * (vc[0] * vc[0] + vc[1] * vc[1]);
    }
    Ok((nv.sqrt(), nw.sqrt()))
}

/// `(|||u - u_h|||_V, |||curl^2(u - u_h)|||_W)`.
pub fn discrete_error_norms(disc: &Discretization, x: &[f64]) -> Result<(f64, f64), Error> {
    let local = |c: usize, p: [f64; 2]| {
        let o = disc.origins[c];
        disc.eval_local(c, x, [p[0] - o[0], p[1] - o[1]])
    };
    discrete_norms(
        &disc.mesh,
        &|c, p| {
            let (e, h) = (exact_fields(p[0], p[1]), local(c, p));
            [e.u[0] - h.u[0], e.u[1] - h.u[1]]
        },
        &|c, p| {
            let (e, h) = (exact_fields(p[0], p[1]), local(c, p));
            [e.curlcurl[0] - h.curlcurl[0], e.curlcurl[1] - h.curlcurl[1]]
        },
    )
}

/// Largest `|(u_h, grad q)| / (||u_h|| ||grad q||)` over the interior
/// basis functions `q` of `Sigma_h`. Zero up to solver accuracy when the
/// load is divergence free.
pub fn divergence_consistency(disc: &Discretization, x: &[f64]) -> Result<f64, Error> {
    let mesh = &disc.mesh;
    let reps = mesh.class_representatives();
    let sigma = reps
        .iter()
        .map(|&c| scalar_elements(disc.family.r(disc.k), &disc.classes[mesh.cell_class[c]].element.frame, ScalarKind::Sigma))
        .collect::<Result<Vec<_>, _>>()?;
    let grads: Vec<Vec<[FloatPoly; 2]>> = sigma
        .iter()
        .map(|el| el.dual_basis.iter().map(|q| [FloatPoly::from_exact(&q.dx()), FloatPoly::from_exact(&q.dy())]).collect())
        .collect();
    let map = build_dof_map_from_layout(mesh, &sigma[0].layout());
    let mut inner = vec![0.0; map.total];
    let mut grad_sq = vec![0.0; map.total];
    let mut u_sq = 0.0;
    for c in 0..mesh.num_cells() {
        let t = disc.class_of(c);
        let g = &grads[mesh.cell_class[c]];
        let uh = disc.cell_solution(c, x);
        for (q, p) in t.points.iter().enumerate() {
            let (w, u) = (t.weights[q], uh[q].u);
            u_sq += w * (u[0] * u[0] + u[1] * u[1]);
            for (i, &(gi, s)) in map.cell_dofs[c].iter().enumerate() {
                let d = [g[i][0].eval(p[0], p[1]), g[i][1].eval(p[0], p[1])];
                inner[gi] += s as f64 * w * (u[0] * d[0] + u[1] * d[1]);
                grad_sq[gi] += w * (d[0] * d[0] + d[1] * d[1]);
            }
        }
    }
    let un = u_sq.sqrt();
    Ok((0..map.total)
        .filter(|&i| !map.boundary[i] && grad_sq[i] > 0.0)
        .map(|i| inner[i].abs() / (un * grad_sq[i].sqrt()))
        .fold(0.0, f64::max))
}

/// `log2(e_coarse / e_fine)`.
pub fn rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Family,
    pub shape: Shape,
    pub k: u32,
    pub ns: Vec<usize>,
    pub quad_points: Option<usize>,
    pub solver: SolverKind,
    pub tol: f64,
    /// Also compute the discrete norms (rectangles only).
    pub discrete_norms: bool,
}

impl RunConfig {
    pub fn new(family: Family, shape: Shape, k: u32, ns: Vec<usize>) -> Self {
        Self {
            family,
            shape,
            k,
            ns,
            quad_points: None,
            solver: SolverKind::Direct,
            tol: 1e-10,
            discrete_norms: shape == Shape::Rectangle,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !supported(self.shape, self.k) {
            return Err(Error::Unsupported(format!("{} family, k = {} on {}", self.family, self.k, self.shape)));
        }
        if self.ns.is_empty() || self.ns.windows(2).any(|w| w[1] <= w[0]) || self.ns[0] == 0 {
            return Err(Error::Config("mesh sizes must be positive and strictly increasing".into()));
        }
        if self.discrete_norms && self.shape != Shape::Rectangle {
            return Err(Error::Config("discrete norms need a rectangular mesh".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub norms: ErrorNorms,
    pub v_norm: Option<f64>,
    pub w_norm: Option<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub family: Family,
    pub shape: Shape,
    pub k: u32,
    pub rows: Vec<ErrorRow>,
}

/// Rates between consecutive rows; `None` for the first row.
fn rates(values: &[f64]) -> Vec<Option<f64>> {
    std::iter::once(None)
        .chain(values.windows(2).map(|w| Some(rate(w[0], w[1]))))
        .collect()
}

impl ErrorReport {
    pub fn l2_rates(&self) -> Vec<Option<f64>> {
        rates(&self.rows.iter().map(|r| r.norms.l2).collect::<Vec<_>>())
    }

    pub fn curl_rates(&self) -> Vec<Option<f64>> {
        rates(&self.rows.iter().map(|r| r.norms.curl).collect::<Vec<_>>())
    }

    pub fn curl2_rates(&self) -> Vec<Option<f64>> {
        rates(&self.rows.iter().map(|r| r.norms.curl2).collect::<Vec<_>>())
    }

    pub fn v_rates(&self) -> Vec<Option<f64>> {
        rates(&self.rows.iter().filter_map(|r| r.v_norm).collect::<Vec<_>>())
    }

    pub fn w_rates(&self) -> Vec<Option<f64>> {
        rates(&self.rows.iter().filter_map(|r| r.w_norm).collect::<Vec<_>>())
    }

    fn has_discrete(&self) -> bool {
        self.rows.iter().all(|r| r.v_norm.is_some() && r.w_norm.is_some()) && !self.rows.is_empty()
    }

    /// `h,l2,l2_rate,curl,curl_rate,curl2,curl2_rate[,v_norm,w_norm]`.
    pub fn to_csv(&self) -> String {
        let disc = self.has_discrete();
        let mut s = String::from("h,l2,l2_rate,curl,curl_rate,curl2,curl2_rate");
        if disc {
            s.push_str(",v_norm,w_norm");
        }
        s.push('\n');
        let (r0, r1, r2) = (self.l2_rates(), self.curl_rates(), self.curl2_rates());
        let fmt_rate = |r: Option<f64>| r.map_or(String::new(), |v| format!("{v:.6e}"));
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(
                s,
                "{:.6e},{:.6e},{},{:.6e},{},{:.6e},{}",
                row.h,
                row.norms.l2,
                fmt_rate(r0[i]),
                row.norms.curl,
                fmt_rate(r1[i]),
                row.norms.curl2,
                fmt_rate(r2[i])
            );
            if disc {
                let _ = write!(s, ",{:.6e},{:.6e}", row.v_norm.unwrap_or(f64::NAN), row.w_norm.unwrap_or(f64::NAN));
            }
            s.push('\n');
        }
        s
    }

    /// Table with error and rate columns, one row per mesh.
    pub fn to_markdown(&self) -> String {
        let disc = self.has_discrete();
        let mut s = format!("{} family, {}, k = {}\n\n", self.family, self.shape, self.k);
        s.push_str("| h | ‖e_h‖ | rate | ‖∇×e_h‖ | rate | ‖(∇×)²e_h‖ | rate |");
        if disc {
            s.push_str(" \\|\\|\\|e_h\\|\\|\\|_V | rate | \\|\\|\\|(∇×)²e_h\\|\\|\\|_W | rate |");
        }
        s.push('\n');
        let cols = if disc { 11 } else { 7 };
        s.push_str(&"|---".repeat(cols));
        s.push_str("|\n");
        let (r0, r1, r2) = (self.l2_rates(), self.curl_rates(), self.curl2_rates());
        let (rv, rw) = (self.v_rates(), self.w_rates());
        let fr = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.4}"));
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(
                s,
                "| 1/{} | {:.6e} | {} | {:.6e} | {} | {:.6e} | {} |",
                row.n,
                row.norms.l2,
                fr(r0[i]),
                row.norms.curl,
                fr(r1[i]),
                row.norms.curl2,
                fr(r2[i])
            );
            if disc {
                let _ = write!(
                    s,
                    " {:.4e} | {} | {:.4e} | {} |",
                    row.v_norm.unwrap_or(f64::NAN),
                    fr(rv.get(i).copied().flatten()),
                    row.w_norm.unwrap_or(f64::NAN),
                    fr(rw.get(i).copied().flatten())
                );
            }
            s.push('\n');
        }
        s
    }
}

/// Solution of the discrete problem on one mesh.
#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub disc: Discretization,
    pub x: Vec<f64>,
    pub residual: f64,
}

pub fn solve_level(cfg: &RunConfig, n: usize) -> Result<LevelSolution, Error> {
    let mesh = uniform_mesh(cfg.shape, n)?;
    let disc = Discretization::new(mesh, cfg.family, cfg.k, cfg.quad_points)?;
    let system = apply_bc(&assemble(&disc, &load, Form::QuadCurl), &disc.dof_map);
    let out = solve(&system, cfg.solver, cfg.tol).map_err(|e| Error::Solver(format!("h = 1/{n}: {e}")))?;
    Ok(LevelSolution { disc, x: out.x, residual: out.relative_residual })
}

pub fn convergence_study(cfg: &RunConfig) -> Result<ErrorReport, Error> {
    convergence_study_with(cfg, |_| {})
}

/// Like [`convergence_study`], calling `progress` after every level.
pub fn convergence_study_with(cfg: &RunConfig, mut progress: impl FnMut(&ErrorRow)) -> Result<ErrorReport, Error> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let sol = solve_level(cfg, n)?;
        let norms = error_norms(&sol.disc, &sol.x);
        let (v_norm, w_norm) = if cfg.discrete_norms {
            let (v, w) = discrete_error_norms(&sol.disc, &sol.x)?;
            (Some(v), Some(w))
        } else {
            (None, None)
        };
        let row = ErrorRow {
            n,
            h: 1.0 / n as f64,
            dofs: sol.disc.dof_map.total,
            norms,
            v_norm,
            w_norm,
            residual: sol.residual,
        };
        progress(&row);
        rows.push(row);
    }
    Ok(ErrorReport { family: cfg.family, shape: cfg.shape, k: cfg.k, rows })
}
