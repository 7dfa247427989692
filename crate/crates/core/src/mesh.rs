//! Uniform meshes of the unit square with global edge orientation
//! (lower vertex index to higher) and boundary flags.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::Error;
use crate::polycore::{int, rat, to_f64, CellGeometry, Point, Shape};

#[derive(Clone, Debug)]
pub struct Mesh {
    pub n: usize,
    pub shape: Shape,
    pub vertices: Vec<Point>,
    /// Global direction runs from `edges[i][0]` to `edges[i][1]`, `[0] < [1]`.
    pub edges: Vec<[usize; 2]>,
    /// Counterclockwise vertex indices; local edge `e` joins local vertices `e` and `e + 1`.
    pub cells: Vec<Vec<usize>>,
    /// Global edge of each local edge, with `+1` if the local direction agrees.
    pub cell_edges: Vec<Vec<(usize, i32)>>,
    /// Congruence class of each cell; cells of one class are translates.
    pub cell_class: Vec<usize>,
    pub boundary_vertex: Vec<bool>,
    pub boundary_edge: Vec<bool>,
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_classes(&self) -> usize {
        self.cell_class.iter().max().map_or(0, |m| m + 1)
    }

    /// First cell of each congruence class.
    pub fn class_representatives(&self) -> Vec<usize> {
        (0..self.num_classes())
            .map(|c| self.cell_class.iter().position(|&x| x == c).expect("class is populated"))
            .collect()
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry {
        let v = &self.cells[c];
        match self.shape {
            Shape::Triangle => CellGeometry::triangle([
                self.vertices[v[0]].clone(),
                self.vertices[v[1]].clone(),
                self.vertices[v[2]].clone(),
            ])
            .expect("mesh cells are nondegenerate"),
            Shape::Rectangle => CellGeometry::rectangle(
                self.vertices[v[0]][0].clone(),
                self.vertices[v[2]][0].clone(),
                self.vertices[v[0]][1].clone(),
                self.vertices[v[2]][1].clone(),
            )
            .expect("mesh cells are nondegenerate"),
        }
    }

    pub fn vertex_f64(&self, v: usize) -> [f64; 2] {
        [to_f64(&self.vertices[v][0]), to_f64(&self.vertices[v][1])]
    }

    pub fn cell_vertices_f64(&self, c: usize) -> Vec<[f64; 2]> {
        self.cells[c].iter().map(|&v| self.vertex_f64(v)).collect()
    }

    pub fn barycenter_f64(&self, c: usize) -> [f64; 2] {
        let vs = self.cell_vertices_f64(c);
        let n = vs.len() as f64;
        [vs.iter().map(|p| p[0]).sum::<f64>() / n, vs.iter().map(|p| p[1]).sum::<f64>() / n]
    }

    /// Plain-text dump: `v x y`, `e i j [b]`, `c i j k [l]`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {}", v[0], v[1]);
        }
        for (e, [i, j]) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "e {i} {j}{}", if self.boundary_edge[e] { " b" } else { "" });
        }
        for c in &self.cells {
            let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "c {}", ids.join(" "));
        }
        s
    }

    fn build(n: usize, shape: Shape, cells: Vec<Vec<usize>>, cell_class: Vec<usize>) -> Self {
        let vertices: Vec<Point> = (0..=n)
            .flat_map(|j| (0..=n).map(move |i| (i, j)))
            .map(|(i, j)| [rat(i as i64, n as i64), rat(j as i64, n as i64)])
            .collect();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for c in &cells {
            let m = c.len();
            let mut ce = Vec::with_capacity(m);
            for e in 0..m {
                let (a, b) = (c[e], c[(e + 1) % m]);
                let key = (a.min(b), a.max(b));
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
                ce.push((id, if a < b { 1 } else { -1 }));
            }
            cell_edges.push(ce);
        }
        let on_boundary = |p: &Point| {
            let (zero, one) = (int(0), int(1));
            p[0] == zero || p[0] == one || p[1] == zero || p[1] == one
        };
        let boundary_vertex: Vec<bool> = vertices.iter().map(on_boundary).collect();
        let boundary_edge = edges
            .iter()
            .map(|[a, b]| {
                let (p, q) = (&vertices[*a], &vertices[*b]);
                (p[0] == q[0] && (p[0] == int(0) || p[0] == int(1)))
                    || (p[1] == q[1] && (p[1] == int(0) || p[1] == int(1)))
            })
            .collect();
        Mesh { n, shape, vertices, edges, cells, cell_edges, cell_class, boundary_vertex, boundary_edge }
    }
}

fn vid(n: usize, i: usize, j: usize) -> usize {
    j * (n + 1) + i
}

/// `n x n` squares of side `1/n`.
pub fn uniform_rect_mesh(n: usize) -> Result<Mesh, Error> {
    if n < 1 {
        return Err(Error::Config("mesh needs n >= 1".into()));
    }
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(n, i, j), vid(n, i + 1, j), vid(n, i + 1, j + 1), vid(n, i, j + 1)]);
        }
    }
    let class = vec![0; cells.len()];
    Ok(Mesh::build(n, Shape::Rectangle, cells, class))
}

/// Each square split along its SW-NE diagonal into a lower and an upper triangle.
pub fn uniform_tri_mesh(n: usize) -> Result<Mesh, Error> {
    if n < 1 {
        return Err(Error::Config("mesh needs n >= 1".into()));
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    let mut class = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(n, i, j), vid(n, i + 1, j), vid(n, i + 1, j + 1)]);
            class.push(0);
            cells.push(vec![vid(n, i, j), vid(n, i + 1, j + 1), vid(n, i, j + 1)]);
            class.push(1);
        }
    }
    Ok(Mesh::build(n, Shape::Triangle, cells, class))
}

pub fn uniform_mesh(shape: Shape, n: usize) -> Result<Mesh, Error> {
    match shape {
        Shape::Triangle => uniform_tri_mesh(n),
        Shape::Rectangle => uniform_rect_mesh(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler(m: &Mesh) -> i64 {
        m.num_vertices() as i64 - m.num_edges() as i64 + m.num_cells() as i64
    }

    #[test]
    fn rect_counts() {
        let m = uniform_rect_mesh(2).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_cells()), (9, 12, 4));
        assert_eq!(euler(&m), 1);
        let m = uniform_rect_mesh(1).unwrap();
        assert_eq!(m.boundary_edge.iter().filter(|b| **b).count(), 4);
        assert_eq!(m.num_edges(), 4);
        assert!(uniform_rect_mesh(0).is_err());
    }

    #[test]
    fn tri_counts() {
        let m = uniform_tri_mesh(1).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_cells()), (4, 5, 2));
        let m = uniform_tri_mesh(2).unwrap();
        assert_eq!((m.num_edges(), m.num_cells()), (16, 8));
        for c in 0..m.num_cells() {
            assert_eq!(m.cell_geometry(c).signed_area(), rat(1, 8));
        }
    }

    #[test]
    fn boundary_edges_and_orientation() {
        for n in 1..6 {
            for m in [uniform_rect_mesh(n).unwrap(), uniform_tri_mesh(n).unwrap()] {
                assert_eq!(euler(&m), 1);
                assert_eq!(m.boundary_edge.iter().filter(|b| **b).count(), 4 * n);
                let mut uses: Vec<Vec<i32>> = vec![Vec::new(); m.num_edges()];
                for ce in &m.cell_edges {
                    for &(e, s) in ce {
                        uses[e].push(s);
                    }
                }
                for (e, u) in uses.iter().enumerate() {
                    if m.boundary_edge[e] {
                        assert_eq!(u.len(), 1);
                    } else {
                        assert_eq!(u.len(), 2);
                        assert_eq!(u[0] + u[1], 0, "interior edge {e} must be seen with opposite signs");
                    }
                }
            }
        }
    }

    #[test]
    fn classes_are_translates() {
        let m = uniform_tri_mesh(3).unwrap();
        assert_eq!(m.num_classes(), 2);
        let reps = m.class_representatives();
        for c in 0..m.num_cells() {
            let r = reps[m.cell_class[c]];
            let (g, gr) = (m.cell_geometry(c), m.cell_geometry(r));
            let shift = |g: &CellGeometry| {
                let b = g.barycenter();
                g.translate(&[-b[0].clone(), -b[1].clone()])
            };
            assert_eq!(shift(&g), shift(&gr));
        }
    }
}
