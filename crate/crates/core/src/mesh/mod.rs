//! Unstructured triangular meshes, face connectivity and geometric factors.

mod connectivity;
mod geometry;
mod io;

pub use connectivity::{build_connectivity, Connectivity};
pub use geometry::{compute_geometry, Geometry};
pub use io::{load_mesh, write_mesh};

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Physical boundary condition attached to a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Prescribed velocity; homogeneous Neumann pressure increment.
    DirichletInflow,
    /// Natural outflow; Dirichlet pressure.
    NeumannOutflow,
    /// No-slip wall (homogeneous Dirichlet velocity).
    Wall,
}

impl BoundaryTag {
    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            1 => Some(Self::DirichletInflow),
            2 => Some(Self::NeumannOutflow),
            3 => Some(Self::Wall),
            _ => None,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            Self::DirichletInflow => 1,
            Self::NeumannOutflow => 2,
            Self::Wall => 3,
        }
    }

    /// True where the velocity is prescribed.
    pub fn is_velocity_dirichlet(self) -> bool {
        !matches!(self, Self::NeumannOutflow)
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Local vertex pair of face `f` (counterclockwise).
pub fn face_vertices(f: usize) -> (usize, usize) {
    match f {
        0 => (0, 1),
        1 => (1, 2),
        _ => (2, 0),
    }
}

/// Triangular mesh with counterclockwise elements and tagged boundary edges.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: HashMap<(usize, usize), BoundaryTag>,
}

impl Mesh {
    /// Validates and, where needed, reorients the input.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        boundary: HashMap<(usize, usize), BoundaryTag>,
    ) -> Result<Self> {
        for (e, t) in triangles.iter_mut().enumerate() {
            if let Some(&v) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "triangle {e} references missing vertex {v}"
                )));
            }
            let area = signed_area(&vertices, t);
            if area.abs() <= f64::EPSILON * scale_of(&vertices, t) {
                return Err(Error::Mesh(format!("triangle {e} is degenerate")));
            }
            if area < 0.0 {
                t.swap(1, 2);
            }
        }
        let boundary: HashMap<_, _> = boundary
            .into_iter()
            .map(|((a, b), tag)| (edge_key(a, b), tag))
            .collect();
        let mesh = Mesh {
            vertices,
            triangles,
            boundary,
        };
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &mesh.triangles {
            for f in 0..3 {
                let (a, b) = face_vertices(f);
                *count.entry(edge_key(t[a], t[b])).or_default() += 1;
            }
        }
        for (&(a, b), &c) in &count {
            if c > 2 {
                return Err(Error::Mesh(format!(
                    "non-manifold edge ({a}, {b}) shared by {c} triangles"
                )));
            }
        }
        for (&(a, b), &c) in &count {
            let tagged = mesh.boundary.contains_key(&(a, b));
            if c == 1 && !tagged {
                return Err(Error::Mesh(format!("boundary edge ({a}, {b}) has no tag")));
            }
            if c == 2 && tagged {
                return Err(Error::Mesh(format!(
                    "interior edge ({a}, {b}) carries a boundary tag"
                )));
            }
        }
        for &(a, b) in mesh.boundary.keys() {
            if !count.contains_key(&(a, b)) {
                return Err(Error::Mesh(format!(
                    "tagged edge ({a}, {b}) is not a mesh edge"
                )));
            }
        }
        Ok(mesh)
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[e])
    }

    pub fn face_length(&self, e: usize, f: usize) -> f64 {
        let (a, b) = face_vertices(f);
        let t = &self.triangles[e];
        let (pa, pb) = (self.vertices[t[a]], self.vertices[t[b]]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    /// Neighbor `(element, face)` across each face, or `None` plus the tag on the boundary.
    pub fn face_neighbors(&self) -> Vec<[FaceLink; 3]> {
        let mut owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (e, t) in self.triangles.iter().enumerate() {
            for f in 0..3 {
                let (a, b) = face_vertices(f);
                owners.entry(edge_key(t[a], t[b])).or_default().push((e, f));
            }
        }
        self.triangles
            .iter()
            .enumerate()
            .map(|(e, t)| {
                std::array::from_fn(|f| {
                    let (a, b) = face_vertices(f);
                    let key = edge_key(t[a], t[b]);
                    let own = &owners[&key];
                    match own.iter().find(|&&(e2, _)| e2 != e) {
                        Some(&(e2, f2)) => FaceLink::Interior {
                            element: e2,
                            face: f2,
                        },
                        None => FaceLink::Boundary(self.boundary[&key]),
                    }
                })
            })
            .collect()
    }

    /// Uniform `nx x ny` grid on `[x0, x1] x [y0, y1]`, each cell split along a diagonal.
    ///
    /// `tags` are the boundary kinds of the bottom, right, top and left sides.
    pub fn generate_structured(
        nx: usize,
        ny: usize,
        bounds: [f64; 4],
        tags: [BoundaryTag; 4],
    ) -> Result<Self> {
        let [x0, x1, y0, y1] = bounds;
        if nx == 0 || ny == 0 {
            return Err(Error::Mesh(format!(
                "grid size {nx} x {ny} must be positive"
            )));
        }
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Mesh(format!("degenerate bounds {bounds:?}")));
        }
        let xs: Vec<f64> = (0..=nx)
            .map(|i| x0 + (x1 - x0) * i as f64 / nx as f64)
            .collect();
        let ys: Vec<f64> = (0..=ny)
            .map(|j| y0 + (y1 - y0) * j as f64 / ny as f64)
            .collect();
        Self::tensor_grid(&xs, &ys, tags, |_, _| true)
    }

    /// Diagonal-split tensor grid over the given coordinate lines. Cells for which
    /// `keep(i, j)` is false are omitted; the exposed edges are tagged [`BoundaryTag::Wall`].
    pub fn tensor_grid(
        xs: &[f64],
        ys: &[f64],
        tags: [BoundaryTag; 4],
        keep: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for &y in ys {
            for &x in xs {
                vertices.push([x, y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for j in 0..ny {
            for i in 0..nx {
                if !keep(i, j) {
                    continue;
                }
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                for t in [[a, b, c], [a, c, d]] {
                    for f in 0..3 {
                        let (p, q) = face_vertices(f);
                        *edge_count.entry(edge_key(t[p], t[q])).or_default() += 1;
                    }
                    triangles.push(t);
                }
            }
        }
        let mut boundary = HashMap::new();
        for (&(p, q), &c) in &edge_count {
            if c != 1 {
                continue;
            }
            let (ip, jp) = (p % (nx + 1), p / (nx + 1));
            let (iq, jq) = (q % (nx + 1), q / (nx + 1));
            let tag = if jp == 0 && jq == 0 {
                tags[0]
            } else if ip == nx && iq == nx {
                tags[1]
            } else if jp == ny && jq == ny {
                tags[2]
            } else if ip == 0 && iq == 0 {
                tags[3]
            } else {
                BoundaryTag::Wall
            };
            boundary.insert((p, q), tag);
        }
        // drop vertices not used by any triangle
        let mut used = vec![usize::MAX; vertices.len()];
        let mut compact = Vec::new();
        for t in &triangles {
            for &v in t {
                if used[v] == usize::MAX {
                    used[v] = compact.len();
                    compact.push(vertices[v]);
                }
            }
        }
        let triangles = triangles
            .into_iter()
            .map(|t| [used[t[0]], used[t[1]], used[t[2]]])
            .collect();
        let boundary = boundary
            .into_iter()
            .map(|((p, q), tag)| ((used[p], used[q]), tag))
            .collect();
        Mesh::new(compact, triangles, boundary)
    }
}

/// What lies across an element face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceLink {
    Interior { element: usize, face: usize },
    Boundary(BoundaryTag),
}

fn signed_area(v: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn scale_of(v: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b) = (v[t[0]], v[t[1]]);
    let l = (b[0] - a[0]).hypot(b[1] - a[1]);
    l * l
}

#[cfg(test)]
mod tests {
    use super::*;
    use BoundaryTag::*;

    #[test]
    fn single_cell_grid() {
        let m =
            Mesh::generate_structured(1, 1, [0.0, 1.0, 0.0, 1.0], [DirichletInflow; 4]).unwrap();
        assert_eq!(m.num_elements(), 2);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.boundary.len(), 4);
    }

    #[test]
    fn refinement_bookkeeping() {
        let tags = [
            DirichletInflow,
            NeumannOutflow,
            DirichletInflow,
            DirichletInflow,
        ];
        let mut prev: Option<(usize, f64)> = None;
        for n in [4, 8, 16] {
            let m = Mesh::generate_structured(n, n, [-0.5, 0.5, -0.5, 0.5], tags).unwrap();
            assert_eq!(m.num_elements(), 2 * n * n);
            let h = m.face_length(0, 0);
            if let Some((k, hp)) = prev {
                assert_eq!(m.num_elements(), 4 * k);
                assert!((hp / h - 2.0f64).abs() < 1e-12);
            }
            prev = Some((m.num_elements(), h));
            let areas: Vec<f64> = (0..m.num_elements()).map(|e| m.element_area(e)).collect();
            assert!(areas.iter().all(|a| (a - areas[0]).abs() < 1e-15));
        }
    }

    #[test]
    fn side_tags_are_assigned() {
        let tags = [DirichletInflow, NeumannOutflow, Wall, DirichletInflow];
        let m = Mesh::generate_structured(3, 2, [0.0, 3.0, 0.0, 2.0], tags).unwrap();
        for (&(a, b), &tag) in &m.boundary {
            let (pa, pb) = (m.vertices[a], m.vertices[b]);
            let expect = if pa[1] == 0.0 && pb[1] == 0.0 {
                DirichletInflow
            } else if pa[0] == 3.0 && pb[0] == 3.0 {
                NeumannOutflow
            } else if pa[1] == 2.0 && pb[1] == 2.0 {
                Wall
            } else {
                DirichletInflow
            };
            assert_eq!(tag, expect);
        }
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut b = HashMap::new();
        for e in [(0, 1), (1, 2), (2, 0)] {
            b.insert(e, Wall);
        }
        let m = Mesh::new(v, vec![[0, 2, 1]], b).unwrap();
        assert!(m.element_area(0) > 0.0);
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(Mesh::generate_structured(2, 2, [0.0, 0.0, 0.0, 1.0], [Wall; 4]).is_err());
        assert!(Mesh::generate_structured(0, 2, [0.0, 1.0, 0.0, 1.0], [Wall; 4]).is_err());
    }
}
