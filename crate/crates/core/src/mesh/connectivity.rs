use super::geometry::physical_nodes;
use super::{BoundaryTag, FaceLink, Mesh};
use crate::error::{Error, Result};
use crate::refelem::ReferenceElement;

/// Element-to-element maps and trace index arrays.
///
/// `id_m` and `id_p` have length `K * 3 * Nfp` and are indexed
/// `(e * 3 + f) * Nfp + j`; entries are global node indices `e * Np + n`.
#[derive(Debug, Clone)]
pub struct Connectivity {
    pub k: usize,
    pub np: usize,
    pub nfp: usize,
    pub etoe: Vec<[usize; 3]>,
    pub etof: Vec<[usize; 3]>,
    pub id_m: Vec<usize>,
    pub id_p: Vec<usize>,
    /// Boundary tag per face, `None` on interior faces.
    pub bc: Vec<Option<BoundaryTag>>,
}

impl Connectivity {
    #[inline]
    pub fn trace(&self, e: usize, f: usize, j: usize) -> usize {
        (e * 3 + f) * self.nfp + j
    }

    pub fn num_interior_faces(&self) -> usize {
        self.bc.iter().filter(|b| b.is_none()).count() / 2
    }
}

/// Pairs face nodes across interior faces by coordinate matching.
pub fn build_connectivity(mesh: &Mesh, re: &ReferenceElement) -> Result<Connectivity> {
    let k = mesh.num_elements();
    let (np, nfp) = (re.np, re.nfp);
    let (x, y) = physical_nodes(mesh, re);
    let links = mesh.face_neighbors();
    let mut c = Connectivity {
        k,
        np,
        nfp,
        etoe: vec![[0; 3]; k],
        etof: vec![[0; 3]; k],
        id_m: vec![0; k * 3 * nfp],
        id_p: vec![0; k * 3 * nfp],
        bc: vec![None; 3 * k],
    };
    for e in 0..k {
        for f in 0..3 {
            for (j, &n) in re.face_nodes(f).iter().enumerate() {
                let t = c.trace(e, f, j);
                c.id_m[t] = e * np + n;
                c.id_p[t] = e * np + n;
            }
            match links[e][f] {
                FaceLink::Boundary(tag) => {
                    c.etoe[e][f] = e;
                    c.etof[e][f] = f;
                    c.bc[3 * e + f] = Some(tag);
                }
                FaceLink::Interior { element, face } => {
                    c.etoe[e][f] = element;
                    c.etof[e][f] = face;
                    let tol = 1e-10 * mesh.face_length(e, f);
                    for (j, &n) in re.face_nodes(f).iter().enumerate() {
                        let gm = e * np + n;
                        let hit = re.face_nodes(face).iter().find(|&&m| {
                            let gp = element * np + m;
                            (x[gm] - x[gp]).hypot(y[gm] - y[gp]) <= tol
                        });
                        match hit {
                            Some(&m) => {
                                let t = c.trace(e, f, j);
                                c.id_p[t] = element * np + m;
                            }
                            None => {
                                return Err(Error::Connectivity {
                                    element: e,
                                    face: f,
                                    msg: format!("no matching exterior node for face node {j}"),
                                })
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::build_default;

    #[test]
    fn two_triangle_square_has_one_interior_face() {
        let m =
            Mesh::generate_structured(1, 1, [0.0, 1.0, 0.0, 1.0], [BoundaryTag::Wall; 4]).unwrap();
        let re = build_default(3).unwrap();
        let c = build_connectivity(&m, &re).unwrap();
        assert_eq!(c.num_interior_faces(), 1);
        for e in 0..2 {
            for f in 0..3 {
                let interior = c.bc[3 * e + f].is_none();
                let idx: Vec<usize> = (0..c.nfp).map(|j| c.trace(e, f, j)).collect();
                if interior {
                    // the shared edge is traversed in opposite directions
                    let ps: Vec<usize> = idx.iter().map(|&t| c.id_p[t] % c.np).collect();
                    let other = c.etof[e][f];
                    let expect: Vec<usize> = re.face_nodes(other).iter().rev().cloned().collect();
                    assert_eq!(ps, expect);
                } else {
                    assert!(idx.iter().all(|&t| c.id_p[t] == c.id_m[t]));
                }
            }
        }
    }
}
