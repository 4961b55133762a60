//! Warp-and-blend interpolation nodes on the bi-unit triangle.

use nalgebra::DMatrix;

use super::jacobi::{jacobi_gl, jacobi_p, vandermonde_1d};
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 10;

// Optimised blending exponents for the equilateral warp-and-blend construction.
const ALPHA_OPT: [f64; 15] = [
    0.0, 0.0, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959, 1.5743,
    1.5770, 1.6223, 1.6258,
];

/// Interpolation nodes of a degree-`N` nodal basis on the reference triangle.
///
/// Faces are numbered counterclockwise: face 0 runs from vertex (-1,-1) to (1,-1),
/// face 1 from (1,-1) to (-1,1) and face 2 from (-1,1) back to (-1,-1). The node
/// indices of each face are listed in that traversal direction.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub degree: usize,
    pub coords: Vec<(f64, f64)>,
    pub face_indices: [Vec<usize>; 3],
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn r(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.0).collect()
    }

    pub fn s(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.1).collect()
    }
}

/// Number of nodes of the degree-`n` triangle space.
pub fn np_of(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Arc parameter in [-1, 1] of a reference point along face `f`, in traversal direction.
pub fn face_parameter(face: usize, r: f64, s: f64) -> f64 {
    match face {
        0 => r,
        1 => s,
        _ => -s,
    }
}

/// Reference point at arc parameter `t` of face `f`.
pub fn face_point(face: usize, t: f64) -> (f64, f64) {
    match face {
        0 => (t, -1.0),
        1 => (-t, t),
        _ => (-1.0, -t),
    }
}

fn warp_factor(n: usize, rout: &[f64]) -> Vec<f64> {
    let lgl = jacobi_gl(0.0, 0.0, n);
    let req: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let veq = vandermonde_1d(n, &req);
    let pmat = DMatrix::from_fn(n + 1, rout.len(), |i, j| jacobi_p(rout[j], 0.0, 0.0, i));
    let lmat = veq
        .transpose()
        .lu()
        .solve(&pmat)
        .expect("equispaced 1D Vandermonde is invertible");
    rout.iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut w = 0.0;
            for i in 0..=n {
                w += lmat[(i, k)] * (lgl[i] - req[i]);
            }
            if r.abs() < 1.0 - 1e-10 {
                w / (1.0 - r * r)
            } else {
                0.0
            }
        })
        .collect()
}

/// Builds the warp-and-blend node set of degree `n`.
pub fn build_node_set(n: usize) -> Result<NodeSet> {
    if !(1..=MAX_DEGREE).contains(&n) {
        return Err(Error::Config(format!(
            "polynomial degree {n} outside supported range 1..={MAX_DEGREE}"
        )));
    }
    let np = np_of(n);
    let alpha = ALPHA_OPT[n - 1];
    let (mut l1, mut l3) = (Vec::with_capacity(np), Vec::with_capacity(np));
    for i in 0..=n {
        for j in 0..=(n - i) {
            l1.push(i as f64 / n as f64);
            l3.push(j as f64 / n as f64);
        }
    }
    let l2: Vec<f64> = (0..np).map(|k| 1.0 - l1[k] - l3[k]).collect();
    let sqrt3 = 3f64.sqrt();
    let mut x: Vec<f64> = (0..np).map(|k| -l2[k] + l3[k]).collect();
    let mut y: Vec<f64> = (0..np)
        .map(|k| (-l2[k] - l3[k] + 2.0 * l1[k]) / sqrt3)
        .collect();

    let d1: Vec<f64> = (0..np).map(|k| l3[k] - l2[k]).collect();
    let d2: Vec<f64> = (0..np).map(|k| l1[k] - l3[k]).collect();
    let d3: Vec<f64> = (0..np).map(|k| l2[k] - l1[k]).collect();
    let (w1, w2, w3) = (
        warp_factor(n, &d1),
        warp_factor(n, &d2),
        warp_factor(n, &d3),
    );
    let (c2, s2) = (
        (2.0 * std::f64::consts::PI / 3.0).cos(),
        (2.0 * std::f64::consts::PI / 3.0).sin(),
    );
    let (c3, s3) = (
        (4.0 * std::f64::consts::PI / 3.0).cos(),
        (4.0 * std::f64::consts::PI / 3.0).sin(),
    );
    for k in 0..np {
        let warp1 = 4.0 * l2[k] * l3[k] * w1[k] * (1.0 + (alpha * l1[k]).powi(2));
        let warp2 = 4.0 * l1[k] * l3[k] * w2[k] * (1.0 + (alpha * l2[k]).powi(2));
        let warp3 = 4.0 * l1[k] * l2[k] * w3[k] * (1.0 + (alpha * l3[k]).powi(2));
        x[k] += warp1 + c2 * warp2 + c3 * warp3;
        y[k] += s2 * warp2 + s3 * warp3;
    }

    // equilateral -> bi-unit right triangle
    let coords: Vec<(f64, f64)> = (0..np)
        .map(|k| {
            let b1 = (sqrt3 * y[k] + 1.0) / 3.0;
            let b2 = (-3.0 * x[k] - sqrt3 * y[k] + 2.0) / 6.0;
            let b3 = (3.0 * x[k] - sqrt3 * y[k] + 2.0) / 6.0;
            (-b2 + b3 - b1, -b2 - b3 + b1)
        })
        .collect();

    let tol = 1e-10;
    let on_face = |f: usize, (r, s): (f64, f64)| match f {
        0 => (s + 1.0).abs() < tol,
        1 => (r + s).abs() < tol,
        _ => (r + 1.0).abs() < tol,
    };
    let face_indices: [Vec<usize>; 3] = std::array::from_fn(|f| {
        let mut idx: Vec<usize> = (0..np).filter(|&k| on_face(f, coords[k])).collect();
        idx.sort_by(|&a, &b| {
            let ta = face_parameter(f, coords[a].0, coords[a].1);
            let tb = face_parameter(f, coords[b].0, coords[b].1);
            ta.partial_cmp(&tb).unwrap()
        });
        idx
    });
    for (f, idx) in face_indices.iter().enumerate() {
        if idx.len() != n + 1 {
            return Err(Error::Construction(format!(
                "face {f} of the degree-{n} node set has {} nodes, expected {}",
                idx.len(),
                n + 1
            )));
        }
    }
    Ok(NodeSet {
        degree: n,
        coords,
        face_indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::jacobi::vandermonde_2d;

    #[test]
    fn linear_nodes_are_vertices() {
        let ns = build_node_set(1).unwrap();
        assert_eq!(ns.len(), 3);
        let v = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
        for (c, e) in ns.coords.iter().zip(v) {
            assert!((c.0 - e.0).abs() < 1e-14 && (c.1 - e.1).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_nodes_are_vertices_and_midpoints() {
        let ns = build_node_set(2).unwrap();
        let mut expect = vec![
            (-1.0, -1.0),
            (0.0, -1.0),
            (1.0, -1.0),
            (-1.0, 0.0),
            (0.0, 0.0),
            (-1.0, 1.0),
        ];
        for c in &ns.coords {
            let pos = expect
                .iter()
                .position(|e| (c.0 - e.0).abs() < 1e-12 && (c.1 - e.1).abs() < 1e-12)
                .expect("unexpected node");
            expect.remove(pos);
        }
        assert!(expect.is_empty());
    }

    #[test]
    fn node_set_invariants() {
        for n in 1..=MAX_DEGREE {
            let ns = build_node_set(n).unwrap();
            assert_eq!(ns.len(), np_of(n));
            for &(r, s) in &ns.coords {
                assert!(r >= -1.0 - 1e-12 && s >= -1.0 - 1e-12 && r + s <= 1e-12);
            }
            let mut count = vec![0usize; ns.len()];
            for f in &ns.face_indices {
                assert_eq!(f.len(), n + 1);
                for &i in f {
                    count[i] += 1;
                }
            }
            assert_eq!(count.iter().filter(|&&c| c == 2).count(), 3);
            assert!(count.iter().all(|&c| c <= 2));
        }
    }

    #[test]
    fn vandermonde_condition_is_moderate() {
        for n in 1..=MAX_DEGREE {
            let ns = build_node_set(n).unwrap();
            let v = vandermonde_2d(n, &ns.r(), &ns.s());
            let sv = v.singular_values();
            let cond = sv.max() / sv.min();
            assert!(cond.is_finite() && cond < 1e8, "N={n}: cond {cond}");
        }
    }

    #[test]
    fn degree_out_of_range_is_rejected() {
        assert!(matches!(build_node_set(0), Err(Error::Config(_))));
        assert!(matches!(build_node_set(11), Err(Error::Config(_))));
    }
}
