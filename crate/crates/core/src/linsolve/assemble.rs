use nalgebra::DMatrix;

use super::SparseMatrix;
use crate::dgops::{EllipticBc, EllipticKind};
use crate::error::Result;
use crate::mesh::{Connectivity, Geometry};
use crate::refelem::ReferenceElement;

struct ElementOps {
    dx: DMatrix<f64>,
    dy: DMatrix<f64>,
}

fn element_ops(re: &ReferenceElement, geom: &Geometry, e: usize) -> ElementOps {
    let dr = re.dr.to_dmatrix();
    let ds = re.ds.to_dmatrix();
    ElementOps {
        dx: &dr * geom.rx[e] + &ds * geom.sx[e],
        dy: &dr * geom.ry[e] + &ds * geom.sy[e],
    }
}

/// Rows of `op` at the given nodes.
fn select_rows(op: &DMatrix<f64>, nodes: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(nodes.len(), op.ncols(), |i, j| op[(nodes[i], j)])
}

fn selection(np: usize, nodes: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(
        nodes.len(),
        np,
        |i, j| if nodes[i] == j { 1.0 } else { 0.0 },
    )
}

/// Explicit SIPDG matrix, equal to the matrix-free operator with homogeneous
/// boundary mirroring. Volume blocks are `J (Dx^T M Dx + Dy^T M Dy) + lambda J M`;
/// each face contributes the symmetric consistency and penalty terms.
pub fn assemble_sipdg(
    re: &ReferenceElement,
    geom: &Geometry,
    conn: &Connectivity,
    lambda: f64,
    bc: EllipticBc,
) -> Result<SparseMatrix> {
    let mut trip = Vec::with_capacity(geom.k * 4 * re.np * re.np);
    assemble_into(re, geom, conn, lambda, bc, true, |i, j, v| {
        trip.push((i, j, v))
    });
    SparseMatrix::from_triplets(geom.k * re.np, trip)
}

/// Diagonal of the SIPDG matrix without assembling the off-diagonal blocks.
pub fn sipdg_diagonal(
    re: &ReferenceElement,
    geom: &Geometry,
    conn: &Connectivity,
    lambda: f64,
    bc: EllipticBc,
) -> Vec<f64> {
    let mut d = vec![0.0; geom.k * re.np];
    assemble_into(re, geom, conn, lambda, bc, false, |i, j, v| {
        if i == j {
            d[i] += v
        }
    });
    d
}

fn assemble_into(
    re: &ReferenceElement,
    geom: &Geometry,
    conn: &Connectivity,
    lambda: f64,
    bc: EllipticBc,
    off_diagonal: bool,
    mut sink: impl FnMut(usize, usize, f64),
) {
    let (np, nfp) = (re.np, re.nfp);
    let mass = re.mass.to_dmatrix();
    let fmass = re.face_mass.to_dmatrix();
    let ops: Vec<ElementOps> = (0..geom.k).map(|e| element_ops(re, geom, e)).collect();
    let mut push = |e: usize, nb: usize, b: &DMatrix<f64>| {
        for i in 0..np {
            for j in 0..np {
                let v = b[(i, j)];
                if v != 0.0 {
                    sink(e * np + i, nb * np + j, v);
                }
            }
        }
    };
    for e in 0..geom.k {
        let o = &ops[e];
        let jac = geom.jac[e];
        let mut diag = (o.dx.transpose() * &mass * &o.dx + o.dy.transpose() * &mass * &o.dy) * jac
            + &mass * (lambda * jac);
        for f in 0..3 {
            let fid = 3 * e + f;
            let (nx, ny, tau) = (geom.nx[fid], geom.ny[fid], geom.tau[fid]);
            let mf = &fmass * geom.sj[fid];
            let nodes = re.face_nodes(f);
            let sel = selection(np, nodes);
            let dn = &o.dx * nx + &o.dy * ny;
            let sdn = select_rows(&dn, nodes);
            let smf = sel.transpose() * &mf;
            let (cons, sym, pen) = (&smf * &sdn, sdn.transpose() * &mf * &sel, &smf * &sel);
            match conn.bc[fid].map(|t| bc.kind(t)) {
                None => {
                    diag += (&cons + &sym) * -0.5 + &pen * tau;
                    if !off_diagonal {
                        continue;
                    }
                    let nb = conn.etoe[e][f];
                    let nodes_p: Vec<usize> = (0..nfp)
                        .map(|j| conn.id_p[conn.trace(e, f, j)] - nb * np)
                        .collect();
                    let sel_p = selection(np, &nodes_p);
                    let dn_p = &ops[nb].dx * nx + &ops[nb].dy * ny;
                    let sdn_p = select_rows(&dn_p, &nodes_p);
                    let off = &smf * &sdn_p * -0.5 + sdn.transpose() * &mf * &sel_p * 0.5
                        - &smf * &sel_p * tau;
                    push(e, nb, &off);
                }
                Some(EllipticKind::Dirichlet) => {
                    diag += (&cons + &sym) * -1.0 + &pen * (2.0 * tau);
                }
                Some(EllipticKind::Neumann) => {}
            }
        }
        push(e, e, &diag);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgops::testutil::*;
    use crate::dgops::{elliptic_apply, ScalarField};
    use crate::mesh::BoundaryTag::*;

    fn check_against_matrix_free(s: &Setup, lambda: f64, bc: EllipticBc) {
        let a = assemble_sipdg(&s.re, &s.geom, &s.conn, lambda, bc).unwrap();
        let n = a.n;
        let mut y = vec![0.0; n];
        for seed in 0..20 {
            let u = random_field(s.geom.k, s.re.np, seed);
            let r = elliptic_apply(&u, lambda, bc, &s.geom, &s.conn, &s.re).unwrap();
            a.matvec(&u.values, &mut y);
            let scale = r.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                assert!(
                    (y[i] - r.values[i]).abs() <= 1e-11 * scale,
                    "{} vs {}",
                    y[i],
                    r.values[i]
                );
            }
        }
    }

    #[test]
    fn matches_matrix_free_on_random_vectors() {
        let s = perturbed(
            2,
            2,
            2,
            [DirichletInflow, NeumannOutflow, Wall, DirichletInflow],
            3,
        );
        assert_eq!(s.geom.k, 8);
        check_against_matrix_free(&s, 0.0, EllipticBc::VELOCITY);
        check_against_matrix_free(&s, 2.5, EllipticBc::PRESSURE);
        let s = perturbed(3, 3, 2, [DirichletInflow; 4], 5);
        check_against_matrix_free(&s, 0.7, EllipticBc::ALL_NEUMANN);
    }

    #[test]
    fn matches_unit_vectors() {
        let s = perturbed(
            1,
            2,
            2,
            [
                DirichletInflow,
                NeumannOutflow,
                DirichletInflow,
                DirichletInflow,
            ],
            1,
        );
        let a = assemble_sipdg(&s.re, &s.geom, &s.conn, 1.0, EllipticBc::VELOCITY).unwrap();
        let dense = a.to_dense();
        for j in 0..a.n {
            let mut e = ScalarField::zeros(s.geom.k, s.re.np);
            e.values[j] = 1.0;
            let col =
                elliptic_apply(&e, 1.0, EllipticBc::VELOCITY, &s.geom, &s.conn, &s.re).unwrap();
            for i in 0..a.n {
                assert!((dense[(i, j)] - col.values[i]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn symmetric_and_neumann_rows_sum_to_zero() {
        let s = perturbed(2, 3, 3, [DirichletInflow; 4], 9);
        let a = assemble_sipdg(&s.re, &s.geom, &s.conn, 0.0, EllipticBc::ALL_NEUMANN).unwrap();
        let scale = a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(a.symmetry_defect() <= 1e-12);
        let mut y = vec![0.0; a.n];
        a.matvec(&vec![1.0; a.n], &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-11 * scale));
    }

    #[test]
    fn diagonal_matches_assembly() {
        let s = perturbed(3, 2, 3, [DirichletInflow, NeumannOutflow, Wall, Wall], 2);
        let a = assemble_sipdg(&s.re, &s.geom, &s.conn, 0.3, EllipticBc::VELOCITY).unwrap();
        let d = sipdg_diagonal(&s.re, &s.geom, &s.conn, 0.3, EllipticBc::VELOCITY);
        for (x, y) in a.diagonal().iter().zip(&d) {
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }
}
