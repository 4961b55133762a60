//! Orthonormal Jacobi polynomials, Gauss quadrature and the orthonormal
//! (Proriol-Koornwinder-Dubiner) basis on the bi-unit triangle.

use nalgebra::{DMatrix, SymmetricEigen};

fn gamma(x: f64) -> f64 {
    // Lanczos approximation, accurate to ~1e-15 for the small arguments used here.
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let t = x + G + 0.5;
        let mut a = C[0];
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Orthonormal Jacobi polynomial `P_n^{(alpha,beta)}(x)` on [-1, 1].
pub fn jacobi_p(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    let gamma0 = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 1.0)
        * gamma(alpha + 1.0)
        * gamma(beta + 1.0)
        / gamma(alpha + beta + 1.0);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
    let p1 = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold =
        2.0 / (2.0 + alpha + beta) * ((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0)).sqrt();
    let (mut pm1, mut p) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + alpha + beta;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) * (i + 1.0 + beta)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let next = (-aold * pm1 + (x - bnew) * p) / anew;
        pm1 = p;
        p = next;
        aold = anew;
    }
    p
}

/// Derivative of the orthonormal Jacobi polynomial.
pub fn grad_jacobi_p(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let nf = n as f64;
        (nf * (nf + alpha + beta + 1.0)).sqrt() * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1)
    }
}

/// Gauss-Jacobi points and weights (Golub-Welsch), `n` points.
pub fn jacobi_gq(alpha: f64, beta: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (
            vec![-(alpha - beta) / (alpha + beta + 2.0)],
            vec![
                2f64.powf(alpha + beta + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0)
                    / gamma(alpha + beta + 2.0),
            ],
        );
    }
    let m = n - 1;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..=m {
        let h1 = 2.0 * i as f64 + alpha + beta;
        let diag = if h1.abs() < 1e-14 {
            0.0
        } else {
            -(alpha * alpha - beta * beta) / (h1 + 2.0) / h1
        };
        j[(i, i)] = diag;
        if i < m {
            let k = (i + 1) as f64;
            let off = 2.0 / (h1 + 2.0)
                * (k * (k + alpha + beta) * (k + alpha) * (k + beta) / (h1 + 1.0) / (h1 + 3.0))
                    .sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mu0 = 2f64.powf(alpha + beta + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0)
        / gamma(alpha + beta + 2.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0 * mu0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss-Lobatto-Jacobi points, `n + 1` points including the end points.
pub fn jacobi_gl(alpha: f64, beta: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-1.0, 1.0];
    }
    let (inner, _) = jacobi_gq(alpha + 1.0, beta + 1.0, n - 1);
    let mut x = Vec::with_capacity(n + 1);
    x.push(-1.0);
    x.extend(inner);
    x.push(1.0);
    x
}

/// 1D Legendre Vandermonde matrix `V_ij = P_j(x_i)` for degree `n`.
pub fn vandermonde_1d(n: usize, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), n + 1, |i, j| jacobi_p(x[i], 0.0, 0.0, j))
}

/// Collapsed coordinates of a point on the bi-unit triangle.
pub fn rs_to_ab(r: f64, s: f64) -> (f64, f64) {
    let a = if (s - 1.0).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    (a, s)
}

/// Orthonormal triangle basis function `(i, j)` at collapsed coordinates.
pub fn simplex_2d_p(a: f64, b: f64, i: usize, j: usize) -> f64 {
    let h1 = jacobi_p(a, 0.0, 0.0, i);
    let h2 = jacobi_p(b, 2.0 * i as f64 + 1.0, 0.0, j);
    std::f64::consts::SQRT_2 * h1 * h2 * (1.0 - b).powi(i as i32)
}

/// Gradient `(d/dr, d/ds)` of the orthonormal basis function `(i, j)`.
pub fn grad_simplex_2d_p(a: f64, b: f64, id: usize, jd: usize) -> (f64, f64) {
    let fa = jacobi_p(a, 0.0, 0.0, id);
    let dfa = grad_jacobi_p(a, 0.0, 0.0, id);
    let gb = jacobi_p(b, 2.0 * id as f64 + 1.0, 0.0, jd);
    let dgb = grad_jacobi_p(b, 2.0 * id as f64 + 1.0, 0.0, jd);
    let half_1mb = 0.5 * (1.0 - b);

    let mut dr = dfa * gb;
    let mut ds = dfa * (gb * (0.5 * (1.0 + a)));
    if id > 0 {
        let f = half_1mb.powi(id as i32 - 1);
        dr *= f;
        ds *= f;
    }
    let mut tmp = dgb * half_1mb.powi(id as i32);
    if id > 0 {
        tmp -= 0.5 * id as f64 * gb * half_1mb.powi(id as i32 - 1);
    }
    ds += fa * tmp;
    let scale = 2f64.powf(id as f64 + 0.5);
    (dr * scale, ds * scale)
}

/// Iterates the `(i, j)` index pairs of the degree-`n` orthonormal basis in a fixed order.
pub fn basis_indices(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |i| (0..=(n - i)).map(move |j| (i, j)))
}

/// Generalised Vandermonde matrix of the orthonormal basis at points `(r, s)`.
pub fn vandermonde_2d(n: usize, r: &[f64], s: &[f64]) -> DMatrix<f64> {
    let idx: Vec<_> = basis_indices(n).collect();
    DMatrix::from_fn(r.len(), idx.len(), |p, m| {
        let (a, b) = rs_to_ab(r[p], s[p]);
        simplex_2d_p(a, b, idx[m].0, idx[m].1)
    })
}

/// Gradient Vandermonde matrices `(V_r, V_s)` at points `(r, s)`.
pub fn grad_vandermonde_2d(n: usize, r: &[f64], s: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let idx: Vec<_> = basis_indices(n).collect();
    let mut vr = DMatrix::zeros(r.len(), idx.len());
    let mut vs = DMatrix::zeros(r.len(), idx.len());
    for p in 0..r.len() {
        let (a, b) = rs_to_ab(r[p], s[p]);
        for (m, &(i, j)) in idx.iter().enumerate() {
            let (dr, ds) = grad_simplex_2d_p(a, b, i, j);
            vr[(p, m)] = dr;
            vs[(p, m)] = ds;
        }
    }
    (vr, vs)
}
