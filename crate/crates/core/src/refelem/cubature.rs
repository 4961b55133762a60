//! Cubature rules on the bi-unit triangle and Gauss rules on faces.

use super::jacobi::jacobi_gq;
use crate::error::{Error, Result};

pub const MAX_CUBATURE_ORDER: usize = 40;

/// Volume cubature rule on the bi-unit triangle (area 2).
#[derive(Debug, Clone)]
pub struct CubatureRule {
    /// Highest total degree integrated exactly.
    pub order: usize,
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&(r, s), &w)| w * f(r, s))
            .sum()
    }
}

/// Exactness order, points and weights.
type RawRule = (usize, Vec<(f64, f64)>, Vec<f64>);

// Symmetric rules on the unit triangle {x, y >= 0, x + y <= 1}, area 1/2:
// (barycentric-orbit points, weights). Mapped to the bi-unit triangle below.
fn tabulated(order: usize) -> Option<RawRule> {
    match order {
        1 => Some((1, vec![(1.0 / 3.0, 1.0 / 3.0)], vec![0.5])),
        2 => {
            let p = vec![
                (1.0 / 6.0, 1.0 / 6.0),
                (2.0 / 3.0, 1.0 / 6.0),
                (1.0 / 6.0, 2.0 / 3.0),
            ];
            Some((2, p, vec![1.0 / 6.0; 3]))
        }
        3..=5 => {
            let sq15 = 15f64.sqrt();
            let a1 = (6.0 - sq15) / 21.0;
            let a2 = (6.0 + sq15) / 21.0;
            let wa = (155.0 - sq15) / 2400.0;
            let wb = (155.0 + sq15) / 2400.0;
            let p = vec![
                (1.0 / 3.0, 1.0 / 3.0),
                (a1, a1),
                (1.0 - 2.0 * a1, a1),
                (a1, 1.0 - 2.0 * a1),
                (a2, a2),
                (1.0 - 2.0 * a2, a2),
                (a2, 1.0 - 2.0 * a2),
            ];
            Some((5, p, vec![9.0 / 80.0, wa, wa, wa, wb, wb, wb]))
        }
        _ => None,
    }
}

/// Collapsed-coordinate Gauss rule exact for total degree `order`.
fn collapsed(order: usize) -> CubatureRule {
    let q = order / 2 + 1;
    let (a, wa) = jacobi_gq(0.0, 0.0, q);
    let (b, wb) = jacobi_gq(1.0, 0.0, q);
    let mut points = Vec::with_capacity(q * q);
    let mut weights = Vec::with_capacity(q * q);
    for j in 0..q {
        for i in 0..q {
            let r = 0.5 * (1.0 + a[i]) * (1.0 - b[j]) - 1.0;
            points.push((r, b[j]));
            weights.push(0.5 * wa[i] * wb[j]);
        }
    }
    CubatureRule {
        order: 2 * q - 1,
        points,
        weights,
    }
}

/// Returns a positive-weight cubature rule exact for polynomials of total degree `order`.
pub fn build_cubature(order: usize) -> Result<CubatureRule> {
    if order == 0 || order > MAX_CUBATURE_ORDER {
        return Err(Error::Config(format!(
            "cubature order {order} outside supported range 1..={MAX_CUBATURE_ORDER}"
        )));
    }
    if let Some((exact, pts, w)) = tabulated(order) {
        return Ok(CubatureRule {
            order: exact,
            points: pts
                .into_iter()
                .map(|(x, y)| (2.0 * x - 1.0, 2.0 * y - 1.0))
                .collect(),
            weights: w.into_iter().map(|w| 4.0 * w).collect(),
        });
    }
    Ok(collapsed(order))
}

/// Gauss-Legendre rule on [-1, 1] exact for degree `order`.
pub fn face_gauss(order: usize) -> (Vec<f64>, Vec<f64>) {
    jacobi_gq(0.0, 0.0, order / 2 + 1)
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Exact integral of `r^a s^b` over the bi-unit triangle, integrating `r` from
    /// -1 to -s first and then `s` over [-1, 1].
    pub fn monomial_integral(a: usize, b: usize) -> f64 {
        let line = |m: usize| {
            if m.is_multiple_of(2) {
                2.0 / (m as f64 + 1.0)
            } else {
                0.0
            }
        };
        let sign = if (a + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (line(a + b + 1) - line(b)) / (a as f64 + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::monomial_integral;
    use super::*;

    #[test]
    fn order_one_is_centroid_rule() {
        let c = build_cubature(1).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.points[0].0 + 1.0 / 3.0).abs() < 1e-15);
        assert!((c.points[0].1 + 1.0 / 3.0).abs() < 1e-15);
        assert!((c.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_exact_on_monomials() {
        for order in 1..=24 {
            let c = build_cubature(order).unwrap();
            assert!(c.order >= order);
            assert!(c.weights.iter().all(|&w| w > 0.0));
            assert!((c.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
            for a in 0..=order {
                for b in 0..=(order - a) {
                    let q = c.integrate(|r, s| r.powi(a as i32) * s.powi(b as i32));
                    let e = monomial_integral(a, b);
                    assert!(
                        (q - e).abs() < 1e-12,
                        "order {order}: r^{a} s^{b}: {q} vs {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn order_six_on_r2s2() {
        let c = build_cubature(6).unwrap();
        let q = c.integrate(|r, s| r * r * s * s);
        // symbolic value of the integral is 2/9
        assert!((q - monomial_integral(2, 2)).abs() < 1e-13);
        assert!((monomial_integral(2, 2) - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_order_is_rejected() {
        assert!(build_cubature(0).is_err());
        assert!(build_cubature(MAX_CUBATURE_ORDER + 1).is_err());
    }
}
