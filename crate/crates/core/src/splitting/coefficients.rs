use crate::error::{Error, Result};

/// BDF weights for the implicit part and extrapolation weights for the explicit
/// part: `gamma U^{n+1} = sum beta_i U^{n-i} - dt sum alpha_i N^{n-i} + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCoefficients {
    pub order: usize,
    pub gamma: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
}

pub fn scheme_coefficients(order: usize) -> Result<SchemeCoefficients> {
    let (gamma, beta, alpha) = match order {
        1 => (1.0, vec![1.0], vec![1.0]),
        2 => (1.5, vec![2.0, -0.5], vec![2.0, -1.0]),
        3 => (11.0 / 6.0, vec![3.0, -1.5, 1.0 / 3.0], vec![3.0, -3.0, 1.0]),
        _ => {
            return Err(Error::Config(format!(
                "time integration order must be 1, 2 or 3, got {order}"
            )))
        }
    };
    Ok(SchemeCoefficients {
        order,
        gamma,
        beta,
        alpha,
    })
}

/// Weights `c_k` with `sigma^J P^n = sum_k c_k P^{n-k}`, the extrapolation of
/// `P^{n+1}` that the order-`J` pressure increment corrects.
pub fn pressure_extrapolation(j: usize) -> Vec<f64> {
    // sigma^J = 1 - (1 - E^{-1})^J applied at n+1
    let mut c = vec![0.0; j];
    let mut binom = 1.0;
    for k in 1..=j {
        binom = binom * (j + 1 - k) as f64 / k as f64;
        c[k - 1] = if k % 2 == 1 { binom } else { -binom };
    }
    c
}

/// Lagrange basis weights at `t` for the nodes `times`.
pub fn lagrange_weights(times: &[f64], t: f64) -> Vec<f64> {
    (0..times.len())
        .map(|i| {
            times
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &tj)| (t - tj) / (times[i] - tj))
                .product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_for_all_orders() {
        for s in 1..=3 {
            let c = scheme_coefficients(s).unwrap();
            assert_eq!(c.beta.len(), s);
            assert!((c.beta.iter().sum::<f64>() - c.gamma).abs() < 1e-14);
            assert!((c.alpha.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert!(scheme_coefficients(0).is_err());
        assert!(scheme_coefficients(4).is_err());
    }

    #[test]
    fn bdf_order_conditions() {
        // gamma u(t+dt) - sum beta_i u(t - i dt) = dt u'(t+dt) + O(dt^{S+1}) for
        // polynomials of degree <= S; extrapolation exact for degree < S.
        for s in 1..=3 {
            let c = scheme_coefficients(s).unwrap();
            for p in 0..=s as i32 {
                let lhs = c.gamma * 1.0f64.powi(p)
                    - c.beta
                        .iter()
                        .enumerate()
                        .map(|(i, b)| b * (-(i as f64)).powi(p))
                        .sum::<f64>();
                let rhs = if p == 0 { 0.0 } else { p as f64 };
                assert!((lhs - rhs).abs() < 1e-12, "S={s} p={p}");
            }
            for p in 0..s as i32 {
                let ext: f64 = c
                    .alpha
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * (-(i as f64)).powi(p))
                    .sum();
                assert!((ext - 1.0).abs() < 1e-12, "S={s} p={p}");
            }
        }
    }

    #[test]
    fn second_order_values() {
        let c = scheme_coefficients(2).unwrap();
        assert_eq!(c.gamma, 1.5);
        assert_eq!(c.beta, vec![2.0, -0.5]);
        assert_eq!(c.alpha, vec![2.0, -1.0]);
        let c = scheme_coefficients(1).unwrap();
        assert_eq!((c.gamma, c.beta[0], c.alpha[0]), (1.0, 1.0, 1.0));
    }

    #[test]
    fn pressure_extrapolation_weights() {
        assert!(pressure_extrapolation(0).is_empty());
        assert_eq!(pressure_extrapolation(1), vec![1.0]);
        assert_eq!(pressure_extrapolation(2), vec![2.0, -1.0]);
        assert_eq!(pressure_extrapolation(3), vec![3.0, -3.0, 1.0]);
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let t = [1.0, 0.5, 0.0];
        let w = lagrange_weights(&t, 1.3);
        let f = |x: f64| 2.0 - x + 3.0 * x * x;
        let v: f64 = w.iter().zip(&t).map(|(w, &x)| w * f(x)).sum();
        assert!((v - f(1.3)).abs() < 1e-13);
        assert_eq!(lagrange_weights(&[0.2], 5.0), vec![1.0]);
    }
}
