use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Gauss–Legendre rule on `[0,1]`; exact for polynomials of degree
/// `2·len − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.len() - 1
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Errors unless the rule integrates degree `degree` exactly.
    pub fn require_degree(&self, degree: usize) -> Result<()> {
        let need = points_for_degree(degree);
        if self.len() < need {
            return Err(Error::QuadratureTooLow { have: self.len(), need, degree });
        }
        Ok(())
    }
}

/// Fewest Gauss points integrating degree `degree` exactly.
pub fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// `n`-point Gauss–Legendre rule on `[0,1]`, nodes ascending.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("quadrature needs at least one point"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        // Newton on P_n over [-1,1] from the asymptotic root guess
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut pp = 0.0;
        for it in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-16 * (1.0 + z.abs()) || it == 99 {
                // one last derivative evaluation at the converged point
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = nf * (z * p1 - p2) / (z * z - 1.0);
                break;
            }
        }
        let w = 1.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_nodes_ascend() {
        for n in [1, 2, 7, 40, 123] {
            let r = gauss_rule(n).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n={n} sum={s}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn monomials_are_exact_up_to_the_design_degree() {
        let r = gauss_rule(6).unwrap();
        for k in 0..=11 {
            let v = r.integrate(|x| libm::pow(x, k as f64));
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
