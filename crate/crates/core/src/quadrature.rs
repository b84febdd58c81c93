//! Composite Gauss-Legendre quadrature on (0, R).
//!
//! Every integrand in this problem carries either a weight r (vanishing at 0)
//! or a u^2/r term with u(0) = 0, so a rule whose nodes are strictly interior
//! sidesteps the 0/0 evaluation at the origin entirely. Gauss nodes never
//! touch the panel endpoints, which gives exactly that.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

/// Nodes and weights for integration over (0, R).
///
/// Invariants: nodes strictly increasing and strictly inside (0, R);
/// weights positive, summing to R within 1e-12 * R.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_count: usize,
    nodes_per_panel: usize,
}

impl QuadratureRule {
    /// Radii at which integrands are evaluated.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weight attached to each node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of equal panels the domain was split into.
    pub fn panel_count(&self) -> usize {
        self.panel_count
    }

    /// Gauss points per panel.
    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    /// Upper end of the integration domain.
    pub fn domain_end(&self) -> f64 {
        // Weights sum to R by construction.
        self.weights.iter().sum()
    }
}

/// Default panel count for a basis of dimension n: sine modes up to frequency
/// n*pi/R need a few nodes per half-wave.
pub fn default_panel_count(n: usize) -> usize {
    n.max(8)
}

/// Default Gauss points per panel.
pub const DEFAULT_NODES_PER_PANEL: usize = 16;

/// Builds a composite Gauss-Legendre rule on [0, R] with `panel_count` equal
/// panels of `nodes_per_panel` points each. Exact for polynomials of degree
/// <= 2 * nodes_per_panel - 1 on each panel.
pub fn build_rule(r: f64, panel_count: usize, nodes_per_panel: usize) -> Result<QuadratureRule> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("domain radius R must be positive"));
    }
    if panel_count < 1 {
        return Err(Error::InvalidArgument("panel_count must be at least 1"));
    }
    if nodes_per_panel < 2 {
        return Err(Error::InvalidArgument("nodes_per_panel must be at least 2"));
    }

    let (x, w) = gauss_legendre(nodes_per_panel);
    let h = r / panel_count as f64;
    let mut nodes = Vec::with_capacity(panel_count * nodes_per_panel);
    let mut weights = Vec::with_capacity(panel_count * nodes_per_panel);
    for p in 0..panel_count {
        let a = p as f64 * h;
        for i in 0..nodes_per_panel {
            nodes.push(a + (x[i] + 1.0) * 0.5 * h);
            weights.push(w[i] * 0.5 * h);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        panel_count,
        nodes_per_panel,
    })
}

/// Integrates f over (0, R) as a weighted node sum. Errors if f is non-finite
/// at any node, naming the offending radius.
pub fn integrate(rule: &QuadratureRule, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    let mut s = 0.0;
    for (&r, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let v = f(r);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "integrand",
                at: r,
            });
        }
        s += w * v;
    }
    Ok(s)
}

/// Gauss-Legendre nodes and weights on (-1, 1), ascending.
///
/// Newton iteration on the Legendre three-term recurrence; the asymptotic
/// cosine guess converges in a handful of steps for any practical n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // p holds P_n(z), pm1 holds P_{n-1}(z) after the loop.
            let mut p = 1.0;
            let mut pm1 = 0.0;
            for k in 0..n {
                let pm2 = pm1;
                pm1 = p;
                p = ((2 * k + 1) as f64 * z * pm1 - k as f64 * pm2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if math::abs(dz) < 1e-15 {
                break;
            }
        }
        // Roots come out descending from the cosine guess; store mirrored.
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule_on_unit_interval() {
        // Nodes (3 +- sqrt(3))/6, weights 1/2 each.
        let rule = build_rule(1.0, 1, 2).unwrap();
        let s3 = 3.0_f64.sqrt();
        assert!((rule.nodes()[0] - (3.0 - s3) / 6.0).abs() < 1e-15);
        assert!((rule.nodes()[1] - (3.0 + s3) / 6.0).abs() < 1e-15);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights()[1] - 0.5).abs() < 1e-15);
        // 2-point Gauss integrates cubics exactly: int_0^1 x^3 = 1/4.
        let v = integrate(&rule, |x| x * x * x).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_domain_length() {
        for (r, p, n) in [(20.0, 20, 16), (1.0, 8, 16), (100.0, 13, 7)] {
            let rule = build_rule(r, p, n).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - r).abs() <= 1e-12 * r, "R={r} sum={sum}");
            let one = integrate(&rule, |_| 1.0).unwrap();
            assert!((one - r).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn nodes_strictly_interior_and_increasing() {
        let rule = build_rule(20.0, 20, 16).unwrap();
        let nodes = rule.nodes();
        assert!(nodes[0] > 0.0);
        assert!(*nodes.last().unwrap() < 20.0);
        for pair in nodes.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn linear_and_cubic_exactness() {
        let rule = build_rule(20.0, 8, 16).unwrap();
        let v = integrate(&rule, |r| r).unwrap();
        assert!((v - 200.0).abs() < 1e-12 * 200.0);
        let rule2 = build_rule(2.0, 1, 2).unwrap();
        let v2 = integrate(&rule2, |r| r * r * r).unwrap();
        assert!((v2 - 4.0).abs() < 1e-13 * 4.0);
    }

    #[test]
    fn high_degree_polynomial_exactness() {
        // 16-point Gauss is exact through degree 31 on a single panel.
        let rule = build_rule(1.0, 1, 16).unwrap();
        let v = integrate(&rule, |x| x.powi(31)).unwrap();
        assert!((v - 1.0 / 32.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_sine_square_matches_antiderivative() {
        // int_0^R r sin^2(pi r/R) dr = R^2/4.
        let r_dom = 20.0;
        let rule = build_rule(r_dom, 20, 16).unwrap();
        let v = integrate(&rule, |r| {
            r * (core::f64::consts::PI * r / r_dom).sin().powi(2)
        })
        .unwrap();
        assert!((v - 100.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_r_term_stable_under_refinement() {
        // sin^2(j pi r/R)/r is finite at every interior node; doubling the
        // panel count must not move the value at the default resolution.
        let r_dom = 20.0;
        let coarse = build_rule(r_dom, 20, 16).unwrap();
        let fine = build_rule(r_dom, 40, 16).unwrap();
        for j in 1..=20 {
            let f = |r: f64| {
                let s = (j as f64 * core::f64::consts::PI * r / r_dom).sin();
                s * s / r
            };
            let a = integrate(&coarse, f).unwrap();
            let b = integrate(&fine, f).unwrap();
            assert!(
                (a - b).abs() <= 1e-10 * a.abs(),
                "j={j} coarse={a} fine={b}"
            );
        }
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let rule = build_rule(5.0, 4, 8).unwrap();
        assert_eq!(integrate(&rule, |_| 0.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(build_rule(0.0, 8, 16).is_err());
        assert!(build_rule(-1.0, 8, 16).is_err());
        assert!(build_rule(20.0, 0, 16).is_err());
        assert!(build_rule(20.0, 8, 1).is_err());
    }

    #[test]
    fn non_finite_integrand_names_node() {
        let rule = build_rule(1.0, 1, 4).unwrap();
        let bad = rule.nodes()[2];
        let err = integrate(&rule, |r| if r == bad { f64::NAN } else { 1.0 }).unwrap_err();
        match err {
            Error::NonFinite { at, .. } => assert_eq!(at, bad),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn gauss_nodes_symmetric_for_odd_count() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[0] - w[4]).abs() < 1e-15);
        assert!((x[0] + x[4]).abs() < 1e-15);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }
}
