//! Action, constraint, and diagnostic functionals of a profile.
//!
//! All integrals run over the basis quadrature rule with u, u_r, u_rr taken
//! from the cached node tables, so the gradient returned here is the exact
//! derivative of the discretized action, not a discretization of the
//! continuous gradient. That distinction is what makes the finite-difference
//! agreement checks tight.
//!
//! sums computed here (R the domain radius, m the vortex number, alpha the
//! saturation parameter):
//!   action   I(u) = 1/2 int_0^R [ r u_r^2 + (m^2/r) u^2 + (r/alpha) ln(1 + alpha u^2) ] dr
//!   energy   E(u) = int_0^R [ r u_r^2 + (m^2/r) u^2 ] dr
//!   flux     P(u) = 2 pi int_0^R r u^2 dr
//! Since ln(1 + x) <= x, the action obeys I <= E/2 + P/(4 pi) for every
//! profile; a property test pins that chain.

use crate::basis::{BasisSet, Profile};
use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Objective I(u). Finite for every finite coefficient vector.
pub fn action(basis: &BasisSet, profile: &Profile) -> Result<f64> {
    let spec = basis.spec();
    let (u, ur) = basis.node_samples(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let (m_sq, alpha) = (spec.m_sq(), spec.alpha);
    let mut s = 0.0;
    for q in 0..nodes.len() {
        let r = nodes[q];
        s += weights[q]
            * (r * ur[q] * ur[q]
                + (m_sq / r) * u[q] * u[q]
                + (r / alpha) * math::ln_1p(alpha * u[q] * u[q]));
    }
    let s = 0.5 * s;
    if !s.is_finite() {
        return Err(non_finite("action", basis, &u, &ur));
    }
    Ok(s)
}

/// Quadratic part E(u); appears in the Poincare ratio and the action chain
/// bound.
pub fn energy(basis: &BasisSet, profile: &Profile) -> Result<f64> {
    let spec = basis.spec();
    let (u, ur) = basis.node_samples(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let m_sq = spec.m_sq();
    let mut s = 0.0;
    for q in 0..nodes.len() {
        let r = nodes[q];
        s += weights[q] * (r * ur[q] * ur[q] + (m_sq / r) * u[q] * u[q]);
    }
    if !s.is_finite() {
        return Err(non_finite("energy", basis, &u, &ur));
    }
    Ok(s)
}

/// Flux P(u) evaluated by quadrature. In exact arithmetic this equals
/// `profile.flux()`; the difference is a quadrature consistency diagnostic.
pub fn flux(basis: &BasisSet, profile: &Profile) -> Result<f64> {
    let (u, _) = basis.node_samples(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let mut s = 0.0;
    for q in 0..nodes.len() {
        s += weights[q] * nodes[q] * u[q] * u[q];
    }
    let s = 2.0 * PI * s;
    if !s.is_finite() {
        return Err(non_finite("flux", basis, &u, &u));
    }
    Ok(s)
}

/// Exact gradient of the discretized action with respect to the orthonormal
/// coefficients: dI/dc_j = int [ r u_r psi_j' + (m^2/r) u psi_j
/// + r u psi_j / (1 + alpha u^2) ] dr.
pub fn action_gradient(basis: &BasisSet, profile: &Profile) -> Result<Vec<f64>> {
    let spec = basis.spec();
    let (u, ur) = basis.node_samples(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let (m_sq, alpha) = (spec.m_sq(), spec.alpha);
    let nq = nodes.len();
    // a multiplies psi_j, b multiplies psi_j'.
    let mut a = alloc::vec![0.0; nq];
    let mut b = alloc::vec![0.0; nq];
    for q in 0..nq {
        let r = nodes[q];
        a[q] = weights[q] * ((m_sq / r) * u[q] + r * u[q] / (1.0 + alpha * u[q] * u[q]));
        b[q] = weights[q] * r * ur[q];
    }
    let g = basis.accumulate_inner(&a, &b);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(non_finite("action gradient", basis, &u, &ur));
    }
    Ok(g)
}

/// Propagation constant from the integral identity
/// beta = -(2 pi / P) int [ r u_r^2 + (m^2/r) u^2 + r u^2/(1 + alpha u^2) ] dr
/// with P evaluated by quadrature. Zero flux leaves beta undefined.
pub fn beta_from_profile(basis: &BasisSet, profile: &Profile) -> Result<f64> {
    let spec = basis.spec();
    let (u, ur) = basis.node_samples(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let (m_sq, alpha) = (spec.m_sq(), spec.alpha);
    let mut num = 0.0;
    let mut p = 0.0;
    for q in 0..nodes.len() {
        let r = nodes[q];
        let usq = u[q] * u[q];
        num += weights[q] * (r * ur[q] * ur[q] + (m_sq / r) * usq + r * usq / (1.0 + alpha * usq));
        p += weights[q] * r * usq;
    }
    let p = 2.0 * PI * p;
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(
            "beta undefined for zero-flux profile",
        ));
    }
    let beta = -(2.0 * PI) * num / p;
    if !beta.is_finite() {
        return Err(non_finite("beta", basis, &u, &ur));
    }
    Ok(beta)
}

/// Same quantity through the stationarity route: beta = -2 pi (g . c)/(c . c)
/// with g the action gradient. At a constrained minimizer the two routes
/// agree to rounding; away from one they differ by the quadrature flux gap
/// only, since g . c collapses to the beta integrand sum exactly.
pub fn beta_from_gradient(basis: &BasisSet, profile: &Profile) -> Result<f64> {
    let g = action_gradient(basis, profile)?;
    let c_sq = math::dot(&profile.coeffs, &profile.coeffs);
    if !(c_sq > 0.0) {
        return Err(Error::InvalidArgument(
            "beta undefined for zero-flux profile",
        ));
    }
    Ok(-(2.0 * PI) * math::dot(&g, &profile.coeffs) / c_sq)
}

/// Residual of the strong-form radial equation, weighted and squared:
/// delta_beta = int_0^R [ (u_r + r u_rr) - (m^2/r) u
///                        - r u/(1 + alpha u^2) - beta r u ]^2 dr.
/// Zero exactly on a solution of the continuous problem; small on a
/// converged Galerkin minimizer.
pub fn residual_delta_beta(basis: &BasisSet, profile: &Profile, beta: f64) -> Result<f64> {
    let spec = basis.spec();
    let (u, ur) = basis.node_samples(profile);
    let urr = basis.node_samples_second(profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let (m_sq, alpha) = (spec.m_sq(), spec.alpha);
    let mut s = 0.0;
    for q in 0..nodes.len() {
        let r = nodes[q];
        let res = (ur[q] + r * urr[q])
            - (m_sq / r) * u[q]
            - r * u[q] / (1.0 + alpha * u[q] * u[q])
            - beta * r * u[q];
        s += weights[q] * res * res;
    }
    if !s.is_finite() {
        return Err(non_finite("equation residual", basis, &u, &ur));
    }
    Ok(s)
}

/// Locates the first node whose samples are non-finite, for error reporting.
fn non_finite(what: &'static str, basis: &BasisSet, u: &[f64], ur: &[f64]) -> Error {
    for (q, &r) in basis.rule().nodes().iter().enumerate() {
        if !u[q].is_finite() || !ur[q].is_finite() {
            return Error::NonFinite { what, at: r };
        }
    }
    Error::NonFinite { what, at: f64::NAN }
}
