//! Constrained minimization of the action on the flux sphere.
//!
//! In orthonormal coordinates the constraint 2 pi int r u^2 dr = P0 is the
//! sphere |c| = sqrt(P0), so the solver is Riemannian projected gradient
//! descent: step along the tangential component of -grad F, retract by
//! renormalizing onto the sphere, backtrack on F. Convergence is declared on
//! the tangential gradient norm, the quantity that vanishes exactly at KKT
//! points; objective-change tests can trigger early on plateaus.
//!
//! Two numerical details matter in practice and are covered by tests:
//!   - The trial step is the Barzilai-Borwein estimate (s.s)/(s.y) from the
//!     previous accepted move, clamped to [1e-10, 1e10], falling back to 1.0
//!     on the first iteration or when s.y <= 0. A fixed unit trial step
//!     converges too but needs several times the iterations on wide domains.
//!   - Armijo acceptance carries a floating-point slack term
//!     2 eps (|F| + |F_trial|): near the minimum the required decrease
//!     c1 t |g_t|^2 falls below the representable resolution of F, and the
//!     exact test would reject every step no matter how small.
//!
//! Positivity of the minimizer is not imposed during iteration; it is
//! verified post hoc on a fine interior grid and reported as a flag. The sign
//! is normalized so int r u dr > 0, which is free: the action and the flux
//! are even in u.

use crate::basis::{BasisSet, ProblemSpec, Profile};
use crate::error::{Error, Result};
use crate::functionals::{action, action_gradient, beta_from_profile, residual_delta_beta};
use crate::math;
use crate::quadrature::{build_rule, default_panel_count, DEFAULT_NODES_PER_PANEL};
use alloc::vec::Vec;

/// Iteration controls. Defaults reproduce every documented result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Iteration cap; hitting it yields converged = false, not an error.
    pub max_iters: usize,
    /// Stop when |tangential gradient| <= grad_tol * max(1, |F|).
    pub grad_tol: f64,
    /// Backtracking factor in (0, 1).
    pub step_shrink: f64,
    /// Armijo slope fraction in (0, 1).
    pub armijo_c: f64,
    /// Interior sample count for the post-hoc positivity check.
    pub positivity_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 10000,
            grad_tol: 1e-8,
            step_shrink: 0.5,
            armijo_c: 1e-4,
            positivity_grid: 2048,
        }
    }
}

impl SolverConfig {
    /// Checks the documented ranges.
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidArgument("max_iters must be at least 1"));
        }
        if !(self.grad_tol > 0.0) || !self.grad_tol.is_finite() {
            return Err(Error::InvalidArgument("grad_tol must be positive"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidArgument("step_shrink must lie in (0, 1)"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::InvalidArgument("armijo_c must lie in (0, 1)"));
        }
        if self.positivity_grid < 1 {
            return Err(Error::InvalidArgument("positivity_grid must be at least 1"));
        }
        Ok(())
    }
}

/// Output of one constrained solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Minimizer coefficients, sign-normalized so int r u dr > 0.
    pub profile: Profile,
    /// Propagation constant from the integral identity.
    pub beta: f64,
    /// Squared residual of the strong-form radial equation.
    pub delta_beta: f64,
    /// Final action value F.
    pub objective: f64,
    /// Accepted iterations performed.
    pub iterations: usize,
    /// Tangential gradient criterion met within max_iters.
    pub converged: bool,
    /// u > 0 at every interior point of the positivity grid.
    pub positive: bool,
}

/// Parabolic ring seed: projects f(r) = sqrt(30 P0/(pi R^6)) r (R - r) onto
/// the basis, then rescales to exact flux P0. f itself carries flux exactly
/// P0, so the rescale only absorbs the projection loss.
pub fn initial_guess(basis: &BasisSet) -> Result<Profile> {
    let spec = basis.spec();
    let (radius, p0) = (spec.radius, spec.p0);
    let r6 = radius * radius * radius;
    let r6 = r6 * r6;
    let amp = math::sqrt(30.0 * p0 / (core::f64::consts::PI * r6));
    let mut seed = basis.project(|r| amp * r * (radius - r))?;
    let norm = math::norm(&seed.coeffs);
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("degenerate initial guess"));
    }
    let scale = math::sqrt(p0) / norm;
    for c in seed.coeffs.iter_mut() {
        *c *= scale;
    }
    Ok(seed)
}

/// Minimizes the action on the flux sphere with default observer. See
/// [`minimize_traced`] for the iteration hook.
pub fn minimize(basis: &BasisSet, config: &SolverConfig) -> Result<SolveResult> {
    minimize_traced(basis, config, |_, _, _| {})
}

/// Full solve with an observer called at the seed and after every accepted
/// step with (iteration index, F, coefficients). Iteration index 0 is the
/// seed itself.
pub fn minimize_traced(
    basis: &BasisSet,
    config: &SolverConfig,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<SolveResult> {
    config.validate()?;
    let spec = basis.spec();
    let sqrt_p0 = math::sqrt(spec.p0);
    let n = basis.n();

    let mut c = initial_guess(basis)?.coeffs;
    let mut f = action(basis, &Profile::new(c.clone()))?;
    let mut g = action_gradient(basis, &Profile::new(c.clone()))?;
    observe(0, f, &c);

    let mut prev_c: Option<Vec<f64>> = None;
    let mut prev_g: Option<Vec<f64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let eps = f64::EPSILON;

    for k in 0..config.max_iters {
        // Tangential component of the gradient on the sphere.
        let radial = math::dot(&g, &c) / math::dot(&c, &c);
        let mut gt = alloc::vec![0.0; n];
        for j in 0..n {
            gt[j] = g[j] - radial * c[j];
        }
        let gt_norm = math::norm(&gt);
        if gt_norm <= config.grad_tol * math::abs(f).max(1.0) {
            converged = true;
            break;
        }

        // Barzilai-Borwein trial step from the previous accepted move.
        let mut t = 1.0;
        if let (Some(pc), Some(pg)) = (&prev_c, &prev_g) {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for j in 0..n {
                let s = c[j] - pc[j];
                let y = g[j] - pg[j];
                ss += s * s;
                sy += s * y;
            }
            if sy > 0.0 {
                t = (ss / sy).clamp(1e-10, 1e10);
            }
        }

        // Backtracking with rounding slack; see module header.
        let (trial, f_trial) = loop {
            let mut trial = alloc::vec![0.0; n];
            for j in 0..n {
                trial[j] = c[j] - t * gt[j];
            }
            let norm = math::norm(&trial);
            if norm > 0.0 {
                let scale = sqrt_p0 / norm;
                for v in trial.iter_mut() {
                    *v *= scale;
                }
                let f_trial = action(basis, &Profile::new(trial.clone()))?;
                let slack = 2.0 * eps * (math::abs(f) + math::abs(f_trial));
                if f_trial <= f - config.armijo_c * t * gt_norm * gt_norm + slack {
                    break (trial, f_trial);
                }
            }
            t *= config.step_shrink;
            if t < 1e-16 {
                return Err(Error::StalledSolver { iteration: k });
            }
        };

        prev_c = Some(c);
        prev_g = Some(g);
        c = trial;
        f = f_trial;
        g = action_gradient(basis, &Profile::new(c.clone()))?;
        iterations = k + 1;
        observe(iterations, f, &c);
    }

    // Sign convention: int r u dr > 0. Action, flux, beta, and the residual
    // are all even in u, so the flip is free.
    let profile = Profile::new(c);
    let (u, _) = basis.node_samples(&profile);
    let nodes = basis.rule().nodes();
    let weights = basis.rule().weights();
    let mut mass = 0.0;
    for q in 0..nodes.len() {
        mass += weights[q] * nodes[q] * u[q];
    }
    let profile = if mass < 0.0 {
        Profile::new(profile.coeffs.iter().map(|v| -v).collect())
    } else {
        profile
    };

    let beta = beta_from_profile(basis, &profile)?;
    let delta_beta = residual_delta_beta(basis, &profile, beta)?;
    let positive = is_interior_positive(basis, &profile, config.positivity_grid)?;

    Ok(SolveResult {
        profile,
        beta,
        delta_beta,
        objective: f,
        iterations,
        converged,
        positive,
    })
}

/// min u over `points` interior samples is strictly positive.
fn is_interior_positive(basis: &BasisSet, profile: &Profile, points: usize) -> Result<bool> {
    let grid = basis.sample_grid(profile, points + 2)?;
    Ok(grid.u[1..points + 1].iter().all(|&v| v > 0.0))
}

/// Independent solves in input order; per-item failures are collected, not
/// fail-fast. Each result is identical to a standalone minimize call with a
/// default quadrature rule for its spec.
pub fn sweep(specs: &[ProblemSpec], config: &SolverConfig) -> Vec<Result<SolveResult>> {
    specs
        .iter()
        .map(|spec| {
            let rule = build_rule(
                spec.radius,
                default_panel_count(spec.n),
                DEFAULT_NODES_PER_PANEL,
            )?;
            let basis = BasisSet::new(*spec, rule)?;
            minimize(&basis, config)
        })
        .collect()
}
