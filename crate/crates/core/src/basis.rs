//! Weighted-orthonormal Galerkin basis built from sine modes.
//!
//! Raw modes are phi_k(r) = sin(k pi r / R), k = 1..N. They vanish at r = 0
//! and r = R, so every expansion satisfies the boundary conditions exactly.
//! The working basis {psi_j} is their modified Gram-Schmidt orthonormalization
//! under the weighted inner product <u, v> = 2 pi int_0^R r u v dr, stored as
//! a lower-triangular change of basis psi_j = sum_k T[j][k] phi_k. In psi
//! coordinates the flux constraint 2 pi int r u^2 dr becomes the squared
//! Euclidean norm of the coefficient vector, which is what makes the sphere
//! retraction in the solver exact.
//!
//! Derivatives are analytic throughout: sin -> (k pi/R) cos -> -(k pi/R)^2 sin
//! composed with T. No finite differencing anywhere.

use crate::error::{Error, Result};
use crate::math;
use crate::quadrature::{integrate, QuadratureRule};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Parameters of one solve: domain radius R, vortex number m, saturation
/// parameter alpha, energy flux P0, basis dimension N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    /// Domain radius R > 0.
    pub radius: f64,
    /// Vortex number m; any integer, enters all formulas through m^2.
    pub m: i32,
    /// Saturation parameter alpha >= 1.
    pub alpha: f64,
    /// Energy flux constraint P0 > 0.
    pub p0: f64,
    /// Basis dimension N >= 1.
    pub n: usize,
}

impl ProblemSpec {
    /// Checks the type invariants: R > 0, P0 > 0, N >= 1, alpha >= 1.
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidArgument("R must be positive"));
        }
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be at least 1"));
        }
        if !(self.p0 > 0.0) || !self.p0.is_finite() {
            return Err(Error::InvalidArgument("P0 must be positive"));
        }
        if self.n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1"));
        }
        Ok(())
    }

    /// m^2 as a float, the combination every formula actually uses.
    pub fn m_sq(&self) -> f64 {
        (self.m as f64) * (self.m as f64)
    }
}

/// Coefficient vector in the orthonormal psi basis.
///
/// A profile is meaningful only together with the `BasisSet` that produced
/// it; the pairing is by construction, not by stored reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// Coordinates c in the orthonormal basis; u = sum_j c[j] psi_j.
    pub coeffs: Vec<f64>,
}

impl Profile {
    /// Wraps a coefficient vector.
    pub fn new(coeffs: Vec<f64>) -> Self {
        Profile { coeffs }
    }

    /// Energy flux P(u) = sum_j c_j^2; exact in orthonormal coordinates.
    pub fn flux(&self) -> f64 {
        math::dot(&self.coeffs, &self.coeffs)
    }
}

/// Uniform samples of a profile and its first two derivatives, endpoints
/// included. u and u_rr are exactly zero at r = 0 and r = R.
#[derive(Debug, Clone)]
pub struct GridSamples {
    /// Radii, r[0] = 0 and r[last] = R.
    pub r: Vec<f64>,
    /// Profile values.
    pub u: Vec<f64>,
    /// First derivative.
    pub u_r: Vec<f64>,
    /// Second derivative.
    pub u_rr: Vec<f64>,
}

/// Orthonormalized Galerkin basis with cached node tables.
#[derive(Debug, Clone)]
pub struct BasisSet {
    spec: ProblemSpec,
    rule: QuadratureRule,
    gram: Vec<f64>,
    transform: Vec<f64>,
    /// k pi / R for k = 1..N.
    freq: Vec<f64>,
    /// psi_j at quadrature nodes, N x nodes row-major.
    psi_tab: Vec<f64>,
    /// d/dr psi_j at quadrature nodes.
    psi_r_tab: Vec<f64>,
    /// sin(k pi r/R) at quadrature nodes (raw modes).
    sin_tab: Vec<f64>,
}

/// Weighted Gram matrix of the raw sine modes: entry (i, j) is
/// 2 pi int_0^R r sin((i+1) pi r/R) sin((j+1) pi r/R) dr. Row-major N x N.
pub fn gram_matrix(spec: &ProblemSpec, rule: &QuadratureRule) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let nodes = rule.nodes();
    let weights = rule.weights();
    let mut sines = vec![0.0; n * nodes.len()];
    for k in 0..n {
        let f = (k + 1) as f64 * PI / spec.radius;
        for (q, &r) in nodes.iter().enumerate() {
            sines[k * nodes.len() + q] = math::sin(f * r);
        }
    }
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for q in 0..nodes.len() {
                s +=
                    weights[q] * nodes[q] * sines[i * nodes.len() + q] * sines[j * nodes.len() + q];
            }
            let v = 2.0 * PI * s;
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    Ok(gram)
}

/// Modified Gram-Schmidt in coefficient space: returns lower-triangular T with
/// positive diagonal such that T * gram * T^T = identity within 1e-10.
///
/// Processes modes in increasing frequency. If the verification Gram deviates
/// beyond 1e-10 after the first pass, one re-orthogonalization pass is run.
pub fn orthonormalize(gram: &[f64], n: usize) -> Result<Vec<f64>> {
    if gram.len() != n * n {
        return Err(Error::InvalidArgument("gram matrix size must be N x N"));
    }
    let mut t = vec![0.0; n * n];
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        mgs_sweep_row(&mut t, &mut v, gram, n, j)?;
        t[j * n..j * n + n].copy_from_slice(&v);
    }
    if verify_deviation(&t, gram, n) > 1e-10 {
        // Re-orthogonalization: run each row through the projections again.
        for j in 0..n {
            let mut v = t[j * n..j * n + n].to_vec();
            mgs_sweep_row(&mut t, &mut v, gram, n, j)?;
            t[j * n..j * n + n].copy_from_slice(&v);
        }
        let dev = verify_deviation(&t, gram, n);
        if dev > 1e-10 {
            return Err(Error::IllConditionedBasis { pivot: n });
        }
    }
    Ok(t)
}

/// Projects v against rows 0..j of t under the gram metric, then normalizes.
/// The pivot check guards loss of positive definiteness.
fn mgs_sweep_row(t: &mut [f64], v: &mut [f64], gram: &[f64], n: usize, j: usize) -> Result<()> {
    let mut gv = vec![0.0; n];
    for i in 0..j {
        gram_apply(gram, v, &mut gv, n);
        let proj = math::dot(&t[i * n..i * n + n], &gv);
        for k in 0..n {
            v[k] -= proj * t[i * n + k];
        }
    }
    gram_apply(gram, v, &mut gv, n);
    let nrm_sq = math::dot(v, &gv);
    if !(nrm_sq > 1e-12 * gram[0]) {
        return Err(Error::IllConditionedBasis { pivot: j });
    }
    let inv = 1.0 / math::sqrt(nrm_sq);
    for k in 0..n {
        v[k] *= inv;
    }
    Ok(())
}

fn gram_apply(gram: &[f64], v: &[f64], out: &mut [f64], n: usize) {
    for i in 0..n {
        out[i] = math::dot(&gram[i * n..i * n + n], v);
    }
}

/// Max |T G T^T - I| entry.
fn verify_deviation(t: &[f64], gram: &[f64], n: usize) -> f64 {
    let mut worst = 0.0;
    let mut gv = vec![0.0; n];
    for i in 0..n {
        gram_apply(gram, &t[i * n..i * n + n], &mut gv, n);
        for j in 0..n {
            let entry = math::dot(&t[j * n..j * n + n], &gv);
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = math::abs(entry - target);
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

impl BasisSet {
    /// Builds the orthonormal basis for `spec` using `rule` for all inner
    /// products. The rule must cover the same domain radius.
    pub fn new(spec: ProblemSpec, rule: QuadratureRule) -> Result<Self> {
        spec.validate()?;
        let dom = rule.domain_end();
        if math::abs(dom - spec.radius) > 1e-9 * spec.radius {
            return Err(Error::InvalidArgument(
                "quadrature rule covers a different radius",
            ));
        }
        let n = spec.n;
        let nq = rule.nodes().len();
        let gram = gram_matrix(&spec, &rule)?;
        let transform = orthonormalize(&gram, n)?;

        let mut freq = vec![0.0; n];
        let mut sin_tab = vec![0.0; n * nq];
        let mut cos_tab = vec![0.0; n * nq];
        for k in 0..n {
            let f = (k + 1) as f64 * PI / spec.radius;
            freq[k] = f;
            for (q, &r) in rule.nodes().iter().enumerate() {
                sin_tab[k * nq + q] = math::sin(f * r);
                cos_tab[k * nq + q] = f * math::cos(f * r);
            }
        }
        // psi tables: compose the triangular transform with the raw tables.
        let mut psi_tab = vec![0.0; n * nq];
        let mut psi_r_tab = vec![0.0; n * nq];
        for j in 0..n {
            for k in 0..=j {
                let tjk = transform[j * n + k];
                if tjk == 0.0 {
                    continue;
                }
                for q in 0..nq {
                    psi_tab[j * nq + q] += tjk * sin_tab[k * nq + q];
                    psi_r_tab[j * nq + q] += tjk * cos_tab[k * nq + q];
                }
            }
        }
        Ok(BasisSet {
            spec,
            rule,
            gram,
            transform,
            freq,
            psi_tab,
            psi_r_tab,
            sin_tab,
        })
    }

    /// Problem parameters this basis was built for.
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    /// Quadrature rule used for every inner product.
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Raw-sine Gram matrix, row-major N x N.
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    /// Lower-triangular change of basis T, row-major N x N.
    pub fn transform(&self) -> &[f64] {
        &self.transform
    }

    /// Basis dimension N.
    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Converts psi coordinates c to raw sine coordinates d = T^T c.
    pub fn sine_coeffs(&self, profile: &Profile) -> Vec<f64> {
        let n = self.spec.n;
        assert_eq!(profile.coeffs.len(), n, "profile dimension mismatch");
        let mut d = vec![0.0; n];
        // T is lower triangular; column k of T has rows k..n.
        for j in 0..n {
            let cj = profile.coeffs[j];
            if cj == 0.0 {
                continue;
            }
            for k in 0..=j {
                d[k] += self.transform[j * n + k] * cj;
            }
        }
        d
    }

    /// Evaluates u, u_r, or u_rr (order 0, 1, 2) at a single radius.
    /// u and u_rr are exactly zero at the endpoints.
    pub fn eval(&self, profile: &Profile, r: f64, order: usize) -> Result<f64> {
        if !(0.0..=self.spec.radius).contains(&r) {
            return Err(Error::InvalidArgument("r outside [0, R]"));
        }
        if order > 2 {
            return Err(Error::InvalidArgument(
                "derivative order must be 0, 1, or 2",
            ));
        }
        let d = self.sine_coeffs(profile);
        Ok(self.eval_sine(&d, r, order))
    }

    /// Evaluation in raw sine coordinates; shared by eval and sample_grid.
    fn eval_sine(&self, d: &[f64], r: f64, order: usize) -> f64 {
        let boundary = r == 0.0 || r == self.spec.radius;
        if boundary && order != 1 {
            // Every mode is sin(k pi r/R): value and curvature vanish exactly.
            return 0.0;
        }
        let mut s = 0.0;
        for k in 0..d.len() {
            let f = self.freq[k];
            s += d[k]
                * match order {
                    0 => math::sin(f * r),
                    1 => f * math::cos(f * r),
                    _ => -f * f * math::sin(f * r),
                };
        }
        s
    }

    /// u and u_r at the quadrature nodes; the workhorse of the functionals.
    pub(crate) fn node_samples(&self, profile: &Profile) -> (Vec<f64>, Vec<f64>) {
        let nq = self.rule.nodes().len();
        let n = self.spec.n;
        let mut u = vec![0.0; nq];
        let mut ur = vec![0.0; nq];
        for j in 0..n {
            let cj = profile.coeffs[j];
            if cj == 0.0 {
                continue;
            }
            for q in 0..nq {
                u[q] += cj * self.psi_tab[j * nq + q];
                ur[q] += cj * self.psi_r_tab[j * nq + q];
            }
        }
        (u, ur)
    }

    /// u_rr at the quadrature nodes.
    pub(crate) fn node_samples_second(&self, profile: &Profile) -> Vec<f64> {
        let nq = self.rule.nodes().len();
        let n = self.spec.n;
        let d = self.sine_coeffs(profile);
        let mut urr = vec![0.0; nq];
        for k in 0..n {
            let dk = d[k];
            if dk == 0.0 {
                continue;
            }
            let f2 = self.freq[k] * self.freq[k];
            for q in 0..nq {
                urr[q] -= dk * f2 * self.sin_tab[k * nq + q];
            }
        }
        urr
    }

    /// Gradient accumulation helper: returns sum_q coeff[q] * psi_j(r_q) and
    /// the matching psi_j' sum for every j. `a` multiplies psi, `b` psi'.
    pub(crate) fn accumulate_inner(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let nq = self.rule.nodes().len();
        let n = self.spec.n;
        let mut out = vec![0.0; n];
        for j in 0..n {
            let mut s = 0.0;
            for q in 0..nq {
                s += a[q] * self.psi_tab[j * nq + q] + b[q] * self.psi_r_tab[j * nq + q];
            }
            out[j] = s;
        }
        out
    }

    /// Samples u, u_r, u_rr on `points` uniformly spaced radii including both
    /// endpoints. `points` must be at least 2.
    pub fn sample_grid(&self, profile: &Profile, points: usize) -> Result<GridSamples> {
        if points < 2 {
            return Err(Error::InvalidArgument(
                "sample grid needs at least 2 points",
            ));
        }
        let d = self.sine_coeffs(profile);
        let mut r = vec![0.0; points];
        let mut u = vec![0.0; points];
        let mut u_r = vec![0.0; points];
        let mut u_rr = vec![0.0; points];
        let step = self.spec.radius / (points - 1) as f64;
        for i in 0..points {
            // Exact endpoint radii; interior points from the uniform step.
            let ri = if i + 1 == points {
                self.spec.radius
            } else {
                i as f64 * step
            };
            r[i] = ri;
            u[i] = self.eval_sine(&d, ri, 0);
            u_r[i] = self.eval_sine(&d, ri, 1);
            u_rr[i] = self.eval_sine(&d, ri, 2);
        }
        Ok(GridSamples { r, u, u_r, u_rr })
    }

    /// Best weighted-L2 approximation of f in span{psi_j}: c_j = <f, psi_j>.
    /// f must vanish at the endpoints and be finite at every node.
    pub fn project(&self, mut f: impl FnMut(f64) -> f64) -> Result<Profile> {
        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let nq = nodes.len();
        let mut fw = vec![0.0; nq];
        for q in 0..nq {
            let v = f(nodes[q]);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "projected function",
                    at: nodes[q],
                });
            }
            fw[q] = 2.0 * PI * weights[q] * nodes[q] * v;
        }
        let zero = vec![0.0; nq];
        let coeffs = self.accumulate_inner(&fw, &zero);
        Ok(Profile::new(coeffs))
    }

    /// Weighted inner product 2 pi int r u v dr of two profiles via quadrature.
    pub fn inner(&self, a: &Profile, b: &Profile) -> Result<f64> {
        let (ua, _) = self.node_samples(a);
        let (ub, _) = self.node_samples(b);
        let mut q = 0;
        let v = integrate(&self.rule, |r| {
            let val = r * ua[q] * ub[q];
            q += 1;
            val
        })?;
        Ok(2.0 * PI * v)
    }
}
