//! Heisenberg-side extensions: `P'` from the sub-sphere placed in `H^n`, and
//! the half-space kernel `P` from `H^{n−m}`.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{TRACE_TERMS, complex_sphere_rule, DirectOptions, GradedCrRule, TraceConfig, TraceError};
use crate::geometry::{area, cayley, cayley_inv, subsphere_embed_heis, CrPoint};
use crate::special::integrate::GradedRule;
use crate::special::ln_gamma;
use crate::spectral::CrField;
use crate::{Complex64, HeisenbergPoint64};

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

fn parts(cfg: &TraceConfig) -> (f64, f64, f64) {
    let m = cfg.m as f64;
    let a = (cfg.q() + cfg.s - 4.0 * m) / 4.0;
    let sigma = (cfg.s - 2.0 * m) / 2.0;
    (a, sigma, cfg.q() + cfg.s - 4.0 * m)
}

/// `Γ²(a) 2^{(Q+s)/2−2m} / (2π^{n'+1} Γ(σ))`, `a = (Q+s−4m)/4`, `σ = (s−2m)/2`.
pub fn pprime_constant(cfg: &TraceConfig) -> f64 {
    let (a, sigma, beta) = parts(cfg);
    (2.0 * lg(a) - lg(sigma) + 0.5 * beta * 2f64.ln()).exp() / (2.0 * PI.powi(cfg.n_sub() as i32 + 1))
}

/// `2^{n+s/2−2m−1} Γ²(a) / (π^{n'+1} Γ(σ))`.
pub fn halfspace_constant(cfg: &TraceConfig) -> f64 {
    let (a, sigma, _) = parts(cfg);
    let e = cfg.n as f64 + cfg.s / 2.0 - 2.0 * cfg.m as f64 - 1.0;
    (2.0 * lg(a) - lg(sigma) + e * 2f64.ln()).exp() / PI.powi(cfg.n_sub() as i32 + 1)
}

/// `2^{s−2m} Γ²((Q+s−4m)/4) / Γ²((Q−s)/4)`.
pub fn sub_heisenberg_ratio(cfg: &TraceConfig) -> f64 {
    let (a, _, _) = parts(cfg);
    let b = (cfg.q() - cfg.s) / 4.0;
    ((cfg.s - 2.0 * cfg.m as f64) * 2f64.ln() + 2.0 * lg(a) - 2.0 * lg(b)).exp()
}

/// Distance weight of `u ∈ H^n` to the sub-sphere `{(z', 0, 0) : |z'| = 1}`:
/// `ρ_u² = |z_{n'+2..n}|² + ((1 − |z|²)² + t²)/4`. It equals `|ζ''|` at
/// `ζ = C(u)` up to the conformal factor `(2|J(u)|)^{1/Q}`.
pub fn subsphere_weight_heis(u: &HeisenbergPoint64, n_sub: usize) -> f64 {
    let tail: f64 = u.z[n_sub + 1..].iter().map(|c| c.norm_sqr()).sum();
    let r2: f64 = u.z.iter().map(|c| c.norm_sqr()).sum();
    (tail + ((1.0 - r2).powi(2) + u.t * u.t) / 4.0).sqrt()
}

/// `P'_{s,m} g(u) = c ρ_u^{s−2m} ∫_{S'} |u⁻¹v|^{−(Q+s−4m)} g(v) dv` with the
/// sub-sphere `S' ⊂ H^n` of [`subsphere_embed_heis`]. Direct graded
/// quadrature; targets whose Cayley image lies within `opts.delta` of the
/// sub-sphere are refused.
pub fn extend_pprime(g: &CrField, cfg: &TraceConfig, u: &HeisenbergPoint64, opts: &DirectOptions) -> Result<Complex64, TraceError> {
    let ns = cfg.n_sub();
    if g.n() != ns || u.z.len() != cfg.n {
        return Err(TraceError::Config("P' needs g on S^{2(n−m)+1} and u in H^n".into()));
    }
    let zeta = cayley(u).coords;
    let dist = super::distance_to_subsphere_cr(&zeta, ns);
    super::check_distance(dist, opts.delta)?;
    let (_, sigma, beta) = parts(cfg);
    let zp = &zeta[..=ns];
    let rho: f64 = zp.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let theta: Vec<Complex64> = if rho > 1e-300 {
        zp.iter().map(|c| c / rho).collect()
    } else {
        let mut e = vec![Complex64::new(0.0, 0.0); ns + 1];
        e[0] = Complex64::new(1.0, 0.0);
        e
    };
    let rule = GradedCrRule::new(&theta, 1.0 - rho, opts.order, g.l().max(1));
    let val = rule.integrate(|eta| {
        let v = subsphere_embed_heis(&CrPoint::new(eta.to_vec()), cfg.n, cfg.m).expect("dimensions checked");
        g.eval(eta) * u.gauge_distance(&v).powf(-beta)
    });
    let w = subsphere_weight_heis(u, ns);
    Ok(val * (pprime_constant(cfg) * w.powf(2.0 * sigma)))
}

/// Trace of `P' g` at the sub-sphere point `θ`, extrapolated from targets
/// `C⁻¹(cos d θ, sin d · i e_m)`.
pub fn pprime_trace(g: &CrField, cfg: &TraceConfig, theta: &[Complex64], opts: &DirectOptions) -> Result<Complex64, TraceError> {
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    let mut omega = vec![Complex64::new(0.0, 0.0); cfg.m];
    // purely imaginary last coordinate keeps the conformal factor even in d
    omega[cfg.m - 1] = Complex64::new(0.0, 1.0);
    super::extrapolate_trace(opts.delta, &super::trace_terms(sigma, TRACE_TERMS), |d| {
        let z = super::point_off_subsphere_cr(theta, &omega, d);
        let u = cayley_inv(&CrPoint::new(z)).map_err(|e| TraceError::Config(e.to_string()))?;
        extend_pprime(g, cfg, &u, opts)
    })
}

/// Value with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Orders for the compactified half-space quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfspaceOptions {
    /// Gauss points per panel of the graded rules in `y` and `v`.
    pub order: usize,
    /// Exactness degree on the angular sphere `S^{2n'−1}`.
    pub angular_degree: usize,
    pub delta: f64,
}

impl Default for HalfspaceOptions {
    fn default() -> Self {
        Self {
            order: 16,
            angular_degree: 16,
            delta: 1e-3,
        }
    }
}

fn halfspace_sum(g: &(impl Fn(&HeisenbergPoint64) -> Complex64 + Sync), cfg: &TraceConfig, u: &HeisenbergPoint64, order: usize, deg: usize) -> Complex64 {
    let ns = cfg.n_sub();
    let (_, sigma, beta) = parts(cfg);
    let eps: f64 = u.z[ns..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let base = HeisenbergPoint64::new(u.z[..ns].to_vec(), u.t);
    // g varies on the unit scale, i.e. at r ~ 1/ε (1 − y ~ ε²) and at
    // ε²μ ~ 1 (1 − |v| ~ ε⁴(1 + r²)²)
    let ry = GradedRule::new(sigma - 1.0, ns as f64 - 1.0, eps * eps, order);
    let ev = (beta - 6.0) / 4.0;
    let (omega, wo) = complex_sphere_rule(ns, deg);
    let sum: Complex64 = ry
        .nodes
        .par_iter()
        .zip(&ry.weights)
        .map(|(&uy, &wy)| {
            let y = 1.0 - uy;
            let r2 = y / uy;
            let r = r2.sqrt();
            let rv = GradedRule::new(ev, 0.0, (eps.powi(4) * (1.0 + r2).powi(2)).min(1.0), order);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&uv, &wv) in rv.nodes.iter().zip(&rv.weights) {
                let wv = wv * (2.0 - uv).powf(ev);
                for sign in [1.0, -1.0] {
                    let v = sign * (1.0 - uv);
                    // 1 − v² = u(2 − u)
                    let mu = (1.0 + r2) * v / (uv * (2.0 - uv)).sqrt();
                    for (om, w) in omega.iter().zip(&wo) {
                        let h = HeisenbergPoint64::new(om.iter().map(|c| c * (eps * r)).collect(), eps * eps * mu);
                        acc += g(&base.mul(&h)) * (wy * wv * w);
                    }
                }
            }
            acc
        })
        .sum();
    sum * (halfspace_constant(cfg) / 2.0)
}

/// `P_{s,m} g(u) = c |z''|^{s−2m} ∫_{H^{n−m}} |u⁻¹v|^{−(Q+s−4m)} g(v) dv`
/// for `g` on `H^{n−m}` (points with `n − m` complex coordinates).
///
/// After translating to the foot point `(z', t)`, scaling by `ε = |z''|` and
/// compactifying `|w|² = ε² y/(1−y)`, `μ = ε²(1+|w|²/ε²) v/√(1−v²)`, the
/// integral becomes a graded rule in `(y, v)` times a sphere rule; no
/// domain truncation. The error estimate compares with a rule of
/// about two thirds the order.
pub fn extend_p_halfspace(
    g: impl Fn(&HeisenbergPoint64) -> Complex64 + Sync,
    cfg: &TraceConfig,
    u: &HeisenbergPoint64,
    opts: &HalfspaceOptions,
) -> Result<Estimate, TraceError> {
    let ns = cfg.n_sub();
    if u.z.len() != cfg.n {
        return Err(TraceError::Config("target must lie in H^n".into()));
    }
    let eps: f64 = u.z[ns..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    super::check_distance(eps, opts.delta)?;
    let fine = halfspace_sum(&g, cfg, u, opts.order, opts.angular_degree);
    let coarse = halfspace_sum(&g, cfg, u, (2 * opts.order / 3).max(4), opts.angular_degree);
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// Trace of `P g` at `p ∈ H^{n−m}`, extrapolated along `z'' = ε e₁`.
pub fn p_halfspace_trace(
    g: impl Fn(&HeisenbergPoint64) -> Complex64 + Sync,
    cfg: &TraceConfig,
    p: &HeisenbergPoint64,
    delta: f64,
    opts: &HalfspaceOptions,
) -> Result<Complex64, TraceError> {
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    let terms = super::trace_terms(sigma, TRACE_TERMS);
    super::extrapolate_trace(delta, &terms, |d| {
        // the Heisenberg path is parametrized by ε = tan d so that sin d is
        // within O(ε³) of ε
        let mut z = p.z.clone();
        z.resize(cfg.n, Complex64::new(0.0, 0.0));
        z[cfg.n_sub()] = Complex64::new(d.tan(), 0.0);
        extend_p_halfspace(&g, cfg, &HeisenbergPoint64::new(z, p.t), opts).map(|e| e.value)
    })
}

/// `|S^{2n'−1}| B(n', σ) ∫(1−v²)^{(β−6)/4} dv` times the constant; equals 1.
pub fn halfspace_mass(cfg: &TraceConfig) -> f64 {
    let ns = cfg.n_sub() as f64;
    let (_, sigma, beta) = parts(cfg);
    let ev = (beta - 6.0) / 4.0;
    let beta_fn = |p: f64, q: f64| (lg(p) + lg(q) - lg(p + q)).exp();
    halfspace_constant(cfg) / 2.0 * area(2 * cfg.n_sub() - 1) * beta_fn(ns, sigma) * 2f64.powf(2.0 * ev + 1.0) * beta_fn(ev + 1.0, ev + 1.0)
}
