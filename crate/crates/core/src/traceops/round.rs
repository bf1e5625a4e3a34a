//! Restriction to `S' = {x'' = 0} ≅ S^{n−m}` in `S^n` and the extension `Q̃`.
//!
//! On a degree-`l` harmonic `Y` of `S'` the extension acts as
//! `Q̃Y(ζ) = φ_l(x) |ζ'|^l Y(ζ'/|ζ'|)` with `x = |ζ''|²`, where
//! `φ_l(x) = c_l ₂F₁(C−A, C−B; C; 1−x)`, `A = (γ+l)/2`, `B = A + 1/2`,
//! `C = l + (n'+1)/2` and `γ = (n+s−2m)/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::{distance_to_subsphere_round, DirectOptions, GradedRoundRule, RadialRule, SeriesSum, TraceConfig, TraceError, TRACE_TERMS};
use crate::geometry::area;
use crate::operators::multiplier_ps;
use crate::special::integrate::hyp2f1_euler_complement;
use crate::special::ln_gamma;
use crate::spectral::{RoundContext, SphereField};
use crate::Complex64;

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

fn gamma_exp(cfg: &TraceConfig) -> f64 {
    (cfg.n as f64 + cfg.s - 2.0 * cfg.m as f64) / 2.0
}

/// Constant of `x^{(s−m)/2} |ζ − η|^{−(n+s−2m)}`:
/// `π^{(m−n)/2} Γ((n+s−2m)/2) / Γ((s−m)/2)`.
pub fn kernel_constant_round(cfg: &TraceConfig) -> f64 {
    let m = cfg.m as f64;
    PI.powf((m - cfg.n as f64) / 2.0) * (lg(gamma_exp(cfg)) - lg((cfg.s - m) / 2.0)).exp()
}

/// `π^{m/2} 2^m Γ(s/2) / Γ((s−m)/2)`.
pub fn trace_coefficient_round(cfg: &TraceConfig) -> f64 {
    let m = cfg.m as f64;
    PI.powf(m / 2.0) * 2f64.powf(m) * (lg(cfg.s / 2.0) - lg((cfg.s - m) / 2.0)).exp()
}

/// Radial profile `φ_l` of `Q̃` on the degree-`l` harmonics.
#[derive(Debug, Clone, Copy)]
pub struct RoundBlockProfile {
    pub l: usize,
    big: f64,
    small: f64,
    c: f64,
    pref: f64,
    trace_value: f64,
}

impl RoundBlockProfile {
    pub fn new(cfg: &TraceConfig, l: usize) -> Self {
        let ns = cfg.n_sub() as f64;
        let lf = l as f64;
        let g = gamma_exp(cfg);
        let a = (g + lf) / 2.0;
        let b = a + 0.5;
        let c = lf + (ns + 1.0) / 2.0;
        // K 2^{−γ} |S'| (γ)_l / (2^l ((n'+1)/2)_l)
        let ln_pref = kernel_constant_round(cfg).ln() - g * std::f64::consts::LN_2 + area(cfg.n_sub()).ln() + lg(g + lf) - lg(g)
            - lf * std::f64::consts::LN_2
            - lg(c)
            + lg((ns + 1.0) / 2.0);
        let sigma = (cfg.s - cfg.m as f64) / 2.0;
        let trace_value = (ln_pref + lg(c) + lg(sigma) - lg(a) - lg(b)).exp();
        Self {
            l,
            big: c - a,
            small: c - b,
            c,
            pref: ln_pref.exp(),
            trace_value,
        }
    }

    /// `φ_l(x)` for `0 ≤ x ≤ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.trace_value;
        }
        if self.small <= 1e-14 {
            // s = n, l = 0: the hypergeometric factor is identically 1
            return self.pref;
        }
        self.pref * hyp2f1_euler_complement(self.big, self.small, self.c, x.min(1.0))
    }

    /// The `x → 0` limit, 1 for every degree.
    pub fn trace_value(&self) -> f64 {
        self.trace_value
    }
}

fn check_sub(g: &SphereField, n: usize, m: usize) -> Result<(), TraceError> {
    if m == 0 || m >= n || g.ctx.d != n - m {
        return Err(TraceError::Config(format!("sub-sphere field on S^{} does not match n = {n}, m = {m}", g.ctx.d)));
    }
    Ok(())
}

/// Samples `F` at the grid of `sub` (embedded with `x'' = 0`) and expands.
pub fn restrict_round(f: &SphereField, m: usize, sub: &Arc<RoundContext>) -> Result<SphereField, TraceError> {
    let n = f.ctx.d;
    if m == 0 || m >= n || sub.d != n - m {
        return Err(TraceError::Config(format!("cannot restrict S^{n} to S^{}", sub.d)));
    }
    let vals: Vec<f64> = sub
        .grid
        .nodes
        .par_iter()
        .map(|eta| {
            let mut z = eta.clone();
            z.resize(n + 1, 0.0);
            f.eval(&z)
        })
        .collect();
    Ok(SphereField::expand(sub, vals)?)
}

/// `Σ_l φ_l(x) |ζ'|^l g_l(ζ'/|ζ'|)` with a precomputed profile per degree.
pub(crate) fn eval_with(g: &SphereField, phi: &[f64], zeta: &[f64]) -> f64 {
    let ns = g.ctx.d;
    let x: f64 = zeta[ns + 1..].iter().map(|c| c * c).sum();
    let rho = (1.0 - x).max(0.0).sqrt();
    if rho <= 0.0 {
        // only degree 0 survives at the poles of S'
        let r = g.ctx.basis.ranges[0].clone();
        return g.coeffs[r.clone()].iter().zip(&g.ctx.basis.funcs[r]).map(|(c, f)| c * f.norm).sum::<f64>() * phi[0];
    }
    let theta: Vec<f64> = zeta[..=ns].iter().map(|c| c / rho).collect();
    g.ctx
        .basis
        .funcs
        .iter()
        .zip(&g.coeffs)
        .map(|(f, c)| {
            let l = f.degree();
            c * phi[l] * rho.powi(l as i32) * f.eval(&theta)
        })
        .sum()
}

fn profiles_at(table: &[RoundBlockProfile], x: f64) -> Vec<f64> {
    table.iter().map(|p| p.eval(x)).collect()
}

fn profile_table(cfg: &TraceConfig, l: usize) -> Vec<RoundBlockProfile> {
    (0..=l).map(|d| RoundBlockProfile::new(cfg, d)).collect()
}

/// `Q̃_{s,m} g(ζ)` by the degree formula; defined up to the sub-sphere.
pub fn qtilde_at(g: &SphereField, cfg: &TraceConfig, zeta: &[f64]) -> Result<f64, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    let x: f64 = zeta[cfg.n_sub() + 1..].iter().map(|c| c * c).sum();
    let phi = profiles_at(&profile_table(cfg, g.ctx.l), x);
    Ok(eval_with(g, &phi, zeta))
}

/// Grid values and degree table of `Q̃_{s,m} g` on `target`.
pub fn extend_qtilde(g: &SphereField, cfg: &TraceConfig, target: &Arc<RoundContext>) -> Result<SphereField, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    if target.d != cfg.n {
        return Err(TraceError::Config(format!("target S^{} is not S^{}", target.d, cfg.n)));
    }
    let table = profile_table(cfg, g.ctx.l);
    let ns = cfg.n_sub();
    let vals: Vec<f64> = target
        .grid
        .nodes
        .par_iter()
        .map(|z| {
            let x: f64 = z[ns + 1..].iter().map(|c| c * c).sum();
            eval_with(g, &profiles_at(&table, x), z)
        })
        .collect();
    Ok(SphereField::expand(target, vals)?)
}

/// `K x^{(s−m)/2} ∫_{S'} |ζ − η|^{−(n+s−2m)} g(η) dη` by graded quadrature.
/// Refuses targets within `opts.delta` of the sub-sphere.
pub fn qtilde_direct(g: &SphereField, cfg: &TraceConfig, zeta: &[f64], opts: &DirectOptions) -> Result<f64, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    let ns = cfg.n_sub();
    super::check_distance(distance_to_subsphere_round(zeta, ns), opts.delta)?;
    let zp = &zeta[..=ns];
    let x: f64 = zeta[ns + 1..].iter().map(|c| c * c).sum();
    let rho: f64 = zp.iter().map(|c| c * c).sum::<f64>().sqrt();
    let theta: Vec<f64> = if rho > 1e-300 {
        zp.iter().map(|c| c / rho).collect()
    } else {
        let mut e = vec![0.0; ns + 1];
        e[0] = 1.0;
        e
    };
    let scale = if rho > 1e-300 { (1.0 - rho) / rho } else { 1.0 };
    let rule = GradedRoundRule::new(&theta, scale, opts.order, g.ctx.l.max(1));
    let expo = -gamma_exp(cfg);
    // |ζ − η|² = 2 − 2 ζ'·η on the unit sphere
    let val = rule.integrate(|eta| {
        let t: f64 = zp.iter().zip(eta).map(|(a, b)| a * b).sum();
        g.eval(eta) * (2.0 - 2.0 * t).powf(expo)
    });
    Ok(val * kernel_constant_round(cfg) * x.powf((cfg.s - cfg.m as f64) / 2.0))
}

/// Trace of `Q̃ g` at `θ ∈ S'` extrapolated from direct quadrature along
/// the unit normal `ω ∈ S^{m−1}`.
pub fn qtilde_trace_direct(g: &SphereField, cfg: &TraceConfig, theta: &[f64], omega: &[f64], opts: &DirectOptions) -> Result<f64, TraceError> {
    let sigma = (cfg.s - cfg.m as f64) / 2.0;
    let v = super::extrapolate_trace(opts.delta, &super::trace_terms(sigma, TRACE_TERMS), |d| {
        let z = super::point_off_subsphere_round(theta, omega, d);
        qtilde_direct(g, cfg, &z, opts).map(|v| Complex64::new(v, 0.0))
    })?;
    Ok(v.re)
}

/// Expansion `φ_l(x) = Σ_i a_i R_i(x)`, `R_i = P_i^{(m/2−1, l+(n'−1)/2)}(1−2x)`,
/// so that `R_i |ζ'|^l Y` is a degree `l + 2i` harmonic on `S^n`.
#[derive(Debug, Clone)]
pub struct RoundBlockSeries {
    pub l: usize,
    pub alpha: f64,
    pub beta: f64,
    pub coeffs: Vec<f64>,
    /// `‖R_i |ζ'|^l Y‖² / ‖Y‖²`.
    pub norms: Vec<f64>,
}

impl RoundBlockSeries {
    pub fn new(cfg: &TraceConfig, l: usize, imax: usize) -> Self {
        let alpha = cfg.m as f64 / 2.0 - 1.0;
        let beta = l as f64 + (cfg.n_sub() as f64 - 1.0) / 2.0;
        let rule = RadialRule::new(alpha, beta, imax);
        let prof = RoundBlockProfile::new(cfg, l);
        let vals: Vec<f64> = rule.x.par_iter().map(|&x| prof.eval(x)).collect();
        let coeffs = super::radial_coefficients(&rule, &vals, imax);
        let half_area = area(cfg.m - 1) / 2.0;
        let norms = (0..imax).map(|i| half_area * super::jacobi_unit_norm(i, alpha, beta)).collect();
        Self {
            l,
            alpha,
            beta,
            coeffs,
            norms,
        }
    }

    pub fn radial(&self, i: usize, x: f64) -> f64 {
        crate::special::jacobi_poly(i, self.alpha, self.beta, 1.0 - 2.0 * x).expect("valid parameters")
    }

    /// Energy terms `λ_{l+2i} a_i² ‖R_i Y‖²` of `P_s(Q̃Y)` per unit `‖Y‖²`.
    pub fn energy_terms(&self, cfg: &TraceConfig, upto: usize) -> Vec<f64> {
        (0..upto.min(self.coeffs.len()))
            .map(|i| multiplier_ps(cfg.n, self.l + 2 * i, cfg.s).expect("order in range") * self.coeffs[i].powi(2) * self.norms[i])
            .collect()
    }

    pub fn energy(&self, cfg: &TraceConfig) -> Result<SeriesSum, TraceError> {
        super::sum_with_tail(&self.energy_terms(cfg, self.coeffs.len()))
    }
}

/// Unit normal direction `e₁ ∈ R^m`.
pub fn default_normal_round(m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m];
    w[0] = 1.0;
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub_field(ns: usize, l: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> SphereField {
        let ctx = RoundContext::new(ns, l).unwrap();
        SphereField::from_fn(&ctx, f).unwrap()
    }

    #[test]
    fn profiles_are_one_on_the_subsphere() {
        for (n, m, s) in [(2, 1, 1.5), (2, 1, 2.0), (3, 1, 2.5), (3, 2, 3.0), (4, 2, 3.5)] {
            let cfg = TraceConfig::round(n, m, s).unwrap();
            for l in 0..6 {
                let pr = RoundBlockProfile::new(&cfg, l);
                assert!((pr.trace_value() - 1.0).abs() < 1e-12, "{n} {m} {s} {l}");
                // the x^σ correction is 1e-6 at σ = 1/4
                assert!((pr.eval(1e-24) - 1.0).abs() < 1e-5, "{n} {m} {s} {l}: {}", pr.eval(1e-24));
            }
        }
    }

    #[test]
    fn pole_value_of_constant() {
        let cfg = TraceConfig::round(2, 1, 2.0).unwrap();
        let g = sub_field(1, 2, |_| 1.0);
        let pole = [0.0, 0.0, 1.0];
        assert!((qtilde_at(&g, &cfg, &pole).unwrap() - 1.0).abs() < 1e-12);
        let direct = qtilde_direct(&g, &cfg, &pole, &DirectOptions::default()).unwrap();
        assert!((direct - 1.0).abs() < 1e-10, "{direct}");
    }

    #[test]
    fn constant_extends_to_constant_at_top_order() {
        for (n, m) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let cfg = TraceConfig::round(n, m, n as f64).unwrap();
            let g = sub_field(n - m, 2, |_| 1.0);
            let target = RoundContext::new(n, 4).unwrap();
            let ext = extend_qtilde(&g, &cfg, &target).unwrap();
            let sup = ext.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
            assert!(sup < 1e-10, "{n} {m}: {sup}");
        }
    }

    #[test]
    fn degree_formula_matches_quadrature() {
        for (n, m, s) in [(2, 1, 1.5), (3, 1, 2.5), (3, 2, 3.0), (4, 2, 2.5)] {
            let cfg = TraceConfig::round(n, m, s).unwrap();
            let ns = n - m;
            let g = sub_field(ns, 4, |x| 0.3 + x[0] - 0.7 * x[1] * x[ns] + x[0].powi(3) * x[1]);
            for &(d, ph) in &[(0.2, 0.4), (0.7, 1.3), (1.4, 2.0)] {
                let mut theta = vec![0.0; ns + 1];
                theta[0] = f64::cos(ph);
                theta[1] = f64::sin(ph);
                let mut omega = vec![0.0; m];
                omega[m - 1] = 1.0;
                let z = crate::traceops::point_off_subsphere_round(&theta, &omega, d);
                let a = qtilde_at(&g, &cfg, &z).unwrap();
                let b = qtilde_direct(&g, &cfg, &z, &DirectOptions::default()).unwrap();
                assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{n} {m} {s} d={d}: {a} {b}");
            }
        }
    }

    #[test]
    fn radial_basis_is_harmonic() {
        let cfg = TraceConfig::round(3, 1, 2.5).unwrap();
        let ctx = RoundContext::new(3, 9).unwrap();
        let y = |t: &[f64]| t[0] * t[1];
        let ser = RoundBlockSeries::new(&cfg, 2, 4);
        for i in 0..3 {
            let f = SphereField::from_fn(&ctx, |z| {
                let x = z[3] * z[3];
                ser.radial(i, x) * y(&z[..3])
            })
            .unwrap();
            let total: f64 = (0..=9).map(|d| f.norm_sq(d).unwrap()).sum();
            let deg = 2 + 2 * i;
            let part = f.norm_sq(deg).unwrap();
            assert!((part - total).abs() < 1e-10 * total, "i={i}: {part} {total}");
            let sub = RoundContext::new(2, 2).unwrap();
            let yf = SphereField::from_fn(&sub, |t| y(t)).unwrap();
            let ysq: f64 = sub.grid.integrate(&yf.values.iter().map(|v| v * v).collect::<Vec<_>>());
            assert!((total - ser.norms[i] * ysq).abs() < 1e-10 * total, "i={i}");
        }
    }

    #[test]
    fn block_energy_matches_trace_multiplier() {
        for (n, m, s) in [(2, 1, 1.5), (3, 1, 2.5), (3, 2, 3.0), (4, 1, 3.0)] {
            let cfg = TraceConfig::round(n, m, s).unwrap();
            for l in [0, 1, 3] {
                let e = RoundBlockSeries::new(&cfg, l, 600).energy(&cfg).unwrap();
                let want = trace_coefficient_round(&cfg) * multiplier_ps(n - m, l, s - m as f64).unwrap();
                assert!((e.total() - want).abs() < 1e-6 * (1.0 + want.abs()), "{n} {m} {s} {l}: {} {want}", e.total());
            }
        }
    }

    #[test]
    fn trace_reproduces_boundary_values() {
        let cfg = TraceConfig::round(3, 1, 2.5).unwrap();
        let g = sub_field(2, 3, |x| 1.0 + x[0] * x[2] - 0.5 * x[1]);
        let theta = [0.6, 0.0, 0.8];
        let v = qtilde_trace_direct(&g, &cfg, &theta, &default_normal_round(1), &DirectOptions::default()).unwrap();
        assert!((v - g.eval(&theta)).abs() < 1e-3, "{v} {}", g.eval(&theta));
    }

    #[test]
    fn restriction_recovers_subsphere_values() {
        let big = RoundContext::new(3, 4).unwrap();
        let f = SphereField::from_fn(&big, |z| z[0] * z[1] + z[3] * z[3] - z[2]).unwrap();
        let sub = RoundContext::new(2, 4).unwrap();
        let g = restrict_round(&f, 1, &sub).unwrap();
        let p = [0.48, 0.6, 0.64];
        assert!((g.eval(&p) - (p[0] * p[1] - p[2])).abs() < 1e-12);
    }
}
