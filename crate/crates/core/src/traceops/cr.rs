//! Restriction to `S' = {ζ'' = 0} ≅ S^{2(n−m)+1}` and the extension `P̃`.
//!
//! On a bidegree block `Y ∈ H_{p,q}(S')` the extension acts as
//! `P̃Y(ζ) = φ_{pq}(x) Y_hom(ζ')` with `x = |ζ''|²` and
//! `φ_{pq}(x) = c_{pq} ₂F₁(b+p, b+q; n'+1+p+q; 1−x)`, `b = (Q−s)/4`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::{TRACE_TERMS, distance_to_subsphere_cr, DirectOptions, GradedCrRule, RadialRule, SeriesSum, TraceConfig, TraceError};
use crate::geometry::area;
use crate::operators::{apply_multiplier, mixed_energy, multiplier_as, SpectralMultiplier};
use crate::special::integrate::hyp2f1_euler_complement;
use crate::special::ln_gamma;
use crate::spectral::{expand, CrContext, CrField};
use crate::Complex64;

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Constant of the weighted kernel `x^σ |1 − ζ·η̄|^{−(Q+s−4m)/2}`:
/// `Γ²((Q+s−4m)/4) / (2π^{n'+1} Γ((s−2m)/2))`.
pub fn kernel_constant_cr(cfg: &TraceConfig) -> f64 {
    let a = (cfg.q() + cfg.s - 4.0 * cfg.m as f64) / 4.0;
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    (2.0 * lg(a) - lg(sigma)).exp() / (2.0 * PI.powi(cfg.n_sub() as i32 + 1))
}

/// Constant of the unweighted form `∫ |1 − ζ·η̄|^{−(Q−s)/2} (A_{s−2m} g)(η) dη`:
/// `Γ²((Q−s)/4) / (2π^{n'+1} Γ((s−2m)/2))`.
pub fn alt_kernel_constant_cr(cfg: &TraceConfig) -> f64 {
    let b = (cfg.q() - cfg.s) / 4.0;
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    (2.0 * lg(b) - lg(sigma)).exp() / (2.0 * PI.powi(cfg.n_sub() as i32 + 1))
}

/// `π^m Γ(s/2) / Γ((s−2m)/2)`.
pub fn trace_coefficient_cr(cfg: &TraceConfig) -> f64 {
    let m = cfg.m as f64;
    PI.powf(m) * (lg(cfg.s / 2.0) - lg((cfg.s - 2.0 * m) / 2.0)).exp()
}

/// Radial profile `φ_{pq}` of `P̃` on one bidegree block.
#[derive(Debug, Clone, Copy)]
pub struct CrBlockProfile {
    pub p: usize,
    pub q: usize,
    big: f64,
    small: f64,
    c: f64,
    pref: f64,
    trace_value: f64,
}

impl CrBlockProfile {
    pub fn new(cfg: &TraceConfig, p: usize, q: usize) -> Self {
        let ns = cfg.n_sub() as f64;
        let a = (cfg.q() + cfg.s - 4.0 * cfg.m as f64) / 4.0;
        let b = (cfg.q() - cfg.s) / 4.0;
        let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
        let (pf, qf) = (p as f64, q as f64);
        let c = ns + 1.0 + pf + qf;
        // K_b |S'| (a)_p (a)_q / (n'+1)_{p+q}
        let ln_pref = kernel_constant_cr(cfg).ln() + area(2 * cfg.n_sub() + 1).ln() + lg(a + pf) - lg(a) + lg(a + qf) - lg(a) - lg(c) + lg(ns + 1.0);
        let trace_value = (ln_pref + lg(c) + lg(sigma) - lg(a + pf) - lg(a + qf)).exp();
        Self {
            p,
            q,
            big: b + pf.max(qf),
            small: b + pf.min(qf),
            c,
            pref: ln_pref.exp(),
            trace_value,
        }
    }

    /// `φ_{pq}(x)` for `0 ≤ x ≤ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.trace_value;
        }
        self.pref * hyp2f1_euler_complement(self.big, self.small, self.c, x.min(1.0))
    }

    /// The `x → 0` limit, which is 1 for every block.
    pub fn trace_value(&self) -> f64 {
        self.trace_value
    }
}

/// Block profiles for all bidegrees `p + q ≤ l`, indexed `p (l+1) + q`.
fn profile_table(cfg: &TraceConfig, l: usize) -> Vec<CrBlockProfile> {
    let mut out = Vec::with_capacity((l + 1) * (l + 1));
    for p in 0..=l {
        for q in 0..=l {
            out.push(CrBlockProfile::new(cfg, p, q));
        }
    }
    out
}

fn check_sub(g: &CrField, n: usize, m: usize) -> Result<(), TraceError> {
    if m == 0 || m >= n || g.n() != n - m {
        return Err(TraceError::Config(format!(
            "sub-sphere field on S^{} does not match n = {n}, m = {m}",
            2 * g.n() + 1
        )));
    }
    Ok(())
}

/// Samples `F` at the sub-sphere grid of `sub` (embedded with `ζ'' = 0`)
/// and expands. For `F` of degree `≤ L` the result is exact in degree `≤ L`.
pub fn restrict_cr(f: &CrField, m: usize, sub: &Arc<CrContext>) -> Result<CrField, TraceError> {
    let n = f.n();
    if m == 0 || m >= n || sub.n != n - m {
        return Err(TraceError::Config(format!("cannot restrict S^{} to S^{}", 2 * n + 1, 2 * sub.n + 1)));
    }
    let pts = sub.points();
    let vals: Vec<Complex64> = pts
        .par_iter()
        .map(|eta| {
            let mut z = eta.clone();
            z.resize(n + 1, zero());
            f.eval(&z)
        })
        .collect();
    Ok(expand(sub, vals)?)
}

/// Grid values of `Σ_b g_b ψ_{p_b q_b}(x) Y_{b,hom}(ζ')` on `target`,
/// built through the phase spectra of the big grid.
pub(crate) fn extend_blocks(g: &CrField, target: &Arc<CrContext>, psi: impl Fn(usize, usize, f64) -> f64 + Sync) -> Result<CrField, TraceError> {
    let ns = g.n();
    if target.n <= ns || target.l < g.l() {
        return Err(TraceError::Config(format!(
            "target S^{} of degree {} cannot hold extensions from S^{} of degree {}",
            2 * target.n + 1,
            target.l,
            2 * ns + 1,
            g.l()
        )));
    }
    let nf = (2 * target.l + 1).pow(target.n as u32 + 1);
    let sub = &g.ctx.basis;
    let slots: Vec<usize> = sub
        .funcs
        .iter()
        .map(|f| {
            let mut k = f.kappa.clone();
            k.resize(target.n + 1, 0);
            target.freq_index(&k).expect("sub-sphere phases fit the target")
        })
        .collect();
    let lsub = g.l();
    let spectra: Vec<Vec<Complex64>> = target
        .grid
        .simplex_nodes
        .par_iter()
        .map(|u| {
            let x: f64 = u[ns + 1..].iter().sum();
            let rho2 = (1.0 - x).max(0.0);
            let mut table = vec![f64::NAN; (lsub + 1) * (lsub + 1)];
            let mut buf = vec![zero(); nf];
            let un: Vec<f64> = u[..=ns].iter().map(|v| if rho2 > 0.0 { v / rho2 } else { 0.0 }).collect();
            for ((b, c), slot) in sub.funcs.iter().zip(&g.coeffs).zip(&slots) {
                let deg = b.j + b.k;
                if rho2 <= 0.0 && deg > 0 {
                    continue;
                }
                let t = &mut table[b.j * (lsub + 1) + b.k];
                if t.is_nan() {
                    *t = psi(b.j, b.k, x);
                }
                let amp = if rho2 > 0.0 { b.amplitude(&un) } else { b.norm };
                buf[*slot] += c * (*t * rho2.sqrt().powi(deg as i32) * amp);
            }
            buf
        })
        .collect();
    let values = target.synthesize_spectra(&spectra);
    Ok(expand(target, values)?)
}

/// Pointwise `Σ_b g_b ψ_{p_b q_b}(x) Y_{b,hom}(ζ')`.
fn eval_blocks_at(g: &CrField, zeta: &[Complex64], psi: impl Fn(usize, usize, f64) -> f64) -> Complex64 {
    let ns = g.n();
    let x: f64 = zeta[ns + 1..].iter().map(|c| c.norm_sqr()).sum();
    let rho = (1.0 - x).max(0.0).sqrt();
    let theta: Vec<Complex64> = zeta[..=ns].iter().map(|c| if rho > 0.0 { c / rho } else { zero() }).collect();
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut acc = zero();
    for (b, c) in g.ctx.basis.funcs.iter().zip(&g.coeffs) {
        let deg = b.j + b.k;
        if rho <= 0.0 && deg > 0 {
            continue;
        }
        let t = *cache.entry((b.j, b.k)).or_insert_with(|| psi(b.j, b.k, x));
        let y = if rho > 0.0 { b.eval(&theta) } else { Complex64::new(b.norm, 0.0) };
        acc += c * y * (t * rho.powi(deg as i32));
    }
    acc
}

/// Grid values and bidegree table of `P̃_{s,m} g` on `target`.
pub fn extend_ptilde(g: &CrField, cfg: &TraceConfig, target: &Arc<CrContext>) -> Result<CrField, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    let table = profile_table(cfg, g.l());
    let l = g.l();
    extend_blocks(g, target, |p, q, x| table[p * (l + 1) + q].eval(x))
}

/// `P̃_{s,m} g(ζ)` by the block formula; defined up to the sub-sphere.
pub fn ptilde_at(g: &CrField, cfg: &TraceConfig, zeta: &[Complex64]) -> Result<Complex64, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    Ok(eval_blocks_at(g, zeta, |p, q, x| CrBlockProfile::new(cfg, p, q).eval(x)))
}

fn near_trace(zeta: &[Complex64], ns: usize, delta: f64) -> Result<(f64, Vec<Complex64>), TraceError> {
    let d = distance_to_subsphere_cr(zeta, ns);
    super::check_distance(d, delta)?;
    Ok((d, zeta[..=ns].to_vec()))
}

/// Rule on `S'` graded at the direction of `ζ'`.
fn graded_rule_at(zp: &[Complex64], l: usize, order: usize) -> (GradedCrRule, f64) {
    let rho: f64 = zp.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let theta: Vec<Complex64> = if rho > 1e-300 {
        zp.iter().map(|c| c / rho).collect()
    } else {
        let mut e = vec![zero(); zp.len()];
        e[0] = Complex64::new(1.0, 0.0);
        e
    };
    (GradedCrRule::new(&theta, 1.0 - rho, order, l.max(1)), rho)
}

/// `K x^σ ∫_{S'} |1 − ζ·η̄|^{−(Q+s−4m)/2} g(η) dη` by graded quadrature.
/// Refuses targets within `opts.delta` of the sub-sphere.
pub fn ptilde_direct(g: &CrField, cfg: &TraceConfig, zeta: &[Complex64], opts: &DirectOptions) -> Result<Complex64, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    let ns = cfg.n_sub();
    let (_, zp) = near_trace(zeta, ns, opts.delta)?;
    let x: f64 = zeta[ns + 1..].iter().map(|c| c.norm_sqr()).sum();
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    let expo = -(cfg.q() + cfg.s - 4.0 * cfg.m as f64) / 2.0;
    let (rule, _) = graded_rule_at(&zp, g.l(), opts.order);
    let val = rule.integrate(|eta| {
        let w: Complex64 = zp.iter().zip(eta).map(|(a, b)| a * b.conj()).sum();
        g.eval(eta) * (Complex64::new(1.0, 0.0) - w).norm().powf(expo)
    });
    Ok(val * (kernel_constant_cr(cfg) * x.powf(sigma)))
}

/// `K' ∫_{S'} |1 − ζ·η̄|^{−(Q−s)/2} (A_{s−2m} g)(η) dη` by graded
/// quadrature. The kernel stays integrable on the sub-sphere, so any target
/// is accepted.
pub fn ptilde_alt_direct(g: &CrField, cfg: &TraceConfig, zeta: &[Complex64], order: usize) -> Result<Complex64, TraceError> {
    check_sub(g, cfg.n, cfg.m)?;
    let ns = cfg.n_sub();
    let ag = apply_multiplier(g, &SpectralMultiplier::cr_as(ns, cfg.s - 2.0 * cfg.m as f64)?, false)?;
    let zp = zeta[..=ns].to_vec();
    let expo = -(cfg.q() - cfg.s) / 2.0;
    let rho: f64 = zp.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let val = if rho > 1.0 - 1e-14 {
        // on the sub-sphere: fold the integrable singularity into the rule
        let theta: Vec<Complex64> = zp.iter().map(|c| c / rho).collect();
        GradedCrRule::singular(&theta, -expo, order, g.l().max(1)).integrate(|eta| ag.eval(eta))
    } else {
        let (rule, _) = graded_rule_at(&zp, g.l(), order);
        rule.integrate(|eta| {
            let w: Complex64 = zp.iter().zip(eta).map(|(a, b)| a * b.conj()).sum();
            ag.eval(eta) * (Complex64::new(1.0, 0.0) - w).norm().powf(expo)
        })
    };
    Ok(val * alt_kernel_constant_cr(cfg))
}

/// Trace of `P̃ g` at `θ ∈ S'` extrapolated from direct quadrature along
/// the normal direction `ω ∈ S^{2m−1}`.
pub fn ptilde_trace_direct(
    g: &CrField,
    cfg: &TraceConfig,
    theta: &[Complex64],
    omega: &[Complex64],
    opts: &DirectOptions,
) -> Result<Complex64, TraceError> {
    let sigma = (cfg.s - 2.0 * cfg.m as f64) / 2.0;
    super::extrapolate_trace(opts.delta, &super::trace_terms(sigma, TRACE_TERMS), |d| {
        let z = super::point_off_subsphere_cr(theta, omega, d);
        ptilde_direct(g, cfg, &z, opts)
    })
}

// ---------------------------------------------------------------------------
// Critical order

fn check_pluriharmonic(g: &CrField) -> Result<(), TraceError> {
    let mixed = mixed_energy(g);
    if mixed > 1e-20 * (1.0 + g.total_norm_sq()) {
        return Err(TraceError::NotPluriharmonic { energy: mixed });
    }
    Ok(())
}

/// `s → Q` limit of `P̃`: on pluriharmonic `g` it is the homogeneous
/// extension `g_hom(ζ')`, which is again pluriharmonic.
pub fn extend_ptilde_limit(g: &CrField, m: usize, target: &Arc<CrContext>) -> Result<CrField, TraceError> {
    check_sub(g, target.n, m)?;
    check_pluriharmonic(g)?;
    extend_blocks(g, target, |_, _, _| 1.0)
}

pub fn ptilde_limit_at(g: &CrField, n: usize, m: usize, zeta: &[Complex64]) -> Result<Complex64, TraceError> {
    check_sub(g, n, m)?;
    check_pluriharmonic(g)?;
    Ok(eval_blocks_at(g, zeta, |_, _, _| 1.0))
}

/// The logarithmic-kernel form of the limit,
/// `|S'|⁻¹ ∫ g − π^{−(n'+1)} ∫ ln|1 − ζ·η̄| (A'_{Q'} g)(η) dη`.
pub fn ptilde_limit_direct(g: &CrField, n: usize, m: usize, zeta: &[Complex64], order: usize) -> Result<Complex64, TraceError> {
    check_sub(g, n, m)?;
    check_pluriharmonic(g)?;
    let ns = n - m;
    let ap = apply_multiplier(g, &SpectralMultiplier::cr_as_prime(ns), false)?;
    let zp = zeta[..=ns].to_vec();
    let (rule, _) = graded_rule_at(&zp, g.l(), order);
    let mean = g.ctx.grid.integrate(&g.values) / area(2 * ns + 1);
    let log_part = rule.integrate(|eta| {
        let w: Complex64 = zp.iter().zip(eta).map(|(a, b)| a * b.conj()).sum();
        ap.eval(eta) * (Complex64::new(1.0, 0.0) - w).norm().ln()
    });
    Ok(mean - log_part / PI.powi(ns as i32 + 1))
}

// ---------------------------------------------------------------------------
// Radial expansion of a block

/// Expansion `φ_{pq}(x) = Σ_i a_i R_i(x)`, `R_i = P_i^{(m−1, n'+p+q)}(1−2x)`,
/// so that `R_i Y_hom ∈ H_{p+i, q+i}(S^{2n+1})` for `Y ∈ H_{p,q}(S')`.
#[derive(Debug, Clone)]
pub struct CrBlockSeries {
    pub p: usize,
    pub q: usize,
    pub alpha: f64,
    pub beta: f64,
    pub coeffs: Vec<f64>,
    /// `‖R_i Y_hom‖² / ‖Y‖²`.
    pub norms: Vec<f64>,
}

impl CrBlockSeries {
    pub fn new(cfg: &TraceConfig, p: usize, q: usize, imax: usize) -> Self {
        let alpha = cfg.m as f64 - 1.0;
        let beta = (cfg.n_sub() + p + q) as f64;
        let rule = RadialRule::new(alpha, beta, imax);
        let prof = CrBlockProfile::new(cfg, p, q);
        let vals: Vec<f64> = rule.x.par_iter().map(|&x| prof.eval(x)).collect();
        let coeffs = super::radial_coefficients(&rule, &vals, imax);
        let half_area = area(2 * cfg.m - 1) / 2.0;
        let norms = (0..imax).map(|i| half_area * super::jacobi_unit_norm(i, alpha, beta)).collect();
        Self {
            p,
            q,
            alpha,
            beta,
            coeffs,
            norms,
        }
    }

    pub fn radial(&self, i: usize, x: f64) -> f64 {
        crate::special::jacobi_poly(i, self.alpha, self.beta, 1.0 - 2.0 * x).expect("valid parameters")
    }

    /// Energy terms `λ(p+i, q+i) a_i² ‖R_i Y‖²` of `A_s(P̃Y)` per unit `‖Y‖²`.
    pub fn energy_terms(&self, cfg: &TraceConfig, upto: usize) -> Vec<f64> {
        (0..upto.min(self.coeffs.len()))
            .map(|i| multiplier_as(cfg.n, self.p + i, self.q + i, cfg.s).expect("order in range") * self.coeffs[i].powi(2) * self.norms[i])
            .collect()
    }

    /// Energy of `P̃Y` per unit `‖Y‖²`, with the fitted tail.
    pub fn energy(&self, cfg: &TraceConfig) -> Result<SeriesSum, TraceError> {
        super::sum_with_tail(&self.energy_terms(cfg, self.coeffs.len()))
    }
}

/// Unit normal direction `e₁ ∈ C^m`.
pub fn default_normal_cr(m: usize) -> Vec<Complex64> {
    let mut w = vec![zero(); m];
    w[0] = Complex64::new(1.0, 0.0);
    w
}
