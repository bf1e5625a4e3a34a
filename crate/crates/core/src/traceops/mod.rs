//! Restriction to sub-spheres, the explicit extension operators and the
//! energy-splitting identities they satisfy.
//!
//! Extensions are evaluated two ways. Block formulas act on each sub-sphere
//! harmonic through a one-variable profile in `x = |ζ''|²` (closed form via
//! ₂F₁); they are valid up to and including the sub-sphere. Direct kernel
//! quadratures integrate the defining kernels over the sub-sphere with rules
//! graded at the target point; they refuse targets closer than `δ` and are
//! extrapolated towards the trace.

pub mod cr;
pub mod heis;
pub mod pythagoras;
pub mod round;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{area, HopfGrid, PolarGrid};
use crate::operators::OperatorError;
use crate::special::integrate::{unit_rule, GradedRule};
use crate::special::ln_gamma;
use crate::spectral::SpectralError;
use crate::Complex64;

pub use cr::*;
pub use heis::*;
pub use pythagoras::*;
pub use round::*;

/// Default exclusion distance from the sub-sphere for direct kernel
/// quadrature.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Correction terms removed when extrapolating to the sub-sphere.
pub const TRACE_TERMS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("invalid trace configuration: {0}")]
    Config(String),
    #[error("target at distance {distance:e} from the sub-sphere, inside δ = {delta}")]
    NearTrace { distance: f64, delta: f64 },
    #[error("input has energy {energy:e} outside the pluriharmonic bidegrees")]
    NotPluriharmonic { energy: f64 },
    #[error("radial series is not summable (fitted decay exponent {gamma})")]
    Tail { gamma: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// `(n, m, s)`: trace of `S^{2n+1}` (or `S^n`) onto the sub-sphere of
/// complex (or real) codimension `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub n: usize,
    pub m: usize,
    pub s: f64,
}

impl TraceConfig {
    fn check_nm(n: usize, m: usize) -> Result<(), TraceError> {
        if n < 2 || m < 1 || m >= n {
            return Err(TraceError::Config(format!("need n >= 2 and 1 <= m < n, got n={n}, m={m}")));
        }
        Ok(())
    }

    /// CR case: `2m < s < Q_n`.
    pub fn cr(n: usize, m: usize, s: f64) -> Result<Self, TraceError> {
        Self::check_nm(n, m)?;
        let q = (2 * n + 2) as f64;
        if !(s > 2.0 * m as f64 && s < q) {
            return Err(TraceError::Config(format!("need 2m < s < Q = {q}, got s = {s}")));
        }
        Ok(Self { n, m, s })
    }

    /// CR case at the critical order `s = Q_n`.
    pub fn cr_critical(n: usize, m: usize) -> Result<Self, TraceError> {
        Self::check_nm(n, m)?;
        Ok(Self {
            n,
            m,
            s: (2 * n + 2) as f64,
        })
    }

    /// Round case: `m < s ≤ n`.
    pub fn round(n: usize, m: usize, s: f64) -> Result<Self, TraceError> {
        Self::check_nm(n, m)?;
        if !(s > m as f64 && s <= n as f64) {
            return Err(TraceError::Config(format!("need m < s <= n = {n}, got s = {s}")));
        }
        Ok(Self { n, m, s })
    }

    /// `n − m`.
    pub fn n_sub(&self) -> usize {
        self.n - self.m
    }

    pub fn q(&self) -> f64 {
        (2 * self.n + 2) as f64
    }

    /// Trace exponent `p = 2(Q − 2m)/(Q − s)`.
    pub fn p_exponent(&self) -> f64 {
        2.0 * (self.q() - 2.0 * self.m as f64) / (self.q() - self.s)
    }
}

// ---------------------------------------------------------------------------
// Radial quadrature and series

/// Rule for `∫₀¹ f(x) x^α (1−x)^β dx` with `f` allowed a fractional power
/// singularity at `x = 0` and oscillation up to Jacobi degree `imax`. Built in
/// `x = sin²(θ/2)`: uniform Gauss panels in `θ`, geometric panels near 0.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub alpha: f64,
    pub beta: f64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl RadialRule {
    pub fn new(alpha: f64, beta: f64, imax: usize) -> Self {
        let gl = unit_rule(16, 0.0, 0.0);
        let panels = (imax / 2 + 8).max(16);
        let h = std::f64::consts::PI / panels as f64;
        let mut edges = vec![0.0];
        let mut lo = h * 0.5f64.powi(48);
        edges.push(lo);
        while lo < h {
            lo = (2.0 * lo).min(h);
            edges.push(lo);
        }
        for k in 2..=panels {
            edges.push(h * k as f64);
        }
        let mut x = Vec::new();
        let mut w = Vec::new();
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            for (t, wt) in gl.0.iter().zip(&gl.1) {
                let th = a + (b - a) * t;
                let (sh, ch) = (0.5 * th).sin_cos();
                // dx = sin(θ/2) cos(θ/2) dθ
                let dens = sh.powf(2.0 * alpha + 1.0) * ch.powf(2.0 * beta + 1.0);
                x.push(sh * sh);
                w.push(wt * (b - a) * dens);
            }
        }
        Self { alpha, beta, x, w }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(*x)).sum()
    }
}

/// `∫₀¹ P_i^{(α,β)}(1−2x)² x^α (1−x)^β dx`.
pub fn jacobi_unit_norm(i: usize, alpha: f64, beta: f64) -> f64 {
    let lg = |x: f64| ln_gamma(x).expect("positive");
    let k = i as f64;
    (lg(k + alpha + 1.0) + lg(k + beta + 1.0) - lg(k + alpha + beta + 1.0) - lg(k + 1.0)).exp()
        / (2.0 * k + alpha + beta + 1.0)
}

/// Coefficients `a_i = ∫ φ R_i x^α(1−x)^β / h_i`, `R_i = P_i^{(α,β)}(1−2x)`,
/// for `i < imax`, from profile values at the rule nodes. Coefficients at
/// the rounding level of the largest one are set to zero.
pub fn radial_coefficients(rule: &RadialRule, profile: &[f64], imax: usize) -> Vec<f64> {
    let (alpha, beta) = (rule.alpha, rule.beta);
    let mut acc = vec![0.0; imax];
    for ((x, w), f) in rule.x.iter().zip(&rule.w).zip(profile) {
        let r = crate::special::jacobi_all(imax.saturating_sub(1), alpha, beta, 1.0 - 2.0 * x);
        for (a, ri) in acc.iter_mut().zip(&r) {
            *a += w * f * ri;
        }
    }
    let mut a: Vec<f64> = acc.iter().enumerate().map(|(i, a)| a / jacobi_unit_norm(i, alpha, beta)).collect();
    let floor = 1e-12 * a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter_mut().filter(|v| v.abs() <= floor).for_each(|v| *v = 0.0);
    a
}

/// Partial sum of a positive series plus a fitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub partial: f64,
    pub tail: f64,
    /// Spread of the tail between two fitting windows.
    pub tail_error: f64,
    /// Fitted algebraic decay exponent of the terms.
    pub decay: f64,
}

impl SeriesSum {
    pub fn total(&self) -> f64 {
        self.partial + self.tail
    }
}

fn fit_decay(terms: &[f64], lo: usize, hi: usize) -> Option<[f64; 4]> {
    let idx: Vec<usize> = (lo.max(1)..hi).filter(|&i| terms[i] > 0.0).collect();
    if idx.len() < 8 {
        return None;
    }
    let a = DMatrix::from_fn(idx.len(), 4, |r, c| {
        let i = idx[r] as f64;
        match c {
            0 => 1.0,
            1 => -i.ln(),
            2 => 1.0 / i,
            _ => 1.0 / (i * i),
        }
    });
    let b = DVector::from_iterator(idx.len(), idx.iter().map(|&i| terms[i].ln()));
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    Some([sol[0], sol[1], sol[2], sol[3]])
}

fn fitted_tail(p: &[f64; 4], from: usize) -> f64 {
    let model = |i: f64| (p[0] - p[1] * i.ln() + p[2] / i + p[3] / (i * i)).exp();
    let end = 20 * from.max(1);
    let mut s = 0.0;
    for i in from..end {
        s += model(i as f64);
    }
    let e = end as f64 - 0.5;
    s + model(e) * e / (p[1] - 1.0)
}

/// Sums `terms` and estimates `Σ_{i ≥ len}` by fitting
/// `ln t_i = c − γ ln i + d/i + e/i²` on the upper half of the terms.
pub fn sum_with_tail(terms: &[f64]) -> Result<SeriesSum, TraceError> {
    let partial: f64 = terms.iter().sum();
    let n = terms.len();
    let scale = partial.abs().max(1e-300);
    let last = &terms[n / 2..];
    if n < 16 || last.iter().all(|t| t.abs() <= 1e-28 * scale) {
        return Ok(SeriesSum {
            partial,
            tail: 0.0,
            tail_error: 0.0,
            decay: f64::INFINITY,
        });
    }
    let p1 = fit_decay(terms, n / 2, n).ok_or(TraceError::Tail { gamma: f64::NAN })?;
    if p1[1] <= 1.02 {
        return Err(TraceError::Tail { gamma: p1[1] });
    }
    let tail = fitted_tail(&p1, n);
    let tail_error = match fit_decay(terms, n / 4, n / 2) {
        Some(p2) if p2[1] > 1.02 => (fitted_tail(&p2, n) - tail).abs(),
        _ => tail.abs(),
    };
    Ok(SeriesSum {
        partial,
        tail,
        tail_error,
        decay: p1[1],
    })
}

/// Correction term in a distance expansion `v(d) = v₀ + Σ c_k φ_k(d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    /// `d^e`
    Pow(f64),
    /// `d^e ln d`
    PowLog(f64),
}

impl Term {
    fn eval(&self, d: f64) -> f64 {
        match *self {
            Term::Pow(e) => d.powf(e),
            Term::PowLog(e) => d.powf(e) * d.ln(),
        }
    }
}

/// The first `count` correction terms of a trace limit whose profile
/// behaves like `A(t²) + t^{2σ} B(t²)` in `t = sin d`. Where the two
/// families collide (integer `σ`) the fractional one turns logarithmic.
pub fn trace_terms(sigma: f64, count: usize) -> Vec<Term> {
    let integer = (sigma - sigma.round()).abs() < 1e-9;
    let mut all: Vec<(f64, u8, Term)> = Vec::new();
    for k in 0..=count {
        let e = 2.0 * (k + 1) as f64;
        all.push((e, 1, Term::Pow(e)));
        let f = 2.0 * sigma + 2.0 * k as f64;
        if integer {
            all.push((f, 0, Term::PowLog(f)));
        } else if all.iter().all(|(x, _, _)| (x - f).abs() > 1e-9) {
            all.push((f, 0, Term::Pow(f)));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.dedup_by(|a, b| a.2 == b.2);
    all.into_iter().take(count).map(|t| t.2).collect()
}

/// Extrapolates to `d = 0` from `terms.len() + 1` samples.
pub fn richardson_terms(ds: &[f64], vals: &[f64], terms: &[Term]) -> f64 {
    assert_eq!(ds.len(), terms.len() + 1, "need one more sample than terms");
    assert_eq!(ds.len(), vals.len());
    let k = ds.len();
    let a = DMatrix::from_fn(k, k, |r, c| if c == 0 { 1.0 } else { terms[c - 1].eval(ds[r]) });
    let b = DVector::from_column_slice(vals);
    a.lu().solve(&b).map(|x| x[0]).unwrap_or(f64::NAN)
}

/// [`richardson_terms`] with pure powers.
pub fn richardson(ds: &[f64], vals: &[f64], exps: &[f64]) -> f64 {
    let terms: Vec<Term> = exps.iter().map(|&e| Term::Pow(e)).collect();
    richardson_terms(ds, vals, &terms)
}

pub fn richardson_complex(ds: &[f64], vals: &[Complex64], terms: &[Term]) -> Complex64 {
    let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
    let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
    Complex64::new(richardson_terms(ds, &re, terms), richardson_terms(ds, &im, terms))
}

/// Settings for direct kernel quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    /// Minimum geodesic distance from the sub-sphere.
    pub delta: f64,
    /// Gauss points per panel in the graded rules.
    pub order: usize,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            order: 20,
        }
    }
}

/// Samples `eval` at geodesic distances `δ, 2δ, …` (one more than the
/// number of terms) and extrapolates in `t = sin d` to the trace.
pub fn extrapolate_trace<E>(delta: f64, terms: &[Term], mut eval: impl FnMut(f64) -> Result<Complex64, E>) -> Result<Complex64, E> {
    let ds: Vec<f64> = (1..=terms.len() + 1).map(|k| k as f64 * delta).collect();
    let mut vals = Vec::with_capacity(ds.len());
    for &d in &ds {
        vals.push(eval(d)?);
    }
    let ts: Vec<f64> = ds.iter().map(|d| d.sin()).collect();
    Ok(richardson_complex(&ts, &vals, terms))
}

// ---------------------------------------------------------------------------
// Sub-sphere rules graded at a target point

/// Points and weights on `S^{2k−1} ⊂ C^k`, exact for polynomials of the
/// given degree.
pub fn complex_sphere_rule(k: usize, degree: usize) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    if k == 1 {
        let m = degree + 1;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let pts = (0..m).map(|j| vec![Complex64::from_polar(1.0, h * j as f64)]).collect();
        return (pts, vec![h; m]);
    }
    let g = HopfGrid::new(k - 1, degree);
    (g.points(), g.weights())
}

/// Points and weights on `S^{k−1} ⊂ R^k`.
pub fn real_sphere_rule(k: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    match k {
        1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
        2 => {
            let m = degree + 1;
            let h = 2.0 * std::f64::consts::PI / m as f64;
            let pts = (0..m)
                .map(|j| {
                    let (s, c) = (h * j as f64).sin_cos();
                    vec![c, s]
                })
                .collect();
            (pts, vec![h; m])
        }
        _ => {
            let g = PolarGrid::new(k - 1, degree);
            (g.nodes, g.weights)
        }
    }
}

/// Orthonormal basis of the complex orthogonal complement of unit `θ`.
pub fn complex_frame(theta: &[Complex64]) -> Vec<Vec<Complex64>> {
    let d = theta.len();
    let mut basis: Vec<Vec<Complex64>> = vec![theta.to_vec()];
    for e in 0..d {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[e] = Complex64::new(1.0, 0.0);
        for b in &basis {
            let c: Complex64 = v.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nn: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nn > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nn);
            basis.push(v);
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Orthonormal basis of the orthogonal complement of unit `θ ∈ R^d`.
pub fn real_frame(theta: &[f64]) -> Vec<Vec<f64>> {
    let d = theta.len();
    let mut basis: Vec<Vec<f64>> = vec![theta.to_vec()];
    for e in 0..d {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nn > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nn);
            basis.push(v);
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Rule on `S^{2k+1} ⊂ C^{k+1}` concentrating nodes near `θ` at length scale
/// `scale` (in `|1 − θ·η̄|`). Polar coordinates about `w = 1` in the disk
/// variable `w = θ·η̄`, graded in the radius with the angle inside; `inner_degree` sets the rule
/// on the complementary sphere `S^{2k−1}`.
#[derive(Debug, Clone)]
pub struct GradedCrRule {
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl GradedCrRule {
    pub fn new(theta: &[Complex64], scale: f64, order: usize, inner_degree: usize) -> Self {
        Self::build(theta, scale.max(1e-14), order, inner_degree, 0.0)
    }

    /// Rule for `∫ |1 − θ·η̄|^{−power} f(η) dη` with the kernel folded into
    /// the weights; integrate `f` alone. Needs `power < 2k + 2`.
    pub fn singular(theta: &[Complex64], power: f64, order: usize, inner_degree: usize) -> Self {
        Self::build(theta, 1e-14, order, inner_degree, power)
    }

    fn build(theta: &[Complex64], scale: f64, order: usize, inner_degree: usize, power: f64) -> Self {
        let k = theta.len() - 1;
        assert!(k >= 1, "sub-sphere must have complex dimension >= 2");
        let kf = k as f64;
        let frame = complex_frame(theta);
        let (inner, inner_w) = complex_sphere_rule(k, inner_degree);
        let inner_vecs: Vec<Vec<Complex64>> = inner
            .iter()
            .map(|c| {
                let mut v = vec![Complex64::new(0.0, 0.0); k + 1];
                for (ci, f) in c.iter().zip(&frame) {
                    v.iter_mut().zip(f).for_each(|(x, y)| *x += ci * y);
                }
                v
            })
            .collect();
        // w = 1 − 2τ e^{iψ}, |ψ| < arccos τ; measure 4^k τ^k (cos ψ − τ)^{k−1} dτ dψ
        let g1 = (2.0 * kf - 1.0) / 2.0;
        // |1 − w| = 2τ, folded in when `power` is set
        let tr = GradedRule::new(kf - power, g1, 0.5 * scale, order);
        let sr = unit_rule(order, kf - 1.0, kf - 1.0);
        let c = 4f64.powi(k as i32) * 2f64.powf(2.0 * kf - 1.0 - power);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (tau, wt) in tr.nodes.iter().zip(&tr.weights) {
            let pmax = tau.clamp(-1.0, 1.0).acos();
            let wtau = c * wt * pmax.powf(2.0 * kf - 1.0) / (1.0 - tau).powf(g1);
            for (su, ws) in sr.0.iter().zip(&sr.1) {
                let sv = 2.0 * su - 1.0;
                let psi = pmax * sv;
                let ratio = if k == 1 {
                    1.0
                } else {
                    ((psi.cos() - tau) / (pmax * pmax * (1.0 - sv * sv))).powi(k as i32 - 1)
                };
                let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(2.0 * tau, psi);
                let rad = (4.0 * tau * (psi.cos() - tau)).max(0.0).sqrt();
                let wc = w.conj();
                for (iv, iw) in inner_vecs.iter().zip(&inner_w) {
                    let p: Vec<Complex64> = theta.iter().zip(iv).map(|(t, x)| wc * t + x * rad).collect();
                    points.push(p);
                    weights.push(wtau * ws * ratio * iw);
                }
            }
        }
        Self { points, weights }
    }

    pub fn integrate(&self, f: impl Fn(&[Complex64]) -> Complex64 + Sync) -> Complex64 {
        use rayon::prelude::*;
        self.points
            .par_iter()
            .zip(&self.weights)
            .map(|(p, w)| f(p) * *w)
            .sum()
    }
}

/// Rule on `S^k ⊂ R^{k+1}` graded near `θ` at scale `scale` in `1 − θ·η`.
#[derive(Debug, Clone)]
pub struct GradedRoundRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl GradedRoundRule {
    pub fn new(theta: &[f64], scale: f64, order: usize, inner_degree: usize) -> Self {
        let scale = scale.max(1e-14);
        let k = theta.len() - 1;
        assert!(k >= 1, "sub-sphere must have dimension >= 1");
        let frame = real_frame(theta);
        let (inner, inner_w) = real_sphere_rule(k, inner_degree);
        let g = (k as f64 - 2.0) / 2.0;
        // t = θ·η = 1 − 2u, 1 − t² = 4u(1−u), dt = 2 du
        let tr = GradedRule::new(g, g, scale / 2.0, order);
        let c = 2.0 * 4f64.powf(g);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (u, wu) in tr.nodes.iter().zip(&tr.weights) {
            let t = 1.0 - 2.0 * u;
            let r = (4.0 * u * (1.0 - u)).max(0.0).sqrt();
            for (iv, iw) in inner.iter().zip(&inner_w) {
                let mut p: Vec<f64> = theta.iter().map(|x| t * x).collect();
                for (ci, f) in iv.iter().zip(&frame) {
                    p.iter_mut().zip(f).for_each(|(x, y)| *x += r * ci * y);
                }
                points.push(p);
                weights.push(c * wu * iw);
            }
        }
        Self { points, weights }
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Geodesic distance from a point of `S^{2n+1}` to the sub-sphere
/// `{ζ'' = 0}` spanned by the first `n − m + 1` coordinates.
pub fn distance_to_subsphere_cr(zeta: &[Complex64], n_sub: usize) -> f64 {
    let x: f64 = zeta[n_sub + 1..].iter().map(|c| c.norm_sqr()).sum();
    x.min(1.0).sqrt().asin()
}

pub fn distance_to_subsphere_round(x: &[f64], n_sub: usize) -> f64 {
    let w: f64 = x[n_sub + 1..].iter().map(|c| c * c).sum();
    w.min(1.0).sqrt().asin()
}

/// Refuses evaluation closer than `delta` (with a relative slack for
/// rounding in the distance itself).
pub fn check_distance(distance: f64, delta: f64) -> Result<(), TraceError> {
    if distance < delta * (1.0 - 1e-9) {
        return Err(TraceError::NearTrace { distance, delta });
    }
    Ok(())
}

/// `cos d · (θ, 0) + sin d · (0, ω)`.
pub fn point_off_subsphere_cr(theta: &[Complex64], omega: &[Complex64], d: f64) -> Vec<Complex64> {
    let (s, c) = d.sin_cos();
    theta.iter().map(|t| t * c).chain(omega.iter().map(|o| o * s)).collect()
}

pub fn point_off_subsphere_round(theta: &[f64], omega: &[f64], d: f64) -> Vec<f64> {
    let (s, c) = d.sin_cos();
    theta.iter().map(|t| t * c).chain(omega.iter().map(|o| o * s)).collect()
}

/// `|S^{k}|` with `|S^0| = 2`.
pub fn sphere_measure(k: usize) -> f64 {
    area(k)
}
