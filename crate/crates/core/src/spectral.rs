//! Band-limited harmonic analysis on `S^{2n+1}` (bidegree spaces `H_{j,k}`)
//! and on round spheres `S^d` (degree spaces).
//!
//! CR expansions use an orthonormal basis adapted to Hopf coordinates
//! `ζ_i = √u_i e^{iφ_i}`: a phase monomial times an orthogonal polynomial on
//! the simplex of moduli. Each basis function lies in a single `H_{j,k}`, so
//! coefficients give the bidegree components directly. The zonal reproducing
//! kernels are kept as an independent reference projection.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{area, CrZonalRule, HopfGrid, PolarGrid, RoundZonalRule};
use crate::special::{gegenbauer_all, jacobi_poly, ln_gamma};
use crate::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid exactness {have} is below the required {needed}")]
    Resolution { needed: usize, have: usize },
    #[error("kernel trace is {value}, not within {tol:e} of an integer")]
    KernelNormalization { value: f64, tol: f64 },
    #[error("bidegree ({j}, {k}) exceeds the truncation degree {l}")]
    Degree { j: usize, k: usize, l: usize },
    #[error("grid size mismatch: expected {expected} values, got {got}")]
    Size { expected: usize, got: usize },
    #[error("CR expansions need n >= 1, got {0}")]
    Dimension(usize),
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed form `dim H_{j,k} = (j+k+n)/n · C(j+n−1, j) C(k+n−1, k)` on
/// `S^{2n+1}`, `n ≥ 1`.
pub fn bidegree_dim_formula(n: usize, j: usize, k: usize) -> usize {
    let v = (j + k + n) as f64 / n as f64 * binom(j + n - 1, j) * binom(k + n - 1, k);
    v.round() as usize
}

/// Dimension of degree-`l` spherical harmonics on `S^d`.
pub fn round_dim(d: usize, l: usize) -> usize {
    let a = binom(l + d, d);
    let b = if l >= 2 { binom(l + d - 2, d) } else { 0.0 };
    (a - b).round() as usize
}

/// Disk polynomial of bidegree `(j, k)` in `w = ζ·η̄`, normalized to 1 at `w = 1`:
/// `w^{j−k} P_k^{(n−1, j−k)}(2|w|²−1)` for `j ≥ k`, conjugate rule otherwise.
pub fn disk_polynomial(n: usize, j: usize, k: usize, w: Complex64) -> Complex64 {
    let (hi, lo, conj) = if j >= k { (j, k, false) } else { (k, j, true) };
    let a = (n as f64) - 1.0;
    let b = (hi - lo) as f64;
    let x = 2.0 * w.norm_sqr() - 1.0;
    let p = jacobi_poly(lo, a, b, x).expect("valid parameters") / jacobi_poly(lo, a, b, 1.0).expect("valid");
    let base = if conj { w.conj() } else { w };
    base.powu((hi - lo) as u32) * p
}

/// Reproducing kernel of `H_{j,k}` as a function of `w = ζ·η̄`. The scale is
/// fixed by idempotence: `c ∫ |Φ(ζ·η̄)|² dη = Φ(1)`.
#[derive(Debug, Clone, Copy)]
pub struct ZonalKernel {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub scale: f64,
}

impl ZonalKernel {
    pub fn new(n: usize, j: usize, k: usize) -> Self {
        let rule = CrZonalRule::smooth(n, j + k + 2);
        let energy = rule.integrate(|w| disk_polynomial(n, j, k, w).norm_sqr());
        Self { n, j, k, scale: 1.0 / energy }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        disk_polynomial(self.n, self.j, self.k, w) * self.scale
    }
}

/// `dim H_{j,k}` as the trace `∫ K(ζ, ζ) dζ` of the normalized kernel.
pub fn bidegree_dim(n: usize, j: usize, k: usize) -> Result<usize, SpectralError> {
    if n == 0 {
        return Err(SpectralError::Dimension(n));
    }
    let ker = ZonalKernel::new(n, j, k);
    let trace = ker.eval(Complex64::new(1.0, 0.0)).re * area(2 * n + 1);
    let r = trace.round();
    if (trace - r).abs() > 1e-6 {
        return Err(SpectralError::KernelNormalization { value: trace, tol: 1e-6 });
    }
    Ok(r as usize)
}

// ---------------------------------------------------------------------------
// Simplex orthogonal polynomials

/// Orthogonal polynomial on the simplex `{u ≥ 0, Σu = 1}` for the weight
/// `Π u_i^{kw_i}`, indexed by the degree vector `r` (`r.len() = kw.len() − 1`),
/// total degree `Σ r`. Built by peeling off `u_0` with a Jacobi factor.
pub fn simplex_poly(kw: &[usize], r: &[usize], u: &[f64]) -> f64 {
    if kw.len() == 1 {
        return 1.0;
    }
    let t = u[0];
    let rest = &u[1..];
    let s: f64 = rest.iter().sum();
    let e: usize = r[1..].iter().sum();
    let kk: usize = kw[1..].iter().sum();
    let alpha = (2 * e + kk + kw.len() - 2) as f64;
    let beta = kw[0] as f64;
    let jac = jacobi_poly(r[0], alpha, beta, 2.0 * t - 1.0).expect("valid parameters");
    if e == 0 {
        return jac;
    }
    if s <= 1e-300 {
        return 0.0;
    }
    let v: Vec<f64> = rest.iter().map(|x| x / s).collect();
    jac * s.powi(e as i32) * simplex_poly(&kw[1..], &r[1..], &v)
}

/// `∫_simplex Π u^{kw} P² du` for the polynomial of [`simplex_poly`].
pub fn simplex_norm_sq(kw: &[usize], r: &[usize]) -> f64 {
    if kw.len() == 1 {
        return 1.0;
    }
    let e: usize = r[1..].iter().sum();
    let kk: usize = kw[1..].iter().sum();
    let a = (2 * e + kk + kw.len() - 2) as f64;
    let b = kw[0] as f64;
    let q = r[0] as f64;
    let lg = |x: f64| ln_gamma(x).expect("positive");
    let h = (lg(q + a + 1.0) + lg(q + b + 1.0) - lg(q + a + b + 1.0) - lg(q + 1.0)).exp() / (2.0 * q + a + b + 1.0);
    h * simplex_norm_sq(&kw[1..], &r[1..])
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut tail in compositions(total - first, parts - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Phase vectors `κ ∈ Z^{len}` with positive parts summing to `pos` and
/// negative parts summing to `neg`.
fn phase_vectors(len: usize, pos: usize, neg: usize) -> Vec<Vec<i32>> {
    if len == 0 {
        return if pos == 0 && neg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for v in -(neg as i32)..=(pos as i32) {
        let (p, q) = if v >= 0 { (pos - v as usize, neg) } else { (pos, neg - (-v) as usize) };
        for mut tail in phase_vectors(len - 1, p, q) {
            tail.insert(0, v);
            out.push(tail);
        }
    }
    out
}

/// One orthonormal basis function of `H_{j,k}`:
/// `norm · Π ζ_i^{κ_i} (ζ̄_i^{−κ_i} for κ_i < 0) · P_r(|ζ_1|², …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFn {
    pub j: usize,
    pub k: usize,
    pub kappa: Vec<i32>,
    pub r: Vec<usize>,
    pub norm: f64,
}

impl BasisFn {
    fn weights(&self) -> Vec<usize> {
        self.kappa.iter().map(|k| k.unsigned_abs() as usize).collect()
    }

    /// Modulus part at simplex point `u` (phase factor excluded).
    pub fn amplitude(&self, u: &[f64]) -> f64 {
        let kw = self.weights();
        let mono: f64 = u
            .iter()
            .zip(&kw)
            .map(|(x, &k)| if k == 0 { 1.0 } else { x.max(0.0).sqrt().powi(k as i32) })
            .product();
        self.norm * mono * simplex_poly(&kw, &self.r, u)
    }

    /// Value at a point of the sphere.
    pub fn eval(&self, zeta: &[Complex64]) -> Complex64 {
        let u: Vec<f64> = zeta.iter().map(|c| c.norm_sqr()).collect();
        let kw = self.weights();
        let mut ph = Complex64::new(1.0, 0.0);
        for (c, &k) in zeta.iter().zip(&self.kappa) {
            if k > 0 {
                ph *= c.powu(k as u32);
            } else if k < 0 {
                ph *= c.conj().powu((-k) as u32);
            }
        }
        ph * self.norm * simplex_poly(&kw, &self.r, &u)
    }

    /// Index of the conjugate basis function's phase vector.
    pub fn conj_kappa(&self) -> Vec<i32> {
        self.kappa.iter().map(|k| -k).collect()
    }
}

/// Orthonormal basis of `⊕_{j+k ≤ L} H_{j,k}` on `S^{2n+1}`, sorted by
/// bidegree so that each `H_{j,k}` occupies a contiguous index range.
#[derive(Debug, Clone)]
pub struct HopfBasis {
    pub n: usize,
    pub l: usize,
    pub funcs: Vec<BasisFn>,
    pub ranges: BTreeMap<(usize, usize), Range<usize>>,
    index: BTreeMap<(Vec<i32>, Vec<usize>), usize>,
}

impl HopfBasis {
    pub fn new(n: usize, l: usize) -> Result<Self, SpectralError> {
        if n == 0 {
            return Err(SpectralError::Dimension(n));
        }
        let mut funcs = Vec::new();
        let mut ranges = BTreeMap::new();
        let vol = (2.0 * std::f64::consts::PI).powi(n as i32 + 1) / 2f64.powi(n as i32);
        for tot in 0..=l {
            for j in (0..=tot).rev() {
                let k = tot - j;
                let start = funcs.len();
                for d in 0..=j.min(k) {
                    for kappa in phase_vectors(n + 1, j - d, k - d) {
                        for r in compositions(d, n) {
                            let kw: Vec<usize> = kappa.iter().map(|x| x.unsigned_abs() as usize).collect();
                            let nsq = vol * simplex_norm_sq(&kw, &r);
                            funcs.push(BasisFn {
                                j,
                                k,
                                kappa: kappa.clone(),
                                r,
                                norm: 1.0 / nsq.sqrt(),
                            });
                        }
                    }
                }
                ranges.insert((j, k), start..funcs.len());
            }
        }
        let index = funcs
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.kappa.clone(), f.r.clone()), i))
            .collect();
        Ok(Self {
            n,
            l,
            funcs,
            ranges,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn range(&self, j: usize, k: usize) -> Result<Range<usize>, SpectralError> {
        self.ranges
            .get(&(j, k))
            .cloned()
            .ok_or(SpectralError::Degree { j, k, l: self.l })
    }

    /// Index of the basis function equal to the conjugate of `funcs[i]`.
    pub fn conjugate_index(&self, i: usize) -> usize {
        let f = &self.funcs[i];
        self.index[&(f.conj_kappa(), f.r.clone())]
    }

    /// Values of all basis functions at one point.
    pub fn eval_all(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        self.funcs.iter().map(|f| f.eval(zeta)).collect()
    }

    /// Value of `Σ c_b B_b` at one point.
    pub fn synthesize_at(&self, coeffs: &[Complex64], zeta: &[Complex64]) -> Complex64 {
        self.funcs.iter().zip(coeffs).map(|(f, c)| c * f.eval(zeta)).sum()
    }
}

// ---------------------------------------------------------------------------
// Separable phase transforms on a Hopf grid

/// Grid plus basis with precomputed simplex amplitudes; shared by all fields
/// on the same discretization.
#[derive(Debug)]
pub struct CrContext {
    pub n: usize,
    pub l: usize,
    pub grid: HopfGrid,
    pub basis: HopfBasis,
    amp: Vec<Vec<f64>>,
    freq_index: Vec<usize>,
}

impl CrContext {
    /// Basis of degree `l` on a grid exact to `degree ≥ 2l`.
    pub fn with_grid_degree(n: usize, l: usize, degree: usize) -> Result<Arc<Self>, SpectralError> {
        if degree < 2 * l {
            return Err(SpectralError::Resolution {
                needed: 2 * l,
                have: degree,
            });
        }
        let grid = HopfGrid::new(n, degree);
        let basis = HopfBasis::new(n, l)?;
        let amp = basis
            .funcs
            .par_iter()
            .map(|f| grid.simplex_nodes.iter().map(|u| f.amplitude(u)).collect())
            .collect();
        let kf = 2 * l + 1;
        let freq_index = basis
            .funcs
            .iter()
            .map(|f| f.kappa.iter().fold(0, |acc, &k| acc * kf + (k + l as i32) as usize))
            .collect();
        Ok(Arc::new(Self {
            n,
            l,
            grid,
            basis,
            amp,
            freq_index,
        }))
    }

    /// Default discretization: basis degree `l`, grid exact to `2l`.
    pub fn new(n: usize, l: usize) -> Result<Arc<Self>, SpectralError> {
        Self::with_grid_degree(n, l, 2 * l)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<Complex64>> {
        self.grid.points()
    }

    fn twiddles(&self, sign: f64) -> Vec<Complex64> {
        let m = self.grid.phases;
        let kf = 2 * self.l + 1;
        let mut tw = Vec::with_capacity(kf * m);
        for kk in 0..kf {
            let k = kk as f64 - self.l as f64;
            for p in 0..m {
                tw.push(Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * k * p as f64 / m as f64));
            }
        }
        tw
    }

    /// Transforms one axis of a row-major tensor between lengths `from`
    /// and `to`; `tw[to_idx * from + from_idx]`.
    fn axis_transform(buf: &[Complex64], dims: &[usize], axis: usize, to: usize, tw: &[Complex64]) -> (Vec<Complex64>, Vec<usize>) {
        let from = dims[axis];
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); outer * to * inner];
        for o in 0..outer {
            for t in 0..to {
                let row = &tw[t * from..(t + 1) * from];
                let dst = &mut out[(o * to + t) * inner..(o * to + t + 1) * inner];
                for (f, w) in row.iter().enumerate() {
                    let src = &buf[(o * from + f) * inner..(o * from + f + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * w;
                    }
                }
            }
        }
        let mut nd = dims.to_vec();
        nd[axis] = to;
        (out, nd)
    }

    /// Index of phase vector `κ` in the per-node spectra, if `|κ_i| ≤ L`.
    pub fn freq_index(&self, kappa: &[i32]) -> Option<usize> {
        let l = self.l as i32;
        if kappa.len() != self.n + 1 || kappa.iter().any(|k| k.abs() > l) {
            return None;
        }
        let kf = 2 * self.l + 1;
        Some(kappa.iter().fold(0, |acc, &k| acc * kf + (k + l) as usize))
    }

    /// Per simplex node, the discrete Fourier coefficients
    /// `Σ_φ f(u, φ) e^{−iκ·φ}` for `|κ_i| ≤ L` (no weights applied).
    pub fn phase_spectra(&self, values: &[Complex64]) -> Result<Vec<Vec<Complex64>>, SpectralError> {
        if values.len() != self.len() {
            return Err(SpectralError::Size {
                expected: self.len(),
                got: values.len(),
            });
        }
        let pc = self.grid.phase_count();
        let kf = 2 * self.l + 1;
        let tw = self.twiddles(-1.0);
        Ok((0..self.grid.simplex_nodes.len())
            .into_par_iter()
            .map(|s| {
                let mut buf = values[s * pc..(s + 1) * pc].to_vec();
                let mut dims = vec![self.grid.phases; self.n + 1];
                for axis in 0..=self.n {
                    let (b, d) = Self::axis_transform(&buf, &dims, axis, kf, &tw);
                    buf = b;
                    dims = d;
                }
                buf
            })
            .collect())
    }

    /// Basis coefficients `∫ f B̄_b` by the grid rule.
    pub fn analysis(&self, values: &[Complex64]) -> Result<Vec<Complex64>, SpectralError> {
        let spectra = self.phase_spectra(values)?;
        let pw = self.grid.phase_weight();
        let coeffs = (0..self.basis.len())
            .into_par_iter()
            .map(|b| {
                let fi = self.freq_index[b];
                let acc: Complex64 = spectra
                    .iter()
                    .zip(&self.grid.simplex_weights)
                    .zip(&self.amp[b])
                    .map(|((sp, w), a)| sp[fi] * (w * a))
                    .sum();
                acc * pw
            })
            .collect();
        Ok(coeffs)
    }

    /// Grid values of `Σ c_b B_b`.
    pub fn synthesis(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let kf = 2 * self.l + 1;
        let nf = kf.pow(self.n as u32 + 1);
        let spectra: Vec<Vec<Complex64>> = (0..self.grid.simplex_nodes.len())
            .into_par_iter()
            .map(|s| {
                let mut buf = vec![Complex64::new(0.0, 0.0); nf];
                for (b, c) in coeffs.iter().enumerate() {
                    buf[self.freq_index[b]] += c * self.amp[b][s];
                }
                buf
            })
            .collect();
        self.synthesize_spectra(&spectra)
    }

    /// Grid values `Σ_κ G_u(κ) e^{iκ·φ}` from per-node spectra laid out as in
    /// [`Self::phase_spectra`].
    pub fn synthesize_spectra(&self, spectra: &[Vec<Complex64>]) -> Vec<Complex64> {
        let pc = self.grid.phase_count();
        let kf = 2 * self.l + 1;
        let m = self.grid.phases;
        // tw[p * kf + kk]: frequency axis (length kf) to phase axis (length m)
        let fwd = self.twiddles(1.0);
        let mut tw = vec![Complex64::new(0.0, 0.0); m * kf];
        for kk in 0..kf {
            for p in 0..m {
                tw[p * kf + kk] = fwd[kk * m + p];
            }
        }
        let out: Vec<Vec<Complex64>> = (0..self.grid.simplex_nodes.len())
            .into_par_iter()
            .map(|s| {
                let mut buf = spectra[s].clone();
                let mut dims = vec![kf; self.n + 1];
                for axis in 0..=self.n {
                    let (b, d) = Self::axis_transform(&buf, &dims, axis, m, &tw);
                    buf = b;
                    dims = d;
                }
                debug_assert_eq!(buf.len(), pc);
                buf
            })
            .collect();
        out.concat()
    }
}

/// Function on `S^{2n+1}`: grid samples plus bidegree coefficient table.
#[derive(Debug, Clone)]
pub struct CrField {
    pub ctx: Arc<CrContext>,
    pub values: Vec<Complex64>,
    pub coeffs: Vec<Complex64>,
}

/// Expands grid samples into bidegree components up to the context degree.
pub fn expand(ctx: &Arc<CrContext>, values: Vec<Complex64>) -> Result<CrField, SpectralError> {
    let coeffs = ctx.analysis(&values)?;
    Ok(CrField {
        ctx: ctx.clone(),
        values,
        coeffs,
    })
}

/// Grid values rebuilt from the components.
pub fn synthesize(f: &CrField) -> Vec<Complex64> {
    f.ctx.synthesis(&f.coeffs)
}

impl CrField {
    pub fn from_fn(ctx: &Arc<CrContext>, f: impl Fn(&[Complex64]) -> Complex64 + Sync) -> Result<Self, SpectralError> {
        let values: Vec<Complex64> = (0..ctx.len()).into_par_iter().map(|i| f(&ctx.grid.point(i))).collect();
        expand(ctx, values)
    }

    /// Field from basis coefficients; grid values are synthesized.
    pub fn from_coeffs(ctx: &Arc<CrContext>, coeffs: Vec<Complex64>) -> Self {
        let values = ctx.synthesis(&coeffs);
        Self {
            ctx: ctx.clone(),
            values,
            coeffs,
        }
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn l(&self) -> usize {
        self.ctx.l
    }

    pub fn component_coeffs(&self, j: usize, k: usize) -> Result<&[Complex64], SpectralError> {
        let r = self.ctx.basis.range(j, k)?;
        Ok(&self.coeffs[r])
    }

    /// `‖P_{j,k} f‖²`.
    pub fn norm_sq(&self, j: usize, k: usize) -> Result<f64, SpectralError> {
        Ok(self.component_coeffs(j, k)?.iter().map(|c| c.norm_sqr()).sum())
    }

    /// Field holding only the `(j, k)` component.
    pub fn component_field(&self, j: usize, k: usize) -> Result<CrField, SpectralError> {
        let r = self.ctx.basis.range(j, k)?;
        let mut c = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        c[r.clone()].copy_from_slice(&self.coeffs[r]);
        Ok(CrField::from_coeffs(&self.ctx, c))
    }

    /// Value of the band-limited expansion at an arbitrary point.
    pub fn eval(&self, zeta: &[Complex64]) -> Complex64 {
        self.ctx.basis.synthesize_at(&self.coeffs, zeta)
    }

    /// Value of the `(j, k)` component at an arbitrary point.
    pub fn eval_component(&self, j: usize, k: usize, zeta: &[Complex64]) -> Result<Complex64, SpectralError> {
        let r = self.ctx.basis.range(j, k)?;
        Ok(self.ctx.basis.funcs[r.clone()]
            .iter()
            .zip(&self.coeffs[r])
            .map(|(f, c)| c * f.eval(zeta))
            .sum())
    }

    /// `Σ ‖components‖²`.
    pub fn total_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `∫ |f|²` from the grid samples.
    pub fn grid_norm_sq(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * self.ctx.grid.weight(i))
            .sum()
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ctx.basis.ranges.keys().copied()
    }

    /// Coefficient table as CSV: `j,k,dim,norm2,lead_re,lead_im`, where the
    /// leading coefficient is the one of largest modulus.
    pub fn coefficient_csv(&self) -> String {
        let mut s = String::from("j,k,dim,norm2,lead_re,lead_im\n");
        for ((j, k), r) in &self.ctx.basis.ranges {
            let cs = &self.coeffs[r.clone()];
            let lead = cs
                .iter()
                .copied()
                .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
                .unwrap_or_default();
            let n2: f64 = cs.iter().map(|c| c.norm_sqr()).sum();
            let _ = writeln!(s, "{j},{k},{},{n2:e},{:e},{:e}", cs.len(), lead.re, lead.im);
        }
        s
    }
}

/// Orthogonal projection onto `H_{j,k}` as grid values.
pub fn project_bidegree(f: &CrField, j: usize, k: usize) -> Result<Vec<Complex64>, SpectralError> {
    Ok(f.component_field(j, k)?.values)
}

/// Reference projection by integrating against the zonal reproducing kernel
/// with the grid rule (quadratic cost in the grid size).
pub fn project_bidegree_kernel(f: &CrField, j: usize, k: usize) -> Result<Vec<Complex64>, SpectralError> {
    let ctx = &f.ctx;
    if j + k > ctx.l {
        return Err(SpectralError::Degree { j, k, l: ctx.l });
    }
    if ctx.grid.exactness < 2 * ctx.l {
        return Err(SpectralError::Resolution {
            needed: 2 * ctx.l,
            have: ctx.grid.exactness,
        });
    }
    let ker = ZonalKernel::new(ctx.n, j, k);
    let pts = ctx.points();
    let w = ctx.grid.weights();
    Ok(pts
        .par_iter()
        .map(|z| {
            pts.iter()
                .zip(&w)
                .zip(&f.values)
                .map(|((e, wi), fv)| {
                    let dot: Complex64 = z.iter().zip(e).map(|(a, b)| a * b.conj()).sum();
                    ker.eval(dot) * fv * *wi
                })
                .sum()
        })
        .collect())
}

/// `sup |Y(e^{iθ}ζ) − e^{i(j−k)θ} Y(ζ)|` over the grid for the `(j, k)`
/// component of `f`.
pub fn phase_equivariance_check(f: &CrField, j: usize, k: usize, theta: f64) -> Result<f64, SpectralError> {
    let r = f.ctx.basis.range(j, k)?;
    let funcs = &f.ctx.basis.funcs[r.clone()];
    let cs = &f.coeffs[r];
    let rot = Complex64::from_polar(1.0, theta);
    let factor = Complex64::from_polar(1.0, (j as f64 - k as f64) * theta);
    let pts = f.ctx.points();
    Ok(pts
        .par_iter()
        .map(|z| {
            let zr: Vec<Complex64> = z.iter().map(|c| c * rot).collect();
            let a: Complex64 = funcs.iter().zip(cs).map(|(b, c)| c * b.eval(&zr)).sum();
            let b: Complex64 = funcs.iter().zip(cs).map(|(b, c)| c * b.eval(z)).sum();
            (a - factor * b).norm()
        })
        .reduce(|| 0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Round spheres

/// Real orthonormal spherical harmonic on `S^d` built by the polar recursion
/// `(1−t²)^{l'/2} C_{l−l'}^{(l'+(d−1)/2)}(t) Y'(ω)` with a cosine or sine on
/// the final circle. `chain = [l_d, l_{d−1}, …, l_1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFn {
    pub chain: Vec<usize>,
    pub sine: bool,
    pub norm: f64,
}

impl RoundFn {
    pub fn degree(&self) -> usize {
        self.chain[0]
    }

    fn eval_raw(chain: &[usize], sine: bool, x: &[f64]) -> f64 {
        let d = x.len() - 1;
        if d == 1 {
            let l = chain[0] as f64;
            let phi = x[1].atan2(x[0]);
            return if chain[0] == 0 {
                1.0
            } else if sine {
                (l * phi).sin()
            } else {
                (l * phi).cos()
            };
        }
        let (l, lp) = (chain[0], chain[1]);
        let t = x[d].clamp(-1.0, 1.0);
        let r2 = (1.0 - t * t).max(0.0);
        let lam = lp as f64 + (d as f64 - 1.0) / 2.0;
        let c = *gegenbauer_all(l - lp, lam, t).last().expect("nonempty");
        if lp > 0 && r2 <= 1e-300 {
            return 0.0;
        }
        let r = r2.sqrt();
        let omega: Vec<f64> = if r > 1e-300 {
            x[..d].iter().map(|v| v / r).collect()
        } else {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        };
        r.powi(lp as i32) * c * Self::eval_raw(&chain[1..], sine, &omega)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.norm * Self::eval_raw(&self.chain, self.sine, x)
    }
}

fn round_norm_sq(d: usize, chain: &[usize]) -> f64 {
    if d == 1 {
        return if chain[0] == 0 { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
    }
    let (l, lp) = (chain[0], chain[1]);
    let q = (l - lp) as f64;
    let lam = lp as f64 + (d as f64 - 1.0) / 2.0;
    let lg = |x: f64| ln_gamma(x).expect("positive");
    // ∫(1−t²)^{λ−1/2} C_q^λ(t)² dt = π 2^{1−2λ} Γ(q+2λ) / (q! (q+λ) Γ(λ)²)
    let h = (std::f64::consts::PI.ln() + (1.0 - 2.0 * lam) * std::f64::consts::LN_2 + lg(q + 2.0 * lam)
        - lg(q + 1.0)
        - 2.0 * lg(lam))
    .exp()
        / (q + lam);
    h * round_norm_sq(d - 1, &chain[1..])
}

fn round_chains(d: usize, l: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![l]];
    }
    let mut out = Vec::new();
    for lp in 0..=l {
        for mut tail in round_chains(d - 1, lp) {
            tail.insert(0, l);
            out.push(tail);
        }
    }
    out
}

/// Real orthonormal basis of degree ≤ `L` harmonics on `S^d`, grouped by degree.
#[derive(Debug, Clone)]
pub struct RoundBasis {
    pub d: usize,
    pub l: usize,
    pub funcs: Vec<RoundFn>,
    pub ranges: Vec<Range<usize>>,
}

impl RoundBasis {
    pub fn new(d: usize, l: usize) -> Self {
        assert!(d >= 1, "round basis needs d >= 1");
        let mut funcs = Vec::new();
        let mut ranges = Vec::new();
        for deg in 0..=l {
            let start = funcs.len();
            for chain in round_chains(d, deg) {
                let last = *chain.last().expect("nonempty");
                let nsq = round_norm_sq(d, &chain);
                funcs.push(RoundFn {
                    chain: chain.clone(),
                    sine: false,
                    norm: 1.0 / nsq.sqrt(),
                });
                if last > 0 {
                    funcs.push(RoundFn {
                        chain,
                        sine: true,
                        norm: 1.0 / nsq.sqrt(),
                    });
                }
            }
            ranges.push(start..funcs.len());
        }
        Self { d, l, funcs, ranges }
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn synthesize_at(&self, coeffs: &[f64], x: &[f64]) -> f64 {
        self.funcs.iter().zip(coeffs).map(|(f, c)| c * f.eval(x)).sum()
    }
}

/// Polar grid plus round basis with the basis sampled on the grid.
#[derive(Debug)]
pub struct RoundContext {
    pub d: usize,
    pub l: usize,
    pub grid: PolarGrid,
    pub basis: RoundBasis,
    table: Vec<Vec<f64>>,
}

impl RoundContext {
    pub fn with_grid_degree(d: usize, l: usize, degree: usize) -> Result<Arc<Self>, SpectralError> {
        if degree < 2 * l {
            return Err(SpectralError::Resolution {
                needed: 2 * l,
                have: degree,
            });
        }
        let grid = PolarGrid::new(d, degree);
        let basis = RoundBasis::new(d, l);
        let table = basis
            .funcs
            .par_iter()
            .map(|f| grid.nodes.iter().map(|x| f.eval(x)).collect())
            .collect();
        Ok(Arc::new(Self {
            d,
            l,
            grid,
            basis,
            table,
        }))
    }

    pub fn new(d: usize, l: usize) -> Result<Arc<Self>, SpectralError> {
        Self::with_grid_degree(d, l, 2 * l)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn analysis(&self, values: &[f64]) -> Result<Vec<f64>, SpectralError> {
        if values.len() != self.len() {
            return Err(SpectralError::Size {
                expected: self.len(),
                got: values.len(),
            });
        }
        Ok(self
            .table
            .par_iter()
            .map(|row| row.iter().zip(values).zip(&self.grid.weights).map(|((y, v), w)| y * v * w).sum())
            .collect())
    }

    pub fn synthesis(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| self.table.iter().zip(coeffs).map(|(row, c)| row[i] * c).sum())
            .collect()
    }
}

/// Real function on `S^d`: grid samples plus degree-indexed coefficients.
#[derive(Debug, Clone)]
pub struct SphereField {
    pub ctx: Arc<RoundContext>,
    pub values: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl SphereField {
    pub fn expand(ctx: &Arc<RoundContext>, values: Vec<f64>) -> Result<Self, SpectralError> {
        let coeffs = ctx.analysis(&values)?;
        Ok(Self {
            ctx: ctx.clone(),
            values,
            coeffs,
        })
    }

    pub fn from_fn(ctx: &Arc<RoundContext>, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self, SpectralError> {
        let values = ctx.grid.nodes.par_iter().map(|x| f(x)).collect();
        Self::expand(ctx, values)
    }

    pub fn from_coeffs(ctx: &Arc<RoundContext>, coeffs: Vec<f64>) -> Self {
        let values = ctx.synthesis(&coeffs);
        Self {
            ctx: ctx.clone(),
            values,
            coeffs,
        }
    }

    pub fn degree_coeffs(&self, l: usize) -> Result<&[f64], SpectralError> {
        let r = self
            .ctx
            .basis
            .ranges
            .get(l)
            .cloned()
            .ok_or(SpectralError::Degree { j: l, k: 0, l: self.ctx.l })?;
        Ok(&self.coeffs[r])
    }

    pub fn norm_sq(&self, l: usize) -> Result<f64, SpectralError> {
        Ok(self.degree_coeffs(l)?.iter().map(|c| c * c).sum())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.ctx.basis.synthesize_at(&self.coeffs, x)
    }

    pub fn synthesize(&self) -> Vec<f64> {
        self.ctx.synthesis(&self.coeffs)
    }
}

/// Projection onto degree-`l` harmonics, as grid values.
pub fn project_degree(f: &SphereField, l: usize) -> Result<Vec<f64>, SpectralError> {
    let r = f
        .ctx
        .basis
        .ranges
        .get(l)
        .cloned()
        .ok_or(SpectralError::Degree { j: l, k: 0, l: f.ctx.l })?;
    let mut c = vec![0.0; f.coeffs.len()];
    c[r.clone()].copy_from_slice(&f.coeffs[r]);
    Ok(f.ctx.synthesis(&c))
}

/// Reference projection with the Gegenbauer zonal kernel
/// `dim_l/|S^d| · Z_l(x·y)`.
pub fn project_degree_kernel(f: &SphereField, l: usize) -> Vec<f64> {
    let d = f.ctx.d;
    let scale = round_dim(d, l) as f64 / area(d);
    let nodes = &f.ctx.grid.nodes;
    nodes
        .par_iter()
        .map(|x| {
            nodes
                .iter()
                .zip(&f.ctx.grid.weights)
                .zip(&f.values)
                .map(|((y, w), v)| {
                    let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                    let z = *crate::special::zonal_legendre_all(l, d, t.clamp(-1.0, 1.0)).last().expect("nonempty");
                    scale * z * w * v
                })
                .sum()
        })
        .collect()
}

/// `∫_{S^d} Z_l(ζ·e)² dζ` via the zonal rule: used to sanity check the
/// Gegenbauer kernel normalization.
pub fn round_kernel_trace(d: usize, l: usize) -> f64 {
    let rule = RoundZonalRule::smooth(d, l + 2);
    let e = rule.integrate(|t| crate::special::zonal_legendre_all(l, d, t).last().copied().unwrap_or(1.0).powi(2));
    area(d) / e
}
