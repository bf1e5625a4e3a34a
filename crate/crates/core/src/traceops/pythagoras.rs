//! Energy splitting `E(F) = E(F − Ext(F|S')) + c · E'(F|S')`.
//!
//! With `g = F|S'` and `X = ⟨A F, Ext g⟩` the residual energy is
//! `E(F) − 2 Re X + E(Ext g)`. `X` only sees the components of `Ext g` of
//! degree at most `L`, which are formed exactly from the radial series of
//! each block. `E(Ext g)` needs the full series and is summed per block with
//! a fitted tail; truncating it at fewer radial terms gives the refinement
//! levels reported alongside.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::cr::{extend_blocks, extend_ptilde_limit, restrict_cr, trace_coefficient_cr, CrBlockSeries};
use super::round::{eval_with, restrict_round, trace_coefficient_round, RoundBlockSeries};
use super::{TraceConfig, TraceError};
use crate::operators::{energy, energy_round, multiplier_as, multiplier_ps, SpectralMultiplier};
use crate::spectral::{CrContext, CrField, RoundContext, SphereField};

/// Radial truncation for the extension energy.
#[derive(Debug, Clone, Copy)]
pub struct SplitOptions {
    pub radial_terms: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { radial_terms: 256 }
    }
}

/// Defect when `E(Ext g)` is cut at `radial_terms` terms per block
/// (`None`: all terms plus the fitted tail).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SplitLevel {
    pub radial_terms: Option<usize>,
    pub residual: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EnergySplit {
    /// `E(F)`.
    pub total: f64,
    /// `E(F − Ext g)`.
    pub residual: f64,
    /// `c · E'(g)`.
    pub trace_term: f64,
    /// `total − residual − trace_term`.
    pub defect: f64,
    /// Estimated error of the summed extension energy.
    pub error: f64,
    /// Coarse to fine; the last entry matches the headline numbers.
    pub levels: Vec<SplitLevel>,
}

impl EnergySplit {
    pub fn relative_defect(&self) -> f64 {
        self.defect.abs() / self.total.abs().max(f64::MIN_POSITIVE)
    }

    /// Whether `|defect|` shrinks from level to level.
    pub fn monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].defect.abs() <= w[0].defect.abs())
    }

    fn assemble(total: f64, cross: f64, trace_term: f64, ext_levels: &[(Option<usize>, f64)], error: f64) -> Self {
        let levels: Vec<SplitLevel> = ext_levels
            .iter()
            .map(|&(radial_terms, e)| {
                let residual = total - 2.0 * cross + e;
                SplitLevel {
                    radial_terms,
                    residual,
                    defect: total - residual - trace_term,
                }
            })
            .collect();
        let last = *levels.last().expect("at least one level");
        Self {
            total,
            residual: last.residual,
            trace_term,
            defect: last.defect,
            error,
            levels,
        }
    }
}

fn level_cuts(imax: usize) -> Vec<usize> {
    vec![(imax / 16).max(2), (imax / 4).max(4)]
}

/// Extension energy at each refinement level plus its error estimate, from
/// per-block energy terms weighted by the block norms.
fn extension_levels<K: Eq + std::hash::Hash>(
    weights: &HashMap<K, f64>,
    terms: &HashMap<K, Vec<f64>>,
    imax: usize,
) -> Result<(Vec<(Option<usize>, f64)>, f64), TraceError> {
    let mut out = Vec::new();
    for cut in level_cuts(imax) {
        let e: f64 = weights.iter().map(|(k, w)| w * terms[k].iter().take(cut).sum::<f64>()).sum();
        out.push((Some(cut), e));
    }
    let mut full = 0.0;
    let mut err = 0.0;
    for (k, w) in weights {
        let s = super::sum_with_tail(&terms[k])?;
        full += w * s.total();
        err += w * s.tail_error;
    }
    out.push((None, full));
    Ok((out, err))
}

/// Split of `E_{A_s}(F)` for `F` on `S^{2n+1}`, `2m < s < Q`.
pub fn pythagoras_cr(f: &CrField, cfg: &TraceConfig, opts: &SplitOptions) -> Result<EnergySplit, TraceError> {
    if f.n() != cfg.n {
        return Err(TraceError::Config(format!("field on S^{} does not match n = {}", 2 * f.n() + 1, cfg.n)));
    }
    let l = f.l();
    let ns = cfg.n_sub();
    let sub = CrContext::new(ns, l)?;
    let g = restrict_cr(f, cfg.m, &sub)?;
    let blocks: Vec<(usize, usize)> = (0..=l).flat_map(|p| (0..=l - p).map(move |q| (p, q))).collect();
    let series: HashMap<(usize, usize), CrBlockSeries> = blocks
        .par_iter()
        .map(|&(p, q)| ((p, q), CrBlockSeries::new(cfg, p, q, opts.radial_terms)))
        .collect();

    let total = energy(f, &SpectralMultiplier::cr_as(cfg.n, cfg.s)?, false)?;
    let sub_mult = SpectralMultiplier::cr_as(ns, cfg.s - 2.0 * cfg.m as f64)?;
    let trace_term = trace_coefficient_cr(cfg) * energy(&g, &sub_mult, false)?;

    // A_s applied to the degree ≤ L part of Ext g
    let h = extend_blocks(&g, &f.ctx, |p, q, x| {
        let ser = &series[&(p, q)];
        (0..=(l - p - q) / 2)
            .map(|i| ser.coeffs[i] * multiplier_as(cfg.n, p + i, q + i, cfg.s).expect("order in range") * ser.radial(i, x))
            .sum()
    })?;
    let cross: f64 = f.coeffs.iter().zip(&h.coeffs).map(|(a, b)| (a.conj() * b).re).sum();

    let weights: HashMap<(usize, usize), f64> = blocks.iter().map(|&b| (b, g.norm_sq(b.0, b.1).unwrap_or(0.0))).collect();
    let terms: HashMap<(usize, usize), Vec<f64>> = series.iter().map(|(k, s)| (*k, s.energy_terms(cfg, opts.radial_terms))).collect();
    let (levels, error) = extension_levels(&weights, &terms, opts.radial_terms)?;
    Ok(EnergySplit::assemble(total, cross, trace_term, &levels, error))
}

/// Split of the `A'` energy at the critical order for pluriharmonic `F`.
/// The extension is the homogeneous one, so every term is a finite sum.
pub fn pythagoras_cr_limit(f: &CrField, m: usize) -> Result<EnergySplit, TraceError> {
    let n = f.n();
    let cfg = TraceConfig::cr_critical(n, m)?;
    let ns = cfg.n_sub();
    let sub = CrContext::new(ns, f.l())?;
    let g = restrict_cr(f, m, &sub)?;
    let ext = extend_ptilde_limit(&g, m, &f.ctx)?;
    let diff = CrField::from_coeffs(&f.ctx, f.coeffs.iter().zip(&ext.coeffs).map(|(a, b)| a - b).collect());
    let big = SpectralMultiplier::cr_as_prime(n);
    let total = energy(f, &big, false)?;
    let residual = energy(&diff, &big, true)?;
    let trace_term = PI.powi(m as i32) * energy(&g, &SpectralMultiplier::cr_as_prime(ns), true)?;
    let level = SplitLevel {
        radial_terms: Some(1),
        residual,
        defect: total - residual - trace_term,
    };
    Ok(EnergySplit {
        total,
        residual,
        trace_term,
        defect: level.defect,
        error: 0.0,
        levels: vec![level],
    })
}

/// Split of `E_{P_s}(F)` for `F` on `S^n`, `m < s ≤ n`.
pub fn pythagoras_round(f: &SphereField, cfg: &TraceConfig, opts: &SplitOptions) -> Result<EnergySplit, TraceError> {
    if f.ctx.d != cfg.n {
        return Err(TraceError::Config(format!("field on S^{} does not match n = {}", f.ctx.d, cfg.n)));
    }
    let l = f.ctx.l;
    let ns = cfg.n_sub();
    let sub = RoundContext::new(ns, l)?;
    let g = restrict_round(f, cfg.m, &sub)?;
    let series: Vec<RoundBlockSeries> = (0..=l).into_par_iter().map(|d| RoundBlockSeries::new(cfg, d, opts.radial_terms)).collect();

    let total = energy_round(f, &SpectralMultiplier::round_ps(cfg.n, cfg.s)?)?;
    let sub_mult = SpectralMultiplier::round_ps(ns, cfg.s - cfg.m as f64)?;
    let trace_term = trace_coefficient_round(cfg) * energy_round(&g, &sub_mult)?;

    let h: Vec<f64> = f
        .ctx
        .grid
        .nodes
        .par_iter()
        .map(|z| {
            let x: f64 = z[ns + 1..].iter().map(|c| c * c).sum();
            let phi: Vec<f64> = series
                .iter()
                .map(|ser| {
                    (0..=(l - ser.l) / 2)
                        .map(|i| ser.coeffs[i] * multiplier_ps(cfg.n, ser.l + 2 * i, cfg.s).expect("order in range") * ser.radial(i, x))
                        .sum()
                })
                .collect();
            eval_with(&g, &phi, z)
        })
        .collect();
    let cross = f.ctx.grid.integrate(&f.values.iter().zip(&h).map(|(a, b)| a * b).collect::<Vec<_>>());

    let weights: HashMap<usize, f64> = (0..=l).map(|d| (d, g.norm_sq(d).unwrap_or(0.0))).collect();
    let terms: HashMap<usize, Vec<f64>> = series.iter().map(|s| (s.l, s.energy_terms(cfg, opts.radial_terms))).collect();
    let (levels, error) = extension_levels(&weights, &terms, opts.radial_terms)?;
    Ok(EnergySplit::assemble(total, cross, trace_term, &levels, error))
}
