//! Extremal families. Untraced families are closed forms; the trace
//! families are extensions of a closed-form datum on the sub-sphere,
//! normalized so that their trace is the datum itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{InequalityError, TestField, TheoremCase, TheoremId};
use crate::operators::project_pluriharmonic;
use crate::spectral::{CrContext, CrField, RoundContext, SphereField};
use crate::traceops::{ptilde_at, ptilde_direct, ptilde_limit_at, qtilde_at, qtilde_direct, DirectOptions, TraceConfig};
use crate::Complex64;

/// Parameters of an extremal: conformal center `ξ` (`|ξ| < 1`, complex for
/// CR cases, real parts only for round ones) and scale or additive constant `c`.
/// A `ξ` shorter than the point it is paired with is padded by zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalParams {
    pub xi: Vec<Complex64>,
    pub c: f64,
}

impl ExtremalParams {
    pub fn new(xi: Vec<Complex64>, c: f64) -> Result<Self, InequalityError> {
        let r = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r >= 1.0 || !c.is_finite() {
            return Err(InequalityError::Range(format!("need |xi| < 1 and finite c, got |xi| = {r}, c = {c}")));
        }
        Ok(Self { xi, c })
    }

    pub fn real(xi: &[f64], c: f64) -> Result<Self, InequalityError> {
        Self::new(xi.iter().map(|&x| Complex64::new(x, 0.0)).collect(), c)
    }

    /// `ξ = 0`.
    pub fn centered(c: f64) -> Self {
        Self { xi: Vec::new(), c }
    }

    /// `ξ = r e_1`.
    pub fn along_first_axis(r: f64, c: f64) -> Result<Self, InequalityError> {
        Self::new(vec![Complex64::new(r, 0.0)], c)
    }

    /// `|1 − ξ̄·ζ|`.
    fn cr_distance(&self, zeta: &[Complex64]) -> f64 {
        let w: Complex64 = self.xi.iter().zip(zeta).map(|(x, z)| x.conj() * z).sum();
        (Complex64::new(1.0, 0.0) - w).norm()
    }

    /// `|1 − ξ·x|`.
    fn round_distance(&self, x: &[f64]) -> f64 {
        (1.0 - self.xi.iter().zip(x).map(|(a, b)| a.re * b).sum::<f64>()).abs()
    }
}

/// Untraced CR extremal at `ζ ∈ S^{2n+1}`, or the trace datum at
/// `η ∈ S^{2(n−m)+1}` for the trace cases.
pub fn profile_cr(case: &TheoremCase, p: &ExtremalParams, zeta: &[Complex64]) -> Result<f64, InequalityError> {
    let d = p.cr_distance(zeta);
    let q = case.q();
    let qs = (2 * case.n_sub() + 2) as f64;
    Ok(match case.id {
        TheoremId::SobolevCr | TheoremId::SobolevHeis | TheoremId::Thm13 | TheoremId::Thm14 | TheoremId::Thm15 => {
            // on the sub-sphere Q' − (s − 2m) = Q − s
            p.c * d.powf(-(q - case.s.unwrap_or(0.0)) / 2.0)
        }
        TheoremId::Hls => p.c * d.powf(-(2.0 * q - case.need_lambda()?) / 2.0),
        TheoremId::Bfm => -q * d.ln() + p.c,
        TheoremId::Thm17 => -qs * d.ln() + p.c,
        _ => return Err(InequalityError::Unsupported(format!("{} has no CR extremal", case.id))),
    })
}

/// Round analogue of [`profile_cr`].
pub fn profile_round(case: &TheoremCase, p: &ExtremalParams, x: &[f64]) -> Result<f64, InequalityError> {
    let d = p.round_distance(x);
    Ok(match case.id {
        TheoremId::Beckner => -(case.n as f64) * d.ln() + p.c,
        TheoremId::SobolevRound => p.c * d.powf(-(case.n as f64 - case.s.unwrap_or(0.0)) / 2.0),
        TheoremId::Thm18 => -(case.n_sub() as f64) * d.ln() + p.c,
        _ => return Err(InequalityError::Unsupported(format!("{} has no round extremal", case.id))),
    })
}

fn cr_datum(case: &TheoremCase, p: &ExtremalParams, l: usize) -> Result<CrField, InequalityError> {
    let ctx = CrContext::new(case.n_sub(), l)?;
    profile_cr(case, p, &ctx.grid.point(0))?;
    let g = CrField::from_fn(&ctx, |z| Complex64::new(profile_cr(case, p, z).unwrap_or(f64::NAN), 0.0))?;
    // the log datum is pluriharmonic; mixed content is aliasing of the grid
    Ok(if case.id == TheoremId::Thm17 { project_pluriharmonic(&g) } else { g })
}

fn round_datum(case: &TheoremCase, p: &ExtremalParams, l: usize) -> Result<SphereField, InequalityError> {
    let ctx = RoundContext::new(case.n_sub(), l)?;
    profile_round(case, p, &ctx.grid.nodes[0])?;
    Ok(SphereField::from_fn(&ctx, |x| profile_round(case, p, x).unwrap_or(f64::NAN))?)
}

fn trace_config(case: &TheoremCase) -> Result<TraceConfig, InequalityError> {
    Ok(match case.id {
        TheoremId::Thm17 => TraceConfig::cr_critical(case.n, case.m)?,
        TheoremId::Thm18 => TraceConfig::round(case.n, case.m, case.n as f64)?,
        _ => TraceConfig::cr(case.n, case.m, case.s.unwrap_or(0.0))?,
    })
}

/// Extremal as a test field at band limit `l`. Trace families come out in
/// extension form, built from the degree-`l` expansion of the datum.
pub fn extremal_field(case: &TheoremCase, p: &ExtremalParams, l: usize) -> Result<TestField, InequalityError> {
    let n = case.n;
    Ok(match case.id {
        TheoremId::SobolevCr | TheoremId::SobolevHeis | TheoremId::Hls | TheoremId::Bfm => {
            let ctx = CrContext::new(n, l)?;
            profile_cr(case, p, &ctx.grid.point(0))?;
            TestField::Cr(CrField::from_fn(&ctx, |z| Complex64::new(profile_cr(case, p, z).unwrap_or(f64::NAN), 0.0))?)
        }
        TheoremId::Beckner | TheoremId::SobolevRound => {
            let ctx = RoundContext::new(n, l)?;
            TestField::Round(SphereField::from_fn(&ctx, |x| profile_round(case, p, x).unwrap_or(f64::NAN))?)
        }
        TheoremId::Thm13 | TheoremId::Thm14 | TheoremId::Thm15 | TheoremId::Thm17 => TestField::CrExtension {
            n,
            trace: cr_datum(case, p, l)?,
        },
        TheoremId::Thm18 => TestField::RoundExtension {
            n,
            trace: round_datum(case, p, l)?,
        },
        TheoremId::Thm11 | TheoremId::Thm12 => {
            return Err(InequalityError::Unsupported(format!("{} is checked through its constant only", case.id)))
        }
    })
}

/// Sample points on the sphere of the case.
#[derive(Debug, Clone, Copy)]
pub enum SamplePoints<'a> {
    Cr(&'a [Vec<Complex64>]),
    Round(&'a [Vec<f64>]),
}

fn untraced(case: &TheoremCase, p: &ExtremalParams, pts: SamplePoints) -> Result<Vec<f64>, InequalityError> {
    match pts {
        SamplePoints::Cr(z) => z.iter().map(|z| profile_cr(case, p, z)).collect(),
        SamplePoints::Round(x) => x.iter().map(|x| profile_round(case, p, x)).collect(),
    }
}

fn mismatch(case: &TheoremCase) -> InequalityError {
    InequalityError::Field(format!("sample points do not live on the sphere of {}", case.id))
}

/// Extremal values at `pts` from the block (series) form of the extension.
pub fn extremal_block(case: &TheoremCase, p: &ExtremalParams, l: usize, pts: SamplePoints) -> Result<Vec<f64>, InequalityError> {
    if !case.id.is_trace() {
        return untraced(case, p, pts);
    }
    let cfg = trace_config(case)?;
    match (case.id, pts) {
        (TheoremId::Thm18, SamplePoints::Round(x)) => {
            let g = round_datum(case, p, l)?;
            x.par_iter().map(|x| Ok(qtilde_at(&g, &cfg, x)?)).collect()
        }
        (TheoremId::Thm17, SamplePoints::Cr(z)) => {
            let g = cr_datum(case, p, l)?;
            z.par_iter().map(|z| Ok(ptilde_limit_at(&g, case.n, case.m, z)?.re)).collect()
        }
        (TheoremId::Thm13 | TheoremId::Thm14 | TheoremId::Thm15, SamplePoints::Cr(z)) => {
            let g = cr_datum(case, p, l)?;
            z.par_iter().map(|z| Ok(ptilde_at(&g, &cfg, z)?.re)).collect()
        }
        _ => Err(mismatch(case)),
    }
}

/// Extremal values at `pts` from the kernel integral over the sub-sphere,
/// by direct quadrature. Points closer than `opts.delta` to the sub-sphere
/// are rejected.
pub fn extremal_direct(
    case: &TheoremCase,
    p: &ExtremalParams,
    l: usize,
    pts: SamplePoints,
    opts: &DirectOptions,
) -> Result<Vec<f64>, InequalityError> {
    if !case.id.is_trace() {
        return untraced(case, p, pts);
    }
    let cfg = trace_config(case)?;
    match (case.id, pts) {
        (TheoremId::Thm18, SamplePoints::Round(x)) => {
            let g = round_datum(case, p, l)?;
            x.par_iter().map(|x| Ok(qtilde_direct(&g, &cfg, x, opts)?)).collect()
        }
        (TheoremId::Thm13 | TheoremId::Thm14 | TheoremId::Thm15 | TheoremId::Thm17, SamplePoints::Cr(z)) => {
            let g = cr_datum(case, p, l)?;
            z.par_iter().map(|z| Ok(ptilde_direct(&g, &cfg, z, opts)?.re)).collect()
        }
        _ => Err(mismatch(case)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traceops::{distance_to_subsphere_cr, distance_to_subsphere_round};

    #[test]
    fn centered_sobolev_extremal_is_constant() {
        let case = TheoremCase::sobolev_cr(1, 2.0).unwrap();
        let TestField::Cr(f) = extremal_field(&case, &ExtremalParams::centered(2.5), 4).unwrap() else {
            panic!()
        };
        assert!(f.values.iter().all(|v| (v - 2.5).norm() < 1e-12));
    }

    #[test]
    fn xi_must_be_inside_ball() {
        assert!(ExtremalParams::real(&[0.6, 0.8], 1.0).is_err());
        assert!(ExtremalParams::real(&[0.6, 0.7], 1.0).is_ok());
    }

    #[test]
    fn thm14_block_and_direct_forms_agree() {
        let case = TheoremCase::trace(TheoremId::Thm14, 2, 1, 4.0).unwrap();
        let p = ExtremalParams::centered(1.0);
        let ctx = CrContext::new(2, 3).unwrap();
        let pts: Vec<_> = ctx.points().into_iter().filter(|z| distance_to_subsphere_cr(z, 1) > 0.3).take(6).collect();
        let a = extremal_block(&case, &p, 2, SamplePoints::Cr(&pts)).unwrap();
        let b = extremal_direct(&case, &p, 2, SamplePoints::Cr(&pts), &DirectOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-8 * x.abs(), "{x} {y}");
        }
    }

    #[test]
    fn thm18_centered_extremal_is_constant() {
        let case = TheoremCase::new(TheoremId::Thm18, 2, 1, None, None).unwrap();
        let ctx = RoundContext::new(2, 4).unwrap();
        let pts: Vec<_> = ctx.grid.nodes.iter().filter(|x| distance_to_subsphere_round(x, 1) > 0.2).cloned().collect();
        let v = extremal_direct(&case, &ExtremalParams::centered(1.5), 2, SamplePoints::Round(&pts), &DirectOptions::default()).unwrap();
        assert!(v.iter().all(|x| (x - 1.5).abs() < 1e-6), "{v:?}");
    }
}
