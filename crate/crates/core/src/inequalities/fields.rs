use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{CrContext, CrField, RoundContext, SphereField};
use crate::Complex64;

/// Input to [`super::evaluate`].
#[derive(Debug, Clone)]
pub enum TestField {
    /// Band-limited field on `S^{2n+1}`.
    Cr(CrField),
    /// Band-limited field on `S^d`.
    Round(SphereField),
    /// Extension of band-limited data on the sub-sphere `S^{2(n−m)+1}`:
    /// `P̃_s g` for the Sobolev trace cases, the homogeneous extension at `s = Q`.
    CrExtension { n: usize, trace: CrField },
    /// `Q̃_n g` for band-limited `g` on `S^{n−m}`.
    RoundExtension { n: usize, trace: SphereField },
}

impl TestField {
    /// Band limit of the data the field is built from.
    pub fn band_limit(&self) -> usize {
        match self {
            Self::Cr(f) => f.l(),
            Self::Round(f) => f.ctx.l,
            Self::CrExtension { trace, .. } => trace.l(),
            Self::RoundExtension { trace, .. } => trace.ctx.l,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RandomFieldOptions {
    /// Conjugate-symmetric coefficients.
    pub real: bool,
    /// Only bidegrees `(j, 0)` and `(0, k)`.
    pub pluriharmonic: bool,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Seeded field with independent Gaussian coefficients of standard
/// deviation `(1 + j + k)^{−2}`.
pub fn random_cr_field(ctx: &Arc<CrContext>, seed: u64, opts: RandomFieldOptions) -> CrField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = &ctx.basis;
    let mut c = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (i, f) in basis.funcs.iter().enumerate() {
        let sd = (1.0 + (f.j + f.k) as f64).powi(-2);
        c[i] = Complex64::new(gauss(&mut rng), gauss(&mut rng)) * sd;
        if opts.pluriharmonic && f.j > 0 && f.k > 0 {
            c[i] = Complex64::new(0.0, 0.0);
        }
    }
    if opts.real {
        for i in 0..c.len() {
            let k = basis.conjugate_index(i);
            if k == i {
                c[i] = Complex64::new(c[i].re, 0.0);
            } else if k > i {
                c[k] = c[i].conj();
            }
        }
    }
    CrField::from_coeffs(ctx, c)
}

/// Seeded real field on `S^d`, standard deviation `(1 + l)^{−2}` in degree `l`.
pub fn random_round_field(ctx: &Arc<RoundContext>, seed: u64) -> SphereField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0.0; ctx.basis.len()];
    for (l, r) in ctx.basis.ranges.iter().enumerate() {
        let sd = (1.0 + l as f64).powi(-2);
        for x in &mut c[r.clone()] {
            *x = gauss(&mut rng) * sd;
        }
    }
    SphereField::from_coeffs(ctx, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_fields_are_real() {
        let ctx = CrContext::new(2, 4).unwrap();
        let f = random_cr_field(&ctx, 7, RandomFieldOptions { real: true, pluriharmonic: false });
        let big = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(f.values.iter().all(|v| v.im.abs() < 1e-12 * big));
    }

    #[test]
    fn pluriharmonic_fields_have_no_mixed_part() {
        let ctx = CrContext::new(1, 5).unwrap();
        let f = random_cr_field(&ctx, 1, RandomFieldOptions { real: true, pluriharmonic: true });
        for (j, k) in f.bidegrees().collect::<Vec<_>>() {
            if j > 0 && k > 0 {
                assert_eq!(f.norm_sq(j, k).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn seeds_reproduce() {
        let ctx = RoundContext::new(2, 4).unwrap();
        assert_eq!(random_round_field(&ctx, 3).coeffs, random_round_field(&ctx, 3).coeffs);
    }
}
