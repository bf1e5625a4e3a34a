//! Diagonal spectral operators on `S^{2n+1}` and `S^d`: the intertwinors
//! `A_s` (eigenvalue `λ_j(s)λ_k(s)` on `H_{j,k}`), the critical-order
//! operator `A'` on CR-pluriharmonic functions, and the round `P_s`.

use thiserror::Error;

use crate::special::{gamma_ratio, ln_gamma, recip_gamma, SpecialError};
use crate::spectral::{CrField, SphereField};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("order s = {s} outside ({lo}, {hi}]")]
    Order { s: f64, lo: f64, hi: f64 },
    #[error("A' is defined on pluriharmonic bidegrees only, got ({j}, {k})")]
    NotPluriharmonic { j: usize, k: usize },
    #[error("field has energy {energy:e} in mixed bidegrees; project first")]
    MixedField { energy: f64 },
    #[error("multiplier kind does not match the field type")]
    KindMismatch,
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Homogeneous dimension `Q_n = 2n + 2`.
pub fn q_dim<T: Real>(n: usize) -> T {
    T::from_usize_lossy(2 * n + 2)
}

fn check_cr_order<T: Real>(n: usize, s: T) -> Result<(), OperatorError> {
    let q: T = q_dim(n);
    if !(s > -q && s <= q) {
        return Err(OperatorError::Order {
            s: s.to_f64().unwrap_or(f64::NAN),
            lo: -q.to_f64().unwrap_or(0.0),
            hi: q.to_f64().unwrap_or(0.0),
        });
    }
    Ok(())
}

/// `λ_j(s) = Γ((Q+s)/4 + j)/Γ((Q−s)/4 + j)`, continued through the pole of
/// the denominator so that `λ_0(Q) = 0`.
pub fn lambda_cr<T: Real>(n: usize, j: usize, s: T) -> T {
    let q: T = q_dim(n);
    let four = T::lit(4.0);
    let jj = T::from_usize_lossy(j);
    let a = (q + s) / four + jj;
    let b = (q - s) / four + jj;
    if b > T::zero() && a > T::zero() {
        return gamma_ratio(a, b).expect("positive arguments");
    }
    (ln_gamma(a).expect("a > 0 for s > -Q")).exp() * recip_gamma(b)
}

/// Eigenvalue of `A_s` on `H_{j,k}`: `λ_j(s) λ_k(s)`, for `−Q < s ≤ Q`.
/// At `s = Q` this vanishes on pluriharmonic bidegrees.
pub fn multiplier_as<T: Real>(n: usize, j: usize, k: usize, s: T) -> Result<T, OperatorError> {
    check_cr_order(n, s)?;
    Ok(lambda_cr(n, j, s) * lambda_cr(n, k, s))
}

/// Same eigenvalue through the Gamma-operator form: with `√(D−T²)` acting as
/// `(j+k+n)/2` and `iT` as `−(j−k)/2`.
pub fn multiplier_as_gamma_form<T: Real>(n: usize, j: usize, k: usize, s: T) -> Result<T, OperatorError> {
    check_cr_order(n, s)?;
    let half = T::lit(0.5);
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let root = T::from_usize_lossy(j + k + n) * half;
    let it = -(T::from_usize_lossy(j) - T::from_usize_lossy(k)) * half;
    let up = (two + s) / four;
    let dn = (two - s) / four;
    let num1 = root - it + up;
    let num2 = root + it + up;
    let den1 = root - it + dn;
    let den2 = root + it + dn;
    let lg = |x: T| ln_gamma(x).map(|v| v.exp());
    if den1 > T::zero() && den2 > T::zero() {
        return Ok(gamma_ratio(num1, den1)? * gamma_ratio(num2, den2)?);
    }
    Ok(lg(num1)? * lg(num2)? * recip_gamma(den1) * recip_gamma(den2))
}

/// Eigenvalue of `A'` on pluriharmonic bidegrees: `Γ(Q/2 + j)/Γ(j)` on
/// `H_{j,0}` and `H_{0,j}`, zero on constants.
pub fn multiplier_as_prime<T: Real>(n: usize, j: usize, k: usize) -> Result<T, OperatorError> {
    if j > 0 && k > 0 {
        return Err(OperatorError::NotPluriharmonic { j, k });
    }
    let d = j.max(k);
    if d == 0 {
        return Ok(T::zero());
    }
    let q: T = q_dim(n);
    Ok(gamma_ratio(q / T::lit(2.0) + T::from_usize_lossy(d), T::from_usize_lossy(d))?)
}

/// Central difference of `−(4/Γ(Q/2)) ∂_s λ_j(s)λ_k(s)` at `s = Q`, using
/// the analytic continuation of `A_s` slightly past `Q`.
pub fn multiplier_as_prime_fd(n: usize, j: usize, k: usize, h: f64) -> f64 {
    let q: f64 = q_dim(n);
    let a = |s: f64| lambda_cr(n, j, s) * lambda_cr(n, k, s);
    let d = (a(q + h) - a(q - h)) / (2.0 * h);
    -4.0 * recip_gamma(q / 2.0) * d
}

/// Eigenvalue of the round intertwinor `P_s` on degree-`l` harmonics of
/// `S^d`: `Γ(l + (d+s)/2)/Γ(l + (d−s)/2)`, for `0 < s ≤ d`.
pub fn multiplier_ps<T: Real>(d: usize, l: usize, s: T) -> Result<T, OperatorError> {
    let dd = T::from_usize_lossy(d);
    if !(s > T::zero() && s <= dd) {
        return Err(OperatorError::Order {
            s: s.to_f64().unwrap_or(f64::NAN),
            lo: 0.0,
            hi: d as f64,
        });
    }
    let two = T::lit(2.0);
    let ll = T::from_usize_lossy(l);
    let a = ll + (dd + s) / two;
    let b = ll + (dd - s) / two;
    if b > T::zero() {
        Ok(gamma_ratio(a, b)?)
    } else {
        Ok(ln_gamma(a)?.exp() * recip_gamma(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierKind<T> {
    CrAs { n: usize, s: T },
    CrAsPrime { n: usize },
    RoundPs { d: usize, s: T },
}

/// A diagonal operator, evaluated per bidegree or per degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMultiplier<T> {
    pub kind: MultiplierKind<T>,
}

impl<T: Real> SpectralMultiplier<T> {
    pub fn cr_as(n: usize, s: T) -> Result<Self, OperatorError> {
        check_cr_order(n, s)?;
        Ok(Self {
            kind: MultiplierKind::CrAs { n, s },
        })
    }

    pub fn cr_as_prime(n: usize) -> Self {
        Self {
            kind: MultiplierKind::CrAsPrime { n },
        }
    }

    pub fn round_ps(d: usize, s: T) -> Result<Self, OperatorError> {
        multiplier_ps(d, 0, s)?;
        Ok(Self {
            kind: MultiplierKind::RoundPs { d, s },
        })
    }

    /// `A_s` taken exactly at `s = Q`; reports should flag this.
    pub fn is_critical(&self) -> bool {
        match self.kind {
            MultiplierKind::CrAs { n, s } => s == q_dim(n),
            _ => false,
        }
    }

    pub fn bidegree(&self, j: usize, k: usize) -> Result<T, OperatorError> {
        match self.kind {
            MultiplierKind::CrAs { n, s } => multiplier_as(n, j, k, s),
            MultiplierKind::CrAsPrime { n } => multiplier_as_prime(n, j, k),
            MultiplierKind::RoundPs { .. } => Err(OperatorError::KindMismatch),
        }
    }

    pub fn degree(&self, l: usize) -> Result<T, OperatorError> {
        match self.kind {
            MultiplierKind::RoundPs { d, s } => multiplier_ps(d, l, s),
            _ => Err(OperatorError::KindMismatch),
        }
    }

    /// Table of `(j, k, value)` for `j + k ≤ l`; CSV-ready.
    pub fn table_csv(&self, l: usize) -> String {
        let mut out = String::new();
        match self.kind {
            MultiplierKind::RoundPs { .. } => {
                out.push_str("l,value\n");
                for deg in 0..=l {
                    if let Ok(v) = self.degree(deg) {
                        out.push_str(&format!("{deg},{:e}\n", v.to_f64().unwrap_or(f64::NAN)));
                    }
                }
            }
            _ => {
                out.push_str("j,k,value\n");
                for tot in 0..=l {
                    for j in 0..=tot {
                        if let Ok(v) = self.bidegree(j, tot - j) {
                            out.push_str(&format!("{j},{},{:e}\n", tot - j, v.to_f64().unwrap_or(f64::NAN)));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Coefficient-space energy outside `⊕ H_{j,0} ⊕ H_{0,j}`.
pub fn mixed_energy(f: &CrField) -> f64 {
    f.ctx
        .basis
        .ranges
        .iter()
        .filter(|((j, k), _)| *j > 0 && *k > 0)
        .map(|(_, r)| f.coeffs[r.clone()].iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum()
}

/// Projection onto the pluriharmonic bidegrees.
pub fn project_pluriharmonic(f: &CrField) -> CrField {
    let mut c = f.coeffs.clone();
    for ((j, k), r) in &f.ctx.basis.ranges {
        if *j > 0 && *k > 0 {
            c[r.clone()].iter_mut().for_each(|x| *x = Default::default());
        }
    }
    CrField::from_coeffs(&f.ctx, c)
}

fn cr_scales(f: &CrField, m: &SpectralMultiplier<f64>, project: bool) -> Result<Vec<f64>, OperatorError> {
    if let MultiplierKind::CrAsPrime { .. } = m.kind {
        let mixed = mixed_energy(f);
        if !project && mixed > 1e-24 * (1.0 + f.total_norm_sq()) {
            return Err(OperatorError::MixedField { energy: mixed });
        }
    }
    let mut scale = vec![0.0; f.coeffs.len()];
    for ((j, k), r) in &f.ctx.basis.ranges {
        let v = match m.bidegree(*j, *k) {
            Ok(v) => v,
            Err(OperatorError::NotPluriharmonic { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        scale[r.clone()].iter_mut().for_each(|x| *x = v);
    }
    Ok(scale)
}

/// `A f` for a CR multiplier. With `A'`, mixed bidegrees are an error
/// unless `project_to_pluriharmonic` is set.
pub fn apply_multiplier(f: &CrField, m: &SpectralMultiplier<f64>, project_to_pluriharmonic: bool) -> Result<CrField, OperatorError> {
    let scale = cr_scales(f, m, project_to_pluriharmonic)?;
    let c = f.coeffs.iter().zip(&scale).map(|(c, s)| c * s).collect();
    Ok(CrField::from_coeffs(&f.ctx, c))
}

/// `Σ m(j,k) ‖P_{j,k} f‖²`.
pub fn energy(f: &CrField, m: &SpectralMultiplier<f64>, project_to_pluriharmonic: bool) -> Result<f64, OperatorError> {
    let scale = cr_scales(f, m, project_to_pluriharmonic)?;
    Ok(f.coeffs.iter().zip(&scale).map(|(c, s)| c.norm_sqr() * s).sum())
}

/// `P_s f` on a round sphere.
pub fn apply_multiplier_round(f: &SphereField, m: &SpectralMultiplier<f64>) -> Result<SphereField, OperatorError> {
    let mut c = f.coeffs.clone();
    for (l, r) in f.ctx.basis.ranges.iter().enumerate() {
        let v = m.degree(l)?;
        c[r.clone()].iter_mut().for_each(|x| *x *= v);
    }
    Ok(SphereField::from_coeffs(&f.ctx, c))
}

/// `Σ m(l) ‖P_l f‖²` on a round sphere.
pub fn energy_round(f: &SphereField, m: &SpectralMultiplier<f64>) -> Result<f64, OperatorError> {
    let mut e = 0.0;
    for (l, r) in f.ctx.basis.ranges.iter().enumerate() {
        let v = m.degree(l)?;
        e += v * f.coeffs[r.clone()].iter().map(|x| x * x).sum::<f64>();
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::area;
    use crate::spectral::CrContext;
    use crate::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms() {
        for n in 1..5 {
            let q = (2 * n + 2) as f64;
            for &s in &[0.5, 1.0, 2.5] {
                let want = (gamma_ratio((q + s) / 4.0, (q - s) / 4.0).unwrap()).powi(2);
                assert!(rel(multiplier_as(n, 0, 0, s).unwrap(), want) < 1e-13);
            }
            for j in 0..6 {
                for k in 0..6 {
                    let want = (j as f64 + n as f64 / 2.0) * (k as f64 + n as f64 / 2.0);
                    assert!(rel(multiplier_as(n, j, k, 2.0).unwrap(), want) < 1e-13);
                }
            }
            assert_eq!(multiplier_as(n, 3, 0, q).unwrap(), 0.0);
            assert!(multiplier_as(n, 1, 1, q).unwrap() > 0.0);
            assert!(multiplier_as(n, 0, 0, q + 0.1).is_err());
        }
        assert!((multiplier_as_gamma_form(2, 3, 1, 0.0f64).unwrap() - 1.0).abs() < 1e-14);
        let a = multiplier_as(1, 2, 3, 1.5).unwrap();
        let b = multiplier_as_gamma_form(1, 2, 3, 1.5).unwrap();
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn gamma_form_agrees_on_grid() {
        for n in 1..=4 {
            let q = (2 * n + 2) as f64;
            let mut s = 0.5;
            while s < q {
                for j in 0..=30 {
                    for k in 0..=30 {
                        let a = multiplier_as(n, j, k, s).unwrap();
                        let b = multiplier_as_gamma_form(n, j, k, s).unwrap();
                        assert!(rel(a, b) < 1e-10, "n={n} s={s} ({j},{k}): {a} {b}");
                    }
                }
                s += 0.5;
            }
        }
    }

    #[test]
    fn monotone_in_each_index() {
        for n in 1..4 {
            let q = (2 * n + 2) as f64;
            for &s in &[0.5, 1.0, q / 2.0, q - 0.5] {
                for j in 0..20 {
                    for k in 0..20 {
                        let v = multiplier_as(n, j, k, s).unwrap();
                        assert!(v > 0.0);
                        assert!(multiplier_as(n, j + 1, k, s).unwrap() > v);
                        assert!(multiplier_as(n, j, k + 1, s).unwrap() > v);
                    }
                }
            }
        }
    }

    #[test]
    fn prime_limit() {
        assert_eq!(multiplier_as_prime::<f64>(2, 0, 0).unwrap(), 0.0);
        assert!((multiplier_as_prime::<f64>(1, 1, 0).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(multiplier_as_prime::<f64>(1, 1, 1), Err(OperatorError::NotPluriharmonic { .. })));
        for n in 1..=3 {
            for j in 0..=10 {
                for (a, b) in [(j, 0), (0, j)] {
                    let want: f64 = multiplier_as_prime(n, a, b).unwrap();
                    let fd = multiplier_as_prime_fd(n, a, b, 1e-6);
                    assert!((fd - want).abs() <= 1e-6 * want.max(1.0), "n={n} ({a},{b}) {fd} {want}");
                }
            }
        }
        let fd = multiplier_as_prime_fd(1, 1, 0, 1e-5);
        assert!((fd - 2.0).abs() < 1e-6);
    }

    #[test]
    fn round_intertwinor() {
        assert!(rel(multiplier_ps(3, 0, 1.0f64).unwrap(), gamma_ratio(2.0, 1.0).unwrap()) < 1e-14);
        assert_eq!(multiplier_ps(3, 0, 3.0f64).unwrap(), 0.0);
        assert!((multiplier_ps(2, 1, 2.0f64).unwrap() - 2.0).abs() < 1e-13);
        for d in 1..5 {
            for l in 1..8 {
                let want: f64 = (0..d).map(|i| (l + i) as f64).product();
                assert!(rel(multiplier_ps(d, l, d as f64).unwrap(), want) < 1e-12);
            }
        }
        assert!(multiplier_ps(2, 1, 2.5f64).is_err());
    }

    #[test]
    fn f32_multipliers() {
        let a = multiplier_as(1, 2, 3, 1.5f32).unwrap();
        let b = multiplier_as(1, 2, 3, 1.5f64).unwrap();
        assert!(((a as f64) - b).abs() / b < 1e-5);
    }

    fn random_field(ctx: &std::sync::Arc<CrContext>, seed: u64, pluri: bool) -> CrField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = ctx
            .basis
            .funcs
            .iter()
            .map(|f| {
                if pluri && f.j > 0 && f.k > 0 {
                    Complex64::default()
                } else {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }
            })
            .collect();
        CrField::from_coeffs(ctx, c)
    }

    #[test]
    fn energies_on_fields() {
        let n = 1;
        let ctx = CrContext::new(n, 4).unwrap();
        let one = CrField::from_fn(&ctx, |_| Complex64::new(1.0, 0.0)).unwrap();
        let q = 4.0;
        for &s in &[0.5, 1.5, 3.0] {
            let m = SpectralMultiplier::cr_as(n, s).unwrap();
            let want: f64 = (gamma_ratio::<f64>((q + s) / 4.0, (q - s) / 4.0).unwrap()).powi(2u8 as i32) * area(3);
            assert!(rel(energy(&one, &m, false).unwrap(), want) < 1e-12);
        }
        let pm = SpectralMultiplier::cr_as_prime(n);
        assert!(energy(&one, &pm, false).unwrap().abs() < 1e-14);
        // unit element of H_{1,0}
        let r = ctx.basis.range(1, 0).unwrap();
        let mut c = vec![Complex64::default(); ctx.basis.len()];
        c[r.start] = Complex64::new(1.0, 0.0);
        let y = CrField::from_coeffs(&ctx, c);
        let m2 = SpectralMultiplier::cr_as(n, 2.0).unwrap();
        let want = (1.0 + n as f64 / 2.0) * (n as f64 / 2.0);
        assert!(rel(energy(&y, &m2, false).unwrap(), want) < 1e-13);

        let f = random_field(&ctx, 3, false);
        assert!(matches!(energy(&f, &pm, false), Err(OperatorError::MixedField { .. })));
        let e = energy(&f, &pm, true).unwrap();
        let p = project_pluriharmonic(&f);
        assert!(rel(energy(&p, &pm, false).unwrap(), e) < 1e-12);
        let g = random_field(&ctx, 4, true);
        assert!(energy(&g, &pm, false).unwrap() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn self_adjoint_and_parseval(seed in 0u64..1000, s in 0.2f64..3.8) {
            let ctx = CrContext::new(1, 4).unwrap();
            let m = SpectralMultiplier::cr_as(1, s).unwrap();
            let f = random_field(&ctx, seed, false);
            let g = random_field(&ctx, seed + 7919, false);
            let af = apply_multiplier(&f, &m, false).unwrap();
            let ag = apply_multiplier(&g, &m, false).unwrap();
            let w = ctx.grid.weights();
            let ip = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
                a.iter().zip(b).zip(&w).map(|((x, y), wi)| x * y.conj() * *wi).sum()
            };
            let l = ip(&af.values, &g.values);
            let r = ip(&f.values, &ag.values);
            prop_assert!((l - r).norm() <= 1e-9 * l.norm().max(1.0));
            let e = energy(&f, &m, false).unwrap();
            let direct = ip(&f.values, &af.values);
            prop_assert!(e > 0.0);
            prop_assert!((direct.re - e).abs() <= 1e-9 * e && direct.im.abs() <= 1e-9 * e);
        }

        #[test]
        fn prime_energy_vanishes_only_on_constants(seed in 0u64..1000) {
            let ctx = CrContext::new(1, 4).unwrap();
            let pm = SpectralMultiplier::cr_as_prime(1);
            let mut f = random_field(&ctx, seed, true);
            prop_assert!(energy(&f, &pm, false).unwrap() > 1e-6);
            for c in f.coeffs.iter_mut().skip(1) {
                *c = Complex64::default();
            }
            prop_assert!(energy(&f, &pm, false).unwrap().abs() < 1e-15);
        }
    }
}
