//! The HLS form `∬ f̄(ζ) g(η) |1 − ζ·η̄|^{−λ/2} dζ dη` on `S^{2n+1}`.
//!
//! The kernel is zonal, so it acts on `H_{j,k}` by a scalar `μ_{j,k}`
//! (Funk–Hecke); for band-limited fields the form is `Σ μ_{j,k} ⟨f_{j,k}, g_{j,k}⟩`.

use rayon::prelude::*;
use serde::Serialize;

use super::{hls, InequalityError};
use crate::geometry::{area, CrZonalRule};
use crate::spectral::{disk_polynomial, CrField};
use crate::traceops::GradedCrRule;
use crate::Complex64;

pub(crate) const EIGEN_ORDER: usize = 48;

fn check_lambda(n: usize, lambda: f64) -> Result<(), InequalityError> {
    let q = (2 * n + 2) as f64;
    if !(lambda > 0.0 && lambda < q) {
        return Err(InequalityError::Range(format!("need 0 < lambda < Q = {q}, got {lambda}")));
    }
    Ok(())
}

/// `μ_{j,k} = ∫ |1 − w|^{−λ/2} R_{j,k}(w) dσ`, `R_{j,k}` the disk polynomial
/// with `R(1) = 1`, by the pole-centred zonal rule of the given order.
pub fn hls_eigenvalue(n: usize, lambda: f64, j: usize, k: usize, order: usize) -> Result<f64, InequalityError> {
    check_lambda(n, lambda)?;
    let rule = CrZonalRule::singular(n, lambda / 2.0, order);
    Ok(rule.integrate_complex(|w| disk_polynomial(n, j, k, w)).re)
}

fn eigen_table(n: usize, l: usize, lambda: f64, order: usize) -> Result<Vec<((usize, usize), f64)>, InequalityError> {
    check_lambda(n, lambda)?;
    let rule = CrZonalRule::singular(n, lambda / 2.0, order);
    Ok((0..=l)
        .flat_map(|j| (0..=l - j).map(move |k| (j, k)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(j, k)| ((j, k), rule.integrate_complex(|w| disk_polynomial(n, j, k, w)).re))
        .collect())
}

fn pairing_with(f: &CrField, g: &CrField, table: &[((usize, usize), f64)]) -> Result<Complex64, InequalityError> {
    let mut s = Complex64::new(0.0, 0.0);
    for &((j, k), mu) in table {
        let a = f.component_coeffs(j, k)?;
        let b = g.component_coeffs(j, k)?;
        s += a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * mu;
    }
    Ok(s)
}

fn same_space(f: &CrField, g: &CrField) -> Result<(), InequalityError> {
    if f.n() != g.n() || f.l() != g.l() {
        return Err(InequalityError::Field("fields must share the sphere and band limit".into()));
    }
    Ok(())
}

/// Pairing of two band-limited fields together with the change when the
/// eigenvalue rule order is raised by 16.
pub fn hls_pairing(f: &CrField, g: &CrField, lambda: f64) -> Result<(Complex64, f64), InequalityError> {
    same_space(f, g)?;
    let a = pairing_with(f, g, &eigen_table(f.n(), f.l(), lambda, EIGEN_ORDER)?)?;
    let b = pairing_with(f, g, &eigen_table(f.n(), f.l(), lambda, EIGEN_ORDER + 16)?)?;
    Ok((b, (a - b).norm()))
}

/// Double quadrature: the outer integral on the grid of `f`, the inner one
/// by a rule graded at the outer node with the kernel folded in. `n = 1` only.
pub fn hls_pairing_direct(f: &CrField, g: &CrField, lambda: f64, order: usize) -> Result<Complex64, InequalityError> {
    same_space(f, g)?;
    if f.n() != 1 {
        return Err(InequalityError::Unsupported("direct double quadrature is implemented on S^3 only".into()));
    }
    check_lambda(1, lambda)?;
    let ctx = &f.ctx;
    let inner: Vec<Complex64> = (0..ctx.len())
        .into_par_iter()
        .map(|i| {
            let zeta = ctx.grid.point(i);
            let rule = GradedCrRule::singular(&zeta, lambda / 2.0, order, g.l() + 2);
            rule.points.iter().zip(&rule.weights).map(|(p, w)| g.eval(p) * *w).sum()
        })
        .collect();
    Ok((0..ctx.len()).map(|i| f.values[i].conj() * inner[i] * ctx.grid.weight(i)).sum())
}

/// Equality at `f = g ≡ 1`: `|S| μ_{0,0}` against `C |S|^{2/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlsConstantCheck {
    pub pairing: f64,
    pub predicted: f64,
    pub rel_err: f64,
}

pub fn hls_constant_check(n: usize, lambda: f64) -> Result<HlsConstantCheck, InequalityError> {
    let sa = area(2 * n + 1);
    let q = (2 * n + 2) as f64;
    let p = 2.0 * q / (2.0 * q - lambda);
    let pairing = sa * hls_eigenvalue(n, lambda, 0, 0, EIGEN_ORDER)?;
    let predicted = hls(n, lambda)? * sa.powf(2.0 / p);
    Ok(HlsConstantCheck {
        pairing,
        predicted,
        rel_err: (pairing - predicted).abs() / predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{random_cr_field, RandomFieldOptions};
    use crate::spectral::CrContext;

    #[test]
    fn constant_equality_on_s3_and_s5() {
        for lambda in [1.0, 2.0, 3.0] {
            let c = hls_constant_check(1, lambda).unwrap();
            assert!(c.rel_err < 1e-8, "{lambda}: {c:?}");
        }
        let c = hls_constant_check(2, 3.0).unwrap();
        assert!(c.rel_err < 1e-5, "{c:?}");
    }

    #[test]
    fn eigenvalues_are_largest_on_constants() {
        for lambda in [1.0, 3.0] {
            let mu0 = hls_eigenvalue(1, lambda, 0, 0, 48).unwrap();
            for (j, k) in [(1, 0), (0, 1), (1, 1), (3, 2)] {
                assert!(hls_eigenvalue(1, lambda, j, k, 48).unwrap() < mu0);
            }
        }
    }

    #[test]
    fn spectral_pairing_matches_double_quadrature() {
        let ctx = CrContext::new(1, 3).unwrap();
        let f = random_cr_field(&ctx, 11, RandomFieldOptions::default());
        let g = random_cr_field(&ctx, 12, RandomFieldOptions::default());
        let (a, _) = hls_pairing(&f, &g, 2.0).unwrap();
        let b = hls_pairing_direct(&f, &g, 2.0, 24).unwrap();
        assert!((a - b).norm() < 1e-7 * a.norm(), "{a} {b}");
    }

    #[test]
    fn pairing_is_hermitian_and_bilinear() {
        let ctx = CrContext::new(1, 4).unwrap();
        let f = random_cr_field(&ctx, 1, RandomFieldOptions::default());
        let g = random_cr_field(&ctx, 2, RandomFieldOptions::default());
        let (fg, _) = hls_pairing(&f, &g, 1.5).unwrap();
        let (gf, _) = hls_pairing(&g, &f, 1.5).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-12 * fg.norm());
        let h = CrField::from_coeffs(&ctx, f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * 2.0 + b).collect());
        let (hh, _) = hls_pairing(&f, &h, 1.5).unwrap();
        let (ff, _) = hls_pairing(&f, &f, 1.5).unwrap();
        assert!((hh - (ff * 2.0 + fg)).norm() < 1e-12 * hh.norm());
    }
}
