//! Sharp constants. Every function is generic over the scalar; ranges are
//! checked against the hypotheses of the corresponding inequality.

use super::InequalityError;
use crate::geometry::sphere_area;
use crate::special::ln_gamma;
use crate::Real;

fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

fn us<T: Real>(k: usize) -> T {
    T::from_usize_lossy(k)
}

fn lg<T: Real>(x: T) -> Result<T, InequalityError> {
    Ok(ln_gamma(x)?)
}

fn area<T: Real>(d: usize) -> Result<T, InequalityError> {
    sphere_area(d).map_err(|e| InequalityError::Range(e.to_string()))
}

fn range(ok: bool, msg: impl FnOnce() -> String) -> Result<(), InequalityError> {
    if ok {
        Ok(())
    } else {
        Err(InequalityError::Range(msg()))
    }
}

pub(crate) fn check_nm(n: usize, m: usize) -> Result<(), InequalityError> {
    range(m >= 1 && m < n, || format!("need 1 <= m < n, got n={n}, m={m}"))
}

fn q<T: Real>(n: usize) -> T {
    us::<T>(2 * n + 2)
}

/// `|S^{2n+1}| = 2π^{n+1}/n!`.
fn cr_area<T: Real>(n: usize) -> Result<T, InequalityError> {
    area(2 * n + 1)
}

/// Flat trace constant `C_{m,σ,n}` for `‖τ_m f‖²_{L^{2(n−m)/(n−2σ)}} ≤ C ∫|(−Δ)^{σ/2} f|²`,
/// with `σ` the half-power (`f ∈ D_{2σ}`), `0 ≤ m < n`, `m/2 < σ < n/2`.
pub fn einav_loss<T: Real>(m: usize, s_half: T, n: usize) -> Result<T, InequalityError> {
    let (mf, nf) = (us::<T>(m), us::<T>(n));
    let two = lit::<T>(2.0);
    range(m < n && s_half > mf / two && s_half < nf / two, || {
        format!("need 0 <= m < n and m/2 < s < n/2, got m={m}, s={s_half}, n={n}")
    })?;
    let s = s_half;
    let ln = -two * s * two.ln() - s * T::PI().ln() + lg(nf / two - s)? + lg(s - mf / two)? - lg(s)? - lg(nf / two + s - mf)?
        + (two * s - mf) / (nf - mf) * (lg(nf - mf)? - lg((nf - mf) / two)?);
    Ok(ln.exp())
}

/// Constant for the restriction of `f ∈ D_{2σ}(R^n)` to the unit sphere
/// `S^{n−1}`, `n ≥ 2`, `1/2 < σ < n/2`.
pub fn bez<T: Real>(n: usize, s_half: T) -> Result<T, InequalityError> {
    let nf = us::<T>(n);
    let (one, two) = (T::one(), lit::<T>(2.0));
    range(n >= 2 && s_half > one / two && s_half < nf / two, || {
        format!("need n >= 2 and 1/2 < s < n/2, got n={n}, s={s_half}")
    })?;
    let s = s_half;
    let ln = (one - two * s) * two.ln() + lg(two * s - one)? + lg(nf / two - s)? - two * lg(s)? - lg(nf / two - one + s)?
        + (two * s - one) / (nf - one) * (lg(nf / two)? - (two * T::PI().powf(nf / two)).ln());
    Ok(ln.exp())
}

/// Sharp HLS constant on `S^{2n+1}` for the kernel `|1 − ζ·η̄|^{−λ/2}`, `0 < λ < Q`.
pub fn hls<T: Real>(n: usize, lambda: T) -> Result<T, InequalityError> {
    let qq = q::<T>(n);
    range(n >= 1 && lambda > T::zero() && lambda < qq, || format!("need 0 < lambda < Q = {qq}, got {lambda}"))?;
    let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
    let nfact = lg(us::<T>(n + 1))?;
    let ln = lambda / qq * cr_area::<T>(n)?.ln() + nfact + lg((qq - lambda) / two)? - two * lg((two * qq - lambda) / four)?;
    Ok(ln.exp())
}

fn check_cr_s<T: Real>(n: usize, s: T) -> Result<(), InequalityError> {
    let qq = q::<T>(n);
    range(n >= 1 && s > T::zero() && s < qq, || format!("need n >= 1 and 0 < s < Q = {qq}, got n={n}, s={s}"))
}

/// Sobolev constant for `∫ |A_s^{1/2} F|² ≥ S ‖F‖²_{2Q/(Q−s)}` on `S^{2n+1}`.
pub fn sobolev_cr<T: Real>(n: usize, s: T) -> Result<T, InequalityError> {
    check_cr_s(n, s)?;
    let qq = q::<T>(n);
    let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
    let ln = s / qq * cr_area::<T>(n)?.ln() + two * (lg((qq + s) / four)? - lg((qq - s) / four)?);
    Ok(ln.exp())
}

/// Sobolev constant on `H^n`: `2^{s/Q}` times the sphere constant.
pub fn sobolev_heis<T: Real>(n: usize, s: T) -> Result<T, InequalityError> {
    Ok(lit::<T>(2.0).powf(s / q::<T>(n)) * sobolev_cr(n, s)?)
}

/// Sobolev constant for `∫ F P_s F ≥ S ‖F‖²_{2d/(d−s)}` on `S^d`, `0 < s < d`.
pub fn sobolev_round<T: Real>(d: usize, s: T) -> Result<T, InequalityError> {
    let df = us::<T>(d);
    range(d >= 1 && s > T::zero() && s < df, || format!("need 0 < s < d = {d}, got {s}"))?;
    let two = lit::<T>(2.0);
    let ln = lg((df + s) / two)? - lg((df - s) / two)? + s / df * area::<T>(d)?.ln();
    Ok(ln.exp())
}

/// Fundamental solution constant: `L_s^{−1} δ₀ = a_{n,s} |u|^{s−Q}`.
pub fn a_ns<T: Real>(n: usize, s: T) -> Result<T, InequalityError> {
    check_cr_s(n, s)?;
    let qq = q::<T>(n);
    let (one, two, four) = (T::one(), lit::<T>(2.0), lit::<T>(4.0));
    let ln = (us::<T>(n) - one - s / two) * two.ln() + two * lg((qq - s) / four)? - us::<T>(n + 1) * T::PI().ln() - lg(s / two)?;
    Ok(ln.exp())
}

/// Which form of the CR trace constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TraceVariant {
    /// Trace onto the subgroup `H^{n−m}`.
    Subgroup,
    /// Trace onto the sub-sphere of `S^{2n+1}`.
    Sphere,
    /// Trace onto the sub-sphere sitting inside `H^n`.
    SphereInGroup,
}

pub(crate) fn check_trace<T: Real>(n: usize, m: usize, s: T) -> Result<(), InequalityError> {
    let qq = q::<T>(n);
    range(m >= 1 && m < n && s > us::<T>(2 * m) && s < qq, || {
        format!("need 1 <= m < n and 2m < s < Q = {qq}, got n={n}, m={m}, s={s}")
    })
}

/// Sharp constant of the CR / Heisenberg trace inequality with exponent
/// `p = 2(Q − 2m)/(Q − s)`.
pub fn trace_cr<T: Real>(n: usize, m: usize, s: T, variant: TraceVariant) -> Result<T, InequalityError> {
    check_trace(n, m, s)?;
    let qq = q::<T>(n);
    let mf = us::<T>(m);
    let (two, four) = (lit::<T>(2.0), lit::<T>(4.0));
    let ns = n - m;
    let e = (s - two * mf) / (qq - two * mf);
    let ln = mf * T::PI().ln() + lg(s / two)? - lg((s - two * mf) / two)? + e * cr_area::<T>(ns)?.ln()
        + two * (lg((qq + s - four * mf) / four)? - lg((qq - s) / four)?);
    let core = ln.exp();
    Ok(match variant {
        TraceVariant::Sphere => core,
        TraceVariant::Subgroup => two.powf(e) * core,
        TraceVariant::SphereInGroup => two * core,
    })
}

/// Coefficients of a Beckner–Onofri type functional
/// `energy · ∫ F A F + trace/|Σ| · ∫_Σ F ≥ trace · log(avg e^F)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OnofriCoefficients<T> {
    pub energy: T,
    pub trace: T,
}

/// CR trace Onofri pair `(1/(2(n−m+1)! |S^{2(n−m)+1}|), π^m)`; `m = 0` is
/// the untraced inequality on `S^{2n+1}`.
pub fn onofri_cr<T: Real>(n: usize, m: usize) -> Result<OnofriCoefficients<T>, InequalityError> {
    range(n >= 1 && m < n, || format!("need 0 <= m < n, got n={n}, m={m}"))?;
    let ns = n - m;
    let fact = lg(us::<T>(ns + 2))?.exp();
    Ok(OnofriCoefficients {
        energy: T::one() / (lit::<T>(2.0) * fact * cr_area::<T>(ns)?),
        trace: T::PI().powi(m as i32),
    })
}

/// Round trace Onofri pair `(1/(2(n−m)! |S^{n−m}|), π^{m/2} 2^m Γ(n/2)/Γ((n−m)/2))`;
/// `m = 0` is the untraced inequality on `S^n`.
pub fn onofri_round<T: Real>(n: usize, m: usize) -> Result<OnofriCoefficients<T>, InequalityError> {
    range(n >= 1 && m < n, || format!("need 0 <= m < n, got n={n}, m={m}"))?;
    let ns = n - m;
    let two = lit::<T>(2.0);
    let mf = us::<T>(m);
    let fact = lg(us::<T>(ns + 1))?.exp();
    let trace = (mf / two * T::PI().ln() + mf * two.ln() + lg(us::<T>(n) / two)? - lg(us::<T>(ns) / two)?).exp();
    Ok(OnofriCoefficients {
        energy: T::one() / (two * fact * area::<T>(ns)?),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn flat_constant_without_trace_is_inverse_round_sobolev() {
        for n in 2..7 {
            for k in 1..(2 * n) {
                let s = k as f64 / 4.0;
                if s >= n as f64 / 2.0 {
                    continue;
                }
                let el = einav_loss(0, s, n).unwrap();
                let sr = sobolev_round(n, 2.0 * s).unwrap();
                assert!(rel(el * sr, 1.0) < 1e-12, "{n} {s}");
            }
        }
    }

    #[test]
    fn sphere_restriction_matches_codimension_one_flat_trace() {
        // a Möbius map of R^n takes the hyperplane to the unit sphere
        for (n, s) in [(3, 1.0), (4, 1.5), (5, 0.75), (6, 2.2)] {
            let a = bez(n, s).unwrap();
            let b = einav_loss(1, s, n).unwrap();
            assert!(rel(a, b) < 1e-12, "{n} {s}: {a} {b}");
        }
    }

    #[test]
    fn a_ns_values() {
        assert!(rel(a_ns(1, 2.0).unwrap(), 1.0 / (2.0 * PI)) < 1e-14);
    }

    #[test]
    fn a_ns_ratio_identity() {
        for n in 2..=6usize {
            for m in 1..n {
                let q = (2 * n + 2) as f64;
                let mut s = 2.0 * m as f64 + 0.25;
                while s < q - 1e-9 {
                    let lhs = a_ns(n, s).unwrap() / a_ns(n - m, s - 2.0 * m as f64).unwrap();
                    let rhs = crate::special::gamma((s - 2.0 * m as f64) / 2.0).unwrap() / (PI.powi(m as i32) * crate::special::gamma(s / 2.0).unwrap());
                    assert!(rel(lhs, rhs) < 1e-12, "{n} {m} {s}");
                    s += 0.25;
                }
            }
        }
    }

    #[test]
    fn constant_ratios() {
        for (n, m, s) in [(2, 1, 3.0), (2, 1, 4.0), (3, 1, 5.5), (3, 2, 7.0), (5, 2, 9.0)] {
            let q = (2 * n + 2) as f64;
            let c14 = trace_cr(n, m, s, TraceVariant::Sphere).unwrap();
            let c15 = trace_cr(n, m, s, TraceVariant::SphereInGroup).unwrap();
            let c13 = trace_cr(n, m, s, TraceVariant::Subgroup).unwrap();
            assert!(rel(c15 / c14, 2.0) < 1e-14);
            assert!(rel(c13 / c14, 2f64.powf((s - 2.0 * m as f64) / (q - 2.0 * m as f64))) < 1e-14);
            assert!(rel(sobolev_heis(n, s.min(q - 0.5)).unwrap() / sobolev_cr(n, s.min(q - 0.5)).unwrap(), 2f64.powf(s.min(q - 0.5) / q)) < 1e-14);
        }
    }

    #[test]
    fn sobolev_small_order_limit() {
        for n in 1..4 {
            assert!(rel(sobolev_cr(n, 1e-9).unwrap(), 1.0) < 1e-7);
        }
    }

    #[test]
    fn onofri_pairs_reduce_without_trace() {
        for n in 1..5usize {
            let c = onofri_cr::<f64>(n, 0).unwrap();
            let fact: f64 = (1..=n + 1).map(|k| k as f64).product();
            assert!(rel(c.energy, 1.0 / (2.0 * fact * crate::geometry::area(2 * n + 1))) < 1e-14);
            assert_eq!(c.trace, 1.0);
            let r = onofri_round::<f64>(n + 1, 0).unwrap();
            assert!(rel(r.trace, 1.0) < 1e-14);
        }
        // deepest trace, m = n − 1
        let c = onofri_round::<f64>(3, 2).unwrap();
        assert!(rel(c.trace, PI * 4.0 * crate::special::gamma(1.5).unwrap() / crate::special::gamma(0.5).unwrap()) < 1e-14);
        assert!(rel(c.energy, 1.0 / (2.0 * 2.0 * PI)) < 1e-14);
    }

    #[test]
    fn generic_in_f32() {
        let a: f32 = sobolev_cr(1, 2.0f32).unwrap();
        let b = sobolev_cr(1, 2.0f64).unwrap();
        assert!((a as f64 - b).abs() / b < 1e-5);
        let t: f32 = trace_cr(2, 1, 4.0f32, TraceVariant::Sphere).unwrap();
        assert!((t as f64 / trace_cr(2, 1, 4.0, TraceVariant::Sphere).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn range_errors() {
        assert!(einav_loss(1, 0.4, 3).is_err());
        assert!(bez(3, 1.6).is_err());
        assert!(hls(1, 4.0).is_err());
        assert!(trace_cr(2, 1, 2.0, TraceVariant::Sphere).is_err());
        assert!(sobolev_round(2, 2.0).is_err());
    }
}
