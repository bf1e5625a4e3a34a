use crate::Real;

use super::SpecialError;

fn check_jacobi_params<T: Real>(alpha: T, beta: T) -> Result<(), SpecialError> {
    let m1 = -T::one();
    if !(alpha > m1) {
        return Err(SpecialError::Domain {
            what: "jacobi alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(beta > m1) {
        return Err(SpecialError::Domain {
            what: "jacobi beta",
            value: beta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Jacobi polynomial P_k^{(α,β)}(x) by forward recurrence.
pub fn jacobi_poly<T: Real>(k: usize, alpha: T, beta: T, x: T) -> Result<T, SpecialError> {
    check_jacobi_params(alpha, beta)?;
    Ok(jacobi_unchecked(k, alpha, beta, x))
}

pub(crate) fn jacobi_unchecked<T: Real>(k: usize, a: T, b: T, x: T) -> T {
    let mut prev = T::one();
    if k == 0 {
        return prev;
    }
    let one = T::one();
    let two = T::lit(2.0);
    let mut cur = (a + one) + (a + b + two) * (x - one) / two;
    for i in 1..k {
        let (p, c) = jacobi_step(i, a, b, x, prev, cur);
        prev = p;
        cur = c;
    }
    cur
}

#[inline]
fn jacobi_step<T: Real>(i: usize, a: T, b: T, x: T, prev: T, cur: T) -> (T, T) {
    let two = T::lit(2.0);
    let k = T::from_usize_lossy(i);
    let s = two * k + a + b;
    let c0 = two * (k + T::one()) * (k + a + b + T::one()) * s;
    let c1 = (s + T::one()) * ((s + two) * s * x + a * a - b * b);
    let c2 = two * (k + a) * (k + b) * (s + two);
    (cur, (c1 * cur - c2 * prev) / c0)
}

/// All Jacobi polynomials P_0..=P_kmax at x.
pub fn jacobi_all<T: Real>(kmax: usize, a: T, b: T, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(T::one());
    if kmax == 0 {
        return out;
    }
    let one = T::one();
    let two = T::lit(2.0);
    out.push((a + one) + (a + b + two) * (x - one) / two);
    for i in 1..kmax {
        let (_, next) = jacobi_step(i, a, b, x, out[i - 1], out[i]);
        out.push(next);
    }
    out
}

/// Derivative of P_k^{(α,β)} at x.
pub fn jacobi_derivative<T: Real>(k: usize, a: T, b: T, x: T) -> T {
    if k == 0 {
        return T::zero();
    }
    let one = T::one();
    let kk = T::from_usize_lossy(k);
    (kk + a + b + one) / T::lit(2.0) * jacobi_unchecked(k - 1, a + one, b + one, x)
}

/// Gegenbauer polynomial C_l^{(λ)}(x) by forward recurrence.
pub fn gegenbauer_poly<T: Real>(l: usize, lambda: T, x: T) -> Result<T, SpecialError> {
    if !(lambda > T::zero()) {
        return Err(SpecialError::Domain {
            what: "gegenbauer lambda",
            value: lambda.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(*gegenbauer_all(l, lambda, x).last().expect("nonempty"))
}

/// All Gegenbauer polynomials C_0..=C_lmax at x.
pub fn gegenbauer_all<T: Real>(lmax: usize, lambda: T, x: T) -> Vec<T> {
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(T::one());
    if lmax == 0 {
        return out;
    }
    out.push(two * lambda * x);
    for k in 1..lmax {
        let kk = T::from_usize_lossy(k);
        let next = (two * (kk + lambda) * x * out[k] - (kk + two * lambda - T::one()) * out[k - 1])
            / (kk + T::one());
        out.push(next);
    }
    out
}

/// Chebyshev polynomials T_0..=T_lmax at x.
pub fn chebyshev_all<T: Real>(lmax: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(T::one());
    if lmax == 0 {
        return out;
    }
    out.push(x);
    let two = T::lit(2.0);
    for k in 1..lmax {
        out.push(two * x * out[k] - out[k - 1]);
    }
    out
}

/// Zonal polynomial of degree l on S^d normalized to 1 at x = 1:
/// C_l^{((d-1)/2)}(x)/C_l^{((d-1)/2)}(1), or T_l(x) on the circle.
pub fn zonal_legendre_all(lmax: usize, d: usize, x: f64) -> Vec<f64> {
    if d == 1 {
        return chebyshev_all(lmax, x);
    }
    let lambda = (d as f64 - 1.0) / 2.0;
    let vals = gegenbauer_all(lmax, lambda, x);
    let at_one = gegenbauer_all(lmax, lambda, 1.0);
    vals.iter().zip(at_one).map(|(v, o)| v / o).collect()
}
