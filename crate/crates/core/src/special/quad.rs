//! Gauss–Jacobi rules by Golub–Welsch with Newton polishing.

use nalgebra::{DMatrix, SymmetricEigen};

use super::gamma::ln_gamma_unchecked;
use super::poly::{jacobi_derivative, jacobi_unchecked};

/// Nodes and weights on [−1, 1] for the weight (1−x)^α (1+x)^β.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_jacobi needs at least one node");
    assert!(alpha > -1.0 && beta > -1.0, "jacobi weight exponents must exceed -1");
    let (a, b) = (alpha, beta);
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jm[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let beta_j = if j == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            let off = beta_j.sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite nodes"));

    // Newton polish, then weights from the derivative formula.
    let log_c = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma_unchecked(n as f64 + a + 1.0)
        + ln_gamma_unchecked(n as f64 + b + 1.0)
        - ln_gamma_unchecked(n as f64 + ab + 1.0)
        - ln_gamma_unchecked(n as f64 + 1.0);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let p = jacobi_unchecked(n, a, b, *x);
            let dp = jacobi_derivative(n, a, b, *x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let dp = jacobi_derivative(n, a, b, *x);
        weights.push((log_c - (1.0 - *x * *x).ln() - 2.0 * dp.abs().ln()).exp());
    }
    let total = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma_unchecked(a + 1.0)
        + ln_gamma_unchecked(b + 1.0)
        - ln_gamma_unchecked(ab + 2.0))
    .exp();
    let s: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= total / s;
    }
    (nodes, weights)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Rule on [0, 1] for the weight t^a (1−t)^b.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    // t = (1+x)/2: (1−x) = 2(1−t), (1+x) = 2t.
    let (x, w) = gauss_jacobi(n, b, a);
    let scale = 0.5f64.powf(a + b + 1.0);
    let t = x.iter().map(|v| 0.5 * (1.0 + v)).collect();
    let w = w.iter().map(|v| v * scale).collect();
    (t, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta_fn(p: f64, q: f64) -> f64 {
        (ln_gamma_unchecked(p) + ln_gamma_unchecked(q) - ln_gamma_unchecked(p + q)).exp()
    }

    #[test]
    fn legendre_exactness() {
        let (x, w) = gauss_legendre(12);
        for k in 0..24 {
            let q: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn unit_jacobi_moments() {
        for &(a, b) in &[(0.0, 1.0), (-0.5, 0.0), (2.0, 0.5), (-0.3, -0.6)] {
            let n = 15;
            let (t, w) = gauss_jacobi_unit(n, a, b);
            for k in 0..(2 * n) {
                let q: f64 = t.iter().zip(&w).map(|(x, wt)| wt * x.powi(k as i32)).sum();
                let exact = beta_fn(a + k as f64 + 1.0, b + 1.0);
                assert!(((q - exact) / exact).abs() < 1e-12, "a={a} b={b} k={k}");
            }
        }
    }

    #[test]
    fn large_rule_is_stable() {
        let (x, w) = gauss_jacobi(200, 1.0, 0.0);
        assert!(w.iter().all(|v| *v > 0.0));
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-12);
        let m2: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t * t * (1.0 - t)).sum::<f64>();
        // ∫(1−x)² x² dx over [−1,1] = 16/15
        assert!((m2 - 16.0 / 15.0).abs() < 1e-12);
    }
}
