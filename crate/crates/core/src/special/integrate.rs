//! One-dimensional integrals with endpoint singularities and near-singular
//! integrands, plus the Euler-integral evaluation of ₂F₁ on [0, 1).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::gamma::ln_gamma_unchecked;
use super::quad::gauss_jacobi_unit;

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Memoized `gauss_jacobi_unit`; rules are immutable once built.
pub fn unit_rule(n: usize, a: f64, b: f64) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Rule>>> = OnceLock::new();
    let key = (n, a.to_bits(), b.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&key) {
        return r.clone();
    }
    let r = Arc::new(gauss_jacobi_unit(n, a, b));
    cache.lock().expect("rule cache").insert(key, r.clone());
    r
}

/// Nodes and weights on [0, 1] for ∫ u^{g0} (1−u)^{g1} f(u) du where f may
/// vary on the length scale `scale` near u = 0 (for example a factor
/// (u + scale)^{−a}). Panels shrink geometrically towards 0.
#[derive(Debug, Clone)]
pub struct GradedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GradedRule {
    pub fn new(g0: f64, g1: f64, scale: f64, npts: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let first = (scale / 4.0).clamp(1e-300, 0.25);
        // [0, first]: Jacobi weight u^{g0}
        {
            let r = unit_rule(npts, g0, 0.0);
            let sc = first.powf(g0 + 1.0);
            for (t, w) in r.0.iter().zip(&r.1) {
                let u = first * t;
                nodes.push(u);
                weights.push(w * sc * (1.0 - u).powf(g1));
            }
        }
        // geometric panels up to 1/2
        let gl = unit_rule(npts, 0.0, 0.0);
        let mut lo = first;
        while lo < 0.5 {
            let hi = (2.0 * lo).min(0.5);
            let h = hi - lo;
            for (t, w) in gl.0.iter().zip(&gl.1) {
                let u = lo + h * t;
                nodes.push(u);
                weights.push(w * h * u.powf(g0) * (1.0 - u).powf(g1));
            }
            lo = hi;
        }
        // [1/2, 1]: Jacobi weight (1−u)^{g1}
        {
            let r = unit_rule(npts, 0.0, g1);
            let sc = 0.5f64.powf(g1 + 1.0);
            for (t, w) in r.0.iter().zip(&r.1) {
                let u = 0.5 + 0.5 * t;
                nodes.push(u);
                weights.push(w * sc * u.powf(g0));
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }
}

/// ₂F₁(a, b; c; y) for 0 ≤ y < 1 and c > b > 0, through Euler's integral
///   Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−yt)^{−a} dt.
/// Accurate as y → 1 because the integral is graded at the scale 1 − y.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, y: f64) -> f64 {
    assert!((0.0..1.0).contains(&y), "argument must lie in [0, 1)");
    hyp2f1_euler_complement(a, b, c, 1.0 - y)
}

/// ₂F₁(a, b; c; 1 − x) for 0 < x ≤ 1, without forming 1 − x; keeps full
/// relative precision in `x` near the singular point.
pub fn hyp2f1_euler_complement(a: f64, b: f64, c: f64, x: f64) -> f64 {
    assert!(c > b && b > 0.0, "Euler integral needs c > b > 0");
    assert!(x > 0.0 && x <= 1.0, "complement must lie in (0, 1]");
    // u = 1 − t: (1 − y t) = u + x(1 − u)
    let scale = x / (1.0 - x).max(1e-300);
    let rule = GradedRule::new(c - b - 1.0, b - 1.0, scale, 24);
    let pref = ln_gamma_unchecked(c) - ln_gamma_unchecked(b) - ln_gamma_unchecked(c - b);
    // in log space: near u = 0 the weight underflows while the power overflows
    let val: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(&u, &w)| (w.ln() - a * (u + x * (1.0 - u)).ln()).exp())
        .sum();
    pref.exp() * val
}

/// Power series for ₂F₁ when |y| is well inside the unit disk.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..10_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * y;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
