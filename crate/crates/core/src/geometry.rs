//! Points, conformal maps and quadrature on round spheres, CR spheres and
//! the Heisenberg group.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::special::{self, quad};
use crate::{Complex64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point lies on the pole of the inverse Cayley transform")]
    Pole,
    #[error("point lies on the pole of the inverse stereographic projection")]
    StereographicPole,
    #[error("invalid dimension for {what}: {value}")]
    Dimension { what: &'static str, value: usize },
    #[error("malformed quadrature text: {0}")]
    Parse(String),
}

/// Point of the CR sphere `S^{2n+1} ⊂ C^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrPoint<T> {
    pub coords: Vec<Complex<T>>,
}

/// Point of the round sphere `S^d ⊂ R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPoint<T> {
    pub coords: Vec<T>,
}

/// Point `(z, t)` of the Heisenberg group `H^n = C^n × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint<T> {
    pub z: Vec<Complex<T>>,
    pub t: T,
}

fn norm_sqr<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
}

/// Hermitian pairing `Σ a_j conj(b_j)`.
pub fn herm_dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + *x * y.conj())
}

impl<T: Real> CrPoint<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Self {
        Self { coords }
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn normalized(coords: Vec<Complex<T>>) -> Self {
        let r = norm_sqr(&coords).sqrt();
        Self {
            coords: coords.into_iter().map(|c| c / r).collect(),
        }
    }

    /// Complex dimension `n` of the sphere `S^{2n+1}`.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn norm(&self) -> T {
        norm_sqr(&self.coords).sqrt()
    }

    /// Circle action `ζ ↦ e^{iθ} ζ`.
    pub fn rotate_phase(&self, theta: T) -> Self {
        let e = Complex::from_polar(T::one(), theta);
        Self {
            coords: self.coords.iter().map(|c| *c * e).collect(),
        }
    }
}

impl<T: Real> RoundPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn norm(&self) -> T {
        self.coords.iter().fold(T::zero(), |a, x| a + *x * *x).sqrt()
    }
}

impl<T: Real> HeisenbergPoint<T> {
    pub fn new(z: Vec<Complex<T>>, t: T) -> Self {
        Self { z, t }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            z: vec![Complex::new(T::zero(), T::zero()); n],
            t: T::zero(),
        }
    }

    /// Group law `(z,t)(w,μ) = (z + w, t + μ + 2 Im(z·w̄))`.
    pub fn mul(&self, other: &Self) -> Self {
        let cross = herm_dot(&self.z, &other.z).im;
        Self {
            z: self.z.iter().zip(&other.z).map(|(a, b)| *a + *b).collect(),
            t: self.t + other.t + T::lit(2.0) * cross,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            z: self.z.iter().map(|c| -*c).collect(),
            t: -self.t,
        }
    }

    /// Homogeneous norm `(|z|⁴ + t²)^{1/4}`.
    pub fn norm(&self) -> T {
        let r2 = norm_sqr(&self.z);
        (r2 * r2 + self.t * self.t).sqrt().sqrt()
    }

    /// Dilation `δ_r(z, t) = (rz, r²t)`.
    pub fn dilate(&self, r: T) -> Self {
        Self {
            z: self.z.iter().map(|c| *c * r).collect(),
            t: self.t * r * r,
        }
    }

    /// `|u⁻¹ v|`, the gauge distance between two points.
    pub fn gauge_distance(&self, other: &Self) -> T {
        self.inverse().mul(other).norm()
    }
}

pub fn heisenberg_group_law<T: Real>(u: &HeisenbergPoint<T>, v: &HeisenbergPoint<T>) -> HeisenbergPoint<T> {
    u.mul(v)
}

pub fn heisenberg_norm<T: Real>(u: &HeisenbergPoint<T>) -> T {
    u.norm()
}

pub fn heisenberg_dilate<T: Real>(u: &HeisenbergPoint<T>, r: T) -> HeisenbergPoint<T> {
    u.dilate(r)
}

/// Surface area `2π^{(d+1)/2}/Γ((d+1)/2)` of `S^d`.
pub fn sphere_area<T: Real>(d: usize) -> Result<T, GeometryError> {
    if d < 1 {
        return Err(GeometryError::Dimension {
            what: "sphere_area",
            value: d,
        });
    }
    let h = T::from_usize_lossy(d + 1) / T::lit(2.0);
    let lg = special::ln_gamma(h).expect("positive half-integer");
    Ok(T::lit(2.0) * (h * T::PI().ln() - lg).exp())
}

/// Area of `S^d` in `f64`; `d = 0` gives the two-point sphere.
pub(crate) fn area(d: usize) -> f64 {
    if d == 0 {
        2.0
    } else {
        sphere_area::<f64>(d).expect("d >= 1")
    }
}

/// Cayley transform `H^n → S^{2n+1}`,
/// `(z, t) ↦ (2z/(1 + |z|² − it), (1 − |z|² + it)/(1 + |z|² − it))`.
///
/// The sign of `t` is the one compatible with the group law
/// `t + μ + 2 Im(z·w̄)`: with it, `|1 − ζ·η̄|` factors through the left
/// invariant gauge distance `|u⁻¹v|`.
pub fn cayley<T: Real>(u: &HeisenbergPoint<T>) -> CrPoint<T> {
    let one = T::one();
    let r2 = norm_sqr(&u.z);
    let den = Complex::new(one + r2, -u.t);
    let mut coords: Vec<Complex<T>> = u.z.iter().map(|c| (*c * T::lit(2.0)) / den).collect();
    coords.push(Complex::new(one - r2, u.t) / den);
    CrPoint { coords }
}

/// Inverse Cayley transform; errors at the pole `ζ_{n+1} = −1`.
pub fn cayley_inv<T: Real>(zeta: &CrPoint<T>) -> Result<HeisenbergPoint<T>, GeometryError> {
    let n = zeta.n();
    let last = zeta.coords[n];
    let den = Complex::new(T::one(), T::zero()) + last;
    if den.norm() <= T::epsilon() * T::lit(16.0) {
        return Err(GeometryError::Pole);
    }
    let z = zeta.coords[..n].iter().map(|c| *c / den).collect();
    let t = -((Complex::new(T::one(), T::zero()) - last) / den).im;
    Ok(HeisenbergPoint { z, t })
}

/// `2|J(u)| = (4/((1+|z|²)² + t²))^{Q/2}` with `Q = 2n + 2`.
pub fn cayley_jacobian<T: Real>(u: &HeisenbergPoint<T>) -> T {
    let n = u.z.len();
    let r2 = norm_sqr(&u.z);
    let d = (T::one() + r2).powi(2) + u.t * u.t;
    (T::lit(4.0) / d).powi(n as i32 + 1)
}

/// Stereographic projection `R^n → S^n`.
pub fn stereographic<T: Real>(x: &[T]) -> RoundPoint<T> {
    let r2 = x.iter().fold(T::zero(), |a, v| a + *v * *v);
    let den = T::one() + r2;
    let mut coords: Vec<T> = x.iter().map(|v| T::lit(2.0) * *v / den).collect();
    coords.push((T::one() - r2) / den);
    RoundPoint { coords }
}

/// Inverse stereographic projection; errors at `ω_{n+1} = −1`.
pub fn stereographic_inv<T: Real>(p: &RoundPoint<T>) -> Result<Vec<T>, GeometryError> {
    let n = p.coords.len() - 1;
    let den = T::one() + p.coords[n];
    if den.abs() <= T::epsilon() * T::lit(16.0) {
        return Err(GeometryError::StereographicPole);
    }
    Ok(p.coords[..n].iter().map(|v| *v / den).collect())
}

/// Jacobian `(2/(1+|x|²))^n` of the stereographic projection.
pub fn stereographic_jacobian<T: Real>(x: &[T]) -> T {
    let r2 = x.iter().fold(T::zero(), |a, v| a + *v * *v);
    (T::lit(2.0) / (T::one() + r2)).powi(x.len() as i32)
}

/// `|1 − ζ·η̄|`.
pub fn cr_pseudodistance<T: Real>(zeta: &CrPoint<T>, eta: &CrPoint<T>) -> T {
    (Complex::new(T::one(), T::zero()) - herm_dot(&zeta.coords, &eta.coords)).norm()
}

fn check_sub(n: usize, m: usize, len: usize, what: &'static str) -> Result<(), GeometryError> {
    if m == 0 || m >= n || len != n - m + 1 {
        return Err(GeometryError::Dimension { what, value: len });
    }
    Ok(())
}

/// Embeds `S^{2(n−m)+1}` into `S^{2n+1}` by zero padding of the last `m`
/// coordinates.
pub fn subsphere_embed_cr<T: Real>(eta: &CrPoint<T>, n: usize, m: usize) -> Result<CrPoint<T>, GeometryError> {
    check_sub(n, m, eta.coords.len(), "subsphere_embed_cr")?;
    let mut coords = eta.coords.clone();
    coords.resize(n + 1, Complex::new(T::zero(), T::zero()));
    Ok(CrPoint { coords })
}

/// First `n − m + 1` coordinates of a point of `S^{2n+1}`.
pub fn subsphere_project_cr<T: Real>(zeta: &CrPoint<T>, n: usize, m: usize) -> CrPoint<T> {
    CrPoint {
        coords: zeta.coords[..n - m + 1].to_vec(),
    }
}

/// Embeds `S^{n−m}` into `S^n` by zero padding of the last `m` coordinates.
pub fn subsphere_embed_round<T: Real>(eta: &RoundPoint<T>, n: usize, m: usize) -> Result<RoundPoint<T>, GeometryError> {
    check_sub(n, m, eta.coords.len(), "subsphere_embed_round")?;
    let mut coords = eta.coords.clone();
    coords.resize(n + 1, T::zero());
    Ok(RoundPoint { coords })
}

/// Places `S^{2(n−m)+1}` in `H^n`: the `n − m + 1` complex coordinates fill
/// the first complex slots of `C^n`, the remaining slots and `t` vanish.
pub fn subsphere_embed_heis<T: Real>(
    eta: &CrPoint<T>,
    n: usize,
    m: usize,
) -> Result<HeisenbergPoint<T>, GeometryError> {
    check_sub(n, m, eta.coords.len(), "subsphere_embed_heis")?;
    let mut z = eta.coords.clone();
    z.resize(n, Complex::new(T::zero(), T::zero()));
    Ok(HeisenbergPoint { z, t: T::zero() })
}

// ---------------------------------------------------------------------------
// Quadrature

/// Tensor rule on `S^{2n+1}` in Hopf coordinates `ζ_i = √u_i e^{iφ_i}`:
/// collapsed Gauss–Jacobi on the simplex of moduli, trapezoid in the phases.
/// Node index = `simplex_index · M^{n+1} + phase multi-index` (last phase
/// fastest).
#[derive(Debug, Clone)]
pub struct HopfGrid {
    pub n: usize,
    pub phases: usize,
    pub simplex_nodes: Vec<Vec<f64>>,
    pub simplex_weights: Vec<f64>,
    pub exactness: usize,
}

impl HopfGrid {
    /// Rule exact for polynomials in `(ζ, ζ̄)` of total degree ≤ `degree`.
    pub fn new(n: usize, degree: usize) -> Self {
        let phases = degree + 1;
        let q = (degree / 2 + 2) / 2;
        let q = q.max(1);
        let (simplex_nodes, simplex_weights) = collapsed_simplex_rule(n, q);
        Self {
            n,
            phases,
            simplex_nodes,
            simplex_weights,
            exactness: degree,
        }
    }

    pub fn phase_count(&self) -> usize {
        self.phases.pow(self.n as u32 + 1)
    }

    pub fn len(&self) -> usize {
        self.simplex_nodes.len() * self.phase_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Common factor of every node weight besides the simplex weight.
    pub fn phase_weight(&self) -> f64 {
        (2.0 * std::f64::consts::PI / self.phases as f64).powi(self.n as i32 + 1) / 2f64.powi(self.n as i32)
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.simplex_weights[idx / self.phase_count()] * self.phase_weight()
    }

    /// Phase multi-index of a node.
    pub fn phase_index(&self, idx: usize) -> Vec<usize> {
        let mut p = idx % self.phase_count();
        let mut out = vec![0; self.n + 1];
        for slot in out.iter_mut().rev() {
            *slot = p % self.phases;
            p /= self.phases;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<Complex64> {
        let u = &self.simplex_nodes[idx / self.phase_count()];
        let ph = self.phase_index(idx);
        let h = 2.0 * std::f64::consts::PI / self.phases as f64;
        u.iter()
            .zip(ph)
            .map(|(ui, k)| Complex64::from_polar(ui.max(0.0).sqrt(), h * k as f64))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<Complex64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.weight(i))
            .sum()
    }
}

/// Nodes and weights on the simplex `{u ≥ 0, Σ u_i = 1} ⊂ R^{n+1}` for the
/// Lebesgue measure `du_1 ⋯ du_n`, exact to degree `2q − 1`.
pub fn collapsed_simplex_rule(n: usize, q: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if n == 0 {
        return (vec![vec![1.0]], vec![1.0]);
    }
    let rules: Vec<_> = (0..n)
        .map(|i| quad::gauss_jacobi_unit(q, 0.0, (n - 1 - i) as f64))
        .collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let total = q.pow(n as u32);
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0; n];
        for slot in idx.iter_mut().rev() {
            *slot = rem % q;
            rem /= q;
        }
        let mut u = Vec::with_capacity(n + 1);
        let mut left = 1.0;
        let mut w = 1.0;
        for (i, &k) in idx.iter().enumerate() {
            let x = rules[i].0[k];
            w *= rules[i].1[k];
            u.push(left * x);
            left *= 1.0 - x;
        }
        u.push(left);
        nodes.push(u);
        weights.push(w);
    }
    (nodes, weights)
}

/// Polar tensor rule on `S^d`: `ω = (√(1−t²) ω', t)` recursively, with a
/// trapezoid rule on the final circle.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub d: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl PolarGrid {
    pub fn new(d: usize, degree: usize) -> Self {
        assert!(d >= 1, "polar grid needs d >= 1");
        let (nodes, weights) = polar_nodes(d, degree);
        Self {
            d,
            nodes,
            weights,
            exactness: degree,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

fn polar_nodes(d: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if d == 1 {
        let m = degree + 1;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let nodes = (0..m).map(|k| vec![(h * k as f64).cos(), (h * k as f64).sin()]).collect();
        return (nodes, vec![h; m]);
    }
    let q = degree / 2 + 1;
    let e = (d as f64 - 2.0) / 2.0;
    let (t, wt) = quad::gauss_jacobi(q, e, e);
    let (sub, wsub) = polar_nodes(d - 1, degree);
    let mut nodes = Vec::with_capacity(q * sub.len());
    let mut weights = Vec::with_capacity(q * sub.len());
    for (ti, wi) in t.iter().zip(&wt) {
        let r = (1.0 - ti * ti).max(0.0).sqrt();
        for (s, ws) in sub.iter().zip(&wsub) {
            let mut p: Vec<f64> = s.iter().map(|v| v * r).collect();
            p.push(*ti);
            nodes.push(p);
            weights.push(wi * ws);
        }
    }
    (nodes, weights)
}

/// Generic rule: nodes as real coordinate vectors in `R^{d+1}` (complex
/// coordinates interleaved as `(Re, Im)` pairs for CR spheres).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

/// Builds a rule on `S^d` exact to degree `resolution − 1`: trapezoid for
/// `d = 1`, Hopf coordinates for odd `d ≥ 3`, polar coordinates otherwise.
pub fn build_quadrature(d: usize, resolution: usize) -> Result<QuadratureRule, GeometryError> {
    if d < 1 {
        return Err(GeometryError::Dimension {
            what: "build_quadrature",
            value: d,
        });
    }
    if resolution < 2 {
        return Err(GeometryError::Dimension {
            what: "quadrature resolution",
            value: resolution,
        });
    }
    let degree = resolution - 1;
    if d >= 3 && d % 2 == 1 {
        let g = HopfGrid::new((d - 1) / 2, degree);
        let nodes = g
            .points()
            .into_iter()
            .map(|p| p.iter().flat_map(|c| [c.re, c.im]).collect())
            .collect();
        Ok(QuadratureRule {
            dim: d,
            nodes,
            weights: g.weights(),
            exactness_degree: degree,
        })
    } else {
        let g = PolarGrid::new(d, degree);
        Ok(QuadratureRule {
            dim: d,
            nodes: g.nodes,
            weights: g.weights,
            exactness_degree: degree,
        })
    }
}

impl QuadratureRule {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    /// Portable text form: a header line, then one node per line with its
    /// coordinates followed by the weight, all in round-trip decimal.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "quadrature dim={} exactness={} count={}\n",
            self.dim,
            self.exactness_degree,
            self.nodes.len()
        );
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            for v in x {
                let _ = write!(s, "{v:e} ");
            }
            let _ = writeln!(s, "{w:e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GeometryError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| GeometryError::Parse("empty input".into()))?;
        let mut dim = None;
        let mut exact = None;
        let mut count = None;
        for tok in header.split_whitespace().skip(1) {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| GeometryError::Parse(format!("bad header token {tok}")))?;
            let v: usize = v.parse().map_err(|_| GeometryError::Parse(format!("bad number {v}")))?;
            match k {
                "dim" => dim = Some(v),
                "exactness" => exact = Some(v),
                "count" => count = Some(v),
                _ => return Err(GeometryError::Parse(format!("unknown key {k}"))),
            }
        }
        let (dim, exact, count) = match (dim, exact, count) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(GeometryError::Parse("incomplete header".into())),
        };
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            let mut vals = vals.map_err(|e| GeometryError::Parse(e.to_string()))?;
            if vals.len() != dim + 2 {
                return Err(GeometryError::Parse(format!("expected {} fields", dim + 2)));
            }
            weights.push(vals.pop().expect("nonempty"));
            nodes.push(vals);
        }
        if nodes.len() != count {
            return Err(GeometryError::Parse(format!("expected {count} nodes, found {}", nodes.len())));
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            exactness_degree: exact,
        })
    }
}

// ---------------------------------------------------------------------------
// Zonal rules

/// Rule for `∫_{S^{2n+1}} f(ζ·η̄) dσ(ζ)` as a sum over points `w` of the
/// closed unit disk. When built with a singular exponent `α`, the weights
/// already contain the factor `|1 − w|^{−α}`.
#[derive(Debug, Clone)]
pub struct CrZonalRule {
    pub n: usize,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl CrZonalRule {
    /// Smooth rule: density `|S^{2n−1}| (1−|w|²)^{n−1} dA(w)`, in `x = |w|²`
    /// by Gauss–Jacobi and in `arg w` by the trapezoid rule.
    pub fn smooth(n: usize, order: usize) -> Self {
        assert!(n >= 1, "zonal rule needs n >= 1");
        let (x, wx) = quad::gauss_jacobi_unit(order, 0.0, n as f64 - 1.0);
        let m = 2 * order + 1;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let c = area(2 * n - 1) / 2.0;
        let mut points = Vec::with_capacity(order * m);
        let mut weights = Vec::with_capacity(order * m);
        for (xi, wi) in x.iter().zip(&wx) {
            for k in 0..m {
                points.push(Complex64::from_polar(xi.sqrt(), h * k as f64));
                weights.push(c * wi * h);
            }
        }
        Self { n, points, weights }
    }

    /// Pole-centred rule for `|1 − w|^{−α} g(w)`: polar coordinates
    /// `w = 1 − 2τ cos ψ e^{iψ}` around `w = 1`, Gauss–Jacobi in `τ` and in
    /// `sin ψ` with the exact endpoint exponents.
    pub fn singular(n: usize, alpha: f64, order: usize) -> Self {
        assert!(n >= 1, "zonal rule needs n >= 1");
        assert!(alpha < n as f64 + 1.0, "kernel not integrable");
        let nf = n as f64;
        let (tau, wtau) = quad::gauss_jacobi_unit(order, nf - alpha, nf - 1.0);
        let e = (2.0 * nf - alpha - 1.0) / 2.0;
        let (v, wv) = quad::gauss_jacobi(order, e, e);
        let c = area(2 * n - 1) * 2f64.powf(2.0 * nf - alpha);
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (vi, wvi) in v.iter().zip(&wv) {
            let cos = (1.0 - vi * vi).max(0.0).sqrt();
            let dir = Complex64::new(cos, *vi);
            for (ti, wti) in tau.iter().zip(&wtau) {
                points.push(Complex64::new(1.0, 0.0) - dir * (2.0 * cos * ti));
                weights.push(c * wvi * wti);
            }
        }
        Self { n, points, weights }
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(w, c)| c * f(*w)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.points.iter().zip(&self.weights).map(|(w, c)| f(*w) * *c).sum()
    }
}

/// `∫_{S^{2n+1}} |1 − ζ·η̄|^{−α} g(ζ·η̄) dσ(ζ)` by the pole-centred rule.
pub fn zonal_integral(n: usize, alpha: f64, g: impl Fn(Complex64) -> f64) -> f64 {
    CrZonalRule::singular(n, alpha, 48).integrate(g)
}

/// Rule for `∫_{S^d} |ζ − η|^{−β} g(ζ·η) dσ(ζ)` over `t = ζ·η ∈ [−1, 1]`;
/// weights contain the kernel.
#[derive(Debug, Clone)]
pub struct RoundZonalRule {
    pub d: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RoundZonalRule {
    pub fn singular(d: usize, beta: f64, order: usize) -> Self {
        assert!(d >= 1 && beta < d as f64, "kernel not integrable");
        let e = (d as f64 - 2.0) / 2.0;
        let (t, w) = quad::gauss_jacobi(order, e - beta / 2.0, e);
        let c = area(d - 1) * 2f64.powf(-beta / 2.0);
        Self {
            d,
            points: t,
            weights: w.into_iter().map(|x| x * c).collect(),
        }
    }

    pub fn smooth(d: usize, order: usize) -> Self {
        Self::singular(d, 0.0, order)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(t, c)| c * f(*t)).sum()
    }
}

/// Shared handle used by fields built on the same grid.
pub type SharedHopfGrid = Arc<HopfGrid>;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rand_heis(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HeisenbergPoint<f64> {
        HeisenbergPoint::new(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
                .collect(),
            rng.random_range(-scale..scale),
        )
    }

    #[test]
    fn areas() {
        assert!((sphere_area::<f64>(1).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area::<f64>(3).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area::<f64>(5).unwrap() - PI.powi(3)).abs() < 1e-12);
        assert!((sphere_area::<f64>(2).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(sphere_area::<f64>(0).is_err());
        assert!((sphere_area::<f32>(3).unwrap() - 19.739_21).abs() < 1e-4);
    }

    #[test]
    fn cayley_basics() {
        let o = cayley(&HeisenbergPoint::<f64>::identity(2));
        assert_eq!(o.coords[2], Complex64::new(1.0, 0.0));
        let u = HeisenbergPoint::new(vec![Complex64::new(1.0, 0.0)], 0.0);
        let p = cayley(&u);
        assert!((p.coords[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(p.coords[1].norm() < 1e-15);
        assert_eq!(cayley_jacobian(&HeisenbergPoint::<f64>::identity(1)), 16.0);
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let j = cayley_jacobian(&HeisenbergPoint::new(vec![Complex64::new(0.0, 0.0)], k as f64));
            assert!(j < prev);
            prev = j;
        }
        let south = CrPoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert_eq!(cayley_inv(&south), Err(GeometryError::Pole));
    }

    #[test]
    fn cayley_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..4 {
            for _ in 0..200 {
                let u = rand_heis(&mut rng, n, 10.0 / (n as f64).sqrt());
                let p = cayley(&u);
                assert!((p.norm() - 1.0).abs() < 1e-14);
                let v = cayley_inv(&p).unwrap();
                let err = u.inverse().mul(&v).z.iter().map(|c| c.norm()).fold(0.0, f64::max);
                assert!(err < 1e-12 && (u.t - v.t).abs() < 1e-12 * (1.0 + u.t.abs()));
            }
        }
    }

    #[test]
    fn stereographic_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let o = stereographic(&[0.0f64, 0.0]);
        assert_eq!(o.coords, vec![0.0, 0.0, 1.0]);
        assert_eq!(stereographic_jacobian(&[0.0f64, 0.0, 0.0]), 8.0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let (sx, sy) = (stereographic(&x), stereographic(&y));
            let lhs: f64 = sx.coords.iter().zip(&sy.coords).map(|(a, b)| (a - b).powi(2)).sum();
            let nx: f64 = x.iter().map(|v| v * v).sum();
            let ny: f64 = y.iter().map(|v| v * v).sum();
            let dxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
            let rhs = 2.0 / (1.0 + nx) * dxy * 2.0 / (1.0 + ny);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
            let back = stereographic_inv(&sx).unwrap();
            assert!(back.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-12 * (1.0 + b.abs())));
        }
    }

    #[test]
    fn pseudodistance_matches_gauge_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let u = rand_heis(&mut rng, 1, 3.0);
            let v = rand_heis(&mut rng, 1, 3.0);
            let lhs = cr_pseudodistance(&cayley(&u), &cayley(&v));
            let du = (1.0 + norm_sqr(&u.z)).powi(2) + u.t * u.t;
            let dv = (1.0 + norm_sqr(&v.z)).powi(2) + v.t * v.t;
            let rhs = 2.0 * du.powf(-0.5) * u.gauge_distance(&v).powi(2) * dv.powf(-0.5);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs), "{lhs} {rhs}");
        }
        let p = CrPoint::normalized(vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5)]);
        let q = CrPoint::new(p.coords.iter().map(|c| -c).collect());
        assert!(cr_pseudodistance(&p, &p) < 1e-15);
        assert!((cr_pseudodistance(&p, &q) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (a, b, c) = (rand_heis(&mut rng, 2, 2.0), rand_heis(&mut rng, 2, 2.0), rand_heis(&mut rng, 2, 2.0));
            let l = a.mul(&b).mul(&c);
            let r = a.mul(&b.mul(&c));
            assert!((l.t - r.t).abs() < 1e-13 * (1.0 + l.t.abs()));
            assert!(a.mul(&a.inverse()).norm() < 1e-15);
            let r = 1.7;
            assert!((a.dilate(r).norm() - r * a.norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn embeddings() {
        let eta = CrPoint::normalized(vec![Complex64::new(0.6, 0.2), Complex64::new(-0.1, 0.7)]);
        let z = subsphere_embed_cr(&eta, 2, 1).unwrap();
        assert_eq!(z.coords.len(), 3);
        assert_eq!(z.coords[2], Complex64::new(0.0, 0.0));
        assert_eq!(subsphere_project_cr(&z, 2, 1), eta);
        let h = subsphere_embed_heis(&eta, 2, 1).unwrap();
        assert_eq!(h.t, 0.0);
        assert_eq!(h.z, eta.coords);
        assert!((cayley_jacobian(&h) - 1.0).abs() < 1e-14);
        // the embedded sphere is fixed by the Cayley transform
        let c = cayley(&h);
        assert!((c.coords[0] - eta.coords[0]).norm() < 1e-15 && c.coords[2].norm() < 1e-15);
        let r = subsphere_embed_round(&RoundPoint::new(vec![0.6, 0.8]), 2, 1).unwrap();
        assert_eq!(r.coords, vec![0.6, 0.8, 0.0]);
        assert!(subsphere_embed_cr(&eta, 2, 2).is_err());
    }

    #[test]
    fn quadrature_totals_and_examples() {
        let r = build_quadrature(1, 16).unwrap();
        assert_eq!(r.nodes.len(), 16);
        assert!(r.weights.iter().all(|w| (w - 2.0 * PI / 16.0).abs() < 1e-15));
        for d in 1..7 {
            let r = build_quadrature(d, 9).unwrap();
            let a = sphere_area::<f64>(d).unwrap();
            assert!(((r.total_weight() - a) / a).abs() < 1e-12, "d={d}");
            assert!(r.weights.iter().all(|w| *w > 0.0));
        }
        let r = build_quadrature(5, 10).unwrap();
        let v = r.integrate(|x| x[0] * x[0] + x[1] * x[1]);
        assert!((v - PI.powi(3) / 3.0).abs() < 1e-12);
    }

    // ∫_{S^d} x^a = 2 Π Γ((a_i+1)/2) / Γ(Σ(a_i+1)/2) for even a_i, else 0.
    fn monomial_integral(a: &[usize]) -> f64 {
        if a.iter().any(|k| k % 2 == 1) {
            return 0.0;
        }
        let lg = |x: f64| special::ln_gamma(x).unwrap();
        let s: f64 = a.iter().map(|&k| lg((k as f64 + 1.0) / 2.0)).sum();
        let tot: f64 = a.iter().map(|&k| (k as f64 + 1.0) / 2.0).sum();
        2.0 * (s - lg(tot)).exp()
    }

    #[test]
    fn monomial_exactness() {
        for &(d, res) in &[(3usize, 12usize), (2, 9), (4, 7)] {
            let r = build_quadrature(d, res).unwrap();
            let deg = res - 1;
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            for _ in 0..60 {
                let mut a = vec![0usize; d + 1];
                let total = rng.random_range(0..=deg);
                for _ in 0..total {
                    a[rng.random_range(0..=d)] += 1;
                }
                let q = r.integrate(|x| x.iter().zip(&a).map(|(v, &k)| v.powi(k as i32)).product());
                let want = monomial_integral(&a);
                assert!((q - want).abs() < 1e-12, "d={d} a={a:?}: {q} {want}");
            }
        }
    }

    #[test]
    fn circle_action_invariance() {
        let g = HopfGrid::new(1, 8);
        let f = |z: &[Complex64]| (z[0] * z[0] * z[1].conj()).re + (z[0] * z[1].conj()).norm_sqr();
        let pts = g.points();
        let base: f64 = pts.iter().enumerate().map(|(i, p)| g.weight(i) * f(p)).sum();
        let e = Complex64::from_polar(1.0, 0.77);
        let rot: f64 = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let q: Vec<_> = p.iter().map(|c| c * e).collect();
                g.weight(i) * f(&q)
            })
            .sum();
        assert!((base - rot).abs() < 1e-10);
    }

    #[test]
    fn text_round_trip() {
        let r = build_quadrature(3, 5).unwrap();
        let back = QuadratureRule::from_text(&r.to_text()).unwrap();
        assert_eq!(r, back);
        assert!(QuadratureRule::from_text("quadrature dim=1").is_err());
    }

    #[test]
    fn zonal_rules_match_full_quadrature() {
        // f(w) = |w|⁴ + Re w³ on S^5, pole e_1
        let f = |w: Complex64| w.norm_sqr().powi(2) + (w * w * w).re + w.re;
        let zr = CrZonalRule::smooth(2, 6);
        let g = HopfGrid::new(2, 6);
        let full: f64 = g.points().iter().enumerate().map(|(i, p)| g.weight(i) * f(p[0])).sum();
        assert!((zr.integrate(f) - full).abs() < 1e-12);
        // singular rule with α = 0 agrees with the smooth one
        let s = CrZonalRule::singular(2, 0.0, 12);
        assert!((s.integrate(f) - full).abs() < 1e-9);
        // round: ∫_{S^2} t² = 4π/3
        let rr = RoundZonalRule::smooth(2, 4);
        assert!((rr.integrate(|t| t * t) - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
