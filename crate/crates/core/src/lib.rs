//! Spectral operators, extension kernels and sharp-constant checks for
//! Sobolev trace and Beckner–Onofri type inequalities on the CR sphere
//! `S^{2n+1} ⊂ C^{n+1}`, the round sphere `S^n ⊂ R^{n+1}` and the
//! Heisenberg group.
//!
//! The scalar-level pieces (special functions, point maps, spectral
//! multipliers) are generic over [`Real`]; field-level machinery
//! (quadrature grids, harmonic expansions, extension operators) works in
//! `f64`.

pub mod geometry;
pub mod inequalities;
pub mod operators;
pub mod optimizer;
pub mod report;
pub mod spectral;
pub mod special;
pub mod traceops;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar accepted by the generic parts of the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("integer representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Complex64 = num_complex::Complex<f64>;

pub type CrPoint64 = geometry::CrPoint<f64>;
pub type CrPoint32 = geometry::CrPoint<f32>;
pub type RoundPoint64 = geometry::RoundPoint<f64>;
pub type RoundPoint32 = geometry::RoundPoint<f32>;
pub type HeisenbergPoint64 = geometry::HeisenbergPoint<f64>;
pub type HeisenbergPoint32 = geometry::HeisenbergPoint<f32>;
pub type Multiplier64 = operators::SpectralMultiplier<f64>;
pub type Multiplier32 = operators::SpectralMultiplier<f32>;
