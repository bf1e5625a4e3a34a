//! Special functions: log-gamma and relatives, classical orthogonal
//! polynomials, Gauss rules and a few one-dimensional integrators.

mod gamma;
pub mod integrate;
mod poly;
pub mod quad;

pub use gamma::{
    binomial_shifted, digamma, gamma, gamma_ratio, ln_gamma, ln_gamma_ratio, pochhammer,
    recip_gamma,
};
pub use poly::{
    chebyshev_all, gegenbauer_all, gegenbauer_poly, jacobi_all, jacobi_derivative, jacobi_poly,
    zonal_legendre_all,
};

/// Arguments of a Γ(a)/Γ(b) evaluation; both must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRatioArgs<T> {
    pub numerator_arg: T,
    pub denominator_arg: T,
}

impl<T: crate::Real> GammaRatioArgs<T> {
    pub fn new(numerator_arg: T, denominator_arg: T) -> Result<Self, SpecialError> {
        for (what, v) in [("numerator", numerator_arg), ("denominator", denominator_arg)] {
            if !(v > T::zero()) {
                return Err(SpecialError::Domain {
                    what,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            numerator_arg,
            denominator_arg,
        })
    }

    pub fn eval(&self) -> T {
        gamma_ratio(self.numerator_arg, self.denominator_arg).expect("validated arguments")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecialError {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },
}
