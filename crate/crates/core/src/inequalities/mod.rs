//! Sharp constants, extremal families and numerical checks of the Sobolev,
//! HLS, trace and Beckner–Onofri type inequalities.
//!
//! Every functional is oriented as `lhs ≥ rhs`; a report carries
//! `deficit = lhs − rhs` together with a two-resolution error estimate.

mod constants;
mod extremals;
mod fields;
mod functionals;
mod hls;

pub use constants::{
    a_ns, bez, einav_loss, hls, onofri_cr, onofri_round, sobolev_cr, sobolev_heis, sobolev_round,
    trace_cr, OnofriCoefficients, TraceVariant,
};
pub use extremals::{
    extremal_block, extremal_direct, extremal_field, profile_cr, profile_round, ExtremalParams, SamplePoints,
};
pub use fields::{random_cr_field, random_round_field, RandomFieldOptions, TestField};
pub use functionals::{evaluate, thm17_consistent_reading, Reading, ReadingKind};
pub use hls::{hls_constant_check, hls_eigenvalue, hls_pairing, hls_pairing_direct, HlsConstantCheck};

use serde::{Deserialize, Serialize};

use crate::geometry::GeometryError;
use crate::operators::OperatorError;
use crate::spectral::SpectralError;
use crate::special::SpecialError;
use crate::traceops::TraceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InequalityError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("field does not match the case: {0}")]
    Field(String),
    #[error("not evaluable on fields: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Inequalities covered by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Flat trace `R^n → R^{n−m}` (constant only).
    Thm11,
    /// Restriction to the unit sphere in `R^n` (constant only).
    Thm12,
    /// Heisenberg trace onto `H^{n−m}`.
    Thm13,
    /// CR sphere trace onto `S^{2(n−m)+1}`.
    Thm14,
    /// Heisenberg trace onto the sub-sphere sitting in `H^n`.
    Thm15,
    /// CR trace Beckner–Onofri inequality at `s = Q`.
    Thm17,
    /// Round sphere trace Beckner–Onofri inequality at `s = n`.
    Thm18,
    /// HLS on `S^{2n+1}`.
    Hls,
    /// Beckner–Onofri type inequality for `A'` on `S^{2n+1}`.
    Bfm,
    /// Beckner–Onofri inequality on `S^d`.
    Beckner,
    /// Sobolev inequality for `A_s` on `S^{2n+1}`.
    SobolevCr,
    /// Sobolev inequality on `H^n`.
    SobolevHeis,
    /// Sobolev inequality for `P_s` on `S^d`.
    SobolevRound,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        Self::Thm11,
        Self::Thm12,
        Self::Thm13,
        Self::Thm14,
        Self::Thm15,
        Self::Thm17,
        Self::Thm18,
        Self::Hls,
        Self::Bfm,
        Self::Beckner,
        Self::SobolevCr,
        Self::SobolevHeis,
        Self::SobolevRound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm11 => "thm11",
            Self::Thm12 => "thm12",
            Self::Thm13 => "thm13",
            Self::Thm14 => "thm14",
            Self::Thm15 => "thm15",
            Self::Thm17 => "thm17",
            Self::Thm18 => "thm18",
            Self::Hls => "hls",
            Self::Bfm => "bfm",
            Self::Beckner => "beckner",
            Self::SobolevCr => "sobolev-cr",
            Self::SobolevHeis => "sobolev-heis",
            Self::SobolevRound => "sobolev-round",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|t| t.name() == s)
    }

    /// Theorems whose functional can be evaluated on fields.
    pub fn evaluable(self) -> bool {
        !matches!(self, Self::Thm11 | Self::Thm12)
    }

    pub fn is_trace(self) -> bool {
        matches!(self, Self::Thm13 | Self::Thm14 | Self::Thm15 | Self::Thm17 | Self::Thm18)
    }

    pub fn is_round(self) -> bool {
        matches!(self, Self::Thm18 | Self::Beckner | Self::SobolevRound)
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretization settings. `grid = 0` picks the default exactness `2L`;
/// the second resolution always adds `max(L, 2)` to the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub grid: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub delta: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            grid: 0,
            l: 8,
            delta: crate::traceops::DEFAULT_DELTA,
        }
    }
}

impl Resolution {
    pub fn with_l(l: usize) -> Self {
        Self { l, ..Self::default() }
    }

    pub(crate) fn degrees(&self, l: usize) -> (usize, usize) {
        let coarse = self.grid.max(2 * l).max(2);
        (coarse, coarse + l.max(2))
    }
}

/// A theorem together with its parameters. `n` is the complex dimension
/// for CR cases and the sphere dimension `d` for round ones; `s` is the
/// half-power for [`TheoremId::Thm11`] and [`TheoremId::Thm12`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremCase {
    pub id: TheoremId,
    pub n: usize,
    pub m: usize,
    pub s: Option<f64>,
    pub lambda: Option<f64>,
    pub resolution: Resolution,
}

impl TheoremCase {
    /// Builds and validates a case. Critical cases fill in `s` themselves.
    pub fn new(id: TheoremId, n: usize, m: usize, s: Option<f64>, lambda: Option<f64>) -> Result<Self, InequalityError> {
        let s = match id {
            TheoremId::Thm17 | TheoremId::Bfm => Some((2 * n + 2) as f64),
            TheoremId::Thm18 | TheoremId::Beckner => Some(n as f64),
            _ => s,
        };
        let case = Self {
            id,
            n,
            m,
            s,
            lambda,
            resolution: Resolution::default(),
        };
        case.constant()?;
        Ok(case)
    }

    pub fn sobolev_cr(n: usize, s: f64) -> Result<Self, InequalityError> {
        Self::new(TheoremId::SobolevCr, n, 0, Some(s), None)
    }

    pub fn trace(id: TheoremId, n: usize, m: usize, s: f64) -> Result<Self, InequalityError> {
        Self::new(id, n, m, Some(s), None)
    }

    pub fn hls(n: usize, lambda: f64) -> Result<Self, InequalityError> {
        Self::new(TheoremId::Hls, n, 0, None, Some(lambda))
    }

    pub fn with_resolution(mut self, resolution: Resolution) -> Self {
        self.resolution = resolution;
        self
    }

    fn need_s(&self) -> Result<f64, InequalityError> {
        self.s.ok_or_else(|| InequalityError::Range(format!("{} needs s", self.id)))
    }

    pub(crate) fn need_lambda(&self) -> Result<f64, InequalityError> {
        self.lambda.ok_or_else(|| InequalityError::Range(format!("{} needs lambda", self.id)))
    }

    /// `Q = 2n + 2` for CR cases.
    pub fn q(&self) -> f64 {
        (2 * self.n + 2) as f64
    }

    /// Dimension of the sub-sphere the trace lands on: complex `n − m` for
    /// CR cases, real `n − m` for round ones.
    pub fn n_sub(&self) -> usize {
        self.n - self.m
    }

    /// Lebesgue exponent on the right-hand side, where there is one.
    pub fn p_exponent(&self) -> Option<f64> {
        let q = self.q();
        match self.id {
            TheoremId::SobolevCr | TheoremId::SobolevHeis => self.s.map(|s| 2.0 * q / (q - s)),
            TheoremId::Thm13 | TheoremId::Thm14 | TheoremId::Thm15 => {
                self.s.map(|s| 2.0 * (q - 2.0 * self.m as f64) / (q - s))
            }
            TheoremId::Hls => self.lambda.map(|l| 2.0 * q / (2.0 * q - l)),
            TheoremId::SobolevRound => self.s.map(|s| 2.0 * self.n as f64 / (self.n as f64 - s)),
            _ => None,
        }
    }

    /// The sharp constant; for Beckner–Onofri type cases the coefficient of
    /// the logarithm.
    pub fn constant(&self) -> Result<f64, InequalityError> {
        let (n, m) = (self.n, self.m);
        match self.id {
            TheoremId::Thm11 => einav_loss(m, self.need_s()?, n),
            TheoremId::Thm12 => bez(n, self.need_s()?),
            TheoremId::Thm13 => trace_cr(n, m, self.need_s()?, TraceVariant::Subgroup),
            TheoremId::Thm14 => trace_cr(n, m, self.need_s()?, TraceVariant::Sphere),
            TheoremId::Thm15 => trace_cr(n, m, self.need_s()?, TraceVariant::SphereInGroup),
            TheoremId::Thm17 => {
                constants::check_nm(n, m)?;
                Ok(onofri_cr::<f64>(n, m)?.trace)
            }
            TheoremId::Thm18 => {
                constants::check_nm(n, m)?;
                Ok(onofri_round::<f64>(n, m)?.trace)
            }
            TheoremId::Hls => hls(n, self.need_lambda()?),
            TheoremId::Bfm => Ok(onofri_cr::<f64>(n, 0)?.trace),
            TheoremId::Beckner => Ok(onofri_round::<f64>(n, 0)?.trace),
            TheoremId::SobolevCr => sobolev_cr(n, self.need_s()?),
            TheoremId::SobolevHeis => sobolev_heis(n, self.need_s()?),
            TheoremId::SobolevRound => sobolev_round(n, self.need_s()?),
        }
    }

    /// Stable identifier used in reports.
    pub fn case_id(&self) -> String {
        let mut id = format!("{}/n{}", self.id, self.n);
        if self.id.is_trace() || self.id == TheoremId::Thm11 {
            id += &format!("/m{}", self.m);
        }
        if let Some(s) = self.s {
            id += &format!("/s{s}");
        }
        if let Some(l) = self.lambda {
            id += &format!("/lambda{l}");
        }
        id
    }
}

/// What a report asserts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `deficit ≥ −(error_estimate + tolerance·|lhs|)`.
    Inequality,
    /// `|deficit| ≤ tolerance·|lhs|`.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub case: TheoremCase,
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub error_estimate: f64,
    pub check: Check,
    pub tolerance: f64,
    pub pass: bool,
    /// Alternative right-hand sides, when the functional admits more than one reading.
    pub readings: Vec<Reading>,
    pub notes: Vec<String>,
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub(crate) fn new(case: TheoremCase, lhs: f64, rhs: f64, error_estimate: f64) -> Self {
        let mut r = Self {
            case,
            lhs,
            rhs,
            deficit: lhs - rhs,
            error_estimate,
            check: Check::Inequality,
            tolerance: 0.0,
            pass: false,
            readings: Vec::new(),
            notes: Vec::new(),
            seed: None,
        };
        r.recheck();
        r
    }

    pub fn relative_deficit(&self) -> f64 {
        self.deficit.abs() / self.lhs.abs().max(f64::MIN_POSITIVE)
    }

    fn recheck(&mut self) {
        self.pass = match self.check {
            Check::Inequality => self.deficit >= -(self.error_estimate + self.tolerance * self.lhs.abs()),
            Check::Equality => self.deficit.abs() <= self.tolerance * self.lhs.abs(),
        };
    }

    /// Turns the report into an equality check at relative tolerance `tol`.
    pub fn expect_equality(mut self, tol: f64) -> Self {
        self.check = Check::Equality;
        self.tolerance = tol;
        self.recheck();
        self
    }

    /// Inequality check with an extra relative slack.
    pub fn expect_inequality(mut self, tol: f64) -> Self {
        self.check = Check::Inequality;
        self.tolerance = tol;
        self.recheck();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
