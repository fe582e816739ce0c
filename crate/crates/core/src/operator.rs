//! The two half-line operators of the linearization, in conjugated form.
//!
//! For degree `n` both are `H = -∂² + (n²-1/4)/r² - V(r)` on `L²(dr)`, with
//! `H₁ = … - (1 - 3U²)` and `H₂ = … - (1 - U²)`. Writing `H₁ = 2 + (-∂² + q₁)`
//! and `H₂ = -∂² + q₂` puts both in the reduced form `-y'' + q y = k² y` with
//! `q = (n²-1/4)/r² - c·(1-U²)`, `c ∈ {3, 1}`, and spectral parameter
//! `E = σ + k²` where `σ ∈ {2, 0}` is the threshold.

use crate::error::{Error, Result};
use crate::vortex::VortexProfile;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Real-part (Klein–Gordon type) operator, threshold 2.
    H1,
    /// Imaginary-part (wave type) operator, threshold 0.
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operator {
    pub kind: OperatorKind,
    pub degree: u32,
}

impl Operator {
    pub fn h1() -> Self {
        Self { kind: OperatorKind::H1, degree: 1 }
    }

    pub fn h2() -> Self {
        Self { kind: OperatorKind::H2, degree: 1 }
    }

    pub fn new(kind: OperatorKind, degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("vortex degree must be >= 1".into()));
        }
        Ok(Self { kind, degree })
    }

    pub fn n(&self) -> f64 {
        self.degree as f64
    }

    /// Coefficient `c` of `(1-U²)` in the reduced potential.
    pub fn coupling(&self) -> f64 {
        match self.kind {
            OperatorKind::H1 => 3.0,
            OperatorKind::H2 => 1.0,
        }
    }

    /// Bottom `σ` of the continuous spectrum.
    pub fn threshold(&self) -> f64 {
        match self.kind {
            OperatorKind::H1 => 2.0,
            OperatorKind::H2 => 0.0,
        }
    }

    /// `n² - 1/4`.
    pub fn centrifugal(&self) -> f64 {
        let n = self.n();
        n * n - 0.25
    }

    /// Reduced potential `q(r)`.
    pub fn potential(&self, p: &VortexProfile, r: f64) -> f64 {
        self.centrifugal() / (r * r) - self.coupling() * p.one_minus_u2(r)
    }

    /// Coefficients `(q₂, q₄, q₆)` of the large-`r` expansion `q ≈ Σ q_m r^{-m}`.
    pub fn far_coefficients(&self, p: &VortexProfile) -> [f64; 3] {
        let [o2, o4, o6] = p.one_minus_u2_coefficients();
        let c = self.coupling();
        [self.centrifugal() - c * o2, -c * o4, -c * o6]
    }

    /// Log-frequency `ν = n√2` of the threshold oscillation (H₁ only).
    pub fn log_frequency(&self) -> f64 {
        self.n() * std::f64::consts::SQRT_2
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            OperatorKind::H1 => "H1",
            OperatorKind::H2 => "H2",
        };
        if self.degree == 1 {
            write!(f, "{k}")
        } else {
            write!(f, "{k}n({})", self.degree)
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H1" | "L1" => Ok(Self::H1),
            "H2" | "L2" => Ok(Self::H2),
            other => Err(Error::InvalidInput(format!("unknown operator '{other}' (expected H1 or H2)"))),
        }
    }
}
