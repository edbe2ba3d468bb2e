//! Non-Hermitian Su–Schrieffer–Heeger chain in momentum space.
//!
//! `H_k = x_k σ_x + y_k σ_y` with
//! `x_k = (1+η) + (1-η)cos k` and `y_k = (1-η)sin k - iγ/2`.
//! The spectrum closes at `k = 0` when `γ = ±4` and at `k = π` when
//! `γ = ±4η`; these lines split the `γ > 0` half plane into six regions.

use std::f64::consts::PI;
use std::fmt;

use crate::complexla::{principal_sqrt, ComplexScalar, Mat2, I};
use crate::dynamics::wrap_phase;
use crate::error::{DqptError, Result};

/// Distance from a phase boundary below which points are refused.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SshParams {
    pub eta: f64,
    pub gamma: f64,
}

impl SshParams {
    pub const fn new(eta: f64, gamma: f64) -> Self {
        SshParams { eta, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta.is_finite() && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(DqptError::Invalid(format!(
                "model parameters must be finite, got (eta, gamma) = ({}, {})",
                self.eta, self.gamma
            )))
        }
    }
}

impl fmt::Display for SshParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.eta, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Region {
    pub const ALL: [Region; 6] = [Region::I, Region::II, Region::III, Region::IV, Region::V, Region::VI];

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A winding number stored in units of 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Winding {
    pub halves: i32,
}

impl Winding {
    pub fn value(&self) -> f64 {
        f64::from(self.halves) / 2.0
    }
}

impl fmt::Display for Winding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.halves % 2 == 0 {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}/2", self.halves)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseLabel {
    pub region: Region,
    /// The point has `γ < 0` and carries the label of its mirror image.
    pub mirrored: bool,
    pub winding: Winding,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mirrored {
            write!(f, "{}'", self.region)
        } else {
            write!(f, "{}", self.region)
        }
    }
}

/// `(x_k, y_k)`; `x_k` is real and returned with zero imaginary part.
pub fn d_vector(p: &SshParams, k: f64) -> (ComplexScalar, ComplexScalar) {
    let x = (1.0 + p.eta) + (1.0 - p.eta) * k.cos();
    let y = ComplexScalar::new((1.0 - p.eta) * k.sin(), -p.gamma / 2.0);
    (ComplexScalar::new(x, 0.0), y)
}

/// `x σ_x + y σ_y`, i.e. upper entry `x - iy`, lower entry `x + iy`.
pub fn block_hamiltonian(p: &SshParams, k: f64) -> Mat2 {
    let (x, y) = d_vector(p, k);
    Mat2::off_diagonal(x - I * y, x + I * y)
}

/// `ε_k² = x_k² + y_k²`.
pub fn dispersion_squared(p: &SshParams, k: f64) -> ComplexScalar {
    let (x, y) = d_vector(p, k);
    x * x + y * y
}

pub fn dispersion(p: &SshParams, k: f64) -> ComplexScalar {
    principal_sqrt(dispersion_squared(p, k))
}

/// Winding number `(w_+ - w_-)/2`, where `w_±` count the turns of the loops
/// `x_k ± i y_k` around the origin (`arctan(y/x) = (1/2i)·ln((x+iy)/(x-iy))`).
pub fn winding_number(p: &SshParams, k_samples: usize) -> Result<Winding> {
    p.validate()?;
    if k_samples < 256 {
        return Err(DqptError::Invalid(format!(
            "winding needs at least 256 k samples, got {k_samples}"
        )));
    }
    let plus = loop_winding(p, k_samples, 1.0)?;
    let minus = loop_winding(p, k_samples, -1.0)?;
    Ok(Winding { halves: plus - minus })
}

fn loop_winding(p: &SshParams, k_samples: usize, sign: f64) -> Result<i32> {
    let point = |j: usize| {
        let k = 2.0 * PI * j as f64 / k_samples as f64;
        let (x, y) = d_vector(p, k);
        x + I * y * sign
    };
    let mut total = 0.0;
    let mut prev = point(0);
    for j in 1..=k_samples {
        let z = point(j % k_samples);
        if z.norm() < BOUNDARY_MARGIN {
            return Err(DqptError::OnBoundary {
                eta: p.eta,
                gamma: p.gamma,
                detail: format!(
                    "loop x {} iy passes through the origin",
                    if sign > 0.0 { "+" } else { "-" }
                ),
            });
        }
        total += wrap_phase(z.arg() - prev.arg());
        prev = z;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.01 {
        return Err(DqptError::Invalid(format!(
            "winding of {p} did not converge with {k_samples} samples (residue {:.3e})",
            (turns - rounded).abs()
        )));
    }
    Ok(rounded as i32)
}

/// Distances of a point from the two families of boundary lines
/// `|γ| = 4` and `|γ| = 4|η|`.
fn boundary_distances(p: &SshParams) -> (f64, f64) {
    let g = p.gamma.abs();
    ((g - 4.0).abs(), (g - 4.0 * p.eta.abs()).abs())
}

pub fn check_off_boundary(p: &SshParams) -> Result<()> {
    p.validate()?;
    let (outer, inner) = boundary_distances(p);
    if outer <= BOUNDARY_MARGIN {
        return Err(DqptError::OnBoundary {
            eta: p.eta,
            gamma: p.gamma,
            detail: "spectrum closes at k = 0 (|gamma| = 4)".into(),
        });
    }
    if inner <= BOUNDARY_MARGIN {
        return Err(DqptError::OnBoundary {
            eta: p.eta,
            gamma: p.gamma,
            detail: "spectrum closes at k = pi (|gamma| = 4|eta|)".into(),
        });
    }
    Ok(())
}

fn region_of(eta: f64, gamma: f64) -> Region {
    let upper = gamma > 4.0;
    let middle = gamma > 4.0 * eta.abs();
    match (upper, middle, eta < 0.0) {
        (true, true, _) => Region::II,
        (true, false, true) => Region::I,
        (true, false, false) => Region::III,
        (false, true, _) => Region::V,
        (false, false, true) => Region::IV,
        (false, false, false) => Region::VI,
    }
}

/// Region label and winding number. Points with `γ < 0` take the label of
/// `(η, -γ)` and are marked as mirrored.
pub fn classify_phase(p: &SshParams) -> Result<PhaseLabel> {
    check_off_boundary(p)?;
    let region = region_of(p.eta, p.gamma.abs());
    let winding = winding_number(p, 4096)?;
    Ok(PhaseLabel {
        region,
        mirrored: p.gamma < 0.0,
        winding,
    })
}

/// Locate a zero of `ε_k` in `γ` at fixed `η` and `k ∈ {0, π}` by bisection
/// on the real function `ε_k²` inside `[lo, hi]`.
pub fn boundary_gamma(eta: f64, k: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |g: f64| dispersion_squared(&SshParams::new(eta, g), k).re;
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa.signum() == fb.signum() {
        return Err(DqptError::Invalid(format!(
            "no sign change of eps^2 on gamma in [{lo}, {hi}] at k = {k}"
        )));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if f(mid).signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
