//! Single-momentum quench dynamics.
//!
//! The prequench lower-band state `|u_-^i⟩` is evolved with `exp(-iH^f t)`
//! and measured in the prequench biorthogonal basis. Everything here acts on
//! one [`ModeQuench`]; Brillouin-zone sums live in [`crate::engine`].

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::RangeInclusive;

use crate::biortho::{associated_state, decompose, eig_biortho, real_part_checked, BiorthoBasis};
use crate::complexla::{cos_sinc, traceless_exp, ComplexScalar, Mat2, Tolerances, Vec2, I, ONE};
use crate::error::{DqptError, Result};

/// Singularity margin for `atanh(m)` at `m = ±1`.
pub const ATANH_MARGIN: f64 = 1e-12;

/// Allowed imaginary residue of the dynamical phase.
pub const QUADRATURE_RESIDUE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuench {
    pub h_i: Mat2,
    pub h_f: Mat2,
    pub basis_i: BiorthoBasis,
    pub basis_f: BiorthoBasis,
    pub eps_f: ComplexScalar,
}

/// `m = ⟨ũ_-^i| H^f/ε^f |u_-^i⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapKernel {
    pub m: ComplexScalar,
}

impl ModeQuench {
    pub fn new(h_i: Mat2, h_f: Mat2) -> Result<Self> {
        let basis_i = eig_biortho(&h_i)?;
        Self::with_prequench_basis(h_i, h_f, basis_i)
    }

    /// Quench from a caller-supplied prequench basis (a different gauge or a
    /// one-sided band label at a branch cut).
    pub fn with_prequench_basis(h_i: Mat2, h_f: Mat2, basis_i: BiorthoBasis) -> Result<Self> {
        let basis_f = eig_biortho(&h_f)?;
        Ok(ModeQuench {
            h_i,
            h_f,
            basis_i,
            basis_f,
            eps_f: basis_f.e_plus,
        })
    }

    pub fn kernel(&self) -> OverlapKernel {
        let hu = self.h_f * self.basis_i.u_minus;
        OverlapKernel {
            m: self.basis_i.w_minus.dot(&hu) / self.eps_f,
        }
    }

    pub fn trajectory(&self) -> ModeTrajectory {
        ModeTrajectory::new(self)
    }
}

pub fn evolve_lower(mq: &ModeQuench, t: f64) -> Result<Vec2> {
    Ok(traceless_exp(&mq.h_f, t)? * mq.basis_i.u_minus)
}

/// `⟨ũ_-^i|u_-^i(t)⟩ = cos(ε^f t) - i sin(ε^f t)·m`.
pub fn amplitude(mq: &ModeQuench, t: f64) -> ComplexScalar {
    let m = mq.kernel().m;
    (mq.eps_f * t).cos() - I * (mq.eps_f * t).sin() * m
}

/// Echo factor `g_k(t) = |⟨ũ_-|u_-(t)⟩|² / ⟨ũ_-(t)|u_-(t)⟩`, with the
/// associated state of `u_-(t)` taken in the prequench basis.
pub fn g_k(mq: &ModeQuench, t: f64) -> Result<f64> {
    let u_t = evolve_lower(mq, t)?;
    let den = associated_state(&u_t, &mq.basis_i).dot(&u_t);
    let den = real_part_checked(den, "<u~(t)|u(t)>", Tolerances::default().real_residue)?;
    if den <= 0.0 {
        return Err(DqptError::ZeroNorm { norm: den });
    }
    Ok(amplitude(mq, t).norm_sqr() / den)
}

/// The same echo factor written as `⟨ũ|u(t)⟩⟨ũ(t)|u⟩ / ⟨ũ(t)|u(t)⟩`.
pub fn g_k_sandwich(mq: &ModeQuench, t: f64) -> Result<f64> {
    let u0 = mq.basis_i.u_minus;
    let u_t = evolve_lower(mq, t)?;
    let u_t_assoc = associated_state(&u_t, &mq.basis_i);
    let tol = Tolerances::default().real_residue;
    let den = real_part_checked(u_t_assoc.dot(&u_t), "<u~(t)|u(t)>", tol)?;
    let num = mq.basis_i.w_minus.dot(&u_t) * u_t_assoc.dot(&u0);
    real_part_checked(num / den, "echo factor", tol)
}

/// Complex critical times `t_n = π(2n+1)/(2ε^f) - (i/ε^f)·atanh(m)` on the
/// principal branch of `atanh`; the other branches are the other `n`.
pub fn critical_times(mq: &ModeQuench, n_range: RangeInclusive<i32>) -> Result<Vec<ComplexScalar>> {
    let eps = mq.eps_f;
    if eps.norm() < Tolerances::default().exceptional * mq.h_f.norm() {
        return Err(DqptError::ExceptionalPoint {
            eps: eps.norm(),
            k: None,
        });
    }
    let m = mq.kernel().m;
    if (m - ONE).norm() < ATANH_MARGIN || (m + ONE).norm() < ATANH_MARGIN {
        return Err(DqptError::AtanhSingular { m_re: m.re, m_im: m.im });
    }
    let shift = -I * m.atanh() / eps;
    Ok(n_range
        .map(|n| ComplexScalar::new(FRAC_PI_2 * f64::from(2 * n + 1), 0.0) / eps + shift)
        .collect())
}

/// Probability `|c_+|² / (|c_+|² + |c_-|²)` of finding the evolved state in
/// the upper prequench band.
pub fn two_level_probability(mq: &ModeQuench, t: f64) -> Result<f64> {
    let c = decompose(&evolve_lower(mq, t)?, &mq.basis_i);
    let total = c.norm_sqr();
    if total <= 0.0 {
        return Err(DqptError::ZeroNorm { norm: total });
    }
    Ok(c.c_plus.norm_sqr() / total)
}

/// Biorthogonal dynamical phase
/// `-∫₀ᵗ ⟨ũ(s)|H^f|u(s)⟩/⟨ũ(s)|u(s)⟩ ds + (i/2)·ln⟨ũ(t)|u(t)⟩`
/// with composite Simpson on `quad_steps` panels.
pub fn dynamical_phase(mq: &ModeQuench, t: f64, quad_steps: usize) -> Result<f64> {
    check_quadrature_args(t, quad_steps)?;
    let traj = mq.trajectory();
    let integral = simpson(|s| traj.point(s).energy(), 0.0, t, quad_steps);
    let log_norm = traj.point(t).norm_sqr().ln();
    let residue = (-integral.im + 0.5 * log_norm).abs();
    if residue > QUADRATURE_RESIDUE || !residue.is_finite() {
        return Err(DqptError::QuadratureResidue {
            residue,
            steps: quad_steps,
        });
    }
    Ok(-integral.re)
}

/// Geometric phase `arg⟨ũ_-|u_-(t)⟩ - φ_dyn(t)`, with the argument followed
/// continuously from zero over the quadrature nodes.
pub fn geometric_phase(mq: &ModeQuench, t: f64, quad_steps: usize) -> Result<f64> {
    check_quadrature_args(t, quad_steps)?;
    let traj = mq.trajectory();
    let mut total = 0.0;
    let mut prev = traj.point(0.0).amplitude().arg();
    let nodes = 2 * quad_steps;
    for j in 1..=nodes {
        let s = t * j as f64 / nodes as f64;
        let arg = traj.point(s).amplitude().arg();
        let step = wrap_phase(arg - prev);
        if step.abs() > FRAC_PI_2 {
            return Err(DqptError::PhaseStepTooLarge { step, t: s });
        }
        total += step;
        prev = arg;
    }
    Ok(total - dynamical_phase(mq, t, quad_steps)?)
}

fn check_quadrature_args(t: f64, quad_steps: usize) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(DqptError::Invalid(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    if quad_steps < 2 {
        return Err(DqptError::Invalid(format!(
            "quad_steps must be at least 2, got {quad_steps}"
        )));
    }
    Ok(())
}

/// Map an angle into `[-π, π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        y - 2.0 * PI
    } else {
        y
    }
}

pub(crate) fn simpson<F>(f: F, a: f64, b: f64, panels: usize) -> ComplexScalar
where
    F: Fn(f64) -> ComplexScalar,
{
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for j in 1..panels {
        acc += f(a + h * j as f64) * 2.0;
    }
    for j in 0..panels {
        acc += f(a + h * (j as f64 + 0.5)) * 4.0;
    }
    acc * (h / 6.0)
}

/// Closed-form trajectory of one mode.
///
/// With `α_n = ⟨ũ_n|u_0⟩` and `β_n = ⟨ũ_n|H^f u_0⟩`, the coefficients of the
/// evolved state and of `H^f` applied to it are
/// `c_n(s) = cos(εs)α_n - i·sin(εs)/ε·β_n` and
/// `d_n(s) = cos(εs)β_n - i·ε·sin(εs)·α_n`, because `(H^f)² = ε²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTrajectory {
    eps: ComplexScalar,
    alpha: [ComplexScalar; 2],
    beta: [ComplexScalar; 2],
    u0: Vec2,
    hu0: Vec2,
}

/// State of a trajectory at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// `[c_+, c_-]`.
    pub c: [ComplexScalar; 2],
    /// Coefficients of `H^f u(s)`.
    pub d: [ComplexScalar; 2],
    pub state: Vec2,
}

impl TrajectoryPoint {
    pub fn amplitude(&self) -> ComplexScalar {
        self.c[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c[0].norm_sqr() + self.c[1].norm_sqr()
    }

    pub fn energy(&self) -> ComplexScalar {
        (self.c[0].conj() * self.d[0] + self.c[1].conj() * self.d[1]) / self.norm_sqr()
    }

    pub fn echo(&self) -> f64 {
        self.c[1].norm_sqr() / self.norm_sqr()
    }
}

impl ModeTrajectory {
    pub fn new(mq: &ModeQuench) -> Self {
        let b = &mq.basis_i;
        let u0 = b.u_minus;
        let hu0 = mq.h_f * u0;
        ModeTrajectory {
            eps: mq.eps_f,
            alpha: [b.w_plus.dot(&u0), b.w_minus.dot(&u0)],
            beta: [b.w_plus.dot(&hu0), b.w_minus.dot(&hu0)],
            u0,
            hu0,
        }
    }

    pub fn point(&self, s: f64) -> TrajectoryPoint {
        let (cos, sinc) = cos_sinc(self.eps * s);
        let s_over = -I * sinc * s;
        let s_times = s_over * self.eps * self.eps;
        let c = [
            cos * self.alpha[0] + s_over * self.beta[0],
            cos * self.alpha[1] + s_over * self.beta[1],
        ];
        let d = [
            cos * self.beta[0] + s_times * self.alpha[0],
            cos * self.beta[1] + s_times * self.alpha[1],
        ];
        TrajectoryPoint {
            c,
            d,
            state: self.u0.scale(cos) + self.hu0.scale(s_over),
        }
    }

    /// Conventional normalised echo `|⟨u_0|u(s)⟩|² / (⟨u_0|u_0⟩⟨u(s)|u(s)⟩)`.
    pub fn self_normal_echo(&self, point: &TrajectoryPoint) -> f64 {
        let overlap = self.u0.dot(&point.state);
        overlap.norm_sqr() / (self.u0.norm_sqr() * point.state.norm_sqr())
    }

    /// Sample the trajectory on an increasing time grid starting at zero.
    ///
    /// The dynamical phase is integrated between consecutive samples with
    /// `max(2, ceil(panels_per_unit·Δt))` Simpson panels.
    pub fn sample(&self, times: &[f64], panels_per_unit: usize, channels: Channels) -> ModeSamples {
        let n = times.len();
        let cap = |on: bool| Vec::with_capacity(if on { n } else { 0 });
        let mut out = ModeSamples {
            echo: cap(channels.echo),
            self_normal: cap(channels.self_normal),
            geometric_phase: cap(channels.geometric_phase),
            probability: cap(channels.probability),
            max_dynamical_step: 0.0,
            max_step_time: 0.0,
        };
        let mut phi_dyn = 0.0;
        let mut prev_t = 0.0;
        for &t in times {
            let dt = t - prev_t;
            if dt > 0.0 && channels.geometric_phase {
                let panels = ((panels_per_unit as f64 * dt).ceil() as usize).max(2);
                let step = -simpson(|s| self.point(s).energy(), prev_t, t, panels).re;
                if step.abs() > out.max_dynamical_step {
                    out.max_dynamical_step = step.abs();
                    out.max_step_time = t;
                }
                phi_dyn += step;
            }
            prev_t = t;
            let p = self.point(t);
            let norm = p.norm_sqr();
            if channels.echo {
                out.echo.push(p.c[1].norm_sqr() / norm);
            }
            if channels.self_normal {
                out.self_normal.push(self.self_normal_echo(&p));
            }
            if channels.geometric_phase {
                out.geometric_phase.push(wrap_phase(p.amplitude().arg() - phi_dyn));
            }
            if channels.probability {
                out.probability.push(p.c[0].norm_sqr() / norm);
            }
        }
        out
    }
}

/// Which series [`ModeTrajectory::sample`] records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channels {
    pub echo: bool,
    pub self_normal: bool,
    pub geometric_phase: bool,
    pub probability: bool,
}

impl Channels {
    pub const ALL: Channels = Channels {
        echo: true,
        self_normal: true,
        geometric_phase: true,
        probability: true,
    };
    pub const NONE: Channels = Channels {
        echo: false,
        self_normal: false,
        geometric_phase: false,
        probability: false,
    };
}

/// Time series of one mode on a grid. Channels that were not requested are
/// left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSamples {
    pub echo: Vec<f64>,
    pub self_normal: Vec<f64>,
    /// Geometric phase wrapped into `[-π, π)`.
    pub geometric_phase: Vec<f64>,
    pub probability: Vec<f64>,
    /// Largest dynamical-phase increment between consecutive samples and the
    /// sample time at which it ends.
    pub max_dynamical_step: f64,
    pub max_step_time: f64,
}
