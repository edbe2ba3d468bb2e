//! Biorthogonal eigenbases of traceless, zero-diagonal 2×2 blocks and the
//! probability rules built on associated states.
//!
//! For `H = [[0, a], [b, 0]]` with `ε = sqrt(ab)` (principal branch) the
//! canonical gauge is
//!
//! ```text
//! u± = (±ε/b, 1)/√2               H  u± = ±ε  u±
//! w± = (±conj(b/ε), 1)/√2         H† w± = ±ε* w±
//! ```
//!
//! `ε/b` is a square root of `a/b` and `conj(b/ε)` one of `conj(b)/conj(a)`,
//! so this is the symmetric `(±√(a/b), 1)/√2` form with the branch of the
//! root tied to the band label. With this choice `⟨w_m|u_n⟩ = δ_mn` holds
//! exactly and the left vectors never require a matrix inversion.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::complexla::{traceless_exp_with, ComplexScalar, Mat2, Tolerances, Vec2, ONE};
use crate::error::{DqptError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthoBasis {
    pub e_plus: ComplexScalar,
    pub e_minus: ComplexScalar,
    pub u_plus: Vec2,
    pub u_minus: Vec2,
    pub w_plus: Vec2,
    pub w_minus: Vec2,
}

/// Expansion coefficients `c_n = ⟨w_n|ψ⟩` of a state in a biorthogonal basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub c_plus: ComplexScalar,
    pub c_minus: ComplexScalar,
}

impl Decomposition {
    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    pub fn reconstruct(&self, basis: &BiorthoBasis) -> Vec2 {
        basis.u_plus.scale(self.c_plus) + basis.u_minus.scale(self.c_minus)
    }
}

impl BiorthoBasis {
    /// Basis built from a prescribed `ε` (either root of `ab`), used where a
    /// band label has to be continued across a branch cut.
    pub fn with_energy(h: &Mat2, eps: ComplexScalar) -> Self {
        let b = h.0[1][0];
        let s = ComplexScalar::new(FRAC_1_SQRT_2, 0.0);
        let r = eps / b;
        let l = (b / eps).conj();
        BiorthoBasis {
            e_plus: eps,
            e_minus: -eps,
            u_plus: Vec2::new(r * s, s),
            u_minus: Vec2::new(-r * s, s),
            w_plus: Vec2::new(l * s, s),
            w_minus: Vec2::new(-l * s, s),
        }
    }

    /// The basis with the band labels exchanged (`ε → -ε`).
    pub fn swapped(&self) -> Self {
        BiorthoBasis {
            e_plus: self.e_minus,
            e_minus: self.e_plus,
            u_plus: self.u_minus,
            u_minus: self.u_plus,
            w_plus: self.w_minus,
            w_minus: self.w_plus,
        }
    }

    /// Largest deviation of `⟨w_m|u_n⟩` from `δ_mn`.
    pub fn biorthonormality_residual(&self) -> f64 {
        let one = ONE;
        [
            (self.w_plus.dot(&self.u_plus) - one).norm(),
            (self.w_minus.dot(&self.u_minus) - one).norm(),
            self.w_plus.dot(&self.u_minus).norm(),
            self.w_minus.dot(&self.u_plus).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `‖Σ_n |u_n⟩⟨w_n| - I‖` (entrywise max).
    pub fn completeness_residual(&self) -> f64 {
        let outer = |u: &Vec2, w: &Vec2| {
            Mat2::new(
                u.0[0] * w.0[0].conj(),
                u.0[0] * w.0[1].conj(),
                u.0[1] * w.0[0].conj(),
                u.0[1] * w.0[1].conj(),
            )
        };
        let sum = outer(&self.u_plus, &self.w_plus) + outer(&self.u_minus, &self.w_minus);
        sum.max_abs_diff(&Mat2::identity())
    }

    /// Largest eigen-equation residual for `H` and `H†`.
    pub fn eigen_residual(&self, h: &Mat2) -> f64 {
        let hd = h.dagger();
        let r = |m: &Mat2, v: &Vec2, e: ComplexScalar| (*m * *v - v.scale(e)).norm_sqr().sqrt();
        r(h, &self.u_plus, self.e_plus)
            .max(r(h, &self.u_minus, self.e_minus))
            .max(r(&hd, &self.w_plus, self.e_plus.conj()))
            .max(r(&hd, &self.w_minus, self.e_minus.conj()))
    }
}

pub fn eig_biortho(h: &Mat2) -> Result<BiorthoBasis> {
    eig_biortho_with(h, &Tolerances::default())
}

pub fn eig_biortho_with(h: &Mat2, tol: &Tolerances) -> Result<BiorthoBasis> {
    let scale = h.norm();
    let diag = h.0[0][0].norm().max(h.0[1][1].norm());
    if diag > tol.trace * scale.max(1.0) {
        return Err(DqptError::UnsupportedForm(format!(
            "diagonal entries must vanish (d_z = 0), found |h_ii| = {diag:.3e}"
        )));
    }
    let (a, b) = (h.0[0][1], h.0[1][0]);
    let eps = crate::complexla::principal_sqrt(a * b);
    if a.norm() == 0.0 || b.norm() == 0.0 || eps.norm() < tol.exceptional * scale {
        return Err(DqptError::ExceptionalPoint {
            eps: eps.norm(),
            k: None,
        });
    }
    Ok(BiorthoBasis::with_energy(h, eps))
}

pub fn decompose(psi: &Vec2, basis: &BiorthoBasis) -> Decomposition {
    Decomposition {
        c_plus: basis.w_plus.dot(psi),
        c_minus: basis.w_minus.dot(psi),
    }
}

/// `|ψ̃⟩ = Σ_n c_n |w_n⟩` for `|ψ⟩ = Σ_n c_n |u_n⟩`.
pub fn associated_state(psi: &Vec2, basis: &BiorthoBasis) -> Vec2 {
    let c = decompose(psi, basis);
    basis.w_plus.scale(c.c_plus) + basis.w_minus.scale(c.c_minus)
}

/// `⟨φ, ψ⟩ = ⟨φ̃|ψ⟩ = Σ_n d_n* c_n`.
pub fn biortho_inner(psi: &Vec2, phi: &Vec2, basis: &BiorthoBasis) -> ComplexScalar {
    let c = decompose(psi, basis);
    let d = decompose(phi, basis);
    d.c_plus.conj() * c.c_plus + d.c_minus.conj() * c.c_minus
}

/// Drop the imaginary part of a quantity that must be real, after checking
/// it against `tolerance · max(1, |z|)`.
pub(crate) fn real_part_checked(z: ComplexScalar, what: &'static str, tolerance: f64) -> Result<f64> {
    let bound = tolerance * z.re.abs().max(1.0);
    if z.im.abs() > bound || !z.is_finite() {
        return Err(DqptError::ComplexResidue {
            what,
            residue: z.im.abs(),
            tolerance,
            k: None,
        });
    }
    Ok(z.re)
}

const ZERO_NORM: f64 = 1e-14;

/// Biorthogonal transition probability
/// `p = ⟨ψ̃|φ⟩⟨φ̃|ψ⟩ / (⟨ψ̃|ψ⟩⟨φ̃|φ⟩)`, evaluated from the associated states.
pub fn transition_probability(psi: &Vec2, phi: &Vec2, basis: &BiorthoBasis) -> Result<f64> {
    let tol = Tolerances::default();
    let psi_t = associated_state(psi, basis);
    let phi_t = associated_state(phi, basis);
    let nn_psi = real_part_checked(psi_t.dot(psi), "<psi~|psi>", tol.real_residue)?;
    let nn_phi = real_part_checked(phi_t.dot(phi), "<phi~|phi>", tol.real_residue)?;
    for n in [nn_psi, nn_phi] {
        if n < ZERO_NORM {
            return Err(DqptError::ZeroNorm { norm: n });
        }
    }
    let num = psi_t.dot(phi) * phi_t.dot(psi);
    let p = real_part_checked(num / (nn_psi * nn_phi), "transition probability", tol.real_residue)?;
    Ok(p.clamp(0.0, 1.0))
}

/// `p_n = |c_n|² / Σ_m |c_m|²`, returned as `(p_plus, p_minus)`.
pub fn projection_probabilities(psi: &Vec2, basis: &BiorthoBasis) -> Result<(f64, f64)> {
    let c = decompose(psi, basis);
    let total = c.norm_sqr();
    if total < ZERO_NORM {
        return Err(DqptError::ZeroNorm { norm: total });
    }
    Ok((c.c_plus.norm_sqr() / total, c.c_minus.norm_sqr() / total))
}

/// States and probability obtained when the left state is (incorrectly)
/// propagated with `exp(-iH†t)` instead of being rebuilt as an associated
/// state. Kept as a diagnostic; the result is generally not a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveEvolution {
    pub right: Vec2,
    pub left: Vec2,
    pub probability: ComplexScalar,
}

pub fn naive_left_evolution(hf: &Mat2, basis_i: &BiorthoBasis, phi: &Vec2, t: f64) -> Result<NaiveEvolution> {
    let tol = Tolerances::default();
    let right = traceless_exp_with(hf, t, &tol)? * basis_i.u_plus;
    let left = traceless_exp_with(&hf.dagger(), t, &tol)? * basis_i.w_plus;
    let phi_t = associated_state(phi, basis_i);
    let num = left.dot(phi) * phi_t.dot(&right);
    let den = left.dot(&right) * phi_t.dot(phi);
    if den.norm() < ZERO_NORM {
        return Err(DqptError::ZeroNorm { norm: den.norm() });
    }
    Ok(NaiveEvolution {
        right,
        left,
        probability: num / den,
    })
}

pub fn naive_left_evolution_diagnostic(hf: &Mat2, basis_i: &BiorthoBasis, phi: &Vec2, t: f64) -> Result<ComplexScalar> {
    naive_left_evolution(hf, basis_i, phi, t).map(|n| n.probability)
}
