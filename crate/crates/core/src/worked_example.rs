//! The two-level quench `H^i → H^f` with
//! `H^i = [[0, 4+i], [2-i, 0]]` and `H^f = [[0, -3i], [-2+3i, 0]]`, evolved
//! to `t = 1` from the upper prequench state and measured against
//! `|φ⟩ = 2|u_+⟩ + 3|u_-⟩`.

use crate::biortho::{associated_state, decompose, eig_biortho, naive_left_evolution, transition_probability};
use crate::complexla::{traceless_exp, ComplexScalar, Mat2, Vec2};
use crate::error::Result;

pub fn initial_hamiltonian() -> Mat2 {
    Mat2::off_diagonal(ComplexScalar::new(4.0, 1.0), ComplexScalar::new(2.0, -1.0))
}

pub fn final_hamiltonian() -> Mat2 {
    Mat2::off_diagonal(ComplexScalar::new(0.0, -3.0), ComplexScalar::new(-2.0, 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkedExample {
    pub t: f64,
    /// `exp(-iH^f t)|u_+⟩`.
    pub evolved: Vec2,
    /// Its coefficients `(a, b)` in the prequench basis.
    pub a: ComplexScalar,
    pub b: ComplexScalar,
    pub associated: Vec2,
    pub probability: f64,
    /// Left state propagated with `exp(-iH^f† t)` and the probability it gives.
    pub naive_left: Vec2,
    pub naive_probability: ComplexScalar,
}

/// A computed quantity next to its reference value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    pub name: &'static str,
    pub computed: ComplexScalar,
    pub reference: ComplexScalar,
}

impl Field {
    pub fn error(&self) -> f64 {
        (self.computed - self.reference).norm()
    }
}

const fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

/// Reference values to three decimals, in the order of [`WorkedExample::fields`].
pub const REFERENCE: [(&str, ComplexScalar); 10] = [
    ("evolved[0]", c(-1.132, 0.190)),
    ("evolved[1]", c(-0.359, -0.927)),
    ("a", c(-0.772, -0.359)),
    ("b", c(0.264, -0.953)),
    ("associated[0]", c(-0.614, 0.103)),
    ("associated[1]", c(-0.359, -0.927)),
    ("p", c(0.603, 0.0)),
    ("naive_left[0]", c(-0.967, -1.094)),
    ("naive_left[1]", c(-1.373, 0.411)),
    ("p_naive", c(-0.372, 1.118)),
];

impl WorkedExample {
    pub fn compute(t: f64) -> Result<Self> {
        let h_i = initial_hamiltonian();
        let h_f = final_hamiltonian();
        let basis = eig_biortho(&h_i)?;
        let evolved = traceless_exp(&h_f, t)? * basis.u_plus;
        let coeffs = decompose(&evolved, &basis);
        let phi = basis.u_plus.scale(c(2.0, 0.0)) + basis.u_minus.scale(c(3.0, 0.0));
        let naive = naive_left_evolution(&h_f, &basis, &phi, t)?;
        Ok(WorkedExample {
            t,
            evolved,
            a: coeffs.c_plus,
            b: coeffs.c_minus,
            associated: associated_state(&evolved, &basis),
            probability: transition_probability(&evolved, &phi, &basis)?,
            naive_left: naive.left,
            naive_probability: naive.probability,
        })
    }

    pub fn fields(&self) -> Vec<Field> {
        let computed = [
            self.evolved.0[0],
            self.evolved.0[1],
            self.a,
            self.b,
            self.associated.0[0],
            self.associated.0[1],
            c(self.probability, 0.0),
            self.naive_left.0[0],
            self.naive_left.0[1],
            self.naive_probability,
        ];
        REFERENCE
            .iter()
            .zip(computed)
            .map(|(&(name, reference), computed)| Field {
                name,
                computed,
                reference,
            })
            .collect()
    }

    /// Fields farther than `tol` from their reference.
    pub fn mismatches(&self, tol: f64) -> Vec<Field> {
        self.fields().into_iter().filter(|f| f.error() > tol).collect()
    }
}
