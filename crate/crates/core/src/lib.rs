//! Biorthogonal dynamical quantum phase transitions in two-band
//! non-Hermitian lattice models.
//!
//! The crate is organised bottom-up:
//!
//! * [`complexla`]: complex scalars and closed-form 2×2 linear algebra.
//! * [`biortho`]: right/left eigenbases, associated states and the
//!   biorthogonal probability rule.
//! * [`dynamics`]: single-momentum quench dynamics (Loschmidt amplitude,
//!   echo factor `g_k(t)`, Fisher-zero times, dynamical and geometric phases).
//! * [`ssh_model`]: the non-Hermitian Su–Schrieffer–Heeger chain.
//! * [`worked_example`]: a single two-level quench with reference values.
//! * [`engine`]: Brillouin-zone sweeps producing Loschmidt rates, the
//!   dynamical topological order parameter and Fisher-zero branches.
//!
//! Momentum sweeps run through [`par`], which uses rayon when the `parallel`
//! feature is enabled and a plain loop otherwise. All reductions are done in
//! ascending-k order so results do not depend on the worker count.

pub mod biortho;
pub mod complexla;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod par;
pub mod ssh_model;
pub mod worked_example;

pub use complexla::{ComplexScalar, Mat2, Vec2};
pub use error::{DqptError, Result};
