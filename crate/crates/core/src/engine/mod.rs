//! Brillouin-zone sweeps of SSH quenches.
//!
//! Every observable is a fixed-order fold over per-momentum results, so the
//! output does not depend on how the momenta were scheduled.

mod cusps;
mod dtop;
mod fisher;
mod heatmap;
mod rate;
mod table;

use std::f64::consts::PI;

pub use cusps::{detect_cusps, CUSP_FLOOR, CUSP_MEDIAN_FACTOR};
pub use dtop::{dtop, extract_jumps, DtopSeries, Jump, GRID_ECHO_FLOOR};
pub use fisher::{fisher_branches, Crossing, FisherAnalysis, FisherBranch, BRANCH_JUMP, DEGENERATE_IM_TOL};
pub use heatmap::{pk_heatmap, probability_at, PkGrid};
pub use rate::{loschmidt_rate, run_quench, self_normal_rate, QuenchObservables, RateSeries};
pub use table::{
    select_rows, table_s1_catalog, table_s1_csv, table_s1_report, DirectionReport, DirectionRun, ExpectedProfile,
    HalfSet, TableRow, TableRowReport, TABLE_CSV_HEADER,
};

use crate::biortho::BiorthoBasis;
use crate::complexla::{ComplexScalar, Tolerances};
use crate::dynamics::ModeQuench;
use crate::error::{DqptError, Result};
use crate::par::Execution;
use crate::ssh_model::{block_hamiltonian, dispersion, SshParams};

/// A prequench–postquench pair with its discretisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSpec {
    pub pre: SshParams,
    pub post: SshParams,
    /// Number of unit cells `N`; momenta are `k_j = 2πj/N`.
    pub n_cells: usize,
    pub t_max: f64,
    /// Number of time samples on `[0, t_max]`, endpoints included.
    pub t_steps: usize,
    /// Simpson panels per unit time for the dynamical phase.
    pub quad_steps: usize,
    pub execution: Execution,
}

impl QuenchSpec {
    pub const DEFAULT_CELLS: usize = 2000;
    pub const DEFAULT_T_MAX: f64 = 5.0;
    pub const DEFAULT_T_STEPS: usize = 2000;
    pub const DEFAULT_QUAD_STEPS: usize = 512;

    pub fn new(pre: SshParams, post: SshParams) -> Self {
        QuenchSpec {
            pre,
            post,
            n_cells: Self::DEFAULT_CELLS,
            t_max: Self::DEFAULT_T_MAX,
            t_steps: Self::DEFAULT_T_STEPS,
            quad_steps: Self::DEFAULT_QUAD_STEPS,
            execution: Execution::default(),
        }
    }

    /// The opposite quench direction with the same discretisation.
    pub fn reversed(&self) -> Self {
        QuenchSpec {
            pre: self.post,
            post: self.pre,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pre.validate()?;
        self.post.validate()?;
        if self.n_cells < 2 {
            return Err(DqptError::Invalid(format!(
                "n_cells must be at least 2, got {}",
                self.n_cells
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(DqptError::Invalid(format!(
                "t_max must be positive and finite, got {}",
                self.t_max
            )));
        }
        if self.t_steps < 2 {
            return Err(DqptError::Invalid(format!(
                "t_steps must be at least 2, got {}",
                self.t_steps
            )));
        }
        if self.quad_steps < 2 {
            return Err(DqptError::Invalid(format!(
                "quad_steps must be at least 2, got {}",
                self.quad_steps
            )));
        }
        Ok(())
    }

    pub fn momenta(&self) -> Vec<f64> {
        momentum_grid(self.n_cells)
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.t_steps - 1) as f64;
        (0..self.t_steps).map(|j| self.t_max * j as f64 / last).collect()
    }

    pub fn mode(&self, k: f64) -> Result<ModeQuench> {
        mode_at(&self.pre, &self.post, k)
    }
}

pub(crate) fn momentum_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

pub(crate) fn mode_at(pre: &SshParams, post: &SshParams, k: f64) -> Result<ModeQuench> {
    ModeQuench::new(block_hamiltonian(pre, k), block_hamiltonian(post, k)).map_err(|e| e.at_k(k))
}

pub(crate) fn mode_with_energy(pre: &SshParams, post: &SshParams, k: f64, eps: ComplexScalar) -> Result<ModeQuench> {
    let h_i = block_hamiltonian(pre, k);
    if eps.norm() < Tolerances::default().exceptional * h_i.norm() {
        return Err(DqptError::ExceptionalPoint {
            eps: eps.norm(),
            k: Some(k),
        });
    }
    let basis = BiorthoBasis::with_energy(&h_i, eps);
    ModeQuench::with_prequench_basis(h_i, block_hamiltonian(post, k), basis).map_err(|e| e.at_k(k))
}

/// A step of the momentum grid across which the principal prequench band
/// label flips sign (`ε_k²` crosses the negative real axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelCut {
    /// The cut lies between grid points `j` and `j + 1` (cyclically).
    pub j: usize,
    /// Bracket around the flip after bisection.
    pub k_lo: f64,
    pub k_hi: f64,
    /// One-sided continuations of the band energy at the two bracket ends.
    pub eps_lo: ComplexScalar,
    pub eps_hi: ComplexScalar,
}

impl LabelCut {
    pub fn left_mode(&self, pre: &SshParams, post: &SshParams) -> Result<ModeQuench> {
        mode_with_energy(pre, post, self.k_lo, self.eps_lo)
    }

    pub fn right_mode(&self, pre: &SshParams, post: &SshParams) -> Result<ModeQuench> {
        mode_with_energy(pre, post, self.k_hi, self.eps_hi)
    }
}

/// Bracket width at which the bisection for a label cut stops.
pub const CUT_BRACKET: f64 = 1e-12;

fn flipped(a: ComplexScalar, b: ComplexScalar) -> bool {
    (b - a).norm() > (b + a).norm()
}

fn nearest_root(target: ComplexScalar, eps: ComplexScalar) -> ComplexScalar {
    if flipped(target, eps) {
        -eps
    } else {
        eps
    }
}

/// Label cuts of the prequench band on the `n`-point momentum grid.
pub fn label_cuts(pre: &SshParams, n: usize) -> Vec<LabelCut> {
    let ks = momentum_grid(n);
    let eps: Vec<ComplexScalar> = ks.iter().map(|&k| dispersion(pre, k)).collect();
    let dk = 2.0 * PI / n as f64;
    let mut cuts = Vec::new();
    for j in 0..n {
        let next = eps[(j + 1) % n];
        if !flipped(eps[j], next) {
            continue;
        }
        let (mut lo, mut hi) = (ks[j], ks[j] + dk);
        for _ in 0..200 {
            if hi - lo <= CUT_BRACKET {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if flipped(eps[j], dispersion(pre, mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        cuts.push(LabelCut {
            j,
            k_lo: lo,
            k_hi: hi,
            eps_lo: nearest_root(eps[j], dispersion(pre, lo)),
            eps_hi: nearest_root(next, dispersion(pre, hi)),
        });
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_grids() {
        let mut spec = QuenchSpec::new(SshParams::new(0.2, 1.0), SshParams::new(-0.2, 1.0));
        spec.n_cells = 4;
        spec.t_steps = 3;
        spec.t_max = 2.0;
        assert_eq!(spec.times(), vec![0.0, 1.0, 2.0]);
        let ks = spec.momenta();
        assert_eq!(ks.len(), 4);
        assert_eq!(ks[2], PI);
        spec.n_cells = 1;
        assert!(matches!(spec.validate(), Err(DqptError::Invalid(_))));
    }

    #[test]
    fn middle_phase_cut_at_pi() {
        let cuts = label_cuts(&SshParams::new(0.2, 5.0), 2000);
        assert!(cuts.iter().any(|c| (c.k_lo - PI).abs() < 1e-9));
        for c in &cuts {
            assert!(c.k_hi - c.k_lo <= 2.0 * CUT_BRACKET);
            assert!((c.eps_lo + c.eps_hi).norm() < 1e-6);
        }
    }

    #[test]
    fn no_cuts_without_negative_real_crossing() {
        assert!(label_cuts(&SshParams::new(-2.0, 1.0), 2000).is_empty());
        assert!(label_cuts(&SshParams::new(0.4, 0.0), 2000).is_empty());
    }
}
