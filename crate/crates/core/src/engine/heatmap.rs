use super::rate::sample_modes;
use super::{mode_at, QuenchSpec};
use crate::dynamics::{two_level_probability, Channels};
use crate::error::Result;

/// Upper-band probability `p(k, t)` on the momentum and time grids of the quench.
#[derive(Debug, Clone, PartialEq)]
pub struct PkGrid {
    pub k: Vec<f64>,
    pub t: Vec<f64>,
    /// `p[i][j] = p(k_i, t_j)`.
    pub p: Vec<Vec<f64>>,
}

pub fn pk_heatmap(spec: &QuenchSpec) -> Result<PkGrid> {
    let channels = Channels {
        probability: true,
        ..Channels::NONE
    };
    let s = sample_modes(spec, channels, false)?;
    Ok(PkGrid {
        k: spec.momenta(),
        t: s.times,
        p: s.grid.into_iter().map(|m| m.probability).collect(),
    })
}

/// `p(k, t)` at an arbitrary momentum, e.g. a refined Fisher crossing.
pub fn probability_at(spec: &QuenchSpec, k: f64, t: f64) -> Result<f64> {
    let mode = mode_at(&spec.pre, &spec.post, k)?;
    two_level_probability(&mode, t).map_err(|e| e.at_k(k))
}
