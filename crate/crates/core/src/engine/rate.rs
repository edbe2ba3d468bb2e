use std::f64::consts::FRAC_PI_2;

use super::cusps::detect_cusps;
use super::dtop::{assemble_dtop, DtopSeries};
use super::{label_cuts, mode_at, LabelCut, QuenchSpec};
use crate::dynamics::{Channels, ModeSamples};
use crate::error::{DqptError, Result};
use crate::par::try_map_indexed;

#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub rate: Vec<f64>,
    /// Times of detected cusps.
    pub cusps: Vec<f64>,
}

impl RateSeries {
    fn from_rate(times: Vec<f64>, rate: Vec<f64>) -> Self {
        let cusps = detect_cusps(&rate).into_iter().map(|j| times[j]).collect();
        RateSeries { times, rate, cusps }
    }

    /// Whether a cusp lies within `tol` of `t`.
    pub fn has_cusp_near(&self, t: f64, tol: f64) -> bool {
        self.cusps.iter().any(|c| (c - t).abs() <= tol)
    }
}

/// Biorthogonal rate, self-normal rate and DTOP of one quench, computed from
/// a single pass over the modes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchObservables {
    pub rate: RateSeries,
    pub self_normal: RateSeries,
    pub dtop: DtopSeries,
}

pub(crate) struct SampledModes {
    pub times: Vec<f64>,
    pub grid: Vec<ModeSamples>,
    /// Each cut with its left and right one-sided modes.
    pub cuts: Vec<(LabelCut, ModeSamples, ModeSamples)>,
}

pub(crate) fn sample_modes(spec: &QuenchSpec, channels: Channels, with_cuts: bool) -> Result<SampledModes> {
    spec.validate()?;
    let times = spec.times();
    let ks = spec.momenta();
    let sample = |mode: crate::dynamics::ModeQuench| mode.trajectory().sample(&times, spec.quad_steps, channels);
    let grid = try_map_indexed(spec.execution, ks.len(), |j| {
        mode_at(&spec.pre, &spec.post, ks[j]).map(sample)
    })?;
    let mut cuts = Vec::new();
    if with_cuts {
        for cut in label_cuts(&spec.pre, spec.n_cells) {
            let left = sample(cut.left_mode(&spec.pre, &spec.post)?);
            let right = sample(cut.right_mode(&spec.pre, &spec.post)?);
            cuts.push((cut, left, right));
        }
    }
    if channels.geometric_phase {
        let all = grid.iter().chain(cuts.iter().flat_map(|(_, l, r)| [l, r]));
        if let Some(worst) = all.max_by(|a, b| a.max_dynamical_step.total_cmp(&b.max_dynamical_step)) {
            if worst.max_dynamical_step > FRAC_PI_2 {
                return Err(DqptError::PhaseStepTooLarge {
                    step: worst.max_dynamical_step,
                    t: worst.max_step_time,
                });
            }
        }
    }
    Ok(SampledModes { times, grid, cuts })
}

/// `-(1/N) Σ_k ln g_k(t_j)`, summed in ascending k.
fn fold_rate(times: &[f64], modes: &[ModeSamples], pick: impl Fn(&ModeSamples) -> &[f64]) -> Vec<f64> {
    let n = modes.len() as f64;
    (0..times.len())
        .map(|j| -modes.iter().map(|m| pick(m)[j].ln()).sum::<f64>() / n)
        .collect()
}

pub fn loschmidt_rate(spec: &QuenchSpec) -> Result<RateSeries> {
    let channels = Channels {
        echo: true,
        ..Channels::NONE
    };
    let s = sample_modes(spec, channels, false)?;
    let rate = fold_rate(&s.times, &s.grid, |m| &m.echo);
    Ok(RateSeries::from_rate(s.times, rate))
}

/// Rate of the conventionally normalised echo
/// `|⟨u(0)|u(t)⟩|² / (⟨u(0)|u(0)⟩⟨u(t)|u(t)⟩)`.
pub fn self_normal_rate(spec: &QuenchSpec) -> Result<RateSeries> {
    let channels = Channels {
        self_normal: true,
        ..Channels::NONE
    };
    let s = sample_modes(spec, channels, false)?;
    let rate = fold_rate(&s.times, &s.grid, |m| &m.self_normal);
    Ok(RateSeries::from_rate(s.times, rate))
}

pub fn run_quench(spec: &QuenchSpec) -> Result<QuenchObservables> {
    let channels = Channels {
        probability: false,
        ..Channels::ALL
    };
    let s = sample_modes(spec, channels, true)?;
    let rate = fold_rate(&s.times, &s.grid, |m| &m.echo);
    let sn = fold_rate(&s.times, &s.grid, |m| &m.self_normal);
    let dtop = assemble_dtop(&s)?;
    Ok(QuenchObservables {
        rate: RateSeries::from_rate(s.times.clone(), rate),
        self_normal: RateSeries::from_rate(s.times, sn),
        dtop,
    })
}
