use std::f64::consts::{FRAC_PI_2, PI};

use super::rate::{sample_modes, SampledModes};
use super::QuenchSpec;
use crate::dynamics::{wrap_phase, Channels};
use crate::error::{DqptError, Result};

/// Neighbouring geometric phases may differ by more than π/2 only where the
/// echo of one of the two modes dips below this value (the phase of a
/// near-zero amplitude is ill conditioned).
pub const GRID_ECHO_FLOOR: f64 = 1e-2;

/// A change of ν between consecutive samples, rounded to a multiple of 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtopSeries {
    pub times: Vec<f64>,
    pub nu: Vec<f64>,
    pub jumps: Vec<Jump>,
}

impl DtopSeries {
    /// Largest distance of any ν value from a multiple of 1/2.
    pub fn quantization_residue(&self) -> f64 {
        self.nu
            .iter()
            .map(|v| (v - (2.0 * v).round() / 2.0).abs())
            .fold(0.0, f64::max)
    }

    /// Distinct jump magnitudes in units of 1/2.
    pub fn magnitude_halves(&self) -> std::collections::BTreeSet<u32> {
        self.jumps
            .iter()
            .map(|j| (2.0 * j.delta.abs()).round() as u32)
            .collect()
    }
}

/// Jumps of at least 1/4 between consecutive samples.
pub fn extract_jumps(times: &[f64], nu: &[f64]) -> Vec<Jump> {
    nu.windows(2)
        .zip(&times[1..])
        .filter_map(|(w, &t)| {
            let d = w[1] - w[0];
            (d.abs() >= 0.25).then(|| Jump {
                time: t,
                delta: (2.0 * d).round() / 2.0,
            })
        })
        .collect()
}

/// Dynamical topological order parameter
/// `ν(t) = (1/2π) ∮ dk ∂_k φ^G_k(t)`, starting from `ν(0) = 0`.
pub fn dtop(spec: &QuenchSpec) -> Result<DtopSeries> {
    let channels = Channels {
        echo: true,
        geometric_phase: true,
        ..Channels::NONE
    };
    assemble_dtop(&sample_modes(spec, channels, true)?)
}

/// The k-loop integral, as a sum of wrapped phase increments between
/// neighbouring momenta. A step across a prequench label cut is split at the
/// cut and bridged by the two one-sided modes there, since the band label
/// (and with it φ^G) is discontinuous across the cut.
pub(crate) fn assemble_dtop(s: &SampledModes) -> Result<DtopSeries> {
    let n = s.grid.len();
    let dk = 2.0 * PI / n as f64;
    let mut nu = Vec::with_capacity(s.times.len());
    for (j, &t) in s.times.iter().enumerate() {
        let phase = |m: &crate::dynamics::ModeSamples| m.geometric_phase[j];
        let echo = |m: &crate::dynamics::ModeSamples| m.echo[j];
        let step = |a: &crate::dynamics::ModeSamples, b: &crate::dynamics::ModeSamples, k: f64| -> Result<f64> {
            let d = wrap_phase(phase(b) - phase(a));
            if d.abs() > FRAC_PI_2 && echo(a).min(echo(b)) > GRID_ECHO_FLOOR {
                return Err(DqptError::GridTooCoarse { step: d, k, t });
            }
            Ok(d)
        };
        let mut cuts = s.cuts.iter().peekable();
        let mut total = 0.0;
        for i in 0..n {
            let k = i as f64 * dk;
            let next = &s.grid[(i + 1) % n];
            match cuts.next_if(|(c, _, _)| c.j == i) {
                Some((_, left, right)) => {
                    total += step(&s.grid[i], left, k)? + step(right, next, k)?;
                }
                None => total += step(&s.grid[i], next, k)?,
            }
        }
        nu.push(total / (2.0 * PI));
    }
    let jumps = extract_jumps(&s.times, &nu);
    Ok(DtopSeries {
        times: s.times.clone(),
        nu,
        jumps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jumps_are_rounded_to_halves() {
        let t = [0.0, 0.1, 0.2, 0.3, 0.4];
        let nu = [0.0, 0.0, -0.49, -0.5, 0.5];
        let j = extract_jumps(&t, &nu);
        assert_eq!(j, vec![Jump { time: 0.2, delta: -0.5 }, Jump { time: 0.4, delta: 1.0 }]);
    }

    #[test]
    fn residue_and_magnitudes() {
        let s = DtopSeries {
            times: vec![0.0, 1.0, 2.0],
            nu: vec![0.0, 0.52, -0.5],
            jumps: vec![Jump { time: 1.0, delta: 0.5 }, Jump { time: 2.0, delta: -1.0 }],
        };
        assert!((s.quantization_residue() - 0.02).abs() < 1e-12);
        assert_eq!(s.magnitude_halves().into_iter().collect::<Vec<_>>(), vec![1, 2]);
    }
}
