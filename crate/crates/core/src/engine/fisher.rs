use std::ops::RangeInclusive;

use super::{label_cuts, mode_at, momentum_grid, QuenchSpec};
use crate::complexla::{ComplexScalar, I};
use crate::dynamics::{critical_times, g_k, two_level_probability, ModeQuench};
use crate::error::{DqptError, Result};
use crate::par::try_map_indexed;
use crate::ssh_model::SshParams;

/// Adjacent samples of one branch farther apart than this are treated as a
/// branch discontinuity of `t_n(k)`, not as a continuous crossing.
pub const BRANCH_JUMP: f64 = 0.3;

/// At a prequench label cut, a one-sided critical time counts as real when
/// its imaginary part is below this.
pub const DEGENERATE_IM_TOL: f64 = 1e-8;

const REFINE_IM_TOL: f64 = 1e-10;

const DUPLICATE_K: f64 = 1e-6;
const DUPLICATE_T: f64 = 1e-6;

/// A real-time zero of the echo of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub k: f64,
    pub t: f64,
    /// `g_k(t)` at the refined crossing.
    pub g_residual: f64,
    /// Upper-band probability `p(k, t)` at the crossing.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherBranch {
    pub n: i32,
    pub k_values: Vec<f64>,
    /// `z_n(k) = i·t_n(k)`.
    pub z_values: Vec<ComplexScalar>,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherAnalysis {
    pub branches: Vec<FisherBranch>,
    /// Momenta skipped because `atanh(m)` is singular there.
    pub singular_k: Vec<f64>,
}

impl FisherAnalysis {
    /// Distinct per-branch crossing counts.
    pub fn count_profile(&self) -> std::collections::BTreeSet<usize> {
        self.branches.iter().map(|b| b.crossings.len()).collect()
    }
}

fn times_or_singular(mode: &ModeQuench, n_range: &RangeInclusive<i32>, k: f64) -> Result<Option<Vec<ComplexScalar>>> {
    match critical_times(mode, n_range.clone()) {
        Ok(t) => Ok(Some(t)),
        Err(DqptError::AtanhSingular { .. }) => Ok(None),
        Err(e) => Err(e.at_k(k)),
    }
}

fn verified(mode: &ModeQuench, k: f64, t: f64) -> Result<Crossing> {
    Ok(Crossing {
        k,
        t,
        g_residual: g_k(mode, t).map_err(|e| e.at_k(k))?,
        probability: two_level_probability(mode, t).map_err(|e| e.at_k(k))?,
    })
}

/// Fisher-zero branches `z_n(k)` for `n` in `n_range` on a grid of
/// `k_samples` momenta, with their crossings of the real time axis.
///
/// Crossings are sign changes of `Im t_n` between neighbouring momenta,
/// refined by bisection in k. At a prequench label cut the band is
/// discontinuous; there each one-sided limit whose `t_n` is real is counted
/// instead.
pub fn fisher_branches(spec: &QuenchSpec, n_range: RangeInclusive<i32>, k_samples: usize) -> Result<FisherAnalysis> {
    spec.pre.validate()?;
    spec.post.validate()?;
    if k_samples < 256 {
        return Err(DqptError::Invalid(format!(
            "k_samples must be at least 256, got {k_samples}"
        )));
    }
    if n_range.is_empty() {
        return Err(DqptError::Invalid("empty branch range".into()));
    }
    let (pre, post) = (spec.pre, spec.post);
    let ks = momentum_grid(k_samples);
    let dk = ks[1];
    let samples: Vec<Option<Vec<ComplexScalar>>> = try_map_indexed(spec.execution, k_samples, |j| {
        let mode = mode_at(&pre, &post, ks[j])?;
        times_or_singular(&mode, &n_range, ks[j])
    })?;
    let cuts = label_cuts(&pre, k_samples);
    let singular_k = ks
        .iter()
        .zip(&samples)
        .filter_map(|(&k, s)| s.is_none().then_some(k))
        .collect();

    let n_list: Vec<i32> = n_range.clone().collect();
    let mut branches = Vec::with_capacity(n_list.len());
    for (b, &n) in n_list.iter().enumerate() {
        let mut k_values = Vec::new();
        let mut z_values = Vec::new();
        for (&k, s) in ks.iter().zip(&samples) {
            if let Some(ts) = s {
                k_values.push(k);
                z_values.push(I * ts[b]);
            }
        }
        let mut crossings = Vec::new();
        for j in 0..k_samples {
            if cuts.iter().any(|c| c.j == j) {
                continue;
            }
            let (Some(a), Some(c)) = (&samples[j], &samples[(j + 1) % k_samples]) else {
                continue;
            };
            let (ta, tc) = (a[b], c[b]);
            if ta.im * tc.im < 0.0 && (ta - tc).norm() < BRANCH_JUMP && ta.re > 0.0 {
                if let Some(x) = refine(&pre, &post, n, ks[j], ks[j] + dk, ta.im)? {
                    crossings.push(x);
                }
            }
        }
        for cut in &cuts {
            for (k, mode) in [
                (cut.k_lo, cut.left_mode(&pre, &post)?),
                (cut.k_hi, cut.right_mode(&pre, &post)?),
            ] {
                if let Some(ts) = times_or_singular(&mode, &(n..=n), k)? {
                    let t = ts[0];
                    if t.im.abs() < DEGENERATE_IM_TOL && t.re > 0.0 {
                        // A continuous crossing refined onto the cut is the same zero.
                        crossings
                            .retain(|c: &Crossing| (c.k - k).abs() > DUPLICATE_K || (c.t - t.re).abs() > DUPLICATE_T);
                        crossings.push(verified(&mode, k, t.re)?);
                    }
                }
            }
        }
        crossings.sort_by(|x, y| x.k.total_cmp(&y.k));
        branches.push(FisherBranch {
            n,
            k_values,
            z_values,
            crossings,
        });
    }
    Ok(FisherAnalysis { branches, singular_k })
}

/// Bisection on `Im t_n(k)` inside `[lo, hi]`, where `im_lo` is the value at
/// `lo`.
fn refine(pre: &SshParams, post: &SshParams, n: i32, lo: f64, hi: f64, im_lo: f64) -> Result<Option<Crossing>> {
    let (mut lo, mut hi) = (lo, hi);
    let mut best: Option<(ModeQuench, f64, ComplexScalar)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let mode = mode_at(pre, post, mid)?;
        let Some(ts) = times_or_singular(&mode, &(n..=n), mid)? else {
            return Ok(None);
        };
        let t = ts[0];
        best = Some((mode, mid, t));
        if t.im.abs() < REFINE_IM_TOL || mid <= lo || mid >= hi {
            break;
        }
        if (t.im < 0.0) == (im_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    match best {
        Some((mode, k, t)) if t.re > 0.0 => verified(&mode, k, t.re).map(Some),
        _ => Ok(None),
    }
}
