#![allow(dead_code)]

use std::f64::consts::PI;

use biortho_dqpt::{ComplexScalar, Mat2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the square `[-r, r] × [-r, r]`.
pub fn complex_in(rng: &mut ChaCha8Rng, r: f64) -> ComplexScalar {
    ComplexScalar::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

/// Zero-diagonal block with entries in `[-5, 5]²`, kept away from exceptional
/// points.
pub fn offdiag_block(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let a = complex_in(rng, 5.0);
        let b = complex_in(rng, 5.0);
        if a.norm() > 0.05 && b.norm() > 0.05 {
            return Mat2::off_diagonal(a, b);
        }
    }
}

/// Traceless block `[[c, a], [b, -c]]` with entries in `[-5, 5]²`.
pub fn traceless(rng: &mut ChaCha8Rng) -> Mat2 {
    let c = complex_in(rng, 5.0);
    Mat2::new(c, complex_in(rng, 5.0), complex_in(rng, 5.0), -c)
}

/// Hermitian zero-diagonal block `x σ_x + y σ_y`.
pub fn hermitian_block(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let x: f64 = rng.random_range(-5.0..5.0);
        let y: f64 = rng.random_range(-5.0..5.0);
        if x.hypot(y) > 0.05 {
            return Mat2::off_diagonal(ComplexScalar::new(x, -y), ComplexScalar::new(x, y));
        }
    }
}

/// `exp(A)` by scaling and squaring a truncated Taylor series.
pub fn expm_series(a: &Mat2) -> Mat2 {
    let mut squarings = 0;
    let mut scaled = *a;
    while scaled.norm() > 0.25 {
        scaled = scaled.scale(ComplexScalar::new(0.5, 0.0));
        squarings += 1;
    }
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for n in 1..=24 {
        term = (term * scaled).scale(ComplexScalar::new(1.0 / n as f64, 0.0));
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

pub fn state(rng: &mut ChaCha8Rng) -> Vec2 {
    loop {
        let v = Vec2::new(complex_in(rng, 1.0), complex_in(rng, 1.0));
        if v.norm_sqr() > 1e-2 {
            return v;
        }
    }
}

/// Textbook Hermitian SSH quench for `γ = 0`, written without the library's
/// biorthogonal machinery: `d_k = (x_k, y_k)` is real, the echo amplitude is
/// `cos(|d_f| t) + i sin(|d_f| t) d̂_i·d̂_f`, and the dynamical phase is
/// `t |d_f| d̂_i·d̂_f`.
pub mod hermitian {
    use super::*;

    fn d(eta: f64, k: f64) -> (f64, f64) {
        ((1.0 + eta) + (1.0 - eta) * k.cos(), (1.0 - eta) * k.sin())
    }

    fn mode(eta_i: f64, eta_f: f64, k: f64) -> (f64, f64) {
        let (xi, yi) = d(eta_i, k);
        let (xf, yf) = d(eta_f, k);
        let ef = xf.hypot(yf);
        let overlap = (xi * xf + yi * yf) / (xi.hypot(yi) * ef);
        (ef, overlap)
    }

    fn amplitude(ef: f64, overlap: f64, t: f64) -> ComplexScalar {
        ComplexScalar::new((ef * t).cos(), (ef * t).sin() * overlap)
    }

    fn momenta(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
    }

    pub fn rate(eta_i: f64, eta_f: f64, n: usize, times: &[f64]) -> Vec<f64> {
        times
            .iter()
            .map(|&t| {
                -momenta(n)
                    .map(|k| {
                        let (ef, ov) = mode(eta_i, eta_f, k);
                        amplitude(ef, ov, t).norm_sqr().ln()
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect()
    }

    pub fn dtop(eta_i: f64, eta_f: f64, n: usize, times: &[f64]) -> Vec<f64> {
        times
            .iter()
            .map(|&t| {
                let phases: Vec<f64> = momenta(n)
                    .map(|k| {
                        let (ef, ov) = mode(eta_i, eta_f, k);
                        amplitude(ef, ov, t).arg() - t * ef * ov
                    })
                    .collect();
                let mut total = 0.0;
                for j in 0..n {
                    let mut step = phases[(j + 1) % n] - phases[j];
                    step -= 2.0 * PI * (step / (2.0 * PI)).round();
                    total += step;
                }
                total / (2.0 * PI)
            })
            .collect()
    }
}
