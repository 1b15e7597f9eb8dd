//! Built-in test functions and randomized `(f, g)` pairs.
//!
//! Every family is generated either directly in space or directly in
//! frequency, so the transform under test never builds its own inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, shift, GridSpec, SampledFunction, Spectrum};

/// Standard smooth bump `exp(−1/(1−t²))` on `|t| < 1`, zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 0 for `u ≤ 0`, 1 for `u ≥ 1`.
pub fn smooth_step(u: f64) -> f64 {
    fn h(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    let a = h(u);
    let b = h(1.0 - u);
    a / (a + b)
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `A·exp(−π|x − c|²/w²)`.
pub fn gaussian(grid: &GridSpec, center: &[f64], width: f64, amplitude: Complex64) -> Result<SampledFunction> {
    if center.len() != grid.dimension() {
        return Err(Error::InvalidParameter("center dimension differs from grid".into()));
    }
    SampledFunction::from_fn(grid.clone(), |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
        amplitude * (-PI * r2 / (width * width)).exp()
    })
}

/// `max{0, 1 − |ξ|}` on the dual of `space`.
pub fn triangle_spectrum(space: &GridSpec) -> Result<Spectrum> {
    Spectrum::from_real_fn(space.dual(), |xi| (1.0 - radius(xi)).max(0.0))
}

/// `(1/L)·φ(|ξ|/L)` on the dual of `space`.
pub fn bump_spectrum(space: &GridSpec, scale: f64) -> Result<Spectrum> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    Spectrum::from_real_fn(space.dual(), |xi| bump(radius(xi) / scale) / scale)
}

/// The triangle spectrum with its sub-level tail `{f̂ ≲ a}` sign-flipped by a
/// smooth switch of relative width `2·width` around `f̂ = a`.
///
/// In `u = (1 − |ξ|)/a` the multiplier is `−1` for `u ≤ 1 − width` and `+1`
/// for `u ≥ 1 + width`; it is real and even, so the result stays real and
/// even in space. Near the edge of the support the construction is
/// self-similar in `a`.
pub fn triangle_tail_flip(space: &GridSpec, amplitude: f64, width: f64) -> Result<Spectrum> {
    if !(amplitude > 0.0 && width > 0.0 && width < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need amplitude > 0 and 0 < width < 1, got {amplitude}, {width}"
        )));
    }
    Spectrum::from_real_fn(space.dual(), |xi| {
        let t = (1.0 - radius(xi)).max(0.0);
        let u = t / amplitude;
        let flipped = 1.0 - smooth_step((u - (1.0 - width)) / (2.0 * width));
        t * (1.0 - 2.0 * flipped)
    })
}

/// Sum of randomly placed, scaled and phased bumps in frequency, inside the
/// ball `|ξ| ≤ reach`.
pub fn random_band_limited<R: Rng>(space: &GridSpec, reach: f64, terms: usize, rng: &mut R) -> Result<Spectrum> {
    let dim = space.dimension();
    let pieces: Vec<(Vec<f64>, f64, Complex64)> = (0..terms)
        .map(|_| {
            let s = rng.gen_range(0.2 * reach..0.5 * reach);
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-(reach - s)..(reach - s)) / (dim as f64).sqrt()).collect();
            let c = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI));
            (center, s, c)
        })
        .collect();
    Spectrum::from_fn(space.dual(), |xi| {
        pieces
            .iter()
            .map(|(center, s, c)| {
                let r: f64 = xi.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                c * bump(r / s)
            })
            .sum()
    })
}

/// Families of `(f, g)` pairs used for certification sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFamily {
    /// Two Gaussians with nearby centers, widths and complex amplitudes.
    Gaussians,
    /// A Gaussian and its translate, plus a little Gaussian noise.
    ShiftedGaussian,
    /// `ĝ = −f̂` for a scaled bump spectrum.
    SignFlippedBump,
    /// Triangle spectrum against even real perturbations.
    TrianglePerturbation,
    /// Random band-limited spectra with a smooth phase and amplitude perturbation.
    RandomBandLimited,
}

impl PairFamily {
    pub const ALL: [PairFamily; 5] = [
        PairFamily::Gaussians,
        PairFamily::ShiftedGaussian,
        PairFamily::SignFlippedBump,
        PairFamily::TrianglePerturbation,
        PairFamily::RandomBandLimited,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PairFamily::Gaussians => "gaussians",
            PairFamily::ShiftedGaussian => "shifted_gaussian",
            PairFamily::SignFlippedBump => "sign_flipped_bump",
            PairFamily::TrianglePerturbation => "triangle_perturbation",
            PairFamily::RandomBandLimited => "random_band_limited",
        }
    }
}

/// Draws one pair from `family` on `grid`. Frequency content is kept within a
/// quarter of the dual half extent so aliasing stays negligible.
pub fn random_pair<R: Rng>(family: PairFamily, grid: &GridSpec, rng: &mut R) -> Result<(SampledFunction, SampledFunction)> {
    let dim = grid.dimension();
    let nyquist = (0..dim).map(|a| grid.dual().half_extent(a)).fold(f64::INFINITY, f64::min);
    let one = Complex64::new(1.0, 0.0);
    match family {
        PairFamily::Gaussians => {
            let w = rng.gen_range(0.5..2.0);
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = gaussian(grid, &center, w, one)?;
            let scale = 10f64.powf(rng.gen_range(-3.0..-0.3));
            let center_g: Vec<f64> = center.iter().map(|c| c + scale * rng.gen_range(-1.0..1.0)).collect();
            let amp = Complex64::from_polar(1.0 + scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0));
            let g = gaussian(grid, &center_g, w * (1.0 + scale * rng.gen_range(-0.5..0.5)), amp)?;
            Ok((f, g))
        }
        PairFamily::ShiftedGaussian => {
            let w = rng.gen_range(0.5..2.0);
            let f = gaussian(grid, &vec![0.0; dim], w, one)?;
            let offset: Vec<f64> = (0..dim).map(|_| 10f64.powf(rng.gen_range(-3.0..-0.3)) * if rng.gen() { 1.0 } else { -1.0 }).collect();
            let noise_amp = 10f64.powf(rng.gen_range(-6.0..-2.0));
            let noise_center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let noise = gaussian(grid, &noise_center, rng.gen_range(0.3..1.0), Complex64::new(noise_amp, 0.0))?;
            let g = shift(&f, &offset)?.linear_combination(one, &noise, one)?;
            Ok((f, g))
        }
        PairFamily::SignFlippedBump => {
            let scale = rng.gen_range(0.05..0.25) * nyquist;
            let f = inverse_transform(&bump_spectrum(grid, scale)?);
            let g = f.scale(-one)?;
            Ok((f, g))
        }
        PairFamily::TrianglePerturbation => {
            if nyquist < 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "triangle family needs a dual half extent of at least 2, got {nyquist}"
                )));
            }
            let f = inverse_transform(&triangle_spectrum(grid)?);
            let a = rng.gen_range(0.05..0.9);
            let mut g = inverse_transform(&triangle_tail_flip(grid, a, 0.2)?);
            // Optional smooth even bump on top.
            if rng.gen_bool(0.5) {
                let h = 10f64.powf(rng.gen_range(-3.0..-1.0));
                let s = rng.gen_range(0.1..0.5);
                let bumpy = Spectrum::from_real_fn(grid.dual(), |xi| h * bump(radius(xi) / s))?;
                g = g.linear_combination(one, &inverse_transform(&bumpy), one)?;
            }
            Ok((f, g))
        }
        PairFamily::RandomBandLimited => {
            let reach = 0.25 * nyquist;
            let fhat = random_band_limited(grid, reach, rng.gen_range(1..5), rng)?;
            let phase_amp = 10f64.powf(rng.gen_range(-3.0..0.0));
            let freq = rng.gen_range(0.1..2.0) / reach;
            let amp = 10f64.powf(rng.gen_range(-3.0..-0.5));
            let extra = random_band_limited(grid, reach, 2, rng)?;
            let ghat = fhat.zip_with(&extra, |f, e| {
                let theta = phase_amp * (freq * f.norm() * 10.0).sin();
                f * Complex64::from_polar(1.0, theta) + amp * e
            })?;
            Ok((inverse_transform(&fhat), inverse_transform(&ghat)))
        }
    }
}

/// A smooth, rapidly decaying test function: a modulated Gaussian mixture.
pub fn random_smooth<R: Rng>(grid: &GridSpec, rng: &mut R) -> Result<SampledFunction> {
    let dim = grid.dimension();
    let terms = rng.gen_range(1..4);
    let mut acc = SampledFunction::zeros(grid.clone());
    for _ in 0..terms {
        let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let w = rng.gen_range(0.5..2.0);
        let amp = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI));
        let k: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = gaussian(grid, &center, w, amp)?;
        let modulated = SampledFunction::from_fn(grid.clone(), |x| {
            let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, 2.0 * PI * phase)
        })?;
        let term = g.zip_with(&modulated, |a, b| a * b)?;
        acc = acc.linear_combination(Complex64::new(1.0, 0.0), &term, Complex64::new(1.0, 0.0))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{fourier_transform, lp_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bump_and_step_shapes() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert!((bump(0.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(bump(0.3), bump(-0.3));
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.1), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tail_flip_is_real_even_and_modulus_close() {
        let grid = GridSpec::uniform(1, 16.0, 1024).unwrap();
        let g = inverse_transform(&triangle_tail_flip(&grid, 0.3, 0.2).unwrap());
        assert!(g.max_abs_imag() < 1e-12);
        assert!(g.sub(&g.reflect()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn every_family_produces_valid_pairs() {
        let grid = GridSpec::uniform(1, 16.0, 1024).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for family in PairFamily::ALL {
            for _ in 0..5 {
                let (f, g) = random_pair(family, &grid, &mut rng).unwrap();
                let d = lp_norm(&f.sub(&g).unwrap(), 2.0).unwrap();
                assert!(d.is_finite() && d > 0.0, "{}", family.name());
            }
        }
    }

    #[test]
    fn two_dimensional_families() {
        let grid = GridSpec::uniform(2, 8.0, 256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for family in [PairFamily::Gaussians, PairFamily::ShiftedGaussian, PairFamily::RandomBandLimited, PairFamily::SignFlippedBump] {
            let (f, g) = random_pair(family, &grid, &mut rng).unwrap();
            assert!(fourier_transform(&f.sub(&g).unwrap()).max_abs() > 0.0);
        }
    }
}
