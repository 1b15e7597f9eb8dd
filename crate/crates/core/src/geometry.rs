//! Complex-plane inequalities behind the stability estimate.
//!
//! For `w > 0` and `|z − w| ≤ w/2`,
//!
//! ```text
//! |w − Re z|² ≤ |w − |z||² + 2·|(z − w)/w|·(Im z)²
//! ```
//!
//! Applied with `w = |f̂(ξ)|` and `z = conj(f̂)/|f̂|·ĝ` this splits `ĝ − f̂` into a
//! radial part `a` (seen by the modulus) and a tangential part `b` (the
//! translation direction).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack on region boundaries so that points placed exactly on a
/// boundary circle are not rejected because of rounding.
const BOUNDARY_RTOL: f64 = 1e-12;

/// Combined weight of the tangential term in the pointwise estimate:
/// `1 + 2·(1/10)`, since `|(z − w)/w| ≤ 1/10` once `|f̂| ≥ 10ε`.
pub const TANGENTIAL_WEIGHT: f64 = 6.0 / 5.0;

/// A `(w, z)` pair for the radial/tangential inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Input {
    pub w: f64,
    pub z: Complex64,
}

impl Lemma1Input {
    pub fn new(w: f64, z: Complex64) -> Self {
        Self { w, z }
    }

    /// `w > 0` and `|z − w| ≤ w/2`.
    pub fn is_admissible(&self) -> bool {
        self.w.is_finite()
            && self.w > 0.0
            && self.z.re.is_finite()
            && self.z.im.is_finite()
            && (self.z - self.w).norm() <= 0.5 * self.w * (1.0 + BOUNDARY_RTOL)
    }
}

/// Radial and tangential components of `ĝ − f̂` in the frame `(f̂/|f̂|, i·f̂/|f̂|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub a: f64,
    pub b: f64,
}

impl Decomposition {
    pub fn magnitude(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// RHS − LHS of the inequality. Nonnegative on the admissible disk.
pub fn lemma1_gap(input: Lemma1Input) -> Result<f64> {
    if !input.is_admissible() {
        return Err(Error::Inadmissible(format!(
            "need w > 0 and |z - w| <= w/2, got w={}, z={}",
            input.w, input.z
        )));
    }
    Ok(lemma1_gap_unchecked(input.w, input.z))
}

fn lemma1_gap_unchecked(w: f64, z: Complex64) -> f64 {
    let radial = w - z.norm();
    let ratio = ((z - w) / w).norm();
    let rhs = radial * radial + 2.0 * ratio * z.im * z.im;
    let lhs = (w - z.re) * (w - z.re);
    rhs - lhs
}

/// Result of a brute-force search for the smallest gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSummary {
    pub min_gap: f64,
    /// `[Re z, Im z]` of the minimiser.
    pub argmin_z: [f64; 2],
    /// `[radius_steps, angle_steps]`, or `[samples, 0]` for random sampling.
    pub steps: [usize; 2],
}

/// Smaller gap wins; ties go to the earlier index so the result does not
/// depend on how the work was split.
fn better(a: (f64, usize, Complex64), b: (f64, usize, Complex64)) -> (f64, usize, Complex64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Minimum gap on the polar grid `z = 1 + r·e^{iθ}`, `r ∈ [0, 1/2]`
/// (endpoints included), `θ = 2πj/angle_steps`, with `w = 1`.
pub fn lemma1_scan(radius_steps: usize, angle_steps: usize) -> Result<ScanSummary> {
    if radius_steps < 2 || angle_steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "scan needs at least 2 steps per direction, got {radius_steps} x {angle_steps}"
        )));
    }
    let (min_gap, _, z) = (0..radius_steps)
        .into_par_iter()
        .flat_map_iter(|i| {
            let r = 0.5 * i as f64 / (radius_steps - 1) as f64;
            (0..angle_steps).map(move |j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / angle_steps as f64;
                let z = Complex64::new(1.0, 0.0) + Complex64::from_polar(r, theta);
                (lemma1_gap_unchecked(1.0, z), i * angle_steps + j, z)
            })
        })
        .reduce(|| (f64::INFINITY, usize::MAX, Complex64::new(0.0, 0.0)), better);
    Ok(ScanSummary {
        min_gap,
        argmin_z: [z.re, z.im],
        steps: [radius_steps, angle_steps],
    })
}

/// Minimum gap over `samples` admissible points drawn uniformly from the
/// disk `|z − w| ≤ w/2` with `w` log-uniform in `[1e−3, 1e3]`. The reported
/// minimiser is rescaled to `w = 1`.
pub fn lemma1_random(samples: usize, seed: u64) -> Result<ScanSummary> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    const CHUNK: usize = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let (min_gap, _, z) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let start = c * CHUNK;
            let end = (start + CHUNK).min(samples);
            let mut best = (f64::INFINITY, usize::MAX, Complex64::new(0.0, 0.0));
            for idx in start..end {
                let w = 10f64.powf(rng.gen_range(-3.0..=3.0));
                let r = 0.5 * w * rng.gen::<f64>().sqrt();
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let z = Complex64::new(w, 0.0) + Complex64::from_polar(r, theta);
                // Quadratic homogeneity: normalise to w = 1 for comparability.
                let gap = lemma1_gap_unchecked(w, z) / (w * w);
                best = better(best, (gap, idx, z / w));
            }
            best
        })
        .reduce(|| (f64::INFINITY, usize::MAX, Complex64::new(0.0, 0.0)), better);
    Ok(ScanSummary {
        min_gap,
        argmin_z: [z.re, z.im],
        steps: [samples, 0],
    })
}

/// `X/y²` from the squared form of the inequality with `w = 1`,
/// `z = (1 + x) + iy`:
/// `y² + 8s + 4x + 4x²y² + 8xs + 4y²s` where `s = √(x² + y²)`.
pub fn factored_residual(x: f64, y: f64) -> f64 {
    let s = x.hypot(y);
    y * y + 8.0 * s + 4.0 * x + 4.0 * x * x * y * y + 8.0 * x * s + 4.0 * y * y * s
}

/// Minimum of [`factored_residual`] over a polar grid of the disk `r ≤ 1/2`.
pub fn factored_residual_scan(radius_steps: usize, angle_steps: usize) -> Result<f64> {
    if radius_steps < 2 || angle_steps < 2 {
        return Err(Error::InvalidParameter("scan needs at least 2 steps per direction".into()));
    }
    Ok((0..radius_steps)
        .into_par_iter()
        .map(|i| {
            let r = 0.5 * i as f64 / (radius_steps - 1) as f64;
            (0..angle_steps)
                .map(|j| {
                    let theta = std::f64::consts::TAU * j as f64 / angle_steps as f64;
                    factored_residual(r * theta.cos(), r * theta.sin())
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min))
}

/// Splits `ĝ − f̂` along `f̂/|f̂|` and `i·f̂/|f̂|`.
pub fn decompose(fhat: Complex64, ghat: Complex64) -> Result<Decomposition> {
    let modulus = fhat.norm();
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(Error::Inadmissible(
            "f̂ must be nonzero for the radial direction to be defined".into(),
        ));
    }
    let d = fhat.conj() / modulus * (ghat - fhat);
    Ok(Decomposition { a: d.re, b: d.im })
}

/// `Im(conj(f̂)/|f̂| · ĝ)`, the tangential component of `ĝ`.
pub fn tangential_component(fhat: Complex64, ghat: Complex64) -> f64 {
    let modulus = fhat.norm();
    if modulus == 0.0 {
        0.0
    } else {
        (fhat.conj() / modulus * ghat).im
    }
}

/// RHS − LHS of `|f̂−ĝ|² ≤ ||f̂|−|ĝ||² + (6/5)·|Im(conj(f̂)/|f̂|·ĝ)|²`,
/// valid when `|f̂| ≥ 10ε` and `|f̂ − ĝ| ≤ ε`.
pub fn pointwise_first_term_check(fhat: Complex64, ghat: Complex64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let fm = fhat.norm();
    let diff = (fhat - ghat).norm();
    if fm < 10.0 * epsilon * (1.0 - BOUNDARY_RTOL) || diff > epsilon * (1.0 + BOUNDARY_RTOL) {
        return Err(Error::Inadmissible(format!(
            "need |f̂| >= 10ε and |f̂ - ĝ| <= ε; got |f̂|={fm}, |f̂-ĝ|={diff}, ε={epsilon}"
        )));
    }
    let radial = fm - ghat.norm();
    let b = tangential_component(fhat, ghat);
    Ok(radial * radial + TANGENTIAL_WEIGHT * b * b - diff * diff)
}
