//! Term-by-term evaluation of the stability estimate
//!
//! ```text
//! ‖f−g‖₂ ≤ 2‖|f̂|−|ĝ|‖₂ + h_f(‖f−g‖_p) + 2‖Im(conj(f̂)|f̂|⁻¹ĝ)‖₂
//! h_f(x) = (8 ∫_{|f̂| ≤ 10x} |f̂|²)^{1/2} + [p > 1]·x
//! ```
//!
//! together with the squared form it is assembled from, the band-limited
//! variant with `30√L·‖f−g‖₁`, and the proof-internal quantities (exceptional
//! set, spectral tail).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tangential_component, TANGENTIAL_WEIGHT};
use crate::grid::{fourier_transform, lp_norm, lp_norm_of, SampledFunction, Spectrum};

/// Constant in front of the band-limited `L¹` term.
pub const BAND_LIMITED_CONSTANT: f64 = 30.0;

/// Relative tolerance on `max|Im f̂|` for the real-spectrum hypothesis.
pub const REAL_SPECTRUM_RTOL: f64 = 1e-8;

/// A threshold that is either absolute or a fraction of `max|f̂|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Absolute(f64),
    RelativeToPeak(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::RelativeToPeak(1e-12)
    }
}

impl Tolerance {
    pub fn resolve(&self, spectrum: &Spectrum) -> Result<f64> {
        let value = match *self {
            Tolerance::Absolute(t) => t,
            Tolerance::RelativeToPeak(r) => r * spectrum.max_abs(),
        };
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be nonnegative and finite, got {value}"
            )));
        }
        Ok(value)
    }
}

/// Every term of the estimate for one `(f, g, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    /// `‖f − g‖_p`
    pub epsilon: f64,
    /// `‖f − g‖₂`
    pub lhs: f64,
    /// `2‖|f̂| − |ĝ|‖₂`
    pub term_modulus: f64,
    /// `h_f(ε)`
    pub term_smoothness: f64,
    /// `2‖Im(conj(f̂)|f̂|⁻¹ĝ)‖₂`
    pub term_translation: f64,
    pub rhs: f64,
    pub slack: f64,
    /// RHS − LHS of the squared form
    /// `‖f−g‖₂² ≤ 2‖|f̂|−|ĝ|‖₂² + (6/5)‖Im(…)‖₂² + [p>1]ε² + 8∫_{|f̂|≤10ε}|f̂|²`.
    pub squared_form_slack: f64,
}

impl BoundReport {
    pub fn squared_rhs(&self) -> f64 {
        self.lhs * self.lhs + self.squared_form_slack
    }

    /// Both forms hold up to `rel_tol` times their right-hand sides.
    pub fn is_certified(&self, rel_tol: f64) -> bool {
        self.slack >= -rel_tol * self.rhs && self.squared_form_slack >= -rel_tol * self.squared_rhs()
    }
}

/// Band-limited, real-spectrum variant of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corollary1Report {
    /// Measure of `{f̂ ≠ 0}` at the chosen tolerance.
    pub support_measure: f64,
    /// `‖f − g‖₁`
    pub epsilon: f64,
    pub lhs: f64,
    pub term_modulus: f64,
    /// `30·√L·‖f − g‖₁`
    pub term_smoothness: f64,
    /// `2‖Im ĝ‖₂`
    pub term_translation: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Hypothesis `k > (n + 2)/2` of the smoothness variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailParams {
    pub k: u32,
    pub n: u32,
}

impl TailParams {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if n == 0 || 2 * k <= n + 2 {
            return Err(Error::Hypothesis(format!(
                "derivative order must satisfy k > (n + 2)/2, got k={k}, n={n}"
            )));
        }
        Ok(Self { k, n })
    }

    /// `2 − n/k`, the exponent of the spectral tail.
    pub fn tail_exponent(&self) -> f64 {
        2.0 - self.n as f64 / self.k as f64
    }

    /// `1 − n/(2k)`, the Hölder exponent of the `L¹` term.
    pub fn holder_exponent(&self) -> f64 {
        1.0 - self.n as f64 / (2.0 * self.k as f64)
    }
}

/// Frequencies where `|f̂|` is large yet `ĝ` is far from `f̂`; `mask` is
/// indexed like the spectrum samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSet {
    pub measure: f64,
    pub mask: Vec<bool>,
}

impl ExceptionalSet {
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }
}

fn check_p(p: f64) -> Result<()> {
    if (1.0..2.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("p must lie in [1, 2), got {p}")))
    }
}

/// `∫_{|f̂| ≤ t} |f̂|²`, ties included.
fn sublevel_mass(spectrum: &Spectrum, threshold: f64) -> f64 {
    let sum: f64 = spectrum
        .values()
        .iter()
        .map(|v| v.norm_sqr())
        .filter(|&m2| m2.sqrt() <= threshold)
        .sum();
    sum * spectrum.grid().cell_volume()
}

/// The smoothness modulus `h_f(x)`.
pub fn h_f(spectrum: &Spectrum, x: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x must be nonnegative, got {x}")));
    }
    let branch = if p > 1.0 { x } else { 0.0 };
    Ok((8.0 * sublevel_mass(spectrum, 10.0 * x)).sqrt() + branch)
}

/// `∫_{|f̂| ≤ 10ε} |f̂|²`.
pub fn spectral_tail(spectrum: &Spectrum, epsilon: f64) -> f64 {
    sublevel_mass(spectrum, 10.0 * epsilon)
}

/// `2‖|f̂| − |ĝ|‖₂`.
pub fn modulus_term(fhat: &Spectrum, ghat: &Spectrum) -> Result<f64> {
    fhat.grid().ensure_same(ghat.grid())?;
    let norm = lp_norm_of(
        fhat.values().iter().zip(ghat.values()).map(|(a, b)| (a.norm() - b.norm()).abs()),
        fhat.grid().cell_volume(),
        2.0,
    );
    Ok(2.0 * norm)
}

/// `‖Im(conj(f̂)|f̂|⁻¹ĝ)‖₂`, integrand zero where `|f̂| ≤ zero_tol`.
fn tangential_norm(fhat: &Spectrum, ghat: &Spectrum, zero_tol: f64) -> Result<f64> {
    fhat.grid().ensure_same(ghat.grid())?;
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("zero_tol must be nonnegative, got {zero_tol}")));
    }
    Ok(lp_norm_of(
        fhat.values().iter().zip(ghat.values()).map(|(&f, &g)| {
            if f.norm() <= zero_tol {
                0.0
            } else {
                tangential_component(f, g).abs()
            }
        }),
        fhat.grid().cell_volume(),
        2.0,
    ))
}

/// `2‖Im(conj(f̂)|f̂|⁻¹ĝ)‖₂`.
pub fn translation_term(fhat: &Spectrum, ghat: &Spectrum, zero_tol: f64) -> Result<f64> {
    Ok(2.0 * tangential_norm(fhat, ghat, zero_tol)?)
}

/// Measure of `X = {|f̂| ≥ 10ε, |f̂ − ĝ| > ε}`.
///
/// Points with `|f̂ − ĝ| = ε` exactly are counted with the first-term region,
/// which the pointwise estimate already covers; a relative guard of `1e−12`
/// absorbs rounding in `‖f̂−ĝ‖_∞ ≤ ‖f−g‖₁`.
pub fn exceptional_set(fhat: &Spectrum, ghat: &Spectrum, epsilon: f64) -> Result<ExceptionalSet> {
    fhat.grid().ensure_same(ghat.grid())?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let mask: Vec<bool> = fhat
        .values()
        .iter()
        .zip(ghat.values())
        .map(|(&f, &g)| f.norm() >= 10.0 * epsilon && (f - g).norm() > epsilon * (1.0 + 1e-12))
        .collect();
    let count = mask.iter().filter(|&&m| m).count();
    Ok(ExceptionalSet {
        measure: count as f64 * fhat.grid().cell_volume(),
        mask,
    })
}

/// Volume of `{|f̂| > support_tol}`.
pub fn support_measure(spectrum: &Spectrum, support_tol: f64) -> f64 {
    let count = spectrum.values().iter().filter(|v| v.norm() > support_tol).count();
    count as f64 * spectrum.grid().cell_volume()
}

/// `((Re z)⁴ + (Im z)⁴)^{1/4}`.
pub fn quartic_modulus(z: Complex64) -> f64 {
    (z.re.powi(4) + z.im.powi(4)).sqrt().sqrt()
}

/// Evaluates the estimate and its squared form for `f`, `g` on one grid.
pub fn evaluate_theorem(f: &SampledFunction, g: &SampledFunction, p: f64, zero_tol: Tolerance) -> Result<BoundReport> {
    check_p(p)?;
    f.grid().ensure_same(g.grid())?;
    let fhat = fourier_transform(f);
    let ghat = fourier_transform(g);
    evaluate_theorem_with_spectra(f, g, &fhat, &ghat, p, zero_tol)
}

/// As [`evaluate_theorem`] with precomputed transforms.
pub fn evaluate_theorem_with_spectra(
    f: &SampledFunction,
    g: &SampledFunction,
    fhat: &Spectrum,
    ghat: &Spectrum,
    p: f64,
    zero_tol: Tolerance,
) -> Result<BoundReport> {
    check_p(p)?;
    let diff = f.sub(g)?;
    fhat.grid().ensure_same(ghat.grid())?;
    let zero_tol = zero_tol.resolve(fhat)?;

    let epsilon = lp_norm(&diff, p)?;
    let lhs = lp_norm(&diff, 2.0)?;
    let term_modulus = modulus_term(fhat, ghat)?;
    let tail = spectral_tail(fhat, epsilon);
    let branch = if p > 1.0 { epsilon } else { 0.0 };
    let term_smoothness = (8.0 * tail).sqrt() + branch;
    let tangential = tangential_norm(fhat, ghat, zero_tol)?;
    let term_translation = 2.0 * tangential;
    let rhs = term_modulus + term_smoothness + term_translation;

    let modulus_half = 0.5 * term_modulus;
    let squared_rhs =
        2.0 * modulus_half * modulus_half + TANGENTIAL_WEIGHT * tangential * tangential + branch * branch + 8.0 * tail;

    Ok(BoundReport {
        p,
        epsilon,
        lhs,
        term_modulus,
        term_smoothness,
        term_translation,
        rhs,
        slack: rhs - lhs,
        squared_form_slack: squared_rhs - lhs * lhs,
    })
}

/// Band-limited variant; requires `f̂` real to `1e−8·max|f̂|`.
pub fn evaluate_corollary1(f: &SampledFunction, g: &SampledFunction, support_tol: Tolerance) -> Result<Corollary1Report> {
    f.grid().ensure_same(g.grid())?;
    let fhat = fourier_transform(f);
    let ghat = fourier_transform(g);
    evaluate_corollary1_with_spectra(f, g, &fhat, &ghat, support_tol)
}

pub fn evaluate_corollary1_with_spectra(
    f: &SampledFunction,
    g: &SampledFunction,
    fhat: &Spectrum,
    ghat: &Spectrum,
    support_tol: Tolerance,
) -> Result<Corollary1Report> {
    let peak = fhat.max_abs();
    let imag = fhat.max_abs_imag();
    if imag > REAL_SPECTRUM_RTOL * peak {
        return Err(Error::Hypothesis(format!(
            "real-valued Fourier transform required: max|Im f̂| = {imag:e} exceeds {REAL_SPECTRUM_RTOL:e}·max|f̂|"
        )));
    }
    let diff = f.sub(g)?;
    let measure = support_measure(fhat, support_tol.resolve(fhat)?);
    let epsilon = lp_norm(&diff, 1.0)?;
    let lhs = lp_norm(&diff, 2.0)?;
    let term_modulus = modulus_term(fhat, ghat)?;
    let term_smoothness = BAND_LIMITED_CONSTANT * measure.sqrt() * epsilon;
    let term_translation = 2.0 * lp_norm_of(ghat.values().iter().map(|v| v.im.abs()), ghat.grid().cell_volume(), 2.0);
    let rhs = term_modulus + term_smoothness + term_translation;
    Ok(Corollary1Report {
        support_measure: measure,
        epsilon,
        lhs,
        term_modulus,
        term_smoothness,
        term_translation,
        rhs,
        slack: rhs - lhs,
    })
}
