//! Parameter sweeps reproducing the scaling behaviour of the estimate, each
//! summarised by an ordinary-least-squares fit in log-log coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    evaluate_corollary1_with_spectra, evaluate_theorem_with_spectra, h_f, modulus_term, spectral_tail,
    translation_term, BoundReport, TailParams, Tolerance,
};
use crate::error::{Error, Result};
use crate::families::{bump_spectrum, triangle_spectrum, triangle_tail_flip};
use crate::grid::{fourier_transform, inverse_transform, lp_norm, lp_norm_of, shift, GridSpec, SampledFunction, Spectrum};

/// Exponents at which every generated pair is certified as a side condition.
pub const CERTIFICATION_EXPONENTS: [f64; 4] = [1.0, 1.25, 1.5, 1.75];

/// Multiplicative certification tolerance, `slack ≥ −CERTIFICATION_RTOL·rhs`.
pub const CERTIFICATION_RTOL: f64 = 1e-6;

pub const OPTIMALITY_SLOPE_TOL: f64 = 0.1;
pub const TRIANGLE_SLOPE_TOL: f64 = 0.15;
pub const TRANSLATION_SLOPE_TOL: f64 = 0.05;
pub const TAIL_SLOPE_TOL: f64 = 0.1;

/// Relative agreement required between the translation term and
/// `2‖f̂·sin(2πεξ)‖₂`.
pub const TRANSLATION_IDENTITY_RTOL: f64 = 1e-8;

/// Upper bound on the modulus term for exact translates.
pub const TRANSLATION_MODULUS_ATOL: f64 = 1e-10;

/// Largest odd or imaginary component tolerated in an "even" perturbation.
pub const EVENNESS_ATOL: f64 = 1e-8;

/// `n` log-spaced values from `start` to `end` inclusive.
pub fn log_space(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), end.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// OLS fit of `log y = intercept + slope·log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

/// Fits the strictly positive `(x, y)` pairs; at least four are required.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("parameter and observable lists differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("log-log fit needs at least 4 positive points, got {n}")));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("log-log fit needs at least two distinct parameters".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = (ssr / (n - 2) as f64 / sxx).sqrt();
    Ok(LogLogFit {
        slope,
        intercept,
        slope_stderr,
        points: n,
    })
}

/// A fitted power law for one observable of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub name: String,
    pub parameter_values: Vec<f64>,
    pub observable_values: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub expected_slope: f64,
    pub slope_tolerance: f64,
    pub pass: bool,
}

impl ScalingResult {
    pub fn fit(
        name: impl Into<String>,
        parameter_values: Vec<f64>,
        observable_values: Vec<f64>,
        expected_slope: f64,
        slope_tolerance: f64,
    ) -> Result<Self> {
        let fit = fit_loglog(&parameter_values, &observable_values)?;
        Ok(Self {
            name: name.into(),
            parameter_values,
            observable_values,
            fitted_slope: fit.slope,
            slope_stderr: fit.slope_stderr,
            intercept: fit.intercept,
            expected_slope,
            slope_tolerance,
            pass: (fit.slope - expected_slope).abs() <= slope_tolerance,
        })
    }

    /// `exp(intercept)·xᵅ` at every parameter value.
    pub fn fitted_values(&self) -> Vec<f64> {
        self.parameter_values
            .iter()
            .map(|x| (self.intercept + self.fitted_slope * x.ln()).exp())
            .collect()
    }
}

/// Certifies `(f, g)` at every exponent in [`CERTIFICATION_EXPONENTS`].
pub fn certify_pair(
    f: &SampledFunction,
    g: &SampledFunction,
    fhat: &Spectrum,
    ghat: &Spectrum,
) -> Result<Vec<BoundReport>> {
    CERTIFICATION_EXPONENTS
        .iter()
        .map(|&p| evaluate_theorem_with_spectra(f, g, fhat, ghat, p, Tolerance::default()))
        .collect()
}

fn all_certified(reports: &[BoundReport]) -> bool {
    reports.iter().all(|r| r.is_certified(CERTIFICATION_RTOL))
}

/// `f̂ = (1/L)φ(ξ/L)` and `ĝ = −f̂`, returned in space.
pub fn optimality_family(grid: &GridSpec, scale: f64) -> Result<(SampledFunction, SampledFunction)> {
    let reach = (0..grid.dimension()).map(|a| grid.dual().half_extent(a)).fold(f64::INFINITY, f64::min);
    if scale >= reach {
        return Err(Error::InvalidParameter(format!(
            "bump of scale {scale} does not fit in a dual half extent of {reach}"
        )));
    }
    let f = inverse_transform(&bump_spectrum(grid, scale)?);
    let g = f.scale(Complex64::new(-1.0, 0.0))?;
    Ok((f, g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityConfig {
    pub half_extent: f64,
    pub points: usize,
    pub scales: Vec<f64>,
}

impl Default for OptimalityConfig {
    fn default() -> Self {
        // Dual half extent 256 covers L = 64 with room to spare; Δx = 1/512
        // leaves 8 cells across the narrowest profile.
        Self {
            half_extent: 16.0,
            points: 16384,
            scales: vec![4.0, 8.0, 16.0, 32.0, 64.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub config: OptimalityConfig,
    /// `‖f − g‖₂` against `L`; expected slope −1/2.
    pub l2: ScalingResult,
    /// `‖f − g‖₁` against `L`; expected slope −1.
    pub l1: ScalingResult,
    /// Band-limited right-hand side over `‖f − g‖₂` at each `L`.
    pub corollary1_ratios: Vec<f64>,
    /// `max/min` of the ratios; near 1 when the ratio is scale-free.
    pub ratio_spread: f64,
    pub corollary1_certified: bool,
    pub theorem_certified: bool,
    pub pass: bool,
}

/// Spread allowed in the band-limited ratio before it is considered
/// `L`-dependent.
pub const RATIO_SPREAD_TOL: f64 = 1.1;

pub fn optimality_experiment(config: &OptimalityConfig) -> Result<OptimalityReport> {
    let grid = GridSpec::uniform(1, config.half_extent, config.points)?;
    let mut l2 = Vec::new();
    let mut l1 = Vec::new();
    let mut ratios = Vec::new();
    let mut theorem_ok = true;
    let mut corollary_ok = true;
    for &scale in &config.scales {
        let (f, g) = optimality_family(&grid, scale)?;
        let fhat = fourier_transform(&f);
        let ghat = fourier_transform(&g);
        let diff = f.sub(&g)?;
        l2.push(lp_norm(&diff, 2.0)?);
        l1.push(lp_norm(&diff, 1.0)?);
        let c = evaluate_corollary1_with_spectra(&f, &g, &fhat, &ghat, Tolerance::default())?;
        corollary_ok &= c.slack >= -CERTIFICATION_RTOL * c.rhs;
        ratios.push(c.rhs / c.lhs);
        theorem_ok &= all_certified(&certify_pair(&f, &g, &fhat, &ghat)?);
    }
    let l2 = ScalingResult::fit("optimality_l2", config.scales.clone(), l2, -0.5, OPTIMALITY_SLOPE_TOL)?;
    let l1 = ScalingResult::fit("optimality_l1", config.scales.clone(), l1, -1.0, OPTIMALITY_SLOPE_TOL)?;
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_spread = max / min;
    let pass = l2.pass && l1.pass && theorem_ok && corollary_ok && ratio_spread <= RATIO_SPREAD_TOL;
    Ok(OptimalityReport {
        config: config.clone(),
        l2,
        l1,
        corollary1_ratios: ratios,
        ratio_spread,
        corollary1_certified: corollary_ok,
        theorem_certified: theorem_ok,
        pass,
    })
}

/// Rejects `g` unless it is real and even to [`EVENNESS_ATOL`].
pub fn check_even_real(g: &SampledFunction) -> Result<()> {
    let imag = g.max_abs_imag();
    let odd = 0.5 * g.sub(&g.reflect())?.max_abs();
    if imag > EVENNESS_ATOL || odd > EVENNESS_ATOL {
        return Err(Error::Hypothesis(format!(
            "perturbation must be real and even: max|Im g| = {imag:e}, max|odd part| = {odd:e}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleConfig {
    pub half_extent: f64,
    pub points: usize,
    /// Small amplitudes, fitted for the super-linear exponent.
    pub amplitudes: Vec<f64>,
    /// Large amplitudes, used for the crossover of the bound.
    pub large_amplitudes: Vec<f64>,
    /// Half width of the sign switch relative to the amplitude.
    pub switch_width: f64,
}

impl Default for TriangleConfig {
    fn default() -> Self {
        // Δξ = 1/2048 puts ≥ 8 cells across the narrowest switch (0.02·0.4).
        Self {
            half_extent: 1024.0,
            points: 32768,
            amplitudes: log_space(0.02, 0.2, 8),
            large_amplitudes: vec![0.3, 0.45, 0.6, 0.75, 0.9],
            switch_width: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub config: TriangleConfig,
    /// `‖f−g‖₂ − 2‖|f̂|−|ĝ|‖₂` against `‖f−g‖₁`; expected slope 3/2.
    pub excess: ScalingResult,
    /// `h_f(‖f−g‖₁)` at the large amplitudes.
    pub large_amplitude_bound: Vec<f64>,
    pub large_amplitude_epsilon: Vec<f64>,
    /// Log-log slope of the bound over the large amplitudes; at most 1.
    pub large_amplitude_slope: f64,
    /// `h_f(0.05)` for the triangle, closed form `√(2/3)`.
    pub h_f_at_0_05: f64,
    pub theorem_certified: bool,
    pub pass: bool,
}

/// `f̂ = max{0, 1−|ξ|}` against even real perturbations that smoothly flip
/// the sign of its sub-level tail.
pub fn triangle_experiment(config: &TriangleConfig) -> Result<TriangleReport> {
    let grid = GridSpec::uniform(1, config.half_extent, config.points)?;
    let fhat = triangle_spectrum(&grid)?;
    let f = inverse_transform(&fhat);

    let evaluate = |amplitude: f64| -> Result<(f64, f64, f64, bool)> {
        let ghat_exact = if amplitude == 0.0 {
            fhat.clone()
        } else {
            triangle_tail_flip(&grid, amplitude, config.switch_width)?
        };
        let g = inverse_transform(&ghat_exact);
        check_even_real(&g)?;
        let ghat = fourier_transform(&g);
        let diff = f.sub(&g)?;
        let lhs = lp_norm(&diff, 2.0)?;
        let eps = lp_norm(&diff, 1.0)?;
        let excess = lhs - modulus_term(&fhat, &ghat)?;
        let bound = h_f(&fhat, eps, 1.0)?;
        let certified = all_certified(&certify_pair(&f, &g, &fhat, &ghat)?);
        Ok((eps, excess, bound, certified))
    };

    let mut certified = true;
    let mut eps_small = Vec::new();
    let mut excess_small = Vec::new();
    for &a in &config.amplitudes {
        let (eps, excess, _, ok) = evaluate(a)?;
        certified &= ok;
        eps_small.push(eps);
        excess_small.push(excess);
    }
    let mut eps_large = Vec::new();
    let mut bound_large = Vec::new();
    for &a in &config.large_amplitudes {
        let (eps, _, bound, ok) = evaluate(a)?;
        certified &= ok;
        eps_large.push(eps);
        bound_large.push(bound);
    }
    let excess = ScalingResult::fit("triangle_excess", eps_small, excess_small, 1.5, TRIANGLE_SLOPE_TOL)?;
    let large_amplitude_slope = if bound_large.len() >= 4 {
        fit_loglog(&eps_large, &bound_large)?.slope
    } else {
        f64::NAN
    };
    let h_f_at_0_05 = h_f(&fhat, 0.05, 1.0)?;
    let pass = excess.pass && certified && large_amplitude_slope <= 1.0;
    Ok(TriangleReport {
        config: config.clone(),
        excess,
        large_amplitude_bound: bound_large,
        large_amplitude_epsilon: eps_large,
        large_amplitude_slope,
        h_f_at_0_05,
        theorem_certified: certified,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    /// `‖f − f(·−ε)‖₂` against `ε`; expected slope 1.
    pub lhs: ScalingResult,
    pub translation_terms: Vec<f64>,
    /// Largest relative deviation from `2‖f̂·sin(2πεξ₁)‖₂`.
    pub max_identity_rel_error: f64,
    pub max_term_modulus: f64,
    pub theorem_certified: bool,
    pub pass: bool,
}

/// Default translation sweep: nine log-spaced offsets in `[1e−3, 1e−1]`.
pub fn default_translation_sweep() -> Vec<f64> {
    log_space(1e-3, 1e-1, 9)
}

/// Unit-width Gaussian on the default 1-D grid (`T = 16`, `N = 1024`).
pub fn default_translation_input(half_extent: f64, points: usize) -> Result<SampledFunction> {
    let grid = GridSpec::uniform(1, half_extent, points)?;
    SampledFunction::from_real_fn(grid, |x| (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp())
}

/// Translates `f` along the first axis by each `ε` and checks the
/// translation-term identity and the linear growth of `‖f − g‖₂`.
pub fn translation_experiment(f: &SampledFunction, epsilons: &[f64]) -> Result<TranslationReport> {
    let dim = f.grid().dimension();
    let fhat = fourier_transform(f);
    let zero_tol = Tolerance::default().resolve(&fhat)?;
    let mut lhs = Vec::new();
    let mut terms = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut max_mod: f64 = 0.0;
    let mut certified = true;
    for &eps in epsilons {
        let mut offset = vec![0.0; dim];
        offset[0] = eps;
        let g = shift(f, &offset)?;
        let ghat = fourier_transform(&g);
        let term = translation_term(&fhat, &ghat, zero_tol)?;
        let oracle = 2.0
            * lp_norm_of(
                fhat.values().iter().enumerate().map(|(k, v)| {
                    let mut xi = vec![0.0; dim];
                    fhat.grid().coordinates_into(k, &mut xi);
                    (v.norm() * (2.0 * PI * eps * xi[0]).sin()).abs()
                }),
                fhat.grid().cell_volume(),
                2.0,
            );
        let rel = if oracle == 0.0 { term } else { (term - oracle).abs() / oracle };
        max_rel = max_rel.max(rel);
        max_mod = max_mod.max(modulus_term(&fhat, &ghat)?);
        lhs.push(lp_norm(&f.sub(&g)?, 2.0)?);
        terms.push(term);
        certified &= all_certified(&certify_pair(f, &g, &fhat, &ghat)?);
    }
    let lhs = ScalingResult::fit("translation_lhs", epsilons.to_vec(), lhs, 1.0, TRANSLATION_SLOPE_TOL)?;
    let pass = lhs.pass && max_rel <= TRANSLATION_IDENTITY_RTOL && max_mod <= TRANSLATION_MODULUS_ATOL && certified;
    Ok(TranslationReport {
        lhs,
        translation_terms: terms,
        max_identity_rel_error: max_rel,
        max_term_modulus: max_mod,
        theorem_certified: certified,
        pass,
    })
}

/// Space grid whose dual resolves `(1+|ξ|^k)⁻¹` over the default sweep.
pub fn default_tail_grid(params: TailParams) -> Result<GridSpec> {
    // (dual half extent, points per axis)
    let (reach, points) = match params.n {
        1 => (2048.0, 262_144),
        2 => (64.0, 1024),
        3 => (32.0, 256),
        n => return Err(Error::InvalidParameter(format!("no default tail grid for dimension {n}"))),
    };
    GridSpec::uniform(params.n as usize, points as f64 / (4.0 * reach), points)
}

pub fn default_tail_sweep() -> Vec<f64> {
    log_space(1e-4, 1e-2, 9)
}

/// Spectral-tail sweep for `f̂(ξ) = (1 + |ξ|^k)⁻¹`, built in frequency.
pub fn tail_experiment(params: TailParams, epsilons: &[f64], grid: &GridSpec) -> Result<ScalingResult> {
    if grid.dimension() != params.n as usize {
        return Err(Error::GridMismatch(format!(
            "tail experiment for n={} on a grid of dimension {}",
            params.n,
            grid.dimension()
        )));
    }
    let k = params.k as i32;
    let spectrum = Spectrum::from_real_fn(grid.dual(), |xi| {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        1.0 / (1.0 + r.powi(k))
    })?;
    let tails: Vec<f64> = epsilons.iter().map(|&e| spectral_tail(&spectrum, e)).collect();
    ScalingResult::fit(
        format!("tail_k{}_n{}", params.k, params.n),
        epsilons.to_vec(),
        tails,
        params.tail_exponent(),
        TAIL_SLOPE_TOL,
    )
}
