//! Uniform grids, rectangle-rule Lᵖ quadrature and the continuous-transform
//! approximation `f̂(ξ) = ∫ f(x) e^{−2πi x·ξ} dx`.
//!
//! Space samples sit at `x_j = −T + j·Δx`, `j = 0..N`, with `Δx = 2T/N`, so
//! index `N/2` is the origin. The dual grid has `Δξ = 1/(N·Δx)` and the same
//! zero-centered layout; its Nyquist frequency `−N/2·Δξ` is the first sample.
//! With this scaling the discrete transform is an isometry between
//! `ℓ²(Δx)` and `ℓ²(Δξ)`, and `sup|F| ≤ Σ|f|·Δx`, so Plancherel and
//! Hausdorff–Young hold with constant 1 on the grid as well.

use std::marker::PhantomData;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Largest dimension supported by the grid layer.
pub const MAX_DIMENSION: usize = 3;

/// Relative tolerance used when two grids built along different routes
/// (for example a spectrum file and a space file) are compared.
const LATTICE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    half_extent: f64,
    points: usize,
    // Stored rather than recomputed so that `dual` is an exact involution.
    dual_half_extent: f64,
}

impl Axis {
    fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    fn dual(&self) -> Axis {
        Axis {
            half_extent: self.dual_half_extent,
            points: self.points,
            dual_half_extent: self.half_extent,
        }
    }
}

/// A uniform lattice covering `[−T, T)` along each axis with `N` points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    /// Builds a grid from per-axis half extents and point counts.
    pub fn new(half_extent: &[f64], points_per_axis: &[usize]) -> Result<Self> {
        let dimension = half_extent.len();
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 1..={MAX_DIMENSION}, got {dimension}"
            )));
        }
        if points_per_axis.len() != dimension {
            return Err(Error::InvalidGrid(format!(
                "{} half extents but {} point counts",
                dimension,
                points_per_axis.len()
            )));
        }
        let mut axes = Vec::with_capacity(dimension);
        let mut total: usize = 1;
        for (&t, &n) in half_extent.iter().zip(points_per_axis) {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "half extent must be positive and finite, got {t}"
                )));
            }
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "points per axis must be a positive even integer, got {n}"
                )));
            }
            total = total
                .checked_mul(n)
                .filter(|&t| t <= isize::MAX as usize / std::mem::size_of::<Complex64>())
                .ok_or_else(|| Error::InvalidGrid("total point count overflows".into()))?;
            // Δξ = 1/(NΔx) = 1/(2T); dual half extent = N/2 · Δξ = N/(4T).
            let dual_half_extent = n as f64 / (4.0 * t);
            if !(dual_half_extent.is_finite() && dual_half_extent > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "dual half extent for T={t}, N={n} is not representable"
                )));
            }
            axes.push(Axis {
                half_extent: t,
                points: n,
                dual_half_extent,
            });
        }
        Ok(Self { axes })
    }

    /// Same half extent and point count along every axis.
    pub fn uniform(dimension: usize, half_extent: f64, points: usize) -> Result<Self> {
        Self::new(&vec![half_extent; dimension], &vec![points; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn half_extent(&self, axis: usize) -> f64 {
        self.axes[axis].half_extent
    }

    pub fn half_extents(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.half_extent).collect()
    }

    pub fn points(&self, axis: usize) -> usize {
        self.axes[axis].points
    }

    pub fn points_per_axis(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.axes[axis].spacing()
    }

    /// Total number of samples, `∏ N_a`.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of one sample, `∏ Δ_a`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Volume of the whole box, `∏ 2T_a`.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| 2.0 * a.half_extent).product()
    }

    /// The reciprocal lattice. `g.dual().dual() == g` holds exactly.
    pub fn dual(&self) -> GridSpec {
        GridSpec {
            axes: self.axes.iter().map(Axis::dual).collect(),
        }
    }

    /// Physical coordinate of index `idx` along `axis`.
    pub fn coordinate(&self, axis: usize, idx: usize) -> f64 {
        let a = &self.axes[axis];
        (idx as f64 - (a.points / 2) as f64) * a.spacing()
    }

    /// Fills `out` with the coordinates of the sample at row-major `flat`.
    pub fn coordinates_into(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for axis in (0..self.dimension()).rev() {
            let n = self.axes[axis].points;
            out[axis] = self.coordinate(axis, rem % n);
            rem /= n;
        }
    }

    /// Row-major index of the point `−x` (periodic wrap on the Nyquist row).
    pub fn reflected_index(&self, flat: usize) -> usize {
        let mut rem = flat;
        let mut out = 0;
        let mut stride = 1;
        for axis in (0..self.dimension()).rev() {
            let n = self.axes[axis].points;
            let i = rem % n;
            rem /= n;
            out += ((n - i) % n) * stride;
            stride *= n;
        }
        out
    }

    /// True when both grids describe the same lattice up to rounding.
    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.dimension() == other.dimension()
            && self.axes.iter().zip(&other.axes).all(|(a, b)| {
                a.points == b.points
                    && (a.half_extent - b.half_extent).abs()
                        <= LATTICE_RTOL * a.half_extent.max(b.half_extent)
            })
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "T={:?} N={:?} vs T={:?} N={:?}",
                self.half_extents(),
                self.points_per_axis(),
                other.half_extents(),
                other.points_per_axis()
            )))
        }
    }
}

/// Marker for a sampling domain.
pub trait Domain: Copy + std::fmt::Debug + PartialEq + Send + Sync + 'static {
    const NAME: &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Space;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency;

impl Domain for Space {
    const NAME: &'static str = "space";
}

impl Domain for Frequency {
    const NAME: &'static str = "frequency";
}

/// Complex samples on a grid, tagged with the domain they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples<D: Domain> {
    grid: GridSpec,
    values: Vec<Complex64>,
    domain: PhantomData<D>,
}

/// Samples of `f` or `g` in space.
pub type SampledFunction = Samples<Space>;

/// Samples of `f̂` or `ĝ` on the dual grid.
pub type Spectrum = Samples<Frequency>;

impl<D: Domain> Samples<D> {
    /// Validates length and finiteness.
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self::from_parts(grid, values))
    }

    fn from_parts(grid: GridSpec, values: Vec<Complex64>) -> Self {
        Self {
            grid,
            values,
            domain: PhantomData,
        }
    }

    /// Samples a closure at every grid point.
    pub fn from_fn<F>(grid: GridSpec, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        let mut coords = vec![0.0; grid.dimension()];
        let values = (0..grid.len())
            .map(|i| {
                grid.coordinates_into(i, &mut coords);
                f(&coords)
            })
            .collect();
        Self::new(grid, values)
    }

    /// Real-valued convenience wrapper around [`Samples::from_fn`].
    pub fn from_real_fn<F>(grid: GridSpec, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise map; the result is re-validated for finiteness.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(&Complex64) -> Complex64,
    {
        Self::new(self.grid.clone(), self.values.iter().map(f).collect())
    }

    /// Pointwise combination of two sample sets on the same lattice.
    pub fn zip_with<F>(&self, other: &Self, mut f: F) -> Result<Self>
    where
        F: FnMut(Complex64, Complex64) -> Complex64,
    {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `α·self + β·other`.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.zip_with(other, |a, b| alpha * a + beta * b)
    }

    pub fn scale(&self, factor: Complex64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    /// Largest sample modulus (0 for an all-zero set).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in modulus.
    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Samples at `−x`; reflection through the origin on the periodic lattice.
    pub fn reflect(&self) -> Self {
        let values = (0..self.len())
            .map(|i| self.values[self.grid.reflected_index(i)])
            .collect();
        Self::from_parts(self.grid.clone(), values)
    }
}

/// Rectangle-rule `‖·‖_p`: `(Δ-volume · Σ|v|ᵖ)^{1/p}`; `p = ∞` gives `max|v|`.
pub fn lp_norm<D: Domain>(samples: &Samples<D>, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("p must satisfy p >= 1, got {p}")));
    }
    Ok(lp_norm_of(samples.values().iter().map(|v| v.norm()), samples.grid().cell_volume(), p))
}

/// Lᵖ quadrature over an arbitrary stream of nonnegative magnitudes.
pub(crate) fn lp_norm_of<I>(magnitudes: I, cell_volume: f64, p: f64) -> f64
where
    I: Iterator<Item = f64>,
{
    if p.is_infinite() {
        return magnitudes.fold(0.0, f64::max);
    }
    if p == 1.0 {
        return cell_volume * magnitudes.sum::<f64>();
    }
    if p == 2.0 {
        return (cell_volume * magnitudes.map(|m| m * m).sum::<f64>()).sqrt();
    }
    // Rescale by the maximum to keep |v|ᵖ away from under/overflow.
    let mags: Vec<f64> = magnitudes.collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let sum: f64 = mags.iter().map(|m| (m / peak).powf(p)).sum();
    peak * (cell_volume * sum).powf(1.0 / p)
}

/// Approximates the continuous transform on the dual grid.
pub fn fourier_transform(f: &SampledFunction) -> Spectrum {
    let dual = f.grid().dual();
    let values = transform(f.values(), f.grid(), FftDirection::Forward);
    Spectrum::from_parts(dual, values)
}

/// Exact inverse of [`fourier_transform`].
pub fn inverse_transform(spectrum: &Spectrum) -> SampledFunction {
    let dual = spectrum.grid().dual();
    let values = transform(spectrum.values(), spectrum.grid(), FftDirection::Inverse);
    SampledFunction::from_parts(dual, values)
}

/// `f(· − offset)` realised spectrally, exact for band-limited inputs.
pub fn shift(f: &SampledFunction, offset: &[f64]) -> Result<SampledFunction> {
    let dim = f.grid().dimension();
    if offset.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "offset has {} components but the grid has dimension {dim}",
            offset.len()
        )));
    }
    if offset.iter().any(|o| !o.is_finite()) {
        return Err(Error::InvalidParameter("offset must be finite".into()));
    }
    let spectrum = fourier_transform(f);
    let mut xi = vec![0.0; dim];
    let grid = spectrum.grid().clone();
    let values = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            grid.coordinates_into(i, &mut xi);
            let phase: f64 = offset.iter().zip(&xi).map(|(o, x)| o * x).sum();
            v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase)
        })
        .collect();
    Ok(inverse_transform(&Spectrum::from_parts(grid, values)))
}

/// Separable n-D transform in the zero-centered layout. Each axis is
/// `fftshift ∘ DFT ∘ ifftshift`, scaled by the source spacing.
fn transform(input: &[Complex64], grid: &GridSpec, direction: FftDirection) -> Vec<Complex64> {
    let mut data = input.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let total = grid.len();
    let mut stride = total;
    for axis in 0..grid.dimension() {
        let n = grid.points(axis);
        stride /= n;
        let scale = grid.spacing(axis);
        let fft = planner.plan_fft(n, direction);
        let mut lane = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (k, slot) in lane.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                // N is even, so ifftshift and fftshift are both a rotation by N/2.
                lane.rotate_left(n / 2);
                fft.process_with_scratch(&mut lane, &mut scratch);
                lane.rotate_left(n / 2);
                for (k, v) in lane.iter().enumerate() {
                    data[start + k * stride] = v * scale;
                }
            }
        }
    }
    data
}
