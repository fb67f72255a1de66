//! Uniform periodic grids on `[-L, L)²`, complex fields sampled on them, and the
//! discrete stand-in for the continuum Fourier transform
//! `û(k) = ∫ e^{-ik·x} u(x) dx`.
//!
//! Fields are stored row-major with the row index running over `y` and the
//! column index over `x`. Spectra are stored in FFT order: index `l` along an
//! axis maps to the wavenumber `π·s(l)/L`, where `s(l) = l` for `l < n/2` and
//! `l - n` otherwise.
//!
//! The transform pair carries the continuum measure factors (`dx²` forward,
//! `dk²/(2π)²` inverse), so spectral formulas transcribe literally.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type Complex = Complex64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// A square periodic grid with `n` points per axis on `[-L, L)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid("n must be even".into()));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n must be at least 8, got {n}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width L must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of grid points, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Wavenumber spacing `π / L`.
    pub fn dk(&self) -> f64 {
        PI / self.half_width
    }

    /// Magnitude of the most negative (Nyquist) wavenumber, `π / dx`.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Coordinate of the `i`-th grid point along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    /// Wavenumber of FFT-order index `l`.
    pub fn wavenumber(&self, l: usize) -> f64 {
        let n = self.n as isize;
        let s = if (l as isize) < n / 2 { l as isize } else { l as isize - n };
        s as f64 * self.dk()
    }

    /// All wavenumbers along one axis, in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|l| self.wavenumber(l)).collect()
    }

    /// Polar coordinates `(r, θ)` of the point in row `row` (y) and column `col` (x).
    pub fn polar(&self, row: usize, col: usize) -> (f64, f64) {
        let x = self.coord(col);
        let y = self.coord(row);
        (x.hypot(y), y.atan2(x))
    }
}

/// Convenience constructor mirroring [`GridSpec::new`].
pub fn make_grid(n: usize, half_width: f64) -> Result<GridSpec> {
    GridSpec::new(n, half_width)
}

/// A complex scalar field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: GridSpec,
    values: Vec<Complex>,
}

impl ComplexField2D {
    pub fn new(grid: GridSpec, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<Complex>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for row in 0..n {
            let y = grid.coord(row);
            for col in 0..n {
                values.push(f(grid.coord(col), y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }

    pub fn at(&self, row: usize, col: usize) -> Complex {
        self.values[row * self.grid.n() + col]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.is_finite())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Discrete `(∫|u|² dx)^{1/2}`.
    pub fn norm(&self) -> f64 {
        power(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖ / ‖other‖`.
    pub fn relative_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.norm() / other.norm())
    }

    /// Discrete `∫ u dx`.
    pub fn integral(&self) -> Complex {
        let dx = self.grid.dx();
        self.values.iter().sum::<Complex>() * (dx * dx)
    }

    /// Bilinear interpolation at `(x, y)`, wrapping periodically.
    pub fn interpolate(&self, x: f64, y: f64) -> Complex {
        let g = &self.grid;
        let n = g.n();
        let dx = g.dx();
        let fx = (x + g.half_width()) / dx;
        let fy = (y + g.half_width()) / dx;
        let (ix, iy) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - ix, fy - iy);
        let wrap = |i: f64| (i as i64).rem_euclid(n as i64) as usize;
        let (c0, c1) = (wrap(ix), wrap(ix + 1.0));
        let (r0, r1) = (wrap(iy), wrap(iy + 1.0));
        self.at(r0, c0) * ((1.0 - tx) * (1.0 - ty))
            + self.at(r0, c1) * (tx * (1.0 - ty))
            + self.at(r1, c0) * ((1.0 - tx) * ty)
            + self.at(r1, c1) * (tx * ty)
    }
}

pub(crate) fn check_same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Spectrum of a field in the continuum normalization, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField2D {
    grid: GridSpec,
    values: Vec<Complex>,
}

impl SpectrumField2D {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex] {
        &mut self.values
    }

    pub(crate) fn from_vec(grid: GridSpec, values: Vec<Complex>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Value at wavenumber indices `(row, col)` = `(k_y, k_x)` in FFT order.
    pub fn at(&self, row: usize, col: usize) -> Complex {
        self.values[row * self.grid.n() + col]
    }

    /// Multiplies each mode by `f(k_x, k_y)`.
    pub fn apply(&mut self, f: impl Fn(f64, f64) -> Complex) {
        let n = self.grid.n();
        let ks = self.grid.wavenumbers();
        for (row, ky) in ks.iter().enumerate() {
            for (col, kx) in ks.iter().enumerate() {
                self.values[row * n + col] *= f(*kx, *ky);
            }
        }
    }
}

/// In-place unnormalized 2-D DFT (row pass then column pass).
pub(crate) fn fft2_in_place(data: &mut [Complex], n: usize, inverse: bool) {
    let plan = fft_plan(n, inverse);
    let mut scratch = vec![Complex::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(data, &mut scratch);
    let mut column = vec![Complex::new(0.0, 0.0); n];
    for col in 0..n {
        for row in 0..n {
            column[row] = data[row * n + col];
        }
        plan.process_with_scratch(&mut column, &mut scratch);
        for row in 0..n {
            data[row * n + col] = column[row];
        }
    }
}

// (−1)^(l1 + l2) encodes the grid origin at (−L, −L).
fn checkerboard(data: &mut [Complex], n: usize, scale: f64) {
    for row in 0..n {
        for col in 0..n {
            let s = if (row + col) % 2 == 0 { scale } else { -scale };
            data[row * n + col] *= s;
        }
    }
}

pub fn forward_transform(f: &ComplexField2D) -> SpectrumField2D {
    let g = *f.grid();
    let n = g.n();
    let mut data = f.values().to_vec();
    fft2_in_place(&mut data, n, false);
    checkerboard(&mut data, n, g.dx() * g.dx());
    SpectrumField2D::from_vec(g, data)
}

pub fn inverse_transform(s: &SpectrumField2D) -> ComplexField2D {
    let g = *s.grid();
    let n = g.n();
    let mut data = s.values().to_vec();
    checkerboard(&mut data, n, 1.0 / (n as f64 * n as f64 * g.dx() * g.dx()));
    fft2_in_place(&mut data, n, true);
    ComplexField2D::from_vec_unchecked(g, data)
}

/// Spectral Laplacian.
pub fn laplacian(f: &ComplexField2D) -> ComplexField2D {
    let mut s = forward_transform(f);
    s.apply(|kx, ky| Complex::new(-(kx * kx + ky * ky), 0.0));
    inverse_transform(&s)
}

/// Spectral partial derivatives `(∂_x f, ∂_y f)`.
pub fn gradient(f: &ComplexField2D) -> (ComplexField2D, ComplexField2D) {
    let s = forward_transform(f);
    let mut sx = s.clone();
    sx.apply(|kx, _| Complex::new(0.0, kx));
    let mut sy = s;
    sy.apply(|_, ky| Complex::new(0.0, ky));
    (inverse_transform(&sx), inverse_transform(&sy))
}

/// `∫|∇u|² dx`, evaluated in Fourier space.
pub fn gradient_energy(f: &ComplexField2D) -> f64 {
    let s = forward_transform(f);
    let g = s.grid();
    let n = g.n();
    let ks = g.wavenumbers();
    let mut acc = 0.0;
    for (row, ky) in ks.iter().enumerate() {
        for (col, kx) in ks.iter().enumerate() {
            acc += (kx * kx + ky * ky) * s.values()[row * n + col].norm_sqr();
        }
    }
    acc * g.dk() * g.dk() / (4.0 * PI * PI)
}

/// Zeroes every mode with `|k_x|` or `|k_y|` above `fraction · k_max`.
pub fn truncate_spectrum(s: &mut SpectrumField2D, fraction: f64) {
    let cut = fraction * s.grid().k_max();
    s.apply(|kx, ky| {
        if kx.abs() > cut || ky.abs() > cut {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(1.0, 0.0)
        }
    });
}

/// Samples `g(r) e^{imθ}` on the grid.
pub fn sample_radial(grid: GridSpec, m: i32, g: impl Fn(f64) -> Complex) -> ComplexField2D {
    ComplexField2D::from_fn(grid, |x, y| {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        g(r) * Complex::from_polar(1.0, m as f64 * theta)
    })
}

/// One annulus of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBin {
    pub r_center: f64,
    /// Mean of `|f|` over the grid points in the annulus; `None` if it has none.
    pub mean: Option<f64>,
}

/// Averages `|f|` over `n_bins` uniform annuli partitioning `[0, L]`.
pub fn radial_profile(f: &ComplexField2D, n_bins: usize) -> Result<Vec<RadialBin>> {
    radial_profile_weighted(f, n_bins, |_, z| z.norm())
}

/// As [`radial_profile`] but averaging an arbitrary `w(r, f)` per point.
pub(crate) fn radial_profile_weighted(
    f: &ComplexField2D,
    n_bins: usize,
    w: impl Fn(f64, Complex) -> f64,
) -> Result<Vec<RadialBin>> {
    if n_bins < 4 {
        return Err(crate::error::invalid("n_bins", "at least 4 bins required"));
    }
    let g = f.grid();
    let n = g.n();
    let width = g.half_width() / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for row in 0..n {
        for col in 0..n {
            let (r, _) = g.polar(row, col);
            let bin = (r / width) as usize;
            if bin < n_bins {
                sums[bin] += w(r, f.at(row, col));
                counts[bin] += 1;
            }
        }
    }
    Ok((0..n_bins)
        .map(|i| RadialBin {
            r_center: (i as f64 + 0.5) * width,
            mean: (counts[i] > 0).then(|| sums[i] / counts[i] as f64),
        })
        .collect())
}

/// Discrete `∫|u|² dx`.
pub fn power(f: &ComplexField2D) -> f64 {
    let dx = f.grid().dx();
    f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
}

/// Discrete `∫ ū v dx`.
pub fn inner(u: &ComplexField2D, v: &ComplexField2D) -> Result<Complex> {
    check_same_grid(u.grid(), v.grid())?;
    let dx = u.grid().dx();
    Ok(u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex>()
        * (dx * dx))
}
