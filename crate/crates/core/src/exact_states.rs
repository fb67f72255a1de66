//! Exact stationary objects of the strongly noncommutative limit: the radial
//! projectors `φₙ(r) = 2(−1)ⁿ e^{−r²} Lₙ(2r²)`, plateaus `Pₙ = Σ_{j≤n} φⱼ` and
//! walls `Wₙ = φₙ + φₙ₋₁`, and residuals of `−σζ = Δζ + ζ⋆ζ⋆ζ`.

use crate::error::{invalid, Error, Result};
use crate::moyal::{star_cubic, star_spectra, MoyalParams};
use crate::spectral::{
    forward_transform, inner, laplacian, Complex, ComplexField2D, GridSpec,
};

/// Laguerre polynomial `Lₙ(x)` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `φₙ` in the scaled variables, sampled on `grid`.
pub fn phi_n(n: usize, grid: GridSpec) -> ComplexField2D {
    let sign = if n.is_multiple_of(2) { 2.0 } else { -2.0 };
    ComplexField2D::from_fn(grid, |x, y| {
        let r2 = x * x + y * y;
        Complex::new(sign * (-r2).exp() * laguerre(n, 2.0 * r2), 0.0)
    })
}

/// Plateau `Pₙ = φ₀ + … + φₙ`.
pub fn plateau(n: usize, grid: GridSpec) -> ComplexField2D {
    ComplexField2D::from_fn(grid, |x, y| {
        let r2 = x * x + y * y;
        let sum: f64 = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 2.0 } else { -2.0 };
                sign * laguerre(j, 2.0 * r2)
            })
            .sum();
        Complex::new(sum * (-r2).exp(), 0.0)
    })
}

/// Wall `Wₙ = φₙ + φₙ₋₁`.
pub fn wall(n: usize, grid: GridSpec) -> Result<ComplexField2D> {
    if n == 0 {
        return Err(invalid("n", "wall requires n >= 1"));
    }
    phi_n(n, grid).add(&phi_n(n - 1, grid))
}

/// The separable-solution frequency σ of `u = e^{iσt}ζ(x)` together with Θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryParams {
    pub sigma: f64,
    pub theta: MoyalParams,
}

impl StationaryParams {
    pub fn new(sigma: f64, theta: MoyalParams) -> Result<Self> {
        if !sigma.is_finite() {
            return Err(invalid("sigma", "must be finite"));
        }
        Ok(Self { sigma, theta })
    }

    /// The frequency quoted alongside the projector solutions, `σ = 4Θ`.
    pub fn quoted_sigma(theta: MoyalParams) -> f64 {
        4.0 * theta.theta()
    }
}

// Δζ (optional) + ζ⋆ζ⋆ζ, the σ-independent part of the residual.
fn stationary_operator(zeta: &ComplexField2D, theta: MoyalParams, drop_laplacian: bool) -> Result<ComplexField2D> {
    if zeta.max_abs() < 1e-12 {
        return Err(Error::ZeroField);
    }
    let cubic = star_cubic(zeta, theta)?;
    if drop_laplacian {
        Ok(cubic)
    } else {
        laplacian(zeta).add(&cubic)
    }
}

/// `‖−σζ − Δζ − ζ⋆ζ⋆ζ‖ / ‖ζ‖`, with `Δζ` omitted when `drop_laplacian`.
pub fn stationary_residual(zeta: &ComplexField2D, sp: StationaryParams, drop_laplacian: bool) -> Result<f64> {
    let op = stationary_operator(zeta, sp.theta, drop_laplacian)?;
    let lhs = zeta.scale(Complex::new(-sp.sigma, 0.0));
    Ok(lhs.sub(&op)?.norm() / zeta.norm())
}

/// Residuals for each σ in `sigmas`; the cubic term is evaluated once.
pub fn sigma_scan(
    zeta: &ComplexField2D,
    theta: MoyalParams,
    drop_laplacian: bool,
    sigmas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let op = stationary_operator(zeta, theta, drop_laplacian)?;
    let norm = zeta.norm();
    sigmas
        .iter()
        .map(|&s| {
            let lhs = zeta.scale(Complex::new(-s, 0.0));
            Ok((s, lhs.sub(&op)?.norm() / norm))
        })
        .collect()
}

/// The least-squares σ minimizing the residual, and the residual there.
/// The residual is quadratic in σ, so the minimizer is `−Re⟨ζ, A⟩/‖ζ‖²`
/// with `A` the σ-independent part.
pub fn optimal_sigma(zeta: &ComplexField2D, theta: MoyalParams, drop_laplacian: bool) -> Result<(f64, f64)> {
    let op = stationary_operator(zeta, theta, drop_laplacian)?;
    let norm2 = zeta.norm().powi(2);
    let sigma = -inner(zeta, &op)?.re / norm2;
    let resid = zeta
        .scale(Complex::new(-sigma, 0.0))
        .sub(&op)?
        .norm()
        / norm2.sqrt();
    Ok((sigma, resid))
}

/// `Σ_{n≤n_max} ‖φₙ⋆φₙ − φₙ‖²` at Θ, evaluated in Fourier space.
pub fn projector_objective(theta: f64, n_max: usize, grid: GridSpec) -> Result<f64> {
    let spectra: Vec<_> = (0..=n_max).map(|n| forward_transform(&phi_n(n, grid))).collect();
    objective_from_spectra(theta, &spectra)
}

fn objective_from_spectra(theta: f64, spectra: &[crate::spectral::SpectrumField2D]) -> Result<f64> {
    let p = MoyalParams::new(theta)?;
    let mut total = 0.0;
    for s in spectra {
        let g = s.grid();
        let sq = star_spectra(s, s, p)?;
        let diff: f64 = sq
            .values()
            .iter()
            .zip(s.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        total += diff * g.dk() * g.dk() / (4.0 * std::f64::consts::PI.powi(2));
    }
    Ok(total)
}

/// Θ at which `φ₀ … φ_{n_max}` are best ⋆-idempotent: a logarithmic scan on
/// `[1/8, 8]` followed by golden-section refinement to `1e-4` in Θ.
pub fn calibrate_theta(n_max: usize, grid: GridSpec) -> Result<f64> {
    let spectra: Vec<_> = (0..=n_max).map(|n| forward_transform(&phi_n(n, grid))).collect();
    let f = |t: f64| objective_from_spectra(t, &spectra);

    let scan: Vec<f64> = (0..=12).map(|i| 2f64.powf((i as f64 - 6.0) / 2.0)).collect();
    let values = scan.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut lo = scan[best.saturating_sub(1)];
    let mut hi = scan[(best + 1).min(scan.len() - 1)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 1e-10 * hi {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}
