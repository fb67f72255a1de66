//! The coherent vortex trial function `a rᵐ e^{−((r−R)/ω)²} e^{i(mθ+σ)} e^{i(r−R)V}`
//! and recovery of its parameters from sampled fields.

use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::spectral::{gradient, radial_profile_weighted, sample_radial, Complex, ComplexField2D, GridSpec};

/// Parameters of the trial vortex. `sigma` is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexParams {
    pub a: f64,
    pub omega: f64,
    pub radius: f64,
    pub velocity: f64,
    pub sigma: f64,
    pub m: u32,
}

impl VortexParams {
    pub fn new(a: f64, omega: f64, radius: f64, velocity: f64, sigma: f64, m: u32) -> Result<Self> {
        for (name, v) in [("a", a), ("omega", omega), ("R", radius)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        if !velocity.is_finite() {
            return Err(invalid("V", "must be finite"));
        }
        if !sigma.is_finite() {
            return Err(invalid("sigma", "must be finite"));
        }
        if m == 0 {
            return Err(invalid("m", "charge must be at least 1"));
        }
        Ok(Self { a, omega, radius, velocity, sigma: reduce_angle(sigma), m })
    }
}

fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Samples the trial function. The grid must satisfy `L ≥ R + 5ω`.
pub fn build_ansatz(vp: &VortexParams, grid: GridSpec) -> Result<ComplexField2D> {
    let required = vp.radius + 5.0 * vp.omega;
    if grid.half_width() < required {
        return Err(Error::DomainTooSmall { half_width: grid.half_width(), required });
    }
    let VortexParams { a, omega, radius, velocity, sigma, m } = *vp;
    Ok(sample_radial(grid, m as i32, |r| {
        let s = (r - radius) / omega;
        Complex::from_polar(a * r.powi(m as i32) * (-s * s).exp(), sigma + (r - radius) * velocity)
    }))
}

/// How the width in a [`VortexFit`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitQuality {
    /// Both `e⁻¹` crossings of the envelope were found.
    Bracketed,
    /// The crossings were not bracketed; the width comes from the second moment.
    SecondMoment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexFit {
    pub params: VortexParams,
    pub quality: FitQuality,
}

/// Winding number of `f` around the circle of radius `r0` centred at the origin.
pub fn winding_number(f: &ComplexField2D, r0: f64) -> Result<i32> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(invalid("r0", "must be positive and finite"));
    }
    let max = f.max_abs();
    if max == 0.0 {
        return Err(Error::ZeroField);
    }
    let g = f.grid();
    let samples = ((TAU * r0 / (0.5 * g.dx())).ceil() as usize).max(64);
    let point = |i: usize| {
        let t = TAU * i as f64 / samples as f64;
        f.interpolate(r0 * t.cos(), r0 * t.sin())
    };
    let mut prev = point(0);
    let first = prev;
    let mut total = 0.0;
    for i in 1..=samples {
        let cur = if i == samples { first } else { point(i) };
        if cur.norm() < 1e-9 * max {
            return Err(Error::NearZeroOnLoop { radius: r0 });
        }
        total += (cur * prev.conj()).arg();
        prev = cur;
    }
    Ok((total / TAU).round() as i32)
}

// Index of the largest bin at or after `lo`; it must lie strictly inside the
// searched range with populated neighbours.
fn interior_argmax(values: &[Option<f64>], lo: usize) -> Result<usize> {
    let best = values
        .iter()
        .enumerate()
        .skip(lo)
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .ok_or(Error::NoInteriorMaximum)?;
    if best <= lo || best + 1 >= values.len() || values[best - 1].is_none() || values[best + 1].is_none() {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(best)
}

/// Recovers the trial-function parameters of `f`.
///
/// The charge comes from the winding number at the modulus peak; `R`, `a` and
/// `ω` from a parabola through the log-envelope `log(|f|/rᵐ)` around its
/// maximum and its `e⁻¹` crossings; `V` from the mean radial phase gradient
/// over `|r − R| ≤ ω/2`; `σ` from the phase along the positive x-axis.
pub fn fit_ansatz(f: &ComplexField2D) -> Result<VortexFit> {
    let max = f.max_abs();
    if max == 0.0 {
        return Err(Error::ZeroField);
    }
    let g = *f.grid();
    let n_bins = g.n() / 2;
    let width = g.half_width() / n_bins as f64;

    let modulus = radial_profile_weighted(f, n_bins, |_, z| z.norm())?;
    let means: Vec<_> = modulus.iter().map(|b| b.mean).collect();
    let peak_bin = interior_argmax(&means, 0)?;
    let r_peak = modulus[peak_bin].r_center;
    let winding = winding_number(f, r_peak)?;
    if winding == 0 {
        return Err(invalid("field", "zero winding at the modulus peak"));
    }
    let m = winding.unsigned_abs();

    // Envelope |f|/rᵐ; the search starts at half the modulus peak radius so the
    // division does not amplify noise near the origin.
    let env_bins = radial_profile_weighted(f, n_bins, |r, z| z.norm() / r.max(1e-300).powi(m as i32))?;
    let env: Vec<_> = env_bins.iter().map(|b| b.mean).collect();
    let lo = (0.5 * r_peak / width) as usize;
    let k = interior_argmax(&env, lo)?;
    let ln = |i: usize| env[i].map(f64::ln).unwrap_or(f64::NEG_INFINITY);
    let (y0, y1, y2) = (ln(k - 1), ln(k), ln(k + 1));
    let curv = y0 - 2.0 * y1 + y2;
    let shift = if curv < 0.0 { 0.5 * (y0 - y2) / curv } else { 0.0 };
    let radius = env_bins[k].r_center + shift * width;
    let log_peak = y1 - 0.25 * (y0 - y2) * shift;
    let a = log_peak.exp();

    // e⁻¹ crossings of the envelope, linear in the log.
    let target = log_peak - 1.0;
    let crossing = |dir: isize| -> Option<f64> {
        let mut i = k as isize;
        loop {
            let j = i + dir;
            if j < lo as isize || j as usize >= env.len() {
                return None;
            }
            let (yi, yj) = (ln(i as usize), ln(j as usize));
            if !yj.is_finite() {
                return None;
            }
            if yj <= target {
                let t = (yi - target) / (yi - yj);
                let ri = env_bins[i as usize].r_center;
                return Some(ri + dir as f64 * t * width);
            }
            i = j;
        }
    };
    let (omega, quality) = match (crossing(-1), crossing(1)) {
        (Some(l), Some(r)) if r > l => (0.5 * (r - l), FitQuality::Bracketed),
        _ => (second_moment_width(&env_bins, lo, radius)?, FitQuality::SecondMoment),
    };

    let velocity = radial_phase_gradient(f, radius, omega)?;
    let sigma = axis_phase(f, radius, omega, velocity)?;
    // Negative windings are reported by magnitude; V and σ are as measured.
    let params = VortexParams::new(a, omega, radius, velocity, sigma, m)?;
    Ok(VortexFit { params, quality })
}

// Width ω = 2·sd of the weight env², matching sd = ω/2 for a Gaussian envelope.
fn second_moment_width(bins: &[crate::spectral::RadialBin], lo: usize, center: f64) -> Result<f64> {
    let (mut w, mut w2) = (0.0, 0.0);
    for b in &bins[lo..] {
        if let Some(e) = b.mean {
            let d = b.r_center - center;
            w += e * e;
            w2 += e * e * d * d;
        }
    }
    if w == 0.0 {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(2.0 * (w2 / w).sqrt())
}

fn radial_phase_gradient(f: &ComplexField2D, radius: f64, omega: f64) -> Result<f64> {
    let g = f.grid();
    let n = g.n();
    let (fx, fy) = gradient(f);
    let (mut sum, mut count) = (0.0, 0usize);
    for row in 0..n {
        for col in 0..n {
            let (r, _) = g.polar(row, col);
            if (r - radius).abs() > 0.5 * omega || r == 0.0 {
                continue;
            }
            let z = f.at(row, col);
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let (x, y) = (g.coord(col), g.coord(row));
            let dr = (fx.at(row, col) * x + fy.at(row, col) * y) / r;
            sum += (z.conj() * dr).im / z.norm_sqr();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(sum / count as f64)
}

// Phase along the positive x-axis (row n/2 is y = 0), with the (r − R)V part removed.
fn axis_phase(f: &ComplexField2D, radius: f64, omega: f64, velocity: f64) -> Result<f64> {
    let g = f.grid();
    let row = g.n() / 2;
    let mut acc = Complex::new(0.0, 0.0);
    for col in 0..g.n() {
        let x = g.coord(col);
        if x > 0.0 && (x - radius).abs() <= 0.5 * omega {
            acc += f.at(row, col) * Complex::from_polar(1.0, -(x - radius) * velocity);
        }
    }
    if acc.norm() == 0.0 {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(acc.arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use crate::spectral::{make_grid, power};

    fn vp(a: f64, omega: f64, r: f64, v: f64, s: f64, m: u32) -> VortexParams {
        VortexParams::new(a, omega, r, v, s, m).unwrap()
    }

    #[test]
    fn params_validate_and_reduce_sigma() {
        assert!(VortexParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 1).is_err());
        assert!(VortexParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0).is_err());
        let p = vp(1.0, 1.0, 1.0, 0.0, -0.5, 1);
        assert!((p.sigma - (TAU - 0.5)).abs() < 1e-15);
        assert!((vp(1.0, 1.0, 1.0, 0.0, 7.0, 1).sigma - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn build_values_on_axis() {
        let g = make_grid(128, 8.0).unwrap();
        // R = 4 falls on a grid point: column index (4 + 8)/dx = 96.
        let p = vp(0.7, 0.5, 4.0, 0.3, 1.1, 2);
        let u = build_ansatz(&p, g).unwrap();
        let z = u.at(64, 96);
        let expect = Complex::from_polar(0.7 * 16.0, 1.1);
        assert!((z - expect).norm() < 1e-12);
        // r = R ± ω lies on columns 96 ± 4.
        for col in [92, 100] {
            let r = g.coord(col);
            let peak_along_ray = 0.7 * r.powi(2);
            assert!((u.at(64, col).norm() / peak_along_ray - (-1f64).exp()).abs() < 1e-12);
        }
        assert!(matches!(
            build_ansatz(&vp(1.0, 1.0, 4.0, 0.0, 0.0, 1), make_grid(64, 8.0).unwrap()),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn power_matches_radial_quadrature() {
        let g = make_grid(256, 10.0).unwrap();
        let u = build_ansatz(&vp(1.0, 0.5, 5.0, 0.0, 0.0, 1), g).unwrap();
        let f = |r: f64| {
            let s = (r - 5.0) / 0.5;
            TAU * r.powi(3) * (-2.0 * s * s).exp()
        };
        let oracle = integrate(f, 0.0, 10.0, 1e-14, 0.0, 8).unwrap().value;
        assert!((power(&u) - oracle).abs() / oracle < 1e-6);
    }

    #[test]
    fn winding_examples() {
        let g = make_grid(128, 10.0).unwrap();
        for m in [1, 3] {
            let u = build_ansatz(&vp(1.0, 0.8, 5.0, 0.2, 0.4, m), g).unwrap();
            assert_eq!(winding_number(&u, 5.0).unwrap(), m as i32);
            assert_eq!(winding_number(&u.conj(), 5.0).unwrap(), -(m as i32));
        }
        let u = build_ansatz(&vp(1.0, 0.5, 5.0, 0.0, 0.0, 1), g).unwrap();
        assert!(matches!(winding_number(&u, 9.9), Err(Error::NearZeroOnLoop { .. })));
    }

    #[test]
    fn fit_round_trip() {
        let g = make_grid(256, 10.0).unwrap();
        let truth = vp(1.0, 0.5, 5.0, 0.1, 0.3, 1);
        let fit = fit_ansatz(&build_ansatz(&truth, g).unwrap()).unwrap();
        assert_eq!(fit.quality, FitQuality::Bracketed);
        let p = fit.params;
        assert_eq!(p.m, 1);
        for (got, want) in [(p.a, 1.0), (p.omega, 0.5), (p.radius, 5.0), (p.velocity, 0.1), (p.sigma, 0.3)] {
            assert!((got - want).abs() <= 0.02 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn fit_recovers_charge() {
        let g = make_grid(256, 10.0).unwrap();
        for m in 1..=3 {
            let fit = fit_ansatz(&build_ansatz(&vp(0.2, 0.6, 5.0, 0.0, 1.0, m), g).unwrap()).unwrap();
            assert_eq!(fit.params.m, m);
            assert!((fit.params.radius - 5.0).abs() < 0.05);
        }
    }

    #[test]
    fn fit_rejects_degenerate_fields() {
        let g = make_grid(64, 8.0).unwrap();
        assert_eq!(fit_ansatz(&ComplexField2D::zeros(g)), Err(Error::ZeroField));
        // monotone radial decay: maximum in the first bin
        let bump = sample_radial(g, 1, |r| Complex::new((-r * r).exp(), 0.0));
        assert!(fit_ansatz(&bump).is_err());
    }
}
