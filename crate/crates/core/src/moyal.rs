//! The Moyal ⋆-product on fields over the plane.
//!
//! Two representations are provided and cross-checked against each other:
//!
//! * the Fourier twisted convolution
//!   `(u⋆v)^(k) = (2π)⁻² ∫ û(k−p) v̂(p) e^{i (k−p)∧p} dp`, with
//!   `a∧b = (Θ/2)(a₁b₂ − a₂b₁)`;
//! * the operator (Landau) basis of generalized Laguerre–Gaussian symbols
//!   `φ_{mn}`, in which ⋆ becomes matrix multiplication.
//!
//! With this wedge the coordinates satisfy `[x, y]_⋆ = −iΘ`, so the ladder
//! operators are `a = z̄/√(2Θ)` and `a† = z/√(2Θ)` with `z = x + iy`, and
//! `φ_{00} = 2e^{−r²/Θ}` is a rank-one projector.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::spectral::{
    check_same_grid, fft_plan, forward_transform, gradient_energy, inverse_transform, power,
    Complex, ComplexField2D, GridSpec, SpectrumField2D,
};

/// The noncommutativity scale Θ (an area). Θ = 0 is the commutative limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoyalParams {
    theta: f64,
}

impl MoyalParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(invalid("theta", format!("must be finite and >= 0, got {theta}")));
        }
        Ok(Self { theta })
    }

    pub fn commutative() -> Self {
        Self { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `a∧b = (Θ/2)(a₁b₂ − a₂b₁)`.
pub fn wedge(a: [f64; 2], b: [f64; 2], p: MoyalParams) -> f64 {
    0.5 * p.theta * (a[0] * b[1] - a[1] * b[0])
}

/// Twisted convolution of two spectra.
///
/// For every pair of output row `k_y` and input row `p_y` the sum over the
/// column wavenumbers is a cyclic convolution once the phase is split as
/// `e^{iΘ/2 (k_x p_y − k_y p_x)}`, so it is evaluated with FFTs. The result
/// equals [`star_direct`] except where `k − p` wraps; every such term has one
/// factor evaluated at `|k| ≥ k_max/2`, so the difference vanishes for spectra
/// that are negligible beyond half the Nyquist wavenumber. Cost `O(n³ log n)`.
pub fn star_spectra(
    uh: &SpectrumField2D,
    vh: &SpectrumField2D,
    p: MoyalParams,
) -> Result<SpectrumField2D> {
    check_same_grid(uh.grid(), vh.grid())?;
    let g = *uh.grid();
    let n = g.n();
    let alpha = 0.5 * p.theta;
    let ks = g.wavenumbers();

    // phase[i][j] = e^{−iα k_i k_j}; symmetric.
    let mut phase = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            phase[i * n + j] = Complex::from_polar(1.0, -alpha * ks[i] * ks[j]);
        }
    }

    let fwd = fft_plan(n, false);
    let inv = fft_plan(n, true);
    let mut scratch = vec![Complex::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];

    let mut u_rows = uh.values().to_vec();
    for row in u_rows.chunks_exact_mut(n) {
        fwd.process_with_scratch(row, &mut scratch);
    }

    let measure = g.dk() * g.dk() / (4.0 * PI * PI) / n as f64;
    let v = vh.values();
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for rk in 0..n {
        let acc = &mut out[rk * n..(rk + 1) * n];
        let phase_k = &phase[rk * n..(rk + 1) * n];
        for rp in 0..n {
            let v_row = &v[rp * n..(rp + 1) * n];
            for ((b, &vv), &ph) in buf.iter_mut().zip(v_row).zip(phase_k) {
                *b = vv * ph;
            }
            fwd.process_with_scratch(&mut buf, &mut scratch);
            let ra = (rk + n - rp) % n;
            let a_row = &u_rows[ra * n..(ra + 1) * n];
            for (b, &a) in buf.iter_mut().zip(a_row) {
                *b *= a;
            }
            inv.process_with_scratch(&mut buf, &mut scratch);
            let phase_p = &phase[rp * n..(rp + 1) * n];
            for ((o, &b), &ph) in acc.iter_mut().zip(&buf).zip(phase_p) {
                *o += ph.conj() * b;
            }
        }
        for o in acc.iter_mut() {
            *o *= measure;
        }
    }
    Ok(SpectrumField2D::from_vec(g, out))
}

/// `u ⋆ v` via the twisted convolution.
pub fn star(u: &ComplexField2D, v: &ComplexField2D, p: MoyalParams) -> Result<ComplexField2D> {
    check_same_grid(u.grid(), v.grid())?;
    let w = star_spectra(&forward_transform(u), &forward_transform(v), p)?;
    Ok(inverse_transform(&w))
}

/// Literal `O(n⁴)` evaluation of the twisted-convolution sum, with `k − p`
/// wrapped to the wavenumber lattice before it enters the wedge. Reference
/// use only (small grids).
pub fn star_direct(u: &ComplexField2D, v: &ComplexField2D, p: MoyalParams) -> Result<ComplexField2D> {
    check_same_grid(u.grid(), v.grid())?;
    let g = *u.grid();
    let n = g.n();
    let uh = forward_transform(u);
    let vh = forward_transform(v);
    let ks = g.wavenumbers();
    let measure = g.dk() * g.dk() / (4.0 * PI * PI);
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for rk in 0..n {
        for ck in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for rp in 0..n {
                let rd = (rk + n - rp) % n;
                for cp in 0..n {
                    let cd = (ck + n - cp) % n;
                    let w = wedge([ks[cd], ks[rd]], [ks[cp], ks[rp]], p);
                    acc += uh.at(rd, cd) * vh.at(rp, cp) * Complex::from_polar(1.0, w);
                }
            }
            out[rk * n + ck] = acc * measure;
        }
    }
    Ok(inverse_transform(&SpectrumField2D::from_vec(g, out)))
}

/// `u ⋆ ū ⋆ u`, associated left to right.
pub fn star_cubic(u: &ComplexField2D, p: MoyalParams) -> Result<ComplexField2D> {
    let uh = forward_transform(u);
    let ubar_h = forward_transform(&u.conj());
    let left = star_spectra(&uh, &ubar_h, p)?;
    Ok(inverse_transform(&star_spectra(&left, &uh, p)?))
}

/// `∫|∇u|² dx − ∫|ū⋆u|² dx`, the quartic term taken through
/// `∫ ū⋆u⋆ū⋆u dx = ∫|ū⋆u|² dx`.
pub fn energy(u: &ComplexField2D, p: MoyalParams) -> Result<f64> {
    let density = star(&u.conj(), u, p)?;
    Ok(gradient_energy(u) - power(&density))
}

/// Generalized Laguerre polynomials `L_k^{(α)}(x)` for `k = 0..count`.
pub(crate) fn generalized_laguerre_all(count: usize, alpha: f64, x: f64, out: &mut Vec<f64>) {
    out.clear();
    if count == 0 {
        return;
    }
    out.push(1.0);
    if count == 1 {
        return;
    }
    out.push(1.0 + alpha - x);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

/// Pointwise value of the operator-basis symbol `φ_{mn}(x, y; Θ)`, the Wigner
/// symbol of `|m⟩⟨n|`. The diagonal `φ_{nn}` is `2(−1)ⁿ Lₙ(2r²/Θ) e^{−r²/Θ}`.
pub fn landau_symbol(m: usize, n: usize, x: f64, y: f64, theta: f64) -> Complex {
    if m < n {
        return landau_symbol(n, m, x, y, theta).conj();
    }
    let j = m - n;
    let r2 = x * x + y * y;
    let mut lag = Vec::with_capacity(n + 1);
    generalized_laguerre_all(n + 1, j as f64, 2.0 * r2 / theta, &mut lag);
    let z = Complex::new(x, y) * (2.0 / theta).sqrt();
    let mut ladder = Complex::new(1.0, 0.0);
    for i in n + 1..=m {
        ladder *= z / (i as f64).sqrt();
    }
    let sign = if n.is_multiple_of(2) { 2.0 } else { -2.0 };
    ladder * (sign * lag[n] * (-r2 / theta).exp())
}

/// Coefficients of a field in the truncated operator basis:
/// `u = Σ_{m,n<M} c_{mn} φ_{mn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauCoefficients {
    cutoff: usize,
    coeffs: Vec<Complex>,
    theta_ref: f64,
}

impl LandauCoefficients {
    pub fn new(cutoff: usize, coeffs: Vec<Complex>, theta_ref: f64) -> Result<Self> {
        if cutoff == 0 {
            return Err(invalid("cutoff", "must be at least 1"));
        }
        if coeffs.len() != cutoff * cutoff {
            return Err(Error::LandauMismatch(format!(
                "expected {} coefficients, got {}",
                cutoff * cutoff,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(theta_ref.is_finite() && theta_ref > 0.0) {
            return Err(invalid("theta", "operator basis requires theta > 0"));
        }
        Ok(Self {
            cutoff,
            coeffs,
            theta_ref,
        })
    }

    pub fn zeros(cutoff: usize, theta_ref: f64) -> Result<Self> {
        Self::new(cutoff, vec![Complex::new(0.0, 0.0); cutoff * cutoff], theta_ref)
    }

    pub fn identity(cutoff: usize, theta_ref: f64) -> Result<Self> {
        let mut c = Self::zeros(cutoff, theta_ref)?;
        for i in 0..cutoff {
            c.coeffs[i * cutoff + i] = Complex::new(1.0, 0.0);
        }
        Ok(c)
    }

    pub fn diagonal(diag: &[Complex], cutoff: usize, theta_ref: f64) -> Result<Self> {
        let mut c = Self::zeros(cutoff, theta_ref)?;
        for (i, &d) in diag.iter().enumerate().take(cutoff) {
            c.coeffs[i * cutoff + i] = d;
        }
        Ok(c)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn theta_ref(&self) -> f64 {
        self.theta_ref
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn get(&self, m: usize, n: usize) -> Complex {
        self.coeffs[m * self.cutoff + n]
    }

    pub fn set(&mut self, m: usize, n: usize, value: Complex) {
        self.coeffs[m * self.cutoff + n] = value;
    }

    /// Coefficients of the complex-conjugate field (`φ̄_{mn} = φ_{nm}`).
    pub fn adjoint(&self) -> Self {
        let m = self.cutoff;
        let mut out = self.clone();
        for i in 0..m {
            for j in 0..m {
                out.coeffs[j * m + i] = self.coeffs[i * m + j].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn matmul(&self, other: &Self) -> Self {
        let m = self.cutoff;
        let mut out = vec![Complex::new(0.0, 0.0); m * m];
        for i in 0..m {
            for k in 0..m {
                let a = self.coeffs[i * m + k];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += a * other.coeffs[k * m + j];
                }
            }
        }
        Self {
            cutoff: m,
            coeffs: out,
            theta_ref: self.theta_ref,
        }
    }
}

/// ⋆-product in the operator basis: the matrix product `c1 · c2`.
pub fn star_landau(c1: &LandauCoefficients, c2: &LandauCoefficients) -> Result<LandauCoefficients> {
    if c1.cutoff != c2.cutoff {
        return Err(Error::LandauMismatch(format!(
            "cutoffs differ: {} vs {}",
            c1.cutoff, c2.cutoff
        )));
    }
    if c1.theta_ref != c2.theta_ref {
        return Err(Error::LandauMismatch(format!(
            "basis theta differs: {} vs {}",
            c1.theta_ref, c2.theta_ref
        )));
    }
    Ok(c1.matmul(c2))
}

/// `C C† C`, the operator-basis form of `u ⋆ ū ⋆ u`.
pub fn star_cubic_landau(c: &LandauCoefficients) -> LandauCoefficients {
    c.matmul(&c.adjoint()).matmul(c)
}

/// The operator basis tabulated on a grid for a fixed cutoff and Θ.
///
/// Symbols factor as `φ_{mn} = ρ_{mn}(r) e^{i(m−n)θ}` for `m ≥ n` and
/// `φ_{nm} = conj(φ_{mn})`, so only the real radial factors for `m ≥ n` and one
/// angular factor per `m − n` are stored.
#[derive(Debug, Clone)]
pub struct LandauBasis {
    grid: GridSpec,
    theta: f64,
    cutoff: usize,
    radial: Vec<Vec<f64>>,
    angular: Vec<Vec<Complex>>,
}

fn tri_index(m: usize, n: usize) -> usize {
    m * (m + 1) / 2 + n
}

impl LandauBasis {
    pub fn new(grid: GridSpec, p: MoyalParams, cutoff: usize) -> Result<Self> {
        let theta = p.theta();
        if theta <= 0.0 {
            return Err(invalid("theta", "operator basis is undefined at theta = 0"));
        }
        if cutoff == 0 {
            return Err(invalid("cutoff", "must be at least 1"));
        }
        let npts = grid.len();
        let mut radial = vec![vec![0.0; npts]; cutoff * (cutoff + 1) / 2];
        let mut angular = vec![vec![Complex::new(0.0, 0.0); npts]; cutoff];
        let mut lag = Vec::with_capacity(cutoff);
        let n = grid.n();
        for row in 0..n {
            for col in 0..n {
                let idx = row * n + col;
                let (r, phi) = grid.polar(row, col);
                let r2 = r * r;
                let gauss = (-r2 / theta).exp();
                let s = (2.0 / theta).sqrt() * r;
                for (j, ang) in angular.iter_mut().enumerate() {
                    ang[idx] = Complex::from_polar(1.0, j as f64 * phi);
                    generalized_laguerre_all(cutoff - j, j as f64, 2.0 * r2 / theta, &mut lag);
                    // ladder = s^j · sqrt(nn!/(nn+j)!), updated as nn grows.
                    let mut ladder = (1..=j).fold(1.0, |acc, i| acc * s / (i as f64).sqrt());
                    for nn in 0..cutoff - j {
                        if nn > 0 {
                            ladder *= (nn as f64 / (nn + j) as f64).sqrt();
                        }
                        let sign = if nn % 2 == 0 { 2.0 } else { -2.0 };
                        radial[tri_index(nn + j, nn)][idx] = sign * ladder * lag[nn] * gauss;
                    }
                }
            }
        }
        Ok(Self {
            grid,
            theta,
            cutoff,
            radial,
            angular,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The symbol `φ_{mn}` sampled on the grid.
    pub fn symbol(&self, m: usize, n: usize) -> ComplexField2D {
        let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
        let rad = &self.radial[tri_index(hi, lo)];
        let ang = &self.angular[hi - lo];
        let values = rad
            .iter()
            .zip(ang)
            .map(|(&r, &a)| if m >= n { a * r } else { a.conj() * r })
            .collect();
        ComplexField2D::from_vec_unchecked(self.grid, values)
    }

    /// `c_{mn} = (2πΘ)⁻¹ ∫ φ̄_{mn} u dx`.
    pub fn project(&self, u: &ComplexField2D) -> Result<LandauCoefficients> {
        check_same_grid(&self.grid, u.grid())?;
        let m = self.cutoff;
        let dx = self.grid.dx();
        let scale = dx * dx / (2.0 * PI * self.theta);
        let mut coeffs = vec![Complex::new(0.0, 0.0); m * m];
        let mut minus = vec![Complex::new(0.0, 0.0); self.grid.len()];
        let mut plus = vec![Complex::new(0.0, 0.0); self.grid.len()];
        for j in 0..m {
            for ((mi, pl), (&a, &z)) in minus
                .iter_mut()
                .zip(plus.iter_mut())
                .zip(self.angular[j].iter().zip(u.values()))
            {
                *mi = z * a.conj();
                *pl = z * a;
            }
            for nn in 0..m - j {
                let rad = &self.radial[tri_index(nn + j, nn)];
                let lower: Complex = rad.iter().zip(&minus).map(|(&r, &z)| z * r).sum();
                coeffs[(nn + j) * m + nn] = lower * scale;
                if j > 0 {
                    let upper: Complex = rad.iter().zip(&plus).map(|(&r, &z)| z * r).sum();
                    coeffs[nn * m + nn + j] = upper * scale;
                }
            }
        }
        LandauCoefficients::new(m, coeffs, self.theta)
    }

    /// Evaluates `Σ c_{mn} φ_{mn}` on the grid.
    pub fn synthesize(&self, c: &LandauCoefficients) -> Result<ComplexField2D> {
        if c.cutoff != self.cutoff {
            return Err(Error::LandauMismatch(format!(
                "cutoff {} does not match basis cutoff {}",
                c.cutoff, self.cutoff
            )));
        }
        if c.theta_ref != self.theta {
            return Err(Error::LandauMismatch(format!(
                "coefficient theta {} does not match basis theta {}",
                c.theta_ref, self.theta
            )));
        }
        let m = self.cutoff;
        let npts = self.grid.len();
        let mut out = vec![Complex::new(0.0, 0.0); npts];
        let mut lower = vec![Complex::new(0.0, 0.0); npts];
        let mut upper = vec![Complex::new(0.0, 0.0); npts];
        for j in 0..m {
            lower.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
            upper.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
            for nn in 0..m - j {
                let rad = &self.radial[tri_index(nn + j, nn)];
                let cl = c.get(nn + j, nn);
                let cu = c.get(nn, nn + j);
                for ((lo, up), &r) in lower.iter_mut().zip(upper.iter_mut()).zip(rad) {
                    *lo += cl * r;
                    if j > 0 {
                        *up += cu * r;
                    }
                }
            }
            for ((o, &a), (&lo, &up)) in out
                .iter_mut()
                .zip(&self.angular[j])
                .zip(lower.iter().zip(&upper))
            {
                *o += lo * a;
                if j > 0 {
                    *o += up * a.conj();
                }
            }
        }
        Ok(ComplexField2D::from_vec_unchecked(self.grid, out))
    }
}

/// Projects `u` on the first `cutoff` operator-basis levels at Θ.
pub fn to_landau(u: &ComplexField2D, cutoff: usize, p: MoyalParams) -> Result<LandauCoefficients> {
    LandauBasis::new(*u.grid(), p, cutoff)?.project(u)
}

/// Evaluates an operator-basis expansion on `grid`.
pub fn from_landau(c: &LandauCoefficients, grid: GridSpec) -> Result<ComplexField2D> {
    LandauBasis::new(grid, MoyalParams::new(c.theta_ref)?, c.cutoff)?.synthesize(c)
}

/// `∫|∇u|² dx − ∫|ū⋆u|² dx` with the quartic term evaluated in the operator
/// basis, `2πΘ ‖C†C‖²_F` for `C` the projection of `u`.
pub fn energy_landau(u: &ComplexField2D, basis: &LandauBasis) -> Result<f64> {
    let c = basis.project(u)?;
    let density = c.adjoint().matmul(&c);
    Ok(gradient_energy(u) - 2.0 * PI * basis.theta() * density.frobenius_norm().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gradient, make_grid};

    fn gauss(grid: GridSpec, x0: f64, y0: f64, width: f64) -> ComplexField2D {
        ComplexField2D::from_fn(grid, |x, y| {
            Complex::new((-((x - x0).powi(2) + (y - y0).powi(2)) / width).exp(), 0.0)
        })
    }

    fn theta(t: f64) -> MoyalParams {
        MoyalParams::new(t).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let p = theta(2.0);
        assert_eq!(wedge([0.3, -1.2], [0.3, -1.2], p), 0.0);
        assert_eq!(wedge([1.0, 0.0], [0.0, 1.0], p), 1.0);
        let (a, b) = ([0.7, -2.1], [1.3, 0.4]);
        assert_eq!(wedge(a, b, p), -wedge(b, a, p));
    }

    #[test]
    fn params_reject_negative_theta() {
        assert!(MoyalParams::new(-1.0).is_err());
        assert!(MoyalParams::new(f64::NAN).is_err());
        assert_eq!(MoyalParams::commutative().theta(), 0.0);
    }

    #[test]
    fn fast_star_matches_direct_sum() {
        let g = make_grid(56, 4.0).unwrap();
        let u = ComplexField2D::from_fn(g, |x, y| {
            Complex::new(1.0 + x, y) * (-(x * x + y * y) * 1.5).exp()
        });
        let v = gauss(g, 0.3, -0.2, 0.7).scale(Complex::new(0.5, 1.0));
        for t in [0.0, 0.5, 1.3] {
            let fast = star(&u, &v, theta(t)).unwrap();
            let direct = star_direct(&u, &v, theta(t)).unwrap();
            let err = fast.relative_distance(&direct).unwrap();
            assert!(err < 1e-10, "theta {t}: {err:e}");
        }
    }

    #[test]
    fn commutative_star_is_pointwise_product() {
        let g = make_grid(128, 8.0).unwrap();
        let u = gauss(g, 0.0, 0.0, 1.0);
        let w = star(&u, &u, MoyalParams::commutative()).unwrap();
        let exact = gauss(g, 0.0, 0.0, 0.5);
        assert!(w.relative_distance(&exact).unwrap() < 1e-6);
    }

    #[test]
    fn ground_projector_is_idempotent() {
        let g = make_grid(128, 8.0).unwrap();
        let phi0 = gauss(g, 0.0, 0.0, 1.0).scale(Complex::new(2.0, 0.0));
        let sq = star(&phi0, &phi0, theta(1.0)).unwrap();
        assert!(sq.relative_distance(&phi0).unwrap() < 1e-6);
        let cube = star_cubic(&phi0, theta(1.0)).unwrap();
        assert!(cube.relative_distance(&phi0).unwrap() < 1e-6);
    }

    #[test]
    fn star_cubic_zero_and_homogeneity() {
        let g = make_grid(32, 6.0).unwrap();
        let z = star_cubic(&ComplexField2D::zeros(g), theta(1.0)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let u = gauss(g, 0.5, 0.0, 1.0);
        let c = Complex::new(0.6, -1.1);
        let base = star_cubic(&u, theta(1.0)).unwrap().norm();
        let scaled = star_cubic(&u.scale(c), theta(1.0)).unwrap().norm();
        assert!((scaled - c.norm().powi(3) * base).abs() < 1e-12 * scaled);
    }

    #[test]
    fn trace_property() {
        let g = make_grid(64, 8.0).unwrap();
        let u = ComplexField2D::from_fn(g, |x, y| Complex::new(x, 1.0) * (-(x * x + y * y)).exp());
        let v = gauss(g, 0.5, -0.4, 1.2);
        for t in [0.5, 1.0, 2.0] {
            let lhs = star(&u, &v, theta(t)).unwrap().integral();
            let rhs = u.mul(&v).unwrap().integral();
            assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
        }
    }

    #[test]
    fn landau_symbols_obey_raising_recurrence() {
        // a†⋆f = (z f − Θ ∂_z̄ f)/√(2Θ) and φ_{m+1,n} = a†⋆φ_{mn}/√(m+1).
        let g = make_grid(64, 8.0).unwrap();
        let t = 1.5;
        let basis = LandauBasis::new(g, theta(t), 5).unwrap();
        for (m, n) in [(0, 0), (1, 0), (0, 2), (2, 3), (3, 1)] {
            let f = basis.symbol(m, n);
            let (fx, fy) = gradient(&f);
            let vals: Vec<Complex> = (0..g.len())
                .map(|i| {
                    let (row, col) = (i / g.n(), i % g.n());
                    let z = Complex::new(g.coord(col), g.coord(row));
                    let dzbar = 0.5 * (fx.values()[i] + Complex::i() * fy.values()[i]);
                    (z * f.values()[i] - t * dzbar) / (2.0 * t).sqrt() / ((m + 1) as f64).sqrt()
                })
                .collect();
            let raised = ComplexField2D::new(g, vals).unwrap();
            let expected = basis.symbol(m + 1, n);
            assert!(raised.relative_distance(&expected).unwrap() < 1e-9, "({m},{n})");
        }
    }

    #[test]
    fn landau_symbols_are_matrix_units() {
        let g = make_grid(64, 8.0).unwrap();
        let p = theta(1.0);
        let basis = LandauBasis::new(g, p, 3).unwrap();
        for (m, n, k, l) in [(0, 1, 1, 2), (1, 0, 0, 0), (2, 1, 1, 0), (0, 1, 0, 1), (1, 2, 2, 2)] {
            let prod = star(&basis.symbol(m, n), &basis.symbol(k, l), p).unwrap();
            if n == k {
                let expected = basis.symbol(m, l);
                assert!(prod.relative_distance(&expected).unwrap() < 1e-6, "({m}{n})({k}{l})");
            } else {
                assert!(prod.norm() < 1e-6 * basis.symbol(m, n).norm());
            }
        }
    }

    #[test]
    fn pointwise_symbol_matches_table() {
        let g = make_grid(16, 4.0).unwrap();
        let basis = LandauBasis::new(g, theta(0.8), 4).unwrap();
        for (m, n) in [(0, 0), (3, 1), (1, 3), (2, 2)] {
            let table = basis.symbol(m, n);
            let direct = ComplexField2D::from_fn(g, |x, y| landau_symbol(m, n, x, y, 0.8));
            assert!(table.sub(&direct).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn landau_round_trip_and_products() {
        let g = make_grid(64, 8.0).unwrap();
        let p = theta(1.0);
        let basis = LandauBasis::new(g, p, 4).unwrap();
        let phi0 = gauss(g, 0.0, 0.0, 1.0).scale(Complex::new(2.0, 0.0));
        let c = basis.project(&phi0).unwrap();
        let e00 = LandauCoefficients::diagonal(&[Complex::new(1.0, 0.0)], 4, 1.0).unwrap();
        assert!(c.max_abs_diff(&e00) < 1e-8);

        let mut coeffs = LandauCoefficients::zeros(4, 1.0).unwrap();
        coeffs.set(0, 2, Complex::new(0.3, -0.1));
        coeffs.set(3, 1, Complex::new(-1.0, 0.4));
        coeffs.set(2, 2, Complex::new(0.5, 0.0));
        let field = basis.synthesize(&coeffs).unwrap();
        assert!(basis.project(&field).unwrap().max_abs_diff(&coeffs) < 1e-8);

        let sq = star_landau(&e00, &e00).unwrap();
        assert_eq!(sq, e00);
        let id = LandauCoefficients::identity(4, 1.0).unwrap();
        assert_eq!(star_landau(&id, &coeffs).unwrap(), coeffs);
        assert_eq!(star_landau(&coeffs, &id).unwrap(), coeffs);
    }

    #[test]
    fn landau_errors() {
        let g = make_grid(16, 4.0).unwrap();
        assert!(LandauBasis::new(g, MoyalParams::commutative(), 3).is_err());
        assert!(to_landau(&ComplexField2D::zeros(g), 3, MoyalParams::commutative()).is_err());
        let a = LandauCoefficients::identity(3, 1.0).unwrap();
        let b = LandauCoefficients::identity(4, 1.0).unwrap();
        let c = LandauCoefficients::identity(3, 2.0).unwrap();
        assert!(matches!(star_landau(&a, &b), Err(Error::LandauMismatch(_))));
        assert!(matches!(star_landau(&a, &c), Err(Error::LandauMismatch(_))));
    }

    #[test]
    fn energy_of_ground_projector() {
        let g = make_grid(128, 8.0).unwrap();
        let p = theta(1.0);
        assert_eq!(energy(&ComplexField2D::zeros(g), p).unwrap(), 0.0);
        let phi0 = gauss(g, 0.0, 0.0, 1.0).scale(Complex::new(2.0, 0.0));
        let quartic = gradient_energy(&phi0) - energy(&phi0, p).unwrap();
        assert!((quartic - 2.0 * PI).abs() < 1e-6);
        // ∫|∇φ₀|² = 4·∫ 4r² e^{−2r²} dx = 4π.
        assert!((gradient_energy(&phi0) - 4.0 * PI).abs() < 1e-9);
        let basis = LandauBasis::new(g, p, 4).unwrap();
        assert!((energy_landau(&phi0, &basis).unwrap() - energy(&phi0, p).unwrap()).abs() < 1e-6);
        let rotated = phi0.scale(Complex::from_polar(1.0, 1.2));
        assert!((energy(&rotated, p).unwrap() - energy(&phi0, p).unwrap()).abs() < 1e-10);
    }
}
