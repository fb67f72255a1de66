//! Reduced (averaged-Lagrangian) vortex dynamics: the Peierls–Nabarro
//! potential `F`, the averaged Lagrangian and its variational residuals, the
//! quasi-static peak dynamics, its fixed-point lattice and Landau cells.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::moyal::MoyalParams;
use crate::numerics::{bisect, integrate};

/// Which phase the P-N potential carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeVariant {
    /// Phase `R²/(2Θ) + π/4`: lattice radii grow like `√n`.
    Charge1Quadratic,
    /// Phase `R + π/4`: equispaced lattice for large charge.
    ChargemEquispaced,
}

impl LatticeVariant {
    pub const ALL: [LatticeVariant; 2] = [LatticeVariant::Charge1Quadratic, LatticeVariant::ChargemEquispaced];

    pub fn name(self) -> &'static str {
        match self {
            LatticeVariant::Charge1Quadratic => "charge1_quadratic",
            LatticeVariant::ChargemEquispaced => "chargem_equispaced",
        }
    }

    /// The cosine/sine argument `ψ(R)`.
    pub fn phase(self, r: f64, theta: f64) -> f64 {
        match self {
            LatticeVariant::Charge1Quadratic => r * r / (2.0 * theta) + FRAC_PI_4,
            LatticeVariant::ChargemEquispaced => r + FRAC_PI_4,
        }
    }

    /// `dψ/dR`.
    pub fn phase_derivative(self, r: f64, theta: f64) -> f64 {
        match self {
            LatticeVariant::Charge1Quadratic => r / theta,
            LatticeVariant::ChargemEquispaced => 1.0,
        }
    }

    // Inverse of `phase` on R > 0.
    fn radius_at_phase(self, psi: f64, theta: f64) -> f64 {
        match self {
            LatticeVariant::Charge1Quadratic => (2.0 * theta * (psi - FRAC_PI_4)).max(0.0).sqrt(),
            LatticeVariant::ChargemEquispaced => (psi - FRAC_PI_4).max(0.0),
        }
    }
}

impl fmt::Display for LatticeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LatticeVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| invalid("variant", format!("unknown lattice variant `{s}`")))
    }
}

/// Slowly varying parameters of the trial vortex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationState {
    pub t: f64,
    pub a: f64,
    pub omega: f64,
    pub radius: f64,
    pub velocity: f64,
    pub sigma: f64,
}

impl ModulationState {
    pub fn new(t: f64, a: f64, omega: f64, radius: f64, velocity: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("omega", omega), ("R", radius)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        if !(t.is_finite() && velocity.is_finite() && sigma.is_finite()) {
            return Err(invalid("state", "t, V and sigma must be finite"));
        }
        Ok(Self { t, a, omega, radius, velocity, sigma })
    }
}

fn require_theta(p: MoyalParams) -> Result<f64> {
    if p.theta() > 0.0 {
        Ok(p.theta())
    } else {
        Err(invalid("theta", "must be positive"))
    }
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, "must be positive and finite"))
    }
}

/// `2 + (1+V)²/2 + 5(1−V)²/8`, the velocity-dependent Gaussian rate.
pub fn velocity_factor(v: f64) -> f64 {
    2.0 + 0.5 * (1.0 + v).powi(2) + 0.625 * (1.0 - v).powi(2)
}

fn velocity_factor_derivative(v: f64) -> f64 {
    (1.0 + v) - 1.25 * (1.0 - v)
}

/// The P-N potential `F(R, ω, V) = cos ψ(R) e^{−ω²R²c(V)} / (4√R)`.
pub fn pn_potential(r: f64, omega: f64, v: f64, p: MoyalParams, variant: LatticeVariant) -> Result<f64> {
    require_positive("R", r)?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(invalid("omega", "must be nonnegative and finite"));
    }
    let theta = require_theta(p)?;
    let damping = (-omega * omega * r * r * velocity_factor(v)).exp();
    Ok(variant.phase(r, theta).cos() * damping / (4.0 * r.sqrt()))
}

/// Partial derivatives of [`pn_potential`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnGradient {
    pub d_r: f64,
    pub d_omega: f64,
    pub d_v: f64,
}

pub fn pn_gradient(r: f64, omega: f64, v: f64, p: MoyalParams, variant: LatticeVariant) -> Result<PnGradient> {
    let f = pn_potential(r, omega, v, p, variant)?;
    let theta = p.theta();
    let c = velocity_factor(v);
    let psi = variant.phase(r, theta);
    let damping = (-omega * omega * r * r * c).exp();
    let d_amp_cos = -psi.cos() / (8.0 * r.powf(1.5)) - psi.sin() * variant.phase_derivative(r, theta) / (4.0 * r.sqrt());
    Ok(PnGradient {
        d_r: d_amp_cos * damping - 2.0 * omega * omega * r * c * f,
        d_omega: -2.0 * omega * r * r * c * f,
        d_v: -omega * omega * r * r * velocity_factor_derivative(v) * f,
    })
}

/// The nonlocal part of the averaged Lagrangian as a k-integral,
/// `(a⁴R^{5/2}ω²/((2π)³Θ)) ∫₀^∞ e^{−ω²k²c(V)} sin²(k²Θ/2) sin⁴(kR) k dk`,
/// cut where the Gaussian weight drops below `1e−16` and integrated to `1e−8`
/// relative accuracy.
pub fn lstar_numeric(a: f64, omega: f64, r: f64, v: f64, p: MoyalParams) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("R", r)?;
    let theta = require_theta(p)?;
    if !(a.is_finite() && v.is_finite()) {
        return Err(invalid("a", "a and V must be finite"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let c = velocity_factor(v);
    let k_cut = (16.0 * 10f64.ln() / (omega * omega * c)).sqrt();
    let integrand = |k: f64| {
        let s = (k * r).sin();
        (-omega * omega * k * k * c).exp() * (0.5 * k * k * theta).sin().powi(2) * s.powi(4) * k
    };
    let oscillations = (theta * k_cut * k_cut / 2.0 + 4.0 * r * k_cut) / (2.0 * PI);
    let panels = (4.0 * oscillations).ceil().max(64.0) as usize;
    let integral = integrate(integrand, 0.0, k_cut, 1e-10, 0.0, panels)?;
    Ok(a.powi(4) * r.powf(2.5) * omega * omega / ((2.0 * PI).powi(3) * theta) * integral.value)
}

/// The large-`R` closed form `−(a⁴/((8π)³Θ)) ω²R^{5/2} (1/(2ω²) + F(R, ω, V))`
/// with the charge-1 potential.
pub fn lstar_asymptotic(a: f64, omega: f64, r: f64, v: f64, p: MoyalParams) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("R", r)?;
    let theta = require_theta(p)?;
    if !(a.is_finite() && v.is_finite()) {
        return Err(invalid("a", "a and V must be finite"));
    }
    let f = pn_potential(r, omega, v, p, LatticeVariant::Charge1Quadratic)?;
    Ok(-a.powi(4) / ((8.0 * PI).powi(3) * theta) * omega * omega * r.powf(2.5) * (0.5 / (omega * omega) + f))
}

/// The averaged Lagrangian
/// `2a²ωR³σ̇ + 2a²ωR + 2a²ωR³(VṘ − V²/2) + 2a²R³/(3ω) − a⁴R/((8π)³Θ) − F`.
///
/// The fields of `state` are used as given (no positivity check), so the
/// `a = 0` limit can be evaluated.
pub fn avg_lagrangian(
    state: &ModulationState,
    dsigma_dt: f64,
    dr_dt: f64,
    p: MoyalParams,
    variant: LatticeVariant,
) -> Result<f64> {
    let ModulationState { a, omega, radius: r, velocity: v, .. } = *state;
    let theta = require_theta(p)?;
    let a2 = a * a;
    let f = pn_potential(r, omega, v, p, variant)?;
    Ok(2.0 * a2 * omega * r.powi(3) * dsigma_dt
        + 2.0 * a2 * omega * r
        + 2.0 * a2 * omega * r.powi(3) * (v * dr_dt - 0.5 * v * v)
        + 2.0 * a2 * r.powi(3) / (3.0 * omega)
        - a2 * a2 * r / ((8.0 * PI).powi(3) * theta)
        - f)
}

/// Time derivatives entering the variational equations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModulationRates {
    /// `d(a²ωR)/dt`
    pub mass: f64,
    /// `dσ/dt`
    pub sigma: f64,
    /// `dR/dt`
    pub radius: f64,
    /// `d(a²ωR³V)/dt`
    pub momentum: f64,
}

/// Left-hand sides of the five variational equations, ordered
/// `[δσ, δa, δω, δV, δR]`:
///
/// - `δσ`: `d(2a²ωR)/dt`
/// - `δa`: `4aωR³σ̇ + 4aR³/(3ω) − Ra³/(2Θ)`
/// - `δω`: `2a²R³σ̇ − 2a²R³/(3ω²) + ∂_ω F`
/// - `δV`: `Ṙ − V − ∂_V F`
/// - `δR`: `2 d(a²ωR³V)/dt + 6a²ωR²σ̇ + 2a²ω + 6a²ωR²(VṘ − V²/2) + 2a²R²/ω − a⁴/((8π)³Θ) − ∂_R F`
pub fn modulation_residuals(
    state: &ModulationState,
    rates: &ModulationRates,
    p: MoyalParams,
    variant: LatticeVariant,
) -> Result<[f64; 5]> {
    let ModulationState { a, omega, radius: r, velocity: v, .. } = *state;
    let theta = require_theta(p)?;
    let grad = pn_gradient(r, omega, v, p, variant)?;
    let a2 = a * a;
    let r2 = r * r;
    let r3 = r2 * r;
    Ok([
        2.0 * rates.mass,
        4.0 * a * omega * r3 * rates.sigma + 4.0 * a * r3 / (3.0 * omega) - r * a2 * a / (2.0 * theta),
        2.0 * a2 * r3 * rates.sigma - 2.0 * a2 * r3 / (3.0 * omega * omega) + grad.d_omega,
        rates.radius - v - grad.d_v,
        2.0 * rates.momentum
            + 6.0 * a2 * omega * r2 * rates.sigma
            + 2.0 * a2 * omega
            + 6.0 * a2 * omega * r2 * (v * rates.radius - 0.5 * v * v)
            + 2.0 * a2 * r2 / omega
            - a2 * a2 / ((8.0 * PI).powi(3) * theta)
            - grad.d_r,
    ])
}

/// The steady amplitude–width relation `a = 32√(Θ/(3ω))`.
pub fn amplitude_width(omega: f64, p: MoyalParams) -> Result<f64> {
    require_positive("omega", omega)?;
    Ok(32.0 * (p.theta() / (3.0 * omega)).sqrt())
}

/// The amplitude at which the `F`-independent parts of the `δa` and `δω`
/// residuals vanish together: eliminating `σ̇ = 1/(3ω²)` from `δω` in `δa`
/// leaves `a = 4R√(Θ/(3ω))`.
pub fn residual_consistent_amplitude(omega: f64, r: f64, p: MoyalParams) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("R", r)?;
    Ok(4.0 * r * (p.theta() / (3.0 * omega)).sqrt())
}

/// Radial force of the quasi-static peak equation divided by `a²ω`:
/// `(a²ω³/(2Θ²)) R³ sin ψ(R)`.
pub fn peak_force(r: f64, a: f64, omega: f64, p: MoyalParams, variant: LatticeVariant) -> f64 {
    let theta = p.theta();
    a * a * omega.powi(3) / (2.0 * theta * theta) * r.powi(3) * variant.phase(r, theta).sin()
}

/// `d(peak_force)/dR`.
pub fn peak_force_derivative(r: f64, a: f64, omega: f64, p: MoyalParams, variant: LatticeVariant) -> f64 {
    let theta = p.theta();
    let psi = variant.phase(r, theta);
    a * a * omega.powi(3) / (2.0 * theta * theta)
        * (3.0 * r * r * psi.sin() + r.powi(3) * psi.cos() * variant.phase_derivative(r, theta))
}

/// Right-hand side of the peak equation: `(Ṙ, d(RV)/dt) = (V, peak_force(R))`.
pub fn peak_rhs(r: f64, v: f64, a: f64, omega: f64, p: MoyalParams, variant: LatticeVariant) -> (f64, f64) {
    (v, peak_force(r, a, omega, p, variant))
}

/// Angular frequency of small oscillations about a root `R*` with
/// `peak_force_derivative < 0`: `Ω² = −f'(R*)/R*`.
pub fn oscillation_frequency(r_star: f64, a: f64, omega: f64, p: MoyalParams, variant: LatticeVariant) -> f64 {
    (-peak_force_derivative(r_star, a, omega, p, variant) / r_star).max(0.0).sqrt()
}

/// Largest step for which RK4 resolves the local oscillation at `R`:
/// `0.1/√(|f'(R)|/R)`.
pub fn suggested_dt(r: f64, a: f64, omega: f64, p: MoyalParams, variant: LatticeVariant) -> f64 {
    0.1 / (peak_force_derivative(r, a, omega, p, variant).abs() / r).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSample {
    pub t: f64,
    pub radius: f64,
    pub velocity: f64,
    /// `½(RV)² − G(R)` with `G' = R·peak_force`, `G(R₀) = 0`; constant for the exact flow.
    pub invariant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakTrajectory {
    pub samples: Vec<PeakSample>,
    /// Set when the run stopped early; `samples` holds the partial series.
    pub abort: Option<Error>,
}

/// Fixed-step RK4 on `(R, P = RV)` with `Ṙ = P/R`, `Ṗ = peak_force(R)`, `a`
/// and `ω` frozen. Every step is recorded. For accuracy `dt` should not
/// exceed [`suggested_dt`] over the visited range.
#[allow(clippy::too_many_arguments)]
pub fn evolve_peak(
    r0: f64,
    v0: f64,
    a: f64,
    omega: f64,
    p: MoyalParams,
    variant: LatticeVariant,
    dt: f64,
    t_end: f64,
) -> Result<PeakTrajectory> {
    require_positive("R0", r0)?;
    require_positive("dt", dt)?;
    require_positive("a", a)?;
    require_positive("omega", omega)?;
    let theta = require_theta(p)?;
    if !v0.is_finite() {
        return Err(invalid("V0", "must be finite"));
    }
    if !(t_end.is_finite() && t_end >= dt) {
        return Err(invalid("t_end", "must be finite and at least dt"));
    }
    let force = |r: f64| peak_force(r, a, omega, p, variant);
    let potential = |r: f64| -> Result<f64> {
        let panels = ((r - r0).abs() / 0.25).ceil().max(1.0) as usize;
        // Absolute floor at roundoff of the largest integrand on the interval,
        // since G(R) passes through zero near R0.
        let scale = a * a * omega.powi(3) / (2.0 * theta * theta) * r.max(r0).powi(4);
        let floor = 1e-15 * scale * (r - r0).abs();
        Ok(integrate(|s| s * force(s), r0, r, 1e-13, floor, panels)?.value)
    };
    let rhs = |r: f64, pm: f64| (pm / r, force(r));

    let steps = (t_end / dt).round() as usize;
    let (mut r, mut pm) = (r0, r0 * v0);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(PeakSample { t: 0.0, radius: r, velocity: v0, invariant: 0.5 * pm * pm });
    for i in 1..=steps {
        let t = i as f64 * dt;
        let (k1r, k1p) = rhs(r, pm);
        let (k2r, k2p) = rhs(r + 0.5 * dt * k1r, pm + 0.5 * dt * k1p);
        let (k3r, k3p) = rhs(r + 0.5 * dt * k2r, pm + 0.5 * dt * k2p);
        let (k4r, k4p) = rhs(r + dt * k3r, pm + dt * k3p);
        r += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        pm += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !(r.is_finite() && pm.is_finite()) || r <= 0.0 {
            let reason = if r <= 0.0 { "radius reached zero" } else { "non-finite state" };
            return Ok(PeakTrajectory { samples, abort: Some(Error::BlowUp { t, reason: reason.into() }) });
        }
        let invariant = match potential(r) {
            Ok(g) => 0.5 * pm * pm - g,
            Err(e) => return Ok(PeakTrajectory { samples, abort: Some(e) }),
        };
        samples.push(PeakSample { t, radius: r, velocity: pm / r, invariant });
    }
    Ok(PeakTrajectory { samples, abort: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub index: usize,
    pub radius: f64,
    pub stability: Stability,
    /// Reference radius `√(2kπΘ)` (charge 1) or `kπ` (equispaced).
    pub paper_radius: f64,
}

/// The first `n_max` zeros of the peak force on `R > 0`, found by bisection
/// inside `ψ ∈ [kπ − π/2, kπ + π/2]`, with stability from the sign of the
/// force derivative.
pub fn fixed_points(p: MoyalParams, n_max: usize, variant: LatticeVariant) -> Result<Vec<FixedPoint>> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    let theta = require_theta(p)?;
    let force = |r: f64| peak_force(r, 1.0, 1.0, p, variant);
    (1..=n_max)
        .map(|k| {
            let center = k as f64 * PI;
            let lo = variant.radius_at_phase(center - 0.5 * PI, theta);
            let hi = variant.radius_at_phase(center + 0.5 * PI, theta);
            let radius = bisect(force, lo, hi, 4.0 * f64::EPSILON * hi)?;
            let stability = if peak_force_derivative(radius, 1.0, 1.0, p, variant) < 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            let paper_radius = match variant {
                LatticeVariant::Charge1Quadratic => (2.0 * k as f64 * PI * theta).sqrt(),
                LatticeVariant::ChargemEquispaced => k as f64 * PI,
            };
            Ok(FixedPoint { index: k, radius, stability, paper_radius })
        })
        .collect()
}

/// `Aₙ = 2πRₙ(Rₙ₊₁ − Rₙ)` over consecutive entries.
pub fn landau_cell_areas(fps: &[FixedPoint]) -> Result<Vec<f64>> {
    if fps.len() < 2 {
        return Err(invalid("fixed_points", "at least two fixed points required"));
    }
    Ok(fps.windows(2).map(|w| 2.0 * PI * w[0].radius * (w[1].radius - w[0].radius)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(t: f64) -> MoyalParams {
        MoyalParams::new(t).unwrap()
    }
    const C1: LatticeVariant = LatticeVariant::Charge1Quadratic;
    const CM: LatticeVariant = LatticeVariant::ChargemEquispaced;

    #[test]
    fn variant_names_round_trip() {
        for v in LatticeVariant::ALL {
            assert_eq!(v.name().parse::<LatticeVariant>().unwrap(), v);
        }
        assert!("charge2".parse::<LatticeVariant>().is_err());
    }

    #[test]
    fn pn_potential_examples() {
        let r0 = (PI / 2.0).sqrt();
        for (w, v) in [(0.0, 0.0), (0.3, 0.5), (1.0, -1.0)] {
            assert!(pn_potential(r0, w, v, th(1.0), C1).unwrap().abs() < 1e-15);
        }
        let direct = 0.25 * (0.5 + FRAC_PI_4).cos();
        let got = pn_potential(1.0, 0.0, 0.0, th(1.0), C1).unwrap();
        assert!((got - direct).abs() < 1e-15);
        assert!((got - 0.070_384_882_785_675_19).abs() < 1e-15);
        let mags: Vec<f64> = (0..20).map(|i| pn_potential(2.0, 0.1 * i as f64, 0.2, th(1.0), C1).unwrap().abs()).collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]));
        assert!(pn_potential(0.0, 0.0, 0.0, th(1.0), C1).is_err());
        assert!(pn_potential(-1.0, 0.0, 0.0, th(1.0), C1).is_err());
        // the equispaced variant swaps only the phase
        let cm = pn_potential(1.0, 0.0, 0.0, th(1.0), CM).unwrap();
        assert!((cm - 0.25 * (1.0 + FRAC_PI_4).cos()).abs() < 1e-15);
    }

    #[test]
    fn pn_gradient_matches_central_differences() {
        let h = 1e-6;
        for variant in LatticeVariant::ALL {
            for &(r, w, v, t) in &[(2.3, 0.2, 0.1, 1.0), (5.0, 0.05, -0.3, 0.7), (1.1, 0.4, 0.8, 2.0)] {
                let p = th(t);
                let g = pn_gradient(r, w, v, p, variant).unwrap();
                let f = |r, w, v| pn_potential(r, w, v, p, variant).unwrap();
                let fd = [
                    (f(r + h, w, v) - f(r - h, w, v)) / (2.0 * h),
                    (f(r, w + h, v) - f(r, w - h, v)) / (2.0 * h),
                    (f(r, w, v + h) - f(r, w, v - h)) / (2.0 * h),
                ];
                let scale = f(r, w, v).abs().max(fd.iter().fold(0.0f64, |m, x| m.max(x.abs())));
                for (an, num) in [g.d_r, g.d_omega, g.d_v].into_iter().zip(fd) {
                    assert!((an - num).abs() <= 1e-6 * scale, "{an} vs {num}");
                }
            }
        }
    }

    #[test]
    fn lstar_scaling_and_zero() {
        let p = th(1.0);
        assert_eq!(lstar_numeric(0.0, 0.3, 3.0, 0.0, p).unwrap(), 0.0);
        let one = lstar_numeric(1.0, 0.3, 3.0, 0.1, p).unwrap();
        let two = lstar_numeric(2.0, 0.3, 3.0, 0.1, p).unwrap();
        assert!((two / one - 16.0).abs() < 1e-12);
        let one = lstar_asymptotic(1.0, 0.3, 3.0, 0.1, p).unwrap();
        let two = lstar_asymptotic(2.0, 0.3, 3.0, 0.1, p).unwrap();
        assert!((two / one - 16.0).abs() < 1e-12);
        assert!(lstar_numeric(1.0, 0.0, 3.0, 0.0, p).is_err());
    }

    #[test]
    fn lstar_numeric_matches_trapezoid() {
        let (a, w, r, v, t) = (1.0, 0.1, 8.0, 0.0, 1.0);
        let got = lstar_numeric(a, w, r, v, th(t)).unwrap();
        let c = velocity_factor(v);
        let k_cut = (16.0 * 10f64.ln() / (w * w * c)).sqrt();
        let n = 2_000_000;
        let h = k_cut / n as f64;
        let f = |k: f64| (-w * w * k * k * c).exp() * (0.5 * k * k * t).sin().powi(2) * (k * r).sin().powi(4) * k;
        let mut sum = 0.5 * (f(0.0) + f(k_cut));
        for i in 1..n {
            sum += f(i as f64 * h);
        }
        let oracle = a.powi(4) * r.powf(2.5) * w * w / ((2.0 * PI).powi(3) * t) * sum * h;
        assert!((got - oracle).abs() / oracle.abs() < 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn lstar_asymptotic_at_potential_zero() {
        let p = th(1.0);
        // cos ψ vanishes where R² = π/2 + 2jπ.
        for j in [0.0, 1.0, 2.0] {
            let r = (PI / 2.0 + 2.0 * j * PI).sqrt();
            let got = lstar_asymptotic(1.3, 0.2, r, 0.0, p).unwrap();
            let want = -(1.3f64).powi(4) / (8.0 * PI).powi(3) * r.powf(2.5) / 2.0;
            assert!((got - want).abs() < 1e-12 * want.abs());
        }
    }

    #[test]
    fn avg_lagrangian_examples() {
        let p = th(1.0);
        let zero_a = ModulationState { t: 0.0, a: 0.0, omega: 0.4, radius: 2.0, velocity: 0.1, sigma: 0.0 };
        let f = pn_potential(2.0, 0.4, 0.1, p, C1).unwrap();
        assert!((avg_lagrangian(&zero_a, 0.7, 0.3, p, C1).unwrap() + f).abs() < 1e-15);

        let s = ModulationState::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let want = 2.0 + 2.0 / 3.0 - 1.0 / (8.0 * PI).powi(3) - pn_potential(1.0, 1.0, 0.0, p, C1).unwrap();
        assert!((avg_lagrangian(&s, 0.0, 0.0, p, C1).unwrap() - want).abs() < 1e-14);

        let s = ModulationState::new(0.0, 0.8, 0.6, 2.5, 0.2, 0.0).unwrap();
        let l0 = avg_lagrangian(&s, 0.0, 0.1, p, C1).unwrap();
        let l1 = avg_lagrangian(&s, 1.5, 0.1, p, C1).unwrap();
        let slope = 2.0 * 0.64 * 0.6 * 2.5f64.powi(3);
        assert!(((l1 - l0) / 1.5 - slope).abs() < 1e-12 * slope);
    }

    #[test]
    fn residual_examples() {
        let p = th(1.0);
        // Far out with a wide vortex F and its gradient are negligible.
        let s = ModulationState::new(0.0, 1.0, 3.0, 10.0, 0.25, 0.0).unwrap();
        let rates = ModulationRates { radius: 0.25, ..Default::default() };
        let res = modulation_residuals(&s, &rates, p, C1).unwrap();
        assert_eq!(res[0], 0.0);
        assert!(res[3].abs() < 1e-300);

        // With σ̇ = 1/(3ω²) the F-free δω part vanishes; δa then requires a = 4R√(Θ/(3ω)).
        let (w, r) = (0.5, 3.0);
        let a = residual_consistent_amplitude(w, r, p).unwrap();
        let s = ModulationState::new(0.0, a, w, r, 0.0, 0.0).unwrap();
        let rates = ModulationRates { sigma: 1.0 / (3.0 * w * w), ..Default::default() };
        let res = modulation_residuals(&s, &rates, p, C1).unwrap();
        let grad = pn_gradient(r, w, 0.0, p, C1).unwrap();
        assert!(res[1].abs() < 1e-10 * a.powi(3));
        assert!((res[2] - grad.d_omega).abs() < 1e-10 * a * a);
        // The printed relation agrees only at R = 8.
        let printed = amplitude_width(w, p).unwrap();
        assert!((printed / a - 8.0 / r).abs() < 1e-12);
        assert!((residual_consistent_amplitude(w, 8.0, p).unwrap() - printed).abs() < 1e-12);
    }

    #[test]
    fn amplitude_width_examples() {
        assert!((amplitude_width(1.0, th(3.0)).unwrap() - 32.0).abs() < 1e-12);
        assert!((amplitude_width(1.0, th(1.0)).unwrap() - 18.475_208_614_068_02).abs() < 1e-9);
        let w = 0.37;
        let ratio = amplitude_width(w / 4.0, th(1.0)).unwrap() / amplitude_width(w, th(1.0)).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);
        assert!(amplitude_width(0.0, th(1.0)).is_err());
    }

    #[test]
    fn peak_rhs_examples() {
        let p = th(1.0);
        let fps = fixed_points(p, 3, C1).unwrap();
        let r1 = fps[0].radius;
        let (dr, dp) = peak_rhs(r1, 0.0, 1.0, 1.0, p, C1);
        assert_eq!(dr, 0.0);
        assert!(dp.abs() < 1e-12);
        assert!(peak_force(r1 * 1.001, 1.0, 1.0, p, C1) < 0.0);
        assert!(peak_force(r1 * 0.999, 1.0, 1.0, p, C1) > 0.0);
        let base = peak_force(2.9, 1.0, 1.0, p, C1);
        let scaled = peak_force(2.9, 2.0, 0.5, p, C1);
        assert!((scaled / base - 4.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_examples() {
        let p = th(1.0);
        let fps = fixed_points(p, 5, C1).unwrap();
        assert!((fps[0].radius - (1.5 * PI).sqrt()).abs() < 1e-12);
        assert!((fps[0].radius - 2.170_80).abs() < 1e-5);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!((fps[0].paper_radius - 2.506_63).abs() < 1e-5);
        assert!((fps[1].radius - 3.315_96).abs() < 1e-5);
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!(fixed_points(p, 0, C1).is_err());

        let fps = fixed_points(th(0.7), 30, CM).unwrap();
        for (k, fp) in fps.iter().enumerate() {
            let want = (k + 1) as f64 * PI - FRAC_PI_4;
            assert!((fp.radius - want).abs() < 1e-12);
        }
    }

    #[test]
    fn landau_areas_from_reference_radii() {
        let reference: Vec<FixedPoint> = (1..=11)
            .map(|k| FixedPoint {
                index: k,
                radius: (2.0 * PI * k as f64).sqrt(),
                stability: Stability::Stable,
                paper_radius: 0.0,
            })
            .collect();
        let areas = landau_cell_areas(&reference).unwrap();
        let a1 = 2.0 * PI * (2.0 * PI).sqrt() * ((4.0 * PI).sqrt() - (2.0 * PI).sqrt());
        assert!((areas[0] - a1).abs() < 1e-12);
        assert!((areas[0] - 16.35).abs() < 0.01);
        let a10 = 2.0 * PI * (20.0 * PI).sqrt() * ((22.0 * PI).sqrt() - (20.0 * PI).sqrt());
        assert!((areas[9] - a10).abs() < 1e-12);
        assert!((areas[9] - 19.269).abs() < 1e-3);
        assert!(landau_cell_areas(&reference[..1]).is_err());

        let eq = fixed_points(th(1.0), 6, CM).unwrap();
        let areas = landau_cell_areas(&eq).unwrap();
        for (fp, a) in eq.iter().zip(&areas) {
            assert!((a - 2.0 * PI * PI * fp.radius).abs() < 1e-10);
        }
    }

    #[test]
    fn evolve_peak_rest_at_stable_root() {
        let p = th(1.0);
        let r1 = fixed_points(p, 1, C1).unwrap()[0].radius;
        let traj = evolve_peak(r1, 0.0, 1.0, 1.0, p, C1, 0.01, 10.0).unwrap();
        assert!(traj.abort.is_none());
        assert!(traj.samples.iter().all(|s| (s.radius - r1).abs() < 1e-12));
        assert!(evolve_peak(r1, 0.0, 1.0, 1.0, p, C1, 0.0, 1.0).is_err());
    }
}
