//! Time integration of `i u_t = Δu + g u⋆ū⋆u` (default `g = 2`) with an
//! integrating-factor RK4 scheme: the linear part `e^{i|k|²t}` is exact in
//! Fourier space and RK4 acts on the transformed nonlinear term.
//!
//! The cubic term is dealiased as `T[(Tu)⋆(Tū)⋆(Tu)]`, with `T` zeroing modes
//! beyond 2/3 of the Nyquist wavenumber along either axis. Because `T` is a
//! real symmetric projector the semi-discrete flow conserves `∫|u|²` and the
//! energy [`NlsModel::energy`] exactly.

use std::f64::consts::PI;

use crate::ansatz::{fit_ansatz, winding_number};
use crate::error::{invalid, Error, Result};
use crate::moyal::{star_cubic_landau, star_landau, star_spectra, LandauBasis, MoyalParams};
use crate::spectral::{
    forward_transform, gradient_energy, inverse_transform, power, Complex, ComplexField2D, GridSpec,
    SpectrumField2D,
};

/// How `u⋆ū⋆u` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarBackend {
    /// Fourier twisted convolution on the grid.
    Quadrature,
    /// Matrix product in the first `cutoff` operator-basis levels.
    Landau { cutoff: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    pub theta: MoyalParams,
    pub star_backend: StarBackend,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_end: f64, snapshot_every: usize, theta: MoyalParams, star_backend: StarBackend) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", "must be positive and finite"));
        }
        if !(t_end.is_finite() && t_end >= dt) {
            return Err(invalid("t_end", "must be finite and at least dt"));
        }
        if snapshot_every == 0 {
            return Err(invalid("snapshot_every", "must be at least 1"));
        }
        if let StarBackend::Landau { cutoff } = star_backend {
            if cutoff == 0 {
                return Err(invalid("star_backend", "landau cutoff must be at least 1"));
            }
            if theta.theta() <= 0.0 {
                return Err(invalid("star_backend", "the landau backend requires theta > 0"));
            }
        }
        Ok(Self { dt, t_end, snapshot_every, theta, star_backend })
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

enum Backend {
    Quadrature,
    Landau(Box<LandauBasis>),
}

/// The discretized equation on a fixed grid.
pub struct NlsModel {
    grid: GridSpec,
    theta: MoyalParams,
    coupling: f64,
    mask: Vec<f64>,
    k2: Vec<f64>,
    backend: Backend,
}

impl NlsModel {
    pub fn new(grid: GridSpec, theta: MoyalParams, backend: StarBackend) -> Result<Self> {
        let ks = grid.wavenumbers();
        let n = grid.n();
        let cut = 2.0 / 3.0 * grid.k_max();
        let mut mask = vec![0.0; n * n];
        let mut k2 = vec![0.0; n * n];
        for (row, ky) in ks.iter().enumerate() {
            for (col, kx) in ks.iter().enumerate() {
                let idx = row * n + col;
                k2[idx] = kx * kx + ky * ky;
                if kx.abs() <= cut && ky.abs() <= cut {
                    mask[idx] = 1.0;
                }
            }
        }
        let backend = match backend {
            StarBackend::Quadrature => Backend::Quadrature,
            StarBackend::Landau { cutoff } => Backend::Landau(Box::new(LandauBasis::new(grid, theta, cutoff)?)),
        };
        Ok(Self { grid, theta, coupling: 2.0, mask, k2, backend })
    }

    /// Replaces the nonlinear coefficient `g`.
    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    fn dealias(&self, s: &mut SpectrumField2D) {
        for (z, &m) in s.values_mut().iter_mut().zip(&self.mask) {
            *z *= m;
        }
    }

    // T u in physical space from its spectrum.
    fn filtered(&self, uh: &SpectrumField2D) -> (SpectrumField2D, ComplexField2D) {
        let mut th = uh.clone();
        self.dealias(&mut th);
        let tu = inverse_transform(&th);
        (th, tu)
    }

    /// `(Tu)⋆(Tū)⋆(Tu)` in physical space.
    fn cubic_filtered(&self, uh: &SpectrumField2D) -> Result<ComplexField2D> {
        let (th, tu) = self.filtered(uh);
        match &self.backend {
            Backend::Quadrature => {
                let conj_h = forward_transform(&tu.conj());
                let left = star_spectra(&th, &conj_h, self.theta)?;
                Ok(inverse_transform(&star_spectra(&left, &th, self.theta)?))
            }
            Backend::Landau(basis) => {
                let c = basis.project(&tu)?;
                basis.synthesize(&star_cubic_landau(&c))
            }
        }
    }

    // Spectrum of the nonlinear part of u_t: −i g T[cubic].
    fn nonlinear_spectrum(&self, uh: &SpectrumField2D) -> Result<SpectrumField2D> {
        let mut s = forward_transform(&self.cubic_filtered(uh)?);
        self.dealias(&mut s);
        let factor = Complex::new(0.0, -self.coupling);
        for z in s.values_mut() {
            *z *= factor;
        }
        Ok(s)
    }

    /// `u_t = −i(Δu + g T[(Tu)⋆(Tū)⋆(Tu)])`.
    pub fn rhs(&self, u: &ComplexField2D) -> Result<ComplexField2D> {
        self.check(u)?;
        let mut s = forward_transform(u);
        let nl = self.nonlinear_spectrum(&s)?;
        for ((z, &k2), &n) in s.values_mut().iter_mut().zip(&self.k2).zip(nl.values()) {
            *z = Complex::new(0.0, k2) * *z + n;
        }
        Ok(inverse_transform(&s))
    }

    /// `∫|∇u|² − (g/2)∫|(Tū)⋆(Tu)|²`, conserved by the semi-discrete flow.
    /// With the operator-basis backend the quartic term is `2πΘ‖C†C‖²_F`.
    pub fn energy(&self, u: &ComplexField2D) -> Result<f64> {
        self.check(u)?;
        let (th, tu) = self.filtered(&forward_transform(u));
        let quartic = match &self.backend {
            Backend::Quadrature => {
                let conj_h = forward_transform(&tu.conj());
                power(&inverse_transform(&star_spectra(&conj_h, &th, self.theta)?))
            }
            Backend::Landau(basis) => {
                let c = basis.project(&tu)?;
                2.0 * PI * basis.theta() * star_landau(&c.adjoint(), &c)?.frobenius_norm().powi(2)
            }
        };
        Ok(gradient_energy(u) - 0.5 * self.coupling * quartic)
    }

    fn check(&self, u: &ComplexField2D) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn exp_linear(&self, h: f64) -> Vec<Complex> {
        self.k2.iter().map(|&k2| Complex::from_polar(1.0, k2 * h)).collect()
    }

    /// One integrating-factor RK4 step of length `h` on a spectrum.
    fn step_spectrum(&self, uh: &SpectrumField2D, h: f64, e_half: &[Complex], e_full: &[Complex]) -> Result<SpectrumField2D> {
        let combine = |f: &dyn Fn(usize) -> Complex| {
            let mut s = uh.clone();
            for (i, z) in s.values_mut().iter_mut().enumerate() {
                *z = f(i);
            }
            s
        };
        let u = uh.values();
        let ka = self.nonlinear_spectrum(uh)?;
        let a = ka.values();
        let ua = combine(&|i| e_half[i] * (u[i] + 0.5 * h * a[i]));
        let kb = self.nonlinear_spectrum(&ua)?;
        let b = kb.values();
        let ub = combine(&|i| e_half[i] * u[i] + 0.5 * h * b[i]);
        let kc = self.nonlinear_spectrum(&ub)?;
        let c = kc.values();
        let uc = combine(&|i| e_full[i] * u[i] + h * e_half[i] * c[i]);
        let kd = self.nonlinear_spectrum(&uc)?;
        let d = kd.values();
        let next = combine(&|i| {
            e_full[i] * u[i] + h / 6.0 * (e_full[i] * a[i] + 2.0 * e_half[i] * (b[i] + c[i]) + d[i])
        });
        if next.values().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(next)
    }

    /// Advances `u` by `dt`. The linear part is exact, so there is no
    /// `k_max²` restriction; accuracy requires `dt·max|g u⋆ū⋆u|/|u|` well
    /// below 1.
    pub fn step(&self, u: &ComplexField2D, dt: f64) -> Result<ComplexField2D> {
        self.check(u)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", "must be positive and finite"));
        }
        let next = self.step_spectrum(&forward_transform(u), dt, &self.exp_linear(0.5 * dt), &self.exp_linear(dt))?;
        Ok(inverse_transform(&next))
    }

    /// Fixed-step evolution with snapshots and diagnostics every
    /// `cfg.snapshot_every` steps (and at `t = 0`).
    pub fn evolve(&self, u0: &ComplexField2D, cfg: &EvolutionConfig) -> Result<Evolution> {
        self.check(u0)?;
        if cfg.theta != self.theta {
            return Err(invalid("theta", "configuration and model disagree"));
        }
        let e_half = self.exp_linear(0.5 * cfg.dt);
        let e_full = self.exp_linear(cfg.dt);
        let mut out = Evolution { snapshots: Vec::new(), diagnostics: Vec::new(), abort: None };
        out.record(self, 0.0, u0.clone())?;
        let mut uh = forward_transform(u0);
        for i in 1..=cfg.steps() {
            let t = i as f64 * cfg.dt;
            uh = match self.step_spectrum(&uh, cfg.dt, &e_half, &e_full) {
                Ok(s) => s,
                Err(e) => {
                    out.abort = Some(Error::BlowUp { t, reason: e.to_string() });
                    return Ok(out);
                }
            };
            if i % cfg.snapshot_every == 0 {
                out.record(self, t, inverse_transform(&uh))?;
            }
        }
        Ok(out)
    }
}

/// A field at a sampling time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: ComplexField2D,
}

/// One diagnostics sample. The fitted quantities are absent when the field
/// has no recognizable vortex (for instance a radially decaying bump).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub power: f64,
    pub energy: f64,
    pub r_fit: Option<f64>,
    pub omega_fit: Option<f64>,
    pub a_fit: Option<f64>,
    pub v_fit: Option<f64>,
    pub winding: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRow>,
    /// Set when the run stopped on a non-finite state; earlier samples are kept.
    pub abort: Option<Error>,
}

impl Evolution {
    fn record(&mut self, model: &NlsModel, t: f64, field: ComplexField2D) -> Result<()> {
        self.diagnostics.push(diagnose(model, t, &field)?);
        self.snapshots.push(Snapshot { t, field });
        Ok(())
    }

    /// True when every sample with a fitted vortex reports the same winding.
    pub fn winding_constant(&self) -> bool {
        let mut w = self.diagnostics.iter().filter_map(|d| d.winding);
        match w.next() {
            Some(first) => w.all(|x| x == first),
            None => true,
        }
    }
}

/// Power, energy and ansatz fit of one field.
pub fn diagnose(model: &NlsModel, t: f64, u: &ComplexField2D) -> Result<DiagnosticsRow> {
    let fit = fit_ansatz(u).ok();
    let winding = fit.and_then(|f| winding_number(u, f.params.radius).ok());
    Ok(DiagnosticsRow {
        t,
        power: power(u),
        energy: model.energy(u)?,
        r_fit: fit.map(|f| f.params.radius),
        omega_fit: fit.map(|f| f.params.omega),
        a_fit: fit.map(|f| f.params.a),
        v_fit: fit.map(|f| f.params.velocity),
        winding,
    })
}

/// `u_t` for the equation with the default coupling and no dealiasing
/// filter beyond what the grid imposes.
pub fn nls_rhs(u: &ComplexField2D, p: MoyalParams) -> Result<ComplexField2D> {
    NlsModel::new(*u.grid(), p, StarBackend::Quadrature)?.rhs(u)
}

/// One integrating-factor RK4 step with the quadrature backend.
pub fn step(u: &ComplexField2D, dt: f64, p: MoyalParams) -> Result<ComplexField2D> {
    NlsModel::new(*u.grid(), p, StarBackend::Quadrature)?.step(u, dt)
}

/// Runs [`NlsModel::evolve`] with the backend named in `cfg`.
pub fn evolve(u0: &ComplexField2D, cfg: &EvolutionConfig) -> Result<Evolution> {
    NlsModel::new(*u0.grid(), cfg.theta, cfg.star_backend)?.evolve(u0, cfg)
}

/// Relative L2 error of representing `u` in the first `cutoff` basis levels.
pub fn landau_truncation_error(u: &ComplexField2D, basis: &LandauBasis) -> Result<f64> {
    let back = basis.synthesize(&basis.project(u)?)?;
    back.relative_distance(u)
}

/// Second derivative of a least-squares quadratic through the first `count`
/// fitted radii. `None` when fewer than three of them have a fit.
pub fn fitted_radial_acceleration(rows: &[DiagnosticsRow], count: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().take(count).filter_map(|d| d.r_fit.map(|r| (d.t, r))).collect();
    if pts.len() < 3 {
        return None;
    }
    // Normal equations for R ≈ c0 + c1 t + c2 t², with t shifted to its mean.
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(t, r) in &pts {
        let x = [1.0, t - tm, (t - tm) * (t - tm)];
        for i in 0..3 {
            b[i] += x[i] * r;
            for j in 0..3 {
                m[i][j] += x[i] * x[j];
            }
        }
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut m2 = m;
    for i in 0..3 {
        m2[i][2] = b[i];
    }
    Some(2.0 * det(&m2) / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_states::phi_n;
    use crate::spectral::{inner, laplacian, make_grid};

    #[test]
    fn quadratic_acceleration_is_recovered() {
        let rows: Vec<DiagnosticsRow> = (0..5)
            .map(|i| {
                let t = 0.025 * i as f64;
                DiagnosticsRow {
                    t,
                    power: 0.0,
                    energy: 0.0,
                    r_fit: Some(2.0 + 0.3 * t - 1.5 * t * t),
                    omega_fit: None,
                    a_fit: None,
                    v_fit: None,
                    winding: None,
                }
            })
            .collect();
        let acc = fitted_radial_acceleration(&rows, 5).unwrap();
        assert!((acc + 3.0).abs() < 1e-8, "{acc}");
        assert!(fitted_radial_acceleration(&rows, 2).is_none());
    }

    fn gaussian(g: GridSpec) -> ComplexField2D {
        ComplexField2D::from_fn(g, |x, y| Complex::new((-(x * x + y * y)).exp(), 0.0))
    }

    fn blob(g: GridSpec) -> ComplexField2D {
        ComplexField2D::from_fn(g, |x, y| {
            let r2 = (x - 0.4).powi(2) + (y + 0.2).powi(2);
            Complex::new(0.8 + 0.3 * x, 0.2 * y - 0.1) * (-0.7 * r2).exp()
        })
    }

    #[test]
    fn config_validation() {
        let p = MoyalParams::new(1.0).unwrap();
        assert!(EvolutionConfig::new(0.0, 1.0, 1, p, StarBackend::Quadrature).is_err());
        assert!(EvolutionConfig::new(0.1, 0.05, 1, p, StarBackend::Quadrature).is_err());
        assert!(EvolutionConfig::new(0.1, 1.0, 0, p, StarBackend::Quadrature).is_err());
        assert!(EvolutionConfig::new(0.1, 1.0, 1, MoyalParams::commutative(), StarBackend::Landau { cutoff: 4 }).is_err());
        assert_eq!(EvolutionConfig::new(0.1, 1.0, 1, p, StarBackend::Quadrature).unwrap().steps(), 10);
    }

    #[test]
    fn rhs_of_zero_and_linear_limit() {
        let g = make_grid(64, 8.0).unwrap();
        let p = MoyalParams::new(1.0).unwrap();
        let zero = ComplexField2D::zeros(g);
        assert_eq!(nls_rhs(&zero, p).unwrap().max_abs(), 0.0);

        let u = gaussian(g);
        let model = NlsModel::new(g, p, StarBackend::Quadrature).unwrap().with_coupling(0.0);
        let got = model.rhs(&u).unwrap();
        // −iΔ e^{−r²} = −i(4r² − 4)e^{−r²}
        let want = ComplexField2D::from_fn(g, |x, y| {
            let r2 = x * x + y * y;
            Complex::new(0.0, -(4.0 * r2 - 4.0) * (-r2).exp())
        });
        assert!(got.sub(&want).unwrap().max_abs() < 1e-8);
        assert!(laplacian(&u).scale(Complex::new(0.0, -1.0)).relative_distance(&got).unwrap() < 1e-12);
    }

    #[test]
    fn rhs_preserves_power_structure() {
        let g = make_grid(64, 8.0).unwrap();
        let u = blob(g);
        for backend in [StarBackend::Quadrature, StarBackend::Landau { cutoff: 10 }] {
            let model = NlsModel::new(g, MoyalParams::new(1.0).unwrap(), backend).unwrap();
            let z = inner(&u, &model.rhs(&u).unwrap()).unwrap();
            // d/dt ∫|u|² = 2 Re ∫ū u_t
            assert!(z.re.abs() < 1e-10 * z.norm().max(power(&u)), "{z}");
        }
    }

    #[test]
    fn zero_field_is_fixed() {
        let g = make_grid(32, 8.0).unwrap();
        let zero = ComplexField2D::zeros(g);
        assert_eq!(step(&zero, 0.1, MoyalParams::new(1.0).unwrap()).unwrap(), zero);
    }

    #[test]
    fn free_propagation_matches_closed_form() {
        let g = make_grid(128, 8.0).unwrap();
        let model = NlsModel::new(g, MoyalParams::new(1.0).unwrap(), StarBackend::Quadrature)
            .unwrap()
            .with_coupling(0.0);
        let mut u = gaussian(g);
        for _ in 0..10 {
            u = model.step(&u, 0.01).unwrap();
        }
        let t = 0.1;
        let s = Complex::new(1.0, -4.0 * t);
        let exact = ComplexField2D::from_fn(g, |x, y| (-(x * x + y * y) / s).exp() / s);
        let err = u.sub(&exact).unwrap().norm() * g.dx();
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn ground_projector_keeps_its_power_briefly() {
        let g = make_grid(64, 8.0).unwrap();
        let p = MoyalParams::new(1.0).unwrap();
        let cfg = EvolutionConfig::new(0.01, 0.1, 5, p, StarBackend::Landau { cutoff: 8 }).unwrap();
        let run = evolve(&phi_n(0, g), &cfg).unwrap();
        assert!(run.abort.is_none());
        assert_eq!(run.snapshots.len(), 3);
        let p0 = run.diagnostics[0].power;
        for d in &run.diagnostics {
            assert!((d.power - p0).abs() < 1e-8 * p0, "{} {}", d.power, p0);
            assert!(d.r_fit.is_none());
        }
        assert!(run.winding_constant());
    }
}
