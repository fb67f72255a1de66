use std::f64::consts::PI;

use moyal_vortex::moyal::MoyalParams;
use moyal_vortex::reduced::{evolve_peak, fixed_points, oscillation_frequency, LatticeVariant};

const VARIANT: LatticeVariant = LatticeVariant::Charge1Quadratic;

fn setup() -> (MoyalParams, f64, f64) {
    let p = MoyalParams::new(1.0).unwrap();
    let r1 = fixed_points(p, 1, VARIANT).unwrap()[0].radius;
    (p, r1, 2.0 * PI / oscillation_frequency(r1, 1.0, 0.5, p, VARIANT))
}

fn invariant_drift(dt: f64, t_end: f64) -> f64 {
    let (p, r1, _) = setup();
    let traj = evolve_peak(1.05 * r1, 0.0, 1.0, 0.5, p, VARIANT, dt, t_end).unwrap();
    assert!(traj.abort.is_none());
    let first = traj.samples[0].invariant;
    traj.samples.iter().map(|s| (s.invariant - first).abs()).fold(0.0, f64::max)
}

// At coarse steps a fifth-order term still dominates the drift, so the
// halving ratio approaches 2⁴ from above as dt shrinks.
#[test]
fn invariant_error_is_fourth_order() {
    let (_, _, period) = setup();
    let ratios: Vec<f64> = [40.0, 80.0, 160.0]
        .iter()
        .map(|k| invariant_drift(period / k, 4.0 * period) / invariant_drift(period / (2.0 * k), 4.0 * period))
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    let order = ratios[2].log2();
    assert!((3.5..=5.0).contains(&order), "{ratios:?}");
}

#[test]
fn small_oscillation_period_matches_linearization() {
    let (p, r1, period) = setup();
    let dt = period / 400.0;
    let traj = evolve_peak(r1 * (1.0 + 1e-4), 0.0, 1.0, 0.5, p, VARIANT, dt, 3.0 * period).unwrap();
    // Upward crossings of R₁ are one period apart.
    let crossings: Vec<f64> = traj
        .samples
        .windows(2)
        .filter(|w| w[0].radius < r1 && w[1].radius >= r1)
        .map(|w| {
            let f = (r1 - w[0].radius) / (w[1].radius - w[0].radius);
            w[0].t + f * (w[1].t - w[0].t)
        })
        .collect();
    assert!(crossings.len() >= 2);
    let measured = crossings[1] - crossings[0];
    assert!((measured - period).abs() / period < 1e-3, "{measured} vs {period}");
}

#[test]
fn displaced_start_stays_in_its_well() {
    let (p, r1, period) = setup();
    let fps = fixed_points(p, 2, VARIANT).unwrap();
    let traj = evolve_peak(1.01 * r1, 0.0, 1.0, 0.5, p, VARIANT, period / 100.0, 20.0 * period).unwrap();
    assert!(traj.samples.iter().all(|s| s.radius > 0.0 && s.radius < fps[1].radius));
}
