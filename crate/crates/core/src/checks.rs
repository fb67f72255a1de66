//! Property suite for the ⋆-product, shared by `star-check` and the
//! acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact_states::phi_n;
use crate::moyal::{star, star_landau, LandauBasis, MoyalParams};
use crate::spectral::{Complex, ComplexField2D, GridSpec};

/// One measured property against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertyCheck {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

/// A sum of two Gaussians times random complex affine polynomials, with
/// widths in `[1.3, 1.7]` and centres within `±0.5`, so both the field and
/// its spectrum are negligible at the edges of a `(64, L = 8)` grid.
pub fn random_gaussian_polynomial(grid: GridSpec, rng: &mut impl Rng) -> ComplexField2D {
    let mut c = || Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let terms: Vec<_> = (0..2)
        .map(|_| {
            let coeffs = [c(), c(), c()];
            let centre = (coeffs[0].re * 0.5, coeffs[0].im * 0.5);
            let width = 1.5 + 0.2 * coeffs[1].re;
            (coeffs, centre, width)
        })
        .collect();
    ComplexField2D::from_fn(grid, |x, y| {
        terms
            .iter()
            .map(|(k, (x0, y0), s)| {
                let (dx, dy) = (x - x0, y - y0);
                (k[0] + k[1] * dx + k[2] * dy) * (-(dx * dx + dy * dy) / (s * s)).exp()
            })
            .sum()
    })
}

fn rel(a: &ComplexField2D, b: &ComplexField2D) -> Result<f64> {
    a.relative_distance(b)
}

/// Associativity, trace, conjugation, reality of `ū⋆u`, the commutative-limit
/// order, the ground projector and agreement with the operator basis.
pub fn moyal_property_suite(grid: GridSpec, seed: u64) -> Result<Vec<PropertyCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut assoc = 0.0f64;
    let mut trace = 0.0f64;
    let mut conj = 0.0f64;
    let mut real = 0.0f64;
    for theta in [0.5, 1.0, 2.0] {
        let p = MoyalParams::new(theta)?;
        let u = random_gaussian_polynomial(grid, &mut rng);
        let v = random_gaussian_polynomial(grid, &mut rng);
        let w = random_gaussian_polynomial(grid, &mut rng);
        let uv = star(&u, &v, p)?;
        let right = star(&u, &star(&v, &w, p)?, p)?;
        assoc = assoc.max(rel(&star(&uv, &w, p)?, &right)?);

        let pointwise = u.mul(&v)?.integral();
        trace = trace.max((uv.integral() - pointwise).norm() / pointwise.norm());

        let lhs = uv.conj();
        let rhs = star(&v.conj(), &u.conj(), p)?;
        conj = conj.max(lhs.sub(&rhs)?.max_abs() / lhs.max_abs());

        let density = star(&u.conj(), &u, p)?;
        let im = density.values().iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        real = real.max(im / density.max_abs());
    }
    out.push(PropertyCheck::at_most("associativity", assoc, 1e-8));
    out.push(PropertyCheck::at_most("trace_property", trace, 1e-8));
    out.push(PropertyCheck::at_most("conjugation", conj, 1e-10));
    out.push(PropertyCheck::at_most("density_real", real, 1e-10));

    // ‖u⋆v − uv‖/‖uv‖ against Θ on a log–log scale.
    let u = random_gaussian_polynomial(grid, &mut rng);
    let v = random_gaussian_polynomial(grid, &mut rng);
    let product = u.mul(&v)?;
    let thetas = [1e-3, 1e-2, 1e-1];
    let devs = thetas
        .iter()
        .map(|&t| rel(&star(&u, &v, MoyalParams::new(t)?)?, &product))
        .collect::<Result<Vec<_>>>()?;
    let slope = (devs[2].ln() - devs[0].ln()) / (thetas[2].ln() - thetas[0].ln());
    out.push(PropertyCheck {
        name: "commutative_limit_order".into(),
        value: slope,
        tolerance: 2.0,
        pass: (0.5..=2.0).contains(&slope),
    });

    let p1 = MoyalParams::new(1.0)?;
    let phi0 = phi_n(0, grid);
    out.push(PropertyCheck::at_most("ground_projector", rel(&star(&phi0, &phi0, p1)?, &phi0)?, 1e-6));

    let basis = LandauBasis::new(grid, p1, 8)?;
    let c1 = random_coefficients(&basis, &mut rng)?;
    let c2 = random_coefficients(&basis, &mut rng)?;
    let via_grid = star(&basis.synthesize(&c1)?, &basis.synthesize(&c2)?, p1)?;
    let via_matrix = basis.synthesize(&star_landau(&c1, &c2)?)?;
    out.push(PropertyCheck::at_most("landau_agreement", rel(&via_grid, &via_matrix)?, 1e-6));
    Ok(out)
}

/// Random coefficients on the full `M × M` block of `basis`.
pub fn random_coefficients(basis: &LandauBasis, rng: &mut impl Rng) -> Result<crate::moyal::LandauCoefficients> {
    let m = basis.cutoff();
    let coeffs = (0..m * m)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    crate::moyal::LandauCoefficients::new(m, coeffs, basis.theta())
}
