//! Gradient-expansion energy functional for a pair of height profiles, its
//! closed forms for the standard geometries and scaling diagnostics.
//!
//! The energy of two surfaces `z = H₁(x)` and `z = H₂(x)` is
//!
//! ```text
//! E = ∫ d²x U(H) [1 + β₁ ∇H₁·∇H₁ + β₂ ∇H₂·∇H₂ + β× ∇H₁·∇H₂],   H = H₂ − H₁.
//! ```
//!
//! It is linear in the coefficients, so the four moment integrals are computed
//! on a common set of nodes and combined afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::model::{BoundaryCondition, CoefficientSet, PlateLaw};
use crate::profile::HeightProfile;
use crate::quadrature::{self, AdaptiveOptions};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainShape<T> {
    Disk { radius: T },
    Rectangle { half_x: T, half_y: T },
}

/// Region of the reference plane to integrate over, centred on the point of
/// closest approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationDomain<T> {
    pub shape: DomainShape<T>,
    pub center: (T, T),
    /// Minimum number of quadrature points per axis before adaptive refinement.
    pub resolution: usize,
    /// Largest surface slope for which results are considered reliable.
    pub slope_cap: T,
    pub rel_tol: T,
}

impl<T: Scalar> IntegrationDomain<T> {
    pub fn disk(radius: T) -> Self {
        Self {
            shape: DomainShape::Disk { radius },
            center: (T::zero(), T::zero()),
            resolution: 32,
            slope_cap: T::lit(0.5),
            rel_tol: T::lit(1e-8),
        }
    }

    pub fn rectangle(half_x: T, half_y: T) -> Self {
        Self {
            shape: DomainShape::Rectangle { half_x, half_y },
            ..Self::disk(T::one())
        }
    }

    pub fn with_center(mut self, x: T, y: T) -> Self {
        self.center = (x, y);
        self
    }

    pub fn with_slope_cap(mut self, cap: T) -> Self {
        self.slope_cap = cap;
        self
    }

    pub fn with_rel_tol(mut self, tol: T) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_resolution(mut self, n: usize) -> Self {
        self.resolution = n;
        self
    }

    pub fn area(&self) -> T {
        match self.shape {
            DomainShape::Disk { radius } => T::PI() * radius * radius,
            DomainShape::Rectangle { half_x, half_y } => T::lit(4.0) * half_x * half_y,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.shape {
            DomainShape::Disk { radius } => radius > T::zero() && radius.is_finite(),
            DomainShape::Rectangle { half_x, half_y } => {
                half_x > T::zero() && half_y > T::zero() && half_x.is_finite() && half_y.is_finite()
            }
        };
        if !ok {
            return Err(Error::Domain("integration domain extents must be positive".into()));
        }
        if self.resolution < 16 {
            return Err(Error::Domain(format!(
                "resolution must be at least 16 points per axis, got {}",
                self.resolution
            )));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(Error::Domain("relative tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Disk around `center` sized so that the plate-law integrand has dropped
    /// below `1e-12` of its value at the centre, clipped to the patch where both
    /// profiles are defined and their slopes stay below `slope_cap`.
    pub fn auto_disk(
        h1: &HeightProfile<T>,
        h2: &HeightProfile<T>,
        law: &PlateLaw<T>,
        center: (T, T),
        slope_cap: T,
    ) -> Result<Self> {
        let gap = |x: T, y: T| h2.height(x, y) - h1.height(x, y);
        let g0 = gap(center.0, center.1);
        if !(g0 > T::zero()) {
            return Err(Error::Geometry(format!(
                "surfaces touch or cross at the domain centre (gap {g0})"
            )));
        }
        let u0 = law.energy_unchecked(g0).abs();
        let directions = 16;
        let mut radius = T::infinity();
        for k in 0..directions {
            let phi = T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(directions);
            let (c, s) = (phi.cos(), phi.sin());
            let ok = |r: T| {
                let (x, y) = (center.0 + r * c, center.1 + r * s);
                h1.contains(x, y)
                    && h2.contains(x, y)
                    && h1.local(x, y).slope() <= slope_cap
                    && h2.local(x, y).slope() <= slope_cap
            };
            let decayed = |r: T| {
                let g = gap(center.0 + r * c, center.1 + r * s);
                g > T::zero() && law.energy_unchecked(g).abs() < T::lit(1e-12) * u0
            };
            let mut lo = T::zero();
            let mut hi = g0.max(T::lit(1e-6));
            let mut limit = None;
            for _ in 0..200 {
                if !ok(hi) {
                    limit = Some(hi);
                    break;
                }
                if decayed(hi) {
                    break;
                }
                lo = hi;
                hi = hi * T::lit(2.0);
            }
            let r_dir = match limit {
                Some(bad) => {
                    let (mut a, mut b) = (lo, bad);
                    for _ in 0..60 {
                        let m = (a + b) / T::lit(2.0);
                        if ok(m) {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    a
                }
                None => hi,
            };
            radius = radius.min(r_dir);
        }
        if !(radius > T::zero()) {
            return Err(Error::Geometry(
                "no neighbourhood of the centre satisfies the slope cap".into(),
            ));
        }
        Ok(Self::disk(radius)
            .with_center(center.0, center.1)
            .with_slope_cap(slope_cap))
    }
}

/// Result of [`gradient_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientEnergy<T> {
    pub energy: T,
    /// Same quadrature with all gradient terms switched off.
    pub pfa_energy: T,
    pub error: T,
    /// `∫U`, `∫U|∇H₁|²`, `∫U|∇H₂|²`, `∫U ∇H₁·∇H₂`.
    pub moments: [T; 4],
    pub max_slope: T,
    /// Set when a slope above the domain's cap was seen; the result is advisory.
    pub slope_warning: bool,
    pub evaluations: usize,
}

impl<T: Scalar> GradientEnergy<T> {
    pub fn ratio(&self) -> T {
        self.energy / self.pfa_energy
    }
}

/// Combines moment integrals with a coefficient set.
pub fn combine_moments<T: Scalar>(m: &[T; 4], c: &CoefficientSet<T>) -> T {
    m[0] + c.beta1 * m[1] + c.beta2 * m[2] + c.beta_cross * m[3]
}

/// Energy functional of the gradient expansion, with the plate law `law`
/// supplying `U(H)` (its prefactor is the α of the configuration).
pub fn gradient_energy<T: Scalar>(
    h1: &HeightProfile<T>,
    h2: &HeightProfile<T>,
    coeffs: &CoefficientSet<T>,
    law: &PlateLaw<T>,
    dom: &IntegrationDomain<T>,
) -> Result<GradientEnergy<T>> {
    h1.validate()?;
    h2.validate()?;
    dom.validate()?;
    let mut max_slope = T::zero();
    let mut failure: Option<Error> = None;
    let mut integrand = |x: T, y: T| -> [T; 4] {
        if failure.is_some() {
            return [T::zero(); 4];
        }
        if !h1.contains(x, y) || !h2.contains(x, y) {
            failure = Some(Error::Geometry(format!(
                "profile undefined at ({x:.6e}, {y:.6e}); shrink the integration domain"
            )));
            return [T::zero(); 4];
        }
        let a = h1.local(x, y);
        let b = h2.local(x, y);
        let gap = b.h - a.h;
        if !(gap > T::zero()) {
            failure = Some(Error::Geometry(format!(
                "surfaces touch or cross at ({x:.6e}, {y:.6e}) (gap {gap:.3e})"
            )));
            return [T::zero(); 4];
        }
        max_slope = max_slope.max(a.slope()).max(b.slope());
        let u = law.energy_unchecked(gap);
        [
            u,
            u * (a.hx * a.hx + a.hy * a.hy),
            u * (b.hx * b.hx + b.hy * b.hy),
            u * (a.hx * b.hx + a.hy * b.hy),
        ]
    };
    let (moments, error, evaluations) = match h1.grid().or_else(|| h2.grid()) {
        Some(g) => lattice_rule(g, dom, &mut integrand)?,
        None => {
            let opts = AdaptiveOptions {
                rel_tol: dom.rel_tol,
                abs_tol: T::zero(),
                initial_panels: dom.resolution.div_ceil(15),
                max_panels: 2000,
            };
            let (cx, cy) = dom.center;
            let est = match dom.shape {
                DomainShape::Disk { radius } => quadrature::disk(&mut integrand, (cx, cy), radius, &opts),
                DomainShape::Rectangle { half_x, half_y } => quadrature::rectangle(
                    &mut integrand,
                    (cx - half_x, cx + half_x),
                    (cy - half_y, cy + half_y),
                    &[cx],
                    &[cy],
                    &opts,
                ),
            };
            if let Some(e) = failure.take() {
                return Err(e);
            }
            let est = est?;
            if !est.converged {
                return Err(Error::Integration(format!(
                    "quadrature did not reach relative tolerance {:.1e} (estimate {:.6e} ± {:.1e})",
                    dom.rel_tol, est.value[0], est.error
                )));
            }
            (est.value, est.error, est.evaluations)
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(GradientEnergy {
        energy: combine_moments(&moments, coeffs),
        pfa_energy: moments[0],
        error,
        moments,
        max_slope,
        slope_warning: max_slope > dom.slope_cap,
        evaluations,
    })
}

/// Composite rule on the lattice of a gridded profile restricted to the domain,
/// with an error estimate from the every-other-node sublattice.
fn lattice_rule<T: Scalar, F: FnMut(T, T) -> [T; 4]>(
    g: &crate::profile::GridProfile<T>,
    dom: &IntegrationDomain<T>,
    f: &mut F,
) -> Result<([T; 4], T, usize)> {
    let (cx, cy) = dom.center;
    let inside = |x: T, y: T| match dom.shape {
        DomainShape::Disk { radius } => {
            (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius
        }
        DomainShape::Rectangle { half_x, half_y } => {
            (x - cx).abs() <= half_x && (y - cy).abs() <= half_y
        }
    };
    let cell = g.dx * g.dy;
    let mut fine = [T::zero(); 4];
    let mut coarse = [T::zero(); 4];
    let mut count = 0;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let (x, y) = (g.x_at(ix), g.y_at(iy));
            if !inside(x, y) {
                continue;
            }
            // trapezoid weights on the lattice edges
            let wx = if ix == 0 || ix + 1 == g.nx { T::lit(0.5) } else { T::one() };
            let wy = if iy == 0 || iy + 1 == g.ny { T::lit(0.5) } else { T::one() };
            let v = f(x, y);
            count += 1;
            for c in 0..4 {
                fine[c] += wx * wy * cell * v[c];
                if ix % 2 == 0 && iy % 2 == 0 {
                    coarse[c] += wx * wy * T::lit(4.0) * cell * v[c];
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::Domain("no lattice nodes inside the integration domain".into()));
    }
    let err = (0..4).fold(T::zero(), |m, c| m.max((fine[c] - coarse[c]).abs() / T::lit(3.0)));
    Ok((fine, err, count))
}

/// Sphere-sphere and sphere-plate closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereClosedForm<T> {
    pub energy: T,
    pub pfa_energy: T,
    pub ratio: T,
}

/// Leading correction to PFA for two spheres of radii `r1` (surface 1, below)
/// and `r2` (surface 2, above) at closest distance `d`; `r2 = None` is a plate.
///
/// With the same condition on both spheres this is
/// `1 − d/(R₁+R₂) + (2β−1)(d/R₁ + d/R₂)`; mixed pairs use `β₁`, `β₂`, `β×` separately.
pub fn closed_form_two_spheres<T: Scalar>(
    r1: T,
    r2: Option<T>,
    d: T,
    coeffs: &CoefficientSet<T>,
) -> Result<SphereClosedForm<T>> {
    let positive = |v: T, what: &str| {
        if v > T::zero() && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{what} must be positive, got {v}")))
        }
    };
    positive(r1, "R1")?;
    positive(d, "d")?;
    if let Some(r2) = r2 {
        positive(r2, "R2")?;
    }
    let pi3 = T::PI() * T::PI() * T::PI();
    let k = -coeffs.alpha * pi3 / (T::lit(1440.0) * d * d);
    let (pfa, ratio) = match r2 {
        Some(r2) => {
            let reff = r1 * r2 / (r1 + r2);
            let pfa_shape = reff * reff * (T::one() / (r1 * r1 * r1) + T::one() / (r2 * r2 * r2));
            let grad = T::lit(2.0)
                * reff
                * (coeffs.beta1 / (r1 * r1) + coeffs.beta2 / (r2 * r2)
                    - coeffs.beta_cross / (r1 * r2));
            (k * reff, T::one() + (grad - pfa_shape) * d)
        }
        None => (
            k * r1,
            T::one() + (T::lit(2.0) * coeffs.beta1 - T::one()) * d / r1,
        ),
    };
    Ok(SphereClosedForm {
        energy: pfa * ratio,
        pfa_energy: pfa,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderClosedForm<T> {
    pub energy: T,
    pub leading: T,
    /// `1 + (β − 3/8)(d/R₁ + d/R₂)`, independent of the inclination.
    pub correction: T,
}

/// Two circular cylinders with axes inclined at `theta`, same condition on both.
pub fn closed_form_inclined_cylinders<T: Scalar>(
    r1: T,
    r2: T,
    d: T,
    theta: T,
    coeffs: &CoefficientSet<T>,
) -> Result<CylinderClosedForm<T>> {
    for (v, what) in [(r1, "R1"), (r2, "R2"), (d, "d")] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::Domain(format!("{what} must be positive, got {v}")));
        }
    }
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::Domain(format!("inclination must lie in (0, π), got {theta}")));
    }
    let s = theta.sin();
    if s < T::lit(1e-9) {
        return Err(Error::Degenerate(
            "axes are parallel; use the numerical functional for parallel cylinders".into(),
        ));
    }
    if (coeffs.beta1 - coeffs.beta2).abs() > T::lit(1e-12) * coeffs.beta1.abs().max(T::one()) {
        return Err(Error::UnsupportedConfiguration(
            "the inclined-cylinder closed form assumes the same condition on both surfaces".into(),
        ));
    }
    let pi3 = T::PI() * T::PI() * T::PI();
    let leading = -coeffs.alpha * pi3 * (r1 * r2).sqrt() / (T::lit(1440.0) * d * d * s);
    let correction = T::one() + (coeffs.beta1 - T::lit(0.375)) * (d / r1 + d / r2);
    Ok(CylinderClosedForm {
        energy: leading * correction,
        leading,
        correction,
    })
}

/// Coefficient `2β + 1/λ²` of the PFA correction for the hyperboloid
/// `√(R² + λ²ρ²) − R` facing a plate, in units of `λ² d/R`.
pub fn hyperboloid_correction<T: Scalar>(lambda: T, bc: BoundaryCondition) -> Result<T> {
    if !(lambda > T::zero() && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let beta: T = bc.beta().eval();
    Ok(T::lit(2.0) * beta + T::one() / (lambda * lambda))
}

/// Positive root of [`hyperboloid_correction`], if the condition allows one (`β < 0`).
pub fn hyperboloid_zero<T: Scalar>(bc: BoundaryCondition) -> Option<T> {
    let beta: T = bc.beta().eval();
    (beta < T::zero()).then(|| T::one() / (-T::lit(2.0) * beta).sqrt())
}

/// First-order image of `h` under a tilt of the reference plane by `epsilon`.
pub fn tilt_transform<T: Scalar>(h: &HeightProfile<T>, epsilon: T) -> HeightProfile<T> {
    if epsilon == T::zero() {
        return h.clone();
    }
    HeightProfile::Tilted {
        base: Box::new(h.clone()),
        epsilon,
    }
}

/// Power-law fit of the PFA correction over a separation sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit<T> {
    pub exponent: T,
    pub uncertainty: T,
    /// `A` in `E/E_PFA − 1 ≈ A (d/L)^exponent`.
    pub prefactor: T,
    /// `(d/L, E/E_PFA − 1)` for each sweep point.
    pub corrections: Vec<(T, T)>,
    pub slope_warning: bool,
}

/// Fits the leading power of `E/E_PFA − 1` in `d/L`.
///
/// `family(d)` returns the upper profile at closest distance `d` above the
/// plane `z = 0`; `E_PFA` uses the local curvature radii at the domain centre.
pub fn pfa_scaling_exponent<T, F>(
    family: F,
    length: T,
    coeffs: &CoefficientSet<T>,
    law: &PlateLaw<T>,
    dom: &IntegrationDomain<T>,
    sweep: &[T],
) -> Result<ScalingFit<T>>
where
    T: Scalar,
    F: Fn(T) -> HeightProfile<T>,
{
    if sweep.len() < 3 {
        return Err(Error::Fit("scaling fit needs at least three sweep points".into()));
    }
    let lo = sweep.iter().copied().fold(T::infinity(), T::min);
    let hi = sweep.iter().copied().fold(T::zero(), T::max);
    if !(lo > T::zero()) || hi / lo < T::lit(10f64.powf(1.5)) * T::lit(0.999) {
        return Err(Error::Fit("sweep must span at least 1.5 decades of d/L".into()));
    }
    let plane = HeightProfile::flat(T::zero());
    let p = T::lit(law.exponent as f64);
    let mut corrections = Vec::with_capacity(sweep.len());
    let mut noise = Vec::with_capacity(sweep.len());
    let mut slope_warning = false;
    for &x in sweep {
        let d = x * length;
        let h2 = family(d);
        let (rx, ry) = h2.local_radii(dom.center.0, dom.center.1)?;
        let res = gradient_energy(&plane, &h2, coeffs, law, dom)?;
        slope_warning |= res.slope_warning;
        // 2π√(RxRy) ∫₀^∞ U(d + u) du
        let pfa = T::lit(2.0) * T::PI() * (rx * ry).sqrt() * law.energy_unchecked(d) * d
            / (p - T::one());
        corrections.push((x, res.energy / pfa - T::one()));
        noise.push(res.error / res.energy.abs());
    }
    let sign = corrections[0].1.signum();
    for (i, &(x, c)) in corrections.iter().enumerate() {
        if c == T::zero() || c.signum() != sign || c.abs() < T::lit(100.0) * noise[i] {
            return Err(Error::Fit(format!(
                "correction at d/L = {x:.3e} is not resolved above the quadrature error"
            )));
        }
    }
    let mut sorted = corrections.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite sweep"));
    if sorted.windows(2).any(|w| w[1].1.abs() <= w[0].1.abs()) {
        return Err(Error::Fit("correction is not monotone over the sweep".into()));
    }
    let rows: Vec<Vec<T>> = sorted.iter().map(|&(x, _)| vec![T::one(), x.ln()]).collect();
    let y: Vec<T> = sorted.iter().map(|&(_, c)| c.abs().ln()).collect();
    let fit = least_squares(&Matrix::from_rows(&rows)?, &y)?;
    Ok(ScalingFit {
        exponent: fit.coefficients[1],
        uncertainty: fit.standard_errors[1],
        prefactor: sign * fit.coefficients[0].exp(),
        corrections,
        slope_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use BoundaryCondition::*;

    fn set(bc: BoundaryCondition) -> CoefficientSet<f64> {
        CoefficientSet::for_kind(bc)
    }

    #[test]
    fn flat_flat_is_area_times_plate_energy() {
        let law = PlateLaw::for_bc(D);
        let dom = IntegrationDomain::rectangle(1.5, 0.5);
        let e = gradient_energy(
            &HeightProfile::flat(0.0),
            &HeightProfile::flat(0.3),
            &set(D),
            &law,
            &dom,
        )
        .unwrap();
        assert_relative_eq!(e.energy, 3.0 * law.energy_per_area(0.3).unwrap(), max_relative = 1e-14);
        assert!(!e.slope_warning);
    }

    #[test]
    fn contact_is_a_geometry_error() {
        let r = gradient_energy(
            &HeightProfile::flat(0.0),
            &HeightProfile::Polynomial {
                offset: 0.1,
                terms: vec![crate::profile::Monomial { px: 1, py: 0, coeff: -1.0 }],
                radial: vec![],
            },
            &set(D),
            &PlateLaw::for_bc(D),
            &IntegrationDomain::disk(1.0),
        );
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn closed_form_examples() {
        let c = closed_form_two_spheres(1.0, None, 0.01, &set(D)).unwrap();
        assert_relative_eq!(c.ratio, 1.0 + 0.01 / 3.0, max_relative = 1e-14);
        let em = closed_form_two_spheres(1.0, None, 0.1, &set(EM)).unwrap();
        assert_relative_eq!(em.ratio, 0.830691, max_relative = 1e-6);
        let eq = closed_form_two_spheres(1.0, Some(1.0), 0.01, &set(D)).unwrap();
        assert_relative_eq!(eq.ratio, 1.0 - 0.005 + 0.02 / 3.0, max_relative = 1e-14);
        // same-condition reduction for unequal radii
        for bc in [D, N, EM] {
            let (r1, r2, d) = (0.7, 2.3, 0.01);
            let beta = set(bc).beta1;
            let c = closed_form_two_spheres(r1, Some(r2), d, &set(bc)).unwrap();
            let expect = 1.0 - d / (r1 + r2) + (2.0 * beta - 1.0) * (d / r1 + d / r2);
            assert_relative_eq!(c.ratio, expect, max_relative = 1e-14);
        }
        assert!(closed_form_two_spheres(1.0, None, 0.0, &set(D)).is_err());
    }

    #[test]
    fn cylinder_closed_form() {
        let a = closed_form_inclined_cylinders(1.0, 1.0, 0.01, std::f64::consts::FRAC_PI_2, &set(D))
            .unwrap();
        assert_relative_eq!(a.correction, 1.0058333333333333, max_relative = 1e-14);
        let b = closed_form_inclined_cylinders(1.0, 1.0, 0.01, std::f64::consts::FRAC_PI_3, &set(D))
            .unwrap();
        assert_eq!(a.correction, b.correction);
        let c = closed_form_inclined_cylinders(1.0, 1.0, 0.01, std::f64::consts::FRAC_PI_6, &set(D))
            .unwrap();
        assert_relative_eq!(c.leading / a.leading, 2.0, max_relative = 1e-14);
        assert!(matches!(
            closed_form_inclined_cylinders(1.0, 1.0, 0.01, 0.0, &set(D)),
            Err(Error::Domain(_))
        ));
        assert!(closed_form_inclined_cylinders(1.0, 1.0, 0.01, 1.0, &set(DN)).is_err());
    }

    #[test]
    fn crossed_cylinders_match_quadrature() {
        let (r, d, theta) = (1.0, 1e-4, std::f64::consts::FRAC_PI_2);
        let cyl = |apex, angle, body| HeightProfile::Cylinder {
            radius: r,
            axis_angle: angle,
            apex,
            body,
        };
        let h1 = cyl(0.0, 0.0, crate::profile::BodySide::Below);
        let h2 = cyl(d, theta, crate::profile::BodySide::Above);
        let dom = IntegrationDomain::disk(0.9 * r).with_slope_cap(10.0);
        let e = gradient_energy(&h1, &h2, &set(D), &PlateLaw::for_bc(D), &dom).unwrap();
        let cf = closed_form_inclined_cylinders(r, r, d, theta, &set(D)).unwrap();
        let slope = (e.energy / cf.leading - 1.0) / d;
        assert_relative_eq!(slope, (cf.correction - 1.0) / d, max_relative = 0.01);
    }

    #[test]
    fn hyperboloid_zero_location() {
        let l: f64 = hyperboloid_zero(EM).unwrap();
        assert_relative_eq!(l, 1.20117, max_relative = 1e-5);
        assert!(hyperboloid_correction(l, EM).unwrap().abs() < 1e-14);
        assert_relative_eq!(hyperboloid_correction(1.0, EM).unwrap(), 0.3069096605, max_relative = 1e-9);
        assert!(hyperboloid_correction(0.3, D).unwrap() > 4.0 / 3.0);
        assert!(hyperboloid_correction(0.0, D).is_err());
        assert!(hyperboloid_zero::<f64>(D).is_none());
    }

    #[test]
    fn tilt_identity() {
        let s = HeightProfile::sphere(1.0, 0.1);
        assert_eq!(tilt_transform(&s, 0.0), s);
    }
}
