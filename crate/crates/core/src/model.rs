//! Boundary-condition constants, the parallel-plate law and the gradient
//! coefficients of the derivative expansion.
//!
//! The gradient coefficients are kept symbolically as `a + b/π²` with rational
//! `a`, `b`, so identities such as `β_EM = (β_D + β_N)/2` hold exactly before
//! any floating-point evaluation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Field and boundary-condition setup.
///
/// For the mixed kinds the first letter refers to the curved surface and the
/// second to the flat one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    D,
    N,
    DN,
    ND,
    EM,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 5] = [Self::D, Self::N, Self::DN, Self::ND, Self::EM];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::D => "D",
            Self::N => "N",
            Self::DN => "DN",
            Self::ND => "ND",
            Self::EM => "EM",
        }
    }

    /// True for D, N and EM, the kinds that can be assigned to a single surface.
    pub fn is_surface_kind(self) -> bool {
        matches!(self, Self::D | Self::N | Self::EM)
    }

    /// Prefactor α of the plate law `U = -α π² ħc / (1440 H³)`.
    pub fn alpha(self) -> Rational64 {
        match self {
            Self::D | Self::N => Rational64::one(),
            Self::EM => Rational64::from_integer(2),
            Self::DN | Self::ND => Rational64::new(-7, 8),
        }
    }

    /// Gradient coefficient β of a curved surface facing a flat one.
    pub fn beta(self) -> PiRational {
        let two_thirds = Rational64::new(2, 3);
        match self {
            Self::D | Self::DN => PiRational::rational(two_thirds),
            // (2/3)(1 - 30/π²)
            Self::N => PiRational::new(two_thirds, Rational64::from_integer(-20)),
            Self::ND => PiRational::new(two_thirds, Rational64::new(-80, 7)),
            // (2/3)(1 - 15/π²)
            Self::EM => PiRational::new(two_thirds, Rational64::from_integer(-10)),
        }
    }

    /// First curvature correction `θ₁ = 2β - 1` of the sphere-plate energy.
    pub fn theta1(self) -> PiRational {
        self.beta() * Rational64::from_integer(2) - PiRational::rational(Rational64::one())
    }

    /// Offset j₀ of the large-distance force series, for kinds that have one.
    pub fn series_offset(self) -> Option<u32> {
        match self {
            Self::D => Some(2),
            Self::N | Self::EM => Some(4),
            Self::DN | Self::ND => None,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D" => Ok(Self::D),
            "N" => Ok(Self::N),
            "DN" => Ok(Self::DN),
            "ND" => Ok(Self::ND),
            "EM" => Ok(Self::EM),
            _ => Err(Error::UnknownBoundary(s.to_string())),
        }
    }
}

/// Exact number of the form `rational + inv_pi_sq / π²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiRational {
    pub rational: Rational64,
    pub inv_pi_sq: Rational64,
}

impl PiRational {
    pub fn new(rational: Rational64, inv_pi_sq: Rational64) -> Self {
        Self { rational, inv_pi_sq }
    }

    pub fn rational(rational: Rational64) -> Self {
        Self::new(rational, Rational64::zero())
    }

    pub fn eval<T: Scalar>(&self) -> T {
        let pi = T::PI();
        ratio::<T>(self.rational) + ratio::<T>(self.inv_pi_sq) / (pi * pi)
    }
}

pub(crate) fn ratio<T: Scalar>(r: Rational64) -> T {
    T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64)
}

impl Add for PiRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.rational + o.rational, self.inv_pi_sq + o.inv_pi_sq)
    }
}

impl Sub for PiRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.rational - o.rational, self.inv_pi_sq - o.inv_pi_sq)
    }
}

impl Neg for PiRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.inv_pi_sq)
    }
}

impl Mul<Rational64> for PiRational {
    type Output = Self;
    fn mul(self, k: Rational64) -> Self {
        Self::new(self.rational * k, self.inv_pi_sq * k)
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_ratio = |r: Rational64| {
            if r.is_integer() {
                format!("{}", r.numer().abs())
            } else {
                format!("{}/{}", r.numer().abs(), r.denom())
            }
        };
        let has_rat = !self.rational.is_zero();
        if has_rat {
            if self.rational.is_negative() {
                f.write_str("-")?;
            }
            f.write_str(&fmt_ratio(self.rational))?;
        }
        if !self.inv_pi_sq.is_zero() {
            let sign = if self.inv_pi_sq.is_negative() { "-" } else { "+" };
            let num = self.inv_pi_sq.numer().abs();
            let den = self.inv_pi_sq.denom();
            let body = if *den == 1 {
                format!("{num}/π²")
            } else {
                format!("{num}/({den}π²)")
            };
            match (has_rat, sign) {
                (true, s) => write!(f, " {s} {body}")?,
                (false, "-") => write!(f, "-{body}")?,
                (false, _) => f.write_str(&body)?,
            }
        } else if !has_rat {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Parallel-plate energy per unit area, `U(H) = -α π² / (1440 Hᵖ)` in units ħ = c = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateLaw<T> {
    pub alpha: T,
    pub exponent: i32,
}

impl<T: Scalar> PlateLaw<T> {
    pub fn new(alpha: T, exponent: i32) -> Self {
        Self { alpha, exponent }
    }

    pub fn for_bc(bc: BoundaryCondition) -> Self {
        Self::new(ratio(bc.alpha()), 3)
    }

    fn prefactor(&self) -> T {
        -self.alpha * T::PI() * T::PI() / T::lit(1440.0)
    }

    pub fn energy_per_area(&self, h: T) -> Result<T> {
        check_separation(h)?;
        Ok(self.energy_unchecked(h))
    }

    #[inline]
    pub(crate) fn energy_unchecked(&self, h: T) -> T {
        self.prefactor() * h.powi(-self.exponent)
    }

    /// dU/dH.
    pub fn derivative(&self, h: T) -> Result<T> {
        check_separation(h)?;
        let p = T::lit(self.exponent as f64);
        Ok(-p * self.prefactor() * h.powi(-self.exponent - 1))
    }

    /// d²U/dH².
    pub fn second_derivative(&self, h: T) -> Result<T> {
        check_separation(h)?;
        let p = T::lit(self.exponent as f64);
        Ok(p * (p + T::one()) * self.prefactor() * h.powi(-self.exponent - 2))
    }

    /// `H d(log U)/dH`, which is `-p` for a pure power law.
    pub fn log_derivative(&self) -> T {
        -T::lit(self.exponent as f64)
    }
}

fn check_separation<T: Scalar>(h: T) -> Result<()> {
    if h > T::zero() && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("separation must be positive, got {h}")))
    }
}

/// `U(H)` for one of the built-in kinds.
pub fn plate_energy_density<T: Scalar>(bc: BoundaryCondition, h: T) -> Result<T> {
    PlateLaw::for_bc(bc).energy_per_area(h)
}

pub fn beta_coefficient<T: Scalar>(bc: BoundaryCondition) -> T {
    bc.beta().eval()
}

/// Residual of the tilt constraint `2(β₁+β₂) + 2β× + H dlogU/dH - 1`.
pub fn tilt_residual<T: Scalar>(beta1: T, beta2: T, beta_cross: T, log_derivative: T) -> T {
    let two = T::lit(2.0);
    two * (beta1 + beta2) + two * beta_cross + log_derivative - T::one()
}

/// Exact gradient coefficients for a pair of surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolicCoefficients {
    pub first: BoundaryCondition,
    pub second: BoundaryCondition,
    pub alpha: Rational64,
    pub beta1: PiRational,
    pub beta2: PiRational,
    pub beta_cross: PiRational,
}

impl SymbolicCoefficients {
    /// `2β₁ − 1`, the sphere-plate correction with the sphere as surface 1.
    pub fn theta1(&self) -> PiRational {
        self.beta1 * Rational64::from_integer(2) - PiRational::rational(Rational64::one())
    }

    pub fn eval<T: Scalar>(&self) -> CoefficientSet<T> {
        CoefficientSet {
            alpha: ratio(self.alpha),
            beta1: self.beta1.eval(),
            beta2: self.beta2.eval(),
            beta_cross: self.beta_cross.eval(),
            beta_minus: T::zero(),
        }
    }
}

/// Gradient coefficients of the derivative expansion for two surfaces `H₁`, `H₂`.
///
/// `beta_minus` multiplies `ẑ·(∇H₁ × ∇H₂)` and is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet<T> {
    pub alpha: T,
    pub beta1: T,
    pub beta2: T,
    pub beta_cross: T,
    pub beta_minus: T,
}

impl<T: Scalar> CoefficientSet<T> {
    /// Coefficients for a configuration named by a single kind: D, N and EM
    /// apply to both surfaces, DN puts D on the first surface and N on the second.
    pub fn for_kind(kind: BoundaryCondition) -> Self {
        symbolic_for_kind(kind).eval()
    }

    pub fn law(&self) -> PlateLaw<T> {
        PlateLaw::new(self.alpha, 3)
    }

    /// Residual of the tilt constraint for the d⁻³ law.
    pub fn tilt_residual(&self) -> T {
        tilt_residual(self.beta1, self.beta2, self.beta_cross, T::lit(-3.0))
    }
}

pub fn symbolic_for_kind(kind: BoundaryCondition) -> SymbolicCoefficients {
    let (a, b) = match kind {
        BoundaryCondition::DN => (BoundaryCondition::D, BoundaryCondition::N),
        BoundaryCondition::ND => (BoundaryCondition::N, BoundaryCondition::D),
        k => (k, k),
    };
    symbolic_coefficient_set(a, b).expect("every kind maps to a supported pair")
}

/// Exact coefficients for surface 1 with condition `first` and surface 2 with `second`.
///
/// Supported pairs are D/D, N/N, EM/EM and the mixed scalar pairs D/N and N/D.
pub fn symbolic_coefficient_set(
    first: BoundaryCondition,
    second: BoundaryCondition,
) -> Result<SymbolicCoefficients> {
    use BoundaryCondition::*;
    let (k1, k2, alpha) = match (first, second) {
        (D, D) | (N, N) | (EM, EM) => (first, second, first.alpha()),
        (D, N) => (DN, ND, DN.alpha()),
        (N, D) => (ND, DN, ND.alpha()),
        _ => {
            return Err(Error::UnsupportedConfiguration(format!(
                "surface pair {first}/{second}; supported pairs are D/D, N/N, EM/EM, D/N, N/D"
            )))
        }
    };
    let beta1 = k1.beta();
    let beta2 = k2.beta();
    // Tilt invariance with H dlogU/dH = -p gives β₁ + β₂ + β× = (p + 1)/2.
    let p = Rational64::from_integer(3);
    let sum = PiRational::rational((p + Rational64::one()) / Rational64::from_integer(2));
    let beta_cross = sum - beta1 - beta2;
    Ok(SymbolicCoefficients {
        first,
        second,
        alpha,
        beta1,
        beta2,
        beta_cross,
    })
}

pub fn coefficient_set<T: Scalar>(
    first: BoundaryCondition,
    second: BoundaryCondition,
) -> Result<CoefficientSet<T>> {
    symbolic_coefficient_set(first, second).map(|s| s.eval())
}

/// Float value of an exact rational, exposed for reporting.
pub fn rational_value(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn plate_law_examples() {
        let d1: f64 = plate_energy_density(BoundaryCondition::D, 1.0).unwrap();
        assert_relative_eq!(d1, -PI * PI / 1440.0, max_relative = 1e-15);
        assert_relative_eq!(d1, -6.85389e-3, max_relative = 1e-5);
        let em: f64 = plate_energy_density(BoundaryCondition::EM, 1.0).unwrap();
        assert_relative_eq!(em, -1.37078e-2, max_relative = 1e-5);
        let dn: f64 = plate_energy_density(BoundaryCondition::DN, 1.0).unwrap();
        assert_relative_eq!(dn, 7.0 * PI * PI / 11520.0, max_relative = 1e-15);
        let d2: f64 = plate_energy_density(BoundaryCondition::D, 2.0).unwrap();
        assert_eq!(d2 * 8.0, d1);
    }

    #[test]
    fn plate_law_rejects_nonpositive_separation() {
        assert!(matches!(
            plate_energy_density::<f64>(BoundaryCondition::D, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(plate_energy_density::<f64>(BoundaryCondition::N, -1.0).is_err());
        assert!(plate_energy_density::<f64>(BoundaryCondition::N, f64::NAN).is_err());
    }

    #[test]
    fn plate_law_derivatives() {
        let law = PlateLaw::<f64>::for_bc(BoundaryCondition::EM);
        let h = 0.7;
        let step = 1e-4;
        let u = |x| law.energy_per_area(x).unwrap();
        let fd1 = (u(h + step) - u(h - step)) / (2.0 * step);
        let fd2 = (u(h + step) - 2.0 * u(h) + u(h - step)) / (step * step);
        assert_relative_eq!(law.derivative(h).unwrap(), fd1, max_relative = 1e-7);
        assert_relative_eq!(law.second_derivative(h).unwrap(), fd2, max_relative = 1e-5);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_coefficient::<f64>(BoundaryCondition::D), 2.0 / 3.0);
        assert_relative_eq!(
            beta_coefficient::<f64>(BoundaryCondition::N),
            -1.35976,
            max_relative = 1e-5
        );
        assert_relative_eq!(
            beta_coefficient::<f64>(BoundaryCondition::EM),
            -0.346547,
            max_relative = 1e-5
        );
        let avg = (BoundaryCondition::D.beta() + BoundaryCondition::N.beta())
            * Rational64::new(1, 2);
        assert_eq!(avg, BoundaryCondition::EM.beta());
    }

    #[test]
    fn pair_coefficients() {
        let dd: CoefficientSet<f64> = coefficient_set(BoundaryCondition::D, BoundaryCondition::D).unwrap();
        assert_relative_eq!(dd.beta_cross, 2.0 / 3.0, max_relative = 1e-15);
        let em: CoefficientSet<f64> = coefficient_set(BoundaryCondition::EM, BoundaryCondition::EM).unwrap();
        assert_relative_eq!(em.beta_cross, 2.69309, max_relative = 1e-5);
        let mixed = symbolic_coefficient_set(BoundaryCondition::D, BoundaryCondition::N).unwrap();
        assert_eq!(mixed.beta1, BoundaryCondition::DN.beta());
        assert_eq!(mixed.beta2, BoundaryCondition::ND.beta());
        assert_eq!(
            mixed.beta_cross,
            PiRational::new(Rational64::new(2, 3), Rational64::new(80, 7))
        );
        assert_eq!(mixed.alpha, Rational64::new(-7, 8));
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        for (a, b) in [
            (BoundaryCondition::D, BoundaryCondition::EM),
            (BoundaryCondition::EM, BoundaryCondition::N),
            (BoundaryCondition::DN, BoundaryCondition::DN),
        ] {
            assert!(matches!(
                coefficient_set::<f64>(a, b),
                Err(Error::UnsupportedConfiguration(_))
            ));
        }
    }

    #[test]
    fn tilt_relation_and_beta_minus() {
        for kind in BoundaryCondition::ALL {
            let s = symbolic_for_kind(kind);
            assert_eq!(
                s.beta1 + s.beta2 + s.beta_cross,
                PiRational::rational(Rational64::from_integer(2))
            );
            let c: CoefficientSet<f64> = s.eval();
            assert_eq!(c.beta_minus, 0.0);
            assert!(c.tilt_residual().abs() < 1e-14);
        }
    }

    #[test]
    fn sign_of_plate_energy() {
        for kind in BoundaryCondition::ALL {
            for h in [1e-3, 0.5, 7.0] {
                let u: f64 = plate_energy_density(kind, h).unwrap();
                match kind {
                    BoundaryCondition::DN | BoundaryCondition::ND => assert!(u > 0.0),
                    _ => assert!(u < 0.0),
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("em".parse::<BoundaryCondition>().unwrap(), BoundaryCondition::EM);
        assert!(matches!("X".parse::<BoundaryCondition>(), Err(Error::UnknownBoundary(_))));
        assert_eq!(BoundaryCondition::EM.theta1().to_string(), "1/3 - 20/π²");
        assert_eq!(BoundaryCondition::N.theta1().to_string(), "1/3 - 40/π²");
        assert_eq!(BoundaryCondition::ND.beta().to_string(), "2/3 - 80/(7π²)");
    }

    #[test]
    fn works_in_single_precision() {
        let u: f32 = plate_energy_density(BoundaryCondition::D, 1.0f32).unwrap();
        assert!((u as f64 + PI * PI / 1440.0).abs() < 1e-8);
        let c: CoefficientSet<f32> = CoefficientSet::for_kind(BoundaryCondition::N);
        assert!(c.tilt_residual().abs() < 1e-5);
    }
}
