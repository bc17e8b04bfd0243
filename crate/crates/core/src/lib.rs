//! Curvature corrections to the proximity force approximation.
//!
//! The crate evaluates the gradient expansion of the Casimir energy between two
//! gently curved surfaces, matches its coefficient to perturbative kernels,
//! resums large- and short-distance information on the sphere-plate force into
//! a constrained Padé approximant, and cross-checks the result against a
//! Dirichlet multipole scattering computation.
//!
//! Most of the API is generic over the floating-point type through
//! [`Scalar`]; the multipole oracle works in `f64` only. Aliases for the `f64`
//! instantiations live at the crate root.

pub mod error;
pub mod functional;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod pade;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, ErrorClass, Result};
pub use functional::{
    closed_form_inclined_cylinders, closed_form_two_spheres, gradient_energy,
    hyperboloid_correction, pfa_scaling_exponent, tilt_transform, DomainShape, GradientEnergy,
    IntegrationDomain,
};
pub use matching::{kernel_small_k, matching_check, KernelTable, PerturbativeKernel};
pub use model::{
    beta_coefficient, coefficient_set, plate_energy_density, BoundaryCondition, CoefficientSet,
    PiRational, PlateLaw,
};
pub use oracle::{ae_extract, oracle_curve, oracle_energy_d, OracleConfig};
pub use pade::{
    build_energy_pade, build_pade, energy_curve, extract_thetas, fit_theta1, pole_check,
    AsymptoticSeries, EnergyCurve, PadeApproximant, Provenance,
};
pub use profile::HeightProfile;
pub use scalar::Scalar;

pub type CoefficientSet64 = CoefficientSet<f64>;
pub type PlateLaw64 = PlateLaw<f64>;
pub type HeightProfile64 = HeightProfile<f64>;
pub type IntegrationDomain64 = IntegrationDomain<f64>;
pub type AsymptoticSeries64 = AsymptoticSeries<f64>;
pub type PadeApproximant64 = PadeApproximant<f64>;
pub type EnergyCurve64 = EnergyCurve<f64>;
