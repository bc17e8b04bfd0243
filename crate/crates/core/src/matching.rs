//! Small-wavenumber expansion of perturbative kernels and matching against the
//! plate law: `U′ = μ`, `U″ = 2γ`, `β = δ/U`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::model::PlateLaw;
use crate::scalar::{rel_diff, Scalar};

/// Second-order energy kernel `G(k; d)` with optional first-order coefficient `μ(d)`.
pub trait PerturbativeKernel<T: Scalar> {
    /// Samples `(k, G)` with `0 ≤ k ≤ k_max`, sorted by `k`.
    fn samples(&self, d: T, k_max: T) -> Result<Vec<(T, T)>>;

    /// `G(0; d)` if it can be evaluated directly.
    fn at_zero(&self, d: T) -> Option<T>;

    fn mu(&self, d: T) -> Option<T>;
}

/// Nodes used for evaluator kernels.
pub const FIT_NODES: usize = 12;

/// Kernel given by closures; checked for evenness at every node.
pub struct FnKernel<G, M> {
    pub g: G,
    pub mu: M,
}

impl<T, G, M> PerturbativeKernel<T> for FnKernel<G, M>
where
    T: Scalar,
    G: Fn(T, T) -> T,
    M: Fn(T) -> Option<T>,
{
    fn samples(&self, d: T, k_max: T) -> Result<Vec<(T, T)>> {
        let n = FIT_NODES;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let k = k_max * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1);
            let plus = (self.g)(k, d);
            let minus = (self.g)(-k, d);
            if !plus.is_finite() {
                return Err(Error::Fit(format!("kernel is not finite at k = {k}")));
            }
            if rel_diff(plus, minus) > T::lit(1e3) * T::epsilon() {
                return Err(Error::Fit(format!("kernel is not even in k at k = {k}")));
            }
            out.push((k, plus));
        }
        Ok(out)
    }

    fn at_zero(&self, d: T) -> Option<T> {
        Some((self.g)(T::zero(), d))
    }

    fn mu(&self, d: T) -> Option<T> {
        (self.mu)(d)
    }
}

/// Tabulated kernel rows `(k, d, G)` with optional `μ` per separation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    pub rows: Vec<(T, T, T)>,
    pub mu: Vec<(T, T)>,
}

impl<T: Scalar> KernelTable<T> {
    /// Builds a table, checking that every negative-`k` entry mirrors a positive one.
    pub fn new(rows: Vec<(T, T, T)>, mu: Vec<(T, T)>) -> Result<Self> {
        let table = Self { rows, mu };
        for &(k, d, g) in table.rows.iter().filter(|r| r.0 < T::zero()) {
            match table.find(-k, d) {
                Some(gp) if rel_diff(g, gp) <= T::lit(1e-9) => {}
                Some(gp) => {
                    return Err(Error::Fit(format!(
                        "kernel table is not even in k at d = {d}, k = {k}: {g} vs {gp}"
                    )))
                }
                None => {
                    return Err(Error::Fit(format!(
                        "kernel table has k = {k} at d = {d} without its mirror"
                    )))
                }
            }
        }
        Ok(table)
    }

    fn same_d(a: T, b: T) -> bool {
        rel_diff(a, b) <= T::lit(1e-12)
    }

    fn find(&self, k: T, d: T) -> Option<T> {
        self.rows
            .iter()
            .find(|r| Self::same_d(r.1, d) && (r.0 == k || rel_diff(r.0, k) <= T::lit(1e-12)))
            .map(|r| r.2)
    }

    /// Distinct separations present in the table.
    pub fn separations(&self) -> Vec<T> {
        let mut ds: Vec<T> = Vec::new();
        for r in &self.rows {
            if !ds.iter().any(|&d| Self::same_d(d, r.1)) {
                ds.push(r.1);
            }
        }
        ds.sort_by(|a, b| a.partial_cmp(b).expect("finite separations"));
        ds
    }
}

impl<T: Scalar> PerturbativeKernel<T> for KernelTable<T> {
    fn samples(&self, d: T, k_max: T) -> Result<Vec<(T, T)>> {
        let mut s: Vec<(T, T)> = self
            .rows
            .iter()
            .filter(|r| Self::same_d(r.1, d) && r.0 >= T::zero() && r.0 <= k_max * T::lit(1.0 + 1e-12))
            .map(|r| (r.0, r.2))
            .collect();
        if s.is_empty() {
            return Err(Error::Input(format!("kernel table has no rows at d = {d}")));
        }
        s.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite k"));
        Ok(s)
    }

    fn at_zero(&self, d: T) -> Option<T> {
        self.find(T::zero(), d)
    }

    fn mu(&self, d: T) -> Option<T> {
        self.mu.iter().find(|m| Self::same_d(m.0, d)).map(|m| m.1)
    }
}

/// Coefficients of `G(k; d) = γ + δ k² + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallK<T> {
    pub gamma: T,
    pub delta: T,
    pub gamma_uncertainty: T,
    pub delta_uncertainty: T,
}

fn fit_even<T: Scalar>(s: &[(T, T)]) -> Result<(Vec<T>, Vec<T>, T)> {
    if s.len() < 4 {
        return Err(Error::Fit(format!(
            "{} samples are too few for a small-k fit",
            s.len()
        )));
    }
    let rows: Vec<Vec<T>> = s
        .iter()
        .map(|&(k, _)| {
            let k2 = k * k;
            vec![T::one(), k2, k2 * k2]
        })
        .collect();
    let y: Vec<T> = s.iter().map(|&(_, g)| g).collect();
    let fit = least_squares(&Matrix::from_rows(&rows)?, &y)?;
    Ok((fit.coefficients, fit.standard_errors, fit.rms))
}

/// Extracts `γ` and `δ` from a fit of `G` against `{1, k², k⁴}` on
/// `0 ≤ k ≤ 0.3/d`, refined by Richardson extrapolation with the half range.
pub fn kernel_small_k<T: Scalar, K: PerturbativeKernel<T> + ?Sized>(
    kernel: &K,
    d: T,
) -> Result<SmallK<T>> {
    if !(d > T::zero()) {
        return Err(Error::Domain(format!("separation must be positive, got {d}")));
    }
    let k_max = T::lit(0.3) / d;
    let full = kernel.samples(d, k_max)?;
    let half: Vec<(T, T)> = full
        .iter()
        .copied()
        .filter(|&(k, _)| k <= k_max * T::lit(0.5) * T::lit(1.0 + 1e-12))
        .collect();
    let (cf, ef, rms) = fit_even(&full)?;
    let scale = cf[0].abs().max(T::min_positive_value());
    if rms > T::lit(1e-6) * scale {
        return Err(Error::Fit(format!(
            "kernel is not smooth at small k (fit residual {:.3e} relative)",
            (rms / scale).to_f64_lossy()
        )));
    }
    let (delta, delta_unc) = match fit_even(&half) {
        Ok((ch, eh, _)) => {
            let rich = (T::lit(16.0) * ch[1] - cf[1]) / T::lit(15.0);
            (rich, (rich - ch[1]).abs().max(eh[1]).max(ef[1]))
        }
        Err(_) => (cf[1], ef[1]),
    };
    let (gamma, gamma_unc) = match kernel.at_zero(d) {
        Some(g0) => (g0, (g0 - cf[0]).abs()),
        None => (cf[0], ef[0]),
    };
    Ok(SmallK {
        gamma,
        delta,
        gamma_uncertainty: gamma_unc,
        delta_uncertainty: delta_unc,
    })
}

/// Residuals of the three matching relations at one separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingReport<T> {
    pub d: T,
    /// `|U′ − μ| / |U′|`, absent when the kernel carries no `μ`.
    pub mu_residual: Option<T>,
    /// `|U″ − 2γ| / |U″|`.
    pub gamma_residual: T,
    pub beta: T,
    pub beta_uncertainty: T,
    pub small_k: SmallK<T>,
}

/// Checks `U′ = μ` and `U″ = 2γ` against the plate law and returns `β = δ/U`.
pub fn matching_check<T: Scalar, K: PerturbativeKernel<T> + ?Sized>(
    kernel: &K,
    law: &PlateLaw<T>,
    d: T,
    tolerance: T,
) -> Result<MatchingReport<T>> {
    let sk = kernel_small_k(kernel, d)?;
    let u = law.energy_per_area(d)?;
    let u1 = law.derivative(d)?;
    let u2 = law.second_derivative(d)?;
    let mu_residual = kernel.mu(d).map(|mu| (u1 - mu).abs() / u1.abs());
    if let Some(r) = mu_residual {
        if r > tolerance {
            return Err(Error::MatchingViolation {
                relation: "U' = mu",
                residual: r.to_f64_lossy(),
                tolerance: tolerance.to_f64_lossy(),
            });
        }
    }
    let gamma_residual = (u2 - T::lit(2.0) * sk.gamma).abs() / u2.abs();
    if gamma_residual > tolerance {
        return Err(Error::MatchingViolation {
            relation: "U'' = 2 gamma",
            residual: gamma_residual.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    Ok(MatchingReport {
        d,
        mu_residual,
        gamma_residual,
        beta: sk.delta / u,
        beta_uncertainty: sk.delta_uncertainty / u.abs(),
        small_k: sk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryCondition;
    use approx::assert_relative_eq;

    fn consistent(beta: f64) -> FnKernel<impl Fn(f64, f64) -> f64, impl Fn(f64) -> Option<f64>> {
        let law = PlateLaw::<f64>::for_bc(BoundaryCondition::D);
        FnKernel {
            g: move |k: f64, d: f64| {
                let u = law.energy_unchecked(d);
                let s = k * d;
                6.0 * u / (d * d) + beta * u * k * k * (1.0 + s * s / 20.0) / (1.0 + s * s / 10.0)
            },
            mu: move |d: f64| law.derivative(d).ok(),
        }
    }

    #[test]
    fn polynomial_round_trip() {
        let k = FnKernel {
            g: |k: f64, _d: f64| 2.5 - 0.75 * k * k,
            mu: |_| None,
        };
        let sk = kernel_small_k(&k, 1.0).unwrap();
        assert_relative_eq!(sk.gamma, 2.5, max_relative = 1e-13);
        assert_relative_eq!(sk.delta, -0.75, max_relative = 1e-11);
        let k4 = FnKernel {
            g: |k: f64, _d: f64| 2.5 - 0.75 * k * k + 1e-3 * k.powi(4),
            mu: |_| None,
        };
        let sk = kernel_small_k(&k4, 1.0).unwrap();
        assert!((sk.delta + 0.75).abs() <= sk.delta_uncertainty.max(1e-10));
    }

    #[test]
    fn consistent_kernel_matches_and_is_scale_free() {
        let law = PlateLaw::for_bc(BoundaryCondition::D);
        let kernel = consistent(2.0 / 3.0);
        let b1 = matching_check(&kernel, &law, 1.0, 1e-8).unwrap();
        assert!(b1.gamma_residual < 1e-12);
        assert!(b1.mu_residual.unwrap() < 1e-14);
        assert!((b1.beta - 2.0 / 3.0).abs() <= b1.beta_uncertainty);
        assert!(b1.beta_uncertainty < 1e-5);
        for d in [0.1, 0.5, 2.0, 7.0] {
            let b = matching_check(&kernel, &law, d, 1e-8).unwrap();
            assert!((b.beta - b1.beta).abs() <= 1e-10);
        }
    }

    #[test]
    fn perturbed_mu_names_the_relation() {
        let law = PlateLaw::for_bc(BoundaryCondition::D);
        let base = consistent(2.0 / 3.0);
        let bad = FnKernel {
            g: &base.g,
            mu: |d: f64| law.derivative(d).ok().map(|m| m * 1.01),
        };
        match matching_check(&bad, &law, 1.0, 1e-6) {
            Err(Error::MatchingViolation { relation, .. }) => assert_eq!(relation, "U' = mu"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn odd_or_rough_kernels_fail() {
        let odd = FnKernel {
            g: |k: f64, _d: f64| 1.0 + k,
            mu: |_| None,
        };
        assert!(matches!(kernel_small_k(&odd, 1.0), Err(Error::Fit(_))));
        let rough = FnKernel {
            g: |k: f64, _d: f64| 1.0 + (k * 1000.0).cos().abs() * k.abs(),
            mu: |_| None,
        };
        assert!(matches!(kernel_small_k(&rough, 1.0), Err(Error::Fit(_))));
    }

    #[test]
    fn table_requires_mirror_symmetry() {
        let rows = vec![(0.0, 1.0, 1.0), (0.1, 1.0, 1.01), (-0.1, 1.0, 1.02)];
        assert!(KernelTable::new(rows, vec![]).is_err());
    }
}
