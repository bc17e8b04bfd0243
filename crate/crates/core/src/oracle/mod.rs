//! Dirichlet sphere-plate Casimir energy from the multipole round-trip determinant.
//!
//! In units `ħ = c = 1`,
//! `E = (1/2π) ∫₀^∞ dκ Σ_m log det(𝟙 − M_m(κ))`, where the block `M_m` couples
//! multipoles `l, l′ ≥ |m|` of the sphere through reflection on the plate at
//! distance `L = R + d` from its center:
//! `M_{ll′} = (i_l/k_l)(κR) √((2l+1)(2l′+1)) Σ_λ (2λ+1) (l l′ λ; 000)(l l′ λ; m −m 0) k_λ(2κL)`.
//! The matrix is symmetrized with `√(r_l r_{l′})` before the determinant.
//! Only `f64` is supported.

mod bessel;
mod gaunt;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bessel::{ln_i, ln_k};
pub use gaunt::{normalized_legendre, GauntTable};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::model::BoundaryCondition;
use crate::pade::{pfa_energy_scaled, AsymptoticSeries, EnergyCurve, Provenance};
use crate::quadrature::gauss_legendre;

/// Smallest supported `d/R`.
pub const MIN_SEPARATION_RATIO: f64 = 0.02;
/// Largest `d/R` accepted for curves.
pub const MAX_SEPARATION_RATIO: f64 = 50.0;

/// Truncation and quadrature settings for one sphere-plate energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub ell_max: usize,
    /// Gauss-Legendre nodes for `κ = t/(1−t)/(R+d)`, `t ∈ (0, 1)`.
    pub kappa_nodes: usize,
    pub radius: f64,
    pub separation: f64,
    /// Curves report a geometric (Aitken) extrapolation from `ell_max − 8`,
    /// `ell_max − 4` and `ell_max` instead of the raw truncated value.
    #[serde(default)]
    pub extrapolate: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            ell_max: 40,
            kappa_nodes: 80,
            radius: 1.0,
            separation: 1.0,
            extrapolate: false,
        }
    }
}

impl OracleConfig {
    pub fn new(ell_max: usize, radius: f64, separation: f64) -> Self {
        Self {
            ell_max,
            radius,
            separation,
            ..Self::default()
        }
    }

    pub fn with_kappa_nodes(mut self, n: usize) -> Self {
        self.kappa_nodes = n;
        self
    }

    pub fn with_ell_max(mut self, ell_max: usize) -> Self {
        self.ell_max = ell_max;
        self
    }

    pub fn with_extrapolation(mut self, on: bool) -> Self {
        self.extrapolate = on;
        self
    }

    pub fn at_ratio(mut self, d_over_r: f64) -> Self {
        self.separation = d_over_r * self.radius;
        self
    }

    pub fn d_over_r(&self) -> f64 {
        self.separation / self.radius
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::Domain(format!(
                "separation must be positive, got {}",
                self.separation
            )));
        }
        if self.ell_max < 10 {
            return Err(Error::Input(format!("ell_max must be at least 10, got {}", self.ell_max)));
        }
        if self.kappa_nodes < 40 {
            return Err(Error::Input(format!(
                "at least 40 kappa nodes are required, got {}",
                self.kappa_nodes
            )));
        }
        if self.d_over_r() < MIN_SEPARATION_RATIO {
            return Err(Error::Domain(format!(
                "d/R = {} is below {MIN_SEPARATION_RATIO}; the multipole expansion would need ell_max in the hundreds",
                self.d_over_r()
            )));
        }
        Ok(())
    }
}

fn gaunt_table(l_max: usize) -> Arc<GauntTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GauntTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("gaunt cache").get(&l_max) {
        return Arc::clone(t);
    }
    let table = Arc::new(GauntTable::new(l_max));
    cache
        .lock()
        .expect("gaunt cache")
        .entry(l_max)
        .or_insert(table)
        .clone()
}

/// `log det A` for symmetric positive definite `A`, factored in place; `NaN`
/// when a pivot is not positive.
fn cholesky_log_det(a: &mut Matrix<f64>) -> f64 {
    let n = a.rows();
    let mut log = 0.0;
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= a[(j, k)] * a[(j, k)];
        }
        if !(d > 0.0) {
            return f64::NAN;
        }
        let d = d.sqrt();
        a[(j, j)] = d;
        log += 2.0 * d.ln();
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = v / d;
        }
    }
    log
}

/// `Σ_m log det(𝟙 − M_m(κ))`, counting `±m` blocks twice.
pub fn round_trip_log_det(table: &GauntTable, kappa: f64, radius: f64, center: f64) -> Result<f64> {
    let l_max = table.l_max();
    let x = kappa * radius;
    let li = ln_i(l_max, x);
    let lk = ln_k(l_max, x);
    let lr: Vec<f64> = li.iter().zip(&lk).map(|(a, b)| a - b).collect();
    let lt = ln_k(2 * l_max, 2.0 * kappa * center);
    // k_λ/k_s for λ ≤ s, all ≤ 1
    let width = 2 * l_max + 1;
    let mut down = vec![0.0; width * width];
    for s in 0..width {
        for lam in 0..=s {
            down[s * width + lam] = (lt[lam] - lt[s]).exp();
        }
    }
    let mut total = 0.0;
    for m in 0..=l_max {
        let n = l_max + 1 - m;
        let mut a = Matrix::<f64>::identity(n);
        for l in m..=l_max {
            for lp in l..=l_max {
                let top = l + lp;
                let lo = l.abs_diff(lp);
                let row = &down[top * width..];
                let sum: f64 = table
                    .couplings(m, l, lp)
                    .iter()
                    .enumerate()
                    .map(|(k, g)| g * row[lo + 2 * k])
                    .sum();
                let v = sum * (0.5 * (lr[l] + lr[lp]) + lt[top]).exp();
                a[(l - m, lp - m)] -= v;
                if lp != l {
                    a[(lp - m, l - m)] -= v;
                }
            }
        }
        let log = cholesky_log_det(&mut a);
        if !log.is_finite() || log > 0.0 {
            return Err(Error::Truncation(format!(
                "round-trip determinant for m = {m} at κ = {kappa:.4e} is not in (0, 1]; increase ell_max"
            )));
        }
        total += if m == 0 { log } else { 2.0 * log };
    }
    Ok(total)
}

/// Sphere-plate energy for Dirichlet conditions on both bodies.
pub fn oracle_energy_d(config: &OracleConfig) -> Result<f64> {
    config.validate()?;
    let table = gaunt_table(config.ell_max);
    let r = config.radius;
    let d = config.separation;
    let center = r + d;
    let scale = 1.0 / center;
    let (t, w) = gauss_legendre(config.kappa_nodes);
    let terms: Vec<Result<f64>> = t
        .par_iter()
        .zip(w.par_iter())
        .map(|(&ti, &wi)| {
            let u = 0.5 * (ti + 1.0);
            let kappa = scale * u / (1.0 - u);
            if 2.0 * kappa * d > 120.0 {
                return Ok(0.0);
            }
            let jac = 0.5 * wi * scale / ((1.0 - u) * (1.0 - u));
            Ok(jac * round_trip_log_det(&table, kappa, r, center)?)
        })
        .collect();
    let mut sum = 0.0;
    for term in terms {
        sum += term?;
    }
    Ok(sum / (2.0 * std::f64::consts::PI))
}

/// `E/E_PFA` with `E_PFA = −π³R/(1440 d²)`.
pub fn normalized_energy(config: &OracleConfig) -> Result<f64> {
    let e = oracle_energy_d(config)?;
    Ok(e * config.radius / pfa_energy_scaled(1.0, 1.0 / config.d_over_r()))
}

/// Aitken extrapolation in `ell_max` of `E/E_PFA` from runs at `ell_max − 8`,
/// `ell_max − 4` and `ell_max`, with `|extrapolated − raw|` as its error.
/// Falls back to the raw value when the three runs do not converge geometrically.
pub fn extrapolated_energy(config: &OracleConfig) -> Result<(f64, f64)> {
    config.validate()?;
    if config.ell_max < 18 {
        return Err(Error::Input(format!(
            "extrapolation needs ell_max ≥ 18, got {}",
            config.ell_max
        )));
    }
    let e: Vec<f64> = [8, 4, 0]
        .iter()
        .map(|&k| normalized_energy(&config.with_ell_max(config.ell_max - k)))
        .collect::<Result<_>>()?;
    let (d1, d2) = (e[1] - e[0], e[2] - e[1]);
    let rho = d2 / d1;
    if d1.abs() <= 1e-13 * e[2].abs() || !(rho > 0.0 && rho < 0.9) {
        return Ok((e[2], d2.abs()));
    }
    let shift = d2 * rho / (1.0 - rho);
    Ok((e[2] + shift, shift.abs()))
}

/// `E/E_PFA` on a grid of `d/R`. Raw values carry the difference to an
/// `ell_max − 4` run as their error; extrapolated values carry the size of the
/// extrapolation step.
pub fn oracle_curve(template: &OracleConfig, grid: &[f64]) -> Result<EnergyCurve<f64>> {
    let mut xs = grid.to_vec();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("grid contains non-finite d/R".into()));
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    xs.dedup();
    if let Some(&x) = xs
        .iter()
        .find(|&&x| !(MIN_SEPARATION_RATIO..=MAX_SEPARATION_RATIO).contains(&x))
    {
        return Err(Error::Domain(format!(
            "d/R = {x} outside [{MIN_SEPARATION_RATIO}, {MAX_SEPARATION_RATIO}]"
        )));
    }
    let mut samples = Vec::with_capacity(xs.len());
    let mut errors = Vec::with_capacity(xs.len());
    for &x in &xs {
        let cfg = template.at_ratio(x);
        let (e, err) = if cfg.extrapolate {
            extrapolated_energy(&cfg)?
        } else {
            let e = normalized_energy(&cfg)?;
            let coarse_l = cfg.ell_max.saturating_sub(4).max(10);
            let err = if coarse_l < cfg.ell_max {
                (e - normalized_energy(&cfg.with_ell_max(coarse_l))?).abs()
            } else {
                f64::NAN
            };
            (e, err)
        };
        samples.push((x, e));
        errors.push(err);
    }
    EnergyCurve::new(samples, Provenance::Oracle)?.with_errors(errors)
}

/// Large-distance force coefficients estimated from an energy curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeEstimate {
    pub j0: u32,
    pub coefficients: Vec<f64>,
    pub uncertainties: Vec<f64>,
    /// Coefficients dropped because their uncertainty exceeded 10%.
    pub withheld: usize,
    pub samples: usize,
}

impl AeEstimate {
    pub fn to_series(&self, bc: BoundaryCondition, source: impl Into<String>) -> AsymptoticSeries<f64> {
        AsymptoticSeries::new(bc, self.j0, self.coefficients.clone(), source)
    }
}

fn fit_energy_series(pts: &[(f64, f64)], alpha: f64, j0: u32, terms: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|&(x, _)| {
            let r = 1.0 / x;
            (0..terms).map(|k| r.powi(k as i32)).collect()
        })
        .collect();
    let y: Vec<f64> = pts
        .iter()
        .map(|&(x, ratio)| {
            let r = 1.0 / x;
            ratio * pfa_energy_scaled(alpha, r) / r.powi(j0 as i32)
        })
        .collect();
    let fit = least_squares(&Matrix::from_rows(&rows)?, &y)?;
    let scale = |k: usize| (j0 as usize + k) as f64;
    Ok((
        fit.coefficients.iter().enumerate().map(|(k, c)| c * scale(k)).collect(),
        fit.standard_errors.iter().enumerate().map(|(k, s)| s * scale(k)).collect(),
    ))
}

/// Leading `m` coefficients `fⱼ` of the force series from samples at `d/R ≥ 5`.
///
/// `E·R = Σ fⱼ r^{j₀+j−1}/(j₀+j−1)` is fitted with `m` and `m + 1` terms; the
/// uncertainty of each coefficient is the larger of its standard error and its
/// shift between the two fits.
pub fn ae_extract(curve: &EnergyCurve<f64>, alpha: f64, j0: u32, m: usize) -> Result<AeEstimate> {
    if m == 0 || j0 == 0 {
        return Err(Error::Input("ae_extract needs m ≥ 1 and j0 ≥ 1".into()));
    }
    let pts: Vec<(f64, f64)> = curve.samples.iter().copied().filter(|s| s.0 >= 5.0).collect();
    if pts.len() < m + 2 {
        return Err(Error::Input(format!(
            "need at least {} samples with d/R ≥ 5, found {}",
            m + 2,
            pts.len()
        )));
    }
    let (c, se) = fit_energy_series(&pts, alpha, j0, m)?;
    let shifted = fit_energy_series(&pts, alpha, j0, m + 1)?.0;
    let unc: Vec<f64> = (0..m).map(|k| se[k].max((c[k] - shifted[k]).abs())).collect();
    let keep = (0..m).position(|k| !(unc[k] <= 0.1 * c[k].abs())).unwrap_or(m);
    Ok(AeEstimate {
        j0,
        coefficients: c[..keep].to_vec(),
        uncertainties: unc[..keep].to_vec(),
        withheld: m - keep,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn config_validation() {
        assert!(OracleConfig::new(9, 1.0, 1.0).validate().is_err());
        assert!(OracleConfig::new(10, 1.0, 1.0).with_kappa_nodes(39).validate().is_err());
        assert!(matches!(
            OracleConfig::new(20, 1.0, 0.01).validate(),
            Err(Error::Domain(_))
        ));
        assert!(OracleConfig::new(10, 1.0, 0.02).validate().is_ok());
    }

    #[test]
    fn large_distance_leading_term() {
        // E → −R/(8π L²) for L ≫ R
        let cfg = OracleConfig::new(10, 1.0, 40.0);
        let e = oracle_energy_d(&cfg).unwrap();
        let l = 41.0;
        assert_relative_eq!(e, -1.0 / (8.0 * std::f64::consts::PI * l * l), max_relative = 0.06);
    }

    #[test]
    fn ae_round_trip() {
        let f = [-0.0795774715, 0.164128535, -0.644356471];
        let samples: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 5.0 + 2.5 * i as f64;
                let r = 1.0 / x;
                let er: f64 = f
                    .iter()
                    .enumerate()
                    .map(|(j, fj)| fj / (j + 2) as f64 * r.powi(j as i32 + 2))
                    .sum();
                (x, er / pfa_energy_scaled(1.0, r))
            })
            .collect();
        let curve = EnergyCurve::new(samples, Provenance::ExternalFixture).unwrap();
        let est = ae_extract(&curve, 1.0, 2, 3).unwrap();
        assert_eq!(est.withheld, 0);
        for (k, fk) in f.iter().enumerate() {
            assert!((est.coefficients[k] - fk).abs() <= est.uncertainties[k].max(1e-9 * fk.abs()));
        }
    }
}
