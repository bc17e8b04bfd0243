//! Two-point Padé resummation of the sphere-plate force.
//!
//! The rescaled force `f = R²F` is expanded in `r = R/d`. At small `r` the
//! large-distance series `f ≈ Σ fⱼ r^{j₀+j}` is known; at large `r` the gradient
//! expansion fixes `f ≈ c₃r³ + c₂r²`. The approximant
//! `f[M/M−3] = P(r)/Q(r)` reproduces both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, solve_refined, Matrix};
use crate::model::BoundaryCondition;
use crate::poly;
use crate::quadrature::{adaptive, AdaptiveOptions};
use crate::scalar::Scalar;

/// Large-distance force series `f = Σ_{j≥1} fⱼ r^{j₀+j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries<T> {
    pub bc: BoundaryCondition,
    pub j0: u32,
    pub coefficients: Vec<T>,
    #[serde(default)]
    pub source: String,
}

impl<T: Scalar> AsymptoticSeries<T> {
    pub fn new(bc: BoundaryCondition, j0: u32, coefficients: Vec<T>, source: impl Into<String>) -> Self {
        Self {
            bc,
            j0,
            coefficients,
            source: source.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(Error::Input("asymptotic series needs at least one coefficient".into()));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("asymptotic series has non-finite coefficients".into()));
        }
        if (self.j0 as usize + self.n() + 5) % 2 != 0 {
            return Err(Error::Input(format!(
                "j0 + n + 5 = {} is odd, so the numerator degree is not an integer",
                self.j0 as usize + self.n() + 5
            )));
        }
        Ok(())
    }

    /// First `n` coefficients.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n() {
            return Err(Error::Input(format!(
                "cannot truncate a series of {} terms to {n}",
                self.n()
            )));
        }
        Ok(Self {
            coefficients: self.coefficients[..n].to_vec(),
            ..self.clone()
        })
    }

    /// Force as a polynomial in `r`, zero below `r^{j₀+1}`.
    pub fn force_polynomial(&self) -> Vec<T> {
        let mut t = vec![T::zero(); self.j0 as usize + 1];
        t.extend(self.coefficients.iter().copied());
        t
    }

    /// `E·R` as a polynomial in `r`, from `f = r² d(ER)/dr`.
    pub fn energy_polynomial(&self) -> Vec<T> {
        let mut t = vec![T::zero(); self.j0 as usize];
        for (j, &f) in self.coefficients.iter().enumerate() {
            let k = self.j0 as usize + j;
            t.push(f / T::from_usize_lossy(k));
        }
        t
    }

    /// Numerator degree of the force approximant, `(j₀ + n + 5)/2`.
    pub fn numerator_degree(&self) -> Result<usize> {
        self.validate()?;
        Ok((self.j0 as usize + self.n() + 5) / 2)
    }
}

/// Quantity a rational approximant resums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resummed {
    /// `f = R²F`, growing like `r³`.
    Force,
    /// `E·R`, growing like `r²`.
    Energy,
}

impl Resummed {
    fn lead(self) -> usize {
        match self {
            Resummed::Force => 3,
            Resummed::Energy => 2,
        }
    }
}

/// Pole of `Q` on the positive axis, cancelled when the numerator vanishes nearby.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole<T> {
    pub location: T,
    /// Matching numerator zero for a pole-zero doublet.
    pub cancelled_by: Option<T>,
}

/// Positive real denominator roots of an approximant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleReport<T> {
    pub r_max: T,
    pub poles: Vec<Pole<T>>,
}

impl<T: Scalar> PoleReport<T> {
    pub fn uncancelled(&self) -> Vec<T> {
        self.poles
            .iter()
            .filter(|p| p.cancelled_by.is_none())
            .map(|p| p.location)
            .collect()
    }

    pub fn doublets(&self) -> Vec<(T, T)> {
        self.poles
            .iter()
            .filter_map(|p| p.cancelled_by.map(|z| (p.location, z)))
            .collect()
    }

    /// No uncancelled pole in `(0, r_max]`.
    pub fn is_pole_free(&self) -> bool {
        self.poles.iter().all(|p| p.cancelled_by.is_some())
    }
}

/// Relative distance below which a numerator zero cancels a denominator root.
pub const DOUBLET_TOLERANCE: f64 = 1e-6;

/// Rational function `P(r)/Q(r)` with `q₀ = 1` and `deg Q = deg P − lead`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadeApproximant<T> {
    pub quantity: Resummed,
    pub m: usize,
    /// `p₀ … p_M`.
    pub p: Vec<T>,
    /// `q₀ = 1, q₁ … q_{M−lead}`.
    pub q: Vec<T>,
    pub j0: u32,
    /// 1-norm condition number of the construction system, when built from constraints.
    pub condition: f64,
    pub residual: f64,
    /// Numerator and denominator with cancelled pole-zero pairs divided out.
    #[serde(skip)]
    reduced: (Vec<T>, Vec<T>),
    #[serde(skip)]
    doublets: Vec<(T, T)>,
}

impl<T: Scalar> PadeApproximant<T> {
    /// Approximant from explicit coefficients; `q` starts with `q₀`, which must be 1.
    pub fn from_coefficients(quantity: Resummed, p: Vec<T>, q: Vec<T>, j0: u32) -> Result<Self> {
        if q.first() != Some(&T::one()) {
            return Err(Error::Input("denominator must start with q0 = 1".into()));
        }
        if p.len() != q.len() + quantity.lead() {
            return Err(Error::Input(format!(
                "numerator degree {} and denominator degree {} do not differ by {}",
                p.len().saturating_sub(1),
                q.len() - 1,
                quantity.lead()
            )));
        }
        let mut a = Self {
            quantity,
            m: p.len() - 1,
            p,
            q,
            j0,
            condition: f64::NAN,
            residual: 0.0,
            reduced: (Vec::new(), Vec::new()),
            doublets: Vec::new(),
        };
        a.reduce()?;
        Ok(a)
    }

    fn reduce(&mut self) -> Result<()> {
        let report = self.poles(T::infinity())?;
        let mut p = self.p.clone();
        let mut q = self.q.clone();
        self.doublets = report.doublets();
        for &(zq, zp) in &self.doublets {
            q = poly::deflate(&q, zq);
            p = poly::deflate(&p, zp);
        }
        self.reduced = (p, q);
        Ok(())
    }

    fn poles(&self, r_max: T) -> Result<PoleReport<T>> {
        let tol = T::lit(1e-7);
        let q_roots = poly::real_roots_in(&self.q, T::zero(), r_max, tol)?;
        let p_roots = poly::real_roots_in(&self.p, T::zero(), T::infinity(), tol)?;
        let poles = q_roots
            .into_iter()
            .map(|rq| {
                let near = p_roots
                    .iter()
                    .copied()
                    .min_by(|a, b| {
                        (*a - rq)
                            .abs()
                            .partial_cmp(&(*b - rq).abs())
                            .expect("finite roots")
                    })
                    .filter(|&rp| (rp - rq).abs() <= T::lit(DOUBLET_TOLERANCE) * rq.abs());
                Pole {
                    location: rq,
                    cancelled_by: near,
                }
            })
            .collect();
        Ok(PoleReport { r_max, poles })
    }

    /// Pole-zero pairs removed before evaluation.
    pub fn doublets(&self) -> &[(T, T)] {
        &self.doublets
    }

    fn lead(&self) -> usize {
        self.quantity.lead()
    }

    /// Rational function at `r > 0` with cancelled doublets removed.
    pub fn eval(&self, r: T) -> Result<T> {
        if !(r > T::zero() && r.is_finite()) {
            return Err(Error::Domain(format!("r must be positive, got {r}")));
        }
        let (p, q) = &self.reduced;
        let (num, den) = if r <= T::one() {
            (poly::eval(p, r), poly::eval(q, r))
        } else {
            let s = T::one() / r;
            let lead = r.powi(self.lead() as i32);
            (lead * poly::eval_reversed(p, s), poly::eval_reversed(q, s))
        };
        Ok(num / den)
    }

    /// Force at `r`, refusing points within `1e−6` (relative) of an uncancelled pole.
    pub fn eval_force(&self, r: T) -> Result<T> {
        if self.quantity != Resummed::Force {
            return Err(Error::Input("approximant does not resum the force".into()));
        }
        self.eval_checked(r)
    }

    fn eval_checked(&self, r: T) -> Result<T> {
        if r > T::zero() {
            for pole in poly::real_roots_in(&self.reduced.1, T::zero(), T::infinity(), T::lit(1e-7))? {
                if (r - pole).abs() <= T::lit(1e-6) * pole.max(T::one()) {
                    return Err(Error::Evaluation(format!(
                        "r = {r} lies within 1e-6 of a denominator root at {pole}"
                    )));
                }
            }
        }
        self.eval(r)
    }

    /// `E/E_PFA` at `r` for an energy approximant.
    pub fn energy_ratio(&self, r: T, alpha: T) -> Result<T> {
        if self.quantity != Resummed::Energy {
            return Err(Error::Input("approximant does not resum the energy".into()));
        }
        Ok(self.eval_checked(r)? / pfa_energy_scaled(alpha, r))
    }

    /// Taylor coefficients at `r = 0` through `r^order`.
    pub fn taylor(&self, order: usize) -> Vec<T> {
        let mut t = vec![T::zero(); order + 1];
        for k in 0..=order {
            let mut v = self.p.get(k).copied().unwrap_or(T::zero());
            for i in 1..self.q.len().min(k + 1) {
                v -= self.q[i] * t[k - i];
            }
            t[k] = v;
        }
        t
    }

    /// Coefficients of `r^lead, r^{lead−1}, …` in the large-`r` expansion.
    pub fn large_r(&self, terms: usize) -> Vec<T> {
        let ps: Vec<T> = self.p.iter().rev().copied().collect();
        let qs: Vec<T> = self.q.iter().rev().copied().collect();
        let mut d: Vec<T> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut v = ps.get(k).copied().unwrap_or(T::zero());
            for i in 1..=k {
                if let Some(&qi) = qs.get(i) {
                    v -= qi * d[k - i];
                }
            }
            d.push(v / qs[0]);
        }
        d
    }
}

/// `E_PFA·R = −απ³r²/1440` for the sphere-plate geometry.
pub fn pfa_energy_scaled<T: Scalar>(alpha: T, r: T) -> T {
    -alpha * T::PI() * T::PI() * T::PI() * r * r / T::lit(1440.0)
}

/// Large-`r` force coefficients `c₃ = −απ³/720` and `c₂ = −απ³(2β−1)/1440`.
pub fn large_r_force_terms<T: Scalar>(alpha: T, beta: T) -> (T, T) {
    let pi3 = T::PI() * T::PI() * T::PI();
    (
        -alpha * pi3 / T::lit(720.0),
        -alpha * pi3 * (T::lit(2.0) * beta - T::one()) / T::lit(1440.0),
    )
}

fn build_constrained<T: Scalar>(
    quantity: Resummed,
    small: &[T],
    big: (T, T),
    j0: u32,
) -> Result<PadeApproximant<T>> {
    let lead = quantity.lead();
    let rows_small = small.len();
    if (rows_small + 1 + lead) % 2 != 0 {
        return Err(Error::Input("constraint count does not give an integer degree".into()));
    }
    let m = (rows_small + 1 + lead) / 2;
    if m < lead + 1 {
        return Err(Error::Input("series too short for a nontrivial denominator".into()));
    }
    let nq = m - lead;
    let size = m + 1 + nq;
    let mut a = Matrix::zeros(size, size);
    let mut b = vec![T::zero(); size];
    for k in 0..rows_small {
        if k <= m {
            a[(k, k)] = T::one();
        }
        for i in 1..=nq {
            if k >= i {
                a[(k, m + i)] = -small[k - i];
            }
        }
        b[k] = small[k];
    }
    // coefficient of r^k in P − (big.0 r^lead + big.1 r^{lead−1}) Q
    for (row, k) in [(rows_small, m), (rows_small + 1, m - 1)] {
        a[(row, k)] = T::one();
        for (coef, shift) in [(big.0, lead), (big.1, lead - 1)] {
            if k >= shift {
                let i = k - shift;
                if i == 0 {
                    b[row] += coef;
                } else if i <= nq {
                    a[(row, m + i)] -= coef;
                }
            }
        }
    }
    let sol = solve_refined(&a, &b)?;
    let tol = 1e-10f64.max(100.0 * T::epsilon().to_f64_lossy());
    if !(sol.relative_residual <= tol) {
        return Err(Error::Construction {
            message: format!(
                "construction residual {:.3e} exceeds {tol:.1e}",
                sol.relative_residual
            ),
            condition: sol.condition,
        });
    }
    let p = sol.x[..=m].to_vec();
    let mut q = vec![T::one()];
    q.extend_from_slice(&sol.x[m + 1..]);
    let mut approx = PadeApproximant::from_coefficients(quantity, p, q, j0)?;
    approx.condition = sol.condition;
    approx.residual = sol.relative_residual;
    Ok(approx)
}

/// Force approximant `f[M/M−3]` with `M = (j₀ + n + 5)/2`.
pub fn build_pade<T: Scalar>(ae: &AsymptoticSeries<T>, alpha: T, beta: T) -> Result<PadeApproximant<T>> {
    ae.validate()?;
    build_constrained(
        Resummed::Force,
        &ae.force_polynomial(),
        large_r_force_terms(alpha, beta),
        ae.j0,
    )
}

/// Energy approximant `(ER)[M′/M′−2]`, matching the energy series at small `r`
/// and `E_PFA R (1 + θ₁/r)` at large `r`.
pub fn build_energy_pade<T: Scalar>(
    ae: &AsymptoticSeries<T>,
    alpha: T,
    beta: T,
) -> Result<PadeApproximant<T>> {
    ae.validate()?;
    let a2 = pfa_energy_scaled(alpha, T::one());
    let theta1 = T::lit(2.0) * beta - T::one();
    build_constrained(Resummed::Energy, &ae.energy_polynomial(), (a2, a2 * theta1), ae.j0)
}

/// Positive real denominator roots in `(0, r_max]`, classified as poles or
/// cancelled pole-zero doublets.
pub fn pole_check<T: Scalar>(pade: &PadeApproximant<T>, r_max: T) -> Result<PoleReport<T>> {
    pade.poles(r_max)
}

/// Short-distance coefficients of `E/E_PFA = 1 + θ₁ x + θ₂ x² ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thetas<T> {
    pub theta1: T,
    pub theta2: T,
    pub c3: T,
    pub c2: T,
    pub c1: T,
}

/// Reads `θ₁ = −1440 c₂/(απ³)` and `θ₂ = 1440 c₁/(απ³)` from the large-`r`
/// expansion `f ≈ c₃r³ + c₂r² + c₁r` of a force approximant.
pub fn extract_thetas<T: Scalar>(pade: &PadeApproximant<T>, alpha: T) -> Result<Thetas<T>> {
    if pade.quantity != Resummed::Force {
        return Err(Error::Input("θ extraction needs a force approximant".into()));
    }
    let c = pade.large_r(3);
    let k = alpha * T::PI() * T::PI() * T::PI() / T::lit(1440.0);
    Ok(Thetas {
        theta1: -c[1] / k,
        theta2: c[2] / k,
        c3: c[0],
        c2: c[1],
        c1: c[2],
    })
}

/// Origin of an energy curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Oracle,
    Pade,
    Gradient,
    ExternalFixture,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Oracle => "oracle",
            Provenance::Pade => "pade",
            Provenance::Gradient => "gradient",
            Provenance::ExternalFixture => "external_fixture",
        })
    }
}

/// Samples of `(d/R, E/E_PFA)` with strictly increasing `d/R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCurve<T> {
    pub samples: Vec<(T, T)>,
    pub provenance: Provenance,
    /// Optional per-sample uncertainty of `E/E_PFA`.
    pub errors: Option<Vec<T>>,
}

impl<T: Scalar> EnergyCurve<T> {
    pub fn new(samples: Vec<(T, T)>, provenance: Provenance) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Input("curve abscissae d/R must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !(s.0.is_finite() && s.1.is_finite())) {
            return Err(Error::Input("curve contains non-finite samples".into()));
        }
        Ok(Self {
            samples,
            provenance,
            errors: None,
        })
    }

    pub fn with_errors(mut self, errors: Vec<T>) -> Result<Self> {
        if errors.len() != self.samples.len() {
            return Err(Error::Input("error column length does not match the samples".into()));
        }
        self.errors = Some(errors);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Linear interpolation in `d/R`; `None` outside the sampled range.
    pub fn interpolate(&self, x: T) -> Option<T> {
        let i = self.samples.iter().position(|s| s.0 >= x)?;
        let (x1, y1) = self.samples[i];
        if x1 == x {
            return Some(y1);
        }
        let (x0, y0) = *self.samples.get(i.checked_sub(1)?)?;
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// `E/E_PFA` on the given `r = R/d` values by integrating `ER = ∫₀^r f(ρ)/ρ² dρ`.
pub fn energy_curve<T: Scalar>(
    pade: &PadeApproximant<T>,
    alpha: T,
    r_grid: &[T],
) -> Result<EnergyCurve<T>> {
    if pade.quantity != Resummed::Force {
        return Err(Error::Input("energy curves integrate a force approximant".into()));
    }
    if r_grid.iter().any(|&r| !(r > T::zero() && r.is_finite())) {
        return Err(Error::Domain("r grid values must be positive".into()));
    }
    let mut rs = r_grid.to_vec();
    rs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    rs.dedup();
    let r_max = *rs.last().ok_or_else(|| Error::Input("empty r grid".into()))?;
    let poles = pole_check(pade, r_max)?;
    if let Some(&p) = poles.uncancelled().first() {
        return Err(Error::Integration(format!(
            "approximant has a pole at r = {p} inside the integration range"
        )));
    }
    let opts = AdaptiveOptions {
        rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(100.0)),
        abs_tol: T::zero(),
        initial_panels: 2,
        max_panels: 2000,
    };
    let mut failure = None;
    let mut integrand = |rho: T| {
        match pade.eval(rho) {
            Ok(f) => [f / (rho * rho)],
            Err(e) => {
                failure.get_or_insert(e);
                [T::zero()]
            }
        }
    };
    let mut acc = T::zero();
    let mut prev = T::zero();
    let mut samples = Vec::with_capacity(rs.len());
    for &r in &rs {
        let est = adaptive(&mut integrand, &[prev, r], &opts)?;
        acc += est.value[0];
        prev = r;
        samples.push((T::one() / r, acc / pfa_energy_scaled(alpha, r)));
    }
    if let Some(e) = failure {
        return Err(e);
    }
    samples.reverse();
    EnergyCurve::new(samples, Provenance::Pade)
}

/// Least-squares fit of `E/E_PFA − 1 = θ₁x + θ₂x² ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaFit<T> {
    pub theta1: T,
    pub theta2: T,
    pub theta1_uncertainty: T,
    pub theta2_uncertainty: T,
    /// Root-mean-square residual of `E/E_PFA`.
    pub residual: T,
    pub samples: usize,
}

pub fn fit_theta1<T: Scalar>(curve: &EnergyCurve<T>, range: (T, T)) -> Result<ThetaFit<T>> {
    let pts: Vec<(T, T)> = curve
        .samples
        .iter()
        .copied()
        .filter(|&(x, _)| x >= range.0 && x <= range.1)
        .collect();
    if pts.len() < 6 {
        return Err(Error::Input(format!(
            "θ fit needs at least 6 samples in [{}, {}], found {}",
            range.0,
            range.1,
            pts.len()
        )));
    }
    if pts.iter().any(|&(x, _)| !(x > T::zero())) {
        return Err(Error::Domain("θ fit requires positive d/R".into()));
    }
    let rows: Vec<Vec<T>> = pts.iter().map(|&(x, _)| vec![x, x * x * x.ln()]).collect();
    let y: Vec<T> = pts.iter().map(|&(_, e)| e - T::one()).collect();
    let fit = least_squares(&Matrix::from_rows(&rows)?, &y)?;
    Ok(ThetaFit {
        theta1: fit.coefficients[0],
        theta2: fit.coefficients[1],
        theta1_uncertainty: fit.standard_errors[0],
        theta2_uncertainty: fit.standard_errors[1],
        residual: fit.rms,
        samples: pts.len(),
    })
}
