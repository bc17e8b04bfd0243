//! Coupling coefficients for the plane translation of multipoles.
//!
//! `G(m; l, l′, λ) = √((2l+1)(2l′+1)) (2λ+1) (l l′ λ; 0 0 0)(l l′ λ; m −m 0)`,
//! evaluated as an exact Gauss-Legendre integral of three normalized Legendre
//! functions.

use rayon::prelude::*;

use crate::quadrature::gauss_legendre;

/// Fully normalized associated Legendre functions `P̄_l^m(x)`, `l = m..=l_max`,
/// with `∫₋₁¹ (P̄_l^m)² dx = 1` and no Condon-Shortley phase.
pub fn normalized_legendre(m: usize, l_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1 - m);
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m {
        pmm *= ((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    out.push(pmm);
    if l_max == m {
        return out;
    }
    out.push(((2 * m + 3) as f64).sqrt() * x * pmm);
    let a = |l: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
    for l in m + 2..=l_max {
        let i = l - m;
        let v = a(l) * (x * out[i - 1] - out[i - 2] / a(l - 1));
        out.push(v);
    }
    out
}

/// Table of couplings for all `m ≤ l, l′ ≤ l_max`.
#[derive(Debug, Clone)]
pub struct GauntTable {
    l_max: usize,
    /// Indexed by `m`, then `(l − m, l′ − m)` with `l ≤ l′`, then `(λ − |l − l′|)/2`.
    blocks: Vec<Vec<Vec<f64>>>,
}

impl GauntTable {
    pub fn new(l_max: usize) -> Self {
        let (nodes, weights) = gauss_legendre(2 * l_max + 2);
        let columns = |m: usize, top: usize, weighted: bool| -> Vec<Vec<f64>> {
            let vals: Vec<Vec<f64>> = nodes.iter().map(|&x| normalized_legendre(m, top, x)).collect();
            (0..=top - m)
                .map(|j| {
                    (0..nodes.len())
                        .map(|i| if weighted { weights[i] * vals[i][j] } else { vals[i][j] })
                        .collect()
                })
                .collect()
        };
        let p0 = columns(0, 2 * l_max, true);
        let blocks = (0..=l_max)
            .into_par_iter()
            .map(|m| {
                let pm = columns(m, l_max, false);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let n = l_max + 1 - m;
                let mut prod = vec![0.0; nodes.len()];
                let mut block = Vec::with_capacity(n * (n + 1) / 2);
                for l in m..=l_max {
                    for lp in l..=l_max {
                        for (i, v) in prod.iter_mut().enumerate() {
                            *v = pm[l - m][i] * pm[lp - m][i];
                        }
                        let coupling: Vec<f64> = (lp - l..=l + lp)
                            .step_by(2)
                            .map(|lam| {
                                let integral: f64 =
                                    prod.iter().zip(&p0[lam]).map(|(a, b)| a * b).sum();
                                sign * (2.0 * (2 * lam + 1) as f64).sqrt() * integral
                            })
                            .collect();
                        block.push(coupling);
                    }
                }
                block
            })
            .collect();
        Self { l_max, blocks }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Couplings for `λ = |l − l′|, |l − l′| + 2, …, l + l′`.
    pub fn couplings(&self, m: usize, l: usize, lp: usize) -> &[f64] {
        let (a, b) = if l <= lp { (l - m, lp - m) } else { (lp - m, l - m) };
        let n = self.l_max + 1 - m;
        let offset = a * n - a * a.saturating_sub(1) / 2;
        &self.blocks[m][offset + (b - a)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_normalization() {
        let (x, w) = gauss_legendre(40);
        for m in [0, 1, 5] {
            let vals: Vec<Vec<f64>> = x.iter().map(|&xi| normalized_legendre(m, 12, xi)).collect();
            for a in 0..=12 - m {
                for b in 0..=12 - m {
                    let s: f64 = (0..x.len()).map(|i| w[i] * vals[i][a] * vals[i][b]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "m={m} a={a} b={b} s={s}");
                }
            }
        }
    }

    #[test]
    fn known_couplings() {
        let t = GauntTable::new(3);
        // l = l′ = 0: only λ = 0 with coefficient 1
        assert_relative_eq!(t.couplings(0, 0, 0)[0], 1.0, max_relative = 1e-13);
        // l = 1, l′ = 1, m = 0: λ = 0 → 1, λ = 2 → 2
        let c = t.couplings(0, 1, 1);
        assert_relative_eq!(c[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(c[1], 2.0, max_relative = 1e-13);
        // m = 1: λ = 0 → −1, λ = 2 → 1
        let c = t.couplings(1, 1, 1);
        assert_relative_eq!(c[0], -1.0, max_relative = 1e-13);
        assert_relative_eq!(c[1], 1.0, max_relative = 1e-13);
        // l = 0, l′ = 1: λ = 1 → √3
        assert_relative_eq!(t.couplings(0, 0, 1)[0], 3f64.sqrt(), max_relative = 1e-13);
    }
}
