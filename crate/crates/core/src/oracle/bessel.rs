//! Modified spherical Bessel functions on a log scale.
//!
//! `i_l(x) = √(π/2x) I_{l+½}(x)` and `k_l(x) = e^{−x}/x · Σ …`, normalized so that
//! `k₀(x) = e^{−x}/x`. Values are returned as natural logs so that orders up to
//! a few hundred and arguments spanning many decades stay representable.

/// `ln k_l(x)` for `l = 0..=l_max`, by upward recurrence on the ratios
/// `k_{l+1}/k_l = (2l+1)/x + k_{l−1}/k_l`.
pub fn ln_k(l_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let mut out = Vec::with_capacity(l_max + 1);
    let mut ln = -x - x.ln();
    out.push(ln);
    let mut ratio = 0.0;
    for l in 0..l_max {
        ratio = if l == 0 {
            (1.0 + x) / x
        } else {
            (2 * l + 1) as f64 / x + 1.0 / ratio
        };
        ln += ratio.ln();
        out.push(ln);
    }
    out
}

/// `i_l/i_{l−1}` at `l = l_top` from the continued fraction
/// `1/((2l+1)/x + 1/((2l+3)/x + …))`, by the modified Lentz method.
fn i_ratio_cf(l_top: usize, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let b = |k: usize| (2 * (l_top + k) + 1) as f64 / x;
    let mut f = b(0).max(TINY);
    let mut c = f;
    let mut d = 0.0;
    for k in 1..100_000 {
        let bk = b(k);
        d = bk + d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = bk + 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln i_l(x)` for `l = 0..=l_max`. The ratios come from the continued fraction
/// at the top order and a stable downward recurrence.
pub fn ln_i(l_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let mut ratios = vec![0.0; l_max + 1];
    if l_max > 0 {
        ratios[l_max] = i_ratio_cf(l_max, x);
        for l in (1..l_max).rev() {
            ratios[l] = 1.0 / ((2 * l + 1) as f64 / x + ratios[l + 1]);
        }
    }
    let mut out = Vec::with_capacity(l_max + 1);
    let mut ln = x + (-(-2.0 * x).exp_m1()).ln() - (2.0 * x).ln();
    out.push(ln);
    for r in ratios.iter().skip(1) {
        ln += r.ln();
        out.push(ln);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        for &x in &[1e-3, 0.3, 2.0, 17.0, 400.0] {
            let k = ln_k(2, x);
            let e = (-x as f64).exp();
            assert_relative_eq!(k[0], (e / x).ln(), max_relative = 1e-13);
            assert_relative_eq!(k[1], (e * (1.0 + x) / (x * x)).ln(), max_relative = 1e-13);
            assert_relative_eq!(
                k[2],
                (e * (x * x + 3.0 * x + 3.0) / x.powi(3)).ln(),
                max_relative = 1e-13
            );
        }
        for &x in &[0.5, 2.0, 9.0] {
            let i = ln_i(2, x);
            let (s, c) = (f64::sinh(x), f64::cosh(x));
            assert_relative_eq!(i[0].exp(), s / x, max_relative = 1e-13);
            assert_relative_eq!(i[1].exp(), c / x - s / (x * x), max_relative = 1e-12);
            assert_relative_eq!(
                i[2].exp(),
                (3.0 / (x * x * x) + 1.0 / x) * s - 3.0 * c / (x * x),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn small_argument_limit() {
        // i_l(x) → x^l/(2l+1)!!
        let x = 1e-4;
        let i = ln_i(5, x);
        let dfact: f64 = (1..=5).map(|k| (2 * k + 1) as f64).product();
        assert_relative_eq!(i[5], 5.0 * x.ln() - dfact.ln(), max_relative = 1e-9);
    }

    #[test]
    fn wronskian() {
        // i_l k_{l+1} + i_{l+1} k_l = 1/x² in this normalization
        for &x in &[0.05, 1.0, 30.0, 800.0] {
            let i = ln_i(60, x);
            let k = ln_k(61, x);
            for l in [0, 10, 59] {
                let w = (i[l] + k[l + 1]).exp() + (i[l + 1] + k[l]).exp();
                assert_relative_eq!(w * x * x, 1.0, max_relative = 1e-11);
            }
        }
    }
}
