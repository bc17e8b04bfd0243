//! Gauss-Legendre rules and globally adaptive Gauss-Kronrod integration in one
//! and two dimensions.
//!
//! Integrands are vector valued (`[T; N]`) so that several moments sharing one
//! set of nodes can be integrated together. All routines are sequential and
//! therefore deterministic for fixed inputs.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on<T: Scalar>(n: usize, a: T, b: T) -> Vec<(T, T)> {
    let (x, w) = gauss_legendre(n);
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (mid + half * T::lit(xi), half * T::lit(wi)))
        .collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Equal panels each initial interval is split into before adapting.
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl<T: Scalar> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-8),
            abs_tol: T::zero(),
            initial_panels: 1,
            max_panels: 4000,
        }
    }
}

/// Integral estimate with an error bound in the max norm over components.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: T,
}

fn max_norm<T: Scalar, const N: usize>(v: &[T; N]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn gk15<T: Scalar, const N: usize, F: FnMut(T) -> [T; N]>(
    f: &mut F,
    a: T,
    b: T,
) -> Panel<T, N> {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut kron = [T::zero(); N];
    let mut gauss = [T::zero(); N];
    let fc = f(mid);
    for c in 0..N {
        kron[c] = fc[c] * T::lit(WGK[7]);
        gauss[c] = fc[c] * T::lit(WG[3]);
    }
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        for c in 0..N {
            let s = f1[c] + f2[c];
            kron[c] += s * T::lit(WGK[j]);
            if j % 2 == 1 {
                gauss[c] += s * T::lit(WG[j / 2]);
            }
        }
    }
    let mut value = [T::zero(); N];
    let mut diff = [T::zero(); N];
    for c in 0..N {
        value[c] = kron[c] * half;
        diff[c] = (kron[c] - gauss[c]) * half;
    }
    Panel {
        a,
        b,
        value,
        error: max_norm(&diff),
    }
}

/// Globally adaptive 15-point Gauss-Kronrod integration over the consecutive
/// intervals defined by `breaks` (at least two increasing points).
pub fn adaptive<T, const N: usize, F>(
    mut f: F,
    breaks: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Estimate<T, N>>
where
    T: Scalar,
    F: FnMut(T) -> [T; N],
{
    if breaks.len() < 2 {
        return Err(Error::Input("integration needs at least two break points".into()));
    }
    let mut panels: Vec<Panel<T, N>> = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            return Err(Error::Input(format!("integration interval [{a}, {b}] is empty")));
        }
        let k = opts.initial_panels.max(1);
        let h = (b - a) / T::from_usize_lossy(k);
        for i in 0..k {
            let lo = a + h * T::from_usize_lossy(i);
            let hi = if i + 1 == k { b } else { lo + h };
            panels.push(gk15(&mut f, lo, hi));
        }
    }
    let mut evaluations = 15 * panels.len();
    loop {
        let mut total = [T::zero(); N];
        let mut err = T::zero();
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            for c in 0..N {
                total[c] += p.value[c];
            }
            err += p.error;
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let tol = opts.abs_tol.max(opts.rel_tol * max_norm(&total));
        let converged = err <= tol;
        if converged || panels.len() >= opts.max_panels || !err.is_finite() {
            if !max_norm(&total).is_finite() {
                return Err(Error::Integration("integrand is not finite".into()));
            }
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
                converged,
            });
        }
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) / T::lit(2.0);
        if !(mid > p.a && mid < p.b) {
            // Interval cannot be split further in this precision.
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
                converged: false,
            });
        }
        panels.push(gk15(&mut f, p.a, mid));
        panels.push(gk15(&mut f, mid, p.b));
        evaluations += 30;
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: &AdaptiveOptions<T>,
) -> Result<(T, T)> {
    let est = adaptive(|x| [f(x)], &[a, b], opts)?;
    Ok((est.value[0], est.error))
}

/// Nested adaptive integration over a rectangle `[x0, x1] × [y0, y1]`.
///
/// `x_breaks`/`y_breaks` are interior points (for example the location of a
/// peak) added to the initial partition.
#[allow(clippy::too_many_arguments)]
pub fn rectangle<T, const N: usize, F>(
    mut f: F,
    x: (T, T),
    y: (T, T),
    x_breaks: &[T],
    y_breaks: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Estimate<T, N>>
where
    T: Scalar,
    F: FnMut(T, T) -> [T; N],
{
    let xb = partition(x, x_breaks);
    let yb = partition(y, y_breaks);
    nested(&mut f, &xb, &yb, opts, |_, _| T::one(), |u, v| (u, v))
}

/// Nested adaptive integration over a disk in polar coordinates centred at `center`.
pub fn disk<T, const N: usize, F>(
    mut f: F,
    center: (T, T),
    radius: T,
    opts: &AdaptiveOptions<T>,
) -> Result<Estimate<T, N>>
where
    T: Scalar,
    F: FnMut(T, T) -> [T; N],
{
    let rb = [T::zero(), radius];
    let pb = [T::zero(), T::PI(), T::lit(2.0) * T::PI()];
    nested(
        &mut f,
        &rb,
        &pb,
        opts,
        |r, _| r,
        |r, phi| (center.0 + r * phi.cos(), center.1 + r * phi.sin()),
    )
}

fn partition<T: Scalar>(range: (T, T), interior: &[T]) -> Vec<T> {
    let mut pts = vec![range.0];
    let mut inner: Vec<T> = interior
        .iter()
        .copied()
        .filter(|&p| p > range.0 && p < range.1)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).expect("finite break points"));
    inner.dedup();
    pts.extend(inner);
    pts.push(range.1);
    pts
}

fn nested<T, const N: usize, F, J, M>(
    f: &mut F,
    outer: &[T],
    inner: &[T],
    opts: &AdaptiveOptions<T>,
    jacobian: J,
    map: M,
) -> Result<Estimate<T, N>>
where
    T: Scalar,
    F: FnMut(T, T) -> [T; N],
    J: Fn(T, T) -> T,
    M: Fn(T, T) -> (T, T),
{
    let mut inner_rel = T::zero();
    let mut evaluations = 0usize;
    let mut failure: Option<Error> = None;
    let inner_opts = AdaptiveOptions {
        abs_tol: opts.abs_tol / (outer[outer.len() - 1] - outer[0]),
        ..*opts
    };
    let outer_est = adaptive(
        |u| {
            if failure.is_some() {
                return [T::zero(); N];
            }
            let res = adaptive(
                |v| {
                    let (x, y) = map(u, v);
                    let jac = jacobian(u, v);
                    let mut val = f(x, y);
                    for c in val.iter_mut() {
                        *c *= jac;
                    }
                    val
                },
                inner,
                &inner_opts,
            );
            match res {
                Ok(est) => {
                    evaluations += est.evaluations;
                    let norm = max_norm(&est.value);
                    if norm > T::zero() {
                        inner_rel = inner_rel.max(est.error / norm);
                    }
                    est.value
                }
                Err(e) => {
                    failure = Some(e);
                    [T::zero(); N]
                }
            }
        },
        outer,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Estimate {
        error: outer_est.error + inner_rel * max_norm(&outer_est.value),
        value: outer_est.value,
        evaluations,
        converged: outer_est.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 40, 81] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-13, "n={n}: {s} vs {exact}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let eps = 1e-3f64;
        let (v, err) = integrate(|x| 1.0 / (x * x + eps * eps), -1.0, 1.0, &Default::default()).unwrap();
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert_relative_eq!(v, exact, max_relative = 1e-8);
        assert!(err < 1e-7 * exact);
    }

    #[test]
    fn disk_area_and_moment() {
        let est = disk(|x, y| [1.0, x * x + y * y], (0.3, -0.2), 2.0, &Default::default()).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(est.value[0], 4.0 * pi, max_relative = 1e-12);
        // second moment about the origin of a shifted disk
        let expected = pi * 16.0 / 2.0 + 4.0 * pi * (0.09 + 0.04);
        assert_relative_eq!(est.value[1], expected, max_relative = 1e-12);
    }

    #[test]
    fn rectangle_gaussian() {
        let est = rectangle(
            |x: f64, y: f64| [(-(x * x + y * y) * 50.0).exp()],
            (-2.0, 3.0),
            (-3.0, 2.0),
            &[0.0],
            &[0.0],
            &Default::default(),
        )
        .unwrap();
        assert_relative_eq!(est.value[0], std::f64::consts::PI / 50.0, max_relative = 1e-9);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(integrate(|x: f64| x, 1.0, 1.0, &Default::default()).is_err());
    }
}
