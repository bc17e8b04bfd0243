//! Polynomials stored as ascending coefficient vectors, `c[0] + c[1] x + …`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn eval<T: Scalar>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &ci| acc * x + ci)
}

/// Evaluates `c` at `1/s` scaled by `s^deg`, i.e. the reversed polynomial at `s`.
pub fn eval_reversed<T: Scalar>(c: &[T], s: T) -> T {
    c.iter().fold(T::zero(), |acc, &ci| acc * s + ci)
}

pub fn eval_complex<T: Scalar>(c: &[T], z: Complex<T>) -> Complex<T> {
    c.iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &ci| acc * z + ci)
}

pub fn derivative<T: Scalar>(c: &[T]) -> Vec<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| ck * T::from_usize_lossy(k))
        .collect()
}

pub fn multiply<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Degree after discarding exactly-zero leading coefficients; `None` for the zero polynomial.
pub fn degree<T: Scalar>(c: &[T]) -> Option<usize> {
    c.iter().rposition(|&v| v != T::zero())
}

/// Quotient of `c` by `(x - root)`, dropping the remainder.
pub fn deflate<T: Scalar>(c: &[T], root: T) -> Vec<T> {
    let n = c.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![T::zero(); n - 1];
    let mut carry = T::zero();
    for k in (1..n).rev() {
        carry = c[k] + carry * root;
        q[k - 1] = carry;
    }
    q
}

/// All complex roots by the Aberth-Ehrlich iteration followed by Newton polishing.
pub fn roots<T: Scalar>(c: &[T]) -> Result<Vec<Complex<T>>> {
    let deg = degree(c).ok_or_else(|| Error::Input("zero polynomial has no roots".into()))?;
    let zeros_at_origin = c.iter().take_while(|&&v| v == T::zero()).count();
    let mut out: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); zeros_at_origin];
    let p: Vec<T> = c[zeros_at_origin..=deg].to_vec();
    let n = p.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    let lead = p[n];
    let monic: Vec<T> = p.iter().map(|&v| v / lead).collect();
    let dp = derivative(&monic);
    // Initial guesses on a circle bounded by the Fujiwara radius.
    let radius = (0..n)
        .map(|k| {
            let v = monic[k].abs();
            let e = T::one() / T::from_usize_lossy(n - k);
            if k == 0 {
                (v / T::lit(2.0)).powf(e)
            } else {
                v.powf(e)
            }
        })
        .fold(T::zero(), T::max)
        * T::lit(2.0);
    let radius = if radius > T::zero() { radius } else { T::one() };
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let ang = T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(n)
                + T::lit(0.4);
            Complex::from_polar(radius, ang)
        })
        .collect();
    let tiny = T::epsilon() * T::lit(4.0);
    for _ in 0..500 {
        let mut moved = T::zero();
        for i in 0..n {
            let pv = eval_complex(&monic, z[i]);
            if pv.norm() == T::zero() {
                continue;
            }
            let ratio = pv / eval_complex(&dp, z[i]);
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    s += Complex::new(T::one(), T::zero()) / (z[i] - z[j]);
                }
            }
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * s);
            if step.norm().is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(T::one()));
            }
        }
        if moved < tiny {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_complex(&dp, *zi);
            if d.norm() == T::zero() {
                break;
            }
            let step = eval_complex(&monic, *zi) / d;
            if !step.norm().is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    out.extend(z);
    Ok(out)
}

/// Real roots in `(lo, hi]`, taking roots with `|Im z| ≤ imag_tol·max(1, |z|)` as real.
pub fn real_roots_in<T: Scalar>(c: &[T], lo: T, hi: T, imag_tol: T) -> Result<Vec<T>> {
    let mut r: Vec<T> = roots(c)?
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * z.re.abs().max(T::one()))
        .map(|z| z.re)
        .filter(|&x| x > lo && x <= hi)
        .collect();
    r.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roots_of_known_polynomial() {
        // (x - 1)(x + 2)(x - 0.5)(x² + 1)
        let p = multiply(
            &multiply(&[-1.0, 1.0], &[2.0, 1.0]),
            &multiply(&[-0.5, 1.0], &[1.0, 0.0, 1.0]),
        );
        let mut re = real_roots_in(&p, -10.0, 10.0, 1e-10).unwrap();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re.len(), 3);
        assert_relative_eq!(re[0], -2.0, max_relative = 1e-12);
        assert_relative_eq!(re[1], 0.5, max_relative = 1e-12);
        assert_relative_eq!(re[2], 1.0, max_relative = 1e-12);
        assert_eq!(roots(&p).unwrap().len(), 5);
    }

    #[test]
    fn zero_roots_and_deflation() {
        let p = [0.0, 0.0, -3.0, 1.0];
        let r = roots(&p).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        let q = deflate(&p, 3.0);
        assert_eq!(q, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn reversed_evaluation() {
        let p = [1.0, 2.0, 3.0];
        let s = 0.25;
        assert_relative_eq!(eval_reversed(&p, s), s * s * eval(&p, 1.0 / s), max_relative = 1e-15);
    }
}
