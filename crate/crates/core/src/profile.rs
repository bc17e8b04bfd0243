//! Single-valued height profiles `z = H(x, y)` over the reference plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which side of the surface the body occupies.
///
/// `Above` describes the lower surface of a body sitting above the reference
/// plane, so curved shapes bulge towards negative `z` and the apex is the
/// lowest point. `Below` mirrors the curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodySide {
    #[default]
    Above,
    Below,
}

impl BodySide {
    fn sign<T: Scalar>(self) -> T {
        match self {
            BodySide::Above => T::one(),
            BodySide::Below => -T::one(),
        }
    }
}

/// Cartesian term `coeff · xᵖ yᵠ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial<T> {
    pub px: u32,
    pub py: u32,
    pub coeff: T,
}

/// Radial term `coeff · ρᵏ` with `ρ = √(x² + y²)` and `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm<T> {
    pub power: u32,
    pub coeff: T,
}

/// Mode `amplitude · cos(kx x + ky y + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode<T> {
    pub kx: T,
    pub ky: T,
    pub amplitude: T,
    #[serde(default)]
    pub phase: T,
}

/// Heights on a regular lattice, `values[iy * nx + ix]` at `(x0 + ix·dx, y0 + iy·dy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProfile<T> {
    pub x0: T,
    pub y0: T,
    pub dx: T,
    pub dy: T,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
    #[serde(skip)]
    gradients: Option<Vec<(T, T)>>,
}

/// Height and gradient at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local<T> {
    pub h: T,
    pub hx: T,
    pub hy: T,
}

impl<T: Scalar> Local<T> {
    pub fn slope(&self) -> T {
        (self.hx * self.hx + self.hy * self.hy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightProfile<T> {
    Flat {
        offset: T,
    },
    /// Sphere of the given radius whose apex sits at `(0, 0, apex)`.
    Sphere {
        radius: T,
        apex: T,
        #[serde(default)]
        body: BodySide,
    },
    /// Circular cylinder; its axis lies in the plane `z = apex ± radius` along the
    /// direction at `axis_angle` from the x axis and passes over the origin.
    Cylinder {
        radius: T,
        axis_angle: T,
        apex: T,
        #[serde(default)]
        body: BodySide,
    },
    /// `apex ± (√(R² + λ²ρ²) − R)`.
    Hyperboloid {
        radius: T,
        lambda: T,
        apex: T,
        #[serde(default)]
        body: BodySide,
    },
    Polynomial {
        offset: T,
        #[serde(default)]
        terms: Vec<Monomial<T>>,
        #[serde(default)]
        radial: Vec<RadialTerm<T>>,
    },
    Fourier {
        offset: T,
        modes: Vec<FourierMode<T>>,
    },
    Grid(GridProfile<T>),
    /// First-order image of `base` under a tilt of the reference plane by `epsilon`.
    Tilted {
        base: Box<HeightProfile<T>>,
        epsilon: T,
    },
    /// `base` translated by `(dx, dy)` in the plane and raised by `dz`.
    Shifted {
        base: Box<HeightProfile<T>>,
        dx: T,
        dy: T,
        #[serde(default)]
        dz: T,
    },
}

impl<T: Scalar> HeightProfile<T> {
    pub fn flat(offset: T) -> Self {
        Self::Flat { offset }
    }

    pub fn sphere(radius: T, apex: T) -> Self {
        Self::Sphere {
            radius,
            apex,
            body: BodySide::Above,
        }
    }

    pub fn sphere_below(radius: T, apex: T) -> Self {
        Self::Sphere {
            radius,
            apex,
            body: BodySide::Below,
        }
    }

    pub fn hyperboloid(radius: T, lambda: T, apex: T) -> Self {
        Self::Hyperboloid {
            radius,
            lambda,
            apex,
            body: BodySide::Above,
        }
    }

    /// Paraboloid `offset + x²/(2Rx) + y²/(2Ry)`.
    pub fn paraboloid(rx: T, ry: T, offset: T) -> Self {
        let two = T::lit(2.0);
        Self::Polynomial {
            offset,
            terms: vec![
                Monomial {
                    px: 2,
                    py: 0,
                    coeff: T::one() / (two * rx),
                },
                Monomial {
                    px: 0,
                    py: 2,
                    coeff: T::one() / (two * ry),
                },
            ],
            radial: Vec::new(),
        }
    }

    pub fn shifted(self, dx: T, dy: T) -> Self {
        Self::Shifted {
            base: Box::new(self),
            dx,
            dy,
            dz: T::zero(),
        }
    }

    pub fn raised(self, dz: T) -> Self {
        match self {
            Self::Shifted { base, dx, dy, dz: z } => Self::Shifted { base, dx, dy, dz: z + dz },
            other => Self::Shifted {
                base: Box::new(other),
                dx: T::zero(),
                dy: T::zero(),
                dz,
            },
        }
    }

    /// Parameter checks that do not depend on the evaluation point.
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, what: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Geometry(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            Self::Flat { offset } => finite(*offset, "offset"),
            Self::Sphere { radius, apex, .. } => {
                positive(*radius, "sphere radius")?;
                finite(*apex, "apex")
            }
            Self::Cylinder {
                radius,
                apex,
                axis_angle,
                ..
            } => {
                positive(*radius, "cylinder radius")?;
                finite(*axis_angle, "axis angle")?;
                finite(*apex, "apex")
            }
            Self::Hyperboloid {
                radius,
                lambda,
                apex,
                ..
            } => {
                positive(*radius, "hyperboloid radius")?;
                positive(*lambda, "hyperboloid lambda")?;
                finite(*apex, "apex")
            }
            Self::Polynomial {
                offset,
                terms,
                radial,
            } => {
                finite(*offset, "offset")?;
                for t in terms {
                    if t.px + t.py > 4 {
                        return Err(Error::Geometry(format!(
                            "monomial x^{} y^{} exceeds quartic order",
                            t.px, t.py
                        )));
                    }
                    finite(t.coeff, "monomial coefficient")?;
                }
                for t in radial {
                    if !(2..=4).contains(&t.power) {
                        return Err(Error::Geometry(format!(
                            "radial power {} outside 2..=4",
                            t.power
                        )));
                    }
                    finite(t.coeff, "radial coefficient")?;
                }
                Ok(())
            }
            Self::Fourier { offset, modes } => {
                finite(*offset, "offset")?;
                for m in modes {
                    finite(m.kx, "kx")?;
                    finite(m.ky, "ky")?;
                    finite(m.amplitude, "amplitude")?;
                    finite(m.phase, "phase")?;
                }
                Ok(())
            }
            Self::Grid(g) => g.validate(),
            Self::Tilted { base, epsilon } => {
                finite(*epsilon, "tilt angle")?;
                base.validate()
            }
            Self::Shifted { base, dx, dy, dz } => {
                finite(*dx, "shift")?;
                finite(*dy, "shift")?;
                finite(*dz, "shift")?;
                base.validate()
            }
        }
    }

    /// Whether the profile is defined at `(x, y)`.
    pub fn contains(&self, x: T, y: T) -> bool {
        match self {
            Self::Sphere { radius, .. } => x * x + y * y < *radius * *radius,
            Self::Cylinder {
                radius, axis_angle, ..
            } => {
                let u = -x * axis_angle.sin() + y * axis_angle.cos();
                u.abs() < *radius
            }
            Self::Grid(g) => g.contains(x, y),
            Self::Tilted { base, .. } => base.contains(x, y),
            Self::Shifted { base, dx, dy, .. } => base.contains(x - *dx, y - *dy),
            _ => true,
        }
    }

    /// True if evaluation relies on lattice data.
    pub fn grid(&self) -> Option<&GridProfile<T>> {
        match self {
            Self::Grid(g) => Some(g),
            Self::Tilted { base, .. } | Self::Shifted { base, .. } => base.grid(),
            _ => None,
        }
    }

    pub fn height(&self, x: T, y: T) -> T {
        self.local(x, y).h
    }

    /// Height and gradient. Points outside [`contains`](Self::contains) give non-finite values.
    pub fn local(&self, x: T, y: T) -> Local<T> {
        match self {
            Self::Flat { offset } => Local {
                h: *offset,
                hx: T::zero(),
                hy: T::zero(),
            },
            Self::Sphere { radius, apex, body } => {
                let s = (*radius * *radius - x * x - y * y).sqrt();
                let g = body.sign::<T>();
                Local {
                    h: *apex + g * (*radius - s),
                    hx: g * x / s,
                    hy: g * y / s,
                }
            }
            Self::Cylinder {
                radius,
                axis_angle,
                apex,
                body,
            } => {
                let (nx, ny) = (-axis_angle.sin(), axis_angle.cos());
                let u = x * nx + y * ny;
                let s = (*radius * *radius - u * u).sqrt();
                let g = body.sign::<T>();
                Local {
                    h: *apex + g * (*radius - s),
                    hx: g * u / s * nx,
                    hy: g * u / s * ny,
                }
            }
            Self::Hyperboloid {
                radius,
                lambda,
                apex,
                body,
            } => {
                let l2 = *lambda * *lambda;
                let q = (*radius * *radius + l2 * (x * x + y * y)).sqrt();
                let g = body.sign::<T>();
                Local {
                    h: *apex + g * (q - *radius),
                    hx: g * l2 * x / q,
                    hy: g * l2 * y / q,
                }
            }
            Self::Polynomial {
                offset,
                terms,
                radial,
            } => {
                let mut l = Local {
                    h: *offset,
                    hx: T::zero(),
                    hy: T::zero(),
                };
                for t in terms {
                    let (px, py) = (t.px as i32, t.py as i32);
                    l.h += t.coeff * x.powi(px) * y.powi(py);
                    if px > 0 {
                        l.hx += t.coeff * T::lit(px as f64) * x.powi(px - 1) * y.powi(py);
                    }
                    if py > 0 {
                        l.hy += t.coeff * T::lit(py as f64) * x.powi(px) * y.powi(py - 1);
                    }
                }
                let rho2 = x * x + y * y;
                for t in radial {
                    let k = t.power as i32;
                    // ρᵏ and ∂ρᵏ/∂x = k ρᵏ⁻² x
                    let rk2 = if k == 2 { T::one() } else { rho2.sqrt().powi(k - 2) };
                    l.h += t.coeff * rk2 * rho2;
                    l.hx += t.coeff * T::lit(k as f64) * rk2 * x;
                    l.hy += t.coeff * T::lit(k as f64) * rk2 * y;
                }
                l
            }
            Self::Fourier { offset, modes } => {
                let mut l = Local {
                    h: *offset,
                    hx: T::zero(),
                    hy: T::zero(),
                };
                for m in modes {
                    let arg = m.kx * x + m.ky * y + m.phase;
                    let (s, c) = arg.sin_cos();
                    l.h += m.amplitude * c;
                    l.hx -= m.amplitude * m.kx * s;
                    l.hy -= m.amplitude * m.ky * s;
                }
                l
            }
            Self::Grid(g) => g.local(x, y),
            Self::Tilted { base, epsilon } => {
                let b = base.local(x, y);
                let [hxx, hxy, _] = base.hessian(x, y);
                let e = *epsilon;
                Local {
                    h: b.h - e * (x + b.h * b.hx),
                    hx: b.hx - e * (T::one() + b.hx * b.hx + b.h * hxx),
                    hy: b.hy - e * (b.hx * b.hy + b.h * hxy),
                }
            }
            Self::Shifted { base, dx, dy, dz } => {
                let l = base.local(x - *dx, y - *dy);
                Local { h: l.h + *dz, ..l }
            }
        }
    }

    /// Second derivatives `[Hxx, Hxy, Hyy]`.
    pub fn hessian(&self, x: T, y: T) -> [T; 3] {
        match self {
            Self::Flat { .. } => [T::zero(); 3],
            Self::Sphere { radius, body, .. } => {
                let s2 = *radius * *radius - x * x - y * y;
                let s = s2.sqrt();
                let s3 = s2 * s;
                let g = body.sign::<T>();
                [
                    g * (T::one() / s + x * x / s3),
                    g * x * y / s3,
                    g * (T::one() / s + y * y / s3),
                ]
            }
            Self::Cylinder {
                radius,
                axis_angle,
                body,
                ..
            } => {
                let (nx, ny) = (-axis_angle.sin(), axis_angle.cos());
                let u = x * nx + y * ny;
                let s2 = *radius * *radius - u * u;
                let c = body.sign::<T>() * *radius * *radius / (s2 * s2.sqrt());
                [c * nx * nx, c * nx * ny, c * ny * ny]
            }
            Self::Hyperboloid {
                radius,
                lambda,
                body,
                ..
            } => {
                let l2 = *lambda * *lambda;
                let q2 = *radius * *radius + l2 * (x * x + y * y);
                let q = q2.sqrt();
                let q3 = q2 * q;
                let g = body.sign::<T>();
                [
                    g * (l2 / q - l2 * l2 * x * x / q3),
                    -g * l2 * l2 * x * y / q3,
                    g * (l2 / q - l2 * l2 * y * y / q3),
                ]
            }
            Self::Polynomial { terms, radial, .. } => {
                let mut hxx = T::zero();
                let mut hxy = T::zero();
                let mut hyy = T::zero();
                for t in terms {
                    let (px, py) = (t.px as i32, t.py as i32);
                    let c = t.coeff;
                    if px > 1 {
                        hxx += c * T::lit((px * (px - 1)) as f64) * x.powi(px - 2) * y.powi(py);
                    }
                    if py > 1 {
                        hyy += c * T::lit((py * (py - 1)) as f64) * x.powi(px) * y.powi(py - 2);
                    }
                    if px > 0 && py > 0 {
                        hxy += c * T::lit((px * py) as f64) * x.powi(px - 1) * y.powi(py - 1);
                    }
                }
                let rho2 = x * x + y * y;
                for t in radial {
                    let k = T::lit(t.power as f64);
                    let c = t.coeff;
                    match t.power {
                        2 => {
                            hxx += c * k;
                            hyy += c * k;
                        }
                        p => {
                            // ∂²ρᵏ/∂xᵢ∂xⱼ = k ρᵏ⁻² δᵢⱼ + k(k−2) ρᵏ⁻⁴ xᵢ xⱼ
                            let rho = rho2.sqrt();
                            if rho == T::zero() {
                                continue;
                            }
                            let a = k * rho.powi(p as i32 - 2);
                            let b = k * (k - T::lit(2.0)) * rho.powi(p as i32 - 4);
                            hxx += c * (a + b * x * x);
                            hxy += c * b * x * y;
                            hyy += c * (a + b * y * y);
                        }
                    }
                }
                [hxx, hxy, hyy]
            }
            Self::Fourier { modes, .. } => {
                let mut h = [T::zero(); 3];
                for m in modes {
                    let c = (m.kx * x + m.ky * y + m.phase).cos() * m.amplitude;
                    h[0] -= c * m.kx * m.kx;
                    h[1] -= c * m.kx * m.ky;
                    h[2] -= c * m.ky * m.ky;
                }
                h
            }
            Self::Shifted { base, dx, dy, .. } => base.hessian(x - *dx, y - *dy),
            Self::Grid(_) | Self::Tilted { .. } => self.numerical_hessian(x, y),
        }
    }

    fn numerical_hessian(&self, x: T, y: T) -> [T; 3] {
        let step = T::epsilon().cbrt();
        let two = T::lit(2.0);
        let xp = self.local(x + step, y);
        let xm = self.local(x - step, y);
        let yp = self.local(x, y + step);
        let ym = self.local(x, y - step);
        let hxy = ((xp.hy - xm.hy) + (yp.hx - ym.hx)) / (two * two * step);
        [(xp.hx - xm.hx) / (two * step), hxy, (yp.hy - ym.hy) / (two * step)]
    }

    /// Principal radii of curvature `1/κ` at `(x, y)` for a locally convex surface.
    pub fn local_radii(&self, x: T, y: T) -> Result<(T, T)> {
        let [a, b, c] = self.hessian(x, y);
        let half = T::lit(0.5);
        let mean = half * (a + c);
        let disc = (half * half * (a - c) * (a - c) + b * b).sqrt();
        let (k1, k2) = (mean + disc, mean - disc);
        if !(k2 > T::zero()) {
            return Err(Error::Geometry(
                "profile is not locally convex at the point of closest approach".into(),
            ));
        }
        Ok((T::one() / k1, T::one() / k2))
    }
}

fn finite<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Geometry(format!("{what} must be finite")))
    }
}

impl<T: Scalar> GridProfile<T> {
    pub fn new(x0: T, y0: T, dx: T, dy: T, nx: usize, ny: usize, values: Vec<T>) -> Result<Self> {
        let mut g = Self {
            x0,
            y0,
            dx,
            dy,
            nx,
            ny,
            values,
            gradients: None,
        };
        g.validate()?;
        g.gradients = Some(g.node_gradients());
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.ny < 16 {
            return Err(Error::Geometry(format!(
                "grid needs at least 16 points per axis, got {}×{}",
                self.nx, self.ny
            )));
        }
        if self.values.len() != self.nx * self.ny {
            return Err(Error::Geometry(format!(
                "grid holds {} values, expected {}",
                self.values.len(),
                self.nx * self.ny
            )));
        }
        if !(self.dx > T::zero() && self.dy > T::zero()) {
            return Err(Error::Geometry("grid spacing must be positive".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("grid contains non-finite heights".into()));
        }
        Ok(())
    }

    pub fn x_at(&self, ix: usize) -> T {
        self.x0 + self.dx * T::from_usize_lossy(ix)
    }

    pub fn y_at(&self, iy: usize) -> T {
        self.y0 + self.dy * T::from_usize_lossy(iy)
    }

    pub fn value(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.nx + ix]
    }

    pub fn contains(&self, x: T, y: T) -> bool {
        let x1 = self.x_at(self.nx - 1);
        let y1 = self.y_at(self.ny - 1);
        x >= self.x0 && x <= x1 && y >= self.y0 && y <= y1
    }

    /// Gradient at a lattice node from fourth-order differences.
    pub fn node_gradient(&self, ix: usize, iy: usize) -> (T, T) {
        match &self.gradients {
            Some(g) => g[iy * self.nx + ix],
            None => (
                diff4(|i| self.value(i, iy), ix, self.nx, self.dx),
                diff4(|j| self.value(ix, j), iy, self.ny, self.dy),
            ),
        }
    }

    fn node_gradients(&self) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(self.values.len());
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push((
                    diff4(|i| self.value(i, iy), ix, self.nx, self.dx),
                    diff4(|j| self.value(ix, j), iy, self.ny, self.dy),
                ));
            }
        }
        out
    }

    /// Bilinear interpolation of heights and node gradients.
    pub fn local(&self, x: T, y: T) -> Local<T> {
        if !self.contains(x, y) {
            let nan = T::nan();
            return Local {
                h: nan,
                hx: nan,
                hy: nan,
            };
        }
        let fx = (x - self.x0) / self.dx;
        let fy = (y - self.y0) / self.dy;
        let ix = fx.floor().to_usize().unwrap_or(0).min(self.nx - 2);
        let iy = fy.floor().to_usize().unwrap_or(0).min(self.ny - 2);
        let tx = fx - T::from_usize_lossy(ix);
        let ty = fy - T::from_usize_lossy(iy);
        let w = [
            (ix, iy, (T::one() - tx) * (T::one() - ty)),
            (ix + 1, iy, tx * (T::one() - ty)),
            (ix, iy + 1, (T::one() - tx) * ty),
            (ix + 1, iy + 1, tx * ty),
        ];
        let mut l = Local {
            h: T::zero(),
            hx: T::zero(),
            hy: T::zero(),
        };
        for (i, j, wt) in w {
            let (gx, gy) = self.node_gradient(i, j);
            l.h += wt * self.value(i, j);
            l.hx += wt * gx;
            l.hy += wt * gy;
        }
        l
    }
}

fn diff4<T: Scalar, F: Fn(usize) -> T>(f: F, i: usize, n: usize, h: T) -> T {
    let c = |v: f64| T::lit(v);
    let d = c(12.0) * h;
    if i >= 2 && i + 2 < n {
        (f(i - 2) - c(8.0) * f(i - 1) + c(8.0) * f(i + 1) - f(i + 2)) / d
    } else if i == 0 {
        (c(-25.0) * f(0) + c(48.0) * f(1) - c(36.0) * f(2) + c(16.0) * f(3) - c(3.0) * f(4)) / d
    } else if i == 1 {
        (c(-3.0) * f(0) - c(10.0) * f(1) + c(18.0) * f(2) - c(6.0) * f(3) + f(4)) / d
    } else if i == n - 1 {
        -(c(-25.0) * f(n - 1) + c(48.0) * f(n - 2) - c(36.0) * f(n - 3) + c(16.0) * f(n - 4)
            - c(3.0) * f(n - 5))
            / d
    } else {
        -(c(-3.0) * f(n - 1) - c(10.0) * f(n - 2) + c(18.0) * f(n - 3) - c(6.0) * f(n - 4)
            + f(n - 5))
            / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check_gradient(p: &HeightProfile<f64>, x: f64, y: f64) {
        let h = 1e-6;
        let l = p.local(x, y);
        let fx = (p.height(x + h, y) - p.height(x - h, y)) / (2.0 * h);
        let fy = (p.height(x, y + h) - p.height(x, y - h)) / (2.0 * h);
        assert!((l.hx - fx).abs() < 1e-7, "{p:?}: hx {} vs {}", l.hx, fx);
        assert!((l.hy - fy).abs() < 1e-7, "{p:?}: hy {} vs {}", l.hy, fy);
        let hs = p.hessian(x, y);
        let gxx = (p.local(x + h, y).hx - p.local(x - h, y).hx) / (2.0 * h);
        let gxy = (p.local(x, y + h).hx - p.local(x, y - h).hx) / (2.0 * h);
        let gyy = (p.local(x, y + h).hy - p.local(x, y - h).hy) / (2.0 * h);
        assert!((hs[0] - gxx).abs() < 1e-5, "{p:?}: hxx");
        assert!((hs[1] - gxy).abs() < 1e-5, "{p:?}: hxy");
        assert!((hs[2] - gyy).abs() < 1e-5, "{p:?}: hyy");
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let profiles = vec![
            HeightProfile::sphere(2.0, 0.1),
            HeightProfile::sphere_below(1.5, -0.2),
            HeightProfile::Cylinder {
                radius: 1.3,
                axis_angle: 0.7,
                apex: 0.05,
                body: BodySide::Above,
            },
            HeightProfile::hyperboloid(1.0, 1.2, 0.01),
            HeightProfile::Polynomial {
                offset: 0.1,
                terms: vec![
                    Monomial { px: 2, py: 0, coeff: 0.5 },
                    Monomial { px: 1, py: 2, coeff: -0.2 },
                    Monomial { px: 3, py: 1, coeff: 0.05 },
                ],
                radial: vec![RadialTerm { power: 3, coeff: 0.3 }],
            },
            HeightProfile::Fourier {
                offset: 1.0,
                modes: vec![FourierMode {
                    kx: 2.0,
                    ky: -1.0,
                    amplitude: 0.05,
                    phase: 0.3,
                }],
            },
            HeightProfile::Tilted {
                base: Box::new(HeightProfile::sphere(2.0, 0.1)),
                epsilon: 0.03,
            },
            HeightProfile::sphere(2.0, 0.1).shifted(0.2, -0.1),
        ];
        for p in &profiles {
            p.validate().unwrap();
            check_gradient(p, 0.31, -0.17);
        }
    }

    #[test]
    fn tilt_of_flat_profile_is_a_shear() {
        let p = HeightProfile::Tilted {
            base: Box::new(HeightProfile::flat(0.7)),
            epsilon: 0.05,
        };
        let l = p.local(2.0, 3.0);
        assert_relative_eq!(l.h, 0.7 - 0.1, max_relative = 1e-15);
        assert_relative_eq!(l.hx, -0.05, max_relative = 1e-15);
        assert_eq!(l.hy, 0.0);
    }

    #[test]
    fn sphere_patch_and_radii() {
        let s = HeightProfile::sphere(1.0, 0.0);
        assert!(s.contains(0.5, 0.5));
        assert!(!s.contains(0.8, 0.8));
        let (r1, r2) = s.local_radii(0.0, 0.0).unwrap();
        assert_relative_eq!(r1, 1.0, max_relative = 1e-14);
        assert_relative_eq!(r2, 1.0, max_relative = 1e-14);
        let h = HeightProfile::hyperboloid(1.0, 2.0, 0.0);
        assert_relative_eq!(h.local_radii(0.0, 0.0).unwrap().0, 0.25, max_relative = 1e-14);
        assert!(HeightProfile::sphere_below(1.0, 0.0).local_radii(0.0, 0.0).is_err());
    }

    #[test]
    fn grid_gradients_are_fourth_order() {
        let f = |x: f64, y: f64| (x * 1.3).sin() * (0.7 * y).cos();
        let n = 41;
        let h = 0.05;
        let mut vals = Vec::new();
        for iy in 0..n {
            for ix in 0..n {
                vals.push(f(ix as f64 * h, iy as f64 * h));
            }
        }
        let g = GridProfile::new(0.0, 0.0, h, h, n, n, vals).unwrap();
        for (ix, iy) in [(0, 0), (1, 5), (20, 20), (39, 40)] {
            let (gx, gy) = g.node_gradient(ix, iy);
            let (x, y) = (ix as f64 * h, iy as f64 * h);
            assert!((gx - 1.3 * (1.3 * x).cos() * (0.7 * y).cos()).abs() < 2e-5);
            assert!((gy + 0.7 * (1.3 * x).sin() * (0.7 * y).sin()).abs() < 2e-5);
        }
        assert!(GridProfile::new(0.0, 0.0, h, h, 4, 4, vec![0.0; 16]).is_err());
    }

    #[test]
    fn json_descriptor_round_trip() {
        let p: HeightProfile<f64> =
            serde_json::from_str(r#"{"kind":"sphere","radius":1.0,"apex":0.01}"#).unwrap();
        assert_eq!(p, HeightProfile::sphere(1.0, 0.01));
        let s = serde_json::to_string(&HeightProfile::paraboloid(1.0, 2.0, 0.1)).unwrap();
        let back: HeightProfile<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, HeightProfile::paraboloid(1.0, 2.0, 0.1));
    }
}
