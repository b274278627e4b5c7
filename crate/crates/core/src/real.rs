//! Forward-mode jet arithmetic over the sixteen real coordinates of `O^2`.
//!
//! Scalar fields are evaluated generically over a [`Real`] scalar. The three
//! implementations are plain `f64` (values), [`Jet2`] (value, gradient and
//! symmetric Hessian) and [`Jet3`] (additionally the full symmetric tensor of
//! third partials). Propagating jets instead of differentiating expression
//! trees keeps every composite construction (products, inverses, square
//! roots, Moebius-type changes of variable) exactly differentiable.

use crate::error::{CoreError, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Number of real coordinates of a point in `O^2`.
pub const DIM: usize = 16;

/// Scalar abstraction shared by values and jets.
///
/// `ORDER` is the number of derivatives carried (0, 2 or 3). Branching
/// constructs consult `value()` only, so a branch decision is identical for
/// every order evaluated at the same point.
pub trait Real:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    const ORDER: usize;

    fn from_f64(c: f64) -> Self;
    fn value(&self) -> f64;
    /// Multiplication by a plain constant.
    fn scale(&self, c: f64) -> Self;
    /// Composition with a scalar function given its first three derivatives
    /// at `self.value()`. Orders beyond `ORDER` are ignored.
    fn compose(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Multiplicative inverse; errs on (numerically) zero values.
    fn recip(&self) -> Result<Self> {
        let v = self.value();
        if v == 0.0 || !v.is_finite() {
            return Err(CoreError::SingularPoint(format!(
                "reciprocal of {v} is undefined"
            )));
        }
        let r = 1.0 / v;
        Ok(self.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r))
    }

    /// Principal square root; requires a strictly positive value.
    fn sqrt(&self) -> Result<Self> {
        let v = self.value();
        if v <= 0.0 {
            return Err(CoreError::SingularPoint(format!(
                "square root of {v} is undefined"
            )));
        }
        let s = v.sqrt();
        Ok(self.compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)))
    }

    /// Integer power, negative exponents included (then `self` must be
    /// invertible).
    fn powi(&self, n: i32) -> Result<Self> {
        let v = self.value();
        if n < 0 && v == 0.0 {
            return Err(CoreError::SingularPoint(
                "negative power of zero".to_string(),
            ));
        }
        let e = n as f64;
        let f0 = v.powi(n);
        let f1 = e * v.powi(n - 1);
        let f2 = e * (e - 1.0) * v.powi(n - 2);
        let f3 = e * (e - 1.0) * (e - 2.0) * v.powi(n - 3);
        Ok(self.compose(f0, f1, f2, f3))
    }
}

impl Real for f64 {
    const ORDER: usize = 0;

    fn from_f64(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn compose(&self, f0: f64, _f1: f64, _f2: f64, _f3: f64) -> Self {
        f0
    }
}

/// Second-order jet: value, gradient and symmetric Hessian.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; DIM],
    /// Full symmetric matrix; entries (i, j) and (j, i) are bitwise equal.
    pub h: Box<[[f64; DIM]; DIM]>,
}

impl Jet2 {
    pub fn constant(c: f64) -> Self {
        Jet2 {
            v: c,
            g: [0.0; DIM],
            h: Box::new([[0.0; DIM]; DIM]),
        }
    }

    /// Coordinate jet for variable `i` seeded at value `x`.
    pub fn variable(i: usize, x: f64) -> Self {
        let mut j = Self::constant(x);
        j.g[i] = 1.0;
        j
    }

    /// Seeds for all sixteen coordinates at the given point.
    pub fn seed(x: &[f64; DIM]) -> Vec<Jet2> {
        (0..DIM).map(|i| Jet2::variable(i, x[i])).collect()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.v += rhs.v;
        for i in 0..DIM {
            self.g[i] += rhs.g[i];
            for j in i..DIM {
                let s = self.h[i][j] + rhs.h[i][j];
                self.h[i][j] = s;
                self.h[j][i] = s;
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.v -= rhs.v;
        for i in 0..DIM {
            self.g[i] -= rhs.g[i];
            for j in i..DIM {
                let s = self.h[i][j] - rhs.h[i][j];
                self.h[i][j] = s;
                self.h[j][i] = s;
            }
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.v = -self.v;
        for i in 0..DIM {
            self.g[i] = -self.g[i];
            for j in 0..DIM {
                self.h[i][j] = -self.h[i][j];
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.v * rhs.v);
        for i in 0..DIM {
            out.g[i] = self.g[i] * rhs.v + self.v * rhs.g[i];
        }
        // Leibniz rule; (i, j) and (j, i) are written from one computation so
        // the stored matrix is exactly symmetric.
        for i in 0..DIM {
            for j in i..DIM {
                let s = self.h[i][j] * rhs.v
                    + rhs.h[i][j] * self.v
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i];
                out.h[i][j] = s;
                out.h[j][i] = s;
            }
        }
        out
    }
}

impl Real for Jet2 {
    const ORDER: usize = 2;

    fn from_f64(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> f64 {
        self.v
    }

    fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v *= c;
        for i in 0..DIM {
            out.g[i] *= c;
            for j in 0..DIM {
                out.h[i][j] *= c;
            }
        }
        out
    }

    fn compose(&self, f0: f64, f1: f64, f2: f64, _f3: f64) -> Self {
        let mut out = Jet2::constant(f0);
        for i in 0..DIM {
            out.g[i] = f1 * self.g[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let s = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
                out.h[i][j] = s;
                out.h[j][i] = s;
            }
        }
        out
    }
}

pub type Tensor3 = Box<[[[f64; DIM]; DIM]; DIM]>;

fn zero_tensor3() -> Tensor3 {
    // Avoids a 32 KiB stack temporary.
    let v = vec![[[0.0; DIM]; DIM]; DIM];
    v.into_boxed_slice().try_into().unwrap()
}

/// Third-order jet: value, gradient, Hessian and symmetric third-derivative
/// tensor. Used for closedness checks of octonionic Hessians.
#[derive(Clone, Debug)]
pub struct Jet3 {
    pub v: f64,
    pub g: [f64; DIM],
    pub h: Box<[[f64; DIM]; DIM]>,
    pub t: Tensor3,
}

impl Jet3 {
    pub fn constant(c: f64) -> Self {
        Jet3 {
            v: c,
            g: [0.0; DIM],
            h: Box::new([[0.0; DIM]; DIM]),
            t: zero_tensor3(),
        }
    }

    pub fn variable(i: usize, x: f64) -> Self {
        let mut j = Self::constant(x);
        j.g[i] = 1.0;
        j
    }

    pub fn seed(x: &[f64; DIM]) -> Vec<Jet3> {
        (0..DIM).map(|i| Jet3::variable(i, x[i])).collect()
    }

    /// Writes `value` into all six permutations of (i, j, k).
    fn set_sym(t: &mut Tensor3, i: usize, j: usize, k: usize, value: f64) {
        t[i][j][k] = value;
        t[i][k][j] = value;
        t[j][i][k] = value;
        t[j][k][i] = value;
        t[k][i][j] = value;
        t[k][j][i] = value;
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(mut self, rhs: Jet3) -> Jet3 {
        self.v += rhs.v;
        for i in 0..DIM {
            self.g[i] += rhs.g[i];
            for j in 0..DIM {
                self.h[i][j] += rhs.h[i][j];
                for k in 0..DIM {
                    self.t[i][j][k] += rhs.t[i][j][k];
                }
            }
        }
        self
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(mut self, rhs: Jet3) -> Jet3 {
        self.v -= rhs.v;
        for i in 0..DIM {
            self.g[i] -= rhs.g[i];
            for j in 0..DIM {
                self.h[i][j] -= rhs.h[i][j];
                for k in 0..DIM {
                    self.t[i][j][k] -= rhs.t[i][j][k];
                }
            }
        }
        self
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(mut self) -> Jet3 {
        self.v = -self.v;
        for i in 0..DIM {
            self.g[i] = -self.g[i];
            for j in 0..DIM {
                self.h[i][j] = -self.h[i][j];
                for k in 0..DIM {
                    self.t[i][j][k] = -self.t[i][j][k];
                }
            }
        }
        self
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        let mut out = Jet3::constant(self.v * rhs.v);
        for i in 0..DIM {
            out.g[i] = self.g[i] * rhs.v + self.v * rhs.g[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let s = self.h[i][j] * rhs.v
                    + rhs.h[i][j] * self.v
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i];
                out.h[i][j] = s;
                out.h[j][i] = s;
            }
        }
        for i in 0..DIM {
            for j in i..DIM {
                for k in j..DIM {
                    let s = self.t[i][j][k] * rhs.v
                        + rhs.t[i][j][k] * self.v
                        + self.h[i][j] * rhs.g[k]
                        + self.h[i][k] * rhs.g[j]
                        + self.h[j][k] * rhs.g[i]
                        + rhs.h[i][j] * self.g[k]
                        + rhs.h[i][k] * self.g[j]
                        + rhs.h[j][k] * self.g[i];
                    Jet3::set_sym(&mut out.t, i, j, k, s);
                }
            }
        }
        out
    }
}

impl Real for Jet3 {
    const ORDER: usize = 3;

    fn from_f64(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn value(&self) -> f64 {
        self.v
    }

    fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v *= c;
        for i in 0..DIM {
            out.g[i] *= c;
            for j in 0..DIM {
                out.h[i][j] *= c;
                for k in 0..DIM {
                    out.t[i][j][k] *= c;
                }
            }
        }
        out
    }

    fn compose(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let mut out = Jet3::constant(f0);
        for i in 0..DIM {
            out.g[i] = f1 * self.g[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let s = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
                out.h[i][j] = s;
                out.h[j][i] = s;
            }
        }
        // Faa di Bruno to third order.
        for i in 0..DIM {
            for j in i..DIM {
                for k in j..DIM {
                    let s = f1 * self.t[i][j][k]
                        + f2 * (self.h[i][j] * self.g[k]
                            + self.h[i][k] * self.g[j]
                            + self.h[j][k] * self.g[i])
                        + f3 * self.g[i] * self.g[j] * self.g[k];
                    Jet3::set_sym(&mut out.t, i, j, k, s);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly<S: Real>(x: &[S; DIM]) -> S {
        // f = x0^2 * x5 + 3 x1 x9 x9 - x0 + 2, rich enough to exercise all
        // product and composition paths to third order.
        let a = x[0].clone() * x[0].clone() * x[5].clone();
        let b = (x[1].clone() * x[9].clone() * x[9].clone()).scale(3.0);
        a + b - x[0].clone() + S::from_f64(2.0)
    }

    fn rational<S: Real>(x: &[S; DIM]) -> Result<S> {
        // g = 1 / sqrt(1 + x0^2 + x3^2) + (x2 + 2)^-2
        let q = S::one() + x[0].clone() * x[0].clone() + x[3].clone() * x[3].clone();
        let r = (x[2].clone() + S::from_f64(2.0)).powi(-2)?;
        Ok(q.sqrt()?.recip()? + r)
    }

    fn point() -> [f64; DIM] {
        let mut x = [0.0; DIM];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = 0.1 + 0.03 * i as f64 * if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        x
    }

    fn eval_f64(x: &[f64; DIM]) -> f64 {
        let arr: [f64; DIM] = *x;
        poly(&arr) + rational(&arr).unwrap()
    }

    fn jet2_at(x: &[f64; DIM]) -> Jet2 {
        let seeds = Jet2::seed(x);
        let arr: [Jet2; DIM] = seeds.try_into().unwrap();
        poly(&arr) + rational(&arr).unwrap()
    }

    fn jet3_at(x: &[f64; DIM]) -> Jet3 {
        let seeds = Jet3::seed(x);
        let arr: [Jet3; DIM] = seeds.try_into().unwrap();
        poly(&arr) + rational(&arr).unwrap()
    }

    #[test]
    fn jet2_matches_central_differences() {
        let x = point();
        let j = jet2_at(&x);
        assert_relative_eq!(j.v, eval_f64(&x), max_relative = 1e-14);

        let h = 1e-4;
        for i in 0..DIM {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (eval_f64(&xp) - eval_f64(&xm)) / (2.0 * h);
            assert_relative_eq!(j.g[i], fd, max_relative = 1e-6, epsilon = 1e-9);
        }
        for i in 0..DIM {
            for k in i..DIM {
                let fd = if i == k {
                    let mut xp = x;
                    let mut xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    (eval_f64(&xp) - 2.0 * eval_f64(&x) + eval_f64(&xm)) / (h * h)
                } else {
                    let (mut a, mut b, mut c, mut d) = (x, x, x, x);
                    a[i] += h;
                    a[k] += h;
                    b[i] += h;
                    b[k] -= h;
                    c[i] -= h;
                    c[k] += h;
                    d[i] -= h;
                    d[k] -= h;
                    (eval_f64(&a) - eval_f64(&b) - eval_f64(&c) + eval_f64(&d)) / (4.0 * h * h)
                };
                assert_relative_eq!(j.h[i][k], fd, max_relative = 1e-5, epsilon = 1e-7);
                assert_eq!(j.h[i][k].to_bits(), j.h[k][i].to_bits());
            }
        }
    }

    #[test]
    fn jet3_matches_differenced_jet2() {
        let x = point();
        let j3 = jet3_at(&x);
        let j2 = jet2_at(&x);
        assert_relative_eq!(j3.v, j2.v, max_relative = 1e-14);
        for i in 0..DIM {
            assert_relative_eq!(j3.g[i], j2.g[i], max_relative = 1e-13, epsilon = 1e-15);
            for k in 0..DIM {
                assert_relative_eq!(
                    j3.h[i][k],
                    j2.h[i][k],
                    max_relative = 1e-13,
                    epsilon = 1e-15
                );
            }
        }
        // Third derivatives against central differences of Jet2 Hessians.
        let h = 1e-4;
        for k in [0usize, 1, 2, 3, 5, 9] {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let hp = jet2_at(&xp);
            let hm = jet2_at(&xm);
            for i in 0..DIM {
                for j in 0..DIM {
                    let fd = (hp.h[i][j] - hm.h[i][j]) / (2.0 * h);
                    assert_relative_eq!(j3.t[i][j][k], fd, max_relative = 1e-5, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn domain_errors_are_reported() {
        assert!(Jet2::constant(0.0).recip().is_err());
        assert!(Jet2::constant(-1.0).sqrt().is_err());
        assert!(Jet2::constant(0.0).powi(-3).is_err());
    }
}
