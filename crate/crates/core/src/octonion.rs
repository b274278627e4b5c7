//! Octonion algebra over a generic scalar, plus points of `O^2`.
//!
//! The product is driven by a fixed basis table so that value and jet
//! evaluations share one code path. The table is regenerated from the
//! quaternion-pair (Cayley-Dickson) product in a test, so the frozen
//! constants cannot drift from the defining construction.

use crate::real::{Real, DIM};
use std::ops::{Add, Mul, Neg, Sub};

/// `BASIS_TABLE[p][q] = (r, s)` means `e_p * e_q = s * e_r`.
///
/// Basis: `e_0..e_3` are the quaternions `1, i, j, k` in the first slot of a
/// Cayley-Dickson pair, `e_4..e_7` are `1, i, j, k` in the second slot.
const BASIS_TABLE: [[(usize, f64); 8]; 8] = [
    [
        (0, 1.0),
        (1, 1.0),
        (2, 1.0),
        (3, 1.0),
        (4, 1.0),
        (5, 1.0),
        (6, 1.0),
        (7, 1.0),
    ],
    [
        (1, 1.0),
        (0, -1.0),
        (3, 1.0),
        (2, -1.0),
        (5, 1.0),
        (4, -1.0),
        (7, -1.0),
        (6, 1.0),
    ],
    [
        (2, 1.0),
        (3, -1.0),
        (0, -1.0),
        (1, 1.0),
        (6, 1.0),
        (7, 1.0),
        (4, -1.0),
        (5, -1.0),
    ],
    [
        (3, 1.0),
        (2, 1.0),
        (1, -1.0),
        (0, -1.0),
        (7, 1.0),
        (6, -1.0),
        (5, 1.0),
        (4, -1.0),
    ],
    [
        (4, 1.0),
        (5, -1.0),
        (6, -1.0),
        (7, -1.0),
        (0, -1.0),
        (1, 1.0),
        (2, 1.0),
        (3, 1.0),
    ],
    [
        (5, 1.0),
        (4, 1.0),
        (7, -1.0),
        (6, 1.0),
        (1, -1.0),
        (0, -1.0),
        (3, -1.0),
        (2, 1.0),
    ],
    [
        (6, 1.0),
        (7, 1.0),
        (4, 1.0),
        (5, -1.0),
        (2, -1.0),
        (3, 1.0),
        (0, -1.0),
        (1, -1.0),
    ],
    [
        (7, 1.0),
        (6, -1.0),
        (5, 1.0),
        (4, 1.0),
        (3, -1.0),
        (2, -1.0),
        (1, 1.0),
        (0, -1.0),
    ],
];

/// `e_p e_q = s e_r`, returned as `(r, s)`.
pub fn basis_mul(p: usize, q: usize) -> (usize, f64) {
    BASIS_TABLE[p][q]
}

/// `e_p conj(e_q) = s e_r`, returned as `(r, s)`.
pub fn basis_mul_conj(p: usize, q: usize) -> (usize, f64) {
    let (r, s) = BASIS_TABLE[p][q];
    if q == 0 {
        (r, s)
    } else {
        (r, -s)
    }
}

/// Octonion with coefficients in a scalar type `S` (values or jets).
#[derive(Clone, Debug)]
pub struct Oct<S: Real> {
    pub c: [S; 8],
}

/// Plain numeric octonion.
pub type Octonion = Oct<f64>;

impl<S: Real> Oct<S> {
    pub fn zero() -> Self {
        Oct {
            c: std::array::from_fn(|_| S::zero()),
        }
    }

    pub fn one() -> Self {
        Self::real(S::one())
    }

    pub fn real(r: S) -> Self {
        let mut o = Self::zero();
        o.c[0] = r;
        o
    }

    pub fn basis(p: usize) -> Self {
        let mut o = Self::zero();
        o.c[p] = S::one();
        o
    }

    pub fn from_coeffs(c: [S; 8]) -> Self {
        Oct { c }
    }

    /// Real part.
    pub fn re(&self) -> S {
        self.c[0].clone()
    }

    pub fn conj(&self) -> Self {
        let mut o = self.clone();
        for p in 1..8 {
            o.c[p] = -o.c[p].clone();
        }
        o
    }

    /// Squared Euclidean norm `|a|^2 = a * conj(a)`.
    pub fn norm_sq(&self) -> S {
        let mut s = self.c[0].clone() * self.c[0].clone();
        for p in 1..8 {
            s = s + self.c[p].clone() * self.c[p].clone();
        }
        s
    }

    /// Euclidean inner product of coefficient vectors, `Re(a * conj(b))`.
    pub fn dot(&self, other: &Self) -> S {
        let mut s = self.c[0].clone() * other.c[0].clone();
        for p in 1..8 {
            s = s + self.c[p].clone() * other.c[p].clone();
        }
        s
    }

    pub fn scale(&self, t: f64) -> Self {
        let mut o = self.clone();
        for p in 0..8 {
            o.c[p] = o.c[p].scale(t);
        }
        o
    }

    pub fn scale_s(&self, t: &S) -> Self {
        let mut o = self.clone();
        for p in 0..8 {
            o.c[p] = o.c[p].clone() * t.clone();
        }
        o
    }

    /// Inverse `conj(a) / |a|^2`; errs when `|a|^2` vanishes.
    pub fn inv(&self) -> crate::error::Result<Self> {
        let n = self.norm_sq().recip()?;
        Ok(self.conj().scale_s(&n))
    }

    pub fn value(&self) -> Octonion {
        Octonion {
            c: std::array::from_fn(|p| self.c[p].value()),
        }
    }

    /// Lifts a numeric octonion into constant coefficients of type `S`.
    pub fn lift(o: &Octonion) -> Self {
        Oct {
            c: std::array::from_fn(|p| S::from_f64(o.c[p])),
        }
    }

    /// Imaginary part, `a - re(a)`.
    pub fn im(&self) -> Self {
        let mut o = self.clone();
        o.c[0] = S::zero();
        o
    }
}

impl Octonion {
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn from_f64s(c: [f64; 8]) -> Self {
        Oct { c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl<S: Real> Add for Oct<S> {
    type Output = Oct<S>;
    fn add(mut self, rhs: Oct<S>) -> Oct<S> {
        for p in 0..8 {
            self.c[p] = self.c[p].clone() + rhs.c[p].clone();
        }
        self
    }
}

impl<S: Real> Sub for Oct<S> {
    type Output = Oct<S>;
    fn sub(mut self, rhs: Oct<S>) -> Oct<S> {
        for p in 0..8 {
            self.c[p] = self.c[p].clone() - rhs.c[p].clone();
        }
        self
    }
}

impl<S: Real> Neg for Oct<S> {
    type Output = Oct<S>;
    fn neg(mut self) -> Oct<S> {
        for p in 0..8 {
            self.c[p] = -self.c[p].clone();
        }
        self
    }
}

impl<S: Real> Mul for Oct<S> {
    type Output = Oct<S>;
    fn mul(self, rhs: Oct<S>) -> Oct<S> {
        &self * &rhs
    }
}

impl<S: Real> Mul for &Oct<S> {
    type Output = Oct<S>;
    // Indices are basis labels shared with BASIS_TABLE; iterator forms would
    // hide the table walk.
    #[allow(clippy::needless_range_loop)]
    fn mul(self, rhs: &Oct<S>) -> Oct<S> {
        let mut acc: [Option<S>; 8] = std::array::from_fn(|_| None);
        for p in 0..8 {
            for q in 0..8 {
                let (r, s) = BASIS_TABLE[p][q];
                let term = (self.c[p].clone() * rhs.c[q].clone()).scale(s);
                acc[r] = Some(match acc[r].take() {
                    Some(v) => v + term,
                    None => term,
                });
            }
        }
        Oct {
            c: acc.map(|v| v.unwrap()),
        }
    }
}

/// Real part of the triple product `a(bc)`; cyclic in its arguments.
pub fn re_triple<S: Real>(a: &Oct<S>, b: &Oct<S>, c: &Oct<S>) -> S {
    (a * &(b * c)).re()
}

/// Point of `O^2` with scalar coordinates of type `S`.
#[derive(Clone, Debug)]
pub struct OPt<S: Real> {
    pub x1: Oct<S>,
    pub x2: Oct<S>,
}

/// Plain numeric point of `O^2`.
pub type OPoint = OPt<f64>;

impl<S: Real> OPt<S> {
    pub fn new(x1: Oct<S>, x2: Oct<S>) -> Self {
        OPt { x1, x2 }
    }

    pub fn slot(&self, alpha: usize) -> &Oct<S> {
        match alpha {
            0 => &self.x1,
            1 => &self.x2,
            _ => panic!("slot index must be 0 or 1"),
        }
    }

    pub fn norm_sq(&self) -> S {
        self.x1.norm_sq() + self.x2.norm_sq()
    }

    pub fn value(&self) -> OPoint {
        OPoint {
            x1: self.x1.value(),
            x2: self.x2.value(),
        }
    }

    /// Lifts a numeric point into constant coordinates of type `S`.
    pub fn lift(p: &OPoint) -> Self {
        OPt {
            x1: Oct::lift(&p.x1),
            x2: Oct::lift(&p.x2),
        }
    }

    /// Flat coordinate layout: slot `alpha`, unit `p` maps to `8 * alpha + p`.
    pub fn from_coords(x: &[S; DIM]) -> Self {
        OPt {
            x1: Oct {
                c: std::array::from_fn(|p| x[p].clone()),
            },
            x2: Oct {
                c: std::array::from_fn(|p| x[8 + p].clone()),
            },
        }
    }
}

impl OPoint {
    pub fn origin() -> Self {
        OPt {
            x1: Octonion::zero(),
            x2: Octonion::zero(),
        }
    }

    pub fn from_f64s(x: &[f64; DIM]) -> Self {
        Self::from_coords(x)
    }

    pub fn coords(&self) -> [f64; DIM] {
        std::array::from_fn(|i| {
            if i < 8 {
                self.x1.c[i]
            } else {
                self.x2.c[i - 8]
            }
        })
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &OPoint) -> f64 {
        (self.clone() - other.clone()).norm()
    }
}

impl Add for OPoint {
    type Output = OPoint;
    fn add(self, rhs: OPoint) -> OPoint {
        OPoint {
            x1: self.x1 + rhs.x1,
            x2: self.x2 + rhs.x2,
        }
    }
}

impl Sub for OPoint {
    type Output = OPoint;
    fn sub(self, rhs: OPoint) -> OPoint {
        OPoint {
            x1: self.x1 - rhs.x1,
            x2: self.x2 - rhs.x2,
        }
    }
}
