//! Hermitian 2x2 matrices over the octonions.
//!
//! A matrix is stored as two real diagonal entries and one octonionic
//! off-diagonal entry (the other is its conjugate). The determinant, its
//! polarization (the mixed determinant), positivity tests and a rank-one
//! basis of the ten-dimensional real space of such matrices live here.

use crate::error::{CoreError, Result};
use crate::octonion::{re_triple, Octonion};

/// Hermitian matrix `[[a11, a12], [conj(a12), a22]]` with `a11, a22` real.
#[derive(Clone, Debug)]
pub struct Hermitian2 {
    pub a11: f64,
    pub a22: f64,
    pub a12: Octonion,
}

/// Number of real coordinates of a `Hermitian2`.
pub const HERM_DIM: usize = 10;

impl Hermitian2 {
    pub fn new(a11: f64, a22: f64, a12: Octonion) -> Self {
        Hermitian2 { a11, a22, a12 }
    }

    pub fn zero() -> Self {
        Hermitian2::new(0.0, 0.0, Octonion::zero())
    }

    pub fn identity() -> Self {
        Hermitian2::new(1.0, 1.0, Octonion::zero())
    }

    pub fn diag(a11: f64, a22: f64) -> Self {
        Hermitian2::new(a11, a22, Octonion::zero())
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12.norm_sq()
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn scale(&self, t: f64) -> Self {
        Hermitian2::new(self.a11 * t, self.a22 * t, self.a12.scale(t))
    }

    pub fn add(&self, other: &Hermitian2) -> Self {
        Hermitian2::new(
            self.a11 + other.a11,
            self.a22 + other.a22,
            self.a12.clone() + other.a12.clone(),
        )
    }

    pub fn sub(&self, other: &Hermitian2) -> Self {
        Hermitian2::new(
            self.a11 - other.a11,
            self.a22 - other.a22,
            self.a12.clone() - other.a12.clone(),
        )
    }

    /// Largest absolute coordinate; a cheap matrix distance.
    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a22.abs()).max(self.a12.max_abs())
    }

    /// Positive semidefiniteness within `tol`, by the diagonal-plus-determinant
    /// test. Both diagonal entries are required: `diag(0, -1)` has vanishing
    /// determinant and a nonnegative (1,1) entry yet is not nonnegative.
    pub fn is_nonneg(&self, tol: f64) -> bool {
        self.a11 >= -tol && self.a22 >= -tol && self.det() >= -tol
    }

    /// Strict positivity (Sylvester); errs with the offending minors.
    pub fn require_positive(&self) -> Result<()> {
        if self.a11 > 0.0 && self.det() > 0.0 {
            Ok(())
        } else {
            Err(CoreError::NotStrictlyPositive {
                a11: self.a11,
                det: self.det(),
            })
        }
    }

    /// Value of the quadratic form `Re(xi^* A xi)` at `xi in O^2`.
    pub fn quadratic_form(&self, xi: &[Octonion; 2]) -> f64 {
        let cross = re_triple(&xi[0].conj(), &self.a12, &xi[1]);
        self.a11 * xi[0].norm_sq() + self.a22 * xi[1].norm_sq() + 2.0 * cross
    }

    /// Flat coordinates `[a11, a22, a12_0, .., a12_7]`.
    pub fn coords(&self) -> [f64; HERM_DIM] {
        let mut v = [0.0; HERM_DIM];
        v[0] = self.a11;
        v[1] = self.a22;
        v[2..].copy_from_slice(&self.a12.c);
        v
    }

    pub fn from_coords(v: &[f64; HERM_DIM]) -> Self {
        let mut c = [0.0; 8];
        c.copy_from_slice(&v[2..]);
        Hermitian2::new(v[0], v[1], Octonion::from_f64s(c))
    }
}

/// Polarization of the determinant: `mixed_det(A, A) = det(A)` and
/// `det(A + B) = det(A) + 2 mixed_det(A, B) + det(B)`.
pub fn mixed_det(a: &Hermitian2, b: &Hermitian2) -> f64 {
    0.5 * (a.a11 * b.a22 + a.a22 * b.a11 - 2.0 * a.a12.dot(&b.a12))
}

/// Rank-one Hermitian matrix `outer(xi)_{jk} = conj(xi_j) xi_k`.
pub fn outer(xi: &[Octonion; 2]) -> Hermitian2 {
    Hermitian2::new(xi[0].norm_sq(), xi[1].norm_sq(), &xi[0].conj() * &xi[1])
}

/// Defect in the determinant form of the Cauchy-Schwarz inequality,
/// `mixed_det(A, B)^2 - det(A) det(B)`; nonnegative whenever `A, B >= 0`.
pub fn cs_gap(a: &Hermitian2, b: &Hermitian2) -> f64 {
    let m = mixed_det(a, b);
    m * m - a.det() * b.det()
}

/// A fixed family of ten rank-one matrices spanning the Hermitian space,
/// with the dual (coefficient-extracting) transform and a pivot-ratio
/// estimate of its conditioning.
#[derive(Clone, Debug)]
pub struct RankOneBasis {
    pub directions: Vec<[Octonion; 2]>,
    pub matrices: Vec<Hermitian2>,
    /// Row `i` gives the functional extracting coefficient `i`:
    /// `c_i = dual[i] . coords(A)`.
    pub dual: [[f64; HERM_DIM]; HERM_DIM],
    /// Ratio of the largest to the smallest Gauss-Jordan pivot.
    pub condition: f64,
}

/// Builds the rank-one basis from `(1, 0)`, `(0, 1)` and `(1, e_p)` for
/// `p = 0..8`.
pub fn rank_one_basis() -> Result<RankOneBasis> {
    let one = Octonion::one;
    let zero = Octonion::zero;
    let mut dirs: Vec<[Octonion; 2]> = vec![[one(), zero()], [zero(), one()]];
    for p in 0..8 {
        dirs.push([one(), Octonion::basis(p)]);
    }
    let mats: Vec<Hermitian2> = dirs.iter().map(outer).collect();

    // Columns are the coordinate vectors of the rank-one matrices; invert to
    // obtain the dual transform.
    let mut m = [[0.0f64; HERM_DIM]; HERM_DIM];
    for (i, h) in mats.iter().enumerate() {
        let col = h.coords();
        for (j, &v) in col.iter().enumerate() {
            m[j][i] = v;
        }
    }
    let (inv, condition) = invert10(&m)?;
    Ok(RankOneBasis {
        directions: dirs,
        matrices: mats,
        dual: inv,
        condition,
    })
}

impl RankOneBasis {
    /// Coefficients `c` with `A = sum_i c_i * matrices[i]`.
    pub fn decompose(&self, a: &Hermitian2) -> [f64; HERM_DIM] {
        let x = a.coords();
        std::array::from_fn(|i| self.dual[i].iter().zip(x.iter()).map(|(d, v)| d * v).sum())
    }

    pub fn reconstruct(&self, c: &[f64; HERM_DIM]) -> Hermitian2 {
        let mut acc = Hermitian2::zero();
        for (ci, m) in c.iter().zip(self.matrices.iter()) {
            acc = acc.add(&m.scale(*ci));
        }
        acc
    }
}

/// Gauss-Jordan inversion with partial pivoting; returns the inverse and the
/// max/min pivot magnitude ratio.
fn invert10(m: &[[f64; HERM_DIM]; HERM_DIM]) -> Result<([[f64; HERM_DIM]; HERM_DIM], f64)> {
    let mut a = *m;
    let mut inv = [[0.0; HERM_DIM]; HERM_DIM];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    for col in 0..HERM_DIM {
        let pivot_row = (col..HERM_DIM)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        let pivot = a[pivot_row][col];
        if pivot.abs() < 1e-12 {
            return Err(CoreError::SingularGram);
        }
        pmax = pmax.max(pivot.abs());
        pmin = pmin.min(pivot.abs());
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let r = 1.0 / pivot;
        for j in 0..HERM_DIM {
            a[col][j] *= r;
            inv[col][j] *= r;
        }
        for row in 0..HERM_DIM {
            if row == col {
                continue;
            }
            let f = a[row][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..HERM_DIM {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    Ok((inv, pmax / pmin))
}
