//! Jet drivers over catalog fields, and the octonionic derivative packages
//! (gradient column, Hessian, rank-one map, closedness residual) assembled
//! from flat jets.
//!
//! Derivatives are exact (forward-mode propagation through the field
//! expression); finite differences appear only as an independent oracle in
//! tests.

use crate::catalog::ScalarField;
use crate::error::Result;
use crate::hermitian::Hermitian2;
use crate::octonion::{basis_mul, basis_mul_conj, OPoint, Octonion};
use crate::real::{Jet2, Jet3, DIM};

/// Octonionic gradient column: `g[alpha] = sum_p e_p du/dx_(alpha p)`.
#[derive(Clone, Debug)]
pub struct OctGradient {
    pub g: [Octonion; 2],
}

impl OctGradient {
    pub fn from_flat(g: &[f64; DIM]) -> Self {
        OctGradient {
            g: [
                Octonion::from_f64s(std::array::from_fn(|p| g[p])),
                Octonion::from_f64s(std::array::from_fn(|p| g[8 + p])),
            ],
        }
    }

    pub fn zero() -> Self {
        OctGradient {
            g: [Octonion::zero(), Octonion::zero()],
        }
    }
}

/// Second-order jet of a field at a point.
pub fn jet2(f: &ScalarField, x: &OPoint) -> Result<Jet2> {
    let seeds: [Jet2; DIM] = Jet2::seed(&x.coords())
        .try_into()
        .expect("seed yields DIM jets");
    f.eval(&seeds)
}

/// Third-order jet of a field at a point.
pub fn jet3(f: &ScalarField, x: &OPoint) -> Result<Jet3> {
    let seeds: [Jet3; DIM] = Jet3::seed(&x.coords())
        .try_into()
        .expect("seed yields DIM jets");
    f.eval(&seeds)
}

pub fn oct_gradient(f: &ScalarField, x: &OPoint) -> Result<OctGradient> {
    Ok(OctGradient::from_flat(&jet2(f, x)?.g))
}

/// Octonionic Hessian from a flat jet: entry `(alpha-bar, beta)` contracts
/// `e_p conj(e_q)` against the corresponding 8x8 block of the real Hessian.
/// Diagonal entries are exactly the slot Laplacians (the contraction's
/// imaginary parts cancel in pairs).
pub fn hessian_from(j: &Jet2) -> Hermitian2 {
    let mut a11 = 0.0;
    let mut a22 = 0.0;
    for p in 0..8 {
        a11 += j.h[p][p];
        a22 += j.h[8 + p][8 + p];
    }
    let mut c = [0.0f64; 8];
    for p in 0..8 {
        for q in 0..8 {
            let (r, s) = basis_mul_conj(p, q);
            c[r] += s * j.h[p][8 + q];
        }
    }
    Hermitian2::new(a11, a22, Octonion::from_f64s(c))
}

pub fn oct_hessian(f: &ScalarField, x: &OPoint) -> Result<Hermitian2> {
    Ok(hessian_from(&jet2(f, x)?))
}

/// Symmetrized rank-one map of two gradient columns: entry `(alpha, beta)`
/// is `(g_alpha(u) conj(g_beta(v)) + g_alpha(v) conj(g_beta(u))) / 2`.
/// Symmetric in its arguments; for `du = dv` it is the elementary rank-one
/// matrix of the conjugated column.
pub fn t_outer(du: &OctGradient, dv: &OctGradient) -> Hermitian2 {
    let a11 = du.g[0].dot(&dv.g[0]);
    let a22 = du.g[1].dot(&dv.g[1]);
    let a12 = (&du.g[0] * &dv.g[1].conj() + &dv.g[0] * &du.g[1].conj()).scale(0.5);
    Hermitian2::new(a11, a22, a12)
}

/// First-order compatibility defect of the Hessian field of `f` at `x`.
///
/// For each ordered pair `alpha != beta`, the off-diagonal entry
/// right-differentiated in slot `beta` must equal the left Dirac derivative
/// (slot `alpha`) of the real diagonal entry `beta`; the residual is the
/// larger of the two octonion-norm differences. Exact for quadratics; pure
/// roundoff (at third-derivative scale) for any three-times differentiable
/// field.
pub fn closedness_from(j: &Jet3) -> f64 {
    let mut worst = 0.0f64;
    for (alpha, beta) in [(0usize, 1usize), (1, 0)] {
        let a0 = 8 * alpha;
        let b0 = 8 * beta;
        let mut lhs = [0.0f64; 8];
        for p in 0..8 {
            for q1 in 0..8 {
                let (r1, s1) = basis_mul_conj(p, q1);
                for q in 0..8 {
                    let (r2, s2) = basis_mul(r1, q);
                    lhs[r2] += s1 * s2 * j.t[a0 + p][b0 + q1][b0 + q];
                }
            }
        }
        let mut rhs = [0.0f64; 8];
        for (p, slot) in rhs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for q in 0..8 {
                acc += j.t[b0 + q][b0 + q][a0 + p];
            }
            *slot = acc;
        }
        let mut n2 = 0.0f64;
        for r in 0..8 {
            let d = lhs[r] - rhs[r];
            n2 += d * d;
        }
        worst = worst.max(n2.sqrt());
    }
    worst
}

pub fn closedness_residual(f: &ScalarField, x: &OPoint) -> Result<f64> {
    Ok(closedness_from(&jet3(f, x)?))
}
