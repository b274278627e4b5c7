//! The octonionic Siegel domain, its Heisenberg boundary group, the Cayley
//! transform, and the Moebius-type automorphisms of the unit ball of `O^2`.
//!
//! Every map is evaluated over a generic [`Real`] scalar so that jets flow
//! through compositions unchanged. Octonion multiplication is not
//! associative, so the bracketing of each formula below is semantic; the
//! chosen trees are spelled out where they matter.

use crate::error::{CoreError, Result};
use crate::octonion::{OPoint, OPt, Oct, Octonion};
use crate::real::Real;

/// Width of the collar `|1 + x2| < PSI_COLLAR` around the Cayley pole.
///
/// Inside the collar the weight is evaluated through its polynomial-plus-
/// remainder expansion, and jet (derivative) evaluation is refused: the
/// remainder is only Hoelder-1/2 there, so derivatives are meaningless
/// numerically.
pub const PSI_COLLAR: f64 = 0.1;

/// Default interiority margin for automorphism base points: `|a| <= 1 - 0.05`.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Tolerance on the Siegel defect when a point must lie on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Point of the octonionic Heisenberg group `O + Im(O)`.
#[derive(Clone, Debug)]
pub struct HeisPoint {
    pub x: Octonion,
    pub t: Octonion,
}

impl HeisPoint {
    /// Requires `t` purely imaginary; the real part is checked, then zeroed
    /// exactly so products stay exactly imaginary.
    pub fn new(x: Octonion, t: Octonion) -> Result<Self> {
        if t.c[0].abs() > 1e-12 {
            return Err(CoreError::RealHeisenbergPart(t.c[0]));
        }
        let mut t = t;
        t.c[0] = 0.0;
        Ok(HeisPoint { x, t })
    }

    pub fn identity() -> Self {
        HeisPoint {
            x: Octonion::zero(),
            t: Octonion::zero(),
        }
    }

    pub fn inv(&self) -> Self {
        HeisPoint {
            x: -self.x.clone(),
            t: -self.t.clone(),
        }
    }
}

/// Group law `(x, t)(x', t') = (x + x', t + t' + 2 Im(conj(x) x'))`.
///
/// The twist is bilinear in the two factors, which makes the product exactly
/// associative despite living over the octonions.
pub fn heis_mul(p: &HeisPoint, q: &HeisPoint) -> HeisPoint {
    let twist = (&p.x.conj() * &q.x).im().scale(2.0);
    HeisPoint {
        x: p.x.clone() + q.x.clone(),
        t: p.t.clone() + q.t.clone() + twist,
    }
}

/// Point of the Siegel domain model; interior means positive defect.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    pub y1: Octonion,
    pub y2: Octonion,
}

impl SiegelPoint {
    pub fn new(y1: Octonion, y2: Octonion) -> Self {
        SiegelPoint { y1, y2 }
    }

    pub fn from_opoint(p: &OPoint) -> Self {
        SiegelPoint {
            y1: p.x1.clone(),
            y2: p.x2.clone(),
        }
    }

    pub fn to_opoint(&self) -> OPoint {
        OPt {
            x1: self.y1.clone(),
            x2: self.y2.clone(),
        }
    }

    /// Defect `2 re(y2) - |y1|^2`: positive inside, zero on the boundary.
    pub fn defect(&self) -> f64 {
        2.0 * self.y2.re() - self.y1.norm_sq()
    }

    pub fn is_interior(&self) -> bool {
        self.defect() > 0.0
    }

    pub fn is_boundary(&self, tol: f64) -> bool {
        self.defect().abs() <= tol
    }
}

fn inv_or_pole<S: Real>(b: &Oct<S>, what: &str) -> Result<Oct<S>> {
    if b.norm_sq().value() < 1e-30 {
        return Err(CoreError::SingularPoint(format!("{what}: pole at x2 = -1")));
    }
    b.inv()
}

/// Cayley transform between the unit ball and the Siegel domain:
/// `x -> (sqrt(2) * (x1 * (1+x2)^-1), (1-x2) * (1+x2)^-1)`.
///
/// Both fractions are right-divisions: the inverse factor multiplies on the
/// right, inside the parentheses shown. The map is an involution, so it is
/// its own inverse.
pub fn cayley<S: Real>(x: &OPt<S>) -> Result<OPt<S>> {
    let one = Oct::<S>::one();
    let b = one.clone() + x.x2.clone();
    let binv = inv_or_pole(&b, "cayley")?;
    let y1 = (&x.x1 * &binv).scale(std::f64::consts::SQRT_2);
    let y2 = &(one - x.x2.clone()) * &binv;
    Ok(OPt { x1: y1, x2: y2 })
}

/// Inverse Cayley transform; the same rational map (involution).
pub fn cayley_inv<S: Real>(y: &OPt<S>) -> Result<OPt<S>> {
    cayley(y)
}

/// Siegel translation by a boundary point:
/// `tau_zeta(y) = (y1 + zeta1, y2 + zeta2 + conj(zeta1) * y1)`.
///
/// Preserves the defect exactly. The parameter must lie on the boundary.
pub fn tau<S: Real>(zeta: &SiegelPoint, y: &OPt<S>) -> Result<OPt<S>> {
    let d = zeta.defect();
    if d.abs() > BOUNDARY_TOL {
        return Err(CoreError::NotBoundaryParameter(d));
    }
    let z1 = Oct::<S>::lift(&zeta.y1);
    let z2 = Oct::<S>::lift(&zeta.y2);
    let cross = &z1.conj() * &y.x1;
    Ok(OPt {
        x1: y.x1.clone() + z1,
        x2: y.x2.clone() + z2 + cross,
    })
}

/// Inverse translation parameter: `(-zeta1, conj(zeta2))` is again a
/// boundary point and undoes `tau(zeta, .)`.
pub fn tau_inv_param(zeta: &SiegelPoint) -> SiegelPoint {
    SiegelPoint {
        y1: -zeta.y1.clone(),
        y2: zeta.y2.conj(),
    }
}

/// Parabolic dilation `(y1, y2) -> (delta * y1, delta^2 * y2)`; scales the
/// defect by `delta^2`.
pub fn dilate<S: Real>(delta: f64, y: &OPt<S>) -> Result<OPt<S>> {
    if delta <= 0.0 || delta.is_nan() {
        return Err(CoreError::NonPositiveDilation(delta));
    }
    Ok(OPt {
        x1: y.x1.scale(delta),
        x2: y.x2.scale(delta * delta),
    })
}

/// Data of the ball automorphism centered at `a`: the dilation weight
/// `delta_a = |1+a2| / sqrt(1-|a|^2)` and the boundary translation
/// parameter `zeta_a`.
#[derive(Clone, Debug)]
pub struct AutomorphismParams {
    pub a: OPoint,
    pub delta: f64,
    pub zeta: SiegelPoint,
    pub margin: f64,
}

impl AutomorphismParams {
    pub fn new(a: OPoint) -> Result<Self> {
        Self::with_margin(a, DEFAULT_MARGIN)
    }

    pub fn with_margin(a: OPoint, margin: f64) -> Result<Self> {
        let norm = a.norm();
        if norm > 1.0 - margin {
            return Err(CoreError::BasePointMargin { norm, margin });
        }
        let one_minus = 1.0 - a.norm_sq();
        let b = Octonion::one() + a.x2.clone();
        let nb2 = b.norm_sq();
        let delta = nb2.sqrt() / one_minus.sqrt();

        // zeta1 = -sqrt(2) * (a1 * (1+a2)^-1); zeta2 has real part
        // |a1|^2/|1+a2|^2 and imaginary part 2 Im(a2)/|1+a2|^2, which puts
        // zeta exactly on the Siegel boundary.
        let binv = b.inv()?;
        let zeta1 = (&a.x1 * &binv).scale(-std::f64::consts::SQRT_2);
        let mut zeta2 = a.x2.im().scale(2.0 / nb2);
        zeta2.c[0] = a.x1.norm_sq() / nb2;
        let zeta = SiegelPoint::new(zeta1, zeta2);
        debug_assert!(zeta.is_boundary(1e-12));
        Ok(AutomorphismParams {
            a,
            delta,
            zeta,
            margin,
        })
    }
}

fn check_in_closed_ball(norm_sq: f64) -> Result<()> {
    if norm_sq > 1.0 + 1e-6 {
        Err(CoreError::OutsideBall(norm_sq.sqrt()))
    } else {
        Ok(())
    }
}

/// In-collar guard: jets have no meaning near the Cayley pole.
fn check_jets_outside_collar<S: Real>(nb2: f64) -> Result<()> {
    if S::ORDER > 0 && nb2 < PSI_COLLAR * PSI_COLLAR {
        Err(CoreError::JetInCollar { collar: PSI_COLLAR })
    } else {
        Ok(())
    }
}

/// The ball automorphism `T_a = C^-1 . D_{delta_a} . tau_{zeta_a} . C`,
/// which swaps `a` and the origin's roles: `T_a(a) = 0`.
///
/// Outside the pole collar the composition above is evaluated literally.
/// Inside the collar (values only) the Moebius form based on the expanded
/// weight is used, so boundary points with `x2` near `-1` stay evaluable;
/// the pole `(0, -1)` itself is a fixed point.
pub fn t_a<S: Real>(p: &AutomorphismParams, x: &OPt<S>) -> Result<OPt<S>> {
    check_in_closed_ball(x.norm_sq().value())?;
    let one = Oct::<S>::one();
    let b = one + x.x2.clone();
    let nb2 = b.norm_sq().value();
    check_jets_outside_collar::<S>(nb2)?;

    if nb2 >= PSI_COLLAR * PSI_COLLAR {
        let y = cayley(x)?;
        let y = tau(&p.zeta, &y)?;
        let y = dilate(p.delta, &y)?;
        return cayley_inv(&y);
    }

    // Collar values: Moebius form through the expanded weight.
    //   [T_a]_2 = -1 + 2 ((1+x2) * Psi^-1)
    //   [T_a]_1 = sqrt(2) delta (sqrt(2) (x1 (1+x2)^-1) + zeta1) * ((1+x2) Psi^-1)
    // where `(1+x2) * Psi^-1` is the inverse of the prefactor G, finite up to
    // the pole itself.
    let psi = psi_a(p, x)?;
    if nb2 == 0.0 {
        // Exactly at the pole; within the closed ball this forces x1 = 0 and
        // the point is fixed.
        if x.x1.norm_sq().value() > 1e-16 {
            return Err(CoreError::SingularPoint(
                "t_a: x2 = -1 with x1 != 0 is outside the closed ball".to_string(),
            ));
        }
        return Ok(OPt {
            x1: Oct::zero(),
            x2: -Oct::one(),
        });
    }
    let psi_inv = psi.inv()?;
    let ginv = &b * &psi_inv;
    let t2 = ginv.scale(2.0) - Oct::one();
    let w = &x.x1 * &b.inv()?;
    let lhs = w.scale(std::f64::consts::SQRT_2) + Oct::lift(&p.zeta.y1);
    let t1 = (&lhs * &ginv).scale(std::f64::consts::SQRT_2 * p.delta);
    Ok(OPt { x1: t1, x2: t2 })
}

/// Inverse automorphism `T_a^-1 = C^-1 . tau_{zeta^-1} . D_{1/delta} . C`.
pub fn t_a_inv<S: Real>(p: &AutomorphismParams, x: &OPt<S>) -> Result<OPt<S>> {
    check_in_closed_ball(x.norm_sq().value())?;
    let one = Oct::<S>::one();
    let b = one + x.x2.clone();
    let nb2 = b.norm_sq().value();
    check_jets_outside_collar::<S>(nb2)?;
    if nb2 == 0.0 {
        if x.x1.norm_sq().value() > 1e-16 {
            return Err(CoreError::SingularPoint(
                "t_a_inv: x2 = -1 with x1 != 0 is outside the closed ball".to_string(),
            ));
        }
        return Ok(OPt {
            x1: Oct::zero(),
            x2: -Oct::one(),
        });
    }
    // The composition stays relatively accurate arbitrarily close to the
    // pole: every intermediate magnitude is controlled by norm
    // multiplicativity, so no cancellation occurs even for huge Siegel
    // coordinates.
    let y = cayley(x)?;
    let y = dilate(1.0 / p.delta, &y)?;
    let y = tau(&tau_inv_param(&p.zeta), &y)?;
    cayley_inv(&y)
}

/// The prefactor `G_a(x) = 1 + delta^2 [ (1-x2)(1+x2)^-1 + zeta2
/// + zeta1-bar (sqrt(2) x1 (1+x2)^-1) ]`.
///
/// Brackets: both fractions are right-divisions by `(1+x2)`; the last term
/// left-multiplies that fraction by `conj(zeta1)` after scaling by sqrt(2).
/// Its real part is at least 1 on the closed ball.
pub fn g_a<S: Real>(p: &AutomorphismParams, x: &OPt<S>) -> Result<Oct<S>> {
    let one = Oct::<S>::one();
    let b = one.clone() + x.x2.clone();
    let nb2 = b.norm_sq().value();
    check_jets_outside_collar::<S>(nb2)?;
    let binv = inv_or_pole(&b, "g_a")?;
    let first = &(one - x.x2.clone()) * &binv;
    let w = (&x.x1 * &binv).scale(std::f64::consts::SQRT_2);
    let cross = &Oct::lift(&p.zeta.y1).conj() * &w;
    let inner = first + Oct::lift(&p.zeta.y2) + cross;
    Ok(Oct::one() + inner.scale(p.delta * p.delta))
}

/// The automorphy weight `Psi_a(x) = G_a(x) * (1 + x2)`.
///
/// Away from the pole collar this product is evaluated literally. Inside the
/// collar the expanded form
/// `(1+delta^2) + (1-delta^2) x2 + delta^2 zeta2 (1+x2) + R` is used, with
/// remainder `R = sqrt(2) delta^2 (conj(zeta1) (x1 (1+x2)^-1)) (1+x2)`;
/// `R` is set to zero exactly at the pole, its limit along the closed ball.
pub fn psi_a<S: Real>(p: &AutomorphismParams, x: &OPt<S>) -> Result<Oct<S>> {
    let one = Oct::<S>::one();
    let b = one.clone() + x.x2.clone();
    let nb2 = b.norm_sq().value();
    if nb2 >= PSI_COLLAR * PSI_COLLAR {
        let g = g_a(p, x)?;
        return Ok(&g * &b);
    }
    check_jets_outside_collar::<S>(nb2)?;
    let d2 = p.delta * p.delta;
    let z2b = &Oct::lift(&p.zeta.y2) * &b;
    let mut psi = Oct::real(S::from_f64(1.0 + d2)) + x.x2.scale(1.0 - d2) + z2b.scale(d2);
    if nb2 > 0.0 {
        let w = &x.x1 * &b.inv()?;
        let r = &(&Oct::lift(&p.zeta.y1).conj() * &w) * &b;
        psi = psi + r.scale(std::f64::consts::SQRT_2 * d2);
    }
    Ok(psi)
}

/// Second-difference data for envelope regularity: the weight ratio
/// `J(h, x) = |Psi_{x+h}(x+h) / Psi_x(x)|^6` and the composed point
/// `L(a, h, x) = T_{a+h}^-1(T_a(x))`.
pub fn second_diff_weight(a: &OPoint, h: &OPoint, x: &OPoint) -> Result<(f64, OPoint)> {
    let px = AutomorphismParams::new(x.clone())?;
    let pxh = AutomorphismParams::new(x.clone() + h.clone())?;
    let xh = x.clone() + h.clone();
    let num = psi_a(&pxh, &xh)?.norm();
    let den = psi_a(&px, x)?.norm();
    if den == 0.0 {
        return Err(CoreError::SingularPoint(
            "second_diff_weight: vanishing weight".to_string(),
        ));
    }
    let j = (num / den).powi(6);

    let pa = AutomorphismParams::new(a.clone())?;
    let pah = AutomorphismParams::new(a.clone() + h.clone())?;
    let l = t_a_inv(&pah, &t_a(&pa, x)?)?;
    Ok((j, l))
}
