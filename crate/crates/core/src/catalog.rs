//! The library of closed-form scalar fields on `O^2`.
//!
//! Fields are immutable expression trees evaluated generically over values or
//! jets, so exact derivatives come out of the same code path as values. Each
//! field carries a declared singular set (points excluded from sampling) and
//! a subharmonicity flag for restriction-to-lines positivity; the flag is a
//! claim checked by the sampled-Hessian test suites, not by construction.

use crate::error::{CoreError, Result};
use crate::geometry::{self, AutomorphismParams};
use crate::octonion::{OPoint, OPt};
use crate::real::{Real, DIM};
use std::fmt;

/// Expression node. Variants mirror the constructors below; `Pullback`
/// composes with a ball automorphism and its weight.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    /// Coordinate `x_i` in the flat (slot, unit) ordering.
    Coord(usize),
    /// Squared distance `|x - a|^2`.
    SqDist([f64; DIM]),
    /// Affine form `c . x + b`.
    Linear {
        c: [f64; DIM],
        b: f64,
    },
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Scale(f64, Box<Expr>),
    /// Integer power, negative exponents allowed away from zeros.
    Powi(i32, Box<Expr>),
    Sqrt(Box<Expr>),
    /// Regularized maximum `(f + g + sqrt((f-g)^2 + d^2)) / 2`.
    SmoothMax(f64, Box<Expr>, Box<Expr>),
    /// Exact pointwise maximum; the branch is chosen by a value-only
    /// pre-pass, so jets describe the active branch one-sidedly.
    MaxExact(Box<Expr>, Box<Expr>),
    /// Compactly supported cutoff `(1 - |x-a|^2/r^2)^4` on `|x-a| < r`,
    /// zero outside; three times continuously differentiable.
    Bump {
        a: [f64; DIM],
        r: f64,
    },
    /// Weighted automorphism pullback: with `inverse = false`,
    /// `x -> |Psi_a(x)|^-6 u(T_a(x))`; with `inverse = true`,
    /// `x -> |Psi_a(T_a^-1 x)|^6 u(T_a^-1 x)`.
    Pullback {
        params: AutomorphismParams,
        inverse: bool,
        inner: Box<Expr>,
    },
}

/// A scalar field: expression plus declared metadata.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub expr: Expr,
    /// Claimed subharmonicity along every affine octonionic line.
    pub opsh: bool,
    /// Declared singular points; sampled tests exclude a radius around each.
    pub singular: Vec<OPoint>,
}

/// Exclusion radius around declared singular points for sampled tests.
pub const SINGULAR_EXCLUSION: f64 = 0.05;

impl ScalarField {
    pub fn new(expr: Expr, opsh: bool, singular: Vec<OPoint>) -> Self {
        ScalarField {
            expr,
            opsh,
            singular,
        }
    }

    /// Generic evaluation at flat coordinates.
    pub fn eval<S: Real>(&self, x: &[S; DIM]) -> Result<S> {
        eval_expr(&self.expr, x)
    }

    /// Value at a point.
    pub fn value(&self, p: &OPoint) -> Result<f64> {
        self.eval(&p.coords())
    }

    pub fn eval_pt<S: Real>(&self, p: &OPt<S>) -> Result<S> {
        self.eval(&pt_coords(p))
    }

    /// True if `x` keeps the exclusion distance from every declared
    /// singularity.
    pub fn clear_of_singularities(&self, x: &OPoint, radius: f64) -> bool {
        self.singular.iter().all(|s| x.dist(s) > radius)
    }

    // ----- combinators -----

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        ScalarField::new(
            Expr::Add(Box::new(self.expr.clone()), Box::new(other.expr.clone())),
            self.opsh && other.opsh,
            merge(&self.singular, &other.singular),
        )
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        ScalarField::new(
            Expr::Mul(Box::new(self.expr.clone()), Box::new(other.expr.clone())),
            false,
            merge(&self.singular, &other.singular),
        )
    }

    /// `s * f + c`; scaling by a nonnegative factor preserves the
    /// subharmonicity claim, a negative factor clears it.
    pub fn scale_shift(&self, s: f64, c: f64) -> ScalarField {
        let scaled = Expr::Scale(s, Box::new(self.expr.clone()));
        let expr = if c == 0.0 {
            scaled
        } else {
            Expr::Add(Box::new(scaled), Box::new(Expr::Const(c)))
        };
        ScalarField::new(expr, self.opsh && s >= 0.0, self.singular.clone())
    }
}

fn merge(a: &[OPoint], b: &[OPoint]) -> Vec<OPoint> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

fn pt_coords<S: Real>(p: &OPt<S>) -> [S; DIM] {
    std::array::from_fn(|i| {
        if i < 8 {
            p.x1.c[i].clone()
        } else {
            p.x2.c[i - 8].clone()
        }
    })
}

/// Leaf of a (possibly nested) exact-maximum chain achieving the largest
/// value at `xv`, together with that value. Ties pick the earlier branch.
fn max_chain_winner<'a>(e: &'a Expr, xv: &[f64; DIM]) -> Result<(&'a Expr, f64)> {
    match e {
        Expr::MaxExact(f, g) => match (max_chain_winner(f, xv), max_chain_winner(g, xv)) {
            (Ok((fe, fv)), Ok((ge, gv))) => Ok(if fv >= gv { (fe, fv) } else { (ge, gv) }),
            (Err(_), Ok(w)) | (Ok(w), Err(_)) => Ok(w),
            (Err(e1), Err(_)) => Err(e1),
        },
        other => Ok((other, eval_expr::<f64>(other, xv)?)),
    }
}

fn eval_expr<S: Real>(e: &Expr, x: &[S; DIM]) -> Result<S> {
    match e {
        Expr::Const(c) => Ok(S::from_f64(*c)),
        Expr::Coord(i) => Ok(x[*i].clone()),
        Expr::SqDist(a) => {
            let mut acc = S::zero();
            for i in 0..DIM {
                let d = x[i].clone() - S::from_f64(a[i]);
                acc = acc + d.clone() * d;
            }
            Ok(acc)
        }
        Expr::Linear { c, b } => {
            let mut acc = S::from_f64(*b);
            for i in 0..DIM {
                if c[i] != 0.0 {
                    acc = acc + x[i].scale(c[i]);
                }
            }
            Ok(acc)
        }
        Expr::Add(f, g) => Ok(eval_expr(f, x)? + eval_expr(g, x)?),
        Expr::Mul(f, g) => Ok(eval_expr(f, x)? * eval_expr(g, x)?),
        Expr::Scale(s, f) => Ok(eval_expr(f, x)?.scale(*s)),
        Expr::Powi(n, f) => eval_expr(f, x)?.powi(*n),
        Expr::Sqrt(f) => eval_expr(f, x)?.sqrt(),
        Expr::SmoothMax(d, f, g) => {
            let fv = eval_expr(f, x)?;
            let gv = eval_expr(g, x)?;
            let diff = fv.clone() - gv.clone();
            let root = (diff.clone() * diff + S::from_f64(d * d)).sqrt()?;
            Ok((fv + gv + root).scale(0.5))
        }
        Expr::MaxExact(f, g) => {
            // Value-only pre-pass chooses the branch, so the losing branch is
            // never jet-evaluated (it may be singular where it loses). Nested
            // maxima are flattened so the whole chain costs one pass; a
            // branch that fails to evaluate loses to any branch that
            // succeeds.
            let xv: [f64; DIM] = std::array::from_fn(|i| x[i].value());
            match (max_chain_winner(f, &xv), max_chain_winner(g, &xv)) {
                (Ok((fe, fv)), Ok((ge, gv))) => eval_expr(if fv >= gv { fe } else { ge }, x),
                (Err(_), Ok((ge, _))) => eval_expr(ge, x),
                (Ok((fe, _)), Err(_)) => eval_expr(fe, x),
                (Err(e), Err(_)) => Err(e),
            }
        }
        Expr::Bump { a, r } => {
            let mut d2 = S::zero();
            for i in 0..DIM {
                let d = x[i].clone() - S::from_f64(a[i]);
                d2 = d2 + d.clone() * d;
            }
            let t = S::one() - d2.scale(1.0 / (r * r));
            if t.value() <= 0.0 {
                return Ok(S::zero());
            }
            let t2 = t.clone() * t.clone();
            Ok(t2.clone() * t2)
        }
        Expr::Pullback {
            params,
            inverse,
            inner,
        } => {
            let p = OPt::from_coords(x);
            if *inverse {
                let y = geometry::t_a_inv(params, &p)?;
                let psi = geometry::psi_a(params, &y)?;
                let w = psi.norm_sq().powi(3)?;
                Ok(eval_expr(inner, &pt_coords(&y))? * w)
            } else {
                let psi = geometry::psi_a(params, &p)?;
                let w = psi.norm_sq().powi(-3)?;
                let y = geometry::t_a(params, &p)?;
                Ok(eval_expr(inner, &pt_coords(&y))? * w)
            }
        }
    }
}

// ----- constructors -----

pub fn constant(c: f64) -> ScalarField {
    ScalarField::new(Expr::Const(c), true, vec![])
}

/// Affine field `c . x + b`; harmonic on every line, so subharmonic.
pub fn linear(c: [f64; DIM], b: f64) -> ScalarField {
    ScalarField::new(Expr::Linear { c, b }, true, vec![])
}

/// The coordinate `re(x1)`.
pub fn re_x1() -> ScalarField {
    let mut c = [0.0; DIM];
    c[0] = 1.0;
    linear(c, 0.0)
}

/// `|x|^2`.
pub fn sq_norm() -> ScalarField {
    ScalarField::new(Expr::SqDist([0.0; DIM]), true, vec![])
}

/// `|x - a|^2`.
pub fn sq_dist(a: &OPoint) -> ScalarField {
    ScalarField::new(Expr::SqDist(a.coords()), true, vec![])
}

/// Fundamental field `K(x) = -|x - a|^-6`, singular at `a`.
pub fn fundamental(a: &OPoint) -> ScalarField {
    let inner = Expr::SqDist(a.coords());
    ScalarField::new(
        Expr::Scale(-1.0, Box::new(Expr::Powi(-3, Box::new(inner)))),
        true,
        vec![a.clone()],
    )
}

/// Smoothed fundamental field `K_eps(x) = -(|x - a|^2 + eps)^-3`.
pub fn fundamental_smoothed(a: &OPoint, eps: f64) -> Result<ScalarField> {
    if eps <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "fundamental_smoothed requires eps > 0, got {eps}"
        )));
    }
    let shifted = Expr::Add(
        Box::new(Expr::SqDist(a.coords())),
        Box::new(Expr::Const(eps)),
    );
    Ok(ScalarField::new(
        Expr::Scale(-1.0, Box::new(Expr::Powi(-3, Box::new(shifted)))),
        true,
        vec![],
    ))
}

/// Defining function of the unit ball, `(|x|^2 - 1)/2`; gradient has unit
/// length on the boundary sphere.
pub fn defining_rho() -> ScalarField {
    sq_norm().scale_shift(0.5, -0.5)
}

/// `9 (|x|^2 - 5/9)`; equals 4 on the unit sphere.
pub fn shell_pusher() -> ScalarField {
    sq_norm().scale_shift(9.0, -5.0)
}

/// `2 (|x|^2 - 3/4)`.
pub fn quadratic_pusher() -> ScalarField {
    sq_norm().scale_shift(2.0, -1.5)
}

/// Compactly supported cutoff `(1 - |x-a|^2/r^2)^4` on `|x - a| < r`.
pub fn bump(a: &OPoint, r: f64) -> Result<ScalarField> {
    if r <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "bump requires r > 0, got {r}"
        )));
    }
    Ok(ScalarField::new(
        Expr::Bump { a: a.coords(), r },
        false,
        vec![],
    ))
}

/// Regularized maximum of two fields; preserves the subharmonicity claim
/// (convex and nondecreasing combination) and deviates from the exact
/// maximum by at most `d/2`.
pub fn smooth_max(f: &ScalarField, g: &ScalarField, d: f64) -> Result<ScalarField> {
    if d <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "smooth_max requires d > 0, got {d}"
        )));
    }
    Ok(ScalarField::new(
        Expr::SmoothMax(d, Box::new(f.expr.clone()), Box::new(g.expr.clone())),
        f.opsh && g.opsh,
        merge(&f.singular, &g.singular),
    ))
}

/// Exact pointwise maximum (evaluation-grade; jets describe the active
/// branch).
pub fn max_exact(f: &ScalarField, g: &ScalarField) -> ScalarField {
    ScalarField::new(
        Expr::MaxExact(Box::new(f.expr.clone()), Box::new(g.expr.clone())),
        f.opsh && g.opsh,
        merge(&f.singular, &g.singular),
    )
}

/// Folds a list of fields into one maximum (exact).
pub fn max_of(fields: &[ScalarField]) -> Result<ScalarField> {
    let mut it = fields.iter();
    let first = it
        .next()
        .ok_or_else(|| CoreError::InvalidParameter("max_of needs at least one field".into()))?;
    let mut acc = first.clone();
    for f in it {
        acc = max_exact(&acc, f);
    }
    Ok(acc)
}

/// Relative extremal field of the concentric-ball condenser:
/// `max{ s (R^-6 - |x-a|^-6), -1 }` with `s = 1/(r^-6 - R^-6)`, regularized
/// by `d > 0` (exact maximum when `d = 0`). Value `-1` on the inner ball,
/// `0` on the outer sphere.
pub fn extremal_ball(a: &OPoint, r: f64, big_r: f64, d: f64) -> Result<ScalarField> {
    if !(0.0 < r && r < big_r) {
        return Err(CoreError::InvalidParameter(format!(
            "extremal_ball requires 0 < r < R, got r = {r}, R = {big_r}"
        )));
    }
    let s = 1.0 / (r.powi(-6) - big_r.powi(-6));
    let core = fundamental(a).scale_shift(s, s * big_r.powi(-6));
    let floor = constant(-1.0);
    let mut field = if d == 0.0 {
        max_exact(&core, &floor)
    } else {
        smooth_max(&core, &floor, d)?
    };
    field.opsh = true;
    field.singular = vec![a.clone()];
    Ok(field)
}

/// Boundary barrier at the sphere point `x0`:
/// `phi0 + grad0 . (x - x0) - 2 C (1 - <x, x0>)`. Affine in `x`, hence
/// subharmonic along every line.
pub fn barrier(x0: &OPoint, phi0: f64, grad0: &[f64; DIM], big_c: f64) -> Result<ScalarField> {
    let n = x0.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(CoreError::NotBoundaryParameter(n - 1.0));
    }
    if big_c < 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "barrier requires C >= 0, got {big_c}"
        )));
    }
    let x0c = x0.coords();
    let mut c = [0.0; DIM];
    let mut b = phi0 - 2.0 * big_c;
    for i in 0..DIM {
        c[i] = grad0[i] + 2.0 * big_c * x0c[i];
        b -= grad0[i] * x0c[i];
    }
    Ok(linear(c, b))
}

/// Weighted pullback by the ball automorphism at `a`: composes the field
/// with `T_a` (or `T_a^-1`) and multiplies by the sixth power of the weight
/// modulus. Preserves the subharmonicity claim. Singularities of the inner
/// field move to their preimages.
pub fn weighted_pullback(
    params: &AutomorphismParams,
    u: &ScalarField,
    inverse: bool,
) -> Result<ScalarField> {
    let mut singular = Vec::with_capacity(u.singular.len());
    for s in &u.singular {
        let pre = if inverse {
            geometry::t_a(params, s)?
        } else {
            geometry::t_a_inv(params, s)?
        };
        singular.push(pre);
    }
    Ok(ScalarField::new(
        Expr::Pullback {
            params: params.clone(),
            inverse,
            inner: Box::new(u.expr.clone()),
        },
        u.opsh,
        singular,
    ))
}

// ----- serialization -----

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{v:?}")
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => {
            out.push_str("const ");
            out.push_str(&fmt_f64(*c));
        }
        Expr::Coord(i) => {
            out.push_str(&format!("coord {i}"));
        }
        Expr::SqDist(a) => {
            out.push_str("sqdist");
            for v in a {
                out.push(' ');
                out.push_str(&fmt_f64(*v));
            }
        }
        Expr::Linear { c, b } => {
            out.push_str("linear");
            for v in c {
                out.push(' ');
                out.push_str(&fmt_f64(*v));
            }
            out.push(' ');
            out.push_str(&fmt_f64(*b));
        }
        Expr::Add(f, g) => {
            out.push_str("add ");
            write_expr(f, out);
            out.push(' ');
            write_expr(g, out);
        }
        Expr::Mul(f, g) => {
            out.push_str("mul ");
            write_expr(f, out);
            out.push(' ');
            write_expr(g, out);
        }
        Expr::Scale(s, f) => {
            out.push_str("scale ");
            out.push_str(&fmt_f64(*s));
            out.push(' ');
            write_expr(f, out);
        }
        Expr::Powi(n, f) => {
            out.push_str(&format!("powi {n} "));
            write_expr(f, out);
        }
        Expr::Sqrt(f) => {
            out.push_str("sqrt ");
            write_expr(f, out);
        }
        Expr::SmoothMax(d, f, g) => {
            out.push_str("smax ");
            out.push_str(&fmt_f64(*d));
            out.push(' ');
            write_expr(f, out);
            out.push(' ');
            write_expr(g, out);
        }
        Expr::MaxExact(f, g) => {
            out.push_str("max ");
            write_expr(f, out);
            out.push(' ');
            write_expr(g, out);
        }
        Expr::Bump { a, r } => {
            out.push_str("bump");
            for v in a {
                out.push(' ');
                out.push_str(&fmt_f64(*v));
            }
            out.push(' ');
            out.push_str(&fmt_f64(*r));
        }
        Expr::Pullback {
            params,
            inverse,
            inner,
        } => {
            out.push_str("pull");
            for v in params.a.coords() {
                out.push(' ');
                out.push_str(&fmt_f64(v));
            }
            out.push(' ');
            out.push_str(&fmt_f64(params.margin));
            out.push(' ');
            out.push_str(if *inverse { "1" } else { "0" });
            out.push(' ');
            write_expr(inner, out);
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        s.push_str(if self.opsh { "opsh" } else { "plain" });
        s.push_str(&format!(" sing {}", self.singular.len()));
        for p in &self.singular {
            for v in p.coords() {
                s.push(' ');
                s.push_str(&fmt_f64(v));
            }
        }
        s.push(' ');
        write_expr(&self.expr, &mut s);
        f.write_str(&s)
    }
}

struct Tokens<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let t = self.toks.get(self.pos).ok_or(CoreError::Parse {
            index: self.pos,
            message: "unexpected end of input".to_string(),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn f64(&mut self) -> Result<f64> {
        let pos = self.pos;
        let t = self.next()?;
        t.parse().map_err(|_| CoreError::Parse {
            index: pos,
            message: format!("expected a number, found {t:?}"),
        })
    }

    fn usize(&mut self) -> Result<usize> {
        let pos = self.pos;
        let t = self.next()?;
        t.parse().map_err(|_| CoreError::Parse {
            index: pos,
            message: format!("expected a nonnegative integer, found {t:?}"),
        })
    }

    fn i32(&mut self) -> Result<i32> {
        let pos = self.pos;
        let t = self.next()?;
        t.parse().map_err(|_| CoreError::Parse {
            index: pos,
            message: format!("expected an integer, found {t:?}"),
        })
    }

    fn coords(&mut self) -> Result<[f64; DIM]> {
        let mut a = [0.0; DIM];
        for v in a.iter_mut() {
            *v = self.f64()?;
        }
        Ok(a)
    }
}

fn parse_expr(t: &mut Tokens) -> Result<Expr> {
    let pos = t.pos;
    let head = t.next()?;
    match head {
        "const" => Ok(Expr::Const(t.f64()?)),
        "coord" => {
            let i = t.usize()?;
            if i >= DIM {
                return Err(CoreError::Parse {
                    index: pos + 1,
                    message: format!("coordinate index {i} out of range 0..{DIM}"),
                });
            }
            Ok(Expr::Coord(i))
        }
        "sqdist" => Ok(Expr::SqDist(t.coords()?)),
        "linear" => Ok(Expr::Linear {
            c: t.coords()?,
            b: t.f64()?,
        }),
        "add" => Ok(Expr::Add(
            Box::new(parse_expr(t)?),
            Box::new(parse_expr(t)?),
        )),
        "mul" => Ok(Expr::Mul(
            Box::new(parse_expr(t)?),
            Box::new(parse_expr(t)?),
        )),
        "scale" => Ok(Expr::Scale(t.f64()?, Box::new(parse_expr(t)?))),
        "powi" => Ok(Expr::Powi(t.i32()?, Box::new(parse_expr(t)?))),
        "sqrt" => Ok(Expr::Sqrt(Box::new(parse_expr(t)?))),
        "smax" => Ok(Expr::SmoothMax(
            t.f64()?,
            Box::new(parse_expr(t)?),
            Box::new(parse_expr(t)?),
        )),
        "max" => Ok(Expr::MaxExact(
            Box::new(parse_expr(t)?),
            Box::new(parse_expr(t)?),
        )),
        "bump" => Ok(Expr::Bump {
            a: t.coords()?,
            r: t.f64()?,
        }),
        "pull" => {
            let a = OPoint::from_f64s(&t.coords()?);
            let margin = t.f64()?;
            let inv_tok = t.next()?;
            let inverse = match inv_tok {
                "0" => false,
                "1" => true,
                other => {
                    return Err(CoreError::Parse {
                        index: t.pos - 1,
                        message: format!("expected 0 or 1 for the inverse flag, found {other:?}"),
                    })
                }
            };
            let params = AutomorphismParams::with_margin(a, margin)?;
            Ok(Expr::Pullback {
                params,
                inverse,
                inner: Box::new(parse_expr(t)?),
            })
        }
        other => Err(CoreError::Parse {
            index: pos,
            message: format!("unknown expression head {other:?}"),
        }),
    }
}

/// Parses the textual field format produced by `Display`.
pub fn parse_field(input: &str) -> Result<ScalarField> {
    let mut t = Tokens {
        toks: input.split_whitespace().collect(),
        pos: 0,
    };
    let head = t.next()?;
    let opsh = match head {
        "opsh" => true,
        "plain" => false,
        other => {
            return Err(CoreError::Parse {
                index: 0,
                message: format!("expected header opsh or plain, found {other:?}"),
            })
        }
    };
    let pos = t.pos;
    let sing_kw = t.next()?;
    if sing_kw != "sing" {
        return Err(CoreError::Parse {
            index: pos,
            message: format!("expected keyword sing, found {sing_kw:?}"),
        });
    }
    let k = t.usize()?;
    let mut singular = Vec::with_capacity(k);
    for _ in 0..k {
        singular.push(OPoint::from_f64s(&t.coords()?));
    }
    let expr = parse_expr(&mut t)?;
    if t.pos != t.toks.len() {
        return Err(CoreError::Parse {
            index: t.pos,
            message: "trailing tokens after expression".to_string(),
        });
    }
    Ok(ScalarField::new(expr, opsh, singular))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::Octonion;
    use approx::assert_relative_eq;
    use rand::SeedableRng as _;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn rand_point(rng: &mut ChaCha8Rng, scale: f64) -> OPoint {
        let c: [f64; DIM] = std::array::from_fn(|_| {
            let g: f64 = StandardNormal.sample(rng);
            g * scale
        });
        OPoint::from_f64s(&c)
    }

    fn sphere_point(rng: &mut ChaCha8Rng, r: f64) -> OPoint {
        let p = rand_point(rng, 1.0);
        let n = p.norm();
        OPoint::from_f64s(&p.coords().map(|v| v * r / n))
    }

    #[test]
    fn fundamental_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = rand_point(&mut rng, 0.2);
        let k = fundamental(&a);
        for _ in 0..100 {
            // |x - a| = 1 gives exactly -1.
            let dir = sphere_point(&mut rng, 1.0);
            let x = a.clone() + dir;
            assert_relative_eq!(k.value(&x).unwrap(), -1.0, max_relative = 1e-12);
        }
        assert!(k.value(&a).is_err());
        assert!(k.opsh);
        assert!(!k.clear_of_singularities(&a, SINGULAR_EXCLUSION));

        let keps = fundamental_smoothed(&a, 1.0).unwrap();
        assert_relative_eq!(keps.value(&a).unwrap(), -1.0, max_relative = 1e-12);
        assert!(fundamental_smoothed(&a, 0.0).is_err());
    }

    #[test]
    fn pushers_and_rho_pin_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let x = sphere_point(&mut rng, 1.0);
            assert_relative_eq!(shell_pusher().value(&x).unwrap(), 4.0, epsilon = 1e-12);
            assert_relative_eq!(defining_rho().value(&x).unwrap(), 0.0, epsilon = 1e-13);
            assert_relative_eq!(quadratic_pusher().value(&x).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn extremal_ball_boundary_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = OPoint::origin();
        let (r, big_r) = (0.5, 1.0);
        let u = extremal_ball(&a, r, big_r, 0.0).unwrap();
        let s = 1.0 / (r.powi(-6) - big_r.powi(-6));
        for _ in 0..200 {
            // Inner ball: -1 (excluding the singular center).
            let m: f64 = Uniform::new(0.05f64, r).sample(&mut rng);
            let x = sphere_point(&mut rng, m);
            assert_relative_eq!(u.value(&x).unwrap(), -1.0, epsilon = 1e-12);
            // Outer sphere: 0.
            let x = sphere_point(&mut rng, big_r);
            assert!(u.value(&x).unwrap().abs() < 1e-12);
            // In between: the scaled fundamental branch.
            let m: f64 = Uniform::new(r, big_r).sample(&mut rng);
            let x = sphere_point(&mut rng, m);
            let expect = s * (-m.powi(-6) + big_r.powi(-6));
            assert_relative_eq!(u.value(&x).unwrap(), expect, max_relative = 1e-11);
        }
        assert!(extremal_ball(&a, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn smooth_max_deviation_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let f = sq_norm();
        let g = shell_pusher();
        for &d in &[1e-1, 1e-2, 1e-3] {
            let m = smooth_max(&f, &g, d).unwrap();
            for _ in 0..300 {
                let x = rand_point(&mut rng, 0.7);
                let exact = f.value(&x).unwrap().max(g.value(&x).unwrap());
                let diff = m.value(&x).unwrap() - exact;
                assert!(diff >= -1e-13, "regularized max must dominate");
                assert!(
                    diff <= d / 2.0 + 1e-13,
                    "deviation {diff} above {}",
                    d / 2.0
                );
            }
        }
        // smooth_max(f, f, d) = f + d/2 exactly.
        let m = smooth_max(&f, &f, 0.01).unwrap();
        let x = rand_point(&mut rng, 0.5);
        assert_relative_eq!(
            m.value(&x).unwrap(),
            f.value(&x).unwrap() + 0.005,
            max_relative = 1e-12
        );
        assert!(smooth_max(&f, &g, 0.0).is_err());
    }

    #[test]
    fn barrier_foot_and_sphere_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..200 {
            let x0 = sphere_point(&mut rng, 1.0);
            let phi0: f64 = StandardNormal.sample(&mut rng);
            let grad0: [f64; DIM] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            let c: f64 = Uniform::new(0.0f64, 3.0).sample(&mut rng);
            let v = barrier(&x0, phi0, &grad0, c).unwrap();
            assert!(v.opsh);
            // Value at the foot.
            assert_relative_eq!(
                v.value(&x0).unwrap(),
                phi0,
                max_relative = 1e-10,
                epsilon = 1e-12
            );
            // On the sphere, phi0 + grad0.(x-x0) - v(x) = C |x - x0|^2.
            let x = sphere_point(&mut rng, 1.0);
            let affine = phi0
                + grad0
                    .iter()
                    .zip(x.coords().iter().zip(x0.coords().iter()))
                    .map(|(g, (xi, x0i))| g * (xi - x0i))
                    .sum::<f64>();
            let lhs = affine - v.value(&x).unwrap();
            let rhs = c * x.dist(&x0).powi(2);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-10);
        }
        // C = 0, zero gradient: the constant.
        let x0 = sphere_point(&mut rng, 1.0);
        let v = barrier(&x0, 2.5, &[0.0; DIM], 0.0).unwrap();
        assert_eq!(v.value(&OPoint::origin()).unwrap(), 2.5);
        // Off-sphere foot is rejected.
        assert!(barrier(&OPoint::origin(), 0.0, &[0.0; DIM], 1.0).is_err());
    }

    #[test]
    fn pullback_at_origin_is_a_constant_rescale() {
        // a = 0: T is the identity and the weight is 2, so the pullback is
        // 2^-6 u (and the inverse variant is 2^6 u).
        let params = AutomorphismParams::new(OPoint::origin()).unwrap();
        let u = sq_norm();
        let fwd = weighted_pullback(&params, &u, false).unwrap();
        let bwd = weighted_pullback(&params, &u, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..100 {
            let r: f64 = Uniform::new(0.05f64, 0.85).sample(&mut rng);
            let x = sphere_point(&mut rng, r);
            let base = u.value(&x).unwrap();
            assert_relative_eq!(fwd.value(&x).unwrap(), base / 64.0, max_relative = 1e-12);
            assert_relative_eq!(bwd.value(&x).unwrap(), base * 64.0, max_relative = 1e-12);
        }
        assert!(fwd.opsh);
    }

    #[test]
    fn pullback_inverse_composes_to_identity() {
        let mut c = [0.0; DIM];
        c[0] = 0.3;
        c[11] = -0.25;
        let params = AutomorphismParams::new(OPoint::from_f64s(&c)).unwrap();
        let u = sq_norm();
        let fwd = weighted_pullback(&params, &u, false).unwrap();
        let back = weighted_pullback(&params, &fwd, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..200 {
            let r: f64 = Uniform::new(0.05f64, 0.9).sample(&mut rng);
            let x = sphere_point(&mut rng, r);
            assert_relative_eq!(
                back.value(&x).unwrap(),
                u.value(&x).unwrap(),
                max_relative = 1e-9,
                epsilon = 1e-11
            );
        }
        // Singular preimages move where they should: pulling back the
        // fundamental field centered at T_a^-1(b) is singular at ... = b.
        let b = OPoint::from_f64s(&{
            let mut v = [0.0; DIM];
            v[3] = 0.4;
            v
        });
        let k = fundamental(&b);
        let pk = weighted_pullback(&params, &k, false).unwrap();
        assert_eq!(pk.singular.len(), 1);
        let img = crate::geometry::t_a(&params, &pk.singular[0]).unwrap();
        assert!(img.dist(&b) < 1e-10);
        // At the declared preimage the inner pole is hit up to roundoff, so
        // evaluation either fails or blows up.
        match pk.value(&pk.singular[0]) {
            Err(_) => {}
            Ok(v) => assert!(v.abs() > 1e20, "expected a near-pole blowup, got {v}"),
        }
    }

    #[test]
    fn bump_is_compactly_supported_and_c3() {
        let a = OPoint::origin();
        let b = bump(&a, 0.5).unwrap();
        assert_eq!(
            b.value(&OPoint::from_f64s(&{
                let mut c = [0.0; DIM];
                c[0] = 0.6;
                c
            }))
            .unwrap(),
            0.0
        );
        assert_relative_eq!(b.value(&a).unwrap(), 1.0);
        // Values on the support boundary vanish to third order: check the
        // one-sided difference decay |f(r - h)| = O(h^4).
        let val = |r: f64| {
            let mut c = [0.0; DIM];
            c[5] = r;
            b.value(&OPoint::from_f64s(&c)).unwrap()
        };
        for &h in &[1e-2, 1e-3] {
            let inner = val(0.5 - h);
            assert!(inner > 0.0);
            assert!(inner < 300.0 * h.powi(4) / 0.5f64.powi(4));
        }
        assert!(bump(&a, 0.0).is_err());
    }

    #[test]
    fn serialization_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let a = rand_point(&mut rng, 0.1);
        let mut params_pt = [0.0; DIM];
        params_pt[2] = 0.35;
        let params = AutomorphismParams::new(OPoint::from_f64s(&params_pt)).unwrap();

        let fields: Vec<ScalarField> = vec![
            constant(std::f64::consts::PI),
            re_x1(),
            sq_norm(),
            fundamental(&a),
            fundamental_smoothed(&a, 0.01).unwrap(),
            extremal_ball(&OPoint::origin(), 0.5, 1.0, 0.0).unwrap(),
            extremal_ball(&OPoint::origin(), 0.4, 1.0, 1e-3).unwrap(),
            shell_pusher(),
            bump(&a, 0.3).unwrap(),
            smooth_max(&sq_norm(), &shell_pusher(), 0.05).unwrap(),
            weighted_pullback(&params, &sq_norm(), false).unwrap(),
            weighted_pullback(&params, &fundamental(&a), true).unwrap(),
            sq_norm().mul(&re_x1()),
            ScalarField::new(
                Expr::Sqrt(Box::new(Expr::Add(
                    Box::new(Expr::SqDist([0.1; DIM])),
                    Box::new(Expr::Const(1.0)),
                ))),
                false,
                vec![],
            ),
        ];
        for f in &fields {
            let text = f.to_string();
            let parsed = parse_field(&text).unwrap();
            assert_eq!(parsed.to_string(), text, "round-trip must be stable");
            assert_eq!(parsed.opsh, f.opsh);
            assert_eq!(parsed.singular.len(), f.singular.len());
            // Values agree at random points (where defined).
            for _ in 0..20 {
                let x = rand_point(&mut rng, 0.4);
                match (f.value(&x), parsed.value(&x)) {
                    (Ok(v1), Ok(v2)) => assert_eq!(v1.to_bits(), v2.to_bits()),
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("parse changed domain: {a:?} vs {b:?}"),
                }
            }
        }
        // Parse errors carry positions.
        assert!(matches!(
            parse_field("opsh sing 0 nosuch 1"),
            Err(CoreError::Parse { .. })
        ));
        assert!(parse_field("opsh sing 0 add const 1").is_err());
        assert!(parse_field("opsh sing 0 const 1 const 2").is_err());
    }

    #[test]
    fn jets_propagate_through_composites() {
        use crate::real::Jet2;
        // d/dx of smooth_max and pullback composites agree with finite
        // differences.
        let f = smooth_max(&sq_norm(), &quadratic_pusher(), 0.02).unwrap();
        let mut c0 = [0.0; DIM];
        c0[1] = 0.31;
        c0[9] = -0.44;
        let x0 = c0;
        let seeds = Jet2::seed(&x0);
        let arr: [Jet2; DIM] = seeds.try_into().unwrap();
        let j = f.eval(&arr).unwrap();
        let h = 1e-5;
        for i in [0usize, 1, 9, 15] {
            let mut xp = x0;
            let mut xm = x0;
            xp[i] += h;
            xm[i] -= h;
            let fd = (f.eval(&xp).unwrap() - f.eval(&xm).unwrap()) / (2.0 * h);
            assert_relative_eq!(j.g[i], fd, max_relative = 1e-6, epsilon = 1e-9);
        }
        let _ = Octonion::zero();
    }
}
