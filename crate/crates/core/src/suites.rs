//! Named verification suites: each runs a batch of identity and statistics
//! checks over seeded random inputs and reports one [`CheckLine`] per gate.

use std::collections::BTreeMap;

use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::catalog::{self, ScalarField};
use crate::error::{CoreError, Result};
use crate::geometry::{self, AutomorphismParams, HeisPoint, SiegelPoint};
use crate::hermitian::{self, mixed_det, outer, rank_one_basis, Hermitian2};
use crate::jets;
use crate::octonion::{OPoint, Octonion};
use crate::operators::{
    capacity_ball, comparison_check, ibp_residual, ibp_suite, lelong, ma_density, opsh_check,
    t_eps, CondenserSpec, IbpMode, SmoothingMethod,
};
use crate::perron::{self, BoundaryData};
use crate::quadrature::{self, MIN_SAMPLES};
use crate::real::DIM;
use crate::report::CheckLine;

pub const SUITE_NAMES: [&str; 9] = [
    "algebra",
    "hermitian",
    "jets",
    "geometry",
    "ibp",
    "comparison",
    "lelong",
    "capacity",
    "perron",
];

/// Effort and tolerance knobs shared by every suite. `samples` scales each
/// suite's internal sample counts from its documented defaults; named gates
/// override the built-in tolerances.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub seed: u64,
    pub samples: usize,
    pub gates: BTreeMap<String, f64>,
}

impl SuiteParams {
    pub fn new(seed: u64, samples: usize) -> Self {
        SuiteParams {
            seed,
            samples: samples.max(MIN_SAMPLES),
            gates: BTreeMap::new(),
        }
    }

    fn gate(&self, key: &str, default: f64) -> f64 {
        self.gates.get(key).copied().unwrap_or(default)
    }
}

/// Runs one suite by name; `all` concatenates every suite in declaration
/// order. Unknown names are parameter errors (usage, not failure).
pub fn run_suite(name: &str, p: &SuiteParams) -> Result<Vec<CheckLine>> {
    match name {
        "algebra" => algebra(p),
        "hermitian" => hermitian_suite(p),
        "jets" => jets_suite(p),
        "geometry" => geometry_suite(p),
        "ibp" => ibp(p),
        "comparison" => comparison(p),
        "lelong" => lelong_suite(p),
        "capacity" => capacity(p),
        "perron" => perron_suite(p),
        "all" => {
            let mut out = Vec::new();
            for s in SUITE_NAMES {
                out.extend(run_suite(s, p)?);
            }
            Ok(out)
        }
        other => Err(CoreError::InvalidParameter(format!(
            "unknown suite `{other}`; expected one of {} or all",
            SUITE_NAMES.join(", ")
        ))),
    }
}

// ----- sampling helpers -----

fn rand_oct(rng: &mut ChaCha8Rng) -> Octonion {
    Octonion::from_coeffs(std::array::from_fn(|_| StandardNormal.sample(rng)))
}

fn rand_im_oct(rng: &mut ChaCha8Rng) -> Octonion {
    let mut c: [f64; 8] = std::array::from_fn(|_| StandardNormal.sample(rng));
    c[0] = 0.0;
    Octonion::from_coeffs(c)
}

fn sphere_pt(rng: &mut ChaCha8Rng, r: f64) -> OPoint {
    let mut c = [0.0f64; DIM];
    let mut n2 = 0.0;
    for v in c.iter_mut() {
        *v = StandardNormal.sample(rng);
        n2 += *v * *v;
    }
    let s = r / n2.sqrt().max(1e-300);
    OPoint::from_f64s(&c.map(|v| v * s))
}

/// Volume-uniform point in the shell `lo <= |x| <= hi`.
fn shell_pt(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> OPoint {
    let u: f64 = rand::Rng::gen(rng);
    let r = (lo.powi(DIM as i32) + u * (hi.powi(DIM as i32) - lo.powi(DIM as i32)))
        .powf(1.0 / DIM as f64);
    sphere_pt(rng, r)
}

fn ball_pt(rng: &mut ChaCha8Rng, r: f64) -> OPoint {
    shell_pt(rng, 0.0, r)
}

fn rel(defect: f64, scale: f64) -> f64 {
    defect / scale.max(1e-300)
}

// ----- algebra -----

/// Composition-algebra identities on seeded random triples.
pub fn algebra(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let n = p.samples;
    let gate = p.gate("algebra.identity", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0xa15eb);
    let mut norm_mult = 0.0f64;
    let mut alt_left = 0.0f64;
    let mut alt_right = 0.0f64;
    let mut re_assoc = 0.0f64;
    let mut conj_antihom = 0.0f64;
    for _ in 0..n {
        let a = rand_oct(&mut rng);
        let b = rand_oct(&mut rng);
        let c = rand_oct(&mut rng);
        let (na, nb) = (a.norm_sq().sqrt(), b.norm_sq().sqrt());
        let ab = &a * &b;
        norm_mult = norm_mult.max(rel((ab.norm_sq().sqrt() - na * nb).abs(), na * nb));
        let s2 = na * na * nb;
        alt_left = alt_left.max(rel(((&a * &ab) - (&(&a * &a) * &b)).norm(), s2));
        let s2 = na * nb * nb;
        alt_right = alt_right.max(rel(((&ab * &b) - (&a * &(&b * &b))).norm(), s2));
        let s3 = na * nb * c.norm_sq().sqrt();
        re_assoc = re_assoc.max(rel(((&ab * &c).re() - (&a * &(&b * &c)).re()).abs(), s3));
        conj_antihom = conj_antihom.max(rel((ab.conj() - (&b.conj() * &a.conj())).norm(), na * nb));
    }
    let inputs = format!("triples={n};seed={}", p.seed);
    Ok(vec![
        CheckLine::abs("algebra/norm_mult", inputs.as_str(), norm_mult, gate),
        CheckLine::abs("algebra/alt_left", inputs.as_str(), alt_left, gate),
        CheckLine::abs("algebra/alt_right", inputs.as_str(), alt_right, gate),
        CheckLine::abs("algebra/re_assoc", inputs.as_str(), re_assoc, gate),
        CheckLine::abs("algebra/conj_antihom", inputs.as_str(), conj_antihom, gate),
    ])
}

// ----- hermitian -----

fn rand_herm(rng: &mut ChaCha8Rng) -> Hermitian2 {
    Hermitian2::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        rand_oct(rng),
    )
}

/// Maximum compatibility residual of `Hess f` over `points` admissible
/// samples in the shell `[lo, hi]`; points whose third-derivative scale
/// cannot resolve the gate in f64 are skipped, as are declared
/// singularities.
fn closedness_line(
    name: &str,
    f: &ScalarField,
    lo: f64,
    hi: f64,
    points: usize,
    gate: f64,
    seed: u64,
) -> Result<CheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc70_5ed);
    let mut checked = 0;
    let mut attempts = 0;
    let mut worst = 0.0f64;
    while checked < points {
        attempts += 1;
        if attempts > 200 * points {
            return Err(CoreError::Contract(format!(
                "closedness of {name}: too few admissible sample points"
            )));
        }
        let x = shell_pt(&mut rng, lo, hi);
        if !f.clear_of_singularities(&x, catalog::SINGULAR_EXCLUSION) {
            continue;
        }
        let j = match jets::jet3(f, &x) {
            Ok(j) => j,
            Err(_) => continue,
        };
        let mut tmax = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    tmax = tmax.max(j.t[a][b][c].abs());
                }
            }
        }
        if tmax * 1e-13 > 0.1 * gate {
            continue;
        }
        worst = worst.max(jets::closedness_from(&j));
        checked += 1;
    }
    let inputs = format!(
        "points={points};shell=[{lo},{hi}];skipped={}",
        attempts - checked
    );
    Ok(CheckLine::abs(
        format!("hermitian/closedness/{name}"),
        inputs,
        worst,
        gate,
    ))
}

/// Determinant identities, positivity of rank-one pairings, and the
/// closedness certificate across the twice-differentiable catalog.
pub fn hermitian_suite(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let n = p.samples;
    let gate = p.gate("hermitian.identity", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x4e24);
    let mut mixed_diag = 0.0f64;
    let mut polarization = 0.0f64;
    let mut outer_det = 0.0f64;
    let mut pairing_floor = f64::INFINITY;
    let mut cs_floor = f64::INFINITY;
    let mut basis_roundtrip = 0.0f64;
    let basis = rank_one_basis()?;
    for _ in 0..n {
        let a = rand_herm(&mut rng);
        let b = rand_herm(&mut rng);
        let scale = a.max_abs().max(b.max_abs()).powi(2);
        mixed_diag = mixed_diag.max(rel((mixed_det(&a, &a) - a.det()).abs(), scale));
        let pol = 0.25 * (a.add(&b).det() - a.sub(&b).det());
        polarization = polarization.max(rel((mixed_det(&a, &b) - pol).abs(), scale));

        let xi = [rand_oct(&mut rng), rand_oct(&mut rng)];
        let eta = [rand_oct(&mut rng), rand_oct(&mut rng)];
        let (oa, ob) = (outer(&xi), outer(&eta));
        let s2 = oa.max_abs() * ob.max_abs();
        outer_det = outer_det.max(rel(oa.det().abs(), oa.max_abs().powi(2)));
        pairing_floor = pairing_floor.min(rel(mixed_det(&oa, &ob), s2));
        cs_floor = cs_floor.min(rel(hermitian::cs_gap(&oa, &ob), s2 * s2));

        let c = basis.decompose(&a);
        basis_roundtrip =
            basis_roundtrip.max(rel(basis.reconstruct(&c).sub(&a).max_abs(), a.max_abs()));
    }
    let inputs = format!("draws={n};seed={}", p.seed);
    let mut out = vec![
        CheckLine::abs(
            "hermitian/mixed_det_diagonal",
            inputs.as_str(),
            mixed_diag,
            gate,
        ),
        CheckLine::abs(
            "hermitian/polarization",
            inputs.as_str(),
            polarization,
            gate,
        ),
        CheckLine::abs("hermitian/outer_det_zero", inputs.as_str(), outer_det, gate),
        CheckLine::floor(
            "hermitian/rank_one_pairing",
            inputs.as_str(),
            pairing_floor,
            gate,
        ),
        CheckLine::floor(
            "hermitian/cauchy_schwarz_gap",
            inputs.as_str(),
            cs_floor,
            gate,
        ),
        CheckLine::abs(
            "hermitian/basis_roundtrip",
            inputs.as_str(),
            basis_roundtrip,
            1e-10,
        ),
    ];

    let cgate = p.gate("hermitian.closedness", 1e-8);
    let shift = {
        let mut c = [0.0; DIM];
        c[0] = 0.2;
        c[9] = -0.1;
        OPoint::from_f64s(&c)
    };
    let e0 = {
        let mut c = [0.0; DIM];
        c[0] = 1.0;
        OPoint::from_f64s(&c)
    };
    let mut grad0 = [0.0; DIM];
    grad0[0] = 1.0;
    let pull_params = AutomorphismParams::new(shift.clone())?;
    let c3: Vec<(&str, ScalarField, f64, f64)> = vec![
        ("constant", catalog::constant(2.5), 0.0, 0.95),
        ("linear", catalog::re_x1(), 0.0, 0.95),
        ("sq_norm", catalog::sq_norm(), 0.0, 0.95),
        ("sq_dist", catalog::sq_dist(&shift), 0.0, 0.95),
        ("defining_rho", catalog::defining_rho(), 0.0, 0.95),
        ("shell_pusher", catalog::shell_pusher(), 0.0, 0.95),
        ("quadratic_pusher", catalog::quadratic_pusher(), 0.0, 0.95),
        (
            "fundamental",
            catalog::fundamental(&OPoint::origin()),
            0.35,
            0.95,
        ),
        (
            "fundamental_smoothed",
            catalog::fundamental_smoothed(&OPoint::origin(), 0.3)?,
            0.0,
            0.95,
        ),
        ("bump", catalog::bump(&OPoint::origin(), 0.85)?, 0.0, 0.6),
        (
            "smooth_max",
            catalog::smooth_max(&catalog::sq_norm(), &catalog::re_x1(), 0.5)?,
            0.0,
            0.95,
        ),
        (
            "barrier",
            catalog::barrier(&e0, 1.0, &grad0, 1.0)?,
            0.0,
            0.95,
        ),
        (
            "pullback",
            catalog::weighted_pullback(&pull_params, &catalog::sq_norm(), false)?,
            0.0,
            0.9,
        ),
    ];
    for (name, f, lo, hi) in &c3 {
        out.push(closedness_line(name, f, *lo, *hi, 100, cgate, p.seed)?);
    }
    Ok(out)
}

// ----- jets -----

/// Jet exactness on quadratics and the closed-form Monge-Ampère densities
/// of the smoothed and exact fundamental fields.
pub fn jets_suite(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let pts = (p.samples / 200).clamp(500, 2000);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x1e75);
    let sq = catalog::sq_norm();

    let mut hess_defect = 0.0f64;
    for _ in 0..100 {
        let x = ball_pt(&mut rng, 1.2);
        let h = jets::oct_hessian(&sq, &x)?;
        hess_defect = hess_defect
            .max((h.a11 - 16.0).abs())
            .max((h.a22 - 16.0).abs())
            .max(h.a12.norm());
    }

    let shift = {
        let mut c = [0.0; DIM];
        c[3] = 0.4;
        c[12] = -0.25;
        OPoint::from_f64s(&c)
    };
    let sqd = catalog::sq_dist(&shift);
    let mut quad_defect = 0.0f64;
    for _ in 0..100 {
        let x = ball_pt(&mut rng, 1.2);
        let j = jets::jet2(&sqd, &x)?;
        quad_defect = quad_defect.max(rel((j.v - x.dist(&shift).powi(2)).abs(), 1.0));
        let (xc, sc) = (x.coords(), shift.coords());
        for i in 0..DIM {
            quad_defect = quad_defect.max((j.g[i] - 2.0 * (xc[i] - sc[i])).abs());
            for k in 0..DIM {
                let truth = if i == k { 2.0 } else { 0.0 };
                quad_defect = quad_defect.max((j.h[i][k] - truth).abs());
            }
        }
    }

    // det Hess K_eps = 2304 eps / (|x|^2 + eps)^9, exactly.
    let ma_gate = p.gate("jets.ma_rel", 1e-8);
    let mut lines = Vec::new();
    for eps in [1.0, 0.25] {
        let keps = catalog::fundamental_smoothed(&OPoint::origin(), eps)?;
        let mut worst = 0.0f64;
        for _ in 0..pts {
            let x = ball_pt(&mut rng, 1.5);
            let t = x.norm().powi(2) + eps;
            let truth = 2304.0 * eps / t.powi(9);
            worst = worst.max(rel((ma_density(&keps, &x)? - truth).abs(), truth));
        }
        lines.push(CheckLine::abs(
            format!("jets/ma_keps_closed_form_eps{eps}"),
            format!("points={pts};seed={}", p.seed),
            worst,
            ma_gate,
        ));
    }

    // The exact fundamental field is degenerate off the pole: det = 0
    // relative to the scale of the determinant's own terms.
    let k = catalog::fundamental(&OPoint::origin());
    let mut worst = 0.0f64;
    for _ in 0..pts {
        let x = shell_pt(&mut rng, 0.1, 3.0);
        let h = jets::oct_hessian(&k, &x)?;
        let scale = (h.a11 * h.a22).abs() + h.a12.norm_sq();
        worst = worst.max(h.det().abs() / scale.max(1.0));
    }
    lines.push(CheckLine::abs(
        "jets/ma_k_vanishes_off_pole",
        format!("points={pts};shell=[0.1,3];seed={}", p.seed),
        worst,
        ma_gate,
    ));

    // Ball-average smoothing: exact value 32 on |x|^2, and nonnegative on
    // subharmonic samples (the mean-value inequality).
    let mut teps_defect = 0.0f64;
    let mut teps_floor = f64::INFINITY;
    let keps = catalog::fundamental_smoothed(&OPoint::origin(), 0.5)?;
    for i in 0..20 {
        let x = ball_pt(&mut rng, 0.8);
        let eps = [0.05, 0.1][i % 2];
        let (v, _) = t_eps(&sq, &x, eps, SmoothingMethod::Cubature, p.seed)?;
        teps_defect = teps_defect.max((v - 32.0).abs());
        let (v, _) = t_eps(&keps, &x, eps, SmoothingMethod::Cubature, p.seed)?;
        teps_floor = teps_floor.min(v);
    }

    let inputs = format!("points=100;seed={}", p.seed);
    let mut out = vec![
        CheckLine::abs(
            "jets/hess_sq_norm_identity",
            inputs.as_str(),
            hess_defect,
            1e-10,
        ),
        CheckLine::abs(
            "jets/quadratic_jet_exact",
            inputs.as_str(),
            quad_defect,
            1e-9,
        ),
    ];
    out.extend(lines);
    out.push(CheckLine::abs(
        "jets/t_eps_quadratic",
        "points=20;eps=[0.05,0.1]",
        teps_defect,
        1e-9,
    ));
    out.push(CheckLine::floor(
        "jets/t_eps_subharmonic",
        "points=20;eps=[0.05,0.1]",
        teps_floor,
        1e-10,
    ));
    Ok(out)
}

// ----- geometry -----

/// Automorphism and Cayley identities, Heisenberg associativity, and
/// subharmonicity of the weighted pullbacks across shifted centers.
pub fn geometry_suite(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let n = (p.samples / 20).clamp(1_000, 20_000);
    let gate = p.gate("geometry.identity", 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x6e0);

    let mut t_a_zero = 0.0f64;
    let mut roundtrip = 0.0f64;
    let mut boundary_norm = 0.0f64;
    let mut re_g_floor = f64::INFINITY;
    for _ in 0..n {
        let a = ball_pt(&mut rng, 0.85);
        let params = AutomorphismParams::new(a.clone())?;
        t_a_zero = t_a_zero.max(geometry::t_a(&params, &a)?.norm());
        let x = ball_pt(&mut rng, 0.999);
        let y = geometry::t_a(&params, &x)?;
        roundtrip = roundtrip.max(geometry::t_a_inv(&params, &y)?.dist(&x));
        re_g_floor = re_g_floor.min(geometry::g_a(&params, &x)?.re() - 1.0);
        let zeta = sphere_pt(&mut rng, 1.0);
        boundary_norm = boundary_norm.max((geometry::t_a(&params, &zeta)?.norm() - 1.0).abs());
    }

    let mut cayley_defect = 0.0f64;
    for _ in 0..n {
        let x = ball_pt(&mut rng, 0.9);
        let y = geometry::cayley(&x)?;
        let d = SiegelPoint::from_opoint(&y).defect();
        let denom = (Octonion::one() + x.x2.clone()).norm_sq();
        let truth = 2.0 * (1.0 - x.norm().powi(2)) / denom;
        cayley_defect = cayley_defect.max(rel((d - truth).abs(), truth));
        let back = geometry::cayley_inv(&y)?;
        cayley_defect = cayley_defect.max(back.dist(&x));
    }

    let mut heis_assoc = 0.0f64;
    for _ in 0..n {
        let (p1, p2, p3) = (
            HeisPoint::new(rand_oct(&mut rng), rand_im_oct(&mut rng))?,
            HeisPoint::new(rand_oct(&mut rng), rand_im_oct(&mut rng))?,
            HeisPoint::new(rand_oct(&mut rng), rand_im_oct(&mut rng))?,
        );
        let l = geometry::heis_mul(&geometry::heis_mul(&p1, &p2), &p3);
        let r = geometry::heis_mul(&p1, &geometry::heis_mul(&p2, &p3));
        let scale = 1.0 + p1.x.norm() + p2.x.norm() + p3.x.norm();
        heis_assoc = heis_assoc
            .max(rel((l.x.clone() - r.x.clone()).norm(), scale))
            .max(rel((l.t.clone() - r.t.clone()).norm(), scale * scale));
    }

    let inputs = format!("pairs={n};seed={}", p.seed);
    let mut out = vec![
        CheckLine::abs("geometry/t_a_of_a_is_zero", inputs.as_str(), t_a_zero, gate),
        CheckLine::abs("geometry/roundtrip", inputs.as_str(), roundtrip, gate),
        CheckLine::abs(
            "geometry/boundary_norm",
            inputs.as_str(),
            boundary_norm,
            gate,
        ),
        CheckLine::floor("geometry/re_g_above_one", inputs.as_str(), re_g_floor, gate),
        CheckLine::abs(
            "geometry/cayley_defect",
            inputs.as_str(),
            cayley_defect,
            gate,
        ),
        CheckLine::abs(
            "geometry/heis_associativity",
            inputs.as_str(),
            heis_assoc,
            p.gate("geometry.heis", 1e-12),
        ),
    ];

    // Weighted pullbacks of subharmonic fields stay subharmonic: the
    // octonionic Hessian keeps nonnegative diagonals and determinant.
    let pts = (p.samples / 200).clamp(500, 2000);
    let pgate = p.gate("geometry.pullback", 1e-8);
    let centers: [(&str, [f64; DIM]); 4] = [
        ("origin", [0.0; DIM]),
        (
            "first_slot",
            std::array::from_fn(|i| if i == 0 { 0.3 } else { 0.0 }),
        ),
        (
            "second_slot",
            std::array::from_fn(|i| if i == 8 { 0.3 } else { 0.0 }),
        ),
        (
            "mixed",
            std::array::from_fn(|i| match i {
                0 => 0.2,
                11 => 0.2,
                _ => 0.0,
            }),
        ),
    ];
    let fields: [(&str, ScalarField); 3] = [
        ("sq_norm", catalog::sq_norm()),
        ("sq_dist", {
            let mut c = [0.0; DIM];
            c[2] = 0.2;
            catalog::sq_dist(&OPoint::from_f64s(&c))
        }),
        (
            "fund_eps",
            catalog::fundamental_smoothed(&OPoint::origin(), 0.4)?,
        ),
    ];
    for (cname, cc) in &centers {
        let params = AutomorphismParams::new(OPoint::from_f64s(cc))?;
        for (fname, f) in &fields {
            let pulled = catalog::weighted_pullback(&params, f, false)?;
            let rep = opsh_check(&pulled, pts, 0, pgate, p.seed ^ 0x9a11)?;
            out.push(CheckLine::new(
                format!("geometry/pullback_opsh/{fname}_at_{cname}"),
                format!(
                    "points={};skipped={}",
                    rep.points_checked, rep.points_skipped
                ),
                rep.worst_matrix_gap,
                0.0,
                pgate,
                rep.pass,
            ));
        }
    }
    Ok(out)
}

// ----- ibp -----

/// The integration-by-parts identity across the full field cube, the
/// boundary-only form with a constant test function, and the exchange
/// symmetry for a compactly supported factor.
pub fn ibp(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let trio = [
        catalog::sq_norm(),
        catalog::re_x1(),
        catalog::fundamental_smoothed(&OPoint::origin(), 0.5)?,
    ];
    let lines = ibp_suite(&trio, &trio, &trio, p.samples, p.seed)?;
    let mut out: Vec<CheckLine> = lines
        .iter()
        .map(|l| {
            CheckLine::new(
                format!("ibp/{}", l.label),
                format!("samples={};seed={}", l.samples, p.seed),
                l.residual,
                l.stderr,
                3.0 * l.stderr,
                l.pass,
            )
        })
        .collect();

    let half = (p.samples / 2).max(MIN_SAMPLES);
    let l = ibp_residual(
        &trio[0],
        &trio[1],
        &trio[2],
        IbpMode::BoundaryOnly,
        half,
        p.seed ^ 0xb0,
    )?;
    out.push(CheckLine::new(
        "ibp/boundary_only",
        format!("samples={half};seed={}", p.seed),
        l.residual,
        l.stderr,
        3.0 * l.stderr,
        l.pass,
    ));

    let bump = catalog::bump(&OPoint::origin(), 0.85)?;
    let l = ibp_residual(
        &bump,
        &trio[0],
        &trio[2],
        IbpMode::CompactSymmetry,
        half,
        p.seed ^ 0xc5,
    )?;
    out.push(CheckLine::new(
        "ibp/compact_symmetry",
        format!("samples={half};seed={}", p.seed),
        l.residual,
        l.stderr,
        3.0 * l.stderr,
        l.pass,
    ));
    Ok(out)
}

// ----- comparison -----

/// Sublevel-set mass inequality for nested quadratic pairs, including the
/// equality case.
pub fn comparison(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let samples = (p.samples / 2).max(MIN_SAMPLES);
    let u = catalog::sq_norm().scale_shift(1.0, -0.25);
    let v = catalog::sq_norm().scale_shift(0.6, -0.09);
    let rep = comparison_check(&u, &v, samples, p.seed ^ 0xc0)?;
    let mut out = vec![CheckLine::new(
        "comparison/quadratic_pair",
        format!(
            "samples={samples};region_fraction={:.3e};seed={}",
            rep.region_fraction, p.seed
        ),
        rep.defect.value,
        rep.defect.stderr,
        3.0 * rep.defect.stderr,
        rep.pass,
    )];

    let rep = comparison_check(&u, &u, samples, p.seed ^ 0xc1)?;
    out.push(CheckLine::new(
        "comparison/equality_case",
        format!("samples={samples};seed={}", p.seed),
        rep.defect.value,
        rep.defect.stderr,
        3.0 * rep.defect.stderr,
        rep.pass && rep.defect.value.abs() <= 3.0 * rep.defect.stderr.max(1e-15),
    ));
    Ok(out)
}

// ----- lelong -----

/// Density extraction at the origin: monotone normalized mass curves for
/// the smoothed fundamental family, a positive extrapolated density at the
/// pole, and a vanishing one for the smooth quadratic.
pub fn lelong_suite(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let samples = (p.samples / 5).max(MIN_SAMPLES);
    let r_grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let origin = OPoint::origin();

    let rep = lelong(
        &origin,
        |e| catalog::fundamental_smoothed(&origin, e),
        &[1e-2, 1e-3],
        &r_grid,
        samples,
        p.seed ^ 0x1e10,
    )?;
    let inputs = format!(
        "eps=[1e-2,1e-3];r=[0.1..1.0];samples={samples};seed={}",
        p.seed
    );
    let mut out = vec![
        CheckLine::flag("lelong/fundamental_monotone", inputs.as_str(), rep.monotone),
        CheckLine::new(
            "lelong/fundamental_density_positive",
            inputs.as_str(),
            rep.nu,
            rep.nu_stderr,
            5.0 * rep.nu_stderr,
            rep.nu >= 5.0 * rep.nu_stderr,
        ),
    ];

    let rep = lelong(
        &origin,
        |_| Ok(catalog::sq_norm()),
        &[1e-2],
        &r_grid,
        samples,
        p.seed ^ 0x1e11,
    )?;
    out.push(CheckLine::sigma(
        "lelong/smooth_density_zero",
        format!("r=[0.1..1.0];samples={samples};seed={}", p.seed),
        rep.nu,
        rep.nu_stderr,
        3.0,
    ));
    out.push(CheckLine::flag(
        "lelong/smooth_monotone",
        format!("r=[0.1..1.0];samples={samples};seed={}", p.seed),
        rep.monotone,
    ));
    Ok(out)
}

// ----- capacity -----

/// Condenser capacity: sweep convergence against the closed form, strict
/// growth in the inner radius, and the degenerate exact extremal density.
pub fn capacity(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    let samples = (p.samples * 3 / 10).max(MIN_SAMPLES);
    let origin = OPoint::origin();
    let deltas = vec![0.02, 0.01, 0.005];
    let closed_form = |r: f64, big_r: f64| {
        let s = 1.0 / (r.powi(-6) - big_r.powi(-6));
        144.0 * quadrature::sphere15_area() * s * s
    };

    let mut values = Vec::new();
    let mut out = Vec::new();
    for (i, r) in [0.3, 0.4, 0.5].into_iter().enumerate() {
        let spec = CondenserSpec::new(origin.clone(), r, 1.0, deltas.clone())?;
        let rep = capacity_ball(&spec, samples, p.seed ^ (0xca00 + i as u64))?;
        let inputs = format!(
            "r={r};R=1;deltas={deltas:?};samples={samples};seed={}",
            p.seed
        );
        if i == 2 {
            out.push(CheckLine::new(
                "capacity/sweep_converges",
                inputs.as_str(),
                rep.extrapolation_residual,
                rep.stderr,
                5.0 * rep.stderr,
                !rep.inconclusive,
            ));
            out.push(CheckLine::sigma(
                "capacity/matches_closed_form",
                inputs.as_str(),
                rep.value - closed_form(r, 1.0),
                rep.stderr.max(1e-4),
                5.0,
            ));
        }
        values.push((r, rep.value, rep.stderr));
    }
    for w in values.windows(2) {
        let ((r1, v1, s1), (r2, v2, s2)) = (w[0], w[1]);
        let gate = 3.0 * s1.hypot(s2);
        out.push(CheckLine::new(
            format!("capacity/increasing_r{r1}_to_r{r2}"),
            format!("samples={samples};seed={}", p.seed),
            v2 - v1,
            s1.hypot(s2),
            gate,
            v2 - v1 > gate,
        ));
    }

    // The unsmoothed extremal is maximal off the inner sphere.
    let exact = catalog::extremal_ball(&origin, 0.5, 1.0, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0xca9);
    let mut inside = 0.0f64;
    let mut outside = 0.0f64;
    for _ in 0..500 {
        inside = inside.max(ma_density(&exact, &shell_pt(&mut rng, 0.05, 0.45))?.abs());
        outside = outside.max(ma_density(&exact, &shell_pt(&mut rng, 0.55, 0.98))?.abs());
    }
    let dgate = p.gate("capacity.exact_density", 1e-8);
    out.push(CheckLine::abs(
        "capacity/exact_density_inside",
        "points=500;shell=[0.05,0.45]",
        inside,
        dgate,
    ));
    out.push(CheckLine::abs(
        "capacity/exact_density_outside",
        "points=500;shell=[0.55,0.98]",
        outside,
        dgate,
    ));
    Ok(out)
}

// ----- perron -----

/// Envelope-versus-harmonic-majorant sandwich for constant and linear
/// boundary data, and regularity of the envelope's second differences.
pub fn perron_suite(p: &SuiteParams) -> Result<Vec<CheckLine>> {
    // The harmonic kernel is heavy-tailed toward the boundary: keep the
    // evaluation points at |x| <= 0.4 and floor the upper-bound sample count
    // so the plug-in standard error stays meaningful.
    let up_samples = (p.samples / 10).max(4 * MIN_SAMPLES);
    let pts = 100;
    let mut out = Vec::new();

    // Per-point gaps are gated at three standard errors; across 100 points
    // the maximum of the normalized gaps needs family-wise control, so the
    // pair of gates is: max <= 4.5 sigma (the ~same family false-alarm rate
    // as a single 3-sigma test) and at most two per-point 3-sigma
    // exceedances (the binomial 99.9% envelope). A genuine sandwich
    // inversion is systematic and blows far past both.
    let sandwich_lines = |name: &str,
                          data: &BoundaryData,
                          lower: &ScalarField,
                          seed: u64|
     -> Result<[CheckLine; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        let mut exceed = 0usize;
        for i in 0..pts {
            let x = ball_pt(&mut rng, 0.4);
            let row = perron::sandwich_eval(data, lower, &x, up_samples, seed ^ (i as u64))?;
            let sd = row.upper_stderr.max(1e-12 * (1.0 + row.upper.abs()));
            let g = row.gap / sd;
            worst = worst.max(g);
            if g > 3.0 {
                exceed += 1;
            }
        }
        let inputs = format!("points={pts};upper_samples={up_samples};seed={}", p.seed);
        Ok([
            CheckLine::abs(format!("perron/{name}"), inputs.as_str(), worst, 4.5),
            CheckLine::abs(
                format!("perron/{name}_exceedances"),
                inputs.as_str(),
                exceed as f64,
                2.0,
            ),
        ])
    };

    let const_data = BoundaryData::new(catalog::constant(1.0), 0.0)?;
    let const_lower = perron::build_lower(&const_data, 64, &[], p.seed ^ 0x9e01)?;
    out.extend(sandwich_lines(
        "const_sandwich",
        &const_data,
        &const_lower,
        p.seed ^ 0x51,
    )?);

    let lin = catalog::re_x1();
    let lin_data = BoundaryData::new(lin.clone(), 0.0)?.with_exact(lin.clone());
    let lin_lower =
        perron::build_lower(&lin_data, 64, std::slice::from_ref(&lin), p.seed ^ 0x9e02)?;
    out.extend(sandwich_lines(
        "linear_sandwich_injected",
        &lin_data,
        &lin_lower,
        p.seed ^ 0x52,
    )?);

    // Envelope regularity: one-sided curvature floor, and the scaled
    // second-difference bound across refinements (kinks contribute
    // quotients up to 2 Lip / h, so h * sup stays bounded).
    let bare_lower = perron::build_lower(&lin_data, 64, &[], p.seed ^ 0x9e02)?;
    let rows =
        perron::second_difference_check(&bare_lower, &[0.04, 0.02, 0.01], 200, p.seed ^ 0x53)?;
    let mut floor = f64::INFINITY;
    let mut scaled = 0.0f64;
    for r in &rows {
        floor = floor.min(r.inf_quotient);
        scaled = scaled.max(r.h * r.sup_quotient);
    }
    let inputs = format!("h=[0.04,0.02,0.01];points=200;seed={}", p.seed);
    out.push(CheckLine::floor(
        "perron/second_diff_floor",
        inputs.as_str(),
        floor,
        p.gate("perron.second_diff_floor", 1e-6),
    ));
    out.push(CheckLine::abs(
        "perron/second_diff_scaled_bound",
        inputs.as_str(),
        scaled,
        p.gate("perron.second_diff_scale", 7.5),
    ));
    Ok(out)
}
