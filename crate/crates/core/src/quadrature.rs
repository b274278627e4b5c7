//! Monte-Carlo and quasi-Monte-Carlo integration over balls, spheres and
//! shells in 16 dimensions (and discs in 8 dimensions for line
//! restrictions), with standard-error certification.
//!
//! Determinism contract: identical `(spec, integrand)` produce bit-identical
//! estimates. Sampling is chunked with counter-based per-chunk seeds and the
//! reduction runs in chunk order, so thread scheduling cannot change the
//! result.

use crate::error::{CoreError, Result};
use crate::octonion::{OPoint, Octonion};
use crate::real::DIM;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Integration region. Ball, sphere and shell live in the 16-dimensional
/// point space; the line disc is the radius-`r` ball in the 8-dimensional
/// line parameter, delivered to integrands as a point with the parameter in
/// the first slot and zero in the second.
#[derive(Clone, Debug)]
pub enum Region {
    Ball {
        center: OPoint,
        r: f64,
    },
    Sphere {
        center: OPoint,
        r: f64,
    },
    Shell {
        center: OPoint,
        r_lo: f64,
        r_hi: f64,
    },
    LineDisc {
        r: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mc,
    Qmc,
}

#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub region: Region,
    pub samples: usize,
    pub seed: u64,
    pub method: Method,
}

pub const MIN_SAMPLES: usize = 1_000;
pub const DEFAULT_SAMPLES: usize = 200_000;

impl QuadratureSpec {
    pub fn new(region: Region, samples: usize, seed: u64, method: Method) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(CoreError::BadQuadratureSpec(format!(
                "samples must be at least {MIN_SAMPLES}, got {samples}"
            )));
        }
        let ok = match &region {
            Region::Ball { r, .. } => *r > 0.0,
            Region::Sphere { r, .. } => *r > 0.0,
            Region::Shell { r_lo, r_hi, .. } => 0.0 <= *r_lo && r_lo < r_hi,
            Region::LineDisc { r } => *r > 0.0,
        };
        if !ok {
            return Err(CoreError::BadQuadratureSpec(format!(
                "radii must be positive and ordered: {region:?}"
            )));
        }
        Ok(QuadratureSpec {
            region,
            samples,
            seed,
            method,
        })
    }

    pub fn mc(region: Region, samples: usize, seed: u64) -> Result<Self> {
        Self::new(region, samples, seed, Method::Mc)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl QuadratureEstimate {
    /// Two-sided gate: |value - target| within `k` combined standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Volume of the radius-`r` ball in an even dimension: pi^m / m! r^n with
/// m = n/2.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    assert!(dim.is_multiple_of(2), "even dimensions only");
    let m = dim / 2;
    let mut v = 1.0;
    for i in 1..=m {
        v *= std::f64::consts::PI / (i as f64);
    }
    v * r.powi(dim as i32)
}

/// Surface area of the radius-`r` sphere bounding an even-dimensional ball.
pub fn sphere_area(dim: usize, r: f64) -> f64 {
    (dim as f64) * ball_volume(dim, 1.0) * r.powi(dim as i32 - 1)
}

/// Unit-ball volume in 16 dimensions.
pub fn tau16() -> f64 {
    ball_volume(16, 1.0)
}

/// Unit-sphere area in 16 dimensions.
pub fn sphere15_area() -> f64 {
    sphere_area(16, 1.0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

#[derive(Clone, Copy)]
enum Kind {
    Ball,
    Sphere,
    Shell,
}

/// Internal dim-generic region: `dim` is 8 or 16, `center` has `dim`
/// entries, radii are `(r_lo, r_hi)` with `r_lo` unused except by shells.
#[derive(Clone)]
struct CoreRegion {
    kind: Kind,
    dim: usize,
    center: Vec<f64>,
    r_lo: f64,
    r_hi: f64,
}

impl CoreRegion {
    fn measure(&self) -> f64 {
        match self.kind {
            Kind::Ball => ball_volume(self.dim, self.r_hi),
            Kind::Sphere => sphere_area(self.dim, self.r_hi),
            Kind::Shell => ball_volume(self.dim, self.r_hi) - ball_volume(self.dim, self.r_lo),
        }
    }

    /// Uniforms consumed per sample point.
    fn uniforms_per_point(&self) -> usize {
        // Gaussian direction needs `dim` normals (dim/2 Box-Muller pairs in
        // QMC mode); ball and shell add a radius uniform.
        match self.kind {
            Kind::Sphere => self.dim,
            Kind::Ball | Kind::Shell => self.dim + 1,
        }
    }

    /// Maps (direction gaussians, radius uniform) to the sample point.
    fn place(&self, gauss: &[f64], u_radius: f64, out: &mut [f64]) {
        let mut n2 = 0.0;
        for g in gauss {
            n2 += g * g;
        }
        let n = n2.sqrt().max(1e-300);
        let rho = match self.kind {
            Kind::Sphere => self.r_hi,
            Kind::Ball => self.r_hi * u_radius.powf(1.0 / self.dim as f64),
            Kind::Shell => {
                let nlo = self.r_lo.powi(self.dim as i32);
                let nhi = self.r_hi.powi(self.dim as i32);
                (nlo + u_radius * (nhi - nlo)).powf(1.0 / self.dim as f64)
            }
        };
        for i in 0..self.dim {
            out[i] = self.center[i] + rho * gauss[i] / n;
        }
    }
}

fn mc_point(region: &CoreRegion, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut gauss = [0.0f64; DIM];
    for g in gauss.iter_mut().take(region.dim) {
        *g = rand_distr::StandardNormal.sample(rng);
    }
    let u: f64 = rng.gen();
    region.place(&gauss[..region.dim], u, out);
}

use rand_distr::Distribution as _;

/// Kronecker (additive recurrence) direction vector: inverse powers of the
/// root of x^(d+1) = x + 1, a standard low-discrepancy choice.
fn kronecker_alpha(d: usize) -> Vec<f64> {
    let mut phi = 1.5f64;
    for _ in 0..64 {
        let f = phi.powi(d as i32 + 1) - phi - 1.0;
        let fp = (d as f64 + 1.0) * phi.powi(d as i32) - 1.0;
        phi -= f / fp;
    }
    (0..d)
        .map(|j| {
            let a = phi.powi(-(j as i32 + 1));
            a - a.floor()
        })
        .collect()
}

fn qmc_point(region: &CoreRegion, alpha: &[f64], shift: &[f64], n: u64, out: &mut [f64]) {
    let d = region.uniforms_per_point();
    let mut u = [0.0f64; DIM + 1];
    for j in 0..d {
        let x = (n as f64) * alpha[j] + shift[j];
        u[j] = x - x.floor();
    }
    // Box-Muller pairs for the direction.
    let mut gauss = [0.0f64; DIM];
    for pair in 0..(region.dim / 2) {
        let u1 = u[2 * pair].max(1e-300);
        let u2 = u[2 * pair + 1];
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        gauss[2 * pair] = r * c;
        gauss[2 * pair + 1] = r * s;
    }
    region.place(&gauss[..region.dim], u[d - 1], out);
}

fn finite_slot(out: &[f64], x: &[f64]) -> Result<()> {
    for v in out {
        if !v.is_finite() {
            return Err(CoreError::NonFiniteSample(format!(
                "integrand returned {v} at {x:?}"
            )));
        }
    }
    Ok(())
}

/// Deterministic chunked integration of `m` integrand components sharing
/// each sample point, over a dim-generic region.
fn integrate_core_many<F>(
    region: &CoreRegion,
    spec: &QuadratureSpec,
    m: usize,
    f: F,
) -> Result<Vec<QuadratureEstimate>>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    let n = spec.samples;
    let measure = region.measure();
    match spec.method {
        Method::Mc => {
            let k = n.div_ceil(4096).max(16);
            let base = n / k;
            let extra = n % k;
            let chunks: Vec<Result<(Vec<f64>, usize)>> = (0..k)
                .into_par_iter()
                .map(|i| {
                    let size = base + usize::from(i < extra);
                    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(spec.seed, i as u64));
                    let mut sums = vec![0.0f64; m];
                    let mut x = vec![0.0f64; region.dim];
                    let mut out = vec![0.0f64; m];
                    for _ in 0..size {
                        mc_point(region, &mut rng, &mut x);
                        f(&x, &mut out)?;
                        finite_slot(&out, &x)?;
                        for (s, v) in sums.iter_mut().zip(out.iter()) {
                            *s += v;
                        }
                    }
                    Ok((sums, size))
                })
                .collect();
            let mut per_chunk = Vec::with_capacity(k);
            for c in chunks {
                per_chunk.push(c?);
            }
            let count: usize = per_chunk.iter().map(|(_, c)| c).sum();
            let mut estimates = Vec::with_capacity(m);
            for j in 0..m {
                let total: f64 = per_chunk.iter().map(|(s, _)| s[j]).sum();
                let theta = total / count as f64;
                // Jackknife over chunks.
                let mut loo = Vec::with_capacity(k);
                for (s, c) in &per_chunk {
                    loo.push((total - s[j]) / (count - c) as f64);
                }
                let loo_mean = loo.iter().sum::<f64>() / k as f64;
                let var = loo
                    .iter()
                    .map(|t| (t - loo_mean) * (t - loo_mean))
                    .sum::<f64>()
                    * (k as f64 - 1.0)
                    / k as f64;
                estimates.push(QuadratureEstimate {
                    value: measure * theta,
                    stderr: measure * var.sqrt(),
                    samples: count,
                    seed: spec.seed,
                });
            }
            Ok(estimates)
        }
        Method::Qmc => {
            const REPLICATES: usize = 16;
            let reps = n.div_ceil(REPLICATES);
            let d = region.uniforms_per_point();
            let alpha = kronecker_alpha(d);
            let means: Vec<Result<Vec<f64>>> = (0..REPLICATES)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(spec.seed, r as u64));
                    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                    let mut sums = vec![0.0f64; m];
                    let mut x = vec![0.0f64; region.dim];
                    let mut out = vec![0.0f64; m];
                    for i in 0..reps {
                        qmc_point(region, &alpha, &shift, i as u64 + 1, &mut x);
                        f(&x, &mut out)?;
                        finite_slot(&out, &x)?;
                        for (s, v) in sums.iter_mut().zip(out.iter()) {
                            *s += v;
                        }
                    }
                    Ok(sums.iter().map(|s| s / reps as f64).collect())
                })
                .collect();
            let mut ms: Vec<Vec<f64>> = Vec::with_capacity(REPLICATES);
            for r in means {
                ms.push(r?);
            }
            let mut estimates = Vec::with_capacity(m);
            for j in 0..m {
                let theta = ms.iter().map(|v| v[j]).sum::<f64>() / REPLICATES as f64;
                let var = ms
                    .iter()
                    .map(|v| (v[j] - theta) * (v[j] - theta))
                    .sum::<f64>()
                    / (REPLICATES as f64 * (REPLICATES as f64 - 1.0));
                estimates.push(QuadratureEstimate {
                    value: measure * theta,
                    stderr: measure * var.sqrt(),
                    samples: reps * REPLICATES,
                    seed: spec.seed,
                });
            }
            Ok(estimates)
        }
    }
}

fn integrate_core<F>(region: &CoreRegion, spec: &QuadratureSpec, f: F) -> Result<QuadratureEstimate>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let mut v = integrate_core_many(region, spec, 1, |x, out| {
        out[0] = f(x)?;
        Ok(())
    })?;
    Ok(v.pop().expect("one estimate"))
}

fn to_core(region: &Region) -> CoreRegion {
    match region {
        Region::Ball { center, r } => CoreRegion {
            kind: Kind::Ball,
            dim: DIM,
            center: center.coords().to_vec(),
            r_lo: 0.0,
            r_hi: *r,
        },
        Region::Sphere { center, r } => CoreRegion {
            kind: Kind::Sphere,
            dim: DIM,
            center: center.coords().to_vec(),
            r_lo: 0.0,
            r_hi: *r,
        },
        Region::Shell { center, r_lo, r_hi } => CoreRegion {
            kind: Kind::Shell,
            dim: DIM,
            center: center.coords().to_vec(),
            r_lo: *r_lo,
            r_hi: *r_hi,
        },
        Region::LineDisc { r } => CoreRegion {
            kind: Kind::Ball,
            dim: 8,
            center: vec![0.0; 8],
            r_lo: 0.0,
            r_hi: *r,
        },
    }
}

fn point_of(coords: &[f64]) -> OPoint {
    let mut c = [0.0f64; DIM];
    c[..coords.len()].copy_from_slice(coords);
    OPoint::from_f64s(&c)
}

/// Integrates a point function over the spec's region. The estimate is an
/// unbiased sample mean times the region measure; `stderr` comes from a
/// jackknife over chunks (MC) or from 16 randomly shifted replicates (QMC).
pub fn integrate<F>(spec: &QuadratureSpec, f: F) -> Result<QuadratureEstimate>
where
    F: Fn(&OPoint) -> Result<f64> + Sync,
{
    let core = to_core(&spec.region);
    integrate_core(&core, spec, |coords| f(&point_of(coords)))
}

/// Integrates `m` components sharing each sample point (and any per-point
/// work the integrand caches); estimates are per-component, correlated
/// through the common points.
pub fn integrate_many<F>(spec: &QuadratureSpec, m: usize, f: F) -> Result<Vec<QuadratureEstimate>>
where
    F: Fn(&OPoint, &mut [f64]) -> Result<()> + Sync,
{
    let core = to_core(&spec.region);
    integrate_core_many(&core, spec, m, |coords, out| f(&point_of(coords), out))
}

/// Uniform octonionic-line parameters for restriction tests: base points `a`
/// uniform in the closed unit ball and directions `b = (b_1, b_2)` with a
/// real first component, uniform on the 9-sphere `b_1^2 + |b_2|^2 = 1`.
pub fn sample_lines(count: usize, seed: u64) -> Vec<(OPoint, [Octonion; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x6c69_6e65));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut g = [0.0f64; DIM];
        for v in g.iter_mut() {
            *v = rand_distr::StandardNormal.sample(&mut rng);
        }
        let n2: f64 = g.iter().map(|v| v * v).sum();
        let u: f64 = rng.gen();
        let rho = u.powf(1.0 / DIM as f64) / n2.sqrt().max(1e-300);
        let a = OPoint::from_f64s(&g.map(|v| v * rho));

        let mut d = [0.0f64; 9];
        for v in d.iter_mut() {
            *v = rand_distr::StandardNormal.sample(&mut rng);
        }
        let dn: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let mut b1 = Octonion::zero();
        b1.c[0] = d[0] / dn;
        let b2 = Octonion::from_f64s(std::array::from_fn(|p| d[1 + p] / dn));
        out.push((a, [b1, b2]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mc_spec(region: Region, samples: usize, seed: u64) -> QuadratureSpec {
        QuadratureSpec::new(region, samples, seed, Method::Mc).unwrap()
    }

    #[test]
    fn constant_calibration_is_exact() {
        // Constant integrands make the estimate the analytic measure.
        let ball = mc_spec(
            Region::Ball {
                center: OPoint::origin(),
                r: 1.0,
            },
            20_000,
            7,
        );
        let est = integrate(&ball, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(est.value, tau16(), max_relative = 1e-12);
        assert_relative_eq!(tau16(), 0.235_330_630_358_893_1, max_relative = 1e-12);
        assert!(est.stderr < 1e-12);

        let sphere = mc_spec(
            Region::Sphere {
                center: OPoint::origin(),
                r: 1.0,
            },
            20_000,
            7,
        );
        let est = integrate(&sphere, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(est.value, sphere15_area(), max_relative = 1e-12);
        assert_relative_eq!(est.value, 3.765_290_085_742_29, max_relative = 1e-10);

        let shell = mc_spec(
            Region::Shell {
                center: OPoint::origin(),
                r_lo: 0.5,
                r_hi: 1.0,
            },
            20_000,
            7,
        );
        let est = integrate(&shell, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(
            est.value,
            tau16() * (1.0 - 0.5f64.powi(16)),
            max_relative = 1e-12
        );

        let disc = mc_spec(Region::LineDisc { r: 1.0 }, 20_000, 7);
        let est = integrate(&disc, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(est.value, ball_volume(8, 1.0), max_relative = 1e-12);
    }

    #[test]
    fn moment_calibration_in_dims_8_and_16() {
        // int x_0^2 over B^n(R) = tau_n R^(n+2)/(n+2); over S^(n-1)(R) it is
        // area/n * R^2. Exercised through the public regions (dim 16 and the
        // dim-8 disc) and through the internal core for dim-8 sphere/shell.
        let seed = 11;
        for method in [Method::Mc, Method::Qmc] {
            let ball = QuadratureSpec::new(
                Region::Ball {
                    center: OPoint::origin(),
                    r: 1.2,
                },
                120_000,
                seed,
                method,
            )
            .unwrap();
            let est = integrate(&ball, |x| Ok(x.coords()[0].powi(2))).unwrap();
            let truth = tau16() * 1.2f64.powi(18) / 18.0;
            assert!(est.within(truth, 3.0), "{est:?} vs {truth}");
            assert!(est.stderr > 0.0);

            let sphere = QuadratureSpec::new(
                Region::Sphere {
                    center: OPoint::origin(),
                    r: 0.9,
                },
                120_000,
                seed,
                method,
            )
            .unwrap();
            let est = integrate(&sphere, |x| Ok(x.coords()[3].powi(2))).unwrap();
            let truth = sphere_area(16, 0.9) * 0.81 / 16.0;
            assert!(est.within(truth, 3.0), "{est:?} vs {truth}");

            let disc =
                QuadratureSpec::new(Region::LineDisc { r: 1.0 }, 60_000, seed, method).unwrap();
            let est = integrate(&disc, |x| Ok(x.coords()[2].powi(2))).unwrap();
            let truth = ball_volume(8, 1.0) / 10.0;
            assert!(est.within(truth, 3.0), "{est:?} vs {truth}");
        }

        // Dim-8 sphere and shell through the internal core.
        let sphere8 = CoreRegion {
            kind: Kind::Sphere,
            dim: 8,
            center: vec![0.0; 8],
            r_lo: 0.0,
            r_hi: 1.0,
        };
        let spec = mc_spec(Region::LineDisc { r: 1.0 }, 60_000, 13);
        let est = integrate_core(&sphere8, &spec, |x| Ok(x[1] * x[1])).unwrap();
        assert!(est.within(sphere_area(8, 1.0) / 8.0, 3.0));
        let est = integrate_core(&sphere8, &spec, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(est.value, sphere_area(8, 1.0), max_relative = 1e-12);

        let shell8 = CoreRegion {
            kind: Kind::Shell,
            dim: 8,
            center: vec![0.0; 8],
            r_lo: 0.7,
            r_hi: 1.1,
        };
        let est =
            integrate_core(&shell8, &spec, |x| Ok(x.iter().map(|v| v * v).sum::<f64>())).unwrap();
        // int |x|^2 over the shell = 8 tau_8 (R^10 - r^10)/10.
        let truth = 8.0 * ball_volume(8, 1.0) * (1.1f64.powi(10) - 0.7f64.powi(10)) / 10.0;
        assert!(est.within(truth, 3.0), "{est:?} vs {truth}");
    }

    #[test]
    fn odd_functions_vanish() {
        let spec = mc_spec(
            Region::Ball {
                center: OPoint::origin(),
                r: 1.0,
            },
            100_000,
            23,
        );
        let est = integrate(&spec, |x| Ok(x.coords()[5])).unwrap();
        assert!(est.value.abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn determinism_is_bitwise() {
        let spec = mc_spec(
            Region::Shell {
                center: OPoint::origin(),
                r_lo: 0.3,
                r_hi: 1.0,
            },
            50_000,
            99,
        );
        let f = |x: &OPoint| Ok((1.0 + x.norm_sq()).recip());
        let a = integrate(&spec, f).unwrap();
        let b = integrate(&spec, f).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());

        let qspec = QuadratureSpec::new(spec.region.clone(), 50_000, 99, Method::Qmc).unwrap();
        let a = integrate(&qspec, f).unwrap();
        let b = integrate(&qspec, f).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());

        let other = mc_spec(spec.region.clone(), 50_000, 100);
        let c = integrate(&other, f).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn errors_name_the_sample_point() {
        let spec = mc_spec(
            Region::Ball {
                center: OPoint::origin(),
                r: 1.0,
            },
            1_000,
            5,
        );
        let err = integrate(&spec, |x| Ok(1.0 / (x.coords()[0] - x.coords()[0]))).unwrap_err();
        match err {
            CoreError::NonFiniteSample(msg) => assert!(msg.contains('[')),
            other => panic!("wrong error: {other:?}"),
        }
        let err = integrate(&spec, |x| {
            if x.norm() < 2.0 {
                Err(CoreError::SingularPoint("pole".into()))
            } else {
                Ok(0.0)
            }
        })
        .unwrap_err();
        assert!(matches!(err, CoreError::SingularPoint(_)));

        assert!(QuadratureSpec::mc(Region::LineDisc { r: 1.0 }, 10, 0).is_err());
        assert!(QuadratureSpec::mc(
            Region::Shell {
                center: OPoint::origin(),
                r_lo: 1.0,
                r_hi: 0.5
            },
            5_000,
            0
        )
        .is_err());
    }

    #[test]
    fn line_samples_are_normalized_and_reproducible() {
        let lines = sample_lines(500, 42);
        for (a, b) in &lines {
            assert!(a.norm() <= 1.0 + 1e-12);
            let n2 = b[0].norm_sq() + b[1].norm_sq();
            assert_relative_eq!(n2, 1.0, epsilon = 1e-12);
            for p in 1..8 {
                assert_eq!(b[0].c[p], 0.0, "first direction component is real");
            }
        }
        let again = sample_lines(500, 42);
        for ((a1, b1), (a2, b2)) in lines.iter().zip(again.iter()) {
            assert_eq!(a1.coords(), a2.coords());
            assert_eq!(b1[0].c, b2[0].c);
            assert_eq!(b1[1].c, b2[1].c);
        }
    }

    #[test]
    fn qmc_beats_mc_on_a_smooth_integrand() {
        // Not a strict guarantee, but with matched budgets on a smooth
        // integrand the shifted Kronecker estimate should have smaller error
        // on the known answer.
        let region = Region::Ball {
            center: OPoint::origin(),
            r: 1.0,
        };
        let truth = tau16() * 16.0 / 18.0; // int |x|^2 over B^16
        let mc = integrate(&mc_spec(region.clone(), 160_000, 3), |x| Ok(x.norm_sq())).unwrap();
        let qmc = integrate(
            &QuadratureSpec::new(region, 160_000, 3, Method::Qmc).unwrap(),
            |x| Ok(x.norm_sq()),
        )
        .unwrap();
        assert!(mc.within(truth, 4.0), "{mc:?} vs {truth}");
        assert!(qmc.within(truth, 4.0), "{qmc:?} vs {truth}");
        assert!(qmc.stderr < mc.stderr, "qmc {qmc:?} vs mc {mc:?}");
    }
}
