//! Command implementations: the JSON-lines report envelope, the verify
//! gate, and the compute reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::SecondsFormat;
use octopot::catalog::{self, ScalarField};
use octopot::octonion::OPoint;
use octopot::operators::{self, CondenserSpec};
use octopot::perron::{self, BoundaryData};
use octopot::real::DIM;
use octopot::report::all_pass;
use octopot::suites::{self, SuiteParams};

use crate::config::{self, RunConfig};
use crate::{Cli, Cmd, ComputeCmd};

pub fn run(cli: Cli) -> Result<i32> {
    let flags = config::Overrides {
        seed: cli.seed,
        samples: cli.samples,
        suite: cli.suite,
        out: cli.out,
        gates: cli.gates,
    };
    let env_seed = std::env::var("OCTOPOT_SEED").ok();
    let mut cfg = config::resolve(&flags, cli.config.as_deref(), env_seed.as_deref())?;
    match cli.cmd {
        Cmd::Verify { suite } => {
            if let Some(s) = suite {
                cfg.suite = s;
            }
            verify(&cfg)
        }
        Cmd::Compute(c) => compute(&cfg, &c),
    }
}

fn usage_suites() -> String {
    format!(
        "usage: octopot verify <suite>\n  suites: {}, all",
        suites::SUITE_NAMES.join(", ")
    )
}

fn out_writer(out: &str) -> Result<Box<dyn Write>> {
    Ok(if out == "-" {
        Box::new(BufWriter::new(std::io::stdout()))
    } else {
        Box::new(BufWriter::new(
            File::create(out).with_context(|| format!("creating report file {out}"))?,
        ))
    })
}

/// The timestamp is the only nondeterministic output; it gets its own line
/// so identical configurations otherwise produce byte-identical reports.
fn write_envelope(w: &mut dyn Write, cfg: &RunConfig) -> Result<()> {
    let ts = chrono::Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
    writeln!(w, "{}", serde_json::json!({ "timestamp": ts }))?;
    writeln!(w, "{}", serde_json::json!({ "config": cfg }))?;
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<i32> {
    let name = cfg.suite.as_str();
    if name != "all" && !suites::SUITE_NAMES.contains(&name) {
        eprintln!("unknown suite {name:?}\n{}", usage_suites());
        return Ok(2);
    }
    let mut params = SuiteParams::new(cfg.seed, cfg.samples);
    params.gates = cfg.gates.clone();
    let lines = suites::run_suite(name, &params)?;
    let pass = all_pass(&lines);
    let failures = lines.iter().filter(|l| !l.pass).count();

    let mut w = out_writer(&cfg.out)?;
    write_envelope(&mut w, cfg)?;
    for l in &lines {
        writeln!(w, "{}", serde_json::to_string(l)?)?;
    }
    writeln!(
        w,
        "{}",
        serde_json::json!({"summary": {"checks": lines.len(), "failures": failures, "pass": pass}})
    )?;
    w.flush()?;
    Ok(if pass { 0 } else { 1 })
}

fn compute(cfg: &RunConfig, cmd: &ComputeCmd) -> Result<i32> {
    let mut w = out_writer(&cfg.out)?;
    match cmd {
        ComputeCmd::Capacity {
            r,
            big_r,
            delta,
            csv,
        } => {
            let deltas = if delta.is_empty() {
                vec![0.02, 0.01, 0.005]
            } else {
                delta.clone()
            };
            let spec = CondenserSpec::new(OPoint::origin(), *r, *big_r, deltas)?;
            let rep = operators::capacity_ball(&spec, cfg.samples, cfg.seed)?;
            let mut echo = cfg.clone();
            echo.suite = "capacity".into();
            write_envelope(&mut w, &echo)?;
            writeln!(
                w,
                "{}",
                serde_json::json!({"capacity": {
                    "r": r,
                    "R": big_r,
                    "value": rep.value,
                    "stderr": rep.stderr,
                    "extrapolation_residual": rep.extrapolation_residual,
                    "inconclusive": rep.inconclusive,
                    "per_delta": rep
                        .per_delta
                        .iter()
                        .map(|(d, v, s)| serde_json::json!({"delta": d, "capacity": v, "stderr": s}))
                        .collect::<Vec<_>>(),
                }})
            )?;
            if let Some(path) = csv {
                write_csv(
                    path,
                    &["delta", "capacity", "stderr"],
                    rep.per_delta
                        .iter()
                        .map(|(d, v, s)| vec![d.to_string(), v.to_string(), s.to_string()]),
                )?;
            }
        }
        ComputeCmd::Lelong {
            field,
            center,
            eps,
            csv,
        } => {
            let a = parse_point(center)?;
            let eps_list = if eps.is_empty() {
                vec![1e-2, 1e-3]
            } else {
                eps.clone()
            };
            let r_grid: Vec<f64> = (1..=10).map(|i| f64::from(i) / 10.0).collect();
            let family = field_family(field, &a)?;
            let rep = operators::lelong(&a, family, &eps_list, &r_grid, cfg.samples, cfg.seed)?;
            let mut echo = cfg.clone();
            echo.suite = "lelong".into();
            write_envelope(&mut w, &echo)?;
            writeln!(
                w,
                "{}",
                serde_json::json!({"lelong": {
                    "field": field,
                    "center": a.coords().to_vec(),
                    "nu": rep.nu,
                    "nu_stderr": rep.nu_stderr,
                    "monotone": rep.monotone,
                    "curves": rep
                        .curves
                        .iter()
                        .map(|(e, rows)| serde_json::json!({
                            "eps": e,
                            "rows": rows
                                .iter()
                                .map(|row| serde_json::json!({
                                    "r": row.r,
                                    "sigma_over_r8": row.sigma_over_r8,
                                    "stderr": row.stderr,
                                }))
                                .collect::<Vec<_>>(),
                        }))
                        .collect::<Vec<_>>(),
                }})
            )?;
            if let Some(path) = csv {
                let rows = rep.curves.iter().flat_map(|(e, rows)| {
                    rows.iter().map(move |row| {
                        vec![
                            e.to_string(),
                            row.r.to_string(),
                            row.sigma_over_r8.to_string(),
                            row.stderr.to_string(),
                        ]
                    })
                });
                write_csv(path, &["eps", "r", "sigma_over_r8", "stderr"], rows)?;
            }
        }
        ComputeCmd::Perron {
            phi,
            at,
            feet,
            c2_bound,
        } => {
            let f = parse_field_loose(phi)?;
            let x = parse_point(at)?;
            let data = BoundaryData::new(f, *c2_bound)?;
            let lower = perron::build_lower(&data, *feet, &[], cfg.seed)?;
            let row = perron::sandwich_eval(&data, &lower, &x, cfg.samples, cfg.seed ^ 0x5d)?;
            let mut echo = cfg.clone();
            echo.suite = "perron".into();
            write_envelope(&mut w, &echo)?;
            writeln!(
                w,
                "{}",
                serde_json::json!({"perron": {
                    "phi": phi,
                    "at": x.coords().to_vec(),
                    "feet": feet,
                    "lower": row.lower,
                    "upper": row.upper,
                    "upper_stderr": row.upper_stderr,
                    "gap": row.gap,
                    "pass": row.pass,
                }})
            )?;
        }
    }
    w.flush()?;
    Ok(0)
}

/// "0" is the origin; otherwise 16 comma-separated coordinates.
fn parse_point(s: &str) -> Result<OPoint> {
    let t = s.trim();
    if t == "0" {
        return Ok(OPoint::origin());
    }
    let parts: Vec<&str> = t.split(',').collect();
    if parts.len() != DIM {
        bail!(
            "point must be \"0\" or {DIM} comma-separated coordinates, got {} fields",
            parts.len()
        );
    }
    let mut c = [0.0; DIM];
    for (i, p) in parts.iter().enumerate() {
        c[i] = p
            .trim()
            .parse()
            .with_context(|| format!("bad coordinate {i}: {p:?}"))?;
    }
    Ok(OPoint::from_f64s(&c))
}

/// Accepts either the full field format (headed `plain`/`opsh`) or a bare
/// expression, which is wrapped as nonsingular plain data.
fn parse_field_loose(input: &str) -> Result<ScalarField> {
    let t = input.trim();
    let full = if t.starts_with("plain ") || t.starts_with("opsh ") {
        t.to_string()
    } else {
        format!("plain sing 0 {t}")
    };
    Ok(catalog::parse_field(&full)?)
}

/// Smoothing family for the lelong computation: named families smooth
/// toward their singular limit; arbitrary expressions are treated as fixed
/// fields independent of the smoothing parameter.
fn field_family(
    name: &str,
    a: &OPoint,
) -> Result<Box<dyn Fn(f64) -> octopot::Result<ScalarField>>> {
    let a = a.clone();
    Ok(match name {
        "fundamental" => Box::new(move |e| {
            if e > 0.0 {
                catalog::fundamental_smoothed(&a, e)
            } else {
                Ok(catalog::fundamental(&a))
            }
        }),
        "sq_norm" => Box::new(|_| Ok(catalog::sq_norm())),
        expr => {
            let f = parse_field_loose(expr)?;
            Box::new(move |_| Ok(f.clone()))
        }
    })
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .with_context(|| format!("creating csv {}", path.display()))?;
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parsing_accepts_origin_and_full_coordinates() {
        assert_eq!(parse_point("0").unwrap().coords(), [0.0; DIM]);
        let full = "0.5,0,0,0,0,0,0,0, 0,0,0,0,0,0,0,-1";
        let p = parse_point(full).unwrap();
        assert_eq!(p.coords()[0], 0.5);
        assert_eq!(p.coords()[15], -1.0);
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("a,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0").is_err());
    }

    #[test]
    fn bare_expressions_are_wrapped_into_the_field_format() {
        let one = parse_field_loose("const 1").unwrap();
        assert_eq!(one.value(&OPoint::origin()).unwrap(), 1.0);
        let coord = parse_field_loose("plain sing 0 coord 0").unwrap();
        let mut c = [0.0; DIM];
        c[0] = 0.25;
        assert_eq!(coord.value(&OPoint::from_f64s(&c)).unwrap(), 0.25);
        assert!(parse_field_loose("frobnicate 3").is_err());
    }

    #[test]
    fn named_lelong_families_smooth_toward_their_limit() {
        let a = OPoint::origin();
        let fam = field_family("fundamental", &a).unwrap();
        let mut c = [0.0; DIM];
        c[0] = 0.5;
        let x = OPoint::from_f64s(&c);
        let smoothed = fam(0.001).unwrap().value(&x).unwrap();
        let exact = fam(0.0).unwrap().value(&x).unwrap();
        assert!((smoothed - exact).abs() < 0.05 * exact.abs());

        let fixed = field_family("sqdist 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0", &a).unwrap();
        assert_eq!(
            fixed(0.3).unwrap().value(&x).unwrap(),
            fixed(0.0).unwrap().value(&x).unwrap()
        );
    }
}
