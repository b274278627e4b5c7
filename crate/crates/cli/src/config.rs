//! Run configuration. Resolution order, weakest first: built-in defaults,
//! the `OCTOPOT_SEED` environment variable (seed only), the key=value
//! config file, command-line flags. The resolved configuration is echoed
//! into every report so a run can be reproduced from its output alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    /// Tolerance overrides keyed by gate name, e.g. `jets.ma_rel`.
    pub gates: BTreeMap<String, f64>,
    /// Report destination; `-` means stdout.
    pub out: String,
    /// Suite selector used when `verify` gets no positional suite.
    pub suite: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            samples: octopot::quadrature::DEFAULT_SAMPLES,
            gates: BTreeMap::new(),
            out: "-".into(),
            suite: "all".into(),
        }
    }
}

/// Settings taken from command-line flags; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suite: Option<String>,
    pub out: Option<String>,
    pub gates: Vec<(String, f64)>,
}

pub fn resolve(
    flags: &Overrides,
    config_path: Option<&Path>,
    env_seed: Option<&str>,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(s) = env_seed {
        cfg.seed = s.trim().parse().with_context(|| {
            format!("OCTOPOT_SEED must be a 64-bit unsigned integer, got {s:?}")
        })?;
    }
    if let Some(path) = config_path {
        apply_file(&mut cfg, path)?;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = flags.samples {
        cfg.samples = v;
    }
    if let Some(v) = &flags.suite {
        cfg.suite = v.clone();
    }
    if let Some(v) = &flags.out {
        cfg.out = v.clone();
    }
    for (k, v) in &flags.gates {
        cfg.gates.insert(k.clone(), *v);
    }
    Ok(cfg)
}

/// Applies a key=value file: `seed`, `samples`, `suite`, `out`, and
/// `gate.<name>` keys; `#` starts a comment.
fn apply_file(cfg: &mut RunConfig, path: &Path) -> Result<()> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), idx + 1);
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}: expected key=value, got {line:?}", at());
        };
        let (k, v) = (k.trim(), v.trim());
        match k {
            "seed" => {
                cfg.seed = v
                    .parse()
                    .with_context(|| format!("{}: bad seed {v:?}", at()))?
            }
            "samples" => {
                cfg.samples = v
                    .parse()
                    .with_context(|| format!("{}: bad samples {v:?}", at()))?
            }
            "suite" => cfg.suite = v.to_string(),
            "out" => cfg.out = v.to_string(),
            _ => {
                if let Some(name) = k.strip_prefix("gate.") {
                    let g: f64 = v
                        .parse()
                        .with_context(|| format!("{}: bad gate value {v:?}", at()))?;
                    cfg.gates.insert(name.to_string(), g);
                } else {
                    bail!("{}: unknown key {k:?}", at());
                }
            }
        }
    }
    Ok(())
}

/// Parses a repeatable `--gate KEY=VALUE` flag.
pub fn parse_gate_flag(s: &str) -> Result<(String, f64), String> {
    let Some((k, v)) = s.split_once('=') else {
        return Err(format!("expected KEY=VALUE, got {s:?}"));
    };
    let g: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("gate value must be a number, got {v:?}"))?;
    Ok((k.trim().to_string(), g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn defaults_hold_without_any_source() {
        let cfg = resolve(&Overrides::default(), None, None).unwrap();
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.samples, octopot::quadrature::DEFAULT_SAMPLES);
        assert_eq!(cfg.out, "-");
        assert_eq!(cfg.suite, "all");
        assert!(cfg.gates.is_empty());
    }

    #[test]
    fn precedence_is_flags_over_file_over_env() {
        let f = file_with("seed = 5\nsamples=777\ngate.jets.ma_rel = 1e-7\n# comment\n");
        let env = Some("9");

        let cfg = resolve(&Overrides::default(), Some(f.path()), env).unwrap();
        assert_eq!(cfg.seed, 5, "file beats env");
        assert_eq!(cfg.samples, 777);
        assert_eq!(cfg.gates["jets.ma_rel"], 1e-7);

        let cfg = resolve(&Overrides::default(), None, env).unwrap();
        assert_eq!(cfg.seed, 9, "env beats default");

        let flags = Overrides {
            seed: Some(11),
            gates: vec![("jets.ma_rel".into(), 1e-6)],
            ..Overrides::default()
        };
        let cfg = resolve(&flags, Some(f.path()), env).unwrap();
        assert_eq!(cfg.seed, 11, "flag beats file");
        assert_eq!(cfg.gates["jets.ma_rel"], 1e-6, "flag gate beats file gate");
    }

    #[test]
    fn bad_config_lines_are_reported_with_location() {
        let f = file_with("seed 5\n");
        let err = resolve(&Overrides::default(), Some(f.path()), None)
            .unwrap_err()
            .to_string();
        assert!(err.contains(":1"), "{err}");

        let f = file_with("mystery = 3\n");
        let err = resolve(&Overrides::default(), Some(f.path()), None)
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown key"), "{err}");

        let err = resolve(&Overrides::default(), None, Some("not-a-number"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("OCTOPOT_SEED"), "{err}");
    }

    #[test]
    fn gate_flag_parses_key_value() {
        assert_eq!(
            parse_gate_flag("algebra.identity=1e-11").unwrap(),
            ("algebra.identity".to_string(), 1e-11)
        );
        assert!(parse_gate_flag("no-equals").is_err());
        assert!(parse_gate_flag("k=notafloat").is_err());
    }
}
