mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Verification and computation harness for octonionic pluripotential
/// fields. Reports are JSON lines: a timestamp line, the resolved
/// configuration, then one line per check or result.
#[derive(Parser)]
#[command(name = "octopot", version)]
struct Cli {
    /// RNG seed (also settable via OCTOPOT_SEED or the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo sample budget.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Suite used by `verify` when no positional suite is given.
    #[arg(long, global = true)]
    suite: Option<String>,

    /// Report destination; "-" writes to stdout.
    #[arg(long, global = true)]
    out: Option<String>,

    /// key=value config file (keys: seed, samples, suite, out, gate.<name>).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Tolerance override, repeatable, e.g. --gate jets.ma_rel=1e-7.
    #[arg(long = "gate", value_name = "KEY=VALUE", value_parser = config::parse_gate_flag, global = true)]
    gates: Vec<(String, f64)>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite; one JSON line per check; exit 0 iff all
    /// gates pass.
    Verify {
        /// One of: algebra, hermitian, jets, geometry, ibp, comparison,
        /// lelong, capacity, perron, all.
        suite: Option<String>,
    },
    /// Run a computation and emit a JSON report, optionally a CSV table.
    #[command(subcommand)]
    Compute(ComputeCmd),
}

#[derive(Subcommand)]
enum ComputeCmd {
    /// Capacity of the condenser (closed ball r, ball R) at the origin,
    /// by a smoothing sweep extrapolated to zero width.
    Capacity {
        /// Inner radius.
        #[arg(long)]
        r: f64,
        /// Outer radius.
        #[arg(long = "R")]
        big_r: f64,
        /// Smoothing widths for the sweep; defaults to 0.02, 0.01, 0.005.
        #[arg(long, value_name = "DELTA")]
        delta: Vec<f64>,
        /// Write the sweep table as CSV (columns delta, capacity, stderr).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Mass density of a field's octonionic Hessian at a center: the
    /// normalized sphere masses over an r-grid and their extrapolated
    /// density at the center.
    Lelong {
        /// "fundamental", "sq_norm", or a field expression.
        #[arg(long)]
        field: String,
        /// Center: "0" or 16 comma-separated coordinates.
        #[arg(long, default_value = "0")]
        center: String,
        /// Smoothing parameters; defaults to 0.01 and 0.001, extrapolated
        /// to zero when several are given.
        #[arg(long, value_name = "EPS")]
        eps: Vec<f64>,
        /// Write the curves as CSV (columns eps, r, sigma_over_r8, stderr).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Perron bracket for boundary data on the unit sphere, evaluated at
    /// an interior point: certified lower envelope vs harmonic majorant.
    Perron {
        /// Boundary field expression, e.g. "const 1" or "coord 0".
        #[arg(long)]
        phi: String,
        /// Evaluation point: "0" or 16 comma-separated coordinates.
        #[arg(long, default_value = "0")]
        at: String,
        /// Number of barrier feet sampled on the boundary.
        #[arg(long, default_value_t = 64)]
        feet: usize,
        /// Certified bound on the boundary data's second-order variation
        /// along the sphere (0 is valid for constant or linear data).
        #[arg(long, default_value_t = 0.0)]
        c2_bound: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match commands::run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}
