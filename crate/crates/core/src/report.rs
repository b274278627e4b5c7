//! Machine-readable check lines shared by the verification suites and the
//! command-line harness.

use serde::Serialize;

/// One verification check: a measured value against its gate. `pass` is
/// computed by the constructor that knows the gate's sense; the JSON record
/// keeps a stable field order for byte-reproducible reports.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    /// Slash-separated check path, e.g. `algebra/norm_mult`.
    pub check: String,
    /// Compact digest of the inputs that produced the value.
    pub inputs: String,
    pub value: f64,
    pub stderr: f64,
    pub gate: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(
        check: impl Into<String>,
        inputs: impl Into<String>,
        value: f64,
        stderr: f64,
        gate: f64,
        pass: bool,
    ) -> Self {
        CheckLine {
            check: check.into(),
            inputs: inputs.into(),
            value,
            stderr,
            gate,
            pass,
        }
    }

    /// Two-sided magnitude gate: |value| <= gate.
    pub fn abs(check: impl Into<String>, inputs: impl Into<String>, value: f64, gate: f64) -> Self {
        let pass = value.abs() <= gate;
        Self::new(check, inputs, value, 0.0, gate, pass)
    }

    /// Statistical gate: |value| <= k * stderr.
    pub fn sigma(
        check: impl Into<String>,
        inputs: impl Into<String>,
        value: f64,
        stderr: f64,
        k: f64,
    ) -> Self {
        let gate = k * stderr;
        let pass = value.abs() <= gate;
        Self::new(check, inputs, value, stderr, gate, pass)
    }

    /// One-sided floor: value >= -gate (violations are negative).
    pub fn floor(
        check: impl Into<String>,
        inputs: impl Into<String>,
        value: f64,
        gate: f64,
    ) -> Self {
        let pass = value >= -gate;
        Self::new(check, inputs, value, 0.0, gate, pass)
    }

    /// Boolean check rendered as value 1 (pass) / 0 (fail).
    pub fn flag(check: impl Into<String>, inputs: impl Into<String>, ok: bool) -> Self {
        Self::new(check, inputs, if ok { 1.0 } else { 0.0 }, 0.0, 0.5, ok)
    }
}

/// True when every line passes.
pub fn all_pass(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.pass)
}
