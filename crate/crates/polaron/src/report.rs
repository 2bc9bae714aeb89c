//! Structured verification reports: one record per identity checked, with
//! sample counts, residuals and tolerances. Reports serialize to JSON and
//! are byte-reproducible for a fixed configuration and seed.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Name of the identity, e.g. "unitarity R(u)R21(-u) = zeta(u)".
    pub identity: String,
    /// Formula or construction the check traces back to.
    pub anchor: String,
    /// Number of sample points evaluated.
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvFingerprint {
    pub package: String,
    pub version: String,
    pub target: String,
}

impl EnvFingerprint {
    pub fn current() -> Self {
        EnvFingerprint {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            target: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    pub environment: EnvFingerprint,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        VerificationReport {
            schema: REPORT_SCHEMA,
            suite: suite.to_string(),
            seed,
            checks: Vec::new(),
            passed: true,
            environment: EnvFingerprint::current(),
        }
    }

    pub fn record(&mut self, identity: &str, anchor: &str, samples: usize, max_residual: f64, tolerance: f64) {
        let pass = max_residual <= tolerance && max_residual.is_finite();
        self.passed &= pass;
        self.checks.push(CheckRecord {
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            samples,
            max_residual,
            tolerance,
            pass,
        });
    }

    /// Record an informational (never-failing) measurement.
    pub fn note(&mut self, identity: &str, anchor: &str, samples: usize, value: f64) {
        self.checks.push(CheckRecord {
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            samples,
            max_residual: value,
            tolerance: f64::INFINITY,
            pass: true,
        });
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// One line per check, human-readable.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{status}] {suite}::{id}  residual {res:.3e} (tol {tol:.1e}, {n} samples)\n",
                suite = self.suite,
                id = c.identity,
                res = c.max_residual,
                tol = c.tolerance,
                n = c.samples
            ));
        }
        out
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.passed &= other.passed;
        self.checks.extend(other.checks);
    }
}
