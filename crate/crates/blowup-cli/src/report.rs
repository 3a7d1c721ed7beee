use serde::Serialize;
use serde_json::Value;

/// One JSON document per invocation. Key order is fixed by the struct.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: &'static str,
    pub parameters: Value,
    pub results: Value,
    pub certificates: Vec<Value>,
    pub oracle_cross_checks: Vec<CrossCheck>,
    /// Always null so that output is byte-identical across runs; the
    /// elapsed time goes to the stderr summary instead.
    pub timing_ms: Option<u64>,
    pub tool_version: &'static str,
}

impl Report {
    pub fn new(command: &'static str, parameters: Value) -> Report {
        Report {
            command,
            parameters,
            results: Value::Null,
            certificates: vec![],
            oracle_cross_checks: vec![],
            timing_ms: None,
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossCheck {
    pub quantity: String,
    pub engine: Value,
    pub oracle: Value,
    pub agree: bool,
}

/// How a command ended, with the exit code it maps to.
#[derive(Debug)]
pub enum Outcome {
    /// Exit 0.
    Success(Report),
    /// Exit 2: a hypothesis does not hold; the report says which.
    Violation(Report, String),
    /// Exit 1: the report was produced but `--verify` found a mismatch.
    VerifyFailed(Report, String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success(_) => 0,
            Outcome::Violation(..) => 2,
            Outcome::VerifyFailed(..) => 1,
        }
    }

    pub fn report(&self) -> &Report {
        match self {
            Outcome::Success(r) | Outcome::Violation(r, _) | Outcome::VerifyFailed(r, _) => r,
        }
    }
}
