//! Flat JSON configuration: the seven system scalars plus the control range,
//! with optional window/grid keys. Unknown keys are rejected to catch typos.

use hlcs_core::grid::GridWindow;
use hlcs_core::system::{ControlRange, SystemParams};
use serde_json::Value;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub range: ControlRange,
    pub window: GridWindow,
    pub grid_h: f64,
    pub dt: f64,
    pub n_controls: usize,
    pub sample_step: f64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

pub fn from_core(err: hlcs_core::Error) -> CliError {
    use hlcs_core::Error::*;
    let code = match err {
        Constraint(_) => "ConstraintError",
        NotInvariant => "NotInvariant",
        LarcViolated => "LarcViolated",
        UnsupportedCase(_) => "UnsupportedCase",
        Domain(_) => "DomainError",
        NoValidSigma => "NoValidSigma",
        WindowTooCoarse => "WindowTooCoarse",
        NotInControlSet => "NotInControlSet",
        PreconditionViolated(_) => "PreconditionViolated",
        BracketFailure(_) => "BracketFailure",
    };
    CliError::new(code, err.to_string())
}

const REQUIRED: [&str; 9] = [
    "a", "b", "c", "alpha", "beta", "gamma", "lambda", "omega_minus", "omega_plus",
];
const OPTIONAL: [&str; 8] = [
    "s_min", "s_max", "t_min", "t_max", "grid_h", "dt", "n_controls", "sample_step",
];

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::new("ParseError", format!("malformed JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::new("ParseError", "top level must be a JSON object"))?;

    for key in obj.keys() {
        if !REQUIRED.contains(&key.as_str()) && !OPTIONAL.contains(&key.as_str()) {
            return Err(CliError::new("ParseError", format!("unknown key `{key}`")));
        }
    }
    let num = |key: &str| -> Result<f64, CliError> {
        obj.get(key)
            .ok_or_else(|| CliError::new("ParseError", format!("missing key `{key}`")))?
            .as_f64()
            .ok_or_else(|| CliError::new("ParseError", format!("key `{key}` must be a number")))
    };
    let opt = |key: &str, default: f64| -> Result<f64, CliError> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::new("ParseError", format!("key `{key}` must be a number"))),
        }
    };

    let params = SystemParams::new(
        num("a")?,
        num("b")?,
        num("c")?,
        num("alpha")?,
        num("beta")?,
        num("gamma")?,
        num("lambda")?,
    )
    .map_err(from_core)?;
    let range = ControlRange::new(num("omega_minus")?, num("omega_plus")?).map_err(from_core)?;

    let grid_h = opt("grid_h", 0.05)?;
    let window = GridWindow::new(
        opt("s_min", -5.0)?,
        opt("s_max", 5.0)?,
        opt("t_min", -5.0)?,
        opt("t_max", 5.0)?,
        grid_h,
    )
    .map_err(from_core)?;

    Ok(RunConfig {
        params,
        range,
        window,
        grid_h,
        dt: opt("dt", 0.1)?,
        n_controls: opt("n_controls", 5.0)? as usize,
        sample_step: opt("sample_step", 0.05)?,
    })
}

/// Round-trip serialization of the core of the config.
#[cfg_attr(not(test), allow(dead_code))]
pub fn config_json(cfg: &RunConfig) -> String {
    let f = hlcs_core::fmt_f64;
    format!(
        "{{\"a\":{},\"b\":{},\"c\":{},\"alpha\":{},\"beta\":{},\"gamma\":{},\"lambda\":{},\"omega_minus\":{},\"omega_plus\":{}}}",
        f(cfg.params.a),
        f(cfg.params.b),
        f(cfg.params.c),
        f(cfg.params.alpha),
        f(cfg.params.beta),
        f(cfg.params.gamma),
        f(cfg.params.lambda),
        f(cfg.range.omega_minus),
        f(cfg.range.omega_plus),
    )
}
