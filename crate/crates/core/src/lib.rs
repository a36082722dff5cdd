//! Singular one-input linear control systems on the plane coset space of the
//! 3-d Heisenberg group.
//!
//! The crate covers the pipeline end to end: exact group/flow arithmetic
//! ([`heisenberg`]), projection of an invariant pair onto the plane and its
//! case classification and normal forms ([`system`]), closed-form constant
//! control solutions and auxiliary functionals ([`flows`]), analytic
//! control-set predicates ([`control_sets`]), a brute-force grid reachability
//! oracle ([`reach`]), and constructive steering ([`planner`]).

pub mod control_sets;
pub mod flows;
pub mod grid;
pub mod heisenberg;
pub mod mat2;
pub mod planner;
pub mod reach;
pub mod system;

use thiserror::Error as ThisError;

/// Error type shared across the crate.
#[derive(Debug, Clone, ThisError, PartialEq)]
pub enum Error {
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("subgroup is not invariant under the flow")]
    NotInvariant,
    #[error("rank condition fails for these parameters")]
    LarcViolated,
    #[error("operation is not available for case {0:?}")]
    UnsupportedCase(system::CaseTag),
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("no admissible sigma exists for this control range")]
    NoValidSigma,
    #[error("grid window too coarse; at least 20x20 cells are required")]
    WindowTooCoarse,
    #[error("point is not in the control set")]
    NotInControlSet,
    #[error("steering precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("root bracketing failed: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Format a float with 17 significant digits, enough to round-trip f64.
/// Negative zero is folded into zero for stable text output.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.16e}", x)
}
