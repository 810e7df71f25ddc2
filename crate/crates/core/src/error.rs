use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Bi overflows the double range at t = {t}")]
    Overflow { t: f64 },

    #[error("invalid flow parameters: {0}")]
    InvalidParams(String),

    /// `a > 0`: the Airy solution only has physical meaning for `a < 0`.
    #[error("model invalid: a = {a} but the Airy solution requires a < 0 (grad_term - f1 < 0)")]
    ModelInvalid { a: f64 },

    /// `a = 0`: the construction divides by `(-a)^(2/3)`.
    #[error("degenerate model: a = 0 (grad_term == f1); the Airy solution requires a < 0")]
    DegenerateModel,

    #[error("pole of the exact solution at s = {s}{}", nearest_suffix(*.nearest))]
    Pole { s: f64, nearest: Option<f64> },

    #[error("degenerate coefficient system: {0}")]
    Degenerate(String),

    #[error(
        "no sign change of the endpoint residual in the c bracket (residual at c_lo: {}, at c_hi: {})",
        fmt_opt(*.lo_residual), fmt_opt(*.hi_residual)
    )]
    NoSignChange {
        lo_residual: Option<f64>,
        hi_residual: Option<f64>,
    },

    #[error("every candidate c in the bracket puts a pole inside (0, L) ({excluded} candidates excluded)")]
    PoleCrossing { excluded: usize },

    #[error("grid too coarse: {interior} interior points, need at least 4")]
    GridTooCoarse { interior: usize },

    #[error("grid outside domain: {0}")]
    GridOutsideDomain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn nearest_suffix(nearest: Option<f64>) -> String {
    match nearest {
        Some(p) => format!(" (nearest zero of z at s = {p})"),
        None => String::new(),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "undefined (pole in span)".to_string(),
    }
}
