//! Fitting the integration constants `(c, c1, c2)` to data.
//!
//! `u1` depends on `(c1, c2)` only through their ratio, so a solution has two
//! degrees of freedom: `c` and that ratio. Two well-posed modes are offered:
//!
//! * IVP mode ([`solve_ivp`]): `u1(0)` and `u1'(0)` fix `c` through the
//!   Riccati equation at `s = 0`, then `u1(0)` fixes the ratio. `u1(L)` is an
//!   output.
//! * BVP mode ([`solve_bvp`]): `u1(0)` and `u1(L)` are imposed by shooting on
//!   `c`. `u1'(0)` is an output, recoverable from `c`.

use serde::{Deserialize, Serialize};

use crate::airy::airy_eval;
use crate::error::{Error, Result};
use crate::flow::{
    derive_constants, exact_u1, find_poles, normalize_coefficients, FlowParams, RiccatiConstants,
    SolutionConstants,
};
use crate::roots;

/// Number of candidate `c` values sampled across the shooting bracket.
pub const BVP_SCAN_POINTS: usize = 256;

const C_BISECT_TOL: f64 = 1e-15;

/// Relative accuracy with which fitted coefficients must reproduce `u1(0)`.
const REPRODUCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub u10: f64,
    pub u1dot0: f64,
    pub u1l: Option<f64>,
}

/// `c = nu u1'(0) - u1(0)^2 / 2`.
pub fn c_from_initial(u10: f64, u1dot0: f64, nu: f64) -> f64 {
    nu * u1dot0 - 0.5 * u10 * u10
}

/// `u1'(0)` implied by `c`; the inverse of [`c_from_initial`].
pub fn u1dot0_from_c(c: f64, u10: f64, nu: f64) -> f64 {
    (c + 0.5 * u10 * u10) / nu
}

/// Normalized `(c1, c2)` that make `u1(0) = u10` for the given `(a, b, c)`.
///
/// `u1(0) = u10` is the single homogeneous equation `c1 A + c2 B = 0` with
/// `A = -2 nu (-a)^(1/3) Ai'(t0) - u10 Ai(t0)` and likewise for `B` with Bi;
/// the returned pair is `(-B, A)` normalized.
pub fn coefficients_from_u0(u10: f64, params: &FlowParams, consts: &RiccatiConstants) -> Result<(f64, f64)> {
    if !u10.is_finite() {
        return Err(Error::InvalidArgument(format!("u10 must be finite, got {u10}")));
    }
    let q = airy_eval(consts.t_at(0.0))?;
    let k = -2.0 * params.nu * (-consts.a).cbrt();
    let bracket_ai = k * q.ai_prime - u10 * q.ai;
    let bracket_bi = k * q.bi_prime - u10 * q.bi;
    if bracket_ai.abs() < 1e-300 && bracket_bi.abs() < 1e-300 {
        return Err(Error::Degenerate(format!(
            "both coefficient brackets vanish at t0 = {}",
            q.t
        )));
    }
    let (c1, c2) = normalize_coefficients(-bracket_bi, bracket_ai)?;
    // far out on the positive axis c2/c1 ~ Ai/Bi can underflow, leaving
    // constants that no longer carry u10
    let z = c1 * q.ai + c2 * q.bi;
    let u0 = k * (c1 * q.ai_prime + c2 * q.bi_prime) / z;
    let miss = (u0 - u10).abs();
    if miss.is_nan() || miss > REPRODUCE_TOL * (1.0 + u10.abs()) {
        return Err(Error::Degenerate(format!(
            "coefficients ({c1:e}, {c2:e}) at t0 = {} reproduce u1(0) = {u0}, not {u10}",
            q.t
        )));
    }
    Ok((c1, c2))
}

/// IVP mode: constants reproducing `u1(0) = u10` and `u1'(0) = u1dot0`.
pub fn solve_ivp(data: &InitialData, params: &FlowParams) -> Result<SolutionConstants> {
    params.validate()?;
    if !data.u10.is_finite() || !data.u1dot0.is_finite() {
        return Err(Error::InvalidArgument("initial data must be finite".into()));
    }
    let c = c_from_initial(data.u10, data.u1dot0, params.nu);
    let riccati = derive_constants(params, c)?;
    let (c1, c2) = coefficients_from_u0(data.u10, params, &riccati)?;
    let consts = riccati.with_coefficients(c1, c2)?;
    match exact_u1(0.0, params, &consts) {
        Err(Error::Pole { .. }) => Err(Error::Pole {
            s: 0.0,
            nearest: Some(0.0),
        }),
        Err(e) => Err(e),
        Ok(_) => Ok(consts),
    }
}

/// Default shooting bracket `(-10 nu V^2, 10 nu V^2)`, `V = max(|u10|, |u1L|, 1)`.
pub fn default_c_bracket(u10: f64, u1l: f64, nu: f64) -> (f64, f64) {
    let v = u10.abs().max(u1l.abs()).max(1.0);
    let half = 10.0 * nu * v * v;
    (-half, half)
}

/// Outcome of [`solve_bvp`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpSolution {
    /// Constants for the selected root (smallest `|c|`).
    pub constants: SolutionConstants,
    /// `u1'(0)` implied by the selected `c`.
    pub u1dot0: f64,
    /// `u1(L) - u1L` at the selected root.
    pub residual: f64,
    /// Every root found in the bracket, ascending.
    pub roots: Vec<f64>,
    /// Scan candidates dropped because `z` has a zero in `[0, L]`.
    pub excluded: usize,
}

/// Endpoint residual `u1(L) - u1L` of the IVP-style solution with
/// `u1(0) = u10` and constant `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Endpoint {
    Value(f64),
    /// `z` vanishes somewhere in `[0, L]`.
    Pole,
    /// The constants cannot be formed in double precision.
    Unavailable,
}

impl Endpoint {
    /// Ordering value for bracketing. Raising `c` raises `u1` pointwise
    /// (the Riccati right side increases with `c`), so the pole-free `c`
    /// form a half-line below some `c*` and `u1(L) -> +inf` as `c -> c*`.
    /// A pole candidate therefore counts as `+inf`.
    fn signed(self) -> f64 {
        match self {
            Self::Value(r) => r,
            Self::Pole => f64::INFINITY,
            Self::Unavailable => f64::NAN,
        }
    }
}

fn endpoint_residual(u10: f64, u1l: f64, params: &FlowParams, c: f64) -> Endpoint {
    let Ok(consts) = ivp_constants_for_c(u10, params, c) else {
        return Endpoint::Unavailable;
    };
    if !find_poles(&consts, 0.0, params.length).is_empty() {
        return Endpoint::Pole;
    }
    match exact_u1(params.length, params, &consts) {
        Ok(u) => Endpoint::Value(u - u1l),
        Err(Error::Pole { .. }) => Endpoint::Pole,
        Err(_) => Endpoint::Unavailable,
    }
}

fn ivp_constants_for_c(u10: f64, params: &FlowParams, c: f64) -> Result<SolutionConstants> {
    let riccati = derive_constants(params, c)?;
    let (c1, c2) = coefficients_from_u0(u10, params, &riccati)?;
    riccati.with_coefficients(c1, c2)
}

/// BVP mode: find `c` in `c_bracket` such that the solution with
/// `u1(0) = u10` reaches `u1(L) = u1l`.
///
/// The bracket is scanned at [`BVP_SCAN_POINTS`] points. Each sign change of
/// the endpoint residual between pole-free neighbours is refined by
/// bisection, as is a negative residual followed by a candidate with a pole
/// (the residual tends to `+inf` at that edge). When several roots exist the one with smallest `|c|` is
/// selected; all are reported.
pub fn solve_bvp(
    u10: f64,
    u1l: f64,
    params: &FlowParams,
    c_bracket: Option<(f64, f64)>,
) -> Result<BvpSolution> {
    params.validate()?;
    if !u10.is_finite() || !u1l.is_finite() {
        return Err(Error::InvalidArgument("boundary data must be finite".into()));
    }
    // a does not depend on c; reject invalid models before scanning
    derive_constants(params, 0.0)?;

    let (c_lo, c_hi) = c_bracket.unwrap_or_else(|| default_c_bracket(u10, u1l, params.nu));
    if c_lo >= c_hi || !c_lo.is_finite() || !c_hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "c bracket must satisfy c_lo < c_hi with finite ends, got ({c_lo}, {c_hi})"
        )));
    }

    let last = (BVP_SCAN_POINTS - 1) as f64;
    let candidates: Vec<f64> = (0..BVP_SCAN_POINTS)
        .map(|i| {
            if i == BVP_SCAN_POINTS - 1 {
                c_hi
            } else {
                c_lo + (c_hi - c_lo) * (i as f64 / last)
            }
        })
        .collect();
    let residuals: Vec<Endpoint> = candidates
        .iter()
        .map(|&c| endpoint_residual(u10, u1l, params, c))
        .collect();

    let excluded = residuals.iter().filter(|r| !matches!(r, Endpoint::Value(_))).count();
    if excluded == residuals.len() {
        return Err(Error::PoleCrossing { excluded });
    }

    let residual_at = |c: f64| endpoint_residual(u10, u1l, params, c).signed();
    let mut roots = Vec::new();
    for (i, pair) in residuals.windows(2).enumerate() {
        if pair[0] == Endpoint::Value(0.0) {
            roots.push(candidates[i]);
            continue;
        }
        let bracketed = match (pair[0], pair[1]) {
            (Endpoint::Value(r), Endpoint::Value(next)) => next != 0.0 && r.signum() != next.signum(),
            (Endpoint::Value(r), Endpoint::Pole) => r < 0.0,
            _ => false,
        };
        if !bracketed {
            continue;
        }
        if let Some(c) = roots::bisect(residual_at, candidates[i], candidates[i + 1], C_BISECT_TOL) {
            if let Endpoint::Value(_) = endpoint_residual(u10, u1l, params, c) {
                roots.push(c);
            }
        }
    }
    if residuals[residuals.len() - 1] == Endpoint::Value(0.0) {
        roots.push(c_hi);
    }

    if roots.is_empty() {
        let value = |e: Endpoint| match e {
            Endpoint::Value(r) => Some(r),
            _ => None,
        };
        return Err(Error::NoSignChange {
            lo_residual: value(residuals[0]),
            hi_residual: value(residuals[residuals.len() - 1]),
        });
    }
    roots.sort_by(f64::total_cmp);
    let c = *roots
        .iter()
        .min_by(|p, q| p.abs().total_cmp(&q.abs()))
        .expect("roots is non-empty");
    let constants = ivp_constants_for_c(u10, params, c)?;
    let residual = exact_u1(params.length, params, &constants)? - u1l;
    Ok(BvpSolution {
        constants,
        u1dot0: u1dot0_from_c(c, u10, params.nu),
        residual,
        roots,
        excluded,
    })
}
