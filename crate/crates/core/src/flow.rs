//! Per-streamline flow model and its closed-form solution.
//!
//! Along a streamline parameterized by `x = s`, the axial velocity satisfies
//! the integrated Riccati equation
//!
//! ```text
//! u1' = u1^2 / (2 nu) + (grad_term - f1) s / nu + c / nu
//! ```
//!
//! and the substitution `u1 = -2 nu z'/z` linearizes it to an Airy-type
//! equation with general solution `z(s) = c1 Ai(t(s)) + c2 Bi(t(s))`, where
//!
//! ```text
//! a = (grad_term - f1) / (2 nu^2),   b = c / (2 nu^2),   t = -(a s + b) / (-a)^(2/3)
//! ```
//!
//! Since `dt/ds = (-a)^(1/3)`, the velocity is
//! `u1 = -2 nu (-a)^(1/3) (c1 Ai'(t) + c2 Bi'(t)) / (c1 Ai(t) + c2 Bi(t))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::airy::airy_eval;
use crate::error::{Error, Result};
use crate::roots;

/// `|z| <= POLE_REL_TOL * (|c1 Ai| + |c2 Bi| + 1e-300)` counts as a pole.
pub const POLE_REL_TOL: f64 = 1e-13;

/// A point whose Newton distance `|z / z'|` to the nearest zero of `z` is at
/// most `POLE_DIST_TOL * (1 + |s|)` also counts as a pole. This catches poles
/// of single-function mixtures (`c1 = 0` or `c2 = 0`), where no cancellation
/// occurs. Pole positions are refined to the same tolerance.
pub const POLE_DIST_TOL: f64 = 1e-12;

/// Physical constants along one streamline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    /// Kinematic viscosity, `nu > 0`.
    pub nu: f64,
    /// The constant `q'/rho` along the streamline.
    pub grad_term: f64,
    /// Axial body force per unit mass.
    pub f1: f64,
    /// Extent `L` of the domain `s in [0, L]`.
    pub length: f64,
}

impl FlowParams {
    pub fn new(nu: f64, grad_term: f64, f1: f64, length: f64) -> Result<Self> {
        let p = Self {
            nu,
            grad_term,
            f1,
            length,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("nu", self.nu),
            ("grad_term", self.grad_term),
            ("f1", self.f1),
            ("length", self.length),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if self.nu <= 0.0 {
            return Err(Error::InvalidParams(format!("nu must be positive, got {}", self.nu)));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "length must be positive, got {}",
                self.length
            )));
        }
        Ok(())
    }

    /// `grad_term - f1 < 0`, the condition for the Airy solution to apply.
    pub fn is_physical(&self) -> bool {
        self.grad_term - self.f1 < 0.0
    }

    /// `a = (grad_term - f1) / (2 nu^2)`.
    pub fn a(&self) -> f64 {
        (self.grad_term - self.f1) / (2.0 * self.nu * self.nu)
    }
}

/// The constants fixed by the Riccati equation alone: `a`, `b` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RiccatiConstants {
    /// `t(s) = -(a s + b) / (-a)^(2/3)`.
    pub fn t_at(&self, s: f64) -> f64 {
        t_of(self.a, self.b, s)
    }

    /// Attach Airy coefficients, normalized to unit norm with the first nonzero
    /// component positive.
    pub fn with_coefficients(&self, c1: f64, c2: f64) -> Result<SolutionConstants> {
        SolutionConstants::new(self.a, self.b, self.c, c1, c2)
    }
}

fn t_of(a: f64, b: f64, s: f64) -> f64 {
    let cube_root = (-a).cbrt();
    -(a * s + b) / (cube_root * cube_root)
}

/// Normalize `(c1, c2)`: unit Euclidean norm, first nonzero component positive.
pub fn normalize_coefficients(c1: f64, c2: f64) -> Result<(f64, f64)> {
    if !c1.is_finite() || !c2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Airy coefficients must be finite, got ({c1}, {c2})"
        )));
    }
    let norm = c1.hypot(c2);
    if norm == 0.0 {
        return Err(Error::InvalidArgument("Airy coefficients (c1, c2) must not both vanish".into()));
    }
    let (mut n1, mut n2) = (c1 / norm, c2 / norm);
    let lead = if n1 != 0.0 { n1 } else { n2 };
    if lead < 0.0 {
        n1 = -n1;
        n2 = -n2;
    }
    // -0.0 would otherwise survive the sign flip
    Ok((n1 + 0.0, n2 + 0.0))
}

/// One exact solution: `(a, b, c)` plus the normalized Airy mixture `(c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionConstants {
    a: f64,
    b: f64,
    c: f64,
    c1: f64,
    c2: f64,
}

impl SolutionConstants {
    /// Requires `a < 0` and finite values; `(c1, c2)` is normalized.
    pub fn new(a: f64, b: f64, c: f64, c1: f64, c2: f64) -> Result<Self> {
        check_a(a)?;
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("b and c must be finite, got b = {b}, c = {c}")));
        }
        let (c1, c2) = normalize_coefficients(c1, c2)?;
        Ok(Self { a, b, c, c1, c2 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn riccati(&self) -> RiccatiConstants {
        RiccatiConstants {
            a: self.a,
            b: self.b,
            c: self.c,
        }
    }
}

fn check_a(a: f64) -> Result<()> {
    if a.is_nan() {
        return Err(Error::InvalidArgument("a is NaN".into()));
    }
    if a == 0.0 {
        return Err(Error::DegenerateModel);
    }
    if a > 0.0 {
        return Err(Error::ModelInvalid { a });
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!("a must be finite, got {a}")));
    }
    Ok(())
}

/// `a = (grad_term - f1)/(2 nu^2)` and `b = c/(2 nu^2)`.
pub fn derive_constants(params: &FlowParams, c: f64) -> Result<RiccatiConstants> {
    params.validate()?;
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
    }
    let a = params.a();
    check_a(a)?;
    let b = c / (2.0 * params.nu * params.nu);
    Ok(RiccatiConstants { a, b, c })
}

pub fn map_t(s: f64, consts: &SolutionConstants) -> f64 {
    t_of(consts.a, consts.b, s)
}

/// `z(s) = c1 Ai(t(s)) + c2 Bi(t(s))`.
pub fn denominator_z(s: f64, consts: &SolutionConstants) -> Result<f64> {
    let q = airy_eval(map_t(s, consts))?;
    Ok(consts.c1 * q.ai + consts.c2 * q.bi)
}

/// The closed-form axial velocity `u1(s)`.
///
/// Fails with [`Error::Pole`] where `z(s)` vanishes to within the relative
/// cancellation tolerance [`POLE_REL_TOL`] or the distance tolerance
/// [`POLE_DIST_TOL`].
pub fn exact_u1(s: f64, params: &FlowParams, consts: &SolutionConstants) -> Result<f64> {
    let q = airy_eval(map_t(s, consts))?;
    let za = consts.c1 * q.ai;
    let zb = consts.c2 * q.bi;
    let z = za + zb;
    let rate = (-consts.a).cbrt();
    let z_prime = rate * (consts.c1 * q.ai_prime + consts.c2 * q.bi_prime);
    if z.abs() <= POLE_REL_TOL * (za.abs() + zb.abs() + 1e-300)
        || z.abs() <= POLE_DIST_TOL * (1.0 + s.abs()) * z_prime.abs()
    {
        return Err(Error::Pole {
            s,
            nearest: nearest_pole(s, consts),
        });
    }
    Ok(-2.0 * params.nu * z_prime / z)
}

/// `u1'(s)` from the Riccati equation evaluated at the exact `u1(s)`.
pub fn exact_u1_derivative(s: f64, params: &FlowParams, consts: &SolutionConstants) -> Result<f64> {
    let u1 = exact_u1(s, params, consts)?;
    Ok(riccati_rhs(params, consts.c, s, u1))
}

/// `u1''(s)`, by differentiating the Riccati equation once more:
/// `nu u1'' = u1 u1' + grad_term - f1`.
pub fn exact_u1_second_derivative(s: f64, params: &FlowParams, consts: &SolutionConstants) -> Result<f64> {
    let u1 = exact_u1(s, params, consts)?;
    let du = riccati_rhs(params, consts.c, s, u1);
    Ok((u1 * du + params.grad_term - params.f1) / params.nu)
}

/// Right-hand side of the integrated Riccati equation.
pub fn riccati_rhs(params: &FlowParams, c: f64, s: f64, u1: f64) -> f64 {
    u1 * u1 / (2.0 * params.nu) + (params.grad_term - params.f1) * s / params.nu + c / params.nu
}

/// Scan step for pole search: one quarter of the asymptotic Airy half-period
/// `pi |a|^(-1/3)`, capped at 0.05.
pub fn pole_scan_step(a: f64) -> f64 {
    (0.25 * PI * a.abs().powf(-1.0 / 3.0)).min(0.05)
}

/// All zeros of `z(s)` on `[s_lo, s_hi]`, ascending.
pub fn find_poles(consts: &SolutionConstants, s_lo: f64, s_hi: f64) -> Vec<f64> {
    if s_lo >= s_hi || !s_lo.is_finite() || !s_hi.is_finite() {
        return Vec::new();
    }
    let z = |s: f64| denominator_z(s, consts).ok();
    roots::scan_sign_changes(z, s_lo, s_hi, pole_scan_step(consts.a))
        .into_iter()
        .filter_map(|(lo, hi)| {
            if lo == hi {
                return Some(lo);
            }
            roots::bisect(|s| z(s).unwrap_or(f64::NAN), lo, hi, POLE_DIST_TOL)
        })
        .collect()
}

fn nearest_pole(s: f64, consts: &SolutionConstants) -> Option<f64> {
    let w = 2.0 * pole_scan_step(consts.a);
    find_poles(consts, s - w, s + w)
        .into_iter()
        .min_by(|p, q| (p - s).abs().total_cmp(&(q - s).abs()))
}

/// A velocity profile `s -> u1(s)` along one streamline, with analytic
/// derivatives.
pub trait AxialProfile: Send + Sync {
    fn u1(&self, s: f64) -> Result<f64>;
    fn u1_dot(&self, s: f64) -> Result<f64>;
    fn u1_ddot(&self, s: f64) -> Result<f64>;
}

/// The closed-form Airy profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactProfile {
    pub params: FlowParams,
    pub consts: SolutionConstants,
}

impl AxialProfile for ExactProfile {
    fn u1(&self, s: f64) -> Result<f64> {
        exact_u1(s, &self.params, &self.consts)
    }
    fn u1_dot(&self, s: f64) -> Result<f64> {
        exact_u1_derivative(s, &self.params, &self.consts)
    }
    fn u1_ddot(&self, s: f64) -> Result<f64> {
        exact_u1_second_derivative(s, &self.params, &self.consts)
    }
}
