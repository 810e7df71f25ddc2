//! Numerical oracles: RK4 integration of both ODE forms, finite-difference
//! checks of the streamline identities on 2D fields, and the continuity
//! coefficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::dd::DoubleDouble;
use crate::field::{AffinePressure, GridSpec, Profiles, StreamlineGeometry, VelocityField};
use crate::flow::{riccati_rhs, AxialProfile, FlowParams};

/// `|u1|` above which integration is treated as running into a pole.
pub const BLOW_UP: f64 = 1e10;

/// A fixed-step numerical solution `s -> u1(s)` starting at `s = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `(s, u1)` with `s_k = k * step`, except a possibly shorter last step.
    pub samples: Vec<(f64, f64)>,
    pub step: f64,
    /// Where integration stopped because `|u1|` exceeded [`BLOW_UP`].
    pub truncated_at_pole: Option<f64>,
}

impl Trajectory {
    pub fn last_s(&self) -> f64 {
        self.samples.last().map_or(0.0, |p| p.0)
    }

    /// Interval that contains the pole behind a truncation. RK4 can step one
    /// node past a pole before `|u1|` crosses the threshold, so the bracket
    /// reaches back one step before the last finite sample.
    pub fn pole_bracket(&self) -> Option<(f64, f64)> {
        self.truncated_at_pole
            .map(|stop| ((self.last_s() - self.step).max(0.0), stop))
    }
}

fn check_span(s_end: f64, step: f64) -> Result<()> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive and finite, got {step}")));
    }
    if s_end < 0.0 || !s_end.is_finite() {
        return Err(Error::InvalidArgument(format!("s_end must be finite and >= 0, got {s_end}")));
    }
    Ok(())
}

/// Nodes `0, step, 2 step, ..., s_end`, where the last interval may be shorter.
fn nodes(s_end: f64, step: f64) -> impl Iterator<Item = f64> {
    let q = s_end / step;
    let full = q.round();
    let (n, tail) = if (q - full).abs() <= 1e-9 * q.max(1.0) {
        (full as usize, false)
    } else {
        (q.floor() as usize, true)
    };
    (1..=n)
        .map(move |k| if !tail && k == n { s_end } else { k as f64 * step })
        .chain(tail.then_some(s_end))
}

fn rk4_step<const N: usize>(f: &impl Fn(f64, [f64; N]) -> [f64; N], s: f64, y: [f64; N], h: f64) -> [f64; N] {
    let axpy = |y: [f64; N], k: [f64; N], c: f64| std::array::from_fn(|i| y[i] + c * k[i]);
    let k1 = f(s, y);
    let k2 = f(s + 0.5 * h, axpy(y, k1, 0.5 * h));
    let k3 = f(s + 0.5 * h, axpy(y, k2, 0.5 * h));
    let k4 = f(s + h, axpy(y, k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn integrate<const N: usize>(
    f: impl Fn(f64, [f64; N]) -> [f64; N],
    y0: [f64; N],
    s_end: f64,
    step: f64,
) -> Result<Trajectory> {
    check_span(s_end, step)?;
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("initial data must be finite".into()));
    }
    let mut samples = vec![(0.0, y0[0])];
    let (mut s, mut y) = (0.0, y0);
    let mut truncated_at_pole = None;
    for next in nodes(s_end, step) {
        let ny = rk4_step(&f, s, y, next - s);
        if !ny.iter().all(|v| v.is_finite()) || ny[0].abs() > BLOW_UP {
            truncated_at_pole = Some(next);
            break;
        }
        samples.push((next, ny[0]));
        (s, y) = (next, ny);
    }
    Ok(Trajectory {
        samples,
        step,
        truncated_at_pole,
    })
}

/// Classical RK4 on the integrated Riccati form from `u1(0) = u10`.
pub fn integrate_riccati(params: &FlowParams, c: f64, u10: f64, s_end: f64, step: f64) -> Result<Trajectory> {
    params.validate()?;
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
    }
    let p = *params;
    integrate(move |s, [u]| [riccati_rhs(&p, c, s, u)], [u10], s_end, step)
}

/// Classical RK4 on the second-order momentum form
/// `nu u'' = u u' + grad_term - f1` from `(u10, u1dot0)`.
pub fn integrate_second_order(
    params: &FlowParams,
    u10: f64,
    u1dot0: f64,
    s_end: f64,
    step: f64,
) -> Result<Trajectory> {
    params.validate()?;
    let p = *params;
    integrate(
        move |_, [u, w]| [w, (u * w - p.f1 + p.grad_term) / p.nu],
        [u10, u1dot0],
        s_end,
        step,
    )
}

/// Largest `|a - b|` over matching samples of two trajectories with the
/// same nodes.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| (p.1 - q.1).abs())
        .fold(0.0, f64::max)
}

/// `u1(s) = sum_k coefficients[k] s^k`; a synthetic profile that need not
/// solve the momentum equation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialProfile(pub Vec<f64>);

impl PolynomialProfile {
    fn eval(&self, s: f64, order: usize) -> f64 {
        self.0.iter().enumerate().skip(order).rev().fold(0.0, |acc, (k, c)| {
            let falling: usize = (k + 1 - order..=k).product();
            acc * s + falling as f64 * c
        })
    }
}

impl AxialProfile for PolynomialProfile {
    fn u1(&self, s: f64) -> Result<f64> {
        Ok(self.eval(s, 0))
    }
    fn u1_dot(&self, s: f64) -> Result<f64> {
        Ok(self.eval(s, 1))
    }
    fn u1_ddot(&self, s: f64) -> Result<f64> {
        Ok(self.eval(s, 2))
    }
}

/// Grid points at least `3h` inside the grid boundary.
fn interior_points(grid: &GridSpec, h: f64) -> Result<Vec<(f64, f64)>> {
    grid.validate()?;
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("h must be positive and finite, got {h}")));
    }
    let m = 3.0 * h;
    let pts: Vec<_> = grid
        .points()
        .filter(|&(x, y)| x - m >= grid.x_min && x + m <= grid.x_max && y - m >= grid.y_min && y + m <= grid.y_max)
        .collect();
    if pts.len() < 4 {
        return Err(Error::GridTooCoarse { interior: pts.len() });
    }
    Ok(pts)
}

/// Treat a pole anywhere in a stencil as "skip this point".
fn skip_poles<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Pole { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Max over interior grid points of
/// `|v1 dv1/dx + v2 dv1/dy - u1 u1'|`, with the left side by central
/// differences of step `h` and the right side from the analytic profile of
/// the streamline through the point.
pub fn check_prop1(field: &VelocityField, grid: &GridSpec, h: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (x, y) in interior_points(grid, h)? {
        let point = || -> Result<f64> {
            let v = field.velocity(x, y)?;
            let dx = (field.velocity(x + h, y)?.u1 - field.velocity(x - h, y)?.u1) / (2.0 * h);
            let dy = (field.velocity(x, y + h)?.u1 - field.velocity(x, y - h)?.u1) / (2.0 * h);
            let lhs = v.u1 * dx + v.u2 * dy;
            let y0 = field.family.offset_of(x, y);
            let rhs = field.with_streamline(y0, |p| -> Result<f64> { Ok(p.u1(x)? * p.u1_dot(x)?) })?;
            Ok((lhs - rhs).abs())
        };
        if let Some(e) = skip_poles(point())? {
            worst = worst.max(e);
        }
    }
    Ok(worst)
}

/// Max over interior grid points of `|lap v1 - u1''|` and `|lap p|`, both
/// Laplacians by the 5-point stencil of step `h`.
///
/// Needs one profile shared by every streamline (so that `v1 = u1(x)`) and
/// an attached pressure.
pub fn check_prop2_prop3(field: &VelocityField, grid: &GridSpec, h: f64) -> Result<(f64, f64)> {
    let Profiles::Shared(profile) = &field.profiles else {
        return Err(Error::InvalidArgument(
            "the Laplacian identity needs a single profile shared by all streamlines".into(),
        ));
    };
    let pressure = field
        .pressure
        .ok_or_else(|| Error::InvalidArgument("field carries no pressure".into()))?;
    let lap = |f: &dyn Fn(f64, f64) -> Result<f64>, x: f64, y: f64| -> Result<f64> {
        let c = f(x, y)?;
        Ok((f(x + h, y)? + f(x - h, y)? + f(x, y + h)? + f(x, y - h)? - 4.0 * c) / (h * h))
    };
    let (mut worst_v, mut worst_p) = (0.0_f64, 0.0_f64);
    for (x, y) in interior_points(grid, h)? {
        let v1 = |x: f64, y: f64| field.velocity(x, y).map(|v| v.u1);
        let point = || -> Result<f64> { Ok((lap(&v1, x, y)? - profile.u1_ddot(x)?).abs()) };
        if let Some(e) = skip_poles(point())? {
            worst_v = worst_v.max(e);
        }
        worst_p = worst_p.max(pressure_laplacian(&pressure, x, y, h).abs());
    }
    Ok((worst_v, worst_p))
}

/// 5-point Laplacian of the pressure, accumulated in double-double from the
/// nominal nodes `x +- h`, `y +- h` so that rounding stays far below the
/// stencil's own scale.
fn pressure_laplacian(p: &AffinePressure, x: f64, y: f64, h: f64) -> f64 {
    let at = |dx: f64, dy: f64| {
        let x = DoubleDouble::from_f64(x) + DoubleDouble::from_f64(dx);
        let y = DoubleDouble::from_f64(y) + DoubleDouble::from_f64(dy);
        p.at_dd(x, y)
    };
    let c = at(0.0, 0.0);
    let sum = at(h, 0.0) + at(-h, 0.0) + at(0.0, h) + at(0.0, -h) - c.mul_f64(4.0);
    sum.to_f64() / (h * h)
}

/// The coefficient `[phi2'' - (phi2'/phi1') phi1''] dg/dy` multiplying `u1`
/// in the streamline form of the continuity equation.
pub fn continuity_bracket(geometry: &impl StreamlineGeometry, y0: f64, s: f64) -> Result<f64> {
    let d1 = geometry.phi1_dot(s, y0);
    if d1 == 0.0 || !d1.is_finite() {
        return Err(Error::InvalidArgument(format!("phi1'({s}) = {d1}; streamline not parameterizable by s")));
    }
    let inner = geometry.phi2_ddot(s, y0) - geometry.phi2_dot(s, y0) / d1 * geometry.phi1_ddot(s, y0);
    Ok(inner * geometry.g_y(s, y0))
}
