//! Streamline families, 2D velocity-field reconstruction and field I/O.
//!
//! Families are vertical translates `phi2(s; y0) = y0 + psi(s)` with
//! `phi1(s) = s`, so the streamline through `(x, y)` has offset
//! `y0 = y - psi(x)` and parameter `s = g(x, y) = x`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::flow::{AxialProfile, ExactProfile, FlowParams, SolutionConstants};

pub const CSV_HEADER: &str = "s,x,y,u1,u2,valid";

/// Shape `psi(s)` shared by every streamline of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamlineFamily {
    Straight { slope: f64 },
    Sinusoidal { amplitude: f64, wavenumber: f64 },
    /// `psi(s) = sum_k coefficients[k] s^k`
    Polynomial { coefficients: Vec<f64> },
}

impl StreamlineFamily {
    pub fn psi(&self, s: f64) -> f64 {
        match self {
            Self::Straight { slope } => slope * s,
            Self::Sinusoidal {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * s).sin(),
            Self::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c),
        }
    }

    pub fn psi_dot(&self, s: f64) -> f64 {
        match self {
            Self::Straight { slope } => *slope,
            Self::Sinusoidal {
                amplitude,
                wavenumber,
            } => amplitude * wavenumber * (wavenumber * s).cos(),
            Self::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * s + k as f64 * c),
        }
    }

    pub fn psi_ddot(&self, s: f64) -> f64 {
        match self {
            Self::Straight { .. } => 0.0,
            Self::Sinusoidal {
                amplitude,
                wavenumber,
            } => -amplitude * wavenumber * wavenumber * (wavenumber * s).sin(),
            Self::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * s + (k * (k - 1)) as f64 * c),
        }
    }

    pub fn phi2(&self, s: f64, y0: f64) -> f64 {
        y0 + self.psi(s)
    }

    /// Offset `y0` of the streamline through `(x, y)`.
    pub fn offset_of(&self, x: f64, y: f64) -> f64 {
        y - self.psi(x)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Straight { slope } => slope.is_finite(),
            Self::Sinusoidal {
                amplitude,
                wavenumber,
            } => amplitude.is_finite() && wavenumber.is_finite(),
            Self::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("streamline family parameters must be finite".into()))
        }
    }
}

/// Derivatives of a streamline parameterization `s -> (phi1, phi2)` and of
/// its inverse `g`, as needed by the continuity coefficient.
pub trait StreamlineGeometry {
    fn phi1_dot(&self, s: f64, y0: f64) -> f64;
    fn phi1_ddot(&self, s: f64, y0: f64) -> f64;
    fn phi2_dot(&self, s: f64, y0: f64) -> f64;
    fn phi2_ddot(&self, s: f64, y0: f64) -> f64;
    /// `dg/dy` at the point `phi(s)` of streamline `y0`.
    fn g_y(&self, s: f64, y0: f64) -> f64;
}

impl StreamlineGeometry for StreamlineFamily {
    fn phi1_dot(&self, _s: f64, _y0: f64) -> f64 {
        1.0
    }
    fn phi1_ddot(&self, _s: f64, _y0: f64) -> f64 {
        0.0
    }
    fn phi2_dot(&self, s: f64, _y0: f64) -> f64 {
        self.psi_dot(s)
    }
    fn phi2_ddot(&self, s: f64, _y0: f64) -> f64 {
        self.psi_ddot(s)
    }
    fn g_y(&self, _s: f64, _y0: f64) -> f64 {
        // g(x, y) = x
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs nx, ny >= 2, got {} x {}",
                self.nx, self.ny
            )));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidArgument(format!(
                "grid ranges must be finite with min < max, got x [{}, {}], y [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        node(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        node(self.y_min, self.y_max, self.ny, j)
    }

    /// Row-major points: `y` outer, `x` inner.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.x(i), self.y(j))))
    }
}

fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub u1: f64,
    pub u2: f64,
}

/// One grid point of a reconstructed field. `velocity` is `None` where the
/// exact solution has a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub velocity: Option<Velocity>,
}

impl VelocitySample {
    pub fn is_valid(&self) -> bool {
        self.velocity.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    /// Row-major, `grid.nx * grid.ny` entries.
    pub samples: Vec<VelocitySample>,
    pub pressure: Option<Vec<f64>>,
}

/// `p(x, y) = p0 + slope * g(x, y)` with `g(x, y) = x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePressure {
    pub p0: f64,
    pub slope: f64,
}

impl AffinePressure {
    pub fn at(&self, x: f64, _y: f64) -> f64 {
        self.p0 + self.slope * x
    }

    pub(crate) fn at_dd(&self, x: DoubleDouble, _y: DoubleDouble) -> DoubleDouble {
        DoubleDouble::from_f64(self.p0) + x.mul_f64(self.slope)
    }
}

/// Maps a streamline offset `y0` to that streamline's parameters and constants.
pub type StreamlineMap = dyn Fn(f64) -> (FlowParams, SolutionConstants) + Send + Sync;

/// Which axial profile each streamline carries.
#[derive(Clone)]
pub enum Profiles {
    Shared(Arc<dyn AxialProfile>),
    PerStreamline(Arc<StreamlineMap>),
}

impl std::fmt::Debug for Profiles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Shared(_) => f.write_str("Profiles::Shared(..)"),
            Self::PerStreamline(_) => f.write_str("Profiles::PerStreamline(..)"),
        }
    }
}

/// A continuous velocity field assembled from a streamline family and axial
/// profiles: `v1(x, y) = u1(x)`, `v2(x, y) = psi'(x) u1(x)`.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub family: StreamlineFamily,
    pub profiles: Profiles,
    pub pressure: Option<AffinePressure>,
    /// Domain extent `L`; sampling grids must stay inside `[0, L]`.
    pub length: Option<f64>,
}

impl VelocityField {
    /// Every streamline shares one exact Airy solution.
    pub fn exact(family: StreamlineFamily, params: FlowParams, consts: SolutionConstants) -> Self {
        Self {
            family,
            profiles: Profiles::Shared(Arc::new(ExactProfile { params, consts })),
            pressure: None,
            length: Some(params.length),
        }
    }

    /// Each streamline gets its own parameters and constants.
    pub fn per_streamline(family: StreamlineFamily, length: f64, map: Arc<StreamlineMap>) -> Self {
        Self {
            family,
            profiles: Profiles::PerStreamline(map),
            pressure: None,
            length: Some(length),
        }
    }

    /// Any axial profile, shared by all streamlines, on an unbounded domain.
    pub fn with_profile(family: StreamlineFamily, profile: Arc<dyn AxialProfile>) -> Self {
        Self {
            family,
            profiles: Profiles::Shared(profile),
            pressure: None,
            length: None,
        }
    }

    pub fn with_pressure(mut self, pressure: AffinePressure) -> Self {
        self.pressure = Some(pressure);
        self
    }

    /// Run `f` with the profile of streamline `y0`.
    pub fn with_streamline<R>(&self, y0: f64, f: impl FnOnce(&dyn AxialProfile) -> R) -> R {
        match &self.profiles {
            Profiles::Shared(p) => f(p.as_ref()),
            Profiles::PerStreamline(map) => {
                let (params, consts) = map(y0);
                f(&ExactProfile { params, consts })
            }
        }
    }

    pub fn velocity(&self, x: f64, y: f64) -> Result<Velocity> {
        let y0 = self.family.offset_of(x, y);
        let u1 = self.with_streamline(y0, |p| p.u1(x))?;
        Ok(Velocity {
            u1,
            u2: self.family.psi_dot(x) * u1,
        })
    }

    pub fn pressure_at(&self, x: f64, y: f64) -> Option<f64> {
        self.pressure.map(|p| p.at(x, y))
    }

    /// Sample the field on `grid`; points at poles are flagged invalid.
    pub fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        grid.validate()?;
        self.family.validate()?;
        if let Some(l) = self.length {
            if grid.x_min < 0.0 || grid.x_max > l {
                return Err(Error::GridOutsideDomain(format!(
                    "x range [{}, {}] not inside [0, {l}]",
                    grid.x_min, grid.x_max
                )));
            }
        }
        let mut samples = Vec::with_capacity(grid.nx * grid.ny);
        for (x, y) in grid.points() {
            let velocity = match self.velocity(x, y) {
                Ok(v) => Some(v),
                Err(Error::Pole { .. }) => None,
                Err(e) => return Err(e),
            };
            samples.push(VelocitySample { s: x, x, y, velocity });
        }
        let pressure = self.pressure.map(|p| grid.points().map(|(x, y)| p.at(x, y)).collect());
        Ok(SampledField {
            grid: *grid,
            samples,
            pressure,
        })
    }
}

/// Sample the field of one shared exact solution over `grid`.
pub fn reconstruct_field(
    family: &StreamlineFamily,
    params: &FlowParams,
    consts: &SolutionConstants,
    grid: &GridSpec,
) -> Result<SampledField> {
    VelocityField::exact(family.clone(), *params, *consts).sample(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Parse(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn emit(field: &SampledField, format: Format) -> String {
    match format {
        Format::Csv => emit_csv(field),
        Format::Json => emit_json(field),
    }
}

pub fn parse(text: &str, format: Format) -> Result<SampledField> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}

fn emit_csv(field: &SampledField) -> String {
    let mut out = String::with_capacity(field.samples.len() * 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &field.samples {
        let (u1, u2, valid) = match s.velocity {
            Some(v) => (fmt_f64(v.u1), fmt_f64(v.u2), "true"),
            None => (String::new(), String::new(), "false"),
        };
        let _ = writeln!(out, "{},{},{},{u1},{u2},{valid}", fmt_f64(s.s), fmt_f64(s.x), fmt_f64(s.y));
    }
    out
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: bad number {field:?}: {e}")))
}

fn parse_csv(text: &str) -> Result<SampledField> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {CSV_HEADER:?}, found {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Parse(format!("line {lineno}: expected 6 columns, found {}", cols.len())));
        }
        let velocity = match cols[5] {
            "true" => Some(Velocity {
                u1: parse_number(cols[3], lineno)?,
                u2: parse_number(cols[4], lineno)?,
            }),
            "false" if cols[3].is_empty() && cols[4].is_empty() => None,
            "false" => return Err(Error::Parse(format!("line {lineno}: invalid sample must have empty u1,u2"))),
            v => return Err(Error::Parse(format!("line {lineno}: valid must be true or false, got {v:?}"))),
        };
        samples.push(VelocitySample {
            s: parse_number(cols[0], lineno)?,
            x: parse_number(cols[1], lineno)?,
            y: parse_number(cols[2], lineno)?,
            velocity,
        });
    }
    let grid = infer_grid(&samples)?;
    Ok(SampledField {
        grid,
        samples,
        pressure: None,
    })
}

/// Recover the grid from row-major samples: `nx` is the length of the first
/// run of equal `y`.
fn infer_grid(samples: &[VelocitySample]) -> Result<GridSpec> {
    let first = samples.first().ok_or_else(|| Error::Parse("field has no samples".into()))?;
    let nx = samples.iter().take_while(|s| s.y == first.y).count();
    let n = samples.len();
    if nx < 2 || !n.is_multiple_of(nx) || n / nx < 2 {
        return Err(Error::Parse(format!("{n} samples do not form a row-major grid (first row has {nx})")));
    }
    Ok(GridSpec {
        x_min: first.x,
        x_max: samples[nx - 1].x,
        y_min: first.y,
        y_max: samples[n - 1].y,
        nx,
        ny: n / nx,
    })
}

fn emit_json(field: &SampledField) -> String {
    let g = &field.grid;
    let mut out = String::with_capacity(field.samples.len() * 160);
    let _ = write!(
        out,
        "{{\"grid\":{{\"x_min\":{},\"x_max\":{},\"y_min\":{},\"y_max\":{},\"nx\":{},\"ny\":{}}},\n\"samples\":[",
        fmt_f64(g.x_min),
        fmt_f64(g.x_max),
        fmt_f64(g.y_min),
        fmt_f64(g.y_max),
        g.nx,
        g.ny
    );
    for (i, s) in field.samples.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let (u1, u2, valid) = match s.velocity {
            Some(v) => (fmt_f64(v.u1), fmt_f64(v.u2), "true"),
            None => ("null".to_string(), "null".to_string(), "false"),
        };
        let _ = write!(
            out,
            "\n{{\"s\":{},\"x\":{},\"y\":{},\"u1\":{u1},\"u2\":{u2},\"valid\":{valid}}}",
            fmt_f64(s.s),
            fmt_f64(s.x),
            fmt_f64(s.y)
        );
    }
    out.push_str("\n]");
    if let Some(p) = &field.pressure {
        out.push_str(",\n\"pressure\":[");
        let vals: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&vals.join(","));
        out.push(']');
    }
    out.push_str("}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonField {
    grid: GridSpec,
    samples: Vec<JsonSample>,
    #[serde(default)]
    pressure: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSample {
    s: f64,
    x: f64,
    y: f64,
    u1: Option<f64>,
    u2: Option<f64>,
    valid: bool,
}

fn parse_json(text: &str) -> Result<SampledField> {
    let raw: JsonField = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.grid.validate().map_err(|e| Error::Parse(e.to_string()))?;
    if raw.samples.len() != raw.grid.nx * raw.grid.ny {
        return Err(Error::Parse(format!(
            "{} samples for a {} x {} grid",
            raw.samples.len(),
            raw.grid.nx,
            raw.grid.ny
        )));
    }
    if let Some(p) = &raw.pressure {
        if p.len() != raw.samples.len() {
            return Err(Error::Parse("pressure length differs from sample count".into()));
        }
    }
    let samples = raw
        .samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let velocity = match (s.valid, s.u1, s.u2) {
                (true, Some(u1), Some(u2)) => Some(Velocity { u1, u2 }),
                (false, None, None) => None,
                _ => return Err(Error::Parse(format!("sample {i}: valid flag inconsistent with u1/u2"))),
            };
            Ok(VelocitySample {
                s: s.s,
                x: s.x,
                y: s.y,
                velocity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledField {
        grid: raw.grid,
        samples,
        pressure: raw.pressure,
    })
}

/// A gnuplot script plotting the velocity arrows stored in `csv_path`.
pub fn gnuplot_script(csv_path: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key off\n\
         set xlabel 'x'\n\
         set ylabel 'y'\n\
         # rows with valid=false have empty u1,u2 and are skipped\n\
         plot '{csv_path}' every ::1 using 2:3:($4*0.05):($5*0.05) with vectors head size 0.01,20\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::{solve_ivp, InitialData};
    use crate::flow::exact_u1;
    use std::f64::consts::PI;

    fn solution() -> (FlowParams, SolutionConstants) {
        let p = FlowParams::new(0.8, -1.0, 0.5, 1.0).unwrap();
        let k = solve_ivp(
            &InitialData {
                u10: 0.6,
                u1dot0: -0.2,
                u1l: None,
            },
            &p,
        )
        .unwrap();
        (p, k)
    }

    fn grid(nx: usize, ny: usize) -> GridSpec {
        GridSpec {
            x_min: 0.0,
            x_max: 1.0,
            y_min: -0.5,
            y_max: 0.5,
            nx,
            ny,
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let f = StreamlineFamily::Polynomial {
            coefficients: vec![1.0, 2.0, 3.0, 4.0],
        };
        // 1 + 2s + 3s^2 + 4s^3 at s = 2
        assert_eq!(f.psi(2.0), 49.0);
        assert_eq!(f.psi_dot(2.0), 2.0 + 12.0 + 48.0);
        assert_eq!(f.psi_ddot(2.0), 6.0 + 48.0);
        assert_eq!(f.phi2(2.0, 0.5), 49.5);
        assert_eq!(f.offset_of(2.0, 49.5), 0.5);
    }

    #[test]
    fn flat_family_has_no_cross_flow() {
        let (p, k) = solution();
        let f = reconstruct_field(&StreamlineFamily::Straight { slope: 0.0 }, &p, &k, &grid(5, 4)).unwrap();
        assert!(f.samples.iter().all(|s| s.velocity.unwrap().u2 == 0.0));
    }

    #[test]
    fn sloped_family_scales_u1() {
        let (p, k) = solution();
        let f = reconstruct_field(&StreamlineFamily::Straight { slope: -1.7 }, &p, &k, &grid(5, 4)).unwrap();
        for s in &f.samples {
            let v = s.velocity.unwrap();
            assert_eq!(v.u2, -1.7 * v.u1);
        }
    }

    #[test]
    fn sinusoidal_ratio_matches_analytic_slope() {
        let (p, k) = solution();
        let fam = StreamlineFamily::Sinusoidal {
            amplitude: 0.1,
            wavenumber: PI,
        };
        let f = reconstruct_field(&fam, &p, &k, &grid(11, 3)).unwrap();
        for s in &f.samples {
            let v = s.velocity.unwrap();
            let expected = 0.1 * PI * (PI * s.x).cos();
            assert!((v.u2 / v.u1 - expected).abs() < 1e-14);
            assert_eq!(v.u1, exact_u1(s.x, &p, &k).unwrap());
            assert_eq!(s.s, s.x);
        }
    }

    #[test]
    fn grid_must_lie_in_domain() {
        let (p, k) = solution();
        let mut g = grid(3, 3);
        g.x_max = 1.5;
        assert!(matches!(
            reconstruct_field(&StreamlineFamily::Straight { slope: 0.0 }, &p, &k, &g),
            Err(Error::GridOutsideDomain(_))
        ));
        g.x_max = 1.0;
        g.nx = 1;
        assert!(reconstruct_field(&StreamlineFamily::Straight { slope: 0.0 }, &p, &k, &g).is_err());
    }

    #[test]
    fn poles_flagged_invalid() {
        // t = s - 3 with pure Ai: zero of Ai at s = 0.661892589540233
        let p = FlowParams::new(1.0, -2.0, 0.0, 1.0).unwrap();
        let k = SolutionConstants::new(-1.0, 3.0, 6.0, 1.0, 0.0).unwrap();
        let zero = 3.0 - 2.338_107_410_459_767;
        let g = GridSpec {
            x_min: zero,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
            nx: 3,
            ny: 2,
        };
        let f = reconstruct_field(&StreamlineFamily::Straight { slope: 0.0 }, &p, &k, &g).unwrap();
        assert!(!f.samples[0].is_valid());
        assert!(!f.samples[3].is_valid());
        assert!(f.samples[1].is_valid());
    }

    fn zero_field() -> SampledField {
        let g = grid(2, 2);
        let samples = g
            .points()
            .map(|(x, y)| VelocitySample {
                s: x,
                x,
                y,
                velocity: Some(Velocity { u1: 0.0, u2: 0.0 }),
            })
            .collect();
        SampledField {
            grid: g,
            samples,
            pressure: None,
        }
    }

    #[test]
    fn csv_zero_field() {
        let text = emit(&zero_field(), Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,0.0000000000000000e0,-5.0000000000000000e-1,0.0000000000000000e0,0.0000000000000000e0,true"
        );
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn invalid_row_has_empty_velocity() {
        let mut f = zero_field();
        f.samples[2].velocity = None;
        let text = emit(&f, Format::Csv);
        assert_eq!(text.lines().nth(3).unwrap(), "0.0000000000000000e0,0.0000000000000000e0,5.0000000000000000e-1,,,false");
        let json = emit(&f, Format::Json);
        assert!(json.contains("\"u1\":null,\"u2\":null,\"valid\":false"));
    }

    #[test]
    fn round_trips_are_byte_identical() {
        let (p, k) = solution();
        let fam = StreamlineFamily::Sinusoidal {
            amplitude: 0.3,
            wavenumber: 2.0,
        };
        let mut f = VelocityField::exact(fam, p, k)
            .with_pressure(AffinePressure { p0: 1.0, slope: -0.25 })
            .sample(&grid(7, 5))
            .unwrap();
        f.samples[4].velocity = None;
        for fmt in [Format::Csv, Format::Json] {
            let a = emit(&f, fmt);
            let parsed = parse(&a, fmt).unwrap();
            assert_eq!(emit(&parsed, fmt), a);
            assert_eq!(parsed.samples, f.samples);
        }
        assert_eq!(parse(&emit(&f, Format::Json), Format::Json).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert!(parse("s,x,y\n", Format::Csv).is_err());
        assert!(parse("s,x,y,u1,u2,valid\n1,2,3,4,5,maybe\n", Format::Csv).is_err());
        assert!(parse("s,x,y,u1,u2,valid\n1,2,3,4,,false\n", Format::Csv).is_err());
        assert!(parse("{\"grid\":1}", Format::Json).is_err());
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn gnuplot_mentions_csv() {
        assert!(gnuplot_script("out/field.csv").contains("'out/field.csv'"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_family() -> impl Strategy<Value = StreamlineFamily> {
            prop_oneof![
                (-3.0..3.0f64).prop_map(|slope| StreamlineFamily::Straight { slope }),
                (0.0..0.5f64, 0.1..6.0f64)
                    .prop_map(|(amplitude, wavenumber)| StreamlineFamily::Sinusoidal { amplitude, wavenumber }),
                prop::collection::vec(-1.0..1.0f64, 0..5)
                    .prop_map(|coefficients| StreamlineFamily::Polynomial { coefficients }),
            ]
        }

        fn finite() -> impl Strategy<Value = f64> {
            any::<f64>().prop_filter("finite", |v| v.is_finite())
        }

        proptest! {
            #[test]
            fn velocity_is_tangent_to_streamlines(fam in any_family(), x in 0.0..1.0f64, y in -1.0..1.0f64) {
                let (p, k) = solution();
                let v = VelocityField::exact(fam.clone(), p, k).velocity(x, y).unwrap();
                let cross = v.u1 * fam.psi_dot(x) - v.u2;
                prop_assert!(cross.abs() <= 1e-12 * (v.u1.abs() + v.u2.abs()).max(f64::MIN_POSITIVE));
            }

            #[test]
            fn shared_profile_ignores_streamline(fam in any_family(), x in 0.0..1.0f64, y0 in -1.0..1.0f64, y1 in -1.0..1.0f64) {
                let (p, k) = solution();
                let f = VelocityField::exact(fam, p, k);
                prop_assert_eq!(f.velocity(x, y0).unwrap().u1, f.velocity(x, y1).unwrap().u1);
                prop_assert_eq!(f.velocity(x, y0).unwrap().u1, exact_u1(x, &p, &k).unwrap());
            }

            #[test]
            fn arbitrary_doubles_round_trip(
                values in prop::collection::vec((finite(), finite(), any::<bool>()), 4),
                pressure in prop::option::of(prop::collection::vec(finite(), 4)),
            ) {
                let mut f = zero_field();
                for (s, (u1, u2, valid)) in f.samples.iter_mut().zip(values) {
                    s.velocity = valid.then_some(Velocity { u1, u2 });
                }
                f.pressure = pressure;
                for fmt in [Format::Csv, Format::Json] {
                    let text = emit(&f, fmt);
                    let back = parse(&text, fmt).unwrap();
                    prop_assert_eq!(&back.samples, &f.samples);
                    prop_assert_eq!(emit(&back, fmt), text);
                }
                prop_assert_eq!(parse(&emit(&f, Format::Json), Format::Json).unwrap(), f);
            }
        }
    }
}
