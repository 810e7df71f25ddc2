//! The `key = value` run file read by `airyflow field`.
//!
//! One entry per line; blank lines and lines starting with `#` are ignored.
//! Unknown keys, repeated keys and keys that do not apply to the chosen
//! family or mode are all errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use airyflow::field::{Format, GridSpec, StreamlineFamily};
use airyflow::flow::FlowParams;

use crate::error::CliError;

const KEYS: &[&str] = &[
    "nu",
    "grad_term",
    "f1",
    "L",
    "u10",
    "u1dot0",
    "u1L",
    "c_min",
    "c_max",
    "family",
    "slope",
    "amplitude",
    "wavenumber",
    "coefficients",
    "x_min",
    "x_max",
    "y_min",
    "y_max",
    "nx",
    "ny",
    "pressure_p0",
    "format",
    "output",
    "gnuplot",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub params: FlowParams,
    pub problem: Problem,
    pub family: StreamlineFamily,
    pub grid: GridSpec,
    /// Reference value of `p / rho`; the slope is always `grad_term`.
    pub pressure_p0: Option<f64>,
    pub format: Format,
    pub output: PathBuf,
    pub gnuplot: Option<PathBuf>,
}

/// How the constants of the axial profile are fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Initial { u10: f64, u1dot0: f64 },
    Boundary { u10: f64, u1l: f64, c_bracket: Option<(f64, f64)> },
}

struct Entries<'a> {
    path: &'a Path,
    map: BTreeMap<String, (usize, String)>,
}

impl<'a> Entries<'a> {
    fn parse(path: &'a Path, text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: path.to_path_buf(),
                line,
                message,
            };
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {trimmed:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(format!("key `{key}` has no value")));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (line, value.to_string())) {
                return Err(err(format!("key `{key}` repeated (first set on line {first})")));
            }
        }
        Ok(Self { path, map })
    }

    fn line_err(&self, line: usize, message: String) -> CliError {
        CliError::Config {
            path: self.path.to_path_buf(),
            line,
            message,
        }
    }

    fn missing(&self, message: String) -> CliError {
        CliError::ConfigMissing {
            path: self.path.to_path_buf(),
            message,
        }
    }

    fn text(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn required_text(&mut self, key: &str) -> Result<(usize, String), CliError> {
        self.text(key)
            .ok_or_else(|| self.missing(format!("required key `{key}` is missing")))
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        let Some((line, value)) = self.text(key) else {
            return Ok(None);
        };
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(self.line_err(line, format!("`{key}` must be a finite number, got {value:?}"))),
        }
    }

    fn required_float(&mut self, key: &str) -> Result<f64, CliError> {
        self.float(key)?
            .ok_or_else(|| self.missing(format!("required key `{key}` is missing")))
    }

    fn count(&mut self, key: &str) -> Result<usize, CliError> {
        let (line, value) = self.required_text(key)?;
        value
            .parse::<usize>()
            .map_err(|_| self.line_err(line, format!("`{key}` must be a non-negative integer, got {value:?}")))
    }

    /// Rejects any entry not consumed while building the config.
    fn finish(self, context: &str) -> Result<(), CliError> {
        match self.map.iter().min_by_key(|(_, (line, _))| *line) {
            Some((key, (line, _))) => Err(self.line_err(*line, format!("key `{key}` does not apply to {context}"))),
            None => Ok(()),
        }
    }
}

fn family(entries: &mut Entries) -> Result<(StreamlineFamily, &'static str), CliError> {
    let (line, kind) = entries.required_text("family")?;
    let fam = match kind.as_str() {
        "straight" => (
            StreamlineFamily::Straight {
                slope: entries.required_float("slope")?,
            },
            "a straight family",
        ),
        "sinusoidal" => (
            StreamlineFamily::Sinusoidal {
                amplitude: entries.required_float("amplitude")?,
                wavenumber: entries.required_float("wavenumber")?,
            },
            "a sinusoidal family",
        ),
        "polynomial" => {
            let (cline, list) = entries.required_text("coefficients")?;
            let coefficients = list
                .split(',')
                .map(|c| c.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| {
                    entries.line_err(cline, format!("`coefficients` must be comma-separated finite numbers, got {list:?}"))
                })?;
            (StreamlineFamily::Polynomial { coefficients }, "a polynomial family")
        }
        other => {
            return Err(entries.line_err(
                line,
                format!("unknown family {other:?}, expected straight, sinusoidal or polynomial"),
            ))
        }
    };
    Ok(fam)
}

pub fn parse_field_config(path: &Path, text: &str) -> Result<FieldConfig, CliError> {
    let mut e = Entries::parse(path, text)?;

    let params = FlowParams {
        nu: e.required_float("nu")?,
        grad_term: e.required_float("grad_term")?,
        f1: e.required_float("f1")?,
        length: e.required_float("L")?,
    };

    let u10 = e.required_float("u10")?;
    let u1dot0 = e.float("u1dot0")?;
    let u1l = e.float("u1L")?;
    let problem = match (u1dot0, u1l) {
        (Some(u1dot0), None) => {
            for key in ["c_min", "c_max"] {
                if let Some((line, _)) = e.text(key) {
                    return Err(e.line_err(line, format!("`{key}` only applies with `u1L` (boundary-value mode)")));
                }
            }
            Problem::Initial { u10, u1dot0 }
        }
        (None, Some(u1l)) => {
            let c_bracket = match (e.float("c_min")?, e.float("c_max")?) {
                (Some(lo), Some(hi)) => Some((lo, hi)),
                (None, None) => None,
                _ => return Err(e.missing("`c_min` and `c_max` must be given together".into())),
            };
            Problem::Boundary { u10, u1l, c_bracket }
        }
        _ => return Err(e.missing("exactly one of `u1dot0` (initial value) or `u1L` (boundary value) is required".into())),
    };

    let (family, family_context) = family(&mut e)?;

    let grid = GridSpec {
        x_min: e.required_float("x_min")?,
        x_max: e.required_float("x_max")?,
        y_min: e.required_float("y_min")?,
        y_max: e.required_float("y_max")?,
        nx: e.count("nx")?,
        ny: e.count("ny")?,
    };

    let format = match e.text("format") {
        None => Format::Csv,
        Some((line, v)) => v.parse().map_err(|err: airyflow::Error| e.line_err(line, err.to_string()))?,
    };
    let output = PathBuf::from(e.required_text("output")?.1);
    let gnuplot = e.text("gnuplot").map(|(line, v)| (line, PathBuf::from(v)));
    if let Some((line, _)) = &gnuplot {
        if format != Format::Csv {
            return Err(e.line_err(*line, "`gnuplot` needs `format = csv`; the script plots the CSV output".into()));
        }
    }
    let pressure_p0 = match e.text("pressure_p0") {
        Some((line, _)) if format == Format::Csv => {
            return Err(e.line_err(line, "`pressure_p0` needs `format = json`; CSV carries velocity only".into()))
        }
        Some((line, v)) => match v.parse::<f64>() {
            Ok(p) if p.is_finite() => Some(p),
            _ => return Err(e.line_err(line, format!("`pressure_p0` must be a finite number, got {v:?}"))),
        },
        None => None,
    };

    e.finish(family_context)?;

    Ok(FieldConfig {
        params,
        problem,
        family,
        grid,
        pressure_p0,
        format,
        output,
        gnuplot: gnuplot.map(|(_, p)| p),
    })
}
