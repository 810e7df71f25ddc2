mod config;
mod error;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use airyflow::bvp::{solve_bvp, solve_ivp, InitialData};
use airyflow::field::{emit, fmt_f64, gnuplot_script, AffinePressure, VelocityField};
use airyflow::flow::{exact_u1, exact_u1_derivative, find_poles, FlowParams, SolutionConstants};
use airyflow::suite::{run_suite, DEFAULT_SEED};
use airyflow::{airy_eval, Error};

use config::{parse_field_config, Problem};
use error::CliError;

/// Exact Airy-function solutions of streamline-reduced steady flow.
#[derive(Debug, Parser)]
#[command(name = "airyflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Ai, Bi, Ai', Bi' and the Wronskian at t.
    Airy {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Solve from u1(0) and u1'(0); print the constants, u1(L) and the poles in [0, L].
    Ivp {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, allow_negative_numbers = true)]
        u10: f64,
        #[arg(long, allow_negative_numbers = true)]
        u1dot0: f64,
        /// Write the sampled profile as CSV (s,u1,u1_dot,valid) to this path.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
        /// Number of profile samples written by --emit.
        #[arg(long, default_value_t = 201, requires = "emit")]
        samples: usize,
    },
    /// Solve from u1(0) and u1(L) by shooting on c.
    Bvp {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, allow_negative_numbers = true)]
        u10: f64,
        #[arg(long = "u1L", value_name = "U1L", allow_negative_numbers = true)]
        u1l: f64,
        #[arg(long, allow_negative_numbers = true, requires = "c_max")]
        c_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "c_min")]
        c_max: Option<f64>,
    },
    /// Reconstruct a 2D field from a run file and write it as CSV or JSON.
    Field {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Run the oracle suite and print one PASS/FAIL line per check.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Kinematic viscosity.
    #[arg(long, allow_negative_numbers = true)]
    nu: f64,
    /// Axial pressure gradient per unit density.
    #[arg(long, allow_negative_numbers = true)]
    grad_term: f64,
    /// Axial body force per unit mass.
    #[arg(long, allow_negative_numbers = true)]
    f1: f64,
    /// Domain length.
    #[arg(long = "L", value_name = "L", allow_negative_numbers = true)]
    length: f64,
}

impl FlowArgs {
    fn params(&self) -> Result<FlowParams, CliError> {
        Ok(FlowParams::new(self.nu, self.grad_term, self.f1, self.length)?)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    match run(cli.command, &mut out) {
        Ok(code) => {
            print!("{out}");
            code
        }
        Err(e) => {
            eprintln!("airyflow: error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &mut String) -> Result<ExitCode, CliError> {
    match command {
        Command::Airy { t } => airy(t, out)?,
        Command::Ivp {
            flow,
            u10,
            u1dot0,
            emit,
            samples,
        } => ivp(&flow, u10, u1dot0, emit.as_deref(), samples, out)?,
        Command::Bvp {
            flow,
            u10,
            u1l,
            c_min,
            c_max,
        } => bvp(&flow.params()?, u10, u1l, c_min.zip(c_max), out)?,
        Command::Field { config } => field(&config, out)?,
        Command::Verify { seed } => return Ok(verify(seed, out)),
    }
    Ok(ExitCode::SUCCESS)
}

fn line(out: &mut String, key: &str, value: f64) {
    let _ = writeln!(out, "{key} = {}", fmt_f64(value));
}

fn list(values: &[f64]) -> String {
    if values.is_empty() {
        "none".to_string()
    } else {
        values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
    }
}

fn constants(out: &mut String, k: &SolutionConstants) {
    line(out, "a", k.a());
    line(out, "b", k.b());
    line(out, "c", k.c());
    line(out, "c1", k.c1());
    line(out, "c2", k.c2());
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn airy(t: f64, out: &mut String) -> Result<(), CliError> {
    let q = airy_eval(t)?;
    line(out, "t", t);
    line(out, "ai", q.ai);
    line(out, "bi", q.bi);
    line(out, "ai_prime", q.ai_prime);
    line(out, "bi_prime", q.bi_prime);
    line(out, "wronskian", q.wronskian());
    Ok(())
}

fn ivp(
    flow: &FlowArgs,
    u10: f64,
    u1dot0: f64,
    emit_path: Option<&Path>,
    samples: usize,
    out: &mut String,
) -> Result<(), CliError> {
    if emit_path.is_some() && samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    let params = flow.params()?;
    let k = solve_ivp(&InitialData { u10, u1dot0, u1l: None }, &params)?;
    constants(out, &k);
    match exact_u1(params.length, &params, &k) {
        Ok(u) => line(out, "u1_L", u),
        Err(Error::Pole { .. }) => out.push_str("u1_L = pole\n"),
        Err(e) => return Err(e.into()),
    }
    let _ = writeln!(out, "poles = {}", list(&find_poles(&k, 0.0, params.length)));

    if let Some(path) = emit_path {
        let mut csv = String::from("s,u1,u1_dot,valid\n");
        let last = (samples - 1) as f64;
        for i in 0..samples {
            let s = if i + 1 == samples { params.length } else { params.length * i as f64 / last };
            let value = exact_u1(s, &params, &k).and_then(|u| Ok((u, exact_u1_derivative(s, &params, &k)?)));
            match value {
                Ok((u, du)) => {
                    let _ = writeln!(csv, "{},{},{},true", fmt_f64(s), fmt_f64(u), fmt_f64(du));
                }
                Err(Error::Pole { .. }) => {
                    let _ = writeln!(csv, "{},,,false", fmt_f64(s));
                }
                Err(e) => return Err(e.into()),
            }
        }
        write_file(path, &csv)?;
    }
    Ok(())
}

fn bvp(
    params: &FlowParams,
    u10: f64,
    u1l: f64,
    c_bracket: Option<(f64, f64)>,
    out: &mut String,
) -> Result<(), CliError> {
    let sol = solve_bvp(u10, u1l, params, c_bracket)?;
    line(out, "c", sol.constants.c());
    line(out, "u1dot0", sol.u1dot0);
    line(out, "c1", sol.constants.c1());
    line(out, "c2", sol.constants.c2());
    line(out, "residual", sol.residual);
    let _ = writeln!(out, "roots = {}", list(&sol.roots));
    let _ = writeln!(out, "excluded = {}", sol.excluded);
    Ok(())
}

fn field(path: &Path, out: &mut String) -> Result<(), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse_field_config(path, &text)?;
    let k = match cfg.problem {
        Problem::Initial { u10, u1dot0 } => solve_ivp(&InitialData { u10, u1dot0, u1l: None }, &cfg.params)?,
        Problem::Boundary { u10, u1l, c_bracket } => solve_bvp(u10, u1l, &cfg.params, c_bracket)?.constants,
    };
    let mut vf = VelocityField::exact(cfg.family.clone(), cfg.params, k);
    if let Some(p0) = cfg.pressure_p0 {
        vf = vf.with_pressure(AffinePressure {
            p0,
            slope: cfg.params.grad_term,
        });
    }
    let sampled = vf.sample(&cfg.grid)?;
    write_file(&cfg.output, &emit(&sampled, cfg.format))?;
    if let Some(script) = &cfg.gnuplot {
        write_file(script, &gnuplot_script(&cfg.output.to_string_lossy()))?;
    }

    constants(out, &k);
    let invalid = sampled.samples.iter().filter(|s| !s.is_valid()).count();
    let _ = writeln!(out, "samples = {}", sampled.samples.len());
    let _ = writeln!(out, "invalid = {invalid}");
    let _ = writeln!(out, "output = {}", cfg.output.display());
    Ok(())
}

fn verify(seed: u64, out: &mut String) -> ExitCode {
    let reports = run_suite(seed);
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("airyflow: {failed} of {} checks failed (seed {seed})", reports.len());
        ExitCode::FAILURE
    }
}
