//! The `lindblad` command line.
//!
//! Exit codes: 0 success; 1 bad input (unreadable file, malformed JSON/CSV,
//! bad flag); for `check`, 2 when the generator is not completely positive and
//! 3 when it is CP but its rates violate the triangle relations.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::dynamics::{default_t_max, evolve, steady_state, uniform_grid, Trajectory, DEFAULT_SAMPLES, MAX_T_MAX};
use crate::estimation::{fit_bloch, fitted_triangle_check, FitResult, FittedTriangle};
use crate::generator::{bloch_affine, check_cp, commutation_defect, BlochVector, CpVerdict, GeneratorSpec};
use crate::report::{to_json, to_json_pretty};
use crate::scan::{run_scan, ScanMode};
use crate::spectrum::{
    bloch_to_spec, certificate, relaxation_spectrum, spec_is_bloch, triangle_check, BlochParams, CertificateReport,
    RelaxationSpectrum, TriangleVerdict,
};
use crate::tolerance::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CP: i32 = 2;
pub const EXIT_THEOREM_BREACH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lindblad", version, about = "Qubit Lindblad generators: CP checks, relaxation rates, dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for a generator spec (JSON file with h, gamma, a, delta)
    Check { spec: PathBuf },
    /// Evolve a Bloch vector and write the trajectory as CSV
    Simulate {
        spec: PathBuf,
        /// Initial Bloch vector
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        m0: [f64; 3],
        /// End time (default: 10 / smallest positive rate, at most 1e4)
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept an initial vector longer than 1/2
        #[arg(long)]
        allow_unphysical: bool,
    },
    /// Fit longitudinal/transverse rates and precession frequency to a trajectory CSV
    Fit {
        traj: PathBuf,
        /// Known equilibrium M_z instead of the tail estimate
        #[arg(long, allow_hyphen_values = true)]
        mz_inf: Option<f64>,
    },
    /// Generator spec of the standard Bloch equation
    Bloch {
        #[arg(long)]
        tl: f64,
        #[arg(long)]
        tt: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
    },
    /// Randomized scan of the triangle relations
    Scan {
        #[arg(long, value_enum, default_value = "cp")]
        mode: ScanMode,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected x,y,z, got {s:?}"));
    };
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    let v = [num(x)?, num(y)?, num(z)?];
    if v.iter().any(|c| !c.is_finite()) {
        return Err("components must be finite".into());
    }
    Ok(v)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub spec: GeneratorSpec,
    pub cp_verdict: CpVerdict,
    pub spectrum: Option<RelaxationSpectrum>,
    pub triangle_verdict: Option<TriangleVerdict>,
    pub certificate: Option<CertificateReport>,
    pub bloch_params: Option<BlochParams>,
    pub commutation_defect: f64,
}

impl Report {
    pub fn build(spec: &GeneratorSpec, tol: &Tolerances) -> Result<Self, String> {
        let ba = bloch_affine(spec);
        let spectrum = relaxation_spectrum(&ba, tol).map_err(|e| e.to_string())?;
        Ok(Self {
            spec: *spec,
            cp_verdict: check_cp(spec, tol),
            spectrum: Some(spectrum),
            triangle_verdict: Some(triangle_check(&spectrum, tol.triangle)),
            certificate: certificate(spec, &ba, tol).ok(),
            bloch_params: spec_is_bloch(spec, tol.bloch_pattern),
            commutation_defect: commutation_defect(spec),
        })
    }

    pub fn exit_code(&self) -> i32 {
        match (self.cp_verdict.is_cp, self.triangle_verdict.map(|v| v.holds)) {
            (false, _) => EXIT_NOT_CP,
            (true, Some(false)) => EXIT_THEOREM_BREACH,
            _ => EXIT_OK,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FitReport {
    #[serde(flatten)]
    fit: FitResult,
    fitted_triangle: FittedTriangle,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<GeneratorSpec, Failure> {
    GeneratorSpec::from_json_str(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command. Never exits the process.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    match dispatch(cli.command, &tol, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, tol: &Tolerances, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check { spec } => {
            let spec = load_spec(&spec)?;
            let report = Report::build(&spec, tol).map_err(Failure)?;
            writeln!(out, "{}", to_json_pretty(&report))?;
            let code = report.exit_code();
            if code == EXIT_THEOREM_BREACH {
                writeln!(err, "internal error: CP generator violates the triangle relations")?;
            }
            Ok(code)
        }
        Command::Simulate {
            spec,
            m0,
            t_max,
            samples,
            out: out_path,
            allow_unphysical,
        } => {
            let spec = load_spec(&spec)?;
            let m0 = BlochVector(m0);
            if !allow_unphysical && !m0.is_physical() {
                return Err(Failure(format!(
                    "|m0| = {} exceeds 1/2; pass --allow-unphysical to simulate anyway",
                    m0.norm()
                )));
            }
            if samples < 2 {
                return Err(Failure("--samples must be at least 2".into()));
            }
            let ba = bloch_affine(&spec);
            let t_max = match t_max {
                Some(t) if t > 0.0 && t.is_finite() => t,
                Some(t) => return Err(Failure(format!("--t-max must be positive and finite, got {t}"))),
                None => default_t_max(&relaxation_spectrum(&ba, tol)?),
            };
            if t_max > MAX_T_MAX {
                writeln!(err, "warning: t-max {t_max} exceeds the default cap {MAX_T_MAX}")?;
            }
            let traj = evolve(&ba, &m0, &uniform_grid(t_max, samples))?;
            let ss = steady_state(&ba, tol);
            let summary = json!({
                "tMax": t_max,
                "samples": samples,
                "steadyState": if ss.exists { json!(ss.m.0) } else { json!(null) },
                "steadyStateKind": format!("{:?}", ss.kind),
                "minEigRho": traj.worst_min_eig_rho(),
            });
            match out_path {
                Some(path) => {
                    std::fs::write(&path, traj.to_csv()).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                    writeln!(out, "{}", to_json_pretty(&summary))?;
                }
                None => {
                    write!(out, "{}", traj.to_csv())?;
                    writeln!(err, "{}", to_json(&summary))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Fit { traj, mz_inf } => {
            let trajectory = Trajectory::from_csv(&read(&traj)?)?;
            let fit = fit_bloch(&trajectory, mz_inf, tol)?;
            let fitted_triangle = fitted_triangle_check(&fit, tol);
            writeln!(out, "{}", to_json_pretty(&FitReport { fit, fitted_triangle }))?;
            Ok(EXIT_OK)
        }
        Command::Bloch { tl, tt, omega, k } => {
            let spec = bloch_to_spec(&BlochParams {
                t_l: tl,
                t_t: tt,
                omega,
                k,
            })?;
            writeln!(out, "{}", to_json(&spec))?;
            Ok(EXIT_OK)
        }
        Command::Scan { mode, n, seed } => {
            writeln!(out, "{}", to_json_pretty(&run_scan(mode, n, seed, tol)))?;
            Ok(EXIT_OK)
        }
    }
}
