//! `spinqc` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 a computed residual
//! exceeded `--tol`, 3 I/O failure.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{concurrence, gate_error_sweep, thermal_state, SweepRow};
use crate::frame::{factorization_distance, rotation_matrix, rotation_plan, EulerZyz};
use crate::gates::{self, GateKind, GateReport};
use crate::model::{
    build_hamiltonian, build_isotropic, build_zeeman, compensating_fields, spin_operators,
};
use crate::spinalg::ComplexMatrix;
use config::{Command, Format, GateChoice, RawConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Tolerance(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spinqc",
    version,
    about = "Isotropizing frame, gate synthesis and error sweeps for anisotropically coupled spin qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print H, the frame rotation T, T·H·T† and the isotropization residual
    Transform,
    /// Print the per-qubit Euler angles of T and the factorization residual
    Decompose,
    /// Synthesize a gate and report its distance from the target
    Gate,
    /// Print the compensating field pair and its residual
    Fields,
    /// Gate error versus parameter misestimation
    Sweep,
    /// Concurrence of the thermal state of H and of the isotropic H₀
    Thermal,
}

#[derive(Debug, Args)]
struct Flags {
    /// Config file: `key = value` lines, or a JSON object if it ends in .json
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Exchange coupling J (> 0)
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    j: Option<String>,
    /// Anisotropy axis: xy or z
    #[arg(long, global = true)]
    orientation: Option<String>,
    /// In-plane angle of the anisotropy axis, radians or `Npi/M`
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// tan ω = |b|/J
    #[arg(long = "tan-omega", global = true, allow_hyphen_values = true)]
    tan_omega: Option<String>,
    /// Synonym for --tan-omega
    #[arg(long = "b-over-j", global = true, allow_hyphen_values = true)]
    b_over_j: Option<String>,
    /// Gate: swap, sqrt_swap, cnot or psw
    #[arg(long, global = true)]
    gate: Option<String>,
    /// Uniform field strength in the rotated frame
    #[arg(long = "B", global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Inverse temperature
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Δω/ω₀ values: comma list or linspace(a,b,n)
    #[arg(long = "delta-omega-ratios", global = true, allow_hyphen_values = true)]
    delta_omega_ratios: Option<String>,
    /// Δθ/θ₀ values: comma list or linspace(a,b,n)
    #[arg(long = "delta-theta-ratios", global = true, allow_hyphen_values = true)]
    delta_theta_ratios: Option<String>,
    /// Sweep modes: true, false or both
    #[arg(long, global = true)]
    corrected: Option<String>,
    /// Gate the sweep synthesizes: swap, sqrt_swap or cnot
    #[arg(long = "sweep-gate", global = true)]
    sweep_gate: Option<String>,
    /// Write the data document here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    /// csv (sweep only) or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Residual tolerance
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<String>,
    /// Write `<out>.meta.json` with a timestamp and the resolved config
    #[arg(long, global = true)]
    stamp: bool,
}

impl Flags {
    fn as_pairs(&self) -> Vec<(&'static str, String)> {
        let fields = [
            ("J", &self.j),
            ("orientation", &self.orientation),
            ("theta", &self.theta),
            ("tan_omega", &self.tan_omega),
            ("b_over_J", &self.b_over_j),
            ("gate", &self.gate),
            ("B", &self.b),
            ("beta", &self.beta),
            ("delta_omega_ratios", &self.delta_omega_ratios),
            ("delta_theta_ratios", &self.delta_theta_ratios),
            ("corrected", &self.corrected),
            ("sweep_gate", &self.sweep_gate),
            ("out", &self.out),
            ("format", &self.format),
            ("tol", &self.tol),
        ];
        let mut pairs: Vec<_> = fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if self.stamp {
            pairs.push(("stamp", "true".into()));
        }
        pairs
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    let mut stdout = std::io::stdout().lock();
    match run(std::env::args_os(), &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}", msg.trim());
            e.exit_code()
        }
    }
}

/// Parse `args` (including the program name), run the command and write
/// the report to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}").map_err(io_err)?;
                return Ok(());
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };
    let command = match cli.command {
        Cmd::Transform => Command::Transform,
        Cmd::Decompose => Command::Decompose,
        Cmd::Gate => Command::Gate,
        Cmd::Fields => Command::Fields,
        Cmd::Sweep => Command::Sweep,
        Cmd::Thermal => Command::Thermal,
    };

    let mut raw = match &cli.flags.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    raw.apply_flags(&cli.flags.as_pairs())?;
    let cfg = RunConfig::build(command, &raw)?;

    let output = execute(&cfg)?;
    emit(&cfg, &output, stdout)
}

/// What a command produced.
struct Output {
    summary: String,
    document: String,
    failure: Option<String>,
}

fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command {
        Command::Sweep => run_sweep(cfg),
        Command::Transform => run_transform(cfg),
        Command::Decompose => run_decompose(cfg),
        Command::Gate => run_gate(cfg),
        Command::Fields => run_fields(cfg),
        Command::Thermal => run_thermal(cfg),
    }
}

fn emit(cfg: &RunConfig, out: &Output, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            write_file(path, &out.document)?;
            stdout.write_all(out.summary.as_bytes()).map_err(io_err)?;
            if cfg.stamp {
                write_sidecar(path, cfg)?;
            }
        }
        None => stdout.write_all(out.document.as_bytes()).map_err(io_err)?,
    }
    stdout.flush().map_err(io_err)?;
    match &out.failure {
        Some(msg) => Err(CliError::Tolerance(msg.clone())),
        None => Ok(()),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write '{}': {e}", path.display())))
}

fn write_sidecar(out: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "spinqc",
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": stamp,
        "config": cfg,
    });
    write_file(Path::new(&name), &pretty(&meta))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let n = m.dim();
    Value::Array(
        (0..n)
            .map(|r| {
                Value::Array(
                    (0..n)
                        .map(|c| json!([m[(r, c)].re, m[(r, c)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn check(failure: &mut Option<String>, what: &str, value: f64, tol: f64) {
    if !(value <= tol) && failure.is_none() {
        *failure = Some(format!("{what} {value:.3e} exceeds tolerance {tol:.3e}"));
    }
}

fn params_json(cfg: &RunConfig) -> Value {
    let p = cfg.exchange.expect("exchange parameters resolved");
    json!({
        "J": p.j(),
        "orientation": p.orientation().label(),
        "theta": p.theta(),
        "tan_omega": p.b_over_j(),
        "omega": p.omega(),
    })
}

fn run_transform(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.exchange.expect("exchange parameters resolved");
    let h = build_hamiltonian(&p);
    let t = rotation_matrix(&p);
    let rotated = &(&t * &h) * &t.adjoint();
    let h0 = build_isotropic(p.j())?;
    let residual = rotated.max_abs_diff(&h0);
    let mut failure = None;
    check(&mut failure, "isotropization residual", residual, cfg.tol);

    let mut summary = String::new();
    let _ = writeln!(summary, "H =\n{h}");
    let _ = writeln!(summary, "T =\n{t}");
    let _ = writeln!(summary, "T H T^dagger =\n{rotated}");
    let _ = writeln!(summary, "max |T H T^dagger - H0| = {residual:.3e}");
    let doc = json!({
        "command": "transform",
        "params": params_json(cfg),
        "hamiltonian": matrix_json(&h),
        "rotation": matrix_json(&t),
        "rotated": matrix_json(&rotated),
        "residual": residual,
    });
    Ok(Output {
        summary,
        document: pretty(&doc),
        failure,
    })
}

fn angles_json(e: &EulerZyz) -> Value {
    json!({ "alpha": e.alpha, "gamma": e.gamma, "beta": e.beta })
}

fn run_decompose(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.exchange.expect("exchange parameters resolved");
    let plan = rotation_plan(&p);
    let distance = factorization_distance(&p)?;
    let mut failure = None;
    check(&mut failure, "factorization distance", distance, cfg.tol);

    let mut summary = String::new();
    for (name, e) in [("qubit 1", &plan.qubit1), ("qubit 2", &plan.qubit2)] {
        let _ = writeln!(
            summary,
            "{name}: Rz({:.12}) Ry({:.12}) Rz({:.12})",
            e.alpha, e.gamma, e.beta
        );
    }
    let _ = writeln!(summary, "global phase: {:.12}", plan.global_phase);
    let _ = writeln!(summary, "phase distance to T: {distance:.3e}");
    let doc = json!({
        "command": "decompose",
        "params": params_json(cfg),
        "qubit1": angles_json(&plan.qubit1),
        "qubit2": angles_json(&plan.qubit2),
        "global_phase": plan.global_phase,
        "phase_distance": distance,
    });
    Ok(Output {
        summary,
        document: pretty(&doc),
        failure,
    })
}

fn run_gate(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.exchange.expect("exchange parameters resolved");
    let report: GateReport = match cfg.gate.expect("gate resolved") {
        GateChoice::Exchange(GateKind::Swap) => gates::corrected_swap(&p)?,
        GateChoice::Exchange(GateKind::SqrtSwap) => gates::sqrt_swap(&p)?,
        GateChoice::Exchange(GateKind::Cnot) => gates::cnot(&p)?,
        GateChoice::PhaseShiftedSwap => {
            gates::phase_shifted_swap(&p, cfg.field.expect("field resolved"))?
        }
    };
    let mut failure = None;
    check(
        &mut failure,
        "phase distance to target",
        report.phase_distance_to_target,
        cfg.tol,
    );

    let summary = format!(
        "{}\n{}\nphase distance to {}: {:.3e}\n",
        report.label, report.matrix, report.target_label, report.phase_distance_to_target
    );
    let doc = json!({
        "label": report.label,
        "matrix": matrix_json(&report.matrix),
        "phase_distance": report.phase_distance_to_target,
        "target": report.target_label,
    });
    Ok(Output {
        summary,
        document: pretty(&doc),
        failure,
    })
}

fn run_fields(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.exchange.expect("exchange parameters resolved");
    let b = cfg.field.expect("field resolved");
    let fields = compensating_fields(&p, b);
    let t = rotation_matrix(&p);
    let rotated = &(&t * &build_zeeman(&fields)) * &t.adjoint();
    let residual = rotated.max_abs_diff(&spin_operators().total_z().scale_re(b));
    let mut failure = None;
    check(
        &mut failure,
        "field compensation residual",
        residual,
        cfg.tol,
    );

    let v = |x: [f64; 3]| format!("({:.12}, {:.12}, {:.12})", x[0], x[1], x[2]);
    let summary = format!(
        "B1 = {}\nB2 = {}\nmax |T Hz T^dagger - B Sz_total| = {residual:.3e}\n",
        v(fields.b1),
        v(fields.b2)
    );
    let doc = json!({
        "command": "fields",
        "params": params_json(cfg),
        "B": b,
        "b1": fields.b1,
        "b2": fields.b2,
        "residual": residual,
    });
    Ok(Output {
        summary,
        document: pretty(&doc),
        failure,
    })
}

fn run_thermal(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.exchange.expect("exchange parameters resolved");
    let beta = cfg.beta.expect("beta resolved");
    let c = concurrence(&thermal_state(&build_hamiltonian(&p), beta)?)?;
    let c0 = concurrence(&thermal_state(&build_isotropic(p.j())?, beta)?)?;
    let diff = (c - c0).abs();
    let mut failure = None;
    check(&mut failure, "concurrence difference", diff, cfg.tol);

    let summary = format!("C(rho_H) = {c:.15}\nC(rho_H0) = {c0:.15}\n|difference| = {diff:.3e}\n");
    let doc = json!({
        "command": "thermal",
        "params": params_json(cfg),
        "beta": beta,
        "concurrence": c,
        "concurrence_isotropic": c0,
        "difference": diff,
    });
    Ok(Output {
        summary,
        document: pretty(&doc),
        failure,
    })
}

pub const SWEEP_HEADER: &str =
    "delta_omega_ratio,delta_theta_ratio,corrected,fidelity,error,log10_error";

fn run_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let base = cfg.sweep.clone().expect("sweep resolved");
    let mut rows: Vec<SweepRow> = Vec::new();
    for &corrected in cfg.modes.flags() {
        let sc = crate::analysis::SweepConfig {
            corrected,
            ..base.clone()
        };
        rows.extend(gate_error_sweep(&sc)?.rows);
    }

    let document = match cfg.format {
        Format::Csv => {
            let mut s = String::new();
            s.push_str(SWEEP_HEADER);
            s.push('\n');
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    format_real(r.delta_omega_ratio),
                    format_real(r.delta_theta_ratio),
                    r.corrected,
                    format_real(r.fidelity),
                    format_real(r.error),
                    format_real(r.error.log10()),
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let log = r.error.log10();
                    json!({
                        "delta_omega_ratio": r.delta_omega_ratio,
                        "delta_theta_ratio": r.delta_theta_ratio,
                        "corrected": r.corrected,
                        "fidelity": r.fidelity,
                        "error": r.error,
                        "log10_error": if log.is_finite() { json!(log) } else { json!(format_real(log)) },
                    })
                })
                .collect();
            pretty(&json!({ "command": "sweep", "config": base, "rows": rows }))
        }
    };

    let worst = |corr: bool| {
        rows.iter()
            .filter(|r| r.corrected == corr)
            .map(|r| r.error)
            .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))))
    };
    let mut summary = format!("{} rows\n", rows.len());
    for (name, corr) in [("uncorrected", false), ("corrected", true)] {
        if let Some(w) = worst(corr) {
            let _ = writeln!(summary, "max {name} error: {w:.3e}");
        }
    }
    Ok(Output {
        summary,
        document,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.0_f64.log10()), "-inf");
        assert_eq!(format_real(1.0), "1.0000000000000000e0");
        assert_eq!(format_real(-0.25), "-2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn run_writes_document_to_stdout() {
        let mut buf = Vec::new();
        run(
            [
                "spinqc",
                "decompose",
                "--orientation",
                "z",
                "--tan-omega",
                "0.5",
            ],
            &mut buf,
        )
        .unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["command"], "decompose");

        let err = run(
            ["spinqc", "decompose", "--orientation", "q"],
            &mut Vec::new(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
