//! Run configuration: a flat `key = value` file or a JSON object, with
//! command-line flags layered on top.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;
use crate::analysis::SweepConfig;
use crate::gates::GateKind;
use crate::model::{ExchangeParams, Orientation};

/// Every key a config file or flag may set.
pub const KNOWN_KEYS: &[&str] = &[
    "J",
    "orientation",
    "theta",
    "tan_omega",
    "b_over_J",
    "gate",
    "B",
    "beta",
    "delta_omega_ratios",
    "delta_theta_ratios",
    "corrected",
    "sweep_gate",
    "out",
    "format",
    "tol",
    "stamp",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Transform,
    Decompose,
    Gate,
    Fields,
    Sweep,
    Thermal,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Decompose => "decompose",
            Command::Gate => "gate",
            Command::Fields => "fields",
            Command::Sweep => "sweep",
            Command::Thermal => "thermal",
        }
    }
}

/// Where a raw value came from, for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    File { path: PathBuf, line: Option<usize> },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File {
                path,
                line: Some(line),
            } => write!(f, "{}:{line}", path.display()),
            Origin::File { path, line: None } => write!(f, "{}", path.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RawValue {
    pub value: String,
    pub origin: Origin,
}

/// Untyped key/value layer before validation.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, RawValue>,
}

impl RawConfig {
    pub fn get(&self, key: &str) -> Option<&RawValue> {
        self.entries.get(key)
    }

    fn insert(&mut self, key: &str, value: String, origin: Origin) -> Result<(), CliError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "{origin}: unknown key '{key}' (known keys: {})",
                KNOWN_KEYS.join(", ")
            )));
        }
        if let Some(prev) = self.entries.get(key) {
            if prev.origin != Origin::Flag && origin != Origin::Flag {
                return Err(CliError::Usage(format!(
                    "{origin}: key '{key}' already set at {}",
                    prev.origin
                )));
            }
        }
        self.entries
            .insert(key.to_string(), RawValue { value, origin });
        Ok(())
    }

    /// Parse a config file; `.json` files are read as a JSON object, anything
    /// else as `key = value` lines with `#` comments.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config '{}': {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text, path)
        } else {
            Self::from_key_values(&text, path)
        }
    }

    pub fn from_key_values(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let origin = Origin::File {
                path: path.to_path_buf(),
                line: Some(idx + 1),
            };
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}: expected 'key = value', got '{line}'"
                )));
            };
            cfg.insert(key.trim(), value.trim().to_string(), origin)?;
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        let origin = || Origin::File {
            path: path.to_path_buf(),
            line: None,
        };
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", origin())))?;
        let serde_json::Value::Object(map) = value else {
            return Err(CliError::Usage(format!(
                "{}: config must be a JSON object",
                origin()
            )));
        };
        let mut cfg = Self::default();
        for (key, v) in map {
            let text = json_scalar(&v).ok_or_else(|| {
                CliError::Usage(format!("{}: unsupported value for key '{key}'", origin()))
            })?;
            cfg.insert(&key, text, origin())?;
        }
        Ok(cfg)
    }

    /// Layer command-line values over this config. `tan_omega` and
    /// `b_over_J` are synonyms, so a flag for either replaces both.
    pub fn apply_flags(&mut self, flags: &[(&str, String)]) -> Result<(), CliError> {
        if flags
            .iter()
            .any(|(k, _)| *k == "tan_omega" || *k == "b_over_J")
        {
            self.entries.remove("tan_omega");
            self.entries.remove("b_over_J");
        }
        for (key, value) in flags {
            self.insert(key, value.clone(), Origin::Flag)?;
        }
        Ok(())
    }
}

fn json_scalar(v: &serde_json::Value) -> Option<String> {
    use serde_json::Value;
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(_) | Value::Object(_) => None,
                other => json_scalar(other),
            })
            .collect::<Option<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => None,
    }
}

/// Parse a real number or a multiple of π written `Npi/M` (`pi`, `-pi/2`,
/// `5pi/6`, `2pi`).
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(x) = t.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let coef = num.strip_suffix("pi")?.trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let den = match den {
        Some(d) => d.parse::<f64>().ok().filter(|d| *d != 0.0)?,
        None => 1.0,
    };
    let x = coef * PI / den;
    x.is_finite().then_some(x)
}

/// Comma-separated reals, or `linspace(start, stop, n)`.
pub fn parse_list(text: &str) -> Option<Vec<f64>> {
    let t = text.trim();
    if t.is_empty() {
        return Some(Vec::new());
    }
    if let Some(args) = t
        .strip_prefix("linspace(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let [a, b, n] = parts.as_slice() else {
            return None;
        };
        let (a, b) = (a.parse::<f64>().ok()?, b.parse::<f64>().ok()?);
        let n = n.parse::<usize>().ok()?;
        return Some(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect(),
        });
    }
    t.split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which correction modes a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Modes {
    Uncorrected,
    Corrected,
    Both,
}

impl Modes {
    pub fn flags(&self) -> &'static [bool] {
        match self {
            Modes::Uncorrected => &[false],
            Modes::Corrected => &[true],
            Modes::Both => &[false, true],
        }
    }
}

/// Gate selection for the `gate` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GateChoice {
    Exchange(GateKind),
    PhaseShiftedSwap,
}

pub const GATE_NAMES: &str = "swap, sqrt_swap, cnot, psw";

/// Validated configuration for one command.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub exchange: Option<ExchangeParams>,
    pub gate: Option<GateChoice>,
    pub field: Option<f64>,
    pub beta: Option<f64>,
    pub sweep: Option<SweepConfig>,
    pub modes: Modes,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: f64,
    pub stamp: bool,
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn text(&self, key: &str) -> Option<(&str, &Origin)> {
        self.raw.get(key).map(|v| (v.value.as_str(), &v.origin))
    }

    fn parse<T>(
        &self,
        key: &str,
        what: &str,
        f: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<T>, CliError> {
        match self.text(key) {
            None => Ok(None),
            Some((v, origin)) => f(v).map(Some).ok_or_else(|| {
                CliError::Usage(format!("{origin}: key '{key}': expected {what}, got '{v}'"))
            }),
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parse(key, "a finite real number", |v| {
            v.trim().parse::<f64>().ok().filter(|x| x.is_finite())
        })
    }

    fn angle(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parse(key, "an angle in radians or 'Npi/M'", parse_angle)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.parse(
            key,
            "a comma-separated list of reals or linspace(a,b,n)",
            parse_list,
        )
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>, CliError> {
        self.parse(key, "true or false", |v| match v.trim() {
            "true" | "1" | "yes" => Some(true),
            "false" | "0" | "no" => Some(false),
            _ => None,
        })
    }

    fn origin(&self, key: &str) -> String {
        self.raw
            .get(key)
            .map_or_else(|| "config".to_string(), |v| v.origin.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

impl RunConfig {
    pub fn build(command: Command, raw: &RawConfig) -> Result<Self, CliError> {
        let r = Reader { raw };

        let format = match r.text("format") {
            None => {
                if command == Command::Sweep {
                    Format::Csv
                } else {
                    Format::Json
                }
            }
            Some(("csv", _)) => Format::Csv,
            Some(("json", _)) => Format::Json,
            Some((other, origin)) => {
                return usage(format!(
                    "{origin}: key 'format': expected csv or json, got '{other}'"
                ))
            }
        };
        if format == Format::Csv && command != Command::Sweep {
            return usage(format!(
                "{}: csv output is only available for sweep; use json",
                r.origin("format")
            ));
        }

        let tol = r.real("tol")?.unwrap_or(match command {
            Command::Gate => 1e-10,
            _ => 1e-12,
        });
        if tol <= 0.0 {
            return usage(format!("{}: key 'tol' must be > 0", r.origin("tol")));
        }

        let tan_omega = r.real("tan_omega")?;
        let b_over_j = r.real("b_over_J")?;
        let anisotropy = match (tan_omega, b_over_j) {
            (Some(_), Some(_)) => {
                return usage(format!(
                    "{}: set only one of tan_omega / b_over_J (they are synonyms)",
                    r.origin("b_over_J")
                ))
            }
            (a, b) => a.or(b),
        };
        let j = r.real("J")?;
        let theta = r.angle("theta")?;
        let orientation = match r.text("orientation") {
            None => None,
            Some(("xy", _)) => Some("xy"),
            Some(("z", _)) => Some("z"),
            Some((other, origin)) => {
                return usage(format!(
                    "{origin}: key 'orientation': expected xy or z, got '{other}'"
                ))
            }
        };

        let field = r.real("B")?;
        let beta = r.real("beta")?;
        let modes = match r.text("corrected") {
            None => Modes::Both,
            Some(("both", _)) => Modes::Both,
            Some(_) => {
                if r.boolean("corrected")?.unwrap_or(false) {
                    Modes::Corrected
                } else {
                    Modes::Uncorrected
                }
            }
        };

        let out = r.text("out").map(|(v, _)| PathBuf::from(v));
        let stamp = r.boolean("stamp")?.unwrap_or(false);

        let mut cfg = RunConfig {
            command,
            exchange: None,
            gate: None,
            field,
            beta,
            sweep: None,
            modes,
            out,
            format,
            tol,
            stamp,
        };

        if command == Command::Sweep {
            if orientation == Some("z") {
                return usage(format!(
                    "{}: sweep varies theta and needs orientation xy",
                    r.origin("orientation")
                ));
            }
            let base = SweepConfig::reference(false);
            let gate = match r.text("sweep_gate") {
                None => base.gate,
                Some((v, origin)) => v.parse::<GateKind>().map_err(|_| {
                    CliError::Usage(format!(
                        "{origin}: key 'sweep_gate': unknown gate '{v}' (valid: swap, sqrt_swap, cnot)"
                    ))
                })?,
            };
            let sweep = SweepConfig {
                j: j.unwrap_or(base.j),
                tan_omega0: anisotropy.unwrap_or(base.tan_omega0),
                theta0: theta.unwrap_or(base.theta0),
                delta_omega_ratios: r
                    .list("delta_omega_ratios")?
                    .unwrap_or(base.delta_omega_ratios),
                delta_theta_ratios: r
                    .list("delta_theta_ratios")?
                    .unwrap_or(base.delta_theta_ratios),
                corrected: false,
                gate,
            };
            sweep
                .validate()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            cfg.sweep = Some(sweep);
            return Ok(cfg);
        }

        let Some(orientation) = orientation else {
            return usage("missing key 'orientation' (xy or z)");
        };
        let orientation = match orientation {
            "xy" => {
                let Some(theta) = theta else {
                    return usage("orientation xy needs 'theta' (radians or Npi/M)");
                };
                Orientation::Xy { theta }
            }
            _ => {
                if theta.is_some() {
                    return usage(format!(
                        "{}: 'theta' is not used with orientation z",
                        r.origin("theta")
                    ));
                }
                Orientation::Z
            }
        };
        let Some(anisotropy) = anisotropy else {
            return usage("missing anisotropy: set one of tan_omega / b_over_J");
        };
        let exchange = ExchangeParams::new(j.unwrap_or(1.0), orientation, anisotropy)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.exchange = Some(exchange);

        match command {
            Command::Gate => {
                let Some((name, origin)) = r.text("gate") else {
                    return usage(format!("missing key 'gate' (valid: {GATE_NAMES})"));
                };
                let choice = if name == "psw" {
                    GateChoice::PhaseShiftedSwap
                } else {
                    GateChoice::Exchange(name.parse::<GateKind>().map_err(|_| {
                        CliError::Usage(format!(
                            "{origin}: unknown gate '{name}' (valid: {GATE_NAMES})"
                        ))
                    })?)
                };
                if choice == GateChoice::PhaseShiftedSwap && field.is_none() {
                    return usage("gate psw needs the field strength 'B'");
                }
                cfg.gate = Some(choice);
            }
            Command::Fields if field.is_none() => {
                return usage("fields needs the field strength 'B'");
            }
            Command::Thermal => match beta {
                None => return usage("thermal needs the inverse temperature 'beta'"),
                Some(b) if b < 0.0 => {
                    return usage(format!("{}: 'beta' must be >= 0", r.origin("beta")))
                }
                _ => {}
            },
            _ => {}
        }
        Ok(cfg)
    }
}
