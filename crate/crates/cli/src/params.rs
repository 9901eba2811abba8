//! Command parameter tables, config files and flag merging.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Count,
    /// Comma-separated list of names.
    List,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn p(key: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> Param {
    Param {
        key,
        kind,
        default,
        help,
    }
}

use Kind::{Count, Float, List};

const VERIFY_PARAMS: &[Param] = &[
    p("seed", Count, Some("2009"), "seed for sampled states"),
    p("samples", Count, Some("20"), "random states per sampled check"),
    p("only", List, None, "comma-separated suites or checks to run"),
];

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
    /// Accepts `tol.<check>` keys.
    pub tolerances: bool,
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "qubit-dist",
        about: "Two-level energy distribution from a Bloch vector",
        params: &[
            p("epsilon", Float, None, "bias energy epsilon"),
            p("delta", Float, None, "tunnelling energy delta"),
            p("hbar", Float, Some("1"), "reduced Planck constant"),
            p("sx", Float, None, "<sigma_x>"),
            p("sy", Float, Some("0"), "<sigma_y>"),
            p("sz", Float, None, "<sigma_z>"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "qubit-crossover",
        about: "Weak-coupling excitation probability and thermal crossover temperature",
        params: &[
            p("gap", Float, None, "level spacing E2 - E1"),
            p("alpha", Float, None, "dimensionless coupling (single point)"),
            p("cutoff", Float, None, "cutoff ratio omega_c / delta"),
            p("k", Float, Some("1"), "Boltzmann constant"),
            p("alpha-max", Float, None, "sweep alpha over (0, alpha-max] instead"),
            p("steps", Count, Some("10"), "points in the alpha sweep"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "osc-cumulants",
        about: "Energy cumulants 1-4: closed form, finite differences and Fock sums",
        params: &[
            p("x", Float, None, "shape variable x = 2 m omega <q^2> / hbar"),
            p("y", Float, None, "shape variable y = 2 <p^2> / (m omega hbar)"),
            p("quantum", Float, Some("1"), "hbar omega"),
            p("step", Float, Some("0.2"), "finite-difference base step"),
            p("levels", Count, Some("4"), "Richardson levels"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "osc-probs",
        about: "Fock-state probabilities rho_nn",
        params: &[
            p("x", Float, None, "shape variable x"),
            p("y", Float, None, "shape variable y"),
            p("nmax", Count, Some("10"), "highest Fock level"),
            p("quantum", Float, Some("1"), "hbar omega"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "osc-purity",
        about: "Purity of the Gaussian oscillator state, closed form and quadrature",
        params: &[
            p("x", Float, None, "shape variable x (with y)"),
            p("y", Float, None, "shape variable y (with x)"),
            p("q2", Float, None, "<q^2> (with p2)"),
            p("p2", Float, None, "<p^2> (with q2)"),
            p("mass", Float, Some("1"), "oscillator mass"),
            p("omega", Float, Some("1"), "oscillator frequency"),
            p("hbar", Float, Some("1"), "reduced Planck constant"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "ohmic-trajectory",
        about: "Oscillator state along the ohmic-bath coupling sweep",
        params: &[
            p("alpha-max", Float, Some("0.9"), "largest coupling"),
            p("steps", Count, Some("10"), "grid points from 0 to alpha-max"),
            p("cutoff", Float, Some("10"), "cutoff ratio omega_c / omega"),
            p("nmax", Count, Some("3"), "highest Fock level"),
        ],
        tolerances: false,
    },
    CommandSpec {
        name: "oracle-verify",
        about: "Brute-force oracle checks (quadrature and exact diagonalization)",
        params: VERIFY_PARAMS,
        tolerances: true,
    },
    CommandSpec {
        name: "verify-all",
        about: "Every verification suite",
        params: VERIFY_PARAMS,
        tolerances: true,
    },
];

/// Keys accepted by every command.
pub const OUTPUT_KEYS: &[&str] = &["format", "output"];

pub fn command_spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

pub fn build_cli() -> Command {
    let mut cli = Command::new("gsfluct")
        .version(gsfluct::VERSION)
        .about("Ground-state energy fluctuations of qubits and oscillators coupled to an environment")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about).allow_negative_numbers(true);
        for param in spec.params {
            let mut arg = Arg::new(param.key).long(param.key).value_name("VALUE").help(param.help);
            if let Some(d) = param.default {
                arg = arg.help(format!("{} [default: {d}]", param.help));
            }
            sub = sub.arg(arg);
        }
        if spec.tolerances {
            sub = sub.arg(
                Arg::new("tol")
                    .long("tol")
                    .value_name("CHECK=TOL")
                    .action(ArgAction::Append)
                    .help("override a tolerance, keyed by check or suite name"),
            );
        }
        sub = sub
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("key = value file, or JSON output of a previous run"),
            )
            .arg(
                Arg::new("format")
                    .long("format")
                    .value_name("csv|json")
                    .help("output format [default: csv]"),
            )
            .arg(
                Arg::new("output")
                    .long("output")
                    .value_name("FILE")
                    .help("write here instead of stdout"),
            );
        cli = cli.subcommand(sub);
    }
    cli
}

/// Merged configuration: config file values overlaid by explicit flags.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| anyhow!("'{key}' expects a number, got '{v}'"))
            })
            .transpose()
    }

    pub fn require_float(&self, key: &str) -> Result<f64> {
        self.float(key)?
            .ok_or_else(|| anyhow!("missing required parameter '{key}'"))
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        let v = self
            .get(key)
            .ok_or_else(|| anyhow!("missing required parameter '{key}'"))?;
        v.trim()
            .parse::<usize>()
            .map_err(|_| anyhow!("'{key}' expects a non-negative integer, got '{v}'"))
    }

    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// `tol.<name>` entries.
    pub fn tolerances(&self) -> Result<BTreeMap<String, f64>> {
        self.values
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("tol.").map(|name| (name, v)))
            .map(|(name, v)| {
                let t = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| anyhow!("tolerance '{name}' expects a number, got '{v}'"))?;
                Ok((name.to_string(), t))
            })
            .collect()
    }

    pub fn format(&self) -> Result<Format> {
        match self.get("format").unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format '{other}'; valid formats: csv, json"),
        }
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.get("output").map(PathBuf::from)
    }

    /// Effective configuration for the JSON report, in parameter order, with
    /// numbers as JSON numbers. The output path is left out.
    pub fn to_json(&self, spec: &CommandSpec) -> Result<Map<String, Value>> {
        let mut map = Map::new();
        map.insert("command".into(), Value::String(spec.name.into()));
        for param in spec.params {
            if self.get(param.key).is_none() {
                continue;
            }
            let value = match param.kind {
                Kind::Float => json_number(self.require_float(param.key)?),
                Kind::Count => Value::from(self.count(param.key)?),
                Kind::List => Value::String(self.list(param.key).join(",")),
            };
            map.insert(param.key.into(), value);
        }
        for (name, tol) in self.tolerances()? {
            map.insert(format!("tol.{name}"), json_number(tol));
        }
        map.insert(
            "format".into(),
            Value::String(self.get("format").unwrap_or("csv").into()),
        );
        Ok(map)
    }
}

pub fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn valid_keys(spec: &CommandSpec) -> Vec<String> {
    let mut keys: Vec<String> = spec.params.iter().map(|p| p.key.to_string()).collect();
    if spec.tolerances {
        keys.push("tol.<check>".into());
    }
    keys.extend(OUTPUT_KEYS.iter().map(|k| k.to_string()));
    keys
}

fn check_key(spec: &CommandSpec, key: &str) -> Result<()> {
    let known = spec.params.iter().any(|p| p.key == key)
        || OUTPUT_KEYS.contains(&key)
        || (spec.tolerances && key.starts_with("tol.") && key.len() > 4);
    if !known {
        bail!(
            "unknown key '{key}' for {}; valid keys: {}",
            spec.name,
            valid_keys(spec).join(", ")
        );
    }
    Ok(())
}

/// Reads a flat `key = value` file (`#` starts a comment), or a JSON object,
/// taking its `"config"` member when present.
pub fn read_config(path: &Path, spec: &CommandSpec) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = BTreeMap::new();
    if text.trim_start().starts_with('{') {
        let root: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?;
        let obj = root.get("config").unwrap_or(&root);
        let obj = obj
            .as_object()
            .ok_or_else(|| anyhow!("JSON config must be an object"))?;
        for (k, v) in obj {
            if k == "command" {
                if v.as_str() != Some(spec.name) {
                    bail!("config was written for command {v}, not {}", spec.name);
                }
                continue;
            }
            let s = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => bail!("config value for '{k}' must be a string or number, got {other}"),
            };
            check_key(spec, k)?;
            out.insert(k.clone(), s);
        }
        return Ok(out);
    }
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let k = k.trim();
        check_key(spec, k)?;
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Config file first, then explicit flags, then defaults for what is missing.
pub fn settings(spec: &CommandSpec, m: &ArgMatches) -> Result<Settings> {
    let mut values = match m.get_one::<String>("config") {
        Some(path) => read_config(Path::new(path), spec)?,
        None => BTreeMap::new(),
    };
    let explicit = |id: &str| m.value_source(id) == Some(ValueSource::CommandLine);
    for param in spec.params {
        if explicit(param.key) {
            values.insert(
                param.key.into(),
                m.get_one::<String>(param.key).cloned().unwrap_or_default(),
            );
        }
    }
    for key in OUTPUT_KEYS {
        if explicit(key) {
            values.insert(key.to_string(), m.get_one::<String>(key).cloned().unwrap_or_default());
        }
    }
    if spec.tolerances && explicit("tol") {
        for item in m.get_many::<String>("tol").into_iter().flatten() {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("--tol expects CHECK=TOL, got '{item}'"))?;
            values.insert(format!("tol.{}", k.trim()), v.trim().to_string());
        }
    }
    for param in spec.params {
        if let Some(d) = param.default {
            values.entry(param.key.into()).or_insert_with(|| d.to_string());
        }
    }
    Ok(Settings { values })
}
