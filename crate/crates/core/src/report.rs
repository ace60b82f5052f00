//! Command dispatch and reports shared by the command-line tool and tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::degenerations::{self, DegenerationError, Divisor};
use crate::jets::{self, JetError};
use crate::picard::{self, format_rational, q, ChernLedger, G0BetaReading, PicardError, Slope};
use crate::szego::{SzegoContext, SzegoError};
use crate::theta::{self, MultiIndex, PeriodMatrix, ThetaCharacteristic, ThetaError, Tolerance};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Szego(#[from] SzegoError),
    #[error(transparent)]
    Degeneration(#[from] DegenerationError),
    #[error(transparent)]
    Picard(#[from] PicardError),
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for computation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::FileNotFound(_) | CliError::Io { .. } => 2,
            CliError::Theta(_) | CliError::Jet(JetError::Theta(_) | JetError::DimensionMismatch { .. }) => 2,
            CliError::Szego(SzegoError::Theta(_) | SzegoError::OddCharacteristic(_)) => 2,
            CliError::Degeneration(e) => match e {
                DegenerationError::InvalidModel(_) => 3,
                _ => 2,
            },
            CliError::Picard(
                PicardError::GenusTooSmall { .. } | PicardError::IndexOutOfRange { .. } | PicardError::InvalidRational(_),
            ) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 iff every check passes.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                let _ = writeln!(out, "{k}: {}", text_value(v));
            }
        } else {
            let _ = writeln!(out, "results: {}", text_value(&self.results));
        }
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.render_text(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardQuery {
    SzegoHodge,
    Slope,
    PullbackDelta0,
    Ledger,
}

impl PicardQuery {
    fn name(self) -> &'static str {
        match self {
            PicardQuery::SzegoHodge => "szego-hodge",
            PicardQuery::Slope => "slope",
            PicardQuery::PullbackDelta0 => "pullback-delta0",
            PicardQuery::Ledger => "ledger",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Theta { period: PathBuf, char: String, point: Option<String>, deriv: Option<String> },
    Jet { period: PathBuf, char: String },
    Quartic { period: PathBuf, char: String },
    Szego { period: PathBuf, char: String, point: String },
    Degeneration { divisor: String, g: u64, i: Option<u64> },
    Picard { query: PicardQuery, g: u64, g0_reading: G0BetaReading, replay: Option<PathBuf> },
    VerifyAll { quick: bool, seed: u64 },
}

impl Command {
    /// The invocation as it would be typed.
    pub fn echo(&self) -> String {
        let p = |x: &Path| x.display().to_string();
        match self {
            Command::Theta { period, char, point, deriv } => {
                let mut s = format!("theta --period {} --char \"{char}\"", p(period));
                if let Some(pt) = point {
                    s += &format!(" --point \"{pt}\"");
                }
                if let Some(d) = deriv {
                    s += &format!(" --deriv \"{d}\"");
                }
                s
            }
            Command::Jet { period, char } => format!("jet --period {} --char \"{char}\"", p(period)),
            Command::Quartic { period, char } => format!("quartic --period {} --char \"{char}\"", p(period)),
            Command::Szego { period, char, point } => {
                format!("szego eval --period {} --char \"{char}\" --point \"{point}\"", p(period))
            }
            Command::Degeneration { divisor, g, i } => {
                let mut s = format!("degeneration --divisor {divisor} --g {g}");
                if let Some(i) = i {
                    s += &format!(" --i {i}");
                }
                s
            }
            Command::Picard { query, g, g0_reading, replay } => {
                let mut s = format!("picard {} --g {g}", query.name());
                if *g0_reading == G0BetaReading::Twelve {
                    s += " --g0-beta0 12";
                }
                if let Some(r) = replay {
                    s += &format!(" --replay {}", p(r));
                }
                s
            }
            Command::VerifyAll { quick, seed } => {
                format!("verify-all{} --seed {seed}", if *quick { " --quick" } else { "" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub tolerance: Tolerance,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    if !path.exists() {
        return Err(CliError::FileNotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn parse_char(s: &str) -> Result<ThetaCharacteristic, CliError> {
    s.parse().map_err(|e: ThetaError| CliError::Parse(e.to_string()))
}

/// Parses `"re,im;re,im;..."`.
pub fn parse_point(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(';')
        .map(|part| {
            let mut it = part.split(',').map(|x| x.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(re)), Some(Ok(im)), None) => Ok(Complex64::new(re, im)),
                _ => Err(CliError::Parse(format!("bad complex coordinate {part:?}; expected re,im"))),
            }
        })
        .collect()
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.into(), pass, detail }
}

fn report(cfg: &RunConfig, seed: Option<u64>, results: Value, checks: Vec<Check>) -> Report {
    Report { command: cfg.command.echo(), seed, results, checks }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let t = &cfg.tolerance;
    match &cfg.command {
        Command::Theta { period, char, point, deriv } => {
            let p: PeriodMatrix = read_json(period)?;
            let c = parse_char(char)?;
            let z = match point {
                Some(s) => parse_point(s)?,
                None => vec![Complex64::new(0.0, 0.0); p.genus()],
            };
            let mu = match deriv {
                Some(s) => s.parse::<MultiIndex>().map_err(|e| CliError::Parse(e.to_string()))?,
                None => MultiIndex::value(),
            };
            let v = theta::theta_deriv(&p, &z, &c, &mu, t)?;
            let results = json!({
                "char": c.to_string(),
                "parity": c.parity().to_string(),
                "derivative": mu.indices(),
                "value": c_json(v),
            });
            Ok(report(cfg, None, results, vec![]))
        }
        Command::Jet { period, char } => {
            let p: PeriodMatrix = read_json(period)?;
            let c = parse_char(char)?;
            let jet = jets::theta_jet(&p, &c, t)?;
            let results = json!({
                "char": c.to_string(),
                "parity": c.parity().to_string(),
                "theta0": c_json(jet.theta0),
                "theta2": jet.theta2.rows().into_iter().map(|r| r.into_iter().map(c_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "theta4": jets::QuarticForm { coeffs: jet.theta4.clone() }.to_json(),
            });
            Ok(report(cfg, None, results, vec![]))
        }
        Command::Quartic { period, char } => {
            let p: PeriodMatrix = read_json(period)?;
            let c = parse_char(char)?;
            let f = jets::scorza_quartic(&jets::theta_jet(&p, &c, t)?);
            let beta = jets::beta_tensor(&p, &c, t)?;
            let diff = jets::relative_difference(&f, &beta);
            let results = json!({
                "char": c.to_string(),
                "quartic": f.to_json(),
                "beta_relative_difference": diff,
            });
            let checks = vec![check(
                "beta tensor agrees with the polynomial route",
                diff < verify::limits::BETA_REL,
                format!("relative difference {diff:.2e}"),
            )];
            Ok(report(cfg, None, results, checks))
        }
        Command::Szego { period, char, point } => {
            let p: PeriodMatrix = read_json(period)?;
            let c = parse_char(char)?;
            let u = parse_point(point)?;
            let ctx = SzegoContext::new(p, c, t)?;
            let v = ctx.szego(&u)?;
            let results = json!({ "value": c_json(v), "on_locus": v.norm() < t.eps_zero });
            Ok(report(cfg, None, results, vec![]))
        }
        Command::Degeneration { divisor, g, i } => {
            let d: Divisor = divisor.parse()?;
            let m = degenerations::limit_model(d, *g, *i)?;
            let pa = m.arithmetic_genus();
            let expected = d.expected_arithmetic_genus(*g);
            let results = json!({
                "divisor": d.to_string(),
                "g": g,
                "i": i,
                "model": m,
                "sigma": m.sigma(),
                "delta": m.delta(),
                "nu": m.nu(),
                "arithmetic_genus": pa,
                "expected": expected,
            });
            let mut checks = vec![check("arithmetic genus", pa == expected, format!("p_a = {pa}, expected {expected}"))];
            if let Some(stable) = m.genus_zero_stable() {
                checks.push(check("rational components stable", stable, "each genus-0 component has >= 3 node branches".into()));
            }
            Ok(report(cfg, None, results, checks))
        }
        Command::Picard { query, g, g0_reading, replay } => run_picard(cfg, *query, *g, *g0_reading, replay.as_deref()),
        Command::VerifyAll { quick, seed } => {
            let r = verify::verify_all(&VerifyOptions { quick: *quick, seed: *seed, tol: *t });
            Ok(Report { command: cfg.command.echo(), ..r })
        }
    }
}

fn class_value(d: &picard::SpinDivisorClass) -> Value {
    let mut v = serde_json::to_value(d).expect("class serializes");
    v["expression"] = Value::String(d.to_string());
    v
}

fn run_picard(
    cfg: &RunConfig,
    query: PicardQuery,
    g: u64,
    reading: G0BetaReading,
    replay: Option<&Path>,
) -> Result<Report, CliError> {
    let gi = g as i64;
    match query {
        PicardQuery::SzegoHodge => {
            let d = picard::szego_hodge_class_with(g, reading)?;
            let checks = picard::test_curve_residuals(&d, reading)?
                .into_iter()
                .map(|(name, want, got)| {
                    check(
                        &format!("{name} . lambda_SzH"),
                        want == got,
                        format!("{} (required {})", format_rational(&got), format_rational(&want)),
                    )
                })
                .collect();
            Ok(report(cfg, None, class_value(&d), checks))
        }
        PicardQuery::Slope => {
            let d = picard::szego_hodge_class(g)?;
            let s = picard::slope(&d);
            let bound = q(4, 1) + q(32 * gi - 16, 69 * gi - 21);
            let results = json!({ "slope": s, "bound": format_rational(&bound) });
            let checks = vec![check(
                "slope = 4 + (32g-16)/(69g-21)",
                s == Slope::Finite(bound.clone()),
                format!("{s} vs {}", format_rational(&bound)),
            )];
            Ok(report(cfg, None, results, checks))
        }
        PicardQuery::PullbackDelta0 => {
            let d = picard::pullback_delta0_prime(g)?;
            let checks = picard::node_count_crosscheck(g)?
                .into_iter()
                .map(|(label, mult, nodes)| {
                    check(
                        &format!("{label} multiplicity = node count"),
                        mult == nodes,
                        format!("{} vs {}", format_rational(&mult), format_rational(&nodes)),
                    )
                })
                .collect();
            Ok(report(cfg, None, class_value(&d), checks))
        }
        PicardQuery::Ledger => {
            let (weight, computed) = picard::chern_weight(g)?;
            let ledger: ChernLedger = match replay {
                Some(path) => read_json(path)?,
                None => computed,
            };
            let expected = q(77 * gi - 25, 4);
            let final_value = ledger.value(picard::LAMBDA_SZH).cloned();
            let results = json!({
                "weight": format_rational(&weight),
                "ledger": ledger,
            });
            let checks = vec![
                verify::ledger_replay_check(&ledger),
                check(
                    "weight = (77g-25)/4",
                    final_value.as_ref() == Some(&expected),
                    format!(
                        "{} vs {}",
                        final_value.map(|v| format_rational(&v)).unwrap_or_else(|| "missing".into()),
                        format_rational(&expected)
                    ),
                ),
            ];
            Ok(report(cfg, None, results, checks))
        }
    }
}
