//! Command-line front end: argument parsing, dispatch to the library, and
//! the on-disk artifacts (curve and report CSVs, a JSON-lines summary and a
//! manifest with content hashes).
//!
//! Exit status: 0 on success, 1 when a solve does not converge or a
//! built-in check fails, 2 on invalid input.

mod config;
mod registry;

pub use config::{parse_str, validate_file, Diagnostic, RunConfig, Source, Value};
pub use registry::{keys_for, lookup, CommandKind, KeySpec, Scope, ValueKind, KEYS};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::closedform::{analytic_bending_energy, reconstruct};
use crate::curve::{bending_energy, read_csv, to_csv, DiscreteCurve};
use crate::experiments::{
    concentration_member, concentration_sequence, dichotomy_probe, minimal_energy_map, oscillation_member,
    oscillation_sequence, reports_to_csv, sequence_checks, stability_sweep_along, Check, EnergySlice, Perturbation,
    ProbeFamily, Summary,
};
use crate::solver::{minimize_with, verify_critical, with_thread_cap};
use crate::{ElasticaParams, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// The clap command tree, generated from [`KEYS`].
pub fn command() -> clap::Command {
    let mut root = clap::Command::new("elastica")
        .about("Euler elastica toolkit")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in CommandKind::ALL {
        let mut sub = clap::Command::new(cmd.name()).about(cmd.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("Flat `key = value` config file; command-line values take precedence"),
        );
        for spec in keys_for(cmd) {
            let mut help = spec.help.to_string();
            if let Some(d) = spec.default {
                let _ = write!(help, " [default: {d}]");
            }
            if !spec.choices.is_empty() {
                let _ = write!(help, " [one of: {}]", spec.choices.join(", "));
            }
            sub = sub.arg(
                Arg::new(spec.name)
                    .long(spec.flag())
                    .value_name(spec.name.to_uppercase())
                    .allow_hyphen_values(true)
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        root = root.subcommand(sub);
    }
    root.subcommand(
        clap::Command::new("validate")
            .about("Check a config file (its `command` entry selects the schema) without running it")
            .arg(Arg::new("file").required(true).value_name("FILE")),
    )
}

fn report(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("error: {d}");
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to stderr.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    if name == "validate" {
        let path = PathBuf::from(sub.get_one::<String>("file").expect("required"));
        let diags = match std::fs::read_to_string(&path) {
            Ok(text) => validate_file(&path, &text),
            Err(e) => vec![Diagnostic {
                path: Some(path.clone()),
                line: None,
                key: None,
                message: e.to_string(),
            }],
        };
        if diags.is_empty() {
            println!("{}: ok", path.display());
            return EXIT_OK;
        }
        report(&diags);
        return EXIT_INVALID;
    }
    let cmd = CommandKind::from_name(name).expect("registered command");
    let file = sub.get_one::<String>("config").map(PathBuf::from);
    let text = match &file {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_INVALID;
            }
        },
        None => None,
    };
    let cli: Vec<(String, String)> = keys_for(cmd)
        .filter_map(|k| sub.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect();
    let cfg = match RunConfig::resolve(cmd, file.as_deref().zip(text.as_deref()), &cli) {
        Ok(c) => c,
        Err(d) => {
            report(&d);
            return EXIT_INVALID;
        }
    };
    match with_thread_cap(|| run(&cfg)) {
        Ok(out) => {
            for c in out.summary.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} {}", c.name, c.detail);
            }
            println!("wrote {} files to {}", out.files.len(), cfg.output_dir().display());
            if out.success() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Infeasible { .. } | Error::Parse { .. } | Error::InvalidModuli(_) => {
                    EXIT_INVALID
                }
                _ => EXIT_FAILED,
            }
        }
    }
}

/// Artifacts of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Output files relative to the output directory, manifest last.
    pub files: Vec<PathBuf>,
    pub converged: bool,
    pub summary: Summary,
}

impl Outcome {
    pub fn success(&self) -> bool {
        self.converged && self.summary.passed()
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    sha256: String,
    bytes: usize,
}

/// Collects output files and their hashes.
struct Outputs {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            entries: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        let digest = Sha256::digest(contents.as_bytes());
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            bytes: contents.len(),
        });
        Ok(())
    }

    fn curve(&mut self, name: &str, curve: &DiscreteCurve) -> Result<()> {
        self.write(name, &to_csv(curve))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(mut self, cfg: &RunConfig, converged: bool, summary: Summary) -> Result<Outcome> {
        let mut line = serde_json::to_string(&summary)?;
        line.push('\n');
        self.write("summary.jsonl", &line)?;
        let manifest = serde_json::json!({
            "tool": "elastica",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg.to_json(),
            "files": self.entries,
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(self.dir.join("manifest.json"), text)?;
        let mut files: Vec<PathBuf> = self.entries.iter().map(|e| PathBuf::from(&e.path)).collect();
        files.push(PathBuf::from("manifest.json"));
        Ok(Outcome {
            files,
            converged,
            summary,
        })
    }
}

fn summary(cfg: &RunConfig, checks: Vec<Check>) -> Summary {
    Summary {
        experiment: cfg.command.name().to_string(),
        seed: cfg.seed(),
        parameters: cfg.to_json(),
        checks,
    }
}

fn invalid(d: Diagnostic) -> Error {
    Error::InvalidArgument(d.to_string())
}

/// Executes a resolved configuration, writing artifacts to its output
/// directory.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outputs::new(cfg.output_dir())?;
    let n = cfg.segments();
    let (converged, checks) = match cfg.command {
        CommandKind::Family => run_family(cfg, &mut out)?,
        CommandKind::Oscillation | CommandKind::Concentration => {
            let jmax = cfg.int("jmax") as usize;
            let (family, reports) = if cfg.command == CommandKind::Oscillation {
                (ProbeFamily::Oscillation, oscillation_sequence(jmax, n)?)
            } else {
                (ProbeFamily::Concentration, concentration_sequence(jmax, n)?)
            };
            for r in &reports {
                let p = match family {
                    ProbeFamily::Oscillation => oscillation_member(r.index)?,
                    _ => concentration_member(r.index)?.0,
                };
                out.curve(&format!("curve_j{:03}.csv", r.index), &reconstruct(&p, 1.0, n)?)?;
            }
            out.write("report.csv", &reports_to_csv(&reports))?;
            (true, sequence_checks(family, &reports))
        }
        CommandKind::Dichotomy => {
            let fixed = ProbeFamily::Constant {
                params: ElasticaParams::orbitlike(0.5, 2.0, -0.3)?,
                length: 1.5,
            };
            let families = [fixed, ProbeFamily::Oscillation, ProbeFamily::Concentration];
            let table = dichotomy_probe(&families, cfg.int("jmax") as usize, n)?;
            let mut csv = String::from("family,j,lambda,c1,c2\n");
            for r in &table.rows {
                let _ = writeln!(csv, "{},{},{},{},{}", r.family, r.j, r.lambda, r.c1, r.c2);
            }
            out.write("dichotomy.csv", &csv)?;
            out.json("verdicts.json", &table.verdicts)?;
            let checks = table
                .verdicts
                .iter()
                .map(|v| {
                    Check::new(
                        &format!("{} consistent", v.family),
                        v.consistent,
                        format!("lambda bounded: {}, limit: {:?}, C2 floor: {}", v.lambda_bounded, v.limit, v.c2_floor),
                    )
                })
                .collect();
            (true, checks)
        }
        CommandKind::Minimize | CommandKind::Penalized => run_minimize(cfg, &mut out)?,
        CommandKind::EnergyMap => run_energy_map(cfg, &mut out)?,
        CommandKind::Stability => run_stability(cfg, &mut out)?,
        CommandKind::Verify => {
            let gamma = cfg.boundary().map_err(invalid)?;
            let curve = read_csv(Path::new(cfg.string("curve")))?;
            let rep = verify_critical(&curve, &gamma, cfg.constraint(), &cfg.solver_config())?;
            out.json("verification.json", &rep)?;
            let detail = format!(
                "residual {:.3e} (multiplier {}), boundary errors {:.1e}",
                rep.residual_norm,
                rep.lambda,
                rep.boundary.max()
            );
            let checks = rep.checks.iter().map(|(name, ok)| Check::new(name, *ok, detail.clone())).collect();
            (rep.passed(), checks)
        }
    };
    out.finish(cfg, converged, summary(cfg, checks))
}

fn run_family(cfg: &RunConfig, out: &mut Outputs) -> Result<(bool, Vec<Check>)> {
    let p = cfg.family_params()?;
    let length = cfg.float("length");
    let n = cfg.segments();
    let curve = reconstruct(&p, length, n)?;
    out.curve("curve.csv", &curve)?;
    let mut csv = String::from("s,k_squared,torsion,killing_squared,cylindrical_radius\n");
    let a2 = p.killing * p.killing;
    let mut drift: f64 = 0.0;
    for i in 0..=n {
        let s = length * i as f64 / n as f64;
        let torsion = p.torsion(s).map(|t| t.to_string()).unwrap_or_default();
        let j2 = p.killing_squared_at(s)?;
        drift = drift.max((j2 - a2).abs() / a2.max(f64::MIN_POSITIVE));
        let radius = p.cylindrical_radius(s).map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{s},{},{torsion},{j2},{radius}", p.curvature_squared(s));
    }
    out.write("invariants.csv", &csv)?;
    let analytic = analytic_bending_energy(&p, length);
    let discrete = bending_energy(&curve)?;
    out.json(
        "params.json",
        &serde_json::json!({ "params": p, "length": length, "energy": analytic, "discrete_energy": discrete }),
    )?;
    let checks = vec![
        Check::new("killing magnitude constant", drift <= 1e-8, format!("max relative drift {drift:e}")),
        Check::new(
            "discrete energy",
            (discrete - analytic).abs() <= 1e-3 * analytic.max(1e-12),
            format!("discrete {discrete}, closed form {analytic}"),
        ),
    ];
    Ok((true, checks))
}

#[derive(Serialize)]
struct ResultRecord {
    energy: f64,
    length: f64,
    lambda_est: f64,
    el_residual_norm: f64,
    constraint_violation: f64,
    converged: bool,
    starts_used: usize,
    start: usize,
    turning: Option<f64>,
}

fn run_minimize(cfg: &RunConfig, out: &mut Outputs) -> Result<(bool, Vec<Check>)> {
    let gamma = cfg.boundary().map_err(invalid)?;
    let r = minimize_with(&gamma, cfg.constraint(), &cfg.solver_config())?;
    out.curve("curve.csv", &r.curve)?;
    out.json(
        "result.json",
        &ResultRecord {
            energy: r.energy,
            length: r.length,
            lambda_est: r.lambda_est,
            el_residual_norm: r.el_residual_norm,
            constraint_violation: r.constraint_violation,
            converged: r.converged,
            starts_used: r.starts_used,
            start: r.start,
            turning: r.turning,
        },
    )?;
    if cfg.boolean("telemetry") {
        let mut text = String::new();
        for rec in &r.telemetry {
            text.push_str(&serde_json::to_string(rec)?);
            text.push('\n');
        }
        out.write("telemetry.jsonl", &text)?;
    }
    let checks = vec![Check::new(
        "converged",
        r.converged,
        format!("residual {:e}, violation {:e}", r.el_residual_norm, r.constraint_violation),
    )];
    Ok((r.converged, checks))
}

fn run_energy_map(cfg: &RunConfig, out: &mut Outputs) -> Result<(bool, Vec<Check>)> {
    let gamma = cfg.boundary().map_err(invalid)?;
    let (lo, hi) = (cfg.float("length_min"), cfg.float("length_max"));
    let slice = match (cfg.opt_float("angle1_min"), cfg.opt_float("angle1_max")) {
        (Some(a), Some(b)) => EnergySlice::LengthAndAngle {
            p0: [gamma.p0[0], gamma.p0[1]],
            p1: [gamma.p1[0], gamma.p1[1]],
            angle0: gamma.v0[1].atan2(gamma.v0[0]),
            angle1: (a, b),
            length: (lo, hi),
        },
        _ => EnergySlice::Length { gamma, min: lo, max: hi },
    };
    let map = minimal_energy_map(&slice, cfg.int("resolution") as usize, &cfg.solver_config())?;
    let mut csv = String::from("cell,length,angle1,energy,converged,class,error\n");
    for p in &map.points {
        let cell: Vec<String> = p.cell.iter().map(|c| c.to_string()).collect();
        let angle = p.coords.get(1).map(|a| a.to_string()).unwrap_or_default();
        let energy = p.energy.map(|e| e.to_string()).unwrap_or_default();
        let class = p.class.map(|c| format!("{c:?}")).unwrap_or_default();
        let err = p.error.clone().unwrap_or_default().replace('"', "'");
        let _ = writeln!(csv, "{},{},{angle},{energy},{},{class},\"{err}\"", cell.join(":"), p.coords[0], p.converged);
    }
    out.write("energy_map.csv", &csv)?;
    let solved = map.points.iter().filter(|p| p.energy.is_some()).count();
    let checks = vec![Check::new(
        "points solved",
        solved > 0,
        format!("{solved} of {}, max adjacent jump {}", map.points.len(), map.max_adjacent_jump),
    )];
    Ok((solved > 0, checks))
}

fn run_stability(cfg: &RunConfig, out: &mut Outputs) -> Result<(bool, Vec<Check>)> {
    let gamma = cfg.boundary().map_err(invalid)?;
    let constraint = cfg.constraint();
    let direction = if cfg.string("direction") == "closing" {
        Perturbation {
            dp0: [0.0; 3],
            dp1: gamma.v0,
            dv0: [0.0; 3],
            dv1: [0.0; 3],
            dparam: 0.0,
        }
    } else {
        Perturbation::random(&gamma, cfg.seed())
    };
    let schedule: Vec<f64> = (1..=cfg.int("kmax")).map(|k| 0.5f64.powi(k as i32)).collect();
    let solver = cfg.solver_config();
    let rep = stability_sweep_along(&gamma, constraint, &schedule, &direction, &solver)?;
    out.curve("reference_curve.csv", &rep.reference_curve)?;
    let mut rows = vec![rep.reference.clone()];
    rows.extend(rep.rows.iter().cloned());
    out.write("report.csv", &reports_to_csv(&rows))?;
    // Closing up closed data is the one sweep expected to jump.
    let mut checks = if cfg.string("direction") == "closing" && gamma.is_closed() {
        vec![Check::new("discontinuity flagged", rep.discontinuity, format!("final C2 {}", rep.final_c2))]
    } else {
        vec![
            Check::new("C2 monotone", rep.c2_monotone, String::new()),
            Check::new("final C2 at most 1e-3", rep.final_c2 <= 1e-3, format!("final C2 {}", rep.final_c2)),
            Check::new("no discontinuity", !rep.discontinuity, String::new()),
        ]
    };
    for (delta, why) in &rep.skipped {
        checks.push(Check::new("skipped", true, format!("delta {delta}: {why}")));
    }
    Ok((rep.reference.converged, checks))
}
