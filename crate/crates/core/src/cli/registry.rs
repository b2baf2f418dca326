//! The configuration keys: their types, defaults and the commands that
//! accept them. Both the command-line parser and the config-file checker
//! are driven by this table.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Family,
    Oscillation,
    Concentration,
    Dichotomy,
    Minimize,
    Penalized,
    EnergyMap,
    Stability,
    Verify,
}

impl CommandKind {
    pub const ALL: [CommandKind; 9] = [
        CommandKind::Family,
        CommandKind::Oscillation,
        CommandKind::Concentration,
        CommandKind::Dichotomy,
        CommandKind::Minimize,
        CommandKind::Penalized,
        CommandKind::EnergyMap,
        CommandKind::Stability,
        CommandKind::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Family => "family",
            CommandKind::Oscillation => "oscillation",
            CommandKind::Concentration => "concentration",
            CommandKind::Dichotomy => "dichotomy",
            CommandKind::Minimize => "minimize",
            CommandKind::Penalized => "penalized",
            CommandKind::EnergyMap => "energy-map",
            CommandKind::Stability => "stability",
            CommandKind::Verify => "verify",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            CommandKind::Family => "Sample a closed-form elastica and its invariants",
            CommandKind::Oscillation => "Curvature-oscillation counterexample sequence",
            CommandKind::Concentration => "Curvature-concentration counterexample sequence",
            CommandKind::Dichotomy => "Multiplier boundedness versus smooth convergence",
            CommandKind::Minimize => "Minimize bending energy at fixed length",
            CommandKind::Penalized => "Minimize bending energy plus lambda times length",
            CommandKind::EnergyMap => "Minimal energy over a grid of lengths (and end angles)",
            CommandKind::Stability => "Distances of perturbed minimizers to a reference minimizer",
            CommandKind::Verify => "Check that a curve file is a clamped elastica",
        }
    }

    pub fn uses_solver(self) -> bool {
        matches!(
            self,
            CommandKind::Minimize
                | CommandKind::Penalized
                | CommandKind::EnergyMap
                | CommandKind::Stability
                | CommandKind::Verify
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Int,
    Float,
    Bool,
    Str,
    /// Two or three reals.
    Vector,
}

impl ValueKind {
    pub fn describe(self) -> &'static str {
        match self {
            ValueKind::Int => "an integer",
            ValueKind::Float => "a number",
            ValueKind::Bool => "true or false",
            ValueKind::Str => "a string",
            ValueKind::Vector => "a vector of 2 or 3 numbers",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Scope {
    All,
    Solver,
    Only(&'static [CommandKind]),
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: ValueKind,
    /// Parsed like a command-line value; `None` means optional or required.
    pub default: Option<&'static str>,
    pub required: bool,
    pub scope: Scope,
    /// Allowed values for string keys.
    pub choices: &'static [&'static str],
    pub help: &'static str,
}

impl KeySpec {
    pub fn applies_to(&self, cmd: CommandKind) -> bool {
        match self.scope {
            Scope::All => true,
            Scope::Solver => cmd.uses_solver(),
            Scope::Only(list) => list.contains(&cmd),
        }
    }

    /// Command-line flag name.
    pub fn flag(&self) -> String {
        self.name.replace('_', "-")
    }
}

use CommandKind as C;

const fn key(name: &'static str, kind: ValueKind, default: Option<&'static str>, scope: Scope, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        required: false,
        scope,
        choices: &[],
        help,
    }
}

const SEQUENCES: &[CommandKind] = &[C::Oscillation, C::Concentration, C::Dichotomy];
const BOUNDARY: &[CommandKind] = &[C::Minimize, C::Penalized, C::EnergyMap, C::Stability, C::Verify];
const LENGTH_USERS: &[CommandKind] = &[C::Family, C::Minimize, C::Stability, C::Verify];
const LAMBDA_USERS: &[CommandKind] = &[C::Penalized, C::Stability, C::Verify];
const CONSTRAINT_USERS: &[CommandKind] = &[C::Stability, C::Verify];

pub const KEYS: &[KeySpec] = &[
    key("output_dir", ValueKind::Str, Some("elastica-out"), Scope::All, "Directory for curves, reports and the manifest"),
    key("seed", ValueKind::Int, Some("0"), Scope::All, "Seed for multistart and perturbation directions"),
    key("n", ValueKind::Int, Some("512"), Scope::All, "Segments per sampled curve"),
    // Closed-form family.
    key("m", ValueKind::Float, Some("0.5"), Scope::Only(&[C::Family]), "Elliptic parameter m"),
    key("w", ValueKind::Float, Some("1.0"), Scope::Only(&[C::Family]), "Modulus w with m <= w <= 1"),
    key("amplitude", ValueKind::Float, Some("1.0"), Scope::Only(&[C::Family]), "Curvature amplitude A"),
    key("beta", ValueKind::Float, Some("0.0"), Scope::Only(&[C::Family]), "Phase shift"),
    KeySpec {
        choices: &["+", "-"],
        ..key("torsion_sign", ValueKind::Str, Some("+"), Scope::Only(&[C::Family]), "Sign of the torsion constant")
    },
    // Sequences.
    key("jmax", ValueKind::Int, Some("10"), Scope::Only(SEQUENCES), "Largest sequence index"),
    // Boundary data.
    key("p0", ValueKind::Vector, Some("0,0"), Scope::Only(BOUNDARY), "Start point"),
    key("p1", ValueKind::Vector, Some("1,0"), Scope::Only(BOUNDARY), "End point"),
    key("v0", ValueKind::Vector, Some("0,1"), Scope::Only(BOUNDARY), "Start tangent (normalized)"),
    key("v1", ValueKind::Vector, Some("0,-1"), Scope::Only(BOUNDARY), "End tangent (normalized)"),
    key("length", ValueKind::Float, Some("2.0"), Scope::Only(LENGTH_USERS), "Curve length"),
    key("lambda", ValueKind::Float, Some("1.0"), Scope::Only(LAMBDA_USERS), "Length penalty"),
    KeySpec {
        choices: &["fixed-length", "penalized"],
        ..key("constraint", ValueKind::Str, Some("fixed-length"), Scope::Only(CONSTRAINT_USERS), "Problem type")
    },
    // Solver.
    KeySpec {
        choices: &["angle", "points"],
        ..key("representation", ValueKind::Str, Some("angle"), Scope::Solver, "Discretization: tangent angles (planar) or points")
    },
    key("outer_iters", ValueKind::Int, Some("200"), Scope::Solver, "SQP iterations per start"),
    key("inner_iters", ValueKind::Int, Some("40"), Scope::Solver, "Line-search backtracks per iteration"),
    key("constraint_tol", ValueKind::Float, Some("1e-8"), Scope::Solver, "Constraint tolerance"),
    key("grad_tol", ValueKind::Float, Some("1e-4"), Scope::Solver, "Stationarity tolerance"),
    key("penalty_growth", ValueKind::Float, Some("10"), Scope::Solver, "Merit penalty growth factor"),
    key("multistart", ValueKind::Int, Some("6"), Scope::Solver, "Starts per turning class"),
    key("telemetry", ValueKind::Bool, Some("false"), Scope::Only(&[C::Minimize, C::Penalized]), "Write per-iteration telemetry"),
    // Energy map.
    key("length_min", ValueKind::Float, Some("1.05"), Scope::Only(&[C::EnergyMap]), "Smallest length"),
    key("length_max", ValueKind::Float, Some("2.0"), Scope::Only(&[C::EnergyMap]), "Largest length"),
    key("angle1_min", ValueKind::Float, None, Scope::Only(&[C::EnergyMap]), "Smallest end angle (two-parameter map)"),
    key("angle1_max", ValueKind::Float, None, Scope::Only(&[C::EnergyMap]), "Largest end angle (two-parameter map)"),
    key("resolution", ValueKind::Int, Some("9"), Scope::Only(&[C::EnergyMap]), "Grid points per axis"),
    // Stability.
    key("kmax", ValueKind::Int, Some("8"), Scope::Only(&[C::Stability]), "Perturbation sizes 2^-1 .. 2^-kmax"),
    KeySpec {
        choices: &["random", "closing"],
        ..key("direction", ValueKind::Str, Some("random"), Scope::Only(&[C::Stability]), "Seeded random direction, or P1 moving along V0")
    },
    // Verification.
    KeySpec {
        required: true,
        ..key("curve", ValueKind::Str, None, Scope::Only(&[C::Verify]), "Curve CSV to check")
    },
];

pub fn lookup(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

pub fn keys_for(cmd: CommandKind) -> impl Iterator<Item = &'static KeySpec> {
    KEYS.iter().filter(move |k| k.applies_to(cmd))
}
