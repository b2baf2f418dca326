//! Counterexample sequences, the dichotomy probe, minimal-energy maps and
//! stability sweeps.
//!
//! Every experiment produces [`ConvergenceReport`] rows that serialize to
//! CSV, and a [`Summary`] record with the outcome of its built-in checks.

mod energy_map;
mod sequences;
mod stability;

pub use energy_map::{continuity_study, minimal_energy_map, EnergyMap, EnergyMapPoint, EnergySlice};
pub use sequences::{
    aligned_segment, concentration_member, concentration_sequence, dichotomy_probe, oscillation_member,
    oscillation_sequence, sequence_checks, DichotomyRow, DichotomyTable, DichotomyVerdict, LimitKind, ProbeFamily,
    CONCENTRATION_TAIL_START, ENERGY_BOUND, ENERGY_BOUND_FROM,
};
pub use stability::{stability_sweep, stability_sweep_along, Perturbation, StabilityReport};

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Result;

/// Highest derivative order reported in `cm_distances`.
pub const REPORT_ORDER: usize = 3;

/// One member of a sequence of curves compared with a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub index: usize,
    /// Sequence parameter: `j` for the counterexamples, the perturbation
    /// size for stability sweeps.
    pub parameter: f64,
    /// Bending energy `B_j` (closed form where available).
    pub energy: f64,
    /// Bending energy of the sampled curve.
    pub discrete_energy: f64,
    pub length: f64,
    pub lambda: f64,
    /// Killing-field magnitude; only known for closed-form members.
    pub killing: Option<f64>,
    /// `C^m` distances to the reference for `m = 0..=3`.
    pub cm_distances: Vec<f64>,
    /// `int k ds` for planar curves.
    pub total_turning: Option<f64>,
    pub converged: bool,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// `max_{m <= order}` of the stored distances.
    pub fn cm_distance(&self, order: usize) -> f64 {
        self.cm_distances.iter().take(order + 1).fold(0.0, |a, b| a.max(*b))
    }

    pub fn is_finite(&self) -> bool {
        [self.parameter, self.energy, self.discrete_energy, self.length, self.lambda]
            .iter()
            .chain(self.killing.iter())
            .chain(self.total_turning.iter())
            .chain(self.cm_distances.iter())
            .all(|v| v.is_finite())
    }
}

pub const REPORT_COLUMNS: &str =
    "index,parameter,energy,discrete_energy,length,lambda,killing,c0,c1,c2,c3,total_turning,converged,notes";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Reports as CSV with a header row; missing values are empty fields and
/// notes are joined by `;`.
pub fn reports_to_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    out.push_str(REPORT_COLUMNS);
    out.push('\n');
    for r in reports {
        let mut d = r.cm_distances.clone();
        d.resize(REPORT_ORDER + 1, f64::NAN);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},\"{}\"",
            r.index,
            r.parameter,
            r.energy,
            r.discrete_energy,
            r.length,
            r.lambda,
            opt(r.killing),
            d[0],
            d[1],
            d[2],
            d[3],
            opt(r.total_turning),
            r.converged,
            r.notes.join("; ").replace('"', "'"),
        );
    }
    out
}

pub fn write_reports_csv(reports: &[ConvergenceReport], path: &Path) -> Result<()> {
    std::fs::write(path, reports_to_csv(reports))?;
    Ok(())
}

/// Outcome of one built-in check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Run record written as one JSON line per experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Appends `summary` as one JSON line.
pub fn append_summary(summary: &Summary, path: &Path) -> Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    serde_json::to_writer(&mut f, summary)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ConvergenceReport {
        ConvergenceReport {
            index: 3,
            parameter: 3.0,
            energy: 1.5,
            discrete_energy: 1.5,
            length: 1.0,
            lambda: -2.0,
            killing: None,
            cm_distances: vec![0.1, 0.2, 0.3, 0.4],
            total_turning: Some(0.0),
            converged: true,
            notes: vec!["a".into(), "b".into()],
        }
    }

    #[test]
    fn csv_has_one_row_per_report() {
        let text = reports_to_csv(&[row(), row()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], REPORT_COLUMNS);
        assert_eq!(lines[1].split(',').count(), REPORT_COLUMNS.split(',').count());
        assert!(lines[1].starts_with("3,3,1.5,1.5,1,-2,,0.1,0.2,0.3,0.4,0,true,"));
    }

    #[test]
    fn summaries_append_as_json_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.jsonl");
        let s = Summary {
            experiment: "x".into(),
            seed: 1,
            parameters: serde_json::json!({"n": 4}),
            checks: vec![Check::new("c", true, String::new())],
        };
        append_summary(&s, &path).unwrap();
        append_summary(&s, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: Summary = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(back.passed());
    }

    #[test]
    fn distance_orders_accumulate() {
        let r = row();
        assert_eq!(r.cm_distance(0), 0.1);
        assert_eq!(r.cm_distance(2), 0.3);
        assert!(r.is_finite());
    }
}
