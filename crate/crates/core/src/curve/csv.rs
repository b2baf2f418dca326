//! Curve dump format: header `x,p1,...,pn`, then one row per node with the
//! uniform parameter and the coordinates, 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::DiscreteCurve;
use crate::{Error, Result};

pub fn to_csv(curve: &DiscreteCurve) -> String {
    let d = curve.dim();
    let mut out = String::from("x");
    for k in 1..=d {
        let _ = write!(out, ",p{k}");
    }
    out.push('\n');
    for (i, p) in curve.nodes().iter().enumerate() {
        let _ = write!(out, "{:.16e}", curve.parameter(i));
        for v in &p[..d] {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(curve: &DiscreteCurve, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(curve))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<DiscreteCurve> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, path)
}

/// Parses the dump format; `path` is only used in diagnostics.
pub fn parse_csv(text: &str, path: &Path) -> Result<DiscreteCurve> {
    let err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = cols.len().saturating_sub(1);
    let expected: Vec<String> = std::iter::once("x".to_string()).chain((1..=dim).map(|k| format!("p{k}"))).collect();
    if !(dim == 2 || dim == 3) || cols != expected {
        return Err(err(1, format!("expected header `x,p1,p2` or `x,p1,p2,p3`, found `{header}`")));
    }
    let mut nodes = Vec::new();
    let mut last_x = f64::NEG_INFINITY;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(err(lineno, format!("expected {} fields, found {}", dim + 1, fields.len())));
        }
        let mut vals = [0.0; 4];
        for (k, f) in fields.iter().enumerate() {
            vals[k] = f
                .parse::<f64>()
                .map_err(|e| err(lineno, format!("field {}: {e}", k + 1)))?;
            if !vals[k].is_finite() {
                return Err(err(lineno, format!("field {} is not finite", k + 1)));
            }
        }
        if vals[0] <= last_x {
            return Err(err(lineno, format!("parameter {} is not increasing", vals[0])));
        }
        last_x = vals[0];
        nodes.push([vals[1], vals[2], if dim == 3 { vals[3] } else { 0.0 }]);
    }
    DiscreteCurve::new(dim, nodes).map_err(|e| err(0, e.to_string()))
}
