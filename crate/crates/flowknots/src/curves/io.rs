use std::path::Path;

use super::{CurveError, PolyCurve};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Parses `x y z` lines; blank lines separate components and every component
/// is closed. Lines starting with `#` are ignored.
pub fn read_knot_text<S: Scalar>(text: &str) -> Result<Vec<PolyCurve<S>>, CurveError> {
    let mut comps = Vec::new();
    let mut current: Vec<Vec3<S>> = Vec::new();
    let mut start_line = 1;
    let flush = |current: &mut Vec<Vec3<S>>, comps: &mut Vec<PolyCurve<S>>, line: usize| -> Result<(), CurveError> {
        if current.is_empty() {
            return Ok(());
        }
        let pts = std::mem::take(current);
        let c = PolyCurve::closed(pts).map_err(|e| CurveError::Parse { line, message: e.to_string() })?;
        comps.push(c);
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            flush(&mut current, &mut comps, start_line)?;
            continue;
        }
        if current.is_empty() {
            start_line = line_no;
        }
        let vals: Result<Vec<f64>, _> = t.split_whitespace().map(str::parse::<f64>).collect();
        match vals {
            Ok(v) if v.len() == 3 && v.iter().all(|x| x.is_finite()) => current.push(Vec3::from_f64([v[0], v[1], v[2]])),
            _ => {
                return Err(CurveError::Parse { line: line_no, message: format!("expected three numbers, found '{t}'") })
            }
        }
    }
    flush(&mut current, &mut comps, start_line)?;
    if comps.is_empty() {
        return Err(CurveError::Parse { line: 0, message: "no points".into() });
    }
    Ok(comps)
}

pub fn read_knot_file<S: Scalar>(path: &Path) -> Result<Vec<PolyCurve<S>>, CurveError> {
    let text = std::fs::read_to_string(path).map_err(|e| CurveError::Io(format!("{}: {e}", path.display())))?;
    read_knot_text(&text)
}

/// Writes components with 17 significant digits, a blank line between them.
pub fn write_knot_text<S: Scalar>(comps: &[PolyCurve<S>]) -> String {
    let mut out = String::new();
    for (i, c) in comps.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for p in c.points() {
            let [x, y, z] = p.to_f64();
            out.push_str(&format!("{x:.16e} {y:.16e} {z:.16e}\n"));
        }
    }
    out
}

pub fn write_knot_file<S: Scalar>(path: &Path, comps: &[PolyCurve<S>]) -> Result<(), CurveError> {
    std::fs::write(path, write_knot_text(comps)).map_err(|e| CurveError::Io(format!("{}: {e}", path.display())))
}
