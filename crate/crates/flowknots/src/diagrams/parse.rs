use thiserror::Error;

use super::{validate, DiagramError, RawDiagram, TrivalentDiagram};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid diagram: {}", join(.errors))]
    Invalid { line: usize, errors: Vec<DiagramError> },
}

fn join(errs: &[DiagramError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// Parses one diagram per non-empty line; `#` starts a comment.
pub fn parse_diagrams(text: &str) -> Result<Vec<TrivalentDiagram>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_line(body, i + 1)?);
    }
    Ok(out)
}

/// Parses a single diagram, e.g. `2; circle=[1,2,3]; free=[4]; edges=[(1,4),(2,4),(3,4)]`.
pub fn parse_diagram(text: &str) -> Result<TrivalentDiagram, ParseError> {
    parse_line(text, 1)
}

fn parse_line(line: &str, lineno: usize) -> Result<TrivalentDiagram, ParseError> {
    let syntax = |message: String| ParseError::Syntax { line: lineno, message };
    let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parts = compact.split(';');
    let head = parts.next().unwrap_or("");
    let degree: usize = head.parse().map_err(|_| syntax(format!("expected degree, found '{head}'")))?;
    let mut raw = RawDiagram { degree: Some(degree), ..Default::default() };
    let (mut has_circle, mut has_edges) = (false, false);
    for part in parts {
        if part.is_empty() {
            continue;
        }
        let (key, value) = part.split_once('=').ok_or_else(|| syntax(format!("expected key=value, found '{part}'")))?;
        match key {
            "circle" => {
                raw.circle = parse_list(value).map_err(&syntax)?;
                has_circle = true;
            }
            "free" => raw.free = parse_list(value).map_err(&syntax)?,
            "edges" => {
                raw.edges = parse_pairs(value).map_err(&syntax)?;
                has_edges = true;
            }
            other => return Err(syntax(format!("unknown key '{other}'"))),
        }
    }
    if !has_circle || !has_edges {
        return Err(syntax("missing circle or edges".into()));
    }
    validate(&raw).map_err(|errors| ParseError::Invalid { line: lineno, errors })
}

fn parse_list(v: &str) -> Result<Vec<usize>, String> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected [..], found '{v}'"))?;
    if inner.is_empty() {
        return Ok(vec![]);
    }
    inner
        .split(',')
        .map(|x| x.parse::<usize>().map_err(|_| format!("bad label '{x}'")))
        .collect()
}

fn parse_pairs(v: &str) -> Result<Vec<(usize, usize)>, String> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected [..], found '{v}'"))?;
    let mut out = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        rest = rest.strip_prefix(',').unwrap_or(rest);
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' in '{rest}'"))?;
        let close = body.find(')').ok_or_else(|| "unclosed '('".to_string())?;
        let (a, b) = body[..close].split_once(',').ok_or_else(|| format!("bad edge '{}'", &body[..close]))?;
        let a = a.parse().map_err(|_| format!("bad label '{a}'"))?;
        let b = b.parse().map_err(|_| format!("bad label '{b}'"))?;
        out.push((a, b));
        rest = &body[close + 1..];
    }
    Ok(out)
}
