//! Matrix files for channels and gain matrices.
//!
//! Keyed form (canonical):
//!
//! ```text
//! # binary symmetric channel
//! x_size: 2
//! y_size: 2
//! row: 0.9 0.1
//! row: 0.1 0.9
//! prior: 0.5 0.5
//! ```
//!
//! Gain matrices use `states:`/`actions:` in place of `x_size:`/`y_size:`
//! and may add `orientation: loss`.
//!
//! Delimited form: a line with the two dimensions, one line per row, and
//! optionally one more line holding the prior. Values are separated by
//! whitespace or commas; `#` starts a comment.

use std::fmt;
use std::path::Path;

use hcap_core::scoring::{GainMatrix, Orientation};
use hcap_core::{Channel, Pmf};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub source: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.source, line, self.message),
            None => write!(f, "{}: {}", self.source, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatrixFile {
    pub rows: Vec<Vec<f64>>,
    pub prior: Option<Vec<f64>>,
    pub orientation: Option<Orientation>,
}

pub struct ChannelFile {
    pub channel: Channel,
    pub prior: Option<Pmf>,
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect()
}

fn parse_dim(text: &str) -> Result<usize, String> {
    match text.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{}` is not a positive dimension", text.trim())),
    }
}

pub fn parse_matrix(source: &str, text: &str) -> Result<MatrixFile, ParseError> {
    let err = |line: Option<usize>, message: String| ParseError {
        source: source.to_string(),
        line,
        message,
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip(l)))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(err(None, "file is empty".into()));
    }
    let keyed = lines.iter().any(|(_, l)| l.contains(':'));
    let mut out = MatrixFile::default();
    let (rows, cols);
    if keyed {
        let (mut r, mut c) = (None, None);
        for &(n, line) in &lines {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| err(Some(n), "expected `key: value`".into()))?;
            let value = value.trim();
            match key.trim() {
                "x_size" | "states" => r = Some(parse_dim(value).map_err(|m| err(Some(n), m))?),
                "y_size" | "actions" => c = Some(parse_dim(value).map_err(|m| err(Some(n), m))?),
                "row" => out.rows.push(parse_numbers(value).map_err(|m| err(Some(n), m))?),
                "prior" => {
                    if out.prior.is_some() {
                        return Err(err(Some(n), "prior given twice".into()));
                    }
                    out.prior = Some(parse_numbers(value).map_err(|m| err(Some(n), m))?);
                }
                "orientation" => {
                    out.orientation = Some(match value {
                        "gain" => Orientation::Gain,
                        "loss" => Orientation::Loss,
                        other => return Err(err(Some(n), format!("unknown orientation `{other}`"))),
                    })
                }
                other => return Err(err(Some(n), format!("unknown key `{other}`"))),
            }
        }
        rows = r.ok_or_else(|| err(None, "missing `x_size:` (or `states:`)".into()))?;
        cols = c.ok_or_else(|| err(None, "missing `y_size:` (or `actions:`)".into()))?;
    } else {
        let (n, head) = lines[0];
        let dims = parse_numbers(head).map_err(|m| err(Some(n), m))?;
        let [r, c] = dims[..] else {
            return Err(err(Some(n), "first line must hold the two dimensions".into()));
        };
        rows = parse_dim(&r.to_string()).map_err(|m| err(Some(n), m))?;
        cols = parse_dim(&c.to_string()).map_err(|m| err(Some(n), m))?;
        for &(n, line) in &lines[1..] {
            let values = parse_numbers(line).map_err(|m| err(Some(n), m))?;
            if out.rows.len() < rows {
                out.rows.push(values);
            } else if out.prior.is_none() {
                out.prior = Some(values);
            } else {
                return Err(err(Some(n), format!("expected {rows} rows and at most one prior line")));
            }
        }
    }
    if out.rows.len() != rows {
        return Err(err(None, format!("expected {rows} rows, found {}", out.rows.len())));
    }
    if let Some(i) = out.rows.iter().position(|r| r.len() != cols) {
        return Err(err(None, format!("row {i} has {} entries, expected {cols}", out.rows[i].len())));
    }
    if let Some(p) = &out.prior {
        if p.len() != rows {
            return Err(err(None, format!("prior has {} entries, expected {rows}", p.len())));
        }
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError {
        source: path.display().to_string(),
        line: None,
        message: e.to_string(),
    })
}

pub fn load_channel(path: &Path) -> Result<ChannelFile, ParseError> {
    let source = path.display().to_string();
    let m = parse_matrix(&source, &read(path)?)?;
    let invalid = |what: &str, e: hcap_core::Error| ParseError {
        source: source.clone(),
        line: None,
        message: format!("{what}: {e}"),
    };
    if m.orientation.is_some() {
        return Err(invalid("channel", hcap_core::Error::InvalidConfig("orientation applies to gain matrices".into())));
    }
    let mut rows = Vec::with_capacity(m.rows.len());
    for (i, r) in m.rows.into_iter().enumerate() {
        rows.push(Pmf::new(r).map_err(|e| invalid(&format!("row {i}"), e))?);
    }
    let channel = Channel::from_pmfs(&rows).map_err(|e| invalid("channel", e))?;
    let prior = m.prior.map(|p| Pmf::new(p).map_err(|e| invalid("prior", e))).transpose()?;
    Ok(ChannelFile { channel, prior })
}

pub fn load_gain_matrix(path: &Path) -> Result<GainMatrix, ParseError> {
    let source = path.display().to_string();
    let m = parse_matrix(&source, &read(path)?)?;
    if m.prior.is_some() {
        return Err(ParseError {
            source,
            line: None,
            message: "gain matrices take no prior".into(),
        });
    }
    GainMatrix::new(m.rows, m.orientation.unwrap_or(Orientation::Gain)).map_err(|e| ParseError {
        source,
        line: None,
        message: format!("gain matrix: {e}"),
    })
}

/// Keyed channel text, values printed so they parse back exactly.
pub fn format_channel(w: &Channel, prior: Option<&Pmf>) -> String {
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("x_size: {}\ny_size: {}\n", w.inputs(), w.outputs());
    for row in w.rows() {
        out.push_str(&format!("row: {}\n", join(row)));
    }
    if let Some(p) = prior {
        out.push_str(&format!("prior: {}\n", join(p.as_slice())));
    }
    out
}
