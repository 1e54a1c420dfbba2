//! Text format for models.
//!
//! ```text
//! system acs                      system flcs
//! dim 2                           controls q0 q1
//! init 1 0                        channels c
//! map t                           alphabet a b
//! guard 1 0                       init q0 ; eps
//! matrix identity                 rule q0 -> q1 : c ! a
//! offset -1 1                     rule q1 -> q0 : c ? a
//! end
//! ```
//!
//! `matrix` may instead be followed by `dim` rows of naturals. `#` starts a
//! comment.

use std::fmt::Write as _;

use crate::acs::{AcsModel, AffineMap};
use crate::flcs::{Action, FlcsConfig, FlcsModel, Rule};
use crate::omega::Matrix;
use crate::words::{parse_word, render_word, Letter};
use crate::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Acs(AcsModel),
    Flcs(FlcsModel),
}

impl Model {
    pub fn render(&self) -> String {
        match self {
            Model::Acs(m) => render_acs(m),
            Model::Flcs(m) => render_flcs(m),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::At {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based numbers.
fn lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let toks: Vec<&str> = l.split_whitespace().collect();
            (!toks.is_empty()).then_some((i + 1, toks))
        })
        .collect()
}

pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let lines = lines(text);
    let Some((n, head)) = lines.first() else {
        return Err(err(1, "empty model"));
    };
    match head.as_slice() {
        ["system", "acs"] => parse_acs(&lines[1..]).map(Model::Acs),
        ["system", "flcs"] => parse_flcs(&lines[1..]).map(Model::Flcs),
        _ => Err(err(*n, "expected `system acs` or `system flcs`")),
    }
}

fn naturals(line: usize, toks: &[&str], dim: usize) -> Result<Vec<u64>, ParseError> {
    if toks.len() != dim {
        return Err(err(
            line,
            format!("expected {dim} values, found {}", toks.len()),
        ));
    }
    toks.iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| err(line, format!("expected a natural, found `{t}`")))
        })
        .collect()
}

fn integers(line: usize, toks: &[&str], dim: usize) -> Result<Vec<i64>, ParseError> {
    if toks.len() != dim {
        return Err(err(
            line,
            format!("expected {dim} values, found {}", toks.len()),
        ));
    }
    toks.iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| err(line, format!("expected an integer, found `{t}`")))
        })
        .collect()
}

fn parse_acs(lines: &[(usize, Vec<&str>)]) -> Result<AcsModel, ParseError> {
    let mut it = lines.iter().peekable();
    let dim = match it.next() {
        Some((n, t)) if t.len() == 2 && t[0] == "dim" => match t[1].parse::<usize>() {
            Ok(d) if d > 0 => d,
            _ => return Err(err(*n, "dimension must be a positive integer")),
        },
        Some((n, _)) => return Err(err(*n, "expected `dim k`")),
        None => return Err(err(1, "missing `dim`")),
    };
    let initial = match it.next() {
        Some((n, t)) if t[0] == "init" => naturals(*n, &t[1..], dim)?,
        Some((n, _)) => return Err(err(*n, "expected `init`")),
        None => return Err(err(1, "missing `init`")),
    };
    let mut maps: Vec<AffineMap> = Vec::new();
    while let Some((n, t)) = it.next() {
        let start = *n;
        let name = match t.as_slice() {
            ["map", name] => name.to_string(),
            _ => return Err(err(start, "expected `map NAME`")),
        };
        let (mut guard, mut matrix, mut offset) = (None, None, None);
        loop {
            let Some((n, t)) = it.next() else {
                return Err(err(start, format!("map `{name}` lacks `end`")));
            };
            match t[0] {
                "end" if t.len() == 1 => break,
                "guard" => guard = Some(naturals(*n, &t[1..], dim)?),
                "offset" => offset = Some(integers(*n, &t[1..], dim)?),
                "matrix" if t.len() == 2 && t[1] == "identity" => {
                    matrix = Some(Matrix::identity(dim))
                }
                "matrix" if t.len() == 1 => {
                    let mut rows = Vec::with_capacity(dim);
                    for _ in 0..dim {
                        let Some((n, t)) = it.next() else {
                            return Err(err(*n, "matrix needs one row per dimension"));
                        };
                        rows.push(naturals(*n, t, dim)?);
                    }
                    matrix = Some(Matrix::from_rows(rows).expect("rows are square"));
                }
                other => return Err(err(*n, format!("unexpected `{other}` in map `{name}`"))),
            }
        }
        let missing = |what: &str| err(start, format!("map `{name}` lacks `{what}`"));
        let guard = guard.ok_or_else(|| missing("guard"))?;
        let matrix = matrix.ok_or_else(|| missing("matrix"))?;
        let offset = offset.ok_or_else(|| missing("offset"))?;
        let map =
            AffineMap::new(name, matrix, offset, guard).map_err(|e| err(start, e.to_string()))?;
        maps.push(map);
    }
    Ok(AcsModel::new(dim, initial, maps)?)
}

fn letters(line: usize, toks: &[&str]) -> Result<Vec<Letter>, ParseError> {
    toks.iter()
        .map(|t| {
            let mut cs = t.chars();
            match (cs.next().and_then(Letter::new), cs.next()) {
                (Some(l), None) => Ok(l),
                _ => Err(err(
                    line,
                    format!("letters are single alphanumeric characters, found `{t}`"),
                )),
            }
        })
        .collect()
}

/// Parses `q ; w1 ; … ; wm`.
pub fn parse_flcs_config(text: &str) -> Result<FlcsConfig, ParseError> {
    let mut parts = text.split(';').map(str::trim);
    let control = parts.next().unwrap_or("").to_string();
    if control.is_empty() || control.contains(char::is_whitespace) {
        return Err(ParseError::Value(format!(
            "invalid control state in `{text}`"
        )));
    }
    let words = parts.map(parse_word).collect::<Result<Vec<_>, _>>()?;
    Ok(FlcsConfig { control, words })
}

pub fn render_flcs_config(c: &FlcsConfig) -> String {
    let mut out = c.control.clone();
    for w in &c.words {
        let _ = write!(out, " ; {}", render_word(w));
    }
    out
}

/// Parses a concrete counter vector.
pub fn parse_naturals(text: &str) -> Result<Vec<u64>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| ParseError::Value(format!("expected a natural, found `{t}`")))
        })
        .collect()
}

fn parse_rule(line: usize, toks: &[&str], channels: &[String]) -> Result<Rule, ParseError> {
    let text = toks[1..].join(" ");
    let bad = || {
        err(
            line,
            "expected `rule q -> q' : c ! a` or `rule q -> q' : c ? a`",
        )
    };
    let (arrow, action) = text.split_once(':').ok_or_else(bad)?;
    let (source, target) = arrow.split_once("->").ok_or_else(bad)?;
    let (source, target) = (source.trim(), target.trim());
    if source.is_empty() || target.is_empty() {
        return Err(bad());
    }
    let action: String = action.split_whitespace().collect();
    let (pos, op) = action
        .char_indices()
        .find(|(_, c)| *c == '!' || *c == '?')
        .ok_or_else(bad)?;
    let chan = &action[..pos];
    let letter = letters(line, &[&action[pos + 1..]])?[0];
    let channel = channels
        .iter()
        .position(|c| c == chan)
        .ok_or_else(|| err(line, format!("unknown channel `{chan}`")))?;
    Ok(Rule {
        source: source.to_string(),
        target: target.to_string(),
        channel,
        action: if op == '!' {
            Action::Send(letter)
        } else {
            Action::Recv(letter)
        },
    })
}

fn parse_flcs(lines: &[(usize, Vec<&str>)]) -> Result<FlcsModel, ParseError> {
    let mut controls = None;
    let mut channels: Option<Vec<String>> = None;
    let mut alphabet = None;
    let mut initial = None;
    let mut rules = Vec::new();
    for (n, t) in lines {
        match t[0] {
            "controls" => controls = Some(t[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            "channels" => channels = Some(t[1..].iter().map(|s| s.to_string()).collect()),
            "alphabet" => alphabet = Some(letters(*n, &t[1..])?),
            "init" => {
                initial =
                    Some(parse_flcs_config(&t[1..].join(" ")).map_err(|e| err(*n, e.to_string()))?)
            }
            "rule" => {
                let chans = channels
                    .as_deref()
                    .ok_or_else(|| err(*n, "`channels` must precede rules"))?;
                rules.push(parse_rule(*n, t, chans)?);
            }
            other => return Err(err(*n, format!("unexpected `{other}`"))),
        }
    }
    let missing = |what: &str| err(1, format!("missing `{what}`"));
    Ok(FlcsModel::new(
        controls.ok_or_else(|| missing("controls"))?,
        channels.ok_or_else(|| missing("channels"))?,
        alphabet.ok_or_else(|| missing("alphabet"))?,
        initial.ok_or_else(|| missing("init"))?,
        rules,
    )?)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn render_acs(m: &AcsModel) -> String {
    let mut out = format!("system acs\ndim {}\ninit {}\n", m.dim(), join(m.initial()));
    for map in m.maps() {
        let _ = writeln!(out, "map {}", map.name());
        let _ = writeln!(out, "guard {}", join(map.guard()));
        if map.matrix().is_identity() {
            out.push_str("matrix identity\n");
        } else {
            out.push_str("matrix\n");
            for i in 0..m.dim() {
                let _ = writeln!(out, "{}", join(map.matrix().row(i)));
            }
        }
        let _ = writeln!(out, "offset {}", join(map.offset()));
        out.push_str("end\n");
    }
    out
}

fn render_flcs(m: &FlcsModel) -> String {
    let mut out = format!(
        "system flcs\ncontrols {}\nchannels {}\nalphabet {}\ninit {}\n",
        m.controls().join(" "),
        m.channels().join(" "),
        join(m.alphabet()),
        render_flcs_config(m.initial())
    );
    for r in m.rules() {
        let (op, l) = match r.action {
            Action::Send(l) => ('!', l),
            Action::Recv(l) => ('?', l),
        };
        let _ = writeln!(
            out,
            "rule {} -> {} : {} {} {}",
            r.source,
            r.target,
            m.channels()[r.channel],
            op,
            l
        );
    }
    out
}
