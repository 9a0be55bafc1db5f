//! Line-oriented witness files and their JSON twin.
//!
//! ```text
//! # comment
//! format 1
//! name upper-horodecki
//! source refine
//! a0 1.0240506329113924e0
//! term 1 1 -4.0395569620253167e-1
//! term 3 8 -2.8860759493670887e-1 scale=sqrt3
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use qutrit_witness::operators::{OperatorLabel, Scale, WitnessCoeffs};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub i: u8,
    pub j: u8,
    #[serde(default, skip_serializing_if = "is_unit")]
    pub scale: ScaleTag,
    pub coefficient: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleTag {
    #[default]
    Unit,
    Sqrt3,
}

fn is_unit(s: &ScaleTag) -> bool {
    *s == ScaleTag::Unit
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free-form provenance tag (preset name, command that produced it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub a0: f64,
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

impl WitnessFile {
    pub fn from_coeffs(w: &WitnessCoeffs, name: Option<&str>, source: Option<&str>) -> Self {
        let terms = w
            .terms()
            .map(|(l, c)| TermEntry {
                i: l.i(),
                j: l.j(),
                scale: match l.scale() {
                    Scale::Unit => ScaleTag::Unit,
                    Scale::Sqrt3 => ScaleTag::Sqrt3,
                },
                coefficient: c,
            })
            .collect();
        Self {
            format: FORMAT_VERSION,
            name: name.map(str::to_owned),
            source: source.map(str::to_owned),
            a0: w.a0,
            terms,
        }
    }

    pub fn to_coeffs(&self) -> Result<WitnessCoeffs, String> {
        let mut w = WitnessCoeffs::new(self.a0);
        for t in &self.terms {
            let scale = match t.scale {
                ScaleTag::Unit => Scale::Unit,
                ScaleTag::Sqrt3 => Scale::Sqrt3,
            };
            let l = OperatorLabel::new(t.i, t.j, scale).map_err(|e| e.to_string())?;
            if l.is_identity() {
                return Err("identity term must be given as a0".into());
            }
            w.add(l, t.coefficient);
        }
        Ok(w)
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "format {}", self.format);
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name {n}");
        }
        if let Some(n) = &self.source {
            let _ = writeln!(s, "source {n}");
        }
        let _ = writeln!(s, "a0 {:.16e}", self.a0);
        for t in &self.terms {
            let _ = write!(s, "term {} {} {:.16e}", t.i, t.j, t.coefficient);
            if t.scale == ScaleTag::Sqrt3 {
                s.push_str(" scale=sqrt3");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Parses either format; JSON is recognized by a leading `{`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| perr(e.line(), e.to_string()));
        }
        Self::parse_kv(text)
    }

    pub fn parse_kv(text: &str) -> Result<Self, ParseError> {
        let mut format = None;
        let mut name = None;
        let mut source = None;
        let mut a0 = None;
        let mut terms = Vec::new();
        let num = |line: usize, s: &str| -> Result<f64, ParseError> {
            let v: f64 = s.parse().map_err(|_| perr(line, format!("bad number '{s}'")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(perr(line, format!("non-finite number '{s}'")))
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let rest = rest.trim();
            let once = |slot: bool, k: &str| {
                if slot {
                    Err(perr(line, format!("duplicate '{k}'")))
                } else {
                    Ok(())
                }
            };
            match key {
                "format" => {
                    once(format.is_some(), key)?;
                    let v: u32 = rest.parse().map_err(|_| perr(line, format!("bad format version '{rest}'")))?;
                    if v != FORMAT_VERSION {
                        return Err(perr(line, format!("unsupported format version {v}")));
                    }
                    format = Some(v);
                }
                "name" | "source" => {
                    if rest.is_empty() {
                        return Err(perr(line, format!("'{key}' needs a value")));
                    }
                    let slot = if key == "name" { &mut name } else { &mut source };
                    once(slot.is_some(), key)?;
                    *slot = Some(rest.to_owned());
                }
                "a0" => {
                    once(a0.is_some(), key)?;
                    a0 = Some(num(line, rest)?);
                }
                "term" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    let (i, j, c, scale) = match f.as_slice() {
                        [i, j, c] => (i, j, c, ScaleTag::Unit),
                        [i, j, c, "scale=sqrt3"] => (i, j, c, ScaleTag::Sqrt3),
                        [_, _, _, "scale=unit"] => {
                            return Err(perr(line, "unit scale is implicit; drop the token"));
                        }
                        [_, _, _, other] => return Err(perr(line, format!("unknown token '{other}'"))),
                        _ => return Err(perr(line, "expected 'term <i> <j> <coefficient> [scale=sqrt3]'")),
                    };
                    let idx = |s: &str| -> Result<u8, ParseError> {
                        s.parse::<u8>()
                            .ok()
                            .filter(|&v| v <= 8)
                            .ok_or_else(|| perr(line, format!("label index '{s}' not in 0..=8")))
                    };
                    let (i, j) = (idx(i)?, idx(j)?);
                    if i == 0 && j == 0 {
                        return Err(perr(line, "identity term must be given as a0"));
                    }
                    if terms.iter().any(|t: &TermEntry| t.i == i && t.j == j && t.scale == scale) {
                        return Err(perr(line, format!("duplicate term ({i}, {j})")));
                    }
                    terms.push(TermEntry {
                        i,
                        j,
                        scale,
                        coefficient: num(line, c)?,
                    });
                }
                other => return Err(perr(line, format!("unknown field '{other}'"))),
            }
        }
        let end = text.lines().count().max(1);
        Ok(Self {
            format: format.ok_or_else(|| perr(end, "missing 'format'"))?,
            name,
            source,
            a0: a0.ok_or_else(|| perr(end, "missing 'a0'"))?,
            terms,
        })
    }
}
