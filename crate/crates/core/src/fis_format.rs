//! Sectioned `key=value` text format for fuzzy inference systems, modeled
//! on the classic `.fis` layout:
//!
//! ```text
//! [System]
//! Name='traffic'
//! NumInputs=2
//! ...
//! [Input1]
//! Name='waiting_time'
//! Range=[0 50]
//! NumMFs=5
//! MF1='VS':'gaussmf',[2 0]
//! ...
//! [Rules]
//! 1 1, 1 (1) : 1
//! ```
//!
//! Gaussian parameters are written `[sigma center]`. Rule lines hold
//! 1-based term indices (0 = don't care), the output term, the weight in
//! parentheses and the connective (1 = AND, 2 = OR). Lines starting with
//! `%` are comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::fis::{
    Connective, Fis, FisError, GaussianMf, LinguisticVariable, Rule, Term, Universe,
    DEFAULT_RESOLUTION,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub kind: FormatErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown MF shape '{0}'")]
    UnknownShape(String),
    #[error("index {index} out of range (1..={max})")]
    IndexOutOfRange { index: i64, max: usize },
    #[error("duplicate section [{0}]")]
    DuplicateSection(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("missing key '{0}'")]
    MissingKey(String),
    #[error("range lower bound {lo} must be below upper bound {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("{what} declares {declared} but {found} are present")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("unsupported {key} '{value}'")]
    Unsupported { key: &'static str, value: String },
    #[error(transparent)]
    Invalid(#[from] FisError),
}

/// A value with the position it was read from.
#[derive(Debug, Clone)]
struct Located<T> {
    value: T,
    line: usize,
    column: usize,
}

impl<T> Located<T> {
    fn error(&self, kind: FormatErrorKind) -> FormatError {
        FormatError {
            line: self.line,
            column: self.column,
            kind,
        }
    }
}

#[derive(Debug, Default)]
struct Section {
    header_line: usize,
    keys: BTreeMap<String, Located<String>>,
    rule_lines: Vec<Located<String>>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Located<String>> {
        self.keys.remove(key)
    }

    fn require(&mut self, name: &str, key: &str) -> Result<Located<String>, FormatError> {
        self.take(key).ok_or(FormatError {
            line: self.header_line,
            column: 1,
            kind: FormatErrorKind::MissingKey(format!("{name}.{key}")),
        })
    }

    fn reject_leftovers(&self) -> Result<(), FormatError> {
        match self.keys.iter().next() {
            Some((key, at)) => Err(FormatError {
                line: at.line,
                column: 1,
                kind: FormatErrorKind::UnknownKey(key.clone()),
            }),
            None => Ok(()),
        }
    }
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> FormatError {
    FormatError {
        line,
        column,
        kind: FormatErrorKind::Syntax(msg.into()),
    }
}

fn split_sections(text: &str) -> Result<Vec<(String, Section)>, FormatError> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let indent = raw.len() - raw.trim_start().len();
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line_no, indent + line.len(), "unterminated section header"))?
                .trim()
                .to_string();
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(FormatError {
                    line: line_no,
                    column: indent + 1,
                    kind: FormatErrorKind::DuplicateSection(name),
                });
            }
            sections.push((
                name,
                Section {
                    header_line: line_no,
                    ..Section::default()
                },
            ));
            continue;
        }
        let Some((name, section)) = sections.last_mut() else {
            return Err(syntax(
                line_no,
                indent + 1,
                "content before the first section",
            ));
        };
        if name == "Rules" {
            section.rule_lines.push(Located {
                value: line.to_string(),
                line: line_no,
                column: indent + 1,
            });
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| syntax(line_no, indent + 1, "expected key=value"))?;
        let key = line[..eq].trim();
        if key.is_empty() {
            return Err(syntax(line_no, indent + 1, "empty key"));
        }
        let value = &line[eq + 1..];
        let value_col = indent + eq + 2 + (value.len() - value.trim_start().len());
        if section.keys.contains_key(key) {
            return Err(FormatError {
                line: line_no,
                column: indent + 1,
                kind: FormatErrorKind::DuplicateKey(key.to_string()),
            });
        }
        section.keys.insert(
            key.to_string(),
            Located {
                value: value.trim().to_string(),
                line: line_no,
                column: value_col,
            },
        );
    }
    Ok(sections)
}

fn parse_quoted(at: &Located<String>) -> Result<String, FormatError> {
    let v = at.value.as_str();
    let inner = v
        .strip_prefix('\'')
        .and_then(|s| s.strip_suffix('\''))
        .filter(|s| !s.contains('\''))
        .ok_or_else(|| {
            syntax(
                at.line,
                at.column,
                format!("expected a quoted string, got {v}"),
            )
        })?;
    if inner.is_empty() {
        return Err(syntax(at.line, at.column, "empty name"));
    }
    Ok(inner.to_string())
}

fn parse_number<T: std::str::FromStr>(
    token: &str,
    line: usize,
    column: usize,
) -> Result<T, FormatError> {
    token
        .parse()
        .map_err(|_| syntax(line, column, format!("invalid number '{token}'")))
}

fn parse_finite(token: &str, line: usize, column: usize) -> Result<f64, FormatError> {
    let v: f64 = parse_number(token, line, column)?;
    if !v.is_finite() {
        return Err(syntax(line, column, format!("non-finite number '{token}'")));
    }
    Ok(v)
}

/// Parses `[a b ...]` into numbers.
fn parse_vector(text: &str, line: usize, column: usize) -> Result<Vec<f64>, FormatError> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, column, format!("expected [ ... ], got {text}")))?;
    inner
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_finite(t, line, column))
        .collect()
}

fn parse_count(at: &Located<String>) -> Result<usize, FormatError> {
    parse_number(&at.value, at.line, at.column)
}

fn expect_operator(
    section: &mut Section,
    key: &'static str,
    expected: &str,
) -> Result<(), FormatError> {
    if let Some(at) = section.take(key) {
        let value = parse_quoted(&at)?;
        if value != expected {
            return Err(at.error(FormatErrorKind::Unsupported { key, value }));
        }
    }
    Ok(())
}

fn parse_mf(at: &Located<String>) -> Result<(String, GaussianMf), FormatError> {
    // 'label':'shape',[params]
    let v = at.value.as_str();
    let (label_part, rest) = v
        .split_once(':')
        .ok_or_else(|| syntax(at.line, at.column, "expected 'label':'shape',[params]"))?;
    let label = parse_quoted(&Located {
        value: label_part.trim().to_string(),
        ..at.clone()
    })?;
    let (shape_part, params) = rest
        .split_once(',')
        .ok_or_else(|| syntax(at.line, at.column, "expected ',' before MF parameters"))?;
    let shape = parse_quoted(&Located {
        value: shape_part.trim().to_string(),
        ..at.clone()
    })?;
    if shape != "gaussmf" {
        return Err(at.error(FormatErrorKind::UnknownShape(shape)));
    }
    let params = parse_vector(params, at.line, at.column)?;
    let [sigma, center] = params[..] else {
        return Err(syntax(
            at.line,
            at.column,
            format!("gaussmf takes [sigma center], got {} values", params.len()),
        ));
    };
    let mf = GaussianMf::new(center, sigma).map_err(|e| at.error(e.into()))?;
    Ok((label, mf))
}

fn parse_variable(name: &str, section: &mut Section) -> Result<LinguisticVariable, FormatError> {
    let var_name = parse_quoted(&section.require(name, "Name")?)?;
    let range_at = section.require(name, "Range")?;
    let range = parse_vector(&range_at.value, range_at.line, range_at.column)?;
    let [lo, hi] = range[..] else {
        return Err(syntax(
            range_at.line,
            range_at.column,
            "Range takes [lo hi]",
        ));
    };
    if lo >= hi {
        return Err(range_at.error(FormatErrorKind::InvalidRange { lo, hi }));
    }
    let universe = Universe::new(lo, hi).map_err(|e| range_at.error(e.into()))?;
    let count_at = section.require(name, "NumMFs")?;
    let count = parse_count(&count_at)?;

    let mut mfs: Vec<Option<Term>> = vec![None; count];
    let mf_keys: Vec<String> = section
        .keys
        .keys()
        .filter(|k| k.starts_with("MF"))
        .cloned()
        .collect();
    for key in mf_keys {
        let at = section.take(&key).expect("key listed above");
        let index: usize = parse_number(&key[2..], at.line, 1)?;
        if index == 0 || index > count {
            return Err(FormatError {
                line: at.line,
                column: 1,
                kind: FormatErrorKind::IndexOutOfRange {
                    index: index as i64,
                    max: count,
                },
            });
        }
        let (label, mf) = parse_mf(&at)?;
        mfs[index - 1] = Some(Term { label, mf });
    }
    section.reject_leftovers()?;
    let found = mfs.iter().filter(|m| m.is_some()).count();
    let terms: Vec<Term> = mfs.into_iter().flatten().collect();
    if found != count {
        return Err(count_at.error(FormatErrorKind::CountMismatch {
            what: "NumMFs",
            declared: count,
            found,
        }));
    }
    LinguisticVariable::new(var_name, universe, terms).map_err(|e| FormatError {
        line: section.header_line,
        column: 1,
        kind: e.into(),
    })
}

fn parse_rule(
    at: &Located<String>,
    inputs: &[LinguisticVariable],
    output: &LinguisticVariable,
) -> Result<Rule, FormatError> {
    // "a b, c (w) : k"
    let line = at.value.as_str();
    let col = |offset: usize| at.column + offset;
    let comma = line
        .find(',')
        .ok_or_else(|| syntax(at.line, at.column, "expected ',' after antecedent"))?;
    let open = line
        .find('(')
        .ok_or_else(|| syntax(at.line, at.column, "expected '(weight)'"))?;
    let close = line
        .find(')')
        .filter(|&c| c > open)
        .ok_or_else(|| syntax(at.line, col(open), "unterminated '(weight)'"))?;
    let colon = line
        .find(':')
        .filter(|&c| c > close)
        .ok_or_else(|| syntax(at.line, col(close), "expected ': connective'"))?;
    if open < comma {
        return Err(syntax(at.line, col(open), "weight before consequent"));
    }

    let mut antecedent = Vec::with_capacity(inputs.len());
    let mut offset = 0;
    for token in line[..comma].split_whitespace() {
        offset = line[offset..].find(token).map_or(offset, |p| p + offset);
        let index: i64 = parse_number(token, at.line, col(offset))?;
        let var = inputs.get(antecedent.len()).ok_or_else(|| {
            syntax(
                at.line,
                col(offset),
                format!("more than {} antecedent indices", inputs.len()),
            )
        })?;
        if index < 0 || index as usize > var.terms().len() {
            return Err(FormatError {
                line: at.line,
                column: col(offset),
                kind: FormatErrorKind::IndexOutOfRange {
                    index,
                    max: var.terms().len(),
                },
            });
        }
        antecedent.push((index > 0).then(|| index as usize - 1));
        offset += token.len();
    }
    if antecedent.len() != inputs.len() {
        return Err(syntax(
            at.line,
            at.column,
            format!(
                "expected {} antecedent indices, got {}",
                inputs.len(),
                antecedent.len()
            ),
        ));
    }

    let consequent_text = line[comma + 1..open].trim();
    let consequent: i64 = parse_number(consequent_text, at.line, col(comma + 1))?;
    if consequent < 1 || consequent as usize > output.terms().len() {
        return Err(FormatError {
            line: at.line,
            column: col(comma + 1),
            kind: FormatErrorKind::IndexOutOfRange {
                index: consequent,
                max: output.terms().len(),
            },
        });
    }
    let weight = parse_finite(line[open + 1..close].trim(), at.line, col(open + 1))?;
    if !line[close + 1..colon].trim().is_empty() {
        return Err(syntax(
            at.line,
            col(close + 1),
            "unexpected text after weight",
        ));
    }
    let connective = match line[colon + 1..].trim() {
        "1" => Connective::And,
        "2" => Connective::Or,
        other => {
            return Err(at.error(FormatErrorKind::Unsupported {
                key: "connective",
                value: other.to_string(),
            }))
        }
    };
    Rule::new(antecedent, consequent as usize - 1, weight, connective)
        .map_err(|e| at.error(e.into()))
}

/// Parses and validates a FIS document.
pub fn parse_fis(text: &str) -> Result<Fis, FormatError> {
    let mut sections = split_sections(text)?;
    let missing = |name: &str| FormatError {
        line: text.lines().count().max(1),
        column: 1,
        kind: FormatErrorKind::MissingSection(name.to_string()),
    };
    let mut take_section = |name: &str| -> Result<Section, FormatError> {
        let pos = sections
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| missing(name))?;
        Ok(sections.remove(pos).1)
    };

    let mut system = take_section("System")?;
    let name = parse_quoted(&system.require("System", "Name")?)?;
    if let Some(at) = system.take("Type") {
        let value = parse_quoted(&at)?;
        if value != "mamdani" {
            return Err(at.error(FormatErrorKind::Unsupported { key: "Type", value }));
        }
    }
    system.take("Version");
    let n_inputs_at = system.require("System", "NumInputs")?;
    let n_inputs = parse_count(&n_inputs_at)?;
    let n_outputs_at = system.require("System", "NumOutputs")?;
    if parse_count(&n_outputs_at)? != 1 {
        return Err(n_outputs_at.error(FormatErrorKind::Unsupported {
            key: "NumOutputs",
            value: n_outputs_at.value.clone(),
        }));
    }
    let n_rules_at = system.require("System", "NumRules")?;
    let n_rules = parse_count(&n_rules_at)?;
    expect_operator(&mut system, "AndMethod", "min")?;
    expect_operator(&mut system, "OrMethod", "max")?;
    expect_operator(&mut system, "ImpMethod", "min")?;
    expect_operator(&mut system, "AggMethod", "max")?;
    expect_operator(&mut system, "DefuzzMethod", "centroid")?;
    let resolution = match system.take("DefuzzResolution") {
        Some(at) => Some((parse_count(&at)?, at)),
        None => None,
    };
    let default_output = match system.take("DefaultOutput") {
        Some(at) => Some((parse_finite(&at.value, at.line, at.column)?, at)),
        None => None,
    };
    system.reject_leftovers()?;

    let mut inputs = Vec::with_capacity(n_inputs);
    for i in 1..=n_inputs {
        let name = format!("Input{i}");
        let mut section = take_section(&name)?;
        inputs.push(parse_variable(&name, &mut section)?);
    }
    let mut output_section = take_section("Output1")?;
    let output = parse_variable("Output1", &mut output_section)?;
    let rules_section = take_section("Rules")?;
    if let Some((name, section)) = sections.first() {
        return Err(FormatError {
            line: section.header_line,
            column: 1,
            kind: FormatErrorKind::UnknownSection(name.clone()),
        });
    }

    let rules = rules_section
        .rule_lines
        .iter()
        .map(|at| parse_rule(at, &inputs, &output))
        .collect::<Result<Vec<_>, _>>()?;
    if rules.len() != n_rules {
        return Err(n_rules_at.error(FormatErrorKind::CountMismatch {
            what: "NumRules",
            declared: n_rules,
            found: rules.len(),
        }));
    }

    let header = |e: FisError| FormatError {
        line: system.header_line,
        column: 1,
        kind: e.into(),
    };
    let mut fis = Fis::new(name, inputs, output, rules).map_err(header)?;
    if let Some((r, at)) = resolution {
        fis = fis.with_resolution(r).map_err(|e| at.error(e.into()))?;
    }
    if let Some((d, at)) = default_output {
        fis = fis.with_default_output(d).map_err(|e| at.error(e.into()))?;
    }
    Ok(fis)
}

/// Formats with at most 6 significant digits and no trailing zeros when
/// that is exact; otherwise falls back to the shortest text that parses
/// back to the same value, so serialization never loses precision.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    if rounded == x {
        format!("{rounded}")
    } else {
        format!("{x}")
    }
}

fn write_variable(out: &mut String, section: &str, var: &LinguisticVariable) {
    let u = var.universe();
    let _ = writeln!(out, "[{section}]");
    let _ = writeln!(out, "Name='{}'", var.name());
    let _ = writeln!(
        out,
        "Range=[{} {}]",
        format_number(u.lo()),
        format_number(u.hi())
    );
    let _ = writeln!(out, "NumMFs={}", var.terms().len());
    for (i, t) in var.terms().iter().enumerate() {
        let _ = writeln!(
            out,
            "MF{}='{}':'gaussmf',[{} {}]",
            i + 1,
            t.label,
            format_number(t.mf.sigma()),
            format_number(t.mf.center())
        );
    }
    out.push('\n');
}

/// Canonical text form. Deterministic, LF line endings.
pub fn serialize_fis(fis: &Fis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[System]");
    let _ = writeln!(out, "Name='{}'", fis.name());
    let _ = writeln!(out, "Type='mamdani'");
    let _ = writeln!(out, "Version=2.0");
    let _ = writeln!(out, "NumInputs={}", fis.inputs().len());
    let _ = writeln!(out, "NumOutputs=1");
    let _ = writeln!(out, "NumRules={}", fis.rules().len());
    let _ = writeln!(out, "AndMethod='min'");
    let _ = writeln!(out, "OrMethod='max'");
    let _ = writeln!(out, "ImpMethod='min'");
    let _ = writeln!(out, "AggMethod='max'");
    let _ = writeln!(out, "DefuzzMethod='centroid'");
    if fis.resolution() != DEFAULT_RESOLUTION {
        let _ = writeln!(out, "DefuzzResolution={}", fis.resolution());
    }
    let _ = writeln!(out, "DefaultOutput={}", format_number(fis.default_output()));
    out.push('\n');
    for (i, var) in fis.inputs().iter().enumerate() {
        write_variable(&mut out, &format!("Input{}", i + 1), var);
    }
    write_variable(&mut out, "Output1", fis.output());
    let _ = writeln!(out, "[Rules]");
    for rule in fis.rules() {
        let antecedent: Vec<String> = rule
            .antecedent()
            .iter()
            .map(|t| t.map_or(0, |i| i + 1).to_string())
            .collect();
        let connective = match rule.connective() {
            Connective::And => 1,
            Connective::Or => 2,
        };
        let _ = writeln!(
            out,
            "{}, {} ({}) : {}",
            antecedent.join(" "),
            rule.consequent() + 1,
            format_number(rule.weight()),
            connective
        );
    }
    out
}
