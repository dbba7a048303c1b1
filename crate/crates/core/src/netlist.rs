//! SPICE-like netlist text format.
//!
//! One element or directive per line:
//!
//! ```text
//! .title <text>
//! R<name> <n1> <n2> <value>
//! C<name> <n1> <n2> <value>
//! V<name> <n+> <n-> <amplitude> [label]
//! X<name> <ny> <nx> <nz+> <nz-> CCII [B=<v>] [K=<v>]
//! .out <node>
//! ```
//!
//! `*` at the start of a line or `;` anywhere begins a comment. Element
//! letters, directives and the `CCII` model name are case-insensitive.
//! Values take the suffixes `f p n u m k meg` (`meg` is 10⁶, `m` is 10⁻³).
//! `0` and `gnd` name the ground node.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::{Netlist, NetlistBuilder};
use crate::circuit::{Element, ElementKind};
use crate::Scalar;

/// A located parse failure. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} ({snippet:?})")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub snippet: String,
}

/// Non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub netlist: Netlist<T>,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col)),
            (true, Some((b, c))) => {
                tokens.push(Token { text: &line[b..byte], column: c + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token { text: &line[b..], column: c + 1 });
    }
    tokens
}

/// Parses a number with an optional engineering suffix. The suffix is
/// folded into the decimal exponent before conversion, so the result is the
/// correctly rounded value of the written decimal (`10n` is exactly the
/// double nearest 10×10⁻⁹).
pub fn parse_value(text: &str) -> Option<f64> {
    let bytes = text.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    let mantissa = &text[..i];
    let mut exponent: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_digits = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_digits {
            exponent = text[i + 1..j].parse().ok()?;
            i = j;
        }
    }
    let suffix = text[i..].to_ascii_lowercase();
    exponent += match suffix.as_str() {
        "" => 0,
        "f" => -15,
        "p" => -12,
        "n" => -9,
        "u" => -6,
        "m" => -3,
        "k" => 3,
        "meg" => 6,
        _ => return None,
    };
    let value: f64 = format!("{mantissa}e{exponent}").parse().ok()?;
    value.is_finite().then_some(value)
}

fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('*') {
        return "";
    }
    match line.find(';') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses netlist text, collecting every error in one pass.
pub fn parse_netlist<T: Scalar>(source: &str) -> Result<Netlist<T>, Vec<ParseError>> {
    parse_netlist_with_warnings(source).map(|p| p.netlist)
}

/// Like [`parse_netlist`] for raw bytes; invalid UTF-8 is a parse error.
pub fn parse_netlist_bytes<T: Scalar>(source: &[u8]) -> Result<Netlist<T>, Vec<ParseError>> {
    match std::str::from_utf8(source) {
        Ok(text) => parse_netlist(text),
        Err(e) => {
            let valid = &source[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
            Err(vec![ParseError { line, column, message: "invalid UTF-8".into(), snippet: String::new() }])
        }
    }
}

pub fn parse_netlist_with_warnings<T: Scalar>(source: &str) -> Result<Parsed<T>, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut builder = NetlistBuilder::<T>::new("");
    let mut title = String::new();
    let mut output: Option<(usize, String)> = None;
    let mut names = HashSet::new();
    let mut last_line = 1;

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let code = strip_comment(raw);
        let tokens = tokenize(code);
        let Some(head) = tokens.first().copied() else { continue };
        let err = |tok: Token, message: String| ParseError {
            line: line_no,
            column: tok.column,
            message,
            snippet: tok.text.to_string(),
        };

        if head.text.starts_with('.') {
            match head.text.to_ascii_lowercase().as_str() {
                ".title" => {
                    title = tokens[1..].iter().map(|t| t.text).collect::<Vec<_>>().join(" ");
                }
                ".out" => {
                    if tokens.len() != 2 {
                        errors.push(err(head, format!("wrong arity: .out takes 1 node, got {}", tokens.len() - 1)));
                        continue;
                    }
                    if output.is_some() {
                        warnings.push(ParseWarning {
                            line: line_no,
                            message: "multiple .out directives; the last one wins".into(),
                        });
                    }
                    output = Some((line_no, tokens[1].text.to_string()));
                }
                ".end" => break,
                _ => errors.push(err(head, "unknown directive".into())),
            }
            continue;
        }

        let letter = head.text.chars().next().map(|c| c.to_ascii_uppercase());
        let expected_arity: &[usize] = match letter {
            Some('R') | Some('C') => &[4],
            Some('V') => &[4, 5],
            Some('X') => &[6, 7, 8],
            _ => {
                errors.push(err(head, "unknown element letter".into()));
                continue;
            }
        };
        if !expected_arity.contains(&tokens.len()) {
            errors.push(err(head, format!("wrong arity: {} fields", tokens.len())));
            continue;
        }
        if !names.insert(head.text.to_ascii_uppercase()) {
            errors.push(err(head, "duplicate element name".into()));
            continue;
        }
        let value = |tok: Token| -> Result<T, ParseError> {
            parse_value(tok.text)
                .and_then(T::from_f64)
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(tok, "malformed value".into()))
        };
        let name = head.text;
        let node = |i: usize| tokens[i].text;

        match letter {
            Some('R') | Some('C') => match value(tokens[3]) {
                Ok(v) if letter == Some('R') => {
                    builder.resistor(name, node(1), node(2), v);
                }
                Ok(v) => {
                    builder.capacitor(name, node(1), node(2), v);
                }
                Err(e) => errors.push(e),
            },
            Some('V') => match value(tokens[3]) {
                Ok(v) => {
                    let label = tokens.get(4).map_or(name, |t| t.text);
                    builder.vsource(name, node(1), node(2), v, label);
                }
                Err(e) => errors.push(e),
            },
            Some('X') => {
                if !tokens[5].text.eq_ignore_ascii_case("ccii") {
                    errors.push(err(tokens[5], "unknown device model (expected CCII)".into()));
                    continue;
                }
                let mut b = T::one();
                let mut k = T::one();
                let mut seen = HashSet::new();
                let mut ok = true;
                for tok in &tokens[6..] {
                    let Some((key, val)) = tok.text.split_once('=') else {
                        errors.push(err(*tok, "expected B=<value> or K=<value>".into()));
                        ok = false;
                        continue;
                    };
                    let key = key.to_ascii_uppercase();
                    if !seen.insert(key.clone()) {
                        errors.push(err(*tok, format!("duplicate parameter {key}")));
                        ok = false;
                        continue;
                    }
                    let parsed = parse_value(val).and_then(T::from_f64).filter(|v| v.is_finite());
                    match (key.as_str(), parsed) {
                        ("B", Some(v)) => b = v,
                        ("K", Some(v)) => k = v,
                        ("B" | "K", None) => {
                            errors.push(err(*tok, "malformed value".into()));
                            ok = false;
                        }
                        _ => {
                            errors.push(err(*tok, format!("unknown parameter {key}")));
                            ok = false;
                        }
                    }
                }
                if ok {
                    builder.ccii(name, node(1), node(2), node(3), node(4), b, k);
                }
            }
            _ => unreachable!(),
        }
    }

    let Some((_, out)) = output else {
        errors.push(ParseError {
            line: last_line,
            column: 1,
            message: "missing .out directive".into(),
            snippet: String::new(),
        });
        return Err(errors);
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    let netlist = builder.set_title(title).build(&out);
    Ok(Parsed { netlist, warnings })
}

/// Writes a netlist in the text format; [`parse_netlist`] reads it back to
/// an equal netlist. Values use the shortest exact round-trip form.
pub fn serialize_netlist<T: Scalar>(netlist: &Netlist<T>) -> String {
    let mut out = String::new();
    let title = netlist.title().split_whitespace().collect::<Vec<_>>().join(" ");
    if !title.is_empty() {
        out.push_str(&format!(".title {title}\n"));
    }
    let node = |i: usize| netlist.node_name(i).unwrap_or("?");
    for Element { name, kind } in netlist.elements() {
        let line = match kind {
            ElementKind::Resistor { a, b, ohms } => format!("{name} {} {} {ohms:e}", node(*a), node(*b)),
            ElementKind::Capacitor { a, b, farads } => format!("{name} {} {} {farads:e}", node(*a), node(*b)),
            ElementKind::VSource { pos, neg, volts, label } => {
                format!("{name} {} {} {volts:e} {label}", node(*pos), node(*neg))
            }
            ElementKind::Ccii { y, x, z_plus, z_minus, b, k } => format!(
                "{name} {} {} {} {} CCII B={b:e} K={k:e}",
                node(*y),
                node(*x),
                node(*z_plus),
                node(*z_minus)
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!(".out {}\n", node(netlist.output())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    const RC: &str = "* rc low-pass\nV1 in 0 1 vin\nR1 in out 10k ; series\nC1 out gnd 10n\n.out out\n";

    #[test]
    fn suffixes() {
        assert_eq!(parse_value("10k"), Some(10000.0));
        assert_eq!(parse_value("10n"), Some(10e-9));
        assert_eq!(parse_value("10N"), Some(10e-9));
        assert_eq!(parse_value("2.2meg"), Some(2.2e6));
        assert_eq!(parse_value("3m"), Some(3e-3));
        assert_eq!(parse_value("1.5e3k"), Some(1.5e6));
        assert_eq!(parse_value("4.7u"), Some(4.7e-6));
        assert_eq!(parse_value("1p"), Some(1e-12));
        assert_eq!(parse_value("1f"), Some(1e-15));
        assert_eq!(parse_value(".5"), Some(0.5));
        assert_eq!(parse_value("-2"), Some(-2.0));
        for bad in ["10q", "", "k", "1..2", "1e", "e3", "1e999", "--1"] {
            assert_eq!(parse_value(bad), None, "{bad}");
        }
    }

    #[test]
    fn resistor_line() {
        let n: Netlist<f64> = parse_netlist("V1 in 0 1\nR1 in out 10k\n.out out\n").unwrap();
        let r = n.element("R1").unwrap();
        assert_eq!(r.kind, ElementKind::Resistor { a: n.node_index("in").unwrap(), b: n.node_index("out").unwrap(), ohms: 10000.0 });
    }

    #[test]
    fn ccii_line_with_gains() {
        let n: Netlist<f64> = parse_netlist("V1 y 0 1\nX1 y x zp zm CCII B=0.98 K=1.02\n.out zp\n").unwrap();
        match n.element("x1").unwrap().kind {
            ElementKind::Ccii { b, k, .. } => assert_eq!((b, k), (0.98, 1.02)),
            _ => panic!(),
        }
    }

    #[test]
    fn malformed_value_is_located() {
        let errs = parse_netlist::<f64>("R1 a b 10q\n.out a\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (1, 8));
        assert_eq!(errs[0].message, "malformed value");
        assert_eq!(errs[0].snippet, "10q");
    }

    #[test]
    fn all_errors_are_collected() {
        let src = "Q1 a b 1\nR1 a b\nR2 a b 1\nr2 a 0 2\nX1 a b c d OPAMP\nX2 a b c d ccii Z=1\n.foo\n";
        let errs = parse_netlist::<f64>(src).unwrap_err();
        let msgs: Vec<_> = errs.iter().map(|e| (e.line, e.message.as_str())).collect();
        assert!(msgs.contains(&(1, "unknown element letter")));
        assert!(msgs.iter().any(|(l, m)| *l == 2 && m.starts_with("wrong arity")));
        assert!(msgs.contains(&(4, "duplicate element name")));
        assert!(msgs.iter().any(|(l, m)| *l == 5 && m.starts_with("unknown device model")));
        assert!(msgs.iter().any(|(l, m)| *l == 6 && m.starts_with("unknown parameter")));
        assert!(msgs.contains(&(7, "unknown directive")));
        assert!(msgs.iter().any(|(_, m)| *m == "missing .out directive"));
    }

    #[test]
    fn comments_ground_aliases_and_labels() {
        let p = parse_netlist_with_warnings::<f64>(RC).unwrap();
        assert!(p.warnings.is_empty());
        let n = p.netlist;
        assert_eq!(n.node_count(), 2);
        assert_eq!(n.inputs().keys().collect::<Vec<_>>(), vec!["vin"]);
        assert_eq!(validate(&n), Ok(()));
        assert_eq!(n.element("C1").unwrap().nodes()[1], 0);
    }

    #[test]
    fn last_out_wins_with_warning() {
        let p = parse_netlist_with_warnings::<f64>("V1 a 0 1\nR1 a b 1\nR2 b 0 1\n.out a\n.OUT b\n").unwrap();
        assert_eq!(p.netlist.output_node().unwrap().name, "b");
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn title_and_serialization() {
        let src = ".title  rc   test\n".to_string() + RC;
        let n: Netlist<f64> = parse_netlist(&src).unwrap();
        assert_eq!(n.title(), "rc test");
        let text = serialize_netlist(&n);
        assert!(text.contains("R1 in out 1e4"));
        assert_eq!(parse_netlist::<f64>(&text).unwrap(), n);
    }

    #[test]
    fn invalid_utf8_is_an_error() {
        let errs = parse_netlist_bytes::<f64>(b"R1 a b 1\nR2 \xff").unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (2, 4));
    }
}
