//! Artifact writers: full-precision floats, header-first CSV, and a small
//! deterministic JSON printer.
//!
//! Determinism is the whole point. Every float in every artifact goes
//! through [`f17`] (17 significant digits, enough to reproduce the `f64` bit
//! pattern on read-back), JSON object keys keep their insertion order, and
//! nothing stamps times or paths — so rerunning a command with the same
//! configuration rewrites every file byte for byte. The stock JSON crates
//! print floats in shortest-round-trip form, which is exact but not the
//! fixed-width form the regression diffs want; the printer here is a few
//! dozen lines and leaves the number format under our control.

use std::fs;
use std::io;
use std::path::Path;

/// `f64` at 17 significant digits, e.g. `2.5000000000000000e-1`.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV artifact: header row plus stringified rows, `\n` line ends, no
/// quoting (no field we emit contains a comma, quote, or newline).
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)
}

/// JSON value with ordered object fields.
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    /// Pretty form for files: two-space indent, one field per line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, 0);
        out.push('\n');
        out
    }

    /// Single-line form for stderr diagnostics.
    pub fn compact(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, usize::MAX);
        out
    }

    fn render(&self, out: &mut String, indent: usize) {
        match self {
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(x) => out.push_str(&f17(*x)),
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::List(items) => Self::render_seq(out, indent, '[', ']', items.len(), |out, ind, k| {
                items[k].render(out, ind);
            }),
            Json::Obj(fields) => Self::render_seq(out, indent, '{', '}', fields.len(), |out, ind, k| {
                let (name, value) = &fields[k];
                Json::Str((*name).to_string()).render(out, usize::MAX);
                out.push_str(": ");
                value.render(out, ind);
            }),
        }
    }

    fn render_seq(
        out: &mut String,
        indent: usize,
        open: char,
        close: char,
        len: usize,
        mut item: impl FnMut(&mut String, usize, usize),
    ) {
        out.push(open);
        if len == 0 {
            out.push(close);
            return;
        }
        let compact = indent == usize::MAX;
        for k in 0..len {
            if k > 0 {
                out.push(',');
            }
            if compact {
                if k > 0 {
                    out.push(' ');
                }
            } else {
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
            }
            item(out, if compact { usize::MAX } else { indent + 1 }, k);
        }
        if !compact {
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
        }
        out.push(close);
    }
}

pub fn write_json(path: &Path, value: &Json) -> io::Result<()> {
    fs::write(path, value.pretty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(f17(0.25), "2.5000000000000000e-1");
        assert_eq!(f17(1.0), "1.0000000000000000e0");
        let x = std::f64::consts::PI / 10.0;
        let round_trip: f64 = f17(x).parse().unwrap();
        assert_eq!(round_trip.to_bits(), x.to_bits());
    }

    #[test]
    fn json_renders_ordered_and_escaped() {
        let v = Json::Obj(vec![
            ("b", Json::Int(2)),
            ("a", Json::str("say \"hi\"\n")),
            ("xs", Json::List(vec![Json::Num(0.5), Json::Bool(false)])),
            ("empty", Json::Obj(vec![])),
        ]);
        assert_eq!(
            v.compact(),
            "{\"b\": 2, \"a\": \"say \\\"hi\\\"\\n\", \"xs\": [5.0000000000000000e-1, false], \"empty\": {}}"
        );
        let pretty = v.pretty();
        assert!(pretty.starts_with("{\n  \"b\": 2,\n  \"a\""), "insertion order kept");
        assert!(pretty.ends_with("}\n"));
    }
}
