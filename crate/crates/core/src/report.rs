//! Deterministic report emission.
//!
//! Hand-rolled JSON/CSV writers: field order is fixed, floats are rendered
//! with 9 significant digits, and there are no timestamps, so identical
//! inputs produce byte-identical reports. JSON has no infinity literal;
//! infinite values are emitted as the strings `"inf"` / `"-inf"`.

use std::fmt::Write as _;

use crate::learner::ConvergenceProfile;

/// Renders a float with 9 significant digits (scientific notation).
/// Exact integers in a small range render as plain integers.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    format!("{x:.8e}")
}

/// A JSON value with deterministic rendering.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    UInt(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj(fields: Vec<(&str, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::UInt(u) => {
                let _ = write!(out, "{u}");
            }
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&fmt_sig(*x));
                } else {
                    // JSON numbers cannot be infinite; use strings.
                    let _ = write!(out, "\"{}\"", fmt_sig(*x));
                }
            }
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\r' => out.push_str("\\r"),
                        '\t' => out.push_str("\\t"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    let _ = write!(out, "\"{k}\": ");
                    v.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Profile CSV schema, one row per step; bounds repeat on every row.
pub const PROFILE_CSV_HEADER: &str =
    "n,s_n,cum_s,delta_n,cum_delta,lambda_n,cum_lambda,bound_pred,bound_over,bound_under";

/// Renders a profile as CSV. `meta` lines are prepended as `# ` comments.
pub fn profile_csv(profile: &ConvergenceProfile, meta: &[String]) -> String {
    let mut out = String::new();
    for m in meta {
        let _ = writeln!(out, "# {m}");
    }
    let _ = writeln!(out, "{PROFILE_CSV_HEADER}");
    for step in &profile.steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            step.n,
            fmt_sig(step.s),
            fmt_sig(step.cum_s),
            fmt_sig(step.delta),
            fmt_sig(step.cum_delta),
            fmt_sig(step.lambda),
            fmt_sig(step.cum_lambda),
            fmt_sig(profile.bounds.prediction),
            fmt_sig(profile.bounds.overgeneralization),
            fmt_sig(profile.bounds.undergeneralization),
        );
    }
    out
}

/// Renders a profile as a JSON value (shared schema across modules).
pub fn profile_json(profile: &ConvergenceProfile) -> Json {
    let steps: Vec<Json> = profile
        .steps
        .iter()
        .map(|s| {
            let mut fields = vec![
                ("n", Json::UInt(s.n as u64)),
                ("s", Json::Num(s.s)),
                ("s_tv", Json::Num(s.s_tv)),
                ("cum_s", Json::Num(s.cum_s)),
                ("delta", Json::Num(s.delta)),
                ("cum_delta", Json::Num(s.cum_delta)),
                ("lambda", Json::Num(s.lambda)),
                ("cum_lambda", Json::Num(s.cum_lambda)),
            ];
            if let (Some(sc), Some(dc), Some(lc)) = (s.s_ci, s.delta_ci, s.lambda_ci) {
                fields.push(("s_ci95", Json::Num(sc)));
                fields.push(("delta_ci95", Json::Num(dc)));
                fields.push(("lambda_ci95", Json::Num(lc)));
            }
            Json::obj(fields)
        })
        .collect();
    Json::obj(vec![
        ("mode", Json::Str(profile.mode.clone())),
        ("truth_bits", Json::Num(profile.truth_bits)),
        ("f", Json::Num(profile.f)),
        (
            "bounds",
            Json::obj(vec![
                ("prediction", Json::Num(profile.bounds.prediction)),
                (
                    "overgeneralization",
                    Json::Num(profile.bounds.overgeneralization),
                ),
                (
                    "undergeneralization",
                    Json::Num(profile.bounds.undergeneralization),
                ),
            ]),
        ),
        ("steps", Json::Arr(steps)),
    ])
}
