//! Grammar file parser.
//!
//! Line-oriented UTF-8 format, `#` starts a comment anywhere:
//!
//! ```text
//! format: pfsg            (or pcfg)
//! start: q0
//! q0 : hi -> q1 : 0.5     PFSG transition
//! q0 : $end : 0.5         PFSG end rule
//! S -> a S : 0.5          PCFG rule (any arity >= 1)
//! ```
//!
//! Symbols that occur on a PCFG left-hand side are nonterminals; everything
//! else on a right-hand side is a terminal.

use crate::error::{Error, Result};
use crate::token::END_TOKEN;

use super::pcfg::{Pcfg, PcfgRule, PcfgSym};
use super::pfsg::{Pfsg, PfsgEmission, PfsgRule};
use super::Grammar;

/// A token of one logical line with its 1-based starting column.
struct Field<'a> {
    text: &'a str,
    col: usize,
}

fn fields(line: &str) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in line.split_whitespace() {
        // Locate the part to report a correct column.
        let at = line[offset..].find(part).unwrap() + offset;
        out.push(Field {
            text: part,
            col: at + 1,
        });
        offset = at + part.len();
    }
    out
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn check_name(f: &Field<'_>, lineno: usize, what: &str) -> Result<()> {
    if f.text == ":" || f.text == "->" {
        return Err(syntax(lineno, f.col, format!("expected {what}, found `{}`", f.text)));
    }
    if f.text == END_TOKEN {
        return Err(syntax(
            lineno,
            f.col,
            format!("`{END_TOKEN}` is reserved and cannot be used as {what}"),
        ));
    }
    Ok(())
}

fn parse_prob(f: &Field<'_>, lineno: usize) -> Result<f64> {
    let p: f64 = f
        .text
        .parse()
        .map_err(|_| syntax(lineno, f.col, format!("invalid probability `{}`", f.text)))?;
    if !(p > 0.0 && p <= 1.0 + 1e-9) {
        return Err(syntax(
            lineno,
            f.col,
            format!("probability {p} outside (0, 1]"),
        ));
    }
    Ok(p.min(1.0))
}

struct Interner {
    names: Vec<String>,
}

impl Interner {
    fn new() -> Self {
        Interner { names: Vec::new() }
    }
    fn get(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
    fn intern(&mut self, name: &str) -> usize {
        match self.get(name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }
}

/// Parses and validates a grammar file.
pub fn parse_grammar(text: &str) -> Result<Grammar> {
    let mut format: Option<(bool, usize)> = None; // (is_pfsg, line)
    let mut start_name: Option<(String, usize)> = None;
    let mut rule_lines: Vec<(usize, Vec<Field<'_>>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let fs = fields(line);
        if fs.is_empty() {
            continue;
        }
        if format.is_none() {
            if fs[0].text != "format:" || fs.len() != 2 {
                return Err(syntax(lineno, fs[0].col, "expected `format: pfsg` or `format: pcfg`"));
            }
            let is_pfsg = match fs[1].text {
                "pfsg" => true,
                "pcfg" => false,
                other => {
                    return Err(syntax(
                        lineno,
                        fs[1].col,
                        format!("unknown formalism `{other}`; expected pfsg or pcfg"),
                    ))
                }
            };
            format = Some((is_pfsg, lineno));
            continue;
        }
        if start_name.is_none() {
            if fs[0].text != "start:" || fs.len() != 2 {
                return Err(syntax(lineno, fs[0].col, "expected `start: <name>`"));
            }
            check_name(&fs[1], lineno, "the start symbol")?;
            start_name = Some((fs[1].text.to_string(), lineno));
            continue;
        }
        rule_lines.push((lineno, fs));
    }

    let (is_pfsg, _) = format.ok_or_else(|| syntax(1, 1, "missing `format:` line"))?;
    let (start, start_line) =
        start_name.ok_or_else(|| syntax(1, 1, "missing `start:` line"))?;
    if rule_lines.is_empty() {
        return Err(syntax(start_line, 1, "grammar has no rules"));
    }

    if is_pfsg {
        parse_pfsg(&start, rule_lines)
    } else {
        parse_pcfg(&start, rule_lines)
    }
}

/// PFSG rule shapes:
/// `<state> : <terminal> -> <state> : <prob>` | `<state> : $end : <prob>`
fn parse_pfsg(start: &str, lines: Vec<(usize, Vec<Field<'_>>)>) -> Result<Grammar> {
    let mut states = Interner::new();
    let mut terms = Interner::new();
    let mut rules = Vec::new();

    for (lineno, fs) in &lines {
        let lineno = *lineno;
        let expect = |idx: usize, what: &str| -> Result<&Field<'_>> {
            fs.get(idx).ok_or_else(|| {
                let col = fs.last().map(|f| f.col + f.text.len()).unwrap_or(1);
                syntax(lineno, col, format!("expected {what}"))
            })
        };
        let src = expect(0, "a state name")?;
        check_name(src, lineno, "a state name")?;
        let colon = expect(1, "`:`")?;
        if colon.text != ":" {
            return Err(syntax(lineno, colon.col, "expected `:`"));
        }
        let emit = expect(2, "a terminal or `$end`")?;
        let source = states.intern(src.text);
        if emit.text == END_TOKEN {
            let colon2 = expect(3, "`:`")?;
            if colon2.text != ":" {
                return Err(syntax(lineno, colon2.col, "expected `:`"));
            }
            let prob = parse_prob(expect(4, "a probability")?, lineno)?;
            if fs.len() > 5 {
                return Err(syntax(lineno, fs[5].col, "trailing input after rule"));
            }
            rules.push(PfsgRule {
                source,
                emission: PfsgEmission::End,
                prob,
                line: lineno,
            });
        } else {
            check_name(emit, lineno, "a terminal")?;
            let arrow = expect(3, "`->`")?;
            if arrow.text != "->" {
                return Err(syntax(lineno, arrow.col, "expected `->`"));
            }
            let next = expect(4, "a successor state")?;
            check_name(next, lineno, "a successor state")?;
            let colon2 = expect(5, "`:`")?;
            if colon2.text != ":" {
                return Err(syntax(lineno, colon2.col, "expected `:`"));
            }
            let prob = parse_prob(expect(6, "a probability")?, lineno)?;
            if fs.len() > 7 {
                return Err(syntax(lineno, fs[7].col, "trailing input after rule"));
            }
            let term = terms.intern(emit.text);
            let next = states.intern(next.text);
            rules.push(PfsgRule {
                source,
                emission: PfsgEmission::Word { term, next },
                prob,
                line: lineno,
            });
        }
    }

    let start_id = states.get(start).ok_or_else(|| Error::UndeclaredSymbol {
        name: start.to_string(),
        line: 0,
    })?;
    Ok(Grammar::Pfsg(Pfsg::build(
        start_id,
        states.names,
        terms.names,
        rules,
    )?))
}

/// PCFG rule shape: `<NT> -> <sym> [<sym> ...] : <prob>`
fn parse_pcfg(start: &str, lines: Vec<(usize, Vec<Field<'_>>)>) -> Result<Grammar> {
    // First pass: left-hand sides are the nonterminals.
    let mut nts = Interner::new();
    for (lineno, fs) in &lines {
        let lhs = fs
            .first()
            .ok_or_else(|| syntax(*lineno, 1, "expected a nonterminal"))?;
        check_name(lhs, *lineno, "a nonterminal")?;
        nts.intern(lhs.text);
    }

    let mut terms = Interner::new();
    let mut rules = Vec::new();
    for (lineno, fs) in &lines {
        let lineno = *lineno;
        if fs.len() < 5 {
            let col = fs.last().map(|f| f.col + f.text.len()).unwrap_or(1);
            return Err(syntax(
                lineno,
                col,
                "expected `<NT> -> <sym> [<sym> ...] : <prob>`",
            ));
        }
        if fs[1].text != "->" {
            return Err(syntax(lineno, fs[1].col, "expected `->`"));
        }
        if fs[fs.len() - 2].text != ":" {
            return Err(syntax(
                lineno,
                fs[fs.len() - 2].col,
                "expected `:` before the probability",
            ));
        }
        let prob = parse_prob(&fs[fs.len() - 1], lineno)?;
        let lhs = nts.get(fs[0].text).unwrap();
        let mut rhs = Vec::new();
        for f in &fs[2..fs.len() - 2] {
            check_name(f, lineno, "a symbol")?;
            match nts.get(f.text) {
                Some(nt) => rhs.push(PcfgSym::Nonterminal(nt)),
                None => rhs.push(PcfgSym::Terminal(terms.intern(f.text))),
            }
        }
        if rhs.is_empty() {
            return Err(syntax(lineno, fs[2].col, "empty right-hand side"));
        }
        rules.push(PcfgRule {
            lhs,
            rhs,
            prob,
            line: lineno,
        });
    }

    let start_id = nts.get(start).ok_or_else(|| Error::UndeclaredSymbol {
        name: start.to_string(),
        line: 0,
    })?;
    Ok(Grammar::Pcfg(Pcfg::build(
        start_id,
        nts.names,
        terms.names,
        rules,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_pfsg() {
        let g = parse_grammar("format: pfsg\nstart: q0\nq0 : hi -> q1 : 1.0\nq1 : $end : 1.0\n")
            .unwrap();
        assert_eq!(g.alphabet(), ["hi".to_string()]);
    }

    #[test]
    fn probability_sum_violation() {
        let err =
            parse_grammar("format: pfsg\nstart: q0\nq0 : hi -> q1 : 0.9\nq1 : $end : 1.0\n")
                .unwrap_err();
        match err {
            Error::ProbabilitySum { symbol, sum, .. } => {
                assert_eq!(symbol, "q0");
                assert!((sum - 0.9).abs() < 1e-12);
            }
            other => panic!("expected ProbabilitySum, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_grammar("format: pfsg\nstart: q0\nq0 : hi -> q1 1.0\n").unwrap_err();
        match err {
            Error::Syntax { line, col, .. } => {
                assert_eq!(line, 3);
                assert!(col > 1);
            }
            other => panic!("expected Syntax, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_successor() {
        let err = parse_grammar("format: pfsg\nstart: q0\nq0 : hi -> q9 : 1.0\n").unwrap_err();
        assert!(matches!(err, Error::UndeclaredSymbol { ref name, .. } if name == "q9"));
    }

    #[test]
    fn non_terminating_pfsg() {
        // q1 loops forever with no way out.
        let err = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : $end : 0.5\nq1 : a -> q1 : 1.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonTerminating { .. }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_grammar(
            "# geometric\nformat: pcfg\nstart: S\n\nS -> a S : 0.5 # recurse\nS -> a : 0.5\n",
        )
        .unwrap();
        assert_eq!(g.alphabet(), ["a".to_string()]);
    }

    #[test]
    fn end_reserved_in_pcfg() {
        let err = parse_grammar("format: pcfg\nstart: S\nS -> $end : 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }
}
