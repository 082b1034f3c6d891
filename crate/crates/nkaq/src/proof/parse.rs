//! Proof-script file format.
//!
//! ```text
//! alphabet: m0 m1 p
//! effects: a b            # declares a, a', b, b' and the top effect e
//! partition M: m0 m1
//! hypotheses:
//!   proj: m1 m1 = m1
//!   disj: m1 m0 = 0
//! lemma main: (m0 p)* m1 = …
//!   (m0 p)* m1
//!   …                     [= by fixed-point RL at 0]
//! lemma both: x = y by antisym(le1, le2)
//! ```
//!
//! Justification brackets read
//! `[<rel> by <rule> <LR|RL> [at <path>] [with v=expr, …] [using h, …]]`
//! with `<rel>` one of `=`, `<=`; `at root` pins the whole term.

use super::{ChainLine, Direction, Justification, Lemma, PartitionDecl, ProofScript, Step};
use crate::syntax::{is_identifier, parse_expr, parse_inequation, Alphabet, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ProofParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ProofParseError> {
    Err(ProofParseError {
        line,
        message: message.into(),
    })
}

enum Section {
    Preamble,
    Hypotheses,
    Lemma,
}

pub fn parse_script(name: &str, text: &str) -> Result<ProofScript, ProofParseError> {
    let mut script = ProofScript {
        name: name.to_string(),
        alphabet: Alphabet::new(),
        partitions: Vec::new(),
        hypotheses: Vec::new(),
        lemmas: Vec::new(),
    };
    let mut section = Section::Preamble;
    let mut names_seen: Vec<String> = Vec::new();

    for (ix, raw) in text.lines().enumerate() {
        let line_no = ix + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("alphabet:") {
            for sym in rest.split_whitespace() {
                script
                    .alphabet
                    .declare_action(sym)
                    .map_err(|e| ProofParseError {
                        line: line_no,
                        message: e.to_string(),
                    })?;
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("effects:") {
            if script.alphabet.top_effect().is_none() {
                script
                    .alphabet
                    .declare_effect_top("e")
                    .map_err(|e| ProofParseError {
                        line: line_no,
                        message: e.to_string(),
                    })?;
            }
            for sym in rest.split_whitespace() {
                script
                    .alphabet
                    .declare_effect(sym)
                    .map_err(|e| ProofParseError {
                        line: line_no,
                        message: e.to_string(),
                    })?;
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("partition ") {
            let (pname, members) = match rest.split_once(':') {
                Some(x) => x,
                None => return err(line_no, "partition declaration needs `name: members`"),
            };
            let members = members
                .split_whitespace()
                .map(|m| {
                    script
                        .alphabet
                        .lookup(m)
                        .ok_or_else(|| ProofParseError {
                            line: line_no,
                            message: format!("undeclared partition member `{m}`"),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            script.partitions.push(PartitionDecl {
                name: pname.trim().to_string(),
                members,
            });
            continue;
        }
        if trimmed == "hypotheses:" {
            section = Section::Hypotheses;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("lemma ") {
            section = Section::Lemma;
            let (lname, goal_text) = match rest.split_once(':') {
                Some(x) => x,
                None => return err(line_no, "lemma head needs `name: goal`"),
            };
            let lname = lname.trim().to_string();
            if !is_identifier(&lname.replace('-', "_")) {
                return err(line_no, format!("bad lemma name `{lname}`"));
            }
            if names_seen.contains(&lname) {
                return err(line_no, format!("duplicate name `{lname}`"));
            }
            names_seen.push(lname.clone());
            let goal_text = goal_text.trim();
            let (goal_text, justification) = match goal_text.rsplit_once(" by antisym(") {
                Some((g, tail)) => {
                    let tail = tail.trim_end();
                    let inner = tail.strip_suffix(')').ok_or_else(|| ProofParseError {
                        line: line_no,
                        message: "unclosed antisym(...)".to_string(),
                    })?;
                    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                    if parts.len() != 2 {
                        return err(line_no, "antisym takes two lemma names");
                    }
                    (
                        g,
                        Justification::Antisym(parts[0].to_string(), parts[1].to_string()),
                    )
                }
                None => (goal_text, Justification::Chain(Vec::new())),
            };
            let goal = parse_inequation(goal_text, &script.alphabet).map_err(|e| {
                ProofParseError {
                    line: line_no,
                    message: e.to_string(),
                }
            })?;
            script.lemmas.push(Lemma {
                name: lname,
                goal,
                justification,
                line_no,
            });
            continue;
        }

        match section {
            Section::Preamble => {
                return err(line_no, format!("unexpected line `{trimmed}`"));
            }
            Section::Hypotheses => {
                let (hname, ineq_text) = match trimmed.split_once(':') {
                    Some(x) => x,
                    None => return err(line_no, "hypothesis needs `name: inequation`"),
                };
                let hname = hname.trim().to_string();
                if names_seen.contains(&hname) {
                    return err(line_no, format!("duplicate name `{hname}`"));
                }
                names_seen.push(hname.clone());
                let ineq =
                    parse_inequation(ineq_text.trim(), &script.alphabet).map_err(|e| {
                        ProofParseError {
                            line: line_no,
                            message: e.to_string(),
                        }
                    })?;
                script.hypotheses.push((hname, ineq));
            }
            Section::Lemma => {
                let lemma = script.lemmas.last_mut().expect("inside a lemma");
                let chain = match &mut lemma.justification {
                    Justification::Chain(lines) => lines,
                    Justification::Antisym(..) => {
                        return err(line_no, "antisym lemmas have no chain lines")
                    }
                };
                let (term_text, step) = match trimmed.rsplit_once('[') {
                    Some((t, bracket)) => {
                        let bracket = bracket.trim_end();
                        let inner = bracket.strip_suffix(']').ok_or_else(|| {
                            ProofParseError {
                                line: line_no,
                                message: "unclosed justification bracket".to_string(),
                            }
                        })?;
                        (t.trim(), Some(parse_step(inner, &script.alphabet, line_no)?))
                    }
                    None => (trimmed, None),
                };
                if chain.is_empty() && step.is_some() {
                    return err(line_no, "the first chain line carries no justification");
                }
                if !chain.is_empty() && step.is_none() {
                    return err(line_no, "missing justification bracket");
                }
                let term = parse_expr(term_text, &script.alphabet).map_err(|e| {
                    ProofParseError {
                        line: line_no,
                        message: e.to_string(),
                    }
                })?;
                chain.push(ChainLine {
                    term,
                    step,
                    line_no,
                });
            }
        }
    }
    Ok(script)
}

fn parse_step(inner: &str, alphabet: &Alphabet, line_no: usize) -> Result<Step, ProofParseError> {
    // Layout: <rel> by <rule> <dir> [at …] [with …] [using …]
    let (rel_text, rest) = inner
        .trim()
        .split_once(" by ")
        .ok_or_else(|| ProofParseError {
            line: line_no,
            message: "expected `<rel> by <rule> …`".to_string(),
        })?;
    let relation = match rel_text.trim() {
        "=" => Relation::Eq,
        "<=" | "≤" => Relation::Le,
        other => return err(line_no, format!("bad relation `{other}`")),
    };
    // Split off trailing keyword sections first (they may contain spaces).
    let mut rest = rest.trim().to_string();
    let mut using = Vec::new();
    if let Some((head, tail)) = split_keyword(&rest, "using") {
        using = tail.split(',').map(|s| s.trim().to_string()).collect();
        rest = head;
    }
    let mut binding = Vec::new();
    if let Some((head, tail)) = split_keyword(&rest, "with") {
        for item in tail.split(',') {
            let (v, e) = item.split_once('=').ok_or_else(|| ProofParseError {
                line: line_no,
                message: format!("bad binding `{item}`"),
            })?;
            let expr = parse_expr(e.trim(), alphabet).map_err(|e| ProofParseError {
                line: line_no,
                message: e.to_string(),
            })?;
            binding.push((v.trim().to_string(), expr));
        }
        rest = head;
    }
    let mut position = None;
    if let Some((head, tail)) = split_keyword(&rest, "at") {
        let tail = tail.trim();
        position = Some(if tail == "root" {
            Vec::new()
        } else {
            tail.split('.')
                .map(|d| {
                    d.trim().parse::<usize>().map_err(|_| ProofParseError {
                        line: line_no,
                        message: format!("bad path `{tail}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        });
        rest = head;
    }
    let mut toks = rest.split_whitespace();
    let rule = toks
        .next()
        .ok_or_else(|| ProofParseError {
            line: line_no,
            message: "missing rule name".to_string(),
        })?
        .to_string();
    let direction = match toks.next() {
        Some("LR") => Direction::LR,
        Some("RL") => Direction::RL,
        other => {
            return err(
                line_no,
                format!("expected direction LR or RL, found {other:?}"),
            )
        }
    };
    if let Some(junk) = toks.next() {
        return err(line_no, format!("unexpected token `{junk}`"));
    }
    Ok(Step {
        relation,
        rule,
        direction,
        position,
        binding,
        premises: using,
    })
}

/// Splits `text` at the LAST occurrence of the standalone keyword,
/// returning (head, tail-after-keyword).
fn split_keyword(text: &str, kw: &str) -> Option<(String, String)> {
    let needle = format!(" {kw} ");
    text.rfind(&needle)
        .map(|i| (text[..i].to_string(), text[i + needle.len()..].to_string()))
}

#[cfg(test)]
mod parse_tests {
    use super::*;

    #[test]
    fn parses_minimal_script() {
        let text = "\
alphabet: p q
hypotheses:
  comm: p q = q p
lemma swap: p* q = q p*
  p* q
  q p*   [= by swap-star LR with p=p, q=q using comm]
";
        let s = parse_script("demo", text).unwrap();
        assert_eq!(s.hypotheses.len(), 1);
        assert_eq!(s.lemmas.len(), 1);
        match &s.lemmas[0].justification {
            Justification::Chain(lines) => {
                assert_eq!(lines.len(), 2);
                let step = lines[1].step.as_ref().unwrap();
                assert_eq!(step.rule, "swap-star");
                assert_eq!(step.binding.len(), 2);
                assert_eq!(step.premises, vec!["comm".to_string()]);
            }
            _ => panic!("expected chain"),
        }
    }

    #[test]
    fn parses_antisym_and_effects() {
        let text = "\
alphabet: m0 m1
effects: a b
partition M: m0 m1
lemma le1: a <= e
  a
  e  [<= by effect-top LR with a=a]
lemma le2: a <= e
  a
  e  [<= by effect-top LR with a=a]
lemma eq: a + a' = e by antisym(le1, le2)
";
        let s = parse_script("demo", text).unwrap();
        assert_eq!(s.partitions.len(), 1);
        assert_eq!(s.lemmas.len(), 3);
        assert!(matches!(
            s.lemmas[2].justification,
            Justification::Antisym(..)
        ));
        assert!(s.alphabet.lookup("a'").is_some());
        assert!(s.alphabet.top_effect().is_some());
    }

    #[test]
    fn rejects_bad_bracket() {
        let text = "\
alphabet: p
lemma l: p = p
  p
  p [= fixed-point LR]
";
        assert!(parse_script("demo", text).is_err());
    }

    #[test]
    fn comments_and_positions() {
        let text = "\
alphabet: p q   # two symbols
lemma l: p (q + q) = p q + p q
  p (q + q)            # start
  p q + p q  [= by distrib-left LR at root]
";
        let s = parse_script("demo", text).unwrap();
        match &s.lemmas[0].justification {
            Justification::Chain(lines) => {
                assert_eq!(lines[1].step.as_ref().unwrap().position, Some(vec![]));
            }
            _ => panic!(),
        }
    }
}
