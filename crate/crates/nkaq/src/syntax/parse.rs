//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term ("+" term)*
//! term   := factor+
//! factor := base "*"*
//! base   := "0" | "1" | ident | "(" expr ")"
//! ```
//!
//! Product is juxtaposition; "·" and "." are also accepted. Identifiers
//! match `[A-Za-z][A-Za-z0-9_']*`.

use super::{Alphabet, Expr, Inequation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared symbol `{name}` at byte {pos}")]
    Undeclared { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Zero,
    One,
    Ident(String),
    Plus,
    Star,
    Dot,
    LParen,
    RParen,
    LeOp,
    GeOp,
    EqOp,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let tok = match c {
            '0' => Tok::Zero,
            '1' => Tok::One,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '·' | '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::EqOp,
            '<' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((i, Tok::LeOp));
                i += 2;
                continue;
            }
            '≤' => Tok::LeOp,
            '>' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((i, Tok::GeOp));
                i += 2;
                continue;
            }
            '≥' => Tok::GeOp,
            c if c.is_ascii_alphabetic() => {
                let end = rest
                    .char_indices()
                    .find(|(_, ch)| {
                        !(ch.is_ascii_alphanumeric() || *ch == '_' || *ch == '\'')
                    })
                    .map(|(j, _)| j)
                    .unwrap_or(rest.len());
                toks.push((i, Tok::Ident(rest[..end].to_string())));
                i += end;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push((i, tok));
        i += c.len_utf8();
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alphabet: &'a mut Alphabet,
    auto_declare: bool,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Dot) => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Some(Tok::Zero | Tok::One | Tok::Ident(_) | Tok::LParen) => {
                    factors.push(self.factor()?);
                }
                _ => break,
            }
        }
        Ok(Expr::prod(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.base()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            e = Expr::star(e);
        }
        Ok(e)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Zero) => Ok(Expr::Zero),
            Some(Tok::One) => Ok(Expr::One),
            Some(Tok::Ident(name)) => {
                if let Some(sym) = self.alphabet.lookup(&name) {
                    Ok(Expr::Atom(sym))
                } else if self.auto_declare {
                    let sym = self
                        .alphabet
                        .declare_action(&name)
                        .map_err(|e| ParseError::Syntax {
                            pos,
                            message: e.to_string(),
                        })?;
                    Ok(Expr::Atom(sym))
                } else {
                    Err(ParseError::Undeclared { pos, name })
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ParseError::Syntax {
                        pos,
                        message: "unclosed parenthesis".to_string(),
                    }),
                }
            }
            other => Err(ParseError::Syntax {
                pos,
                message: format!("expected expression, found {other:?}"),
            }),
        }
    }
}

fn run<T>(
    text: &str,
    alphabet: &mut Alphabet,
    auto_declare: bool,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
        auto_declare,
        end: text.len(),
    };
    let value = f(&mut p)?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.here(),
            message: "trailing input".to_string(),
        });
    }
    Ok(value)
}

/// Parses an expression; every atom must be declared in `alphabet`.
pub fn parse_expr(text: &str, alphabet: &Alphabet) -> Result<Expr, ParseError> {
    let mut owned = alphabet.clone();
    run(text, &mut owned, false, |p| p.expr())
}

/// Parses an expression, declaring unseen identifiers as action symbols.
pub fn parse_expr_auto(text: &str, alphabet: &mut Alphabet) -> Result<Expr, ParseError> {
    run(text, alphabet, true, |p| p.expr())
}

/// Parses `lhs = rhs`, `lhs <= rhs` or `lhs >= rhs` (the latter is stored
/// with the sides swapped).
pub fn parse_inequation(text: &str, alphabet: &Alphabet) -> Result<Inequation, ParseError> {
    let mut owned = alphabet.clone();
    run(text, &mut owned, false, |p| {
        let lhs = p.expr()?;
        let pos = p.here();
        let rel = match p.bump() {
            Some(Tok::EqOp) => Relation::Eq,
            Some(Tok::LeOp) => Relation::Le,
            Some(Tok::GeOp) => {
                let rhs = p.expr()?;
                return Ok(Inequation::le(rhs, lhs));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("expected `=`, `<=` or `>=`, found {other:?}"),
                })
            }
        };
        let rhs = p.expr()?;
        Ok(Inequation {
            lhs: lhs.canonical(),
            rhs: rhs.canonical(),
            relation: rel,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet(names: &[&str]) -> Alphabet {
        let mut al = Alphabet::new();
        for n in names {
            al.declare_action(n).unwrap();
        }
        al
    }

    #[test]
    fn parses_star_product() {
        let al = alphabet(&["m0", "m1", "p"]);
        let e = parse_expr("(m0 p)* m1", &al).unwrap();
        let m0 = al.lookup("m0").unwrap();
        let m1 = al.lookup("m1").unwrap();
        let p = al.lookup("p").unwrap();
        assert_eq!(
            e,
            Expr::prod(vec![
                Expr::star(Expr::prod(vec![Expr::Atom(m0), Expr::Atom(p)])),
                Expr::Atom(m1),
            ])
        );
        assert_eq!(al.print(&e), "(m0 p)* m1");
    }

    #[test]
    fn parses_constants_and_dot_product() {
        let al = alphabet(&["a", "b"]);
        assert_eq!(parse_expr("0", &al).unwrap(), Expr::Zero);
        let e = parse_expr("a·b", &al).unwrap();
        let f = parse_expr("a . b", &al).unwrap();
        let g = parse_expr("a b", &al).unwrap();
        assert_eq!(e, f);
        assert_eq!(e, g);
    }

    #[test]
    fn sum_operands_preserved() {
        let al = alphabet(&["a"]);
        let e = parse_expr("a + a", &al).unwrap();
        match &e {
            Expr::Sum(ts) => assert_eq!(ts.len(), 2),
            _ => panic!("expected two-operand sum"),
        }
        assert_eq!(al.print(&e), "a + a");
    }

    #[test]
    fn undeclared_symbol_rejected() {
        let al = alphabet(&["a"]);
        match parse_expr("a + bogus", &al) {
            Err(ParseError::Undeclared { name, .. }) => assert_eq!(name, "bogus"),
            other => panic!("expected undeclared error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        let al = alphabet(&["a"]);
        match parse_expr("a + )", &al) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn inequation_forms() {
        let al = alphabet(&["a", "b"]);
        let eq = parse_inequation("a b = b a", &al).unwrap();
        assert_eq!(eq.relation, Relation::Eq);
        let le = parse_inequation("a <= a + b", &al).unwrap();
        assert_eq!(le.relation, Relation::Le);
        let ge = parse_inequation("a + b >= a", &al).unwrap();
        assert_eq!(ge.relation, Relation::Le);
        assert_eq!(al.print(&ge.lhs), "a");
    }
}
