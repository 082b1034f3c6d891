//! Concrete syntax of while-programs.
//!
//! ```text
//! prog  := stmt (";" stmt)*
//! stmt  := "skip" | "abort"
//!        | reg ":=" "|0>"
//!        | regs ":=" name "[" regs "]"
//!        | "case" name "[" regs "]" "{" (int "->" prog ";")* "}" "end"
//!        | "while" name "[" regs "]" "=" "1" "do" prog "done"
//!        | "if" name "[" regs "]" "=" "1" "then" stmt ["else" stmt]
//! regs  := reg ("," reg)*
//! ```
//!
//! Unitary and measurement names resolve against the tables of the JSON
//! container; `if` is sugar for a two-branch `case` with an implicit
//! `skip` else-branch.

use super::{
    AppliedMeasurement, ProgramContainer, ProgramError, QProgram, VariableLayout,
};
use crate::quantum::{CMat, Measurement};
use std::collections::BTreeMap;

pub struct Tables {
    pub unitaries: BTreeMap<String, CMat>,
    pub measurements: BTreeMap<String, Measurement>,
}

impl Tables {
    pub fn from_container(c: &ProgramContainer) -> Result<Self, ProgramError> {
        let mut unitaries = BTreeMap::new();
        for (name, m) in &c.unitaries {
            unitaries.insert(name.clone(), m.to_mat()?);
        }
        let mut measurements = BTreeMap::new();
        for (name, m) in &c.measurements {
            measurements.insert(name.clone(), m.to_measurement(1e-8)?);
        }
        Ok(Tables {
            unitaries,
            measurements,
        })
    }

    pub fn empty() -> Self {
        Tables {
            unitaries: BTreeMap::new(),
            measurements: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Assign,
    KetZero,
    Semi,
    Comma,
    Arrow,
    Eq,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
}

fn keyword(s: &str) -> bool {
    matches!(
        s,
        "skip" | "abort" | "case" | "while" | "do" | "done" | "if" | "then" | "else" | "end"
    )
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ProgramError> {
    let mut toks = Vec::new();
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = match c {
            ':' if b.get(i + 1) == Some(&b'=') => (Tok::Assign, 2),
            '|' if text[i..].starts_with("|0>") => (Tok::KetZero, 3),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '-' if b.get(i + 1) == Some(&b'>') => (Tok::Arrow, 2),
            '=' => (Tok::Eq, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            c if c.is_ascii_digit() => {
                let end = text[i..]
                    .find(|ch: char| !ch.is_ascii_digit())
                    .map(|j| i + j)
                    .unwrap_or(text.len());
                let n = text[i..end].parse().unwrap();
                (Tok::Int(n), end - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let end = text[i..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\''))
                    .map(|j| i + j)
                    .unwrap_or(text.len());
                (Tok::Ident(text[i..end].to_string()), end - i)
            }
            other => {
                return Err(ProgramError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push((i, tok));
        i += len;
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    layout: &'a VariableLayout,
    tables: &'a Tables,
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

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ProgramError> {
        Err(ProgramError::Syntax {
            pos: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ProgramError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {tok:?}, found {:?}", self.peek()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ProgramError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.bump();
                Ok(())
            }
            other => self.fail(format!("expected `{kw}`, found {other:?}")),
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self) -> Result<String, ProgramError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            other => self.fail(format!("expected identifier, found {other:?}")),
        }
    }

    fn register(&mut self) -> Result<usize, ProgramError> {
        let name = self.ident()?;
        self.layout.index_of(&name)
    }

    fn register_list(&mut self) -> Result<Vec<usize>, ProgramError> {
        let mut regs = vec![self.register()?];
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            regs.push(self.register()?);
        }
        Ok(regs)
    }

    fn applied_measurement(&mut self) -> Result<AppliedMeasurement, ProgramError> {
        let name = self.ident()?;
        let meas = self
            .tables
            .measurements
            .get(&name)
            .ok_or_else(|| ProgramError::UnknownMeasurement(name.clone()))?
            .clone();
        self.expect(Tok::LBracket)?;
        let regs = self.register_list()?;
        self.expect(Tok::RBracket)?;
        let group_dim: usize = regs.iter().map(|&r| self.layout.dim_of(r)).product();
        if meas.dim() != group_dim {
            return Err(ProgramError::OpDimMismatch(meas.dim(), group_dim));
        }
        Ok(AppliedMeasurement { name, regs, meas })
    }

    /// `<int> "->"` starts the next case branch.
    fn at_branch_start(&self) -> bool {
        matches!(self.toks.get(self.pos), Some((_, Tok::Int(_))))
            && matches!(self.toks.get(self.pos + 1), Some((_, Tok::Arrow)))
    }

    fn program(&mut self) -> Result<QProgram, ProgramError> {
        let mut stmts = vec![self.statement()?];
        while self.peek() == Some(&Tok::Semi) {
            self.bump();
            // Allow a trailing separator before a closing brace/keyword or
            // the next case branch.
            if self.peek().is_none()
                || matches!(self.peek(), Some(Tok::RBrace))
                || self.at_branch_start()
                || self.at_kw("done")
                || self.at_kw("else")
                || self.at_kw("end")
            {
                break;
            }
            stmts.push(self.statement()?);
        }
        Ok(QProgram::seq_all(stmts))
    }

    fn statement(&mut self) -> Result<QProgram, ProgramError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "skip" => {
                self.bump();
                Ok(QProgram::Skip)
            }
            Some(Tok::Ident(s)) if s == "abort" => {
                self.bump();
                Ok(QProgram::Abort)
            }
            Some(Tok::Ident(s)) if s == "case" => self.case_stmt(),
            Some(Tok::Ident(s)) if s == "while" => self.while_stmt(),
            Some(Tok::Ident(s)) if s == "if" => self.if_stmt(),
            Some(Tok::Ident(s)) if !keyword(s) => self.assignment(),
            other => self.fail(format!("expected statement, found {other:?}")),
        }
    }

    fn assignment(&mut self) -> Result<QProgram, ProgramError> {
        let regs = self.register_list()?;
        self.expect(Tok::Assign)?;
        match self.peek() {
            Some(Tok::KetZero) => {
                self.bump();
                if regs.len() != 1 {
                    return self.fail("reset takes a single register");
                }
                Ok(QProgram::Reset(regs[0]))
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                let matrix = self
                    .tables
                    .unitaries
                    .get(&name)
                    .ok_or_else(|| ProgramError::UnknownUnitary(name.clone()))?
                    .clone();
                self.expect(Tok::LBracket)?;
                let rhs_regs = self.register_list()?;
                self.expect(Tok::RBracket)?;
                if rhs_regs != regs {
                    return self.fail("register lists on both sides of `:=` must match");
                }
                let group_dim: usize = regs.iter().map(|&r| self.layout.dim_of(r)).product();
                if matrix.nrows() != group_dim {
                    return Err(ProgramError::OpDimMismatch(matrix.nrows(), group_dim));
                }
                Ok(QProgram::Unitary { name, regs, matrix })
            }
            other => self.fail(format!("expected `|0>` or unitary name, found {other:?}")),
        }
    }

    fn case_stmt(&mut self) -> Result<QProgram, ProgramError> {
        self.expect_kw("case")?;
        let meas = self.applied_measurement()?;
        self.expect(Tok::LBrace)?;
        let mut branches = BTreeMap::new();
        while self.peek() != Some(&Tok::RBrace) {
            let i = match self.bump() {
                Some(Tok::Int(i)) => i,
                other => return self.fail(format!("expected outcome index, found {other:?}")),
            };
            if i >= meas.meas.n_outcomes() {
                return self.fail(format!("outcome {i} out of range"));
            }
            self.expect(Tok::Arrow)?;
            let p = self.program()?;
            branches.insert(i, p);
            if self.peek() == Some(&Tok::Semi) {
                self.bump();
            }
        }
        self.expect(Tok::RBrace)?;
        self.expect_kw("end")?;
        // Unlisted outcomes behave as measure-then-skip.
        for i in 0..meas.meas.n_outcomes() {
            branches.entry(i).or_insert(QProgram::Skip);
        }
        Ok(QProgram::Case { meas, branches })
    }

    fn while_stmt(&mut self) -> Result<QProgram, ProgramError> {
        self.expect_kw("while")?;
        let meas = self.applied_measurement()?;
        if meas.meas.n_outcomes() != 2 {
            return Err(ProgramError::BadLoopMeasurement(meas.meas.n_outcomes()));
        }
        self.expect(Tok::Eq)?;
        match self.bump() {
            Some(Tok::Int(1)) => {}
            other => return self.fail(format!("loops continue on outcome 1, found {other:?}")),
        }
        self.expect_kw("do")?;
        let body = self.program()?;
        self.expect_kw("done")?;
        Ok(QProgram::While {
            meas,
            body: Box::new(body),
        })
    }

    fn if_stmt(&mut self) -> Result<QProgram, ProgramError> {
        self.expect_kw("if")?;
        let meas = self.applied_measurement()?;
        if meas.meas.n_outcomes() != 2 {
            return Err(ProgramError::BadLoopMeasurement(meas.meas.n_outcomes()));
        }
        self.expect(Tok::Eq)?;
        match self.bump() {
            Some(Tok::Int(1)) => {}
            other => return self.fail(format!("`if` tests outcome 1, found {other:?}")),
        }
        self.expect_kw("then")?;
        let then_branch = self.statement()?;
        let else_branch = if self.at_kw("else") {
            self.bump();
            self.statement()?
        } else {
            QProgram::Skip
        };
        let mut branches = BTreeMap::new();
        branches.insert(0, else_branch);
        branches.insert(1, then_branch);
        Ok(QProgram::Case { meas, branches })
    }
}

/// Parses program text against a layout and name tables.
pub fn parse_program(
    text: &str,
    layout: &VariableLayout,
    tables: &Tables,
) -> Result<QProgram, ProgramError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        layout,
        tables,
        end: text.len(),
    };
    let prog = p.program()?;
    if p.pos != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::cscalar;

    fn tables() -> Tables {
        let mut t = Tables::empty();
        t.unitaries.insert(
            "X".into(),
            CMat::from_row_slice(2, 2, &[cscalar(0.0), cscalar(1.0), cscalar(1.0), cscalar(0.0)]),
        );
        t.measurements
            .insert("M".into(), Measurement::computational(2));
        t
    }

    fn layout() -> VariableLayout {
        VariableLayout::new(vec![("q".into(), 2)]).unwrap()
    }

    #[test]
    fn parses_skip() {
        let p = parse_program("skip", &layout(), &tables()).unwrap();
        assert!(matches!(p, QProgram::Skip));
    }

    #[test]
    fn parses_while() {
        let p = parse_program("while M[q]=1 do q := X[q] done", &layout(), &tables()).unwrap();
        match &p {
            QProgram::While { meas, body } => {
                assert_eq!(meas.name, "M");
                assert!(matches!(**body, QProgram::Unitary { .. }));
            }
            other => panic!("expected while, got {other:?}"),
        }
    }

    #[test]
    fn if_without_else_gets_skip_branch() {
        let p = parse_program("if M[q]=1 then q := X[q]", &layout(), &tables()).unwrap();
        match &p {
            QProgram::Case { branches, .. } => {
                assert!(matches!(branches[&0], QProgram::Skip));
                assert!(matches!(branches[&1], QProgram::Unitary { .. }));
            }
            other => panic!("expected case, got {other:?}"),
        }
    }

    #[test]
    fn parses_case_and_reset() {
        let text = "case M[q] { 0 -> skip; 1 -> q := |0> } end; q := X[q]";
        let p = parse_program(text, &layout(), &tables()).unwrap();
        match &p {
            QProgram::Seq(a, b) => {
                assert!(matches!(**a, QProgram::Case { .. }));
                assert!(matches!(**b, QProgram::Unitary { .. }));
            }
            other => panic!("expected seq, got {other:?}"),
        }
    }

    #[test]
    fn unknown_register_rejected() {
        match parse_program("w := |0>", &layout(), &tables()) {
            Err(ProgramError::UnknownRegister(n)) => assert_eq!(n, "w"),
            other => panic!("expected unknown register, got {other:?}"),
        }
    }

    #[test]
    fn dim_mismatch_rejected() {
        let two = VariableLayout::new(vec![("q".into(), 2), ("r".into(), 2)]).unwrap();
        match parse_program("q, r := X[q, r]", &two, &tables()) {
            Err(ProgramError::OpDimMismatch(2, 4)) => {}
            other => panic!("expected dim mismatch, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_via_to_text() {
        let text = "while M[q]=1 do q := X[q]; if M[q]=1 then skip done";
        let p = parse_program(text, &layout(), &tables()).unwrap();
        let printed = p.to_text(&layout());
        let p2 = parse_program(&printed, &layout(), &tables()).unwrap();
        assert_eq!(printed, p2.to_text(&layout()));
    }
}
