//! Expression syntax shared by every other module.
//!
//! Expressions are the terms of a non-idempotent Kleene algebra over a
//! declared alphabet: `0`, `1`, atoms, `+`, `·` and `*`. Canonical forms
//! flatten nested sums/products and sort sum operands by a fixed total
//! order; they never merge duplicate operands (`a + a` keeps both) and
//! never simplify with unit or annihilator laws — those are proof steps,
//! not syntax.

mod parse;

pub use parse::{parse_expr, parse_expr_auto, parse_inequation, ParseError};

use std::collections::HashMap;
use std::fmt;

/// Sort of a declared symbol. Effect atoms only matter for the test
/// (NKAT) extension; plain Kleene-algebra use is all-action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Action,
    Effect,
}

/// Interned symbol handle; only meaningful together with its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
enum Negation {
    None,
    Sym(Symbol),
    /// Negation of the top effect is the constant `0`.
    Zero,
}

#[derive(Debug, Clone)]
struct SymInfo {
    name: String,
    sort: Sort,
    neg: Negation,
}

/// Symbol table: names are unique, sorts are fixed at declaration.
///
/// Declaring an effect symbol `a` also declares its negation partner `a'`.
/// The distinguished top effect (conventionally named `e`) is declared via
/// [`Alphabet::declare_effect_top`]; its syntactic negation is `0`.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    syms: Vec<SymInfo>,
    by_name: HashMap<String, Symbol>,
    top: Option<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("symbol `{0}` already declared")]
    Duplicate(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("no top effect declared")]
    NoTopEffect,
    #[error("`{0}` has no syntactic negation")]
    NotNegatable(String),
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: &str, sort: Sort, neg: Negation) -> Result<Symbol, AlphabetError> {
        if !is_identifier(name) {
            return Err(AlphabetError::BadIdentifier(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(AlphabetError::Duplicate(name.to_string()));
        }
        let sym = Symbol(self.syms.len() as u32);
        self.syms.push(SymInfo {
            name: name.to_string(),
            sort,
            neg,
        });
        self.by_name.insert(name.to_string(), sym);
        Ok(sym)
    }

    pub fn declare_action(&mut self, name: &str) -> Result<Symbol, AlphabetError> {
        self.push(name, Sort::Action, Negation::None)
    }

    /// Declares an effect atom together with its negation partner `name'`.
    pub fn declare_effect(&mut self, name: &str) -> Result<(Symbol, Symbol), AlphabetError> {
        let pos = self.push(name, Sort::Effect, Negation::None)?;
        let neg_name = format!("{name}'");
        let neg = self.push(&neg_name, Sort::Effect, Negation::Sym(pos))?;
        self.syms[pos.index()].neg = Negation::Sym(neg);
        Ok((pos, neg))
    }

    /// Declares the top effect; its negation is the constant `0`.
    pub fn declare_effect_top(&mut self, name: &str) -> Result<Symbol, AlphabetError> {
        let sym = self.push(name, Sort::Effect, Negation::Zero)?;
        self.top = Some(sym);
        Ok(sym)
    }

    pub fn top_effect(&self) -> Option<Symbol> {
        self.top
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.syms[sym.index()].name
    }

    pub fn sort(&self, sym: Symbol) -> Sort {
        self.syms[sym.index()].sort
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.syms.len() as u32).map(Symbol)
    }

    /// Syntactic negation: defined on effect atoms, the top effect and `0`.
    pub fn negate(&self, e: &Expr) -> Result<Expr, AlphabetError> {
        match e {
            Expr::Zero => match self.top {
                Some(t) => Ok(Expr::Atom(t)),
                None => Err(AlphabetError::NoTopEffect),
            },
            Expr::Atom(a) => match &self.syms[a.index()].neg {
                Negation::Sym(n) => Ok(Expr::Atom(*n)),
                Negation::Zero => Ok(Expr::Zero),
                Negation::None => Err(AlphabetError::NotNegatable(self.name(*a).to_string())),
            },
            _ => Err(AlphabetError::NotNegatable(self.print(e))),
        }
    }

    /// Renders an expression with minimal parentheses (`*` > `·` > `+`).
    pub fn print(&self, e: &Expr) -> String {
        let mut out = String::new();
        self.print_into(e, Prec::Sum, &mut out);
        out
    }

    fn print_into(&self, e: &Expr, ctx: Prec, out: &mut String) {
        match e {
            Expr::Zero => out.push('0'),
            Expr::One => out.push('1'),
            Expr::Atom(a) => out.push_str(self.name(*a)),
            Expr::Sum(ts) => {
                let parens = ctx > Prec::Sum;
                if parens {
                    out.push('(');
                }
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    self.print_into(t, Prec::Prod, out);
                }
                if parens {
                    out.push(')');
                }
            }
            Expr::Prod(ts) => {
                let parens = ctx > Prec::Prod;
                if parens {
                    out.push('(');
                }
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    self.print_into(t, Prec::Star, out);
                }
                if parens {
                    out.push(')');
                }
            }
            Expr::Star(inner) => {
                self.print_into(inner, Prec::Star, out);
                out.push('*');
            }
        }
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum Prec {
    Sum,
    Prod,
    Star,
}

/// Abstract syntax of expressions. Sum/Prod operand lists have length ≥ 2
/// and are flattened in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Zero,
    One,
    Atom(Symbol),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Star(Box<Expr>),
}

impl Expr {
    pub fn atom(sym: Symbol) -> Expr {
        Expr::Atom(sym)
    }

    /// Smart sum constructor: flattens, sorts, keeps duplicates.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t.canonical() {
                Expr::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::Zero,
            1 => flat.pop().unwrap(),
            _ => {
                flat.sort();
                Expr::Sum(flat)
            }
        }
    }

    /// Smart product constructor: flattens, preserves order.
    pub fn prod(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f.canonical() {
                Expr::Prod(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::One,
            1 => flat.pop().unwrap(),
            _ => Expr::Prod(flat),
        }
    }

    pub fn star(e: Expr) -> Expr {
        Expr::Star(Box::new(e.canonical()))
    }

    /// Node count; primary key of the canonical sum order.
    pub fn size(&self) -> usize {
        match self {
            Expr::Zero | Expr::One | Expr::Atom(_) => 1,
            Expr::Sum(ts) | Expr::Prod(ts) => 1 + ts.iter().map(Expr::size).sum::<usize>(),
            Expr::Star(e) => 1 + e.size(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            Expr::Zero | Expr::One | Expr::Atom(_) => true,
            Expr::Sum(ts) => {
                ts.len() >= 2
                    && ts.windows(2).all(|w| w[0] <= w[1])
                    && ts
                        .iter()
                        .all(|t| !matches!(t, Expr::Sum(_)) && t.is_canonical())
            }
            Expr::Prod(ts) => {
                ts.len() >= 2
                    && ts
                        .iter()
                        .all(|t| !matches!(t, Expr::Prod(_)) && t.is_canonical())
            }
            Expr::Star(e) => e.is_canonical(),
        }
    }

    /// Flattens nested sums/products and sorts sum operands. Idempotent;
    /// preserves the multiset of sum operands.
    pub fn canonical(self) -> Expr {
        if self.is_canonical() {
            return self;
        }
        match self {
            e @ (Expr::Zero | Expr::One | Expr::Atom(_)) => e,
            Expr::Sum(ts) => Expr::sum(ts),
            Expr::Prod(ts) => Expr::prod(ts),
            Expr::Star(e) => Expr::star(*e),
        }
    }

    /// Homomorphic replacement of atoms; unbound atoms stay fixed.
    pub fn substitute(&self, binding: &HashMap<Symbol, Expr>) -> Expr {
        match self {
            Expr::Zero => Expr::Zero,
            Expr::One => Expr::One,
            Expr::Atom(a) => binding.get(a).cloned().unwrap_or(Expr::Atom(*a)),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| t.substitute(binding)).collect()),
            Expr::Prod(ts) => Expr::prod(ts.iter().map(|t| t.substitute(binding)).collect()),
            Expr::Star(e) => Expr::star(e.substitute(binding)),
        }
    }

    pub fn atoms(&self) -> Vec<Symbol> {
        let mut acc = Vec::new();
        self.collect_atoms(&mut acc);
        acc.sort();
        acc.dedup();
        acc
    }

    fn collect_atoms(&self, acc: &mut Vec<Symbol>) {
        match self {
            Expr::Zero | Expr::One => {}
            Expr::Atom(a) => acc.push(*a),
            Expr::Sum(ts) | Expr::Prod(ts) => ts.iter().for_each(|t| t.collect_atoms(acc)),
            Expr::Star(e) => e.collect_atoms(acc),
        }
    }

    /// Child accessor by index (stars have one child).
    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::Sum(ts) | Expr::Prod(ts) => ts,
            Expr::Star(e) => std::slice::from_ref(e),
            _ => &[],
        }
    }

    pub fn subterm_at(&self, path: &[usize]) -> Option<&Expr> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }
}

/// Total order used to canonicalize sums: size first, then a structural
/// lexicographic comparison. Deterministic printing depends on it.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.size().cmp(&other.size()) {
            Ordering::Equal => {}
            o => return o,
        }
        fn rank(e: &Expr) -> u8 {
            match e {
                Expr::Zero => 0,
                Expr::One => 1,
                Expr::Atom(_) => 2,
                Expr::Sum(_) => 3,
                Expr::Prod(_) => 4,
                Expr::Star(_) => 5,
            }
        }
        match rank(self).cmp(&rank(other)) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (Expr::Atom(a), Expr::Atom(b)) => a.cmp(b),
            (Expr::Sum(a), Expr::Sum(b)) | (Expr::Prod(a), Expr::Prod(b)) => a.cmp(b),
            (Expr::Star(a), Expr::Star(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Relation of an (in)equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Eq => write!(f, "="),
            Relation::Le => write!(f, "<="),
        }
    }
}

/// `lhs = rhs` or `lhs ≤ rhs`, both sides over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequation {
    pub lhs: Expr,
    pub rhs: Expr,
    pub relation: Relation,
}

impl Inequation {
    pub fn eq(lhs: Expr, rhs: Expr) -> Self {
        Inequation {
            lhs: lhs.canonical(),
            rhs: rhs.canonical(),
            relation: Relation::Eq,
        }
    }

    pub fn le(lhs: Expr, rhs: Expr) -> Self {
        Inequation {
            lhs: lhs.canonical(),
            rhs: rhs.canonical(),
            relation: Relation::Le,
        }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        format!(
            "{} {} {}",
            alphabet.print(&self.lhs),
            self.relation,
            alphabet.print(&self.rhs)
        )
    }
}

/// Hypotheses and a conclusion: `(⋀ᵢ eᵢ ≤ fᵢ) → e ≤ f`.
#[derive(Debug, Clone)]
pub struct HornClause {
    pub hypotheses: Vec<Inequation>,
    pub conclusion: Inequation,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> (Alphabet, Symbol, Symbol, Symbol) {
        let mut al = Alphabet::new();
        let a = al.declare_action("a").unwrap();
        let b = al.declare_action("b").unwrap();
        let c = al.declare_action("c").unwrap();
        (al, a, b, c)
    }

    #[test]
    fn sum_keeps_duplicates() {
        let (_, a, _, _) = abc();
        let e = Expr::sum(vec![Expr::Atom(a), Expr::Atom(a)]);
        assert_eq!(e, Expr::Sum(vec![Expr::Atom(a), Expr::Atom(a)]));
    }

    #[test]
    fn canonical_flattens_and_sorts() {
        let (al, a, b, c) = abc();
        let nested = Expr::Sum(vec![
            Expr::Atom(c),
            Expr::Sum(vec![Expr::Atom(b), Expr::Atom(a)]),
        ]);
        let e = nested.canonical();
        assert_eq!(al.print(&e), "a + b + c");
        assert_eq!(e.clone().canonical(), e);
    }

    #[test]
    fn canonical_never_collapses_operand_multiset() {
        let (_, a, b, _) = abc();
        let e = Expr::sum(vec![
            Expr::Atom(b),
            Expr::Atom(a),
            Expr::Atom(b),
            Expr::Atom(a),
        ]);
        match e {
            Expr::Sum(ts) => assert_eq!(ts.len(), 4),
            _ => panic!("expected sum"),
        }
    }

    #[test]
    fn print_minimal_parens() {
        let (al, a, b, _) = abc();
        let e = Expr::prod(vec![
            Expr::star(Expr::prod(vec![Expr::Atom(a), Expr::Atom(b)])),
            Expr::Atom(a),
        ]);
        assert_eq!(al.print(&e), "(a b)* a");
        let f = Expr::star(Expr::sum(vec![Expr::Atom(a), Expr::Atom(b)]));
        assert_eq!(al.print(&f), "(a + b)*");
        let g = Expr::star(Expr::star(Expr::Atom(a)));
        assert_eq!(al.print(&g), "a**");
    }

    #[test]
    fn substitute_commutes_with_canonical() {
        let (_, a, b, c) = abc();
        let e = Expr::sum(vec![
            Expr::Atom(c),
            Expr::prod(vec![Expr::Atom(a), Expr::Atom(b)]),
        ]);
        let mut binding = HashMap::new();
        binding.insert(
            a,
            Expr::prod(vec![Expr::Atom(b), Expr::Atom(b)]).canonical(),
        );
        let sub = e.substitute(&binding);
        assert!(sub.is_canonical());
        assert_eq!(sub, sub.clone().canonical());
    }

    #[test]
    fn effect_negation_pairing() {
        let mut al = Alphabet::new();
        let top = al.declare_effect_top("e").unwrap();
        let (a, a_neg) = al.declare_effect("a").unwrap();
        assert_eq!(al.name(a_neg), "a'");
        assert_eq!(al.negate(&Expr::Atom(a)).unwrap(), Expr::Atom(a_neg));
        assert_eq!(al.negate(&Expr::Atom(a_neg)).unwrap(), Expr::Atom(a));
        assert_eq!(al.negate(&Expr::Atom(top)).unwrap(), Expr::Zero);
        assert_eq!(al.negate(&Expr::Zero).unwrap(), Expr::Atom(top));
        assert!(al.negate(&Expr::One).is_err());
    }
}
