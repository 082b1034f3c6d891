//! ℕ∞ formal power series semantics of expressions: per-word coefficients,
//! a bounded equivalence oracle, and exact equivalence on the proper
//! fragment via weighted automata.
//!
//! The coefficient of a word under `+`/`·`/`*` follows the power-series
//! operations; a star whose body has a nonzero ε-coefficient yields ∞ on
//! every word generated by the ε-stripped body's star and 0 elsewhere.

pub mod automaton;
pub mod extnat;

pub use automaton::{exact_equiv, glushkov_automaton, ExactVerdict, WeightedAutomaton};
pub use extnat::ExtNat;

use crate::syntax::{Alphabet, Expr, Symbol};
use extnat::{Fin, Inf};
use std::collections::HashMap;

/// Verdict of the bounded comparison oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    Equal,
    /// Shortest (then lexicographically least) witness word with the two
    /// coefficients.
    Counterexample {
        word: Vec<Symbol>,
        lhs: ExtNat,
        rhs: ExtNat,
    },
}

impl BoundedVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, BoundedVerdict::Equal)
    }
}

/// Subexpression violating the properness precondition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("starred subexpression has nonzero empty-word coefficient")]
pub struct ImproperStar(pub Expr);

/// Word-indexed coefficient table for all words of length ≤ `bound`.
/// Absent words have coefficient 0.
#[derive(Debug, Clone)]
pub struct FormalSeries {
    pub bound: usize,
    pub symbols: Vec<Symbol>,
    coeffs: HashMap<Vec<Symbol>, ExtNat>,
}

impl FormalSeries {
    pub fn coeff(&self, word: &[Symbol]) -> ExtNat {
        self.coeffs.get(word).copied().unwrap_or(Fin(0))
    }

    /// One `word TAB coefficient` line per nonzero entry, in shortlex
    /// order; `eps` stands for the empty word and `INF` for ∞.
    pub fn dump_text(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for w in enumerate_words(&self.symbols, self.bound) {
            let c = self.coeff(&w);
            if !c.is_zero() {
                out.push_str(&format!("{}\t{}\n", display_word(&w, alphabet), c));
            }
        }
        out
    }
}

/// Renders a word; `eps` for ε. Symbol names are concatenated directly
/// when all are single characters, otherwise space-separated.
pub fn display_word(word: &[Symbol], alphabet: &Alphabet) -> String {
    if word.is_empty() {
        return "eps".to_string();
    }
    let names: Vec<&str> = word.iter().map(|s| alphabet.name(*s)).collect();
    if names.iter().all(|n| n.chars().count() == 1) {
        names.concat()
    } else {
        names.join(" ")
    }
}

/// All words of length ≤ `bound` over `symbols`, in shortlex order
/// (symbols ordered as given).
pub fn enumerate_words(symbols: &[Symbol], bound: usize) -> Vec<Vec<Symbol>> {
    let mut words: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut level: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..bound {
        let mut next = Vec::with_capacity(level.len() * symbols.len());
        for w in &level {
            for &s in symbols {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        level = next;
    }
    words
}

// Hash-consed binary IR; children precede parents, so index order is a
// valid evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum IrNode {
    Zero,
    One,
    Atom(Symbol),
    Plus(u32, u32),
    Times(u32, u32),
    Star(u32),
}

struct Ir {
    nodes: Vec<IrNode>,
    dedup: HashMap<IrNode, u32>,
}

impl Ir {
    fn new() -> Self {
        Ir {
            nodes: Vec::new(),
            dedup: HashMap::new(),
        }
    }

    fn intern(&mut self, node: IrNode) -> u32 {
        if let Some(&id) = self.dedup.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.dedup.insert(node, id);
        id
    }

    fn build(&mut self, e: &Expr) -> u32 {
        match e {
            Expr::Zero => self.intern(IrNode::Zero),
            Expr::One => self.intern(IrNode::One),
            Expr::Atom(a) => self.intern(IrNode::Atom(*a)),
            Expr::Sum(ts) => {
                let mut acc = self.build(&ts[0]);
                for t in &ts[1..] {
                    let rhs = self.build(t);
                    acc = self.intern(IrNode::Plus(acc, rhs));
                }
                acc
            }
            Expr::Prod(ts) => {
                let mut acc = self.build(&ts[0]);
                for t in &ts[1..] {
                    let rhs = self.build(t);
                    acc = self.intern(IrNode::Times(acc, rhs));
                }
                acc
            }
            Expr::Star(inner) => {
                let id = self.build(inner);
                self.intern(IrNode::Star(id))
            }
        }
    }

    /// ε-coefficient of every node.
    fn eps(&self) -> Vec<ExtNat> {
        let mut eps: Vec<ExtNat> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                IrNode::Zero | IrNode::Atom(_) => Fin(0),
                IrNode::One => Fin(1),
                IrNode::Plus(a, b) => eps[a as usize] + eps[b as usize],
                IrNode::Times(a, b) => eps[a as usize] * eps[b as usize],
                IrNode::Star(a) => {
                    if eps[a as usize].is_zero() {
                        Fin(1)
                    } else {
                        Inf
                    }
                }
            };
            eps.push(v);
        }
        eps
    }
}

/// Exact coefficient ⟦e⟧[w], including infinite values.
pub fn coeff(e: &Expr, word: &[Symbol]) -> ExtNat {
    let mut ir = Ir::new();
    let root = ir.build(e);
    let eps = ir.eps();
    let mut memo: HashMap<(u32, usize, usize), ExtNat> = HashMap::new();
    coeff_range(&ir, &eps, root, word, 0, word.len(), &mut memo)
}

/// ε-coefficient ⟦e⟧[ε].
pub fn eps_coeff(e: &Expr) -> ExtNat {
    let mut ir = Ir::new();
    let root = ir.build(e);
    ir.eps()[root as usize]
}

fn coeff_range(
    ir: &Ir,
    eps: &[ExtNat],
    node: u32,
    w: &[Symbol],
    i: usize,
    j: usize,
    memo: &mut HashMap<(u32, usize, usize), ExtNat>,
) -> ExtNat {
    if let Some(&v) = memo.get(&(node, i, j)) {
        return v;
    }
    let v = match ir.nodes[node as usize] {
        IrNode::Zero => Fin(0),
        IrNode::One => {
            if i == j {
                Fin(1)
            } else {
                Fin(0)
            }
        }
        IrNode::Atom(a) => {
            if j == i + 1 && w[i] == a {
                Fin(1)
            } else {
                Fin(0)
            }
        }
        IrNode::Plus(l, r) => {
            coeff_range(ir, eps, l, w, i, j, memo) + coeff_range(ir, eps, r, w, i, j, memo)
        }
        IrNode::Times(l, r) => {
            let mut acc = Fin(0);
            for m in i..=j {
                let a = coeff_range(ir, eps, l, w, i, m, memo);
                if a.is_zero() {
                    continue;
                }
                acc = acc + a * coeff_range(ir, eps, r, w, m, j, memo);
            }
            acc
        }
        IrNode::Star(f) => {
            // Coefficient of the ε-stripped star: decompositions of the
            // range into nonempty body factors.
            let stripped = star_stripped(ir, eps, f, w, i, j, memo);
            if eps[f as usize].is_zero() {
                stripped
            } else if stripped.is_zero() {
                Fin(0)
            } else {
                Inf
            }
        }
    };
    memo.insert((node, i, j), v);
    v
}

fn star_stripped(
    ir: &Ir,
    eps: &[ExtNat],
    body: u32,
    w: &[Symbol],
    i: usize,
    j: usize,
    memo: &mut HashMap<(u32, usize, usize), ExtNat>,
) -> ExtNat {
    // Memoized under a synthetic key derived from the star node id space:
    // reuse the body id with reversed range as the key would collide, so
    // index via a dedicated key (node id | high bit).
    let key = (body | 0x8000_0000, i, j);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = if i == j {
        Fin(1)
    } else {
        let mut acc = Fin(0);
        for m in (i + 1)..=j {
            let a = coeff_range(ir, eps, body, w, i, m, memo);
            if a.is_zero() {
                continue;
            }
            acc = acc + a * star_stripped(ir, eps, body, w, m, j, memo);
        }
        acc
    };
    memo.insert(key, v);
    v
}

/// Whole-table evaluation of ⟦e⟧ on all words of length ≤ `bound` over
/// `symbols`.
pub fn series(e: &Expr, symbols: &[Symbol], bound: usize) -> FormalSeries {
    let mut ir = Ir::new();
    let root = ir.build(e);
    let table = series_tables(&ir, symbols, bound);
    let words = enumerate_words(symbols, bound);
    let coeffs = words
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !table[root as usize][*i].is_zero())
        .map(|(i, w)| (w, table[root as usize][i]))
        .collect();
    FormalSeries {
        bound,
        symbols: symbols.to_vec(),
        coeffs,
    }
}

fn series_tables(ir: &Ir, symbols: &[Symbol], bound: usize) -> Vec<Vec<ExtNat>> {
    let words = enumerate_words(symbols, bound);
    let ids: HashMap<&[Symbol], usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i))
        .collect();
    // splits[w] = all (u, v) with u·v = w, as word ids, u leftmost first.
    let splits: Vec<Vec<(usize, usize)>> = words
        .iter()
        .map(|w| {
            (0..=w.len())
                .map(|m| (ids[&w[..m]], ids[&w[m..]]))
                .collect()
        })
        .collect();
    let eps = ir.eps();
    let mut tables: Vec<Vec<ExtNat>> = Vec::with_capacity(ir.nodes.len());
    for node in ir.nodes.iter() {
        let tab = match *node {
            IrNode::Zero => vec![Fin(0); words.len()],
            IrNode::One => {
                let mut t = vec![Fin(0); words.len()];
                t[0] = Fin(1);
                t
            }
            IrNode::Atom(a) => words
                .iter()
                .map(|w| {
                    if w.len() == 1 && w[0] == a {
                        Fin(1)
                    } else {
                        Fin(0)
                    }
                })
                .collect(),
            IrNode::Plus(l, r) => {
                let (l, r) = (&tables[l as usize], &tables[r as usize]);
                (0..words.len()).map(|i| l[i] + r[i]).collect()
            }
            IrNode::Times(l, r) => {
                let (l, r) = (&tables[l as usize], &tables[r as usize]);
                splits
                    .iter()
                    .map(|sp| {
                        sp.iter()
                            .fold(Fin(0), |acc, &(u, v)| acc + l[u] * r[v])
                    })
                    .collect()
            }
            IrNode::Star(f) => {
                let body = &tables[f as usize];
                // Shortlex order makes every strict suffix available.
                let mut stripped = vec![Fin(0); words.len()];
                for (w, sp) in splits.iter().enumerate() {
                    stripped[w] = if w == 0 {
                        Fin(1)
                    } else {
                        sp.iter()
                            .skip(1) // nonempty first factor
                            .fold(Fin(0), |acc, &(u, v)| acc + body[u] * stripped[v])
                    };
                }
                if eps[f as usize].is_zero() {
                    stripped
                } else {
                    stripped
                        .into_iter()
                        .map(|c| if c.is_zero() { Fin(0) } else { Inf })
                        .collect()
                }
            }
        };
        tables.push(tab);
    }
    tables
}

fn joint_symbols(e: &Expr, f: &Expr) -> Vec<Symbol> {
    let mut syms = e.atoms();
    syms.extend(f.atoms());
    syms.sort();
    syms.dedup();
    syms
}

/// Compares coefficients on every word of length ≤ `bound` over the joint
/// atom set; on failure returns the shortest, then lexicographically
/// least, witness.
pub fn bounded_equiv(e: &Expr, f: &Expr, bound: usize) -> BoundedVerdict {
    bounded_compare(e, f, bound, false)
}

/// Bounded check of ⟦e⟧ ≤ ⟦f⟧ (pointwise on words of length ≤ `bound`).
pub fn bounded_leq(e: &Expr, f: &Expr, bound: usize) -> BoundedVerdict {
    bounded_compare(e, f, bound, true)
}

fn bounded_compare(e: &Expr, f: &Expr, bound: usize, leq_only: bool) -> BoundedVerdict {
    let symbols = joint_symbols(e, f);
    let mut ir = Ir::new();
    let re = ir.build(e);
    let rf = ir.build(f);
    let tables = series_tables(&ir, &symbols, bound);
    let words = enumerate_words(&symbols, bound);
    for (i, w) in words.iter().enumerate() {
        let (le, rg) = (tables[re as usize][i], tables[rf as usize][i]);
        let bad = if leq_only { le > rg } else { le != rg };
        if bad {
            return BoundedVerdict::Counterexample {
                word: w.clone(),
                lhs: le,
                rhs: rg,
            };
        }
    }
    BoundedVerdict::Equal
}

/// Checks that every starred subexpression has ε-coefficient 0.
pub fn check_proper(e: &Expr) -> Result<(), ImproperStar> {
    match e {
        Expr::Zero | Expr::One | Expr::Atom(_) => Ok(()),
        Expr::Sum(ts) | Expr::Prod(ts) => ts.iter().try_for_each(check_proper),
        Expr::Star(inner) => {
            check_proper(inner)?;
            if eps_coeff(inner).is_zero() {
                Ok(())
            } else {
                Err(ImproperStar((**inner).clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr_auto;

    fn setup(texts: &[&str]) -> (Alphabet, Vec<Expr>) {
        let mut al = Alphabet::new();
        let exprs = texts
            .iter()
            .map(|t| parse_expr_auto(t, &mut al).unwrap())
            .collect();
        (al, exprs)
    }

    fn word(al: &Alphabet, names: &str) -> Vec<Symbol> {
        names
            .split_whitespace()
            .map(|n| al.lookup(n).unwrap())
            .collect()
    }

    #[test]
    fn atom_coefficients() {
        let (al, es) = setup(&["a"]);
        assert_eq!(coeff(&es[0], &word(&al, "a")), Fin(1));
        assert_eq!(coeff(&es[0], &[]), Fin(0));
    }

    #[test]
    fn addition_counts_multiplicity() {
        let (al, es) = setup(&["a + a"]);
        assert_eq!(coeff(&es[0], &word(&al, "a")), Fin(2));
    }

    #[test]
    fn improper_star_is_infinite_at_eps() {
        let (_, es) = setup(&["1*"]);
        assert_eq!(coeff(&es[0], &[]), Inf);
    }

    #[test]
    fn star_counts_decompositions() {
        let (al, es) = setup(&["(a·b)*"]);
        assert_eq!(coeff(&es[0], &word(&al, "a b a b")), Fin(1));
        assert_eq!(coeff(&es[0], &word(&al, "a b a")), Fin(0));
        assert_eq!(coeff(&es[0], &[]), Fin(1));
    }

    #[test]
    fn improper_star_masks_generated_words() {
        // (1 + a)*: every a^n is generated by the stripped body's star.
        let (al, es) = setup(&["(1 + a)*"]);
        assert_eq!(coeff(&es[0], &[]), Inf);
        assert_eq!(coeff(&es[0], &word(&al, "a a")), Inf);
        let (al2, es2) = setup(&["(1 + a)* b"]);
        // b alone is never generated: a-power prefix required before b.
        assert_eq!(coeff(&es2[0], &word(&al2, "a b")), Inf);
        assert_eq!(coeff(&es2[0], &word(&al2, "b a")), Fin(0));
    }

    #[test]
    fn sliding_holds_bounded() {
        let (_, es) = setup(&["(p q)* p", "p (q p)*"]);
        assert!(bounded_equiv(&es[0], &es[1], 6).is_equal());
    }

    #[test]
    fn idempotence_fails_with_shortest_witness() {
        let (al, es) = setup(&["a + a", "a"]);
        match bounded_equiv(&es[0], &es[1], 1) {
            BoundedVerdict::Counterexample { word: w, lhs, rhs } => {
                assert_eq!(w, word(&al, "a"));
                assert_eq!(lhs, Fin(2));
                assert_eq!(rhs, Fin(1));
            }
            v => panic!("expected counterexample, got {v:?}"),
        }
    }

    #[test]
    fn reflexivity_bounded() {
        let (_, es) = setup(&["(a (b + a))* + a b"]);
        assert!(bounded_equiv(&es[0], &es[0], 8).is_equal());
    }

    #[test]
    fn star_fixed_point_at_series_level() {
        let (_, es) = setup(&["(a b + a)*", "1 + (a b + a) (a b + a)*"]);
        assert!(bounded_equiv(&es[0], &es[1], 5).is_equal());
    }

    #[test]
    fn proper_check() {
        let (_, es) = setup(&["(a b)* a", "1*", "(a*)*"]);
        assert!(check_proper(&es[0]).is_ok());
        assert!(check_proper(&es[1]).is_err());
        assert!(check_proper(&es[2]).is_err());
    }

    #[test]
    fn series_dump_format() {
        let (al, es) = setup(&["a + a b"]);
        let s = series(&es[0], &joint_symbols(&es[0], &es[0]), 2);
        let dump = s.dump_text(&al);
        assert_eq!(dump, "a\t1\nab\t1\n");
    }

    #[test]
    fn table_matches_single_word_eval() {
        let (al, es) = setup(&["(a + 1 b)* (b + a a)"]);
        let syms = joint_symbols(&es[0], &es[0]);
        let s = series(&es[0], &syms, 4);
        for w in enumerate_words(&syms, 4) {
            assert_eq!(s.coeff(&w), coeff(&es[0], &w), "word {:?}", display_word(&w, &al));
        }
    }
}
