//! Builtin rule database: semiring laws not folded into matching, star
//! laws, the derivable Kleene-algebra lemmas, and the test-extension
//! (effect/partition) rules.
//!
//! Associativity of `·` and associativity+commutativity of `+` are baked
//! into canonical forms and matching; distributivity, units and
//! annihilators stay explicit rules.

use crate::syntax::{Alphabet, Expr, Inequation, Relation, Symbol};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Axiom,
    Lemma,
    Hypothesis,
    Conditional,
}

/// Rules whose instances are computed in code because they mention the
/// syntactic negation of a bound variable or a variadic partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialRule {
    /// a ≤ b ⊢ ¬b ≤ ¬a, for negatable a and b.
    NegationReverse,
    /// c = Σᵢ mᵢ·aᵢ (partition (mᵢ)) ⊢ ¬c = Σᵢ mᵢ·¬aᵢ.
    PartitionTransform,
    /// a + ¬a = e.
    ExcludedMiddle,
    /// ¬¬a = a (an identity: negation partners are involutive).
    DoubleNegation,
    /// a ≤ e for negatable a.
    EffectTop,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub kind: RuleKind,
    /// Schema statement over the database's metavariable alphabet, or a
    /// ground statement for hypotheses and proven lemmas.
    pub statement: Inequation,
    pub premises: Vec<Inequation>,
    pub metavars: Vec<Symbol>,
    pub special: Option<SpecialRule>,
}

/// Rule database: builtins plus, per script run, hypotheses and already
/// proven lemmas. Immutable after construction.
#[derive(Debug, Clone)]
pub struct RuleDB {
    pub schema: Alphabet,
    rules: HashMap<String, Rule>,
}

impl RuleDB {
    pub fn lookup(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.rules.keys().map(String::as_str).collect();
        names.sort();
        names
    }
}

struct Builder {
    schema: Alphabet,
    rules: HashMap<String, Rule>,
}

impl Builder {
    fn parse(&self, text: &str) -> Inequation {
        crate::syntax::parse_inequation(text, &self.schema).expect("builtin rule parses")
    }

    fn vars(&self, names: &[&str]) -> Vec<Symbol> {
        names
            .iter()
            .map(|n| self.schema.lookup(n).expect("schema symbol"))
            .collect()
    }

    fn add(&mut self, name: &str, kind: RuleKind, statement: &str, vars: &[&str]) {
        let rule = Rule {
            name: name.to_string(),
            kind,
            statement: self.parse(statement),
            premises: Vec::new(),
            metavars: self.vars(vars),
            special: None,
        };
        self.rules.insert(name.to_string(), rule);
    }

    fn add_cond(&mut self, name: &str, statement: &str, premises: &[&str], vars: &[&str]) {
        let rule = Rule {
            name: name.to_string(),
            kind: RuleKind::Conditional,
            statement: self.parse(statement),
            premises: premises.iter().map(|p| self.parse(p)).collect(),
            metavars: self.vars(vars),
            special: None,
        };
        self.rules.insert(name.to_string(), rule);
    }

    fn add_special(&mut self, name: &str, special: SpecialRule) {
        // Statement is a placeholder; instances are built in code.
        let rule = Rule {
            name: name.to_string(),
            kind: if matches!(
                special,
                SpecialRule::NegationReverse | SpecialRule::PartitionTransform
            ) {
                RuleKind::Conditional
            } else {
                RuleKind::Lemma
            },
            statement: Inequation {
                lhs: Expr::Zero,
                rhs: Expr::Zero,
                relation: Relation::Eq,
            },
            premises: Vec::new(),
            metavars: Vec::new(),
            special: Some(special),
        };
        self.rules.insert(name.to_string(), rule);
    }
}

/// The builtin database shared by every script run.
pub fn builtin_rules() -> RuleDB {
    let mut schema = Alphabet::new();
    for v in ["p", "q", "r", "s"] {
        schema.declare_action(v).unwrap();
    }
    // Metavariables for the effect fragment; scripts bind them to
    // negatable expressions.
    schema.declare_effect_top("e").unwrap();
    for v in ["a", "b", "c"] {
        schema.declare_effect(v).unwrap();
    }
    let mut b = Builder {
        schema,
        rules: HashMap::new(),
    };

    use RuleKind::{Axiom, Lemma};
    // Semiring laws that matching does not absorb.
    b.add("plus-zero", Axiom, "p + 0 = p", &["p"]);
    b.add("unit-left", Axiom, "1 p = p", &["p"]);
    b.add("unit-right", Axiom, "p 1 = p", &["p"]);
    b.add("annihilate-left", Axiom, "0 p = 0", &["p"]);
    b.add("annihilate-right", Axiom, "p 0 = 0", &["p"]);
    b.add("distrib-left", Axiom, "p (q + r) = p q + p r", &["p", "q", "r"]);
    b.add("distrib-right", Axiom, "(p + q) r = p r + q r", &["p", "q", "r"]);
    // Star laws.
    b.add("star-unfold", Axiom, "1 + p p* <= p*", &["p"]);
    b.add_cond("induction-left", "p* q <= r", &["q + p r <= r"], &["p", "q", "r"]);
    b.add_cond("induction-right", "q p* <= r", &["q + r p <= r"], &["p", "q", "r"]);
    // Derivable formulae used as one-step rules.
    b.add("fixed-point", Lemma, "1 + p p* = p*", &["p"]);
    b.add("fixed-point-right", Lemma, "1 + p* p = p*", &["p"]);
    b.add_cond("monotone-star", "p* <= q*", &["p <= q"], &["p", "q"]);
    b.add("product-star", Lemma, "1 + p (q p)* q = (p q)*", &["p", "q"]);
    b.add("sliding", Lemma, "(p q)* p = p (q p)*", &["p", "q"]);
    b.add("denesting", Lemma, "(p + q)* = (p* q)* p*", &["p", "q"]);
    b.add("denesting-right", Lemma, "(p + q)* = p* (q p*)*", &["p", "q"]);
    b.add("positivity", Lemma, "0 <= p", &["p"]);
    b.add("unrolling", Lemma, "(p p)* (1 + p) = p*", &["p"]);
    b.add_cond("swap-star", "p* q = q p*", &["p q = q p"], &["p", "q"]);
    b.add_cond("star-rewrite", "p q* = r* p", &["p q = r p"], &["p", "q", "r"]);
    // Effect and partition rules.
    b.add_special("negation-reverse", SpecialRule::NegationReverse);
    b.add_special("partition-transform", SpecialRule::PartitionTransform);
    b.add_special("excluded-middle", SpecialRule::ExcludedMiddle);
    b.add_special("double-negation", SpecialRule::DoubleNegation);
    b.add_special("effect-top", SpecialRule::EffectTop);

    RuleDB {
        schema: b.schema,
        rules: b.rules,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_contains_expected_rules() {
        let db = builtin_rules();
        for name in [
            "plus-zero",
            "unit-left",
            "distrib-right",
            "star-unfold",
            "induction-left",
            "induction-right",
            "fixed-point",
            "monotone-star",
            "product-star",
            "sliding",
            "denesting",
            "denesting-right",
            "positivity",
            "unrolling",
            "swap-star",
            "star-rewrite",
            "negation-reverse",
            "partition-transform",
            "excluded-middle",
            "double-negation",
            "effect-top",
        ] {
            assert!(db.contains(name), "missing rule {name}");
        }
    }

    #[test]
    fn denesting_statement_shape() {
        let db = builtin_rules();
        let r = db.lookup("denesting").unwrap();
        assert_eq!(db.schema.print(&r.statement.lhs), "(p + q)*");
        assert_eq!(db.schema.print(&r.statement.rhs), "(p* q)* p*");
        assert_eq!(r.statement.relation, Relation::Eq);
    }

    #[test]
    fn star_rewrite_is_conditional() {
        let db = builtin_rules();
        let r = db.lookup("star-rewrite").unwrap();
        assert_eq!(r.kind, RuleKind::Conditional);
        assert_eq!(r.premises.len(), 1);
        assert_eq!(db.schema.print(&r.premises[0].lhs), "p q");
        assert_eq!(db.schema.print(&r.premises[0].rhs), "r p");
    }

    #[test]
    fn partition_transform_present() {
        let db = builtin_rules();
        let r = db.lookup("partition-transform").unwrap();
        assert_eq!(r.special, Some(SpecialRule::PartitionTransform));
    }
}
