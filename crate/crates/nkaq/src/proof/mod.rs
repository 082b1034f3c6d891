//! Checker for equational/inequational derivation scripts.
//!
//! A script declares an alphabet, optional partitions, named hypotheses,
//! and a sequence of lemmas. Each lemma is either a rewrite chain (every
//! line states the next term and the rule instance producing it) or an
//! antisymmetry combination of two earlier ≤-lemmas. Rules rewrite at a
//! stated or inferred occurrence modulo associativity of `·` and
//! associativity+commutativity of `+`; inequational steps may fire in any
//! `+`/`·`/`*` context since the order is monotone.

mod matching;
mod parse;
mod rules;

pub use matching::{enumerate_sites, match_pattern, replace_at, site_expr, Site};
pub use parse::{parse_script, ProofParseError};
pub use rules::{builtin_rules, Rule, RuleDB, RuleKind, SpecialRule};

use crate::syntax::{Alphabet, Expr, Inequation, Relation, Symbol};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LR,
    RL,
}

/// One justification bracket: relation, rule, direction, optional
/// position/binding, and cited premises for conditional rules.
#[derive(Debug, Clone)]
pub struct Step {
    pub relation: Relation,
    pub rule: String,
    pub direction: Direction,
    pub position: Option<Vec<usize>>,
    pub binding: Vec<(String, Expr)>,
    pub premises: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ChainLine {
    pub term: Expr,
    pub step: Option<Step>,
    pub line_no: usize,
}

#[derive(Debug, Clone)]
pub enum Justification {
    Chain(Vec<ChainLine>),
    Antisym(String, String),
}

#[derive(Debug, Clone)]
pub struct Lemma {
    pub name: String,
    pub goal: Inequation,
    pub justification: Justification,
    pub line_no: usize,
}

#[derive(Debug, Clone)]
pub struct PartitionDecl {
    pub name: String,
    pub members: Vec<Symbol>,
}

/// A parsed proof script.
#[derive(Debug, Clone)]
pub struct ProofScript {
    pub name: String,
    pub alphabet: Alphabet,
    pub partitions: Vec<PartitionDecl>,
    pub hypotheses: Vec<(String, Inequation)>,
    pub lemmas: Vec<Lemma>,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub lemma: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ScriptReport {
    pub script: String,
    pub accepted: bool,
    pub lemmas_checked: usize,
    pub failures: Vec<Failure>,
}

impl ScriptReport {
    pub fn first_failure(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

struct Env<'a> {
    db: &'a RuleDB,
    script: &'a ProofScript,
    proven: HashMap<String, Inequation>,
}

impl<'a> Env<'a> {
    fn partition(&self, members_needed: &[Symbol]) -> Option<&PartitionDecl> {
        self.script.partitions.iter().find(|p| {
            let mut a = p.members.clone();
            let mut b = members_needed.to_vec();
            a.sort();
            b.sort();
            a == b
        })
    }
}

fn entails(proven: &Inequation, needed: &Inequation) -> bool {
    let same = proven.lhs == needed.lhs && proven.rhs == needed.rhs;
    let flipped = proven.lhs == needed.rhs && proven.rhs == needed.lhs;
    match needed.relation {
        Relation::Le => {
            (proven.relation == Relation::Le && same)
                || (proven.relation == Relation::Eq && (same || flipped))
        }
        Relation::Eq => proven.relation == Relation::Eq && (same || flipped),
    }
}

/// A concrete (ground) rule instance ready to rewrite.
struct Instance {
    from: Expr,
    to: Expr,
    relation: Relation,
    /// Premises that must be discharged by the step's citations.
    premises: Vec<Inequation>,
}

fn sum_terms(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    }
}

fn prod_factors(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Prod(ts) => ts.clone(),
        other => vec![other.clone()],
    }
}

/// Builds ground instances of `rule` for this step. For schema rules
/// without an explicit binding the caller infers instances by matching;
/// this function handles the explicitly bound and special cases.
fn explicit_instances(
    rule: &Rule,
    step: &Step,
    env: &Env,
) -> Result<Option<Vec<Instance>>, String> {
    let alphabet = &env.script.alphabet;
    if let Some(special) = rule.special {
        let bound = |name: &str| -> Result<Expr, String> {
            step.binding
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .ok_or_else(|| format!("rule `{}` needs binding `{name}=…`", rule.name))
        };
        let neg = |e: &Expr| -> Result<Expr, String> {
            alphabet
                .negate(e)
                .map_err(|err| format!("`{}`: {err}", rule.name))
        };
        let inst = match special {
            SpecialRule::NegationReverse => {
                let a = bound("a")?;
                let b = bound("b")?;
                Instance {
                    from: neg(&b)?,
                    to: neg(&a)?,
                    relation: Relation::Le,
                    premises: vec![Inequation::le(a, b)],
                }
            }
            SpecialRule::ExcludedMiddle => {
                let a = bound("a")?;
                let na = neg(&a)?;
                let top = alphabet
                    .top_effect()
                    .map(Expr::Atom)
                    .ok_or("no top effect declared".to_string())?;
                Instance {
                    from: Expr::sum(vec![a, na]),
                    to: top,
                    relation: Relation::Eq,
                    premises: vec![],
                }
            }
            SpecialRule::DoubleNegation => {
                let a = bound("a")?;
                Instance {
                    from: neg(&neg(&a)?)?,
                    to: a,
                    relation: Relation::Eq,
                    premises: vec![],
                }
            }
            SpecialRule::EffectTop => {
                let a = bound("a")?;
                neg(&a)?; // must be negatable, i.e. an effect
                let top = alphabet
                    .top_effect()
                    .map(Expr::Atom)
                    .ok_or("no top effect declared".to_string())?;
                Instance {
                    from: a,
                    to: top,
                    relation: Relation::Le,
                    premises: vec![],
                }
            }
            SpecialRule::PartitionTransform => {
                return partition_transform_instance(step, env).map(|i| Some(vec![i]));
            }
        };
        return Ok(Some(vec![inst]));
    }

    if step.binding.is_empty() {
        return Ok(None); // caller infers by matching
    }
    let mut binding: HashMap<Symbol, Expr> = HashMap::new();
    for (name, value) in &step.binding {
        let sym = env
            .db
            .schema
            .lookup(name)
            .filter(|s| rule.metavars.contains(s))
            .ok_or_else(|| format!("`{}` is not a metavariable of `{}`", name, rule.name))?;
        binding.insert(sym, value.clone());
    }
    for v in &rule.metavars {
        if !binding.contains_key(v) {
            return Err(format!(
                "binding for `{}` does not cover metavariable `{}`",
                rule.name,
                env.db.schema.name(*v)
            ));
        }
    }
    let inst = Instance {
        from: rule.statement.lhs.substitute(&binding),
        to: rule.statement.rhs.substitute(&binding),
        relation: rule.statement.relation,
        premises: rule
            .premises
            .iter()
            .map(|p| Inequation {
                lhs: p.lhs.substitute(&binding),
                rhs: p.rhs.substitute(&binding),
                relation: p.relation,
            })
            .collect(),
    };
    Ok(Some(vec![inst]))
}

/// Derives the partition-transform instance ¬c = Σ mᵢ·¬aᵢ from the cited
/// definition c = Σ mᵢ·aᵢ.
fn partition_transform_instance(step: &Step, env: &Env) -> Result<Instance, String> {
    let alphabet = &env.script.alphabet;
    let cited = step
        .premises
        .first()
        .ok_or("partition-transform cites its defining premise with `using`")?;
    let def = env
        .proven
        .get(cited)
        .ok_or_else(|| format!("unknown premise `{cited}`"))?;
    if def.relation != Relation::Eq {
        return Err("partition-transform needs an equational definition".to_string());
    }
    // Orient: one side is the negatable name, the other the partition sum.
    let (name_side, sum_side) = if matches!(def.lhs, Expr::Atom(_)) {
        (&def.lhs, &def.rhs)
    } else {
        (&def.rhs, &def.lhs)
    };
    let neg_name = alphabet
        .negate(name_side)
        .map_err(|e| format!("partition-transform: {e}"))?;
    let mut members = Vec::new();
    let mut neg_terms = Vec::new();
    for term in sum_terms(sum_side) {
        let factors = prod_factors(&term);
        if factors.len() != 2 {
            return Err(format!(
                "partition-transform: `{}` is not of the form m·a",
                alphabet.print(&term)
            ));
        }
        let m = match &factors[0] {
            Expr::Atom(s) => *s,
            other => {
                return Err(format!(
                    "partition-transform: `{}` is not a partition symbol",
                    alphabet.print(other)
                ))
            }
        };
        let na = alphabet
            .negate(&factors[1])
            .map_err(|e| format!("partition-transform: {e}"))?;
        members.push(m);
        neg_terms.push(Expr::prod(vec![Expr::Atom(m), na]));
    }
    if env.partition(&members).is_none() {
        return Err("partition-transform: symbols do not form a declared partition".to_string());
    }
    Ok(Instance {
        from: neg_name,
        to: Expr::sum(neg_terms),
        relation: Relation::Eq,
        premises: vec![def.clone()],
    })
}

/// Checks one rewrite step from `prev` to `next`.
fn check_step(prev: &Expr, next: &Expr, step: &Step, env: &Env) -> Result<(), String> {
    // Builtins shadow nothing: scripts may not reuse their names.
    let instances: Vec<Instance> = if let Some(ground) = env.proven.get(&step.rule) {
        vec![Instance {
            from: ground.lhs.clone(),
            to: ground.rhs.clone(),
            relation: ground.relation,
            premises: vec![],
        }]
    } else if let Some(rule) = env.db.lookup(&step.rule) {
        match explicit_instances(rule, step, env)? {
            Some(insts) => insts,
            None => infer_instances(rule, prev, step, env),
        }
    } else {
        return Err(format!("unknown rule `{}`", step.rule));
    };
    if instances.is_empty() {
        return Err(format!(
            "no occurrence of `{}` matches here (a binding may be required)",
            step.rule
        ));
    }

    let mut saw_lhs_occurrence = false;
    for inst in &instances {
        // Orient by direction; order-reversing use of ≤ is rejected.
        let (from, to) = match step.direction {
            Direction::LR => (&inst.from, &inst.to),
            Direction::RL => {
                if inst.relation == Relation::Le {
                    return Err(format!(
                        "`{}` is an inequation; applying it right-to-left would reverse the chain order",
                        step.rule
                    ));
                }
                (&inst.to, &inst.from)
            }
        };
        // The declared relation must be at least as strong as the rule's.
        if inst.relation == Relation::Le && step.relation == Relation::Eq {
            return Err(format!(
                "`{}` only justifies ≤, but the step claims =",
                step.rule
            ));
        }
        let sites = enumerate_sites(prev, step.position.as_deref());
        for site in &sites {
            let Some(at) = site_expr(prev, site) else {
                continue;
            };
            if &at != from {
                continue;
            }
            saw_lhs_occurrence = true;
            let Some(candidate) = replace_at(prev, site, to.clone()) else {
                continue;
            };
            if &candidate == next {
                // Discharge premises via the cited names.
                for needed in &inst.premises {
                    let ok = step.premises.iter().any(|name| {
                        env.proven
                            .get(name)
                            .map(|p| entails(p, needed))
                            .unwrap_or(false)
                    });
                    if !ok {
                        return Err(format!(
                            "premise `{}` of `{}` is not among the cited facts",
                            needed.display(&env.script.alphabet),
                            step.rule
                        ));
                    }
                }
                return Ok(());
            }
        }
    }
    if saw_lhs_occurrence {
        Err(format!(
            "`{}` matches but no rewrite produces the stated term",
            step.rule
        ))
    } else {
        Err(format!(
            "no occurrence of `{}`'s source side found{}",
            step.rule,
            match &step.position {
                Some(p) => format!(" at position {p:?}"),
                None => String::new(),
            }
        ))
    }
}

/// Instance inference for schema rules used without `with`: match the
/// source side at every admissible site, keep complete bindings.
fn infer_instances(rule: &Rule, prev: &Expr, step: &Step, env: &Env) -> Vec<Instance> {
    if rule.special.is_some() {
        return Vec::new();
    }
    let metavars: HashSet<Symbol> = rule.metavars.iter().copied().collect();
    let (pat_from, pat_to) = match step.direction {
        Direction::LR => (&rule.statement.lhs, &rule.statement.rhs),
        Direction::RL => (&rule.statement.rhs, &rule.statement.lhs),
    };
    let mut out = Vec::new();
    let mut seen: Vec<(Expr, Expr)> = Vec::new();
    for site in enumerate_sites(prev, step.position.as_deref()) {
        let Some(subj) = site_expr(prev, &site) else {
            continue;
        };
        for binding in match_pattern(pat_from, &subj, &metavars, &Default::default()) {
            if !rule.metavars.iter().all(|v| binding.contains_key(v)) {
                continue; // source side does not pin every metavariable
            }
            let from = pat_from.substitute(&binding);
            let to = pat_to.substitute(&binding);
            if seen.iter().any(|(f, t)| *f == from && *t == to) {
                continue;
            }
            seen.push((from.clone(), to.clone()));
            let (from, to) = match step.direction {
                Direction::LR => (from, to),
                Direction::RL => (to, from),
            };
            out.push(Instance {
                from,
                to,
                relation: rule.statement.relation,
                premises: rule
                    .premises
                    .iter()
                    .map(|p| Inequation {
                        lhs: p.lhs.substitute(&binding),
                        rhs: p.rhs.substitute(&binding),
                        relation: p.relation,
                    })
                    .collect(),
            });
        }
    }
    let _ = env;
    out
}

fn check_lemma(lemma: &Lemma, env: &Env) -> Result<(), Failure> {
    let fail = |line: usize, message: String| Failure {
        lemma: lemma.name.clone(),
        line,
        message,
    };
    match &lemma.justification {
        Justification::Antisym(l1, l2) => {
            if lemma.goal.relation != Relation::Eq {
                return Err(fail(lemma.line_no, "antisym proves equalities".into()));
            }
            let fwd = Inequation::le(lemma.goal.lhs.clone(), lemma.goal.rhs.clone());
            let bwd = Inequation::le(lemma.goal.rhs.clone(), lemma.goal.lhs.clone());
            let get = |name: &String| env.proven.get(name);
            let ok = match (get(l1), get(l2)) {
                (Some(a), Some(b)) => {
                    (entails(a, &fwd) && entails(b, &bwd))
                        || (entails(a, &bwd) && entails(b, &fwd))
                }
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                Err(fail(
                    lemma.line_no,
                    format!("antisym({l1}, {l2}) does not cover both directions of the goal"),
                ))
            }
        }
        Justification::Chain(lines) => {
            let first = lines
                .first()
                .ok_or_else(|| fail(lemma.line_no, "empty chain".into()))?;
            if first.term != lemma.goal.lhs {
                return Err(fail(
                    first.line_no,
                    "chain does not start at the goal's left-hand side".into(),
                ));
            }
            let mut chain_relation = Relation::Eq;
            for pair in lines.windows(2) {
                let (prev, line) = (&pair[0], &pair[1]);
                let step = line.step.as_ref().ok_or_else(|| {
                    fail(line.line_no, "missing justification bracket".into())
                })?;
                if step.relation == Relation::Le {
                    chain_relation = Relation::Le;
                }
                check_step(&prev.term, &line.term, step, env)
                    .map_err(|m| fail(line.line_no, m))?;
            }
            let last = lines.last().unwrap();
            if last.term != lemma.goal.rhs {
                return Err(fail(
                    last.line_no,
                    "chain does not end at the goal's right-hand side".into(),
                ));
            }
            if chain_relation == Relation::Le && lemma.goal.relation == Relation::Eq {
                return Err(fail(
                    lemma.line_no,
                    "inequational steps cannot prove an equality goal".into(),
                ));
            }
            Ok(())
        }
    }
}

/// Verifies every lemma chain of `script` against the rule database.
pub fn check_script(script: &ProofScript, db: &RuleDB) -> ScriptReport {
    let mut failures = Vec::new();
    for name in script
        .hypotheses
        .iter()
        .map(|(n, _)| n)
        .chain(script.lemmas.iter().map(|l| &l.name))
    {
        if db.contains(name) {
            failures.push(Failure {
                lemma: name.clone(),
                line: 0,
                message: format!("`{name}` shadows a builtin rule"),
            });
        }
    }
    if !failures.is_empty() {
        return ScriptReport {
            script: script.name.clone(),
            accepted: false,
            lemmas_checked: 0,
            failures,
        };
    }
    let mut env = Env {
        db,
        script,
        proven: script
            .hypotheses
            .iter()
            .map(|(n, i)| (n.clone(), i.clone()))
            .collect(),
    };
    for lemma in &script.lemmas {
        match check_lemma(lemma, &env) {
            Ok(()) => {
                env.proven.insert(lemma.name.clone(), lemma.goal.clone());
            }
            Err(f) => failures.push(f),
        }
    }
    ScriptReport {
        script: script.name.clone(),
        accepted: failures.is_empty(),
        lemmas_checked: script.lemmas.len(),
        failures,
    }
}

/// Convenience: parse then check.
pub fn check_script_text(name: &str, text: &str, db: &RuleDB) -> Result<ScriptReport, ProofParseError> {
    let script = parse_script(name, text)?;
    Ok(check_script(&script, db))
}

/// Parse-then-check where a parse error counts as rejection — the form
/// mutation testing wants.
pub fn check_or_reject(name: &str, text: &str, db: &RuleDB) -> ScriptReport {
    match check_script_text(name, text, db) {
        Ok(report) => report,
        Err(e) => ScriptReport {
            script: name.to_string(),
            accepted: false,
            lemmas_checked: 0,
            failures: vec![Failure {
                lemma: String::new(),
                line: e.line,
                message: e.message,
            }],
        },
    }
}

#[cfg(test)]
mod tests;
