//! Occurrence enumeration and schema matching modulo associativity of `·`
//! and associativity+commutativity of `+`.
//!
//! A rewrite site is a path to a node plus an optional selection of a
//! contiguous product segment or a sum sub-multiset, so a rule whose
//! left-hand side is `p q` can fire inside `a b c` on the `b c` segment,
//! and `p + q` can fire on two operands of a larger sum.

use crate::syntax::{Expr, Symbol};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SiteSel {
    Whole,
    /// Children `[start, end)` of a product node.
    ProdSegment(usize, usize),
    /// Child indices of a sum node, ascending.
    SumSubset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub path: Vec<usize>,
    pub sel: SiteSel,
}

/// All rewrite sites of `e`; when `at` is given, only sites anchored at
/// that exact path.
pub fn enumerate_sites(e: &Expr, at: Option<&[usize]>) -> Vec<Site> {
    let mut sites = Vec::new();
    match at {
        Some(path) => {
            if let Some(node) = e.subterm_at(path) {
                push_node_sites(node, path.to_vec(), &mut sites);
            }
        }
        None => walk(e, Vec::new(), &mut sites),
    }
    sites
}

fn walk(e: &Expr, path: Vec<usize>, sites: &mut Vec<Site>) {
    push_node_sites(e, path.clone(), sites);
    for (i, child) in e.children().iter().enumerate() {
        let mut p = path.clone();
        p.push(i);
        walk(child, p, sites);
    }
}

fn push_node_sites(e: &Expr, path: Vec<usize>, sites: &mut Vec<Site>) {
    sites.push(Site {
        path: path.clone(),
        sel: SiteSel::Whole,
    });
    match e {
        Expr::Prod(ts) => {
            let n = ts.len();
            for start in 0..n {
                for end in (start + 2)..=n {
                    if end - start == n {
                        continue; // whole node already listed
                    }
                    sites.push(Site {
                        path: path.clone(),
                        sel: SiteSel::ProdSegment(start, end),
                    });
                }
            }
        }
        Expr::Sum(ts) => {
            let n = ts.len();
            if n <= 12 {
                for mask in 1u32..(1 << n) {
                    let count = mask.count_ones() as usize;
                    if count < 2 || count == n {
                        continue;
                    }
                    let subset: Vec<usize> =
                        (0..n).filter(|i| mask & (1 << i) != 0).collect();
                    sites.push(Site {
                        path: path.clone(),
                        sel: SiteSel::SumSubset(subset),
                    });
                }
            }
        }
        _ => {}
    }
}

/// The expression a site denotes.
pub fn site_expr(root: &Expr, site: &Site) -> Option<Expr> {
    let node = root.subterm_at(&site.path)?;
    match &site.sel {
        SiteSel::Whole => Some(node.clone()),
        SiteSel::ProdSegment(start, end) => match node {
            Expr::Prod(ts) => Some(Expr::prod(ts[*start..*end].to_vec())),
            _ => None,
        },
        SiteSel::SumSubset(ix) => match node {
            Expr::Sum(ts) => Some(Expr::sum(ix.iter().map(|&i| ts[i].clone()).collect())),
            _ => None,
        },
    }
}

/// Replaces the site with `replacement`, re-canonicalizing on the way up.
pub fn replace_at(root: &Expr, site: &Site, replacement: Expr) -> Option<Expr> {
    fn rebuild(node: &Expr, path: &[usize], make: &dyn Fn(&Expr) -> Option<Expr>) -> Option<Expr> {
        match path.first() {
            None => make(node),
            Some(&i) => {
                let children = node.children();
                if i >= children.len() {
                    return None;
                }
                let new_child = rebuild(&children[i], &path[1..], make)?;
                Some(match node {
                    Expr::Sum(ts) => {
                        let mut ts = ts.clone();
                        ts[i] = new_child;
                        Expr::sum(ts)
                    }
                    Expr::Prod(ts) => {
                        let mut ts = ts.clone();
                        ts[i] = new_child;
                        Expr::prod(ts)
                    }
                    Expr::Star(_) => Expr::star(new_child),
                    _ => return None,
                })
            }
        }
    }
    let sel = site.sel.clone();
    rebuild(root, &site.path, &move |node: &Expr| match &sel {
        SiteSel::Whole => Some(replacement.clone()),
        SiteSel::ProdSegment(start, end) => match node {
            Expr::Prod(ts) => {
                let mut parts = ts[..*start].to_vec();
                parts.push(replacement.clone());
                parts.extend_from_slice(&ts[*end..]);
                Some(Expr::prod(parts))
            }
            _ => None,
        },
        SiteSel::SumSubset(ix) => match node {
            Expr::Sum(ts) => {
                let mut parts: Vec<Expr> = ts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !ix.contains(i))
                    .map(|(_, t)| t.clone())
                    .collect();
                parts.push(replacement.clone());
                Some(Expr::sum(parts))
            }
            _ => None,
        },
    })
    .map(Expr::canonical)
}

pub type Binding = HashMap<Symbol, Expr>;

/// All consistent bindings of `pat`'s metavariables against `subj`,
/// modulo A for products and AC for sums. Metavariables bind nonempty
/// segments/subsets; other pattern nodes match a single subject node.
pub fn match_pattern(
    pat: &Expr,
    subj: &Expr,
    metavars: &HashSet<Symbol>,
    binding: &Binding,
) -> Vec<Binding> {
    match pat {
        Expr::Atom(v) if metavars.contains(v) => match binding.get(v) {
            Some(bound) if bound == subj => vec![binding.clone()],
            Some(_) => vec![],
            None => {
                let mut b = binding.clone();
                b.insert(*v, subj.clone());
                vec![b]
            }
        },
        Expr::Atom(a) => match subj {
            Expr::Atom(b) if a == b => vec![binding.clone()],
            _ => vec![],
        },
        Expr::Zero => match subj {
            Expr::Zero => vec![binding.clone()],
            _ => vec![],
        },
        Expr::One => match subj {
            Expr::One => vec![binding.clone()],
            _ => vec![],
        },
        Expr::Star(p) => match subj {
            Expr::Star(s) => match_pattern(p, s, metavars, binding),
            _ => vec![],
        },
        Expr::Prod(ps) => match subj {
            Expr::Prod(ts) => match_prod(ps, ts, metavars, binding),
            _ => vec![],
        },
        Expr::Sum(ps) => match subj {
            Expr::Sum(ts) => match_sum(ps, ts, metavars, binding),
            _ => vec![],
        },
    }
}

fn is_metavar(e: &Expr, metavars: &HashSet<Symbol>) -> Option<Symbol> {
    match e {
        Expr::Atom(v) if metavars.contains(v) => Some(*v),
        _ => None,
    }
}

fn match_prod(
    ps: &[Expr],
    ts: &[Expr],
    metavars: &HashSet<Symbol>,
    binding: &Binding,
) -> Vec<Binding> {
    if ps.is_empty() {
        return if ts.is_empty() {
            vec![binding.clone()]
        } else {
            vec![]
        };
    }
    let mut out = Vec::new();
    let head = &ps[0];
    if let Some(v) = is_metavar(head, metavars) {
        // A variable eats a nonempty prefix segment.
        let max_take = ts.len().saturating_sub(min_len(&ps[1..], metavars));
        for take in 1..=max_take {
            let seg = Expr::prod(ts[..take].to_vec());
            let mut next = Vec::new();
            match binding.get(&v) {
                Some(bound) if *bound == seg => next.push(binding.clone()),
                Some(_) => {}
                None => {
                    let mut b = binding.clone();
                    b.insert(v, seg);
                    next.push(b);
                }
            }
            for b in next {
                out.extend(match_prod(&ps[1..], &ts[take..], metavars, &b));
            }
        }
    } else if !ts.is_empty() {
        for b in match_pattern(head, &ts[0], metavars, binding) {
            out.extend(match_prod(&ps[1..], &ts[1..], metavars, &b));
        }
    }
    out
}

fn min_len(ps: &[Expr], _metavars: &HashSet<Symbol>) -> usize {
    ps.len() // every pattern element consumes at least one child
}

fn match_sum(
    ps: &[Expr],
    ts: &[Expr],
    metavars: &HashSet<Symbol>,
    binding: &Binding,
) -> Vec<Binding> {
    // Assign each subject child to one pattern slot; non-variable slots
    // take exactly one child, variable slots at least one.
    fn go(
        ps: &[Expr],
        remaining: &[Expr],
        metavars: &HashSet<Symbol>,
        binding: &Binding,
        out: &mut Vec<Binding>,
    ) {
        match ps.split_first() {
            None => {
                if remaining.is_empty() {
                    out.push(binding.clone());
                }
            }
            Some((head, rest)) => {
                if let Some(v) = is_metavar(head, metavars) {
                    let max_take = remaining.len() - min_len(rest, metavars);
                    // Choose a sub-multiset by index mask over remaining.
                    let n = remaining.len();
                    if n > 16 {
                        return;
                    }
                    for mask in 1u32..(1 << n) {
                        let count = mask.count_ones() as usize;
                        if count > max_take {
                            continue;
                        }
                        let (taken, left): (Vec<_>, Vec<_>) =
                            remaining.iter().cloned().enumerate().partition(|(i, _)| {
                                mask & (1 << *i) != 0
                            });
                        let seg =
                            Expr::sum(taken.into_iter().map(|(_, t)| t).collect());
                        let left: Vec<Expr> = left.into_iter().map(|(_, t)| t).collect();
                        let mut candidates = Vec::new();
                        match binding.get(&v) {
                            Some(bound) if *bound == seg => candidates.push(binding.clone()),
                            Some(_) => {}
                            None => {
                                let mut b = binding.clone();
                                b.insert(v, seg);
                                candidates.push(b);
                            }
                        }
                        for b in candidates {
                            go(rest, &left, metavars, &b, out);
                        }
                    }
                } else {
                    for (i, t) in remaining.iter().enumerate() {
                        for b in match_pattern(head, t, metavars, binding) {
                            let mut left = remaining.to_vec();
                            left.remove(i);
                            go(rest, &left, metavars, &b, out);
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(ps, ts, metavars, binding, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr_auto, Alphabet};

    fn setup() -> (Alphabet, HashSet<Symbol>) {
        let mut al = Alphabet::new();
        let p = al.declare_action("p").unwrap();
        let q = al.declare_action("q").unwrap();
        al.declare_action("a").unwrap();
        al.declare_action("b").unwrap();
        al.declare_action("c").unwrap();
        (al, HashSet::from([p, q]))
    }

    fn expr(al: &mut Alphabet, s: &str) -> Expr {
        parse_expr_auto(s, al).unwrap()
    }

    #[test]
    fn matches_product_segment_var() {
        let (mut al, vars) = setup();
        let pat = expr(&mut al, "p q*");
        let subj = expr(&mut al, "a b (a b)*");
        let ms = match_pattern(&pat, &subj, &vars, &Binding::new());
        // p = a b, q = a b.
        assert_eq!(ms.len(), 1);
        let p = al.lookup("p").unwrap();
        assert_eq!(al.print(&ms[0][&p]), "a b");
    }

    #[test]
    fn matches_sum_ac() {
        let (mut al, vars) = setup();
        let pat = expr(&mut al, "p + q");
        let subj = expr(&mut al, "a + b + c");
        let ms = match_pattern(&pat, &subj, &vars, &Binding::new());
        // Partitions of a 3-element multiset into two nonempty parts.
        assert_eq!(ms.len(), 6);
    }

    #[test]
    fn respects_consistent_bindings() {
        let (mut al, vars) = setup();
        let pat = expr(&mut al, "p p");
        let yes = expr(&mut al, "a b a b");
        let no = expr(&mut al, "a b b a");
        assert_eq!(match_pattern(&pat, &yes, &vars, &Binding::new()).len(), 1);
        assert_eq!(match_pattern(&pat, &no, &vars, &Binding::new()).len(), 0);
    }

    #[test]
    fn segment_sites_allow_inner_rewrites() {
        let (mut al, _) = setup();
        let root = expr(&mut al, "a b c");
        let sites = enumerate_sites(&root, None);
        let seg = sites
            .iter()
            .find(|s| s.sel == SiteSel::ProdSegment(1, 3))
            .unwrap();
        let got = site_expr(&root, seg).unwrap();
        assert_eq!(al.print(&got), "b c");
        let replaced = replace_at(&root, seg, expr(&mut al, "q")).unwrap();
        assert_eq!(al.print(&replaced), "a q");
    }

    #[test]
    fn sum_subset_replacement_resorts() {
        let (mut al, _) = setup();
        let root = expr(&mut al, "a + b + c");
        let sites = enumerate_sites(&root, None);
        let subset = sites
            .iter()
            .find(|s| s.sel == SiteSel::SumSubset(vec![0, 2]))
            .unwrap();
        let replaced = replace_at(&root, subset, expr(&mut al, "q q q q")).unwrap();
        assert_eq!(al.print(&replaced), "b + q q q q");
    }

    #[test]
    fn path_restricted_sites() {
        let (mut al, _) = setup();
        let root = expr(&mut al, "(a + b)* c");
        let sites = enumerate_sites(&root, Some(&[0, 0]));
        assert!(sites
            .iter()
            .all(|s| s.path == vec![0, 0]));
        assert!(sites.iter().any(|s| s.sel == SiteSel::Whole));
    }
}
