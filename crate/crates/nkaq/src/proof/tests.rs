use super::*;

fn check(text: &str) -> ScriptReport {
    let db = builtin_rules();
    check_script_text("test", text, &db).expect("parses")
}

fn assert_accepted(text: &str) {
    let report = check(text);
    assert!(
        report.accepted,
        "rejected: {:?}",
        report.first_failure()
    );
}

fn assert_rejected_at(text: &str, needle: &str) {
    let report = check(text);
    assert!(!report.accepted, "unexpectedly accepted");
    let f = report.first_failure().unwrap();
    assert!(
        f.message.contains(needle),
        "diagnosis `{}` does not mention `{needle}`",
        f.message
    );
}

#[test]
fn distributivity_round_trip() {
    assert_accepted(
        "\
alphabet: a b c
lemma expand: a (b + c) = a c + a b
  a (b + c)
  a b + a c   [= by distrib-left LR at root]
",
    );
}

#[test]
fn hypothesis_rewrites_inside_context() {
    assert_accepted(
        "\
alphabet: m0 m1 p
hypotheses:
  disj: m1 m0 = 0
lemma kill: p m1 m0 p = p 0 p
  p m1 m0 p
  p 0 p   [= by disj LR]
",
    );
}

#[test]
fn unit_and_annihilator_are_explicit() {
    assert_accepted(
        "\
alphabet: p
lemma tidy: p 0 + p 1 = p
  p 0 + p 1
  0 + p 1    [= by annihilate-right LR at 0]
  0 + p     [= by unit-right LR at 1]
  p          [= by plus-zero LR with p=p]
",
    );
}

#[test]
fn plus_zero_matches_modulo_ac() {
    // 0 + p sorts to the canonical p + 0 via size order; zero first means
    // the sum prints as `0 + p`, and plus-zero still applies.
    assert_accepted(
        "\
alphabet: p q
lemma drop: q p + 0 = q p
  q p + 0
  q p  [= by plus-zero LR]
",
    );
}

#[test]
fn sliding_whole_and_inside_star() {
    assert_accepted(
        "\
alphabet: p q
lemma slide: (p q)* p q* = p (q p)* q*
  (p q)* p q*
  p (q p)* q*   [= by sliding LR at root]
",
    );
}

#[test]
fn conditional_star_rewrite_with_cited_premise() {
    assert_accepted(
        "\
alphabet: u v
hypotheses:
  conj: u (v u) = (u v) u
lemma rewrite: u (v u)* = (u v)* u
  u (v u)*
  (u v)* u   [= by star-rewrite LR with p=u, q=v u, r=u v using conj]
",
    );
}

#[test]
fn unproven_premise_rejected() {
    assert_rejected_at(
        "\
alphabet: u v
lemma rewrite: u (v u)* = (u v)* u
  u (v u)*
  (u v)* u   [= by star-rewrite LR with p=u, q=v u, r=u v using conj]
",
        "premise",
    );
}

#[test]
fn induction_proves_star_bound() {
    // p* 1 ≤ 1 + p p* by the left induction law; the premise
    // 1 + p(1 + p p*) ≤ 1 + p p* is one congruence of star-unfold.
    assert_accepted(
        "\
alphabet: p
lemma aux: 1 + p (1 + p p*) <= 1 + p p*
  1 + p (1 + p p*)
  1 + p p*   [<= by star-unfold LR at 1.1]
lemma bound: p* 1 <= 1 + p p*
  p* 1
  1 + p p*   [<= by induction-left LR with p=p, q=1, r=1 + p p* using aux]
",
    );
}

#[test]
fn mismatched_next_term_rejected() {
    assert_rejected_at(
        "\
alphabet: a b c
lemma expand: a (b + c) = a b + c
  a (b + c)
  a b + c   [= by distrib-left LR at root]
",
        "stated term",
    );
}

#[test]
fn no_idempotence_rule_exists() {
    assert_rejected_at(
        "\
alphabet: a
lemma collapse: a + a = a
  a + a
  a   [= by plus-zero LR]
",
        "no occurrence",
    );
}

#[test]
fn inequality_step_cannot_prove_equality_goal() {
    assert_rejected_at(
        "\
alphabet: p
lemma bad: 1 + p p* = p*
  1 + p p*
  p*  [<= by star-unfold LR]
",
        "equality goal",
    );
}

#[test]
fn order_reversing_le_rejected() {
    assert_rejected_at(
        "\
alphabet: p
lemma bad: p* <= 1 + p p*
  p*
  1 + p p*  [<= by star-unfold RL]
",
        "right-to-left",
    );
}

#[test]
fn antisym_combines_direction_lemmas() {
    assert_accepted(
        "\
alphabet: p
lemma le: 1 + p p* <= p*
  1 + p p*
  p*  [<= by star-unfold LR]
lemma aux: 1 + p (1 + p p*) <= 1 + p p*
  1 + p (1 + p p*)
  1 + p p*   [<= by star-unfold LR at 1.1]
lemma ge: p* <= 1 + p p*
  p*
  p* 1       [= by unit-right RL at root]
  1 + p p*   [<= by induction-left LR with p=p, q=1, r=1 + p p* using aux]
lemma fp: 1 + p p* = p* by antisym(le, ge)
",
    );
}

#[test]
fn antisym_needs_both_directions() {
    assert_rejected_at(
        "\
alphabet: p
lemma le: 1 + p p* <= p*
  1 + p p*
  p*  [<= by star-unfold LR]
lemma fp: 1 + p p* = p* by antisym(le, le)
",
        "antisym",
    );
}

#[test]
fn monotone_congruence_in_star_context() {
    assert_accepted(
        "\
alphabet: p q
hypotheses:
  grow: p <= q
lemma mono: (p p)* <= (q p)*
  (p p)*
  (q p)*  [<= by grow LR at 0.0]
",
    );
}

#[test]
fn negation_reverse_and_partition_transform() {
    assert_accepted(
        "\
alphabet: m0 m1 p
effects: a b c
partition M: m0 m1
hypotheses:
  grow: a <= b
  cdef: c = m0 a + m1 b
lemma rev: p b' <= p a'
  p b'
  p a'   [<= by negation-reverse LR with a=a, b=b using grow]
lemma unfold: c' p = (m0 a' + m1 b') p
  c' p
  (m0 a' + m1 b') p  [= by partition-transform LR at 0 using cdef]
lemma refold: m0 a' + m1 b' = c'
  m0 a' + m1 b'
  c'  [= by partition-transform RL using cdef]
",
    );
}

#[test]
fn excluded_middle_and_double_negation() {
    assert_accepted(
        "\
alphabet: p
effects: a
lemma em: p (a + a') = p e
  p (a + a')
  p e   [= by excluded-middle LR with a=a]
lemma dn: a = a
  a
  a    [= by double-negation LR with a=a]
",
    );
}

#[test]
fn shadowing_builtin_rejected() {
    assert_rejected_at(
        "\
alphabet: p
hypotheses:
  sliding: p p = p p
lemma l: p = p
  p
",
        "shadows",
    );
}

#[test]
fn chain_must_start_and_end_on_goal() {
    assert_rejected_at(
        "\
alphabet: p q
lemma bad: p q = q p
  q p
",
        "left-hand side",
    );
    assert_rejected_at(
        "\
alphabet: p q
lemma bad2: p (q + q) = q
  p (q + q)
  p q + p q [= by distrib-left LR]
",
        "right-hand side",
    );
}

#[test]
fn deleting_a_step_is_caught() {
    let good = "\
alphabet: p
lemma tidy: p 0 + p 1 = p
  p 0 + p 1
  0 + p 1    [= by annihilate-right LR at 0]
  0 + p     [= by unit-right LR at 1]
  p          [= by plus-zero LR with p=p]
";
    assert_accepted(good);
    let db = builtin_rules();
    for drop in 2..5 {
        let mutated: Vec<&str> = good
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, l)| l)
            .collect();
        let report = check_or_reject("mutated", &mutated.join("\n"), &db);
        assert!(!report.accepted, "dropping line {drop} still accepted");
    }
}
