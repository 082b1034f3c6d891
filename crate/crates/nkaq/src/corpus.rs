//! Bundled proof scripts: Kleene-lemma derivations from the axioms, the
//! compiler-optimization equivalences, the two-loops-into-one merge, the
//! guarded single-loop construction cases, and the propositional Hoare
//! rules.

/// A named script embedded at build time.
#[derive(Debug, Clone, Copy)]
pub struct BundledScript {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! script {
    ($name:literal) => {
        BundledScript {
            name: $name,
            text: include_str!(concat!("../corpus/", $name, ".nka")),
        }
    };
}

pub const SCRIPTS: &[BundledScript] = &[
    script!("fig1_fixed_point"),
    script!("fig1_monotone_star"),
    script!("fig1_product_star"),
    script!("fig1_sliding"),
    script!("fig1_denesting"),
    script!("fig1_positivity"),
    script!("fig1_unrolling"),
    script!("fig1_swap_star"),
    script!("fig1_star_rewrite"),
    script!("loop_unroll"),
    script!("loop_boundary"),
    script!("qsp"),
    script!("normal_form_seq"),
    script!("c7_case_base"),
    script!("c7_case_seq"),
    script!("c7_case_branch"),
    script!("c7_case_loop"),
    script!("pqhl_ax_sk"),
    script!("pqhl_ax_ab"),
    script!("pqhl_r_or"),
    script!("pqhl_r_sc"),
    script!("pqhl_r_if"),
    script!("pqhl_r_lp"),
];

pub fn find(name: &str) -> Option<&'static BundledScript> {
    SCRIPTS.iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{builtin_rules, check_script_text};

    #[test]
    fn every_bundled_script_is_accepted() {
        let db = builtin_rules();
        for s in SCRIPTS {
            let report = check_script_text(s.name, s.text, &db)
                .unwrap_or_else(|e| panic!("{}: parse error: {e}", s.name));
            assert!(
                report.accepted,
                "{} rejected: {:?}",
                s.name,
                report.first_failure()
            );
        }
    }
}
