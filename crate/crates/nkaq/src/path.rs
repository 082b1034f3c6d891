//! Finitely presented extended positive operator sums and their
//! domination preorder — the executable fragment of the quantum path
//! model's state space.
//!
//! An [`ExtOperatorSum`] is a finite list of (multiplicity, PSD operator)
//! terms where multiplicities live in ℕ∞. The preorder `≲` compares the
//! finite-weight parts up to arbitrary finite multiples of the ∞-weight
//! parts: A ≲ B iff supp(G_A) ⊆ supp(G_B) and F_A ⊑ F_B + c·G_B for some
//! finite c, where F is the weighted finite part and G the sum of
//! ∞-weight operators.

use crate::quantum::{
    dagger, herm_eigenvalues, identity, max_abs, CMat, QuantumError, Superoperator,
};
use crate::series::extnat::{ExtNat, Fin, Inf};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Finitely presented element of the extended positive operators.
#[derive(Debug, Clone)]
pub struct ExtOperatorSum {
    dim: usize,
    terms: Vec<(ExtNat, CMat)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("zero weight in term {0}")]
    ZeroWeight(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

impl ExtOperatorSum {
    /// `terms` must have nonzero weights and PSD operators (within tol).
    pub fn new(dim: usize, terms: Vec<(ExtNat, CMat)>, tol: f64) -> Result<Self, PathError> {
        for (i, (w, op)) in terms.iter().enumerate() {
            if w.is_zero() {
                return Err(PathError::ZeroWeight(i));
            }
            if op.nrows() != dim || op.ncols() != dim {
                return Err(PathError::DimMismatch(op.nrows(), dim));
            }
            let dev = crate::quantum::herm_deviation(op);
            if dev > tol {
                return Err(PathError::Quantum(QuantumError::NotHermitian(dev)));
            }
            let min = crate::quantum::min_eigenvalue(op);
            if min < -tol {
                return Err(PathError::Quantum(QuantumError::NotPsd(min)));
            }
        }
        Ok(ExtOperatorSum { dim, terms })
    }

    pub fn singleton(op: CMat) -> Self {
        let dim = op.nrows();
        ExtOperatorSum {
            dim,
            terms: vec![(Fin(1), op)],
        }
    }

    /// The presentation {|O|} of the zero element.
    pub fn zero(dim: usize) -> Self {
        ExtOperatorSum {
            dim,
            terms: vec![(Fin(1), CMat::zeros(dim, dim))],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(ExtNat, CMat)] {
        &self.terms
    }

    /// Multiset union of presentations.
    pub fn concat(&self, other: &ExtOperatorSum) -> Result<ExtOperatorSum, PathError> {
        if self.dim != other.dim {
            return Err(PathError::DimMismatch(self.dim, other.dim));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(ExtOperatorSum {
            dim: self.dim,
            terms,
        })
    }

    /// Weighted sum of the finite-weight terms.
    pub fn finite_part(&self) -> CMat {
        let mut f = CMat::zeros(self.dim, self.dim);
        for (w, op) in &self.terms {
            if let Fin(n) = w {
                f += op.scale(*n as f64);
            }
        }
        f
    }

    /// Unweighted sum of the ∞-weight operators.
    pub fn infinite_part(&self) -> CMat {
        let mut g = CMat::zeros(self.dim, self.dim);
        for (w, op) in &self.terms {
            if *w == Inf {
                g += op;
            }
        }
        g
    }
}

/// Projector onto the span of eigenvectors of `m` with eigenvalue < thr.
fn kernel_projector(m: &CMat, thr: f64) -> CMat {
    let sym = (m + dagger(m)).scale(0.5);
    let eig = sym.symmetric_eigen();
    let dim = m.nrows();
    let mut p = CMat::zeros(dim, dim);
    for k in 0..dim {
        if eig.eigenvalues[k] < thr {
            let v = eig.eigenvectors.column(k);
            for r in 0..dim {
                for c in 0..dim {
                    p[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
    }
    p
}

fn max_eigenvalue(m: &CMat) -> f64 {
    *herm_eigenvalues(m).last().unwrap()
}

/// Decides the ≲ preorder for finite presentations via the closed-form
/// projection test: with P the kernel projector of G_B,
/// supp(G_A) ⊆ supp(G_B) iff P·G_A·P ⊑ tol·I, and the finite parts must
/// satisfy P(F_A − F_B)P ⊑ tol·I (c can absorb anything on the support).
pub fn po_leq(a: &ExtOperatorSum, b: &ExtOperatorSum, tol: f64) -> Result<bool, PathError> {
    if a.dim != b.dim {
        return Err(PathError::DimMismatch(a.dim, b.dim));
    }
    let g_a = a.infinite_part();
    let g_b = b.infinite_part();
    let p = kernel_projector(&g_b, tol);
    // Scale-aware support check for the ∞ parts.
    let support_ok = max_eigenvalue(&(&p * &g_a * &p)) <= tol * (1.0 + max_abs(&g_a));
    if !support_ok {
        return Ok(false);
    }
    let m = a.finite_part() - b.finite_part();
    let scale = 1.0 + max_abs(&m);
    Ok(max_eigenvalue(&(&p * m * &p)) <= tol * scale)
}

/// The induced equivalence: ≲ both ways.
pub fn po_equiv(a: &ExtOperatorSum, b: &ExtOperatorSum, tol: f64) -> Result<bool, PathError> {
    Ok(po_leq(a, b, tol)? && po_leq(b, a, tol)?)
}

/// Brute-force semi-decision of ≲ straight from the definition: for every
/// ε in the schedule and every finite multiple k of A's ∞ part there must
/// be a finite multiple c of B's ∞ part with
/// F_A + k·G_A ⊑ ε·I + F_B + c·G_B. The sweep uses
/// c ∈ {1, 10, …, 10⁸}, ε ∈ {1e-3, 1e-6}, k ∈ {1, 10, 100, 1000}.
pub fn po_leq_oracle(a: &ExtOperatorSum, b: &ExtOperatorSum) -> Result<bool, PathError> {
    if a.dim != b.dim {
        return Err(PathError::DimMismatch(a.dim, b.dim));
    }
    let (f_a, g_a) = (a.finite_part(), a.infinite_part());
    let (f_b, g_b) = (b.finite_part(), b.infinite_part());
    let id = identity(a.dim);
    for eps in [1e-3, 1e-6] {
        for k in [1.0, 10.0, 100.0, 1000.0] {
            let lhs = &f_a + g_a.scale(k);
            let mut found = false;
            let mut c = 1.0f64;
            while c <= 1e8 {
                let rhs = id.scale(eps) + &f_b + g_b.scale(c);
                if crate::quantum::min_eigenvalue(&(rhs - &lhs)) >= -1e-12 {
                    found = true;
                    break;
                }
                c *= 10.0;
            }
            if !found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Path lifting: applies `e` to every term, preserving multiplicities.
pub fn lift_apply(e: &Superoperator, a: &ExtOperatorSum) -> Result<ExtOperatorSum, PathError> {
    if e.in_dim() != a.dim {
        return Err(PathError::DimMismatch(e.in_dim(), a.dim));
    }
    let terms = a
        .terms
        .iter()
        .map(|(w, op)| Ok((*w, e.apply_mat(op)?)))
        .collect::<Result<Vec<_>, QuantumError>>()?;
    Ok(ExtOperatorSum {
        dim: e.out_dim(),
        terms,
    })
}

/// Serialized form: `{"terms": [{"weight": n|"INF", "op": matrix}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtSumJson {
    pub terms: Vec<ExtTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtTermJson {
    pub weight: serde_json::Value,
    pub op: crate::quantum::MatrixJson,
}

impl ExtSumJson {
    pub fn from_sum(s: &ExtOperatorSum) -> Self {
        ExtSumJson {
            terms: s
                .terms
                .iter()
                .map(|(w, op)| ExtTermJson {
                    weight: match w {
                        Fin(n) => serde_json::json!(*n as u64),
                        Inf => serde_json::json!("INF"),
                    },
                    op: crate::quantum::MatrixJson::from_mat(op),
                })
                .collect(),
        }
    }

    pub fn to_sum(&self, tol: f64) -> Result<ExtOperatorSum, PathError> {
        let mut terms = Vec::new();
        let mut dim = 0;
        for t in &self.terms {
            let w = match &t.weight {
                serde_json::Value::Number(n) => Fin(n.as_u64().ok_or_else(|| {
                    PathError::Quantum(QuantumError::DimMismatch(
                        "weight must be a natural number or \"INF\"".to_string(),
                    ))
                })? as u128),
                serde_json::Value::String(s) if s == "INF" => Inf,
                other => {
                    return Err(PathError::Quantum(QuantumError::DimMismatch(format!(
                        "bad weight {other}"
                    ))))
                }
            };
            let op = t.op.to_mat()?;
            dim = op.nrows();
            terms.push((w, op));
        }
        ExtOperatorSum::new(dim, terms, tol)
    }
}

pub fn ketbra2(i: usize, j: usize) -> CMat {
    crate::quantum::ketbra(2, i, j)
}

/// Random finitely presented sum for the randomized suites: 1–3 terms,
/// weights in {1, 2, 3, ∞}, operators random PSD or scaled projectors.
pub fn random_sum(rng: &mut crate::quantum::random::Prng, dim: usize) -> ExtOperatorSum {
    use rand::Rng;
    let n_terms = rng.gen_range(1..=3);
    let terms = (0..n_terms)
        .map(|_| {
            let w = match rng.gen_range(0..4) {
                0 => Fin(1),
                1 => Fin(2),
                2 => Fin(3),
                _ => Inf,
            };
            let op = if rng.gen_bool(0.5) {
                let rho = crate::quantum::random::density(rng, dim);
                rho.matrix().scale(rng.gen_range(0.2..2.0))
            } else {
                // Rank-deficient: random pure projector.
                let g = crate::quantum::random::ginibre(rng, dim, 1);
                let norm2: f64 = g.iter().map(|c: &Complex64| c.norm_sqr()).sum();
                (&g * dagger(&g)).scale(1.0 / norm2.max(1e-12))
            };
            (w, op)
        })
        .collect();
    ExtOperatorSum {
        dim,
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{seeded, tni_superop};
    use crate::quantum::{identity, ketbra};

    const TOL: f64 = 1e-9;

    fn sum(dim: usize, terms: Vec<(ExtNat, CMat)>) -> ExtOperatorSum {
        ExtOperatorSum::new(dim, terms, TOL).unwrap()
    }

    #[test]
    fn finite_below_infinite_identity() {
        let a = sum(2, vec![(Fin(1), identity(2))]);
        let b = sum(2, vec![(Inf, identity(2))]);
        assert!(po_leq(&a, &b, TOL).unwrap());
        assert!(!po_leq(&b, &a, TOL).unwrap());
        assert!(!po_equiv(&a, &b, TOL).unwrap());
    }

    #[test]
    fn distinct_infinite_projectors_are_incomparable() {
        let p0 = sum(2, vec![(Inf, ketbra(2, 0, 0))]);
        let p1 = sum(2, vec![(Inf, ketbra(2, 1, 1))]);
        let full = sum(2, vec![(Inf, identity(2))]);
        assert!(!po_leq(&p0, &p1, TOL).unwrap());
        assert!(!po_leq(&p1, &p0, TOL).unwrap());
        assert!(po_leq(&p0, &full, TOL).unwrap());
        assert!(!po_leq(&full, &p0, TOL).unwrap());
    }

    #[test]
    fn convergent_sum_flattening() {
        let mut rng = seeded(3);
        let r1 = crate::quantum::random::density(&mut rng, 2);
        let r2 = crate::quantum::random::density(&mut rng, 2);
        let split = sum(
            2,
            vec![(Fin(1), r1.matrix().clone()), (Fin(1), r2.matrix().clone())],
        );
        let joined = sum(2, vec![(Fin(1), r1.matrix() + r2.matrix())]);
        assert!(po_equiv(&split, &joined, TOL).unwrap());
    }

    #[test]
    fn weight_flattening_with_inf_absorption() {
        let rho = ketbra(2, 0, 0);
        let two = sum(2, vec![(Fin(2), rho.clone())]);
        let one_one = sum(2, vec![(Fin(1), rho.clone()), (Fin(1), rho.clone())]);
        assert!(po_equiv(&two, &one_one, TOL).unwrap());
        let inf_plus = sum(2, vec![(Inf, rho.clone()), (Fin(5), rho.clone())]);
        let inf_only = sum(2, vec![(Inf, rho.clone())]);
        assert!(po_equiv(&inf_plus, &inf_only, TOL).unwrap());
    }

    #[test]
    fn closed_form_matches_oracle_on_random_sums() {
        let mut rng = seeded(99);
        let mut disagreements = 0;
        for _ in 0..120 {
            let a = random_sum(&mut rng, 2);
            let b = random_sum(&mut rng, 2);
            let fast = po_leq(&a, &b, TOL).unwrap();
            let slow = po_leq_oracle(&a, &b).unwrap();
            if fast != slow {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn lift_apply_moves_terms() {
        let reset = Superoperator::from_kraus(vec![ketbra(2, 0, 0), ketbra(2, 0, 1)]).unwrap();
        let a = sum(2, vec![(Inf, ketbra(2, 1, 1))]);
        let lifted = lift_apply(&reset, &a).unwrap();
        let expect = sum(2, vec![(Inf, ketbra(2, 0, 0))]);
        assert!(po_equiv(&lifted, &expect, TOL).unwrap());
    }

    #[test]
    fn lift_monotone_on_random_pairs() {
        let mut rng = seeded(5);
        for _ in 0..40 {
            let a = random_sum(&mut rng, 2);
            let extra = random_sum(&mut rng, 2);
            let b = a.concat(&extra).unwrap();
            let e = tni_superop(&mut rng, 2, 2);
            assert!(po_leq(&a, &b, TOL).unwrap());
            let la = lift_apply(&e, &a).unwrap();
            let lb = lift_apply(&e, &b).unwrap();
            assert!(po_leq(&la, &lb, TOL).unwrap());
        }
    }

    #[test]
    fn zero_superop_collapses() {
        let z = Superoperator::zero(2);
        let mut rng = seeded(6);
        let a = random_sum(&mut rng, 2);
        let la = lift_apply(&z, &a).unwrap();
        assert!(po_equiv(&la, &ExtOperatorSum::zero(2), TOL).unwrap());
    }

    #[test]
    fn serde_roundtrip() {
        let a = sum(
            2,
            vec![(Fin(2), ketbra(2, 0, 0)), (Inf, identity(2).scale(0.5))],
        );
        let j = ExtSumJson::from_sum(&a);
        let text = serde_json::to_string(&j).unwrap();
        let back: ExtSumJson = serde_json::from_str(&text).unwrap();
        let b = back.to_sum(TOL).unwrap();
        assert!(po_equiv(&a, &b, TOL).unwrap());
    }
}
