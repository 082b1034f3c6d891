//! Seeded random while-programs for the regression suites. Draws are
//! filtered so that the denotational semantics converges under the given
//! policy, and optionally so that the single-loop normal form fits a
//! dimension budget.

use super::{denote, AppliedMeasurement, ProgramError, QProgram, VariableLayout};
use crate::quantum::random::{projective_measurement, unitary, Prng};
use crate::quantum::ConvergencePolicy;
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy)]
pub struct ProgramGenOptions {
    pub depth: usize,
    pub n_qubits: usize,
    /// Reject draws whose normal form would exceed this total dimension.
    pub max_normal_dim: Option<usize>,
    pub policy: ConvergencePolicy,
}

impl Default for ProgramGenOptions {
    fn default() -> Self {
        ProgramGenOptions {
            depth: 2,
            n_qubits: 2,
            max_normal_dim: None,
            policy: ConvergencePolicy::default(),
        }
    }
}

/// Guard-space factor the normal-form construction will multiply the
/// layout dimension by: 1 for base statements, 3·f₁·f₂ for sequencing,
/// (k+1)·Πfᵢ for a k-outcome case, 3·f for a loop.
pub fn normal_form_guard_factor(p: &QProgram) -> usize {
    match p {
        QProgram::Skip | QProgram::Abort | QProgram::Reset(_) | QProgram::Unitary { .. } => 1,
        QProgram::Seq(a, b) => 3 * normal_form_guard_factor(a) * normal_form_guard_factor(b),
        QProgram::Case { branches, .. } => {
            (branches.len() + 1)
                * branches
                    .values()
                    .map(normal_form_guard_factor)
                    .product::<usize>()
        }
        QProgram::While { body, .. } => 3 * normal_form_guard_factor(body),
    }
}

struct Gen<'a> {
    rng: &'a mut Prng,
    layout: VariableLayout,
    unitary_count: usize,
    meas_count: usize,
}

impl<'a> Gen<'a> {
    fn base(&mut self) -> QProgram {
        let reg = self.rng.gen_range(0..self.layout.registers().len());
        match self.rng.gen_range(0..4) {
            0 => QProgram::Skip,
            1 => QProgram::Reset(reg),
            _ => {
                let name = format!("u{}", self.unitary_count);
                self.unitary_count += 1;
                QProgram::Unitary {
                    name,
                    regs: vec![reg],
                    matrix: unitary(self.rng, self.layout.dim_of(reg)),
                }
            }
        }
    }

    fn measurement(&mut self) -> AppliedMeasurement {
        let reg = self.rng.gen_range(0..self.layout.registers().len());
        let name = format!("mm{}", self.meas_count);
        self.meas_count += 1;
        AppliedMeasurement {
            name,
            regs: vec![reg],
            meas: projective_measurement(self.rng, self.layout.dim_of(reg), 2),
        }
    }

    fn program(&mut self, depth: usize) -> QProgram {
        if depth == 0 {
            return self.base();
        }
        match self.rng.gen_range(0..4) {
            0 => QProgram::seq(self.program(depth - 1), self.program(depth - 1)),
            1 => {
                let meas = self.measurement();
                let mut branches = BTreeMap::new();
                branches.insert(0, self.program(depth - 1));
                branches.insert(1, self.program(depth - 1));
                QProgram::Case { meas, branches }
            }
            2 => QProgram::While {
                meas: self.measurement(),
                body: Box::new(self.program(depth - 1)),
            },
            _ => self.base(),
        }
    }
}

/// Draws a random program whose semantics converges; panics after 500
/// rejected attempts (practically unreachable for desk-scale options).
pub fn random_program(
    rng: &mut Prng,
    opts: ProgramGenOptions,
) -> Result<(VariableLayout, QProgram), ProgramError> {
    let registers = (0..opts.n_qubits)
        .map(|i| (format!("q{i}"), 2usize))
        .collect();
    let layout = VariableLayout::new(registers)?;
    for _attempt in 0..500 {
        let mut gen = Gen {
            rng,
            layout: layout.clone(),
            unitary_count: 0,
            meas_count: 0,
        };
        let depth = gen.rng.gen_range(0..=opts.depth);
        let p = gen.program(depth);
        if let Some(limit) = opts.max_normal_dim {
            if layout.total_dim() * normal_form_guard_factor(&p) > limit {
                continue;
            }
        }
        if denote(&p, &layout, opts.policy).is_ok() {
            return Ok((layout, p));
        }
    }
    panic!("could not draw a convergent program in 500 attempts");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::seeded;

    #[test]
    fn draws_are_deterministic_and_convergent() {
        let opts = ProgramGenOptions::default();
        let (l1, p1) = random_program(&mut seeded(42), opts).unwrap();
        let (_, p2) = random_program(&mut seeded(42), opts).unwrap();
        assert_eq!(p1.to_text(&l1), p2.to_text(&l1));
        assert!(denote(&p1, &l1, opts.policy).is_ok());
    }

    #[test]
    fn dimension_budget_respected() {
        let opts = ProgramGenOptions {
            depth: 2,
            n_qubits: 1,
            max_normal_dim: Some(64),
            policy: ConvergencePolicy::default(),
        };
        let mut rng = seeded(7);
        for _ in 0..10 {
            let (layout, p) = random_program(&mut rng, opts).unwrap();
            assert!(layout.total_dim() * normal_form_guard_factor(&p) <= 64);
        }
    }
}
