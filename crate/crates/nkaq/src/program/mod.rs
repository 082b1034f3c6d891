//! Quantum while-language: AST, denotational semantics, and the encoder
//! into expressions.
//!
//! Programs run over a [`VariableLayout`] of named registers; operators
//! written on a register subset embed into the global space by Kronecker
//! lifting with identity on the untouched factors, register order fixed
//! by the layout.

mod parse;
pub mod random;

pub use parse::parse_program;

use crate::quantum::{
    ketbra, CMat, ConvergencePolicy, Measurement, QuantumError, Superoperator,
};
use crate::syntax::{Alphabet, AlphabetError, Expr, Symbol};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProgramError {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),
    #[error("register dimension must be ≥ 1")]
    BadDimension,
    #[error("unknown unitary `{0}`")]
    UnknownUnitary(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("dimension mismatch: operator dim {0}, register group dim {1}")]
    OpDimMismatch(usize, usize),
    #[error("while-loop measurement must have exactly outcomes 0 and 1, found {0}")]
    BadLoopMeasurement(usize),
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("loop did not converge after {terms} terms (residual {residual:.3e})")]
    NonConvergent { terms: usize, residual: f64 },
    #[error("no encoder entry for {0}")]
    MissingEncoderEntry(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// Ordered named registers; the global space is their Kronecker product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableLayout {
    registers: Vec<(String, usize)>,
}

impl VariableLayout {
    pub fn new(registers: Vec<(String, usize)>) -> Result<Self, ProgramError> {
        let mut seen = HashMap::new();
        for (name, dim) in &registers {
            if *dim < 1 {
                return Err(ProgramError::BadDimension);
            }
            if seen.insert(name.clone(), ()).is_some() {
                return Err(ProgramError::DuplicateRegister(name.clone()));
            }
        }
        Ok(VariableLayout { registers })
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.registers
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|(_, d)| d).product()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ProgramError> {
        self.registers
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| ProgramError::UnknownRegister(name.to_string()))
    }

    pub fn dim_of(&self, reg: usize) -> usize {
        self.registers[reg].1
    }

    pub fn name_of(&self, reg: usize) -> &str {
        &self.registers[reg].0
    }

    /// Appends a fresh register, returning its index.
    pub fn append(&mut self, name: &str, dim: usize) -> Result<usize, ProgramError> {
        if self.registers.iter().any(|(n, _)| n == name) {
            return Err(ProgramError::DuplicateRegister(name.to_string()));
        }
        if dim < 1 {
            return Err(ProgramError::BadDimension);
        }
        self.registers.push((name.to_string(), dim));
        Ok(self.registers.len() - 1)
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut ds = vec![0; self.registers.len()];
        for (pos, (_, dim)) in self.registers.iter().enumerate().rev() {
            ds[pos] = index % dim;
            index /= dim;
        }
        ds
    }

    /// Embeds `op` (written on `regs`, indexed in the order given) into
    /// the global space.
    pub fn lift(&self, regs: &[usize], op: &CMat) -> Result<CMat, ProgramError> {
        let group_dim: usize = regs.iter().map(|&r| self.dim_of(r)).product();
        if op.nrows() != group_dim || op.ncols() != group_dim {
            return Err(ProgramError::OpDimMismatch(op.nrows(), group_dim));
        }
        let total = self.total_dim();
        let digit_table: Vec<Vec<usize>> = (0..total).map(|i| self.digits(i)).collect();
        let sub_index = |digits: &[usize]| -> usize {
            regs.iter().fold(0, |acc, &r| acc * self.dim_of(r) + digits[r])
        };
        let rest_matches = |a: &[usize], b: &[usize]| -> bool {
            (0..self.registers.len()).all(|r| regs.contains(&r) || a[r] == b[r])
        };
        let mut out = CMat::zeros(total, total);
        for i in 0..total {
            for j in 0..total {
                if rest_matches(&digit_table[i], &digit_table[j]) {
                    out[(i, j)] = op[(sub_index(&digit_table[i]), sub_index(&digit_table[j]))];
                }
            }
        }
        Ok(out)
    }
}

/// A measurement applied to a register group, kept with its table name
/// for printing and encoding.
#[derive(Debug, Clone)]
pub struct AppliedMeasurement {
    pub name: String,
    pub regs: Vec<usize>,
    pub meas: Measurement,
}

/// Abstract syntax of quantum while-programs.
#[derive(Debug, Clone)]
pub enum QProgram {
    Skip,
    Abort,
    Reset(usize),
    Unitary {
        name: String,
        regs: Vec<usize>,
        matrix: CMat,
    },
    Seq(Box<QProgram>, Box<QProgram>),
    Case {
        meas: AppliedMeasurement,
        branches: BTreeMap<usize, QProgram>,
    },
    While {
        meas: AppliedMeasurement,
        body: Box<QProgram>,
    },
}

impl QProgram {
    pub fn seq(a: QProgram, b: QProgram) -> QProgram {
        QProgram::Seq(Box::new(a), Box::new(b))
    }

    /// Sequences a list of statements; empty list is `skip`.
    pub fn seq_all(mut stmts: Vec<QProgram>) -> QProgram {
        match stmts.len() {
            0 => QProgram::Skip,
            1 => stmts.pop().unwrap(),
            _ => {
                let mut it = stmts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, QProgram::seq)
            }
        }
    }

    pub fn while_count(&self) -> usize {
        match self {
            QProgram::Skip | QProgram::Abort | QProgram::Reset(_) | QProgram::Unitary { .. } => 0,
            QProgram::Seq(a, b) => a.while_count() + b.while_count(),
            QProgram::Case { branches, .. } => {
                branches.values().map(QProgram::while_count).sum()
            }
            QProgram::While { body, .. } => 1 + body.while_count(),
        }
    }

    pub fn is_while_free(&self) -> bool {
        self.while_count() == 0
    }

    /// Concrete syntax, one statement chain.
    pub fn to_text(&self, layout: &VariableLayout) -> String {
        let mut out = String::new();
        self.write_text(layout, 0, &mut out);
        out
    }

    fn write_text(&self, layout: &VariableLayout, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            QProgram::Skip => {
                let _ = write!(out, "{pad}skip");
            }
            QProgram::Abort => {
                let _ = write!(out, "{pad}abort");
            }
            QProgram::Reset(r) => {
                let _ = write!(out, "{pad}{} := |0>", layout.name_of(*r));
            }
            QProgram::Unitary { name, regs, .. } => {
                let rs: Vec<&str> = regs.iter().map(|&r| layout.name_of(r)).collect();
                let _ = write!(out, "{pad}{} := {}[{}]", rs.join(", "), name, rs.join(", "));
            }
            QProgram::Seq(a, b) => {
                a.write_text(layout, indent, out);
                out.push_str(";\n");
                b.write_text(layout, indent, out);
            }
            QProgram::Case { meas, branches } => {
                let rs: Vec<&str> = meas.regs.iter().map(|&r| layout.name_of(r)).collect();
                let _ = write!(out, "{pad}case {}[{}] {{\n", meas.name, rs.join(", "));
                for (i, p) in branches {
                    let _ = write!(out, "{pad}  {i} ->\n");
                    p.write_text(layout, indent + 2, out);
                    out.push_str(";\n");
                }
                let _ = write!(out, "{pad}}} end");
            }
            QProgram::While { meas, body } => {
                let rs: Vec<&str> = meas.regs.iter().map(|&r| layout.name_of(r)).collect();
                let _ = write!(out, "{pad}while {}[{}]=1 do\n", meas.name, rs.join(", "));
                body.write_text(layout, indent + 1, out);
                out.push_str("\n");
                let _ = write!(out, "{pad}done");
            }
        }
    }
}

/// Accumulates Kraus operators of a superoperator sum, reducing to
/// canonical form whenever the list grows past a threshold.
pub(crate) struct KrausAccumulator {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
    threshold: usize,
}

impl KrausAccumulator {
    pub fn new(dim_in: usize, dim_out: usize) -> Self {
        KrausAccumulator {
            dim_in,
            dim_out,
            kraus: Vec::new(),
            threshold: (2 * dim_in.max(dim_out)).max(48),
        }
    }

    pub fn push(&mut self, term: &Superoperator) {
        self.kraus.extend(term.kraus().iter().cloned());
        if self.kraus.len() > self.threshold {
            self.reduce();
        }
    }

    fn reduce(&mut self) {
        let mut e = Superoperator::from_kraus(std::mem::take(&mut self.kraus))
            .expect("accumulator non-empty");
        e.reduce_kraus();
        self.kraus = e.kraus().to_vec();
    }

    pub fn finish(mut self) -> Superoperator {
        if self.kraus.is_empty() {
            return Superoperator::zero(self.dim_in);
        }
        self.reduce();
        let _ = self.dim_out;
        Superoperator::from_kraus(self.kraus).expect("non-empty")
    }
}

/// Outcome of a truncated infinite sum: the partial sum plus either
/// convergence or the residual left after `max_terms` terms.
#[derive(Debug, Clone)]
pub struct TruncatedSum {
    pub superop: Superoperator,
    pub converged: bool,
    pub terms: usize,
    pub residual: f64,
}

/// Truncated sum Σₙ (step)ⁿ;tail — shared by loop semantics and star
/// interpretation. Terms accumulate until the n-th term's Choi trace
/// drops below `policy.tol`.
pub(crate) fn star_sum(
    step: &Superoperator,
    tail: Option<&Superoperator>,
    policy: ConvergencePolicy,
) -> Result<TruncatedSum, QuantumError> {
    let dim = step.in_dim();
    let mut acc = KrausAccumulator::new(dim, dim);
    let mut cur = Superoperator::identity(dim);
    let mut n = 0;
    loop {
        let term = match tail {
            Some(t) => cur.then(t)?,
            None => cur.clone(),
        };
        acc.push(&term);
        let residual = term.choi_trace();
        if residual < policy.tol {
            return Ok(TruncatedSum {
                superop: acc.finish(),
                converged: true,
                terms: n,
                residual,
            });
        }
        if n == policy.max_terms {
            return Ok(TruncatedSum {
                superop: acc.finish(),
                converged: false,
                terms: n,
                residual,
            });
        }
        cur = cur.then(step)?;
        cur.reduce_kraus();
        n += 1;
    }
}

/// Denotational semantics of `p` as a superoperator on the layout's
/// global space. While-loops are evaluated as truncated partial sums.
pub fn denote(
    p: &QProgram,
    layout: &VariableLayout,
    policy: ConvergencePolicy,
) -> Result<Superoperator, ProgramError> {
    let total = layout.total_dim();
    match p {
        QProgram::Skip => Ok(Superoperator::identity(total)),
        QProgram::Abort => Ok(Superoperator::zero(total)),
        QProgram::Reset(r) => Ok(reset_superop(layout, *r)?),
        QProgram::Unitary { regs, matrix, .. } => {
            Ok(Superoperator::unitary(&layout.lift(regs, matrix)?))
        }
        QProgram::Seq(a, b) => {
            let da = denote(a, layout, policy)?;
            let db = denote(b, layout, policy)?;
            Ok(da.then(&db)?)
        }
        QProgram::Case { meas, branches } => {
            let mut acc = KrausAccumulator::new(total, total);
            for (i, branch_prog) in branches {
                let m = measurement_branch(layout, meas, *i)?;
                let d = denote(branch_prog, layout, policy)?;
                acc.push(&m.then(&d)?);
            }
            Ok(acc.finish())
        }
        QProgram::While { meas, body } => {
            if meas.meas.n_outcomes() != 2 {
                return Err(ProgramError::BadLoopMeasurement(meas.meas.n_outcomes()));
            }
            let m0 = measurement_branch(layout, meas, 0)?;
            let m1 = measurement_branch(layout, meas, 1)?;
            let b = denote(body, layout, policy)?;
            let step = m1.then(&b)?;
            let sum = star_sum(&step, Some(&m0), policy)?;
            if sum.converged {
                Ok(sum.superop)
            } else {
                Err(ProgramError::NonConvergent {
                    terms: sum.terms,
                    residual: sum.residual,
                })
            }
        }
    }
}

/// ρ ↦ Σᵢ |0⟩⟨i| ρ |i⟩⟨0| on register `r`, lifted.
pub fn reset_superop(layout: &VariableLayout, r: usize) -> Result<Superoperator, ProgramError> {
    let d = layout.dim_of(r);
    let kraus = (0..d)
        .map(|i| layout.lift(&[r], &ketbra(d, 0, i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Superoperator::from_kraus(kraus)?)
}

/// The sub-normalized branch ρ ↦ Mᵢ ρ Mᵢ† of an applied measurement.
pub fn measurement_branch(
    layout: &VariableLayout,
    meas: &AppliedMeasurement,
    outcome: usize,
) -> Result<Superoperator, ProgramError> {
    let op = layout.lift(&meas.regs, &meas.meas.ops()[outcome])?;
    Ok(Superoperator::from_kraus(vec![op])?)
}

/// Elementary-statement key used by the encoder setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementaryKey {
    Reset(usize),
    Unitary(String, Vec<usize>),
    MeasBranch(String, Vec<usize>, usize),
}

impl ElementaryKey {
    fn describe(&self, layout: &VariableLayout) -> String {
        match self {
            ElementaryKey::Reset(r) => format!("reset {}", layout.name_of(*r)),
            ElementaryKey::Unitary(n, regs) => {
                let rs: Vec<&str> = regs.iter().map(|&r| layout.name_of(r)).collect();
                format!("{}[{}]", n, rs.join(","))
            }
            ElementaryKey::MeasBranch(n, regs, i) => {
                let rs: Vec<&str> = regs.iter().map(|&r| layout.name_of(r)).collect();
                format!("{}[{}] outcome {}", n, rs.join(","), i)
            }
        }
    }
}

/// Injective assignment of symbols to the elementary superoperators of
/// the target programs, plus the lifted superoperator of each symbol
/// (which is exactly the inverse map needed for interpretation).
#[derive(Debug, Clone, Default)]
pub struct EncoderSetting {
    by_key: HashMap<ElementaryKey, Symbol>,
    eval: HashMap<Symbol, Superoperator>,
}

impl EncoderSetting {
    /// Builds an encoder covering all elementary statements of `programs`,
    /// declaring fresh action symbols in `alphabet` with readable names.
    pub fn auto(
        programs: &[&QProgram],
        layout: &VariableLayout,
        alphabet: &mut Alphabet,
    ) -> Result<Self, ProgramError> {
        let mut setting = EncoderSetting::default();
        for p in programs {
            setting.cover(p, layout, alphabet)?;
        }
        Ok(setting)
    }

    fn fresh_symbol(
        &self,
        alphabet: &mut Alphabet,
        base: String,
    ) -> Result<Symbol, ProgramError> {
        let mut name = base.clone();
        let mut k = 1;
        while alphabet.lookup(&name).is_some() {
            name = format!("{base}_{k}");
            k += 1;
        }
        Ok(alphabet.declare_action(&name)?)
    }

    fn insert(
        &mut self,
        key: ElementaryKey,
        base_name: String,
        superop: Superoperator,
        alphabet: &mut Alphabet,
    ) -> Result<(), ProgramError> {
        if self.by_key.contains_key(&key) {
            return Ok(());
        }
        let sym = self.fresh_symbol(alphabet, base_name)?;
        self.by_key.insert(key, sym);
        self.eval.insert(sym, superop);
        Ok(())
    }

    fn cover(
        &mut self,
        p: &QProgram,
        layout: &VariableLayout,
        alphabet: &mut Alphabet,
    ) -> Result<(), ProgramError> {
        match p {
            QProgram::Skip | QProgram::Abort => Ok(()),
            QProgram::Reset(r) => self.insert(
                ElementaryKey::Reset(*r),
                format!("r_{}", sanitize(layout.name_of(*r))),
                reset_superop(layout, *r)?,
                alphabet,
            ),
            QProgram::Unitary { name, regs, matrix } => self.insert(
                ElementaryKey::Unitary(name.clone(), regs.clone()),
                format!("u_{}", sanitize(name)),
                Superoperator::unitary(&layout.lift(regs, matrix)?),
                alphabet,
            ),
            QProgram::Seq(a, b) => {
                self.cover(a, layout, alphabet)?;
                self.cover(b, layout, alphabet)
            }
            QProgram::Case { meas, branches } => {
                for i in branches.keys() {
                    self.insert(
                        ElementaryKey::MeasBranch(meas.name.clone(), meas.regs.clone(), *i),
                        format!("m_{}{}", sanitize(&meas.name), i),
                        measurement_branch(layout, meas, *i)?,
                        alphabet,
                    )?;
                }
                branches
                    .values()
                    .try_for_each(|b| self.cover(b, layout, alphabet))
            }
            QProgram::While { meas, body } => {
                for i in [0usize, 1] {
                    self.insert(
                        ElementaryKey::MeasBranch(meas.name.clone(), meas.regs.clone(), i),
                        format!("m_{}{}", sanitize(&meas.name), i),
                        measurement_branch(layout, meas, i)?,
                        alphabet,
                    )?;
                }
                self.cover(body, layout, alphabet)
            }
        }
    }

    pub fn symbol(&self, key: &ElementaryKey) -> Option<Symbol> {
        self.by_key.get(key).copied()
    }

    /// The `eval` table mapping each symbol back to its superoperator.
    pub fn eval_table(&self) -> &HashMap<Symbol, Superoperator> {
        &self.eval
    }

    /// Human-readable symbol table.
    pub fn describe(&self, layout: &VariableLayout, alphabet: &Alphabet) -> Vec<(String, String)> {
        let mut rows: Vec<(String, String)> = self
            .by_key
            .iter()
            .map(|(k, s)| (alphabet.name(*s).to_string(), k.describe(layout)))
            .collect();
        rows.sort();
        rows
    }
}

fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if !s.chars().next().map(|c| c.is_ascii_alphabetic()).unwrap_or(false) {
        s.insert(0, 'x');
    }
    s.to_lowercase()
}

/// Structural translation of a program into an expression:
/// skip ↦ 1, abort ↦ 0, sequencing ↦ product, case ↦ Σᵢ mᵢ·enc(Pᵢ),
/// while ↦ (m₁·enc(P))*·m₀.
pub fn encode(p: &QProgram, setting: &EncoderSetting) -> Result<Expr, ProgramError> {
    let get = |key: ElementaryKey, what: String| -> Result<Expr, ProgramError> {
        setting
            .symbol(&key)
            .map(Expr::Atom)
            .ok_or(ProgramError::MissingEncoderEntry(what))
    };
    match p {
        QProgram::Skip => Ok(Expr::One),
        QProgram::Abort => Ok(Expr::Zero),
        QProgram::Reset(r) => get(ElementaryKey::Reset(*r), format!("reset of register {r}")),
        QProgram::Unitary { name, regs, .. } => get(
            ElementaryKey::Unitary(name.clone(), regs.clone()),
            name.clone(),
        ),
        QProgram::Seq(a, b) => Ok(Expr::prod(vec![
            encode(a, setting)?,
            encode(b, setting)?,
        ])),
        QProgram::Case { meas, branches } => {
            let mut terms = Vec::new();
            for (i, branch) in branches {
                let m = get(
                    ElementaryKey::MeasBranch(meas.name.clone(), meas.regs.clone(), *i),
                    format!("{} outcome {}", meas.name, i),
                )?;
                terms.push(Expr::prod(vec![m, encode(branch, setting)?]));
            }
            Ok(Expr::sum(terms))
        }
        QProgram::While { meas, body } => {
            let m0 = get(
                ElementaryKey::MeasBranch(meas.name.clone(), meas.regs.clone(), 0),
                format!("{} outcome 0", meas.name),
            )?;
            let m1 = get(
                ElementaryKey::MeasBranch(meas.name.clone(), meas.regs.clone(), 1),
                format!("{} outcome 1", meas.name),
            )?;
            Ok(Expr::prod(vec![
                Expr::star(Expr::prod(vec![m1, encode(body, setting)?])),
                m0,
            ]))
        }
    }
}

/// Tables of named unitaries and measurements plus the layout — the JSON
/// container accompanying program text.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProgramContainer {
    pub layout: Vec<(String, usize)>,
    #[serde(default)]
    pub unitaries: BTreeMap<String, crate::quantum::MatrixJson>,
    #[serde(default)]
    pub measurements: BTreeMap<String, crate::quantum::MeasurementJson>,
    #[serde(default)]
    pub program: String,
}

impl ProgramContainer {
    pub fn layout(&self) -> Result<VariableLayout, ProgramError> {
        VariableLayout::new(self.layout.clone())
    }

    pub fn parse(&self) -> Result<(VariableLayout, QProgram), ProgramError> {
        let layout = self.layout()?;
        let tables = parse::Tables::from_container(self)?;
        let prog = parse_program(&self.program, &layout, &tables)?;
        Ok((layout, prog))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{choi_distance, cscalar, max_abs, DensityOperator};

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[cscalar(0.0), cscalar(1.0), cscalar(1.0), cscalar(0.0)])
    }

    fn qubit_layout() -> VariableLayout {
        VariableLayout::new(vec![("q".into(), 2)]).unwrap()
    }

    fn comp_meas(layout: &VariableLayout, reg: usize) -> AppliedMeasurement {
        AppliedMeasurement {
            name: "M".into(),
            regs: vec![reg],
            meas: Measurement::computational(layout.dim_of(reg)),
        }
    }

    #[test]
    fn skip_is_identity_and_abort_zero() {
        let layout = qubit_layout();
        let policy = ConvergencePolicy::default();
        let skip = denote(&QProgram::Skip, &layout, policy).unwrap();
        assert!(choi_distance(&skip, &Superoperator::identity(2)) < 1e-12);
        let abort = denote(&QProgram::Abort, &layout, policy).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        assert!(max_abs(&abort.apply_mat(rho.matrix()).unwrap()) < 1e-15);
    }

    #[test]
    fn while_flip_once() {
        // M1 = |0⟩⟨0|, M0 = |1⟩⟨1|, body X: on |0⟩ the loop runs exactly
        // once and exits in |1⟩.
        let layout = qubit_layout();
        let meas = AppliedMeasurement {
            name: "M".into(),
            regs: vec![0],
            meas: Measurement::new(vec![ketbra(2, 1, 1), ketbra(2, 0, 0)], 1e-9).unwrap(),
        };
        let body = QProgram::Unitary {
            name: "X".into(),
            regs: vec![0],
            matrix: pauli_x(),
        };
        let w = QProgram::While {
            meas,
            body: Box::new(body),
        };
        let e = denote(&w, &layout, ConvergencePolicy::default()).unwrap();
        let out = e.apply_mat(&ketbra(2, 0, 0)).unwrap();
        assert!(max_abs(&(out - ketbra(2, 1, 1))) < 1e-12);
    }

    #[test]
    fn nonconvergent_loop_reported() {
        // The loop leaks amplitude at rate sin²(0.01) per round, far too
        // slowly for 50 partial-sum terms at tol 1e-12.
        let layout = qubit_layout();
        let theta = 0.01f64;
        let rot = CMat::from_row_slice(
            2,
            2,
            &[
                cscalar(theta.cos()),
                cscalar(-theta.sin()),
                cscalar(theta.sin()),
                cscalar(theta.cos()),
            ],
        );
        let meas = AppliedMeasurement {
            name: "M".into(),
            regs: vec![0],
            meas: Measurement::new(vec![ketbra(2, 1, 1), ketbra(2, 0, 0)], 1e-9).unwrap(),
        };
        let w = QProgram::While {
            meas,
            body: Box::new(QProgram::Unitary {
                name: "R".into(),
                regs: vec![0],
                matrix: rot,
            }),
        };
        let policy = ConvergencePolicy {
            tol: 1e-12,
            max_terms: 50,
        };
        match denote(&w, &layout, policy) {
            Err(ProgramError::NonConvergent { .. }) => {}
            other => panic!("expected NonConvergent, got {other:?}"),
        }
    }

    #[test]
    fn seq_skip_is_noop() {
        let layout = qubit_layout();
        let p = QProgram::Unitary {
            name: "X".into(),
            regs: vec![0],
            matrix: pauli_x(),
        };
        let seq = QProgram::seq(p.clone(), QProgram::Skip);
        let policy = ConvergencePolicy::default();
        let d1 = denote(&p, &layout, policy).unwrap();
        let d2 = denote(&seq, &layout, policy).unwrap();
        assert!(choi_distance(&d1, &d2) < 1e-12);
    }

    #[test]
    fn case_with_full_measurement_preserves_trace() {
        let layout = qubit_layout();
        let mut branches = BTreeMap::new();
        branches.insert(0, QProgram::Skip);
        branches.insert(
            1,
            QProgram::Unitary {
                name: "X".into(),
                regs: vec![0],
                matrix: pauli_x(),
            },
        );
        let p = QProgram::Case {
            meas: comp_meas(&layout, 0),
            branches,
        };
        let e = denote(&p, &layout, ConvergencePolicy::default()).unwrap();
        assert!(e.validate(1e-9).trace_preserving);
    }

    #[test]
    fn reset_on_two_registers() {
        let layout = VariableLayout::new(vec![("a".into(), 2), ("b".into(), 2)]).unwrap();
        let p = QProgram::Reset(1);
        let e = denote(&p, &layout, ConvergencePolicy::default()).unwrap();
        // |11⟩⟨11| resets to |10⟩⟨10|.
        let out = e.apply_mat(&ketbra(4, 3, 3)).unwrap();
        assert!(max_abs(&(out - ketbra(4, 2, 2))) < 1e-12);
    }

    #[test]
    fn lift_respects_register_order() {
        let layout = VariableLayout::new(vec![("a".into(), 2), ("b".into(), 2)]).unwrap();
        // CNOT written on [b, a]: control b, target a.
        let mut cnot = CMat::zeros(4, 4);
        cnot[(0, 0)] = cscalar(1.0);
        cnot[(1, 1)] = cscalar(1.0);
        cnot[(2, 3)] = cscalar(1.0);
        cnot[(3, 2)] = cscalar(1.0);
        let lifted = layout.lift(&[1, 0], &cnot).unwrap();
        // Global basis |a b⟩: control b=1 flips a: |01⟩ → |11⟩.
        let mut v = CMat::zeros(4, 1);
        v[(1, 0)] = cscalar(1.0);
        let out = &lifted * &v;
        assert!((out[(3, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encode_shapes() {
        let layout = qubit_layout();
        let mut alphabet = Alphabet::new();
        let body = QProgram::Unitary {
            name: "X".into(),
            regs: vec![0],
            matrix: pauli_x(),
        };

        let w = QProgram::While {
            meas: comp_meas(&layout, 0),
            body: Box::new(body.clone()),
        };
        let setting = EncoderSetting::auto(&[&w], &layout, &mut alphabet).unwrap();
        let e = encode(&w, &setting).unwrap();
        assert_eq!(alphabet.print(&e), "(m_m1 u_x)* m_m0");

        assert_eq!(encode(&QProgram::Skip, &setting).unwrap(), Expr::One);
        assert_eq!(encode(&QProgram::Abort, &setting).unwrap(), Expr::Zero);

        let mut branches = BTreeMap::new();
        branches.insert(0, QProgram::Skip);
        branches.insert(1, body);
        let case = QProgram::Case {
            meas: comp_meas(&layout, 0),
            branches,
        };
        // The unit stays explicit: Enc(case) = m₀·Enc(skip) + m₁·Enc(X).
        let e = encode(&case, &setting).unwrap();
        assert_eq!(alphabet.print(&e), "m_m0 1 + m_m1 u_x");
    }
}
