//! Quantum interpretation of expressions: `0 ↦ O`, `1 ↦ I`, atoms ↦
//! lifted superoperators, `+` ↦ sum, `·` ↦ left-to-right composition,
//! `*` ↦ truncated partial sums with an explicit convergence certificate.
//!
//! The dual interpretation reverses composition order and maps atoms to
//! their Schrödinger–Heisenberg duals. The completeness construction
//! builds the string-indexed interpretation whose action reproduces
//! series coefficients exactly.

use crate::program::{
    denote, encode, star_sum, EncoderSetting, ProgramError, QProgram, VariableLayout,
};
use crate::quantum::{
    choi_distance, cscalar, CMat, ConvergencePolicy, QuantumError, Superoperator,
};
use crate::series::extnat::{ExtNat, Fin};
use crate::syntax::{Alphabet, Expr, Symbol};
use std::collections::HashMap;

pub use crate::quantum::ConvergencePolicy as Policy;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterpError {
    #[error("no evaluation for symbol `{0}`")]
    MissingSymbol(String),
    #[error("symbol `{0}` maps to a superoperator of dim {1}, setting dim is {2}")]
    WrongDim(String, usize, usize),
    #[error("symbol superoperator for `{0}` is not trace-non-increasing")]
    NotTni(String),
    #[error("infinite coefficient at word index {0}; both sides must be finite")]
    InfiniteCoefficient(usize),
    #[error("start string longer than the space bound")]
    StartTooLong,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

/// A pair (dim, eval) assigning a trace-non-increasing superoperator to
/// every symbol it covers.
#[derive(Debug, Clone)]
pub struct InterpretationSetting {
    dim: usize,
    eval: HashMap<Symbol, Superoperator>,
}

impl InterpretationSetting {
    pub fn new(
        dim: usize,
        eval: HashMap<Symbol, Superoperator>,
        alphabet: &Alphabet,
        tol: f64,
    ) -> Result<Self, InterpError> {
        for (sym, e) in &eval {
            let name = alphabet.name(*sym).to_string();
            if e.in_dim() != dim || e.out_dim() != dim {
                return Err(InterpError::WrongDim(name, e.in_dim(), dim));
            }
            if !e.is_trace_non_increasing(tol) {
                return Err(InterpError::NotTni(name));
            }
        }
        Ok(InterpretationSetting { dim, eval })
    }

    /// Skips per-symbol validation; for settings built by construction.
    pub fn new_unchecked(dim: usize, eval: HashMap<Symbol, Superoperator>) -> Self {
        InterpretationSetting { dim, eval }
    }

    /// The interpretation induced by an encoder setting: each symbol maps
    /// back to the elementary superoperator it encodes.
    pub fn from_encoder(setting: &EncoderSetting, layout: &VariableLayout) -> Self {
        InterpretationSetting {
            dim: layout.total_dim(),
            eval: setting.eval_table().clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, sym: Symbol) -> Option<&Superoperator> {
        self.eval.get(&sym)
    }

    pub fn insert(&mut self, sym: Symbol, e: Superoperator) {
        self.eval.insert(sym, e);
    }
}

/// Convergence certificate of an interpretation run. Divergence is a
/// first-class outcome, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Certificate {
    Converged,
    Diverged,
}

impl Certificate {
    pub fn converged(self) -> bool {
        self == Certificate::Converged
    }

    fn and(self, other: Certificate) -> Certificate {
        if self.converged() && other.converged() {
            Certificate::Converged
        } else {
            Certificate::Diverged
        }
    }
}

#[derive(Debug, Clone)]
pub struct Interpreted {
    pub superop: Superoperator,
    pub certificate: Certificate,
}

enum Mode {
    Primal,
    Dual,
}

fn interpret_rec(
    e: &Expr,
    int: &InterpretationSetting,
    policy: ConvergencePolicy,
    alphabet: &Alphabet,
    mode: &Mode,
) -> Result<Interpreted, InterpError> {
    let dim = int.dim;
    match e {
        Expr::Zero => Ok(Interpreted {
            superop: Superoperator::zero(dim),
            certificate: Certificate::Converged,
        }),
        Expr::One => Ok(Interpreted {
            superop: Superoperator::identity(dim),
            certificate: Certificate::Converged,
        }),
        Expr::Atom(sym) => {
            let base = int
                .eval(*sym)
                .ok_or_else(|| InterpError::MissingSymbol(alphabet.name(*sym).to_string()))?;
            let superop = match mode {
                Mode::Primal => base.clone(),
                Mode::Dual => base.dual(),
            };
            Ok(Interpreted {
                superop,
                certificate: Certificate::Converged,
            })
        }
        Expr::Sum(ts) => {
            let mut parts = ts
                .iter()
                .map(|t| interpret_rec(t, int, policy, alphabet, mode));
            let mut acc = parts.next().unwrap()?;
            for p in parts {
                let p = p?;
                acc = Interpreted {
                    superop: acc.superop.sum(&p.superop)?,
                    certificate: acc.certificate.and(p.certificate),
                };
            }
            Ok(acc)
        }
        Expr::Prod(ts) => {
            let mut parts = ts
                .iter()
                .map(|t| interpret_rec(t, int, policy, alphabet, mode));
            let mut acc = parts.next().unwrap()?;
            for p in parts {
                let p = p?;
                // Dual interpretation composes in the reverse order.
                let superop = match mode {
                    Mode::Primal => acc.superop.then(&p.superop)?,
                    Mode::Dual => p.superop.then(&acc.superop)?,
                };
                acc = Interpreted {
                    superop,
                    certificate: acc.certificate.and(p.certificate),
                };
            }
            Ok(acc)
        }
        Expr::Star(f) => {
            let inner = interpret_rec(f, int, policy, alphabet, mode)?;
            let sum = star_sum(&inner.superop, None, policy)?;
            let star_cert = if sum.converged {
                Certificate::Converged
            } else {
                Certificate::Diverged
            };
            Ok(Interpreted {
                superop: sum.superop,
                certificate: inner.certificate.and(star_cert),
            })
        }
    }
}

/// Compositional quantum interpretation of `e`.
pub fn interpret(
    e: &Expr,
    int: &InterpretationSetting,
    policy: ConvergencePolicy,
    alphabet: &Alphabet,
) -> Result<Interpreted, InterpError> {
    interpret_rec(e, int, policy, alphabet, &Mode::Primal)
}

/// Dual interpretation: atoms map to dual superoperators and products
/// compose in reverse order.
pub fn dual_interpret(
    e: &Expr,
    int: &InterpretationSetting,
    policy: ConvergencePolicy,
    alphabet: &Alphabet,
) -> Result<Interpreted, InterpError> {
    interpret_rec(e, int, policy, alphabet, &Mode::Dual)
}

/// String-indexed Hilbert space of all words of length ≤ n over a finite
/// alphabet, with the evaluation `eval(a) = { |sa⟩⟨s|/√#ₐ }` whose action
/// reproduces series coefficients.
#[derive(Debug, Clone)]
pub struct CompletenessSpace {
    pub symbols: Vec<Symbol>,
    pub n: usize,
    words: Vec<Vec<Symbol>>,
    index: HashMap<Vec<Symbol>, usize>,
    setting: InterpretationSetting,
}

impl CompletenessSpace {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Number of strings s with s·a in the space: every word of length
    /// ≤ n−1, independent of the appended symbol.
    pub fn sharp(&self) -> usize {
        self.words.iter().filter(|w| w.len() <= self.n - 1).count()
    }

    /// Πᵢ #ₐᵢ over the letters of `word`.
    pub fn sharp_word(&self, word: &[Symbol]) -> f64 {
        (self.sharp() as f64).powi(word.len() as i32)
    }

    pub fn word_index(&self, word: &[Symbol]) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    pub fn setting(&self) -> &InterpretationSetting {
        &self.setting
    }
}

/// Builds the completeness-proof interpretation over `symbols` with word
/// length bound `n ≥ 1`.
pub fn completeness_setting(symbols: &[Symbol], n: usize) -> CompletenessSpace {
    assert!(n >= 1, "word length bound must be ≥ 1");
    let words = crate::series::enumerate_words(symbols, n);
    let index: HashMap<Vec<Symbol>, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let dim = words.len();
    let sharp = words.iter().filter(|w| w.len() <= n - 1).count();
    let inv_sqrt = cscalar(1.0 / (sharp as f64).sqrt());
    let mut eval = HashMap::new();
    for &a in symbols {
        let mut kraus = Vec::new();
        for s in words.iter().filter(|w| w.len() <= n - 1) {
            let mut sa = s.clone();
            sa.push(a);
            let target = index[&sa];
            let source = index[s];
            let mut k = CMat::zeros(dim, dim);
            k[(target, source)] = inv_sqrt;
            kraus.push(k);
        }
        eval.insert(a, Superoperator::from_kraus(kraus).expect("kraus"));
    }
    CompletenessSpace {
        symbols: symbols.to_vec(),
        n,
        words,
        index,
        setting: InterpretationSetting::new_unchecked(dim, eval),
    }
}

/// Checks the completeness-construction identity: interpreting `e` on
/// r·|s⟩⟨s| equals Σ_{st ∈ S} ⟦e⟧[t] · (r/#ₜ)·|st⟩⟨st|. Errors when any
/// relevant coefficient is infinite.
pub fn check_completeness_claim(
    e: &Expr,
    s: &[Symbol],
    r: f64,
    space: &CompletenessSpace,
    alphabet: &Alphabet,
    tol: f64,
) -> Result<bool, InterpError> {
    let start = space.word_index(s).ok_or(InterpError::StartTooLong)?;
    let dim = space.dim();

    let policy = ConvergencePolicy::default();
    let lhs_interp = interpret(e, space.setting(), policy, alphabet)?;
    let input = crate::quantum::ketbra(dim, start, start).scale(r);
    let lhs = lhs_interp.superop.apply_mat(&input)?;

    let mut rhs = CMat::zeros(dim, dim);
    for (idx, t) in space
        .words()
        .iter()
        .enumerate()
        .filter(|(_, t)| s.len() + t.len() <= space.n)
    {
        let mut st = s.to_vec();
        st.extend_from_slice(t);
        let target = space.word_index(&st).expect("length-bounded word");
        let c = crate::series::coeff(e, t);
        let weight = match c {
            Fin(k) => k as f64,
            ExtNat::Inf => return Err(InterpError::InfiniteCoefficient(idx)),
        };
        if weight != 0.0 {
            rhs[(target, target)] += cscalar(weight * r / space.sharp_word(t));
        }
    }
    Ok(crate::quantum::max_abs(&(lhs - rhs)) <= tol)
}

/// Report of an encoding-recovery comparison.
#[derive(Debug, Clone)]
pub struct EncRecoveryReport {
    pub matches: bool,
    pub distance: Option<f64>,
    pub interp_certificate: Certificate,
    pub denote_converged: bool,
}

/// Checks that interpreting the encoding of `p` under the inverse encoder
/// recovers the denotational semantics (Choi distance < tol with matching
/// convergence certificates).
pub fn check_enc_recovery(
    p: &QProgram,
    layout: &VariableLayout,
    setting: &EncoderSetting,
    alphabet: &Alphabet,
    policy: ConvergencePolicy,
    tol: f64,
) -> Result<EncRecoveryReport, InterpError> {
    let expr = encode(p, setting)?;
    let int = InterpretationSetting::from_encoder(setting, layout);
    let interp = interpret(&expr, &int, policy, alphabet)?;
    match denote(p, layout, policy) {
        Ok(den) => {
            let distance = choi_distance(&interp.superop, &den);
            Ok(EncRecoveryReport {
                matches: interp.certificate.converged() && distance < tol,
                distance: Some(distance),
                interp_certificate: interp.certificate,
                denote_converged: true,
            })
        }
        Err(ProgramError::NonConvergent { .. }) => Ok(EncRecoveryReport {
            matches: !interp.certificate.converged(),
            distance: None,
            interp_certificate: interp.certificate,
            denote_converged: false,
        }),
        Err(other) => Err(other.into()),
    }
}

/// Interpretation setting file: `{"dim": n, "eval": {symbol: superop}}`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SettingJson {
    pub dim: usize,
    pub eval: std::collections::BTreeMap<String, crate::quantum::SuperopJson>,
}

impl SettingJson {
    /// Resolves symbol names against (or declares them in) `alphabet`.
    pub fn to_setting(
        &self,
        alphabet: &mut Alphabet,
        tol: f64,
    ) -> Result<InterpretationSetting, InterpError> {
        let mut eval = HashMap::new();
        for (name, e) in &self.eval {
            let sym = match alphabet.lookup(name) {
                Some(s) => s,
                None => alphabet
                    .declare_action(name)
                    .map_err(|_| InterpError::MissingSymbol(name.clone()))?,
            };
            eval.insert(sym, e.to_superop()?);
        }
        InterpretationSetting::new(self.dim, eval, alphabet, tol)
    }
}
