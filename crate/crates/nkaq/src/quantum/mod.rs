//! Desk-scale quantum linear algebra: dense complex matrices, density
//! operators, Kraus-form superoperators, the Löwner order, effects and
//! measurements.
//!
//! Everything is numeric (`f64`); order and validity checks take an
//! explicit tolerance, defaulting to [`DEFAULT_TOL`].

pub mod random;
mod serde_io;

pub use serde_io::{MatrixJson, MeasurementJson, SuperopJson};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// Default numeric tolerance for order and validation checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Truncation rule for infinite sums (loop semantics and star
/// evaluation): stop once a partial term's Choi trace drops below `tol`,
/// give up after `max_terms` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePolicy {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        ConvergencePolicy {
            tol: 1e-12,
            max_terms: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not Hermitian within tolerance (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace {0:.6} exceeds 1")]
    TraceTooLarge(f64),
    #[error("operator norm exceeds 1 (max eigenvalue {0:.6})")]
    NotSubIdentity(f64),
    #[error("measurement is not complete: ‖ΣM†M − I‖ = {0:.3e}")]
    IncompleteMeasurement(f64),
    #[error("empty Kraus list")]
    EmptyKraus,
}

pub fn cscalar(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// |i⟩⟨j| on a `dim`-dimensional space.
pub fn ketbra(dim: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(dim);
    m[(i, j)] = cscalar(1.0);
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn herm_deviation(m: &CMat) -> f64 {
    max_abs(&(m - dagger(m)))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && herm_deviation(m) <= tol
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is
/// symmetrized as (A+A†)/2 first to suppress numeric drift.
pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let sym = (m + dagger(m)).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    herm_eigenvalues(m)[0]
}

/// Löwner order: A ⊑ B iff B − A is positive semidefinite (min eigenvalue
/// ≥ −tol). Errors on non-Hermitian input.
pub fn loewner_leq(a: &CMat, b: &CMat, tol: f64) -> Result<bool, QuantumError> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(QuantumError::DimMismatch(format!(
            "{}×{} vs {}×{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    for m in [a, b] {
        let dev = herm_deviation(m);
        if dev > tol.max(1e-12) * 10.0 {
            return Err(QuantumError::NotHermitian(dev));
        }
    }
    Ok(min_eigenvalue(&(b - a)) >= -tol)
}

/// Partial density operator: Hermitian, PSD, trace ≤ 1 (all within tol).
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: CMat,
}

impl DensityOperator {
    pub fn new(mat: CMat, tol: f64) -> Result<Self, QuantumError> {
        let dev = herm_deviation(&mat);
        if dev > tol {
            return Err(QuantumError::NotHermitian(dev));
        }
        let min = min_eigenvalue(&mat);
        if min < -tol {
            return Err(QuantumError::NotPsd(min));
        }
        let tr = trace(&mat).re;
        if tr > 1.0 + tol {
            return Err(QuantumError::TraceTooLarge(tr));
        }
        Ok(DensityOperator { mat })
    }

    /// |i⟩⟨i| basis state.
    pub fn basis(dim: usize, i: usize) -> Self {
        DensityOperator {
            mat: ketbra(dim, i, i),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            mat: identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }
}

/// Quantum predicate: Hermitian with 0 ⊑ A ⊑ I.
#[derive(Debug, Clone)]
pub struct Effect {
    mat: CMat,
}

impl Effect {
    pub fn new(mat: CMat, tol: f64) -> Result<Self, QuantumError> {
        let dev = herm_deviation(&mat);
        if dev > tol {
            return Err(QuantumError::NotHermitian(dev));
        }
        let evs = herm_eigenvalues(&mat);
        let (min, max) = (evs[0], evs[evs.len() - 1]);
        if min < -tol {
            return Err(QuantumError::NotPsd(min));
        }
        if max > 1.0 + tol {
            return Err(QuantumError::NotSubIdentity(max));
        }
        Ok(Effect { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Effect {
            mat: identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Effect { mat: zeros(dim) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

/// Completely positive map in Kraus form, `E(ρ) = Σₖ Kₖ ρ Kₖ†`, with
/// Kraus operators of shape outDim×inDim.
#[derive(Debug, Clone)]
pub struct Superoperator {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMat>,
}

/// Validation report for a superoperator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SuperopReport {
    pub cp: bool,
    pub trace_non_increasing: bool,
    pub trace_preserving: bool,
}

impl Superoperator {
    pub fn from_kraus(kraus: Vec<CMat>) -> Result<Self, QuantumError> {
        let first = kraus.first().ok_or(QuantumError::EmptyKraus)?;
        let (out_dim, in_dim) = (first.nrows(), first.ncols());
        if kraus
            .iter()
            .any(|k| k.nrows() != out_dim || k.ncols() != in_dim)
        {
            return Err(QuantumError::DimMismatch(
                "inconsistent Kraus shapes".to_string(),
            ));
        }
        Ok(Superoperator {
            in_dim,
            out_dim,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![identity(dim)],
        }
    }

    /// The zero map, represented by a single zero Kraus operator.
    pub fn zero(dim: usize) -> Self {
        Superoperator {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![zeros(dim)],
        }
    }

    pub fn unitary(u: &CMat) -> Self {
        Superoperator {
            in_dim: u.ncols(),
            out_dim: u.nrows(),
            kraus: vec![u.clone()],
        }
    }

    /// Constant map ρ ↦ tr(ρ)·A for PSD A.
    pub fn constant(a: &CMat, tol: f64) -> Result<Self, QuantumError> {
        let dim = a.nrows();
        let sym = (a + dagger(a)).scale(0.5);
        let eig = sym.symmetric_eigen();
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -tol {
                return Err(QuantumError::NotPsd(lambda));
            }
            if lambda <= tol {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            for i in 0..dim {
                // √λ |v⟩⟨i|
                let mut m = zeros(dim);
                for r in 0..dim {
                    m[(r, i)] = v[r] * cscalar(lambda.sqrt());
                }
                kraus.push(m);
            }
        }
        if kraus.is_empty() {
            kraus.push(zeros(dim));
        }
        Ok(Superoperator {
            in_dim: dim,
            out_dim: dim,
            kraus,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn apply_mat(&self, rho: &CMat) -> Result<CMat, QuantumError> {
        if rho.nrows() != self.in_dim || rho.ncols() != self.in_dim {
            return Err(QuantumError::DimMismatch(format!(
                "superoperator input dim {} vs state dim {}",
                self.in_dim,
                rho.nrows()
            )));
        }
        let mut out = zeros(self.out_dim);
        for k in &self.kraus {
            out += k * rho * dagger(k);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator, QuantumError> {
        let mat = self.apply_mat(rho.matrix())?;
        // CP maps preserve positivity; clamp only numeric drift.
        DensityOperator::new(mat, 1e-7)
    }

    /// Sequential composition: `self` first, then `after` (the paper's
    /// E_self ∘ E_after).
    pub fn then(&self, after: &Superoperator) -> Result<Superoperator, QuantumError> {
        if self.out_dim != after.in_dim {
            return Err(QuantumError::DimMismatch(format!(
                "compose: {} vs {}",
                self.out_dim, after.in_dim
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for k2 in &after.kraus {
            for k1 in &self.kraus {
                kraus.push(k2 * k1);
            }
        }
        let mut composed = Superoperator {
            in_dim: self.in_dim,
            out_dim: after.out_dim,
            kraus,
        };
        composed.reduce_if_large();
        Ok(composed)
    }

    pub fn sum(&self, other: &Superoperator) -> Result<Superoperator, QuantumError> {
        if self.in_dim != other.in_dim || self.out_dim != other.out_dim {
            return Err(QuantumError::DimMismatch("sum".to_string()));
        }
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        let mut out = Superoperator {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus,
        };
        out.reduce_if_large();
        Ok(out)
    }

    pub fn tensor(&self, other: &Superoperator) -> Superoperator {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b));
            }
        }
        Superoperator {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            kraus,
        }
    }

    /// Schrödinger–Heisenberg dual: Kraus operators adjointed.
    pub fn dual(&self) -> Superoperator {
        Superoperator {
            in_dim: self.out_dim,
            out_dim: self.in_dim,
            kraus: self.kraus.iter().map(dagger).collect(),
        }
    }

    /// Σ K†K, the dual image of the identity.
    pub fn kraus_gram_total(&self) -> CMat {
        let mut s = zeros(self.in_dim);
        for k in &self.kraus {
            s += dagger(k) * k;
        }
        s
    }

    pub fn validate(&self, tol: f64) -> SuperopReport {
        let choi = self.choi();
        let cp = min_eigenvalue(&choi) >= -tol;
        let s = self.kraus_gram_total();
        let trace_non_increasing =
            loewner_leq(&s, &identity(self.in_dim), tol).unwrap_or(false);
        let trace_preserving = max_abs(&(&s - identity(self.in_dim))) <= tol;
        SuperopReport {
            cp,
            trace_non_increasing,
            trace_preserving,
        }
    }

    pub fn is_trace_non_increasing(&self, tol: f64) -> bool {
        loewner_leq(
            &self.kraus_gram_total(),
            &identity(self.in_dim),
            tol,
        )
        .unwrap_or(false)
    }

    /// Choi matrix Σᵢⱼ |i⟩⟨j| ⊗ E(|i⟩⟨j|); PSD iff the map is CP.
    pub fn choi(&self) -> CMat {
        let d = self.in_dim * self.out_dim;
        let mut c = CMat::zeros(d, d);
        for k in &self.kraus {
            let v = choi_vec(k);
            // c += v v†
            for (a, va) in v.iter().enumerate() {
                if va.norm_sqr() == 0.0 {
                    continue;
                }
                for (b, vb) in v.iter().enumerate() {
                    c[(a, b)] += va * vb.conj();
                }
            }
        }
        c
    }

    /// Σₖ ‖Kₖ‖²_F — the trace of the Choi matrix; dominates its largest
    /// entry in absolute value (the Choi matrix is PSD).
    pub fn choi_trace(&self) -> f64 {
        self.kraus.iter().map(|k| k.norm_squared()).sum()
    }

    /// Canonical Kraus form via the Gram matrix of vectorized Kraus
    /// operators; exact up to components of relative Choi mass ≤ 1e-15.
    pub fn reduce_kraus(&mut self) {
        if self.kraus.len() <= 1 {
            return;
        }
        let m = self.kraus.len();
        let mut gram = CMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                gram[(i, j)] = (dagger(&self.kraus[i]) * &self.kraus[j])
                    .diagonal()
                    .sum();
            }
        }
        let total: f64 = gram.diagonal().iter().map(|c| c.re).sum();
        let cutoff = total.max(1e-300) * 1e-15;
        let eig = gram.symmetric_eigen();
        let mut new_kraus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= cutoff {
                continue;
            }
            let w = eig.eigenvectors.column(k);
            let mut b = zeros_rect(self.out_dim, self.in_dim);
            for (i, kr) in self.kraus.iter().enumerate() {
                b += kr * w[i];
            }
            new_kraus.push(b);
        }
        if new_kraus.is_empty() {
            new_kraus.push(zeros_rect(self.out_dim, self.in_dim));
        }
        self.kraus = new_kraus;
    }

    fn reduce_if_large(&mut self) {
        let threshold = (2 * self.in_dim.max(self.out_dim)).max(48);
        if self.kraus.len() > threshold {
            self.reduce_kraus();
        }
    }
}

fn zeros_rect(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Vectorization used by the Choi matrix: v[(i·out)+k] = K[k,i].
fn choi_vec(k: &CMat) -> Vec<Complex64> {
    let (out, inp) = (k.nrows(), k.ncols());
    let mut v = vec![Complex64::default(); inp * out];
    for i in 0..inp {
        for r in 0..out {
            v[i * out + r] = k[(r, i)];
        }
    }
    v
}

/// Max-abs entry difference of the Choi matrices of two superoperators;
/// zero iff the maps are equal. Streams rows, so memory stays O(d²).
pub fn choi_distance(a: &Superoperator, b: &Superoperator) -> f64 {
    assert_eq!(a.in_dim, b.in_dim, "choi_distance: input dims differ");
    assert_eq!(a.out_dim, b.out_dim, "choi_distance: output dims differ");
    let d = a.in_dim * a.out_dim;
    let va: Vec<Vec<Complex64>> = a.kraus.iter().map(choi_vec).collect();
    let vb: Vec<Vec<Complex64>> = b.kraus.iter().map(choi_vec).collect();
    // Cheap Frobenius bound first: ‖C_a − C_b‖_max ≤ ‖C_a − C_b‖_F, and
    // the Frobenius norm is a Gram computation over the Kraus vectors.
    let gram = |x: &[Vec<Complex64>], y: &[Vec<Complex64>]| -> f64 {
        let mut s = 0.0;
        for vx in x {
            for vy in y {
                let ip: Complex64 = vx
                    .iter()
                    .zip(vy.iter())
                    .map(|(p, q)| p.conj() * q)
                    .sum();
                s += ip.norm_sqr();
            }
        }
        s
    };
    let frob2 = gram(&va, &va) + gram(&vb, &vb) - 2.0 * gram(&va, &vb);
    let frob = frob2.max(0.0).sqrt();
    if frob < 1e-11 {
        return frob;
    }
    let mut max = 0.0f64;
    for row in 0..d {
        let mut diff = vec![Complex64::default(); d];
        for v in &va {
            let f = v[row];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for (c, x) in diff.iter_mut().zip(v.iter()) {
                *c += f * x.conj();
            }
        }
        for v in &vb {
            let f = v[row];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for (c, x) in diff.iter_mut().zip(v.iter()) {
                *c -= f * x.conj();
            }
        }
        max = diff.iter().map(|c| c.norm()).fold(max, f64::max);
    }
    max
}

/// A quantum measurement {Mᵢ} with Σᵢ Mᵢ†Mᵢ = I.
#[derive(Debug, Clone)]
pub struct Measurement {
    ops: Vec<CMat>,
}

impl Measurement {
    pub fn new(ops: Vec<CMat>, tol: f64) -> Result<Self, QuantumError> {
        let m = Measurement::new_unchecked(ops)?;
        let dev = m.completeness_deviation();
        if dev > tol {
            return Err(QuantumError::IncompleteMeasurement(dev));
        }
        Ok(m)
    }

    pub fn new_unchecked(ops: Vec<CMat>) -> Result<Self, QuantumError> {
        let first = ops.first().ok_or(QuantumError::EmptyKraus)?;
        let dim = first.nrows();
        if ops.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(QuantumError::DimMismatch(
                "measurement operator shapes".to_string(),
            ));
        }
        Ok(Measurement { ops })
    }

    /// Two-outcome computational-basis measurement on one register:
    /// outcome 1 projects onto `ones`, outcome 0 onto the complement.
    pub fn projective_split(dim: usize, ones: &[usize]) -> Self {
        let mut m1 = zeros(dim);
        for &i in ones {
            m1[(i, i)] = cscalar(1.0);
        }
        let m0 = identity(dim) - &m1;
        Measurement { ops: vec![m0, m1] }
    }

    pub fn computational(dim: usize) -> Self {
        Measurement {
            ops: (0..dim).map(|i| ketbra(dim, i, i)).collect(),
        }
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn n_outcomes(&self) -> usize {
        self.ops.len()
    }

    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut s = zeros(dim);
        for m in &self.ops {
            s += dagger(m) * m;
        }
        max_abs(&(s - identity(dim)))
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        for (i, a) in self.ops.iter().enumerate() {
            for (j, b) in self.ops.iter().enumerate() {
                let prod = a * b;
                let expect = if i == j { a.clone() } else { zeros(self.dim()) };
                if max_abs(&(prod - expect)) > tol {
                    return false;
                }
            }
        }
        true
    }

    /// The (sub-normalized) branch superoperator ρ ↦ Mᵢ ρ Mᵢ†.
    pub fn branch(&self, i: usize) -> Superoperator {
        Superoperator {
            in_dim: self.dim(),
            out_dim: self.dim(),
            kraus: vec![self.ops[i].clone()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[cscalar(0.0), cscalar(1.0), cscalar(1.0), cscalar(0.0)])
    }

    #[test]
    fn kraus_x_flips_basis_state() {
        let e = Superoperator::unitary(&pauli_x());
        let rho = DensityOperator::basis(2, 0);
        let out = e.apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - ketbra(2, 1, 1))) < 1e-12);
    }

    #[test]
    fn projector_kraus_on_mixed_state() {
        let p0 = ketbra(2, 0, 0);
        let e = Superoperator::from_kraus(vec![p0.clone()]).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        let out = e.apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - p0.scale(0.5))) < 1e-12);
    }

    #[test]
    fn zero_kraus_maps_to_zero() {
        let e = Superoperator::zero(2);
        let rho = DensityOperator::maximally_mixed(2);
        let out = e.apply(&rho).unwrap();
        assert!(max_abs(out.matrix()) < 1e-15);
    }

    #[test]
    fn compose_x_x_is_identity() {
        let x = Superoperator::unitary(&pauli_x());
        let xx = x.then(&x).unwrap();
        assert!(choi_distance(&xx, &Superoperator::identity(2)) < 1e-12);
    }

    #[test]
    fn measurement_branch_sum_is_trace_preserving() {
        let m = Measurement::computational(2);
        let total = m.branch(0).sum(&m.branch(1)).unwrap();
        assert!(total.validate(1e-9).trace_preserving);
    }

    #[test]
    fn tensor_acts_on_second_factor() {
        let e = Superoperator::unitary(&pauli_x());
        let lifted = Superoperator::identity(2).tensor(&e);
        let rho = DensityOperator::basis(4, 0); // |00⟩⟨00|
        let out = lifted.apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - ketbra(4, 1, 1))) < 1e-12);
    }

    #[test]
    fn dual_of_unitary_is_inverse() {
        let u = Superoperator::unitary(&pauli_x());
        let d = u.dual();
        let roundtrip = u.then(&d).unwrap();
        assert!(choi_distance(&roundtrip, &Superoperator::identity(2)) < 1e-12);
    }

    #[test]
    fn loewner_basics() {
        let tol = 1e-9;
        assert!(loewner_leq(&zeros(2), &ketbra(2, 0, 0), tol).unwrap());
        assert!(loewner_leq(&ketbra(2, 0, 0), &identity(2), tol).unwrap());
        assert!(!loewner_leq(&identity(2), &ketbra(2, 0, 0), tol).unwrap());
        assert!(loewner_leq(&pauli_x(), &identity(2), tol).unwrap());
        let skew = CMat::from_row_slice(
            2,
            2,
            &[cscalar(0.0), cscalar(1.0), cscalar(0.0), cscalar(0.0)],
        );
        assert!(loewner_leq(&skew, &identity(2), tol).is_err());
    }

    #[test]
    fn validate_reports() {
        let branch = Superoperator::from_kraus(vec![ketbra(2, 0, 0)]).unwrap();
        let r = branch.validate(1e-9);
        assert!(r.cp && r.trace_non_increasing && !r.trace_preserving);

        let u = Superoperator::unitary(&pauli_x());
        let r = u.validate(1e-9);
        assert!(r.cp && r.trace_non_increasing && r.trace_preserving);

        let big = Superoperator::from_kraus(vec![identity(2).scale(2.0)]).unwrap();
        let r = big.validate(1e-9);
        assert!(r.cp && !r.trace_non_increasing);
    }

    #[test]
    fn constant_superop_action() {
        let a = ketbra(2, 1, 1).scale(0.5);
        let c = Superoperator::constant(&a, 1e-12).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        let out = c.apply_mat(rho.matrix()).unwrap();
        assert!(max_abs(&(out - a.scale(1.0))) < 1e-12);
        assert!(c.is_trace_non_increasing(1e-9));
    }

    #[test]
    fn reduce_kraus_preserves_map() {
        let mut e = Superoperator::from_kraus(vec![
            ketbra(2, 0, 0).scale(0.6),
            ketbra(2, 0, 0).scale(0.4),
            pauli_x().scale(0.3),
            ketbra(2, 1, 0).scale(0.2),
        ])
        .unwrap();
        let before = e.clone();
        e.reduce_kraus();
        assert!(e.kraus().len() <= before.kraus().len());
        assert!(choi_distance(&e, &before) < 1e-12);
    }

    #[test]
    fn choi_psd_for_cp_maps() {
        let m = Measurement::projective_split(4, &[1, 3]);
        let e = m.branch(1);
        assert!(min_eigenvalue(&e.choi()) > -1e-12);
    }
}
