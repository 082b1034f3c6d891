//! Seeded random generators for matrices, states, effects and channels.
//! Used by the randomized test suites and the `selftest` subcommand.

use super::{
    cscalar, dagger, identity, max_abs, CMat, DensityOperator, Effect, Measurement, Superoperator,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Prng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Prng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut Prng, rows: usize, cols: usize) -> CMat {
    use rand_distr::StandardNormal;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Haar-ish random unitary via QR of a Ginibre matrix.
pub fn unitary(rng: &mut Prng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phase convention so Q is unique given G.
    for i in 0..dim {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            let phase = d / cscalar(d.norm());
            for rix in 0..dim {
                q[(rix, i)] *= phase;
            }
        }
    }
    q
}

/// Random density operator with unit trace.
pub fn density(rng: &mut Prng, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim, dim);
    let mut rho = &g * dagger(&g);
    let tr: f64 = rho.diagonal().iter().map(|c| c.re).sum();
    rho /= cscalar(tr);
    DensityOperator::new(rho, 1e-9).expect("random density")
}

/// Random Hermitian matrix with entries of modest norm.
pub fn hermitian(rng: &mut Prng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    (&g + dagger(&g)).scale(0.5)
}

/// Random effect: Hermitian with spectrum inside [0, 1].
pub fn effect(rng: &mut Prng, dim: usize) -> Effect {
    let g = ginibre(rng, dim, dim);
    let p = &g * dagger(&g);
    let scale = max_abs(&p) * dim as f64;
    let a = p.scale(1.0 / scale.max(1e-12));
    Effect::new(a, 1e-9).expect("random effect")
}

/// Random trace-preserving channel with `n_kraus` Kraus operators
/// (normalized so that Σ K†K = I).
pub fn channel(rng: &mut Prng, dim: usize, n_kraus: usize) -> Superoperator {
    let raw: Vec<CMat> = (0..n_kraus.max(1))
        .map(|_| ginibre(rng, dim, dim))
        .collect();
    let mut s = CMat::zeros(dim, dim);
    for k in &raw {
        s += dagger(k) * k;
    }
    let inv_sqrt = herm_inv_sqrt(&s);
    let kraus = raw.into_iter().map(|k| k * &inv_sqrt).collect();
    Superoperator::from_kraus(kraus).expect("random channel")
}

/// Random trace-non-increasing map: a channel scaled by a factor < 1.
pub fn tni_superop(rng: &mut Prng, dim: usize, n_kraus: usize) -> Superoperator {
    let c = channel(rng, dim, n_kraus);
    let scale = rng.gen_range(0.3..1.0f64).sqrt();
    let kraus = c.kraus().iter().map(|k| k.scale(scale)).collect();
    Superoperator::from_kraus(kraus).expect("scaled channel")
}

/// Random projective measurement: a Haar unitary conjugating a random
/// partition of the computational projectors into `n_outcomes` groups.
pub fn projective_measurement(rng: &mut Prng, dim: usize, n_outcomes: usize) -> Measurement {
    assert!(n_outcomes >= 1 && n_outcomes <= dim);
    let u = unitary(rng, dim);
    // Assign each basis index a group, ensuring no group is empty.
    let mut groups: Vec<usize> = (0..dim).map(|i| i % n_outcomes).collect();
    for g in groups.iter_mut() {
        if rng.gen_bool(0.5) {
            *g = rng.gen_range(0..n_outcomes);
        }
    }
    for o in 0..n_outcomes {
        if !groups.contains(&o) {
            let i = rng.gen_range(0..dim);
            groups[i] = o;
        }
    }
    let ops = (0..n_outcomes)
        .map(|o| {
            let mut p = CMat::zeros(dim, dim);
            for (i, &g) in groups.iter().enumerate() {
                if g == o {
                    p[(i, i)] = cscalar(1.0);
                }
            }
            &u * p * dagger(&u)
        })
        .collect();
    Measurement::new(ops, 1e-9).expect("random projective measurement")
}

fn herm_inv_sqrt(m: &CMat) -> CMat {
    let sym = (m + dagger(m)).scale(0.5);
    let eig = sym.symmetric_eigen();
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, dim);
    for k in 0..dim {
        let lambda: f64 = eig.eigenvalues[k];
        if lambda <= 1e-14 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let w = 1.0 / lambda.sqrt();
        for r in 0..dim {
            for c in 0..dim {
                out[(r, c)] += v[r] * v[c].conj() * cscalar(w);
            }
        }
    }
    out
}

/// Spanning family of pure states: basis projectors plus the real and
/// imaginary superposition projectors for every index pair. Two CP maps
/// that agree on all of them are equal.
pub fn tomography_states(dim: usize) -> Vec<CMat> {
    let mut states = Vec::new();
    for i in 0..dim {
        states.push(super::ketbra(dim, i, i));
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut plus = CMat::zeros(dim, dim);
            plus[(i, i)] = cscalar(0.5);
            plus[(j, j)] = cscalar(0.5);
            plus[(i, j)] = cscalar(0.5);
            plus[(j, i)] = cscalar(0.5);
            states.push(plus);
            let mut plus_i = CMat::zeros(dim, dim);
            plus_i[(i, i)] = cscalar(0.5);
            plus_i[(j, j)] = cscalar(0.5);
            plus_i[(i, j)] = Complex64::new(0.0, -0.5);
            plus_i[(j, i)] = Complex64::new(0.0, 0.5);
            states.push(plus_i);
        }
    }
    states
}
