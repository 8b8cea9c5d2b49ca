//! Seeded random objects: Haar states and unitaries, Hermitian and Ginibre
//! matrices, full-rank mixed states, random unital channels.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::QuantumChannel;
use crate::linalg::{
    eig_hermitian, partial_trace, ComplexMatrix, DensityMatrix, HermitianMatrix, Side, C64,
};

/// Odd 64-bit stride separating per-task seeds derived from one master seed.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for task `index` under master seed `seed`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(SEED_STRIDE))
}

/// Deterministic generator used for every random draw in the crate.
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Generator for task `index`, see [`derive_seed`].
    pub fn derived(seed: u64, index: u64) -> Self {
        Self::seeded(derive_seed(seed, index))
    }

    pub fn gauss(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    /// Standard complex Gaussian (unit variance overall).
    pub fn complex_gauss(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gauss() * s, self.gauss() * s)
    }

    pub fn gauss_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gauss()).collect()
    }
}

/// Haar-random unit vector in ℂ^d.
pub fn haar_vector(d: usize, rng: &mut Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| rng.complex_gauss()).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

pub fn haar_pure_state(d: usize, rng: &mut Rng) -> DensityMatrix {
    DensityMatrix::pure(&haar_vector(d, rng)).expect("nonzero Haar vector")
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(d: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| rng.complex_gauss())
}

/// `(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian(d: usize, rng: &mut Rng) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_part(&random_matrix(d, rng))
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let h = random_hermitian(d, rng).scale(2.0);
    let e = eig_hermitian(&h).expect("Jacobi converges on random Hermitian input");
    let u = &e.eigenvectors;
    let phases: Vec<C64> = e.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| u[(i, k)] * phases[k] * u[(j, k)].conj()).sum())
}

/// Random mixed state from the reduced Haar pure state on `ℂ^d ⊗ ℂ^d`.
pub fn random_mixed_state(d: usize, rng: &mut Rng) -> DensityMatrix {
    let psi = haar_vector(d * d, rng);
    let joint = ComplexMatrix::outer(&psi, &psi);
    let red = partial_trace(&joint, (d, d), Side::B).expect("square joint state");
    DensityMatrix::from_channel_output(&red)
}

/// Mixing weight toward `𝟏/d` used by [`random_full_rank_state`].
pub const FULL_RANK_DELTA: f64 = 1e-3;

/// `(1−δ)ρ + δ𝟏/d` with `ρ` from [`random_mixed_state`]; smallest eigenvalue ≥ δ/d.
pub fn random_full_rank_state(d: usize, rng: &mut Rng) -> DensityMatrix {
    let rho = random_mixed_state(d, rng);
    let mut m = rho.matrix().scale_real(1.0 - FULL_RANK_DELTA);
    m.axpy_real(FULL_RANK_DELTA / d as f64, &ComplexMatrix::identity(d));
    DensityMatrix::from_channel_output(&m)
}

/// Random mixture of `k` random unitaries: unital and trace preserving.
pub fn random_unital_channel(d: usize, k: usize, rng: &mut Rng) -> QuantumChannel {
    let w: Vec<f64> = (0..k).map(|_| rng.uniform() + 0.05).collect();
    let total: f64 = w.iter().sum();
    let kraus = w
        .iter()
        .map(|&wi| random_unitary(d, rng).scale_real((wi / total).sqrt()))
        .collect();
    QuantumChannel::new(kraus).expect("unitary mixtures are channels")
}
