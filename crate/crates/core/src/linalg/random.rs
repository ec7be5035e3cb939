//! Seeded random streams and random matrix ensembles.

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::matrix::ComplexMatrix;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic, splittable random stream.
///
/// Children derive their seed from the parent seed and a child index only,
/// so `child(i)` is reproducible regardless of how many values the parent
/// has drawn. `split()` hands out children with consecutive indices.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
    next_child: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed), next_child: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child(&self, index: u64) -> Self {
        Self::new(splitmix64(splitmix64(self.seed) ^ splitmix64(index.wrapping_add(1).wrapping_mul(GOLDEN))))
    }

    pub fn split(&mut self) -> Self {
        let c = self.child(self.next_child);
        self.next_child += 1;
        c
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Complex Gaussian with `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }

    /// Symmetric Dirichlet(1) draw: uniform on the probability simplex.
    pub fn dirichlet(&mut self, k: usize) -> Vec<f64> {
        loop {
            let w: Vec<f64> = (0..k).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = w.iter().sum();
            if total > 0.0 && w.iter().all(|&x| x > 0.0) {
                return w.into_iter().map(|x| x / total).collect();
            }
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Matrix of i.i.d. complex Gaussians (Ginibre ensemble).
pub fn ginibre(rows: usize, cols: usize, rng: &mut RandomStream) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of R
/// made positive. Modified Gram-Schmidt already yields a positive diagonal;
/// the second pass re-orthogonalizes to working precision.
pub fn haar_unitary(d: usize, rng: &mut RandomStream) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let z = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = (0..d).map(|j| z.column(j)).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: C64 = qk.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, q) in rest[0].iter_mut().zip(qk) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

/// Random Hermitian matrix `(G + G^dagger)/2` with Ginibre `G`.
pub fn random_hermitian(d: usize, rng: &mut RandomStream) -> ComplexMatrix {
    ginibre(d, d, rng).hermitian_part()
}
