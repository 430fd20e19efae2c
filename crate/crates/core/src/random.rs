//! Seeded pseudo-random states and unitaries.
//!
//! Every generator takes an explicit RNG; [`stream_rng`] derives independent
//! per-item streams from a seed and counter so results do not depend on the
//! order items are evaluated in.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qcore::{CMat, DensityOp, C64};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG for item `counter` of a computation seeded with `seed`.
pub fn stream_rng(seed: u64, counter: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng
}

pub fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Approximately Haar-random unitary: Gram-Schmidt on the columns of a
/// complex Gaussian matrix, which fixes the phases of R's diagonal to be real
/// and positive.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
        // Two passes keep the columns orthonormal to working precision.
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    CMat::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Random density operator of the given rank (Wishart-style).
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityOp {
    let g = CMat::from_fn(dim, rank.max(1), |_, _| gaussian_c64(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityOp::new(m.scale_re(1.0 / tr).hermitian_part()).expect("Wishart matrices are states")
}

/// Random density operator with a random rank in `1..=dim`.
pub fn random_density_any_rank(dim: usize, rng: &mut impl Rng) -> DensityOp {
    let rank = rng.random_range(1..=dim);
    random_density(dim, rank, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TAU_NORM;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = seeded_rng(3);
        for dim in 1..6 {
            assert!(random_unitary(dim, &mut rng).is_unitary(TAU_NORM));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = random_unit_vector(3, &mut stream_rng(9, 4));
        let b = random_unit_vector(3, &mut stream_rng(9, 4));
        let c = random_unit_vector(3, &mut stream_rng(9, 5));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_density_has_requested_rank() {
        let mut rng = seeded_rng(1);
        let rho = random_density(4, 2, &mut rng);
        let (vals, _) = crate::qcore::eigh(rho.mat()).unwrap();
        assert!(vals[0].abs() < 1e-9 && vals[1].abs() < 1e-9 && vals[2] > 1e-6);
    }
}
