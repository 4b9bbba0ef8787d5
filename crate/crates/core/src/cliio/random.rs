//! Seeded generators for period matrices and sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::theta::PeriodMatrix;
use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `τ`: symmetric real part with entries uniform in `[-1/2, 1/2]`,
/// imaginary part `AᵗA + I/2` with `A` uniform in `[-1, 1]`.
pub fn random_period_matrix(g: usize, rng: &mut SeededRng) -> PeriodMatrix {
    let mut re = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let x = rng.gen_range(-0.5..=0.5);
            re[i * g + j] = x;
            re[j * g + i] = x;
        }
    }
    let a: Vec<f64> = (0..g * g).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut flat = vec![C64::new(0.0, 0.0); g * g];
    for i in 0..g {
        for j in 0..g {
            let mut im: f64 = (0..g).map(|k| a[k * g + i] * a[k * g + j]).sum();
            if i == j {
                im += 0.5;
            }
            flat[i * g + j] = C64::new(re[i * g + j], im);
        }
    }
    PeriodMatrix::from_flat(g, &flat).expect("AᵗA + I/2 is positive definite")
}

/// Point `s + τ t` with `s, t` uniform in `[0, 1)^g`.
pub fn random_cell_point(tau: &PeriodMatrix, rng: &mut SeededRng) -> Vec<C64> {
    let g = tau.genus();
    let s: Vec<f64> = (0..g).map(|_| rng.gen_range(0.0..1.0)).collect();
    let t: Vec<f64> = (0..g).map(|_| rng.gen_range(0.0..1.0)).collect();
    tau.apply_real(&t).into_iter().zip(s).map(|(a, b)| a + b).collect()
}

/// Complex vector with real and imaginary parts uniform in `[-scale, scale]`.
pub fn random_complex_vector(g: usize, scale: f64, rng: &mut SeededRng) -> Vec<C64> {
    (0..g)
        .map(|_| C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale)))
        .collect()
}
