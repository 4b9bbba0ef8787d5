//! Small dense helpers over complex vectors.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Bilinear product `Σ u_i v_i`.
pub fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Hermitian product `Σ conj(u_i) v_i`.
pub fn hdot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(u: &[C64]) -> f64 {
    u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(u: &[C64]) -> f64 {
    u.iter().fold(0.0, |m, a| m.max(a.norm()))
}

pub fn add(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn sub(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn scale(u: &[C64], s: C64) -> Vec<C64> {
    u.iter().map(|a| a * s).collect()
}

/// `Σ c_k v_k` for vectors of equal length.
pub fn combine(terms: &[(C64, &[C64])]) -> Vec<C64> {
    let n = terms.first().map_or(0, |t| t.1.len());
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    out
}

pub fn real_vec(u: &[f64]) -> Vec<C64> {
    u.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Least-squares solution of `a x ≈ b` through the SVD; `None` when the
/// numerical rank is below the column count.
pub fn least_squares(a: &DMatrix<C64>, b: &DVector<C64>) -> Option<DVector<C64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return None;
    }
    let eps = smax * 1e-13 * (a.nrows().max(a.ncols()) as f64);
    if svd.singular_values.iter().any(|&s| s <= eps) {
        return None;
    }
    svd.solve(b, eps).ok()
}

/// Largest `|det|` over all 3×3 minors of a 3×n matrix given by rows.
pub fn max_minor3(r0: &[C64], r1: &[C64], r2: &[C64]) -> f64 {
    let n = r0.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let d = r0[i] * (r1[j] * r2[k] - r1[k] * r2[j])
                    - r0[j] * (r1[i] * r2[k] - r1[k] * r2[i])
                    + r0[k] * (r1[i] * r2[j] - r1[j] * r2[i]);
                best = best.max(d.norm());
            }
        }
    }
    best
}

/// Largest `|det|` over all 2×2 minors of a 2×n matrix given by rows.
pub fn max_minor2(r0: &[C64], r1: &[C64]) -> f64 {
    let n = r0.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max((r0[i] * r1[j] - r0[j] * r1[i]).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(
            3,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.5),
            ],
        );
        let x = DVector::from_vec(vec![C64::new(0.5, -1.0), C64::new(2.0, 0.25)]);
        let b = &a * &x;
        let got = least_squares(&a, &b).unwrap();
        assert!((got - x).norm() < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let one = C64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one, one, one, one]);
        let b = DVector::from_vec(vec![one, one]);
        assert!(least_squares(&a, &b).is_none());
    }

    #[test]
    fn minor3_of_dependent_rows_is_zero() {
        let r0: Vec<C64> = (0..5).map(|k| C64::new(k as f64, 1.0)).collect();
        let r1: Vec<C64> = (0..5).map(|k| C64::new(1.0, k as f64 * 0.5)).collect();
        let r2 = combine(&[(C64::new(2.0, 1.0), &r0), (C64::new(-1.0, 0.0), &r1)]);
        assert!(max_minor3(&r0, &r1, &r2) < 1e-12);
    }
}
