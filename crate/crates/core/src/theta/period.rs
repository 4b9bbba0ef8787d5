use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

const ASYMMETRY_LIMIT: f64 = 1e-9;

/// A point of the Siegel upper half space: symmetric complex `g×g` matrix
/// with positive-definite imaginary part.
///
/// Besides the (symmetrized) entries the struct caches what the lattice sums
/// need: `Im τ`, its inverse, its Cholesky factor and extreme eigenvalues.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    g: usize,
    tau: Vec<C64>,
    im: Vec<f64>,
    im_inv: Vec<f64>,
    // upper-triangular R with Im τ = RᵗR
    chol: Vec<f64>,
    lambda_min: f64,
    lambda_max: f64,
    det_im: f64,
}

impl PartialEq for PeriodMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.tau == other.tau
    }
}

/// Validate and symmetrize a raw square matrix.
pub fn validate_period_matrix(raw: &[Vec<C64>]) -> Result<PeriodMatrix> {
    let g = raw.len();
    if g == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    for row in raw {
        if row.len() != g {
            return Err(Error::NotSquare { rows: g, cols: row.len() });
        }
    }
    let flat: Vec<C64> = raw.iter().flatten().copied().collect();
    PeriodMatrix::from_flat(g, &flat)
}

impl PeriodMatrix {
    /// Build from row-major entries.
    pub fn from_flat(g: usize, entries: &[C64]) -> Result<Self> {
        if g == 0 || entries.len() != g * g {
            return Err(Error::NotSquare { rows: g, cols: if g == 0 { 0 } else { entries.len() / g.max(1) } });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("non-finite period matrix entry".into()));
        }
        let mut asym: f64 = 0.0;
        let mut tau = vec![C64::new(0.0, 0.0); g * g];
        for i in 0..g {
            for j in 0..g {
                asym = asym.max((entries[i * g + j] - entries[j * g + i]).norm());
                tau[i * g + j] = (entries[i * g + j] + entries[j * g + i]) * 0.5;
            }
        }
        if asym > ASYMMETRY_LIMIT {
            return Err(Error::AsymmetricInput { asymmetry: asym });
        }
        let im: Vec<f64> = tau.iter().map(|z| z.im).collect();
        let y = DMatrix::from_row_slice(g, g, &im);
        let eig = SymmetricEigen::new(y.clone());
        let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let lambda_max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(lambda_min > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: lambda_min });
        }
        let chol = y
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue: lambda_min })?;
        let upper = chol.l().transpose();
        let inv = chol.inverse();
        let det_im = eig.eigenvalues.iter().product();
        Ok(PeriodMatrix {
            g,
            tau,
            im,
            im_inv: (0..g * g).map(|k| inv[(k / g, k % g)]).collect(),
            chol: (0..g * g).map(|k| upper[(k / g, k % g)]).collect(),
            lambda_min,
            lambda_max,
            det_im,
        })
    }

    /// Diagonal period matrix `diag(τ_1, ..., τ_g)`.
    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        let g = diag.len();
        let mut flat = vec![C64::new(0.0, 0.0); g * g];
        for (i, d) in diag.iter().enumerate() {
            flat[i * g + i] = *d;
        }
        Self::from_flat(g, &flat)
    }

    /// Block-diagonal matrix assembled from smaller period matrices.
    pub fn block_diagonal(blocks: &[PeriodMatrix]) -> Result<Self> {
        let g: usize = blocks.iter().map(|b| b.g).sum();
        let mut flat = vec![C64::new(0.0, 0.0); g * g];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.g {
                for j in 0..b.g {
                    flat[(off + i) * g + off + j] = b.entry(i, j);
                }
            }
            off += b.g;
        }
        Self::from_flat(g, &flat)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.tau[i * self.g + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.tau
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.tau.chunks(self.g).map(|r| r.to_vec()).collect()
    }

    pub fn imag(&self) -> &[f64] {
        &self.im
    }

    pub fn imag_inverse(&self) -> &[f64] {
        &self.im_inv
    }

    pub(crate) fn cholesky_upper(&self) -> &[f64] {
        &self.chol
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn det_imag(&self) -> f64 {
        self.det_im
    }

    /// `k·τ` for a positive real `k` (e.g. `2τ` for second-order thetas).
    pub fn scaled(&self, k: f64) -> PeriodMatrix {
        let flat: Vec<C64> = self.tau.iter().map(|z| z * k).collect();
        Self::from_flat(self.g, &flat).expect("positive multiple of a period matrix is valid")
    }

    /// `Pᵗ τ P` for the permutation matrix with `P e_{perm[i]} = e_i`, i.e.
    /// entry `(i, j)` of the result is `τ[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<PeriodMatrix> {
        if perm.len() != self.g {
            return Err(Error::DimensionMismatch { expected: self.g, got: perm.len() });
        }
        let g = self.g;
        let flat: Vec<C64> =
            (0..g * g).map(|k| self.entry(perm[k / g], perm[k % g])).collect();
        Self::from_flat(g, &flat)
    }

    /// `τ m` for an integer (or real) vector `m`.
    pub fn apply_real(&self, m: &[f64]) -> Vec<C64> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.entry(i, j) * m[j]).sum())
            .collect()
    }

    /// Lattice vector `n + τ m`.
    pub fn lattice_vector(&self, n: &[i64], m: &[i64]) -> Vec<C64> {
        let mf: Vec<f64> = m.iter().map(|&x| x as f64).collect();
        self.apply_real(&mf)
            .into_iter()
            .zip(n)
            .map(|(t, &k)| t + k as f64)
            .collect()
    }

    /// Reduce `z` into the fundamental cell `[0,1)^g + τ[0,1)^g`.
    /// Returns the reduced point and the integer vectors `(n, m)` with
    /// `z = reduced + n + τ m`.
    pub fn reduce(&self, z: &[C64]) -> (Vec<C64>, Vec<i64>, Vec<i64>) {
        let (s, t) = self.cell_coordinates(z);
        let m: Vec<i64> = t.iter().map(|x| x.floor() as i64).collect();
        let n: Vec<i64> = s.iter().map(|x| x.floor() as i64).collect();
        let lat = self.lattice_vector(&n, &m);
        let reduced = z.iter().zip(&lat).map(|(a, b)| a - b).collect();
        (reduced, n, m)
    }

    /// Real coordinates `(s, t)` with `z = s + τ t`.
    pub fn cell_coordinates(&self, z: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let g = self.g;
        let t: Vec<f64> = (0..g)
            .map(|i| (0..g).map(|j| self.im_inv[i * g + j] * z[j].im).sum())
            .collect();
        let s: Vec<f64> = (0..g)
            .map(|i| z[i].re - (0..g).map(|j| self.entry(i, j).re * t[j]).sum::<f64>())
            .collect();
        (s, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_imaginary_part_is_valid() {
        let t = validate_period_matrix(&[vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(t.genus(), 1);
        assert_eq!(t.lambda_min(), 1.0);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let raw = vec![vec![c(0.0, 1.0), c(0.5, 0.0)], vec![c(0.6, 0.0), c(0.0, 1.0)]];
        assert!(matches!(validate_period_matrix(&raw), Err(Error::AsymmetricInput { .. })));
    }

    #[test]
    fn negative_imaginary_part_is_rejected() {
        assert!(matches!(
            validate_period_matrix(&[vec![c(0.0, -1.0)]]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let raw = vec![vec![c(0.0, 1.0), c(0.1, 0.2)], vec![c(0.1 + 1e-11, 0.2), c(0.0, 1.5)]];
        let t = validate_period_matrix(&raw).unwrap();
        assert_eq!(t.entry(0, 1), t.entry(1, 0));
    }

    #[test]
    fn reduce_lands_in_cell() {
        let t = validate_period_matrix(&[vec![c(0.3, 1.2), c(0.1, 0.2)], vec![c(0.1, 0.2), c(-0.2, 0.9)]]).unwrap();
        let z = vec![c(3.7, 2.9), c(-1.2, -2.5)];
        let (r, n, m) = t.reduce(&z);
        let lat = t.lattice_vector(&n, &m);
        let (s, tt) = t.cell_coordinates(&r);
        for i in 0..2 {
            assert!((r[i] + lat[i] - z[i]).norm() < 1e-12);
            assert!(s[i] > -1e-12 && s[i] < 1.0 + 1e-12);
            assert!(tt[i] > -1e-12 && tt[i] < 1.0 + 1e-12);
        }
    }
}
