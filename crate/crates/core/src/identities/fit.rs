use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::kp::{hirota_residual_max, KpDirections, KP_TOLERANCE};
use super::report::{fmt_c, ResidualReport};
use crate::cliio::random::rng_from_seed;
use crate::error::{Error, Result};
use crate::linalg::{hdot, least_squares, norm};
use crate::theta::{theta_taylor, PeriodMatrix, TruncationPolicy};
use crate::C64;

/// Settings for [`fit_kp_parameters`].
#[derive(Clone, Debug)]
pub struct FitOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Single start from these parameters instead of the seeded multistart.
    pub init: Option<KpDirections>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { starts: 8, seed: 0, max_iterations: 200, tolerance: KP_TOLERANCE, init: None }
    }
}

/// Result of a KP parameter fit, in the canonical gauge (see
/// [`KpDirections::canonical`]).
#[derive(Clone, Debug)]
pub struct KpFit {
    pub dirs: KpDirections,
    /// Root mean square of the normalized training residuals.
    pub train_residual: f64,
    /// Max Hirota residual over the held-out points.
    pub residual: f64,
    pub report: ResidualReport,
}

/// Hirota form at one point as a polynomial in `(V, W, c)`:
/// `a0 + a_w·W + Vᵗ M V + b_c c`, divided by a fixed `U`-only scale.
struct Sample {
    a0: C64,
    aw: Vec<C64>,
    m: DMatrix<C64>,
    bc: C64,
    scale: f64,
}

impl Sample {
    fn new(tau: &PeriodMatrix, z: &[C64], u: &[C64], policy: &TruncationPolicy) -> Result<Sample> {
        let g = u.len();
        let t = theta_taylor(tau, z, u, policy)?;
        let th = t.value;
        let p = [t.du[4] * th, -t.du[3] * t.du[1] * 4.0, t.du[2] * t.du[2] * 3.0];
        let scale = p.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let aw = (0..g).map(|i| t.du[1] * t.grad[i] * 4.0 - t.grad_u[i] * th * 4.0).collect();
        let m = DMatrix::from_fn(g, g, |i, j| (t.hess[i * g + j] * th - t.grad[i] * t.grad[j]) * 3.0);
        Ok(Sample { a0: p[0] + p[1] + p[2], aw, m, bc: th * th * 8.0, scale })
    }
}

/// Orthonormal basis (Hermitian) of the complement of `u`, as columns.
fn complement_basis(u: &[C64]) -> DMatrix<C64> {
    let g = u.len();
    let mut basis: Vec<Vec<C64>> = vec![u.iter().map(|x| x / norm(u)).collect()];
    for k in 0..g {
        if basis.len() == g {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); g];
        e[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let p = hdot(b, &e);
                for i in 0..g {
                    e[i] -= b[i] * p;
                }
            }
        }
        let n = norm(&e);
        if n > 1e-8 {
            basis.push(e.iter().map(|x| x / n).collect());
        }
    }
    DMatrix::from_fn(g, g - 1, |i, j| basis[j + 1][i])
}

struct Problem {
    g: usize,
    q: DMatrix<C64>,
    samples: Vec<(C64, DVector<C64>, DMatrix<C64>, C64, f64)>,
}

impl Problem {
    fn new(u: &[C64], raw: Vec<Sample>) -> Problem {
        let q = complement_basis(u);
        let samples = raw
            .into_iter()
            .map(|s| {
                let aw = DVector::from_vec(s.aw);
                let mq = q.transpose() * &s.m * &q;
                (s.a0, aw, mq, s.bc, s.scale)
            })
            .collect();
        Problem { g: u.len(), q, samples }
    }

    fn nb(&self) -> usize {
        self.g - 1
    }

    fn split(&self, x: &DVector<C64>) -> (DVector<C64>, DVector<C64>, C64) {
        let nb = self.nb();
        (x.rows(0, nb).into_owned(), x.rows(nb, self.g).into_owned(), x[nb + self.g])
    }

    fn residuals(&self, x: &DVector<C64>) -> (DVector<C64>, DMatrix<C64>) {
        let (beta, w, c) = self.split(x);
        let n = x.len();
        let mut r = DVector::zeros(self.samples.len());
        let mut j = DMatrix::zeros(self.samples.len(), n);
        for (i, (a0, aw, mq, bc, s)) in self.samples.iter().enumerate() {
            let mb = mq * &beta;
            let quad = beta.dot(&mb);
            r[i] = (a0 + aw.dot(&w) + quad + bc * c) / *s;
            for k in 0..self.nb() {
                j[(i, k)] = mb[k] * 2.0 / *s;
            }
            for k in 0..self.g {
                j[(i, self.nb() + k)] = aw[k] / *s;
            }
            j[(i, n - 1)] = bc / *s;
        }
        (r, j)
    }

    /// Least-squares `(W, c)` with `β` held fixed.
    fn linear_part(&self, beta: &DVector<C64>) -> Option<DVector<C64>> {
        let n = self.samples.len();
        let mut a = DMatrix::zeros(n, self.g + 1);
        let mut b = DVector::zeros(n);
        for (i, (a0, aw, mq, bc, s)) in self.samples.iter().enumerate() {
            for k in 0..self.g {
                a[(i, k)] = aw[k] / *s;
            }
            a[(i, self.g)] = bc / *s;
            b[i] = -(a0 + beta.dot(&(mq * beta))) / *s;
        }
        let sol = least_squares(&a, &b)?;
        let mut x = DVector::zeros(self.nb() + self.g + 1);
        x.rows_mut(0, self.nb()).copy_from(beta);
        x.rows_mut(self.nb(), self.g + 1).copy_from(&sol);
        Some(x)
    }

    fn levenberg_marquardt(&self, mut x: DVector<C64>, iterations: usize) -> (DVector<C64>, f64) {
        let n = x.len();
        let mut lambda = 1e-3;
        let (mut r, mut j) = self.residuals(&x);
        let mut cost = r.norm_squared();
        for _ in 0..iterations {
            if cost == 0.0 {
                break;
            }
            let jh = j.adjoint();
            let a = &jh * &j;
            let grad = &jh * &r;
            if grad.norm() == 0.0 {
                break;
            }
            let mut improved = false;
            while lambda < 1e12 {
                let mut damped = a.clone();
                for k in 0..n {
                    damped[(k, k)] += C64::new(lambda * (a[(k, k)].re + 1e-12), 0.0);
                }
                let Some(step) = damped.lu().solve(&(-&grad)) else {
                    lambda *= 4.0;
                    continue;
                };
                let trial = &x + &step;
                let (tr, tj) = self.residuals(&trial);
                let tc = tr.norm_squared();
                if tc < cost {
                    let done = (cost - tc) <= 1e-15 * cost;
                    x = trial;
                    r = tr;
                    j = tj;
                    cost = tc;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = !done;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, cost)
    }
}

/// Fit `(V, W, c)` so that the Hirota form vanishes at `samples`.
///
/// `V` is constrained to the Hermitian complement of `U` (the gauge slice);
/// the form is then a quadratic polynomial in `V` and linear in `(W, c)`.
/// Each sample is divided by the largest `U`-only term so the objective does
/// not depend on the size of `V, W`. Multistart Levenberg–Marquardt from
/// seeded random `V` with `(W, c)` from the linear subproblem; the best
/// training objective wins and is scored on `holdout`.
pub fn fit_kp_parameters(
    tau: &PeriodMatrix,
    u: &[C64],
    samples: &[Vec<C64>],
    holdout: &[Vec<C64>],
    policy: &TruncationPolicy,
    options: &FitOptions,
) -> Result<KpFit> {
    let g = tau.genus();
    if u.len() != g {
        return Err(Error::DimensionMismatch { expected: g, got: u.len() });
    }
    if u.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::DegenerateQuery("U must be nonzero".into()));
    }
    if samples.len() < 4 * g + 4 {
        return Err(Error::InvalidArgument(format!("need at least {} samples, got {}", 4 * g + 4, samples.len())));
    }
    if holdout.is_empty() {
        return Err(Error::InvalidArgument("need at least one held-out sample".into()));
    }
    let raw = samples.iter().map(|z| Sample::new(tau, z, u, policy)).collect::<Result<Vec<_>>>()?;
    let prob = Problem::new(u, raw);
    let nb = prob.nb();

    let mut starts: Vec<DVector<C64>> = Vec::new();
    if let Some(init) = &options.init {
        let canon = init.canonical();
        let beta = prob.q.adjoint() * DVector::from_column_slice(&canon.v);
        let mut x = DVector::zeros(nb + g + 1);
        x.rows_mut(0, nb).copy_from(&beta);
        x.rows_mut(nb, g).copy_from(&DVector::from_column_slice(&canon.w));
        x[nb + g] = canon.c.unwrap_or_default();
        if canon.c.is_none() {
            x = prob.linear_part(&beta).unwrap_or(x);
        }
        starts.push(x);
    } else {
        let mut rng = rng_from_seed(options.seed);
        let un = norm(u);
        for k in 0..options.starts.max(1) {
            let beta = if k == 0 {
                DVector::zeros(nb)
            } else {
                DVector::from_fn(nb, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * un)
            };
            if let Some(x) = prob.linear_part(&beta) {
                starts.push(x);
            }
        }
    }
    if starts.is_empty() {
        return Err(Error::SingularSystem("linear (W, c) subproblem is rank deficient at every start".into()));
    }
    let mut best: Option<(DVector<C64>, f64)> = None;
    for x0 in starts {
        let (x, cost) = prob.levenberg_marquardt(x0, options.max_iterations);
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((x, cost));
        }
    }
    let (x, cost) = best.expect("at least one start");
    let (beta, w, c) = prob.split(&x);
    let v = &prob.q * beta;
    let dirs = KpDirections::new(u.to_vec(), v.as_slice().to_vec(), w.as_slice().to_vec(), Some(c)).canonical();
    let held = hirota_residual_max(tau, holdout, &dirs, policy)?;
    let train_residual = (cost / samples.len() as f64).sqrt();
    let report = ResidualReport::below("kp-fit", "", held.residual, held.normalizer, options.tolerance)
        .with_param("train", train_residual)
        .with_param("c", fmt_c(c));
    Ok(KpFit { dirs, train_residual, residual: held.residual, report })
}
