use std::fmt::Write;

use rayon::prelude::*;

use super::CurveFixture;
use crate::error::{Error, Result};
use crate::identities::ResidualReport;
use crate::theta::{theta_jets, DirectionalJet, TruncationPolicy};
use crate::C64;

pub const KP_FD_TOLERANCE: f64 = 1e-4;
/// Distance (in x units) below which a sample counts as on the divisor.
pub const MASK_DISTANCE: f64 = 1e-6;
pub const MIN_AXIS_SAMPLES: usize = 7;
/// Largest allowed spacing as a fraction of an axis' oscillation length.
pub const RESOLUTION_FRACTION: f64 = 0.1;

/// Uniform sample axis `start + k·step`, `k < count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        Axis { start, step, count }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.start + self.step * k as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    pub t: Axis,
}

/// Samples of `u(x, y, t) = 2∂ₓ² ln θ(U1x + U2y + Wt + Z)`; `None` marks a
/// sample within [`MASK_DISTANCE`] of the theta divisor.
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    pub spacing: [f64; 3],
    /// Oscillation length `1/max|D_j|` of each axis direction.
    pub scales: [f64; 3],
    pub values: Vec<Option<C64>>,
}

impl FieldGrid {
    /// Grid from explicit samples, x fastest. Scales are taken as infinite.
    pub fn from_values(spec: &GridSpec, values: Vec<Option<C64>>) -> Result<FieldGrid> {
        let n = spec.x.count * spec.y.count * spec.t.count;
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: values.len() });
        }
        Ok(FieldGrid {
            x: spec.x.points(),
            y: spec.y.points(),
            t: spec.t.points(),
            spacing: [spec.x.step, spec.y.step, spec.t.step],
            scales: [f64::INFINITY; 3],
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.x.len(), self.y.len(), self.t.len())
    }

    pub fn index(&self, ix: usize, iy: usize, it: usize) -> usize {
        (it * self.y.len() + iy) * self.x.len() + ix
    }

    pub fn get(&self, ix: usize, iy: usize, it: usize) -> Option<C64> {
        self.values[self.index(ix, iy, it)]
    }

    pub fn masked(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// `x,y,t,re_u,im_u` rows in grid order, masked samples omitted.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,t,re_u,im_u\n");
        for (it, t) in self.t.iter().enumerate() {
            for (iy, y) in self.y.iter().enumerate() {
                for (ix, x) in self.x.iter().enumerate() {
                    if let Some(u) = self.get(ix, iy, it) {
                        let _ = writeln!(s, "{x},{y},{t},{},{}", u.re, u.im);
                    }
                }
            }
        }
        s
    }
}

fn oscillation_length(d: &[C64]) -> f64 {
    let m = d.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        f64::INFINITY
    } else {
        1.0 / m
    }
}

/// Sample the KP potential of `fixture` with time direction `W`.
pub fn kp_field(fixture: &CurveFixture, spec: &GridSpec, policy: &TruncationPolicy) -> Result<FieldGrid> {
    let g = fixture.genus;
    let (xs, ys, ts) = (spec.x.points(), spec.y.points(), spec.t.points());
    let (nx, ny) = (xs.len(), ys.len());
    let n = nx * ny * ts.len();
    let u1 = &fixture.u1;
    let jets = [DirectionalJet::none(), DirectionalJet::along(u1, 1), DirectionalJet::along(u1, 2)];
    let values = (0..n)
        .into_par_iter()
        .map(|k| {
            let (ix, iy, it) = (k % nx, (k / nx) % ny, k / (nx * ny));
            let z: Vec<C64> = (0..g)
                .map(|j| fixture.u1[j] * xs[ix] + fixture.u2[j] * ys[iy] + fixture.w[j] * ts[it] + fixture.z[j])
                .collect();
            let v = theta_jets(&fixture.tau, &z, &jets, policy)?;
            if v[0].norm() <= MASK_DISTANCE * v[1].norm() || v[0].norm() == 0.0 {
                return Ok(None);
            }
            Ok(Some((v[0] * v[2] - v[1] * v[1]) * 2.0 / (v[0] * v[0])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldGrid {
        x: xs,
        y: ys,
        t: ts,
        spacing: [spec.x.step, spec.y.step, spec.t.step],
        scales: [oscillation_length(&fixture.u1), oscillation_length(&fixture.u2), oscillation_length(&fixture.w)],
        values,
    })
}

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D4: [f64; 7] = [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0];

/// Centered fourth-order residual of `¾u_yy = ∂ₓ(u_t − 3/2·uu_x − ¼u_xxx)`
/// at interior points whose stencils avoid masked samples, normalized by
/// `max |¾u_yy|` (or by the largest term when `u_yy` vanishes).
pub fn kp_fd_residual(field: &FieldGrid) -> Result<ResidualReport> {
    let (nx, ny, nt) = field.shape();
    for (name, n) in [("x", nx), ("y", ny), ("t", nt)] {
        if n < MIN_AXIS_SAMPLES {
            return Err(Error::GridTooCoarse(format!("{n} samples on axis {name}; need {MIN_AXIS_SAMPLES}")));
        }
    }
    for (k, name) in ["x", "y", "t"].iter().enumerate() {
        let h = field.spacing[k];
        if !(h > 0.0) {
            return Err(Error::GridTooCoarse(format!("spacing {h} on axis {name}")));
        }
        if h > RESOLUTION_FRACTION * field.scales[k] {
            return Err(Error::GridTooCoarse(format!(
                "spacing {h} on axis {name} exceeds {RESOLUTION_FRACTION} of the oscillation length {}",
                field.scales[k]
            )));
        }
    }
    let [hx, hy, ht] = field.spacing;
    let mut worst: f64 = 0.0;
    let mut yy_max: f64 = 0.0;
    let mut term_max: f64 = 0.0;
    for it in 2..nt - 2 {
        for iy in 2..ny - 2 {
            'x: for ix in 3..nx - 3 {
                let mut row = [C64::new(0.0, 0.0); 7];
                let mut sq = [C64::new(0.0, 0.0); 5];
                for (j, slot) in row.iter_mut().enumerate() {
                    match field.get(ix + j - 3, iy, it) {
                        Some(v) => *slot = v,
                        None => continue 'x,
                    }
                }
                for (j, s) in sq.iter_mut().enumerate() {
                    let v = row[j + 1];
                    *s = v * v;
                }
                let mut col_y = [C64::new(0.0, 0.0); 5];
                for (j, slot) in col_y.iter_mut().enumerate() {
                    match field.get(ix, iy + j - 2, it) {
                        Some(v) => *slot = v,
                        None => continue 'x,
                    }
                }
                let mut u_xt = C64::new(0.0, 0.0);
                for (a, ca) in D1.iter().enumerate() {
                    if *ca == 0.0 {
                        continue;
                    }
                    for (b, cb) in D1.iter().enumerate() {
                        if *cb == 0.0 {
                            continue;
                        }
                        match field.get(ix + a - 2, iy, it + b - 2) {
                            Some(v) => u_xt += v * (ca * cb),
                            None => continue 'x,
                        }
                    }
                }
                u_xt /= hx * ht;
                let u_yy: C64 = col_y.iter().zip(D2).map(|(v, c)| v * c).sum::<C64>() / (hy * hy);
                let sq_xx: C64 = sq.iter().zip(D2).map(|(v, c)| v * c).sum::<C64>() / (hx * hx);
                let u_xxxx: C64 = row.iter().zip(D4).map(|(v, c)| v * c).sum::<C64>() / hx.powi(4);
                // ∂ₓ(3/2·uu_x) = ¾(u²)_xx.
                let terms = [u_yy * 0.75, -u_xt, sq_xx * 0.75, u_xxxx * 0.25];
                let sum: C64 = terms.iter().sum();
                worst = worst.max(sum.norm());
                yy_max = yy_max.max(terms[0].norm());
                term_max = terms.iter().map(|t| t.norm()).fold(term_max, f64::max);
            }
        }
    }
    let normalizer = if yy_max > 0.0 { yy_max } else { term_max };
    let residual = if normalizer > 0.0 { worst / normalizer } else if worst == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(ResidualReport::below("kp-fd", "", residual, normalizer, KP_FD_TOLERANCE).with_param("max_term", term_max))
}
