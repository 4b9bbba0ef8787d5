use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::cliio::fixture::{read_fixture, FixtureDocument};
use crate::error::{Error, Result};
use crate::identities::{fit_hirota_constant, KpDirections};
use crate::linalg::least_squares;
use crate::theta::{theta_char_jets, theta_taylor, DirectionalJet, HalfCharacteristic, PeriodMatrix, TruncationPolicy};
use crate::C64;

/// Local coordinate jet `z(ζ) = ζ + aζ² + bζ³` at the marked point of a
/// genus-1 curve with flat coordinate `ζ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateJet {
    pub a: C64,
    pub b: C64,
}

/// Everything a theta-identity check needs about one curve.
#[derive(Clone, Debug)]
pub struct CurveFixture {
    pub genus: usize,
    pub tau: PeriodMatrix,
    /// Abel–Jacobi images of named points.
    pub points: BTreeMap<String, Vec<C64>>,
    pub u1: Vec<C64>,
    pub u2: Vec<C64>,
    pub u3: Vec<C64>,
    /// Second Abel–Jacobi derivative at the marked point (flex direction).
    pub v: Option<Vec<C64>>,
    /// KP time direction `U3 + μU1`, normalized so the Hirota form holds
    /// with constant [`CurveFixture::c`].
    pub w: Vec<C64>,
    pub c: C64,
    pub z: Vec<C64>,
    pub provenance: String,
}

impl CurveFixture {
    /// `(U1, U2, W, c)` as KP directions.
    pub fn kp_directions(&self) -> KpDirections {
        KpDirections::new(self.u1.clone(), self.u2.clone(), self.w.clone(), Some(self.c))
    }

    pub fn point(&self, name: &str) -> Result<&[C64]> {
        self.points
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::InvalidArgument(format!("fixture has no point named {name:?}")))
    }

    /// Named point reduced into the fundamental cell.
    pub fn reduced_point(&self, name: &str) -> Result<Vec<C64>> {
        Ok(self.tau.reduce(self.point(name)?).0)
    }
}

/// Jet data of the odd theta at 0 in genus 1: `(e, g₂)` with
/// `℘ = −(ln θ[½;½])″ + e` and `℘ = z⁻² + g₂z²/20 + …`.
pub fn genus1_weierstrass(tau: &PeriodMatrix, policy: &TruncationPolicy) -> Result<(C64, C64)> {
    if tau.genus() != 1 {
        return Err(Error::WrongGenus { expected: 1, got: tau.genus() });
    }
    let chi = HalfCharacteristic::new(&[0.5], &[0.5])?;
    let one = [C64::new(1.0, 0.0)];
    let jets = [DirectionalJet::along(&one, 1), DirectionalJet::along(&one, 3), DirectionalJet::along(&one, 5)];
    let d = theta_char_jets(tau, &[C64::new(0.0, 0.0)], &chi, &jets, policy)?;
    let p = d[1] / 6.0 / d[0];
    let q = d[2] / 120.0 / d[0];
    Ok((p * 2.0, (q - p * p / 2.0) * -240.0))
}

/// Genus-1 fixture from a coordinate jet.
///
/// Inverting the jet gives `ζ(z) = z − az² + (2a² − b)z³ + …`, so
/// `U1 = −2πi`, `U2 = 4πi·a`, `U3 = −6πi(2a² − b)`. With
/// `u = 2∂ₓ² ln θ = 2U1²(e − ℘)`, the KP equation fixes
/// `W = (3U2² + 12eU1⁴)/(4U1)` and `c = U1⁴(6e² − g₂/2)/8`.
pub fn genus1_fixture(tau: &PeriodMatrix, jet: CoordinateJet, z: C64, policy: &TruncationPolicy) -> Result<CurveFixture> {
    if tau.genus() != 1 {
        return Err(Error::WrongGenus { expected: 1, got: tau.genus() });
    }
    let i2pi = C64::new(0.0, 2.0 * PI);
    let u1 = -i2pi;
    let u2 = i2pi * 2.0 * jet.a;
    let u3 = -i2pi * 3.0 * (jet.a * jet.a * 2.0 - jet.b);
    let (e, g2) = genus1_weierstrass(tau, policy)?;
    let u1_4 = u1.powi(4);
    let w = (u2 * u2 * 3.0 + e * u1_4 * 12.0) / (u1 * 4.0);
    let c = u1_4 * (e * e * 6.0 - g2 / 2.0) / 8.0;
    Ok(CurveFixture {
        genus: 1,
        tau: tau.clone(),
        points: BTreeMap::new(),
        u1: vec![u1],
        u2: vec![u2],
        u3: vec![u3],
        v: Some(vec![C64::new(0.0, 0.0)]),
        w: vec![w],
        c,
        z: vec![z],
        provenance: format!("genus1_fixture(tau={}, a={}, b={})", tau.entry(0, 0), jet.a, jet.b),
    })
}

/// Galilean shift `μ` and constant `c` with `W = U3 + μU1` solving the
/// Hirota form in least squares over `samples`. Returns `(μ, c, max normalized misfit)`.
pub fn fit_galilean_shift(
    tau: &PeriodMatrix,
    u1: &[C64],
    u2: &[C64],
    u3: &[C64],
    samples: &[Vec<C64>],
    policy: &TruncationPolicy,
) -> Result<(C64, C64, f64)> {
    let n = samples.len();
    let mut a = DMatrix::zeros(n, 2);
    let mut b = DVector::zeros(n);
    let mut scales = Vec::with_capacity(n);
    for (i, z) in samples.iter().enumerate() {
        let t = theta_taylor(tau, z, u1, policy)?;
        let dirs_terms = crate::identities::hirota_terms(&t, u2, u3, C64::new(0.0, 0.0));
        let base: C64 = dirs_terms.iter().sum();
        let scale = dirs_terms.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        // ∂_{μU1} contributions: 4θ_x(μθ_x) − 4(μθ_xx)θ.
        let mu_coef = (t.du[1] * t.du[1] - t.du[2] * t.value) * 4.0;
        a[(i, 0)] = mu_coef / scale;
        a[(i, 1)] = t.value * t.value * 8.0 / scale;
        b[i] = -base / scale;
        scales.push(scale);
    }
    let x = least_squares(&a, &b).ok_or_else(|| Error::SingularSystem("Galilean shift fit".into()))?;
    let misfit = (0..n).map(|i| (a[(i, 0)] * x[0] + a[(i, 1)] * x[1] - b[i]).norm()).fold(0.0, f64::max);
    Ok((x[0], x[1], misfit))
}

/// Curve fixture from a validated document. `W` is taken from the document
/// when present; otherwise `(μ, c)` are fitted from `U1, U2, U3`.
pub fn fixture_from_document(doc: &FixtureDocument, policy: &TruncationPolicy) -> Result<CurveFixture> {
    let g = doc.genus;
    let zero = vec![C64::new(0.0, 0.0); g];
    let get = |k: &str| doc.vector(k).map(|v| v.to_vec());
    let u1 = get("U1").ok_or_else(|| Error::SchemaError { path: "$.vectors.U1".into(), message: "missing".into() })?;
    if u1.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::InvariantViolation("$.vectors.U1: must be nonzero".into()));
    }
    let u2 = get("U2").unwrap_or_else(|| zero.clone());
    let u3 = get("U3").unwrap_or_else(|| zero.clone());
    let samples = galilean_samples(&doc.tau);
    let (w, c) = match get("W") {
        Some(w) => {
            let c = fit_hirota_constant(&doc.tau, &samples, &u1, &u2, &w, policy)?;
            (w, c)
        }
        None => {
            let (mu, c, _) = fit_galilean_shift(&doc.tau, &u1, &u2, &u3, &samples, policy)?;
            (u3.iter().zip(&u1).map(|(a, b)| a + b * mu).collect(), c)
        }
    };
    Ok(CurveFixture {
        genus: g,
        tau: doc.tau.clone(),
        points: doc.points.clone(),
        u1,
        u2,
        u3,
        v: get("V"),
        w,
        c,
        z: get("Z").unwrap_or(zero),
        provenance: doc.provenance.clone(),
    })
}

/// Fixed sample plan for the Galilean fit: 12 points of the cell from a
/// fixed seed.
fn galilean_samples(tau: &PeriodMatrix) -> Vec<Vec<C64>> {
    let mut rng = crate::cliio::random::rng_from_seed(0x6a1);
    (0..12).map(|_| crate::cliio::random::random_cell_point(tau, &mut rng)).collect()
}

/// Load a genus-2 fixture file (the quadrature data for
/// `y² = x(x−1)(x−2)(x−3)(x−4)` ships in `fixtures/`).
pub fn load_genus2_fixture(path: &Path, policy: &TruncationPolicy) -> Result<CurveFixture> {
    let doc = read_fixture(path)?;
    if doc.genus != 2 {
        return Err(Error::WrongGenus { expected: 2, got: doc.genus });
    }
    fixture_from_document(&doc, policy)
}
