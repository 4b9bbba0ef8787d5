//! Check orchestration: sample plans, worker pool and report emission.

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::fixture::{read_fixture, FixtureDocument};
use super::random::{random_cell_point, random_complex_vector, random_period_matrix, rng_from_seed, SeededRng};
use crate::bakp::{
    ba_consistency_at, flex_track, fixture_from_document, genus1_fixture, kp_fd_residual, kp_field, Axis, BaWindow,
    CoordinateJet, CurveFixture, FieldGrid, GridSpec,
};
use crate::error::{Error, Result};
use crate::identities::*;
use crate::linalg::norm;
use crate::theta::{theta_divisor_point, PeriodMatrix, TruncationPolicy};
use crate::C64;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SCHOTTKY_LAB_THREADS";
pub const DEFAULT_SAMPLES: usize = 16;
/// Tolerance of the kp-field lattice-invariance check.
pub const FIELD_TOLERANCE: f64 = 1e-9;
const WINDOW_ATTEMPTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Quasiperiodicity,
    Addition,
    SchottkyIgusa,
    Secancy,
    KummerKp,
    Hirota,
    Weil,
    ThetaSurface,
    EllipticFunction,
    Ba,
    KpField,
    KpResidual,
    FlexTrack,
}

impl Check {
    pub const ALL: [Check; 13] = [
        Check::Quasiperiodicity,
        Check::Addition,
        Check::SchottkyIgusa,
        Check::Secancy,
        Check::KummerKp,
        Check::Hirota,
        Check::Weil,
        Check::ThetaSurface,
        Check::EllipticFunction,
        Check::Ba,
        Check::KpField,
        Check::KpResidual,
        Check::FlexTrack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Quasiperiodicity => "quasiperiodicity",
            Check::Addition => "addition",
            Check::SchottkyIgusa => "schottky-igusa",
            Check::Secancy => "secancy",
            Check::KummerKp => "kummer-kp",
            Check::Hirota => "hirota",
            Check::Weil => "weil",
            Check::ThetaSurface => "theta-surface",
            Check::EllipticFunction => "elliptic-function",
            Check::Ba => "ba",
            Check::KpField => "kp-field",
            Check::KpResidual => "kp-residual",
            Check::FlexTrack => "flex-track",
        }
    }

    /// The identity each check certifies.
    pub fn about(self) -> &'static str {
        match self {
            Check::Quasiperiodicity => "theta(z + m1 + tau m2) = exp(pi i(-2 m2.z - m2.tau m2)) theta(z)",
            Check::Addition => "theta(x+y) theta(x-y) = sum_eps Theta[eps](x) Theta[eps](y)",
            Check::SchottkyIgusa => "genus-4 Schottky-Igusa form 2^4 sum theta^16 - (sum theta^8)^2 vanishes on Jacobians",
            Check::Secancy => "Kummer images of three points (or flex data) are linearly dependent on Jacobians",
            Check::KummerKp => "(d_U^4 - 4 d_U d_W + 3 d_V^2 + c) Theta[eps](0) = 0 for every eps",
            Check::Hirota => "Hirota bilinear form of KP vanishes for theta(Ux + Vy + Wt + z)",
            Check::Weil => "theta(z+p-q)theta(z+r-s) is a combination of the two other pairings",
            Check::ThetaSurface => "quartic identity in D1, D2 derivatives on the theta divisor",
            Check::EllipticFunction => "theta quotient with a degree-0 divisor summing to a period is doubly periodic",
            Check::Ba => "Baker-Akhiezer quotient solves (d_x^2 + u) psi = d_y psi with fitted exponents",
            Check::KpField => "u = 2 d_x^2 ln theta is invariant under Z -> Z + lattice vector",
            Check::KpResidual => "finite-difference residual of 3/4 u_yy = d_x(u_t - 3/2 u u_x - 1/4 u_xxx)",
            Check::FlexTrack => "divisor track x(y) satisfies x'' = -2w and the quartic divisor identity",
        }
    }

    pub fn parse(name: &str) -> Result<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name).ok_or_else(|| Error::UnknownCheck(name.to_string()))
    }

    fn needs_curve(self) -> bool {
        matches!(
            self,
            Check::KummerKp
                | Check::Hirota
                | Check::ThetaSurface
                | Check::Ba
                | Check::KpField
                | Check::KpResidual
                | Check::FlexTrack
        )
    }
}

/// Overrides of the default [`TruncationPolicy`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyOverrides {
    #[serde(default)]
    pub target_abs_error: Option<f64>,
    #[serde(default)]
    pub max_radius: Option<u32>,
}

impl PolicyOverrides {
    pub fn resolve(&self) -> Result<TruncationPolicy> {
        let d = TruncationPolicy::default();
        TruncationPolicy::new(self.target_abs_error.unwrap_or(d.target_abs_error), self.max_radius.unwrap_or(d.max_radius))
    }
}

fn default_genus() -> usize {
    1
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// One check run. Without a fixture, `τ` (and for curve checks a genus-1 jet
/// fixture) is generated from `seed`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub check: String,
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    #[serde(default = "default_genus")]
    pub genus: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub policy: PolicyOverrides,
}

impl CheckConfig {
    pub fn new(check: &str) -> Self {
        CheckConfig {
            check: check.to_string(),
            fixture: None,
            genus: default_genus(),
            samples: default_samples(),
            seed: 0,
            tolerance: None,
            policy: PolicyOverrides::default(),
        }
    }

    /// Parse a JSON config; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SchemaError { path: "$".into(), message: e.to_string() })
    }
}

/// Sorted reports of one suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub reports: Vec<ResidualReport>,
}

/// Shortest round-trip decimal in exponent form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    /// 0 iff every line passes.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// `check,case_id,residual,normalizer,tolerance,pass` per case.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.check,
                r.case_id,
                fmt_f64(r.residual),
                fmt_f64(r.normalizer),
                fmt_f64(r.tolerance),
                r.pass
            ));
        }
        s
    }

    /// One JSON object per line with the CSV fields.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            let v = serde_json::json!({
                "check": r.check,
                "case_id": r.case_id,
                "residual": json_number(r.residual),
                "normalizer": json_number(r.normalizer),
                "tolerance": json_number(r.tolerance),
                "pass": r.pass,
            });
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }
}

/// Worker count from [`THREADS_ENV`]; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// [`run_suite_with_threads`] with the pool size from the environment.
pub fn run_suite(config: &CheckConfig) -> Result<SuiteReport> {
    run_suite_with_threads(config, threads_from_env()?)
}

/// Run one check over its sample plan on a pool of `threads` workers.
/// Inputs are drawn sequentially from the seed before any work is
/// distributed, and reports are sorted by `(check, case_id)`.
pub fn run_suite_with_threads(config: &CheckConfig, threads: Option<usize>) -> Result<SuiteReport> {
    let check = Check::parse(&config.check)?;
    let policy = config.policy.resolve()?;
    if config.samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut reports = pool.install(|| run_check(check, config, &policy))?;
    for r in &mut reports {
        r.check = check.name().to_string();
        if let Some(t) = config.tolerance {
            *r = r.clone().retol(t, true);
        }
    }
    reports.sort_by(|a, b| (&a.check, &a.case_id).cmp(&(&b.check, &b.case_id)));
    Ok(SuiteReport { reports })
}

struct Source {
    tau: PeriodMatrix,
    doc: Option<FixtureDocument>,
    provenance: String,
}

fn source(config: &CheckConfig, rng: &mut SeededRng) -> Result<Source> {
    match &config.fixture {
        Some(path) => {
            let doc = read_fixture(path)?;
            Ok(Source { tau: doc.tau.clone(), provenance: doc.provenance.clone(), doc: Some(doc) })
        }
        None => {
            if config.genus == 0 {
                return Err(Error::InvalidArgument("genus must be positive".into()));
            }
            let tau = random_period_matrix(config.genus, rng);
            Ok(Source { tau, doc: None, provenance: format!("generated genus {} seed {}", config.genus, config.seed) })
        }
    }
}

fn curve(src: &Source, rng: &mut SeededRng, policy: &TruncationPolicy) -> Result<CurveFixture> {
    match &src.doc {
        Some(doc) => fixture_from_document(doc, policy),
        None => {
            if src.tau.genus() != 1 {
                return Err(Error::InvalidArgument("curve checks without --fixture generate genus-1 jet fixtures only".into()));
            }
            let jet = CoordinateJet {
                a: C64::new(rng.gen_range(-0.5..=0.5), 0.0),
                b: C64::new(rng.gen_range(-0.5..=0.5), 0.0),
            };
            let z = random_complex_vector(1, 0.5, rng)[0];
            genus1_fixture(&src.tau, jet, z, policy)
        }
    }
}

fn case_id(i: usize) -> String {
    format!("{i:04}")
}

fn tagged(mut r: ResidualReport, id: String, provenance: &str) -> ResidualReport {
    r.case_id = id;
    r.with_param("provenance", provenance)
}

fn par_cases<T: Sync>(
    inputs: &[T],
    provenance: &str,
    f: impl Fn(&T) -> Result<ResidualReport> + Sync,
) -> Result<Vec<ResidualReport>> {
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, x)| f(x).map(|r| tagged(r, case_id(i), provenance)))
        .collect()
}

fn random_ints(g: usize, rng: &mut SeededRng) -> Vec<i64> {
    (0..g).map(|_| rng.gen_range(-2..=2)).collect()
}

fn unit(v: &[C64]) -> Result<Vec<C64>> {
    let n = norm(v);
    if n == 0.0 {
        return Err(Error::DegenerateQuery("direction must be nonzero".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

fn run_check(check: Check, config: &CheckConfig, policy: &TruncationPolicy) -> Result<Vec<ResidualReport>> {
    let mut rng = rng_from_seed(config.seed);
    let src = source(config, &mut rng)?;
    let tau = &src.tau;
    let g = tau.genus();
    let n = config.samples;
    let prov = src.provenance.as_str();
    let fixture = if check.needs_curve() { Some(curve(&src, &mut rng, policy)?) } else { None };
    match check {
        Check::Quasiperiodicity => {
            let inputs: Vec<_> =
                (0..n).map(|_| (random_cell_point(tau, &mut rng), random_ints(g, &mut rng), random_ints(g, &mut rng))).collect();
            par_cases(&inputs, prov, |(z, m1, m2)| quasiperiodicity_residual(tau, z, m1, m2, policy))
        }
        Check::Addition => {
            let inputs: Vec<_> = (0..n).map(|_| (random_cell_point(tau, &mut rng), random_cell_point(tau, &mut rng))).collect();
            par_cases(&inputs, prov, |(x, y)| addition_residual(tau, x, y, policy))
        }
        Check::SchottkyIgusa => {
            if g != 4 {
                return Err(Error::WrongGenus { expected: 4, got: g });
            }
            let taus: Vec<PeriodMatrix> = if src.doc.is_some() {
                vec![tau.clone()]
            } else {
                std::iter::once(tau.clone()).chain((1..n).map(|_| random_period_matrix(4, &mut rng))).collect()
            };
            par_cases(&taus, prov, |t| Ok(schottky_igusa(t, policy)?.report))
        }
        Check::Secancy => {
            let doc = src.doc.as_ref().ok_or_else(|| Error::InvalidArgument("secancy needs a fixture with named points".into()))?;
            match (doc.vector("U1"), doc.vector("V")) {
                (Some(u), Some(v)) if !doc.points.is_empty() => {
                    let inputs: Vec<(&String, &Vec<C64>)> = doc.points.iter().collect();
                    inputs
                        .par_iter()
                        .map(|(name, p)| {
                            let q = SecancyQuery { mode: SecancyMode::Flex, points: vec![p.to_vec()], u: u.to_vec(), v: v.to_vec() };
                            secancy_residual(tau, &q, policy).map(|r| tagged(r, name.to_string(), prov))
                        })
                        .collect()
                }
                _ => {
                    let names: Vec<&String> = doc.points.keys().take(4).collect();
                    if names.len() < 4 {
                        return Err(Error::InvalidArgument("secancy needs U1 and V or four named points".into()));
                    }
                    let [p, q, r, s] = std::array::from_fn(|i| doc.points[names[i]].as_slice());
                    let half = |a: &[C64], b: &[C64], c: &[C64], d: &[C64]| -> Vec<C64> {
                        (0..g).map(|j| (a[j] + b[j] - c[j] - d[j]) * 0.5).collect()
                    };
                    let pts = vec![half(p, q, r, s), half(p, r, s, q), half(p, s, r, q)];
                    let query = SecancyQuery { mode: SecancyMode::Full, points: pts, u: vec![], v: vec![] };
                    let id = names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("-");
                    Ok(vec![tagged(secancy_residual(tau, &query, policy)?, id, prov)])
                }
            }
        }
        Check::KummerKp => {
            let f = fixture.expect("curve check");
            let mut dirs = f.kp_directions();
            // the Kummer-form constant is 16 times the Hirota one; fit it
            dirs.c = None;
            let r = kummer_kp_residual(&f.tau, &dirs, KummerKpVariant::SecondOrder, policy)?.report;
            Ok(vec![tagged(r, case_id(0), prov)])
        }
        Check::Hirota => {
            let f = fixture.expect("curve check");
            let dirs = f.kp_directions();
            let inputs: Vec<_> = (0..n).map(|_| random_cell_point(&f.tau, &mut rng)).collect();
            par_cases(&inputs, prov, |z| hirota_residual(&f.tau, z, &dirs, policy))
        }
        Check::Weil => {
            let doc = src.doc.as_ref().ok_or_else(|| Error::InvalidArgument("weil needs a fixture with four named points".into()))?;
            let names: Vec<&String> = doc.points.keys().take(4).collect();
            if names.len() < 4 {
                return Err(Error::InvalidArgument("weil needs a fixture with four named points".into()));
            }
            let aj: [Vec<C64>; 4] = std::array::from_fn(|i| doc.points[names[i]].clone());
            let zs: Vec<_> = (0..n.max(6)).map(|_| random_cell_point(tau, &mut rng)).collect();
            let r = weil_residual(tau, &aj, &zs, policy)?.report;
            let id = names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("-");
            Ok(vec![tagged(r, id, prov)])
        }
        Check::ThetaSurface => {
            let f = fixture.expect("curve check");
            let dir = unit(&f.u1)?;
            let bases: Vec<_> = (0..n).map(|_| random_cell_point(&f.tau, &mut rng)).collect();
            par_cases(&bases, prov, |b| {
                let d = theta_divisor_point(&f.tau, b, &dir, policy)?;
                theta_surface_residual(&f.tau, &f.u1, &f.u2, &d.z, SurfaceForm::Corrected, policy)
            })
        }
        Check::EllipticFunction => {
            if g != 1 {
                return Err(Error::WrongGenus { expected: 1, got: g });
            }
            let inputs: Vec<_> = (0..n)
                .map(|_| {
                    let a = random_cell_point(tau, &mut rng)[0];
                    let b = random_cell_point(tau, &mut rng)[0];
                    let zs: Vec<C64> = (0..8).map(|_| random_cell_point(tau, &mut rng)[0]).collect();
                    (a, b, zs)
                })
                .collect();
            par_cases(&inputs, prov, |(a, b, zs)| {
                let div = [(*a, 1), (*b, 1), (a + b, -1), (C64::new(0.0, 0.0), -1)];
                elliptic_function_from_divisor(tau, &div, policy)?.periodicity(zs)
            })
        }
        Check::Ba => {
            let f = fixture.expect("curve check");
            let inputs: Vec<_> = (0..n)
                .map(|_| {
                    let ap = random_complex_vector(f.genus, 0.5, &mut rng);
                    let windows: Vec<BaWindow> = (0..WINDOW_ATTEMPTS)
                        .map(|_| {
                            let (x, y) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                            BaWindow::new((x, x + 0.05), (y, y + 0.05), rng.gen())
                        })
                        .collect();
                    (ap, windows)
                })
                .collect();
            par_cases(&inputs, prov, |(ap, windows)| {
                let mut last = None;
                for w in windows {
                    match ba_consistency_at(&f, ap, w, policy) {
                        Ok(r) => return Ok(r.report),
                        Err(e @ Error::DivisorCollision(_)) => last = Some(e),
                        Err(e) => return Err(e),
                    }
                }
                Err(last.expect("at least one window"))
            })
        }
        Check::KpField => {
            let f = fixture.expect("curve check");
            let inputs: Vec<_> = (0..n)
                .map(|_| {
                    let lam = f.tau.lattice_vector(&random_ints(f.genus, &mut rng), &random_ints(f.genus, &mut rng));
                    let p = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1e-3));
                    (lam, p)
                })
                .collect();
            par_cases(&inputs, prov, |(lam, (x, y, t))| {
                let spec = GridSpec { x: Axis::new(*x, 0.0, 1), y: Axis::new(*y, 0.0, 1), t: Axis::new(*t, 0.0, 1) };
                let mut shifted = f.clone();
                for (zj, l) in shifted.z.iter_mut().zip(lam) {
                    *zj += l;
                }
                let a = kp_field(&f, &spec, policy)?.values[0];
                let b = kp_field(&shifted, &spec, policy)?.values[0];
                let (residual, normalizer) = match (a, b) {
                    (Some(a), Some(b)) => relative((a - b).norm(), &[a.norm(), b.norm()]),
                    (None, None) => (0.0, NORMALIZER_FLOOR),
                    _ => (f64::INFINITY, NORMALIZER_FLOOR),
                };
                Ok(ResidualReport::below("kp-field", "", residual, normalizer, FIELD_TOLERANCE))
            })
        }
        Check::KpResidual => {
            let f = fixture.expect("curve check");
            let field = kp_field(&f, &kp_residual_grid(&f), policy)?;
            let r = kp_fd_residual(&field)?.with_param("masked", field.masked());
            Ok(vec![tagged(r, case_id(0), prov)])
        }
        Check::FlexTrack => {
            let f = fixture.expect("curve check");
            let t = flex_track(&f.tau, &f.u1, &f.u2, &f.z, (0.0, 0.5), 50, policy)?;
            Ok(vec![tagged(t.eq_d, "eqD".into(), prov), tagged(t.eq_theta, "eqTheta".into(), prov)])
        }
    }
}

/// Grid of the `kp-residual` check: spacing `min(0.01, 0.05/max|D|)` per axis.
pub fn kp_residual_grid(f: &CurveFixture) -> GridSpec {
    let step = |d: &[C64]| {
        let m = d.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            0.01
        } else {
            0.01f64.min(0.05 / m)
        }
    };
    GridSpec { x: Axis::new(0.0, step(&f.u1), 11), y: Axis::new(0.0, step(&f.u2), 7), t: Axis::new(0.0, step(&f.w), 7) }
}

/// The sampled field behind the `kp-residual` check of `config`.
pub fn kp_residual_field(config: &CheckConfig) -> Result<FieldGrid> {
    let policy = config.policy.resolve()?;
    let mut rng = rng_from_seed(config.seed);
    let src = source(config, &mut rng)?;
    let f = curve(&src, &mut rng, &policy)?;
    kp_field(&f, &kp_residual_grid(&f), &policy)
}
