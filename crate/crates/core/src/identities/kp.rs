use super::report::{fmt_c, relative, ResidualReport};
use crate::error::{Error, Result};
use crate::linalg::{hdot, norm};
use crate::theta::{kummer_vector_jets, theta_taylor, DirectionalJet, PeriodMatrix, ThetaTaylor, TruncationPolicy};
use crate::C64;

pub const KP_TOLERANCE: f64 = 1e-8;

/// KP directions `U, V, W` (the `x, y, t` flows) and the constant `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct KpDirections {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
    pub c: Option<C64>,
}

impl KpDirections {
    pub fn new(u: Vec<C64>, v: Vec<C64>, w: Vec<C64>, c: Option<C64>) -> Self {
        KpDirections { u, v, w, c }
    }

    pub fn zero(g: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); g];
        KpDirections { u: z.clone(), v: z.clone(), w: z, c: Some(C64::new(0.0, 0.0)) }
    }

    fn check(&self, g: usize) -> Result<()> {
        for x in [&self.u, &self.v, &self.w] {
            if x.len() != g {
                return Err(Error::DimensionMismatch { expected: g, got: x.len() });
            }
        }
        Ok(())
    }

    /// Representative of the gauge orbit
    /// `(V, W) ↦ (V + 2αU, W + 3αV + 3α²U)` with `⟨U, V⟩ = 0` (Hermitian),
    /// and the sign of `V` fixed so that its largest entry has positive real part
    /// (imaginary part when the real part vanishes). `U = 0` is returned as is.
    pub fn canonical(&self) -> KpDirections {
        let uu = hdot(&self.u, &self.u);
        if uu.norm() == 0.0 {
            return self.clone();
        }
        let alpha = -hdot(&self.u, &self.v) / (uu * 2.0);
        let v: Vec<C64> = self.v.iter().zip(&self.u).map(|(v, u)| v + u * alpha * 2.0).collect();
        let w: Vec<C64> = (0..self.u.len())
            .map(|i| self.w[i] + self.v[i] * alpha * 3.0 + self.u[i] * alpha * alpha * 3.0)
            .collect();
        let mut out = KpDirections { u: self.u.clone(), v, w, c: self.c };
        out.fix_sign();
        out
    }

    fn fix_sign(&mut self) {
        let scale = norm(&self.v);
        if scale <= 1e-300 {
            return;
        }
        let lead = self
            .v
            .iter()
            .copied()
            .fold(C64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() * (1.0 + 1e-9) { b } else { a });
        let key = if lead.re.abs() > 1e-9 * lead.norm() { lead.re } else { lead.im };
        if key < 0.0 {
            for x in &mut self.v {
                *x = -*x;
            }
        }
    }
}

/// Which printed form of the second-order theta KP system to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KummerKpVariant {
    /// `(∂_U⁴ − ∂_U∂_W + ¾∂_V² + c) Kum(0) = 0`.
    Kummer,
    /// `(∂_U⁴ − 4∂_U∂_W + 3∂_V² + c) Θ[ε](0) = 0` for every `ε`.
    SecondOrder,
}

impl KummerKpVariant {
    pub fn name(self) -> &'static str {
        match self {
            KummerKpVariant::Kummer => "kummer",
            KummerKpVariant::SecondOrder => "second-order",
        }
    }

    fn coefficients(self) -> (f64, f64) {
        match self {
            KummerKpVariant::Kummer => (1.0, 0.75),
            KummerKpVariant::SecondOrder => (4.0, 3.0),
        }
    }
}

impl std::str::FromStr for KummerKpVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kummer" => Ok(KummerKpVariant::Kummer),
            "second-order" => Ok(KummerKpVariant::SecondOrder),
            _ => Err(Error::InvalidArgument(format!("unknown kummer-kp variant {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KummerKpReport {
    pub report: ResidualReport,
    /// The constant used (fitted when the directions carry none).
    pub c: C64,
}

/// Residual of the second-order theta KP system at `z = 0`.
///
/// With `c` absent it is fitted by least squares over the `2^g` components.
/// The residual is `‖D + c·Kum(0)‖` over the largest term norm, where `D` is
/// the derivative part.
pub fn kummer_kp_residual(
    tau: &PeriodMatrix,
    dirs: &KpDirections,
    variant: KummerKpVariant,
    policy: &TruncationPolicy,
) -> Result<KummerKpReport> {
    let g = tau.genus();
    dirs.check(g)?;
    let zero = vec![C64::new(0.0, 0.0); g];
    let jets = [
        DirectionalJet::none(),
        DirectionalJet::along(&dirs.u, 4),
        DirectionalJet::along(&dirs.u, 1).then(&dirs.w, 1)?,
        DirectionalJet::along(&dirs.v, 2),
    ];
    let r = kummer_vector_jets(tau, &zero, &jets, policy)?;
    let (kw, kv) = variant.coefficients();
    let t1 = &r[1];
    let t2: Vec<C64> = r[2].iter().map(|x| -x * kw).collect();
    let t3: Vec<C64> = r[3].iter().map(|x| x * kv).collect();
    let d: Vec<C64> = (0..r[0].len()).map(|i| t1[i] + t2[i] + t3[i]).collect();
    let k = &r[0];
    let c = match dirs.c {
        Some(c) => c,
        None => {
            let kk = hdot(k, k);
            if kk.norm() == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                -hdot(k, &d) / kk
            }
        }
    };
    let ck: Vec<C64> = k.iter().map(|x| x * c).collect();
    let total: Vec<C64> = d.iter().zip(&ck).map(|(a, b)| a + b).collect();
    let (residual, normalizer) = relative(norm(&total), &[norm(t1), norm(&t2), norm(&t3), norm(&ck)]);
    let report = ResidualReport::below("kummer-kp", "", residual, normalizer, KP_TOLERANCE)
        .with_param("variant", variant.name())
        .with_param("c", fmt_c(c));
    Ok(KummerKpReport { report, c })
}

/// Terms of the Hirota form at one point, in printed order.
pub(crate) fn hirota_terms(t: &ThetaTaylor, v: &[C64], w: &[C64], c: C64) -> [C64; 8] {
    let th = t.value;
    let ty = t.along(v);
    [
        t.du[4] * th,
        -t.du[3] * t.du[1] * 4.0,
        t.du[2] * t.du[2] * 3.0,
        t.du[1] * t.along(w) * 4.0,
        -t.mixed_u(w) * th * 4.0,
        t.second(v, v) * th * 3.0,
        -ty * ty * 3.0,
        c * th * th * 8.0,
    ]
}

/// `θ_xxxxθ − 4θ_xxxθ_x + 3θ_xx² + 4θ_xθ_t − 4θ_xtθ + 3θ_yyθ − 3θ_y² + 8cθ²`
/// with `x, y, t` along `U, V, W`, normalized by the largest term.
pub fn hirota_residual(
    tau: &PeriodMatrix,
    z: &[C64],
    dirs: &KpDirections,
    policy: &TruncationPolicy,
) -> Result<ResidualReport> {
    let (sum, mags) = hirota_value(tau, z, dirs, policy)?;
    let (residual, normalizer) = relative(sum.norm(), &mags);
    Ok(ResidualReport::below("hirota", "", residual, normalizer, KP_TOLERANCE))
}

/// Unnormalized Hirota form at `z` and the magnitudes of its eight terms.
///
/// Under `z ↦ z + m₁ + τm₂` the sum picks up the square of the theta
/// automorphy factor; the individual terms do not.
pub fn hirota_value(
    tau: &PeriodMatrix,
    z: &[C64],
    dirs: &KpDirections,
    policy: &TruncationPolicy,
) -> Result<(C64, Vec<f64>)> {
    dirs.check(tau.genus())?;
    let c = dirs.c.ok_or_else(|| Error::InvalidArgument("the Hirota form needs the constant c".into()))?;
    let t = theta_taylor(tau, z, &dirs.u, policy)?;
    let terms = hirota_terms(&t, &dirs.v, &dirs.w, c);
    Ok((terms.iter().sum(), terms.iter().map(|x| x.norm()).collect()))
}

/// Max of [`hirota_residual`] over several points.
pub fn hirota_residual_max(
    tau: &PeriodMatrix,
    zs: &[Vec<C64>],
    dirs: &KpDirections,
    policy: &TruncationPolicy,
) -> Result<ResidualReport> {
    let mut worst: Option<ResidualReport> = None;
    for z in zs {
        let r = hirota_residual(tau, z, dirs, policy)?;
        if worst.as_ref().is_none_or(|w| r.residual > w.residual) {
            worst = Some(r);
        }
    }
    worst.ok_or_else(|| Error::InvalidArgument("no sample points".into())).map(|r| r.with_param("samples", zs.len()))
}

/// Least-squares `c` for the Hirota form with given `U, V, W` over `zs`,
/// each point weighted by its largest `c`-free term.
pub fn fit_hirota_constant(
    tau: &PeriodMatrix,
    zs: &[Vec<C64>],
    u: &[C64],
    v: &[C64],
    w: &[C64],
    policy: &TruncationPolicy,
) -> Result<C64> {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for z in zs {
        let t = theta_taylor(tau, z, u, policy)?;
        let terms = hirota_terms(&t, v, w, C64::new(0.0, 0.0));
        let s = terms.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let a = t.value * t.value * 8.0 / s;
        let b: C64 = terms.iter().sum::<C64>() / s;
        num -= a.conj() * b;
        den += a.norm_sqr();
    }
    if den == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(num / den)
}
