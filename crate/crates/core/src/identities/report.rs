use std::fmt::Write;

/// Outcome of one identity check on one case.
///
/// `residual` is already normalized: `max |lhs - rhs| / normalizer` over the
/// sampled instances, where the normalizer is the largest participating term.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub check: String,
    pub case_id: String,
    pub params: Vec<(String, String)>,
    pub residual: f64,
    pub normalizer: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Floor used when every participating term vanishes.
pub const NORMALIZER_FLOOR: f64 = f64::MIN_POSITIVE;

impl ResidualReport {
    /// Report that passes when `residual < tolerance`.
    pub fn below(check: &str, case_id: &str, residual: f64, normalizer: f64, tolerance: f64) -> Self {
        ResidualReport {
            check: check.to_string(),
            case_id: case_id.to_string(),
            params: Vec::new(),
            residual,
            normalizer: normalizer.max(NORMALIZER_FLOOR),
            tolerance,
            pass: residual < tolerance,
        }
    }

    /// Report that passes when `residual > tolerance` (discrimination checks).
    pub fn above(check: &str, case_id: &str, residual: f64, normalizer: f64, tolerance: f64) -> Self {
        let mut r = Self::below(check, case_id, residual, normalizer, tolerance);
        r.pass = residual > tolerance;
        r
    }

    pub fn with_param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Re-evaluate `pass` against a new tolerance, keeping the direction.
    pub fn retol(mut self, tolerance: f64, below: bool) -> Self {
        self.tolerance = tolerance;
        self.pass = if below { self.residual < tolerance } else { self.residual > tolerance };
        self
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "{} [{}] residual={:e} tol={:e} {}",
            self.check,
            self.case_id,
            self.residual,
            self.tolerance,
            if self.pass { "pass" } else { "FAIL" }
        );
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={v}");
        }
        s
    }
}

/// Residual of `Σ terms` normalized by the largest term magnitude.
pub fn relative(sum_abs: f64, term_abs: &[f64]) -> (f64, f64) {
    let n = term_abs.iter().cloned().fold(0.0, f64::max);
    if n == 0.0 {
        (if sum_abs == 0.0 { 0.0 } else { f64::INFINITY }, NORMALIZER_FLOOR)
    } else {
        (sum_abs / n, n)
    }
}

/// Complex number as `re+imi` text for report parameters.
pub fn fmt_c(z: crate::C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}
