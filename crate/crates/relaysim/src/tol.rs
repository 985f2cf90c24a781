//! Artifact-wide floating-point tolerance policy: relative tolerance 1e-9
//! with an absolute floor of 1e-12. All inequality and equality checks on
//! computed quantities go through these helpers so every module agrees on
//! what "holds numerically" means.

/// Relative tolerance for inequality and equality checks.
pub const REL: f64 = 1e-9;

/// Absolute floor below which differences are treated as zero.
pub const ABS: f64 = 1e-12;

fn slack(a: f64, b: f64) -> f64 {
    ABS.max(REL * a.abs().max(b.abs()))
}

/// `a <= b` up to the shared tolerance.
pub fn leq(a: f64, b: f64) -> bool {
    a <= b + slack(a, b)
}

/// `a >= b` up to the shared tolerance.
pub fn geq(a: f64, b: f64) -> bool {
    leq(b, a)
}

/// `a == b` up to the shared tolerance.
pub fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= slack(a, b)
}

/// `a == b` up to a caller-chosen relative tolerance (with the shared
/// absolute floor).
pub fn eq_rel(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= ABS.max(rel * a.abs().max(b.abs()))
}
