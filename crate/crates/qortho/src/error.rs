use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid numeric context: {0}")]
    InvalidContext(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point outside the family lattice: {0}")]
    DomainViolation(String),
    #[error("series did not converge within depth {depth}: {what}")]
    NonConvergent { what: String, depth: usize },
    #[error("vanishing infinite product in a denominator: {0}")]
    DivisionByVanishingProduct(String),
    #[error("q-difference evaluated at x = 0")]
    ZeroArgument,
    #[error("overflow evaluating {0}")]
    Overflow(String),
    #[error("ill-conditioned Gram-Schmidt step at degree {degree} (pivot {pivot:e}, scale {scale:e})")]
    IllConditioned { degree: usize, pivot: f64, scale: f64 },
    #[error("routes disagree for {what}: {a:e} vs {b:e} (relative {rel:e})")]
    RouteMismatch { what: String, a: f64, b: f64, rel: f64 },
    #[error("lattice points on distinct anchors with no defined skew rule ({0}, {1})")]
    MixedEndpoint(f64, f64),
    #[error("Pfaffian of odd-dimensional matrix ({0})")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric (defect {0:e})")]
    NotSkew(f64),
    #[error("vanishing partition minor tau_{0}")]
    SingularTau(usize),
    #[error("vanishing beta_{index} = {value:e}")]
    VanishingBeta { index: usize, value: f64 },
    #[error("quaternion matrix is not self-dual (defect {0:e})")]
    NotSelfDual(f64),
    #[error("oracle term budget exceeded: {terms} > {budget}")]
    TermBudgetExceeded { terms: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Relative discrepancy of two numbers against the larger magnitude.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub(crate) fn check_routes(what: &str, a: f64, b: f64, tol: f64) -> Result<()> {
    let rel = rel_diff(a, b);
    if rel <= tol && rel.is_finite() {
        Ok(())
    } else {
        Err(Error::RouteMismatch { what: what.to_string(), a, b, rel })
    }
}

/// Absolute discrepancy measured against an externally supplied scale,
/// for quantities that may legitimately vanish.
pub(crate) fn check_scaled(what: &str, a: f64, b: f64, scale: f64, tol: f64) -> Result<()> {
    let rel = (a - b).abs() / scale.max(f64::MIN_POSITIVE);
    if rel <= tol && rel.is_finite() {
        Ok(())
    } else {
        Err(Error::RouteMismatch { what: what.to_string(), a, b, rel })
    }
}
