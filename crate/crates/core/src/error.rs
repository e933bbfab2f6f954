use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch in {what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },
    #[error("operator is not a complex structure (|A^2 + 1| = {residual:e})")]
    NotComplexStructure { residual: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("gauge action not free: smallest singular value {sigma_min:e} below {threshold:e}")]
    SmallStabilizer { sigma_min: f64, threshold: f64 },
    #[error("chart base is not a free point: smallest singular value {sigma_min:e} below {threshold:e}")]
    Freeness { sigma_min: f64, threshold: f64 },
    #[error("projection onto the level set diverged at |u| = {radius:e} (residual {residual:e})")]
    ProjectionDivergence { radius: f64, residual: f64 },
    #[error("1-form is not basic: |beta(Y*)| = {violation:e} > {tol:e}")]
    NotBasic { violation: f64, tol: f64 },
    #[error("(Jα)(Y*) or (Kα)(Y*) not constant on the chart: variation {variation:e} > {tol:e}")]
    ConstancyViolation { variation: f64, tol: f64 },
    #[error("vertical solve ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("flow left the chart (|u| = {radius:e})")]
    FlowLeftChart { radius: f64 },
    #[error("ζ = {zeta} is a pole of the twistor family")]
    Pole { zeta: String },
    #[error("no stereographic convention passes the (2,0) test (best violation {violation:e})")]
    Convention { violation: f64 },
    #[error("integrand at the truncation point is {tail:e} > {tol:e}")]
    TailTooLarge { tail: f64, tol: f64 },
    #[error("matrix is not in a Cartan subalgebra (residual {residual:e})")]
    NotInCartan { residual: f64 },
    #[error("residues at puncture {puncture} sum to {trace}, not 0")]
    TraceNotZero { puncture: usize, trace: String },
}

pub type Result<T> = std::result::Result<T, Error>;
