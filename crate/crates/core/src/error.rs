use thiserror::Error;

/// Errors raised by the spectral, symmetry and stability machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Right-hand side is not orthogonal to the kernel of the linearized operator.
    #[error("Fredholm solvability violated: <f, Y*> = {projection:e} with |f| = {norm:e}")]
    Fredholm { projection: f64, norm: f64 },

    #[error("pseudo-inverse applied to the kernel direction Y*")]
    Kernel,

    #[error("degenerate bifurcation: transversality gamma'(lambda*) = {0:e}")]
    DegenerateBifurcation(f64),

    #[error("amplitude |epsilon| = {0} exceeds the asymptotic validity guard 0.5")]
    AmplitudeGuard(f64),

    #[error("inverse Laplacian applied to a field with mean coefficient {0:e}")]
    MeanProjection(f64),

    #[error("Hessian prefactor is singular: min |d_psi F| = {0:e} < 1")]
    SingularHessian(f64),

    #[error("critical eigenvector tracking is ambiguous: best overlap with Y* is {0:.6}")]
    TrackingAmbiguity(f64),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
