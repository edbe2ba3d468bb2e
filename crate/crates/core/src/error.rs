use thiserror::Error;

pub type Result<T> = std::result::Result<T, DqptError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DqptError {
    #[error("matrix is not traceless (|tr| = {trace:.3e})")]
    NonTraceless { trace: f64 },

    #[error("unsupported Hamiltonian form: {0}")]
    UnsupportedForm(String),

    /// `|ε|` fell below the exceptional-point threshold.
    #[error("exceptional point{}: |eps| = {eps:.3e}", fmt_k(*.k))]
    ExceptionalPoint { eps: f64, k: Option<f64> },

    #[error("zero biorthogonal norm ({norm:.3e})")]
    ZeroNorm { norm: f64 },

    /// A quantity that must be real carried an imaginary part above tolerance.
    #[error("{what}: imaginary residue {residue:.3e} exceeds {tolerance:.1e}{}", fmt_k(*.k))]
    ComplexResidue {
        what: &'static str,
        residue: f64,
        tolerance: f64,
        k: Option<f64>,
    },

    #[error("atanh is singular: overlap kernel m = {m_re:+.6}{m_im:+.6}i is within tolerance of ±1")]
    AtanhSingular { m_re: f64, m_im: f64 },

    #[error("dynamical phase imaginary residue {residue:.3e} with {steps} quadrature panels")]
    QuadratureResidue { residue: f64, steps: usize },

    #[error("phase step {step:.3} rad exceeds pi/2 at t = {t:.6}")]
    PhaseStepTooLarge { step: f64, t: f64 },

    #[error(
        "k grid too coarse: geometric phase step {step:.3} rad between k = {k:.6} and its neighbour at t = {t:.6}"
    )]
    GridTooCoarse { step: f64, k: f64, t: f64 },

    /// Parameters lie on (or within tolerance of) an SSH phase boundary.
    #[error("point (eta, gamma) = ({eta}, {gamma}) is on a phase boundary: {detail}")]
    OnBoundary { eta: f64, gamma: f64, detail: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

fn fmt_k(k: Option<f64>) -> String {
    match k {
        Some(k) => format!(" at k = {k:.6}"),
        None => String::new(),
    }
}

impl DqptError {
    /// Attach the offending momentum to errors raised inside a k-sweep.
    pub fn at_k(self, k_value: f64) -> Self {
        match self {
            DqptError::ExceptionalPoint { eps, .. } => DqptError::ExceptionalPoint { eps, k: Some(k_value) },
            DqptError::ComplexResidue {
                what,
                residue,
                tolerance,
                ..
            } => DqptError::ComplexResidue {
                what,
                residue,
                tolerance,
                k: Some(k_value),
            },
            other => other,
        }
    }

    /// Refusals caused by the physics of the requested point (boundaries,
    /// exceptional points) rather than by bad input or numerical trouble.
    pub fn is_refusal(&self) -> bool {
        matches!(self, DqptError::OnBoundary { .. } | DqptError::ExceptionalPoint { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, DqptError::Invalid(_))
    }
}
