use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes across the numerical pipeline. Variants carry enough context to
/// decide whether a failure is a caller mistake (bad geometry, bad windows) or a
/// genuine numerical breakdown (contour through a root, divergent iteration).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid annulus: inner radius {inner} must satisfy 0 <= inner < outer = {outer}")]
    InvalidAnnulus { inner: f64, outer: f64 },

    #[error("invalid index window [{min}, {max}]: must satisfy min <= 0 <= max")]
    InvalidWindow { min: i32, max: i32 },

    #[error("domain mismatch: {context}")]
    DomainMismatch { context: String },

    #[error("insufficient samples: got {got}, need a power of two >= {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("not invertible on annulus: min |f| = {min_abs:.3e} on the sample grid is below the floor {floor:.1e}")]
    NotInvertible { min_abs: f64, floor: f64 },

    #[error("composition leaves annulus: |value| = {value:.6e} falls outside ({inner:.6e}, {outer:.6e})")]
    CompositionLeavesAnnulus { value: f64, inner: f64, outer: f64 },

    #[error("restriction target A[{sub_inner}, {sub_outer}] is not contained in A[{inner}, {outer}]")]
    NotContained {
        inner: f64,
        outer: f64,
        sub_inner: f64,
        sub_outer: f64,
    },

    #[error("function vanishes near the contour: min |F| = {min_abs:.3e} on the test torus is below {floor:.1e}")]
    VanishesOnContour { min_abs: f64, floor: f64 },

    #[error("winding quadrature is {value:.3e} away from the nearest integer (tol {tol:.1e})")]
    NonIntegerWinding { value: f64, tol: f64 },

    #[error("winding number {value} is negative; the function is not holomorphic in w on the disk")]
    NegativeWinding { value: i64 },

    #[error("constant term of the logarithmic contour integral is {value:.6e} at |z| sample {at}, expected the degree {degree}")]
    DegreeDrift { value: f64, at: usize, degree: usize },

    #[error("root magnitude {root_abs:.6} exceeds the guard band {band:.6} of the contour |w| = {contour:.6}")]
    GuardBandViolation {
        root_abs: f64,
        band: f64,
        contour: f64,
    },

    #[error("containment radius {radius:.6} must be < 1")]
    ContainmentTooLarge { radius: f64 },

    #[error("degree is zero: no roots inside the contour, nothing to prepare")]
    DegreeZero,

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("not normalized: leading w-coefficient deviates from 1 by {deviation:.3e} (allowed {allowed:.1e})")]
    NotNormalized { deviation: f64, allowed: f64 },

    #[error("iteration out of contraction region: |Q| = {q_norm:.6e} >= 1 at iteration {iteration}")]
    ContractionViolated { q_norm: f64, iteration: usize },

    #[error("no convergence after {iterations} iterations: last |Q| = {last_q:.3e}, last |R| = {last_r:.3e}, tol = {tol:.1e}")]
    MaxIterationsExceeded {
        iterations: usize,
        last_q: f64,
        last_r: f64,
        tol: f64,
        /// Per-iteration (|Q|, |R|) pairs, for convergence logs.
        history: Vec<(f64, f64)>,
    },

    #[error("coefficient norm {norm:.6e} exceeds the smallness threshold {threshold:.6e} for the solver's validity ball")]
    SmallnessExceeded { norm: f64, threshold: f64 },

    #[error("transition in cylinder is not the identity at w = 0: defect {defect:.3e}")]
    TransitionNotNormalized { defect: f64 },

    #[error("cylinder transitions do not invert each other: round-trip defect {defect:.3e}")]
    TransitionRoundTrip { defect: f64 },

    #[error("cylinder separation violated: |{coordinate}| = {value:.6} outside ({lo:.6}, {hi:.6}) on sampled boundary")]
    SeparationViolated {
        coordinate: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point (|z1| = {z1_abs:.6}, |w| = {w_abs:.6}) lies outside the cylinder")]
    OutsideCylinder { z1_abs: f64, w_abs: f64 },

    #[error("overlap {overlap} multiplicity {overlap_mult} does not match chart multiplicities {left_mult} / {right_mult}")]
    MultiplicityMismatch {
        overlap: usize,
        overlap_mult: usize,
        left_mult: usize,
        right_mult: usize,
    },

    #[error("transition factor on overlap {overlap} is not invertible: min |factor| = {min_abs:.3e}")]
    SingularTransitionFactor { overlap: usize, min_abs: f64 },

    #[error("covering refers to chart {chart} which does not exist ({charts} charts)")]
    UnknownChart { chart: usize, charts: usize },

    #[error("base polynomials disagree on overlap {overlap}: defect {defect:.3e} exceeds {tol:.1e}")]
    BaseInconsistent {
        overlap: usize,
        defect: f64,
        tol: f64,
    },

    #[error("target on chart {chart} lies outside the deformation ball: distance {distance:.6e} > radius {radius:.6e}")]
    TargetOutsideBall {
        chart: usize,
        distance: f64,
        radius: f64,
    },

    #[error("Newton correction diverged after {iterations} iterations: residual {residual:.3e} (best {best:.3e}, tol {tol:.1e})")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        best: f64,
        tol: f64,
    },

    #[error("continuation failed at lambda = {lambda:.6}: {source}")]
    ContinuationFailed {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("preparation on overlap {overlap} from chart {chart} failed: {source}")]
    OverlapSolveFailed {
        overlap: usize,
        chart: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse failure at line {line}: {message}")]
    ParseFormat { line: usize, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
