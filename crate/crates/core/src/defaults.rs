//! Default truncation and tolerance constants shared across the pipeline.
//!
//! Grid sizes are powers of two so coefficient extraction can use radix-2 FFTs.
//! Each constant can be overridden per call through the corresponding config
//! structs; these values are the documented defaults the CLI starts from.

/// Samples on a coefficient-extraction circle in the z plane.
pub const Z_GRID: usize = 256;

/// Samples on a w-circle (contour quadrature and torus sampling).
pub const W_GRID: usize = 256;

/// Samples in the w direction for two-variable transforms. Smaller than the
/// contour grid because w-windows are short polynomials.
pub const W_GRID_BISERIES: usize = 64;

/// Laurent index window in z.
pub const Z_WINDOW: (i32, i32) = (-64, 64);

/// Maximum retained w-degree in two-variable series.
pub const W_DEGREE: usize = 16;

/// Extra w-powers kept above the polynomial degree while iterating the
/// distorted-coefficient solver, so composition spill is representable.
pub const W_SPILL: usize = 8;

/// Pointwise magnitude below which a sampled function counts as vanishing, used
/// by inversion and contour checks.
pub const INVERTIBILITY_FLOOR: f64 = 1e-8;

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Fraction of the contour radius that roots must stay away from.
pub const CONTOUR_GUARD: f64 = 0.05;

/// Distance from an integer beyond which a winding number is rejected.
pub const WINDING_INTEGER_TOL: f64 = 1e-6;

/// Validity-ball radius for the distorted-coefficient solver.
pub const SMALLNESS_THRESHOLD: f64 = 0.1;

/// Default deformation-ball radius around a chart's base polynomial.
pub const BALL_RADIUS: f64 = 0.1;

/// Convergence tolerance on |Q| for the distorted-coefficient iteration.
pub const DWP_TOL: f64 = 1e-12;

/// Iteration cap for the distorted-coefficient solver.
pub const DWP_MAX_ITER: usize = 32;

/// Tolerance on glue residuals for Newton corrections.
pub const NEWTON_TOL: f64 = 1e-12;

/// Iteration cap for Newton corrections.
pub const NEWTON_MAX_ITER: usize = 25;

/// Step for finite-difference Jacobian columns and differential checks.
pub const FD_STEP: f64 = 1e-5;

/// Tolerance for base polynomials agreeing across an overlap.
pub const BASE_CONSISTENCY_TOL: f64 = 1e-8;

/// Allowed deviation of the leading w-coefficient from 1 before coefficient
/// extraction refuses to run.
pub const NORMALIZATION_TOL: f64 = 0.9;

/// Grid used when estimating root containment along z.
pub const CONTAINMENT_GRID: usize = 64;

/// Contour radius used for coefficient extraction when none is specified:
/// halfway between the root containment radius and the unit circle.
pub fn default_contour_radius(containment: f64) -> f64 {
    (containment + 1.0) / 2.0
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub fn next_power_of_two(n: usize) -> usize {
    n.next_power_of_two()
}
