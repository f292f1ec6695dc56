//! Numerical calculus for holomorphic curves over annuli: Laurent series
//! arithmetic, Weierstrass normal forms, distorted-cylinder matching, Cech
//! cohomology on truncated coefficient windows, and moduli-chart assembly.

pub mod biseries;
pub mod cech;
pub mod defaults;
pub mod distorted;
pub mod error;
pub mod grid;
pub mod io;
pub mod moduli;
pub mod series;
pub mod weierstrass;

pub use biseries::{grid_quotient, substitute, BiSeries};
pub use cech::{
    assemble_coboundary, cohomology_report, cokernel_basis, h0_kernel, h1_dimension,
    split_cocycle, projective_line, two_chart_annulus, Chart, CohomologyReport,
    CoboundaryOperator, Covering, Overlap, SlotMap, TransitionKind, Truncation,
};
pub use distorted::{
    dwp_difference, dwp_iteration_step, evaluate_dwp, extract_dwp_coefficients, solve_dwp,
    solve_dwp_biseries, solve_dwp_with, DistortedCylinder, DistortedWP, DwpLinearization,
    DwpPerturbation, IterationVariant, SolveOptions, SolveStats, StepStats,
};
pub use error::{Error, Result};
pub use io::{
    biseries_from_str, biseries_to_string, dwp_from_str, dwp_to_string, family_sample_name,
    laurent_from_str, laurent_to_string, read_biseries, read_dwp, read_family_index, read_laurent,
    read_wpoly, wpoly_from_str, wpoly_to_string, write_biseries, write_dwp, write_family,
    write_laurent, write_wpoly,
};
pub use moduli::{
    build_chart, build_chart_with, chart_polynomials, continue_family, differential,
    differential_check, glue_map, overlap_chart_map, paired_annulus_config, ChartConfig,
    ChartPoint, DifferentialCheck, Family, ModuliChart, NewtonParams,
};
pub use series::{
    series_from_fn, series_from_samples, series_invert, Annulus, LaurentSeries, SmoothnessClass,
};
pub use weierstrass::{
    newton_to_elementary, polish_roots, power_sum_coefficients, roots_at, weierstrass_prep,
    weierstrass_remainder, winding_degree, PrepReport, WeierstrassPolynomial,
};

pub use num_complex::Complex64;
