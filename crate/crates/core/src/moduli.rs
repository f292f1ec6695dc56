//! Deformation charts for curves presented polynomially over a covering.
//!
//! A configuration pins a covering, truncation windows, and one base
//! polynomial per chart. Coefficient tuples near the base map to the glue
//! defect on each overlap: both sides are prepared in the overlap's distorted
//! cylinder and the split forms compared coefficient by coefficient. The zero
//! set of that map, parametrized over the kernel of its differential, is the
//! chart this module builds and walks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::biseries::{grid_quotient, substitute, BiSeries};
use crate::cech::{
    self, cokernel_basis, h0_kernel, split_cocycle, Chart, CoboundaryOperator, Covering, Overlap,
    SlotMap, TransitionKind, Truncation,
};
use crate::defaults;
use crate::distorted::{
    dwp_difference, solve_dwp_biseries, DistortedCylinder, DistortedWP, DwpLinearization,
    SolveOptions, SolveStats,
};
use crate::error::{Error, Result};
use crate::grid::grid_for_window;
use crate::series::{Annulus, LaurentSeries, SmoothnessClass};
use crate::weierstrass::WeierstrassPolynomial;

/// Relative mass a base coefficient may lose to window truncation.
const WINDOW_LOSS_TOL: f64 = 1e-10;

/// Relative realization defect above which differential columns are divided
/// by the base's unit factor.
const UNIT_DEFECT_TOL: f64 = 1e-10;

/// A covering with one defining polynomial per chart and the truncation,
/// solver, and trust-ball data every chart operation shares.
#[derive(Debug, Clone)]
pub struct ChartConfig {
    covering: Covering,
    truncation: Truncation,
    base_polys: Vec<WeierstrassPolynomial>,
    base_sections: Vec<Vec<LaurentSeries>>,
    ball_radii: Vec<f64>,
    solve: SolveOptions,
    rank_tol: f64,
    source: SlotMap,
    target: SlotMap,
}

impl ChartConfig {
    /// Validates the pieces against each other and certifies that the base
    /// polynomials describe the same divisor on every overlap.
    pub fn new(
        covering: Covering,
        truncation: Truncation,
        base_polys: Vec<WeierstrassPolynomial>,
        ball_radii: Vec<f64>,
        solve: SolveOptions,
        rank_tol: f64,
    ) -> Result<Self> {
        let charts = covering.charts().len();
        if base_polys.len() != charts {
            return Err(Error::Config(format!(
                "need one base polynomial per chart: {} charts, {} polynomials",
                charts,
                base_polys.len()
            )));
        }
        if ball_radii.len() != charts {
            return Err(Error::Config(format!(
                "need one ball radius per chart: {} charts, {} radii",
                charts,
                ball_radii.len()
            )));
        }
        if ball_radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("ball radii must be positive and finite".into()));
        }
        if !(rank_tol.is_finite() && rank_tol > 0.0) {
            return Err(Error::Config("rank tolerance must be positive".into()));
        }
        let source = cech::source_slots(&covering, &truncation)?;
        let target = cech::target_slots(&covering, &truncation)?;

        let mut base_sections = Vec::with_capacity(charts);
        for (ci, (chart, poly)) in covering.charts().iter().zip(&base_polys).enumerate() {
            if poly.degree() != chart.multiplicity {
                return Err(Error::Config(format!(
                    "chart {ci} has multiplicity {} but its polynomial has degree {}",
                    chart.multiplicity,
                    poly.degree()
                )));
            }
            if !poly.z_domain().contains(&chart.domain) {
                return Err(Error::Config(format!(
                    "base polynomial on chart {ci} does not cover the chart domain"
                )));
            }
            let (min, max) = truncation.chart_windows[ci];
            let mut sections = Vec::with_capacity(poly.degree());
            for i in 1..=poly.degree() {
                let c = poly.coefficient(i).restrict(chart.domain)?;
                let (clipped, lost) = c.truncated(min, max)?;
                if lost > WINDOW_LOSS_TOL * (1.0 + c.l2_norm()) {
                    return Err(Error::Config(format!(
                        "coefficient {i} on chart {ci} carries mass {lost:.3e} outside the window [{min}, {max}]"
                    )));
                }
                sections.push(clipped);
            }
            base_sections.push(sections);
        }

        for (oi, ov) in covering.overlaps().iter().enumerate() {
            if ov.kind != TransitionKind::Concentric {
                return Err(Error::Config(format!(
                    "overlap {oi} inverts the coordinate; chart construction needs concentric overlaps"
                )));
            }
            let Some(cyl) = ov.cylinder.as_ref() else {
                return Err(Error::Config(format!(
                    "overlap {oi} carries no distorted cylinder"
                )));
            };
            if cyl.annulus() != ov.domain {
                return Err(Error::DomainMismatch {
                    context: format!("cylinder on overlap {oi} does not live on the overlap domain"),
                });
            }
            if ov.multiplicity >= 2 && !factor_is_one(&ov.factor) {
                return Err(Error::Config(format!(
                    "transition factor on overlap {oi} must be 1 at multiplicity >= 2; a fiber factor would scale each level by a different power"
                )));
            }
        }

        let cfg = ChartConfig {
            covering,
            truncation,
            base_polys,
            base_sections,
            ball_radii,
            solve,
            rank_tol,
            source,
            target,
        };
        for oi in 0..cfg.covering.overlaps().len() {
            let ov = &cfg.covering.overlaps()[oi];
            let (l, _) = cfg.side_solve(oi, false, &cfg.base_sections[ov.left])?;
            let (r, _) = cfg.side_solve(oi, true, &cfg.base_sections[ov.right])?;
            let defect = l.distance(&r)?;
            if defect > defaults::BASE_CONSISTENCY_TOL {
                return Err(Error::BaseInconsistent {
                    overlap: oi,
                    defect,
                    tol: defaults::BASE_CONSISTENCY_TOL,
                });
            }
        }
        Ok(cfg)
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn base_polynomials(&self) -> &[WeierstrassPolynomial] {
        &self.base_polys
    }

    pub fn ball_radii(&self) -> &[f64] {
        &self.ball_radii
    }

    pub fn solve_options(&self) -> SolveOptions {
        self.solve
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn source_map(&self) -> &SlotMap {
        &self.source
    }

    pub fn target_map(&self) -> &SlotMap {
        &self.target
    }

    /// The base polynomials flattened into slot coordinates.
    pub fn base_point(&self) -> DVector<Complex64> {
        self.to_vector(&self.base_sections)
            .expect("base sections fit their windows by construction")
    }

    /// Flattens per-chart coefficient tuples into a slot vector. Coefficient
    /// mass outside the windows must be negligible.
    pub fn to_vector(&self, sections: &[Vec<LaurentSeries>]) -> Result<DVector<Complex64>> {
        if sections.len() != self.covering.charts().len() {
            return Err(Error::Config(format!(
                "expected sections for {} charts, got {}",
                self.covering.charts().len(),
                sections.len()
            )));
        }
        let mut out = DVector::from_element(self.source.total(), Complex64::default());
        for (ci, levels) in sections.iter().enumerate() {
            let spec = self.source.block(ci);
            if levels.len() != spec.levels {
                return Err(Error::Config(format!(
                    "chart {ci} needs {} coefficients, got {}",
                    spec.levels,
                    levels.len()
                )));
            }
            let (min, max) = (spec.min, spec.max);
            for (level, c) in levels.iter().enumerate() {
                for k in c.indices() {
                    let v = c.coeff(k);
                    if k < min || k > max {
                        if v.norm() > WINDOW_LOSS_TOL {
                            return Err(Error::Config(format!(
                                "coefficient {} on chart {ci} has weight {:.3e} at index {k}, outside [{min}, {max}]",
                                level + 1,
                                v.norm()
                            )));
                        }
                        continue;
                    }
                    out[self.source.slot(ci, level, k)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Reads a slot vector back into per-chart coefficient tuples.
    pub fn to_sections(&self, f: &DVector<Complex64>) -> Result<Vec<Vec<LaurentSeries>>> {
        if f.len() != self.source.total() {
            return Err(Error::Config(format!(
                "slot vector has length {}, layout needs {}",
                f.len(),
                self.source.total()
            )));
        }
        let mut out = Vec::with_capacity(self.covering.charts().len());
        for (ci, chart) in self.covering.charts().iter().enumerate() {
            let spec = self.source.block(ci);
            let mut levels = Vec::with_capacity(spec.levels);
            for level in 0..spec.levels {
                let mut c = LaurentSeries::zero(chart.domain, spec.min, spec.max)?;
                for k in spec.min..=spec.max {
                    c.set_coeff(k, f[self.source.slot(ci, level, k)]);
                }
                levels.push(c);
            }
            out.push(levels);
        }
        Ok(out)
    }

    /// Grows every window, disks only outward. Revalidates from scratch.
    pub fn with_grown_windows(&self, extra: i32) -> Result<Self> {
        let mut t = self.truncation.clone();
        for (ci, w) in t.chart_windows.iter_mut().enumerate() {
            if !self.covering.charts()[ci].domain.is_disk() {
                w.0 -= extra;
            }
            w.1 += extra;
        }
        for w in t.overlap_windows.iter_mut() {
            w.0 -= extra;
            w.1 += extra;
        }
        ChartConfig::new(
            self.covering.clone(),
            t,
            self.base_polys.clone(),
            self.ball_radii.clone(),
            self.solve,
            self.rank_tol,
        )
    }

    fn ball_check(&self, sections: &[Vec<LaurentSeries>]) -> Result<()> {
        for (ci, chart) in self.covering.charts().iter().enumerate() {
            let mut distance = 0.0f64;
            for (level, c) in sections[ci].iter().enumerate() {
                let diff = c.sub(&self.base_sections[ci][level])?;
                distance = distance.max(diff.s_norm(chart.smoothness));
            }
            if distance > self.ball_radii[ci] {
                return Err(Error::TargetOutsideBall {
                    chart: ci,
                    distance,
                    radius: self.ball_radii[ci],
                });
            }
        }
        Ok(())
    }

    /// z-window every solve on overlap `o` runs on: wide enough to hold both
    /// charts' windows and the overlap's own.
    fn solve_window(&self, o: usize) -> (i32, i32) {
        let ov = &self.covering.overlaps()[o];
        let (omin, omax) = self.truncation.overlap_windows[o];
        let (lmin, lmax) = self.truncation.chart_windows[ov.left];
        let (rmin, rmax) = self.truncation.chart_windows[ov.right];
        (omin.min(lmin).min(rmin), omax.max(lmax).max(rmax))
    }

    fn overlap_cylinder(&self, o: usize) -> &DistortedCylinder {
        self.covering.overlaps()[o]
            .cylinder
            .as_ref()
            .expect("validated at construction")
    }

    /// Sum of one side's coefficient terms on the overlap, without the monic
    /// head. The right side is rewritten in the left coordinate through the
    /// transition and picks up the overlap factor.
    fn side_sum(&self, o: usize, right: bool, coeffs: &[LaurentSeries]) -> Result<BiSeries> {
        let ov = &self.covering.overlaps()[o];
        let cyl = self.overlap_cylinder(o);
        let n = ov.multiplicity;
        let (z_min, z_max) = self.solve_window(o);
        let w_degree = n + self.solve.spill_degrees;
        let mut sum = BiSeries::zero(cyl.annulus(), cyl.rho(), z_min, z_max, w_degree)?;
        let direct = !right || cyl.is_identity();
        let mz = grid_for_window(z_min, z_max);
        for (idx, c) in coeffs.iter().enumerate() {
            let level = n - 1 - idx;
            if c.l2_norm() == 0.0 {
                continue;
            }
            if direct {
                for k in c.indices() {
                    if k >= z_min && k <= z_max {
                        sum.set_coeff(k, level, c.coeff(k));
                    }
                }
            } else {
                let budget = w_degree - level;
                let mw = (2 * grid_for_window(0, budget as i32)).max(16);
                let composed = substitute(c, cyl.transition(), z_min, z_max, budget, mz, mw)?;
                sum = sum.add(&composed.mul_w_power(level))?;
            }
        }
        if right && !factor_is_one(&ov.factor) {
            let factor = BiSeries::from_laurent(&ov.factor.restrict(ov.domain)?, cyl.rho(), 0)?;
            sum = sum.multiply(&factor)?.truncated(z_min, z_max, w_degree)?.0;
        }
        Ok(sum)
    }

    fn side_biseries(&self, o: usize, right: bool, coeffs: &[LaurentSeries]) -> Result<BiSeries> {
        let n = self.covering.overlaps()[o].multiplicity;
        let mut f = self.side_sum(o, right, coeffs)?;
        f.set_coeff(0, n, f.coeff(0, n) + Complex64::ONE);
        Ok(f)
    }

    fn side_solve(
        &self,
        o: usize,
        right: bool,
        coeffs: &[LaurentSeries],
    ) -> Result<(DistortedWP, SolveStats)> {
        let ov = &self.covering.overlaps()[o];
        let chart = if right { ov.right } else { ov.left };
        let f = self.side_biseries(o, right, coeffs)?;
        solve_dwp_biseries(&f, self.overlap_cylinder(o), ov.multiplicity, self.solve).map_err(
            |e| Error::OverlapSolveFailed {
                overlap: o,
                chart,
                source: Box::new(e),
            },
        )
    }
}

fn factor_is_one(factor: &LaurentSeries) -> bool {
    factor.indices().all(|k| {
        let c = factor.coeff(k);
        if k == 0 {
            c == Complex64::ONE
        } else {
            c == Complex64::default()
        }
    })
}

fn weighted(w: &DVector<f64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_fn(v.len(), |i, _| v[i] * w[i])
}

/// Prepares one chart's coefficient tuple on one overlap it touches. The
/// tuple must stay inside the chart's trust ball.
pub fn overlap_chart_map(
    cfg: &ChartConfig,
    chart: usize,
    coeffs: &[LaurentSeries],
    overlap: usize,
) -> Result<(DistortedWP, SolveStats)> {
    let Some(ov) = cfg.covering.overlaps().get(overlap) else {
        return Err(Error::Config(format!(
            "overlap {overlap} does not exist ({} overlaps)",
            cfg.covering.overlaps().len()
        )));
    };
    let right = if chart == ov.left {
        false
    } else if chart == ov.right {
        true
    } else {
        return Err(Error::Config(format!(
            "chart {chart} does not touch overlap {overlap}"
        )));
    };
    if coeffs.len() != ov.multiplicity {
        return Err(Error::Config(format!(
            "expected {} coefficients, got {}",
            ov.multiplicity,
            coeffs.len()
        )));
    }
    let smoothness = cfg.covering.charts()[chart].smoothness;
    let mut distance = 0.0f64;
    for (level, c) in coeffs.iter().enumerate() {
        let diff = c.sub(&cfg.base_sections[chart][level])?;
        distance = distance.max(diff.s_norm(smoothness));
    }
    if distance > cfg.ball_radii[chart] {
        return Err(Error::TargetOutsideBall {
            chart,
            distance,
            radius: cfg.ball_radii[chart],
        });
    }
    cfg.side_solve(overlap, right, coeffs)
}

/// Glue defect of a coefficient tuple: on each overlap, the split-form
/// difference between the two prepared sides, flattened onto the target
/// slots. Zero exactly on tuples describing one global curve.
pub fn glue_map(cfg: &ChartConfig, f: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let sections = cfg.to_sections(f)?;
    cfg.ball_check(&sections)?;
    let mut out = DVector::from_element(cfg.target.total(), Complex64::default());
    for (oi, ov) in cfg.covering.overlaps().iter().enumerate() {
        let (l, _) = cfg.side_solve(oi, false, &sections[ov.left])?;
        let (r, _) = cfg.side_solve(oi, true, &sections[ov.right])?;
        let d = dwp_difference(&l, &r)?;
        let spec = cfg.target.block(oi);
        for level in 0..spec.levels {
            let i = level + 1;
            for k in spec.min..=spec.max {
                let v = if k < 0 {
                    d.minus(i).coeff(k)
                } else {
                    d.plus(i).coeff(k)
                };
                out[cfg.target.slot(oi, level, k)] = v;
            }
        }
    }
    Ok(out)
}

/// Differential of the glue map at the base, column by column: each slot
/// direction is pushed through the derivative of the preparation on every
/// overlap its chart touches. Packaged with the same weights the linear
/// coboundary carries so the kernel and cokernel splitters apply unchanged.
pub fn differential(cfg: &ChartConfig) -> Result<CoboundaryOperator> {
    let source = cfg.source.clone();
    let target = cfg.target.clone();
    let mut matrix = DMatrix::from_element(target.total(), source.total(), Complex64::default());
    for (oi, ov) in cfg.covering.overlaps().iter().enumerate() {
        let cyl = cfg.overlap_cylinder(oi);
        let n = ov.multiplicity;
        let (z_min, z_max) = cfg.solve_window(oi);
        let w_degree = n + cfg.solve.spill_degrees;
        let mz = grid_for_window(z_min, z_max);
        let mw = (2 * grid_for_window(0, w_degree as i32)).max(16);
        let factor_bi = if factor_is_one(&ov.factor) {
            None
        } else {
            Some(BiSeries::from_laurent(
                &ov.factor.restrict(ov.domain)?,
                cyl.rho(),
                0,
            )?)
        };

        for &(chart, right) in &[(ov.left, false), (ov.right, true)] {
            let (base_dwp, _) = cfg.side_solve(oi, right, &cfg.base_sections[chart])?;
            let lin = DwpLinearization::new(&base_dwp, cyl, z_min, z_max, w_degree, cfg.solve)?;
            // Unit factor of the base: when realizing the prepared base does
            // not reproduce the raw input, directions are divided by the
            // quotient before differentiating.
            let raw = cfg.side_biseries(oi, right, &cfg.base_sections[chart])?;
            let defect = raw.sub(lin.base_realization())?.l2_norm();
            let unit = if defect > UNIT_DEFECT_TOL * (1.0 + raw.l2_norm()) {
                Some(grid_quotient(
                    &raw,
                    lin.base_realization(),
                    z_min,
                    z_max,
                    w_degree,
                    mz,
                    mw,
                    defaults::INVERTIBILITY_FLOOR,
                )?)
            } else {
                None
            };
            let sign = if right { -Complex64::ONE } else { Complex64::ONE };
            let sspec = source.block(chart);
            let tspec = target.block(oi);
            let direct = !right || cyl.is_identity();
            for level in 0..sspec.levels {
                let w_power = n - 1 - level;
                for k in sspec.min..=sspec.max {
                    let col = source.slot(chart, level, k);
                    let mut v = if direct {
                        let mut v =
                            BiSeries::zero(cyl.annulus(), cyl.rho(), z_min, z_max, w_degree)?;
                        v.set_coeff(k, w_power, Complex64::ONE);
                        v
                    } else {
                        let mono = LaurentSeries::monomial(
                            cfg.covering.charts()[chart].domain,
                            k,
                            Complex64::ONE,
                        )?;
                        let budget = w_degree - w_power;
                        let mwb = (2 * grid_for_window(0, budget as i32)).max(16);
                        substitute(&mono, cyl.transition(), z_min, z_max, budget, mz, mwb)?
                            .mul_w_power(w_power)
                    };
                    if right {
                        if let Some(factor) = &factor_bi {
                            v = v.multiply(factor)?.truncated(z_min, z_max, w_degree)?.0;
                        }
                    }
                    if let Some(u) = &unit {
                        v = grid_quotient(
                            &v,
                            u,
                            z_min,
                            z_max,
                            w_degree,
                            mz,
                            mw,
                            defaults::INVERTIBILITY_FLOOR,
                        )?;
                    }
                    let t = lin.apply(&v).map_err(|e| Error::OverlapSolveFailed {
                        overlap: oi,
                        chart,
                        source: Box::new(e),
                    })?;
                    for level_t in 0..tspec.levels {
                        let i = level_t + 1;
                        for kt in tspec.min..=tspec.max {
                            let val = if kt < 0 {
                                t.minus(i).coeff(kt)
                            } else {
                                t.plus(i).coeff(kt)
                            };
                            if val != Complex64::default() {
                                matrix[(target.slot(oi, level_t, kt), col)] += sign * val;
                            }
                        }
                    }
                }
            }
        }
    }
    let sw = cech::source_weight_vector(&cfg.covering, &source);
    let tw = cech::target_weight_vector(&cfg.covering, &target);
    Ok(cech::operator_from_raw(source, target, matrix, sw, tw))
}

/// Outcome of comparing the assembled differential against central finite
/// differences of the glue map.
#[derive(Debug, Clone)]
pub struct DifferentialCheck {
    /// Frobenius-relative error of the full finite-difference Jacobian.
    pub matrix_error: f64,
    /// Worst relative error along the seeded random directions.
    pub probe_error: f64,
    pub columns: usize,
}

impl DifferentialCheck {
    pub fn worst(&self) -> f64 {
        self.matrix_error.max(self.probe_error)
    }
}

/// Central-difference check of the differential at the base point: the full
/// Jacobian slot by slot, plus `probes` random directions drawn from `seed`.
/// The evaluations run at a tightened solver tolerance so the comparison sees
/// the step error, not the solver's.
pub fn differential_check(
    cfg: &ChartConfig,
    op: &CoboundaryOperator,
    step: f64,
    probes: usize,
    seed: u64,
) -> Result<DifferentialCheck> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config("finite-difference step must be positive".into()));
    }
    let mut fd_cfg = cfg.clone();
    fd_cfg.solve.tol = fd_cfg.solve.tol.min(1e-13);
    fd_cfg.solve.max_iter += 16;
    let base = cfg.base_point();
    let nrows = op.target().total();
    let ncols = op.source().total();
    let mut raw = op.matrix().clone();
    for r in 0..nrows {
        for c in 0..ncols {
            raw[(r, c)] *= op.source_weights()[c] / op.target_weights()[r];
        }
    }
    let h = Complex64::new(step, 0.0);
    let mut fd = DMatrix::from_element(nrows, ncols, Complex64::default());
    for c in 0..ncols {
        let mut fp = base.clone();
        fp[c] += h;
        let mut fm = base.clone();
        fm[c] -= h;
        let gp = glue_map(&fd_cfg, &fp)?;
        let gm = glue_map(&fd_cfg, &fm)?;
        for r in 0..nrows {
            fd[(r, c)] = (gp[r] - gm[r]) / (2.0 * step);
        }
    }
    let matrix_error = (&fd - &raw).norm() / raw.norm().max(1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe_error = 0.0f64;
    for _ in 0..probes {
        let mut v = DVector::from_fn(ncols, |_, _| {
            Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        });
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        v = v.map(|x| x / norm);
        let fp = &base + &v.map(|x| x * h);
        let fm = &base - &v.map(|x| x * h);
        let gp = glue_map(&fd_cfg, &fp)?;
        let gm = glue_map(&fd_cfg, &fm)?;
        let fdv = (gp - gm).map(|x| x / (2.0 * step));
        let jv = op.apply_raw(&v);
        let denom = jv.norm().max(fdv.norm()).max(1e-8);
        probe_error = probe_error.max((&fdv - &jv).norm() / denom);
    }
    Ok(DifferentialCheck {
        matrix_error,
        probe_error,
        columns: ncols,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            tol: defaults::NEWTON_TOL,
            max_iter: defaults::NEWTON_MAX_ITER,
        }
    }
}

/// A Newton-corrected point of the chart.
#[derive(Debug, Clone)]
pub struct ChartPoint {
    /// Coefficient tuple in slot coordinates.
    pub point: DVector<Complex64>,
    /// Weighted solvable-residual norm at each Newton evaluation.
    pub residuals: Vec<f64>,
    /// Projections of the final glue defect on the obstruction basis.
    pub obstruction: Vec<Complex64>,
}

/// The solution chart at a base configuration: tangent and obstruction bases
/// of the differential plus the Newton parameters used to land on it.
#[derive(Debug)]
pub struct ModuliChart {
    config: ChartConfig,
    operator: CoboundaryOperator,
    tangent: Vec<DVector<Complex64>>,
    obstructions: Vec<DVector<Complex64>>,
    weighted_obstructions: Vec<DVector<Complex64>>,
    flagged_artifacts: usize,
    singular_values: Vec<f64>,
    window_stable: bool,
    newton: NewtonParams,
}

pub fn build_chart(cfg: ChartConfig) -> Result<ModuliChart> {
    build_chart_with(cfg, NewtonParams::default())
}

/// Assembles the differential, splits its kernel and cokernel, and probes the
/// obstruction count for stability under window growth.
pub fn build_chart_with(cfg: ChartConfig, newton: NewtonParams) -> Result<ModuliChart> {
    if !(newton.tol.is_finite() && newton.tol > 0.0) || newton.max_iter == 0 {
        return Err(Error::Config("Newton parameters must be positive".into()));
    }
    let operator = differential(&cfg)?;
    let tangent = h0_kernel(&operator, cfg.rank_tol);
    let (obstructions, flagged_artifacts) = cokernel_basis(&operator, cfg.rank_tol);
    let singular_values = operator.singular_values();

    // The tangent count scales with the windows on open charts; the
    // obstruction count must not.
    let grown = cfg.with_grown_windows(4)?;
    let gop = differential(&grown)?;
    let (gobs, _) = cokernel_basis(&gop, grown.rank_tol);
    let window_stable = gobs.len() == obstructions.len();

    let weighted_obstructions = obstructions
        .iter()
        .map(|b| weighted(operator.target_weights(), b))
        .collect();
    Ok(ModuliChart {
        config: cfg,
        operator,
        tangent,
        obstructions,
        weighted_obstructions,
        flagged_artifacts,
        singular_values,
        window_stable,
        newton,
    })
}

impl ModuliChart {
    pub fn config(&self) -> &ChartConfig {
        &self.config
    }

    pub fn operator(&self) -> &CoboundaryOperator {
        &self.operator
    }

    pub fn tangent_basis(&self) -> &[DVector<Complex64>] {
        &self.tangent
    }

    pub fn tangent_dimension(&self) -> usize {
        self.tangent.len()
    }

    pub fn obstruction_basis(&self) -> &[DVector<Complex64>] {
        &self.obstructions
    }

    pub fn obstruction_dimension(&self) -> usize {
        self.obstructions.len()
    }

    pub fn flagged_artifacts(&self) -> usize {
        self.flagged_artifacts
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn window_stable(&self) -> bool {
        self.window_stable
    }

    pub fn newton_params(&self) -> NewtonParams {
        self.newton
    }

    pub fn base_point(&self) -> DVector<Complex64> {
        self.config.base_point()
    }

    /// Weighted projections of `f - base` on the tangent basis.
    pub fn tangent_coordinates(&self, f: &DVector<Complex64>) -> Vec<Complex64> {
        let sw = self.operator.source_weights();
        let d = f - self.base_point();
        let dw = weighted(sw, &d);
        self.tangent.iter().map(|v| weighted(sw, v).dotc(&dw)).collect()
    }

    /// The chart point with the given tangent coordinates.
    pub fn point_at(&self, t: &[Complex64]) -> Result<ChartPoint> {
        if t.len() != self.tangent.len() {
            return Err(Error::Config(format!(
                "expected {} tangent coordinates, got {}",
                self.tangent.len(),
                t.len()
            )));
        }
        let mut f = self.base_point();
        for (c, v) in t.iter().zip(&self.tangent) {
            f += v.map(|x| x * c);
        }
        self.correct(f)
    }

    /// Newton correction transverse to the tangent directions: each step
    /// subtracts the minimum-norm splitting of the current glue defect, which
    /// leaves the tangent coordinates fixed. Converged when the solvable part
    /// of the defect is below tolerance; obstruction components may persist
    /// and are reported, not corrected.
    pub fn correct(&self, start: DVector<Complex64>) -> Result<ChartPoint> {
        let mut f = start;
        let mut residuals = Vec::new();
        let mut best = f64::INFINITY;
        loop {
            let r = glue_map(&self.config, &f)?;
            let (obstruction, solvable) = self.split_residual(&r);
            residuals.push(solvable);
            if solvable <= self.newton.tol {
                return Ok(ChartPoint {
                    point: f,
                    residuals,
                    obstruction,
                });
            }
            if solvable > 4.0 * best || residuals.len() > self.newton.max_iter {
                return Err(Error::NewtonDiverged {
                    iterations: residuals.len() - 1,
                    residual: solvable,
                    best: best.min(solvable),
                    tol: self.newton.tol,
                });
            }
            best = best.min(solvable);
            let (delta, _) = split_cocycle(&self.operator, &r)?;
            f -= delta;
        }
    }

    /// Obstruction projections of a raw defect vector and the weighted norm
    /// of what remains.
    fn split_residual(&self, r: &DVector<Complex64>) -> (Vec<Complex64>, f64) {
        let tw = self.operator.target_weights();
        let mut rw = weighted(tw, r);
        let mut coeffs = Vec::with_capacity(self.weighted_obstructions.len());
        for bw in &self.weighted_obstructions {
            let c = bw.dotc(&rw);
            rw -= bw.map(|x| x * c);
            coeffs.push(c);
        }
        (coeffs, rw.norm())
    }
}

/// A sampled one-parameter family inside a chart.
#[derive(Debug, Clone)]
pub struct Family {
    pub lambdas: Vec<f64>,
    pub points: Vec<DVector<Complex64>>,
    /// Converged solvable residual at each sample.
    pub residuals: Vec<f64>,
    /// Distance between the final sample and the requested target.
    pub endpoint_defect: f64,
}

/// Walks the straight line from the base to the target in tangent
/// coordinates, Newton-correcting each of `steps + 1` samples and
/// warm-starting every solve from the previous point.
pub fn continue_family(
    chart: &ModuliChart,
    target: &DVector<Complex64>,
    steps: usize,
) -> Result<Family> {
    if steps == 0 {
        return Err(Error::Config("continuation needs at least one step".into()));
    }
    let cfg = chart.config();
    if target.len() != cfg.source_map().total() {
        return Err(Error::Config(format!(
            "target has length {}, layout needs {}",
            target.len(),
            cfg.source_map().total()
        )));
    }
    cfg.ball_check(&cfg.to_sections(target)?)?;
    let t_target = chart.tangent_coordinates(target);
    let mut lambdas = Vec::with_capacity(steps + 1);
    let mut points: Vec<DVector<Complex64>> = Vec::with_capacity(steps + 1);
    let mut residuals = Vec::with_capacity(steps + 1);
    let mut warm = chart.base_point();
    let mut t_prev = vec![Complex64::default(); t_target.len()];
    for s in 0..=steps {
        let lambda = s as f64 / steps as f64;
        let t_s: Vec<Complex64> = t_target.iter().map(|c| c * lambda).collect();
        let mut start = warm.clone();
        for ((c, p), v) in t_s.iter().zip(&t_prev).zip(chart.tangent_basis()) {
            let dc = c - p;
            start += v.map(|x| x * dc);
        }
        let pt = chart
            .correct(start)
            .map_err(|e| Error::ContinuationFailed {
                lambda,
                source: Box::new(e),
            })?;
        residuals.push(pt.residuals.last().copied().unwrap_or(0.0));
        warm = pt.point.clone();
        points.push(pt.point);
        lambdas.push(lambda);
        t_prev = t_s;
    }
    let endpoint_defect = (points.last().expect("steps >= 1") - target).norm();
    Ok(Family {
        lambdas,
        points,
        residuals,
        endpoint_defect,
    })
}

/// Reads one chart's coefficient tuple out of a slot vector and certifies it
/// as a polynomial over that chart.
pub fn chart_polynomials(
    cfg: &ChartConfig,
    f: &DVector<Complex64>,
    chart: usize,
) -> Result<WeierstrassPolynomial> {
    if chart >= cfg.covering().charts().len() {
        return Err(Error::UnknownChart {
            chart,
            charts: cfg.covering().charts().len(),
        });
    }
    let sections = cfg.to_sections(f)?;
    WeierstrassPolynomial::new(sections[chart].clone())
}

/// Two annular charts around the unit circle joined by a sheared overlap
/// cylinder. Chart 0 carries w^2 = z/4 on A(0.5, 1.2); chart 1 carries the
/// same curve written in its own coordinate z2 = z1 + shear * w on
/// A(0.9, 2.0). The overlap is A(0.9, 1.2) with fiber radius 0.9; shear = 0
/// degenerates to the identity transition.
pub fn paired_annulus_config(
    shear: f64,
    half_window: i32,
    class: SmoothnessClass,
) -> Result<ChartConfig> {
    let left_dom = Annulus::new(0.5, 1.2)?;
    let right_dom = Annulus::new(0.9, 2.0)?;
    let overlap_dom = Annulus::new(0.9, 1.2)?;
    let rho = 0.9;
    let charts = vec![
        Chart {
            domain: left_dom,
            multiplicity: 2,
            smoothness: class,
        },
        Chart {
            domain: right_dom,
            multiplicity: 2,
            smoothness: class,
        },
    ];
    let overlaps = vec![Overlap {
        left: 0,
        right: 1,
        domain: overlap_dom,
        multiplicity: 2,
        kind: TransitionKind::Concentric,
        factor: LaurentSeries::constant(overlap_dom, Complex64::ONE)?,
        cylinder: Some(DistortedCylinder::shear(overlap_dom, rho, shear)?),
    }];
    let covering = Covering::new(charts, overlaps)?;
    let truncation = Truncation {
        chart_windows: vec![(-half_window, half_window); 2],
        overlap_windows: vec![(-half_window, half_window)],
    };
    let quarter = Complex64::new(0.25, 0.0);
    let f1_left = LaurentSeries::zero(left_dom, 0, 1)?;
    let mut f2_left = LaurentSeries::zero(left_dom, 0, 1)?;
    f2_left.set_coeff(1, -quarter);
    let mut f1_right = LaurentSeries::zero(right_dom, 0, 1)?;
    f1_right.set_coeff(0, Complex64::new(shear / 4.0, 0.0));
    let mut f2_right = LaurentSeries::zero(right_dom, 0, 1)?;
    f2_right.set_coeff(1, -quarter);
    let solve = SolveOptions {
        smallness_threshold: 1.0,
        class,
        ..SolveOptions::default()
    };
    ChartConfig::new(
        covering,
        truncation,
        vec![
            WeierstrassPolynomial::new(vec![f1_left, f2_left])?,
            WeierstrassPolynomial::new(vec![f1_right, f2_right])?,
        ],
        vec![defaults::BALL_RADIUS; 2],
        solve,
        defaults::RANK_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::assemble_coboundary;
    use crate::weierstrass::{roots_at, weierstrass_prep};

    fn sob1() -> SmoothnessClass {
        SmoothnessClass::sobolev(1.0).unwrap()
    }

    fn shear_config(eps: f64, hw: i32) -> ChartConfig {
        paired_annulus_config(eps, hw, sob1()).unwrap()
    }

    #[test]
    fn paired_config_certifies_base_consistency() {
        let cfg = shear_config(0.05, 8);
        assert_eq!(cfg.source_map().total(), 2 * 2 * 17);
        assert_eq!(cfg.target_map().total(), 2 * 17);
        let base = cfg.base_point();
        // f2 = -z/4 on both charts, f1 constant eps/4 on chart 1
        assert_eq!(base[cfg.source_map().slot(0, 1, 1)], Complex64::new(-0.25, 0.0));
        assert_eq!(base[cfg.source_map().slot(1, 0, 0)], Complex64::new(0.0125, 0.0));

        // same curve expression on both charts is inconsistent under a shear
        let good = shear_config(0.05, 8);
        let wrong_polys = vec![good.base_polynomials()[0].clone(), {
            let dom = good.covering().charts()[1].domain;
            let f1 = LaurentSeries::zero(dom, 0, 1).unwrap();
            let mut f2 = LaurentSeries::zero(dom, 0, 1).unwrap();
            f2.set_coeff(1, Complex64::new(-0.25, 0.0));
            WeierstrassPolynomial::new(vec![f1, f2]).unwrap()
        }];
        let err = ChartConfig::new(
            good.covering().clone(),
            good.truncation().clone(),
            wrong_polys,
            good.ball_radii().to_vec(),
            good.solve_options(),
            good.rank_tol(),
        )
        .unwrap_err();
        match err {
            Error::BaseInconsistent { overlap: 0, defect, tol } => {
                assert!(defect > tol, "defect {defect:.3e} should exceed {tol:.1e}");
            }
            other => panic!("expected BaseInconsistent, got {other}"),
        }
    }

    #[test]
    fn glue_vanishes_at_the_base() {
        let cfg = shear_config(0.05, 8);
        let r = glue_map(&cfg, &cfg.base_point()).unwrap();
        assert!(r.norm() < 1e-12, "base glue = {:.3e}", r.norm());
    }

    #[test]
    fn glue_sees_a_one_sided_perturbation() {
        let cfg = shear_config(0.05, 8);
        let mut f = cfg.base_point();
        let slot = cfg.source_map().slot(0, 1, 3);
        f[slot] += Complex64::new(0.01, 0.0);
        let r = glue_map(&cfg, &f).unwrap();
        assert!(r.norm() > 1e-4, "one-sided move should not glue: {:.3e}", r.norm());
        // the dominant defect sits where the perturbation went in
        let lead = r[cfg.target_map().slot(0, 1, 3)];
        assert!((lead - Complex64::new(0.01, 0.0)).norm() < 2e-3, "lead = {lead}");
    }

    #[test]
    fn constant_shift_of_the_last_coefficient_glues_exactly() {
        // z2 = z1 + eps w changes nothing about a z-independent shift of f2,
        // so shifting both charts together is a global deformation.
        let cfg = shear_config(0.05, 8);
        let mut f = cfg.base_point();
        let c = Complex64::new(0.03, 0.01);
        f[cfg.source_map().slot(0, 1, 0)] += c;
        f[cfg.source_map().slot(1, 1, 0)] += c;
        let r = glue_map(&cfg, &f).unwrap();
        assert!(r.norm() < 1e-13, "global shift should glue: {:.3e}", r.norm());
    }

    #[test]
    fn differential_matches_the_linear_coboundary_on_identity_transition() {
        let cfg = shear_config(0.0, 6);
        let op = differential(&cfg).unwrap();
        let lin = assemble_coboundary(cfg.covering(), cfg.truncation()).unwrap();
        let diff = op.matrix() - lin.matrix();
        let worst = diff.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(worst < 1e-13, "matrices differ by {worst:.3e}");
    }

    #[test]
    fn differential_passes_finite_difference_probes() {
        let cfg = shear_config(0.05, 6);
        let op = differential(&cfg).unwrap();
        let check = differential_check(&cfg, &op, 1e-4, 4, 7).unwrap();
        assert!(
            check.matrix_error < 1e-5,
            "matrix error {:.3e}",
            check.matrix_error
        );
        assert!(
            check.probe_error < 1e-5,
            "probe error {:.3e}",
            check.probe_error
        );
    }

    #[test]
    fn chart_of_the_paired_cover_is_unobstructed() {
        let chart = build_chart(shear_config(0.05, 6)).unwrap();
        assert_eq!(chart.obstruction_dimension(), 0);
        assert_eq!(chart.flagged_artifacts(), 0);
        assert!(chart.window_stable());
        // two levels of functions on the overlap window match between charts;
        // what remains free is one level pair of window width each
        assert_eq!(chart.tangent_dimension(), 2 * 13);
        let pt = chart.point_at(&vec![Complex64::default(); 26]).unwrap();
        assert_eq!(pt.residuals.len(), 1);
        assert!((pt.point - chart.base_point()).norm() < 1e-14);
        // tangent vectors really are kernel directions
        for v in chart.tangent_basis() {
            assert!(chart.operator().apply_raw(v).norm() < 1e-9);
        }
    }

    #[test]
    fn newton_lands_on_the_chart_from_a_tilted_start() {
        let chart = build_chart(shear_config(0.05, 6)).unwrap();
        let t: Vec<Complex64> = (0..chart.tangent_dimension())
            .map(|i| match i {
                0 => Complex64::new(0.02, 0.0),
                1 => Complex64::new(0.0, 0.015),
                4 => Complex64::new(-0.01, 0.01),
                _ => Complex64::default(),
            })
            .collect();
        let pt = chart.point_at(&t).unwrap();
        let last = *pt.residuals.last().unwrap();
        assert!(last <= chart.newton_params().tol, "residual {last:.3e}");
        // coordinates survive the correction
        let coords = chart.tangent_coordinates(&pt.point);
        for (a, b) in coords.iter().zip(&t) {
            assert!((a - b).norm() < 1e-10, "coordinate moved: {a} vs {b}");
        }
        // the point solves the glue equation, and not just at the start
        let r = glue_map(chart.config(), &pt.point).unwrap();
        assert!(r.norm() < 1e-11, "glue at solution {:.3e}", r.norm());
    }

    #[test]
    fn chart_points_describe_one_divisor_on_the_overlap() {
        let chart = build_chart(shear_config(0.05, 6)).unwrap();
        let cfg = chart.config();
        // deform along the kernel projection of an interior-supported move;
        // edge-window directions would hide composition tails outside the
        // truncation and muddy the root comparison
        let mut v = chart.base_point();
        v[cfg.source_map().slot(1, 1, 1)] += Complex64::new(0.04, -0.01);
        v[cfg.source_map().slot(1, 0, 0)] += Complex64::new(0.0, 0.02);
        let t = chart.tangent_coordinates(&v);
        let pt = chart.point_at(&t).unwrap();
        let overlap = cfg.covering().overlaps()[0].domain;
        let left = chart_polynomials(cfg, &pt.point, 0).unwrap();
        let sections = cfg.to_sections(&pt.point).unwrap();
        let right = cfg.side_biseries(0, true, &sections[1]).unwrap();
        let radius = overlap.sampling_radius();
        let mut checked = 0;
        for j in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
            let z = Complex64::from_polar(radius, theta);
            for w in roots_at(&left, z) {
                let defect = right.eval(z, w).norm();
                assert!(defect < 1e-7, "right side at a left root: {defect:.3e}");
                checked += 1;
            }
        }
        assert!(checked >= 32, "expected both roots at 16 points, got {checked}");
    }

    #[test]
    fn continuation_tracks_a_global_section() {
        let chart = build_chart(shear_config(0.05, 6)).unwrap();
        let cfg = chart.config();
        let mut target = chart.base_point();
        let c = Complex64::new(0.05, 0.0);
        target[cfg.source_map().slot(0, 1, 0)] += c;
        target[cfg.source_map().slot(1, 1, 0)] += c;
        let family = continue_family(&chart, &target, 10).unwrap();
        assert_eq!(family.lambdas.len(), 11);
        assert_eq!(family.lambdas[0], 0.0);
        assert_eq!(*family.lambdas.last().unwrap(), 1.0);
        for r in &family.residuals {
            assert!(*r < 1e-8, "sample residual {r:.3e}");
        }
        assert!((family.points[0].clone() - chart.base_point()).norm() < 1e-12);
        assert!(
            family.endpoint_defect < 1e-8,
            "endpoint defect {:.3e}",
            family.endpoint_defect
        );
    }

    #[test]
    fn continuation_rejects_a_target_outside_the_ball() {
        let chart = build_chart(shear_config(0.05, 6)).unwrap();
        let cfg = chart.config();
        let mut target = chart.base_point();
        target[cfg.source_map().slot(0, 1, 0)] += Complex64::new(0.2, 0.0);
        target[cfg.source_map().slot(1, 1, 0)] += Complex64::new(0.2, 0.0);
        match continue_family(&chart, &target, 4).unwrap_err() {
            Error::TargetOutsideBall { chart: 0, distance, radius } => {
                assert!(distance > radius);
            }
            other => panic!("expected TargetOutsideBall, got {other}"),
        }
    }

    #[test]
    fn multiplicity_one_overlap_honours_the_transition_factor() {
        // w - z/16 on the left, w - z/32 on the right, factor 2: consistent,
        // and the differential must reproduce the factor-twisted coboundary.
        let left_dom = Annulus::new(0.5, 1.2).unwrap();
        let right_dom = Annulus::new(0.9, 2.0).unwrap();
        let overlap_dom = Annulus::new(0.9, 1.2).unwrap();
        let charts = vec![
            Chart { domain: left_dom, multiplicity: 1, smoothness: sob1() },
            Chart { domain: right_dom, multiplicity: 1, smoothness: sob1() },
        ];
        let overlaps = vec![Overlap {
            left: 0,
            right: 1,
            domain: overlap_dom,
            multiplicity: 1,
            kind: TransitionKind::Concentric,
            factor: LaurentSeries::constant(overlap_dom, Complex64::new(2.0, 0.0)).unwrap(),
            cylinder: Some(DistortedCylinder::shear(overlap_dom, 0.9, 0.0).unwrap()),
        }];
        let covering = Covering::new(charts, overlaps).unwrap();
        let truncation = Truncation {
            chart_windows: vec![(-5, 5); 2],
            overlap_windows: vec![(-5, 5)],
        };
        let mut f_left = LaurentSeries::zero(left_dom, 0, 1).unwrap();
        f_left.set_coeff(1, Complex64::new(-1.0 / 16.0, 0.0));
        let mut f_right = LaurentSeries::zero(right_dom, 0, 1).unwrap();
        f_right.set_coeff(1, Complex64::new(-1.0 / 32.0, 0.0));
        let cfg = ChartConfig::new(
            covering,
            truncation,
            vec![
                WeierstrassPolynomial::new(vec![f_left]).unwrap(),
                WeierstrassPolynomial::new(vec![f_right]).unwrap(),
            ],
            vec![0.05; 2],
            SolveOptions { smallness_threshold: 1.0, class: sob1(), ..SolveOptions::default() },
            defaults::RANK_TOL,
        )
        .unwrap();
        let op = differential(&cfg).unwrap();
        let lin = assemble_coboundary(cfg.covering(), cfg.truncation()).unwrap();
        let diff = op.matrix() - lin.matrix();
        let worst = diff.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(worst < 1e-13, "factor path differs from the coboundary by {worst:.3e}");
        assert!(glue_map(&cfg, &cfg.base_point()).unwrap().norm() < 1e-13);
    }

    #[test]
    fn factor_on_a_double_cover_is_rejected() {
        let good = shear_config(0.0, 5);
        let mut overlaps = good.covering().overlaps().to_vec();
        overlaps[0].factor =
            LaurentSeries::constant(overlaps[0].domain, Complex64::new(2.0, 0.0)).unwrap();
        let covering = Covering::new(good.covering().charts().to_vec(), overlaps).unwrap();
        let err = ChartConfig::new(
            covering,
            good.truncation().clone(),
            good.base_polynomials().to_vec(),
            good.ball_radii().to_vec(),
            good.solve_options(),
            good.rank_tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err}");
    }

    #[test]
    fn rejects_coverings_the_chart_cannot_use() {
        // no cylinder on the overlap
        let plain = crate::cech::two_chart_annulus(0.5, 0.9, 1.2, 2.0, sob1()).unwrap();
        let trunc = Truncation::uniform(&plain, 5);
        let dom0 = plain.charts()[0].domain;
        let dom1 = plain.charts()[1].domain;
        let p0 = WeierstrassPolynomial::trivial(dom0, 1).unwrap();
        let p1 = WeierstrassPolynomial::trivial(dom1, 1).unwrap();
        let err = ChartConfig::new(
            plain,
            trunc,
            vec![p0, p1],
            vec![0.1; 2],
            SolveOptions::default(),
            defaults::RANK_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err}");

        // degree must match multiplicity
        let good = shear_config(0.05, 5);
        let err = ChartConfig::new(
            good.covering().clone(),
            good.truncation().clone(),
            vec![
                WeierstrassPolynomial::trivial(good.covering().charts()[0].domain, 1).unwrap(),
                WeierstrassPolynomial::trivial(good.covering().charts()[1].domain, 1).unwrap(),
            ],
            good.ball_radii().to_vec(),
            good.solve_options(),
            good.rank_tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err}");
    }

    #[test]
    fn prepared_base_is_interchangeable_with_the_exact_one() {
        // multiply the left defining function by a unit, prepare it back, and
        // the config accepts the prepared polynomial against the sheared
        // right chart
        let cfg = shear_config(0.05, 6);
        let left_dom = cfg.covering().charts()[0].domain;
        let raw = cfg.base_polynomials()[0].to_biseries(0.9).unwrap();
        let mut unit = BiSeries::zero(left_dom, 0.9, 0, 0, raw.w_degree()).unwrap();
        unit.set_coeff(0, 0, Complex64::ONE);
        unit.set_coeff(0, 1, Complex64::new(0.3, 0.0));
        let twisted = raw.multiply(&unit).unwrap().truncated(-8, 8, 8).unwrap().0;
        let (prepared, _) = weierstrass_prep(&twisted, 0.75).unwrap();
        for i in 1..=2 {
            let d = prepared
                .coefficient(i)
                .restrict(left_dom)
                .unwrap()
                .sub(&cfg.base_polynomials()[0].coefficient(i).restrict(left_dom).unwrap())
                .unwrap();
            assert!(d.l2_norm() < 1e-9, "coefficient {i} off by {:.3e}", d.l2_norm());
        }
        let rebuilt = ChartConfig::new(
            cfg.covering().clone(),
            cfg.truncation().clone(),
            vec![prepared, cfg.base_polynomials()[1].clone()],
            cfg.ball_radii().to_vec(),
            cfg.solve_options(),
            cfg.rank_tol(),
        );
        assert!(rebuilt.is_ok(), "prepared base rejected: {:?}", rebuilt.err());
    }

    #[test]
    fn overlap_chart_map_solves_and_guards_the_ball() {
        let cfg = shear_config(0.05, 6);
        let sections = cfg.to_sections(&cfg.base_point()).unwrap();
        let (dwp, stats) = overlap_chart_map(&cfg, 0, &sections[0], 0).unwrap();
        assert_eq!(dwp.degree(), 2);
        assert!(stats.iterations >= 1);
        let mut far = sections[0].clone();
        far[1] = far[1]
            .add(&LaurentSeries::constant(cfg.covering().charts()[0].domain, Complex64::new(0.5, 0.0)).unwrap())
            .unwrap();
        match overlap_chart_map(&cfg, 0, &far, 0).unwrap_err() {
            Error::TargetOutsideBall { chart: 0, .. } => {}
            other => panic!("expected TargetOutsideBall, got {other}"),
        }
    }
}
