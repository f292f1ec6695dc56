//! Monic w-polynomials on a distorted cylinder, and the iteration that brings
//! them to split-coefficient normal form.
//!
//! A distorted cylinder is the annulus bundle over A(r, R) with fiber
//! |w| <= rho, described in two base coordinates: z1 on the inward patch and
//! z2 on the outward one, related fiberwise by z2 = g(z1, w) with
//! g(z1, 0) = z1. A divisor in normal form is cut out by
//!
//!   w^n + sum_i (f_i^-(z1) + f_i^+(z2)) w^(n-i)
//!
//! where f_i^- carries only negative frequencies (holomorphic across the outer
//! end) and f_i^+ only non-negative ones (holomorphic across the inner end).
//! `extract_dwp_coefficients` reads that form off a bi-series one w-level at a
//! time; `solve_dwp` iterates extraction and division by the detected unit
//! until the residual is below tolerance.

use num_complex::Complex64;

use crate::biseries::{eval_poly, grid_quotient, substitute, BiSeries};
use crate::defaults;
use crate::error::{Error, Result};
use crate::grid::{self, grid_for_window};
use crate::series::{Annulus, LaurentSeries, SmoothnessClass};
use crate::weierstrass::WeierstrassPolynomial;

/// Transition must fix the base pointwise at w = 0 up to this defect.
const IDENTITY_TOL: f64 = 1e-12;

/// Sampled round-trip defect allowed between the two transition directions.
const ROUND_TRIP_TOL: f64 = 1e-8;

/// Relative slack on cylinder bounds when classifying evaluation points.
const BOUNDS_SLACK: f64 = 1e-9;

/// Annulus bundle A(r, R) x {|w| <= rho} with a w-dependent change of base
/// coordinate between its two ends.
///
/// The inward patch uses z1 and covers |z1| < core_outer side; the outward
/// patch uses z2 = transition(z1, w) and covers |z2| > core_inner. Both
/// transitions are stored as bi-series on the full annulus and must invert
/// each other on the sampled torus.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedCylinder {
    annulus: Annulus,
    rho: f64,
    core_inner: f64,
    core_outer: f64,
    transition: BiSeries,
    inverse_transition: BiSeries,
}

impl DistortedCylinder {
    pub fn new(
        annulus: Annulus,
        rho: f64,
        core_inner: f64,
        core_outer: f64,
        transition: BiSeries,
        inverse_transition: BiSeries,
    ) -> Result<Self> {
        let (r, big_r) = (annulus.inner_radius(), annulus.outer_radius());
        if !(r < core_inner && core_inner < core_outer && core_outer < big_r) {
            return Err(Error::Config(format!(
                "core radii must satisfy {r} < core_inner < core_outer < {big_r}, got {core_inner} and {core_outer}"
            )));
        }
        if !(rho > 0.0 && rho <= 1.0 && rho.is_finite()) {
            return Err(Error::Config(format!(
                "fiber radius must lie in (0, 1], got {rho}"
            )));
        }
        for (label, t) in [("transition", &transition), ("inverse", &inverse_transition)] {
            if t.z_domain() != annulus || t.w_radius() != rho {
                return Err(Error::DomainMismatch {
                    context: format!("{label} is not defined on the cylinder's annulus and fiber"),
                });
            }
        }
        let cyl = DistortedCylinder {
            annulus,
            rho,
            core_inner,
            core_outer,
            transition,
            inverse_transition,
        };
        cyl.check_identity_at_zero()?;
        cyl.check_round_trip()?;
        cyl.check_separation()?;
        Ok(cyl)
    }

    /// Undistorted cylinder: both transitions are z itself. Core radii sit at
    /// the geometric quartiles of the annulus.
    pub fn identity(annulus: Annulus, rho: f64) -> Result<Self> {
        let mut id = BiSeries::zero(annulus, rho, 0, 1, 0)?;
        id.set_coeff(1, 0, Complex64::ONE);
        let (ci, co) = Self::quartile_radii(annulus);
        DistortedCylinder::new(annulus, rho, ci, co, id.clone(), id)
    }

    /// Affine distortion z2 = z1 + eps w, inverted exactly by z1 = z2 - eps w.
    pub fn shear(annulus: Annulus, rho: f64, eps: f64) -> Result<Self> {
        let mut g = BiSeries::zero(annulus, rho, 0, 1, 1)?;
        g.set_coeff(1, 0, Complex64::ONE);
        g.set_coeff(0, 1, Complex64::new(eps, 0.0));
        let mut ginv = BiSeries::zero(annulus, rho, 0, 1, 1)?;
        ginv.set_coeff(1, 0, Complex64::ONE);
        ginv.set_coeff(0, 1, Complex64::new(-eps, 0.0));
        let (ci, co) = Self::quartile_radii(annulus);
        DistortedCylinder::new(annulus, rho, ci, co, g, ginv)
    }

    fn quartile_radii(annulus: Annulus) -> (f64, f64) {
        let (r, big_r) = (annulus.inner_radius(), annulus.outer_radius());
        (r.powf(0.75) * big_r.powf(0.25), r.powf(0.25) * big_r.powf(0.75))
    }

    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn core_inner(&self) -> f64 {
        self.core_inner
    }

    pub fn core_outer(&self) -> f64 {
        self.core_outer
    }

    pub fn transition(&self) -> &BiSeries {
        &self.transition
    }

    pub fn inverse_transition(&self) -> &BiSeries {
        &self.inverse_transition
    }

    /// True when both transitions are exactly the coefficient pattern of z.
    /// The coefficient-extraction path is free of transforms in that case.
    pub fn is_identity(&self) -> bool {
        is_identity_series(&self.transition) && is_identity_series(&self.inverse_transition)
    }

    fn check_identity_at_zero(&self) -> Result<()> {
        let id = LaurentSeries::monomial(self.annulus, 1, Complex64::ONE)?;
        let mut defect = 0.0f64;
        for t in [&self.transition, &self.inverse_transition] {
            defect = defect.max(t.w_coefficient(0).sub(&id)?.l2_norm());
        }
        if defect > IDENTITY_TOL {
            return Err(Error::TransitionNotNormalized { defect });
        }
        Ok(())
    }

    fn check_round_trip(&self) -> Result<()> {
        let mz = 32;
        let mw = 16;
        let cz = self.annulus.sampling_radius();
        let ws = grid::circle_points(self.rho, mw);
        let mut defect = 0.0f64;
        for z in grid::circle_points(cz, mz) {
            let fwd = self.transition.w_sections_at(z);
            let bwd = self.inverse_transition.w_sections_at(z);
            for &w in &ws {
                let there = self.inverse_transition.eval(eval_poly(&fwd, w), w);
                let back = self.transition.eval(eval_poly(&bwd, w), w);
                defect = defect.max((there - z).norm()).max((back - z).norm());
            }
        }
        if defect > ROUND_TRIP_TOL {
            return Err(Error::TransitionRoundTrip { defect });
        }
        Ok(())
    }

    /// Each coordinate boundary circle must land strictly inside the other
    /// patch: |z2(z1, w)| in (core_inner, R) on |z1| = core_outer and
    /// |z1(z2, w)| in (r, core_outer) on |z2| = core_inner, for all |w| <= rho.
    fn check_separation(&self) -> Result<()> {
        let angles = 64;
        let fibers = [0.25, 0.5, 0.75, 1.0].map(|t| t * self.rho);
        let checks = [
            (
                &self.transition,
                self.core_outer,
                "z2",
                self.core_inner,
                self.annulus.outer_radius(),
            ),
            (
                &self.inverse_transition,
                self.core_inner,
                "z1",
                self.annulus.inner_radius(),
                self.core_outer,
            ),
        ];
        for (map, circle, coordinate, lo, hi) in checks {
            for z in grid::circle_points(circle, angles) {
                let sections = map.w_sections_at(z);
                for wr in fibers {
                    for w in grid::circle_points(wr, 16) {
                        let value = eval_poly(&sections, w).norm();
                        if value <= lo || value >= hi {
                            return Err(Error::SeparationViolated {
                                coordinate,
                                value,
                                lo,
                                hi,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn is_identity_series(t: &BiSeries) -> bool {
    for j in t.z_min()..=t.z_max() {
        for k in 0..=t.w_degree() {
            let want = if j == 1 && k == 0 {
                Complex64::ONE
            } else {
                Complex64::default()
            };
            if t.coeff(j, k) != want {
                return false;
            }
        }
    }
    true
}

/// Monic degree-n w-polynomial with split coefficients: part i multiplies
/// w^(n-i), its minus half is a function of z1 on the annulus with negative
/// frequencies only, its plus half a function of z2 on the disk |z2| < R.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedWP {
    annulus: Annulus,
    rho: f64,
    minus_parts: Vec<LaurentSeries>,
    plus_parts: Vec<LaurentSeries>,
}

impl DistortedWP {
    pub fn new(
        annulus: Annulus,
        rho: f64,
        minus_parts: Vec<LaurentSeries>,
        plus_parts: Vec<LaurentSeries>,
    ) -> Result<Self> {
        if minus_parts.is_empty() {
            return Err(Error::DegreeZero);
        }
        if minus_parts.len() != plus_parts.len() {
            return Err(Error::DegreeMismatch {
                expected: minus_parts.len(),
                got: plus_parts.len(),
            });
        }
        for (i, m) in minus_parts.iter().enumerate() {
            if m.domain() != annulus {
                return Err(Error::DomainMismatch {
                    context: format!("minus part {} lives off the cylinder annulus", i + 1),
                });
            }
            for k in 0..=m.max_index().max(0) {
                if m.coeff(k) != Complex64::default() {
                    return Err(Error::DomainMismatch {
                        context: format!("minus part {} carries non-negative frequencies", i + 1),
                    });
                }
            }
        }
        for (i, p) in plus_parts.iter().enumerate() {
            let ok = p.domain().is_disk()
                && p.domain().outer_radius() == annulus.outer_radius()
                && p.min_index() >= 0;
            if !ok {
                return Err(Error::DomainMismatch {
                    context: format!("plus part {} is not a disk function of z2", i + 1),
                });
            }
        }
        Ok(DistortedWP {
            annulus,
            rho,
            minus_parts,
            plus_parts,
        })
    }

    pub fn zero(annulus: Annulus, rho: f64, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::DegreeZero);
        }
        let m = LaurentSeries::zero(annulus, -1, 0)?;
        let p = LaurentSeries::zero(Annulus::disk(annulus.outer_radius())?, 0, 0)?;
        DistortedWP::new(annulus, rho, vec![m; degree], vec![p; degree])
    }

    pub fn degree(&self) -> usize {
        self.minus_parts.len()
    }

    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Minus half of coefficient i (1-based, multiplies w^(n-i)).
    pub fn minus(&self, i: usize) -> &LaurentSeries {
        &self.minus_parts[i - 1]
    }

    /// Plus half of coefficient i (1-based, multiplies w^(n-i)).
    pub fn plus(&self, i: usize) -> &LaurentSeries {
        &self.plus_parts[i - 1]
    }

    pub fn minus_parts(&self) -> &[LaurentSeries] {
        &self.minus_parts
    }

    pub fn plus_parts(&self) -> &[LaurentSeries] {
        &self.plus_parts
    }

    /// Norm of the sub-leading terms as a function on the cylinder: each level
    /// is weighted by the largest |w| it can see.
    pub fn remainder_norm(&self, class: SmoothnessClass) -> f64 {
        let n = self.degree();
        let mut total = 0.0;
        for i in 1..=n {
            let weight = self.rho.powi((n - i) as i32);
            total += weight * (self.minus(i).s_norm(class) + self.plus(i).s_norm(class));
        }
        total
    }

    /// Largest coefficient-wise l2 distance to another polynomial of the same
    /// degree on the same cylinder.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                got: other.degree(),
            });
        }
        let mut d = 0.0f64;
        for i in 1..=self.degree() {
            d = d.max(self.minus(i).sub(other.minus(i))?.l2_norm());
            d = d.max(self.plus(i).sub(other.plus(i))?.l2_norm());
        }
        Ok(d)
    }
}

/// Evaluates the split-form polynomial at a point of the cylinder, routing the
/// plus halves through the transition.
pub fn evaluate_dwp(
    p: &DistortedWP,
    cyl: &DistortedCylinder,
    z1: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    if p.annulus() != cyl.annulus() || p.rho() != cyl.rho() {
        return Err(Error::DomainMismatch {
            context: "polynomial and cylinder disagree on annulus or fiber radius".into(),
        });
    }
    let (r, big_r) = (cyl.annulus().inner_radius(), cyl.annulus().outer_radius());
    let (z_abs, w_abs) = (z1.norm(), w.norm());
    if z_abs < r * (1.0 - BOUNDS_SLACK)
        || z_abs > big_r * (1.0 + BOUNDS_SLACK)
        || w_abs > cyl.rho() * (1.0 + BOUNDS_SLACK)
    {
        return Err(Error::OutsideCylinder {
            z1_abs: z_abs,
            w_abs,
        });
    }
    let z2 = cyl.transition().eval(z1, w);
    let n = p.degree();
    // Ascending w powers: slot k holds coefficient n-k, slot n the leading 1.
    let mut coeffs = vec![Complex64::default(); n + 1];
    for i in 1..=n {
        coeffs[n - i] = p.minus(i).eval(z1) + p.plus(i).eval(z2);
    }
    coeffs[n] = Complex64::ONE;
    Ok(eval_poly(&coeffs, w))
}

/// Reads split coefficients off `f` one w-level at a time, lowest first.
///
/// Level k carries coefficient i = degree - k. Its value splits into the minus
/// half (kept in z1) and the plus half (reinterpreted in z2); subtracting
/// f_i^+(z2(z1, w)) w^k spills into higher levels only, because the transition
/// fixes the base at w = 0. What remains above the leading level, divided by
/// w^degree, is the unit defect Q: f = w^n + sum parts + w^n Q exactly.
///
/// The whole map is linear in f - w^n.
pub fn extract_dwp_coefficients(
    f: &BiSeries,
    cyl: &DistortedCylinder,
    degree: usize,
) -> Result<(DistortedWP, BiSeries)> {
    if degree == 0 {
        return Err(Error::DegreeZero);
    }
    if f.w_degree() < degree {
        return Err(Error::DegreeMismatch {
            expected: degree,
            got: f.w_degree(),
        });
    }
    if f.z_domain() != cyl.annulus() || f.w_radius() != cyl.rho() {
        return Err(Error::DomainMismatch {
            context: "bi-series lives off the cylinder".into(),
        });
    }
    let one = LaurentSeries::constant(f.z_domain(), Complex64::ONE)?;
    let deviation = f.w_coefficient(degree).sub(&one)?.l2_norm();
    if deviation > defaults::NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            deviation,
            allowed: defaults::NORMALIZATION_TOL,
        });
    }

    let mut h = f.clone();
    h.set_coeff(0, degree, h.coeff(0, degree) - Complex64::ONE);
    let (minus_parts, plus_parts) = extract_sections_in_place(&mut h, cyl, degree)?;
    let (q, below) = h.div_w_power(degree);
    debug_assert_eq!(below, 0.0, "processed levels are zeroed exactly");
    let dwp = DistortedWP::new(cyl.annulus(), cyl.rho(), minus_parts, plus_parts)?;
    Ok((dwp, q))
}

/// The level sweep shared by extraction and its linearization: reads split
/// sections off levels 0..degree-1 of `h`, zeroing each level and pushing the
/// composed plus spill out of the ones above. Afterward `h` holds only levels
/// >= degree. Linear in `h`.
fn extract_sections_in_place(
    h: &mut BiSeries,
    cyl: &DistortedCylinder,
    degree: usize,
) -> Result<(Vec<LaurentSeries>, Vec<LaurentSeries>)> {
    let identity = cyl.is_identity();
    let disk = Annulus::disk(cyl.annulus().outer_radius())?;
    let mut minus_parts = vec![None; degree];
    let mut plus_parts = vec![None; degree];
    let mz = grid_for_window(h.z_min(), h.z_max());
    for k in 0..degree {
        let level = h.w_coefficient(k);
        let (plus, minus) = level.split();
        // The level-k section cancels identically after the subtraction: the
        // composed plus term restricts to the plus half at w = 0 and the minus
        // half removes the rest. Write the exact zero instead of transform
        // roundoff.
        for j in h.z_min()..=h.z_max() {
            h.set_coeff(j, k, Complex64::default());
        }
        if !identity {
            let budget = h.w_degree() - k;
            let mw = (2 * grid_for_window(0, budget as i32)).max(16);
            let composed = substitute(&plus, cyl.transition(), h.z_min(), h.z_max(), budget, mz, mw)?;
            for k2 in 1..=composed.w_degree() {
                let kk = k + k2;
                if kk > h.w_degree() {
                    break;
                }
                for j in h.z_min()..=h.z_max() {
                    let cur = h.coeff(j, kk);
                    h.set_coeff(j, kk, cur - composed.coeff(j, k2));
                }
            }
        }
        let i = degree - k;
        minus_parts[i - 1] = Some(minus);
        plus_parts[i - 1] = Some(plus.with_domain(disk)?);
    }
    Ok((
        minus_parts.into_iter().map(Option::unwrap).collect(),
        plus_parts.into_iter().map(Option::unwrap).collect(),
    ))
}

/// Realizes a split-form polynomial as a bi-series in the z1 coordinate on the
/// given window: minus halves enter directly, plus halves through the
/// transition. Inverse of extraction up to window truncation.
pub(crate) fn realize_dwp(
    p: &DistortedWP,
    cyl: &DistortedCylinder,
    z_min: i32,
    z_max: i32,
    w_degree: usize,
) -> Result<BiSeries> {
    if p.annulus() != cyl.annulus() || p.rho() != cyl.rho() {
        return Err(Error::DomainMismatch {
            context: "polynomial and cylinder disagree on annulus or fiber radius".into(),
        });
    }
    let n = p.degree();
    if w_degree < n {
        return Err(Error::DegreeMismatch {
            expected: n,
            got: w_degree,
        });
    }
    let mut out = BiSeries::zero(cyl.annulus(), cyl.rho(), z_min, z_max, w_degree)?;
    out.set_coeff(0, n, Complex64::ONE);
    let identity = cyl.is_identity();
    let mz = grid_for_window(z_min, z_max);
    for i in 1..=n {
        let k = n - i;
        for j in p.minus(i).indices() {
            if j >= z_min && j <= z_max {
                let cur = out.coeff(j, k);
                out.set_coeff(j, k, cur + p.minus(i).coeff(j));
            }
        }
        let plus = p.plus(i);
        if identity {
            for j in plus.indices() {
                if j >= z_min && j <= z_max {
                    let cur = out.coeff(j, k);
                    out.set_coeff(j, k, cur + plus.coeff(j));
                }
            }
        } else {
            let budget = w_degree - k;
            let mw = (2 * grid_for_window(0, budget as i32)).max(16);
            let composed = substitute(plus, cyl.transition(), z_min, z_max, budget, mz, mw)?;
            for k2 in 0..=composed.w_degree() {
                for j in z_min..=z_max {
                    let cur = out.coeff(j, k + k2);
                    out.set_coeff(j, k + k2, cur + composed.coeff(j, k2));
                }
            }
        }
    }
    Ok(out)
}

/// Coefficient-level perturbation of a split-form polynomial: per level a
/// minus half in z1 and a plus half in z2, no leading term.
#[derive(Debug, Clone)]
pub struct DwpPerturbation {
    annulus: Annulus,
    rho: f64,
    minus_parts: Vec<LaurentSeries>,
    plus_parts: Vec<LaurentSeries>,
}

impl DwpPerturbation {
    pub fn degree(&self) -> usize {
        self.minus_parts.len()
    }

    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Minus half of the coefficient-i perturbation (1-based).
    pub fn minus(&self, i: usize) -> &LaurentSeries {
        &self.minus_parts[i - 1]
    }

    /// Plus half of the coefficient-i perturbation (1-based).
    pub fn plus(&self, i: usize) -> &LaurentSeries {
        &self.plus_parts[i - 1]
    }

    /// Same level weighting as `DistortedWP::remainder_norm`.
    pub fn norm(&self, class: SmoothnessClass) -> f64 {
        let n = self.degree();
        let mut total = 0.0;
        for i in 1..=n {
            let weight = self.rho.powi((n - i) as i32);
            total += weight * (self.minus(i).s_norm(class) + self.plus(i).s_norm(class));
        }
        total
    }
}

/// Coefficient-wise difference of two split-form polynomials on the same
/// cylinder.
pub fn dwp_difference(a: &DistortedWP, b: &DistortedWP) -> Result<DwpPerturbation> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            expected: a.degree(),
            got: b.degree(),
        });
    }
    if a.annulus() != b.annulus() || a.rho() != b.rho() {
        return Err(Error::DomainMismatch {
            context: "split-form difference across different cylinders".into(),
        });
    }
    let mut minus_parts = Vec::with_capacity(a.degree());
    let mut plus_parts = Vec::with_capacity(a.degree());
    for i in 1..=a.degree() {
        minus_parts.push(a.minus(i).sub(b.minus(i))?);
        plus_parts.push(a.plus(i).sub(b.plus(i))?);
    }
    Ok(DwpPerturbation {
        annulus: a.annulus(),
        rho: a.rho(),
        minus_parts,
        plus_parts,
    })
}

/// Differential of the split-normal-form solve at a solved base point.
///
/// A perturbation v decomposes uniquely as v = s + P * u with s a split-form
/// coefficient perturbation and P the realized base polynomial; `apply`
/// computes s by iterating the linear extraction, subtracting P times the
/// leftover unit defect each pass. Exact at a base whose own unit defect is
/// zero; in general accurate to that defect times the direction norm.
#[derive(Debug, Clone)]
pub struct DwpLinearization {
    base_real: BiSeries,
    cyl: DistortedCylinder,
    degree: usize,
    tol: f64,
    max_iter: usize,
    class: SmoothnessClass,
}

impl DwpLinearization {
    pub fn new(
        base: &DistortedWP,
        cyl: &DistortedCylinder,
        z_min: i32,
        z_max: i32,
        w_degree: usize,
        opts: SolveOptions,
    ) -> Result<Self> {
        let base_real = realize_dwp(base, cyl, z_min, z_max, w_degree)?;
        Ok(DwpLinearization {
            base_real,
            cyl: cyl.clone(),
            degree: base.degree(),
            tol: opts.tol,
            max_iter: opts.max_iter,
            class: opts.class,
        })
    }

    pub fn z_window(&self) -> (i32, i32) {
        (self.base_real.z_min(), self.base_real.z_max())
    }

    pub fn w_degree(&self) -> usize {
        self.base_real.w_degree()
    }

    /// The base polynomial written back out as a bi-series on the cylinder.
    pub fn base_realization(&self) -> &BiSeries {
        &self.base_real
    }

    /// Directional derivative of the solve along v (a bi-series perturbation
    /// already expressed in the z1 coordinate).
    pub fn apply(&self, v: &BiSeries) -> Result<DwpPerturbation> {
        if v.z_domain() != self.cyl.annulus() || v.w_radius() != self.cyl.rho() {
            return Err(Error::DomainMismatch {
                context: "perturbation lives off the cylinder".into(),
            });
        }
        let (z_min, z_max) = self.z_window();
        let w_degree = self.w_degree();
        let mut current = v.truncated(z_min, z_max, w_degree)?.0;
        let scale = 1.0 + v.l2_norm();
        let mut history = Vec::new();
        for _ in 1..=self.max_iter {
            let mut h = current.clone();
            let (minus_parts, plus_parts) = extract_sections_in_place(&mut h, &self.cyl, self.degree)?;
            let (q, below) = h.div_w_power(self.degree);
            debug_assert_eq!(below, 0.0, "processed levels are zeroed exactly");
            let q_norm = q.s_norm(self.class);
            history.push((q_norm, current.l2_norm()));
            if q_norm <= self.tol * scale {
                return Ok(DwpPerturbation {
                    annulus: self.cyl.annulus(),
                    rho: self.cyl.rho(),
                    minus_parts,
                    plus_parts,
                });
            }
            let correction = self.base_real.multiply(&q)?.truncated(z_min, z_max, w_degree)?.0;
            current = current.sub(&correction)?;
        }
        let (last_q, last_r) = *history.last().expect("max_iter >= 1");
        Err(Error::MaxIterationsExceeded {
            iterations: self.max_iter,
            last_q,
            last_r,
            tol: self.tol,
            history,
        })
    }
}

/// How an iteration step removes the unit defect 1 + Q it just detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationVariant {
    /// Divide by 1 + Q. Removes a detected unit factor exactly: w^n (1 + q)
    /// maps to w^n in one step.
    DivideByOnePlusQ,
    /// Divide by 1 - Q, the first-order inverse. Differs at second order and
    /// expands rather than removes a unit factor, so it can leave the
    /// contraction region; kept selectable for comparison runs.
    DivideByOneMinusQ,
}

/// Norms recorded by one extraction pass: the sub-leading remainder and the
/// unit defect.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub r_norm: f64,
    pub q_norm: f64,
}

/// Convergence record of a solve: extraction passes run and per-pass
/// (|Q|, |R|) norms.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub iterations: usize,
    pub history: Vec<(f64, f64)>,
}

/// Tunables for `solve_dwp`. The smallness threshold bounds the coefficient
/// norm of the input; inside that ball the split form is unique, so callers
/// raising it accept weaker uniqueness guarantees.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub variant: IterationVariant,
    pub smallness_threshold: f64,
    pub class: SmoothnessClass,
    /// Extra w-powers carried above the polynomial degree for composition
    /// spill.
    pub spill_degrees: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: defaults::DWP_TOL,
            max_iter: defaults::DWP_MAX_ITER,
            variant: IterationVariant::DivideByOnePlusQ,
            smallness_threshold: defaults::SMALLNESS_THRESHOLD,
            class: SmoothnessClass::SupNorm,
            spill_degrees: defaults::W_SPILL,
        }
    }
}

fn divide_by_unit(f: &BiSeries, q: &BiSeries, variant: IterationVariant) -> Result<BiSeries> {
    let sign = match variant {
        IterationVariant::DivideByOnePlusQ => 1.0,
        IterationVariant::DivideByOneMinusQ => -1.0,
    };
    let mut den = q.scale(Complex64::new(sign, 0.0));
    den.set_coeff(0, 0, den.coeff(0, 0) + Complex64::ONE);
    let mz = grid_for_window(f.z_min(), f.z_max());
    let mw = (2 * grid_for_window(0, f.w_degree() as i32)).max(16);
    grid_quotient(
        f,
        &den,
        f.z_min(),
        f.z_max(),
        f.w_degree(),
        mz,
        mw,
        defaults::INVERTIBILITY_FLOOR,
    )
}

/// One extraction-and-division pass: returns the corrected bi-series and the
/// norms it was corrected by. Errors when the unit defect has left the
/// contraction region (|Q| >= 1).
pub fn dwp_iteration_step(
    f: &BiSeries,
    cyl: &DistortedCylinder,
    degree: usize,
    variant: IterationVariant,
    class: SmoothnessClass,
) -> Result<(BiSeries, StepStats)> {
    let (dwp, q) = extract_dwp_coefficients(f, cyl, degree)?;
    let stats = StepStats {
        r_norm: dwp.remainder_norm(class),
        q_norm: q.s_norm(class),
    };
    if stats.q_norm >= 1.0 {
        return Err(Error::ContractionViolated {
            q_norm: stats.q_norm,
            iteration: 1,
        });
    }
    let next = divide_by_unit(f, &q, variant)?;
    Ok((next, stats))
}

/// Iterates coefficient extraction on a bi-series already embedded on the
/// cylinder until the unit defect drops below `opts.tol`.
///
/// Counting convention: iterations = extraction passes. An input that is
/// exactly w^n returns zero passes; an input whose first extraction already
/// has Q below tolerance (identity transitions in particular) returns one.
pub fn solve_dwp_biseries(
    f: &BiSeries,
    cyl: &DistortedCylinder,
    degree: usize,
    opts: SolveOptions,
) -> Result<(DistortedWP, SolveStats)> {
    if degree == 0 {
        return Err(Error::DegreeZero);
    }
    let mut norm = 0.0f64;
    let mut all_zero = true;
    for k in 0..degree.min(f.w_degree() + 1) {
        let section = f.w_coefficient(k);
        if section.l2_norm() != 0.0 {
            all_zero = false;
        }
        norm = norm.max(section.s_norm(opts.class));
    }
    if norm > opts.smallness_threshold {
        return Err(Error::SmallnessExceeded {
            norm,
            threshold: opts.smallness_threshold,
        });
    }
    if all_zero {
        let above = f.w_coefficient(degree).sub(&LaurentSeries::constant(f.z_domain(), Complex64::ONE)?)?;
        if above.l2_norm() == 0.0 && (degree..f.w_degree()).all(|k| f.w_coefficient(k + 1).l2_norm() == 0.0) {
            let dwp = DistortedWP::zero(cyl.annulus(), cyl.rho(), degree)?;
            return Ok((dwp, SolveStats::default()));
        }
    }

    let mut current = f.clone();
    let mut history = Vec::new();
    for iteration in 1..=opts.max_iter {
        let (dwp, q) = extract_dwp_coefficients(&current, cyl, degree)?;
        let q_norm = q.s_norm(opts.class);
        let r_norm = dwp.remainder_norm(opts.class);
        history.push((q_norm, r_norm));
        if q_norm < opts.tol {
            return Ok((
                dwp,
                SolveStats {
                    iterations: iteration,
                    history,
                },
            ));
        }
        if q_norm >= 1.0 {
            return Err(Error::ContractionViolated { q_norm, iteration });
        }
        current = divide_by_unit(&current, &q, opts.variant)?;
    }
    let (last_q, last_r) = *history.last().expect("max_iter >= 1");
    Err(Error::MaxIterationsExceeded {
        iterations: opts.max_iter,
        last_q,
        last_r,
        tol: opts.tol,
        history,
    })
}

/// Brings a monic w-polynomial with annulus coefficients into split normal
/// form on the distorted cylinder.
///
/// The divisor is preserved: every step divides by a non-vanishing unit, so
/// the zero set of the result matches the zero set of the input on the
/// cylinder. Inputs must sit inside the solver's validity ball (coefficient
/// norm against `opts.smallness_threshold`).
pub fn solve_dwp_with(
    p: &WeierstrassPolynomial,
    cyl: &DistortedCylinder,
    opts: SolveOptions,
) -> Result<(DistortedWP, SolveStats)> {
    if p.z_domain() != cyl.annulus() {
        return Err(Error::DomainMismatch {
            context: "polynomial annulus differs from cylinder annulus".into(),
        });
    }
    let embedded = p.to_biseries(cyl.rho())?;
    let padded = embedded
        .truncated(
            embedded.z_min(),
            embedded.z_max(),
            p.degree() + opts.spill_degrees,
        )?
        .0;
    solve_dwp_biseries(&padded, cyl, p.degree(), opts)
}

/// `solve_dwp_with` under default options with the given tolerance and
/// iteration cap.
pub fn solve_dwp(
    p: &WeierstrassPolynomial,
    cyl: &DistortedCylinder,
    tol: f64,
    max_iter: usize,
) -> Result<(DistortedWP, SolveStats)> {
    solve_dwp_with(
        p,
        cyl,
        SolveOptions {
            tol,
            max_iter,
            ..SolveOptions::default()
        },
    )
}
