//! Weierstrass normal forms over an annulus: degree by winding number,
//! coefficients by contour integrals of the logarithmic derivative plus
//! Newton's identities, division with remainder, and companion-matrix roots.
//!
//! The central invariant: preparing h * P for any invertible h returns P. The
//! contour integrals see only the roots inside the contour, so the prepared
//! polynomial depends on the divisor alone.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::biseries::{eval_poly, BiSeries};
use crate::defaults;
use crate::error::{Error, Result};
use crate::grid;
use crate::series::{series_from_samples, Annulus, LaurentSeries};

/// Monic polynomial w^n + sum f_i(z) w^{n-i} whose w-roots stay inside
/// |w| <= containment_radius < 1 over the whole annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassPolynomial {
    z_domain: Annulus,
    /// f_1 .. f_n, the coefficient of w^{n-i} at position i-1.
    coefficients: Vec<LaurentSeries>,
    containment_radius: f64,
}

impl WeierstrassPolynomial {
    /// Builds from coefficients f_1..f_n and certifies root containment by
    /// sampling companion-matrix roots along z circles.
    pub fn new(coefficients: Vec<LaurentSeries>) -> Result<Self> {
        let first = coefficients.first().ok_or(Error::DegreeZero)?;
        let z_domain = first.domain();
        for c in &coefficients {
            if c.domain() != z_domain {
                return Err(Error::DomainMismatch {
                    context: "Weierstrass coefficients on different annuli".into(),
                });
            }
        }
        let containment_radius = sampled_containment(z_domain, &coefficients);
        if containment_radius >= 1.0 {
            return Err(Error::ContainmentTooLarge {
                radius: containment_radius,
            });
        }
        Ok(WeierstrassPolynomial {
            z_domain,
            coefficients,
            containment_radius,
        })
    }

    /// w^n with no lower-order terms.
    pub fn trivial(z_domain: Annulus, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::DegreeZero);
        }
        let zero = LaurentSeries::zero(z_domain, 0, 0)?;
        Ok(WeierstrassPolynomial {
            z_domain,
            coefficients: vec![zero; degree],
            containment_radius: 0.0,
        })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn z_domain(&self) -> Annulus {
        self.z_domain
    }

    pub fn containment_radius(&self) -> f64 {
        self.containment_radius
    }

    /// f_i for i in 1..=degree.
    pub fn coefficient(&self, i: usize) -> &LaurentSeries {
        assert!(i >= 1 && i <= self.degree(), "coefficient index {i}");
        &self.coefficients[i - 1]
    }

    pub fn coefficients(&self) -> &[LaurentSeries] {
        &self.coefficients
    }

    /// Fiber-polynomial coefficients at fixed z, lowest w-power first
    /// (length degree + 1, leading entry 1).
    pub fn w_sections_at(&self, z: Complex64) -> Vec<Complex64> {
        let n = self.degree();
        let mut out = vec![Complex64::default(); n + 1];
        out[n] = Complex64::ONE;
        for (i, f) in self.coefficients.iter().enumerate() {
            out[n - (i + 1)] = f.eval(z);
        }
        out
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        eval_poly(&self.w_sections_at(z), w)
    }

    /// The same polynomial as a two-variable series with fiber radius w_radius.
    pub fn to_biseries(&self, w_radius: f64) -> Result<BiSeries> {
        let n = self.degree();
        let mut sections = Vec::with_capacity(n + 1);
        for k in 0..n {
            sections.push(self.coefficients[n - 1 - k].clone());
        }
        sections.push(LaurentSeries::constant(self.z_domain, Complex64::ONE)?);
        BiSeries::from_w_coefficients(&sections, w_radius)
    }
}

/// Eigenvalues of the companion matrix of w^n + a[0] w^{n-1} + ... + a[n-1],
/// sorted by (re, im) so callers get a deterministic order.
fn companion_roots(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-a[0]];
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..n {
        // last column carries minus the coefficient of w^i at row i
        m[(i, n - 1)] = -a[n - 1 - i];
    }
    let t = m.schur().unpack().1;
    let mut roots: Vec<Complex64> = t.diagonal().iter().copied().collect();
    roots.sort_unstable_by(|p, q| {
        p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im))
    });
    roots
}

/// Roots of P(z, .) at one base point, deterministically ordered.
pub fn roots_at(p: &WeierstrassPolynomial, z: Complex64) -> Vec<Complex64> {
    let a: Vec<Complex64> = p.coefficients.iter().map(|f| f.eval(z)).collect();
    companion_roots(&a)
}

/// Newton-polishes approximate w-roots of F(z, .) at fixed z.
pub fn polish_roots(f: &BiSeries, z: Complex64, roots: &[Complex64], steps: usize) -> Vec<Complex64> {
    let secs = f.w_sections_at(z);
    let dsecs = derivative_sections(&secs);
    roots
        .iter()
        .map(|&w0| {
            let mut w = w0;
            for _ in 0..steps {
                let d = eval_poly(&dsecs, w);
                if d.norm() == 0.0 {
                    break;
                }
                w -= eval_poly(&secs, w) / d;
            }
            w
        })
        .collect()
}

fn derivative_sections(secs: &[Complex64]) -> Vec<Complex64> {
    secs.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

fn sampled_containment(domain: Annulus, coefficients: &[LaurentSeries]) -> f64 {
    let radii = if domain.is_disk() {
        [
            domain.outer_radius() / 4.0,
            domain.outer_radius() / 2.0,
            domain.outer_radius(),
        ]
    } else {
        [
            domain.inner_radius(),
            domain.sampling_radius(),
            domain.outer_radius(),
        ]
    };
    // Boundary evaluation amplifies index k by (boundary/sampling)^|k|, which
    // turns representation noise in wide windows into fake giant roots. Clip
    // coefficients below representation accuracy before scanning.
    let scale = coefficients
        .iter()
        .map(|f| f.l2_norm())
        .fold(0.0f64, f64::max);
    let clip = 1e-13 * (1.0 + scale);
    let clipped: Vec<LaurentSeries> = coefficients
        .iter()
        .map(|f| {
            let mut c = f.clone();
            for k in f.indices() {
                if f.coeff(k).norm() < clip {
                    c.set_coeff(k, Complex64::default());
                }
            }
            c
        })
        .collect();
    let mut max_root = 0.0f64;
    for radius in radii {
        for z in grid::circle_points(radius, defaults::CONTAINMENT_GRID) {
            let a: Vec<Complex64> = clipped.iter().map(|f| f.eval(z)).collect();
            for root in companion_roots(&a) {
                max_root = max_root.max(root.norm());
            }
        }
    }
    max_root
}

/// Number of w-roots of F(z0, .) inside |w| = circle_radius, computed as the
/// winding of the logarithmic derivative at a fixed z0 on the sampling circle.
/// Rejects if F comes close to vanishing anywhere on the sampling torus or if
/// the quadrature strays from an integer.
pub fn winding_degree(f: &BiSeries, circle_radius: f64) -> Result<usize> {
    let mw = defaults::W_GRID;
    let mz = defaults::Z_GRID;
    let cz = f.z_domain().sampling_radius();
    let ws = grid::circle_points(circle_radius, mw);
    let mut min_abs = f64::INFINITY;
    for z in grid::circle_points(cz, mz) {
        let secs = f.w_sections_at(z);
        for &w in &ws {
            min_abs = min_abs.min(eval_poly(&secs, w).norm());
        }
    }
    if min_abs < defaults::INVERTIBILITY_FLOOR {
        return Err(Error::VanishesOnContour {
            min_abs,
            floor: defaults::INVERTIBILITY_FLOOR,
        });
    }
    let z0 = Complex64::new(cz, 0.0);
    let secs = f.w_sections_at(z0);
    let dsecs = derivative_sections(&secs);
    let mut acc = Complex64::default();
    for &w in &ws {
        acc += eval_poly(&dsecs, w) / eval_poly(&secs, w) * w;
    }
    let value = acc / mw as f64;
    let rounded = value.re.round();
    let distance = (value - rounded).norm();
    if distance > defaults::WINDING_INTEGER_TOL {
        return Err(Error::NonIntegerWinding {
            value: distance,
            tol: defaults::WINDING_INTEGER_TOL,
        });
    }
    if rounded < 0.0 {
        return Err(Error::NegativeWinding {
            value: rounded as i64,
        });
    }
    Ok(rounded as usize)
}

/// Power sums p_k(z) = sum of k-th powers of the n roots of F(z, .) inside
/// |w| = contour_radius, k = 1..=n, as Laurent series on F's window.
///
/// The constant integral p_0 is recomputed at every z sample and must stay
/// within the winding tolerance of n, so a root crossing the contour anywhere
/// along the circle is caught rather than silently folded into the series.
pub fn power_sum_coefficients(
    f: &BiSeries,
    n: usize,
    contour_radius: f64,
) -> Result<Vec<LaurentSeries>> {
    let (z_min, z_max) = (f.z_min(), f.z_max());
    let half = z_min.unsigned_abs().max(z_max.unsigned_abs()) as usize;
    let span = (z_max - z_min) as usize;
    let mz = defaults::Z_GRID.max((2 * half).max(span + 1).next_power_of_two());
    let mw = defaults::W_GRID;
    let cz = f.z_domain().sampling_radius();
    let df = f.d_dw();
    let ws = grid::circle_points(contour_radius, mw);
    let mut samples: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); mz]; n];
    for (iz, z) in grid::circle_points(cz, mz).into_iter().enumerate() {
        let secs = f.w_sections_at(z);
        let dsecs = df.w_sections_at(z);
        let mut sums = vec![Complex64::default(); n + 1];
        for &w in &ws {
            let fv = eval_poly(&secs, w);
            if fv.norm() < defaults::INVERTIBILITY_FLOOR {
                return Err(Error::VanishesOnContour {
                    min_abs: fv.norm(),
                    floor: defaults::INVERTIBILITY_FLOOR,
                });
            }
            // (1/2 pi i) contour dw becomes (1/m) sum over the grid of (.) * w
            let mut term = eval_poly(&dsecs, w) / fv * w;
            sums[0] += term;
            for s in sums.iter_mut().skip(1) {
                term *= w;
                *s += term;
            }
        }
        let p0 = sums[0] / mw as f64;
        if (p0 - n as f64).norm() > defaults::WINDING_INTEGER_TOL {
            return Err(Error::DegreeDrift {
                value: p0.re,
                at: iz,
                degree: n,
            });
        }
        for k in 1..=n {
            samples[k - 1][iz] = sums[k] / mw as f64;
        }
    }
    samples
        .into_iter()
        .map(|row| series_from_samples(&row, f.z_domain(), cz, z_min, z_max))
        .collect()
}

/// Newton's identities: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i with
/// e_0 = 1. Windows grow with each product; callers re-truncate.
pub fn newton_to_elementary(p: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
    let Some(first) = p.first() else {
        return Ok(Vec::new());
    };
    let domain = first.domain();
    let mut e = vec![LaurentSeries::constant(domain, Complex64::ONE)?];
    for k in 1..=p.len() {
        let mut acc = LaurentSeries::zero(domain, 0, 0)?;
        for i in 1..=k {
            let term = e[k - i].multiply(&p[i - 1])?;
            acc = if i % 2 == 1 {
                acc.add(&term)?
            } else {
                acc.sub(&term)?
            };
        }
        e.push(acc.scale(Complex64::new(1.0 / k as f64, 0.0)));
    }
    Ok(e.split_off(1))
}

/// Invertibility certificate and bookkeeping from a preparation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepReport {
    pub degree: usize,
    pub contour_radius: f64,
    pub containment_radius: f64,
    /// Range of |F / P| sampled on the contour torus; min > 0 certifies the
    /// cofactor h in F = h P is invertible there.
    pub h_min: f64,
    pub h_max: f64,
    /// Largest l2 mass dropped when fitting a coefficient into F's z window.
    pub truncation_loss: f64,
}

/// Weierstrass preparation: the monic polynomial with the same roots as F
/// inside |w| = contour_radius, coefficients on F's z window.
pub fn weierstrass_prep(
    f: &BiSeries,
    contour_radius: f64,
) -> Result<(WeierstrassPolynomial, PrepReport)> {
    let n = winding_degree(f, contour_radius)?;
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let p = power_sum_coefficients(f, n, contour_radius)?;
    let e = newton_to_elementary(&p)?;
    let mut coefficients = Vec::with_capacity(n);
    let mut truncation_loss = 0.0f64;
    for (idx, ek) in e.into_iter().enumerate() {
        let sign = if (idx + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let (fit, lost) = ek
            .scale(Complex64::new(sign, 0.0))
            .truncated(f.z_min(), f.z_max())?;
        truncation_loss = truncation_loss.max(lost);
        coefficients.push(fit);
    }
    let poly = WeierstrassPolynomial::new(coefficients)?;
    let band = (1.0 - defaults::CONTOUR_GUARD) * contour_radius;
    if poly.containment_radius() > band {
        return Err(Error::GuardBandViolation {
            root_abs: poly.containment_radius(),
            band,
            contour: contour_radius,
        });
    }
    let (h_min, h_max) = h_range(f, &poly, contour_radius);
    let containment_radius = poly.containment_radius();
    Ok((
        poly,
        PrepReport {
            degree: n,
            contour_radius,
            containment_radius,
            h_min,
            h_max,
            truncation_loss,
        },
    ))
}

/// Range of |F / P| on the contour torus, where P has no roots.
fn h_range(f: &BiSeries, p: &WeierstrassPolynomial, contour_radius: f64) -> (f64, f64) {
    let cz = f.z_domain().sampling_radius();
    let ws = grid::circle_points(contour_radius, defaults::W_GRID);
    let mut h_min = f64::INFINITY;
    let mut h_max = 0.0f64;
    for z in grid::circle_points(cz, defaults::Z_GRID) {
        let fsecs = f.w_sections_at(z);
        let psecs = p.w_sections_at(z);
        for &w in &ws {
            let ratio = (eval_poly(&fsecs, w) / eval_poly(&psecs, w)).norm();
            h_min = h_min.min(ratio);
            h_max = h_max.max(ratio);
        }
    }
    (h_min, h_max)
}

/// Weierstrass remainder: the unique R = sum h_i(z) w^{n-i} with H = R mod P,
/// obtained by reducing w-powers >= n through w^n -> -sum f_i w^{n-i}.
/// Returns h_1..h_n.
pub fn weierstrass_remainder(
    h: &BiSeries,
    p: &WeierstrassPolynomial,
) -> Result<Vec<LaurentSeries>> {
    if h.z_domain() != p.z_domain() {
        return Err(Error::DomainMismatch {
            context: "dividend and divisor on different annuli".into(),
        });
    }
    let n = p.degree();
    let mut sections: Vec<LaurentSeries> =
        (0..=h.w_degree()).map(|k| h.w_coefficient(k)).collect();
    for k in (n..sections.len()).rev() {
        let lead = sections[k].clone();
        if lead.coeffs().iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        for i in 1..=n {
            let shift = lead.multiply(p.coefficient(i))?;
            sections[k - i] = sections[k - i].sub(&shift)?;
        }
    }
    let zero = LaurentSeries::zero(p.z_domain(), 0, 0)?;
    Ok((1..=n)
        .map(|i| sections.get(n - i).cloned().unwrap_or_else(|| zero.clone()))
        .collect())
}
