//! Bivariate series c_{jk} z^j w^k: Laurent in the base variable z over an
//! annulus, polynomial in the fiber variable w on |w| <= w_radius.
//!
//! These carry transition maps z2 = g(z1, w) of distorted cylinders and the
//! residuals of distorted Weierstrass extraction. Coefficients live in a fixed
//! rectangular window; grid operations (composition, pointwise quotients) go
//! through torus sampling at (sampling_radius, w_radius).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid;
use crate::series::{Annulus, LaurentSeries, SmoothnessClass};

#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    z_domain: Annulus,
    w_radius: f64,
    z_min: i32,
    w_degree: usize,
    /// Row-major over z rows: coeffs[(j - z_min) * (w_degree + 1) + k].
    coeffs: Vec<Complex64>,
}

impl BiSeries {
    pub fn zero(
        z_domain: Annulus,
        w_radius: f64,
        z_min: i32,
        z_max: i32,
        w_degree: usize,
    ) -> Result<Self> {
        if z_min > 0 || z_max < 0 {
            return Err(Error::InvalidWindow {
                min: z_min,
                max: z_max,
            });
        }
        if z_domain.is_disk() && z_min != 0 {
            return Err(Error::InvalidWindow {
                min: z_min,
                max: z_max,
            });
        }
        if !(w_radius > 0.0 && w_radius.is_finite()) {
            return Err(Error::Config(format!(
                "fiber radius {w_radius} must be positive and finite"
            )));
        }
        let rows = (z_max - z_min + 1) as usize;
        Ok(BiSeries {
            z_domain,
            w_radius,
            z_min,
            w_degree,
            coeffs: vec![Complex64::default(); rows * (w_degree + 1)],
        })
    }

    /// Builds from w-power sections: sections[k] is the z-series multiplying
    /// w^k. All sections must share a domain; the z window is their union.
    pub fn from_w_coefficients(sections: &[LaurentSeries], w_radius: f64) -> Result<Self> {
        let first = sections.first().ok_or(Error::DegreeZero)?;
        let mut z_min = 0;
        let mut z_max = 0;
        for s in sections {
            if s.domain() != first.domain() {
                return Err(Error::DomainMismatch {
                    context: "bi-series sections on different annuli".into(),
                });
            }
            z_min = z_min.min(s.min_index());
            z_max = z_max.max(s.max_index());
        }
        let mut out = BiSeries::zero(first.domain(), w_radius, z_min, z_max, sections.len() - 1)?;
        for (k, s) in sections.iter().enumerate() {
            for j in s.indices() {
                out.set_coeff(j, k, s.coeff(j));
            }
        }
        Ok(out)
    }

    pub fn from_laurent(f: &LaurentSeries, w_radius: f64, w_degree: usize) -> Result<Self> {
        let mut out = BiSeries::zero(
            f.domain(),
            w_radius,
            f.min_index(),
            f.max_index(),
            w_degree,
        )?;
        for j in f.indices() {
            out.set_coeff(j, 0, f.coeff(j));
        }
        Ok(out)
    }

    pub fn z_domain(&self) -> Annulus {
        self.z_domain
    }

    pub fn w_radius(&self) -> f64 {
        self.w_radius
    }

    pub fn z_min(&self) -> i32 {
        self.z_min
    }

    pub fn z_max(&self) -> i32 {
        self.z_min + (self.coeffs.len() / (self.w_degree + 1)) as i32 - 1
    }

    pub fn w_degree(&self) -> usize {
        self.w_degree
    }

    pub fn coeff(&self, j: i32, k: usize) -> Complex64 {
        if j < self.z_min || j > self.z_max() || k > self.w_degree {
            Complex64::default()
        } else {
            self.coeffs[(j - self.z_min) as usize * (self.w_degree + 1) + k]
        }
    }

    pub fn set_coeff(&mut self, j: i32, k: usize, c: Complex64) {
        assert!(
            j >= self.z_min && j <= self.z_max() && k <= self.w_degree,
            "index ({j}, {k}) outside window [{}, {}] x [0, {}]",
            self.z_min,
            self.z_max(),
            self.w_degree
        );
        self.coeffs[(j - self.z_min) as usize * (self.w_degree + 1) + k] = c;
    }

    /// The z-series multiplying w^k, on the full z window.
    pub fn w_coefficient(&self, k: usize) -> LaurentSeries {
        let mut s = LaurentSeries::zero(self.z_domain, self.z_min, self.z_max())
            .expect("window validated at construction");
        if k <= self.w_degree {
            for j in self.z_min..=self.z_max() {
                s.set_coeff(j, self.coeff(j, k));
            }
        }
        s
    }

    /// Coefficients of the fiber polynomial w -> F(z, w) at fixed z: entry k
    /// multiplies w^k. One simultaneous Horner pass over the z rows.
    pub fn w_sections_at(&self, z: Complex64) -> Vec<Complex64> {
        let width = self.w_degree + 1;
        let mut acc = vec![Complex64::default(); width];
        for row in self.coeffs.chunks_exact(width).rev() {
            for (a, c) in acc.iter_mut().zip(row) {
                *a = *a * z + c;
            }
        }
        let offset = z.powi(self.z_min);
        for a in &mut acc {
            *a *= offset;
        }
        acc
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        eval_poly(&self.w_sections_at(z), w)
    }

    /// Derivative in the fiber variable.
    pub fn d_dw(&self) -> Self {
        let w_degree = self.w_degree.saturating_sub(1);
        let mut out = BiSeries::zero(self.z_domain, self.w_radius, self.z_min, self.z_max(), w_degree)
            .expect("window validated at construction");
        for j in self.z_min..=self.z_max() {
            for k in 1..=self.w_degree {
                out.set_coeff(j, k - 1, self.coeff(j, k) * k as f64);
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    fn check_compatible(&self, other: &Self, context: &str) -> Result<()> {
        if self.z_domain != other.z_domain || self.w_radius != other.w_radius {
            return Err(Error::DomainMismatch {
                context: context.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "bi-series addition")?;
        let z_min = self.z_min.min(other.z_min);
        let z_max = self.z_max().max(other.z_max());
        let w_degree = self.w_degree.max(other.w_degree);
        let mut out = BiSeries::zero(self.z_domain, self.w_radius, z_min, z_max, w_degree)?;
        for j in z_min..=z_max {
            for k in 0..=w_degree {
                out.set_coeff(j, k, self.coeff(j, k) + other.coeff(j, k));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Window convolution; z windows and w degrees add.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "bi-series multiplication")?;
        let mut out = BiSeries::zero(
            self.z_domain,
            self.w_radius,
            self.z_min + other.z_min,
            self.z_max() + other.z_max(),
            self.w_degree + other.w_degree,
        )?;
        for ja in self.z_min..=self.z_max() {
            for ka in 0..=self.w_degree {
                let a = self.coeff(ja, ka);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for jb in other.z_min..=other.z_max() {
                    for kb in 0..=other.w_degree {
                        let b = other.coeff(jb, kb);
                        if b.norm_sqr() == 0.0 {
                            continue;
                        }
                        let cur = out.coeff(ja + jb, ka + kb);
                        out.set_coeff(ja + jb, ka + kb, cur + a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Shifts every term up by w^shift.
    pub fn mul_w_power(&self, shift: usize) -> Self {
        let mut out = BiSeries {
            z_domain: self.z_domain,
            w_radius: self.w_radius,
            z_min: self.z_min,
            w_degree: self.w_degree + shift,
            coeffs: vec![Complex64::default(); 0],
        };
        let rows = (self.z_max() - self.z_min + 1) as usize;
        out.coeffs = vec![Complex64::default(); rows * (out.w_degree + 1)];
        for j in self.z_min..=self.z_max() {
            for k in 0..=self.w_degree {
                out.set_coeff(j, k + shift, self.coeff(j, k));
            }
        }
        out
    }

    /// Divides by w^shift. Returns the shifted series and the l2 mass of the
    /// w-powers below `shift` that the division discards.
    pub fn div_w_power(&self, shift: usize) -> (Self, f64) {
        let w_degree = self.w_degree.saturating_sub(shift);
        let mut out = BiSeries::zero(self.z_domain, self.w_radius, self.z_min, self.z_max(), w_degree)
            .expect("window validated at construction");
        let mut lost = 0.0;
        for j in self.z_min..=self.z_max() {
            for k in 0..=self.w_degree {
                if k < shift {
                    lost += self.coeff(j, k).norm_sqr();
                } else {
                    out.set_coeff(j, k - shift, self.coeff(j, k));
                }
            }
        }
        (out, lost.sqrt())
    }

    /// Truncates the z window and w degree; second value is the discarded l2 mass.
    pub fn truncated(&self, z_min: i32, z_max: i32, w_degree: usize) -> Result<(Self, f64)> {
        let mut out = BiSeries::zero(self.z_domain, self.w_radius, z_min, z_max, w_degree)?;
        let mut lost = 0.0;
        for j in self.z_min..=self.z_max() {
            for k in 0..=self.w_degree {
                let c = self.coeff(j, k);
                if j < z_min || j > z_max || k > w_degree {
                    lost += c.norm_sqr();
                } else {
                    out.set_coeff(j, k, c);
                }
            }
        }
        Ok((out, lost.sqrt()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// S-norm bound on the cylinder: sum over w powers of w_radius^k times the
    /// section norm, dominating sup_{|w| <= w_radius} of the w-slice norms.
    pub fn s_norm(&self, class: SmoothnessClass) -> f64 {
        (0..=self.w_degree)
            .map(|k| self.w_radius.powi(k as i32) * self.w_coefficient(k).s_norm(class))
            .sum()
    }

    /// Samples on the torus |z| = z sampling radius, |w| = w_radius; row-major
    /// over z first, matching the layout grid::coefficients_from_torus expects.
    pub fn sample_torus(&self, mz: usize, mw: usize) -> Vec<Complex64> {
        let cz = self.z_domain.sampling_radius();
        let ws = grid::circle_points(self.w_radius, mw);
        let mut out = Vec::with_capacity(mz * mw);
        for z in grid::circle_points(cz, mz) {
            let sections = self.w_sections_at(z);
            for &w in &ws {
                out.push(eval_poly(&sections, w));
            }
        }
        out
    }

    pub fn from_torus_samples(
        samples: &[Complex64],
        z_domain: Annulus,
        w_radius: f64,
        mz: usize,
        mw: usize,
        z_min: i32,
        z_max: i32,
        w_degree: usize,
    ) -> Result<Self> {
        let cz = z_domain.sampling_radius();
        let coeffs = grid::coefficients_from_torus(
            samples, mz, mw, cz, w_radius, z_min, z_max, w_degree,
        )?;
        Ok(BiSeries {
            z_domain,
            w_radius,
            z_min,
            w_degree,
            coeffs,
        })
    }
}

/// Horner evaluation of a dense polynomial, lowest coefficient first.
pub fn eval_poly(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::default();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Pointwise quotient num/den on the shared sampling torus, re-extracted on the
/// given window. Fails when |den| dips below `floor` anywhere on the grid.
pub fn grid_quotient(
    num: &BiSeries,
    den: &BiSeries,
    z_min: i32,
    z_max: i32,
    w_degree: usize,
    mz: usize,
    mw: usize,
    floor: f64,
) -> Result<BiSeries> {
    num.check_compatible(den, "bi-series quotient")?;
    let mut samples = num.sample_torus(mz, mw);
    let den_samples = den.sample_torus(mz, mw);
    let mut min_abs = f64::INFINITY;
    for d in &den_samples {
        min_abs = min_abs.min(d.norm());
    }
    if min_abs < floor {
        return Err(Error::NotInvertible { min_abs, floor });
    }
    for (n, d) in samples.iter_mut().zip(&den_samples) {
        *n /= d;
    }
    BiSeries::from_torus_samples(
        &samples,
        num.z_domain,
        num.w_radius,
        mz,
        mw,
        z_min,
        z_max,
        w_degree,
    )
}

/// Composition f(g(z, w)) by sampling f at g-values over the torus and
/// transforming back onto the requested window.
///
/// Every sampled g-value must stay inside f's annulus (tiny relative slack for
/// boundary roundoff); otherwise the composition leaves the annulus.
pub fn substitute(
    f: &LaurentSeries,
    g: &BiSeries,
    z_min: i32,
    z_max: i32,
    w_degree: usize,
    mz: usize,
    mw: usize,
) -> Result<BiSeries> {
    let dom = f.domain();
    let slack = 1e-9;
    let lo = dom.inner_radius() * (1.0 - slack);
    let hi = dom.outer_radius() * (1.0 + slack);
    let cz = g.z_domain.sampling_radius();
    let ws = grid::circle_points(g.w_radius, mw);
    let mut samples = Vec::with_capacity(mz * mw);
    for z in grid::circle_points(cz, mz) {
        let sections = g.w_sections_at(z);
        for &w in &ws {
            let v = eval_poly(&sections, w);
            let r = v.norm();
            if r < lo || r > hi {
                return Err(Error::CompositionLeavesAnnulus {
                    value: r,
                    inner: dom.inner_radius(),
                    outer: dom.outer_radius(),
                });
            }
            samples.push(f.eval(v));
        }
    }
    BiSeries::from_torus_samples(
        &samples,
        g.z_domain,
        g.w_radius,
        mz,
        mw,
        z_min,
        z_max,
        w_degree,
    )
}
