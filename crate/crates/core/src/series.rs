//! Laurent series with explicit index windows over annuli.
//!
//! Every series is a finite window of coefficients `c_k`, `min_index <= k <=
//! max_index`, attached to the annulus it represents a function on. Windows
//! always straddle zero so plus/minus splitting is total; a disk forces
//! `min_index = 0`. Operations that would grow a window either return the grown
//! window (multiplication) or truncate and report the discarded mass.

use num_complex::Complex64;

use crate::defaults;
use crate::error::{Error, Result};
use crate::grid;

/// Open annulus `inner < |z| < outer`; `inner == 0` degenerates to a punctured
/// disk treated as a disk (Taylor windows only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    inner: f64,
    outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::InvalidAnnulus { inner, outer });
        }
        Ok(Annulus { inner, outer })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Annulus::new(0.0, radius)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer
    }

    pub fn is_disk(&self) -> bool {
        self.inner == 0.0
    }

    /// Radius of the circle used for sampling and coefficient extraction: the
    /// geometric mean of the boundary radii (half the outer radius on a disk).
    pub fn sampling_radius(&self) -> f64 {
        if self.is_disk() {
            self.outer / 2.0
        } else {
            (self.inner * self.outer).sqrt()
        }
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        self.inner < r && r < self.outer
    }

    pub fn contains(&self, sub: &Annulus) -> bool {
        self.inner <= sub.inner && sub.outer <= self.outer
    }
}

/// How coefficient vectors are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothnessClass {
    /// Max of |f| over the sample grid on the outer boundary circle.
    SupNorm,
    /// Weighted l2 norm (sum (1+|k|)^{2s} |c_k|^2)^{1/2}; Hilbert for any s >= 1.
    SobolevWeight(f64),
}

impl SmoothnessClass {
    pub fn sobolev(s: f64) -> Result<Self> {
        if !(s >= 1.0) {
            return Err(Error::Config(format!(
                "sobolev exponent {s} must be >= 1"
            )));
        }
        Ok(SmoothnessClass::SobolevWeight(s))
    }

    /// Per-index weight used when series coefficients enter weighted matrices.
    pub fn weight(&self, index: i32) -> f64 {
        match self {
            SmoothnessClass::SupNorm => 1.0,
            SmoothnessClass::SobolevWeight(s) => (1.0 + index.abs() as f64).powf(*s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    domain: Annulus,
    min_index: i32,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    /// `coeffs[i]` is the coefficient of `z^(min_index + i)`. The window must
    /// straddle zero, and Taylor-only windows are required on disks.
    pub fn new(domain: Annulus, min_index: i32, coeffs: Vec<Complex64>) -> Result<Self> {
        let max_index = min_index + coeffs.len() as i32 - 1;
        if coeffs.is_empty() || min_index > 0 || max_index < 0 {
            return Err(Error::InvalidWindow {
                min: min_index,
                max: max_index,
            });
        }
        if domain.is_disk() && min_index != 0 {
            return Err(Error::InvalidWindow {
                min: min_index,
                max: max_index,
            });
        }
        Ok(LaurentSeries {
            domain,
            min_index,
            coeffs,
        })
    }

    pub fn zero(domain: Annulus, min_index: i32, max_index: i32) -> Result<Self> {
        let len = (max_index - min_index + 1).max(1) as usize;
        LaurentSeries::new(domain, min_index, vec![Complex64::default(); len])
    }

    /// Single term c z^k, window padded to include zero.
    pub fn monomial(domain: Annulus, k: i32, c: Complex64) -> Result<Self> {
        let min = k.min(0);
        let max = k.max(0);
        let mut s = LaurentSeries::zero(domain, min, max)?;
        s.set_coeff(k, c);
        Ok(s)
    }

    pub fn constant(domain: Annulus, c: Complex64) -> Result<Self> {
        LaurentSeries::monomial(domain, 0, c)
    }

    pub fn domain(&self) -> Annulus {
        self.domain
    }

    pub fn min_index(&self) -> i32 {
        self.min_index
    }

    pub fn max_index(&self) -> i32 {
        self.min_index + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i32) -> Complex64 {
        if k < self.min_index || k > self.max_index() {
            Complex64::default()
        } else {
            self.coeffs[(k - self.min_index) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i32, c: Complex64) {
        assert!(
            k >= self.min_index && k <= self.max_index(),
            "index {k} outside window [{}, {}]",
            self.min_index,
            self.max_index()
        );
        self.coeffs[(k - self.min_index) as usize] = c;
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> + '_ {
        self.min_index..=self.max_index()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner from the top index down, then one power for the offset.
        let mut acc = Complex64::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.min_index)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    /// Coefficient phases rotated as under z -> e^{i theta} z.
    pub fn rotate(&self, theta: f64) -> Self {
        let mut out = self.clone();
        for (k, v) in (out.min_index..).zip(out.coeffs.iter_mut()) {
            *v *= Complex64::from_polar(1.0, theta * k as f64);
        }
        out
    }

    fn check_same_domain(&self, other: &Self, context: &str) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                context: format!(
                    "{context}: A[{}, {}] vs A[{}, {}]",
                    self.domain.inner, self.domain.outer, other.domain.inner, other.domain.outer
                ),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_domain(other, "series addition")?;
        let min = self.min_index.min(other.min_index);
        let max = self.max_index().max(other.max_index());
        let mut out = LaurentSeries::zero(self.domain, min, max)?;
        for k in out.min_index..=out.max_index() {
            out.set_coeff(k, self.coeff(k) + other.coeff(k));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Window convolution; the result window is the sum of the input windows.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_domain(other, "series multiplication")?;
        let min = self.min_index + other.min_index;
        let max = self.max_index() + other.max_index();
        let mut out = LaurentSeries::zero(self.domain, min, max)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let ka = self.min_index + i as i32;
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = ka + other.min_index + j as i32;
                let cur = out.coeff(k);
                out.set_coeff(k, cur + a * b);
            }
        }
        Ok(out)
    }

    /// Drops indices outside [min, max]; second value is the l2 mass discarded.
    pub fn truncated(&self, min: i32, max: i32) -> Result<(Self, f64)> {
        let mut out = LaurentSeries::zero(self.domain, min, max)?;
        let mut lost = 0.0;
        for k in self.min_index..=self.max_index() {
            let c = self.coeff(k);
            if k < min || k > max {
                lost += c.norm_sqr();
            } else {
                out.set_coeff(k, c);
            }
        }
        Ok((out, lost.sqrt()))
    }

    /// Splits into (plus, minus): plus keeps indices >= 0, minus indices < 0,
    /// and plus + minus reproduces the series coefficient by coefficient.
    pub fn split(&self) -> (Self, Self) {
        let max = self.max_index();
        let plus_len = (max.max(0) + 1) as usize;
        let mut plus = LaurentSeries {
            domain: self.domain,
            min_index: 0,
            coeffs: vec![Complex64::default(); plus_len],
        };
        for k in 0..=max.max(0) {
            plus.set_coeff(k, self.coeff(k));
        }
        let minus_min = self.min_index.min(0);
        let mut minus = LaurentSeries {
            domain: self.domain,
            min_index: minus_min,
            coeffs: vec![Complex64::default(); (-minus_min + 1) as usize],
        };
        for k in minus_min..0 {
            minus.set_coeff(k, self.coeff(k));
        }
        (plus, minus)
    }

    /// Same coefficients viewed on a concentric subannulus.
    pub fn restrict(&self, sub: Annulus) -> Result<Self> {
        if !self.domain.contains(&sub) {
            return Err(Error::NotContained {
                inner: self.domain.inner,
                outer: self.domain.outer,
                sub_inner: sub.inner,
                sub_outer: sub.outer,
            });
        }
        let mut out = self.clone();
        out.domain = sub;
        Ok(out)
    }

    /// Reinterprets the coefficients on a larger domain. The caller asserts the
    /// function actually extends (true for plus parts on disks, minus parts on
    /// outward extensions); no numerical check is possible from the window alone.
    pub fn with_domain(&self, domain: Annulus) -> Result<Self> {
        let mut out = self.clone();
        if domain.is_disk() && self.min_index < 0 {
            for k in self.min_index..0 {
                if self.coeff(k).norm() != 0.0 {
                    return Err(Error::InvalidWindow {
                        min: self.min_index,
                        max: self.max_index(),
                    });
                }
            }
            let (plus, _) = self.split();
            out = plus;
        }
        out.domain = domain;
        Ok(out)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm_on_circle(&self, radius: f64, samples: usize) -> f64 {
        grid::circle_points(radius, samples)
            .into_iter()
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    pub fn s_norm(&self, class: SmoothnessClass) -> f64 {
        match class {
            SmoothnessClass::SupNorm => {
                self.sup_norm_on_circle(self.domain.outer_radius(), defaults::Z_GRID)
            }
            SmoothnessClass::SobolevWeight(s) => self
                .coeffs
                .iter()
                .zip(self.min_index..)
                .map(|(c, k)| (1.0 + k.abs() as f64).powf(2.0 * s) * c.norm_sqr())
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Coefficients on [min, max] from samples on the circle |z| = circle_radius,
/// which must lie inside the domain. The grid must be a power of two at least
/// twice the largest window index and longer than the window span.
pub fn series_from_samples(
    samples: &[Complex64],
    domain: Annulus,
    circle_radius: f64,
    min: i32,
    max: i32,
) -> Result<LaurentSeries> {
    if !domain.contains_radius(circle_radius) {
        return Err(Error::DomainMismatch {
            context: format!(
                "sampling circle |z| = {circle_radius} outside A[{}, {}]",
                domain.inner, domain.outer
            ),
        });
    }
    let coeffs = grid::coefficients_from_circle(samples, circle_radius, min, max)?;
    LaurentSeries::new(domain, min, coeffs)
}

/// Samples a function on the domain's sampling circle and extracts the window.
pub fn series_from_fn(
    f: impl Fn(Complex64) -> Complex64,
    domain: Annulus,
    min: i32,
    max: i32,
    grid_size: usize,
) -> Result<LaurentSeries> {
    let c = domain.sampling_radius();
    let samples: Vec<Complex64> = grid::circle_points(c, grid_size)
        .into_iter()
        .map(f)
        .collect();
    series_from_samples(&samples, domain, c, min, max)
}

/// Pointwise reciprocal on the sample circle, re-extracted on [out_min, out_max].
///
/// Fails when |a| dips below the invertibility floor anywhere on the grid.
pub fn series_invert(
    a: &LaurentSeries,
    circle_radius: f64,
    out_min: i32,
    out_max: i32,
    grid_size: usize,
) -> Result<LaurentSeries> {
    let points = grid::circle_points(circle_radius, grid_size);
    let mut samples = Vec::with_capacity(points.len());
    let mut min_abs = f64::INFINITY;
    for z in points {
        let v = a.eval(z);
        min_abs = min_abs.min(v.norm());
        samples.push(v);
    }
    if min_abs < defaults::INVERTIBILITY_FLOOR {
        return Err(Error::NotInvertible {
            min_abs,
            floor: defaults::INVERTIBILITY_FLOOR,
        });
    }
    for v in &mut samples {
        *v = v.inv();
    }
    series_from_samples(&samples, a.domain(), circle_radius, out_min, out_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(inner: f64, outer: f64) -> Annulus {
        Annulus::new(inner, outer).unwrap()
    }

    #[test]
    fn annulus_validation() {
        assert!(Annulus::new(1.0, 2.0).is_ok());
        assert!(Annulus::new(0.0, 2.0).unwrap().is_disk());
        assert!(Annulus::new(2.0, 1.0).is_err());
        assert!(Annulus::new(-0.1, 1.0).is_err());
        assert!(Annulus::new(1.0, 1.0).is_err());
    }

    #[test]
    fn window_must_straddle_zero() {
        let a = annulus(1.0, 2.0);
        assert!(LaurentSeries::zero(a, 1, 3).is_err());
        assert!(LaurentSeries::zero(a, -3, -1).is_err());
        assert!(LaurentSeries::zero(a, -3, 0).is_ok());
        let disk = annulus(0.0, 1.0);
        assert!(LaurentSeries::zero(disk, -1, 2).is_err());
        assert!(LaurentSeries::zero(disk, 0, 2).is_ok());
    }

    #[test]
    fn extraction_recovers_z_plus_two_over_z() {
        // f(z) = z + 2/z on A[1, 2], window [-2, 2]
        let a = annulus(1.0, 2.0);
        let f = |z: Complex64| z + 2.0 / z;
        let s = series_from_fn(f, a, -2, 2, 16).unwrap();
        assert!((s.coeff(-1) - 2.0).norm() < 1e-13);
        assert!((s.coeff(1) - 1.0).norm() < 1e-13);
        for k in [-2, 0, 2] {
            assert!(s.coeff(k).norm() < 1e-13);
        }
    }

    #[test]
    fn extraction_of_simple_pole_outside() {
        // 1/(z - 3) on A[1, 2]: holomorphic on |z| < 3, so pure plus part with
        // coefficients -3^{-k-1}.
        let a = annulus(1.0, 2.0);
        let f = |z: Complex64| (z - 3.0).inv();
        let s = series_from_fn(f, a, -32, 32, 256).unwrap();
        for k in 0..=10 {
            let want = -(3.0f64).powi(-k - 1);
            assert!(
                (s.coeff(k) - want).norm() < 1e-12,
                "k = {k}: {} vs {want}",
                s.coeff(k)
            );
        }
        for k in -32..0 {
            assert!(s.coeff(k).norm() < 1e-12, "negative index {k} leaked");
        }
    }

    #[test]
    fn multiply_exponentials_is_one() {
        // Truncated e^z and e^{-z} multiply to 1 + O(window tail).
        let a = annulus(0.5, 2.0);
        let mut cp = LaurentSeries::zero(a, 0, 32).unwrap();
        let mut cm = LaurentSeries::zero(a, 0, 32).unwrap();
        let mut fact = 1.0;
        for k in 0..=32 {
            if k > 0 {
                fact *= k as f64;
            }
            cp.set_coeff(k, Complex64::new(1.0 / fact, 0.0));
            cm.set_coeff(k, Complex64::new((-1.0f64).powi(k) / fact, 0.0));
        }
        let prod = cp.multiply(&cm).unwrap();
        assert!((prod.coeff(0) - 1.0).norm() < 1e-14);
        for k in 1..=32 {
            assert!(prod.coeff(k).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn multiply_rejects_domain_mismatch() {
        let s1 = LaurentSeries::constant(annulus(1.0, 2.0), Complex64::ONE).unwrap();
        let s2 = LaurentSeries::constant(annulus(1.0, 3.0), Complex64::ONE).unwrap();
        assert!(matches!(
            s1.multiply(&s2),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn invert_geometric_series() {
        // 1/(1 + 0.3 z) = sum (-0.3)^k z^k
        let a = annulus(0.5, 2.0);
        let mut s = LaurentSeries::zero(a, 0, 1).unwrap();
        s.set_coeff(0, Complex64::ONE);
        s.set_coeff(1, Complex64::new(0.3, 0.0));
        let inv = series_invert(&s, a.sampling_radius(), 0, 64, 256).unwrap();
        for k in 0..=20 {
            let want = (-0.3f64).powi(k);
            assert!(
                (inv.coeff(k) - want).norm() < 1e-13,
                "k = {k}: {} vs {want}",
                inv.coeff(k)
            );
        }
        let round = s.multiply(&inv).unwrap();
        assert!((round.coeff(0) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn invert_of_monomial_is_monomial() {
        let a = annulus(0.5, 2.0);
        let z = LaurentSeries::monomial(a, 1, Complex64::ONE).unwrap();
        let inv = series_invert(&z, 1.0, -4, 4, 64).unwrap();
        assert!((inv.coeff(-1) - 1.0).norm() < 1e-14);
        for k in -4..=4 {
            if k != -1 {
                assert!(inv.coeff(k).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn invert_rejects_vanishing_function() {
        let a = annulus(0.5, 2.0);
        // z - 1 vanishes on |z| = 1, the sampling circle
        let mut s = LaurentSeries::zero(a, 0, 1).unwrap();
        s.set_coeff(0, Complex64::new(-1.0, 0.0));
        s.set_coeff(1, Complex64::ONE);
        let err = series_invert(&s, 1.0, -8, 8, 256).unwrap_err();
        assert!(matches!(err, Error::NotInvertible { .. }));
    }

    #[test]
    fn split_is_exact_partition() {
        let a = annulus(1.0, 2.0);
        let mut s = LaurentSeries::zero(a, -3, 4).unwrap();
        for k in -3..=4 {
            s.set_coeff(k, Complex64::new(k as f64, 0.5 * k as f64));
        }
        let (plus, minus) = s.split();
        assert_eq!(plus.min_index(), 0);
        assert!(minus.coeff(0).norm() == 0.0);
        for k in -3..=4 {
            assert_eq!(plus.coeff(k) + minus.coeff(k), s.coeff(k));
            if k < 0 {
                assert_eq!(plus.coeff(k), Complex64::default());
            } else {
                assert_eq!(minus.coeff(k), Complex64::default());
            }
        }
    }

    #[test]
    fn restrict_is_identity_on_coefficients() {
        let a = annulus(0.5, 2.0);
        let s = LaurentSeries::monomial(a, -2, Complex64::new(0.0, 1.0)).unwrap();
        let r = s.restrict(annulus(0.9, 1.2)).unwrap();
        assert_eq!(r.coeffs(), s.coeffs());
        assert!(s.restrict(annulus(0.4, 1.0)).is_err());
    }

    #[test]
    fn sobolev_norm_of_monomial() {
        let a = annulus(1.0, 2.0);
        let s = LaurentSeries::monomial(a, 3, Complex64::ONE).unwrap();
        let class = SmoothnessClass::sobolev(1.5).unwrap();
        let want = (4.0f64).powf(1.5);
        assert!((s.s_norm(class) - want).abs() < 1e-12);
        // negative index weighs the same
        let sm = LaurentSeries::monomial(a, -3, Complex64::ONE).unwrap();
        assert!((sm.s_norm(class) - want).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_on_outer_boundary() {
        let a = annulus(0.5, 2.0);
        let s = LaurentSeries::monomial(a, 2, Complex64::new(3.0, 0.0)).unwrap();
        assert!((s.s_norm(SmoothnessClass::SupNorm) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn schwarz_decay_for_minus_parts() {
        // On A[delta, 1], a series with only negative indices obeys
        // sup_{|z|=1} |f| <= delta * sup_{|z|=delta} |f|.
        let delta = 0.3;
        let a = annulus(delta, 1.0);
        let mut f = LaurentSeries::zero(a, -6, 0).unwrap();
        let amps = [0.9, -0.4, 0.25, 0.1, -0.05, 0.7];
        for (i, amp) in amps.iter().enumerate() {
            f.set_coeff(-(i as i32) - 1, Complex64::new(*amp, 0.1 * i as f64));
        }
        let outer = f.sup_norm_on_circle(1.0, 512);
        let inner = f.sup_norm_on_circle(delta, 512);
        assert!(
            outer <= delta * inner * (1.0 + 1e-9),
            "outer {outer} vs delta*inner {}",
            delta * inner
        );
    }

    #[test]
    fn truncation_reports_lost_mass() {
        let a = annulus(1.0, 2.0);
        let mut s = LaurentSeries::zero(a, -2, 2).unwrap();
        for k in -2..=2 {
            s.set_coeff(k, Complex64::new(1.0, 0.0));
        }
        let (t, lost) = s.truncated(-1, 1).unwrap();
        assert_eq!(t.min_index(), -1);
        assert_eq!(t.max_index(), 1);
        assert!((lost - (2.0f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rotation_preserves_norms() {
        let a = annulus(1.0, 2.0);
        let mut s = LaurentSeries::zero(a, -4, 4).unwrap();
        for k in -4..=4 {
            s.set_coeff(k, Complex64::new(0.3 * k as f64, 1.0 - 0.1 * k as f64));
        }
        // Sobolev norms see only coefficient magnitudes: exact for any angle.
        let r = s.rotate(0.7343);
        for class in [
            SmoothnessClass::sobolev(1.0).unwrap(),
            SmoothnessClass::sobolev(2.0).unwrap(),
        ] {
            let n0 = s.s_norm(class);
            let n1 = r.s_norm(class);
            assert!(
                (n0 - n1).abs() <= 1e-12 * (1.0 + n0),
                "{class:?}: {n0} vs {n1}"
            );
        }
        // The grid-max norm is invariant under rotations that permute the grid.
        let grid_angle = 2.0 * std::f64::consts::PI * 17.0 / defaults::Z_GRID as f64;
        let rg = s.rotate(grid_angle);
        let n0 = s.s_norm(SmoothnessClass::SupNorm);
        let n1 = rg.s_norm(SmoothnessClass::SupNorm);
        assert!((n0 - n1).abs() <= 1e-12 * (1.0 + n0), "{n0} vs {n1}");
    }

    #[test]
    fn restriction_shrinks_the_sup_norm_and_keeps_coefficients() {
        let a = annulus(0.5, 2.0);
        let pole = Complex64::new(3.0, 0.0);
        let f = series_from_fn(|z| (z - pole).finv(), a, -16, 16, 64).unwrap();
        let g = f.restrict(Annulus::new(0.7, 1.4).unwrap()).unwrap();
        assert_eq!(g.coeffs(), f.coeffs());
        // The sup norm reads the outer circle, which moved away from the pole.
        assert!(g.s_norm(SmoothnessClass::SupNorm) < f.s_norm(SmoothnessClass::SupNorm));
        // Weighted norms never see the domain at all.
        let class = SmoothnessClass::sobolev(1.0).unwrap();
        assert_eq!(g.s_norm(class), f.s_norm(class));
    }

    #[test]
    fn pole_inside_the_inner_circle_splits_to_a_pure_principal_part() {
        let a = annulus(0.5, 2.0);
        let pole = Complex64::new(0.3, 0.0);
        let f = series_from_fn(|z| (z - pole).finv(), a, -24, 24, 128).unwrap();
        let (plus, minus) = f.split();
        assert!(plus.l2_norm() < 1e-12);
        assert!((minus.coeff(-1) - Complex64::ONE).norm() < 1e-12);
        assert!((minus.coeff(-3) - Complex64::new(0.09, 0.0)).norm() < 1e-12);
    }
}
