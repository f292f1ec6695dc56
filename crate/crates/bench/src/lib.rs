//! Shared fixtures for the pipeline benchmarks.

use curvedef_core::{
    Annulus, BiSeries, Complex64, DistortedCylinder, LaurentSeries, SolveOptions,
    WeierstrassPolynomial,
};

pub fn unit_times_quadratic(z_half: i32, w_degree: usize) -> BiSeries {
    let domain = Annulus::new(0.5, 2.0).unwrap();
    let mut f = BiSeries::zero(domain, 1.0, -z_half, z_half, w_degree).unwrap();
    // (1 + 0.3 w)(w^2 - z/4)
    f.set_coeff(0, 2, Complex64::ONE);
    f.set_coeff(0, 3, Complex64::new(0.3, 0.0));
    f.set_coeff(1, 0, Complex64::new(-0.25, 0.0));
    f.set_coeff(1, 1, Complex64::new(-0.075, 0.0));
    f
}

pub fn quadratic_poly(z_half: i32) -> WeierstrassPolynomial {
    let domain = Annulus::new(0.5, 2.0).unwrap();
    let f1 = LaurentSeries::zero(domain, -z_half, z_half).unwrap();
    let mut f2 = LaurentSeries::zero(domain, -z_half, z_half).unwrap();
    f2.set_coeff(1, Complex64::new(-0.25, 0.0));
    WeierstrassPolynomial::new(vec![f1, f2]).unwrap()
}

pub fn shear_cylinder(eps: f64) -> DistortedCylinder {
    DistortedCylinder::shear(Annulus::new(0.5, 2.0).unwrap(), 0.9, eps).unwrap()
}

pub fn loose_opts() -> SolveOptions {
    SolveOptions {
        smallness_threshold: 1.0,
        ..SolveOptions::default()
    }
}
