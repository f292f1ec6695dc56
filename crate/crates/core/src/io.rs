//! Plain-text serialization for series, polynomials, split forms, and
//! families.
//!
//! Floats print with 17 significant digits, which reproduces every f64 bit
//! pattern on re-parse. Writers emit every slot in a window, zeros included,
//! so windows survive the round trip. Parsers are strict: fixed field counts,
//! indices in declared order, no trailing content; failures carry 1-based
//! line numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::biseries::BiSeries;
use crate::distorted::DistortedWP;
use crate::error::{Error, Result};
use crate::moduli::{chart_polynomials, ChartConfig, Family};
use crate::series::{Annulus, LaurentSeries};
use crate::weierstrass::WeierstrassPolynomial;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct LineParser<'a> {
    lines: std::str::Lines<'a>,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn new(text: &'a str) -> Self {
        LineParser {
            lines: text.lines(),
            line: 0,
        }
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::ParseFormat {
            line: self.line,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        self.line += 1;
        match self.lines.next() {
            Some(raw) if !raw.trim().is_empty() => Ok(raw),
            Some(_) => Err(self.fail("blank line inside a block")),
            None => Err(self.fail("unexpected end of input")),
        }
    }

    /// Consumes the rest of the input, failing on anything but whitespace.
    fn expect_end(&mut self) -> Result<()> {
        for raw in self.lines.by_ref() {
            self.line += 1;
            if !raw.trim().is_empty() {
                return Err(self.fail("trailing content after the final block"));
            }
        }
        Ok(())
    }

    fn parse_i32(&self, token: &str, what: &str) -> Result<i32> {
        token
            .parse()
            .map_err(|_| self.fail(format!("{what}: expected an integer, got `{token}`")))
    }

    fn parse_usize(&self, token: &str, what: &str) -> Result<usize> {
        token
            .parse()
            .map_err(|_| self.fail(format!("{what}: expected a non-negative integer, got `{token}`")))
    }

    fn parse_f64(&self, token: &str, what: &str) -> Result<f64> {
        token
            .parse()
            .map_err(|_| self.fail(format!("{what}: expected a float, got `{token}`")))
    }
}

fn push_laurent(out: &mut String, s: &LaurentSeries) {
    let _ = writeln!(
        out,
        "LAURENT {} {} {} {}",
        s.min_index(),
        s.max_index(),
        fmt_f64(s.domain().inner_radius()),
        fmt_f64(s.domain().outer_radius())
    );
    for k in s.min_index()..=s.max_index() {
        let c = s.coeff(k);
        let _ = writeln!(out, "{k} {} {}", fmt_f64(c.re), fmt_f64(c.im));
    }
}

fn parse_laurent(p: &mut LineParser) -> Result<LaurentSeries> {
    let header = p.next_line()?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "LAURENT" {
        return Err(p.fail("expected header `LAURENT k_min k_max r_inner r_outer`"));
    }
    let k_min = p.parse_i32(tokens[1], "k_min")?;
    let k_max = p.parse_i32(tokens[2], "k_max")?;
    if k_max < k_min {
        return Err(p.fail(format!("empty window [{k_min}, {k_max}]")));
    }
    let inner = p.parse_f64(tokens[3], "r_inner")?;
    let outer = p.parse_f64(tokens[4], "r_outer")?;
    let domain = Annulus::new(inner, outer)?;
    let mut coeffs = Vec::with_capacity((k_max - k_min + 1) as usize);
    for k in k_min..=k_max {
        let line = p.next_line()?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(p.fail("expected `k re im`"));
        }
        let got = p.parse_i32(t[0], "index")?;
        if got != k {
            return Err(p.fail(format!("expected index {k}, got {got}")));
        }
        coeffs.push(Complex64::new(
            p.parse_f64(t[1], "re")?,
            p.parse_f64(t[2], "im")?,
        ));
    }
    LaurentSeries::new(domain, k_min, coeffs)
}

pub fn laurent_to_string(s: &LaurentSeries) -> String {
    let mut out = String::new();
    push_laurent(&mut out, s);
    out
}

pub fn laurent_from_str(text: &str) -> Result<LaurentSeries> {
    let mut p = LineParser::new(text);
    let s = parse_laurent(&mut p)?;
    p.expect_end()?;
    Ok(s)
}

pub fn biseries_to_string(f: &BiSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "BISERIES {} {} {} {} {} {}",
        f.z_min(),
        f.z_max(),
        f.w_degree(),
        fmt_f64(f.z_domain().inner_radius()),
        fmt_f64(f.z_domain().outer_radius()),
        fmt_f64(f.w_radius())
    );
    for k in 0..=f.w_degree() {
        for j in f.z_min()..=f.z_max() {
            let c = f.coeff(j, k);
            let _ = writeln!(out, "{j} {k} {} {}", fmt_f64(c.re), fmt_f64(c.im));
        }
    }
    out
}

pub fn biseries_from_str(text: &str) -> Result<BiSeries> {
    let mut p = LineParser::new(text);
    let header = p.next_line()?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 7 || tokens[0] != "BISERIES" {
        return Err(p.fail("expected header `BISERIES z_min z_max w_deg r_inner r_outer rho`"));
    }
    let z_min = p.parse_i32(tokens[1], "z_min")?;
    let z_max = p.parse_i32(tokens[2], "z_max")?;
    let w_deg = p.parse_usize(tokens[3], "w_deg")?;
    let inner = p.parse_f64(tokens[4], "r_inner")?;
    let outer = p.parse_f64(tokens[5], "r_outer")?;
    let rho = p.parse_f64(tokens[6], "rho")?;
    let domain = Annulus::new(inner, outer)?;
    let mut f = BiSeries::zero(domain, rho, z_min, z_max, w_deg)?;
    for k in 0..=w_deg {
        for j in z_min..=z_max {
            let line = p.next_line()?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 {
                return Err(p.fail("expected `j k re im`"));
            }
            let gj = p.parse_i32(t[0], "z index")?;
            let gk = p.parse_usize(t[1], "w level")?;
            if gj != j || gk != k {
                return Err(p.fail(format!("expected slot ({j}, {k}), got ({gj}, {gk})")));
            }
            f.set_coeff(
                j,
                k,
                Complex64::new(p.parse_f64(t[2], "re")?, p.parse_f64(t[3], "im")?),
            );
        }
    }
    p.expect_end()?;
    Ok(f)
}

pub fn wpoly_to_string(poly: &WeierstrassPolynomial) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "WPOLY {}", poly.degree());
    for i in 1..=poly.degree() {
        push_laurent(&mut out, poly.coefficient(i));
    }
    out
}

/// Re-parses a polynomial file. Containment is re-certified from the
/// coefficients, not trusted from the file.
pub fn wpoly_from_str(text: &str) -> Result<WeierstrassPolynomial> {
    let mut p = LineParser::new(text);
    let header = p.next_line()?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != "WPOLY" {
        return Err(p.fail("expected header `WPOLY n`"));
    }
    let n = p.parse_usize(tokens[1], "degree")?;
    if n == 0 {
        return Err(p.fail("degree must be positive"));
    }
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        coeffs.push(parse_laurent(&mut p)?);
    }
    p.expect_end()?;
    WeierstrassPolynomial::new(coeffs)
}

pub fn dwp_to_string(dwp: &DistortedWP) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "DWP {}", dwp.degree());
    for i in 1..=dwp.degree() {
        push_laurent(&mut out, dwp.minus(i));
    }
    for i in 1..=dwp.degree() {
        push_laurent(&mut out, dwp.plus(i));
    }
    out
}

/// Re-parses a split form. The fiber radius is not stored in the file; it
/// comes from the run configuration alongside the cylinder.
pub fn dwp_from_str(text: &str, rho: f64) -> Result<DistortedWP> {
    let mut p = LineParser::new(text);
    let header = p.next_line()?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != "DWP" {
        return Err(p.fail("expected header `DWP n`"));
    }
    let n = p.parse_usize(tokens[1], "degree")?;
    if n == 0 {
        return Err(p.fail("degree must be positive"));
    }
    let mut minus = Vec::with_capacity(n);
    for _ in 0..n {
        minus.push(parse_laurent(&mut p)?);
    }
    let mut plus = Vec::with_capacity(n);
    for _ in 0..n {
        plus.push(parse_laurent(&mut p)?);
    }
    p.expect_end()?;
    let annulus = minus[0].domain();
    DistortedWP::new(annulus, rho, minus, plus)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_laurent(path: &Path) -> Result<LaurentSeries> {
    laurent_from_str(&read_to_string(path)?)
}

pub fn write_laurent(path: &Path, s: &LaurentSeries) -> Result<()> {
    write_string(path, &laurent_to_string(s))
}

pub fn read_biseries(path: &Path) -> Result<BiSeries> {
    biseries_from_str(&read_to_string(path)?)
}

pub fn write_biseries(path: &Path, f: &BiSeries) -> Result<()> {
    write_string(path, &biseries_to_string(f))
}

pub fn read_wpoly(path: &Path) -> Result<WeierstrassPolynomial> {
    wpoly_from_str(&read_to_string(path)?)
}

pub fn write_wpoly(path: &Path, poly: &WeierstrassPolynomial) -> Result<()> {
    write_string(path, &wpoly_to_string(poly))
}

pub fn read_dwp(path: &Path, rho: f64) -> Result<DistortedWP> {
    dwp_from_str(&read_to_string(path)?, rho)
}

pub fn write_dwp(path: &Path, dwp: &DistortedWP) -> Result<()> {
    write_string(path, &dwp_to_string(dwp))
}

/// File name of one family sample on one chart.
pub fn family_sample_name(step: usize, chart: usize) -> String {
    format!("step_{step:03}_chart_{chart}.wpoly")
}

/// Writes a family as a directory: one polynomial file per (sample, chart)
/// and an index whose header is `FAMILY steps tol`, followed by one
/// `step lambda residual` line per sample.
pub fn write_family(dir: &Path, cfg: &ChartConfig, family: &Family, tol: f64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let steps = family.lambdas.len().saturating_sub(1);
    let mut index = String::new();
    let _ = writeln!(index, "FAMILY {steps} {}", fmt_f64(tol));
    for (s, lambda) in family.lambdas.iter().enumerate() {
        let _ = writeln!(
            index,
            "{s} {} {}",
            fmt_f64(*lambda),
            fmt_f64(family.residuals[s])
        );
        for chart in 0..cfg.covering().charts().len() {
            let poly = chart_polynomials(cfg, &family.points[s], chart)?;
            write_wpoly(&dir.join(family_sample_name(s, chart)), &poly)?;
        }
    }
    write_string(&dir.join("family.txt"), &index)
}

/// Reads a family index back: (steps, tol, per-sample (lambda, residual)).
pub fn read_family_index(path: &Path) -> Result<(usize, f64, Vec<(f64, f64)>)> {
    let text = read_to_string(path)?;
    let mut p = LineParser::new(&text);
    let header = p.next_line()?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != "FAMILY" {
        return Err(p.fail("expected header `FAMILY steps tol`"));
    }
    let steps = p.parse_usize(tokens[1], "steps")?;
    let tol = p.parse_f64(tokens[2], "tol")?;
    let mut samples = Vec::with_capacity(steps + 1);
    for s in 0..=steps {
        let line = p.next_line()?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(p.fail("expected `step lambda residual`"));
        }
        let got = p.parse_usize(t[0], "step")?;
        if got != s {
            return Err(p.fail(format!("expected step {s}, got {got}")));
        }
        samples.push((p.parse_f64(t[1], "lambda")?, p.parse_f64(t[2], "residual")?));
    }
    p.expect_end()?;
    Ok((steps, tol, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distorted::{solve_dwp_with, DistortedCylinder, SolveOptions};
    use crate::moduli::{build_chart, continue_family, paired_annulus_config};
    use crate::series::SmoothnessClass;

    fn awkward_series() -> LaurentSeries {
        let domain = Annulus::new(0.5, 2.0).unwrap();
        let mut s = LaurentSeries::zero(domain, -3, 4).unwrap();
        s.set_coeff(-3, Complex64::new(1.0 / 3.0, -2.0e-17));
        s.set_coeff(-1, Complex64::new(-0.0625, std::f64::consts::PI));
        s.set_coeff(0, Complex64::new(f64::MIN_POSITIVE, 1.0));
        s.set_coeff(2, Complex64::new(9.007199254740993e15, -1.2345678901234567e-8));
        s
    }

    #[test]
    fn laurent_round_trip_is_bit_exact() {
        let s = awkward_series();
        let text = laurent_to_string(&s);
        let back = laurent_from_str(&text).unwrap();
        assert_eq!(back.domain(), s.domain());
        assert_eq!(back.min_index(), s.min_index());
        assert_eq!(back.max_index(), s.max_index());
        for k in s.min_index()..=s.max_index() {
            assert_eq!(back.coeff(k), s.coeff(k), "index {k}");
        }
        assert_eq!(laurent_to_string(&back), text);
    }

    #[test]
    fn biseries_round_trip_is_bit_exact() {
        let domain = Annulus::new(0.9, 1.2).unwrap();
        let mut f = BiSeries::zero(domain, 0.9, -2, 3, 2).unwrap();
        f.set_coeff(-2, 0, Complex64::new(0.1, -0.7));
        f.set_coeff(3, 2, Complex64::new(-1.0 / 7.0, 1e-300));
        f.set_coeff(0, 1, Complex64::new(2.5, 0.0));
        let text = biseries_to_string(&f);
        let back = biseries_from_str(&text).unwrap();
        assert_eq!(back.z_domain(), f.z_domain());
        assert_eq!(back.w_radius(), f.w_radius());
        for k in 0..=f.w_degree() {
            for j in f.z_min()..=f.z_max() {
                assert_eq!(back.coeff(j, k), f.coeff(j, k), "slot ({j}, {k})");
            }
        }
        assert_eq!(biseries_to_string(&back), text);
    }

    #[test]
    fn wpoly_round_trip_recertifies_containment() {
        let domain = Annulus::new(0.5, 1.2).unwrap();
        let f1 = LaurentSeries::zero(domain, -1, 1).unwrap();
        let mut f2 = LaurentSeries::zero(domain, -1, 1).unwrap();
        f2.set_coeff(1, Complex64::new(-0.25, 0.0));
        let poly = WeierstrassPolynomial::new(vec![f1, f2]).unwrap();
        let text = wpoly_to_string(&poly);
        let back = wpoly_from_str(&text).unwrap();
        assert_eq!(back.degree(), 2);
        assert_eq!(back.z_domain(), domain);
        for i in 1..=2 {
            let a = poly.coefficient(i);
            let b = back.coefficient(i);
            for k in a.min_index()..=a.max_index() {
                assert_eq!(a.coeff(k), b.coeff(k));
            }
        }
        assert!(back.containment_radius() < 1.0);
        assert_eq!(wpoly_to_string(&back), text);
    }

    #[test]
    fn dwp_round_trip_restores_the_split_form() {
        let domain = Annulus::new(0.5, 2.0).unwrap();
        let cyl = DistortedCylinder::shear(domain, 0.9, 0.1).unwrap();
        let mut f2 = LaurentSeries::zero(domain, -8, 8).unwrap();
        f2.set_coeff(1, Complex64::new(-0.25, 0.0));
        let f1 = LaurentSeries::zero(domain, -8, 8).unwrap();
        let poly = WeierstrassPolynomial::new(vec![f1, f2]).unwrap();
        let opts = SolveOptions {
            smallness_threshold: 1.0,
            ..SolveOptions::default()
        };
        let (dwp, _) = solve_dwp_with(&poly, &cyl, opts).unwrap();
        let text = dwp_to_string(&dwp);
        let back = dwp_from_str(&text, dwp.rho()).unwrap();
        assert_eq!(back.degree(), dwp.degree());
        assert_eq!(back.distance(&dwp).unwrap(), 0.0);
        assert_eq!(dwp_to_string(&back), text);
    }

    #[test]
    fn parse_failures_carry_line_numbers() {
        match laurent_from_str("NOPE 1 2 3 4").unwrap_err() {
            Error::ParseFormat { line: 1, .. } => {}
            other => panic!("expected line 1 header failure, got {other}"),
        }
        let good = laurent_to_string(&awkward_series());
        let mut lines: Vec<&str> = good.lines().collect();
        lines[2] = "-2 not_a_float 0.0";
        match laurent_from_str(&lines.join("\n")).unwrap_err() {
            Error::ParseFormat { line: 3, message } => {
                assert!(message.contains("not_a_float"), "message: {message}");
            }
            other => panic!("expected line 3 float failure, got {other}"),
        }
        let truncated: String = good.lines().take(3).collect::<Vec<_>>().join("\n");
        match laurent_from_str(&truncated).unwrap_err() {
            Error::ParseFormat { line: 4, .. } => {}
            other => panic!("expected truncation failure at line 4, got {other}"),
        }
        let trailing = format!("{good}extra");
        match laurent_from_str(&trailing).unwrap_err() {
            Error::ParseFormat { line, .. } => assert_eq!(line, 10),
            other => panic!("expected trailing-content failure, got {other}"),
        }
    }

    #[test]
    fn family_directory_round_trips_sample_polynomials() {
        let cfg = paired_annulus_config(0.05, 5, SmoothnessClass::sobolev(1.0).unwrap()).unwrap();
        let chart = build_chart(cfg).unwrap();
        let cfg = chart.config();
        let mut target = chart.base_point();
        let c = Complex64::new(0.04, 0.0);
        target[cfg.source_map().slot(0, 1, 0)] += c;
        target[cfg.source_map().slot(1, 1, 0)] += c;
        let family = continue_family(&chart, &target, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_family(dir.path(), cfg, &family, chart.newton_params().tol).unwrap();
        let (steps, _tol, samples) = read_family_index(&dir.path().join("family.txt")).unwrap();
        assert_eq!(steps, 4);
        assert_eq!(samples.len(), 5);
        assert_eq!(samples[2].0, 0.5);
        for (s, point) in family.points.iter().enumerate() {
            for ci in 0..cfg.covering().charts().len() {
                let path = dir.path().join(family_sample_name(s, ci));
                let back = read_wpoly(&path).unwrap();
                let direct = chart_polynomials(cfg, point, ci).unwrap();
                for i in 1..=direct.degree() {
                    let a = direct.coefficient(i);
                    let b = back.coefficient(i);
                    for k in a.min_index()..=a.max_index() {
                        assert_eq!(a.coeff(k), b.coeff(k), "sample {s} chart {ci} coeff {i}");
                    }
                }
            }
        }
    }
}
