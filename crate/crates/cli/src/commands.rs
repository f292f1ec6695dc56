//! Command pipelines. Each one reads what it needs from the run config,
//! writes its artifacts under the output directory, and returns the report.

use std::fs;
use std::path::Path;

use curvedef_core::{
    assemble_coboundary, build_chart, chart_polynomials, cohomology_report, continue_family,
    defaults, differential_check, io, paired_annulus_config, projective_line, solve_dwp_with,
    two_chart_annulus, weierstrass_prep, Annulus, BiSeries, ChartConfig, Complex64,
    DistortedCylinder, Error, LaurentSeries, ModuliChart, Result, SmoothnessClass, SolveOptions,
    Truncation, WeierstrassPolynomial,
};

use crate::config::{Command, CoveringSpec, CylinderSpec, RunConfig};
use crate::expr::{parse_poly, PolyMap};
use crate::report::{num, Report};

pub fn dispatch(cfg: &RunConfig, seed: u64) -> Result<Report> {
    match cfg.command {
        Command::Prep => prep(cfg),
        Command::Split => split(cfg),
        Command::Distort => distort(cfg),
        Command::Cohomology => cohomology(cfg),
        Command::Chart => chart(cfg, seed),
        Command::Deform => deform(cfg),
    }
}

fn config_err(message: impl Into<String>) -> Error {
    Error::Config(message.into())
}

fn annulus(cfg: &RunConfig) -> Result<Annulus> {
    let spec = cfg
        .geometry
        .annulus
        .ok_or_else(|| config_err("geometry.annulus is required for this command"))?;
    Annulus::new(spec.inner, spec.outer)
}

fn smoothness(cfg: &RunConfig) -> Result<SmoothnessClass> {
    match cfg.smoothness.class.as_str() {
        "sup" => Ok(SmoothnessClass::SupNorm),
        "sobolev" => {
            let s = cfg
                .smoothness
                .exponent
                .ok_or_else(|| config_err("smoothness class sobolev needs an exponent"))?;
            SmoothnessClass::sobolev(s)
        }
        other => Err(config_err(format!("unknown smoothness class `{other}`"))),
    }
}

fn z_window(cfg: &RunConfig) -> (i32, i32) {
    cfg.numeric
        .z_window
        .map(|w| (w[0], w[1]))
        .unwrap_or(defaults::Z_WINDOW)
}

fn expression(cfg: &RunConfig) -> Result<Option<PolyMap>> {
    let Some(input) = &cfg.input else {
        return Err(config_err("this command needs an input section"));
    };
    match &input.expression {
        Some(src) => {
            let poly =
                parse_poly(src).map_err(|e| config_err(format!("input expression: {e}")))?;
            Ok(Some(poly))
        }
        None => Ok(None),
    }
}

fn input_file<'a>(cfg: &'a RunConfig) -> Result<&'a Path> {
    cfg.input
        .as_ref()
        .and_then(|i| i.file.as_deref())
        .ok_or_else(|| config_err("this command needs input.expression or input.file"))
}

fn input_biseries(cfg: &RunConfig) -> Result<BiSeries> {
    if let Some(poly) = expression(cfg)? {
        let domain = annulus(cfg)?;
        let rho = cfg.geometry.rho.unwrap_or(1.0);
        let (z_min, z_max) = z_window(cfg);
        let w_degree = cfg.numeric.w_degree.unwrap_or(defaults::W_DEGREE);
        let mut f = BiSeries::zero(domain, rho, z_min, z_max, w_degree)?;
        for (&(j, k), &c) in &poly {
            if j < z_min || j > z_max {
                return Err(config_err(format!(
                    "expression term z^{j} falls outside the window [{z_min}, {z_max}]"
                )));
            }
            if k > w_degree {
                return Err(config_err(format!(
                    "expression term w^{k} exceeds the fiber degree {w_degree}"
                )));
            }
            f.set_coeff(j, k, c);
        }
        return Ok(f);
    }
    io::read_biseries(input_file(cfg)?)
}

fn input_laurent(cfg: &RunConfig) -> Result<LaurentSeries> {
    if let Some(poly) = expression(cfg)? {
        let domain = annulus(cfg)?;
        let (z_min, z_max) = z_window(cfg);
        let mut f = LaurentSeries::zero(domain, z_min, z_max)?;
        for (&(j, k), &c) in &poly {
            if k != 0 {
                return Err(config_err("split input must not involve w"));
            }
            if j < z_min || j > z_max {
                return Err(config_err(format!(
                    "expression term z^{j} falls outside the window [{z_min}, {z_max}]"
                )));
            }
            f.set_coeff(j, c);
        }
        return Ok(f);
    }
    io::read_laurent(input_file(cfg)?)
}

fn input_wpoly(cfg: &RunConfig) -> Result<WeierstrassPolynomial> {
    if let Some(poly) = expression(cfg)? {
        let domain = annulus(cfg)?;
        let (z_min, z_max) = z_window(cfg);
        let degree = poly
            .keys()
            .map(|&(_, k)| k)
            .max()
            .ok_or_else(|| config_err("expression is identically zero"))?;
        if degree == 0 {
            return Err(config_err("polynomial has no w term"));
        }
        let lead: Vec<_> = poly.iter().filter(|(&(_, k), _)| k == degree).collect();
        if lead.len() != 1 || *lead[0].0 != (0, degree) || *lead[0].1 != Complex64::ONE {
            return Err(config_err(format!(
                "leading coefficient of w^{degree} must be exactly 1"
            )));
        }
        let mut coefficients = Vec::with_capacity(degree);
        for i in 1..=degree {
            let mut c = LaurentSeries::zero(domain, z_min, z_max)?;
            for (&(j, k), &value) in &poly {
                if k == degree - i {
                    if j < z_min || j > z_max {
                        return Err(config_err(format!(
                            "expression term z^{j} falls outside the window [{z_min}, {z_max}]"
                        )));
                    }
                    c.set_coeff(j, value);
                }
            }
            coefficients.push(c);
        }
        return WeierstrassPolynomial::new(coefficients);
    }
    io::read_wpoly(input_file(cfg)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn prep(cfg: &RunConfig) -> Result<Report> {
    let f = input_biseries(cfg)?;
    let class = smoothness(cfg)?;
    let contour = cfg.numeric.contour_radius.unwrap_or(1.0);
    let (poly, prep) = weierstrass_prep(&f, contour)?;
    io::write_wpoly(&cfg.output.join("prepared.wpoly"), &poly)?;
    let mut report = Report::new("prep");
    report.line("degree", prep.degree);
    report.num_line("contour_radius", prep.contour_radius);
    report.num_line("containment_radius", prep.containment_radius);
    report.num_line("cofactor_min", prep.h_min);
    report.num_line("cofactor_max", prep.h_max);
    report.num_line("truncation_loss", prep.truncation_loss);
    report.section("coefficient_norms");
    for i in 1..=poly.degree() {
        report.line(
            "coefficient",
            format!("{i} {}", num(poly.coefficient(i).s_norm(class))),
        );
    }
    Ok(report)
}

fn split(cfg: &RunConfig) -> Result<Report> {
    let f = input_laurent(cfg)?;
    let class = smoothness(cfg)?;
    let grid = cfg.numeric.grid.unwrap_or(defaults::Z_GRID);
    let (plus, minus) = f.split();
    io::write_laurent(&cfg.output.join("minus.laurent"), &minus)?;
    io::write_laurent(&cfg.output.join("plus.laurent"), &plus)?;
    let mut resum = 0.0f64;
    for k in f.min_index()..=f.max_index() {
        resum = resum.max((f.coeff(k) - plus.coeff(k) - minus.coeff(k)).norm());
    }
    let domain = f.domain();
    let mut report = Report::new("split");
    report.num_line("input_norm", f.s_norm(class));
    report.num_line("minus_norm", minus.s_norm(class));
    report.num_line("plus_norm", plus.s_norm(class));
    report.num_line("resum_defect", resum);
    report.num_line(
        "minus_sup_outer",
        minus.sup_norm_on_circle(domain.outer_radius(), grid),
    );
    report.num_line(
        "plus_sup_inner",
        plus.sup_norm_on_circle(domain.inner_radius(), grid),
    );
    Ok(report)
}

fn cylinder(cfg: &RunConfig, domain: Annulus) -> Result<DistortedCylinder> {
    let rho = cfg.geometry.rho.unwrap_or(1.0);
    match cfg
        .geometry
        .cylinder
        .ok_or_else(|| config_err("geometry.cylinder is required for this command"))?
    {
        CylinderSpec::Identity => DistortedCylinder::identity(domain, rho),
        CylinderSpec::Shear { epsilon } => DistortedCylinder::shear(domain, rho, epsilon),
    }
}

fn distort(cfg: &RunConfig) -> Result<Report> {
    let poly = input_wpoly(cfg)?;
    let class = smoothness(cfg)?;
    let cyl = cylinder(cfg, poly.z_domain())?;
    let opts = SolveOptions {
        tol: cfg.numeric.tol.unwrap_or(defaults::DWP_TOL),
        max_iter: cfg.numeric.max_iter.unwrap_or(defaults::DWP_MAX_ITER),
        smallness_threshold: cfg
            .numeric
            .smallness_threshold
            .unwrap_or(defaults::SMALLNESS_THRESHOLD),
        spill_degrees: cfg.numeric.spill.unwrap_or(defaults::W_SPILL),
        class,
        ..SolveOptions::default()
    };
    let (dwp, stats) = solve_dwp_with(&poly, &cyl, opts)?;
    io::write_dwp(&cfg.output.join("solved.dwp"), &dwp)?;
    let mut csv = String::from("iteration,q_norm,r_norm\n");
    for (i, (q, r)) in stats.history.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", i + 1, num(*q), num(*r)));
    }
    write_text(&cfg.output.join("convergence.csv"), &csv)?;
    let mut report = Report::new("distort");
    report.line("degree", dwp.degree());
    report.num_line("rho", dwp.rho());
    report.line("iterations", stats.iterations);
    if let Some(&(q, r)) = stats.history.last() {
        report.num_line("final_q_norm", q);
        report.num_line("final_r_norm", r);
    }
    report.section("part_norms");
    for i in 1..=dwp.degree() {
        report.line(
            "minus",
            format!("{i} {}", num(dwp.minus(i).s_norm(class))),
        );
    }
    for i in 1..=dwp.degree() {
        report.line("plus", format!("{i} {}", num(dwp.plus(i).s_norm(class))));
    }
    Ok(report)
}

fn cohomology(cfg: &RunConfig) -> Result<Report> {
    let class = smoothness(cfg)?;
    let half = cfg
        .numeric
        .window
        .ok_or_else(|| config_err("numeric.window is required for this command"))?;
    // The projective covering gets the shifted overlap window sized to its
    // twist; clipping it like a uniform window manufactures kernel vectors.
    let (covering, trunc) = match cfg
        .geometry
        .covering
        .ok_or_else(|| config_err("geometry.covering is required for this command"))?
    {
        CoveringSpec::ProjectiveLine { degree } => {
            let c = projective_line(degree, class)?;
            let t = Truncation::projective(degree, half);
            (c, t)
        }
        CoveringSpec::TwoChartAnnulus {
            inner,
            mid_inner,
            mid_outer,
            outer,
        } => {
            let c = two_chart_annulus(inner, mid_inner, mid_outer, outer, class)?;
            let t = Truncation::uniform(&c, half);
            (c, t)
        }
        CoveringSpec::PairedAnnulus { .. } => {
            return Err(config_err(
                "paired_annulus is a chart/deform covering; cohomology takes \
                 projective_line or two_chart_annulus",
            ));
        }
    };
    let op = assemble_coboundary(&covering, &trunc)?;
    let rank_tol = cfg.numeric.rank_tol.unwrap_or(defaults::RANK_TOL);
    let rep = cohomology_report(&op, rank_tol);
    let mut report = Report::new("cohomology");
    report.line("source_dim", op.matrix().ncols());
    report.line("target_dim", op.matrix().nrows());
    report.line("h0_dim", rep.h0_dim);
    report.line("h1_dim", rep.h1_dim);
    report.line("flagged_artifacts", rep.flagged_artifacts);
    report.num_line("spectral_gap", rep.spectral_gap);
    report.section("singular_values");
    for (i, s) in rep.singular_values.iter().enumerate() {
        report.line("sv", format!("{i} {}", num(*s)));
    }
    Ok(report)
}

fn paired_chart(cfg: &RunConfig) -> Result<ModuliChart> {
    let class = smoothness(cfg)?;
    let shear = match cfg
        .geometry
        .covering
        .ok_or_else(|| config_err("geometry.covering is required for this command"))?
    {
        CoveringSpec::PairedAnnulus { shear } => shear,
        _ => {
            return Err(config_err(
                "chart and deform take the paired_annulus covering",
            ));
        }
    };
    let half = cfg.numeric.window.unwrap_or(6);
    let mut chart_cfg = paired_annulus_config(shear, half, class)?;
    let numeric = &cfg.numeric;
    if numeric.tol.is_some() || numeric.max_iter.is_some() || numeric.rank_tol.is_some() {
        let mut solve = chart_cfg.solve_options();
        if let Some(tol) = numeric.tol {
            solve.tol = tol;
        }
        if let Some(max_iter) = numeric.max_iter {
            solve.max_iter = max_iter;
        }
        let rank_tol = numeric.rank_tol.unwrap_or(chart_cfg.rank_tol());
        chart_cfg = ChartConfig::new(
            chart_cfg.covering().clone(),
            chart_cfg.truncation().clone(),
            chart_cfg.base_polynomials().to_vec(),
            chart_cfg.ball_radii().to_vec(),
            solve,
            rank_tol,
        )?;
    }
    build_chart(chart_cfg)
}

fn chart_summary(report: &mut Report, chart: &ModuliChart) {
    report.line("tangent_dim", chart.tangent_dimension());
    report.line("h1_dim", chart.obstruction_dimension());
    report.line("flagged_artifacts", chart.flagged_artifacts());
    report.line("window_stable", chart.window_stable());
    report.section("singular_values");
    for (i, s) in chart.singular_values().iter().enumerate() {
        report.line("sv", format!("{i} {}", num(*s)));
    }
}

fn chart(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let chart = paired_chart(cfg)?;
    let mut report = Report::new("chart");
    chart_summary(&mut report, &chart);
    let base = chart.base_point();
    for c in 0..chart.config().covering().charts().len() {
        let poly = chart_polynomials(chart.config(), &base, c)?;
        io::write_wpoly(&cfg.output.join(format!("base_chart_{c}.wpoly")), &poly)?;
    }

    // Newton demo: land back on the chart from a start pushed along the
    // first few tangent directions.
    let mut coords = vec![Complex64::ZERO; chart.tangent_dimension()];
    for slot in coords.iter_mut().take(4) {
        *slot = Complex64::new(0.02, 0.0);
    }
    let start = chart.point_at(&coords)?;
    let corrected = chart.correct(start.point)?;
    let mut csv = String::from("iteration,residual\n");
    for (i, r) in corrected.residuals.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, num(*r)));
    }
    write_text(&cfg.output.join("newton.csv"), &csv)?;
    report.section("newton");
    report.line("evaluations", corrected.residuals.len());
    report.num_line(
        "final_residual",
        corrected.residuals.last().copied().unwrap_or(0.0),
    );
    // An empty sum is -0.0 and sqrt keeps the sign; abs keeps the report clean.
    let obstruction: f64 = corrected.obstruction.iter().map(|c| c.norm_sqr()).sum();
    report.num_line("obstruction_norm", obstruction.sqrt().abs());

    if cfg.check_differential {
        let step = cfg.numeric.fd_step.unwrap_or(1e-4);
        let probes = cfg.numeric.probes.unwrap_or(2);
        let check = differential_check(chart.config(), chart.operator(), step, probes, seed)?;
        report.section("differential_check");
        report.num_line("matrix_error", check.matrix_error);
        report.num_line("probe_error", check.probe_error);
    }
    Ok(report)
}

fn deform(cfg: &RunConfig) -> Result<Report> {
    let chart = paired_chart(cfg)?;
    let chart_cfg = chart.config();
    let mut target = chart.base_point();
    for delta in &cfg.target {
        let charts = chart_cfg.covering().charts();
        if delta.chart >= charts.len() {
            return Err(config_err(format!(
                "target chart {} does not exist",
                delta.chart
            )));
        }
        if delta.level >= charts[delta.chart].multiplicity {
            return Err(config_err(format!(
                "target level {} exceeds the multiplicity of chart {}",
                delta.level, delta.chart
            )));
        }
        let (k_min, k_max) = chart_cfg.truncation().chart_windows[delta.chart];
        if delta.k < k_min || delta.k > k_max {
            return Err(config_err(format!(
                "target index {} falls outside the window [{k_min}, {k_max}]",
                delta.k
            )));
        }
        let slot = chart_cfg
            .source_map()
            .slot(delta.chart, delta.level, delta.k);
        target[slot] += Complex64::new(delta.re, delta.im);
    }
    let steps = cfg.numeric.steps.unwrap_or(8);
    let family = continue_family(&chart, &target, steps)?;
    io::write_family(
        &cfg.output.join("family"),
        chart_cfg,
        &family,
        chart.newton_params().tol,
    )?;
    let mut csv = String::from("sample,lambda,residual\n");
    for (s, lambda) in family.lambdas.iter().enumerate() {
        csv.push_str(&format!(
            "{s},{},{}\n",
            num(*lambda),
            num(family.residuals[s])
        ));
    }
    write_text(&cfg.output.join("continuation.csv"), &csv)?;
    let mut report = Report::new("deform");
    chart_summary(&mut report, &chart);
    report.section("continuation");
    report.line("samples", family.lambdas.len());
    let worst = family.residuals.iter().copied().fold(0.0f64, f64::max);
    report.num_line("max_residual", worst);
    report.num_line("endpoint_defect", family.endpoint_defect);
    Ok(report)
}
