//! End-to-end runs of the `curvedef` binary: exit codes, determinism of the
//! report body, and artifact round-trips.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvedef"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

/// Report lines with the `#` metadata stripped.
fn report_body(dir: &Path) -> String {
    let text = fs::read_to_string(dir.join("report.txt")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn prep_is_deterministic_and_writes_a_reparsable_polynomial() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for run_id in 0..2 {
        let out = tmp.path().join(format!("out{run_id}"));
        let cfg = write_config(
            tmp.path(),
            &format!("cfg{run_id}.json"),
            &format!(
                r#"{{
                    "command": "prep",
                    "output": "{}",
                    "geometry": {{"annulus": {{"inner": 0.5, "outer": 2.0}}}},
                    "input": {{"expression": "(1 + 0.3*w)*(w^2 - z/4)"}},
                    "numeric": {{"z_window": [-16, 16], "w_degree": 8}}
                }}"#,
                out.display()
            ),
        );
        let result = run(&["--config", &cfg]);
        assert!(result.status.success(), "{result:?}");
        let poly = curvedef_core::read_wpoly(&out.join("prepared.wpoly")).unwrap();
        assert_eq!(poly.degree(), 2);
        let c2 = poly.coefficient(2);
        assert!((c2.coeff(1) - num_complex::Complex64::new(-0.25, 0.0)).norm() < 1e-9);
        bodies.push(report_body(&out));
    }
    assert_eq!(bodies[0], bodies[1]);
    assert!(bodies[0].contains("degree 2"));
}

#[test]
fn overrides_reach_the_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{
                "command": "split",
                "output": "{}",
                "geometry": {{"annulus": {{"inner": 0.5, "outer": 2.0}}}},
                "input": {{"expression": "3*z^-2 + 1.5"}}
            }}"#,
            out.display()
        ),
    );
    let result = run(&["--config", &cfg, "--override", "numeric.z_window=[-4,4]"]);
    assert!(result.status.success(), "{result:?}");
    let minus = curvedef_core::read_laurent(&out.join("minus.laurent")).unwrap();
    assert_eq!((minus.min_index(), minus.max_index()), (-4, 0));
    assert_eq!(minus.coeff(-2), num_complex::Complex64::new(3.0, 0.0));
    assert_eq!(minus.coeff(0), num_complex::Complex64::ZERO);
    let plus = curvedef_core::read_laurent(&out.join("plus.laurent")).unwrap();
    assert_eq!(plus.coeff(0), num_complex::Complex64::new(1.5, 0.0));
}

#[test]
fn config_problems_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown_key = write_config(
        tmp.path(),
        "unknown.json",
        r#"{"command": "prep", "output": "out", "grids": 256}"#,
    );
    let result = run(&["--config", &unknown_key]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("grids"));

    let bad_grid = write_config(
        tmp.path(),
        "grid.json",
        r#"{
            "command": "prep",
            "output": "out",
            "input": {"expression": "w"},
            "numeric": {"grid": 100}
        }"#,
    );
    let result = run(&["--config", &bad_grid]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("grid"));

    let missing_input = write_config(
        tmp.path(),
        "missing.json",
        &format!(
            r#"{{
                "command": "prep",
                "output": "{}",
                "input": {{"file": "{}"}}
            }}"#,
            tmp.path().join("out").display(),
            tmp.path().join("nowhere.biseries").display()
        ),
    );
    let result = run(&["--config", &missing_input]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3_and_reports_the_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{
                "command": "distort",
                "output": "{}",
                "geometry": {{
                    "annulus": {{"inner": 0.5, "outer": 2.0}},
                    "rho": 0.9,
                    "cylinder": {{"kind": "shear", "epsilon": 0.05}}
                }},
                "input": {{"expression": "w^2 - z/4"}},
                "numeric": {{"z_window": [-8, 8], "smallness_threshold": 1e-12}}
            }}"#,
            out.display()
        ),
    );
    let result = run(&["--config", &cfg]);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("error "), "report: {report}");
}

#[test]
fn corrupt_input_file_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("broken.wpoly");
    fs::write(&data, "WPOLY not_a_number\n").unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{
                "command": "distort",
                "output": "{}",
                "geometry": {{
                    "annulus": {{"inner": 0.5, "outer": 2.0}},
                    "rho": 0.9,
                    "cylinder": {{"kind": "identity"}}
                }},
                "input": {{"file": "{}"}}
            }}"#,
            tmp.path().join("out").display(),
            data.display()
        ),
    );
    let result = run(&["--config", &cfg]);
    assert_eq!(result.status.code(), Some(4), "{result:?}");
}

#[test]
fn deform_to_the_base_yields_identical_sample_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{
                "command": "deform",
                "output": "{}",
                "geometry": {{"covering": {{"kind": "paired_annulus", "shear": 0.05}}}},
                "numeric": {{"window": 4, "steps": 3}},
                "smoothness": {{"class": "sobolev", "exponent": 1.0}}
            }}"#,
            out.display()
        ),
    );
    let result = run(&["--config", &cfg]);
    assert!(result.status.success(), "{result:?}");
    let family = out.join("family");
    for chart in 0..2 {
        let first = fs::read(family.join(format!("step_000_chart_{chart}.wpoly"))).unwrap();
        for step in 1..=3 {
            let other =
                fs::read(family.join(format!("step_{step:03}_chart_{chart}.wpoly"))).unwrap();
            assert_eq!(first, other, "chart {chart} step {step}");
        }
    }
    let body = report_body(&out);
    assert!(body.contains("endpoint_defect 0.000000000000e0"), "{body}");
}
