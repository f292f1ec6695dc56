//! Run configuration: a single JSON document per run, plus repeatable
//! `--override key=value` patches applied before deserialization.
//!
//! Unknown keys are rejected everywhere. Which sections a command needs is
//! checked by the command itself, so a config can carry only what its
//! pipeline reads.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Prep,
    Split,
    Distort,
    Cohomology,
    Chart,
    Deform,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Prep => "prep",
            Command::Split => "split",
            Command::Distort => "distort",
            Command::Cohomology => "cohomology",
            Command::Chart => "chart",
            Command::Deform => "deform",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSpec {
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum CylinderSpec {
    Identity,
    Shear { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum CoveringSpec {
    ProjectiveLine {
        degree: i32,
    },
    TwoChartAnnulus {
        inner: f64,
        mid_inner: f64,
        mid_outer: f64,
        outer: f64,
    },
    PairedAnnulus {
        shear: f64,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub annulus: Option<AnnulusSpec>,
    /// Fiber disk radius for bi-series and cylinders.
    pub rho: Option<f64>,
    pub cylinder: Option<CylinderSpec>,
    pub covering: Option<CoveringSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub expression: Option<String>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numeric {
    /// Coefficient window in the base variable.
    pub z_window: Option<[i32; 2]>,
    pub w_degree: Option<usize>,
    /// Circle-sampling resolution for report diagnostics. Power of two.
    pub grid: Option<usize>,
    pub contour_radius: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub rank_tol: Option<f64>,
    /// Truncation half-width for coverings.
    pub window: Option<i32>,
    pub steps: Option<usize>,
    pub smallness_threshold: Option<f64>,
    pub spill: Option<usize>,
    pub probes: Option<usize>,
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smoothness {
    pub class: String,
    pub exponent: Option<f64>,
}

impl Default for Smoothness {
    fn default() -> Self {
        Smoothness {
            class: "sup".into(),
            exponent: None,
        }
    }
}

/// One coefficient perturbation of the chart base point.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDelta {
    pub chart: usize,
    pub level: usize,
    pub k: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub output: PathBuf,
    #[serde(default)]
    pub geometry: Geometry,
    pub input: Option<InputSpec>,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub smoothness: Smoothness,
    #[serde(default)]
    pub target: Vec<SlotDelta>,
    /// Verify the assembled differential against finite differences.
    /// Expensive: one full column sweep of the glue map.
    #[serde(default)]
    pub check_differential: bool,
}

/// Applies one `key=value` override to the parsed JSON document. Dotted keys
/// descend into objects, creating them as needed; values parse as JSON when
/// they can and fall back to strings.
fn apply_override(doc: &mut serde_json::Value, spec: &str) -> Result<(), String> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| format!("override `{spec}` is not of the form key=value"))?;
    if key.is_empty() {
        return Err(format!("override `{spec}` has an empty key"));
    }
    let parsed: serde_json::Value = serde_json::from_str(value)
        .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| format!("override `{key}`: `{part}` is not reachable in the config"))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one part")
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| format!("config {} is not valid JSON: {e}", path.display()))?;
    for spec in overrides {
        apply_override(&mut doc, spec)?;
    }
    let cfg: RunConfig =
        serde_json::from_value(doc).map_err(|e| format!("config {}: {e}", path.display()))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), String> {
    if let Some(g) = cfg.numeric.grid {
        if !g.is_power_of_two() {
            return Err(format!("numeric.grid must be a power of two, got {g}"));
        }
    }
    if let Some([min, max]) = cfg.numeric.z_window {
        if max < min {
            return Err(format!("numeric.z_window [{min}, {max}] is empty"));
        }
    }
    if let Some(steps) = cfg.numeric.steps {
        if steps == 0 {
            return Err("numeric.steps must be at least 1".into());
        }
    }
    if let Some(input) = &cfg.input {
        match (&input.expression, &input.file) {
            (Some(_), Some(_)) => {
                return Err("input has both expression and file; pick one".into());
            }
            (None, None) => {
                return Err("input needs either an expression or a file".into());
            }
            (None, Some(path)) => {
                if !path.exists() {
                    return Err(format!("input file {} does not exist", path.display()));
                }
            }
            (Some(_), None) => {}
        }
    }
    if cfg.output.as_os_str().is_empty() {
        return Err("output directory is empty".into());
    }
    Ok(())
}
