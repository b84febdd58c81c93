//! Run configuration: built-in defaults, overlaid by an optional key = value
//! config file, overlaid by command line flags (the caller applies flags after
//! `apply_file`).

use crate::Failure;
use ringsol_core::{
    build_rule, default_panel_count, BasisSet, ProblemSpec, QuadratureRule, SolverConfig,
};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

pub fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json-lines" => Ok(OutputFormat::JsonLines),
        other => Err(format!(
            "unknown format '{other}' (expected csv or json-lines)"
        )),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub radius: Option<f64>,
    pub m: i32,
    pub alpha: f64,
    pub p0: Option<f64>,
    pub n: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub panels: Option<usize>,
    pub nodes_per_panel: usize,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            radius: None,
            m: 1,
            alpha: 1.0,
            p0: None,
            n: 20,
            max_iters: solver.max_iters,
            grad_tol: solver.grad_tol,
            panels: None,
            nodes_per_panel: 16,
            out_dir: PathBuf::from("."),
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    /// Overlays keys from a config file. Lines are `key = value`, `#` starts
    /// a comment, blank lines are skipped. Unknown keys are usage errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Usage(format!(
                    "{} line {}: expected key = value",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.apply_key(key.trim(), value.trim()).map_err(|msg| {
                Failure::Usage(format!("{} line {}: {msg}", path.display(), idx + 1))
            })?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("bad value '{value}' for {key}"))
        }
        match key {
            "R" => self.radius = Some(num(key, value)?),
            "m" => self.m = num(key, value)?,
            "P0" => self.p0 = Some(num(key, value)?),
            "alpha" => self.alpha = num(key, value)?,
            "N" => self.n = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "grad_tol" => self.grad_tol = num(key, value)?,
            "panels" => self.panels = Some(num(key, value)?),
            "nodes_per_panel" => self.nodes_per_panel = num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "format" => self.format = parse_format(value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Problem description from the merged configuration. Missing or
    /// non-positive R / P0 are usage errors, as are parameters the library
    /// would reject.
    pub fn problem_spec(&self) -> Result<ProblemSpec, Failure> {
        let radius = self
            .radius
            .ok_or_else(|| Failure::Usage("missing required flag --R".into()))?;
        let p0 = match self.p0 {
            None => return Err(Failure::Usage("missing required flag --P0".into())),
            Some(p) if !(p > 0.0) => return Err(Failure::Usage("P0 must be positive".into())),
            Some(p) => p,
        };
        let spec = ProblemSpec {
            radius,
            m: self.m,
            alpha: self.alpha,
            p0,
            n: self.n,
        };
        spec.validate()
            .map_err(|e| Failure::Usage(format!("{e}")))?;
        Ok(spec)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            ..SolverConfig::default()
        }
    }

    pub fn quadrature(&self, spec: &ProblemSpec) -> Result<QuadratureRule, Failure> {
        let panels = self.panels.unwrap_or_else(|| default_panel_count(spec.n));
        Ok(build_rule(spec.radius, panels, self.nodes_per_panel)?)
    }

    pub fn basis(&self, spec: ProblemSpec) -> Result<BasisSet, Failure> {
        let rule = self.quadrature(&spec)?;
        Ok(BasisSet::new(spec, rule)?)
    }
}
