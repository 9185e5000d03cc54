//! Experiment configuration: a single TOML file, every key overridable from
//! the command line with repeatable `key=value` pairs (dotted paths).

use crate::error::{Error, Result};
use crate::model::{InitialProfile, ModelParams, ProfileKind};
use crate::scattering::{KGridSpec, ScatteringTols, ZeroSearchRect};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsCfg,
    pub datum: DatumCfg,
    pub kgrid: KGridCfg,
    pub tolerances: TolCfg,
    pub zero_count: ZeroCountCfg,
    pub queries: Vec<QueryCfg>,
    pub painleve: PainleveCfg,
    pub pde: PdeCfg,
    pub phase: PhaseCfg,
    pub input: InputCfg,
    pub output: OutputCfg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsCfg {
    pub alpha: f64,
    pub beta: f64,
}
impl Default for ParamsCfg {
    fn default() -> Self {
        ParamsCfg { alpha: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatumCfg {
    /// "sech" | "gaussian" | "tabulated"
    pub kind: String,
    pub amplitude: f64,
    pub width: f64,
    /// Optional explicit truncation half-width.
    pub support_radius: Option<f64>,
    /// CSV with `x,u` rows for kind = "tabulated".
    pub samples_path: Option<String>,
}
impl Default for DatumCfg {
    fn default() -> Self {
        DatumCfg {
            kind: "sech".into(),
            amplitude: 0.3,
            width: 1.0,
            support_radius: None,
            samples_path: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KGridCfg {
    pub k_max: f64,
    pub step: f64,
    pub tail_tol: f64,
    pub k_cap: f64,
}
impl Default for KGridCfg {
    fn default() -> Self {
        let d = KGridSpec::default();
        KGridCfg {
            k_max: d.k_max,
            step: d.step,
            tail_tol: d.tail_tol,
            k_cap: d.k_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolCfg {
    pub ode_tol: f64,
    pub quad_tol: f64,
    pub solver_tol: f64,
    pub unitarity_tol: f64,
    pub sym_tol: f64,
    pub decay_tol: f64,
    pub boundary_tol: f64,
}
impl Default for TolCfg {
    fn default() -> Self {
        TolCfg {
            ode_tol: 1e-12,
            quad_tol: 1e-9,
            solver_tol: 1e-8,
            unitarity_tol: 1e-8,
            sym_tol: 1e-10,
            decay_tol: 1e-12,
            boundary_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeroCountCfg {
    pub height: f64,
    pub floor: f64,
    /// Horizontal half-width; defaults to the k-grid half-width.
    pub k_max: Option<f64>,
}
impl Default for ZeroCountCfg {
    fn default() -> Self {
        ZeroCountCfg {
            height: 2.0,
            floor: 1e-3,
            k_max: None,
        }
    }
}

/// Either an explicit (x, t) point or a ray xi with a list of times.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct QueryCfg {
    pub x: Option<f64>,
    pub t: Option<f64>,
    pub xi: Option<f64>,
    pub ts: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PainleveCfg {
    pub m_const: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_step: f64,
    pub contour_radius: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Stokes datum; defaults to r(0) from the scattering step.
    pub s_override: Option<f64>,
    /// Residual stencil half-width (2 = five-point, 4 = nine-point).
    pub residual_half_width: usize,
}
impl Default for PainleveCfg {
    fn default() -> Self {
        PainleveCfg {
            m_const: 2.0,
            y_min: -2.0,
            y_max: 3.0,
            y_step: 0.1,
            contour_radius: 2.4,
            panels: 6,
            nodes_per_panel: 20,
            s_override: None,
            residual_half_width: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeCfg {
    pub l_domain: f64,
    pub n: usize,
    pub dt: f64,
    /// Output times for `simulate`; `compare` uses the query times.
    pub t_out: Vec<f64>,
}
impl Default for PdeCfg {
    fn default() -> Self {
        PdeCfg {
            l_domain: 400.0,
            n: 8192,
            dt: 5e-3,
            t_out: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseCfg {
    pub xi: f64,
    pub window: WindowCfg,
    pub grid_n: usize,
}
impl Default for PhaseCfg {
    fn default() -> Self {
        PhaseCfg {
            xi: -0.2,
            window: WindowCfg::default(),
            grid_n: 121,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowCfg {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}
impl Default for WindowCfg {
    fn default() -> Self {
        WindowCfg {
            re_min: -0.6,
            re_max: 0.6,
            im_min: -0.6,
            im_max: 0.6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct InputCfg {
    /// Reuse a previously exported scattering table instead of recomputing.
    pub scattering_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputCfg {
    pub dir: String,
    /// Subset of {"csv", "json"}.
    pub formats: Vec<String>,
}
impl Default for OutputCfg {
    fn default() -> Self {
        OutputCfg {
            dir: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn from_file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
        Self::from_toml_str(&text)
    }

    /// Apply `key=value` overrides with dotted key paths, e.g.
    /// `pde.dt=0.001` or `datum.amplitude=3.0`.
    pub fn apply_overrides(self, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self);
        }
        let text = toml::to_string(&self).map_err(|e| Error::Config(e.to_string()))?;
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for ov in overrides {
            let (key, value) = ov
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{ov}' is not key=value")))?;
            let parsed: toml::Value = format!("v = {value}")
                .parse::<toml::Table>()
                .map(|t| t["v"].clone())
                .or_else(|_| {
                    format!("v = \"{value}\"")
                        .parse::<toml::Table>()
                        .map(|t| t["v"].clone())
                })
                .map_err(|e| Error::Config(format!("override value '{value}': {e}")))?;
            insert_path(&mut table, key.trim(), parsed)?;
        }
        let merged = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_toml_str(&merged)
    }

    /// Canonical serialized form (field order fixed by the struct layout).
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        format!("{:x}", h.finalize())
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.params.alpha, self.params.beta)
    }

    pub fn profile(&self) -> Result<InitialProfile> {
        let kind = match self.datum.kind.as_str() {
            "sech" => ProfileKind::Sech {
                amplitude: self.datum.amplitude,
                width: self.datum.width,
            },
            "gaussian" => ProfileKind::Gaussian {
                amplitude: self.datum.amplitude,
                width: self.datum.width,
            },
            "tabulated" => {
                let path = self.datum.samples_path.as_ref().ok_or_else(|| {
                    Error::Config("tabulated datum requires datum.samples_path".into())
                })?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read samples {path}: {e}")))?;
                let mut xs = Vec::new();
                let mut us = Vec::new();
                for line in text.lines().skip(1) {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let mut it = line.split(',');
                    let x: f64 = it
                        .next()
                        .and_then(|v| v.trim().parse().ok())
                        .ok_or_else(|| Error::Config(format!("bad sample row '{line}'")))?;
                    let u: f64 = it
                        .next()
                        .and_then(|v| v.trim().parse().ok())
                        .ok_or_else(|| Error::Config(format!("bad sample row '{line}'")))?;
                    xs.push(x);
                    us.push(u);
                }
                ProfileKind::Tabulated { x: xs, u: us }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown datum kind '{other}' (expected sech|gaussian|tabulated)"
                )))
            }
        };
        match self.datum.support_radius {
            Some(r) => InitialProfile::with_support(kind, r, self.tolerances.decay_tol),
            None => InitialProfile::with_decay_tol(kind, self.tolerances.decay_tol),
        }
    }

    pub fn kgrid_spec(&self) -> KGridSpec {
        KGridSpec {
            k_max: self.kgrid.k_max,
            step: self.kgrid.step,
            tail_tol: self.kgrid.tail_tol,
            k_cap: self.kgrid.k_cap,
        }
    }

    pub fn scattering_tols(&self) -> ScatteringTols {
        ScatteringTols {
            ode_tol: self.tolerances.ode_tol,
            unitarity_tol: self.tolerances.unitarity_tol,
            sym_tol: self.tolerances.sym_tol,
        }
    }

    pub fn zero_rect(&self) -> ZeroSearchRect {
        ZeroSearchRect {
            k_max: self.zero_count.k_max.unwrap_or(self.kgrid.k_max),
            height: self.zero_count.height,
            floor: self.zero_count.floor,
        }
    }

    /// Expand the query list into concrete (x, t) pairs; validates t >= 3.
    pub fn expanded_queries(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for (i, q) in self.queries.iter().enumerate() {
            match (q.x, q.t, q.xi, &q.ts) {
                (Some(x), Some(t), None, None) => out.push((x, t)),
                (None, None, Some(xi), Some(ts)) => {
                    for &t in ts {
                        out.push((xi * t, t));
                    }
                }
                _ => {
                    return Err(Error::Config(format!(
                        "query #{i} must set either (x, t) or (xi, ts)"
                    )))
                }
            }
        }
        for &(_, t) in &out {
            if t < 3.0 {
                return Err(Error::Config(format!("query times must be >= 3, got {t}")));
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.model_params()?;
        for (name, v) in [
            ("ode_tol", self.tolerances.ode_tol),
            ("quad_tol", self.tolerances.quad_tol),
            ("solver_tol", self.tolerances.solver_tol),
            ("unitarity_tol", self.tolerances.unitarity_tol),
            ("sym_tol", self.tolerances.sym_tol),
            ("decay_tol", self.tolerances.decay_tol),
            ("boundary_tol", self.tolerances.boundary_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("tolerances.{name} must be > 0")));
            }
        }
        if !(self.kgrid.step > 0.0) || !(self.kgrid.k_max > 0.0) || !(self.kgrid.k_cap >= self.kgrid.k_max) {
            return Err(Error::Config(
                "kgrid requires step > 0, k_max > 0, k_cap >= k_max".into(),
            ));
        }
        if !(self.painleve.y_step > 0.0) || !(self.painleve.y_max > self.painleve.y_min) {
            return Err(Error::Config("painleve grid requires y_step > 0 and y_max > y_min".into()));
        }
        if !(self.painleve.m_const > 1.0) {
            return Err(Error::Config("painleve.m_const must be > 1".into()));
        }
        self.expanded_queries()?;
        Ok(())
    }
}

fn insert_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts = path.split('.').collect::<Vec<_>>();
    if parts.is_empty() {
        return Err(Error::Config("empty override key".into()));
    }
    let last = parts.pop().unwrap();
    let mut cursor = table;
    for p in parts {
        cursor = cursor
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path '{path}' crosses a non-table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_and_hashes_stably() {
        let cfg = ExperimentConfig::default();
        let text = cfg.canonical();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.sha256(), back.sha256());
    }

    #[test]
    fn overrides_apply() {
        let cfg = ExperimentConfig::default()
            .apply_overrides(&[
                "pde.dt=0.25".into(),
                "datum.amplitude=3".into(),
                "output.dir=elsewhere".into(),
            ])
            .unwrap();
        assert_eq!(cfg.pde.dt, 0.25);
        assert_eq!(cfg.datum.amplitude, 3.0);
        assert_eq!(cfg.output.dir, "elsewhere");
    }

    #[test]
    fn query_expansion_and_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.queries.push(QueryCfg {
            xi: Some(-0.2),
            ts: Some(vec![50.0, 100.0]),
            ..Default::default()
        });
        let q = cfg.expanded_queries().unwrap();
        assert_eq!(q, vec![(-10.0, 50.0), (-20.0, 100.0)]);
        cfg.queries.push(QueryCfg {
            x: Some(1.0),
            t: Some(1.0),
            ..Default::default()
        });
        assert!(cfg.expanded_queries().is_err(), "t < 3 rejected");
    }

    #[test]
    fn bad_toml_is_a_config_error() {
        assert!(ExperimentConfig::from_toml_str("params = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("[nope]\nfield = 1").is_err());
    }
}
