//! Experiment configuration: a TOML file restricted to a flat set of dotted
//! keys.
//!
//! ```toml
//! medium.kind = "custom"              # paper | homogeneous | custom
//! medium.segments = ["0.75:1.0:0.5:2.0"]
//! source.kind = "f2"                  # f1 | f2 | polynomial
//! frequencies = "1..40"               # or [1.0, 2.5, 4.0]
//! grid.n_inverse = 4096
//! grid.n_data = 8192
//! noise.sigma_rel = 0.0
//! reg.kind = "none"                   # none | tikhonov | tsvd
//! output.dir = "out"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use helmsrc_core::media::{
    homogeneous_medium, paper_medium, source_f1, source_f2, DOMAIN_RADIUS,
};
use helmsrc_core::{
    FrequencyWeight, MediumSpec, PiecewiseRadialProfile, RadialGrid, Regularization, Segment,
    SegmentShape, SourceSpec,
};
use serde::Serialize;
use toml::Value;

use crate::error::{config_err, HarnessError, Result, StageExt};

pub const DEFAULT_N_INVERSE: usize = 4096;
pub const DEFAULT_N_DATA: usize = 8192;
pub const DEFAULT_FREQUENCY_COUNT: usize = 40;

const KNOWN_KEYS: &[&str] = &[
    "medium.kind",
    "medium.segments",
    "medium.h",
    "source.kind",
    "source.coefficients",
    "source.support",
    "frequencies",
    "grid.n_inverse",
    "grid.n_data",
    "noise.sigma_rel",
    "noise.seed",
    "reg.kind",
    "reg.param",
    "output.dir",
];

/// A shell `[lo, hi]` with constant coefficients `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shell {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MediumChoice {
    Paper,
    Homogeneous,
    Custom { shells: Vec<Shell> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightChoice {
    One,
    Ik,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceChoice {
    F1,
    F2,
    /// `Σ c_i r^i` on `[0, support]`, zero outside.
    Polynomial { coefficients: Vec<f64>, support: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum RegChoice {
    None,
    Tikhonov(f64),
    Tsvd(f64),
}

/// Validated experiment configuration. Grid sizes count elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub medium: MediumChoice,
    pub h: WeightChoice,
    pub source: SourceChoice,
    pub frequencies: Vec<f64>,
    pub n_inverse: usize,
    pub n_data: usize,
    pub allow_inverse_crime: bool,
    pub sigma_rel: f64,
    pub seed: u64,
    pub reg: RegChoice,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            medium: MediumChoice::Paper,
            h: WeightChoice::One,
            source: SourceChoice::F1,
            frequencies: (1..=DEFAULT_FREQUENCY_COUNT).map(|j| j as f64).collect(),
            n_inverse: DEFAULT_N_INVERSE,
            n_data: DEFAULT_N_DATA,
            allow_inverse_crime: false,
            sigma_rel: 0.0,
            seed: 0,
            reg: RegChoice::None,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a configuration document.
    pub fn from_toml_str(text: &str, allow_inverse_crime: bool) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err("<document>", e.message().to_owned()))?;
        let mut flat = BTreeMap::new();
        flatten("", &Value::Table(table), &mut flat);
        if let Some(key) = flat.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(config_err(key, "unknown key"));
        }

        let mut cfg = Self { allow_inverse_crime, ..Self::default() };
        if let Some(v) = flat.get("medium.kind") {
            cfg.medium = match as_str("medium.kind", v)? {
                "paper" => MediumChoice::Paper,
                "homogeneous" => MediumChoice::Homogeneous,
                "custom" => MediumChoice::Custom { shells: Vec::new() },
                other => return Err(config_err("medium.kind", format!("unknown medium `{other}`"))),
            };
        }
        if let Some(v) = flat.get("medium.segments") {
            let MediumChoice::Custom { shells } = &mut cfg.medium else {
                return Err(config_err("medium.segments", "only valid with medium.kind = \"custom\""));
            };
            for item in as_array("medium.segments", v)? {
                shells.push(parse_shell(as_str("medium.segments", item)?)?);
            }
        }
        if let Some(v) = flat.get("medium.h") {
            cfg.h = match as_str("medium.h", v)? {
                "one" => WeightChoice::One,
                "ik" => WeightChoice::Ik,
                other => return Err(config_err("medium.h", format!("unknown weight `{other}`"))),
            };
        }
        if let Some(v) = flat.get("source.kind") {
            cfg.source = match as_str("source.kind", v)? {
                "f1" => SourceChoice::F1,
                "f2" => SourceChoice::F2,
                "polynomial" => {
                    let coeffs = flat
                        .get("source.coefficients")
                        .ok_or_else(|| config_err("source.coefficients", "required for polynomial sources"))?;
                    let coefficients = as_array("source.coefficients", coeffs)?
                        .iter()
                        .map(|c| as_f64("source.coefficients", c))
                        .collect::<Result<Vec<_>>>()?;
                    let support = flat
                        .get("source.support")
                        .ok_or_else(|| config_err("source.support", "required for polynomial sources"))
                        .and_then(|v| as_f64("source.support", v))?;
                    SourceChoice::Polynomial { coefficients, support }
                }
                other => return Err(config_err("source.kind", format!("unknown source `{other}`"))),
            };
        }
        if !matches!(cfg.source, SourceChoice::Polynomial { .. }) {
            for key in ["source.coefficients", "source.support"] {
                if flat.contains_key(key) {
                    return Err(config_err(key, "only valid with source.kind = \"polynomial\""));
                }
            }
        }
        if let Some(v) = flat.get("frequencies") {
            cfg.frequencies = parse_frequencies(v)?;
        }
        if let Some(v) = flat.get("grid.n_inverse") {
            cfg.n_inverse = as_count("grid.n_inverse", v)?;
        }
        if let Some(v) = flat.get("grid.n_data") {
            cfg.n_data = as_count("grid.n_data", v)?;
        }
        if let Some(v) = flat.get("noise.sigma_rel") {
            cfg.sigma_rel = as_f64("noise.sigma_rel", v)?;
        }
        if let Some(v) = flat.get("noise.seed") {
            cfg.seed = u64::try_from(as_int("noise.seed", v)?)
                .map_err(|_| config_err("noise.seed", "must be non-negative"))?;
        }
        let reg_param = flat.get("reg.param").map(|v| as_f64("reg.param", v)).transpose()?;
        if let Some(v) = flat.get("reg.kind") {
            let need = || reg_param.ok_or_else(|| config_err("reg.param", "required by reg.kind"));
            cfg.reg = match as_str("reg.kind", v)? {
                "none" => RegChoice::None,
                "tikhonov" => RegChoice::Tikhonov(need()?),
                "tsvd" => RegChoice::Tsvd(need()?),
                other => return Err(config_err("reg.kind", format!("unknown regularization `{other}`"))),
            };
        }
        if reg_param.is_some() && cfg.reg == RegChoice::None {
            return Err(config_err("reg.param", "has no effect without reg.kind"));
        }
        if let Some(v) = flat.get("output.dir") {
            cfg.output_dir = PathBuf::from(as_str("output.dir", v)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks all invariants, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.frequencies.is_empty() {
            return Err(config_err("frequencies", "at least one frequency is required"));
        }
        if self.frequencies.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(config_err("frequencies", "frequencies must be finite and positive"));
        }
        if self.frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(config_err("frequencies", "frequencies must be strictly increasing"));
        }
        for (key, n) in [("grid.n_inverse", self.n_inverse), ("grid.n_data", self.n_data)] {
            if n < 2 {
                return Err(config_err(key, "need at least 2 elements"));
            }
        }
        if self.n_data == self.n_inverse && !self.allow_inverse_crime {
            return Err(config_err(
                "grid.n_data",
                "equals grid.n_inverse; data and inversion grids must differ (pass --allow-inverse-crime to override)",
            ));
        }
        if !(self.sigma_rel.is_finite() && self.sigma_rel >= 0.0) {
            return Err(config_err("noise.sigma_rel", "must be finite and non-negative"));
        }
        match self.reg {
            RegChoice::Tikhonov(l) if !(l.is_finite() && l >= 0.0) => {
                return Err(config_err("reg.param", "Tikhonov parameter must be non-negative"));
            }
            RegChoice::Tsvd(r) if !(r > 0.0 && r < 1.0) => {
                return Err(config_err("reg.param", "TSVD cut-off must lie in (0, 1)"));
            }
            _ => {}
        }
        self.medium_spec().map_err(|e| config_err(self.medium_key(), e.to_string()))?;
        self.source_spec().map_err(|e| config_err(self.source_key(), e.to_string()))?;
        Ok(())
    }

    fn medium_key(&self) -> &'static str {
        match self.medium {
            MediumChoice::Custom { .. } => "medium.segments",
            _ => "medium.kind",
        }
    }

    fn source_key(&self) -> &'static str {
        match self.source {
            SourceChoice::Polynomial { .. } => "source.coefficients",
            _ => "source.kind",
        }
    }

    pub fn weight(&self) -> FrequencyWeight {
        match self.h {
            WeightChoice::One => FrequencyWeight::ConstantOne,
            WeightChoice::Ik => FrequencyWeight::ITimesK,
        }
    }

    pub fn medium_spec(&self) -> helmsrc_core::Result<MediumSpec> {
        match (&self.medium, self.h) {
            (MediumChoice::Paper, WeightChoice::One) => Ok(paper_medium()),
            (MediumChoice::Homogeneous, WeightChoice::One) => Ok(homogeneous_medium()),
            (MediumChoice::Paper, _) => {
                MediumSpec::from_shells(DOMAIN_RADIUS, &[(0.75, 1.0, 0.5, 2.0)], self.weight())
            }
            (MediumChoice::Homogeneous, _) => MediumSpec::from_shells(DOMAIN_RADIUS, &[], self.weight()),
            (MediumChoice::Custom { shells }, _) => {
                let s: Vec<_> = shells.iter().map(|s| (s.lo, s.hi, s.a, s.b)).collect();
                MediumSpec::from_shells(DOMAIN_RADIUS, &s, self.weight())
            }
        }
    }

    pub fn source_spec(&self) -> helmsrc_core::Result<SourceSpec> {
        match &self.source {
            SourceChoice::F1 => Ok(source_f1()),
            SourceChoice::F2 => Ok(source_f2()),
            SourceChoice::Polynomial { coefficients, support } => {
                let seg = Segment {
                    lo: 0.0,
                    hi: *support,
                    shape: SegmentShape::Polynomial(coefficients.clone()),
                };
                let p = PiecewiseRadialProfile::new(DOMAIN_RADIUS, vec![seg], 0.0)?;
                SourceSpec::new(p, *support)
            }
        }
    }

    pub fn regularization(&self) -> Regularization {
        match self.reg {
            RegChoice::None => Regularization::None,
            RegChoice::Tikhonov(l) => Regularization::Tikhonov(l),
            RegChoice::Tsvd(r) => Regularization::Tsvd(r),
        }
    }

    /// Grid with `elements` elements carrying the medium and source breakpoints.
    pub fn grid(&self, elements: usize) -> Result<Arc<RadialGrid>> {
        let medium = self.medium_spec().stage(|| "medium".into())?;
        let source = self.source_spec().stage(|| "source".into())?;
        let mut bps = medium.breakpoints();
        bps.extend(source.profile().breakpoints());
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        RadialGrid::build(DOMAIN_RADIUS, elements + 1, &bps)
            .map(Arc::new)
            .stage(|| format!("grid with {elements} elements"))
    }

    pub fn data_grid(&self) -> Result<Arc<RadialGrid>> {
        self.grid(self.n_data)
    }

    pub fn inverse_grid(&self) -> Result<Arc<RadialGrid>> {
        self.grid(self.n_inverse)
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path, allow_inverse_crime: bool) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| HarnessError::Io { path: path.to_owned(), source })?;
    ExperimentConfig::from_toml_str(&text, allow_inverse_crime).map_err(|e| match e {
        HarnessError::Config { key, message } => HarnessError::ConfigFile {
            path: path.to_owned(),
            message: format!("key `{key}`: {message}"),
        },
        other => other,
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Table(t) => {
            for (k, child) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        leaf => {
            out.insert(prefix.to_owned(), leaf.clone());
        }
    }
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| config_err(key, "expected a string"))
}

fn as_array<'a>(key: &str, v: &'a Value) -> Result<&'a [Value]> {
    v.as_array().map(Vec::as_slice).ok_or_else(|| config_err(key, "expected an array"))
}

fn as_int(key: &str, v: &Value) -> Result<i64> {
    v.as_integer().ok_or_else(|| config_err(key, "expected an integer"))
}

fn as_count(key: &str, v: &Value) -> Result<usize> {
    usize::try_from(as_int(key, v)?).map_err(|_| config_err(key, "must be non-negative"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(config_err(key, "expected a number")),
    }
}

fn parse_shell(s: &str) -> Result<Shell> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .ok()
        .filter(|v| v.len() == 4)
        .ok_or_else(|| config_err("medium.segments", format!("`{s}` is not r_lo:r_hi:a:b")))?;
    Ok(Shell { lo: nums[0], hi: nums[1], a: nums[2], b: nums[3] })
}

/// `"1..J"` (integers `1, …, J`) or an explicit array.
pub fn parse_frequencies(v: &Value) -> Result<Vec<f64>> {
    const KEY: &str = "frequencies";
    match v {
        Value::String(s) => {
            let (lo, hi) = s
                .split_once("..")
                .ok_or_else(|| config_err(KEY, format!("`{s}` is not a range `a..b`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| config_err(KEY, format!("`{t}` is not a positive integer")))
            };
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo == 0 || hi < lo {
                return Err(config_err(KEY, format!("empty or non-positive range `{s}`")));
            }
            Ok((lo..=hi).map(f64::from).collect())
        }
        Value::Array(items) => items.iter().map(|x| as_f64(KEY, x)).collect(),
        _ => Err(config_err(KEY, "expected a range string or an array of numbers")),
    }
}
