//! Pipeline configuration, read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use fxtopo::ingest::{CsvOptions, MonthlyRule};
use fxtopo::stats::StlConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Stage, StageError};

pub const DEFAULT_CURRENCIES: [&str; 13] =
    ["AUD", "BRL", "CHF", "CNY", "GBP", "INR", "JPY", "KRW", "RUB", "THB", "TRY", "USD", "ZAR"];

/// Filtration ceiling.
///
/// TOML forms: `"auto"` (largest pairwise distance over all clouds),
/// a number (fixed ceiling), or `{ scale = 1.25 }` (multiple of auto).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsMax {
    Fixed(f64),
    Scaled { scale: f64 },
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl EpsMax {
    pub const AUTO: EpsMax = EpsMax::Auto(AutoTag::Auto);

    pub fn resolve(&self, auto: f64) -> f64 {
        match *self {
            EpsMax::Fixed(v) => v,
            EpsMax::Scaled { scale } => auto * scale,
            EpsMax::Auto(_) => auto,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match *self {
            EpsMax::Fixed(v) if !(v > 0.0 && v.is_finite()) => Err(format!("eps_max must be positive, got {v}")),
            EpsMax::Scaled { scale } if !(scale > 0.0 && scale.is_finite()) => {
                Err(format!("eps_max scale must be positive, got {scale}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EpsMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsMax::Fixed(v) => write!(f, "eps_max = {v}"),
            EpsMax::Scaled { scale } => {
                let pct = (scale - 1.0) * 100.0;
                if pct >= 0.0 {
                    write!(f, "eps_max increased by {}%", pct.round())
                } else {
                    write!(f, "eps_max decreased by {}%", (-pct).round())
                }
            }
            EpsMax::Auto(_) => f.write_str("eps_max = auto"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CsvConfig {
    /// File name per currency; `{code}` is replaced by the currency code.
    /// With a name lacking `{code}`, one wide file holds a column per currency.
    pub file_pattern: String,
    pub delimiter: char,
    pub date_column: String,
    /// Rate column for per-currency files; ignored for wide files.
    pub rate_column: String,
    pub date_format: String,
}

impl Default for CsvConfig {
    fn default() -> Self {
        Self {
            file_pattern: "{code}.csv".into(),
            delimiter: ',',
            date_column: "date".into(),
            rate_column: "rate".into(),
            date_format: "%Y-%m-%d".into(),
        }
    }
}

impl CsvConfig {
    pub fn is_wide(&self) -> bool {
        !self.file_pattern.contains("{code}")
    }

    pub fn file_for(&self, code: &str) -> String {
        self.file_pattern.replace("{code}", code)
    }

    pub fn options_for(&self, code: &str) -> CsvOptions {
        CsvOptions {
            delimiter: self.delimiter as u8,
            date_column: self.date_column.clone(),
            rate_column: if self.is_wide() { code.to_string() } else { self.rate_column.clone() },
            date_format: self.date_format.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateRange {
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedConfig {
    pub window: usize,
    pub delay: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self { window: 4, delay: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WassersteinConfig {
    pub p: f64,
    pub q: f64,
    /// Weight of each homology degree in the combined distance, H0 first.
    pub dim_weights: Vec<f64>,
    pub include_essential: bool,
}

impl Default for WassersteinConfig {
    fn default() -> Self {
        Self { p: 2.0, q: 2.0, dim_weights: vec![1.0, 1.0], include_essential: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StlInput {
    Rates,
    Returns,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StlSection {
    pub input: StlInput,
    pub period: usize,
    pub seasonal_span: usize,
    pub trend_span: Option<usize>,
    pub low_pass_span: Option<usize>,
    pub inner_loops: usize,
    pub outer_loops: usize,
}

impl Default for StlSection {
    fn default() -> Self {
        let d = StlConfig::default();
        Self {
            input: StlInput::Rates,
            period: 12,
            seasonal_span: d.seasonal_span,
            trend_span: d.trend_span,
            low_pass_span: d.low_pass_span,
            inner_loops: d.inner_loops,
            outer_loops: d.outer_loops,
        }
    }
}

impl StlSection {
    pub fn to_stl_config(&self) -> StlConfig {
        StlConfig {
            seasonal_span: self.seasonal_span,
            trend_span: self.trend_span,
            low_pass_span: self.low_pass_span,
            inner_loops: self.inner_loops,
            outer_loops: self.outer_loops,
            ..StlConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SummaryConfig {
    pub landscape_layers: usize,
    pub grid_size: usize,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self { landscape_layers: 3, grid_size: 100 }
    }
}

/// One sensitivity row; unset fields keep the baseline value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRow {
    pub label: Option<String>,
    pub window: Option<usize>,
    pub delay: Option<usize>,
    pub eps_max: Option<EpsMax>,
}

impl GridRow {
    pub fn embed(&self, base: EmbedConfig) -> EmbedConfig {
        EmbedConfig { window: self.window.unwrap_or(base.window), delay: self.delay.unwrap_or(base.delay) }
    }

    pub fn eps(&self, base: EpsMax) -> EpsMax {
        self.eps_max.unwrap_or(base)
    }

    pub fn baseline_name(embed: EmbedConfig, eps: EpsMax) -> String {
        GridRow { label: None, window: None, delay: None, eps_max: None }.describe(embed, eps)
    }

    pub fn describe(&self, base_embed: EmbedConfig, base_eps: EpsMax) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let e = self.embed(base_embed);
        let eps = self.eps(base_eps);
        if eps == base_eps {
            format!("d = {}, tau = {}", e.window, e.delay)
        } else if e == base_embed {
            eps.to_string()
        } else {
            format!("d = {}, tau = {}, {eps}", e.window, e.delay)
        }
    }
}

pub fn default_grid() -> Vec<GridRow> {
    let embed = |window, delay| GridRow { label: None, window: Some(window), delay: Some(delay), eps_max: None };
    let scaled = |scale| GridRow { label: None, window: None, delay: None, eps_max: Some(EpsMax::Scaled { scale }) };
    vec![embed(3, 1), embed(4, 1), embed(5, 1), embed(4, 2), embed(6, 1), scaled(1.25), scaled(0.75)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    /// Run the grid as part of `run`.
    pub enabled: bool,
    pub grid: Vec<GridRow>,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self { enabled: true, grid: default_grid() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Resolved against the config file's directory when relative.
    pub data_dir: PathBuf,
    pub output_dir: PathBuf,
    pub currencies: Vec<String>,
    pub date_range: Option<DateRange>,
    pub csv: CsvConfig,
    pub monthly_rule: MonthlyRule,
    pub max_lag: usize,
    pub stl: StlSection,
    pub embed: EmbedConfig,
    pub eps_max: EpsMax,
    pub wasserstein: WassersteinConfig,
    pub summaries: SummaryConfig,
    pub mds_dim: usize,
    pub k: usize,
    pub k_max_elbow: usize,
    pub seed: u64,
    pub sensitivity: SensitivityConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            output_dir: PathBuf::from("report"),
            currencies: DEFAULT_CURRENCIES.iter().map(|c| c.to_string()).collect(),
            date_range: None,
            csv: CsvConfig::default(),
            monthly_rule: MonthlyRule::Last,
            max_lag: 1,
            stl: StlSection::default(),
            embed: EmbedConfig::default(),
            eps_max: EpsMax::AUTO,
            wasserstein: WassersteinConfig::default(),
            summaries: SummaryConfig::default(),
            mds_dim: 5,
            k: 3,
            k_max_elbow: 10,
            seed: 42,
            sensitivity: SensitivityConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, StageError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| StageError::msg(Stage::Config, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and validate; relative `data_dir`/`output_dir` are anchored at the file's directory.
    pub fn load(path: &Path) -> Result<Self, StageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StageError::msg(Stage::Config, format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.data_dir.is_relative() {
            cfg.data_dir = base.join(&cfg.data_dir);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), StageError> {
        let fail = |m: String| Err(StageError::msg(Stage::Config, m));
        let n = self.currencies.len();
        if n < 3 {
            return fail(format!("need at least 3 currencies, got {n}"));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.currencies {
            if c.trim().is_empty() || !seen.insert(c.as_str()) {
                return fail(format!("currency list has an empty or duplicate entry `{c}`"));
            }
        }
        if self.embed.window < 1 || self.embed.delay < 1 {
            return fail("embedding window and delay must be >= 1".into());
        }
        if self.k < 2 || self.k > n {
            return fail(format!("k must be in 2..={n}, got {}", self.k));
        }
        if self.k_max_elbow < self.k || self.k_max_elbow > n {
            return fail(format!("k_max_elbow must be in {}..={n}, got {}", self.k, self.k_max_elbow));
        }
        if self.mds_dim < 1 || self.mds_dim >= n {
            return fail(format!("mds_dim must be in 1..{n}, got {}", self.mds_dim));
        }
        if !(self.wasserstein.p >= 1.0 && self.wasserstein.p.is_finite()) || !(self.wasserstein.q >= 1.0) {
            return fail(format!(
                "need p >= 1 (finite) and q >= 1, got p={}, q={}",
                self.wasserstein.p, self.wasserstein.q
            ));
        }
        let w = &self.wasserstein.dim_weights;
        if w.is_empty() || w.len() > 2 || w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) || w.iter().all(|x| *x == 0.0)
        {
            return fail("dim_weights needs 1 or 2 nonnegative weights, not all zero".into());
        }
        if let Err(m) = self.eps_max.validate() {
            return fail(m);
        }
        if self.summaries.landscape_layers == 0 || self.summaries.grid_size < 2 {
            return fail("landscape_layers must be >= 1 and grid_size >= 2".into());
        }
        if self.stl.period < 2 {
            return fail("stl.period must be >= 2".into());
        }
        if !self.csv.delimiter.is_ascii() {
            return fail(format!("delimiter `{}` is not ASCII", self.csv.delimiter));
        }
        if let Some(DateRange { start: Some(s), end: Some(e) }) = self.date_range {
            if s >= e {
                return fail(format!("date_range start {s} is not before end {e}"));
            }
        }
        for row in &self.sensitivity.grid {
            if row.window == Some(0) || row.delay == Some(0) {
                return fail("sensitivity rows need window and delay >= 1".into());
            }
            if let Some(Err(m)) = row.eps_max.map(|e| e.validate()) {
                return fail(m);
            }
        }
        Ok(())
    }

    pub fn max_homology_dim(&self) -> usize {
        self.wasserstein.dim_weights.len() - 1
    }
}
