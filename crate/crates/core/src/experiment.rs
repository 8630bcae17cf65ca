//! Experiment descriptions, presets and result tables for the command-line
//! front end.
//!
//! An experiment is built in layers: defaults or a preset, then a flat
//! `key = value` config file, then individual overrides. Each layer is a
//! sequence of [`ExperimentSpec::set`] calls, so later layers win.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::exhaustive_search;
use crate::channel::{read_large_scale_csv, sample_large_scale, sample_small_scale, write_large_scale_csv, LargeScaleRealization};
use crate::dp::{count_comparisons, dp_solve};
use crate::error::{Error, Result};
use crate::montecarlo::{OutageEstimate, SimOptions, Simulation, SweepAxis, SweepRow};
use crate::selection::{Scheme, SelectOptions, Selector};
use crate::topology::{db_to_linear, linear_to_db, Network, NetworkConfig};
use crate::trellis::{build_branch_weights, state_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Invalid(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Outage probability per scheme, optionally swept over one axis.
    Outage,
    /// Selector time and comparison counts versus the number of hops.
    Complexity,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "outage" => Ok(ExperimentKind::Outage),
            "complexity" => Ok(ExperimentKind::Complexity),
            other => Err(Error::Invalid(format!("unknown experiment kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub config: NetworkConfig,
    pub axis: Option<SweepAxis>,
    /// Axis values; for complexity runs, the hop counts.
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    /// Slots per point, or instances per point for complexity runs.
    pub n_slots: u64,
    pub seed: u64,
    pub options: SimOptions,
    /// Pair counts of a complexity run; the configured `n_pairs` when empty.
    pub complexity_pairs: Vec<usize>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Replays this large-scale realization instead of sampling one.
    pub large_scale_input: Option<PathBuf>,
    /// Writes the large-scale realization of the base configuration here.
    pub large_scale_output: Option<PathBuf>,
}

pub const DEFAULT_SLOTS: u64 = 10_000;

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "custom".into(),
            kind: ExperimentKind::Outage,
            config: NetworkConfig::new(2, 6, 10, 5.0),
            axis: None,
            values: Vec::new(),
            schemes: Scheme::COMPARISON.to_vec(),
            n_slots: DEFAULT_SLOTS,
            seed: 1,
            options: SimOptions::default(),
            complexity_pairs: Vec::new(),
            format: OutputFormat::Csv,
            output: None,
            large_scale_input: None,
            large_scale_output: None,
        }
    }
}

/// Preset names with a one-line description.
pub const PRESETS: [(&str, &str); 8] = [
    ("fig3", "N=3, M=4, L=6, D=3 km, no interference, 3 dB threshold, power sweep, 4 schemes"),
    ("table2-row", "N=2, M=6, L=10, D=5 km at 31 dBm, one row per scheme"),
    ("table2-l", "N=2, M=6, D=5 km at 31 dBm, L in 8..14"),
    ("table2-n", "M=6, L=10, D=5 km at 31 dBm, N in 2..5"),
    ("fig4", "N=2, M=6, L=10, D=10 km, interference, -3 dB threshold, power sweep"),
    ("fig5", "N=2, M=6, L=20, D=10 km, interference, -5 dB threshold, power sweep"),
    ("complexity", "N=2, M=3, D=3 km, selector time and comparisons for L in 3..10"),
    ("selftest-grid", "N in {1,2}, M in {2,3}, L in 2..5, optimal vs exhaustive"),
];

macro_rules! table2 {
    () => {
        "n_pairs = 2\nrelays_per_hop = 6\nn_hops = 10\ntotal_distance_km = 5\n\
         interference = false\nshadowing = true\nsinr_threshold_db = 3\n\
         tx_power_dbm = 31\nnoise_power_dbm = 36\nlarge_scale_realizations = 1000\n\
         schemes = optimal, drs, greedy, hop-greedy"
    };
}
const TABLE2: &str = table2!();

/// The settings of a preset, in config-file syntax.
fn preset_settings(name: &str) -> Option<&'static str> {
    let text = match name {
        "fig3" => {
            "n_pairs = 3\nrelays_per_hop = 4\nn_hops = 6\ntotal_distance_km = 3\n\
             interference = false\nshadowing = true\nsinr_threshold_db = 3\n\
             noise_power_dbm = 24\naxis = tx_power_dbm\nvalues = 16:40:2\n\
             schemes = optimal, drs, greedy, hop-greedy"
        }
        "table2-row" => TABLE2,
        "table2-l" => concat!(table2!(), "\naxis = L\nvalues = 8, 10, 12, 14"),
        "table2-n" => concat!(table2!(), "\naxis = N\nvalues = 2, 3, 4, 5"),
        "fig4" => {
            "n_pairs = 2\nrelays_per_hop = 6\nn_hops = 10\ntotal_distance_km = 10\n\
             interference = true\nshadowing = false\nsinr_threshold_db = -3\n\
             noise_power_dbm = 24\naxis = tx_power_dbm\nvalues = 16:40:2\nschemes = optimal"
        }
        "fig5" => {
            "n_pairs = 2\nrelays_per_hop = 6\nn_hops = 20\ntotal_distance_km = 10\n\
             interference = true\nshadowing = false\nsinr_threshold_db = -5\n\
             noise_power_dbm = 24\naxis = tx_power_dbm\nvalues = 16:40:2\nschemes = optimal"
        }
        "complexity" => {
            "experiment = complexity\nn_pairs = 2\nrelays_per_hop = 3\nn_hops = 3\n\
             total_distance_km = 3\nnoise_power_dbm = 24\naxis = L\nvalues = 3:10:1\n\
             schemes = optimal, exhaustive, drs, greedy, hop-greedy\nn_slots = 200"
        }
        "selftest-grid" => {
            "experiment = complexity\nrelays_per_hop = 3\nn_hops = 2\ntotal_distance_km = 2\n\
             complexity_pairs = 1, 2\naxis = L\nvalues = 2:5:1\nschemes = optimal, exhaustive\nn_slots = 20"
        }
        _ => return None,
    };
    Some(text)
}


/// One `key = value` line of a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits flat `key = value` text into settings. `#` starts a comment; blank
/// lines are ignored.
pub fn parse_config(text: &str) -> Result<Vec<Setting>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config {
                line,
                message: "empty key".into(),
            });
        }
        out.push(Setting {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Parses `a, b, c` or an inclusive range `start:stop:step`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(parse_f64).collect::<Result<_>>()?;
        let (start, stop, step) = match parts[..] {
            [a, b] => (a, b, 1.0),
            [a, b, s] => (a, b, s),
            _ => return Err(Error::Invalid(format!("bad range `{text}`"))),
        };
        if !(step > 0.0) || stop < start {
            return Err(Error::Invalid(format!("bad range `{text}`")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|k| start + k as f64 * step).collect());
    }
    list(text, parse_f64)
}

fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Invalid(format!("`{s}` is not a finite number")))
}

fn parse_count<T: FromStr>(s: &str) -> Result<T> {
    let s = s.trim();
    s.parse::<T>()
        .map_err(|_| Error::Invalid(format!("`{s}` is not a nonnegative integer")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(Error::Invalid(format!("`{other}` is not a boolean"))),
    }
}

fn list<T>(s: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse)
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Invalid("empty list".into()));
    }
    Ok(items)
}

/// Keys understood by [`ExperimentSpec::set`].
pub const KEYS: [&str; 25] = [
    "experiment",
    "n_pairs",
    "relays_per_hop",
    "n_hops",
    "total_distance_km",
    "path_loss_exponent",
    "shadowing_std_db",
    "tx_power_dbm",
    "noise_power_dbm",
    "sinr_threshold_db",
    "interference",
    "shadowing",
    "schemes",
    "n_slots",
    "seed",
    "axis",
    "values",
    "large_scale_realizations",
    "exhaustive_budget",
    "user_order",
    "complexity_pairs",
    "format",
    "output",
    "large_scale_input",
    "large_scale_output",
];

impl ExperimentSpec {
    /// Starts from a named preset.
    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_settings(name).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            Error::Invalid(format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })?;
        let mut spec = ExperimentSpec::default();
        spec.apply_config_str(text)?;
        spec.name = name.to_string();
        Ok(spec)
    }

    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for s in parse_config(text)? {
            self.set(&s.key, &s.value).map_err(|e| match e {
                Error::Config { .. } => e,
                other => Error::Config {
                    line: s.line,
                    message: other.to_string(),
                },
            })?;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_config_str(&text)
    }

    /// Applies one setting. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let cfg = &mut self.config;
        match key.trim() {
            "experiment" => self.kind = value.parse()?,
            "n_pairs" => {
                let n: usize = parse_count(value)?;
                let first = cfg.sinr_thresholds.first().copied().unwrap_or(1.0);
                if cfg.sinr_thresholds.iter().all(|&t| t == first) {
                    cfg.sinr_thresholds = vec![first; n];
                }
                cfg.n_pairs = n;
            }
            "relays_per_hop" => cfg.relays_per_hop = list(value, parse_count)?,
            "n_hops" => cfg.n_hops = parse_count(value)?,
            "total_distance_km" => cfg.total_distance_km = parse_f64(value)?,
            "path_loss_exponent" => cfg.path_loss_exponent = parse_f64(value)?,
            "shadowing_std_db" => cfg.shadowing_std_db = parse_f64(value)?,
            "tx_power_dbm" => cfg.tx_power_dbm = parse_f64(value)?,
            "noise_power_dbm" => cfg.noise_power_dbm = parse_f64(value)?,
            "sinr_threshold_db" => {
                let db = list(value, parse_f64)?;
                cfg.sinr_thresholds = if db.len() == 1 {
                    vec![db_to_linear(db[0]); cfg.n_pairs]
                } else {
                    db.into_iter().map(db_to_linear).collect()
                };
            }
            "interference" => cfg.interference_enabled = parse_bool(value)?,
            "shadowing" => cfg.shadowing_enabled = parse_bool(value)?,
            "schemes" => self.schemes = list(value, str::parse)?,
            "n_slots" => self.n_slots = parse_count(value)?,
            "seed" => self.seed = parse_count(value)?,
            "axis" => {
                self.axis = match value.trim() {
                    "" | "none" => None,
                    a => Some(a.parse()?),
                }
            }
            "values" => self.values = parse_values(value)?,
            "large_scale_realizations" => self.options.large_scale_realizations = parse_count(value)?,
            "exhaustive_budget" => {
                self.options.select.exhaustive_budget = parse_f64(value).and_then(|v| {
                    if v >= 0.0 && v.fract() == 0.0 {
                        Ok(v as u128)
                    } else {
                        Err(Error::Invalid(format!("bad budget `{value}`")))
                    }
                })?
            }
            "user_order" => self.options.select.user_order = Some(list(value, parse_count)?),
            "complexity_pairs" => self.complexity_pairs = list(value, parse_count)?,
            "format" => self.format = value.parse()?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "large_scale_input" => self.large_scale_input = Some(PathBuf::from(value.trim())),
            "large_scale_output" => self.large_scale_output = Some(PathBuf::from(value.trim())),
            other => return Err(Error::Invalid(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.schemes.is_empty() {
            return Err(Error::Invalid("no schemes selected".into()));
        }
        if self.n_slots == 0 {
            return Err(Error::Invalid("n_slots must be at least 1".into()));
        }
        if self.axis.is_some() && self.values.is_empty() {
            return Err(Error::Invalid("an axis needs at least one value".into()));
        }
        if let Some(axis) = self.axis {
            for &v in &self.values {
                axis.apply(&self.config, v)?.validate()?;
            }
        }
        match self.kind {
            ExperimentKind::Outage => {
                if self.large_scale_input.is_some() && matches!(self.axis, Some(a) if a != SweepAxis::TxPowerDbm) {
                    return Err(Error::Invalid(
                        "a loaded large-scale realization only fits power sweeps".into(),
                    ));
                }
            }
            ExperimentKind::Complexity => {
                if self.axis != Some(SweepAxis::Hops) {
                    return Err(Error::Invalid("complexity runs sweep the L axis".into()));
                }
            }
        }
        Ok(())
    }

    /// The settings in config-file syntax; applying them to a default spec
    /// reproduces `self` up to floating-point formatting of the thresholds.
    pub fn to_config_string(&self) -> String {
        let c = &self.config;
        let join = |v: &[String]| v.join(", ");
        let mut s = String::new();
        let kind = match self.kind {
            ExperimentKind::Outage => "outage",
            ExperimentKind::Complexity => "complexity",
        };
        let _ = writeln!(s, "experiment = {kind}");
        let _ = writeln!(s, "n_pairs = {}", c.n_pairs);
        let _ = writeln!(s, "relays_per_hop = {}", join(&c.relays_per_hop.iter().map(|r| r.to_string()).collect::<Vec<_>>()));
        let _ = writeln!(s, "n_hops = {}", c.n_hops);
        let _ = writeln!(s, "total_distance_km = {}", c.total_distance_km);
        let _ = writeln!(s, "path_loss_exponent = {}", c.path_loss_exponent);
        let _ = writeln!(s, "shadowing_std_db = {}", c.shadowing_std_db);
        let _ = writeln!(s, "tx_power_dbm = {}", c.tx_power_dbm);
        let _ = writeln!(s, "noise_power_dbm = {}", c.noise_power_dbm);
        // dB values rounded to 1e-9 so that a round trip is stable
        let mut th: Vec<String> = c
            .sinr_thresholds
            .iter()
            .map(|&t| ((linear_to_db(t) * 1e9).round() / 1e9).to_string())
            .collect();
        if th.iter().all(|t| *t == th[0]) {
            th.truncate(1);
        }
        let _ = writeln!(s, "sinr_threshold_db = {}", join(&th));
        let _ = writeln!(s, "interference = {}", c.interference_enabled);
        let _ = writeln!(s, "shadowing = {}", c.shadowing_enabled);
        let schemes: Vec<String> = self.schemes.iter().map(|s| s.name().to_string()).collect();
        let _ = writeln!(s, "schemes = {}", join(&schemes));
        let _ = writeln!(s, "n_slots = {}", self.n_slots);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(axis) = self.axis {
            let _ = writeln!(s, "axis = {}", axis.name());
            let v: Vec<String> = self.values.iter().map(f64::to_string).collect();
            let _ = writeln!(s, "values = {}", join(&v));
        }
        let _ = writeln!(s, "large_scale_realizations = {}", self.options.large_scale_realizations);
        let _ = writeln!(s, "exhaustive_budget = {}", self.options.select.exhaustive_budget);
        if let Some(order) = &self.options.select.user_order {
            let _ = writeln!(s, "user_order = {}", join(&order.iter().map(|u| u.to_string()).collect::<Vec<_>>()));
        }
        if !self.complexity_pairs.is_empty() {
            let p: Vec<String> = self.complexity_pairs.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "complexity_pairs = {}", join(&p));
        }
        s
    }

    /// Runs the experiment and returns its table.
    pub fn run(&self) -> Result<ExperimentResult> {
        self.validate()?;
        if let Some(path) = &self.large_scale_output {
            let net = Network::new(&self.config)?;
            write_large_scale_csv(&sample_large_scale(&net, self.seed), File::create(path)?)?;
        }
        let table = match self.kind {
            ExperimentKind::Outage => Table::Outage(self.run_outage()?),
            ExperimentKind::Complexity => {
                let pairs = if self.complexity_pairs.is_empty() {
                    vec![self.config.n_pairs]
                } else {
                    self.complexity_pairs.clone()
                };
                let hops: Vec<usize> = self.values.iter().map(|&v| v as usize).collect();
                Table::Complexity(emit_complexity_report(
                    &self.config,
                    &pairs,
                    &hops,
                    &self.schemes,
                    self.n_slots,
                    self.seed,
                    self.options.select.exhaustive_budget,
                )?)
            }
        };
        Ok(ExperimentResult {
            name: self.name.clone(),
            axis: self.axis,
            seed: self.seed,
            n_slots: self.n_slots,
            table,
        })
    }

    fn run_outage(&self) -> Result<Vec<ResultRow>> {
        let loaded = match &self.large_scale_input {
            Some(path) => {
                let net = Network::new(&self.config)?;
                Some(read_large_scale_csv(&net, BufReader::new(File::open(path)?))?)
            }
            None => None,
        };
        let points: Vec<(Option<f64>, NetworkConfig)> = match self.axis {
            None => vec![(None, self.config.clone())],
            Some(axis) => self
                .values
                .iter()
                .map(|&v| Ok((Some(v), axis.apply(&self.config, v)?)))
                .collect::<Result<_>>()?,
        };
        let mut rows = Vec::new();
        for (axis_value, cfg) in points {
            for estimate in self.estimate_point(&cfg, loaded.as_ref())? {
                rows.push(ResultRow { axis_value, estimate });
            }
        }
        Ok(rows)
    }

    fn estimate_point(&self, cfg: &NetworkConfig, loaded: Option<&LargeScaleRealization>) -> Result<Vec<OutageEstimate>> {
        let net = Network::new(cfg)?;
        let sim = match loaded {
            Some(large) => Simulation::with_large_scale(&net, large.clone(), &self.schemes, self.seed, &self.options)?,
            None => Simulation::new(&net, &self.schemes, self.seed, &self.options)?,
        };
        sim.estimate(self.n_slots)
    }
}

/// One outage estimate, tagged with the axis value it was measured at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub axis_value: Option<f64>,
    #[serde(flatten)]
    pub estimate: OutageEstimate,
}

impl From<SweepRow> for ResultRow {
    fn from(r: SweepRow) -> Self {
        ResultRow {
            axis_value: Some(r.axis_value),
            estimate: r.estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Table {
    Outage(Vec<ResultRow>),
    Complexity(Vec<ComplexityRow>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub axis: Option<SweepAxis>,
    pub seed: u64,
    pub n_slots: u64,
    #[serde(rename = "rows")]
    pub table: Table,
}

const TIMING_NOTE: &str = "# mean_time_ms is wall-clock time and is not deterministic; all other columns are";

pub const OUTAGE_COLUMNS: &str = "scheme,axis_value,trials,outage_prob,ci_low,ci_high,mean_time_ms,mean_comparisons";
pub const COMPLEXITY_COLUMNS: &str = "n_pairs,relays,n_hops,states,scheme,instances,mean_time_ms,mean_comparisons,status";

impl ExperimentResult {
    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TIMING_NOTE}")?;
        let axis = self.axis.map_or("none", SweepAxis::name);
        writeln!(out, "# experiment={} axis={axis} seed={} n_slots={}", self.name, self.seed, self.n_slots)?;
        match &self.table {
            Table::Outage(rows) => {
                writeln!(out, "{OUTAGE_COLUMNS}")?;
                for r in rows {
                    let e = &r.estimate;
                    let axis_value = r.axis_value.map(|v| v.to_string()).unwrap_or_default();
                    writeln!(
                        out,
                        "{},{axis_value},{},{},{},{},{},{}",
                        e.scheme.name(),
                        e.trials,
                        e.probability,
                        e.ci_low,
                        e.ci_high,
                        e.mean_time_ms,
                        e.mean_comparisons
                    )?;
                }
            }
            Table::Complexity(rows) => {
                writeln!(out, "{COMPLEXITY_COLUMNS}")?;
                for r in rows {
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        r.n_pairs,
                        r.relays,
                        r.n_hops,
                        r.states,
                        r.scheme.name(),
                        r.instances,
                        opt(r.mean_time_ms),
                        opt(r.mean_comparisons),
                        r.status
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    /// One human-readable line per scheme.
    pub fn summary(&self) -> Vec<String> {
        match &self.table {
            Table::Outage(rows) => {
                let mut schemes: Vec<Scheme> = Vec::new();
                for r in rows {
                    if !schemes.contains(&r.estimate.scheme) {
                        schemes.push(r.estimate.scheme);
                    }
                }
                schemes
                    .iter()
                    .map(|&s| {
                        let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.estimate.scheme == s).collect();
                        let time = mine.iter().map(|r| r.estimate.mean_time_ms).sum::<f64>() / mine.len() as f64;
                        let comps = mine.iter().map(|r| r.estimate.mean_comparisons).sum::<f64>() / mine.len() as f64;
                        let outage = match (self.axis, &mine[..]) {
                            (None, [r]) => {
                                let e = &r.estimate;
                                format!("P_out {:.4e} [{:.4e}, {:.4e}]", e.probability, e.ci_low, e.ci_high)
                            }
                            _ => {
                                let name = self.axis.map_or("point", SweepAxis::name);
                                let points: Vec<String> = mine
                                    .iter()
                                    .map(|r| {
                                        let v = r.axis_value.map(|v| v.to_string()).unwrap_or_default();
                                        format!("{v}:{:.3e}", r.estimate.probability)
                                    })
                                    .collect();
                                format!("P_out by {name} {}", points.join(" "))
                            }
                        };
                        format!("{:<10} {outage}; {time:.4} ms/slot, {comps:.0} comparisons/slot", s.label())
                    })
                    .collect()
            }
            Table::Complexity(rows) => {
                let mut schemes: Vec<Scheme> = Vec::new();
                for r in rows {
                    if !schemes.contains(&r.scheme) {
                        schemes.push(r.scheme);
                    }
                }
                schemes
                    .iter()
                    .map(|&s| {
                        let points: Vec<String> = rows
                            .iter()
                            .filter(|r| r.scheme == s)
                            .map(|r| match r.mean_time_ms {
                                Some(t) => format!("N{}L{}:{t:.4}ms", r.n_pairs, r.n_hops),
                                None => format!("N{}L{}:skipped", r.n_pairs, r.n_hops),
                            })
                            .collect();
                        format!("{:<10} {}", s.label(), points.join(" "))
                    })
                    .collect()
            }
        }
    }
}

/// Mean selector cost at one `(N, L)` point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n_pairs: usize,
    pub relays: usize,
    pub n_hops: usize,
    /// Trellis states per stage, `Z`.
    pub states: u64,
    pub scheme: Scheme,
    pub instances: u64,
    pub mean_time_ms: Option<f64>,
    /// Comparisons for the dynamic program, visited paths for exhaustive
    /// search, and the scheme's own count otherwise.
    pub mean_comparisons: Option<f64>,
    /// `ok`, or `skipped` when exhaustive search would exceed its budget.
    pub status: &'static str,
}

/// Times every scheme on `n_instances` channel realizations for each pair
/// count in `pairs` and hop count in `hops`. Exhaustive search is skipped
/// wherever `Z^(L-1)` exceeds `budget`.
pub fn emit_complexity_report(
    base: &NetworkConfig,
    pairs: &[usize],
    hops: &[usize],
    schemes: &[Scheme],
    n_instances: u64,
    seed: u64,
    budget: u128,
) -> Result<Vec<ComplexityRow>> {
    if n_instances == 0 {
        return Err(Error::Invalid("need at least one instance".into()));
    }
    let mut rows = Vec::new();
    for &n in pairs {
        for &l in hops {
            let cfg = SweepAxis::Hops.apply(&SweepAxis::Pairs.apply(base, n as f64)?, l as f64)?;
            let net = Network::new(&cfg)?;
            let selector = Selector::new(&net, SelectOptions {
                exhaustive_budget: budget,
                ..Default::default()
            })?;
            let z = state_count(n, net.relays());
            let large = sample_large_scale(&net, seed);
            let channels: Vec<_> = (0..n_instances).map(|k| sample_small_scale(&large, seed, k)).collect();
            for &scheme in schemes {
                let paths = z.checked_pow((l - 1) as u32);
                let row = |mean_time_ms, mean_comparisons, status| ComplexityRow {
                    n_pairs: n,
                    relays: net.relays(),
                    n_hops: l,
                    states: z as u64,
                    scheme,
                    instances: n_instances,
                    mean_time_ms,
                    mean_comparisons,
                    status,
                };
                if scheme == Scheme::Exhaustive && paths.is_none_or(|p| p > budget) {
                    rows.push(row(None, None, "skipped"));
                    continue;
                }
                let mut comparisons = 0f64;
                let start = Instant::now();
                for ch in &channels {
                    comparisons += selector.select(scheme, ch)?.comparisons as f64;
                }
                let ms = start.elapsed().as_secs_f64() * 1e3 / n_instances as f64;
                rows.push(row(Some(ms), Some(comparisons / n_instances as f64), "ok"));
            }
        }
    }
    Ok(rows)
}

/// Outcome of [`selftest`].
#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the dynamic program against exhaustive search and the baselines
/// on `instances` random small networks (`N` in {1,2}, `M` in {2,3}, `L` in
/// 2..=5, at most 1296 trellis paths).
pub fn selftest(instances: usize, seed: u64) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    while done < instances {
        let n = rng.random_range(1..=2usize);
        let m = rng.random_range(2..=3usize);
        let l = rng.random_range(2..=5usize);
        let z = state_count(n, m);
        if z.pow((l - 1) as u32) > 1296 {
            continue;
        }
        let mut cfg = NetworkConfig::new(n, m, l, rng.random_range(0.5..4.0));
        cfg.interference_enabled = rng.random_bool(0.5);
        cfg.shadowing_enabled = rng.random_bool(0.8);
        cfg.noise_power_dbm = rng.random_range(-10.0..30.0);
        if l > 2 && rng.random_bool(0.3) {
            cfg.relays_per_hop = (0..l - 1).map(|_| rng.random_range(n..=m)).collect();
            cfg.relays_per_hop[0] = m;
        }
        let instance_seed: u64 = rng.random();
        let tag = format!("instance {done} (N={n}, M={m}, L={l}, seed={instance_seed})");

        let net = Network::new(&cfg)?;
        let selector = Selector::new(&net, SelectOptions::default())?;
        let channel = sample_small_scale(&sample_large_scale(&net, instance_seed), instance_seed, 0);
        let weights = build_branch_weights(&channel, selector.space(), &net)?;
        let dp = dp_solve(&weights)?;
        let oracle = exhaustive_search(&weights, u128::MAX)?;
        if dp.value != oracle.value {
            failures.push(format!("{tag}: dp value {} != exhaustive {}", dp.value, oracle.value));
        }
        let expected = count_comparisons(z as u64, l as u64);
        if dp.tables.comparisons() != expected {
            failures.push(format!("{tag}: {} comparisons, expected {expected}", dp.tables.comparisons()));
        }
        let best = selector.select(Scheme::Optimal, &channel)?;
        let recomputed = best.per_user_sinr.iter().copied().fold(f64::INFINITY, f64::min);
        if (recomputed - best.value).abs() > 1e-12 * best.value.abs() {
            failures.push(format!("{tag}: path value {} but per-pair minimum {recomputed}", best.value));
        }
        for scheme in [Scheme::Greedy, Scheme::HopGreedy, Scheme::Drs] {
            let v = selector.select(scheme, &channel)?.value;
            if v > best.value {
                failures.push(format!("{tag}: {} reaches {v} above optimal {}", scheme.label(), best.value));
            }
        }
        done += 1;
    }
    Ok(SelftestReport { instances, failures })
}
