//! Monte-Carlo sweeps over the scenario parameters.
//!
//! Every scheme at a grid point sees the same channel realizations: the
//! realization with index `r` uses seed `base_seed + r` at every grid point and
//! for every scheme. Realizations run in parallel, but results are collected in
//! index order, so the table is a pure function of the configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ao::{optimize, AoConfig, AoResult};
use crate::baselines::{baseline1_zf, baseline2_no_irs, ZfNulling};
use crate::channel_gen::{realize, GeometryConfig, ScenarioRealization};
use crate::error::{Error, Result};
use crate::system_model::{dbm_to_watts, BudgetConfig, ScenarioDims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    Baseline1,
    Baseline2,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Baseline1, Scheme::Baseline2];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Baseline1 => "baseline1",
            Scheme::Baseline2 => "baseline2",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Maximum transmit power, dBm.
    PowerDbm,
    /// Interference tolerance of every PU, dBm.
    #[serde(rename = "p_tol_dbm")]
    PtolDbm,
    /// Number of IRS elements `m`.
    IrsElements,
    /// Number of BS antennas `n_t`.
    BsAntennas,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PowerDbm => "power_dbm",
            SweepAxis::PtolDbm => "p_tol_dbm",
            SweepAxis::IrsElements => "irs_elements",
            SweepAxis::BsAntennas => "bs_antennas",
        }
    }

    fn is_count(self) -> bool {
        matches!(self, SweepAxis::IrsElements | SweepAxis::BsAntennas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Budgets in dBm; converted to watts when a grid point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetDbm {
    pub p_max_dbm: f64,
    pub p_tol_dbm: f64,
}

impl Default for BudgetDbm {
    fn default() -> Self {
        Self {
            p_max_dbm: 20.0,
            p_tol_dbm: -90.0,
        }
    }
}

impl BudgetDbm {
    pub fn to_budgets(&self, i_users: usize) -> Result<BudgetConfig> {
        BudgetConfig::new(dbm_to_watts(self.p_max_dbm), vec![dbm_to_watts(self.p_tol_dbm); i_users])
    }
}

/// Outer-loop settings of the proposed scheme and baseline 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AoSettings {
    pub eps_ao: f64,
    pub max_iter: usize,
}

impl Default for AoSettings {
    fn default() -> Self {
        let d = AoConfig::default();
        Self {
            eps_ao: d.eps_ao,
            max_iter: d.max_iter,
        }
    }
}

fn default_dims() -> ScenarioDims {
    ScenarioDims {
        n_t: 4,
        m: 4,
        k_users: 2,
        i_users: 2,
    }
}

fn default_realizations() -> usize {
    50
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn default_failure_budget() -> usize {
    5
}

fn default_stem() -> String {
    "results".into()
}

/// A sweep as read from a TOML file. Only `[sweep]` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sweep: SweepConfig,
    #[serde(default = "default_dims")]
    pub dims: ScenarioDims,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub budgets: BudgetDbm,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Largest number of failed (realization, grid point, scheme) runs
    /// tolerated over the whole sweep.
    #[serde(default = "default_failure_budget")]
    pub failure_budget: usize,
    #[serde(default)]
    pub ao: AoSettings,
    /// Channels nulled by baseline 1's zero-forcing.
    #[serde(default)]
    pub baseline1_nulling: ZfNulling,
    /// Output directory; `None` means the current directory.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// File stem of the results and plot-script files.
    #[serde(default = "default_stem")]
    pub output_stem: String,
}

impl ExperimentConfig {
    pub fn new(sweep: SweepConfig) -> Self {
        Self {
            sweep,
            dims: default_dims(),
            geometry: GeometryConfig::default(),
            budgets: BudgetDbm::default(),
            schemes: default_schemes(),
            realizations: default_realizations(),
            base_seed: 0,
            failure_budget: default_failure_budget(),
            ao: AoSettings::default(),
            baseline1_nulling: ZfNulling::default(),
            output_dir: None,
            output_stem: default_stem(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.values.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes selected".into()));
        }
        if self.output_stem.is_empty() || self.output_stem.contains(['/', '\\']) {
            return Err(Error::Config(format!("bad output stem {:?}", self.output_stem)));
        }
        if !(0.0..1.0).contains(&self.ao.eps_ao) || self.ao.max_iter == 0 {
            return Err(Error::Config("ao.eps_ao must lie in [0, 1) and ao.max_iter be positive".into()));
        }
        self.geometry.validate()?;
        for &v in &self.sweep.values {
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite sweep value {v}")));
            }
            if self.sweep.axis.is_count() && (v < 0.0 || v.fract() != 0.0) {
                return Err(Error::Config(format!(
                    "{} values must be non-negative integers, got {v}",
                    self.sweep.axis.name()
                )));
            }
            let (dims, budgets) = self.point(v)?;
            budgets.validate()?;
            if self.schemes.contains(&Scheme::Baseline1) && dims.n_t < dims.k_users {
                return Err(Error::Config(format!(
                    "baseline1 needs n_t ≥ K, got n_t = {} at {} = {v}",
                    dims.n_t,
                    self.sweep.axis.name()
                )));
            }
        }
        Ok(())
    }

    /// Scenario dims and budgets at one grid value.
    pub fn point(&self, value: f64) -> Result<(ScenarioDims, BudgetConfig)> {
        let mut d = self.dims;
        let mut b = self.budgets;
        match self.sweep.axis {
            SweepAxis::PowerDbm => b.p_max_dbm = value,
            SweepAxis::PtolDbm => b.p_tol_dbm = value,
            SweepAxis::IrsElements => d.m = value as usize,
            SweepAxis::BsAntennas => d.n_t = value as usize,
        }
        let dims = ScenarioDims::new(d.n_t, d.m, d.k_users, d.i_users)?;
        Ok((dims, b.to_budgets(dims.i_users)?))
    }

    pub fn ao_config(&self, seed: u64) -> AoConfig {
        AoConfig {
            eps_ao: self.ao.eps_ao,
            max_iter: self.ao.max_iter,
            seed,
            ..AoConfig::default()
        }
    }

    pub fn seed(&self, realization: usize) -> u64 {
        self.base_seed.wrapping_add(realization as u64)
    }
}

/// Runs one scheme on one realization and returns its sum rate.
pub fn run_scheme(
    scheme: Scheme,
    r: &ScenarioRealization,
    budgets: &BudgetConfig,
    ao: &AoConfig,
    nulling: ZfNulling,
) -> Result<f64> {
    match scheme {
        Scheme::Proposed => optimize(&r.channels, budgets, ao).map(|o| o.sum_rate),
        Scheme::Baseline1 => {
            baseline1_zf(&r.channels, budgets, ao.seed, &ao.beam.conic, nulling).map(|o| o.sum_rate)
        },
        Scheme::Baseline2 => baseline2_no_irs(&r.channels, budgets, ao).map(|o| o.sum_rate),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub axis: SweepAxis,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub mean_sum_rate: f64,
    pub std_error: f64,
    /// Successful realizations averaged into the mean.
    pub realizations: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const RESULT_HEADER: [&str; 7] = [
    "axis",
    "sweep_value",
    "scheme",
    "mean_sum_rate",
    "std_error",
    "realizations",
    "failures",
];

impl ResultTable {
    pub fn row(&self, value: f64, scheme: Scheme) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.sweep_value == value && r.scheme == scheme)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(RESULT_HEADER).expect("in-memory write");
        for row in &self.rows {
            w.serialize(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Config(e.to_string()))?;
        if header.iter().ne(RESULT_HEADER) {
            return Err(Error::Config(format!("unexpected results header {header:?}")));
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ResultRow>, _>>()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { rows })
    }

    /// Matplotlib script drawing one labeled error-bar curve per scheme. The
    /// data are embedded, so the script runs without the results file.
    pub fn plot_script(&self) -> String {
        let mut out = String::from("import matplotlib.pyplot as plt\n\nfig, ax = plt.subplots()\n");
        let axis = self.rows.first().map_or("sweep_value", |r| r.axis.name());
        for scheme in Scheme::ALL {
            let rows: Vec<&ResultRow> = self.rows.iter().filter(|r| r.scheme == scheme).collect();
            if rows.is_empty() {
                continue;
            }
            let list = |f: &dyn Fn(&ResultRow) -> f64| {
                rows.iter().map(|r| format!("{:?}", f(r))).collect::<Vec<_>>().join(", ")
            };
            let _ = writeln!(
                out,
                "ax.errorbar([{}], [{}], yerr=[{}], marker=\"o\", capsize=3, label=\"{}\")",
                list(&|r| r.sweep_value),
                list(&|r| r.mean_sum_rate),
                list(&|r| r.std_error),
                scheme.name()
            );
        }
        let _ = writeln!(out, "ax.set_xlabel(\"{axis}\")");
        out.push_str("ax.set_ylabel(\"average sum rate (bits/s/Hz)\")\nax.grid(True)\nax.legend()\n");
        out.push_str("fig.tight_layout()\nfig.savefig(__file__.replace(\"_plot.py\", \".png\"))\n");
        out
    }

    /// Writes `<stem>.csv` and `<stem>_plot.py` into `dir`; returns both paths.
    pub fn emit(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let plot_path = dir.join(format!("{stem}_plot.py"));
        fs::write(&csv_path, self.to_csv())?;
        fs::write(&plot_path, self.plot_script())?;
        Ok((csv_path, plot_path))
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Per-scheme outcome of every realization at one grid value, in scheme order.
pub fn run_point(cfg: &ExperimentConfig, value: f64) -> Result<Vec<Vec<Result<f64>>>> {
    let (dims, budgets) = cfg.point(value)?;
    let per_realization = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed(r);
            let real = realize(&dims, &cfg.geometry, seed)?;
            let ao = cfg.ao_config(seed);
            Ok(cfg.schemes.iter().map(|&s| run_scheme(s, &real, &budgets, &ao, cfg.baseline1_nulling)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<Vec<Result<f64>>> = cfg.schemes.iter().map(|_| Vec::new()).collect();
    for row in per_realization {
        for (col, x) in columns.iter_mut().zip(row) {
            col.push(x);
        }
    }
    Ok(columns)
}

/// Mean and standard error over the successful runs; failures are logged and
/// counted.
pub fn summarize(axis: SweepAxis, value: f64, scheme: Scheme, results: Vec<Result<f64>>) -> ResultRow {
    let mut rates = Vec::with_capacity(results.len());
    let mut failures = 0;
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(rate) => rates.push(rate),
            Err(e) => {
                log::warn!("{} realization {r} at {} = {value}: {e}", scheme.name(), axis.name());
                failures += 1;
            }
        }
    }
    let (mean, se) = mean_and_se(&rates);
    ResultRow {
        axis,
        sweep_value: value,
        scheme,
        mean_sum_rate: mean,
        std_error: se,
        realizations: rates.len(),
        failures,
    }
}

/// The whole sweep. The sweep aborts once the failed runs exceed
/// `failure_budget`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let mut table = ResultTable::default();
    let mut failures = 0;
    for &value in &cfg.sweep.values {
        log::info!("{} = {value}: {} realizations", cfg.sweep.axis.name(), cfg.realizations);
        for (&scheme, results) in cfg.schemes.iter().zip(run_point(cfg, value)?) {
            let row = summarize(cfg.sweep.axis, value, scheme, results);
            failures += row.failures;
            if failures > cfg.failure_budget {
                return Err(Error::FailureBudget {
                    failures,
                    budget: cfg.failure_budget,
                });
            }
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// Everything computed for one realization by the `single` command.
#[derive(Debug, Clone)]
pub struct SingleReport {
    pub realization: ScenarioRealization,
    pub proposed: AoResult,
    pub baseline1: Option<f64>,
    pub baseline2: AoResult,
}

/// Runs all schemes on realization `seed` at the first grid value.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<SingleReport> {
    cfg.validate()?;
    let (dims, budgets) = cfg.point(cfg.sweep.values[0])?;
    let realization = realize(&dims, &cfg.geometry, seed)?;
    let ao = cfg.ao_config(seed);
    let proposed = optimize(&realization.channels, &budgets, &ao)?;
    let baseline1 = if dims.n_t >= dims.k_users {
        let nulling = cfg.baseline1_nulling;
        Some(baseline1_zf(&realization.channels, &budgets, seed, &ao.beam.conic, nulling)?.sum_rate)
    } else {
        None
    };
    let baseline2 = baseline2_no_irs(&realization.channels, &budgets, &ao)?;
    Ok(SingleReport {
        realization,
        proposed,
        baseline1,
        baseline2,
    })
}
