//! Waveform comparison under an equitable processing-resource pool.
//!
//! In model-driven mode the pipeline evaluates each waveform's transmitter
//! and receiver complexity, dimensions one pool per endpoint from the most
//! demanding waveform, grants that pool to every waveform and derives
//! runtimes and SC metrics from it. In measured mode the supplied runtimes
//! are used directly.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{required_power, ScMetrics};
use crate::units::{CostUnits, Micros};
use crate::waveform::{
    bits_per_symbol, rx_complexity, tx_complexity, IxsVariant, WaveformKind, WaveformSpec,
};

/// Relative tolerance when checking that specs share their numerology.
const SHARED_REL_TOL: f64 = 1e-12;

/// Scenario files shipped with the crate, by name.
pub const BUILTIN_SCENARIOS: [(&str, &str); 3] = [
    ("table_i", include_str!("../scenarios/table_i.json")),
    ("table_iii", include_str!("../scenarios/table_iii.json")),
    ("figures", include_str!("../scenarios/figures.json")),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonMode {
    #[default]
    #[serde(rename = "MODEL_DRIVEN")]
    ModelDriven,
    #[serde(rename = "MEASURED_RUNTIMES")]
    MeasuredRuntimes,
}

/// Per-symbol processing times, in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredRuntimes {
    pub t_comp_tx: f64,
    pub t_comp_rx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioWaveform {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub spec: WaveformSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<MeasuredRuntimes>,
}

impl ScenarioWaveform {
    pub fn new(spec: WaveformSpec) -> Self {
        ScenarioWaveform {
            label: None,
            spec,
            measured: None,
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.spec.label())
    }
}

/// FFT sizes to sweep: powers of two from `n_min` to `n_max`, multiplying by
/// `2^stride` at each step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "default_stride")]
    pub stride: u32,
    /// When set, each cell uses `n_data = ratio · N` rounded down to an even
    /// count (at least 2); otherwise `n_data = N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_subcarrier_ratio: Option<f64>,
}

fn default_stride() -> u32 {
    1
}

impl SweepRange {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        SweepRange {
            n_min,
            n_max,
            stride: 1,
            data_subcarrier_ratio: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, n) in [("n_min", self.n_min), ("n_max", self.n_max)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::spec(
                    field,
                    format!("sweep bounds must be powers of two >= 2, got {n}"),
                ));
            }
        }
        if self.n_min > self.n_max {
            return Err(Error::spec(
                "n_max",
                format!("{} is below n_min = {}", self.n_max, self.n_min),
            ));
        }
        if self.stride == 0 {
            return Err(Error::spec("stride", "must be positive"));
        }
        if let Some(r) = self.data_subcarrier_ratio {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::spec(
                    "data_subcarrier_ratio",
                    format!("must lie in (0, 1], got {r}"),
                ));
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        let mut n = self.n_min;
        while n <= self.n_max {
            sizes.push(n);
            match n.checked_shl(self.stride) {
                Some(next) if next > n => n = next,
                _ => break,
            }
        }
        sizes
    }

    pub fn n_data(&self, n: usize) -> usize {
        match self.data_subcarrier_ratio {
            None => n,
            Some(r) => {
                let raw = (n as f64 * r).floor() as usize;
                (raw - raw % 2).clamp(2.min(n), n)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonScenario {
    pub name: String,
    #[serde(default)]
    pub mode: ComparisonMode,
    pub waveforms: Vec<ScenarioWaveform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepRange>,
}

/// Which waveforms of a scenario take part in a comparison (and so define
/// the pool). OFDM is part of every set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolSet {
    #[default]
    All,
    Originals,
    Optimized,
}

impl PoolSet {
    pub fn admits(self, spec: &WaveformSpec) -> bool {
        match self {
            PoolSet::All => true,
            _ if spec.kind == WaveformKind::Ofdm => true,
            PoolSet::Originals => spec.variant == IxsVariant::Original,
            PoolSet::Optimized => spec.variant == IxsVariant::Optimized,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PoolSet::All => "all",
            PoolSet::Originals => "originals",
            PoolSet::Optimized => "optimized",
        }
    }
}

impl fmt::Display for PoolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PoolSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(PoolSet::All),
            "originals" | "original" => Ok(PoolSet::Originals),
            "optimized" => Ok(PoolSet::Optimized),
            _ => Err(Error::spec(
                "pool_set",
                format!("expected all, originals or optimized, got {s:?}"),
            )),
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= SHARED_REL_TOL * a.abs().max(b.abs())
}

impl ComparisonScenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let scenario: ComparisonScenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// One of [`BUILTIN_SCENARIOS`].
    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text) = BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Scenario(format!("no built-in scenario named {name:?}")))?;
        Self::from_json_str(text)
    }

    pub fn model_driven(name: &str, specs: Vec<WaveformSpec>) -> Result<Self> {
        let scenario = ComparisonScenario {
            name: name.to_string(),
            mode: ComparisonMode::ModelDriven,
            waveforms: specs.into_iter().map(ScenarioWaveform::new).collect(),
            sweep: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.waveforms.first().ok_or_else(|| {
            Error::Scenario(format!("scenario {:?} lists no waveforms", self.name))
        })?;
        for (i, w) in self.waveforms.iter().enumerate() {
            w.spec.validate()?;
            let (a, b) = (&first.spec, &w.spec);
            for (field, x, y) in [
                ("delta_f", a.delta_f, b.delta_f),
                ("t_sym", a.t_sym, b.t_sym),
                ("t_cp", a.t_cp, b.t_cp),
            ] {
                if !same(x, y) {
                    return Err(Error::Scenario(format!(
                        "waveform {i} ({}) has {field} = {y:e}, but waveform 0 has {x:e}; all waveforms must share it",
                        w.label()
                    )));
                }
            }
            match (self.mode, &w.measured) {
                (ComparisonMode::MeasuredRuntimes, None) => {
                    return Err(Error::Scenario(format!(
                        "waveform {i} ({}) has no measured runtimes, required in MEASURED_RUNTIMES mode",
                        w.label()
                    )));
                }
                (ComparisonMode::MeasuredRuntimes, Some(m)) => {
                    for (what, t) in [("t_comp_tx", m.t_comp_tx), ("t_comp_rx", m.t_comp_rx)] {
                        if !(t.is_finite() && t >= 0.0) {
                            return Err(Error::Scenario(format!(
                                "waveform {i} ({}): {what} must be a non-negative time, got {t}",
                                w.label()
                            )));
                        }
                        if Micros::from_secs(t).0 > w.spec.t_sym_us().0 {
                            return Err(Error::Scenario(format!(
                                "waveform {i} ({}): {what} = {t:e} s exceeds the symbol period {:e} s",
                                w.label(),
                                w.spec.t_sym
                            )));
                        }
                    }
                }
                (ComparisonMode::ModelDriven, Some(_)) => {
                    return Err(Error::Scenario(format!(
                        "waveform {i} ({}) carries measured runtimes but the scenario is MODEL_DRIVEN",
                        w.label()
                    )));
                }
                (ComparisonMode::ModelDriven, None) => {}
            }
        }
        if let Some(range) = &self.sweep {
            range.validate()?;
        }
        Ok(())
    }

    /// The sub-scenario admitted by `pool_set`.
    pub fn restricted(&self, pool_set: PoolSet) -> Result<Self> {
        let waveforms: Vec<ScenarioWaveform> = self
            .waveforms
            .iter()
            .filter(|w| pool_set.admits(&w.spec))
            .cloned()
            .collect();
        if waveforms.is_empty() {
            return Err(Error::Scenario(format!(
                "pool set {pool_set} leaves no waveforms in scenario {:?}",
                self.name
            )));
        }
        Ok(ComparisonScenario {
            waveforms,
            ..self.clone()
        })
    }

    fn t_sym_us(&self) -> Micros {
        self.waveforms[0].spec.t_sym_us()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub kind: WaveformKind,
    pub variant: IxsVariant,
    pub bits: u64,
    pub bandwidth_hz: f64,
    pub tx_complexity: Option<CostUnits>,
    pub rx_complexity: Option<CostUnits>,
    /// inst/µs
    pub required_i_tx: Option<f64>,
    pub required_i_rx: Option<f64>,
    pub pool_i_tx: Option<f64>,
    pub pool_i_rx: Option<f64>,
    pub t_comp_tx_us: f64,
    pub t_comp_rx_us: f64,
    pub sc_rate_bus: f64,
    pub sc_se: f64,
    pub classic_rate_bus: f64,
    pub classic_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub mode: ComparisonMode,
    pub t_sym_us: f64,
    pub rows: Vec<ComparisonRow>,
}

/// Runs the scenario with the closed-form complexity functions.
pub fn run(scenario: &ComparisonScenario) -> Result<ComparisonReport> {
    run_with_costs(scenario, |spec| {
        Ok((tx_complexity(spec)?, rx_complexity(spec)?))
    })
}

/// Runs the scenario with a caller-supplied (tx, rx) cost function.
pub fn run_with_costs<F>(scenario: &ComparisonScenario, cost: F) -> Result<ComparisonReport>
where
    F: Fn(&WaveformSpec) -> Result<(CostUnits, CostUnits)>,
{
    scenario.validate()?;
    let t_sym = scenario.t_sym_us();
    let rows = match scenario.mode {
        ComparisonMode::MeasuredRuntimes => scenario
            .waveforms
            .iter()
            .map(|w| {
                let m = w.measured.expect("validated");
                let metrics = ScMetrics::evaluate(
                    bits_per_symbol(&w.spec)?,
                    Micros::from_secs(m.t_comp_tx),
                    t_sym,
                    Micros::from_secs(m.t_comp_rx),
                    w.spec.bandwidth_hz(),
                )?;
                row(w, None, metrics)
            })
            .collect::<Result<Vec<_>>>()?,
        ComparisonMode::ModelDriven => {
            let costs = scenario
                .waveforms
                .iter()
                .map(|w| cost(&w.spec))
                .collect::<Result<Vec<_>>>()?;
            let pool_tx = costs.iter().map(|c| c.0).max().expect("non-empty");
            let pool_rx = costs.iter().map(|c| c.1).max().expect("non-empty");
            let pools = (
                required_power(pool_tx, t_sym)?,
                required_power(pool_rx, t_sym)?,
            );
            scenario
                .waveforms
                .iter()
                .zip(&costs)
                .map(|(w, &(tx, rx))| {
                    // work / pool, written so that the pool's own waveform lands on t_sym exactly
                    let t_tx = Micros(t_sym.0 * (tx.as_f64() / pool_tx.as_f64()));
                    let t_rx = Micros(t_sym.0 * (rx.as_f64() / pool_rx.as_f64()));
                    let metrics = ScMetrics::evaluate(
                        bits_per_symbol(&w.spec)?,
                        t_tx,
                        t_sym,
                        t_rx,
                        w.spec.bandwidth_hz(),
                    )?;
                    let model = ModelColumns {
                        tx,
                        rx,
                        required_tx: required_power(tx, t_sym)?.inst_per_us(),
                        required_rx: required_power(rx, t_sym)?.inst_per_us(),
                        pool_tx: pools.0.inst_per_us(),
                        pool_rx: pools.1.inst_per_us(),
                    };
                    row(w, Some(model), metrics)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ComparisonReport {
        scenario: scenario.name.clone(),
        mode: scenario.mode,
        t_sym_us: t_sym.0,
        rows,
    })
}

struct ModelColumns {
    tx: CostUnits,
    rx: CostUnits,
    required_tx: f64,
    required_rx: f64,
    pool_tx: f64,
    pool_rx: f64,
}

fn row(w: &ScenarioWaveform, model: Option<ModelColumns>, m: ScMetrics) -> Result<ComparisonRow> {
    Ok(ComparisonRow {
        label: w.label(),
        kind: w.spec.kind,
        variant: w.spec.variant,
        bits: bits_per_symbol(&w.spec)?,
        bandwidth_hz: w.spec.bandwidth_hz(),
        tx_complexity: model.as_ref().map(|c| c.tx),
        rx_complexity: model.as_ref().map(|c| c.rx),
        required_i_tx: model.as_ref().map(|c| c.required_tx),
        required_i_rx: model.as_ref().map(|c| c.required_rx),
        pool_i_tx: model.as_ref().map(|c| c.pool_tx),
        pool_i_rx: model.as_ref().map(|c| c.pool_rx),
        t_comp_tx_us: m.t_comp_tx_us,
        t_comp_rx_us: m.t_comp_rx_us,
        sc_rate_bus: m.sc_rate_bus,
        sc_se: m.sc_se,
        classic_rate_bus: m.classic_rate_bus,
        classic_se: m.classic_se,
    })
}

/// One (N, waveform) cell of a sweep. `variant` is `None` for OFDM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub waveform: WaveformKind,
    pub variant: Option<IxsVariant>,
    pub sc_rate_bus: f64,
    pub sc_se_bshz: f64,
}

impl SweepRow {
    pub fn variant_str(&self) -> &'static str {
        self.variant.map_or("NONE", IxsVariant::as_str)
    }
}

/// Sweeps the scenario over its own [`SweepRange`].
pub fn sweep(scenario: &ComparisonScenario) -> Result<Vec<SweepRow>> {
    let range = scenario.sweep.as_ref().ok_or_else(|| {
        Error::Scenario(format!("scenario {:?} has no sweep range", scenario.name))
    })?;
    sweep_range(scenario, range)
}

/// Runs the model-driven pipeline at every FFT size of `range`, each with
/// its own pool, re-dimensioning every waveform to the ideal IM setup at
/// that size. Rows are sorted by (n, waveform, variant).
pub fn sweep_range(scenario: &ComparisonScenario, range: &SweepRange) -> Result<Vec<SweepRow>> {
    range.validate()?;
    if scenario.mode != ComparisonMode::ModelDriven {
        return Err(Error::Scenario(
            "sweeps require a MODEL_DRIVEN scenario".into(),
        ));
    }
    let mut rows = Vec::new();
    for n in range.sizes() {
        let n_data = range.n_data(n);
        let specs = scenario
            .waveforms
            .iter()
            .map(|w| w.spec.resized_ideal(n, n_data))
            .collect::<Result<Vec<_>>>()?;
        let cell = ComparisonScenario::model_driven(&format!("{}@{n}", scenario.name), specs)?;
        let report = run(&cell)?;
        rows.extend(report.rows.into_iter().map(|r| SweepRow {
            n,
            waveform: r.kind,
            variant: r.kind.is_index_modulated().then_some(r.variant),
            sc_rate_bus: r.sc_rate_bus,
            sc_se_bshz: r.sc_se,
        }));
    }
    rows.sort_by_key(|r| (r.n, r.waveform, r.variant));
    Ok(rows)
}
