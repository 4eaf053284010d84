//! Complexity-constrained rate and spectral-efficiency analysis for OFDM,
//! OFDM with index modulation (OFDM-IM) and dual-mode OFDM (DM-OFDM).

pub mod baseband;
pub mod constellation;
pub mod error;
pub mod fft;
pub mod framework;
pub mod ixs;
pub mod pipeline;
pub mod report;
pub mod units;
pub mod waveform;

pub use baseband::{awgn_channel, receive, transmit, BasebandFrame, StageCostLedger, Transceiver};
pub use error::{Error, Result};
pub use framework::{
    classic_rate, comp_time, required_power, sc_rate, sc_se, sc_se_simplified, ScMetrics,
};
pub use ixs::{ActivationPattern, IndexSelector};
pub use pipeline::{
    run, run_with_costs, sweep, sweep_range, ComparisonMode, ComparisonReport, ComparisonRow,
    ComparisonScenario, PoolSet, SweepRange, SweepRow,
};
pub use report::{
    emit_plot_data, render_report, render_table_i, render_table_iii, RenderedRow, RenderedTable,
};
pub use units::{CostUnits, Micros, ProcessingPower};
pub use waveform::{
    bandwidth, binomial, bits_per_symbol, floor_log2_binom, rx_complexity, tx_complexity,
    IxsVariant, WaveformKind, WaveformSpec,
};

/// Revision of the cost model (complexity functions, ledger charging and
/// report rounding). Bumped whenever any of them changes numerically.
pub const COST_MODEL_REVISION: &str = "1";
