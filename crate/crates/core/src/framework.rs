//! Complexity-constrained rate and spectral-efficiency metrics.
//!
//! Rates are expressed in bits per microsecond (numerically equal to Mb/s)
//! and spectral efficiencies in b/s/Hz.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{CostUnits, Micros, ProcessingPower};

fn require_positive(what: &str, t: Micros) -> Result<()> {
    if !(t.0.is_finite() && t.0 > 0.0) {
        return Err(Error::domain(format!("{what} must be positive, got {t}")));
    }
    Ok(())
}

fn require_non_negative(what: &str, t: Micros) -> Result<()> {
    if !(t.0.is_finite() && t.0 >= 0.0) {
        return Err(Error::domain(format!(
            "{what} must be non-negative, got {t}"
        )));
    }
    Ok(())
}

/// Classic bit rate B / T_sym, in b/µs.
pub fn classic_rate(bits: u64, t_sym: Micros) -> Result<f64> {
    require_positive("symbol duration", t_sym)?;
    Ok(bits as f64 / t_sym.0)
}

/// Runtime of `work` instructions on a processor of the given throughput.
pub fn comp_time(work: CostUnits, power: ProcessingPower) -> Micros {
    Micros(work.as_f64() / power.inst_per_us())
}

/// Minimum throughput that finishes `work` within one symbol period.
pub fn required_power(work: CostUnits, t_sym: Micros) -> Result<ProcessingPower> {
    require_positive("symbol duration", t_sym)?;
    ProcessingPower::from_inst_per_us(work.as_f64() / t_sym.0)
}

/// SC bit rate B / (T_comp_tx + T_sym + T_comp_rx), in b/µs.
pub fn sc_rate(bits: u64, t_comp_tx: Micros, t_sym: Micros, t_comp_rx: Micros) -> Result<f64> {
    require_non_negative("transmitter runtime", t_comp_tx)?;
    require_non_negative("receiver runtime", t_comp_rx)?;
    require_positive("symbol duration", t_sym)?;
    Ok(bits as f64 / (t_comp_tx.0 + t_sym.0 + t_comp_rx.0))
}

/// Spectral efficiency of a rate given in b/µs over `w_hz` Hz.
pub fn sc_se(rate_bus: f64, w_hz: f64) -> Result<f64> {
    if !(w_hz.is_finite() && w_hz > 0.0) {
        return Err(Error::domain(format!(
            "bandwidth must be positive, got {w_hz} Hz"
        )));
    }
    Ok(rate_bus * 1e6 / w_hz)
}

/// SC efficiency when both runtimes sit exactly at the real-time limit
/// (T_comp_tx = T_comp_rx = T_sym): B / (3 (N + N_cp)).
///
/// Bits, not the SC rate, go in the numerator; that is the reading that
/// agrees with `sc_se(sc_rate(bits, T, T, T), W)`.
pub fn sc_se_simplified(bits: u64, n_fft: usize, n_cp: usize) -> f64 {
    bits as f64 / (3.0 * (n_fft + n_cp) as f64)
}

/// The same simplification with an SC rate (in b/s) in the numerator, as
/// the closed form is sometimes written. The result is in b/Hz-s², not a
/// spectral efficiency; it is exposed for comparison only.
pub fn sc_se_simplified_rate_form(sc_rate_bps: f64, n_fft: usize, n_cp: usize) -> f64 {
    sc_rate_bps / (3.0 * (n_fft + n_cp) as f64)
}

/// Per-waveform SC results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScMetrics {
    pub t_comp_tx_us: f64,
    pub t_comp_rx_us: f64,
    pub classic_rate_bus: f64,
    pub classic_se: f64,
    pub sc_rate_bus: f64,
    pub sc_se: f64,
}

impl ScMetrics {
    /// Evaluates every metric for one waveform given its runtimes.
    pub fn evaluate(
        bits: u64,
        t_comp_tx: Micros,
        t_sym: Micros,
        t_comp_rx: Micros,
        w_hz: f64,
    ) -> Result<Self> {
        let classic_rate_bus = classic_rate(bits, t_sym)?;
        let sc_rate_bus = sc_rate(bits, t_comp_tx, t_sym, t_comp_rx)?;
        Ok(ScMetrics {
            t_comp_tx_us: t_comp_tx.0,
            t_comp_rx_us: t_comp_rx.0,
            classic_rate_bus,
            classic_se: sc_se(classic_rate_bus, w_hz)?,
            sc_rate_bus,
            sc_se: sc_se(sc_rate_bus, w_hz)?,
        })
    }

    pub fn t_comp_tx(&self) -> Micros {
        Micros(self.t_comp_tx_us)
    }

    pub fn t_comp_rx(&self) -> Micros {
        Micros(self.t_comp_rx_us)
    }

    pub fn sc_rate_bps(&self) -> f64 {
        self.sc_rate_bus * 1e6
    }

    pub fn classic_rate_bps(&self) -> f64 {
        self.classic_rate_bus * 1e6
    }
}
