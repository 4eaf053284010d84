//! Table rendering and plot-data emission.
//!
//! Rounding policy for displayed numbers: integral values print without
//! decimals; everything else is truncated (not rounded) to two decimals.
//! Displayed SC rates are recomputed from the displayed runtimes, and
//! displayed spectral efficiencies from the displayed SC rates, so every
//! printed cell follows from the printed cells before it. Full-precision
//! values travel alongside the formatted strings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pipeline::{run, ComparisonReport, ComparisonRow, ComparisonScenario, SweepRow};

pub const DISPLAY_DECIMALS: u32 = 2;

pub const PLOT_HEADER: [&str; 5] = ["n", "waveform", "variant", "sc_rate_bus", "sc_se_bshz"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedRow {
    pub label: String,
    pub formatted: Vec<String>,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedTable {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<RenderedRow>,
}

/// Truncates toward zero at `decimals` places, treating values within
/// floating-point noise of the next grid point as on it (0.29 stays 0.29).
pub fn truncate_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x * scale;
    let nearest = scaled.round();
    let grid = if (scaled - nearest).abs() <= 1e-9 * scaled.abs().max(1.0) {
        nearest
    } else {
        scaled.trunc()
    };
    grid / scale
}

/// Formats a value that is already on the display grid.
pub fn format_display(x: f64, decimals: u32) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.prec$}", prec = decimals as usize)
    }
}

#[derive(Clone, Debug)]
struct Cell {
    formatted: String,
    value: Option<f64>,
}

impl Cell {
    /// A cell whose displayed value is `shown` and whose exact value is `exact`.
    fn shown(shown: f64, exact: f64) -> Self {
        Cell {
            formatted: format_display(shown, DISPLAY_DECIMALS),
            value: Some(exact),
        }
    }

    fn plain(exact: f64) -> Self {
        Cell::shown(truncate_to(exact, DISPLAY_DECIMALS), exact)
    }

    fn missing() -> Self {
        Cell {
            formatted: "-".to_string(),
            value: None,
        }
    }
}

/// The displayed chain of one report row.
struct Displayed {
    t_tx: f64,
    t_rx: f64,
    sc_rate: f64,
    sc_se: f64,
}

fn displayed(row: &ComparisonRow, t_sym_us: f64) -> Displayed {
    let t_tx = truncate_to(row.t_comp_tx_us, DISPLAY_DECIMALS);
    let t_rx = truncate_to(row.t_comp_rx_us, DISPLAY_DECIMALS);
    let t_sym = truncate_to(t_sym_us, DISPLAY_DECIMALS);
    let sc_rate = truncate_to(row.bits as f64 / (t_tx + t_sym + t_rx), DISPLAY_DECIMALS);
    let sc_se = truncate_to(sc_rate * 1e6 / row.bandwidth_hz, DISPLAY_DECIMALS);
    Displayed {
        t_tx,
        t_rx,
        sc_rate,
        sc_se,
    }
}

fn opt_cell(v: Option<f64>) -> Cell {
    v.map_or_else(Cell::missing, Cell::plain)
}

fn build_row(label: String, cells: Vec<Cell>) -> RenderedRow {
    RenderedRow {
        label,
        formatted: cells.iter().map(|c| c.formatted.clone()).collect(),
        values: cells.into_iter().map(|c| c.value).collect(),
    }
}

/// One row per waveform with every column of the report.
pub fn render_report(report: &ComparisonReport) -> RenderedTable {
    let headers = [
        "bits",
        "tx_complexity_inst",
        "rx_complexity_inst",
        "required_i_tx_inst_per_us",
        "required_i_rx_inst_per_us",
        "pool_i_tx_inst_per_us",
        "pool_i_rx_inst_per_us",
        "t_comp_tx_us",
        "t_comp_rx_us",
        "sc_rate_bus",
        "sc_se_bshz",
        "classic_rate_bus",
        "classic_se_bshz",
    ];
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let d = displayed(r, report.t_sym_us);
            build_row(
                r.label.clone(),
                vec![
                    Cell::plain(r.bits as f64),
                    opt_cell(r.tx_complexity.map(|c| c.as_f64())),
                    opt_cell(r.rx_complexity.map(|c| c.as_f64())),
                    opt_cell(r.required_i_tx),
                    opt_cell(r.required_i_rx),
                    opt_cell(r.pool_i_tx),
                    opt_cell(r.pool_i_rx),
                    Cell::shown(d.t_tx, r.t_comp_tx_us),
                    Cell::shown(d.t_rx, r.t_comp_rx_us),
                    Cell::shown(d.sc_rate, r.sc_rate_bus),
                    Cell::shown(d.sc_se, r.sc_se),
                    Cell::plain(r.classic_rate_bus),
                    Cell::plain(r.classic_se),
                ],
            )
        })
        .collect();
    RenderedTable {
        title: format!("Comparison report: {}", report.scenario),
        headers: headers.iter().map(|h| h.to_string()).collect(),
        rows,
    }
}

/// Measured-runtime table: one row per processor.
pub fn table_i_from_report(report: &ComparisonReport) -> RenderedTable {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let d = displayed(r, report.t_sym_us);
            build_row(
                r.label.clone(),
                vec![
                    Cell::shown(d.t_tx, r.t_comp_tx_us),
                    Cell::shown(d.t_rx, r.t_comp_rx_us),
                    Cell::shown(d.sc_rate, r.sc_rate_bus),
                    Cell::shown(d.sc_se, r.sc_se),
                ],
            )
        })
        .collect();
    RenderedTable {
        title: "Complexity-constrained throughput of an 802.11a symbol".to_string(),
        headers: ["t_comp_tx_us", "t_comp_rx_us", "sc_rate_bus", "sc_se_bshz"]
            .iter()
            .map(|h| h.to_string())
            .collect(),
        rows,
    }
}

/// Model-driven indicator table: one row per metric, one column per waveform.
pub fn table_iii_from_report(report: &ComparisonReport) -> RenderedTable {
    let shown: Vec<Displayed> = report
        .rows
        .iter()
        .map(|r| displayed(r, report.t_sym_us))
        .collect();
    let metric = |label: &str, cell: &dyn Fn(&ComparisonRow, &Displayed) -> Cell| {
        build_row(
            label.to_string(),
            report
                .rows
                .iter()
                .zip(&shown)
                .map(|(r, d)| cell(r, d))
                .collect(),
        )
    };
    let rows = vec![
        metric("tx_complexity_inst", &|r, _| {
            opt_cell(r.tx_complexity.map(|c| c.as_f64()))
        }),
        metric("rx_complexity_inst", &|r, _| {
            opt_cell(r.rx_complexity.map(|c| c.as_f64()))
        }),
        metric("required_i_tx_inst_per_us", &|r, _| {
            opt_cell(r.required_i_tx)
        }),
        metric("required_i_rx_inst_per_us", &|r, _| {
            opt_cell(r.required_i_rx)
        }),
        metric("t_comp_tx_us", &|r, d| Cell::shown(d.t_tx, r.t_comp_tx_us)),
        metric("t_comp_rx_us", &|r, d| Cell::shown(d.t_rx, r.t_comp_rx_us)),
        metric("sc_rate_bus", &|r, d| Cell::shown(d.sc_rate, r.sc_rate_bus)),
        metric("sc_se_bshz", &|r, d| Cell::shown(d.sc_se, r.sc_se)),
    ];
    RenderedTable {
        title: "SC performance indicators under an equitable resource pool".to_string(),
        headers: report.rows.iter().map(|r| r.label.clone()).collect(),
        rows,
    }
}

pub fn render_table_i() -> Result<RenderedTable> {
    Ok(table_i_from_report(&run(&ComparisonScenario::builtin(
        "table_i",
    )?)?))
}

pub fn render_table_iii() -> Result<RenderedTable> {
    Ok(table_iii_from_report(&run(&ComparisonScenario::builtin(
        "table_iii",
    )?)?))
}

impl RenderedTable {
    /// Formatted cells as CSV, first column `label`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once("label").chain(self.headers.iter().map(String::as_str)))?;
        for row in &self.rows {
            w.write_record(
                std::iter::once(row.label.as_str()).chain(row.formatted.iter().map(String::as_str)),
            )?;
        }
        Ok(csv_string(w))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// The row with the given label.
    pub fn row(&self, label: &str) -> Option<&RenderedRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("CSV built from UTF-8 fields")
}

/// Sweep rows as plot-ready CSV.
pub fn plot_data_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PLOT_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.waveform.as_str().to_string(),
            r.variant_str().to_string(),
            r.sc_rate_bus.to_string(),
            r.sc_se_bshz.to_string(),
        ])?;
    }
    Ok(csv_string(w))
}

/// Writes [`plot_data_csv`] to `path`.
pub fn emit_plot_data(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(plot_data_csv(rows)?.as_bytes())?;
    Ok(())
}
