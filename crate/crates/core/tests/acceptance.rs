//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scwave::framework::{
    classic_rate, comp_time, required_power, sc_rate, sc_se, sc_se_simplified,
};
use scwave::ixs::IndexSelector;
use scwave::pipeline::{sweep_range, SweepRange};
use scwave::report::{render_table_i, render_table_iii, RenderedTable};
use scwave::waveform::detection_cost;
use scwave::{
    bits_per_symbol, floor_log2_binom, CostUnits, IxsVariant, Micros, Transceiver, WaveformKind,
    WaveformSpec,
};

type Outcome = Result<String, String>;

/// (id, name, time budget, check)
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

const KINDS: [(WaveformKind, IxsVariant); 5] = [
    (WaveformKind::Ofdm, IxsVariant::Original),
    (WaveformKind::OfdmIm, IxsVariant::Original),
    (WaveformKind::OfdmIm, IxsVariant::Optimized),
    (WaveformKind::DmOfdm, IxsVariant::Original),
    (WaveformKind::DmOfdm, IxsVariant::Optimized),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Truncates to `decimals` places, snapping float noise onto the grid.
fn to_published_precision(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x * scale;
    let grid = if (scaled - scaled.round()).abs() < 1e-9 {
        scaled.round()
    } else {
        scaled.trunc()
    };
    grid / scale
}

fn decimals_of(published: &str) -> u32 {
    published
        .split_once('.')
        .map_or(0, |(_, frac)| frac.len() as u32)
}

/// Compares a rendered cell with a published figure: exact when the figure
/// is an integer, otherwise within `ulps` units of its last digit after
/// truncating the rendered value to the same precision.
fn check_cell(
    table: &RenderedTable,
    row: &str,
    col: usize,
    published: &str,
    ulps: f64,
) -> Result<(), String> {
    let r = table.row(row).ok_or_else(|| format!("missing row {row}"))?;
    let shown: f64 = r.formatted[col].parse().map_err(e2s)?;
    let want: f64 = published.parse().map_err(e2s)?;
    let d = decimals_of(published);
    let got = to_published_precision(shown, d);
    let ulp = 10f64.powi(-(d as i32));
    let ok = if ulps == 0.0 {
        shown == want
    } else {
        (got - want).abs() <= ulps * ulp + 1e-12
    };
    ensure(ok, || {
        format!(
            "{row}[{col}] = {} (as {got}), published {published}",
            r.formatted[col]
        )
    })
}

fn ac1_table_i() -> Outcome {
    let t = render_table_i().map_err(e2s)?;
    let rows = ["Processor A", "Processor B", "Ideal"];
    for (row, (rate, se)) in rows
        .iter()
        .zip([("33.8", "1.69"), ("36.7", "1.83"), ("72", "3.60")])
    {
        let r = t.row(row).ok_or("missing row")?;
        let shown_rate: f64 = r.formatted[2].parse().map_err(e2s)?;
        let shown_se: f64 = r.formatted[3].parse().map_err(e2s)?;
        let want_rate: f64 = rate.parse().unwrap();
        let want_se: f64 = se.parse().unwrap();
        ensure(
            (to_published_precision(shown_rate, decimals_of(rate)) - want_rate).abs()
                <= 0.1 + 1e-12,
            || format!("{row}: SC rate {shown_rate} vs {rate}"),
        )?;
        ensure((shown_se - want_se).abs() <= 0.01 + 1e-12, || {
            format!("{row}: SE {shown_se} vs {se}")
        })?;
    }
    let ideal = t.row("Ideal").unwrap();
    ensure(
        ideal.values[0] == Some(0.0) && ideal.values[1] == Some(0.0),
        || "ideal row has delays".into(),
    )?;
    Ok(format!(
        "rates {}/{}/{} b/us, SEs {}/{}/{} b/s/Hz",
        t.rows[0].formatted[2],
        t.rows[1].formatted[2],
        t.rows[2].formatted[2],
        t.rows[0].formatted[3],
        t.rows[1].formatted[3],
        t.rows[2].formatted[3]
    ))
}

fn ac2_table_iii() -> Outcome {
    let t = render_table_iii().map_err(e2s)?;
    let published: [(&str, [&str; 3]); 8] = [
        ("tx_complexity_inst", ["384", "4480", "4480"]),
        ("rx_complexity_inst", ["448", "4608", "4736"]),
        ("required_i_tx_inst_per_us", ["96", "1120", "1120"]),
        ("required_i_rx_inst_per_us", ["112", "1152", "1184"]),
        ("t_comp_tx_us", ["0.34", "4", "4"]),
        ("t_comp_rx_us", ["0.37", "3.89", "4"]),
        ("sc_rate_bus", ["10.19", "5.71", "7.6"]),
        ("sc_se_bshz", ["0.51", "0.28", "0.38"]),
    ];
    let mut exact = 0;
    let mut within_ulp = Vec::new();
    for (i, (row, cells)) in published.iter().enumerate() {
        for (col, cell) in cells.iter().enumerate() {
            let integer_row = i < 4;
            check_cell(&t, row, col, cell, if integer_row { 0.0 } else { 1.0 })?;
            let shown = &t.row(row).unwrap().formatted[col];
            let trimmed = to_published_precision(shown.parse().unwrap(), decimals_of(cell));
            if trimmed == cell.parse::<f64>().unwrap() {
                exact += 1;
            } else {
                within_ulp.push(format!("{row}[{col}] {shown} vs {cell}"));
            }
        }
    }
    Ok(format!(
        "{exact}/24 cells exact at published precision; within one last-digit unit: {}",
        if within_ulp.is_empty() {
            "none".to_string()
        } else {
            within_ulp.join(", ")
        }
    ))
}

fn ac3_combinatorics() -> Outcome {
    // independent oracle: Pascal's triangle in u64
    let mut row = vec![1u64];
    for _ in 0..48 {
        let mut next = vec![1u64; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    let c = row[24];
    let oracle = 63 - c.leading_zeros();
    ensure(c == 32_247_603_683_100, || format!("C(48,24) oracle = {c}"))?;
    let lib = floor_log2_binom(48, 24).map_err(e2s)?;
    ensure(lib == 44 && oracle == 44, || {
        format!("floor log2 C(48,24): library {lib}, oracle {oracle}")
    })?;
    let big = scwave::binomial(48, 24).map_err(e2s)?;
    ensure(big == BigUint::from(c), || {
        format!("big-integer C(48,24) = {big}")
    })?;
    let im = bits_per_symbol(&WaveformSpec::ieee80211a(
        WaveformKind::OfdmIm,
        IxsVariant::Original,
    ))
    .map_err(e2s)?;
    let dm = bits_per_symbol(&WaveformSpec::ieee80211a(
        WaveformKind::DmOfdm,
        IxsVariant::Original,
    ))
    .map_err(e2s)?;
    ensure(im == 24 + lib as u64 && im == 68, || {
        format!("OFDM-IM bits {im}")
    })?;
    ensure(dm == 48 + lib as u64 && dm == 92, || {
        format!("DM-OFDM bits {dm}")
    })?;
    Ok(format!(
        "C(48,24) = {c}, floor log2 = {lib}, numerators {im} and {dm}"
    ))
}

fn ac4_mapper_bijectivity() -> Outcome {
    let mut checked = 0u64;
    for variant in [IxsVariant::Original, IxsVariant::Optimized] {
        for n in 0..=16usize {
            for k in 0..=n {
                let mut sel = IndexSelector::new(n, k, variant).map_err(e2s)?;
                let total: u64 = sel.pattern_count().try_into().map_err(e2s)?;
                let addressable: u64 = sel.addressable().try_into().map_err(e2s)?;
                // every k-subset of 0..n as a bitmask, in lexicographic order of position lists
                let mut masks: Vec<u32> = (0u32..1 << n)
                    .filter(|m| m.count_ones() as usize == k)
                    .collect();
                masks.sort_by_key(|&m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>());
                ensure(masks.len() as u64 == total, || {
                    format!("C({n},{k}) mismatch")
                })?;
                for (r, m) in masks.iter().enumerate() {
                    let positions: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
                    let rank = sel.rank(&positions).map_err(e2s)?;
                    ensure(rank == BigUint::from(r as u64), || {
                        format!("rank of {positions:?} (n={n},k={k})")
                    })?;
                    if (r as u64) < addressable {
                        let back = sel.unrank(&rank).map_err(e2s)?;
                        ensure(back.positions == positions, || {
                            format!("unrank {r} (n={n},k={k},{variant})")
                        })?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} patterns ranked, all addressable ones unranked, both variants"
    ))
}

fn ac5_noiseless_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut frames = 0;
    for n in [8usize, 16, 64] {
        for (kind, variant) in KINDS {
            let spec = WaveformSpec::ideal(kind, variant, n, n, 312_500.0, 0.8e-6).map_err(e2s)?;
            let mut trx = Transceiver::new(&spec).map_err(e2s)?;
            for _ in 0..1000 {
                let bits: Vec<bool> = (0..trx.bits_per_symbol()).map(|_| rng.random()).collect();
                let (frame, _) = trx.transmit(&bits).map_err(e2s)?;
                ensure(frame.has_cyclic_prefix(), || {
                    format!("{} N={n}: CP property", spec.label())
                })?;
                let (back, _) = trx.receive(&frame).map_err(e2s)?;
                let errors = back.iter().zip(&bits).filter(|(a, b)| a != b).count();
                ensure(errors == 0 && back.len() == bits.len(), || {
                    format!("{} N={n}: {errors} bit errors", spec.label())
                })?;
                frames += 1;
            }
        }
    }
    Ok(format!("{frames} frames, 0 bit errors"))
}

fn n_log2_n(n: usize) -> u64 {
    let mut log = 0;
    let mut m = n;
    while m > 1 {
        m /= 2;
        log += 1;
    }
    (n * log) as u64
}

fn mean_steps(
    n: usize,
    variant: IxsVariant,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64, String> {
    let mut sel = IndexSelector::new(n, n / 2, variant).map_err(e2s)?;
    let mut total = 0u64;
    for _ in 0..trials {
        let bits: Vec<bool> = (0..sel.index_bits()).map(|_| rng.random()).collect();
        sel.step_counter_snapshot(true);
        let pattern = sel.map_bits(&bits).map_err(e2s)?;
        total += sel.step_counter_snapshot(true).0;
        sel.demap(&pattern.positions).map_err(e2s)?;
        total += sel.step_counter_snapshot(true).0;
    }
    Ok(total as f64 / (2 * trials) as f64)
}

fn ac6_ledger_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut n = 8;
    while n <= 1024 {
        for (kind, variant) in KINDS {
            let spec = WaveformSpec::ideal(kind, variant, n, n, 312_500.0, 0.8e-6).map_err(e2s)?;
            let mut trx = Transceiver::new(&spec).map_err(e2s)?;
            let bits: Vec<bool> = (0..trx.bits_per_symbol()).map(|_| rng.random()).collect();
            let (frame, tx) = trx.transmit(&bits).map_err(e2s)?;
            let (_, rx) = trx.receive(&frame).map_err(e2s)?;
            let per_subcarrier = match kind {
                WaveformKind::Ofdm => 1,
                WaveformKind::OfdmIm => 2,
                WaveformKind::DmOfdm => 4,
            };
            ensure(tx.ifft_units == CostUnits(n_log2_n(n)), || {
                format!("{} N={n}: ifft {}", spec.label(), tx.ifft_units)
            })?;
            ensure(rx.fft_units == CostUnits(n_log2_n(n)), || {
                format!("{} N={n}: fft {}", spec.label(), rx.fft_units)
            })?;
            ensure(
                rx.detect_units == CostUnits(per_subcarrier * n as u64),
                || format!("{} N={n}: detect {}", spec.label(), rx.detect_units),
            )?;
            ensure(rx.detect_units == detection_cost(&spec), || {
                "detection model mismatch".into()
            })?;
            ensure(
                (kind == WaveformKind::Ofdm) == (tx.ixs_units == CostUnits::ZERO),
                || format!("{} N={n}: ixs {}", spec.label(), tx.ixs_units),
            )?;
        }
        n *= 2;
    }
    let mut summary = Vec::new();
    for (variant, target) in [(IxsVariant::Original, 4.0), (IxsVariant::Optimized, 2.0)] {
        let means = [16usize, 32, 64, 128]
            .iter()
            .map(|&n| mean_steps(n, variant, 40, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
        for r in &ratios {
            ensure((r - target).abs() <= 0.25 * target, || {
                format!("{variant}: growth ratios {ratios:.3?}")
            })?;
        }
        summary.push(format!(
            "{variant} x{}",
            ratios
                .iter()
                .map(|r| format!("{r:.2}"))
                .collect::<Vec<_>>()
                .join("/")
        ));
    }
    Ok(format!(
        "FFT/detect exact for N=8..1024; growth {}",
        summary.join(", ")
    ))
}

fn ac7_framework_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let bits: u64 = rng.random_range(0..1_000_000);
        let t = Micros(rng.random_range(0.01..1e4));
        let a = sc_rate(bits, Micros::ZERO, t, Micros::ZERO).map_err(e2s)?;
        let b = classic_rate(bits, t).map_err(e2s)?;
        ensure(a == b, || format!("sc_rate({bits},0,{t},0) = {a} != {b}"))?;
        let work = CostUnits(rng.random_range(1..100_000_000));
        let p = required_power(work, t).map_err(e2s)?;
        let back = comp_time(work, p).0;
        ensure((back - t.0).abs() / t.0 < 1e-12, || {
            format!("comp_time(required_power) = {back} vs {t}")
        })?;
    }
    let mut worst = 0f64;
    let mut n = 4;
    while n <= 1024 {
        for (kind, variant) in KINDS {
            let spec = WaveformSpec::ieee80211a(kind, variant)
                .resized_ideal(n, n)
                .map_err(e2s)?;
            let bits = bits_per_symbol(&spec).map_err(e2s)?;
            let t = spec.t_sym_us();
            let general =
                sc_se(sc_rate(bits, t, t, t).map_err(e2s)?, spec.bandwidth_hz()).map_err(e2s)?;
            let simplified = sc_se_simplified(bits, n, spec.cp_len().map_err(e2s)?);
            let rel = (general - simplified).abs() / simplified.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            ensure(rel < 1e-9, || {
                format!(
                    "{} N={n}: general {general} vs simplified {simplified}",
                    spec.label()
                )
            })?;
        }
        n *= 2;
    }
    Ok(format!(
        "10000 random identity checks; simplified SCE worst rel. err {worst:.1e} over N=4..1024"
    ))
}

fn ac8_figure_orderings() -> Outcome {
    let scenario = scwave::ComparisonScenario::builtin("figures").map_err(e2s)?;
    let range = SweepRange {
        data_subcarrier_ratio: Some(0.75),
        ..SweepRange::new(64, 64)
    };
    let rows = sweep_range(&scenario, &range).map_err(e2s)?;
    let get = |kind, variant| {
        rows.iter()
            .find(|r| r.waveform == kind && r.variant == variant)
            .map(|r| r.sc_rate_bus)
            .ok_or_else(|| format!("missing {kind:?} {variant:?}"))
    };
    let ofdm = get(WaveformKind::Ofdm, None)?;
    let im = get(WaveformKind::OfdmIm, Some(IxsVariant::Original))?;
    let dm = get(WaveformKind::DmOfdm, Some(IxsVariant::Original))?;
    let dm_opt = get(WaveformKind::DmOfdm, Some(IxsVariant::Optimized))?;
    ensure(ofdm > im && ofdm > dm, || {
        format!("OFDM {ofdm} vs IM {im}, DM {dm}")
    })?;
    ensure(dm_opt > ofdm, || format!("DM-opt {dm_opt} vs OFDM {ofdm}"))?;
    ensure((dm_opt - 18.4).abs() <= 0.02 * 18.4, || {
        format!("DM-opt {dm_opt} vs 18.4")
    })?;
    ensure((ofdm - 10.2).abs() <= 0.02 * 10.2, || {
        format!("OFDM {ofdm} vs 10.2")
    })?;
    Ok(format!(
        "OFDM {ofdm:.3} > IM-orig {im:.3}, DM-orig {dm:.3}; DM-opt {dm_opt:.3} > OFDM"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "AC1",
            "Table I reproduction",
            Duration::from_secs(1),
            ac1_table_i,
        ),
        (
            "AC2",
            "Table III reproduction",
            Duration::from_secs(1),
            ac2_table_iii,
        ),
        (
            "AC3",
            "combinatorial oracle",
            Duration::MAX,
            ac3_combinatorics,
        ),
        (
            "AC4",
            "mapper bijectivity",
            Duration::from_secs(30),
            ac4_mapper_bijectivity,
        ),
        (
            "AC5",
            "noiseless end-to-end identity",
            Duration::from_secs(60),
            ac5_noiseless_identity,
        ),
        (
            "AC6",
            "cost-model/ledger agreement",
            Duration::MAX,
            ac6_ledger_agreement,
        ),
        (
            "AC7",
            "framework identities",
            Duration::MAX,
            ac7_framework_identities,
        ),
        (
            "AC8",
            "figure-claim orderings",
            Duration::MAX,
            ac8_figure_orderings,
        ),
    ];
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:.0?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("[FAIL] {id} {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
