use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use scwave::framework::{sc_se_simplified, ScMetrics};
use scwave::ixs::IndexSelector;
use scwave::pipeline::BUILTIN_SCENARIOS;
use scwave::report::{plot_data_csv, table_i_from_report, table_iii_from_report};
use scwave::{
    awgn_channel, bits_per_symbol, render_report, render_table_i, render_table_iii, required_power,
    run, rx_complexity, sweep_range, tx_complexity, ComparisonScenario, IxsVariant, PoolSet,
    RenderedTable, SweepRange, Transceiver, WaveformKind, WaveformSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "scwave",
    about = "Complexity-constrained rate and SE analysis for OFDM, OFDM-IM and DM-OFDM"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory searched for scenario names that are not paths.
    #[arg(long, global = true, env = "SCWAVE_SCENARIO_DIR")]
    scenario_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bit budget, complexity and real-time requirements of one waveform.
    Analyze(WaveformArgs),
    /// Run a comparison scenario.
    Compare {
        /// Scenario file, or the name of a scenario in the scenario directory or built in.
        #[arg(long, default_value = "table_iii")]
        scenario: String,
        #[arg(long, default_value = "all")]
        pool_set: PoolSet,
    },
    /// Sweep a scenario over FFT sizes and emit plot-ready rows.
    Sweep {
        #[arg(long, default_value = "figures")]
        scenario: String,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value = "all")]
        pool_set: PoolSet,
    },
    /// Rank or unrank a subcarrier activation pattern.
    Mapper {
        #[command(subcommand)]
        op: MapperOp,
    },
    /// Push random frames through the transmitter/receiver chain.
    Simulate {
        #[command(flatten)]
        waveform: WaveformArgs,
        #[arg(long, default_value_t = 1)]
        frames: usize,
        /// Per-sample SNR of the AWGN channel.
        #[arg(long, conflicts_with = "noiseless", allow_hyphen_values = true)]
        snr_db: Option<f64>,
        /// Bypass the channel (the default when no SNR is given).
        #[arg(long)]
        noiseless: bool,
        /// Print one ledger line per frame before the summary.
        #[arg(long)]
        emit_ledger: bool,
    },
    /// Render one of the reference tables.
    Tables {
        #[arg(value_enum)]
        table: TableId,
    },
}

#[derive(Subcommand, Debug)]
enum MapperOp {
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated, strictly increasing positions.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        positions: Vec<usize>,
        #[arg(long, default_value = "original")]
        variant: IxsVariant,
    },
    Unrank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rank: String,
        #[arg(long, default_value = "original")]
        variant: IxsVariant,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TableId {
    I,
    Iii,
}

#[derive(Args, Debug)]
struct WaveformArgs {
    /// Waveform JSON file; overrides the flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value = "ofdm")]
    waveform: WaveformKind,
    #[arg(long, default_value = "original")]
    variant: IxsVariant,
    #[arg(long, default_value_t = 64)]
    n_fft: usize,
    /// Data subcarriers; defaults to n_fft.
    #[arg(long)]
    n_data: Option<usize>,
    /// Subcarrier spacing in Hz.
    #[arg(long, default_value_t = 312_500.0)]
    delta_f: f64,
    /// Guard interval in seconds.
    #[arg(long, default_value_t = 0.8e-6)]
    t_cp: f64,
}

impl WaveformArgs {
    fn spec(&self) -> anyhow::Result<WaveformSpec> {
        if let Some(path) = &self.spec {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()));
        }
        let n_data = self.n_data.unwrap_or(self.n_fft);
        Ok(WaveformSpec::ideal(
            self.waveform,
            self.variant,
            self.n_fft,
            n_data,
            self.delta_f,
            self.t_cp,
        )?)
    }
}

fn load_scenario(name: &str, dir: Option<&Path>) -> anyhow::Result<ComparisonScenario> {
    let direct = Path::new(name);
    if direct.is_file() {
        return ComparisonScenario::from_path(direct).with_context(|| format!("loading {name}"));
    }
    if let Some(dir) = dir {
        for candidate in [dir.join(name), dir.join(format!("{name}.json"))] {
            if candidate.is_file() {
                return ComparisonScenario::from_path(&candidate)
                    .with_context(|| format!("loading {}", candidate.display()));
            }
        }
    }
    if BUILTIN_SCENARIOS.iter().any(|(n, _)| *n == name) {
        return Ok(ComparisonScenario::builtin(name)?);
    }
    let builtins: Vec<&str> = BUILTIN_SCENARIOS.iter().map(|(n, _)| *n).collect();
    bail!(
        "scenario {name:?} is neither a file nor a known name (built in: {})",
        builtins.join(", ")
    )
}

fn table_output(table: &RenderedTable, format: OutputFormat) -> anyhow::Result<String> {
    Ok(match format {
        OutputFormat::Json => table.to_json()?,
        OutputFormat::Csv => table.to_csv()?,
    })
}

fn json_line(value: &serde_json::Value) -> String {
    serde_json::to_string(value).expect("serializable") + "\n"
}

fn analyze(args: &WaveformArgs, format: OutputFormat) -> anyhow::Result<String> {
    let spec = args.spec()?;
    let bits = bits_per_symbol(&spec)?;
    let t_sym = spec.t_sym_us();
    let (tx, rx) = (tx_complexity(&spec)?, rx_complexity(&spec)?);
    // alone in its pool, a waveform runs at the real-time limit
    let limit = ScMetrics::evaluate(bits, t_sym, t_sym, t_sym, spec.bandwidth_hz())?;
    let cp = spec.cp_len().ok();
    let fields: Vec<(&str, serde_json::Value)> = vec![
        ("label", json!(spec.label())),
        ("bits_per_symbol", json!(bits)),
        ("bandwidth_hz", json!(spec.bandwidth_hz())),
        ("t_sym_us", json!(t_sym.0)),
        ("cp_len", json!(cp)),
        ("tx_complexity_inst", json!(tx.0)),
        ("rx_complexity_inst", json!(rx.0)),
        (
            "required_i_tx_inst_per_us",
            json!(required_power(tx, t_sym)?.inst_per_us()),
        ),
        (
            "required_i_rx_inst_per_us",
            json!(required_power(rx, t_sym)?.inst_per_us()),
        ),
        ("classic_rate_bus", json!(limit.classic_rate_bus)),
        ("classic_se_bshz", json!(limit.classic_se)),
        ("sc_rate_at_limit_bus", json!(limit.sc_rate_bus)),
        ("sc_se_at_limit_bshz", json!(limit.sc_se)),
        (
            "sc_se_simplified_bshz",
            json!(cp.map(|cp| sc_se_simplified(bits, spec.n_fft, cp))),
        ),
    ];
    Ok(match format {
        OutputFormat::Json => {
            let object: serde_json::Map<String, serde_json::Value> = fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            serde_json::to_string_pretty(&json!({ "spec": spec, "analysis": object }))? + "\n"
        }
        OutputFormat::Csv => {
            let mut text = String::from("field,value\n");
            for (k, v) in fields {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Null => String::new(),
                    other => other.to_string(),
                };
                text.push_str(&format!("{k},{v}\n"));
            }
            text
        }
    })
}

fn mapper(op: &MapperOp) -> anyhow::Result<String> {
    let (n, k, variant) = match op {
        MapperOp::Rank { n, k, variant, .. } | MapperOp::Unrank { n, k, variant, .. } => {
            (*n, *k, *variant)
        }
    };
    let mut selector = IndexSelector::new(n, k, variant)?;
    let (positions, rank) = match op {
        MapperOp::Rank { positions, .. } => (positions.clone(), selector.rank(positions)?),
        MapperOp::Unrank { rank, .. } => {
            let rank: BigUint = rank
                .trim()
                .parse()
                .map_err(|_| anyhow!("rank {rank:?} is not a non-negative integer"))?;
            (selector.unrank(&rank)?.positions, rank)
        }
    };
    let value = json!({
        "n": n,
        "k": k,
        "variant": variant,
        "positions": positions,
        "rank": rank.to_string(),
        "index_bits": selector.index_bits(),
        "addressable": &rank < selector.addressable(),
        "steps": selector.steps().0,
    });
    Ok(json_line(&value))
}

fn simulate(
    args: &WaveformArgs,
    frames: usize,
    snr_db: Option<f64>,
    emit_ledger: bool,
    seed: u64,
) -> anyhow::Result<String> {
    let spec = args.spec()?;
    let mut trx = Transceiver::new(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let (mut bit_errors, mut detection_failures) = (0u64, 0u64);
    for frame_index in 0..frames {
        let bits: Vec<bool> = (0..trx.bits_per_symbol()).map(|_| rng.random()).collect();
        let noise_seed: u64 = rng.random();
        let (frame, tx) = trx.transmit(&bits)?;
        let received = match snr_db {
            Some(snr) => awgn_channel(&frame, snr, noise_seed)?,
            None => frame,
        };
        let (errors, rx, detected) = match trx.receive(&received) {
            Ok((decoded, rx)) => (
                decoded.iter().zip(&bits).filter(|(a, b)| a != b).count() as u64,
                Some(rx),
                true,
            ),
            Err(scwave::Error::Detection(_)) => (0, None, false),
            Err(e) => return Err(e.into()),
        };
        bit_errors += errors;
        detection_failures += u64::from(!detected);
        if emit_ledger {
            out.push_str(&json_line(&json!({
                "frame": frame_index,
                "tx": tx,
                "rx": rx,
                "tx_total": tx.total().0,
                "rx_total": rx.map(|r| r.total().0),
                "bit_errors": errors,
                "detected": detected,
            })));
        }
    }
    out.push_str(&json_line(&json!({
        "summary": true,
        "label": spec.label(),
        "frames": frames,
        "bits_per_frame": trx.bits_per_symbol(),
        "snr_db": snr_db,
        "seed": seed,
        "bit_errors": bit_errors,
        "detection_failures": detection_failures,
        "model_tx_complexity": tx_complexity(&spec)?.0,
        "model_rx_complexity": rx_complexity(&spec)?.0,
    })));
    Ok(out)
}

fn execute(cli: &Cli) -> anyhow::Result<String> {
    let format = cli.output;
    let dir = cli.scenario_dir.as_deref();
    match &cli.command {
        Command::Analyze(args) => analyze(args, format),
        Command::Compare { scenario, pool_set } => {
            let scenario = load_scenario(scenario, dir)?.restricted(*pool_set)?;
            let report = run(&scenario)?;
            match format {
                OutputFormat::Json => Ok(serde_json::to_string_pretty(&report)? + "\n"),
                OutputFormat::Csv => Ok(render_report(&report).to_csv()?),
            }
        }
        Command::Sweep {
            scenario,
            n_min,
            n_max,
            pool_set,
        } => {
            let scenario = load_scenario(scenario, dir)?.restricted(*pool_set)?;
            let base = scenario
                .sweep
                .clone()
                .unwrap_or_else(|| SweepRange::new(4, 1024));
            let range = SweepRange {
                n_min: n_min.unwrap_or(base.n_min),
                n_max: n_max.unwrap_or(base.n_max),
                ..base
            };
            let rows = sweep_range(&scenario, &range)?;
            match format {
                OutputFormat::Json => Ok(serde_json::to_string_pretty(&rows)? + "\n"),
                OutputFormat::Csv => Ok(plot_data_csv(&rows)?),
            }
        }
        Command::Mapper { op } => mapper(op),
        Command::Simulate {
            waveform,
            frames,
            snr_db,
            noiseless,
            emit_ledger,
        } => {
            if format == OutputFormat::Csv {
                bail!("simulate emits JSON lines only");
            }
            let snr = if *noiseless { None } else { *snr_db };
            simulate(waveform, *frames, snr, *emit_ledger, cli.seed)
        }
        Command::Tables { table } => {
            let rendered = match (table, dir) {
                (TableId::I, None) => render_table_i()?,
                (TableId::Iii, None) => render_table_iii()?,
                (TableId::I, Some(dir)) => {
                    table_i_from_report(&run(&load_scenario("table_i", Some(dir))?)?)
                }
                (TableId::Iii, Some(dir)) => {
                    table_iii_from_report(&run(&load_scenario("table_iii", Some(dir))?)?)
                }
            };
            table_output(&rendered, format)
        }
    }
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!(
            "{} (cost model revision {})",
            env!("CARGO_PKG_VERSION"),
            scwave::COST_MODEL_REVISION
        )
        .into_boxed_str(),
    );
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
