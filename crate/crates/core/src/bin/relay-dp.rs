use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use relay_dp::experiment::{selftest, ExperimentSpec, PRESETS};
use relay_dp::Result;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Optimal multi-user multi-hop relay selection: outage and complexity
/// experiments.
#[derive(Debug, Parser)]
#[command(name = "relay-dp", version)]
struct Cli {
    /// Start from a named experiment preset (see --list-presets).
    #[arg(long)]
    preset: Option<String>,

    /// Flat `key = value` config file, applied after the preset.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Extra `key=value` setting, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    settings: Vec<String>,

    /// Selection scheme; repeat for several (optimal, exhaustive, greedy,
    /// hop-greedy, drs).
    #[arg(long = "scheme")]
    schemes: Vec<String>,

    /// Time slots per point (instances per point for complexity runs).
    #[arg(long)]
    slots: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Sweep axis: tx_power_dbm, L, M or N.
    #[arg(long)]
    axis: Option<String>,

    /// Axis values, `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,

    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Worker threads for the slot loop.
    #[arg(long)]
    threads: Option<usize>,

    /// Replay a large-scale realization from CSV (hop,tx,rx,attenuation).
    #[arg(long)]
    load_large_scale: Option<PathBuf>,

    /// Write the sampled large-scale realization as CSV.
    #[arg(long)]
    dump_large_scale: Option<PathBuf>,

    /// Check the dynamic program against exhaustive search on 100 random
    /// small networks and exit.
    #[arg(long)]
    selftest: bool,

    #[arg(long)]
    list_presets: bool,

    /// Print the resolved settings in config-file syntax and exit.
    #[arg(long)]
    print_config: bool,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.preset {
        Some(name) => ExperimentSpec::preset(name)?,
        None => ExperimentSpec::default(),
    };
    if let Some(path) = &cli.config {
        spec.apply_config_file(path)?;
    }
    for s in &cli.settings {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| relay_dp::Error::Invalid(format!("--set expects KEY=VALUE, got `{s}`")))?;
        spec.set(key, value)?;
    }
    if !cli.schemes.is_empty() {
        spec.set("schemes", &cli.schemes.join(","))?;
    }
    if let Some(n) = cli.slots {
        spec.n_slots = n;
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(axis) = &cli.axis {
        spec.set("axis", axis)?;
    }
    if let Some(values) = &cli.values {
        spec.set("values", values)?;
    }
    if let Some(out) = &cli.out {
        spec.output = Some(out.clone());
    }
    if let Some(format) = cli.format {
        spec.set("format", &format!("{format:?}"))?;
    }
    if let Some(path) = &cli.load_large_scale {
        spec.large_scale_input = Some(path.clone());
    }
    if let Some(path) = &cli.dump_large_scale {
        spec.large_scale_output = Some(path.clone());
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.list_presets {
        for (name, about) in PRESETS {
            println!("{name:<14} {about}");
        }
        return Ok(true);
    }
    if cli.selftest {
        let report = selftest(100, cli.seed.unwrap_or(1))?;
        for f in &report.failures {
            eprintln!("FAIL {f}");
        }
        println!(
            "selftest: {}/{} instances passed",
            report.instances - report.failures.len().min(report.instances),
            report.instances
        );
        return Ok(report.passed());
    }

    let spec = build_spec(cli)?;
    if cli.print_config {
        print!("{}", spec.to_config_string());
        return Ok(true);
    }
    let result = spec.run()?;
    match &spec.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            result.write(spec.format, &mut w)?;
            w.flush()?;
            for line in result.summary() {
                println!("{line}");
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            result.write(spec.format, &mut w)?;
            w.flush()?;
            for line in result.summary() {
                eprintln!("{line}");
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("relay-dp: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("relay-dp: {e}");
            ExitCode::from(2)
        }
    }
}
