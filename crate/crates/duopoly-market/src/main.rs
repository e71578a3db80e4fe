//! Command-line driver for the duopoly-market testbed.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use duopoly_market::acceptance::{self, AcceptanceOptions};
use duopoly_market::attack::AttackKind;
use duopoly_market::experiment::{
    apply_override, emit_report, matrix_csv, matrix_display, run_matrix, ExperimentSpec,
};
use duopoly_market::models::Defense;
use duopoly_market::sim::{run_simulation, SimulationConfig};

#[derive(Parser)]
#[command(
    name = "duopoly-market",
    about = "Duopoly-market testbed: trust models vs unfair-rating attacks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single (model, attack) cell and print its robustness.
    Run {
        /// Defense name: BRS, iCLUB, TRAVOS, Personalized or a combination
        /// like TRAVOS+BRS (the order decides the pipeline).
        #[arg(long)]
        model: String,
        /// Attack name: Constant, Camouflage, Whitewashing, Sybil,
        /// SybilCamouflage, SybilWhitewashing.
        #[arg(long)]
        attack: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the per-day cumulative volume series to the output directory.
        #[arg(long)]
        series: bool,
        /// Output directory (default: $DUOPOLY_MARKET_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flat key=value config file applied before --param overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Parameter override, e.g. --param brs_q=0.05 (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run a (model x attack) matrix over seeded runs and emit report files.
    Matrix {
        /// Comma-separated defense names (default: all twelve).
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        /// Comma-separated attack names (default: all six).
        #[arg(long, value_delimiter = ',')]
        attacks: Option<Vec<String>>,
        #[arg(long, default_value_t = 50)]
        runs: u32,
        /// Base seed; run k of a cell uses seed base+k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one per-day volume series file per run.
        #[arg(long)]
        series: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run the acceptance suite: one pass/fail line per criterion.
    Verify {
        #[arg(long, default_value_t = 50)]
        runs: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("DUOPOLY_MARKET_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Read a flat key-value TOML document into override pairs.
fn load_config(path: &PathBuf) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let table: toml::Table = text
        .parse()
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    let mut pairs = Vec::new();
    for (key, value) in table {
        let rendered = match value {
            toml::Value::String(s) => s,
            other => other.to_string(),
        };
        pairs.push((key, rendered));
    }
    Ok(pairs)
}

fn split_param(raw: &str) -> Result<(String, String)> {
    match raw.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => bail!("--param expects KEY=VALUE, got '{raw}'"),
    }
}

/// Apply config-file pairs and --param overrides onto a template config.
/// `defense` and `attack` keys are allowed in files and returned separately.
fn apply_overrides(
    cfg: &mut SimulationConfig,
    config: &Option<PathBuf>,
    params: &[String],
) -> Result<()> {
    let mut pairs = Vec::new();
    if let Some(path) = config {
        pairs.extend(load_config(path)?);
    }
    for raw in params {
        pairs.push(split_param(raw)?);
    }
    for (key, value) in pairs {
        match key.as_str() {
            "defense" | "model" => {
                cfg.defense = value.parse::<Defense>().map_err(anyhow::Error::msg)?
            }
            "attack" => cfg.attack = value.parse::<AttackKind>().map_err(anyhow::Error::msg)?,
            _ => apply_override(cfg, &key, &value).map_err(anyhow::Error::msg)?,
        }
    }
    Ok(())
}

fn parse_defenses(names: Option<Vec<String>>) -> Result<Vec<Defense>> {
    match names {
        None => Ok(Defense::all()),
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Defense>().map_err(anyhow::Error::msg))
            .collect(),
    }
}

fn parse_attacks(names: Option<Vec<String>>) -> Result<Vec<AttackKind>> {
    match names {
        None => Ok(AttackKind::ALL.to_vec()),
        Some(names) => names
            .iter()
            .map(|n| n.parse::<AttackKind>().map_err(anyhow::Error::msg))
            .collect(),
    }
}

fn cmd_run(
    model: String,
    attack: String,
    seed: u64,
    series: bool,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
    params: Vec<String>,
) -> Result<()> {
    let defense: Defense = model.parse().map_err(anyhow::Error::msg)?;
    let attack: AttackKind = attack.parse().map_err(anyhow::Error::msg)?;
    let mut cfg = SimulationConfig::for_attack(defense, attack, seed);
    apply_overrides(&mut cfg, &config, &params)?;
    cfg.seed = seed;

    let run = run_simulation(&cfg)?;
    let r = &run.result;
    println!("defense       {defense}");
    println!("attack        {attack}");
    println!("seed          {seed}");
    println!("tran_honest   {}", r.tran_honest);
    println!("tran_dishonest {}", r.tran_dishonest);
    println!("denominator   {}", r.denominator);
    println!("robustness    {:.4}", r.robustness);

    if series {
        let dir = out_dir(out);
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(format!("{defense}_{attack}_seed{seed}.csv"));
        let mut body = String::from("day,cumulative_tran_h,cumulative_tran_d\n");
        for v in &r.series {
            body.push_str(&format!("{},{},{}\n", v.day, v.honest, v.dishonest));
        }
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        println!("series        {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_matrix(
    models: Option<Vec<String>>,
    attacks: Option<Vec<String>>,
    runs: u32,
    seed: u64,
    out: Option<PathBuf>,
    series: bool,
    config: Option<PathBuf>,
    params: Vec<String>,
) -> Result<()> {
    let mut spec = ExperimentSpec::new(parse_defenses(models)?, parse_attacks(attacks)?, runs, seed);
    apply_overrides(&mut spec.template, &config, &params)?;
    spec.write_series = series;

    let matrix = run_matrix(&spec)?;
    print!("{}", matrix_display(&matrix));

    let dir = out_dir(out);
    let written = emit_report(&matrix, &spec, &dir)?;
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    let _ = matrix_csv(&matrix, &spec);
    Ok(())
}

fn cmd_verify(runs: u32, seed: u64) -> Result<bool> {
    let results = acceptance::run_all(AcceptanceOptions { runs, base_seed: seed });
    print!("{}", acceptance::format_report(&results));
    Ok(results.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { model, attack, seed, series, out, config, params } => {
            cmd_run(model, attack, seed, series, out, config, params).map(|()| true)
        }
        Command::Matrix { models, attacks, runs, seed, out, series, config, params } => {
            cmd_matrix(models, attacks, runs, seed, out, series, config, params).map(|()| true)
        }
        Command::Verify { runs, seed } => cmd_verify(runs, seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
