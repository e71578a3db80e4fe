//! Batch driver: runs the (defense x attack) matrix over many seeds,
//! aggregates the robustness values and emits table-shaped reports.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::attack::AttackKind;
use crate::models::Defense;
use crate::sim::{run_simulation, DayVolumes, SimError, SimulationConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub defenses: Vec<Defense>,
    pub attacks: Vec<AttackKind>,
    pub runs: u32,
    pub base_seed: u64,
    /// Template for per-cell configs; defense, attack, populations and seed
    /// are overwritten per cell and run.
    pub template: SimulationConfig,
    pub write_series: bool,
}

impl ExperimentSpec {
    pub fn new(defenses: Vec<Defense>, attacks: Vec<AttackKind>, runs: u32, base_seed: u64) -> Self {
        ExperimentSpec {
            defenses,
            attacks,
            runs,
            base_seed,
            template: SimulationConfig::for_attack(
                Defense::Single(crate::models::SingleModel::Brs),
                AttackKind::Constant,
                0,
            ),
            write_series: false,
        }
    }

    /// The paper-shaped full experiment: all twelve defenses, all six attacks,
    /// fifty seeded runs each.
    pub fn full_matrix(base_seed: u64) -> Self {
        ExperimentSpec::new(Defense::all(), AttackKind::ALL.to_vec(), 50, base_seed)
    }

    /// Resolve the concrete simulation config of one (cell, run).
    pub fn cell_config(&self, defense: Defense, attack: AttackKind, run: u32) -> SimulationConfig {
        let mut cfg = self.template.clone();
        cfg.defense = defense;
        cfg.attack = attack;
        let (honest, attackers) = crate::attack::population_for(attack);
        cfg.honest_buyers = honest;
        cfg.attackers = attackers;
        cfg.seed = self.base_seed + run as u64;
        cfg
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.defenses.is_empty() {
            return Err(ExperimentError::EmptySelection("defenses"));
        }
        if self.attacks.is_empty() {
            return Err(ExperimentError::EmptySelection("attacks"));
        }
        if self.runs == 0 {
            return Err(ExperimentError::NoRuns);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("no {0} selected")]
    EmptySelection(&'static str),
    #[error("runs must be at least 1")]
    NoRuns,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Mean and sample standard deviation of the robustness values of one
/// (defense, attack) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableCell {
    pub mean: f64,
    pub std: f64,
    pub runs: u32,
}

impl TableCell {
    fn from_values(values: &[f64]) -> TableCell {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            var.sqrt()
        };
        TableCell {
            mean,
            std,
            runs: n as u32,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixResult {
    pub defenses: Vec<Defense>,
    pub attacks: Vec<AttackKind>,
    /// `cells[d][a]` pairs with `defenses[d]` and `attacks[a]`.
    pub cells: Vec<Vec<TableCell>>,
    /// Raw per-run robustness values in seed order, `values[d][a][run]`.
    pub values: Vec<Vec<Vec<f64>>>,
}

impl MatrixResult {
    pub fn cell(&self, defense: Defense, attack: AttackKind) -> Option<&TableCell> {
        let d = self.defenses.iter().position(|&x| x == defense)?;
        let a = self.attacks.iter().position(|&x| x == attack)?;
        Some(&self.cells[d][a])
    }
}

/// Run every (defense, attack, seed) combination. Cells are evaluated in
/// parallel; results land by index, so the outcome does not depend on the
/// parallelism degree or scheduling order.
pub fn run_matrix(spec: &ExperimentSpec) -> Result<MatrixResult, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize, u32)> = (0..spec.defenses.len())
        .flat_map(|d| {
            (0..spec.attacks.len()).flat_map(move |a| (0..spec.runs).map(move |r| (d, a, r)))
        })
        .collect();

    let outcomes: Result<Vec<f64>, SimError> = jobs
        .par_iter()
        .map(|&(d, a, r)| {
            let cfg = spec.cell_config(spec.defenses[d], spec.attacks[a], r);
            run_simulation(&cfg).map(|run| run.result.robustness)
        })
        .collect();
    let outcomes = outcomes?;

    let mut values =
        vec![vec![vec![0.0f64; spec.runs as usize]; spec.attacks.len()]; spec.defenses.len()];
    for (&(d, a, r), &rob) in jobs.iter().zip(&outcomes) {
        values[d][a][r as usize] = rob;
    }
    let cells = values
        .iter()
        .map(|row| row.iter().map(|v| TableCell::from_values(v)).collect())
        .collect();

    Ok(MatrixResult {
        defenses: spec.defenses.clone(),
        attacks: spec.attacks.clone(),
        cells,
        values,
    })
}

/// Per-run cumulative duopoly volume series for one cell, in seed order.
pub fn collect_series(
    spec: &ExperimentSpec,
    defense: Defense,
    attack: AttackKind,
) -> Result<Vec<Vec<DayVolumes>>, ExperimentError> {
    let runs: Result<Vec<Vec<DayVolumes>>, SimError> = (0..spec.runs)
        .into_par_iter()
        .map(|r| {
            let cfg = spec.cell_config(defense, attack, r);
            run_simulation(&cfg).map(|run| run.result.series)
        })
        .collect();
    Ok(runs?)
}

/// Format with four significant digits: the stable golden-file precision.
pub fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0.000".to_string();
    }
    let order = x.abs().log10().floor() as i32;
    let decimals = (3 - order).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The delimited matrix table: one row per cell with a fixed column order.
pub fn matrix_csv(matrix: &MatrixResult, spec: &ExperimentSpec) -> String {
    let mut out = String::from("defense,attack,mean,std,runs,denominator\n");
    for (d, &defense) in matrix.defenses.iter().enumerate() {
        for (a, &attack) in matrix.attacks.iter().enumerate() {
            let cell = &matrix.cells[d][a];
            let denominator = spec.cell_config(defense, attack, 0).denominator();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                defense,
                attack,
                sig4(cell.mean),
                sig4(cell.std),
                cell.runs,
                sig4(denominator),
            )
            .unwrap();
        }
    }
    out
}

/// Render the table the way the report prints it: defenses as rows, attacks as
/// columns, `mean±std` entries.
pub fn matrix_display(matrix: &MatrixResult) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<22}", "defense");
    for attack in &matrix.attacks {
        let _ = write!(out, "{:>16}", attack.to_string());
    }
    out.push('\n');
    for (d, defense) in matrix.defenses.iter().enumerate() {
        let _ = write!(out, "{:<22}", defense.to_string());
        for cell in &matrix.cells[d] {
            let _ = write!(out, "{:>16}", format!("{:.2}±{:.2}", cell.mean, cell.std));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    spec: &'a ExperimentSpec,
    matrix: &'a MatrixResult,
}

/// Write the matrix file, the resolved-configuration summary and, when asked,
/// per-run series files. Rerunning an identical spec produces byte-identical
/// files.
pub fn emit_report(
    matrix: &MatrixResult,
    spec: &ExperimentSpec,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    spec.validate()?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();

    let csv_path = out_dir.join("matrix.csv");
    fs::write(&csv_path, matrix_csv(matrix, spec)).map_err(io_err(&csv_path))?;
    written.push(csv_path);

    let summary_path = out_dir.join("summary.json");
    let summary = serde_json::to_string_pretty(&Summary { spec, matrix })
        .expect("summary serializes");
    fs::write(&summary_path, summary).map_err(io_err(&summary_path))?;
    written.push(summary_path);

    if spec.write_series {
        let series_dir = out_dir.join("series");
        fs::create_dir_all(&series_dir).map_err(io_err(&series_dir))?;
        for &defense in &spec.defenses {
            for &attack in &spec.attacks {
                let runs = collect_series(spec, defense, attack)?;
                for (r, series) in runs.iter().enumerate() {
                    let name = format!("{defense}_{attack}_seed{}.csv", spec.base_seed + r as u64);
                    let path = series_dir.join(name);
                    let mut file = fs::File::create(&path).map_err(io_err(&path))?;
                    let mut body = String::from("day,cumulative_tran_h,cumulative_tran_d\n");
                    for v in series {
                        let _ = writeln!(body, "{},{},{}", v.day, v.honest, v.dishonest);
                    }
                    file.write_all(body.as_bytes()).map_err(io_err(&path))?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// Apply one flat `key=value` override to a simulation config. Keys mirror the
/// config and parameter fields.
pub fn apply_override(cfg: &mut SimulationConfig, key: &str, value: &str) -> Result<(), String> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e| format!("invalid value '{value}' for {key}: {e}"))
    }

    match key {
        "days" => cfg.days = parse(key, value)?,
        "duopoly_ratio" => cfg.duopoly_ratio = parse(key, value)?,
        "honest_buyers" => cfg.honest_buyers = parse(key, value)?,
        "attackers" => cfg.attackers = parse(key, value)?,
        "honest_common_sellers" => cfg.honest_common_sellers = parse(key, value)?,
        "dishonest_common_sellers" => cfg.dishonest_common_sellers = parse(key, value)?,
        "count_attacker_transactions" => cfg.count_attacker_transactions = parse(key, value)?,
        "seed" => cfg.seed = parse(key, value)?,
        "brs_q" => cfg.model.brs.q = parse(key, value)?,
        "iclub_cluster_eps" => cfg.model.iclub.cluster_eps = parse(key, value)?,
        "iclub_local_min_transactions" => {
            cfg.model.iclub.local_min_transactions = parse(key, value)?
        }
        "travos_num_bins" => cfg.model.travos.num_bins = parse(key, value)?,
        "personalized_n_min" => cfg.model.personalized.n_min = parse(key, value)?,
        "personalized_window_days" => cfg.model.personalized.window_days = parse(key, value)?,
        "personalized_pairing" => {
            cfg.model.personalized.pairing = match value.to_ascii_lowercase().as_str() {
                "per-window" | "per_window" | "perwindow" => {
                    crate::models::discounting::PairingMode::PerWindow
                }
                "cross-product" | "cross_product" | "crossproduct" => {
                    crate::models::discounting::PairingMode::CrossProduct
                }
                _ => return Err(format!("invalid pairing '{value}'")),
            }
        }
        "personalized_weight_evidence" => {
            cfg.model.personalized.weight_evidence = match value.to_ascii_lowercase().as_str() {
                "pairs" => crate::models::discounting::WeightEvidence::Pairs,
                "common-sellers" | "common_sellers" | "commonsellers" => {
                    crate::models::discounting::WeightEvidence::CommonSellers
                }
                _ => return Err(format!("invalid weight evidence '{value}'")),
            }
        }
        "combiner_epsilon" => cfg.model.combiner.epsilon = parse(key, value)?,
        "camouflage_days" => cfg.attack_params.camouflage_days = parse(key, value)?,
        "ww_duopoly_only" => cfg.attack_params.ww_duopoly_only = parse(key, value)?,
        _ => return Err(format!("unknown parameter '{key}'")),
    }
    Ok(())
}
