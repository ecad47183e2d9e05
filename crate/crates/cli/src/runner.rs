//! The `run` subcommand: execute every configured experiment cell with
//! both the hardware-efficient and the equivariant model, then emit a
//! summary CSV plus per-cell loss-history CSVs.

use std::path::Path;

use crate::config::{Row, RunConfig};
use crate::csvio::LOSS_HEADER;
use crate::CliError;
use revmap::data::DataSource;
use revmap::model::AnsatzKind;
use revmap::training::{loss_history_csv, train, ExperimentConfig, RunReport};

/// Results for one row: the same cell trained with both models.
#[derive(Debug)]
pub struct RowResult {
    pub row: Row,
    pub non_equivariant: RunReport,
    pub equivariant: RunReport,
    pub non_equivariant_cfg: ExperimentConfig,
    pub equivariant_cfg: ExperimentConfig,
}

fn experiment(cfg: &RunConfig, row: &Row, kind: AnsatzKind, source: DataSource) -> ExperimentConfig {
    ExperimentConfig {
        embedding: row.embedding,
        scale_m: row.scale_m,
        model_kind: kind,
        qubits: cfg.qubits,
        seeds: ExperimentConfig::derived_seeds(cfg.seed, cfg.repeats),
        method: cfg.method,
        budget: cfg.budget,
        source,
        count: cfg.count,
        test_fraction: cfg.test_fraction,
    }
}

/// Train every (row, model) cell. Cells are independent, so they run on
/// their own threads; collection order is the config order, keeping the
/// output deterministic.
pub fn run_all(cfg: &RunConfig, data_dir: &Path) -> Result<Vec<RowResult>, CliError> {
    let source = cfg.data_source(data_dir);
    let cells: Vec<(Row, ExperimentConfig, ExperimentConfig)> = cfg
        .rows
        .iter()
        .map(|row| {
            (
                row.clone(),
                experiment(cfg, row, AnsatzKind::HardwareEfficient, source.clone()),
                experiment(cfg, row, AnsatzKind::Equivariant, source.clone()),
            )
        })
        .collect();

    let reports: Vec<Result<(RunReport, RunReport), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|(_, he, eq)| {
                scope.spawn(move || {
                    let a = train(he).map_err(|e| e.to_string())?;
                    let b = train(eq).map_err(|e| e.to_string())?;
                    Ok((a, b))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    cells
        .into_iter()
        .zip(reports)
        .map(|((row, he_cfg, eq_cfg), result)| {
            let (non_equivariant, equivariant) = result.map_err(CliError::Io)?;
            Ok(RowResult {
                row,
                non_equivariant,
                equivariant,
                non_equivariant_cfg: he_cfg,
                equivariant_cfg: eq_cfg,
            })
        })
        .collect()
}

/// Summary CSV mirroring the accuracy table: one line per row, both
/// models' test accuracy mean and sample standard deviation.
pub fn summary_csv(results: &[RowResult]) -> String {
    let mut out = String::from(
        "embedding,alpha,M,non_equivariant_acc_mean,non_equivariant_acc_std,equivariant_acc_mean,equivariant_acc_std\n",
    );
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.row.embedding.name(),
            r.row.embedding.alpha_label(),
            r.row.scale_m,
            r.non_equivariant.test_acc_mean,
            r.non_equivariant.test_acc_std,
            r.equivariant.test_acc_mean,
            r.equivariant.test_acc_std,
        ));
    }
    out
}

fn loss_file_name(r: &RowResult, kind: &str) -> String {
    let alpha = r.row.embedding.alpha_label();
    let alpha = if alpha.is_empty() { "na".to_string() } else { alpha };
    format!("loss_{}_{}_{}_{}.csv", r.row.embedding.name(), alpha, r.row.scale_m, kind)
}

/// Write summary.csv and one loss CSV per cell into `out_dir`.
pub fn write_outputs(out_dir: &Path, results: &[RowResult]) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("summary.csv"), summary_csv(results))?;
    for r in results {
        let he = loss_history_csv(&r.non_equivariant_cfg, &r.non_equivariant);
        let eq = loss_history_csv(&r.equivariant_cfg, &r.equivariant);
        debug_assert!(he.starts_with(LOSS_HEADER));
        std::fs::write(out_dir.join(loss_file_name(r, "hardware_efficient")), he)?;
        std::fs::write(out_dir.join(loss_file_name(r, "equivariant")), eq)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_run_config;
    use crate::csvio::read_loss_csv;

    const TINY: &str = "\
source = synthetic
count = 12
test_fraction = 0.25
repeats = 2
budget = 40
seed = 5
row = amplitude
row = reverse twilight 800
";

    #[test]
    fn run_emits_round_trippable_outputs() {
        let cfg = parse_run_config(TINY).unwrap();
        let results = run_all(&cfg, Path::new(".")).unwrap();
        assert_eq!(results.len(), 2);
        for r in &results {
            for rep in [&r.non_equivariant, &r.equivariant] {
                assert_eq!(rep.repeats.len(), 2);
                assert!(rep.test_acc_mean >= 0.0 && rep.test_acc_mean <= 1.0);
            }
        }

        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &results).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.lines().nth(1).unwrap().starts_with("amplitude,,1,"));
        assert!(summary.lines().nth(2).unwrap().starts_with("reverse,-1.70710678"));

        // every loss CSV parses back to the in-memory history exactly
        let loss_path = dir.path().join(loss_file_name(&results[1], "equivariant"));
        let rows = read_loss_csv(&std::fs::read_to_string(loss_path).unwrap()).unwrap();
        let want: Vec<(usize, f64)> = results[1]
            .equivariant
            .repeats
            .iter()
            .enumerate()
            .flat_map(|(_, rep)| rep.loss_history.iter().copied())
            .collect();
        assert_eq!(rows.len(), want.len());
        for (row, (iter, loss)) in rows.iter().zip(&want) {
            assert_eq!(row.iteration, *iter);
            assert_eq!(row.loss.to_bits(), loss.to_bits());
        }
    }

    #[test]
    fn determinism_across_invocations() {
        let cfg = parse_run_config(TINY).unwrap();
        let a = run_all(&cfg, Path::new(".")).unwrap();
        let b = run_all(&cfg, Path::new(".")).unwrap();
        assert_eq!(summary_csv(&a), summary_csv(&b));
    }
}
