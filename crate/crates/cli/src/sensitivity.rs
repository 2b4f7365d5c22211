//! Robustness of the TDA hierarchical clustering to (d, tau, eps_max).

use std::path::{Path, PathBuf};

use fxtopo::cluster::{hierarchical_complete, ClusterAssignment, FeatureSpace};
use fxtopo::eval::{adjusted_rand, mantel, normalized_mutual_info, SensitivityReport, SensitivityRow};
use fxtopo::ingest::ReturnPanel;
use log::{info, warn};

use crate::config::PipelineConfig;
use crate::error::{AtStage, Stage, StageError};
use crate::output::{create, Staging, MARKER};
use crate::pipeline::{ingest, tda_branch, StageResult, TdaResult};

fn tda_assignment(cfg: &PipelineConfig, tda: &TdaResult) -> fxtopo::Result<ClusterAssignment> {
    hierarchical_complete(&tda.wasserstein, cfg.k, FeatureSpace::Tda).map(|(_, a)| a)
}

fn compare(
    cfg: &PipelineConfig,
    base: &TdaResult,
    base_labels: &ClusterAssignment,
    other: &TdaResult,
) -> fxtopo::Result<(f64, f64, f64)> {
    let assignment = tda_assignment(cfg, other)?;
    let m = mantel(&base.wasserstein, &other.wasserstein)?;
    let ari = adjusted_rand(&base_labels.labels, &assignment.labels)?;
    let nmi = normalized_mutual_info(&base_labels.labels, &assignment.labels)?;
    if nmi.degenerate {
        warn!("NMI degenerate: one partition has a single cluster");
    }
    Ok((m, ari, nmi.value))
}

/// Baseline row first (the config's own parameters), then one row per
/// distinct grid entry. Unlabelled grid rows identical to the baseline fold
/// into it; rows that fail are kept with their error as status.
pub fn sensitivity_from_baseline(
    cfg: &PipelineConfig,
    z: &ReturnPanel<f64>,
    base: &TdaResult,
) -> StageResult<SensitivityReport> {
    let base_labels = tda_assignment(cfg, base).at(Stage::Sensitivity)?;
    let baseline = format!("{} (baseline)", crate::config::GridRow::baseline_name(cfg.embed, cfg.eps_max));
    let (m, ari, nmi) = compare(cfg, base, &base_labels, base).at(Stage::Sensitivity)?;
    let mut rows = vec![SensitivityRow::ok(baseline.clone(), m, ari, nmi)];
    for row in &cfg.sensitivity.grid {
        let embed = row.embed(cfg.embed);
        let eps = row.eps(cfg.eps_max);
        if row.label.is_none() && embed == cfg.embed && eps == cfg.eps_max {
            continue;
        }
        let name = row.describe(cfg.embed, cfg.eps_max);
        let result = tda_branch(cfg, z, embed, eps)
            .map_err(|e| e.to_string())
            .and_then(|other| compare(cfg, base, &base_labels, &other).map_err(|e| e.to_string()));
        rows.push(match result {
            Ok((m, ari, nmi)) => {
                info!("sensitivity `{name}`: mantel {m:.3}, ARI {ari:.3}, NMI {nmi:.3}");
                SensitivityRow::ok(name, m, ari, nmi)
            }
            Err(e) => {
                warn!("sensitivity `{name}` failed: {e}");
                SensitivityRow::failed(name, e)
            }
        });
    }
    Ok(SensitivityReport { baseline, rows })
}

pub fn run_sensitivity(cfg: &PipelineConfig) -> StageResult<SensitivityReport> {
    cfg.validate()?;
    if cfg.sensitivity.grid.is_empty() {
        return Err(StageError::msg(Stage::Sensitivity, "sensitivity grid is empty"));
    }
    let data = ingest(cfg)?;
    let base = tda_branch(cfg, &data.standardized, cfg.embed, cfg.eps_max)?;
    sensitivity_from_baseline(cfg, &data.standardized, &base)
}

pub fn write_sensitivity(report: &SensitivityReport, dir: &Path) -> StageResult<()> {
    let path = dir.join("sensitivity_report.csv");
    let mut w = create(&path)?;
    report.write_csv(&mut w).at(Stage::Output)?;
    std::io::Write::flush(&mut w).at(Stage::Output)?;
    std::fs::write(dir.join("sensitivity_report.json"), report.to_json()).at(Stage::Output)?;
    Ok(())
}

/// Write `<output>/sensitivity/`, leaving the rest of an existing report intact.
pub fn run_and_write(cfg: &PipelineConfig) -> StageResult<(PathBuf, SensitivityReport)> {
    let report = run_sensitivity(cfg)?;
    let root = &cfg.output_dir;
    if !root.exists() {
        std::fs::create_dir_all(root).at(Stage::Output)?;
        std::fs::write(root.join(MARKER), "").at(Stage::Output)?;
    }
    let staging = Staging::new(&root.join("sensitivity"))?;
    write_sensitivity(&report, staging.path())?;
    crate::plot::render_sensitivity(staging.path())?;
    Ok((staging.commit()?, report))
}
