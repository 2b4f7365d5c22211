//! End-to-end run: ingest, statistical branch, TDA branch, clustering,
//! evaluation, sensitivity grid and plots, written as a report tree.

use std::fs::File;
use std::path::{Path, PathBuf};

use fxtopo::cluster::{
    classical_mds, elbow_curve, hierarchical_complete, ClusterAssignment, Dendrogram, FeatureSpace, KMeans,
    MdsEmbedding,
};
use fxtopo::eval::{calinski_harabasz, silhouette, EvaluationReport, EvaluationRow, SensitivityReport};
use fxtopo::ingest::{
    log_returns, merge_and_interpolate, parse_rate_csv, resample_monthly, standardize, write_rate_panel_csv,
    write_return_panel_csv, RatePanel, RateSeries, ReturnPanel,
};
use fxtopo::stats::{
    covariance_matrix, cross_correlation_matrix, pearson_matrix, spearman_matrix, stl_decompose, variance_summary,
    StlDecomposition, SymmetricMatrix,
};
use fxtopo::summaries::{
    betti_curve, diagram_distance_matrix, landscape, landscape_on_grid, uniform_grid, WassersteinParams,
};
use fxtopo::tda::{
    delay_embed, pairwise_distances, pca_project, rips_persistence, row_distances, write_diagrams_csv, DistanceMatrix,
    PersistenceDiagram,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{EmbedConfig, EpsMax, PipelineConfig, StlInput};
use crate::error::{AtStage, Stage, StageError};
use crate::output::{create, Staging};

pub type StageResult<T> = Result<T, StageError>;

/// Cleaned panels shared by both branches.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub daily: RatePanel<f64>,
    pub monthly: RatePanel<f64>,
    pub returns: ReturnPanel<f64>,
    pub standardized: ReturnPanel<f64>,
    pub warnings: Vec<(String, String)>,
}

fn load_series(cfg: &PipelineConfig, code: &str) -> StageResult<RateSeries<f64>> {
    let path = cfg.data_dir.join(cfg.csv.file_for(code));
    let file = File::open(&path)
        .map_err(|e| StageError::for_currency(Stage::Ingest, code, format!("{}: {e}", path.display())))?;
    parse_rate_csv(file, code, &cfg.csv.options_for(code))
        .map_err(|e| StageError::for_currency(Stage::Ingest, code, format!("{}: {e}", path.display())))
}

pub fn ingest(cfg: &PipelineConfig) -> StageResult<Prepared> {
    let series = cfg.currencies.iter().map(|code| load_series(cfg, code)).collect::<StageResult<Vec<_>>>()?;
    let warnings =
        series.iter().flat_map(|s| s.warnings.iter().map(move |w| (s.code.clone(), w.clone()))).collect::<Vec<_>>();
    let mut daily = merge_and_interpolate(&series).at(Stage::Ingest)?;
    if let Some(range) = cfg.date_range {
        daily = daily.restrict_dates(range.start, range.end).at(Stage::Ingest)?;
    }
    let monthly = resample_monthly(&daily, cfg.monthly_rule).at(Stage::Ingest)?;
    let returns = log_returns(&monthly).at(Stage::Ingest)?;
    let standardized = standardize(&returns).at(Stage::Ingest)?;
    info!(
        "ingest: {} daily rows, {} months, {} returns for {} currencies",
        daily.n_rows(),
        monthly.n_rows(),
        returns.n_rows(),
        returns.n_cols()
    );
    Ok(Prepared { daily, monthly, returns, standardized, warnings })
}

#[derive(Debug, Clone)]
pub struct StatsResult {
    pub covariance: SymmetricMatrix<f64>,
    pub pearson: SymmetricMatrix<f64>,
    pub spearman: SymmetricMatrix<f64>,
    pub cross_correlation: SymmetricMatrix<f64>,
    pub variance: Vec<(String, f64)>,
    pub stl: Vec<(String, StlDecomposition<f64>)>,
}

pub fn stats_branch(cfg: &PipelineConfig, data: &Prepared) -> StageResult<StatsResult> {
    let z = &data.standardized;
    let stl_cfg = cfg.stl.to_stl_config();
    let stl = z
        .currencies()
        .par_iter()
        .enumerate()
        .map(|(i, code)| {
            let series: Vec<f64> = match cfg.stl.input {
                StlInput::Rates => data.monthly.columns()[i].clone(),
                StlInput::Returns => data.returns.columns()[i].clone(),
            };
            stl_decompose(&series, cfg.stl.period, &stl_cfg).map(|d| (code.clone(), d)).at_currency(Stage::Stats, code)
        })
        .collect::<StageResult<Vec<_>>>()?;
    Ok(StatsResult {
        covariance: covariance_matrix(z).at(Stage::Stats)?,
        pearson: pearson_matrix(z).at(Stage::Stats)?,
        spearman: spearman_matrix(z).at(Stage::Stats)?,
        cross_correlation: cross_correlation_matrix(z, cfg.max_lag).at(Stage::Stats)?,
        variance: variance_summary(&data.returns).at(Stage::Stats)?,
        stl,
    })
}

/// Per-currency diagrams and their Wasserstein matrix for one parameter setting.
#[derive(Debug, Clone)]
pub struct TdaResult {
    pub labels: Vec<String>,
    pub embed: EmbedConfig,
    /// Largest pairwise distance over all clouds.
    pub auto_eps: f64,
    pub eps_max: f64,
    pub n_points: Vec<usize>,
    pub diagrams: Vec<Vec<PersistenceDiagram<f64>>>,
    pub wasserstein: DistanceMatrix<f64>,
}

pub fn wasserstein_params(cfg: &PipelineConfig) -> WassersteinParams<f64> {
    WassersteinParams {
        p: cfg.wasserstein.p,
        q: cfg.wasserstein.q,
        include_essential: cfg.wasserstein.include_essential,
    }
}

pub fn tda_branch(
    cfg: &PipelineConfig,
    z: &ReturnPanel<f64>,
    embed: EmbedConfig,
    eps: EpsMax,
) -> StageResult<TdaResult> {
    let labels = z.currencies().to_vec();
    let distances = labels
        .par_iter()
        .zip(z.columns())
        .map(|(code, col)| {
            delay_embed(col, embed.window, embed.delay, code)
                .map(|cloud| pairwise_distances(&cloud))
                .at_currency(Stage::Tda, code)
        })
        .collect::<StageResult<Vec<_>>>()?;
    let auto_eps = distances.iter().map(|d| d.max_distance()).fold(0.0, f64::max);
    let eps_max = eps.resolve(auto_eps);
    let max_dim = cfg.max_homology_dim();
    let diagrams = labels
        .par_iter()
        .zip(&distances)
        .map(|(code, d)| rips_persistence(d, max_dim, eps_max).at_currency(Stage::Tda, code))
        .collect::<StageResult<Vec<_>>>()?;
    let wasserstein =
        diagram_distance_matrix(&labels, &diagrams, &wasserstein_params(cfg), &cfg.wasserstein.dim_weights)
            .at(Stage::Tda)?;
    Ok(TdaResult {
        labels,
        embed,
        auto_eps,
        eps_max,
        n_points: distances.iter().map(|d| d.len()).collect(),
        diagrams,
        wasserstein,
    })
}

#[derive(Debug, Clone)]
pub struct ClusterResult {
    pub stat_points: Vec<Vec<f64>>,
    pub stat_distances: DistanceMatrix<f64>,
    pub stat_kmeans: ClusterAssignment,
    pub stat_hierarchical: ClusterAssignment,
    pub stat_dendrogram: Dendrogram<f64>,
    pub mds: MdsEmbedding<f64>,
    pub tda_points: Vec<Vec<f64>>,
    pub mds_distances: DistanceMatrix<f64>,
    pub tda_kmeans: ClusterAssignment,
    pub tda_hierarchical: ClusterAssignment,
    pub tda_dendrogram: Dendrogram<f64>,
    pub elbow_statistical: Vec<(usize, f64)>,
    pub elbow_tda: Vec<(usize, f64)>,
}

pub fn cluster_both(cfg: &PipelineConfig, z: &ReturnPanel<f64>, tda: &TdaResult) -> StageResult<ClusterResult> {
    let labels = z.currencies().to_vec();
    let stat_points: Vec<Vec<f64>> = z.columns().to_vec();
    let stat_distances = row_distances(&labels, &stat_points).at(Stage::Cluster)?;
    let stat_kmeans = KMeans::new(cfg.k, cfg.seed)
        .fit(&stat_points)
        .and_then(|f| f.into_assignment(labels.clone(), FeatureSpace::Statistical))
        .at(Stage::Cluster)?;
    let (stat_dendrogram, stat_hierarchical) =
        hierarchical_complete(&stat_distances, cfg.k, FeatureSpace::Statistical).at(Stage::Cluster)?;

    let mds = classical_mds(&tda.wasserstein, cfg.mds_dim).at(Stage::Cluster)?;
    let captured = mds.captured_fraction();
    if captured < 0.9 {
        warn!("MDS keeps {:.1}% of the positive eigenvalue mass (below 90%)", captured * 100.0);
    } else {
        info!("MDS keeps {:.1}% of the positive eigenvalue mass", captured * 100.0);
    }
    let tda_points = mds.cloud.to_rows();
    let mds_distances = row_distances(&labels, &tda_points).at(Stage::Cluster)?;
    let tda_kmeans = KMeans::new(cfg.k, cfg.seed)
        .fit(&tda_points)
        .and_then(|f| f.into_assignment(labels.clone(), FeatureSpace::Tda))
        .at(Stage::Cluster)?;
    let (tda_dendrogram, tda_hierarchical) =
        hierarchical_complete(&tda.wasserstein, cfg.k, FeatureSpace::Tda).at(Stage::Cluster)?;

    let elbow_statistical = elbow_curve(&stat_points, cfg.k_max_elbow, cfg.seed).at(Stage::Cluster)?;
    let elbow_tda = elbow_curve(&tda_points, cfg.k_max_elbow, cfg.seed).at(Stage::Cluster)?;
    Ok(ClusterResult {
        stat_points,
        stat_distances,
        stat_kmeans,
        stat_hierarchical,
        stat_dendrogram,
        mds,
        tda_points,
        mds_distances,
        tda_kmeans,
        tda_hierarchical,
        tda_dendrogram,
        elbow_statistical,
        elbow_tda,
    })
}

fn score_row(
    a: &ClusterAssignment,
    sil_dist: &DistanceMatrix<f64>,
    sil_space: &str,
    ch_points: &[Vec<f64>],
    ch_space: &str,
    mut notes: Vec<String>,
) -> StageResult<EvaluationRow> {
    let silhouette = silhouette(sil_dist, &a.labels).at(Stage::Eval)?;
    let ch = calinski_harabasz(ch_points, &a.labels).at(Stage::Eval)?;
    if ch.is_infinite() {
        notes.push("zero within-cluster scatter".into());
    }
    Ok(EvaluationRow {
        method: a.method,
        feature_space: a.feature_space,
        k: a.k,
        silhouette,
        calinski_harabasz: ch,
        silhouette_space: sil_space.into(),
        ch_space: ch_space.into(),
        note: notes.join("; "),
    })
}

pub fn evaluate(c: &ClusterResult, tda: &TdaResult) -> StageResult<EvaluationReport> {
    let rows = vec![
        score_row(&c.stat_kmeans, &c.stat_distances, "euclidean", &c.stat_points, "euclidean", vec![])?,
        score_row(&c.stat_hierarchical, &c.stat_distances, "euclidean", &c.stat_points, "euclidean", vec![])?,
        score_row(&c.tda_kmeans, &c.mds_distances, "mds", &c.tda_points, "mds", vec![])?,
        score_row(
            &c.tda_hierarchical,
            &tda.wasserstein,
            "wasserstein",
            &c.tda_points,
            "mds",
            vec!["CH computed on the MDS embedding".into()],
        )?,
    ];
    let report = EvaluationReport { rows };
    report.validate().at(Stage::Eval)?;
    Ok(report)
}

/// Everything a run produces, in memory.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub data: Prepared,
    pub stats: StatsResult,
    pub tda: TdaResult,
    pub clusters: ClusterResult,
    pub evaluation: EvaluationReport,
    pub sensitivity: Option<SensitivityReport>,
}

pub fn compute(cfg: &PipelineConfig) -> StageResult<RunResult> {
    cfg.validate()?;
    let data = ingest(cfg)?;
    let stats = stats_branch(cfg, &data)?;
    let tda = tda_branch(cfg, &data.standardized, cfg.embed, cfg.eps_max)?;
    let clusters = cluster_both(cfg, &data.standardized, &tda)?;
    let evaluation = evaluate(&clusters, &tda)?;
    let sensitivity = if cfg.sensitivity.enabled && !cfg.sensitivity.grid.is_empty() {
        Some(crate::sensitivity::sensitivity_from_baseline(cfg, &data.standardized, &tda)?)
    } else {
        None
    };
    Ok(RunResult { data, stats, tda, clusters, evaluation, sensitivity })
}

/// Run the full pipeline and write the report tree to `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> StageResult<(PathBuf, RunResult)> {
    let result = compute(cfg)?;
    let staging = Staging::new(&cfg.output_dir)?;
    write_report(cfg, &result, staging.path())?;
    crate::plot::render_plots(staging.path())?;
    let dir = staging.commit()?;
    Ok((dir, result))
}

fn write_with(path: PathBuf, f: impl FnOnce(&mut std::io::BufWriter<File>) -> fxtopo::Result<()>) -> StageResult<()> {
    let mut w = create(&path)?;
    f(&mut w).map_err(|e| StageError::msg(Stage::Output, format!("{}: {e}", path.display())))?;
    std::io::Write::flush(&mut w).map_err(|e| StageError::msg(Stage::Output, format!("{}: {e}", path.display())))
}

fn write_text(path: PathBuf, text: &str) -> StageResult<()> {
    if let Some(p) = path.parent() {
        std::fs::create_dir_all(p).at(Stage::Output)?;
    }
    std::fs::write(&path, text).map_err(|e| StageError::msg(Stage::Output, format!("{}: {e}", path.display())))
}

fn write_rows(path: PathBuf, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> StageResult<()> {
    write_with(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for r in rows {
            out.write_record(&r)?;
        }
        out.flush()?;
        Ok(())
    })
}

pub fn write_report(cfg: &PipelineConfig, r: &RunResult, root: &Path) -> StageResult<()> {
    write_text(root.join("run_config.toml"), &cfg.to_toml())?;

    let panels = root.join("panels");
    write_with(panels.join("daily_rates.csv"), |w| write_rate_panel_csv(&r.data.daily, w))?;
    write_with(panels.join("monthly_rates.csv"), |w| write_rate_panel_csv(&r.data.monthly, w))?;
    write_with(panels.join("log_returns.csv"), |w| write_return_panel_csv(&r.data.returns, w))?;
    write_with(panels.join("standardized_returns.csv"), |w| write_return_panel_csv(&r.data.standardized, w))?;
    write_rows(
        panels.join("ingest_warnings.csv"),
        &["currency", "message"],
        r.data.warnings.iter().map(|(c, m)| vec![c.clone(), m.clone()]),
    )?;

    let stats = root.join("stats");
    for (name, m) in [
        ("covariance", &r.stats.covariance),
        ("pearson", &r.stats.pearson),
        ("spearman", &r.stats.spearman),
        ("cross_correlation", &r.stats.cross_correlation),
    ] {
        write_with(stats.join(format!("{name}.csv")), |w| m.write_csv(w))?;
    }
    write_rows(
        stats.join("variance.csv"),
        &["currency", "variance"],
        r.stats.variance.iter().map(|(c, v)| vec![c.clone(), v.to_string()]),
    )?;
    for (code, d) in &r.stats.stl {
        write_with(stats.join("stl").join(format!("{code}.csv")), |w| d.write_csv(w))?;
    }

    write_tda(cfg, &r.tda, &root.join("tda"))?;

    let clusters = root.join("clusters");
    let c = &r.clusters;
    for (name, a) in [
        ("stat_kmeans", &c.stat_kmeans),
        ("stat_hierarchical", &c.stat_hierarchical),
        ("tda_kmeans", &c.tda_kmeans),
        ("tda_hierarchical", &c.tda_hierarchical),
    ] {
        write_with(clusters.join(format!("{name}.csv")), |w| a.write_csv(w))?;
    }
    write_with(clusters.join("stat_dendrogram.csv"), |w| c.stat_dendrogram.write_csv(w))?;
    write_with(clusters.join("tda_dendrogram.csv"), |w| c.tda_dendrogram.write_csv(w))?;
    write_rows(
        clusters.join("elbow.csv"),
        &["k", "statistical", "tda"],
        c.elbow_statistical
            .iter()
            .zip(&c.elbow_tda)
            .map(|((k, s), (_, t))| vec![k.to_string(), s.to_string(), t.to_string()]),
    )?;
    let dims: Vec<String> = (1..=c.mds.cloud.dim()).map(|i| format!("x{i}")).collect();
    let mut header = vec!["currency"];
    header.extend(dims.iter().map(String::as_str));
    write_rows(
        clusters.join("mds_embedding.csv"),
        &header,
        r.tda.labels.iter().zip(&c.tda_points).map(|(l, p)| {
            let mut row = vec![l.clone()];
            row.extend(p.iter().map(|v| v.to_string()));
            row
        }),
    )?;
    write_rows(
        clusters.join("mds_eigenvalues.csv"),
        &["component", "eigenvalue", "explained"],
        c.mds
            .eigenvalues
            .iter()
            .zip(&c.mds.explained)
            .enumerate()
            .map(|(i, (e, x))| vec![(i + 1).to_string(), e.to_string(), x.to_string()]),
    )?;

    let eval = root.join("eval");
    write_with(eval.join("evaluation_report.csv"), |w| r.evaluation.write_csv(w))?;
    write_text(eval.join("evaluation_report.json"), &r.evaluation.to_json())?;

    if let Some(s) = &r.sensitivity {
        crate::sensitivity::write_sensitivity(s, &root.join("sensitivity"))?;
    }
    Ok(())
}

fn write_tda(cfg: &PipelineConfig, tda: &TdaResult, dir: &Path) -> StageResult<()> {
    write_rows(
        dir.join("filtration.csv"),
        &["parameter", "value"],
        [
            vec!["window".into(), tda.embed.window.to_string()],
            vec!["delay".into(), tda.embed.delay.to_string()],
            vec!["auto_eps_max".into(), tda.auto_eps.to_string()],
            vec!["eps_max".into(), tda.eps_max.to_string()],
        ],
    )?;
    let layers = cfg.summaries.landscape_layers;
    let grid_size = cfg.summaries.grid_size;
    let mut manifest = Vec::new();
    for ((code, dgms), n) in tda.labels.iter().zip(&tda.diagrams).zip(&tda.n_points) {
        write_with(dir.join("diagrams").join(format!("{code}.csv")), |w| write_diagrams_csv(dgms, w))?;
        manifest.push(vec![code.clone(), format!("{code}.csv"), n.to_string(), tda.eps_max.to_string()]);
        for d in dgms {
            let k = d.dimension;
            write_with(dir.join("landscapes").join(format!("{code}_h{k}.csv")), |w| {
                landscape(d, layers, grid_size).write_csv(w)
            })?;
            write_with(dir.join("betti").join(format!("{code}_h{k}.csv")), |w| betti_curve(d, grid_size).write_csv(w))?;
        }
    }
    write_rows(dir.join("diagrams").join("manifest.csv"), &["currency", "file", "points", "eps_max"], manifest)?;
    write_with(dir.join("wasserstein.csv"), |w| tda.wasserstein.write_csv(w))?;

    // Landscapes of every currency on one grid, stacked for a 2-D PCA view.
    let grid = uniform_grid(tda.eps_max, grid_size);
    let stacked: Vec<Vec<f64>> = tda
        .diagrams
        .iter()
        .map(|dgms| dgms.iter().flat_map(|d| landscape_on_grid(d, layers, grid.clone()).flatten()).collect())
        .collect();
    let proj = pca_project(&stacked, 2).at(Stage::Tda)?;
    write_rows(
        dir.join("pca.csv"),
        &["currency", "pc1", "pc2"],
        tda.labels.iter().zip(&proj.coords).map(|(l, c)| vec![l.clone(), c[0].to_string(), c[1].to_string()]),
    )?;
    write_rows(
        dir.join("pca_variance.csv"),
        &["component", "explained_variance_ratio"],
        proj.explained_variance_ratio.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.to_string()]),
    )?;
    Ok(())
}
