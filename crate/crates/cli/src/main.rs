//! gamevqa: batch workflows for gaming video quality assessment.
//!
//! Subcommands cover the full chain: feature extraction from manifests,
//! MOS computation from raw ratings, rater-consistency analysis, model
//! training and prediction, split-protocol evaluation, k-fold scatter data
//! and Wilcoxon significance matrices. Outputs are deterministic for a
//! fixed seed; each output file starts with a provenance comment.

mod config;
mod provenance;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::FileConfig;
use gamevqa_core::gamevqp::{train_gamevqp, GameVqpModel, TrainConfig};
use gamevqa_core::nss::{nss_bag, nss_feature_names};
use gamevqa_core::protocol::{kfold_predictions, split_protocol, EvalConfig, SplitReport};
use gamevqa_core::stats::significance_matrix;
use gamevqa_core::subjective::{
    bt500_reject, inter_subject_consistency, intra_subject_consistency, rescale_and_mos,
    session_zscores, MosTable, RatingMatrix,
};
use gamevqa_core::tables::{format_float, FeatureTable};
use gamevqa_core::video::{load_clip, ClipManifest};
use gamevqa_core::{nss, Error, Result};
use provenance::Provenance;

#[derive(Parser)]
#[command(name = "gamevqa", version, about = "Gaming video quality assessment toolkit")]
struct Cli {
    /// Flat key = value config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the NSS feature bag for every clip in a manifest.
    Features(FeaturesArgs),
    /// Compute SI/TI for every clip in a manifest.
    Siti(SitiArgs),
    /// Turn raw ratings into MOS with subject rejection.
    Mos(MosArgs),
    /// Inter/intra-subject consistency of raw ratings.
    Consistency(ConsistencyArgs),
    /// Train a predictor from features (and optional deep features) + MOS.
    Train(TrainArgs),
    /// Predict scores for a feature table with a trained model.
    Predict(PredictArgs),
    /// Repeated train/test split evaluation with median metrics.
    Eval(EvalArgs),
    /// K-fold cross-validated predictions (scatter data).
    Kfold(KfoldArgs),
    /// Wilcoxon significance matrix over several split reports.
    Significance(SignificanceArgs),
}

#[derive(Args)]
struct FeaturesArgs {
    /// manifest.csv: video_id,path,width,height,fps
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SitiArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MosArgs {
    /// ratings.csv: subject_id,video_id,session,score
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Rejection report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    mos: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of random rater splits.
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct ModelIo {
    /// features.csv: video_id plus named feature columns.
    #[arg(long)]
    features: PathBuf,
    /// Optional deep-feature table (video_id,d_0,...).
    #[arg(long)]
    deep: Option<PathBuf>,
    #[arg(long)]
    mos: PathBuf,
}

#[derive(Args, Clone)]
struct SvrFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// 5-fold inner-CV hyperparameter search (C and gamma grids).
    #[arg(long)]
    grid_search: bool,
    #[arg(long, short = 'C')]
    c: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    io: ModelIo,
    #[command(flatten)]
    svr: SvrFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    deep: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    io: ModelIo,
    #[command(flatten)]
    svr: SvrFlags,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    train_frac: Option<f64>,
    /// Model name recorded in the report (used by `significance`).
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KfoldArgs {
    #[command(flatten)]
    io: ModelIo,
    #[command(flatten)]
    svr: SvrFlags,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SignificanceArgs {
    /// Two or more splitreport.json files.
    #[arg(long, num_args = 2.., required = true)]
    reports: Vec<PathBuf>,
    /// srocc or lcc.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_config = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Features(args) => cmd_features(args),
        Command::Siti(args) => cmd_siti(args),
        Command::Mos(args) => cmd_mos(args),
        Command::Consistency(args) => cmd_consistency(args, &file_config),
        Command::Train(args) => cmd_train(args, &file_config),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args, &file_config),
        Command::Kfold(args) => cmd_kfold(args, &file_config),
        Command::Significance(args) => cmd_significance(args, &file_config),
    }
}

fn resolve_train(svr: &SvrFlags, cfg: &FileConfig) -> Result<(TrainConfig, u64)> {
    let defaults = TrainConfig::default();
    let grid_search = if svr.grid_search {
        true
    } else {
        cfg.get("grid_search")?.unwrap_or(false)
    };
    let train = TrainConfig {
        c: cfg.resolve(svr.c, "c", defaults.c)?,
        epsilon: cfg.resolve(svr.epsilon, "epsilon", defaults.epsilon)?,
        tol: cfg.resolve(svr.tol, "tol", defaults.tol)?,
        gamma: match svr.gamma {
            Some(g) => Some(g),
            None => cfg.get("gamma")?,
        },
        grid_search,
    };
    let seed = cfg.resolve(svr.seed, "seed", 0u64)?;
    Ok((train, seed))
}

fn train_provenance(p: &mut Provenance, train: &TrainConfig, seed: u64) {
    p.config("seed", seed)
        .config("c", train.c)
        .config("epsilon", train.epsilon)
        .config("tol", train.tol)
        .config(
            "gamma",
            train
                .gamma
                .map(|g| g.to_string())
                .unwrap_or_else(|| "auto".into()),
        )
        .config("grid_search", train.grid_search);
}

fn read_table(path: &Path) -> Result<FeatureTable> {
    let text = std::fs::read_to_string(path)?;
    FeatureTable::parse(&text, &path.display().to_string())
}

fn read_mos(path: &Path) -> Result<MosTable> {
    let text = std::fs::read_to_string(path)?;
    MosTable::parse(&text, &path.display().to_string())
}

fn read_ratings(path: &Path) -> Result<RatingMatrix> {
    let text = std::fs::read_to_string(path)?;
    RatingMatrix::parse(&text, &path.display().to_string())
}

/// JSON output with a leading provenance comment line.
fn write_json<T: serde::Serialize>(path: &Path, comment: &str, value: &T) -> Result<()> {
    let mut out = format!("# {}\n", comment);
    out.push_str(
        &serde_json::to_string_pretty(value)
            .map_err(|e| Error::Input(format!("serialization failed: {e}")))?,
    );
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}

/// Strip leading comment lines and parse the JSON body.
fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let body: String = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    serde_json::from_str(&body)
        .map_err(|e| Error::Schema(format!("{}: {}", path.display(), e)))
}

fn cmd_features(args: FeaturesArgs) -> Result<()> {
    let manifest = ClipManifest::read(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let mut table = FeatureTable::new(nss_feature_names().to_vec());
    for row in manifest.rows() {
        let clip = load_clip(row, base)?;
        let bag = nss_bag(&clip)?;
        table.push(&row.video_id, bag.values().to_vec())?;
    }
    let mut p = Provenance::new();
    p.input(&args.manifest)?;
    std::fs::write(&args.out, table.to_csv(Some(&p.line())))?;
    Ok(())
}

fn cmd_siti(args: SitiArgs) -> Result<()> {
    let manifest = ClipManifest::read(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let mut p = Provenance::new();
    p.input(&args.manifest)?;
    let mut out = format!("# {}\nvideo_id,si,ti\n", p.line());
    for row in manifest.rows() {
        let clip = load_clip(row, base)?;
        let si = nss::spatial_info(&clip)?;
        let ti = nss::temporal_info(&clip)?;
        out.push_str(&format!(
            "{},{},{}\n",
            row.video_id,
            format_float(si),
            format_float(ti)
        ));
    }
    std::fs::write(&args.out, out)?;
    Ok(())
}

fn cmd_mos(args: MosArgs) -> Result<()> {
    let ratings = read_ratings(&args.ratings)?;
    let z = session_zscores(&ratings)?;
    let report = bt500_reject(&z)?;
    let mos = rescale_and_mos(&z, &report.rejected)?;
    let mut p = Provenance::new();
    p.input(&args.ratings)?;
    p.config("rejected", report.rejected.len());
    std::fs::write(&args.out, mos.to_csv(Some(&p.line())))?;
    if let Some(report_path) = &args.report {
        write_json(report_path, &p.line(), &report)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ConsistencyReport {
    inter: gamevqa_core::subjective::InterSubjectReport,
    intra: gamevqa_core::subjective::IntraSubjectReport,
}

fn cmd_consistency(args: ConsistencyArgs, cfg: &FileConfig) -> Result<()> {
    let splits = cfg.resolve(args.splits, "splits", 100usize)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let ratings = read_ratings(&args.ratings)?;
    let mos = read_mos(&args.mos)?;
    let report = ConsistencyReport {
        inter: inter_subject_consistency(&ratings, splits, seed)?,
        intra: intra_subject_consistency(&ratings, &mos)?,
    };
    let mut p = Provenance::new();
    p.config("splits", splits).config("seed", seed);
    p.input(&args.ratings)?;
    p.input(&args.mos)?;
    write_json(&args.out, &p.line(), &report)
}

fn load_model_io(io: &ModelIo) -> Result<(FeatureTable, Option<FeatureTable>, MosTable)> {
    let features = read_table(&io.features)?;
    let deep = io.deep.as_deref().map(read_table).transpose()?;
    let mos = read_mos(&io.mos)?;
    Ok((features, deep, mos))
}

fn cmd_train(args: TrainArgs, cfg: &FileConfig) -> Result<()> {
    let (train, seed) = resolve_train(&args.svr, cfg)?;
    let (features, deep, mos) = load_model_io(&args.io)?;
    let ids: Vec<String> = mos.rows().iter().map(|r| r.video_id.clone()).collect();
    let targets: Vec<f64> = mos.rows().iter().map(|r| r.mos).collect();
    let model = train_gamevqp(&features, deep.as_ref(), &ids, &targets, &train, seed)?;
    let mut p = Provenance::new();
    train_provenance(&mut p, &train, seed);
    p.input(&args.io.features)?;
    if let Some(deep_path) = &args.io.deep {
        p.input(deep_path)?;
    }
    p.input(&args.io.mos)?;
    let mut out = format!("# {}\n", p.line());
    out.push_str(&String::from_utf8(model.save()).expect("model JSON is UTF-8"));
    out.push('\n');
    std::fs::write(&args.out, out)?;
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model: GameVqpModel = {
        let text = std::fs::read_to_string(&args.model)?;
        let body: String = text
            .lines()
            .skip_while(|l| l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        GameVqpModel::load(body.as_bytes())?
    };
    let features = read_table(&args.features)?;
    let deep = args.deep.as_deref().map(read_table).transpose()?;
    if features.feature_names() != model.nss_branch.feature_names.as_slice() {
        return Err(Error::Schema(
            "feature columns do not match the model's training schema".into(),
        ));
    }
    let mut p = Provenance::new();
    p.input(&args.model)?;
    p.input(&args.features)?;
    if let Some(deep_path) = &args.deep {
        p.input(deep_path)?;
    }
    let mut out = format!("# {}\nvideo_id,prediction\n", p.line());
    for id in features.ids() {
        let deep_row = match (&deep, &model.deep_branch) {
            (Some(table), Some(_)) => Some(table.get(id).ok_or_else(|| {
                Error::Schema(format!("video {:?} missing from the deep feature table", id))
            })?),
            (None, Some(_)) => {
                return Err(Error::Schema(
                    "model is in full mode: --deep is required".into(),
                ))
            }
            _ => None,
        };
        let score = model.predict(features.get(id).expect("id from table"), deep_row)?;
        out.push_str(&format!("{},{}\n", id, format_float(score)));
    }
    std::fs::write(&args.out, out)?;
    Ok(())
}

fn eval_config(args: &EvalArgs, cfg: &FileConfig) -> Result<EvalConfig> {
    let (train, seed) = resolve_train(&args.svr, cfg)?;
    Ok(EvalConfig {
        iterations: cfg.resolve(args.iterations, "iterations", 100usize)?,
        train_frac: cfg.resolve(args.train_frac, "train_frac", 0.8f64)?,
        seed,
        train,
        model_name: args
            .name
            .clone()
            .or(cfg.get("name")?)
            .unwrap_or_else(|| "gamevqp".into()),
    })
}

fn cmd_eval(args: EvalArgs, cfg: &FileConfig) -> Result<()> {
    let config = eval_config(&args, cfg)?;
    let (features, deep, mos) = load_model_io(&args.io)?;
    let report = split_protocol(&features, deep.as_ref(), &mos, &config)?;
    let mut p = Provenance::new();
    p.config("iterations", config.iterations)
        .config("train_frac", config.train_frac)
        .config("name", &config.model_name);
    train_provenance(&mut p, &config.train, config.seed);
    p.input(&args.io.features)?;
    if let Some(deep_path) = &args.io.deep {
        p.input(deep_path)?;
    }
    p.input(&args.io.mos)?;
    write_json(&args.out, &p.line(), &report)
}

fn cmd_kfold(args: KfoldArgs, cfg: &FileConfig) -> Result<()> {
    let (train, seed) = resolve_train(&args.svr, cfg)?;
    let k = cfg.resolve(args.k, "k", 5usize)?;
    let config = EvalConfig {
        seed,
        train,
        ..EvalConfig::default()
    };
    let (features, deep, mos) = load_model_io(&args.io)?;
    let rows = kfold_predictions(&features, deep.as_ref(), &mos, k, &config)?;
    let mut p = Provenance::new();
    p.config("k", k);
    train_provenance(&mut p, &config.train, seed);
    p.input(&args.io.features)?;
    if let Some(deep_path) = &args.io.deep {
        p.input(deep_path)?;
    }
    p.input(&args.io.mos)?;
    let mut out = format!("# {}\nvideo_id,prediction,mos\n", p.line());
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.video_id,
            format_float(row.prediction),
            format_float(row.mos)
        ));
    }
    std::fs::write(&args.out, out)?;
    Ok(())
}

fn cmd_significance(args: SignificanceArgs, cfg: &FileConfig) -> Result<()> {
    let metric = args
        .metric
        .clone()
        .or(cfg.get("metric")?)
        .unwrap_or_else(|| "srocc".into());
    let alpha = cfg.resolve(args.alpha, "alpha", 0.05f64)?;
    let mut names = Vec::new();
    let mut dists = Vec::new();
    for path in &args.reports {
        let report: SplitReport = read_json(path)?;
        let values: Vec<f64> = report
            .per_iteration
            .iter()
            .map(|m| match metric.as_str() {
                "srocc" => Ok(m.srocc),
                "lcc" => Ok(m.lcc),
                other => Err(Error::Input(format!(
                    "unknown metric {:?} (expected srocc or lcc)",
                    other
                ))),
            })
            .collect::<Result<_>>()?;
        if names.contains(&report.config.model_name) {
            return Err(Error::Schema(format!(
                "duplicate model name {:?}; use --name when running eval",
                report.config.model_name
            )));
        }
        names.push(report.config.model_name.clone());
        dists.push(values);
    }
    let matrix = significance_matrix(&names, &dists, &metric, alpha)?;
    let mut p = Provenance::new();
    p.config("metric", &metric).config("alpha", alpha);
    for path in &args.reports {
        p.input(path)?;
    }
    let mut out = format!("# {}\nmodel", p.line());
    for name in &matrix.model_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (name, row) in matrix.model_names.iter().zip(&matrix.entries) {
        out.push_str(name);
        for v in row {
            out.push_str(&format!(",{}", v));
        }
        out.push('\n');
    }
    std::fs::write(&args.out, out)?;
    Ok(())
}
