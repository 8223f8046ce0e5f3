use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use followspam::classifier::{
    cross_validate, rank_features, Algo, FeatureMode, FeatureTable, ForestParams, ModelFile, TreeParams,
};
use followspam::ego::EgoCap;
use followspam::features::{build_baseline, extract_features, score_features, DEFAULT_BASELINE_SAMPLE};
use followspam::metrics::EvalReport;
use followspam::status::build_status_table;
use followspam::synth::{generate, SynthConfig};
use followspam::triad::triple_count;
use followspam::tsp::{ego_census, TriadBaseline};
use followspam::{load_edge_list, IdTable, LabelFile, LoadedGraph, TriadClass};

/// Seed used whenever neither `--seed` nor `FOLLOWSPAM_SEED` is given.
const DEFAULT_SEED: u64 = 20_100_101;

#[derive(Parser, Debug)]
#[command(name = "followspam", version, about = "Follow-spam detection on directed follow graphs")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, env = "FOLLOWSPAM_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoName {
    Tree,
    Forest,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clean an edge list (drop self-loops and duplicates) and report counts.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Triad census of one user's ego network.
    Census {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        user: u64,
        /// Sample at most this many neighbors.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, env = "FOLLOWSPAM_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Per-class triad mean and standard deviation over sampled legitimate users.
    Baseline {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BASELINE_SAMPLE)]
        sample: usize,
        #[arg(long, env = "FOLLOWSPAM_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Sample at most this many neighbors per ego network.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feature file for every labeled user.
    Features {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Required for modes with triad columns.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long, value_parser = parse_mode)]
        mode: FeatureMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Labeled synthetic follow network.
    Synth {
        #[arg(long, default_value_t = 1000)]
        legit: usize,
        #[arg(long, default_value_t = 1000)]
        spam: usize,
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[arg(long, env = "FOLLOWSPAM_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out_edges: PathBuf,
        #[arg(long)]
        out_labels: PathBuf,
    },
    /// Train a model on a feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoName::Forest)]
        algo: AlgoName,
        #[arg(long, env = "FOLLOWSPAM_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        /// Baseline to embed so that scoring needs no separate file.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified k-fold cross-validation report plus ROC plot data.
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoName::Forest)]
        algo: AlgoName,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, env = "FOLLOWSPAM_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        #[arg(long)]
        report: PathBuf,
        /// ROC points as `fpr,tpr` CSV (default: report path with `.roc.csv`).
        #[arg(long)]
        roc: Option<PathBuf>,
    },
    /// Columns ranked by the information gain of their best split.
    Infogain {
        #[arg(long)]
        features: PathBuf,
    },
    /// Spam probability of one user under a trained model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Overrides a baseline embedded in the model.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long)]
        user: u64,
    },
}

fn parse_mode(s: &str) -> Result<FeatureMode, String> {
    s.parse().map_err(|e: followspam::Error| e.to_string())
}

fn require_file(path: &Path) -> Result<()> {
    ensure!(path.is_file(), "{} does not exist or is not a file", path.display());
    Ok(())
}

fn load_graph(path: &Path) -> Result<LoadedGraph> {
    require_file(path)?;
    load_edge_list(path).with_context(|| format!("loading graph {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn algo(name: AlgoName, seed: u64, trees: usize) -> Algo {
    match name {
        AlgoName::Tree => Algo::Tree(TreeParams::default()),
        AlgoName::Forest => Algo::Forest(ForestParams {
            n_trees: trees,
            seed,
            ..ForestParams::default()
        }),
    }
}

fn ingest(edges: &Path, out: &Path) -> Result<()> {
    let g = load_graph(edges)?;
    let mut w = create(out)?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    print!("{}", g.report);
    Ok(())
}

fn census_cmd(graph: &Path, user: u64, cap: Option<usize>, seed: u64) -> Result<()> {
    let g = load_graph(graph)?;
    let u = g.ids.dense_or_err(user)?;
    let cap = cap.map(|max_neighbors| EgoCap { max_neighbors, seed });
    let ego = followspam::ego::ego_network(&g.graph, u, cap)?;
    let c = ego_census(&g.graph, u, cap)?;
    let mut out = io::stdout().lock();
    for class in TriadClass::ALL {
        writeln!(out, "{:>4} {}", class.label(), c.get(class))?;
    }
    let expected = triple_count(ego.graph.node_count());
    writeln!(
        out,
        "sum {} nodes {} edges {} expected {} {}{}",
        c.total(),
        ego.graph.node_count(),
        ego.graph.edge_count(),
        expected,
        if c.total() == expected { "ok" } else { "MISMATCH" },
        if ego.capped { " capped" } else { "" }
    )?;
    ensure!(c.total() == expected, "census does not sum to C(n,3)");
    Ok(())
}

fn baseline_cmd(
    graph: &Path,
    labels: &Path,
    sample: usize,
    seed: u64,
    cap: Option<usize>,
    out: &Path,
) -> Result<()> {
    let g = load_graph(graph)?;
    require_file(labels)?;
    let labels = LabelFile::load(labels)?;
    let cap = cap.map(|max_neighbors| EgoCap { max_neighbors, seed });
    let b = build_baseline(&g.graph, &g.ids, &labels, sample, seed, cap)?;
    b.save(out)?;
    eprintln!("baseline over {} legitimate users written to {}", b.sample_size, out.display());
    Ok(())
}

fn features_cmd(
    graph: &Path,
    labels: &Path,
    baseline: Option<&Path>,
    mode: FeatureMode,
    out: &Path,
) -> Result<()> {
    let g = load_graph(graph)?;
    require_file(labels)?;
    let labels = LabelFile::load(labels)?;
    let baseline = match baseline {
        Some(p) => {
            require_file(p)?;
            Some(TriadBaseline::load(p)?)
        }
        None if mode.uses_tsp() => bail!("--baseline is required for {mode} features"),
        None => None,
    };
    let t = extract_features(&g.graph, &g.ids, &labels, baseline.as_ref(), mode)?;
    t.save(out)?;
    eprintln!("{} rows of {} features written to {}", t.len(), mode, out.display());
    Ok(())
}

fn synth_cmd(legit: usize, spam: usize, scale: f64, seed: u64, out_edges: &Path, out_labels: &Path) -> Result<()> {
    let cfg = SynthConfig {
        n_legit: legit,
        n_spam: spam,
        scale,
        seed,
        ..SynthConfig::default()
    };
    let (g, labels) = generate(&cfg)?;
    let ids = IdTable::identity(g.node_count());
    let mut w = create(out_edges)?;
    followspam::graph::write_edge_list(&g, &ids, &mut w)?;
    w.flush()?;
    labels.save(out_labels)?;
    let mut meta = out_edges.as_os_str().to_owned();
    meta.push(".config.json");
    let json = serde_json::to_string_pretty(&cfg)? + "\n";
    fs::write(&meta, json).with_context(|| format!("writing {}", meta.to_string_lossy()))?;
    eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(())
}

fn load_features(path: &Path) -> Result<FeatureTable> {
    require_file(path)?;
    FeatureTable::load(path).with_context(|| format!("loading features {}", path.display()))
}

fn train_cmd(
    features: &Path,
    name: AlgoName,
    seed: u64,
    trees: usize,
    baseline: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let t = load_features(features)?;
    ensure!(!t.is_empty(), "{} has no rows", features.display());
    let baseline = baseline.map(TriadBaseline::load).transpose()?;
    let model = algo(name, seed, trees).train(&t.rows)?;
    let mf = ModelFile::new(t.schema.clone(), t.followee_norm, baseline, seed, model)?;
    mf.save(out)?;
    eprintln!("{name:?} model on {} rows written to {}", t.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn evaluate_cmd(
    features: &Path,
    name: AlgoName,
    folds: usize,
    seed: u64,
    trees: usize,
    report: &Path,
    roc: Option<&Path>,
) -> Result<()> {
    let t = load_features(features)?;
    let r = cross_validate(&t, folds, algo(name, seed, trees), seed)?;
    let truth: Vec<bool> = t.rows.iter().map(|r| r.label.is_spam()).collect();
    let title = format!(
        "{} features, {:?}, {folds}-fold stratified cross-validation, seed {seed}",
        t.schema.mode, name
    );
    let rep = EvalReport::new(title, r.pooled, &r.scores, &truth)?;
    let text = rep.to_text();
    fs::write(report, &text).with_context(|| format!("writing {}", report.display()))?;
    let roc_path = match roc {
        Some(p) => p.to_path_buf(),
        None => {
            let mut p = report.as_os_str().to_owned();
            p.push(".roc.csv");
            PathBuf::from(p)
        }
    };
    fs::write(&roc_path, rep.roc.plot_data()).with_context(|| format!("writing {}", roc_path.display()))?;
    print!("{text}");
    Ok(())
}

fn infogain_cmd(features: &Path) -> Result<()> {
    let t = load_features(features)?;
    let ranked = rank_features(&t)?;
    let mut out = io::stdout().lock();
    writeln!(out, "rank column            gain  threshold")?;
    for (i, r) in ranked.iter().enumerate() {
        writeln!(out, "{:>4} {:<15} {:.4}  {}", i + 1, r.name, r.gain, r.threshold)?;
    }
    Ok(())
}

fn score_cmd(model: &Path, graph: &Path, baseline: Option<&Path>, user: u64) -> Result<()> {
    require_file(model)?;
    let mf = ModelFile::load(model).with_context(|| format!("loading model {}", model.display()))?;
    let g = load_graph(graph)?;
    let baseline = baseline.map(TriadBaseline::load).transpose()?;
    let u = g.ids.dense_or_err(user)?;
    let st = build_status_table(&g.graph.degree_table());
    let row = score_features(&g.graph, &st, u, &mf, baseline.as_ref())?;
    let p = mf.model.predict_proba(&row)?;
    println!("{p}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        ensure!(n > 0, "worker count must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Ingest { edges, out } => ingest(&edges, &out),
        Command::Census { graph, user, cap, seed } => census_cmd(&graph, user, cap, seed),
        Command::Baseline {
            graph,
            labels,
            sample,
            seed,
            cap,
            out,
        } => baseline_cmd(&graph, &labels, sample, seed, cap, &out),
        Command::Features {
            graph,
            labels,
            baseline,
            mode,
            out,
        } => features_cmd(&graph, &labels, baseline.as_deref(), mode, &out),
        Command::Synth {
            legit,
            spam,
            scale,
            seed,
            out_edges,
            out_labels,
        } => synth_cmd(legit, spam, scale, seed, &out_edges, &out_labels),
        Command::Train {
            features,
            algo,
            seed,
            trees,
            baseline,
            out,
        } => train_cmd(&features, algo, seed, trees, baseline.as_deref(), &out),
        Command::Evaluate {
            features,
            algo,
            folds,
            seed,
            trees,
            report,
            roc,
        } => evaluate_cmd(&features, algo, folds, seed, trees, &report, roc.as_deref()),
        Command::Infogain { features } => infogain_cmd(&features),
        Command::Score {
            model,
            graph,
            baseline,
            user,
        } => score_cmd(&model, &graph, baseline.as_deref(), user),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
