//! Command-line front end: fit, transform, depth, explain, simulate,
//! benchmark. Exit codes: 0 success, 2 usage error, 3 data error,
//! 4 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde_json::json;

use aca_core::io::{load_model, read_csv, save_model, write_csv, CsvData};
use aca_core::seed::derive;
use aca_core::{
    best_aligned, cell_scores, component_loadings, dataset_depths, fit, gen_labeled,
    oracle_direction, pca_components, transform, Basis, ComponentSet, DepthNotion, Error,
    OptimizerConfig, SearchAlgorithm, Setting, SimulationSpec, StartRule,
};

/// Benchmark runs draw their generator and fit seeds from one master seed.
const SALT_RUN: u64 = 0x52;

#[derive(Parser)]
#[command(
    name = "aca",
    about = "Abnormal component analysis: depth-minimizing directions, synthetic benchmarks, and explanations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Direction-search settings shared by every command that runs the optimizer.
#[derive(Args)]
struct SearchFlags {
    /// Depth notion: pd (symmetric) or apd (asymmetric)
    #[arg(long, default_value = "pd")]
    depth: String,
    /// Direction search: nelder_mead_sphere or refined_random_search
    #[arg(long, default_value = "nelder_mead_sphere")]
    algorithm: String,
    /// Total depth-evaluation budget per search
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Independent optimizer restarts per search
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Start rule: mn (moment guesses) or rn (random)
    #[arg(long, default_value = "mn")]
    start: String,
}

impl SearchFlags {
    fn to_config(&self, seed: u64) -> Result<OptimizerConfig, Error> {
        let config = OptimizerConfig {
            algorithm: SearchAlgorithm::parse(&self.algorithm)?,
            budget_k: self.budget,
            restarts: self.restarts,
            start: StartRule::parse(&self.start)?,
            seed,
            ..OptimizerConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    fn notion(&self) -> Result<DepthNotion, Error> {
        DepthNotion::parse(&self.depth)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit abnormal components to a CSV dataset and save the model
    Fit {
        /// Input data CSV (optional single header row)
        #[arg(long)]
        input: PathBuf,
        /// Output model JSON path
        #[arg(long)]
        output: PathBuf,
        /// Number of components to extract
        #[arg(long)]
        components: usize,
        /// Master seed (required; no hidden entropy)
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Project a dataset onto a fitted model's components
    Transform {
        /// Fitted model JSON
        #[arg(long)]
        model: PathBuf,
        /// Input data CSV
        #[arg(long)]
        input: PathBuf,
        /// Output scores CSV (header AC1..ACp)
        #[arg(long)]
        output: PathBuf,
    },
    /// Per-row projection depth and minimizing direction
    Depth {
        /// Input data CSV
        #[arg(long)]
        input: PathBuf,
        /// Output CSV: depth, then direction coordinates
        #[arg(long)]
        output: PathBuf,
        /// Master seed (rows get independent derived streams)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Variable ranking for a fitted model, optionally cell scores for a point
    Explain {
        /// Fitted model JSON
        #[arg(long)]
        model: PathBuf,
        /// Show at most this many ranked variables
        #[arg(long)]
        top: Option<usize>,
        /// Comma-separated coordinates of one observation to explain
        #[arg(long)]
        point: Option<String>,
        /// Reference data CSV (required with --point; names variables)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Generate a labeled synthetic benchmark dataset
    Simulate {
        /// Setting: mvn_a09, mvn_hcn, ell_t, exp, or mv_sk
        #[arg(long)]
        setting: String,
        /// Total number of rows (clean + anomalous)
        #[arg(long)]
        n: usize,
        /// Dimension
        #[arg(long)]
        d: usize,
        /// Anomaly fraction in [0, 1)
        #[arg(long)]
        eps: f64,
        /// Master seed (required; no hidden entropy)
        #[arg(long)]
        seed: u64,
        /// Degrees of freedom for ell_t
        #[arg(long, default_value_t = 5)]
        df: u32,
        /// Output data CSV
        #[arg(long)]
        data: PathBuf,
        /// Output labels CSV (header "label", true/false per row)
        #[arg(long)]
        labels: PathBuf,
        /// Output meta JSON (anomaly center, covariance, counts)
        #[arg(long)]
        meta: PathBuf,
    },
    /// Repeated draws: direction recovery of abnormal components vs PCA
    Benchmark {
        /// Setting: mvn_a09, mvn_hcn, ell_t, exp, or mv_sk
        #[arg(long)]
        setting: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Degrees of freedom for ell_t
        #[arg(long, default_value_t = 5)]
        df: u32,
        /// Components to fit per run
        #[arg(long, default_value_t = 2)]
        components: usize,
        /// Independent dataset draws
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// Master seed (required; each run derives its own streams)
        #[arg(long)]
        seed: u64,
        /// Output JSON with per-run records and medians
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidInput(_) => 2,
                Error::Data(_) => 3,
                Error::Numeric(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Fit {
            input,
            output,
            components,
            seed,
            search,
        } => cmd_fit(&input, &output, components, seed, &search),
        Command::Transform {
            model,
            input,
            output,
        } => cmd_transform(&model, &input, &output),
        Command::Depth {
            input,
            output,
            seed,
            search,
        } => cmd_depth(&input, &output, seed, &search),
        Command::Explain {
            model,
            top,
            point,
            input,
            json,
        } => cmd_explain(&model, top, point.as_deref(), input.as_deref(), json),
        Command::Simulate {
            setting,
            n,
            d,
            eps,
            seed,
            df,
            data,
            labels,
            meta,
        } => cmd_simulate(&setting, n, d, eps, seed, df, &data, &labels, &meta),
        Command::Benchmark {
            setting,
            n,
            d,
            eps,
            df,
            components,
            runs,
            seed,
            output,
            search,
        } => cmd_benchmark(&setting, n, d, eps, df, components, runs, seed, &output, &search),
    }
}

fn parse_setting(name: &str, df: u32) -> Result<Setting, Error> {
    match name {
        "mvn_a09" => Ok(Setting::MvnA09),
        "mvn_hcn" => Ok(Setting::MvnHcn),
        "ell_t" => Ok(Setting::EllT { df }),
        "exp" => Ok(Setting::Exp),
        "mv_sk" => Ok(Setting::MvSk),
        other => Err(Error::invalid(format!(
            "unknown setting '{other}', expected mvn_a09|mvn_hcn|ell_t|exp|mv_sk"
        ))),
    }
}

/// Variable names for reports: CSV header when present, else x1..xd.
fn names_or_default(csv: Option<&CsvData>, d: usize) -> Vec<String> {
    match csv.and_then(|c| c.header.clone()) {
        Some(h) if h.len() == d => h,
        _ => (1..=d).map(|j| format!("x{j}")).collect(),
    }
}

fn cmd_fit(
    input: &std::path::Path,
    output: &std::path::Path,
    components: usize,
    seed: u64,
    search: &SearchFlags,
) -> Result<(), Error> {
    if components == 0 {
        return Err(Error::invalid("--components must be at least 1"));
    }
    let csv = read_csv(input)?;
    let data = csv.to_matrix()?;
    if components > data.ncols() {
        return Err(Error::invalid(format!(
            "--components {} exceeds data dimension {}",
            components,
            data.ncols()
        )));
    }
    let config = search.to_config(seed)?;
    let notion = search.notion()?;
    let model = fit(&data, components, notion, &config)?;
    save_model(&model, output)?;
    let names = names_or_default(Some(&csv), data.ncols());
    for i in 1..=model.num_components() {
        let report = component_loadings(&model, i)?;
        println!(
            "AC{i}: min depth {} (anchor row {})",
            model.min_depths()[i - 1],
            model.anchor_rows()[i - 1] + 1
        );
        let parts: Vec<String> = report
            .entries
            .iter()
            .take(3)
            .map(|e| {
                format!(
                    "{} {:.4} ({:.1}%)",
                    names[e.variable - 1],
                    e.loading,
                    e.share * 100.0
                )
            })
            .collect();
        println!("  top loadings: {}", parts.join(", "));
    }
    Ok(())
}

fn cmd_transform(
    model_path: &std::path::Path,
    input: &std::path::Path,
    output: &std::path::Path,
) -> Result<(), Error> {
    let model = load_model(model_path)?;
    let csv = read_csv(input)?;
    let header: Vec<String> = (1..=model.num_components())
        .map(|j| format!("AC{j}"))
        .collect();
    if csv.rows.is_empty() {
        return write_csv(output, Some(&header), &[]);
    }
    let data = csv.to_matrix()?;
    let scores = transform(&model, &data)?;
    let rows: Vec<Vec<f64>> = (0..scores.nrows())
        .map(|i| scores.row(i).iter().copied().collect())
        .collect();
    write_csv(output, Some(&header), &rows)
}

fn cmd_depth(
    input: &std::path::Path,
    output: &std::path::Path,
    seed: u64,
    search: &SearchFlags,
) -> Result<(), Error> {
    let csv = read_csv(input)?;
    let data = csv.to_matrix()?;
    let config = search.to_config(seed)?;
    let notion = search.notion()?;
    let basis = Basis::identity(data.ncols());
    let results = dataset_depths(&data, &basis, notion, &config)?;
    let mut header = vec!["depth".to_string()];
    header.extend((1..=data.ncols()).map(|j| format!("u{j}")));
    let rows: Vec<Vec<f64>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.depth];
            row.extend(r.direction.coords().iter().copied());
            row
        })
        .collect();
    write_csv(output, Some(&header), &rows)
}

fn parse_point(text: &str, d: usize) -> Result<DVector<f64>, Error> {
    let coords: Result<Vec<f64>, Error> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("--point entry '{}' is not a finite number", t.trim())))
        })
        .collect();
    let coords = coords?;
    if coords.len() != d {
        return Err(Error::invalid(format!(
            "--point has {} coordinates, model expects {d}",
            coords.len()
        )));
    }
    Ok(DVector::from_vec(coords))
}

fn cmd_explain(
    model_path: &std::path::Path,
    top: Option<usize>,
    point: Option<&str>,
    input: Option<&std::path::Path>,
    as_json: bool,
) -> Result<(), Error> {
    let model = load_model(model_path)?;
    let d = model.ambient_dim();
    let csv = match input {
        Some(p) => Some(read_csv(p)?),
        None => None,
    };
    let names = names_or_default(csv.as_ref(), d);
    let report = component_loadings(&model, 1)?;
    let limit = top.unwrap_or(report.entries.len());

    let scores = match point {
        Some(text) => {
            let csv = csv
                .as_ref()
                .ok_or_else(|| Error::invalid("--point requires --input for the reference data"))?;
            let data = csv.to_matrix()?;
            let y = parse_point(text, d)?;
            Some(cell_scores(&y, &data, model.config())?)
        }
        None => None,
    };

    if as_json {
        let ranking: Vec<serde_json::Value> = report
            .entries
            .iter()
            .take(limit)
            .map(|e| {
                json!({
                    "variable": e.variable,
                    "name": names[e.variable - 1],
                    "loading": e.loading,
                    "share": e.share,
                })
            })
            .collect();
        let doc = json!({
            "component": 1,
            "ranking": ranking,
            "cell_scores": scores.as_ref().map(|s| s.iter().copied().collect::<Vec<f64>>()),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).map_err(|e| Error::data(e.to_string()))?
        );
        return Ok(());
    }

    println!("Variable ranking by AC1 loading:");
    for e in report.entries.iter().take(limit) {
        println!(
            "  {:>3}. {}  loading {:.6}  share {:.2}%",
            e.variable,
            names[e.variable - 1],
            e.loading,
            e.share * 100.0
        );
    }
    if let Some(s) = scores {
        println!("Cell scores for the given point:");
        for (j, v) in s.iter().enumerate() {
            println!("  {}  {v:.6}", names[j]);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    setting: &str,
    n: usize,
    d: usize,
    eps: f64,
    seed: u64,
    df: u32,
    data_path: &std::path::Path,
    labels_path: &std::path::Path,
    meta_path: &std::path::Path,
) -> Result<(), Error> {
    let spec = SimulationSpec {
        setting: parse_setting(setting, df)?,
        n,
        d,
        eps,
        seed,
    };
    let ds = gen_labeled(&spec)?;
    let names: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    let rows: Vec<Vec<f64>> = (0..ds.data.nrows())
        .map(|i| ds.data.row(i).iter().copied().collect())
        .collect();
    write_csv(data_path, Some(&names), &rows)?;

    let mut labels_text = String::from("label\n");
    for &lab in &ds.labels {
        labels_text.push_str(if lab { "true\n" } else { "false\n" });
    }
    std::fs::write(labels_path, labels_text)
        .map_err(|e| Error::data(format!("{}: {e}", labels_path.display())))?;

    let n_anomalies = ds.labels.iter().filter(|&&l| l).count();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| ds.normal_cov[(i, j)]).collect())
        .collect();
    let meta = json!({
        "mu_tilde": ds.anomaly_center.iter().copied().collect::<Vec<f64>>(),
        "cov": cov,
        "n": n,
        "d": d,
        "eps": eps,
        "seed": seed,
        "n_anomalies": n_anomalies,
    });
    let mut text =
        serde_json::to_string_pretty(&meta).map_err(|e| Error::data(e.to_string()))?;
    text.push('\n');
    std::fs::write(meta_path, text)
        .map_err(|e| Error::data(format!("{}: {e}", meta_path.display())))
}

#[allow(clippy::too_many_arguments)]
fn cmd_benchmark(
    setting: &str,
    n: usize,
    d: usize,
    eps: f64,
    df: u32,
    components: usize,
    runs: usize,
    seed: u64,
    output: &std::path::Path,
    search: &SearchFlags,
) -> Result<(), Error> {
    if components == 0 {
        return Err(Error::invalid("--components must be at least 1"));
    }
    if runs == 0 {
        return Err(Error::invalid("--runs must be at least 1"));
    }
    let setting = parse_setting(setting, df)?;
    let notion = search.notion()?;
    let mut per_run = Vec::with_capacity(runs);
    let mut alpha_aca = Vec::with_capacity(runs);
    let mut alpha_pca = Vec::with_capacity(runs);
    let mut j_aca = Vec::with_capacity(runs);
    let mut j_pca = Vec::with_capacity(runs);
    for run in 0..runs {
        let gen_seed = derive(seed, SALT_RUN, run as u64, 0);
        let fit_seed = derive(seed, SALT_RUN, run as u64, 1);
        let spec = SimulationSpec {
            setting,
            n,
            d,
            eps,
            seed: gen_seed,
        };
        let ds = gen_labeled(&spec)?;
        // The planted direction: whitened offset of the anomaly center from
        // the clean-population mean, estimated by the mean of clean rows.
        let mut clean_mean = DVector::zeros(d);
        let mut clean = 0usize;
        for (i, &lab) in ds.labels.iter().enumerate() {
            if !lab {
                clean_mean += ds.data.row(i);
                clean += 1;
            }
        }
        if clean == 0 {
            return Err(Error::data("draw produced no clean rows"));
        }
        clean_mean /= clean as f64;
        let u_star = oracle_direction(&ds.normal_cov, &(&ds.anomaly_center - &clean_mean))?;

        let config = search.to_config(fit_seed)?;
        let model = fit(&ds.data, components, notion, &config)?;
        let aca_set = ComponentSet::new(model.components().to_vec(), "aca")?;
        // Both arms expose the same number of components, so the best-aligned
        // index is comparable and stays in [1, components] for either method.
        let pca_set = pca_components(&ds.data, components)?;
        let (ja, aa) = best_aligned(&aca_set, &u_star)?;
        let (jp, ap) = best_aligned(&pca_set, &u_star)?;
        per_run.push(json!({
            "run": run,
            "aca": {"j_hat": ja, "alpha_hat": aa},
            "pca": {"j_hat": jp, "alpha_hat": ap},
        }));
        alpha_aca.push(aa);
        alpha_pca.push(ap);
        j_aca.push(ja as f64);
        j_pca.push(jp as f64);
    }
    let doc = json!({
        "setting": setting.name(),
        "n": n,
        "d": d,
        "eps": eps,
        "components": components,
        "depth_notion": notion.as_str(),
        "budget_k": search.budget,
        "restarts": search.restarts,
        "runs": runs,
        "seed": seed,
        "per_run": per_run,
        "medians": {
            "aca": {"j_hat": aca_core::robust::median(&j_aca)?, "alpha_hat": aca_core::robust::median(&alpha_aca)?},
            "pca": {"j_hat": aca_core::robust::median(&j_pca)?, "alpha_hat": aca_core::robust::median(&alpha_pca)?},
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::data(e.to_string()))?;
    text.push('\n');
    std::fs::write(output, text).map_err(|e| Error::data(format!("{}: {e}", output.display())))
}
