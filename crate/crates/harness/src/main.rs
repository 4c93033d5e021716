use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use compose_core::lab::{
    estimate_alignment, run_case_study, run_confined_experiment, run_overlap_experiment,
    scaling_bound_curve, ExperimentConfig, ExperimentDocument, ResultRow,
};
use compose_core::Seed;
use compose_harness::cache::ResponseCache;
use compose_harness::error::{Error, Result};
use compose_harness::experiment::{run_experiment, write_records, ExperimentOptions};
use compose_harness::protocol::Protocol;
use compose_harness::report::{read_report_csv, write_report_csv, ReportTable};
use compose_harness::{CachedCompleter, Metric, ModelEndpoint};
use compose_tasks::instance::{read_jsonl, write_jsonl, PromptInstance};
use compose_tasks::linguistic::{generate_linguistic_dataset, LinguisticOptions, LinguisticTask};
use compose_tasks::logical::{generate_dataset, GenerateOptions, TaskPair};
use compose_tasks::Setting;

#[derive(Parser)]
#[command(
    name = "compose-icl",
    version,
    about = "Compositional in-context learning: theory simulations, task generation and model evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Logical,
    Linguistic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Theory {
    Confined,
    Overlap,
    Scaling,
    Alignment,
    CaseStudy,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Write prompt instances as JSONL.
    Generate {
        #[arg(long, value_enum, default_value = "logical")]
        suite: Suite,
        /// Task pair (e.g. A+B) or linguistic task (T1, T2); `all` for every one.
        #[arg(long, default_value = "all")]
        task: String,
        /// simple1, simple2, composite, composite-in-context or all.
        #[arg(long, default_value = "all")]
        setting: String,
        /// Protocol file supplying n, k, seed and the instruction flag.
        #[arg(long)]
        protocol: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        no_instruction: bool,
        /// Candidate demonstrations per linguistic pool.
        #[arg(long, default_value_t = 3000)]
        pool_size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the linear-attention simulations and write a result CSV.
    Theory {
        #[arg(long, value_enum, default_value = "all")]
        experiment: Theory,
        /// Experiment document (fixture plus n, trials, seeds) as JSON;
        /// defaults to d=4 split 2+2, identity covariance, N=40.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a dataset against a model endpoint.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        endpoint_config: PathBuf,
        #[arg(long)]
        protocol: Option<PathBuf>,
        #[arg(long)]
        metric: Option<Metric>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Response cache; defaults to `<dataset>.cache.jsonl`.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Merge report CSVs into one table.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Markdown output; printed to stdout when omitted.
        #[arg(long)]
        markdown: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

fn settings(arg: &str) -> Result<Vec<Setting>> {
    if arg == "all" {
        return Ok(Setting::ALL.to_vec());
    }
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse::<Setting>()
                .map_err(|e| Error::Config(e.to_string()))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn generate(
    suite: Suite,
    task: &str,
    setting: &str,
    protocol: Option<PathBuf>,
    n: Option<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    no_instruction: bool,
    pool_size: usize,
    out: &Path,
) -> Result<()> {
    let proto = protocol
        .as_deref()
        .map(Protocol::load)
        .transpose()?
        .unwrap_or_default();
    let settings = settings(setting)?;
    let mut items: Vec<PromptInstance> = Vec::new();
    match suite {
        Suite::Logical => {
            let pairs: Vec<TaskPair> = if task == "all" {
                TaskPair::ALL.to_vec()
            } else {
                task.split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|e: compose_tasks::Error| Error::Config(e.to_string()))
                    })
                    .collect::<Result<_>>()?
            };
            let opts = GenerateOptions {
                n: n.unwrap_or(proto.n),
                k: k.unwrap_or(proto.k),
                seed: seed.unwrap_or(proto.seed),
                instruction: proto.instruction && !no_instruction,
            };
            for pair in pairs {
                for &s in &settings {
                    items.extend(generate_dataset(pair, s, &opts)?);
                }
            }
        }
        Suite::Linguistic => {
            let tasks: Vec<LinguisticTask> = match task {
                "all" => LinguisticTask::ALL.to_vec(),
                "T1" => vec![LinguisticTask::T1],
                "T2" => vec![LinguisticTask::T2],
                other => return Err(Error::Config(format!("unknown linguistic task {other:?}"))),
            };
            let defaults = LinguisticOptions::default();
            let opts = LinguisticOptions {
                n: n.unwrap_or(defaults.n),
                k: k.unwrap_or(defaults.k),
                seed: seed.unwrap_or(defaults.seed),
                pool_size,
            };
            for t in tasks {
                for &s in &settings {
                    items.extend(generate_linguistic_dataset(t, s, &opts)?);
                }
            }
        }
    }
    write_jsonl(create(out)?, &items)?;
    eprintln!("wrote {} instances to {}", items.len(), out.display());
    Ok(())
}

fn theory(
    which: Theory,
    config: Option<PathBuf>,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let configs: Vec<ExperimentConfig> = match &config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::File {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str::<ExperimentDocument>(&text)?.configs()?
        }
        None => vec![ExperimentConfig::desk_default(trials, Seed(seed))],
    };
    let runs = |t: Theory| which == t || which == Theory::All;
    let mut rows: Vec<ResultRow> = Vec::new();
    for c in &configs {
        if runs(Theory::Confined) {
            let o = run_confined_experiment(c)?;
            rows.extend(o.rows("confined", c.seed));
        }
        if runs(Theory::Overlap) {
            let o = run_overlap_experiment(c)?;
            rows.extend(o.rows("overlap", c.seed));
        }
    }
    let first = &configs[0];
    if runs(Theory::Scaling) {
        for p in scaling_bound_curve(&first.cov, first.n)? {
            let row = |name: &str, v: f64| ResultRow {
                experiment: name.into(),
                r_or_setting: p.r.to_string(),
                mean: v,
                std_err: 0.0,
                trials: 0,
                seed: first.seed.0,
            };
            rows.push(row("scaling", p.bound));
            rows.push(row("scaling-truncated", p.truncated_bound));
        }
    }
    if runs(Theory::Alignment) {
        let a = estimate_alignment(&first.cov, first.n, first.trials, first.seed)?;
        rows.push(ResultRow {
            experiment: "alignment".into(),
            r_or_setting: "empirical".into(),
            mean: a.empirical_inner,
            std_err: a.std_err,
            trials: a.trials,
            seed: first.seed.0,
        });
        rows.push(ResultRow {
            experiment: "alignment".into(),
            r_or_setting: "analytic".into(),
            mean: a.analytic_trace,
            std_err: 0.0,
            trials: 0,
            seed: first.seed.0,
        });
    }
    if runs(Theory::CaseStudy) {
        for s in run_case_study()? {
            for (i, v) in s.prediction.iter().enumerate() {
                rows.push(ResultRow {
                    experiment: "case-study".into(),
                    r_or_setting: format!("{} [{i}]", s.name),
                    mean: *v,
                    std_err: 0.0,
                    trials: 0,
                    seed: 0,
                });
            }
        }
    }
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn eval(
    dataset: &Path,
    endpoint_config: &Path,
    protocol: Option<PathBuf>,
    metric: Option<Metric>,
    replications: Option<usize>,
    seed: Option<u64>,
    cache: Option<PathBuf>,
    records: Option<PathBuf>,
    report: &Path,
) -> Result<()> {
    let proto = protocol
        .as_deref()
        .map(Protocol::load)
        .transpose()?
        .unwrap_or_default();
    let endpoint = ModelEndpoint::load(endpoint_config)?;
    let file = File::open(dataset).map_err(|source| Error::File {
        path: dataset.to_path_buf(),
        source,
    })?;
    let instances = read_jsonl(BufReader::new(file))?;
    let cache_path = cache.unwrap_or_else(|| {
        let mut p = dataset.as_os_str().to_owned();
        p.push(".cache.jsonl");
        PathBuf::from(p)
    });
    let cache = Arc::new(ResponseCache::open(&cache_path)?);
    let completer = CachedCompleter::http(endpoint.clone(), cache)?;
    let opts = ExperimentOptions {
        metric: metric.unwrap_or(proto.metric),
        replications: replications.unwrap_or(proto.replications),
        seed: seed.unwrap_or(proto.seed),
        max_concurrent: endpoint.max_concurrent,
    };
    let (run, recs) = run_experiment(&instances, &completer, &opts)?;
    if let Some(p) = records {
        write_records(create(&p)?, &recs)?;
    }
    write_report_csv(create(report)?, &run.rows)?;
    eprintln!(
        "{} instances x {} replications, {} HTTP requests, dataset {}",
        instances.len(),
        opts.replications,
        completer.inner().requests_sent(),
        &run.dataset_hash[..12]
    );
    if !run.is_complete() {
        eprintln!("warning: some requests failed; affected settings are marked in the report");
    }
    print!("{}", ReportTable::new(&run.rows).to_markdown());
    Ok(())
}

fn report(inputs: &[PathBuf], csv_out: Option<PathBuf>, markdown: Option<PathBuf>) -> Result<()> {
    let mut rows = Vec::new();
    for p in inputs {
        let f = File::open(p).map_err(|source| Error::File {
            path: p.clone(),
            source,
        })?;
        rows.extend(read_report_csv(f)?);
    }
    if let Some(p) = csv_out {
        write_report_csv(create(&p)?, &rows)?;
    }
    let md = ReportTable::new(&rows).to_markdown();
    match markdown {
        Some(p) => create(&p)?.write_all(md.as_bytes())?,
        None => print!("{md}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate {
            suite,
            task,
            setting,
            protocol,
            n,
            k,
            seed,
            no_instruction,
            pool_size,
            out,
        } => generate(
            suite,
            &task,
            &setting,
            protocol,
            n,
            k,
            seed,
            no_instruction,
            pool_size,
            &out,
        ),
        Command::Theory {
            experiment,
            config,
            trials,
            seed,
            out,
        } => theory(experiment, config, trials, seed, out),
        Command::Eval {
            dataset,
            endpoint_config,
            protocol,
            metric,
            replications,
            seed,
            cache,
            records,
            report: out,
        } => eval(
            &dataset,
            &endpoint_config,
            protocol,
            metric,
            replications,
            seed,
            cache,
            records,
            &out,
        ),
        Command::Report {
            inputs,
            csv,
            markdown,
        } => report(&inputs, csv, markdown),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
