//! Replicated evaluation of a prompt dataset against a completer.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use compose_core::Seed;
use compose_tasks::instance::{render_prompt, write_jsonl, PromptInstance};
use compose_tasks::logical::{draw_demonstrations, TaskPair};
use compose_tasks::Setting;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::client::Completer;
use crate::error::{Error, Result};
use crate::metrics::{normalize_prediction, Metric};
use crate::report::ReportRow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub metric: Metric,
    pub replications: usize,
    /// Seeds demonstration resampling for replications after the first.
    pub seed: u64,
    pub max_concurrent: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            metric: Metric::ExactMatch,
            replications: 3,
            seed: 0,
            max_concurrent: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub task_pair: String,
    pub setting: Setting,
    pub replication: usize,
    /// Verbatim continuation; `None` when the request failed.
    pub raw_response: Option<String>,
    pub prediction: String,
    pub score: Option<f64>,
    pub metric: Metric,
    pub latency_ms: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub metric: Metric,
    pub replications: usize,
    /// SHA-256 of the dataset as JSONL.
    pub dataset_hash: String,
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.failed == 0)
    }
}

fn id_tag(id: &str) -> u64 {
    let h = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(h[..8].try_into().unwrap())
}

/// The prompt shown in replication `rep`. Replication 0 is the dataset
/// itself. Later ones redraw the demonstrations of logical tasks (same test
/// item, same setting) and reshuffle the demonstration order of anything
/// else.
pub fn resample(instance: &PromptInstance, rep: usize, seed: u64) -> Result<PromptInstance> {
    if rep == 0 {
        return Ok(instance.clone());
    }
    let mut rng = Seed(seed)
        .derive(rep as u64)
        .derive(id_tag(&instance.id))
        .stream(0);
    let mut out = instance.clone();
    match instance.task_pair.parse::<TaskPair>() {
        Ok(pair) => {
            out.demonstrations = draw_demonstrations(
                pair,
                instance.setting,
                instance.demonstrations.len(),
                &instance.test_input,
                &mut rng,
            )?;
        }
        Err(_) => out.demonstrations.shuffle(&mut rng),
    }
    Ok(out)
}

pub fn dataset_hash(instances: &[PromptInstance]) -> Result<String> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, instances)?;
    Ok(Sha256::digest(&buf)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

fn evaluate_one(
    completer: &dyn Completer,
    inst: &PromptInstance,
    rep: usize,
    opts: &ExperimentOptions,
) -> EvalRecord {
    let mut record = EvalRecord {
        instance_id: inst.id.clone(),
        task_pair: inst.task_pair.clone(),
        setting: inst.setting,
        replication: rep,
        raw_response: None,
        prediction: String::new(),
        score: None,
        metric: opts.metric,
        latency_ms: 0.0,
        error: None,
    };
    let prompt = match resample(inst, rep, opts.seed) {
        Ok(p) => render_prompt(&p),
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let start = Instant::now();
    let result = completer.complete(&prompt);
    record.latency_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(raw) => {
            record.prediction = normalize_prediction(&raw);
            record.score = Some(opts.metric.score(&record.prediction, &inst.gold));
            record.raw_response = Some(raw);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Scores every instance in every replication with at most
/// `max_concurrent` requests in flight. Records come back in
/// (replication, instance) order regardless of completion order.
pub fn run_experiment(
    instances: &[PromptInstance],
    completer: &dyn Completer,
    opts: &ExperimentOptions,
) -> Result<(RunReport, Vec<EvalRecord>)> {
    if opts.replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    if opts.max_concurrent == 0 {
        return Err(Error::Config("max_concurrent must be at least 1".into()));
    }
    if let Some(bad) = instances.iter().find(|i| i.gold.is_empty()) {
        return Err(Error::Config(format!(
            "instance {} has no gold answer",
            bad.id
        )));
    }
    let jobs: Vec<(usize, &PromptInstance)> = (0..opts.replications)
        .flat_map(|rep| instances.iter().map(move |inst| (rep, inst)))
        .collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let workers = opts.max_concurrent.min(jobs.len().max(1));
    let mut indexed: Vec<(usize, EvalRecord)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                        let Some(&(rep, inst)) = jobs.get(i) else {
                            break;
                        };
                        done.push((i, evaluate_one(completer, inst, rep, opts)));
                    }
                    done
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    let records: Vec<EvalRecord> = indexed.into_iter().map(|(_, r)| r).collect();

    let model = completer.model_name();
    let report = RunReport {
        rows: aggregate(&records, &model, opts.metric, opts.replications),
        model,
        metric: opts.metric,
        replications: opts.replications,
        dataset_hash: dataset_hash(instances)?,
    };
    Ok((report, records))
}

/// Mean over replications of each replication's mean score, per
/// (task pair, setting). Failed requests are left out of the means and
/// counted in `failed`.
pub fn aggregate(
    records: &[EvalRecord],
    model: &str,
    metric: Metric,
    replications: usize,
) -> Vec<ReportRow> {
    #[derive(Default)]
    struct Acc {
        per_rep: BTreeMap<usize, (f64, usize)>,
        failed: usize,
    }
    let mut groups: BTreeMap<(String, Setting), Acc> = BTreeMap::new();
    for r in records {
        let acc = groups.entry((r.task_pair.clone(), r.setting)).or_default();
        match r.score {
            Some(s) => {
                let e = acc.per_rep.entry(r.replication).or_default();
                e.0 += s;
                e.1 += 1;
            }
            None => acc.failed += 1,
        }
    }
    groups
        .into_iter()
        .map(|((task_pair, setting), acc)| {
            let means: Vec<f64> = acc
                .per_rep
                .values()
                .map(|(sum, n)| sum / *n as f64)
                .collect();
            let mean = (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64);
            ReportRow {
                task_pair,
                setting: setting.to_string(),
                model: model.to_string(),
                metric: metric.to_string(),
                mean,
                replications,
                failed: acc.failed,
            }
        })
        .collect()
}

pub fn write_records<W: Write>(mut w: W, records: &[EvalRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
