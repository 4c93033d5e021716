use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use compose_harness::cache::ResponseCache;
use compose_harness::experiment::write_records;
use compose_harness::mock::{oracle_model, oracle_responder, MockServer};
use compose_harness::report::{read_report_csv, write_report_csv};
use compose_harness::{run_experiment, CachedCompleter, ExperimentOptions, Metric, ModelEndpoint};
use compose_tasks::logical::{generate_dataset, GenerateOptions, TaskPair};
use compose_tasks::Setting;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("compose-e2e-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn endpoint(server: &MockServer, model: &str) -> ModelEndpoint {
    let mut ep = ModelEndpoint::new(server.base_url(), model);
    ep.max_concurrent = 8;
    ep
}

#[test]
fn oracle_mock_is_perfect_and_empty_mock_scores_zero() {
    let server = MockServer::start(oracle_responder).unwrap();
    let opts = GenerateOptions {
        n: 8,
        ..Default::default()
    };
    for pair in TaskPair::ALL {
        for setting in Setting::ALL {
            let data = generate_dataset(pair, setting, &opts).unwrap();
            let ep = endpoint(&server, &oracle_model(pair, setting));
            let c = CachedCompleter::http(ep, Arc::new(ResponseCache::in_memory())).unwrap();
            let (report, records) =
                run_experiment(&data, &c, &ExperimentOptions::default()).unwrap();
            assert_eq!(report.rows.len(), 1);
            assert_eq!(
                report.rows[0].mean,
                Some(1.0),
                "{pair} {setting}: {:?}",
                records[0]
            );
            let wer = ExperimentOptions {
                metric: Metric::Wer,
                ..Default::default()
            };
            let (r, _) = run_experiment(&data, &c, &wer).unwrap();
            assert_eq!(r.rows[0].mean, Some(0.0));
        }
    }
    let data = generate_dataset(TaskPair::AB, Setting::Composite, &opts).unwrap();
    let c = CachedCompleter::http(
        endpoint(&server, "empty"),
        Arc::new(ResponseCache::in_memory()),
    )
    .unwrap();
    let (report, _) = run_experiment(&data, &c, &ExperimentOptions::default()).unwrap();
    assert_eq!(report.rows[0].mean, Some(0.0));
}

#[test]
fn rerun_from_disk_cache_is_offline_and_identical() {
    let dir = scratch("cache");
    let server = MockServer::start(oracle_responder).unwrap();
    let data = generate_dataset(
        TaskPair::GH,
        Setting::Simple2,
        &GenerateOptions {
            n: 20,
            ..Default::default()
        },
    )
    .unwrap();
    let ep = endpoint(&server, &oracle_model(TaskPair::GH, Setting::Simple2));
    let run = |records: &str| {
        let cache = Arc::new(ResponseCache::open(&dir.join("cache.jsonl")).unwrap());
        let c = CachedCompleter::http(ep.clone(), cache).unwrap();
        let (report, recs) = run_experiment(&data, &c, &ExperimentOptions::default()).unwrap();
        write_records(std::fs::File::create(dir.join(records)).unwrap(), &recs).unwrap();
        let mut csv = Vec::new();
        write_report_csv(&mut csv, &report.rows).unwrap();
        (csv, c.inner().requests_sent())
    };
    let (first, sent) = run("r1.jsonl");
    assert_eq!(sent, 60);
    let before = server.requests();
    let (second, sent) = run("r2.jsonl");
    assert_eq!(sent, 0);
    assert_eq!(server.requests(), before);
    assert_eq!(first, second);
    assert_eq!(read_report_csv(&second[..]).unwrap().len(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cli_generate_eval_report() {
    let dir = scratch("cli");
    let bin = env!("CARGO_BIN_EXE_compose-icl");
    let server = MockServer::start(oracle_responder).unwrap();
    let data = dir.join("af.jsonl");
    let st = Command::new(bin)
        .args([
            "generate",
            "--task",
            "A+F",
            "--setting",
            "composite",
            "--n",
            "6",
            "--out",
        ])
        .arg(&data)
        .status()
        .unwrap();
    assert!(st.success());
    assert_eq!(std::fs::read_to_string(&data).unwrap().lines().count(), 6);

    let cfg = dir.join("endpoint.toml");
    std::fs::write(
        &cfg,
        format!(
            "base_url = \"{}\"\nmodel = \"{}\"\n",
            server.base_url(),
            oracle_model(TaskPair::AF, Setting::Composite)
        ),
    )
    .unwrap();
    let report = dir.join("report.csv");
    let out = Command::new(bin)
        .args(["eval", "--dataset"])
        .arg(&data)
        .arg("--endpoint-config")
        .arg(&cfg)
        .args(["--metric", "exact_match", "--replications", "3", "--report"])
        .arg(&report)
        .arg("--records")
        .arg(dir.join("records.jsonl"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_report_csv(std::fs::File::open(&report).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].mean, Some(1.0));
    assert_eq!(rows[0].replications, 3);
    assert_eq!(
        std::fs::read_to_string(dir.join("records.jsonl"))
            .unwrap()
            .lines()
            .count(),
        18
    );

    let md = Command::new(bin)
        .arg("report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(md.status.success());
    assert!(String::from_utf8(md.stdout)
        .unwrap()
        .contains("| A+F | composite | exact_match | 100 |"));

    let theory = Command::new(bin)
        .args(["theory", "--experiment", "scaling", "--trials", "10"])
        .output()
        .unwrap();
    assert!(theory.status.success());
    let text = String::from_utf8(theory.stdout).unwrap();
    assert!(text.starts_with("experiment,r_or_setting,mean,std_err,trials,seed\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}
