use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use compose_harness::cache::{cache_key, ResponseCache};
use compose_harness::endpoint::Api;
use compose_harness::mock::{MockReply, MockServer};
use compose_harness::{CachedCompleter, Completer, Error, HttpCompleter, ModelEndpoint};

fn echo(req: &compose_harness::mock::MockRequest) -> MockReply {
    MockReply::Text(format!("{}|{}", req.model, req.prompt))
}

fn endpoint(server: &MockServer) -> ModelEndpoint {
    let mut ep = ModelEndpoint::new(server.base_url(), "m");
    ep.initial_backoff_ms = 5;
    ep.max_retries = 3;
    ep
}

#[test]
fn request_body_follows_the_completion_schema() {
    let seen = Arc::new(std::sync::Mutex::new(None));
    let s2 = Arc::clone(&seen);
    let server = MockServer::start(move |req| {
        *s2.lock().unwrap() = Some(req.body.clone());
        MockReply::Text("ok".into())
    })
    .unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    assert_eq!(c.complete("input: x\noutput:").unwrap(), "ok");
    let body = seen.lock().unwrap().clone().unwrap();
    assert_eq!(body["model"], "m");
    assert_eq!(body["prompt"], "input: x\noutput:");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["max_tokens"], 48);
    assert_eq!(body["stop"][0], "\n");
}

#[test]
fn chat_route() {
    let server = MockServer::start(echo).unwrap();
    let mut ep = endpoint(&server);
    ep.api = Api::Chat;
    let c = HttpCompleter::new(ep).unwrap();
    assert_eq!(c.complete("hi").unwrap(), "m|hi");
}

#[test]
fn retries_rate_limits_then_succeeds() {
    let server = MockServer::start_with_failures(echo, 2, 429).unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    let t = Instant::now();
    assert_eq!(c.complete("p").unwrap(), "m|p");
    assert_eq!(server.requests(), 3);
    assert_eq!(c.requests_sent(), 3);
    // two backoffs of 5 ms and 10 ms
    assert!(t.elapsed() >= Duration::from_millis(15));
}

#[test]
fn exhausted_retries_report_the_request_id() {
    let server = MockServer::start_with_failures(echo, 100, 503).unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    match c.complete("p") {
        Err(Error::Transport {
            request_id,
            attempts,
            ..
        }) => {
            assert_eq!(attempts, 4);
            assert_eq!(request_id, "mock-3");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn client_errors_are_not_retried() {
    let server = MockServer::start(|_| MockReply::Status(400, "bad".into())).unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    assert!(matches!(
        c.complete("p"),
        Err(Error::Transport { attempts: 1, .. })
    ));
    assert_eq!(server.requests(), 1);
}

#[test]
fn malformed_bodies_are_protocol_errors() {
    let server = MockServer::start(|req| {
        if req.prompt == "json" {
            MockReply::Raw("{\"choices\": []}".into())
        } else {
            MockReply::Raw("not json".into())
        }
    })
    .unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    assert!(matches!(c.complete("json"), Err(Error::Protocol { .. })));
    assert!(matches!(c.complete("text"), Err(Error::Protocol { .. })));
}

#[test]
fn missing_api_key_is_reported() {
    let mut ep = ModelEndpoint::new("http://127.0.0.1:9/v1", "m");
    ep.api_key_env = Some("COMPOSE_HARNESS_TEST_KEY_THAT_IS_NOT_SET".into());
    assert!(matches!(
        HttpCompleter::new(ep),
        Err(Error::MissingApiKey(_))
    ));
}

#[test]
fn cache_hits_never_reach_the_network() {
    let server = MockServer::start(echo).unwrap();
    let ep = endpoint(&server);
    let cache = Arc::new(ResponseCache::in_memory());
    cache
        .insert(&cache_key(&ep, "seeded"), "from cache")
        .unwrap();
    let c = CachedCompleter::http(ep, Arc::clone(&cache)).unwrap();
    assert_eq!(c.complete("seeded").unwrap(), "from cache");
    assert_eq!(server.requests(), 0);
    assert_eq!(c.complete("fresh").unwrap(), "m|fresh");
    assert_eq!(c.complete("fresh").unwrap(), "m|fresh");
    assert_eq!(server.requests(), 1);
    assert_eq!(cache.len(), 2);
}

#[test]
fn concurrency_is_bounded() {
    let in_flight = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let (f, p) = (Arc::clone(&in_flight), Arc::clone(&peak));
    let server = MockServer::start(move |_| {
        let now = f.fetch_add(1, Ordering::SeqCst) + 1;
        p.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(Duration::from_millis(20));
        f.fetch_sub(1, Ordering::SeqCst);
        MockReply::Text(" x".into())
    })
    .unwrap();
    let data = compose_tasks::logical::generate_dataset(
        compose_tasks::logical::TaskPair::AF,
        compose_tasks::Setting::Simple1,
        &compose_tasks::logical::GenerateOptions {
            n: 12,
            ..Default::default()
        },
    )
    .unwrap();
    let c = HttpCompleter::new(endpoint(&server)).unwrap();
    let opts = compose_harness::ExperimentOptions {
        replications: 1,
        max_concurrent: 3,
        ..Default::default()
    };
    compose_harness::run_experiment(&data, &c, &opts).unwrap();
    assert_eq!(server.requests(), 12);
    assert!(peak.load(Ordering::SeqCst) <= 3);
    assert!(peak.load(Ordering::SeqCst) >= 2);
}
