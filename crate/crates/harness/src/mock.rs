//! Minimal in-process HTTP server speaking the completion protocol, for
//! tests and offline dry runs. One thread per connection, `Connection:
//! close` on every reply.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use compose_tasks::instance::parse_prompt;
use compose_tasks::logical::{gold_for, test_part, TaskPair};
use compose_tasks::Setting;
use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct MockRequest {
    pub path: String,
    pub model: String,
    pub prompt: String,
    pub body: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MockReply {
    Text(String),
    Status(u16, String),
    /// Sent verbatim as a 200 body.
    Raw(String),
}

pub type Responder = dyn Fn(&MockRequest) -> MockReply + Send + Sync;

struct Shared {
    responder: Box<Responder>,
    requests: AtomicU64,
    failures_left: AtomicU64,
    failure_status: u16,
}

pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    stop: Arc<AtomicBool>,
    accept: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start(
        responder: impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
    ) -> std::io::Result<Self> {
        Self::start_with_failures(responder, 0, 503)
    }

    /// The first `failures` requests are answered with `status` before the
    /// responder is consulted.
    pub fn start_with_failures(
        responder: impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
        failures: u64,
        status: u16,
    ) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            responder: Box::new(responder),
            requests: AtomicU64::new(0),
            failures_left: AtomicU64::new(failures),
            failure_status: status,
        });
        let stop = Arc::new(AtomicBool::new(false));
        let accept = {
            let shared = Arc::clone(&shared);
            let stop = Arc::clone(&stop);
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    if let Ok(stream) = stream {
                        let shared = Arc::clone(&shared);
                        std::thread::spawn(move || {
                            let _ = serve(stream, &shared);
                        });
                    }
                }
            })
        };
        Ok(Self {
            addr,
            shared,
            stop,
            accept: Some(accept),
        })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    /// Requests received so far, including injected failures.
    pub fn requests(&self) -> u64 {
        self.shared.requests.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let path = request_line
        .split_whitespace()
        .nth(1)
        .unwrap_or("")
        .to_string();
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" || line == "\n" {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let n = shared.requests.fetch_add(1, Ordering::SeqCst);

    let injected = shared
        .failures_left
        .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |f| f.checked_sub(1))
        .is_ok();
    let reply = if injected {
        MockReply::Status(shared.failure_status, "injected failure".into())
    } else {
        match serde_json::from_slice::<Value>(&body) {
            Ok(body) => {
                let chat = path.ends_with("/chat/completions");
                let prompt = if chat {
                    body["messages"][0]["content"].as_str()
                } else {
                    body["prompt"].as_str()
                };
                let req = MockRequest {
                    path: path.clone(),
                    model: body["model"].as_str().unwrap_or("").to_string(),
                    prompt: prompt.unwrap_or("").to_string(),
                    body: body.clone(),
                };
                match (shared.responder)(&req) {
                    MockReply::Text(t) if chat => MockReply::Raw(
                        json!({"choices": [{"message": {"role": "assistant", "content": t}}]})
                            .to_string(),
                    ),
                    MockReply::Text(t) => {
                        MockReply::Raw(json!({"choices": [{"text": t}]}).to_string())
                    }
                    other => other,
                }
            }
            Err(e) => MockReply::Status(400, e.to_string()),
        }
    };
    let (status, text) = match reply {
        MockReply::Raw(t) => (200, t),
        MockReply::Status(s, t) => (s, t),
        MockReply::Text(_) => unreachable!("text replies are wrapped above"),
    };
    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {status} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nx-request-id: mock-{n}\r\nConnection: close\r\n\r\n{text}",
        reason(status),
        text.len()
    )?;
    out.flush()
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    }
}

/// Model name that makes [`oracle_responder`] answer a logical task pair
/// under the given setting.
pub fn oracle_model(pair: TaskPair, setting: Setting) -> String {
    format!("oracle/{pair}/{setting}")
}

/// A "model" that reads the rendered prompt back, applies the rule oracle
/// to the test input and continues the prompt the way a completion model
/// would (leading space, then the next `input:` line). The model name
/// `empty` always answers with nothing.
pub fn oracle_responder(req: &MockRequest) -> MockReply {
    if req.model == "empty" {
        return MockReply::Text(String::new());
    }
    let Some(spec) = req.model.strip_prefix("oracle/") else {
        return MockReply::Status(404, format!("unknown model {:?}", req.model));
    };
    let Some((pair, setting)) = spec.split_once('/') else {
        return MockReply::Status(404, format!("bad oracle model {:?}", req.model));
    };
    let (Ok(pair), Ok(setting)) = (pair.parse::<TaskPair>(), setting.parse::<Setting>()) else {
        return MockReply::Status(404, format!("bad oracle model {:?}", req.model));
    };
    let answer = parse_prompt(&req.prompt)
        .and_then(|p| gold_for(pair, test_part(setting), &p.test_input))
        .map(|mut g| g.swap_remove(0));
    match answer {
        Ok(a) => MockReply::Text(format!(" {a}\ninput:")),
        Err(e) => MockReply::Text(format!(" cannot parse: {e}")),
    }
}
