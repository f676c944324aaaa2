//! Minimal canned-response HTTP server for registry client tests.
//!
//! Serves a fixed route table over a local TCP listener; each route may
//! carry extra headers (pagination links, Retry-After) and a scripted
//! sequence of statuses for retry tests.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

#[derive(Clone)]
pub struct CannedResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl CannedResponse {
    pub fn json(status: u16, body: &str) -> Self {
        CannedResponse {
            status,
            headers: vec![("Content-Type".into(), "application/json".into())],
            body: body.as_bytes().to_vec(),
        }
    }

    pub fn text(status: u16, body: &str) -> Self {
        CannedResponse {
            status,
            headers: vec![("Content-Type".into(), "text/plain; charset=utf-8".into())],
            body: body.as_bytes().to_vec(),
        }
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.into(), value.into()));
        self
    }
}

type RouteKey = String; // "path?query" with the query sorted

pub struct FixtureServer {
    addr: String,
    routes: Arc<Mutex<HashMap<RouteKey, Vec<CannedResponse>>>>,
    hits: Arc<AtomicUsize>,
    request_log: Arc<Mutex<Vec<String>>>,
}

impl FixtureServer {
    /// Starts the server on an ephemeral port; runs until the process exits.
    pub fn start() -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind fixture server");
        let addr = format!("http://{}", listener.local_addr().unwrap());
        let routes: Arc<Mutex<HashMap<RouteKey, Vec<CannedResponse>>>> =
            Arc::new(Mutex::new(HashMap::new()));
        let hits = Arc::new(AtomicUsize::new(0));
        let request_log = Arc::new(Mutex::new(Vec::new()));

        {
            let routes = Arc::clone(&routes);
            let hits = Arc::clone(&hits);
            let request_log = Arc::clone(&request_log);
            thread::spawn(move || {
                for stream in listener.incoming() {
                    let Ok(stream) = stream else { continue };
                    let routes = Arc::clone(&routes);
                    let hits = Arc::clone(&hits);
                    let request_log = Arc::clone(&request_log);
                    thread::spawn(move || {
                        let _ = serve_one(stream, &routes, &hits, &request_log);
                    });
                }
            });
        }

        FixtureServer { addr, routes, hits, request_log }
    }

    pub fn base_url(&self) -> &str {
        &self.addr
    }

    /// Registers a single response for a route, replacing any existing queue.
    pub fn route(&self, path_and_query: &str, response: CannedResponse) {
        self.routes
            .lock()
            .unwrap()
            .insert(normalize_key(path_and_query), vec![response]);
    }

    /// Registers a sequence of responses consumed one per request; the last
    /// response repeats once the queue drains.
    pub fn route_sequence(&self, path_and_query: &str, responses: Vec<CannedResponse>) {
        self.routes
            .lock()
            .unwrap()
            .insert(normalize_key(path_and_query), responses);
    }

    pub fn hit_count(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<String> {
        self.request_log.lock().unwrap().clone()
    }
}

fn normalize_key(path_and_query: &str) -> RouteKey {
    match path_and_query.split_once('?') {
        None => path_and_query.to_string(),
        Some((path, query)) => {
            let mut params: Vec<&str> = query.split('&').filter(|s| !s.is_empty()).collect();
            params.sort_unstable();
            format!("{path}?{}", params.join("&"))
        }
    }
}

fn serve_one(
    mut stream: TcpStream,
    routes: &Mutex<HashMap<RouteKey, Vec<CannedResponse>>>,
    hits: &AtomicUsize,
    request_log: &Mutex<Vec<String>>,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let _method = parts.next().unwrap_or("");
    let target = parts.next().unwrap_or("/").to_string();

    // drain headers (and any body-length we do not expect)
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" || line == "\n" {
            break;
        }
        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = v.trim().parse().unwrap_or(0);
        }
    }
    if content_length > 0 {
        let mut sink = vec![0u8; content_length];
        reader.read_exact(&mut sink)?;
    }

    hits.fetch_add(1, Ordering::SeqCst);
    request_log.lock().unwrap().push(target.clone());

    let response = {
        let mut routes = routes.lock().unwrap();
        match routes.get_mut(&normalize_key(&target)) {
            Some(queue) if queue.len() > 1 => Some(queue.remove(0)),
            Some(queue) => queue.first().cloned(),
            None => None,
        }
    }
    .unwrap_or_else(|| CannedResponse::text(404, "not found"));

    let reason = match response.status {
        200 => "OK",
        404 => "Not Found",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    };
    let mut out = format!("HTTP/1.1 {} {}\r\n", response.status, reason);
    for (name, value) in &response.headers {
        out.push_str(&format!("{name}: {value}\r\n"));
    }
    out.push_str(&format!("Content-Length: {}\r\nConnection: close\r\n\r\n", response.body.len()));
    stream.write_all(out.as_bytes())?;
    stream.write_all(&response.body)?;
    stream.flush()
}
