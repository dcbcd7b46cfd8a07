#![allow(dead_code)]

pub mod oracle;
pub mod random_td;

use std::time::Duration;

use virtual_thing::http_binding::{serve, ServerHandle, ServientConfig};
use virtual_thing::runtime::{EventConfig, EventMode};
use virtual_thing::td_parser::parse_td;

pub async fn start(tds: &[&str], seed: u64, mode: EventMode) -> ServerHandle {
    let tds = tds.iter().map(|t| parse_td(t).unwrap()).collect();
    let config = ServientConfig {
        port: 0,
        seed: Some(seed),
        events: EventConfig::uniform(mode),
        ..ServientConfig::default()
    };
    serve(tds, &config).await.expect("server starts")
}

pub fn client() -> reqwest::Client {
    reqwest::Client::builder().timeout(Duration::from_secs(10)).build().unwrap()
}

/// Reads an SSE response until `count` messages arrived or `within` elapsed.
pub async fn collect_sse(response: reqwest::Response, count: usize, within: Duration) -> Vec<String> {
    use futures::StreamExt;
    let mut body = response.bytes_stream();
    let mut buffer = String::new();
    let mut messages = Vec::new();
    let deadline = tokio::time::sleep(within);
    tokio::pin!(deadline);
    while messages.len() < count {
        tokio::select! {
            _ = &mut deadline => break,
            chunk = body.next() => match chunk {
                Some(Ok(bytes)) => {
                    buffer.push_str(&String::from_utf8_lossy(&bytes));
                    while let Some(end) = buffer.find("\n\n") {
                        let block: String = buffer.drain(..end + 2).collect();
                        let data: Vec<&str> =
                            block.lines().filter_map(|l| l.strip_prefix("data: ")).collect();
                        if !data.is_empty() {
                            messages.push(data.join("\n"));
                        }
                    }
                }
                _ => break,
            },
        }
    }
    messages
}

pub mod process {
    use std::io::{BufRead, BufReader};
    use std::path::{Path, PathBuf};
    use std::process::{Child, Command, Output, Stdio};
    use std::sync::mpsc;
    use std::time::Duration;

    pub fn binary() -> &'static str {
        env!("CARGO_BIN_EXE_virtual-thing")
    }

    pub fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    /// A `virtual-thing run` child process, killed on drop.
    pub struct Running {
        pub child: Child,
        pub base_url: String,
        pub lines: Vec<String>,
    }

    impl Drop for Running {
        fn drop(&mut self) {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }

    /// Starts `run` with the given arguments and waits for it to report its
    /// base URL and thing routes.
    pub fn run(args: &[&str]) -> Running {
        let mut child = Command::new(binary())
            .arg("run")
            .args(args)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn run");
        let stdout = child.stdout.take().unwrap();
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines().map_while(Result::ok) {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut lines = Vec::new();
        let mut base_url = None;
        while let Ok(line) = rx.recv_timeout(Duration::from_secs(20)) {
            if let Some(rest) = line.strip_prefix("servient listening on ") {
                base_url = Some(rest.split(' ').next().unwrap().to_owned());
            }
            let done = line.starts_with("serving ");
            lines.push(line);
            if done && base_url.is_some() {
                // drain the remaining startup lines
                while let Ok(more) = rx.recv_timeout(Duration::from_millis(200)) {
                    lines.push(more);
                }
                break;
            }
        }
        let base_url = base_url.unwrap_or_else(|| panic!("run did not start: {lines:?}"));
        Running { child, base_url, lines }
    }

    pub fn probe(args: &[&str]) -> Output {
        Command::new(binary()).arg("probe").args(args).output().expect("spawn probe")
    }
}
