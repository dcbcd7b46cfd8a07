//! HTTP binding: one servient, many things, JSON payloads and SSE events.
//!
//! | Route | Success |
//! |---|---|
//! | `GET /{thing}` | 200, rewritten TD (`application/td+json`) |
//! | `GET /{thing}/properties` | 200, object of all property values |
//! | `GET /{thing}/properties/{name}` | 200, value |
//! | `PUT /{thing}/properties/{name}` | 204 |
//! | `POST /{thing}/actions/{name}` | 200 with output, else 204 |
//! | `GET /{thing}/events/{name}` | 200, `text/event-stream` |

mod routes;

use std::fmt;
use std::net::SocketAddr;
use std::str::FromStr;
use std::sync::Arc;

use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tracing::info;

use crate::runtime::{EventConfig, RuntimeError, Servient, TokioClock};
use crate::td_model::ThingDescription;

pub use routes::router;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogLevel {
    Error,
    Warn,
    #[default]
    Info,
    Debug,
}

impl LogLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            LogLevel::Error => "error",
            LogLevel::Warn => "warn",
            LogLevel::Info => "info",
            LogLevel::Debug => "debug",
        }
    }
}

impl FromStr for LogLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "error" => Ok(LogLevel::Error),
            "warn" | "warning" => Ok(LogLevel::Warn),
            "info" => Ok(LogLevel::Info),
            "debug" => Ok(LogLevel::Debug),
            _ => Err(format!("unknown log level \"{s}\" (expected error, warn, info or debug)")),
        }
    }
}

impl fmt::Display for LogLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where and how the servient runs. Port 0 asks the OS for a free port.
#[derive(Debug, Clone, PartialEq)]
pub struct ServientConfig {
    pub address: String,
    pub port: u16,
    pub events: EventConfig,
    pub seed: Option<u64>,
    pub log_level: LogLevel,
}

impl Default for ServientConfig {
    fn default() -> Self {
        ServientConfig {
            address: "127.0.0.1".into(),
            port: 8080,
            events: EventConfig::default(),
            seed: None,
            log_level: LogLevel::Info,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {address}:{port}: {source}")]
    BindFailure {
        address: String,
        port: u16,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

/// A running servient.
#[derive(Debug)]
pub struct ServerHandle {
    local_addr: SocketAddr,
    servient: Arc<Servient>,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    /// `http://<address>:<port>`, the prefix of every served URL.
    pub fn base_url(&self) -> &str {
        self.servient.base_url()
    }

    pub fn servient(&self) -> &Arc<Servient> {
        &self.servient
    }

    /// Closes event streams, lets in-flight requests finish and stops the server.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        self.servient.stop_events();
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        (&mut self.task).await.unwrap_or_else(|e| Err(std::io::Error::other(e)))
    }

    /// Resolves when the server stops on its own.
    pub async fn wait(&mut self) -> std::io::Result<()> {
        (&mut self.task).await.unwrap_or_else(|e| Err(std::io::Error::other(e)))
    }
}

fn host_for_url(address: &str) -> String {
    if address.contains(':') && !address.starts_with('[') {
        format!("[{address}]")
    } else {
        address.to_owned()
    }
}

/// Binds the configured address, creates one virtual thing per TD and starts
/// serving them together with their event schedulers.
pub async fn serve(tds: Vec<ThingDescription>, config: &ServientConfig) -> Result<ServerHandle, ServeError> {
    let bind_failure = |source| ServeError::BindFailure {
        address: config.address.clone(),
        port: config.port,
        source,
    };
    let listener = TcpListener::bind((config.address.as_str(), config.port)).await.map_err(bind_failure)?;
    let local_addr = listener.local_addr().map_err(bind_failure)?;
    let base_url = format!("http://{}:{}", host_for_url(&config.address), local_addr.port());

    let mut servient = Servient::new(&base_url, config.seed, config.events.clone());
    for td in tds {
        servient.create_virtual_thing(td)?;
    }
    info!(base_url, seed = servient.seed(), "servient ready");
    let servient = Arc::new(servient);
    servient.start_events(Arc::new(TokioClock::new()));

    let (tx, rx) = oneshot::channel();
    let app = router(servient.clone());
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(ServerHandle { local_addr, servient, shutdown: Some(tx), task })
}
