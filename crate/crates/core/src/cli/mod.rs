//! Command-line interface: `run` serves virtual things, `probe` checks a
//! Thing (virtual or real) against its own Thing Description.

pub mod config;
pub mod probe;

use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::http_binding::{serve, LogLevel, ServientConfig};
use crate::runtime::affordance_href;
use crate::td_model::{AffordanceKind, ThingDescription};
use crate::td_parser::parse_td;
use config::{load_file, merge, FileConfig, FlagOverrides};
use probe::{probe, ProbeOptions};

#[derive(Debug, Parser)]
#[command(name = "virtual-thing", version, about = "Virtualize Web of Things devices from their Thing Descriptions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve virtual things for one or more Thing Description files.
    Run(RunArgs),
    /// Exercise every affordance of a TD (URL or file) and report PASS/FAIL.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Thing Description files.
    #[arg(required = true, value_name = "TD")]
    pub td_paths: Vec<PathBuf>,
    /// Address to bind and advertise [default: 127.0.0.1].
    #[arg(long)]
    pub address: Option<String>,
    /// HTTP port; 0 picks a free one [default: 8080].
    #[arg(long)]
    pub port: Option<u16>,
    /// none, random or fixed:SECONDS [default: random].
    #[arg(long, value_name = "MODE")]
    pub event_mode: Option<String>,
    /// Fixed interval for one event, EVENT=SECONDS. Repeatable.
    #[arg(long = "event-interval", value_name = "EVENT=SECONDS")]
    pub event_intervals: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// error, warn, info or debug [default: info].
    #[arg(long, value_name = "LEVEL")]
    pub log_level: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// URL of a served TD, or a TD file.
    pub target: String,
    /// Seconds to listen on each event stream.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the report as a JSON array.
    #[arg(long)]
    pub json: bool,
}

impl RunArgs {
    fn flags(&self) -> FlagOverrides {
        FlagOverrides {
            address: self.address.clone(),
            port: self.port,
            event_mode: self.event_mode.clone(),
            event_intervals: self.event_intervals.clone(),
            seed: self.seed,
            log_level: self.log_level.clone(),
        }
    }

    /// Merges the config file (if any) with the flags.
    pub fn resolve(&self) -> anyhow::Result<ServientConfig> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        Ok(merge(file, &self.flags())?)
    }
}

pub fn init_logging(level: LogLevel) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(format!("virtual_thing={level},warn")));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

fn load_tds(paths: &[PathBuf]) -> anyhow::Result<Vec<ThingDescription>> {
    paths
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
            parse_td(&text).with_context(|| format!("{}: invalid Thing Description", path.display()))
        })
        .collect()
}

fn route_list(base_url: &str, td: &ThingDescription) -> Vec<String> {
    let mut routes = vec![format!("GET  {base_url}/{}", crate::runtime::url_segment(&td.title))];
    for name in td.properties.keys() {
        let href = affordance_href(base_url, &td.title, AffordanceKind::Property, name);
        let methods = if td.properties[name].read_only { "GET" } else { "GET|PUT" };
        routes.push(format!("{methods:<7} {href}"));
    }
    for name in td.actions.keys() {
        routes.push(format!("POST    {}", affordance_href(base_url, &td.title, AffordanceKind::Action, name)));
    }
    for name in td.events.keys() {
        routes.push(format!("SSE     {}", affordance_href(base_url, &td.title, AffordanceKind::Event, name)));
    }
    routes
}

/// `run`: serves until interrupted. Returns the process exit code.
pub async fn run(args: RunArgs) -> i32 {
    let config = match args.resolve() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err:#}");
            return 1;
        }
    };
    init_logging(config.log_level);
    let tds = match load_tds(&args.td_paths) {
        Ok(tds) => tds,
        Err(err) => {
            eprintln!("error: {err:#}");
            return 1;
        }
    };
    let server = match serve(tds, &config).await {
        Ok(server) => server,
        Err(err) => {
            eprintln!("error: {err}");
            return 1;
        }
    };
    println!("servient listening on {} (seed {})", server.base_url(), server.servient().seed());
    for thing in server.servient().things() {
        println!("serving {} at {}", thing.title(), thing.url());
        for route in route_list(server.base_url(), thing.original_td()) {
            println!("  {route}");
        }
    }
    tokio::signal::ctrl_c().await.ok();
    println!("shutting down");
    match server.shutdown().await {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

/// `probe`: 0 when every affordance passes, 1 on any failure, 2 when the
/// target cannot be loaded.
pub async fn run_probe(args: ProbeArgs) -> i32 {
    init_logging(LogLevel::Warn);
    if !(args.duration.is_finite() && args.duration >= 0.0) {
        eprintln!("error: --duration must be a non-negative number of seconds");
        return 2;
    }
    let options = ProbeOptions { duration: Duration::from_secs_f64(args.duration), seed: args.seed };
    match probe(&args.target, &options).await {
        Ok(report) => {
            if args.json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            report.exit_code()
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
