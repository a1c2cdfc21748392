use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rumorlens_core::aggregation::FilterSpec;
use rumorlens_service::export::{export_svg, Target, View};
use rumorlens_service::synth::{generate, write_dump, SynthSpec};
use rumorlens_service::{load_dataset, Api, Config, Dataset, PipelineError};

#[derive(Parser)]
#[command(name = "rumorlens", version, about = "Rumor cascade analytics: build, serve and export")]
struct Cli {
    /// Config file; defaults to $RUMORLENS_CONFIG, then built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Posts, one JSON object per line.
    #[arg(long)]
    posts: PathBuf,
    /// User profiles, one JSON object per line.
    #[arg(long)]
    users: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build the dataset and print a summary.
    Ingest {
        #[command(flatten)]
        inputs: Inputs,
        /// Also write the full build report here.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Build the dataset and print the build report as JSON.
    Report {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Serve the JSON API.
    Serve {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        host: Option<String>,
        /// Append-only verdict log.
        #[arg(long)]
        audit_log: Option<PathBuf>,
    },
    /// Render one view to an SVG file.
    ExportSvg {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        view: View,
        /// Case id; required for the propagation view.
        #[arg(long = "case")]
        case_id: Option<String>,
        /// FilterSpec JSON selecting the projected cases.
        #[arg(long, conflicts_with = "case_id")]
        filter: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic dump (posts.jsonl, users.jsonl).
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        /// Use the full reference size (936 cases / 80,000 reposts / 53,843 users).
        #[arg(long)]
        reference_scale: bool,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 3000)]
        descendants: usize,
        #[arg(long, default_value_t = 2000)]
        users: usize,
        #[arg(long, default_value_t = 2020)]
        seed: u64,
    },
}

fn build(config: &Option<PathBuf>, inputs: &Inputs) -> Result<Dataset> {
    let cfg = Config::resolve(config.as_deref())?;
    match load_dataset(&inputs.posts, &inputs.users, cfg) {
        Ok(ds) => Ok(ds),
        Err(e) => {
            for d in e.diagnostics() {
                eprintln!("{}", serde_json::to_string(d)?);
            }
            Err(e).context("pipeline failed")
        }
    }
}

fn write_report(ds: &Dataset, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(&ds.report)?;
    std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { inputs, report_out } => {
            let ds = build(&cli.config, &inputs)?;
            let r = &ds.report;
            println!(
                "{} cases, {} descendants ({} retweets, {} comments), {} dropped, {} users, {} diagnostics, {:.0} ms",
                r.cases,
                r.descendants,
                r.retweets,
                r.comments,
                r.posts_dropped,
                r.users_read,
                r.diagnostics.len(),
                r.timings.total_ms
            );
            if let Some(path) = report_out {
                write_report(&ds, &path)?;
            }
        }
        Command::Report { inputs } => {
            let ds = build(&cli.config, &inputs)?;
            println!("{}", serde_json::to_string_pretty(&ds.report)?);
        }
        Command::Serve { inputs, port, host, audit_log } => {
            let ds = build(&cli.config, &inputs)?;
            let server = &ds.config.server;
            let host = host.unwrap_or_else(|| server.host.clone());
            let addr: SocketAddr = format!("{host}:{}", port.unwrap_or(server.port))
                .parse()
                .with_context(|| format!("bad listen address {host}"))?;
            let mut api = Api::new(ds);
            if let Some(p) = audit_log {
                api = api.with_audit_log(p);
            }
            tokio::runtime::Runtime::new()?.block_on(rumorlens_service::server::serve(Arc::new(api), addr))?;
        }
        Command::ExportSvg { inputs, view, case_id, filter, out } => {
            let ds = Arc::new(build(&cli.config, &inputs)?);
            let target = match (case_id, filter) {
                (Some(id), _) => Target::Case(id),
                (None, Some(f)) => Target::Filter(serde_json::from_str::<FilterSpec>(&f).context("parsing --filter")?),
                (None, None) => Target::Filter(FilterSpec::default()),
            };
            export_svg(&ds, view, &target, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Synth { out_dir, reference_scale, cases, descendants, users, seed } => {
            let base = if reference_scale { SynthSpec::reference_scale() } else { SynthSpec::small(cases, descendants, users) };
            let data = generate(&SynthSpec { seed, ..base });
            let (p, u) = write_dump(&data, &out_dir)?;
            println!("wrote {} posts to {} and {} users to {}", data.posts.len(), p.display(), data.users.len(), u.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<PipelineError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
