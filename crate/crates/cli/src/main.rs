//! `friendrec`: the pipeline as subcommands.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage, 3 cold-start user,
//! 4 unknown user.

use std::fs::File;
use std::io::BufReader;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use friendrec_core::{
    assign_books, build_profiles, cold_start_check, default_k_range, encode_books, load_annotated,
    load_edges, persist::write_atomic, recommend, split, sweep, write_annotated, write_edges,
    Adjacency, BookCatalog, EdgeRecord, UserId, UserProfile, DEFAULT_K,
};
use friendrec_service::{AppState, Config, DEFAULT_PORT, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "friendrec", version, about = "Book-based KNN friend recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a raw two-column edge list.
    Ingest {
        #[arg(long)]
        edges: PathBuf,
        /// Write the validated rows as `user,friend` CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign books to every edge and write a `user,friend,book` CSV.
    Annotate {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        catalog: CatalogArg,
    },
    /// Sweep K over a range on a 70/30 split and report accuracy per K.
    Evaluate {
        /// Annotated `user,friend,book` CSV.
        #[arg(long)]
        data: PathBuf,
        /// Defaults to 2.
        #[arg(long)]
        kmin: Option<usize>,
        /// Defaults to min(15, floor(sqrt(train rows))).
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        ratio: f64,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        catalog: CatalogArg,
    },
    /// Print ranked friend recommendations for one user.
    Recommend {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        user: UserId,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[command(flatten)]
        catalog: CatalogArg,
    },
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct CatalogArg {
    /// Book labels, one per line or comma-separated. Defaults to B0..B9.
    #[arg(long = "catalog")]
    path: Option<PathBuf>,
}

impl CatalogArg {
    fn load(&self) -> anyhow::Result<BookCatalog> {
        match &self.path {
            None => Ok(BookCatalog::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(BookCatalog::parse(&text)?)
            }
        }
    }
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = DEFAULT_PORT)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    #[arg(long, env = "DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Raw edge list used to initialise an empty data directory; the bundled
    /// list when omitted.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Serve files from this directory for non-API paths.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    ColdStart(String),
    NotFound(String),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::ColdStart(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        Err(Failure::NotFound(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { edges, out } => {
            let rows = read_raw(&edges)?;
            if let Some(out) = out {
                let mut buf = Vec::new();
                write_edges(&mut buf, &rows)?;
                write_atomic(&out, &buf)?;
            }
            println!("{} rows", rows.len());
        }
        Command::Annotate {
            edges,
            seed,
            out,
            catalog,
        } => {
            let catalog = catalog.load()?;
            let annotated = assign_books(&read_raw(&edges)?, &catalog, seed)?;
            let mut buf = Vec::new();
            write_annotated(&mut buf, &annotated)?;
            write_atomic(&out, &buf)?;
            println!("seed {seed}");
            println!("{} rows annotated with {} books", annotated.len(), catalog.len());
        }
        Command::Evaluate {
            data,
            kmin,
            kmax,
            seed,
            ratio,
            out,
            catalog,
        } => {
            let catalog = catalog.load()?;
            let edges = read_annotated(&data, &catalog)?;
            let rows = encode_books(&edges, &catalog)?;
            let parts = split(&rows, ratio, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let (dmin, dmax) = default_k_range(parts.train.len());
            let (kmin, kmax) = (kmin.unwrap_or(dmin), kmax.unwrap_or(dmax));
            if kmin == 0 || kmin > kmax || kmax > parts.train.len() {
                return Err(Failure::Usage(format!(
                    "invalid K range {kmin}..={kmax}: need 1 <= kmin <= kmax <= {}",
                    parts.train.len()
                )));
            }
            let report = sweep(&parts, kmin, kmax)?;
            print!("{}", report.to_table());
            println!("chosen K: {}", report.chosen_k);
            if let Some(out) = out {
                write_atomic(&out, report.to_json()?.as_bytes())?;
            }
        }
        Command::Recommend {
            data,
            user,
            k,
            limit,
            catalog,
        } => {
            if k == 0 || limit == 0 {
                return Err(Failure::Usage("--k and --limit must be positive".into()));
            }
            let catalog = catalog.load()?;
            let edges = read_annotated(&data, &catalog)?;
            let mut profiles = build_profiles(&edges, &catalog)?;
            let adjacency = Adjacency::from_edges(&edges);
            // users seen only in the friend column exist but have read nothing
            for u in adjacency.users() {
                profiles
                    .entry(u)
                    .or_insert_with(|| UserProfile::empty(u, catalog.len()));
            }
            match cold_start_check(&profiles, user) {
                Err(_) => return Err(Failure::NotFound(format!("unknown user {user}"))),
                Ok(true) => return Err(Failure::ColdStart(format!("user {user} has no books read"))),
                Ok(false) => {}
            }
            let recs = recommend(&profiles, &adjacency, &catalog, user, k, limit)?;
            println!("{:<8} {:<10} SHARED BOOKS", "USER", "SCORE");
            for r in recs {
                println!("{:<8} {:<10.6} {}", r.candidate, r.score, r.shared_books.join(" "));
            }
        }
        Command::Serve(args) => serve(args)?,
    }
    Ok(())
}

fn read_raw(path: &Path) -> anyhow::Result<Vec<EdgeRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_edges(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn read_annotated(path: &Path, catalog: &BookCatalog) -> anyhow::Result<Vec<EdgeRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_annotated(BufReader::new(file), catalog).with_context(|| format!("reading {}", path.display()))
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let config = Config {
        data_dir: args.data_dir,
        seed: args.seed,
        edges: args.edges,
        catalog: args.catalog,
        static_dir: args.static_dir,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        // load before binding: the port refuses connections until data is ready
        let state = Arc::new(AppState::open(&config)?);
        let listener = friendrec_service::bind(SocketAddr::new(args.host, args.port)).await?;
        let snap = state.snapshot();
        println!(
            "listening on http://{} ({} rows, data dir {})",
            listener.local_addr()?,
            snap.edges.len(),
            config.data_dir.display()
        );
        drop(snap);
        friendrec_service::serve(listener, state).await?;
        Ok(())
    })
}
