//! `landmap`: generate the affine suite, compute features, cluster and compare representations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use landmap::analysis::Orientation;
use landmap::ela::FeatureGroup;
use landmap::pipeline::{replay, with_jobs, Config, Pipeline, Report, RepresentationSource};
use landmap::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "landmap", version, about = "Affine BBOB suite, landscape features and cluster analysis")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Recompute stages even when their artifacts are up to date.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, default_value = "landmap-out")]
    out_dir: PathBuf,
    /// Only print errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the suite manifest.
    Generate,
    /// Dump design points and objective values per problem.
    Sample,
    /// Compute the ELA feature table.
    Features {
        /// Comma-separated groups: ela_distr, ela_meta, disp, nbc, ic, pca.
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
    },
    /// Import externally computed representations.
    Ingest {
        /// Extra sources as NAME=PATH.
        #[arg(long = "source", value_name = "NAME=PATH")]
        sources: Vec<String>,
        /// Restrict to these representations.
        names: Vec<String>,
    },
    /// Grid-search clusterings of each representation.
    Cluster {
        /// Grid specification, e.g. "kmeans k=5..500:5 n_init=10,20; birch k=10 threshold=0.5".
        #[arg(long)]
        grid: Option<String>,
        /// Score silhouettes on a seeded subsample of this size.
        #[arg(long)]
        sample_cap: Option<usize>,
        names: Vec<String>,
    },
    /// Coverage, cross-representation similarity, overlaps and alignment scores.
    Analyze {
        /// Performance tables (key columns, `portfolio`, five score columns).
        #[arg(long = "perf")]
        performance: Vec<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        top_m: Option<usize>,
        /// `lower` or `higher` is better.
        #[arg(long)]
        orientation: Option<String>,
    },
    /// Write the visualization bundle.
    ExportViz,
    /// Every stage from generate to export-viz.
    Run,
    /// Re-execute a recorded run into --out-dir and compare artifact hashes.
    Replay { run_manifest: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Data(_) | Error::Io { .. } | Error::Csv(_) | Error::Json(_) => EXIT_DATA,
        Error::Numerical(_) => EXIT_INTERNAL,
    }
}

fn usage(msg: String) -> Error {
    Error::Config(msg)
}

fn load_config(g: &Global) -> Result<Config, Error> {
    let mut c = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = g.seed {
        c.master_seed = s;
    }
    Ok(c)
}

fn apply_overrides(c: &mut Config, command: &Command) -> Result<(), Error> {
    match command {
        Command::Features { groups } if !groups.is_empty() => {
            c.features.groups = groups
                .iter()
                .map(|g| {
                    FeatureGroup::from_prefix(g.trim()).ok_or_else(|| usage(format!("unknown feature group '{g}'")))
                })
                .collect::<Result<_, _>>()?;
        }
        Command::Ingest { sources, .. } => {
            for s in sources {
                let (name, path) = s
                    .split_once('=')
                    .ok_or_else(|| usage(format!("--source expects NAME=PATH, got '{s}'")))?;
                c.representations.retain(|r| r.name != name);
                c.representations.push(RepresentationSource {
                    name: name.to_string(),
                    path: path.into(),
                    standardize: None,
                });
            }
        }
        Command::Cluster { grid, sample_cap, .. } => {
            if grid.is_some() {
                c.cluster.grid = grid.clone();
            }
            if sample_cap.is_some() {
                c.cluster.sample_cap = *sample_cap;
            }
        }
        Command::Analyze {
            performance,
            threshold,
            top_m,
            orientation,
        } => {
            c.analysis.performance.extend(performance.iter().cloned());
            if let Some(t) = threshold {
                c.analysis.threshold = *t;
            }
            if let Some(m) = top_m {
                c.analysis.top_m = *m;
            }
            if let Some(o) = orientation {
                c.analysis.orientation = match o.as_str() {
                    "lower" => Orientation::Lower,
                    "higher" => Orientation::Higher,
                    _ => return Err(usage(format!("orientation must be 'lower' or 'higher', got '{o}'"))),
                };
            }
        }
        _ => {}
    }
    c.validate()
}

fn names(v: &[String]) -> Option<&[String]> {
    (!v.is_empty()).then_some(v)
}

fn execute(cli: Cli) -> Result<Vec<Report>, Error> {
    if let Command::Replay { run_manifest } = &cli.command {
        let r = with_jobs(cli.global.jobs, || replay(run_manifest, &cli.global.out_dir))??;
        let mut lines = vec![format!(
            "replayed into {}: {} artifacts checked, {} mismatched",
            cli.global.out_dir.display(),
            r.checked,
            r.mismatches.len()
        )];
        for (path, want, got) in &r.mismatches {
            lines.push(format!("  {path}: recorded {want}, replayed {got}"));
        }
        let report = Report {
            stage: "replay".into(),
            skipped: false,
            lines,
        };
        if !r.mismatches.is_empty() {
            print_reports(&[report], false);
            return Err(Error::Data("replay did not reproduce every artifact".into()));
        }
        return Ok(vec![report]);
    }
    let mut config = load_config(&cli.global)?;
    apply_overrides(&mut config, &cli.command)?;
    let mut p = Pipeline::open(&cli.global.out_dir, config, cli.global.force)?;
    with_jobs(cli.global.jobs, move || match &cli.command {
        Command::Generate => p.generate().map(|r| vec![r]),
        Command::Sample => p.sample().map(|r| vec![r]),
        Command::Features { .. } => p.features().map(|r| vec![r]),
        Command::Ingest { names: n, .. } => p.ingest(names(n)),
        Command::Cluster { names: n, .. } => p.cluster(names(n)),
        Command::Analyze { .. } => p.analyze().map(|r| vec![r]),
        Command::ExportViz => p.export_viz().map(|r| vec![r]),
        Command::Run => p.run_all(),
        Command::Replay { .. } => unreachable!("handled above"),
    })?
}

fn print_reports(reports: &[Report], quiet: bool) {
    if quiet {
        return;
    }
    for r in reports {
        for l in &r.lines {
            println!("{l}");
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = if cli.global.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let quiet = cli.global.quiet;
    match std::panic::catch_unwind(move || execute(cli)) {
        Ok(Ok(reports)) => {
            print_reports(&reports, quiet);
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
