//! `ges`: validate, import, compute and serve lab footprint inventories.
//!
//! Exit codes: 0 success, 1 domain error (invalid inventory, no importable
//! rows, missing factor), 2 usage or environment error (bad flags,
//! unreadable files, unusable config).

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Parser, Subcommand};
use ges_core::engine::{compute_inventory, EngineConfig};
use ges_core::factors::FactorSet;
use ges_core::geodesy::RouteCorrection;
use ges_core::ingestion::{normalize_trips, parse_commute_csv, parse_travel_tsv, Gazetteer, RowError};
use ges_core::inventory::{validate_inventory, Inventory};
use ges_core::report::{file_name, Locale, ReportBundle};

#[derive(Parser)]
#[command(name = "ges", version, about = "Carbon-footprint accounting for research labs")]
struct Cli {
    /// Emission factor set (JSON). Defaults to the bundled set.
    #[arg(long, global = true, value_name = "FILE")]
    factors: Option<PathBuf>,
    /// Extra cities in geonames TSV layout, added to the bundled gazetteer.
    #[arg(long, global = true, value_name = "FILE")]
    gazetteer: Option<PathBuf>,
    /// Route uplifts and haul thresholds (JSON) replacing the defaults.
    #[arg(long, global = true, value_name = "FILE")]
    route_correction: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = Locale::En)]
    locale: Locale,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an inventory and list every finding.
    Validate { inventory: PathBuf },
    /// Replace the trips of an inventory with a travel TSV export.
    ImportTravel {
        inventory: PathBuf,
        travel: PathBuf,
        /// Where to write the updated inventory (default: in place).
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Replace the commute survey of an inventory with a CSV export.
    ImportCommutes {
        inventory: PathBuf,
        commutes: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Compute the footprint. Without --out the result JSON goes to stdout.
    Compute {
        inventory: PathBuf,
        /// Directory receiving the result and every report.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
}

enum Failure {
    Domain(anyhow::Error),
    Usage(anyhow::Error),
}

type Outcome = Result<(), Failure>;

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Startup configuration, resolved before any command runs.
struct CliConfig {
    factors: FactorSet,
    gazetteer: Gazetteer,
    engine: EngineConfig,
    locale: Locale,
}

impl CliConfig {
    fn resolve(cli: &Cli) -> Result<Self, Failure> {
        let factors = match &cli.factors {
            None => FactorSet::bundled(),
            Some(p) => FactorSet::load(&read_input(p).map_err(usage)?)
                .with_context(|| format!("factor set {}", p.display()))
                .map_err(usage)?,
        };
        let mut gazetteer = Gazetteer::bundled();
        if let Some(p) = &cli.gazetteer {
            let text = String::from_utf8(read_input(p).map_err(usage)?)
                .with_context(|| format!("gazetteer {} is not UTF-8", p.display()))
                .map_err(usage)?;
            gazetteer.add_cities(&text).with_context(|| format!("gazetteer {}", p.display())).map_err(usage)?;
        }
        let mut engine = EngineConfig::default();
        if let Some(p) = &cli.route_correction {
            let rc: RouteCorrection = serde_json::from_slice(&read_input(p).map_err(usage)?)
                .with_context(|| format!("route correction {}", p.display()))
                .map_err(usage)?;
            rc.validate().with_context(|| format!("route correction {}", p.display())).map_err(usage)?;
            engine.route_correction = rc;
        }
        Ok(CliConfig { factors, gazetteer, engine, locale: cli.locale })
    }
}

fn run(cli: Cli) -> Outcome {
    if let Command::Serve { config } = &cli.command {
        return serve(config.as_deref());
    }
    let cfg = CliConfig::resolve(&cli)?;
    match cli.command {
        Command::Validate { inventory } => validate(&inventory),
        Command::ImportTravel { inventory, travel, output } => {
            distinct_stdin(&inventory, &travel)?;
            let mut inv = load_inventory(&inventory)?;
            let (rows, mut errors) = parse_travel_tsv(&read_input(&travel).map_err(usage)?).map_err(domain)?;
            let travel = normalize_trips(&rows, &cfg.gazetteer, &cfg.engine.route_correction);
            errors.extend(travel.errors.iter().cloned());
            errors.sort_by_key(|e| e.line);
            report_rows("error", &errors);
            report_rows("warning", &travel.warnings);
            let legs = travel.leg_count();
            if legs == 0 {
                return Err(domain(anyhow!("no travel rows could be imported")));
            }
            inv.trips = travel.trips;
            save_inventory(&inv, output.as_deref().unwrap_or(&inventory))?;
            eprintln!("imported {legs} legs, {} rows rejected", errors.len());
            Ok(())
        }
        Command::ImportCommutes { inventory, commutes, output } => {
            distinct_stdin(&inventory, &commutes)?;
            let mut inv = load_inventory(&inventory)?;
            let (responses, errors) = parse_commute_csv(&read_input(&commutes).map_err(usage)?).map_err(domain)?;
            report_rows("error", &errors);
            if responses.is_empty() {
                return Err(domain(anyhow!("no survey responses could be imported")));
            }
            let n = responses.len();
            inv.commute_responses = responses;
            save_inventory(&inv, output.as_deref().unwrap_or(&inventory))?;
            eprintln!("imported {n} responses, {} rows rejected", errors.len());
            Ok(())
        }
        Command::Compute { inventory, out } => compute(&cfg, &inventory, out.as_deref()),
        Command::Serve { .. } => unreachable!(),
    }
}

fn validate(path: &Path) -> Outcome {
    let inv = load_inventory(path)?;
    let findings = validate_inventory(&inv);
    if findings.is_empty() {
        return Ok(());
    }
    for f in &findings {
        eprintln!("{}: {}", f.path, f.message);
    }
    Err(domain(anyhow!("{} finding(s)", findings.len())))
}

fn compute(cfg: &CliConfig, path: &Path, out: Option<&Path>) -> Outcome {
    let inv = load_inventory(path)?;
    let result = match compute_inventory(&inv, &cfg.factors, &cfg.engine) {
        Ok(r) => r,
        Err(ges_core::engine::EngineError::InvalidInventory(findings)) => {
            for f in &findings {
                eprintln!("{}: {}", f.path, f.message);
            }
            return Err(domain(anyhow!("{} finding(s)", findings.len())));
        }
        Err(e) => return Err(domain(e)),
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let json = result.to_json_bytes();
    let Some(dir) = out else {
        return write_output(Path::new("-"), &json);
    };
    let bundle = ReportBundle::render(&result, cfg.locale);
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).map_err(usage)?;
    let (lab, year) = (&inv.lab.name, inv.lab.year);
    let mut files = vec![(file_name(lab, year, "result", "json"), json)];
    files.extend(bundle.files(lab, year));
    files.push((file_name(lab, year, "synthetic", "txt"), bundle.synthetic_text.clone().into_bytes()));
    for (name, bytes) in &files {
        write_output(&dir.join(name), bytes)?;
    }
    print!("{}", bundle.synthetic_text);
    Ok(())
}

fn serve(config: Option<&Path>) -> Outcome {
    let cfg = ges_service::ServiceConfig::load(config).map_err(|e| usage(e.into()))?;
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let rt = tokio::runtime::Runtime::new().context("cannot start runtime").map_err(usage)?;
    rt.block_on(ges_service::serve(&cfg, async {
        let _ = tokio::signal::ctrl_c().await;
    }))
    .map_err(|e| usage(e.into()))
}

fn is_stdio(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn distinct_stdin(a: &Path, b: &Path) -> Outcome {
    if is_stdio(a) && is_stdio(b) {
        return Err(usage(anyhow!("only one input can be read from stdin")));
    }
    Ok(())
}

fn read_input(p: &Path) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    if is_stdio(p) {
        std::io::stdin().read_to_end(&mut buf).context("cannot read stdin")?;
    } else {
        buf = std::fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
    }
    Ok(buf)
}

fn write_output(p: &Path, bytes: &[u8]) -> Outcome {
    let res = if is_stdio(p) {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush())
    } else {
        std::fs::write(p, bytes)
    };
    res.with_context(|| format!("cannot write {}", p.display())).map_err(usage)
}

fn load_inventory(p: &Path) -> Result<Inventory, Failure> {
    let bytes = read_input(p).map_err(usage)?;
    Inventory::from_json(&bytes).with_context(|| format!("{} is not a valid inventory document", p.display())).map_err(domain)
}

fn save_inventory(inv: &Inventory, p: &Path) -> Outcome {
    let mut text = inv.to_json();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_output(p, text.as_bytes())
}

fn report_rows(kind: &str, rows: &[RowError]) {
    for r in rows {
        eprintln!("{kind}: line {}: {}", r.line, r.reason);
    }
}
