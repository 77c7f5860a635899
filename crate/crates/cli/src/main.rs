//! `unbsim`: run Monte Carlo batches and sweeps, train decode statistics,
//! and solve BS-to-band assignments from stored statistics.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use unb_core::assign::{build_p3_objective, build_p4_objective, solve};
use unb_core::channel::ChannelRealization;
use unb_core::harness::{self, SweepParam};
use unb_core::rng::{streams, substream};
use unb_core::traffic::generate_topology;
use unb_core::training::{run_full_training, run_low_overhead_training};
use unb_core::{DecodeStats, Point2D, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "unbsim", version, about = "Multiband UNB uplink simulator and BS band assignment")]
struct Cli {
    /// Master seed; overrides `master_seed` from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo realizations per batch.
    #[arg(long, global = true, default_value_t = 200)]
    realizations: usize,

    /// Flat key-value config file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted, except for `train`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Record measured solver time in the `wall_time_s` column.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one Monte Carlo batch and write per-realization results.
    Simulate,
    /// Run one batch per parameter value.
    Sweep {
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        /// Comma-separated values, or `start:stop:step`.
        #[arg(long, value_parser = parse_values)]
        values: Values,
    },
    /// Solve for an assignment from a stored statistics table.
    Solve {
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, value_enum)]
        objective: Objective,
        /// BS locations as `x,y` rows; required for p4.
        #[arg(long)]
        locations: Option<PathBuf>,
        /// Number of bands for p4; defaults to the config value.
        #[arg(long)]
        bands: Option<usize>,
    },
    /// Simulate training for one realization and write its statistics table.
    Train {
        /// Probe only this band and copy its estimates to every band.
        #[arg(long)]
        low_overhead: bool,
        /// Realization index whose topology and channel are used.
        #[arg(long, default_value_t = 0)]
        realization: usize,
        /// Also write the BS locations of the realization.
        #[arg(long)]
        locations_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    P3,
    P4,
}

#[derive(Debug, Clone)]
struct Values(Vec<f64>);

fn parse_param(s: &str) -> Result<SweepParam, String> {
    s.parse().map_err(|e: unb_core::Error| e.to_string())
}

fn parse_values(s: &str) -> Result<Values, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("bad range {s:?}"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected a list or start:stop:step, got {s:?}")),
    };
    if values.is_empty() {
        return Err("no values given".into());
    }
    Ok(Values(values))
}

fn load_config(cli: &Cli) -> Result<SimConfig> {
    let mut config = match &cli.config {
        Some(path) => SimConfig::from_file(path).with_context(|| format!("reading config {}", path.display()))?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_locations(path: &Path) -> Result<Vec<Point2D>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let xy: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}:{}: bad coordinate", path.display(), i + 1))?;
        let [x, y] = xy[..] else { bail!("{}:{}: expected x,y", path.display(), i + 1) };
        points.push(Point2D::new(x, y));
    }
    Ok(points)
}

fn write_locations(path: &Path, points: &[Point2D]) -> Result<()> {
    let mut out = output(Some(path))?;
    writeln!(out, "x,y")?;
    for p in points {
        writeln!(out, "{},{}", p.x, p.y)?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = load_config(&cli)?;
    let seed = config.master_seed;
    match &cli.command {
        Command::Simulate => {
            let run = harness::run_monte_carlo(&config, cli.realizations, seed)?;
            let mut out = output(cli.out.as_deref())?;
            harness::write_run_csv(&mut out, &run, cli.timing)?;
            out.flush()?;
            harness::write_summary(io::stderr().lock(), &run.summary)?;
        }
        Command::Sweep { param, values } => {
            let points = harness::sweep(&config, *param, &values.0, cli.realizations, seed)?;
            let mut out = output(cli.out.as_deref())?;
            harness::write_sweep_csv(&mut out, &points, cli.timing)?;
            out.flush()?;
            let mut err = io::stderr().lock();
            for p in &points {
                writeln!(err, "{} = {}", param.name(), p.value)?;
                harness::write_summary(&mut err, &p.run.summary)?;
            }
        }
        Command::Solve { stats, objective, locations, bands } => {
            let obj = match objective {
                Objective::P3 => {
                    let Some(path) = stats else { bail!("--stats is required for p3") };
                    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    let stats = DecodeStats::read_table(BufReader::new(file))?;
                    if stats.flagged_cells() > 0 {
                        eprintln!("warning: {} cells have no samples and count as 0", stats.flagged_cells());
                    }
                    build_p3_objective(&stats)
                }
                Objective::P4 => {
                    let Some(path) = locations else { bail!("--locations is required for p4") };
                    build_p4_objective(&read_locations(path)?, config.eta, bands.unwrap_or(config.num_bands))?
                }
            };
            let mut rng = substream(seed, streams::LOCAL_SEARCH);
            let sol = solve(&obj, config.enumeration_cap, config.local_search_restarts, &mut rng)?;
            let mut out = output(cli.out.as_deref())?;
            writeln!(out, "{}", sol.assignment)?;
            out.flush()?;
            eprintln!("objective value {}", sol.value);
        }
        Command::Train { low_overhead, realization, locations_out } => {
            let Some(path) = &cli.out else { bail!("train needs --out <file>") };
            let r_seed = harness::realization_seed(seed, *realization);
            let topology = generate_topology(&config, &mut substream(r_seed, streams::TOPOLOGY));
            let channel = ChannelRealization::generate(&topology, &config, &mut substream(r_seed, streams::SHADOWING))?;
            let mut rng = substream(r_seed, streams::TRAINING);
            let stats = if *low_overhead {
                run_low_overhead_training(&topology, &channel, &config, &mut rng, config.probe_band())?
            } else {
                run_full_training(&topology, &channel, &config, &mut rng)?
            };
            let mut out = output(Some(path))?;
            stats.write_table(&mut out)?;
            out.flush()?;
            if let Some(loc) = locations_out {
                write_locations(loc, &topology.bs_locations)?;
            }
            if stats.flagged_cells() > 0 {
                eprintln!("warning: {} cells have no samples", stats.flagged_cells());
            }
        }
    }
    Ok(())
}
