use clap::{Args, Parser, Subcommand};
use klr_lab::blowup::BlowupGraph;
use klr_lab::census::{census, count_canonical, degree_vector, mean_block_edges};
use klr_lab::deletion::{deletion_for_second_moment, deletion_set};
use klr_lab::lab::{derive_constants, multi_exposure_experiment, run_config, write_report, ConstantInputs, RunOptions};
use klr_lab::pattern::PatternGraph;
use klr_lab::regularity::{check_blowup, CheckOptions, Mode, RegularityParams};
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::{adversarial_split, partition_exposure, sample_gnm_h};
use klr_lab::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "klr-lab",
    version,
    about = "Random H-partite graphs, lower-regularity and canonical copy counts"
)]
struct Cli {
    /// Run sample loops on a single thread.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(H, n, m) and save it as JSON.
    Sample {
        #[arg(long)]
        pattern: PatternGraph,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangle-free, irregular member of G(K3, n, m).
    Split {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a graph into equal edge-disjoint chunks, written as chunk-<i>.json.
    Expose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Lower-regularity verdict for every pattern block.
    Regularity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Canonical copy count.
    Count {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to the graph's own pattern.
        #[arg(long)]
        pattern: Option<PatternGraph>,
    },
    /// Per-pair degrees as CSV `u,v,deg`.
    Degrees {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: Option<PatternGraph>,
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Copy count, degree second moment, rich and poor pairs.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: Option<PatternGraph>,
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Remove a small edge set killing all copies (or taming the second moment with --pair).
    Delete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: Option<PatternGraph>,
        /// Root pair; switches to second-moment mode.
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
        /// Fraction of the per-block edge count.
        #[arg(long, default_value_t = 0.1)]
        budget: f64,
        /// Target ratio reported against in second-moment mode.
        #[arg(long, default_value_t = 1.0)]
        target: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a JSON experiment config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Derive the constants chain.
    Constants {
        #[arg(long)]
        pattern: PatternGraph,
        /// Spanning subgraph H'; defaults to the pattern itself.
        #[arg(long)]
        sub: Option<PatternGraph>,
        /// `lambda=..,beta=..,d=..,eps=..,xi_pp=..,gamma_pp=..,t=..` or a JSON file.
        #[arg(long)]
        params: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Multi-exposure trace of the covered pair set.
    ExposeRun {
        #[arg(long)]
        pattern: PatternGraph,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        z: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_pair, default_value = "0,1")]
        pair: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PairArg {
    #[arg(long, value_parser = parse_pair, default_value = "0,1")]
    pair: (usize, usize),
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_report(value, path),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn save_or_print(g: &BlowupGraph, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => g.save(path),
        None => {
            println!("{}", g.to_json());
            Ok(())
        }
    }
}

fn constant_inputs(params: &str) -> Result<ConstantInputs> {
    if Path::new(params).is_file() {
        return Ok(serde_json::from_str(&fs::read_to_string(params)?)?);
    }
    let mut obj = serde_json::Map::new();
    for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{k}` is not a number")))?;
        obj.insert(k.trim().to_string(), serde_json::json!(v));
    }
    serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| Error::Parse(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let opts = RunOptions::from_env(cli.deterministic);
    match cli.command {
        Command::Sample {
            pattern,
            n,
            m,
            seed,
            out,
        } => save_or_print(
            &sample_gnm_h(&pattern, n, m, &SeedSpec::new(seed, "sample"))?,
            out.as_deref(),
        ),
        Command::Split { n, m, seed, out } => {
            save_or_print(&adversarial_split(n, m, &SeedSpec::new(seed, "split"))?, out.as_deref())
        }
        Command::Expose {
            input,
            rounds,
            seed,
            out_dir,
        } => {
            let g = BlowupGraph::load(&input)?;
            fs::create_dir_all(&out_dir)?;
            for (i, chunk) in partition_exposure(&g, rounds, &SeedSpec::new(seed, "expose"))?
                .iter()
                .enumerate()
            {
                chunk.save(out_dir.join(format!("chunk-{}.json", i + 1)))?;
            }
            Ok(())
        }
        Command::Regularity {
            input,
            eps,
            lambda,
            mode,
            restarts,
            seed,
        } => {
            let g = BlowupGraph::load(&input)?;
            let params = RegularityParams::constant(eps, lambda)?;
            let check = CheckOptions {
                restarts,
                seed: SeedSpec::new(seed, "regularity"),
                ..CheckOptions::default()
            };
            let verdicts = check_blowup(&g, &params, mode, &check)?;
            let keyed: std::collections::BTreeMap<String, _> = verdicts
                .into_iter()
                .map(|((i, j), v)| (format!("{i}-{j}"), v))
                .collect();
            emit(&keyed, None)
        }
        Command::Count { input, pattern } => {
            let g = BlowupGraph::load(&input)?;
            let h = pattern.unwrap_or_else(|| g.pattern().clone());
            println!("{}", count_canonical(&g, &h)?);
            Ok(())
        }
        Command::Degrees {
            input,
            pattern,
            pair,
            out,
        } => {
            let g = BlowupGraph::load(&input)?;
            let h = pattern.unwrap_or_else(|| g.pattern().clone());
            let dv = degree_vector(&g, &h, pair.pair.0, pair.pair.1)?;
            match out {
                Some(path) => dv.write_csv(fs::File::create(path)?)?,
                None => dv.write_csv(std::io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Census {
            input,
            pattern,
            pair,
            gamma,
        } => {
            let g = BlowupGraph::load(&input)?;
            let h = pattern.unwrap_or_else(|| g.pattern().clone());
            emit(&census(&g, &h, pair.pair.0, pair.pair.1, gamma, None)?, None)
        }
        Command::Delete {
            input,
            pattern,
            pair,
            budget,
            target,
            out,
        } => {
            let g = BlowupGraph::load(&input)?;
            let h = pattern.unwrap_or_else(|| g.pattern().clone());
            let outcome = match pair {
                Some((a, b)) => deletion_for_second_moment(&g, &h, a, b, budget, target)?,
                None => {
                    let k = (budget * mean_block_edges(&g, &h) as f64).ceil() as usize;
                    deletion_set(&g, &h, k)?
                }
            };
            emit(&outcome, out.as_deref())
        }
        Command::Experiment { config } => {
            let artifacts = run_config(&config, &opts)?;
            println!("{}", artifacts.manifest.display());
            Ok(())
        }
        Command::Constants {
            pattern,
            sub,
            params,
            n,
            m,
        } => {
            let sub = sub.unwrap_or_else(|| pattern.clone());
            emit(
                &derive_constants(&pattern, &sub, &constant_inputs(&params)?, n, m)?,
                None,
            )
        }
        Command::ExposeRun {
            pattern,
            n,
            m,
            z,
            seed,
            pair,
            out,
        } => emit(
            &multi_exposure_experiment(&pattern, n, m, z, pair, seed)?,
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
