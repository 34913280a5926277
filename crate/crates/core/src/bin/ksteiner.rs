use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ksteiner::generate::{random_ellipse, random_instance, random_polygon_ball};
use ksteiner::io::{InstanceFile, SolutionFile};
use ksteiner::odc::{build_odc_partition, working_box};
use ksteiner::oracle::{grid_steiner_oracle, OracleConfig};
use ksteiner::overlay::oodc_partition;
use ksteiner::solver::{baseline, solve_with_progress, ProblemSpec};
use ksteiner::topology::CostFunction;
use ksteiner::{svg, Error, NormSpec};

/// Generalised k-Steiner trees in normed planes.
#[derive(Parser)]
#[command(name = "ksteiner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the solution JSON.
    Solve {
        /// Instance JSON file.
        instance: PathBuf,
        /// Write the solution here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also draw the tree as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Cross-check against the brute-force oracle (n ≤ 7, k ≤ 2).
        #[arg(long)]
        verify: bool,
        /// Worker threads.
        #[arg(long, env = "KSTEINER_THREADS")]
        threads: Option<usize>,
        /// No progress output on stderr.
        #[arg(short, long)]
        quiet: bool,
    },
    /// Draw the overlay of the six oriented partitions (or one of them with --cone).
    Partition {
        instance: PathBuf,
        /// SVG output file.
        #[arg(long)]
        svg: PathBuf,
        /// Also write the partition as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Draw only the partition for this cone index (0..=5).
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..6))]
        cone: Option<u8>,
    },
    /// Minimum spanning tree on the terminals only.
    Mst {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a uniform random instance in the unit square.
    Gen {
        /// Number of terminals.
        #[arg(short, long, default_value_t = 8)]
        n: usize,
        #[arg(short, long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = NormKind::Euclidean)]
        norm: NormKind,
        /// sum, bottleneck, or power:P
        #[arg(long, default_value = "sum", value_parser = parse_cost)]
        cost: CostFunction,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Euclidean,
    Rectilinear,
    Linf,
    /// Random centrally symmetric polygon.
    Polygon,
    /// Random ellipse.
    Ellipse,
}

fn parse_cost(s: &str) -> Result<CostFunction, String> {
    match s {
        "sum" => Ok(CostFunction::Sum),
        "bottleneck" => Ok(CostFunction::Bottleneck),
        _ => {
            let p = s
                .strip_prefix("power:")
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| format!("expected sum, bottleneck or power:P, got {s}"))?;
            let cf = CostFunction::Power { p };
            cf.validate().map_err(|e| e.to_string())?;
            Ok(cf)
        }
    }
}

enum Failure {
    Io(String),
    Solver(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

fn read_instance(path: &Path) -> Result<ProblemSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let inst = InstanceFile::parse(&text).map_err(|e| match e {
        Error::Malformed { line, column, message } => Failure::Io(format!("{}:{line}:{column}: {message}", path.display())),
        e => Failure::Solver(e),
    })?;
    Ok(inst.to_spec()?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            instance,
            output,
            svg: svg_out,
            verify,
            threads,
            quiet,
        } => {
            let mut spec = read_instance(&instance)?;
            spec.threads = threads;
            let show = !quiet && std::io::stderr().is_terminal();
            let progress = |done: usize, total: usize| {
                if show {
                    eprint!("\rregion choices {done}/{total}");
                    let _ = std::io::stderr().flush();
                }
            };
            let sol = solve_with_progress(&spec, &progress)?;
            if show {
                eprintln!();
            }
            let file = SolutionFile::from_solution(&sol, &spec.ball);
            if sol.stats.warnings > 0 && !quiet {
                eprintln!("warning: {} fixed-topology solves missed their tolerance and were skipped", sol.stats.warnings);
            }
            if let Some(p) = svg_out {
                write_out(Some(&p), &svg::solution_svg(&sol))?;
            }
            write_out(output.as_deref(), &file.to_json())?;
            if verify {
                let recomputed = file.recompute_cost()?;
                if (recomputed - sol.cost).abs() > 1e-9 * sol.cost.max(1.0) {
                    return Err(Failure::Verify(format!("reported cost {} but coordinates give {recomputed}", sol.cost)));
                }
                let config = OracleConfig::default();
                let n = spec.terminals.len();
                if n <= config.max_n && spec.k <= config.max_k {
                    let o = grid_steiner_oracle(&spec.ball, spec.cf, &spec.terminals, spec.k, &config)?;
                    eprintln!("verify: solver {:.10} oracle {:.10} (bound {:.1e})", sol.cost, o.cost, o.error_bound);
                    if sol.cost > o.cost + o.error_bound + 1e-9 * o.cost.max(1.0) {
                        return Err(Failure::Verify("solver cost exceeds the oracle".into()));
                    }
                } else {
                    eprintln!("verify: instance exceeds the oracle caps (n ≤ {}, k ≤ {}); checked the tree only", config.max_n, config.max_k);
                }
            }
        }
        Command::Partition { instance, svg: out, json, cone } => {
            let spec = read_instance(&instance)?;
            let frame = spec.frame()?;
            let bbox = working_box(&spec.terminals, spec.box_inflation)?;
            let (figure, doc) = match cone {
                Some(i) => {
                    let p = build_odc_partition(&spec.ball, &frame, &spec.terminals, i as usize, &bbox)?;
                    (svg::partition_svg(&p), p.to_json())
                }
                None => {
                    let arr = oodc_partition(&spec.ball, &frame, &spec.terminals, &bbox)?;
                    eprintln!("{} regions", arr.regions.len());
                    (svg::overlay_svg(&arr, &spec.terminals), arr.to_json())
                }
            };
            write_out(Some(&out), &figure)?;
            if let Some(j) = json {
                write_out(Some(&j), &serde_json::to_string_pretty(&doc).expect("json"))?;
            }
        }
        Command::Mst { instance, output } => {
            let spec = read_instance(&instance)?;
            let sol = baseline(&spec)?;
            write_out(output.as_deref(), &SolutionFile::from_solution(&sol, &spec.ball).to_json())?;
        }
        Command::Gen {
            n,
            k,
            seed,
            norm,
            cost,
            output,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let norm = match norm {
                NormKind::Euclidean => NormSpec::Euclidean,
                NormKind::Rectilinear => NormSpec::Rectilinear,
                NormKind::Linf => NormSpec::Linf,
                NormKind::Polygon => random_polygon_ball(&mut rng).to_spec(),
                NormKind::Ellipse => random_ellipse(&mut rng).to_spec(),
            };
            let inst = random_instance(&mut rng, n.max(1), norm, k.max(1), cost);
            write_out(output.as_deref(), &inst.to_json())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verify failed: {m}");
            ExitCode::from(2)
        }
    }
}
