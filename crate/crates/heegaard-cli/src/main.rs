use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heegaard::harness;
use heegaard::invariants::{betti_number, get_pi1, homology, presentation_matrix, HomologySummary};
use heegaard::street::{
    check_diagram, destabilize, detect_reduction, disk_slide, extend_to_maximal, find_trivial_stabilization, reduce_to_minimal, stabilize,
    DiagramJson, HeegaardDiagram, DEFAULT_GUARD,
};
use heegaard::surface::{pachner_move, PachnerMove};
use heegaard::word::parse_word;
use heegaard::{Error, Result};

/// Compressed Heegaard diagrams: build them from words, operate on them,
/// compute their invariants.
///
/// Words are read left to right in application order: "l a^-1" applies the
/// twist about l first, then the inverse twist about a.
#[derive(Parser)]
#[command(name = "heegaard", version)]
struct Cli {
    /// Cap on the number of crossings any explicit expansion may produce.
    #[arg(long, global = true, env = "HEEGAARD_GUARD", default_value_t = DEFAULT_GUARD)]
    guard: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Diagram JSON file, or `-` for stdin.
    #[arg(long, conflicts_with_all = ["genus", "word"])]
    diagram: Option<PathBuf>,
    /// Genus of the word given with --word.
    #[arg(long, requires = "word")]
    genus: Option<u32>,
    /// Heegaard word, e.g. "l^3 a^-1".
    #[arg(long, requires = "genus", allow_hyphen_values = true)]
    word: Option<String>,
}

#[derive(Args)]
struct Output {
    /// Destination file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a Heegaard word into a diagram.
    WordToDiagram {
        #[arg(long)]
        genus: u32,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Keep the one-vertex surface instead of subdividing it into a triangulation.
        #[arg(long)]
        unrefined: bool,
        #[command(flatten)]
        out: Output,
    },
    /// First homology group.
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// First Betti number.
    Betti {
        #[command(flatten)]
        input: Input,
    },
    /// Presentation of the fundamental group.
    Pi1 {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether β is a system and report the pieces of its complement.
    CheckDiagram {
        #[command(flatten)]
        input: Input,
    },
    /// Connected sum with the genus-one splitting of the sphere.
    Stabilize {
        #[command(flatten)]
        input: Input,
        /// Face to split.
        #[arg(long, default_value_t = 0)]
        face: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Remove a trivial pair, found automatically unless given.
    Destabilize {
        #[command(flatten)]
        input: Input,
        /// Indices `i,j` of α_i and β_j meeting exactly once.
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
        #[command(flatten)]
        out: Output,
    },
    /// Replace β_i by its band sum with β_j.
    DiskSlide {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Apply a Pachner move to the triangulation.
    Pachner {
        #[command(flatten)]
        input: Input,
        /// One of one-three, three-one, two-two.
        #[arg(long = "move")]
        kind: String,
        /// Face, vertex or edge index, according to the move.
        #[arg(long)]
        target: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Look for a reducing sphere.
    DetectReduction {
        #[command(flatten)]
        input: Input,
    },
    /// Drop separating components until g remain.
    ReduceMinimal {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Extend both systems to pants decompositions.
    ExtendMaximal {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Reproduce one of the experiments as CSV.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Time the power family and report the polynomial fit.
    Bench {
        #[arg(long, default_value_t = 5)]
        k_min: u32,
        #[arg(long, default_value_t = 30)]
        k_max: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// The family (τ_a⁻¹ ∘ τ_ℓ)ⁿ, checked against Fibonacci numbers.
    Fibonacci {
        #[arg(long, default_value_t = 500)]
        n_max: usize,
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Uniformly random words of a fixed length.
    Random {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 100)]
        length: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        timing: bool,
        /// Recompute a sample of rows by an independent route.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Twists τ_ℓ^(2^k) on the torus, timed.
    Power {
        #[arg(long, default_value_t = 5)]
        k_min: u32,
        #[arg(long, default_value_t = 30)]
        k_max: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Growth rate of log|H_1| for random words.
    Clt {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 100)]
        n_min: usize,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = 100)]
        n_step: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn read_diagram(path: &Path) -> Result<HeegaardDiagram> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(path)?.read_to_string(&mut text)?;
    }
    let j: DiagramJson = serde_json::from_str(&text)?;
    HeegaardDiagram::from_json(&j)
}

/// Loads the input diagram. Words compile onto the subdivided surface when
/// the command needs a triangulation.
fn load(input: &Input, triangulate: bool) -> Result<HeegaardDiagram> {
    match (&input.diagram, input.genus, &input.word) {
        (Some(p), _, _) => read_diagram(p),
        (None, Some(g), Some(w)) => HeegaardDiagram::from_word(&parse_word(g, w)?, triangulate),
        _ => Err(Error::InvalidArgument("give --diagram, or --genus with --word".into())),
    }
}

fn sink(out: &Output) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: serde::Serialize>(out: &Output, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_diagram(out: &Output, d: &HeegaardDiagram) -> Result<()> {
    emit_json(out, &d.to_json())
}

fn emit_csv<T: serde::Serialize>(out: &Output, rows: &[T]) -> Result<()> {
    harness::write_csv(sink(out)?, rows)
}

fn print_homology(h: &HomologySummary) {
    let factors: Vec<String> = h.factors.iter().map(ToString::to_string).collect();
    println!("factors [{}]", factors.join(", "));
    println!("betti {}", h.betti);
    println!("group {h}");
}

fn run(cli: Cli) -> Result<()> {
    let guard = cli.guard;
    let stdout = Output { out: None };
    match cli.command {
        Command::WordToDiagram { genus, word, unrefined, out } => {
            let d = HeegaardDiagram::from_word(&parse_word(genus, &word)?, !unrefined)?;
            emit_diagram(&out, &d)
        }
        Command::Homology { input, json } => {
            let h = homology(&load(&input, false)?, guard)?;
            if json {
                emit_json(&stdout, &h)
            } else {
                print_homology(&h);
                Ok(())
            }
        }
        Command::Betti { input } => {
            println!("{}", betti_number(&presentation_matrix(&load(&input, false)?, guard)?));
            Ok(())
        }
        Command::Pi1 { input, json } => {
            let p = get_pi1(&load(&input, false)?, guard)?;
            if json {
                emit_json(&stdout, &p.to_json())
            } else {
                println!("{}", p.format(guard)?);
                Ok(())
            }
        }
        Command::CheckDiagram { input } => emit_json(&stdout, &check_diagram(&load(&input, true)?, guard)?),
        Command::Stabilize { input, face, out } => emit_diagram(&out, &stabilize(&load(&input, true)?, face, guard)?),
        Command::Destabilize { input, pair, out } => {
            let d = load(&input, true)?;
            let pair = match pair {
                Some(p) => p,
                None => find_trivial_stabilization(&d).ok_or_else(|| Error::Refused("no α_i meets a β_j exactly once".into()))?,
            };
            emit_diagram(&out, &destabilize(&d, pair, guard)?)
        }
        Command::DiskSlide { input, i, j, out } => emit_diagram(&out, &disk_slide(&load(&input, true)?, i, j, guard)?),
        Command::Pachner { input, kind, target, out } => {
            let mv = match kind.as_str() {
                "one-three" => PachnerMove::OneThree { face: target },
                "three-one" => PachnerMove::ThreeOne { vertex: target },
                "two-two" => PachnerMove::TwoTwo { edge: target },
                other => return Err(Error::InvalidArgument(format!("unknown move {other}"))),
            };
            let d = load(&input, true)?.normal_only(guard)?;
            emit_diagram(&out, &pachner_move(&d, mv, guard)?)
        }
        Command::DetectReduction { input } => emit_json(&stdout, &detect_reduction(&load(&input, true)?, guard)?),
        Command::ReduceMinimal { input, out } => emit_diagram(&out, &reduce_to_minimal(&load(&input, true)?, guard)?),
        Command::ExtendMaximal { input, out } => emit_diagram(&out, &extend_to_maximal(&load(&input, true)?, guard)?),
        Command::Experiment(e) => experiment(e, guard),
        Command::Bench { k_min, k_max, out } => bench(k_min, k_max, guard, &out),
    }
}

fn experiment(e: Experiment, guard: u64) -> Result<()> {
    match e {
        Experiment::Fibonacci { n_max, timing, jobs, out } => {
            let rows = harness::run_fibonacci(n_max, guard, timing, jobs)?;
            emit_csv(&out, &rows)?;
            if let Some(r) = rows.iter().find(|r| !r.matches) {
                return Err(Error::InvalidDiagram(format!("n = {} gives {} instead of {}", r.n, r.order, r.expected)));
            }
            Ok(())
        }
        Experiment::Random { genus, length, trials, seed, jobs, timing, verify, out } => {
            let rows = harness::run_random(genus, length, trials, seed, guard, timing, jobs)?;
            emit_csv(&out, &rows)?;
            if verify {
                eprintln!("verified {} rows", harness::verify_records(&rows, guard)?);
            }
            Ok(())
        }
        Experiment::Power { k_min, k_max, out } => emit_csv(&out, &harness::run_power_family(k_min..=k_max, guard)?),
        Experiment::Clt { genus, n_min, n_max, n_step, trials, seed, jobs, out } => {
            if n_step == 0 {
                return Err(Error::InvalidArgument("--n-step must be positive".into()));
            }
            let ns: Vec<usize> = (n_min..=n_max).step_by(n_step).collect();
            let report = harness::run_clt(genus, &ns, trials, seed, guard, jobs)?;
            emit_csv(&out, &report.rows)?;
            eprintln!("lambda {:.4}", report.lambda);
            eprintln!("finite fraction {:.4}", report.finite_fraction);
            Ok(())
        }
    }
}

fn bench(k_min: u32, k_max: u32, guard: u64, out: &Output) -> Result<()> {
    let rows = harness::run_power_family(k_min..=k_max, guard)?;
    emit_csv(out, &rows)?;
    let xs: Vec<f64> = rows.iter().map(|r| f64::from(r.k)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.nanos).collect();
    let (_, r2) = harness::polyfit(&xs, &ys, 2);
    eprintln!("quadratic fit R^2 {r2:.4}");
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        eprintln!("time ratio k={} / k={}: {:.2}", last.k, first.k, last.nanos / first.nanos);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
