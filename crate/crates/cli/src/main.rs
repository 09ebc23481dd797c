mod range;
mod solve;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use range::IntList;
use wcg_core::biased::Profile;
use wcg_core::registry::{verify, ClientSpec, RunConfig, StrategySpec, CLIENT_IDS, STRATEGY_IDS};
use wcg_core::transcript::{RoundEntry, Transcript};
use wcg_core::ProbeLevel;

#[derive(Parser)]
#[command(name = "wcg", version, about = "Play, verify and solve Waiter-Client games on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a strategy against a client over ranges of n and seeds.
    Run(RunArgs),
    /// Replay transcripts, revalidate certificates and re-run the probes.
    Verify {
        #[arg(required = true)]
        transcripts: Vec<PathBuf>,
    },
    /// Exactly solve a small game given as a JSON file or a name.
    Solve(SolveArgs),
    /// Print a transcript round by round.
    Replay {
        transcript: PathBuf,
    },
    /// List strategy and client ids.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    PreSeeded,
    ExactSolver,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    strategy: StrategySpec,
    #[arg(long, default_value = "random")]
    client: ClientSpec,
    /// Board sizes, e.g. `24`, `24..120:8` or `40,80,160` (ranges are inclusive).
    #[arg(long)]
    n: IntList,
    #[arg(long, default_value_t = 1)]
    bias: u32,
    #[arg(long, default_value = "0")]
    seeds: IntList,
    /// off, final or per-round.
    #[arg(long, default_value = "per-round")]
    probes: ProbeLevel,
    /// Exit nonzero if any run forfeits, fails a probe or ends without a valid certificate.
    #[arg(long)]
    strict: bool,
    /// Constants profile for the biased strategies: `paper` (literal formulas) or `desk`.
    #[arg(long, default_value = "desk")]
    constants: Profile,
    /// Clique oracle for the triangle-factor strategy.
    #[arg(long, value_enum, default_value = "pre-seeded")]
    oracle: Oracle,
    /// Results file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format; defaults to json for `.json` output files and csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Directory receiving one transcript per run.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON file `{"universe", "bias", "sets"}` or one of single, connectivity:n,
    /// matching:n, hamilton:n, clique:m:t.
    game: String,
    /// Overrides the bias of the game.
    #[arg(long)]
    bias: Option<u32>,
    /// Maximum number of memoized positions.
    #[arg(long, default_value_t = 20_000_000)]
    budget: usize,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(args) => run(args),
        Command::Verify { transcripts } => verify_files(&transcripts),
        Command::Solve(args) => {
            let game = solve::load(&args.game, args.bias)?;
            print!("{}", solve::solve(&game, args.budget, args.json)?);
            if args.json {
                println!();
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { transcript } => replay(&transcript),
        Command::List => {
            println!("strategies:");
            STRATEGY_IDS.iter().for_each(|s| println!("  {s}"));
            println!("clients:");
            CLIENT_IDS.iter().for_each(|s| println!("  {s}"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    if args.oracle == Oracle::ExactSolver && matches!(args.strategy, StrategySpec::TriangleFactor { .. }) {
        bail!("the exact-solver clique oracle forces only tiny cliques; the triangle-factor strategy needs the 48-vertex reservoir (use pre-seeded)");
    }
    let mut configs = Vec::new();
    for &n in &args.n.0 {
        for &seed in &args.seeds.0 {
            let mut c = RunConfig::new(args.strategy, args.client, n as usize, seed);
            c.bias = args.bias;
            c.probes = args.probes;
            c.constants = args.constants;
            configs.push(c);
        }
    }
    let rows = sweep::run_all(&configs, args.transcripts.as_deref())?;
    let format = args.format.unwrap_or(match &args.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    });
    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => sweep::write_csv(&rows, out)?,
        Format::Json => sweep::write_json(&rows, out)?,
    }
    let bad = rows.iter().filter(|r| !r.is_clean()).count();
    if bad > 0 {
        eprintln!("{bad} of {} runs were not clean", rows.len());
        if args.strict {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load(path: &PathBuf) -> Result<Transcript> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Transcript::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn verify_files(paths: &[PathBuf]) -> Result<ExitCode> {
    let mut clean = true;
    for path in paths {
        let t = load(path)?;
        let report = verify(&t)?;
        let failed: Vec<String> =
            report.checks.summaries().into_iter().filter(|s| s.failed > 0).map(|s| format!("{} ({} failed)", s.probe, s.failed)).collect();
        let ok = report.is_clean();
        clean &= ok;
        println!("{}: {}", path.display(), if ok { "clean" } else { "NOT clean" });
        if let Some(d) = &report.divergence {
            println!("  replay divergence: {d}");
        }
        if let Some(e) = &report.certificate_error {
            println!("  certificate invalid: {e}");
        }
        if !failed.is_empty() {
            println!("  probe failures: {}", failed.join(", "));
        }
    }
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn replay(path: &PathBuf) -> Result<ExitCode> {
    let t = load(path)?;
    println!("{} vs {} on n={} b={} seed={}", t.strategies.waiter, t.strategies.client, t.n, t.bias, t.seed);
    if !t.seeded.is_empty() {
        println!("seeded Client edges: {}", t.seeded.len());
    }
    for (i, entry) in t.rounds.iter().enumerate() {
        match entry {
            RoundEntry::Played { offer, pick } => {
                let edges: Vec<String> = offer.iter().map(|e| format!("{}-{}", e.lo(), e.hi())).collect();
                println!("{:>6}  [{}] -> {}-{}", i + 1, edges.join(" "), offer[*pick].lo(), offer[*pick].hi());
            }
            RoundEntry::Fake(_) => println!("{:>6}  fake", i + 1),
        }
    }
    let state = t.replay().context("recorded rounds are illegal")?;
    println!(
        "real rounds {}, fake rounds {}, Client edges {}, Waiter edges {}, free edges {}",
        state.real_rounds(),
        state.fake_rounds(),
        state.client_count(),
        state.waiter_count(),
        state.free_count()
    );
    match (&t.certificate, &t.error) {
        (Some(c), _) => println!("certificate: {} ({})", c.kind_name(), if c.is_valid(&state) { "valid" } else { "invalid" }),
        (None, Some(e)) => println!("no certificate: {e}"),
        (None, None) => println!("no certificate"),
    }
    Ok(ExitCode::SUCCESS)
}
