use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use warden_core::agents::{simulate, BasicPrisoner, OptimalPrisoner, PrisonerPolicy, WardenKind};
use warden_core::oracle::bounded_minimax;
use warden_core::sequences::{fkm, greedy_granddaddy, DeBruijnSequence};
use warden_core::verify::{check_uniform, uniform_shapes};
use warden_core::{solve, Actor, GoalSpec, Position};

#[derive(Parser)]
#[command(name = "warden", version, about = "Solve and play the warden's game")]
struct Cli {
    /// Read positions on the command line as H/T coins (H = 0, T = 1).
    #[arg(long, global = true)]
    coins: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the lexicographically minimal de Bruijn sequence.
    Generate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Method::Game)]
        method: Method,
    },
    /// Print the optimal-play loop for a goal word, prefixed by the goal.
    Chain {
        #[arg(long)]
        goal: String,
    },
    /// Print the remoteness of a position, or "unwinnable".
    Remoteness {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        goal: Option<String>,
        #[arg(long)]
        position: String,
    },
    /// Print where a word first occurs in the minimal de Bruijn sequence.
    Locate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
    },
    /// Check every uniform game with at most K states.
    Verify {
        #[arg(long = "max-states")]
        max_states: u64,
    },
    /// Play one game between two policies and print the transcript.
    Simulate {
        /// `uniform:M,N`, `word:W`, `prime` or `multi:A,N,G1;G2[@LIMIT]`.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        start: String,
        #[arg(long, value_enum, default_value_t = PrisonerKind::Optimal)]
        prisoner: PrisonerKind,
        /// optimal, never_decrease, greedy_max_child or random
        #[arg(long, default_value = "optimal")]
        warden: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Move cap; defaults to the spec's limit, else n times the state count.
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Answer a stored puzzle.
    #[command(subcommand)]
    Puzzle(Puzzle),
    /// Run the play server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Puzzle {
    /// Two ten-sided dice; the prisoner wins on any prime.
    Prime {
        #[arg(long, default_value = "88")]
        start: String,
        #[arg(long, default_value_t = 19)]
        limit: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Doc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Game,
    Greedy,
    Fkm,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrisonerKind {
    Optimal,
    Basic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_position(text: &str, coins: bool) -> anyhow::Result<Position> {
    let position = if coins { Position::parse_coins(text) } else { Position::parse(text) };
    position.with_context(|| format!("bad position {text:?}"))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let coins = cli.coins;
    match cli.command {
        Command::Generate { m, n, format, method } => {
            let sequence = match method {
                Method::Game => {
                    let chain = solve(&GoalSpec::uniform(m, n)?)?.build_chain()?;
                    DeBruijnSequence { m, n, digits: chain.digits }
                }
                Method::Greedy => greedy_granddaddy(m, n)?,
                Method::Fkm => fkm(m, n)?,
            };
            match format {
                Format::Plain => println!("{}", sequence.render()),
                Format::Doc => println!("{}", serde_json::to_string_pretty(&sequence.to_document())?),
            }
        }
        Command::Chain { goal } => {
            let goal = parse_position(&goal, coins)?;
            let chain = solve(&GoalSpec::word(goal.into_digits())?)?.build_chain()?;
            println!("{}", chain.render_with_goal());
        }
        Command::Remoteness { m, n, goal, position } => {
            let position = parse_position(&position, coins)?;
            let spec = match goal {
                Some(goal) => GoalSpec::word(parse_position(&goal, coins)?.into_digits())?,
                None => match (m, n) {
                    (Some(m), Some(n)) => GoalSpec::uniform(m, n)?,
                    _ => bail!("--m and --n are required without --goal"),
                },
            };
            if let Some(m) = m {
                if m < spec.alphabet() {
                    bail!("--m {m} is too small for the goal");
                }
            }
            if n.is_some_and(|n| n != spec.len()) || position.len() != spec.len() {
                bail!("length mismatch: the game has {} digits", spec.len());
            }
            // digits above the goal's largest can never be lowered by the prisoner
            if position.digits().iter().any(|&d| d >= spec.alphabet() && m.is_some_and(|m| d < m)) {
                println!("unwinnable");
                return Ok(true);
            }
            match solve(&spec)?.remoteness_from_start(&position)? {
                Some(r) => println!("{r}"),
                None => println!("unwinnable"),
            }
        }
        Command::Locate { m, n, word } => {
            let word = parse_position(&word, coins)?;
            println!("{}", solve(&GoalSpec::uniform(m, n)?)?.locate(&word)?);
        }
        Command::Verify { max_states } => return verify(max_states),
        Command::Simulate { spec, start, prisoner, warden, seed, cap, format } => {
            let spec = GoalSpec::parse(&spec)?;
            let start = parse_position(&start, coins)?;
            let table = Arc::new(solve(&spec)?);
            let mut prisoner: Box<dyn PrisonerPolicy> = match prisoner {
                PrisonerKind::Optimal => Box::new(OptimalPrisoner::new(table.clone())),
                PrisonerKind::Basic => Box::new(BasicPrisoner::new(&spec)?),
            };
            let mut warden = WardenKind::parse(&warden, seed)?.build(Some(&table))?;
            let cap = cap.or(spec.limit()).unwrap_or_else(|| {
                let states = spec.state_count().unwrap_or(u128::MAX);
                (states.saturating_mul(spec.len() as u128)).min(u32::MAX as u128) as u32
            });
            let goal_as_start = spec.single_goal().is_some() && spec.is_goal(&start);
            let transcript = simulate(&spec, &start, prisoner.as_mut(), warden.as_mut(), cap, goal_as_start)?;
            match format {
                Format::Plain => print!("{}", transcript.to_lines()),
                Format::Doc => println!("{}", serde_json::to_string_pretty(&transcript)?),
            }
        }
        Command::Puzzle(Puzzle::Prime { start, limit }) => {
            let start = parse_position(&start, coins)?;
            print!("{}", prime_puzzle(&start, limit)?);
        }
        Command::Serve { port, static_dir } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .init();
            let runtime = tokio::runtime::Runtime::new()?;
            let addr = SocketAddr::from(([0, 0, 0, 0], port));
            runtime.block_on(warden_server::serve(addr, static_dir))?;
        }
    }
    Ok(true)
}

fn verify(max_states: u64) -> anyhow::Result<bool> {
    let shapes = uniform_shapes(max_states);
    let mut failures = 0;
    let mut counts = [0usize; 3];
    for &(m, n) in &shapes {
        let report = check_uniform(m, n)?;
        for (count, ok) in counts.iter_mut().zip([
            report.oracle_equivalence && report.recurrence,
            report.single_chain,
            report.monotone,
        ]) {
            *count += ok as usize;
        }
        if !report.passed() {
            failures += 1;
            eprintln!("uniform({m},{n}) failed: {report:?}");
        }
    }
    let total = shapes.len();
    println!("oracle-equivalence {}/{total}", counts[0]);
    println!("single-chain {}/{total}", counts[1]);
    println!("monotonicity {}/{total}", counts[2]);
    Ok(failures == 0)
}

fn prime_puzzle(start: &Position, limit: u32) -> anyhow::Result<String> {
    let mut spec = GoalSpec::prime_puzzle();
    if let GoalSpec::Multi { limit: l, .. } = &mut spec {
        *l = Some(limit);
    }
    spec.check_position(start)?;
    let table = solve(&spec)?;
    let bounded = table.bounded_win(start)?;
    let searched = bounded_minimax(&spec, start, limit)?;
    if searched != bounded.moves {
        bail!("solver ({:?}) and depth-limited search ({searched:?}) disagree", bounded.moves);
    }
    let mut out = format!("start {start}\nlimit {limit}\n");
    match bounded.moves {
        Some(moves) => {
            out.push_str(&format!("verdict winnable\nmoves {moves}\n"));
            if moves > 0 {
                let choice = table.optimal_move(start)?;
                let next = start.apply_move(choice, 10)?;
                let first = match (choice.actor, start.rightmost()) {
                    (Actor::Warden, _) => format!("warden writes {} -> {next}", choice.value),
                    (Actor::Prisoner, 0) => {
                        format!("warden must pass, prisoner writes {} -> {next}", choice.value)
                    }
                    (Actor::Prisoner, _) => {
                        format!("warden passes, prisoner writes {} -> {next}", choice.value)
                    }
                };
                out.push_str(&format!("first move {first}\n"));
            }
        }
        None => {
            out.push_str("verdict not winnable\n");
            match table.remoteness(start)? {
                Some(r) => out.push_str(&format!("moves none within {limit} (unlimited: {r})\n")),
                None => out.push_str("moves none\n"),
            }
        }
    }
    out.push_str("depth-limited search agrees\n");
    Ok(out)
}
