use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tareach::formula::{emit_json, emit_smtlib};
use tareach::model::{parse_automaton, parse_valuation, ClockValuation, Configuration, LocId, TimedAutomaton};
use tareach::oracle::{differential_test, oracle_reachable, FuzzConfig};
use tareach::reach::{check_pair, phi_encoding, psi_encoding};
use tareach::region::RegionGraph;
use tareach::zone::zone_count_bound;
use tareach::Rational;

const REACHABLE: u8 = 0;
const UNREACHABLE: u8 = 2;

/// Binary reachability of timed automata.
#[derive(Debug, Parser)]
#[command(name = "tareach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the reachability relation between two locations as a formula.
    Compile {
        #[command(flatten)]
        locations: Locations,
        #[arg(long, value_enum, default_value_t = Format::Smtlib2)]
        format: Format,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the quotient automaton in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide a single reachability query.
    Check(Query),
    /// Decide a query with the region-graph oracle.
    Oracle(Query),
    /// Compare `check` with `oracle` on random automata.
    Fuzz(Fuzz),
    /// Sizes of the quotient automaton and of the formulas.
    Stats {
        #[command(flatten)]
        locations: Locations,
        /// Also build the pair formula (explores the memorised automaton).
        #[arg(long)]
        phi: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Smtlib2,
    Json,
}

#[derive(Debug, Args)]
struct Locations {
    /// Automaton in JSON.
    file: PathBuf,
    #[arg(long = "from")]
    from: String,
    #[arg(long = "to")]
    to: String,
}

#[derive(Debug, Args)]
struct Query {
    #[command(flatten)]
    locations: Locations,
    /// Source valuation, e.g. "x=0,y=1/2".
    #[arg(long, default_value = "")]
    source: String,
    /// Target valuation.
    #[arg(long, default_value = "")]
    target: String,
}

#[derive(Debug, Args)]
struct Fuzz {
    /// Overridden by TAREACH_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of automata.
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 10)]
    queries: usize,
    #[arg(long, default_value_t = 3)]
    max_locations: usize,
    #[arg(long, default_value_t = 2)]
    max_clocks: usize,
    #[arg(long, default_value_t = 4)]
    max_edges: usize,
    #[arg(long, default_value_t = 2)]
    max_constant: u32,
    #[arg(long, default_value_t = 3)]
    max_denominator: u32,
    #[arg(long, default_value_t = 4)]
    max_value: u32,
    /// Write the JSON-lines report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn load(path: &Path) -> Result<TimedAutomaton> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_automaton(&text).with_context(|| format!("invalid automaton {}", path.display()))
}

fn locations(ta: &TimedAutomaton, l: &Locations) -> Result<(LocId, LocId)> {
    Ok((ta.location(&l.from)?, ta.location(&l.to)?))
}

fn valuation(ta: &TimedAutomaton, text: &str, what: &str) -> Result<ClockValuation<Rational>> {
    let (v, missing) = parse_valuation(ta, text).with_context(|| format!("invalid {what} valuation"))?;
    if !missing.is_empty() {
        eprintln!("warning: {what} valuation leaves {} at 0", missing.join(", "));
    }
    Ok(v)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("cannot write to stdout"),
            _ => Ok(()),
        },
    }
}

fn answer(reachable: bool) -> ExitCode {
    if reachable {
        println!("REACHABLE");
        ExitCode::from(REACHABLE)
    } else {
        println!("UNREACHABLE");
        ExitCode::from(UNREACHABLE)
    }
}

fn query(q: &Query, use_oracle: bool) -> Result<ExitCode> {
    let ta = load(&q.locations.file)?;
    let (from, to) = locations(&ta, &q.locations)?;
    let source = valuation(&ta, &q.source, "source")?;
    let target = valuation(&ta, &q.target, "target")?;
    let reachable = if use_oracle {
        oracle_reachable(&ta, &Configuration::new(from, source), &Configuration::new(to, target))?
    } else {
        check_pair(&ta, from, to, &source, &target)?
    };
    Ok(answer(reachable))
}

fn fuzz(f: &Fuzz) -> Result<ExitCode> {
    let seed = match std::env::var("TAREACH_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("TAREACH_SEED is not a seed: {s:?}"))?,
        Err(_) => f.seed,
    };
    let config = FuzzConfig {
        seed,
        automata: f.count,
        max_locations: f.max_locations,
        max_clocks: f.max_clocks,
        max_edges: f.max_edges,
        max_constant: f.max_constant,
        queries: f.queries,
        max_denominator: f.max_denominator,
        max_value: f.max_value,
    };
    let report = differential_test(&config)?;
    write_out(f.output.as_deref(), &report.to_json_lines())?;
    let s = &report.summary;
    eprintln!(
        "{} automata, {} queries ({} reachable), {} mismatches",
        s.automata, s.queries, s.reachable, s.mismatches
    );
    Ok(if s.mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(UNREACHABLE)
    })
}

fn stats(l: &Locations, phi: bool) -> Result<ExitCode> {
    let ta = load(&l.file)?;
    let (from, to) = locations(&ta, l)?;
    let n = ta.num_clocks();
    let graph = RegionGraph::explore(&ta, from)?;
    println!("clocks {n}, locations {}, c_max {}", ta.num_locations(), ta.c_max());
    println!("quotient states {}, transitions {}", graph.states().len(), graph.num_transitions());
    for g in graph.stats_per_gamma() {
        let names: Vec<&str> = g.prophecy.iter().map(|c| ta.clock_name(c)).collect();
        println!(
            "  prophecy {{{}}}: states {}, transitions {}",
            names.join(","),
            g.states,
            g.transitions
        );
    }
    println!("zones {} (bound {})", graph.distinct_zones().len(), zone_count_bound(n));
    let psi = psi_encoding(&ta, from, to)?;
    println!(
        "trimmed states {}, psi atoms {}",
        psi.nfa.states.len(),
        psi.formula.atom_count()
    );
    if phi {
        let e = phi_encoding(&ta, from, to)?;
        println!(
            "memorised trimmed states {}, phi atoms {}",
            e.inner.nfa.states.len(),
            e.formula.atom_count()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compile {
            locations: l,
            format,
            output,
            dot,
        } => {
            let ta = load(&l.file)?;
            let (from, to) = locations(&ta, &l)?;
            let e = phi_encoding(&ta, from, to)?;
            let text = match format {
                Format::Smtlib2 => emit_smtlib(&e.formula),
                Format::Json => emit_json(&e.formula) + "\n",
            };
            write_out(output.as_deref(), &text)?;
            if let Some(p) = dot {
                fs::write(&p, e.inner.nfa.to_dot()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(q) => query(&q, false),
        Command::Oracle(q) => query(&q, true),
        Command::Fuzz(f) => fuzz(&f),
        Command::Stats { locations, phi } => stats(&locations, phi),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
