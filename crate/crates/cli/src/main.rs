use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use winpoly::analysis::{compute_repairs, report};
use winpoly::fixpoint::{GfpMode, IterationSchedule, SolveOptions, SolveTrace};
use winpoly::semiring::MinMax;
use winpoly::strategy::{
    dominant_sum, enumerate_winning, is_positional_profile, strategy_value, DEFAULT_NODE_BUDGET,
};
use winpoly::{
    pi_strat, solve_win0, BuchiGame, Error, Exponent, Poly, PolyRing, RawGame, RepairSpec,
    TrackingSpec, Var,
};

/// Büchi-game solving in the semiring of absorptive polynomials: winning
/// strategies as monomials, plus analysis and repair queries on top.
#[derive(Parser)]
#[command(name = "winpoly", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the winning-region polynomial at a position and report the
    /// absorption-dominant strategies it encodes.
    Solve {
        game: PathBuf,
        #[arg(short, long)]
        position: String,
        /// Track only these edges (comma-separated labels); everything else
        /// maps to 1. Tracks all edges when omitted.
        #[arg(long, value_delimiter = ',')]
        track: Option<Vec<String>>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print every fixed-point iterate.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the winning strategies from a position and compare their
    /// sum against the fixed-point solver.
    Strategies {
        game: PathBuf,
        #[arg(short, long)]
        position: String,
        /// Enumeration budget in automaton nodes.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
    /// Compute all edge repairs within the given bounds that make Player 0
    /// win from a position.
    Repair {
        game: PathBuf,
        #[arg(short, long)]
        position: String,
        /// Labels of existing edges that may be removed (comma-separated).
        #[arg(long, value_delimiter = ',')]
        remove: Vec<String>,
        /// Absent edges that may be added, as from:to pairs (comma-separated).
        #[arg(long, value_delimiter = ',')]
        add: Vec<String>,
        /// Keep occurrence counts instead of working exponent-free.
        #[arg(long)]
        full_exponents: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the winning-region polynomial in an application semiring.
    Eval {
        game: PathBuf,
        #[arg(short, long)]
        position: String,
        #[arg(long, value_enum)]
        semiring: SemiringName,
        /// Edge values, e.g. a=0.9,b=1 (numbers) or a=low,b=high (levels).
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
        /// Level order for the min-max semiring, e.g. low<mid<high.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long, value_delimiter = ',')]
        track: Option<Vec<String>>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Emit Graphviz DOT for the game, or for one winning strategy.
    ExportDot {
        game: PathBuf,
        /// Export the strategy with this index (in enumeration order) from
        /// --position instead of the game graph.
        #[arg(long, requires = "position")]
        strategy: Option<usize>,
        #[arg(short, long)]
        position: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Validate a game file and report every violation.
    Check { game: PathBuf },
}

#[derive(Args)]
struct SolverArgs {
    /// How the outer greatest fixed point is closed off.
    #[arg(long, value_enum, default_value_t = GfpModeArg::Saturating)]
    gfp_mode: GfpModeArg,
    /// Inner iteration schedule; Jacobi keeps traces reproducible.
    #[arg(long, value_enum, default_value_t = ScheduleArg::Jacobi)]
    schedule: ScheduleArg,
    /// Finite exponents above this bound saturate to infinity.
    #[arg(long, default_value_t = 64)]
    saturation_bound: u64,
    /// Step budget for each fixed-point loop.
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Abort when an iterate grows past this many monomials.
    #[arg(long, default_value_t = 1_000_000)]
    max_monomials: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum GfpModeArg {
    Saturating,
    Accelerated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Jacobi,
    GaussSeidel,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemiringName {
    Boolean,
    Viterbi,
    Tropical,
    Minmax,
}

impl SemiringName {
    fn as_str(self) -> &'static str {
        match self {
            SemiringName::Boolean => "boolean",
            SemiringName::Viterbi => "viterbi",
            SemiringName::Tropical => "tropical",
            SemiringName::Minmax => "minmax",
        }
    }
}

impl SolverArgs {
    fn options(&self, trace: bool) -> SolveOptions {
        SolveOptions {
            gfp_mode: match self.gfp_mode {
                GfpModeArg::Saturating => GfpMode::Saturating,
                GfpModeArg::Accelerated => GfpMode::Accelerated,
            },
            schedule: match self.schedule {
                ScheduleArg::Jacobi => IterationSchedule::Jacobi,
                ScheduleArg::GaussSeidel => IterationSchedule::GaussSeidel,
            },
            saturation_bound: self.saturation_bound,
            max_steps: self.max_steps,
            max_monomials: self.max_monomials,
            trace,
        }
    }
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: 2,
        }
    }

    fn resource(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match err {
            Error::StepBudget { .. }
            | Error::BoundExhausted { .. }
            | Error::MonomialLimit(_)
            | Error::EnumerationBudget(_)
            | Error::NotAFixedPoint => 3,
            _ => 2,
        };
        Failure {
            message: err.to_string(),
            code,
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe goes away
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_game(path: &PathBuf) -> Result<BuchiGame, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read `{}`: {e}", path.display())))?;
    BuchiGame::parse(&text).map_err(|e| Failure::usage(format!("`{}`: {e}", path.display())))
}

fn tracking(game: &BuchiGame, track: &Option<Vec<String>>) -> Result<TrackingSpec, Failure> {
    match track {
        None => Ok(TrackingSpec::all(game)),
        Some(labels) => {
            let labels: Vec<&str> = labels
                .iter()
                .map(|s| s.as_str())
                .filter(|s| !s.is_empty())
                .collect();
            Ok(TrackingSpec::from_labels(game, &labels)?)
        }
    }
}

fn print_trace(game: &BuchiGame, trace: &SolveTrace<Poly>) {
    let vector = |vs: &[Poly]| {
        vs.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!(
        "positions: ({})",
        game.positions()
            .map(|v| game.name(v))
            .collect::<Vec<_>>()
            .join(", ")
    );
    for (k, outer) in trace.outer.iter().enumerate() {
        println!("Y[{k}] = ({})", vector(outer));
        if let Some(run) = trace.inner.get(k) {
            for z in run {
                println!("  Z: ({})", vector(z));
            }
        }
    }
}

fn profile_text(profile: &BTreeMap<String, Exponent>) -> String {
    if profile.is_empty() {
        return "1".to_string();
    }
    profile
        .iter()
        .map(|(label, count)| match count {
            Exponent::Fin(1) => label.clone(),
            other => format!("{label}^{other}"),
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            game,
            position,
            track,
            solver,
            trace,
            json,
        } => {
            let game = load_game(&game)?;
            let v = game.position_by_name(&position)?;
            let tracking = tracking(&game, &track)?;
            let interp = pi_strat(&game, &tracking);
            let solution = solve_win0(&game, &interp, &solver.options(trace))?;
            if trace {
                print_trace(&game, solution.trace.as_ref().expect("trace was requested"));
            }
            let rep = report(solution.value(v), &game, v);
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&rep).expect("report serializes")
                );
            } else {
                println!("{}", rep.value);
                println!(
                    "Player 0 {} from {}",
                    if rep.winner { "wins" } else { "loses" },
                    rep.position
                );
                for m in &rep.monomials {
                    println!(
                        "  strategy {} ({})",
                        profile_text(&m.profile),
                        if m.positional {
                            "positional"
                        } else {
                            "not positional"
                        }
                    );
                }
                println!(
                    "{} dominant strateg{} up to equivalence, {} positional",
                    rep.counts.dominant,
                    if rep.counts.dominant == 1 { "y" } else { "ies" },
                    rep.counts.positional
                );
            }
            Ok(())
        }
        Command::Strategies {
            game,
            position,
            budget,
            json,
        } => {
            let game = load_game(&game)?;
            let v = game.position_by_name(&position)?;
            let interp = pi_strat(&game, &TrackingSpec::all(&game));
            let winning = enumerate_winning(&game, v, budget)?;
            let sum = dominant_sum(&game, &interp, &PolyRing, v, budget)?;
            let opts = SolveOptions {
                gfp_mode: GfpMode::Accelerated,
                ..SolveOptions::default()
            };
            let solution = solve_win0(&game, &interp, &opts)?;
            let agree = &sum == solution.value(v);
            if json {
                let profiles: Vec<serde_json::Value> = winning
                    .iter()
                    .map(|(p, _)| {
                        serde_json::json!({
                            "profile": p.to_label_map(&game),
                            "positional": is_positional_profile(p, &game),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "position": game.name(v),
                        "profiles": profiles,
                        "sum": sum,
                        "fixed_point": solution.value(v),
                        "oracle_agreement": agree,
                    })
                );
            } else {
                println!(
                    "{} winning profile{} from {}",
                    winning.len(),
                    if winning.len() == 1 { "" } else { "s" },
                    game.name(v)
                );
                for (profile, _) in &winning {
                    let value = strategy_value(profile, &game, &interp, &PolyRing);
                    println!(
                        "  {} ({})",
                        value,
                        if is_positional_profile(profile, &game) {
                            "positional"
                        } else {
                            "not positional"
                        }
                    );
                }
                println!("sum over strategies: {sum}");
                println!("fixed point:         {}", solution.value(v));
                println!("oracle agreement: {}", if agree { "yes" } else { "NO" });
            }
            if agree {
                Ok(())
            } else {
                Err(Failure::resource(
                    "sum over enumerated strategies differs from the fixed point",
                ))
            }
        }
        Command::Repair {
            game,
            position,
            remove,
            add,
            full_exponents,
            solver,
            json,
        } => {
            let game = load_game(&game)?;
            let v = game.position_by_name(&position)?;
            let add_pairs: Vec<(String, String)> = add
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.split_once(':')
                        .map(|(f, t)| (f.to_string(), t.to_string()))
                        .ok_or_else(|| {
                            Failure::usage(format!("--add expects from:to pairs, got `{s}`"))
                        })
                })
                .collect::<Result<_, _>>()?;
            let remove: Vec<String> = remove.into_iter().filter(|s| !s.is_empty()).collect();
            let spec = RepairSpec::from_names(&game, &add_pairs, &remove)?;
            let result = compute_repairs(&game, &spec, v, full_exponents, &solver.options(false))?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "position": game.name(v),
                        "winner": !result.value.is_zero(),
                        "value": result.value,
                        "repairs": result.entries(&game),
                    })
                );
            } else {
                println!("{}", result.value);
                if result.repairs.is_empty() {
                    println!(
                        "no repair within the spec makes Player 0 win from {}",
                        game.name(v)
                    );
                } else {
                    for repair in &result.repairs {
                        let mut parts: Vec<String> = repair
                            .remove
                            .iter()
                            .map(|&e| format!("-{}", game.label(e)))
                            .collect();
                        parts.extend(
                            repair
                                .add
                                .iter()
                                .map(|&(f, t)| format!("+{}:{}", game.name(f), game.name(t))),
                        );
                        if parts.is_empty() {
                            parts.push("(no change)".to_string());
                        }
                        println!(
                            "  repair {}{}{}",
                            parts.join(" "),
                            if repair.minimal { " [minimal]" } else { "" },
                            if repair.verified { " [verified]" } else { "" }
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Eval {
            game,
            position,
            semiring,
            assign,
            levels,
            track,
            solver,
            json,
        } => {
            let game = load_game(&game)?;
            let v = game.position_by_name(&position)?;
            let tracking = tracking(&game, &track)?;
            let interp = pi_strat(&game, &tracking);
            let solution = solve_win0(&game, &interp, &solver.options(false))?;
            let poly = solution.value(v);
            let pairs = parse_assignment(&assign)?;
            let (text, value_json) = match semiring {
                SemiringName::Boolean => {
                    let assignment = typed_assignment(&pairs, |raw| match raw {
                        "0" | "false" => Ok(false),
                        "1" | "true" => Ok(true),
                        other => Err(Failure::usage(format!(
                            "boolean values are 0/1/true/false, got `{other}`"
                        ))),
                    })?;
                    let value = poly.eval(&assignment, &winpoly::Boolean)?;
                    (value.to_string(), serde_json::json!(value))
                }
                SemiringName::Viterbi => {
                    let ring = winpoly::Viterbi;
                    let assignment = typed_assignment(&pairs, |raw| {
                        let x: f64 = raw
                            .parse()
                            .map_err(|_| Failure::usage(format!("not a number: `{raw}`")))?;
                        Ok(ring.check(x)?)
                    })?;
                    let value = poly.eval(&assignment, &ring)?;
                    (format!("{value}"), serde_json::json!(value))
                }
                SemiringName::Tropical => {
                    let ring = winpoly::Tropical;
                    let assignment = typed_assignment(&pairs, |raw| {
                        if raw == "inf" {
                            return Ok(f64::INFINITY);
                        }
                        let x: f64 = raw
                            .parse()
                            .map_err(|_| Failure::usage(format!("not a number: `{raw}`")))?;
                        Ok(ring.check(x)?)
                    })?;
                    let value = poly.eval(&assignment, &ring)?;
                    if value.is_infinite() {
                        ("inf".to_string(), serde_json::json!("inf"))
                    } else {
                        (format!("{value}"), serde_json::json!(value))
                    }
                }
                SemiringName::Minmax => {
                    let levels = levels.as_deref().ok_or_else(|| {
                        Failure::usage("--semiring minmax needs --levels low<mid<high")
                    })?;
                    let ring =
                        MinMax::new(levels.split('<').map(|s| s.trim().to_string()).collect())?;
                    let assignment = typed_assignment(&pairs, |raw| Ok(ring.level_index(raw)?))?;
                    let value = poly.eval(&assignment, &ring)?;
                    let name = ring.level_name(value).to_string();
                    (name.clone(), serde_json::json!(name))
                }
            };
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "position": game.name(v),
                        "semiring": semiring.as_str(),
                        "value": value_json,
                    })
                );
            } else {
                println!("{text}");
            }
            Ok(())
        }
        Command::ExportDot {
            game,
            strategy,
            position,
            budget,
        } => {
            let game = load_game(&game)?;
            match strategy {
                None => print!("{}", game.to_dot()),
                Some(index) => {
                    let position = position.expect("clap enforces --position");
                    let v = game.position_by_name(&position)?;
                    let winning = enumerate_winning(&game, v, budget)?;
                    let Some((_, automaton)) = winning.get(index) else {
                        return Err(Failure::usage(format!(
                            "strategy index {index} out of range: {} winning profiles from {}",
                            winning.len(),
                            game.name(v)
                        )));
                    };
                    print!("{}", automaton.to_dot(&game));
                }
            }
            Ok(())
        }
        Command::Check { game } => {
            let text = std::fs::read_to_string(&game)
                .map_err(|e| Failure::usage(format!("cannot read `{}`: {e}", game.display())))?;
            let raw = RawGame::parse(&text)
                .map_err(|e| Failure::usage(format!("`{}`: {e}", game.display())))?;
            let violations = raw.validate();
            if violations.is_empty() {
                println!("ok");
            } else {
                for violation in violations {
                    println!("violation: {violation}");
                }
            }
            Ok(())
        }
    }
}

fn parse_assignment(entries: &[String]) -> Result<Vec<(String, String)>, Failure> {
    entries
        .iter()
        .filter(|s| !s.is_empty())
        .map(|entry| {
            entry
                .split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    Failure::usage(format!(
                        "--assign expects label=value entries, got `{entry}`"
                    ))
                })
        })
        .collect()
}

fn typed_assignment<T>(
    pairs: &[(String, String)],
    mut parse: impl FnMut(&str) -> Result<T, Failure>,
) -> Result<BTreeMap<Var, T>, Failure> {
    let mut out = BTreeMap::new();
    for (label, raw) in pairs {
        out.insert(Var::new(label.as_str()), parse(raw)?);
    }
    Ok(out)
}
