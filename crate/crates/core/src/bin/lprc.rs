//! Command-line front end for the LPRC solver library.
//!
//! Subcommands: validate, relax, round, oracle, gen, bench. All reports are
//! JSON on stdout and embed the tool version, the resolved configuration,
//! and every seed used, so any number in a report can be reproduced.
//! Exit codes: 0 success, 1 validation or input failure, 2 limit aborts.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lprc::composite::{CompositeError, DEFAULT_ENUM_CAP};
use lprc::genbench::{
    gen_kcover_instance, gen_random_instance, run_trials, AlgorithmSpec, BenchError, CostRegime,
    KCoverSpec, RandomConfig,
};
use lprc::instance::{load_instance, save_instance, validate, Instance};
use lprc::lpcore::DEFAULT_TOLERANCE;
use lprc::oracle::{solve_exact, OracleError, OracleLimits};
use lprc::rational::{parse_rat, rat_to_f64, Rat};
use lprc::relaxation::{solve_relaxation, LpMode, Restriction};

#[derive(Parser)]
#[command(name = "lprc", version, about = "Line planning with resource constraints: LP relaxation, randomized rounding, exact oracles")]
struct Cli {
    /// Bound the number of worker threads for trials and pricing.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LpModeArg {
    Float,
    Exact,
}

impl LpModeArg {
    fn to_mode(self) -> LpMode {
        match self {
            LpModeArg::Float => LpMode::Float(DEFAULT_TOLERANCE),
            LpModeArg::Exact => LpMode::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Nc,
    Lc,
    C,
    CTol,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against all structural invariants.
    Validate { path: String },
    /// Solve the LP relaxation and print the fractional plan.
    Relax(RelaxArgs),
    /// Run seeded randomized-rounding trials and print statistics.
    Round(RoundArgs),
    /// Compute the exact integer optimum by exhaustive search.
    Oracle(OracleArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a consolidated generator + oracle + rounding benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RelaxArgs {
    path: String,
    /// Restrict to lines whose costs all stay at or below this threshold.
    #[arg(long)]
    low_cost: Option<String>,
    #[arg(long, value_enum, default_value = "float")]
    lp_mode: LpModeArg,
}

#[derive(Args)]
struct RoundArgs {
    path: String,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// Accuracy parameter η (rational, e.g. "1/5" or "0.2").
    #[arg(long)]
    eta: Option<String>,
    /// Budget tolerance τ for the tolerance composite.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "float")]
    lp_mode: LpModeArg,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: usize,
    /// Solve the oracle first so the report can state the OPT-relative bound.
    #[arg(long)]
    with_oracle: bool,
    /// Include the per-resource maximum observed usage in the report.
    #[arg(long)]
    budget_audit: bool,
    /// Also write one CSV row per trial to this path.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    path: String,
    #[arg(long, default_value_t = 100_000)]
    max_assignments: u64,
    #[arg(long, default_value_t = 1e7)]
    max_allocation_space: f64,
    /// Disable the upper-bound prune (reference mode).
    #[arg(long)]
    no_prune: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    generator: Generator,
}

#[derive(Subcommand)]
enum Generator {
    /// Max k-cover reduction instance.
    Kcover {
        /// Ground set size.
        #[arg(long)]
        n: usize,
        /// Subset family, e.g. "1,2;2,3,4;4,5".
        #[arg(long)]
        sets: String,
        /// Number of buses (subsets to select).
        #[arg(long)]
        k: usize,
        /// Output path; "-" for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Random path-network instance.
    Random {
        #[arg(long, default_value_t = 3)]
        buses: usize,
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        lines: usize,
        #[arg(long, default_value_t = 4)]
        od_count: usize,
        /// Comma-separated bus capacities, cycled across the fleet.
        #[arg(long, default_value = "2,3")]
        capacities: String,
        /// Resource count K.
        #[arg(long, default_value_t = 1)]
        resources: usize,
        /// Cost regime: "zero", "small:<eta>", or "general".
        #[arg(long, default_value = "zero")]
        costs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Suite: "kcover" or "random".
    #[arg(long, default_value = "kcover")]
    suite: String,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, value_enum, default_value = "nc")]
    algorithm: AlgorithmArg,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "float")]
    lp_mode: LpModeArg,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: usize,
}

/// 1 for input/validation failures, 2 for limit aborts.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(oe) = err.downcast_ref::<OracleError>() {
        if matches!(oe, OracleError::LimitExceeded { .. }) {
            return 2;
        }
    }
    if let Some(ce) = err.downcast_ref::<CompositeError>() {
        if matches!(ce, CompositeError::EnumerationCap { .. }) {
            return 2;
        }
    }
    if let Some(be) = err.downcast_ref::<BenchError>() {
        if matches!(be, BenchError::Composite(CompositeError::EnumerationCap { .. })) {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let code = classify(&err);
            let diag = json!({ "error": err.to_string(), "exit_code": code });
            eprintln!("{}", serde_json::to_string_pretty(&diag).unwrap());
            ExitCode::from(code)
        }
    }
}

fn read_input(path: &str) -> anyhow::Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read(path)?)
    }
}

fn load(path: &str) -> anyhow::Result<Instance> {
    Ok(load_instance(&read_input(path)?)?)
}

fn parse_rat_arg(name: &str, s: &str) -> anyhow::Result<Rat> {
    parse_rat(s).ok_or_else(|| anyhow::anyhow!("{name}: cannot parse '{s}' as a rational"))
}

fn emit(report: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}

fn header(config: serde_json::Value) -> serde_json::Value {
    json!({ "tool_version": env!("CARGO_PKG_VERSION"), "config": config })
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Validate { path } => {
            let instance = load(&path)?;
            let violations = validate(&instance);
            let ok = violations.is_empty();
            emit(json!({
                "meta": header(json!({ "command": "validate", "path": path })),
                "valid": ok,
                "violations": violations.iter().map(|v| v.message.clone()).collect::<Vec<_>>(),
            }));
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Relax(args) => {
            let instance = load(&args.path)?;
            let restriction = match &args.low_cost {
                Some(s) => Restriction::LowCost(parse_rat_arg("--low-cost", s)?),
                None => Restriction::Full,
            };
            let plan = solve_relaxation(&instance, restriction, args.lp_mode.to_mode())?;
            emit(json!({
                "meta": header(json!({
                    "command": "relax",
                    "path": args.path,
                    "low_cost": args.low_cost,
                    "lp_mode": if args.lp_mode == LpModeArg::Exact { "exact" } else { "float" },
                })),
                "plan": plan.to_json(&instance),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Round(args) => {
            let instance = load(&args.path)?;
            let algorithm = match args.algorithm {
                AlgorithmArg::Nc => AlgorithmSpec::Nc,
                AlgorithmArg::Lc => AlgorithmSpec::Lc {
                    eta: parse_rat_arg("--eta", args.eta.as_deref().unwrap_or("1/5"))?,
                },
                AlgorithmArg::C => AlgorithmSpec::C {
                    eta: parse_rat_arg("--eta", args.eta.as_deref().unwrap_or("1/5"))?,
                },
                AlgorithmArg::CTol => AlgorithmSpec::CTol {
                    eta: parse_rat_arg("--eta", args.eta.as_deref().unwrap_or("1/5"))?,
                    tau: parse_rat_arg("--tau", args.tau.as_deref().unwrap_or("1/10"))?,
                },
            };
            let opt = if args.with_oracle {
                Some(solve_exact(&instance, &OracleLimits::default())?.opt_value)
            } else {
                None
            };
            let stats = run_trials(
                &instance,
                &algorithm,
                args.trials,
                args.seed,
                args.lp_mode.to_mode(),
                args.enum_cap,
                opt.as_ref(),
            )?;
            if let Some(csv_path) = &args.csv {
                std::fs::write(csv_path, stats.to_csv())?;
            }
            let mut report = json!({
                "meta": header(json!({
                    "command": "round",
                    "path": args.path,
                    "algorithm": stats.algorithm,
                    "eta": args.eta,
                    "tau": args.tau,
                    "trials": args.trials,
                    "seed": args.seed,
                    "lp_mode": if args.lp_mode == LpModeArg::Exact { "exact" } else { "float" },
                    "enum_cap": args.enum_cap,
                })),
                "stats": stats.to_json(),
            });
            if args.budget_audit {
                let k = instance.k;
                let max_usage: Vec<f64> = (0..k)
                    .map(|r| {
                        stats
                            .records
                            .iter()
                            .map(|rec| rec.usage[r])
                            .fold(0.0f64, f64::max)
                    })
                    .collect();
                report["budget_audit"] = json!({ "max_usage": max_usage });
            }
            emit(report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(args) => {
            let instance = load(&args.path)?;
            let limits = OracleLimits {
                max_assignments: args.max_assignments,
                max_allocation_space: args.max_allocation_space,
                prune: !args.no_prune,
            };
            let result = solve_exact(&instance, &limits)?;
            emit(json!({
                "meta": header(json!({
                    "command": "oracle",
                    "path": args.path,
                    "max_assignments": args.max_assignments,
                    "max_allocation_space": args.max_allocation_space,
                    "prune": !args.no_prune,
                })),
                "opt_value": result.opt_f64(),
                "plan": result.plan.to_json(&instance),
                "nodes_explored": result.nodes_explored,
                "assignments_enumerated": result.assignments_enumerated,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(args) => {
            let (instance, out) = match args.generator {
                Generator::Kcover { n, sets, k, out } => {
                    let family = parse_family(&sets)?;
                    let spec = KCoverSpec { n, family, k };
                    (gen_kcover_instance(&spec)?, out)
                }
                Generator::Random {
                    buses,
                    nodes,
                    lines,
                    od_count,
                    capacities,
                    resources,
                    costs,
                    seed,
                    out,
                } => {
                    let capacities = capacities
                        .split(',')
                        .map(|c| c.trim().parse::<u32>())
                        .collect::<Result<Vec<_>, _>>()?;
                    let cost_regime = parse_cost_regime(&costs)?;
                    let config = RandomConfig {
                        buses,
                        nodes,
                        lines,
                        od_count,
                        capacities,
                        k: resources,
                        cost_regime,
                        ..Default::default()
                    };
                    (gen_random_instance(&config, seed)?, out)
                }
            };
            let doc = save_instance(&instance);
            if out == "-" {
                println!("{}", String::from_utf8_lossy(&doc));
            } else {
                std::fs::write(&out, doc)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => cmd_bench(args),
    }
}

fn parse_family(sets: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    sets.split(';')
        .map(|subset| {
            subset
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse::<usize>()
                        .map_err(|_| anyhow::anyhow!("bad element '{e}' in --sets"))
                })
                .collect()
        })
        .collect()
}

fn parse_cost_regime(s: &str) -> anyhow::Result<CostRegime> {
    if s == "zero" {
        Ok(CostRegime::Zero)
    } else if s == "general" {
        Ok(CostRegime::General)
    } else if let Some(eta) = s.strip_prefix("small:") {
        Ok(CostRegime::Small(parse_rat_arg("--costs small:<eta>", eta)?))
    } else {
        Err(anyhow::anyhow!("--costs must be 'zero', 'small:<eta>', or 'general'"))
    }
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let eta = args.eta.as_deref().map(|s| parse_rat_arg("--eta", s)).transpose()?;
    let tau = args.tau.as_deref().map(|s| parse_rat_arg("--tau", s)).transpose()?;
    let algorithm = match args.algorithm {
        AlgorithmArg::Nc => AlgorithmSpec::Nc,
        AlgorithmArg::Lc => AlgorithmSpec::Lc {
            eta: eta.clone().unwrap_or_else(|| lprc::rational::rat(1, 5)),
        },
        AlgorithmArg::C => AlgorithmSpec::C {
            eta: eta.clone().unwrap_or_else(|| lprc::rational::rat(1, 5)),
        },
        AlgorithmArg::CTol => AlgorithmSpec::CTol {
            eta: eta.clone().unwrap_or_else(|| lprc::rational::rat(1, 5)),
            tau: tau.clone().unwrap_or_else(|| lprc::rational::rat(1, 10)),
        },
    };

    let mut rows = Vec::new();
    for i in 0..args.instances {
        let inst_seed = args.seed + i as u64;
        let instance = match args.suite.as_str() {
            "kcover" => {
                // A rotating family over a small ground set, varied by seed.
                let n = 5 + (inst_seed as usize % 3);
                let family: Vec<Vec<usize>> = (0..4)
                    .map(|j| {
                        let a = 1 + ((inst_seed as usize + j) % n);
                        let b = 1 + ((inst_seed as usize + 2 * j + 1) % n);
                        let mut s = vec![a, b, 1 + ((j + 2) % n)];
                        s.sort_unstable();
                        s.dedup();
                        s
                    })
                    .collect();
                gen_kcover_instance(&KCoverSpec { n, family, k: 2 })?
            }
            "random" => {
                let cost_regime = match &algorithm {
                    AlgorithmSpec::Nc => CostRegime::Zero,
                    AlgorithmSpec::Lc { eta } => CostRegime::Small(eta.clone()),
                    _ => CostRegime::General,
                };
                gen_random_instance(&RandomConfig { cost_regime, ..Default::default() }, inst_seed)?
            }
            other => return Err(anyhow::anyhow!("unknown suite '{other}'")),
        };

        let gamma = solve_relaxation(&instance, Restriction::Full, args.lp_mode.to_mode())?
            .gamma_f64();
        let opt = solve_exact(&instance, &OracleLimits::default())
            .ok()
            .map(|r| r.opt_value);
        let stats = run_trials(
            &instance,
            &algorithm,
            args.trials,
            args.seed,
            args.lp_mode.to_mode(),
            args.enum_cap,
            opt.as_ref(),
        )?;
        rows.push(json!({
            "instance_seed": inst_seed,
            "gamma": gamma,
            "opt": opt.as_ref().map(rat_to_f64),
            "mean": stats.mean,
            "stderr": stats.stderr,
            "best": stats.max,
            "bound": stats.bound,
            "discards": stats.discards,
        }));
    }
    emit(json!({
        "meta": header(json!({
            "command": "bench",
            "suite": args.suite,
            "instances": args.instances,
            "algorithm": algorithm.name(),
            "eta": args.eta,
            "tau": args.tau,
            "trials": args.trials,
            "seed": args.seed,
            "enum_cap": args.enum_cap,
        })),
        "rows": rows,
    }));
    Ok(ExitCode::SUCCESS)
}

