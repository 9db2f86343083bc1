//! Command-line driver for the qprep library.
//!
//! Subcommands wrap the library modules one-to-one and speak the text
//! formats from `qprep::format`. Exit codes are a stable contract: 0 on
//! success, 1 for usage problems (bad flags, bad flag combinations), 2 for
//! data problems (unreadable files, malformed documents, infeasible
//! requests).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use qprep::design::{main_effects, DesignMatrix, FACTORS, RUNS};
use qprep::expand::enforce_degree_cap;
use qprep::format;
use qprep::generate::{design_point, generate, size_preset, FactorSettings, GeneratorConfig};
use qprep::instance::{QuboInstance, Solution};
use qprep::reduce::{reduce, ReductionLog, Rule};
use qprep::sensitivity::slack_report;
use qprep::solve::{brute_force, tabu_search, TabuParams};

#[derive(Parser)]
#[command(name = "qprep", version, about = "Preprocessing toolkit for binary quadratic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the fixing rules and write the reduced instance
    Reduce {
        input: PathBuf,
        /// Where the reduced instance goes
        #[arg(short, long)]
        output: PathBuf,
        /// Where the reduction report goes
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Create a random benchmark instance
    Generate {
        /// Size preset P1..P6 supplying node and edge counts
        #[arg(long)]
        preset: Option<String>,
        /// Design point 1..16 supplying all six factors
        #[arg(long)]
        test: Option<usize>,
        /// Node count; overrides the preset
        #[arg(long)]
        n: Option<usize>,
        /// Off-diagonal entry count; overrides the preset
        #[arg(long)]
        edges: Option<usize>,
        /// Coefficient bound; overrides the design point
        #[arg(long)]
        ub: Option<i64>,
        #[arg(long)]
        lin_mult: Option<i64>,
        #[arg(long)]
        quad_mult: Option<i64>,
        #[arg(long)]
        pct_quad_mult: Option<f64>,
        #[arg(long)]
        pct_lin_mult: Option<f64>,
        #[arg(long)]
        pct_lin_nonzero: Option<f64>,
        #[arg(long)]
        hub_fraction: Option<f64>,
        #[arg(long)]
        hub_edge_share: Option<f64>,
        /// Defaults to QPRO_SEED, then 1
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance and print the solution
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// Tabu iteration budget
        #[arg(long, default_value_t = 100_000)]
        max_iterations: u64,
        /// Tabu wall-clock budget in seconds
        #[arg(long)]
        time_limit: Option<f64>,
        /// Tabu tenure
        #[arg(long, default_value_t = 7)]
        tenure: u32,
        /// Defaults to QPRO_SEED, then 1
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Map a reduced-space solution back to the original variables
    Lift {
        report: PathBuf,
        solution: PathBuf,
    },
    /// Rewrite an instance so no variable exceeds a degree cap
    Expand {
        input: PathBuf,
        /// Largest allowed degree
        #[arg(long)]
        max_degree: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Where the expansion report goes
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Print per-variable determination slack as CSV
    Sensitivity { input: PathBuf },
    /// Print a coefficient histogram as CSV
    Stats {
        input: PathBuf,
        /// Histogram bin width
        #[arg(long, default_value_t = 1)]
        hist: i64,
    },
    /// Generate, reduce, and analyze a batch of instances
    Experiment {
        /// Size preset P1..P6
        #[arg(long)]
        preset: Option<String>,
        /// Node count; overrides the preset
        #[arg(long)]
        n: Option<usize>,
        /// Off-diagonal entry count; overrides the preset
        #[arg(long)]
        edges: Option<usize>,
        /// Test ids: "1-16", "3", or "3,15,16"
        #[arg(long, default_value = "1-16")]
        tests: String,
        /// Seeds per test, counting up from the base seed
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// Base seed; defaults to QPRO_SEED, then 1
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for runs.csv, summary.csv, and effects.csv
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Tabu,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<qprep::Error> for Failure {
    fn from(err: qprep::Error) -> Self {
        Failure::Data(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real usage
            // errors get a nonzero code.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Reduce { input, output, log } => cmd_reduce(&input, &output, log.as_deref()),
        Command::Generate {
            preset,
            test,
            n,
            edges,
            ub,
            lin_mult,
            quad_mult,
            pct_quad_mult,
            pct_lin_mult,
            pct_lin_nonzero,
            hub_fraction,
            hub_edge_share,
            seed,
            output,
        } => {
            let shape = resolve_shape(preset.as_deref(), n, edges)?;
            let given = [
                ub.is_some(),
                lin_mult.is_some(),
                quad_mult.is_some(),
                pct_quad_mult.is_some(),
                pct_lin_mult.is_some(),
                pct_lin_nonzero.is_some(),
            ];
            let mut factors = resolve_factors(test, given)?;
            if let Some(v) = ub {
                factors.ub = v;
            }
            if let Some(v) = lin_mult {
                factors.lin_mult = v;
            }
            if let Some(v) = quad_mult {
                factors.quad_mult = v;
            }
            if let Some(v) = pct_quad_mult {
                factors.pct_quad_mult = v;
            }
            if let Some(v) = pct_lin_mult {
                factors.pct_lin_mult = v;
            }
            if let Some(v) = pct_lin_nonzero {
                factors.pct_lin_nonzero = v;
            }
            let seed = effective_seed(seed)?;
            let mut config = GeneratorConfig::new(shape.0, shape.1, factors, seed);
            if let Some(h) = hub_fraction {
                config.hub_fraction = h;
            }
            if let Some(h) = hub_edge_share {
                config.hub_edge_share = h;
            }
            cmd_generate(&config, &output)
        }
        Command::Solve { input, method, max_iterations, time_limit, tenure, seed } => {
            cmd_solve(&input, method, max_iterations, time_limit, tenure, seed)
        }
        Command::Lift { report, solution } => cmd_lift(&report, &solution),
        Command::Expand { input, max_degree, output, log } => {
            cmd_expand(&input, max_degree, &output, log.as_deref())
        }
        Command::Sensitivity { input } => cmd_sensitivity(&input),
        Command::Stats { input, hist } => cmd_stats(&input, hist),
        Command::Experiment { preset, n, edges, tests, seeds, seed, output } => {
            let shape = resolve_shape(preset.as_deref(), n, edges)?;
            let tests = parse_tests(&tests)?;
            if seeds == 0 {
                return Err(Failure::Usage("--seeds must be at least 1".into()));
            }
            let base = effective_seed(seed)?;
            cmd_experiment(shape, &tests, seeds, base, &output)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<QuboInstance, Failure> {
    format::parse_instance(&read_file(path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// Seed precedence: explicit flag, then QPRO_SEED, then 1.
fn effective_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("QPRO_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Failure::Usage(format!("QPRO_SEED must be an unsigned integer, got {raw:?}"))
        }),
        Err(_) => Ok(1),
    }
}

fn resolve_shape(
    preset: Option<&str>,
    n: Option<usize>,
    edges: Option<usize>,
) -> Result<(usize, usize), Failure> {
    let base = preset.map(size_preset).transpose()?;
    let n = n.or(base.map(|(n, _)| n));
    let edges = edges.or(base.map(|(_, e)| e));
    match (n, edges) {
        (Some(n), Some(e)) => Ok((n, e)),
        _ => Err(Failure::Usage("provide --preset, or both --n and --edges".into())),
    }
}

/// Base factor settings: a design point when `--test` is given, otherwise
/// all six factor flags must be present (the caller then overrides every
/// field, so the placeholder values never survive).
fn resolve_factors(test: Option<usize>, given: [bool; 6]) -> Result<FactorSettings, Failure> {
    match test {
        Some(t) => Ok(design_point(t)?),
        None => {
            if given.contains(&false) {
                return Err(Failure::Usage(
                    "provide --test, or all six factor flags (--ub --lin-mult --quad-mult \
                     --pct-quad-mult --pct-lin-mult --pct-lin-nonzero)"
                        .into(),
                ));
            }
            Ok(FactorSettings {
                ub: 1,
                lin_mult: 1,
                quad_mult: 1,
                pct_quad_mult: 0.0,
                pct_lin_mult: 0.0,
                pct_lin_nonzero: 0.0,
            })
        }
    }
}

fn rule_label(rule: Rule) -> &'static str {
    match rule {
        Rule::R1 => "R1",
        Rule::R2 => "R2",
        Rule::R3 => "R3",
        Rule::R5 => "R5",
    }
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_reduce(input: &Path, output: &Path, log_path: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    let original_entries = inst.entry_count();
    let start = Instant::now();
    let (reduced, log) = reduce(&inst)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    write_file(output, &format::write_instance(&reduced))?;
    println!(
        "reduced {} -> {} variables in {} passes (offset {}, {:.2} ms)",
        log.original_n,
        reduced.num_variables(),
        log.passes,
        log.offset,
        elapsed_ms,
    );
    if let Some(path) = log_path {
        let report = format::ReductionReport {
            reduced_n: reduced.num_variables(),
            original_entries,
            reduced_entries: reduced.entry_count(),
            elapsed_ms,
            log,
        };
        write_file(path, &format::write_report(&report))?;
    }
    Ok(())
}

fn cmd_generate(config: &GeneratorConfig, output: &Path) -> Result<(), Failure> {
    let inst = generate(config)?;
    let f = &config.factors;
    let header = format!(
        "# generated: n={} edges={} ub={} lin_mult={} quad_mult={} pct_quad_mult={} \
         pct_lin_mult={} pct_lin_nonzero={} hub_fraction={} hub_edge_share={} seed={}\n",
        config.n,
        config.edges,
        f.ub,
        f.lin_mult,
        f.quad_mult,
        f.pct_quad_mult,
        f.pct_lin_mult,
        f.pct_lin_nonzero,
        config.hub_fraction,
        config.hub_edge_share,
        config.seed,
    );
    write_file(output, &(header + &format::write_instance(&inst)))?;
    println!(
        "wrote {} ({} variables, {} off-diagonal entries, seed {})",
        output.display(),
        config.n,
        config.edges,
        config.seed,
    );
    Ok(())
}

fn cmd_solve(
    input: &Path,
    method: Method,
    max_iterations: u64,
    time_limit: Option<f64>,
    tenure: u32,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    match method {
        Method::Brute => {
            let result = brute_force(&inst)?;
            print!("{}", format::write_solution(&result.solution));
        }
        Method::Tabu => {
            let time_limit = match time_limit {
                Some(secs) if secs.is_finite() && secs > 0.0 => {
                    Some(Duration::from_secs_f64(secs))
                }
                Some(secs) => {
                    return Err(Failure::Usage(format!(
                        "--time-limit must be a positive number of seconds, got {secs}"
                    )));
                }
                None => None,
            };
            let seed = effective_seed(seed)?;
            let params = TabuParams {
                max_iterations: Some(max_iterations),
                time_limit,
                tenure,
                seed,
            };
            let solution = tabu_search(&inst, &params)?;
            println!("# tabu seed {seed} max_iterations {max_iterations} tenure {tenure}");
            print!("{}", format::write_solution(&solution));
        }
    }
    Ok(())
}

fn cmd_lift(report_path: &Path, solution_path: &Path) -> Result<(), Failure> {
    let report = format::parse_report(&read_file(report_path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", report_path.display())))?;
    let reduced = format::parse_solution(&read_file(solution_path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", solution_path.display())))?;
    let assignment = report.log.lift_assignment(&reduced.assignment)?;
    let objective = reduced
        .objective
        .checked_add(report.log.offset)
        .ok_or_else(|| Failure::Data("lifted objective overflows".into()))?;
    print!("{}", format::write_solution(&Solution { assignment, objective }));
    Ok(())
}

fn cmd_expand(
    input: &Path,
    max_degree: usize,
    output: &Path,
    log_path: Option<&Path>,
) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    let (expanded, log) = enforce_degree_cap(&inst, max_degree)?;
    write_file(output, &format::write_instance(&expanded))?;
    println!(
        "expanded {} -> {} variables under degree cap {} (penalty {})",
        log.original_n,
        log.expanded_n(),
        log.cap,
        log.penalty,
    );
    if let Some(path) = log_path {
        write_file(path, &format::write_expansion_report(&log))?;
    }
    Ok(())
}

fn cmd_sensitivity(input: &Path) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    println!("variable,rule,slack");
    for i in 0..inst.num_variables() {
        if let Some(report) = slack_report(&inst, i) {
            println!("{},{},{}", i + 1, rule_label(report.rule), report.slack);
        }
    }
    Ok(())
}

fn cmd_stats(input: &Path, hist: i64) -> Result<(), Failure> {
    if hist < 1 {
        return Err(Failure::Usage(format!("--hist must be at least 1, got {hist}")));
    }
    let inst = load_instance(input)?;
    println!("bin,count");
    for (bin, count) in qprep::generate::histogram(&inst, hist) {
        println!("{bin},{count}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Experiment harness

fn parse_tests(spec: &str) -> Result<Vec<usize>, Failure> {
    let mut out = std::collections::BTreeSet::new();
    for part in spec.split(',') {
        let part = part.trim();
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (part, part),
        };
        let bad = || Failure::Usage(format!("--tests expects ids in 1..=16, got {part:?}"));
        let lo: usize = lo.parse().map_err(|_| bad())?;
        let hi: usize = hi.parse().map_err(|_| bad())?;
        if lo < 1 || hi > 16 || lo > hi {
            return Err(bad());
        }
        out.extend(lo..=hi);
    }
    Ok(out.into_iter().collect())
}

struct RunRecord {
    test: usize,
    seed: u64,
    log: ReductionLog,
    elapsed_ms: f64,
    /// Some(true/false) when the instance was small enough to verify by
    /// enumeration, None otherwise.
    optimum_match: Option<bool>,
}

fn cmd_experiment(
    (n, edges): (usize, usize),
    tests: &[usize],
    seeds: u64,
    base_seed: u64,
    out_dir: &Path,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Data(format!("{}: {e}", out_dir.display())))?;

    let mut records: Vec<RunRecord> = Vec::with_capacity(tests.len() * seeds as usize);
    for &test in tests {
        let factors = design_point(test)?;
        for offset in 0..seeds {
            let seed = base_seed + offset;
            let config = GeneratorConfig::new(n, edges, factors, seed);
            let inst = generate(&config)?;
            let start = Instant::now();
            let (reduced, log) = reduce(&inst)?;
            let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
            let optimum_match = match brute_force(&inst) {
                Ok(original) => {
                    let shrunk = brute_force(&reduced)?;
                    Some(original.solution.objective == shrunk.solution.objective + log.offset)
                }
                Err(qprep::Error::TooLarge { .. }) => None,
                Err(other) => return Err(other.into()),
            };
            records.push(RunRecord { test, seed, log, elapsed_ms, optimum_match });
        }
    }

    let mut runs_csv = String::from(
        "test,seed,n,edges,fixed,percent_reduction,passes,rule1,rule2,rule3,rule5,elapsed_ms,optimum_match\n",
    );
    for r in &records {
        let _ = writeln!(
            runs_csv,
            "{},{},{},{},{},{:.4},{},{},{},{},{},{:.3},{}",
            r.test,
            r.seed,
            n,
            edges,
            r.log.fixings.len(),
            r.log.percent_reduction(),
            r.log.passes,
            r.log.rule_count(Rule::R1),
            r.log.rule_count(Rule::R2),
            r.log.rule_count(Rule::R3),
            r.log.rule_count(Rule::R5),
            r.elapsed_ms,
            match r.optimum_match {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            },
        );
    }
    write_file(&out_dir.join("runs.csv"), &runs_csv)?;

    let mut summary_csv = String::from(
        "test,runs,mean_percent_reduction,min_percent_reduction,max_percent_reduction,mean_passes,mean_elapsed_ms\n",
    );
    let mut mean_by_test = Vec::with_capacity(tests.len());
    for &test in tests {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.test == test).collect();
        let count = rows.len() as f64;
        let percents: Vec<f64> = rows.iter().map(|r| r.log.percent_reduction()).collect();
        let mean = percents.iter().sum::<f64>() / count;
        let min = percents.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = percents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean_passes = rows.iter().map(|r| f64::from(r.log.passes)).sum::<f64>() / count;
        let mean_ms = rows.iter().map(|r| r.elapsed_ms).sum::<f64>() / count;
        let _ = writeln!(
            summary_csv,
            "{test},{},{mean:.4},{min:.4},{max:.4},{mean_passes:.2},{mean_ms:.3}",
            rows.len(),
        );
        mean_by_test.push(mean);
        println!("test {test}: mean reduction {mean:.1}% over {} seeds", rows.len());
    }
    write_file(&out_dir.join("summary.csv"), &summary_csv)?;

    // Effects need one response per design run, so they only exist for the
    // full test set.
    if tests.len() == RUNS {
        let report = main_effects(&DesignMatrix::standard(), &mean_by_test)?;
        let mut effects_csv = String::from("kind,factors,effect,aliased_with\n");
        for (f, effect) in report.main.iter().enumerate() {
            let _ = writeln!(effects_csv, "main,f{},{effect:.4},", f + 1);
        }
        for inter in &report.interactions {
            let partners: Vec<String> = report
                .alias_groups
                .iter()
                .find(|g| g.contains(&(inter.a, inter.b)))
                .map(|g| {
                    g.iter()
                        .filter(|&&p| p != (inter.a, inter.b))
                        .map(|&(a, b)| format!("f{}*f{}", a + 1, b + 1))
                        .collect()
                })
                .unwrap_or_default();
            let _ = writeln!(
                effects_csv,
                "interaction,f{}*f{},{:.4},{}",
                inter.a + 1,
                inter.b + 1,
                inter.value,
                partners.join(" "),
            );
        }
        write_file(&out_dir.join("effects.csv"), &effects_csv)?;
        debug_assert_eq!(report.main.len(), FACTORS);
    } else {
        println!("effects.csv skipped: needs all 16 tests, got {}", tests.len());
    }
    println!("wrote {}", out_dir.display());
    Ok(())
}
