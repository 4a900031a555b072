//! `indexfiber`: count and enumerate polynomial maps with prescribed fixed-point
//! multiplicities and holomorphic indices.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use indexfiber_core::fiber::{count_fiber, roundtrip};
use indexfiber_core::index::MultiplicityProfile;
use indexfiber_core::problem::ProblemSpec;
use indexfiber_core::psi::assemble_psi;
use indexfiber_core::report::{
    error_exit_code, error_json, report_exit_code, report_json, report_text, spectrum_json, to_canonical_string,
    EXIT_ARGUMENT, EXIT_DEGENERATE, EXIT_OK,
};
use indexfiber_core::selftest::{run_selftest, Check, SelftestOptions};
use indexfiber_core::solver::{Backend, SolverConfig};
use indexfiber_core::sweep::{sweep, SweepOptions};
use indexfiber_core::Error;

const SEED_ENV: &str = "INDEXFIBER_SEED";

#[derive(Parser)]
#[command(name = "indexfiber", version, about = "Fibers of the holomorphic fixed-point index map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the fiber over a spectrum given as a JSON problem
    Count(ProblemArgs),
    /// Count and list every monic centered representative
    Enumerate(ProblemArgs),
    /// Run the built-in identity and oracle checks
    Selftest(SelftestArgs),
    /// Rebuild random maps from their own spectra
    Roundtrip(RoundtripArgs),
    /// Compare observed and generic counts over all profiles up to a degree
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Companion,
    Homotopy,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Companion => Backend::Companion,
            BackendArg::Homotopy => Backend::Homotopy,
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    /// RNG seed; falls back to the problem file, then $INDEXFIBER_SEED
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol_dedup: Option<f64>,
    #[arg(long)]
    tol_coincide: Option<f64>,
    /// Worker threads for path tracking
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Fresh solver attempts after a failed path
    #[arg(long)]
    retries: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file; stdin when omitted or "-"
    input: Option<String>,
    /// Take l-1 indices and set the last to minus their sum
    #[arg(long)]
    complete_last: bool,
    /// Write the psi system as "exponents<TAB>re<TAB>im" lines
    #[arg(long)]
    dump_psi: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random rational tuples per determinant profile
    #[arg(long, default_value_t = 10)]
    alpha_tuples: usize,
    /// Corrupt one check on purpose (similarity, block-determinant, ...)
    #[arg(long)]
    inject_fault: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Multiplicities, e.g. 1,1,2
    #[arg(long, value_delimiter = ',', required = true)]
    profile: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: u64,
    /// Smallest success ratio that counts as a pass
    #[arg(long, default_value_t = 0.95)]
    min_ratio: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 6)]
    d_max: usize,
    /// Add a non-generic row (m_1 + m_2 = 0) for each profile with l >= 4
    #[arg(long)]
    inject_non_generic: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Argument(format!("{SEED_ENV} is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Flags win over the problem file, which wins over the environment.
fn solver_config(args: &SolverArgs, spec: Option<&ProblemSpec>) -> Result<SolverConfig, Error> {
    let mut base = SolverConfig::default();
    if let Some(seed) = env_seed()? {
        base.seed = seed;
    }
    let mut config = match spec {
        Some(spec) => spec.solver_config(&base),
        None => base,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(t) = args.tol_dedup {
        config.tol_dedup = t;
    }
    if let Some(t) = args.tol_coincide {
        config.tol_coincide = t;
    }
    if let Some(t) = args.threads {
        config.threads = Some(t);
    }
    if let Some(b) = args.backend {
        config.backend = b.into();
    }
    if let Some(r) = args.retries {
        config.retries = r;
    }
    for (name, tol) in [("tol-dedup", config.tol_dedup), ("tol-coincide", config.tol_coincide)] {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Argument(format!("--{name} must lie in (0, 1), got {tol}")));
        }
    }
    if config.threads == Some(0) {
        return Err(Error::Argument("--threads must be positive".into()));
    }
    Ok(config)
}

fn read_input(path: Option<&str>) -> Result<String, Error> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Argument(format!("reading stdin: {e}")))?;
            Ok(s)
        }
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Argument(format!("reading {p}: {e}"))),
    }
}

fn emit(text: &str, output: Option<&str>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Argument(format!("writing {path}: {e}"))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Argument(format!("writing stdout: {e}")))
        }
    }
}

fn render(value: &Value, text: impl FnOnce() -> String, format: Format) -> String {
    match format {
        Format::Json => to_canonical_string(value),
        Format::Text => text(),
    }
}

fn run_problem(args: &ProblemArgs, command: &str) -> i32 {
    let with_reps = command == "enumerate";
    let mut output = args.out.output.clone();
    let result = (|| -> Result<i32, Error> {
        let text = read_input(args.input.as_deref())?;
        let spec = ProblemSpec::from_json(&text, args.complete_last)?;
        if output.is_none() {
            output = spec.options.output.clone();
        }
        let config = solver_config(&args.solver, Some(&spec))?;
        let spectrum = spec.spectrum()?;
        if let Some(path) = &args.dump_psi {
            if spec.profile.ell() >= 2 {
                let psi = assemble_psi(&spec.profile, &spectrum)?;
                fs::write(path, psi.dump()).map_err(|e| Error::Argument(format!("writing {path}: {e}")))?;
            }
        }
        match count_fiber(&spectrum, &config) {
            Ok(report) => {
                let value = report_json(command, &report, &config, with_reps);
                emit(&render(&value, || report_text(&report, with_reps), args.out.format), output.as_deref())?;
                Ok(report_exit_code(&report))
            }
            Err(err) => {
                let mut value = error_json(command, &err, Some(config.seed));
                value["indices"] = spectrum_json(&spectrum);
                value["profile"] = json!(spec.profile.parts());
                emit(&render(&value, || format!("error: {err}\n"), args.out.format), output.as_deref())?;
                Ok(error_exit_code(&err))
            }
        }
    })();
    result.unwrap_or_else(|err| fail(command, &err, args.out.format))
}

fn fail(command: &str, err: &Error, format: Format) -> i32 {
    let value = error_json(command, err, None);
    eprint!("{}", render(&value, || format!("error: {err}\n"), format));
    error_exit_code(err)
}

fn run_selftest_cmd(args: &SelftestArgs) -> i32 {
    let inject_fault = match args.inject_fault.as_deref().map(|n| Check::from_name(n).ok_or(n)) {
        Some(Err(name)) => {
            let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
            let err = Error::Argument(format!("unknown check {name:?}; expected one of {}", names.join(", ")));
            return fail("selftest", &err, args.out.format);
        }
        Some(Ok(c)) => Some(c),
        None => None,
    };
    let options = SelftestOptions {
        seed: args.seed,
        alpha_tuples: args.alpha_tuples,
        inject_fault,
        ..Default::default()
    };
    let rows = run_selftest(&options);
    let all_pass = rows.iter().all(|r| r.passed());
    let value = json!({
        "command": "selftest",
        "seed": args.seed,
        "passed": all_pass,
        "rows": rows.iter().map(|r| json!({
            "check": r.check.name(),
            "cases": r.cases,
            "failures": r.failures,
            "worst": r.worst,
            "passed": r.passed(),
        })).collect::<Vec<_>>(),
    });
    let text = || {
        let mut s = format!("{:<22} {:>7} {:>8} {:>11}  result\n", "check", "cases", "failures", "worst");
        for r in &rows {
            s += &format!(
                "{:<22} {:>7} {:>8} {:>11.3e}  {}\n",
                r.check.name(),
                r.cases,
                r.failures,
                r.worst,
                if r.passed() { "PASS" } else { "FAIL" }
            );
        }
        s
    };
    match emit(&render(&value, text, args.out.format), args.out.output.as_deref()) {
        Ok(()) if all_pass => EXIT_OK,
        Ok(()) => EXIT_DEGENERATE,
        Err(err) => fail("selftest", &err, args.out.format),
    }
}

fn run_roundtrip_cmd(args: &RoundtripArgs) -> i32 {
    let result = (|| -> Result<i32, Error> {
        let profile = MultiplicityProfile::new(args.profile.clone())?;
        let config = solver_config(&args.solver, None)?;
        let mut failures = Vec::new();
        let mut successes = 0u64;
        for trial in 0..args.trials {
            let seed = config.seed.wrapping_add(trial);
            let outcome = roundtrip(&profile, seed, &config)?;
            if outcome.success {
                successes += 1;
            } else {
                failures.push(json!({
                    "seed": seed,
                    "best_distance": outcome.best_distance,
                    "error": outcome.error.map(|e| e.to_string()),
                }));
            }
        }
        let ratio = if args.trials == 0 { 1.0 } else { successes as f64 / args.trials as f64 };
        let passed = ratio >= args.min_ratio;
        let value = json!({
            "command": "roundtrip",
            "profile": profile.parts(),
            "seed": config.seed,
            "trials": args.trials,
            "successes": successes,
            "ratio": ratio,
            "passed": passed,
            "failures": failures,
        });
        let text = || format!("profile {profile}: {successes}/{} recovered ({:.1}%)\n", args.trials, 100.0 * ratio);
        emit(&render(&value, text, args.out.format), args.out.output.as_deref())?;
        Ok(if passed { EXIT_OK } else { EXIT_DEGENERATE })
    })();
    result.unwrap_or_else(|err| fail("roundtrip", &err, args.out.format))
}

fn run_sweep_cmd(args: &SweepArgs) -> i32 {
    let result = (|| -> Result<i32, Error> {
        if args.d_max < 2 || args.d_max > 10 {
            return Err(Error::Argument(format!("--d-max must lie in 2..=10, got {}", args.d_max)));
        }
        let config = solver_config(&args.solver, None)?;
        let rows = sweep(
            args.d_max,
            &SweepOptions {
                seed: config.seed,
                config: config.clone(),
                inject_non_generic: args.inject_non_generic,
            },
        );
        let all_ok = rows.iter().all(|r| r.consistent());
        let value = json!({
            "command": "sweep",
            "d_max": args.d_max,
            "seed": config.seed,
            "consistent": all_ok,
            "rows": rows.iter().map(|r| json!({
                "profile": r.profile.parts(),
                "indices": spectrum_json(&r.spectrum),
                "injected_non_generic": r.injected,
                "expected_mp": r.expected.0,
                "expected_mc": r.expected.1,
                "mp_count": r.observed().map(|o| o.0),
                "mc_count": r.observed().map(|o| o.1),
                "generic": r.outcome.as_ref().ok().map(|rep| rep.is_generic()),
                "error": r.outcome.as_ref().err().map(|e| e.to_string()),
                "consistent": r.consistent(),
            })).collect::<Vec<_>>(),
        });
        let text = || {
            let mut s = format!("{:<16} {:>9} {:>9} {:>9} {:>9}  row\n", "profile", "mp", "exp_mp", "mc", "exp_mc");
            for r in &rows {
                let (mp, mc) = r
                    .observed()
                    .map_or(("-".to_string(), "-".to_string()), |(a, b)| (a.to_string(), b.to_string()));
                let tag = match (r.consistent(), r.injected) {
                    (true, false) => "ok",
                    (true, true) => "ok (non-generic, below bound)",
                    (false, _) => "MISMATCH",
                };
                s += &format!(
                    "{:<16} {:>9} {:>9} {:>9} {:>9}  {tag}\n",
                    r.profile.to_string(),
                    mp,
                    r.expected.0,
                    mc,
                    r.expected.1
                );
            }
            s
        };
        emit(&render(&value, text, args.out.format), args.out.output.as_deref())?;
        Ok(if all_ok { EXIT_OK } else { EXIT_DEGENERATE })
    })();
    result.unwrap_or_else(|err| fail("sweep", &err, args.out.format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match &cli.command {
        Command::Count(args) => run_problem(args, "count"),
        Command::Enumerate(args) => run_problem(args, "enumerate"),
        Command::Selftest(args) => run_selftest_cmd(args),
        Command::Roundtrip(args) => run_roundtrip_cmd(args),
        Command::Sweep(args) => run_sweep_cmd(args),
    };
    ExitCode::from(code as u8)
}
