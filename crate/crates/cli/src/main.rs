//! `detool`: factorize, linearize, simulate and verify discrete systems.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use detool_core::linearize::Algorithm;
use detool_core::parser::Source;
use detool_core::rational::parse_q;
use detool_core::simulate::{seeded_input, single_trace_csv};
use detool_core::{
    certify_equivalence, fdel_algorithm, linearize_cross, linearize_no_cross, linearize_with_rules,
    parse_source, parse_system, simulate_nonlinear, DiscreteSystem, Error, LinearizeOptions,
    RuleSet, Signal, Verdict, Q,
};

// Output errors such as a closed pipe are not worth a panic.
macro_rules! out {
    ($($a:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($a)*);
    }};
}

macro_rules! outln {
    ($($a:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($a)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "detool",
    version,
    about = "Linear equivalents of polynomial discrete systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Formal factorization of a polynomial or system.
    Factorize {
        file: PathBuf,
        /// Print only the formal expression.
        #[arg(long)]
        text: bool,
    },
    /// Search for an equivalent linear system.
    Linearize {
        file: PathBuf,
        /// Treat the whole of A - B - C at once.
        #[arg(long, conflicts_with_all = ["no_cross", "auto"])]
        cross: bool,
        /// Handle A and B separately; requires no cross terms.
        #[arg(long, conflicts_with = "auto")]
        no_cross: bool,
        /// Choose by the presence of cross terms (default).
        #[arg(long)]
        auto: bool,
        /// Use this rule set instead of solving.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        branch_limit: usize,
        /// Certification trials per candidate.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 300)]
        horizon: usize,
        #[arg(long, env = "DETOOL_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Exact simulation; prints `t,u,y` as CSV.
    Simulate {
        file: PathBuf,
        /// A seed, or a file of input samples (one per line, or `t,u`).
        #[arg(long)]
        input: String,
        #[arg(long)]
        horizon: usize,
        /// Add decimal columns with this many digits.
        #[arg(long)]
        decimal: Option<usize>,
    },
    /// Compare a system against a linear one on random inputs.
    Verify {
        file: PathBuf,
        #[arg(long)]
        linear: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 300)]
        horizon: usize,
        #[arg(long, env = "DETOOL_SEED", default_value_t = 1)]
        seed: u64,
        /// Print the witness trace as CSV instead of the certificate.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        decimal: Option<usize>,
    },
}

enum Failure {
    /// Bad usage, unreadable or malformed input.
    Usage(String),
    /// The method found nothing, or certification did not pass.
    Negative(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MethodFails(r) => {
                outln!("{}", pretty(&r.to_json()));
                Failure::Negative("the method fails: no admissible rule set found".into())
            }
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<DiscreteSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn factorize(file: &Path, text: bool) -> Result<(), Failure> {
    let src = parse_source(&read(file)?)?;
    let parts: Vec<(&str, _)> = match src {
        Source::Polynomial { poly, .. } => vec![("polynomial", poly)],
        Source::System { system, .. } if !system.has_cross_terms() => {
            vec![("A", system.a.clone()), ("B", system.b.clone())]
        }
        Source::System { system, .. } => vec![("A - B - C", system.underline())],
    };
    let mut out = Vec::new();
    for (name, p) in parts {
        let f = fdel_algorithm(&p)?;
        if text {
            outln!("{name}: {}", f.render());
        }
        out.push(json!({ "of": name, "factorization": f.to_json() }));
    }
    if !text {
        outln!("{}", pretty(&Value::Array(out)));
    }
    Ok(())
}

fn read_input(arg: &str, horizon: usize) -> Result<Signal, Failure> {
    if let Ok(seed) = arg.parse::<u64>() {
        return Ok(seeded_input(seed, horizon));
    }
    let text = read(Path::new(arg))?;
    let mut vals: Vec<Q> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line);
        match parse_q(field) {
            Some(v) => vals.push(v),
            None if n == 0 => continue,
            None => {
                return Err(Failure::Usage(format!(
                    "{arg}:{}: bad input sample `{field}`",
                    n + 1
                )))
            }
        }
    }
    if vals.len() < horizon {
        return Err(Failure::Usage(format!(
            "{arg}: {} samples for horizon {horizon}",
            vals.len()
        )));
    }
    Ok(Signal::new(vals))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Factorize { file, text } => factorize(&file, text),
        Cmd::Linearize {
            file,
            cross,
            no_cross,
            auto: _,
            rules,
            branch_limit,
            trials,
            horizon,
            seed,
        } => {
            let sys = load_system(&file)?;
            let opts = LinearizeOptions {
                branch_limit,
                trials,
                horizon,
                seed,
            };
            let algorithm = if cross {
                Algorithm::Cross
            } else if no_cross {
                Algorithm::NoCross
            } else {
                Algorithm::for_system(&sys)
            };
            let report = match rules {
                Some(path) => {
                    let u = RuleSet::from_json(&read(&path)?)?;
                    linearize_with_rules(&sys, algorithm, &u, &opts)?
                }
                None => match algorithm {
                    Algorithm::Cross => linearize_cross(&sys, &opts)?,
                    Algorithm::NoCross => linearize_no_cross(&sys, &opts)?,
                },
            };
            outln!("{}", pretty(&report.to_json()));
            Ok(())
        }
        Cmd::Simulate {
            file,
            input,
            horizon,
            decimal,
        } => {
            let sys = load_system(&file)?;
            let u = read_input(&input, horizon)?;
            let tr = simulate_nonlinear(&sys, &u, horizon)?;
            out!("{}", single_trace_csv(&tr, decimal));
            Ok(())
        }
        Cmd::Verify {
            file,
            linear,
            trials,
            horizon,
            seed,
            trace,
            decimal,
        } => {
            let sys = load_system(&file)?;
            let ls = load_system(&linear)?.to_linear()?;
            let cert = certify_equivalence(&sys, &ls, trials, horizon, seed)?;
            if trace {
                if let Some(csv) = cert.witness_csv(decimal) {
                    out!("{csv}");
                }
            } else {
                outln!("{}", pretty(&cert.to_json()));
            }
            match cert.verdict {
                Verdict::Pass => Ok(()),
                v => Err(Failure::Negative(v.as_str().to_string())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Negative(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
    }
}
