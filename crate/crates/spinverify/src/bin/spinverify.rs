use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args as ClapArgs, Parser, Subcommand};
use spinverify::params::Params;
use spinverify::{emit_report, parse_config, registry, run_suite, CheckDescriptor, Entry, Format, Overrides, SuiteOptions};

#[derive(Parser)]
#[command(name = "spinverify", version, about = "Run numerical and exact checks of the spin L-function integral")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every descriptor in a JSON config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: Common,
    },
    /// Run a single check.
    Check {
        check_id: String,
        #[command(flatten)]
        opts: Common,
    },
    /// List the registered checks and their defaults.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(ClapArgs)]
struct Common {
    #[arg(long)]
    p: Option<u64>,
    /// Discriminant D.
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    /// Truncation order K.
    #[arg(long)]
    order: Option<u64>,
    /// Weight r.
    #[arg(long)]
    weight: Option<u64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "SPINVERIFY_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Include runtime_ms in each report.
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            p: self.p,
            disc: self.disc,
            order: self.order,
            weight: self.weight,
            radius: self.radius,
            tol: self.tol,
            seed: self.seed,
        }
    }

    fn suite(&self) -> SuiteOptions {
        SuiteOptions { jobs: self.jobs, timings: self.timings }
    }
}

fn finish(entries: &[Entry], overrides: &Overrides, opts: &Common) -> ExitCode {
    let result = run_suite(entries, overrides, opts.suite());
    print!("{}", emit_report(&result.reports, opts.format));
    ExitCode::from(result.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, opts } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("spinverify: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            match parse_config(&text) {
                Ok(entries) => finish(&entries, &opts.overrides(), &opts),
                Err(e) => {
                    eprintln!("spinverify: {}: {e}", config.display());
                    ExitCode::from(2)
                }
            }
        }
        Command::Check { check_id, opts } => {
            let mut d = CheckDescriptor::new(&check_id);
            opts.overrides().apply(&mut d.params);
            finish(&[Entry::Descriptor(d)], &Overrides::default(), &opts)
        }
        Command::List { format } => {
            match format {
                Format::Json => {
                    let list: Vec<serde_json::Value> = registry()
                        .iter()
                        .map(|c| serde_json::json!({"check_id": c.id, "summary": c.summary, "defaults": c.defaults()}))
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&serde_json::json!({"schema": 1, "checks": list})).unwrap());
                }
                Format::Text => {
                    for c in registry() {
                        let defaults: Params = c.defaults();
                        let d: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        println!("{:<16} {}  [{}]", c.id, c.summary, d.join(" "));
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
