use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qbe_cli::{dump, run, Model, RunConfig, Task, EXIT_ERROR};
use qbe_core::Class;

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModelArg {
    Relational,
    Graph,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TaskArg {
    Qbe,
    Define,
}

/// Decide whether a query explains (or defines) a set of example tuples.
///
/// Exit status: 0 accept, 2 reject, 1 usage, input or budget error.
#[derive(Debug, Parser)]
#[command(name = "qbe", version)]
struct Args {
    #[arg(long, value_enum, default_value = "relational")]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "qbe")]
    task: TaskArg,
    /// cq, tw:<k>, ucq, utw:<k>, crpq or ctw:<k>
    #[arg(long, required_unless_present = "dump")]
    class: Option<Class>,
    /// Database (`R(a,b)` per line) or graph (`u label v` per line).
    #[arg(long)]
    db: PathBuf,
    /// Positive examples, one tuple per line.
    #[arg(long, required_unless_present = "dump")]
    pos: Option<PathBuf>,
    /// Negative examples, one tuple per line.
    #[arg(long)]
    neg: Option<PathBuf>,
    /// Include the homomorphism behind a rejection, when there is one.
    #[arg(long)]
    emit_witness: bool,
    /// Include the result of an explanation over the input.
    #[arg(long)]
    emit_eval: bool,
    /// Include the canonical explanation (cq and ucq).
    #[arg(long)]
    emit_canonical: bool,
    /// Include wall time and cache counters; these vary between runs.
    #[arg(long)]
    emit_timings: bool,
    /// Largest graph product to build, in nodes.
    #[arg(long)]
    budget_nodes: Option<usize>,
    /// Wall-clock limit for the run.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Print the parsed database back and exit.
    #[arg(long)]
    dump: bool,
    #[arg(long, hide = true)]
    oracle: bool,
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which means "reject" here
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let model = match args.model {
        ModelArg::Relational => Model::Relational,
        ModelArg::Graph => Model::Graph,
    };
    if args.dump {
        return match dump(model, &args.db) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("qbe: {e}");
                ExitCode::from(EXIT_ERROR as u8)
            }
        };
    }
    let cfg = RunConfig {
        neg: args.neg,
        emit_witness: args.emit_witness,
        emit_eval: args.emit_eval,
        emit_canonical: args.emit_canonical,
        emit_timings: args.emit_timings,
        budget_nodes: args.budget_nodes,
        budget_seconds: args.budget_seconds,
        oracle: args.oracle,
        ..RunConfig::new(
            model,
            match args.task {
                TaskArg::Qbe => Task::Qbe,
                TaskArg::Define => Task::Define,
            },
            args.class.expect("required without --dump"),
            args.db,
            args.pos.expect("required without --dump"),
        )
    };
    match run(&cfg) {
        Ok(report) => {
            print!("{}", report.json);
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            eprintln!("qbe: {}", e.error);
            if let Some(stats) = e.stats {
                eprintln!("qbe: partial stats {stats}");
            }
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
