use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clover_core::analyses::{self, Answer, Completion, Verdict};
use clover_core::engine::render_insertion;
use clover_core::flattening::{flatten_check_run, render_rlre};
use clover_core::kmtree::{build_km_tree, dump_tree, km_max_labels, KmStatus};
use clover_core::model::{parse_flcs_config, parse_model, parse_naturals};
use clover_core::{run_clover, Budgets, CloverRun, Model, RunOptions, Wsts};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;

/// Forward coverability analysis of counter and channel systems.
#[derive(Parser)]
#[command(name = "clover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Scheduler rounds.
    #[arg(long, default_value_t = Budgets::default().rounds)]
    budget_rounds: usize,
    /// Pointwise iteration budget for accelerations.
    #[arg(long, default_value_t = Budgets::default().accel_steps)]
    budget_accel: usize,
}

impl BudgetArgs {
    fn budgets(self) -> Budgets {
        Budgets {
            rounds: self.budget_rounds,
            accel_steps: self.budget_accel,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the clover of the model.
    Clover {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Print every dispatched insertion.
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether a concrete state is coverable.
    Covers {
        file: PathBuf,
        /// "n1 … nk" for counter systems, "q ; w1 ; … ; wm" for channel systems.
        #[arg(long)]
        target: String,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Decide whether the reachability set is finite.
    Bounded {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Decide whether one counter is bounded.
    PlaceBounded {
        file: PathBuf,
        #[arg(long)]
        index: usize,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Decide whether finitely many reachable states lie above the basis.
    UBounded {
        file: PathBuf,
        /// Concrete states separated by "|".
        #[arg(long)]
        basis: String,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Build the generalized Karp-Miller tree.
    Kmtree {
        file: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_nodes: usize,
        #[arg(long, default_value_t = Budgets::default().accel_steps)]
        budget_accel: usize,
        /// Print the whole tree.
        #[arg(long)]
        dump: bool,
    },
    /// Rebuild the clover through the flattening induced by a complete run.
    FlattenCheck {
        file: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Clover { file, .. }
            | Command::Covers { file, .. }
            | Command::Bounded { file, .. }
            | Command::PlaceBounded { file, .. }
            | Command::UBounded { file, .. }
            | Command::Kmtree { file, .. }
            | Command::FlattenCheck { file, .. } => file,
        }
    }
}

type Outcome = Result<u8, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = cli.command.file();
    let model = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))
        .and_then(|text| parse_model(&text).map_err(|e| format!("{}: {e}", path.display())));
    let outcome = model.and_then(|m| match m {
        Model::Acs(acs) => {
            let s0 = acs.initial_state();
            if let Command::PlaceBounded { index, budgets, .. } = &cli.command {
                let run = run(&acs, s0, budgets.budgets(), false);
                return analyses::place_bounded(&run, *index)
                    .map(|v| verdict(&v))
                    .map_err(|e| e.to_string());
            }
            dispatch(&acs, s0, &cli.command, |t| {
                parse_naturals(t).map_err(|e| e.to_string())
            })
        }
        Model::Flcs(flcs) => {
            let s0 = flcs.initial_state();
            dispatch(&flcs, s0, &cli.command, |t| {
                parse_flcs_config(t).map_err(|e| e.to_string())
            })
        }
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn header(budgets: Budgets) {
    println!(
        "# budget-rounds {} budget-accel {}",
        budgets.rounds, budgets.accel_steps
    );
}

fn run<W: Wsts>(instance: &W, s0: W::State, budgets: Budgets, trace: bool) -> CloverRun<W::State> {
    header(budgets);
    let options = RunOptions {
        trace,
        ..RunOptions::with_budgets(budgets)
    };
    let run = run_clover(instance, s0, &options);
    println!("# status {:?} rounds {}", run.status, run.rounds);
    run
}

fn verdict<S: Display>(v: &Verdict<S>) -> u8 {
    println!("{v}");
    if v.answer == Answer::Unknown {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

fn dispatch<W, P>(instance: &W, s0: W::State, command: &Command, parse: P) -> Outcome
where
    W: Completion,
    P: Fn(&str) -> Result<W::Concrete, String>,
{
    match command {
        Command::Clover { budgets, trace, .. } => {
            let run = run(instance, s0, budgets.budgets(), *trace);
            for ins in &run.transcript {
                println!("# {}", render_insertion(instance, ins));
            }
            for s in &run.result {
                println!("{s}");
            }
            Ok(if run.is_complete() {
                EXIT_OK
            } else {
                EXIT_UNKNOWN
            })
        }
        Command::Covers {
            target, budgets, ..
        } => {
            let target = parse(target)?;
            instance
                .check_concrete(&target)
                .map_err(|e| e.to_string())?;
            let run = run(instance, s0, budgets.budgets(), false);
            let v = analyses::coverability(instance, &run, &target).map_err(|e| e.to_string())?;
            Ok(verdict(&v))
        }
        Command::Bounded { budgets, .. } => {
            let run = run(instance, s0, budgets.budgets(), false);
            Ok(verdict(&analyses::boundedness(&run)))
        }
        Command::PlaceBounded { .. } => Err("place-bounded needs a counter system".into()),
        Command::UBounded { basis, budgets, .. } => {
            let basis = basis
                .split('|')
                .map(|u| parse(u.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            for u in &basis {
                instance.check_concrete(u).map_err(|e| e.to_string())?;
            }
            let run = run(instance, s0, budgets.budgets(), false);
            let v = analyses::u_bounded(instance, &run, &basis).map_err(|e| e.to_string())?;
            Ok(verdict(&v))
        }
        Command::Kmtree {
            max_nodes,
            budget_accel,
            dump,
            ..
        } => {
            println!("# max-nodes {max_nodes} budget-accel {budget_accel}");
            let tree = build_km_tree(instance, s0, *max_nodes, *budget_accel);
            println!("# status {:?} nodes {}", tree.status, tree.nodes.len());
            if *dump {
                print!("{}", dump_tree(instance, &tree));
            }
            match km_max_labels(&tree) {
                Ok(labels) if tree.status == KmStatus::Complete => {
                    if *dump {
                        println!("# maximal labels");
                    }
                    for s in labels {
                        println!("{s}");
                    }
                    Ok(EXIT_OK)
                }
                _ => Ok(EXIT_UNKNOWN),
            }
        }
        Command::FlattenCheck { budgets, .. } => {
            let budgets = budgets.budgets();
            let run = run(instance, s0.clone(), budgets, false);
            if !run.is_complete() {
                return Ok(EXIT_UNKNOWN);
            }
            let words = run.accelerated_words.clone();
            let report = flatten_check_run(instance, s0, run, &RunOptions::with_budgets(budgets))
                .map_err(|e| e.to_string())?;
            println!("# rl-expression {}", render_rlre(&words, instance));
            println!("# automaton states {}", report.automaton.state_count());
            println!(
                "# product status {:?} rounds {}",
                report.product.status, report.product.rounds
            );
            for s in &report.projected {
                println!("{s}");
            }
            println!("equal {}", report.equal);
            Ok(if report.equal { EXIT_OK } else { EXIT_UNKNOWN })
        }
    }
}
