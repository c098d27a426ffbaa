//! Command-line front end: solve value problems, evaluate and query the
//! robust choice function, optimize decisions and run simulations.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use prefrobust::dmsim::{self, ExperimentConfig, ExperimentKind};
use prefrobust::io::{load_instance, read_prospect_csv};
use prefrobust_lp::write_lp_format;
use prefrobust::*;

#[derive(Parser, Debug)]
#[command(name = "prefrobust", version, about = "Robust choice functions from pairwise comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an instance (and optionally a decision model) and summarize it.
    Validate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Solve the value problem and write the decomposition as JSON.
    Value {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every sorting LP in LP text format to this file.
        #[arg(long)]
        lp_dump: Option<PathBuf>,
    },
    /// Evaluate the robust choice function at a prospect.
    Eval {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        prospect: PathBuf,
        /// Write the final interpolation LP in LP text format to this file.
        #[arg(long)]
        lp_dump: Option<PathBuf>,
    },
    /// Test whether a prospect is acceptable at a level.
    Accept {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        prospect: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
    },
    /// Print the aspiration table (level, κ, c, τ) as CSV.
    Aspiration {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        decomposition: PathBuf,
        /// Cover the levels needed for this prospect and report its value
        /// through the aspirational representation on stderr.
        #[arg(long)]
        prospect: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize the robust value of an affine reward over a polyhedral
    /// decision set.
    Pro {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Solve only the problem at this level index.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the simulated decision-maker experiment and print CSV results.
    Simulate {
        #[arg(long, value_enum, default_value_t = Experiment::Portfolio)]
        experiment: Experiment,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 10)]
        scenarios: usize,
        #[arg(long, default_value_t = 10)]
        attributes: usize,
        #[arg(long, default_value_t = 30)]
        pool_size: usize,
        #[arg(long, default_value_t = 50)]
        test_prospects: usize,
        #[arg(long, default_value_t = 1.0)]
        lipschitz: f64,
        /// Portfolio return table (rows are scenarios, columns assets).
        #[arg(long)]
        returns: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        law: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the value problem by exhaustive enumeration (small instances).
    Oracle {
        #[command(flatten)]
        inst: InstanceArgs,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Use the law-invariant pipeline regardless of the instance file.
    #[arg(long)]
    law: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Experiment {
    Portfolio,
    Capital,
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<ValidInstance> {
        let mut raw = load_instance(&self.instance)?;
        raw.law_invariant |= self.law;
        let inst = raw
            .validate()
            .with_context(|| format!("validating {}", self.instance.display()))?;
        eprintln!(
            "instance: {} prospects, {}×{}, C = {}, law-invariant: {}",
            inst.size(),
            inst.scenarios(),
            inst.attributes(),
            inst.lipschitz(),
            inst.law_invariant()
        );
        Ok(inst)
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_decomposition(path: &Path, inst: &ValidInstance) -> anyhow::Result<Decomposition> {
    let d = Decomposition::load(path)?;
    d.check(inst, inst.law_invariant())?;
    Ok(d)
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Validate { inst, model } => {
            let vi = inst.load()?;
            let mut summary = serde_json::json!({
                "theta_size": vi.size(),
                "scenarios": vi.scenarios(),
                "attributes": vi.attributes(),
                "pairs": vi.instance().pairs.len(),
                "edges": vi.edges().len(),
                "lipschitz": vi.lipschitz(),
                "law_invariant": vi.law_invariant(),
            });
            if let Some(path) = model {
                let m = DecisionModel::load(&path)?.validate()?;
                if (m.scenarios(), m.attributes()) != (vi.scenarios(), vi.attributes()) {
                    bail!(Error::Dimension(format!(
                        "model reward is {}×{}, instance prospects are {}×{}",
                        m.scenarios(),
                        m.attributes(),
                        vi.scenarios(),
                        vi.attributes()
                    )));
                }
                summary["decision_variables"] = m.num_vars().into();
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Value { inst, out, lp_dump } => {
            let vi = inst.load()?;
            let d = solve_value_problem(&vi)?;
            eprintln!("sorted {} prospects with {} LPs", d.len(), d.lp_calls);
            if let Some(path) = lp_dump {
                let mut text = String::new();
                for j in 1..d.len() {
                    let theta = vi.prospect(d.node(j + 1));
                    let lp = if vi.law_invariant() {
                        value::plp_law_problem(theta, &d, j, &vi)?
                    } else {
                        value::plp_problem(theta, &d, j, &vi)?
                    };
                    writeln!(text, "\\ sorting step {j}: prospect {} against the first {j}", d.node(j + 1))?;
                    text.push_str(&write_lp_format(&lp));
                }
                emit(&text, Some(&path))?;
            }
            emit(&(d.to_json() + "\n"), out.as_deref())?;
        }
        Command::Eval {
            inst,
            decomposition,
            prospect,
            lp_dump,
        } => {
            let vi = inst.load()?;
            let d = load_decomposition(&decomposition, &vi)?;
            let x = read_prospect_csv(&prospect)?;
            let e = if vi.law_invariant() {
                eval_rcf_law(&x, &d, &vi)?
            } else {
                eval_rcf(&x, &d, &vi)?
            };
            eprintln!("level {} after {} LPs", e.level, e.lp_calls);
            if let Some(path) = lp_dump {
                let lp = rcf::interpolation_problem(&x, &d, e.level, &vi)?;
                emit(&write_lp_format(&lp), Some(&path))?;
            }
            println!("{:?}", e.value);
        }
        Command::Accept {
            inst,
            decomposition,
            prospect,
            level,
        } => {
            let vi = inst.load()?;
            let d = load_decomposition(&decomposition, &vi)?;
            let x = read_prospect_csv(&prospect)?;
            let j = kappa(level, &d)?;
            let member = if vi.law_invariant() {
                membership_law(&x, level, &d, &vi)?
            } else {
                membership(&x, level, &d, &vi)?
            };
            println!("{} {j}", if member { "in" } else { "out" });
        }
        Command::Aspiration {
            inst,
            decomposition,
            prospect,
            grid_step,
            out,
        } => {
            let vi = inst.load()?;
            let d = load_decomposition(&decomposition, &vi)?;
            let asp = AspirationalDecomposition::new(&d, &vi)?;
            let grid = match &prospect {
                Some(p) => {
                    let x = read_prospect_csv(p)?;
                    let grid = aspiration_grid(&x, &vi, grid_step)?;
                    eprintln!("aspirational value: {:?}", asp.eval(&x, &grid)?);
                    grid
                }
                None => {
                    let low = d.values().last().copied().unwrap_or(0.0) - grid_step;
                    let count = (-low / grid_step).ceil() as usize;
                    (0..=count).map(|k| 0.0 - k as f64 * grid_step).collect()
                }
            };
            let mut text = String::from("level,kappa,c,tau\n");
            for v in grid {
                let r = asp.row(v)?;
                writeln!(text, "{},{},{},{}", r.level, r.kappa, r.c, r.tau)?;
            }
            emit(&text, out.as_deref())?;
        }
        Command::Pro {
            inst,
            decomposition,
            model,
            level,
            out,
        } => {
            let vi = inst.load()?;
            let d = load_decomposition(&decomposition, &vi)?;
            let m = DecisionModel::load(&model)?.validate()?;
            let law = vi.law_invariant();
            let json = match level {
                Some(j) => {
                    let (z, value) = if law {
                        optimize_at_level_law(j, &m, &d, &vi)?
                    } else {
                        optimize_at_level(j, &m, &d, &vi)?
                    };
                    serde_json::to_string_pretty(&serde_json::json!({ "level_index": j, "z": z, "value": value }))?
                }
                None => {
                    let sol = if law { solve_pro_law(&m, &d, &vi)? } else { solve_pro(&m, &d, &vi)? };
                    eprintln!("level {} after {} LPs", sol.level_index, sol.lp_calls);
                    serde_json::to_string_pretty(&sol)?
                }
            };
            emit(&(json + "\n"), out.as_deref())?;
        }
        Command::Simulate {
            experiment,
            pairs,
            scenarios,
            attributes,
            pool_size,
            test_prospects,
            lipschitz,
            returns,
            seed,
            law,
            out,
        } => {
            let returns = returns.map(dmsim::read_matrix_csv).transpose()?;
            let cfg = ExperimentConfig {
                kind: match experiment {
                    Experiment::Portfolio => ExperimentKind::Portfolio,
                    Experiment::Capital => ExperimentKind::Capital,
                },
                pairs,
                scenarios,
                attributes,
                pool_size,
                test_prospects,
                lipschitz,
                law,
                seed,
                returns,
            };
            let rows = dmsim::run_experiment(&cfg)?;
            let mut buf = Vec::new();
            dmsim::write_experiment_csv(&rows, &mut buf)?;
            emit(&String::from_utf8(buf)?, out.as_deref())?;
        }
        Command::Oracle { inst } => {
            let vi = inst.load()?;
            let by_node = if vi.law_invariant() {
                oracle_value_problem_law(&vi)?
            } else {
                oracle_value_problem(&vi)?
            };
            let mut sorted = by_node.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let json = serde_json::json!({ "values": sorted, "values_by_node": by_node });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
    }
    Ok(())
}

/// Exit status for a failed run: 2 for invalid or infeasible input, 3 for
/// solver failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Solver(_) | Error::Lp(_) => 3,
                _ => 2,
            };
        }
    }
    2
}

/// Parses `args` (including the program name) and runs the subcommand.
fn run(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
