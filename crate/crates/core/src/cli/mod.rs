//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on input, solver or guard
//! errors.

pub mod experiment;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::message_passing::{mp_solve, MpConfig, DEFAULT_TOLERANCE};
use crate::model::{parse_model, rescale_potentials, GraphicalModel, DEFAULT_EPSILON};
use crate::nmrf::{build_nmrf, Nmrf};
use crate::oracle::{exhaustive_map, exhaustive_mwss};
use crate::perfection::{is_berge, parse_ug, write_ug, Family, UndirectedGraph, WeightedGraph};
use crate::pruning::{merge_twins, prune, NmrfInstance, PrunedNmrf, TwinMerge};
use crate::relaxation::{build_lp, solve_lp, solve_nmrf_lp, LpSolution, LpTolerances};

pub use experiment::{run_experiment, write_csv, ExperimentConfig, ExperimentRow, CSV_HEADER};

use experiment::format_g12;

#[derive(Debug, Parser)]
#[command(
    name = "perfectmap",
    version,
    about = "MAP estimation through nand Markov random fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a GM model into its NMRF, written in UG format.
    Convert {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a graph (or a model's NMRF) Berge, or print an odd hole.
    CheckPerfect {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        prune: bool,
    },
    /// Solve the set-packing LP.
    SolveLp {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        prune: bool,
        /// Integrality tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Constraint feasibility tolerance.
        #[arg(long, default_value_t = 1e-9)]
        feas_tol: f64,
    },
    /// Run convergent message passing.
    SolveMp {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        mp: MpArgs,
    },
    /// Exhaustive MAP (GM input) or maximum-weight stable set (UG input).
    SolveExact {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Generate a seeded weighted graph in UG format.
    GenGraph {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch comparison of exact, LP and message-passing scores as CSV.
    Experiment {
        /// Comma-separated families; defaults to the four Berge families.
        #[arg(long, value_delimiter = ',')]
        family: Vec<Family>,
        #[arg(long, value_delimiter = ',', default_value = "12")]
        size: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        prune: bool,
        #[command(flatten)]
        mp: MpArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Rescaling offset for GM tables.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Debug, Args)]
struct MpArgs {
    /// Residual below which message passing stops.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Sweep budget; defaults to 10 * N * |E|.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Finite stand-in for the forbidden (1, 1) table entry.
    #[arg(long, allow_hyphen_values = true)]
    neg_large: Option<f64>,
}

impl MpArgs {
    fn config(&self) -> MpConfig {
        MpConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            neg_large: self.neg_large,
            ..MpConfig::default()
        }
    }
}

/// Run the CLI on `args` (including the program name) and return the exit
/// code.
pub fn cli_dispatch<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::InvalidParameter(_) => 1,
                _ => 2,
            }
        }
    }
}

enum Input {
    Model(GraphicalModel),
    Graph(WeightedGraph),
}

fn load(path: &Path) -> Result<Input> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next());
    match first {
        Some("GM") => Ok(Input::Model(parse_model(&text)?)),
        Some("UG") => Ok(Input::Graph(parse_ug(&text)?)),
        _ => Err(Error::Parse {
            line: 1,
            message: "malformed header: expected `GM` or `UG`".into(),
        }),
    }
}

fn load_nmrf(m: &GraphicalModel, epsilon: f64) -> Result<(GraphicalModel, Nmrf)> {
    let rescaled = rescale_potentials(m, epsilon)?;
    let nmrf = build_nmrf(&rescaled)?;
    Ok((rescaled, nmrf))
}

/// Weights of a UG input; unweighted graphs get unit weights.
fn graph_weights(wg: &WeightedGraph) -> Vec<f64> {
    wg.weights.clone().unwrap_or_else(|| vec![1.0; wg.graph.n()])
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn bit_string(bits: &[bool]) -> String {
    join(bits.iter().map(|&b| b as u8))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn print_lp(out: &mut dyn Write, s: &LpSolution) -> Result<()> {
    writeln!(out, "objective {}", format_g12(s.objective))?;
    writeln!(out, "integral {}", s.integral)?;
    writeln!(out, "iterations {}", s.iterations)?;
    writeln!(out, "x {}", join(s.x.iter().map(|&v| format_g12(v))))?;
    Ok(())
}

enum Pruned {
    Nmrf(PrunedNmrf),
    Graph(TwinMerge),
}

fn run(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Convert { file, model, out } => {
            let Input::Model(m) = load(&file)? else {
                return Err(Error::InvalidParameter("convert expects a GM file".into()));
            };
            let (_, nmrf) = load_nmrf(&m, model.epsilon)?;
            emit(&out, &nmrf.to_ug(), stdout)
        }
        Command::CheckPerfect {
            file,
            model,
            prune: do_prune,
        } => {
            let graph = match load(&file)? {
                Input::Model(m) => {
                    let (_, nmrf) = load_nmrf(&m, model.epsilon)?;
                    if do_prune {
                        prune(&nmrf, model.epsilon).reduced().0
                    } else {
                        nmrf.graph().clone()
                    }
                }
                Input::Graph(wg) => {
                    if do_prune {
                        merge_twins(&wg.graph, &graph_weights(&wg)).reduced().0
                    } else {
                        wg.graph
                    }
                }
            };
            writeln!(stdout, "{}", is_berge(&graph)?)?;
            Ok(())
        }
        Command::SolveLp {
            file,
            model,
            prune: do_prune,
            tol,
            feas_tol,
        } => {
            let tol = LpTolerances {
                integrality: tol,
                feasibility: feas_tol,
            };
            match load(&file)? {
                Input::Model(m) => {
                    let (_, nmrf) = load_nmrf(&m, model.epsilon)?;
                    let pruned = do_prune.then(|| prune(&nmrf, model.epsilon));
                    let instance = match &pruned {
                        Some(p) => NmrfInstance::Pruned(p),
                        None => NmrfInstance::Raw(&nmrf),
                    };
                    let outcome = solve_nmrf_lp(instance, &tol)?;
                    print_lp(stdout, &outcome.solution)?;
                    match &outcome.decoded {
                        Some(d) => {
                            writeln!(stdout, "score {}", format_g12(d.score.value()))?;
                            writeln!(stdout, "assignment {}", join(&d.assignment.0))?;
                        }
                        None => writeln!(stdout, "fractional {}", join(&outcome.fractional))?,
                    }
                }
                Input::Graph(wg) => {
                    let w = graph_weights(&wg);
                    let merged = do_prune.then(|| merge_twins(&wg.graph, &w));
                    let (g, w) = match &merged {
                        Some(t) => t.reduced(),
                        None => (wg.graph.clone(), w),
                    };
                    let s = solve_lp(&build_lp(&g, &w)?, &tol)?;
                    print_lp(stdout, &s)?;
                    if s.integral {
                        let bits = match &merged {
                            Some(t) => t.expand(&s.rounded())?,
                            None => s.rounded(),
                        };
                        writeln!(stdout, "bits {}", bit_string(&bits))?;
                    } else {
                        writeln!(stdout, "fractional {}", join(s.fractional(&tol)))?;
                    }
                }
            }
            Ok(())
        }
        Command::SolveMp {
            file,
            model,
            prune: do_prune,
            mp,
        } => {
            let cfg = mp.config();
            let (graph, weights, pruned, nmrf) = match load(&file)? {
                Input::Model(m) => {
                    let (_, nmrf) = load_nmrf(&m, model.epsilon)?;
                    if do_prune {
                        let p = prune(&nmrf, model.epsilon);
                        let (g, w) = p.reduced();
                        (g, w, Some(Pruned::Nmrf(p)), Some(nmrf))
                    } else {
                        (nmrf.graph().clone(), nmrf.weights(), None, Some(nmrf))
                    }
                }
                Input::Graph(wg) => {
                    let w = graph_weights(&wg);
                    if do_prune {
                        let t = merge_twins(&wg.graph, &w);
                        let (g, w) = t.reduced();
                        (g, w, Some(Pruned::Graph(t)), None)
                    } else {
                        (wg.graph, w, None, None)
                    }
                }
            };
            let r = mp_solve(&graph, &weights, &cfg)?;
            let lifted = if r.objective.is_feasible() {
                match &pruned {
                    Some(Pruned::Nmrf(p)) => Some(NmrfInstance::Pruned(p).lift(&r.bits)?),
                    Some(Pruned::Graph(t)) => Some(t.expand(&r.bits)?),
                    None => Some(r.bits.clone()),
                }
            } else {
                None
            };
            let objective = match (&lifted, &nmrf) {
                (Some(bits), Some(n)) => n.objective(bits),
                _ => r.objective,
            };
            writeln!(stdout, "objective {}", format_g12(objective.value()))?;
            writeln!(stdout, "converged {}", r.converged)?;
            writeln!(stdout, "iterations {}", r.iterations)?;
            writeln!(stdout, "residual {}", format_g12(r.residual))?;
            match &lifted {
                Some(bits) => writeln!(stdout, "bits {}", bit_string(bits))?,
                // infeasible decode: report the solver's own bits
                None => writeln!(stdout, "solver_bits {}", bit_string(&r.bits))?,
            }
            if let (Some(bits), Some(n)) = (&lifted, &nmrf) {
                match n.decode(bits) {
                    Ok(a) => writeln!(stdout, "assignment {}", join(&a.0))?,
                    Err(e) => writeln!(stdout, "assignment none ({e})")?,
                }
            }
            Ok(())
        }
        Command::SolveExact { file, model } => {
            match load(&file)? {
                Input::Model(m) => {
                    let rescaled = rescale_potentials(&m, model.epsilon)?;
                    let r = exhaustive_map(&rescaled)?;
                    writeln!(stdout, "objective {}", format_g12(r.value))?;
                    writeln!(stdout, "assignment {}", join(&r.argmax.0))?;
                    writeln!(stdout, "explored {}", r.explored)?;
                }
                Input::Graph(wg) => {
                    let w = graph_weights(&wg);
                    let r = exhaustive_mwss(&wg.graph, &w)?;
                    writeln!(stdout, "objective {}", format_g12(r.value))?;
                    writeln!(stdout, "bits {}", bit_string(&r.argmax))?;
                    writeln!(stdout, "explored {}", r.explored)?;
                }
            }
            Ok(())
        }
        Command::GenGraph {
            family,
            size,
            p,
            seed,
            epsilon,
            out,
        } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
            }
            let (g, w): (UndirectedGraph, Vec<f64>) = experiment::instance(family, size, p, epsilon, seed)?;
            let comment = vec![format!("family {family} size {size} p {p} seed {seed}")];
            emit(&out, &write_ug(&g, Some(&w), Some(&comment)), stdout)
        }
        Command::Experiment {
            family,
            size,
            p,
            instances,
            seed,
            epsilon,
            prune,
            mp,
            out,
        } => {
            let cfg = ExperimentConfig {
                families: if family.is_empty() {
                    Family::BERGE.to_vec()
                } else {
                    family
                },
                sizes: size,
                instances,
                seed,
                p,
                epsilon,
                lp: LpTolerances::default(),
                mp: mp.config(),
                prune,
            };
            let rows = run_experiment(&cfg)?;
            emit(&out, &write_csv(&cfg, &rows), stdout)
        }
    }
}
