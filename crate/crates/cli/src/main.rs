//! Command-line surface: proving and deciding goals, countermodel and
//! proof export, constant-specification validation, Hilbert compilation
//! and cut elimination.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jltab::cutelim::{eliminate_cuts_traced, hilbert_to_tableau, parse_hilbert, validate_hilbert};
use jltab::engine::{
    audit_subformula_property, check_proof, closure_status, prove, Justification, Limits, Tableau,
    Verdict,
};
use jltab::export::{model_to_json, proof_from_json, proof_to_dot, proof_to_json, ProofJson};
use jltab::logic::validate_cs;
use jltab::oracle::{counterpart, forgetful_projection, modal_prove};
use jltab::syntax::parse_formula;
use jltab::{ConstantSpecification, Formula, LogicSpec};

#[derive(Parser)]
#[command(
    name = "jltab",
    version,
    about = "Analytic tableau prover for justification logics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct LogicArgs {
    /// Logic name: J plus suffixes T,D,4,B,5 in that order (LP = JT4).
    #[arg(long, default_value = "J")]
    logic: String,
    /// Constant specification file: one formula per line, `#` comments.
    #[arg(long)]
    cs: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GoalArgs {
    /// Goal formula (inline).
    goal: Option<String>,
    /// File with one goal per line.
    #[arg(long)]
    goal_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Node budget for the search.
    #[arg(long, default_value_t = 500_000)]
    max_nodes: usize,
    /// Time budget per goal, in seconds.
    #[arg(long, default_value_t = 30.0)]
    max_seconds: f64,
    /// Output format: text, json or dot.
    #[arg(long, default_value = "text")]
    format: String,
    /// Worker threads for multi-goal runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed for corpus-style commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a goal and print the proof or countermodel.
    Prove {
        #[command(flatten)]
        logic: LogicArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        goal: GoalArgs,
    },
    /// Decide goals; output is one verdict word per goal.
    Decide {
        #[command(flatten)]
        logic: LogicArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        goal: GoalArgs,
    },
    /// Decide a goal and print the countermodel when it is refutable.
    Countermodel {
        #[command(flatten)]
        logic: LogicArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        goal: GoalArgs,
    },
    /// Validate a constant specification file.
    ValidateCs {
        #[command(flatten)]
        logic: LogicArgs,
        /// CS file to check.
        file: PathBuf,
    },
    /// Compile a Hilbert proof into a tableau with cuts (proof JSON).
    CompileHilbert {
        #[command(flatten)]
        logic: LogicArgs,
        /// Hilbert proof file.
        file: PathBuf,
        /// Line to prove (1-based; defaults to the last line).
        #[arg(long)]
        goal_line: Option<usize>,
    },
    /// Compile a Hilbert proof, eliminate cuts, and print the trace plus
    /// the final cut-free proof.
    Cutelim {
        #[command(flatten)]
        logic: LogicArgs,
        file: PathBuf,
        #[arg(long)]
        goal_line: Option<usize>,
        #[arg(long, default_value = "text")]
        format: String,
        /// Rewrite step budget.
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
    },
    /// Check the subformula property (and, with --goal, full legality) of a
    /// proof JSON file.
    Audit {
        #[command(flatten)]
        logic: LogicArgs,
        /// Proof JSON file.
        file: PathBuf,
        /// Goal the proof claims to establish.
        #[arg(long)]
        goal: Option<String>,
    },
    /// Forgetful projection of a goal plus a modal validity check in the
    /// counterpart logic.
    Project {
        #[command(flatten)]
        logic: LogicArgs,
        goal: String,
    },
}

const EXIT_VALID: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

struct ConfigFailure(String);

fn fail(msg: impl Into<String>) -> ConfigFailure {
    ConfigFailure(msg.into())
}

fn load_logic(args: &LogicArgs) -> Result<(LogicSpec, ConstantSpecification), ConfigFailure> {
    let logic = LogicSpec::parse(&args.logic).map_err(|e| fail(e.to_string()))?;
    let cs = match &args.cs {
        None => ConstantSpecification::empty(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail(format!("cannot read {}: {}", path.display(), e)))?;
            let cs = ConstantSpecification::parse(&text).map_err(|e| fail(e.to_string()))?;
            let violations = validate_cs(&cs, &logic);
            if !violations.is_empty() {
                let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(fail(format!(
                    "invalid constant specification: {}",
                    msgs.join("; ")
                )));
            }
            cs
        }
    };
    Ok((logic, cs))
}

fn load_goals(args: &GoalArgs) -> Result<Vec<Formula>, ConfigFailure> {
    match (&args.goal, &args.goal_file) {
        (Some(_), Some(_)) => Err(fail("give either an inline goal or --goal-file, not both")),
        (Some(g), None) => Ok(vec![parse_formula(g).map_err(|e| fail(e.to_string()))?]),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail(format!("cannot read {}: {}", path.display(), e)))?;
            let mut out = Vec::new();
            for line in text.lines() {
                let line = match line.find('#') {
                    Some(i) => &line[..i],
                    None => line,
                };
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                out.push(parse_formula(line).map_err(|e| fail(format!("{}: {}", line, e)))?);
            }
            if out.is_empty() {
                return Err(fail("goal file contains no goals"));
            }
            Ok(out)
        }
        (None, None) => Err(fail("missing goal (inline or --goal-file)")),
    }
}

fn limits_of(run: &RunArgs) -> Limits {
    Limits {
        max_nodes: run.max_nodes,
        max_millis: (run.max_seconds * 1000.0) as u64,
    }
}

/// Indented text rendering of a proof tree with closure marks.
fn render_text(tab: &Tableau, cs: &ConstantSpecification) -> String {
    let mut out = String::new();
    fn go(tab: &Tableau, id: usize, depth: usize, cs: &ConstantSpecification, out: &mut String) {
        let node = &tab.nodes[id];
        let rule = match &node.just {
            Justification::Root => String::new(),
            Justification::Cut => "   (cut)".into(),
            Justification::Rule { rule, premises } => {
                let ps: Vec<String> = premises.iter().map(|p| (p + 1).to_string()).collect();
                if ps.is_empty() {
                    format!("   ({})", rule)
                } else {
                    format!("   ({} {})", rule, ps.join(","))
                }
            }
        };
        let mark = if node.children.is_empty()
            && closure_status(&tab.branch_formulas(id), cs).is_closed()
        {
            "  ⊗"
        } else {
            ""
        };
        out.push_str(&format!(
            "{:>3}. {}{}{}{}\n",
            id + 1,
            "  ".repeat(depth),
            node.payload,
            rule,
            mark
        ));
        let fork = node.children.len() > 1;
        for &c in &node.children {
            go(tab, c, depth + usize::from(fork), cs, out);
        }
    }
    go(tab, tab.roots[0], 0, cs, &mut out);
    out
}

fn verdict_exit(verdict: &Verdict) -> u8 {
    match verdict {
        Verdict::Valid { .. } => EXIT_VALID,
        Verdict::Invalid { .. } => EXIT_INVALID,
        Verdict::ResourceOut { .. } => EXIT_RESOURCE,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Prove,
    Decide,
    Countermodel,
}

fn run_goals(
    logic_args: &LogicArgs,
    run: &RunArgs,
    goal_args: &GoalArgs,
    mode: Mode,
) -> Result<u8, ConfigFailure> {
    let (logic, cs) = load_logic(logic_args)?;
    let goals = load_goals(goal_args)?;
    let limits = limits_of(run);

    let verdicts: Vec<Verdict> = if run.jobs > 1 && goals.len() > 1 {
        let mut parts: Vec<Vec<(usize, Formula)>> = vec![Vec::new(); run.jobs];
        for (i, g) in goals.iter().enumerate() {
            parts[i % run.jobs].push((i, g.clone()));
        }
        let mut results: Vec<Option<Verdict>> = vec![None; goals.len()];
        let worker_results: Vec<Vec<(usize, Result<Verdict, String>)>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = parts
                    .into_iter()
                    .map(|part| {
                        let cs = cs.clone();
                        scope.spawn(move || {
                            part.into_iter()
                                .map(|(i, g)| {
                                    (
                                        i,
                                        prove(&g, &logic, &cs, &limits).map_err(|e| e.to_string()),
                                    )
                                })
                                .collect()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            });
        for part in worker_results {
            for (i, r) in part {
                results[i] = Some(r.map_err(fail)?);
            }
        }
        results
            .into_iter()
            .map(|r| r.expect("all goals decided"))
            .collect()
    } else {
        let mut out = Vec::new();
        for g in &goals {
            out.push(prove(g, &logic, &cs, &limits).map_err(|e| fail(e.to_string()))?);
        }
        out
    };

    let mut worst = EXIT_VALID;
    for (goal, verdict) in goals.iter().zip(&verdicts) {
        worst = worst.max(verdict_exit(verdict));
        match mode {
            Mode::Decide => {
                let word = match verdict {
                    Verdict::Valid { .. } => "valid",
                    Verdict::Invalid { .. } => "invalid",
                    Verdict::ResourceOut { .. } => "resource-out",
                };
                println!("{}\t{}", word, goal);
            }
            Mode::Prove => print_prove(goal, verdict, &run.format, &cs),
            Mode::Countermodel => print_countermodel(goal, verdict, &run.format),
        }
    }
    Ok(worst)
}

fn print_prove(goal: &Formula, verdict: &Verdict, format: &str, cs: &ConstantSpecification) {
    match verdict {
        Verdict::Valid { proof } => match format {
            "json" => {
                let payload = serde_json::json!({
                    "verdict": "valid",
                    "goal": goal.to_string(),
                    "proof": proof_to_json(proof),
                });
                println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            }
            "dot" => print!("{}", proof_to_dot(proof, cs)),
            _ => {
                println!("valid: {}", goal);
                print!("{}", render_text(proof, cs));
            }
        },
        Verdict::Invalid {
            branch,
            model,
            model_note,
        } => match format {
            "json" => {
                let payload = serde_json::json!({
                    "verdict": "invalid",
                    "goal": goal.to_string(),
                    "branch": branch.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                    "model": model.as_ref().map(model_to_json),
                    "model_note": model_note,
                });
                println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            }
            _ => {
                println!("invalid: {}", goal);
                println!("open saturated branch:");
                for sf in branch {
                    println!("  {}", sf);
                }
                match model {
                    Some(m) => println!(
                        "countermodel: {}",
                        serde_json::to_string(&model_to_json(m)).unwrap()
                    ),
                    None => println!(
                        "model undetermined{}",
                        model_note
                            .as_ref()
                            .map(|n| format!(": {}", n))
                            .unwrap_or_default()
                    ),
                }
            }
        },
        Verdict::ResourceOut { reason } => {
            println!("resource-out: {} ({})", goal, reason);
        }
    }
}

fn print_countermodel(goal: &Formula, verdict: &Verdict, format: &str) {
    match verdict {
        Verdict::Valid { .. } => println!("valid: {} (no countermodel)", goal),
        Verdict::Invalid {
            model, model_note, ..
        } => match model {
            Some(m) => {
                let json = model_to_json(m);
                if format == "json" {
                    println!("{}", serde_json::to_string_pretty(&json).unwrap());
                } else {
                    println!("{}", serde_json::to_string(&json).unwrap());
                }
            }
            None => println!(
                "model undetermined{}",
                model_note
                    .as_ref()
                    .map(|n| format!(": {}", n))
                    .unwrap_or_default()
            ),
        },
        Verdict::ResourceOut { reason } => println!("resource-out: {}", reason),
    }
}

fn cmd_validate_cs(logic_args: &LogicArgs, file: &PathBuf) -> Result<u8, ConfigFailure> {
    let logic = LogicSpec::parse(&logic_args.logic).map_err(|e| fail(e.to_string()))?;
    let text = fs::read_to_string(file)
        .map_err(|e| fail(format!("cannot read {}: {}", file.display(), e)))?;
    let cs = ConstantSpecification::parse(&text).map_err(|e| fail(e.to_string()))?;
    let violations = validate_cs(&cs, &logic);
    if violations.is_empty() {
        println!("ok: {} entries", cs.entries.len());
        Ok(EXIT_VALID)
    } else {
        for v in &violations {
            println!("violation: {}", v);
        }
        Ok(EXIT_CONFIG)
    }
}

type LoadedHilbert = (
    jltab::cutelim::HilbertProof,
    usize,
    LogicSpec,
    ConstantSpecification,
);

fn load_hilbert(
    logic_args: &LogicArgs,
    file: &PathBuf,
    goal_line: Option<usize>,
) -> Result<LoadedHilbert, ConfigFailure> {
    let (logic, cs) = load_logic(logic_args)?;
    let text = fs::read_to_string(file)
        .map_err(|e| fail(format!("cannot read {}: {}", file.display(), e)))?;
    let hp = parse_hilbert(&text).map_err(|e| fail(e.to_string()))?;
    validate_hilbert(&hp, &logic, &cs).map_err(|e| fail(e.to_string()))?;
    if hp.lines.is_empty() {
        return Err(fail("empty Hilbert proof"));
    }
    let goal_idx = match goal_line {
        None => hp.lines.len() - 1,
        Some(n) if n >= 1 && n <= hp.lines.len() => n - 1,
        Some(n) => return Err(fail(format!("goal line {} out of range", n))),
    };
    Ok((hp, goal_idx, logic, cs))
}

fn cmd_compile(
    logic_args: &LogicArgs,
    file: &PathBuf,
    goal_line: Option<usize>,
) -> Result<u8, ConfigFailure> {
    let (hp, goal_idx, logic, cs) = load_hilbert(logic_args, file, goal_line)?;
    let tab = hilbert_to_tableau(&hp, goal_idx, &logic, &cs).map_err(|e| fail(e.to_string()))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&proof_to_json(&tab)).unwrap()
    );
    Ok(EXIT_VALID)
}

fn cmd_cutelim(
    logic_args: &LogicArgs,
    file: &PathBuf,
    goal_line: Option<usize>,
    format: &str,
    max_steps: usize,
) -> Result<u8, ConfigFailure> {
    let (hp, goal_idx, logic, cs) = load_hilbert(logic_args, file, goal_line)?;
    let goal = hp.lines[goal_idx].formula.clone();
    let tab = hilbert_to_tableau(&hp, goal_idx, &logic, &cs).map_err(|e| fail(e.to_string()))?;
    let (out, trace) =
        eliminate_cuts_traced(&tab, &cs, max_steps).map_err(|e| fail(e.to_string()))?;
    check_proof(&out, &goal, &logic, &cs)
        .map_err(|e| fail(format!("eliminated proof fails certification: {}", e)))?;
    if format == "json" {
        let payload = serde_json::json!({
            "goal": goal.to_string(),
            "trace": trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "steps": trace.len(),
            "proof": proof_to_json(&out),
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        for entry in &trace {
            println!("{}", entry);
        }
        println!("steps: {}", trace.len());
        println!(
            "{}",
            serde_json::to_string_pretty(&proof_to_json(&out)).unwrap()
        );
    }
    Ok(EXIT_VALID)
}

fn cmd_audit(
    logic_args: &LogicArgs,
    file: &PathBuf,
    goal: &Option<String>,
) -> Result<u8, ConfigFailure> {
    let (logic, cs) = load_logic(logic_args)?;
    let text = fs::read_to_string(file)
        .map_err(|e| fail(format!("cannot read {}: {}", file.display(), e)))?;
    let json: ProofJson = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
    let tab = proof_from_json(&json).map_err(|e| fail(e.to_string()))?;
    if let Err(e) = audit_subformula_property(&tab, &cs) {
        println!("reject: {}", e);
        return Ok(EXIT_INVALID);
    }
    if let Some(goal_text) = goal {
        let goal = parse_formula(goal_text).map_err(|e| fail(e.to_string()))?;
        if let Err(e) = check_proof(&tab, &goal, &logic, &cs) {
            println!("reject: {}", e);
            return Ok(EXIT_INVALID);
        }
    }
    println!("accept");
    Ok(EXIT_VALID)
}

fn cmd_project(logic_args: &LogicArgs, goal: &str) -> Result<u8, ConfigFailure> {
    let logic = LogicSpec::parse(&logic_args.logic).map_err(|e| fail(e.to_string()))?;
    let goal = parse_formula(goal).map_err(|e| fail(e.to_string()))?;
    let target = counterpart(&logic).map_err(|e| fail(e.to_string()))?;
    let projected = forgetful_projection(&goal);
    let valid = modal_prove(&projected, target);
    println!(
        "{} goal projects to {}  ({:?}: {})",
        logic,
        projected,
        target,
        if valid { "valid" } else { "invalid" }
    );
    Ok(if valid { EXIT_VALID } else { EXIT_INVALID })
}

fn dispatch(cli: Cli) -> Result<u8, ConfigFailure> {
    match &cli.command {
        Command::Prove { logic, run, goal } => run_goals(logic, run, goal, Mode::Prove),
        Command::Decide { logic, run, goal } => run_goals(logic, run, goal, Mode::Decide),
        Command::Countermodel { logic, run, goal } => {
            run_goals(logic, run, goal, Mode::Countermodel)
        }
        Command::ValidateCs { logic, file } => cmd_validate_cs(logic, file),
        Command::CompileHilbert {
            logic,
            file,
            goal_line,
        } => cmd_compile(logic, file, *goal_line),
        Command::Cutelim {
            logic,
            file,
            goal_line,
            format,
            max_steps,
        } => cmd_cutelim(logic, file, *goal_line, format, *max_steps),
        Command::Audit { logic, file, goal } => cmd_audit(logic, file, goal),
        Command::Project { logic, goal } => cmd_project(logic, goal),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(ConfigFailure(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
