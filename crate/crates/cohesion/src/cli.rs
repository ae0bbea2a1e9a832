//! The `cohesion` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cohesion_core::{
    is_biat, parse, parse_group, random_model, render, render_tree, Agent, CohesionNetwork,
    EnumOptions, ExpandError, Formula, Group, Logic, NetworkClass, NetworkError, SolveError,
};
use serde_json::{json, Value};

use crate::class_file::{load_class, parse_filter, ClassFile};
use crate::deadline::{timeout, Deadline};
use crate::demo;
use crate::model_file::{read_model, write_model, ModelFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cohesion",
    version,
    about = "Cohesion networks and cohesive group agency"
)]
struct Cli {
    /// Structured JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Solver time limit in seconds (default 30, or COHESION_TIMEOUT_SECS).
    #[arg(long, global = true, value_name = "SECS")]
    timeout: Option<f64>,
    /// Largest group whose networks may be enumerated.
    #[arg(long, global = true, default_value_t = cohesion_core::class::DEFAULT_ENUMERATION_BOUND)]
    bound: usize,
    /// Admit edges from a coalition to itself.
    #[arg(long, global = true)]
    allow_self_edges: bool,
    /// Keep vertices that are not edge endpoints as distinct networks.
    #[arg(long, global = true)]
    literal_vertices: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FormulaInput {
    /// Formula text.
    formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassArgs {
    /// Builtin class (c0, all-help-rest) or class file.
    #[arg(long, default_value = "c0")]
    class: String,
    /// Extra filter, e.g. singleton-benefactors or max-edges:2. Repeatable.
    #[arg(long = "filter", value_name = "FILTER")]
    filters: Vec<String>,
    /// Range group agency over minimal networks only.
    #[arg(long)]
    minimal: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its tree.
    Parse {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// List the networks of a class for a group.
    Networks {
        /// Comma-separated agents, e.g. 1,2,3.
        #[arg(long)]
        agents: String,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Rewrite a formula into the individual-agent fragment.
    Expand {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Decide satisfiability; exit 1 when unsatisfiable.
    Sat {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        class: ClassArgs,
        /// Write the witness model here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Decide validity; exit 1 when not valid.
    Valid {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        class: ClassArgs,
        /// Write the countermodel here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Evaluate a formula at a world of a model file; exit 1 when false.
    Check {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long)]
        world: String,
        /// Class used to expand group modalities first.
        #[arg(long)]
        class: Option<String>,
        #[arg(long = "filter", value_name = "FILTER")]
        filters: Vec<String>,
    },
    /// Reproduce a worked example: piano or peanuts.
    Demo {
        #[arg(value_parser = ["piano", "peanuts"])]
        name: String,
    },
    /// Generate a seeded random model satisfying the frame conditions.
    RandomModel {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        worlds: usize,
        #[arg(long, default_value = "p,q")]
        atoms: String,
        #[arg(long, default_value = "1,2")]
        agents: String,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        let code = match e {
            NetworkError::BoundExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: format!("networks: {e}"),
        }
    }
}

impl From<ExpandError> for Failure {
    fn from(e: ExpandError) -> Self {
        match e {
            ExpandError::Network(n) => n.into(),
            ExpandError::OutputBudget { .. } | ExpandError::DisjunctBudget { .. } => Failure {
                code: EXIT_BUDGET,
                message: format!("expand: {e}"),
            },
            ExpandError::InvalidBudget => Failure::usage(format!("expand: {e}")),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Expand(x) => x.into(),
            SolveError::Interrupted(_) => Failure {
                code: EXIT_BUDGET,
                message: format!("solver: timeout: {e}"),
            },
            _ => Failure::usage(format!("solver: {e}")),
        }
    }
}

struct Context<'a> {
    json: bool,
    enumeration: EnumOptions,
    timeout: Option<f64>,
    out: &'a mut dyn Write,
}

impl Context<'_> {
    fn deadline(&self) -> Result<Deadline, Failure> {
        Ok(Deadline::after(
            timeout(self.timeout).map_err(Failure::usage)?,
        ))
    }

    fn emit(&mut self, text: &str, value: Value) -> Result<(), Failure> {
        let res = if self.json {
            writeln!(
                self.out,
                "{}",
                serde_json::to_string_pretty(&value).expect("json")
            )
        } else {
            write!(self.out, "{text}")
        };
        res.map_err(|e| Failure::usage(format!("io: {e}")))
    }

    fn class(&self, args: &ClassArgs) -> Result<NetworkClass, Failure> {
        class_with_filters(&args.class, &args.filters)
    }

    fn logic(&self, args: &ClassArgs) -> Result<Logic, Failure> {
        let mut logic = Logic::new(self.class(args)?).minimal(args.minimal);
        logic.enumeration = self.enumeration;
        Ok(logic)
    }
}

fn class_with_filters(spec: &str, filters: &[String]) -> Result<NetworkClass, Failure> {
    let class = load_class(spec).map_err(|e| Failure::usage(format!("class: {e}")))?;
    let filters = filters
        .iter()
        .map(|f| parse_filter(f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(format!("class: {e}")))?;
    Ok(class.filtered(filters))
}

fn read_formula(input: &FormulaInput) -> Result<Formula, Failure> {
    let text = match (&input.formula, &input.file) {
        (Some(t), None) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("io: cannot read {}: {e}", path.display())))?,
        _ => return Err(Failure::usage("give either a formula or --file")),
    };
    parse(&text).map_err(|e| Failure::usage(format!("parse: {e}")))
}

fn names(g: &Group) -> Vec<&str> {
    g.members().map(Agent::as_str).collect()
}

fn network_json(n: &CohesionNetwork) -> Value {
    json!({
        "vertices": n.vertices.iter().map(names).collect::<Vec<_>>(),
        "edges": n.edges.iter().map(|(a, b)| [names(a), names(b)]).collect::<Vec<_>>(),
    })
}

fn class_json(class: &NetworkClass) -> Value {
    serde_json::to_value(ClassFile::from_class(class)).expect("json")
}

fn model_json(model: &cohesion_core::NeighborhoodModel) -> Value {
    serde_json::to_value(ModelFile::from_model(model)).expect("json")
}

fn save(path: &Path, model: &cohesion_core::NeighborhoodModel) -> Result<(), Failure> {
    write_model(path, model).map_err(|e| Failure::usage(format!("model: {e}")))
}

fn execute(cmd: Command, ctx: &mut Context<'_>) -> Result<i32, Failure> {
    match cmd {
        Command::Parse { input } => {
            let f = read_formula(&input)?;
            let text = format!("{}\n{}", render(&f), render_tree(&f));
            let text = if text.ends_with('\n') {
                text
            } else {
                text + "\n"
            };
            ctx.emit(
                &text,
                json!({
                    "formula": render(&f),
                    "modal_depth": f.modal_depth(),
                    "size": f.size(),
                    "individual": is_biat(&f),
                    "agents": f.agents().iter().map(Agent::as_str).collect::<Vec<_>>(),
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Networks { agents, class } => {
            let group = parse_group(&agents).map_err(|e| Failure::usage(format!("parse: {e}")))?;
            let nc = ctx.class(&class)?;
            let nets: Vec<CohesionNetwork> = if class.minimal {
                nc.minimal_members(&group, &ctx.enumeration)?
            } else {
                nc.members(&group, &ctx.enumeration)?.collect()
            };
            let kind = if class.minimal {
                "minimal networks"
            } else {
                "networks"
            };
            let mut text = format!("{} {kind} for {group} in {}\n", nets.len(), class.class);
            for (i, n) in nets.iter().enumerate() {
                text.push_str(&format!("{:>4}  {n}\n", i + 1));
            }
            ctx.emit(
                &text,
                json!({
                    "group": names(&group),
                    "class": class_json(&nc),
                    "minimal": class.minimal,
                    "count": nets.len(),
                    "networks": nets.iter().map(network_json).collect::<Vec<_>>(),
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Expand { input, class } => {
            let f = read_formula(&input)?;
            let out = ctx.logic(&class)?.expand(&f)?;
            ctx.emit(
                &format!("{out}\n"),
                json!({ "formula": render(&f), "expansion": render(&out), "size": out.size() }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Sat { input, class, out } => decide(ctx, &input, &class, out.as_deref(), false),
        Command::Valid { input, class, out } => decide(ctx, &input, &class, out.as_deref(), true),
        Command::Check {
            input,
            model,
            world,
            class,
            filters,
        } => {
            let f = read_formula(&input)?;
            let m = read_model(&model).map_err(|e| Failure::usage(format!("model: {e}")))?;
            if let Some(v) = m.validate().first() {
                return Err(Failure::usage(format!("model: {v}")));
            }
            let target = match class {
                Some(spec) => {
                    let mut logic = Logic::new(class_with_filters(&spec, &filters)?);
                    logic.enumeration = ctx.enumeration;
                    logic.expand(&f)?
                }
                None if is_biat(&f) => f.clone(),
                None => return Err(Failure::usage(
                    "check: formula has group modalities or assistance; pass --class to expand it",
                )),
            };
            let value = m
                .check_named(&world, &target)
                .map_err(|e| Failure::usage(format!("model: {e}")))?;
            ctx.emit(
                &format!("{value}\n"),
                json!({ "formula": render(&f), "world": world, "value": value }),
            )?;
            Ok(if value { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Demo { name } => {
            let d =
                demo::find(&name).ok_or_else(|| Failure::usage(format!("unknown demo {name}")))?;
            let outcomes = d.run(&ctx.deadline()?)?;
            let mut text = format!("{}: {} (class {})\n", d.name, d.summary, d.class);
            let mut all = true;
            for o in &outcomes {
                all &= o.valid;
                let verdict = if o.valid { "valid" } else { "NOT VALID" };
                text.push_str(&format!(
                    "\n{}\n  {}\n  expands to {}\n  {verdict}\n",
                    o.claim.label,
                    render(&parse(o.claim.formula).expect("demo formulas parse")),
                    o.expansion
                ));
            }
            text.push_str(if all {
                "\nall claims verified by the solver\n"
            } else {
                "\nsome claims failed\n"
            });
            let claims: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "label": o.claim.label,
                        "formula": o.claim.formula,
                        "expansion": o.expansion,
                        "valid": o.valid,
                    })
                })
                .collect();
            ctx.emit(
                &text,
                json!({ "demo": d.name, "class": d.class, "claims": claims, "verified": all }),
            )?;
            Ok(if all { EXIT_OK } else { EXIT_FALSE })
        }
        Command::RandomModel {
            seed,
            worlds,
            atoms,
            agents,
            density,
            out,
        } => {
            let atoms: Vec<String> = split_list(&atoms);
            for a in &atoms {
                Formula::atom(a.as_str()).map_err(|e| Failure::usage(format!("atom {a}: {e}")))?;
            }
            let agents = split_list(&agents)
                .into_iter()
                .map(|a| {
                    Agent::new(a.as_str()).map_err(|e| Failure::usage(format!("agent {a}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = random_model(seed, worlds, &atoms, &agents, density)
                .map_err(|e| Failure::usage(format!("model: {e}")))?;
            match out {
                Some(path) => {
                    save(&path, &m)?;
                    ctx.emit(
                        &format!("model written to {}\n", path.display()),
                        json!({ "written": path.display().to_string() }),
                    )?;
                }
                None => {
                    let text = ModelFile::from_model(&m).to_json() + "\n";
                    ctx.emit(&text, model_json(&m))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// `sat` and `valid`: validity asks for a model of the negation.
fn decide(
    ctx: &mut Context<'_>,
    input: &FormulaInput,
    class: &ClassArgs,
    out: Option<&Path>,
    validity: bool,
) -> Result<i32, Failure> {
    let f = read_formula(input)?;
    let logic = ctx.logic(class)?;
    let goal = if validity {
        Formula::not(f.clone())
    } else {
        f.clone()
    };
    let res = logic.sat(&goal, &ctx.deadline()?)?;
    let (answer, verdict, model_kind) = match (validity, res.is_sat()) {
        (false, true) => (true, "satisfiable", "witness"),
        (false, false) => (false, "unsatisfiable", "witness"),
        (true, true) => (false, "not valid", "countermodel"),
        (true, false) => (true, "valid", "countermodel"),
    };
    let mut text = format!("{verdict}\n");
    let mut value = json!({
        "formula": render(&f),
        "verdict": verdict,
        "stats": {
            "subproblems": res.stats.subproblems,
            "memo_hits": res.stats.memo_hits,
            "decisions": res.stats.decisions,
        },
    });
    if let Some((model, w)) = &res.witness {
        let world = &model.worlds[*w];
        value["world"] = json!(world);
        text.push_str(&format!(
            "{model_kind}: {} worlds, designated world {world}\n",
            model.len()
        ));
        match out {
            Some(path) => {
                save(path, model)?;
                text.push_str(&format!("{model_kind} written to {}\n", path.display()));
                value["written"] = json!(path.display().to_string());
            }
            None => {
                text.push_str(&ModelFile::from_model(model).to_json());
                text.push('\n');
                value[model_kind] = model_json(model);
            }
        }
    }
    ctx.emit(&text, value)?;
    Ok(if answer { EXIT_OK } else { EXIT_FALSE })
}

/// Runs the command line on `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut ctx = Context {
        json: cli.json,
        enumeration: EnumOptions {
            bound: cli.bound,
            allow_self_edges: cli.allow_self_edges,
            literal_vertices: cli.literal_vertices,
        },
        timeout: cli.timeout,
        out,
    };
    match execute(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
