use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conway_core::flype::{flype_closure, DEFAULT_BUDGET};
use conway_core::tree::StructureTree;
use conway_core::{
    apply_flype, available_flypes, cardan_to_diagram, eval_cf, expand_homogeneous, flype_equivalent, flype_orbits, parse_any, periodicity_report,
    projection_symmetries, seifert_report, tangle_fraction, to_pd, tree_isomorphic, AtomTree, ContinuedFraction, Decomposition, Fraction,
    LinkDiagram, ProjectionSymmetry,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "knot", version, about = "Conway decompositions, flypes and periodicity of alternating links")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Node limit for flype closures (default 10000, or KNOT_BUDGET).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Respect the cyclic order around twisted band diagrams when comparing trees.
    #[arg(long, global = true, overrides_with = "no_strict")]
    strict: bool,
    #[arg(long = "no-strict", global = true)]
    no_strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeChoice {
    Canonical,
    Essential,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a PD or Gauss code and print the diagram.
    Parse { input: String },
    /// Decomposition, canonical and essential structure trees.
    Analyze { input: String },
    /// Continued fraction calculus.
    Fraction {
        #[command(subcommand)]
        op: FractionOp,
    },
    /// Flype moves.
    Flype {
        #[command(subcommand)]
        op: FlypeOp,
    },
    /// Free rotational symmetries of the projection.
    Symmetry {
        input: String,
        #[arg(long)]
        q: Option<usize>,
    },
    /// q-periodicity obstructions and visible periodic projections.
    Periodicity {
        input: String,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        atoms: Option<String>,
    },
    /// Render a structure tree.
    Render {
        input: String,
        #[arg(long, value_enum, default_value = "essential")]
        tree: TreeChoice,
    },
}

#[derive(Subcommand)]
enum FractionOp {
    /// Evaluate a continued fraction such as "[2,3]".
    Eval { terms: String },
    /// Homogeneous continued fraction of a fraction such as "7/3".
    Expand { fraction: String },
    /// Build the cardan tangle of a continued fraction and print its closure.
    Tangle { terms: String },
}

#[derive(Subcommand)]
enum FlypeOp {
    List {
        input: String,
    },
    Apply {
        input: String,
        #[arg(long)]
        index: usize,
    },
    Closure {
        input: String,
    },
    Equivalent {
        first: String,
        second: String,
    },
    Orbits {
        input: String,
    },
}

enum Failure {
    Usage(String),
    Domain { kind: &'static str, message: String },
}

fn domain(kind: &'static str) -> impl Fn(String) -> Failure {
    move |message| Failure::Domain { kind, message }
}

enum Output {
    Json(Value),
    Text(String),
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
    }
}

fn load(path: &str) -> Result<LinkDiagram, Failure> {
    parse_any(&read_input(path)?).map_err(|e| domain("DiagramError")(e.to_string()))
}

fn decompose(d: &LinkDiagram) -> Result<Decomposition, Failure> {
    Decomposition::new(d.map()).map_err(|e| domain("DecompositionError")(e.to_string()))
}

fn budget(cli: &Cli) -> Result<usize, Failure> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var("KNOT_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("KNOT_BUDGET is not a number: {v}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn symmetry_json(s: &ProjectionSymmetry) -> Value {
    json!({
        "order": s.order,
        "strict": s.strict,
        "fixed_faces": s.fixed_faces,
        "crossing_map": s.crossing_map(),
        "crossing_orbits": s.crossing_orbits(),
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let format = cli.format;
    let strict = cli.strict && !cli.no_strict;
    match &cli.command {
        Command::Parse { input } => {
            let d = load(input)?;
            Ok(Output::Json(json!({
                "pd": to_pd(&d),
                "crossings": d.num_crossings(),
                "alternating": d.is_alternating(),
                "reduced": d.is_reduced(),
                "prime": d.is_prime(),
                "diagram": d.to_json(),
            })))
        }
        Command::Analyze { input } => {
            let d = load(input)?;
            let dec = decompose(&d)?;
            let canonical = StructureTree::canonical(&dec);
            let essential = StructureTree::essential(&dec);
            if format == Some(Format::Dot) {
                return Ok(Output::Text(format!("{}{}", canonical.to_dot(), essential.to_dot())));
            }
            let (circles, genus) = d.seifert_genus();
            Ok(Output::Json(json!({
                "crossings": d.num_crossings(),
                "components": d.component_count(),
                "alternating": d.is_alternating(),
                "decomposition": dec.to_json(),
                "canonical_tree": canonical.to_json(),
                "essential_tree": essential.to_json(),
                "rational": dec.rational_chain.as_ref().and_then(|_| dec.chain_fraction()).map(|f| f.to_string()),
                "seifert": { "circles": circles, "genus": genus },
            })))
        }
        Command::Fraction { op } => {
            let value = match op {
                FractionOp::Eval { terms } => {
                    let cf: ContinuedFraction = terms
                        .parse()
                        .map_err(|e: conway_core::FractionError| domain("FractionError")(e.to_string()))?;
                    let f = eval_cf(&cf).map_err(|e| domain("FractionError")(e.to_string()))?;
                    json!({ "terms": cf.to_string(), "fraction": f.to_string() })
                }
                FractionOp::Expand { fraction } => {
                    let f: Fraction = fraction
                        .parse()
                        .map_err(|e: conway_core::FractionError| domain("FractionError")(e.to_string()))?;
                    let cf = expand_homogeneous(f).map_err(|e| domain("FractionError")(e.to_string()))?;
                    json!({ "fraction": f.to_string(), "terms": cf.to_string() })
                }
                FractionOp::Tangle { terms } => {
                    let cf: ContinuedFraction = terms
                        .parse()
                        .map_err(|e: conway_core::FractionError| domain("FractionError")(e.to_string()))?;
                    let t = cardan_to_diagram(&cf).map_err(|e| domain("FractionError")(e.to_string()))?;
                    let d = t.numerator().map_err(|e| domain("DiagramError")(e.to_string()))?;
                    let f = tangle_fraction(&t).map_err(|e| domain("DecompositionError")(e.to_string()))?;
                    json!({ "terms": cf.to_string(), "fraction": f.to_string(), "numerator_pd": to_pd(&d) })
                }
            };
            if format == Some(Format::Json) {
                Ok(Output::Json(value))
            } else {
                let key = if matches!(op, FractionOp::Expand { .. }) { "terms" } else { "fraction" };
                Ok(Output::Text(format!("{}\n", value[key].as_str().unwrap_or_default())))
            }
        }
        Command::Flype { op } => {
            let flype_err = |e: conway_core::FlypeError| domain("FlypeError")(e.to_string());
            match op {
                FlypeOp::List { input } => {
                    let d = load(input)?;
                    let moves = available_flypes(&d).map_err(flype_err)?;
                    Ok(Output::Json(json!({ "moves": moves })))
                }
                FlypeOp::Apply { input, index } => {
                    let d = load(input)?;
                    let moves = available_flypes(&d).map_err(flype_err)?;
                    let m = moves
                        .get(*index)
                        .ok_or_else(|| domain("FlypeError")(format!("no flype with index {index}; {} available", moves.len())))?;
                    let e = apply_flype(&d, m).map_err(flype_err)?;
                    Ok(Output::Json(json!({ "move": m, "pd": to_pd(&e) })))
                }
                FlypeOp::Closure { input } => {
                    let d = load(input)?;
                    let c = flype_closure(&d, budget(cli)?).map_err(flype_err)?;
                    let pds: Vec<String> = c.diagrams.iter().map(to_pd).collect();
                    Ok(Output::Json(json!({ "size": pds.len(), "truncated": c.truncated, "diagrams": pds })))
                }
                FlypeOp::Equivalent { first, second } => {
                    let (a, b) = (load(first)?, load(second)?);
                    let eq = flype_equivalent(&a, &b, budget(cli)?).map_err(flype_err)?;
                    let trees = match (Decomposition::new(a.map()), Decomposition::new(b.map())) {
                        (Ok(x), Ok(y)) => Some(
                            tree_isomorphic(&StructureTree::canonical(&x), &StructureTree::canonical(&y), strict).is_some()
                                && tree_isomorphic(&StructureTree::essential(&x), &StructureTree::essential(&y), strict).is_some(),
                        ),
                        _ => None,
                    };
                    Ok(Output::Json(
                        json!({ "equivalent": eq, "indeterminate": eq.is_none(), "trees_isomorphic": trees, "strict": strict }),
                    ))
                }
                FlypeOp::Orbits { input } => {
                    let d = load(input)?;
                    Ok(Output::Json(json!({ "orbits": flype_orbits(&d).map_err(flype_err)? })))
                }
            }
        }
        Command::Symmetry { input, q } => {
            let d = load(input)?;
            let syms: Vec<ProjectionSymmetry> = projection_symmetries(&d).into_iter().filter(|s| q.is_none_or(|q| s.order == q)).collect();
            let mut strict_orders: Vec<usize> = syms.iter().filter(|s| s.strict).map(|s| s.order).collect();
            strict_orders.sort_unstable();
            strict_orders.dedup();
            let seifert = seifert_report(&d, None);
            Ok(Output::Json(json!({
                "symmetries": syms.iter().map(symmetry_json).collect::<Vec<_>>(),
                "strict_orders": strict_orders,
                "seifert": seifert,
            })))
        }
        Command::Periodicity { input, q, atoms } => {
            let d = load(input)?;
            let atoms: Option<AtomTree> = match atoms {
                Some(path) => Some(serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Usage(format!("invalid atom tree: {e}")))?),
                None => None,
            };
            let report = periodicity_report(&d, *q, atoms.as_ref(), budget(cli)?).map_err(|e| domain("PeriodicityError")(e.to_string()))?;
            Ok(Output::Json(serde_json::to_value(&report).expect("report serializes")))
        }
        Command::Render { input, tree } => {
            let d = load(input)?;
            let dec = decompose(&d)?;
            let t = match tree {
                TreeChoice::Canonical => StructureTree::canonical(&dec),
                TreeChoice::Essential => StructureTree::essential(&dec),
            };
            if format == Some(Format::Json) {
                Ok(Output::Json(t.to_json()))
            } else {
                Ok(Output::Text(t.to_dot()))
            }
        }
    }
}

// A closed pipe on stdout is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json serializes"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Output::Json(v)) => {
            emit(&pretty(&v));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            emit(&t);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain { kind, message }) => {
            emit(&pretty(&json!({ "error": { "kind": kind, "message": message } })));
            ExitCode::from(1)
        }
    }
}
