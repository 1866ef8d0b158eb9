use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mil_core::cnf::{parse_dimacs, to_restricted, CnfFormula};
use mil_core::e2e::{CheckOptions, OracleChoice};
use mil_core::fixtures::{fixture, Fixture, FIXTURE_NAMES};
use mil_core::graph::parse_graph_json;
use mil_core::interval::{validate_representation, ClassConstraints, DIntervalFamily};
use mil_core::intrep::{find_depth_bounded_unit, find_integer_rep_profile, SearchConfig};
use mil_core::order::{colored_profile, order_to_family, recognize_unit_d_order, uniform_profile, OrderConfig};
use mil_core::pipeline::{run_pipeline, PipelineConfig};
use mil_core::reduction::{build_reduction_graph, decolorize, lift_to_d, GadgetTrace};
use mil_core::split::recognize_colored_unit2_via_splits;
use mil_core::{find_forbidden_unit_interval, Budget, Color, ColoredGraph, Error};

/// Exit codes: 0 yes, 1 a valid negative answer, 2 bad input, 3 capacity or budget.
#[derive(Parser)]
#[command(name = "mil", version, about = "Unit multiple-interval graphs: reductions, oracles and certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Io {
    /// Input file, `-` for stdin. Fixture names are accepted too.
    #[arg(long)]
    input: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Shape {
    /// Use the graph's colors: two intervals per white vertex, one per black.
    #[arg(long)]
    colored: bool,
    /// Intervals per vertex when not colored.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Lift the order oracle's token bound; pair with --budget-ms.
    #[arg(long)]
    unbounded: bool,
}

impl Shape {
    fn order(&self) -> OrderConfig {
        if self.unbounded {
            OrderConfig::unbounded()
        } else {
            OrderConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Splits,
    Order,
    Both,
}

impl From<Oracle> for OracleChoice {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Splits => OracleChoice::Splits,
            Oracle::Order => OracleChoice::Order,
            Oracle::Both => OracleChoice::Both,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// DIMACS formula to the colored reduction graph.
    Reduce(Io),
    /// Replace black vertices by the gadget that uses up one interval.
    Decolorize(Io),
    /// Attach the d-interval gadget to every vertex.
    Lift {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// Decide unit d-interval (or colored unit 2-interval) representability.
    Recognize {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Oracle::Both)]
        oracle: Oracle,
    },
    /// Check a representation against a graph.
    Validate {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        rep: String,
        /// Comma list of: unit, balanced, colored, integer=X, depth=R, d=K.
        #[arg(long, default_value = "")]
        require: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Depth of a representation, or a unit family of bounded depth for a graph.
    Depth {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        depth_cap: Option<usize>,
    },
    /// Find an induced claw, net, tent or hole.
    Forbidden(Io),
    /// Emit a named fixture.
    Gadget {
        name: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for an open integer family with all lengths x.
    Intrep {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        coord_max: u64,
        #[arg(long)]
        depth_cap: Option<usize>,
    },
    /// Seeded end-to-end runs over random formulas.
    Pipeline {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of random formulas.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_clauses: usize,
        /// Extra DIMACS files or fixture names, checked after the random ones.
        #[arg(long)]
        input: Vec<String>,
        #[arg(long, value_enum, default_value_t = Oracle::Both)]
        oracle: Oracle,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        budget_ms: Option<u64>,
        /// Include wall times (the report is then no longer reproducible).
        #[arg(long)]
        timings: bool,
        /// Lift the order oracle's token bound.
        #[arg(long)]
        unbounded: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

type Res<T> = Result<T, Error>;

struct Done {
    body: String,
    code: u8,
}

fn done(v: Value, code: u8) -> Res<Done> {
    let mut body = serde_json::to_string_pretty(&v)?;
    body.push('\n');
    Ok(Done { body, code })
}

fn read_input(input: Option<&str>) -> Res<String> {
    match input {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        Some(p) => Ok(fs::read_to_string(p)?),
    }
}

fn is_file(src: Option<&str>) -> bool {
    src.is_none_or(|s| s == "-" || Path::new(s).exists())
}

fn unknown(src: &str) -> Error {
    Error::Input(format!(
        "{src:?} is neither a readable file nor a fixture ({})",
        FIXTURE_NAMES.join(", ")
    ))
}

fn load_graph(src: Option<&str>) -> Res<ColoredGraph> {
    if is_file(src) {
        return parse_graph_json(&read_input(src)?)?.to_colored();
    }
    match fixture(src.unwrap()) {
        Ok(Fixture::Graph(g)) => Ok(g),
        _ => Err(unknown(src.unwrap())),
    }
}

fn load_rep(src: Option<&str>) -> Res<DIntervalFamily> {
    if is_file(src) {
        return DIntervalFamily::parse(&read_input(src)?);
    }
    match fixture(src.unwrap()) {
        Ok(Fixture::Rep(r)) => Ok(r),
        _ => Err(unknown(src.unwrap())),
    }
}

fn load_cnf(src: Option<&str>) -> Res<CnfFormula> {
    if is_file(src) {
        return parse_dimacs(&read_input(src)?);
    }
    match fixture(src.unwrap()) {
        Ok(Fixture::Cnf(f)) => Ok(f),
        _ => Err(unknown(src.unwrap())),
    }
}

fn budget(ms: Option<u64>) -> Budget {
    ms.map(Budget::millis).unwrap_or_default()
}

fn profile(cg: &ColoredGraph, shape: &Shape) -> Vec<usize> {
    if shape.colored {
        colored_profile(cg)
    } else {
        uniform_profile(&cg.graph, shape.d)
    }
}

fn gadget_json(t: &GadgetTrace) -> Value {
    json!({
        "graph": t.graph.to_json_value(),
        "owner": t.owner,
        "added_vertices": t.added_vertices,
        "added_edges": t.added_edges,
    })
}

/// `yes`/`no` with exit code 0/1; budget and capacity errors become exit 3.
fn decided<T>(r: Res<Option<T>>) -> Res<(Option<T>, &'static str, u8)> {
    match r {
        Ok(Some(t)) => Ok((Some(t), "yes", 0)),
        Ok(None) => Ok((None, "no", 1)),
        Err(Error::Budget { .. }) => Ok((None, "budget_exhausted", 3)),
        Err(Error::Capacity(_)) => Ok((None, "over_capacity", 3)),
        Err(e) => Err(e),
    }
}

fn recognize(io: &Io, shape: &Shape, oracle: Oracle) -> Res<Done> {
    let cg = load_graph(io.input.as_deref())?;
    let prof = profile(&cg, shape);
    let choice = OracleChoice::from(oracle);
    let splits_apply = shape.colored || shape.d == 2;
    if choice.splits() && !splits_apply && !choice.order() {
        return Err(Error::Input("the split oracle only handles d = 2 or colored input".into()));
    }
    let mut out = serde_json::Map::new();
    let mut codes = Vec::new();
    if choice.order() {
        let r = recognize_unit_d_order(&cg.graph, &prof, &shape.order(), &mut budget(shape.budget_ms));
        let stats = r.as_ref().ok().map(|(_, s)| *s);
        let (t, answer, code) = decided(r.map(|(t, _)| t))?;
        let family = t.map(|t| order_to_family(&t)).transpose()?.map(|f| f.to_json());
        out.insert("order".into(), json!({ "answer": answer, "family": family, "stats": stats }));
        codes.push(code);
    }
    if choice.splits() && splits_apply {
        let colored = if shape.colored {
            cg.clone()
        } else {
            ColoredGraph::uniform(cg.graph.clone(), Color::White)
        };
        let (found, answer, code) = decided(recognize_colored_unit2_via_splits(&colored, &mut budget(shape.budget_ms)))?;
        let (split, family) = match found {
            Some((s, f)) => (Some(s.to_json()), Some(f.to_json())),
            None => (None, None),
        };
        out.insert("splits".into(), json!({ "answer": answer, "split": split, "family": family }));
        codes.push(code);
    }
    let agree = codes.iter().filter(|&&c| c < 2).collect::<Vec<_>>().windows(2).all(|w| w[0] == w[1]);
    out.insert("agree".into(), json!(agree));
    let code = if codes.contains(&3) {
        3
    } else if !agree {
        eprintln!("oracles disagree");
        1
    } else {
        codes[0]
    };
    done(Value::Object(out), code)
}

fn constraints(cg: &ColoredGraph, require: &str) -> Res<ClassConstraints> {
    let mut c = ClassConstraints::default();
    for item in require.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Input(format!("bad number in requirement {item:?}")))
        };
        match item.split_once('=') {
            None if item == "unit" => c.unit = true,
            None if item == "balanced" => c.balanced = true,
            None if item == "colored" => c.counts = Some(cg.profile()),
            Some(("integer", v)) => c.integer_x = Some(num(v)? as u64),
            Some(("depth", v)) => c.depth_max = Some(num(v)?),
            Some(("d", v)) => {
                let k = num(v)?;
                c.counts = Some(cg.graph.labels().iter().map(|l| (l.clone(), k)).collect());
            }
            _ => return Err(Error::Input(format!("unknown requirement {item:?}"))),
        }
    }
    Ok(c)
}

fn depth(io: &Io, shape: &Shape, cap: Option<usize>) -> Res<Done> {
    let text = read_or_fixture(io.input.as_deref())?;
    if let Text::Rep(fam) = text {
        let report = fam.classify()?;
        return done(json!({ "depth": report.depth, "class": report }), 0);
    }
    let Text::Graph(cg) = text else { unreachable!() };
    let Some(r) = cap else {
        return Err(Error::Input("a graph input needs --depth-cap".into()));
    };
    let prof = profile(&cg, shape);
    let (fam, answer, code) = decided(find_depth_bounded_unit(&cg.graph, &prof, r, &mut budget(shape.budget_ms)))?;
    let depth = fam.as_ref().map(|f| f.depth()).transpose()?;
    done(
        json!({ "answer": answer, "depth": depth, "family": fam.map(|f| f.to_json()) }),
        code,
    )
}

enum Text {
    Graph(ColoredGraph),
    Rep(DIntervalFamily),
}

/// A graph or a representation, told apart by the `vertices` key.
fn read_or_fixture(src: Option<&str>) -> Res<Text> {
    if is_file(src) {
        let v: Value = serde_json::from_str(&read_input(src)?)?;
        return if v.get("vertices").is_some() {
            Ok(Text::Graph(serde_json::from_value::<mil_core::GraphJson>(v)?.to_colored()?))
        } else {
            Ok(Text::Rep(DIntervalFamily::from_json(&v)?))
        };
    }
    match fixture(src.unwrap()) {
        Ok(Fixture::Graph(g)) => Ok(Text::Graph(g)),
        Ok(Fixture::Rep(r)) => Ok(Text::Rep(r)),
        _ => Err(unknown(src.unwrap())),
    }
}

fn execute(cmd: &Cmd) -> Res<(Done, Option<&PathBuf>)> {
    let d = match cmd {
        Cmd::Reduce(io) => {
            let r = to_restricted(&load_cnf(io.input.as_deref())?)?;
            let trace = build_reduction_graph(&r)?;
            let mut v = serde_json::to_value(&trace)?;
            v["restricted"] = json!(r.formula.to_dimacs());
            (done(v, 0)?, io.output.as_ref())
        }
        Cmd::Decolorize(io) => {
            let t = decolorize(&load_graph(io.input.as_deref())?)?;
            (done(gadget_json(&t), 0)?, io.output.as_ref())
        }
        Cmd::Lift { io, d } => {
            let t = lift_to_d(&load_graph(io.input.as_deref())?.graph, *d)?;
            (done(gadget_json(&t), 0)?, io.output.as_ref())
        }
        Cmd::Recognize { io, shape, oracle } => (recognize(io, shape, *oracle)?, io.output.as_ref()),
        Cmd::Validate {
            graph,
            rep,
            require,
            output,
        } => {
            let cg = load_graph(Some(graph))?;
            let fam = load_rep(Some(rep))?;
            let report = validate_representation(&cg.graph, &fam, &constraints(&cg, require)?)?;
            let code = u8::from(!report.is_empty());
            (done(serde_json::to_value(&report)?, code)?, output.as_ref())
        }
        Cmd::Depth { io, shape, depth_cap } => (depth(io, shape, *depth_cap)?, io.output.as_ref()),
        Cmd::Forbidden(io) => {
            let g = load_graph(io.input.as_deref())?.graph;
            let cert = find_forbidden_unit_interval(&g);
            let code = u8::from(cert.is_some());
            (
                done(json!({ "unit_interval": cert.is_none(), "certificate": cert }), code)?,
                io.output.as_ref(),
            )
        }
        Cmd::Gadget { name, output } => {
            let body = match fixture(name)? {
                Fixture::Graph(cg) if cg.blacks().next().is_none() => serde_json::to_value(cg.graph.to_json_value())?,
                Fixture::Graph(cg) => serde_json::to_value(cg.to_json_value())?,
                Fixture::Rep(r) => r.to_json(),
                Fixture::Cnf(f) => {
                    return Ok((
                        Done {
                            body: f.to_dimacs(),
                            code: 0,
                        },
                        output.as_ref(),
                    ))
                }
            };
            (done(body, 0)?, output.as_ref())
        }
        Cmd::Intrep {
            io,
            shape,
            x,
            coord_max,
            depth_cap,
        } => {
            let cg = load_graph(io.input.as_deref())?;
            let prof = profile(&cg, shape);
            let d = prof.iter().copied().max().unwrap_or(shape.d).max(1);
            let mut cfg = SearchConfig::new(d, *x, *coord_max);
            cfg.depth_cap = *depth_cap;
            cfg.time_budget = shape.budget_ms.map(Duration::from_millis);
            let r = find_integer_rep_profile(&cg.graph, &prof, &cfg, &shape.order(), &mut Budget::unlimited());
            let stats = r.as_ref().ok().map(|(_, s)| s.clone());
            let (fam, answer, code) = decided(r.map(|(f, _)| f))?;
            (
                done(
                    json!({ "answer": answer, "family": fam.map(|f| f.to_json()), "stats": stats }),
                    code,
                )?,
                io.output.as_ref(),
            )
        }
        Cmd::Pipeline {
            seed,
            count,
            max_vars,
            max_clauses,
            input,
            oracle,
            jobs,
            budget_ms,
            timings,
            unbounded,
            output,
        } => {
            let extra = input
                .iter()
                .map(|s| Ok((s.clone(), load_cnf(Some(s))?)))
                .collect::<Res<Vec<_>>>()?;
            let cfg = PipelineConfig {
                seed: *seed,
                instances: *count,
                max_vars: *max_vars,
                max_clauses: *max_clauses,
                extra,
                check: CheckOptions {
                    oracles: (*oracle).into(),
                    budget: budget_ms.map(Duration::from_millis),
                    order: if *unbounded {
                        OrderConfig::unbounded()
                    } else {
                        OrderConfig::default()
                    },
                    ..CheckOptions::default()
                },
                jobs: *jobs,
                timings: *timings,
            };
            let report = run_pipeline(&cfg)?;
            let code = u8::from(report.summary.failed > 0);
            (done(serde_json::to_value(&report)?, code)?, output.as_ref())
        }
    };
    Ok(d)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.cmd) {
        Ok((d, out)) => {
            let written = match out {
                Some(p) => fs::write(p, &d.body),
                None => io::stdout().write_all(d.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(d.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity(_) | Error::Budget { .. } => 3,
                _ => 2,
            })
        }
    }
}
