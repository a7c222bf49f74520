use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use csp_digraph::algebra::identities::library;
use csp_digraph::algebra::{
    core_of, find_interpretations, find_wnu, is_core, report_taylor_and_width, AlgebraError,
    IdentitySystem, Operation, OperationTable, DEFAULT_INDICATOR_BOUND,
};
use csp_digraph::format::{
    digraph_to_json, parse_digraph, parse_structure, sidecar_to_json, structure_to_json,
    table_to_json,
};
use csp_digraph::gadget::{count_formula, to_dot, GadgetDigraph, DEFAULT_GADGET_BOUND};
use csp_digraph::lifting::{
    lift_general_auto, lift_wnu, verify_identities, verify_polymorphism, EpsilonOrder, LiftError,
    DEFAULT_VERIFY_LIMIT,
};
use csp_digraph::reductions::{
    backward_reduce, forward_translate, stage_3b, Answer, ReductionError, ReductionOutcome, Stage3A,
};
use csp_digraph::selftest::run_all;
use csp_digraph::selftest::run_criterion;
use csp_digraph::solver::DEFAULT_BUDGET;
use csp_digraph::structures::{collapse_to_single_relation, power, RelationalStructure};
use csp_digraph::{SolveError, Solver};

const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cspd",
    version,
    about = "Digraph gadgets, reductions and polymorphism lifting for finite CSPs"
)]
struct Cli {
    /// Search node budget for every homomorphism search
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Write the main result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format of the main result
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Largest WNU arity tried by `poly` without an explicit request
    #[arg(long, global = true, default_value_t = 4)]
    max_arity: usize,

    /// Size guard for gadgets, indicator structures and written tables
    #[arg(long, global = true, default_value_t = DEFAULT_INDICATOR_BOUND)]
    max_size: usize,

    /// Seed for sampled verification and the self-test corpora
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Structure,
    Digraph,
    Stage3a,
    Dot,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    ElementMajor,
    TupleMajor,
}

#[derive(Subcommand)]
enum Command {
    /// Build the gadget digraph of a template
    Build {
        #[arg(long)]
        input: PathBuf,
        /// Also write per-vertex tags and levels as JSON
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Translate an instance of CSP(A) into a digraph instance
    Forward {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Reduce a digraph instance back to an instance of CSP(A)
    Backward {
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long, required_unless_present = "from_stage3a")]
        input: Option<PathBuf>,
        /// Start from a generalized hyperedge list instead of a digraph
        #[arg(long, conflicts_with = "input")]
        from_stage3a: Option<PathBuf>,
    },
    /// Decide whether an instance maps to a template
    Solve {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Search for polymorphisms of a template
    Poly {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        request: Request,
    },
    /// Check whether a template is a core and compute a core
    Core {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lift polymorphisms of a template to its gadget digraph
    Lift {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        request: Request,
        /// Check edge preservation and identities on the gadget
        #[arg(long)]
        verify: bool,
        /// Edge tuples above which verification samples
        #[arg(long, default_value_t = DEFAULT_VERIFY_LIMIT)]
        verify_limit: u64,
        /// Linear order on element-tuple pairs used by the general lift
        #[arg(long, value_enum, default_value = "element-major")]
        order: Order,
    },
    /// Run the acceptance criteria and print one line per criterion
    Selftest {
        /// Run a single criterion
        #[arg(long)]
        criterion: Option<u8>,
        /// Append elapsed time and budget to each line
        #[arg(long)]
        timings: bool,
    },
}

#[derive(clap::Args)]
#[group(multiple = false)]
struct Request {
    /// Weak near-unanimity operation of this arity
    #[arg(long)]
    wnu: Option<usize>,
    /// Identity system file
    #[arg(long)]
    identities: Option<PathBuf>,
    /// Named identity system (majority, maltsev, 3perm, tsi2, wnuN, nuN, edgeN)
    #[arg(long)]
    library: Option<String>,
}

enum Requested {
    Wnu(usize),
    System(IdentitySystem),
    Nothing,
}

impl Request {
    fn resolve(&self) -> Result<Requested> {
        if let Some(m) = self.wnu {
            if m < 2 {
                bail!("WNU arity must be at least 2");
            }
            return Ok(Requested::Wnu(m));
        }
        if let Some(path) = &self.identities {
            let text = read(path)?;
            let system = IdentitySystem::parse(&text)
                .with_context(|| format!("parsing identities in {}", path.display()))?;
            return Ok(Requested::System(system));
        }
        if let Some(name) = &self.library {
            let system =
                library(name).with_context(|| format!("unknown identity system `{name}`"))?;
            return Ok(Requested::System(system));
        }
        Ok(Requested::Nothing)
    }
}

/// A command's result. With `--output`, `file` (or `text` when there is no
/// separate file body) goes to the file and `text` to stdout.
struct Report {
    text: String,
    file: Option<String>,
    negative: bool,
}

impl Report {
    fn yes(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            file: None,
            negative: false,
        }
    }

    fn no(text: impl Into<String>) -> Self {
        Self {
            negative: true,
            ..Self::yes(text)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_structure(path: &Path) -> Result<RelationalStructure> {
    parse_structure(&read(path)?).with_context(|| format!("parsing structure {}", path.display()))
}

fn single_relation_template(path: &Path) -> Result<RelationalStructure> {
    Ok(collapse_to_single_relation(&read_structure(path)?).structure)
}

fn gadget(a: &RelationalStructure, cli: &Cli) -> Result<GadgetDigraph> {
    Ok(GadgetDigraph::build(
        a,
        cli.max_size.max(DEFAULT_GADGET_BOUND),
    )?)
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format> {
    let format = cli.format.unwrap_or(default);
    if !allowed.contains(&format) {
        bail!("this command does not write that format");
    }
    Ok(format)
}

fn cmd_build(cli: &Cli, input: &Path, sidecar: Option<&Path>) -> Result<Report> {
    let a = single_relation_template(input)?;
    let d = gadget(&a, cli)?;
    let g = d.digraph();
    let (fv, fe) = count_formula(d.element_count(), d.tuple_count(), d.k());
    let counts = format!(
        "vertices {} edges {} (formula {fv} {fe})",
        g.vertex_count(),
        g.edge_count()
    );
    if (g.vertex_count(), g.edge_count()) != (fv, fe) {
        bail!("gadget does not match the counting formula: {counts}");
    }
    if let Some(path) = sidecar {
        write(path, &sidecar_to_json(&d))?;
    }
    let body = match format_or(cli, Format::Digraph, &[Format::Digraph, Format::Dot])? {
        Format::Dot => to_dot(g, Some(d.levels())),
        _ => digraph_to_json(g),
    };
    Ok(split_report(cli, body, counts))
}

/// Puts `body` on the main output and `note` next to it: on stdout when the
/// body goes to a file, on stderr otherwise.
fn split_report(cli: &Cli, body: String, note: String) -> Report {
    if cli.output.is_some() {
        Report {
            file: Some(body),
            ..Report::yes(format!("{note}\n"))
        }
    } else {
        eprintln!("{note}");
        Report::yes(body)
    }
}

fn cmd_forward(cli: &Cli, template: &Path, input: &Path) -> Result<Report> {
    let a = read_structure(template)?;
    let x = read_structure(input)?;
    let g = forward_translate(&x, &a)?;
    Ok(Report::yes(
        match format_or(cli, Format::Digraph, &[Format::Digraph, Format::Dot])? {
            Format::Dot => to_dot(&g, None),
            _ => digraph_to_json(&g),
        },
    ))
}

fn cmd_backward(
    cli: &Cli,
    template: Option<&Path>,
    input: Option<&Path>,
    from_stage3a: Option<&Path>,
) -> Result<Report> {
    let a = template.map(single_relation_template).transpose()?;
    if let Some(path) = from_stage3a {
        let stage = Stage3A::from_json(&read(path)?)
            .with_context(|| format!("parsing hyperedge list {}", path.display()))?;
        let (k, name) = match &a {
            Some(a) => {
                let rel = a.single_relation().expect("collapsed");
                (Some(rel.arity()), rel.name().to_string())
            }
            None => (None, "E".to_string()),
        };
        let b = stage_3b(&stage, k, &name)?;
        format_or(cli, Format::Structure, &[Format::Structure])?;
        return Ok(Report::yes(structure_to_json(&b.instance)));
    }
    let Some(a) = a else {
        bail!("--template is required unless --from-stage3a is given");
    };
    let input = input.expect("clap requires --input here");
    let g = parse_digraph(&read(input)?)
        .with_context(|| format!("parsing digraph {}", input.display()))?;
    let d = gadget(&a, cli)?;
    let solver = Solver::new(cli.budget);
    let format = format_or(
        cli,
        Format::Structure,
        &[Format::Structure, Format::Stage3a],
    )?;
    Ok(match backward_reduce(&g, &d, &solver)? {
        ReductionOutcome::Definite {
            answer: Answer::Yes,
            reason,
        } => Report::yes(format!("YES ({reason})\n")),
        ReductionOutcome::Definite {
            answer: Answer::No,
            reason,
        } => Report::no(format!("NO ({reason})\n")),
        ReductionOutcome::Reduced {
            instance, stage3a, ..
        } => Report::yes(match format {
            Format::Stage3a => stage3a.to_json(),
            _ => structure_to_json(&instance),
        }),
    })
}

fn cmd_solve(cli: &Cli, template: &Path, input: &Path) -> Result<Report> {
    let a = read_structure(template)?;
    let x = read_structure(input)?;
    let solver = Solver::new(cli.budget);
    Ok(match solver.solve(&x, &a)? {
        Some(map) => {
            let named: BTreeMap<&str, &str> = map
                .iter()
                .enumerate()
                .map(|(v, &t)| (x.element_name(v), a.element_name(t)))
                .collect();
            Report::yes(format!("YES\n{}\n", serde_json::to_string(&named)?))
        }
        None => Report::no("NO\n"),
    })
}

fn interpretations_text(found: &BTreeMap<String, OperationTable>, names: &[String]) -> String {
    let mut text = String::from("found\n");
    for (symbol, table) in found {
        text.push_str(&format!("{symbol} {}", table_to_json(table, names)));
    }
    text
}

fn cmd_poly(cli: &Cli, input: &Path, request: &Request) -> Result<Report> {
    let a = read_structure(input)?;
    let solver = Solver::new(cli.budget);
    let names = a.elements().to_vec();
    Ok(match request.resolve()? {
        Requested::Wnu(m) => match find_wnu(&a, m, &solver, cli.max_size)? {
            Some(table) => Report::yes(interpretations_text(
                &BTreeMap::from([("w".to_string(), table)]),
                &names,
            )),
            None => Report::no("none\n"),
        },
        Requested::System(system) => {
            match find_interpretations(&a, &system, &solver, cli.max_size)? {
                Some(found) => Report::yes(interpretations_text(&found, &names)),
                None => Report::no("none\n"),
            }
        }
        Requested::Nothing => {
            let report = report_taylor_and_width(&a, cli.max_arity, &solver, cli.max_size)?;
            Report::yes(format!("{report}\n"))
        }
    })
}

fn cmd_core(cli: &Cli, input: &Path) -> Result<Report> {
    let a = read_structure(input)?;
    let solver = Solver::new(cli.budget);
    if is_core(&a, &solver)? {
        return Ok(Report::yes("core\n"));
    }
    let core = core_of(&a, &solver)?;
    Ok(Report::yes(format!(
        "not a core (core has {} of {} elements)\n{}",
        core.size(),
        a.size(),
        structure_to_json(&core)
    )))
}

fn lifted_table<O: Operation>(d: &GadgetDigraph, op: &O, bound: usize) -> Result<OperationTable> {
    let n = d.vertex_count();
    let size = power(n, op.arity());
    if size > bound as u128 {
        bail!("table with {size} rows exceeds --max-size {bound}");
    }
    Ok(OperationTable::from_fn(n, op.arity(), |args| {
        op.apply(args)
    }))
}

fn describe_lift<O: Operation>(
    cli: &Cli,
    d: &GadgetDigraph,
    ops: &BTreeMap<String, O>,
    system: &IdentitySystem,
    verify: bool,
    verify_limit: u64,
) -> Result<Report> {
    let mut text = format!(
        "gadget: {} vertices, {} edges\n",
        d.vertex_count(),
        d.digraph().edge_count()
    );
    let mut failed = false;
    let mut file = None;
    if verify {
        for (symbol, op) in ops {
            let check = verify_polymorphism(d, op, verify_limit, cli.seed);
            failed |= !check.passed();
            text.push_str(&format!("polymorphism {symbol}: {check}\n"));
        }
        match verify_identities(d, ops, system) {
            Ok(()) => text.push_str("identities: hold\n"),
            Err(e) => {
                failed = true;
                text.push_str(&format!("identities: {e}\n"));
            }
        }
    }
    if cli.format == Some(Format::Table) {
        let names = d.digraph().vertices().to_vec();
        let mut tables = String::new();
        for (symbol, op) in ops {
            let table = lifted_table(d, op, cli.max_size)?;
            tables.push_str(&format!("{symbol} {}", table_to_json(&table, &names)));
        }
        if cli.output.is_none() {
            text.push_str(&tables);
        } else {
            file = Some(tables);
        }
    }
    Ok(Report {
        text,
        file,
        negative: failed,
    })
}

fn coverage_lines(symbol: &str, coverage: &BTreeMap<&'static str, u64>) -> String {
    let cases: Vec<String> = coverage.iter().map(|(c, n)| format!("{c}={n}")).collect();
    format!("cases {symbol}: {}\n", cases.join(" "))
}

fn cmd_lift(
    cli: &Cli,
    input: &Path,
    request: &Request,
    verify: bool,
    verify_limit: u64,
    order: Order,
) -> Result<Report> {
    let a = single_relation_template(input)?;
    let d = gadget(&a, cli)?;
    let solver = Solver::new(cli.budget);
    match request.resolve()? {
        Requested::Wnu(m) => {
            let Some(omega) = find_wnu(&a, m, &solver, cli.max_size)? else {
                return Ok(Report::no("none\n"));
            };
            let lifted = lift_wnu(&d, &omega)?;
            let ops = BTreeMap::from([("w".to_string(), lifted)]);
            let system = csp_digraph::algebra::identities::wnu(m);
            let mut report = describe_lift(cli, &d, &ops, &system, verify, verify_limit)?;
            report
                .text
                .push_str(&coverage_lines("w", &ops["w"].coverage()));
            Ok(report)
        }
        Requested::System(system) => {
            let policy = match order {
                Order::ElementMajor => EpsilonOrder::ElementMajor,
                Order::TupleMajor => EpsilonOrder::TupleMajor,
            };
            let ops = match lift_general_auto(&d, &system, &solver, cli.max_size, policy) {
                Ok(ops) => ops,
                Err(
                    e @ (LiftError::NoTemplateInterpretation | LiftError::NoZigzagInterpretation),
                ) => return Ok(Report::no(format!("none ({e})\n"))),
                Err(e) => return Err(e.into()),
            };
            let mut report = describe_lift(cli, &d, &ops, &system, verify, verify_limit)?;
            for (symbol, op) in &ops {
                report
                    .text
                    .push_str(&coverage_lines(symbol, &op.coverage()));
            }
            Ok(report)
        }
        Requested::Nothing => bail!("lift needs --wnu, --identities or --library"),
    }
}

fn cmd_selftest(cli: &Cli, criterion: Option<u8>, timings: bool) -> Result<Report> {
    let reports = match criterion {
        Some(id) => {
            if !(1..=10).contains(&id) {
                bail!("criteria are numbered 1 to 10");
            }
            vec![run_criterion(id, cli.seed)]
        }
        None => run_all(cli.seed),
    };
    let mut text = String::new();
    for r in &reports {
        if timings {
            text.push_str(&format!("{r}\n"));
        } else {
            text.push_str(&format!("{}\n", r.summary()));
        }
    }
    Ok(if reports.iter().all(|r| r.passed()) {
        Report::yes(text)
    } else {
        Report::no(text)
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Build { input, sidecar } => cmd_build(cli, input, sidecar.as_deref()),
        Command::Forward { template, input } => cmd_forward(cli, template, input),
        Command::Backward {
            template,
            input,
            from_stage3a,
        } => cmd_backward(
            cli,
            template.as_deref(),
            input.as_deref(),
            from_stage3a.as_deref(),
        ),
        Command::Solve { template, input } => cmd_solve(cli, template, input),
        Command::Poly { input, request } => cmd_poly(cli, input, request),
        Command::Core { input } => cmd_core(cli, input),
        Command::Lift {
            input,
            request,
            verify,
            verify_limit,
            order,
        } => cmd_lift(cli, input, request, *verify, *verify_limit, *order),
        Command::Selftest { criterion, timings } => cmd_selftest(cli, *criterion, *timings),
    }
}

fn budget_exhausted(err: &anyhow::Error) -> bool {
    use SolveError::BudgetExhausted;
    err.chain().any(|e| {
        matches!(e.downcast_ref::<SolveError>(), Some(BudgetExhausted(_)))
            || matches!(
                e.downcast_ref::<AlgebraError>(),
                Some(AlgebraError::Solve(BudgetExhausted(_)))
            )
            || matches!(
                e.downcast_ref::<LiftError>(),
                Some(LiftError::Algebra(AlgebraError::Solve(BudgetExhausted(_))))
            )
            || matches!(
                e.downcast_ref::<ReductionError>(),
                Some(ReductionError::Solve(BudgetExhausted(_)))
            )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|report| {
        match (&cli.output, report.file) {
            (Some(path), Some(body)) => {
                write(path, &body)?;
                print!("{}", report.text);
            }
            (Some(path), None) => write(path, &report.text)?,
            (None, _) => print!("{}", report.text),
        }
        Ok(report.negative)
    });
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_NO),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if budget_exhausted(&err) {
                EXIT_BUDGET
            } else {
                EXIT_USAGE
            })
        }
    }
}
