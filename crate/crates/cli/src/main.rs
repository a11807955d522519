//! Command-line front end: parse system files, dispatch to the kernel, and
//! emit human-readable or JSON reports.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use subsym_core::conservation::{self, ConsLaw};
use subsym_core::corpus;
use subsym_core::decoupling;
use subsym_core::error::Error;
use subsym_core::expr::Expr;
use subsym_core::fields::{EvoField, PointField};
use subsym_core::invariance::{self, Classification, RestrictionMode};
use subsym_core::jet::JetContext;
use subsym_core::systems::SubSystem;
use subsym_core::sysfile::{self, SystemFile};

#[derive(Parser)]
#[command(
    name = "subsym",
    version,
    about = "Symbolic analysis of differential systems: invariance, decoupling, conservation laws"
)]
struct Cli {
    /// Write the report as JSON to a path, or `-` for stdout.
    #[arg(long, global = true)]
    json: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a field is a symmetry of the full system.
    CheckSym(CheckArgs),
    /// Check the sub-symmetry condition on a sub-system.
    CheckSubsym(CheckSubArgs),
    /// Classify a field against a sub-system.
    Classify(CheckSubArgs),
    /// Generate determining equations for a field template.
    Determine(DetermineArgs),
    /// Decoupledness tests and the transform pipeline.
    Decouple(DecoupleArgs),
    /// Verify fluxes as a conservation law.
    VerifyCl(VerifyClArgs),
    /// Deform a conservation law along a sub-symmetry field.
    Deform(DeformArgs),
    /// Solve the inverse deformation problem in closed form.
    InverseDeform(InverseDeformArgs),
    /// Truncated flow of a field on an explicit solution.
    Flow(FlowArgs),
    /// List, show, or re-verify the built-in systems.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct SystemArg {
    /// `corpus:<id>` or a path to a system-definition file.
    #[arg(long)]
    system: String,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Named field from the file, or inline `evo(...)` / `point(...)`.
    #[arg(long)]
    field: String,
}

#[derive(Args)]
struct CheckSubArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long)]
    field: String,
    /// Named sub-system, or an inline multiplier row like
    /// `v*D2 - sin(u)*D1` (operator prefixes: `Dt(D1)`).
    #[arg(long)]
    sub: String,
    /// Check invariance on the sub-system's own solutions only.
    #[arg(long)]
    own_solutions: bool,
}

#[derive(Args)]
struct DetermineArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long)]
    sub: String,
    /// Field template mentioning the unknowns, e.g. `evo(al(x,t,u))`.
    #[arg(long)]
    template: String,
    /// Unknown function declaration `name:arg1,arg2,...`; repeatable.
    #[arg(long = "unknown")]
    unknowns: Vec<String>,
    /// Arbitrary function declaration (splitting hierarchy); repeatable.
    #[arg(long = "arbitrary")]
    arbitrary: Vec<String>,
    /// Restriction mode: `full` (default) or `sub`.
    #[arg(long, default_value = "full")]
    restrict: String,
}

#[derive(Args)]
struct DecoupleArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Sub-system to test (named or inline); default `D1`.
    #[arg(long, default_value = "D1")]
    sub: String,
    /// The free variable.
    #[arg(long)]
    free: String,
    /// Optional nonzero factor applied before the derivative test.
    #[arg(long)]
    factor: Option<String>,
    /// Named point map for the transform pipeline.
    #[arg(long)]
    map: Option<String>,
    /// Recombination matrix rows `a,b;c,d` (required with --map).
    #[arg(long)]
    combine: Option<String>,
    /// Leading jets of the recombined system, comma-separated.
    #[arg(long)]
    combined_leads: Option<String>,
    /// Leading jets of the transformed system, comma-separated.
    #[arg(long)]
    barred_leads: Option<String>,
}

#[derive(Args)]
struct VerifyClArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Named conservation law from the file.
    #[arg(long)]
    cl: Option<String>,
    /// Inline fluxes, comma-separated, in `[vars]` order.
    #[arg(long)]
    fluxes: Option<String>,
    /// Inline exact multipliers, comma-separated.
    #[arg(long)]
    multipliers: Option<String>,
}

#[derive(Args)]
struct DeformArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long)]
    cl: String,
    #[arg(long)]
    field: String,
}

#[derive(Args)]
struct InverseDeformArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Source law (fluxes of the base variables only).
    #[arg(long)]
    source: String,
    /// Target law name, or inline fluxes.
    #[arg(long)]
    target: String,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long)]
    field: String,
    /// Explicit solution, `u=expr;v=expr`.
    #[arg(long)]
    u0: String,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value = "eps")]
    eps: String,
}

#[derive(Args)]
struct CorpusArgs {
    #[command(subcommand)]
    action: CorpusAction,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List the built-in system ids.
    List,
    /// Print a built-in system definition.
    Show { id: String },
    /// Re-verify the stored verdicts of one id or of the whole corpus.
    Verify { id: Option<String> },
}

/// Machine-readable report; the schema is versioned.
#[derive(Serialize, Default)]
struct Report {
    schema_version: u32,
    command: String,
    inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    residuals: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    gamma: Vec<GammaEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    side_conditions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<Classification>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    fluxes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    characteristic: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trivial: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    field: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    equations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    lines: Vec<String>,
    timing_ms: u128,
    exit_code: u8,
}

#[derive(Serialize)]
struct Verdict {
    name: String,
    holds: bool,
}

#[derive(Serialize)]
struct GammaEntry {
    member: usize,
    equation: usize,
    index: String,
    coefficient: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = Report { schema_version: 1, ..Default::default() };
    let outcome = run(&cli, &mut report);
    report.timing_ms = start.elapsed().as_millis();
    report.exit_code = match &outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => classify_error(e),
    };
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    emit(&cli, &report);
    ExitCode::from(report.exit_code)
}

fn classify_error(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidFile(_) | Error::UnknownSymbol(_) | Error::UnknownId(_) => 3,
        _ => 1,
    }
}

fn emit(cli: &Cli, report: &Report) {
    match cli.json.as_deref() {
        Some("-") => {
            println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
        }
        Some(path) => {
            let body = serde_json::to_string_pretty(report).expect("report serializes");
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {path}: {e}");
            }
        }
        None => {
            for line in &report.lines {
                println!("{line}");
            }
        }
    }
}

fn run(cli: &Cli, report: &mut Report) -> Result<bool, Error> {
    match &cli.command {
        Command::CheckSym(args) => {
            report.command = "check-sym".into();
            let sf = load_system(&args.system.system, report)?;
            report.inputs.insert("field".into(), args.field.clone());
            let f = resolve_field(&sf, &args.field)?;
            let rep = invariance::check_symmetry(&f, &sf.system)?;
            fill_invariance(report, &rep, &args.field);
            Ok(rep.holds)
        }
        Command::CheckSubsym(args) => {
            report.command = if args.own_solutions {
                "check-subsystem-sym".into()
            } else {
                "check-subsym".into()
            };
            let sf = load_system(&args.system.system, report)?;
            report.inputs.insert("field".into(), args.field.clone());
            report.inputs.insert("sub".into(), args.sub.clone());
            let f = resolve_field(&sf, &args.field)?;
            let ss = resolve_subsystem(&sf, &args.sub)?;
            let rep = if args.own_solutions {
                invariance::check_subsystem_symmetry(&f, &ss)?
            } else {
                invariance::check_subsymmetry(&f, &ss)?
            };
            fill_invariance(report, &rep, &args.field);
            Ok(rep.holds)
        }
        Command::Classify(args) => {
            report.command = "classify".into();
            let sf = load_system(&args.system.system, report)?;
            let f = resolve_field(&sf, &args.field)?;
            let ss = resolve_subsystem(&sf, &args.sub)?;
            let tag = invariance::classify(&f, &ss)?;
            report.classification = Some(tag);
            report.lines.push(format!("{}: {tag:?}", args.field));
            Ok(true)
        }
        Command::Determine(args) => {
            report.command = "determine".into();
            let sf = load_system(&args.system.system, report)?;
            let (ctx, system) = extend_with_unknowns(&sf, &args.unknowns, &args.arbitrary)?;
            let mut unknowns = Vec::new();
            for (decl, arbitrary) in args
                .unknowns
                .iter()
                .map(|d| (d, false))
                .chain(args.arbitrary.iter().map(|d| (d, true)))
            {
                unknowns.push(parse_unknown(decl, &ctx, arbitrary)?);
            }
            let field = parse_inline_field(&args.template, &ctx)?;
            let row = sysfile::parse_multiplier_row(&args.sub, ctx.as_ref(), system.len())?;
            let ss = SubSystem::new(system, vec![row])?;
            let mode = match args.restrict.as_str() {
                "full" => RestrictionMode::FullSystem,
                "sub" => RestrictionMode::SubSystemOnly,
                other => {
                    return Err(Error::InvalidFile(format!("unknown restriction mode `{other}`")))
                }
            };
            let ansatz = invariance::FieldAnsatz { field, unknowns };
            let ds = invariance::determining_equations(&ansatz, &ss, mode)?;
            report.equations = ds.equations.iter().map(|e| e.to_string()).collect();
            report.side_conditions = ds.side_conditions.iter().map(|e| e.to_string()).collect();
            if ds.equations.is_empty() {
                report.lines.push("determining system is empty (identically satisfied)".into());
            } else {
                report.lines.push(format!("{} determining equation(s):", ds.equations.len()));
                for e in &ds.equations {
                    report.lines.push(format!("  {e} = 0"));
                }
            }
            Ok(true)
        }
        Command::Decouple(args) => {
            report.command = "decouple".into();
            let sf = load_system(&args.system.system, report)?;
            report.inputs.insert("free".into(), args.free.clone());
            match (&args.map, &args.combine) {
                (Some(map_name), Some(combine)) => {
                    let map = sf.map(map_name)?;
                    let combo = parse_matrix(combine, sf.ctx.as_ref())?;
                    let combined_leads =
                        parse_leads(args.combined_leads.as_deref(), sf.ctx.as_ref(), combo.len())?;
                    let barred_leads = parse_leads(
                        args.barred_leads.as_deref(),
                        map.barred_ctx().as_ref(),
                        combo.len(),
                    )?;
                    let out = decoupling::decouple_pipeline(
                        &sf.system,
                        &combo,
                        combined_leads,
                        map,
                        barred_leads,
                        &args.free,
                    )?;
                    report.equations =
                        out.transformed.equations().iter().map(|e| e.to_string()).collect();
                    report.lines.push(format!(
                        "decoupled in `{}` after map `{map_name}`; transformed system:",
                        args.free
                    ));
                    for e in out.transformed.equations() {
                        report.lines.push(format!("  {e} = 0"));
                    }
                    Ok(true)
                }
                (None, None) => {
                    let ss = resolve_subsystem(&sf, &args.sub)?;
                    let factor = match &args.factor {
                        Some(t) => Some(Expr::parse(t, sf.ctx.as_ref())?),
                        None => None,
                    };
                    match decoupling::is_decoupled(&ss, &args.free, factor.as_ref())? {
                        Some(c) => {
                            report.lines.push(format!("decoupled in `{}`:", args.free));
                            for m in &c.members {
                                report.lines.push(format!("  {m} = 0"));
                            }
                            report.verdicts.push(Verdict { name: "decoupled".into(), holds: true });
                            Ok(true)
                        }
                        None => {
                            report.verdicts.push(Verdict { name: "decoupled".into(), holds: false });
                            report.lines.push(format!("not decoupled in `{}`", args.free));
                            Ok(false)
                        }
                    }
                }
                _ => Err(Error::InvalidFile("--map and --combine go together".into())),
            }
        }
        Command::VerifyCl(args) => {
            report.command = "verify-cl".into();
            let sf = load_system(&args.system.system, report)?;
            let cl = resolve_conslaw(&sf, &args.cl, &args.fluxes, &args.multipliers)?;
            fill_conslaw(report, &cl)?;
            Ok(true)
        }
        Command::Deform(args) => {
            report.command = "deform".into();
            let sf = load_system(&args.system.system, report)?;
            let cl = sf.conslaw(&args.cl)?;
            let f = resolve_field(&sf, &args.field)?;
            let deformed = conservation::deform(&f, &cl)?;
            fill_conslaw(report, &deformed)?;
            Ok(true)
        }
        Command::InverseDeform(args) => {
            report.command = "inverse-deform".into();
            let sf = load_system(&args.system.system, report)?;
            let source = sf.conslaw(&args.source)?;
            let target_fluxes = match sf.conslaws.get(&args.target) {
                Some(def) => def.fluxes.clone(),
                None => parse_expr_list(&args.target, sf.ctx.as_ref())?,
            };
            let field = conservation::inverse_deform(&source, &target_fluxes)?;
            report.field = field.characteristics().iter().map(|c| c.to_string()).collect();
            report
                .lines
                .push(format!("field characteristics: ({})", report.field.join(", ")));
            Ok(true)
        }
        Command::Flow(args) => {
            report.command = "flow".into();
            let sf = load_system(&args.system.system, report)?;
            let f = resolve_field(&sf, &args.field)?;
            let mut u0 = BTreeMap::new();
            for item in args.u0.split(';') {
                let (name, body) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidFile("u0 entries look like u=expr".into()))?;
                u0.insert(name.trim().to_string(), Expr::parse(body.trim(), sf.ctx.as_ref())?);
            }
            let flow = f.flow_truncated(&u0, args.order, &args.eps)?;
            for dep in sf.ctx.dependent() {
                if let Some(e) = flow.as_expr(dep) {
                    report.lines.push(format!("{dep} -> {e}"));
                    report.equations.push(e.to_string());
                }
            }
            Ok(true)
        }
        Command::Corpus(args) => match &args.action {
            CorpusAction::List => {
                report.command = "corpus-list".into();
                for id in corpus::ids() {
                    report.lines.push(id.to_string());
                }
                Ok(true)
            }
            CorpusAction::Show { id } => {
                report.command = "corpus-show".into();
                report.lines.push(corpus::source(id)?.to_string());
                Ok(true)
            }
            CorpusAction::Verify { id } => {
                report.command = "corpus-verify".into();
                let ids: Vec<&str> = match id {
                    Some(one) => vec![one.as_str()],
                    None => corpus::ids(),
                };
                let mut ok = true;
                for id in ids {
                    let sf = corpus::load(id)?;
                    for exp in &sf.expectations {
                        let good = corpus::verify_expectation(&sf, exp).is_ok();
                        ok &= good;
                        report.verdicts.push(Verdict { name: format!("{id}: {exp:?}"), holds: good });
                        report
                            .lines
                            .push(format!("{} {id}: {exp:?}", if good { "ok  " } else { "FAIL" }));
                    }
                }
                Ok(ok)
            }
        },
    }
}

fn load_system(spec: &str, report: &mut Report) -> Result<SystemFile, Error> {
    report.inputs.insert("system".into(), spec.to_string());
    let text = if let Some(id) = spec.strip_prefix("corpus:") {
        corpus::source(id)?.to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| Error::InvalidFile(format!("cannot read {spec}: {e}")))?
    };
    report.inputs.insert("digest".into(), format!("fnv1a:{:016x}", fnv1a(text.as_bytes())));
    SystemFile::parse(&text)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn resolve_field(sf: &SystemFile, spec: &str) -> Result<EvoField, Error> {
    if spec.starts_with("evo(") || spec.starts_with("point(") {
        return parse_inline_field(spec, &sf.ctx);
    }
    sf.field(spec)
}

fn parse_inline_field(spec: &str, ctx: &Arc<JetContext>) -> Result<EvoField, Error> {
    if let Some(body) = spec.strip_prefix("evo(").and_then(|s| s.strip_suffix(')')) {
        let chars = parse_expr_list(body, ctx.as_ref())?;
        return EvoField::new(ctx.clone(), chars);
    }
    if let Some(body) = spec.strip_prefix("point(").and_then(|s| s.strip_suffix(')')) {
        let groups: Vec<&str> = body.split(';').collect();
        if groups.len() != 2 {
            return Err(Error::InvalidFile("point(xi...; eta...) needs two groups".into()));
        }
        let xi = parse_expr_list(groups[0], ctx.as_ref())?;
        let eta = parse_expr_list(groups[1], ctx.as_ref())?;
        return PointField::new(ctx.clone(), xi, eta)?.canonicalize();
    }
    Err(Error::InvalidFile(format!("cannot parse field `{spec}`")))
}

fn resolve_subsystem(sf: &SystemFile, spec: &str) -> Result<SubSystem, Error> {
    if let Ok(ss) = sf.subsystem(spec) {
        return Ok(ss);
    }
    let row = sysfile::parse_multiplier_row(spec, sf.ctx.as_ref(), sf.system.len())?;
    SubSystem::new(sf.system.clone(), vec![row])
}

fn resolve_conslaw(
    sf: &SystemFile,
    name: &Option<String>,
    fluxes: &Option<String>,
    multipliers: &Option<String>,
) -> Result<ConsLaw, Error> {
    match (name, fluxes) {
        (Some(n), None) => sf.conslaw(n),
        (None, Some(fx)) => {
            let fluxes = parse_expr_list(fx, sf.ctx.as_ref())?;
            let mult = match multipliers {
                Some(m) => Some(parse_expr_list(m, sf.ctx.as_ref())?),
                None => None,
            };
            conservation::verify_cl(&sf.system, &fluxes, mult)
        }
        _ => Err(Error::InvalidFile("give exactly one of --cl or --fluxes".into())),
    }
}

fn parse_expr_list(
    text: &str,
    ctx: &dyn subsym_core::expr::SymbolTable,
) -> Result<Vec<Expr>, Error> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '{' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | '}' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(Expr::parse(cur.trim(), ctx)?);
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(Expr::parse(cur.trim(), ctx)?);
    }
    Ok(out)
}

fn parse_matrix(text: &str, ctx: &JetContext) -> Result<Vec<Vec<Expr>>, Error> {
    text.split(';').map(|row| parse_expr_list(row, ctx)).collect()
}

fn parse_leads(spec: Option<&str>, ctx: &JetContext, n: usize) -> Result<Vec<Option<Expr>>, Error> {
    match spec {
        None => Ok(vec![None; n]),
        Some(s) => {
            let items = parse_expr_list(s, ctx)?;
            if items.len() != n {
                return Err(Error::InvalidFile(format!("expected {n} leads")));
            }
            Ok(items.into_iter().map(Some).collect())
        }
    }
}

fn parse_unknown(
    decl: &str,
    ctx: &Arc<JetContext>,
    arbitrary: bool,
) -> Result<invariance::UnknownFn, Error> {
    let (name, args) = decl
        .split_once(':')
        .ok_or_else(|| Error::InvalidFile("unknown declarations look like name:arg1,arg2".into()))?;
    let args = parse_expr_list(args, ctx.as_ref())?;
    Ok(invariance::UnknownFn { name: name.trim().to_string(), args, arbitrary })
}

/// Rebuild the context and system with extra opaque symbols for the declared
/// unknowns.
fn extend_with_unknowns(
    sf: &SystemFile,
    unknowns: &[String],
    arbitrary: &[String],
) -> Result<(Arc<JetContext>, subsym_core::systems::DiffSystem), Error> {
    let ctx = &sf.ctx;
    let mut builder = JetContext::builder()
        .independent(ctx.independent().iter().cloned())
        .dependent(ctx.dependent().iter().cloned())
        .params(ctx.params().iter().cloned())
        .max_order(ctx.max_order());
    for (n, a) in ctx.opaque_fns() {
        builder = builder.opaque(n, a);
    }
    for decl in unknowns.iter().chain(arbitrary.iter()) {
        let (name, args) = decl
            .split_once(':')
            .ok_or_else(|| Error::InvalidFile("unknown declarations look like name:args".into()))?;
        builder = builder.opaque(name.trim(), args.split(',').count());
    }
    let new_ctx = Arc::new(builder.build()?);
    let system = subsym_core::systems::DiffSystem::new(
        new_ctx.clone(),
        sf.system.equations().to_vec(),
        sf.system.leads().iter().map(|l| Some(l.clone())).collect(),
    )?;
    Ok((new_ctx, system))
}

fn fill_invariance(report: &mut Report, rep: &invariance::InvarianceReport, field: &str) {
    report.verdicts.push(Verdict { name: field.to_string(), holds: rep.holds });
    report.residuals = rep.residuals.iter().map(|r| r.to_string()).collect();
    report.side_conditions = rep.side_conditions.iter().map(|e| e.to_string()).collect();
    for (member, gamma) in rep.gamma.iter().enumerate() {
        for ((eq, index), coeff) in gamma {
            report.gamma.push(GammaEntry {
                member,
                equation: eq + 1,
                index: index.to_string(),
                coefficient: coeff.to_string(),
            });
        }
    }
    report.lines.push(format!("{field}: {}", if rep.holds { "holds" } else { "fails" }));
    for (i, r) in rep.residuals.iter().enumerate() {
        if !r.is_zero() {
            report.lines.push(format!("  residual[{i}] = {r}"));
        }
    }
    for sc in &rep.side_conditions {
        report.lines.push(format!("  side condition: {sc} != 0"));
    }
}

fn fill_conslaw(report: &mut Report, cl: &ConsLaw) -> Result<(), Error> {
    report.fluxes = cl.fluxes().iter().map(|f| f.to_string()).collect();
    report.characteristic = cl.characteristic().iter().map(|q| q.to_string()).collect();
    let trivial = cl.is_trivial()?;
    report.trivial = Some(trivial);
    report.lines.push(format!("fluxes: ({})", report.fluxes.join(", ")));
    report.lines.push(format!("characteristic: ({})", report.characteristic.join(", ")));
    report.lines.push(format!("trivial: {trivial}"));
    for ((eq, index), coeff) in cl.gamma() {
        report.gamma.push(GammaEntry {
            member: 0,
            equation: eq + 1,
            index: index.to_string(),
            coefficient: coeff.to_string(),
        });
    }
    Ok(())
}
