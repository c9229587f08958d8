use clap::{Args, Parser, Subcommand, ValueEnum};
use mcontrol::control::{count_action_space, legal_actions};
use mcontrol::formula::{qbf_eval, Formula, Shape};
use mcontrol::oracle::{enumerate_profiles, solve_oracle, DEFAULT_BUDGET};
use mcontrol::reductions::{
    embed_manipulation, has_partition, manipulation_answer, pad_zero_manipulators, partition_to_borda_ccav_mf,
    qbf2_to_ccpv, qbf2_to_nonpartition, qbf3_to_ccpv_tp_mf_revoting, Manipulation, PartitionInstance,
};
use mcontrol::solvers::{base_control, lookup, solve_direct};
use mcontrol::{ControlType, Error, Instance, Mode, Rule, Tie};
use mcontrol_cli::campaign::{run_campaign, CampaignConfig};
use mcontrol_cli::doc::{parse_instance, serialize_instance};
use mcontrol_cli::report::{action_json, direct_json, oracle_json, to_text};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "mcontrol", version, about = "Election control with manipulators: solve, reduce, fuzz")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide an instance file.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
    /// Build an instance file from a source problem.
    Reduce {
        #[command(subcommand)]
        kind: ReduceKind,
        /// Write the instance here instead of standard output.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Compare direct solvers against the oracle.
    Fuzz(FuzzArgs),
    /// List the legal actions and count the manipulator profiles of an instance.
    Enumerate {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = parse_budget, default_value = "2000000000")]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Oracle,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum ReduceKind {
    /// Two-block formula to one of the eight add/delete control types.
    Qbf2Nonpartition {
        #[arg(value_name = "TYPE")]
        ctype: String,
        mode: String,
        formula: String,
        /// Block widths; by default the variables split evenly.
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<usize>>,
    },
    /// Two-block formula to constructive partition of voters.
    Qbf2Ccpv {
        tie: String,
        mode: String,
        formula: String,
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<usize>>,
    },
    /// Three-block formula to CCPV-TP, manipulators first, with revoting.
    Qbf3Revoting {
        formula: String,
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<usize>>,
    },
    /// Partition weights to weighted Borda CCAV, manipulators first.
    PartitionBorda {
        #[arg(required = true)]
        weights: Vec<u64>,
    },
    /// Manipulator-free control instance under a move order.
    InheritControl { path: PathBuf, mode: String },
    /// Manipulation question (an instance file's voters, p and goal) under a control type.
    InheritManip {
        path: PathBuf,
        #[arg(value_name = "TYPE")]
        ctype: String,
        mode: String,
    },
}

#[derive(Args)]
struct FuzzArgs {
    /// Comma-separated rule ids; default is every rule with a direct solver.
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    types: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    #[arg(long, default_value = "c=3,v=4,m=2,w=1")]
    bounds: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled instances per case.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Enumerate every instance within the bounds instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 100)]
    max_reported: usize,
    /// Negate every direct answer.
    #[arg(long, hide = true)]
    inject_fault: bool,
    /// Write each reported mismatch as an instance file in this directory.
    #[arg(long)]
    save_mismatches: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn parse_budget(s: &str) -> Result<u128, String> {
    s.parse::<u128>()
        .or_else(|_| match s.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.is_finite() => Ok(x as u128),
            _ => Err(()),
        })
        .map_err(|_| format!("bad budget {s:?}"))
}

type CmdResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve { path, method, common } => solve(&path, method, &common),
        Cmd::Reduce { kind, out } => reduce(kind, out.as_deref()),
        Cmd::Fuzz(args) => fuzz(&args),
        Cmd::Enumerate { path, common } => enumerate(&path, &common),
    };
    match res {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).unwrap()),
        Format::Text => print!("{}", to_text(v)),
    }
}

fn answer_code(answer: bool) -> ExitCode {
    ExitCode::from(if answer { 0 } else { 1 })
}

fn solve(path: &Path, method: Method, common: &Common) -> CmdResult {
    let inst = load(path)?;
    let mut out = serde_json::Map::new();
    out.insert("format_version".into(), json!(mcontrol_cli::doc::FORMAT_VERSION));
    out.insert("system".into(), json!(inst.rule.id()));
    out.insert("control".into(), json!(inst.ctype.code()));
    out.insert("mode".into(), json!(inst.scenario.mode.id()));
    out.insert("revoting".into(), json!(inst.scenario.revoting));
    out.insert("registry".into(), json!(lookup(inst.rule, inst.ctype, inst.scenario).id()));
    let mut timings = serde_json::Map::new();

    let direct = if method != Method::Oracle {
        let t = Instant::now();
        let d = solve_direct(&inst);
        timings.insert("direct_ms".into(), json!(t.elapsed().as_secs_f64() * 1e3));
        match d {
            Ok(d) => {
                out.insert("direct".into(), direct_json(&inst, &d));
                Some(d.answer)
            }
            Err(e) if method == Method::Direct => return Err(e.to_string()),
            Err(e) => {
                out.insert("direct".into(), json!({ "error": e.to_string() }));
                None
            }
        }
    } else {
        None
    };
    let oracle = if method != Method::Direct {
        let t = Instant::now();
        let o = solve_oracle(&inst, common.budget).map_err(|e| e.to_string())?;
        timings.insert("oracle_ms".into(), json!(t.elapsed().as_secs_f64() * 1e3));
        out.insert("oracle".into(), oracle_json(&inst, &o));
        Some(o.answer)
    } else {
        None
    };
    if method == Method::Both {
        out.insert("agreement".into(), json!(direct.map(|d| Some(d) == oracle)));
    }
    let answer = oracle.or(direct).expect("some method ran");
    out.insert("answer".into(), json!(answer));
    if !common.no_timings {
        out.insert("timings".into(), Value::Object(timings));
    }
    emit(&Value::Object(out), common.format);
    if method == Method::Both && direct.is_some_and(|d| Some(d) != oracle) {
        eprintln!("error: direct solver and oracle disagree");
        return Ok(ExitCode::from(2));
    }
    Ok(answer_code(answer))
}

fn even_widths(formula: &Formula, blocks: usize) -> Vec<usize> {
    let n = formula.max_var() as usize;
    (0..blocks).map(|b| n / blocks + usize::from(b < n % blocks)).collect()
}

fn mode_arg(s: &str) -> Result<Mode, String> {
    Mode::parse(s).map_err(|e| e.to_string())
}

fn reduce(kind: ReduceKind, out: Option<&Path>) -> CmdResult {
    let err = |e: Error| e.to_string();
    let shape = |mode: Mode| if mode == Mode::MF { Shape::AE } else { Shape::EA };
    let (inst, source) = match kind {
        ReduceKind::Qbf2Nonpartition { ctype, mode, formula, widths } => {
            let f = Formula::parse(&formula).map_err(err)?;
            let ctype = ControlType::parse(&ctype).map_err(err)?;
            let mode = mode_arg(&mode)?;
            let widths = widths.unwrap_or_else(|| even_widths(&f, 2));
            let inst = qbf2_to_nonpartition(&f, &widths, ctype, mode).map_err(err)?;
            (inst, qbf_eval(&f, shape(mode), &widths).ok())
        }
        ReduceKind::Qbf2Ccpv { tie, mode, formula, widths } => {
            let f = Formula::parse(&formula).map_err(err)?;
            let tie = match tie.as_str() {
                "TE" => Tie::TE,
                "TP" => Tie::TP,
                t => return Err(format!("unknown tie rule {t:?}, expected TE or TP")),
            };
            let mode = mode_arg(&mode)?;
            let widths = widths.unwrap_or_else(|| even_widths(&f, 2));
            let inst = qbf2_to_ccpv(&f, &widths, tie, mode).map_err(err)?;
            (inst, qbf_eval(&f, shape(mode), &widths).ok())
        }
        ReduceKind::Qbf3Revoting { formula, widths } => {
            let f = Formula::parse(&formula).map_err(err)?;
            let widths = widths.unwrap_or_else(|| even_widths(&f, 3));
            let inst = qbf3_to_ccpv_tp_mf_revoting(&f, &widths).map_err(err)?;
            (inst, qbf_eval(&f, Shape::AEA, &widths).ok())
        }
        ReduceKind::PartitionBorda { weights } => {
            let src = PartitionInstance::new(weights).map_err(err)?;
            let inst = partition_to_borda_ccav_mf(&src).map_err(err)?;
            let truth = has_partition(&src).ok();
            eprintln!("source: partition exists = {}", show(truth));
            eprintln!("expected answer: {}", show(truth.map(|t| !t)));
            return write_instance(&inst, out);
        }
        ReduceKind::InheritControl { path, mode } => {
            let src = load(&path)?;
            let inst = pad_zero_manipulators(&src, mode_arg(&mode)?).map_err(err)?;
            let truth = base_control(&src).ok().map(|d| d.answer);
            (inst, truth)
        }
        ReduceKind::InheritManip { path, ctype, mode } => {
            let src = load(&path)?;
            let m = Manipulation {
                rule: src.rule,
                names: src.names.clone(),
                p: src.p,
                goal: src.goal(),
                voters: src.voters.iter().filter(|v| v.registered).cloned().collect(),
            };
            let ctype = ControlType::parse(&ctype).map_err(err)?;
            let (inst, complement) = embed_manipulation(&m, ctype, mode_arg(&mode)?).map_err(err)?;
            let truth = manipulation_answer(&m).ok();
            eprintln!("source: manipulation possible = {}", show(truth));
            eprintln!("complement: {complement}");
            eprintln!("expected answer: {}", show(truth.map(|t| t != complement)));
            return write_instance(&inst, out);
        }
    };
    eprintln!("source: {}", show(source));
    write_instance(&inst, out)
}

fn show(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

fn write_instance(inst: &Instance, out: Option<&Path>) -> CmdResult {
    let text = serialize_instance(inst) + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_list<T>(list: &Option<Vec<String>>, all: Vec<T>, parse: impl Fn(&str) -> mcontrol::Result<T>) -> Result<Vec<T>, String> {
    match list {
        None => Ok(all),
        Some(items) => items.iter().map(|s| parse(s.trim()).map_err(|e| e.to_string())).collect(),
    }
}

fn fuzz(args: &FuzzArgs) -> CmdResult {
    let standard = vec![Rule::Plurality, Rule::Approval, Rule::Veto, Rule::Borda, Rule::Condorcet];
    let cfg = CampaignConfig {
        rules: parse_list(&args.rules, standard, Rule::parse)?,
        types: parse_list(&args.types, ControlType::ALL.to_vec(), ControlType::parse)?,
        modes: parse_list(&args.modes, Mode::ALL.to_vec(), Mode::parse)?,
        bounds: args.bounds.parse().map_err(|e: Error| e.to_string())?,
        seed: args.seed,
        count: args.count,
        exhaustive: args.exhaustive,
        budget: args.common.budget,
        max_reported: args.max_reported,
        inject_fault: args.inject_fault,
    };
    let mut report = run_campaign(&cfg);
    if args.common.no_timings {
        report = report.without_timings();
    }
    if let Some(dir) = &args.save_mismatches {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        for (i, m) in report.mismatches.iter().enumerate() {
            let p = dir.join(format!("mismatch-{i:04}-{}-{}-{}.json", m.rule, m.ctype, m.mode.replace('+', "plus")));
            let text = serde_json::to_string_pretty(&m.instance).unwrap() + "\n";
            std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))?;
        }
    }
    match args.common.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(ExitCode::from(if report.total_mismatches > 0 {
        1
    } else if report.incomplete {
        2
    } else {
        0
    }))
}

fn enumerate(path: &Path, common: &Common) -> CmdResult {
    let inst = load(path)?;
    let n = count_action_space(&inst);
    if n > common.budget {
        return Err(Error::Budget { states: n, budget: common.budget }.to_string());
    }
    let actions: Vec<Value> = legal_actions(&inst).iter().map(|a| action_json(&inst, a)).collect();
    let profiles = enumerate_profiles(&inst, common.budget.max(DEFAULT_BUDGET)).map(|p| p.len());
    let v = json!({
        "format_version": mcontrol_cli::doc::FORMAT_VERSION,
        "action_count": n.to_string(),
        "profile_count": profiles.map(|p| p.to_string()).unwrap_or_else(|_| "over budget".into()),
        "actions": actions,
    });
    match common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&v).unwrap()),
        Format::Text => {
            println!("action_count: {n}");
            println!("profile_count: {}", v["profile_count"].as_str().unwrap());
            for a in &actions {
                println!("{a}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
