use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bpmn_twin::{
    bind, compare, describe_model, detect_issues, format_signed, monte_carlo_with, parse, parse_scenario,
    render_register, simulate_with, validate_with, BoundScenario, Collaboration, Diagnostic, IssueFinding, McReport,
    ProcessModel, RedesignReport, SimulationReport, TimeMode, VerbLexicon,
};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bpmn-twin", version, about = "Validate, simulate, describe and analyze BPMN process models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Check structural soundness and modeling guidelines.
    Validate {
        model: PathBuf,
        #[arg(long)]
        process: Option<String>,
        /// Verb list replacing the built-in one, one verb per line.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Best, worst and expected processing time.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        process: Option<String>,
        #[arg(long, value_name = "N")]
        monte_carlo: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Let parallel branches overlap instead of adding them up.
        #[arg(long)]
        cycle_time: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Natural-language description, one sentence per line.
    Describe {
        model: PathBuf,
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        annotate: bool,
    },
    /// Issue register of detected waste.
    Analyze {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare an as-is model with a to-be model.
    Diff {
        as_is: PathBuf,
        to_be: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Scenario for the second model; defaults to --scenario.
        #[arg(long)]
        scenario_b: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| usage_error(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Collaboration, Failure> {
    let report = parse(&read(path)?).map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
    for i in &report.ignored {
        eprintln!("note: ignored <{}>{}", i.name, i.id.as_deref().map(|id| format!(" `{id}`")).unwrap_or_default());
    }
    Ok(report.model)
}

fn pick(c: &Collaboration, wanted: Option<&str>) -> Result<ProcessModel, Failure> {
    if let Some(id) = wanted {
        return c.process(id).cloned().ok_or_else(|| usage_error(format!("no process with id `{id}`")));
    }
    let all: Vec<&ProcessModel> = c.processes().collect();
    match all.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(usage_error("the document contains no process")),
        many => Err(usage_error(format!(
            "several processes found ({}); choose one with --process",
            many.iter().map(|p| p.id()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn bound(path: &Path, model: &ProcessModel) -> Result<BoundScenario, Failure> {
    let s = parse_scenario(&read(path)?).map_err(|e| usage_error(format!("{}: {e}", path.display())))?;
    bind(&s, model).map_err(|e| failed(format!("{}: {e}", path.display())))
}

/// `key<TAB>value` with tabs, newlines and backslashes escaped.
fn record(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let v = value.to_string().replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n");
    let _ = writeln!(out, "{key}\t{v}");
}

fn mode_name(m: TimeMode) -> &'static str {
    match m {
        TimeMode::Processing => "processing",
        TimeMode::CycleTime => "cycle-time",
    }
}

fn simulation_text(out: &mut String, r: &SimulationReport) {
    let _ = writeln!(out, "mode: {}", mode_name(r.mode));
    let _ = writeln!(out, "best: {}", r.best);
    let _ = writeln!(out, "worst: {}", r.worst);
    let _ = writeln!(out, "expected: {}", r.expected);
    let _ = writeln!(out, "expected (exact seconds): {}", r.expected_exact);
    let _ = writeln!(out, "paths: {}", r.per_path.len());
    for (i, p) in r.per_path.iter().enumerate() {
        let _ = writeln!(out, "  path {}: p={} time={}", i + 1, p.probability.as_ratio(), p.duration);
    }
}

fn simulation_machine(out: &mut String, prefix: &str, r: &SimulationReport) {
    record(out, &format!("{prefix}mode"), mode_name(r.mode));
    record(out, &format!("{prefix}best_s"), r.best.secs());
    record(out, &format!("{prefix}worst_s"), r.worst.secs());
    record(out, &format!("{prefix}expected_s"), r.expected.secs());
    record(out, &format!("{prefix}expected_exact_s"), &r.expected_exact);
    record(out, &format!("{prefix}paths"), r.per_path.len());
    for (i, p) in r.per_path.iter().enumerate() {
        let k = format!("{prefix}path.{}", i + 1);
        record(out, &format!("{k}.probability"), p.probability.as_ratio());
        record(out, &format!("{k}.time_s"), p.duration.secs());
        record(out, &format!("{k}.nodes"), p.path.nodes.join(","));
    }
}

fn monte_carlo_out(out: &mut String, r: &McReport, format: Format) {
    match format {
        Format::Text => {
            let _ = writeln!(out, "monte carlo: n={} seed={}", r.n, r.seed);
            let _ = writeln!(out, "  mean: {:.3} s", r.mean);
            let _ = writeln!(out, "  stddev: {:.3} s", r.stddev);
            let _ = writeln!(out, "  min: {}", r.min);
            let _ = writeln!(out, "  max: {}", r.max);
        }
        Format::Machine => {
            record(out, "mc.n", r.n);
            record(out, "mc.seed", r.seed);
            record(out, "mc.mean_s", format!("{:.6}", r.mean));
            record(out, "mc.stddev_s", format!("{:.6}", r.stddev));
            record(out, "mc.min_s", r.min.secs());
            record(out, "mc.max_s", r.max.secs());
        }
    }
}

fn issues_machine(out: &mut String, prefix: &str, findings: &[IssueFinding]) {
    record(out, &format!("{prefix}issues"), findings.len());
    for (i, f) in findings.iter().enumerate() {
        let k = format!("{prefix}issue.{}", i + 1);
        record(out, &format!("{k}.id"), &f.id);
        record(out, &format!("{k}.title"), &f.title);
        record(out, &format!("{k}.category"), f.category);
        record(out, &format!("{k}.waste_group"), f.waste_group);
        record(out, &format!("{k}.subject"), &f.subject);
        record(out, &format!("{k}.description"), &f.description);
        record(out, &format!("{k}.data_and_assumptions"), &f.data_and_assumptions);
        record(out, &format!("{k}.qualitative_impact"), &f.qualitative_impact);
        record(out, &format!("{k}.quantitative_impact"), &f.quantitative_impact);
        if let Some(d) = f.duplication_factor {
            record(out, &format!("{k}.duplication_factor"), d);
        }
        record(out, &format!("{k}.elements"), f.elements.join(","));
    }
}

fn diff_out(out: &mut String, r: &RedesignReport, format: Format) {
    let (best, worst, expected) = r.deltas();
    match format {
        Format::Text => {
            let _ = writeln!(out, "tasks: {} -> {}", r.task_count_a, r.task_count_b);
            for t in &r.tasks_removed {
                let _ = writeln!(out, "  - {t}");
            }
            for t in &r.tasks_added {
                let _ = writeln!(out, "  + {t}");
            }
            let (a, b) = (&r.simulation_a, &r.simulation_b);
            let _ = writeln!(out, "best: {} ({} -> {})", format_signed(best), a.best, b.best);
            let _ = writeln!(out, "worst: {} ({} -> {})", format_signed(worst), a.worst, b.worst);
            let _ = writeln!(out, "expected: {} ({} -> {})", format_signed(expected), a.expected, b.expected);
            let _ = writeln!(out, "resolved issues: {}", r.resolved_issues.len());
            for f in &r.resolved_issues {
                let _ = writeln!(out, "  {}: {}", f.id, f.title);
            }
            if !r.heuristic_tags.is_empty() {
                let _ = writeln!(out, "heuristics: {}", r.heuristic_tags.join(", "));
            }
        }
        Format::Machine => {
            record(out, "tasks_a", r.task_count_a);
            record(out, "tasks_b", r.task_count_b);
            record(out, "removed", r.tasks_removed.len());
            for (i, t) in r.tasks_removed.iter().enumerate() {
                record(out, &format!("removed.{}", i + 1), t);
            }
            record(out, "added", r.tasks_added.len());
            for (i, t) in r.tasks_added.iter().enumerate() {
                record(out, &format!("added.{}", i + 1), t);
            }
            record(out, "delta.best_s", best);
            record(out, "delta.worst_s", worst);
            record(out, "delta.expected_s", expected);
            simulation_machine(out, "a.", &r.simulation_a);
            simulation_machine(out, "b.", &r.simulation_b);
            record(out, "resolved", r.resolved_issues.len());
            for (i, f) in r.resolved_issues.iter().enumerate() {
                record(out, &format!("resolved.{}", i + 1), format!("{}:{}", f.category, f.subject));
            }
            record(out, "heuristics", r.heuristic_tags.join(","));
        }
    }
}

fn warn_about(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{d}");
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let mut out = String::new();
    match cli.command {
        Command::Validate { model, process, lexicon } => {
            let m = pick(&load(&model)?, process.as_deref())?;
            let verbs = match lexicon {
                Some(p) => VerbLexicon::parse(&String::from_utf8_lossy(&read(&p)?)),
                None => VerbLexicon::default(),
            };
            let ds = validate_with(&m, &verbs);
            for d in &ds {
                let _ = writeln!(out, "{d}");
            }
            let errors = ds.iter().filter(|d| d.is_error()).count();
            let _ = writeln!(out, "{errors} error(s), {} warning(s)", ds.len() - errors);
            if errors > 0 {
                print!("{out}");
                return Err(failed(format!("{} is not sound", model.display())));
            }
        }
        Command::Simulate { model, scenario, process, monte_carlo, seed, cycle_time, format } => {
            let m = pick(&load(&model)?, process.as_deref())?;
            let b = bound(&scenario, &m)?;
            let mode = if cycle_time { TimeMode::CycleTime } else { TimeMode::Processing };
            let r = simulate_with(&m, &b, mode).map_err(|e| failed(e.to_string()))?;
            match format {
                Format::Text => {
                    let _ = writeln!(out, "process: {}", m.name());
                    let _ = writeln!(out, "scenario: {}", b.scenario_name);
                    simulation_text(&mut out, &r);
                }
                Format::Machine => {
                    record(&mut out, "process", m.id());
                    record(&mut out, "scenario", &b.scenario_name);
                    simulation_machine(&mut out, "", &r);
                }
            }
            if let Some(n) = monte_carlo {
                let mc = monte_carlo_with(&m, &b, n, seed, mode).map_err(|e| failed(e.to_string()))?;
                monte_carlo_out(&mut out, &mc, format);
            }
        }
        Command::Describe { model, process, annotate } => {
            let m = pick(&load(&model)?, process.as_deref())?;
            warn_about(&bpmn_twin::validate_structure(&m));
            let d = describe_model(&m).map_err(|e| failed(e.to_string()))?;
            out.push_str(&d.render(annotate));
        }
        Command::Analyze { model, format } => {
            let findings = detect_issues(&load(&model)?);
            match format {
                Format::Text => out.push_str(&render_register(&findings)),
                Format::Machine => issues_machine(&mut out, "", &findings),
            }
        }
        Command::Diff { as_is, to_be, scenario, scenario_b, format } => {
            let (ca, cb) = (load(&as_is)?, load(&to_be)?);
            let (ma, mb) = (pick(&ca, None)?, pick(&cb, None)?);
            let ba = bound(&scenario, &ma)?;
            let bb = bound(scenario_b.as_deref().unwrap_or(&scenario), &mb)?;
            let r = compare(&ca, &cb, &ba, &bb).map_err(|e| failed(e.to_string()))?;
            diff_out(&mut out, &r, format);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == 2 {
                eprintln!("{}", Cli::command().render_usage());
            }
            ExitCode::from(f.code)
        }
    }
}
