//! Command-line front end. Exit codes: 0 success, 1 bad input or I/O,
//! 2 property violation (unstable matching, failed check), 3 resource cap.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithm::{run_deferred_acceptance, ExecutionTrace};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::format::{
    parse_matching, parse_profile, parse_scenario, render_trace_records, render_trace_table,
    write_padding_map, write_profile, write_replication_map,
};
use crate::manipulation::{
    compare_outcomes, find_beneficial_lies, is_personally_optimal, rejecter_analysis, ChainEnd, Constraint,
    LieScenario, OutcomeReport, SearchLimits, DEFAULT_SEARCH_CAP,
};
use crate::profile::{Person, PreferenceProfile, Scenario, Side};
use crate::reductions::{pad_profile, replicate_women};
use crate::stability::is_stable;
use crate::verify::{monogamous_up_to_symmetry, run_property, CheckConfig, InstanceGenerator, PROPERTIES};

/// Environment variable overriding every search and enumeration cap.
pub const CAP_ENV: &str = "SML_MAX_SEARCH";

#[derive(Debug, Parser)]
#[command(name = "serenade", version, about = "Deferred-acceptance matching, traces, reductions and lie analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run deferred acceptance and print the night-by-night trace.
    Run {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = Proposing::Men)]
        proposing: Proposing,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Check a matching for blocking configurations.
    Stability(StabilityArgs),
    /// Transform a profile and write the sidecar map.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Search for and audit lies by women.
    #[command(subcommand)]
    Lies(Lies),
    /// Run a property check over exhaustive or seeded random instances.
    Verify(VerifyArgs),
    /// Built-in example instances.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Which run to show; both when omitted.
        #[arg(long, value_enum)]
        which: Option<Which>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct StabilityArgs {
    /// Profile file. Use `--scenario` instead to judge against a lie scenario.
    #[arg(long, required_unless_present = "scenario", conflicts_with = "scenario")]
    profile: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// With `--scenario`, judge by the declared lists instead of the truth.
    #[arg(long, requires = "scenario")]
    declared: bool,
    /// File with `pair w<k> m<k>` lines.
    #[arg(long)]
    matching: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Reduce {
    /// Split every woman into quota-one clones.
    Replicate(ReduceArgs),
    /// Add dummies until the profile is balanced without blacklists.
    Pad(ReduceArgs),
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long)]
    profile: PathBuf,
    /// Output profile file.
    #[arg(long)]
    out: PathBuf,
    /// Sidecar map file; defaults to the output path with `.map` appended.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Lies {
    /// Exhaustive search for beneficial lies, one line per resulting matching.
    Search {
        #[arg(long)]
        profile: PathBuf,
        /// Comma-separated liars, e.g. `w1,w2`.
        #[arg(long)]
        liars: String,
        #[arg(long, value_enum, default_value_t = ConstraintArg::NoLiarWorse)]
        constraint: ConstraintArg,
        #[arg(long)]
        allow_truncation: bool,
    },
    /// Outcomes, stability and rejecter certificate of one lie scenario.
    Audit {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(PROPERTIES))]
    property: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances to generate (ignored with `--exhaustive`).
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Roster sizes as `WxM`.
    #[arg(long, default_value = "3x3")]
    size: String,
    #[arg(long, default_value_t = 2)]
    max_liars: usize,
    /// Every monogamous instance of the given size, up to relabeling.
    #[arg(long)]
    exhaustive: bool,
    /// Scenario of generated instances; each property has its own default.
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long, default_value_t = 2)]
    max_quota: usize,
    /// Blacklist density for blacklist instances.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Only permutations, even in blacklist instances.
    #[arg(long)]
    no_truncation: bool,
    /// Write each kept violation here as a scenario file.
    #[arg(long)]
    bundle_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Proposing {
    Men,
    Women,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstraintArg {
    NoLiarWorse,
    AllWeaklyBetter,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Monogamous,
    Quota,
    Blacklist,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleName {
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "OA", alias = "oa")]
    Oa,
    #[value(name = "NA", alias = "na")]
    Na,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Violation,
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let mut buf = String::new();
    let result = dispatch(cli.command, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match result {
        Ok(Status::Ok) => 0,
        Ok(Status::Violation) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SearchSpaceTooLarge { .. } | Error::InstanceTooLarge { .. } => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_profile(path: &Path) -> Result<PreferenceProfile> {
    let p = parse_profile(&read(path)?)?;
    p.ensure_valid()?;
    Ok(p)
}

fn load_scenario(path: &Path) -> Result<LieScenario> {
    let s = parse_scenario(&read(path)?)?;
    s.validate()?;
    Ok(s)
}

fn cap() -> Result<u64> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: 0, message: format!("{CAP_ENV}={v} is not a number") }),
        Err(_) => Ok(DEFAULT_SEARCH_CAP),
    }
}

fn dispatch(command: Command, out: &mut String) -> Result<Status> {
    match command {
        Command::Run { profile, proposing, format } => {
            let p = load_profile(&profile)?;
            let side = match proposing {
                Proposing::Men => Side::Man,
                Proposing::Women => Side::Woman,
            };
            let trace = run_deferred_acceptance(&p, side)?;
            print_trace(out, &trace, format);
            Ok(Status::Ok)
        }
        Command::Stability(args) => stability(args, out),
        Command::Reduce(r) => reduce(r, out),
        Command::Lies(Lies::Search { profile, liars, constraint, allow_truncation }) => {
            let p = load_profile(&profile)?;
            let liars = parse_liars(&liars)?;
            let constraint = match constraint {
                ConstraintArg::NoLiarWorse => Constraint::NoLiarWorse,
                ConstraintArg::AllWeaklyBetter => Constraint::AllLiarsWeaklyBetter,
            };
            let limits = SearchLimits { max_candidates: cap()? };
            let classes = find_beneficial_lies(&p, &liars, constraint, allow_truncation, limits)?;
            for (i, c) in classes.iter().enumerate() {
                let declared: Vec<String> = c
                    .scenario
                    .declared
                    .iter()
                    .map(|(&w, l)| format!("{}: {}", Person::woman(w), names(Side::Man, l)))
                    .collect();
                writeln!(
                    out,
                    "class {} size {} | declare {} | matching {} | {}",
                    i + 1,
                    c.size,
                    declared.join("; "),
                    c.report.new,
                    flag_summary(&c.report)
                )
                .unwrap();
            }
            writeln!(out, "{} classes", classes.len()).unwrap();
            Ok(Status::Ok)
        }
        Command::Lies(Lies::Audit { scenario }) => audit(&load_scenario(&scenario)?, out),
        Command::Verify(args) => verify(args, out),
        Command::Example { name: ExampleName::Paper, which, format } => {
            let runs = [
                (Which::Oa, "OA (true lists)", fixtures::four_couples()),
                (Which::Na, "NA (w1, w2 lying)", fixtures::four_couples_lie().declared_profile()),
            ];
            for (w, title, profile) in runs {
                if which.is_some_and(|x| x != w) {
                    continue;
                }
                if which.is_none() {
                    writeln!(out, "# {title}").unwrap();
                }
                print_trace(out, &run_deferred_acceptance(&profile, Side::Man)?, format);
            }
            Ok(Status::Ok)
        }
    }
}

fn print_trace(out: &mut String, trace: &ExecutionTrace, format: Format) {
    match format {
        Format::Human => {
            out.push_str(&render_trace_table(trace));
            writeln!(out, "matching {} after {} nights", trace.final_matching, trace.night_count()).unwrap();
        }
        Format::Records => out.push_str(&render_trace_records(trace)),
    }
}

fn names(side: Side, list: &[usize]) -> String {
    list.iter().map(|&i| Person::new(side, i).to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_liars(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let p: Person = t.trim().parse().map_err(|message| Error::Parse { line: 0, message })?;
            if p.side != Side::Woman {
                return Err(Error::InvalidScenario(format!("{p} is not a woman")));
            }
            Ok(p.index)
        })
        .collect()
}

fn flag_summary(r: &OutcomeReport) -> String {
    let pick = |side: Side, flags: Vec<bool>| {
        let v: Vec<String> = flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| Person::new(side, i).to_string())
            .collect();
        if v.is_empty() {
            "-".to_string()
        } else {
            v.join(" ")
        }
    };
    format!(
        "women better {} worse {} | men better {} worse {}",
        pick(Side::Woman, r.women.iter().map(|f| f.better_off).collect()),
        pick(Side::Woman, r.women.iter().map(|f| f.worse_off).collect()),
        pick(Side::Man, r.men.iter().map(|f| f.better_off).collect()),
        pick(Side::Man, r.men.iter().map(|f| f.worse_off).collect()),
    )
}

fn stability(args: StabilityArgs, out: &mut String) -> Result<Status> {
    let (profile, label) = match (&args.profile, &args.scenario) {
        (Some(p), _) => (load_profile(p)?, "profile"),
        (None, Some(s)) => {
            let s = load_scenario(s)?;
            if args.declared {
                (s.declared_profile(), "declared lists")
            } else {
                (s.truth, "true lists")
            }
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    let m = parse_matching(&read(&args.matching)?, profile.women.len(), profile.men.len())?;
    let report = is_stable(&profile, &m)?;
    if report.stable {
        writeln!(out, "stable under the {label}: {m}").unwrap();
        return Ok(Status::Ok);
    }
    writeln!(out, "unstable under the {label}: {m}").unwrap();
    for b in &report.blocking {
        writeln!(out, "blocking {b}").unwrap();
    }
    Ok(Status::Violation)
}

fn reduce(r: Reduce, out: &mut String) -> Result<Status> {
    let (args, (profile, map)) = match r {
        Reduce::Replicate(a) => {
            let p = load_profile(&a.profile)?;
            let (q, m) = replicate_women(&p)?;
            (a, (q, write_replication_map(&m)))
        }
        Reduce::Pad(a) => {
            let p = load_profile(&a.profile)?;
            let (q, m) = pad_profile(&p)?;
            (a, (q, write_padding_map(&m)))
        }
    };
    let map_path = args.map.unwrap_or_else(|| {
        let mut s = args.out.clone().into_os_string();
        s.push(".map");
        PathBuf::from(s)
    });
    fs::write(&args.out, write_profile(&profile))?;
    fs::write(&map_path, map)?;
    writeln!(
        out,
        "wrote {} ({} women, {} men) and {}",
        args.out.display(),
        profile.women.len(),
        profile.men.len(),
        map_path.display()
    )
    .unwrap();
    Ok(Status::Ok)
}

fn audit(s: &LieScenario, out: &mut String) -> Result<Status> {
    let r = compare_outcomes(s)?;
    writeln!(out, "original {}", r.original).unwrap();
    writeln!(out, "new      {}", r.new).unwrap();
    for (w, f) in r.women.iter().enumerate() {
        writeln!(
            out,
            "{}{} better_off={} worse_off={} unchanged={} weakly_better_off={}",
            Person::woman(w),
            if s.is_liar(w) { "*" } else { " " },
            f.better_off,
            f.worse_off,
            f.unchanged,
            f.weakly_better_off
        )
        .unwrap();
    }
    for (m, f) in r.men.iter().enumerate() {
        writeln!(
            out,
            "{}  better_off={} worse_off={} unchanged={} gained_only_worse_matches={}",
            Person::man(m),
            f.better_off,
            f.worse_off,
            f.unchanged,
            f.gained_only_worse_matches
        )
        .unwrap();
    }
    let st = s.stability(&r.new, false)?;
    writeln!(out, "new matching {} under the true lists", if st.stable { "stable" } else { "unstable" }).unwrap();
    for b in &st.blocking {
        writeln!(out, "  blocking {b}").unwrap();
    }
    let limits = SearchLimits { max_candidates: cap()? };
    for l in s.liars() {
        let opt = is_personally_optimal(s, l, limits)?;
        match opt.witness {
            None => writeln!(out, "{} lies personally optimally", Person::woman(l)).unwrap(),
            Some((list, m)) => writeln!(
                out,
                "{} could do better declaring {} (gives {m})",
                Person::woman(l),
                names(Side::Man, &list)
            )
            .unwrap(),
        }
    }
    let cert = rejecter_analysis(s)?;
    if cert.rejected.is_empty() {
        writeln!(out, "rejecters: none").unwrap();
    }
    for (&w, rs) in &cert.rejected {
        for &r in rs {
            let witness = cert.witnesses[&(w, r)].map_or("none".to_string(), |b| Person::man(b).to_string());
            writeln!(
                out,
                "rejecter {} rejected {} on night {}, witness {witness}",
                Person::woman(w),
                Person::man(r),
                cert.nights[&(w, r)]
            )
            .unwrap();
        }
    }
    if let Some(chain) = &cert.chain {
        let steps: Vec<String> = chain
            .steps
            .iter()
            .map(|st| format!("{} by {} on night {}", Person::man(st.man), Person::woman(st.woman), st.night))
            .collect();
        let end = match chain.end {
            ChainEnd::NotRejectee { man } => format!("{} is not a rejectee", Person::man(man)),
            ChainEnd::MissingWitness { woman, man } => {
                format!("no witness for {} rejecting {}", Person::woman(woman), Person::man(man))
            }
            ChainEnd::NoRejecterPartner { man } => format!("{} has no rejecting partner", Person::man(man)),
            ChainEnd::Repeat { first, second } => format!("step {} repeats step {}", second + 1, first + 1),
        };
        writeln!(
            out,
            "chain from {}: {} ; ends: {end} ; nights strictly decreasing: {}",
            Person::man(chain.seed),
            steps.join(" -> "),
            chain.strictly_decreasing
        )
        .unwrap();
    }
    Ok(Status::Ok)
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse { line: 0, message: format!("size `{s}` is not of the form WxM") };
    let (w, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn verify(args: VerifyArgs, out: &mut String) -> Result<Status> {
    let (women, men) = parse_size(&args.size)?;
    let property = args.property.as_str();
    let monogamous_only = matches!(property, "sisterhood-monogamous" | "lone-liar" | "proposer-side");
    let default_scenario = match property {
        "sisterhood-monogamous" | "lone-liar" | "proposer-side" | "personal-optimality" => ScenarioArg::Monogamous,
        "sisterhood-polygamous" | "replication" => ScenarioArg::Quota,
        _ => ScenarioArg::Blacklist,
    };
    let scenario = args.scenario.unwrap_or(default_scenario);
    if monogamous_only && !matches!(scenario, ScenarioArg::Monogamous) {
        return Err(Error::ScenarioMismatch(format!("{property} runs on monogamous instances only")));
    }
    let instances = if args.exhaustive {
        if women != men {
            return Err(Error::ScenarioMismatch("exhaustive instances need equal rosters".into()));
        }
        let mut all = monogamous_up_to_symmetry(women)?;
        if property == "truncation" {
            for p in &mut all {
                p.scenario = Scenario::BlacklistGeneral;
            }
        }
        all
    } else {
        if matches!(scenario, ScenarioArg::Monogamous) && women != men {
            return Err(Error::ScenarioMismatch("monogamous instances need equal rosters".into()));
        }
        let g = match scenario {
            ScenarioArg::Monogamous => InstanceGenerator::monogamous(args.seed, women),
            ScenarioArg::Quota => {
                let mut g = InstanceGenerator::quota(args.seed, women, men, args.max_quota);
                if property == "replication" {
                    g.men_quota = (1, 1);
                }
                g
            }
            ScenarioArg::Blacklist => {
                let mut g = InstanceGenerator::blacklist(args.seed, women, men, args.max_quota, args.density);
                if property == "truncation" {
                    g.women_quota = (1, 1);
                    g.men_quota = (1, 1);
                }
                g
            }
        };
        g.generate(args.trials)?
    };
    let cap = cap()?;
    let cfg = CheckConfig {
        max_liars: args.max_liars,
        allow_truncation: !args.no_truncation,
        limits: SearchLimits { max_candidates: cap },
        ..CheckConfig::default()
    };
    let result = run_property(property, &instances, &cfg)?;
    writeln!(out, "{}", result.summary()).unwrap();
    for (i, v) in result.violations.iter().enumerate() {
        writeln!(out, "violation {} (instance {}): {}", i + 1, v.instance, v.message.replace('\n', "; ")).unwrap();
        if let Some(dir) = &args.bundle_dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}-{:03}.txt", result.property, i + 1));
            fs::write(&path, v.to_scenario_file())?;
            writeln!(out, "  bundle {}", path.display()).unwrap();
        }
    }
    Ok(if result.passed() { Status::Ok } else { Status::Violation })
}
