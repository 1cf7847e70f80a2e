use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use realcount::acceptance::{self, CriterionOutcome};
use realcount::bezout::{parse_constraints, verdict_for_budget};
use realcount::floor::{count_degree_with, CountOptions, DEFAULT_CENSUS_CAP, MAX_DEGREE};
use realcount::gw::{bound_report, kontsevich_nd};
use realcount::lattice::{build_grid, chi_polynomial, nontriviality_certificate, render_relation, Certificate};
use realcount::seeds::{paper_seeds, SeedDatabase};
use realcount::wall::{random_walk, Marking};
use realcount::{Error, SurfaceClass, UnknownSymbol};

const SEEDS_ENV: &str = "REALCOUNT_SEEDS";

const EXIT_INPUT: u8 = 2;
const EXIT_CONFLICT: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "realcount", version, about = "Exact counts of real rational curves")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build the recursion lattice and print the χ coefficients.
    Chi {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Seed database (JSON); `paper` selects the bundled one.
        #[arg(long, env = SEEDS_ENV)]
        seeds: Option<String>,
    },
    /// Complex counts N_1..N_max by Kontsevich's recursion.
    Nd {
        #[arg(long, default_value_t = 5)]
        max_degree: i64,
        /// Recount each degree by floor diagrams (degree ≤ 8).
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Complex and fully real counts of degree d by floor diagrams.
    Wd {
        #[arg(long)]
        degree: usize,
        /// Print one line per diagram (degree ≤ 6).
        #[arg(long)]
        census: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Intersection lower bound against the budget d·d.
    Bezout {
        #[arg(long, required_unless_present = "degree")]
        dd: Option<i64>,
        /// Plane curve degree; the budget becomes degree².
        #[arg(long, conflicts_with = "dd")]
        degree: Option<i64>,
        /// e.g. `simple:5,node:3`; kinds are simple, node, shadow, tangent.
        #[arg(long)]
        constraints: String,
    },
    /// Random wall-crossing walk, printing the χ (and θ) trace.
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        marked: bool,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Run acceptance criteria; exits 4 on any failure.
    Check {
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        /// Criterion number, repeatable.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=9))]
        criterion: Vec<u32>,
        /// Include wall-clock times (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceKind {
    Cp2,
    Custom,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = SurfaceKind::Cp2)]
    surface: SurfaceKind,
    #[arg(long, default_value_t = 3)]
    degree: i64,
    #[arg(long)]
    c1d: Option<i64>,
    #[arg(long)]
    dd: Option<i64>,
    #[arg(long)]
    label: Option<String>,
}

impl SurfaceArgs {
    fn class(&self) -> Result<SurfaceClass, Failure> {
        match self.surface {
            SurfaceKind::Cp2 => Ok(SurfaceClass::cp2(self.degree)?),
            SurfaceKind::Custom => {
                let (Some(c1d), Some(dd)) = (self.c1d, self.dd) else {
                    return Err(Failure::input("custom surface needs --c1d and --dd"));
                };
                let label = self.label.clone().unwrap_or_else(|| format!("c1d={c1d}, dd={dd}"));
                Ok(SurfaceClass::new(c1d, dd, label)?)
            }
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SeedConflict { .. } => EXIT_CONFLICT,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

/// A finished command: text and JSON renderings of the same content.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

fn load_seeds(arg: Option<&str>) -> Result<SeedDatabase, Failure> {
    match arg {
        None => Ok(SeedDatabase::empty()),
        Some("paper") | Some("builtin") => Ok(paper_seeds()),
        Some(path) => {
            let p = Path::new(path);
            if !p.exists() && p.file_name().is_some_and(|n| n == "paper.json") {
                return Ok(paper_seeds());
            }
            Ok(SeedDatabase::load(&PathBuf::from(path))?)
        }
    }
}

fn jobs_or_default(jobs: Option<usize>) -> Result<usize, Failure> {
    match jobs {
        Some(0) => Err(Failure::input("--jobs must be at least 1")),
        Some(j) => Ok(j),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn cmd_chi(surface: &SurfaceArgs, seeds: Option<&str>) -> Result<Report, Failure> {
    let cls = surface.class()?;
    let db = load_seeds(seeds)?;
    let grid = build_grid(&cls, &db.for_class(&cls))?;
    let poly = chi_polynomial(&grid);
    let tag = cls.tag();

    let mut text = format!("class: {} (c1d={}, dd={}, delta={})\n", cls.label, cls.c1d, cls.dd, cls.delta()?);
    let source = if db.source_path.is_empty() { "none" } else { db.source_path.as_str() };
    text.push_str(&format!("seeds: {source}\n"));
    let mut coefficients = Vec::new();
    for r in 0..=cls.point_budget() {
        if !cls.chi_parity_admissible(r)? {
            continue;
        }
        let expr = grid.cell(0, r);
        let own = UnknownSymbol::new(tag.clone(), 0, r);
        let provenance = if let Some(seed) = db.find(&cls, 0, r) {
            format!("seed: {}", seed.provenance)
        } else if expr.terms().len() == 1 && expr.coefficient(&own) == 1.into() && expr.constant_term() == &0.into() {
            "unknown".to_string()
        } else {
            "derived: lattice recursion".to_string()
        };
        let line = render_relation(&grid, r)?;
        text.push_str(&format!("{line}  [{provenance}]\n"));
        coefficients.push(json!({
            "r": r,
            "relation": line,
            "expr": expr.to_string(),
            "value": expr.as_constant().map(|v| v.to_string()),
            "provenance": provenance,
        }));
    }
    let rendered = poly.render();
    text.push_str(&format!("chi^{tag}(T) = {rendered}\n"));

    let unknowns: Vec<String> = grid.unknowns.iter().map(UnknownSymbol::display).collect();
    text.push_str(&format!("unknowns ({}): {}\n", unknowns.len(), unknowns.join(", ")));
    let residual: Vec<String> = grid.residual.iter().map(ToString::to_string).collect();
    for r in &residual {
        text.push_str(&format!("constraint: {r} = 0  [derived: seed consistency]\n"));
    }

    let certificate = match nontriviality_certificate(&poly) {
        Certificate::NonTrivial(w) => {
            let mut combo = String::new();
            for (r, m) in w.multipliers.iter().enumerate().filter(|(_, m)| !m.is_zero()) {
                let sign = if m.is_negative() { "-" } else { "+" };
                if combo.is_empty() {
                    combo.push_str(if m.is_negative() { "-" } else { "" });
                } else {
                    combo.push_str(&format!(" {sign} "));
                }
                combo.push_str(&format!("{}*chi[{tag},{r}]", m.abs()));
            }
            combo.push_str(&format!(" = {}", w.constant));
            text.push_str(&format!("NON-TRIVIAL: {combo}  [derived: exact elimination]\n"));
            json!({
                "status": "NON-TRIVIAL",
                "multipliers": w.multipliers.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "constant": w.constant.to_string(),
                "combination": combo,
                "provenance": "derived: exact elimination",
            })
        }
        Certificate::Unknown => {
            text.push_str("UNKNOWN: all coefficients may vanish\n");
            json!({ "status": "UNKNOWN" })
        }
    };

    let mut bounds = Vec::new();
    if let Some(d) = cls.cp2_degree() {
        let n_d = kontsevich_nd(d)?;
        for r in 0..=cls.point_budget() {
            if !cls.chi_parity_admissible(r)? {
                continue;
            }
            let Ok(b) = bound_report(&cls, r, &grid.cell(0, r), &n_d) else { continue };
            text.push_str(&format!(
                "bound r={}: |chi|={} N={} (N-|chi|)/2={} parity={}  [computed: Kontsevich recursion]\n",
                b.r,
                b.chi_abs,
                b.n_d,
                b.all_real_threshold,
                if b.parity_ok { "ok" } else { "violated" }
            ));
            let mut v = serde_json::to_value(&b).map_err(|e| Failure::input(e.to_string()))?;
            v["provenance"] = json!("computed: Kontsevich recursion");
            bounds.push(v);
        }
    }

    let json = json!({
        "command": "chi",
        "surface": cls,
        "delta": cls.delta()?,
        "seeds": source,
        "coefficients": coefficients,
        "polynomial": rendered,
        "unknowns": unknowns,
        "constraints": residual,
        "certificate": certificate,
        "bounds": bounds,
    });
    Ok(Report { text, json, code: 0 })
}

fn cmd_nd(max_degree: i64, cross_check: bool, jobs: Option<usize>) -> Result<Report, Failure> {
    if max_degree < 1 {
        return Err(Failure::input("--max-degree must be at least 1"));
    }
    if cross_check && max_degree as usize > MAX_DEGREE {
        return Err(Failure::input(format!("--cross-check supports degrees up to {MAX_DEGREE}")));
    }
    let jobs = jobs_or_default(jobs)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut agree = true;
    for d in 1..=max_degree {
        let n = kontsevich_nd(d)?;
        let mut row = json!({ "d": d, "n": n.to_string(), "provenance": "computed: Kontsevich recursion" });
        let mut line = format!("N_{d} = {n}  [computed: Kontsevich recursion");
        if cross_check {
            let c = count_degree_with(d as usize, CountOptions { jobs, census_cap: 0 })?;
            let ok = c.n_complex == n;
            agree &= ok;
            row["floor_diagrams"] = json!(c.n_complex.to_string());
            row["agree"] = json!(ok);
            line.push_str(if ok { "; floor diagrams agree" } else { "; floor diagrams DISAGREE" });
        }
        text.push_str(&line);
        text.push_str("]\n");
        rows.push(row);
    }
    let json = json!({ "command": "nd", "counts": rows });
    Ok(Report { text, json, code: if agree { 0 } else { EXIT_ACCEPTANCE } })
}

fn cmd_wd(degree: usize, census: bool, jobs: Option<usize>) -> Result<Report, Failure> {
    if census && degree > DEFAULT_CENSUS_CAP {
        return Err(Failure::input(format!("--census supports degrees up to {DEFAULT_CENSUS_CAP}")));
    }
    let jobs = jobs_or_default(jobs)?;
    let cap = if census { DEFAULT_CENSUS_CAP } else { 0 };
    let c = count_degree_with(degree, CountOptions { jobs, census_cap: cap })?;
    let mut text = format!(
        "d = {}\ndiagrams = {}  [computed: floor diagrams]\nN_{} = {}  [computed: floor diagrams]\nW_{} = {}  [computed: floor diagrams, odd-weight rule]\n",
        c.d, c.diagrams, c.d, c.n_complex, c.d, c.w_real
    );
    if census {
        text.push_str(&c.census_table());
    }
    let mut json = serde_json::to_value(&c).map_err(|e| Failure::input(e.to_string()))?;
    json["command"] = json!("wd");
    json["provenance"] = json!({
        "n_complex": "computed: floor diagrams",
        "w_real": "computed: floor diagrams, odd-weight rule",
    });
    if !census {
        json.as_object_mut().map(|o| o.remove("census"));
    }
    Ok(Report { text, json, code: 0 })
}

fn cmd_bezout(dd: Option<i64>, degree: Option<i64>, constraints: &str) -> Result<Report, Failure> {
    let budget = match (dd, degree) {
        (Some(dd), _) => dd,
        (None, Some(d)) => SurfaceClass::cp2(d)?.dd,
        (None, None) => return Err(Failure::input("need --dd or --degree")),
    };
    let items = parse_constraints(constraints)?;
    let v = verdict_for_budget(budget, &items);
    let rendered: Vec<String> = items.iter().map(ToString::to_string).collect();
    let text = format!("constraints: {}\n{v}\n", rendered.join(","));
    let json = json!({
        "command": "bezout",
        "constraints": rendered,
        "lower_bound": v.lower_bound,
        "budget": v.budget,
        "forced_unique": v.forced_unique,
        "verdict": v.to_string(),
        "provenance": "computed: intersection multiplicities",
    });
    Ok(Report { text, json, code: 0 })
}

fn cmd_simulate(seed: u64, steps: usize, marked: bool, surface: &SurfaceArgs) -> Result<Report, Failure> {
    let cls = surface.class()?;
    let marking = if marked { Marking::Marked } else { Marking::Unmarked };
    let trace = random_walk(seed, steps, &cls, marking)?;
    let chi_ok = trace.chi_constant();
    let theta_ok = trace.theta_constant();
    // marked-point flips move χ; only θ is conserved on marked worlds
    let conserved = if marked { theta_ok } else { chi_ok };
    let mut text = format!("class: {}\nseed: {seed}\nstep move chi theta\n", cls.label);
    text.push_str(&trace.to_text());
    if marked {
        text.push_str(&format!("theta conserved: {}\n", if theta_ok { "yes" } else { "no" }));
    } else {
        text.push_str(&format!("chi conserved: {}\n", if chi_ok { "yes" } else { "no" }));
    }
    let mut json = serde_json::to_value(&trace).map_err(|e| Failure::input(e.to_string()))?;
    json["command"] = json!("simulate");
    json["surface"] = json!(cls);
    if marked {
        json["theta_conserved"] = json!(theta_ok);
    } else {
        json["chi_conserved"] = json!(chi_ok);
    }
    let code = if conserved { 0 } else { EXIT_ACCEPTANCE };
    Ok(Report { text, json, code })
}

fn cmd_check(all: bool, criteria: &[u32], timings: bool) -> Result<Report, Failure> {
    let outcomes: Vec<CriterionOutcome> = if all || criteria.is_empty() {
        acceptance::run_all()
    } else {
        criteria.iter().filter_map(|&id| acceptance::run(id)).collect()
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let mut line = format!("[{status}] {} {}: {}", o.id, o.name, o.detail);
        let mut row = json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail });
        if timings {
            line.push_str(&format!(" ({} ms, limit {} ms)", o.elapsed_ms, o.limit_ms));
            row["elapsed_ms"] = json!(o.elapsed_ms as u64);
            row["limit_ms"] = json!(o.limit_ms as u64);
        }
        text.push_str(&line);
        text.push('\n');
        rows.push(row);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    text.push_str(if passed { "all criteria passed\n" } else { "acceptance FAILED\n" });
    let json = json!({ "command": "check", "criteria": rows, "passed": passed });
    Ok(Report { text, json, code: if passed { 0 } else { EXIT_ACCEPTANCE } })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Chi { surface, seeds } => cmd_chi(surface, seeds.as_deref()),
        Command::Nd { max_degree, cross_check, jobs } => cmd_nd(*max_degree, *cross_check, *jobs),
        Command::Wd { degree, census, jobs } => cmd_wd(*degree, *census, *jobs),
        Command::Bezout { dd, degree, constraints } => cmd_bezout(*dd, *degree, constraints),
        Command::Simulate { seed, steps, marked, surface } => cmd_simulate(*seed, *steps, *marked, surface),
        Command::Check { all, criterion, timings } => cmd_check(*all, criterion, *timings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            match cli.format {
                Format::Text => eprintln!("error: {}", f.message),
                Format::Json => println!("{}", json!({ "error": f.message, "exit_code": f.code })),
            }
            ExitCode::from(f.code)
        }
    }
}
