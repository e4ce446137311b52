//! Command-line front end. Every subcommand renders one document (JSON, CSV,
//! DOT or text) and reports an exit code: 0 success, 1 verification
//! mismatch, 2 usage or numerical error.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kbundle_core::labeling::{self, LimitReport};
use kbundle_core::monodromy::{self, Action, CompositionReport, HomReport, MonodromyReport};
use kbundle_core::quiver::build_quiver;
use kbundle_core::sections::hom_table;
use kbundle_core::solver::{self, SolverOptions};
use kbundle_core::tracker::{MonodromyContext, TrackerOptions};
use kbundle_core::{exceptional_collection, BundleSpec, CoeffVector, Complex64, Generator, LabelPoint, ToricDivisor};
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::{self, SpecJson};

/// Θ and hyperplane closeness required at the largest `T`.
pub const LIMIT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "kbundle",
    version,
    about = "Critical points, monodromy and exceptional collections of Fano projective bundles over P^s"
)]
pub struct Cli {
    /// Base dimension s.
    #[arg(long, global = true)]
    pub s: Option<i64>,
    /// Twists a_1,..,a_r (ascending, comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub a: Option<Vec<i64>>,
    /// Far parameter: points are labelled at u = −T.
    #[arg(long = "T", global = true, default_value_t = 12.0)]
    pub t_far: f64,
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Direction {
    Plus,
    #[default]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ActionArg {
    /// `(k + |D|_1 mod s+1, l + |D|_2 mod r+1)`.
    #[default]
    Modular,
    /// The modular action with each wrap of `l` carrying `Σa` into `k`.
    Lifted,
}

impl From<ActionArg> for Action {
    fn from(a: ActionArg) -> Self {
        match a {
            ActionArg::Modular => Action::Modular,
            ActionArg::Lifted => Action::Lifted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    TheoremA,
    TheoremB,
    #[value(name = "thm-4-2")]
    LoopMonodromy,
    Composition,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bundle data: polytope vertices, limit grid, exceptional collection.
    Describe,
    /// All critical points of f_u.
    Solve {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u: f64,
        /// Imaginary part of u.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_im: f64,
    },
    /// Critical points at u = −T with their labels.
    Label,
    /// Θ per label at u = −T (minus) or u = +T (plus).
    Limits {
        #[arg(long, value_enum, default_value_t)]
        direction: Direction,
    },
    /// Monodromy of the loop of a divisor, e.g. `v0,v0,e1`.
    Monodromy {
        #[arg(long)]
        divisor: String,
        #[arg(long, value_enum, default_value_t)]
        action: ActionArg,
    },
    /// Hom dimensions over the exceptional collection.
    Hom,
    /// The quiver on the collection.
    Quiver,
    /// Samples of W/Z and 1/Πw at each critical point of f_t.
    Curve {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        t_list: Vec<f64>,
    },
    /// Runs a verifier.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[arg(long, value_enum, default_value_t)]
        action: ActionArg,
    },
    /// Reloads a saved critical set and re-checks its residuals.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Validated options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: Option<BundleSpec>,
    pub t_far: f64,
    pub tol: f64,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let spec = match (cli.s, &cli.a) {
            (Some(s), Some(a)) => Some(BundleSpec::new(s, a)?),
            (None, None) => None,
            _ => bail!("--s and --a must be given together"),
        };
        if !(cli.t_far.is_finite() && cli.t_far > 0.0) {
            bail!("--T must be positive");
        }
        if !(cli.tol.is_finite() && cli.tol > 0.0) {
            bail!("--tol must be positive");
        }
        if cli.threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        Ok(Self {
            spec,
            t_far: cli.t_far,
            tol: cli.tol,
            threads: cli.threads,
            output: cli.output.clone(),
            format: cli.format,
        })
    }

    fn spec(&self) -> Result<&BundleSpec> {
        self.spec.as_ref().ok_or_else(|| anyhow!("this command needs --s and --a"))
    }

    fn tracker(&self) -> TrackerOptions {
        TrackerOptions { tol: self.tol, ..TrackerOptions::default() }
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, ..SolverOptions::default() }
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command");
        }
        Ok(f)
    }
}

/// A rendered document and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, code: 0 }
    }

    fn verdict(body: String, passed: bool) -> Self {
        Self { body, code: if passed { 0 } else { 1 } }
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let config = RunConfig::from_cli(cli)?;
    if let Some(n) = config.threads {
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = run(&cli.command, &config)?;
    match &config.output {
        Some(path) => std::fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", outcome.body),
    }
    Ok(outcome.code)
}

pub fn run(command: &Command, config: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Describe => describe(config),
        Command::Solve { u, u_im } => solve(config, Complex64::new(*u, *u_im)),
        Command::Label => label(config),
        Command::Limits { direction } => limits(config, *direction),
        Command::Monodromy { divisor, action } => monodromy_cmd(config, divisor, (*action).into()),
        Command::Hom => hom(config),
        Command::Quiver => quiver(config),
        Command::Curve { t_list } => curve(config, t_list),
        Command::Verify { target, action } => verify(config, *target, (*action).into()),
        Command::Check { input } => check(config, input),
    }
}

/// `v0,v0,e1` (or `0` / empty for the zero divisor).
pub fn parse_divisor(spec: &BundleSpec, text: &str) -> Result<ToricDivisor> {
    let text = text.trim();
    if text.is_empty() || text == "0" {
        return Ok(ToricDivisor::zero(spec));
    }
    let gens = text.split(',').map(str::parse::<Generator>).collect::<Result<Vec<_>, _>>()?;
    Ok(ToricDivisor::from_generators(spec, &gens)?)
}

#[derive(Serialize)]
struct LabelJson {
    k: usize,
    l: usize,
}

impl From<LabelPoint> for LabelJson {
    fn from(p: LabelPoint) -> Self {
        Self { k: p.k, l: p.l }
    }
}

fn describe(config: &RunConfig) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let grid = labeling::limit_grid(spec)?;
    let vertices: Vec<(Generator, Vec<i64>)> =
        spec.generators().into_iter().map(|g| (g, kbundle_core::bundle::vertex(spec, g).0)).collect();
    let collection = exceptional_collection(spec);
    if f == Format::Json {
        #[derive(Serialize)]
        struct Vertex {
            gen: Generator,
            coords: Vec<i64>,
        }
        #[derive(Serialize)]
        struct GridPoint {
            k: usize,
            l: usize,
            theta: Vec<f64>,
        }
        #[derive(Serialize)]
        struct Class {
            k: usize,
            l: usize,
            h: i64,
            x: i64,
        }
        #[derive(Serialize)]
        struct Doc {
            spec: SpecJson,
            n_points: usize,
            vertices: Vec<Vertex>,
            grid: Vec<GridPoint>,
            collection: Vec<Class>,
        }
        let doc = Doc {
            spec: SpecJson::from_spec(spec),
            n_points: spec.n_points(),
            vertices: vertices.into_iter().map(|(gen, coords)| Vertex { gen, coords }).collect(),
            grid: grid.iter().map(|(t, p)| GridPoint { k: p.k, l: p.l, theta: t.0.clone() }).collect(),
            collection: spec
                .labels()
                .into_iter()
                .zip(&collection)
                .map(|(p, c)| Class { k: p.k, l: p.l, h: c.h, x: c.x })
                .collect(),
        };
        return Ok(Outcome::ok(formats::to_json(&doc)?));
    }
    let mut out = String::new();
    writeln!(out, "bundle {spec}: N = {}, dimension {}", spec.n_points(), spec.dim())?;
    writeln!(out, "vertices:")?;
    for (g, coords) in &vertices {
        writeln!(out, "  {g:>3}  {coords:?}")?;
    }
    writeln!(out, "limit grid:")?;
    for (t, p) in &grid {
        writeln!(out, "  {p}  ({:.6}, {:.6})", t.0[0], t.0[1])?;
    }
    writeln!(out, "collection (l,k order):")?;
    for (p, c) in spec.labels().into_iter().zip(&collection) {
        writeln!(out, "  E_{}{}  {c}", p.k, p.l)?;
    }
    Ok(Outcome::ok(out))
}

fn render_points(spec: &BundleSpec, cs: &kbundle_core::CritSet, f: Format) -> Result<String> {
    if f == Format::Json {
        return formats::critset_to_json(spec, cs);
    }
    let mut out = String::new();
    writeln!(out, "{} critical points of {spec}, max residual {:.3e}", cs.len(), cs.max_residual())?;
    for (i, p) in cs.points.iter().enumerate() {
        let label = p.label.map(|l| l.to_string()).unwrap_or_else(|| "-".into());
        let theta = labeling::theta(spec, p)?;
        let coords: Vec<String> = p.coords().iter().map(|c| format!("{:.10}{:+.10}i", c.re, c.im)).collect();
        writeln!(out, "  {i:>2} {label:>6}  Θ=({:.6}, {:.6})  {}", theta.0[0], theta.0[1], coords.join("  "))?;
    }
    Ok(out)
}

fn solve(config: &RunConfig, u: Complex64) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let cs = solver::solve_crit_with(spec, &CoeffVector::family(spec, u), &config.solver())?;
    Ok(Outcome::ok(render_points(spec, &cs, f)?))
}

fn label(config: &RunConfig) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let u = Complex64::new(-config.t_far, 0.0);
    let cs = solver::solve_crit_with(spec, &CoeffVector::family(spec, u), &config.solver())?;
    let cs = labeling::into_collection_order(spec, labeling::assign_labels(spec, &cs)?)?;
    Ok(Outcome::ok(render_points(spec, &cs, f)?))
}

fn limits(config: &RunConfig, direction: Direction) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let values = match direction {
        Direction::Minus => labeling::theta_minus(spec, config.t_far, &config.tracker())?,
        Direction::Plus => labeling::theta_plus(spec, config.t_far, &config.tracker())?,
    };
    let u = match direction {
        Direction::Minus => -config.t_far,
        Direction::Plus => config.t_far,
    };
    if f == Format::Json {
        #[derive(Serialize)]
        struct Row {
            k: usize,
            l: usize,
            theta: Vec<f64>,
        }
        #[derive(Serialize)]
        struct Doc {
            spec: SpecJson,
            u: f64,
            points: Vec<Row>,
        }
        let doc = Doc {
            spec: SpecJson::from_spec(spec),
            u,
            points: values.into_iter().map(|(p, t)| Row { k: p.k, l: p.l, theta: t.0 }).collect(),
        };
        return Ok(Outcome::ok(formats::to_json(&doc)?));
    }
    let mut out = format!("Θ at u = {u} for {spec}\n");
    for (p, t) in values {
        writeln!(out, "  {p}  ({:.6}, {:.6})", t.0[0], t.0[1])?;
    }
    Ok(Outcome::ok(out))
}

#[derive(Serialize)]
struct MapJson {
    from: LabelJson,
    to: LabelJson,
}

fn monodromy_cmd(config: &RunConfig, divisor: &str, action: Action) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let d = parse_divisor(spec, divisor)?;
    let ctx = MonodromyContext::new(spec, config.t_far, &config.tracker())?;
    let check = monodromy::check_loop(spec, &ctx, &d)?;
    let matches = match action {
        Action::Modular => check.matches_modular,
        Action::Lifted => check.matches_lifted,
    };
    let expected: Vec<(LabelPoint, LabelPoint)> =
        spec.labels().into_iter().map(|p| (p, action.apply(spec, &d, p))).collect();
    if f == Format::Json {
        #[derive(Serialize)]
        struct Doc {
            spec: SpecJson,
            t: f64,
            divisor: String,
            action: &'static str,
            numeric: Vec<MapJson>,
            expected: Vec<MapJson>,
            matches: bool,
        }
        let to_json = |v: &[(LabelPoint, LabelPoint)]| -> Vec<MapJson> {
            v.iter().map(|&(a, b)| MapJson { from: a.into(), to: b.into() }).collect()
        };
        let doc = Doc {
            spec: SpecJson::from_spec(spec),
            t: -config.t_far,
            divisor: check.divisor.clone(),
            action: action_name(action),
            numeric: to_json(&check.numeric),
            expected: to_json(&expected),
            matches,
        };
        return Ok(Outcome::verdict(formats::to_json(&doc)?, matches));
    }
    let mut out =
        format!("loop of {} at u = {} on {spec} ({} action)\n", check.divisor, -config.t_far, action_name(action));
    for ((p, q), (_, e)) in check.numeric.iter().zip(&expected) {
        let mark = if q == e { "" } else { "   ≠ expected " };
        writeln!(out, "  {p} -> {q}{mark}{}", if q == e { String::new() } else { e.to_string() })?;
    }
    writeln!(out, "{}", if matches { "matches" } else { "MISMATCH" })?;
    Ok(Outcome::verdict(out, matches))
}

fn action_name(a: Action) -> &'static str {
    match a {
        Action::Modular => "modular",
        Action::Lifted => "lifted",
    }
}

fn hom(config: &RunConfig) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let table = hom_table(spec);
    if f == Format::Json {
        #[derive(Serialize)]
        struct Doc {
            spec: SpecJson,
            order: Vec<LabelJson>,
            dims: Vec<Vec<u64>>,
        }
        let doc = Doc {
            spec: SpecJson::from_spec(spec),
            order: spec.labels().into_iter().map(Into::into).collect(),
            dims: table.dims,
        };
        return Ok(Outcome::ok(formats::to_json(&doc)?));
    }
    let labels = spec.labels();
    let mut out = String::from("        ");
    for p in &labels {
        write!(out, "{:>6}", format!("E{}{}", p.k, p.l))?;
    }
    out.push('\n');
    for (p, row) in labels.iter().zip(&table.dims) {
        write!(out, "{:<8}", format!("  E{}{}", p.k, p.l))?;
        for d in row {
            write!(out, "{d:>6}")?;
        }
        out.push('\n');
    }
    Ok(Outcome::ok(out))
}

fn quiver(config: &RunConfig) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Dot, Format::Text])?;
    let q = build_quiver(spec);
    Ok(Outcome::ok(match f {
        Format::Dot => formats::quiver_to_dot(&q),
        Format::Json => formats::quiver_to_json(&q)?,
        _ => {
            let mut out = format!("quiver of {spec}: {} vertices, {} arrows", q.vertices.len(), q.arrows.len());
            for (name, n) in q.family_counts(spec) {
                write!(out, ", {n} {name}")?;
            }
            writeln!(out, "; {} commutation squares", q.relations.len())?;
            out
        }
    }))
}

fn curve(config: &RunConfig, t_list: &[f64]) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
    let rows = labeling::sample_curve(spec, t_list, &config.tracker())?;
    Ok(Outcome::ok(match f {
        Format::Json => formats::to_json(&rows)?,
        _ => formats::curve_to_csv(&rows),
    }))
}

#[derive(Serialize)]
struct LimitDoc {
    spec: SpecJson,
    threshold: f64,
    #[serde(flatten)]
    report: LimitReport,
    passed: bool,
}

#[derive(Serialize)]
struct HomDoc {
    spec: SpecJson,
    #[serde(flatten)]
    report: HomReport,
    passed: bool,
}

#[derive(Serialize)]
struct CompositionDoc {
    spec: SpecJson,
    #[serde(flatten)]
    report: CompositionReport,
    passed: bool,
}

#[derive(Serialize)]
struct MonodromyDoc {
    spec: SpecJson,
    action: &'static str,
    #[serde(flatten)]
    report: MonodromyReport,
    passed: bool,
}

/// The `T` values at which Θ convergence is measured.
pub fn limit_schedule(t_far: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = [2.0, 6.0].into_iter().filter(|&t| t < t_far).collect();
    ts.push(t_far);
    ts
}

fn theorem_a(config: &RunConfig, spec: &BundleSpec) -> Result<LimitDoc> {
    let report = labeling::verify_theorem_a(spec, &limit_schedule(config.t_far), &config.tracker())?;
    let passed = report.passed(LIMIT_THRESHOLD);
    Ok(LimitDoc { spec: SpecJson::from_spec(spec), threshold: LIMIT_THRESHOLD, report, passed })
}

fn theorem_b(spec: &BundleSpec) -> HomDoc {
    let report = monodromy::verify_theorem_b(spec);
    HomDoc { spec: SpecJson::from_spec(spec), passed: report.passed(), report }
}

fn composition(spec: &BundleSpec) -> CompositionDoc {
    let report = monodromy::verify_composition(spec);
    CompositionDoc { spec: SpecJson::from_spec(spec), passed: report.passed(), report }
}

fn loop_monodromy(config: &RunConfig, spec: &BundleSpec, action: Action) -> Result<MonodromyDoc> {
    let ctx = MonodromyContext::new(spec, config.t_far, &config.tracker())?;
    // Loops are independent; collecting preserves the divisor order.
    let checks = monodromy::loop_divisors(spec)
        .par_iter()
        .map(|d| monodromy::check_loop(spec, &ctx, d))
        .collect::<kbundle_core::Result<Vec<_>>>()?;
    let report = MonodromyReport { t: config.t_far, checks };
    let passed = report.passed(action);
    Ok(MonodromyDoc { spec: SpecJson::from_spec(spec), action: action_name(action), report, passed })
}

fn verify(config: &RunConfig, target: VerifyTarget, action: Action) -> Result<Outcome> {
    let spec = config.spec()?;
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let text = f == Format::Text;
    match target {
        VerifyTarget::TheoremA => {
            let doc = theorem_a(config, spec)?;
            let body = if text { limit_text(&doc) } else { formats::to_json(&doc)? };
            Ok(Outcome::verdict(body, doc.passed))
        }
        VerifyTarget::TheoremB => {
            let doc = theorem_b(spec);
            let body = if text { hom_text(&doc) } else { formats::to_json(&doc)? };
            Ok(Outcome::verdict(body, doc.passed))
        }
        VerifyTarget::Composition => {
            let doc = composition(spec);
            let body = if text { composition_text(&doc) } else { formats::to_json(&doc)? };
            Ok(Outcome::verdict(body, doc.passed))
        }
        VerifyTarget::LoopMonodromy => {
            let doc = loop_monodromy(config, spec, action)?;
            let body = if text { monodromy_text(&doc) } else { formats::to_json(&doc)? };
            Ok(Outcome::verdict(body, doc.passed))
        }
        VerifyTarget::All => {
            let ((a, m), (b, c)) = rayon::join(
                || rayon::join(|| theorem_a(config, spec), || loop_monodromy(config, spec, action)),
                || rayon::join(|| theorem_b(spec), || composition(spec)),
            );
            let (a, m) = (a?, m?);
            let passed = a.passed && b.passed && c.passed && m.passed;
            if text {
                let body = [limit_text(&a), hom_text(&b), composition_text(&c), monodromy_text(&m)].concat();
                return Ok(Outcome::verdict(body, passed));
            }
            #[derive(Serialize)]
            struct Doc {
                theorem_a: LimitDoc,
                theorem_b: HomDoc,
                composition: CompositionDoc,
                loop_monodromy: MonodromyDoc,
                passed: bool,
            }
            let doc = Doc { theorem_a: a, theorem_b: b, composition: c, loop_monodromy: m, passed };
            Ok(Outcome::verdict(formats::to_json(&doc)?, passed))
        }
    }
}

fn verdict_word(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn limit_text(doc: &LimitDoc) -> String {
    let mut out = String::from("Θ limits (deviation from the grid, hyperplane residual):\n");
    for r in &doc.report.rows {
        let _ = writeln!(out, "  T = {:>5}  {:.3e}  {:.3e}", r.t, r.grid_deviation, r.hyperplane_residual);
    }
    match (&doc.report.label_deviation, &doc.report.label_error) {
        (Some(d), _) => {
            let _ = writeln!(out, "  labelled deviation {d:.3e} (threshold {:.0e})", doc.threshold);
        }
        (None, Some(e)) => {
            let _ = writeln!(out, "  labelling failed: {e}");
        }
        _ => {}
    }
    let _ = writeln!(out, "{}", verdict_word(doc.passed));
    out
}

fn hom_text(doc: &HomDoc) -> String {
    let mut out = format!(
        "Hom vs monodromy witnesses: {} pairs, {} mismatches\n",
        doc.report.pairs_checked,
        doc.report.mismatches.len()
    );
    for m in &doc.report.mismatches {
        let _ = writeln!(out, "  {} -> {}: hom {} witnesses {}", m.from, m.to, m.hom, m.hom_mon);
    }
    let _ = writeln!(out, "{}", verdict_word(doc.passed));
    out
}

fn composition_text(doc: &CompositionDoc) -> String {
    let r = &doc.report;
    format!(
        "composition: {} triples, {} sums, {} injective, {} surjective, {} mismatches\n{}\n",
        r.triples_checked,
        r.sums_checked,
        r.injective,
        r.surjective,
        r.mismatches.len(),
        verdict_word(doc.passed)
    )
}

fn monodromy_text(doc: &MonodromyDoc) -> String {
    let mut out = format!("loops at u = -{} against the {} action:\n", doc.report.t, doc.action);
    for c in &doc.report.checks {
        let _ = writeln!(
            out,
            "  {:<8} modular {}  lifted {}",
            c.divisor,
            if c.matches_modular { "yes" } else { "no " },
            if c.matches_lifted { "yes" } else { "no " }
        );
    }
    let _ = writeln!(out, "{}", verdict_word(doc.passed));
    out
}

fn check(config: &RunConfig, input: &std::path::Path) -> Result<Outcome> {
    let f = config.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let (spec, cs) = formats::critset_from_json(&text)?;
    let sys = kbundle_core::lg::LgSystem::new(&spec);
    let coeffs = cs.coeffs.monomial_coeffs();
    let mut worst: f64 = 0.0;
    let mut stored_agree = true;
    for p in &cs.points {
        let (raw, scaled) = sys.scaled_residual(&coeffs, &p.coords())?;
        worst = worst.max(scaled);
        stored_agree &= raw == p.residual;
    }
    let complete = cs.len() == spec.n_points() && cs.min_separation() > kbundle_core::lg::DEFAULT_SEPARATION;
    let passed = worst <= cs.tol && complete;
    #[derive(Serialize)]
    struct Doc {
        spec: SpecJson,
        points: usize,
        max_scaled_residual: f64,
        tol: f64,
        stored_residuals_reproduced: bool,
        complete: bool,
        passed: bool,
    }
    let doc = Doc {
        spec: SpecJson::from_spec(&spec),
        points: cs.len(),
        max_scaled_residual: worst,
        tol: cs.tol,
        stored_residuals_reproduced: stored_agree,
        complete,
        passed,
    };
    let body = if f == Format::Json {
        formats::to_json(&doc)?
    } else {
        format!(
            "{} points of {spec}, max residual {:.3e} (tol {:.0e}), complete: {}\n{}\n",
            doc.points,
            worst,
            cs.tol,
            complete,
            verdict_word(passed)
        )
    };
    Ok(Outcome::verdict(body, passed))
}
