//! Command-line front end: file formats, SVG output and command dispatch.

pub mod format;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zigzag::bridging::{construct_bridged, stay_right_lift, verify_bridged, BridgeReport, Mutation};
use zigzag::contour::{contour_points, meandering_lift, radial_contour_factor, radial_departure_exists, ContourData, Orientation, RadialDeparture};
use zigzag::fixtures;
use zigzag::oracle::{oracle_contour_points, oracle_factorization, oracle_orientations, GridSpec};
use zigzag::plmap::{PlMap, PointedMap};
use zigzag::simplicial::{
    check_simplicial, find_schedule_with_jobs, markov_refine, normalize_point, pipeline, Normalized, PipelineOutcome,
    Scheduled, SimplicialSystem,
};
use zigzag::systems::{check_zigzag_free, compose_schedule, coordinate_map_h, rewire_with_jobs, RewireResult, SystemPrefix, ZigzagReport};
use zigzag::{Error, Scalar, Q};

use crate::format::{parse_document, serialize_map, serialize_simplicial, serialize_system, Document};
use crate::plot::{plot_svg, Panel, PlotStyle};

/// Directory searched for inputs that are not paths, before the built-in fixtures.
pub const FIXTURE_ENV: &str = "ZIGZAG_FIXTURES";

pub mod exit {
    pub const OK: i32 = 0;
    /// The computation finished but a certificate or cross-check failed.
    pub const CERTIFICATE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const DOMAIN: i32 = 4;
    pub const HYPOTHESIS: i32 = 5;
    pub const INVARIANT: i32 = 6;
    pub const THREAD: i32 = 7;
    pub const BUDGET: i32 = 8;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Format(_) => exit::INPUT,
        Error::Domain(_) | Error::Composition(_) | Error::Codomain(_) => exit::DOMAIN,
        Error::DegenerateSide(_) | Error::NotLiftable(_) | Error::Precondition(_) | Error::Hypothesis(_) => exit::HYPOTHESIS,
        Error::InvariantViolation(_) => exit::INVARIANT,
        Error::Thread { .. } => exit::THREAD,
        Error::Budget { .. } => exit::BUDGET,
    }
}

#[derive(Parser, Debug)]
#[command(name = "zigzag", version, about = "Exact contour factors, bridged lifts and rewiring of interval maps")]
struct Cli {
    /// Print a JSON certificate instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for independent per-map work.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contour points and the radial contour factor of a map.
    Contour { input: String },
    /// Composes maps (outermost first), or a system along `--cuts`.
    Compose {
        #[arg(required = true)]
        inputs: Vec<String>,
        /// Comma-separated cut levels, starting at 1.
        #[arg(long, value_delimiter = ',')]
        cuts: Option<Vec<usize>>,
    },
    /// Meandering lift of T, or with S the stay-right lift of S through T.
    Lift {
        t: String,
        s: Option<String>,
        /// Endpoints a b of the interval to modify (default: the domain of S).
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        interval: Option<Vec<String>>,
    },
    /// Orientations of radial departures of each map.
    Check { input: String },
    /// Bridged factor for three consecutive bonding maps.
    Bridge {
        #[arg(required = true, num_args = 1..=3)]
        inputs: Vec<String>,
        /// Directory for s_tilde.plmap, s_tilde.provenance and certificate.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
    /// Rewires a system prefix so that no map has negative radial departures.
    Rewire {
        input: String,
        /// Where to write the rewired system (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the certificate JSON.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// A thread of the input system to push through the coordinate map.
        #[arg(long, allow_hyphen_values = true)]
        thread: Option<String>,
    },
    /// Simplicial systems: check, normalize, schedule or the full pipeline.
    Simplicial {
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = Phase::Pipeline)]
        phase: Phase,
        /// Build the system from one bonding map by preimage refinement.
        #[arg(long, conflicts_with = "input")]
        markov: Option<String>,
        /// S₁ for `--markov`, whitespace- or comma-separated.
        #[arg(long, allow_hyphen_values = true, default_value = "-1 0 1")]
        s1: String,
        /// Number of bonding maps for `--markov`.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// The thread, one coordinate per level.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "point")]
        thread: Option<String>,
        /// Top coordinate; the thread is its image under the bonding maps.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Levels each scheduling stage may look ahead.
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Cross-checks the decision procedures against the brute-force oracle.
    Oracle {
        /// Maps, systems, or a frozen golden JSON file.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value_t = 32)]
        grid: u32,
        /// Print a golden JSON file for the inputs, computed by the oracle.
        #[arg(long)]
        freeze: bool,
    },
    /// SVG graphs, one panel per map.
    Plot {
        #[arg(required = true)]
        inputs: Vec<String>,
        /// `K=FILE`: draw FILE in red over panel K.
        #[arg(long)]
        overlay: Vec<String>,
        /// With three maps, overlay the bridged factor on the middle panel.
        #[arg(long)]
        bridge: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MutationArg {
    SkipB1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Phase {
    Check,
    Normalize,
    Schedule,
    Pipeline,
}

/// What a command produced: text or JSON for stdout, and whether every certificate passed.
struct Outcome {
    text: String,
    json: Value,
    passed: bool,
}

impl Outcome {
    fn pass(text: String, json: Value) -> Self {
        Outcome { text, json, passed: true }
    }
}

type CmdResult = Result<Outcome, Error>;

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = if cli.json { writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json")) } else { write!(out, "{}", o.text) };
            if o.passed {
                exit::OK
            } else {
                exit::CERTIFICATE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let jobs = cli.jobs.max(1);
    match &cli.command {
        Command::Contour { input } => cmd_contour(input),
        Command::Compose { inputs, cuts } => cmd_compose(inputs, cuts.as_deref()),
        Command::Lift { t, s, interval } => cmd_lift(t, s.as_deref(), interval.as_deref()),
        Command::Check { input } => cmd_check(input),
        Command::Bridge { inputs, out, mutate } => cmd_bridge(inputs, out.as_deref(), mutate.map(|_| Mutation::SkipB1)),
        Command::Rewire { input, out, cert, thread } => cmd_rewire(input, out.as_deref(), cert.as_deref(), thread.as_deref(), jobs),
        Command::Simplicial { input, phase, markov, s1, depth, thread, point, budget } => {
            let sys = match (input, markov) {
                (Some(i), None) => match load(i)? {
                    Document::Simplicial(s) => s,
                    d => return Err(Error::Format(format!("{i} is a {}, not a simplicial system", d.kind()))),
                },
                (None, Some(m)) => markov_refine(&load_map(m)?, &parse_list(s1)?, *depth)?,
                _ => return Err(Error::Domain("give a simplicial system file or --markov MAP".into())),
            };
            cmd_simplicial(&sys, *phase, thread.as_deref(), point.as_deref(), *budget, jobs)
        }
        Command::Oracle { inputs, grid, freeze } => cmd_oracle(inputs, *grid, *freeze),
        Command::Plot { inputs, overlay, bridge, out } => cmd_plot(inputs, overlay, *bridge, out.as_deref()),
    }
}

// ---------------------------------------------------------------- inputs

/// Reads `name` as a path, then from the fixture directory, then as a built-in fixture.
pub fn load(name: &str) -> Result<Document<Q>, Error> {
    let mut candidates = vec![PathBuf::from(name)];
    if let Some(dir) = std::env::var_os(FIXTURE_ENV) {
        let dir = PathBuf::from(dir);
        for ext in ["", ".plmap", ".system", ".simplicial"] {
            candidates.push(dir.join(format!("{name}{ext}")));
        }
    }
    if let Some(path) = candidates.iter().find(|p| p.exists() && !p.is_dir()) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        return parse_document(&text).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        });
    }
    if name.eq_ignore_ascii_case("EX4") {
        return Ok(Document::System(fixtures::ex4().iter().map(|f| f.map().clone()).collect()));
    }
    fixtures::by_name(name)
        .map(Document::Map)
        .ok_or_else(|| Error::Format(format!("no file or fixture named `{name}`")))
}

fn load_map(name: &str) -> Result<PlMap<Q>, Error> {
    match load(name)? {
        Document::Map(m) => Ok(m),
        d => Err(Error::Format(format!("{name} is a {}, expected a map", d.kind()))),
    }
}

/// Every map of the named inputs, systems expanded in order.
fn load_maps(names: &[String]) -> Result<Vec<PlMap<Q>>, Error> {
    let mut out = Vec::new();
    for n in names {
        match load(n)? {
            Document::Map(m) => out.push(m),
            Document::System(ms) => out.extend(ms),
            Document::Simplicial(s) => out.extend(s.maps().iter().cloned()),
        }
    }
    Ok(out)
}

fn pointed(maps: Vec<PlMap<Q>>) -> Result<Vec<PointedMap<Q>>, Error> {
    maps.into_iter().map(PointedMap::new).collect()
}

fn parse_list(s: &str) -> Result<Vec<Q>, Error> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| Q::parse_frac(t).ok_or_else(|| Error::Format(format!("`{t}` is not a rational number"))))
        .collect()
}

fn parse_scalar(s: &str) -> Result<Q, Error> {
    Q::parse_frac(s).ok_or_else(|| Error::Format(format!("`{s}` is not a rational number")))
}

// ---------------------------------------------------------------- json helpers

fn q(v: &Q) -> Value {
    Value::String(v.to_string())
}

fn witness_json(w: &Option<RadialDeparture<Q>>) -> Value {
    match w {
        Some(w) => json!([q(&w.x1), q(&w.x2)]),
        None => Value::Null,
    }
}

fn contour_json(c: &ContourData<Q>) -> Value {
    let side = |pts: &[zigzag::contour::ContourPoint<Q>]| -> Value {
        pts.iter()
            .skip(1)
            .map(|p| json!({ "point": q(&p.point), "value": q(&p.value), "orientation": p.orientation.map(|o| o.as_str()) }))
            .collect()
    };
    json!({ "right": side(&c.right), "left": side(&c.left) })
}

fn report_json(r: &BridgeReport) -> Value {
    r.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect()
}

fn report_text(r: &BridgeReport) -> String {
    r.checks
        .iter()
        .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect()
}

fn zigzag_json(r: &ZigzagReport<Q>) -> Value {
    json!({
        "certificate": r.certificate(),
        "maps": r.per_map.iter().enumerate().map(|(i, m)| json!({
            "index": i + 1,
            "class": m.class().as_str(),
            "positive_witness": witness_json(&m.positive),
            "negative_witness": witness_json(&m.negative),
        })).collect::<Vec<_>>(),
    })
}

fn zigzag_text(r: &ZigzagReport<Q>) -> String {
    let mut s = String::new();
    for (i, m) in r.per_map.iter().enumerate() {
        s.push_str(&format!("map {}: {}", i + 1, m.class()));
        for w in [&m.positive, &m.negative].into_iter().flatten() {
            s.push_str(&format!(" {}<{}, {}>", w.orientation.as_str(), w.x1, w.x2));
        }
        s.push('\n');
    }
    s.push_str(&format!("certificate: {}\n", if r.certificate() { "pass" } else { "fail" }));
    s
}

// ---------------------------------------------------------------- commands

fn cmd_contour(input: &str) -> CmdResult {
    let f = PointedMap::new(load_map(input)?)?;
    let c = contour_points(&f)?;
    let t = radial_contour_factor(&f)?;
    let text = format!("{}t_f\n{}", c.report(), serialize_map(t.map()));
    let mut json = contour_json(&c);
    json["factor"] = Value::String(serialize_map(t.map()));
    Ok(Outcome::pass(text, json))
}

fn cmd_compose(inputs: &[String], cuts: Option<&[usize]>) -> CmdResult {
    let maps = load_maps(inputs)?;
    if let Some(cuts) = cuts {
        let p = SystemPrefix::new(pointed(maps)?)?;
        let c = compose_schedule(&p, cuts)?;
        let plain: Vec<PlMap<Q>> = c.maps().iter().map(|f| f.map().clone()).collect();
        let text = serialize_system(&plain);
        return Ok(Outcome::pass(text.clone(), json!({ "system": text })));
    }
    let mut acc = maps[0].clone();
    for f in &maps[1..] {
        acc = acc.compose(f)?;
    }
    let text = serialize_map(&acc.canonicalize());
    Ok(Outcome::pass(text.clone(), json!({ "map": text })))
}

fn cmd_lift(t: &str, s: Option<&str>, interval: Option<&[String]>) -> CmdResult {
    let t = PointedMap::new(load_map(t)?)?;
    let Some(s) = s else {
        let tf = radial_contour_factor(&t)?;
        let sf = meandering_lift(&t)?;
        let ok = oracle_factorization(tf.map(), sf.map(), t.map())?.is_none();
        let text = format!("t_f\n{}s_f\n{}factorization: {}\n", serialize_map(tf.map()), serialize_map(sf.map()), if ok { "pass" } else { "fail" });
        let json = json!({ "t": serialize_map(tf.map()), "s": serialize_map(sf.map()), "certificate": ok });
        return Ok(Outcome { text, json, passed: ok });
    };
    let s = load_map(s)?;
    let (a, b) = match interval {
        Some(v) => (parse_scalar(&v[0])?, parse_scalar(&v[1])?),
        None => (s.domain().0.clone(), s.domain().1.clone()),
    };
    let (lo, hi) = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let (y_minus, y_plus) = s.image(&lo, &hi)?;
    let f = t.map().compose(&s)?;
    let out = stay_right_lift(&t, &f, &s, &a, &b, &y_minus, &y_plus)?;
    let mut text = format!("y- = {y_minus}, y+ = {y_plus}\n");
    let mut json = json!({ "y_minus": q(&y_minus), "y_plus": q(&y_plus), "s_hat": serialize_map(&out.s_hat), "certificate": true });
    if let Some(p) = &out.plan {
        text.push_str(&format!("case {:?}, gamma = {}, L = {}\n", p.case, p.gamma, p.reach));
        json["case"] = json!(format!("{:?}", p.case));
        json["gamma"] = q(&p.gamma);
        json["reach"] = q(&p.reach);
    }
    text.push_str("s_hat\n");
    text.push_str(&serialize_map(&out.s_hat));
    Ok(Outcome::pass(text, json))
}

fn cmd_check(input: &str) -> CmdResult {
    let p = SystemPrefix::new(pointed(load_maps(&[input.to_string()])?)?)?;
    let r = check_zigzag_free(&p);
    Ok(Outcome { text: zigzag_text(&r), json: zigzag_json(&r), passed: r.certificate() })
}

fn cmd_bridge(inputs: &[String], out: Option<&Path>, mutation: Option<Mutation>) -> CmdResult {
    let maps = pointed(load_maps(inputs)?)?;
    let [f1, f2, f3] = maps.as_slice() else {
        return Err(Error::Domain(format!("bridging needs exactly three maps, got {}", maps.len())));
    };
    let bf = construct_bridged(f1, f2, f3, mutation)?;
    let report = verify_bridged(&bf, &bf.t1, &bf.f1f2, &bf.t3);
    let s_text = serialize_map(bf.s_tilde.map());
    let b1 = bf.b1_indices();
    let b2 = bf.b2_indices();
    let json = json!({
        "certificate": report.passed(),
        "checks": report_json(&report),
        "b1": b1,
        "b2": b2,
        "provenance": bf.provenance.iter().map(|(a, b, p)| json!({ "from": q(a), "to": q(b), "tag": p.to_string() })).collect::<Vec<_>>(),
        "s_tilde": s_text,
    });
    if let Some(dir) = out {
        let io = |e: std::io::Error| Error::Format(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join("s_tilde.plmap"), &s_text).map_err(io)?;
        std::fs::write(dir.join("s_tilde.provenance"), bf.provenance_report()).map_err(io)?;
        std::fs::write(dir.join("certificate.json"), serde_json::to_string_pretty(&json).expect("json") + "\n").map_err(io)?;
    }
    let text = format!(
        "B1 = {b1:?}\nB2 = {b2:?}\ns_tilde\n{s_text}provenance\n{}{}certificate: {}\n",
        bf.provenance_report(),
        report_text(&report),
        if report.passed() { "pass" } else { "fail" }
    );
    Ok(Outcome { text, json, passed: report.passed() })
}

fn rewire_json(r: &RewireResult<Q>) -> Value {
    json!({
        "certificate": r.certificates_pass(),
        "levels": r.steps.iter().map(|s| json!({
            "level": s.level,
            "checks": report_json(&s.report),
            "class": s.orientations.class().as_str(),
            "positive_witness": witness_json(&s.orientations.positive),
            "negative_witness": witness_json(&s.orientations.negative),
        })).collect::<Vec<_>>(),
        "unused_levels": r.unused_levels,
        "coordinate_map": r.coordinate_map().to_string(),
    })
}

fn rewire_text(r: &RewireResult<Q>) -> String {
    let mut s = String::new();
    for step in &r.steps {
        s.push_str(&format!("level {}: rewired map is {}\n", step.level, step.orientations.class()));
        s.push_str(&report_text(&step.report));
    }
    if !r.unused_levels.is_empty() {
        s.push_str(&format!("unused levels: {:?}\n", r.unused_levels));
    }
    s.push_str(&r.coordinate_map().to_string());
    s.push_str(&format!("certificate: {}\n", if r.certificates_pass() { "pass" } else { "fail" }));
    s
}

fn cmd_rewire(input: &str, out: Option<&Path>, cert: Option<&Path>, thread: Option<&str>, jobs: usize) -> CmdResult {
    let p = SystemPrefix::new(pointed(load_maps(&[input.to_string()])?)?)?;
    let r = rewire_with_jobs(&p, jobs)?;
    let plain: Vec<PlMap<Q>> = r.rewired.maps().iter().map(|f| f.map().clone()).collect();
    let sys_text = serialize_system(&plain);
    let mut json = rewire_json(&r);
    let mut text = String::new();
    if let Some(t) = thread {
        let y = coordinate_map_h(&r, &parse_list(t)?)?;
        let ys: Vec<String> = y.iter().map(|v| v.to_string()).collect();
        text.push_str(&format!("h(x) = ({})\n", ys.join(", ")));
        json["image_thread"] = y.iter().map(q).collect();
    }
    text.push_str(&rewire_text(&r));
    match out {
        Some(path) => std::fs::write(path, &sys_text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?,
        None => text.push_str(&sys_text),
    }
    if let Some(path) = cert {
        std::fs::write(path, serde_json::to_string_pretty(&json).expect("json") + "\n")
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    }
    json["system"] = Value::String(sys_text);
    let passed = r.certificates_pass();
    Ok(Outcome { text, json, passed })
}

fn thread_for(sys: &SimplicialSystem<Q>, thread: Option<&str>, point: Option<&str>) -> Result<Vec<Q>, Error> {
    match (thread, point) {
        (Some(t), _) => parse_list(t),
        (None, Some(p)) => {
            let mut x = vec![parse_scalar(p)?];
            for f in sys.maps().iter().rev() {
                let next = f.evaluate(x.last().expect("nonempty"))?;
                x.push(next);
            }
            x.reverse();
            Ok(x)
        }
        (None, None) => Err(Error::Domain("this phase needs --thread or --point".into())),
    }
}

fn cmd_simplicial(
    sys: &SimplicialSystem<Q>,
    phase: Phase,
    thread: Option<&str>,
    point: Option<&str>,
    budget: usize,
    jobs: usize,
) -> CmdResult {
    let report = check_simplicial(sys);
    let failures: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
    if phase == Phase::Check || !report.passed() {
        let text = if failures.is_empty() { "simplicial: pass\n".to_string() } else { failures.join("\n") + "\nsimplicial: fail\n" };
        return Ok(Outcome { text, json: json!({ "certificate": report.passed(), "failures": failures }), passed: report.passed() });
    }
    let x = thread_for(sys, thread, point)?;
    let verdict = |v: &zigzag::simplicial::Verdict| Outcome::pass(format!("verdict: {v}\n"), json!({ "certificate": true, "verdict": v.to_string() }));
    if phase == Phase::Pipeline {
        return match pipeline(sys, &x, budget, jobs) {
            Ok(PipelineOutcome::Verdict(v)) => Ok(verdict(&v)),
            Ok(PipelineOutcome::Rewired { schedule, result, .. }) => {
                let mut text = format!("schedule: {:?}\n", schedule.indices);
                text.push_str(&rewire_text(&result));
                let plain: Vec<PlMap<Q>> = result.rewired.maps().iter().map(|f| f.map().clone()).collect();
                text.push_str(&serialize_system(&plain));
                let mut json = rewire_json(&result);
                json["schedule"] = json!(schedule.indices);
                json["census"] = json!(schedule.census);
                Ok(Outcome { text, json, passed: result.certificates_pass() })
            }
            Err(e) => Err(match e.error {
                Error::Budget { stage, census } => Error::Budget { stage, census: format!("[{}] {census}", e.stage.as_str()) },
                Error::Hypothesis(m) => Error::Hypothesis(format!("[{}] {m}", e.stage.as_str())),
                Error::Precondition(m) => Error::Precondition(format!("[{}] {m}", e.stage.as_str())),
                Error::InvariantViolation(m) => Error::InvariantViolation(format!("[{}] {m}", e.stage.as_str())),
                other => other,
            }),
        };
    }
    let normalized = match normalize_point(sys, &x)? {
        Normalized::Verdict(v) => return Ok(verdict(&v)),
        Normalized::System { sys, .. } => sys,
    };
    if phase == Phase::Normalize {
        let text = serialize_simplicial(&normalized);
        return Ok(Outcome::pass(text.clone(), json!({ "certificate": true, "system": text })));
    }
    match find_schedule_with_jobs(&normalized, budget, jobs)? {
        Scheduled::Verdict(v) => Ok(verdict(&v)),
        Scheduled::Schedule(s) => {
            let keys: Vec<String> = s.keys.iter().map(|k| serialize_map(k.map())).collect();
            let mut text = format!("schedule: {:?}\n", s.indices);
            for (k, c) in s.census.iter().enumerate() {
                text.push_str(&format!("stage {}: class sizes {c:?}\n", k + 1));
            }
            Ok(Outcome::pass(text, json!({ "certificate": true, "schedule": s.indices, "census": s.census, "keys": keys })))
        }
    }
}

/// Decision procedures versus oracle for one map, at resolutions `d` and `2d`.
fn oracle_compare(f: &PointedMap<Q>, grid: u32) -> Result<Vec<String>, Error> {
    let mut problems = Vec::new();
    let fast = contour_points(f)?;
    if oracle_contour_points(f)? != fast {
        problems.push("contour points differ".to_string());
    }
    let decided = (
        radial_departure_exists(f, Orientation::Positive).is_some(),
        radial_departure_exists(f, Orientation::Negative).is_some(),
    );
    for d in [grid, grid * 2] {
        let seen = oracle_orientations(f, GridSpec::new(d));
        if seen != decided {
            problems.push(format!("radial departures at grid {d}: oracle {seen:?}, decision {decided:?}"));
        }
    }
    Ok(problems)
}

fn golden_entry(name: &str, f: &PointedMap<Q>, grid: u32) -> Result<Value, Error> {
    let c = oracle_contour_points(f)?;
    let (pos, neg) = oracle_orientations(f, GridSpec::new(grid));
    Ok(json!({ "name": name, "map": serialize_map(f.map()), "contour": c.report(), "positive": pos, "negative": neg }))
}

fn cmd_oracle(inputs: &[String], grid: u32, freeze: bool) -> CmdResult {
    if grid == 0 {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    if freeze {
        let mut entries = Vec::new();
        for name in inputs {
            for (k, f) in pointed(load_maps(std::slice::from_ref(name))?)?.iter().enumerate() {
                entries.push(golden_entry(&format!("{name}#{}", k + 1), f, grid)?);
            }
        }
        let json = json!({ "grid": grid, "maps": entries });
        return Ok(Outcome::pass(serde_json::to_string_pretty(&json).expect("json") + "\n", json));
    }
    let mut lines = Vec::new();
    let mut problems = 0usize;
    for name in inputs {
        if name.ends_with(".json") {
            let text = std::fs::read_to_string(name).map_err(|e| Error::Format(format!("{name}: {e}")))?;
            let golden: Value = serde_json::from_str(&text).map_err(|e| Error::Format(format!("{name}: {e}")))?;
            let frozen_grid = golden["grid"].as_u64().unwrap_or(grid as u64) as u32;
            for entry in golden["maps"].as_array().ok_or_else(|| Error::Format(format!("{name}: no `maps` array")))? {
                let label = entry["name"].as_str().unwrap_or("?").to_string();
                let map = match parse_document::<Q>(entry["map"].as_str().unwrap_or_default())? {
                    Document::Map(m) => PointedMap::new(m)?,
                    _ => return Err(Error::Format(format!("{name}: entry {label} is not a map"))),
                };
                let fresh = golden_entry(&label, &map, frozen_grid)?;
                let mut bad: Vec<String> = ["contour", "positive", "negative"]
                    .into_iter()
                    .filter(|k| fresh[*k] != entry[*k])
                    .map(|k| format!("frozen {k} disagrees with the oracle"))
                    .collect();
                bad.extend(oracle_compare(&map, frozen_grid)?);
                problems += bad.len();
                lines.push(format!("{} {label}{}", if bad.is_empty() { "ok" } else { "MISMATCH" }, bad.iter().map(|b| format!(": {b}")).collect::<String>()));
            }
            continue;
        }
        for (k, f) in pointed(load_maps(std::slice::from_ref(name))?)?.iter().enumerate() {
            let bad = oracle_compare(f, grid)?;
            problems += bad.len();
            lines.push(format!("{} {name}#{}{}", if bad.is_empty() { "ok" } else { "MISMATCH" }, k + 1, bad.iter().map(|b| format!(": {b}")).collect::<String>()));
        }
    }
    let text = lines.join("\n") + "\n";
    Ok(Outcome { text, json: json!({ "certificate": problems == 0, "results": lines }), passed: problems == 0 })
}

fn cmd_plot(inputs: &[String], overlays: &[String], bridge: bool, out: Option<&Path>) -> CmdResult {
    let maps = load_maps(inputs)?;
    let names: Vec<String> = if maps.len() == inputs.len() {
        inputs.to_vec()
    } else {
        (1..=maps.len()).map(|k| format!("f{k}")).collect()
    };
    let mut panels: Vec<Panel<Q>> = maps.iter().cloned().zip(names).map(|(m, n)| Panel::single(n, m)).collect();
    if bridge {
        let ps = pointed(maps.clone())?;
        let [f1, f2, f3] = ps.as_slice() else {
            return Err(Error::Domain("--bridge needs exactly three maps".into()));
        };
        let bf = construct_bridged(f1, f2, f3, None)?;
        panels[1] = panels[1].clone().with_overlay(bf.s_tilde.map().clone());
    }
    for spec in overlays {
        let (k, file) = spec.split_once('=').ok_or_else(|| Error::Format(format!("overlay `{spec}` is not K=FILE")))?;
        let k: usize = k.parse().map_err(|_| Error::Format(format!("bad panel number in `{spec}`")))?;
        if k == 0 || k > panels.len() {
            return Err(Error::Domain(format!("no panel {k}")));
        }
        let g = load_map(file)?;
        panels[k - 1] = panels[k - 1].clone().with_overlay(g);
    }
    let svg = plot_svg(&panels, &PlotStyle::default());
    if let Some(path) = out {
        std::fs::write(path, &svg).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        return Ok(Outcome::pass(format!("wrote {}\n", path.display()), json!({ "written": path.display().to_string() })));
    }
    Ok(Outcome::pass(svg.clone(), json!({ "svg": svg })))
}
