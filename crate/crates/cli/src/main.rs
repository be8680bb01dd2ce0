mod bundle;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use irl_core::experiments::{
    bounds_table, concentration_suite, lipschitz_suite, metrics_suite, run_cell, scaling, summarize, Axis,
    CellSpec, HausdorffMode, ProblemSource, RunRecord, SuiteReport,
};
use irl_core::hausdorff::{hausdorff, Method};
use irl_core::instances::{build_named, Params, REGISTRY};
use irl_core::mdp::{Dims, Restriction};
use irl_core::polytope::build_polytope;
use irl_core::usirl::Variant;
use irl_core::vertex::DEFAULT_DIM_CAP;
use irl_core::IrlError;
use serde_json::json;

use bundle::BundleFile;
use config::{ExperimentConfig, HausdorffSetting};

const EXIT_SUITE_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "irlkit", version, about = "Feasible reward sets and uniform-sampling IRL experiments")]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and suites.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output path; stdout when omitted (CSV commands default to the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compute the exact feasible-set Hausdorff distance per run.
    #[arg(long, global = true)]
    exact_hausdorff: bool,
    /// Print the effective configuration with every default and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a library instance as JSON.
    Instance {
        /// Registry name; `list` prints the registry.
        name: String,
        /// Parameters as `key=value`.
        #[arg(short, long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Hausdorff distance between the feasible sets of two instance files.
    /// With one file, its stored alternative problem is the second set.
    Hausdorff {
        file_a: PathBuf,
        file_b: Option<PathBuf>,
        /// Restriction tag; defaults to the first file's, else `none`.
        #[arg(long)]
        restriction: Option<String>,
        /// Comma-separated margins for `beta-margin`.
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        dim_cap: usize,
    },
    /// Seeded US-IRL sweep over the configured grid; one CSV row per run.
    Run,
    /// Upper and lower sample-complexity bounds.
    Bounds {
        #[arg(short = 'S', long)]
        states: usize,
        #[arg(short = 'A', long)]
        actions: usize,
        #[arg(short = 'H', long)]
        horizon: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        pi_min: Option<f64>,
    },
    /// Run a property suite: lipschitz, metrics, concentration or all.
    Verify {
        suite: String,
        /// Random pairs for the lipschitz suite.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Random triples for the metrics suite.
        #[arg(long, default_value_t = 200)]
        triples: usize,
    },
    /// Mean stopping time along one axis and its log-log slope.
    Scaling {
        /// H, S or A; overrides the configuration.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values; overrides the configuration.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Exact,
    Randomized,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Suite(String),
}

impl From<IrlError> for Failure {
    fn from(e: IrlError) -> Self {
        match e {
            IrlError::Numerical(_) | IrlError::DimensionCap { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Usage(format!("i/o error: {e}"))
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Suite(m)) => {
            eprintln!("FAILED: {m}");
            ExitCode::from(EXIT_SUITE_FAILURE)
        }
    }
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.base_seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if cli.exact_hausdorff && cfg.hausdorff == HausdorffSetting::Off {
        cfg.hausdorff = HausdorffSetting::Exact;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> CmdResult {
    let cfg = effective_config(cli)?;
    if cli.print_config {
        return emit(&serde_json::to_string_pretty(&cfg).expect("config serializes"), None);
    }
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let Some(command) = &cli.command else {
        return Err(Failure::Usage("no subcommand given (see --help)".into()));
    };
    match command {
        Command::Instance { name, params } => cmd_instance(name, params, cli.out.as_deref()),
        Command::Hausdorff {
            file_a,
            file_b,
            restriction,
            beta,
            method,
            samples,
            dim_cap,
        } => {
            let method = match method {
                MethodArg::Exact => Method::Exact { dim_cap: *dim_cap },
                MethodArg::Randomized => Method::Randomized {
                    samples: *samples,
                    seed: cfg.base_seed,
                },
            };
            cmd_hausdorff(file_a, file_b.as_deref(), restriction.as_deref(), beta.clone(), method, cli.out.as_deref())
        }
        Command::Run => cmd_run(&cfg),
        Command::Bounds {
            states,
            actions,
            horizon,
            eps,
            delta,
            pi_min,
        } => cmd_bounds(Dims::new(*states, *actions, *horizon), *eps, *delta, *pi_min, cli.out.as_deref()),
        Command::Verify { suite, pairs, triples } => cmd_verify(suite, *pairs, *triples, cfg.base_seed, cli.out.as_deref()),
        Command::Scaling { axis, values } => cmd_scaling(&cfg, axis.as_deref(), values.clone()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(io_err),
        None => {
            let mut so = std::io::stdout().lock();
            let written = so.write_all(text.as_bytes()).and_then(|()| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    so.write_all(b"\n")
                }
            });
            match written {
                // A closed pipe (`| head`) is not an error for us.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(io_err),
            }
        }
    }
}

/// JSON number, or the strings `inf`/`nan` which JSON cannot represent.
fn num(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn parse_params(raw: &[String]) -> Result<Params, Failure> {
    let mut p = BTreeMap::new();
    for kv in raw {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("parameter `{kv}` is not KEY=VALUE")))?;
        p.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(p)
}

fn cmd_instance(name: &str, params: &[String], out: Option<&Path>) -> CmdResult {
    if name == "list" {
        return emit(&REGISTRY.join("\n"), out);
    }
    if !REGISTRY.contains(&name) {
        return Err(Failure::Usage(format!(
            "unknown instance `{name}`; known: {}",
            REGISTRY.join(", ")
        )));
    }
    let b = build_named(name, &parse_params(params)?)?;
    let text = serde_json::to_string_pretty(&BundleFile::from_bundle(&b)).expect("bundle serializes");
    emit(&text, out)
}

fn read_bundle(path: &Path) -> Result<BundleFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    // Plain instance files carry no name or restriction.
    let mut v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad JSON in {}: {e}", path.display())))?;
    if let Some(obj) = v.as_object_mut() {
        obj.entry("name").or_insert_with(|| json!(path.display().to_string()));
        obj.entry("restriction").or_insert_with(|| json!("none"));
    }
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("bad instance file {}: {e}", path.display())))
}

fn cmd_hausdorff(
    file_a: &Path,
    file_b: Option<&Path>,
    restriction: Option<&str>,
    beta: Option<Vec<f64>>,
    method: Method,
    out: Option<&Path>,
) -> CmdResult {
    let a = read_bundle(file_a)?;
    let (m1, p1) = a.primary()?;
    let (m2, p2) = match file_b {
        Some(f) => read_bundle(f)?.primary()?,
        None => a.alternative()?,
    };
    if m1.dims() != m2.dims() {
        return Err(Failure::Usage("the two instances have different S, A, H".into()));
    }
    let restriction = match restriction {
        Some(tag) => Restriction::from_tag(tag, beta.or_else(|| a.beta.clone()))?,
        None => a.restriction()?,
    };
    let p = build_polytope(&m1, &p1, restriction.clone())?;
    let q = build_polytope(&m2, &p2, restriction.clone())?;
    let r = hausdorff(&p, &q, method)?;
    let directed = |d: &irl_core::hausdorff::Directed| {
        json!({"value": num(d.value), "witness": d.witness, "nearest": d.nearest})
    };
    let report = json!({
        "value": num(r.value),
        "exactness": r.exactness,
        "emptiness": r.emptiness,
        "forward": directed(&r.forward),
        "backward": directed(&r.backward),
        "blocks": r.blocks,
        "max_block_dim": r.max_block_dim,
        "restriction": restriction.tag(),
        "first_empty": p.is_empty()?,
        "second_empty": q.is_empty()?,
    });
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"), out)
}

const RUN_HEADER: [&str; 19] = [
    "S",
    "A",
    "H",
    "epsilon",
    "delta",
    "variant",
    "pi_min",
    "seed",
    "tau",
    "rounds",
    "eps_tau",
    "capped",
    "hausdorff_exact",
    "hausdorff_value",
    "hausdorff_upper",
    "upper_bound",
    "lower_bound",
    "tau_within_bound",
    "error",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn run_row(r: &RunRecord) -> Vec<String> {
    let d = r.spec.dims;
    let h = r.hausdorff;
    vec![
        d.s.to_string(),
        d.a.to_string(),
        d.h.to_string(),
        r.spec.epsilon.to_string(),
        r.spec.delta.to_string(),
        r.spec.variant.tag().to_string(),
        opt(r.spec.pi_min),
        r.seed.to_string(),
        r.tau.to_string(),
        r.rounds.to_string(),
        r.eps_tau.to_string(),
        r.capped.to_string(),
        h.map(|h| h.exact.to_string()).unwrap_or_default(),
        opt(h.filter(|h| h.exact).map(|h| h.lower)),
        opt(h.map(|h| h.upper)),
        r.upper_bound.to_string(),
        r.lower_bound.to_string(),
        r.tau_within_bound().to_string(),
        r.error.clone().unwrap_or_default(),
    ]
}

fn cell_key(c: &CellSpec) -> (usize, usize, usize, u64, u64, Variant, u64) {
    (
        c.dims.s,
        c.dims.a,
        c.dims.h,
        c.epsilon.to_bits(),
        c.delta.to_bits(),
        c.variant,
        c.pi_min.map_or(0, f64::to_bits),
    )
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_summary.csv"))
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Usage(format!("csv error: {e}"))
}

fn cmd_run(cfg: &ExperimentConfig) -> CmdResult {
    cfg.validate()?;
    let source = cfg.problem_source()?;
    let cells = cfg.cells(&source)?;
    let seeds = cfg.seed_list();
    let mode = match cfg.hausdorff {
        HausdorffSetting::Off => HausdorffMode::Skip,
        HausdorffSetting::Exact => HausdorffMode::ExactOnly,
        HausdorffSetting::Bracket => HausdorffMode::ExactOrBracket,
    };
    let mut all: Vec<(CellSpec, Vec<RunRecord>)> = cells
        .iter()
        .map(|c| (c.clone(), run_cell(c, &source, &seeds, mode)))
        .collect();
    all.sort_by(|x, y| cell_key(&x.0).partial_cmp(&cell_key(&y.0)).expect("keys compare"));

    let mut w = csv::Writer::from_path(&cfg.out).map_err(csv_err)?;
    w.write_record(RUN_HEADER).map_err(csv_err)?;
    for (_, records) in &all {
        for r in records {
            w.write_record(run_row(r)).map_err(csv_err)?;
        }
    }
    w.flush().map_err(io_err)?;

    let summary = summary_path(&cfg.out);
    let mut sw = csv::Writer::from_path(&summary).map_err(csv_err)?;
    sw.write_record([
        "S",
        "A",
        "H",
        "epsilon",
        "delta",
        "variant",
        "pi_min",
        "runs",
        "mean_tau",
        "tau_within_bound",
        "hausdorff_evaluated",
        "failures",
        "success_fraction",
        "allowed_failure",
        "pac_ok",
    ])
    .map_err(csv_err)?;
    let mut problems = Vec::new();
    for (c, records) in &all {
        let s = summarize(records);
        let evaluated = records.iter().filter(|r| r.hausdorff.is_some()).count();
        let judged = evaluated == records.len();
        let pac_ok = s.failure_fraction <= s.allowed_failure;
        if s.tau_within_bound < s.runs {
            problems.push(format!(
                "{} of {} runs exceeded the upper bound at S={} A={} H={} {}",
                s.runs - s.tau_within_bound,
                s.runs,
                c.dims.s,
                c.dims.a,
                c.dims.h,
                c.variant.tag()
            ));
        }
        if judged && !pac_ok {
            problems.push(format!("PAC failure fraction {:.3} above {:.3}", s.failure_fraction, s.allowed_failure));
        }
        sw.write_record([
            c.dims.s.to_string(),
            c.dims.a.to_string(),
            c.dims.h.to_string(),
            c.epsilon.to_string(),
            c.delta.to_string(),
            c.variant.tag().to_string(),
            opt(c.pi_min),
            s.runs.to_string(),
            s.mean_tau.to_string(),
            s.tau_within_bound.to_string(),
            evaluated.to_string(),
            if judged { s.failures.to_string() } else { String::new() },
            if judged { (1.0 - s.failure_fraction).to_string() } else { String::new() },
            s.allowed_failure.to_string(),
            if judged { pac_ok.to_string() } else { String::new() },
        ])
        .map_err(csv_err)?;
    }
    sw.flush().map_err(io_err)?;
    eprintln!("wrote {} and {}", cfg.out.display(), summary.display());
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suite(problems.join("; ")))
    }
}

fn cmd_bounds(d: Dims, eps: f64, delta: f64, pi_min: Option<f64>, out: Option<&Path>) -> CmdResult {
    if d.s == 0 || d.a == 0 || d.h == 0 {
        return Err(Failure::Usage("S, A and H must be positive".into()));
    }
    let rows = bounds_table(d, eps, delta, pi_min)?;
    for r in rows.iter().filter(|r| !r.in_range) {
        eprintln!("warning: {} evaluated outside its validity range", r.bound);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bound", "value", "in_range"]).map_err(csv_err)?;
    for r in &rows {
        w.write_record([r.bound.clone(), r.value.to_string(), r.in_range.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&String::from_utf8(bytes).expect("utf8 csv"), out)
}

fn cmd_verify(suite: &str, pairs: usize, triples: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let names: Vec<&str> = match suite {
        "all" => vec!["lipschitz", "metrics", "concentration"],
        "lipschitz" | "metrics" | "concentration" => vec![suite],
        other => return Err(Failure::Usage(format!("unknown suite `{other}`"))),
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for n in names {
        reports.push(match n {
            "lipschitz" => lipschitz_suite(pairs, seed)?,
            "metrics" => metrics_suite(triples, seed)?,
            _ => concentration_suite(seed)?,
        });
    }
    for r in &reports {
        for c in &r.checks {
            eprintln!("[{}] {}/{}: {}", if c.passed { "pass" } else { "FAIL" }, r.suite, c.name, c.detail);
        }
    }
    emit(&serde_json::to_string_pretty(&reports).expect("report serializes"), out)?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("{}/{}", r.suite, c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suite(failed.join(", ")))
    }
}

fn cmd_scaling(cfg: &ExperimentConfig, axis: Option<&str>, values: Option<Vec<usize>>) -> CmdResult {
    cfg.validate()?;
    let axis = Axis::parse(axis.unwrap_or(&cfg.scaling.axis))?;
    let values = values.unwrap_or_else(|| cfg.scaling.values.clone());
    if !matches!(cfg.instance, config::InstanceSource::Random) {
        return Err(Failure::Usage("scaling needs random instances".into()));
    }
    let cells = cfg.cells(&ProblemSource::Random)?;
    let base = cells[0].clone();
    let (points, slope) = scaling(axis, &values, &base, &cfg.seed_list())?;
    let mut w = csv::Writer::from_path(&cfg.out).map_err(csv_err)?;
    w.write_record(["axis", "value", "variant", "seed", "tau"]).map_err(csv_err)?;
    let seeds = cfg.seed_list();
    for p in &points {
        for (seed, tau) in seeds.iter().zip(&p.taus) {
            w.write_record([
                format!("{axis:?}"),
                p.value.to_string(),
                base.variant.tag().to_string(),
                seed.to_string(),
                tau.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    let report = json!({
        "axis": format!("{axis:?}"),
        "variant": base.variant.tag(),
        "points": points.iter().map(|p| json!({"value": p.value, "mean_tau": p.mean_tau})).collect::<Vec<_>>(),
        "slope": slope,
    });
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"), None)
}
