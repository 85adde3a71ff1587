//! `dfc`: generate optimal delayed-feedback-control coefficients, export
//! stability curves and multiplier regions, simulate controlled chaotic
//! maps, hunt for stabilized cycles, and run the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 I/O error, 4 numerical divergence.

mod config;
mod output;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dfc_core::coeffs::{mu_bound, ControlConfig};
use dfc_core::dynamics::{
    classify_detected, detect_cycles_with, iterate_map, simulate, CycleClass, DynamicsError,
    MapSpec,
};
use dfc_core::stability::{boundary_curve, multiplier_region, mu_margin, CurveSample};

use config::RunConfig;
use output::{f, float_array, json_array, json_str, JsonObject};
use verify::{run_suite, Suite};

/// Environment variable holding the default directory for output files.
const OUT_DIR_ENV: &str = "DFC_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "dfc",
    version,
    about = "Optimal delayed feedback control for one-dimensional discrete maps"
)]
struct Cli {
    /// TOML file overriding numeric defaults (grids, transient, tolerances).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the optimal feedback weights, strength coefficients and margin.
    Coeffs(CoeffsArgs),
    /// Export the unit-circle image curve and the inverted multiplier region.
    Region(RegionArgs),
    /// Run one closed-loop trajectory and summarize it.
    Simulate(SimulateArgs),
    /// Hunt for stabilized cycles from many random initial points.
    Detect(DetectArgs),
    /// Run a verification suite and print its residual table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// Cycle length (1 or 2).
    #[arg(long = "T")]
    cycle_length: usize,
    /// Depth of the control (number of weights).
    #[arg(long = "n")]
    depth: usize,
    /// Robustness perturbation; bare flag uses 0.005.
    #[arg(long = "eps-trick", num_args = 0..=1, default_missing_value = "0.005")]
    eps_trick: Option<f64>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long = "T")]
    cycle_length: usize,
    #[arg(long = "n")]
    depth: usize,
    /// Points sampled on the unit circle.
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    #[arg(long = "eps-trick", num_args = 0..=1, default_missing_value = "0.005")]
    eps_trick: Option<f64>,
    /// Output path prefix; writes PREFIX.curve.csv and PREFIX.region.csv,
    /// or PREFIX.json with --format json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Logistic,
    Soc,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    map: MapKind,
    /// Logistic parameter.
    #[arg(long)]
    h: Option<f64>,
    /// SOC parameter.
    #[arg(long)]
    ha: Option<f64>,
    /// Fold the map this many times before controlling it.
    #[arg(long, default_value_t = 1)]
    iterate: usize,
    #[arg(long = "T")]
    cycle_length: usize,
    #[arg(long = "n")]
    depth: usize,
    #[arg(long = "eps-trick", num_args = 0..=1, default_missing_value = "0.005")]
    eps_trick: Option<f64>,
    #[arg(long)]
    x0: f64,
    #[arg(long)]
    steps: usize,
    /// Recorded in the output for provenance.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV destination (columns k,x,u).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Longest period probed when summarizing the terminal state.
    #[arg(long = "max-period", default_value_t = 8)]
    max_period: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long, value_enum)]
    map: MapKind,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    ha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    iterate: usize,
    #[arg(long = "T")]
    cycle_length: usize,
    #[arg(long = "n")]
    depth: usize,
    #[arg(long = "eps-trick", num_args = 0..=1, default_missing_value = "0.005")]
    eps_trick: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-period", default_value_t = 8)]
    max_period: usize,
    /// Steps discarded before detection (overrides the config file).
    #[arg(long)]
    transient: Option<usize>,
    /// Cycle report JSON destination; stdout gets the summary.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Verification,
    Usage(String),
    Io(String),
    Divergence(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Divergence(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(err) => {
                eprintln!("error: {err:#}");
                return ExitCode::from(3);
            }
        },
        None => RunConfig::default(),
    };
    let result = match cli.command {
        Command::Coeffs(args) => cmd_coeffs(&args),
        Command::Region(args) => cmd_region(&args),
        Command::Simulate(args) => cmd_simulate(&args, &cfg),
        Command::Detect(args) => cmd_detect(&args, &cfg),
        Command::Verify(args) => cmd_verify(&args, &cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Verification => eprintln!("verification failed"),
                Failure::Usage(msg) => eprintln!("usage error: {msg}"),
                Failure::Io(msg) => eprintln!("i/o error: {msg}"),
                Failure::Divergence(msg) => eprintln!("divergence: {msg}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn control_config(
    cycle_length: usize,
    depth: usize,
    eps_trick: Option<f64>,
) -> Result<ControlConfig, Failure> {
    if depth == 0 {
        return Err(Failure::Usage("depth must be at least 1".into()));
    }
    let cfg = ControlConfig::optimal(cycle_length, depth)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match eps_trick {
        Some(eps) if eps < 0.0 => Err(Failure::Usage("eps-trick must be nonnegative".into())),
        Some(eps) => Ok(cfg.with_eps_trick(eps)),
        None => Ok(cfg),
    }
}

fn build_map(kind: MapKind, h: Option<f64>, ha: Option<f64>) -> Result<MapSpec, Failure> {
    match kind {
        MapKind::Logistic => {
            let h = h.ok_or_else(|| Failure::Usage("logistic map needs --h".into()))?;
            MapSpec::logistic(h).map_err(|e| Failure::Usage(e.to_string()))
        }
        MapKind::Soc => {
            let ha = ha.ok_or_else(|| Failure::Usage("soc map needs --ha".into()))?;
            MapSpec::soc(ha).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

/// Resolves an output path against DFC_OUT_DIR when it is relative.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Failure::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_coeffs(args: &CoeffsArgs) -> Result<(), Failure> {
    let cfg = control_config(args.cycle_length, args.depth, args.eps_trick)?;
    let eps = cfg.strength_coefficients();
    // The closed-form margin belongs to the unperturbed family; a
    // perturbed vector gets its margin measured.
    let mu = if cfg.eps_trick == 0.0 {
        mu_bound(args.cycle_length, args.depth).map_err(|e| Failure::Usage(e.to_string()))?
    } else {
        mu_margin(&cfg.coeffs, args.cycle_length)
    };
    if args.json {
        let mut o = JsonObject::new();
        o.push_usize("T", args.cycle_length)
            .push_usize("n", args.depth)
            .push_raw("a", float_array(cfg.coeffs.weights()))
            .push_raw("epsilon", float_array(&eps))
            .push_f64("mu_bound", mu)
            .push_usize("prehistory_depth", cfg.prehistory_depth());
        if cfg.eps_trick > 0.0 {
            o.push_f64("eps_trick", cfg.eps_trick);
        }
        println!("{}", o.finish());
    } else {
        println!("T = {}, n = {}", args.cycle_length, args.depth);
        if cfg.eps_trick > 0.0 {
            println!("eps-trick = {}", cfg.eps_trick);
        }
        println!("a       = [{}]", join_short(cfg.coeffs.weights()));
        println!("epsilon = [{}]", join_short(&eps));
        println!("mu_n(T) = {mu:.6}");
        println!("N*      = {}", cfg.prehistory_depth());
    }
    Ok(())
}

fn join_short(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn curve_csv(samples: &[CurveSample], re_name: &str, im_name: &str) -> String {
    let mut out = String::from("omega,");
    out.push_str(re_name);
    out.push(',');
    out.push_str(im_name);
    out.push('\n');
    for s in samples {
        out.push_str(&format!("{},{},{}\n", f(s.omega), f(s.point.re), f(s.point.im)));
    }
    out
}

fn curve_json(samples: &[CurveSample]) -> String {
    json_array(samples.iter().map(|s| {
        let mut o = JsonObject::new();
        o.push_f64("omega", s.omega)
            .push_f64("re", s.point.re)
            .push_f64("im", s.point.im);
        o.finish()
    }))
}

fn cmd_region(args: &RegionArgs) -> Result<(), Failure> {
    if args.samples < 16 {
        return Err(Failure::Usage("need at least 16 samples".into()));
    }
    let cfg = control_config(args.cycle_length, args.depth, args.eps_trick)?;
    let curve = boundary_curve(&cfg.coeffs, args.cycle_length, args.samples);
    let region = multiplier_region(&cfg.coeffs, args.cycle_length, args.samples);

    let prefix = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("region_T{}_n{}", args.cycle_length, args.depth)));
    let prefix = resolve_out(&prefix);

    match args.format {
        FileFormat::Csv => {
            let curve_path = prefix.with_extension("curve.csv");
            let region_path = prefix.with_extension("region.csv");
            write_file(&curve_path, &curve_csv(&curve, "re", "im"))?;
            write_file(&region_path, &curve_csv(&region, "re_inv", "im_inv"))?;
            println!("wrote {}", curve_path.display());
            println!("wrote {}", region_path.display());
        }
        FileFormat::Json => {
            let path = prefix.with_extension("json");
            let mut o = JsonObject::new();
            o.push_usize("T", args.cycle_length)
                .push_usize("n", args.depth)
                .push_usize("samples", args.samples)
                .push_f64("eps_trick", cfg.eps_trick)
                .push_raw("curve", curve_json(&curve))
                .push_raw("region", curve_json(&region));
            write_file(&path, &(o.finish() + "\n"))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, run_cfg: &RunConfig) -> Result<(), Failure> {
    if args.steps == 0 {
        return Err(Failure::Usage("need at least one step".into()));
    }
    if args.iterate == 0 {
        return Err(Failure::Usage("iterate must be at least 1".into()));
    }
    let base = build_map(args.map, args.h, args.ha)?;
    let map = iterate_map(&base, args.iterate);
    let cfg = control_config(args.cycle_length, args.depth, args.eps_trick)?;

    let trajectory = simulate(&map, &cfg, args.x0, args.steps).map_err(|e| match e {
        DynamicsError::Diverged { step } => {
            Failure::Divergence(format!("trajectory diverged at step {step}"))
        }
        other => Failure::Divergence(other.to_string()),
    })?;

    let out_path = match &args.out {
        Some(p) => {
            let p = resolve_out(p);
            let mut csv = String::from("k,x,u\n");
            for (k, (x, u)) in trajectory
                .states
                .iter()
                .zip(&trajectory.controls)
                .enumerate()
            {
                csv.push_str(&format!("{k},{},{}\n", f(*x), f(*u)));
            }
            write_file(&p, &csv)?;
            Some(p)
        }
        None => None,
    };

    let tail_control = trajectory.max_control_tail(0.1);
    let terminal = trajectory.terminal_cycle(args.max_period, run_cfg.detect.tol);

    let mut o = JsonObject::new();
    o.push_str("map", &map.name())
        .push_usize("iterate", args.iterate)
        .push_usize("T", args.cycle_length)
        .push_usize("n", args.depth)
        .push_f64("eps_trick", cfg.eps_trick)
        .push_f64("x0", args.x0)
        .push_usize("steps", args.steps);
    match args.seed {
        Some(s) => o.push_raw("seed", s.to_string()),
        None => o.push_raw("seed", "null"),
    };
    o.push_f64("final_state", trajectory.final_state())
        .push_f64("max_control_tail", tail_control);
    match &terminal {
        Some((p, pts)) => {
            let mut c = JsonObject::new();
            c.push_usize("period", *p)
                .push_raw("points", float_array(pts));
            o.push_raw("terminal_cycle", c.finish());
        }
        None => {
            o.push_raw("terminal_cycle", "null");
        }
    }
    match &out_path {
        Some(p) => o.push_str("out", &p.display().to_string()),
        None => o.push_raw("out", "null"),
    };

    if args.json {
        println!("{}", o.finish());
    } else {
        println!("map: {}  T={}  n={}", map.name(), args.cycle_length, args.depth);
        println!("final state: {:.12}", trajectory.final_state());
        println!("max |u| over last 10%: {tail_control:.3e}");
        match &terminal {
            Some((p, pts)) => println!("terminal cycle: period {p}, points [{}]", join_short(pts)),
            None => println!("terminal cycle: none detected"),
        }
        if let Some(p) = &out_path {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn cmd_detect(args: &DetectArgs, run_cfg: &RunConfig) -> Result<(), Failure> {
    if args.trials == 0 || args.max_period == 0 {
        return Err(Failure::Usage("trials and max-period must be positive".into()));
    }
    if args.iterate == 0 {
        return Err(Failure::Usage("iterate must be at least 1".into()));
    }
    let base = build_map(args.map, args.h, args.ha)?;
    let map = iterate_map(&base, args.iterate);
    let cfg = control_config(args.cycle_length, args.depth, args.eps_trick)?;
    let mut opts = run_cfg.detect;
    if let Some(t) = args.transient {
        opts.transient = t;
    }
    let report = detect_cycles_with(&map, &cfg, args.trials, args.seed, args.max_period, opts);

    let claimed = args.iterate * args.cycle_length;
    let cycle_objects: Vec<String> = report
        .reports
        .iter()
        .map(|c| {
            let mut o = JsonObject::new();
            o.push_usize("period", c.period)
                .push_raw("points", float_array(&c.points))
                .push_f64("multiplier", c.multiplier)
                .push_bool("converged", c.converged)
                .push_f64("residual", c.residual)
                .push_bool("near_kink", c.near_kink)
                .push_usize("trial_hits", c.trial_hits)
                .push_f64("x0_example", c.x0_example);
            if c.converged {
                if let Ok(class) = classify_detected(c, &base, claimed) {
                    let label = match class.label {
                        CycleClass::GenuineCycle => "genuine-cycle",
                        CycleClass::DivisorCycle => "divisor-cycle",
                        CycleClass::Equilibrium => "equilibrium",
                    };
                    let mut cl = JsonObject::new();
                    cl.push_str("label", label)
                        .push_usize("base_period", class.base_period)
                        .push_f64("base_multiplier", class.base_multiplier);
                    o.push_raw("classification", cl.finish());
                }
            }
            o.finish()
        })
        .collect();

    let mut o = JsonObject::new();
    o.push_str("map", &map.name())
        .push_usize("iterate", args.iterate)
        .push_usize("T", args.cycle_length)
        .push_usize("n", args.depth)
        .push_usize("trials", args.trials)
        .push_raw("seed", args.seed.to_string())
        .push_usize("max_period", args.max_period)
        .push_usize("transient", opts.transient)
        .push_f64("tolerance", opts.tol)
        .push_raw("reports", json_array(cycle_objects));
    let json = o.finish();

    if let Some(p) = &args.out {
        let p = resolve_out(p);
        write_file(&p, &(json.clone() + "\n"))?;
        if !args.json {
            println!("wrote {}", p.display());
        }
    }
    if args.json {
        println!("{json}");
    } else {
        let converged: Vec<_> = report.reports.iter().filter(|c| c.converged).collect();
        let failed = report.reports.len() - converged.len();
        println!(
            "map: {}  T={}  n={}  trials={}  seed={}",
            map.name(),
            args.cycle_length,
            args.depth,
            args.trials,
            args.seed
        );
        for c in &converged {
            println!(
                "period {}: [{}]  multiplier {:.6}  residual {:.2e}  hits {}{}",
                c.period,
                join_short(&c.points),
                c.multiplier,
                c.residual,
                c.trial_hits,
                if c.near_kink { "  (near kink)" } else { "" }
            );
        }
        println!("non-converged trials: {failed}");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> Result<(), Failure> {
    let checks = run_suite(args.suite, cfg);
    let all_passed = checks.iter().all(|c| c.passed);
    if args.json {
        let items = checks.iter().map(|c| {
            let mut o = JsonObject::new();
            o.push_str("name", &c.name)
                .push_f64("value", c.value)
                .push_f64("threshold", c.threshold)
                .push_bool("passed", c.passed);
            o.finish()
        });
        let mut o = JsonObject::new();
        o.push_raw("suite", json_str(args.suite.name()))
            .push_raw("checks", json_array(items))
            .push_bool("passed", all_passed);
        println!("{}", o.finish());
    } else {
        let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &checks {
            println!(
                "{:<width$}  {:>12.3e}  (<= {:.0e})  {}",
                c.name,
                c.value,
                c.threshold,
                if c.passed { "ok" } else { "FAIL" },
            );
        }
        println!(
            "suite {}: {}",
            args.suite.name(),
            if all_passed { "all checks passed" } else { "FAILED" }
        );
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
