use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use shiftspread::classifier::RegionLabel;
use shiftspread::verify::{summarize, Status, VerifyOutcome};
use shiftspread::viscosity::{self, PiecewiseProfile};
use shiftspread::{simulator, Error, ScenarioConfig, Side, Species};

const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "shiftspread", version, about = "Spreading speeds of prey and predator in a shifting habitat")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON by extension).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's output.dir, then the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    /// Relative tolerance for speed comparisons.
    #[arg(long)]
    tolerance_speed: Option<f64>,
    /// Simulation horizon T.
    #[arg(long)]
    horizon: Option<f64>,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check the standing assumptions.
    Validate(Common),
    /// Predicted prey speeds, predator bounds and terrace layout.
    Speeds(Common),
    /// Parameter region of each species on each side.
    Classify(Common),
    /// Build the prey viscosity profile(s) and write JSON plus sampled CSV.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        /// Also run the sub/supersolution certification.
        #[arg(long)]
        certify: bool,
    },
    /// Simulate and write the front trajectory, snapshots and a JSON summary.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Full cross-check of predictions against simulation; accepts a directory.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
        /// Scenarios run concurrently when --config is a directory.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}

fn exit_code_of(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<std::io::Error>().is_some() {
        EXIT_IO
    } else if let Some(err) = e.downcast_ref::<Error>() {
        Status::of_error(err).exit_code() as u8
    } else {
        1
    }
}

fn load(path: &Path) -> Result<ScenarioConfig> {
    let cfg = ScenarioConfig::load(path).with_context(|| format!("reading {}", path.display()))??;
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &ScenarioConfig) -> PathBuf {
    common.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Stdout closed early (e.g. piped into `head`) is not an error.
fn print_json(value: &impl serde::Serialize) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serialisable");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn apply(cfg: &mut ScenarioConfig, o: &Overrides) -> Result<()> {
    if let Some(t) = o.tolerance_speed {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Config(format!("--tolerance-speed must be nonnegative, got {t}")).into());
        }
        cfg.verify.speed_rel = t;
    }
    if let Some(h) = o.horizon {
        cfg.simulation.horizon = h;
    }
    if let Some(s) = &o.snapshots {
        cfg.simulation.snapshots = s.clone();
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Validate(common) => {
            let cfg = load(&common.config)?;
            let report = shiftspread::validate(&cfg.scenario());
            print_json(&report);
            Ok(if report.all_passed() { 0 } else { Status::AssumptionFailure.exit_code() as u8 })
        }
        Command::Speeds(common) => {
            let cfg = load(&common.config)?;
            print_json(&shiftspread::speed_report(&cfg.scenario())?);
            Ok(0)
        }
        Command::Classify(common) => {
            let cfg = load(&common.config)?;
            print_json(&classify(&cfg)?);
            Ok(0)
        }
        Command::Profile { common, side, certify } => profile(&common, side, certify),
        Command::Simulate { common, overrides } => simulate(&common, &overrides),
        Command::Verify { common, overrides, jobs } => verify(&common, &overrides, jobs),
    }
}

fn classify(cfg: &ScenarioConfig) -> Result<serde_json::Value> {
    let s = cfg.scenario();
    shiftspread::validate(&s).require(&["J", "parameters", "A", "H1"])?;
    let mut labels = Vec::new();
    for species in [Species::Prey, Species::Predator] {
        let g = s.geometry(species)?;
        let params = s.species(species);
        for side in [Side::Right, Side::Left] {
            let decay = params.decay(side);
            let region = match side {
                Side::Right => g.classify_right(decay, s.c_e)?,
                Side::Left => g.classify_left(decay, s.c_e)?,
            };
            let speed = g.speed(side, decay, s.c_e)?;
            labels.push(json!({
                "label": RegionLabel { side, species, region, on_boundary_band: region.on_boundary_band() },
                "decay": decay,
                "speed": speed,
            }));
        }
    }
    Ok(json!({ "c_e": s.c_e, "regions": labels }))
}

fn side_list(side: SideArg) -> Vec<Side> {
    match side {
        SideArg::Right => vec![Side::Right],
        SideArg::Left => vec![Side::Left],
        SideArg::Both => vec![Side::Right, Side::Left],
    }
}

fn side_tag(side: Side) -> &'static str {
    match side {
        Side::Right => "right",
        Side::Left => "left",
    }
}

fn profile_csv(p: &PiecewiseProfile) -> String {
    let reach = p.breakpoints().into_iter().filter(|b| b.is_finite()).fold(p.zero_front.abs(), |m, b| m.max(b.abs()));
    let span = 1.5 * reach + 2.0;
    let (lo, hi) = match p.side {
        Side::Right => (0.0, span),
        Side::Left => (-span, 0.0),
    };
    let mut out = String::from("s,rho\n");
    for (s, v) in p.sample(lo, hi, 1001) {
        out += &format!("{s},{v:e}\n");
    }
    out
}

fn profile(common: &Common, side: SideArg, certify: bool) -> Result<u8> {
    let cfg = load(&common.config)?;
    let s = cfg.scenario();
    shiftspread::validate(&s).require(&["J", "parameters", "A", "H1", "H2", "FU"])?;
    let dir = out_dir(common, &cfg);
    let mut docs = Vec::new();
    let mut code = 0;
    for side in side_list(side) {
        let p = viscosity::build_profile(&s, side)?;
        write(&dir, &format!("profile_{}.csv", side_tag(side)), &profile_csv(&p))?;
        let cert = if certify {
            let opts = viscosity::CertificationOptions {
                grid_points: cfg.verify.certification_points,
                seed: cfg.seed,
                ..Default::default()
            };
            let c = viscosity::certify_prey_side(&s, side, &opts)?;
            if !c.passed() {
                code = Status::Mismatch.exit_code() as u8;
            }
            Some(c)
        } else {
            None
        };
        docs.push(json!({ "profile": p, "certificate": cert }));
    }
    let doc = json!({ "profiles": docs });
    write(&dir, "profile.json", &serde_json::to_string_pretty(&doc)?)?;
    print_json(&doc);
    Ok(code)
}

fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{}.csv", format!("{t}").replace('.', "p"))
}

fn write_run(dir: &Path, run: &simulator::RunResult, trajectory: bool) -> Result<()> {
    if trajectory {
        write(dir, "trajectory.csv", &run.trajectory_csv())?;
    }
    for (want, st) in run.plan.snapshots.iter().zip(&run.snapshots) {
        write(dir, &snapshot_name(*want), &run.snapshot_csv(st))?;
    }
    Ok(())
}

fn simulate(common: &Common, overrides: &Overrides) -> Result<u8> {
    let mut cfg = load(&common.config)?;
    apply(&mut cfg, overrides)?;
    let s = cfg.scenario();
    let dir = out_dir(common, &cfg);
    let run = simulator::run(&s, &cfg.simulation_options())?;
    write_run(&dir, &run, !cfg.output.no_trajectory)?;
    let predictions = shiftspread::validate(&s).all_passed().then(|| shiftspread::speed_report(&s)).transpose()?;
    let summary = summarize(&s, &run, predictions.as_ref(), &cfg.verify.hopf_cole_sides)?;
    let doc = json!({ "name": cfg.name, "predictions": predictions, "simulation": summary });
    write(&dir, "summary.json", &serde_json::to_string_pretty(&doc)?)?;
    print_json(&doc);
    Ok(0)
}

fn scenario_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("listing {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("toml" | "json")))
        .collect();
    files.sort();
    Ok(files)
}

/// One verified scenario: the report is always written, even on failure.
fn verify_one(path: &Path, common: &Common, overrides: &Overrides, many: bool) -> Result<(String, Status)> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    let loaded = load(path).and_then(|mut cfg| apply(&mut cfg, overrides).map(|_| cfg));
    let (outcome, dir, trajectory) = match loaded {
        Ok(cfg) => {
            let dir = out_dir(common, &cfg);
            let dir = if many { dir.join(&stem) } else { dir };
            (shiftspread::verify::verify(&cfg), dir, !cfg.output.no_trajectory)
        }
        Err(e) => {
            if e.downcast_ref::<std::io::Error>().is_some() {
                return Err(e);
            }
            let status = e.downcast_ref::<Error>().map_or(Status::ConfigError, Status::of_error);
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let dir = if many { dir.join(&stem) } else { dir };
            let report =
                json!({ "name": stem, "status": status, "exit_code": status.exit_code(), "error": format!("{e:#}") });
            write(&dir, "report.json", &serde_json::to_string_pretty(&report)?)?;
            return Ok((format!("{stem}: {status:?}: {e:#}"), status));
        }
    };
    let VerifyOutcome { report, run } = outcome;
    write(&dir, "report.json", &report.to_json())?;
    if let Some(run) = &run {
        write_run(&dir, run, trajectory)?;
    }
    let mut line = format!("{stem}: {:?}", report.status);
    if let Some(e) = &report.error {
        line += &format!(": {e}");
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        line +=
            &format!("\n  failed {}: measured {:?}, expected {:?} ± {:?}", c.name, c.measured, c.expected, c.tolerance);
    }
    if !many {
        print_json(&report);
    }
    Ok((line, report.status))
}

fn verify(common: &Common, overrides: &Overrides, jobs: usize) -> Result<u8> {
    let files = scenario_files(&common.config)?;
    if files.is_empty() {
        return Err(Error::Config(format!("no .toml or .json scenarios in {}", common.config.display())).into());
    }
    let many = common.config.is_dir();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<Result<(String, Status)>> =
        pool.install(|| files.par_iter().map(|f| verify_one(f, common, overrides, many)).collect());
    let mut worst = 0u8;
    for r in results {
        let (line, status) = r?;
        eprintln!("{line}");
        worst = worst.max(status.exit_code() as u8);
    }
    Ok(worst)
}
