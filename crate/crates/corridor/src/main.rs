use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use corridor::batch::{metrics_csv, run_batch, Overrides};
use corridor::fixtures::{self, random_scenario, RandomSpec};
use corridor::io::{load_scenario, to_json, LoadError};
use corridor::output::{plan_summary, sim_csv, sim_summary_json, svg, trajectory_csv, trajectory_json, SvgOptions};
use corridor::WallClock;
use corridor_core::pipeline::{plan, PlanError};
use corridor_core::sim::{run_closed_loop, SimParams};
use corridor_core::FrozenClock;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "corridor", version, about = "Set-based corridor planning on lanelet networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct PlannerFlags {
    /// Time step (s).
    #[arg(long)]
    dt: Option<f64>,
    /// Minimum distance to other traffic participants (m).
    #[arg(long)]
    dmin: Option<f64>,
    /// Acceleration of the desired profile (m/s²).
    #[arg(long)]
    ades: Option<f64>,
    /// Lane-change weight.
    #[arg(long)]
    wchange: Option<f64>,
    /// Profile-deviation weight.
    #[arg(long)]
    wprofile: Option<f64>,
    /// Search time budget (s).
    #[arg(long)]
    timeout: Option<f64>,
}

impl PlannerFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            dt: self.dt,
            d_min: self.dmin,
            a_des: self.ades,
            w_change: self.wchange,
            w_profile: self.wprofile,
            timeout: self.timeout,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan one scenario and write the corridor summary and reference trajectory.
    Plan {
        scenario: PathBuf,
        #[command(flatten)]
        flags: PlannerFlags,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write an SVG drawing to this file.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Comma-separated times of the obstacle snapshots in the SVG.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        times: Vec<f64>,
        /// SVG pixels per meter.
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
    },
    /// Plan every scenario of a directory and print a metrics table.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        flags: PlannerFlags,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also run the closed loop and report collisions.
        #[arg(long)]
        closed_loop: bool,
        /// Write the table to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the closed-loop simulation.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        flags: PlannerFlags,
        /// Planning horizon (s).
        #[arg(long, default_value_t = 3.0)]
        horizon: f64,
        /// Replanning period (s).
        #[arg(long, default_value_t = 0.3)]
        replan: f64,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Measure replanning with a frozen clock so that all outputs are
        /// reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Validate a scenario file.
    Check { scenario: PathBuf },
    /// Generate random solvable scenarios.
    Gen {
        dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Small scenarios (up to 3 lanelets and 3 obstacles, 1.5 s).
        #[arg(long)]
        small: bool,
        /// Write the hand-built fixtures instead of random scenarios.
        #[arg(long)]
        named: bool,
    },
}

fn load(path: &Path, flags: &PlannerFlags) -> Result<corridor_core::Scenario> {
    let mut s = load_scenario(path)?;
    flags.overrides().apply(&mut s).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_plan(scenario: &Path, flags: &PlannerFlags, out: &Path, svg_path: Option<&Path>, times: Vec<f64>, scale: f64) -> Result<ExitCode> {
    let s = load(scenario, flags)?;
    let result = plan(&s, &WallClock::new());
    if let Some(p) = svg_path {
        write(p, &svg(&s, result.as_ref().ok(), &SvgOptions { scale, times }))?;
    }
    let outcome = match result {
        Ok(o) => o,
        Err(PlanError::NoCorridor) => {
            eprintln!("no corridor reaches the goal");
            return Ok(ExitCode::from(2));
        }
        Err(PlanError::Timeout) => {
            eprintln!("search timed out");
            return Ok(ExitCode::from(3));
        }
        Err(e) => return Err(anyhow::Error::new(e).context(scenario.display().to_string())),
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("corridors.json"), &serde_json::to_string_pretty(&plan_summary(&outcome))?)?;
    write(&out.join("trajectory.csv"), &trajectory_csv(&outcome.trajectory))?;
    write(&out.join("trajectory.json"), &serde_json::to_string_pretty(&trajectory_json(&outcome.trajectory))?)?;
    let best = outcome.best_cost();
    let seq: Vec<String> = outcome.refined.lanelet_sequence().iter().map(|l| l.to_string()).collect();
    println!(
        "corridors: {}  selected: [{}]  n_change: {}  J: {:.4}",
        outcome.corridors.len(),
        seq.join(", "),
        best.n_change,
        best.total
    );
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Plan { scenario, flags, out, svg, times, scale } => cmd_plan(&scenario, &flags, &out, svg.as_deref(), times, scale),
        Cmd::Batch { dir, flags, jobs, closed_loop, out } => {
            let rows = run_batch(&dir, &flags.overrides(), closed_loop, jobs).with_context(|| format!("reading {}", dir.display()))?;
            let table = metrics_csv(&rows);
            match out {
                Some(p) => write(&p, &table)?,
                None => print!("{table}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate { scenario, flags, horizon, replan, out, no_timing } => {
            let s = load(&scenario, &flags)?;
            let params = SimParams { plan_horizon: horizon, replan_period: replan, ..SimParams::default() };
            let log = if no_timing { run_closed_loop(&s, &params, &FrozenClock) } else { run_closed_loop(&s, &params, &WallClock::new()) };
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(&out.join("sim_log.csv"), &sim_csv(&log))?;
            let summary = serde_json::to_string_pretty(&sim_summary_json(&log.summary()))?;
            write(&out.join("sim_summary.json"), &summary)?;
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { scenario } => match load_scenario(&scenario) {
            Ok(s) => {
                println!("ok: {} lanelets, {} obstacles", s.network.lanelets().len(), s.obstacles.len());
                Ok(ExitCode::SUCCESS)
            }
            Err(e @ (LoadError::Parse { .. } | LoadError::Invalid { .. } | LoadError::Io { .. })) => {
                eprintln!("error: {e}");
                Ok(ExitCode::from(1))
            }
        },
        Cmd::Gen { dir, count, seed, small, named } => {
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            if named {
                for (name, s) in fixtures::named() {
                    write(&dir.join(format!("{name}.json")), &to_json(&s))?;
                }
                return Ok(ExitCode::SUCCESS);
            }
            let spec = if small { RandomSpec::small(1.5) } else { RandomSpec::bench() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut written = 0;
            let mut tries = 0;
            while written < count && tries < 100 * count {
                tries += 1;
                let s = random_scenario(&mut rng, &spec);
                if plan(&s, &FrozenClock).is_ok() {
                    written += 1;
                    write(&dir.join(format!("gen_{seed}_{written:02}.json")), &to_json(&s))?;
                }
            }
            println!("wrote {written} scenarios after {tries} draws");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
