//! Batch planning over a directory of scenarios.

use crate::io::load_scenario;
use crate::output::sig9;
use crate::WallClock;
use corridor_core::model::{PlannerConfig, Scenario};
use corridor_core::pipeline::{plan, PlanError};
use corridor_core::sim::{run_closed_loop, SimParams};
use corridor_core::Clock;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Command-line overrides of the planner configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub d_min: Option<f64>,
    pub a_des: Option<f64>,
    pub w_change: Option<f64>,
    pub w_profile: Option<f64>,
    /// Search time budget (s).
    pub timeout: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) -> Result<(), corridor_core::ModelError> {
        let c: &mut PlannerConfig = &mut s.config;
        c.dt = self.dt.unwrap_or(c.dt);
        c.d_min = self.d_min.unwrap_or(c.d_min);
        c.a_des = self.a_des.unwrap_or(c.a_des);
        c.w_change = self.w_change.unwrap_or(c.w_change);
        c.w_profile = self.w_profile.unwrap_or(c.w_profile);
        c.time_budget = self.timeout.unwrap_or(c.time_budget);
        c.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchRow {
    pub scenario: String,
    /// Planning wall time per second of planned horizon.
    pub ms_per_s: f64,
    pub wall_ms: f64,
    pub solved: bool,
    pub timed_out: bool,
    pub corridors: usize,
    pub n_change: Option<usize>,
    pub cost: Option<f64>,
    /// Closed-loop collision, when requested.
    pub collision: Option<bool>,
    pub error: Option<String>,
}

/// JSON files of `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn run_one(path: &Path, overrides: &Overrides, closed_loop: bool) -> BatchRow {
    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    let mut row = BatchRow {
        scenario: name,
        ms_per_s: 0.0,
        wall_ms: 0.0,
        solved: false,
        timed_out: false,
        corridors: 0,
        n_change: None,
        cost: None,
        collision: None,
        error: None,
    };
    let mut scenario = match load_scenario(path) {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    if let Err(e) = overrides.apply(&mut scenario) {
        row.error = Some(e.to_string());
        return row;
    }
    let clock = WallClock::new();
    let result = plan(&scenario, &clock);
    row.wall_ms = clock.now() * 1e3;
    row.ms_per_s = row.wall_ms / scenario.problem.goal.time.hi.max(scenario.config.dt);
    match result {
        Ok(out) => {
            row.solved = true;
            row.timed_out = out.timed_out;
            row.corridors = out.corridors.len();
            row.n_change = Some(out.best_cost().n_change);
            row.cost = Some(out.best_cost().total);
        }
        Err(PlanError::Timeout) => row.timed_out = true,
        Err(PlanError::NoCorridor) => {}
        Err(e) => row.error = Some(e.to_string()),
    }
    if closed_loop {
        let log = run_closed_loop(&scenario, &SimParams::default(), &WallClock::new());
        row.collision = Some(log.summary().collided);
    }
    row
}

/// Runs every scenario of `dir` on `jobs` threads; rows come back in file
/// order.
pub fn run_batch(dir: &Path, overrides: &Overrides, closed_loop: bool, jobs: usize) -> std::io::Result<Vec<BatchRow>> {
    let files = scenario_files(dir)?;
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<BatchRow>>> = Mutex::new(vec![None; files.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(files.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(f) = files.get(i) else { break };
                let row = run_one(f, overrides, closed_loop);
                rows.lock().expect("no thread panics while holding the lock")[i] = Some(row);
            });
        }
    });
    Ok(rows.into_inner().expect("threads joined").into_iter().map(|r| r.expect("every file ran")).collect())
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

/// Metrics table with one row per scenario and a final `aggregate` row
/// holding means and percentages.
pub fn metrics_csv(rows: &[BatchRow]) -> String {
    let mut out = String::from("scenario,ms_per_s,solved,corridors,n_change,J,collision,error\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            sig9(r.ms_per_s),
            u8::from(r.solved),
            r.corridors,
            opt(r.n_change, |n| n.to_string()),
            opt(r.cost, sig9),
            opt(r.collision, |c| u8::from(c).to_string()),
            opt(r.error.as_deref(), |e| format!("\"{}\"", e.replace('"', "'"))),
        );
    }
    let n = rows.len().max(1) as f64;
    let mean = |f: &dyn Fn(&BatchRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let solved: Vec<&BatchRow> = rows.iter().filter(|r| r.solved).collect();
    let ns = solved.len().max(1) as f64;
    let collisions: Vec<bool> = rows.iter().filter_map(|r| r.collision).collect();
    let _ = writeln!(
        out,
        "aggregate,{},{}%,{},{},{},{},",
        sig9(mean(&|r| r.ms_per_s)),
        sig9(100.0 * solved.len() as f64 / n),
        sig9(mean(&|r| r.corridors as f64)),
        sig9(solved.iter().filter_map(|r| r.n_change).sum::<usize>() as f64 / ns),
        sig9(solved.iter().filter_map(|r| r.cost).sum::<f64>() / ns),
        if collisions.is_empty() {
            String::new()
        } else {
            format!("{}%", sig9(100.0 * collisions.iter().filter(|c| **c).count() as f64 / collisions.len() as f64))
        },
    );
    out
}
