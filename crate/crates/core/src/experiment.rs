//! Sweeps over seeds, attacker counts and speeds, and the CSV files they produce.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::aodv::RoutingEntry;
use crate::blackhole::AttackMode;
use crate::config::ScenarioConfig;
use crate::error::{Result, SimError};
use crate::sim::{RunOptions, RunSpec, Simulation};
use crate::traffic::{aggregate, format_pdr, PdrSummary, RunMetrics};
use crate::NodeId;

pub const RUNS_HEADER: &str =
    "seed,attackers,mode,speed,sent,delivered,dropped_no_route,dropped_by_attacker,dropped_buffer,in_flight,pdr";

#[derive(Debug, Clone, Default)]
pub struct ExperimentOptions {
    pub trace: bool,
    pub dump_tables: bool,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunRow {
    pub seed: u64,
    pub attackers: usize,
    pub mode: AttackMode,
    pub speed: f64,
    pub metrics: RunMetrics,
    pub attacker_ids: Vec<NodeId>,
    pub trace: Option<Vec<String>>,
    pub tables: Option<Vec<(NodeId, RoutingEntry)>>,
}

impl RunRow {
    pub fn csv_line(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.attackers,
            self.mode,
            self.speed,
            m.sent,
            m.delivered,
            m.dropped_no_route,
            m.dropped_by_attacker,
            m.dropped_buffer,
            m.in_flight_at_end,
            format_pdr(m.pdr)
        )
    }

    fn label(&self) -> String {
        format!("a{}_v{}_s{}", self.attackers, self.speed, self.seed)
    }
}

#[derive(Debug, Clone)]
pub struct CellSummary {
    pub attackers: usize,
    pub speed: f64,
    pub pdr: PdrSummary,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ScenarioConfig,
    pub cells: Vec<CellSummary>,
    pub runs: Vec<RunRow>,
}

impl ExperimentResult {
    pub fn cell(&self, attackers: usize, speed: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.attackers == attackers && c.speed == speed)
    }
}

/// Runs every (speed, attacker count, seed) combination. Results come back in
/// that nested order no matter how many threads ran them.
pub fn run_experiment(cfg: &ScenarioConfig, opts: &ExperimentOptions) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for mobility in cfg.mobility_points() {
        for &attacker_count in &cfg.attacker_counts() {
            for &seed in &cfg.seeds {
                jobs.push(RunSpec {
                    seed,
                    attacker_count,
                    mobility,
                });
            }
        }
    }

    let run_one = |spec: &RunSpec| -> Result<RunRow> {
        let options = RunOptions {
            trace: opts.trace,
            record_transmissions: false,
        };
        let out = Simulation::new(cfg, spec, options)?.run()?;
        Ok(RunRow {
            seed: spec.seed,
            attackers: spec.attacker_count,
            mode: cfg.attackers.behavior.mode,
            speed: spec.mobility.nominal_speed(),
            metrics: out.metrics,
            attacker_ids: out.attackers,
            trace: out.trace,
            tables: opts.dump_tables.then_some(out.tables),
        })
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| SimError::Invariant(format!("thread pool: {e}")))?;
    let runs = pool.install(|| jobs.par_iter().map(run_one).collect::<Result<Vec<_>>>())?;

    let mut cells = Vec::new();
    for chunk in runs.chunk_by(|a, b| a.speed == b.speed && a.attackers == b.attackers) {
        let metrics: Vec<RunMetrics> = chunk.iter().map(|r| r.metrics).collect();
        cells.push(CellSummary {
            attackers: chunk[0].attackers,
            speed: chunk[0].speed,
            pdr: aggregate(&metrics)?,
        });
    }
    Ok(ExperimentResult {
        config: cfg.clone(),
        cells,
        runs,
    })
}

pub fn runs_csv(result: &ExperimentResult) -> String {
    let mut s = String::from(RUNS_HEADER);
    s.push('\n');
    for row in &result.runs {
        s.push_str(&row.csv_line());
        s.push('\n');
    }
    s
}

/// One row per (attacker count, speed) cell: the attack-free mean for the same
/// speed next to the cell's own mean.
pub fn summary_csv(result: &ExperimentResult) -> String {
    let mut s =
        String::from("attackers,speed,runs,baseline_mean_pdr,attacked_mean_pdr,min_pdr,max_pdr\n");
    for c in &result.cells {
        let baseline = result
            .cell(0, c.speed)
            .map(|b| b.pdr.mean.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            c.attackers,
            c.speed,
            c.pdr.per_run.len(),
            baseline,
            c.pdr.mean,
            c.pdr.min,
            c.pdr.max
        );
    }
    s
}

/// `speed -> mean pdr` series for one attacker count.
pub fn plot_csv(result: &ExperimentResult, attackers: usize) -> String {
    let mut s = String::from("speed,mean_pdr\n");
    for c in result.cells.iter().filter(|c| c.attackers == attackers) {
        let _ = writeln!(s, "{},{}", c.speed, c.pdr.mean);
    }
    s
}

pub fn tables_csv(rows: &[(NodeId, RoutingEntry)]) -> String {
    let mut s = String::from("node_id,destination,next_hop,hop_count,dest_seq,valid\n");
    for (owner, e) in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            owner, e.destination, e.next_hop, e.hop_count, e.dest_seq, e.valid
        );
    }
    s
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|source| SimError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

/// Writes `config.txt`, `runs.csv`, `summary.csv` and one `plotdata_<n>.csv`
/// per attacker count, plus traces and routing tables when they were kept.
pub fn emit_results(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    write(
        dir.join("config.txt"),
        &result.config.to_config_text(),
        &mut written,
    )?;
    write(dir.join("runs.csv"), &runs_csv(result), &mut written)?;
    write(dir.join("summary.csv"), &summary_csv(result), &mut written)?;
    let mut counts: Vec<usize> = result.cells.iter().map(|c| c.attackers).collect();
    counts.dedup();
    counts.sort_unstable();
    counts.dedup();
    for a in counts {
        write(
            dir.join(format!("plotdata_{a}.csv")),
            &plot_csv(result, a),
            &mut written,
        )?;
    }
    for row in &result.runs {
        if let Some(trace) = &row.trace {
            let mut text = trace.join("\n");
            text.push('\n');
            write(
                dir.join(format!("trace_{}.tsv", row.label())),
                &text,
                &mut written,
            )?;
        }
        if let Some(tables) = &row.tables {
            write(
                dir.join(format!("tables_{}.csv", row.label())),
                &tables_csv(tables),
                &mut written,
            )?;
        }
    }
    Ok(written)
}
