//! File emission: region CSV plus its `.meta` sibling, the optional
//! whitespace-separated `.dat` twin for plotting tools, and the simulation
//! text report.

use embedcap::search::{CardinalityCaps, Formula, RegionReport, SearchMode, SearchStrategy};
use embedcap::sim::SimulationReport;
use std::fmt::Write as _;
use std::io;

/// Region boundary as CSV: header `R1,R2`, vertices counterclockwise from
/// the origin, six decimal places.
pub fn region_csv(report: &RegionReport) -> String {
    let mut out = String::from("R1,R2\n");
    for &(r1, r2) in report.region.vertices() {
        let _ = writeln!(out, "{r1:.6},{r2:.6}");
    }
    out
}

/// Whitespace-separated twin of the CSV for external plotting tools.
pub fn region_dat(report: &RegionReport) -> String {
    let mut out = String::new();
    for &(r1, r2) in report.region.vertices() {
        let _ = writeln!(out, "{r1:.6} {r2:.6}");
    }
    out
}

/// Provenance sidecar. Deliberately excludes wall time so reruns are
/// byte-identical.
pub fn region_meta(
    task: &str,
    label: &str,
    formula: Formula,
    caps: CardinalityCaps,
    strategy: &SearchStrategy,
    report: &RegionReport,
) -> String {
    let mode = match strategy.mode {
        SearchMode::ExhaustiveGrid => "exhaustive-grid",
        SearchMode::RandomSample => "random-sample",
        SearchMode::SampleThenRefine => "sample-then-refine",
    };
    let formula = match formula {
        Formula::General => "general",
        Formula::Independent => "independent",
    };
    let mut out = String::new();
    let _ = writeln!(out, "task = {task}");
    let _ = writeln!(out, "label = {label}");
    let _ = writeln!(out, "formula = {formula}");
    let _ = writeln!(out, "t1_size = {}", caps.t1_size);
    let _ = writeln!(out, "t2_size = {}", caps.t2_size);
    let _ = writeln!(out, "mode = {mode}");
    let _ = writeln!(out, "step = {}", strategy.grid_step);
    let _ = writeln!(out, "budget = {}", strategy.sample_budget);
    let _ = writeln!(out, "refine_steps = {}", strategy.refine_steps);
    let _ = writeln!(out, "refine_directions = {}", strategy.refine_directions);
    let _ = writeln!(out, "seed = {}", strategy.seed);
    let _ = writeln!(out, "rate_margin = {}", strategy.rate_margin);
    let _ = writeln!(out, "candidates_evaluated = {}", report.candidates_evaluated);
    let _ = writeln!(out, "feasible_count = {}", report.feasible_count);
    let _ = writeln!(out, "pareto_count = {}", report.pareto.len());
    let _ = writeln!(out, "vertices = {}", report.region.vertices().len());
    let _ = writeln!(out, "max_sum_rate = {:.6}", report.region.max_sum_rate());
    out
}

/// Write the CSV and `.meta` (and optionally `.dat`) files for a region run.
pub fn write_region_files(
    prefix: &str,
    task: &str,
    label: &str,
    formula: Formula,
    caps: CardinalityCaps,
    strategy: &SearchStrategy,
    report: &RegionReport,
    with_dat: bool,
) -> io::Result<()> {
    std::fs::write(format!("{prefix}.csv"), region_csv(report))?;
    std::fs::write(
        format!("{prefix}.meta"),
        region_meta(task, label, formula, caps, strategy, report),
    )?;
    if with_dat {
        std::fs::write(format!("{prefix}.dat"), region_dat(report))?;
    }
    Ok(())
}

pub fn sim_report_text(report: &SimulationReport) -> String {
    let e = &report.event_counts;
    let mut out = String::new();
    let _ = writeln!(out, "trials_run = {}", report.trials_run);
    let _ = writeln!(out, "p_e_hat = {:.6}", report.p_e_hat);
    let _ = writeln!(out, "d1_hat = {:.6}", report.d1_hat);
    let _ = writeln!(out, "d2_hat = {:.6}", report.d2_hat);
    let _ = writeln!(out, "a0 = {}", e.a0);
    let _ = writeln!(out, "a1 = {}", e.a1);
    let _ = writeln!(out, "e1 = {}", e.e1);
    let _ = writeln!(out, "e2 = {}", e.e2);
    let _ = writeln!(out, "e3 = {}", e.e3);
    let _ = writeln!(out, "e4 = {}", e.e4);
    let _ = writeln!(out, "fallbacks_user1 = {}", report.encoder_fallbacks[0]);
    let _ = writeln!(out, "fallbacks_user2 = {}", report.encoder_fallbacks[1]);
    out
}
