//! Trace, summary, and distribution writers.
//!
//! Output is deterministic for a fixed (config, seed): no timestamps or
//! durations are written, floats use Rust's shortest round-trip formatting,
//! and the tool version is stamped at the top of every file.

use std::fmt::Write as _;

use qumode::problems::Encoding;
use qumode::variational::RunRecord;

use crate::config::ScenarioConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trace CSV: `restart,iteration,energy` rows in restart-major order. A
/// restart that aborted early is closed with the sentinel row
/// `restart,-1,nan` after its partial trace.
pub fn render_trace(run: &RunRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qumode-bench {VERSION}");
    let _ = writeln!(out, "restart,iteration,energy");
    for (r, record) in run.restarts.iter().enumerate() {
        for (t, e) in record.energies.iter().enumerate() {
            let _ = writeln!(out, "{r},{t},{e}");
        }
        if record.failure.is_some() {
            let _ = writeln!(out, "{r},-1,nan");
        }
    }
    out
}

/// Combined comparison CSV: `algorithm,restart,iteration,energy`.
pub fn render_compare_trace(runs: &[(&str, &RunRecord)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qumode-bench {VERSION}");
    let _ = writeln!(out, "algorithm,restart,iteration,energy");
    for (name, run) in runs {
        for (r, record) in run.restarts.iter().enumerate() {
            for (t, e) in record.energies.iter().enumerate() {
                let _ = writeln!(out, "{name},{r},{t},{e}");
            }
            if record.failure.is_some() {
                let _ = writeln!(out, "{name},{r},-1,nan");
            }
        }
    }
    out
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Self-describing summary: version, the complete resolved configuration,
/// aggregate results, diagnostics, and per-restart outcomes.
pub fn render_summary(config: &ScenarioConfig, run: &RunRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version = {VERSION}");
    let _ = writeln!(out, "# resolved configuration");
    out.push_str(&config.echo());
    let _ = writeln!(out, "# results");
    let _ = writeln!(out, "method = {}", run.method);
    let seeds: Vec<String> = run.restarts.iter().map(|r| r.seed.to_string()).collect();
    let _ = writeln!(out, "seeds = {}", seeds.join(","));
    let _ = writeln!(out, "best.restart = {}", run.best_restart);
    let _ = writeln!(out, "best.energy = {}", run.best_energy);
    let _ = writeln!(out, "best.params = {}", join_f64(&run.best_params));
    let _ = writeln!(out, "best.final_energy = {}", run.best_final_energy);
    if let Some(m) = run.mean_trace.last() {
        let _ = writeln!(out, "mean.final_energy = {m}");
    }
    if let Some(s) = run.stderr_trace.last() {
        let _ = writeln!(out, "stderr.final_energy = {s}");
    }
    if let Some(diag) = &run.diagnostics {
        let label = match diag.encoding {
            Encoding::PhaseSpace => "mean_quadratures",
            Encoding::FockSpace => "mean_photon_numbers",
        };
        let _ = writeln!(out, "diagnostics.{label} = {}", join_f64(&diag.mode_means));
        let _ = writeln!(
            out,
            "diagnostics.edge_population = {}",
            diag.edge_population
        );
        let _ = writeln!(
            out,
            "diagnostics.truncation_safe = {}",
            diag.truncation_safe
        );
    }
    for (r, record) in run.restarts.iter().enumerate() {
        let _ = writeln!(out, "restart.{r}.seed = {}", record.seed);
        let _ = writeln!(out, "restart.{r}.best_energy = {}", record.best_energy);
        let _ = writeln!(out, "restart.{r}.final_energy = {}", record.final_energy);
        let _ = writeln!(out, "restart.{r}.evaluations = {}", record.evaluations);
        if let Some(failure) = &record.failure {
            let _ = writeln!(out, "restart.{r}.failure = {failure}");
        }
        for note in &record.notes {
            let _ = writeln!(out, "restart.{r}.note = {note}");
        }
    }
    out
}

/// Fock-distribution table of the best final state: a scan over the
/// solution-carrying mode with the other modes fixed at their optimal
/// values (when a known optimum exists), then the global top-20 patterns
/// above the reporting threshold.
pub fn render_distribution(run: &RunRecord, scan: Option<&[(Vec<usize>, f64)]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qumode-bench {VERSION}");
    if let Some(rows) = scan {
        let _ = writeln!(out, "# solution-mode scan");
        let _ = writeln!(out, "pattern,probability");
        for (pattern, p) in rows {
            let pat: Vec<String> = pattern.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "{},{p}", pat.join(" "));
        }
    }
    if let Some(diag) = &run.diagnostics {
        let _ = writeln!(out, "# top patterns (probability > 0.001)");
        let _ = writeln!(out, "pattern,probability");
        for (pattern, p) in diag.fock_distribution.iter().take(20) {
            let pat: Vec<String> = pattern.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "{},{p}", pat.join(" "));
        }
    }
    out
}
