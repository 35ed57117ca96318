//! Result emission: plot-ready ECDF tables, the one-row-per-point summary,
//! and the reproducibility manifest. All numbers print in Rust's shortest
//! round-trip decimal form, so re-parsing a file recovers the exact values.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use mmwsim_core::blockage::AttenuationTrace;
use mmwsim_core::engine::{PointResult, ScenarioConfig, ScenarioPoint};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// ECDF tables and a summary row per point, as CSV files.
    Csv,
    /// One results.json carrying every point's report.
    Json,
}

/// Everything needed to reproduce a run bit-exactly, next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool_version: &'static str,
    pub master_seed: u64,
    pub runtime_seconds: f64,
    pub config: &'a ScenarioConfig,
    pub outputs: Vec<String>,
}

/// File-name fragment identifying a scenario point.
fn scenario_label(point: &ScenarioPoint) -> String {
    format!(
        "lb{}_tau{}_nt{}",
        point.arrival_rate_per_s, point.mean_duration_ms, point.window_ms
    )
}

/// Writes the per-point tables and returns the file names written.
pub fn emit_results(
    config: &ScenarioConfig,
    results: &[PointResult],
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<String>> {
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create `{}`", out_dir.display()))?;
    let mut outputs = Vec::new();
    match format {
        OutputFormat::Csv => {
            for result in results {
                let name = format!("ecdf_{}_{}.csv", result.point.policy, scenario_label(&result.point));
                let mut table = String::from("rate_bps,cum_prob\n");
                for &(rate, prob) in &result.report.ecdf {
                    table.push_str(&format!("{rate},{prob}\n"));
                }
                write_file(out_dir, &name, &table)?;
                outputs.push(name);
            }
            let mut summary = String::from(
                "policy,lambda_b,tau_b,n_t,sigma,p1_rate_bps,mean_rate_bps,jain_mean,jain_pooled,drops,seed\n",
            );
            for result in results {
                let p = &result.point;
                let r = &result.report;
                summary.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    p.policy,
                    p.arrival_rate_per_s,
                    p.mean_duration_ms,
                    p.window_ms,
                    p.sigma_db,
                    r.p1_rate_bps,
                    r.mean_rate_bps,
                    r.jain_mean,
                    r.jain_pooled,
                    config.drops,
                    config.master_seed,
                ));
            }
            write_file(out_dir, "summary.csv", &summary)?;
            outputs.push("summary.csv".into());
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(results)?;
            write_file(out_dir, "results.json", &text)?;
            outputs.push("results.json".into());
        }
    }
    Ok(outputs)
}

/// Writes one per-user trace table and returns its file name.
pub fn emit_trace(out_dir: &Path, user: usize, trace: &AttenuationTrace) -> Result<String> {
    let name = format!("trace_ue{user}.csv");
    let mut table = String::from("slot_index,state_label,attenuation_db\n");
    for t in 0..trace.len() {
        table.push_str(&format!("{t},{},{}\n", trace.states[t], trace.values_db[t]));
    }
    write_file(out_dir, &name, &table)?;
    Ok(name)
}

/// Writes manifest.json after all other outputs are on disk.
pub fn write_manifest(out_dir: &Path, config: &ScenarioConfig, outputs: Vec<String>, runtime_seconds: f64) -> Result<()> {
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        master_seed: config.master_seed,
        runtime_seconds,
        config,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    write_file(out_dir, "manifest.json", &text)
}

fn write_file(out_dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = out_dir.join(name);
    fs::write(&path, content).with_context(|| format!("cannot write `{}`", path.display()))
}
