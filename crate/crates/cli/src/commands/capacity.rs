//! `capacity`: tabulate the capacity statistic `1/lambda` across instances;
//! for Cantor generations the `n * stat` column exposes the `1/n` decay law.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use repulsion_core::point_config::{
    build_repulsion_matrix, cantor_configuration, capacity_lower_bound, read_config,
    solve_equilibrium, PointConfiguration,
};
use serde::Serialize;

use crate::args::Format;
use crate::context::RunContext;
use crate::io_util::{parse_range, pretty_json};

pub const CAPACITY_CSV_HEADER: &str = "n,capacity_stat,n_times_stat";

#[derive(Serialize)]
struct CapacityRow {
    /// Cantor generation for `--cantor` rows; point count for `--config` rows.
    n: usize,
    capacity_stat: f64,
    n_times_stat: f64,
}

fn stat_of(config: PointConfiguration) -> Result<f64> {
    let matrix = build_repulsion_matrix(config)?;
    let solution = solve_equilibrium(&matrix)?;
    Ok(capacity_lower_bound(&solution))
}

pub fn run(mut ctx: RunContext, cantor: Option<String>, config: Vec<PathBuf>) -> Result<()> {
    let picks = cantor.is_some() as u32 + (!config.is_empty()) as u32;
    if picks != 1 {
        bail!("pick exactly one instance source: --cantor RANGE or --config FILE...");
    }

    let mut rows: Vec<CapacityRow> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    if let Some(ref range_text) = cantor {
        ctx.param("cantor", range_text);
        let (lo, hi) = parse_range(range_text)?;
        for g in lo..=hi {
            match cantor_configuration(g)
                .map_err(anyhow::Error::from)
                .and_then(stat_of)
            {
                Ok(stat) => rows.push(CapacityRow {
                    n: g,
                    capacity_stat: stat,
                    n_times_stat: g as f64 * stat,
                }),
                Err(e) => {
                    rows.push(CapacityRow {
                        n: g,
                        capacity_stat: f64::NAN,
                        n_times_stat: f64::NAN,
                    });
                    failures.push(format!("# n={g} failed: {e}"));
                }
            }
        }
    } else {
        ctx.param("config_files", config.len());
        for path in &config {
            let instance = read_config(path)
                .with_context(|| format!("reading point configuration {}", path.display()))?;
            let n = instance.len();
            match stat_of(instance) {
                Ok(stat) => rows.push(CapacityRow {
                    n,
                    capacity_stat: stat,
                    n_times_stat: n as f64 * stat,
                }),
                Err(e) => {
                    rows.push(CapacityRow {
                        n,
                        capacity_stat: f64::NAN,
                        n_times_stat: f64::NAN,
                    });
                    failures.push(format!("# {} failed: {e}", path.display()));
                }
            }
        }
    }

    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.write_primary(&pretty_json(&rows)?)?,
        Format::Csv => {
            let mut text = String::from(CAPACITY_CSV_HEADER);
            text.push('\n');
            for row in &rows {
                text.push_str(&format!(
                    "{},{:?},{:?}\n",
                    row.n, row.capacity_stat, row.n_times_stat
                ));
            }
            for line in &failures {
                text.push_str(line);
                text.push('\n');
            }
            ctx.write_primary(&text)?;
        }
    }
    ctx.finish()
}
