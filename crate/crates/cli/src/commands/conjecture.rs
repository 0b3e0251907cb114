//! `conjecture`: sweep point configurations, solve each equilibrium system,
//! and flag any instance whose equilibrium weights dip negative. Per-instance
//! solve failures are recorded in-band; only I/O problems abort the run.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use repulsion_core::point_config::{
    cantor_configuration, config_to_json, conjecture_sweep, random_separated_configuration,
    read_config, PointConfiguration, SweepRecord,
};

use crate::args::Format;
use crate::context::RunContext;
use crate::io_util::{parse_range, pretty_json};

/// SplitMix64 step; spreads sequential instance indices into unrelated seeds.
pub fn derive_seed(base: u64, index: usize) -> u64 {
    let mut z = base.wrapping_add(index as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const SWEEP_CSV_HEADER: &str =
    "instance_id,N,r,lambda,capacity_stat,min_weight,nonneg,rowsum_min,rowsum_max,residual";

fn record_row(rec: &SweepRecord) -> String {
    format!(
        "{},{},{:?},{:?},{:?},{:?},{},{:?},{:?},{:?}",
        rec.instance_id,
        rec.n_points,
        rec.r,
        rec.lambda,
        rec.capacity_stat,
        rec.min_weight,
        rec.nonneg,
        rec.rowsum_min,
        rec.rowsum_max,
        rec.residual
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    mut ctx: RunContext,
    cantor: Option<String>,
    random: bool,
    count: usize,
    n: usize,
    r: f64,
    box_size: f64,
    config: Vec<PathBuf>,
) -> Result<()> {
    let picks = cantor.is_some() as u32 + random as u32 + (!config.is_empty()) as u32;
    if picks != 1 {
        bail!("pick exactly one instance source: --cantor RANGE, --random, or --config FILE...");
    }

    let mut instances: Vec<PointConfiguration> = Vec::new();
    if let Some(ref range_text) = cantor {
        ctx.param("cantor", range_text);
        let (lo, hi) = parse_range(range_text)?;
        for g in lo..=hi {
            instances.push(cantor_configuration(g)?);
        }
    } else if random {
        ctx.param("random", true);
        ctx.param("count", count);
        ctx.param("n", n);
        ctx.param("r", r);
        ctx.param("box", box_size);
        for i in 0..count {
            instances.push(random_separated_configuration(
                n,
                r,
                box_size,
                derive_seed(ctx.seed, i),
            )?);
        }
    } else {
        for path in &config {
            instances.push(
                read_config(path)
                    .with_context(|| format!("reading point configuration {}", path.display()))?,
            );
        }
        ctx.param("config_files", config.len());
    }

    let report = conjecture_sweep(&instances);

    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.write_primary(&pretty_json(&report)?)?,
        Format::Csv => {
            let mut text = String::from(SWEEP_CSV_HEADER);
            text.push('\n');
            for rec in &report.records {
                text.push_str(&record_row(rec));
                text.push('\n');
            }
            for rec in &report.records {
                if let Some(ref err) = rec.error {
                    text.push_str(&format!("# instance {} failed: {err}\n", rec.instance_id));
                }
            }
            text.push_str(&format!(
                "# instances={} flags={} failures={}\n",
                report.records.len(),
                report.flag_count,
                report.failure_count
            ));
            ctx.write_primary(&text)?;
            // Dump each flagged configuration for offline scrutiny.
            for (id, instance) in &report.flagged_instances {
                let mut body = config_to_json(instance);
                body.push('\n');
                ctx.write_sibling(&format!("flagged.{id}.json"), &body)?;
            }
        }
    }
    ctx.finish()
}
