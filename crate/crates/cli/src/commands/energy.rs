//! `energy`: Monte Carlo estimate of the Riesz 1-energy of a measure on a
//! geometric generational set, optionally paired with the repulsion lower
//! bound when a schedule is supplied.

use std::path::PathBuf;

use anyhow::{Context, Result};
use repulsion_core::filtration::read_set;
use repulsion_core::riesz::{energy_lower_bound_via_repulsion, energy_mc, RepulsionEnergyBound};
use serde::Serialize;

use crate::args::Format;
use crate::context::RunContext;
use crate::io_util::{csv_table, parse_schedule, pretty_json, read_measure};

#[derive(Serialize)]
struct EnergyOutput {
    value: f64,
    standard_error: f64,
    samples: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<RepulsionEnergyBound>,
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    mut ctx: RunContext,
    set_path: PathBuf,
    measure_text: String,
    samples: usize,
    schedule_text: Option<String>,
    c: f64,
    eps: f64,
) -> Result<()> {
    ctx.param("set", set_path.display());
    ctx.param("measure", &measure_text);
    ctx.param("samples", samples);
    if let Some(ref s) = schedule_text {
        ctx.param("schedule", s);
        ctx.param("c", c);
        ctx.param("eps", eps);
    }

    let set = read_set(&set_path)
        .with_context(|| format!("reading set description {}", set_path.display()))?;
    let mu = read_measure(&measure_text, &set)?;
    let estimate = energy_mc(&set, &mu, samples, ctx.seed)?;

    let lower_bound = match schedule_text {
        Some(text) => {
            let schedule = parse_schedule(&text, set.deepest_generation())?;
            Some(energy_lower_bound_via_repulsion(
                &set, &schedule, &mu, c, eps,
            )?)
        }
        None => None,
    };

    let output = EnergyOutput {
        value: estimate.value,
        standard_error: estimate.standard_error,
        samples: estimate.samples,
        seed: estimate.seed,
        lower_bound,
    };

    match ctx.format_or(Format::Json) {
        Format::Json => ctx.write_primary(&pretty_json(&output)?)?,
        Format::Csv => {
            let bound = output
                .lower_bound
                .as_ref()
                .map(|b| format!("{:?}", b.bound))
                .unwrap_or_default();
            let row = vec![vec![
                format!("{:?}", output.value),
                format!("{:?}", output.standard_error),
                output.samples.to_string(),
                output.seed.to_string(),
                bound,
            ]];
            ctx.write_primary(&csv_table(
                "value,standard_error,samples,seed,lower_bound",
                &row,
            ))?;
        }
    }
    ctx.finish()
}
