//! `matrix`: build the repulsion kernel matrix of one point configuration,
//! solve the equilibrium system, and report weights plus row-sum diagnostics.

use anyhow::{bail, Context, Result};
use repulsion_core::point_config::{
    build_repulsion_matrix, cantor_configuration, capacity_lower_bound,
    random_separated_configuration, read_config, row_sum_report, solve_equilibrium,
    PointConfiguration, RowSumReport,
};
use serde::Serialize;

use crate::args::{Format, InstanceSource};
use crate::context::RunContext;
use crate::io_util::{csv_table, pretty_json};

#[derive(Serialize)]
struct MatrixOutput {
    n_points: usize,
    r: f64,
    dense: bool,
    lambda: f64,
    capacity_stat: f64,
    min_weight: f64,
    nonneg: bool,
    residual: f64,
    iterations: usize,
    row_sums: RowSumReport,
    weights: Vec<f64>,
    config: PointConfiguration,
}

pub fn build_instance(
    ctx: &mut RunContext,
    source: &InstanceSource,
) -> Result<PointConfiguration> {
    let picks =
        source.config.is_some() as u32 + source.cantor.is_some() as u32 + source.random.is_some() as u32;
    if picks != 1 {
        bail!("pick exactly one instance source: --config FILE, --cantor N, or --random N");
    }
    if let Some(ref path) = source.config {
        ctx.param("config", path.display());
        return read_config(path)
            .with_context(|| format!("reading point configuration {}", path.display()));
    }
    if let Some(n) = source.cantor {
        ctx.param("cantor", n);
        return Ok(cantor_configuration(n)?);
    }
    let n = source.random.expect("one source present");
    ctx.param("random", n);
    ctx.param("r", source.r);
    ctx.param("box", source.box_size);
    Ok(random_separated_configuration(
        n,
        source.r,
        source.box_size,
        ctx.seed,
    )?)
}

pub fn run(mut ctx: RunContext, source: InstanceSource) -> Result<()> {
    let config = build_instance(&mut ctx, &source)?;
    let matrix = build_repulsion_matrix(config)?;
    let solution = solve_equilibrium(&matrix)?;
    let row_sums = row_sum_report(&matrix, Some(&solution));

    let min_weight = solution
        .weights
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let output = MatrixOutput {
        n_points: matrix.dim(),
        r: matrix.configuration().radius(),
        dense: matrix.is_dense(),
        lambda: solution.lambda,
        capacity_stat: capacity_lower_bound(&solution),
        min_weight,
        nonneg: solution.nonneg,
        residual: solution.residual,
        iterations: solution.iterations,
        row_sums,
        weights: solution.weights.clone(),
        config: matrix.configuration().clone(),
    };

    match ctx.format_or(Format::Json) {
        Format::Json => ctx.write_primary(&pretty_json(&output)?)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = output
                .weights
                .iter()
                .enumerate()
                .map(|(i, w)| vec![i.to_string(), format!("{w:?}")])
                .collect();
            ctx.write_primary(&csv_table("index,weight", &rows))?;
        }
    }
    ctx.finish()
}
