//! Shared parsing and table-writing helpers.

use anyhow::{bail, Context, Result};
use repulsion_core::filtration::{GenerationalSet, LeafMeasure, RepulsionSchedule};

/// `cantor` (4^l for l = 0..n) or an explicit comma list of strengths.
pub fn parse_schedule(text: &str, deepest_generation: usize) -> Result<RepulsionSchedule> {
    if text.trim() == "cantor" {
        return Ok(RepulsionSchedule::cantor(deepest_generation));
    }
    let values: Vec<f64> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("schedule entry {tok:?} is not a number"))
        })
        .collect::<Result<_>>()?;
    Ok(RepulsionSchedule::new(values)?)
}

/// Child-count profile like `2,3`.
pub fn parse_profile(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .with_context(|| format!("profile entry {tok:?} is not a count"))
        })
        .collect()
}

/// Inclusive range `a..b`, or a single integer for a one-element range.
/// An inverted range is legal and empty.
pub fn parse_range(text: &str) -> Result<(usize, usize)> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let lo = a.trim().parse::<usize>().context("range start")?;
        let hi = b.trim().parse::<usize>().context("range end")?;
        Ok((lo, hi))
    } else {
        let v = text.parse::<usize>().context("range value")?;
        Ok((v, v))
    }
}

/// Measure selector: `equidistributed`, `point:<leaf>`, or a path to a
/// leaf,mass CSV (the minimize command's output format).
pub fn read_measure(selector: &str, set: &GenerationalSet) -> Result<LeafMeasure> {
    let leaves = set.leaf_count();
    if selector == "equidistributed" {
        return Ok(LeafMeasure::equidistributed(leaves)?);
    }
    if let Some(idx) = selector.strip_prefix("point:") {
        let leaf = idx
            .parse::<usize>()
            .with_context(|| format!("leaf index {idx:?} in point:<leaf>"))?;
        return Ok(LeafMeasure::point_mass(leaves, leaf)?);
    }
    let text = std::fs::read_to_string(selector)
        .with_context(|| format!("reading measure file {selector}"))?;
    parse_measure_csv(&text, leaves)
}

pub fn parse_measure_csv(text: &str, leaves: usize) -> Result<LeafMeasure> {
    let mut masses = vec![None; leaves];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line == "leaf,mass" {
            continue;
        }
        let (leaf_tok, mass_tok) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected leaf,mass", lineno + 1))?;
        let leaf: usize = leaf_tok
            .trim()
            .parse()
            .with_context(|| format!("line {}: leaf index", lineno + 1))?;
        let mass: f64 = mass_tok
            .trim()
            .parse()
            .with_context(|| format!("line {}: mass", lineno + 1))?;
        if leaf >= leaves {
            bail!(
                "line {}: leaf {leaf} out of range for a {leaves}-leaf set",
                lineno + 1
            );
        }
        if masses[leaf].replace(mass).is_some() {
            bail!("line {}: duplicate entry for leaf {leaf}", lineno + 1);
        }
    }
    let masses: Vec<f64> = masses
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.with_context(|| format!("no mass given for leaf {i}")))
        .collect::<Result<_>>()?;
    Ok(LeafMeasure::new(masses)?)
}

pub fn measure_to_csv(masses: &[f64]) -> String {
    let mut text = String::from("leaf,mass\n");
    for (i, m) in masses.iter().enumerate() {
        text.push_str(&format!("{i},{m}\n"));
    }
    text
}

/// One CSV table: header row plus data rows, fields joined with commas.
/// f64 fields rendered with Rust's shortest round-trip formatting.
pub fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

pub fn pretty_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
