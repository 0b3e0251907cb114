//! `generate`: build a generational set and emit its JSON description.

use anyhow::{bail, Result};
use repulsion_core::filtration::{build_cantor, build_random_filtration, build_socialist, to_json};
use repulsion_core::BranchingProfile;

use crate::args::{Format, GenerateKind};
use crate::context::RunContext;
use crate::io_util::parse_profile;

pub fn run(mut ctx: RunContext, kind: GenerateKind) -> Result<()> {
    if ctx.format_or(Format::Json) == Format::Csv {
        bail!("generate produces a set description, which has no csv form; use --format json");
    }
    let set = match kind {
        GenerateKind::Cantor { n } => {
            ctx.param("kind", "cantor");
            ctx.param("n", n);
            build_cantor(n)?
        }
        GenerateKind::Socialist { profile } => {
            ctx.param("kind", "socialist");
            ctx.param("profile", &profile);
            let counts = parse_profile(&profile)?;
            build_socialist(&BranchingProfile::new(counts)?, None)?
        }
        GenerateKind::Random { n, max_children } => {
            ctx.param("kind", "random");
            ctx.param("n", n);
            ctx.param("max_children", max_children);
            build_random_filtration(n, max_children, ctx.seed)?
        }
    };
    let mut text = to_json(&set);
    text.push('\n');
    ctx.write_primary(&text)?;
    ctx.finish()
}
