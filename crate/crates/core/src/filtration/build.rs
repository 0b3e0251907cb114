//! Constructors: the four-corner Cantor generations, socialist trees with a
//! pluggable geometry rule, and seeded random (non-socialist) trees.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BoxGeom, BranchingProfile, GenerationalSet, Node};
use crate::error::{Error, Result};

/// Hard ceiling on constructed tree size. Keeps every builder at desk scale;
/// the Cantor generation cap (`n <= 10`) stays well below it.
const MAX_NODES: usize = 2_000_000;

/// Geometry rule: boxes for the `count` children of a node occupying
/// `parent`. Containment and sibling disjointness are validated by the
/// builder, so a rule only has to propose boxes.
pub trait ChildPlacer {
    fn place(&self, parent: &BoxGeom, count: usize) -> Vec<BoxGeom>;
}

/// Places exactly four children of a quarter of the parent's sidelength at
/// the parent's corners. This is the four-corner Cantor rule: applied to the
/// unit square it keeps, of the sixteen quarter-grid squares, the four at
/// the corners.
#[derive(Debug, Clone, Copy, Default)]
pub struct CornerPlacer;

impl ChildPlacer for CornerPlacer {
    fn place(&self, parent: &BoxGeom, count: usize) -> Vec<BoxGeom> {
        if count != 4 {
            return Vec::new();
        }
        let hw = parent.hw / 4.0;
        let off = 3.0 * parent.hw / 4.0;
        [(-off, -off), (off, -off), (-off, off), (off, off)]
            .iter()
            .map(|&(dx, dy)| BoxGeom {
                cx: parent.cx + dx,
                cy: parent.cy + dy,
                hw,
            })
            .collect()
    }
}

/// The n-th generation of the four-corner Cantor set: generation-`l` boxes
/// have sidelength `4^-l`, the root is the unit square `[0,1]^2`.
pub fn build_cantor(n: usize) -> Result<GenerationalSet> {
    if n > 10 {
        return Err(Error::InvalidParameter(format!(
            "Cantor generation must satisfy 0 <= n <= 10, got {n}"
        )));
    }
    let profile = BranchingProfile::uniform(4, n)?;
    let root = BoxGeom {
        cx: 0.5,
        cy: 0.5,
        hw: 0.5,
    };
    socialist_tree(&profile, Some((&CornerPlacer, root)))
}

/// Socialist tree for a branching profile; every generation-`l` node gets
/// exactly `N_l` children. With a placer, geometry grows from the unit
/// square; without one the tree is purely combinatorial.
pub fn build_socialist(
    profile: &BranchingProfile,
    placer: Option<&dyn ChildPlacer>,
) -> Result<GenerationalSet> {
    if profile.generations() == 0 {
        return Err(Error::InvalidParameter(
            "branching profile must be non-empty".into(),
        ));
    }
    let root = BoxGeom {
        cx: 0.5,
        cy: 0.5,
        hw: 0.5,
    };
    socialist_tree(profile, placer.map(|p| (p, root)))
}

fn socialist_tree(
    profile: &BranchingProfile,
    placer: Option<(&dyn ChildPlacer, BoxGeom)>,
) -> Result<GenerationalSet> {
    let n = profile.generations();
    let mut total = 1usize;
    let mut width = 1usize;
    for &c in profile.counts() {
        width = width
            .checked_mul(c)
            .filter(|&w| w <= MAX_NODES)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "profile generates more than {MAX_NODES} nodes"
                ))
            })?;
        total += width;
        if total > MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "profile generates more than {MAX_NODES} nodes"
            )));
        }
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(total);
    let mut boxes: Option<Vec<BoxGeom>> = placer.as_ref().map(|&(_, root)| {
        let mut v = Vec::with_capacity(total);
        v.push(root);
        v
    });
    nodes.push(Node {
        id: 0,
        generation: 0,
        parent: None,
        children: Vec::new(),
    });

    let mut gen_first = 0usize;
    for (l, &count) in profile.counts().iter().enumerate() {
        let gen_end = nodes.len();
        for parent_id in gen_first..gen_end {
            let placed = placer.as_ref().map(|(rule, _)| {
                let parent_box = boxes.as_ref().expect("geometry enabled")[parent_id];
                rule.place(&parent_box, count)
            });
            if let Some(ref placed) = placed {
                if placed.len() != count {
                    return Err(Error::InvalidParameter(format!(
                        "placer produced {} boxes for node {parent_id}, which needs {count} \
                         children",
                        placed.len()
                    )));
                }
            }
            for k in 0..count {
                let id = nodes.len();
                nodes.push(Node {
                    id,
                    generation: l + 1,
                    parent: Some(parent_id),
                    children: Vec::new(),
                });
                nodes[parent_id].children.push(id);
                if let Some(ref placed) = placed {
                    boxes.as_mut().expect("geometry enabled").push(placed[k]);
                }
            }
        }
        gen_first = gen_end;
    }

    GenerationalSet::assemble(n, nodes, boxes)
}

/// Seeded tree with per-node child counts drawn uniformly from
/// `1..=max_children`; the same seed always yields the same tree. Carries no
/// geometry and is in general not socialist, which is exactly its use: the
/// repulsion lemmas it exercises hold without the socialist assumption.
pub fn build_random_filtration(
    n: usize,
    max_children: usize,
    seed: u64,
) -> Result<GenerationalSet> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "random filtration needs n >= 1".into(),
        ));
    }
    if max_children < 1 {
        return Err(Error::InvalidParameter(
            "random filtration needs max_children >= 1".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![Node {
        id: 0,
        generation: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut gen_first = 0usize;
    for l in 0..n {
        let gen_end = nodes.len();
        for parent_id in gen_first..gen_end {
            let count = rng.gen_range(1..=max_children);
            for _ in 0..count {
                let id = nodes.len();
                nodes.push(Node {
                    id,
                    generation: l + 1,
                    parent: Some(parent_id),
                    children: Vec::new(),
                });
                nodes[parent_id].children.push(id);
            }
        }
        if nodes.len() > MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "random filtration exceeded {MAX_NODES} nodes at generation {}",
                l + 1
            )));
        }
        gen_first = gen_end;
    }

    GenerationalSet::assemble(n, nodes, None)
}
