//! Generation trees: sets built from constituents graded by generation,
//! where every constituent of generation `l >= 1` has a unique ancestor of
//! each earlier generation. Leaves are exactly the generation-`n` nodes.
//!
//! Nodes are numbered canonically: breadth-first by generation, children in
//! parent order. The leaves therefore occupy one contiguous id block and any
//! node's leaf descendants form a contiguous index range, which the
//! evaluators in [`crate::repulsion`] rely on.

mod build;
mod io;

pub use build::{build_cantor, build_random_filtration, build_socialist, ChildPlacer, CornerPlacer};
pub use io::{from_json, read_set, to_json, write_set};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::pairwise_sum;

/// Absolute tolerance on `sum(masses) = 1` for probability vectors.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Axis-aligned square, stored as center and halfwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGeom {
    pub cx: f64,
    pub cy: f64,
    pub hw: f64,
}

impl BoxGeom {
    pub fn side(&self) -> f64 {
        2.0 * self.hw
    }

    pub fn diameter(&self) -> f64 {
        self.side() * std::f64::consts::SQRT_2
    }

    /// True if `other` lies inside `self` (closed boxes, boundary contact allowed).
    pub fn contains(&self, other: &BoxGeom) -> bool {
        (self.cx - other.cx).abs() + other.hw <= self.hw
            && (self.cy - other.cy).abs() + other.hw <= self.hw
    }

    /// True if the closed boxes have no common point.
    pub fn disjoint(&self, other: &BoxGeom) -> bool {
        let reach = self.hw + other.hw;
        (self.cx - other.cx).abs() > reach || (self.cy - other.cy).abs() > reach
    }

    /// Euclidean set distance between the closed boxes (0 if they touch).
    pub fn set_distance(&self, other: &BoxGeom) -> f64 {
        let reach = self.hw + other.hw;
        let dx = ((self.cx - other.cx).abs() - reach).max(0.0);
        let dy = ((self.cy - other.cy).abs() - reach).max(0.0);
        dx.hypot(dy)
    }

    fn is_valid(&self) -> bool {
        self.cx.is_finite() && self.cy.is_finite() && self.hw.is_finite() && self.hw > 0.0
    }
}

/// One constituent of the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub generation: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A set with the filtration property through generation `n`, as an explicit
/// tree. Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct GenerationalSet {
    n: usize,
    nodes: Vec<Node>,
    geometry: Option<Vec<BoxGeom>>,
    /// `gen_start[l]..gen_start[l+1]` is the id range of generation `l`.
    gen_start: Vec<usize>,
    /// Per node: range of leaf indices (0-based within the leaf block)
    /// covered by its subtree.
    leaf_ranges: Vec<(usize, usize)>,
}

impl GenerationalSet {
    /// Builds a set from raw parts and checks every structural invariant.
    /// `nodes` must already be in canonical order (see module docs).
    pub(crate) fn assemble(
        n: usize,
        nodes: Vec<Node>,
        geometry: Option<Vec<BoxGeom>>,
    ) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidSet(msg);

        if nodes.is_empty() {
            return Err(invalid("node list is empty".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(invalid(format!(
                    "ids must be contiguous and in order: position {i} holds id {}",
                    node.id
                )));
            }
            if node.generation > n {
                return Err(invalid(format!(
                    "node {i} has generation {} beyond deepest generation {n}",
                    node.generation
                )));
            }
        }

        // Generation-major layout: generations never decrease along ids.
        let mut gen_start = vec![0usize; n + 2];
        let mut prev_gen = 0usize;
        for node in &nodes {
            if node.generation < prev_gen {
                return Err(invalid(format!(
                    "node {} of generation {} appears after generation {}",
                    node.id, node.generation, prev_gen
                )));
            }
            if node.generation > prev_gen + 1 {
                return Err(invalid(format!(
                    "generation {} is empty",
                    prev_gen + 1
                )));
            }
            prev_gen = node.generation;
            gen_start[node.generation + 1] += 1;
        }
        if prev_gen != n {
            return Err(invalid(format!("generation {n} is empty")));
        }
        for l in 0..=n {
            gen_start[l + 1] += gen_start[l];
        }
        if gen_start[1] != 1 {
            return Err(invalid(format!(
                "expected exactly one generation-0 node, found {}; repulsion needs a common \
                 generation-0 ancestor for every leaf pair",
                gen_start[1]
            )));
        }

        // Parent and child wiring.
        for node in &nodes {
            match node.parent {
                None if node.generation == 0 => {}
                None => {
                    return Err(invalid(format!(
                        "node {} of generation {} has no parent",
                        node.id, node.generation
                    )))
                }
                Some(p) if node.generation == 0 => {
                    return Err(invalid(format!(
                        "generation-0 node {} claims parent {p}",
                        node.id
                    )))
                }
                Some(p) => {
                    let parent = nodes.get(p).ok_or_else(|| {
                        invalid(format!("node {} has dangling parent id {p}", node.id))
                    })?;
                    if parent.generation + 1 != node.generation {
                        return Err(invalid(format!(
                            "node {} of generation {} has parent {p} of generation {}",
                            node.id, node.generation, parent.generation
                        )));
                    }
                }
            }
            for &c in &node.children {
                let child = nodes
                    .get(c)
                    .ok_or_else(|| invalid(format!("node {} has dangling child id {c}", node.id)))?;
                if child.parent != Some(node.id) {
                    return Err(invalid(format!(
                        "node {c} is listed as a child of {} but has parent {:?}",
                        node.id, child.parent
                    )));
                }
            }
            if node.generation == n && !node.children.is_empty() {
                return Err(invalid(format!(
                    "generation-{n} node {} must be a leaf but has children",
                    node.id
                )));
            }
            if node.generation < n && node.children.is_empty() {
                return Err(invalid(format!(
                    "node {} of generation {} has no children; leaves must sit at generation {n}",
                    node.id, node.generation
                )));
            }
        }

        // Canonical order: concatenating children over each generation in id
        // order must reproduce the next generation's id range exactly.
        for l in 0..n {
            let mut expected = gen_start[l + 1];
            for node in &nodes[gen_start[l]..gen_start[l + 1]] {
                for &c in &node.children {
                    if c != expected {
                        return Err(invalid(format!(
                            "children are not in canonical breadth-first order: node {} lists \
                             child {c} where {expected} was expected",
                            node.id
                        )));
                    }
                    expected += 1;
                }
            }
            if expected != gen_start[l + 2] {
                return Err(invalid(format!(
                    "generation {} has {} nodes but only {} are reachable from generation {l}",
                    l + 1,
                    gen_start[l + 2] - gen_start[l + 1],
                    expected - gen_start[l + 1]
                )));
            }
        }

        if let Some(boxes) = &geometry {
            if boxes.len() != nodes.len() {
                return Err(Error::DimensionMismatch {
                    expected: nodes.len(),
                    actual: boxes.len(),
                });
            }
            for (i, b) in boxes.iter().enumerate() {
                if !b.is_valid() {
                    return Err(invalid(format!(
                        "node {i} has a degenerate box (halfwidth {})",
                        b.hw
                    )));
                }
            }
            for node in &nodes {
                for &c in &node.children {
                    if !boxes[node.id].contains(&boxes[c]) {
                        return Err(Error::GeometryViolation {
                            a: node.id,
                            b: c,
                            detail: "child box is not contained in its parent box".into(),
                        });
                    }
                }
                for (k, &a) in node.children.iter().enumerate() {
                    for &b in &node.children[k + 1..] {
                        if !boxes[a].disjoint(&boxes[b]) {
                            return Err(Error::GeometryViolation {
                                a,
                                b,
                                detail: "sibling boxes overlap or touch".into(),
                            });
                        }
                    }
                }
            }
        }

        // Leaf index ranges, computed children-first (reverse id order).
        let leaf_start = gen_start[n];
        let mut leaf_ranges = vec![(0usize, 0usize); nodes.len()];
        for id in (0..nodes.len()).rev() {
            let node = &nodes[id];
            if node.generation == n {
                let idx = id - leaf_start;
                leaf_ranges[id] = (idx, idx + 1);
            } else {
                let first = leaf_ranges[node.children[0]].0;
                let last = leaf_ranges[*node.children.last().expect("internal node")].1;
                leaf_ranges[id] = (first, last);
            }
        }

        Ok(GenerationalSet {
            n,
            nodes,
            geometry,
            gen_start,
            leaf_ranges,
        })
    }

    /// Deepest generation index `n`.
    pub fn deepest_generation(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len() - self.gen_start[self.n]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn has_geometry(&self) -> bool {
        self.geometry.is_some()
    }

    pub fn boxes(&self) -> Option<&[BoxGeom]> {
        self.geometry.as_deref()
    }

    /// Id range of generation `l` (empty range if `l > n`).
    pub fn generation_range(&self, l: usize) -> std::ops::Range<usize> {
        if l > self.n {
            return 0..0;
        }
        self.gen_start[l]..self.gen_start[l + 1]
    }

    /// Id of the first leaf; leaves are `leaf_start()..node_count()`.
    pub fn leaf_start(&self) -> usize {
        self.gen_start[self.n]
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id >= self.gen_start[self.n] && id < self.nodes.len()
    }

    /// Position of a leaf id within the leaf block.
    pub fn leaf_index(&self, id: usize) -> Result<usize> {
        if !self.is_leaf(id) {
            return Err(Error::NotALeaf(id));
        }
        Ok(id - self.gen_start[self.n])
    }

    pub fn leaf_id(&self, index: usize) -> usize {
        self.gen_start[self.n] + index
    }

    /// Leaf-index range covered by the subtree rooted at `id`.
    pub fn subtree_leaf_range(&self, id: usize) -> std::ops::Range<usize> {
        let (a, b) = self.leaf_ranges[id];
        a..b
    }

    /// Id range of the generation-`g` descendants of `id` (requires
    /// `g >= generation(id)`). Contiguous thanks to the canonical layout.
    pub fn descendant_range(&self, id: usize, g: usize) -> std::ops::Range<usize> {
        debug_assert!(g >= self.nodes[id].generation && g <= self.n);
        let mut lo = id;
        let mut hi = id;
        for _ in self.nodes[id].generation..g {
            lo = self.nodes[lo].children[0];
            hi = *self.nodes[hi].children.last().expect("internal node");
        }
        lo..hi + 1
    }

    /// The generation-`g` ancestor of a leaf (or the leaf itself for `g = n`).
    pub fn ancestor_at(&self, leaf: usize, g: usize) -> Result<usize> {
        if !self.is_leaf(leaf) {
            return Err(Error::NotALeaf(leaf));
        }
        let mut cur = leaf;
        for _ in g..self.n {
            cur = self.nodes[cur].parent.expect("non-root has a parent");
        }
        Ok(cur)
    }

    /// Largest generation at which two leaves share an ancestor; `n` for a
    /// leaf paired with itself.
    pub fn last_common_generation(&self, leaf_a: usize, leaf_b: usize) -> Result<usize> {
        if !self.is_leaf(leaf_a) {
            return Err(Error::NotALeaf(leaf_a));
        }
        if !self.is_leaf(leaf_b) {
            return Err(Error::NotALeaf(leaf_b));
        }
        let mut a = leaf_a;
        let mut b = leaf_b;
        let mut g = self.n;
        while a != b {
            a = self.nodes[a].parent.expect("distinct nodes below the root");
            b = self.nodes[b].parent.expect("distinct nodes below the root");
            g -= 1;
        }
        Ok(g)
    }

    /// Sums leaf masses up the tree; entry `id` is the mass of that node's
    /// subtree. Input is indexed by leaf position.
    pub fn aggregate_masses(&self, leaf_masses: &[f64]) -> Result<Vec<f64>> {
        if leaf_masses.len() != self.leaf_count() {
            return Err(Error::DimensionMismatch {
                expected: self.leaf_count(),
                actual: leaf_masses.len(),
            });
        }
        let leaf_start = self.gen_start[self.n];
        let mut sums = vec![0.0f64; self.nodes.len()];
        sums[leaf_start..].copy_from_slice(leaf_masses);
        for id in (1..self.nodes.len()).rev() {
            let parent = self.nodes[id].parent.expect("non-root has a parent");
            sums[parent] += sums[id];
        }
        Ok(sums)
    }

    /// Child counts per generation if the tree is socialist (every
    /// generation-`l` node has the same number of children), else `None`.
    pub fn branching_profile(&self) -> Option<BranchingProfile> {
        let mut counts = Vec::with_capacity(self.n);
        for l in 0..self.n {
            let range = self.generation_range(l);
            let count = self.nodes[range.start].children.len();
            for node in &self.nodes[range] {
                if node.children.len() != count {
                    return None;
                }
            }
            counts.push(count);
        }
        Some(BranchingProfile { counts })
    }
}

/// Child counts `N_0..N_{n-1}` of a socialist tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingProfile {
    counts: Vec<usize>,
}

impl BranchingProfile {
    /// Every entry must be >= 1; terminated constructions are represented by
    /// a shorter profile, never by zero entries.
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if let Some(pos) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidParameter(format!(
                "branching profile entry {pos} is zero; shorten the profile instead"
            )));
        }
        Ok(BranchingProfile { counts })
    }

    pub fn uniform(count: usize, generations: usize) -> Result<Self> {
        Self::new(vec![count; generations])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn generations(&self) -> usize {
        self.counts.len()
    }

    /// Leaf count of the tree this profile generates.
    pub fn leaf_count(&self) -> usize {
        self.counts.iter().product()
    }
}

/// Strictly increasing positive repulsion strengths `r_0 < ... < r_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepulsionSchedule {
    values: Vec<f64>,
}

impl RepulsionSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule(0));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidSchedule(i));
            }
            if i > 0 && v <= values[i - 1] {
                return Err(Error::InvalidSchedule(i));
            }
        }
        Ok(RepulsionSchedule { values })
    }

    /// The schedule `r_l = 4^l`, matched to the four-corner Cantor scaling.
    pub fn cantor(n: usize) -> Self {
        RepulsionSchedule {
            values: (0..=n).map(|l| 4f64.powi(l as i32)).collect(),
        }
    }

    pub fn value(&self, l: usize) -> f64 {
        self.values[l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks that the schedule covers generations `0..=n` of `set`.
    pub fn check_matches(&self, set: &GenerationalSet) -> Result<()> {
        if self.values.len() != set.deepest_generation() + 1 {
            return Err(Error::DimensionMismatch {
                expected: set.deepest_generation() + 1,
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Probability masses over the leaf block, in leaf-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafMeasure {
    masses: Vec<f64>,
}

impl LeafMeasure {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidMeasure("empty mass vector".into()));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "mass {m} at leaf index {i} is not a finite nonnegative value"
                )));
            }
        }
        let total = pairwise_sum(&masses);
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(LeafMeasure { masses })
    }

    /// Equal mass `1/count` on every leaf.
    pub fn equidistributed(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidMeasure("empty mass vector".into()));
        }
        Ok(LeafMeasure {
            masses: vec![1.0 / count as f64; count],
        })
    }

    /// All mass on a single leaf index.
    pub fn point_mass(count: usize, index: usize) -> Result<Self> {
        if index >= count {
            return Err(Error::InvalidMeasure(format!(
                "point-mass index {index} out of range for {count} leaves"
            )));
        }
        let mut masses = vec![0.0; count];
        masses[index] = 1.0;
        Ok(LeafMeasure { masses })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn check_matches(&self, set: &GenerationalSet) -> Result<()> {
        if self.masses.len() != set.leaf_count() {
            return Err(Error::DimensionMismatch {
                expected: set.leaf_count(),
                actual: self.masses.len(),
            });
        }
        Ok(())
    }
}

/// Worst case found while checking one clause of the even-distribution
/// definition. `stress <= 1` satisfies the clause; larger violates it.
#[derive(Debug, Clone, Serialize)]
pub struct ClauseOffender {
    pub generation: usize,
    pub node_a: usize,
    pub node_b: Option<usize>,
    pub stress: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseReport {
    pub pass: bool,
    pub checked: usize,
    pub worst: Option<ClauseOffender>,
}

/// Result of [`validate_even_distribution`].
#[derive(Debug, Clone, Serialize)]
pub struct EvenDistributionReport {
    pub pass: bool,
    pub constant: f64,
    pub epsilon: f64,
    /// Clause (a): box diameters track the schedule, `1/C <= 1/(diam * r_k) <= C`.
    pub diameter_clause: ClauseReport,
    /// Clause (b): distinct siblings at generation k are at least `eps / r_k` apart.
    pub separation_clause: ClauseReport,
}

/// Checks that the geometry of `set` is evenly distributed with respect to
/// `schedule`: generation-k boxes have diameter comparable to `1/r_k` (within
/// factor `c`) and distinct siblings are separated by at least `eps / r_k`.
pub fn validate_even_distribution(
    set: &GenerationalSet,
    schedule: &RepulsionSchedule,
    c: f64,
    eps: f64,
) -> Result<EvenDistributionReport> {
    let boxes = set.boxes().ok_or(Error::MissingGeometry)?;
    schedule.check_matches(set)?;
    if !c.is_finite() || c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "comparability constant must be >= 1, got {c}"
        )));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "separation constant must be positive, got {eps}"
        )));
    }

    let mut diameter = ClauseReport {
        pass: true,
        checked: 0,
        worst: None,
    };
    for l in 0..=set.deepest_generation() {
        let r = schedule.value(l);
        for id in set.generation_range(l) {
            let f = 1.0 / (boxes[id].diameter() * r);
            let stress = (f / c).max(1.0 / (f * c));
            diameter.checked += 1;
            if diameter.worst.as_ref().is_none_or(|w| stress > w.stress) {
                diameter.worst = Some(ClauseOffender {
                    generation: l,
                    node_a: id,
                    node_b: None,
                    stress,
                });
            }
        }
    }
    diameter.pass = diameter.worst.as_ref().is_none_or(|w| w.stress <= 1.0);

    let mut separation = ClauseReport {
        pass: true,
        checked: 0,
        worst: None,
    };
    for l in 0..set.deepest_generation() {
        let r_child = schedule.value(l + 1);
        let required = eps / r_child;
        for id in set.generation_range(l) {
            let children = &set.node(id).children;
            for (k, &a) in children.iter().enumerate() {
                for &b in &children[k + 1..] {
                    let dist = boxes[a].set_distance(&boxes[b]);
                    let stress = if dist > 0.0 {
                        required / dist
                    } else {
                        f64::INFINITY
                    };
                    separation.checked += 1;
                    if separation.worst.as_ref().is_none_or(|w| stress > w.stress) {
                        separation.worst = Some(ClauseOffender {
                            generation: l + 1,
                            node_a: a,
                            node_b: Some(b),
                            stress,
                        });
                    }
                }
            }
        }
    }
    separation.pass = separation.worst.as_ref().is_none_or(|w| w.stress <= 1.0);

    Ok(EvenDistributionReport {
        pass: diameter.pass && separation.pass,
        constant: c,
        epsilon: eps,
        diameter_clause: diameter,
        separation_clause: separation,
    })
}

#[cfg(test)]
mod tests;
