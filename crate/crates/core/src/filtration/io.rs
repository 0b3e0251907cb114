//! JSON serialization of generational sets.
//!
//! Format: `{ "n": int, "nodes": [ { "id", "gen", "parent", "children",
//! "box" } ] }` with `parent` null on the root and `box` null (or absent)
//! on every node of a combinatorial set. Field names are part of the
//! interface; unknown fields are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoxGeom, GenerationalSet, Node};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    n: usize,
    nodes: Vec<NodeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: usize,
    gen: usize,
    #[serde(default)]
    parent: Option<usize>,
    children: Vec<usize>,
    #[serde(default, rename = "box")]
    box_geom: Option<BoxFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxFile {
    cx: f64,
    cy: f64,
    hw: f64,
}

pub fn to_json(set: &GenerationalSet) -> String {
    let nodes = set
        .nodes()
        .iter()
        .map(|node| NodeFile {
            id: node.id,
            gen: node.generation,
            parent: node.parent,
            children: node.children.clone(),
            box_geom: set.boxes().map(|b| BoxFile {
                cx: b[node.id].cx,
                cy: b[node.id].cy,
                hw: b[node.id].hw,
            }),
        })
        .collect();
    let file = SetFile {
        n: set.deepest_generation(),
        nodes,
    };
    serde_json::to_string_pretty(&file).expect("set serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<GenerationalSet> {
    let file: SetFile = serde_json::from_str(text)?;

    let mut entries = file.nodes;
    entries.sort_by_key(|e| e.id);

    let with_geometry = entries.iter().filter(|e| e.box_geom.is_some()).count();
    if with_geometry != 0 && with_geometry != entries.len() {
        return Err(Error::InvalidSet(format!(
            "{with_geometry} of {} nodes carry a box; geometry must be on all nodes or none",
            entries.len()
        )));
    }

    let mut nodes = Vec::with_capacity(entries.len());
    let mut boxes = if with_geometry > 0 {
        Some(Vec::with_capacity(entries.len()))
    } else {
        None
    };
    for entry in entries {
        nodes.push(Node {
            id: entry.id,
            generation: entry.gen,
            parent: entry.parent,
            children: entry.children,
        });
        if let Some(b) = entry.box_geom {
            boxes.as_mut().expect("geometry enabled").push(BoxGeom {
                cx: b.cx,
                cy: b.cy,
                hw: b.hw,
            });
        }
    }

    GenerationalSet::assemble(file.n, nodes, boxes)
}

pub fn write_set(set: &GenerationalSet, path: &Path) -> Result<()> {
    let mut text = to_json(set);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_set(path: &Path) -> Result<GenerationalSet> {
    let text = fs::read_to_string(path)?;
    from_json(&text)
}
