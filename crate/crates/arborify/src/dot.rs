//! DOT export. Leaf colors follow the drawing convention: green fill for
//! hatted (√w-free / derivative) ends, brown edges for t1, blue for t2,
//! dashed for conjugated edges; pair links are drawn as dotted connectors.

use crate::pairing::Pairing;
use crate::tree::{DecoratedTree, EdgeKind, TreeNode};
use crate::word::Word;

const GREEN: &str = "palegreen";
const T1_COLOR: &str = "saddlebrown";
const T2_COLOR: &str = "steelblue";

fn edge_style(kind: EdgeKind, conj: bool) -> String {
    let color = match kind {
        EdgeKind::T1 => T1_COLOR,
        EdgeKind::T2 => T2_COLOR,
    };
    let style = if conj { "dashed" } else { "solid" };
    format!("color={color}, style={style}")
}

pub fn tree_to_dot(tree: &DecoratedTree, pairing: &Pairing) -> String {
    let mut out = String::from("graph tree {\n  node [fontsize=10];\n");
    out.push_str("  root [shape=point];\n");
    let mut next_id = 0usize;
    let mut leaf_nodes: Vec<String> = Vec::new();
    fn walk(
        n: &TreeNode,
        parent: &str,
        out: &mut String,
        next_id: &mut usize,
        leaf_nodes: &mut Vec<String>,
    ) {
        let id = format!("n{}", *next_id);
        *next_id += 1;
        if n.is_leaf() {
            let fill = if n.decor.hat {
                format!(", style=filled, fillcolor={GREEN}")
            } else {
                String::new()
            };
            out.push_str(&format!(
                "  {id} [shape=circle, label=\"{}\"{fill}];\n",
                n.freq
            ));
            leaf_nodes.push(id.clone());
        } else {
            out.push_str(&format!(
                "  {id} [shape=point, xlabel=\"{}\"];\n",
                n.freq
            ));
        }
        out.push_str(&format!(
            "  {parent} -- {id} [{}];\n",
            edge_style(n.decor.kind, n.decor.conj)
        ));
        for c in &n.children {
            walk(c, &id, out, next_id, leaf_nodes);
        }
    }
    for r in tree.root_children() {
        walk(r, "root", &mut out, &mut next_id, &mut leaf_nodes);
    }
    for ((a, b), class1) in pairing.all_pairs() {
        if let (Some(na), Some(nb)) = (leaf_nodes.get(a as usize), leaf_nodes.get(b as usize)) {
            let color = if class1 { "darkgreen" } else { "gray40" };
            out.push_str(&format!(
                "  {na} -- {nb} [style=dotted, color={color}, constraint=false];\n"
            ));
        }
    }
    out.push_str("}\n");
    out
}

pub fn word_to_dot(word: &Word) -> String {
    let mut out = String::from("graph word {\n  node [fontsize=10];\n  rankdir=LR;\n");
    let mut slot_nodes: Vec<String> = Vec::new();
    for (i, letter) in word.letters().iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{i} {{\n"));
        let label = if letter.green_node() {
            format!("letter {i} (t=0)")
        } else {
            format!("letter {i}")
        };
        out.push_str(&format!("    label=\"{label}\";\n"));
        let root = format!("L{i}");
        let root_fill = if letter.green_node() {
            format!(", style=filled, fillcolor={GREEN}")
        } else {
            String::new()
        };
        out.push_str(&format!("    {root} [shape=point{root_fill}];\n"));
        for (j, s) in letter.slots().iter().enumerate() {
            let id = format!("s{i}_{j}");
            let fill = if s.hat {
                format!(", style=filled, fillcolor={GREEN}")
            } else {
                String::new()
            };
            out.push_str(&format!(
                "    {id} [shape=circle, label=\"{}\"{fill}];\n",
                s.freq
            ));
            out.push_str(&format!(
                "    {root} -- {id} [{}];\n",
                edge_style(EdgeKind::T1, s.conj)
            ));
            slot_nodes.push(id);
        }
        out.push_str("  }\n");
    }
    for ((a, b), class1) in word.pairing().all_pairs() {
        let color = if class1 { "darkgreen" } else { "gray40" };
        out.push_str(&format!(
            "  {} -- {} [style=dotted, color={color}, constraint=false];\n",
            slot_nodes[a as usize], slot_nodes[b as usize]
        ));
    }
    out.push_str("}\n");
    out
}
