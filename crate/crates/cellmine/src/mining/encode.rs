//! Canonical codes for seed trees and neighbor attachments.
//!
//! String equality of codes certifies isomorphism (under input-pin
//! canonicalization), which lets the miner group subgraphs without ever
//! running a general isomorphism check.

use crate::netlist::{NetlistGraph, VertexId};

/// One pattern-internal edge, endpoints given as in-pattern indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub from: u32,
    pub to: u32,
    pub out_pin: String,
    /// Canonicalized input pin on the sink cell.
    pub in_canon: String,
}

/// A 2-level predecessor tree: a root plus every distinct vertex driving it.
#[derive(Debug, Clone)]
pub struct SeedTree {
    /// `[<rootType>](<leafType>,<outPin>,<inPinCanonical>)…` with leaves in
    /// lexicographic order. A predecessor feeding the root through several
    /// pins contributes one leaf listing all its pin pairs:
    /// `(<leafType>,<out>,<in>,<out>,<in>…)` — folding parallel edges into
    /// the leaf keeps code equality equivalent to tree isomorphism.
    pub code: String,
    /// Index 0 is the root; leaves follow in leaf-code order.
    pub vertices: Vec<VertexId>,
    /// All root-feeding edges, endpoints as indices into `vertices`.
    pub edges: Vec<PatternEdge>,
}

/// Encode the 2-level predecessor tree rooted at `root`.
///
/// A root with no predecessors yields the bare `[<rootType>]` code and a
/// single-vertex tree. Self-loop edges are ignored (the root cannot be its
/// own leaf).
pub fn tree_encode(graph: &NetlistGraph, root: VertexId) -> SeedTree {
    // Group incoming edges by driving vertex, keeping first-seen driver order.
    let mut preds: Vec<(VertexId, Vec<(String, String)>)> = Vec::new();
    for &eid in &graph.in_edges[root as usize] {
        let e = &graph.edges[eid as usize];
        if e.driver == root {
            continue;
        }
        let pair = (e.out_pin.clone(), e.in_canon.clone());
        match preds.iter_mut().find(|(v, _)| *v == e.driver) {
            Some((_, pairs)) => pairs.push(pair),
            None => preds.push((e.driver, vec![pair])),
        }
    }

    let mut leaves: Vec<(String, VertexId, Vec<(String, String)>)> = preds
        .into_iter()
        .map(|(v, mut pairs)| {
            pairs.sort();
            let mut code = format!("({}", graph.cell(v));
            for (out, inp) in &pairs {
                code.push_str(&format!(",{out},{inp}"));
            }
            code.push(')');
            (code, v, pairs)
        })
        .collect();
    leaves.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut code = format!("[{}]", graph.cell(root));
    let mut vertices = vec![root];
    let mut edges = Vec::new();
    for (i, (leaf_code, v, pairs)) in leaves.into_iter().enumerate() {
        code.push_str(&leaf_code);
        vertices.push(v);
        for (out_pin, in_canon) in pairs {
            edges.push(PatternEdge {
                from: (i + 1) as u32,
                to: 0,
                out_pin,
                in_canon,
            });
        }
    }
    SeedTree { code, vertices, edges }
}

/// How a neighbor vertex attaches to a pattern subgraph: canonical code plus
/// the attachment edges (the neighbor gets index `sub_vertices.len()`).
#[derive(Debug, Clone)]
pub struct Attachment {
    pub code: String,
    pub edges: Vec<PatternEdge>,
}

/// Encode every edge between `neighbor` and the subgraph `sub_vertices`.
///
/// Edge codes are `(<idx>,<outPin>,<inPin>)` when the subgraph vertex at
/// `idx` drives the neighbor and `(<outPin>,<inPin>,<idx>)` when the
/// neighbor drives the subgraph vertex, sorted lexicographically behind
/// `[<neighborType>]`.
pub fn neighbor_attachment(
    graph: &NetlistGraph,
    neighbor: VertexId,
    sub_vertices: &[VertexId],
) -> Attachment {
    let new_idx = sub_vertices.len() as u32;
    let pos = |v: VertexId| sub_vertices.iter().position(|&s| s == v);
    let mut codes: Vec<String> = Vec::new();
    let mut edges: Vec<PatternEdge> = Vec::new();

    for &eid in &graph.in_edges[neighbor as usize] {
        let e = &graph.edges[eid as usize];
        if let Some(idx) = pos(e.driver) {
            codes.push(format!("({idx},{},{})", e.out_pin, e.in_canon));
            edges.push(PatternEdge {
                from: idx as u32,
                to: new_idx,
                out_pin: e.out_pin.clone(),
                in_canon: e.in_canon.clone(),
            });
        }
    }
    for &eid in &graph.out_edges[neighbor as usize] {
        let e = &graph.edges[eid as usize];
        if let Some(idx) = pos(e.sink) {
            codes.push(format!("({},{},{idx})", e.out_pin, e.in_canon));
            edges.push(PatternEdge {
                from: new_idx,
                to: idx as u32,
                out_pin: e.out_pin.clone(),
                in_canon: e.in_canon.clone(),
            });
        }
    }
    debug_assert!(!codes.is_empty(), "neighbor must touch the subgraph");

    codes.sort();
    let mut code = format!("[{}]", graph.cell(neighbor));
    for c in &codes {
        code.push_str(c);
    }
    edges.sort_by(|a, b| {
        (a.from, a.to, &a.out_pin, &a.in_canon).cmp(&(b.from, b.to, &b.out_pin, &b.in_canon))
    });
    Attachment { code, edges }
}
