//! Independent result verification.
//!
//! Two oracles that deliberately avoid the miner's canonical code strings
//! and re-derive everything from raw graph edges, so they catch encoding
//! bugs instead of inheriting them:
//!
//! * [`isomorphic_occurrences`] — every pair of occurrences in a pattern
//!   group is isomorphic as a pin-labeled digraph, certified by a fresh
//!   backtracking search (no positional hints), after checking that each
//!   occurrence realizes every pattern edge with distinct netlist edges.
//! * [`expansion_matches`] — expanding a rewritten netlist reproduces the
//!   original's graph under the construction's own gate mapping,
//!   label-for-label and edge-for-edge.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::combine::SelectedGroup;
use crate::emit::{CustomCellSpec, ExpandedInstance, RewriteOutcome};
use crate::library::CellLibrary;
use crate::netlist::{build_graph, Model, NetlistGraph, VertexId};

type Check = std::result::Result<(), String>;

/// Directed pin-labeled multigraph of one occurrence: `adj[i][j]` holds the
/// sorted `(out_pin, canonical_in_pin)` labels of all i→j edges.
struct Instance {
    cells: Vec<String>,
    adj: Vec<Vec<Vec<(String, String)>>>,
}

fn instance(
    graph: &NetlistGraph,
    lib: &CellLibrary,
    group: &SelectedGroup,
    member: &[VertexId],
) -> std::result::Result<Instance, String> {
    let size = member.len();
    let index_of: HashMap<VertexId, usize> =
        member.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if index_of.len() != size {
        return Err(format!("occurrence {member:?} repeats a vertex"));
    }

    // Real i→j pin-label multisets, with canonical pins re-derived from the
    // library rather than read off the graph edge.
    let mut adj = vec![vec![Vec::new(); size]; size];
    for (i, &v) in member.iter().enumerate() {
        for &eid in &graph.out_edges[v as usize] {
            let e = &graph.edges[eid as usize];
            let Some(&j) = index_of.get(&e.sink) else { continue };
            let sink_cell = lib
                .get(graph.cell(e.sink))
                .map_err(|err| err.to_string())?;
            let canon = sink_cell
                .canonical_pin(&e.in_pin)
                .map_err(|err| err.to_string())?;
            adj[i][j].push((e.out_pin.clone(), canon.to_string()));
        }
    }

    // Each pattern edge must be realized by a distinct netlist edge.
    let mut wanted = vec![vec![Vec::new(); size]; size];
    for e in &group.edges {
        wanted[e.from as usize][e.to as usize].push((e.out_pin.clone(), e.in_canon.clone()));
    }
    for i in 0..size {
        for j in 0..size {
            wanted[i][j].sort();
            adj[i][j].sort();
            let mut pool = adj[i][j].clone();
            for label in &wanted[i][j] {
                match pool.iter().position(|l| l == label) {
                    Some(k) => {
                        pool.remove(k);
                    }
                    None => {
                        return Err(format!(
                            "occurrence {member:?} lacks a {label:?} edge \
                             from position {i} to {j}"
                        ))
                    }
                }
            }
        }
    }

    // The occurrence's pattern structure is the accumulated edges, not any
    // extra netlist edges that happen to sit between its vertices.
    if !connected_under(&wanted, size) {
        return Err(format!("occurrence {member:?} is not connected"));
    }
    Ok(Instance {
        cells: member
            .iter()
            .map(|&v| graph.cell(v).to_string())
            .collect(),
        adj: wanted,
    })
}

fn connected_under(adj: &[Vec<Vec<(String, String)>>], size: usize) -> bool {
    if size == 0 {
        return false;
    }
    let mut seen = vec![false; size];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..size {
            if !seen[j] && (!adj[i][j].is_empty() || !adj[j][i].is_empty()) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Backtracking search for a cell- and edge-label-preserving bijection.
fn find_mapping(a: &Instance, b: &Instance) -> Option<Vec<usize>> {
    let n = a.cells.len();
    if b.cells.len() != n {
        return None;
    }
    let mut mapping: Vec<Option<usize>> = vec![None; n];
    let mut taken = vec![false; n];

    fn extend(
        a: &Instance,
        b: &Instance,
        mapping: &mut Vec<Option<usize>>,
        taken: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        let n = a.cells.len();
        if v == n {
            return true;
        }
        'cand: for c in 0..n {
            if taken[c] || a.cells[v] != b.cells[c] {
                continue;
            }
            for (u, &m) in mapping.iter().enumerate().take(v) {
                let m = m.expect("prefix is mapped");
                if a.adj[v][u] != b.adj[c][m] || a.adj[u][v] != b.adj[m][c] {
                    continue 'cand;
                }
            }
            if a.adj[v][v] != b.adj[c][c] {
                continue;
            }
            mapping[v] = Some(c);
            taken[c] = true;
            if extend(a, b, mapping, taken, v + 1) {
                return true;
            }
            mapping[v] = None;
            taken[c] = false;
        }
        false
    }

    if extend(a, b, &mut mapping, &mut taken, 0) {
        Some(mapping.into_iter().map(|m| m.unwrap()).collect())
    } else {
        None
    }
}

/// Check that all occurrences of `group` are pairwise isomorphic pin-labeled
/// digraphs over the group's pattern edges, each realized by real netlist
/// edges, pairwise vertex-disjoint and connected.
pub fn isomorphic_occurrences(
    graph: &NetlistGraph,
    lib: &CellLibrary,
    group: &SelectedGroup,
) -> Check {
    if group.members.is_empty() {
        return Err(format!("pattern {} has no occurrences", group.code));
    }
    let mut claimed: HashSet<VertexId> = HashSet::new();
    for member in &group.members {
        for &v in member {
            if !claimed.insert(v) {
                return Err(format!(
                    "pattern {}: vertex {v} appears in two occurrences",
                    group.code
                ));
            }
        }
    }

    let instances: Vec<Instance> = group
        .members
        .iter()
        .map(|m| instance(graph, lib, group, m))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("pattern {}: {e}", group.code))?;
    for (i, inst) in instances.iter().enumerate().skip(1) {
        if find_mapping(&instances[0], inst).is_none() {
            return Err(format!(
                "pattern {}: occurrence {i} is not isomorphic to occurrence 0",
                group.code
            ));
        }
    }
    Ok(())
}

/// Check a full rewrite → expand round trip under its construction mapping.
///
/// Verifies that expanding `rewritten` reproduced `original`: untouched
/// gates are cloned verbatim, each expanded member gate carries its
/// occurrence's cell type, the two netlist graphs agree edge-for-edge under
/// the gate bijection, and the boundary (ports, latches, boundary nets) is
/// unchanged.
pub fn expansion_matches(
    original: &Model,
    rewritten: &RewriteOutcome,
    expanded: &Model,
    records: &[ExpandedInstance],
    specs: &[CustomCellSpec],
    lib: &CellLibrary,
) -> Check {
    if expanded.gates.len() != original.gates.len() {
        return Err(format!(
            "expanded design has {} gates, original had {}",
            expanded.gates.len(),
            original.gates.len()
        ));
    }
    if rewritten.instances.len() != records.len() {
        return Err(format!(
            "{} rewrite instances but {} expansion records",
            rewritten.instances.len(),
            records.len()
        ));
    }
    if expanded.inputs != original.inputs
        || expanded.outputs != original.outputs
        || expanded.latches != original.latches
    {
        return Err("model ports or latches changed in the round trip".into());
    }

    // Gate bijection: member gates map through the paired instance records,
    // everything else pairs up in order.
    let mut gate_map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut replaced: HashSet<usize> = HashSet::new();
    let mut recreated: HashSet<usize> = HashSet::new();
    for (inst, rec) in rewritten.instances.iter().zip(records) {
        if inst.spec != rec.spec {
            return Err("instance and expansion records disagree on the spec".into());
        }
        let spec = &specs[inst.spec];
        if inst.member_gates.len() != spec.group.size() || rec.gates.len() != spec.group.size() {
            return Err(format!("pattern {} record has the wrong size", spec.name));
        }
        for (pos, (&og, &xg)) in inst.member_gates.iter().zip(&rec.gates).enumerate() {
            let cell = &spec.group.cells[pos];
            if original.gates[og].cell != *cell || expanded.gates[xg].cell != *cell {
                return Err(format!(
                    "pattern {} position {pos} should be {cell}, found {} -> {}",
                    spec.name, original.gates[og].cell, expanded.gates[xg].cell
                ));
            }
            if gate_map.insert(og, xg).is_some() {
                return Err(format!("original gate {og} mapped twice"));
            }
            replaced.insert(og);
            recreated.insert(xg);
        }
    }
    let untouched_orig = (0..original.gates.len()).filter(|g| !replaced.contains(g));
    let untouched_exp: Vec<usize> = (0..expanded.gates.len())
        .filter(|g| !recreated.contains(g))
        .collect();
    for (og, &xg) in untouched_orig.zip(&untouched_exp) {
        let (o, x) = (&original.gates[og], &expanded.gates[xg]);
        if o.cell != x.cell || o.conns != x.conns {
            return Err(format!(
                "untouched gate {og} ({}) came back altered",
                o.cell
            ));
        }
        gate_map.insert(og, xg);
    }
    if gate_map.len() != original.gates.len() {
        return Err("gate bijection is incomplete".into());
    }

    // Edge-for-edge equality under the mapping, with boundary preserved.
    let g_orig = build_graph(original, lib).map_err(|e| e.to_string())?;
    let g_exp = build_graph(expanded, lib).map_err(|e| e.to_string())?;
    if g_orig.boundary_nets != g_exp.boundary_nets {
        return Err("boundary nets changed in the round trip".into());
    }
    let vertex_of = |g: &NetlistGraph| -> HashMap<usize, VertexId> {
        g.vertices
            .iter()
            .enumerate()
            .map(|(v, gv)| (gv.gate, v as VertexId))
            .collect()
    };
    let (vo, vx) = (vertex_of(&g_orig), vertex_of(&g_exp));
    let bucket = |g: &NetlistGraph| -> HashMap<(usize, usize), Vec<(String, String)>> {
        let mut m: HashMap<(usize, usize), Vec<(String, String)>> = HashMap::new();
        for e in &g.edges {
            m.entry((
                g.vertices[e.driver as usize].gate,
                g.vertices[e.sink as usize].gate,
            ))
            .or_default()
            .push((e.out_pin.clone(), e.in_canon.clone()));
        }
        for labels in m.values_mut() {
            labels.sort();
        }
        m
    };
    let (eo, ex) = (bucket(&g_orig), bucket(&g_exp));
    if g_orig.edges.len() != g_exp.edges.len() {
        return Err(format!(
            "edge count changed: {} -> {}",
            g_orig.edges.len(),
            g_exp.edges.len()
        ));
    }
    for ((od, os), labels) in &eo {
        let key = (
            g_exp.vertices[vx[&gate_map[od]] as usize].gate,
            g_exp.vertices[vx[&gate_map[os]] as usize].gate,
        );
        if ex.get(&key) != Some(labels) {
            return Err(format!(
                "edges between gates {od} and {os} changed in the round trip"
            ));
        }
    }
    let _ = vo;
    Ok(())
}
