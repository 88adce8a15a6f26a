//! Show the two canonical string encodings the miner is built on:
//!
//! * **tree codes** — each vertex plus all of its predecessors, the
//!   starting point ("seed") of every pattern group;
//! * **attachment codes** — how one extra neighbor hangs off an existing
//!   subgraph, used to decide which growth direction wins an iteration.
//!
//! Equal code means isomorphic structure, so the miner never runs a graph
//! matcher: it just compares strings.
//!
//! Run with `cargo run --example pattern_codes`.

use cellmine::mining::{neighbor_attachment, tree_encode};
use cellmine::netlist::{build_graph, parse_blif};
use cellmine::synth::builtin_library;

const DESIGN: &str = "\
.model codes
.inputs a b c d
.outputs y
.gate INVX1 A=a Y=na
.gate INVX1 A=b Y=nb
.gate NAND2X1 A=na B=nb Y=n0
.gate NAND2X1 A=c B=d Y=n1
.gate NOR2X1 A=n0 B=n1 Y=y
.end
";

fn main() -> cellmine::Result<()> {
    let lib = builtin_library();
    let design = parse_blif(DESIGN, "codes.blif")?.flatten()?;
    let model = design.top_model();
    let graph = build_graph(model, &lib)?;

    println!("seed tree per vertex (root + every predecessor):");
    for v in 0..graph.n_vertices() as u32 {
        let tree = tree_encode(&graph, v);
        println!("  v{v} {:8} {}", model.gates[graph.vertices[v as usize].gate].cell, tree.code);
    }

    // The two NAND2X1 gates get different codes: one is fed by inverters,
    // the other directly by primary inputs (no predecessor vertices at all).
    // Identical structure ends up with byte-identical codes, e.g. both
    // inverters encode as a bare root.

    // Grow the inverter-pair NAND by hand and survey its neighborhood.
    let seed = tree_encode(&graph, 2);
    println!("\ngrowing from seed {} with vertices {:?}", seed.code, seed.vertices);
    let mut neighbors: Vec<u32> = Vec::new();
    for &v in &seed.vertices {
        let adjacency = graph.in_edges[v as usize]
            .iter()
            .chain(graph.out_edges[v as usize].iter());
        for &eid in adjacency {
            let e = &graph.edges[eid as usize];
            let other = if e.sink == v { e.driver } else { e.sink };
            if !seed.vertices.contains(&other) && !neighbors.contains(&other) {
                neighbors.push(other);
            }
        }
    }
    for v in neighbors {
        let att = neighbor_attachment(&graph, v, &seed.vertices);
        println!(
            "  neighbor v{v}: {}  ({} edge{})",
            att.code,
            att.edges.len(),
            if att.edges.len() == 1 { "" } else { "s" }
        );
    }
    // `(0,Y,A)` reads "subgraph vertex 0 drives the newcomer's A pin";
    // `(Y,A,1)` reads "the newcomer drives subgraph vertex 1's A pin".
    // Pin names are canonicalized, so swapping NAND inputs changes nothing.
    Ok(())
}
