//! Parse a hierarchical BLIF design, flatten it, partition it one level
//! below the top, and inspect the labeled graph built from each piece.
//!
//! Run with `cargo run --example parse_and_partition`.

use cellmine::netlist::{build_graph, parse_blif};
use cellmine::synth::builtin_library;

// Two instances of a small adder-ish block plus some top-level glue.
// The sub-model boundary shows up later as partition boundaries.
const DESIGN: &str = "\
.model top
.inputs a b c d clk
.outputs q
.subckt stage x=a y=b z=s0
.subckt stage x=c y=d z=s1
.gate OR2X1 A=s0 B=s1 Y=sq
.latch sq q re clk 0
.end
.model stage
.inputs x y
.outputs z
.gate NAND2X1 A=x B=y Y=n
.gate INVX1 A=n Y=z
.end
";

fn main() -> cellmine::Result<()> {
    let lib = builtin_library();
    let design = parse_blif(DESIGN, "adder.blif")?;

    println!("parsed {} models, top = {}", design.models().len(), design.top_model().name);

    // Depth 0 is the whole design, flattened into one combinational sea.
    let flat = design.flatten()?;
    let graph = build_graph(flat.top_model(), &lib)?;
    println!(
        "\nflattened: {} gates -> {} combinational vertices, {} edges",
        flat.top_model().gates.len(),
        graph.n_vertices(),
        graph.edges.len()
    );
    // The latch disappears from the graph but its nets fence off the logic.
    println!("boundary nets: {:?}", graph.boundary_nets);

    // Depth 1 mines each sub-model instance separately.
    let parts = design.partition(1)?;
    for w in &parts.warnings {
        println!("warning: {w}");
    }
    println!("\npartitions at depth 1:");
    for (path, part) in &parts.partitions {
        let g = build_graph(part.top_model(), &lib)?;
        println!(
            "  {path}: {} gates, {} vertices",
            part.top_model().gates.len(),
            g.n_vertices()
        );
        for v in &g.vertices {
            let gate = &part.top_model().gates[v.gate];
            println!("    {} ({})", gate.cell, gate.conns.iter().map(|(p, n)| format!("{p}={n}")).collect::<Vec<_>>().join(" "));
        }
    }
    Ok(())
}
