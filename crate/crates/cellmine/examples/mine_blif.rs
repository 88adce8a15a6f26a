//! Mine a small flattened design and watch the loop work: seeds claim
//! vertices, the densest group grows by one vertex per iteration, and the
//! run stops when the reward curve turns down twice or nothing can grow.
//!
//! Run with `cargo run --example mine_blif`.

use cellmine::mining::{mine, MiningConfig};
use cellmine::netlist::{build_graph, parse_blif};
use cellmine::synth::builtin_library;

// Six copies of NAND2X1 -> INVX1 (an AND built from spare parts); four of
// them feed an OR2X1 stage, two end at outputs. All six pairs seed as one
// group, growth extends the four with OR successors into three-gate
// columns, and the two bare pairs stay behind as their own group.
const DESIGN: &str = "\
.model mine_demo
.inputs a0 b0 a1 b1 a2 b2 a3 b3 a4 b4 a5 b5 c0 c1 c2 c3
.outputs q0 q1 q2 q3 p4 p5
.gate NAND2X1 A=a0 B=b0 Y=n0
.gate INVX1 A=n0 Y=p0
.gate OR2X1 A=p0 B=c0 Y=q0
.gate NAND2X1 A=a1 B=b1 Y=n1
.gate INVX1 A=n1 Y=p1
.gate OR2X1 A=p1 B=c1 Y=q1
.gate NAND2X1 A=a2 B=b2 Y=n2
.gate INVX1 A=n2 Y=p2
.gate OR2X1 A=p2 B=c2 Y=q2
.gate NAND2X1 A=a3 B=b3 Y=n3
.gate INVX1 A=n3 Y=p3
.gate OR2X1 A=p3 B=c3 Y=q3
.gate NAND2X1 A=a4 B=b4 Y=n4
.gate INVX1 A=n4 Y=p4
.gate NAND2X1 A=a5 B=b5 Y=n5
.gate INVX1 A=n5 Y=p5
.end
";

fn main() -> cellmine::Result<()> {
    let lib = builtin_library();
    let design = parse_blif(DESIGN, "mine_demo.blif")?.flatten()?;
    let model = design.top_model();
    let graph = build_graph(model, &lib)?;

    let cfg = MiningConfig {
        k: lib.k,
        ..MiningConfig::default()
    };
    let outcome = mine(&graph, &cfg)?;

    println!(
        "{} vertices mined in {} iterations ({:.4}s)\n",
        graph.n_vertices(),
        outcome.iterations,
        outcome.fsm_seconds
    );

    println!("growth log:");
    for rec in &outcome.growth_log {
        println!(
            "  iter {:2}: {} + {}  ({} of {} occurrences kept)",
            rec.iteration, rec.tgt_code, rec.winner_code, rec.new_count, rec.tgt_before
        );
    }

    println!("\nreward after each iteration (best is kept, not the last):");
    for r in outcome.history.records() {
        println!("  iter {:2}: reward {:.2}", r.iteration, r.reward_approx);
    }

    println!("\nselected combination:");
    for group in &outcome.best.groups {
        println!(
            "  {}  size {} x {} occurrences = {} vertices",
            group.code,
            group.size(),
            group.count(),
            group.coverage()
        );
        for member in &group.members {
            let gates: Vec<&str> = member
                .iter()
                .map(|&v| model.gates[graph.vertices[v as usize].gate].cell.as_str())
                .collect();
            println!("    vertices {member:?} = {}", gates.join(" + "));
        }
    }
    Ok(())
}
