//! Run the whole pipeline on a small design and print every artifact the
//! toolkit produces: the merged-cell SPICE deck, the rewritten BLIF, the
//! library extension declaring the new cells, and the JSON/CSV reports.
//!
//! Run with `cargo run --example emit_artifacts`.

use std::collections::HashMap;

use cellmine::emit::{
    build_report, build_spec, generate_spice, library_extension, rewrite_netlist,
};
use cellmine::library::AreaModel;
use cellmine::mining::{mine, MiningConfig};
use cellmine::netlist::{build_graph, parse_blif, write_blif};
use cellmine::synth::builtin_library;

const DESIGN: &str = "\
.model demo
.inputs a0 b0 a1 b1 a2 b2
.outputs y0 y1 y2
.gate NAND2X1 A=a0 B=b0 Y=n0
.gate INVX1 A=n0 Y=y0
.gate NAND2X1 A=a1 B=b1 Y=n1
.gate INVX1 A=n1 Y=y1
.gate NAND2X1 A=a2 B=b2 Y=n2
.gate INVX1 A=n2 Y=y2
.end
";

fn main() -> cellmine::Result<()> {
    let lib = builtin_library();
    let design = parse_blif(DESIGN, "demo.blif")?.flatten()?;
    let model = design.top_model();
    let graph = build_graph(model, &lib)?;

    let cfg = MiningConfig {
        k: lib.k,
        ..MiningConfig::default()
    };
    let outcome = mine(&graph, &cfg)?;

    // One wiring plan per selected pattern; the plan decides which member
    // pins become ports and which disappear inside the merged cell.
    let specs = outcome
        .best
        .groups
        .iter()
        .map(|g| build_spec(g, &graph, model, &lib))
        .collect::<cellmine::Result<Vec<_>>>()?;

    let mut spice_paths = HashMap::new();
    for spec in &specs {
        let deck = generate_spice(spec, &lib)?;
        println!("--- {}.sp ---\n{deck}", spec.name);
        spice_paths.insert(spec.group.code.clone(), format!("{}.sp", spec.name));
    }

    let area_model = AreaModel::linear(lib.k)?;
    let ext = library_extension(&specs, &lib, &area_model, &spice_paths)?;
    println!("--- {}.acx ---\n{}", ext.name, ext.to_text());

    let rewritten = rewrite_netlist(&design, &graph, &specs, &lib)?;
    println!(
        "--- rewritten BLIF ({} gates replaced) ---\n{}",
        rewritten.replaced_gates,
        write_blif(&rewritten.netlist)
    );

    let report = build_report(
        &model.name,
        model,
        &graph,
        &lib,
        &outcome.best,
        outcome.iterations,
        outcome.fsm_seconds,
        &area_model,
        &spice_paths,
    )?;
    println!("--- report.json ---\n{}", report.to_json()?);
    println!("--- report.csv ---\n{}", report.to_csv()?);
    Ok(())
}
